use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::frames::{
    enumerate_frames, validity_up_to_with, CompactFrame, SearchOptions, ValidityVerdict, MAX_BOUND,
};
use crate::syntax::{Agent, Formula, Vocabulary};

use super::PaperlabError;

/// Target language of the search: agents of both sides, or no agents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InterpolationMode {
    Rcip,
    Srcip,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SearchBounds {
    /// Maximal node count after desugaring.
    pub size_bound: usize,
    /// Maximal number of histories in the frames used as entailment proxy.
    pub frame_bound: usize,
}

/// A formula found by a bounded search, with the frame bounds at which it
/// was re-verified by the independent validity search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub formula: Formula,
    pub size: usize,
    pub reverified: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Witness),
    NotFoundUpTo { size_bound: usize },
}

impl SearchOutcome {
    pub fn found(&self) -> Option<&Witness> {
        match self {
            SearchOutcome::Found(w) => Some(w),
            SearchOutcome::NotFoundUpTo { .. } => None,
        }
    }
}

/// Truth of a formula at every history of every enumerated frame, one
/// mask per frame.
type Signature = Vec<u64>;

struct Universe {
    vars: Vec<String>,
    agents: Vec<Agent>,
    frames: Vec<CompactFrame>,
}

impl Universe {
    fn new(voc: &Vocabulary, frame_bound: usize, opts: &SearchOptions) -> Result<Self, PaperlabError> {
        let vars: Vec<String> = voc.vars.iter().cloned().collect();
        let agents: Vec<Agent> = voc.agents.iter().copied().collect();
        let frames = enumerate_frames(vars.len(), agents.len(), frame_bound, opts)?;
        Ok(Universe {
            vars,
            agents,
            frames,
        })
    }

    fn var(&self, v: &str) -> Signature {
        let k = self.vars.iter().position(|x| x == v).expect("var in universe");
        self.frames.iter().map(|f| f.masks[k]).collect()
    }

    fn bottom(&self) -> Signature {
        vec![0; self.frames.len()]
    }

    fn implies(&self, a: &Signature, b: &Signature) -> Signature {
        self.frames
            .iter()
            .zip(a.iter().zip(b))
            .map(|(f, (x, y))| (!x | y) & f.full())
            .collect()
    }

    fn boxed(&self, a: &Signature) -> Signature {
        self.frames
            .iter()
            .zip(a)
            .map(|(f, &x)| if x == f.full() { f.full() } else { 0 })
            .collect()
    }

    fn stit(&self, j: Agent, a: &Signature) -> Signature {
        let k = self.agents.iter().position(|&x| x == j).expect("agent in universe");
        self.frames
            .iter()
            .zip(a)
            .map(|(f, &x)| {
                f.cells[k]
                    .iter()
                    .filter(|&&c| c & x == c)
                    .fold(0, |acc, &c| acc | c)
            })
            .collect()
    }

    fn eval(&self, f: &Formula) -> Signature {
        match f {
            Formula::Var(v) => self.var(v),
            Formula::Bottom => self.bottom(),
            Formula::Implies(a, b) => self.implies(&self.eval(a), &self.eval(b)),
            Formula::Boxed(a) => self.boxed(&self.eval(a)),
            Formula::Stit(j, a) => self.stit(*j, &self.eval(a)),
            other => self.eval(&other.desugar()),
        }
    }
}

fn entails(a: &Signature, b: &Signature) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

/// Least-size core formula `C` over `lang` with `lhs -> C` and `C -> rhs`
/// valid on all frames up to the bound. Candidates are built bottom-up from
/// one representative per signature, which loses nothing because the
/// signature of a compound depends only on the signatures of its parts.
fn search_between(
    lhs: &Formula,
    rhs: &Formula,
    lang: &Vocabulary,
    bounds: SearchBounds,
    opts: &SearchOptions,
) -> Result<SearchOutcome, PaperlabError> {
    let universe_voc = lhs.vocabulary().union(&rhs.vocabulary()).union(lang);
    let u = Universe::new(&universe_voc, bounds.frame_bound, opts)?;
    let (sig_l, sig_r) = (u.eval(&lhs.desugar()), u.eval(&rhs.desugar()));

    let mut seen: HashSet<Signature> = HashSet::new();
    let mut levels: Vec<Vec<(Formula, Signature)>> = vec![Vec::new()];
    for size in 1..=bounds.size_bound {
        let mut level = Vec::new();
        let mut found = None;
        let mut offer = |f: Formula, sig: Signature, level: &mut Vec<(Formula, Signature)>| {
            if found.is_some() || seen.contains(&sig) {
                return;
            }
            if entails(&sig_l, &sig) && entails(&sig, &sig_r) {
                found = Some(f.clone());
            }
            seen.insert(sig.clone());
            level.push((f, sig));
        };
        if size == 1 {
            for v in &lang.vars {
                offer(Formula::var(v.clone()), u.var(v), &mut level);
            }
            offer(Formula::Bottom, u.bottom(), &mut level);
        } else {
            for (f, s) in &levels[size - 1] {
                offer(Formula::boxed(f.clone()), u.boxed(s), &mut level);
            }
            for &j in &lang.agents {
                for (f, s) in &levels[size - 1] {
                    offer(Formula::stit(j, f.clone()), u.stit(j, s), &mut level);
                }
            }
            for left in 1..size - 1 {
                for (fa, sa) in &levels[left] {
                    for (fb, sb) in &levels[size - 1 - left] {
                        offer(
                            Formula::implies(fa.clone(), fb.clone()),
                            u.implies(sa, sb),
                            &mut level,
                        );
                    }
                }
            }
        }
        if let Some(c) = found {
            let reverified = reverify(lhs, &c, rhs, bounds.frame_bound, &universe_voc)?;
            return Ok(SearchOutcome::Found(Witness {
                size: c.size(),
                formula: c.resugar(),
                reverified,
            }));
        }
        levels.push(level);
    }
    Ok(SearchOutcome::NotFoundUpTo {
        size_bound: bounds.size_bound,
    })
}

fn bell(n: usize) -> f64 {
    [1.0, 1.0, 2.0, 5.0, 15.0, 52.0, 203.0, 877.0, 4140.0][n.min(8)]
}

/// Re-checks both implications with the formula-level validity search at
/// the frame bound and, when the frame space stays small, one above it.
fn reverify(
    lhs: &Formula,
    c: &Formula,
    rhs: &Formula,
    frame_bound: usize,
    voc: &Vocabulary,
) -> Result<Vec<usize>, PaperlabError> {
    let mut bounds = vec![frame_bound];
    let next = frame_bound + 1;
    let work = bell(next).powi(voc.agents.len() as i32) * 2f64.powi((next * voc.vars.len()) as i32);
    if next <= MAX_BOUND && work <= 2e6 {
        bounds.push(next);
    }
    let opts = SearchOptions {
        allow_large: true,
        ..SearchOptions::default()
    };
    for &k in &bounds {
        for f in [
            Formula::implies(lhs.clone(), c.clone()),
            Formula::implies(c.clone(), rhs.clone()),
        ] {
            if let ValidityVerdict::Countermodel { history, .. } = validity_up_to_with(&f, k, &opts)? {
                return Err(PaperlabError::Reverification(format!(
                    "{f} fails at {history} with {k} histories"
                )));
            }
        }
    }
    Ok(bounds)
}

/// Searches for `C` in the shared language with `A -> C` and `C -> B`
/// bounded-valid. Requires disjoint agents and `A -> B` bounded-valid.
pub fn interpolant_search(
    a: &Formula,
    b: &Formula,
    mode: InterpolationMode,
    bounds: SearchBounds,
    opts: &SearchOptions,
) -> Result<SearchOutcome, PaperlabError> {
    let (va, vb) = (a.vocabulary(), b.vocabulary());
    let shared_agents: Vec<Agent> = va.agents.intersection(&vb.agents).copied().collect();
    if !shared_agents.is_empty() {
        return Err(PaperlabError::SharedAgents(shared_agents));
    }
    let implication = Formula::implies(a.clone(), b.clone());
    if let ValidityVerdict::Countermodel { frame, history } =
        validity_up_to_with(&implication, bounds.frame_bound, opts)?
    {
        return Err(PaperlabError::NotValid {
            formula: implication.to_string(),
            history,
            frame: serde_json::to_string(&frame).unwrap_or_default(),
        });
    }
    let lang = Vocabulary {
        vars: va.vars.intersection(&vb.vars).cloned().collect(),
        agents: match mode {
            InterpolationMode::Rcip => va.agents.union(&vb.agents).copied().collect(),
            InterpolationMode::Srcip => Default::default(),
        },
    };
    search_between(a, b, &lang, bounds, opts)
}

/// Searches for `A` over the shared variables and the agents of both sides
/// with `/\Γ -> A` and `/\Δ -> ~A` bounded-valid.
pub fn is_separable_bounded(
    gamma: &[Formula],
    delta: &[Formula],
    bounds: SearchBounds,
    opts: &SearchOptions,
) -> Result<SearchOutcome, PaperlabError> {
    let (vg, vd) = (Vocabulary::of_all(gamma), Vocabulary::of_all(delta));
    let shared_agents: Vec<Agent> = vg.agents.intersection(&vd.agents).copied().collect();
    if !shared_agents.is_empty() {
        return Err(PaperlabError::SharedAgents(shared_agents));
    }
    let lang = Vocabulary {
        vars: vg.vars.intersection(&vd.vars).cloned().collect(),
        agents: vg.agents.union(&vd.agents).copied().collect(),
    };
    let lhs = Formula::conj(gamma.iter().cloned());
    let rhs = Formula::not(Formula::conj(delta.iter().cloned()));
    search_between(&lhs, &rhs, &lang, bounds, opts)
}
