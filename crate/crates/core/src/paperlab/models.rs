use std::collections::BTreeSet;
use std::fmt;

use crate::bisim::HistoryRelation;
use crate::semantics::{ModelSpec, StitModel};
use crate::syntax::{agent, Agent, Formula};

use super::PaperlabError;

pub const ROOT_S: &str = "dag";
pub const ROOT_S_PRIME: &str = "ddag";

/// A signed 4-tuple over {0,1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FourTuple {
    core: [u8; 4],
    plus: bool,
}

impl FourTuple {
    pub fn new(core: [u8; 4], plus: bool) -> Option<FourTuple> {
        core.iter()
            .all(|&x| x <= 1)
            .then_some(FourTuple { core, plus })
    }

    /// All 32 elements: cores in binary order, `+` before `-`.
    pub fn all() -> Vec<FourTuple> {
        (0..16u8)
            .flat_map(|bits| {
                let core = [bits >> 3 & 1, bits >> 2 & 1, bits >> 1 & 1, bits & 1];
                [true, false].map(|plus| FourTuple { core, plus })
            })
            .collect()
    }

    /// Projection `j` for `j` in 1..=4.
    pub fn pr(&self, j: usize) -> u8 {
        self.core[j - 1]
    }

    pub fn core(&self) -> [u8; 4] {
        self.core
    }

    pub fn is_plus(&self) -> bool {
        self.plus
    }

    pub fn with_sign(&self, plus: bool) -> FourTuple {
        FourTuple { plus, ..*self }
    }

    /// Moment name, e.g. `t0101m` for (0,1,0,1) signed `-`.
    pub fn name(&self) -> String {
        let digits: String = self.core.iter().map(|d| char::from(b'0' + d)).collect();
        format!("t{digits}{}", if self.plus { 'p' } else { 'm' })
    }

    pub fn parse(name: &str) -> Option<FourTuple> {
        let b = name.as_bytes();
        if b.len() != 6 || b[0] != b't' {
            return None;
        }
        let mut core = [0u8; 4];
        for (i, c) in b[1..5].iter().enumerate() {
            core[i] = match c {
                b'0' => 0,
                b'1' => 1,
                _ => return None,
            };
        }
        let plus = match b[5] {
            b'p' => true,
            b'm' => false,
            _ => return None,
        };
        Some(FourTuple { core, plus })
    }

    /// Name of the history `root>tuple`.
    pub fn history(&self, root: &str) -> String {
        format!("{root}>{}", self.name())
    }
}

impl fmt::Display for FourTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.core;
        write!(
            f,
            "({},{},{},{}){}",
            c[0],
            c[1],
            c[2],
            c[3],
            if self.plus { '+' } else { '-' }
        )
    }
}

/// `(root, h_m) ∈ V(q)` in the first model.
pub fn q_in_s(m: &FourTuple) -> bool {
    (m.pr(1) == 0 && m.pr(2) == 0) || (m.pr(3) == 0 && m.pr(4) == 0) || m.is_plus()
}

/// `(root, g_m) ∈ V'(q)` in the second model.
pub fn q_in_s_prime(m: &FourTuple) -> bool {
    (m.pr(3) == 0 && m.pr(4) == 0) || (m.is_plus() && (m.pr(3) != 1 || m.pr(4) != 0))
}

type Clause<'a> = (&'a str, fn(&FourTuple) -> bool);

fn root_plus_tuples(root: &str, valuation: &[Clause]) -> StitModel {
    let tuples = FourTuple::all();
    let mut spec = ModelSpec {
        moments: std::iter::once(root.to_string())
            .chain(tuples.iter().map(FourTuple::name))
            .collect(),
        order: tuples
            .iter()
            .map(|m| (root.to_string(), m.name()))
            .collect(),
        agents: (1..=4).map(agent).collect(),
        ..ModelSpec::default()
    };
    let choice = spec.choice.entry(root.to_string()).or_default();
    for j in 1..=4usize {
        let cell = |bit: u8| {
            tuples
                .iter()
                .filter(|m| m.pr(j) == bit)
                .map(|m| m.history(root))
                .collect::<Vec<_>>()
        };
        choice.insert(agent(j as u32), vec![cell(0), cell(1)]);
    }
    for (var, holds) in valuation {
        for m in tuples.iter().filter(|m| holds(m)) {
            spec.valuation
                .push((var.to_string(), root.to_string(), m.history(root)));
        }
    }
    StitModel::from_spec(&spec).expect("tuple model is well formed")
}

/// The `{p, q}` model over the root `dag`.
pub fn build_s() -> StitModel {
    root_plus_tuples(ROOT_S, &[("p", |m| m.pr(1) == 0), ("q", q_in_s)])
}

/// The `{q, r}` model over the root `ddag`.
pub fn build_s_prime() -> StitModel {
    root_plus_tuples(ROOT_S_PRIME, &[("q", q_in_s_prime), ("r", |m| m.pr(3) == 1)])
}

/// Restriction of the valuation to `vars`.
pub fn reduct(model: &StitModel, vars: &BTreeSet<String>) -> Result<StitModel, PaperlabError> {
    let known = model.vars();
    if let Some(v) = vars.iter().find(|v| !known.contains(*v)) {
        return Err(PaperlabError::UnknownVariable(v.clone()));
    }
    Ok(model.restrict_valuation(vars))
}

/// Pairs of histories that agree on `q` across the two tuple models.
pub fn build_b() -> HistoryRelation {
    let tuples = FourTuple::all();
    HistoryRelation::new(tuples.iter().flat_map(|m| {
        tuples
            .iter()
            .filter(move |m1| q_in_s(m) == q_in_s_prime(m1))
            .map(move |m1| (m.history(ROOT_S), m1.history(ROOT_S_PRIME)))
    }))
}

pub const M_ROOT: &str = "m";
pub const M_H0: &str = "m>m0";
pub const M_H1: &str = "m>m1";

/// Three moments `m < m0, m1`; agent `j` separates the two histories and
/// `p` holds exactly at `(m, m>m0)`.
pub fn build_m(j: Agent, p: &str) -> StitModel {
    let mut spec = ModelSpec {
        moments: vec![M_ROOT.into(), "m0".into(), "m1".into()],
        order: vec![(M_ROOT.into(), "m0".into()), (M_ROOT.into(), "m1".into())],
        agents: vec![j],
        ..ModelSpec::default()
    };
    spec.choice
        .entry(M_ROOT.into())
        .or_default()
        .insert(j, vec![vec![M_H0.into()], vec![M_H1.into()]]);
    spec.valuation
        .push((p.to_string(), M_ROOT.into(), M_H0.into()));
    StitModel::from_spec(&spec).expect("two-history model is well formed")
}

/// `<>([j1]p & [j2](p -> q))`
pub fn antecedent(j1: Agent, j2: Agent, p: &str, q: &str) -> Formula {
    let (p, q) = (Formula::var(p), Formula::var(q));
    Formula::diamond(Formula::and(
        Formula::stit(j1, p.clone()),
        Formula::stit(j2, Formula::implies(p, q)),
    ))
}

/// `~<>([j3]r & [j4](r -> ~q))`
pub fn consequent(j3: Agent, j4: Agent, r: &str, q: &str) -> Formula {
    let (r, q) = (Formula::var(r), Formula::var(q));
    Formula::not(Formula::diamond(Formula::and(
        Formula::stit(j3, r.clone()),
        Formula::stit(j4, Formula::implies(r, Formula::not(q))),
    )))
}

/// `<>[j1]p`
pub fn strong_antecedent(j1: Agent, p: &str) -> Formula {
    Formula::diamond(Formula::stit(j1, Formula::var(p)))
}

/// `~<>[j2]~p`
pub fn strong_consequent(j2: Agent, p: &str) -> Formula {
    Formula::not(Formula::diamond(Formula::stit(
        j2,
        Formula::not(Formula::var(p)),
    )))
}
