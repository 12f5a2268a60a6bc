use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::Serialize;
use thiserror::Error;

use super::frame::{model_history_name, root_name, to_model, ChoiceFrame};
use crate::semantics::{satisfies_named, validate};
use crate::syntax::{Agent, Formula};

/// Bounds at or above this need [`SearchOptions::allow_large`].
pub const LARGE_BOUND: usize = 4;
/// Hard upper limit on the number of histories.
pub const MAX_BOUND: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    pub workers: usize,
    /// Skip frames that are not the least member of their isomorphism class.
    pub prune: bool,
    pub allow_large: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            workers: 1,
            prune: true,
            allow_large: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("bound must be at least 1")]
    ZeroBound,
    #[error("bound {0} is large; enable large bounds explicitly")]
    NeedsLarge(usize),
    #[error("bound {0} exceeds the supported maximum of {MAX_BOUND}")]
    TooLarge(usize),
    #[error("formula has {0} variables; too many for exhaustive valuation search at this bound")]
    TooManyVariables(usize),
    #[error("witness failed re-check in the model checker: {0}")]
    WitnessRejected(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum SearchVerdict {
    Satisfiable { frame: ChoiceFrame, history: String },
    NoModelUpTo { bound: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum ValidityVerdict {
    ValidUpTo { bound: usize },
    Countermodel { frame: ChoiceFrame, history: String },
}

impl SearchVerdict {
    pub fn is_satisfiable(&self) -> bool {
        matches!(self, SearchVerdict::Satisfiable { .. })
    }
}

impl ValidityVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, ValidityVerdict::ValidUpTo { .. })
    }
}

/// Searches frames with at most `bound` histories for one satisfying `f`.
pub fn sat_search(f: &Formula, bound: usize) -> Result<SearchVerdict, SearchError> {
    sat_search_with(f, bound, &SearchOptions::default())
}

/// Searches for a frame refuting `f`.
pub fn validity_up_to(f: &Formula, bound: usize) -> Result<ValidityVerdict, SearchError> {
    validity_up_to_with(f, bound, &SearchOptions::default())
}

pub fn validity_up_to_with(
    f: &Formula,
    bound: usize,
    opts: &SearchOptions,
) -> Result<ValidityVerdict, SearchError> {
    Ok(match sat_search_with(&Formula::not(f.clone()), bound, opts)? {
        SearchVerdict::Satisfiable { frame, history } => {
            ValidityVerdict::Countermodel { frame, history }
        }
        SearchVerdict::NoModelUpTo { bound } => ValidityVerdict::ValidUpTo { bound },
    })
}

pub fn sat_search_with(
    f: &Formula,
    bound: usize,
    opts: &SearchOptions,
) -> Result<SearchVerdict, SearchError> {
    check_bound(bound, opts)?;
    let voc = f.vocabulary();
    let vars: Vec<String> = voc.vars.iter().cloned().collect();
    let agents: Vec<Agent> = voc.agents.iter().copied().collect();
    if vars.len() * bound > 40 {
        return Err(SearchError::TooManyVariables(vars.len()));
    }
    let compiled = Compiled::new(&f.desugar(), &vars, &agents);

    for n in 1..=bound {
        if let Some((tuple, masks, h)) = search_size(&compiled, n, agents.len(), vars.len(), opts) {
            let frame = build_frame(n, &agents, &vars, &tuple, &masks);
            let history = frame.histories()[h].clone();
            recheck(&frame, &history, f)?;
            return Ok(SearchVerdict::Satisfiable { frame, history });
        }
    }
    Ok(SearchVerdict::NoModelUpTo { bound })
}

fn recheck(frame: &ChoiceFrame, history: &str, f: &Formula) -> Result<(), SearchError> {
    let model = to_model(frame).map_err(|e| SearchError::WitnessRejected(e.to_string()))?;
    if let Some(v) = validate(&model).first() {
        return Err(SearchError::WitnessRejected(v.to_string()));
    }
    let holds = satisfies_named(
        &model,
        &root_name(frame),
        &model_history_name(frame, history),
        f,
    )
    .map_err(|e| SearchError::WitnessRejected(e.to_string()))?;
    if holds {
        Ok(())
    } else {
        Err(SearchError::WitnessRejected(format!(
            "formula false at {history}"
        )))
    }
}

fn build_frame(
    n: usize,
    agents: &[Agent],
    vars: &[String],
    tuple: &[Partition],
    masks: &[u64],
) -> ChoiceFrame {
    let histories = (0..n).map(|i| format!("h{i}")).collect();
    let partitions: BTreeMap<Agent, Vec<Vec<usize>>> = agents
        .iter()
        .zip(tuple)
        .map(|(&j, p)| {
            (
                j,
                p.cells
                    .iter()
                    .map(|&c| (0..n).filter(|i| c >> i & 1 == 1).collect())
                    .collect(),
            )
        })
        .collect();
    let valuation = (0..n)
        .map(|i| {
            vars.iter()
                .zip(masks)
                .filter(|(_, &m)| m >> i & 1 == 1)
                .map(|(v, _)| v.clone())
                .collect::<BTreeSet<_>>()
        })
        .collect();
    ChoiceFrame::new(histories, partitions, valuation).expect("generated frame is well formed")
}

/// A frame in bitmask form: per-agent cell masks and per-variable history
/// masks over `n` histories.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompactFrame {
    pub n: usize,
    pub cells: Vec<Vec<u64>>,
    pub masks: Vec<u64>,
}

impl CompactFrame {
    pub fn full(&self) -> u64 {
        (1u64 << self.n) - 1
    }
}

/// Every frame over `vars` variables and `agents` agents with at most
/// `bound` histories, one per isomorphism class, in search order.
pub fn enumerate_frames(
    vars: usize,
    agents: usize,
    bound: usize,
    opts: &SearchOptions,
) -> Result<Vec<CompactFrame>, SearchError> {
    check_bound(bound, opts)?;
    if vars * bound > 24 {
        return Err(SearchError::TooManyVariables(vars));
    }
    let mut out = Vec::new();
    for n in 1..=bound {
        let full = (1u64 << n) - 1;
        for cand in candidates(n, agents, opts.prune) {
            let total = 1u64 << (n * vars);
            for code in 0..total {
                let masks: Vec<u64> = (0..vars)
                    .map(|k| code >> (n * (vars - 1 - k)) & full)
                    .collect();
                if opts.prune && !valuation_canonical(&masks, &cand.stabilizer) {
                    continue;
                }
                out.push(CompactFrame {
                    n,
                    cells: cand.tuple.iter().map(|p| p.cells.clone()).collect(),
                    masks,
                });
            }
        }
    }
    Ok(out)
}

/// Converts a compact frame back into a labelled frame.
pub fn expand_frame(frame: &CompactFrame, agents: &[Agent], vars: &[String]) -> ChoiceFrame {
    let tuple: Vec<Partition> = frame
        .cells
        .iter()
        .map(|cells| Partition {
            rgs: Vec::new(),
            cells: cells.clone(),
        })
        .collect();
    build_frame(frame.n, agents, vars, &tuple, &frame.masks)
}

fn check_bound(bound: usize, opts: &SearchOptions) -> Result<(), SearchError> {
    if bound == 0 {
        return Err(SearchError::ZeroBound);
    }
    if bound > MAX_BOUND {
        return Err(SearchError::TooLarge(bound));
    }
    if bound >= LARGE_BOUND && !opts.allow_large {
        return Err(SearchError::NeedsLarge(bound));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Partition {
    rgs: Vec<u8>,
    cells: Vec<u64>,
}

/// Set partitions of `0..n` as restricted growth strings, in lexicographic
/// order.
fn partitions(n: usize) -> Vec<Partition> {
    fn go(n: usize, rgs: &mut Vec<u8>, max: u8, out: &mut Vec<Partition>) {
        if rgs.len() == n {
            out.push(from_rgs(rgs.clone()));
            return;
        }
        let top = if rgs.is_empty() { 0 } else { max + 1 };
        for b in 0..=top {
            rgs.push(b);
            go(n, rgs, max.max(b), out);
            rgs.pop();
        }
    }
    let mut out = Vec::new();
    go(n, &mut Vec::new(), 0, &mut out);
    out
}

fn from_rgs(rgs: Vec<u8>) -> Partition {
    let blocks = rgs.iter().copied().max().map_or(0, |m| m as usize + 1);
    let mut cells = vec![0u64; blocks];
    for (i, &b) in rgs.iter().enumerate() {
        cells[b as usize] |= 1 << i;
    }
    Partition { rgs, cells }
}

/// The restricted growth string of a partition after moving history `i` to
/// position `perm[i]`.
fn permuted_rgs(rgs: &[u8], perm: &[usize]) -> Vec<u8> {
    let mut image = vec![0u8; rgs.len()];
    for (i, &b) in rgs.iter().enumerate() {
        image[perm[i]] = b;
    }
    let mut relabel = [u8::MAX; 64];
    let mut next = 0u8;
    image
        .iter()
        .map(|&b| {
            if relabel[b as usize] == u8::MAX {
                relabel[b as usize] = next;
                next += 1;
            }
            relabel[b as usize]
        })
        .collect()
}

fn permuted_mask(mask: u64, perm: &[usize]) -> u64 {
    perm.iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .fold(0, |acc, (_, &p)| acc | 1 << p)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(rest: &mut Vec<usize>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            cur.push(x);
            go(rest, cur, out);
            cur.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    go(&mut (0..n).collect(), &mut Vec::new(), &mut out);
    out
}

fn independent(tuple: &[&Partition], full: u64) -> bool {
    fn go(tuple: &[&Partition], current: u64) -> bool {
        match tuple.split_first() {
            None => true,
            Some((p, rest)) => p
                .cells
                .iter()
                .all(|&c| current & c != 0 && go(rest, current & c)),
        }
    }
    go(tuple, full)
}

/// A partition tuple together with the permutations that fix it.
struct Candidate {
    tuple: Vec<Partition>,
    stabilizer: Vec<Vec<usize>>,
}

fn candidates(n: usize, agents: usize, prune: bool) -> Vec<Candidate> {
    let parts = partitions(n);
    let perms = if prune { permutations(n) } else { Vec::new() };
    let full = (1u64 << n) - 1;
    let mut out = Vec::new();
    let mut idx = vec![0usize; agents];
    loop {
        let tuple: Vec<&Partition> = idx.iter().map(|&i| &parts[i]).collect();
        if independent(&tuple, full) {
            let key: Vec<u8> = tuple.iter().flat_map(|p| p.rgs.iter().copied()).collect();
            let mut canonical = true;
            let mut stabilizer = Vec::new();
            for perm in &perms {
                let image: Vec<u8> = tuple
                    .iter()
                    .flat_map(|p| permuted_rgs(&p.rgs, perm))
                    .collect();
                match image.cmp(&key) {
                    std::cmp::Ordering::Less => {
                        canonical = false;
                        break;
                    }
                    std::cmp::Ordering::Equal => stabilizer.push(perm.clone()),
                    std::cmp::Ordering::Greater => {}
                }
            }
            if canonical {
                out.push(Candidate {
                    tuple: tuple.into_iter().cloned().collect(),
                    stabilizer,
                });
            }
        }
        // odometer with the last agent varying fastest
        let mut pos = agents;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < parts.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Least satisfying (tuple, valuation, history) for `n` histories.
fn search_size(
    compiled: &Compiled,
    n: usize,
    agents: usize,
    vars: usize,
    opts: &SearchOptions,
) -> Option<(Vec<Partition>, Vec<u64>, usize)> {
    let cands = candidates(n, agents, opts.prune);
    let best = AtomicUsize::new(usize::MAX);
    let workers = opts.workers.max(1).min(cands.len().max(1));
    let scan = |range: std::ops::Range<usize>| -> Option<(usize, Vec<u64>, usize)> {
        let mut scratch = Vec::new();
        for i in range {
            if i > best.load(Ordering::Relaxed) {
                return None;
            }
            if let Some((masks, h)) =
                scan_valuations(compiled, n, vars, &cands[i], opts.prune, &mut scratch)
            {
                best.fetch_min(i, Ordering::Relaxed);
                return Some((i, masks, h));
            }
        }
        None
    };
    let found = if workers == 1 {
        scan(0..cands.len())
    } else {
        let chunk = cands.len().div_ceil(workers);
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let lo = (w * chunk).min(cands.len());
                    let hi = ((w + 1) * chunk).min(cands.len());
                    let scan = &scan;
                    s.spawn(move || scan(lo..hi))
                })
                .collect();
            handles
                .into_iter()
                .filter_map(|h| h.join().expect("search worker panicked"))
                .min_by_key(|(i, _, _)| *i)
        })
    };
    found.map(|(i, masks, h)| (cands[i].tuple.clone(), masks, h))
}

fn scan_valuations(
    compiled: &Compiled,
    n: usize,
    vars: usize,
    cand: &Candidate,
    prune: bool,
    scratch: &mut Vec<u64>,
) -> Option<(Vec<u64>, usize)> {
    let full = (1u64 << n) - 1;
    let total = 1u64 << (n * vars);
    let mut masks = vec![0u64; vars];
    for code in 0..total {
        for (k, m) in masks.iter_mut().enumerate() {
            *m = code >> (n * (vars - 1 - k)) & full;
        }
        if prune && !valuation_canonical(&masks, &cand.stabilizer) {
            continue;
        }
        let sat = compiled.eval(&masks, &cand.tuple, full, scratch);
        if sat != 0 {
            return Some((masks, sat.trailing_zeros() as usize));
        }
    }
    None
}

fn valuation_canonical(masks: &[u64], stabilizer: &[Vec<usize>]) -> bool {
    stabilizer.iter().all(|perm| {
        for &m in masks {
            let image = permuted_mask(m, perm);
            if image != m {
                return image > m;
            }
        }
        true
    })
}

#[derive(Clone, Copy, Debug)]
enum Node {
    Var(usize),
    Bottom,
    Imp(usize, usize),
    Boxed(usize),
    Stit(usize, usize),
}

/// Core formula flattened into a DAG of bitmask operations over histories.
struct Compiled {
    nodes: Vec<Node>,
}

impl Compiled {
    fn new(core: &Formula, vars: &[String], agents: &[Agent]) -> Compiled {
        let mut c = Compiled { nodes: Vec::new() };
        let mut memo = HashMap::new();
        c.add(core, vars, agents, &mut memo);
        c
    }

    fn add(
        &mut self,
        f: &Formula,
        vars: &[String],
        agents: &[Agent],
        memo: &mut HashMap<Formula, usize>,
    ) -> usize {
        if let Some(&i) = memo.get(f) {
            return i;
        }
        let node = match f {
            Formula::Var(v) => Node::Var(vars.iter().position(|x| x == v).expect("var in vocabulary")),
            Formula::Bottom => Node::Bottom,
            Formula::Implies(a, b) => {
                let a = self.add(a, vars, agents, memo);
                let b = self.add(b, vars, agents, memo);
                Node::Imp(a, b)
            }
            Formula::Boxed(a) => Node::Boxed(self.add(a, vars, agents, memo)),
            Formula::Stit(j, a) => {
                let a = self.add(a, vars, agents, memo);
                Node::Stit(agents.iter().position(|x| x == j).expect("agent in vocabulary"), a)
            }
            other => unreachable!("not a core formula: {other}"),
        };
        self.nodes.push(node);
        memo.insert(f.clone(), self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    fn eval(&self, masks: &[u64], tuple: &[Partition], full: u64, vals: &mut Vec<u64>) -> u64 {
        vals.clear();
        for node in &self.nodes {
            let v = match *node {
                Node::Var(k) => masks[k],
                Node::Bottom => 0,
                Node::Imp(a, b) => (!vals[a] | vals[b]) & full,
                Node::Boxed(a) => {
                    if vals[a] == full {
                        full
                    } else {
                        0
                    }
                }
                Node::Stit(j, a) => tuple[j]
                    .cells
                    .iter()
                    .filter(|&&c| c & vals[a] == c)
                    .fold(0, |acc, &c| acc | c),
            };
            vals.push(v);
        }
        *vals.last().expect("non-empty formula")
    }
}
