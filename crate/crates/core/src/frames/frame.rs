use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::semantics::{ModelSpec, StitModel};
use crate::syntax::{Agent, Formula};

/// Selector given as one cell (history labels) per agent.
pub type Selector = Vec<(Agent, Vec<String>)>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameError {
    #[error("frame has no histories")]
    Empty,
    #[error("bad history label '{0}': labels must be non-empty and must not contain '>'")]
    BadLabel(String),
    #[error("history '{0}' declared twice")]
    DuplicateHistory(String),
    #[error("unknown history '{0}'")]
    UnknownHistory(String),
    #[error("partition of agent {agent} is malformed: {problem}")]
    Partition { agent: Agent, problem: String },
    #[error("agent {0} has no partition in this frame")]
    UnknownAgent(Agent),
    #[error("independence fails for selector {0:?}")]
    Independence(Selector),
}

/// On-disk frame description.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameSpec {
    pub histories: Vec<String>,
    #[serde(default)]
    pub partitions: BTreeMap<Agent, Vec<Vec<String>>>,
    #[serde(default)]
    pub valuation: BTreeMap<String, Vec<String>>,
}

/// A single moment seen as a set of histories with one choice partition per
/// agent and a valuation on histories.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FrameSpec", into = "FrameSpec")]
pub struct ChoiceFrame {
    histories: Vec<String>,
    partitions: BTreeMap<Agent, Vec<Vec<usize>>>,
    valuation: Vec<BTreeSet<String>>,
}

impl ChoiceFrame {
    /// Builds a frame from index-based data. Partitions must cover the
    /// histories with disjoint non-empty cells; independence is not checked.
    pub fn new(
        histories: Vec<String>,
        partitions: BTreeMap<Agent, Vec<Vec<usize>>>,
        valuation: Vec<BTreeSet<String>>,
    ) -> Result<ChoiceFrame, FrameError> {
        if histories.is_empty() {
            return Err(FrameError::Empty);
        }
        let mut seen = BTreeSet::new();
        for h in &histories {
            if h.is_empty() || h.contains('>') {
                return Err(FrameError::BadLabel(h.clone()));
            }
            if !seen.insert(h.as_str()) {
                return Err(FrameError::DuplicateHistory(h.clone()));
            }
        }
        let n = histories.len();
        for (&agent, cells) in &partitions {
            let mut covered = vec![false; n];
            for cell in cells {
                if cell.is_empty() {
                    return Err(FrameError::Partition {
                        agent,
                        problem: "empty cell".into(),
                    });
                }
                for &h in cell {
                    if h >= n {
                        return Err(FrameError::Partition {
                            agent,
                            problem: format!("history index {h} out of range"),
                        });
                    }
                    if std::mem::replace(&mut covered[h], true) {
                        return Err(FrameError::Partition {
                            agent,
                            problem: format!("'{}' lies in two cells", histories[h]),
                        });
                    }
                }
            }
            if let Some(h) = covered.iter().position(|c| !c) {
                return Err(FrameError::Partition {
                    agent,
                    problem: format!("'{}' is not covered", histories[h]),
                });
            }
        }
        let mut valuation = valuation;
        valuation.resize(n, BTreeSet::new());
        Ok(ChoiceFrame {
            histories,
            partitions,
            valuation,
        })
    }

    pub fn from_spec(spec: &FrameSpec) -> Result<ChoiceFrame, FrameError> {
        let index = |name: &str| {
            spec.histories
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| FrameError::UnknownHistory(name.to_string()))
        };
        let partitions = spec
            .partitions
            .iter()
            .map(|(&j, cells)| {
                let cells = cells
                    .iter()
                    .map(|c| c.iter().map(|h| index(h)).collect::<Result<Vec<_>, _>>())
                    .collect::<Result<Vec<_>, _>>()?;
                Ok((j, cells))
            })
            .collect::<Result<BTreeMap<_, _>, FrameError>>()?;
        let mut valuation = vec![BTreeSet::new(); spec.histories.len()];
        for (h, vars) in &spec.valuation {
            valuation[index(h)?].extend(vars.iter().cloned());
        }
        ChoiceFrame::new(spec.histories.clone(), partitions, valuation)
    }

    pub fn to_spec(&self) -> FrameSpec {
        FrameSpec {
            histories: self.histories.clone(),
            partitions: self
                .partitions
                .iter()
                .map(|(&j, cells)| {
                    (
                        j,
                        cells
                            .iter()
                            .map(|c| c.iter().map(|&h| self.histories[h].clone()).collect())
                            .collect(),
                    )
                })
                .collect(),
            valuation: self
                .histories
                .iter()
                .zip(&self.valuation)
                .filter(|(_, vars)| !vars.is_empty())
                .map(|(h, vars)| (h.clone(), vars.iter().cloned().collect()))
                .collect(),
        }
    }

    pub fn histories(&self) -> &[String] {
        &self.histories
    }

    pub fn agents(&self) -> impl Iterator<Item = Agent> + '_ {
        self.partitions.keys().copied()
    }

    pub fn partition(&self, j: Agent) -> Option<&[Vec<usize>]> {
        self.partitions.get(&j).map(Vec::as_slice)
    }

    pub fn vars_at(&self, h: usize) -> &BTreeSet<String> {
        &self.valuation[h]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.histories.iter().position(|h| h == label)
    }

    fn cell_of(&self, j: Agent, h: usize) -> Result<&[usize], FrameError> {
        let cells = self.partitions.get(&j).ok_or(FrameError::UnknownAgent(j))?;
        Ok(cells
            .iter()
            .find(|c| c.contains(&h))
            .map(Vec::as_slice)
            .expect("partition covers every history"))
    }

    /// Direct evaluation of `f` at history `h` by the satisfaction clauses.
    pub fn eval(&self, h: usize, f: &Formula) -> Result<bool, FrameError> {
        Ok(match f {
            Formula::Var(v) => self.valuation[h].contains(v),
            Formula::Bottom => false,
            Formula::Top => true,
            Formula::Not(a) => !self.eval(h, a)?,
            Formula::And(a, b) => self.eval(h, a)? && self.eval(h, b)?,
            Formula::Or(a, b) => self.eval(h, a)? || self.eval(h, b)?,
            Formula::Implies(a, b) => !self.eval(h, a)? || self.eval(h, b)?,
            Formula::Boxed(a) => {
                for g in 0..self.histories.len() {
                    if !self.eval(g, a)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Diamond(a) => {
                for g in 0..self.histories.len() {
                    if self.eval(g, a)? {
                        return Ok(true);
                    }
                }
                false
            }
            Formula::Stit(j, a) => {
                for &g in self.cell_of(*j, h)? {
                    if !self.eval(g, a)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::StitDual(j, a) => {
                for &g in self.cell_of(*j, h)? {
                    if self.eval(g, a)? {
                        return Ok(true);
                    }
                }
                false
            }
            Formula::Deliberative(j, a) => {
                let stit = self.eval(h, &Formula::stit(*j, (**a).clone()))?;
                let settled = self.eval(h, &Formula::boxed((**a).clone()))?;
                stit && !settled
            }
        })
    }
}

impl TryFrom<FrameSpec> for ChoiceFrame {
    type Error = FrameError;
    fn try_from(spec: FrameSpec) -> Result<Self, Self::Error> {
        ChoiceFrame::from_spec(&spec)
    }
}

impl From<ChoiceFrame> for FrameSpec {
    fn from(frame: ChoiceFrame) -> Self {
        frame.to_spec()
    }
}

/// Exhaustive check that every selection of one cell per agent has a
/// common history.
pub fn check_independence(frame: &ChoiceFrame) -> Result<(), Selector> {
    let agents: Vec<Agent> = frame.agents().collect();
    let all: Vec<usize> = (0..frame.histories.len()).collect();
    let mut chosen = Vec::new();
    match selector_search(frame, &agents, &all, &mut chosen) {
        None => Ok(()),
        Some(sel) => Err(sel
            .into_iter()
            .map(|(j, c)| (j, c.iter().map(|&h| frame.histories[h].clone()).collect()))
            .collect()),
    }
}

fn selector_search(
    frame: &ChoiceFrame,
    agents: &[Agent],
    current: &[usize],
    chosen: &mut Vec<(Agent, Vec<usize>)>,
) -> Option<Vec<(Agent, Vec<usize>)>> {
    let (&j, rest) = agents.split_first()?;
    for cell in &frame.partitions[&j] {
        let next: Vec<usize> = current.iter().copied().filter(|h| cell.contains(h)).collect();
        chosen.push((j, cell.clone()));
        if next.is_empty() {
            let mut sel = chosen.clone();
            sel.extend(rest.iter().map(|k| (*k, frame.partitions[k][0].clone())));
            return Some(sel);
        }
        if let Some(found) = selector_search(frame, rest, &next, chosen) {
            return Some(found);
        }
        chosen.pop();
    }
    None
}

pub const ROOT: &str = "dag";

/// The name of the root moment used by [`to_model`] for this frame.
pub fn root_name(frame: &ChoiceFrame) -> String {
    let mut root = ROOT.to_string();
    while frame.histories.contains(&root) {
        root.push('_');
    }
    root
}

/// Name of the model history that corresponds to a frame history.
pub fn model_history_name(frame: &ChoiceFrame, label: &str) -> String {
    format!("{}>{}", root_name(frame), label)
}

/// Root-plus-leaves model: one root moment, one leaf per history, the
/// frame's partitions at the root, vacuous choice at the leaves and the
/// valuation placed at the root.
pub fn to_model(frame: &ChoiceFrame) -> Result<StitModel, FrameError> {
    check_independence(frame).map_err(FrameError::Independence)?;
    let root = root_name(frame);
    let hist = |h: &str| format!("{root}>{h}");
    let mut spec = ModelSpec {
        moments: std::iter::once(root.clone())
            .chain(frame.histories.iter().cloned())
            .collect(),
        order: frame
            .histories
            .iter()
            .map(|h| (root.clone(), h.clone()))
            .collect(),
        agents: frame.agents().collect(),
        ..ModelSpec::default()
    };
    let root_choice = spec.choice.entry(root.clone()).or_default();
    for (&j, cells) in &frame.partitions {
        root_choice.insert(
            j,
            cells
                .iter()
                .map(|c| c.iter().map(|&h| hist(&frame.histories[h])).collect())
                .collect(),
        );
    }
    for (h, vars) in frame.histories.iter().zip(&frame.valuation) {
        for v in vars {
            spec.valuation.push((v.clone(), root.clone(), hist(h)));
        }
    }
    Ok(StitModel::from_spec(&spec).expect("root-plus-leaves spec is well formed"))
}
