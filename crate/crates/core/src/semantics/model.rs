use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::Agent;

/// Index of a moment within its model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MomentId(pub usize);

/// Index of a history within its model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HistoryId(pub usize);

/// The on-disk model description. Histories are never stored; choice cells
/// and valuation triples refer to them by canonical name (`a>b>c`).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub moments: Vec<String>,
    /// Pairs `[a, b]` meaning `a <= b`; the reflexive-transitive closure is
    /// taken on load.
    #[serde(default)]
    pub order: Vec<(String, String)>,
    #[serde(default)]
    pub agents: Vec<Agent>,
    /// Choice partitions per moment and agent. A missing entry means the
    /// agent has a single cell (vacuous choice) at that moment.
    #[serde(default)]
    pub choice: BTreeMap<String, BTreeMap<Agent, Vec<Vec<String>>>>,
    /// Triples `[var, moment, history]` at which the variable is true.
    #[serde(default)]
    pub valuation: Vec<(String, String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("model has no moments")]
    Empty,
    #[error("bad moment name '{0}': names must be non-empty and must not contain '>'")]
    BadMomentName(String),
    #[error("moment '{0}' declared twice")]
    DuplicateMoment(String),
    #[error("unknown moment '{0}'")]
    UnknownMoment(String),
    #[error("order is not antisymmetric: '{0}' and '{1}' precede each other")]
    NotAntisymmetric(String, String),
    #[error("unknown history '{0}'")]
    UnknownHistory(String),
    #[error("history '{history}' does not pass through moment '{moment}'")]
    NotThrough { history: String, moment: String },
    #[error("agent {0} is not part of the model")]
    UnknownAgent(Agent),
    #[error("history '{history}' lies in no choice cell of agent {agent} at '{moment}'")]
    NoCell {
        moment: String,
        agent: Agent,
        history: String,
    },
}

/// A maximal chain of moments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct History {
    pub moments: Vec<MomentId>,
    pub name: String,
}

/// A finite stit model: a tree of moments with per-moment choice
/// partitions and a valuation on moment-history pairs.
#[derive(Clone, Debug)]
pub struct StitModel {
    moments: Vec<String>,
    moment_index: HashMap<String, MomentId>,
    leq: Vec<Vec<bool>>,
    agents: BTreeSet<Agent>,
    histories: Vec<History>,
    history_index: HashMap<String, HistoryId>,
    fans: Vec<Vec<HistoryId>>,
    choice: BTreeMap<(MomentId, Agent), Vec<Vec<HistoryId>>>,
    valuation: BTreeMap<String, BTreeSet<(MomentId, HistoryId)>>,
}

impl StitModel {
    pub fn from_spec(spec: &ModelSpec) -> Result<StitModel, ModelError> {
        if spec.moments.is_empty() {
            return Err(ModelError::Empty);
        }
        let mut moment_index = HashMap::new();
        for (i, name) in spec.moments.iter().enumerate() {
            if name.is_empty() || name.contains('>') {
                return Err(ModelError::BadMomentName(name.clone()));
            }
            if moment_index.insert(name.clone(), MomentId(i)).is_some() {
                return Err(ModelError::DuplicateMoment(name.clone()));
            }
        }
        let lookup = |name: &str| {
            moment_index
                .get(name)
                .copied()
                .ok_or_else(|| ModelError::UnknownMoment(name.to_string()))
        };

        let n = spec.moments.len();
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for (a, b) in &spec.order {
            let (a, b) = (lookup(a)?, lookup(b)?);
            leq[a.0][b.0] = true;
        }
        // Warshall closure
        #[allow(clippy::needless_range_loop)]
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        #[allow(clippy::needless_range_loop)]
        for i in 0..n {
            for j in i + 1..n {
                if leq[i][j] && leq[j][i] {
                    return Err(ModelError::NotAntisymmetric(
                        spec.moments[i].clone(),
                        spec.moments[j].clone(),
                    ));
                }
            }
        }

        let histories = maximal_chains(&leq)
            .into_iter()
            .map(|chain| History {
                name: chain
                    .iter()
                    .map(|m| spec.moments[m.0].as_str())
                    .collect::<Vec<_>>()
                    .join(">"),
                moments: chain,
            })
            .collect::<Vec<_>>();
        let history_index: HashMap<String, HistoryId> = histories
            .iter()
            .enumerate()
            .map(|(i, h)| (h.name.clone(), HistoryId(i)))
            .collect();
        let mut fans = vec![Vec::new(); n];
        for (i, h) in histories.iter().enumerate() {
            for m in &h.moments {
                fans[m.0].push(HistoryId(i));
            }
        }

        let agents: BTreeSet<Agent> = spec.agents.iter().copied().collect();
        let history = |name: &str| {
            history_index
                .get(name)
                .copied()
                .ok_or_else(|| ModelError::UnknownHistory(name.to_string()))
        };

        let mut choice = BTreeMap::new();
        for (moment, per_agent) in &spec.choice {
            let m = lookup(moment)?;
            for (j, cells) in per_agent {
                if !agents.contains(j) {
                    return Err(ModelError::UnknownAgent(*j));
                }
                let cells = cells
                    .iter()
                    .map(|cell| cell.iter().map(|h| history(h)).collect::<Result<Vec<_>, _>>())
                    .collect::<Result<Vec<_>, _>>()?;
                choice.insert((m, *j), cells);
            }
        }
        for (m, fan) in fans.iter().enumerate() {
            for &j in &agents {
                choice
                    .entry((MomentId(m), j))
                    .or_insert_with(|| vec![fan.clone()]);
            }
        }

        let mut valuation: BTreeMap<String, BTreeSet<(MomentId, HistoryId)>> = BTreeMap::new();
        for (var, moment, hist) in &spec.valuation {
            let m = lookup(moment)?;
            let h = history(hist)?;
            if !histories[h.0].moments.contains(&m) {
                return Err(ModelError::NotThrough {
                    history: hist.clone(),
                    moment: moment.clone(),
                });
            }
            valuation.entry(var.clone()).or_default().insert((m, h));
        }

        Ok(StitModel {
            moments: spec.moments.clone(),
            moment_index,
            leq,
            agents,
            histories,
            history_index,
            fans,
            choice,
            valuation,
        })
    }

    /// The description this model was loaded from, with defaulted choice
    /// cells written out.
    pub fn to_spec(&self) -> ModelSpec {
        let n = self.moments.len();
        let mut order = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j && self.leq[i][j] {
                    order.push((self.moments[i].clone(), self.moments[j].clone()));
                }
            }
        }
        let mut choice: BTreeMap<String, BTreeMap<Agent, Vec<Vec<String>>>> = BTreeMap::new();
        for ((m, j), cells) in &self.choice {
            choice.entry(self.moments[m.0].clone()).or_default().insert(
                *j,
                cells
                    .iter()
                    .map(|c| c.iter().map(|h| self.history_name(*h).to_string()).collect())
                    .collect(),
            );
        }
        let valuation = self
            .valuation
            .iter()
            .flat_map(|(var, pairs)| {
                pairs.iter().map(move |(m, h)| {
                    (
                        var.clone(),
                        self.moments[m.0].clone(),
                        self.histories[h.0].name.clone(),
                    )
                })
            })
            .collect();
        ModelSpec {
            moments: self.moments.clone(),
            order,
            agents: self.agents.iter().copied().collect(),
            choice,
            valuation,
        }
    }

    pub fn moment_names(&self) -> &[String] {
        &self.moments
    }

    pub fn moment_count(&self) -> usize {
        self.moments.len()
    }

    pub fn moment(&self, name: &str) -> Result<MomentId, ModelError> {
        self.moment_index
            .get(name)
            .copied()
            .ok_or_else(|| ModelError::UnknownMoment(name.to_string()))
    }

    pub fn moment_name(&self, m: MomentId) -> &str {
        &self.moments[m.0]
    }

    pub fn moment_ids(&self) -> impl Iterator<Item = MomentId> {
        (0..self.moments.len()).map(MomentId)
    }

    /// `a <= b` in the tree order.
    pub fn leq(&self, a: MomentId, b: MomentId) -> bool {
        self.leq[a.0][b.0]
    }

    pub fn agents(&self) -> &BTreeSet<Agent> {
        &self.agents
    }

    /// Variables with a non-empty extension.
    pub fn vars(&self) -> BTreeSet<String> {
        self.valuation
            .iter()
            .filter(|(_, pairs)| !pairs.is_empty())
            .map(|(v, _)| v.clone())
            .collect()
    }

    pub fn histories(&self) -> &[History] {
        &self.histories
    }

    pub fn history(&self, name: &str) -> Result<HistoryId, ModelError> {
        self.history_index
            .get(name)
            .copied()
            .ok_or_else(|| ModelError::UnknownHistory(name.to_string()))
    }

    pub fn history_name(&self, h: HistoryId) -> &str {
        &self.histories[h.0].name
    }

    /// The histories passing through `m`.
    pub fn fan(&self, m: MomentId) -> &[HistoryId] {
        &self.fans[m.0]
    }

    pub fn passes_through(&self, h: HistoryId, m: MomentId) -> bool {
        self.histories[h.0].moments.contains(&m)
    }

    /// The choice cells of `j` at `m` as stored (not necessarily a
    /// partition unless the model validates).
    pub fn choice_cells(&self, m: MomentId, j: Agent) -> Result<&[Vec<HistoryId>], ModelError> {
        self.choice
            .get(&(m, j))
            .map(Vec::as_slice)
            .ok_or(ModelError::UnknownAgent(j))
    }

    pub fn holds(&self, var: &str, m: MomentId, h: HistoryId) -> bool {
        self.valuation
            .get(var)
            .is_some_and(|pairs| pairs.contains(&(m, h)))
    }

    /// Keeps only the given variables in the valuation.
    pub fn restrict_valuation(&self, vars: &BTreeSet<String>) -> StitModel {
        let mut out = self.clone();
        out.valuation.retain(|v, _| vars.contains(v));
        out
    }
}

/// All maximal chains of a finite partial order, each listed bottom-up.
fn maximal_chains(leq: &[Vec<bool>]) -> Vec<Vec<MomentId>> {
    let n = leq.len();
    let lt = |a: usize, b: usize| a != b && leq[a][b];
    let covers: Vec<Vec<usize>> = (0..n)
        .map(|a| {
            (0..n)
                .filter(|&b| lt(a, b) && !(0..n).any(|c| lt(a, c) && lt(c, b)))
                .collect()
        })
        .collect();
    let minimal: Vec<usize> = (0..n).filter(|&b| !(0..n).any(|a| lt(a, b))).collect();

    let mut out = Vec::new();
    let mut stack: Vec<Vec<usize>> = minimal.into_iter().rev().map(|m| vec![m]).collect();
    while let Some(chain) = stack.pop() {
        let last = *chain.last().unwrap();
        if covers[last].is_empty() {
            out.push(chain.into_iter().map(MomentId).collect());
        } else {
            for &next in covers[last].iter().rev() {
                let mut longer = chain.clone();
                longer.push(next);
                stack.push(longer);
            }
        }
    }
    out
}

impl fmt::Display for MomentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m{}", self.0)
    }
}
