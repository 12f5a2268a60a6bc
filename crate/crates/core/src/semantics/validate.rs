use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::model::{HistoryId, ModelError, MomentId, StitModel};
use crate::syntax::Agent;

/// A failed model constraint together with a witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "constraint")]
pub enum Violation {
    /// Two moments without a common lower bound.
    #[serde(rename = "HC")]
    HistoricalConnection { first: String, second: String },
    /// Two incomparable moments below a common moment.
    #[serde(rename = "NBB")]
    BackwardBranching {
        first: String,
        second: String,
        above: String,
    },
    /// Choice cells that are empty, overlapping, incomplete or stray.
    #[serde(rename = "Partition")]
    Partition {
        moment: String,
        agent: Agent,
        problem: String,
    },
    /// Undivided histories separated by some agent's choice.
    #[serde(rename = "NCUH")]
    NoChoiceBetweenUndivided {
        moment: String,
        agent: Agent,
        first: String,
        second: String,
    },
    /// A selection of one cell per agent with empty intersection.
    #[serde(rename = "IA")]
    Independence {
        moment: String,
        selector: Vec<(Agent, Vec<String>)>,
    },
}

impl Violation {
    pub fn constraint(&self) -> &'static str {
        match self {
            Violation::HistoricalConnection { .. } => "HC",
            Violation::BackwardBranching { .. } => "NBB",
            Violation::Partition { .. } => "Partition",
            Violation::NoChoiceBetweenUndivided { .. } => "NCUH",
            Violation::Independence { .. } => "IA",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::HistoricalConnection { first, second } => {
                write!(f, "HC: '{first}' and '{second}' have no common lower bound")
            }
            Violation::BackwardBranching {
                first,
                second,
                above,
            } => write!(
                f,
                "NBB: '{first}' and '{second}' are incomparable but both precede '{above}'"
            ),
            Violation::Partition {
                moment,
                agent,
                problem,
            } => write!(f, "Partition: agent {agent} at '{moment}': {problem}"),
            Violation::NoChoiceBetweenUndivided {
                moment,
                agent,
                first,
                second,
            } => write!(
                f,
                "NCUH: agent {agent} at '{moment}' separates undivided '{first}' and '{second}'"
            ),
            Violation::Independence { moment, selector } => {
                write!(f, "IA: at '{moment}' the selector")?;
                for (j, cell) in selector {
                    write!(f, " {j}:{{{}}}", cell.join(","))?;
                }
                write!(f, " has empty intersection")
            }
        }
    }
}

/// The relation `h ≈_m g`: both pass through `m` and share a strictly later
/// moment. Reflexive on the histories through `m`.
pub fn undivided(
    model: &StitModel,
    m: MomentId,
) -> Result<BTreeSet<(HistoryId, HistoryId)>, ModelError> {
    if m.0 >= model.moment_count() {
        return Err(ModelError::UnknownMoment(m.to_string()));
    }
    let fan = model.fan(m);
    let mut out = BTreeSet::new();
    for &h in fan {
        for &g in fan {
            if h == g || shares_later_moment(model, m, h, g) {
                out.insert((h, g));
            }
        }
    }
    Ok(out)
}

fn shares_later_moment(model: &StitModel, m: MomentId, h: HistoryId, g: HistoryId) -> bool {
    let gm = &model.histories()[g.0].moments;
    model.histories()[h.0]
        .moments
        .iter()
        .any(|&x| x != m && model.leq(m, x) && gm.contains(&x))
}

/// Checks HC, NBB, partition well-formedness, NCUH and IA. An empty result
/// means the model is a proper stit model.
pub fn validate(model: &StitModel) -> Vec<Violation> {
    let mut out = Vec::new();
    let moments: Vec<MomentId> = model.moment_ids().collect();
    let name = |m: MomentId| model.moment_name(m).to_string();

    for (i, &a) in moments.iter().enumerate() {
        for &b in &moments[i + 1..] {
            if !moments.iter().any(|&c| model.leq(c, a) && model.leq(c, b)) {
                out.push(Violation::HistoricalConnection {
                    first: name(a),
                    second: name(b),
                });
            }
        }
    }

    for &top in &moments {
        let below: Vec<MomentId> = moments
            .iter()
            .copied()
            .filter(|&x| model.leq(x, top))
            .collect();
        'outer: for (i, &a) in below.iter().enumerate() {
            for &b in &below[i + 1..] {
                if !model.leq(a, b) && !model.leq(b, a) {
                    out.push(Violation::BackwardBranching {
                        first: name(a),
                        second: name(b),
                        above: name(top),
                    });
                    break 'outer;
                }
            }
        }
    }

    for &m in &moments {
        let fan: BTreeSet<HistoryId> = model.fan(m).iter().copied().collect();
        let mut well_formed = true;
        for &j in model.agents() {
            let cells = model.choice_cells(m, j).unwrap_or(&[]);
            if let Some(problem) = partition_problem(model, &fan, cells) {
                well_formed = false;
                out.push(Violation::Partition {
                    moment: name(m),
                    agent: j,
                    problem,
                });
            }
        }
        if !well_formed {
            continue;
        }

        let und = undivided(model, m).unwrap_or_default();
        for &j in model.agents() {
            let cells = model.choice_cells(m, j).unwrap_or(&[]);
            let cell_of = |h: HistoryId| cells.iter().position(|c| c.contains(&h));
            if let Some(&(h, g)) = und.iter().find(|&&(h, g)| cell_of(h) != cell_of(g)) {
                out.push(Violation::NoChoiceBetweenUndivided {
                    moment: name(m),
                    agent: j,
                    first: model.history_name(h).to_string(),
                    second: model.history_name(g).to_string(),
                });
            }
        }

        if let Some(selector) = empty_selector(model, m) {
            out.push(Violation::Independence {
                moment: name(m),
                selector: selector
                    .into_iter()
                    .map(|(j, cell)| {
                        (
                            j,
                            cell.iter()
                                .map(|h| model.history_name(*h).to_string())
                                .collect(),
                        )
                    })
                    .collect(),
            });
        }
    }
    out
}

fn partition_problem(
    model: &StitModel,
    fan: &BTreeSet<HistoryId>,
    cells: &[Vec<HistoryId>],
) -> Option<String> {
    let mut seen = BTreeSet::new();
    for cell in cells {
        if cell.is_empty() {
            return Some("empty cell".into());
        }
        for &h in cell {
            if !fan.contains(&h) {
                return Some(format!(
                    "history '{}' does not pass through the moment",
                    model.history_name(h)
                ));
            }
            if !seen.insert(h) {
                return Some(format!(
                    "history '{}' lies in two cells",
                    model.history_name(h)
                ));
            }
        }
    }
    fan.iter().find(|h| !seen.contains(h)).map(|&h| {
        format!("history '{}' is not covered", model.history_name(h))
    })
}

/// Depth-first search over cell selections, cutting a branch as soon as the
/// running intersection is empty.
fn empty_selector(model: &StitModel, m: MomentId) -> Option<Vec<(Agent, Vec<HistoryId>)>> {
    let agents: Vec<Agent> = model.agents().iter().copied().collect();
    let all: BTreeSet<HistoryId> = model.fan(m).iter().copied().collect();
    let mut chosen = Vec::new();
    search(model, m, &agents, &all, &mut chosen)
}

fn search(
    model: &StitModel,
    m: MomentId,
    agents: &[Agent],
    current: &BTreeSet<HistoryId>,
    chosen: &mut Vec<(Agent, Vec<HistoryId>)>,
) -> Option<Vec<(Agent, Vec<HistoryId>)>> {
    let (&j, rest) = agents.split_first()?;
    for cell in model.choice_cells(m, j).unwrap_or(&[]) {
        let next: BTreeSet<HistoryId> = cell.iter().copied().filter(|h| current.contains(h)).collect();
        chosen.push((j, cell.clone()));
        if next.is_empty() {
            let mut selector = chosen.clone();
            for &k in rest {
                let first = model
                    .choice_cells(m, k)
                    .ok()
                    .and_then(|c| c.first().cloned())
                    .unwrap_or_default();
                selector.push((k, first));
            }
            return Some(selector);
        }
        if let Some(found) = search(model, m, rest, &next, chosen) {
            return Some(found);
        }
        chosen.pop();
    }
    None
}
