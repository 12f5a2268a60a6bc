//! Bisimulations between pointed stit models, parameterised by a set of
//! variables.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::semantics::{satisfies, HistoryId, ModelError, MomentId, StitModel};
use crate::syntax::{core_formulas_of_size, Agent, CoreSignature, Formula};

/// A model together with a distinguished moment.
#[derive(Clone, Copy, Debug)]
pub struct PointedModel<'a> {
    pub model: &'a StitModel,
    pub moment: MomentId,
}

impl<'a> PointedModel<'a> {
    pub fn new(model: &'a StitModel, moment: &str) -> Result<Self, ModelError> {
        Ok(PointedModel {
            model,
            moment: model.moment(moment)?,
        })
    }

    fn name(&self) -> &str {
        self.model.moment_name(self.moment)
    }
}

/// Pairs of history names, left model first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryRelation {
    pub pairs: BTreeSet<(String, String)>,
}

impl HistoryRelation {
    pub fn new(pairs: impl IntoIterator<Item = (String, String)>) -> Self {
        HistoryRelation {
            pairs: pairs.into_iter().collect(),
        }
    }

    pub fn contains(&self, left: &str, right: &str) -> bool {
        self.pairs.contains(&(left.to_string(), right.to_string()))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn is_subset(&self, other: &HistoryRelation) -> bool {
        self.pairs.is_subset(&other.pairs)
    }
}

/// The first clause found to fail, with witnesses.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Error)]
#[serde(tag = "condition", rename_all = "lowercase")]
pub enum BisimViolation {
    #[error("pair ({left}, {right}) is not drawn from the histories through the two moments")]
    OutOfRange { left: String, right: String },
    #[error("models have different agents: {left:?} vs {right:?}")]
    Agents { left: Vec<Agent>, right: Vec<Agent> },
    #[error("domain: left history {history} is related to nothing")]
    Domain { history: String },
    #[error("counterdomain: right history {history} is related to nothing")]
    Counterdomain { history: String },
    #[error("atoms: ({left}, {right}) disagree on {var}")]
    Atoms {
        left: String,
        right: String,
        var: String,
    },
    #[error("forth: ({left}, {right}), agent {agent}: {history} has no partner in the right cell")]
    Forth {
        left: String,
        right: String,
        agent: Agent,
        history: String,
    },
    #[error("back: ({left}, {right}), agent {agent}: {history} has no partner in the left cell")]
    Back {
        left: String,
        right: String,
        agent: Agent,
        history: String,
    },
}

impl BisimViolation {
    pub fn condition(&self) -> &'static str {
        match self {
            BisimViolation::OutOfRange { .. } => "range",
            BisimViolation::Agents { .. } => "agents",
            BisimViolation::Domain { .. } => "domain",
            BisimViolation::Counterdomain { .. } => "counterdomain",
            BisimViolation::Atoms { .. } => "atoms",
            BisimViolation::Forth { .. } => "forth",
            BisimViolation::Back { .. } => "back",
        }
    }
}

/// Histories through the moment by position, with per-agent cells given as
/// position lists. Models are assumed to validate; a history outside every
/// cell is treated as a singleton cell.
struct Side<'a> {
    pm: PointedModel<'a>,
    fan: Vec<HistoryId>,
    pos: HashMap<String, usize>,
    cell: BTreeMap<Agent, Vec<Vec<usize>>>,
}

impl<'a> Side<'a> {
    fn new(pm: PointedModel<'a>) -> Self {
        let fan = pm.model.fan(pm.moment).to_vec();
        let pos: HashMap<String, usize> = fan
            .iter()
            .enumerate()
            .map(|(i, &h)| (pm.model.history_name(h).to_string(), i))
            .collect();
        let mut cell = BTreeMap::new();
        for &j in pm.model.agents() {
            let cells = pm.model.choice_cells(pm.moment, j).unwrap_or(&[]);
            let of = fan
                .iter()
                .enumerate()
                .map(|(i, h)| {
                    cells
                        .iter()
                        .find(|c| c.contains(h))
                        .map(|c| {
                            c.iter()
                                .filter_map(|g| fan.iter().position(|x| x == g))
                                .collect()
                        })
                        .unwrap_or_else(|| vec![i])
                })
                .collect();
            cell.insert(j, of);
        }
        Side { pm, fan, pos, cell }
    }

    fn name(&self, i: usize) -> String {
        self.pm.model.history_name(self.fan[i]).to_string()
    }

    fn holds(&self, var: &str, i: usize) -> bool {
        self.pm.model.holds(var, self.pm.moment, self.fan[i])
    }
}

type Pairs = BTreeSet<(usize, usize)>;

fn resolve(l: &Side, r: &Side, rel: &HistoryRelation) -> Result<Pairs, BisimViolation> {
    rel.pairs
        .iter()
        .map(|(a, b)| match (l.pos.get(a), r.pos.get(b)) {
            (Some(&i), Some(&k)) => Ok((i, k)),
            _ => Err(BisimViolation::OutOfRange {
                left: a.clone(),
                right: b.clone(),
            }),
        })
        .collect()
}

fn agents_match(l: &Side, r: &Side) -> Result<(), BisimViolation> {
    if l.pm.model.agents() != r.pm.model.agents() {
        return Err(BisimViolation::Agents {
            left: l.pm.model.agents().iter().copied().collect(),
            right: r.pm.model.agents().iter().copied().collect(),
        });
    }
    Ok(())
}

fn check_totality(l: &Side, r: &Side, pairs: &Pairs) -> Result<(), BisimViolation> {
    if let Some(i) = (0..l.fan.len()).find(|&i| !pairs.iter().any(|p| p.0 == i)) {
        return Err(BisimViolation::Domain { history: l.name(i) });
    }
    if let Some(k) = (0..r.fan.len()).find(|&k| !pairs.iter().any(|p| p.1 == k)) {
        return Err(BisimViolation::Counterdomain { history: r.name(k) });
    }
    Ok(())
}

fn atom_mismatch(l: &Side, r: &Side, vars: &BTreeSet<String>, i: usize, k: usize) -> Option<String> {
    vars.iter().find(|v| l.holds(v, i) != r.holds(v, k)).cloned()
}

fn check_atoms(
    l: &Side,
    r: &Side,
    pairs: &Pairs,
    vars: &BTreeSet<String>,
) -> Result<(), BisimViolation> {
    for &(i, k) in pairs {
        if let Some(var) = atom_mismatch(l, r, vars, i, k) {
            return Err(BisimViolation::Atoms {
                left: l.name(i),
                right: r.name(k),
                var,
            });
        }
    }
    Ok(())
}

/// A history in `i`'s `j`-cell with no partner in `k`'s `j`-cell (forth),
/// or the symmetric failure (back).
fn zigzag_failure(l: &Side, r: &Side, pairs: &Pairs, i: usize, k: usize) -> Option<BisimViolation> {
    for (&j, lcells) in &l.cell {
        let Some(rcells) = r.cell.get(&j) else {
            continue;
        };
        if let Some(&g) = lcells[i]
            .iter()
            .find(|&&g| !rcells[k].iter().any(|&g2| pairs.contains(&(g, g2))))
        {
            return Some(BisimViolation::Forth {
                left: l.name(i),
                right: r.name(k),
                agent: j,
                history: l.name(g),
            });
        }
        if let Some(&g2) = rcells[k]
            .iter()
            .find(|&&g2| !lcells[i].iter().any(|&g| pairs.contains(&(g, g2))))
        {
            return Some(BisimViolation::Back {
                left: l.name(i),
                right: r.name(k),
                agent: j,
                history: r.name(g2),
            });
        }
    }
    None
}

/// Checks totality, atoms, forth and back for every pair and agent.
pub fn is_bisimulation(
    left: PointedModel,
    right: PointedModel,
    rel: &HistoryRelation,
    vars: &BTreeSet<String>,
) -> Result<(), BisimViolation> {
    let (l, r) = (Side::new(left), Side::new(right));
    agents_match(&l, &r)?;
    let pairs = resolve(&l, &r, rel)?;
    check_totality(&l, &r, &pairs)?;
    check_atoms(&l, &r, &pairs, vars)?;
    for &(i, k) in &pairs {
        if let Some(v) = zigzag_failure(&l, &r, &pairs, i, k) {
            return Err(v);
        }
    }
    Ok(())
}

/// The greatest relation satisfying atoms, forth and back, computed by
/// removing failing pairs from the atom-agreement relation until nothing
/// changes. Totality is not enforced.
pub fn max_bisimulation(
    left: PointedModel,
    right: PointedModel,
    vars: &BTreeSet<String>,
) -> Result<HistoryRelation, BisimViolation> {
    let (l, r) = (Side::new(left), Side::new(right));
    agents_match(&l, &r)?;
    let mut pairs: Pairs = (0..l.fan.len())
        .flat_map(|i| (0..r.fan.len()).map(move |k| (i, k)))
        .filter(|&(i, k)| atom_mismatch(&l, &r, vars, i, k).is_none())
        .collect();
    loop {
        let failing: Vec<(usize, usize)> = pairs
            .iter()
            .copied()
            .filter(|&(i, k)| zigzag_failure(&l, &r, &pairs, i, k).is_some())
            .collect();
        if failing.is_empty() {
            break;
        }
        for p in failing {
            pairs.remove(&p);
        }
    }
    Ok(HistoryRelation::new(
        pairs.into_iter().map(|(i, k)| (l.name(i), r.name(k))),
    ))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "lowercase")]
pub enum Agreement {
    Agree { value: bool },
    Disagree { left: bool, right: bool },
}

impl Agreement {
    pub fn agrees(&self) -> bool {
        matches!(self, Agreement::Agree { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TransferError {
    #[error("pair ({0}, {1}) is not in the relation")]
    PairNotInRelation(String, String),
    #[error("relation is not a bisimulation: {0}")]
    NotBisimulation(BisimViolation),
    #[error("relation fails a precondition: {0}")]
    Precondition(BisimViolation),
    #[error("variable {0} is outside the checked vocabulary")]
    OutOfVocabulary(String),
    #[error("formula {0} contains an action modality")]
    OutOfFragment(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Truth of `f` at the two related histories, without checking the relation.
pub fn agreement_at(
    left: PointedModel,
    right: PointedModel,
    h: &str,
    h2: &str,
    f: &Formula,
) -> Result<Agreement, ModelError> {
    let a = satisfies(left.model, left.moment, left.model.history(h)?, f)?;
    let b = satisfies(right.model, right.moment, right.model.history(h2)?, f)?;
    Ok(if a == b {
        Agreement::Agree { value: a }
    } else {
        Agreement::Disagree { left: a, right: b }
    })
}

/// Evaluates `f` at a related pair after confirming that the relation is a
/// bisimulation for `vars` and that `f` stays within `vars`.
pub fn transfer_check(
    left: PointedModel,
    right: PointedModel,
    rel: &HistoryRelation,
    vars: &BTreeSet<String>,
    h: &str,
    h2: &str,
    f: &Formula,
) -> Result<Agreement, TransferError> {
    if !rel.contains(h, h2) {
        return Err(TransferError::PairNotInRelation(h.into(), h2.into()));
    }
    if let Some(v) = f.vocabulary().vars.difference(vars).next() {
        return Err(TransferError::OutOfVocabulary(v.clone()));
    }
    is_bisimulation(left, right, rel, vars).map_err(TransferError::NotBisimulation)?;
    Ok(agreement_at(left, right, h, h2, f)?)
}

/// Bounds for the enumerated fragment of `[]`-only formulas.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FragmentBounds {
    pub max_size: usize,
    pub max_depth: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AtomsOnlyReport {
    pub formulas: usize,
    pub pairs: usize,
    pub counterexample: Option<AtomsOnlyCounterexample>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AtomsOnlyCounterexample {
    pub formula: String,
    pub left: String,
    pub right: String,
    pub left_value: bool,
    pub right_value: bool,
}

/// Agreement across every related pair on the given agent-free formulas.
/// The relation must be total on both sides and respect atoms for `vars`.
pub fn atoms_only_agreement_on(
    left: PointedModel,
    right: PointedModel,
    rel: &HistoryRelation,
    vars: &BTreeSet<String>,
    formulas: &[Formula],
) -> Result<AtomsOnlyReport, TransferError> {
    if let Some(f) = formulas.iter().find(|f| !f.is_agent_free()) {
        return Err(TransferError::OutOfFragment(f.to_string()));
    }
    if let Some(v) = formulas
        .iter()
        .flat_map(|f| f.vocabulary().vars)
        .find(|v| !vars.contains(v))
    {
        return Err(TransferError::OutOfVocabulary(v));
    }
    let (l, r) = (Side::new(left), Side::new(right));
    let pairs = resolve(&l, &r, rel).map_err(TransferError::Precondition)?;
    check_totality(&l, &r, &pairs).map_err(TransferError::Precondition)?;
    check_atoms(&l, &r, &pairs, vars).map_err(TransferError::Precondition)?;
    for f in formulas {
        for &(i, k) in &pairs {
            let a = satisfies(left.model, left.moment, l.fan[i], f)?;
            let b = satisfies(right.model, right.moment, r.fan[k], f)?;
            if a != b {
                return Ok(AtomsOnlyReport {
                    formulas: formulas.len(),
                    pairs: pairs.len(),
                    counterexample: Some(AtomsOnlyCounterexample {
                        formula: f.to_string(),
                        left: l.name(i),
                        right: r.name(k),
                        left_value: a,
                        right_value: b,
                    }),
                });
            }
        }
    }
    Ok(AtomsOnlyReport {
        formulas: formulas.len(),
        pairs: pairs.len(),
        counterexample: None,
    })
}

/// Every `[]`-only core formula over `vars` within the bounds.
pub fn settled_fragment(vars: &BTreeSet<String>, bounds: FragmentBounds) -> Vec<Formula> {
    let sig = CoreSignature {
        vars: vars.iter().cloned().collect(),
        settled: true,
        agents: Vec::new(),
    };
    core_formulas_of_size(&sig, bounds.max_size)
        .into_iter()
        .flatten()
        .filter(|f| f.modal_depth() <= bounds.max_depth)
        .collect()
}

/// [`atoms_only_agreement_on`] over the whole enumerated fragment.
pub fn atoms_only_agreement(
    left: PointedModel,
    right: PointedModel,
    rel: &HistoryRelation,
    vars: &BTreeSet<String>,
    bounds: FragmentBounds,
) -> Result<AtomsOnlyReport, TransferError> {
    let formulas = settled_fragment(vars, bounds);
    atoms_only_agreement_on(left, right, rel, vars, &formulas)
}

impl fmt::Display for Agreement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Agreement::Agree { value } => write!(f, "agree ({value})"),
            Agreement::Disagree { left, right } => write!(f, "disagree (left {left}, right {right})"),
        }
    }
}

impl<'a> fmt::Display for PointedModel<'a> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "@{}", self.name())
    }
}
