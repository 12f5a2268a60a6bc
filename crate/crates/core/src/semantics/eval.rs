use std::collections::{BTreeSet, HashMap};

use super::model::{HistoryId, ModelError, MomentId, StitModel};
use crate::syntax::{Agent, Formula};

/// Evaluation context for one moment: histories through it by position, and
/// for each agent the cell index of every position.
struct MomentView<'a> {
    model: &'a StitModel,
    moment: MomentId,
    fan: &'a [HistoryId],
    cells: HashMap<Agent, (Vec<usize>, usize)>,
}

impl<'a> MomentView<'a> {
    fn new(model: &'a StitModel, moment: MomentId) -> Self {
        MomentView {
            model,
            moment,
            fan: model.fan(moment),
            cells: HashMap::new(),
        }
    }

    fn cells_of(&mut self, j: Agent) -> Result<&(Vec<usize>, usize), ModelError> {
        if !self.cells.contains_key(&j) {
            if !self.model.agents().contains(&j) {
                return Err(ModelError::UnknownAgent(j));
            }
            let cells = self.model.choice_cells(self.moment, j)?;
            let mut of = Vec::with_capacity(self.fan.len());
            for &h in self.fan {
                match cells.iter().position(|c| c.contains(&h)) {
                    Some(i) => of.push(i),
                    None => {
                        return Err(ModelError::NoCell {
                            moment: self.model.moment_name(self.moment).to_string(),
                            agent: j,
                            history: self.model.history_name(h).to_string(),
                        })
                    }
                }
            }
            self.cells.insert(j, (of, cells.len()));
        }
        Ok(&self.cells[&j])
    }

    /// Truth value at every history through the moment, in fan order.
    fn eval(&mut self, f: &Formula) -> Result<Vec<bool>, ModelError> {
        let n = self.fan.len();
        Ok(match f {
            Formula::Var(v) => self
                .fan
                .iter()
                .map(|&h| self.model.holds(v, self.moment, h))
                .collect(),
            Formula::Bottom => vec![false; n],
            Formula::Implies(a, b) => {
                let a = self.eval(a)?;
                let b = self.eval(b)?;
                a.iter().zip(&b).map(|(x, y)| !x || *y).collect()
            }
            Formula::Boxed(a) => {
                let a = self.eval(a)?;
                vec![a.iter().all(|&x| x); n]
            }
            Formula::Stit(j, a) => {
                let a = self.eval(a)?;
                let (of, count) = self.cells_of(*j)?;
                let mut cell_true = vec![true; *count];
                for (i, &c) in of.iter().enumerate() {
                    cell_true[c] &= a[i];
                }
                of.iter().map(|&c| cell_true[c]).collect()
            }
            other => return self.eval(&other.desugar()),
        })
    }
}

fn check_moment(model: &StitModel, m: MomentId) -> Result<(), ModelError> {
    if m.0 >= model.moment_count() {
        return Err(ModelError::UnknownMoment(m.to_string()));
    }
    Ok(())
}

/// The histories through `m` at which `f` holds.
pub fn extension(
    model: &StitModel,
    m: MomentId,
    f: &Formula,
) -> Result<BTreeSet<HistoryId>, ModelError> {
    check_moment(model, m)?;
    let mut view = MomentView::new(model, m);
    let values = view.eval(&f.desugar())?;
    Ok(view
        .fan
        .iter()
        .zip(values)
        .filter(|(_, v)| *v)
        .map(|(h, _)| *h)
        .collect())
}

/// `model, m, h ⊨ f`.
pub fn satisfies(
    model: &StitModel,
    m: MomentId,
    h: HistoryId,
    f: &Formula,
) -> Result<bool, ModelError> {
    check_moment(model, m)?;
    if h.0 >= model.histories().len() {
        return Err(ModelError::UnknownHistory(format!("#{}", h.0)));
    }
    if !model.passes_through(h, m) {
        return Err(ModelError::NotThrough {
            history: model.history_name(h).to_string(),
            moment: model.moment_name(m).to_string(),
        });
    }
    let mut view = MomentView::new(model, m);
    let values = view.eval(&f.desugar())?;
    let pos = view.fan.iter().position(|&x| x == h).expect("history through moment");
    Ok(values[pos])
}

/// Name-based convenience wrapper around [`satisfies`].
pub fn satisfies_named(
    model: &StitModel,
    moment: &str,
    history: &str,
    f: &Formula,
) -> Result<bool, ModelError> {
    satisfies(model, model.moment(moment)?, model.history(history)?, f)
}

/// True iff `f` holds at every moment-history pair of the model.
pub fn valid_in_model(model: &StitModel, f: &Formula) -> Result<bool, ModelError> {
    let core = f.desugar();
    for m in model.moment_ids() {
        let mut view = MomentView::new(model, m);
        if !view.eval(&core)?.iter().all(|&v| v) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The first moment-history pair at which `f` fails, if any.
pub fn refuting_pair(
    model: &StitModel,
    f: &Formula,
) -> Result<Option<(MomentId, HistoryId)>, ModelError> {
    let core = f.desugar();
    for m in model.moment_ids() {
        let mut view = MomentView::new(model, m);
        let values = view.eval(&core)?;
        if let Some(i) = values.iter().position(|v| !v) {
            return Ok(Some((m, view.fan[i])));
        }
    }
    Ok(None)
}
