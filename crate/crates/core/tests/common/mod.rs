#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stit::random::{random_formula, random_model, FormulaParams, ModelParams};
use stit::semantics::{HistoryId, MomentId, StitModel};
use stit::{agent, Agent, Formula};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn vars(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

pub fn agents(n: u32) -> Vec<Agent> {
    (1..=n).map(agent).collect()
}

pub fn model(seed: u64, max_histories: usize, n_agents: u32, var_names: &[&str]) -> StitModel {
    random_model(
        &mut rng(seed),
        &ModelParams {
            max_histories,
            agents: agents(n_agents),
            vars: vars(var_names),
            max_height: 3,
        },
    )
}

pub fn formula(seed: u64, n_agents: u32, var_names: &[&str], depth: usize, sugar: bool) -> Formula {
    random_formula(
        &mut rng(seed),
        &FormulaParams {
            vars: vars(var_names),
            agents: agents(n_agents),
            max_depth: depth,
            sugar,
        },
    )
}

/// Satisfaction evaluated clause by clause on the surface syntax, straight
/// from the definitions.
pub fn naive(m: &StitModel, w: MomentId, h: HistoryId, f: &Formula) -> bool {
    let fan = m.fan(w);
    let cell = |j: Agent| -> Vec<HistoryId> {
        m.choice_cells(w, j)
            .unwrap()
            .iter()
            .find(|c| c.contains(&h))
            .cloned()
            .unwrap()
    };
    match f {
        Formula::Var(v) => m.holds(v, w, h),
        Formula::Bottom => false,
        Formula::Top => true,
        Formula::Not(a) => !naive(m, w, h, a),
        Formula::And(a, b) => naive(m, w, h, a) && naive(m, w, h, b),
        Formula::Or(a, b) => naive(m, w, h, a) || naive(m, w, h, b),
        Formula::Implies(a, b) => !naive(m, w, h, a) || naive(m, w, h, b),
        Formula::Boxed(a) => fan.iter().all(|&g| naive(m, w, g, a)),
        Formula::Diamond(a) => fan.iter().any(|&g| naive(m, w, g, a)),
        Formula::Stit(j, a) => cell(*j).iter().all(|&g| naive(m, w, g, a)),
        Formula::StitDual(j, a) => cell(*j).iter().any(|&g| naive(m, w, g, a)),
        Formula::Deliberative(j, a) => {
            cell(*j).iter().all(|&g| naive(m, w, g, a)) && !fan.iter().all(|&g| naive(m, w, g, a))
        }
    }
}

/// Every moment-history pair of the model.
pub fn pairs(m: &StitModel) -> Vec<(MomentId, HistoryId)> {
    m.moment_ids()
        .flat_map(|w| m.fan(w).iter().map(move |&h| (w, h)))
        .collect()
}
