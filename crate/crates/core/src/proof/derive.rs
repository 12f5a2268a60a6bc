//! Scripted derivations of the derived rules and the two refutable
//! conjunctions used by the non-interpolation results.

use std::collections::BTreeSet;

use super::builder::ProofBuilder;
use super::script::{Modality, ProofScript};
use super::ProofError;
use crate::syntax::{Agent, Formula};

fn distinct_agents(agents: &[Agent]) -> Result<(), ProofError> {
    let mut seen = BTreeSet::new();
    for &j in agents {
        if !seen.insert(j) {
            return Err(ProofError::DuplicateAgent(j));
        }
    }
    Ok(())
}

fn distinct_vars(vars: &[&str]) -> Result<(), ProofError> {
    let mut seen = BTreeSet::new();
    for &v in vars {
        if !seen.insert(v) {
            return Err(ProofError::DuplicateVariable(v.to_string()));
        }
    }
    Ok(())
}

fn expect_conclusion(premise: &ProofScript, expected: &Formula) -> Result<(), ProofError> {
    let found = premise
        .conclusion()
        .ok_or_else(|| ProofError::Builder("empty premise script".into()))?;
    if found.desugar() != expected.desugar() {
        return Err(ProofError::PremiseMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        });
    }
    Ok(())
}

/// From `p1 -> (p2 -> ... -> false)` style contradictions: proves
/// `~<>X` given a line proving `~X`.
fn never_possible(b: &mut ProofBuilder, not_x: usize, x: &Formula) -> Result<usize, ProofError> {
    let settled = b.nec(Modality::Settled, not_x)?;
    b.prop(&[settled], Formula::not(Formula::diamond(x.clone())))
}

/// `<>([j1]p & [j2](p -> q)) -> ~<>([j3]r & [j4](r -> ~q))` for pairwise
/// different agents and variables.
pub fn derive_counterexample(agents: [Agent; 4], vars: [&str; 3]) -> Result<ProofScript, ProofError> {
    distinct_agents(&agents)?;
    distinct_vars(&vars)?;
    let [j1, j2, j3, j4] = agents;
    let p = Formula::var(vars[0]);
    let q = Formula::var(vars[1]);
    let r = Formula::var(vars[2]);
    let bodies = [
        (j1, p.clone()),
        (j2, Formula::implies(p.clone(), q.clone())),
        (j3, r.clone()),
        (j4, Formula::implies(r.clone(), Formula::not(q.clone()))),
    ];
    let stits: Vec<Formula> = bodies
        .iter()
        .map(|(j, a)| Formula::stit(*j, a.clone()))
        .collect();
    let left = Formula::and(stits[0].clone(), stits[1].clone());
    let right = Formula::and(stits[2].clone(), stits[3].clone());

    let mut b = ProofBuilder::new();
    // <>(X & Y) -> <>X and <>(X & Y) -> <>Y for both conjunctions
    let mut spread = Vec::new();
    for (pair, first) in [(&left, 0), (&right, 2)] {
        for k in [first, first + 1] {
            let proj = b.taut(Formula::implies(pair.clone(), stits[k].clone()))?;
            spread.push(b.dual_mono(Modality::Settled, proj)?);
        }
    }
    let joint = b.independence(&bodies)?;
    let mut ts = Vec::new();
    for (j, a) in &bodies {
        ts.push(b.t(Modality::Agent(*j), a.clone())?);
    }
    let all = Formula::conj(stits.iter().cloned());
    let inconsistent = b.prop(&ts, Formula::not(all.clone()))?;
    let impossible = never_possible(&mut b, inconsistent, &all)?;

    let goal = Formula::implies(
        Formula::diamond(left),
        Formula::not(Formula::diamond(right)),
    );
    let mut premises = spread;
    premises.push(joint);
    premises.push(impossible);
    let last = b.prop(&premises, goal)?;
    b.conclude(last)?;
    b.finish_checked()
}

/// `<>[j1]p -> ~<>[j2]~p` for different agents.
pub fn derive_s_counterexample(j1: Agent, j2: Agent, p: &str) -> Result<ProofScript, ProofError> {
    distinct_agents(&[j1, j2])?;
    let p = Formula::var(p);
    let bodies = [(j1, p.clone()), (j2, Formula::not(p.clone()))];
    let stits: Vec<Formula> = bodies
        .iter()
        .map(|(j, a)| Formula::stit(*j, a.clone()))
        .collect();

    let mut b = ProofBuilder::new();
    let joint = b.independence(&bodies)?;
    let t1 = b.t(Modality::Agent(j1), bodies[0].1.clone())?;
    let t2 = b.t(Modality::Agent(j2), bodies[1].1.clone())?;
    let both = Formula::conj(stits.iter().cloned());
    let inconsistent = b.prop(&[t1, t2], Formula::not(both.clone()))?;
    let impossible = never_possible(&mut b, inconsistent, &both)?;
    let goal = Formula::implies(
        Formula::diamond(stits[0].clone()),
        Formula::not(Formula::diamond(stits[1].clone())),
    );
    let last = b.prop(&[joint, impossible], goal)?;
    b.conclude(last)?;
    b.finish_checked()
}

/// The premise and conclusion shapes for [`derive_technical2`]:
/// `([]A & [i1]B1 & ... & [in]Bn) -> ~C` and
/// `([]A & <>[i1]B1 & ... & <>[in]Bn) -> ~<>[j]C`.
pub fn technical2_goal(
    a: &Formula,
    bs: &[(Agent, Formula)],
    c: &Formula,
    j: Agent,
) -> (Formula, Formula) {
    let settled = Formula::boxed(a.clone());
    let premise = Formula::implies(
        Formula::conj(
            std::iter::once(settled.clone())
                .chain(bs.iter().map(|(i, b)| Formula::stit(*i, b.clone()))),
        ),
        Formula::not(c.clone()),
    );
    let goal = Formula::implies(
        Formula::conj(
            std::iter::once(settled)
                .chain(bs.iter().map(|(i, b)| Formula::diamond(Formula::stit(*i, b.clone())))),
        ),
        Formula::not(Formula::diamond(Formula::stit(j, c.clone()))),
    );
    (premise, goal)
}

/// Extends a proof of `([]A & [i1]B1 & ... & [in]Bn) -> ~C` to a proof of
/// `([]A & <>[i1]B1 & ... & <>[in]Bn) -> ~<>[j]C`, for pairwise different
/// `i1, ..., in, j`.
pub fn derive_technical2(
    a: &Formula,
    bs: &[(Agent, Formula)],
    c: &Formula,
    j: Agent,
    premise: &ProofScript,
) -> Result<ProofScript, ProofError> {
    let mut agents: Vec<Agent> = bs.iter().map(|(i, _)| *i).collect();
    agents.push(j);
    distinct_agents(&agents)?;
    let (premise_goal, goal) = technical2_goal(a, bs, c, j);
    let mut b = ProofBuilder::extend_checked(premise)?;
    expect_conclusion(premise, &premise_goal)?;
    let premise_line = premise.len();

    let settled = Formula::boxed(a.clone());
    let stit_bs: Vec<Formula> = bs.iter().map(|(i, b)| Formula::stit(*i, b.clone())).collect();
    let stit_c = Formula::stit(j, c.clone());

    // (<>[i1]B1 & ... & <>[j]C) -> <>([i1]B1 & ... & [j]C)
    let mut pairs = bs.to_vec();
    pairs.push((j, c.clone()));
    let joint = b.independence(&pairs)?;

    // drop the [j] in front of C inside the diamond
    let with_stit = Formula::conj(stit_bs.iter().cloned().chain([stit_c.clone()]));
    let with_c = Formula::conj(stit_bs.iter().cloned().chain([c.clone()]));
    let t_c = b.t(Modality::Agent(j), c.clone())?;
    let weaken = b.prop(&[t_c], Formula::implies(with_stit, with_c.clone()))?;
    let weaken_dia = b.dual_mono(Modality::Settled, weaken)?;

    // []A & <>Y -> <>([]A & Y)
    let four = b.four(Modality::Settled, a.clone())?;
    let pair_up = b.taut(Formula::implies(
        settled.clone(),
        Formula::implies(with_c.clone(), Formula::and(settled.clone(), with_c.clone())),
    ))?;
    let pair_up_settled = b.mono(Modality::Settled, pair_up)?;
    let with_settled = Formula::and(settled.clone(), with_c.clone());
    let distribute = b.k_dual(Modality::Settled, with_c, with_settled.clone())?;

    // reassociate to (([]A & [i1]B1 & ...) & C)
    let antecedent = Formula::conj(std::iter::once(settled.clone()).chain(stit_bs.iter().cloned()));
    let flat = Formula::and(antecedent, c.clone());
    let reassoc = b.taut(Formula::implies(with_settled, flat.clone()))?;
    let reassoc_dia = b.dual_mono(Modality::Settled, reassoc)?;

    let refuted = b.prop(&[premise_line], Formula::not(flat.clone()))?;
    let impossible = never_possible(&mut b, refuted, &flat)?;

    let last = b.prop(
        &[
            joint,
            weaken_dia,
            four,
            pair_up_settled,
            distribute,
            reassoc_dia,
            impossible,
        ],
        goal,
    )?;
    b.conclude(last)?;
    b.finish_checked()
}

/// `([]A & [j]B) -> C` and `([]A & <>[j]B) -> <>[j]C`.
pub fn technical3_goal(a: &Formula, b: &Formula, c: &Formula, j: Agent) -> (Formula, Formula) {
    let settled = Formula::boxed(a.clone());
    let premise = Formula::implies(
        Formula::and(settled.clone(), Formula::stit(j, b.clone())),
        c.clone(),
    );
    let goal = Formula::implies(
        Formula::and(settled, Formula::diamond(Formula::stit(j, b.clone()))),
        Formula::diamond(Formula::stit(j, c.clone())),
    );
    (premise, goal)
}

/// Extends a proof of `([]A & [j]B) -> C` to a proof of
/// `([]A & <>[j]B) -> <>[j]C`.
pub fn derive_technical3(
    a: &Formula,
    b_body: &Formula,
    c: &Formula,
    j: Agent,
    premise: &ProofScript,
) -> Result<ProofScript, ProofError> {
    let (premise_goal, goal) = technical3_goal(a, b_body, c, j);
    let mut b = ProofBuilder::extend_checked(premise)?;
    expect_conclusion(premise, &premise_goal)?;
    let premise_line = premise.len();
    let stit = Modality::Agent(j);
    let settled = Formula::boxed(a.clone());
    let jb = Formula::stit(j, b_body.clone());
    let jc = Formula::stit(j, c.clone());

    // [j]([]A -> ([j]B -> C)) and distribute twice
    let curried = b.prop(
        &[premise_line],
        Formula::implies(settled.clone(), Formula::implies(jb.clone(), c.clone())),
    )?;
    let lifted = b.nec(stit, curried)?;
    let k1 = b.k(stit, settled.clone(), Formula::implies(jb.clone(), c.clone()))?;
    let k2 = b.k(stit, jb.clone(), c.clone())?;
    let four_j = b.four(stit, b_body.clone())?;
    let settled_fragment = b.settled_to_stit_settled(a.clone(), j)?;

    // ([]A & [j]B) -> [j]C, curried
    let step7 = b.prop(
        &[lifted, k1, k2, four_j, settled_fragment],
        Formula::implies(settled.clone(), Formula::implies(jb.clone(), jc.clone())),
    )?;
    let lifted7 = b.mono(Modality::Settled, step7)?;
    let four = b.four(Modality::Settled, a.clone())?;
    let distribute = b.k_dual(Modality::Settled, jb, jc)?;
    let last = b.prop(&[four, lifted7, distribute], goal)?;
    b.conclude(last)?;
    b.finish_checked()
}

/// `[]A -> [j][]A` as a stand-alone script.
pub fn settled_to_stit_settled(a: &Formula, j: Agent) -> Result<ProofScript, ProofError> {
    let mut b = ProofBuilder::new();
    let last = b.settled_to_stit_settled(a.clone(), j)?;
    b.conclude(last)?;
    b.finish_checked()
}
