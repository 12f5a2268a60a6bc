//! Seeded generators for formulas and validated models.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::frames::{check_independence, ChoiceFrame};
use crate::semantics::{validate, ModelSpec, StitModel};
use crate::syntax::{Agent, Formula};

#[derive(Clone, Debug)]
pub struct FormulaParams {
    pub vars: Vec<String>,
    pub agents: Vec<Agent>,
    pub max_depth: usize,
    /// Use the full surface syntax rather than only core connectives.
    pub sugar: bool,
}

/// A random formula whose syntax tree has depth at most `max_depth`.
pub fn random_formula<R: Rng + ?Sized>(rng: &mut R, params: &FormulaParams) -> Formula {
    gen_formula(rng, params, params.max_depth)
}

fn gen_formula<R: Rng + ?Sized>(rng: &mut R, p: &FormulaParams, depth: usize) -> Formula {
    let leaf = |rng: &mut R| {
        let roll = rng.gen_range(0..10);
        if p.vars.is_empty() || roll == 0 {
            if p.sugar && rng.gen_bool(0.5) {
                Formula::Top
            } else {
                Formula::Bottom
            }
        } else {
            Formula::var(p.vars.choose(rng).expect("non-empty").clone())
        }
    };
    if depth == 0 || rng.gen_range(0..4) == 0 {
        return leaf(rng);
    }
    let agent = |rng: &mut R| p.agents.choose(rng).copied();
    let kinds = if p.sugar { 11 } else { 4 };
    let sub = |rng: &mut R| gen_formula(rng, p, depth - 1);
    match rng.gen_range(0..kinds) {
        0 => Formula::implies(sub(rng), sub(rng)),
        1 => Formula::boxed(sub(rng)),
        2 => match agent(rng) {
            Some(j) => Formula::stit(j, sub(rng)),
            None => Formula::boxed(sub(rng)),
        },
        3 => Formula::implies(sub(rng), Formula::Bottom),
        4 => Formula::not(sub(rng)),
        5 => Formula::and(sub(rng), sub(rng)),
        6 => Formula::or(sub(rng), sub(rng)),
        7 => Formula::diamond(sub(rng)),
        8 => match agent(rng) {
            Some(j) => Formula::stit_dual(j, sub(rng)),
            None => Formula::diamond(sub(rng)),
        },
        9 => match agent(rng) {
            Some(j) => Formula::deliberative(j, sub(rng)),
            None => Formula::not(sub(rng)),
        },
        _ => Formula::and(sub(rng), Formula::or(sub(rng), sub(rng))),
    }
}

#[derive(Clone, Debug)]
pub struct ModelParams {
    pub max_histories: usize,
    pub agents: Vec<Agent>,
    pub vars: Vec<String>,
    /// Maximal length of a root-to-leaf path.
    pub max_height: usize,
}

struct Node {
    name: String,
    children: Vec<usize>,
}

/// A random finite tree with at most `max_histories` leaves, choice
/// partitions that respect NCUH and IA, and an arbitrary valuation. The
/// result always validates.
pub fn random_model<R: Rng + ?Sized>(rng: &mut R, params: &ModelParams) -> StitModel {
    let leaves = rng.gen_range(1..=params.max_histories.max(1));
    let mut nodes = Vec::new();
    grow(rng, &mut nodes, leaves, params.max_height.max(1));

    let mut spec = ModelSpec {
        moments: nodes.iter().map(|n| n.name.clone()).collect(),
        agents: params.agents.clone(),
        ..ModelSpec::default()
    };
    for n in &nodes {
        for &c in &n.children {
            spec.order.push((n.name.clone(), nodes[c].name.clone()));
        }
    }
    // histories are named by their chains; collect them per moment
    let skeleton = StitModel::from_spec(&spec).expect("random tree is well formed");
    for (i, n) in nodes.iter().enumerate() {
        let m = skeleton.moment(&n.name).expect("moment exists");
        let fan = skeleton.fan(m);
        if n.children.len() < 2 || params.agents.is_empty() {
            continue;
        }
        // undivided classes at n: histories through the same child
        let groups: Vec<Vec<String>> = n
            .children
            .iter()
            .map(|&c| {
                let cm = skeleton.moment(&nodes[c].name).expect("moment exists");
                fan.iter()
                    .filter(|&&h| skeleton.passes_through(h, cm))
                    .map(|&h| skeleton.history_name(h).to_string())
                    .collect()
            })
            .collect();
        let partitions = independent_partitions(rng, groups.len(), params.agents.len());
        let entry = spec.choice.entry(nodes[i].name.clone()).or_default();
        for (&j, blocks) in params.agents.iter().zip(partitions) {
            let cells = blocks
                .into_iter()
                .map(|b| b.into_iter().flat_map(|g| groups[g].clone()).collect())
                .collect();
            entry.insert(j, cells);
        }
    }
    for h in skeleton.histories() {
        for &m in &h.moments {
            for v in &params.vars {
                if rng.gen_bool(0.5) {
                    spec.valuation.push((
                        v.clone(),
                        skeleton.moment_name(m).to_string(),
                        h.name.clone(),
                    ));
                }
            }
        }
    }
    let model = StitModel::from_spec(&spec).expect("random model is well formed");
    debug_assert!(validate(&model).is_empty());
    model
}

fn grow<R: Rng + ?Sized>(rng: &mut R, nodes: &mut Vec<Node>, leaves: usize, height: usize) -> usize {
    let id = nodes.len();
    nodes.push(Node {
        name: format!("w{id}"),
        children: Vec::new(),
    });
    if height <= 1 {
        return id;
    }
    let children = if leaves == 1 {
        usize::from(rng.gen_bool(0.3))
    } else if height == 2 {
        leaves
    } else {
        rng.gen_range(1..=leaves.min(3))
    };
    if children == 0 {
        return id;
    }
    // split the leaves among the children, each getting at least one
    let mut shares = vec![1; children];
    for _ in children..leaves {
        let k = rng.gen_range(0..children);
        shares[k] += 1;
    }
    for share in shares {
        let child = grow(rng, nodes, share, height - 1);
        nodes[id].children.push(child);
    }
    id
}

/// One partition of `0..n` per agent such that every selection of cells
/// meets. Falls back to trivial partitions after repeated failures.
fn independent_partitions<R: Rng + ?Sized>(rng: &mut R, n: usize, agents: usize) -> Vec<Vec<Vec<usize>>> {
    for _ in 0..20 {
        let parts: Vec<Vec<Vec<usize>>> = (0..agents).map(|_| random_partition(rng, n)).collect();
        let frame = ChoiceFrame::new(
            (0..n).map(|i| format!("g{i}")).collect(),
            (0..agents)
                .map(|k| (Agent::new(k as u32 + 1).expect("positive"), parts[k].clone()))
                .collect(),
            Vec::new(),
        )
        .expect("random partitions are well formed");
        if check_independence(&frame).is_ok() {
            return parts;
        }
    }
    vec![vec![(0..n).collect()]; agents]
}

fn random_partition<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Vec<usize>> {
    let blocks = rng.gen_range(1..=n);
    let mut cells: Vec<Vec<usize>> = vec![Vec::new(); blocks];
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for (k, &i) in order.iter().enumerate() {
        let b = if k < blocks { k } else { rng.gen_range(0..blocks) };
        cells[b].push(i);
    }
    for c in &mut cells {
        c.sort_unstable();
    }
    cells.sort();
    cells
}

/// A random frame with `n` histories (IA not guaranteed).
pub fn random_frame<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    agents: &[Agent],
    vars: &[String],
) -> ChoiceFrame {
    let partitions = agents
        .iter()
        .map(|&j| (j, random_partition(rng, n)))
        .collect();
    let valuation = (0..n)
        .map(|_| {
            vars.iter()
                .filter(|_| rng.gen_bool(0.5))
                .cloned()
                .collect::<BTreeSet<_>>()
        })
        .collect();
    ChoiceFrame::new(
        (0..n).map(|i| format!("h{i}")).collect(),
        partitions,
        valuation,
    )
    .expect("random frame is well formed")
}
