use super::formula::{Agent, Formula};

/// The building blocks for exhaustive enumeration of core formulas.
#[derive(Clone, Debug, Default)]
pub struct CoreSignature {
    pub vars: Vec<String>,
    /// Whether `[]` may be used.
    pub settled: bool,
    pub agents: Vec<Agent>,
}

impl CoreSignature {
    fn unary_ops(&self) -> Vec<Option<Agent>> {
        let mut ops = Vec::new();
        if self.settled {
            ops.push(None);
        }
        ops.extend(self.agents.iter().copied().map(Some));
        ops
    }

    fn wrap(op: Option<Agent>, body: Formula) -> Formula {
        match op {
            None => Formula::boxed(body),
            Some(j) => Formula::stit(j, body),
        }
    }
}

/// Every core formula over `sig` with exactly `size` nodes, in a fixed
/// order: atoms (variables then `false`), then modal wrappers of smaller
/// formulas, then implications split by antecedent size.
pub fn core_formulas_of_size(sig: &CoreSignature, size: usize) -> Vec<Vec<Formula>> {
    let mut levels: Vec<Vec<Formula>> = vec![Vec::new()];
    for n in 1..=size {
        let mut level = Vec::new();
        if n == 1 {
            level.extend(sig.vars.iter().map(|v| Formula::var(v.clone())));
            level.push(Formula::Bottom);
        } else {
            for op in sig.unary_ops() {
                for body in &levels[n - 1] {
                    level.push(CoreSignature::wrap(op, body.clone()));
                }
            }
            for left in 1..n - 1 {
                let right = n - 1 - left;
                for a in &levels[left] {
                    for b in &levels[right] {
                        level.push(Formula::implies(a.clone(), b.clone()));
                    }
                }
            }
        }
        levels.push(level);
    }
    levels
}
