use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// An agent index. Agents are numbered from 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Agent(u32);

impl Agent {
    pub fn new(id: u32) -> Option<Agent> {
        (id >= 1).then_some(Agent(id))
    }

    pub fn id(self) -> u32 {
        self.0
    }
}

impl TryFrom<u32> for Agent {
    type Error = String;

    fn try_from(id: u32) -> Result<Self, Self::Error> {
        Agent::new(id).ok_or_else(|| "agent ids start at 1".to_string())
    }
}

impl From<Agent> for u32 {
    fn from(a: Agent) -> u32 {
        a.0
    }
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Shorthand for building agents in code and tests. Panics on 0.
pub fn agent(id: u32) -> Agent {
    Agent::new(id).expect("agent ids start at 1")
}

/// A stit formula.
///
/// The core language is `Var`, `Bottom`, `Implies`, `Boxed` (historical
/// necessity) and `Stit`. Every other variant is notation that
/// [`Formula::desugar`] rewrites into the core:
///
/// * `~A` is `A -> false`
/// * `A & B` is `~(A -> ~B)`
/// * `A | B` is `~A -> B`
/// * `true` is `false -> false`
/// * `<>A` is `~[]~A`, `<j>A` is `~[j]~A`
/// * `[d:j]A` is `[j]A & ~[]A`
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Var(String),
    Bottom,
    Top,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Boxed(Box<Formula>),
    Diamond(Box<Formula>),
    Stit(Agent, Box<Formula>),
    StitDual(Agent, Box<Formula>),
    Deliberative(Agent, Box<Formula>),
}

use Formula::*;

impl Formula {
    pub fn var(name: impl Into<String>) -> Formula {
        Var(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Formula) -> Formula {
        Not(Box::new(a))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Implies(Box::new(a), Box::new(b))
    }

    pub fn boxed(a: Formula) -> Formula {
        Boxed(Box::new(a))
    }

    pub fn diamond(a: Formula) -> Formula {
        Diamond(Box::new(a))
    }

    pub fn stit(j: Agent, a: Formula) -> Formula {
        Stit(j, Box::new(a))
    }

    pub fn stit_dual(j: Agent, a: Formula) -> Formula {
        StitDual(j, Box::new(a))
    }

    pub fn deliberative(j: Agent, a: Formula) -> Formula {
        Deliberative(j, Box::new(a))
    }

    /// Left-associated conjunction `((a1 & a2) & a3) ...`; `true` when empty.
    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Formula {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Top)
    }

    /// Right-nested implication `a1 -> (a2 -> ... -> goal)`.
    pub fn imp_chain(premises: impl IntoIterator<Item = Formula>, goal: Formula) -> Formula {
        let premises: Vec<Formula> = premises.into_iter().collect();
        premises
            .into_iter()
            .rev()
            .fold(goal, |acc, p| Formula::implies(p, acc))
    }

    pub fn is_core(&self) -> bool {
        match self {
            Var(_) | Bottom => true,
            Implies(a, b) => a.is_core() && b.is_core(),
            Boxed(a) | Stit(_, a) => a.is_core(),
            _ => false,
        }
    }

    /// Rewrites all notation into the five core constructors.
    pub fn desugar(&self) -> Formula {
        fn neg(a: Formula) -> Formula {
            Formula::implies(a, Bottom)
        }
        match self {
            Var(p) => Var(p.clone()),
            Bottom => Bottom,
            Top => Formula::implies(Bottom, Bottom),
            Not(a) => neg(a.desugar()),
            And(a, b) => neg(Formula::implies(a.desugar(), neg(b.desugar()))),
            Or(a, b) => Formula::implies(neg(a.desugar()), b.desugar()),
            Implies(a, b) => Formula::implies(a.desugar(), b.desugar()),
            Boxed(a) => Formula::boxed(a.desugar()),
            Diamond(a) => neg(Formula::boxed(neg(a.desugar()))),
            Stit(j, a) => Formula::stit(*j, a.desugar()),
            StitDual(j, a) => neg(Formula::stit(*j, neg(a.desugar()))),
            Deliberative(j, a) => {
                let body = a.desugar();
                let stit = Formula::stit(*j, body.clone());
                let unsettled = neg(Formula::boxed(body));
                neg(Formula::implies(stit, neg(unsettled)))
            }
        }
    }

    /// Variables and agents occurring in the formula.
    pub fn vocabulary(&self) -> Vocabulary {
        let mut voc = Vocabulary::default();
        self.collect_vocabulary(&mut voc);
        voc
    }

    fn collect_vocabulary(&self, voc: &mut Vocabulary) {
        match self {
            Var(p) => {
                voc.vars.insert(p.clone());
            }
            Bottom | Top => {}
            Not(a) | Boxed(a) | Diamond(a) => a.collect_vocabulary(voc),
            And(a, b) | Or(a, b) | Implies(a, b) => {
                a.collect_vocabulary(voc);
                b.collect_vocabulary(voc);
            }
            Stit(j, a) | StitDual(j, a) | Deliberative(j, a) => {
                voc.agents.insert(*j);
                a.collect_vocabulary(voc);
            }
        }
    }

    /// Maximal nesting of `[]` and `[j]` once notation is expanded.
    pub fn modal_depth(&self) -> usize {
        match self {
            Var(_) | Bottom | Top => 0,
            Not(a) => a.modal_depth(),
            And(a, b) | Or(a, b) | Implies(a, b) => a.modal_depth().max(b.modal_depth()),
            Boxed(a) | Diamond(a) | Stit(_, a) | StitDual(_, a) | Deliberative(_, a) => {
                1 + a.modal_depth()
            }
        }
    }

    /// Node count of the desugared formula.
    pub fn size(&self) -> usize {
        fn core_size(f: &Formula) -> usize {
            match f {
                Var(_) | Bottom => 1,
                Implies(a, b) => 1 + core_size(a) + core_size(b),
                Boxed(a) | Stit(_, a) => 1 + core_size(a),
                _ => unreachable!("desugared formula"),
            }
        }
        core_size(&self.desugar())
    }

    /// True when the formula mentions no agent modality.
    pub fn is_agent_free(&self) -> bool {
        self.vocabulary().agents.is_empty()
    }

    /// Rewrites core patterns back into `~`, `<>`, `<j>` and `true` for
    /// display. Structure is otherwise untouched.
    pub fn resugar(&self) -> Formula {
        match self {
            Implies(a, b) if **b == Bottom => {
                if **a == Bottom {
                    return Top;
                }
                match &**a {
                    Boxed(inner) => {
                        if let Implies(x, y) = &**inner {
                            if **y == Bottom {
                                return Formula::diamond(x.resugar());
                            }
                        }
                        Formula::not(a.resugar())
                    }
                    Stit(j, inner) => {
                        if let Implies(x, y) = &**inner {
                            if **y == Bottom {
                                return Formula::stit_dual(*j, x.resugar());
                            }
                        }
                        Formula::not(a.resugar())
                    }
                    _ => Formula::not(a.resugar()),
                }
            }
            Implies(a, b) => Formula::implies(a.resugar(), b.resugar()),
            Boxed(a) => Formula::boxed(a.resugar()),
            Stit(j, a) => Formula::stit(*j, a.resugar()),
            Not(a) => Formula::not(a.resugar()),
            And(a, b) => Formula::and(a.resugar(), b.resugar()),
            Or(a, b) => Formula::or(a.resugar(), b.resugar()),
            Diamond(a) => Formula::diamond(a.resugar()),
            StitDual(j, a) => Formula::stit_dual(*j, a.resugar()),
            Deliberative(j, a) => Formula::deliberative(*j, a.resugar()),
            Var(_) | Bottom | Top => self.clone(),
        }
    }
}

/// The variables and agents of a formula or a set of formulas.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    pub vars: BTreeSet<String>,
    pub agents: BTreeSet<Agent>,
}

impl Vocabulary {
    pub fn of_all<'a>(fs: impl IntoIterator<Item = &'a Formula>) -> Vocabulary {
        let mut voc = Vocabulary::default();
        for f in fs {
            f.collect_vocabulary(&mut voc);
        }
        voc
    }

    pub fn union(&self, other: &Vocabulary) -> Vocabulary {
        Vocabulary {
            vars: self.vars.union(&other.vars).cloned().collect(),
            agents: self.agents.union(&other.agents).copied().collect(),
        }
    }
}

/// `{[]A in fs}`: the formulas whose outermost constructor is `[]`.
pub fn project_boxed(fs: &BTreeSet<Formula>) -> BTreeSet<Formula> {
    fs.iter().filter(|f| matches!(f, Boxed(_))).cloned().collect()
}

/// `{[j]A in fs}` for the given agent.
pub fn project_stit(fs: &BTreeSet<Formula>, j: Agent) -> BTreeSet<Formula> {
    fs.iter()
        .filter(|f| matches!(f, Stit(k, _) if *k == j))
        .cloned()
        .collect()
}
