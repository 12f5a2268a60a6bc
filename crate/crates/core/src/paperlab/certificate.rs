use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bisim::{atoms_only_agreement, is_bisimulation, FragmentBounds, HistoryRelation, PointedModel};
use crate::frames::{validity_up_to, ValidityVerdict};
use crate::proof::{check_proof, derive_counterexample, derive_s_counterexample, ProofError, ProofScript};
use crate::semantics::{satisfies_named, validate, StitModel};
use crate::syntax::{agent, Agent, Formula};

use super::models::{
    antecedent, build_b, build_m, build_s, build_s_prime, consequent, reduct, strong_antecedent,
    strong_consequent, FourTuple, M_H0, M_ROOT, ROOT_S, ROOT_S_PRIME,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FactVerdict {
    Pass,
    Fail,
}

/// One machine-checked item.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fact {
    pub kind: String,
    pub statement: String,
    pub verdict: FactVerdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<String>,
}

/// A claim with the facts that support it. The verdict is `certified` when
/// every fact passes and `failed(kind)` naming the first failing fact
/// otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub claim: String,
    pub bounds: BTreeMap<String, usize>,
    pub facts: Vec<Fact>,
    pub verdict: String,
    pub interpretation: String,
}

impl Certificate {
    pub fn is_certified(&self) -> bool {
        self.verdict == "certified"
    }

    /// Kind of the first failing fact.
    pub fn failed_step(&self) -> Option<&str> {
        self.facts
            .iter()
            .find(|f| f.verdict == FactVerdict::Fail)
            .map(|f| f.kind.as_str())
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "claim: {}", self.claim)?;
        for (k, v) in &self.bounds {
            writeln!(f, "bound {k} = {v}")?;
        }
        for fact in &self.facts {
            let mark = match fact.verdict {
                FactVerdict::Pass => "pass",
                FactVerdict::Fail => "FAIL",
            };
            write!(f, "  [{mark}] {}: {}", fact.kind, fact.statement)?;
            if let Some(w) = &fact.witness {
                write!(f, " ({w})")?;
            }
            writeln!(f)?;
        }
        writeln!(f, "verdict: {}", self.verdict)?;
        write!(f, "{}", self.interpretation)
    }
}

struct Facts(Vec<Fact>);

impl Facts {
    fn push(&mut self, kind: &str, statement: String, outcome: Result<(), String>) {
        let (verdict, witness) = match outcome {
            Ok(()) => (FactVerdict::Pass, None),
            Err(w) => (FactVerdict::Fail, Some(w)),
        };
        self.0.push(Fact {
            kind: kind.into(),
            statement,
            verdict,
            witness,
        });
    }

    fn finish(self, claim: &str, bounds: BTreeMap<String, usize>, interpretation: &str) -> Certificate {
        let verdict = match self.0.iter().find(|f| f.verdict == FactVerdict::Fail) {
            None => "certified".to_string(),
            Some(f) => format!("failed({})", f.kind),
        };
        Certificate {
            claim: claim.into(),
            bounds,
            facts: self.0,
            verdict,
            interpretation: interpretation.into(),
        }
    }
}

fn model_fact(facts: &mut Facts, label: &str, model: &StitModel) {
    let violations = validate(model);
    facts.push(
        "model",
        format!("{label} satisfies HC, NBB, NCUH, IA and has partition choice"),
        match violations.first() {
            None => Ok(()),
            Some(v) => Err(v.to_string()),
        },
    );
}

/// The formula must belong to the model's language and have the expected
/// truth value at the given pair.
fn satisfaction_fact(
    facts: &mut Facts,
    label: &str,
    model: &StitModel,
    moment: &str,
    history: &str,
    f: &Formula,
    expected: bool,
) {
    let rel = if expected { "|=" } else { "|/=" };
    let statement = format!("{label}, {moment}, {history} {rel} {f}");
    let voc = f.vocabulary();
    let outcome = if let Some(v) = voc.vars.iter().find(|v| !model.vars().contains(*v)) {
        Err(format!("variable {v} is outside the language of {label}"))
    } else if let Some(j) = voc.agents.iter().find(|j| !model.agents().contains(j)) {
        Err(format!("agent {j} is outside the language of {label}"))
    } else {
        match satisfies_named(model, moment, history, f) {
            Ok(v) if v == expected => Ok(()),
            Ok(v) => Err(format!("evaluates to {v}")),
            Err(e) => Err(e.to_string()),
        }
    };
    facts.push("satisfaction", statement, outcome);
}

fn proof_fact(
    facts: &mut Facts,
    builder: &str,
    script: Result<ProofScript, ProofError>,
    goal: &Formula,
) {
    let outcome = script.map_err(|e| e.to_string()).and_then(|s| {
        check_proof(&s).map_err(|v| v.to_string())?;
        let concl = s.conclusion().ok_or("empty script")?;
        if concl.desugar() == goal.desugar() {
            Ok(())
        } else {
            Err(format!("script concludes {concl}"))
        }
    });
    facts.push(
        "proof",
        format!("{builder} yields an accepted script proving {goal}"),
        outcome,
    );
}

fn vocabulary_fact(facts: &mut Facts, a: &Formula, b: &Formula, shared: &BTreeSet<String>) {
    let (va, vb) = (a.vocabulary(), b.vocabulary());
    let common_agents: Vec<Agent> = va.agents.intersection(&vb.agents).copied().collect();
    let common_vars: BTreeSet<String> = va.vars.intersection(&vb.vars).cloned().collect();
    let outcome = if !common_agents.is_empty() {
        Err(format!("shared agents {common_agents:?}"))
    } else if &common_vars != shared {
        Err(format!("shared variables {common_vars:?}"))
    } else {
        Ok(())
    };
    facts.push(
        "vocabulary",
        format!("the two sides share no agent and exactly the variables {shared:?}"),
        outcome,
    );
}

fn validity_fact(facts: &mut Facts, f: &Formula, bound: usize) {
    let outcome = match validity_up_to(f, bound) {
        Ok(ValidityVerdict::ValidUpTo { .. }) => Ok(()),
        Ok(ValidityVerdict::Countermodel { frame, history }) => Err(format!(
            "countermodel at {history}: {}",
            serde_json::to_string(&frame).unwrap_or_default()
        )),
        Err(e) => Err(e.to_string()),
    };
    facts.push(
        "bounded-validity",
        format!("{f} has no countermodel with at most {bound} histories"),
        outcome,
    );
}

/// Inputs of the four-agent certificate. The default reproduces the tuple
/// models and the q-agreement relation; tests alter single components.
#[derive(Clone, Debug)]
pub struct NegativeSetup {
    pub left: StitModel,
    pub right: StitModel,
    pub left_history: String,
    pub right_history: String,
    pub antecedent: Formula,
    pub consequent: Formula,
    pub agents: [Agent; 4],
    pub vars: [String; 3],
    pub relation: HistoryRelation,
    pub shared: BTreeSet<String>,
    pub validity_bound: Option<usize>,
}

impl Default for NegativeSetup {
    fn default() -> Self {
        let agents = [agent(1), agent(2), agent(3), agent(4)];
        let zero = FourTuple::new([0, 0, 0, 0], true).expect("valid tuple");
        NegativeSetup {
            left: build_s(),
            right: build_s_prime(),
            left_history: zero.history(ROOT_S),
            right_history: zero.history(ROOT_S_PRIME),
            antecedent: antecedent(agents[0], agents[1], "p", "q"),
            consequent: consequent(agents[2], agents[3], "r", "q"),
            agents,
            vars: ["p".into(), "q".into(), "r".into()],
            relation: build_b(),
            shared: BTreeSet::from(["q".to_string()]),
            validity_bound: Some(3),
        }
    }
}

pub const NEGATIVE_CLAIM: &str =
    "restricted Craig interpolation fails for stit logic with four or more agents";
pub const STRONG_NEGATIVE_CLAIM: &str =
    "strong restricted Craig interpolation fails for stit logic with two or more agents";

pub fn certify_negative() -> Certificate {
    certify_negative_with(&NegativeSetup::default())
}

pub fn certify_negative_with(setup: &NegativeSetup) -> Certificate {
    let mut facts = Facts(Vec::new());
    let (a, b) = (&setup.antecedent, &setup.consequent);
    model_fact(&mut facts, "S", &setup.left);
    model_fact(&mut facts, "S'", &setup.right);
    satisfaction_fact(&mut facts, "S", &setup.left, ROOT_S, &setup.left_history, a, true);
    satisfaction_fact(
        &mut facts,
        "S'",
        &setup.right,
        ROOT_S_PRIME,
        &setup.right_history,
        b,
        false,
    );
    let vars: Vec<&str> = setup.vars.iter().map(String::as_str).collect();
    proof_fact(
        &mut facts,
        "the four-agent counterexample derivation",
        derive_counterexample(setup.agents, [vars[0], vars[1], vars[2]]),
        &Formula::implies(a.clone(), b.clone()),
    );
    facts.push(
        "membership",
        format!(
            "({}, {}) is in the relation",
            setup.left_history, setup.right_history
        ),
        if setup
            .relation
            .contains(&setup.left_history, &setup.right_history)
        {
            Ok(())
        } else {
            Err("pair missing".into())
        },
    );
    let bisim = match (
        reduct(&setup.left, &setup.shared),
        reduct(&setup.right, &setup.shared),
    ) {
        (Ok(l), Ok(r)) => is_bisimulation(
            PointedModel::new(&l, ROOT_S).expect("root exists"),
            PointedModel::new(&r, ROOT_S_PRIME).expect("root exists"),
            &setup.relation,
            &setup.shared,
        )
        .map_err(|v| v.to_string()),
        (Err(e), _) | (_, Err(e)) => Err(e.to_string()),
    };
    facts.push(
        "bisimulation",
        format!(
            "the relation ({} pairs) is a bisimulation between the {:?}-reducts at {ROOT_S} and {ROOT_S_PRIME}",
            setup.relation.len(),
            setup.shared
        ),
        bisim,
    );
    vocabulary_fact(&mut facts, a, b, &setup.shared);
    let mut bounds = BTreeMap::new();
    if let Some(k) = setup.validity_bound {
        validity_fact(&mut facts, &Formula::implies(a.clone(), b.clone()), k);
        bounds.insert("bounded_validity_histories".into(), k);
    }
    facts.finish(
        NEGATIVE_CLAIM,
        bounds,
        "A -> B is provable with disjoint agents on the two sides. Any C over the shared \
         variables and agents 1-4 with A -> C provable holds at the left pair, transfers along \
         the bisimulation of the reducts to the right pair, where B fails, so C -> B is not \
         valid. Hence no interpolant exists; the bisimulation argument is unbounded.",
    )
}

/// Inputs of the two-agent certificate.
#[derive(Clone, Debug)]
pub struct StrongSetup {
    pub left: StitModel,
    pub right: StitModel,
    pub history: String,
    pub agents: [Agent; 2],
    pub var: String,
    pub relation: HistoryRelation,
    pub fragment: FragmentBounds,
    pub validity_bound: Option<usize>,
}

impl StrongSetup {
    pub fn for_agents(j1: Agent, j2: Agent) -> StrongSetup {
        let left = build_m(j1, "p");
        let relation = HistoryRelation::new(
            left.histories()
                .iter()
                .map(|h| (h.name.clone(), h.name.clone())),
        );
        StrongSetup {
            left,
            right: build_m(j2, "p"),
            history: M_H0.into(),
            agents: [j1, j2],
            var: "p".into(),
            relation,
            fragment: FragmentBounds {
                max_size: 7,
                max_depth: 7,
            },
            validity_bound: Some(3),
        }
    }
}

impl Default for StrongSetup {
    fn default() -> Self {
        StrongSetup::for_agents(agent(1), agent(2))
    }
}

pub fn certify_strong_negative() -> Certificate {
    certify_strong_negative_with(&StrongSetup::default())
}

pub fn certify_strong_negative_with(setup: &StrongSetup) -> Certificate {
    let mut facts = Facts(Vec::new());
    let [j1, j2] = setup.agents;
    let a = strong_antecedent(j1, &setup.var);
    let b = strong_consequent(j2, &setup.var);
    let vars = BTreeSet::from([setup.var.clone()]);
    model_fact(&mut facts, "M1", &setup.left);
    model_fact(&mut facts, "M2", &setup.right);
    let agreement = atoms_only_agreement(
        PointedModel::new(&setup.left, M_ROOT).expect("root exists"),
        PointedModel::new(&setup.right, M_ROOT).expect("root exists"),
        &setup.relation,
        &vars,
        setup.fragment,
    );
    let outcome = match agreement {
        Ok(report) => match report.counterexample {
            None => Ok(()),
            Some(c) => Err(format!(
                "{} separates {} and {}",
                c.formula, c.left, c.right
            )),
        },
        Err(e) => Err(e.to_string()),
    };
    facts.push(
        "atoms-agreement",
        format!(
            "related pairs agree on every []-only formula over {:?} of size <= {} and depth <= {}",
            vars, setup.fragment.max_size, setup.fragment.max_depth
        ),
        outcome,
    );
    proof_fact(
        &mut facts,
        "the two-agent counterexample derivation",
        derive_s_counterexample(j1, j2, &setup.var),
        &Formula::implies(a.clone(), b.clone()),
    );
    satisfaction_fact(&mut facts, "M1", &setup.left, M_ROOT, &setup.history, &a, true);
    satisfaction_fact(&mut facts, "M2", &setup.right, M_ROOT, &setup.history, &b, false);
    vocabulary_fact(&mut facts, &a, &b, &vars);
    let mut bounds = BTreeMap::from([
        ("fragment_size".to_string(), setup.fragment.max_size),
        ("fragment_depth".to_string(), setup.fragment.max_depth),
    ]);
    if let Some(k) = setup.validity_bound {
        validity_fact(&mut facts, &Formula::implies(a.clone(), b.clone()), k);
        bounds.insert("bounded_validity_histories".into(), k);
    }
    facts.finish(
        STRONG_NEGATIVE_CLAIM,
        bounds,
        "A -> B is provable with disjoint agents. Any agent-free C over the shared variable \
         with A -> C provable holds at the left pair; a total atoms-respecting relation \
         preserves agent-free formulas, so C holds at the right pair, where B fails. Hence no \
         agent-free interpolant exists. The fragment check confirms the preservation step up \
         to the stated bounds.",
    )
}
