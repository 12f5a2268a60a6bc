mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use stit::frames::{validity_up_to, ValidityVerdict};
use stit::proof::taut::is_tautology;
use stit::proof::{
    check_proof, derive_counterexample, derive_s_counterexample, derive_technical2,
    derive_technical3, match_axiom, settled_to_stit_settled, technical2_goal, technical3_goal,
    Modality, ProofBuilder, ProofError, ProofScript, SchemeId,
};
use stit::semantics::{satisfies, valid_in_model, validate, ModelSpec, StitModel, Violation};
use stit::{agent, parse, Agent, Formula};

fn f(s: &str) -> Formula {
    parse(s).unwrap()
}

fn technical2_script(bs: &[(Agent, Formula)], j: Agent) -> Result<ProofScript, ProofError> {
    // premise: ([]T & [i1]p & ... ) -> ~~p, from T for the first agent
    let c = Formula::not(Formula::var("p"));
    let (premise_goal, _) = technical2_goal(&Formula::Top, bs, &c, j);
    let mut b = ProofBuilder::new();
    let t = b.t(Modality::Agent(bs[0].0), bs[0].1.clone())?;
    let line = b.prop(&[t], premise_goal)?;
    b.conclude(line)?;
    let premise = b.finish_checked()?;
    derive_technical2(&Formula::Top, bs, &c, j, &premise)
}

fn technical3_script(j: Agent) -> ProofScript {
    // premise: ([]q & [j]p) -> (p & q)
    let (a, body, c) = (f("q"), f("p"), f("p & q"));
    let (premise_goal, _) = technical3_goal(&a, &body, &c, j);
    let mut b = ProofBuilder::new();
    let t1 = b.t(Modality::Settled, a.clone()).unwrap();
    let t2 = b.t(Modality::Agent(j), body.clone()).unwrap();
    let line = b.prop(&[t1, t2], premise_goal).unwrap();
    b.conclude(line).unwrap();
    let premise = b.finish_checked().unwrap();
    derive_technical3(&a, &body, &c, j, &premise).unwrap()
}

fn scripts() -> Vec<(&'static str, ProofScript)> {
    let (j1, j2, j3, j4) = (agent(1), agent(2), agent(3), agent(4));
    vec![
        ("counterexample", derive_counterexample([j1, j2, j3, j4], ["p", "q", "r"]).unwrap()),
        ("s-counterexample", derive_s_counterexample(j1, j2, "p").unwrap()),
        ("technical2/1", technical2_script(&[(j1, f("p"))], j2).unwrap()),
        (
            "technical2/2",
            technical2_script(&[(j1, f("p")), (j3, f("q"))], j2).unwrap(),
        ),
        ("technical3", technical3_script(j2)),
        ("settled", settled_to_stit_settled(&f("p -> [1]q"), j3).unwrap()),
    ]
}

#[test]
fn derived_lines_hold_in_random_models() {
    let scripts = scripts();
    for (name, s) in &scripts {
        check_proof(s).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    for seed in 0..100 {
        let m = common::model(seed, 6, 4, &["p", "q", "r"]);
        for (name, s) in &scripts {
            for line in &s.lines {
                assert!(
                    valid_in_model(&m, &line.formula).unwrap(),
                    "{name} line {}: {} fails in model {seed}",
                    line.index,
                    line.formula
                );
            }
        }
    }
}

#[test]
fn derived_conclusions_hold_up_to_three_histories() {
    let small = [
        derive_s_counterexample(agent(1), agent(2), "p").unwrap(),
        technical3_script(agent(1)),
        settled_to_stit_settled(&f("p"), agent(2)).unwrap(),
    ];
    for s in &small {
        let goal = s.conclusion().unwrap();
        assert_eq!(
            validity_up_to(goal, 3).unwrap(),
            ValidityVerdict::ValidUpTo { bound: 3 },
            "{goal}"
        );
    }
}

#[test]
fn builders_accept_every_distinct_agent_choice() {
    let all: Vec<Agent> = (1..=6).map(agent).collect();
    let mut count = 0;
    for &a in &all {
        for &b in &all {
            if a == b {
                continue;
            }
            let s = derive_s_counterexample(a, b, "x").unwrap();
            check_proof(&s).unwrap();
            assert!(technical2_script(&[(a, f("p"))], b).is_ok());
            for &c in &all {
                if c == a || c == b {
                    continue;
                }
                for &d in &all {
                    if d == a || d == b || d == c {
                        continue;
                    }
                    let s = derive_counterexample([a, b, c, d], ["u", "v", "w"]).unwrap();
                    check_proof(&s).unwrap();
                    count += 1;
                }
            }
        }
    }
    assert_eq!(count, 6 * 5 * 4 * 3);
}

#[test]
fn builders_reject_repeated_agents() {
    let (j1, j2) = (agent(1), agent(2));
    assert_eq!(
        derive_s_counterexample(j1, j1, "p"),
        Err(ProofError::DuplicateAgent(j1))
    );
    assert!(matches!(
        derive_counterexample([j1, j2, j1, agent(3)], ["p", "q", "r"]),
        Err(ProofError::DuplicateAgent(_))
    ));
    assert!(matches!(
        technical2_script(&[(j1, f("p")), (j2, f("q"))], j1),
        Err(ProofError::DuplicateAgent(_))
    ));
    assert!(matches!(
        derive_counterexample([j1, j2, agent(3), agent(4)], ["p", "p", "r"]),
        Err(ProofError::DuplicateVariable(_))
    ));
}

#[test]
fn independence_scheme_needs_distinct_agents() {
    let ok = f("(<>[1]p & <>[2]q) -> <>([1]p & [2]q)");
    assert!(match_axiom(&ok.desugar(), SchemeId::Independence).is_ok());
    let bad = f("(<>[1]p & <>[1]q) -> <>([1]p & [1]q)");
    assert!(match_axiom(&bad.desugar(), SchemeId::Independence).is_err());
    let script = ProofScript::parse(&format!("1. {bad} ; ax:A3\n")).unwrap();
    assert!(check_proof(&script).is_err());
    let mut b = ProofBuilder::new();
    assert!(b.independence(&[(agent(1), f("p")), (agent(1), f("q"))]).is_err());
}

/// Two histories, two agents whose choices split them crosswise: every
/// constraint except independence holds, and an independence instance fails.
#[test]
fn independence_instance_fails_without_independence() {
    let spec = ModelSpec {
        moments: vec!["r".into(), "a".into(), "b".into()],
        order: vec![("r".into(), "a".into()), ("r".into(), "b".into())],
        agents: vec![agent(1), agent(2)],
        choice: BTreeMap::from([(
            "r".to_string(),
            BTreeMap::from([
                (agent(1), vec![vec!["r>a".to_string()], vec!["r>b".to_string()]]),
                (agent(2), vec![vec!["r>a".to_string()], vec!["r>b".to_string()]]),
            ]),
        )]),
        valuation: vec![
            ("p".into(), "r".into(), "r>a".into()),
            ("q".into(), "r".into(), "r>b".into()),
        ],
    };
    let m = StitModel::from_spec(&spec).unwrap();
    let violations = validate(&m);
    assert!(!violations.is_empty());
    assert!(violations.iter().all(|v| matches!(v, Violation::Independence { .. })));
    let a3 = f("(<>[1]p & <>[2]q) -> <>([1]p & [2]q)");
    let r = m.moment("r").unwrap();
    let h = m.history("r>a").unwrap();
    assert!(!satisfies(&m, r, h, &a3.desugar()).unwrap());
}

fn boolean(atoms: u32, depth: u32) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        4 => (0..atoms).prop_map(|i| Formula::var(format!("a{i}"))),
        1 => Just(Formula::Bottom),
        1 => Just(Formula::Top),
    ];
    leaf.prop_recursive(depth, 48, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::implies(a, b)),
        ]
    })
}

fn truth(f: &Formula, row: u32) -> bool {
    match f {
        Formula::Var(v) => row >> v[1..].parse::<u32>().unwrap() & 1 == 1,
        Formula::Bottom => false,
        Formula::Top => true,
        Formula::Not(a) => !truth(a, row),
        Formula::And(a, b) => truth(a, row) && truth(b, row),
        Formula::Or(a, b) => truth(a, row) || truth(b, row),
        Formula::Implies(a, b) => !truth(a, row) || truth(b, row),
        other => panic!("not boolean: {other}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn tautology_oracle_matches_truth_tables(g in boolean(4, 5)) {
        let expected = (0..16u32).all(|row| truth(&g, row));
        prop_assert_eq!(is_tautology(&g), Some(expected));
        // a formula or its negation is never both tautologies
        prop_assert!(!(expected && is_tautology(&Formula::not(g.clone())) == Some(true)));
    }

    #[test]
    fn excluded_middle_instances_are_tautologies(g in boolean(4, 3)) {
        prop_assert_eq!(is_tautology(&Formula::or(g.clone(), Formula::not(g))), Some(true));
    }
}

#[test]
fn modal_subformulas_are_opaque_atoms() {
    assert_eq!(is_tautology(&f("[]p | ~[]p")), Some(true));
    assert_eq!(is_tautology(&f("[]p -> p")), Some(false));
    assert_eq!(is_tautology(&f("[1](p & q) -> [1](q & p)")), Some(false));
}
