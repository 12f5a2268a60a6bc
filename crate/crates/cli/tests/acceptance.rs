//! Acceptance suite: one PASS/FAIL line per criterion. Run with
//! `cargo test -p stit-cli --test acceptance`.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use stit::bisim::{atoms_only_agreement, is_bisimulation, FragmentBounds, HistoryRelation, PointedModel};
use stit::frames::{model_history_name, root_name, to_model, validity_up_to, ValidityVerdict};
use stit::paperlab::{
    antecedent, build_b, build_m, build_s, build_s_prime, consequent, interpolant_search, q_in_s,
    q_in_s_prime, reduct, FourTuple, InterpolationMode, SearchBounds, SearchOutcome, M_H0, M_H1,
    M_ROOT, ROOT_S, ROOT_S_PRIME,
};
use stit::proof::{check_proof, derive_counterexample, derive_s_counterexample, match_axiom, SchemeId};
use stit::random::{random_formula, random_model, FormulaParams, ModelParams};
use stit::semantics::{extension, satisfies_named, valid_in_model, validate, StitModel, Violation};
use stit::{agent, parse, Agent, Formula};

const MODELHOOD_LIMIT: Duration = Duration::from_secs(1);
const WITNESS_FACTS_LIMIT: Duration = Duration::from_secs(1);
const BISIMULATION_LIMIT: Duration = Duration::from_secs(5);
const PROOF_LIMIT: Duration = Duration::from_secs(30);
const VALIDITY_LIMIT: Duration = Duration::from_secs(60);
const REPRODUCE_LIMIT: Duration = Duration::from_secs(120);
const INTERPOLATION_LIMIT: Duration = Duration::from_secs(60);

const RANDOM_MODELS: u64 = 100;
const MAX_HISTORIES: usize = 6;
const TRANSFER_FORMULAS: u64 = 200;
const TRANSFER_DEPTH: usize = 3;
const SETTLED_SIZE: usize = 7;
const ROUND_TRIPS: u64 = 1000;
const VALIDITY_BOUND: usize = 3;
const COUNTERMODEL_BOUND: usize = 2;
const SIZE_BOUND: usize = 9;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn f(s: &str) -> Formula {
    parse(s).expect("fixed formula parses")
}

fn agents(n: u32) -> Vec<Agent> {
    (1..=n).map(agent).collect()
}

fn strings(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn modelhood() -> Check {
    let (s, s2) = (build_s(), build_s_prime());
    ensure(validate(&s).is_empty(), format!("S: {:?}", validate(&s)))?;
    ensure(validate(&s2).is_empty(), format!("S': {:?}", validate(&s2)))?;

    let target = FourTuple::new([1, 1, 1, 1], true).unwrap().history(ROOT_S);
    let mutate = |split_off: bool| {
        let mut spec = s.to_spec();
        let cells = spec
            .choice
            .get_mut(ROOT_S)
            .and_then(|c| c.get_mut(&agent(1)))
            .expect("agent 1 has cells at the root");
        for cell in cells.iter_mut() {
            cell.retain(|h| h != &target);
        }
        if split_off {
            cells.push(vec![target.clone()]);
        }
        StitModel::from_spec(&spec).expect("mutated model loads")
    };
    // removal from its cell, the history left uncovered
    let removed = validate(&mutate(false));
    ensure(
        removed.iter().any(|v| matches!(v, Violation::Partition { .. })),
        format!("plain removal not rejected: {removed:?}"),
    )?;
    // removal from its cell, the history kept as a cell of its own
    let split = validate(&mutate(true));
    let selector = split.iter().find_map(|v| match v {
        Violation::Independence { selector, .. } => Some(selector.clone()),
        _ => None,
    });
    let selector = selector.ok_or_else(|| format!("no IA violation: {split:?}"))?;
    ensure(!selector.is_empty(), "empty selector")?;
    let cells: Vec<String> = selector
        .iter()
        .map(|(j, cell)| format!("[{j}] {} histories", cell.len()))
        .collect();
    Ok(format!(
        "S, S' validate; removal gives {}; split-off gives IA with selector {}",
        removed[0].constraint(),
        cells.join(", ")
    ))
}

fn witness_facts() -> Check {
    let (s, s2) = (build_s(), build_s_prime());
    let (a, b) = (f("<>([1]p & [2](p -> q))"), f("<>([3]r & [4](r -> ~q))"));
    for m in FourTuple::all() {
        ensure(
            satisfies_named(&s, ROOT_S, &m.history(ROOT_S), &a).map_err(|e| e.to_string())?,
            format!("{a} fails at {m}"),
        )?;
        ensure(
            satisfies_named(&s2, ROOT_S_PRIME, &m.history(ROOT_S_PRIME), &b).map_err(|e| e.to_string())?,
            format!("{b} fails at {m}"),
        )?;
    }
    Ok(format!("both formulas hold at all {} histories", FourTuple::all().len()))
}

fn bisimulation() -> Check {
    let q = BTreeSet::from(["q".to_string()]);
    let (sq, s2q) = (
        reduct(&build_s(), &q).map_err(|e| e.to_string())?,
        reduct(&build_s_prime(), &q).map_err(|e| e.to_string())?,
    );
    let (l, r) = (
        PointedModel::new(&sq, ROOT_S).unwrap(),
        PointedModel::new(&s2q, ROOT_S_PRIME).unwrap(),
    );
    let b = build_b();
    is_bisimulation(l, r, &b, &q).map_err(|v| format!("B rejected: {v}"))?;
    let mut rejected = Vec::new();
    for class in [true, false] {
        let mut smaller = b.clone();
        smaller.pairs.retain(|(h, g)| {
            let (m, m1) = (tuple_of(h), tuple_of(g));
            !(q_in_s(&m) == class && q_in_s_prime(&m1) == class)
        });
        match is_bisimulation(l, r, &smaller, &q) {
            Ok(()) => return Err(format!("removing the q={class} pairing still passes")),
            Err(v) => rejected.push(format!("q={class}: {}", v.condition())),
        }
    }
    Ok(format!("B ({} pairs) passes; perturbations rejected ({})", b.len(), rejected.join(", ")))
}

fn tuple_of(history: &str) -> FourTuple {
    FourTuple::parse(history.split('>').nth(1).unwrap()).unwrap()
}

fn random_models(n_agents: u32) -> Vec<StitModel> {
    (0..RANDOM_MODELS)
        .map(|seed| {
            random_model(
                &mut ChaCha8Rng::seed_from_u64(seed),
                &ModelParams {
                    max_histories: MAX_HISTORIES,
                    agents: agents(n_agents),
                    vars: strings(&["p", "q", "r"]),
                    max_height: 3,
                },
            )
        })
        .collect()
}

fn proofs() -> Check {
    let (j1, j2, j3, j4) = (agent(1), agent(2), agent(3), agent(4));
    let four = derive_counterexample([j1, j2, j3, j4], ["p", "q", "r"]).map_err(|e| e.to_string())?;
    let two = derive_s_counterexample(j1, j2, "p").map_err(|e| e.to_string())?;
    check_proof(&four).map_err(|v| format!("four-agent script: {v}"))?;
    check_proof(&two).map_err(|v| format!("two-agent script: {v}"))?;
    let duplicate = f("(<>[1]p & <>[1]q) -> <>([1]p & [1]q)").desugar();
    ensure(
        match_axiom(&duplicate, SchemeId::Independence).is_err(),
        "independence matcher accepted a repeated agent",
    )?;
    let conclusions = [four.conclusion().unwrap(), two.conclusion().unwrap()];
    let models = random_models(4);
    for (i, m) in models.iter().enumerate() {
        ensure(validate(m).is_empty(), format!("random model {i} does not validate"))?;
        for c in conclusions {
            ensure(
                valid_in_model(m, c).map_err(|e| e.to_string())?,
                format!("{c} fails in random model {i}"),
            )?;
        }
    }
    Ok(format!(
        "scripts of {} and {} lines accepted; conclusions hold in {} random models",
        four.len(),
        two.len(),
        models.len()
    ))
}

fn bounded_validity() -> Check {
    let derived_formulas = [
        Formula::implies(
            antecedent(agent(1), agent(2), "p", "q"),
            consequent(agent(3), agent(4), "r", "q"),
        ),
        f("<>[1]p -> ~<>[2]~p"),
    ];
    for g in &derived_formulas {
        let v = validity_up_to(g, VALIDITY_BOUND).map_err(|e| e.to_string())?;
        ensure(
            v == ValidityVerdict::ValidUpTo { bound: VALIDITY_BOUND },
            format!("{g}: {v:?}"),
        )?;
    }
    let mut sizes = Vec::new();
    for text in ["p -> []p", "<>[1]p -> [][1]p"] {
        let g = f(text);
        match validity_up_to(&g, COUNTERMODEL_BOUND).map_err(|e| e.to_string())? {
            ValidityVerdict::Countermodel { frame, history } => {
                let m = to_model(&frame).map_err(|e| e.to_string())?;
                ensure(validate(&m).is_empty(), format!("{text}: countermodel does not validate"))?;
                let value = satisfies_named(&m, &root_name(&frame), &model_history_name(&frame, &history), &g)
                    .map_err(|e| e.to_string())?;
                ensure(!value, format!("{text}: countermodel does not refute"))?;
                sizes.push(frame.histories().len());
            }
            v => return Err(format!("{text}: {v:?}")),
        }
    }
    Ok(format!(
        "both derived formulas valid up to {VALIDITY_BOUND}; countermodels with {sizes:?} histories re-check"
    ))
}

fn reproduce() -> Check {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_stit"))
            .args(["reproduce", "--all", "--json"])
            .output()
            .map_err(|e| e.to_string())
    };
    let (first, second) = (run()?, run()?);
    ensure(first.status.code() == Some(0), format!("exit {:?}", first.status.code()))?;
    ensure(first.stdout == second.stdout, "outputs differ between runs")?;
    let v: Value = serde_json::from_slice(&first.stdout).map_err(|e| e.to_string())?;
    let certs = v["certificates"].as_array().ok_or("no certificates")?;
    ensure(certs.len() == 2, format!("{} certificates", certs.len()))?;
    for c in certs {
        ensure(c["verdict"] == "certified", format!("{}: {}", c["claim"], c["verdict"]))?;
    }
    Ok("both certificates certified, byte-identical across two runs".into())
}

fn transfer() -> Check {
    let q = BTreeSet::from(["q".to_string()]);
    let (sq, s2q) = (
        reduct(&build_s(), &q).map_err(|e| e.to_string())?,
        reduct(&build_s_prime(), &q).map_err(|e| e.to_string())?,
    );
    let (root, root2) = (sq.moment(ROOT_S).unwrap(), s2q.moment(ROOT_S_PRIME).unwrap());
    let b = build_b();
    let params = FormulaParams {
        vars: strings(&["q"]),
        agents: agents(4),
        max_depth: TRANSFER_DEPTH,
        sugar: true,
    };
    for seed in 0..TRANSFER_FORMULAS {
        let g = random_formula(&mut ChaCha8Rng::seed_from_u64(seed), &params);
        let (el, er) = (
            extension(&sq, root, &g).map_err(|e| e.to_string())?,
            extension(&s2q, root2, &g).map_err(|e| e.to_string())?,
        );
        for (h, h2) in &b.pairs {
            ensure(
                el.contains(&sq.history(h).unwrap()) == er.contains(&s2q.history(h2).unwrap()),
                format!("{g} disagrees at ({h}, {h2})"),
            )?;
        }
    }

    let (m1, m2) = (build_m(agent(1), "p"), build_m(agent(2), "p"));
    let diagonal = HistoryRelation::new([
        (M_H0.to_string(), M_H0.to_string()),
        (M_H1.to_string(), M_H1.to_string()),
    ]);
    let p = BTreeSet::from(["p".to_string()]);
    let report = atoms_only_agreement(
        PointedModel::new(&m1, M_ROOT).unwrap(),
        PointedModel::new(&m2, M_ROOT).unwrap(),
        &diagonal,
        &p,
        FragmentBounds {
            max_size: SETTLED_SIZE,
            max_depth: SETTLED_SIZE,
        },
    )
    .map_err(|e| e.to_string())?;
    ensure(report.counterexample.is_none(), format!("{:?}", report.counterexample))?;
    Ok(format!(
        "{TRANSFER_FORMULAS} q-formulas agree on {} pairs; {} settled p-formulas agree on the diagonal",
        b.len(),
        report.formulas
    ))
}

fn interpolation() -> Check {
    let bounds = SearchBounds {
        size_bound: SIZE_BOUND,
        frame_bound: VALIDITY_BOUND,
    };
    let opts = Default::default();
    let (a, b) = (f("<>[1]p"), f("~<>[2]~p"));
    let found = interpolant_search(&a, &b, InterpolationMode::Rcip, bounds, &opts).map_err(|e| e.to_string())?;
    let w = found.found().ok_or("no interpolant in rcip mode")?.clone();
    ensure(w.size <= SIZE_BOUND, format!("size {}", w.size))?;
    ensure(w.formula.vocabulary().vars.iter().all(|v| v == "p"), "foreign variable")?;
    for g in [
        Formula::implies(a.clone(), w.formula.clone()),
        Formula::implies(w.formula.clone(), b.clone()),
    ] {
        let v = validity_up_to(&g, VALIDITY_BOUND).map_err(|e| e.to_string())?;
        ensure(v.is_valid(), format!("{g} not valid: {v:?}"))?;
    }
    let strong = interpolant_search(&a, &b, InterpolationMode::Srcip, bounds, &opts).map_err(|e| e.to_string())?;
    ensure(
        strong == SearchOutcome::NotFoundUpTo { size_bound: SIZE_BOUND },
        format!("srcip: {strong:?}"),
    )?;
    let prop = interpolant_search(&f("p & q"), &f("q | r"), InterpolationMode::Rcip, bounds, &opts)
        .map_err(|e| e.to_string())?;
    ensure(
        prop.found().map(|w| &w.formula) == Some(&f("q")),
        format!("propositional: {prop:?}"),
    )?;
    Ok(format!("rcip: {} (size {}); srcip: not found up to {SIZE_BOUND}; p & q / q | r: q", w.formula, w.size))
}

fn round_trip() -> Check {
    let params = FormulaParams {
        vars: strings(&["p", "q", "r", "long_name", "x1"]),
        agents: agents(12),
        max_depth: 6,
        sugar: true,
    };
    for seed in 0..ROUND_TRIPS {
        let g = random_formula(&mut ChaCha8Rng::seed_from_u64(seed), &params);
        let text = g.to_string();
        let back = parse(&text).map_err(|e| format!("{text}: {e}"))?;
        ensure(back == g, format!("{text} reparses as {back}"))?;
    }
    Ok(format!("{ROUND_TRIPS} formulas print and reparse identically"))
}

fn main() -> ExitCode {
    type Criterion = (&'static str, Option<Duration>, fn() -> Check);
    let criteria: [Criterion; 9] = [
        ("modelhood of the tuple models", Some(MODELHOOD_LIMIT), modelhood),
        ("witness facts at every history", Some(WITNESS_FACTS_LIMIT), witness_facts),
        ("bisimulation of the q-reducts", Some(BISIMULATION_LIMIT), bisimulation),
        ("proof layer", Some(PROOF_LIMIT), proofs),
        ("bounded validity", Some(VALIDITY_LIMIT), bounded_validity),
        ("certificates via reproduce --all", Some(REPRODUCE_LIMIT), reproduce),
        ("transfer properties", None, transfer),
        ("interpolation search", Some(INTERPOLATION_LIMIT), interpolation),
        ("parser round trip", None, round_trip),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.into_iter().enumerate() {
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = started.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(limit)) if elapsed > limit => Err(format!("took {elapsed:?}, limit {limit:?}")),
            (o, _) => o,
        };
        let limit = limit.map_or("none".to_string(), |l| format!("{l:?}"));
        match outcome {
            Ok(detail) => println!("PASS {} {name} [{elapsed:.2?}, limit {limit}]: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name} [{elapsed:.2?}, limit {limit}]: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
