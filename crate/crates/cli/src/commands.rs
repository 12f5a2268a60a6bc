use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;
use serde_json::{json, Value};
use stit::bisim::{is_bisimulation, max_bisimulation, HistoryRelation, PointedModel};
use stit::frames::{
    model_history_name, root_name, sat_search_with, to_model, validity_up_to_with, ChoiceFrame,
    SearchOptions, SearchVerdict, ValidityVerdict,
};
use stit::paperlab::{
    build_b, build_m, build_s, build_s_prime, certify_negative, certify_strong_negative,
    interpolant_search, is_separable_bounded, Certificate, InterpolationMode, PaperlabError,
    SearchBounds, SearchOutcome,
};
use stit::proof::{
    check_proof, derive_counterexample, derive_s_counterexample, derive_technical2,
    derive_technical3, settled_to_stit_settled, ProofScript,
};
use stit::semantics::{refuting_pair, satisfies_named, validate, ModelSpec, StitModel};
use stit::{agent, parse, Agent, Formula};

use crate::{Bound, Cli, Command, Derivation, Mode, Pair, Report, Source};

pub fn run(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Parse { formula } => parse_cmd(formula),
        Command::Mc {
            source,
            moment,
            history,
            formula,
        } => mc(source, moment.as_deref(), history.as_deref(), formula),
        Command::ValidateModel { source } => validate_cmd(source),
        Command::Sat { formula, bound } => sat(formula, bound, cli.workers),
        Command::Valid { formula, bound } => valid(formula, bound, cli.workers),
        Command::Bisim { pair, relation } => bisim(pair, relation),
        Command::Maxbisim { pair } => maxbisim(pair),
        Command::Prove { script } => prove(script),
        Command::Derive {
            which,
            agents,
            vars,
            formula,
            script,
        } => derive(*which, agents.as_deref(), vars.as_deref(), formula, script.as_deref()),
        Command::Interpolate {
            formula,
            mode,
            size_bound,
            bound,
        } => interpolate(formula, *mode, *size_bound, bound, cli.workers),
        Command::Separate {
            gamma,
            delta,
            size_bound,
            bound,
        } => separate(gamma, delta, *size_bound, bound, cli.workers),
        Command::Reproduce {
            all,
            negative,
            strong,
            dump,
        } => {
            let none = !all && !negative && !strong;
            reproduce(*all || none || *negative, *all || none || *strong, dump.as_deref())
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn formula(text: &str) -> Result<Formula> {
    parse(text).with_context(|| format!("cannot parse formula '{text}'"))
}

fn load_model(path: &Path) -> Result<StitModel> {
    let spec: ModelSpec = serde_json::from_str(&read(path)?)
        .with_context(|| format!("{} is not a model file", path.display()))?;
    StitModel::from_spec(&spec).with_context(|| format!("{} is not a well-formed model", path.display()))
}

fn load_frame(path: &Path) -> Result<ChoiceFrame> {
    serde_json::from_str(&read(path)?).with_context(|| format!("{} is not a frame file", path.display()))
}

/// The model named by `--model` or `--frame`, and the frame if any.
fn load_source(source: &Source) -> Result<(StitModel, Option<ChoiceFrame>)> {
    match (&source.model, &source.frame) {
        (Some(m), None) => Ok((load_model(m)?, None)),
        (None, Some(f)) => {
            let frame = load_frame(f)?;
            let model = to_model(&frame).context("frame cannot be turned into a model")?;
            Ok((model, Some(frame)))
        }
        _ => bail!("exactly one of --model and --frame is required"),
    }
}

fn list(text: &str) -> Vec<String> {
    text.split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

fn agents(text: Option<&str>, default: &[u32]) -> Result<Vec<Agent>> {
    match text {
        None => Ok(default.iter().map(|&j| agent(j)).collect()),
        Some(t) => list(t)
            .iter()
            .map(|s| {
                s.parse::<u32>()
                    .ok()
                    .and_then(Agent::new)
                    .ok_or_else(|| anyhow!("'{s}' is not a positive agent number"))
            })
            .collect(),
    }
}

fn options(bound: &Bound, workers: usize) -> SearchOptions {
    SearchOptions {
        workers: workers.max(1),
        allow_large: bound.large,
        ..SearchOptions::default()
    }
}

fn to_json<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("serializable")
}

fn pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable")
}

fn parse_cmd(text: &str) -> Result<Report> {
    let f = formula(text)?;
    let core = f.desugar();
    let voc = f.vocabulary();
    Ok(Report {
        positive: true,
        text: format!("{f}\ncore: {core}\n"),
        json: json!({
            "formula": f.to_string(),
            "core": core.to_string(),
            "size": core.size(),
            "modal_depth": core.modal_depth(),
            "vocabulary": to_json(&voc),
        }),
    })
}

fn mc(source: &Source, moment: Option<&str>, history: Option<&str>, text: &str) -> Result<Report> {
    let (model, frame) = load_source(source)?;
    let f = formula(text)?;
    match (moment, history) {
        (None, None) => {
            let refuted = refuting_pair(&model, &f)?;
            let json = json!({
                "formula": f.to_string(),
                "valid_in_model": refuted.is_none(),
                "refuting_pair": refuted.map(|(m, h)| json!({
                    "moment": model.moment_name(m),
                    "history": model.history_name(h),
                })),
            });
            let text = match refuted {
                None => "valid in model\n".to_string(),
                Some((m, h)) => format!(
                    "not valid in model: false at ({}, {})\n",
                    model.moment_name(m),
                    model.history_name(h)
                ),
            };
            Ok(Report {
                positive: refuted.is_none(),
                text,
                json,
            })
        }
        (_, Some(h)) => {
            let (moment, history) = match &frame {
                Some(fr) => (
                    moment.map(str::to_string).unwrap_or_else(|| root_name(fr)),
                    if h.contains('>') {
                        h.to_string()
                    } else {
                        model_history_name(fr, h)
                    },
                ),
                None => (
                    moment
                        .ok_or_else(|| anyhow!("--history needs --moment for model files"))?
                        .to_string(),
                    h.to_string(),
                ),
            };
            let value = satisfies_named(&model, &moment, &history, &f)?;
            Ok(Report {
                positive: value,
                text: format!("{value}\n"),
                json: json!({
                    "formula": f.to_string(),
                    "moment": moment,
                    "history": history,
                    "value": value,
                }),
            })
        }
        (Some(_), None) => bail!("--moment needs --history"),
    }
}

fn validate_cmd(source: &Source) -> Result<Report> {
    let (model, _) = load_source(source)?;
    let violations = validate(&model);
    let text = if violations.is_empty() {
        "ok\n".to_string()
    } else {
        violations.iter().map(|v| format!("{v}\n")).collect()
    };
    Ok(Report {
        positive: violations.is_empty(),
        text,
        json: json!({ "ok": violations.is_empty(), "violations": to_json(&violations) }),
    })
}

fn sat(text: &str, bound: &Bound, workers: usize) -> Result<Report> {
    let f = formula(text)?;
    let verdict = sat_search_with(&f, bound.bound, &options(bound, workers))?;
    let text = match &verdict {
        SearchVerdict::Satisfiable { frame, history } => {
            format!("satisfiable at {history}\n{}\n", pretty(frame))
        }
        SearchVerdict::NoModelUpTo { bound } => format!("no model with at most {bound} histories\n"),
    };
    Ok(Report {
        positive: verdict.is_satisfiable(),
        text,
        json: to_json(&verdict),
    })
}

fn valid(text: &str, bound: &Bound, workers: usize) -> Result<Report> {
    let f = formula(text)?;
    let verdict = validity_up_to_with(&f, bound.bound, &options(bound, workers))?;
    let text = match &verdict {
        ValidityVerdict::ValidUpTo { bound } => format!("valid up to {bound} histories\n"),
        ValidityVerdict::Countermodel { frame, history } => {
            format!("countermodel at {history}\n{}\n", pretty(frame))
        }
    };
    Ok(Report {
        positive: verdict.is_valid(),
        text,
        json: to_json(&verdict),
    })
}

fn root_of(model: &StitModel) -> Result<String> {
    model
        .moment_ids()
        .find(|&m| model.moment_ids().all(|x| model.leq(m, x)))
        .map(|m| model.moment_name(m).to_string())
        .ok_or_else(|| anyhow!("model has no least moment; pass --left/--right"))
}

fn load_pair(pair: &Pair) -> Result<(StitModel, StitModel, String, String, BTreeSet<String>)> {
    let [l, r] = pair.models.as_slice() else {
        bail!("exactly two --model files are required");
    };
    let (l, r) = (load_model(l)?, load_model(r)?);
    let lm = pair.left.clone().map_or_else(|| root_of(&l), Ok)?;
    let rm = pair.right.clone().map_or_else(|| root_of(&r), Ok)?;
    let vars = match &pair.vars {
        Some(v) => list(v).into_iter().collect(),
        None => l.vars().union(&r.vars()).cloned().collect(),
    };
    Ok((l, r, lm, rm, vars))
}

fn bisim(pair: &Pair, relation: &Path) -> Result<Report> {
    let (l, r, lm, rm, vars) = load_pair(pair)?;
    let rel: HistoryRelation = serde_json::from_str(&read(relation)?)
        .with_context(|| format!("{} is not a relation file", relation.display()))?;
    let outcome = is_bisimulation(PointedModel::new(&l, &lm)?, PointedModel::new(&r, &rm)?, &rel, &vars);
    Ok(match outcome {
        Ok(()) => Report {
            positive: true,
            text: format!("bisimulation ({} pairs)\n", rel.len()),
            json: json!({ "bisimulation": true, "pairs": rel.len() }),
        },
        Err(v) => Report {
            positive: false,
            text: format!("not a bisimulation: {v}\n"),
            json: json!({ "bisimulation": false, "violation": to_json(&v) }),
        },
    })
}

fn maxbisim(pair: &Pair) -> Result<Report> {
    let (l, r, lm, rm, vars) = load_pair(pair)?;
    let (pl, pr) = (PointedModel::new(&l, &lm)?, PointedModel::new(&r, &rm)?);
    let max = max_bisimulation(pl, pr, &vars)?;
    let total = is_bisimulation(pl, pr, &max, &vars).is_ok();
    let mut text: String = max.pairs.iter().map(|(a, b)| format!("{a} {b}\n")).collect();
    text.push_str(&format!(
        "{} pairs, {}\n",
        max.len(),
        if total { "total" } else { "not total" }
    ));
    Ok(Report {
        positive: total,
        text,
        json: json!({ "relation": to_json(&max), "total": total }),
    })
}

fn load_script(path: &Path) -> Result<ProofScript> {
    ProofScript::parse(&read(path)?).with_context(|| format!("cannot parse {}", path.display()))
}

fn prove(path: &Path) -> Result<Report> {
    let script = load_script(path)?;
    let conclusion = script.conclusion().map(|f| f.to_string());
    Ok(match check_proof(&script) {
        Ok(()) => Report {
            positive: true,
            text: format!("accepted: {}\n", conclusion.as_deref().unwrap_or("(empty)")),
            json: json!({ "accepted": true, "lines": script.len(), "conclusion": conclusion }),
        },
        Err(v) => Report {
            positive: false,
            text: format!("rejected: {v}\n"),
            json: json!({ "accepted": false, "line": v.line, "reason": v.reason }),
        },
    })
}

fn derive(
    which: Derivation,
    agent_list: Option<&str>,
    vars: Option<&str>,
    formulas: &[String],
    premise: Option<&Path>,
) -> Result<Report> {
    let formulas: Vec<Formula> = formulas.iter().map(|t| formula(t)).collect::<Result<_>>()?;
    let premise = || -> Result<ProofScript> {
        load_script(premise.ok_or_else(|| anyhow!("--script with the premise proof is required"))?)
    };
    let script = match which {
        Derivation::Counterexample => {
            let js = agents(agent_list, &[1, 2, 3, 4])?;
            let vs = vars.map(list).unwrap_or_else(|| vec!["p".into(), "q".into(), "r".into()]);
            let (js, vs): ([Agent; 4], [String; 3]) = (
                js.try_into().map_err(|_| anyhow!("need exactly four agents"))?,
                vs.try_into().map_err(|_| anyhow!("need exactly three variables"))?,
            );
            derive_counterexample(js, [&vs[0], &vs[1], &vs[2]].map(String::as_str))?
        }
        Derivation::SCounterexample => {
            let js = agents(agent_list, &[1, 2])?;
            let vs = vars.map(list).unwrap_or_else(|| vec!["p".into()]);
            let ([j1, j2], [v]) = (
                <[Agent; 2]>::try_from(js).map_err(|_| anyhow!("need exactly two agents"))?,
                <[String; 1]>::try_from(vs).map_err(|_| anyhow!("need exactly one variable"))?,
            );
            derive_s_counterexample(j1, j2, &v)?
        }
        Derivation::Settled => {
            let [j] = <[Agent; 1]>::try_from(agents(agent_list, &[1])?)
                .map_err(|_| anyhow!("need exactly one agent"))?;
            let [a] = <[Formula; 1]>::try_from(formulas).map_err(|_| anyhow!("need one formula A"))?;
            settled_to_stit_settled(&a, j)?
        }
        Derivation::Technical2 => {
            let js = agents(agent_list, &[])?;
            if formulas.len() < 2 || js.len() + 1 != formulas.len() {
                bail!("need formulas A, B1..Bn, C and agents i1..in, j");
            }
            let (a, c) = (&formulas[0], &formulas[formulas.len() - 1]);
            let bs: Vec<(Agent, Formula)> = js[..js.len() - 1]
                .iter()
                .copied()
                .zip(formulas[1..formulas.len() - 1].iter().cloned())
                .collect();
            derive_technical2(a, &bs, c, js[js.len() - 1], &premise()?)?
        }
        Derivation::Technical3 => {
            let [j] = <[Agent; 1]>::try_from(agents(agent_list, &[1])?)
                .map_err(|_| anyhow!("need exactly one agent"))?;
            let [a, b, c] =
                <[Formula; 3]>::try_from(formulas).map_err(|_| anyhow!("need formulas A, B, C"))?;
            derive_technical3(&a, &b, &c, j, &premise()?)?
        }
    };
    check_proof(&script).map_err(|v| anyhow!("derived script rejected: {v}"))?;
    let conclusion = script.conclusion().map(|f| f.to_string());
    Ok(Report {
        positive: true,
        text: script.to_string(),
        json: json!({
            "conclusion": conclusion,
            "lines": script.len(),
            "script": script.to_string(),
        }),
    })
}

fn outcome_report(outcome: Result<SearchOutcome, PaperlabError>, size_bound: usize) -> Result<Report> {
    match outcome {
        Ok(SearchOutcome::Found(w)) => Ok(Report {
            positive: true,
            text: format!("found: {} (size {}, re-verified at {:?})\n", w.formula, w.size, w.reverified),
            json: json!({
                "outcome": "found",
                "formula": w.formula.to_string(),
                "size": w.size,
                "reverified": w.reverified,
            }),
        }),
        Ok(SearchOutcome::NotFoundUpTo { size_bound }) => Ok(Report {
            positive: false,
            text: format!("not found up to size {size_bound}\n"),
            json: json!({ "outcome": "not_found", "size_bound": size_bound }),
        }),
        Err(PaperlabError::NotValid {
            formula,
            history,
            frame,
        }) => Ok(Report {
            positive: false,
            text: format!("{formula} is not valid up to the frame bound: countermodel at {history}\n{frame}\n"),
            json: json!({
                "outcome": "not_valid",
                "formula": formula,
                "history": history,
                "frame": frame,
                "size_bound": size_bound,
            }),
        }),
        Err(e) => Err(e.into()),
    }
}

fn interpolate(texts: &[String], mode: Mode, size_bound: usize, bound: &Bound, workers: usize) -> Result<Report> {
    let [a, b] = texts else {
        bail!("interpolate takes exactly two --formula values, A then B");
    };
    let (a, b) = (formula(a)?, formula(b)?);
    let mode = match mode {
        Mode::Rcip => InterpolationMode::Rcip,
        Mode::Srcip => InterpolationMode::Srcip,
    };
    let bounds = SearchBounds {
        size_bound,
        frame_bound: bound.bound,
    };
    outcome_report(
        interpolant_search(&a, &b, mode, bounds, &options(bound, workers)),
        size_bound,
    )
}

fn separate(gamma: &[String], delta: &[String], size_bound: usize, bound: &Bound, workers: usize) -> Result<Report> {
    let gamma: Vec<Formula> = gamma.iter().map(|t| formula(t)).collect::<Result<_>>()?;
    let delta: Vec<Formula> = delta.iter().map(|t| formula(t)).collect::<Result<_>>()?;
    let bounds = SearchBounds {
        size_bound,
        frame_bound: bound.bound,
    };
    outcome_report(
        is_separable_bounded(&gamma, &delta, bounds, &options(bound, workers)),
        size_bound,
    )
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, pretty(value) + "\n").with_context(|| format!("cannot write {}", path.display()))
}

fn dump(dir: &Path, certificates: &[Certificate]) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    write_json(dir, "s.json", &build_s().to_spec())?;
    write_json(dir, "s_prime.json", &build_s_prime().to_spec())?;
    write_json(dir, "b.json", &build_b())?;
    write_json(dir, "m_1.json", &build_m(agent(1), "p").to_spec())?;
    write_json(dir, "m_2.json", &build_m(agent(2), "p").to_spec())?;
    let proofs = [
        (
            "counterexample.prf",
            derive_counterexample([agent(1), agent(2), agent(3), agent(4)], ["p", "q", "r"])?,
        ),
        ("s_counterexample.prf", derive_s_counterexample(agent(1), agent(2), "p")?),
    ];
    for (name, script) in proofs {
        let path = dir.join(name);
        fs::write(&path, script.to_string()).with_context(|| format!("cannot write {}", path.display()))?;
    }
    write_json(dir, "certificates.json", &certificates)
}

fn reproduce(negative: bool, strong: bool, dir: Option<&Path>) -> Result<Report> {
    let mut certificates = Vec::new();
    if negative {
        certificates.push(certify_negative());
    }
    if strong {
        certificates.push(certify_strong_negative());
    }
    if let Some(dir) = dir {
        dump(dir, &certificates)?;
    }
    let positive = certificates.iter().all(Certificate::is_certified);
    let text = certificates
        .iter()
        .map(|c| format!("{c}\n"))
        .collect::<Vec<_>>()
        .join("\n");
    Ok(Report {
        positive,
        text,
        json: json!({
            "certificates": to_json(&certificates),
            "verdict": if positive { "certified" } else { "failed" },
        }),
    })
}
