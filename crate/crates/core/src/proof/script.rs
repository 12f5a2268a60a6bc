//! Proof scripts for the Hilbert system: axiom matching, checking, and the
//! line-oriented text format.
//!
//! A script line reads
//!
//! ```text
//! <idx>. <formula> ; <justification>
//! ```
//!
//! where the justification is one of `taut`, `ax:K(M)`, `ax:T(M)`,
//! `ax:5(M)`, `ax:A2([j])`, `ax:A3`, `mp <i> <j>` or `nec <i>`, and `M` is
//! `[]` or `[j]`. Blank lines and lines starting with `#` are ignored.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use super::taut;
use crate::syntax::{parse, Agent, Formula};

/// A normal S5 modality of the system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Modality {
    Settled,
    Agent(Agent),
}

impl Modality {
    pub fn apply(self, body: Formula) -> Formula {
        match self {
            Modality::Settled => Formula::boxed(body),
            Modality::Agent(j) => Formula::stit(j, body),
        }
    }

    /// The dual `~M~body`, written with `<>` or `<j>`.
    pub fn dual(self, body: Formula) -> Formula {
        match self {
            Modality::Settled => Formula::diamond(body),
            Modality::Agent(j) => Formula::stit_dual(j, body),
        }
    }

    /// The body of `f` if its top (core) constructor is this modality.
    fn strip(self, f: &Formula) -> Option<&Formula> {
        match (self, f) {
            (Modality::Settled, Formula::Boxed(a)) => Some(a),
            (Modality::Agent(j), Formula::Stit(k, a)) if j == *k => Some(a),
            _ => None,
        }
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Modality::Settled => write!(f, "[]"),
            Modality::Agent(j) => write!(f, "[{j}]"),
        }
    }
}

/// Axiom schemes. `Taut` stands for all classical tautologies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchemeId {
    Taut,
    K(Modality),
    T(Modality),
    Five(Modality),
    BoxToStit(Agent),
    Independence,
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeId::Taut => write!(f, "taut"),
            SchemeId::K(m) => write!(f, "ax:K({m})"),
            SchemeId::T(m) => write!(f, "ax:T({m})"),
            SchemeId::Five(m) => write!(f, "ax:5({m})"),
            SchemeId::BoxToStit(j) => write!(f, "ax:A2([{j}])"),
            SchemeId::Independence => write!(f, "ax:A3"),
        }
    }
}

/// The substitution under which a formula instantiates a scheme.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instantiation {
    Taut,
    /// Bindings for the scheme's metavariables `A`, `B`.
    Schematic(Vec<(&'static str, Formula)>),
    /// The agent/formula pairs of an independence instance, in order.
    Independence(Vec<(Agent, Formula)>),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum MatchError {
    #[error("not an instance of {scheme}: {reason}")]
    NoMatch { scheme: String, reason: String },
    #[error("independence instance repeats agent {0}; agents must be pairwise different")]
    DuplicateAgent(Agent),
    #[error("tautology check gave up: more than {} atoms", taut::MAX_ATOMS)]
    TooManyAtoms,
}

fn no_match(scheme: SchemeId, reason: &str) -> MatchError {
    MatchError::NoMatch {
        scheme: scheme.to_string(),
        reason: reason.to_string(),
    }
}

fn split_implies(f: &Formula) -> Option<(&Formula, &Formula)> {
    match f {
        Formula::Implies(a, b) => Some((a, b)),
        _ => None,
    }
}

/// `X -> false` in core form.
fn as_negation(f: &Formula) -> Option<&Formula> {
    match split_implies(f)? {
        (a, Formula::Bottom) => Some(a),
        _ => None,
    }
}

/// `~M~X` in core form.
fn as_dual(m: Modality, f: &Formula) -> Option<&Formula> {
    as_negation(f)
        .and_then(|inner| m.strip(inner))
        .and_then(as_negation)
}

/// `(X -> (Y -> false)) -> false` in core form.
fn as_conjunction(f: &Formula) -> Option<(&Formula, &Formula)> {
    let (x, rest) = split_implies(as_negation(f)?)?;
    Some((x, as_negation(rest)?))
}

/// Flattens a left-associated conjunction spine.
fn conjuncts(f: &Formula) -> Vec<&Formula> {
    match as_conjunction(f) {
        Some((left, right)) => {
            let mut items = conjuncts(left);
            items.push(right);
            items
        }
        None => vec![f],
    }
}

/// Checks whether `f` is an instance of `scheme`.
pub fn match_axiom(f: &Formula, scheme: SchemeId) -> Result<Instantiation, MatchError> {
    let core = f.desugar();
    let fail = |reason: &str| no_match(scheme, reason);
    match scheme {
        SchemeId::Taut => match taut::is_tautology(&core) {
            Some(true) => Ok(Instantiation::Taut),
            Some(false) => Err(fail("not a propositional tautology")),
            None => Err(MatchError::TooManyAtoms),
        },
        SchemeId::K(m) => {
            let (lhs, _) = split_implies(&core).ok_or_else(|| fail("not an implication"))?;
            let body = m.strip(lhs).ok_or_else(|| fail("antecedent lacks the modality"))?;
            let (a, b) = split_implies(body).ok_or_else(|| fail("modal body is not an implication"))?;
            let expected = Formula::implies(
                m.apply(Formula::implies(a.clone(), b.clone())),
                Formula::implies(m.apply(a.clone()), m.apply(b.clone())),
            );
            if expected == core {
                Ok(Instantiation::Schematic(vec![("A", a.clone()), ("B", b.clone())]))
            } else {
                Err(fail("shape M(A -> B) -> (MA -> MB) not met"))
            }
        }
        SchemeId::T(m) => {
            let (lhs, rhs) = split_implies(&core).ok_or_else(|| fail("not an implication"))?;
            let a = m.strip(lhs).ok_or_else(|| fail("antecedent lacks the modality"))?;
            if a == rhs {
                Ok(Instantiation::Schematic(vec![("A", a.clone())]))
            } else {
                Err(fail("consequent differs from the modal body"))
            }
        }
        SchemeId::Five(m) => {
            let (lhs, rhs) = split_implies(&core).ok_or_else(|| fail("not an implication"))?;
            let a = as_dual(m, lhs).ok_or_else(|| fail("antecedent is not a dual modality"))?;
            match m.strip(rhs) {
                Some(inner) if inner == lhs => {
                    Ok(Instantiation::Schematic(vec![("A", a.clone())]))
                }
                _ => Err(fail("consequent is not M applied to the antecedent")),
            }
        }
        SchemeId::BoxToStit(j) => {
            let (lhs, rhs) = split_implies(&core).ok_or_else(|| fail("not an implication"))?;
            let a = Modality::Settled
                .strip(lhs)
                .ok_or_else(|| fail("antecedent is not settled"))?;
            match Modality::Agent(j).strip(rhs) {
                Some(b) if a == b => Ok(Instantiation::Schematic(vec![("A", a.clone())])),
                _ => Err(fail("consequent is not the agent modality of the same body")),
            }
        }
        SchemeId::Independence => {
            let (lhs, rhs) = split_implies(&core).ok_or_else(|| fail("not an implication"))?;
            let inner = as_dual(Modality::Settled, rhs)
                .ok_or_else(|| fail("consequent is not possible"))?;
            let premises = conjuncts(lhs);
            let targets = conjuncts(inner);
            if premises.len() != targets.len() {
                return Err(fail("conjunct counts differ"));
            }
            let mut pairs = Vec::with_capacity(targets.len());
            let mut seen = BTreeSet::new();
            for (premise, target) in premises.iter().zip(&targets) {
                let Formula::Stit(j, body) = target else {
                    return Err(fail("consequent conjunct is not an agent modality"));
                };
                match as_dual(Modality::Settled, premise) {
                    Some(p) if p == *target => {}
                    _ => return Err(fail("antecedent conjunct is not <> of the matching [j]A")),
                }
                if !seen.insert(*j) {
                    return Err(MatchError::DuplicateAgent(*j));
                }
                pairs.push((*j, (**body).clone()));
            }
            Ok(Instantiation::Independence(pairs))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Justification {
    Axiom(SchemeId),
    /// `ModusPonens(i, j)`: line `i` is `X`, line `j` is `X -> this`.
    ModusPonens(usize, usize),
    Necessitation(usize),
}

impl fmt::Display for Justification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Justification::Axiom(s) => write!(f, "{s}"),
            Justification::ModusPonens(i, j) => write!(f, "mp {i} {j}"),
            Justification::Necessitation(i) => write!(f, "nec {i}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofLine {
    /// 1-based line number.
    pub index: usize,
    pub formula: Formula,
    pub justification: Justification,
}

/// A derivation of a theorem; every line is a theorem, no hypotheses.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProofScript {
    pub lines: Vec<ProofLine>,
}

impl ProofScript {
    pub fn conclusion(&self) -> Option<&Formula> {
        self.lines.last().map(|l| &l.formula)
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    /// Parses the text format.
    pub fn parse(text: &str) -> Result<ProofScript, ScriptSyntaxError> {
        let mut lines = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let err = |message: String| ScriptSyntaxError { line: line_no, message };
            let (head, just) = trimmed
                .rsplit_once(';')
                .ok_or_else(|| err("missing ';' before the justification".into()))?;
            let (idx, formula) = head
                .split_once('.')
                .ok_or_else(|| err("missing '<idx>.' prefix".into()))?;
            let index: usize = idx
                .trim()
                .parse()
                .map_err(|_| err(format!("bad line number '{}'", idx.trim())))?;
            let formula = parse(formula.trim()).map_err(|e| err(e.to_string()))?;
            let justification = parse_justification(just.trim()).map_err(err)?;
            lines.push(ProofLine {
                index,
                formula,
                justification,
            });
        }
        Ok(ProofScript { lines })
    }
}

impl fmt::Display for ProofScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in &self.lines {
            writeln!(f, "{}. {} ; {}", line.index, line.formula, line.justification)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("script line {line}: {message}")]
pub struct ScriptSyntaxError {
    pub line: usize,
    pub message: String,
}

fn parse_modality(text: &str) -> Result<Modality, String> {
    if text == "[]" {
        return Ok(Modality::Settled);
    }
    text.strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .and_then(|t| t.parse::<u32>().ok())
        .and_then(Agent::new)
        .map(Modality::Agent)
        .ok_or_else(|| format!("bad modality '{text}'"))
}

fn parse_justification(text: &str) -> Result<Justification, String> {
    let words: Vec<&str> = text.split_whitespace().collect();
    let num = |w: &str| w.parse::<usize>().map_err(|_| format!("bad line reference '{w}'"));
    match words.as_slice() {
        ["taut"] => Ok(Justification::Axiom(SchemeId::Taut)),
        ["ax:A3"] => Ok(Justification::Axiom(SchemeId::Independence)),
        ["mp", i, j] => Ok(Justification::ModusPonens(num(i)?, num(j)?)),
        ["nec", i] => Ok(Justification::Necessitation(num(i)?)),
        [ax] => {
            let (name, arg) = ax
                .strip_prefix("ax:")
                .and_then(|r| r.split_once('('))
                .and_then(|(n, rest)| Some((n, rest.strip_suffix(')')?)))
                .ok_or_else(|| format!("unknown justification '{text}'"))?;
            let m = parse_modality(arg)?;
            let scheme = match (name, m) {
                ("K", m) => SchemeId::K(m),
                ("T", m) => SchemeId::T(m),
                ("5", m) => SchemeId::Five(m),
                ("A2", Modality::Agent(j)) => SchemeId::BoxToStit(j),
                _ => return Err(format!("unknown justification '{text}'")),
            };
            Ok(Justification::Axiom(scheme))
        }
        _ => Err(format!("unknown justification '{text}'")),
    }
}

/// Why a script was rejected.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}: {reason}")]
pub struct ProofViolation {
    pub line: usize,
    pub reason: String,
}

/// Checks every line of a script. Lines must be numbered 1, 2, ... in order
/// and may only cite earlier lines.
pub fn check_proof(ps: &ProofScript) -> Result<(), ProofViolation> {
    if ps.lines.is_empty() {
        return Err(ProofViolation {
            line: 0,
            reason: "empty script".into(),
        });
    }
    let mut cores: Vec<Formula> = Vec::with_capacity(ps.lines.len());
    for (pos, line) in ps.lines.iter().enumerate() {
        let here = pos + 1;
        let violation = |reason: String| ProofViolation { line: here, reason };
        if line.index != here {
            return Err(violation(format!(
                "line numbered {} where {} was expected",
                line.index, here
            )));
        }
        let core = line.formula.desugar();
        let cited = |i: usize| -> Result<&Formula, ProofViolation> {
            if i == 0 || i >= here {
                Err(violation(format!("reference {i} is not an earlier line")))
            } else {
                Ok(&cores[i - 1])
            }
        };
        match line.justification {
            Justification::Axiom(scheme) => {
                match_axiom(&line.formula, scheme).map_err(|e| violation(e.to_string()))?;
            }
            Justification::ModusPonens(i, j) => {
                let minor = cited(i)?;
                let major = cited(j)?;
                let expected = Formula::implies(minor.clone(), core.clone());
                if *major != expected {
                    return Err(violation(format!(
                        "modus ponens needs line {j} to be line {i} -> this formula"
                    )));
                }
            }
            Justification::Necessitation(i) => {
                let body = cited(i)?;
                match &core {
                    Formula::Boxed(inner) if **inner == *body => {}
                    _ => {
                        return Err(violation(format!(
                            "necessitation needs this line to be [] applied to line {i}"
                        )))
                    }
                }
            }
        }
        cores.push(core);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::agent;

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn a2_instance_matches() {
        let inst = match_axiom(&f("[]p -> [3]p"), SchemeId::BoxToStit(agent(3))).unwrap();
        assert_eq!(inst, Instantiation::Schematic(vec![("A", f("p"))]));
        assert!(match_axiom(&f("[]p -> [2]p"), SchemeId::BoxToStit(agent(3))).is_err());
        assert!(match_axiom(&f("[]p -> [3]q"), SchemeId::BoxToStit(agent(3))).is_err());
    }

    #[test]
    fn independence_matches_distinct_agents() {
        let inst = match_axiom(
            &f("(<>[1]p & <>[2]q) -> <>([1]p & [2]q)"),
            SchemeId::Independence,
        )
        .unwrap();
        assert_eq!(
            inst,
            Instantiation::Independence(vec![(agent(1), f("p")), (agent(2), f("q"))])
        );
        let three = f("<>[1]p & <>[2]q & <>[3]~r -> <>([1]p & [2]q & [3]~r)");
        assert!(match_axiom(&three, SchemeId::Independence).is_ok());
        let single = f("<>[4]p -> <>[4]p");
        assert!(match_axiom(&single, SchemeId::Independence).is_ok());
    }

    #[test]
    fn independence_rejects_duplicate_agents() {
        let err = match_axiom(
            &f("(<>[1]p & <>[1]q) -> <>([1]p & [1]q)"),
            SchemeId::Independence,
        )
        .unwrap_err();
        assert_eq!(err, MatchError::DuplicateAgent(agent(1)));
    }

    #[test]
    fn independence_rejects_mismatched_bodies() {
        let bad = f("(<>[1]p & <>[2]q) -> <>([1]p & [2]r)");
        assert!(match_axiom(&bad, SchemeId::Independence).is_err());
        let reordered = f("(<>[1]p & <>[2]q) -> <>([2]q & [1]p)");
        assert!(match_axiom(&reordered, SchemeId::Independence).is_err());
    }

    #[test]
    fn s5_schemes() {
        let settled = Modality::Settled;
        let one = Modality::Agent(agent(1));
        assert!(match_axiom(&f("[](p -> q) -> []p -> []q"), SchemeId::K(settled)).is_ok());
        assert!(match_axiom(&f("[1](p -> q) -> [1]p -> [1]q"), SchemeId::K(one)).is_ok());
        assert!(match_axiom(&f("[1](p -> q) -> [1]p -> []q"), SchemeId::K(one)).is_err());
        assert!(match_axiom(&f("[1]p -> p"), SchemeId::T(one)).is_ok());
        assert!(match_axiom(&f("[1]p -> p"), SchemeId::T(settled)).is_err());
        assert!(match_axiom(&f("<>p -> []<>p"), SchemeId::Five(settled)).is_ok());
        assert!(match_axiom(&f("<1>p -> [1]<1>p"), SchemeId::Five(one)).is_ok());
        assert!(match_axiom(&f("~[1]~p -> [1]~[1]~p"), SchemeId::Five(one)).is_ok());
        assert!(match_axiom(&f("<1>p -> []<1>p"), SchemeId::Five(one)).is_err());
    }

    #[test]
    fn taut_line_script_is_accepted() {
        let ps = ProofScript::parse("1. p -> p ; taut\n").unwrap();
        assert_eq!(check_proof(&ps), Ok(()));
    }

    #[test]
    fn mp_of_line_with_itself_is_rejected() {
        let ps = ProofScript::parse("1. p ; taut\n2. p ; mp 1 1\n").unwrap();
        let err = check_proof(&ps).unwrap_err();
        // p is no tautology, so the first line already fails
        assert_eq!(err.line, 1);

        let ps = ProofScript::parse("1. p -> p ; taut\n2. p ; mp 1 1\n").unwrap();
        let err = check_proof(&ps).unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.reason.contains("modus ponens"));
    }

    #[test]
    fn dangling_and_forward_references() {
        let ps = ProofScript::parse("1. p -> p ; taut\n2. [](p -> p) ; nec 3\n").unwrap();
        assert_eq!(check_proof(&ps).unwrap_err().line, 2);
        let ps = ProofScript::parse("1. p -> p ; taut\n2. q ; mp 0 1\n").unwrap();
        assert_eq!(check_proof(&ps).unwrap_err().line, 2);
    }

    #[test]
    fn nec_and_mp_chain() {
        let text = "\
# settledness of a tautology, then T
1. p -> p ; taut
2. [](p -> p) ; nec 1
3. [](p -> p) -> p -> p ; ax:T([])
4. p -> p ; mp 2 3
";
        let ps = ProofScript::parse(text).unwrap();
        assert_eq!(check_proof(&ps), Ok(()));
        let bad = ProofScript::parse("1. p -> p ; taut\n2. [1](p -> p) ; nec 1\n").unwrap();
        assert!(check_proof(&bad).is_err());
    }

    #[test]
    fn text_format_round_trips() {
        let text = "1. p -> p ; taut\n2. [](p -> p) ; nec 1\n3. []p -> [2]p ; ax:A2([2])\n4. [2](p -> q) -> [2]p -> [2]q ; ax:K([2])\n5. <>p -> []<>p ; ax:5([])\n6. (<>[1]p & <>[2]q) -> <>([1]p & [2]q) ; ax:A3\n7. p -> p ; mp 1 1\n";
        let ps = ProofScript::parse(text).unwrap();
        assert_eq!(ps.to_string(), text.replace("(<>[1]p & <>[2]q) ->", "<>[1]p & <>[2]q ->"));
        assert_eq!(ProofScript::parse(&ps.to_string()).unwrap(), ps);
    }

    #[test]
    fn syntax_errors_name_the_line() {
        let err = ProofScript::parse("1. p -> p ; taut\n2. p -> ; taut\n").unwrap_err();
        assert_eq!(err.line, 2);
        let err = ProofScript::parse("1. p -> p ; ax:A2([])\n").unwrap_err();
        assert_eq!(err.line, 1);
        let err = ProofScript::parse("1. p -> p\n").unwrap_err();
        assert!(err.message.contains(';'));
    }
}
