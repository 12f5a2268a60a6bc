//! Incremental construction of proof scripts.
//!
//! Each tactic appends the lines it needs and returns the line number of
//! its conclusion. Propositional reasoning is discharged with one `taut`
//! line plus a modus ponens chain, so the tactics only spell out the modal
//! steps.

use std::collections::HashMap;

use super::script::{
    check_proof, match_axiom, Justification, Modality, ProofLine, ProofScript, SchemeId,
};
use super::ProofError;
use crate::syntax::{Agent, Formula};

#[derive(Debug, Default)]
pub struct ProofBuilder {
    lines: Vec<ProofLine>,
    proven: HashMap<Formula, usize>,
}

impl ProofBuilder {
    pub fn new() -> ProofBuilder {
        ProofBuilder::default()
    }

    /// Starts from an already-checked script; its lines keep their numbers.
    pub fn extend_checked(script: &ProofScript) -> Result<ProofBuilder, ProofError> {
        check_proof(script).map_err(ProofError::Premise)?;
        let mut b = ProofBuilder::new();
        for line in &script.lines {
            b.proven.entry(line.formula.desugar()).or_insert(line.index);
            b.lines.push(line.clone());
        }
        Ok(b)
    }

    pub fn formula(&self, line: usize) -> &Formula {
        &self.lines[line - 1].formula
    }

    pub fn finish(self) -> ProofScript {
        ProofScript { lines: self.lines }
    }

    /// Appends a line, or returns the existing line for the same theorem.
    fn push(&mut self, formula: Formula, justification: Justification) -> usize {
        let key = formula.desugar();
        if let Some(&line) = self.proven.get(&key) {
            return line;
        }
        let index = self.lines.len() + 1;
        self.lines.push(ProofLine {
            index,
            formula,
            justification,
        });
        self.proven.insert(key, index);
        index
    }

    /// Moves an already-proven formula to the end of the script so it can
    /// serve as the conclusion.
    pub fn conclude(&mut self, line: usize) -> Result<usize, ProofError> {
        if line == self.lines.len() {
            return Ok(line);
        }
        let f = self.formula(line).clone();
        let id = Formula::implies(f.clone(), f.clone());
        let id_line = self.taut(id)?;
        let index = self.lines.len() + 1;
        self.lines.push(ProofLine {
            index,
            formula: f,
            justification: Justification::ModusPonens(line, id_line),
        });
        Ok(index)
    }

    pub fn axiom(&mut self, formula: Formula, scheme: SchemeId) -> Result<usize, ProofError> {
        match_axiom(&formula, scheme).map_err(|e| ProofError::Builder(e.to_string()))?;
        Ok(self.push(formula, Justification::Axiom(scheme)))
    }

    pub fn taut(&mut self, formula: Formula) -> Result<usize, ProofError> {
        self.axiom(formula, SchemeId::Taut)
    }

    pub fn mp(&mut self, minor: usize, major: usize) -> Result<usize, ProofError> {
        let Formula::Implies(a, b) = self.formula(major).desugar() else {
            return Err(ProofError::Builder(format!("line {major} is not an implication")));
        };
        if *a != self.formula(minor).desugar() {
            return Err(ProofError::Builder(format!(
                "line {minor} is not the antecedent of line {major}"
            )));
        }
        // keep the notation of the major premise's consequent when it has one
        let consequent = match self.formula(major) {
            Formula::Implies(_, b) => (**b).clone(),
            _ => *b,
        };
        Ok(self.push(consequent, Justification::ModusPonens(minor, major)))
    }

    /// Derives `goal` from the given lines by propositional logic.
    pub fn prop(&mut self, premises: &[usize], goal: Formula) -> Result<usize, ProofError> {
        let premise_formulas: Vec<Formula> =
            premises.iter().map(|&i| self.formula(i).clone()).collect();
        let chain = Formula::imp_chain(premise_formulas, goal);
        let mut current = self.taut(chain)?;
        for &p in premises {
            current = self.mp(p, current)?;
        }
        Ok(current)
    }

    /// From `A` infer `MA`. For agent modalities this goes through
    /// `[]A` and `[]A -> [j]A`.
    pub fn nec(&mut self, m: Modality, line: usize) -> Result<usize, ProofError> {
        let body = self.formula(line).clone();
        let settled = self.push(
            Formula::boxed(body.clone()),
            Justification::Necessitation(line),
        );
        match m {
            Modality::Settled => Ok(settled),
            Modality::Agent(j) => {
                let ax = self.box_to_stit(j, body)?;
                self.mp(settled, ax)
            }
        }
    }

    pub fn box_to_stit(&mut self, j: Agent, body: Formula) -> Result<usize, ProofError> {
        self.axiom(
            Formula::implies(Formula::boxed(body.clone()), Formula::stit(j, body)),
            SchemeId::BoxToStit(j),
        )
    }

    pub fn k(&mut self, m: Modality, a: Formula, b: Formula) -> Result<usize, ProofError> {
        let f = Formula::implies(
            m.apply(Formula::implies(a.clone(), b.clone())),
            Formula::implies(m.apply(a), m.apply(b)),
        );
        self.axiom(f, SchemeId::K(m))
    }

    pub fn t(&mut self, m: Modality, a: Formula) -> Result<usize, ProofError> {
        self.axiom(Formula::implies(m.apply(a.clone()), a), SchemeId::T(m))
    }

    pub fn five(&mut self, m: Modality, a: Formula) -> Result<usize, ProofError> {
        let dual = m.dual(a);
        self.axiom(
            Formula::implies(dual.clone(), m.apply(dual)),
            SchemeId::Five(m),
        )
    }

    pub fn independence(&mut self, pairs: &[(Agent, Formula)]) -> Result<usize, ProofError> {
        let stits: Vec<Formula> = pairs
            .iter()
            .map(|(j, a)| Formula::stit(*j, a.clone()))
            .collect();
        let lhs = Formula::conj(stits.iter().cloned().map(Formula::diamond));
        let rhs = Formula::diamond(Formula::conj(stits));
        self.axiom(Formula::implies(lhs, rhs), SchemeId::Independence)
    }

    fn split(&self, line: usize) -> Result<(Formula, Formula), ProofError> {
        match self.formula(line) {
            Formula::Implies(a, b) => Ok(((**a).clone(), (**b).clone())),
            other => match other.desugar() {
                Formula::Implies(a, b) => Ok((*a, *b)),
                _ => Err(ProofError::Builder(format!(
                    "expected an implication, found {other}"
                ))),
            },
        }
    }

    /// From `X -> Y` infer `MX -> MY`.
    pub fn mono(&mut self, m: Modality, line: usize) -> Result<usize, ProofError> {
        let (x, y) = self.split(line)?;
        let boxed = self.nec(m, line)?;
        let k = self.k(m, x, y)?;
        self.mp(boxed, k)
    }

    /// From `X -> Y` infer `<M>X -> <M>Y`.
    pub fn dual_mono(&mut self, m: Modality, line: usize) -> Result<usize, ProofError> {
        let (x, y) = self.split(line)?;
        let contra = self.prop(
            &[line],
            Formula::implies(Formula::not(y.clone()), Formula::not(x.clone())),
        )?;
        let boxed = self.mono(m, contra)?;
        self.prop(&[boxed], Formula::implies(m.dual(x), m.dual(y)))
    }

    /// `M(X -> Y) -> (<M>X -> <M>Y)`.
    pub fn k_dual(&mut self, m: Modality, x: Formula, y: Formula) -> Result<usize, ProofError> {
        let contra = self.taut(Formula::implies(
            Formula::implies(x.clone(), y.clone()),
            Formula::implies(Formula::not(y.clone()), Formula::not(x.clone())),
        ))?;
        let lifted = self.mono(m, contra)?;
        let k = self.k(m, Formula::not(y.clone()), Formula::not(x.clone()))?;
        self.prop(
            &[lifted, k],
            Formula::implies(
                m.apply(Formula::implies(x.clone(), y.clone())),
                Formula::implies(m.dual(x), m.dual(y)),
            ),
        )
    }

    /// `A -> <M>A`, the dual of T.
    pub fn dual_t(&mut self, m: Modality, a: Formula) -> Result<usize, ProofError> {
        let t = self.t(m, Formula::not(a.clone()))?;
        self.prop(&[t], Formula::implies(a.clone(), m.dual(a)))
    }

    /// `MA -> MMA`, derived from K, T and 5.
    pub fn four(&mut self, m: Modality, a: Formula) -> Result<usize, ProofError> {
        let ma = m.apply(a.clone());
        let not_a = Formula::not(a.clone());
        let dn_elim = self.taut(Formula::implies(Formula::not(not_a.clone()), a.clone()))?;
        let dn_intro = self.taut(Formula::implies(a.clone(), Formula::not(not_a.clone())))?;
        let m_dn_elim = self.mono(m, dn_elim)?; // M~~A -> MA
        let m_dn_intro = self.mono(m, dn_intro)?; // MA -> M~~A
        let dual_not_a = m.dual(not_a.clone());
        let not_ma_to_dual =
            self.prop(&[m_dn_elim], Formula::implies(Formula::not(ma.clone()), dual_not_a.clone()))?;
        let five_not_a = self.five(m, not_a)?; // <M>~A -> M<M>~A
        let dual_to_not_ma =
            self.prop(&[m_dn_intro], Formula::implies(dual_not_a, Formula::not(ma.clone())))?;
        let lifted = self.mono(m, dual_to_not_ma)?; // M<M>~A -> M~MA
        let dual_ma = m.dual(ma.clone());
        let collapse = self.prop(
            &[not_ma_to_dual, five_not_a, lifted],
            Formula::implies(dual_ma.clone(), ma.clone()),
        )?; // <M>MA -> MA
        let lifted_collapse = self.mono(m, collapse)?; // M<M>MA -> MMA
        let intro = self.dual_t(m, ma.clone())?; // MA -> <M>MA
        let five_ma = self.five(m, ma.clone())?; // <M>MA -> M<M>MA
        self.prop(
            &[intro, five_ma, lifted_collapse],
            Formula::implies(ma.clone(), m.apply(ma)),
        )
    }

    /// `[]A -> [j][]A`.
    pub fn settled_to_stit_settled(&mut self, a: Formula, j: Agent) -> Result<usize, ProofError> {
        let four = self.four(Modality::Settled, a.clone())?;
        let settled = Formula::boxed(a);
        let a2 = self.box_to_stit(j, settled.clone())?;
        self.prop(
            &[four, a2],
            Formula::implies(settled.clone(), Formula::stit(j, settled)),
        )
    }

    /// Sanity check used by the public derivations before returning.
    pub fn finish_checked(self) -> Result<ProofScript, ProofError> {
        let script = self.finish();
        check_proof(&script).map_err(|v| ProofError::Builder(format!("emitted script rejected: {v}")))?;
        Ok(script)
    }
}
