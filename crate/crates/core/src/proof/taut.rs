//! Truth-table oracle for classical propositional tautologies.
//!
//! Modal subformulas (`[]A`, `[j]A`) and variables are treated as opaque
//! atoms. Atoms are compared after desugaring, so `[]~p` and
//! `[](p -> false)` are the same atom.

use std::collections::HashMap;

use crate::syntax::Formula;

/// Columns 0..6 of a 64-row truth table, one bit per row.
const LANES: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

/// Refuses tables beyond this many atoms.
pub const MAX_ATOMS: usize = 24;

enum Node {
    Atom(usize),
    Bottom,
    Implies(Box<Node>, Box<Node>),
}

fn compile(f: &Formula, atoms: &mut HashMap<Formula, usize>) -> Node {
    match f {
        Formula::Bottom => Node::Bottom,
        Formula::Implies(a, b) => {
            Node::Implies(Box::new(compile(a, atoms)), Box::new(compile(b, atoms)))
        }
        other => {
            let next = atoms.len();
            Node::Atom(*atoms.entry(other.clone()).or_insert(next))
        }
    }
}

fn eval(node: &Node, columns: &[u64]) -> u64 {
    match node {
        Node::Atom(i) => columns[*i],
        Node::Bottom => 0,
        Node::Implies(a, b) => !eval(a, columns) | eval(b, columns),
    }
}

/// Number of distinct propositional atoms in the formula.
pub fn atom_count(f: &Formula) -> usize {
    let mut atoms = HashMap::new();
    compile(&f.desugar(), &mut atoms);
    atoms.len()
}

/// Decides whether `f` is a propositional tautology. Returns `None` when the
/// formula has more than [`MAX_ATOMS`] atoms.
pub fn is_tautology(f: &Formula) -> Option<bool> {
    let mut atoms = HashMap::new();
    let node = compile(&f.desugar(), &mut atoms);
    let k = atoms.len();
    if k > MAX_ATOMS {
        return None;
    }
    let rows = 1u64 << k;
    let live = if rows >= 64 { u64::MAX } else { (1u64 << rows) - 1 };
    let blocks = if k > 6 { 1u64 << (k - 6) } else { 1 };
    let mut columns = vec![0u64; k];
    for block in 0..blocks {
        for (i, col) in columns.iter_mut().enumerate() {
            *col = if i < 6 {
                LANES[i]
            } else if block >> (i - 6) & 1 == 1 {
                u64::MAX
            } else {
                0
            };
        }
        if eval(&node, &columns) & live != live {
            return Some(false);
        }
    }
    Some(true)
}
