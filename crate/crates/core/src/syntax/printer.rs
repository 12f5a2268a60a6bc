use std::fmt;

use super::formula::Formula;

// Binding strength, loosest first.
const IMPL: u8 = 0;
const OR: u8 = 1;
const AND: u8 = 2;
const UNARY: u8 = 3;

fn level(f: &Formula) -> u8 {
    match f {
        Formula::Implies(..) => IMPL,
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        _ => UNARY,
    }
}

fn write_at(out: &mut fmt::Formatter<'_>, f: &Formula, ctx: u8) -> fmt::Result {
    let parens = level(f) < ctx;
    if parens {
        out.write_str("(")?;
    }
    match f {
        Formula::Var(p) => out.write_str(p)?,
        Formula::Bottom => out.write_str("false")?,
        Formula::Top => out.write_str("true")?,
        Formula::Not(a) => {
            out.write_str("~")?;
            write_at(out, a, UNARY)?;
        }
        Formula::Boxed(a) => {
            out.write_str("[]")?;
            write_at(out, a, UNARY)?;
        }
        Formula::Diamond(a) => {
            out.write_str("<>")?;
            write_at(out, a, UNARY)?;
        }
        Formula::Stit(j, a) => {
            write!(out, "[{j}]")?;
            write_at(out, a, UNARY)?;
        }
        Formula::StitDual(j, a) => {
            write!(out, "<{j}>")?;
            write_at(out, a, UNARY)?;
        }
        Formula::Deliberative(j, a) => {
            write!(out, "[d:{j}]")?;
            write_at(out, a, UNARY)?;
        }
        Formula::And(a, b) => {
            write_at(out, a, AND)?;
            out.write_str(" & ")?;
            write_at(out, b, UNARY)?;
        }
        Formula::Or(a, b) => {
            write_at(out, a, OR)?;
            out.write_str(" | ")?;
            write_at(out, b, AND)?;
        }
        Formula::Implies(a, b) => {
            write_at(out, a, OR)?;
            out.write_str(" -> ")?;
            write_at(out, b, IMPL)?;
        }
    }
    if parens {
        out.write_str(")")?;
    }
    Ok(())
}

/// Prints with the fewest parentheses the grammar allows.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_at(f, self, IMPL)
    }
}
