//! Canonical printing. The output is valid input for the parser and is
//! identical for identical canonical forms.

use std::fmt::{self, Write};

use num_traits::{One, Signed};

use super::expr::{Atom, Expr, Monomial, Rational};

fn print_order(a: &Atom) -> u8 {
    match a {
        Atom::Const(_) => 0,
        Atom::Radical(b) if b.as_rational().is_some() => 0,
        Atom::Func(..) => 1,
        Atom::Radical(_) => 2,
        Atom::Coord(_) => 3,
        Atom::Placeholder(_) => 4,
    }
}

fn write_exponent(f: &mut impl Write, e: &Rational) -> fmt::Result {
    if e.is_integer() && e.is_positive() {
        write!(f, "^{}", e)
    } else {
        write!(f, "^({})", e)
    }
}

fn write_atom_power(f: &mut impl Write, a: &Atom, e: &Rational) -> fmt::Result {
    match a {
        Atom::Radical(base) => {
            if *e == Rational::new(1.into(), 2.into()) {
                write!(f, "sqrt({})", base)
            } else {
                write!(f, "({})", base)?;
                write_exponent(f, e)
            }
        }
        _ => {
            write_atom(f, a)?;
            if !e.is_one() {
                write_exponent(f, e)?;
            }
            Ok(())
        }
    }
}

fn write_atom(f: &mut impl Write, a: &Atom) -> fmt::Result {
    match a {
        Atom::Coord(c) => write!(f, "{}", c),
        Atom::Const(n) => f.write_str(n),
        Atom::Func(func, arg) => write!(f, "{}({})", func.name(), arg),
        Atom::Radical(base) => write!(f, "({})", base),
        Atom::Placeholder(p) => {
            let mut call = format!("{}(", p.name);
            for (i, c) in p.args.iter().enumerate() {
                if i > 0 {
                    call.push(',');
                }
                write!(call, "{}", c)?;
            }
            call.push(')');
            if !p.is_differentiated() {
                return f.write_str(&call);
            }
            write!(f, "diff({}", call)?;
            for (c, &n) in p.args.iter().zip(p.derivs.iter()) {
                for _ in 0..n {
                    write!(f, ",{}", c)?;
                }
            }
            f.write_char(')')
        }
    }
}

/// Writes `|c| * monomial` (the sign is handled by the caller).
fn write_term(f: &mut impl Write, m: &Monomial, c: &Rational) -> fmt::Result {
    let abs = c.abs();
    let mut factors: Vec<&(Atom, Rational)> = m.factors().iter().collect();
    factors.sort_by_key(|(a, _)| print_order(a));
    let mut first = true;
    if !abs.is_one() || factors.is_empty() {
        write!(f, "{}", abs)?;
        first = false;
    }
    for (a, e) in factors {
        if !first {
            f.write_char('*')?;
        }
        first = false;
        write_atom_power(f, a, e)?;
    }
    Ok(())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms().iter().enumerate() {
            if i == 0 {
                if c.is_negative() {
                    f.write_char('-')?;
                }
            } else if c.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            write_term(f, m, c)?;
        }
        Ok(())
    }
}
