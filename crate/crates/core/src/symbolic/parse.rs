//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' unary)?
//! primary := number | coordinate | constant | func '(' expr ')'
//!          | 'diff' '(' expr (',' coordinate)+ ')'
//!          | name '(' coordinate (',' coordinate)* ')'      (placeholder)
//!          | '(' expr ')'
//! ```

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Pow, Zero};

use super::coord::{parse_coordinate, Coordinate};
use super::expr::{Expr, Func, Placeholder, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier {name:?} at {pos}")]
    UnknownIdentifier { pos: usize, name: String },
    #[error("momentum coordinate {name} not allowed here (at {pos})")]
    MomentumNotAllowed { pos: usize, name: String },
    #[error("coordinate {name} outside the declared space (at {pos})")]
    CoordinateOutOfRange { pos: usize, name: String },
    #[error("placeholder function {name:?} not allowed here (at {pos})")]
    PlaceholderNotAllowed { pos: usize, name: String },
}

/// The coordinate universe an expression is parsed against.
#[derive(Debug, Clone)]
pub struct ParseContext {
    /// Highest admissible jet order, `None` for unbounded.
    pub max_order: Option<usize>,
    /// Highest admissible momentum order, `None` for unbounded.
    pub max_momentum_order: Option<usize>,
    /// Base dimension `n`, `None` for unbounded.
    pub dim: Option<usize>,
    pub momenta: bool,
    /// Declared named constants; `None` accepts any name.
    pub constants: Option<BTreeSet<String>>,
    pub placeholders: bool,
}

impl ParseContext {
    /// Accepts every coordinate, constant and placeholder.
    pub fn permissive() -> Self {
        ParseContext {
            max_order: None,
            max_momentum_order: None,
            dim: None,
            momenta: true,
            constants: None,
            placeholders: true,
        }
    }

    /// Jet coordinates `q_i^A` with `i <= order`, `A <= n`; no momenta.
    pub fn jet(order: usize, n: usize) -> Self {
        ParseContext {
            max_order: Some(order),
            max_momentum_order: None,
            dim: Some(n),
            momenta: false,
            constants: None,
            placeholders: false,
        }
    }

    /// Canonical coordinates of `T*(T^{k-1}Q)`.
    pub fn phase(k: usize, n: usize) -> Self {
        ParseContext {
            max_order: Some(k - 1),
            max_momentum_order: Some(k - 1),
            dim: Some(n),
            momenta: true,
            constants: None,
            placeholders: false,
        }
    }

    pub fn with_constants<I, S>(mut self, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.constants = Some(names.into_iter().map(Into::into).collect());
        self
    }

    pub fn with_placeholders(mut self, allow: bool) -> Self {
        self.placeholders = allow;
        self
    }

    fn check_coord(&self, c: Coordinate, name: &str, pos: usize) -> Result<(), ParseError> {
        if c.is_momentum() && !self.momenta {
            return Err(ParseError::MomentumNotAllowed { pos, name: name.to_string() });
        }
        let limit = if c.is_momentum() { self.max_momentum_order } else { self.max_order };
        let out_of_range = limit.is_some_and(|m| c.order > m) || self.dim.is_some_and(|n| c.axis > n);
        if out_of_range {
            return Err(ParseError::CoordinateOutOfRange { pos, name: name.to_string() });
        }
        Ok(())
    }
}

pub fn parse(text: &str, ctx: &ParseContext) -> Result<Expr, ParseError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, ctx };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    ctx: &'a ParseContext,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> ParseError {
        ParseError::Syntax { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, b: u8) -> Result<(), ParseError> {
        if self.eat(b) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", b as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = acc + self.term()?;
            } else if self.eat(b'-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = acc * self.unary()?;
            } else if self.eat(b'/') {
                let at = self.pos;
                let d = self.unary()?;
                if d.is_zero() {
                    return Err(ParseError::Syntax { pos: at, msg: "division by zero".into() });
                }
                acc = acc.div(&d);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            return Ok(-self.unary()?);
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.eat(b'^') {
            let at = self.pos;
            let exp = self.unary()?;
            let e = exp.as_rational().ok_or(ParseError::Syntax {
                pos: at,
                msg: "exponent must be a rational constant".into(),
            })?;
            if base.is_zero() && e < Rational::zero() {
                return Err(ParseError::Syntax { pos: at, msg: "division by zero".into() });
            }
            return Ok(base.pow(&e));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(b) if b.is_ascii_digit() || b == b'.' => self.number(),
            Some(b) if b.is_ascii_alphabetic() => self.identifier(),
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let int_part = &self.src[start..self.pos];
        let mut frac_part: &[u8] = &[];
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            let fs = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            frac_part = &self.src[fs..self.pos];
        }
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(ParseError::Syntax { pos: start, msg: "malformed number".into() });
        }
        let digits: String = int_part.iter().chain(frac_part).map(|&b| b as char).collect();
        let numer: BigInt = digits.parse().map_err(|_| ParseError::Syntax { pos: start, msg: "malformed number".into() })?;
        let denom = Pow::pow(BigInt::from(10), frac_part.len());
        Ok(Expr::rational(Rational::new(numer, denom)))
    }

    fn identifier(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii").to_string();
        if !name.as_bytes()[0].is_ascii_lowercase() || name.bytes().any(|b| b.is_ascii_uppercase()) {
            return Err(ParseError::UnknownIdentifier { pos: start, name });
        }
        if let Some(c) = parse_coordinate(&name) {
            self.ctx.check_coord(c, &name, start)?;
            return Ok(Expr::coord(c));
        }
        let is_call = self.peek() == Some(b'(');
        if is_call {
            if name == "sqrt" {
                return Ok(self.parenthesised()?.sqrt());
            }
            if let Some(f) = Func::from_name(&name) {
                return Ok(Expr::func(f, self.parenthesised()?));
            }
            if name == "diff" {
                return self.diff_call();
            }
            return self.placeholder(name, start);
        }
        if let Some(known) = &self.ctx.constants {
            if !known.contains(&name) {
                return Err(ParseError::UnknownIdentifier { pos: start, name });
            }
        }
        Ok(Expr::constant(&name))
    }

    fn parenthesised(&mut self) -> Result<Expr, ParseError> {
        self.expect(b'(')?;
        let e = self.expr()?;
        self.expect(b')')?;
        Ok(e)
    }

    fn coordinate_arg(&mut self) -> Result<Coordinate, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        let c = parse_coordinate(name)
            .ok_or_else(|| ParseError::Syntax { pos: start, msg: format!("expected a coordinate, found {:?}", name) })?;
        self.ctx.check_coord(c, name, start)?;
        Ok(c)
    }

    fn diff_call(&mut self) -> Result<Expr, ParseError> {
        self.expect(b'(')?;
        let mut e = self.expr()?;
        let mut any = false;
        while self.eat(b',') {
            let c = self.coordinate_arg()?;
            e = e.diff(&c);
            any = true;
        }
        if !any {
            return Err(self.err("diff needs at least one coordinate"));
        }
        self.expect(b')')?;
        Ok(e)
    }

    fn placeholder(&mut self, name: String, start: usize) -> Result<Expr, ParseError> {
        if !self.ctx.placeholders {
            return Err(ParseError::PlaceholderNotAllowed { pos: start, name });
        }
        self.expect(b'(')?;
        let mut args = vec![self.coordinate_arg()?];
        while self.eat(b',') {
            args.push(self.coordinate_arg()?);
        }
        self.expect(b')')?;
        let mut sorted = args.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != args.len() {
            return Err(ParseError::Syntax { pos: start, msg: "repeated placeholder argument".into() });
        }
        Ok(Expr::placeholder(Placeholder::new(&name, args)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::expr::ratio;

    fn p(s: &str) -> Expr {
        parse(s, &ParseContext::permissive()).unwrap()
    }

    #[test]
    fn precedence() {
        assert_eq!(p("-q0_1^2"), -(Expr::q(0, 1).powi(2)));
        assert_eq!(p("2^3^2"), Expr::int(512));
        assert_eq!(p("1/2*mu"), Expr::constant("mu").scale(&ratio(1, 2)));
        assert_eq!(p("q0_1^-1"), Expr::q(0, 1).recip());
        assert_eq!(p("0.25"), Expr::frac(1, 4));
    }

    #[test]
    fn canonicalises_on_parse() {
        assert_eq!(p("q0_1 + q0_1").to_string(), "2*q0_1");
        assert_eq!(p("q1_1^2/2 + q1_1*q3_1"), p("q1_1*q3_1 + (1/2)*q1_1^2"));
    }

    #[test]
    fn beam_lagrangian_prints_in_canonical_form() {
        let ctx = ParseContext::jet(2, 1).with_constants(["mu", "rho"]);
        let l = parse("(1/2)*mu*q2_1^2 + rho*q0_1", &ctx).unwrap();
        assert_eq!(l.to_string(), "rho*q0_1 + 1/2*mu*q2_1^2");
    }

    #[test]
    fn reports_errors() {
        let ctx = ParseContext::jet(2, 1).with_constants(["mu"]);
        assert!(matches!(parse("q0_1 +", &ctx), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("nu*q0_1", &ctx), Err(ParseError::UnknownIdentifier { .. })));
        assert!(matches!(parse("p0_1", &ctx), Err(ParseError::MomentumNotAllowed { .. })));
        assert!(matches!(parse("q3_1", &ctx), Err(ParseError::CoordinateOutOfRange { .. })));
        assert!(matches!(parse("q0_2", &ctx), Err(ParseError::CoordinateOutOfRange { .. })));
        assert!(matches!(parse("s(q0_1)", &ctx), Err(ParseError::PlaceholderNotAllowed { .. })));
        assert!(matches!(parse("q0_1^q0_1", &ctx), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("1/0", &ctx), Err(ParseError::Syntax { .. })));
        match parse("q0_1 ) ", &ctx) {
            Err(ParseError::Syntax { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn placeholder_and_diff_round_trip() {
        let e = p("q1_1*diff(s2_1(q0_1,q1_1),q0_1) + s2_1(q0_1,q1_1)*diff(s2_1(q0_1,q1_1),q1_1,q1_1)");
        assert_eq!(p(&e.to_string()), e);
    }

    #[test]
    fn radicals_round_trip() {
        for s in [
            "sqrt(2)*sqrt(-1/2*q1_1^2 + c2*q1_1 - c1)",
            "(q0_1 + q1_1)^(-1)",
            "q0_1^(1/3) + sin(q0_1)^2 - exp(-q1_1)",
            "ln(q0_1^2 + 1)/(2*q0_1 + 4)",
        ] {
            let e = p(s);
            assert_eq!(p(&e.to_string()), e, "{}", s);
        }
    }
}
