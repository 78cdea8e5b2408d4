//! Surface syntax for fractoconvexity expressions.
//!
//! ```text
//! expr := meet ( "v" meet )*
//! meet := atom ( "^" atom )*
//! atom := frac | "(" expr ")"
//! frac := INT "/" "{" ID ( "," ID )* "}"
//! ```
//!
//! `v` is the join and binds looser than `^`, the meet. Both are left
//! associative. Whitespace is insignificant. An `ID` starts with a letter or
//! `_` and continues with letters, digits, `_`, `.`, `'` or `-`.
//!
//! ```
//! use fractoconvex::expr::{parse_expr, FractoExpr};
//!
//! let e = parse_expr("1/{G1} v 1/{G2} ^ 1/{G3}")?;
//! assert!(matches!(e, FractoExpr::Join(..)));
//! assert_eq!(e.to_string(), "1/{G1} v 1/{G2} ^ 1/{G3}");
//! # Ok::<(), fractoconvex::Error>(())
//! ```

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FractoExpr {
    Frac { threshold: usize, ids: Vec<String> },
    Join(Box<FractoExpr>, Box<FractoExpr>),
    Meet(Box<FractoExpr>, Box<FractoExpr>),
}

impl FractoExpr {
    pub fn frac<S: Into<String>>(threshold: usize, ids: impl IntoIterator<Item = S>) -> Self {
        FractoExpr::Frac { threshold, ids: ids.into_iter().map(Into::into).collect() }
    }

    pub fn join(self, other: FractoExpr) -> Self {
        FractoExpr::Join(Box::new(self), Box::new(other))
    }

    pub fn meet(self, other: FractoExpr) -> Self {
        FractoExpr::Meet(Box::new(self), Box::new(other))
    }

    /// Pretty-prints with `∨` and `∩`. Not parseable.
    pub fn to_unicode(&self) -> String {
        Printer { expr: self, join: " ∨ ", meet: " ∩ " }.to_string()
    }
}

struct Printer<'a> {
    expr: &'a FractoExpr,
    join: &'static str,
    meet: &'static str,
}

impl Printer<'_> {
    fn sub<'b>(&self, expr: &'b FractoExpr) -> Printer<'b> {
        Printer { expr, join: self.join, meet: self.meet }
    }
}

// Parentheses are emitted exactly where the left-associative grammar needs
// them, so printing then parsing gives back the same tree.
impl fmt::Display for Printer<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.expr {
            FractoExpr::Frac { threshold, ids } => write!(f, "{threshold}/{{{}}}", ids.join(",")),
            FractoExpr::Join(l, r) => {
                write!(f, "{}{}", self.sub(l), self.join)?;
                if matches!(**r, FractoExpr::Join(..)) {
                    write!(f, "({})", self.sub(r))
                } else {
                    write!(f, "{}", self.sub(r))
                }
            }
            FractoExpr::Meet(l, r) => {
                if matches!(**l, FractoExpr::Join(..)) {
                    write!(f, "({})", self.sub(l))?;
                } else {
                    write!(f, "{}", self.sub(l))?;
                }
                f.write_str(self.meet)?;
                if matches!(**r, FractoExpr::Frac { .. }) {
                    write!(f, "{}", self.sub(r))
                } else {
                    write!(f, "({})", self.sub(r))
                }
            }
        }
    }
}

impl fmt::Display for FractoExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Printer { expr: self, join: " v ", meet: " ^ " }.fmt(f)
    }
}

impl std::str::FromStr for FractoExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_expr(s)
    }
}

/// Parses an expression. Errors carry byte offsets into `text`.
pub fn parse_expr(text: &str) -> Result<FractoExpr> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.expected("`v`, `^` or end of input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expected(&self, what: &str) -> Error {
        Error::Syntax { offset: self.pos, expected: what.to_string() }
    }

    fn eat(&mut self, c: u8, what: &str) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.expected(what))
        }
    }

    fn expr(&mut self) -> Result<FractoExpr> {
        let mut lhs = self.meet()?;
        while self.peek() == Some(b'v') {
            self.pos += 1;
            lhs = lhs.join(self.meet()?);
        }
        Ok(lhs)
    }

    fn meet(&mut self) -> Result<FractoExpr> {
        let mut lhs = self.atom()?;
        while self.peek() == Some(b'^') {
            self.pos += 1;
            lhs = lhs.meet(self.atom()?);
        }
        Ok(lhs)
    }

    fn atom(&mut self) -> Result<FractoExpr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.eat(b')', "`)`")?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => self.frac(),
            _ => Err(self.expected("a fraction `m/{...}` or `(`")),
        }
    }

    fn frac(&mut self) -> Result<FractoExpr> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        let threshold: usize = digits
            .parse()
            .map_err(|_| Error::Syntax { offset: start, expected: "a threshold that fits in usize".into() })?;
        if threshold == 0 {
            return Err(Error::Syntax { offset: start, expected: "a positive threshold".into() });
        }
        self.eat(b'/', "`/`")?;
        self.eat(b'{', "`{`")?;
        let mut ids: Vec<String> = Vec::new();
        loop {
            self.skip_ws();
            let id_start = self.pos;
            let id = self.ident()?;
            if ids.contains(&id) {
                return Err(Error::ExprDuplicateId { offset: id_start, id });
            }
            ids.push(id);
            match self.peek() {
                Some(b',') => self.pos += 1,
                Some(b'}') => {
                    self.pos += 1;
                    break;
                }
                _ => return Err(self.expected("`,` or `}`")),
            }
        }
        if threshold > ids.len() {
            return Err(Error::ExprArity { offset: start, threshold, members: ids.len() });
        }
        Ok(FractoExpr::Frac { threshold, ids })
    }

    fn ident(&mut self) -> Result<String> {
        let start = self.pos;
        match self.src.get(self.pos) {
            Some(c) if c.is_ascii_alphabetic() || *c == b'_' => self.pos += 1,
            _ => return Err(self.expected("an identifier")),
        }
        while let Some(&c) = self.src.get(self.pos) {
            if c.is_ascii_alphanumeric() || matches!(c, b'_' | b'.' | b'\'' | b'-') {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok(String::from_utf8(self.src[start..self.pos].to_vec()).expect("ascii identifier"))
    }
}
