//! Recursive-descent parser.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := power (('*' | '/') power)*
//! power   := unary ('^' power)?
//! unary   := '-' unary | primary
//! primary := number | name '(' expr ')' | name | '(' expr ')'
//! ```
//!
//! Unary minus binds tighter than `^`, so `-x^2` is `(-x)^2`.

use super::{Expr, ExprError, Func, COORDINATES};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(u8),
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn next(&mut self) -> Result<(Tok, usize), ExprError> {
        self.skip_ws();
        let start = self.pos;
        let Some(&c) = self.src.get(self.pos) else {
            return Ok((Tok::End, start));
        };
        if c.is_ascii_digit() || c == b'.' {
            return self.number(start);
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while self
                .src
                .get(self.pos)
                .is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_')
            {
                self.pos += 1;
            }
            let name = std::str::from_utf8(&self.src[start..self.pos])
                .expect("ascii identifier")
                .to_string();
            return Ok((Tok::Ident(name), start));
        }
        if b"+-*/^(),".contains(&c) {
            self.pos += 1;
            return Ok((Tok::Sym(c), start));
        }
        Err(ExprError::Syntax {
            offset: start,
            message: format!("unexpected character `{}`", c as char),
        })
    }

    fn number(&mut self, start: usize) -> Result<(Tok, usize), ExprError> {
        let digits = |lx: &mut Self| {
            let s = lx.pos;
            while lx.src.get(lx.pos).is_some_and(u8::is_ascii_digit) {
                lx.pos += 1;
            }
            lx.pos - s
        };
        let mut n = digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            n += digits(self);
        }
        if n == 0 {
            return Err(ExprError::Syntax {
                offset: start,
                message: "malformed number".into(),
            });
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                // `2e` followed by something else: leave the `e` for the identifier lexer
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii number");
        text.parse::<f64>()
            .map(|v| (Tok::Num(v), start))
            .map_err(|_| ExprError::Syntax {
                offset: start,
                message: format!("malformed number `{text}`"),
            })
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    offset: usize,
    declared: &'a [&'a str],
}

impl<'a> Parser<'a> {
    fn advance(&mut self) -> Result<(), ExprError> {
        let (tok, off) = self.lexer.next()?;
        self.tok = tok;
        self.offset = off;
        Ok(())
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ExprError> {
        let message = match self.tok {
            Tok::End => format!("{} (unexpected end of input)", message.into()),
            _ => message.into(),
        };
        Err(ExprError::Syntax {
            offset: self.offset,
            message,
        })
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            match self.tok {
                Tok::Sym(b'+') => {
                    self.advance()?;
                    lhs = lhs.add(&self.term()?);
                }
                Tok::Sym(b'-') => {
                    self.advance()?;
                    lhs = lhs.sub(&self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.power()?;
        loop {
            match self.tok {
                Tok::Sym(b'*') => {
                    self.advance()?;
                    lhs = lhs.mul(&self.power()?);
                }
                Tok::Sym(b'/') => {
                    self.advance()?;
                    lhs = lhs.div(&self.power()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.unary()?;
        if self.tok == Tok::Sym(b'^') {
            self.advance()?;
            let exponent = self.power()?;
            return Ok(base.pow(&exponent));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.tok == Tok::Sym(b'-') {
            self.advance()?;
            return Ok(self.unary()?.neg());
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        match self.tok.clone() {
            Tok::Num(v) => {
                self.advance()?;
                Ok(Expr::constant(v))
            }
            Tok::Sym(b'(') => {
                self.advance()?;
                let inner = self.expr()?;
                self.expect_close()?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                let at = self.offset;
                self.advance()?;
                if self.tok == Tok::Sym(b'(') {
                    let Some(func) = Func::from_name(&name) else {
                        return Err(ExprError::Undeclared { name, offset: at });
                    };
                    self.advance()?;
                    let arg = self.expr()?;
                    self.expect_close()?;
                    return Ok(Expr::call(func, &arg));
                }
                if Func::from_name(&name).is_some() {
                    return self.error(format!("function `{name}` needs an argument list"));
                }
                if COORDINATES.contains(&name.as_str()) || self.declared.contains(&name.as_str())
                {
                    Ok(Expr::var(&name))
                } else {
                    Err(ExprError::Undeclared { name, offset: at })
                }
            }
            _ => self.error("expected a number, name or `(`"),
        }
    }

    fn expect_close(&mut self) -> Result<(), ExprError> {
        if self.tok != Tok::Sym(b')') {
            return self.error("expected `)`");
        }
        self.advance()
    }
}

/// Parses `text`; identifiers other than `x`, `t`, `u` must appear in `declared`.
pub fn parse(text: &str, declared: &[&str]) -> Result<Expr, ExprError> {
    let mut parser = Parser {
        lexer: Lexer {
            src: text.as_bytes(),
            pos: 0,
        },
        tok: Tok::End,
        offset: 0,
        declared,
    };
    parser.advance()?;
    if parser.tok == Tok::End {
        return parser.error("empty expression");
    }
    let e = parser.expr()?;
    if parser.tok != Tok::End {
        return parser.error("unexpected trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Node;

    #[test]
    fn square_is_a_single_pow() {
        let e = parse("x^2", &[]).unwrap();
        assert_eq!(e, Expr::x().pow(&Expr::constant(2.0)));
        assert!(matches!(e.node(), Node::Pow(..)));
    }

    #[test]
    fn dangling_operator_reports_offset() {
        match parse("2*", &[]) {
            Err(ExprError::Syntax { offset, .. }) => assert_eq!(offset, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn undeclared_identifier_is_named() {
        match parse("rho*x", &[]) {
            Err(ExprError::Undeclared { name, offset }) => {
                assert_eq!(name, "rho");
                assert_eq!(offset, 0);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse("sin(x)", &[]),
            Err(ExprError::Undeclared { .. })
        ));
    }

    #[test]
    fn log_abs_source_tree() {
        let e = parse("rho^2*u*log(abs(u))/log(x)^2", &["rho"]).unwrap();
        let rho = Expr::var("rho");
        let u = Expr::u();
        let expected =
            rho.powf(2.0).mul(&u).mul(&u.abs().log()).div(&Expr::x().log().powf(2.0));
        assert_eq!(e, expected);
    }

    #[test]
    fn precedence_and_associativity() {
        let v = |s: &str| parse(s, &[]).unwrap().eval(&[("x", 2.0)]).unwrap();
        assert_eq!(v("2^3^2"), 512.0);
        assert_eq!(v("-x^2"), 4.0);
        assert_eq!(v("2^-1"), 0.5);
        assert_eq!(v("1 - 2 - 3"), -4.0);
        assert_eq!(v("8 / 4 / 2"), 1.0);
        assert_eq!(v("1 + 2*3"), 7.0);
        assert_eq!(v(" ( 1+2 ) * 3 "), 9.0);
        assert_eq!(v("1.5e1 + .5"), 15.5);
        assert_eq!(v("x*-x"), -4.0);
    }

    #[test]
    fn malformed_inputs() {
        for bad in ["", "(", "x)", "exp", "exp(x", "2 3", "x ^", "#"] {
            assert!(
                matches!(parse(bad, &[]), Err(ExprError::Syntax { .. })),
                "{bad:?} should be a syntax error"
            );
        }
    }
}
