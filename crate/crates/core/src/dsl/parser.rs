//! Recursive-descent parser for expressions, maps and constant point lists.

use num_complex::Complex64;
use thiserror::Error;

use super::lexer::{lex, Lexeme, Tok};
use super::{BinOp, Expr, ExprMap, Func, MapDef};
use crate::geometry::{DomainKind, DomainModel};

type C = Complex64;

#[derive(Debug, Clone, PartialEq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnknownIdentifier(String),
    ArityMismatch { expected: usize, got: usize },
    NonIntegerExponent,
    VarOutOfRange { index: usize, dimension: usize },
    InvalidDomain(String),
    InverseInconsistent { deviation: f64 },
}

#[derive(Debug, Clone, Error, PartialEq)]
#[error("{kind:?} at byte {offset}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
}

impl ParseError {
    fn syntax(msg: impl Into<String>, offset: usize) -> Self {
        ParseError { kind: ParseErrorKind::Syntax(msg.into()), offset }
    }

    pub(crate) fn var_out_of_range(index: usize, dimension: usize) -> Self {
        ParseError { kind: ParseErrorKind::VarOutOfRange { index, dimension }, offset: 0 }
    }

    pub fn describe(&self) -> String {
        let what = match &self.kind {
            ParseErrorKind::Syntax(m) => m.clone(),
            ParseErrorKind::UnknownIdentifier(id) => format!("unknown identifier `{id}`"),
            ParseErrorKind::ArityMismatch { expected, got } => {
                format!("expected {expected} components, got {got}")
            }
            ParseErrorKind::NonIntegerExponent => "exponent must be an integer literal".into(),
            ParseErrorKind::VarOutOfRange { index, dimension } => {
                format!("variable z{index} exceeds dimension {dimension}")
            }
            ParseErrorKind::InvalidDomain(m) => m.clone(),
            ParseErrorKind::InverseInconsistent { deviation } => {
                return format!(
                    "declared inverse does not invert the map on probe points \
                     (worst deviation {deviation:e})"
                )
            }
        };
        format!("{what} (byte {})", self.offset)
    }
}

struct Parser {
    toks: Vec<Lexeme>,
    pos: usize,
    /// 0 means "constants only".
    dimension: usize,
}

impl Parser {
    fn new(text: &str, dimension: usize) -> Result<Self, ParseError> {
        let toks = lex(text)
            .map_err(|e| ParseError::syntax(e.message, e.offset))?;
        Ok(Parser { toks, pos: 0, dimension })
    }

    fn peek(&self) -> &Lexeme {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Lexeme {
        let l = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        l
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Lexeme, ParseError> {
        let l = self.next();
        if l.tok == tok {
            Ok(l)
        } else {
            Err(ParseError::syntax(format!("expected {what}"), l.offset))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut node = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.next();
                    node = Expr::Bin(BinOp::Add, Box::new(node), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.next();
                    node = Expr::Bin(BinOp::Sub, Box::new(node), Box::new(self.term()?));
                }
                _ => return Ok(node),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut node = self.unary()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.next();
                    node = Expr::Bin(BinOp::Mul, Box::new(node), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.next();
                    node = Expr::Bin(BinOp::Div, Box::new(node), Box::new(self.unary()?));
                }
                _ => return Ok(node),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek().tok == Tok::Minus {
            self.next();
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let mut node = self.atom()?;
        while self.peek().tok == Tok::Caret {
            self.next();
            let mut sign = 1i32;
            if self.peek().tok == Tok::Minus {
                self.next();
                sign = -1;
            }
            let l = self.next();
            let n = match l.tok {
                Tok::Number(x) if x.fract() == 0.0 && x.abs() <= i32::MAX as f64 => x as i32,
                _ => {
                    return Err(ParseError {
                        kind: ParseErrorKind::NonIntegerExponent,
                        offset: l.offset,
                    })
                }
            };
            node = Expr::Pow(Box::new(node), sign * n);
        }
        Ok(node)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let l = self.next();
        match l.tok {
            Tok::Number(x) => Ok(Expr::Const(C::new(x, 0.0))),
            Tok::Imag(x) => Ok(Expr::Const(C::new(0.0, x))),
            Tok::ImagUnit => Ok(Expr::Const(C::i())),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if let Some(func) = match name.as_str() {
                    "sqrt" => Some(Func::Sqrt),
                    "exp" => Some(Func::Exp),
                    "log" => Some(Func::Log),
                    _ => None,
                } {
                    self.expect(Tok::LParen, "`(` after function name")?;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(Expr::Call(func, Box::new(arg)));
                }
                if let Some(rest) = name.strip_prefix('z') {
                    if let Ok(index) = rest.parse::<usize>() {
                        if index == 0 || index > self.dimension {
                            return Err(ParseError {
                                kind: ParseErrorKind::VarOutOfRange {
                                    index,
                                    dimension: self.dimension,
                                },
                                offset: l.offset,
                            });
                        }
                        return Ok(Expr::Var(index));
                    }
                }
                Err(ParseError {
                    kind: ParseErrorKind::UnknownIdentifier(name),
                    offset: l.offset,
                })
            }
            _ => Err(ParseError::syntax("expected an expression", l.offset)),
        }
    }

    fn component_tuple(&mut self) -> Result<(Vec<Expr>, usize), ParseError> {
        let open = self.expect(Tok::LParen, "`(`")?;
        let mut parts = vec![self.expr()?];
        while self.peek().tok == Tok::Comma {
            self.next();
            parts.push(self.expr()?);
        }
        self.expect(Tok::RParen, "`)` or `,`")?;
        Ok((parts, open.offset))
    }

    fn at_eof(&self) -> bool {
        self.peek().tok == Tok::Eof
    }
}

/// Parse a single expression in variables `z1..zq`.
pub fn parse_expr(text: &str, dimension: usize) -> Result<Expr, ParseError> {
    let mut p = Parser::new(text, dimension)?;
    let e = p.expr()?;
    if !p.at_eof() {
        return Err(ParseError::syntax("trailing input", p.peek().offset));
    }
    Ok(e)
}

/// Parse a comma-separated tuple of expressions (a parenthesized tuple or a
/// single bare expression) in variables `z1..zq`.
pub fn parse_expr_tuple(text: &str, dimension: usize) -> Result<Vec<Expr>, ParseError> {
    let mut p = Parser::new(text, dimension)?;
    let parts = if p.peek().tok == Tok::LParen {
        p.component_tuple()?.0
    } else {
        vec![p.expr()?]
    };
    if !p.at_eof() {
        return Err(ParseError::syntax("trailing input", p.peek().offset));
    }
    Ok(parts)
}

/// Parse the full map grammar
/// `<kind> <q> : (<exprs>) [inverse (<exprs>)]`.
pub fn parse_map(text: &str) -> Result<MapDef, ParseError> {
    let mut p = Parser::new(text, 0)?;

    let l = p.next();
    let kind = match &l.tok {
        Tok::Ident(name) => match name.as_str() {
            "disc" => DomainKind::Disc,
            "ball" => DomainKind::Ball,
            "polydisc" => DomainKind::Polydisc,
            "siegel" => DomainKind::Siegel,
            "slitplane" => DomainKind::SlitPlane,
            other => {
                return Err(ParseError {
                    kind: ParseErrorKind::InvalidDomain(format!("unknown domain kind `{other}`")),
                    offset: l.offset,
                })
            }
        },
        _ => return Err(ParseError::syntax("expected a domain kind", l.offset)),
    };

    let l = p.next();
    let q = match l.tok {
        Tok::Number(x) if x.fract() == 0.0 && x >= 1.0 => x as usize,
        _ => return Err(ParseError::syntax("expected a positive integer dimension", l.offset)),
    };
    let domain = DomainModel::new(kind, q).map_err(|e| ParseError {
        kind: ParseErrorKind::InvalidDomain(e.to_string()),
        offset: l.offset,
    })?;

    p.expect(Tok::Colon, "`:`")?;
    p.dimension = q;

    let (components, at) = p.component_tuple()?;
    if components.len() != q {
        return Err(ParseError {
            kind: ParseErrorKind::ArityMismatch { expected: q, got: components.len() },
            offset: at,
        });
    }

    let inverse = if let Tok::Ident(name) = &p.peek().tok {
        if name == "inverse" {
            p.next();
            let (parts, at) = p.component_tuple()?;
            if parts.len() != q {
                return Err(ParseError {
                    kind: ParseErrorKind::ArityMismatch { expected: q, got: parts.len() },
                    offset: at,
                });
            }
            Some(ExprMap::new(q, parts)?)
        } else {
            return Err(ParseError::syntax("trailing input", p.peek().offset));
        }
    } else {
        None
    };

    if !p.at_eof() {
        return Err(ParseError::syntax("trailing input", p.peek().offset));
    }

    let map = MapDef::new(domain, ExprMap::new(q, components)?, inverse);
    validate_inverse(&map)?;
    Ok(map)
}

/// `f^{-1}(f(x)) = x` to 1e-9 on probe points, when an inverse is declared.
/// Probes where either side fails to evaluate (branch cuts, poles) are
/// skipped; the identity must hold wherever both sides exist.
fn validate_inverse(map: &MapDef) -> Result<(), ParseError> {
    let inv = match map.inverse() {
        Some(inv) => inv,
        None => return Ok(()),
    };
    let mut worst = 0.0f64;
    for probe in crate::geometry::probe_points(&map.domain, 25) {
        let y = match map.forward().eval_value(probe.coords()) {
            Ok(y) => y,
            Err(_) => continue,
        };
        let back = match inv.eval_value(&y) {
            Ok(b) => b,
            Err(_) => continue,
        };
        let scale = 1.0 + crate::geometry::norm_sq(probe.coords()).sqrt();
        worst = worst.max(crate::geometry::euclid_dist(&back, probe.coords()) / scale);
    }
    if worst > 1e-9 {
        return Err(ParseError {
            kind: ParseErrorKind::InverseInconsistent { deviation: worst },
            offset: 0,
        });
    }
    Ok(())
}

/// Parse a constant point such as `(i, 0)` or `2i`: a tuple of constant
/// expressions evaluated to complex coordinates.
pub fn parse_point_list(text: &str) -> Result<Vec<C>, ParseError> {
    let exprs = parse_expr_tuple(text, 0)?;
    exprs
        .iter()
        .map(|e| {
            super::jet::eval_value(e, &[]).map_err(|err| ParseError {
                kind: ParseErrorKind::Syntax(format!("constant does not evaluate: {err}")),
                offset: 0,
            })
        })
        .collect()
}
