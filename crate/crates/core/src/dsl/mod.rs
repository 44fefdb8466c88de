//! Expression language for holomorphic self-maps.
//!
//! Grammar (whitespace-insensitive, byte offsets in errors):
//!
//! ```text
//! map      := kind INT ':' '(' expr {',' expr} ')' ['inverse' '(' expr {',' expr} ')']
//! kind     := 'disc' | 'ball' | 'polydisc' | 'siegel' | 'slitplane'
//! expr     := term {('+'|'-') term}
//! term     := unary {('*'|'/') unary}
//! unary    := '-' unary | power
//! power    := atom {'^' ['-'] INT}
//! atom     := NUMBER ['i'] | 'i' | 'z' INT | ('sqrt'|'exp'|'log') '(' expr ')' | '(' expr ')'
//! ```
//!
//! `i` is a reserved literal, exponents are integers, and `sqrt`/`log` use
//! the principal branch with the cut on the nonpositive reals (evaluating on
//! the cut is an error, not a convention).

mod jet;
mod lexer;
mod parser;

pub use jet::{EvalError, Jet};
pub use parser::{parse_expr, parse_expr_tuple, parse_map, parse_point_list, ParseError, ParseErrorKind};

use num_complex::Complex64;

use crate::geometry::{DomainModel, DomainPoint};

type C = Complex64;

/// Built-in unary functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Exp,
    Log,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Log => "log",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Expression tree over complex literals, variables `z1..zq`, arithmetic,
/// integer powers and principal-branch functions.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(C),
    /// 1-based variable index.
    Var(usize),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn var(index: usize) -> Expr {
        Expr::Var(index)
    }

    pub fn constant(value: impl Into<C>) -> Expr {
        Expr::Const(value.into())
    }

    /// Largest variable index used.
    pub fn max_var(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(k) => *k,
            Expr::Neg(e) | Expr::Pow(e, _) | Expr::Call(_, e) => e.max_var(),
            Expr::Bin(_, a, b) => a.max_var().max(b.max_var()),
        }
    }
}

// precedence levels used by both the parser and the printer
pub(crate) const PREC_ADD: u8 = 1;
pub(crate) const PREC_MUL: u8 = 2;
pub(crate) const PREC_NEG: u8 = 3;
pub(crate) const PREC_POW: u8 = 4;
pub(crate) const PREC_ATOM: u8 = 5;

fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

/// Precedence of the printed form (complex literals with two parts print
/// like sums, negative reals like negations).
fn const_prec(c: &C) -> u8 {
    if c.re != 0.0 && c.im != 0.0 {
        PREC_ADD
    } else if (c.im == 0.0 && c.re < 0.0) || (c.re == 0.0 && c.im < 0.0) {
        PREC_NEG
    } else {
        PREC_ATOM
    }
}

fn fmt_const(c: &C) -> String {
    let imag = |im: f64| -> String {
        if im == 1.0 {
            "i".into()
        } else if im == -1.0 {
            "-i".into()
        } else {
            format!("{}i", fmt_f64(im))
        }
    };
    if c.im == 0.0 {
        fmt_f64(c.re)
    } else if c.re == 0.0 {
        imag(c.im)
    } else if c.im < 0.0 {
        format!("{} - {}", fmt_f64(c.re), imag(-c.im))
    } else {
        format!("{} + {}", fmt_f64(c.re), imag(c.im))
    }
}

fn fmt_expr(e: &Expr, out: &mut String, parent_prec: u8) {
    let prec = match e {
        Expr::Const(c) => const_prec(c),
        Expr::Var(_) => PREC_ATOM,
        Expr::Neg(_) => PREC_NEG,
        Expr::Bin(BinOp::Add | BinOp::Sub, ..) => PREC_ADD,
        Expr::Bin(BinOp::Mul | BinOp::Div, ..) => PREC_MUL,
        Expr::Pow(..) => PREC_POW,
        Expr::Call(..) => PREC_ATOM,
    };
    let need_paren = prec < parent_prec;
    if need_paren {
        out.push('(');
    }
    match e {
        Expr::Const(c) => out.push_str(&fmt_const(c)),
        Expr::Var(k) => {
            out.push('z');
            out.push_str(&k.to_string());
        }
        Expr::Neg(inner) => {
            out.push('-');
            fmt_expr(inner, out, PREC_NEG);
        }
        Expr::Bin(op, a, b) => {
            let (sym, rhs_prec) = match op {
                BinOp::Add => (" + ", PREC_ADD + 1),
                BinOp::Sub => (" - ", PREC_ADD + 1),
                BinOp::Mul => (" * ", PREC_MUL + 1),
                BinOp::Div => (" / ", PREC_MUL + 1),
            };
            fmt_expr(a, out, prec);
            out.push_str(sym);
            fmt_expr(b, out, rhs_prec);
        }
        Expr::Pow(base, n) => {
            fmt_expr(base, out, PREC_ATOM);
            out.push('^');
            out.push_str(&n.to_string());
        }
        Expr::Call(f, arg) => {
            out.push_str(f.name());
            out.push('(');
            fmt_expr(arg, out, 0);
            out.push(')');
        }
    }
    if need_paren {
        out.push(')');
    }
}

impl std::fmt::Display for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut s = String::new();
        fmt_expr(self, &mut s, 0);
        f.write_str(&s)
    }
}

/// A tuple of expressions in `vars_in` variables; evaluates as a map
/// `C^{vars_in} -> C^{components.len()}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprMap {
    vars_in: usize,
    components: Vec<Expr>,
}

impl ExprMap {
    pub fn new(vars_in: usize, components: Vec<Expr>) -> Result<Self, ParseError> {
        for c in &components {
            let mv = c.max_var();
            if mv > vars_in {
                return Err(ParseError::var_out_of_range(mv, vars_in));
            }
        }
        Ok(ExprMap { vars_in, components })
    }

    pub fn vars_in(&self) -> usize {
        self.vars_in
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn dim_out(&self) -> usize {
        self.components.len()
    }

    pub fn eval_value(&self, p: &[C]) -> Result<Vec<C>, EvalError> {
        assert_eq!(p.len(), self.vars_in, "point dimension mismatch");
        self.components.iter().map(|e| jet::eval_value(e, p)).collect()
    }

    /// Value and Jacobian via forward-mode differentiation over complex
    /// dual numbers.
    pub fn eval_jet(&self, p: &[C]) -> Result<Jet, EvalError> {
        assert_eq!(p.len(), self.vars_in, "point dimension mismatch");
        let rows: Vec<(C, Vec<C>)> = self
            .components
            .iter()
            .map(|e| jet::eval_jet(e, p))
            .collect::<Result<_, _>>()?;
        let value: Vec<C> = rows.iter().map(|(v, _)| *v).collect();
        let jacobian = nalgebra::DMatrix::from_fn(rows.len(), self.vars_in, |i, j| rows[i].1[j]);
        Ok(Jet { value, jacobian })
    }
}

impl std::fmt::Display for ExprMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A holomorphic self-map of a catalog domain, with an optional exact
/// inverse, parsed from the map grammar or built programmatically.
#[derive(Debug, Clone)]
pub struct MapDef {
    pub domain: DomainModel,
    forward: ExprMap,
    inverse: Option<ExprMap>,
    pub name: String,
    pub params: Vec<(String, f64)>,
}

impl MapDef {
    pub fn new(domain: DomainModel, forward: ExprMap, inverse: Option<ExprMap>) -> Self {
        let q = domain.dimension();
        assert_eq!(forward.dim_out(), q, "component count must equal the dimension");
        if let Some(inv) = &inverse {
            assert_eq!(inv.dim_out(), q, "inverse component count must equal the dimension");
        }
        MapDef { domain, forward, inverse, name: String::new(), params: Vec::new() }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_params(mut self, params: Vec<(String, f64)>) -> Self {
        self.params = params;
        self
    }

    pub fn forward(&self) -> &ExprMap {
        &self.forward
    }

    pub fn inverse(&self) -> Option<&ExprMap> {
        self.inverse.as_ref()
    }

    pub fn eval_value(&self, p: &DomainPoint) -> Result<DomainPoint, EvalError> {
        Ok(DomainPoint::new(self.forward.eval_value(p.coords())?))
    }

    pub fn eval_jet(&self, p: &DomainPoint) -> Result<Jet, EvalError> {
        self.forward.eval_jet(p.coords())
    }

    /// Grammar form: `<kind> <q> : (<exprs>) [inverse (<exprs>)]`.
    pub fn source(&self) -> String {
        let mut s = format!(
            "{} {} : {}",
            self.domain.kind().name(),
            self.domain.dimension(),
            self.forward
        );
        if let Some(inv) = &self.inverse {
            s.push_str(&format!(" inverse {inv}"));
        }
        s
    }
}

impl std::fmt::Display for MapDef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.source())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn parses_the_shear_example() {
        let m = parse_map("siegel 2 : (2*z1 + i*z2^2, z2) inverse ((z1 - i*z2^2)/2, z2)").unwrap();
        assert_eq!(m.domain.dimension(), 2);
        assert!(m.inverse().is_some());
        let jet = m.eval_jet(&DomainPoint::new(vec![c(0.0, 1.0), c(0.0, 0.0)])).unwrap();
        assert!(crate::geometry::euclid_dist(&jet.value, &[c(0.0, 2.0), c(0.0, 0.0)]) < 1e-15);
        assert_relative_eq!(jet.jacobian[(0, 0)].re, 2.0);
        assert_relative_eq!(jet.jacobian[(0, 1)].norm(), 0.0);
        assert_relative_eq!(jet.jacobian[(1, 1)].re, 1.0);
    }

    #[test]
    fn identity_and_square_jets() {
        let m = parse_map("disc 1 : (z1)").unwrap();
        let p = DomainPoint::scalar(c(0.3, 0.2));
        let jet = m.eval_jet(&p).unwrap();
        assert_eq!(jet.value[0], c(0.3, 0.2));
        assert_eq!(jet.jacobian[(0, 0)], c(1.0, 0.0));

        let m = parse_map("disc 1 : (z1^2)").unwrap();
        let jet = m.eval_jet(&DomainPoint::scalar(c(0.5, 0.0))).unwrap();
        assert_eq!(jet.value[0], c(0.25, 0.0));
        assert_eq!(jet.jacobian[(0, 0)], c(1.0, 0.0));
    }

    #[test]
    fn syntax_error_carries_offset() {
        let text = "siegel 1 : (z1 + 1";
        let err = parse_map(text).unwrap_err();
        assert_eq!(err.offset, text.len());
    }

    #[test]
    fn unknown_identifier_and_bad_exponent() {
        assert!(matches!(
            parse_map("disc 1 : (w1)").unwrap_err().kind,
            ParseErrorKind::UnknownIdentifier(_)
        ));
        assert!(matches!(
            parse_map("disc 1 : (z1^z1)").unwrap_err().kind,
            ParseErrorKind::NonIntegerExponent
        ));
        assert!(matches!(
            parse_map("disc 1 : (z2)").unwrap_err().kind,
            ParseErrorKind::VarOutOfRange { .. }
        ));
        assert!(matches!(
            parse_map("ball 2 : (z1)").unwrap_err().kind,
            ParseErrorKind::ArityMismatch { .. }
        ));
    }

    #[test]
    fn precedence_and_literals() {
        let e = parse_expr("1+2i", 0).unwrap();
        let v = jet::eval_value(&e, &[]).unwrap();
        assert_eq!(v, c(1.0, 2.0));

        // ^ binds tighter than unary minus
        let e = parse_expr("-z1^2", 1).unwrap();
        let v = jet::eval_value(&e, &[c(3.0, 0.0)]).unwrap();
        assert_eq!(v, c(-9.0, 0.0));

        let e = parse_expr("2*z1 + 3i/z1", 1).unwrap();
        let v = jet::eval_value(&e, &[c(1.0, 0.0)]).unwrap();
        assert_eq!(v, c(2.0, 3.0));

        let e = parse_expr("z1^-1", 1).unwrap();
        let v = jet::eval_value(&e, &[c(2.0, 0.0)]).unwrap();
        assert_eq!(v, c(0.5, 0.0));
    }

    #[test]
    fn display_round_trip_is_stable() {
        for src in [
            "siegel 2 : (2*z1 + i*z2^2, z2) inverse ((z1 - i*z2^2)/2, z2)",
            "disc 1 : ((z1 - 0.5)/(1 - 0.5*z1))",
            "ball 2 : (i*z1, -z2)",
            "slitplane 1 : (z1 + 1)",
            "siegel 1 : (sqrt(z1) + exp(-z1) - log(z1 + 2i))",
        ] {
            let once = parse_map(src).unwrap().source();
            let twice = parse_map(&once).unwrap().source();
            assert_eq!(once, twice);
        }
    }

    #[test]
    fn wrong_inverse_is_rejected_at_parse_time() {
        let err = parse_map("disc 1 : (z1/2) inverse (3*z1)").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::InverseInconsistent { .. }));
        assert!(parse_map("disc 1 : (z1/2) inverse (2*z1)").is_ok());
    }

    #[test]
    fn point_list_parsing() {
        let pts = parse_point_list("(i, 0)").unwrap();
        assert_eq!(pts, vec![c(0.0, 1.0), c(0.0, 0.0)]);
        let pts = parse_point_list("2i").unwrap();
        assert_eq!(pts, vec![c(0.0, 2.0)]);
        let pts = parse_point_list("(1/2, -0.3 + 0.1i)").unwrap();
        assert_eq!(pts, vec![c(0.5, 0.0), c(-0.3, 0.1)]);
        assert!(parse_point_list("(z1)").is_err());
    }
}
