//! Forward-mode evaluation over complex dual numbers.
//!
//! Newton inversion near the boundary needs well-conditioned Jacobians, so
//! derivatives are propagated exactly instead of by finite differences.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use super::{BinOp, Expr, Func};

type C = Complex64;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} evaluated on its branch cut (nonpositive real argument)")]
    BranchCut(&'static str),
    #[error("zero raised to a negative power")]
    ZeroToNegativePower,
}

/// Value and Jacobian of a map at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub value: Vec<C>,
    pub jacobian: DMatrix<C>,
}

fn on_cut(z: C) -> bool {
    z.im == 0.0 && z.re <= 0.0
}

pub(crate) fn eval_value(e: &Expr, p: &[C]) -> Result<C, EvalError> {
    Ok(match e {
        Expr::Const(c) => *c,
        Expr::Var(k) => p[*k - 1],
        Expr::Neg(a) => -eval_value(a, p)?,
        Expr::Bin(op, a, b) => {
            let (a, b) = (eval_value(a, p)?, eval_value(b, p)?);
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b == C::new(0.0, 0.0) {
                        return Err(EvalError::DivisionByZero);
                    }
                    a / b
                }
            }
        }
        Expr::Pow(a, n) => {
            let a = eval_value(a, p)?;
            if *n < 0 && a == C::new(0.0, 0.0) {
                return Err(EvalError::ZeroToNegativePower);
            }
            a.powi(*n)
        }
        Expr::Call(f, a) => {
            let a = eval_value(a, p)?;
            match f {
                Func::Sqrt => {
                    if on_cut(a) {
                        return Err(EvalError::BranchCut("sqrt"));
                    }
                    a.sqrt()
                }
                Func::Exp => a.exp(),
                Func::Log => {
                    if on_cut(a) {
                        return Err(EvalError::BranchCut("log"));
                    }
                    a.ln()
                }
            }
        }
    })
}

/// (value, gradient) pair; gradient has one entry per variable.
type Dual = (C, Vec<C>);

fn dual_zero_grad(q: usize) -> Vec<C> {
    vec![C::new(0.0, 0.0); q]
}

pub(crate) fn eval_jet(e: &Expr, p: &[C]) -> Result<Dual, EvalError> {
    let q = p.len();
    Ok(match e {
        Expr::Const(c) => (*c, dual_zero_grad(q)),
        Expr::Var(k) => {
            let mut g = dual_zero_grad(q);
            g[*k - 1] = C::new(1.0, 0.0);
            (p[*k - 1], g)
        }
        Expr::Neg(a) => {
            let (v, g) = eval_jet(a, p)?;
            (-v, g.into_iter().map(|x| -x).collect())
        }
        Expr::Bin(op, a, b) => {
            let (va, ga) = eval_jet(a, p)?;
            let (vb, gb) = eval_jet(b, p)?;
            match op {
                BinOp::Add => (va + vb, ga.iter().zip(&gb).map(|(x, y)| x + y).collect()),
                BinOp::Sub => (va - vb, ga.iter().zip(&gb).map(|(x, y)| x - y).collect()),
                BinOp::Mul => (
                    va * vb,
                    ga.iter().zip(&gb).map(|(x, y)| x * vb + va * y).collect(),
                ),
                BinOp::Div => {
                    if vb == C::new(0.0, 0.0) {
                        return Err(EvalError::DivisionByZero);
                    }
                    let inv = 1.0 / vb;
                    (
                        va * inv,
                        ga.iter()
                            .zip(&gb)
                            .map(|(x, y)| (x * vb - va * y) * inv * inv)
                            .collect(),
                    )
                }
            }
        }
        Expr::Pow(a, n) => {
            let (va, ga) = eval_jet(a, p)?;
            if *n < 0 && va == C::new(0.0, 0.0) {
                return Err(EvalError::ZeroToNegativePower);
            }
            let v = va.powi(*n);
            let factor = if *n == 0 {
                C::new(0.0, 0.0)
            } else {
                C::new(*n as f64, 0.0) * va.powi(*n - 1)
            };
            (v, ga.into_iter().map(|x| factor * x).collect())
        }
        Expr::Call(f, a) => {
            let (va, ga) = eval_jet(a, p)?;
            let (v, dv) = match f {
                Func::Sqrt => {
                    if on_cut(va) {
                        return Err(EvalError::BranchCut("sqrt"));
                    }
                    let r = va.sqrt();
                    (r, 0.5 / r)
                }
                Func::Exp => {
                    let r = va.exp();
                    (r, r)
                }
                Func::Log => {
                    if on_cut(va) {
                        return Err(EvalError::BranchCut("log"));
                    }
                    (va.ln(), 1.0 / va)
                }
            };
            (v, ga.into_iter().map(|x| dv * x).collect())
        }
    })
}
