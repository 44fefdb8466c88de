//! Orbit computation: forward iteration and exact or Newton backward
//! iteration, with domain-exit detection.

use nalgebra::DVector;
use num_complex::Complex64;
use thiserror::Error;

use crate::dsl::{EvalError, MapDef};
use crate::geometry::{euclid_dist, DomainPoint, GeometryError};
use crate::tol;

type C = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum OrbitError {
    #[error("starting point outside the domain: {0}")]
    Start(GeometryError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("Newton iteration failed to reduce the residual ({residual:e} after {iters} iterations)")]
    NewtonDiverged { residual: f64, iters: usize },
    #[error("inverse left the domain (slack {slack:e})")]
    LeftDomain { slack: f64 },
    #[error("singular Jacobian in Newton step")]
    SingularJacobian,
    #[error("no exact inverse and no Newton guess supplied")]
    MissingGuess,
}

/// A finite forward or backward orbit with per-step diagnostics.
///
/// Forward: `points[n+1] = f(points[n])`. Backward: `f(points[n+1]) =
/// points[n]` up to the recorded residual. `exit_index` is the index the
/// first invalid point would have had; `points` holds the valid prefix.
#[derive(Debug, Clone)]
pub struct OrbitRecord {
    pub direction: Direction,
    pub points: Vec<DomainPoint>,
    /// `||f(points[n+1]) - points[n]||` per backward step; empty for forward.
    pub residuals: Vec<f64>,
    pub exit_index: Option<usize>,
    /// The inversion error that stopped a backward orbit, if any.
    pub failure: Option<OrbitError>,
}

impl OrbitRecord {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// True when all requested points were produced.
    pub fn complete(&self) -> bool {
        self.exit_index.is_none()
    }
}

/// Slack test used while extending orbits: a computed point counts as exited
/// only when it violates membership beyond the rounding band.
fn exited(map: &MapDef, p: &DomainPoint) -> Result<bool, GeometryError> {
    Ok(map.domain.boundary_slack(p)? < -tol::EXIT_MARGIN)
}

/// Forward orbit `x, f(x), ..., f^n(x)`; stops early with `exit_index` if an
/// iterate violates membership (analytic maps defined on larger sets can
/// overshoot numerically).
pub fn forward_orbit(map: &MapDef, x: &DomainPoint, n: usize) -> Result<OrbitRecord, OrbitError> {
    map.domain
        .contains(x, 0.0)
        .ok()
        .filter(|&inside| inside)
        .ok_or(OrbitError::Start(GeometryError::OutsideDomain {
            slack: map.domain.boundary_slack(x).unwrap_or(f64::NAN),
        }))?;
    let mut points = Vec::with_capacity(n + 1);
    points.push(x.clone());
    let mut exit_index = None;
    for k in 1..=n {
        let next = match map.eval_value(points.last().unwrap()) {
            Ok(p) => p,
            Err(_) => {
                exit_index = Some(k);
                break;
            }
        };
        if next.coords().iter().any(|z| !z.re.is_finite() || !z.im.is_finite())
            || exited(map, &next).unwrap_or(true)
        {
            exit_index = Some(k);
            break;
        }
        points.push(next);
    }
    Ok(OrbitRecord { direction: Direction::Forward, points, residuals: Vec::new(), exit_index, failure: None })
}

fn to_dvector(p: &[C]) -> DVector<C> {
    DVector::from_column_slice(p)
}

fn residual_norm(map: &MapDef, x: &DomainPoint, y: &DomainPoint) -> Result<f64, EvalError> {
    Ok(euclid_dist(map.eval_value(x)?.coords(), y.coords()))
}

/// Solve `f(x) = y`: through the exact inverse expressions when the map
/// carries them, otherwise by damped Newton started from `guess`.
pub fn invert_point(
    map: &MapDef,
    y: &DomainPoint,
    guess: Option<&DomainPoint>,
) -> Result<(DomainPoint, f64), OrbitError> {
    if let Some(inv) = map.inverse() {
        let x = DomainPoint::new(inv.eval_value(y.coords())?);
        let slack = map.domain.boundary_slack(&x).map_err(OrbitError::Start)?;
        if slack < -tol::EXIT_MARGIN {
            return Err(OrbitError::LeftDomain { slack });
        }
        let res = residual_norm(map, &x, y)?;
        return Ok((x, res));
    }

    let guess = guess.ok_or(OrbitError::MissingGuess)?;
    let scale = 1.0f64.max(y.coords().iter().map(|z| z.norm()).fold(0.0, f64::max));
    let target = tol::NEWTON_TOL * scale;

    let mut x = to_dvector(guess.coords());
    let yv = to_dvector(y.coords());
    let mut res = {
        let fx = map.eval_value(&DomainPoint::new(x.iter().cloned().collect()))?;
        (to_dvector(fx.coords()) - &yv).norm()
    };

    for iter in 0..tol::NEWTON_MAX_ITER {
        if res <= target {
            break;
        }
        let jet = map.eval_jet(&DomainPoint::new(x.iter().cloned().collect()))?;
        let r = to_dvector(&jet.value) - &yv;
        let lu = jet.jacobian.clone().lu();
        let step = lu.solve(&r).ok_or(OrbitError::SingularJacobian)?;

        // halve the step until the residual decreases
        let mut factor = 1.0;
        let mut improved = false;
        for _ in 0..tol::NEWTON_MAX_HALVINGS {
            let cand = &x - step.scale(factor);
            let cand_pt = DomainPoint::new(cand.iter().cloned().collect());
            if let Ok(fx) = map.eval_value(&cand_pt) {
                let cand_res = (to_dvector(fx.coords()) - &yv).norm();
                if cand_res < res {
                    x = cand;
                    res = cand_res;
                    improved = true;
                    break;
                }
            }
            factor *= 0.5;
        }
        if !improved {
            return Err(OrbitError::NewtonDiverged { residual: res, iters: iter + 1 });
        }
    }

    if res > target {
        return Err(OrbitError::NewtonDiverged { residual: res, iters: tol::NEWTON_MAX_ITER });
    }
    let x = DomainPoint::new(x.iter().cloned().collect());
    let slack = map.domain.boundary_slack(&x).map_err(OrbitError::Start)?;
    if slack < -tol::EXIT_MARGIN {
        return Err(OrbitError::LeftDomain { slack });
    }
    Ok((x, res))
}

/// Backward orbit `x, f^{-1}(x), ..., f^{-n}(x)`, warm-starting every Newton
/// solve at the previous point. Inversion failures are recorded (not
/// thrown): the record ends with `exit_index` at the failed step, which is
/// the numerical signal that `x` admits no longer backward orbit.
pub fn backward_orbit(map: &MapDef, x: &DomainPoint, n: usize) -> Result<OrbitRecord, OrbitError> {
    if !map.domain.contains(x, 0.0).map_err(OrbitError::Start)? {
        return Err(OrbitError::Start(GeometryError::OutsideDomain {
            slack: map.domain.boundary_slack(x).unwrap_or(f64::NAN),
        }));
    }
    let mut points = Vec::with_capacity(n + 1);
    let mut residuals = Vec::with_capacity(n);
    points.push(x.clone());
    let mut exit_index = None;
    let mut failure = None;
    for k in 1..=n {
        let prev = points.last().unwrap().clone();
        match invert_point(map, &prev, Some(&prev)) {
            Ok((next, res)) => {
                points.push(next);
                residuals.push(res);
            }
            Err(e) => {
                exit_index = Some(k);
                failure = Some(e);
                break;
            }
        }
    }
    Ok(OrbitRecord { direction: Direction::Backward, points, residuals, exit_index, failure })
}

/// Accumulated inverse-Jacobian transport of a tangent direction along a
/// backward orbit: returns `d(f^{-n})_x(v)` for each orbit index, with
/// log-scale bookkeeping to delay overflow. The i-th entry is
/// `(unit direction, log ||scale||)` at `points[i]`.
pub fn transport_backward(
    map: &MapDef,
    orbit: &OrbitRecord,
    dir: &[C],
) -> Result<Vec<(Vec<C>, f64)>, OrbitError> {
    assert_eq!(orbit.direction, Direction::Backward);
    let mut out = Vec::with_capacity(orbit.points.len());
    let norm0 = crate::geometry::norm_sq(dir).sqrt();
    if norm0 == 0.0 {
        return Ok(orbit.points.iter().map(|_| (dir.to_vec(), f64::NEG_INFINITY)).collect());
    }
    let mut v = DVector::from_iterator(dir.len(), dir.iter().map(|z| z / norm0));
    let mut log_scale = norm0.ln();
    out.push((v.iter().cloned().collect(), log_scale));
    for next in orbit.points.iter().skip(1) {
        // derivative of f^{-1} at the previous point is df(next)^{-1}
        let jet = map.eval_jet(next)?;
        let lu: nalgebra::LU<C, nalgebra::Dyn, nalgebra::Dyn> = jet.jacobian.clone().lu();
        v = lu.solve(&v).ok_or(OrbitError::SingularJacobian)?;
        let n = v.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(OrbitError::SingularJacobian);
        }
        v /= C::new(n, 0.0);
        log_scale += n.ln();
        out.push((v.iter().cloned().collect(), log_scale));
    }
    Ok(out)
}

/// Check `f^{-1}(f(x)) = x` on a probe grid; returns the worst deviation.
pub fn inverse_round_trip(map: &MapDef) -> Result<f64, OrbitError> {
    let inv = match map.inverse() {
        Some(i) => i,
        None => return Ok(0.0),
    };
    let mut worst = 0.0f64;
    for p in crate::geometry::probe_points(&map.domain, 25) {
        let fx = map.eval_value(&p)?;
        let back = inv.eval_value(fx.coords())?;
        worst = worst.max(euclid_dist(&back, p.coords()));
    }
    Ok(worst)
}
