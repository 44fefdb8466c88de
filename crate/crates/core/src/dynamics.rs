//! Step sequences, divergence rate, type classification, Denjoy-Wolff and
//! dilation estimation.

use num_complex::Complex64;
use thiserror::Error;

use crate::dsl::{EvalError, MapDef};
use crate::geometry::{
    euclid_dist, norm_sq, one_minus_norm_sq, BoundaryPoint, DomainKind, DomainPoint,
    GeometryError,
};
use crate::holomap::{backward_orbit, forward_orbit, OrbitError, OrbitRecord};
use crate::seq::{monotone_limit, ConvergenceVerdict};
use crate::tol;

type C = Complex64;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error("approach sequence does not converge to the boundary point (gap {0:e})")]
    NotConverging(f64),
    #[error("operation not supported on the {0} domain")]
    UnsupportedDomain(&'static str),
    #[error("at least one start point is required")]
    NoStarts,
    #[error("classification inconclusive")]
    Inconclusive,
}

/// An estimated limit of a monotone distance sequence.
#[derive(Debug, Clone)]
pub struct StepEstimate {
    /// Step size `m` (0 for plain distance sequences).
    pub m: usize,
    /// `values[n] = k(f^{-n-m} x, f^{-n} x)` (or the forward analogue).
    pub values: Vec<f64>,
    /// Extrapolated limit; `+inf` when diverging.
    pub limit: f64,
    pub verdict: ConvergenceVerdict,
}

/// Distance samples `k(points[n+m], points[n])`, truncated where a point
/// gets too close to the boundary for its slack (and hence the distance)
/// to be numerically meaningful.
pub(crate) fn step_values(map: &MapDef, points: &[DomainPoint], m: usize) -> Vec<f64> {
    let mut out = Vec::new();
    if points.len() <= m {
        return out;
    }
    for n in 0..points.len() - m {
        if !map.domain.distance_reliable(&points[n]) || !map.domain.distance_reliable(&points[n + m])
        {
            break;
        }
        match map.domain.distance(&points[n + m], &points[n]) {
            Ok(v) if v.is_finite() => out.push(v),
            _ => break,
        }
    }
    out
}

/// Backward `m`-step sequence from `x`: the monotone increasing sequence
/// `k(f^{-n-m} x, f^{-n} x)` with its extrapolated limit. A backward orbit
/// that terminates early yields the partial values with an inconclusive
/// verdict.
pub fn backward_step(
    map: &MapDef,
    x: &DomainPoint,
    m: usize,
    n_max: usize,
) -> Result<StepEstimate, DynamicsError> {
    let orbit = backward_orbit(map, x, n_max + m)?;
    Ok(backward_step_from_orbit(map, &orbit, m, n_max))
}

pub(crate) fn backward_step_from_orbit(
    map: &MapDef,
    orbit: &OrbitRecord,
    m: usize,
    n_max: usize,
) -> StepEstimate {
    let mut values = step_values(map, &orbit.points, m);
    values.truncate(n_max + 1);
    let short = orbit.len() < n_max + m + 1;
    let est = monotone_limit(&values, true, None);
    StepEstimate {
        m,
        values,
        limit: est.limit,
        verdict: if short { ConvergenceVerdict::Inconclusive } else { est.verdict },
    }
}

/// Forward `m`-step sequence `k(f^n x, f^{n+m} x)`, monotone decreasing.
pub fn forward_step(
    map: &MapDef,
    x: &DomainPoint,
    m: usize,
    n_max: usize,
) -> Result<StepEstimate, DynamicsError> {
    let orbit = forward_orbit(map, x, n_max + m)?;
    let mut values = step_values(map, &orbit.points, m);
    values.truncate(n_max + 1);
    let est = monotone_limit(&values, false, None);
    Ok(StepEstimate { m, values, limit: est.limit, verdict: est.verdict })
}

/// Certified upper bound for the divergence rate:
/// `min over 1 <= j <= m_max of k(x, f^j x)/j`, decreasing in `m_max`.
pub fn divergence_rate(map: &MapDef, x: &DomainPoint, m_max: usize) -> Result<f64, DynamicsError> {
    let orbit = forward_orbit(map, x, m_max)?;
    let mut best = f64::INFINITY;
    for j in 1..orbit.len() {
        if !map.domain.distance_reliable(&orbit.points[j]) {
            break;
        }
        match map.domain.distance(x, &orbit.points[j]) {
            Ok(d) if d.is_finite() => best = best.min(d / j as f64),
            _ => break,
        }
    }
    Ok(if best.is_finite() { best } else { 0.0 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapType {
    Elliptic,
    Parabolic,
    Hyperbolic,
    Inconclusive,
}

impl std::fmt::Display for MapType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MapType::Elliptic => "elliptic",
            MapType::Parabolic => "parabolic",
            MapType::Hyperbolic => "hyperbolic",
            MapType::Inconclusive => "inconclusive",
        })
    }
}

/// What the classification was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassifyBasis {
    /// Backward steps along the orbit through the point.
    Backward,
    /// No backward orbit of the configured length: forward data only.
    ForwardOnly,
}

/// One row of the doubling-test evidence table.
#[derive(Debug, Clone)]
pub struct DoublingRow {
    pub m: usize,
    /// `sigma_m` (backward basis) or the rate bound at `m` (forward basis).
    pub value: f64,
    /// Increment to the previous row.
    pub delta: f64,
    /// `value / m` (backward basis) or the value itself (forward basis).
    pub rate: f64,
}

#[derive(Debug, Clone)]
pub struct TypeReport {
    pub map_type: MapType,
    /// Estimated `lim sigma_m / m`; 0 for elliptic and parabolic.
    pub rate: f64,
    pub evidence: Vec<DoublingRow>,
    pub basis: ClassifyBasis,
}

#[derive(Debug, Clone, Copy)]
pub struct ClassifyConfig {
    /// Largest step is `2^j_max`.
    pub j_max: u32,
    /// Backward depth for each sigma estimate.
    pub n_max: usize,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig { j_max: 6, n_max: 64 }
    }
}

/// Elliptic/parabolic/hyperbolic trichotomy from the backward steps at
/// doubling step sizes: bounded `sigma_m` means elliptic, unbounded with
/// `sigma_m/m -> 0` parabolic, stabilized positive rate hyperbolic.
pub fn classify_type(map: &MapDef, x: &DomainPoint) -> Result<TypeReport, DynamicsError> {
    classify_type_with(map, x, ClassifyConfig::default())
}

pub fn classify_type_with(
    map: &MapDef,
    x: &DomainPoint,
    cfg: ClassifyConfig,
) -> Result<TypeReport, DynamicsError> {
    let m_top = 1usize << cfg.j_max;
    let orbit = backward_orbit(map, x, cfg.n_max + m_top)?;

    if orbit.len() > 2 {
        // collect sigma at doubling step sizes while the orbit depth and
        // slack precision allow it
        let mut sigmas = Vec::new();
        for j in 0..=cfg.j_max {
            let m = 1usize << j;
            if orbit.len() <= m {
                break;
            }
            let available = orbit.len() - 1 - m;
            let est = backward_step_from_orbit(map, &orbit, m, available);
            if !est.limit.is_finite() || est.values.is_empty() {
                break;
            }
            sigmas.push((m, est.limit));
        }
        if sigmas.len() >= 3 {
            return Ok(classify_from_sigmas(&sigmas));
        }
    }

    classify_forward_only(map, x, cfg)
}

fn classify_from_sigmas(sigmas: &[(usize, f64)]) -> TypeReport {
    let mut evidence = Vec::with_capacity(sigmas.len());
    for (i, &(m, s)) in sigmas.iter().enumerate() {
        let delta = if i == 0 { s } else { s - sigmas[i - 1].1 };
        evidence.push(DoublingRow { m, value: s, delta, rate: s / m as f64 });
    }
    let k = sigmas.len();
    if k < 3 {
        return TypeReport {
            map_type: MapType::Inconclusive,
            rate: evidence.last().map_or(0.0, |r| r.rate),
            evidence,
            basis: ClassifyBasis::Backward,
        };
    }

    let (m2, s2) = sigmas[k - 1];
    let (m1, s1) = sigmas[k - 2];
    let (m0, s0) = sigmas[k - 3];
    let d_last = s2 - s1;
    let d_prev = s1 - s0;

    // bounded sigma: the doubling increments have collapsed
    if d_last.abs() < tol::CONVERGE_DELTA {
        return TypeReport {
            map_type: MapType::Elliptic,
            rate: 0.0,
            evidence,
            basis: ClassifyBasis::Backward,
        };
    }

    // difference quotients of sigma between doublings kill additive
    // constants, so they converge to the rate faster than sigma_m/m
    let r_last = d_last / (m2 - m1) as f64;
    let r_prev = d_prev / (m1 - m0) as f64;
    if r_last > tol::RATE_EPS && (r_last - r_prev).abs() <= 0.1 * r_last + 1e-9 {
        return TypeReport {
            map_type: MapType::Hyperbolic,
            rate: r_last,
            evidence,
            basis: ClassifyBasis::Backward,
        };
    }

    // unbounded but with decaying rate: log-type growth
    let rate2 = s2 / m2 as f64;
    let rate1 = s1 / m1 as f64;
    let rate0 = s0 / m0 as f64;
    if d_last >= tol::DIVERGE_DELTA
        && d_prev >= tol::DIVERGE_DELTA
        && rate2 <= 0.8 * rate1
        && rate1 <= 0.8 * rate0
    {
        return TypeReport {
            map_type: MapType::Parabolic,
            rate: 0.0,
            evidence,
            basis: ClassifyBasis::Backward,
        };
    }

    TypeReport { map_type: MapType::Inconclusive, rate: rate2, evidence, basis: ClassifyBasis::Backward }
}

fn classify_forward_only(
    map: &MapDef,
    x: &DomainPoint,
    cfg: ClassifyConfig,
) -> Result<TypeReport, DynamicsError> {
    let n = 1usize << (cfg.j_max + 2);
    let orbit = forward_orbit(map, x, n)?;
    let chart = ModelChart::for_domain(map.domain.kind());

    // bounded forward orbit: elliptic
    let norms: Vec<f64> = orbit
        .points
        .iter()
        .filter_map(|p| chart.to_model(p))
        .map(|m| norm_sq(&m).sqrt())
        .collect();
    let tail_start = norms.len() - (norms.len() / 4).max(1);
    let tail_max = norms[tail_start..].iter().cloned().fold(0.0, f64::max);
    if orbit.complete() && tail_max < 1.0 - 1e-3 {
        return Ok(TypeReport {
            map_type: MapType::Elliptic,
            rate: 0.0,
            evidence: Vec::new(),
            basis: ClassifyBasis::ForwardOnly,
        });
    }

    // divergence-rate bounds at doubling horizons
    let mut dist = Vec::with_capacity(orbit.len());
    for j in 1..orbit.len() {
        if !map.domain.distance_reliable(&orbit.points[j]) {
            break;
        }
        match map.domain.distance(x, &orbit.points[j]) {
            Ok(d) if d.is_finite() => dist.push(d),
            _ => break,
        }
    }
    let mut rows = Vec::new();
    let mut best = f64::INFINITY;
    let mut m = 1usize;
    let mut covered = 0usize;
    while m <= dist.len() {
        for (j, d) in dist.iter().enumerate().take(m).skip(covered) {
            best = best.min(d / (j + 1) as f64);
        }
        covered = m;
        let prev = rows.last().map_or(0.0, |r: &DoublingRow| r.rate);
        rows.push(DoublingRow { m, value: best, delta: best - prev, rate: best });
        m *= 2;
    }
    let k = rows.len();
    if k < 3 {
        return Ok(TypeReport {
            map_type: MapType::Inconclusive,
            rate: rows.last().map_or(0.0, |r| r.rate),
            evidence: rows,
            basis: ClassifyBasis::ForwardOnly,
        });
    }
    let (r2, r1, r0) = (rows[k - 1].rate, rows[k - 2].rate, rows[k - 3].rate);
    let report = if r2 > tol::RATE_EPS && (r2 - r1).abs() <= 0.1 * r2 + 1e-9 {
        (MapType::Hyperbolic, r2)
    } else if r2 <= 0.8 * r1 && r1 <= 0.8 * r0 {
        (MapType::Parabolic, 0.0)
    } else {
        (MapType::Inconclusive, r2)
    };
    Ok(TypeReport {
        map_type: report.0,
        rate: report.1,
        evidence: rows,
        basis: ClassifyBasis::ForwardOnly,
    })
}

// ---------------------------------------------------------------------------
// model charts
// ---------------------------------------------------------------------------

/// Chart onto the unit-ball model used for boundary bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ModelChart {
    Identity,
    /// Inverse Cayley transform of the Siegel half-space.
    Cayley,
    /// Slit plane -> right half-plane (sqrt) -> disc.
    Slit,
}

impl ModelChart {
    pub(crate) fn for_domain(kind: DomainKind) -> ModelChart {
        match kind {
            DomainKind::Disc | DomainKind::Ball | DomainKind::Polydisc => ModelChart::Identity,
            DomainKind::Siegel => ModelChart::Cayley,
            DomainKind::SlitPlane => ModelChart::Slit,
        }
    }

    pub(crate) fn to_model(self, p: &DomainPoint) -> Option<Vec<C>> {
        let out = match self {
            ModelChart::Identity => p.coords().to_vec(),
            ModelChart::Cayley => {
                let c = p.coords();
                let zi = c[0] + C::i();
                if zi.norm_sqr() == 0.0 {
                    return None;
                }
                let mut v = Vec::with_capacity(c.len());
                v.push((c[0] - C::i()) / zi);
                for w in &c[1..] {
                    v.push(C::new(0.0, 2.0) * w / zi);
                }
                v
            }
            ModelChart::Slit => {
                let w = p.coords()[0].sqrt();
                vec![(w - 1.0) / (w + 1.0)]
            }
        };
        if out.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            Some(out)
        } else {
            None
        }
    }

    #[allow(clippy::wrong_self_convention)]
    pub(crate) fn from_model(self, z: &[C]) -> Option<DomainPoint> {
        let out = match self {
            ModelChart::Identity => z.to_vec(),
            ModelChart::Cayley => {
                let denom = C::new(1.0, 0.0) - z[0];
                if denom.norm_sqr() == 0.0 {
                    return None;
                }
                let mut v = Vec::with_capacity(z.len());
                v.push(C::i() * (C::new(1.0, 0.0) + z[0]) / denom);
                for w in &z[1..] {
                    v.push(w / denom);
                }
                v
            }
            ModelChart::Slit => {
                let denom = C::new(1.0, 0.0) - z[0];
                if denom.norm_sqr() == 0.0 {
                    return None;
                }
                let w = (C::new(1.0, 0.0) + z[0]) / denom;
                vec![w * w]
            }
        };
        if out.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            Some(DomainPoint::new(out))
        } else {
            None
        }
    }

    /// The map conjugated into the ball model.
    pub(crate) fn conjugate(
        self,
        map: &MapDef,
        z: &[C],
    ) -> Option<Vec<C>> {
        let p = self.from_model(z)?;
        let fp = map.eval_value(&p).ok()?;
        self.to_model(&fp)
    }
}

/// The point in the unit-ball model used for boundary bookkeeping: identity
/// on disc/ball/polydisc coordinates, inverse Cayley transform on the Siegel
/// half-space, the sqrt chart on the slit plane.
pub fn ball_model_point(
    domain: &crate::geometry::DomainModel,
    p: &DomainPoint,
) -> Option<DomainPoint> {
    ModelChart::for_domain(domain.kind()).to_model(p).map(DomainPoint::new)
}

// ---------------------------------------------------------------------------
// Denjoy-Wolff
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub enum DwLocation {
    /// Interior fixed point (elliptic case), in original coordinates.
    Interior(DomainPoint),
    Boundary(BoundaryPoint),
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct DWReport {
    pub location: DwLocation,
    /// Dilation estimate at the boundary point; `None` for interior reports.
    pub dilation: Option<f64>,
    pub converged_starts: usize,
    /// Common boundary limit in ball-model coordinates, when found.
    pub ball_point: Option<Vec<C>>,
    pub diagnostics: String,
}

/// Componentwise Aitken extrapolation of three vectors.
fn aitken_vec(a: &[C], b: &[C], c: &[C]) -> Vec<C> {
    let ext = |x: f64, y: f64, z: f64| -> f64 {
        let d2 = (z - y) - (y - x);
        if d2.abs() < 1e-14 * (z.abs() + 1.0) {
            z
        } else {
            z - (z - y) * (z - y) / d2
        }
    };
    a.iter()
        .zip(b)
        .zip(c)
        .map(|((x, y), z)| C::new(ext(x.re, y.re, z.re), ext(x.im, y.im, z.im)))
        .collect()
}

/// Two-level Aitken cascade on five samples toward the boundary,
/// renormalized to a unit vector. One level kills the leading geometric
/// tail; orbits reaching the boundary like `1/sqrt(n)` or `1/n` (parabolic
/// and slit-chart cases) leave a second-order tail the repeat pass removes.
fn extrapolate_unit(samples: &[Vec<C>]) -> Vec<C> {
    let mut level: Vec<Vec<C>> = samples.to_vec();
    while level.len() >= 3 {
        level = (0..level.len() - 2)
            .map(|i| aitken_vec(&level[i], &level[i + 1], &level[i + 2]))
            .collect();
    }
    let mut out = level.pop().expect("at least one sample");
    let n = norm_sq(&out).sqrt();
    if n > 0.0 {
        for z in &mut out {
            *z /= n;
        }
    }
    out
}

/// Run forward orbits from every start; report a common boundary limit (with
/// dilation along the first orbit), an interior fixed point, or an
/// inconclusive disagreement.
pub fn denjoy_wolff(
    map: &MapDef,
    starts: &[DomainPoint],
    n: usize,
) -> Result<DWReport, DynamicsError> {
    if starts.is_empty() {
        return Err(DynamicsError::NoStarts);
    }
    let chart = ModelChart::for_domain(map.domain.kind());

    let mut model_orbits: Vec<Vec<Vec<C>>> = Vec::with_capacity(starts.len());
    for start in starts {
        let mut current = start.clone();
        let mut model: Vec<Vec<C>> = Vec::with_capacity(n + 1);
        if let Some(m) = chart.to_model(&current) {
            model.push(m);
        }
        for _ in 0..n {
            let next = match map.eval_value(&current) {
                Ok(p) => p,
                Err(_) => break,
            };
            if next.coords().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                break;
            }
            let m = match chart.to_model(&next) {
                Some(m) => m,
                None => break,
            };
            let stalled = model
                .last()
                .map(|prev| euclid_dist(prev, &m) < 1e-16)
                .unwrap_or(false);
            model.push(m);
            current = next;
            if stalled && model.len() > 32 {
                break;
            }
        }
        if model.len() < 17 {
            return Ok(DWReport {
                location: DwLocation::Inconclusive,
                dilation: None,
                converged_starts: 0,
                ball_point: None,
                diagnostics: format!("orbit from start produced only {} usable points", model.len()),
            });
        }
        model_orbits.push(model);
    }

    // interior test: the orbit tail stays well inside the model ball *and*
    // is not still drifting outward (the slit chart reaches the boundary
    // only like 1 - 2/sqrt(n), which would masquerade as interior at any
    // fixed radius threshold)
    let interior = model_orbits.iter().all(|orbit| {
        let half = orbit.len() / 2;
        let norm_max = |s: &[Vec<C>]| s.iter().map(|p| norm_sq(p).sqrt()).fold(0.0, f64::max);
        let early = norm_max(&orbit[..half]);
        let late = norm_max(&orbit[half..]);
        late < 1.0 - 1e-3 && late <= early + 1e-6
    });
    if interior {
        let fixed = interior_fixed_point(map, &model_orbits[0], chart)?;
        return Ok(DWReport {
            location: DwLocation::Interior(fixed),
            dilation: None,
            converged_starts: starts.len(),
            ball_point: None,
            diagnostics: "orbits remain in a compact subset".into(),
        });
    }

    // boundary limits per start, extrapolated from normalized samples at
    // L/16, L/8, L/4, L/2 and L
    let mut limits: Vec<Vec<C>> = Vec::with_capacity(model_orbits.len());
    for orbit in &model_orbits {
        let last = orbit.len() - 1;
        let normalize = |p: &[C]| -> Vec<C> {
            let n = norm_sq(p).sqrt();
            p.iter().map(|z| z / n).collect()
        };
        let samples: Vec<Vec<C>> = [last / 16, last / 8, last / 4, last / 2, last]
            .iter()
            .map(|&i| normalize(&orbit[i]))
            .collect();
        limits.push(extrapolate_unit(&samples));
    }
    let mut worst = 0.0f64;
    for i in 0..limits.len() {
        for j in i + 1..limits.len() {
            worst = worst.max(euclid_dist(&limits[i], &limits[j]));
        }
    }
    if worst > tol::DW_AGREE_TOL {
        return Ok(DWReport {
            location: DwLocation::Inconclusive,
            dilation: None,
            converged_starts: 0,
            ball_point: None,
            diagnostics: format!(
                "normalized orbit limits disagree by {worst:e} (tolerance {:e})",
                tol::DW_AGREE_TOL
            ),
        });
    }

    let zeta = limits[0].clone();
    let approach: Vec<DomainPoint> = {
        let orbit = &model_orbits[0];
        let from = orbit.len().saturating_sub(tol::DILATION_TAIL + 1);
        orbit[from..].iter().cloned().map(DomainPoint::new).collect()
    };
    let dilation = dilation_in_model(map, chart, &zeta, &approach).ok();

    let location = boundary_point_for_domain(map.domain.kind(), &zeta);
    Ok(DWReport {
        location: DwLocation::Boundary(location),
        dilation,
        converged_starts: starts.len(),
        ball_point: Some(zeta),
        diagnostics: format!("normalized limits agree within {worst:e}"),
    })
}

fn boundary_point_for_domain(kind: DomainKind, zeta: &[C]) -> BoundaryPoint {
    match kind {
        DomainKind::Siegel | DomainKind::SlitPlane => {
            let mut e1 = vec![C::new(0.0, 0.0); zeta.len()];
            e1[0] = C::new(1.0, 0.0);
            if euclid_dist(zeta, &e1) < 1e-9 {
                // Cayley image of the point at infinity
                BoundaryPoint::Infinity
            } else {
                BoundaryPoint::UnitVector(zeta.to_vec())
            }
        }
        _ => BoundaryPoint::UnitVector(zeta.to_vec()),
    }
}

fn interior_fixed_point(
    map: &MapDef,
    model_orbit: &[Vec<C>],
    chart: ModelChart,
) -> Result<DomainPoint, DynamicsError> {
    use nalgebra::{DMatrix, DVector};
    // Cesaro mean of the orbit tail as the seed
    let tail_start = model_orbit.len() - (model_orbit.len() / 2).max(1);
    let tail = &model_orbit[tail_start..];
    let q = tail[0].len();
    let mut mean = vec![C::new(0.0, 0.0); q];
    for p in tail {
        for (m, z) in mean.iter_mut().zip(p) {
            *m += z;
        }
    }
    for m in &mut mean {
        *m /= tail.len() as f64;
    }
    let mut p = chart
        .from_model(&mean)
        .filter(|p| map.domain.contains(p, 0.0).unwrap_or(false))
        .unwrap_or_else(|| chart.from_model(tail.last().unwrap()).unwrap());

    // Newton on f(p) - p = 0
    for _ in 0..50 {
        let jet = map.eval_jet(&p)?;
        let r = DVector::from_iterator(q, jet.value.iter().zip(p.coords()).map(|(f, x)| f - x));
        if r.norm() < 1e-13 {
            break;
        }
        let j = &jet.jacobian - DMatrix::<C>::identity(q, q);
        match j.lu().solve(&r) {
            Some(step) => {
                let coords: Vec<C> =
                    p.coords().iter().zip(step.iter()).map(|(x, s)| x - s).collect();
                let cand = DomainPoint::new(coords);
                if map.domain.contains(&cand, 0.0).unwrap_or(false) {
                    p = cand;
                } else {
                    break;
                }
            }
            None => break,
        }
    }
    Ok(p)
}

// ---------------------------------------------------------------------------
// dilation
// ---------------------------------------------------------------------------

/// Dilation estimate at a boundary point of the ball model: minimum over the
/// approach tail of `(1 - ||f(z_k)||) / (1 - ||z_k||)`, a surrogate for the
/// liminf over all `z -> zeta`. The approach points are ball-model points;
/// Siegel and slit-plane maps are conjugated into the model automatically.
pub fn dilation_at(
    map: &MapDef,
    zeta: &BoundaryPoint,
    approach: &[DomainPoint],
) -> Result<f64, DynamicsError> {
    let chart = ModelChart::for_domain(map.domain.kind());
    if map.domain.kind() == DomainKind::Polydisc {
        return Err(DynamicsError::UnsupportedDomain("polydisc"));
    }
    let q_model = match chart {
        ModelChart::Identity | ModelChart::Cayley => map.domain.dimension(),
        ModelChart::Slit => 1,
    };
    let zeta = zeta.as_unit_vector(q_model)?;
    if approach.is_empty() {
        return Err(DynamicsError::NotConverging(f64::INFINITY));
    }
    let last = approach.last().unwrap();
    let gap = euclid_dist(last.coords(), &zeta);
    if gap > 1e-3 {
        return Err(DynamicsError::NotConverging(gap));
    }
    dilation_in_model(map, chart, &zeta, approach)
}

fn dilation_in_model(
    map: &MapDef,
    chart: ModelChart,
    _zeta: &[C],
    approach: &[DomainPoint],
) -> Result<f64, DynamicsError> {
    let from = approach.len().saturating_sub(tol::DILATION_TAIL);
    let mut best = f64::INFINITY;
    for p in &approach[from..] {
        let z = p.coords();
        let fz = match chart.conjugate(map, z) {
            Some(f) => f,
            None => continue,
        };
        let one_minus_z = one_minus_norm_sq(z) / (1.0 + norm_sq(z).sqrt());
        let one_minus_fz = one_minus_norm_sq(&fz) / (1.0 + norm_sq(&fz).sqrt());
        // below ~1e4 ulps of the boundary the quotient is rounding noise
        if one_minus_z < 1e-11 || one_minus_fz < 1e-12 {
            continue;
        }
        best = best.min(one_minus_fz / one_minus_z);
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(DynamicsError::NotConverging(f64::NAN))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_map;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn shear() -> MapDef {
        parse_map("siegel 2 : (2*z1 + i*z2^2, z2) inverse ((z1 - i*z2^2)/2, z2)").unwrap()
    }

    fn translation() -> MapDef {
        parse_map("siegel 1 : (z1 + 1) inverse (z1 - 1)").unwrap()
    }

    #[test]
    fn backward_step_of_the_shear_is_log_two() {
        let est = backward_step(&shear(), &DomainPoint::new(vec![c(0.0, 1.0), c(0.0, 0.0)]), 1, 32)
            .unwrap();
        assert_eq!(est.verdict, ConvergenceVerdict::Converged);
        assert_relative_eq!(est.limit, 2.0f64.ln(), max_relative = 1e-12);
    }

    #[test]
    fn backward_step_identity_is_zero() {
        let id = parse_map("disc 1 : (z1) inverse (z1)").unwrap();
        let est = backward_step(&id, &DomainPoint::scalar(c(0.2, 0.1)), 3, 16).unwrap();
        assert_eq!(est.verdict, ConvergenceVerdict::Converged);
        assert_eq!(est.limit, 0.0);
    }

    #[test]
    fn backward_step_translation_value() {
        let est = backward_step(&translation(), &DomainPoint::scalar(c(0.0, 1.0)), 1, 32).unwrap();
        let expected = ((5.0f64.sqrt() + 1.0) / (5.0f64.sqrt() - 1.0)).ln();
        assert_relative_eq!(est.limit, expected, max_relative = 1e-12);
        assert_relative_eq!(est.limit, 0.962424, max_relative = 1e-5);
    }

    #[test]
    fn forward_step_examples() {
        let est = forward_step(&shear(), &DomainPoint::new(vec![c(0.0, 1.0), c(0.0, 0.0)]), 1, 32)
            .unwrap();
        assert_relative_eq!(est.limit, 2.0f64.ln(), max_relative = 1e-12);

        let rot = parse_map("disc 1 : (i*z1)").unwrap();
        let est = forward_step(&rot, &DomainPoint::scalar(c(0.5, 0.0)), 4, 32).unwrap();
        assert!(est.limit < 1e-12);

        let id = parse_map("disc 1 : (z1)").unwrap();
        let est = forward_step(&id, &DomainPoint::scalar(c(0.5, 0.0)), 1, 16).unwrap();
        assert_eq!(est.limit, 0.0);
    }

    #[test]
    fn divergence_rate_examples() {
        let r = divergence_rate(&shear(), &DomainPoint::new(vec![c(0.0, 1.0), c(0.0, 0.0)]), 50)
            .unwrap();
        assert_relative_eq!(r, 2.0f64.ln(), max_relative = 1e-12);

        let id = parse_map("disc 1 : (z1)").unwrap();
        assert_eq!(divergence_rate(&id, &DomainPoint::scalar(c(0.1, 0.0)), 20).unwrap(), 0.0);

        let r = divergence_rate(&translation(), &DomainPoint::scalar(c(0.0, 1.0)), 50).unwrap();
        // roughly 2 log(m)/m at the horizon, decreasing in m_max
        assert!(r > 0.0 && r < 0.2);
        let r_long = divergence_rate(&translation(), &DomainPoint::scalar(c(0.0, 1.0)), 200).unwrap();
        assert!(r_long < r);
    }

    #[test]
    fn classify_the_three_types() {
        let report = classify_type(&shear(), &DomainPoint::new(vec![c(0.0, 1.0), c(0.0, 0.0)]))
            .unwrap();
        assert_eq!(report.map_type, MapType::Hyperbolic);
        assert_relative_eq!(report.rate, 2.0f64.ln(), max_relative = 1e-9);
        assert_eq!(report.basis, ClassifyBasis::Backward);

        let report = classify_type(&translation(), &DomainPoint::scalar(c(0.0, 1.0))).unwrap();
        assert_eq!(report.map_type, MapType::Parabolic);

        let rot = parse_map("ball 2 : (i*z1, -z2) inverse (-i*z1, -z2)").unwrap();
        let report =
            classify_type(&rot, &DomainPoint::new(vec![c(0.3, 0.0), c(0.2, 0.0)])).unwrap();
        assert_eq!(report.map_type, MapType::Elliptic);
    }

    #[test]
    fn classify_falls_back_without_backward_orbit() {
        // no inverse expressions and Newton cannot reach a preimage of a
        // point outside f(X): contraction toward 0 with image radius 1/4
        let m = parse_map("disc 1 : (z1/4)").unwrap();
        let report = classify_type(&m, &DomainPoint::scalar(c(0.5, 0.0))).unwrap();
        assert_eq!(report.basis, ClassifyBasis::ForwardOnly);
        assert_eq!(report.map_type, MapType::Elliptic);
    }

    #[test]
    fn dw_interior_rotation() {
        let rot = parse_map("disc 1 : (i*z1)").unwrap();
        let report = denjoy_wolff(&rot, &[DomainPoint::scalar(c(0.5, 0.0))], 256).unwrap();
        match report.location {
            DwLocation::Interior(p) => assert!(p[0].norm() < 1e-10),
            other => panic!("expected interior, got {other:?}"),
        }
    }

    #[test]
    fn dw_boundary_of_the_shear() {
        let starts = vec![
            DomainPoint::new(vec![c(0.0, 1.0), c(0.0, 0.0)]),
            DomainPoint::new(vec![c(0.0, 2.0), c(0.0, 1.0)]),
        ];
        let report = denjoy_wolff(&shear(), &starts, 256).unwrap();
        match &report.location {
            DwLocation::Boundary(BoundaryPoint::Infinity) => {}
            other => panic!("expected the point at infinity, got {other:?}"),
        }
        let zeta = report.ball_point.unwrap();
        assert!(euclid_dist(&zeta, &[c(1.0, 0.0), c(0.0, 0.0)]) < 1e-9);
    }

    #[test]
    fn dw_attracting_disc_automorphism() {
        let m = parse_map("disc 1 : ((z1 + 1/2)/(1 + z1/2)) inverse ((z1 - 1/2)/(1 - z1/2))")
            .unwrap();
        let report = denjoy_wolff(&m, &[DomainPoint::scalar(c(0.0, 0.0))], 512).unwrap();
        match &report.location {
            DwLocation::Boundary(BoundaryPoint::UnitVector(v)) => {
                assert!((v[0] - c(1.0, 0.0)).norm() < 1e-9)
            }
            other => panic!("expected boundary point 1, got {other:?}"),
        }
        let lambda = report.dilation.unwrap();
        assert_relative_eq!(lambda, 1.0 / 3.0, max_relative = 1e-3);
    }

    #[test]
    fn dilation_examples() {
        // the shear in the ball model: repelling point is the Cayley
        // preimage of 0, i.e. (-1, 0), with dilation 2
        let zeta = BoundaryPoint::UnitVector(vec![c(-1.0, 0.0), c(0.0, 0.0)]);
        let approach: Vec<DomainPoint> = (5..40)
            .map(|k| DomainPoint::new(vec![c(-(1.0 - (2.0f64).powi(-k)), 0.0), c(0.0, 0.0)]))
            .collect();
        let lambda = dilation_at(&shear(), &zeta, &approach).unwrap();
        assert_relative_eq!(lambda, 2.0, epsilon = 1e-3);

        // identity map has dilation 1 everywhere
        let id = parse_map("disc 1 : (z1)").unwrap();
        let approach: Vec<DomainPoint> =
            (5..40).map(|k| DomainPoint::scalar(c(1.0 - (2.0f64).powi(-k), 0.0))).collect();
        let lambda =
            dilation_at(&id, &BoundaryPoint::UnitVector(vec![c(1.0, 0.0)]), &approach).unwrap();
        assert_relative_eq!(lambda, 1.0, epsilon = 1e-12);

        // repelling multiplier 3 at +1 for (z - 1/2)/(1 - z/2)
        let m = parse_map("disc 1 : ((z1 - 0.5)/(1 - 0.5*z1))").unwrap();
        let lambda =
            dilation_at(&m, &BoundaryPoint::UnitVector(vec![c(1.0, 0.0)]), &approach).unwrap();
        assert_relative_eq!(lambda, 3.0, epsilon = 1e-3);

        // non-converging approach is rejected
        let err = dilation_at(
            &m,
            &BoundaryPoint::UnitVector(vec![c(1.0, 0.0)]),
            &[DomainPoint::scalar(c(0.0, 0.0))],
        )
        .unwrap_err();
        assert!(matches!(err, DynamicsError::NotConverging(_)));
    }
}
