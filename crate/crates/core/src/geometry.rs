//! Kobayashi distance and metric on the catalog domains.
//!
//! Supported domains: unit disc, unit ball `B^q`, polydisc `D^q`, Siegel
//! upper half-space `H^q = {(z,w) : Im z > ||w||^2}`, and the slit plane
//! `C \ R^-`. Distances follow the doubled convention
//! `k(0, r) = log((1+r)/(1-r))`, under which the disc metric at the origin
//! is 2 and hyperbolic automorphism rates come out as `log(lambda)`.
//!
//! Near the boundary everything is evaluated through cancellation-free
//! Mobius invariants: for the ball,
//! `rho^2 = (|<x,h>|^2 + (1-||x||^2)||h||^2) / |1 - <x,y>|^2` with
//! `h = y - x`, and `1 - rho^2 = (1-||x||^2)(1-||y||^2) / |1 - <x,y>|^2`;
//! the Siegel model has the analogous pair built from boundary slacks, so
//! distances between deep backward-orbit points lose no precision.

use num_complex::Complex64;
use thiserror::Error;

use crate::tol;

type C = Complex64;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GeometryError {
    #[error("dimension mismatch: domain has dimension {expected}, point has {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point lies outside the domain (slack {slack:e})")]
    OutsideDomain { slack: f64 },
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("Cayley transform pole at z1 = 1")]
    CayleyPole,
    #[error("Koranyi amplitude must exceed 1, got {0}")]
    AmplitudeOutOfRange(f64),
    #[error("boundary point must be a unit vector (norm {0})")]
    NotUnitVector(f64),
    #[error("empty sequence")]
    EmptySequence,
}

/// Distance normalization. `Doubled` is the crate's native scale; `Arctanh`
/// halves every distance and metric value for comparison with texts that use
/// `k(0,r) = arctanh(r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Convention {
    #[default]
    Doubled,
    Arctanh,
}

impl Convention {
    pub fn factor(self) -> f64 {
        match self {
            Convention::Doubled => 1.0,
            Convention::Arctanh => 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    Disc,
    Ball,
    Polydisc,
    Siegel,
    SlitPlane,
}

impl DomainKind {
    pub fn name(self) -> &'static str {
        match self {
            DomainKind::Disc => "disc",
            DomainKind::Ball => "ball",
            DomainKind::Polydisc => "polydisc",
            DomainKind::Siegel => "siegel",
            DomainKind::SlitPlane => "slitplane",
        }
    }
}

/// One of the supported hyperbolic domains, with its complex dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DomainModel {
    kind: DomainKind,
    q: usize,
}

/// A point of a domain, as a vector of `q` complex coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainPoint {
    coords: Vec<C>,
}

impl DomainPoint {
    pub fn new(coords: Vec<C>) -> Self {
        DomainPoint { coords }
    }

    /// Convenience constructor for one-dimensional domains.
    pub fn scalar(z: C) -> Self {
        DomainPoint { coords: vec![z] }
    }

    pub fn coords(&self) -> &[C] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<C> {
        self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

impl From<Vec<C>> for DomainPoint {
    fn from(coords: Vec<C>) -> Self {
        DomainPoint { coords }
    }
}

impl std::ops::Index<usize> for DomainPoint {
    type Output = C;
    fn index(&self, i: usize) -> &C {
        &self.coords[i]
    }
}

/// A tangent vector attached to a domain point.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    pub base: DomainPoint,
    pub dir: Vec<C>,
}

impl TangentVector {
    pub fn new(base: DomainPoint, dir: Vec<C>) -> Self {
        TangentVector { base, dir }
    }
}

/// A boundary point: a unit vector in the ball model, the point at infinity
/// of the Siegel model, or a finite boundary value of a planar domain.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryPoint {
    UnitVector(Vec<C>),
    Infinity,
    Finite(C),
}

impl BoundaryPoint {
    /// The point as a unit vector of the ball model of dimension `q`.
    /// `Infinity` maps to `e1`, the Cayley image of the Siegel infinity.
    pub fn as_unit_vector(&self, q: usize) -> Result<Vec<C>, GeometryError> {
        match self {
            BoundaryPoint::UnitVector(v) => {
                if v.len() != q {
                    return Err(GeometryError::DimensionMismatch {
                        expected: q,
                        got: v.len(),
                    });
                }
                let n = norm_sq(v).sqrt();
                if (n - 1.0).abs() > tol::MEMBERSHIP_MARGIN {
                    return Err(GeometryError::NotUnitVector(n));
                }
                Ok(v.clone())
            }
            BoundaryPoint::Infinity => {
                let mut v = vec![C::new(0.0, 0.0); q];
                v[0] = C::new(1.0, 0.0);
                Ok(v)
            }
            BoundaryPoint::Finite(z) => {
                if q != 1 {
                    return Err(GeometryError::DimensionMismatch { expected: q, got: 1 });
                }
                Ok(vec![*z])
            }
        }
    }
}

// ---------------------------------------------------------------------------
// small complex-vector helpers
// ---------------------------------------------------------------------------

/// Hermitian product `<a, b> = sum a_j conj(b_j)`.
pub fn inner(a: &[C], b: &[C]) -> C {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

pub fn norm_sq(a: &[C]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

pub fn euclid_dist(a: &[C], b: &[C]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// `1 - ||a||^2` by compensated (Neumaier) summation; keeps full relative
/// accuracy of the slack even when `||a||` is close to 1.
pub fn one_minus_norm_sq(a: &[C]) -> f64 {
    let mut sum = 1.0f64;
    let mut comp = 0.0f64;
    let mut add = |x: f64| {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    };
    for z in a {
        add(-(z.re * z.re));
        add(-(z.im * z.im));
    }
    sum + comp
}

/// `k = log((1 + rho)/(1 - rho))` from the invariant pair `(rho^2, 1-rho^2)`.
fn k_from_rho(rho_sq: f64, one_minus_rho_sq: f64) -> f64 {
    let rho = rho_sq.max(0.0).sqrt();
    if one_minus_rho_sq <= 0.0 {
        return f64::INFINITY;
    }
    let one_minus_rho = one_minus_rho_sq / (1.0 + rho);
    (2.0 * rho / one_minus_rho).ln_1p()
}

// ---------------------------------------------------------------------------
// DomainModel
// ---------------------------------------------------------------------------

impl DomainModel {
    pub fn new(kind: DomainKind, q: usize) -> Result<Self, GeometryError> {
        match kind {
            DomainKind::Disc | DomainKind::SlitPlane if q != 1 => Err(
                GeometryError::InvalidDomain(format!("{} requires q = 1, got {q}", kind.name())),
            ),
            _ if q == 0 => Err(GeometryError::InvalidDomain("q must be positive".into())),
            _ => Ok(DomainModel { kind, q }),
        }
    }

    pub fn disc() -> Self {
        DomainModel { kind: DomainKind::Disc, q: 1 }
    }
    pub fn ball(q: usize) -> Result<Self, GeometryError> {
        Self::new(DomainKind::Ball, q)
    }
    pub fn polydisc(q: usize) -> Result<Self, GeometryError> {
        Self::new(DomainKind::Polydisc, q)
    }
    pub fn siegel(q: usize) -> Result<Self, GeometryError> {
        Self::new(DomainKind::Siegel, q)
    }
    pub fn slit_plane() -> Self {
        DomainModel { kind: DomainKind::SlitPlane, q: 1 }
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn dimension(&self) -> usize {
        self.q
    }

    fn check_dim(&self, p: &[C]) -> Result<(), GeometryError> {
        if p.len() != self.q {
            Err(GeometryError::DimensionMismatch { expected: self.q, got: p.len() })
        } else {
            Ok(())
        }
    }

    /// Signed distance-like slack to the boundary: positive inside, negative
    /// outside. Ball-like domains use `1 - ||z||` (per coordinate for the
    /// polydisc), the Siegel model uses `Im z1 - ||w||^2`, the slit plane the
    /// Euclidean distance to the slit.
    pub fn boundary_slack(&self, p: &DomainPoint) -> Result<f64, GeometryError> {
        self.check_dim(p.coords())?;
        let c = p.coords();
        Ok(match self.kind {
            DomainKind::Disc | DomainKind::Ball => {
                let a = one_minus_norm_sq(c);
                a / (1.0 + norm_sq(c).sqrt())
            }
            DomainKind::Polydisc => c
                .iter()
                .map(|z| {
                    let a = one_minus_norm_sq(std::slice::from_ref(z));
                    a / (1.0 + z.norm())
                })
                .fold(f64::INFINITY, f64::min),
            DomainKind::Siegel => siegel_slack(c),
            DomainKind::SlitPlane => {
                let z = c[0];
                if z.re > 0.0 {
                    z.norm()
                } else {
                    z.im.abs()
                }
            }
        })
    }

    /// True iff the point lies inside with slack strictly greater than
    /// `margin`.
    pub fn contains(&self, p: &DomainPoint, margin: f64) -> Result<bool, GeometryError> {
        Ok(self.boundary_slack(p)? > margin)
    }

    /// Magnitude of the terms whose cancellation produces the boundary
    /// slack. On the ball `1 - ||z||^2` cancels against 1; in the Siegel
    /// model `Im z1 - ||w||^2` cancels against the coordinates themselves,
    /// so points deep along a leaf with nonzero boundary offset lose slack
    /// precision even though the distance formulas are exact in the slack.
    pub fn slack_scale(&self, p: &DomainPoint) -> Result<f64, GeometryError> {
        self.check_dim(p.coords())?;
        let c = p.coords();
        Ok(match self.kind {
            DomainKind::Disc | DomainKind::Ball | DomainKind::Polydisc => 1.0,
            DomainKind::Siegel => c[0].im.abs().max(norm_sq(&c[1..])).max(f64::MIN_POSITIVE),
            DomainKind::SlitPlane => c[0].norm().max(f64::MIN_POSITIVE),
        })
    }

    /// Distance and metric values at `p` are meaningful only while the
    /// slack dominates its own rounding error.
    pub fn distance_reliable(&self, p: &DomainPoint) -> bool {
        match (self.boundary_slack(p), self.slack_scale(p)) {
            (Ok(slack), Ok(scale)) => slack >= tol::SLACK_REL_FLOOR * scale,
            _ => false,
        }
    }

    fn require_inside(&self, p: &DomainPoint) -> Result<(), GeometryError> {
        let slack = self.boundary_slack(p)?;
        if slack > 0.0 {
            Ok(())
        } else {
            Err(GeometryError::OutsideDomain { slack })
        }
    }

    /// Kobayashi distance between two interior points.
    pub fn distance(&self, x: &DomainPoint, y: &DomainPoint) -> Result<f64, GeometryError> {
        self.require_inside(x)?;
        self.require_inside(y)?;
        let (a, b) = (x.coords(), y.coords());
        Ok(match self.kind {
            DomainKind::Disc | DomainKind::Ball => ball_distance(a, b),
            DomainKind::Polydisc => a
                .iter()
                .zip(b)
                .map(|(za, zb)| {
                    ball_distance(std::slice::from_ref(za), std::slice::from_ref(zb))
                })
                .fold(0.0, f64::max),
            DomainKind::Siegel => siegel_distance(a, b),
            DomainKind::SlitPlane => {
                siegel_distance(&[C::i() * a[0].sqrt()], &[C::i() * b[0].sqrt()])
            }
        })
    }

    /// Kobayashi metric `kappa(base; dir)`. Positively homogeneous in the
    /// direction; on the ball
    /// `kappa(z; v) = 2 sqrt(|v|^2/(1-||z||^2) + |<v,z>|^2/(1-||z||^2)^2)`.
    pub fn metric(&self, t: &TangentVector) -> Result<f64, GeometryError> {
        self.require_inside(&t.base)?;
        self.check_dim(&t.dir)?;
        let z = t.base.coords();
        let v = &t.dir;
        Ok(match self.kind {
            DomainKind::Disc | DomainKind::Ball => {
                ball_metric(z, v, one_minus_norm_sq(z))
            }
            DomainKind::Polydisc => z
                .iter()
                .zip(v)
                .map(|(zj, vj)| {
                    2.0 * vj.norm() / one_minus_norm_sq(std::slice::from_ref(zj))
                })
                .fold(0.0, f64::max),
            DomainKind::Siegel => siegel_metric(z, v),
            DomainKind::SlitPlane => {
                let root = z[0].sqrt();
                siegel_metric(&[C::i() * root], &[C::i() * v[0] / (2.0 * root)])
            }
        })
    }
}

// ---------------------------------------------------------------------------
// ball model
// ---------------------------------------------------------------------------

/// Distance on `B^q` through the Mobius invariants; all subtractions of
/// nearly-equal quantities are rearranged away, so both regimes (nearby
/// points, near-boundary points) keep full precision.
fn ball_distance(x: &[C], y: &[C]) -> f64 {
    let h: Vec<C> = y.iter().zip(x).map(|(b, a)| b - a).collect();
    let ax = one_minus_norm_sq(x);
    let ay = one_minus_norm_sq(y);
    let xh = inner(x, &h);
    // 1 - <x,y> = (1 - ||x||^2) - <x,h>
    let one_minus_xy = C::new(ax - xh.re, -xh.im);
    let den = one_minus_xy.norm_sqr();
    if den == 0.0 {
        return 0.0;
    }
    let rho_sq = (xh.norm_sqr() + ax * norm_sq(&h)) / den;
    let one_minus_rho_sq = ax * ay / den;
    k_from_rho(rho_sq, one_minus_rho_sq)
}

fn ball_metric(z: &[C], v: &[C], one_minus_z_sq: f64) -> f64 {
    let a = one_minus_z_sq;
    let vz = inner(v, z).norm_sqr();
    2.0 * (norm_sq(v) / a + vz / (a * a)).sqrt()
}

/// Mobius normalizer `phi_a` of the ball with `phi_a(a) = 0`, `phi_a(0) = a`;
/// an involution, and an isometry for the Kobayashi distance.
pub fn ball_automorphism(a: &DomainPoint, z: &DomainPoint) -> Result<DomainPoint, GeometryError> {
    let d = DomainModel::ball(a.dim())?;
    d.require_inside(a)?;
    d.require_inside(z)?;
    let (a, z) = (a.coords(), z.coords());
    let na = norm_sq(a);
    if na == 0.0 {
        return Ok(DomainPoint::new(z.iter().map(|w| -w).collect()));
    }
    let s = one_minus_norm_sq(a).sqrt();
    let za = inner(z, a);
    let proj = za / na;
    let denom = C::new(1.0, 0.0) - za;
    let out: Vec<C> = a
        .iter()
        .zip(z)
        .map(|(aj, zj)| {
            let p = proj * aj; // projection of z onto span(a)
            let q = zj - p;
            (aj - p - s * q) / denom
        })
        .collect();
    Ok(DomainPoint::new(out))
}

// ---------------------------------------------------------------------------
// Siegel model
// ---------------------------------------------------------------------------

/// `Im z1 - ||w||^2`.
fn siegel_slack(c: &[C]) -> f64 {
    c[0].im - norm_sq(&c[1..])
}

/// Distance on `H^q` computed natively from boundary slacks.
///
/// With `u = Z' - Z`, `v = W' - W`, `delta = 2i conj(u) - 4 <W, v>` and
/// `N = 4 s + delta` (`s` the slack of the first point) one has
/// `rho^2 = (|delta|^2 + 16 s ||v||^2) / |N|^2` and
/// `1 - rho^2 = 16 s s' / |N|^2`, both cancellation-free.
fn siegel_distance(x: &[C], y: &[C]) -> f64 {
    let s = siegel_slack(x);
    let s2 = siegel_slack(y);
    let u = y[0] - x[0];
    let v: Vec<C> = y[1..].iter().zip(&x[1..]).map(|(b, a)| b - a).collect();
    let wv = inner(&x[1..], &v);
    let delta = C::new(0.0, 2.0) * u.conj() - 4.0 * wv;
    let n = C::new(4.0 * s, 0.0) + delta;
    let den = n.norm_sqr();
    if den == 0.0 {
        return 0.0;
    }
    let rho_sq = (delta.norm_sqr() + 16.0 * s * norm_sq(&v)) / den;
    let one_minus_rho_sq = 16.0 * s * s2 / den;
    k_from_rho(rho_sq, one_minus_rho_sq)
}

/// Metric on `H^q`: pull the tangent vector back to the ball through the
/// derivative of the inverse Cayley transform, injecting the slack-based
/// `1 - ||z||^2 = 4 s / |Z + i|^2` to avoid boundary cancellation.
fn siegel_metric(x: &[C], dir: &[C]) -> f64 {
    let zi = x[0] + C::i();
    let zi_sq = zi * zi;
    let dz = C::new(0.0, 2.0) / zi_sq * dir[0];
    let mut v = Vec::with_capacity(x.len());
    v.push(dz);
    for (wj, dwj) in x[1..].iter().zip(&dir[1..]) {
        v.push(C::new(0.0, 2.0) * dwj / zi - C::new(0.0, 2.0) * wj / zi_sq * dir[0]);
    }
    let z = inverse_cayley(x);
    let a = 4.0 * siegel_slack(x) / zi.norm_sqr();
    ball_metric(&z, &v, a)
}

fn inverse_cayley(c: &[C]) -> Vec<C> {
    let zi = c[0] + C::i();
    let mut out = Vec::with_capacity(c.len());
    out.push((c[0] - C::i()) / zi);
    for w in &c[1..] {
        out.push(C::new(0.0, 2.0) * w / zi);
    }
    out
}

/// Direction of a Cayley transform application.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CayleyDirection {
    ToSiegel,
    ToBall,
}

/// Cayley transform `Psi(z, w) = (i (1+z)/(1-z), w/(1-z))` between `B^q`
/// and `H^q`, or its inverse.
pub fn cayley_transform(
    direction: CayleyDirection,
    p: &DomainPoint,
) -> Result<DomainPoint, GeometryError> {
    let q = p.dim();
    match direction {
        CayleyDirection::ToSiegel => {
            DomainModel::ball(q)?.require_inside(p)?;
            let c = p.coords();
            let denom = C::new(1.0, 0.0) - c[0];
            if denom.norm_sqr() == 0.0 {
                return Err(GeometryError::CayleyPole);
            }
            let mut out = Vec::with_capacity(q);
            out.push(C::i() * (C::new(1.0, 0.0) + c[0]) / denom);
            for w in &c[1..] {
                out.push(w / denom);
            }
            Ok(DomainPoint::new(out))
        }
        CayleyDirection::ToBall => {
            DomainModel::siegel(q)?.require_inside(p)?;
            Ok(DomainPoint::new(inverse_cayley(p.coords())))
        }
    }
}

// ---------------------------------------------------------------------------
// boundary approach predicates
// ---------------------------------------------------------------------------

/// Koranyi region membership: `|1 - <z, zeta>| < R (1 - ||z||)`.
pub fn koranyi_membership(
    z: &DomainPoint,
    zeta: &BoundaryPoint,
    amplitude: f64,
) -> Result<bool, GeometryError> {
    if amplitude <= 1.0 {
        return Err(GeometryError::AmplitudeOutOfRange(amplitude));
    }
    let q = z.dim();
    DomainModel::ball(q)?.require_inside(z)?;
    let zeta = zeta.as_unit_vector(q)?;
    let lhs = (C::new(1.0, 0.0) - inner(z.coords(), &zeta)).norm();
    let a = one_minus_norm_sq(z.coords());
    let one_minus_norm = a / (1.0 + norm_sq(z.coords()).sqrt());
    Ok(lhs < amplitude * one_minus_norm)
}

/// Three-valued verdict for boundary-approach tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceFlags {
    pub special: Verdict,
    pub restricted: Verdict,
    /// `k(z_k, <z_k,zeta> zeta)` per element.
    pub special_series: Vec<f64>,
    /// `|1 - <z_k,zeta>| / (1 - |<z_k,zeta>|)` per element.
    pub ratio_series: Vec<f64>,
}

/// Special/restricted verdicts for a sequence approaching a ball boundary
/// point: special means the distance to the complex line through `zeta`
/// vanishes, restricted means `<z_k, zeta> -> 1` non-tangentially.
pub fn sequence_flags(
    seq: &[DomainPoint],
    zeta: &BoundaryPoint,
) -> Result<SequenceFlags, GeometryError> {
    let first = seq.first().ok_or(GeometryError::EmptySequence)?;
    let q = first.dim();
    let ball = DomainModel::ball(q)?;
    let zeta = zeta.as_unit_vector(q)?;

    let mut dist = Vec::with_capacity(seq.len());
    let mut ratio = Vec::with_capacity(seq.len());
    let mut inner_gap = Vec::with_capacity(seq.len());
    for p in seq {
        ball.require_inside(p)?;
        let ip = inner(p.coords(), &zeta);
        let proj: Vec<C> = zeta.iter().map(|e| ip * e).collect();
        dist.push(ball_distance(p.coords(), &proj));
        let gap = (C::new(1.0, 0.0) - ip).norm();
        inner_gap.push(gap);
        let denom = 1.0 - ip.norm();
        ratio.push(if denom <= 0.0 { f64::INFINITY } else { gap / denom });
    }

    let trail = |v: &[f64]| -> Vec<f64> {
        let t = v.len().min(tol::TRAIL_LEN);
        v[v.len() - t..].to_vec()
    };
    let max = |v: &[f64]| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = |v: &[f64]| v.iter().cloned().fold(f64::INFINITY, f64::min);

    let special = if seq.len() < 3 {
        Verdict::Inconclusive
    } else {
        let t = trail(&dist);
        if max(&t) < tol::SPECIAL_TOL {
            Verdict::Yes
        } else if min(&t) > 100.0 * tol::SPECIAL_TOL && *t.last().unwrap() >= 0.5 * max(&t) {
            // not decaying: settled or growing away from zero
            Verdict::No
        } else {
            Verdict::Inconclusive
        }
    };

    let restricted = if seq.len() < 3 {
        Verdict::Inconclusive
    } else {
        let tr = trail(&ratio);
        let tg = trail(&inner_gap);
        let last_gap = *tg.last().unwrap();
        if max(&tr) < tol::RESTRICTED_RATIO_MAX && last_gap < tol::RESTRICTED_INNER_TOL {
            Verdict::Yes
        } else if (*tr.last().unwrap() >= tol::RESTRICTED_RATIO_MAX
            && *tr.last().unwrap() >= 0.9 * max(&tr))
            || (last_gap > 1e-3 && last_gap >= 0.5 * max(&tg))
        {
            Verdict::No
        } else {
            Verdict::Inconclusive
        }
    };

    Ok(SequenceFlags { special, restricted, special_series: dist, ratio_series: ratio })
}

/// Probe points strictly inside a domain, for inverse-consistency checks
/// and pre-model grids.
pub fn probe_points(domain: &DomainModel, count: usize) -> Vec<DomainPoint> {
    let q = domain.dimension();
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let t = (k as f64 + 0.5) / count as f64;
        let p = match domain.kind() {
            DomainKind::Disc | DomainKind::Ball | DomainKind::Polydisc => {
                let r = 0.15 + 0.55 * t;
                let coords: Vec<C> = (0..q)
                    .map(|j| {
                        let angle = 2.0 * std::f64::consts::PI * (t + j as f64 / q as f64);
                        C::from_polar(r / (q as f64).sqrt(), angle)
                    })
                    .collect();
                DomainPoint::new(coords)
            }
            DomainKind::Siegel => {
                let mut coords = vec![C::new(0.0, 0.0); q];
                let w: Vec<C> = (1..q)
                    .map(|j| C::from_polar(0.2 * t, 1.0 + j as f64))
                    .collect();
                let wnorm: f64 = w.iter().map(|z| z.norm_sqr()).sum();
                coords[0] = C::new(0.6 * (t - 0.5), wnorm + 0.25 * (4.0f64).powf(2.0 * t - 1.0));
                coords[1..].copy_from_slice(&w);
                DomainPoint::new(coords)
            }
            DomainKind::SlitPlane => {
                DomainPoint::scalar(C::from_polar(0.3 + 2.0 * t, 2.4 * (t - 0.5)))
            }
        };
        out.push(p);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn pt(coords: &[C]) -> DomainPoint {
        DomainPoint::new(coords.to_vec())
    }

    #[test]
    fn contains_examples() {
        let siegel2 = DomainModel::siegel(2).unwrap();
        assert!(siegel2.contains(&pt(&[c(0.0, 1.0), c(0.0, 0.0)]), 0.0).unwrap());
        assert!(!siegel2.contains(&pt(&[c(0.0, 1.0), c(1.1, 0.0)]), 0.0).unwrap());
        let ball2 = DomainModel::ball(2).unwrap();
        assert!(!ball2.contains(&pt(&[c(0.6, 0.0), c(0.8, 0.0)]), 0.0).unwrap());
        assert!(ball2.contains(&pt(&[c(0.6, 0.0), c(0.7, 0.0)]), 0.05).unwrap());
    }

    #[test]
    fn contains_dimension_mismatch() {
        let d = DomainModel::disc();
        let err = d.contains(&pt(&[c(0.0, 0.0), c(0.0, 0.0)]), 0.0).unwrap_err();
        assert_eq!(err, GeometryError::DimensionMismatch { expected: 1, got: 2 });
    }

    /// Independent oracle for the disc distance: integrate the infinitesimal
    /// metric 2/(1-t^2) along the radial segment with Simpson's rule.
    fn radial_geodesic_length(r: f64) -> f64 {
        let n = 20_000;
        let h = r / n as f64;
        let f = |t: f64| 2.0 / (1.0 - t * t);
        let mut sum = f(0.0) + f(r);
        for k in 1..n {
            let t = k as f64 * h;
            sum += if k % 2 == 1 { 4.0 * f(t) } else { 2.0 * f(t) };
        }
        sum * h / 3.0
    }

    #[test]
    fn disc_distance_closed_form() {
        let d = DomainModel::disc();
        let zero = pt(&[c(0.0, 0.0)]);
        assert_eq!(d.distance(&zero, &zero).unwrap(), 0.0);
        let half = pt(&[c(0.5, 0.0)]);
        let k = d.distance(&zero, &half).unwrap();
        assert_relative_eq!(k, 3.0f64.ln(), max_relative = 1e-14);
        assert_relative_eq!(k, radial_geodesic_length(0.5), max_relative = 1e-10);
    }

    #[test]
    fn siegel_distance_via_cayley_chain() {
        let d = DomainModel::siegel(1).unwrap();
        let k = d.distance(&pt(&[c(0.0, 1.0)]), &pt(&[c(0.0, 2.0)])).unwrap();
        // the inverse Cayley transform sends i -> 0 and 2i -> 1/3
        let disc = DomainModel::disc();
        let oracle = disc
            .distance(&pt(&[c(0.0, 0.0)]), &pt(&[c(1.0 / 3.0, 0.0)]))
            .unwrap();
        assert_relative_eq!(k, oracle, max_relative = 1e-14);
        assert_relative_eq!(k, 2.0f64.ln(), max_relative = 1e-14);
    }

    #[test]
    fn siegel_distance_deep_orbit_pairs_stay_exact() {
        // dilation-invariant pair at depth n: k((i/2^{n+m}), (i/2^n)) = m log 2
        let d = DomainModel::siegel(1).unwrap();
        for n in [0, 10, 40, 120, 300] {
            let a = pt(&[c(0.0, (2.0f64).powi(-n - 32))]);
            let b = pt(&[c(0.0, (2.0f64).powi(-n))]);
            assert_relative_eq!(
                d.distance(&a, &b).unwrap(),
                32.0 * 2.0f64.ln(),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn metric_examples() {
        let disc = DomainModel::disc();
        let k0 = disc
            .metric(&TangentVector::new(pt(&[c(0.0, 0.0)]), vec![c(1.0, 0.0)]))
            .unwrap();
        assert_relative_eq!(k0, 2.0, max_relative = 1e-15);
        let k_half = disc
            .metric(&TangentVector::new(pt(&[c(0.5, 0.0)]), vec![c(1.0, 0.0)]))
            .unwrap();
        assert_relative_eq!(k_half, 8.0 / 3.0, max_relative = 1e-14);

        let ball2 = DomainModel::ball(2).unwrap();
        let k = ball2
            .metric(&TangentVector::new(
                pt(&[c(0.0, 0.0), c(0.0, 0.0)]),
                vec![c(0.0, 0.0), c(3.0, 0.0)],
            ))
            .unwrap();
        assert_relative_eq!(k, 6.0, max_relative = 1e-15);
    }

    #[test]
    fn metric_matches_distance_quotient() {
        // kappa(0; 1) on the disc equals lim k(0, t)/t
        let disc = DomainModel::disc();
        let t = 1e-6;
        let quot = disc.distance(&pt(&[c(0.0, 0.0)]), &pt(&[c(t, 0.0)])).unwrap() / t;
        assert_relative_eq!(quot, 2.0, max_relative = 1e-9);
    }

    #[test]
    fn cayley_examples() {
        let p = cayley_transform(CayleyDirection::ToSiegel, &pt(&[c(0.0, 0.0), c(0.0, 0.0)]))
            .unwrap();
        assert_relative_eq!((p[0] - c(0.0, 1.0)).norm(), 0.0, epsilon = 1e-15);
        let back = cayley_transform(CayleyDirection::ToBall, &p).unwrap();
        assert!(euclid_dist(back.coords(), &[c(0.0, 0.0), c(0.0, 0.0)]) < 1e-12);

        let p = cayley_transform(CayleyDirection::ToSiegel, &pt(&[c(1.0 / 3.0, 0.0), c(0.0, 0.0)]))
            .unwrap();
        assert!(euclid_dist(p.coords(), &[c(0.0, 2.0), c(0.0, 0.0)]) < 1e-14);
    }

    #[test]
    fn ball_automorphism_normalizes() {
        let a = pt(&[c(0.2, 0.0), c(0.1, 0.0)]);
        let out = ball_automorphism(&a, &a).unwrap();
        assert!(norm_sq(out.coords()).sqrt() < 1e-15);

        let origin = pt(&[c(0.0, 0.0), c(0.0, 0.0)]);
        let out = ball_automorphism(&origin, &pt(&[c(0.3, 0.0), c(0.4, 0.0)])).unwrap();
        assert_relative_eq!(norm_sq(out.coords()).sqrt(), 0.5, max_relative = 1e-15);

        let a = pt(&[c(0.5, 0.0), c(0.0, 0.0)]);
        let out = ball_automorphism(&a, &origin).unwrap();
        assert_relative_eq!(norm_sq(out.coords()).sqrt(), 0.5, max_relative = 1e-12);
    }

    #[test]
    fn ball_distance_through_normalizer() {
        let ball = DomainModel::ball(2).unwrap();
        let x = pt(&[c(0.3, 0.1), c(-0.2, 0.4)]);
        let y = pt(&[c(-0.1, 0.2), c(0.5, -0.3)]);
        let rho = norm_sq(ball_automorphism(&x, &y).unwrap().coords()).sqrt();
        let oracle = ((1.0 + rho) / (1.0 - rho)).ln();
        assert_relative_eq!(ball.distance(&x, &y).unwrap(), oracle, max_relative = 1e-12);
    }

    #[test]
    fn koranyi_examples() {
        let e1 = BoundaryPoint::UnitVector(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(koranyi_membership(&pt(&[c(0.9, 0.0), c(0.0, 0.0)]), &e1, 2.0).unwrap());
        assert!(!koranyi_membership(&pt(&[c(0.0, 0.0), c(0.9, 0.0)]), &e1, 2.0).unwrap());
        assert!(koranyi_membership(&pt(&[c(0.0, 0.0), c(0.0, 0.0)]), &e1, 2.0).unwrap());
        assert_eq!(
            koranyi_membership(&pt(&[c(0.0, 0.0), c(0.0, 0.0)]), &e1, 1.0).unwrap_err(),
            GeometryError::AmplitudeOutOfRange(1.0)
        );
    }

    #[test]
    fn sequence_flags_radial() {
        let seq: Vec<DomainPoint> = (1..=30)
            .map(|k| pt(&[c(1.0 - (2.0f64).powi(-k), 0.0)]))
            .collect();
        let flags = sequence_flags(&seq, &BoundaryPoint::UnitVector(vec![c(1.0, 0.0)])).unwrap();
        assert_eq!(flags.special, Verdict::Yes);
        assert_eq!(flags.restricted, Verdict::Yes);
    }

    #[test]
    fn sequence_flags_non_special() {
        let seq: Vec<DomainPoint> = (1..=30)
            .map(|k| {
                pt(&[
                    c(1.0 - (2.0f64).powi(-k), 0.0),
                    c(0.9 * (2.0f64).powf(-(k as f64) / 2.0), 0.0),
                ])
            })
            .collect();
        let flags =
            sequence_flags(&seq, &BoundaryPoint::UnitVector(vec![c(1.0, 0.0), c(0.0, 0.0)]))
                .unwrap();
        assert_eq!(flags.special, Verdict::No);
        assert_eq!(flags.restricted, Verdict::Yes);
    }

    #[test]
    fn sequence_flags_tangential_not_restricted() {
        let seq: Vec<DomainPoint> = (1..=30)
            .map(|k| {
                let eps = (2.0f64).powi(-k);
                pt(&[c(1.0, 0.0) - c(eps, eps * k as f64)])
            })
            .collect();
        let flags = sequence_flags(&seq, &BoundaryPoint::UnitVector(vec![c(1.0, 0.0)])).unwrap();
        assert_eq!(flags.restricted, Verdict::No);
    }

    #[test]
    fn slit_plane_distance_matches_half_plane_chart() {
        // sqrt maps the slit plane onto the right half-plane; i * sqrt lands
        // in the upper half-plane chart used natively
        let slit = DomainModel::slit_plane();
        let x = pt(&[c(1.0, 1.0)]);
        let y = pt(&[c(4.0, 0.5)]);
        let h1 = DomainModel::siegel(1).unwrap();
        let oracle = h1
            .distance(
                &pt(&[C::i() * c(1.0, 1.0).sqrt()]),
                &pt(&[C::i() * c(4.0, 0.5).sqrt()]),
            )
            .unwrap();
        assert_relative_eq!(slit.distance(&x, &y).unwrap(), oracle, max_relative = 1e-14);
        // outside: on the slit
        assert!(slit.distance(&x, &pt(&[c(-1.0, 0.0)])).is_err());
    }

    #[test]
    fn convention_factor() {
        assert_eq!(Convention::Doubled.factor(), 1.0);
        assert_eq!(Convention::Arctanh.factor(), 0.5);
    }
}
