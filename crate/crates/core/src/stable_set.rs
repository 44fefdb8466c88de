//! The bounded-step equivalence relation on the invariant subset, the
//! empirical partition into canonical submanifolds, per-class rates, and
//! tangent-space membership tests.

use thiserror::Error;

use crate::dsl::MapDef;
use crate::dynamics::{classify_type, DynamicsError, MapType, StepEstimate};
use crate::geometry::{DomainPoint, TangentVector};
use crate::holomap::{backward_orbit, transport_backward, OrbitRecord};
use crate::seq::{doubling_indices, monotone_limit};
use crate::tol;

#[derive(Debug, Error)]
pub enum StableSetError {
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Orbit(#[from] crate::holomap::OrbitError),
    #[error("points are not equivalent (verdict unbounded)")]
    NotEquivalent,
    #[error("classification inconclusive at the class representative")]
    InconclusiveClass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundedness {
    Bounded,
    Unbounded,
    Inconclusive,
}

impl std::fmt::Display for Boundedness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Boundedness::Bounded => "bounded",
            Boundedness::Unbounded => "unbounded",
            Boundedness::Inconclusive => "inconclusive",
        })
    }
}

/// Verdict on a monotone increasing distance-like series sampled at
/// doubling indices.
#[derive(Debug, Clone)]
pub struct BoundednessVerdict {
    pub verdict: Boundedness,
    /// `(n, value)` samples at doubling indices.
    pub series: Vec<(usize, f64)>,
    /// Supremum estimate when bounded.
    pub bound_estimate: Option<f64>,
    /// Why the verdict was reached (exit of one orbit, cap crossing, ...).
    pub reason: String,
}

fn verdict_from_series(series: Vec<(usize, f64)>) -> BoundednessVerdict {
    if series.iter().any(|&(_, v)| !v.is_finite() || v > tol::DISTANCE_CAP) {
        return BoundednessVerdict {
            verdict: Boundedness::Unbounded,
            series,
            bound_estimate: None,
            reason: format!("series exceeded the cap {}", tol::DISTANCE_CAP),
        };
    }
    let k = series.len();
    if k < 3 {
        return BoundednessVerdict {
            verdict: Boundedness::Inconclusive,
            series,
            bound_estimate: None,
            reason: "series too short".into(),
        };
    }
    let d_last = series[k - 1].1 - series[k - 2].1;
    let d_prev = series[k - 2].1 - series[k - 3].1;
    if d_last.abs() < tol::CONVERGE_DELTA {
        let bound = series[k - 1].1;
        return BoundednessVerdict {
            verdict: Boundedness::Bounded,
            series,
            bound_estimate: Some(bound),
            reason: format!("last doubling increment {d_last:e} below {:e}", tol::CONVERGE_DELTA),
        };
    }
    if d_last >= tol::DIVERGE_DELTA && d_prev >= tol::DIVERGE_DELTA && d_last >= 0.8 * d_prev {
        return BoundednessVerdict {
            verdict: Boundedness::Unbounded,
            series,
            bound_estimate: None,
            reason: format!("doubling increments stay above {:e}", tol::DIVERGE_DELTA),
        };
    }
    BoundednessVerdict {
        verdict: Boundedness::Inconclusive,
        series,
        bound_estimate: None,
        reason: "increments between thresholds".into(),
    }
}

/// Are `x` and `y` in the same canonical submanifold? Tests boundedness of
/// `k(f^{-n} x, f^{-n} y)` at doubling indices up to `n_max`.
pub fn equivalent(
    map: &MapDef,
    x: &DomainPoint,
    y: &DomainPoint,
    n_max: usize,
) -> Result<BoundednessVerdict, StableSetError> {
    let ox = backward_orbit(map, x, n_max)?;
    let oy = backward_orbit(map, y, n_max)?;
    Ok(equivalent_from_orbits(map, &ox, &oy))
}

pub(crate) fn equivalent_from_orbits(
    map: &MapDef,
    ox: &OrbitRecord,
    oy: &OrbitRecord,
) -> BoundednessVerdict {
    match (ox.complete(), oy.complete()) {
        (true, false) | (false, true) => {
            return BoundednessVerdict {
                verdict: Boundedness::Unbounded,
                series: Vec::new(),
                bound_estimate: None,
                reason: "exactly one backward orbit leaves the domain".into(),
            }
        }
        (false, false) => {
            return BoundednessVerdict {
                verdict: Boundedness::Inconclusive,
                series: Vec::new(),
                bound_estimate: None,
                reason: "both backward orbits leave the domain".into(),
            }
        }
        (true, true) => {}
    }
    let len = ox.len().min(oy.len());
    let mut series = Vec::new();
    for n in doubling_indices(len - 1) {
        if !map.domain.distance_reliable(&ox.points[n])
            || !map.domain.distance_reliable(&oy.points[n])
        {
            break;
        }
        match map.domain.distance(&ox.points[n], &oy.points[n]) {
            Ok(d) => series.push((n, d)),
            Err(_) => break,
        }
    }
    verdict_from_series(series)
}

/// A single class of the empirical partition.
#[derive(Debug, Clone)]
pub struct ClassInfo {
    pub members: Vec<usize>,
    /// Per-class rate `mu = exp(lim sigma_m / m)` evaluated at the first
    /// member; `None` when the classification was inconclusive.
    pub mu: Option<f64>,
}

/// Empirical partition of a sample set into canonical submanifolds.
#[derive(Debug, Clone)]
pub struct Partition {
    pub samples: Vec<DomainPoint>,
    /// Class index per sample; `None` for unresolved or non-stable samples.
    pub class_of: Vec<Option<usize>>,
    pub classes: Vec<ClassInfo>,
    /// Samples quarantined by an inconclusive pairing.
    pub unresolved: Vec<usize>,
    /// Samples whose backward orbit leaves the domain.
    pub non_stable: Vec<usize>,
    /// Pairwise verdicts, row-major upper triangle (i < j).
    pub verdicts: Vec<(usize, usize, Boundedness)>,
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), rank: vec![0; n] }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}

/// Pairwise-equivalence partition. Bounded verdicts merge classes through a
/// union-find; inconclusive verdicts never merge and never split, they
/// quarantine both samples involved.
pub fn partition(
    map: &MapDef,
    samples: &[DomainPoint],
    n_max: usize,
) -> Result<Partition, StableSetError> {
    let n = samples.len();
    let orbits: Vec<OrbitRecord> = samples
        .iter()
        .map(|s| backward_orbit(map, s, n_max))
        .collect::<Result<_, _>>()?;

    let mut non_stable: Vec<usize> = Vec::new();
    for (i, o) in orbits.iter().enumerate() {
        if !o.complete() {
            non_stable.push(i);
        }
    }

    let mut verdicts = Vec::new();
    let mut unresolved_flags = vec![false; n];
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        if non_stable.contains(&i) {
            continue;
        }
        for j in i + 1..n {
            if non_stable.contains(&j) {
                continue;
            }
            let v = equivalent_from_orbits(map, &orbits[i], &orbits[j]);
            verdicts.push((i, j, v.verdict));
            match v.verdict {
                Boundedness::Bounded => uf.union(i, j),
                Boundedness::Unbounded => {}
                Boundedness::Inconclusive => {
                    unresolved_flags[i] = true;
                    unresolved_flags[j] = true;
                }
            }
        }
    }

    let unresolved: Vec<usize> = (0..n)
        .filter(|&i| unresolved_flags[i] && !non_stable.contains(&i))
        .collect();
    let mut class_of = vec![None; n];
    let mut classes: Vec<ClassInfo> = Vec::new();
    let mut root_to_class: Vec<(usize, usize)> = Vec::new();
    for i in 0..n {
        if non_stable.contains(&i) || unresolved_flags[i] {
            continue;
        }
        let root = uf.find(i);
        let class_idx = match root_to_class.iter().find(|&&(r, _)| r == root) {
            Some(&(_, c)) => c,
            None => {
                let c = classes.len();
                classes.push(ClassInfo { members: Vec::new(), mu: None });
                root_to_class.push((root, c));
                c
            }
        };
        classes[class_idx].members.push(i);
        class_of[i] = Some(class_idx);
    }

    for class in &mut classes {
        let rep = class.members[0];
        class.mu = class_rate(map, &samples[rep]).ok();
    }

    Ok(Partition { samples: samples.to_vec(), class_of, classes, unresolved, non_stable, verdicts })
}

/// Per-class rate `mu = exp(lim sigma_m / m) >= 1`.
pub fn class_rate(map: &MapDef, x: &DomainPoint) -> Result<f64, StableSetError> {
    let report = classify_type(map, x)?;
    match report.map_type {
        MapType::Hyperbolic => Ok(report.rate.exp()),
        MapType::Elliptic | MapType::Parabolic => Ok(1.0),
        MapType::Inconclusive => Err(StableSetError::InconclusiveClass),
    }
}

/// Is the direction tangent to the canonical submanifold through the base
/// point? Tests boundedness of the Kobayashi metric of the inverse-Jacobian
/// transported vector along the backward orbit.
pub fn tangent_bounded(
    map: &MapDef,
    t: &TangentVector,
    n_max: usize,
) -> Result<BoundednessVerdict, StableSetError> {
    if crate::geometry::norm_sq(&t.dir) == 0.0 {
        return Ok(BoundednessVerdict {
            verdict: Boundedness::Bounded,
            series: doubling_indices(n_max).into_iter().map(|n| (n, 0.0)).collect(),
            bound_estimate: Some(0.0),
            reason: "zero vector".into(),
        });
    }
    let orbit = backward_orbit(map, &t.base, n_max)?;
    if !orbit.complete() {
        return Ok(BoundednessVerdict {
            verdict: Boundedness::Inconclusive,
            series: Vec::new(),
            bound_estimate: None,
            reason: "base point admits no backward orbit of the requested length".into(),
        });
    }
    let transported = match transport_backward(map, &orbit, &t.dir) {
        Ok(tv) => tv,
        Err(e) => {
            return Ok(BoundednessVerdict {
                verdict: Boundedness::Inconclusive,
                series: Vec::new(),
                bound_estimate: None,
                reason: format!("transport failed: {e}"),
            })
        }
    };

    let mut series = Vec::new();
    for n in doubling_indices(orbit.len() - 1) {
        if !map.domain.distance_reliable(&orbit.points[n]) {
            break;
        }
        let (unit, log_scale) = &transported[n];
        let kappa_unit = match map
            .domain
            .metric(&TangentVector::new(orbit.points[n].clone(), unit.clone()))
        {
            Ok(k) => k,
            Err(_) => break,
        };
        // reconstruct kappa(x_n; J_n v) from the log-scale bookkeeping
        let log_kappa = log_scale + kappa_unit.max(f64::MIN_POSITIVE).ln();
        let kappa = log_kappa.exp();
        series.push((n, kappa));
    }
    Ok(verdict_from_series(series))
}

/// The sequence `k(f^{-n} x, f^{-n} y)`, increasing to the intrinsic
/// distance of the common canonical submanifold.
pub fn limit_distance(
    map: &MapDef,
    x: &DomainPoint,
    y: &DomainPoint,
    n_max: usize,
) -> Result<StepEstimate, StableSetError> {
    let ox = backward_orbit(map, x, n_max)?;
    let oy = backward_orbit(map, y, n_max)?;
    let eq = equivalent_from_orbits(map, &ox, &oy);
    if eq.verdict == Boundedness::Unbounded {
        return Err(StableSetError::NotEquivalent);
    }
    let len = ox.len().min(oy.len());
    let mut values = Vec::with_capacity(len);
    for n in 0..len {
        if !map.domain.distance_reliable(&ox.points[n])
            || !map.domain.distance_reliable(&oy.points[n])
        {
            break;
        }
        match map.domain.distance(&ox.points[n], &oy.points[n]) {
            Ok(d) if d.is_finite() => values.push(d),
            _ => break,
        }
    }
    let est = monotone_limit(&values, true, Some(tol::DISTANCE_CAP));
    Ok(StepEstimate { m: 0, values, limit: est.limit, verdict: est.verdict })
}
