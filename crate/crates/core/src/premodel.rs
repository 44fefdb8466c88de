//! Hyperbolic automorphism normal forms on the Siegel half-space, the
//! closed-form backward-step formula, and intertwining verification of
//! pre-models.

use num_complex::Complex64;
use thiserror::Error;

use crate::dsl::{BinOp, EvalError, Expr, ExprMap, MapDef};
use crate::dynamics::backward_step_from_orbit;
use crate::geometry::{
    euclid_dist, probe_points, DomainKind, DomainModel, DomainPoint, GeometryError,
};
use crate::holomap::{backward_orbit, forward_orbit, OrbitError};
use crate::tol;

type C = Complex64;

#[derive(Debug, Error)]
pub enum PreModelError {
    #[error("mu must exceed 1, got {0}")]
    MuOutOfRange(f64),
    #[error("unitary entry {index} has modulus {modulus} (must be 1 within {tol:e})")]
    NotUnimodular { index: usize, modulus: f64, tol: f64 },
    #[error("normal form needs {expected} unitary entries, got {got}")]
    UnitarySize { expected: usize, got: usize },
    #[error("probe {index} lies outside the pre-model domain")]
    ProbeOutside { index: usize },
    #[error("pre-model map component count {got} does not match the ambient dimension {expected}")]
    ComponentMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
}

/// Normal form of a hyperbolic automorphism of `H^k`:
/// `(z, w) -> (z/mu, U w / sqrt(mu))` with `U` diagonal unitary.
#[derive(Debug, Clone)]
pub struct HyperbolicNormalForm {
    pub k: usize,
    pub mu: f64,
    /// `k - 1` unimodular diagonal entries.
    pub unitary: Vec<C>,
}

impl HyperbolicNormalForm {
    pub fn new(k: usize, mu: f64, unitary: Vec<C>) -> Result<Self, PreModelError> {
        if mu <= 1.0 || !mu.is_finite() {
            return Err(PreModelError::MuOutOfRange(mu));
        }
        if unitary.len() != k - 1 {
            return Err(PreModelError::UnitarySize { expected: k - 1, got: unitary.len() });
        }
        for (i, u) in unitary.iter().enumerate() {
            let modulus = u.norm();
            if (modulus - 1.0).abs() > tol::UNITARY_TOL {
                return Err(PreModelError::NotUnimodular {
                    index: i,
                    modulus,
                    tol: tol::UNITARY_TOL,
                });
            }
        }
        Ok(HyperbolicNormalForm { k, mu, unitary })
    }
}

fn cmul(c: C, e: Expr) -> Expr {
    Expr::Bin(BinOp::Mul, Box::new(Expr::Const(c)), Box::new(e))
}

/// The normal form as a self-map of `Siegel(k)` with its exact inverse
/// `(z, w) -> (mu z, sqrt(mu) U* w)`.
pub fn normal_form_tau(nf: &HyperbolicNormalForm) -> Result<MapDef, PreModelError> {
    let domain = DomainModel::siegel(nf.k)?;
    let root = nf.mu.sqrt();
    let mut fwd = vec![Expr::Bin(
        BinOp::Div,
        Box::new(Expr::Var(1)),
        Box::new(Expr::Const(C::new(nf.mu, 0.0))),
    )];
    let mut inv = vec![cmul(C::new(nf.mu, 0.0), Expr::Var(1))];
    for (j, u) in nf.unitary.iter().enumerate() {
        fwd.push(cmul(u / root, Expr::Var(j + 2)));
        inv.push(cmul(u.conj() * root, Expr::Var(j + 2)));
    }
    let map = MapDef::new(
        domain,
        ExprMap::new(nf.k, fwd).expect("well-formed components"),
        Some(ExprMap::new(nf.k, inv).expect("well-formed inverse")),
    )
    .with_name(format!("normal_form(mu={})", nf.mu));
    Ok(map)
}

/// Closed form of the backward `m`-step along a special and restricted
/// backward orbit with dilation `lambda` and angular parameter `theta`:
///
/// ```text
/// sigma_m = log( (|e^{-2i theta} + lambda^m| + |1 - lambda^m|)
///              / (|e^{-2i theta} + lambda^m| - |1 - lambda^m|) )
/// ```
///
/// evaluated through `t = lambda^{-m}` so that the cancellation in the
/// denominator never materializes; `sigma_m / m -> log(lambda)`.
pub fn sigma_closed_form(theta: f64, lambda: f64, m: usize) -> f64 {
    assert!(
        theta > -std::f64::consts::FRAC_PI_2 && theta < std::f64::consts::FRAC_PI_2,
        "theta must lie in (-pi/2, pi/2)"
    );
    assert!(lambda > 1.0, "lambda must exceed 1");
    let c2 = (2.0 * theta).cos();
    let t = lambda.powf(-(m as f64));
    if t < 1e-280 {
        return (m as f64) * lambda.ln() + 2.0f64.ln() - (1.0 + c2).ln();
    }
    let u = t * (2.0 * c2 + t);
    let sq = (1.0 + u).sqrt();
    let p_plus_q = sq + 1.0 - t;
    let p_minus_q = t * ((2.0 * c2 + t) / (sq + 1.0) + 1.0);
    p_plus_q.ln() - p_minus_q.ln()
}

/// A pre-model `(Z, g, tau)`: a source domain, an intertwining map into the
/// ambient domain, and an automorphism of the source, to be checked against
/// `f o g = g o tau`.
#[derive(Debug, Clone)]
pub struct PreModel {
    pub z_domain: DomainModel,
    /// Map from `Z` coordinates into the ambient domain.
    pub g: ExprMap,
    /// Automorphism of `Z`.
    pub tau: MapDef,
    pub name: String,
}

/// Per-probe worst deviation between the dynamically computed backward
/// steps of `f` at `g(probe)` and the distances `k_Z(probe, tau^m probe)`.
#[derive(Debug, Clone)]
pub struct ProbeReport {
    pub probe: DomainPoint,
    pub step_residual: f64,
}

#[derive(Debug, Clone)]
pub struct PreModelReport {
    /// `max over probes of || f(g(p)) - g(tau(p)) ||`.
    pub intertwine_max: f64,
    pub probes: Vec<ProbeReport>,
    /// Max of all per-probe step residuals.
    pub step_max: f64,
    /// Number of probe pairs whose images under `g` collide.
    pub collisions: usize,
}

/// Log-spaced probes on the imaginary axis for Siegel pre-model domains,
/// generic interior probes otherwise.
pub fn default_probes(domain: &DomainModel) -> Vec<DomainPoint> {
    const COUNT: usize = 9;
    match domain.kind() {
        DomainKind::Siegel => (0..COUNT)
            .map(|j| {
                let t = j as f64 / (COUNT - 1) as f64;
                let y = 0.25 * (16.0f64).powf(t); // [1/4, 4] log-spaced
                let mut coords = vec![C::new(0.0, 0.0); domain.dimension()];
                coords[0] = C::new(0.0, y);
                DomainPoint::new(coords)
            })
            .collect(),
        _ => probe_points(domain, COUNT),
    }
}

/// Verify a pre-model against a self-map: intertwining residual on the
/// probe grid, backward-step identity up to `m_max`, and injectivity
/// collisions of the intertwining map.
pub fn verify_premodel(
    f: &MapDef,
    pm: &PreModel,
    probes: &[DomainPoint],
    m_max: usize,
) -> Result<PreModelReport, PreModelError> {
    if pm.g.dim_out() != f.domain.dimension() {
        return Err(PreModelError::ComponentMismatch {
            expected: f.domain.dimension(),
            got: pm.g.dim_out(),
        });
    }
    for (index, p) in probes.iter().enumerate() {
        if !pm.z_domain.contains(p, 0.0)? {
            return Err(PreModelError::ProbeOutside { index });
        }
    }

    let images: Vec<DomainPoint> = probes
        .iter()
        .map(|p| pm.g.eval_value(p.coords()).map(DomainPoint::new))
        .collect::<Result<_, _>>()?;

    let mut intertwine_max = 0.0f64;
    for (p, gp) in probes.iter().zip(&images) {
        let fg = f.eval_value(gp)?;
        let tp = pm.tau.eval_value(p)?;
        let gt = pm.g.eval_value(tp.coords())?;
        intertwine_max = intertwine_max.max(euclid_dist(fg.coords(), &gt));
    }

    let mut reports = Vec::with_capacity(probes.len());
    let mut step_max = 0.0f64;
    // shallow depth: the step sequences converge geometrically, while deep
    // points on offset leaves lose slack precision
    let n_back = 8;
    for (p, gp) in probes.iter().zip(&images) {
        let orbit = backward_orbit(f, gp, n_back + m_max)?;
        let tau_orbit = forward_orbit(&pm.tau, p, m_max)?;
        let mut worst = 0.0f64;
        for m in 1..=m_max {
            if tau_orbit.len() <= m {
                break;
            }
            let sigma = backward_step_from_orbit(f, &orbit, m, n_back).limit;
            let k_z = pm.z_domain.distance(p, &tau_orbit.points[m])?;
            if sigma.is_finite() {
                worst = worst.max((sigma - k_z).abs());
            } else {
                worst = f64::INFINITY;
            }
        }
        step_max = step_max.max(worst);
        reports.push(ProbeReport { probe: p.clone(), step_residual: worst });
    }

    let mut collisions = 0usize;
    for i in 0..images.len() {
        for j in i + 1..images.len() {
            if euclid_dist(images[i].coords(), images[j].coords()) < tol::COLLISION_TOL
                && euclid_dist(probes[i].coords(), probes[j].coords()) >= tol::COLLISION_TOL
            {
                collisions += 1;
            }
        }
    }

    Ok(PreModelReport { intertwine_max, probes: reports, step_max, collisions })
}

/// The exact pre-model family of the Siegel shear `f(z,w) = (2z + iw^2, w)`:
/// `Z = H^1`, `g(s) = (s + i r^2, i r)` and `tau(s) = 2s`. The image of `g`
/// is the leaf of the stable set through `(i r^2, i r)`.
pub fn siegel_example_premodel(r: f64) -> PreModel {
    let z_domain = DomainModel::siegel(1).expect("H^1");
    let g = ExprMap::new(
        1,
        vec![
            Expr::Bin(
                BinOp::Add,
                Box::new(Expr::Var(1)),
                Box::new(Expr::Const(C::new(0.0, r * r))),
            ),
            Expr::Const(C::new(0.0, r)),
        ],
    )
    .expect("well-formed intertwining map");
    let tau = MapDef::new(
        z_domain,
        ExprMap::new(1, vec![cmul(C::new(2.0, 0.0), Expr::Var(1))]).unwrap(),
        Some(
            ExprMap::new(
                1,
                vec![Expr::Bin(
                    BinOp::Div,
                    Box::new(Expr::Var(1)),
                    Box::new(Expr::Const(C::new(2.0, 0.0))),
                )],
            )
            .unwrap(),
        ),
    )
    .with_name("doubling on H^1");
    PreModel { z_domain, g, tau, name: format!("shear leaf r={r}") }
}
