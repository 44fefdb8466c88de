//! Central numeric thresholds.
//!
//! Every cutoff used by the convergence heuristics lives here so that the
//! dichotomies (bounded/unbounded, converged/diverging, inside/exited) are
//! tuned in one place.

/// Default membership margin for analytic checks.
pub const MEMBERSHIP_MARGIN: f64 = 1e-12;

/// A computed orbit point counts as having left the domain once its boundary
/// slack drops below `-EXIT_MARGIN`. Genuine bounded-step backward orbits
/// approach the boundary (slack decays to zero geometrically), so the band is
/// on the *outside*: mild negative slack is forgiven as rounding, anything
/// beyond it is an exit.
pub const EXIT_MARGIN: f64 = 1e-10;

/// Distance and metric values are trusted only while the boundary slack
/// stays above this fraction of the coordinate scale it is computed from.
/// The slack itself is a difference of coordinate-sized terms, so below
/// `scale * 1e-9` its rounding error alone exceeds the convergence
/// thresholds.
pub const SLACK_REL_FLOOR: f64 = 1e-9;

/// Newton solver residual target, in coordinate norm relative to the scale
/// of the target point.
pub const NEWTON_TOL: f64 = 1e-12;

/// Maximum outer Newton iterations before `NewtonDiverged`.
pub const NEWTON_MAX_ITER: usize = 50;

/// Maximum step halvings inside one damped Newton iteration.
pub const NEWTON_MAX_HALVINGS: usize = 20;

/// A monotone sequence counts as converged when the increment at the last
/// doubling index falls below this.
pub const CONVERGE_DELTA: f64 = 1e-6;

/// A monotone increasing sequence counts as diverging when increments at the
/// last two doubling indices both stay above this. Log-growth produces
/// constant doubling increments, so this separates it from geometric
/// convergence.
pub const DIVERGE_DELTA: f64 = 1e-4;

/// Distance cap for boundedness verdicts. `e^-60` boundary proximity is
/// beyond anything double precision resolves, so larger distances are
/// treated as divergence.
pub const DISTANCE_CAP: f64 = 60.0;

/// Rates below this are treated as zero when separating hyperbolic from
/// parabolic. The catalog's true rates are either 0 or `log(lambda)` with
/// `lambda` bounded away from 1.
pub const RATE_EPS: f64 = 1e-6;

/// Special-sequence verdict: trailing distance values must stay below this.
pub const SPECIAL_TOL: f64 = 1e-6;

/// Restricted-sequence verdict: trailing `|1 - <z,zeta>| / (1 - |<z,zeta>|)`
/// must stay below this.
pub const RESTRICTED_RATIO_MAX: f64 = 10.0;

/// Restricted-sequence verdict: trailing `|1 - <z,zeta>|` must have come
/// this close to zero.
pub const RESTRICTED_INNER_TOL: f64 = 1e-8;

/// Trailing window length for sequence verdicts.
pub const TRAIL_LEN: usize = 10;

/// Tail length for the liminf surrogate in dilation estimates.
pub const DILATION_TAIL: usize = 20;

/// Pairwise agreement tolerance for extrapolated Denjoy-Wolff limits.
pub const DW_AGREE_TOL: f64 = 1e-6;

/// Unimodularity slack for normal-form unitary entries.
pub const UNITARY_TOL: f64 = 1e-12;

/// Collision threshold for pre-model injectivity probes.
pub const COLLISION_TOL: f64 = 1e-9;
