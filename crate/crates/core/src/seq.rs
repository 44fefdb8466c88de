//! Limit estimation for monotone sequences via doubling tests.
//!
//! Fixed-window deltas are defeated by parabolic log-growth (increments
//! shrink at every scale but the sequence diverges), so convergence is
//! judged by increments between doubling indices `n = 2^j`: geometric
//! convergence drives them below [`tol::CONVERGE_DELTA`], log-growth keeps
//! them pinned near a positive constant.

use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvergenceVerdict {
    Converged,
    Diverging,
    Inconclusive,
}

impl std::fmt::Display for ConvergenceVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ConvergenceVerdict::Converged => "converged",
            ConvergenceVerdict::Diverging => "diverging",
            ConvergenceVerdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone)]
pub struct LimitEstimate {
    pub limit: f64,
    pub verdict: ConvergenceVerdict,
    /// `(index, value)` samples at the doubling indices used.
    pub samples: Vec<(usize, f64)>,
}

/// Indices `0, 1, 2, 4, ..., <= last`, with `last` always included.
pub fn doubling_indices(last: usize) -> Vec<usize> {
    let mut out = vec![0];
    let mut n = 1;
    while n <= last {
        out.push(n);
        n *= 2;
    }
    if *out.last().unwrap() != last {
        out.push(last);
    }
    out
}

/// Increment from sample `i - 1` to `i`, normalized by the logarithmic span
/// of their indices (1 when the spans are uniform doublings).
fn per_span(samples: &[(usize, f64)], i: usize) -> f64 {
    let d = samples[i].1 - samples[i - 1].1;
    let (n1, n0) = (samples[i].0.max(1) as f64, samples[i - 1].0.max(1) as f64);
    let span = (n1 / n0).ln();
    if span > 0.0 {
        d / span
    } else {
        d
    }
}

/// Aitken delta-squared extrapolation of three consecutive samples.
fn aitken(a: f64, b: f64, c: f64) -> f64 {
    let d2 = (c - b) - (b - a);
    if d2.abs() < 1e-300 {
        c
    } else {
        c - (c - b) * (c - b) / d2
    }
}

/// Estimate the limit of a monotone sequence from its initial segment.
///
/// `increasing` selects the orientation (backward steps increase, forward
/// steps decrease). `cap`: an increasing sequence that crosses it is
/// declared diverging outright.
pub fn monotone_limit(values: &[f64], increasing: bool, cap: Option<f64>) -> LimitEstimate {
    if values.is_empty() {
        return LimitEstimate {
            limit: f64::NAN,
            verdict: ConvergenceVerdict::Inconclusive,
            samples: Vec::new(),
        };
    }
    let samples: Vec<(usize, f64)> = doubling_indices(values.len() - 1)
        .into_iter()
        .map(|i| (i, values[i]))
        .collect();

    if increasing {
        if let Some(cap) = cap {
            if samples.iter().any(|&(_, v)| !v.is_finite() || v > cap) {
                return LimitEstimate {
                    limit: f64::INFINITY,
                    verdict: ConvergenceVerdict::Diverging,
                    samples,
                };
            }
        }
    }

    let k = samples.len();
    if k < 2 {
        return LimitEstimate {
            limit: samples[0].1,
            verdict: ConvergenceVerdict::Inconclusive,
            samples,
        };
    }

    let last = samples[k - 1].1;
    let d_last = (samples[k - 1].1 - samples[k - 2].1).abs();
    if d_last < tol::CONVERGE_DELTA {
        let limit = if k >= 3 {
            let e = aitken(samples[k - 3].1, samples[k - 2].1, last);
            // extrapolation must not move against the monotone direction
            if increasing {
                e.max(last)
            } else {
                e.min(last)
            }
        } else {
            last
        };
        return LimitEstimate { limit, verdict: ConvergenceVerdict::Converged, samples };
    }

    if increasing && k >= 3 {
        // diverging only when the doubling increments are *stable* above the
        // threshold: geometric (even slow 1/n^2) convergence shows decaying
        // increments, log-growth keeps them pinned, linear growth doubles
        // them. Increments are normalized by the log-span because the final
        // sample need not sit at a full doubling.
        let d_prev = samples[k - 2].1 - samples[k - 3].1;
        if d_last >= tol::DIVERGE_DELTA
            && d_prev >= tol::DIVERGE_DELTA
            && per_span(&samples, k - 1) >= 0.8 * per_span(&samples, k - 2)
        {
            return LimitEstimate {
                limit: f64::INFINITY,
                verdict: ConvergenceVerdict::Diverging,
                samples,
            };
        }
    }

    LimitEstimate { limit: last, verdict: ConvergenceVerdict::Inconclusive, samples }
}
