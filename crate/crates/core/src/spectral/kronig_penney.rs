//! Band edges of the Kronig–Penney operator `-u'' + α Σ_j δ(x - j) u` from its
//! discriminant `Δ(λ) = 2 cos √λ + α sin √λ / √λ`.
//!
//! Independent of the Galerkin code: every edge is a bracketed root of
//! `Δ(λ) = ±2`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this `|λ|` the discriminant is evaluated by its Taylor series.
const SERIES_CUTOFF: f64 = 1e-6;
const MAX_BISECTIONS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandGap {
    pub n: usize,
    pub minus: f64,
    pub plus: f64,
    pub gamma: f64,
}

/// `Δ(λ)`, continued through `λ <= 0` with `cosh`/`sinh`.
pub fn discriminant(alpha: f64, lambda: f64) -> f64 {
    if lambda.abs() < SERIES_CUTOFF {
        // 2cos k = 2 - λ + λ²/12, sin k / k = 1 - λ/6 + λ²/120
        let l = lambda;
        return 2.0 - l + l * l / 12.0 + alpha * (1.0 - l / 6.0 + l * l / 120.0);
    }
    if lambda > 0.0 {
        let k = lambda.sqrt();
        2.0 * k.cos() + alpha * k.sin() / k
    } else {
        let kappa = (-lambda).sqrt();
        2.0 * kappa.cosh() + alpha * kappa.sinh() / kappa
    }
}

/// Bisection on a sign change of `f` over `[lo, hi]`.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64, what: &str) -> Result<f64> {
    let fail = || Error::Bracketing {
        what: what.to_string(),
        lo,
        hi,
    };
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if !(f_lo.is_finite() && f_hi.is_finite()) || f_lo.signum() == f_hi.signum() {
        return Err(fail());
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Lowest band edge `λ₀`, the smallest root of `Δ(λ) = 2`.
pub fn kronig_penney_ground(alpha: f64, tol: f64) -> Result<f64> {
    check_args(alpha, tol)?;
    let g = |lambda: f64| discriminant(alpha, lambda) - 2.0;
    if alpha == 0.0 {
        return Ok(0.0);
    }
    if alpha > 0.0 {
        // Δ(0) = 2 + α > 2 and Δ(π²) = -2
        return bisect(g, 0.0, PI * PI, tol, "ground state");
    }
    // Δ(0) = 2 + α < 2; Δ grows like cosh for λ → -∞
    let mut lo = -1.0;
    while g(lo) <= 0.0 {
        lo *= 2.0;
        if lo < -1e12 {
            return Err(Error::Bracketing {
                what: "ground state".into(),
                lo,
                hi: 0.0,
            });
        }
    }
    bisect(g, lo, 0.0, tol, "ground state")
}

/// Gap endpoints `(λₙ⁻, λₙ⁺, γₙ)` for `n = 1..=n_max`.
///
/// One edge of each gap sits at `(πn)²`, where `sin √λ = 0`. Dividing
/// `Δ(λ) - 2(-1)ⁿ` by `sin k / k` (nonzero for `k ∈ ((n-1)π, (n+1)π)`, `k ≠ nπ`)
/// leaves `α - 2k tan((k - nπ)/2)`, whose single root in that interval is the
/// other edge. When it would fall at `λ <= 0` (`n = 1`, `α <= -4`) the root of
/// `Δ(λ) = -2` is bracketed on the negative axis instead.
pub fn kronig_penney_gaps(alpha: f64, n_max: usize, tol: f64) -> Result<Vec<BandGap>> {
    check_args(alpha, tol)?;
    let mut gaps = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let npi = n as f64 * PI;
        let fixed = npi * npi;
        let reduced = |k: f64| alpha - 2.0 * k * ((k - npi) / 2.0).tan();
        let other = if alpha == 0.0 {
            fixed
        } else if alpha > 0.0 {
            let hi = (n + 1) as f64 * PI * (1.0 - 1e-15);
            let k = bisect(reduced, npi, hi, tol / (2.0 * npi), "upper gap edge")?;
            k * k
        } else if n > 1 || alpha > -4.0 {
            let lo = ((n - 1) as f64 * PI).max(0.0) * (1.0 + 1e-15) + 1e-15;
            let k = bisect(reduced, lo, npi, tol / (2.0 * npi), "lower gap edge")?;
            k * k
        } else {
            let d = |lambda: f64| discriminant(alpha, lambda) + 2.0;
            let mut lo = -1.0;
            while d(lo) <= 0.0 {
                lo *= 2.0;
                if lo < -1e12 {
                    return Err(Error::Bracketing {
                        what: "lower gap edge".into(),
                        lo,
                        hi: 0.0,
                    });
                }
            }
            bisect(d, lo, 0.0, tol, "lower gap edge")?
        };
        let (minus, plus) = if other >= fixed {
            (fixed, other)
        } else {
            (other, fixed)
        };
        gaps.push(BandGap {
            n,
            minus,
            plus,
            gamma: plus - minus,
        });
    }
    Ok(gaps)
}

fn check_args(alpha: f64, tol: f64) -> Result<()> {
    if !alpha.is_finite() {
        return Err(Error::param("Kronig-Penney strength must be finite"));
    }
    if !(tol > 0.0) {
        return Err(Error::param("root tolerance must be positive"));
    }
    Ok(())
}
