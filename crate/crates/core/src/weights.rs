//! Positive weight sequences `ω(k)`, `k >= 1`, with the even extension to ℤ
//! (`ω(0) = 1`, `ω(-k) = ω(k)`), finite-window order estimates and the
//! admissibility test on lower/upper orders.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weight {
    /// `values[k - 1] = ω(k)`.
    values: Vec<f64>,
    label: String,
}

impl Weight {
    pub fn from_values(values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::param("weight needs at least one value"));
        }
        if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::param(format!(
                "weight value at k = {} is not a positive finite number: {}",
                i + 1,
                values[i]
            )));
        }
        Ok(Self {
            values,
            label: label.into(),
        })
    }

    /// `ω(k) = (1+2k)^s`.
    pub fn power(s: f64, len: usize) -> Result<Self> {
        if len < 1 {
            return Err(Error::param("power weight needs K >= 1"));
        }
        let values = (1..=len).map(|k| (1.0 + 2.0 * k as f64).powf(s)).collect();
        Self::from_values(values, format!("power(s={s})"))
    }

    /// `ω(k) = k^s log(1+k)` for even `k` and `k^s` for odd `k`.
    pub fn example_a(s: f64, len: usize) -> Result<Self> {
        if len < 1 {
            return Err(Error::param("example-A weight needs K >= 1"));
        }
        let values = (1..=len)
            .map(|k| {
                let kf = k as f64;
                if k % 2 == 0 {
                    kf.powf(s) * kf.ln_1p()
                } else {
                    kf.powf(s)
                }
            })
            .collect();
        Self::from_values(values, format!("example_a(s={s})"))
    }

    pub fn constant(len: usize) -> Result<Self> {
        Self::from_values(vec![1.0; len], "constant")
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Number of stored values `K`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `ω(k)` for `1 <= k <= K`.
    pub fn at(&self, k: usize) -> Option<f64> {
        k.checked_sub(1).and_then(|i| self.values.get(i)).copied()
    }

    /// Even extension to ℤ.
    pub fn extend_to_z(&self, k: i64) -> Result<f64> {
        if k == 0 {
            return Ok(1.0);
        }
        let idx = k.unsigned_abs() as usize;
        self.at(idx).ok_or(Error::WeightTooShort {
            required: idx,
            available: self.len(),
        })
    }

    /// True if `self(k) >= other(k)` on the common prefix.
    pub fn dominates(&self, other: &Weight) -> bool {
        self.values.iter().zip(&other.values).all(|(a, b)| a >= b)
    }
}

pub fn power_weight(s: f64, len: usize) -> Result<Weight> {
    Weight::power(s, len)
}

pub fn example_a_weight(s: f64, len: usize) -> Result<Weight> {
    Weight::example_a(s, len)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderEstimate {
    /// Lower-order estimate (envelope extrapolated to `1/log k -> 0`).
    pub mu_hat: f64,
    /// Upper-order estimate.
    pub rho_hat: f64,
    /// Plain min of `log ω(k) / log k` over the tail sub-window.
    pub raw_mu: f64,
    /// Plain max of `log ω(k) / log k` over the tail sub-window.
    pub raw_rho: f64,
    /// Tail sub-window actually scanned.
    pub window: (usize, usize),
}

/// Number of blocks the tail sub-window is split into for the envelope fit.
const ENVELOPE_BLOCKS: usize = 8;

/// Estimates `liminf`/`limsup` of `g(k) = log ω(k) / log k`.
///
/// The scan runs over the tail sub-window `[max(k_min, k_max/4), k_max]`. Its
/// raw min/max carry an `O(1/log k)` bias (for `(1+2k)^s` it is
/// `s·log 2/log k`), so the sub-window is split into blocks, the per-block
/// minima and maxima are regressed linearly against `x = 1/log k`, and the
/// intercepts at `x = 0` are reported. Short windows fall back to the raw
/// min/max.
pub fn estimate_orders(w: &Weight, window: (usize, usize)) -> Result<OrderEstimate> {
    let (k_min, k_max) = window;
    if k_min < 2 || k_min >= k_max || k_max > w.len() {
        return Err(Error::WindowOutOfRange {
            k_min,
            k_max,
            len: w.len(),
        });
    }
    let start = k_min.max(k_max / 4);
    let mut samples = Vec::with_capacity(k_max - start + 1);
    for k in start..=k_max {
        let v = w.values[k - 1];
        if v <= 0.0 {
            return Err(Error::param(format!("weight vanishes at k = {k}")));
        }
        let log_k = (k as f64).ln();
        samples.push((1.0 / log_k, v.ln() / log_k));
    }
    let raw_mu = samples.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let raw_rho = samples
        .iter()
        .map(|p| p.1)
        .fold(f64::NEG_INFINITY, f64::max);

    let (mu_hat, rho_hat) = if samples.len() >= 2 * ENVELOPE_BLOCKS {
        let block = samples.len().div_ceil(ENVELOPE_BLOCKS);
        let mut lower = Vec::with_capacity(ENVELOPE_BLOCKS);
        let mut upper = Vec::with_capacity(ENVELOPE_BLOCKS);
        for chunk in samples.chunks(block) {
            let lo =
                chunk.iter().copied().fold(
                    (0.0, f64::INFINITY),
                    |a, b| {
                        if b.1 < a.1 {
                            b
                        } else {
                            a
                        }
                    },
                );
            let hi =
                chunk.iter().copied().fold(
                    (0.0, f64::NEG_INFINITY),
                    |a, b| {
                        if b.1 > a.1 {
                            b
                        } else {
                            a
                        }
                    },
                );
            lower.push(lo);
            upper.push(hi);
        }
        let lo = intercept(&lower).unwrap_or(raw_mu);
        let hi = intercept(&upper).unwrap_or(raw_rho);
        (lo.min(hi), lo.max(hi))
    } else {
        (raw_mu, raw_rho)
    };
    Ok(OrderEstimate {
        mu_hat,
        rho_hat,
        raw_mu,
        raw_rho,
        window: (start, k_max),
    })
}

/// Least-squares line through `(x, y)` evaluated at `x = 0`.
fn intercept(points: &[(f64, f64)]) -> Option<f64> {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    // a flat envelope is exactly its own limit
    if points.iter().all(|p| p.1 == my) {
        return Some(my);
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let value = my - sxy / sxx * mx;
    value.is_finite().then_some(value)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub holds: bool,
    pub reason: String,
}

/// Tests `-1 < μ <= ρ < ∞` together with
/// `ρ < 1 + 2μ` for `μ ∈ (-1, 0]` and `ρ < 1 + μ` for `μ >= 0`.
pub fn check_theorem_conditions(mu: f64, rho: f64) -> Result<ConditionCheck> {
    if mu.is_nan() || rho.is_nan() {
        return Err(Error::param("orders must not be NaN"));
    }
    if mu > rho {
        return Err(Error::MalformedOrders { mu, rho });
    }
    let fail = |reason: String| {
        Ok(ConditionCheck {
            holds: false,
            reason,
        })
    };
    if mu <= -1.0 {
        return fail(format!("lower order {mu} is not above -1"));
    }
    if !rho.is_finite() {
        return fail("upper order is infinite".to_string());
    }
    let (bound, branch) = if mu <= 0.0 {
        (1.0 + 2.0 * mu, "1 + 2*mu")
    } else {
        (1.0 + mu, "1 + mu")
    };
    if rho < bound {
        Ok(ConditionCheck {
            holds: true,
            reason: format!("rho = {rho} < {branch} = {bound}"),
        })
    } else {
        fail(format!("rho = {rho} >= {branch} = {bound}"))
    }
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn orders_are_ordered(values in prop::collection::vec(1e-6f64..1e6, 8..200)) {
            let len = values.len();
            let w = Weight::from_values(values, "random").unwrap();
            let est = estimate_orders(&w, (2, len)).unwrap();
            prop_assert!(est.mu_hat <= est.rho_hat);
            prop_assert!(est.mu_hat.is_finite() && est.rho_hat.is_finite());
        }

        #[test]
        fn conditions_monotone(mu in -0.99f64..3.0, gap in 0.0f64..3.0, shrink in 0.0f64..1.0) {
            let rho = mu + gap;
            let before = check_theorem_conditions(mu, rho).unwrap().holds;
            // lowering rho never breaks an admissible pair
            let lowered = mu + gap * shrink;
            if before {
                prop_assert!(check_theorem_conditions(mu, lowered).unwrap().holds);
            }
            // raising mu inside the same branch (keeping mu <= rho) never breaks it
            let raised = if mu <= 0.0 { (mu + gap * shrink).min(0.0) } else { mu + gap * shrink };
            if before && raised <= rho {
                prop_assert!(check_theorem_conditions(raised, rho).unwrap().holds);
            }
        }
    }
}
