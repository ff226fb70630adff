//! Gap asymptotics `γ(n) ≈ 2|q̂(n)|` and `γ(n) ≈ 2|q̂(n) + ϱ(n)|`, decay-exponent
//! fits of the remainders, and finite-scale membership diagnostics comparing
//! `{q̂(n)} ∈ h^ω` with `{γ(n)} ∈ h^ω`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::FourierSequence;
use crate::spectral::{richardson_extrapolate, spectral_endpoints, SpectralResult};
use crate::weights::{
    check_theorem_conditions, estimate_orders, ConditionCheck, OrderEstimate, Weight,
};

/// `ε` in the predicted exponent `1 + 2s - ε` for `s ∈ (-1, 0)`.
pub const PREDICTION_EPSILON: f64 = 0.1;

/// A dyadic increment ratio at or below this counts as shrinking by a factor
/// of two. The 10% allowance absorbs the finite-`K` excess of `Σ 1/k²`-type
/// tails, whose ratio approaches 1/2 from above.
pub const IN_RATIO: f64 = 0.55;

/// A dyadic increment ratio at or above this counts as non-shrinking.
pub const OUT_RATIO: f64 = 0.9;

/// Number of trailing doublings the verdict looks at.
const VERDICT_DOUBLINGS: usize = 3;

/// Second-order correction
/// `ϱ(n) = π⁻² Σ_{j ∉ {±n}} q̂(n-j) q̂(n+j) / ((n-j)(n+j))`.
pub fn rho_correction(q: &FourierSequence, n: usize) -> Result<Complex64> {
    if n < 1 {
        return Err(Error::param("correction term needs n >= 1"));
    }
    if !q.is_hermitian() || q.coeff(0) != Complex64::new(0.0, 0.0) {
        return Err(Error::param(
            "correction term needs a hermitian sequence with zero mean coefficient",
        ));
    }
    let big_n = q.half_width() as i64;
    let n = n as i64;
    let mut acc = Complex64::new(0.0, 0.0);
    // both |n - j| <= N and |n + j| <= N
    for j in (n - big_n)..=(big_n - n) {
        if j == n || j == -n {
            continue;
        }
        let denom = ((n - j) * (n + j)) as f64;
        acc += q.coeff(n - j) * q.coeff(n + j) / denom;
    }
    Ok(acc / (PI * PI))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapAsymptoticsReport {
    pub n_range: (usize, usize),
    /// `r(n) = γ(n) - 2|q̂(n)|` for `n` in `n_range`.
    pub remainder: Vec<f64>,
    /// `r̃(n) = γ(n) - 2|q̂(n) + ϱ(n)|`.
    pub refined_remainder: Vec<f64>,
    pub tau_hat: Option<f64>,
    pub tau_refined: Option<f64>,
    pub predicted_tau: Option<f64>,
}

/// Fills the remainder arrays for `n_range` (inclusive); fits are left empty.
pub fn remainders(
    q: &FourierSequence,
    spec: &SpectralResult,
    n_range: (usize, usize),
) -> Result<GapAsymptoticsReport> {
    let (lo, hi) = n_range;
    if lo < 1 || lo > hi {
        return Err(Error::param(format!("invalid n range ({lo}, {hi})")));
    }
    if hi > spec.n_max() {
        return Err(Error::RangeMismatch {
            requested: hi,
            available: spec.n_max(),
        });
    }
    let mut remainder = Vec::with_capacity(hi - lo + 1);
    let mut refined = Vec::with_capacity(hi - lo + 1);
    for n in lo..=hi {
        let gamma = spec.gamma[n - 1];
        let qn = q.coeff(n as i64);
        let rho = rho_correction(q, n)?;
        remainder.push(gamma - 2.0 * qn.norm());
        refined.push(gamma - 2.0 * (qn + rho).norm());
    }
    Ok(GapAsymptoticsReport {
        n_range,
        remainder,
        refined_remainder: refined,
        tau_hat: None,
        tau_refined: None,
        predicted_tau: None,
    })
}

impl GapAsymptoticsReport {
    /// Fits both remainders over `fit_window` and records the predicted
    /// exponent for a potential in `H^s` when `s` is known. A fit with fewer
    /// than five usable points leaves the exponent empty.
    pub fn with_fits(mut self, fit_window: (usize, usize), s: Option<f64>) -> Self {
        let first = self.n_range.0;
        self.tau_hat = fit_decay_exponent(&self.remainder, first, fit_window).ok();
        self.tau_refined = fit_decay_exponent(&self.refined_remainder, first, fit_window).ok();
        self.predicted_tau = s.and_then(predicted_tau);
        self
    }
}

/// Exponent `τ` with `γ(n) - 2|q̂(n)| ∈ h^τ` for `q ∈ H^s`:
/// `1 + 2s - ε` on `(-1, 0)`, `1 + s` on `[0, ∞)`.
pub fn predicted_tau(s: f64) -> Option<f64> {
    if s <= -1.0 || !s.is_finite() {
        None
    } else if s < 0.0 {
        Some(1.0 + 2.0 * s - PREDICTION_EPSILON)
    } else {
        Some(1.0 + s)
    }
}

/// Negated least-squares slope of `log|v(n)|` against `log n` over the
/// inclusive `n_range`, where `values[i]` belongs to `n = first_n + i`.
/// Exact zeros are skipped.
pub fn fit_decay_exponent(values: &[f64], first_n: usize, n_range: (usize, usize)) -> Result<f64> {
    let (lo, hi) = n_range;
    let points: Vec<(f64, f64)> = values
        .iter()
        .enumerate()
        .map(|(i, &v)| (first_n + i, v))
        .filter(|&(n, v)| n >= lo.max(1) && n <= hi && v != 0.0 && v.is_finite())
        .map(|(n, v)| ((n as f64).ln(), v.abs().ln()))
        .collect();
    if points.len() < 5 {
        return Err(Error::InsufficientData {
            usable: points.len(),
        });
    }
    let count = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / count;
    let my = points.iter().map(|p| p.1).sum::<f64>() / count;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Ok(-sxy / sxx)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    In,
    Out,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipDiagnostic {
    /// Dyadic grid `K = 1, 2, 4, …, <= K_max`.
    pub grid: Vec<usize>,
    /// `S(K) = Σ_{k<=K} ω²(k)|a(k)|²` on the grid.
    pub partial_sums: Vec<f64>,
    /// `S(2K) / S(K)` on the grid.
    pub ratio_trend: Vec<f64>,
    /// Ratios of consecutive dyadic increments `(S(4K)-S(2K)) / (S(2K)-S(K))`.
    pub increment_ratios: Vec<f64>,
    pub verdict: Verdict,
    /// Increments shrink on the last doublings, but too slowly to call the
    /// series convergent at this scale.
    pub slow_tail: bool,
}

/// Dyadic partial sums of `Σ_{k∈ℕ} ω²(k)|a(k)|²` with `a[k-1] = |a(k)|`.
///
/// Verdict over the last three increment ratios: `in` when all are at most
/// [`IN_RATIO`], `out` when all are at least [`OUT_RATIO`], otherwise
/// `inconclusive`. Grids shorter than `K = 16` are inconclusive.
pub fn membership_diagnostic(a: &[f64], w: &Weight, k_max: usize) -> Result<MembershipDiagnostic> {
    if k_max < 1 {
        return Err(Error::param("K_max must be >= 1"));
    }
    if a.len() < k_max {
        return Err(Error::RangeMismatch {
            requested: k_max,
            available: a.len(),
        });
    }
    if w.len() < k_max {
        return Err(Error::WeightTooShort {
            required: k_max,
            available: w.len(),
        });
    }
    let mut grid = Vec::new();
    let mut partial_sums = Vec::new();
    let mut acc = 0.0;
    let mut next = 1usize;
    for k in 1..=k_max {
        let wk = w.values()[k - 1];
        acc += wk * wk * a[k - 1] * a[k - 1];
        if k == next {
            grid.push(k);
            partial_sums.push(acc);
            next *= 2;
        }
    }
    let ratio_trend: Vec<f64> = partial_sums
        .windows(2)
        .map(|p| if p[0] == 0.0 { f64::NAN } else { p[1] / p[0] })
        .collect();
    let increments: Vec<f64> = partial_sums.windows(2).map(|p| p[1] - p[0]).collect();
    let increment_ratios: Vec<f64> = increments
        .windows(2)
        .map(|d| match (d[0] == 0.0, d[1] == 0.0) {
            (_, true) => 0.0,
            (true, false) => f64::INFINITY,
            _ => d[1] / d[0],
        })
        .collect();

    let (verdict, slow_tail) = if increment_ratios.len() < VERDICT_DOUBLINGS {
        (Verdict::Inconclusive, false)
    } else {
        let tail = &increment_ratios[increment_ratios.len() - VERDICT_DOUBLINGS..];
        let verdict = if tail.iter().all(|&r| r <= IN_RATIO) {
            Verdict::In
        } else if tail.iter().all(|&r| r >= OUT_RATIO) {
            Verdict::Out
        } else {
            Verdict::Inconclusive
        };
        let slow = verdict != Verdict::In && tail.iter().all(|&r| r < 1.0);
        (verdict, slow)
    };
    Ok(MembershipDiagnostic {
        grid,
        partial_sums,
        ratio_trend,
        increment_ratios,
        verdict,
        slow_tail,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoReport {
    pub orders: OrderEstimate,
    pub conditions: ConditionCheck,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub warning: Option<String>,
    pub q: MembershipDiagnostic,
    pub gamma: MembershipDiagnostic,
    pub agree: bool,
    pub spectrum: SpectralResult,
}

impl MoReport {
    /// Neither verdict is inconclusive.
    pub fn conclusive(&self) -> bool {
        self.q.verdict != Verdict::Inconclusive && self.gamma.verdict != Verdict::Inconclusive
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MoOptions {
    /// Orders supplied analytically; estimated from the weight otherwise.
    pub orders: Option<OrderEstimate>,
    /// Galerkin sizes for Richardson extrapolation instead of a single `M`.
    pub extrapolate: Option<Vec<usize>>,
}

/// Default estimation window for a weight of length `K`.
pub fn default_order_window(len: usize) -> Result<(usize, usize)> {
    if len < 4 {
        return Err(Error::param(
            "weight too short to estimate orders (need K >= 4)",
        ));
    }
    Ok((16.min(len / 2).max(2), len))
}

/// Membership diagnostics of `{|q̂(n)|}` and `{γ(n)}` against the same weight
/// for `n <= n_max`.
pub fn mo_equivalence_report(
    q: &FourierSequence,
    w: &Weight,
    m: usize,
    n_max: usize,
    opts: &MoOptions,
) -> Result<MoReport> {
    let orders = match opts.orders {
        Some(o) => o,
        None => estimate_orders(w, default_order_window(w.len())?)?,
    };
    let conditions = check_theorem_conditions(orders.mu_hat, orders.rho_hat)?;
    let warning =
        (!conditions.holds).then(|| format!("weight hypotheses fail: {}", conditions.reason));

    let spectrum = match &opts.extrapolate {
        Some(list) => richardson_extrapolate(q, n_max, list)?,
        None => spectral_endpoints(q, m, n_max)?,
    };
    let q_abs: Vec<f64> = (1..=n_max).map(|k| q.coeff(k as i64).norm()).collect();
    let q_diag = membership_diagnostic(&q_abs, w, n_max)?;
    let gamma_diag = membership_diagnostic(&spectrum.gamma, w, n_max)?;
    Ok(MoReport {
        orders,
        conditions,
        warning,
        agree: q_diag.verdict == gamma_diag.verdict,
        q: q_diag,
        gamma: gamma_diag,
        spectrum,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdicts {
    pub q: Verdict,
    pub gamma: Verdict,
}

/// Serialized asymptotics report:
/// `{n_range, remainder[], refined_remainder[], tau_hat, tau_refined,
/// predicted_tau, verdicts{q, gamma}, agree}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub n_range: (usize, usize),
    pub remainder: Vec<f64>,
    pub refined_remainder: Vec<f64>,
    pub tau_hat: Option<f64>,
    pub tau_refined: Option<f64>,
    pub predicted_tau: Option<f64>,
    pub verdicts: Verdicts,
    pub agree: bool,
}

impl ReportDocument {
    pub fn new(
        report: &GapAsymptoticsReport,
        q: &MembershipDiagnostic,
        gamma: &MembershipDiagnostic,
    ) -> Self {
        Self {
            n_range: report.n_range,
            remainder: report.remainder.clone(),
            refined_remainder: report.refined_remainder.clone(),
            tau_hat: report.tau_hat,
            tau_refined: report.tau_refined,
            predicted_tau: report.predicted_tau,
            verdicts: Verdicts {
                q: q.verdict,
                gamma: gamma.verdict,
            },
            agree: q.verdict == gamma.verdict,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{sample_potential_family, PotentialFamily};
    use crate::seq_spaces::{convolve, TwoSidedSequence};

    fn mathieu(a: f64) -> FourierSequence {
        sample_potential_family(&PotentialFamily::Mathieu { a }, 0, 0).unwrap()
    }

    /// Brute force over a fixed index range wider than the support.
    fn rho_oracle(q: &FourierSequence, n: i64, reach: i64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in -reach..=reach {
            if j.abs() == n {
                continue;
            }
            acc += q.coeff(n - j) * q.coeff(n + j) / (((n - j) * (n + j)) as f64);
        }
        acc / (PI * PI)
    }

    #[test]
    fn rho_of_zero_potential() {
        for n in 1..5 {
            assert_eq!(
                rho_correction(&FourierSequence::zero(), n).unwrap(),
                Complex64::new(0.0, 0.0)
            );
        }
    }

    #[test]
    fn rho_of_mathieu() {
        let q = mathieu(1.0);
        let got = rho_correction(&q, 1).unwrap();
        let oracle = rho_oracle(&q, 1, 10);
        assert!((got - oracle).norm() < 1e-16);
        assert!((got.re - 0.101321).abs() < 1e-6);
        for a in [0.3, -2.0, 5.0] {
            let got = rho_correction(&mathieu(a), 1).unwrap();
            assert!((got.re - a * a / (PI * PI)).abs() <= 1e-12 * a * a);
            assert_eq!(got.im, 0.0);
        }
        assert!(rho_correction(&q, 0).is_err());
    }

    #[test]
    fn rho_matches_oracle_and_convolution() {
        let fam = PotentialFamily::PowerDecay {
            s: 0.0,
            amplitude: 1.0,
        };
        let q = sample_potential_family(&fam, 24, 3).unwrap();
        let g = TwoSidedSequence::from_fn(24, |k| {
            if k == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                q.coeff(k) / k as f64
            }
        })
        .unwrap();
        let gg = convolve(&g, &g);
        for n in 1..=12usize {
            let got = rho_correction(&q, n).unwrap();
            let brute = rho_oracle(&q, n as i64, 60);
            let conv = gg.get(2 * n as i64) / (PI * PI);
            assert!((got - brute).norm() <= 1e-12 * brute.norm().max(1e-300));
            assert!((got - conv).norm() <= 1e-12 * conv.norm().max(1e-300));
        }
    }

    #[test]
    fn rho_requires_normalized_potential() {
        let q = FourierSequence::from_two_sided(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
        ])
        .unwrap();
        assert!(rho_correction(&q, 1).is_err());
    }

    #[test]
    fn fit_exact_power_law() {
        let values: Vec<f64> = (8..=64).map(|n| (n as f64).powi(-2)).collect();
        let tau = fit_decay_exponent(&values, 8, (8, 64)).unwrap();
        assert!((tau - 2.0).abs() < 1e-10);
    }

    #[test]
    fn fit_modulated_power_law() {
        let values: Vec<f64> = (8..=128)
            .map(|n| (n as f64).powf(-1.5) * (2.0 + if n % 2 == 0 { 1.0 } else { -1.0 }))
            .collect();
        let tau = fit_decay_exponent(&values, 8, (8, 128)).unwrap();
        assert!((tau - 1.5).abs() < 0.05, "{tau}");
    }

    #[test]
    fn fit_constant_and_degenerate() {
        let values = vec![3.0; 40];
        assert!(fit_decay_exponent(&values, 1, (1, 40)).unwrap().abs() < 1e-10);
        let mut sparse = vec![0.0; 40];
        sparse[3] = 1.0;
        sparse[9] = 2.0;
        assert!(matches!(
            fit_decay_exponent(&sparse, 1, (1, 40)),
            Err(Error::InsufficientData { usable: 2 })
        ));
        // zeros are skipped, not fitted
        let mut holes: Vec<f64> = (1..=40).map(|n| (n as f64).powi(-3)).collect();
        holes[10] = 0.0;
        holes[20] = 0.0;
        assert!((fit_decay_exponent(&holes, 1, (1, 40)).unwrap() - 3.0).abs() < 1e-10);
    }

    #[test]
    fn predicted_exponents() {
        assert_eq!(predicted_tau(0.5), Some(1.5));
        assert_eq!(predicted_tau(0.0), Some(1.0));
        assert!((predicted_tau(-0.25).unwrap() - 0.4).abs() < 1e-15);
        assert_eq!(predicted_tau(-1.0), None);
    }

    #[test]
    fn remainders_of_zero_potential() {
        let spec = spectral_endpoints(&FourierSequence::zero(), 16, 8).unwrap();
        let rep = remainders(&FourierSequence::zero(), &spec, (1, 8)).unwrap();
        assert!(rep.remainder.iter().all(|&r| r == 0.0));
        assert!(rep.refined_remainder.iter().all(|&r| r == 0.0));
        assert!(matches!(
            remainders(&FourierSequence::zero(), &spec, (1, 9)),
            Err(Error::RangeMismatch { .. })
        ));
    }

    #[test]
    fn remainders_of_mathieu_decay() {
        let q = mathieu(1.0);
        let spec = spectral_endpoints(&q, 32, 8).unwrap();
        let rep = remainders(&q, &spec, (1, 8)).unwrap();
        // q̂(n) = 0 for n >= 2, so r(n) = γ(n)
        assert_eq!(rep.remainder[1], spec.gamma[1]);
        assert!(rep.remainder[3] < rep.remainder[1]);
    }

    #[test]
    fn membership_examples() {
        let k_max = 1 << 12;
        let harmonic: Vec<f64> = (1..=k_max).map(|k| 1.0 / k as f64).collect();
        let unit = Weight::constant(k_max).unwrap();
        let lin = Weight::power(1.0, k_max).unwrap();
        assert_eq!(
            membership_diagnostic(&harmonic, &unit, k_max)
                .unwrap()
                .verdict,
            Verdict::In
        );
        assert_eq!(
            membership_diagnostic(&harmonic, &lin, k_max)
                .unwrap()
                .verdict,
            Verdict::Out
        );
        let zero = vec![0.0; k_max];
        assert_eq!(
            membership_diagnostic(&zero, &lin, k_max).unwrap().verdict,
            Verdict::In
        );
    }

    #[test]
    fn borderline_sequence_is_flagged_slow() {
        // Σ k^{-1.02} converges, but the dyadic increments shrink only by
        // 2^{-0.02} per doubling, indistinguishable from divergence at this scale
        let k_max = 1 << 20;
        let a: Vec<f64> = (1..=k_max).map(|k| (k as f64).powf(-0.51)).collect();
        let d = membership_diagnostic(&a, &Weight::constant(k_max).unwrap(), k_max).unwrap();
        assert!(d.slow_tail);
        assert_eq!(d.verdict, Verdict::Out);
        let last = *d.increment_ratios.last().unwrap();
        assert!((last - 2f64.powf(-0.02)).abs() < 1e-3, "{last}");
    }

    #[test]
    fn membership_partial_sums_nondecreasing() {
        let a: Vec<f64> = (1..=300).map(|k| ((k * 7919) % 13) as f64).collect();
        let d = membership_diagnostic(&a, &Weight::power(0.3, 300).unwrap(), 300).unwrap();
        assert!(d.partial_sums.windows(2).all(|p| p[1] >= p[0]));
        assert_eq!(d.grid, vec![1, 2, 4, 8, 16, 32, 64, 128, 256]);
    }

    #[test]
    fn membership_short_grid_is_inconclusive() {
        let a = vec![1.0; 8];
        let d = membership_diagnostic(&a, &Weight::constant(8).unwrap(), 8).unwrap();
        assert_eq!(d.verdict, Verdict::Inconclusive);
        assert!(membership_diagnostic(&a, &Weight::constant(4).unwrap(), 8).is_err());
        assert!(membership_diagnostic(&a, &Weight::constant(16).unwrap(), 16).is_err());
    }

    #[test]
    fn mo_report_zero_potential() {
        let w = Weight::power(0.5, 64).unwrap();
        let rep =
            mo_equivalence_report(&FourierSequence::zero(), &w, 128, 64, &MoOptions::default())
                .unwrap();
        assert_eq!(rep.q.verdict, Verdict::In);
        assert_eq!(rep.gamma.verdict, Verdict::In);
        assert!(rep.agree);
        assert!(rep.conditions.holds);
        assert!(rep.warning.is_none());
    }

    #[test]
    fn mo_report_warns_on_failed_hypotheses() {
        let w = Weight::power(1.5, 64).unwrap();
        let orders = OrderEstimate {
            mu_hat: -0.6,
            rho_hat: 0.1,
            raw_mu: -0.6,
            raw_rho: 0.1,
            window: (16, 64),
        };
        let opts = MoOptions {
            orders: Some(orders),
            extrapolate: None,
        };
        let rep = mo_equivalence_report(&FourierSequence::zero(), &w, 128, 64, &opts).unwrap();
        assert!(!rep.conditions.holds);
        assert!(rep.warning.is_some());
    }
}
