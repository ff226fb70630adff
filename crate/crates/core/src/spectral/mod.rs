//! Gap endpoints of `-u'' + q u` from Fourier–Galerkin truncations of the
//! periodic and semiperiodic problems on `[0, 1]`.
//!
//! The periodic problem is diagonal in `e^{2πimx}`, the semiperiodic one in
//! `e^{iπ(2m+1)x}`; in both bases the potential acts by the Toeplitz matrix
//! `q̂(m - j)`. Even-indexed gap endpoints are periodic eigenvalues, odd-indexed
//! ones semiperiodic eigenvalues, and sorted pairing recovers
//! `λ₀ < λ₁⁻ <= λ₁⁺ < λ₂⁻ <= λ₂⁺ < …`.

mod kronig_penney;
mod richardson;

pub use kronig_penney::{discriminant, kronig_penney_gaps, kronig_penney_ground, BandGap};
pub use richardson::richardson_extrapolate;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::FourierSequence;

/// Relative tolerance on strict ordering between consecutive gap pairs.
pub const INTERLACING_TOL: f64 = 1e-9;

/// Gaps below `COLLAPSE_TOL · max(1, |λₙ⁺|)` are reported as exactly zero.
pub const COLLAPSE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralResult {
    pub lambda0: f64,
    /// `λₙ⁻` for `n = 1..=n_max`.
    pub minus: Vec<f64>,
    /// `λₙ⁺` for `n = 1..=n_max`.
    pub plus: Vec<f64>,
    /// `γ(n) = λₙ⁺ - λₙ⁻`.
    pub gamma: Vec<f64>,
    /// Galerkin half-size `M` (largest `M` when extrapolated).
    pub truncation: usize,
    pub extrapolated: bool,
    /// Empirical order `p` of the endpoint error `~ M^{-p}`, when extrapolated.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub convergence_order: Option<f64>,
    /// Gap indices at which interlacing failed.
    pub interlacing_violations: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
}

impl SpectralResult {
    pub fn n_max(&self) -> usize {
        self.gamma.len()
    }

    pub fn interlacing_ok(&self) -> bool {
        self.interlacing_violations.is_empty()
    }

    /// Turns a flagged result into an error.
    pub fn validated(self) -> Result<Self> {
        match self.interlacing_violations.first() {
            None => Ok(self),
            Some(&n) => Err(Error::Interlacing {
                n,
                detail: format!(
                    "{} violation(s); first pair ({}, {})",
                    self.interlacing_violations.len(),
                    self.minus.get(n - 1).copied().unwrap_or(f64::NAN),
                    self.plus.get(n - 1).copied().unwrap_or(f64::NAN),
                ),
            }),
        }
    }

    /// Builds a result from endpoints, computing gaps and the interlacing check.
    pub(crate) fn from_endpoints(
        lambda0: f64,
        minus: Vec<f64>,
        plus: Vec<f64>,
        truncation: usize,
    ) -> Self {
        let gamma = minus
            .iter()
            .zip(&plus)
            .map(|(&lo, &hi)| collapse(hi - lo, hi))
            .collect();
        let interlacing_violations = interlacing_violations(lambda0, &minus, &plus);
        Self {
            lambda0,
            minus,
            plus,
            gamma,
            truncation,
            extrapolated: false,
            convergence_order: None,
            interlacing_violations,
            warnings: Vec::new(),
        }
    }
}

fn collapse(gap: f64, upper: f64) -> f64 {
    if gap.abs() < COLLAPSE_TOL * upper.abs().max(1.0) {
        0.0
    } else {
        gap
    }
}

/// Returns the gap indices `n` where `λ_{n-1}⁺ < λₙ⁻ <= λₙ⁺` fails
/// (with `λ₀⁺ := λ₀`).
pub fn interlacing_violations(lambda0: f64, minus: &[f64], plus: &[f64]) -> Vec<usize> {
    let mut bad = Vec::new();
    let mut prev = lambda0;
    for (i, (&lo, &hi)) in minus.iter().zip(plus).enumerate() {
        let scale = INTERLACING_TOL * hi.abs().max(1.0);
        let strict_between = lo - prev > scale;
        let within = lo <= hi + scale;
        if !(strict_between && within) {
            bad.push(i + 1);
        }
        prev = hi;
    }
    bad
}

fn toeplitz_fill(mat: &mut DMatrix<Complex64>, q: &FourierSequence) {
    let dim = mat.nrows();
    for row in 0..dim {
        for col in 0..dim {
            mat[(row, col)] = q.coeff(row as i64 - col as i64);
        }
    }
}

/// Periodic Galerkin matrix of size `2M + 1`, indexed by `m ∈ {-M..M}`:
/// `(2πm)² δ_{mj} + q̂(m - j)`.
pub fn build_periodic_matrix(q: &FourierSequence, m: usize) -> Result<DMatrix<Complex64>> {
    if m < 1 {
        return Err(Error::param("Galerkin size M must be >= 1"));
    }
    let dim = 2 * m + 1;
    let mut mat = DMatrix::zeros(dim, dim);
    toeplitz_fill(&mut mat, q);
    for i in 0..dim {
        let freq = 2.0 * PI * (i as f64 - m as f64);
        mat[(i, i)] += freq * freq;
    }
    Ok(mat)
}

/// Semiperiodic Galerkin matrix of size `2M`, exponents `π(2m+1)` for
/// `m ∈ {-M..M-1}`: `(π(2m+1))² δ_{mj} + q̂(m - j)`.
pub fn build_semiperiodic_matrix(q: &FourierSequence, m: usize) -> Result<DMatrix<Complex64>> {
    if m < 1 {
        return Err(Error::param("Galerkin size M must be >= 1"));
    }
    let dim = 2 * m;
    let mut mat = DMatrix::zeros(dim, dim);
    toeplitz_fill(&mut mat, q);
    for i in 0..dim {
        let freq = PI * (2.0 * (i as f64 - m as f64) + 1.0);
        mat[(i, i)] += freq * freq;
    }
    Ok(mat)
}

/// All eigenvalues of a hermitian matrix in ascending order. Matrices with
/// purely real entries go through the real symmetric solver.
pub fn hermitian_eigenvalues(mat: DMatrix<Complex64>) -> Result<Vec<f64>> {
    let mut values: Vec<f64> = if mat.iter().all(|z| z.im == 0.0) {
        let real: DMatrix<f64> = mat.map(|z| z.re);
        real.symmetric_eigenvalues().iter().copied().collect()
    } else {
        mat.symmetric_eigenvalues().iter().copied().collect()
    };
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigen("non-finite eigenvalue".into()));
    }
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Gap endpoints `λ₀, λₙ±` for `n = 1..=n_max` at Galerkin size `M`.
///
/// The result carries any interlacing violations; call
/// [`SpectralResult::validated`] to treat them as errors.
pub fn spectral_endpoints(q: &FourierSequence, m: usize, n_max: usize) -> Result<SpectralResult> {
    if m < 1 {
        return Err(Error::param("Galerkin size M must be >= 1"));
    }
    if n_max < 1 || 2 * n_max > m {
        return Err(Error::param(format!(
            "need 1 <= n_max <= M/2, got n_max = {n_max}, M = {m}"
        )));
    }
    let (periodic, semiperiodic) = rayon::join(
        || build_periodic_matrix(q, m).and_then(hermitian_eigenvalues),
        || build_semiperiodic_matrix(q, m).and_then(hermitian_eigenvalues),
    );
    let (periodic, semiperiodic) = (periodic?, semiperiodic?);
    let shift = q.mean();

    let mut minus = Vec::with_capacity(n_max);
    let mut plus = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let src = if n % 2 == 0 { &periodic } else { &semiperiodic };
        minus.push(src[n - 1] + shift);
        plus.push(src[n] + shift);
    }
    Ok(SpectralResult::from_endpoints(
        periodic[0] + shift,
        minus,
        plus,
        m,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{sample_potential_family, PotentialFamily};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn mathieu(a: f64) -> FourierSequence {
        sample_potential_family(&PotentialFamily::Mathieu { a }, 0, 0).unwrap()
    }

    #[test]
    fn free_periodic_matrix() {
        let mat = build_periodic_matrix(&FourierSequence::zero(), 1).unwrap();
        let four_pi2 = 4.0 * PI * PI;
        let expect = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(four_pi2),
            c(0.0),
            c(four_pi2),
        ]));
        assert_eq!(mat, expect);
    }

    #[test]
    fn mathieu_periodic_matrix() {
        let mat = build_periodic_matrix(&mathieu(1.0), 1).unwrap();
        assert_eq!(mat[(0, 1)], c(1.0));
        assert_eq!(mat[(1, 2)], c(1.0));
        assert_eq!(mat[(1, 0)], c(1.0));
        assert_eq!(mat[(0, 2)], c(0.0));
        assert_eq!(mat[(2, 0)], c(0.0));
        assert_eq!(mat[(1, 1)], c(0.0));
    }

    #[test]
    fn semiperiodic_matrices() {
        let mat = build_semiperiodic_matrix(&FourierSequence::zero(), 1).unwrap();
        let pi2 = PI * PI;
        assert_eq!(mat[(0, 0)], c(pi2));
        assert_eq!(mat[(1, 1)], c(pi2));
        assert_eq!(mat[(0, 1)], c(0.0));
        let mat = build_semiperiodic_matrix(&mathieu(1.0), 1).unwrap();
        assert_eq!(mat[(0, 1)], c(1.0));
        assert_eq!(mat[(1, 0)], c(1.0));
        assert!(build_semiperiodic_matrix(&mathieu(1.0), 0).is_err());
        assert!(build_periodic_matrix(&mathieu(1.0), 0).is_err());
    }

    #[test]
    fn matrices_are_hermitian() {
        let q = FourierSequence::make_real_potential(&[
            Complex64::new(0.3, -1.2),
            Complex64::new(-0.7, 0.4),
            Complex64::new(0.0, 2.0),
        ])
        .unwrap();
        for mat in [
            build_periodic_matrix(&q, 5).unwrap(),
            build_semiperiodic_matrix(&q, 5).unwrap(),
        ] {
            assert_eq!(mat, mat.adjoint());
        }
    }

    #[test]
    fn free_operator_spectrum() {
        let res = spectral_endpoints(&FourierSequence::zero(), 8, 3).unwrap();
        assert!(res.lambda0.abs() < 1e-10);
        for n in 1..=3 {
            let exact = (PI * n as f64).powi(2);
            assert!((res.minus[n - 1] - exact).abs() < 1e-10 * exact);
            assert!((res.plus[n - 1] - exact).abs() < 1e-10 * exact);
            assert_eq!(res.gamma[n - 1], 0.0);
        }
        assert!(res.interlacing_ok());
    }

    #[test]
    fn mathieu_truncation_stability() {
        let q = mathieu(1.0);
        let a = spectral_endpoints(&q, 64, 8).unwrap();
        let b = spectral_endpoints(&q, 128, 8).unwrap();
        assert!((a.gamma[0] - b.gamma[0]).abs() < 1e-8);
        // first-order prediction 2|q̂(1)| = 2
        assert!((a.gamma[0] - 2.0).abs() < 0.1, "{}", a.gamma[0]);
        assert!(a.interlacing_ok());
    }

    #[test]
    fn complex_coefficients_use_hermitian_path() {
        // q̂(1) = i is a translate of q̂(1) = 1, so the spectra coincide
        let rotated = FourierSequence::make_real_potential(&[Complex64::new(0.0, 1.0)]).unwrap();
        let a = spectral_endpoints(&rotated, 16, 4).unwrap();
        let b = spectral_endpoints(&mathieu(1.0), 16, 4).unwrap();
        for n in 0..4 {
            assert!((a.minus[n] - b.minus[n]).abs() < 1e-9);
            assert!((a.plus[n] - b.plus[n]).abs() < 1e-9);
        }
    }

    #[test]
    fn mean_shift_covariance() {
        let q = mathieu(0.7);
        let base = spectral_endpoints(&q, 32, 6).unwrap();
        let shifted = spectral_endpoints(&q.clone().with_mean(2.5), 32, 6).unwrap();
        assert!((shifted.lambda0 - base.lambda0 - 2.5).abs() < 1e-12);
        for n in 0..6 {
            assert!((shifted.minus[n] - base.minus[n] - 2.5).abs() < 1e-9);
            assert_eq!(shifted.gamma[n], base.gamma[n]);
        }
    }

    #[test]
    fn argument_validation() {
        let q = mathieu(1.0);
        assert!(spectral_endpoints(&q, 8, 5).is_err());
        assert!(spectral_endpoints(&q, 8, 0).is_err());
        assert!(spectral_endpoints(&q, 0, 1).is_err());
    }

    #[test]
    fn interlacing_detector() {
        assert!(interlacing_violations(0.0, &[1.0, 3.0], &[2.0, 4.0]).is_empty());
        assert_eq!(
            interlacing_violations(0.0, &[1.0, 1.5], &[2.0, 4.0]),
            vec![2]
        );
        assert_eq!(interlacing_violations(1.0, &[1.0], &[2.0]), vec![1]);
        let flagged = SpectralResult::from_endpoints(0.0, vec![1.0, 1.5], vec![2.0, 4.0], 4);
        assert!(matches!(
            flagged.validated(),
            Err(Error::Interlacing { n: 2, .. })
        ));
    }
}
