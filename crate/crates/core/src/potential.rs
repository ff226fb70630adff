//! Real 1-periodic potentials stored as truncated Fourier coefficient sequences.
//!
//! A potential `q(x) = Σ q̂(k) e^{2πikx}` is real exactly when its coefficients
//! are hermitian, `q̂(-k) = conj(q̂(k))`. Coefficients are kept densely for
//! `|k| <= N`; everything beyond the half-width is treated as zero. The zeroth
//! coefficient of a potential is always 0, a nonzero mean is recorded separately
//! and only shifts the spectrum.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Margin added to the power-decay exponent so that the family sits strictly
/// inside `H^s` while missing `H^{s+0.02}`.
pub const POWER_DECAY_MARGIN: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct FourierSequence {
    half_width: usize,
    /// `coeffs[k + N]` holds `q̂(k)`.
    coeffs: Vec<Complex64>,
    hermitian: bool,
    mean: f64,
}

impl FourierSequence {
    pub fn zero() -> Self {
        Self {
            half_width: 0,
            coeffs: vec![Complex64::new(0.0, 0.0)],
            hermitian: true,
            mean: 0.0,
        }
    }

    /// Builds the hermitian extension of `q̂(1..=N)` with `q̂(0) = 0`.
    pub fn make_real_potential(one_sided: &[Complex64]) -> Result<Self> {
        if let Some(i) = one_sided.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                index: i as i64 + 1,
            });
        }
        let n = one_sided.len();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * n + 1];
        for (i, c) in one_sided.iter().enumerate() {
            let k = i + 1;
            coeffs[n + k] = *c;
            coeffs[n - k] = c.conj();
        }
        Ok(Self {
            half_width: n,
            coeffs,
            hermitian: true,
            mean: 0.0,
        })
    }

    /// Wraps an arbitrary two-sided list `q̂(-N..=N)`. The hermitian flag is set
    /// only if the symmetry holds exactly.
    pub fn from_two_sided(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() % 2 == 0 {
            return Err(Error::param(format!(
                "two-sided list must have odd length, got {}",
                coeffs.len()
            )));
        }
        let n = coeffs.len() / 2;
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                index: i as i64 - n as i64,
            });
        }
        let hermitian = (0..=n).all(|k| coeffs[n + k] == coeffs[n - k].conj());
        Ok(Self {
            half_width: n,
            coeffs,
            hermitian,
            mean: 0.0,
        })
    }

    /// Records a constant mean. It is added to every computed eigenvalue.
    pub fn with_mean(mut self, mean: f64) -> Self {
        self.mean = mean;
        self
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// `q̂(k)`, zero outside the stored range.
    pub fn coeff(&self, k: i64) -> Complex64 {
        let n = self.half_width as i64;
        if k.abs() > n {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + n) as usize]
        }
    }

    /// Coefficients `q̂(1..=N)`.
    pub fn one_sided(&self) -> &[Complex64] {
        &self.coeffs[self.half_width + 1..]
    }

    /// Coefficients `q̂(-N..=N)`.
    pub fn two_sided(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// True when every stored coefficient has zero imaginary part.
    pub fn is_real_valued_coefficients(&self) -> bool {
        self.coeffs.iter().all(|c| c.im == 0.0)
    }

    /// `q(x) -> q(-x)`, i.e. `q̂(k) -> q̂(-k)`.
    pub fn reflected(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        Self {
            coeffs,
            ..self.clone()
        }
    }

    /// Multiplies coefficients and mean by a real scalar.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|z| z * c).collect(),
            mean: self.mean * c,
            ..self.clone()
        }
    }

    /// Sobolev norm over `k ∈ ℤ`: `(Σ_{|k|<=N} (1+2|k|)^{2s} |q̂(k)|²)^{1/2}`.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        let n = self.half_width as i64;
        (-n..=n)
            .map(|k| sobolev_weight_sq(k, s) * self.coeff(k).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Same norm summed over `k ∈ ℕ` only. For hermitian sequences with
    /// `q̂(0) = 0` this is the ℤ-norm divided by `√2`.
    pub fn sobolev_norm_positive(&self, s: f64) -> f64 {
        (1..=self.half_width as i64)
            .map(|k| sobolev_weight_sq(k, s) * self.coeff(k).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Sobolev norm of the truncation to `|k| <= n`.
    pub fn partial_sobolev_norm(&self, s: f64, n: usize) -> f64 {
        let n = n.min(self.half_width) as i64;
        (-n..=n)
            .map(|k| sobolev_weight_sq(k, s) * self.coeff(k).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

fn sobolev_weight_sq(k: i64, s: f64) -> f64 {
    (1.0 + 2.0 * k.unsigned_abs() as f64).powf(2.0 * s)
}

/// Test-potential generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum PotentialFamily {
    /// `q̂(k) = c·σ_k·k^{-s-1/2-0.01}` with seeded random signs.
    PowerDecay {
        s: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// `q̂(±1) = a`, i.e. `q(x) = 2a cos 2πx`.
    Mathieu { a: f64 },
    /// Truncated periodic delta comb `α Σ δ(x - j)`: `q̂(k) = α` for `1 <= |k| <= N`,
    /// with the mean `α` recorded separately.
    DeltaComb { alpha: f64 },
    /// Explicit one-sided list `q̂(1..=N)`.
    FiniteBand { coefficients: Vec<Complex64> },
}

fn one() -> f64 {
    1.0
}

/// Generates a potential from a family. `half_width` is the truncation `N` for
/// `power_decay` and `delta_comb`, and is ignored by the other kinds.
pub fn sample_potential_family(
    family: &PotentialFamily,
    half_width: usize,
    seed: u64,
) -> Result<FourierSequence> {
    match family {
        PotentialFamily::PowerDecay { s, amplitude } => {
            if half_width == 0 {
                return Err(Error::param("power_decay needs N >= 1"));
            }
            if !s.is_finite() || !amplitude.is_finite() {
                return Err(Error::param("power_decay parameters must be finite"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let exponent = -s - 0.5 - POWER_DECAY_MARGIN;
            let coeffs: Vec<Complex64> = (1..=half_width)
                .map(|k| {
                    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                    Complex64::new(amplitude * sign * (k as f64).powf(exponent), 0.0)
                })
                .collect();
            FourierSequence::make_real_potential(&coeffs)
        }
        PotentialFamily::Mathieu { a } => {
            FourierSequence::make_real_potential(&[Complex64::new(*a, 0.0)])
        }
        PotentialFamily::DeltaComb { alpha } => {
            if half_width == 0 {
                return Err(Error::param("delta_comb needs N >= 1"));
            }
            if !alpha.is_finite() {
                return Err(Error::param("delta_comb strength must be a finite real"));
            }
            let coeffs = vec![Complex64::new(*alpha, 0.0); half_width];
            Ok(FourierSequence::make_real_potential(&coeffs)?.with_mean(*alpha))
        }
        PotentialFamily::FiniteBand { coefficients } => {
            FourierSequence::make_real_potential(coefficients)
        }
    }
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn coeffs() -> impl Strategy<Value = Vec<Complex64>> {
        prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 0..24)
            .prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
    }

    proptest! {
        #[test]
        fn constructors_are_hermitian(list in coeffs(), seed in any::<u64>(), s in -1.0f64..2.0) {
            let q = FourierSequence::make_real_potential(&list).unwrap();
            let n = q.half_width() as i64;
            for k in -n..=n {
                prop_assert_eq!(q.coeff(-k), q.coeff(k).conj());
            }
            prop_assert_eq!(q.coeff(0).im, 0.0);
            prop_assert!(q.reflected().is_hermitian());
            let fam = PotentialFamily::PowerDecay { s, amplitude: 1.0 };
            prop_assert!(sample_potential_family(&fam, 16, seed).unwrap().is_hermitian());
        }

        #[test]
        fn sobolev_norm_monotone_in_s(list in coeffs(), s1 in -2.0f64..2.0, ds in 0.0f64..2.0) {
            let q = FourierSequence::make_real_potential(&list).unwrap();
            let lo = q.sobolev_norm(s1);
            let hi = q.sobolev_norm(s1 + ds);
            prop_assert!(lo <= hi * (1.0 + 1e-12));
        }
    }
}
