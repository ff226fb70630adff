//! Two-sided sequences, weighted `h^ω(ℤ)` norms and convolution.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weights::Weight;

#[derive(Debug, Clone, PartialEq)]
pub struct TwoSidedSequence {
    half_width: usize,
    /// `values[k + N] = a(k)`.
    values: Vec<Complex64>,
}

impl TwoSidedSequence {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.len() % 2 == 0 {
            return Err(Error::param(format!(
                "two-sided sequence needs odd length, got {}",
                values.len()
            )));
        }
        let half_width = values.len() / 2;
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                index: i as i64 - half_width as i64,
            });
        }
        Ok(Self { half_width, values })
    }

    pub fn zeros(half_width: usize) -> Self {
        Self {
            half_width,
            values: vec![Complex64::new(0.0, 0.0); 2 * half_width + 1],
        }
    }

    pub fn from_fn(half_width: usize, mut f: impl FnMut(i64) -> Complex64) -> Result<Self> {
        let n = half_width as i64;
        Self::new((-n..=n).map(&mut f).collect())
    }

    /// Unit impulse at `k` on the smallest symmetric support containing it.
    pub fn impulse(k: i64) -> Self {
        let mut a = Self::zeros(k.unsigned_abs() as usize);
        a.values[(k + a.half_width as i64) as usize] = Complex64::new(1.0, 0.0);
        a
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, k: i64) -> Complex64 {
        let n = self.half_width as i64;
        if k.abs() > n {
            Complex64::new(0.0, 0.0)
        } else {
            self.values[(k + n) as usize]
        }
    }

    /// `α·self + other` on the union of supports.
    pub fn axpy(&self, alpha: Complex64, other: &Self) -> Self {
        let n = self.half_width.max(other.half_width);
        let ni = n as i64;
        Self {
            half_width: n,
            values: (-ni..=ni)
                .map(|k| alpha * self.get(k) + other.get(k))
                .collect(),
        }
    }
}

/// `(Σ_{|k|<=N} ω²(k) |a(k)|²)^{1/2}` with the even extension of `w`.
pub fn weighted_norm(a: &TwoSidedSequence, w: &Weight) -> Result<f64> {
    if a.half_width > w.len() {
        return Err(Error::WeightTooShort {
            required: a.half_width,
            available: w.len(),
        });
    }
    let n = a.half_width as i64;
    let mut acc = 0.0;
    for k in -n..=n {
        let wk = w.extend_to_z(k)?;
        acc += wk * wk * a.get(k).norm_sqr();
    }
    Ok(acc.sqrt())
}

/// Full discrete convolution `(a∗b)(k) = Σ_j a(k-j) b(j)`, computed directly.
pub fn convolve(a: &TwoSidedSequence, b: &TwoSidedSequence) -> TwoSidedSequence {
    let la = a.values.len();
    let lb = b.values.len();
    let mut out = vec![Complex64::new(0.0, 0.0); la + lb - 1];
    for (i, x) in a.values.iter().enumerate() {
        if *x == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (j, y) in b.values.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    TwoSidedSequence {
        half_width: a.half_width + b.half_width,
        values: out,
    }
}

/// `‖a∗b‖_{h^t} / (‖a‖_{h^s} ‖b‖_{h^r})` with power weights `(1+2|k|)^·`.
pub fn bound_ratio(
    a: &TwoSidedSequence,
    b: &TwoSidedSequence,
    s: f64,
    r: f64,
    t: f64,
) -> Result<f64> {
    let c = convolve(a, b);
    let na = weighted_norm(a, &Weight::power(s, a.half_width.max(1))?)?;
    let nb = weighted_norm(b, &Weight::power(r, b.half_width.max(1))?)?;
    let nc = weighted_norm(&c, &Weight::power(t, c.half_width.max(1))?)?;
    if na == 0.0 || nb == 0.0 {
        return Err(Error::param("bound ratio needs nonzero operands"));
    }
    Ok(nc / (na * nb))
}

/// Probe pairs for the convolution bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeFamily {
    /// `(1+2|k|)^{-s} (1 + log(1+|k|))^{-1}`, the near-extremal pair for the
    /// bounded regime.
    Damped,
    /// `(1+2|k|)^{-s}` without damping, the borderline power sequence used to
    /// exhibit unbounded ratios.
    Witness,
}

impl ProbeFamily {
    /// Family matching the regime of `(s, r, t)`.
    pub fn for_regime(s: f64, r: f64, t: f64) -> Self {
        if s + r - t > 0.5 {
            ProbeFamily::Damped
        } else {
            ProbeFamily::Witness
        }
    }

    pub fn sequence(self, exponent: f64, half_width: usize) -> TwoSidedSequence {
        let n = half_width as i64;
        let values = (-n..=n)
            .map(|k| {
                let ak = k.unsigned_abs() as f64;
                let base = (1.0 + 2.0 * ak).powf(-exponent);
                let v = match self {
                    ProbeFamily::Damped => base / (1.0 + ak.ln_1p()),
                    ProbeFamily::Witness => base,
                };
                Complex64::new(v, 0.0)
            })
            .collect();
        TwoSidedSequence { half_width, values }
    }
}

/// Ratio sweep over truncation sizes for the probe family.
pub fn convolution_bound_ratio(
    s: f64,
    r: f64,
    t: f64,
    family_sizes: &[usize],
    family: ProbeFamily,
) -> Result<Vec<f64>> {
    if !(s >= 0.0 && r >= 0.0) {
        return Err(Error::param(format!(
            "need s, r >= 0, got s = {s}, r = {r}"
        )));
    }
    if !(t <= s.min(r)) {
        return Err(Error::param(format!("need t <= min(s, r), got t = {t}")));
    }
    if family_sizes.is_empty() {
        return Err(Error::param("empty list of sizes"));
    }
    family_sizes
        .par_iter()
        .map(|&n| {
            let a = family.sequence(s, n);
            let b = family.sequence(r, n);
            bound_ratio(&a, &b, s, r, t)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(v: &[f64]) -> TwoSidedSequence {
        TwoSidedSequence::new(v.iter().map(|&x| Complex64::new(x, 0.0)).collect()).unwrap()
    }

    #[test]
    fn norm_examples() {
        let w = Weight::power(1.0, 4).unwrap();
        assert_eq!(
            weighted_norm(&TwoSidedSequence::impulse(0), &w).unwrap(),
            1.0
        );
        let a = real(&[1.0, 0.0, 1.0]);
        assert!((weighted_norm(&a, &w).unwrap() - 18f64.sqrt()).abs() < 1e-14);
        assert_eq!(weighted_norm(&TwoSidedSequence::zeros(3), &w).unwrap(), 0.0);
        assert!(matches!(
            weighted_norm(&TwoSidedSequence::zeros(5), &w),
            Err(Error::WeightTooShort { .. })
        ));
    }

    #[test]
    fn convolution_examples() {
        let a = real(&[0.5, -1.0, 2.0, 0.0, 3.0]);
        let id = convolve(&a, &TwoSidedSequence::impulse(0));
        assert_eq!(id.half_width(), 2);
        assert_eq!(id.values(), a.values());

        let e2 = convolve(&TwoSidedSequence::impulse(1), &TwoSidedSequence::impulse(1));
        for k in -2..=2 {
            let expect = if k == 2 { 1.0 } else { 0.0 };
            assert_eq!(e2.get(k), Complex64::new(expect, 0.0));
        }

        let boxcar = real(&[1.0, 1.0, 1.0]);
        let tri = convolve(&boxcar, &boxcar);
        assert_eq!(tri.half_width(), 2);
        let got: Vec<f64> = tri.values().iter().map(|z| z.re).collect();
        assert_eq!(got, vec![1.0, 2.0, 3.0, 2.0, 1.0]);
    }

    #[test]
    fn impulse_ratio_is_one() {
        let e0 = TwoSidedSequence::impulse(0);
        for (s, r, t) in [(1.0, 1.0, 0.0), (0.0, 0.0, 0.0), (2.0, 0.5, -1.0)] {
            assert_eq!(bound_ratio(&e0, &e0, s, r, t).unwrap(), 1.0);
        }
    }

    #[test]
    fn ratio_preconditions() {
        let sizes = [16];
        assert!(convolution_bound_ratio(-0.1, 1.0, -1.0, &sizes, ProbeFamily::Damped).is_err());
        assert!(convolution_bound_ratio(1.0, 1.0, 1.5, &sizes, ProbeFamily::Damped).is_err());
        assert!(convolution_bound_ratio(1.0, 1.0, 0.0, &[], ProbeFamily::Damped).is_err());
    }

    #[test]
    fn regimes() {
        let sizes: Vec<usize> = (4..=10).map(|j| 1usize << j).collect();
        assert_eq!(ProbeFamily::for_regime(1.0, 1.0, 0.0), ProbeFamily::Damped);
        let bounded = convolution_bound_ratio(1.0, 1.0, 0.0, &sizes, ProbeFamily::Damped).unwrap();
        let max = bounded.iter().cloned().fold(f64::MIN, f64::max);
        let min = bounded.iter().cloned().fold(f64::MAX, f64::min);
        assert!(max / min <= 10.0, "{bounded:?}");

        assert_eq!(ProbeFamily::for_regime(0.0, 0.0, 0.0), ProbeFamily::Witness);
        let growing = convolution_bound_ratio(0.0, 0.0, 0.0, &sizes, ProbeFamily::Witness).unwrap();
        assert!(growing.windows(2).all(|w| w[1] > w[0]), "{growing:?}");
        // boxcar oracle: ‖box∗box‖ / ‖box‖² with box of width 2N+1
        let n = 16usize;
        let width = (2 * n + 1) as f64;
        let tri_sq: f64 = (-(2 * n as i64)..=(2 * n as i64))
            .map(|k| (width - k.unsigned_abs() as f64).powi(2))
            .sum();
        assert!((growing[0] - tri_sq.sqrt() / width).abs() < 1e-12);
    }
}
