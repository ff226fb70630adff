use rayon::prelude::*;

use super::{spectral_endpoints, SpectralResult};
use crate::error::{Error, Result};
use crate::potential::FourierSequence;

/// Endpoint changes below `NOISE_FACTOR · ε · (2π M_max)²` are eigensolver
/// noise; such endpoints are taken as converged.
const NOISE_FACTOR: f64 = 16.0;

/// Runs [`spectral_endpoints`] for every `M` in `m_list` and extrapolates each
/// endpoint to `M → ∞` by a least-squares polynomial in `1/M` of degree
/// `min(len - 1, 2)`.
///
/// Endpoints that stopped moving are kept at their largest-`M` value.
/// Endpoints whose sequence across `M` is not monotone are also kept at the
/// largest-`M` value, and the result carries a warning.
pub fn richardson_extrapolate(
    q: &FourierSequence,
    n_max: usize,
    m_list: &[usize],
) -> Result<SpectralResult> {
    if m_list.is_empty() {
        return Err(Error::param("empty list of Galerkin sizes"));
    }
    if m_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("Galerkin sizes must be strictly increasing"));
    }
    if m_list[0] < 2 * n_max {
        return Err(Error::param(format!(
            "every M must be >= 2 n_max = {}",
            2 * n_max
        )));
    }
    let runs: Vec<SpectralResult> = m_list
        .par_iter()
        .map(|&m| spectral_endpoints(q, m, n_max))
        .collect::<Result<_>>()?;
    let last = runs.last().expect("non-empty");
    if runs.len() == 1 {
        return Ok(last.clone());
    }

    let m_max = *m_list.last().expect("non-empty") as f64;
    let noise = NOISE_FACTOR * f64::EPSILON * (2.0 * std::f64::consts::PI * m_max).powi(2);
    let h: Vec<f64> = m_list.iter().map(|&m| 1.0 / m as f64).collect();
    let degree = (m_list.len() - 1).min(2);

    let mut orders = Vec::new();
    let mut non_monotone = Vec::new();
    let mut extrapolate = |label: String, series: Vec<f64>| -> f64 {
        let diffs: Vec<f64> = series.windows(2).map(|w| w[1] - w[0]).collect();
        let latest = *series.last().expect("non-empty");
        if diffs.last().map_or(true, |d| d.abs() <= noise) {
            return latest;
        }
        let monotone = diffs
            .iter()
            .all(|d| d.signum() == diffs[0].signum() && *d != 0.0);
        if !monotone {
            non_monotone.push(label);
            return latest;
        }
        if diffs.len() >= 2 {
            let (d1, d2) = (diffs[diffs.len() - 2], diffs[diffs.len() - 1]);
            let n = m_list.len();
            let spacing = m_list[n - 1] as f64 / m_list[n - 2] as f64;
            orders.push((d1 / d2).abs().ln() / spacing.ln());
        }
        poly_value_at_zero(&h, &series, degree)
    };

    let lambda0 = extrapolate("lambda0".into(), runs.iter().map(|r| r.lambda0).collect());
    let mut minus = Vec::with_capacity(n_max);
    let mut plus = Vec::with_capacity(n_max);
    for i in 0..n_max {
        minus.push(extrapolate(
            format!("lambda_{}^-", i + 1),
            runs.iter().map(|r| r.minus[i]).collect(),
        ));
        plus.push(extrapolate(
            format!("lambda_{}^+", i + 1),
            runs.iter().map(|r| r.plus[i]).collect(),
        ));
    }

    let mut result = SpectralResult::from_endpoints(lambda0, minus, plus, last.truncation);
    result.extrapolated = true;
    if !orders.is_empty() {
        orders.sort_by(f64::total_cmp);
        result.convergence_order = Some(orders[orders.len() / 2]);
    }
    if !non_monotone.is_empty() {
        result.warnings.push(format!(
            "non-monotone across M, kept largest-M value: {}",
            non_monotone.join(", ")
        ));
    }
    Ok(result)
}

/// Least-squares fit `y ≈ Σ_{d<=degree} c_d x^d`, returns `c_0`.
fn poly_value_at_zero(x: &[f64], y: &[f64], degree: usize) -> f64 {
    let cols = degree + 1;
    // normal equations, tiny system
    let mut a = vec![vec![0.0; cols + 1]; cols];
    for (&xi, &yi) in x.iter().zip(y) {
        let powers: Vec<f64> = (0..cols).map(|d| xi.powi(d as i32)).collect();
        for r in 0..cols {
            for c in 0..cols {
                a[r][c] += powers[r] * powers[c];
            }
            a[r][cols] += powers[r] * yi;
        }
    }
    // Gaussian elimination with partial pivoting
    for col in 0..cols {
        let pivot = (col..cols)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty");
        a.swap(col, pivot);
        for row in col + 1..cols {
            let f = a[row][col] / a[col][col];
            for c in col..=cols {
                a[row][c] -= f * a[col][c];
            }
        }
    }
    let mut coef = vec![0.0; cols];
    for row in (0..cols).rev() {
        let tail: f64 = (row + 1..cols).map(|c| a[row][c] * coef[c]).sum();
        coef[row] = (a[row][cols] - tail) / a[row][row];
    }
    coef[0]
}
