//! Spec files and CSV tables.
//!
//! Potential spec (JSON):
//!
//! ```json
//! {"kind": "power_decay", "params": {"s": 0.0, "amplitude": 1.0}, "seed": 7, "half_width": 512}
//! {"kind": "mathieu", "params": {"a": 1.0}}
//! {"kind": "delta_comb", "params": {"alpha": 1.0}, "half_width": 256}
//! {"kind": "finite_band", "params": {"coefficients": [[1.0, 0.0], [0.0, 0.5]]}}
//! ```
//!
//! `seed` defaults to 0, `half_width` is required for `power_decay` and
//! `delta_comb`, and an optional `mean` shifts every eigenvalue.
//!
//! Weight spec (JSON): `{"kind": "power" | "example_a" | "table", "s": f64,
//! "K": usize, "values": [f64]?}`; `table` takes `values` (and ignores `s`).
//!
//! Coefficient CSV: header `k,re,im`, one row per `k = 1..=N`
//! (the hermitian extension is implied). Weight CSV: header `k,omega`.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{sample_potential_family, FourierSequence, PotentialFamily};
use crate::weights::Weight;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    #[serde(flatten)]
    pub family: PotentialFamily,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<f64>,
}

impl PotentialSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)
            .map_err(|e| Error::SpecFile(format!("potential spec: {e}")))?;
        spec.check()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    fn check(&self) -> Result<()> {
        let needs_width = matches!(
            self.family,
            PotentialFamily::PowerDecay { .. } | PotentialFamily::DeltaComb { .. }
        );
        if needs_width && self.half_width.unwrap_or(0) == 0 {
            return Err(Error::SpecFile(
                "half_width must be a positive integer for this kind".into(),
            ));
        }
        if let Some(m) = self.mean {
            if !m.is_finite() {
                return Err(Error::SpecFile("mean must be finite".into()));
            }
        }
        Ok(())
    }

    pub fn build(&self) -> Result<FourierSequence> {
        self.check()?;
        let q = sample_potential_family(&self.family, self.half_width.unwrap_or(0), self.seed)?;
        Ok(match self.mean {
            Some(m) => {
                let base = q.mean();
                q.with_mean(base + m)
            }
            None => q,
        })
    }

    /// Regularity index `s` for families that carry one.
    pub fn sobolev_index(&self) -> Option<f64> {
        match self.family {
            PotentialFamily::PowerDecay { s, .. } => Some(s),
            _ => None,
        }
    }

    pub fn is_delta_comb(&self) -> Option<f64> {
        match self.family {
            PotentialFamily::DeltaComb { alpha } => Some(alpha),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    Power,
    ExampleA,
    Table,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightSpec {
    pub kind: WeightKind,
    #[serde(default)]
    pub s: f64,
    #[serde(rename = "K", default)]
    pub len: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

impl WeightSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::SpecFile(format!("weight spec: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn build(&self) -> Result<Weight> {
        if !self.s.is_finite() {
            return Err(Error::SpecFile("s must be finite".into()));
        }
        match self.kind {
            WeightKind::Power | WeightKind::ExampleA => {
                let len = self
                    .len
                    .filter(|&k| k >= 1)
                    .ok_or_else(|| Error::SpecFile("K must be a positive integer".into()))?;
                if self.kind == WeightKind::Power {
                    Weight::power(self.s, len)
                } else {
                    Weight::example_a(self.s, len)
                }
            }
            WeightKind::Table => {
                let values = self
                    .values
                    .clone()
                    .ok_or_else(|| Error::SpecFile("table weight needs values".into()))?;
                if let Some(len) = self.len {
                    if len != values.len() {
                        return Err(Error::SpecFile(format!(
                            "K = {len} but {} values given",
                            values.len()
                        )));
                    }
                }
                Weight::from_values(values, "table").map_err(|e| Error::SpecFile(e.to_string()))
            }
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CoeffRow {
    k: i64,
    re: f64,
    im: f64,
}

/// Writes `q̂(1..=N)` as `k,re,im`.
pub fn write_coefficients_csv<W: Write>(q: &FourierSequence, out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    for (i, c) in q.one_sided().iter().enumerate() {
        wtr.serialize(CoeffRow {
            k: i as i64 + 1,
            re: c.re,
            im: c.im,
        })?;
    }
    wtr.flush()?;
    Ok(())
}

/// Reads a `k,re,im` table. Rows with `k <= 0` must be consistent with the
/// hermitian extension (`k = 0` must be zero) and are otherwise ignored.
pub fn read_coefficients_csv<R: Read>(input: R) -> Result<FourierSequence> {
    let mut rdr = csv::Reader::from_reader(input);
    let mut positive: Vec<(i64, Complex64)> = Vec::new();
    let mut nonpositive: Vec<(i64, Complex64)> = Vec::new();
    for row in rdr.deserialize() {
        let row: CoeffRow = row?;
        let c = Complex64::new(row.re, row.im);
        if row.k > 0 {
            positive.push((row.k, c));
        } else {
            nonpositive.push((row.k, c));
        }
    }
    let n = positive.iter().map(|p| p.0).max().unwrap_or(0) as usize;
    let mut one_sided = vec![Complex64::new(0.0, 0.0); n];
    let mut seen = vec![false; n];
    for (k, c) in positive {
        let i = k as usize - 1;
        if seen[i] {
            return Err(Error::SpecFile(format!("duplicate row for k = {k}")));
        }
        seen[i] = true;
        one_sided[i] = c;
    }
    let q = FourierSequence::make_real_potential(&one_sided)?;
    for (k, c) in nonpositive {
        if q.coeff(k) != c {
            return Err(Error::SpecFile(format!(
                "row k = {k} breaks hermitian symmetry or the zero-mean normalization"
            )));
        }
    }
    Ok(q)
}

#[derive(Debug, Serialize, Deserialize)]
struct WeightRow {
    k: usize,
    omega: f64,
}

pub fn write_weight_csv<W: Write>(w: &Weight, out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    for (i, &omega) in w.values().iter().enumerate() {
        wtr.serialize(WeightRow { k: i + 1, omega })?;
    }
    wtr.flush()?;
    Ok(())
}
