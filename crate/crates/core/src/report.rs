//! Spectral reports shared by the torus and harmonic oscillator checks.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Where a reference trace value comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum TargetProvenance {
    /// Exact closed form of the full series.
    ClosedForm { formula: String },
    /// Partial sum at a larger cutoff; `tail_bound` covers the remainder.
    Truncated { cutoff: usize },
    /// Finite support: the series is a finite sum.
    Exact,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceTarget {
    pub value: Complex64,
    pub provenance: TargetProvenance,
    /// Bound on `|value - true series|` (zero for closed forms).
    pub tail_bound: f64,
}

/// Truncation used to produce the computed quantities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub parameter: String,
    pub value: usize,
    /// Bound on the series remainder beyond the truncation, when summable.
    pub tail_bound: Option<f64>,
}

/// Eigenvalues, the traces computed from them, and residuals between routes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub label: String,
    /// Sorted by descending modulus.
    pub eigenvalues: Vec<Complex64>,
    pub eigenvalue_sum: Complex64,
    pub matrix_trace: Option<Complex64>,
    pub pairing_trace: Option<Complex64>,
    pub kernel_trace: Option<Complex64>,
    pub target: Option<TraceTarget>,
    pub truncation: Truncation,
    pub non_normality: Option<f64>,
    pub residuals: BTreeMap<String, f64>,
}

impl SpectralReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Eigenvalue table: `index,re,im,modulus`.
    pub fn eigenvalue_csv(&self) -> String {
        eigenvalue_csv(&self.eigenvalues)
    }

    pub fn write(&self, json_path: &Path, csv_path: &Path) -> Result<()> {
        std::fs::write(json_path, self.to_json()?)?;
        std::fs::write(csv_path, self.eigenvalue_csv())?;
        Ok(())
    }
}

pub fn eigenvalue_csv(ev: &[Complex64]) -> String {
    let mut out = Vec::new();
    writeln!(out, "index,re,im,modulus").unwrap();
    for (i, z) in ev.iter().enumerate() {
        writeln!(out, "{i},{:e},{:e},{:e}", z.re, z.im, z.norm()).unwrap();
    }
    String::from_utf8(out).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let mut residuals = BTreeMap::new();
        residuals.insert("eig_vs_matrix".into(), 1.5e-15);
        let r = SpectralReport {
            label: "demo".into(),
            eigenvalues: vec![Complex64::new(1.0, 0.25), Complex64::new(0.1, -0.3)],
            eigenvalue_sum: Complex64::new(1.1, -0.05),
            matrix_trace: Some(Complex64::new(1.1, -0.05)),
            pairing_trace: None,
            kernel_trace: None,
            target: Some(TraceTarget {
                value: Complex64::new(0.5 * (0.5f64).cosh() / (0.5f64).sinh(), 0.0),
                provenance: TargetProvenance::ClosedForm { formula: "coth(1/2)/2".into() },
                tail_bound: 0.0,
            }),
            truncation: Truncation { parameter: "N".into(), value: 128, tail_bound: Some(3.9e-4) },
            non_normality: Some(0.01),
            residuals,
        };
        let back = SpectralReport::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
        assert!(r.eigenvalue_csv().starts_with("index,re,im,modulus\n0,"));
    }
}
