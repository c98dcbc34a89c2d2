//! Weighted mixed-norm Lebesgue spaces `L^P_w` on product grids.
//!
//! The norm is an iterated quadrature: the innermost integral runs over the
//! first axis with exponent `p_1`, its result is raised to `p_2 / p_1` and
//! integrated over the second axis, and so on out to `p_n`.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{self, integrate, Partition, ProductGrid, SampledFunction, WeightFunction};

/// Exponents `P = (p_1, …, p_n)` with `1 ≤ p_i < ∞`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ExponentTuple(Vec<f64>);

impl ExponentTuple {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidParameter("empty exponent tuple".into()));
        }
        for &p in &entries {
            if !(p.is_finite() && p >= 1.0) {
                return Err(Error::InvalidExponent { value: p, reason: "mixed-norm exponents must lie in [1, ∞)" });
            }
        }
        Ok(Self(entries))
    }

    /// The same exponent repeated on every axis.
    pub fn uniform(p: f64, dims: usize) -> Result<Self> {
        Self::new(vec![p; dims])
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<f64>> for ExponentTuple {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ExponentTuple> for Vec<f64> {
    fn from(p: ExponentTuple) -> Self {
        p.0
    }
}

/// Conjugate exponents `P'`; an entry is `∞` where `p_i = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualExponentTuple(Vec<f64>);

impl DualExponentTuple {
    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Conjugate of a single exponent: `1/p + 1/p' = 1`, with `1' = ∞`.
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

pub fn dual_exponents(p: &ExponentTuple) -> DualExponentTuple {
    DualExponentTuple(p.0.iter().map(|&p| conjugate(p)).collect())
}

/// Where the weight enters the iterated integral.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightConvention {
    /// Weight appears once, as a density, inside the innermost integral:
    /// `(∫ |f|^{p_1} w dμ_1)^{…}`.
    Density,
    /// Unweighted mixed norm of the product `f·w`.
    #[default]
    Pointwise,
}

/// Iterated norm of nonnegative samples. `density` multiplies the innermost
/// integrand once; entries of `exponents` may be `∞` (max over the axis).
pub(crate) fn iterated_norm(grid: &ProductGrid, magnitudes: &[f64], density: Option<&[f64]>, exponents: &[f64]) -> f64 {
    debug_assert_eq!(magnitudes.len(), grid.node_count());
    debug_assert_eq!(exponents.len(), grid.dims());
    let mut cur: Vec<f64> = magnitudes.to_vec();
    // Running exponent of the quantity stored in `cur`: values are plain
    // magnitudes (power 1) between reductions.
    for (k, axis) in grid.axes().iter().enumerate() {
        let n = axis.len();
        let rest = cur.len() / n;
        let p = exponents[k];
        let q = axis.quad_weights();
        let mut next = vec![0.0; rest];
        if p.is_infinite() {
            for i in 0..n {
                let row = &cur[i * rest..(i + 1) * rest];
                for (acc, &v) in next.iter_mut().zip(row) {
                    if v > *acc {
                        *acc = v;
                    }
                }
            }
        } else {
            // Rescale by the row maximum so large exponents neither overflow
            // nor underflow.
            let mut scale = vec![0.0f64; rest];
            for i in 0..n {
                for (s, &v) in scale.iter_mut().zip(&cur[i * rest..(i + 1) * rest]) {
                    *s = s.max(v);
                }
            }
            for i in 0..n {
                let row = &cur[i * rest..(i + 1) * rest];
                for (r, (acc, &v)) in next.iter_mut().zip(row).enumerate() {
                    if v == 0.0 {
                        continue;
                    }
                    let mut term = (v / scale[r]).powf(p) * q[i];
                    if k == 0 {
                        if let Some(d) = density {
                            term *= d[i * rest + r];
                        }
                    }
                    *acc += term;
                }
            }
            for (acc, s) in next.iter_mut().zip(&scale) {
                *acc = if *s == 0.0 { 0.0 } else { s * acc.powf(1.0 / p) };
            }
        }
        cur = next;
    }
    cur[0]
}

fn check_weight_grid(f: &SampledFunction, w: &WeightFunction) -> Result<()> {
    if Arc::ptr_eq(f.grid(), w.grid()) || **f.grid() == **w.grid() {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

/// `‖f‖_{L^P_w}` under the chosen weight convention.
pub fn mixed_norm(f: &SampledFunction, p: &ExponentTuple, w: &WeightFunction, convention: WeightConvention) -> Result<f64> {
    let grid = f.grid();
    if p.len() != grid.dims() {
        return Err(Error::DimensionMismatch { expected: grid.dims(), got: p.len() });
    }
    check_weight_grid(f, w)?;
    let mags = f.abs_values();
    Ok(match convention {
        WeightConvention::Pointwise => {
            let weighted: Vec<f64> = mags.iter().zip(w.values()).map(|(a, b)| a * b).collect();
            iterated_norm(grid, &weighted, None, p.entries())
        }
        WeightConvention::Density => iterated_norm(grid, &mags, Some(w.values()), p.entries()),
    })
}

/// Unweighted mixed norm.
pub fn mixed_norm_unweighted(f: &SampledFunction, p: &ExponentTuple) -> Result<f64> {
    if p.len() != f.grid().dims() {
        return Err(Error::DimensionMismatch { expected: f.grid().dims(), got: p.len() });
    }
    Ok(iterated_norm(f.grid(), &f.abs_values(), None, p.entries()))
}

/// Norm in the dual space `L^{P'}_{w^{-1}}` (pointwise convention); `∞`
/// entries are evaluated as a maximum over nodes.
pub fn dual_norm(h: &SampledFunction, p_dual: &DualExponentTuple, w_inv: &WeightFunction) -> Result<f64> {
    let grid = h.grid();
    if p_dual.len() != grid.dims() {
        return Err(Error::DimensionMismatch { expected: grid.dims(), got: p_dual.len() });
    }
    check_weight_grid(h, w_inv)?;
    let weighted: Vec<f64> = h.abs_values().iter().zip(w_inv.values()).map(|(a, b)| a * b).collect();
    Ok(iterated_norm(grid, &weighted, None, p_dual.entries()))
}

/// Bilinear pairing `∫ f h dμ` used by traces.
pub fn dual_pairing(f: &SampledFunction, h: &SampledFunction) -> Result<Complex64> {
    Ok(integrate(&f.mul(h)?))
}

/// Per-box μ-averages of `f`, the conditional expectation onto the partition.
pub fn box_average(f: &SampledFunction, partition: &Partition) -> SampledFunction {
    let q = f.grid().quad_weights();
    let mut sums = vec![Complex64::new(0.0, 0.0); partition.len()];
    let mut mass = vec![0.0; partition.len()];
    for (i, &b) in partition.owner().iter().enumerate() {
        sums[b] += f.values()[i] * q[i];
        mass[b] += q[i];
    }
    let means: Vec<Complex64> = sums.iter().zip(&mass).map(|(s, m)| s / m).collect();
    let values = partition.owner().iter().map(|&b| means[b]).collect();
    SampledFunction::from_parts_unchecked(f.grid().clone(), values)
}

/// Finite-rank contraction on `L^P_w`: conditional expectation onto the boxes.
/// The weight must be constant on every box, otherwise contractivity fails in
/// general and an error is returned.
pub fn map_projection(f: &SampledFunction, partition: &Partition, w: &WeightFunction) -> Result<SampledFunction> {
    check_weight_grid(f, w)?;
    if partition.owner().len() != f.len() {
        return Err(Error::InvalidPartition("partition belongs to another grid".into()));
    }
    if !grid::is_box_constant(w.values(), partition) {
        return Err(Error::NotBoxConstant("weight"));
    }
    Ok(box_average(f, partition))
}
