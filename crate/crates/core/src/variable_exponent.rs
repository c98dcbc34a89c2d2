//! Variable exponent Lebesgue spaces `L^{p(·)}` with the Luxemburg norm.
//!
//! The Luxemburg norm `inf{λ > 0 : ρ(f/λ) ≤ 1}` is found by geometric bracket
//! expansion followed by bisection in `log λ`. For `f ≠ 0` and bounded `p`
//! the map `λ ↦ ρ(f/λ)` is continuous and strictly decreasing, so the
//! bisection converges to the unique root of `ρ(f/λ) = 1`.
//!
//! Nodes where a dual exponent equals `∞` contribute `max |f|` over those
//! nodes to the modular instead of an integral.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{self, Partition, ProductGrid, SampledFunction};
use crate::mixed_norm::{box_average, conjugate};

/// Relative width at which the Luxemburg bisection stops.
pub const LUXEMBURG_RTOL: f64 = 1e-12;

/// Exponent function `p: Ω → [1, ∞]` sampled on a grid, with cached `p^±`.
#[derive(Clone, Debug)]
pub struct VariableExponent {
    grid: Arc<ProductGrid>,
    values: Vec<f64>,
    p_minus: f64,
    p_plus: f64,
}

impl VariableExponent {
    /// Bounded exponent: every sample must lie in `[1, ∞)`.
    pub fn new(grid: Arc<ProductGrid>, values: Vec<f64>) -> Result<Self> {
        if let Some(&p) = values.iter().find(|p| !(p.is_finite() && **p >= 1.0)) {
            return Err(Error::InvalidExponent { value: p, reason: "bounded variable exponents take values in [1, ∞)" });
        }
        Self::build(grid, values)
    }

    fn build(grid: Arc<ProductGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::DimensionMismatch { expected: grid.node_count(), got: values.len() });
        }
        let p_minus = values.iter().copied().fold(f64::INFINITY, f64::min);
        let p_plus = values.iter().copied().fold(1.0, f64::max);
        Ok(Self { grid, values, p_minus, p_plus })
    }

    pub fn constant(grid: Arc<ProductGrid>, p: f64) -> Result<Self> {
        let n = grid.node_count();
        Self::new(grid, vec![p; n])
    }

    pub fn from_fn(grid: Arc<ProductGrid>, p: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = (0..grid.node_count()).map(|i| p(&grid.point(i))).collect();
        Self::new(grid, values)
    }

    /// Exponent taking `box_value[b]` on box `b`.
    pub fn box_constant(grid: Arc<ProductGrid>, partition: &Partition, box_value: &[f64]) -> Result<Self> {
        if box_value.len() != partition.len() {
            return Err(Error::DimensionMismatch { expected: partition.len(), got: box_value.len() });
        }
        let values = partition.owner().iter().map(|&b| box_value[b]).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Arc<ProductGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn p_minus(&self) -> f64 {
        self.p_minus
    }

    pub fn p_plus(&self) -> f64 {
        self.p_plus
    }

    pub fn is_bounded(&self) -> bool {
        self.p_plus.is_finite()
    }

    pub fn is_box_constant(&self, partition: &Partition) -> bool {
        grid::is_box_constant(&self.values, partition)
    }

    /// Pointwise conjugate `1/p + 1/p' = 1`; `p = 1` maps to `p' = ∞`.
    pub fn dual(&self) -> VariableExponent {
        let values = self.values.iter().map(|&p| conjugate(p)).collect();
        Self::build(self.grid.clone(), values).expect("same grid")
    }

    fn check(&self, f: &SampledFunction) -> Result<()> {
        if Arc::ptr_eq(&self.grid, f.grid()) || *self.grid == **f.grid() {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

pub fn dual_exponent(p: &VariableExponent) -> VariableExponent {
    p.dual()
}

/// Modular of `|f|/λ` with precomputed magnitudes and quadrature weights.
fn modular_scaled(mags: &[f64], q: &[f64], p: &[f64], lambda: f64) -> f64 {
    let mut integral = 0.0;
    let mut sup = 0.0f64;
    for ((&m, &w), &e) in mags.iter().zip(q).zip(p) {
        if m == 0.0 {
            continue;
        }
        let t = m / lambda;
        if e.is_infinite() {
            sup = sup.max(t);
        } else {
            integral += t.powf(e) * w;
        }
    }
    integral + sup
}

/// `ρ_{p(·)}(f) = ∫ |f(x)|^{p(x)} dμ(x)`.
pub fn modular(f: &SampledFunction, p: &VariableExponent) -> Result<f64> {
    p.check(f)?;
    Ok(modular_scaled(&f.abs_values(), &f.grid().quad_weights(), p.values(), 1.0))
}

/// Result of a Luxemburg norm evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LuxemburgSolution {
    pub norm: f64,
    /// Final bracket `[lower, norm]` with `ρ(f/lower) > 1 ≥ ρ(f/norm)`.
    pub lower: f64,
    pub expansion_steps: usize,
    pub bisection_steps: usize,
}

/// Bisection in `log λ` on a bracket with `ρ(f/lo) > 1 ≥ ρ(f/hi)`.
fn bisect(mags: &[f64], q: &[f64], p: &[f64], mut lo: f64, mut hi: f64, rtol: f64) -> (f64, f64, usize) {
    let mut steps = 0;
    while hi > lo * (1.0 + rtol) {
        let mid = (lo * hi).sqrt();
        if !(mid > lo && mid < hi) {
            break;
        }
        if modular_scaled(mags, q, p, mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        steps += 1;
    }
    (lo, hi, steps)
}

/// Bisect from an explicit bracket `[lo, hi]`. Returns `None` if the bracket
/// does not enclose the Luxemburg norm.
pub fn luxemburg_from_bracket(f: &SampledFunction, p: &VariableExponent, lo: f64, hi: f64) -> Result<Option<LuxemburgSolution>> {
    p.check(f)?;
    let mags = f.abs_values();
    let q = f.grid().quad_weights();
    if !(modular_scaled(&mags, &q, p.values(), lo) > 1.0 && modular_scaled(&mags, &q, p.values(), hi) <= 1.0) {
        return Ok(None);
    }
    let (lower, norm, bisection_steps) = bisect(&mags, &q, p.values(), lo, hi, LUXEMBURG_RTOL);
    Ok(Some(LuxemburgSolution { norm, lower, expansion_steps: 0, bisection_steps }))
}

/// Luxemburg norm with solver statistics.
pub fn luxemburg_solve(f: &SampledFunction, p: &VariableExponent) -> Result<LuxemburgSolution> {
    p.check(f)?;
    let mags = f.abs_values();
    let q = f.grid().quad_weights();
    let l1: f64 = mags.iter().zip(&q).map(|(m, w)| m * w).sum();
    if l1 == 0.0 && mags.iter().all(|&m| m == 0.0) {
        return Ok(LuxemburgSolution { norm: 0.0, lower: 0.0, expansion_steps: 0, bisection_steps: 0 });
    }
    let rho = |lambda: f64| modular_scaled(&mags, &q, p.values(), lambda);

    let start = l1 / (1.0 + f.grid().measure());
    let (mut lo, mut hi) = (start, start);
    let mut expansion_steps = 0;
    if rho(start) > 1.0 {
        while rho(hi) > 1.0 {
            lo = hi;
            hi *= 2.0;
            expansion_steps += 1;
        }
    } else {
        while rho(lo) <= 1.0 {
            hi = lo;
            lo *= 0.5;
            expansion_steps += 1;
        }
    }
    let (lower, norm, bisection_steps) = bisect(&mags, &q, p.values(), lo, hi, LUXEMBURG_RTOL);
    Ok(LuxemburgSolution { norm, lower, expansion_steps, bisection_steps })
}

/// `‖f‖_{L^{p(·)}} = inf{λ > 0 : ρ(f/λ) ≤ 1}`.
pub fn luxemburg_norm(f: &SampledFunction, p: &VariableExponent) -> Result<f64> {
    Ok(luxemburg_solve(f, p)?.norm)
}

/// Outcome of a Hölder inequality check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderReport {
    pub pairing: f64,
    pub norm_f: f64,
    pub norm_g: f64,
    /// `|∫ f g| / (‖f‖_{p(·)} ‖g‖_{p'(·)})`, zero when either norm vanishes.
    pub ratio: f64,
    pub constant: f64,
    pub holds: bool,
}

/// Hölder constant for variable exponent spaces.
pub const HOLDER_CONSTANT: f64 = 2.0;

/// Check `|∫ f g dμ| ≤ 2 ‖f‖_{p(·)} ‖g‖_{p'(·)}`.
pub fn holder_check(f: &SampledFunction, g: &SampledFunction, p: &VariableExponent) -> Result<HolderReport> {
    p.check(f)?;
    f.check_grid(g)?;
    let pairing = grid::integrate(&f.mul(g)?).norm();
    let norm_f = luxemburg_norm(f, p)?;
    let norm_g = luxemburg_norm(g, &p.dual())?;
    let denom = norm_f * norm_g;
    let ratio = if denom == 0.0 { 0.0 } else { pairing / denom };
    Ok(HolderReport { pairing, norm_f, norm_g, ratio, constant: HOLDER_CONSTANT, holds: ratio <= HOLDER_CONSTANT })
}

/// Conditional expectation onto the boxes; a contraction of `L^{p(·)}` when
/// `p` is constant on each box.
pub fn map_projection_ve(f: &SampledFunction, p: &VariableExponent, partition: &Partition) -> Result<SampledFunction> {
    p.check(f)?;
    if partition.owner().len() != f.len() {
        return Err(Error::InvalidPartition("partition belongs to another grid".into()));
    }
    if !p.is_box_constant(partition) {
        return Err(Error::NotBoxConstant("exponent"));
    }
    Ok(box_average(f, partition))
}

/// Classical `‖f‖_{L^p}` for a constant exponent, computed directly.
pub fn lp_norm(f: &SampledFunction, p: f64) -> f64 {
    let s: f64 = f
        .values()
        .iter()
        .zip(f.grid().quad_weights())
        .map(|(v, q): (&Complex64, f64)| v.norm().powf(p) * q)
        .sum();
    s.powf(1.0 / p)
}
