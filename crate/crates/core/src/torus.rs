//! Toroidal pseudo-differential operators `T_σ` on `𝕋^n = ℝ^n / ℤ^n`.
//!
//! Characters are `e_ξ(x) = e^{2πi x·ξ}`, so `(I - Δ)` has symbol
//! `1 + 4π²|ξ|²` exactly. Frequency sums are truncated to the cube
//! `|ξ|_∞ ≤ N`. Torus grids are uniform periodic axes of period 1.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen::{self, ComplexMatrix};
use crate::error::{Error, Result};
use crate::fft::NdFft;
use crate::grid::{integrate, ProductGrid, SampledFunction};
use crate::nuclear::{NormDescriptor, NuclearRepresentation};
use crate::report::{SpectralReport, TargetProvenance, TraceTarget, Truncation};

/// Active frequencies `{ξ ∈ ℤ^n : |ξ|_∞ ≤ N}` in lexicographic order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyCutoff {
    pub dims: usize,
    pub cutoff: usize,
}

impl FrequencyCutoff {
    pub fn new(dims: usize, cutoff: usize) -> Result<Self> {
        if dims == 0 {
            return Err(Error::InvalidParameter("torus dimension must be at least 1".into()));
        }
        Ok(Self { dims, cutoff })
    }

    pub fn side(&self) -> usize {
        2 * self.cutoff + 1
    }

    pub fn len(&self) -> usize {
        self.side().pow(self.dims as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn frequency(&self, mut idx: usize) -> Vec<i64> {
        let side = self.side();
        let mut xi = vec![0i64; self.dims];
        for k in (0..self.dims).rev() {
            xi[k] = (idx % side) as i64 - self.cutoff as i64;
            idx /= side;
        }
        xi
    }

    pub fn index(&self, xi: &[i64]) -> Option<usize> {
        let n = self.cutoff as i64;
        let mut idx = 0usize;
        for &x in xi {
            if x.abs() > n {
                return None;
            }
            idx = idx * self.side() + (x + n) as usize;
        }
        Some(idx)
    }

    pub fn active_set(&self) -> Vec<Vec<i64>> {
        (0..self.len()).map(|i| self.frequency(i)).collect()
    }
}

/// Bessel potential symbol `(1 + 4π²|ξ|²)^{-τ/2}` of `(I - Δ)^{-τ/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesselSymbol {
    pub tau: f64,
    pub dims: usize,
}

impl BesselSymbol {
    pub fn eval(&self, xi: &[i64]) -> f64 {
        let r2: f64 = xi.iter().map(|&x| (x * x) as f64).sum();
        (1.0 + 4.0 * PI * PI * r2).powf(-self.tau / 2.0)
    }

    /// Whether `Σ |σ(ξ)|^r` converges: `rτ > n`.
    pub fn summable_power(&self, r: f64) -> bool {
        r * self.tau > self.dims as f64
    }

    /// Bound on `Σ_{|ξ|_∞ > N} |σ(ξ)|^r`, or `None` when the series diverges.
    ///
    /// The shell `|ξ|_∞ = m` has at most `2n(3m)^{n-1}` points, each with
    /// `|σ|^r ≤ (2πm)^{-rτ}`; the sum over `m > N` is dominated by an integral.
    pub fn tail_bound(&self, r: f64, cutoff: usize) -> Option<f64> {
        let n = self.dims as f64;
        let e = r * self.tau;
        if e <= n || cutoff == 0 {
            return None;
        }
        let c = 2.0 * n * 3f64.powf(n - 1.0) * (2.0 * PI).powf(-e);
        Some(c * (cutoff as f64).powf(n - e) / (e - n))
    }
}

pub fn bessel_symbol(tau: f64, dims: usize) -> Result<BesselSymbol> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidParameter(format!("Bessel order τ = {tau} must be positive")));
    }
    if dims == 0 {
        return Err(Error::InvalidParameter("torus dimension must be at least 1".into()));
    }
    Ok(BesselSymbol { tau, dims })
}

type SymbolFn = Arc<dyn Fn(&[i64]) -> Complex64 + Send + Sync>;

/// Fourier multiplier `σ(ξ)`.
#[derive(Clone)]
pub enum Multiplier {
    Bessel(BesselSymbol),
    /// Finitely supported: listed frequencies, zero elsewhere.
    Table(BTreeMap<Vec<i64>, Complex64>),
    Function { name: String, f: SymbolFn },
}

impl std::fmt::Debug for Multiplier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Multiplier::Bessel(b) => write!(f, "Bessel({b:?})"),
            Multiplier::Table(t) => write!(f, "Table({} entries)", t.len()),
            Multiplier::Function { name, .. } => write!(f, "Function({name})"),
        }
    }
}

impl Multiplier {
    pub fn function(name: impl Into<String>, f: impl Fn(&[i64]) -> Complex64 + Send + Sync + 'static) -> Self {
        Multiplier::Function { name: name.into(), f: Arc::new(f) }
    }

    pub fn eval(&self, xi: &[i64]) -> Complex64 {
        match self {
            Multiplier::Bessel(b) => Complex64::new(b.eval(xi), 0.0),
            Multiplier::Table(t) => t.get(xi).copied().unwrap_or_default(),
            Multiplier::Function { f, .. } => f(xi),
        }
    }

    /// `Σ_{|ξ|_∞ ≤ N} σ(ξ)`.
    pub fn partial_sum(&self, cutoff: &FrequencyCutoff) -> Complex64 {
        (0..cutoff.len()).map(|i| self.eval(&cutoff.frequency(i))).sum()
    }

    /// Bound on `Σ_{|ξ|_∞ > N} |σ(ξ)|`, when one is known.
    pub fn tail_bound(&self, cutoff: &FrequencyCutoff) -> Option<f64> {
        match self {
            Multiplier::Bessel(b) => b.tail_bound(1.0, cutoff.cutoff),
            Multiplier::Table(t) => Some(
                t.iter()
                    .filter(|(xi, _)| cutoff.index(xi).is_none())
                    .map(|(_, v)| v.norm())
                    .sum(),
            ),
            Multiplier::Function { .. } => None,
        }
    }

    /// Reference value for `Σ_{ξ ∈ ℤ^n} σ(ξ)`.
    pub fn full_sum(&self, dims: usize, cutoff: usize) -> Option<TraceTarget> {
        match self {
            Multiplier::Bessel(b) => {
                if b.dims == 1 && b.tau == 2.0 {
                    let half = 0.5f64;
                    return Some(TraceTarget {
                        value: Complex64::new(0.5 * half.cosh() / half.sinh(), 0.0),
                        provenance: TargetProvenance::ClosedForm { formula: "coth(1/2)/2".into() },
                        tail_bound: 0.0,
                    });
                }
                if !b.summable_power(1.0) {
                    return None;
                }
                let reference = match dims {
                    1 => (64 * cutoff).max(4096),
                    2 => (8 * cutoff).clamp(64, 512),
                    _ => (2 * cutoff).clamp(16, 48),
                };
                let fc = FrequencyCutoff { dims, cutoff: reference };
                Some(TraceTarget {
                    value: self.partial_sum(&fc),
                    provenance: TargetProvenance::Truncated { cutoff: reference },
                    tail_bound: b.tail_bound(1.0, reference)?,
                })
            }
            Multiplier::Table(t) => Some(TraceTarget {
                value: t.values().sum(),
                provenance: TargetProvenance::Exact,
                tail_bound: 0.0,
            }),
            Multiplier::Function { .. } => None,
        }
    }
}

/// Symbol `σ(x, ξ)` of a toroidal operator.
#[derive(Clone, Debug)]
pub enum ToroidalSymbol {
    /// `α(x) σ(ξ)`, the operator `α T_σ`.
    Separable { alpha: SampledFunction, multiplier: Multiplier },
    /// Full table on grid nodes × active frequencies, storage `[node][ξ]`.
    Table { grid: Arc<ProductGrid>, cutoff: FrequencyCutoff, values: Vec<Complex64> },
}

impl ToroidalSymbol {
    pub fn from_fn(grid: Arc<ProductGrid>, cutoff: FrequencyCutoff, f: impl Fn(&[f64], &[i64]) -> Complex64) -> Result<Self> {
        check_torus(&grid, &cutoff, 2)?;
        let active = cutoff.active_set();
        let mut values = Vec::with_capacity(grid.node_count() * active.len());
        for i in 0..grid.node_count() {
            let x = grid.point(i);
            values.extend(active.iter().map(|xi| f(&x, xi)));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidParameter("symbol has non-finite values".into()));
        }
        Ok(ToroidalSymbol::Table { grid, cutoff, values })
    }
}

/// Require unit-period uniform axes with at least `factor·N + factor` nodes.
fn check_torus(grid: &ProductGrid, cutoff: &FrequencyCutoff, factor: usize) -> Result<()> {
    if grid.dims() != cutoff.dims {
        return Err(Error::DimensionMismatch { expected: cutoff.dims, got: grid.dims() });
    }
    for (k, axis) in grid.axes().iter().enumerate() {
        if !axis.is_periodic() || (axis.extent() - 1.0).abs() > 1e-12 || axis.uniform_spacing().is_none() {
            return Err(Error::InvalidGrid(format!("axis {k} is not a uniform grid of the unit circle")));
        }
        let need = factor * cutoff.cutoff + factor;
        if axis.len() < need {
            return Err(Error::Aliasing(format!(
                "axis {k} has {} nodes; cutoff N = {} needs at least {need}",
                axis.len(),
                cutoff.cutoff
            )));
        }
    }
    Ok(())
}

/// Fourier coefficients `(𝓕f)(ξ) = ∫ f(y) e^{-2πi y·ξ} dy` on the active set.
pub fn fourier_coefficients(f: &SampledFunction, cutoff: &FrequencyCutoff) -> Result<Vec<Complex64>> {
    check_torus(f.grid(), cutoff, 2)?;
    all_coefficients(f, cutoff, 1)
}

/// Coefficients on the cube `|ξ|_∞ ≤ reach·N`, without the aliasing check.
fn all_coefficients(f: &SampledFunction, cutoff: &FrequencyCutoff, reach: usize) -> Result<Vec<Complex64>> {
    let grid = f.grid();
    let shape = grid.shape();
    let mut buf = f.values().to_vec();
    NdFft::forward(&shape).process(&mut buf);
    let scale = 1.0 / grid.node_count() as f64;
    let wide = FrequencyCutoff { dims: cutoff.dims, cutoff: reach * cutoff.cutoff };
    let mut out = Vec::with_capacity(wide.len());
    for i in 0..wide.len() {
        let xi = wide.frequency(i);
        let flat = xi
            .iter()
            .zip(&shape)
            .fold(0usize, |acc, (&x, &n)| acc * n + x.rem_euclid(n as i64) as usize);
        out.push(buf[flat] * scale);
    }
    Ok(out)
}

/// Per-axis tables `e^{2πi x_j ξ}` for `|ξ| ≤ N`.
fn character_tables(grid: &ProductGrid, cutoff: usize) -> Vec<Vec<Complex64>> {
    let side = 2 * cutoff + 1;
    grid.axes()
        .iter()
        .map(|axis| {
            let mut t = Vec::with_capacity(axis.len() * side);
            for &x in axis.nodes() {
                for s in 0..side {
                    let xi = s as f64 - cutoff as f64;
                    t.push(Complex64::from_polar(1.0, 2.0 * PI * x * xi));
                }
            }
            t
        })
        .collect()
}

fn character_at(tables: &[Vec<Complex64>], side: usize, node_multi: &[usize], freq_idx: usize, dims: usize) -> Complex64 {
    let mut idx = freq_idx;
    let mut digits = vec![0usize; dims];
    for k in (0..dims).rev() {
        digits[k] = idx % side;
        idx /= side;
    }
    (0..dims).map(|k| tables[k][node_multi[k] * side + digits[k]]).product()
}

/// `T_σ f(x) = Σ_{|ξ|_∞ ≤ N} e^{2πi x·ξ} σ(x, ξ) (𝓕f)(ξ)`.
pub fn toroidal_apply(sym: &ToroidalSymbol, f: &SampledFunction, cutoff: &FrequencyCutoff) -> Result<SampledFunction> {
    let grid = f.grid().clone();
    let coeffs = fourier_coefficients(f, cutoff)?;
    let tables = character_tables(&grid, cutoff.cutoff);
    let side = cutoff.side();
    let dims = cutoff.dims;
    let mut out = Vec::with_capacity(grid.node_count());
    match sym {
        ToroidalSymbol::Separable { alpha, multiplier } => {
            f.check_grid(alpha)?;
            let weighted: Vec<Complex64> = (0..cutoff.len()).map(|i| multiplier.eval(&cutoff.frequency(i)) * coeffs[i]).collect();
            for node in 0..grid.node_count() {
                let multi = grid.multi_index(node);
                let s: Complex64 = (0..cutoff.len())
                    .map(|i| character_at(&tables, side, &multi, i, dims) * weighted[i])
                    .sum();
                out.push(alpha.values()[node] * s);
            }
        }
        ToroidalSymbol::Table { grid: sg, cutoff: sc, values } => {
            if **sg != *grid {
                return Err(Error::GridMismatch);
            }
            if sc != cutoff {
                return Err(Error::InvalidParameter("symbol table was built for a different cutoff".into()));
            }
            let len = cutoff.len();
            for node in 0..grid.node_count() {
                let multi = grid.multi_index(node);
                let row = &values[node * len..(node + 1) * len];
                let s: Complex64 = (0..len)
                    .map(|i| character_at(&tables, side, &multi, i, dims) * row[i] * coeffs[i])
                    .sum();
                out.push(s);
            }
        }
    }
    SampledFunction::new(grid, out)
}

/// Matrix of `α T_σ` in the character basis over the active set:
/// `M[η, ξ] = α̂(η - ξ) σ(ξ)`. `α` needs at least `4N + 4` nodes per axis.
pub fn assemble_matrix(alpha: &SampledFunction, multiplier: &Multiplier, cutoff: &FrequencyCutoff) -> Result<ComplexMatrix> {
    check_torus(alpha.grid(), cutoff, 4)?;
    let alpha_hat = all_coefficients(alpha, cutoff, 2)?;
    let wide = FrequencyCutoff { dims: cutoff.dims, cutoff: 2 * cutoff.cutoff };
    let active = cutoff.active_set();
    let sigma: Vec<Complex64> = active.iter().map(|xi| multiplier.eval(xi)).collect();
    let n = active.len();
    let mut diff = vec![0i64; cutoff.dims];
    Ok(DMatrix::from_fn(n, n, |r, c| {
        for k in 0..cutoff.dims {
            diff[k] = active[r][k] - active[c][k];
        }
        alpha_hat[wide.index(&diff).expect("difference lies in the doubled cube")] * sigma[c]
    }))
}

/// Canonical expansion `g_ξ = σ(ξ) α e_ξ`, `h_ξ = e_{-ξ}` over the active set.
pub fn canonical_representation(alpha: &SampledFunction, multiplier: &Multiplier, cutoff: &FrequencyCutoff, order: f64) -> Result<NuclearRepresentation> {
    check_torus(alpha.grid(), cutoff, 2)?;
    let grid = alpha.grid().clone();
    let tables = character_tables(&grid, cutoff.cutoff);
    let side = cutoff.side();
    let mut rep = NuclearRepresentation::square(grid.clone(), order)?;
    for i in 0..cutoff.len() {
        let xi = cutoff.frequency(i);
        let neg: Vec<i64> = xi.iter().map(|x| -x).collect();
        let j = cutoff.index(&neg).unwrap();
        let s = multiplier.eval(&xi);
        let mut g = Vec::with_capacity(grid.node_count());
        let mut h = Vec::with_capacity(grid.node_count());
        for node in 0..grid.node_count() {
            let multi = grid.multi_index(node);
            g.push(s * alpha.values()[node] * character_at(&tables, side, &multi, i, cutoff.dims));
            h.push(character_at(&tables, side, &multi, j, cutoff.dims));
        }
        rep.push(SampledFunction::new(grid.clone(), g)?, SampledFunction::new(grid.clone(), h)?)?;
    }
    Ok(rep)
}

/// Quasinorm of the canonical expansion of `α T_σ`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TorusLedger {
    pub order: f64,
    pub cutoff: usize,
    pub frequencies: Vec<Vec<i64>>,
    pub terms: Vec<f64>,
    pub total: f64,
    /// `rτ > n` for Bessel symbols; `None` for other multipliers.
    pub hypothesis_satisfied: Option<bool>,
    /// Bound on the omitted terms when `α` is constant and the norms are unit.
    pub tail_bound: Option<f64>,
}

/// `Σ_ξ ‖σ(ξ) α e_ξ‖^r_{target} ‖e_{-ξ}‖^r_{source'}` over the active set.
pub fn nuclearity_ledger(
    alpha: &SampledFunction,
    multiplier: &Multiplier,
    order: f64,
    source: NormDescriptor,
    target: NormDescriptor,
    cutoff: &FrequencyCutoff,
) -> Result<TorusLedger> {
    let rep = canonical_representation(alpha, multiplier, cutoff, order)?
        .with_source(source)
        .with_target(target);
    let ledger = rep.quasinorm()?;
    let (hypothesis_satisfied, tail_bound) = match multiplier {
        Multiplier::Bessel(b) => (Some(b.summable_power(order)), b.tail_bound(order, cutoff.cutoff)),
        _ => (None, None),
    };
    Ok(TorusLedger {
        order,
        cutoff: cutoff.cutoff,
        frequencies: cutoff.active_set(),
        terms: ledger.terms.iter().map(|t| t.term).collect(),
        total: ledger.total,
        hypothesis_satisfied,
        tail_bound,
    })
}

/// `Σ_{|ξ|_∞ ≤ N} |σ(ξ)|^r` evaluated directly.
pub fn symbol_power_sum(multiplier: &Multiplier, order: f64, cutoff: &FrequencyCutoff) -> f64 {
    (0..cutoff.len()).map(|i| multiplier.eval(&cutoff.frequency(i)).norm().powf(order)).sum()
}

/// Matrix trace, eigenvalue sum, pairing trace and reference value for `α T_σ`.
pub fn verify_corollary_trace(alpha: &SampledFunction, multiplier: &Multiplier, cutoff: &FrequencyCutoff, cap: usize) -> Result<SpectralReport> {
    if cutoff.len() > cap {
        return Err(Error::CapExceeded { dim: cutoff.len(), cap });
    }
    let m = assemble_matrix(alpha, multiplier, cutoff)?;
    let eigenvalues = eigen::eigenvalues(&m)?;
    let eigenvalue_sum: Complex64 = eigenvalues.iter().sum();
    let matrix_trace = eigen::trace(&m);
    let alpha_mean = integrate(alpha);
    let symbol_sum = multiplier.partial_sum(cutoff);
    let predicted = alpha_mean * symbol_sum;
    let pairing = canonical_representation(alpha, multiplier, cutoff, 1.0)?.trace_by_pairing()?;

    let tail = multiplier.tail_bound(cutoff).map(|t| t * alpha_mean.norm());
    let target = multiplier.full_sum(cutoff.dims, cutoff.cutoff).map(|t| TraceTarget {
        value: t.value * alpha_mean,
        tail_bound: t.tail_bound * alpha_mean.norm(),
        provenance: t.provenance,
    });

    let mut residuals = BTreeMap::new();
    residuals.insert("eigenvalue_sum_vs_matrix_trace".into(), (eigenvalue_sum - matrix_trace).norm());
    residuals.insert("matrix_trace_vs_mean_times_symbol_sum".into(), (matrix_trace - predicted).norm());
    residuals.insert("pairing_vs_matrix_trace".into(), (pairing - matrix_trace).norm());
    if let Some(t) = &target {
        residuals.insert("eigenvalue_sum_vs_target".into(), (eigenvalue_sum - t.value).norm());
    }

    Ok(SpectralReport {
        label: format!("alpha T_sigma on T^{}, {:?}", cutoff.dims, multiplier),
        eigenvalues,
        eigenvalue_sum,
        matrix_trace: Some(matrix_trace),
        pairing_trace: Some(pairing),
        kernel_trace: None,
        target,
        truncation: Truncation { parameter: "N (|xi|_inf <= N)".into(), value: cutoff.cutoff, tail_bound: tail },
        non_normality: Some(eigen::non_normality(&m)),
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn torus(n: usize) -> Arc<ProductGrid> {
        Arc::new(ProductGrid::unit_torus(1, n).unwrap())
    }

    fn one(g: &Arc<ProductGrid>) -> SampledFunction {
        SampledFunction::constant(g.clone(), Complex64::new(1.0, 0.0))
    }

    fn trig(g: &Arc<ProductGrid>, k: f64) -> SampledFunction {
        SampledFunction::from_fn(g.clone(), |x| Complex64::from_polar(1.0, 2.0 * PI * k * x[0])).unwrap()
    }

    #[test]
    fn cutoff_enumeration() {
        let c = FrequencyCutoff::new(2, 2).unwrap();
        assert_eq!(c.len(), 25);
        assert_eq!(c.frequency(0), vec![-2, -2]);
        assert_eq!(c.frequency(24), vec![2, 2]);
        for i in 0..25 {
            assert_eq!(c.index(&c.frequency(i)), Some(i));
        }
        assert_eq!(c.index(&[3, 0]), None);
    }

    #[test]
    fn bessel_values() {
        let b = bessel_symbol(2.0, 1).unwrap();
        assert_eq!(b.eval(&[0]), 1.0);
        assert!((b.eval(&[1]) - 1.0 / (1.0 + 4.0 * PI * PI)).abs() < 1e-16);
        assert!((b.eval(&[1]) - 0.0247045).abs() < 1e-6);
        assert_eq!(bessel_symbol(7.5, 3).unwrap().eval(&[0, 0, 0]), 1.0);
        assert!(bessel_symbol(0.0, 1).is_err());
        assert!(bessel_symbol(-1.0, 1).is_err());
    }

    #[test]
    fn bessel_hypothesis_flag() {
        let b2 = bessel_symbol(2.0, 1).unwrap();
        let b1 = bessel_symbol(1.0, 1).unwrap();
        assert!(b2.summable_power(2.0 / 3.0));
        assert!(!b1.summable_power(2.0 / 3.0));
        assert!(b1.tail_bound(2.0 / 3.0, 64).is_none());
    }

    #[test]
    fn identity_symbol_reproduces_trig_polynomials() {
        let g = torus(32);
        let c = FrequencyCutoff::new(1, 5).unwrap();
        let f = trig(&g, 3.0).add(&trig(&g, -5.0).scale(Complex64::new(0.5, 2.0))).unwrap();
        let sym = ToroidalSymbol::Separable { alpha: one(&g), multiplier: Multiplier::function("one", |_| Complex64::new(1.0, 0.0)) };
        let out = toroidal_apply(&sym, &f, &c).unwrap();
        assert!(out.sub(&f).unwrap().sup_norm() < 1e-13);
    }

    #[test]
    fn mean_symbol_returns_integral() {
        let g = torus(16);
        let c = FrequencyCutoff::new(1, 4).unwrap();
        let f = SampledFunction::from_real_fn(g.clone(), |x| 0.7 + (2.0 * PI * x[0]).sin() + x[0] * x[0]).unwrap();
        let mut t = BTreeMap::new();
        t.insert(vec![0], Complex64::new(1.0, 0.0));
        let sym = ToroidalSymbol::Separable { alpha: one(&g), multiplier: Multiplier::Table(t) };
        let out = toroidal_apply(&sym, &f, &c).unwrap();
        let m = integrate(&f);
        assert!(out.values().iter().all(|v| (v - m).norm() < 1e-14));
    }

    #[test]
    fn single_mode_full_symbol() {
        let g = torus(16);
        let c = FrequencyCutoff::new(1, 3).unwrap();
        let sym = ToroidalSymbol::from_fn(g.clone(), c, |x, xi| {
            if xi[0] == 1 {
                Complex64::from_polar(1.0, 2.0 * PI * x[0])
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .unwrap();
        let out = toroidal_apply(&sym, &trig(&g, 1.0), &c).unwrap();
        assert!(out.sub(&trig(&g, 2.0)).unwrap().sup_norm() < 1e-13);
    }

    #[test]
    fn aliasing_is_rejected() {
        let g = torus(10);
        let c = FrequencyCutoff::new(1, 5).unwrap();
        assert!(matches!(fourier_coefficients(&one(&g), &c), Err(Error::Aliasing(_))));
        let c = FrequencyCutoff::new(1, 2).unwrap();
        assert!(matches!(
            assemble_matrix(&one(&g), &Multiplier::Bessel(bessel_symbol(2.0, 1).unwrap()), &c),
            Err(Error::Aliasing(_))
        ));
    }

    #[test]
    fn constant_alpha_gives_diagonal_matrix() {
        let g = torus(64);
        let c = FrequencyCutoff::new(1, 6).unwrap();
        let b = Multiplier::Bessel(bessel_symbol(2.0, 1).unwrap());
        let m = assemble_matrix(&one(&g), &b, &c).unwrap();
        for r in 0..c.len() {
            for col in 0..c.len() {
                let expected = if r == col { b.eval(&c.frequency(r)) } else { Complex64::new(0.0, 0.0) };
                assert!((m[(r, col)] - expected).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn cosine_alpha_gives_tridiagonal_matrix() {
        let g = torus(64);
        let c = FrequencyCutoff::new(1, 6).unwrap();
        let alpha = SampledFunction::from_real_fn(g, |x| 1.0 + (2.0 * PI * x[0]).cos()).unwrap();
        let m = assemble_matrix(&alpha, &Multiplier::function("one", |_| Complex64::new(1.0, 0.0)), &c).unwrap();
        for r in 0..c.len() {
            for col in 0..c.len() {
                let expected = match (r as i64 - col as i64).abs() {
                    0 => 1.0,
                    1 => 0.5,
                    _ => 0.0,
                };
                assert!((m[(r, col)].re - expected).abs() < 1e-15 && m[(r, col)].im.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn single_frequency_symbol_has_one_eigenvalue() {
        let g = torus(64);
        let c = FrequencyCutoff::new(1, 4).unwrap();
        let alpha = SampledFunction::from_real_fn(g, |x| 2.0 + (2.0 * PI * x[0]).sin()).unwrap();
        let mut t = BTreeMap::new();
        t.insert(vec![0], Complex64::new(0.0, 3.0));
        let r = verify_corollary_trace(&alpha, &Multiplier::Table(t), &c, 4096).unwrap();
        assert!((r.eigenvalues[0] - Complex64::new(0.0, 6.0)).norm() < 1e-12);
        assert!(r.eigenvalues[1..].iter().all(|z| z.norm() < 1e-12));
        assert_eq!(r.target.unwrap().provenance, TargetProvenance::Exact);
    }

    #[test]
    fn cap_is_enforced() {
        let g = torus(64);
        let c = FrequencyCutoff::new(1, 10).unwrap();
        let b = Multiplier::Bessel(bessel_symbol(2.0, 1).unwrap());
        assert!(matches!(verify_corollary_trace(&one(&g), &b, &c, 20), Err(Error::CapExceeded { dim: 21, cap: 20 })));
    }

    #[test]
    fn unit_alpha_ledger_is_symbol_power_sum() {
        let g = torus(64);
        let c = FrequencyCutoff::new(1, 12).unwrap();
        let b = Multiplier::Bessel(bessel_symbol(2.0, 1).unwrap());
        let l2 = NormDescriptor::lebesgue(g.clone(), crate::mixed_norm::ExponentTuple::new(vec![2.0]).unwrap());
        let ledger = nuclearity_ledger(&one(&g), &b, 2.0 / 3.0, l2.clone(), l2, &c).unwrap();
        assert!((ledger.total - symbol_power_sum(&b, 2.0 / 3.0, &c)).abs() < 1e-12);
        assert_eq!(ledger.hypothesis_satisfied, Some(true));
    }
}
