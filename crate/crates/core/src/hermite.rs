//! Harmonic oscillator `A = -Δ + |x|²` on `ℝ^d`, its Hermite eigenfunctions,
//! and spectral functions `F(A)` built from the eigen-expansion.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen;
use crate::error::{Error, Result};
use crate::fft::NdFft;
use crate::grid::{Axis, ProductGrid, SampledFunction, WeightFunction};
use crate::mixed_norm::conjugate;
use crate::nuclear::NuclearRepresentation;
use crate::report::{SpectralReport, TargetProvenance, TraceTarget, Truncation};
use crate::timefreq::{self, TfGrid, Window};

/// Largest tolerated `|φ_k|` at the box edge relative to its peak.
pub const HERMITE_EDGE_DECAY: f64 = 1e-10;
pub const GRAM_TOLERANCE: f64 = 1e-8;
pub const EIGEN_RESIDUAL_TOLERANCE: f64 = 1e-6;

/// Box `[-12, 12)` with 512 nodes, the default one-dimensional grid.
pub fn default_grid() -> Arc<ProductGrid> {
    Arc::new(ProductGrid::single(Axis::centered(12.0, 512).expect("valid axis")))
}

/// Normalized Hermite functions `ψ_0, …, ψ_J` at the points `xs`, one row per degree.
pub fn hermite_functions(max_degree: usize, xs: &[f64]) -> Vec<Vec<f64>> {
    let mut rows = Vec::with_capacity(max_degree + 1);
    let psi0: Vec<f64> = xs.iter().map(|x| PI.powf(-0.25) * (-x * x / 2.0).exp()).collect();
    rows.push(psi0);
    if max_degree >= 1 {
        let psi1 = xs.iter().zip(&rows[0]).map(|(x, p)| 2f64.sqrt() * x * p).collect();
        rows.push(psi1);
    }
    for n in 1..max_degree {
        let a = (2.0 / (n as f64 + 1.0)).sqrt();
        let b = (n as f64 / (n as f64 + 1.0)).sqrt();
        let next = xs
            .iter()
            .enumerate()
            .map(|(i, x)| a * x * rows[n][i] - b * rows[n - 1][i])
            .collect();
        rows.push(next);
    }
    rows
}

/// Multi-indices with `|k| ≤ J`, ordered by total degree, lexicographic within a degree.
pub fn multi_indices(dims: usize, max_degree: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for total in 0..=max_degree {
        let mut current = vec![0; dims];
        compositions(total, 0, &mut current, &mut out);
    }
    out
}

fn compositions(remaining: usize, pos: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(current.clone());
        return;
    }
    for k in (0..=remaining).rev() {
        current[pos] = k;
        compositions(remaining - k, pos + 1, current, out);
    }
}

/// Numerical evidence that the sampled basis is orthonormal and diagonalizes `A`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BasisCertificate {
    /// `max |G - I|` over the Gram matrix of the sampled basis.
    pub gram_deviation: f64,
    /// `max_k ‖Aφ_k - λ_k φ_k‖₂ / ‖φ_k‖₂` with spectral differentiation.
    pub max_eigen_residual: f64,
    /// Largest edge magnitude of any one-dimensional factor, relative to its peak.
    pub edge_ratio: f64,
}

/// Hermite functions `φ_k` for `|k| ≤ J` sampled on a box grid, with `λ_k = 2|k| + d`.
#[derive(Clone, Debug)]
pub struct HermiteBasis {
    grid: Arc<ProductGrid>,
    max_degree: usize,
    indices: Vec<Vec<usize>>,
    functions: Vec<SampledFunction>,
    eigenvalues: Vec<f64>,
    certificate: BasisCertificate,
}

impl HermiteBasis {
    pub fn grid(&self) -> &Arc<ProductGrid> {
        &self.grid
    }

    pub fn dims(&self) -> usize {
        self.grid.dims()
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn indices(&self) -> &[Vec<usize>] {
        &self.indices
    }

    pub fn functions(&self) -> &[SampledFunction] {
        &self.functions
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn certificate(&self) -> &BasisCertificate {
        &self.certificate
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn position(&self, k: &[usize]) -> Option<usize> {
        self.indices.iter().position(|i| i == k)
    }
}

/// Sample and certify the basis. Each axis must be equispaced, non-periodic,
/// and wide enough that every factor decays below [`HERMITE_EDGE_DECAY`].
pub fn build_basis(dims: usize, max_degree: usize, grid: Arc<ProductGrid>) -> Result<HermiteBasis> {
    if grid.dims() != dims {
        return Err(Error::DimensionMismatch { expected: dims, got: grid.dims() });
    }
    let mut tables = Vec::with_capacity(dims);
    let mut edge: f64 = 0.0;
    for (a, axis) in grid.axes().iter().enumerate() {
        if axis.is_periodic() || axis.uniform_spacing().is_none() || axis.len() < 4 {
            return Err(Error::InvalidGrid(format!("axis {a} must be an equispaced box axis")));
        }
        let t = hermite_functions(max_degree, axis.nodes());
        for row in &t {
            let peak = row.iter().fold(0f64, |m, v| m.max(v.abs()));
            let ends = row[0].abs().max(row[row.len() - 1].abs());
            edge = edge.max(ends / peak);
        }
        tables.push(t);
    }
    if edge >= HERMITE_EDGE_DECAY {
        return Err(Error::InsufficientDecay(format!(
            "Hermite functions up to degree {max_degree} reach {edge:.3e} of their peak at the box edge; enlarge the box"
        )));
    }

    let indices = multi_indices(dims, max_degree);
    let shape = grid.shape();
    let mut functions = Vec::with_capacity(indices.len());
    let mut multi = vec![0usize; dims];
    for k in &indices {
        let mut values = Vec::with_capacity(grid.node_count());
        for flat in 0..grid.node_count() {
            let mut rem = flat;
            for a in (0..dims).rev() {
                multi[a] = rem % shape[a];
                rem /= shape[a];
            }
            let v: f64 = (0..dims).map(|a| tables[a][k[a]][multi[a]]).product();
            values.push(Complex64::new(v, 0.0));
        }
        functions.push(SampledFunction::new(grid.clone(), values)?);
    }
    let eigenvalues = indices.iter().map(|k| (2 * k.iter().sum::<usize>() + dims) as f64).collect::<Vec<_>>();

    // Gram matrix of a tensor basis is the product of one-dimensional Grams.
    let grams: Vec<DMatrix<f64>> = grid
        .axes()
        .iter()
        .zip(&tables)
        .map(|(axis, t)| {
            DMatrix::from_fn(max_degree + 1, max_degree + 1, |i, j| {
                t[i].iter().zip(&t[j]).zip(axis.quad_weights()).map(|((a, b), w)| a * b * w).sum()
            })
        })
        .collect();
    let mut gram_deviation: f64 = 0.0;
    for (i, ki) in indices.iter().enumerate() {
        for (j, kj) in indices.iter().enumerate() {
            let g: f64 = (0..dims).map(|a| grams[a][(ki[a], kj[a])]).product();
            let target = if i == j { 1.0 } else { 0.0 };
            gram_deviation = gram_deviation.max((g - target).abs());
        }
    }

    let laplacian = SpectralLaplacian::new(&grid);
    let r2: Vec<f64> = (0..grid.node_count()).map(|i| grid.point(i).iter().map(|x| x * x).sum()).collect();
    let q = grid.quad_weights();
    let mut max_eigen_residual: f64 = 0.0;
    for (f, lambda) in functions.iter().zip(&eigenvalues) {
        let lap = laplacian.apply(f.values());
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..grid.node_count() {
            let phi = f.values()[i];
            let res = -lap[i] + phi * r2[i] - phi * lambda;
            num += res.norm_sqr() * q[i];
            den += phi.norm_sqr() * q[i];
        }
        max_eigen_residual = max_eigen_residual.max((num / den).sqrt());
    }

    let certificate = BasisCertificate { gram_deviation, max_eigen_residual, edge_ratio: edge };
    if gram_deviation >= GRAM_TOLERANCE || max_eigen_residual >= EIGEN_RESIDUAL_TOLERANCE {
        return Err(Error::InvalidGrid(format!(
            "basis certification failed: Gram deviation {gram_deviation:.3e}, eigen-residual {max_eigen_residual:.3e}; refine the grid"
        )));
    }
    Ok(HermiteBasis { grid, max_degree, indices, functions, eigenvalues, certificate })
}

/// Fourier Laplacian on the box, treating it as periodic.
struct SpectralLaplacian {
    shape: Vec<usize>,
    symbol: Vec<f64>,
}

impl SpectralLaplacian {
    fn new(grid: &ProductGrid) -> Self {
        let shape = grid.shape();
        let per_axis: Vec<Vec<f64>> = grid
            .axes()
            .iter()
            .map(|axis| {
                let n = axis.len();
                let h = axis.uniform_spacing().unwrap();
                (0..n)
                    .map(|k| {
                        let m = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
                        let w = 2.0 * PI * m / (n as f64 * h);
                        -w * w
                    })
                    .collect()
            })
            .collect();
        let total: usize = shape.iter().product();
        let mut symbol = Vec::with_capacity(total);
        for flat in 0..total {
            let mut rem = flat;
            let mut s = 0.0;
            for a in (0..shape.len()).rev() {
                s += per_axis[a][rem % shape[a]];
                rem /= shape[a];
            }
            symbol.push(s);
        }
        Self { shape, symbol }
    }

    fn apply(&self, values: &[Complex64]) -> Vec<Complex64> {
        let mut buf = values.to_vec();
        NdFft::forward(&self.shape).process(&mut buf);
        let scale = 1.0 / buf.len() as f64;
        for (v, s) in buf.iter_mut().zip(&self.symbol) {
            *v *= s * scale;
        }
        NdFft::inverse(&self.shape).process(&mut buf);
        buf
    }
}

/// Known bound on `|F(λ)|`, used for tail bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Decay {
    /// `|F(λ)| ≤ c e^{-aλ}`.
    Exponential { rate: f64, constant: f64 },
    /// `|F(λ)| ≤ c λ^{-β}`.
    Power { exponent: f64, constant: f64 },
    /// `F(λ) = 0` for `λ > lambda_max`.
    Compact { lambda_max: f64 },
    Unknown,
}

type SpectralFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// `F: ℝ → ℂ` applied to the spectrum, with a decay descriptor.
#[derive(Clone)]
pub struct SpectralFunction {
    label: String,
    f: SpectralFn,
    decay: Decay,
    closed_form: Option<ClosedForm>,
}

#[derive(Clone, Copy, Debug)]
enum ClosedForm {
    Exponential(f64),
    InverseSquare,
    Indicator(f64),
}

impl std::fmt::Debug for SpectralFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SpectralFunction({}, {:?})", self.label, self.decay)
    }
}

impl SpectralFunction {
    pub fn custom(label: impl Into<String>, f: impl Fn(f64) -> Complex64 + Send + Sync + 'static, decay: Decay) -> Self {
        Self { label: label.into(), f: Arc::new(f), decay, closed_form: None }
    }

    /// `e^{-aλ}`.
    pub fn exponential(a: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::InvalidParameter(format!("decay rate {a} must be positive")));
        }
        let mut s = Self::custom(format!("exp(-{a} lambda)"), move |l| Complex64::new((-a * l).exp(), 0.0), Decay::Exponential {
            rate: a,
            constant: 1.0,
        });
        s.closed_form = Some(ClosedForm::Exponential(a));
        Ok(s)
    }

    /// `λ^{-β}`.
    pub fn power(beta: f64) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::InvalidParameter(format!("power {beta} must be positive")));
        }
        let mut s = Self::custom(format!("lambda^-{beta}"), move |l| Complex64::new(l.powf(-beta), 0.0), Decay::Power {
            exponent: beta,
            constant: 1.0,
        });
        if beta == 2.0 {
            s.closed_form = Some(ClosedForm::InverseSquare);
        }
        Ok(s)
    }

    /// `𝟙{λ = λ₀}`.
    pub fn indicator(lambda0: f64) -> Self {
        let mut s = Self::custom(
            format!("1{{lambda = {lambda0}}}"),
            move |l| Complex64::new(if (l - lambda0).abs() < 1e-9 { 1.0 } else { 0.0 }, 0.0),
            Decay::Compact { lambda_max: lambda0 },
        );
        s.closed_form = Some(ClosedForm::Indicator(lambda0));
        s
    }

    pub fn zero() -> Self {
        Self::custom("0", |_| Complex64::new(0.0, 0.0), Decay::Compact { lambda_max: 0.0 })
    }

    pub fn constant(c: Complex64) -> Self {
        Self::custom(format!("{c}"), move |_| c, Decay::Unknown)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn decay(&self) -> &Decay {
        &self.decay
    }

    pub fn eval(&self, lambda: f64) -> Complex64 {
        (self.f)(lambda)
    }

    /// Bound on `Σ_{|k| > J} |F(λ_k)|` in dimension `d`, or `None` if not summable.
    pub fn tail_bound(&self, dims: usize, max_degree: usize) -> Option<f64> {
        let d = dims as f64;
        let j = max_degree as f64;
        match self.decay {
            Decay::Exponential { rate, constant } => {
                if dims == 1 {
                    return Some(constant * (-rate * (2.0 * j + 3.0)).exp() / (1.0 - (-2.0 * rate).exp()));
                }
                // shell |k| = m has C(m+d-1, d-1) members; term ratio decreases in m
                let mut m = max_degree + 1;
                let mut term = constant * binomial(m + dims - 1, dims - 1) * (-rate * (2.0 * m as f64 + d)).exp();
                let mut sum = 0.0;
                loop {
                    sum += term;
                    let ratio = (m as f64 + d) / (m as f64 + 1.0) * (-2.0 * rate).exp();
                    if ratio < 1.0 && (term <= 1e-17 * sum || term == 0.0) {
                        return Some(sum + term * ratio / (1.0 - ratio));
                    }
                    term *= ratio;
                    m += 1;
                    if m > max_degree + 1_000_000 {
                        return Some(sum + term / (1.0 - ratio.min(0.999_999)));
                    }
                }
            }
            Decay::Power { exponent, constant } => {
                if exponent <= d {
                    return None;
                }
                // C(m+d-1, d-1) ≤ (2m+d)^{d-1}/(d-1)!, then an integral bound
                let fact: f64 = (1..dims).map(|i| i as f64).product();
                Some(constant * (2.0 * j + d).powf(d - exponent) / (fact * 2.0 * (exponent - d)))
            }
            Decay::Compact { lambda_max } => {
                if lambda_max < 2.0 * (j + 1.0) + d {
                    Some(0.0)
                } else {
                    None
                }
            }
            Decay::Unknown => None,
        }
    }

    /// Value of `Σ_k F(λ_k)` over all of `ℕ^d`, when known in closed form.
    fn closed_form_trace(&self, dims: usize) -> Option<(f64, String)> {
        match self.closed_form? {
            ClosedForm::Exponential(a) => {
                let one = 1.0 / (2.0 * a.sinh());
                Some((one.powi(dims as i32), format!("(1/(2 sinh {a}))^{dims}")))
            }
            ClosedForm::InverseSquare if dims == 1 => Some((PI * PI / 8.0, "pi^2/8".into())),
            ClosedForm::Indicator(l0) => {
                let m = (l0 - dims as f64) / 2.0;
                if m < 0.0 || m.fract() != 0.0 {
                    return Some((0.0, "empty level".into()));
                }
                let mult = binomial(m as usize + dims - 1, dims - 1);
                Some((mult, format!("multiplicity of lambda = {l0}")))
            }
            _ => None,
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `Σ_{|k| ≤ J} F(λ_k)` computed from level multiplicities, no basis needed.
pub fn spectral_partial_sum(func: &SpectralFunction, dims: usize, max_degree: usize) -> Complex64 {
    (0..=max_degree)
        .map(|m| func.eval((2 * m + dims) as f64) * binomial(m + dims - 1, dims - 1))
        .sum()
}

/// `g_k = F(λ_k) φ_k`, `h_k = φ_k` over the basis.
pub fn functional_calculus(func: &SpectralFunction, basis: &HermiteBasis) -> Result<NuclearRepresentation> {
    let mut rep = NuclearRepresentation::square(basis.grid.clone(), 1.0)?;
    for (phi, &lambda) in basis.functions.iter().zip(&basis.eigenvalues) {
        rep.push(phi.scale(func.eval(lambda)), phi.clone())?;
    }
    Ok(rep)
}

/// `K_J(x, y) = Σ_{|k| ≤ J} F(λ_k) φ_k(x) φ_k(y)` on the product grid.
pub fn functional_calculus_kernel(func: &SpectralFunction, basis: &HermiteBasis) -> Result<SampledFunction> {
    Ok(functional_calculus(func, basis)?.kernel())
}

/// One term of the nuclearity series.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CriterionTerm {
    pub index: Vec<usize>,
    pub lambda: f64,
    pub f_abs: f64,
    /// `‖φ_k‖_{M^{p,q}_{v_s}}`.
    pub modulation_norm: f64,
    /// `‖φ_k‖_{M^{p',q'}_{v_{-s}}}`.
    pub dual_modulation_norm: f64,
    pub term: f64,
    /// `(2π)^{d/2} ‖φ_k‖₂ ‖g‖₂`, the `p = q = 2`, `s = 0` value.
    pub moyal_value: f64,
    /// `|‖V_g φ_k‖_{L²} / moyal_value - 1|`.
    pub moyal_deviation: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NuclearityCriterion {
    pub order: f64,
    pub p: f64,
    pub q: f64,
    pub s: f64,
    pub window: String,
    pub weight: String,
    pub terms: Vec<CriterionTerm>,
    /// Partial sums after each full degree `|k| = 0, 1, …, J`.
    pub partial_sums: Vec<f64>,
    /// Differences of consecutive entries of `partial_sums`.
    pub increments: Vec<f64>,
    pub total: f64,
}

/// `Σ_{|k| ≤ J} |F(λ_k)|^r ‖φ_k‖^r_{M^{p,q}_{v_s}} ‖φ_k‖^r_{M^{p',q'}_{v_{-s}}}`
/// with the unit Gaussian window on the basis grid.
pub fn nuclearity_criterion(func: &SpectralFunction, basis: &HermiteBasis, order: f64, p: f64, q: f64, s: f64) -> Result<NuclearityCriterion> {
    if !(order > 0.0 && order <= 1.0) {
        return Err(Error::InvalidParameter(format!("order r = {order} must lie in (0, 1]")));
    }
    if !(p >= 1.0 && p.is_finite() && q >= 1.0 && q.is_finite()) {
        return Err(Error::InvalidExponent { value: if p.is_finite() { q } else { p }, reason: "modulation exponents must lie in [1, ∞)" });
    }
    if !s.is_finite() {
        return Err(Error::InvalidParameter(format!("weight exponent s = {s} must be finite")));
    }
    let tf = TfGrid::new(basis.grid.clone())?;
    let g = Window::unit_gaussian(basis.grid.clone())?;
    let w = timefreq::polynomial_weight(&tf, s)?;
    let w_dual = timefreq::polynomial_weight(&tf, -s)?;
    let unit = WeightFunction::unit(tf.plane().clone());
    let (pd, qd) = (conjugate(p), conjugate(q));
    let d = basis.dims();
    let g_l2 = crate::variable_exponent::lp_norm(g.samples(), 2.0);

    let mut terms = Vec::with_capacity(basis.len());
    for ((k, phi), &lambda) in basis.indices.iter().zip(&basis.functions).zip(&basis.eigenvalues) {
        let v = timefreq::stft(phi, &g, &tf)?;
        let m = timefreq::plane_norm(&v, d, p, q, &w)?;
        let md = timefreq::plane_norm(&v, d, pd, qd, &w_dual)?;
        let l2 = timefreq::plane_norm(&v, d, 2.0, 2.0, &unit)?;
        let moyal_value = (2.0 * PI).powf(d as f64 / 2.0) * crate::variable_exponent::lp_norm(phi, 2.0) * g_l2;
        let f_abs = func.eval(lambda).norm();
        terms.push(CriterionTerm {
            index: k.clone(),
            lambda,
            f_abs,
            modulation_norm: m,
            dual_modulation_norm: md,
            term: (f_abs * m * md).powf(order),
            moyal_value,
            moyal_deviation: (l2 / moyal_value - 1.0).abs(),
        });
    }
    let mut partial_sums = Vec::with_capacity(basis.max_degree + 1);
    let mut acc = 0.0;
    for degree in 0..=basis.max_degree {
        acc += terms
            .iter()
            .filter(|t| t.index.iter().sum::<usize>() == degree)
            .map(|t| t.term)
            .sum::<f64>();
        partial_sums.push(acc);
    }
    let increments = partial_sums.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(NuclearityCriterion {
        order,
        p,
        q,
        s,
        window: "gaussian exp(-|t|^2/2)".into(),
        weight: format!("v_s(x, xi) = (1 + |x|^2 + |xi|^2)^(s/2), s = {s}"),
        terms,
        partial_sums,
        increments,
        total: acc,
    })
}

/// Kernel-diagonal trace, eigenvalue sum and reference value for `F(A)` truncated at `|k| ≤ J`.
pub fn trace_formula_check(func: &SpectralFunction, basis: &HermiteBasis) -> Result<SpectralReport> {
    let d = basis.dims();
    let j = basis.max_degree;
    let tail = func.tail_bound(d, j).ok_or_else(|| {
        Error::NonSummable(format!("{} has no summable decay bound in dimension {d}", func.label))
    })?;
    let rep = functional_calculus(func, basis)?;
    let kernel_trace = rep.trace_by_kernel_diagonal()?;
    let pairing_trace = rep.trace_by_pairing()?;

    // nonzero spectrum of Σ g_k ⊗ h_k equals that of B[j,k] = ∫ g_k h_j
    let r = rep.rank();
    let terms = rep.terms();
    let mut b = DMatrix::<Complex64>::zeros(r, r);
    for (col, (g, _)) in terms.iter().enumerate() {
        for (row, (_, h)) in terms.iter().enumerate() {
            b[(row, col)] = crate::grid::integrate(&g.mul(h)?);
        }
    }
    let eigenvalues = eigen::eigenvalues(&b)?;
    let eigenvalue_sum: Complex64 = eigenvalues.iter().sum();
    let spectral_sum = spectral_partial_sum(func, d, j);

    let target = match func.closed_form_trace(d) {
        Some((value, formula)) => TraceTarget {
            value: Complex64::new(value, 0.0),
            provenance: TargetProvenance::ClosedForm { formula },
            tail_bound: 0.0,
        },
        None => {
            let reference = (64 * j).max(4096 / d.max(1));
            let ref_tail = func.tail_bound(d, reference).unwrap_or(f64::INFINITY);
            TraceTarget {
                value: spectral_partial_sum(func, d, reference),
                provenance: TargetProvenance::Truncated { cutoff: reference },
                tail_bound: ref_tail,
            }
        }
    };

    let mut residuals = std::collections::BTreeMap::new();
    residuals.insert("kernel_trace_vs_spectral_sum".into(), (kernel_trace - spectral_sum).norm());
    residuals.insert("eigenvalue_sum_vs_spectral_sum".into(), (eigenvalue_sum - spectral_sum).norm());
    residuals.insert("spectral_sum_vs_target".into(), (spectral_sum - target.value).norm());
    residuals.insert("kernel_trace_vs_target".into(), (kernel_trace - target.value).norm());
    residuals.insert("gram_deviation".into(), basis.certificate.gram_deviation);
    residuals.insert("max_eigen_residual".into(), basis.certificate.max_eigen_residual);

    Ok(SpectralReport {
        label: format!("F(-Laplacian + |x|^2) on R^{d}, F = {}", func.label),
        eigenvalues,
        eigenvalue_sum,
        matrix_trace: Some(spectral_sum),
        pairing_trace: Some(pairing_trace),
        kernel_trace: Some(kernel_trace),
        target: Some(target),
        truncation: Truncation { parameter: "J (|k| <= J)".into(), value: j, tail_bound: Some(tail) },
        non_normality: None,
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid1(l: f64, n: usize) -> Arc<ProductGrid> {
        Arc::new(ProductGrid::single(Axis::centered(l, n).unwrap()))
    }

    #[test]
    fn ground_state_closed_form() {
        let xs = [-1.5, 0.0, 0.3, 2.0];
        let t = hermite_functions(1, &xs);
        for (i, x) in xs.iter().enumerate() {
            let psi0 = PI.powf(-0.25) * (-x * x / 2.0f64).exp();
            assert!((t[0][i] - psi0).abs() < 1e-16);
            // ψ₀'' = (x² - 1) ψ₀, so -ψ₀'' + x²ψ₀ = ψ₀ exactly
            let second = (x * x - 1.0) * psi0;
            assert!((-second + x * x * psi0 - psi0).abs() < 1e-15);
        }
    }

    #[test]
    fn multi_index_order() {
        let k = multi_indices(2, 2);
        assert_eq!(k, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(multi_indices(1, 3), vec![vec![0], vec![1], vec![2], vec![3]]);
        assert_eq!(multi_indices(3, 4).len(), 35);
    }

    #[test]
    fn default_basis_is_certified() {
        let b = build_basis(1, 20, default_grid()).unwrap();
        assert_eq!(b.len(), 21);
        assert!(b.certificate().gram_deviation < 1e-10, "{:?}", b.certificate());
        assert!(b.certificate().max_eigen_residual < 1e-6, "{:?}", b.certificate());
        assert_eq!(b.eigenvalues()[0], 1.0);
        assert_eq!(b.eigenvalues()[20], 41.0);
    }

    #[test]
    fn two_dimensional_level_six() {
        let axis = Axis::centered(10.0, 64).unwrap();
        let g = Arc::new(ProductGrid::new(vec![axis.clone(), axis]).unwrap());
        let b = build_basis(2, 3, g).unwrap();
        let i = b.position(&[1, 1]).unwrap();
        assert_eq!(b.eigenvalues()[i], 6.0);
        assert!(b.certificate().max_eigen_residual < 1e-6);
    }

    #[test]
    fn narrow_box_is_rejected() {
        assert!(matches!(build_basis(1, 40, grid1(10.0, 512)), Err(Error::InsufficientDecay(_))));
    }

    #[test]
    fn exponential_calculus_acts_on_eigenfunction() {
        let b = build_basis(1, 20, default_grid()).unwrap();
        let f = SpectralFunction::exponential(1.0).unwrap();
        let rep = functional_calculus(&f, &b).unwrap();
        let phi3 = &b.functions()[3];
        let out = rep.apply(phi3).unwrap();
        let expected = phi3.scale(Complex64::new((-7.0f64).exp(), 0.0));
        assert!(out.sub(&expected).unwrap().sup_norm() < 1e-10);
    }

    #[test]
    fn indicator_is_rank_one_projection() {
        let b = build_basis(1, 10, grid1(10.0, 256)).unwrap();
        let f = SpectralFunction::indicator(1.0);
        let r = trace_formula_check(&f, &b).unwrap();
        assert!((r.kernel_trace.unwrap() - 1.0).norm() < 1e-10);
        assert_eq!(r.target.as_ref().unwrap().value, Complex64::new(1.0, 0.0));
        assert!(r.eigenvalues[1..].iter().all(|z| z.norm() < 1e-12));
        let k = functional_calculus_kernel(&f, &b).unwrap();
        let phi0 = b.functions()[0].values();
        let n = phi0.len();
        assert!((k.values()[5 * n + 7] - phi0[5] * phi0[7]).norm() < 1e-15);
    }

    #[test]
    fn identity_projects_low_modes() {
        let b = build_basis(1, 8, grid1(10.0, 256)).unwrap();
        let rep = functional_calculus(&SpectralFunction::constant(Complex64::new(1.0, 0.0)), &b).unwrap();
        for m in 0..=8 {
            let phi = &b.functions()[m];
            assert!(rep.apply(phi).unwrap().sub(phi).unwrap().sup_norm() < 1e-10);
        }
    }

    #[test]
    fn tail_bounds() {
        let e = SpectralFunction::exponential(1.0).unwrap();
        let direct: f64 = (21..2000).map(|j| (-(2.0 * j as f64 + 1.0)).exp()).sum();
        let bound = e.tail_bound(1, 20).unwrap();
        assert!(bound >= direct * (1.0 - 1e-12) && bound <= direct * 1.0001);
        let direct2: f64 = (21..2000).map(|m| (m + 1) as f64 * (-(2.0 * m as f64 + 2.0)).exp()).sum();
        let b2 = e.tail_bound(2, 20).unwrap();
        assert!(b2 >= direct2 * (1.0 - 1e-12) && b2 <= direct2 * 1.0001, "{b2} vs {direct2}");

        let p = SpectralFunction::power(2.0).unwrap();
        let direct: f64 = (41..2_000_000).map(|j| (2.0 * j as f64 + 1.0).powi(-2)).sum();
        let bound = p.tail_bound(1, 40).unwrap();
        assert!(bound >= direct && bound <= 1.0 / 160.0);
        assert!(p.tail_bound(2, 40).is_none());
        assert!(SpectralFunction::power(1.0).unwrap().tail_bound(1, 40).is_none());
    }

    #[test]
    fn non_summable_trace_is_rejected() {
        let b = build_basis(1, 5, grid1(10.0, 256)).unwrap();
        let f = SpectralFunction::power(1.0).unwrap();
        assert!(matches!(trace_formula_check(&f, &b), Err(Error::NonSummable(_))));
    }

    #[test]
    fn zero_function_criterion_vanishes() {
        let b = build_basis(1, 4, grid1(10.0, 256)).unwrap();
        let c = nuclearity_criterion(&SpectralFunction::zero(), &b, 1.0, 2.0, 2.0, 0.0).unwrap();
        assert_eq!(c.total, 0.0);
    }

    #[test]
    fn moyal_cross_check() {
        let b = build_basis(1, 6, grid1(10.0, 256)).unwrap();
        let c = nuclearity_criterion(&SpectralFunction::exponential(1.0).unwrap(), &b, 1.0, 2.0, 2.0, 0.0).unwrap();
        for t in &c.terms {
            assert!(t.moyal_deviation < 1e-6, "{t:?}");
            assert!((t.modulation_norm / t.moyal_value - 1.0).abs() < 1e-6);
        }
    }
}
