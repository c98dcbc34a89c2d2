//! r-nuclear operators given by finite rank-one expansions.
//!
//! An operator is stored as pairs `(g_n, h_n)` acting by
//! `Tf(x) = ∫ (Σ_n g_n(x) h_n(y)) f(y) dμ(y)`. Its trace can be computed two
//! ways: by the pairings `Σ_n ⟨g_n, h_n⟩`, and as the sum of the eigenvalues of
//! the quadrature matrix `M[i,j] = K(x_i, x_j) q_j`. At finite rank both are
//! the trace of the same matrix, so agreement also certifies the eigensolver.
//!
//! Every finite expansion is r-nuclear for every `r`; the quasinorm ledger
//! records `Σ ‖g_n‖^r ‖h_n‖^r` so that a family of truncations can be watched
//! as it grows.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen::{self, ComplexMatrix};
use crate::error::{Error, Result};
use crate::grid::{integrate, ProductGrid, SampledFunction, WeightFunction};
use crate::mixed_norm::{dual_exponents, dual_norm, mixed_norm, ExponentTuple, WeightConvention};
use crate::variable_exponent::{luxemburg_norm, VariableExponent};

/// Largest matrix the dense eigensolver is asked to handle by default.
pub const DEFAULT_DIMENSION_CAP: usize = 4096;

/// Which norm engine measures a space.
#[derive(Clone, Debug)]
pub enum NormDescriptor {
    Mixed { exponents: ExponentTuple, weight: WeightFunction, convention: WeightConvention },
    Variable(VariableExponent),
}

impl NormDescriptor {
    /// Unweighted `L^P`.
    pub fn lebesgue(grid: Arc<ProductGrid>, exponents: ExponentTuple) -> Self {
        NormDescriptor::Mixed { exponents, weight: WeightFunction::unit(grid), convention: WeightConvention::Pointwise }
    }

    pub fn norm(&self, f: &SampledFunction) -> Result<f64> {
        match self {
            NormDescriptor::Mixed { exponents, weight, convention } => mixed_norm(f, exponents, weight, *convention),
            NormDescriptor::Variable(p) => luxemburg_norm(f, p),
        }
    }

    /// Norm of the dual space: `L^{P'}_{w^{-1}}` or `L^{p'(·)}`.
    ///
    /// A density weight `w` is the pointwise weight `w^{1/p_1}`, so its dual
    /// carries `w^{-1/p_1}`.
    pub fn dual_norm(&self, h: &SampledFunction) -> Result<f64> {
        match self {
            NormDescriptor::Mixed { exponents, weight, convention } => {
                let dual = dual_exponents(exponents);
                let w_inv = match convention {
                    WeightConvention::Pointwise => weight.inverse(),
                    WeightConvention::Density => {
                        let p1 = exponents.entries()[0];
                        let vals = weight.values().iter().map(|w| w.powf(-1.0 / p1)).collect();
                        WeightFunction::new(weight.grid().clone(), vals)?
                    }
                };
                dual_norm(h, &dual, &w_inv)
            }
            NormDescriptor::Variable(p) => luxemburg_norm(h, &p.dual()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            NormDescriptor::Mixed { exponents, convention, .. } => {
                format!("mixed{:?} ({convention:?} weight)", exponents.entries())
            }
            NormDescriptor::Variable(p) => format!("variable p in [{}, {}]", p.p_minus(), p.p_plus()),
        }
    }
}

/// One row of the quasinorm ledger.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasinormTerm {
    pub target_norm: f64,
    pub dual_source_norm: f64,
    pub term: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasinormLedger {
    pub order: f64,
    pub terms: Vec<QuasinormTerm>,
    pub total: f64,
}

/// Eigenvalues of the assembled operator and the two traces they must match.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenTrace {
    pub eigenvalues: Vec<Complex64>,
    pub eigenvalue_sum: Complex64,
    pub matrix_trace: Complex64,
}

/// Finite expansion `T = Σ_n g_n ⊗ h_n`.
#[derive(Clone, Debug)]
pub struct NuclearRepresentation {
    target_grid: Arc<ProductGrid>,
    source_grid: Arc<ProductGrid>,
    terms: Vec<(SampledFunction, SampledFunction)>,
    order: f64,
    source: Option<NormDescriptor>,
    target: Option<NormDescriptor>,
}

fn check_order(r: f64) -> Result<()> {
    if r > 0.0 && r <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("nuclearity order {r} must lie in (0, 1]")))
    }
}

impl NuclearRepresentation {
    pub fn new(target_grid: Arc<ProductGrid>, source_grid: Arc<ProductGrid>, order: f64) -> Result<Self> {
        check_order(order)?;
        Ok(Self { target_grid, source_grid, terms: Vec::new(), order, source: None, target: None })
    }

    /// Operator on a single space (`source = target`).
    pub fn square(grid: Arc<ProductGrid>, order: f64) -> Result<Self> {
        Self::new(grid.clone(), grid, order)
    }

    pub fn from_pairs(grid: Arc<ProductGrid>, order: f64, pairs: Vec<(SampledFunction, SampledFunction)>) -> Result<Self> {
        let mut rep = Self::square(grid, order)?;
        for (g, h) in pairs {
            rep.push(g, h)?;
        }
        Ok(rep)
    }

    /// Append the rank-one term `g ⊗ h`.
    pub fn push(&mut self, g: SampledFunction, h: SampledFunction) -> Result<()> {
        if **g.grid() != *self.target_grid || **h.grid() != *self.source_grid {
            return Err(Error::GridMismatch);
        }
        self.terms.push((g, h));
        Ok(())
    }

    pub fn with_source(mut self, d: NormDescriptor) -> Self {
        self.source = Some(d);
        self
    }

    pub fn with_target(mut self, d: NormDescriptor) -> Self {
        self.target = Some(d);
        self
    }

    pub fn set_order(&mut self, r: f64) -> Result<()> {
        check_order(r)?;
        self.order = r;
        Ok(())
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[(SampledFunction, SampledFunction)] {
        &self.terms
    }

    pub fn source_grid(&self) -> &Arc<ProductGrid> {
        &self.source_grid
    }

    pub fn target_grid(&self) -> &Arc<ProductGrid> {
        &self.target_grid
    }

    pub fn source_descriptor(&self) -> Option<&NormDescriptor> {
        self.source.as_ref()
    }

    pub fn target_descriptor(&self) -> Option<&NormDescriptor> {
        self.target.as_ref()
    }

    /// Representation of `self + other` by concatenating the expansions.
    pub fn concat(&self, other: &NuclearRepresentation) -> Result<Self> {
        if *self.target_grid != *other.target_grid || *self.source_grid != *other.source_grid {
            return Err(Error::GridMismatch);
        }
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        Ok(out)
    }

    /// `Tf = Σ_n g_n ∫ h_n f dμ`.
    pub fn apply(&self, f: &SampledFunction) -> Result<SampledFunction> {
        if **f.grid() != *self.source_grid {
            return Err(Error::GridMismatch);
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.target_grid.node_count()];
        for (g, h) in &self.terms {
            let c = integrate(&h.mul(f)?);
            for (o, v) in out.iter_mut().zip(g.values()) {
                *o += v * c;
            }
        }
        SampledFunction::new(self.target_grid.clone(), out)
    }

    /// `K(x, y) = Σ_n g_n(x) h_n(y)` on the product of target and source grids.
    pub fn kernel(&self) -> SampledFunction {
        let grid = Arc::new(self.target_grid.product(&self.source_grid));
        let k = self.kernel_matrix();
        // nalgebra is column-major; the grid stores x-major rows
        let values = k.transpose().as_slice().to_vec();
        SampledFunction::from_parts_unchecked(grid, values)
    }

    fn kernel_matrix(&self) -> ComplexMatrix {
        let m = self.target_grid.node_count();
        let n = self.source_grid.node_count();
        let rank = self.terms.len();
        let g = DMatrix::from_fn(m, rank, |i, k| self.terms[k].0.values()[i]);
        let h = DMatrix::from_fn(rank, n, |k, j| self.terms[k].1.values()[j]);
        if rank == 0 {
            return DMatrix::zeros(m, n);
        }
        g * h
    }

    /// `Σ_n ‖g_n‖^r_{target} ‖h_n‖^r_{source'}`.
    pub fn quasinorm(&self) -> Result<QuasinormLedger> {
        let target = self.target.as_ref().ok_or(Error::UnsetDescriptor("target"))?;
        let source = self.source.as_ref().ok_or(Error::UnsetDescriptor("source"))?;
        let r = self.order;
        let mut terms = Vec::with_capacity(self.terms.len());
        for (g, h) in &self.terms {
            let a = target.norm(g)?;
            let b = source.dual_norm(h)?;
            terms.push(QuasinormTerm { target_norm: a, dual_source_norm: b, term: a.powf(r) * b.powf(r) });
        }
        let total = terms.iter().map(|t| t.term).sum();
        Ok(QuasinormLedger { order: r, terms, total })
    }

    fn require_square(&self) -> Result<()> {
        if *self.source_grid == *self.target_grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// `Σ_n ⟨g_n, h_n⟩ = Σ_n ∫ g_n h_n dμ`.
    pub fn trace_by_pairing(&self) -> Result<Complex64> {
        self.require_square()?;
        let mut s = Complex64::new(0.0, 0.0);
        for (g, h) in &self.terms {
            s += integrate(&g.mul(h)?);
        }
        Ok(s)
    }

    /// `∫ K(x, x) dμ(x)`.
    pub fn trace_by_kernel_diagonal(&self) -> Result<Complex64> {
        self.require_square()?;
        let q = self.source_grid.quad_weights();
        let mut s = Complex64::new(0.0, 0.0);
        for (i, qi) in q.iter().enumerate() {
            let k: Complex64 = self.terms.iter().map(|(g, h)| g.values()[i] * h.values()[i]).sum();
            s += k * qi;
        }
        Ok(s)
    }

    /// Quadrature matrix `M[i,j] = K(x_i, x_j) q_j`, so `M v` integrates.
    pub fn matrix(&self, cap: usize) -> Result<ComplexMatrix> {
        self.require_square()?;
        let n = self.source_grid.node_count();
        if n > cap {
            return Err(Error::CapExceeded { dim: n, cap });
        }
        let mut m = self.kernel_matrix();
        for (j, q) in self.source_grid.quad_weights().iter().enumerate() {
            m.column_mut(j).scale_mut(*q);
        }
        Ok(m)
    }

    /// Eigenvalues of the quadrature matrix and their sum.
    pub fn trace_by_eigenvalues(&self, cap: usize) -> Result<EigenTrace> {
        let m = self.matrix(cap)?;
        let eigenvalues = eigen::eigenvalues(&m)?;
        Ok(EigenTrace {
            eigenvalue_sum: eigenvalues.iter().sum(),
            matrix_trace: eigen::trace(&m),
            eigenvalues,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn torus(n: usize) -> Arc<ProductGrid> {
        Arc::new(ProductGrid::unit_torus(1, n).unwrap())
    }

    fn character(g: &Arc<ProductGrid>, k: f64) -> SampledFunction {
        SampledFunction::from_fn(g.clone(), |x| Complex64::from_polar(1.0, 2.0 * PI * k * x[0])).unwrap()
    }

    fn one(g: &Arc<ProductGrid>) -> SampledFunction {
        SampledFunction::constant(g.clone(), Complex64::new(1.0, 0.0))
    }

    fn two_cos(g: &Arc<ProductGrid>) -> NuclearRepresentation {
        NuclearRepresentation::from_pairs(
            g.clone(),
            1.0,
            vec![(character(g, 1.0), character(g, -1.0)), (character(g, -1.0), character(g, 1.0))],
        )
        .unwrap()
    }

    #[test]
    fn unit_rank_one() {
        let g = torus(16);
        let t = NuclearRepresentation::from_pairs(g.clone(), 1.0, vec![(one(&g), one(&g))]).unwrap();
        let tf = t.apply(&one(&g)).unwrap();
        assert!(tf.values().iter().all(|v| (v - 1.0).norm() < 1e-14));
        assert!(t.kernel().values().iter().all(|v| (v - 1.0).norm() < 1e-14));
        assert!((t.trace_by_pairing().unwrap() - 1.0).norm() < 1e-14);
        let et = t.trace_by_eigenvalues(DEFAULT_DIMENSION_CAP).unwrap();
        assert!((et.eigenvalues[0] - 1.0).norm() < 1e-12);
        assert!(et.eigenvalues[1..].iter().all(|z| z.norm() < 1e-12));
        assert!((et.eigenvalue_sum - 1.0).norm() < 1e-12);
    }

    #[test]
    fn orthogonal_input_is_annihilated() {
        let g = torus(32);
        let t = two_cos(&g);
        let out = t.apply(&character(&g, 3.0)).unwrap();
        assert!(out.sup_norm() < 1e-13);
    }

    #[test]
    fn two_cos_kernel_and_spectrum() {
        let g = torus(32);
        let t = two_cos(&g);
        let k = t.kernel();
        for i in 0..k.len() {
            let p = k.grid().point(i);
            let exact = 2.0 * (2.0 * PI * (p[0] - p[1])).cos();
            assert!((k.values()[i] - exact).norm() < 1e-12);
        }
        assert!((t.trace_by_pairing().unwrap() - 2.0).norm() < 1e-13);
        assert!((t.trace_by_kernel_diagonal().unwrap() - 2.0).norm() < 1e-13);
        let et = t.trace_by_eigenvalues(DEFAULT_DIMENSION_CAP).unwrap();
        assert!((et.eigenvalues[0] - 1.0).norm() < 1e-10);
        assert!((et.eigenvalues[1] - 1.0).norm() < 1e-10);
        assert!(et.eigenvalues[2..].iter().all(|z| z.norm() < 1e-10));
        assert!((et.eigenvalue_sum - 2.0).norm() < 1e-10);
    }

    #[test]
    fn quasinorm_of_unit_pair() {
        let g = torus(16);
        let l2 = NormDescriptor::lebesgue(g.clone(), ExponentTuple::new(vec![2.0]).unwrap());
        for r in [0.25, 2.0 / 3.0, 1.0] {
            let t = NuclearRepresentation::from_pairs(g.clone(), r, vec![(one(&g), one(&g))])
                .unwrap()
                .with_source(l2.clone())
                .with_target(l2.clone());
            assert!((t.quasinorm().unwrap().total - 1.0).abs() < 1e-14);
        }
        let scaled = NuclearRepresentation::from_pairs(g.clone(), 0.5, vec![(one(&g).scale(Complex64::new(4.0, 0.0)), one(&g))])
            .unwrap()
            .with_source(l2.clone())
            .with_target(l2);
        assert!((scaled.quasinorm().unwrap().total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn unset_descriptors_are_reported() {
        let g = torus(4);
        let t = NuclearRepresentation::square(g, 1.0).unwrap();
        assert!(matches!(t.quasinorm(), Err(Error::UnsetDescriptor("target"))));
    }

    #[test]
    fn order_and_grid_validation() {
        let g = torus(4);
        assert!(NuclearRepresentation::square(g.clone(), 0.0).is_err());
        assert!(NuclearRepresentation::square(g.clone(), 1.5).is_err());
        let mut t = NuclearRepresentation::square(g.clone(), 1.0).unwrap();
        assert!(matches!(t.push(one(&torus(8)), one(&g)), Err(Error::GridMismatch)));
        assert!(matches!(t.matrix(2), Err(Error::CapExceeded { dim: 4, cap: 2 })));
    }

    #[test]
    fn rectangular_operator_has_no_trace() {
        let t = NuclearRepresentation::new(torus(4), torus(8), 1.0).unwrap();
        assert!(t.trace_by_pairing().is_err());
        assert_eq!(t.kernel().len(), 32);
    }

    #[test]
    fn density_dual_weight() {
        let g = torus(8);
        let w = WeightFunction::from_fn(g.clone(), |x| 4.0 + x[0]).unwrap();
        let desc = NormDescriptor::Mixed {
            exponents: ExponentTuple::new(vec![2.0]).unwrap(),
            weight: w.clone(),
            convention: WeightConvention::Density,
        };
        let f = SampledFunction::from_real_fn(g.clone(), |x| 1.0 + x[0]).unwrap();
        // density w with p = 2 equals pointwise √w; its dual carries 1/√w
        let direct: f64 = f
            .values()
            .iter()
            .zip(w.values())
            .map(|(v, w)| v.norm_sqr() / w / 8.0)
            .sum::<f64>()
            .sqrt();
        assert!((desc.dual_norm(&f).unwrap() - direct).abs() < 1e-14);
    }
}
