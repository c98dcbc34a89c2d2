//! Discretized product measure spaces.
//!
//! Every space in this crate is a finite tensor-product grid: each factor is an
//! [`Axis`] of ordered nodes with positive quadrature weights, and the product
//! measure of a node is the product of its per-axis weights. The measure spaces
//! of the underlying theory are arbitrary σ-finite spaces; here they are always
//! finite grids, and σ-finiteness of a (measure, weight, exponent) triple is
//! represented by an explicit box partition ledger ([`triple_is_sigma_finite`]).
//!
//! Values are stored row-major in axis order: the last axis varies fastest.

use std::ops::Range;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mixed_norm::{self, ExponentTuple, WeightConvention};

/// One factor of a product measure space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    nodes: Vec<f64>,
    quad_weights: Vec<f64>,
    periodic: bool,
    extent: f64,
}

impl Axis {
    pub fn new(nodes: Vec<f64>, quad_weights: Vec<f64>, periodic: bool, extent: f64) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidAxis("axis has no nodes".into()));
        }
        if nodes.len() != quad_weights.len() {
            return Err(Error::InvalidAxis(format!(
                "{} nodes but {} weights",
                nodes.len(),
                quad_weights.len()
            )));
        }
        if let Some(w) = quad_weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidAxis(format!("quadrature weight {w} is not positive")));
        }
        if nodes.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidAxis("non-finite node".into()));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidAxis("nodes are not strictly increasing".into()));
        }
        if periodic {
            if !(extent.is_finite() && extent > 0.0) {
                return Err(Error::InvalidAxis(format!("period {extent} is not positive")));
            }
            if nodes.iter().any(|&x| x < 0.0 || x >= extent) {
                return Err(Error::InvalidAxis(format!("periodic nodes must lie in [0, {extent})")));
            }
        }
        Ok(Self { nodes, quad_weights, periodic, extent })
    }

    /// Uniform periodic axis on `[0, period)`. The equal weights are the
    /// trapezoidal rule, spectrally accurate for smooth periodic integrands.
    pub fn periodic_uniform(count: usize, period: f64) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidAxis("axis has no nodes".into()));
        }
        let h = period / count as f64;
        let nodes = (0..count).map(|k| k as f64 * h).collect();
        Self::new(nodes, vec![h; count], true, period)
    }

    /// `count` equispaced nodes on the unit torus `[0, 1)`, total measure 1.
    pub fn unit_torus(count: usize) -> Result<Self> {
        Self::periodic_uniform(count, 1.0)
    }

    /// Non-periodic uniform axis on `[start, end)` with left Riemann weights.
    pub fn uniform(start: f64, end: f64, count: usize) -> Result<Self> {
        if count == 0 || !(end > start) {
            return Err(Error::InvalidAxis(format!("bad interval [{start}, {end}) with {count} nodes")));
        }
        let h = (end - start) / count as f64;
        let nodes = (0..count).map(|k| start + k as f64 * h).collect();
        Self::new(nodes, vec![h; count], false, end - start)
    }

    /// Symmetric box `[-half_width, half_width)` used to truncate `ℝ`.
    /// With an even count the origin is a node.
    pub fn centered(half_width: f64, count: usize) -> Result<Self> {
        Self::uniform(-half_width, half_width, count)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn quad_weights(&self) -> &[f64] {
        &self.quad_weights
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn measure(&self) -> f64 {
        self.quad_weights.iter().sum()
    }

    /// Node spacing if the axis is equispaced (relative tolerance 1e-9).
    pub fn uniform_spacing(&self) -> Option<f64> {
        if self.nodes.len() < 2 {
            return Some(self.extent);
        }
        let h = self.nodes[1] - self.nodes[0];
        let ok = self
            .nodes
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs());
        ok.then_some(h)
    }

    /// Index of the node at the origin, if one exists.
    pub fn origin_index(&self) -> Option<usize> {
        let h = self.uniform_spacing().unwrap_or(1.0);
        self.nodes.iter().position(|x| x.abs() <= 1e-9 * h)
    }
}

/// Finite product of axes carrying the product measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductGrid {
    axes: Vec<Axis>,
}

impl ProductGrid {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidGrid("a grid needs at least one axis".into()));
        }
        Ok(Self { axes })
    }

    pub fn single(axis: Axis) -> Self {
        Self { axes: vec![axis] }
    }

    /// `count^dims` nodes on the unit torus `[0,1)^dims`.
    pub fn unit_torus(dims: usize, count: usize) -> Result<Self> {
        let axis = Axis::unit_torus(count)?;
        Self::new(vec![axis; dims])
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis(&self, k: usize) -> &Axis {
        &self.axes[k]
    }

    pub fn dims(&self) -> usize {
        self.axes.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Axis::len).collect()
    }

    pub fn node_count(&self) -> usize {
        self.axes.iter().map(Axis::len).product()
    }

    pub fn measure(&self) -> f64 {
        self.axes.iter().map(Axis::measure).product()
    }

    /// Row-major strides, last axis fastest.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.axes.len()];
        for k in (0..self.axes.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.axes[k + 1].len();
        }
        strides
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        multi
            .iter()
            .zip(self.axes.iter())
            .fold(0, |acc, (&i, axis)| acc * axis.len() + i)
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.axes.len()];
        for (k, axis) in self.axes.iter().enumerate().rev() {
            out[k] = flat % axis.len();
            flat /= axis.len();
        }
        out
    }

    /// Coordinates of a node.
    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .iter()
            .zip(self.axes.iter())
            .map(|(&i, axis)| axis.nodes[i])
            .collect()
    }

    /// Product quadrature weight of a node.
    pub fn quad_weight(&self, flat: usize) -> f64 {
        self.multi_index(flat)
            .iter()
            .zip(self.axes.iter())
            .map(|(&i, axis)| axis.quad_weights[i])
            .product()
    }

    /// All product quadrature weights in storage order.
    pub fn quad_weights(&self) -> Vec<f64> {
        let mut out = vec![1.0];
        for axis in &self.axes {
            let mut next = Vec::with_capacity(out.len() * axis.len());
            for &w in &out {
                next.extend(axis.quad_weights.iter().map(|q| w * q));
            }
            out = next;
        }
        out
    }

    /// All node coordinates in storage order.
    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.node_count()).map(|i| self.point(i)).collect()
    }

    /// Product of two grids: axes of `self` followed by axes of `other`.
    pub fn product(&self, other: &ProductGrid) -> ProductGrid {
        let mut axes = self.axes.clone();
        axes.extend(other.axes.iter().cloned());
        ProductGrid { axes }
    }

    /// Exchange the leading `split` axes with the rest.
    pub fn swap_blocks(&self, split: usize) -> ProductGrid {
        let mut axes = self.axes[split..].to_vec();
        axes.extend(self.axes[..split].iter().cloned());
        ProductGrid { axes }
    }

    /// True for nodes on the boundary of the index box.
    pub fn is_edge_node(&self, flat: usize) -> bool {
        self.multi_index(flat)
            .iter()
            .zip(self.axes.iter())
            .any(|(&i, axis)| i == 0 || i + 1 == axis.len())
    }
}

/// A product of half-open index ranges, one per axis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridBox {
    pub ranges: Vec<Range<usize>>,
}

impl GridBox {
    pub fn whole(grid: &ProductGrid) -> Self {
        Self { ranges: grid.axes.iter().map(|a| 0..a.len()).collect() }
    }

    pub fn contains(&self, multi: &[usize]) -> bool {
        self.ranges.iter().zip(multi).all(|(r, i)| r.contains(i))
    }

    pub fn node_count(&self) -> usize {
        self.ranges.iter().map(|r| r.len()).product()
    }

    /// Flat indices of the nodes inside the box, in storage order.
    pub fn flat_indices(&self, grid: &ProductGrid) -> Vec<usize> {
        let mut out = vec![0usize];
        for (r, axis) in self.ranges.iter().zip(grid.axes.iter()) {
            let mut next = Vec::with_capacity(out.len() * r.len());
            for &base in &out {
                next.extend(r.clone().map(|i| base * axis.len() + i));
            }
            out = next;
        }
        out
    }
}

/// Disjoint boxes covering a grid, together with a node → box lookup.
#[derive(Clone, Debug)]
pub struct Partition {
    boxes: Vec<GridBox>,
    owner: Vec<usize>,
}

impl Partition {
    pub fn boxes(&self) -> &[GridBox] {
        &self.boxes
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    /// Box index owning each node.
    pub fn owner(&self) -> &[usize] {
        &self.owner
    }
}

/// Split every axis into `counts[k]` equal consecutive blocks.
pub fn box_partition(grid: &ProductGrid, counts: &[usize]) -> Result<Partition> {
    if counts.len() != grid.dims() {
        return Err(Error::DimensionMismatch { expected: grid.dims(), got: counts.len() });
    }
    let mut per_axis: Vec<Vec<Range<usize>>> = Vec::with_capacity(counts.len());
    for (k, (&c, axis)) in counts.iter().zip(grid.axes()).enumerate() {
        if c == 0 || axis.len() % c != 0 {
            return Err(Error::InvalidPartition(format!(
                "axis {k} has {} nodes, not divisible into {c} boxes",
                axis.len()
            )));
        }
        let size = axis.len() / c;
        per_axis.push((0..c).map(|b| b * size..(b + 1) * size).collect());
    }

    let mut boxes: Vec<GridBox> = vec![GridBox { ranges: Vec::new() }];
    for ranges in &per_axis {
        let mut next = Vec::with_capacity(boxes.len() * ranges.len());
        for b in &boxes {
            for r in ranges {
                let mut rs = b.ranges.clone();
                rs.push(r.clone());
                next.push(GridBox { ranges: rs });
            }
        }
        boxes = next;
    }

    let mut owner = vec![usize::MAX; grid.node_count()];
    for (b, gb) in boxes.iter().enumerate() {
        for i in gb.flat_indices(grid) {
            owner[i] = b;
        }
    }
    Ok(Partition { boxes, owner })
}

/// Shape of a weight, kept for reporting and majorant checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum WeightKind {
    Unit,
    /// `v_s(z) = (1 + |z|²)^{s/2}` over all coordinates.
    Polynomial { s: f64 },
    /// `∏ ⟨x_j⟩^{β_j}` with `⟨x⟩ = 1 + |x|`.
    Moderate { betas: Vec<f64> },
    Custom,
}

/// Strictly positive weight sampled on a grid.
#[derive(Clone, Debug)]
pub struct WeightFunction {
    grid: Arc<ProductGrid>,
    values: Vec<f64>,
    factors: Option<Vec<Vec<f64>>>,
    kind: WeightKind,
}

impl WeightFunction {
    pub fn new(grid: Arc<ProductGrid>, values: Vec<f64>) -> Result<Self> {
        Self::build(grid, values, None, WeightKind::Custom)
    }

    fn build(
        grid: Arc<ProductGrid>,
        values: Vec<f64>,
        factors: Option<Vec<Vec<f64>>>,
        kind: WeightKind,
    ) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::DimensionMismatch { expected: grid.node_count(), got: values.len() });
        }
        if let Some((node, &value)) = values.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::NonPositiveWeight { node, value });
        }
        let w = Self { grid, values, factors: None, kind };
        match factors {
            Some(f) => w.with_factors(f),
            None => Ok(w),
        }
    }

    pub fn unit(grid: Arc<ProductGrid>) -> Self {
        let n = grid.node_count();
        Self { grid, values: vec![1.0; n], factors: None, kind: WeightKind::Unit }
    }

    pub fn from_fn(grid: Arc<ProductGrid>, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = (0..grid.node_count()).map(|i| f(&grid.point(i))).collect();
        Self::new(grid, values)
    }

    /// Polynomial weight `v_s(z) = (1 + |z|²)^{s/2}`.
    pub fn polynomial(grid: Arc<ProductGrid>, s: f64) -> Result<Self> {
        let values = (0..grid.node_count())
            .map(|i| {
                let r2: f64 = grid.point(i).iter().map(|x| x * x).sum();
                (1.0 + r2).powf(s / 2.0)
            })
            .collect();
        Self::build(grid, values, None, WeightKind::Polynomial { s })
    }

    /// Product weight `∏ ⟨x_j⟩^{β_j}`; it carries its own factors.
    pub fn moderate(grid: Arc<ProductGrid>, betas: &[f64]) -> Result<Self> {
        if betas.len() != grid.dims() {
            return Err(Error::DimensionMismatch { expected: grid.dims(), got: betas.len() });
        }
        let factors: Vec<Vec<f64>> = grid
            .axes()
            .iter()
            .zip(betas)
            .map(|(axis, &b)| axis.nodes().iter().map(|x| (1.0 + x.abs()).powf(b)).collect())
            .collect();
        let values = product_of_factors(&grid, &factors);
        Self::build(grid, values, Some(factors), WeightKind::Moderate { betas: betas.to_vec() })
    }

    /// Attach separable majorant factors `w_j` and check `w ≤ ∏ w_j` at every node.
    pub fn with_factors(mut self, factors: Vec<Vec<f64>>) -> Result<Self> {
        if factors.len() != self.grid.dims() {
            return Err(Error::DimensionMismatch { expected: self.grid.dims(), got: factors.len() });
        }
        for (f, axis) in factors.iter().zip(self.grid.axes()) {
            if f.len() != axis.len() {
                return Err(Error::DimensionMismatch { expected: axis.len(), got: f.len() });
            }
            if let Some(&value) = f.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
                return Err(Error::NonPositiveWeight { node: 0, value });
            }
        }
        let majorant = product_of_factors(&self.grid, &factors);
        if let Some(i) = (0..self.values.len()).find(|&i| self.values[i] > majorant[i] * (1.0 + 1e-12)) {
            return Err(Error::MajorantViolated(i));
        }
        self.factors = Some(factors);
        Ok(self)
    }

    /// Weight that is constant on every box, taking `box_value[b]` on box `b`.
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

    pub fn factors(&self) -> Option<&[Vec<f64>]> {
        self.factors.as_deref()
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn is_unit(&self) -> bool {
        self.values.iter().all(|&v| v == 1.0)
    }

    /// Pointwise reciprocal `w^{-1}`, the weight of the dual space.
    pub fn inverse(&self) -> Self {
        let kind = match &self.kind {
            WeightKind::Unit => WeightKind::Unit,
            WeightKind::Polynomial { s } => WeightKind::Polynomial { s: -s },
            WeightKind::Moderate { betas } => WeightKind::Moderate { betas: betas.iter().map(|b| -b).collect() },
            WeightKind::Custom => WeightKind::Custom,
        };
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| 1.0 / v).collect(),
            factors: None,
            kind,
        }
    }

    /// Whether the weight is constant on each box (relative tolerance 1e-12).
    pub fn is_box_constant(&self, partition: &Partition) -> bool {
        is_box_constant(&self.values, partition)
    }
}

pub(crate) fn is_box_constant(values: &[f64], partition: &Partition) -> bool {
    let mut first = vec![f64::NAN; partition.len()];
    for (i, &b) in partition.owner().iter().enumerate() {
        let v = values[i];
        if first[b].is_nan() {
            first[b] = v;
        } else if (v - first[b]).abs() > 1e-12 * first[b].abs().max(v.abs()) {
            return false;
        }
    }
    true
}

fn product_of_factors(grid: &ProductGrid, factors: &[Vec<f64>]) -> Vec<f64> {
    (0..grid.node_count())
        .map(|i| {
            grid.multi_index(i)
                .iter()
                .zip(factors)
                .map(|(&k, f)| f[k])
                .product()
        })
        .collect()
}

/// Complex samples of a function on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    grid: Arc<ProductGrid>,
    values: Vec<Complex64>,
}

impl SampledFunction {
    pub fn new(grid: Arc<ProductGrid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::DimensionMismatch { expected: grid.node_count(), got: values.len() });
        }
        if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { grid, values })
    }

    pub fn from_real(grid: Arc<ProductGrid>, values: Vec<f64>) -> Result<Self> {
        Self::new(grid, values.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
    }

    pub fn from_fn(grid: Arc<ProductGrid>, f: impl Fn(&[f64]) -> Complex64) -> Result<Self> {
        let values = (0..grid.node_count()).map(|i| f(&grid.point(i))).collect();
        Self::new(grid, values)
    }

    pub fn from_real_fn(grid: Arc<ProductGrid>, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn constant(grid: Arc<ProductGrid>, c: Complex64) -> Self {
        let n = grid.node_count();
        Self { grid, values: vec![c; n] }
    }

    pub fn zeros(grid: Arc<ProductGrid>) -> Self {
        Self::constant(grid, Complex64::new(0.0, 0.0))
    }

    /// Indicator function of a box.
    pub fn indicator(grid: Arc<ProductGrid>, b: &GridBox) -> Self {
        let mut values = vec![Complex64::new(0.0, 0.0); grid.node_count()];
        for i in b.flat_indices(&grid) {
            values[i] = Complex64::new(1.0, 0.0);
        }
        Self { grid, values }
    }

    pub(crate) fn from_parts_unchecked(grid: Arc<ProductGrid>, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.node_count());
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<ProductGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn same_grid(&self, other: &SampledFunction) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    pub(crate) fn check_grid(&self, other: &SampledFunction) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn abs_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self { grid: self.grid.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|v| v * c)
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    pub fn add(&self, other: &SampledFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &SampledFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &SampledFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    /// Pointwise product with a real weight on the same grid.
    pub fn weighted(&self, w: &WeightFunction) -> Result<Self> {
        if !(Arc::ptr_eq(&self.grid, w.grid()) || *self.grid == **w.grid()) {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid: self.grid.clone(),
            values: self.values.iter().zip(w.values()).map(|(v, w)| v * w).collect(),
        })
    }

    fn zip_with(&self, other: &SampledFunction, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.check_grid(other)?;
        Ok(Self {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }
}

/// `∫ f dμ` by the grid's product quadrature.
pub fn integrate(f: &SampledFunction) -> Complex64 {
    f.values
        .iter()
        .zip(f.grid.quad_weights())
        .map(|(v, q)| v * q)
        .sum()
}

/// Ledger entry for one box of a σ-finite triple.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoxMeasure {
    pub ranges: Vec<Range<usize>>,
    pub measure: f64,
    pub weighted_norm: f64,
}

/// Per-box measures and `w_P(Ω^k) = ‖1_{Ω^k}‖_{L^P_w}`, plus the verdict.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SigmaFiniteLedger {
    pub sigma_finite: bool,
    pub boxes: Vec<BoxMeasure>,
}

/// Evaluate the σ-finiteness ledger of `(μ, w, P)` over a box partition.
/// On a finite grid every entry is finite, so the verdict is always true; the
/// per-box values are what the ledger is for.
pub fn triple_is_sigma_finite(
    grid: &Arc<ProductGrid>,
    w: &WeightFunction,
    exponents: &ExponentTuple,
    partition: &Partition,
    convention: WeightConvention,
) -> Result<SigmaFiniteLedger> {
    let mut boxes = Vec::with_capacity(partition.len());
    for b in partition.boxes() {
        let ind = SampledFunction::indicator(grid.clone(), b);
        let norm = mixed_norm::mixed_norm(&ind, exponents, w, convention)?;
        let measure = b.flat_indices(grid).iter().map(|&i| grid.quad_weight(i)).sum();
        boxes.push(BoxMeasure { ranges: b.ranges.clone(), measure, weighted_norm: norm });
    }
    let sigma_finite = boxes.iter().all(|b| b.measure.is_finite() && b.weighted_norm.is_finite());
    Ok(SigmaFiniteLedger { sigma_finite, boxes })
}
