//! Weighted mixed Lebesgue norms on a 2-D grid, both weight conventions,
//! and the duality pairing bound.

use std::sync::Arc;

use nuclear_trace::grid::{Axis, ProductGrid, SampledFunction, WeightFunction};
use nuclear_trace::mixed_norm::{self, ExponentTuple, WeightConvention};

fn main() -> nuclear_trace::Result<()> {
    let axis = Axis::uniform(0.0, 1.0, 128)?;
    let grid = Arc::new(ProductGrid::new(vec![axis.clone(), axis])?);
    let f = SampledFunction::from_real_fn(grid.clone(), |x| (1.0 + x[0]) * (2.0 - x[1]))?;
    let h = SampledFunction::from_real_fn(grid.clone(), |x| (6.0 * x[0]).cos() + x[1])?;
    let w = WeightFunction::polynomial(grid.clone(), 1.0)?;

    for p in [vec![1.0, 1.0], vec![2.0, 3.0], vec![3.0, 2.0], vec![4.0, 1.5]] {
        let tuple = ExponentTuple::new(p.clone())?;
        let plain = mixed_norm::mixed_norm_unweighted(&f, &tuple)?;
        let pointwise = mixed_norm::mixed_norm(&f, &tuple, &w, WeightConvention::Pointwise)?;
        let density = mixed_norm::mixed_norm(&f, &tuple, &w, WeightConvention::Density)?;
        println!("P = {p:?}: unweighted {plain:.6}, pointwise {pointwise:.6}, density {density:.6}");

        let dual = mixed_norm::dual_exponents(&tuple);
        let pairing = mixed_norm::dual_pairing(&f, &h)?.norm();
        let bound = pointwise * mixed_norm::dual_norm(&h, &dual, &w.inverse())?;
        println!("    |<f, h>| = {pairing:.6} <= {bound:.6}");
    }
    Ok(())
}
