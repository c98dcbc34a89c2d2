//! Conditional expectations on dyadic box partitions: contraction in a
//! weighted mixed norm and in a variable exponent norm, and convergence
//! to a smooth function as the boxes shrink.

use std::f64::consts::PI;
use std::sync::Arc;

use nuclear_trace::grid::{box_partition, Axis, ProductGrid, SampledFunction, WeightFunction};
use nuclear_trace::mixed_norm::{self, ExponentTuple, WeightConvention};
use nuclear_trace::variable_exponent::{self, VariableExponent};

fn main() -> nuclear_trace::Result<()> {
    let axis = Axis::uniform(0.0, 1.0, 256)?;
    let grid = Arc::new(ProductGrid::new(vec![axis.clone(), axis])?);
    let f = SampledFunction::from_real_fn(grid.clone(), |x| ((2.0 * PI * x[0]).sin() + (2.0 * PI * x[1]).sin()) / (4.0 * PI))?;
    let p = ExponentTuple::new(vec![2.0, 3.0])?;

    println!("boxes  mixed ||Pf||/||f||  mixed ||f-Pf||  variable ||Pf||/||f||  variable ||f-Pf||");
    for k in [1usize, 4, 16, 64, 128] {
        let part = box_partition(&grid, &[k, k])?;
        let vals: Vec<f64> = (0..part.len()).map(|b| 0.5 + (b % 7) as f64 * 0.25).collect();
        let w = WeightFunction::box_constant(grid.clone(), &part, &vals)?;
        let n = |h: &SampledFunction| mixed_norm::mixed_norm(h, &p, &w, WeightConvention::Pointwise);
        let pf = mixed_norm::map_projection(&f, &part, &w)?;

        let pv: Vec<f64> = (0..part.len()).map(|b| 1.0 + (b % 5) as f64 * 0.5).collect();
        let pe = VariableExponent::box_constant(grid.clone(), &part, &pv)?;
        let lux = |h: &SampledFunction| variable_exponent::luxemburg_norm(h, &pe);
        let qf = variable_exponent::map_projection_ve(&f, &pe, &part)?;

        println!(
            "{k:>5}  {:>20.12}  {:>14.3e}  {:>21.12}  {:>17.3e}",
            n(&pf)? / n(&f)?,
            n(&f.sub(&pf)?)?,
            lux(&qf)? / lux(&f)?,
            lux(&f.sub(&qf)?)?
        );
    }
    Ok(())
}
