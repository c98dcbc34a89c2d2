//! Luxemburg norms with a variable exponent: agreement with L^p when the
//! exponent is constant, the unit-modular identity, and the Hölder bound.

use std::f64::consts::PI;
use std::sync::Arc;

use nuclear_trace::grid::{Axis, ProductGrid, SampledFunction};
use nuclear_trace::variable_exponent::{self, VariableExponent};

fn main() -> nuclear_trace::Result<()> {
    let grid = Arc::new(ProductGrid::single(Axis::uniform(0.0, 1.0, 2048)?));
    let f = SampledFunction::from_real_fn(grid.clone(), |x| (-(x[0] - 0.4).powi(2) / 0.02).exp() + 0.1)?;

    for p in [1.0, 1.5, 2.0, 4.0] {
        let constant = VariableExponent::constant(grid.clone(), p)?;
        let lux = variable_exponent::luxemburg_norm(&f, &constant)?;
        println!("p = {p}: Luxemburg {lux:.12}, L^p {:.12}", variable_exponent::lp_norm(&f, p));
    }

    let p = VariableExponent::from_fn(grid.clone(), |x| 2.5 + (2.0 * PI * x[0]).sin())?;
    let sol = variable_exponent::luxemburg_solve(&f, &p)?;
    println!("p(x) in [{}, {}]: norm {:.12} after {} bracket and {} bisection steps", p.p_minus(), p.p_plus(), sol.norm, sol.expansion_steps, sol.bisection_steps);
    let unit = f.scale((1.0 / sol.norm).into());
    println!("modular of f/||f|| = {:.3e} away from 1", (variable_exponent::modular(&unit, &p)? - 1.0).abs());

    let g = SampledFunction::from_real_fn(grid, |x| 1.0 + 0.5 * (4.0 * PI * x[0]).cos())?;
    let holder = variable_exponent::holder_check(&f, &g, &p)?;
    println!("Hölder: {holder:?}");
    Ok(())
}
