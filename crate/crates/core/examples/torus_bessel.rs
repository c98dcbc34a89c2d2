//! Trace of α(x)(I - Δ)^{-1} on the circle: eigenvalues of the truncated
//! matrix against the symbol sum and its closed form, for a constant and a
//! non-constant α.

use std::f64::consts::PI;
use std::sync::Arc;

use nuclear_trace::grid::{ProductGrid, SampledFunction};
use nuclear_trace::torus::{self, FrequencyCutoff, Multiplier};

fn main() -> nuclear_trace::Result<()> {
    let symbol = Multiplier::Bessel(torus::bessel_symbol(2.0, 1)?);
    for n in [16usize, 32, 64, 128] {
        let cutoff = FrequencyCutoff::new(1, n)?;
        let grid = Arc::new(ProductGrid::unit_torus(1, 4 * n + 4)?);
        let alphas = [
            ("1", SampledFunction::constant(grid.clone(), 1.0.into())),
            ("1 + cos 2πx", SampledFunction::from_real_fn(grid.clone(), |x| 1.0 + (2.0 * PI * x[0]).cos())?),
        ];
        for (name, alpha) in alphas {
            let r = torus::verify_corollary_trace(&alpha, &symbol, &cutoff, 4096)?;
            let target = r.target.as_ref().map(|t| t.value.re).unwrap_or(f64::NAN);
            println!(
                "N = {n:>3}, α = {name:<12} eigen sum {:.12}  matrix trace {:.12}  limit {target:.12}  ||MM*-M*M|| {:.2e}",
                r.eigenvalue_sum.re,
                r.matrix_trace.map(|z| z.re).unwrap_or(f64::NAN),
                r.non_normality.unwrap_or(0.0)
            );
        }
    }
    Ok(())
}
