//! Quasinorm sums of Bessel potentials on the circle across octaves of the
//! frequency cutoff, on either side of the summability threshold rτ = n.

use std::sync::Arc;

use nuclear_trace::grid::{ProductGrid, SampledFunction};
use nuclear_trace::mixed_norm::ExponentTuple;
use nuclear_trace::torus::{self, FrequencyCutoff, Multiplier};
use nuclear_trace::NormDescriptor;

fn main() -> nuclear_trace::Result<()> {
    let r = 2.0 / 3.0;
    for tau in [1.0, 2.0, 3.0] {
        let symbol = torus::bessel_symbol(tau, 1)?;
        let m = Multiplier::Bessel(symbol);
        println!("τ = {tau}, r = {r:.4}: rτ > n is {}", symbol.summable_power(r));
        let mut last: Option<f64> = None;
        let mut last_inc: Option<f64> = None;
        for n in [16usize, 32, 64, 128, 256] {
            let cutoff = FrequencyCutoff::new(1, n)?;
            let grid = Arc::new(ProductGrid::unit_torus(1, 2 * n + 2)?);
            let l2 = NormDescriptor::lebesgue(grid.clone(), ExponentTuple::uniform(2.0, 1)?);
            let alpha = SampledFunction::constant(grid, 1.0.into());
            let ledger = torus::nuclearity_ledger(&alpha, &m, r, l2.clone(), l2, &cutoff)?;
            let inc = last.map(|s| ledger.total - s);
            let shrink = match (last_inc, inc) {
                (Some(a), Some(b)) => format!("{:.4}", a / b),
                _ => "-".into(),
            };
            println!("  N = {n:>3}: sum {:.8}  increment {:>12}  shrink {shrink:>7}  tail bound {:?}",
                ledger.total,
                inc.map(|d| format!("{d:.4e}")).unwrap_or("-".into()),
                ledger.tail_bound
            );
            last = Some(ledger.total);
            last_inc = inc;
        }
    }
    Ok(())
}
