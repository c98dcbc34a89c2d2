//! Functions of the harmonic oscillator through its Hermite basis: trace
//! formula for e^{-λ} and λ^{-2}, and the nuclearity criterion partial sums.

use std::sync::Arc;

use nuclear_trace::grid::{Axis, ProductGrid};
use nuclear_trace::hermite::{self, SpectralFunction};

fn main() -> nuclear_trace::Result<()> {
    let basis = hermite::build_basis(1, 20, hermite::default_grid())?;
    println!("basis certificate: {:?}", basis.certificate());

    let heat = SpectralFunction::exponential(1.0)?;
    let r = hermite::trace_formula_check(&heat, &basis)?;
    println!(
        "e^-λ: kernel trace {:.14}, spectral sum {:.14}, exact {:.14}",
        r.kernel_trace.unwrap().re,
        r.matrix_trace.unwrap().re,
        0.5 / 1f64.sinh()
    );

    let wide = Arc::new(ProductGrid::single(Axis::centered(14.0, 1024)?));
    let basis40 = hermite::build_basis(1, 40, wide)?;
    let r = hermite::trace_formula_check(&SpectralFunction::power(2.0)?, &basis40)?;
    println!(
        "λ^-2: partial sum {:.10}, π²/8 {:.10}, tail bound {:.3e}",
        r.matrix_trace.unwrap().re,
        std::f64::consts::PI.powi(2) / 8.0,
        r.truncation.tail_bound.unwrap()
    );

    let crit = hermite::nuclearity_criterion(&heat, &basis, 1.0, 2.0, 2.0, 0.0)?;
    for j in (1..crit.partial_sums.len()).step_by(4) {
        println!("J = {j:>2}: partial sum {:.12}, increment {:.3e}", crit.partial_sums[j], crit.increments[j - 1]);
    }

    let basis2 = hermite::build_basis(2, 12, Arc::new(ProductGrid::new(vec![Axis::centered(11.0, 96)?; 2])?))?;
    let r = hermite::trace_formula_check(&heat, &basis2)?;
    println!("d = 2, e^-λ: kernel trace {:.12}, exact {:.12}", r.kernel_trace.unwrap().re, (0.5 / 1f64.sinh()).powi(2));
    Ok(())
}
