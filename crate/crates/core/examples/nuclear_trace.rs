//! A finite-rank operator written as a sum of tensor products: its
//! quasinorm and its trace computed three ways.

use std::sync::Arc;

use nuclear_trace::grid::{Axis, ProductGrid, SampledFunction};
use nuclear_trace::mixed_norm::ExponentTuple;
use nuclear_trace::{NormDescriptor, NuclearRepresentation};

fn main() -> nuclear_trace::Result<()> {
    let grid = Arc::new(ProductGrid::single(Axis::uniform(0.0, 1.0, 96)?));
    let mut rep = NuclearRepresentation::square(grid.clone(), 0.5)?;
    for k in 1..=5 {
        let a = k as f64;
        let g = SampledFunction::from_real_fn(grid.clone(), move |x| (a * x[0]).sin() / a)?;
        let h = SampledFunction::from_real_fn(grid.clone(), move |x| x[0].powf(a) + 0.3 * (2.0 * a * x[0]).cos())?;
        rep.push(g, h)?;
    }
    let l3 = NormDescriptor::lebesgue(grid.clone(), ExponentTuple::uniform(3.0, 1)?);
    let rep = rep.with_source(l3.clone()).with_target(l3);

    let ledger = rep.quasinorm()?;
    println!("order {} quasinorm sum {:.6} over {} terms", ledger.order, ledger.total, ledger.terms.len());
    let eig = rep.trace_by_eigenvalues(4096)?;
    println!("trace by pairing         {:.14}", rep.trace_by_pairing()?);
    println!("trace by kernel diagonal {:.14}", rep.trace_by_kernel_diagonal()?);
    println!("sum of eigenvalues       {:.14}", eig.eigenvalue_sum);
    let mut large: Vec<_> = eig.eigenvalues.iter().filter(|z| z.norm() > 1e-10).collect();
    large.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    println!("nonzero eigenvalues: {large:.6?}");
    Ok(())
}
