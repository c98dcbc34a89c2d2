//! Short-time Fourier transform of a Gaussian, the Fourier-swap modulus
//! identity under refinement, Moyal's identity, and modulation norms.

use nuclear_trace::grid::SampledFunction;
use nuclear_trace::timefreq::{self, TfGrid, Window};

fn main() -> nuclear_trace::Result<()> {
    for n in [128, 256, 512] {
        let tf = TfGrid::centered(1, 48.0, n)?;
        let f = SampledFunction::from_real_fn(tf.space().clone(), |x| (-x[0] * x[0] / 2.0).exp())?;
        let g = Window::unit_gaussian(tf.space().clone())?;
        match timefreq::fourier_swap_check(&f, &g, &tf) {
            Ok(r) => println!("{n} nodes: swap deviation {:.3e} (relative to peak {:.4})", r.max_relative_deviation, r.peak),
            Err(e) => println!("{n} nodes: {e}"),
        }
    }

    let tf = TfGrid::centered(1, 20.0, 256)?;
    let f = SampledFunction::from_real_fn(tf.space().clone(), |x| (-(x[0] - 1.0).powi(2) / 2.0).exp())?;
    let g = Window::unit_gaussian(tf.space().clone())?;
    let moyal = timefreq::stft_l2_norm(&f, &g, &tf)?;
    println!("||V_g f||_2 = {moyal:.12}");
    for s in [0.0, 1.0, 2.0] {
        let w = timefreq::polynomial_weight(&tf, s)?;
        let m = timefreq::modulation_norm(&f, &g, &tf, 2.0, 4.0, &w)?;
        let a = timefreq::wiener_amalgam_norm(&f, &g, &tf, 2.0, 4.0, &w)?;
        println!("s = {s}: M^(2,4) {m:.6}, W^(2,4) {a:.6}");
    }
    Ok(())
}
