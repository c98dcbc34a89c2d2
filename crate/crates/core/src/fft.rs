//! Multi-dimensional FFT over row-major buffers.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

/// Reusable plan for one shape and direction.
pub(crate) struct NdFft {
    shape: Vec<usize>,
    plans: Vec<Arc<dyn Fft<f64>>>,
}

impl NdFft {
    pub(crate) fn new(shape: &[usize], direction: FftDirection) -> Self {
        let mut planner = FftPlanner::new();
        let plans = shape.iter().map(|&n| planner.plan_fft(n, direction)).collect();
        Self { shape: shape.to_vec(), plans }
    }

    pub(crate) fn forward(shape: &[usize]) -> Self {
        Self::new(shape, FftDirection::Forward)
    }

    pub(crate) fn inverse(shape: &[usize]) -> Self {
        Self::new(shape, FftDirection::Inverse)
    }

    /// Unnormalized transform in place: `Σ_j a_j e^{∓2πi j·k/n}`.
    pub(crate) fn process(&self, data: &mut [Complex64]) {
        let total: usize = self.shape.iter().product();
        debug_assert_eq!(data.len(), total);
        let mut stride = total;
        let mut line = Vec::new();
        for (k, &n) in self.shape.iter().enumerate() {
            stride /= n;
            let plan = &self.plans[k];
            if n == 1 {
                continue;
            }
            if stride == 1 {
                for chunk in data.chunks_exact_mut(n) {
                    plan.process(chunk);
                }
                continue;
            }
            line.resize(n, Complex64::new(0.0, 0.0));
            let block = n * stride;
            for outer in (0..total).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    for (i, slot) in line.iter_mut().enumerate() {
                        *slot = data[base + i * stride];
                    }
                    plan.process(&mut line);
                    for (i, v) in line.iter().enumerate() {
                        data[base + i * stride] = *v;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn matches_direct_dft_2d() {
        let shape = [3, 4];
        let data: Vec<Complex64> = (0..12).map(|i| Complex64::new(i as f64, (i * i) as f64 * 0.1)).collect();
        let mut out = data.clone();
        NdFft::forward(&shape).process(&mut out);
        for k0 in 0..3 {
            for k1 in 0..4 {
                let mut s = Complex64::new(0.0, 0.0);
                for j0 in 0..3 {
                    for j1 in 0..4 {
                        let ph = -2.0 * PI * ((j0 * k0) as f64 / 3.0 + (j1 * k1) as f64 / 4.0);
                        s += data[j0 * 4 + j1] * Complex64::from_polar(1.0, ph);
                    }
                }
                assert!((s - out[k0 * 4 + k1]).norm() < 1e-12);
            }
        }
    }
}
