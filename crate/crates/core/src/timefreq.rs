//! Short-time Fourier transform, modulation and Wiener amalgam norms.
//!
//! Conventions: angular frequency, `f̂(ξ) = ∫ f(t) e^{-it·ξ} dt`, and
//! `V_g f(x, ξ) = ∫ f(t) conj(g(t - x)) e^{-it·ξ} dt`. With these the
//! modulus identity `|V_g f(x,ξ)| = (2π)^{-d} |V_ĝ f̂(ξ,-x)|` holds without
//! extra constants. The torus module uses `e^{2πix·ξ}` characters instead;
//! the two never exchange data.
//!
//! `ℝ^d` is truncated to a box `[-L, L)^d` sampled at `n` equispaced nodes per
//! axis. The frequency axis is the dual lattice: spacing `2π / (2L)`, nodes
//! `(k - ⌊n/2⌋)·2π/(2L)`, so it spans `[-Ξ, Ξ)` with `Ξ = π n / (2L)`.
//! Functions and windows must decay below `1e-10` of their peak at the box
//! edges; this is checked rather than assumed.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::NdFft;
use crate::grid::{Axis, ProductGrid, SampledFunction, WeightFunction};
use crate::mixed_norm::{conjugate, iterated_norm};

/// Relative edge magnitude above which truncation to the box is rejected.
pub const EDGE_DECAY: f64 = 1e-10;

/// Accepted range for the ratio `‖f‖_{W^{p,q}_w} / ‖f̂‖_{M^{q,p}_{w₀}}`.
pub const WM_EQUIVALENCE_BAND: (f64, f64) = (1e-3, 1e3);

/// Space box, its dual frequency lattice, and the time-frequency plane.
#[derive(Clone, Debug)]
pub struct TfGrid {
    space: Arc<ProductGrid>,
    freq: Arc<ProductGrid>,
    plane: Arc<ProductGrid>,
}

impl TfGrid {
    /// Build the frequency lattice dual to `space`. Every space axis must be
    /// equispaced, non-periodic, and contain the origin.
    pub fn new(space: Arc<ProductGrid>) -> Result<Self> {
        let mut freq_axes = Vec::with_capacity(space.dims());
        for (k, axis) in space.axes().iter().enumerate() {
            if axis.is_periodic() {
                return Err(Error::InvalidGrid(format!("axis {k} is periodic; time-frequency grids live on ℝ^d")));
            }
            let h = axis
                .uniform_spacing()
                .ok_or_else(|| Error::InvalidGrid(format!("axis {k} is not equispaced")))?;
            if axis.origin_index().is_none() {
                return Err(Error::InvalidGrid(format!("axis {k} has no node at the origin")));
            }
            let n = axis.len();
            let dxi = 2.0 * PI / (n as f64 * h);
            let c = (n / 2) as f64;
            let nodes = (0..n).map(|i| (i as f64 - c) * dxi).collect();
            freq_axes.push(Axis::new(nodes, vec![dxi; n], false, n as f64 * dxi)?);
        }
        let freq = Arc::new(ProductGrid::new(freq_axes)?);
        let plane = Arc::new(space.product(&freq));
        Ok(Self { space, freq, plane })
    }

    /// `n^d` nodes on `[-half_width, half_width)^d`; `n` must be even.
    pub fn centered(dims: usize, half_width: f64, n: usize) -> Result<Self> {
        if !n.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!("node count {n} must be even so the origin is a node")));
        }
        let axis = Axis::centered(half_width, n)?;
        Self::new(Arc::new(ProductGrid::new(vec![axis; dims])?))
    }

    pub fn space(&self) -> &Arc<ProductGrid> {
        &self.space
    }

    pub fn freq(&self) -> &Arc<ProductGrid> {
        &self.freq
    }

    pub fn plane(&self) -> &Arc<ProductGrid> {
        &self.plane
    }

    pub fn dims(&self) -> usize {
        self.space.dims()
    }

    /// `L` per axis (distance from the origin to the first node).
    pub fn half_widths(&self) -> Vec<f64> {
        self.space.axes().iter().map(|a| -a.nodes()[0]).collect()
    }

    /// `Ξ` per axis.
    pub fn freq_half_widths(&self) -> Vec<f64> {
        self.freq.axes().iter().map(|a| -a.nodes()[0]).collect()
    }

    /// The time-frequency grid whose space is this grid's frequency lattice.
    pub fn dual(&self) -> Result<TfGrid> {
        TfGrid::new(self.freq.clone())
    }

    /// Convention header for dumps of functions on the plane.
    pub fn header(&self) -> serde_json::Value {
        serde_json::json!({
            "angular": true,
            "d": self.dims(),
            "L": self.half_widths(),
            "Xi": self.freq_half_widths(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum WindowKind {
    /// `e^{-|t|²/(2 width²)}`.
    Gaussian { width: f64 },
    Custom,
}

/// Nonzero analysis window sampled on the space box.
#[derive(Clone, Debug)]
pub struct Window {
    samples: SampledFunction,
    kind: WindowKind,
}

impl Window {
    pub fn gaussian(space: Arc<ProductGrid>, width: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::InvalidParameter(format!("window width {width} must be positive")));
        }
        let s = 1.0 / (2.0 * width * width);
        let samples = SampledFunction::from_real_fn(space, |t| (-s * t.iter().map(|x| x * x).sum::<f64>()).exp())?;
        Self::build(samples, WindowKind::Gaussian { width })
    }

    /// The unit Gaussian `e^{-|t|²/2}`.
    pub fn unit_gaussian(space: Arc<ProductGrid>) -> Result<Self> {
        Self::gaussian(space, 1.0)
    }

    pub fn custom(samples: SampledFunction) -> Result<Self> {
        Self::build(samples, WindowKind::Custom)
    }

    fn build(samples: SampledFunction, kind: WindowKind) -> Result<Self> {
        if samples.sup_norm() == 0.0 {
            return Err(Error::InvalidParameter("window must be nonzero".into()));
        }
        check_decay(&samples, "window")?;
        Ok(Self { samples, kind })
    }

    pub fn samples(&self) -> &SampledFunction {
        &self.samples
    }

    pub fn kind(&self) -> &WindowKind {
        &self.kind
    }

    /// `ĝ` on the frequency lattice of `tf`: exact for Gaussian windows,
    /// a quadrature DFT otherwise.
    pub fn spectrum(&self, tf: &TfGrid) -> Result<SampledFunction> {
        match self.kind {
            WindowKind::Gaussian { width } => {
                let d = tf.dims() as i32;
                let amp = (2.0 * PI * width * width).powf(d as f64 / 2.0);
                let s = width * width / 2.0;
                SampledFunction::from_real_fn(tf.freq().clone(), |w| amp * (-s * w.iter().map(|x| x * x).sum::<f64>()).exp())
            }
            WindowKind::Custom => fourier_transform(&self.samples, tf),
        }
    }
}

/// Largest edge magnitude relative to the peak.
pub fn edge_ratio(f: &SampledFunction) -> f64 {
    let peak = f.sup_norm();
    if peak == 0.0 {
        return 0.0;
    }
    let grid = f.grid();
    let edge = (0..f.len())
        .filter(|&i| grid.is_edge_node(i))
        .map(|i| f.values()[i].norm())
        .fold(0.0, f64::max);
    edge / peak
}

fn check_decay(f: &SampledFunction, what: &str) -> Result<()> {
    let r = edge_ratio(f);
    if r < EDGE_DECAY {
        Ok(())
    } else {
        Err(Error::InsufficientDecay(format!("{what} edge magnitude is {r:.3e} of its peak")))
    }
}

/// Per-axis data shared by the DFT-based transforms.
struct Lattice {
    shape: Vec<usize>,
    origin: Vec<usize>,
    /// `e^{2πi j ⌊n/2⌋ / n}` per axis, shifting output to centred frequencies.
    pre_phase: Vec<Vec<Complex64>>,
    /// `e^{-i t_0 ξ_k}` per axis.
    post_phase: Vec<Vec<Complex64>>,
    cell: f64,
}

impl Lattice {
    fn new(tf: &TfGrid) -> Self {
        let space = tf.space();
        let shape = space.shape();
        let origin = space.axes().iter().map(|a| a.origin_index().expect("checked by TfGrid")).collect();
        let pre_phase = shape
            .iter()
            .map(|&n| {
                let c = (n / 2) as f64;
                (0..n).map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 * c / n as f64)).collect()
            })
            .collect();
        let post_phase = space
            .axes()
            .iter()
            .zip(tf.freq().axes())
            .map(|(sa, fa)| {
                let t0 = sa.nodes()[0];
                fa.nodes().iter().map(|&xi| Complex64::from_polar(1.0, -t0 * xi)).collect()
            })
            .collect();
        let cell = space.axes().iter().map(|a| a.quad_weights()[0]).product();
        Self { shape, origin, pre_phase, post_phase, cell }
    }

    fn phase(table: &[Vec<Complex64>], multi: &[usize]) -> Complex64 {
        table.iter().zip(multi).map(|(t, &i)| t[i]).product()
    }
}

fn multi_of(shape: &[usize], mut flat: usize, out: &mut [usize]) {
    for k in (0..shape.len()).rev() {
        out[k] = flat % shape[k];
        flat /= shape[k];
    }
}

/// Quadrature Fourier transform onto the frequency lattice of `tf`.
pub fn fourier_transform(f: &SampledFunction, tf: &TfGrid) -> Result<SampledFunction> {
    if **f.grid() != **tf.space() {
        return Err(Error::GridMismatch);
    }
    let lat = Lattice::new(tf);
    let fft = NdFft::forward(&lat.shape);
    let mut multi = vec![0; lat.shape.len()];
    let mut buf: Vec<Complex64> = f
        .values()
        .iter()
        .enumerate()
        .map(|(j, v)| {
            multi_of(&lat.shape, j, &mut multi);
            v * Lattice::phase(&lat.pre_phase, &multi)
        })
        .collect();
    fft.process(&mut buf);
    for (k, v) in buf.iter_mut().enumerate() {
        multi_of(&lat.shape, k, &mut multi);
        *v *= Lattice::phase(&lat.post_phase, &multi) * lat.cell;
    }
    Ok(SampledFunction::from_parts_unchecked(tf.freq().clone(), buf))
}

/// `V_g f` on the time-frequency plane of `tf`, storage order `(x, ξ)`.
pub fn stft(f: &SampledFunction, g: &Window, tf: &TfGrid) -> Result<SampledFunction> {
    if **f.grid() != **tf.space() || **g.samples().grid() != **tf.space() {
        return Err(Error::GridMismatch);
    }
    let lat = Lattice::new(tf);
    let fft = NdFft::forward(&lat.shape);
    let d = lat.shape.len();
    let n_space = f.len();
    let fv = f.values();
    let gv = g.samples().values();

    let pre: Vec<Complex64> = {
        let mut multi = vec![0; d];
        (0..n_space)
            .map(|j| {
                multi_of(&lat.shape, j, &mut multi);
                fv[j] * Lattice::phase(&lat.pre_phase, &multi)
            })
            .collect()
    };
    let post: Vec<Complex64> = {
        let mut multi = vec![0; d];
        (0..n_space)
            .map(|k| {
                multi_of(&lat.shape, k, &mut multi);
                Lattice::phase(&lat.post_phase, &multi) * lat.cell
            })
            .collect()
    };

    let mut out = Vec::with_capacity(n_space * n_space);
    let mut buf = vec![Complex64::new(0.0, 0.0); n_space];
    let mut jm = vec![0; d];
    let mut mm = vec![0; d];
    for m in 0..n_space {
        multi_of(&lat.shape, m, &mut mm);
        for (j, slot) in buf.iter_mut().enumerate() {
            multi_of(&lat.shape, j, &mut jm);
            // window sample at t_j - x_m
            let mut gi = 0usize;
            let mut inside = true;
            for k in 0..d {
                let idx = jm[k] as isize - mm[k] as isize + lat.origin[k] as isize;
                if idx < 0 || idx >= lat.shape[k] as isize {
                    inside = false;
                    break;
                }
                gi = gi * lat.shape[k] + idx as usize;
            }
            *slot = if inside { pre[j] * gv[gi].conj() } else { Complex64::new(0.0, 0.0) };
        }
        fft.process(&mut buf);
        out.extend(buf.iter().zip(&post).map(|(a, b)| a * b));
    }
    Ok(SampledFunction::from_parts_unchecked(tf.plane().clone(), out))
}

/// `ℛF(x, ξ) = F(ξ, x)`: exchange the leading `split` axes with the rest.
pub fn swap(f: &SampledFunction, split: usize) -> SampledFunction {
    let grid = f.grid();
    let a: usize = grid.axes()[..split].iter().map(Axis::len).product();
    let b = f.len() / a;
    let v = f.values();
    let mut out = Vec::with_capacity(f.len());
    for j in 0..b {
        for i in 0..a {
            out.push(v[i * b + j]);
        }
    }
    SampledFunction::from_parts_unchecked(Arc::new(grid.swap_blocks(split)), out)
}

fn check_exponents(p: f64, q: f64, allow_infinite: bool) -> Result<()> {
    for e in [p, q] {
        let ok = e >= 1.0 && (allow_infinite || e.is_finite());
        if !ok {
            return Err(Error::InvalidExponent { value: e, reason: "modulation exponents must lie in [1, ∞)" });
        }
    }
    Ok(())
}

fn weighted_magnitudes(v: &SampledFunction, w: &WeightFunction) -> Result<Vec<f64>> {
    if **w.grid() != **v.grid() {
        return Err(Error::GridMismatch);
    }
    Ok(v.values().iter().zip(w.values()).map(|(a, b)| a.norm() * b).collect())
}

/// Mixed norm of an already computed `V_g f` with weight `w` on the plane;
/// space exponent `p` inside, frequency exponent `q` outside. Entries may be `∞`.
pub(crate) fn plane_norm(v: &SampledFunction, d: usize, p: f64, q: f64, w: &WeightFunction) -> Result<f64> {
    let mags = weighted_magnitudes(v, w)?;
    let mut exps = vec![p; d];
    exps.extend(std::iter::repeat_n(q, d));
    Ok(iterated_norm(v.grid(), &mags, None, &exps))
}

/// `‖f‖_{M^{p,q}_w} = (∫(∫|V_g f(x,ξ)|^p w(x,ξ)^p dx)^{q/p} dξ)^{1/q}`.
/// `w` lives on `tf.plane()`.
pub fn modulation_norm(f: &SampledFunction, g: &Window, tf: &TfGrid, p: f64, q: f64, w: &WeightFunction) -> Result<f64> {
    check_exponents(p, q, false)?;
    let v = stft(f, g, tf)?;
    plane_norm(&v, tf.dims(), p, q, w)
}

/// Modulation norm allowing `∞` exponents, as needed for conjugate spaces.
pub fn modulation_norm_extended(f: &SampledFunction, g: &Window, tf: &TfGrid, p: f64, q: f64, w: &WeightFunction) -> Result<f64> {
    check_exponents(p, q, true)?;
    let v = stft(f, g, tf)?;
    plane_norm(&v, tf.dims(), p, q, w)
}

/// Polynomial weight `v_s(x, ξ)` on the plane of `tf`.
pub fn polynomial_weight(tf: &TfGrid, s: f64) -> Result<WeightFunction> {
    WeightFunction::polynomial(tf.plane().clone(), s)
}

/// `‖f‖_{W^{p,q}_w}`: mixed norm of `ℛ(V_g f·w)` with exponents `(q,…,q,p,…,p)`.
pub fn wiener_amalgam_norm(f: &SampledFunction, g: &Window, tf: &TfGrid, p: f64, q: f64, w: &WeightFunction) -> Result<f64> {
    check_exponents(p, q, false)?;
    let d = tf.dims();
    let v = stft(f, g, tf)?;
    let vw = v.weighted(w)?;
    let r = swap(&vw, d);
    let mut exps = vec![q; d];
    exps.extend(std::iter::repeat_n(p, d));
    Ok(iterated_norm(r.grid(), &r.abs_values(), None, &exps))
}

/// Both sides of the modulus identity on the plane.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FourierSwapReport {
    pub d: usize,
    pub nodes_per_axis: Vec<usize>,
    pub half_widths: Vec<f64>,
    pub freq_half_widths: Vec<f64>,
    pub max_abs_deviation: f64,
    pub peak: f64,
    /// `max |lhs - rhs| / max |lhs|`.
    pub max_relative_deviation: f64,
    pub origin_lhs: f64,
    pub origin_rhs: f64,
    pub fhat_edge_ratio: f64,
}

/// Compare `|V_g f(x,ξ)|` with `(2π)^{-d} |V_ĝ f̂(ξ,-x)|` at every plane node.
/// `f̂` is the quadrature DFT of the samples; `ĝ` is the window's spectrum.
pub fn fourier_swap_check(f: &SampledFunction, g: &Window, tf: &TfGrid) -> Result<FourierSwapReport> {
    check_decay(f, "function")?;
    let d = tf.dims();
    let fhat = fourier_transform(f, tf)?;
    let fhat_edge_ratio = edge_ratio(&fhat);
    if fhat_edge_ratio >= EDGE_DECAY {
        return Err(Error::InsufficientDecay(format!(
            "Fourier transform edge magnitude is {fhat_edge_ratio:.3e} of its peak; refine the grid"
        )));
    }
    let ghat = Window::custom(g.spectrum(tf)?)?;
    let dual = tf.dual()?;
    // The dual lattice of the frequency lattice is the space lattice again.
    for (a, b) in dual.freq().axes().iter().zip(tf.space().axes()) {
        let (ha, hb) = (a.uniform_spacing().unwrap_or(0.0), b.uniform_spacing().unwrap_or(0.0));
        if (ha - hb).abs() > 1e-9 * hb || (a.nodes()[0] - b.nodes()[0]).abs() > 1e-9 * hb {
            return Err(Error::InvalidGrid("space axis is not centred; the dual lattice does not match".into()));
        }
    }
    let lhs = stft(f, g, tf)?;
    let rhs = stft(&fhat, &ghat, &dual)?;

    let shape = tf.space().shape();
    let origin: Vec<usize> = tf.space().axes().iter().map(|a| a.origin_index().unwrap()).collect();
    let n_space = tf.space().node_count();
    let factor = (2.0 * PI).powi(-(d as i32));
    let mut max_abs: f64 = 0.0;
    let mut peak: f64 = 0.0;
    let mut mm = vec![0; d];
    let mut neg = vec![0; d];
    for m in 0..n_space {
        multi_of(&shape, m, &mut mm);
        for k in 0..d {
            // index of -x_m on the space lattice, periodically wrapped
            let n = shape[k] as isize;
            neg[k] = ((2 * origin[k] as isize - mm[k] as isize).rem_euclid(n)) as usize;
        }
        let neg_flat = neg.iter().zip(&shape).fold(0, |acc, (&i, &n)| acc * n + i);
        for k in 0..n_space {
            let a = lhs.values()[m * n_space + k].norm();
            let b = factor * rhs.values()[k * n_space + neg_flat].norm();
            max_abs = max_abs.max((a - b).abs());
            peak = peak.max(a);
        }
    }
    let origin_flat = origin.iter().zip(&shape).fold(0, |acc, (&i, &n)| acc * n + i);
    let origin_lhs = lhs.values()[origin_flat * n_space + origin_flat].norm();
    let origin_rhs = factor * rhs.values()[origin_flat * n_space + origin_flat].norm();
    Ok(FourierSwapReport {
        d,
        nodes_per_axis: shape,
        half_widths: tf.half_widths(),
        freq_half_widths: tf.freq_half_widths(),
        max_abs_deviation: max_abs,
        peak,
        max_relative_deviation: if peak > 0.0 { max_abs / peak } else { 0.0 },
        origin_lhs,
        origin_rhs,
        fhat_edge_ratio,
    })
}

/// Wiener amalgam norm of `f` against the modulation norm of `f̂`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AmalgamReport {
    pub p: f64,
    pub q: f64,
    pub s: f64,
    pub wiener_norm: f64,
    pub modulation_norm_of_transform: f64,
    pub ratio: f64,
    pub band: (f64, f64),
    pub within_band: bool,
}

/// `‖f‖_{W^{p,q}_{v_s}}` versus `‖f̂‖_{M^{q,p}_{v_s}}`, the transform analysed
/// with window `ĝ`. `v_s` is even, so `w₀(ξ,-x) = w(x,ξ)` is `v_s` again.
pub fn amalgam_fourier_ratio(f: &SampledFunction, g: &Window, tf: &TfGrid, p: f64, q: f64, s: f64) -> Result<AmalgamReport> {
    let w = polynomial_weight(tf, s)?;
    let wiener_norm = wiener_amalgam_norm(f, g, tf, p, q, &w)?;
    let dual = tf.dual()?;
    let fhat = fourier_transform(f, tf)?;
    let fhat = SampledFunction::new(dual.space().clone(), fhat.into_values())?;
    let ghat = Window::custom(SampledFunction::new(dual.space().clone(), g.spectrum(tf)?.into_values())?)?;
    let w0 = polynomial_weight(&dual, s)?;
    let m = modulation_norm(&fhat, &ghat, &dual, q, p, &w0)?;
    let ratio = wiener_norm / m;
    let band = WM_EQUIVALENCE_BAND;
    Ok(AmalgamReport {
        p,
        q,
        s,
        wiener_norm,
        modulation_norm_of_transform: m,
        ratio,
        band,
        within_band: ratio >= band.0 && ratio <= band.1,
    })
}

/// `‖V_g f‖_{L²}` via the plane quadrature.
pub fn stft_l2_norm(f: &SampledFunction, g: &Window, tf: &TfGrid) -> Result<f64> {
    let w = WeightFunction::unit(tf.plane().clone());
    modulation_norm(f, g, tf, 2.0, 2.0, &w)
}

/// Conjugate exponent pair for the dual modulation space.
pub fn dual_pair(p: f64, q: f64) -> (f64, f64) {
    (conjugate(p), conjugate(q))
}
