use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nuclear_trace::experiment::random_representation;
use nuclear_trace::grid::{box_partition, Axis, ProductGrid, SampledFunction, WeightFunction};
use nuclear_trace::mixed_norm::{self, ExponentTuple, WeightConvention};
use nuclear_trace::nuclear::{NormDescriptor, NuclearRepresentation};
use nuclear_trace::timefreq::{self, TfGrid, Window};
use nuclear_trace::torus::{self, FrequencyCutoff, Multiplier, ToroidalSymbol};
use nuclear_trace::variable_exponent::{self, VariableExponent};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn grid2(r: &mut ChaCha8Rng) -> Arc<ProductGrid> {
    let a = Axis::uniform(0.0, r.gen_range(0.5..2.0), r.gen_range(2..12)).unwrap();
    let b = Axis::uniform(-1.0, r.gen_range(0.0..2.0), r.gen_range(2..12)).unwrap();
    Arc::new(ProductGrid::new(vec![a, b]).unwrap())
}

fn random_fn(r: &mut ChaCha8Rng, grid: &Arc<ProductGrid>) -> SampledFunction {
    let v = (0..grid.node_count()).map(|_| Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect();
    SampledFunction::new(grid.clone(), v).unwrap()
}

fn random_weight(r: &mut ChaCha8Rng, grid: &Arc<ProductGrid>) -> WeightFunction {
    let v = (0..grid.node_count()).map(|_| r.gen_range(0.2..5.0)).collect();
    WeightFunction::new(grid.clone(), v).unwrap()
}

fn random_tuple(r: &mut ChaCha8Rng, dims: usize) -> ExponentTuple {
    ExponentTuple::new((0..dims).map(|_| r.gen_range(1.0..6.0)).collect()).unwrap()
}

fn random_exponent(r: &mut ChaCha8Rng, grid: &Arc<ProductGrid>) -> VariableExponent {
    let v = (0..grid.node_count()).map(|_| r.gen_range(1.0..5.0)).collect();
    VariableExponent::new(grid.clone(), v).unwrap()
}

fn convention(flag: bool) -> WeightConvention {
    if flag {
        WeightConvention::Density
    } else {
        WeightConvention::Pointwise
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mixed_norm_is_a_norm(seed in any::<u64>(), re in -3.0f64..3.0, im in -3.0f64..3.0, density in any::<bool>()) {
        let mut r = rng(seed);
        let grid = grid2(&mut r);
        let (f, g) = (random_fn(&mut r, &grid), random_fn(&mut r, &grid));
        let w = random_weight(&mut r, &grid);
        let p = random_tuple(&mut r, 2);
        let conv = convention(density);
        let n = |h: &SampledFunction| mixed_norm::mixed_norm(h, &p, &w, conv).unwrap();
        let c = Complex64::new(re, im);
        prop_assert!((n(&f.scale(c)) - c.norm() * n(&f)).abs() <= 1e-12 * (1.0 + c.norm() * n(&f)));
        prop_assert!(n(&f.add(&g).unwrap()) <= (n(&f) + n(&g)) * (1.0 + 1e-12));
        // |f| ≤ |h| pointwise
        let bigger = SampledFunction::new(grid.clone(), f.values().iter().map(|z| z * (1.0 + r.gen_range(0.0..1.0))).collect()).unwrap();
        prop_assert!(n(&f) <= n(&bigger) * (1.0 + 1e-12));
        prop_assert_eq!(n(&SampledFunction::zeros(grid.clone())), 0.0);
    }

    #[test]
    fn mixed_norm_factorizes_on_tensor_products(seed in any::<u64>()) {
        let mut r = rng(seed);
        let grid = grid2(&mut r);
        let (ax, ay) = (grid.axis(0).clone(), grid.axis(1).clone());
        let a: Vec<f64> = (0..ax.len()).map(|_| r.gen_range(-2.0..2.0)).collect();
        let b: Vec<f64> = (0..ay.len()).map(|_| r.gen_range(-2.0..2.0)).collect();
        let f = SampledFunction::from_real(grid.clone(), a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()).unwrap();
        let p = random_tuple(&mut r, 2);
        let fa = SampledFunction::from_real(Arc::new(ProductGrid::single(ax)), a).unwrap();
        let fb = SampledFunction::from_real(Arc::new(ProductGrid::single(ay)), b).unwrap();
        let lhs = mixed_norm::mixed_norm_unweighted(&f, &p).unwrap();
        let rhs = variable_exponent::lp_norm(&fa, p.entries()[0]) * variable_exponent::lp_norm(&fb, p.entries()[1]);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs);
    }

    #[test]
    fn swapping_axes_obeys_minkowski(seed in any::<u64>()) {
        let mut r = rng(seed);
        let grid = grid2(&mut r);
        let f = random_fn(&mut r, &grid);
        let (lo, hi) = (r.gen_range(1.0..3.0), r.gen_range(3.0..8.0));
        let s = timefreq::swap(&f, 1);
        let back = timefreq::swap(&s, 1);
        prop_assert_eq!(back.values(), f.values());
        let same = ExponentTuple::uniform(lo, 2).unwrap();
        let a = mixed_norm::mixed_norm_unweighted(&f, &same).unwrap();
        let b = mixed_norm::mixed_norm_unweighted(&s, &same).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a);
        // larger exponent outside gives the smaller norm
        let inner_small = mixed_norm::mixed_norm_unweighted(&f, &ExponentTuple::new(vec![lo, hi]).unwrap()).unwrap();
        let inner_large = mixed_norm::mixed_norm_unweighted(&s, &ExponentTuple::new(vec![hi, lo]).unwrap()).unwrap();
        prop_assert!(inner_small <= inner_large * (1.0 + 1e-12));
    }

    #[test]
    fn luxemburg_norm_is_a_norm_and_brackets_the_modular(seed in any::<u64>(), c in 0.01f64..100.0) {
        let mut r = rng(seed);
        let grid = grid2(&mut r);
        let (f, g) = (random_fn(&mut r, &grid), random_fn(&mut r, &grid));
        let f = f.scale(Complex64::new(c, 0.0));
        let p = random_exponent(&mut r, &grid);
        let n = |h: &SampledFunction| variable_exponent::luxemburg_norm(h, &p).unwrap();
        let nf = n(&f);
        prop_assert!((n(&f.scale(Complex64::new(0.0, -2.5))) - 2.5 * nf).abs() <= 1e-10 * nf);
        prop_assert!(n(&f.add(&g).unwrap()) <= (nf + n(&g)) * (1.0 + 1e-10));
        let unit = variable_exponent::modular(&f.scale(Complex64::new(1.0 / nf, 0.0)), &p).unwrap();
        prop_assert!((unit - 1.0).abs() <= 1e-8);
        let rho = variable_exponent::modular(&f, &p).unwrap();
        let (a, b) = (rho.powf(1.0 / p.p_minus()), rho.powf(1.0 / p.p_plus()));
        prop_assert!(nf >= a.min(b) * (1.0 - 1e-10) && nf <= a.max(b) * (1.0 + 1e-10));
        prop_assert_eq!(rho <= 1.0, nf <= 1.0 + 1e-12);
    }

    #[test]
    fn conditional_expectations_contract_and_are_idempotent(seed in any::<u64>(), density in any::<bool>()) {
        let mut r = rng(seed);
        let axes = (0..2).map(|_| Axis::uniform(0.0, 1.0, 1 << r.gen_range(1..5)).unwrap()).collect();
        let grid = Arc::new(ProductGrid::new(axes).unwrap());
        let counts: Vec<usize> = grid.shape().iter().map(|&n| n >> r.gen_range(0..2)).collect();
        let part = box_partition(&grid, &counts).unwrap();
        let f = random_fn(&mut r, &grid);
        let vals: Vec<f64> = (0..part.len()).map(|_| r.gen_range(0.1..10.0)).collect();
        let w = WeightFunction::box_constant(grid.clone(), &part, &vals).unwrap();
        let p = random_tuple(&mut r, 2);
        let conv = convention(density);
        let pf = mixed_norm::map_projection(&f, &part, &w).unwrap();
        let ppf = mixed_norm::map_projection(&pf, &part, &w).unwrap();
        for (a, b) in pf.values().iter().zip(ppf.values()) {
            prop_assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
        }
        let n = |h: &SampledFunction| mixed_norm::mixed_norm(h, &p, &w, conv).unwrap();
        prop_assert!(n(&pf) <= n(&f) * (1.0 + 1e-12));

        let pv: Vec<f64> = (0..part.len()).map(|_| r.gen_range(1.0..5.0)).collect();
        let pe = VariableExponent::box_constant(grid.clone(), &part, &pv).unwrap();
        let qf = variable_exponent::map_projection_ve(&f, &pe, &part).unwrap();
        prop_assert!(variable_exponent::luxemburg_norm(&qf, &pe).unwrap() <= variable_exponent::luxemburg_norm(&f, &pe).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn nuclear_traces_agree_and_quasinorm_is_additive(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_representation(&mut r, 6, 40).unwrap();
        let grid = a.source_grid().clone();
        let mut b = NuclearRepresentation::square(grid.clone(), a.order()).unwrap();
        for _ in 0..r.gen_range(1..4) {
            b.push(random_fn(&mut r, &grid), random_fn(&mut r, &grid)).unwrap();
        }
        let l2 = NormDescriptor::lebesgue(grid.clone(), ExponentTuple::uniform(2.0, grid.dims()).unwrap());
        let a = a.with_source(l2.clone()).with_target(l2.clone());
        let b = b.with_source(l2.clone()).with_target(l2);
        let ab = a.concat(&b).unwrap();

        let t = |x: &NuclearRepresentation| x.trace_by_pairing().unwrap();
        let scale = 1.0 + t(&a).norm() + t(&b).norm();
        prop_assert!((t(&ab) - t(&a) - t(&b)).norm() <= 1e-12 * scale);
        prop_assert!((ab.trace_by_kernel_diagonal().unwrap() - t(&ab)).norm() <= 1e-12 * scale);
        let eig = ab.trace_by_eigenvalues(4096).unwrap();
        prop_assert!((eig.matrix_trace - t(&ab)).norm() <= 1e-12 * scale);
        prop_assert!((eig.eigenvalue_sum - t(&ab)).norm() <= 1e-8 * scale);

        let q = |x: &NuclearRepresentation| x.quasinorm().unwrap().total;
        prop_assert!((q(&ab) - q(&a) - q(&b)).abs() <= 1e-12 * q(&ab));
    }

    #[test]
    fn merging_terms_does_not_increase_quasinorm(seed in any::<u64>(), order in 0.1f64..1.0) {
        let mut r = rng(seed);
        let grid = grid2(&mut r);
        let (g, h1, h2) = (random_fn(&mut r, &grid), random_fn(&mut r, &grid), random_fn(&mut r, &grid));
        let l3 = NormDescriptor::lebesgue(grid.clone(), ExponentTuple::uniform(3.0, 2).unwrap());
        let split = NuclearRepresentation::from_pairs(grid.clone(), order, vec![(g.clone(), h1.clone()), (g.clone(), h2.clone())])
            .unwrap()
            .with_source(l3.clone())
            .with_target(l3.clone());
        let merged = NuclearRepresentation::from_pairs(grid.clone(), order, vec![(g, h1.add(&h2).unwrap())])
            .unwrap()
            .with_source(l3.clone())
            .with_target(l3);
        prop_assert!(merged.quasinorm().unwrap().total <= split.quasinorm().unwrap().total * (1.0 + 1e-12));
        // same operator, same trace
        prop_assert!((merged.trace_by_pairing().unwrap() - split.trace_by_pairing().unwrap()).norm() <= 1e-12 * (1.0 + split.trace_by_pairing().unwrap().norm()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn stft_is_linear(seed in any::<u64>(), re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let mut r = rng(seed);
        let tf = TfGrid::centered(1, 8.0, 32).unwrap();
        let space = tf.space().clone();
        let g = Window::unit_gaussian(space.clone()).unwrap();
        let bump = |c: f64| move |x: &[f64]| (-(x[0] - c) * (x[0] - c)).exp();
        let f1 = SampledFunction::from_real_fn(space.clone(), bump(r.gen_range(-2.0..2.0))).unwrap();
        let f2 = SampledFunction::from_real_fn(space.clone(), bump(r.gen_range(-2.0..2.0))).unwrap();
        let c = Complex64::new(re, im);
        let lhs = timefreq::stft(&f1.scale(c).add(&f2).unwrap(), &g, &tf).unwrap();
        let v1 = timefreq::stft(&f1, &g, &tf).unwrap();
        let v2 = timefreq::stft(&f2, &g, &tf).unwrap();
        for ((a, b), d) in lhs.values().iter().zip(v1.values()).zip(v2.values()) {
            prop_assert!((a - (c * b + d)).norm() <= 1e-12 * (1.0 + c.norm()));
        }
    }

    #[test]
    fn modulation_norm_grows_with_weight_order(seed in any::<u64>(), s in 0.0f64..2.0, ds in 0.0f64..2.0) {
        let mut r = rng(seed);
        let tf = TfGrid::centered(1, 10.0, 32).unwrap();
        let space = tf.space().clone();
        let c = r.gen_range(-1.0..1.0);
        let f = SampledFunction::from_real_fn(space.clone(), |x| (-(x[0] - c) * (x[0] - c) / 2.0).exp()).unwrap();
        let g = Window::unit_gaussian(space).unwrap();
        let (p, q) = (r.gen_range(1.0..4.0), r.gen_range(1.0..4.0));
        let lo = timefreq::modulation_norm(&f, &g, &tf, p, q, &timefreq::polynomial_weight(&tf, s).unwrap()).unwrap();
        let hi = timefreq::modulation_norm(&f, &g, &tf, p, q, &timefreq::polynomial_weight(&tf, s + ds).unwrap()).unwrap();
        prop_assert!(lo <= hi * (1.0 + 1e-12));
    }

    #[test]
    fn torus_matrix_matches_direct_application(seed in any::<u64>(), n in 2usize..10, tau in 0.5f64..3.0) {
        let mut r = rng(seed);
        let cutoff = FrequencyCutoff::new(1, n).unwrap();
        let grid = Arc::new(ProductGrid::unit_torus(1, 4 * n + 4).unwrap());
        // trigonometric polynomials of degree ≤ n
        let trig = |r: &mut ChaCha8Rng| {
            let coeffs: Vec<Complex64> = (0..=2 * n).map(|_| Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect();
            SampledFunction::from_fn(grid.clone(), |x| {
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (k as f64 - n as f64) * x[0]))
                    .sum()
            })
            .unwrap()
        };
        let alpha = trig(&mut r);
        let f = trig(&mut r);
        let m = Multiplier::Bessel(torus::bessel_symbol(tau, 1).unwrap());
        let mat = torus::assemble_matrix(&alpha, &m, &cutoff).unwrap();
        let fhat = nalgebra::DVector::from_vec(torus::fourier_coefficients(&f, &cutoff).unwrap());
        let via_matrix = &mat * fhat;
        let sym = ToroidalSymbol::Separable { alpha, multiplier: m };
        let direct = torus::fourier_coefficients(&torus::toroidal_apply(&sym, &f, &cutoff).unwrap(), &cutoff).unwrap();
        for (a, b) in via_matrix.iter().zip(&direct) {
            prop_assert!((a - b).norm() <= 1e-12 * (1.0 + b.norm()), "{} vs {}", a, b);
        }
    }
}

/// Apply a nuclear representation through its dense kernel quadrature.
#[test]
fn representation_matches_dense_kernel() {
    let mut r = rng(11);
    for _ in 0..20 {
        let rep = random_representation(&mut r, 8, 64).unwrap();
        let grid = rep.source_grid().clone();
        let f = random_fn(&mut r, &grid);
        let k = rep.kernel();
        let n = grid.node_count();
        let q = grid.quad_weights();
        let applied = rep.apply(&f).unwrap();
        for i in 0..n {
            let direct: Complex64 = (0..n).map(|j| k.values()[i * n + j] * f.values()[j] * q[j]).sum();
            assert!((direct - applied.values()[i]).norm() <= 1e-12 * (1.0 + direct.norm()));
        }
        let diag: Complex64 = (0..n).map(|i| k.values()[i * n + i] * q[i]).sum();
        assert!((diag - rep.trace_by_pairing().unwrap()).norm() <= 1e-12 * (1.0 + diag.norm()));
    }
}
