//! Independent reference computations for derived quantities.

use std::f64::consts::PI;

use fraccal::dnmap::multiplier_norm;
use fraccal::forms::ConductivityField;
use fraccal::fracops::{bessel_norm, cns_constant, cns_constant_log, dual_norm, gram_matrix};
use fraccal::geometry::{build_grid, DomainConfig, GeometryMode, GridDomain, ShapeSpec};
use fraccal::stability::{
    check_partial_reduction, reduction_envelope, stability_sweep, FieldSpec, SweepConfig, SweepContext,
};
use nalgebra::{Cholesky, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use statrs::function::gamma::gamma;

fn interval(lo: f64, hi: f64) -> ShapeSpec {
    ShapeSpec::Interval { lo, hi }
}

fn line(cells: usize) -> DomainConfig {
    DomainConfig {
        n: 1,
        half_width: 4.0,
        h: 8.0 / cells as f64,
        omega: interval(-1.0, 1.0),
        w1: interval(1.5, 2.5),
        w2: Some(interval(-2.5, -1.5)),
        w: None,
        sigma: None,
        mode: GeometryMode::ExteriorAgreement,
    }
}

fn compact_difference(cells: usize) -> DomainConfig {
    DomainConfig {
        w1: interval(-3.2, -2.5),
        w2: Some(interval(-2.3, -1.6)),
        w: Some(interval(-3.4, -1.4)),
        sigma: Some(interval(1.4, 2.2)),
        mode: GeometryMode::CompactDifference,
        ..line(cells)
    }
}

/// `int_{R^n} (1 - cos y_1) |y|^{-n-2s} dy` via the Gaussian subordination
/// `|y|^{-a} = Gamma(a/2)^{-1} int tau^{a/2-1} e^{-tau |y|^2} dtau`, which
/// leaves `pi^{n/2} / Gamma(n/2+s) int tau^{s-1} (1 - e^{-1/(4 tau)}) dtau`.
fn hypersingular_integral(n: usize, s: f64) -> f64 {
    let nf = n as f64;
    // tau = e^u; trapezoid on a smooth, doubly exponentially decaying integrand
    let (lo, hi, step) = (-60.0 / s, 60.0 / (1.0 - s), 1e-3);
    let steps = ((hi - lo) / step) as usize;
    let f = |u: f64| (s * u).exp() * -(-(-u).exp() / 4.0).exp_m1();
    let sum: f64 = (0..=steps).map(|k| f(lo + k as f64 * step)).sum();
    PI.powf(nf / 2.0) / gamma(nf / 2.0 + s) * sum * step
}

#[test]
fn cns_normalizes_the_symbol() {
    for n in [1, 2] {
        for s in [0.1, 0.25, 0.4, 0.49] {
            let c = cns_constant(n, s).unwrap();
            let prod = c * hypersingular_integral(n, s);
            assert!((prod - 1.0).abs() < 1e-6, "n={n} s={s}: C*I = {prod}");
            assert!((cns_constant_log(n, s).unwrap() / c - 1.0).abs() < 1e-12);
        }
    }
    for s in [0.6, 0.9] {
        let prod = cns_constant(2, s).unwrap() * hypersingular_integral(2, s);
        assert!((prod - 1.0).abs() < 1e-6, "n=2 s={s}: C*I = {prod}");
    }
}

/// Naive DFT on a 4x zero-padded line: approximates the whole-line Bessel
/// norm independently of the box FFT.
fn padded_bessel_norm(u: &[f64], h: f64, t: f64, p: f64) -> f64 {
    let len = 4 * u.len();
    let mut re = vec![0.0; len];
    let mut im = vec![0.0; len];
    for j in 0..len {
        for (k, &x) in u.iter().enumerate() {
            let a = -2.0 * PI * (j * k % len) as f64 / len as f64;
            re[j] += x * a.cos();
            im[j] += x * a.sin();
        }
        let jj = if j <= len / 2 { j as f64 } else { j as f64 - len as f64 };
        let xi = 2.0 * PI * jj / (len as f64 * h);
        let m = (1.0 + xi * xi).powf(t / 2.0);
        re[j] *= m;
        im[j] *= m;
    }
    let mut sum = 0.0;
    for k in 0..len {
        let mut v = 0.0;
        for j in 0..len {
            let a = 2.0 * PI * (j * k % len) as f64 / len as f64;
            v += re[j] * a.cos() - im[j] * a.sin();
        }
        sum += (v / len as f64).abs().powf(p);
    }
    (h * sum).powf(1.0 / p)
}

#[test]
fn bessel_norm_matches_padded_dft() {
    let d: GridDomain<f64> = build_grid(&line(128)).unwrap();
    let u: Vec<f64> = FieldSpec::bump(vec![0.3], 1.0, 1.0).sample(&d);
    let ours = bessel_norm(&d, &u, 0.6, 4.0).unwrap();
    let oracle = padded_bessel_norm(&u, d.spacing(), 0.6, 4.0);
    assert!((ours / oracle - 1.0).abs() < 0.02, "{ours} vs {oracle}");
}

#[test]
fn dual_norm_matches_random_search() {
    let d: GridDomain<f64> = build_grid(&line(64)).unwrap();
    let nodes = &d.w1()[..5];
    let g = gram_matrix(&d, nodes, 0.25).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let p = DVector::from_fn(5, |_, _| rng.random_range(-1.0..1.0));
    let exact = dual_norm(&p, &g).unwrap();
    let mut best: f64 = 0.0;
    for _ in 0..100_000 {
        let v = DVector::from_fn(5, |_, _| rng.sample::<f64, _>(StandardNormal));
        best = best.max(p.dot(&v).abs() / v.dot(&(g.gram() * &v)).sqrt());
    }
    assert!(best <= exact * (1.0 + 1e-12), "search {best} exceeds {exact}");
    assert!(best >= 0.98 * exact, "search {best} vs {exact}");
}

#[test]
fn multiplier_norm_matches_generalized_eigenvalue() {
    let d: GridDomain<f64> = build_grid(&line(32)).unwrap();
    let window = d.w1().to_vec();
    let g = gram_matrix(&d, &window, 0.25).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut q = vec![0.0; d.node_count()];
    for &i in &window {
        q[i] = rng.random_range(-1.0..1.0);
    }
    let vol = d.cell_volume();
    let found = multiplier_norm(&q, &window, &g, vol, 11).unwrap();

    let l = Cholesky::new(g.gram().clone()).unwrap().l();
    let linv = l.clone().try_inverse().unwrap();
    let dmat = DMatrix::from_diagonal(&DVector::from_iterator(window.len(), window.iter().map(|&i| vol * q[i])));
    let c = &linv * dmat * linv.transpose();
    let top = c.symmetric_eigenvalues().iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    assert!((found.value / top - 1.0).abs() < 1e-6, "{} vs {top}", found.value);

    // the returned pair attains the value
    let w = DVector::from_iterator(window.len(), window.iter().map(|&i| vol * q[i]));
    let attained = w.component_mul(&found.u1).dot(&found.u2).abs()
        / (g.quadratic(&found.u1).sqrt() * g.quadratic(&found.u2).sqrt());
    assert!((attained / found.value - 1.0).abs() < 1e-10);
}

fn sweep(mode: GeometryMode, profile: FieldSpec, amplitudes: Vec<f64>) -> SweepConfig {
    SweepConfig {
        mode,
        amplitudes,
        base: FieldSpec::constant(1.0),
        profile,
        gamma0: 0.5,
        regularity_eps: 0.1,
        c1: 10.0,
        theta0: 0.5,
        p: 2.0,
        s_prime: 0.2,
    }
}

#[test]
fn distances_are_homogeneous_at_small_amplitude() {
    let ctx = SweepContext::<f64>::new(build_grid(&line(128)).unwrap(), 0.25).unwrap();
    let amps: Vec<f64> = (1..=6).map(|k| 2f64.powi(-k)).collect();
    let recs =
        stability_sweep(&ctx, &sweep(GeometryMode::ExteriorAgreement, FieldSpec::bump(vec![0.0], 0.9, 1.0), amps))
            .unwrap();
    let (a, b) = (&recs[0], &recs[1]);
    assert_eq!(b.eps, 2.0 * a.eps);
    for (x, y) in [(a.d_hs, b.d_hs), (a.d_lp, b.d_lp), (a.delta, b.delta)] {
        let ratio = y / x;
        assert!((1.8..=2.2).contains(&ratio), "ratio {ratio}");
    }
}

#[test]
fn partial_reduction_two_ways_and_family_envelope() {
    let d: GridDomain<f64> = build_grid(&compact_difference(128)).unwrap();
    let ctx = SweepContext::new(d, 0.25).unwrap();
    let n = ctx.domain.node_count();
    let one = ConductivityField::constant(n, 1.0, 0.5).unwrap();
    let profile: Vec<f64> = FieldSpec::bump(vec![1.8], 0.35, 1.0).sample(&ctx.domain);
    let mut samples = Vec::new();
    let mut last = 0.0;
    for k in 1..=6 {
        let eps = 2f64.powi(-k);
        let g: Vec<f64> = profile.iter().map(|&p| 1.0 + eps * p).collect();
        let gamma = ConductivityField::new(g, 0.5).unwrap();
        let r = check_partial_reduction(&ctx, &one, &gamma, 0.5).unwrap();
        assert!(r.lhs > 0.0 && r.delta_w > 0.0);
        assert!((r.lhs_via_conductivity / r.lhs - 1.0).abs() < 0.02, "{} vs {}", r.lhs_via_conductivity, r.lhs);
        if k > 1 {
            assert!(r.lhs < last, "lhs should shrink with the amplitude");
        }
        last = r.lhs;
        samples.push((r.lhs, r.rhs));
    }
    // the constant is set by the largest amplitudes and does not grow as
    // the perturbation shrinks
    let c_all = reduction_envelope(&samples).unwrap();
    assert!(c_all.is_finite() && c_all > 0.0);
    for pair in samples.windows(2) {
        assert!(pair[1].0 / pair[1].1 <= pair[0].0 / pair[0].1 * 1.1);
    }
}
