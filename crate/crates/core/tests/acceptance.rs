//! Acceptance suite: one test per release criterion, each printing a
//! pass/fail line with its runtime (visible with `--nocapture`).
//!
//! Criteria:
//! 1. kernel contracts (normalization, compact support, Lipschitz scale)
//! 2. Fejer closed form vs averaged Dirichlet sums
//! 3. doubling-chain stationarity (KS against U[0,1])
//! 4. moment inequality over the process/order/size grid
//! 5. pointwise L2 slope for the Gaussian linear process
//! 6. Fejer first-harmonic damping law
//! 7. rate and bandwidth formula examples
//! 8. byte-identical CSV across worker counts

use std::time::Instant;

use weakdens::dependence::verify_moment_inequality;
use weakdens::dependence::{Coefficient, Decay, DependenceBound};
use weakdens::estimators::{
    estimate_at, fejer_dirichlet_average, fejer_eval, KernelFamily, NORMALIZATION_PANELS,
};
use weakdens::harness::{csv_string, parse_config, run_experiment};
use weakdens::processes::{DoublingX0, InnovationSpec, ProcessSpec};
use weakdens::rates::{optimal_bandwidth, q0_of, rate_exponent, RateParams, Theorem};

const PI: f64 = std::f64::consts::PI;

fn pass(criterion: u32, start: Instant, detail: &str) {
    println!("[criterion {criterion}] PASS ({:.2}s) {detail}", start.elapsed().as_secs_f64());
}

#[test]
fn criterion_1_kernel_contracts() {
    let start = Instant::now();
    let families = [
        KernelFamily::compact(2).unwrap(),
        KernelFamily::compact(4).unwrap(),
        KernelFamily::fejer(),
        KernelFamily::haar(),
    ];
    let ms: Vec<u32> = (0..=8).map(|k| 1u32 << k).collect();
    let points = [-0.7, -0.1, 0.0, 0.33, 1.2];

    // Contract (c): unit normalization for every family and bandwidth.
    for fam in &families {
        for &m in &ms {
            for &x in &points {
                let mass = fam.normalization(m, x, NORMALIZATION_PANELS);
                assert!(
                    (mass - 1.0).abs() < 1e-6,
                    "criterion 1: {} m={m} x={x}: mass {mass}",
                    fam.kind
                );
            }
        }
    }

    // Contract (a): compactly supported kernels ignore data beyond
    // support_radius / m.
    for order in [2u32, 4] {
        let fam = KernelFamily::compact(order).unwrap();
        for &m in &ms {
            let x = 0.4;
            let eps = 1e-9;
            let r = fam.support_radius / m as f64;
            assert_eq!(fam.eval_m(m, x, x + r + eps), 0.0);
            assert_eq!(fam.eval_m(m, x, x - r - eps), 0.0);
            let near = weakdens::processes::Path::new(vec![x], 0, "t");
            let padded =
                weakdens::processes::Path::new(vec![x, x + r + 0.01, x - 2.0 * r, 100.0], 0, "t");
            let a = estimate_at(&near, &fam, m, x).value;
            let b = estimate_at(&padded, &fam, m, x).value;
            assert!((b - a / 4.0).abs() < 1e-12, "criterion 1: far points contributed at m={m}");
        }
    }

    // Contract (b): finite-difference slope within lipschitz_scale * m^2
    // (5% sampling headroom); Haar is exempt (documented non-Lipschitz).
    for fam in [
        KernelFamily::compact(2).unwrap(),
        KernelFamily::compact(4).unwrap(),
        KernelFamily::fejer(),
    ] {
        let scale = fam.lipschitz_scale.unwrap();
        for m in 1..=256u32 {
            let y = 0.17;
            let (lo, hi) = fam.support_interval(m, y);
            let steps = 2000;
            let h = (hi - lo) / steps as f64;
            let mut worst: f64 = 0.0;
            let mut prev = fam.eval_m(m, lo, y);
            for i in 1..=steps {
                let v = fam.eval_m(m, lo + i as f64 * h, y);
                worst = worst.max((v - prev).abs() / h);
                prev = v;
            }
            let bound = scale * (m as f64).powi(2) * 1.05;
            assert!(worst <= bound, "criterion 1: {} m={m}: slope {worst} > {bound}", fam.kind);
        }
    }
    pass(1, start, "normalization 1e-6, compact support, Lipschitz scale");
}

#[test]
fn criterion_2_fejer_dirichlet_identity() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for m in 1..=32u32 {
        for i in 0..1000 {
            let u = -PI + 2.0 * PI * (i as f64 + 0.5) / 1000.0;
            let diff = (fejer_eval(m, u) - fejer_dirichlet_average(m, u)).abs();
            worst = worst.max(diff);
        }
    }
    assert!(worst < 1e-10, "criterion 2: max deviation {worst}");
    pass(2, start, &format!("max |closed - averaged| = {worst:.2e} over 1000 points, m <= 32"));
}

#[test]
fn criterion_3_doubling_chain_stationarity() {
    let start = Instant::now();
    let spec = ProcessSpec::doubling(DoublingX0::Random).unwrap();
    let n = 100_000usize;
    let bound = 1.95 / (n as f64).sqrt();
    let mut worst: f64 = 0.0;
    for seed in 0..5u64 {
        let path = spec.simulate(n, seed).unwrap();
        let ks = ks_distance_from_uniform(&path.values);
        worst = worst.max(ks);
        assert!(ks < bound, "criterion 3: seed {seed}: KS {ks} >= {bound}");
    }
    pass(
        3,
        start,
        &format!("worst sqrt(n)*KS = {:.3} < 1.95 over 5 seeds", worst * (n as f64).sqrt()),
    );
}

#[test]
fn criterion_4_moment_inequality_grid() {
    let start = Instant::now();
    let kernel = KernelFamily::compact(2).unwrap();
    let processes = [
        (ProcessSpec::doubling(DoublingX0::Random).unwrap(), 0.5),
        (ProcessSpec::linear_gaussian_preset(), 0.0),
        (ProcessSpec::iid(InnovationSpec::Uniform { lo: 0.0, hi: 1.0 }).unwrap(), 0.5),
    ];
    let mut runs = 0;
    for (spec, x) in &processes {
        for q in [2u32, 4] {
            for n in [16usize, 32, 64] {
                for m in [2u32, 8] {
                    for seed in [1u64, 2, 3] {
                        let report =
                            verify_moment_inequality(spec, *x, &kernel, m, q, n, 5000, seed)
                                .unwrap();
                        assert!(
                            report.holds,
                            "criterion 4: {spec} q={q} n={n} m={m} seed={seed}: \
                             lhs {:.3e} > rhs {:.3e} * 1.25",
                            report.lhs, report.rhs
                        );
                        runs += 1;
                    }
                }
            }
        }
    }
    pass(4, start, &format!("{runs} configurations hold at slack 0.25"));
}

#[test]
fn criterion_5_pointwise_rate_slope() {
    let start = Instant::now();
    // Gaussian linear process, order-2 kernel, m = round(n^(1/5)),
    // n = 2^9..2^15, 500 replicates, pointwise L2 at x = 0. Target slope
    // -0.4 within [-0.50, -0.30].
    let config = parse_config(
        "[process]\n\
         preset = linear-gaussian\n\
         \n\
         [estimator]\n\
         kind = compact\n\
         order = 2\n\
         \n\
         [bandwidth]\n\
         rule = power\n\
         c = 1\n\
         exponent = 0.2\n\
         \n\
         [experiment]\n\
         n_grid = geometric(512, 2, 7)\n\
         replicates = 500\n\
         metric = pointwise_lq\n\
         x = 0\n\
         q = 2\n\
         seed = 42\n\
         expected_exponent = 0.4\n\
         slope_tol = 0.1\n",
    )
    .unwrap();
    let result = run_experiment(&config).unwrap();
    assert!(
        (-0.50..=-0.30).contains(&result.fitted_slope),
        "criterion 5: slope {} outside [-0.50, -0.30]",
        result.fitted_slope
    );
    assert_eq!(result.verdict, Some(true));
    pass(
        5,
        start,
        &format!(
            "fitted slope {:.4} (CI [{:.4}, {:.4}]) vs -0.40",
            result.fitted_slope, result.slope_ci.0, result.slope_ci.1
        ),
    );
}

#[test]
fn criterion_6_fejer_bias_law() {
    let start = Instant::now();
    // f(t) = (1 + cos t)/(2 pi): the Fejer mean damps the first harmonic
    // by (1 - 1/m), so E f_hat(0) = (2 - 1/m)/(2 pi).
    let spec = ProcessSpec::iid(InnovationSpec::RaisedCosine).unwrap();
    let n = 100_000usize;
    let path = spec.simulate(n, 6).unwrap();
    for m in [2u32, 4, 8] {
        let expected = (2.0 - 1.0 / m as f64) / (2.0 * PI);
        let terms: Vec<f64> = path.values.iter().map(|&x| fejer_eval(m, -x) / (2.0 * PI)).collect();
        let mean = terms.iter().sum::<f64>() / n as f64;
        let sd = (terms.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0)).sqrt();
        let se = sd / (n as f64).sqrt();
        assert!(
            (mean - expected).abs() < 3.0 * se,
            "criterion 6: m={m}: mean {mean:.6} vs {expected:.6} (se {se:.2e})"
        );
    }
    pass(6, start, "E f_hat(0) = (2 - 1/m)/(2 pi) within 3 s.e. for m in {2,4,8}");
}

#[test]
fn criterion_7_rate_formula_suite() {
    let start = Instant::now();

    assert_eq!(q0_of(5.0).unwrap(), 4);
    assert_eq!(q0_of(4.0).unwrap(), 4);
    assert_eq!(q0_of(2.5).unwrap(), 2);

    let geometric =
        DependenceBound::new(Coefficient::Eta, Decay::Geometric { a: 1.0, b: 1.0 }, 1.0).unwrap();
    let t1 = RateParams { rho: 2.0, d: 1, decay: geometric, q: 2.0, theorem: Theorem::T1 };
    let r = rate_exponent(&t1).unwrap();
    assert!((r.exponent - 0.4).abs() < 1e-9);
    assert_eq!(r.log_power, 0.0);

    let t2 = RateParams { theorem: Theorem::T2, ..t1 };
    let r = rate_exponent(&t2).unwrap();
    assert!((r.exponent - 0.4).abs() < 1e-9);
    assert!((r.log_power - 1.6).abs() < 1e-9);

    let riemannian =
        DependenceBound::new(Coefficient::Eta, Decay::Riemannian { a: 4.0 }, 1.0).unwrap();
    let t3 = RateParams { rho: 3.0, d: 1, decay: riemannian, q: 2.0, theorem: Theorem::T3Mean };
    let r = rate_exponent(&t3).unwrap();
    assert!((r.exponent - 3.0 / 7.4).abs() < 1e-9);

    assert_eq!(optimal_bandwidth(&t1, 1024).unwrap(), 4);
    assert_eq!(optimal_bandwidth(&t1, 2).unwrap(), 1);
    assert_eq!(optimal_bandwidth(&t2, 1024).unwrap(), 1);

    pass(7, start, "q0, exponents, and bandwidth schedules reproduce every example");
}

#[test]
fn criterion_8_deterministic_parallel_csv() {
    let start = Instant::now();
    let base = "[process]\n\
                preset = iid-uniform\n\
                \n\
                [experiment]\n\
                n_grid = 64, 128, 256, 512\n\
                replicates = 200\n\
                metric = pointwise_lq\n\
                x = 0.5\n\
                q = 2\n\
                seed = 11\n\
                workers = ";
    let one = parse_config(&format!("{base}1\n")).unwrap();
    let eight = parse_config(&format!("{base}8\n")).unwrap();
    let csv_one = csv_string(&run_experiment(&one).unwrap());
    let csv_eight = csv_string(&run_experiment(&eight).unwrap());
    assert_eq!(csv_one.as_bytes(), csv_eight.as_bytes(), "criterion 8: CSV bytes differ");
    // And stable across repeated runs of the same config.
    let again = csv_string(&run_experiment(&one).unwrap());
    assert_eq!(csv_one, again);
    pass(8, start, "identical CSV bytes for 1 and 8 workers");
}

fn ks_distance_from_uniform(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let hi = (i as f64 + 1.0) / n - x;
            let lo = x - i as f64 / n;
            hi.max(lo)
        })
        .fold(0.0, f64::max)
}
