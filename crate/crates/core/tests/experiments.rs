use std::f64::consts::PI;

use geojump::experiments::{
    emulate_readout_sequence, linspace, monte_carlo_static_noise, sweep_time_jump, PiPulse, Protocol, ProtocolKind,
    ScanResult,
};
use geojump::units::{mhz_to_rad_per_us, ns_to_us, us_to_ns};

fn omega() -> f64 {
    mhz_to_rad_per_us(4.0)
}

fn final_time(n: usize) -> f64 {
    n as f64 * PI / omega()
}

/// Width (ns) of the above-threshold region that ends at the last sample.
fn trailing_width(scan: &ScanResult, threshold: f64) -> f64 {
    let pts = &scan.points;
    let last = pts.last().unwrap();
    assert!(last.efficiency > threshold);
    let mut k = pts.len() - 1;
    while k > 0 && pts[k - 1].efficiency > threshold {
        k -= 1;
    }
    last.value - pts[k].value
}

#[test]
fn time_sweeps_end_in_full_transfer_with_growing_plateau() {
    let mut totals = Vec::new();
    let mut trailing = Vec::new();
    let mut fractions = Vec::new();
    for n in 1..=4 {
        let tf = final_time(n);
        let sweep = sweep_time_jump(n, omega(), &linspace(0.0, tf, 1001)).unwrap();
        let end = sweep.scan.points.last().unwrap();
        assert!((end.value - us_to_ns(tf)).abs() < 1e-9);
        assert!(end.efficiency >= 1.0 - 1e-9, "N={n}: {}", end.efficiency);
        let last = sweep.endpoints.last().unwrap();
        assert!((last.p_plus1 - 1.0).abs() < 1e-9 && last.p0.abs() < 1e-9);

        let w = sweep.scan.width_above(0.99);
        totals.push(w);
        trailing.push(trailing_width(&sweep.scan, 0.99));
        fractions.push(w / us_to_ns(tf));
    }
    for k in 1..4 {
        assert!(totals[k] > totals[k - 1], "total width {totals:?}");
        assert!(trailing[k] > trailing[k - 1], "trailing width {trailing:?}");
    }
    // Relative to the final time the plateau is not monotone: N = 4 < N = 3.
    assert!(fractions[3] < fractions[2], "{fractions:?}");
}

#[test]
fn detuning_scans_are_even_in_delta() {
    let deltas: Vec<f64> = linspace(-2.0, 2.0, 41).into_iter().map(mhz_to_rad_per_us).collect();
    for kind in [ProtocolKind::Jump { n_pulses: 4 }, ProtocolKind::Stirap] {
        let scan = geojump::experiments::scan_detuning(kind, omega(), ns_to_us(500.0), &deltas).unwrap();
        let n = scan.points.len();
        for k in 0..n {
            let (a, b) = (scan.points[k], scan.points[n - 1 - k]);
            assert!((a.value + b.value).abs() < 1e-12);
            assert!((a.efficiency - b.efficiency).abs() < 1e-9, "{kind:?} at {}", a.value);
        }
    }
}

/// Trapezoid average of the efficiency over a Gaussian detuning density.
fn gaussian_average(protocol: &Protocol, sigma: f64) -> f64 {
    let xs = linspace(-6.0 * sigma, 6.0 * sigma, 241);
    let h = xs[1] - xs[0];
    let mut acc = 0.0;
    for (k, &x) in xs.iter().enumerate() {
        let w = (-0.5 * (x / sigma).powi(2)).exp() / (sigma * (2.0 * PI).sqrt());
        let end = if k == 0 || k == xs.len() - 1 { 0.5 } else { 1.0 };
        acc += end * w * protocol.with_detuning(x).unwrap().efficiency().unwrap() * h;
    }
    acc
}

#[test]
fn static_noise_mean_matches_quadrature() {
    let sigma = mhz_to_rad_per_us(1.0);
    let t = ns_to_us(500.0);
    let jump = ProtocolKind::Jump { n_pulses: 4 }.build(omega(), t).unwrap();
    let stirap = ProtocolKind::Stirap.build(omega(), t).unwrap();

    let mut means = Vec::new();
    for (p, samples) in [(&jump, 4000), (&stirap, 600)] {
        let mc = monte_carlo_static_noise(p, sigma, samples, 11).unwrap();
        let quad = gaussian_average(p, sigma);
        let se = mc.std_dev / (samples as f64).sqrt();
        assert!((mc.mean - quad).abs() < 4.0 * se + 1e-12, "{}: mc {} ± {se} vs {quad}", p.name(), mc.mean);
        means.push(mc.mean);
    }
    assert!(means[0] > means[1], "{means:?}");
}

#[test]
fn static_noise_is_seed_deterministic() {
    let p = ProtocolKind::Jump { n_pulses: 3 }.build(omega(), final_time(3)).unwrap();
    let a = monte_carlo_static_noise(&p, 2.0, 64, 5).unwrap();
    let b = monte_carlo_static_noise(&p, 2.0, 64, 5).unwrap();
    let c = monte_carlo_static_noise(&p, 2.0, 64, 6).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.mean, c.mean);
    let zero = monte_carlo_static_noise(&p, 0.0, 8, 1).unwrap();
    assert!((zero.mean - 1.0).abs() < 1e-9 && zero.std_dev < 1e-9);
}

#[test]
fn readout_recovers_populations() {
    for n in 1..=4 {
        let p = Protocol::Jump { n_pulses: n, omega: omega(), total_time: final_time(n), delta: 0.0 };
        let r = emulate_readout_sequence(&p, PiPulse::Ideal).unwrap();
        assert!(r.inferred.0.abs() < 1e-9 && r.inferred.1.abs() < 1e-9 && (r.inferred.2 - 1.0).abs() < 1e-9);
    }
    let stirap = ProtocolKind::Stirap.build(omega(), ns_to_us(500.0)).unwrap();
    let direct = stirap.efficiency().unwrap();
    let r = emulate_readout_sequence(&stirap, PiPulse::Ideal).unwrap();
    assert!((r.inferred.2 - direct).abs() < 1e-9);
    let finite = emulate_readout_sequence(&stirap, PiPulse::Finite { rabi: mhz_to_rad_per_us(10.0) }).unwrap();
    assert!((finite.inferred.2 - direct).abs() < 1e-9);
}
