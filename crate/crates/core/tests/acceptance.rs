//! Acceptance criteria, one PASS/FAIL line per criterion on stderr.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;
use std::time::Instant;

use geojump::experiments::{linspace, scan_detuning, transfer_efficiency_jump, transfer_efficiency_stirap, ProtocolKind};
use geojump::figures::{reproduce, reproduce_all, Figure};
use geojump::model::{
    conjugate_by_generator, eigenbasis, generator_coupling, hamiltonian_jump, Eigenstate, JumpParams,
};
use geojump::propagate::{
    diabatic_correction, diabatic_correction_pathordered, propagate_piecewise, propagate_timedep, stirap_unitary,
};
use geojump::schedules::{make_jump_schedule, stirap_envelopes, stretch_schedule, StirapConfig};
use geojump::smallmat::{eig_hermitian, expm_unitary, StateVector};
use geojump::units::{mhz_to_rad_per_us, ns_to_us};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = (bool, String);

fn omega() -> f64 {
    mhz_to_rad_per_us(4.0)
}

fn minus1() -> StateVector {
    StateVector::basis(1)
}

/// `|<+1| Π_j (2|d_j><d_j| - I) |-1>|²` in plain real arithmetic.
fn reflection_oracle(n: usize) -> f64 {
    let mut v = [0.0, 1.0, 0.0];
    for j in 1..=n {
        let th = (2 * j - 1) as f64 * PI / (4 * n) as f64;
        let d = [0.0, th.cos(), th.sin()];
        let dot: f64 = d.iter().zip(&v).map(|(a, b)| a * b).sum();
        for k in 0..3 {
            v[k] = 2.0 * dot * d[k] - v[k];
        }
    }
    v[2] * v[2]
}

fn c1_identity() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for n in 1..=8 {
        let s = make_jump_schedule(n, omega()).unwrap();
        worst = worst.max(diabatic_correction(&s).unwrap().deviation);
    }
    let elapsed = start.elapsed().as_secs_f64();
    (worst <= 1e-8 && elapsed < 1.0, format!("max |U_Dia - I| = {worst:.2e} over N=1..8, {elapsed:.3} s"))
}

fn c2_full_transfer() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut oracle_worst: f64 = 0.0;
    for n in 1..=8 {
        let t = n as f64 * ns_to_us(125.0);
        let eff = transfer_efficiency_jump(n, omega(), t, 0.0).unwrap();
        worst = worst.max((eff - 1.0).abs());
        let oracle = reflection_oracle(n);
        oracle_worst = oracle_worst.max((oracle - 1.0).abs()).max((oracle - eff).abs());
    }
    (
        worst <= 1e-9 && oracle_worst <= 1e-9,
        format!("max |P+1 - 1| = {worst:.2e}, reflection oracle max dev = {oracle_worst:.2e} (N=1..8)"),
    )
}

fn c3_stirap_short() -> Outcome {
    let c = StirapConfig::new(omega(), ns_to_us(500.0)).unwrap();
    let e1 = transfer_efficiency_stirap(&c).unwrap();
    let c2 = c.with_dt(c.dt / 2.0).unwrap();
    let e2 = transfer_efficiency_stirap(&c2).unwrap();
    let ok = (0.55..=0.65).contains(&e1) && (0.55..=0.65).contains(&e2);
    (ok, format!("T=500 ns: {e1:.6} at dt, {e2:.6} at dt/2"))
}

fn c4_stirap_long() -> Outcome {
    let effs: Vec<f64> = [1000.0, 1200.0, 1800.0]
        .iter()
        .map(|&t| transfer_efficiency_stirap(&StirapConfig::new(omega(), ns_to_us(t)).unwrap()).unwrap())
        .collect();
    (effs.iter().all(|&e| e > 0.95), format!("T=1000/1200/1800 ns: {:.4} / {:.4} / {:.4}", effs[0], effs[1], effs[2]))
}

fn delta_scans() -> (geojump::ScanResult, geojump::ScanResult) {
    let deltas: Vec<f64> = linspace(-2.0, 2.0, 101).into_iter().map(mhz_to_rad_per_us).collect();
    let t = ns_to_us(500.0);
    let jump = scan_detuning(ProtocolKind::Jump { n_pulses: 4 }, omega(), t, &deltas).unwrap();
    let stirap = scan_detuning(ProtocolKind::Stirap, omega(), t, &deltas).unwrap();
    (jump, stirap)
}

fn c5_robustness(jump: &geojump::ScanResult, stirap: &geojump::ScanResult) -> Outcome {
    let margin = jump
        .points
        .iter()
        .zip(&stirap.points)
        .map(|(j, s)| j.efficiency - s.efficiency)
        .fold(f64::INFINITY, f64::min);
    let centre = jump.efficiency_at(0.0).unwrap();
    (
        jump.points.len() == 101 && margin >= 0.0 && centre > 0.999,
        format!("min(jump - stirap) = {margin:.4} over 101 points, jump(0) = {centre:.9}"),
    )
}

fn c6_flatness(jump: &geojump::ScanResult, stirap: &geojump::ScanResult) -> Outcome {
    let wj = jump.width_above(0.9);
    let ws = stirap.width_above(0.9);
    (wj > ws, format!("width(eff > 0.9): jump {wj:.3} MHz, stirap {ws:.3} MHz"))
}

fn c7_cross_engine() -> Outcome {
    const GRIDS: [usize; 3] = [1_000, 10_000, 100_000];
    // The midpoint product integrates the step function F(θ) of the exact
    // schedule without discretization error, so these sit at roundoff.
    let mut exact_err = [0.0f64; 3];
    for n in 1..=8 {
        let s = make_jump_schedule(n, omega()).unwrap();
        let u = diabatic_correction(&s).unwrap().u_dia;
        for (e, &g) in exact_err.iter_mut().zip(&GRIDS) {
            *e = e.max(diabatic_correction_pathordered(&s, g).unwrap().max_diff(&u));
        }
    }
    const ROUNDOFF_FLOOR: f64 = 1e-10;
    let exact_ok = exact_err[1] <= 1e-3
        && (exact_err.windows(2).all(|w| w[1] < w[0]) || exact_err.iter().all(|&e| e <= ROUNDOFF_FLOOR));

    // Same angles with off-nominal dwell, where the grid does not resolve the jumps.
    let s = stretch_schedule(&make_jump_schedule(3, omega()).unwrap(), ns_to_us(0.9 * 375.0)).unwrap();
    let u = diabatic_correction(&s).unwrap().u_dia;
    let stretched: Vec<f64> =
        GRIDS.iter().map(|&g| diabatic_correction_pathordered(&s, g).unwrap().max_diff(&u)).collect();
    let stretched_ok = stretched[1] <= 1e-3 && stretched.windows(2).all(|w| w[1] < w[0]);
    (
        exact_ok && stretched_ok,
        format!(
            "exact N=1..8 err at 1e3/1e4/1e5 = {:.1e}/{:.1e}/{:.1e}; stretched N=3 = {:.1e}/{:.1e}/{:.1e}",
            exact_err[0], exact_err[1], exact_err[2], stretched[0], stretched[1], stretched[2]
        ),
    )
}

fn c8_order() -> Outcome {
    let c = StirapConfig::new(omega(), ns_to_us(1800.0)).unwrap();
    let psi = minus1();
    let final_state = |steps| stirap_unitary(&c, 0.0, c.total_time, steps).unwrap().apply(&psi);
    let reference = final_state(64_000);
    let steps = [500usize, 1000, 2000];
    let pts: Vec<(f64, f64)> = steps
        .iter()
        .map(|&n| ((c.total_time / n as f64).ln(), final_state(n).distance(&reference).ln()))
        .collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / 3.0;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / 3.0;
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    ((slope - 2.0).abs() <= 0.2, format!("log-log slope = {slope:.4} (dt = T/500, T/1000, T/2000)"))
}

fn c9_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut failures = Vec::new();
    let mut check = |name: &str, ok: bool| {
        if !ok {
            failures.push(name.to_string());
        }
    };
    for _ in 0..200 {
        let w = rng.gen_range(0.1..60.0);
        let th = rng.gen_range(0.0..FRAC_PI_2);
        let delta = rng.gen_range(-15.0..15.0);
        let t = rng.gen_range(0.0..1.0);

        let h = hamiltonian_jump(&JumpParams::new(w, th, delta).unwrap());
        check("unitarity", expm_unitary(&h, t).unwrap().unitarity_defect() < 1e-12);

        let ev = eig_hermitian(&hamiltonian_jump(&JumpParams::resonant(w, th).unwrap())).unwrap().eigenvalues;
        check("spectrum", (ev[0] + w).abs() < 1e-12 * w && ev[1].abs() < 1e-12 * w && (ev[2] - w).abs() < 1e-12 * w);

        let conj = conjugate_by_generator(th, w).unwrap();
        check("conjugation", conj.max_diff(&hamiltonian_jump(&JumpParams::resonant(w, th).unwrap())) < 1e-12 * w);

        let eps = 1e-5;
        let (lo, mid, hi) = (eigenbasis(th - eps), eigenbasis(th), eigenbasis(th + eps));
        for n in Eigenstate::ALL {
            for m in Eigenstate::ALL {
                let deriv = StateVector::new(std::array::from_fn(|k| {
                    num_complex::Complex64::i() * (hi[m.index()].amplitudes()[k] - lo[m.index()].amplitudes()[k])
                        / (2.0 * eps)
                }));
                let fd = mid[n.index()].inner(&deriv);
                check("finite-difference connection", (fd - generator_coupling(n, m)).norm() < 1e-6);
            }
        }

        let total = rng.gen_range(0.2..2.0);
        let c = StirapConfig::new(w, total).unwrap();
        let s = rng.gen_range(0.0..total);
        let (p1, s1) = stirap_envelopes(&c, s).unwrap();
        let (p2, s2) = stirap_envelopes(&c, total - s).unwrap();
        check("envelope mirror symmetry", (p1 - s2).abs() < 1e-12 * w && (s1 - p2).abs() < 1e-12 * w);
    }
    for n in 1..=8 {
        let s = stretch_schedule(&make_jump_schedule(n, omega()).unwrap(), 0.3).unwrap();
        let (trace, u) = propagate_piecewise(&s, 3.0, &minus1(), 20).unwrap();
        check("piecewise norm", trace.max_norm_defect() < 1e-12 && u.unitarity_defect() < 1e-12);
    }
    for t in [0.5, 1.2] {
        let c = StirapConfig::new(omega(), t).unwrap().with_detuning(5.0).unwrap();
        let (trace, u) = propagate_timedep(&c, &minus1(), 100).unwrap();
        check("time-dependent norm", trace.max_norm_defect() < 1e-10 && u.unitarity_defect() < 1e-10);
    }
    failures.sort();
    failures.dedup();
    if failures.is_empty() {
        (
            true,
            "unitarity, norm, spectrum, conjugation, finite-difference connection, envelope symmetry".into(),
        )
    } else {
        (false, format!("failed: {}", failures.join(", ")))
    }
}

fn c10_determinism() -> Outcome {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let files_a = reproduce(Figure::Fig4, a.path()).unwrap();
    let files_b = reproduce(Figure::Fig4, b.path()).unwrap();
    let identical = files_a.len() == files_b.len()
        && files_a.iter().zip(&files_b).all(|(x, y)| std::fs::read(x).unwrap() == std::fs::read(y).unwrap());

    let all = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let n = reproduce_all(all.path()).unwrap().len();
    let elapsed = start.elapsed().as_secs_f64();
    (
        identical && elapsed < 60.0,
        format!("fig4 byte-identical: {identical}; all {n} figure files in {elapsed:.2} s"),
    )
}

#[test]
fn acceptance() {
    let (jump, stirap) = delta_scans();
    let results: Vec<(&str, Outcome)> = vec![
        ("U_Dia identity", c1_identity()),
        ("full transfer at N x 125 ns", c2_full_transfer()),
        ("STIRAP short-time failure", c3_stirap_short()),
        ("STIRAP long-time success", c4_stirap_long()),
        ("detuning robustness dominance", c5_robustness(&jump, &stirap)),
        ("flatness", c6_flatness(&jump, &stirap)),
        ("cross-engine agreement", c7_cross_engine()),
        ("integrator order", c8_order()),
        ("property suite", c9_properties()),
        ("determinism and runtime", c10_determinism()),
    ];
    let mut failed = Vec::new();
    // written past the test harness capture so the lines show in a plain `cargo test`
    let mut err = std::io::stderr().lock();
    for (i, (name, (ok, detail))) in results.iter().enumerate() {
        let _ = writeln!(err, "[{}] criterion {:>2} {name}: {detail}", if *ok { "PASS" } else { "FAIL" }, i + 1);
        if !ok {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

