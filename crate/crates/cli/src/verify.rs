//! Built-in self-test.

use std::f64::consts::FRAC_PI_2;

use geojump::model::{hamiltonian_jump, JumpParams};
use geojump::propagate::{diabatic_correction, diabatic_correction_pathordered, PropagateError};
use geojump::schedules::{make_jump_schedule, stirap_envelopes, StirapConfig};
use geojump::smallmat::eig_hermitian;
use geojump::units::{mhz_to_rad_per_us, ns_to_us};

pub const PATH_ORDERED_GRID: usize = 10_000;

pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: impl Into<String>, passed: bool, detail: String) -> Check {
    Check { name: name.into(), passed, detail }
}

fn failed(name: impl Into<String>, e: impl std::fmt::Display) -> Check {
    check(name, false, format!("error: {e}"))
}

pub fn run() -> Vec<Check> {
    let omega = mhz_to_rad_per_us(4.0);
    let mut checks = Vec::new();

    for n in 1..=8 {
        let name = format!("U_Dia identity N={n}");
        let analysis = make_jump_schedule(n, omega).map_err(PropagateError::from).and_then(|s| diabatic_correction(&s));
        checks.push(match analysis {
            Ok(a) => check(name, a.deviation <= 1e-8, format!("max|U_Dia - I| = {:.3e} (tol 1e-8)", a.deviation)),
            Err(e) => failed(name, e),
        });
    }

    for n in 1..=8 {
        let name = format!("path-ordered cross-check N={n}");
        let result = make_jump_schedule(n, omega).map_err(PropagateError::from).and_then(|s| {
            let exact = diabatic_correction(&s)?.u_dia;
            Ok(diabatic_correction_pathordered(&s, PATH_ORDERED_GRID)?.max_diff(&exact))
        });
        checks.push(match result {
            Ok(d) => check(name, d <= 1e-3, format!("discrepancy {d:.3e} at n_grid = {PATH_ORDERED_GRID} (tol 1e-3)")),
            Err(e) => failed(name, e),
        });
    }

    let mut worst: f64 = 0.0;
    let mut spectrum_error = None;
    for k in 0..=16 {
        let theta = FRAC_PI_2 * k as f64 / 16.0;
        let spectrum = JumpParams::resonant(omega, theta)
            .map_err(|e| e.to_string())
            .and_then(|p| eig_hermitian(&hamiltonian_jump(&p)).map_err(|e| e.to_string()));
        match spectrum {
            Ok(s) => {
                let [a, b, c] = s.eigenvalues;
                worst = worst.max((a + omega).abs()).max(b.abs()).max((c - omega).abs());
            }
            Err(e) => spectrum_error = Some(e),
        }
    }
    checks.push(match spectrum_error {
        Some(e) => failed("eigenvalue spectrum", e),
        None => check(
            "eigenvalue spectrum",
            worst <= 1e-12 * omega,
            format!("max deviation from {{-Ω, 0, Ω}} = {worst:.3e} rad/µs over 17 angles"),
        ),
    });

    checks.push(match StirapConfig::new(omega, ns_to_us(500.0)) {
        Ok(c) => {
            let mut worst: f64 = 0.0;
            for k in 0..=100 {
                let t = c.total_time * k as f64 / 100.0;
                let (p, s) = stirap_envelopes(&c, t).expect("t inside [0, T]");
                let (p_m, s_m) = stirap_envelopes(&c, c.total_time - t).expect("t inside [0, T]");
                worst = worst.max((p - s_m).abs()).max((s - p_m).abs());
            }
            check(
                "envelope mirror symmetry",
                worst <= 1e-12 * omega,
                format!("max |Ω_P(t) - Ω_S(T-t)| = {worst:.3e} rad/µs at T = 500 ns"),
            )
        }
        Err(e) => failed("envelope mirror symmetry", e),
    });

    checks
}
