//! Runs every preset and reports each invariant, plus comparisons with reference values.

use std::path::Path;

use crate::error::CliError;
use crate::presets::{preset, NAMES};
use crate::run::{run, Summary};

/// Quoted reference values; mismatches are reported but do not fail the check.
const REFERENCES: [(&str, f64, f64); 4] = [
    ("U_add at 0 dB", 0.30, 0.07),
    ("U_add at 10 dB", 0.12, 0.07),
    ("Lambda at 0 dB", 1.48, 0.02),
    ("Lambda at 10 dB", 0.62, 0.02),
];

pub struct CheckOutcome {
    pub lines: Vec<String>,
    pub passed: bool,
}

fn reference_lines(fig7: &Summary) -> Vec<String> {
    let mut lines = Vec::new();
    for (name, expected, tol) in REFERENCES {
        let db = if name.ends_with("10 dB") { 10.0 } else { 0.0 };
        let Some(v) = fig7.verification.iter().find(|v| v.squeeze_db == db) else {
            continue;
        };
        let got = if name.starts_with("U_add") { v.u_add } else { v.lambda };
        let dev = (got - expected) / expected;
        let tag = if dev.abs() <= tol { "match" } else { "DEVIATION" };
        lines.push(format!(
            "{tag:9} reference {name}: computed {got:.4}, quoted {expected} ({:+.1}%, tolerance {:.0}%)",
            100.0 * dev,
            100.0 * tol
        ));
    }
    lines
}

pub fn check_all(out: Option<&Path>, grid_scale: Option<f64>) -> Result<CheckOutcome, CliError> {
    let mut lines = Vec::new();
    let mut passed = true;
    for name in NAMES {
        let mut sc = preset(name)?;
        if let Some(g) = grid_scale {
            sc.grid_scale = g;
        }
        let dir = out.map(|o| o.join(name));
        let summary = run(&sc, dir.as_deref())?;
        for c in &summary.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            lines.push(format!("{tag} [{name}] {}: {:.3e} (tolerance {:.0e})", c.name, c.residual, c.tolerance));
        }
        passed &= summary.failures.is_empty();
        if name == "fig7" {
            lines.extend(reference_lines(&summary));
        }
        if let Some(g) = &summary.gravity {
            lines.push(format!(
                "info      [{name}] tau_A = {:.3e} s, tau_B = {:.3e} s, Omega_q tau_B = {:.2}, verdicts {:?}/{:?}",
                g.tau_a_s, g.tau_b_s, g.omega_q_tau_b, g.model_a, g.model_b
            ));
        }
        for e in &summary.entanglement {
            if let Some(s) = e.survival_over_tau_q {
                lines.push(format!("info      [{name}] entanglement at {} Hz survives {s:.2} tau_q", e.omega_f_hz));
            }
        }
    }
    Ok(CheckOutcome { lines, passed })
}
