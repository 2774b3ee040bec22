use std::f64::consts::FRAC_PI_2;

use crate::config::*;
use crate::error::CliError;

pub const NAMES: [&str; 5] = ["fig4", "fig6", "fig7", "fig9", "tauG"];

fn bare(name: &str, stages: Vec<Stage>) -> Scenario {
    Scenario {
        name: name.into(),
        stages,
        grid_scale: 1.0,
        tau_e_s: Vec::new(),
        zeta_rad: Vec::new(),
        conditional_mean: None,
        mode: None,
        verification: None,
        filters: None,
        tomography: None,
        common: None,
        differential: None,
        entanglement: None,
        gravity: None,
    }
}

/// Free 10 kg mirror measured at 100 Hz with thermal and sensing noise at 20 Hz and 500 Hz.
fn markovian_mode() -> ModeConfig {
    ModeConfig {
        mass_kg: 10.0,
        omega_q_hz: 100.0,
        omega_f_hz: 20.0,
        omega_x_hz: Some(500.0),
        omega_m_hz: 0.0,
        gamma_m_per_s: 0.0,
        eta: 0.01,
        squeeze_db: 0.0,
        verify_squeeze_db: None,
        temperature_k: None,
    }
}

/// Half-mass modes of two 10 kg mirrors; the differential mode switches from amplitude to
/// phase squeezing between preparation and verification.
fn two_mirrors(scenario: &mut Scenario, omega_f_hz: Vec<f64>, tau_max_tau_q: f64) {
    let mode = |prep: f64| ModeConfig {
        mass_kg: 5.0,
        omega_q_hz: 100.0,
        omega_f_hz: omega_f_hz[0],
        omega_x_hz: None,
        omega_m_hz: 0.0,
        gamma_m_per_s: 0.0,
        eta: 0.0,
        squeeze_db: prep,
        verify_squeeze_db: Some(10.0),
        temperature_k: None,
    };
    scenario.common = Some(mode(10.0));
    scenario.differential = Some(mode(-10.0));
    scenario.entanglement = Some(EntanglementConfig {
        omega_f_hz,
        tau_max_tau_q,
        samples: 161,
    });
}

pub fn preset(name: &str) -> Result<Scenario, CliError> {
    let sc = match name {
        "fig4" => {
            let mut s = bare("fig4", vec![Stage::Tomography]);
            s.tomography = Some(TomographyConfig {
                v_add_heisenberg: vec![0.0, 0.25, 0.5],
                half_width: 5.0,
                points: 401,
                grid_json: false,
            });
            s
        }
        "fig6" => {
            let mut s = bare("fig6", vec![Stage::Filters]);
            s.mode = Some(markovian_mode());
            s.zeta_rad = vec![0.0, FRAC_PI_2];
            s.filters = Some(FilterConfig {
                method: FilterMethod::Both,
                window_tau_v: 30.0,
            });
            s
        }
        "fig7" => {
            let mut s = bare("fig7", vec![Stage::Preparation, Stage::Verification]);
            s.mode = Some(markovian_mode());
            s.verification = Some(VerificationConfig {
                squeeze_db: vec![0.0, 10.0],
                tradeoff_squeeze_db: (0..=20).map(|i| i as f64).collect(),
            });
            s
        }
        "fig9" => {
            let mut s = bare("fig9", vec![Stage::Entanglement]);
            two_mirrors(&mut s, vec![10.0, 20.0], 8.0);
            s
        }
        "tauG" => {
            let mut s = bare("tauG", vec![Stage::Entanglement, Stage::Gravity]);
            two_mirrors(&mut s, vec![10.0], 8.0);
            s.gravity = Some(GravityConfig {
                density_kg_m3: 2200.0,
                separation_m: 10.0,
                mass_kg: 10.0,
                omega_q_hz: 100.0,
            });
            s
        }
        other => {
            return Err(CliError::UnknownPreset {
                name: other.into(),
                available: NAMES.join(", "),
            })
        }
    };
    sc.validate()?;
    Ok(sc)
}
