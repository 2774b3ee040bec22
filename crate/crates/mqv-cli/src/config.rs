//! Scenario files. Frequencies are given in Hz (`omega = 2 pi f`), damping in 1/s,
//! squeezing in dB with positive values for phase squeezing.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::CliError;
use mqv::params::{hz, squeeze_from_db, NoiseBudget};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Preparation,
    Evolution,
    Verification,
    Filters,
    Tomography,
    Entanglement,
    Gravity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub stages: Vec<Stage>,
    #[serde(default = "one")]
    pub grid_scale: f64,
    /// Evolution durations.
    #[serde(default)]
    pub tau_e_s: Vec<f64>,
    /// Quadrature angles for the filters.
    #[serde(default)]
    pub zeta_rad: Vec<f64>,
    /// Conditional mean `(x [m], p [kg m/s])` handed over from the preparer.
    #[serde(default)]
    pub conditional_mean: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filters: Option<FilterConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tomography: Option<TomographyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub common: Option<ModeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub differential: Option<ModeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entanglement: Option<EntanglementConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gravity: Option<GravityConfig>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    pub mass_kg: f64,
    pub omega_q_hz: f64,
    #[serde(default)]
    pub omega_f_hz: f64,
    /// Absent means no sensing noise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_x_hz: Option<f64>,
    #[serde(default)]
    pub omega_m_hz: f64,
    #[serde(default)]
    pub gamma_m_per_s: f64,
    #[serde(default)]
    pub eta: f64,
    /// Input squeezing during preparation.
    #[serde(default)]
    pub squeeze_db: f64,
    /// Input squeezing during verification; defaults to `squeeze_db`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify_squeeze_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature_k: Option<f64>,
}

impl ModeConfig {
    pub fn budget_with_squeeze(&self, db: f64) -> NoiseBudget {
        NoiseBudget {
            mass: self.mass_kg,
            omega_m: hz(self.omega_m_hz),
            gamma_m: self.gamma_m_per_s,
            omega_q: hz(self.omega_q_hz),
            omega_f: hz(self.omega_f_hz),
            omega_x: self.omega_x_hz.map_or(f64::INFINITY, hz),
            eta: self.eta,
            q: squeeze_from_db(db),
            temperature: self.temperature_k,
        }
    }

    pub fn preparation(&self) -> NoiseBudget {
        self.budget_with_squeeze(self.squeeze_db)
    }

    pub fn verification(&self) -> NoiseBudget {
        self.budget_with_squeeze(self.verify_squeeze_db.unwrap_or(self.squeeze_db))
    }

    fn validate(&self, section: &str) -> Result<(), CliError> {
        for b in [self.preparation(), self.verification()] {
            b.validate().map_err(|e| match e {
                mqv::Error::InvalidParameter { name, reason } => {
                    CliError::Validation(format!("[{section}] {name}: {reason}"))
                }
                other => CliError::Validation(format!("[{section}] {other}")),
            })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerificationConfig {
    /// Verification squeezing levels to report; defaults to the mode's.
    #[serde(default)]
    pub squeeze_db: Vec<f64>,
    /// Squeezing sweep for the added-noise tradeoff curve.
    #[serde(default)]
    pub tradeoff_squeeze_db: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterMethod {
    ClosedForm,
    WienerHopf,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterConfig {
    pub method: FilterMethod,
    /// Window length in units of the verification time; the normalization moments need
    /// about 30 to converge below 1e-6.
    #[serde(default = "default_window")]
    pub window_tau_v: f64,
}

fn default_window() -> f64 {
    30.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TomographyConfig {
    /// Isotropic verification noise in units of the Heisenberg limit.
    pub v_add_heisenberg: Vec<f64>,
    #[serde(default = "default_half_width")]
    pub half_width: f64,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default)]
    pub grid_json: bool,
}

fn default_half_width() -> f64 {
    5.0
}

fn default_points() -> usize {
    401
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntanglementConfig {
    /// One curve per thermal-noise frequency; overrides both modes' `omega_f_hz`.
    pub omega_f_hz: Vec<f64>,
    pub tau_max_tau_q: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GravityConfig {
    pub density_kg_m3: f64,
    pub separation_m: f64,
    pub mass_kg: f64,
    pub omega_q_hz: f64,
}

impl Scenario {
    pub fn from_toml(text: &str, origin: &str) -> Result<Self, CliError> {
        let sc: Scenario = toml::from_str(text).map_err(|e| CliError::Config {
            path: origin.to_string(),
            message: e.to_string(),
        })?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text, &path.display().to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn has(&self, stage: Stage) -> bool {
        self.stages.contains(&stage)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Validation(m));
        if self.stages.is_empty() {
            return bad("stages: at least one stage is required".into());
        }
        if !(self.grid_scale > 0.0 && self.grid_scale.is_finite()) {
            return bad(format!("grid_scale: must be positive, got {}", self.grid_scale));
        }
        let needs_mode = [Stage::Preparation, Stage::Evolution, Stage::Verification, Stage::Filters];
        if needs_mode.iter().any(|s| self.has(*s)) {
            match &self.mode {
                Some(m) => m.validate("mode")?,
                None => return bad("stages preparation, evolution, verification and filters need a [mode] section".into()),
            }
        }
        for s in [Stage::Evolution, Stage::Verification] {
            if self.has(s) && !self.has(Stage::Preparation) {
                return bad(format!("stage {s:?} requires the preparation stage").to_lowercase());
            }
        }
        if self.has(Stage::Evolution) && self.tau_e_s.is_empty() {
            return bad("tau_e_s: the evolution stage needs at least one duration".into());
        }
        if let Some(t) = self.tau_e_s.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
            return bad(format!("tau_e_s: durations must be non-negative, got {t}"));
        }
        if self.has(Stage::Filters) && self.filters.is_none() {
            return bad("the filters stage needs a [filters] section".into());
        }
        if let Some(f) = &self.filters {
            if !(f.window_tau_v > 0.0) {
                return bad("filters.window_tau_v: must be positive".into());
            }
        }
        if self.has(Stage::Tomography) {
            let Some(t) = &self.tomography else {
                return bad("the tomography stage needs a [tomography] section".into());
            };
            if t.v_add_heisenberg.is_empty() || t.v_add_heisenberg.iter().any(|s| !(*s >= 0.0)) {
                return bad("tomography.v_add_heisenberg: needs non-negative entries".into());
            }
            if t.points < 3 || t.points.is_multiple_of(2) {
                return bad("tomography.points: must be odd and at least 3".into());
            }
        }
        if self.has(Stage::Entanglement) {
            match (&self.common, &self.differential, &self.entanglement) {
                (Some(c), Some(d), Some(e)) => {
                    c.validate("common")?;
                    d.validate("differential")?;
                    if e.omega_f_hz.is_empty() || e.samples < 2 || !(e.tau_max_tau_q > 0.0) {
                        return bad("entanglement: needs omega_f_hz values, samples >= 2 and tau_max_tau_q > 0".into());
                    }
                }
                _ => return bad("the entanglement stage needs [common], [differential] and [entanglement]".into()),
            }
        }
        if self.has(Stage::Gravity) {
            let Some(g) = &self.gravity else {
                return bad("the gravity stage needs a [gravity] section".into());
            };
            for (k, v) in [
                ("density_kg_m3", g.density_kg_m3),
                ("separation_m", g.separation_m),
                ("mass_kg", g.mass_kg),
                ("omega_q_hz", g.omega_q_hz),
            ] {
                if !(v > 0.0 && v.is_finite()) {
                    return bad(format!("gravity.{k}: must be positive, got {v}"));
                }
            }
        }
        Ok(())
    }
}
