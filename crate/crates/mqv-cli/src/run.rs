//! Executes a scenario and writes its artifacts.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{FilterMethod, ModeConfig, Scenario, Stage};
use crate::error::{CliError, Context};
use mqv::entanglement::{
    self, survival_curve, testability_report, GravityDecoherenceParams, ModeSchedule, TestabilityReport, Verdict,
};
use mqv::evolution::evolve_exact;
use mqv::gaussian::{ellipse, uncertainty_product, EllipseExport};
use mqv::params::{hz, squeeze_from_db, HBAR};
use mqv::preparation::{conditional_covariance, riccati_steady_state};
use mqv::tomography::{dip_shape, negativity_volume, q_function, reconstruct, GridLayout, WignerSource};
use mqv::verification::{
    added_noise_covariance, bae_residual, closed_form_filters, normalization, squeezing_tradeoff, FilterGrid,
    FilterPair,
};
use mqv::wiener_hopf::{solve_optimal_filters, FREE_MASS_DAMPING};
use mqv::{Cov2, GaussianState, NoiseBudget};

/// One consistency check with the quantity compared against its tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Default, Serialize)]
pub struct Summary {
    pub scenario: String,
    pub grid_scale: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preparation: Option<PreparationReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub evolution: Vec<EvolutionPoint>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub verification: Vec<VerificationReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub filters: Vec<FilterReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub tomography: Vec<TomographyReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub entanglement: Vec<EntanglementReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gravity: Option<GravityReport>,
    pub checks: Vec<Check>,
    pub failures: Vec<String>,
    pub advisories: Vec<String>,
    pub files: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct PreparationReport {
    /// `U(0)` of the conditional state.
    pub u0: f64,
    /// Same quantity from the Riccati solution.
    pub u0_riccati: f64,
    pub tau_q_s: f64,
    /// Covariance in units of the zero-point scales.
    pub cov_normalized: Cov2,
    pub mean: [f64; 2],
}

#[derive(Debug, Serialize)]
pub struct EvolutionPoint {
    pub tau_e_s: f64,
    pub tau_e_over_tau_q: f64,
    pub u: f64,
    pub u_thermal: f64,
    pub cov_normalized: Cov2,
}

#[derive(Debug, Serialize)]
pub struct VerificationReport {
    pub squeeze_db: f64,
    pub u_add: f64,
    pub lambda: f64,
    pub zeta_f_eff: f64,
    pub chi: f64,
    pub v_add_normalized: Cov2,
    /// Uncertainty product of the reconstructed state at each evolution time.
    pub u_recon: Vec<ReconPoint>,
}

#[derive(Debug, Serialize)]
pub struct ReconPoint {
    pub tau_e_s: f64,
    pub u: f64,
}

#[derive(Debug, Serialize)]
pub struct FilterReport {
    pub zeta_rad: f64,
    pub source: String,
    pub normalization: [f64; 2],
    pub bae_relative: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u_add: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct TomographyReport {
    pub v_add_heisenberg: f64,
    pub min: f64,
    pub negativity_volume: f64,
    pub dip_half_width: f64,
    pub dip_depth: f64,
}

#[derive(Debug, Serialize)]
pub struct EntanglementReport {
    pub omega_f_hz: f64,
    pub e_n0: f64,
    pub survival_s: Option<f64>,
    pub survival_over_tau_q: Option<f64>,
    pub tau_over_tau_q: Vec<f64>,
    pub e_n: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct GravityReport {
    pub tau_a_s: f64,
    pub tau_b_s: f64,
    pub omega_q_tau_b: f64,
    pub survival_s: f64,
    pub model_a: Verdict,
    pub model_b: Verdict,
}

impl From<TestabilityReport> for GravityReport {
    fn from(r: TestabilityReport) -> Self {
        GravityReport {
            tau_a_s: r.timescales.tau_a,
            tau_b_s: r.timescales.tau_b,
            omega_q_tau_b: r.omega_q_tau_b,
            survival_s: r.survival,
            model_a: r.model_a,
            model_b: r.model_b,
        }
    }
}

/// Artifacts held in memory until the run finishes; keyed by relative path.
#[derive(Default)]
struct Artifacts(BTreeMap<String, Vec<u8>>);

impl Artifacts {
    fn csv(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let emit = |e: csv::Error| CliError::Emit { path: name.into(), message: e.to_string() };
        w.write_record(header).map_err(emit)?;
        for r in rows {
            w.write_record(&r).map_err(emit)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Emit { path: name.into(), message: e.to_string() })?;
        self.0.insert(name.into(), bytes);
        Ok(())
    }

    fn json(&mut self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        let mut bytes = serde_json::to_vec_pretty(value)
            .map_err(|e| CliError::Emit { path: name.into(), message: e.to_string() })?;
        bytes.push(b'\n');
        self.0.insert(name.into(), bytes);
        Ok(())
    }
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

struct Runner<'a> {
    sc: &'a Scenario,
    scale: f64,
    summary: Summary,
    files: Artifacts,
}

impl Runner<'_> {
    fn check(&mut self, name: impl Into<String>, residual: f64, tolerance: f64) {
        let name = name.into();
        // NaN residuals fail
        let passed = residual <= tolerance;
        if !passed {
            self.summary.failures.push(name.clone());
        }
        self.summary.checks.push(Check { name, residual, tolerance, passed });
    }

    fn mode(&self) -> &ModeConfig {
        self.sc.mode.as_ref().expect("validated")
    }
}

#[derive(Serialize)]
struct EllipseRecord {
    label: String,
    #[serde(flatten)]
    shape: EllipseExport,
    cov: Cov2,
    u: f64,
}

fn record(label: impl Into<String>, cov: Cov2, mean: [f64; 2]) -> Result<EllipseRecord, CliError> {
    // normalized covariances carry the Heisenberg circle as the identity
    let u = (cov.det()).sqrt();
    Ok(EllipseRecord {
        label: label.into(),
        shape: ellipse(&GaussianState { mean, cov }),
        cov,
        u,
    })
}

/// Runs every stage of `sc`. Artifacts are written into `out` when given.
pub fn run(sc: &Scenario, out: Option<&Path>) -> Result<Summary, CliError> {
    sc.validate()?;
    let mut r = Runner {
        sc,
        scale: sc.grid_scale,
        summary: Summary {
            scenario: sc.name.clone(),
            grid_scale: sc.grid_scale,
            ..Default::default()
        },
        files: Artifacts::default(),
    };
    if sc.has(Stage::Preparation) {
        pipeline(&mut r)?;
    }
    if sc.has(Stage::Filters) {
        filters(&mut r)?;
    }
    if sc.has(Stage::Tomography) {
        tomography(&mut r)?;
    }
    let mut survival = None;
    if sc.has(Stage::Entanglement) {
        survival = entangle(&mut r)?;
    }
    if sc.has(Stage::Gravity) {
        gravity(&mut r, survival)?;
    }

    let mut files: Vec<String> = r.files.0.keys().cloned().collect();
    files.push("summary.json".into());
    files.sort();
    r.summary.files = files;
    let summary_bytes = {
        let mut b = serde_json::to_vec_pretty(&r.summary).map_err(|e| CliError::Emit {
            path: "summary.json".into(),
            message: e.to_string(),
        })?;
        b.push(b'\n');
        b
    };
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.into(), source })?;
        r.files.0.insert("summary.json".into(), summary_bytes);
        for (name, bytes) in &r.files.0 {
            let path: PathBuf = dir.join(name);
            std::fs::write(&path, bytes).map_err(|source| CliError::Io { path, source })?;
        }
    }
    Ok(r.summary)
}

/// Preparation, optional evolution and verification of a single mode.
fn pipeline(r: &mut Runner) -> Result<(), CliError> {
    let mode = *r.mode();
    let prep = mode.preparation();
    let d = prep.derive().ctx("preparation")?;
    let mut cond = conditional_covariance(&prep).ctx("preparation")?;
    if let Some(m) = r.sc.conditional_mean {
        cond.state.mean = m;
    }
    r.summary.advisories.extend(cond.advisories.iter().cloned());
    let u0 = cond.uncertainty().ctx("preparation")?;
    let ric = riccati_steady_state(&prep).ctx("preparation: riccati")?;
    let u0_riccati = ric.uncertainty().ctx("preparation: riccati")?;
    r.check("preparation: U(0) >= 1", 1.0 - u0, 1e-12);
    r.check("preparation: Riccati U(0) >= 1", 1.0 - u0_riccati, 1e-12);
    let norm = |c: &Cov2| c.normalized(d.dx_q, d.dp_q);
    let norm_mean = |m: [f64; 2]| [m[0] / d.dx_q, m[1] / d.dp_q];
    r.summary.preparation = Some(PreparationReport {
        u0,
        u0_riccati,
        tau_q_s: d.tau_q,
        cov_normalized: norm(&cond.state.cov),
        mean: cond.state.mean,
    });

    // evolved states, always including tau = 0
    let mut taus = vec![0.0];
    if r.sc.has(Stage::Evolution) {
        taus.extend(r.sc.tau_e_s.iter().copied().filter(|t| *t > 0.0));
    }
    taus.sort_by(f64::total_cmp);
    taus.dedup();
    let mut evolved = Vec::with_capacity(taus.len());
    for &t in &taus {
        let e = evolve_exact(&cond.state, &prep, t).ctx(format!("evolution at tau_e = {t:e} s"))?;
        for a in &e.advisories {
            if !r.summary.advisories.contains(a) {
                r.summary.advisories.push(a.clone());
            }
        }
        evolved.push(e);
    }
    let dets: Vec<f64> = evolved.iter().map(|e| e.state.cov.det()).collect();
    let drop = dets.windows(2).map(|w| (w[0] - w[1]) / w[0]).fold(0.0f64, f64::max);
    r.check("evolution: det V nondecreasing", drop, 1e-12);

    let mut ellipses = vec![
        record("heisenberg", Cov2::diag(1.0, 1.0), [0.0, 0.0])?,
        record("conditional", norm(&cond.state.cov), norm_mean(cond.state.mean))?,
    ];
    if r.sc.has(Stage::Evolution) {
        r.summary.evolution = evolved
            .iter()
            .map(|e| EvolutionPoint {
                tau_e_s: e.tau,
                tau_e_over_tau_q: e.tau / d.tau_q,
                u: e.u,
                u_thermal: e.u_thermal,
                cov_normalized: norm(&e.state.cov),
            })
            .collect();
        let rows = r
            .summary
            .evolution
            .iter()
            .map(|p| {
                vec![
                    num(p.tau_e_s),
                    num(p.tau_e_over_tau_q),
                    num(p.cov_normalized.xx),
                    num(p.cov_normalized.xp),
                    num(p.cov_normalized.pp),
                    num(p.u),
                    num(p.u_thermal),
                ]
            })
            .collect::<Vec<_>>();
        r.files.csv(
            "evolution.csv",
            &["tau_e_s", "tau_e_over_tau_q", "v_xx", "v_xp", "v_pp", "u", "u_thermal"],
            rows,
        )?;
        for e in evolved.iter().skip(1) {
            ellipses.push(record(format!("evolved_{:e}s", e.tau), norm(&e.state.cov), norm_mean(e.state.mean))?);
        }
    }

    if r.sc.has(Stage::Verification) {
        let v = r.sc.verification.clone().unwrap_or_default();
        let levels = if v.squeeze_db.is_empty() {
            vec![mode.verify_squeeze_db.unwrap_or(mode.squeeze_db)]
        } else {
            v.squeeze_db.clone()
        };
        for db in levels {
            let vb = mode.budget_with_squeeze(db);
            let added = added_noise_covariance(&vb).ctx(format!("verification at {db} dB"))?;
            let mut u_recon = Vec::with_capacity(evolved.len());
            for e in &evolved {
                let total = e.state.cov + added.ellipse.cov;
                u_recon.push(ReconPoint {
                    tau_e_s: e.tau,
                    u: uncertainty_product(&total).ctx("verification")?,
                });
            }
            ellipses.push(record(format!("added_noise_{db}dB"), added.normalized, [0.0, 0.0])?);
            let last = evolved.last().expect("tau = 0 present");
            ellipses.push(record(
                format!("reconstructed_{db}dB"),
                norm(&(last.state.cov + added.ellipse.cov)),
                norm_mean(last.state.mean),
            )?);
            r.summary.verification.push(VerificationReport {
                squeeze_db: db,
                u_add: added.u_add,
                lambda: added.lambda,
                zeta_f_eff: added.zeta_f_eff,
                chi: added.chi,
                v_add_normalized: added.normalized,
                u_recon,
            });
        }
        if !v.tradeoff_squeeze_db.is_empty() {
            let qs: Vec<f64> = v.tradeoff_squeeze_db.iter().map(|db| squeeze_from_db(*db)).collect();
            let t = squeezing_tradeoff(&mode.verification(), &qs).ctx("verification: tradeoff")?;
            let rows = (0..qs.len())
                .map(|i| {
                    vec![
                        num(v.tradeoff_squeeze_db[i]),
                        num(t.q[i]),
                        num(t.u_add[i]),
                        num(t.no_bae[i]),
                        num(t.sensing),
                        num(t.limit),
                    ]
                })
                .collect::<Vec<_>>();
            r.files
                .csv("tradeoff.csv", &["squeeze_db", "q", "u_add", "u_no_bae", "sensing", "limit"], rows)?;
        }
    }
    r.files.json("ellipses.json", &ellipses)?;
    Ok(())
}

fn l2_relative(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

fn filters(r: &mut Runner) -> Result<(), CliError> {
    let mode = *r.mode();
    let cfg = r.sc.filters.expect("validated");
    let b = mode.verification();
    let d = b.derive().ctx("filters")?;
    let base = FilterGrid::default_for(&b).ctx("filters")?;
    let grid = FilterGrid {
        length: cfg.window_tau_v / (b.omega_q * d.chi),
        ..base
    }
    .refined(r.scale);
    let free = b.omega_m == 0.0;
    let want_cf = matches!(cfg.method, FilterMethod::ClosedForm | FilterMethod::Both);
    let want_wh = matches!(cfg.method, FilterMethod::WienerHopf | FilterMethod::Both);
    if want_cf && !free {
        r.summary
            .advisories
            .push("closed-form filters need a free mass; only the Wiener-Hopf route was run".into());
    }
    let zetas = if r.sc.zeta_rad.is_empty() { vec![0.0] } else { r.sc.zeta_rad.clone() };
    let mut pairs: Vec<FilterPair> = Vec::new();
    for &zeta in &zetas {
        let mut cf = None;
        if want_cf && free {
            let p = closed_form_filters(&b, zeta, grid).ctx(format!("filters: closed form at zeta = {zeta}"))?;
            let (n1, n2) = normalization(&p, &b);
            // the closed form is the lossless solution, so its BAE weight is the eta = 0 one
            let lossless = NoiseBudget { eta: 0.0, ..b };
            let bae = bae_residual(&p, &lossless).ctx("filters: closed form")?.relative;
            let res = (n1 - zeta.cos()).abs().max((n2 - zeta.sin()).abs());
            r.check(format!("filters: closed-form normalization at zeta = {zeta:.6}"), res, 1e-6);
            r.check(format!("filters: closed-form BAE at zeta = {zeta:.6}"), bae, 1e-3);
            r.summary.filters.push(FilterReport {
                zeta_rad: zeta,
                source: "closed_form".into(),
                normalization: [n1, n2],
                bae_relative: bae,
                u_add: None,
            });
            cf = Some(p);
        }
        if want_wh {
            let damping = b.gamma_m.max(FREE_MASS_DAMPING * b.omega_q);
            let regular = NoiseBudget { gamma_m: damping, ..b };
            let sol = solve_optimal_filters(&b, zeta, b.omega_m, damping)
                .ctx(format!("filters: Wiener-Hopf at zeta = {zeta}"))?;
            let p = sol.filter_pair(grid).ctx("filters: Wiener-Hopf")?;
            let (n1, n2) = normalization(&p, &regular);
            let bae = bae_residual(&p, &regular).ctx("filters: Wiener-Hopf")?.relative;
            let res = (n1 - zeta.cos()).abs().max((n2 - zeta.sin()).abs());
            r.check(format!("filters: Wiener-Hopf normalization at zeta = {zeta:.6}"), res, 1e-4);
            r.check(format!("filters: Wiener-Hopf BAE at zeta = {zeta:.6}"), bae, 1e-3);
            if let Some(c) = &cf {
                r.check(
                    format!("filters: Wiener-Hopf g2 vs closed form at zeta = {zeta:.6}"),
                    l2_relative(&p.g2, &c.g2),
                    1e-2,
                );
            }
            r.summary.filters.push(FilterReport {
                zeta_rad: zeta,
                source: "wiener_hopf".into(),
                normalization: [n1, n2],
                bae_relative: bae,
                u_add: Some(sol.u_add),
            });
            if let Some(c) = cf.take() {
                pairs.push(c);
            }
            pairs.push(p);
        } else if let Some(c) = cf.take() {
            pairs.push(c);
        }
    }
    let tau_q = d.tau_q;
    let mut rows = Vec::new();
    for p in &pairs {
        let source = match p.source {
            mqv::verification::FilterSource::ClosedForm => "closed_form",
            mqv::verification::FilterSource::WienerHopf => "wiener_hopf",
        };
        for (i, t) in p.times().into_iter().enumerate() {
            rows.push(vec![num(t), num(t / tau_q), num(p.zeta), source.to_string(), num(p.g1[i]), num(p.g2[i])]);
        }
    }
    r.files.csv("filters.csv", &["t_s", "t_over_tau_q", "zeta_rad", "source", "g1", "g2"], rows)
}

fn tomography(r: &mut Runner) -> Result<(), CliError> {
    let cfg = r.sc.tomography.clone().expect("validated");
    let layout = GridLayout { half_width: cfg.half_width, points: cfg.points }.refined(r.scale);
    let src = WignerSource::single_photon();
    let q = q_function(&src, layout).ctx("tomography: Q function")?;
    r.check("tomography: Q function >= 0", -q.min(), 1e-9);
    let ideal = reconstruct(&src, &Cov2::default(), layout).ctx("tomography")?;
    let peak = ideal.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    let mut levels = cfg.v_add_heisenberg.clone();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let mut rows = Vec::new();
    let mut grids = Vec::new();
    for &s in &levels {
        let g = reconstruct(&src, &Cov2::diag(s, s), layout).ctx(format!("tomography at V_add = {s}"))?;
        let dip = dip_shape(&g, peak);
        r.summary.tomography.push(TomographyReport {
            v_add_heisenberg: s,
            min: g.min(),
            negativity_volume: negativity_volume(&g),
            dip_half_width: dip.half_width,
            dip_depth: dip.depth,
        });
        for (u, w) in g.slice_v0() {
            rows.push(vec![num(s), num(u), num(w), num(w / peak)]);
        }
        if cfg.grid_json {
            grids.push(serde_json::json!({
                "v_add_heisenberg": s,
                "half_width": g.half_width,
                "points": g.points,
                "values_row_major_v": g.values,
            }));
        }
    }
    let vols: Vec<f64> = r.summary.tomography.iter().map(|t| t.negativity_volume).collect();
    let rise = vols.windows(2).map(|w| w[1] - w[0]).fold(0.0f64, f64::max);
    r.check("tomography: negativity volume nonincreasing in V_add", rise, 1e-12);
    r.files.csv("tomography_slice.csv", &["v_add_heisenberg", "u", "w", "w_over_peak"], rows)?;
    if cfg.grid_json {
        r.files.json("tomography_grid.json", &grids)?;
    }
    Ok(())
}

fn schedule(m: &ModeConfig, omega_f_hz: f64) -> ModeSchedule {
    let m = ModeConfig { omega_f_hz, ..*m };
    ModeSchedule {
        preparation: m.preparation(),
        verification: m.verification(),
    }
}

/// Returns the survival time of the first curve, or its scan end if it never dies.
fn entangle(r: &mut Runner) -> Result<Option<f64>, CliError> {
    let (c, d) = (r.sc.common.expect("validated"), r.sc.differential.expect("validated"));
    let cfg = r.sc.entanglement.clone().expect("validated");
    let tau_q = 1.0 / hz(c.omega_q_hz);
    let samples = ((cfg.samples - 1) as f64 * r.scale).round().max(1.0) as usize + 1;
    let taus: Vec<f64> = (0..samples)
        .map(|i| cfg.tau_max_tau_q * tau_q * i as f64 / (samples - 1) as f64)
        .collect();
    let mut rows = Vec::new();
    let mut first = None;
    for (k, &f) in cfg.omega_f_hz.iter().enumerate() {
        let (sc, sd) = (schedule(&c, f), schedule(&d, f));
        let curve = survival_curve(&sc, &sd, &taus).ctx(format!("entanglement at omega_f = {f} Hz"))?;
        let mut worst = 0.0f64;
        for &t in &taus {
            let st = entanglement::state_at(&sc, &sd, t).ctx("entanglement")?;
            let a = entanglement::sigma_minus(&st).ctx("entanglement")?;
            let b = entanglement::sigma_minus_from_spectrum(&st);
            worst = worst.max((a - b).abs() / b.abs().max(f64::MIN_POSITIVE));
        }
        r.check(format!("entanglement: sigma_minus vs partial transpose at {f} Hz"), worst, 1e-9);
        let rise = curve
            .e_n
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0f64, f64::max);
        r.check(format!("entanglement: E_N nonincreasing at {f} Hz"), rise, 1e-12);
        if k == 0 {
            first = Some(curve.survival.unwrap_or(*taus.last().expect("samples >= 2")));
            if curve.survival.is_none() {
                r.summary
                    .advisories
                    .push(format!("entanglement at {f} Hz survives the whole scan; survival is a lower bound"));
            }
        }
        for (t, e) in taus.iter().zip(&curve.e_n) {
            rows.push(vec![num(*t), num(t / tau_q), num(f), num(*e)]);
        }
        r.summary.entanglement.push(EntanglementReport {
            omega_f_hz: f,
            e_n0: curve.e_n[0],
            survival_s: curve.survival,
            survival_over_tau_q: curve.survival.map(|s| s / tau_q),
            tau_over_tau_q: taus.iter().map(|t| t / tau_q).collect(),
            e_n: curve.e_n,
        });
    }
    r.files
        .csv("entanglement.csv", &["tau_e_s", "tau_e_over_tau_q", "omega_f_hz", "e_n"], rows)?;
    Ok(first)
}

fn gravity(r: &mut Runner, survival: Option<f64>) -> Result<(), CliError> {
    let g = r.sc.gravity.expect("validated");
    let omega_q = hz(g.omega_q_hz);
    let p = GravityDecoherenceParams {
        density: g.density_kg_m3,
        separation: g.separation_m,
        mass: g.mass_kg,
        omega_q,
        spread: (HBAR / (2.0 * g.mass_kg * omega_q)).sqrt(),
    };
    if survival.is_none() {
        r.summary
            .advisories
            .push("gravity verdicts need an entanglement stage; reported as inconclusive".into());
    }
    let report = testability_report(&p, survival.unwrap_or(0.0)).ctx("gravity")?;
    r.summary.gravity = Some(report.into());
    Ok(())
}
