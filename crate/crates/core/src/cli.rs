//! Run configuration, figure presets, sweeps, CSV output and the
//! verification battery behind the `sim` binary.

use std::io::Write;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cooling::steady_phonon_number;
use crate::dressed::{
    closed_form_defect, coupling_by_level, diagonalize_block, dressed_coupling_table, find_dark_states,
    observable_on_block, opposite_states, phase_aligned_distance, symmetric_dark_state, verify_transformation_matrix,
    WMatrix, DEFAULT_DARK_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::fock::{build_basis, creation_table_check};
use crate::liouville::{dressed_diagonal_state, dressed_rate_check, DEFAULT_NULL_THRESHOLD};
use crate::model::{block_h_opposite, thermal_occupation, DotParams, Mode, PhononParams};
use crate::operator::random_density_matrix;
use crate::spectrum::{RateMethod, RateModel, RateResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    #[serde(rename = "omega_m")]
    OmegaM,
    #[serde(rename = "Gamma3")]
    Gamma3,
}

impl Axis {
    pub fn column(self) -> &'static str {
        match self {
            Axis::OmegaM => "omega_m_over_Gamma",
            Axis::Gamma3 => "Gamma3_over_Gamma",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl SweepConfig {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let h = (self.stop - self.start) / (self.points - 1) as f64;
        (0..self.points).map(|k| self.start + h * k as f64).collect()
    }

    pub fn step(&self) -> f64 {
        if self.points > 1 {
            (self.stop - self.start) / (self.points - 1) as f64
        } else {
            0.0
        }
    }
}

/// Dot parameters as written in a config; `U` may be omitted in
/// single-electron mode, where it never enters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DotConfig {
    #[serde(rename = "E")]
    pub e: [f64; 3],
    #[serde(rename = "T1")]
    pub t1: f64,
    #[serde(rename = "T2")]
    pub t2: f64,
    #[serde(rename = "U", default, skip_serializing_if = "Option::is_none")]
    pub u: Option<[[f64; 3]; 3]>,
    #[serde(rename = "Gamma")]
    pub gamma: [f64; 3],
}

impl From<&DotParams> for DotConfig {
    fn from(p: &DotParams) -> Self {
        DotConfig { e: p.e, t1: p.t1, t2: p.t2, u: Some(p.u), gamma: p.gamma }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhononConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_m: Option<f64>,
    pub gamma_p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nbar_p: Option<f64>,
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbsoluteUnits {
    #[serde(rename = "Gamma_over_2pi_MHz")]
    pub gamma_over_2pi_mhz: f64,
    #[serde(rename = "T_p_mK")]
    pub t_p_mk: f64,
}

impl AbsoluteUnits {
    /// Angular frequency in rad/s for a value in units of Γ.
    pub fn angular(&self, x_over_gamma: f64) -> f64 {
        x_over_gamma * 2.0 * std::f64::consts::PI * self.gamma_over_2pi_mhz * 1e6
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_null_threshold")]
    pub null_threshold: f64,
}

fn default_null_threshold() -> f64 {
    DEFAULT_NULL_THRESHOLD
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { null_threshold: DEFAULT_NULL_THRESHOLD }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodChoice {
    #[default]
    Resolvent,
    TimeDomain,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    pub dot: DotConfig,
    pub phonon: PhononConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub method: MethodChoice,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub absolute_units: Option<AbsoluteUnits>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let cfg_err = |e: Error| Error::Config(e.to_string());
        if self.mode == Mode::TwoElectron && self.dot.u.is_none() {
            return Err(Error::Config("two_electron mode needs dot.U".into()));
        }
        self.dot_params().validate().map_err(cfg_err)?;
        let swept = self.sweep.as_ref().map(|s| s.axis);
        if swept != Some(Axis::OmegaM) && self.phonon.omega_m.is_none() {
            return Err(Error::Config("phonon.omega_m is required unless the sweep axis is omega_m".into()));
        }
        if self.phonon.nbar_p.is_none() && self.absolute_units.is_none() {
            return Err(Error::Config("give phonon.nbar_p or an absolute_units block".into()));
        }
        if let Some(s) = &self.sweep {
            if s.points == 0 {
                return Err(Error::Config("sweep.points must be >= 1".into()));
            }
            if s.points > 1 && !(s.start < s.stop) {
                return Err(Error::Config(format!("sweep needs start < stop (got {} .. {})", s.start, s.stop)));
            }
            if !(s.start > 0.0 && s.stop.is_finite()) {
                return Err(Error::Config("sweep values must be positive and finite".into()));
            }
        }
        if let Some(a) = &self.absolute_units {
            if !(a.gamma_over_2pi_mhz > 0.0 && a.t_p_mk >= 0.0) {
                return Err(Error::Config("absolute_units needs Gamma_over_2pi_MHz > 0 and T_p_mK >= 0".into()));
            }
        }
        if !(self.tolerances.null_threshold > 0.0 && self.tolerances.null_threshold < 1.0) {
            return Err(Error::Config("tolerances.null_threshold must lie in (0, 1)".into()));
        }
        let probe = self.phonon_params(self.phonon.omega_m.unwrap_or(1.0))?;
        probe.validate().map_err(cfg_err)?;
        Ok(())
    }

    pub fn dot_params(&self) -> DotParams {
        DotParams {
            e: self.dot.e,
            t1: self.dot.t1,
            t2: self.dot.t2,
            u: self.dot.u.unwrap_or([[0.0; 3]; 3]),
            gamma: self.dot.gamma,
        }
    }

    /// Phonon parameters at mechanical frequency `omega_m` (units of Γ).
    pub fn phonon_params(&self, omega_m: f64) -> Result<PhononParams> {
        let nbar_p = match (self.phonon.nbar_p, &self.absolute_units) {
            (Some(n), _) => n,
            (None, Some(a)) => thermal_occupation(a.angular(omega_m), a.t_p_mk * 1e-3),
            (None, None) => return Err(Error::Config("no nbar_p and no absolute_units".into())),
        };
        Ok(PhononParams { omega_m, gamma_p: self.phonon.gamma_p, nbar_p, alpha: self.phonon.alpha })
    }

    /// Copy with `ω_m` fixed and no sweep.
    pub fn at_omega(&self, omega_m: f64) -> Self {
        let mut c = self.clone();
        c.phonon.omega_m = Some(omega_m);
        c.sweep = None;
        c
    }
}

/// One output row; `value` is the swept quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub a_plus: f64,
    pub a_minus: f64,
    pub n_ss: f64,
    pub method: RateMethod,
    pub warning: String,
}

impl SweepRow {
    fn failed(value: f64, method: RateMethod, err: &Error) -> Self {
        SweepRow { value, a_plus: f64::NAN, a_minus: f64::NAN, n_ss: f64::NAN, method, warning: err.code().to_string() }
    }
}

fn model_for(cfg: &RunConfig, p: &DotParams) -> Result<RateModel> {
    RateModel::with_threshold(p, cfg.mode, cfg.tolerances.null_threshold)
}

fn method_of(cfg: &RunConfig) -> RateMethod {
    match cfg.method {
        MethodChoice::Resolvent => RateMethod::Resolvent,
        MethodChoice::TimeDomain => RateMethod::TimeDomain,
    }
}

fn row_from_model(cfg: &RunConfig, model: &RateModel, omega_m: f64, value: f64) -> Result<SweepRow> {
    let ph = cfg.phonon_params(omega_m)?;
    let r: RateResult = match cfg.method {
        MethodChoice::Resolvent => model.rates(ph.alpha, omega_m)?,
        MethodChoice::TimeDomain => model.rates_time_domain(ph.alpha, omega_m)?,
    };
    let n_ss = steady_phonon_number(&r, &ph)?;
    let mut warnings = Vec::new();
    if model.steady.null_dimension > 1 {
        warnings.push(format!("stationary_dimension_{}", model.steady.null_dimension));
    }
    if r.a_plus < -1e-8 || r.a_minus < -1e-8 {
        warnings.push("negative_rate".to_string());
    }
    Ok(SweepRow { value, a_plus: r.a_plus, a_minus: r.a_minus, n_ss, method: r.method, warning: warnings.join(";") })
}

/// Single point at `phonon.omega_m`.
pub fn run_point(cfg: &RunConfig) -> Result<SweepRow> {
    let omega = cfg.phonon.omega_m.ok_or_else(|| Error::Config("run_point needs phonon.omega_m".into()))?;
    let p = cfg.dot_params();
    let model = model_for(cfg, &p)?;
    row_from_model(cfg, &model, omega, omega)
}

/// Evaluates every sweep point; failures become flagged rows. Rows come
/// back in axis order.
pub fn run_sweep(cfg: &RunConfig) -> Result<Vec<SweepRow>> {
    let sweep = cfg.sweep.as_ref().ok_or_else(|| Error::Config("config has no sweep block".into()))?;
    let values = sweep.values();
    let method = method_of(cfg);
    let rows = match sweep.axis {
        Axis::OmegaM => {
            let model = model_for(cfg, &cfg.dot_params())?;
            values
                .par_iter()
                .map(|&w| row_from_model(cfg, &model, w, w).unwrap_or_else(|e| SweepRow::failed(w, method, &e)))
                .collect()
        }
        Axis::Gamma3 => {
            let omega = cfg.phonon.omega_m.ok_or_else(|| Error::Config("Gamma3 sweep needs phonon.omega_m".into()))?;
            values
                .par_iter()
                .map(|&g3| {
                    let mut p = cfg.dot_params();
                    p.gamma[2] = g3;
                    model_for(cfg, &p)
                        .and_then(|m| row_from_model(cfg, &m, omega, g3))
                        .unwrap_or_else(|e| SweepRow::failed(g3, method, &e))
                })
                .collect()
        }
    };
    Ok(rows)
}

fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:e}")
    } else {
        String::new()
    }
}

/// Writes rows as CSV. With `curve` set, a leading `curve` column labels
/// each row.
pub fn write_csv<W: Write>(out: W, axis: Axis, curves: &[(Option<&str>, &[SweepRow])]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let labelled = curves.iter().any(|(l, _)| l.is_some());
    let mut header = vec![axis.column(), "A_plus_over_Gamma", "A_minus_over_Gamma", "n_ss", "method", "warning"];
    if labelled {
        header.insert(0, "curve");
    }
    w.write_record(&header)?;
    for (label, rows) in curves {
        for r in rows.iter() {
            let mut rec = vec![
                fmt_num(r.value),
                fmt_num(r.a_plus),
                fmt_num(r.a_minus),
                fmt_num(r.n_ss),
                r.method.as_str().to_string(),
                r.warning.clone(),
            ];
            if labelled {
                rec.insert(0, label.unwrap_or("").to_string());
            }
            w.write_record(&rec)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file(path: &Path, axis: Axis, curves: &[(Option<&str>, &[SweepRow])]) -> Result<()> {
    let f = std::fs::File::create(path)?;
    write_csv(std::io::BufWriter::new(f), axis, curves)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PresetName {
    Fig2,
    Fig3,
    Fig6,
    Fig7,
}

impl std::str::FromStr for PresetName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig2" => Ok(PresetName::Fig2),
            "fig3" => Ok(PresetName::Fig3),
            "fig6" => Ok(PresetName::Fig6),
            "fig7" => Ok(PresetName::Fig7),
            _ => Err(Error::Config(format!("unknown preset {s:?} (expected fig2, fig3, fig6 or fig7)"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Curve {
    pub label: String,
    pub config: RunConfig,
}

#[derive(Debug, Clone)]
pub struct Preset {
    pub name: PresetName,
    pub axis: Axis,
    pub curves: Vec<Curve>,
}

pub const PRESET_POINTS: usize = 400;
pub const PRESET_GAMMA_P: f64 = 2e-4;
pub const PRESET_NBAR_P: f64 = 21.0;
pub const PRESET_ALPHA: f64 = 2.0;
/// Γ₃ range swept by the fig7 preset.
pub const FIG7_GAMMA3_RANGE: (f64, f64) = (0.1, 3.0);

fn preset_config(mode: Mode, p: &DotParams, omega_m: Option<f64>, sweep: SweepConfig) -> RunConfig {
    RunConfig {
        mode,
        dot: DotConfig::from(p),
        phonon: PhononConfig { omega_m, gamma_p: PRESET_GAMMA_P, nbar_p: Some(PRESET_NBAR_P), alpha: PRESET_ALPHA },
        sweep: Some(sweep),
        output: None,
        tolerances: Tolerances::default(),
        method: MethodChoice::Resolvent,
        absolute_units: None,
    }
}

fn omega_sweep(start: f64, stop: f64) -> SweepConfig {
    SweepConfig { axis: Axis::OmegaM, start, stop, points: PRESET_POINTS }
}

pub fn preset(name: PresetName) -> Preset {
    let mut curves = Vec::new();
    let axis = match name {
        PresetName::Fig2 => {
            for d2 in [0.5, 1.0, 2.0, 4.0] {
                let p = DotParams::single_electron(10.0, 10.0, d2, 0.5);
                let config = preset_config(Mode::SingleElectron, &p, None, omega_sweep(5.0, 30.0));
                curves.push(Curve { label: format!("Delta2={d2}"), config });
            }
            Axis::OmegaM
        }
        PresetName::Fig3 => {
            for beta in [1.0, 4.0, 9.0, 19.0] {
                let t2 = 20.0 / (1.0 + beta);
                let p = DotParams::single_electron(beta * t2, t2, 1.0, 0.5);
                let config = preset_config(Mode::SingleElectron, &p, None, omega_sweep(5.0, 30.0));
                curves.push(Curve { label: format!("beta={beta}"), config });
            }
            Axis::OmegaM
        }
        PresetName::Fig6 => {
            for g3 in [0.5, 1.0, 2.0] {
                let p = DotParams::antisymmetric(10.0, g3);
                let config = preset_config(Mode::TwoElectron, &p, None, omega_sweep(10.0, 30.0));
                curves.push(Curve { label: format!("Gamma3={g3}"), config });
            }
            Axis::OmegaM
        }
        PresetName::Fig7 => {
            for t in [5.0, 10.0, 15.0] {
                let p = DotParams::antisymmetric(t, 1.0);
                let (start, stop) = FIG7_GAMMA3_RANGE;
                let sweep = SweepConfig { axis: Axis::Gamma3, start, stop, points: PRESET_POINTS };
                let config = preset_config(Mode::TwoElectron, &p, Some(2.0 * t), sweep);
                curves.push(Curve { label: format!("T={t}"), config });
            }
            Axis::Gamma3
        }
    };
    Preset { name, axis, curves }
}

pub fn run_preset(p: &Preset) -> Result<Vec<(String, Vec<SweepRow>)>> {
    p.curves.iter().map(|c| Ok((c.label.clone(), run_sweep(&c.config)?))).collect()
}

pub fn write_preset_csv(path: &Path, p: &Preset, results: &[(String, Vec<SweepRow>)]) -> Result<()> {
    let curves: Vec<(Option<&str>, &[SweepRow])> =
        results.iter().map(|(l, r)| (Some(l.as_str()), r.as_slice())).collect();
    write_csv_file(path, p.axis, &curves)
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, r: Result<(bool, String)>) -> Check {
    match r {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check { name, passed: false, detail: format!("error [{}]: {e}", e.code()) },
    }
}

/// Seed for the random states drawn by the battery.
pub const VERIFY_SEED: u64 = 0x5eed;

/// Structural checks on the dressed states, the transformation matrices, the
/// operator table and the dressed-state population equations.
pub fn verify_battery() -> Vec<Check> {
    let mut out = Vec::new();
    out.push(check(
        "creation_table",
        creation_table_check().map(|r| {
            (r.passes(), format!("{} elements, {} mismatches, {} nonzero", r.checked, r.mismatches.len(), r.nonzero))
        }),
    ));
    for (name, which) in [("w_antisymmetric", WMatrix::Antisymmetric), ("w_symmetric", WMatrix::Symmetric)] {
        out.push(check(
            name,
            verify_transformation_matrix(which, 10.0).map(|r| {
                (
                    r.passes(1e-10),
                    format!(
                        "orthonormality {:.1e}, off-diagonal {:.1e}, eigenvalue error {:.1e}, failing rows {:?}",
                        r.orthonormality_defect,
                        r.max_off_diagonal,
                        r.max_eigenvalue_error,
                        r.failing_rows(1e-10).iter().map(|k| k + 1).collect::<Vec<_>>()
                    ),
                )
            }),
        ));
    }
    out.push(check("single_electron_closed_form", closed_form_grid(100, VERIFY_SEED)));
    out.push(check("symmetric_dark_state", symmetric_checks()));
    out.push(check("dressed_population_rates", rate_rows(50, VERIFY_SEED)));
    out
}

/// Closed-form one-electron spectrum against numerics on `n` random points.
pub fn closed_form_grid(n: usize, seed: u64) -> Result<(bool, String)> {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let t1 = rng.random_range(0.5..20.0);
        let t2 = rng.random_range(0.5..20.0);
        let d2 = rng.random_range(-10.0..10.0);
        worst = worst.max(closed_form_defect(&DotParams::single_electron(t1, t2, d2, 0.5))?);
    }
    Ok((worst < 1e-12, format!("{n} points, max defect {worst:.1e}")))
}

fn symmetric_checks() -> Result<(bool, String)> {
    let p = DotParams::symmetric(10.0, 1.0);
    let spec = diagonalize_block(&block_h_opposite(&p)?)?;
    let rep = find_dark_states(&spec, DEFAULT_DARK_THRESHOLD);
    if rep.indices.len() != 1 {
        return Ok((false, format!("{} dark eigenvectors", rep.indices.len())));
    }
    let dist = phase_aligned_distance(&spec.vector(rep.indices[0]), &symmetric_dark_state());
    let basis = build_basis(2)?;
    let o = observable_on_block(&basis, &opposite_states())?;
    let table = dressed_coupling_table(&spec, &o, rep.indices[0]);
    let levels = coupling_by_level(&spec, &table);
    let up: Vec<_> = levels.iter().filter(|l| l.0 > 1e-9).collect();
    let down: Vec<_> = levels.iter().filter(|l| l.0 < -1e-9).collect();
    let balanced = up.len() == down.len()
        && up.iter().zip(down.iter().rev()).all(|(u, d)| (u.0 + d.0).abs() < 1e-10 && (u.1 - d.1).abs() < 1e-10);
    Ok((dist < 1e-12 && balanced, format!("dark-state distance {dist:.1e}, balanced couplings {balanced}")))
}

/// Dressed population rows at `δu = 0` on `n` random and `n` dressed-diagonal states.
pub fn rate_rows(n: usize, seed: u64) -> Result<(bool, String)> {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis = build_basis(2)?;
    let p = DotParams::antisymmetric(10.0, 0.5);
    let random: Vec<_> = (0..n).map(|_| random_density_matrix(&mut rng, basis.dim())).collect();
    let diagonal = (0..n)
        .map(|_| {
            let w: Vec<f64> = (0..basis.dim()).map(|_| rng.random::<f64>()).collect();
            dressed_diagonal_state(&p, &basis, &w)
        })
        .collect::<Result<Vec<_>>>()?;
    let rep = dressed_rate_check(&p, &basis, &random, &diagonal)?;
    Ok((
        rep.max_checked() < 1e-10,
        format!("rho77 {:.1e}, rho22 {:.1e}, rho33 {:.1e}", rep.rho77, rep.rho22, rep.rho33),
    ))
}

pub fn format_checks(checks: &[Check]) -> String {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut s = String::new();
    for c in checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        s.push_str(&format!("{tag}  {:width$}  {}\n", c.name, c.detail));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig6_point() -> RunConfig {
        preset(PresetName::Fig6).curves[0].config.at_omega(20.0)
    }

    #[test]
    fn config_round_trip() {
        let cfg = preset(PresetName::Fig6).curves[0].config.clone();
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        assert_eq!(RunConfig::from_json(&text).unwrap(), cfg);
    }

    #[test]
    fn config_errors() {
        let mut v: serde_json::Value = serde_json::to_value(fig6_point()).unwrap();
        v["dot"].as_object_mut().unwrap().remove("U");
        assert_eq!(RunConfig::from_json(&v.to_string()).unwrap_err().code(), "config");
        let mut v: serde_json::Value = serde_json::to_value(fig6_point()).unwrap();
        v["bogus"] = 1.into();
        assert_eq!(RunConfig::from_json(&v.to_string()).unwrap_err().code(), "config");
        let mut c = preset(PresetName::Fig2).curves[0].config.clone();
        c.sweep.as_mut().unwrap().stop = 1.0;
        assert_eq!(c.validate().unwrap_err().exit_status(), 2);
    }

    #[test]
    fn alpha_zero_gives_thermal() {
        let mut c = fig6_point();
        c.phonon.alpha = 0.0;
        let row = run_point(&c).unwrap();
        assert!((row.n_ss - 21.0).abs() < 1e-9);
    }

    #[test]
    fn nbar_from_absolute_units() {
        let mut c = fig6_point();
        c.phonon.nbar_p = None;
        c.absolute_units = Some(AbsoluteUnits { gamma_over_2pi_mhz: 5.0, t_p_mk: 100.0 });
        let ph = c.phonon_params(20.0).unwrap();
        assert!((ph.nbar_p - 20.34).abs() < 0.01, "{}", ph.nbar_p);
    }

    #[test]
    fn csv_layout_is_stable() {
        let mut c = fig6_point();
        c.sweep = Some(SweepConfig { axis: Axis::OmegaM, start: 18.0, stop: 22.0, points: 5 });
        let rows = run_sweep(&c).unwrap();
        assert_eq!(rows.iter().map(|r| r.value).collect::<Vec<_>>(), vec![18.0, 19.0, 20.0, 21.0, 22.0]);
        let mut a = Vec::new();
        write_csv(&mut a, Axis::OmegaM, &[(None, &rows)]).unwrap();
        let mut b = Vec::new();
        write_csv(&mut b, Axis::OmegaM, &[(None, &run_sweep(&c).unwrap())]).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with("omega_m_over_Gamma,A_plus_over_Gamma,A_minus_over_Gamma,n_ss,method,warning\n"));
        assert!(!text.contains('\r'));
        assert_eq!(text.lines().count(), 6);
    }

    #[test]
    fn preset_parameters() {
        let f6 = preset(PresetName::Fig6);
        let g3: Vec<f64> = f6.curves.iter().map(|c| c.config.dot.gamma[2]).collect();
        assert_eq!(g3, vec![0.5, 1.0, 2.0]);
        let f2 = preset(PresetName::Fig2);
        assert!(f2.curves.iter().all(|c| c.config.dot.t1 == 10.0 && c.config.dot.t2 == 10.0));
        for c in preset(PresetName::Fig3).curves {
            assert!(((c.config.dot.t1 + c.config.dot.t2) / 2.0 - 10.0).abs() < 1e-12);
        }
        assert!("fig5".parse::<PresetName>().is_err());
    }
}
