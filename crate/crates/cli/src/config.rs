//! Experiment configuration: JSON in SI units (Hz, nm, µm, ms).
//!
//! Every block rejects unknown keys. Missing blocks and fields take the
//! defaults below; `resolve` fills the automatic grid so the echoed file
//! states exactly what ran.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use solitonlab_core::physics::{LatticeConfig, NonlinearKind, RampConfig, TrapConfig};
use solitonlab_core::units::RB87_MASS;

use crate::error::CliError;

/// A number or the string "auto".
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Auto<T> {
    Value(T),
    Keyword(AutoKeyword),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AutoKeyword {
    #[serde(rename = "auto")]
    Auto,
}

impl<T: Copy> Auto<T> {
    pub fn auto() -> Self {
        Auto::Keyword(AutoKeyword::Auto)
    }

    pub fn value(&self) -> Option<T> {
        match self {
            Auto::Value(v) => Some(*v),
            Auto::Keyword(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub trap: TrapSection,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub time: TimeSection,
    #[serde(default)]
    pub merge: MergeSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub fig2c: Fig2cSection,
    #[serde(default)]
    pub tracking: TrackingSection,
    #[serde(default)]
    pub resolution: ResolutionSection,
    #[serde(default)]
    pub output: OutputSection,
}

fn default_scattering_length_nm() -> f64 {
    5.3
}

fn default_mass_kg() -> f64 {
    RB87_MASS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrapSection {
    pub nu_z: f64,
    pub nu_perp: f64,
    pub atom_number: u64,
    #[serde(default = "default_scattering_length_nm")]
    pub scattering_length_nm: f64,
    #[serde(default = "default_mass_kg")]
    pub mass_kg: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ramp: Option<RampSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSection {
    pub depth_hz: f64,
    pub spacing_um: f64,
    #[serde(default)]
    pub offset_um: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencyPair {
    pub nu_z: f64,
    pub nu_perp: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RampSection {
    pub initial: FrequencyPair,
    /// Must equal (trap.nu_z, trap.nu_perp) when given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r#final: Option<FrequencyPair>,
    pub duration_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Npse,
    Gpe1d,
}

impl From<ModelKind> for NonlinearKind {
    fn from(k: ModelKind) -> Self {
        match k {
            ModelKind::Npse => NonlinearKind::Npse,
            ModelKind::Gpe1d => NonlinearKind::Gpe1d,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    pub kind: ModelKind,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self { kind: ModelKind::Npse }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub n_points: Auto<usize>,
    pub box_length_um: Auto<f64>,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            n_points: Auto::auto(),
            box_length_um: Auto::auto(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeSection {
    /// Real-time step; "auto" applies the stability guard to the prepared state.
    pub dt_ms: Auto<f64>,
    pub evolve_ms: f64,
    pub snapshot_interval_ms: f64,
    pub ground_state_tol: f64,
}

impl Default for TimeSection {
    fn default() -> Self {
        Self {
            dt_ms: Auto::auto(),
            evolve_ms: 120.0,
            snapshot_interval_ms: 0.5,
            ground_state_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MergeSection {
    /// Overrides trap.lattice.depth_hz; 1 kHz without either.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub barrier_depth_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lattice_spacing_um: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lattice_offset_um: Option<f64>,
    /// Time spent in the double well before the lattice is switched off.
    pub hold_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evolve_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snapshot_interval_ms: Option<f64>,
}

impl Default for MergeSection {
    fn default() -> Self {
        Self {
            barrier_depth_hz: None,
            lattice_spacing_um: None,
            lattice_offset_um: None,
            hold_ms: 0.0,
            evolve_ms: None,
            snapshot_interval_ms: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    /// Requested outer turning points of each soliton [µm].
    pub amplitudes_um: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evolve_ms: Option<f64>,
    pub max_refinements: usize,
    /// Relative mismatch accepted between requested and measured amplitude.
    pub amplitude_tolerance: f64,
    pub include_single: bool,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            amplitudes_um: vec![1.75, 2.0, 2.25, 2.5, 3.0, 3.5, 4.0, 4.5],
            evolve_ms: None,
            max_refinements: 5,
            amplitude_tolerance: 0.02,
            include_single: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Abscissa {
    /// Outer turning point of each soliton.
    Peak,
    /// Peak divided by √2.
    Rms,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Fig2cSection {
    /// Amplitude grid; the sweep amplitudes when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitudes_um: Option<Vec<f64>>,
    pub abscissa: Abscissa,
}

impl Default for Fig2cSection {
    fn default() -> Self {
        Self {
            amplitudes_um: None,
            abscissa: Abscissa::Peak,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrackingSection {
    pub search_window_fraction: f64,
    pub min_contrast: f64,
    /// Single-soliton offset as a fraction of the condensate radius.
    pub single_offset_fraction: f64,
    /// Lower bound on the single-soliton run length, in periods of ν_z/√2.
    pub single_min_periods: f64,
}

impl Default for TrackingSection {
    fn default() -> Self {
        Self {
            search_window_fraction: 0.7,
            min_contrast: 0.2,
            single_offset_fraction: 0.1,
            single_min_periods: 6.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ResolutionSection {
    pub sigma_z_um: f64,
    pub sigma_t_ms: f64,
}

impl Default for ResolutionSection {
    fn default() -> Self {
        Self {
            sigma_z_um: 1.0,
            sigma_t_ms: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    /// Used when --out is not given.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub directory: Option<String>,
    pub write_carpets: bool,
    /// Keep every k-th snapshot in carpet files.
    pub carpet_stride: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            directory: None,
            write_carpets: true,
            carpet_stride: 1,
        }
    }
}

/// Reads a JSON file, applies `key=value` overrides and validates.
pub fn load_config(path: &Path, overrides: &[String]) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    let mut value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    for o in overrides {
        apply_override(&mut value, o)?;
    }
    from_value(value)
}

/// Deserialises and validates an in-memory JSON document.
pub fn from_value(value: Value) -> Result<ExperimentConfig, CliError> {
    let cfg: ExperimentConfig = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        CliError::Validation(format!("{path}: {}", e.into_inner()))
    })?;
    cfg.validate()?;
    Ok(cfg)
}

/// Sets a dotted path, e.g. `trap.nu_z=58` or `sweep.amplitudes_um=[2,3]`.
///
/// The value is parsed as JSON and taken as a string when that fails.
pub fn apply_override(root: &mut Value, assignment: &str) -> Result<(), CliError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Validation(format!("override '{assignment}' is not key=value")))?;
    let parts: Vec<&str> = key.trim().split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::Validation(format!("override key '{key}' is malformed")));
    }
    let parsed = serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.trim().to_string()));
    let mut node = root;
    for (i, part) in parts.iter().enumerate() {
        let obj = match node {
            Value::Object(map) => map,
            _ => {
                return Err(CliError::Validation(format!(
                    "override '{key}': '{}' is not an object",
                    parts[..i].join(".")
                )))
            }
        };
        if i + 1 == parts.len() {
            obj.insert(part.to_string(), parsed);
            return Ok(());
        }
        node = obj
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    Ok(())
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Validation(format!("{name} must be positive and finite, got {v}")))
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        self.trap_config().validate().map_err(|e| CliError::Validation(strip(e)))?;
        if let Some(f) = self.trap.ramp.as_ref().and_then(|r| r.r#final) {
            if f.nu_z != self.trap.nu_z || f.nu_perp != self.trap.nu_perp {
                return Err(CliError::Validation(format!(
                    "trap.ramp.final ({}, {}) Hz must equal trap.nu_z/trap.nu_perp ({}, {}) Hz",
                    f.nu_z, f.nu_perp, self.trap.nu_z, self.trap.nu_perp
                )));
            }
        }
        if let Auto::Value(n) = self.grid.n_points {
            if n < 256 || !n.is_power_of_two() {
                return Err(CliError::Validation(format!(
                    "grid.n_points must be a power of two >= 256, got {n}"
                )));
            }
        }
        if let Auto::Value(l) = self.grid.box_length_um {
            positive("grid.box_length_um", l)?;
        }
        if let Auto::Value(dt) = self.time.dt_ms {
            positive("time.dt_ms", dt)?;
        }
        positive("time.evolve_ms", self.time.evolve_ms)?;
        positive("time.snapshot_interval_ms", self.time.snapshot_interval_ms)?;
        positive("time.ground_state_tol", self.time.ground_state_tol)?;
        let m = &self.merge;
        if let Some(d) = m.barrier_depth_hz {
            if !(d >= 0.0 && d.is_finite()) {
                return Err(CliError::Validation(format!("merge.barrier_depth_hz must be >= 0, got {d}")));
            }
        }
        if let Some(s) = m.lattice_spacing_um {
            positive("merge.lattice_spacing_um", s)?;
        }
        if !(m.hold_ms >= 0.0) {
            return Err(CliError::Validation("merge.hold_ms must be >= 0".into()));
        }
        if let Some(e) = m.evolve_ms {
            positive("merge.evolve_ms", e)?;
        }
        if let Some(s) = m.snapshot_interval_ms {
            positive("merge.snapshot_interval_ms", s)?;
        }
        for (i, &a) in self.sweep.amplitudes_um.iter().enumerate() {
            positive(&format!("sweep.amplitudes_um[{i}]"), a)?;
        }
        if let Some(e) = self.sweep.evolve_ms {
            positive("sweep.evolve_ms", e)?;
        }
        positive("sweep.amplitude_tolerance", self.sweep.amplitude_tolerance)?;
        if let Some(a) = &self.fig2c.amplitudes_um {
            for (i, &x) in a.iter().enumerate() {
                positive(&format!("fig2c.amplitudes_um[{i}]"), x)?;
            }
        }
        let t = &self.tracking;
        if !(t.search_window_fraction > 0.0 && t.search_window_fraction <= 1.0) {
            return Err(CliError::Validation("tracking.search_window_fraction must lie in (0, 1]".into()));
        }
        if !(t.min_contrast >= 0.0 && t.min_contrast < 1.0) {
            return Err(CliError::Validation("tracking.min_contrast must lie in [0, 1)".into()));
        }
        if !(t.single_offset_fraction > 0.0 && t.single_offset_fraction < 0.7) {
            return Err(CliError::Validation("tracking.single_offset_fraction must lie in (0, 0.7)".into()));
        }
        positive("tracking.single_min_periods", t.single_min_periods)?;
        let r = &self.resolution;
        if !(r.sigma_z_um >= 0.0) || !(r.sigma_t_ms >= 0.0) {
            return Err(CliError::Validation("resolution widths must be >= 0".into()));
        }
        if self.output.carpet_stride == 0 {
            return Err(CliError::Validation("output.carpet_stride must be >= 1".into()));
        }
        Ok(())
    }

    /// Trap as the physics layer sees it (the ramp ends at the trap frequencies).
    pub fn trap_config(&self) -> TrapConfig {
        let t = &self.trap;
        TrapConfig {
            nu_z: t.nu_z,
            nu_perp: t.nu_perp,
            atom_number: t.atom_number,
            scattering_length_nm: t.scattering_length_nm,
            mass_kg: t.mass_kg,
            lattice: t.lattice.map(|l| LatticeConfig {
                depth_hz: l.depth_hz,
                spacing_um: l.spacing_um,
                offset_um: l.offset_um,
            }),
            ramp: t.ramp.map(|r| {
                let f = r.r#final.unwrap_or(FrequencyPair {
                    nu_z: t.nu_z,
                    nu_perp: t.nu_perp,
                });
                RampConfig {
                    initial: (r.initial.nu_z, r.initial.nu_perp),
                    final_: (f.nu_z, f.nu_perp),
                    duration_ms: r.duration_ms,
                }
            }),
        }
    }

    /// Same trap without ramp or lattice: the static trap of interest.
    pub fn static_trap(&self) -> TrapConfig {
        TrapConfig {
            lattice: None,
            ramp: None,
            ..self.trap_config()
        }
    }

    /// Lattice used by the merge pipeline.
    pub fn merge_lattice(&self) -> LatticeConfig {
        let base = self.trap.lattice.unwrap_or(LatticeSection {
            depth_hz: 1000.0,
            spacing_um: 5.7,
            offset_um: 0.0,
        });
        LatticeConfig {
            depth_hz: self.merge.barrier_depth_hz.unwrap_or(base.depth_hz),
            spacing_um: self.merge.lattice_spacing_um.unwrap_or(base.spacing_um),
            offset_um: self.merge.lattice_offset_um.unwrap_or(base.offset_um),
        }
    }

    /// Amplitudes of the fig2c grid as outer turning points [µm].
    pub fn fig2c_turning_points(&self) -> Vec<f64> {
        let grid = self
            .fig2c
            .amplitudes_um
            .clone()
            .unwrap_or_else(|| self.sweep.amplitudes_um.clone());
        match self.fig2c.abscissa {
            Abscissa::Peak => grid,
            Abscissa::Rms => grid.iter().map(|a| a * std::f64::consts::SQRT_2).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }
}

fn strip(e: solitonlab_core::Error) -> String {
    match e {
        solitonlab_core::Error::InvalidInput(m) => m,
        other => other.to_string(),
    }
}
