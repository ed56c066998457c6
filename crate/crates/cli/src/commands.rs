//! Subcommand drivers: load config, run a pipeline, write artifacts and the
//! manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use solitonlab_core::tracking::FrameQuality;

use crate::config::{load_config, ExperimentConfig};
use crate::error::CliError;
use crate::output::{num, opt, write_carpet, write_csv};
use crate::pipeline::{
    run_critical_distance, run_fig2c, run_ground_state, run_merge, run_single_soliton_frequency, run_sweep,
    tf1d_frequency, SweepRow,
};
use crate::sim::resolved;
use crate::timing::Timings;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    GroundState,
    Merge,
    SingleFreq,
    Sweep,
    Fig2c,
    CriticalDistance,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::GroundState => "ground-state",
            Command::Merge => "merge",
            Command::SingleFreq => "single-freq",
            Command::Sweep => "sweep",
            Command::Fig2c => "fig2c",
            Command::CriticalDistance => "critical-distance",
        }
    }
}

/// Outcome of a successful command: a one-line summary and the results
/// block that also went into the manifest.
pub struct Report {
    pub summary: String,
    pub results: Value,
    pub out_dir: PathBuf,
}

pub const ECHO_FILE: &str = "config.resolved.json";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const FAILURE_MARKER: &str = "FAILED";

pub fn execute(
    command: Command,
    config_path: &Path,
    out: Option<&Path>,
    overrides: &[String],
) -> Result<Report, CliError> {
    let cfg = resolved(&load_config(config_path, overrides)?);
    let out_dir = match (out, &cfg.output.directory) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(d)) => PathBuf::from(d),
        (None, None) => {
            return Err(CliError::Validation(
                "no output directory: pass --out or set output.directory".into(),
            ))
        }
    };
    fs::create_dir_all(&out_dir)?;
    let _ = fs::remove_file(out_dir.join(FAILURE_MARKER));
    fs::write(out_dir.join(ECHO_FILE), cfg.to_json() + "\n")?;

    let mut timings = Timings::default();
    let mut files = vec![ECHO_FILE.to_string()];
    let outcome = dispatch(command, &cfg, &out_dir, &mut timings, &mut files);
    let (status, results, error) = match &outcome {
        Ok((_, r)) => ("ok", r.clone(), Value::Null),
        Err(e) => ("failed", Value::Null, json!(e.to_string())),
    };
    let manifest = json!({
        "tool": "solitonlab",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command.name(),
        "config_path": config_path.display().to_string(),
        "overrides": overrides,
        "inputs": serde_json::from_str::<Value>(&cfg.to_json()).expect("config is JSON"),
        "unit_system": unit_system(&cfg),
        "stages": timings.stages.iter().map(|(n, s)| json!({"name": n, "seconds": s})).collect::<Vec<_>>(),
        "status": status,
        "error": error,
        "results": results,
        "outputs": files,
    });
    fs::write(
        out_dir.join(MANIFEST_FILE),
        serde_json::to_string_pretty(&manifest).expect("manifest serialises") + "\n",
    )?;
    match outcome {
        Ok((summary, results)) => Ok(Report {
            summary,
            results,
            out_dir,
        }),
        Err(e) => {
            fs::write(out_dir.join(FAILURE_MARKER), format!("{e}\n"))?;
            Err(e)
        }
    }
}

fn unit_system(cfg: &ExperimentConfig) -> Value {
    let u = cfg.trap_config().units();
    json!({
        "internal": "hbar = m = 1, length unit 1 um",
        "mass_kg": u.mass_kg(),
        "time_unit_s": u.time_unit_s(),
        "energy_unit_j": u.energy_unit_j(),
        "config": "Hz, nm, um, ms",
    })
}

fn dispatch(
    command: Command,
    cfg: &ExperimentConfig,
    dir: &Path,
    timings: &mut Timings,
    files: &mut Vec<String>,
) -> Result<(String, Value), CliError> {
    let mut save = |name: &str| {
        files.push(name.to_string());
        dir.join(name)
    };
    match command {
        Command::CriticalDistance => {
            let d = run_critical_distance(cfg);
            write_csv(
                &save("critical_distance.csv"),
                &["atom_number", "nu_z_hz", "scattering_length_nm", "critical_distance_um"],
                &[vec![
                    cfg.trap.atom_number.to_string(),
                    num(d.nu_z_hz),
                    num(cfg.trap.scattering_length_nm),
                    num(d.distance_um),
                ]],
            )?;
            Ok((
                format!("critical distance D_c = {:.3} um", d.distance_um),
                json!({"nu_z_hz": d.nu_z_hz, "critical_distance_um": d.distance_um}),
            ))
        }
        Command::GroundState => {
            let g = run_ground_state(cfg, timings)?;
            let psi = &g.state.psi;
            let u = cfg.trap_config().units();
            let rows: Vec<Vec<String>> = psi
                .grid()
                .z()
                .iter()
                .zip(psi.density())
                .zip(psi.phase_profile())
                .zip(&g.potential)
                .map(|(((z, n), ph), v)| vec![num(*z), num(n), num(ph), num(u.hz_from_energy(*v))])
                .collect();
            write_csv(
                &save("ground_state.csv"),
                &["z_um", "density_per_um", "phase_rad", "potential_hz"],
                &rows,
            )?;
            let results = json!({
                "chemical_potential_hz": g.mu_hz,
                "energy_per_particle_hz": g.energy_hz,
                "residual": g.state.residual,
                "iterations": g.state.steps,
                "radius_um": g.radius_um,
                "healing_length_um": g.healing_length_um,
            });
            write_summary(&save("summary.csv"), &results)?;
            Ok((format!("mu = {:.4} Hz, radius = {:.3} um", g.mu_hz, g.radius_um), results))
        }
        Command::Merge => {
            let m = run_merge(cfg, timings)?;
            if cfg.output.write_carpets {
                write_carpet(&save("carpet_raw.csv"), &m.carpet, cfg.output.carpet_stride)?;
                write_carpet(&save("carpet_blurred.csv"), &m.blurred, cfg.output.carpet_stride)?;
            }
            write_track(&save("track.csv"), &m.track)?;
            let fit = match &m.fit {
                Ok(f) => json!({
                    "distance_frequency_hz": f.distance_frequency * 1e3,
                    "soliton_frequency_hz": f.soliton_frequency * 1e3,
                    "ratio": f.soliton_frequency * 1e3 / tf1d_frequency(cfg),
                    "uncertainty_hz": f.soliton_frequency_uncertainty * 1e3,
                    "mean_distance_um": f.mean_distance,
                    "amplitude_um": f.max_displacement,
                    "peak_amplitude_um": f.peak_amplitude,
                    "rms_amplitude_um": f.rms_amplitude,
                    "samples": f.samples,
                }),
                Err(e) => json!({"error": e}),
            };
            let results = json!({
                "chemical_potential_hz": m.ground.mu_hz,
                "well_separation_um": m.well_separation_um,
                "critical_distance_um": m.critical_distance_um,
                "typical_soliton_count": m.typical_count,
                "mean_pair_center_um": m.mean_pair_center_um,
                "dt_ms": m.dt_ms,
                "fit": fit,
            });
            write_summary(&save("fit.csv"), &results)?;
            let nu = m.fit.as_ref().map(|f| format!("{:.3} Hz", f.soliton_frequency * 1e3));
            Ok((
                format!(
                    "{} solitons (most frequent per frame), pair frequency {}",
                    m.typical_count,
                    nu.unwrap_or_else(|e| format!("unavailable ({e})"))
                ),
                results,
            ))
        }
        Command::SingleFreq => {
            let s = run_single_soliton_frequency(cfg, timings)?;
            if cfg.output.write_carpets {
                write_carpet(&save("carpet.csv"), &s.carpet, cfg.output.carpet_stride)?;
            }
            write_track(&save("track.csv"), &s.track)?;
            let results = json!({
                "nu_1s_hz": s.nu_1s_hz,
                "ratio_to_tf1d": s.ratio,
                "uncertainty_hz": s.uncertainty_hz,
                "chemical_potential_hz": s.mu_hz,
                "healing_length_um": s.healing_length_um,
                "offset_um": s.offset_um,
                "radius_um": s.radius_um,
                "fitted_amplitude_um": s.fit.amplitude,
                "dt_ms": s.dt_ms,
            });
            write_summary(&save("single_freq.csv"), &results)?;
            Ok((
                format!("nu_1s = {:.4} Hz, nu_1s/(nu_z/sqrt2) = {:.4}, mu = {:.2} Hz", s.nu_1s_hz, s.ratio, s.mu_hz),
                results,
            ))
        }
        Command::Sweep => {
            let sw = run_sweep(cfg, timings)?;
            let mut rows: Vec<Vec<String>> = Vec::new();
            if let Some(s) = &sw.single {
                rows.push(vec![
                    "single".into(),
                    num(s.offset_um),
                    num(s.offset_um),
                    num(s.fit.amplitude),
                    num(s.fit.amplitude / std::f64::consts::SQRT_2),
                    num(s.offset_um),
                    num(s.nu_1s_hz),
                    num(s.ratio),
                    num(s.uncertainty_hz),
                    "1".into(),
                    "true".into(),
                ]);
            }
            rows.extend(sw.rows.iter().map(|r| sweep_row("pair", r)));
            write_csv(&save("sweep.csv"), &SWEEP_COLUMNS, &rows)?;
            let results = json!({
                "single": sw.single.as_ref().map(|s| json!({"nu_1s_hz": s.nu_1s_hz, "ratio": s.ratio, "uncertainty_hz": s.uncertainty_hz, "chemical_potential_hz": s.mu_hz})),
                "pairs": sw.rows.iter().map(|r| json!({
                    "requested_um": r.requested_um, "amplitude_um": r.amplitude_um, "nu_s_hz": r.nu_s_hz,
                    "ratio": r.ratio, "uncertainty_hz": r.uncertainty_hz, "matched": r.matched, "runs": r.runs,
                })).collect::<Vec<_>>(),
                "dt_ms": sw.dt_ms,
            });
            let max_ratio = sw.rows.iter().map(|r| r.ratio).fold(f64::NAN, f64::max);
            let unmatched = sw.rows.iter().filter(|r| !r.matched).count();
            Ok((
                format!("{} amplitudes, max ratio {:.4}, {} unmatched", sw.rows.len(), max_ratio, unmatched),
                results,
            ))
        }
        Command::Fig2c => {
            let f = run_fig2c(cfg, timings)?;
            let abscissa = match cfg.fig2c.abscissa {
                crate::config::Abscissa::Peak => "amplitude_peak_um",
                crate::config::Abscissa::Rms => "amplitude_rms_um",
            };
            let rows: Vec<Vec<String>> = f
                .rows
                .iter()
                .map(|r| {
                    vec![
                        num(r.abscissa_um),
                        num(r.pair.amplitude_um),
                        num(r.nu_tf1d_hz),
                        num(r.nu_single_hz),
                        num(r.nu_pair_hz),
                        num(r.nu_particle_hz),
                        num(r.pair.uncertainty_hz),
                        r.pair.matched.to_string(),
                    ]
                })
                .collect();
            write_csv(
                &save("fig2c.csv"),
                &[
                    abscissa,
                    "turning_point_um",
                    "nu_tf1d_hz",
                    "nu_single_hz",
                    "nu_pair_hz",
                    "nu_particle_hz",
                    "nu_pair_uncertainty_hz",
                    "matched",
                ],
                &rows,
            )?;
            let worst = f
                .rows
                .iter()
                .map(|r| ((r.nu_particle_hz - r.nu_pair_hz) / r.nu_pair_hz).abs())
                .fold(0.0, f64::max);
            let results = json!({
                "nu_1s_hz": f.single.nu_1s_hz,
                "chemical_potential_hz": f.single.mu_hz,
                "max_model_deviation": worst,
                "rows": f.rows.iter().map(|r| json!({
                    "abscissa_um": r.abscissa_um, "turning_point_um": r.pair.amplitude_um,
                    "nu_pair_hz": r.nu_pair_hz, "nu_particle_hz": r.nu_particle_hz,
                })).collect::<Vec<_>>(),
            });
            Ok((
                format!("{} amplitudes, largest model/simulation deviation {:.2}%", f.rows.len(), 100.0 * worst),
                results,
            ))
        }
    }
}

const SWEEP_COLUMNS: [&str; 11] = [
    "kind",
    "requested_um",
    "amplitude_um",
    "peak_amplitude_um",
    "rms_amplitude_um",
    "z0_um",
    "nu_s_hz",
    "ratio_to_tf1d",
    "uncertainty_hz",
    "runs",
    "matched",
];

fn sweep_row(kind: &str, r: &SweepRow) -> Vec<String> {
    vec![
        kind.into(),
        num(r.requested_um),
        num(r.amplitude_um),
        num(r.peak_amplitude_um),
        num(r.rms_amplitude_um),
        num(r.z0_um),
        num(r.nu_s_hz),
        num(r.ratio),
        num(r.uncertainty_hz),
        r.runs.to_string(),
        r.matched.to_string(),
    ]
}

fn write_track(path: &Path, track: &solitonlab_core::TrackResult) -> Result<(), CliError> {
    let rows: Vec<Vec<String>> = track
        .frames
        .iter()
        .map(|f| {
            let left = f.selected.first().copied();
            let right = f.selected.get(1).copied();
            let quality = match f.quality {
                FrameQuality::Ok => "ok",
                FrameQuality::TooFewDips => "too_few_dips",
                FrameQuality::SameSide => "same_side",
                FrameQuality::NearCollision => "near_collision",
                FrameQuality::Degenerate => "degenerate",
            };
            vec![
                num(f.time),
                f.dips.len().to_string(),
                opt(left),
                opt(right),
                opt(f.distance()),
                quality.to_string(),
            ]
        })
        .collect();
    write_csv(
        path,
        &["t_ms", "n_dips", "z_first_um", "z_second_um", "distance_um", "quality"],
        &rows,
    )
}

/// Flattens a results object into `key,value` rows.
fn write_summary(path: &Path, results: &Value) -> Result<(), CliError> {
    let mut rows = Vec::new();
    flatten("", results, &mut rows);
    write_csv(path, &["quantity", "value"], &rows)
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<Vec<String>>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, rows);
            }
        }
        Value::Null => rows.push(vec![prefix.to_string(), "nan".into()]),
        Value::String(s) => rows.push(vec![prefix.to_string(), format!("\"{}\"", s.replace('"', "'"))]),
        other => rows.push(vec![prefix.to_string(), other.to_string()]),
    }
}
