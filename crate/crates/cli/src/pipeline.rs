//! The experiment pipelines. Everything here returns plain results; files
//! are written by [`crate::commands`].

use rayon::prelude::*;

use solitonlab_core::hamiltonian::{Potential, Superposition};
use solitonlab_core::particle::{frequency_vs_amplitude, Mode, ParticleParams};
use solitonlab_core::physics::{
    critical_distance, double_well_minima, imprint_soliton, imprint_soliton_pair, OpticalLattice, TrapConfig,
};
use solitonlab_core::tracking::{
    apply_resolution, estimate_radius, fit_frequency, fit_sinusoid, track_pair, track_single, DetectOptions,
    FrameQuality, PairSelection, SinusoidFit, TrackOptions,
};
use solitonlab_core::{DensityCarpet, FrequencyFit, GroundState, TrackResult, Wavefunction};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::sim::{record_carpet, snapshot_count, Setup};
use crate::timing::Timings;

fn track_options(cfg: &ExperimentConfig) -> TrackOptions<f64> {
    TrackOptions {
        detect: DetectOptions {
            search_window_fraction: cfg.tracking.search_window_fraction,
            min_contrast: cfg.tracking.min_contrast,
        },
        ..Default::default()
    }
}

/// ν_z/√2 of the static trap [Hz].
pub fn tf1d_frequency(cfg: &ExperimentConfig) -> f64 {
    cfg.trap.nu_z / std::f64::consts::SQRT_2
}

pub struct GroundStateOutcome {
    pub state: GroundState,
    pub potential: Vec<f64>,
    pub mu_hz: f64,
    pub energy_hz: f64,
    pub radius_um: f64,
    pub healing_length_um: f64,
}

/// Ground state in the t = 0 trap, lattice included when configured.
pub fn run_ground_state(cfg: &ExperimentConfig, timings: &mut Timings) -> Result<GroundStateOutcome, CliError> {
    let setup = Setup::new(cfg, cfg.trap_config())?;
    let potential = initial_potential(&setup);
    let state = timings.stage("ground_state", || setup.ground_state(&potential, cfg.time.ground_state_tol))?;
    let radius = estimate_radius(&state.psi.density(), &setup.grid);
    Ok(GroundStateOutcome {
        potential: potential.sampled(&setup.grid, 0.0),
        mu_hz: setup.units.hz_from_energy(state.chemical_potential),
        energy_hz: setup.units.hz_from_energy(state.energy),
        radius_um: radius,
        healing_length_um: state.chemical_potential.sqrt().recip(),
        state,
    })
}

fn initial_potential(setup: &Setup) -> Box<dyn Potential<f64>> {
    match setup.lattice() {
        Some(l) => Box::new(Superposition(setup.harmonic(), l)),
        None => Box::new(setup.harmonic()),
    }
}

pub struct MergeOutcome {
    pub ground: GroundStateOutcome,
    pub carpet: DensityCarpet,
    pub blurred: DensityCarpet,
    pub track: TrackResult,
    pub fit: Result<FrequencyFit, String>,
    /// Detected dips per frame.
    pub counts: Vec<usize>,
    /// Most frequent entry of `counts` (the smaller one on ties).
    pub typical_count: usize,
    /// Mean of (z_left + z_right)/2 over usable frames [µm].
    pub mean_pair_center_um: Option<f64>,
    pub well_separation_um: f64,
    pub critical_distance_um: f64,
    pub dt_ms: f64,
}

/// Double well → lattice off at t = 0 → frequency ramp → evolution.
pub fn run_merge(cfg: &ExperimentConfig, timings: &mut Timings) -> Result<MergeOutcome, CliError> {
    let lattice = cfg.merge_lattice();
    let trap = TrapConfig {
        lattice: Some(lattice),
        ..cfg.trap_config()
    };
    trap.validate()?;
    let setup = Setup::new(cfg, trap.clone())?;
    let harmonic = setup.harmonic();
    let well = OpticalLattice {
        depth: setup.units.energy_from_hz(lattice.depth_hz),
        spacing: lattice.spacing_um,
        offset: lattice.offset_um,
    };
    let prepare = Superposition(harmonic, well);
    let state = timings.stage("ground_state", || setup.ground_state(&prepare, cfg.time.ground_state_tol))?;
    let mut psi = state.psi.clone();

    let snapshot_ms = cfg.merge.snapshot_interval_ms.unwrap_or(cfg.time.snapshot_interval_ms);
    if cfg.merge.hold_ms > 0.0 {
        // Held in the double well at the initial frequencies; the ramp clock
        // starts when the lattice goes off.
        let frozen = Superposition(
            solitonlab_core::physics::RampedHarmonic::stationary(setup.omega_z0()),
            well,
        );
        let (dt, per) = setup.time_step(cfg, &psi, &frozen, snapshot_ms)?;
        let steps = snapshot_count(cfg.merge.hold_ms, snapshot_ms) * per;
        psi = timings.stage("hold", || {
            solitonlab_core::evolve::evolve_real_time(psi, &frozen, &setup.spec, dt, steps, 0, |_| {})
        })?;
        psi.set_time(0.0);
    }

    let (dt, per) = setup.time_step(cfg, &psi, &harmonic, snapshot_ms)?;
    let evolve_ms = cfg.merge.evolve_ms.unwrap_or(cfg.time.evolve_ms);
    let n_snap = snapshot_count(evolve_ms, snapshot_ms);
    let (_, carpet) = timings.stage("evolve", || record_carpet(&setup, psi, &harmonic, dt, per, n_snap))?;

    let blurred = timings.stage("resolution", || {
        apply_resolution(&carpet, cfg.resolution.sigma_z_um, cfg.resolution.sigma_t_ms)
    });
    // The merge leaves extra solitons and sound outside the central pair, so
    // the pair is followed by position rather than by contrast.
    let opts = TrackOptions {
        selection: PairSelection::Innermost,
        ..track_options(cfg)
    };
    let track = timings.stage("tracking", || track_pair(&carpet, &opts))?;
    let fit = fit_frequency(&track).map_err(|e| e.to_string());
    let counts: Vec<usize> = track.frames.iter().map(|f| f.dips.len()).collect();
    let typical_count = most_frequent(&counts);
    let centers: Vec<f64> = track
        .frames
        .iter()
        .filter(|f| f.quality == FrameQuality::Ok)
        .map(|f| 0.5 * (f.selected[0] + f.selected[1]))
        .collect();
    let mean_pair_center_um = (!centers.is_empty()).then(|| centers.iter().sum::<f64>() / centers.len() as f64);

    let (left, right) = double_well_minima(setup.omega_z0(), &well);
    let nu_z0 = trap.ramp.map_or(trap.nu_z, |r| r.initial.0);
    let critical = critical_distance(
        trap.atom_number as f64,
        trap.scattering_length_nm * 1e-9,
        nu_z0,
        trap.mass_kg,
    ) * 1e6;
    let ground = GroundStateOutcome {
        potential: prepare.sampled(&setup.grid, 0.0),
        mu_hz: setup.units.hz_from_energy(state.chemical_potential),
        energy_hz: setup.units.hz_from_energy(state.energy),
        radius_um: estimate_radius(&state.psi.density(), &setup.grid),
        healing_length_um: state.chemical_potential.sqrt().recip(),
        state,
    };
    Ok(MergeOutcome {
        ground,
        carpet,
        blurred,
        track,
        fit,
        counts,
        typical_count,
        mean_pair_center_um,
        well_separation_um: right - left,
        critical_distance_um: critical,
        dt_ms: setup.units.ms_from_time(dt),
    })
}

fn most_frequent(counts: &[usize]) -> usize {
    let mut tally = std::collections::BTreeMap::new();
    for &c in counts {
        *tally.entry(c).or_insert(0usize) += 1;
    }
    // max_by_key keeps the last maximum; iterate in reverse so ties go to the smaller count.
    tally.into_iter().rev().max_by_key(|&(_, n)| n).map_or(0, |(c, _)| c)
}

/// Ground state of the static trap of interest, shared by the soliton runs.
struct Prepared {
    setup: Setup,
    state: GroundState,
    radius: f64,
}

fn prepare_static(cfg: &ExperimentConfig, timings: &mut Timings) -> Result<Prepared, CliError> {
    let setup = Setup::new(cfg, cfg.static_trap())?;
    let harmonic = setup.harmonic();
    let state = timings.stage("ground_state", || setup.ground_state(&harmonic, cfg.time.ground_state_tol))?;
    let radius = estimate_radius(&state.psi.density(), &setup.grid);
    Ok(Prepared { setup, state, radius })
}

pub struct SingleOutcome {
    pub nu_1s_hz: f64,
    pub ratio: f64,
    pub uncertainty_hz: f64,
    pub mu_hz: f64,
    /// μ and ν₁ₛ in internal units, ready for the particle model.
    pub mu_internal: f64,
    pub nu_1s_internal: f64,
    pub healing_length_um: f64,
    pub offset_um: f64,
    pub radius_um: f64,
    pub fit: SinusoidFit<f64>,
    pub track: TrackResult,
    pub carpet: DensityCarpet,
    pub dt_ms: f64,
}

/// Single dark soliton imprinted off centre; its position is fitted directly.
pub fn run_single_soliton_frequency(cfg: &ExperimentConfig, timings: &mut Timings) -> Result<SingleOutcome, CliError> {
    let prep = prepare_static(cfg, timings)?;
    single_from(cfg, &prep, timings)
}

fn single_from(cfg: &ExperimentConfig, prep: &Prepared, timings: &mut Timings) -> Result<SingleOutcome, CliError> {
    let setup = &prep.setup;
    let mu = prep.state.chemical_potential;
    let offset = cfg.tracking.single_offset_fraction * prep.radius;
    let psi = imprint_soliton(&prep.state.psi, offset, 0.0, mu)?;
    let harmonic = setup.harmonic();
    let snapshot_ms = cfg.time.snapshot_interval_ms;
    let (dt, per) = setup.time_step(cfg, &psi, &harmonic, snapshot_ms)?;
    let min_ms = cfg.tracking.single_min_periods / tf1d_frequency(cfg) * 1e3;
    let n_snap = snapshot_count(cfg.time.evolve_ms.max(min_ms), snapshot_ms);
    let (_, carpet) = timings.stage("single_evolve", || record_carpet(setup, psi, &harmonic, dt, per, n_snap))?;
    let track = track_single(&carpet, &track_options(cfg))?;
    let (t, z) = track.position_series();
    let fit = fit_sinusoid(&t, &z)?;
    let nu = fit.frequency * 1e3;
    Ok(SingleOutcome {
        nu_1s_hz: nu,
        ratio: nu / tf1d_frequency(cfg),
        uncertainty_hz: fit.frequency_uncertainty * 1e3,
        mu_hz: setup.units.hz_from_energy(mu),
        mu_internal: mu,
        nu_1s_internal: nu * setup.units.time_unit_s(),
        healing_length_um: mu.sqrt().recip(),
        offset_um: offset,
        radius_um: prep.radius,
        fit,
        track,
        carpet,
        dt_ms: setup.units.ms_from_time(dt),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// Requested outer turning point [µm].
    pub requested_um: f64,
    /// Imprint position of the last run [µm].
    pub z0_um: f64,
    /// Measured outer turning point (d₀ + A)/2 [µm].
    pub amplitude_um: f64,
    /// A/2 and A/(2√2) of the distance oscillation [µm].
    pub peak_amplitude_um: f64,
    pub rms_amplitude_um: f64,
    pub nu_s_hz: f64,
    pub ratio: f64,
    pub uncertainty_hz: f64,
    pub runs: usize,
    pub matched: bool,
}

pub struct SweepOutcome {
    pub single: Option<SingleOutcome>,
    pub rows: Vec<SweepRow>,
    pub dt_ms: f64,
}

struct PairRun {
    fit: FrequencyFit,
}

fn pair_run(cfg: &ExperimentConfig, prep: &Prepared, z0: f64, dt: f64, per: usize, n_snap: usize) -> Result<PairRun, CliError> {
    let psi: Wavefunction = imprint_soliton_pair(&prep.state.psi, z0, 0.0, prep.state.chemical_potential)?;
    let harmonic = prep.setup.harmonic();
    let (_, carpet) = record_carpet(&prep.setup, psi, &harmonic, dt, per, n_snap)?;
    let track = track_pair(&carpet, &track_options(cfg))?;
    let fit = fit_frequency(&track)?;
    Ok(PairRun { fit })
}

/// Secant search on the imprint position until the measured turning point
/// matches the request.
fn matched_pair(
    cfg: &ExperimentConfig,
    prep: &Prepared,
    target: f64,
    dt: f64,
    per: usize,
    n_snap: usize,
) -> Result<SweepRow, CliError> {
    let tol = cfg.sweep.amplitude_tolerance;
    let mut z_prev = target;
    let mut run = pair_run(cfg, prep, z_prev, dt, per, n_snap)?;
    let mut f_prev = run.fit.max_displacement - target;
    let mut z = z_prev;
    let mut runs = 1;
    let mut step_z = z_prev - f_prev;
    for _ in 0..cfg.sweep.max_refinements {
        if (f_prev / target).abs() <= tol {
            break;
        }
        z = step_z.clamp(0.2 * target, 0.95 * prep.radius);
        let next = pair_run(cfg, prep, z, dt, per, n_snap)?;
        runs += 1;
        let f = next.fit.max_displacement - target;
        run = next;
        let slope = (f - f_prev) / (z - z_prev);
        z_prev = z;
        f_prev = f;
        step_z = if slope.is_finite() && slope.abs() > 1e-3 { z - f / slope } else { z - f };
    }
    let fit = run.fit;
    let nu = fit.soliton_frequency * 1e3;
    Ok(SweepRow {
        requested_um: target,
        z0_um: z,
        amplitude_um: fit.max_displacement,
        peak_amplitude_um: fit.peak_amplitude,
        rms_amplitude_um: fit.rms_amplitude,
        nu_s_hz: nu,
        ratio: nu / tf1d_frequency(cfg),
        uncertainty_hz: fit.soliton_frequency_uncertainty * 1e3,
        runs,
        matched: (f_prev / target).abs() <= tol,
    })
}

/// Symmetric pairs imprinted at rest, one run (plus refinements) per amplitude.
pub fn run_sweep(cfg: &ExperimentConfig, timings: &mut Timings) -> Result<SweepOutcome, CliError> {
    let amplitudes = cfg.sweep.amplitudes_um.clone();
    sweep_amplitudes(cfg, &amplitudes, cfg.sweep.include_single, timings)
}

fn sweep_amplitudes(
    cfg: &ExperimentConfig,
    amplitudes: &[f64],
    include_single: bool,
    timings: &mut Timings,
) -> Result<SweepOutcome, CliError> {
    let prep = prepare_static(cfg, timings)?;
    let single = if include_single {
        Some(single_from(cfg, &prep, timings)?)
    } else {
        None
    };
    let snapshot_ms = cfg.time.snapshot_interval_ms;
    // The step is fixed by the unperturbed ground state so every amplitude
    // shares it; imprinting only lowers the density.
    let harmonic = prep.setup.harmonic();
    let (dt, per) = prep.setup.time_step(cfg, &prep.state.psi, &harmonic, snapshot_ms)?;
    let n_snap = snapshot_count(cfg.sweep.evolve_ms.unwrap_or(cfg.time.evolve_ms), snapshot_ms);
    let rows = timings.stage("pair_runs", || {
        amplitudes
            .par_iter()
            .map(|&a| matched_pair(cfg, &prep, a, dt, per, n_snap))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(SweepOutcome {
        single,
        rows,
        dt_ms: prep.setup.units.ms_from_time(dt),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig2cRow {
    /// Grid value on the configured abscissa [µm].
    pub abscissa_um: f64,
    pub pair: SweepRow,
    /// (a) ν_z/√2.
    pub nu_tf1d_hz: f64,
    /// (b) single soliton.
    pub nu_single_hz: f64,
    /// (c) simulated pair.
    pub nu_pair_hz: f64,
    /// (d) particle model at the measured turning point.
    pub nu_particle_hz: f64,
}

pub struct Fig2cOutcome {
    pub single: SingleOutcome,
    pub rows: Vec<Fig2cRow>,
}

/// The four frequency curves over the amplitude grid.
pub fn run_fig2c(cfg: &ExperimentConfig, timings: &mut Timings) -> Result<Fig2cOutcome, CliError> {
    let turning = cfg.fig2c_turning_points();
    let grid = cfg
        .fig2c
        .amplitudes_um
        .clone()
        .unwrap_or_else(|| cfg.sweep.amplitudes_um.clone());
    let sweep = sweep_amplitudes(cfg, &turning, true, timings)?;
    let single = sweep.single.expect("single run requested");
    let params = ParticleParams::new(single.nu_1s_internal, single.mu_internal, Mode::Pair)?;
    let measured: Vec<f64> = sweep.rows.iter().map(|r| r.amplitude_um).collect();
    let model = timings.stage("particle_model", || frequency_vs_amplitude(&params, &measured))?;
    let to_hz = single.nu_1s_hz / single.nu_1s_internal;
    let rows = grid
        .iter()
        .zip(sweep.rows)
        .zip(model)
        .map(|((&x, pair), (_, nu))| Fig2cRow {
            abscissa_um: x,
            nu_tf1d_hz: tf1d_frequency(cfg),
            nu_single_hz: single.nu_1s_hz,
            nu_pair_hz: pair.nu_s_hz,
            nu_particle_hz: nu * to_hz,
            pair,
        })
        .collect();
    Ok(Fig2cOutcome { single, rows })
}

pub struct CriticalDistance {
    pub nu_z_hz: f64,
    pub distance_um: f64,
}

/// D_c at the t = 0 longitudinal frequency (where a double well would be prepared).
pub fn run_critical_distance(cfg: &ExperimentConfig) -> CriticalDistance {
    let trap = cfg.trap_config();
    let nu_z = trap.ramp.map_or(trap.nu_z, |r| r.initial.0);
    let d = critical_distance(
        trap.atom_number as f64,
        trap.scattering_length_nm * 1e-9,
        nu_z,
        trap.mass_kg,
    );
    CriticalDistance {
        nu_z_hz: nu_z,
        distance_um: d * 1e6,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn most_frequent_prefers_the_smaller_count_on_ties() {
        assert_eq!(most_frequent(&[4, 6, 4, 6, 5]), 4);
        assert_eq!(most_frequent(&[2, 6, 6, 4]), 6);
        assert_eq!(most_frequent(&[]), 0);
    }
}
