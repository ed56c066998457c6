//! Shared simulation plumbing: grid choice, ground states, time steps and
//! carpet recording.

use std::sync::Arc;

use solitonlab_core::evolve::{Propagator, TIMESTEP_GUARD};
use solitonlab_core::ground_state::{ground_state_imaginary_time, GroundStateOptions};
use solitonlab_core::hamiltonian::{Nonlinearity, Potential};
use solitonlab_core::physics::{NonlinearSpec, OpticalLattice, RampedHarmonic, TrapConfig};
use solitonlab_core::units::UnitSystem;
use solitonlab_core::{DensityCarpet, Grid, GroundState, Wavefunction};

use crate::config::{Auto, ExperimentConfig};
use crate::error::CliError;

/// Smallest grid used when the size is automatic.
pub const MIN_POINTS: usize = 256;
/// Automatic box length in units of the largest Thomas–Fermi radius.
pub const BOX_PER_RADIUS: f64 = 4.5;

/// 1D GPE Thomas–Fermi estimates (μ, R) for frequencies in Hz.
pub fn thomas_fermi_estimate(trap: &TrapConfig, nu_z: f64, nu_perp: f64) -> (f64, f64) {
    let u = trap.units();
    let wz = u.angular_from_hz(nu_z);
    let wp = u.angular_from_hz(nu_perp);
    let g1 = 2.0 * wp * trap.scattering_length() * trap.atom_number as f64;
    let mu = (3.0 / (4.0 * std::f64::consts::SQRT_2) * g1 * wz).powf(2.0 / 3.0);
    // Weakly interacting clouds are Gaussian; never go below four oscillator lengths.
    let r = ((2.0 * mu).sqrt() / wz).max(4.0 / wz.sqrt());
    (mu, r)
}

/// (n_points, box_length µm) honouring explicit settings.
pub fn resolve_grid(cfg: &ExperimentConfig) -> (usize, f64) {
    let trap = cfg.trap_config();
    let mut freqs = vec![(trap.nu_z, trap.nu_perp)];
    if let Some(r) = &trap.ramp {
        freqs.push(r.initial);
    }
    let (mut mu_max, mut r_max) = (0.0f64, 0.0f64);
    for (z, p) in freqs {
        let (mu, r) = thomas_fermi_estimate(&trap, z, p);
        mu_max = mu_max.max(mu);
        r_max = r_max.max(r);
    }
    let box_length = cfg
        .grid
        .box_length_um
        .value()
        .unwrap_or_else(|| (BOX_PER_RADIUS * r_max).ceil());
    let n_points = cfg.grid.n_points.value().unwrap_or_else(|| {
        let xi = mu_max.sqrt().recip();
        let mut n = MIN_POINTS;
        while box_length / n as f64 > 0.25 * xi {
            n *= 2;
        }
        n
    });
    (n_points, box_length)
}

/// Copy of the config with the automatic grid written out.
pub fn resolved(cfg: &ExperimentConfig) -> ExperimentConfig {
    let (n, l) = resolve_grid(cfg);
    let mut out = cfg.clone();
    out.grid.n_points = Auto::Value(n);
    out.grid.box_length_um = Auto::Value(l);
    out
}

pub struct Setup {
    pub units: UnitSystem,
    pub trap: TrapConfig,
    pub spec: NonlinearSpec<f64>,
    pub grid: Arc<Grid>,
}

impl Setup {
    /// Grid and nonlinearity for `trap` (which may differ from the config's
    /// trap, e.g. the static trap of interest).
    pub fn new(cfg: &ExperimentConfig, trap: TrapConfig) -> Result<Self, CliError> {
        let (n, l) = resolve_grid(cfg);
        let grid = Arc::new(Grid::new(n, l)?);
        let spec = NonlinearSpec::from_trap(cfg.model.kind.into(), &trap)?;
        Ok(Self {
            units: trap.units(),
            trap,
            spec,
            grid,
        })
    }

    pub fn harmonic(&self) -> RampedHarmonic<f64> {
        RampedHarmonic {
            schedule: self.trap.schedule(),
        }
    }

    pub fn lattice(&self) -> Option<OpticalLattice<f64>> {
        self.trap.lattice.map(|l| OpticalLattice {
            depth: self.units.energy_from_hz(l.depth_hz),
            spacing: l.spacing_um,
            offset: l.offset_um,
        })
    }

    /// ω_z at t = 0.
    pub fn omega_z0(&self) -> f64 {
        self.trap.schedule::<f64>().at(0.0).0
    }

    pub fn ground_state<P: Potential<f64> + ?Sized>(&self, potential: &P, tol: f64) -> Result<GroundState, CliError> {
        let opts = GroundStateOptions {
            tol,
            omega_ref: self.omega_z0(),
            ..Default::default()
        };
        Ok(ground_state_imaginary_time(self.grid.clone(), potential, &self.spec, &opts, None)?)
    }

    /// Real-time step: the configured or guard-limited value, shortened so
    /// that a whole number of steps fits in one snapshot interval.
    ///
    /// The guard is evaluated with the prepared density at the start of the
    /// run and at the end of the ramp, so a tightening trap is covered.
    pub fn time_step<P: Potential<f64> + ?Sized>(
        &self,
        cfg: &ExperimentConfig,
        psi: &Wavefunction,
        potential: &P,
        snapshot_ms: f64,
    ) -> Result<(f64, usize), CliError> {
        let snapshot = self.units.time_from_ms(snapshot_ms);
        let limit = guard_limit(psi, potential, &self.spec, &[psi.time(), psi.time() + self.ramp_end()]);
        let target = match cfg.time.dt_ms.value() {
            Some(ms) => {
                let dt = self.units.time_from_ms(ms);
                if dt > limit {
                    return Err(CliError::Validation(format!(
                        "time.dt_ms = {ms} exceeds the stability guard {} ms",
                        self.units.ms_from_time(limit)
                    )));
                }
                dt
            }
            None => limit.min(kinetic_limit(&self.grid)),
        };
        let per_snapshot = (snapshot / target).ceil().max(1.0) as usize;
        Ok((snapshot / per_snapshot as f64, per_snapshot))
    }

    fn ramp_end(&self) -> f64 {
        self.trap.schedule::<f64>().duration
    }
}

fn guard_limit<P, N>(psi: &Wavefunction, potential: &P, nl: &N, times: &[f64]) -> f64
where
    P: Potential<f64> + ?Sized,
    N: Nonlinearity<f64> + ?Sized,
{
    let density = psi.density();
    let z = psi.grid().z();
    let mut e_max = 0.0f64;
    for &t in times {
        for (&zi, &n) in z.iter().zip(&density) {
            e_max = e_max.max(potential.value(zi, t).abs() + nl.potential(n, t).abs());
        }
    }
    // Stay a hair inside the propagator's own check.
    TIMESTEP_GUARD / e_max * (1.0 - 1e-9)
}

/// Split-step Fourier with a background density goes unstable once the
/// kinetic phase k_max²·dt/2 at the Nyquist wavenumber passes π/2.
pub fn kinetic_limit(grid: &Grid) -> f64 {
    grid.dz() * grid.dz() / std::f64::consts::PI
}

/// Evolves `psi` for `n_snapshots` intervals of `per_snapshot` steps,
/// recording a density frame (time in ms) at the start and after each
/// interval.
pub fn record_carpet<P: Potential<f64> + ?Sized>(
    setup: &Setup,
    psi: Wavefunction,
    potential: &P,
    dt: f64,
    per_snapshot: usize,
    n_snapshots: usize,
) -> Result<(Wavefunction, DensityCarpet), CliError> {
    let mut carpet = DensityCarpet::empty(setup.grid.clone());
    let mut failure = None;
    let units = setup.units;
    let out = Propagator::new(setup.grid.clone()).evolve(
        psi,
        potential,
        &setup.spec,
        dt,
        per_snapshot * n_snapshots,
        per_snapshot,
        |p| {
            if failure.is_none() {
                if let Err(e) = carpet.push(units.ms_from_time(p.time()), p.density()) {
                    failure = Some(e);
                }
            }
        },
    )?;
    if let Some(e) = failure {
        return Err(e.into());
    }
    Ok((out, carpet))
}

/// Snapshot count covering at least `duration_ms`.
pub fn snapshot_count(duration_ms: f64, snapshot_ms: f64) -> usize {
    (duration_ms / snapshot_ms - 1e-9).ceil().max(1.0) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::from_value;
    use serde_json::json;

    fn cfg(n: u64) -> ExperimentConfig {
        from_value(json!({ "trap": { "nu_z": 53.0, "nu_perp": 890.0, "atom_number": n } })).unwrap()
    }

    #[test]
    fn automatic_grid_resolves_the_healing_length() {
        for n in [300, 1700, 20000] {
            let c = cfg(n);
            let (points, box_length) = resolve_grid(&c);
            let (mu, r) = thomas_fermi_estimate(&c.trap_config(), 53.0, 890.0);
            assert!(points.is_power_of_two() && points >= MIN_POINTS);
            assert!(box_length / points as f64 <= 0.25 / mu.sqrt());
            assert!(box_length >= BOX_PER_RADIUS * r);
            // Halving would break the resolution rule unless already at the floor.
            assert!(points == MIN_POINTS || box_length / (points / 2) as f64 > 0.25 / mu.sqrt());
        }
    }

    #[test]
    fn explicit_grid_is_kept() {
        let mut c = cfg(1700);
        c.grid.n_points = Auto::Value(512);
        c.grid.box_length_um = Auto::Value(30.0);
        assert_eq!(resolve_grid(&c), (512, 30.0));
    }

    #[test]
    fn snapshot_count_covers_the_duration() {
        assert_eq!(snapshot_count(120.0, 0.5), 240);
        assert_eq!(snapshot_count(120.1, 0.5), 241);
        assert_eq!(snapshot_count(0.1, 0.5), 1);
    }

    #[test]
    fn kinetic_limit_keeps_nyquist_phase_below_half_pi() {
        let g = Grid::new(1024, 45.0).unwrap();
        let k = std::f64::consts::PI / g.dz();
        assert!((0.5 * k * k * kinetic_limit(&g) - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }
}
