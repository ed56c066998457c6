use std::sync::Arc;

use solitonlab_core::evolve::evolve_real_time;
use solitonlab_core::grid::Grid1D;
use solitonlab_core::ground_state::{ground_state_imaginary_time, GroundStateOptions};
use solitonlab_core::hamiltonian::{Cubic, HarmonicWell, Superposition};
use solitonlab_core::physics::{
    critical_distance, double_well_minima, imprint_soliton, FrequencySchedule, NonlinearKind, NonlinearSpec,
    OpticalLattice,
};
use solitonlab_core::tracking::{detect_solitons, DetectOptions};
use solitonlab_core::units::{UnitSystem, RB87_MASS, RB87_SCATTERING_LENGTH};
use solitonlab_core::Wavefunction;

fn spec(kind: NonlinearKind, alpha: f64, omega_perp: f64) -> NonlinearSpec<f64> {
    NonlinearSpec {
        kind,
        scattering_length: alpha / 2.0,
        atom_number: 1.0,
        schedule: FrequencySchedule::constant(1.0, omega_perp),
    }
}

#[test]
fn npse_reduces_to_gpe_at_weak_density() {
    let g = Arc::new(Grid1D::new(512, 24.0).unwrap());
    let psi = Wavefunction::from_real_fn(g, |z: f64| (-(z - 1.0).powi(2) / 2.0).exp()).unwrap();
    let n_max = psi.density().iter().cloned().fold(0.0, f64::max);
    // 2a_sN·n stays below 10⁻³ everywhere.
    let alpha = 0.9e-3 / n_max;
    let pot = HarmonicWell { omega: 1.0 };
    let gpe = spec(NonlinearKind::Gpe1d, alpha, 50.0);
    let npse = spec(NonlinearKind::Npse, alpha, 50.0);
    let dt = 5e-4;
    let steps = (10.0 * std::f64::consts::TAU / dt).round() as usize;
    let mut a = Vec::new();
    let mut b = Vec::new();
    evolve_real_time(psi.clone(), &pot, &gpe, dt, steps, steps / 20, |p| a.push(p.density())).unwrap();
    evolve_real_time(psi, &pot, &npse, dt, steps, steps / 20, |p| b.push(p.density())).unwrap();
    let worst = a
        .iter()
        .zip(&b)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()))
        .fold(0.0f64, f64::max);
    assert!(worst < 1e-4, "sup-norm difference {worst}");
}

#[test]
fn centred_soliton_stays_put() {
    let omega = 1.0;
    let g = Arc::new(Grid1D::new(1024, 24.0).unwrap());
    let pot = HarmonicWell { omega };
    let nl = Cubic { g: 30.0 };
    let gs = ground_state_imaginary_time(g.clone(), &pot, &nl, &GroundStateOptions::default(), None).unwrap();
    let psi = imprint_soliton(&gs.psi, 0.0, 0.0, gs.chemical_potential).unwrap();
    let dt = 5e-4;
    let steps = (5.0 * std::f64::consts::TAU / omega / dt).round() as usize;
    let mut worst = 0.0f64;
    evolve_real_time(psi, &pot, &nl, dt, steps, steps / 100, |p| {
        let dips = detect_solitons(&p.density(), p.grid(), &DetectOptions::default()).unwrap();
        let deepest = dips.iter().max_by(|x, y| x.contrast.total_cmp(&y.contrast)).unwrap();
        worst = worst.max(deepest.position.abs());
    })
    .unwrap();
    assert!(worst < g.dz(), "dip wandered to {worst}");
}

#[test]
fn critical_distance_matches_reference_value() {
    let d = critical_distance(1500.0, RB87_SCATTERING_LENGTH, 63.0, RB87_MASS) * 1e6;
    assert!((d - 25.8).abs() < 0.1, "{d}");
    let scaled = critical_distance(8.0 * 1500.0, RB87_SCATTERING_LENGTH, 63.0, RB87_MASS) * 1e6;
    assert!((scaled / d - 2.0).abs() < 1e-12);
}

#[test]
fn double_well_ground_state_has_two_symmetric_lobes() {
    let u = UnitSystem::default();
    let omega_z = u.angular_from_hz(63.0);
    let lattice = OpticalLattice {
        depth: u.energy_from_hz(1000.0),
        spacing: 5.7,
        offset: 0.0,
    };
    let (left, right) = double_well_minima(omega_z, &lattice);
    let g = Arc::new(Grid1D::new(1024, 40.0).unwrap());
    let pot = Superposition(HarmonicWell { omega: omega_z }, lattice);
    let gs = ground_state_imaginary_time(
        g.clone(),
        &pot,
        &Cubic { g: 5.0 },
        &GroundStateOptions {
            tol: 1e-10,
            omega_ref: omega_z,
            ..Default::default()
        },
        None,
    )
    .unwrap();
    let n = gs.psi.density();
    for i in 1..n.len() {
        assert!((n[i] - n[g.mirror(i)]).abs() < 1e-8);
    }
    let peak = (0..n.len()).max_by(|&a, &b| n[a].total_cmp(&n[b])).unwrap();
    let z_peak = g.z()[peak].abs();
    assert!((z_peak - right).abs() < 0.3 && (z_peak + left).abs() < 0.3, "{z_peak} vs {right}");
}
