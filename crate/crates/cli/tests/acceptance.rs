//! End-to-end acceptance run: one PASS/FAIL line per criterion.
//!
//! The long criteria drive the same pipelines as the CLI with the shipped
//! presets in `configs/`.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use solitonlab::config::{load_config, ExperimentConfig};
use solitonlab::pipeline::{run_fig2c, run_merge, run_single_soliton_frequency, run_sweep};
use solitonlab::timing::Timings;
use solitonlab_core::evolve::{evolve_real_time, Propagator};
use solitonlab_core::grid::Grid1D;
use solitonlab_core::ground_state::{ground_state_imaginary_time, GroundStateOptions};
use solitonlab_core::hamiltonian::{energy, Cubic, HarmonicWell};
use solitonlab_core::particle::{integrate_trajectory, Mode, ParticleParams};
use solitonlab_core::physics::{imprint_soliton, FrequencySchedule, NonlinearKind, NonlinearSpec};
use solitonlab_core::tracking::{detect_solitons, fit_frequency, track_pair, DensityCarpet, DetectOptions, TrackOptions};
use solitonlab_core::Wavefunction;

type Outcome = Result<String, String>;

fn preset(name: &str) -> ExperimentConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    load_config(&path, &[]).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn ac1() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/critical_distance.json");
    let code = solitonlab::run([
        "solitonlab".as_ref(),
        "critical-distance".as_ref(),
        "--config".as_ref(),
        config.as_os_str(),
        "--out".as_ref(),
        dir.path().as_os_str(),
    ]);
    if code != 0 {
        return Err(format!("exit code {code}"));
    }
    let csv = std::fs::read_to_string(dir.path().join("critical_distance.csv")).map_err(|e| e.to_string())?;
    let row = csv.lines().nth(1).ok_or("empty table")?;
    let d: f64 = row.rsplit(',').next().unwrap().parse().map_err(|e| format!("{e}"))?;
    check((d - 25.8).abs() <= 0.1, format!("D_c = {d:.4} um (target 25.8 +- 0.1)"))
}

fn single_ratio(name: &str, lo: f64, hi: f64) -> Outcome {
    let cfg = preset(name);
    let s = run_single_soliton_frequency(&cfg, &mut Timings::default()).map_err(|e| e.to_string())?;
    check(
        (lo..=hi).contains(&s.ratio),
        format!(
            "nu_1s = {:.4} Hz, ratio {:.4} (window [{lo}, {hi}]), fit uncertainty {:.4} Hz",
            s.nu_1s_hz, s.ratio, s.uncertainty_hz
        ),
    )
}

fn ac5() -> Outcome {
    let cfg = preset("npse_53_890.json");
    let sw = run_sweep(&cfg, &mut Timings::default()).map_err(|e| e.to_string())?;
    let single = sw.single.as_ref().ok_or("no single-soliton row")?.ratio;
    let ratios: Vec<f64> = sw.rows.iter().map(|r| r.ratio).collect();
    let max = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let first = ratios[0];
    let last = *ratios.last().unwrap();
    let at_smallest = max == first;
    let decreasing = ratios.windows(2).all(|w| w[1] < w[0]);
    let toward_single = (last - single).abs() < (first - single).abs();
    let matched = sw.rows.iter().all(|r| r.matched);
    let table: Vec<String> = sw.rows.iter().map(|r| format!("{:.2}:{:.4}", r.amplitude_um, r.ratio)).collect();
    check(
        (1.10..=1.18).contains(&max) && at_smallest && decreasing && toward_single && matched,
        format!(
            "max ratio {max:.4} at smallest amplitude: {at_smallest}, decreasing: {decreasing}, \
             single {single:.4}, all matched: {matched}; [{}]",
            table.join(" ")
        ),
    )
}

fn ac6() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for name in ["npse_53_890.json", "npse_58_408.json"] {
        let cfg = preset(name);
        let f = run_fig2c(&cfg, &mut Timings::default()).map_err(|e| e.to_string())?;
        let worst = f
            .rows
            .iter()
            .map(|r| ((r.nu_particle_hz - r.nu_pair_hz) / r.nu_pair_hz).abs())
            .fold(0.0, f64::max);
        ok &= worst < 0.05 && !f.rows.is_empty();
        lines.push(format!("{name}: max |model-NPSE|/NPSE = {:.2}% over {} points", 100.0 * worst, f.rows.len()));
    }
    check(ok, lines.join("; "))
}

fn ac7() -> Outcome {
    let cfg = preset("merge.json");
    let m = run_merge(&cfg, &mut Timings::default()).map_err(|e| e.to_string())?;
    let center = m.mean_pair_center_um.ok_or("no usable pair frames")?;
    let even = m.typical_count >= 2 && m.typical_count % 2 == 0;
    let oscillates = m.fit.is_ok();
    check(
        even && center.abs() < 0.5 && oscillates,
        format!(
            "typical soliton count {}, mean pair center {center:.4} um, pair fit: {}",
            m.typical_count,
            match &m.fit {
                Ok(f) => format!("{:.3} Hz", f.soliton_frequency * 1e3),
                Err(e) => e.clone(),
            }
        ),
    )
}

fn soliton_state() -> (Wavefunction, f64) {
    let g = Arc::new(Grid1D::new(1024, 24.0).unwrap());
    let opts = GroundStateOptions {
        tol: 1e-11,
        ..Default::default()
    };
    let gs = ground_state_imaginary_time(g, &HarmonicWell { omega: 1.0 }, &Cubic { g: 20.0 }, &opts, None).unwrap();
    let mu = gs.chemical_potential;
    (imprint_soliton(&gs.psi, 1.0, 0.0, mu).unwrap(), mu)
}

fn ac8() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    let mut record = |name: &str, value: f64, limit: f64| {
        ok &= value < limit;
        parts.push(format!("{name} {value:.2e} (< {limit:.0e})"));
    };
    let pot = HarmonicWell { omega: 1.0 };
    let nl = Cubic { g: 20.0 };
    let (psi, _) = soliton_state();

    let n0 = psi.norm();
    let mut norms = vec![n0];
    evolve_real_time(psi.clone(), &pot, &nl, 5e-4, 5000, 1000, |p| norms.push(p.norm())).unwrap();
    let norm_drift = norms.windows(2).map(|w| ((w[1] - w[0]) / n0).abs()).fold(0.0, f64::max);
    record("norm/1e3 steps", norm_drift, 1e-10);

    let e0 = energy(&psi, &pot, &nl);
    let mut e_drift = 0.0f64;
    evolve_real_time(psi.clone(), &pot, &nl, 2e-4, 20_000, 1000, |p| {
        e_drift = e_drift.max(((energy(p, &pot, &nl) - e0) / e0).abs())
    })
    .unwrap();
    record("PDE energy", e_drift, 1e-8);

    let run = |dt: f64| {
        Propagator::new(psi.grid().clone())
            .without_guard()
            .evolve(psi.clone(), &pot, &nl, dt, (1.0 / dt).round() as usize, 0, |_| {})
            .unwrap()
    };
    let reference = run(0.01 / 8.0);
    let err = |p: &Wavefunction| {
        let d: Vec<f64> = p.values().iter().zip(reference.values()).map(|(a, b)| (a - b).norm_sqr()).collect();
        p.grid().integrate(d).sqrt()
    };
    let order_ratio = err(&run(0.01)) / err(&run(0.005));
    record("dt-halving |ratio/4 - 1|", (order_ratio / 4.0 - 1.0).abs(), 0.2);

    let g = Arc::new(Grid1D::new(512, 24.0).unwrap());
    let blob = Wavefunction::from_real_fn(g, |z: f64| (-(z - 1.0).powi(2) / 2.0).exp()).unwrap();
    let alpha = 0.9e-3 / blob.density().iter().cloned().fold(0.0, f64::max);
    let spec = |kind| NonlinearSpec {
        kind,
        scattering_length: alpha / 2.0,
        atom_number: 1.0,
        schedule: FrequencySchedule::constant(1.0, 50.0),
    };
    let steps = (10.0 * std::f64::consts::TAU / 5e-4).round() as usize;
    let (mut a, mut b) = (Vec::new(), Vec::new());
    evolve_real_time(blob.clone(), &pot, &spec(NonlinearKind::Gpe1d), 5e-4, steps, steps / 20, |p| {
        a.push(p.density())
    })
    .unwrap();
    evolve_real_time(blob, &pot, &spec(NonlinearKind::Npse), 5e-4, steps, steps / 20, |p| b.push(p.density())).unwrap();
    let npse_gap = a
        .iter()
        .zip(&b)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()))
        .fold(0.0f64, f64::max);
    record("NPSE-GPE1D weak density", npse_gap, 1e-4);

    let g = Arc::new(Grid1D::new(1024, 24.0).unwrap());
    let nl30 = Cubic { g: 30.0 };
    let gs = ground_state_imaginary_time(g.clone(), &pot, &nl30, &GroundStateOptions::default(), None).unwrap();
    let centred = imprint_soliton(&gs.psi, 0.0, 0.0, gs.chemical_potential).unwrap();
    let steps = (5.0 * std::f64::consts::TAU / 5e-4).round() as usize;
    let mut wander = 0.0f64;
    evolve_real_time(centred, &pot, &nl30, 5e-4, steps, steps / 100, |p| {
        let dips = detect_solitons(&p.density(), p.grid(), &DetectOptions::default()).unwrap();
        let deepest = dips.iter().max_by(|x, y| x.contrast.total_cmp(&y.contrast)).unwrap();
        wander = wander.max(deepest.position.abs());
    })
    .unwrap();
    record("centred soliton drift / dz", wander / g.dz(), 1.0);

    // Noisy synthetic pair carpets, ν_d = 80 Hz, noise 10% of the amplitude.
    let grid = Arc::new(Grid1D::new(1024, 60.0).unwrap());
    let sech2 = |x: f64| x.cosh().powi(-2);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let noise = Normal::new(0.0, 0.3).unwrap();
    let mut mean = 0.0;
    for _ in 0..100 {
        let mut carpet = DensityCarpet::empty(grid.clone());
        for k in 0..241 {
            let t = 0.5 * k as f64;
            let d = 6.0 + 3.0 * (std::f64::consts::TAU * 0.08 * t).cos() + noise.sample(&mut rng);
            let frame = grid
                .z()
                .iter()
                .map(|&z: &f64| {
                    (1.0 - (z / 20.0).powi(2)).max(0.0)
                        * (1.0 - sech2((z - d / 2.0) / 0.4))
                        * (1.0 - sech2((z + d / 2.0) / 0.4))
                })
                .collect();
            carpet.push(t, frame).unwrap();
        }
        let fit = fit_frequency(&track_pair(&carpet, &TrackOptions::default()).unwrap()).unwrap();
        mean += fit.distance_frequency * 1e3 / 100.0;
    }
    record("fitter mean bias", (mean / 80.0 - 1.0).abs(), 2e-3);

    let xi = 0.4;
    let frame: Vec<f64> = grid
        .z()
        .iter()
        .map(|&z: &f64| (1.0 - (z / 20.0).powi(2)).max(0.0) * (1.0 - sech2((z - 1.7) / xi)))
        .collect();
    let dips = detect_solitons(&frame, &grid, &DetectOptions::default()).unwrap();
    let located = dips.iter().map(|d| (d.position - 1.7).abs()).fold(f64::INFINITY, f64::min);
    record("detection error / dz", located / grid.dz(), 0.1);

    let params = ParticleParams::new(0.2, 8.0, Mode::Pair).unwrap();
    let traj = integrate_trajectory(1.5, &params, 50.0, 0.05).map_err(|e| e.to_string())?;
    record("particle energy", traj.energy_drift(), 1e-8);

    check(ok, parts.join(", "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("AC1 critical distance", ac1),
        ("AC2 single soliton NPSE upshift", || single_ratio("npse_53_890.json", 1.04, 1.06)),
        ("AC3 single soliton 1D GPE upshift", || single_ratio("gpe1d_53_890.json", 1.01, 1.03)),
        ("AC4 TF1D asymptote", || single_ratio("deep_tf1d.json", 0.99, 1.01)),
        ("AC5 two-soliton upshift", ac5),
        ("AC6 particle model agreement", ac6),
        ("AC7 merge structure", ac7),
        ("AC8 property suites", ac8),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name} [{secs:.1} s]: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name} [{secs:.1} s]: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
