//! Effective-particle model of a trapped dark soliton (pair).
//!
//! Each soliton is a particle at distance z from the trap centre with
//! Lagrangian L = ż²/2 − V(z, ż),
//!
//! V(z, ż) = ω₁ₛ²z²/2 + (μB²/2)·sech²(2Bz/ξ),  B = √(1 − ż²/c²),
//!
//! where ω₁ₛ = 2πν₁ₛ is the single-soliton frequency, ξ = 1/√μ and c = √μ
//! (ħ = m = 1). The second term is the repulsion between the two solitons of
//! a symmetric pair and is absent in single mode. Because V depends on ż the
//! Euler–Lagrange equation has a velocity-dependent effective mass:
//!
//! z̈ = (−V_z + V_żz·ż) / (1 − V_żż),
//!
//! and E = ż²/2 − ż·V_ż + V is conserved.

mod integrator;

pub use integrator::{Dopri5, OdeSystem};

use crate::error::{invalid, Error, Result};
use crate::scalar::{lit, Scalar};

/// Relative energy drift tolerated along a trajectory.
pub const ENERGY_TOLERANCE: f64 = 1e-8;
/// Periods of motion averaged for a frequency.
pub const MIN_PERIODS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Single,
    Pair,
}

/// (ν₁ₛ, μ) in internal units; ξ is derived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleParams<T> {
    omega_1s: T,
    mu: T,
    mode: Mode,
}

impl<T: Scalar> ParticleParams<T> {
    /// `nu_1s` in cycles per internal time unit.
    pub fn new(nu_1s: T, mu: T, mode: Mode) -> Result<Self> {
        if !(nu_1s > T::zero()) || !(mu > T::zero()) || !nu_1s.is_finite() || !mu.is_finite() {
            return invalid(format!("nu_1s = {nu_1s} and mu = {mu} must be positive"));
        }
        Ok(Self {
            omega_1s: T::TAU() * nu_1s,
            mu,
            mode,
        })
    }

    pub fn nu_1s(&self) -> T {
        self.omega_1s / T::TAU()
    }

    pub fn omega_1s(&self) -> T {
        self.omega_1s
    }

    pub fn mu(&self) -> T {
        self.mu
    }

    /// ξ = 1/√μ.
    pub fn xi(&self) -> T {
        self.mu.sqrt().recip()
    }

    /// c = √μ = ξμ.
    pub fn sound_speed(&self) -> T {
        self.mu.sqrt()
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleState<T> {
    pub z: T,
    pub zdot: T,
}

/// B = √(1 − (ż/c)²).
pub fn darkness<T: Scalar>(zdot: T, params: &ParticleParams<T>) -> Result<T> {
    let c = params.sound_speed();
    if !(zdot.abs() <= c) {
        return invalid(format!("|zdot| = {} exceeds the sound speed {c}", zdot.abs()));
    }
    let beta = zdot / c;
    Ok((T::one() - beta * beta).max(T::zero()).sqrt())
}

/// V(z, ż) per unit effective mass.
pub fn effective_potential<T: Scalar>(state: &ParticleState<T>, params: &ParticleParams<T>) -> Result<T> {
    let w = params.omega_1s;
    let trap = lit::<T>(0.5) * w * w * state.z * state.z;
    if params.mode == Mode::Single {
        return Ok(trap);
    }
    let b = darkness(state.zdot, params)?;
    let x = lit::<T>(2.0) * b * state.z / params.xi();
    let sech = x.cosh().recip();
    Ok(trap + lit::<T>(0.5) * params.mu * b * b * sech * sech)
}

/// Partial derivatives of V needed by the Euler–Lagrange equation.
#[derive(Debug, Clone, Copy)]
struct Partials<T> {
    v: T,
    v_z: T,
    v_zdot: T,
    v_zdot_zdot: T,
    v_zdot_z: T,
}

fn partials<T: Scalar>(z: T, zdot: T, p: &ParticleParams<T>) -> Result<Partials<T>> {
    let w2 = p.omega_1s * p.omega_1s;
    let half = lit::<T>(0.5);
    if p.mode == Mode::Single {
        return Ok(Partials {
            v: half * w2 * z * z,
            v_z: w2 * z,
            v_zdot: T::zero(),
            v_zdot_zdot: T::zero(),
            v_zdot_z: T::zero(),
        });
    }
    let c = p.sound_speed();
    let c2 = c * c;
    let b2 = T::one() - zdot * zdot / c2;
    if !(b2 > T::zero()) {
        return invalid(format!("|zdot| = {} reached the sound speed {c}", zdot.abs()));
    }
    let b = b2.sqrt();
    let mu = p.mu;
    let a = lit::<T>(2.0) / p.xi();
    let x = a * b * z;
    let sech = x.cosh().recip();
    let s = sech * sech;
    let th = x.tanh();
    let two = lit::<T>(2.0);

    // U(z, B) = (μ/2)B²sech²(aBz) and its derivatives.
    let u = half * mu * b2 * s;
    let u_z = -mu * a * b2 * b * s * th;
    let u_b = mu * b * s * (T::one() - x * th);
    let u_bb = mu * s * (T::one() - lit::<T>(4.0) * x * th + two * x * x * th * th - x * x * s);
    let u_bz = mu * a * b2 * s * (two * x * th * th - lit::<T>(3.0) * th - x * s);

    // B(ż): B' = −ż/(c²B), B'' = −1/(c²B³).
    let db = -zdot / (c2 * b);
    let d2b = -(c2 * b2 * b).recip();

    Ok(Partials {
        v: half * w2 * z * z + u,
        v_z: w2 * z + u_z,
        v_zdot: u_b * db,
        v_zdot_zdot: u_bb * db * db + u_b * d2b,
        v_zdot_z: u_bz * db,
    })
}

/// z̈ from the Euler–Lagrange equation.
pub fn acceleration<T: Scalar>(state: &ParticleState<T>, params: &ParticleParams<T>) -> Result<T> {
    let d = partials(state.z, state.zdot, params)?;
    let mass = T::one() - d.v_zdot_zdot;
    if !(mass.abs() > T::epsilon()) {
        return invalid("effective mass vanished");
    }
    Ok((-d.v_z + d.v_zdot_z * state.zdot) / mass)
}

/// E = ż·∂L/∂ż − L = ż²/2 − ż·V_ż + V.
pub fn conserved_energy<T: Scalar>(state: &ParticleState<T>, params: &ParticleParams<T>) -> Result<T> {
    let d = partials(state.z, state.zdot, params)?;
    Ok(lit::<T>(0.5) * state.zdot * state.zdot - state.zdot * d.v_zdot + d.v)
}

struct EulerLagrange<'a, T> {
    params: &'a ParticleParams<T>,
}

impl<T: Scalar> OdeSystem<T, 2> for EulerLagrange<'_, T> {
    fn rhs(&self, _t: T, y: &[T; 2]) -> Result<[T; 2]> {
        let acc = acceleration(&ParticleState { z: y[0], zdot: y[1] }, self.params)?;
        Ok([y[1], acc])
    }
}

fn solver<T: Scalar>() -> Dopri5<T> {
    // Tight enough for 1e-8 energy conservation over tens of periods.
    let tol = lit::<T>(1e-13).max(lit::<T>(10.0) * T::epsilon());
    Dopri5::new(tol, tol * lit(1e-2))
}

/// Sampled solution of the Euler–Lagrange equation.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub z: Vec<T>,
    pub zdot: Vec<T>,
    pub energy: Vec<T>,
}

impl<T: Scalar> Trajectory<T> {
    /// max |E(t) − E(0)| / |E(0)|.
    pub fn energy_drift(&self) -> T {
        let e0 = self.energy[0];
        let scale = e0.abs().max(T::min_positive_value());
        self.energy
            .iter()
            .fold(T::zero(), |m, &e| m.max((e - e0).abs() / scale))
    }
}

/// Integrates from rest at `z0` up to `t_max`, sampling every `dt`.
pub fn integrate_trajectory<T: Scalar>(z0: T, params: &ParticleParams<T>, t_max: T, dt: T) -> Result<Trajectory<T>> {
    integrate_from(ParticleState { z: z0, zdot: T::zero() }, params, t_max, dt)
}

/// Integrates from an arbitrary initial state.
pub fn integrate_from<T: Scalar>(
    start: ParticleState<T>,
    params: &ParticleParams<T>,
    t_max: T,
    dt: T,
) -> Result<Trajectory<T>> {
    if !(dt > T::zero()) || !(t_max > T::zero()) {
        return invalid("t_max and dt must be positive");
    }
    let sys = EulerLagrange { params };
    let mut ode = solver::<T>();
    let mut y = [start.z, start.zdot];
    let e0 = conserved_energy(&start, params)?;
    let mut traj = Trajectory {
        times: vec![T::zero()],
        z: vec![y[0]],
        zdot: vec![y[1]],
        energy: vec![e0],
    };
    let n = (t_max / dt).ceil().to_usize().unwrap_or(0);
    let mut t = T::zero();
    for k in 1..=n {
        let t_next = (lit::<T>(k as f64) * dt).min(t_max);
        y = ode.integrate(&sys, t, y, t_next)?;
        t = t_next;
        traj.times.push(t);
        traj.z.push(y[0]);
        traj.zdot.push(y[1]);
        traj.energy.push(conserved_energy(&ParticleState { z: y[0], zdot: y[1] }, params)?);
    }
    let drift = traj.energy_drift();
    if drift > lit(ENERGY_TOLERANCE) {
        return Err(Error::EnergyDrift {
            drift: drift.as_f64(),
            tolerance: ENERGY_TOLERANCE,
        });
    }
    Ok(traj)
}

/// Outer equilibrium of the pair-mode double well, or `None` when the trap
/// overwhelms the barrier and the well is single.
pub fn pair_equilibrium<T: Scalar>(params: &ParticleParams<T>) -> Option<T> {
    if params.mode == Mode::Single {
        return None;
    }
    let slope = |z: T| partials(z, T::zero(), params).map(|d| d.v_z).unwrap_or(T::nan());
    let xi = params.xi();
    // V_z is positive for large z; walk inwards to the last sign change.
    let mut hi = xi;
    while slope(hi) <= T::zero() {
        hi = hi * lit(2.0);
        if hi > lit::<T>(1e6) * xi {
            return None;
        }
    }
    let steps = 4000;
    let h = hi / lit(steps as f64);
    let mut upper = hi;
    let mut lower = None;
    for j in (1..steps).rev() {
        let z = h * lit(j as f64);
        if slope(z) < T::zero() {
            lower = Some(z);
            break;
        }
        upper = z;
    }
    let mut lo = lower?;
    let mut up = upper;
    for _ in 0..200 {
        let mid = lit::<T>(0.5) * (lo + up);
        if slope(mid) < T::zero() {
            lo = mid;
        } else {
            up = mid;
        }
    }
    Some(lit::<T>(0.5) * (lo + up))
}

/// Oscillation frequency of a soliton whose outer turning point is
/// `amplitude` (started from rest there).
///
/// The frequency is 1/(2Δ), Δ the mean interval between successive outer
/// turning points (maxima of |z|), averaged over at least five periods.
/// This matches the label-free convention of a measured pair distance: a
/// pair bouncing off its barrier and a pair passing through each other both
/// give the period of a soliton travelling across the trap and back.
pub fn oscillation_frequency<T: Scalar>(params: &ParticleParams<T>, amplitude: T) -> Result<T> {
    if !(amplitude > T::zero()) {
        return invalid(format!("amplitude {amplitude} must be positive"));
    }
    if let Some(z_eq) = pair_equilibrium(params) {
        if amplitude <= z_eq {
            return invalid(format!(
                "amplitude {amplitude} lies inside the pair well minimum at {z_eq}; \
                 it cannot be an outer turning point"
            ));
        }
    }
    let sys = EulerLagrange { params };
    let mut ode = solver::<T>();
    let start = ParticleState {
        z: amplitude,
        zdot: T::zero(),
    };
    let e0 = conserved_energy(&start, params)?;
    let period_guess = params.nu_1s().recip();
    let dt = period_guess / lit(400.0);
    let t_cap = period_guess * lit(200.0);
    let needed = 2 * MIN_PERIODS + 1;

    let mut turning = vec![T::zero()];
    let mut t = T::zero();
    let mut y = [amplitude, T::zero()];
    while turning.len() < needed {
        if t > t_cap {
            return Err(Error::NoOscillation(format!(
                "only {} outer turning points within {} time units",
                turning.len(),
                t_cap.as_f64()
            )));
        }
        let y_next = ode.integrate(&sys, t, y, t + dt)?;
        let outward_before = y[0] * y[1] > T::zero();
        let inward_after = y_next[0] * y_next[1] <= T::zero();
        if outward_before && inward_after {
            // Newton on ż(t) = 0 from the start of the interval.
            let mut h = dt * y[1] / (y[1] - y_next[1]);
            for _ in 0..8 {
                let yh = ode.integrate(&sys, t, y, t + h)?;
                let acc = acceleration(&ParticleState { z: yh[0], zdot: yh[1] }, params)?;
                let dh = yh[1] / acc;
                h = h - dh;
                if dh.abs() < lit::<T>(1e-14) * period_guess {
                    break;
                }
            }
            turning.push(t + h);
        }
        t = t + dt;
        y = y_next;
    }
    let e_end = conserved_energy(&ParticleState { z: y[0], zdot: y[1] }, params)?;
    let drift = ((e_end - e0) / e0).abs();
    if drift > lit(ENERGY_TOLERANCE) {
        return Err(Error::EnergyDrift {
            drift: drift.as_f64(),
            tolerance: ENERGY_TOLERANCE,
        });
    }
    let intervals = lit::<T>((turning.len() - 1) as f64);
    let mean = (turning[turning.len() - 1] - turning[0]) / intervals;
    Ok((lit::<T>(2.0) * mean).recip())
}

/// (amplitude, ν) for every requested outer-turning-point amplitude.
pub fn frequency_vs_amplitude<T: Scalar>(params: &ParticleParams<T>, amplitudes: &[T]) -> Result<Vec<(T, T)>> {
    amplitudes
        .iter()
        .map(|&a| oscillation_frequency(params, a).map(|nu| (a, nu)))
        .collect()
}
