//! Real-time Strang split-step propagation.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::hamiltonian::{Nonlinearity, Potential};
use crate::scalar::{lit, Scalar};
use crate::spectral::Spectral;
use crate::wavefunction::Wavefunction;

/// dt·max(|V| + |G|) must not exceed this.
pub const TIMESTEP_GUARD: f64 = 0.05;

/// Steps between finiteness/norm checks when nothing is observed.
const CHECK_INTERVAL: usize = 1000;

/// Largest dt allowed by the guard for the given state at its current time.
pub fn timestep_limit<T, P, N>(psi: &Wavefunction<T>, potential: &P, nonlinearity: &N) -> T
where
    T: Scalar,
    P: Potential<T> + ?Sized,
    N: Nonlinearity<T> + ?Sized,
{
    let t = psi.time();
    let e_max = psi
        .values()
        .iter()
        .zip(psi.grid().z())
        .fold(T::zero(), |m, (c, &z)| {
            let e = potential.value(z, t).abs() + nonlinearity.potential(c.norm_sqr(), t).abs();
            m.max(e)
        });
    if e_max > T::zero() {
        lit::<T>(TIMESTEP_GUARD) / e_max
    } else {
        T::infinity()
    }
}

/// Split-step propagator with reusable plans and buffers.
pub struct Propagator<T: Scalar> {
    spectral: Spectral<T>,
    norm_tolerance: T,
    enforce_guard: bool,
}

impl<T: Scalar> Propagator<T> {
    pub fn new(grid: std::sync::Arc<crate::grid::Grid1D<T>>) -> Self {
        let floor = lit::<T>(1000.0) * T::epsilon();
        Self {
            spectral: Spectral::new(grid),
            norm_tolerance: lit::<T>(1e-6).max(floor),
            enforce_guard: true,
        }
    }

    /// Relative norm drift beyond which propagation aborts.
    pub fn with_norm_tolerance(mut self, tol: T) -> Self {
        self.norm_tolerance = tol;
        self
    }

    /// Disables the dt guard (convergence studies deliberately violate it).
    pub fn without_guard(mut self) -> Self {
        self.enforce_guard = false;
        self
    }

    /// Advances ψ by `n_steps` steps of size `dt`.
    ///
    /// Each step is exp(−iKdt/2)·exp(−i(V + G)dt)·exp(−iKdt/2) with V sampled
    /// at the step midpoint. Adjacent kinetic half-steps are fused between
    /// observation points. `observer` sees the initial state and then the state
    /// after every `observe_every` steps (never, if zero).
    pub fn evolve<P, N, F>(
        &mut self,
        mut psi: Wavefunction<T>,
        potential: &P,
        nonlinearity: &N,
        dt: T,
        n_steps: usize,
        observe_every: usize,
        mut observer: F,
    ) -> Result<Wavefunction<T>>
    where
        P: Potential<T> + ?Sized,
        N: Nonlinearity<T> + ?Sized,
        F: FnMut(&Wavefunction<T>),
    {
        if !(dt > T::zero()) || !dt.is_finite() {
            return Err(Error::InvalidInput(format!("dt = {dt} must be positive")));
        }
        if self.enforce_guard {
            let limit = timestep_limit(&psi, potential, nonlinearity);
            if dt > limit * lit(1.0 + 1e-9) {
                return Err(Error::TimestepTooLarge {
                    dt: dt.as_f64(),
                    limit: limit.as_f64(),
                });
            }
        }
        let grid = psi.grid().clone();
        let n = grid.n_points();
        let inv_n = lit::<T>(n as f64).recip();
        let kinetic = |fraction: f64| -> Vec<Complex<T>> {
            grid.k()
                .iter()
                .map(|&k| {
                    let phase = -lit::<T>(0.5 * fraction) * k * k * dt;
                    Complex::from_polar(inv_n, phase)
                })
                .collect()
        };
        let half = kinetic(0.5);
        let full = kinetic(1.0);

        let t0 = psi.time();
        let norm0 = psi.norm();
        let time_dependent = potential.is_time_dependent();
        let mut v = potential.sampled(&grid, t0 + dt * lit(0.5));

        if observe_every > 0 {
            observer(&psi);
        }
        if n_steps == 0 {
            return Ok(psi);
        }

        self.spectral
            .apply_fourier_multiplier(psi.values_mut(), &half);
        for step in 0..n_steps {
            let t_mid = t0 + (lit::<T>(step as f64) + lit(0.5)) * dt;
            if time_dependent {
                potential.sample(&grid, t_mid, &mut v);
            }
            for (c, &vj) in psi.values_mut().iter_mut().zip(&v) {
                let g = nonlinearity.potential(c.norm_sqr(), t_mid);
                let phase = -(vj + g) * dt;
                *c = *c * Complex::from_polar(T::one(), phase);
            }

            let done = step + 1;
            let observe = observe_every > 0 && done % observe_every == 0;
            let boundary = done == n_steps || observe || done % CHECK_INTERVAL == 0;
            if !boundary {
                self.spectral
                    .apply_fourier_multiplier(psi.values_mut(), &full);
                continue;
            }
            self.spectral
                .apply_fourier_multiplier(psi.values_mut(), &half);
            psi.set_time(t0 + lit::<T>(done as f64) * dt);
            self.check(&psi, nonlinearity, norm0, done)?;
            if observe {
                observer(&psi);
            }
            if done < n_steps {
                self.spectral
                    .apply_fourier_multiplier(psi.values_mut(), &half);
            }
        }
        Ok(psi)
    }

    fn check<N: Nonlinearity<T> + ?Sized>(
        &self,
        psi: &Wavefunction<T>,
        nonlinearity: &N,
        norm0: T,
        step: usize,
    ) -> Result<()> {
        if !psi.is_finite() {
            return Err(Error::NonFinite { step });
        }
        let drift = ((psi.norm() - norm0) / norm0).abs();
        if drift > self.norm_tolerance {
            return Err(Error::NormDrift {
                step,
                drift: drift.as_f64(),
            });
        }
        if let Some(limit) = nonlinearity.density_limit(psi.time()) {
            let max = psi.values().iter().fold(T::zero(), |m, c| m.max(c.norm_sqr()));
            if max >= limit {
                return Err(Error::NonlinearityDomain {
                    step,
                    density: max.as_f64(),
                });
            }
        }
        Ok(())
    }
}

/// Convenience wrapper around [`Propagator::evolve`] with fresh plans.
pub fn evolve_real_time<T, P, N, F>(
    psi: Wavefunction<T>,
    potential: &P,
    nonlinearity: &N,
    dt: T,
    n_steps: usize,
    observe_every: usize,
    observer: F,
) -> Result<Wavefunction<T>>
where
    T: Scalar,
    P: Potential<T> + ?Sized,
    N: Nonlinearity<T> + ?Sized,
    F: FnMut(&Wavefunction<T>),
{
    Propagator::new(psi.grid().clone()).evolve(
        psi,
        potential,
        nonlinearity,
        dt,
        n_steps,
        observe_every,
        observer,
    )
}
