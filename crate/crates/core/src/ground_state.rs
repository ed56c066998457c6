//! Imaginary-time ground states.
//!
//! A split-step imaginary-time relaxation (t → −iτ, renormalising every
//! step) brings the state close to the ground state. Its fixed point carries
//! an O(dτ²) splitting bias, so the result is then polished with a
//! preconditioned projected-gradient iteration whose fixed point is the exact
//! discrete eigenproblem Hψ = μψ.

use std::sync::Arc;

use num_complex::Complex;

use crate::error::{invalid, Error, Result};
use crate::grid::Grid1D;
use crate::hamiltonian::{chemical_potential_with, energy_with, Nonlinearity, Potential};
use crate::scalar::{lit, Scalar};
use crate::spectral::Spectral;
use crate::wavefunction::Wavefunction;

#[derive(Debug, Clone, Copy)]
pub struct GroundStateOptions<T> {
    /// Residual target for ‖Hψ − μψ‖/‖ψ‖; also scales the |Δμ| criterion.
    pub tol: T,
    /// Energy scale for the |Δμ| < tol·ω_ref criterion (typically ħω_z).
    pub omega_ref: T,
    /// Imaginary time step; defaults to 0.2 / max(|V| + |G|).
    pub dtau: Option<T>,
    /// Cap on split-step plus gradient iterations.
    pub max_steps: usize,
    /// Iterations between convergence checks in the split-step stage.
    pub check_every: usize,
}

impl<T: Scalar> Default for GroundStateOptions<T> {
    fn default() -> Self {
        Self {
            tol: lit(1e-9),
            omega_ref: T::one(),
            dtau: None,
            max_steps: 400_000,
            check_every: 100,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GroundState<T: Scalar> {
    pub psi: Wavefunction<T>,
    pub chemical_potential: T,
    pub energy: T,
    pub residual: T,
    pub steps: usize,
}

/// Split-step imaginary-time stepper; exposed so the relaxation can be
/// inspected one step at a time.
pub struct ImaginaryTime<'a, T: Scalar, N: ?Sized> {
    spectral: Spectral<T>,
    v: Vec<T>,
    nonlinearity: &'a N,
    dtau: T,
    half: Vec<Complex<T>>,
}

impl<'a, T: Scalar, N: Nonlinearity<T> + ?Sized> ImaginaryTime<'a, T, N> {
    pub fn new<P: Potential<T> + ?Sized>(
        grid: Arc<Grid1D<T>>,
        potential: &P,
        nonlinearity: &'a N,
        dtau: T,
    ) -> Result<Self> {
        if !(dtau > T::zero()) {
            return invalid(format!("dtau = {dtau} must be positive"));
        }
        let v = potential.sampled(&grid, T::zero());
        if v.iter().any(|x| !x.is_finite()) {
            return invalid("potential is not finite on the grid");
        }
        let inv_n = lit::<T>(grid.n_points() as f64).recip();
        let half = grid
            .k()
            .iter()
            .map(|&k| Complex::new((-lit::<T>(0.25) * k * k * dtau).exp() * inv_n, T::zero()))
            .collect();
        Ok(Self {
            spectral: Spectral::new(grid),
            v,
            nonlinearity,
            dtau,
            half,
        })
    }

    pub fn dtau(&self) -> T {
        self.dtau
    }

    /// One normalised step e^{−Kdτ/2} e^{−(V+G)dτ} e^{−Kdτ/2}.
    pub fn step(&mut self, psi: &mut Wavefunction<T>) -> Result<()> {
        self.spectral.apply_fourier_multiplier(psi.values_mut(), &self.half);
        for (c, &v) in psi.values_mut().iter_mut().zip(&self.v) {
            let g = self.nonlinearity.potential(c.norm_sqr(), T::zero());
            *c = *c * (-(v + g) * self.dtau).exp();
        }
        self.spectral.apply_fourier_multiplier(psi.values_mut(), &self.half);
        psi.normalize()
    }

    /// Energy functional with the potential sampled at t = 0.
    pub fn energy(&mut self, psi: &Wavefunction<T>) -> T {
        let kinetic = self.spectral.kinetic_energy(psi.values());
        let grid = psi.grid();
        let local = grid.integrate(psi.values().iter().zip(&self.v).map(|(c, &v)| {
            let n = c.norm_sqr();
            v * n + self.nonlinearity.energy_density(n, T::zero())
        }));
        kinetic + local
    }

    /// (μ, residual).
    pub fn chemical_potential(&mut self, psi: &Wavefunction<T>) -> (T, T) {
        let mut h = vec![Complex::default(); self.v.len()];
        chemical_potential_with(
            &mut self.spectral,
            psi.values(),
            &self.v,
            self.nonlinearity,
            T::zero(),
            &mut h,
        )
    }
}

fn default_guess<T: Scalar>(grid: Arc<Grid1D<T>>) -> Result<Wavefunction<T>> {
    let width = grid.box_length() / lit(16.0);
    Wavefunction::from_real_fn(grid, |z| (-(z * z) / (lit::<T>(2.0) * width * width)).exp())
}

/// Ground state of H = −½∂² + V + G by imaginary-time relaxation.
///
/// Converged when the residual ‖Hψ − μψ‖/‖ψ‖ is below `tol` and μ changed by
/// less than `tol·omega_ref` since the previous check. μ includes the full
/// G(n), i.e. it is the chemical potential, not the energy per particle.
pub fn ground_state_imaginary_time<T, P, N>(
    grid: Arc<Grid1D<T>>,
    potential: &P,
    nonlinearity: &N,
    opts: &GroundStateOptions<T>,
    initial_guess: Option<Wavefunction<T>>,
) -> Result<GroundState<T>>
where
    T: Scalar,
    P: Potential<T> + ?Sized,
    N: Nonlinearity<T> + ?Sized,
{
    if !(opts.tol > T::zero()) {
        return invalid("tol must be positive");
    }
    let mut psi = match initial_guess {
        Some(mut g) => {
            if g.grid().as_ref() != grid.as_ref() {
                return invalid("initial guess lives on a different grid");
            }
            g.set_time(T::zero());
            g.normalize()?;
            g
        }
        None => default_guess(grid.clone())?,
    };

    let v = potential.sampled(&grid, T::zero());
    let v_min = v.iter().fold(T::infinity(), |m, &x| m.min(x));
    if !v_min.is_finite() {
        return invalid("potential must be bounded below and finite on the grid");
    }
    let dtau = match opts.dtau {
        Some(d) => d,
        None => {
            let e_max = psi.values().iter().zip(&v).fold(T::zero(), |m, (c, &vj)| {
                m.max(vj.abs() + nonlinearity.potential(c.norm_sqr(), T::zero()).abs())
            });
            lit::<T>(0.2) / e_max.max(lit(1e-3))
        }
    };

    let mut steps = 0usize;
    let omega_ref = opts.omega_ref.abs().max(T::min_positive_value());
    // Stage one: split-step relaxation to a loose tolerance.
    {
        let mut stepper = ImaginaryTime::new(grid.clone(), potential, nonlinearity, dtau)?;
        let coarse = (opts.tol * lit(1e4)).max(lit(1e-6)) * omega_ref;
        let mut last_mu = stepper.chemical_potential(&psi).0;
        let budget = opts.max_steps / 2;
        while steps < budget {
            for _ in 0..opts.check_every.max(1) {
                stepper.step(&mut psi)?;
            }
            steps += opts.check_every.max(1);
            let (mu, _) = stepper.chemical_potential(&psi);
            if !mu.is_finite() {
                return Err(Error::NonFinite { step: steps });
            }
            if (mu - last_mu).abs() < coarse {
                break;
            }
            last_mu = mu;
        }
    }

    // Stage two: preconditioned gradient polish.
    let mut spectral = Spectral::new(grid.clone());
    let n = grid.n_points();
    let mut h = vec![Complex::default(); n];
    let mut dir = vec![Complex::default(); n];
    let (mut mu, mut residual) =
        chemical_potential_with(&mut spectral, psi.values(), &v, nonlinearity, T::zero(), &mut h);
    let mut energy = energy_with(&mut spectral, &psi, potential, nonlinearity);
    let mut last_mu = mu;
    let mut tau = lit::<T>(0.5);
    let stall_floor = lit::<T>(1e-12);
    loop {
        let converged =
            residual < opts.tol && (mu - last_mu).abs() < opts.tol * omega_ref;
        if converged {
            break;
        }
        if steps >= opts.max_steps {
            return Err(Error::NotConverged {
                steps,
                residual: residual.as_f64(),
            });
        }
        steps += 1;

        // d = α D^{-1/2} (α + k²/2)^{-1} D^{-1/2} (Hψ − μψ), D = α + V − V_min + G.
        let alpha = (mu - v_min).abs().max(lit::<T>(1e-2) * omega_ref).max(lit(1e-6));
        let mut scale = Vec::with_capacity(n);
        for ((d, (p, hp)), &vj) in dir.iter_mut().zip(psi.values().iter().zip(&h)).zip(&v) {
            let g = nonlinearity.potential(p.norm_sqr(), T::zero());
            let s = (alpha + vj - v_min + g.max(T::zero())).sqrt().recip();
            *d = (*hp - *p * mu) * s;
            scale.push(s);
        }
        spectral.apply_real_symbol(&mut dir, |k| (alpha + lit::<T>(0.5) * k * k).recip());
        for (d, s) in dir.iter_mut().zip(&scale) {
            *d = *d * *s * alpha;
        }

        let mut accepted = false;
        while !accepted {
            let mut trial = psi.clone();
            for (c, d) in trial.values_mut().iter_mut().zip(&dir) {
                *c = *c - *d * tau;
            }
            trial.normalize()?;
            let e_trial = energy_with(&mut spectral, &trial, potential, nonlinearity);
            if e_trial <= energy + energy.abs() * lit::<T>(1e-13) {
                psi = trial;
                energy = e_trial;
                accepted = true;
                tau = (tau * lit(1.2)).min(lit(2.0));
            } else {
                tau = tau * lit(0.5);
                if tau < stall_floor {
                    // Energy is flat to rounding; accept the step so the
                    // residual test decides.
                    psi = trial;
                    energy = e_trial;
                    accepted = true;
                    tau = lit(0.5);
                }
            }
        }
        last_mu = mu;
        let (m, r) =
            chemical_potential_with(&mut spectral, psi.values(), &v, nonlinearity, T::zero(), &mut h);
        mu = m;
        residual = r;
        if !mu.is_finite() {
            return Err(Error::NonFinite { step: steps });
        }
    }

    Ok(GroundState {
        psi,
        chemical_potential: mu,
        energy,
        residual,
        steps,
    })
}
