//! Potential and nonlinearity abstractions plus the energy functional of
//! iψ_t = [−½∂² + V(z,t) + G(|ψ|², t)]ψ (ħ = m = 1).

use num_complex::Complex;

use crate::grid::Grid1D;
use crate::scalar::{lit, Scalar};
use crate::spectral::Spectral;
use crate::wavefunction::Wavefunction;

/// External potential V(z, t).
pub trait Potential<T: Scalar>: Send + Sync {
    fn value(&self, z: T, t: T) -> T;

    /// Static potentials are sampled once per run.
    fn is_time_dependent(&self) -> bool {
        false
    }

    fn sample(&self, grid: &Grid1D<T>, t: T, out: &mut [T]) {
        for (o, &z) in out.iter_mut().zip(grid.z()) {
            *o = self.value(z, t);
        }
    }

    fn sampled(&self, grid: &Grid1D<T>, t: T) -> Vec<T> {
        let mut out = vec![T::zero(); grid.n_points()];
        self.sample(grid, t, &mut out);
        out
    }
}

/// Local mean-field energy G(n, t) and its antiderivative F(n, t).
pub trait Nonlinearity<T: Scalar>: Send + Sync {
    /// G(n): the term multiplying ψ in the evolution equation.
    fn potential(&self, density: T, t: T) -> T;

    /// F(n) = ∫₀ⁿ G(n') dn', the interaction energy density.
    fn energy_density(&self, density: T, t: T) -> T;

    /// Largest density for which G is defined, if bounded.
    fn density_limit(&self, _t: T) -> Option<T> {
        None
    }
}

impl<T: Scalar, P: Potential<T> + ?Sized> Potential<T> for &P {
    fn value(&self, z: T, t: T) -> T {
        (**self).value(z, t)
    }
    fn is_time_dependent(&self) -> bool {
        (**self).is_time_dependent()
    }
}

impl<T: Scalar, P: Potential<T> + ?Sized> Potential<T> for Box<P> {
    fn value(&self, z: T, t: T) -> T {
        (**self).value(z, t)
    }
    fn is_time_dependent(&self) -> bool {
        (**self).is_time_dependent()
    }
}

impl<T: Scalar, N: Nonlinearity<T> + ?Sized> Nonlinearity<T> for &N {
    fn potential(&self, n: T, t: T) -> T {
        (**self).potential(n, t)
    }
    fn energy_density(&self, n: T, t: T) -> T {
        (**self).energy_density(n, t)
    }
    fn density_limit(&self, t: T) -> Option<T> {
        (**self).density_limit(t)
    }
}

impl<T: Scalar, N: Nonlinearity<T> + ?Sized> Nonlinearity<T> for Box<N> {
    fn potential(&self, n: T, t: T) -> T {
        (**self).potential(n, t)
    }
    fn energy_density(&self, n: T, t: T) -> T {
        (**self).energy_density(n, t)
    }
    fn density_limit(&self, t: T) -> Option<T> {
        (**self).density_limit(t)
    }
}

/// V ≡ 0.
#[derive(Debug, Clone, Copy, Default)]
pub struct FreeSpace;

impl<T: Scalar> Potential<T> for FreeSpace {
    fn value(&self, _z: T, _t: T) -> T {
        T::zero()
    }
}

/// G ≡ 0.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoInteraction;

impl<T: Scalar> Nonlinearity<T> for NoInteraction {
    fn potential(&self, _n: T, _t: T) -> T {
        T::zero()
    }
    fn energy_density(&self, _n: T, _t: T) -> T {
        T::zero()
    }
}

/// Static harmonic well ½ω²z².
#[derive(Debug, Clone, Copy)]
pub struct HarmonicWell<T> {
    pub omega: T,
}

impl<T: Scalar> Potential<T> for HarmonicWell<T> {
    fn value(&self, z: T, _t: T) -> T {
        lit::<T>(0.5) * self.omega * self.omega * z * z
    }
}

/// Cubic nonlinearity G(n) = g·n.
#[derive(Debug, Clone, Copy)]
pub struct Cubic<T> {
    pub g: T,
}

impl<T: Scalar> Nonlinearity<T> for Cubic<T> {
    fn potential(&self, n: T, _t: T) -> T {
        self.g * n
    }
    fn energy_density(&self, n: T, _t: T) -> T {
        lit::<T>(0.5) * self.g * n * n
    }
}

/// Potential given by a closure.
pub struct FnPotential<F> {
    f: F,
    time_dependent: bool,
}

impl<F> FnPotential<F> {
    pub fn stationary(f: F) -> Self {
        Self {
            f,
            time_dependent: false,
        }
    }

    pub fn time_dependent(f: F) -> Self {
        Self {
            f,
            time_dependent: true,
        }
    }
}

impl<T: Scalar, F: Fn(T, T) -> T + Send + Sync> Potential<T> for FnPotential<F> {
    fn value(&self, z: T, t: T) -> T {
        (self.f)(z, t)
    }
    fn is_time_dependent(&self) -> bool {
        self.time_dependent
    }
}

/// Sum of two potentials.
#[derive(Debug, Clone)]
pub struct Superposition<A, B>(pub A, pub B);

impl<T: Scalar, A: Potential<T>, B: Potential<T>> Potential<T> for Superposition<A, B> {
    fn value(&self, z: T, t: T) -> T {
        self.0.value(z, t) + self.1.value(z, t)
    }
    fn is_time_dependent(&self) -> bool {
        self.0.is_time_dependent() || self.1.is_time_dependent()
    }
}

/// Writes Hψ = −½ψ'' + (V + G(|ψ|²))ψ into `out`.
pub(crate) fn apply_hamiltonian<T: Scalar, N: Nonlinearity<T> + ?Sized>(
    spectral: &mut Spectral<T>,
    psi: &[Complex<T>],
    v: &[T],
    nonlinearity: &N,
    t: T,
    out: &mut [Complex<T>],
) {
    spectral.kinetic(psi, out);
    for ((o, p), &vj) in out.iter_mut().zip(psi).zip(v) {
        let g = nonlinearity.potential(p.norm_sqr(), t);
        *o = *o + *p * (vj + g);
    }
}

/// Energy per particle E[ψ] = ∫ ½|ψ'|² + V|ψ|² + F(|ψ|²) dz at time t.
pub fn energy<T, P, N>(psi: &Wavefunction<T>, potential: &P, nonlinearity: &N) -> T
where
    T: Scalar,
    P: Potential<T> + ?Sized,
    N: Nonlinearity<T> + ?Sized,
{
    let mut spectral = Spectral::new(psi.grid().clone());
    energy_with(&mut spectral, psi, potential, nonlinearity)
}

pub(crate) fn energy_with<T, P, N>(
    spectral: &mut Spectral<T>,
    psi: &Wavefunction<T>,
    potential: &P,
    nonlinearity: &N,
) -> T
where
    T: Scalar,
    P: Potential<T> + ?Sized,
    N: Nonlinearity<T> + ?Sized,
{
    let grid = psi.grid();
    let t = psi.time();
    let kinetic = spectral.kinetic_energy(psi.values());
    let local = grid.integrate(psi.values().iter().zip(grid.z()).map(|(c, &z)| {
        let n = c.norm_sqr();
        potential.value(z, t) * n + nonlinearity.energy_density(n, t)
    }));
    kinetic + local
}

/// Chemical potential ⟨ψ|H|ψ⟩/⟨ψ|ψ⟩ and residual ‖Hψ − μψ‖/‖ψ‖.
pub fn chemical_potential<T, P, N>(psi: &Wavefunction<T>, potential: &P, nonlinearity: &N) -> (T, T)
where
    T: Scalar,
    P: Potential<T> + ?Sized,
    N: Nonlinearity<T> + ?Sized,
{
    let mut spectral = Spectral::new(psi.grid().clone());
    let v = potential.sampled(psi.grid(), psi.time());
    let mut h = vec![Complex::default(); v.len()];
    chemical_potential_with(&mut spectral, psi.values(), &v, nonlinearity, psi.time(), &mut h)
}

pub(crate) fn chemical_potential_with<T, N>(
    spectral: &mut Spectral<T>,
    psi: &[Complex<T>],
    v: &[T],
    nonlinearity: &N,
    t: T,
    h_psi: &mut [Complex<T>],
) -> (T, T)
where
    T: Scalar,
    N: Nonlinearity<T> + ?Sized,
{
    apply_hamiltonian(spectral, psi, v, nonlinearity, t, h_psi);
    let mut norm = T::zero();
    let mut mu = T::zero();
    for (p, h) in psi.iter().zip(h_psi.iter()) {
        norm = norm + p.norm_sqr();
        mu = mu + (p.conj() * h).re;
    }
    let mu = mu / norm;
    let res = psi
        .iter()
        .zip(h_psi.iter())
        .fold(T::zero(), |acc, (p, h)| acc + (*h - *p * mu).norm_sqr());
    (mu, (res / norm).sqrt())
}
