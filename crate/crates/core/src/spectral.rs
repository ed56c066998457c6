use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::grid::Grid1D;
use crate::scalar::{lit, Scalar};

/// FFT plans and scratch space bound to one grid.
///
/// Plans are created per instance, so each run owns its own and nothing
/// mutable is shared between concurrent simulations.
pub struct Spectral<T: Scalar> {
    grid: Arc<Grid1D<T>>,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    scratch: Vec<Complex<T>>,
    work: Vec<Complex<T>>,
}

impl<T: Scalar> Spectral<T> {
    pub fn new(grid: Arc<Grid1D<T>>) -> Self {
        let n = grid.n_points();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            grid,
            forward,
            inverse,
            scratch: vec![Complex::default(); scratch_len],
            work: vec![Complex::default(); n],
        }
    }

    pub fn grid(&self) -> &Arc<Grid1D<T>> {
        &self.grid
    }

    /// Unnormalised forward transform in place.
    pub fn forward(&mut self, buf: &mut [Complex<T>]) {
        self.forward.process_with_scratch(buf, &mut self.scratch);
    }

    /// Unnormalised inverse transform in place (the caller divides by n).
    pub fn inverse_raw(&mut self, buf: &mut [Complex<T>]) {
        self.inverse.process_with_scratch(buf, &mut self.scratch);
    }

    /// Normalised inverse transform in place.
    pub fn inverse(&mut self, buf: &mut [Complex<T>]) {
        self.inverse_raw(buf);
        let s = lit::<T>(self.grid.n_points() as f64).recip();
        for c in buf.iter_mut() {
            *c = *c * s;
        }
    }

    /// Multiplies by `multiplier[k]` in Fourier space; the multiplier must
    /// already contain the 1/n normalisation.
    pub fn apply_fourier_multiplier(&mut self, buf: &mut [Complex<T>], multiplier: &[Complex<T>]) {
        self.forward(buf);
        for (c, m) in buf.iter_mut().zip(multiplier) {
            *c = *c * *m;
        }
        self.inverse_raw(buf);
    }

    /// Same as [`apply_fourier_multiplier`](Self::apply_fourier_multiplier) for a real symbol,
    /// without the 1/n folded in.
    pub fn apply_real_symbol(&mut self, buf: &mut [Complex<T>], symbol: impl Fn(T) -> T) {
        self.forward(buf);
        let inv_n = lit::<T>(self.grid.n_points() as f64).recip();
        for (c, &k) in buf.iter_mut().zip(self.grid.k()) {
            *c = *c * (symbol(k) * inv_n);
        }
        self.inverse_raw(buf);
    }

    /// Writes −½ψ'' into `out`.
    pub fn kinetic(&mut self, psi: &[Complex<T>], out: &mut [Complex<T>]) {
        out.copy_from_slice(psi);
        let half = lit::<T>(0.5);
        self.apply_real_symbol(out, |k| half * k * k);
    }

    /// ∫ ½|ψ'|² dz, evaluated spectrally.
    pub fn kinetic_energy(&mut self, psi: &[Complex<T>]) -> T {
        let mut work = std::mem::take(&mut self.work);
        work.copy_from_slice(psi);
        self.forward(&mut work);
        let half = lit::<T>(0.5);
        let sum = work
            .iter()
            .zip(self.grid.k())
            .fold(T::zero(), |acc, (c, &k)| acc + half * k * k * c.norm_sqr());
        self.work = work;
        sum * self.grid.dz() / lit(self.grid.n_points() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinetic_energy_of_a_gaussian() {
        // ψ = (πσ²)^(-1/4) exp(-z²/2σ²) has ⟨−½∂²⟩ = 1/(4σ²).
        let grid = Arc::new(Grid1D::<f64>::new(512, 40.0).unwrap());
        let sigma = 1.7;
        let norm = (std::f64::consts::PI * sigma * sigma).powf(-0.25);
        let psi: Vec<_> = grid
            .z()
            .iter()
            .map(|z| Complex::new(norm * (-z * z / (2.0 * sigma * sigma)).exp(), 0.0))
            .collect();
        let mut sp = Spectral::new(grid);
        let ek = sp.kinetic_energy(&psi);
        assert!((ek - 1.0 / (4.0 * sigma * sigma)).abs() < 1e-12);
    }

    #[test]
    fn round_trip_is_identity() {
        let grid = Arc::new(Grid1D::<f64>::new(256, 10.0).unwrap());
        let orig: Vec<_> = (0..256).map(|i| Complex::new(i as f64, -(i as f64).sin())).collect();
        let mut buf = orig.clone();
        let mut sp = Spectral::new(grid);
        sp.forward(&mut buf);
        sp.inverse(&mut buf);
        for (a, b) in buf.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-10);
        }
    }
}
