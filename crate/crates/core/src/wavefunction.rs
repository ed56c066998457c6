use std::sync::Arc;

use num_complex::Complex;

use crate::error::{invalid, Result};
use crate::grid::Grid1D;
use crate::scalar::Scalar;

/// Condensate order parameter sampled on a grid.
///
/// The atom number lives in the nonlinearity; ψ itself is normalised to one.
#[derive(Debug, Clone)]
pub struct Wavefunction<T> {
    grid: Arc<Grid1D<T>>,
    values: Vec<Complex<T>>,
    time: T,
}

impl<T: Scalar> Wavefunction<T> {
    pub fn new(grid: Arc<Grid1D<T>>, values: Vec<Complex<T>>, time: T) -> Result<Self> {
        if values.len() != grid.n_points() {
            return invalid(format!(
                "wavefunction has {} samples, grid has {}",
                values.len(),
                grid.n_points()
            ));
        }
        if values.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return invalid("wavefunction contains non-finite samples");
        }
        Ok(Self { grid, values, time })
    }

    /// Samples `f(z)` on the grid at t = 0 (not normalised).
    pub fn from_fn(grid: Arc<Grid1D<T>>, f: impl Fn(T) -> Complex<T>) -> Result<Self> {
        let values = grid.z().iter().map(|&z| f(z)).collect();
        Self::new(grid, values, T::zero())
    }

    /// Real profile, normalised.
    pub fn from_real_fn(grid: Arc<Grid1D<T>>, f: impl Fn(T) -> T) -> Result<Self> {
        let mut psi = Self::from_fn(grid, |z| Complex::new(f(z), T::zero()))?;
        psi.normalize()?;
        Ok(psi)
    }

    pub fn grid(&self) -> &Arc<Grid1D<T>> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.values
    }

    pub fn time(&self) -> T {
        self.time
    }

    pub fn set_time(&mut self, t: T) {
        self.time = t;
    }

    pub fn density(&self) -> Vec<T> {
        self.values.iter().map(|c| c.norm_sqr()).collect()
    }

    /// ∫|ψ|² dz.
    pub fn norm(&self) -> T {
        self.grid.integrate(self.values.iter().map(|c| c.norm_sqr()))
    }

    pub fn normalize(&mut self) -> Result<()> {
        let norm = self.norm();
        if !(norm > T::zero()) || !norm.is_finite() {
            return invalid(format!("cannot normalise a wavefunction with norm {norm}"));
        }
        let s = norm.sqrt().recip();
        for c in &mut self.values {
            *c = *c * s;
        }
        Ok(())
    }

    /// Phase unwrapped from left to right.
    pub fn phase_profile(&self) -> Vec<T> {
        let two_pi = T::TAU();
        let mut out = Vec::with_capacity(self.values.len());
        let mut offset = T::zero();
        let mut prev: Option<T> = None;
        for c in &self.values {
            let raw = c.im.atan2(c.re);
            if let Some(p) = prev {
                let mut jump = raw + offset - p;
                while jump > T::PI() {
                    offset = offset - two_pi;
                    jump = jump - two_pi;
                }
                while jump <= -T::PI() {
                    offset = offset + two_pi;
                    jump = jump + two_pi;
                }
            }
            let unwrapped = raw + offset;
            out.push(unwrapped);
            prev = Some(unwrapped);
        }
        out
    }

    /// ⟨self|other⟩ = ∫ self* · other dz.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        let sum = self
            .values
            .iter()
            .zip(&other.values)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b);
        sum * self.grid.dz()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Arc<Grid1D<f64>> {
        Arc::new(Grid1D::new(512, 51.2).unwrap())
    }

    #[test]
    fn uniform_state_is_flat() {
        let psi = Wavefunction::from_real_fn(grid(), |_| 3.0).unwrap();
        let d = psi.density();
        assert!(d.iter().all(|&x| (x - d[0]).abs() < 1e-15));
        assert!(psi.phase_profile().iter().all(|&p| p == 0.0));
        assert!((psi.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tanh_has_pi_phase_step() {
        let xi = 0.5;
        let psi = Wavefunction::from_real_fn(grid(), |z| (z / xi).tanh() * 2.0).unwrap();
        let phase = psi.phase_profile();
        let left = phase[10];
        let right = phase[500];
        assert!(((left - right).abs() - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn unwrapping_follows_a_linear_ramp() {
        let g = grid();
        let k = 1.3;
        let psi = Wavefunction::from_fn(g.clone(), |z| Complex::from_polar(1.0, k * z)).unwrap();
        let phase = psi.phase_profile();
        for (i, p) in phase.iter().enumerate() {
            let expected = k * (g.z()[i] - g.z()[0]) + phase[0];
            assert!((p - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_mismatched_or_nonfinite() {
        let g = grid();
        assert!(Wavefunction::new(g.clone(), vec![Complex::new(1.0, 0.0); 3], 0.0).is_err());
        let mut v = vec![Complex::new(1.0, 0.0); 512];
        v[7].re = f64::NAN;
        assert!(Wavefunction::new(g.clone(), v, 0.0).is_err());
        let zero = Wavefunction::new(g, vec![Complex::new(0.0, 0.0); 512], 0.0);
        assert!(zero.unwrap().normalize().is_err());
    }
}
