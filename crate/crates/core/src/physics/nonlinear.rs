//! Quasi-1D mean-field terms.
//!
//! With ψ normalised to one and u = 1 + 2a_sN|ψ|²:
//!
//! * 1D GPE: G(n) = g₁n, g₁ = 2ω_⊥a_sN.
//! * NPSE: G(n) = 4πa_sNn / (2πa_⊥²√u) + (ω_⊥/2)(1/√u + √u) − ω_⊥.
//!
//! The NPSE constant ω_⊥ (the transverse zero-point energy at n = 0) is
//! gauged away so both models agree as n → 0 and chemical potentials are
//! quoted relative to the same origin.

use crate::error::{invalid, Result};
use crate::hamiltonian::Nonlinearity;
use crate::scalar::{lit, Scalar};

use super::trap::{FrequencySchedule, TrapConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NonlinearKind {
    Gpe1d,
    Npse,
}

/// Mean-field model with its coefficients in internal units.
///
/// ω_⊥ follows the trap schedule, so a transverse ramp changes the
/// nonlinearity in time.
#[derive(Debug, Clone, Copy)]
pub struct NonlinearSpec<T> {
    pub kind: NonlinearKind,
    /// a_s [µm].
    pub scattering_length: T,
    pub atom_number: T,
    pub schedule: FrequencySchedule<T>,
}

impl<T: Scalar> NonlinearSpec<T> {
    pub fn from_trap(kind: NonlinearKind, trap: &TrapConfig) -> Result<Self> {
        trap.validate()?;
        let spec = Self {
            kind,
            scattering_length: lit(trap.scattering_length()),
            atom_number: lit(trap.atom_number as f64),
            schedule: trap.schedule(),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// a_⊥ > |a_s| at every point of the schedule.
    pub fn validate(&self) -> Result<()> {
        for (_, w) in [self.schedule.initial, self.schedule.final_] {
            let a_perp = w.recip().sqrt();
            if !(a_perp > self.scattering_length.abs()) {
                return invalid(format!(
                    "transverse length {a_perp} must exceed the scattering length {}",
                    self.scattering_length
                ));
            }
        }
        Ok(())
    }

    /// 2a_sN.
    pub fn alpha(&self) -> T {
        lit::<T>(2.0) * self.scattering_length * self.atom_number
    }

    pub fn omega_perp(&self, t: T) -> T {
        self.schedule.at(t).1
    }

    /// g₁ = 2ω_⊥a_sN at time t.
    pub fn g1(&self, t: T) -> T {
        self.omega_perp(t) * self.alpha()
    }

    /// NPSE term as printed, without the gauge shift.
    pub fn npse_ungauged(&self, n: T, t: T) -> T {
        let w = self.omega_perp(t);
        let a_perp_sq = w.recip();
        let g = lit::<T>(4.0) * T::PI() * self.scattering_length;
        let root = (T::one() + self.alpha() * n).sqrt();
        g * self.atom_number * n / (lit::<T>(2.0) * T::PI() * a_perp_sq * root)
            + lit::<T>(0.5) * w * (root.recip() + root)
    }
}

impl<T: Scalar> Nonlinearity<T> for NonlinearSpec<T> {
    fn potential(&self, n: T, t: T) -> T {
        match self.kind {
            NonlinearKind::Gpe1d => self.g1(t) * n,
            NonlinearKind::Npse => {
                // ω_⊥(1.5√u − 0.5/√u − 1) rearranged to avoid cancellation at small n.
                let x = self.alpha() * n;
                let s = (T::one() + x).sqrt();
                self.omega_perp(t) * x * (lit::<T>(3.0) * s + T::one())
                    / (lit::<T>(2.0) * s * (s + T::one()))
            }
        }
    }

    fn energy_density(&self, n: T, t: T) -> T {
        match self.kind {
            NonlinearKind::Gpe1d => lit::<T>(0.5) * self.g1(t) * n * n,
            NonlinearKind::Npse => {
                // (ω_⊥/α)(u^{3/2} − u^{1/2} − u + 1) = ω_⊥αn²/(1 + √u)
                let s = (T::one() + self.alpha() * n).sqrt();
                self.omega_perp(t) * self.alpha() * n * n / (T::one() + s)
            }
        }
    }

    fn density_limit(&self, _t: T) -> Option<T> {
        match self.kind {
            NonlinearKind::Npse if self.alpha() < T::zero() => Some(-self.alpha().recip()),
            _ => None,
        }
    }
}

/// G(n) = g₁n elementwise (at t = 0).
pub fn gpe1d_nonlinearity<T: Scalar>(spec: &NonlinearSpec<T>, density: &[T]) -> Vec<T> {
    let g1 = spec.g1(T::zero());
    density.iter().map(|&n| g1 * n).collect()
}

/// Gauge-subtracted NPSE term elementwise (at t = 0).
pub fn npse_nonlinearity<T: Scalar>(spec: &NonlinearSpec<T>, density: &[T]) -> Result<Vec<T>> {
    let npse = NonlinearSpec {
        kind: NonlinearKind::Npse,
        ..*spec
    };
    if let Some(limit) = npse.density_limit(T::zero()) {
        if let Some(&bad) = density.iter().find(|&&n| n >= limit) {
            return invalid(format!("density {bad} violates 1 + 2a_sNn > 0"));
        }
    }
    Ok(density.iter().map(|&n| npse.potential(n, T::zero())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference(kind: NonlinearKind) -> NonlinearSpec<f64> {
        NonlinearSpec::from_trap(kind, &TrapConfig::rb87(53.0, 890.0, 1700)).unwrap()
    }

    #[test]
    fn zero_density_and_gauge() {
        let s = reference(NonlinearKind::Npse);
        assert_eq!(s.potential(0.0, 0.0), 0.0);
        assert!((s.npse_ungauged(0.0, 0.0) - s.omega_perp(0.0)).abs() < 1e-12);
        let g = reference(NonlinearKind::Gpe1d);
        assert_eq!(g.potential(0.0, 0.0), 0.0);
    }

    #[test]
    fn gauged_form_matches_printed_form() {
        let s = reference(NonlinearKind::Npse);
        for &n in &[1e-6, 1e-3, 0.05, 0.2, 3.0] {
            let a = s.potential(n, 0.0);
            let b = s.npse_ungauged(n, 0.0) - s.omega_perp(0.0);
            assert!((a - b).abs() < 1e-12 * (1.0 + b.abs()), "{n}: {a} vs {b}");
        }
    }

    #[test]
    fn gpe_is_linear() {
        let g = reference(NonlinearKind::Gpe1d);
        let d = [0.0, 0.01, 0.07, 0.3];
        let g1 = gpe1d_nonlinearity(&g, &d);
        let g2 = gpe1d_nonlinearity(&g, &d.map(|x| 2.0 * x));
        for (a, b) in g1.iter().zip(&g2) {
            assert!((2.0 * a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn npse_weak_density_limit_is_the_gpe_coupling() {
        // Taylor oracle: (G(n) − G(0))/n → g₁ with an O(n) correction whose
        // slope is −(3/8)g₁α, from expanding 1.5√u − 0.5/√u − 1 to second order.
        let s = reference(NonlinearKind::Npse);
        let g1 = s.g1(0.0);
        let alpha = s.alpha();
        for &n in &[1e-8, 1e-6, 1e-4] {
            let slope = s.potential(n, 0.0) / n;
            let taylor = g1 * (1.0 - 0.375 * alpha * n);
            assert!((slope - taylor).abs() / g1 < 2.0 * (alpha * n).powi(2), "{n}");
        }
        // Reference value for the (890 Hz, N = 1700) set.
        assert!((g1 - 137.9).abs() < 0.2, "{g1}");
    }

    #[test]
    fn npse_is_monotone_and_sub_gpe() {
        let s = reference(NonlinearKind::Npse);
        let g = reference(NonlinearKind::Gpe1d);
        let mut prev = -1.0;
        for i in 0..2000 {
            let n = i as f64 * 1e-3;
            let v = s.potential(n, 0.0);
            assert!(v >= prev);
            assert!(v <= g.potential(n, 0.0) + 1e-12);
            prev = v;
        }
    }

    #[test]
    fn energy_density_is_the_antiderivative() {
        for kind in [NonlinearKind::Gpe1d, NonlinearKind::Npse] {
            let s = reference(kind);
            for &n in &[0.01, 0.1, 0.5] {
                let h = 1e-6;
                let fd = (s.energy_density(n + h, 0.0) - s.energy_density(n - h, 0.0)) / (2.0 * h);
                assert!((fd - s.potential(n, 0.0)).abs() < 1e-7 * s.potential(n, 0.0));
            }
            assert_eq!(s.energy_density(0.0, 0.0), 0.0);
        }
    }

    #[test]
    fn attractive_npse_domain() {
        let mut s = reference(NonlinearKind::Npse);
        s.scattering_length = -s.scattering_length;
        let limit = s.density_limit(0.0).unwrap();
        assert!(npse_nonlinearity(&s, &[0.5 * limit]).is_ok());
        assert!(npse_nonlinearity(&s, &[1.1 * limit]).is_err());
    }

    #[test]
    fn transverse_length_must_exceed_scattering_length() {
        let mut t = TrapConfig::rb87(53.0, 890.0, 1700);
        t.scattering_length_nm = 500.0;
        assert!(NonlinearSpec::<f64>::from_trap(NonlinearKind::Npse, &t).is_err());
    }
}
