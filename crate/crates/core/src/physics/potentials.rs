use crate::grid::Grid1D;
use crate::hamiltonian::Potential;
use crate::scalar::{lit, Scalar};

use super::trap::FrequencySchedule;

/// ½ω²z² on the grid (internal units, m = 1).
pub fn harmonic_potential<T: Scalar>(grid: &Grid1D<T>, omega_z: T) -> Vec<T> {
    let half = lit::<T>(0.5);
    grid.z().iter().map(|&z| half * omega_z * omega_z * z * z).collect()
}

/// depth·cos²(π(z − offset)/spacing) on the grid.
pub fn lattice_potential<T: Scalar>(grid: &Grid1D<T>, depth: T, spacing: T, offset: T) -> Vec<T> {
    let lattice = OpticalLattice {
        depth,
        spacing,
        offset,
    };
    grid.z().iter().map(|&z| lattice.value(z, T::zero())).collect()
}

/// Harmonic trap following a frequency schedule; only ω_z(t) enters V.
#[derive(Debug, Clone, Copy)]
pub struct RampedHarmonic<T> {
    pub schedule: FrequencySchedule<T>,
}

impl<T: Scalar> RampedHarmonic<T> {
    pub fn stationary(omega_z: T) -> Self {
        Self {
            schedule: FrequencySchedule::constant(omega_z, omega_z),
        }
    }
}

impl<T: Scalar> Potential<T> for RampedHarmonic<T> {
    fn value(&self, z: T, t: T) -> T {
        let w = self.schedule.at(t).0;
        lit::<T>(0.5) * w * w * z * z
    }

    fn is_time_dependent(&self) -> bool {
        !self.schedule.is_constant()
    }
}

/// cos² optical lattice; with offset 0 a barrier maximum sits at z = 0.
#[derive(Debug, Clone, Copy)]
pub struct OpticalLattice<T> {
    pub depth: T,
    pub spacing: T,
    pub offset: T,
}

impl<T: Scalar> Potential<T> for OpticalLattice<T> {
    fn value(&self, z: T, _t: T) -> T {
        let c = (T::PI() * (z - self.offset) / self.spacing).cos();
        self.depth * c * c
    }
}

/// Minima of ½ω²z² + lattice on either side of z = 0, located by golden
/// section search inside the first lattice cell on each side.
pub fn double_well_minima<T: Scalar>(omega_z: T, lattice: &OpticalLattice<T>) -> (T, T) {
    let v = |z: T| lit::<T>(0.5) * omega_z * omega_z * z * z + lattice.value(z, T::zero());
    let right = golden_min(&v, T::zero(), lattice.spacing);
    let left = golden_min(&v, -lattice.spacing, T::zero());
    (left, right)
}

fn golden_min<T: Scalar>(f: &impl Fn(T) -> T, mut a: T, mut b: T) -> T {
    let r = lit::<T>(0.5 * (5f64.sqrt() - 1.0));
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    for _ in 0..200 {
        if (b - a).abs() < lit::<T>(1e-13) * (T::one() + a.abs() + b.abs()) {
            break;
        }
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - r * (b - a);
        d = a + r * (b - a);
    }
    (a + b) * lit(0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::UnitSystem;

    fn grid() -> Grid1D<f64> {
        Grid1D::new(1024, 64.0).unwrap()
    }

    #[test]
    fn harmonic_values() {
        let g = grid();
        let w = 0.45;
        let v = harmonic_potential(&g, w);
        assert_eq!(v[512], 0.0);
        for i in 1..1024 {
            assert_eq!(v[i], v[g.mirror(i)]);
        }
        // At the oscillator length √(1/ω) the potential is ω/2.
        let a = (1.0 / w).sqrt();
        let p = RampedHarmonic::stationary(w);
        assert!((p.value(a, 0.0) - w / 2.0).abs() < 1e-14);
    }

    #[test]
    fn lattice_node_and_zero_depth() {
        let l = OpticalLattice::<f64> {
            depth: 3.0,
            spacing: 5.7,
            offset: 0.0,
        };
        assert!(l.value(5.7 / 2.0, 0.0).abs() < 1e-14);
        assert!((l.value(0.0, 0.0) - 3.0).abs() < 1e-14);
        let g = grid();
        let flat = lattice_potential(&g, 0.0, 5.7, 0.0);
        assert!(flat.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn merge_double_well_separation() {
        let u = UnitSystem::default();
        let l = OpticalLattice {
            depth: u.energy_from_hz(1000.0),
            spacing: 5.7,
            offset: 0.0,
        };
        let (left, right) = double_well_minima(u.angular_from_hz(63.0), &l);
        assert!((left + right).abs() < 1e-7);
        let sep = right - left;
        assert!((sep - 5.4).abs() < 0.2, "separation {sep}");
        assert!(sep < 5.7);
    }

    #[test]
    fn ramped_harmonic_is_time_dependent_only_when_ramping() {
        let s = FrequencySchedule {
            initial: (1.0, 10.0),
            final_: (0.5, 20.0),
            duration: 2.0,
        };
        let p = RampedHarmonic::<f64> { schedule: s };
        assert!(p.is_time_dependent());
        assert!((p.value(2.0, 1.0) - 0.5 * 0.75 * 0.75 * 4.0).abs() < 1e-14);
        assert!(!RampedHarmonic::stationary(1.0).is_time_dependent());
    }
}
