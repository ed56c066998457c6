//! Conversion between SI quantities and the internal unit system.
//!
//! Internally ħ = m = 1 and lengths are measured in micrometres, so the time
//! unit is m·(1 µm)²/ħ and the energy unit ħ²/(m·(1 µm)²). Every value that
//! enters a solver passes through a [`UnitSystem`] exactly once.

use std::f64::consts::PI;

/// Reduced Planck constant [J s] (CODATA 2018, exact).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Atomic mass unit [kg] (CODATA 2018).
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
/// Mass of ⁸⁷Rb [kg].
pub const RB87_MASS: f64 = 86.909_180_527 * ATOMIC_MASS_UNIT;
/// s-wave scattering length of ⁸⁷Rb in |F=2, m_F=2⟩ [m].
pub const RB87_SCATTERING_LENGTH: f64 = 5.3e-9;

const MICROMETRE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    mass: f64,
    time_unit: f64,
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self::new(RB87_MASS)
    }
}

impl UnitSystem {
    /// Unit system for atoms of the given mass [kg].
    pub fn new(mass_kg: f64) -> Self {
        assert!(mass_kg > 0.0, "mass must be positive");
        Self {
            mass: mass_kg,
            time_unit: mass_kg * MICROMETRE * MICROMETRE / HBAR,
        }
    }

    pub fn mass_kg(&self) -> f64 {
        self.mass
    }

    /// Length of one internal time unit in seconds.
    pub fn time_unit_s(&self) -> f64 {
        self.time_unit
    }

    /// One internal energy unit in joules.
    pub fn energy_unit_j(&self) -> f64 {
        HBAR / self.time_unit
    }

    pub fn length_unit_m(&self) -> f64 {
        MICROMETRE
    }

    /// Frequency ν [Hz] to internal angular frequency ω = 2πν.
    pub fn angular_from_hz(&self, nu_hz: f64) -> f64 {
        2.0 * PI * nu_hz * self.time_unit
    }

    /// Internal angular frequency to ν [Hz].
    pub fn hz_from_angular(&self, omega: f64) -> f64 {
        omega / (2.0 * PI * self.time_unit)
    }

    /// Energy quoted as h·ν [Hz] to internal energy (numerically equal to ω).
    pub fn energy_from_hz(&self, nu_hz: f64) -> f64 {
        self.angular_from_hz(nu_hz)
    }

    pub fn hz_from_energy(&self, energy: f64) -> f64 {
        self.hz_from_angular(energy)
    }

    pub fn time_from_ms(&self, ms: f64) -> f64 {
        ms * 1e-3 / self.time_unit
    }

    pub fn ms_from_time(&self, t: f64) -> f64 {
        t * self.time_unit * 1e3
    }

    /// Lengths are already in µm; nanometres are scaled.
    pub fn length_from_nm(&self, nm: f64) -> f64 {
        nm * 1e-3
    }

    pub fn length_from_m(&self, metres: f64) -> f64 {
        metres / MICROMETRE
    }

    pub fn m_from_length(&self, length: f64) -> f64 {
        length * MICROMETRE
    }

    /// Internal speed (µm per time unit) to m/s.
    pub fn m_per_s_from_speed(&self, v: f64) -> f64 {
        v * MICROMETRE / self.time_unit
    }
}
