use crate::error::{invalid, Result};
use crate::scalar::{lit, Scalar};
use crate::units::{UnitSystem, RB87_MASS, RB87_SCATTERING_LENGTH};

/// Optical lattice in SI-flavoured units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeConfig {
    /// Barrier height as h·ν [Hz].
    pub depth_hz: f64,
    pub spacing_um: f64,
    pub offset_um: f64,
}

/// Linear frequency ramp from `initial` to the trap's own frequencies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RampConfig {
    /// (ν_z, ν_⊥) [Hz] at t = 0.
    pub initial: (f64, f64),
    /// (ν_z, ν_⊥) [Hz] reached at `duration_ms`.
    pub final_: (f64, f64),
    pub duration_ms: f64,
}

/// Trap and atom parameters, SI at the boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct TrapConfig {
    pub nu_z: f64,
    pub nu_perp: f64,
    pub atom_number: u64,
    pub scattering_length_nm: f64,
    pub mass_kg: f64,
    pub lattice: Option<LatticeConfig>,
    pub ramp: Option<RampConfig>,
}

impl TrapConfig {
    /// ⁸⁷Rb in a static trap.
    pub fn rb87(nu_z: f64, nu_perp: f64, atom_number: u64) -> Self {
        Self {
            nu_z,
            nu_perp,
            atom_number,
            scattering_length_nm: RB87_SCATTERING_LENGTH * 1e9,
            mass_kg: RB87_MASS,
            lattice: None,
            ramp: None,
        }
    }

    pub fn units(&self) -> UnitSystem {
        UnitSystem::new(self.mass_kg)
    }

    /// Aspect ratio Ω = ν_z/ν_⊥.
    pub fn aspect_ratio(&self) -> f64 {
        self.nu_z / self.nu_perp
    }

    /// Checks positivity and the quasi-1D ordering ν_z < ν_⊥.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("nu_z", self.nu_z),
            ("nu_perp", self.nu_perp),
            ("scattering_length_nm", self.scattering_length_nm),
            ("mass_kg", self.mass_kg),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return invalid(format!("trap.{name} must be positive and finite, got {v}"));
            }
        }
        if self.atom_number == 0 {
            return invalid("trap.atom_number must be positive");
        }
        if self.nu_z >= self.nu_perp {
            return invalid(format!(
                "trap.nu_z ({}) must be smaller than trap.nu_perp ({})",
                self.nu_z, self.nu_perp
            ));
        }
        if let Some(l) = &self.lattice {
            if !(l.depth_hz >= 0.0) || !(l.spacing_um > 0.0) || !l.offset_um.is_finite() {
                return invalid("trap.lattice needs depth_hz >= 0 and spacing_um > 0");
            }
        }
        if let Some(r) = &self.ramp {
            let (z0, p0) = r.initial;
            let (z1, p1) = r.final_;
            if !(z0 > 0.0 && p0 > 0.0 && z1 > 0.0 && p1 > 0.0) {
                return invalid("trap.ramp frequencies must be positive");
            }
            if z0 >= p0 {
                return invalid(format!(
                    "trap.ramp.initial.nu_z ({z0}) must be smaller than trap.ramp.initial.nu_perp ({p0})"
                ));
            }
            if r.final_ != (self.nu_z, self.nu_perp) {
                return invalid(format!(
                    "trap.ramp.final ({z1}, {p1}) must equal (trap.nu_z, trap.nu_perp) = ({}, {})",
                    self.nu_z, self.nu_perp
                ));
            }
            if !(r.duration_ms >= 0.0) {
                return invalid("trap.ramp.duration_ms must be non-negative");
            }
        }
        Ok(())
    }

    /// Internal-unit schedule of (ω_z, ω_⊥); constant without a ramp.
    pub fn schedule<T: Scalar>(&self) -> FrequencySchedule<T> {
        let u = self.units();
        let w = |nu: f64| lit::<T>(u.angular_from_hz(nu));
        match &self.ramp {
            Some(r) => FrequencySchedule {
                initial: (w(r.initial.0), w(r.initial.1)),
                final_: (w(r.final_.0), w(r.final_.1)),
                duration: lit(u.time_from_ms(r.duration_ms)),
            },
            None => FrequencySchedule::constant(w(self.nu_z), w(self.nu_perp)),
        }
    }

    /// Scattering length in µm.
    pub fn scattering_length(&self) -> f64 {
        self.scattering_length_nm * 1e-3
    }

    /// Transverse oscillator length a_⊥ = √(ħ/mω_⊥) in µm.
    pub fn transverse_length(&self) -> f64 {
        (1.0 / self.units().angular_from_hz(self.nu_perp)).sqrt()
    }
}

/// (ω_z, ω_⊥) as a function of time, linear between the endpoints and
/// clamped afterwards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencySchedule<T> {
    pub initial: (T, T),
    pub final_: (T, T),
    pub duration: T,
}

impl<T: Scalar> FrequencySchedule<T> {
    pub fn constant(omega_z: T, omega_perp: T) -> Self {
        Self {
            initial: (omega_z, omega_perp),
            final_: (omega_z, omega_perp),
            duration: T::zero(),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.initial == self.final_
    }

    pub fn at(&self, t: T) -> (T, T) {
        linear_ramp(self.initial, self.final_, self.duration, t)
    }
}

fn linear_ramp<T: Scalar>(initial: (T, T), final_: (T, T), duration: T, t: T) -> (T, T) {
    if t >= duration {
        return final_;
    }
    if t <= T::zero() {
        return initial;
    }
    let s = t / duration;
    (
        initial.0 + (final_.0 - initial.0) * s,
        initial.1 + (final_.1 - initial.1) * s,
    )
}

/// (ν_z, ν_⊥) [Hz] at `t_ms` along the ramp.
pub fn ramp_sample(t_ms: f64, ramp: &RampConfig) -> (f64, f64) {
    linear_ramp(ramp.initial, ramp.final_, ramp.duration_ms, t_ms)
}
