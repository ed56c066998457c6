use crate::scalar::{lit, Scalar};
use crate::units::HBAR;

/// D_c = π(6Nħa_s/(ν_z m))^{1/3} [m], all inputs SI (ν_z in Hz, not rad/s).
///
/// Two condensates released at a separation below D_c interfere in the
/// nonlinear regime and form dark-soliton pairs.
pub fn critical_distance(atom_number: f64, scattering_length_m: f64, nu_z_hz: f64, mass_kg: f64) -> f64 {
    std::f64::consts::PI * (6.0 * atom_number * HBAR * scattering_length_m / (nu_z_hz * mass_kg)).cbrt()
}

/// ξ = ħ/√(mμ) (internal units).
pub fn healing_length<T: Scalar>(mu: T) -> T {
    mu.sqrt().recip()
}

/// c = √(μ/m) (internal units).
pub fn sound_speed<T: Scalar>(mu: T) -> T {
    mu.sqrt()
}

/// 1D Thomas-Fermi chemical potential μ = ((3/(4√2))·g₁·ω_z)^{2/3} for a
/// unit-normalised condensate with coupling g₁ (atom number included).
pub fn thomas_fermi_chemical_potential<T: Scalar>(g1: T, omega_z: T) -> T {
    (lit::<T>(3.0 / (4.0 * 2f64.sqrt())) * g1 * omega_z).powf(lit(2.0 / 3.0))
}

/// R_TF = √(2μ/m)/ω_z.
pub fn thomas_fermi_radius<T: Scalar>(mu: T, omega_z: T) -> T {
    (lit::<T>(2.0) * mu).sqrt() / omega_z
}
