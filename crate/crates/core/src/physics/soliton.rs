use num_complex::Complex;

use crate::error::{invalid, Result};
use crate::scalar::{lit, Scalar};
use crate::wavefunction::Wavefunction;

use super::quantities::{healing_length, sound_speed};

/// Dark-soliton factor B·tanh(B(z − z_c)/ξ) + i·v/c with B = √(1 − v²/c²).
pub fn dark_soliton_factor<T: Scalar>(z: T, center: T, velocity: T, mu: T) -> Complex<T> {
    let c = sound_speed(mu);
    let xi = healing_length(mu);
    let beta = velocity / c;
    let b = (T::one() - beta * beta).sqrt();
    Complex::new(b * (b * (z - center) / xi).tanh(), beta)
}

fn check_imprint<T: Scalar>(psi: &Wavefunction<T>, centers: &[T], velocity: T, mu: T) -> Result<()> {
    if !(mu > T::zero()) {
        return invalid(format!("mu = {mu} must be positive"));
    }
    let c = sound_speed(mu);
    if !(velocity.abs() < c) {
        return invalid(format!(
            "|velocity| = {} must be below the sound speed {c}",
            velocity.abs()
        ));
    }
    let density = psi.density();
    let peak = density.iter().fold(T::zero(), |m, &x| m.max(x));
    for &zc in centers {
        let i = psi.grid().nearest_index(zc);
        let inside = (zc - psi.grid().z()[i]).abs() <= psi.grid().dz();
        if !inside || !(density[i] > lit::<T>(0.01) * peak) {
            return invalid(format!("soliton position {zc} lies outside the condensate"));
        }
    }
    Ok(())
}

/// Multiplies a single dark soliton at `z0` moving with `velocity` into ψ.
pub fn imprint_soliton<T: Scalar>(psi: &Wavefunction<T>, z0: T, velocity: T, mu: T) -> Result<Wavefunction<T>> {
    check_imprint(psi, &[z0], velocity, mu)?;
    let mut out = psi.clone();
    for (c, &z) in out.values_mut().iter_mut().zip(psi.grid().z()) {
        *c = *c * dark_soliton_factor(z, z0, velocity, mu);
    }
    out.normalize()?;
    Ok(out)
}

/// Symmetric pair: a soliton at +z0 with velocity +v and one at −z0 with −v.
pub fn imprint_soliton_pair<T: Scalar>(
    psi: &Wavefunction<T>,
    z0: T,
    velocity: T,
    mu: T,
) -> Result<Wavefunction<T>> {
    check_imprint(psi, &[z0, -z0], velocity, mu)?;
    let mut out = psi.clone();
    for (c, &z) in out.values_mut().iter_mut().zip(psi.grid().z()) {
        *c = *c * dark_soliton_factor(z, z0, velocity, mu) * dark_soliton_factor(z, -z0, -velocity, mu);
    }
    out.normalize()?;
    Ok(out)
}
