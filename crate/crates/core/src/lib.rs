//! Numerical core for trapped dark-soliton dynamics.
//!
//! The numerics ([`grid`], [`wavefunction`], [`evolve`], [`ground_state`]),
//! the soliton tracker ([`tracking`]) and the effective-particle model
//! ([`particle`]) are generic over the real scalar type via [`Scalar`]; the
//! aliases below fix them to `f64`, which every physics pipeline uses.
//! [`physics`] holds the concrete potentials and mean-field models and
//! converts SI inputs through [`units`].

pub mod error;
pub mod evolve;
pub mod grid;
pub mod ground_state;
pub mod hamiltonian;
pub mod particle;
pub mod physics;
pub mod scalar;
pub mod spectral;
pub mod tracking;
pub mod units;
pub mod wavefunction;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use num_complex::Complex;

pub type Grid = grid::Grid1D<f64>;
pub type Wavefunction = wavefunction::Wavefunction<f64>;
pub type GroundState = ground_state::GroundState<f64>;
pub type DensityCarpet = tracking::DensityCarpet<f64>;
pub type TrackResult = tracking::TrackResult<f64>;
pub type FrequencyFit = tracking::FrequencyFit<f64>;
pub type ParticleParams = particle::ParticleParams<f64>;
pub type Trajectory = particle::Trajectory<f64>;

pub type GridF32 = grid::Grid1D<f32>;
pub type WavefunctionF32 = wavefunction::Wavefunction<f32>;
