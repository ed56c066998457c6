//! Concrete traps, mean-field models and closed-form condensate quantities.

pub mod nonlinear;
pub mod potentials;
pub mod quantities;
pub mod soliton;
pub mod trap;

pub use nonlinear::{gpe1d_nonlinearity, npse_nonlinearity, NonlinearKind, NonlinearSpec};
pub use potentials::{double_well_minima, harmonic_potential, lattice_potential, OpticalLattice, RampedHarmonic};
pub use quantities::{critical_distance, healing_length, sound_speed, thomas_fermi_chemical_potential, thomas_fermi_radius};
pub use soliton::{imprint_soliton, imprint_soliton_pair};
pub use trap::{ramp_sample, FrequencySchedule, LatticeConfig, RampConfig, TrapConfig};
