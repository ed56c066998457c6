//! Soliton positions, pair distances and oscillation frequencies from
//! density carpets.

mod carpet;
mod detect;
mod fit;
mod linalg;
mod resolution;
mod track;

pub use carpet::DensityCarpet;
pub use detect::{detect_solitons, estimate_radius, DetectOptions, Dip};
pub use fit::{fit_frequency, fit_sinusoid, FrequencyFit, SinusoidFit};
pub use resolution::apply_resolution;
pub use track::{track_pair, track_single, FrameQuality, FrameTrack, PairSelection, TrackOptions, TrackResult};
