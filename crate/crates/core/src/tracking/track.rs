use crate::error::{invalid, Result};
use crate::scalar::{lit, Scalar};

use super::carpet::DensityCarpet;
use super::detect::{detect_solitons, DetectOptions, Dip};

/// Frames needed before a series can be fitted.
pub const MIN_FRAMES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackOptions<T> {
    pub detect: DetectOptions<T>,
    /// Pairs closer than this are flagged as colliding; `None` means 4·dz.
    pub min_separation: Option<T>,
    /// Require the pair to straddle z = 0.
    pub require_straddle: bool,
    pub selection: PairSelection,
}

/// How the two tracked dips are chosen in each frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairSelection {
    /// The two highest-contrast dips.
    #[default]
    Strongest,
    /// The dip nearest the centre on each side; a dip at the centre itself
    /// counts for both sides.
    Innermost,
}

impl<T: Scalar> Default for TrackOptions<T> {
    fn default() -> Self {
        Self {
            detect: DetectOptions::default(),
            min_separation: None,
            require_straddle: true,
            selection: PairSelection::Strongest,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameQuality {
    Ok,
    /// Fewer than the needed number of dips passed the gates.
    TooFewDips,
    /// The two strongest dips lie on the same side of the centre.
    SameSide,
    /// The pair is closer than the minimum separation.
    NearCollision,
    /// Flat or empty frame.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameTrack<T> {
    pub time: T,
    /// Every detected dip, sorted by position.
    pub dips: Vec<Dip<T>>,
    /// Sorted positions of the selected solitons (one or two).
    pub selected: Vec<T>,
    pub quality: FrameQuality,
}

impl<T: Scalar> FrameTrack<T> {
    /// z_right − z_left of the selected pair, when there is one.
    pub fn distance(&self) -> Option<T> {
        match self.selected.as_slice() {
            [l, r] => Some(*r - *l),
            _ => None,
        }
    }

    pub fn is_usable(&self) -> bool {
        self.quality == FrameQuality::Ok
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackResult<T> {
    pub frames: Vec<FrameTrack<T>>,
}

impl<T: Scalar> TrackResult<T> {
    /// (t, d) for the usable frames of a pair track.
    pub fn distance_series(&self) -> (Vec<T>, Vec<T>) {
        self.frames
            .iter()
            .filter(|f| f.is_usable())
            .filter_map(|f| f.distance().map(|d| (f.time, d)))
            .unzip()
    }

    /// (t, z) for the usable frames of a single-soliton track.
    pub fn position_series(&self) -> (Vec<T>, Vec<T>) {
        self.frames
            .iter()
            .filter(|f| f.is_usable() && f.selected.len() == 1)
            .map(|f| (f.time, f.selected[0]))
            .unzip()
    }

    pub fn usable(&self) -> usize {
        self.frames.iter().filter(|f| f.is_usable()).count()
    }
}

fn by_contrast<T: Scalar>(dips: &[Dip<T>]) -> Vec<Dip<T>> {
    let mut sorted = dips.to_vec();
    // Ties go to the dip nearer the centre.
    sorted.sort_by(|a, b| {
        b.contrast
            .partial_cmp(&a.contrast)
            .unwrap()
            .then(a.position.abs().partial_cmp(&b.position.abs()).unwrap())
    });
    sorted
}

fn check_len<T: Scalar>(carpet: &DensityCarpet<T>) -> Result<()> {
    if carpet.len() < MIN_FRAMES {
        return invalid(format!(
            "carpet has {} frames, at least {MIN_FRAMES} are needed",
            carpet.len()
        ));
    }
    Ok(())
}

/// Nearest dip on each side of z = 0. A dip within `dz` of the centre is a
/// collision and is returned twice.
fn innermost<T: Scalar>(dips: &[Dip<T>], dz: T) -> Vec<T> {
    let left = dips.iter().filter(|d| d.position < T::zero()).map(|d| d.position).fold(None, |m: Option<T>, z| {
        Some(m.map_or(z, |m| m.max(z)))
    });
    let right = dips.iter().filter(|d| d.position >= T::zero()).map(|d| d.position).fold(None, |m: Option<T>, z| {
        Some(m.map_or(z, |m| m.min(z)))
    });
    if let Some(c) = dips.iter().map(|d| d.position).find(|z| z.abs() <= dz) {
        return vec![c, c];
    }
    left.into_iter().chain(right).collect()
}

/// Follows the dominant central pair through the carpet.
///
/// Per frame two dips are chosen (see [`PairSelection`]) and sorted, so the
/// distance is label-free: whether the solitons cross or bounce at a
/// collision does not change it.
pub fn track_pair<T: Scalar>(carpet: &DensityCarpet<T>, opts: &TrackOptions<T>) -> Result<TrackResult<T>> {
    check_len(carpet)?;
    let grid = carpet.grid();
    let min_sep = opts.min_separation.unwrap_or(lit::<T>(4.0) * grid.dz());
    let frames = carpet
        .times()
        .iter()
        .zip(carpet.frames())
        .map(|(&time, frame)| {
            let dips = match detect_solitons(frame, grid, &opts.detect) {
                Ok(d) => d,
                Err(_) => {
                    return FrameTrack {
                        time,
                        dips: Vec::new(),
                        selected: Vec::new(),
                        quality: FrameQuality::Degenerate,
                    }
                }
            };
            let candidates = match opts.selection {
                PairSelection::Strongest => by_contrast(&dips).iter().take(2).map(|d| d.position).collect(),
                PairSelection::Innermost => innermost(&dips, grid.dz()),
            };
            if candidates.len() < 2 {
                return FrameTrack {
                    time,
                    dips,
                    selected: candidates,
                    quality: FrameQuality::TooFewDips,
                };
            }
            let mut pair = [candidates[0], candidates[1]];
            pair.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let quality = if pair[1] - pair[0] < min_sep {
                FrameQuality::NearCollision
            } else if opts.require_straddle && !(pair[0] <= T::zero() && pair[1] >= T::zero()) {
                FrameQuality::SameSide
            } else {
                FrameQuality::Ok
            };
            FrameTrack {
                time,
                dips,
                selected: pair.to_vec(),
                quality,
            }
        })
        .collect();
    Ok(TrackResult { frames })
}

/// Follows the single highest-contrast dip through the carpet.
pub fn track_single<T: Scalar>(carpet: &DensityCarpet<T>, opts: &TrackOptions<T>) -> Result<TrackResult<T>> {
    check_len(carpet)?;
    let grid = carpet.grid();
    let frames = carpet
        .times()
        .iter()
        .zip(carpet.frames())
        .map(|(&time, frame)| match detect_solitons(frame, grid, &opts.detect) {
            Ok(dips) => {
                let ranked = by_contrast(&dips);
                let (selected, quality) = match ranked.first() {
                    Some(d) => (vec![d.position], FrameQuality::Ok),
                    None => (Vec::new(), FrameQuality::TooFewDips),
                };
                FrameTrack {
                    time,
                    dips,
                    selected,
                    quality,
                }
            }
            Err(_) => FrameTrack {
                time,
                dips: Vec::new(),
                selected: Vec::new(),
                quality: FrameQuality::Degenerate,
            },
        })
        .collect();
    Ok(TrackResult { frames })
}
