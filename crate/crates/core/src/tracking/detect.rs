use crate::error::{invalid, Result};
use crate::grid::Grid1D;
use crate::scalar::{lit, Scalar};

/// Fraction of the peak density that delimits the condensate support.
const SUPPORT_THRESHOLD: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectOptions<T> {
    /// Only minima with |z| < fraction·R_est are considered.
    pub search_window_fraction: T,
    /// Minimum (n_bg − n_min)/n_bg.
    pub min_contrast: T,
}

impl<T: Scalar> Default for DetectOptions<T> {
    fn default() -> Self {
        Self {
            search_window_fraction: lit(0.7),
            min_contrast: lit(0.2),
        }
    }
}

/// A detected density minimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dip<T> {
    /// Sub-grid position of the minimum.
    pub position: T,
    /// (n_bg − n_min)/n_bg with n_bg the lower of the two bounding maxima.
    pub contrast: T,
    pub index: usize,
}

/// Half-width of the region where the density exceeds 1 % of its peak,
/// measured from z = 0.
pub fn estimate_radius<T: Scalar>(frame: &[T], grid: &Grid1D<T>) -> T {
    let peak = frame.iter().fold(T::zero(), |m, &x| m.max(x));
    let threshold = peak * lit(SUPPORT_THRESHOLD);
    frame
        .iter()
        .zip(grid.z())
        .filter(|(&n, _)| n > threshold)
        .fold(T::zero(), |r, (_, &z)| r.max(z.abs()))
}

/// Local density minima inside the central window whose contrast clears
/// the threshold, refined by a parabola through the minimum and its two
/// neighbours, sorted by position.
///
/// The background of a minimum is its topographic reference: walking
/// outwards on each side until the density drops below the minimum again,
/// the highest value met; the lower of the two sides is used. Small ripples
/// next to a dip therefore do not mask it.
pub fn detect_solitons<T: Scalar>(frame: &[T], grid: &Grid1D<T>, opts: &DetectOptions<T>) -> Result<Vec<Dip<T>>> {
    let n = grid.n_points();
    if frame.len() != n {
        return invalid("frame length does not match the grid");
    }
    let peak = frame.iter().fold(T::zero(), |m, &x| m.max(x));
    let floor = frame.iter().fold(T::infinity(), |m, &x| m.min(x));
    if !(peak > T::zero()) || !(peak > floor) {
        return invalid("degenerate frame: density is flat or empty");
    }
    let radius = estimate_radius(frame, grid);
    let window = opts.search_window_fraction * radius;
    let dz = grid.dz();

    let mut dips = Vec::new();
    for i in 1..n - 1 {
        let z = grid.z()[i];
        if z.abs() >= window {
            continue;
        }
        let (a, b, c) = (frame[i - 1], frame[i], frame[i + 1]);
        if !(b < a && b <= c) {
            continue;
        }
        let left = (0..i).rev().map(|j| frame[j]).take_while(|&x| x >= b).fold(b, T::max);
        let right = (i + 1..n).map(|j| frame[j]).take_while(|&x| x >= b).fold(b, T::max);
        let background = left.min(right);
        if !(background > T::zero()) {
            continue;
        }
        let contrast = (background - b) / background;
        if contrast < opts.min_contrast {
            continue;
        }
        let curvature = a - lit::<T>(2.0) * b + c;
        let shift = if curvature > T::zero() {
            (lit::<T>(0.5) * (a - c) / curvature).max(lit(-0.5)).min(lit(0.5))
        } else {
            T::zero()
        };
        dips.push(Dip {
            position: z + shift * dz,
            contrast,
            index: i,
        });
    }
    Ok(dips)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid() -> Grid1D<f64> {
        Grid1D::new(1024, 51.2).unwrap()
    }

    fn tf(z: f64) -> f64 {
        (1.0 - (z / 15.0).powi(2)).max(0.0)
    }

    fn sech2(x: f64) -> f64 {
        1.0 / x.cosh().powi(2)
    }

    /// Minimum of a smooth profile by golden-section search on a bracket.
    fn true_minimum(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
        let r = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..200 {
            let c = b - r * (b - a);
            let d = a + r * (b - a);
            if f(c) < f(d) {
                b = d;
            } else {
                a = c;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn single_black_dip() {
        let g = grid();
        let xi = 4.0 * g.dz();
        let frame: Vec<f64> = g.z().iter().map(|&z| tf(z) * (1.0 - sech2((z - 1.7) / xi))).collect();
        let dips = detect_solitons(&frame, &g, &DetectOptions::default()).unwrap();
        assert_eq!(dips.len(), 1);
        assert!((dips[0].position - 1.7).abs() < g.dz() / 10.0, "{}", dips[0].position);
        assert!(dips[0].contrast > 0.99);
    }

    #[test]
    fn symmetric_pair() {
        let g = grid();
        let xi = 0.3;
        let frame: Vec<f64> = g
            .z()
            .iter()
            .map(|&z| tf(z) * (1.0 - sech2((z - 2.33) / xi)) * (1.0 - sech2((z + 2.33) / xi)))
            .collect();
        let dips = detect_solitons(&frame, &g, &DetectOptions::default()).unwrap();
        assert_eq!(dips.len(), 2);
        assert!((dips[0].position + dips[1].position).abs() < g.dz());
    }

    #[test]
    fn shallow_dip_and_flat_frames() {
        let g = grid();
        let frame: Vec<f64> = g.z().iter().map(|&z| tf(z) * (1.0 - 0.1 * sech2((z - 1.0) / 0.4))).collect();
        assert!(detect_solitons(&frame, &g, &DetectOptions::default()).unwrap().is_empty());
        assert!(detect_solitons(&vec![1.0; 1024], &g, &DetectOptions::default()).is_err());
        assert!(detect_solitons(&vec![0.0; 1024], &g, &DetectOptions::default()).is_err());
    }

    #[test]
    fn edge_minima_are_outside_the_window() {
        let g = grid();
        let frame: Vec<f64> = g.z().iter().map(|&z| tf(z) * (1.0 - sech2((z - 13.0) / 0.4))).collect();
        assert!(detect_solitons(&frame, &g, &DetectOptions::default()).unwrap().is_empty());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn sub_grid_accuracy(center in -6.0f64..6.0, depth in 0.3f64..1.0, width_cells in 4.0f64..10.0) {
            let g = grid();
            let w = width_cells * g.dz();
            let profile = |z: f64| tf(z) * (1.0 - depth * sech2((z - center) / w));
            let frame: Vec<f64> = g.z().iter().map(|&z| profile(z)).collect();
            let truth = true_minimum(profile, center - w, center + w);
            let dips = detect_solitons(&frame, &g, &DetectOptions::default()).unwrap();
            prop_assert_eq!(dips.len(), 1);
            prop_assert!((dips[0].position - truth).abs() < g.dz() / 10.0,
                "found {} truth {}", dips[0].position, truth);
        }
    }
}
