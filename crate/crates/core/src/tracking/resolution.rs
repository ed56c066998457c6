use crate::scalar::{lit, Scalar};

use super::carpet::DensityCarpet;

const TRUNCATION: f64 = 4.0;

/// Gaussian blur with standard deviations `sigma_z` (along z) and `sigma_t`
/// (along time), each truncated at 4σ and renormalised where the kernel is
/// cut by the edges. Zero widths leave that axis untouched.
pub fn apply_resolution<T: Scalar>(carpet: &DensityCarpet<T>, sigma_z: T, sigma_t: T) -> DensityCarpet<T> {
    let grid = carpet.grid().clone();
    let mut frames = carpet.frames().to_vec();

    if sigma_z > T::zero() {
        let dz = grid.dz();
        let reach = (lit::<T>(TRUNCATION) * sigma_z / dz).ceil().to_usize().unwrap_or(0);
        let kernel: Vec<T> = (0..=reach)
            .map(|j| {
                let x = lit::<T>(j as f64) * dz / sigma_z;
                (-lit::<T>(0.5) * x * x).exp()
            })
            .collect();
        let n = grid.n_points();
        for frame in &mut frames {
            let src = frame.clone();
            for (i, out) in frame.iter_mut().enumerate() {
                let lo = i.saturating_sub(reach);
                let hi = (i + reach).min(n - 1);
                let (mut acc, mut wsum) = (T::zero(), T::zero());
                for (j, &v) in src.iter().enumerate().take(hi + 1).skip(lo) {
                    let w = kernel[i.abs_diff(j)];
                    acc = acc + w * v;
                    wsum = wsum + w;
                }
                *out = acc / wsum;
            }
        }
    }

    if sigma_t > T::zero() && frames.len() > 1 {
        let times = carpet.times();
        let src = frames.clone();
        let cutoff = lit::<T>(TRUNCATION) * sigma_t;
        for (i, out) in frames.iter_mut().enumerate() {
            let weights: Vec<(usize, T)> = times
                .iter()
                .enumerate()
                .filter(|(_, &tj)| (tj - times[i]).abs() <= cutoff)
                .map(|(j, &tj)| {
                    let x = (tj - times[i]) / sigma_t;
                    (j, (-lit::<T>(0.5) * x * x).exp())
                })
                .collect();
            let wsum = weights.iter().fold(T::zero(), |a, (_, w)| a + *w);
            for (k, o) in out.iter_mut().enumerate() {
                *o = weights.iter().fold(T::zero(), |a, &(j, w)| a + w * src[j][k]) / wsum;
            }
        }
    }

    DensityCarpet::from_parts_unchecked(grid, carpet.times().to_vec(), frames)
}
