use crate::error::{invalid, Result};
use crate::scalar::{lit, Scalar};

/// Smallest grid the solvers accept.
pub const MIN_POINTS: usize = 256;

/// Uniform periodic grid on [−L/2, L/2) with its discrete-Fourier wavenumbers.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D<T> {
    n_points: usize,
    box_length: T,
    dz: T,
    z: Vec<T>,
    k: Vec<T>,
}

impl<T: Scalar> Grid1D<T> {
    /// Builds a grid centred on z = 0.
    ///
    /// `z[i] = (i − n/2)·dz`, so `z[n/2] = 0` and the mirror of index `i` is
    /// `(n − i) mod n`. Wavenumbers follow the usual FFT ordering, with
    /// `k[n/2] = −π/dz`.
    pub fn new(n_points: usize, box_length: T) -> Result<Self> {
        if !n_points.is_power_of_two() {
            return invalid(format!("n_points = {n_points} is not a power of two"));
        }
        if n_points < MIN_POINTS {
            return invalid(format!("n_points = {n_points} is below the minimum {MIN_POINTS}"));
        }
        if !(box_length > T::zero()) || !box_length.is_finite() {
            return invalid(format!("box_length = {box_length} must be positive and finite"));
        }
        let n = n_points;
        let dz = box_length / lit(n as f64);
        let half = (n / 2) as isize;
        let z = (0..n)
            .map(|i| lit::<T>((i as isize - half) as f64) * dz)
            .collect();
        let dk = lit::<T>(2.0) * T::PI() / box_length;
        let k = (0..n)
            .map(|j| {
                let m = if j < n / 2 { j as isize } else { j as isize - n as isize };
                lit::<T>(m as f64) * dk
            })
            .collect();
        Ok(Self {
            n_points,
            box_length,
            dz,
            z,
            k,
        })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn box_length(&self) -> T {
        self.box_length
    }

    pub fn dz(&self) -> T {
        self.dz
    }

    pub fn z(&self) -> &[T] {
        &self.z
    }

    pub fn k(&self) -> &[T] {
        &self.k
    }

    /// Nyquist wavenumber π/dz.
    pub fn k_max(&self) -> T {
        T::PI() / self.dz
    }

    /// Index of the sample at −z[i].
    pub fn mirror(&self, i: usize) -> usize {
        (self.n_points - i) % self.n_points
    }

    /// Index of the grid point closest to `z` (clamped to the box).
    pub fn nearest_index(&self, z: T) -> usize {
        let half = lit::<T>((self.n_points / 2) as f64);
        let idx = (z / self.dz + half).round();
        let idx = idx.max(T::zero()).min(lit((self.n_points - 1) as f64));
        idx.to_usize().unwrap_or(0)
    }

    /// ∫ f dz by the rectangle rule (spectrally accurate for periodic f).
    pub fn integrate(&self, f: impl IntoIterator<Item = T>) -> T {
        f.into_iter().fold(T::zero(), |acc, x| acc + x) * self.dz
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_extent() {
        let g = Grid1D::<f64>::new(1024, 102.4).unwrap();
        assert!((g.dz() - 0.1).abs() < 1e-12);
        assert!((g.z()[0] + 51.2).abs() < 1e-12);
        assert!((g.z()[1023] - 51.1).abs() < 1e-12);
        assert_eq!(g.z()[512], 0.0);
        for w in g.z().windows(2) {
            assert!(((w[1] - w[0]) / g.dz() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn nyquist_wavenumber() {
        let g = Grid1D::<f64>::new(256, 25.6).unwrap();
        let kmax = g.k().iter().fold(0.0f64, |m, k| m.max(k.abs()));
        assert!((kmax - std::f64::consts::PI / 0.1).abs() < 1e-9);
        assert!((g.k_max() - 31.41592653589793).abs() < 1e-9);
        assert_eq!(g.k()[0], 0.0);
        assert!(g.k()[128] < 0.0);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid1D::<f64>::new(1000, 10.0).is_err());
        assert!(Grid1D::<f64>::new(128, 10.0).is_err());
        assert!(Grid1D::<f64>::new(256, 0.0).is_err());
        assert!(Grid1D::<f64>::new(256, -1.0).is_err());
        assert!(Grid1D::<f64>::new(256, f64::NAN).is_err());
    }

    #[test]
    fn mirror_indices() {
        let g = Grid1D::<f64>::new(256, 25.6).unwrap();
        for i in 0..256 {
            let j = g.mirror(i);
            if i != 0 {
                assert!((g.z()[i] + g.z()[j]).abs() < 1e-12);
            }
        }
        assert_eq!(g.nearest_index(0.0), 128);
        assert_eq!(g.nearest_index(0.26), 131);
    }

    #[test]
    fn single_precision_grid() {
        let g = Grid1D::<f32>::new(512, 51.2).unwrap();
        assert!((g.dz() - 0.1).abs() < 1e-6);
    }
}
