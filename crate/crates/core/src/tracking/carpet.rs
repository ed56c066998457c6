use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::grid::Grid1D;
use crate::scalar::Scalar;
use crate::wavefunction::Wavefunction;

/// Time-ordered stack of density profiles.
#[derive(Debug, Clone)]
pub struct DensityCarpet<T> {
    grid: Arc<Grid1D<T>>,
    times: Vec<T>,
    frames: Vec<Vec<T>>,
}

impl<T: Scalar> DensityCarpet<T> {
    pub fn empty(grid: Arc<Grid1D<T>>) -> Self {
        Self {
            grid,
            times: Vec::new(),
            frames: Vec::new(),
        }
    }

    pub fn new(grid: Arc<Grid1D<T>>, times: Vec<T>, frames: Vec<Vec<T>>) -> Result<Self> {
        let mut carpet = Self::empty(grid);
        if times.len() != frames.len() {
            return invalid("carpet needs one timestamp per frame");
        }
        for (t, f) in times.into_iter().zip(frames) {
            carpet.push(t, f)?;
        }
        Ok(carpet)
    }

    /// Appends a frame; times must increase strictly and densities be ≥ 0.
    pub fn push(&mut self, time: T, frame: Vec<T>) -> Result<()> {
        if frame.len() != self.grid.n_points() {
            return invalid(format!(
                "frame has {} samples, grid has {}",
                frame.len(),
                self.grid.n_points()
            ));
        }
        if let Some(&last) = self.times.last() {
            if !(time > last) {
                return invalid(format!("frame time {time} does not follow {last}"));
            }
        }
        if frame.iter().any(|&n| !(n >= T::zero()) || !n.is_finite()) {
            return invalid("densities must be finite and non-negative");
        }
        self.times.push(time);
        self.frames.push(frame);
        Ok(())
    }

    pub fn push_state(&mut self, psi: &Wavefunction<T>) -> Result<()> {
        self.push(psi.time(), psi.density())
    }

    pub fn grid(&self) -> &Arc<Grid1D<T>> {
        &self.grid
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn frames(&self) -> &[Vec<T>] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// ∫ n dz of frame `i`.
    pub fn atom_fraction(&self, i: usize) -> T {
        self.grid.integrate(self.frames[i].iter().copied())
    }

    pub(crate) fn from_parts_unchecked(grid: Arc<Grid1D<T>>, times: Vec<T>, frames: Vec<Vec<T>>) -> Self {
        Self { grid, times, frames }
    }
}
