use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Uniform periodic grid of `points` nodes on `[-extent/2, extent/2)`,
/// shared by every axis of a field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid<T> {
    extent: T,
    points: usize,
}

impl<T: Real> Grid<T> {
    pub fn new(extent: T, points: usize) -> Result<Self> {
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::Config(format!("grid points must be a power of two >= 8, got {points}")));
        }
        if !(extent.is_finite() && extent > T::zero()) {
            return Err(Error::Config(format!("grid extent must be positive, got {extent}")));
        }
        Ok(Self { extent, points })
    }

    pub fn extent(&self) -> T {
        self.extent
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> T {
        self.extent / T::from_usize_lossy(self.points)
    }

    /// `x_i = (i - n/2) h`.
    #[inline]
    pub fn coordinate(&self, i: usize) -> T {
        (T::from_usize_lossy(i) - T::from_usize_lossy(self.points / 2)) * self.spacing()
    }

    pub fn coordinates(&self) -> Vec<T> {
        (0..self.points).map(|i| self.coordinate(i)).collect()
    }

    /// Angular wavenumber of FFT bin `i` (standard ordering, Nyquist negative).
    #[inline]
    pub fn wavenumber(&self, i: usize) -> T {
        let n = self.points;
        let signed = if i < n / 2 { i as f64 } else { i as f64 - n as f64 };
        T::lit(2.0 * std::f64::consts::PI * signed) / self.extent
    }

    pub fn wavenumbers(&self) -> Vec<T> {
        (0..self.points).map(|i| self.wavenumber(i)).collect()
    }

    pub fn nyquist(&self) -> T {
        T::PI() / self.spacing()
    }

    /// Grid for the relative coordinate `x - y` of a two-axis field on `self`:
    /// same spacing, twice the points, so every difference `x_i - y_j` is a node.
    pub fn relative(&self) -> Self {
        Self { extent: self.extent + self.extent, points: 2 * self.points }
    }

    /// Index of the mirror node `x -> -x` (periodic).
    #[inline]
    pub fn mirror(&self, i: usize) -> usize {
        (self.points - i) % self.points
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout() {
        let g = Grid::new(16.0f64, 16).unwrap();
        assert_eq!(g.spacing(), 1.0);
        assert_eq!(g.coordinate(0), -8.0);
        assert_eq!(g.coordinate(8), 0.0);
        assert_eq!(g.coordinate(g.mirror(3)), 5.0);
        assert_eq!(g.mirror(0), 0);
        let k = g.wavenumbers();
        assert_eq!(k[0], 0.0);
        assert!((k[1] - std::f64::consts::PI / 8.0).abs() < 1e-15);
        assert!((k[8] + std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn relative_grid_contains_differences() {
        let g = Grid::new(10.0f64, 32).unwrap();
        let r = g.relative();
        assert_eq!(r.spacing(), g.spacing());
        for (i, j) in [(0, 31), (31, 0), (7, 7)] {
            let m = i + g.points() - j;
            assert!((r.coordinate(m) - (g.coordinate(i) - g.coordinate(j))).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::new(1.0f64, 4).is_err());
        assert!(Grid::new(1.0f64, 100).is_err());
        assert!(Grid::new(0.0f64, 64).is_err());
    }
}
