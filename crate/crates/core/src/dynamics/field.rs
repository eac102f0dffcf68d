use num_complex::Complex;
use rayon::prelude::*;

use super::grid::Grid;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Dim {
    One,
    Two,
}

impl Dim {
    pub fn rank(self) -> usize {
        match self {
            Dim::One => 1,
            Dim::Two => 2,
        }
    }
}

/// Complex amplitudes on a 1D grid, or on the square product grid in
/// row-major order (`index = i * n + j`, `i` along `x`, `j` along `y`).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField<T> {
    grid: Grid<T>,
    dim: Dim,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexField<T> {
    pub fn zeros(grid: Grid<T>, dim: Dim) -> Self {
        let len = grid.points().pow(dim.rank() as u32);
        Self { grid, dim, data: vec![Complex::new(T::zero(), T::zero()); len] }
    }

    pub fn from_vec(grid: Grid<T>, dim: Dim, data: Vec<Complex<T>>) -> Result<Self> {
        let len = grid.points().pow(dim.rank() as u32);
        if data.len() != len {
            return Err(Error::Data(format!("expected {len} amplitudes, got {}", data.len())));
        }
        Ok(Self { grid, dim, data })
    }

    pub fn from_fn_1d(grid: Grid<T>, f: impl Fn(T) -> Complex<T>) -> Self {
        let data = grid.coordinates().into_iter().map(f).collect();
        Self { grid, dim: Dim::One, data }
    }

    pub fn from_fn_2d(grid: Grid<T>, f: impl Fn(T, T) -> Complex<T> + Sync) -> Self {
        let n = grid.points();
        let xs = grid.coordinates();
        let mut data = vec![Complex::new(T::zero(), T::zero()); n * n];
        data.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            for (j, a) in row.iter_mut().enumerate() {
                *a = f(xs[i], xs[j]);
            }
        });
        Self { grid, dim: Dim::Two, data }
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Complex<T>> {
        self.data
    }

    pub fn points(&self) -> usize {
        self.grid.points()
    }

    /// Volume element `h^dim`.
    pub fn cell(&self) -> T {
        self.grid.spacing().powi(self.dim.rank() as i32)
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.grid.points() + j]
    }

    pub fn norm_sq(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr()) * self.cell()
    }

    pub fn normalize(&mut self) -> Result<T> {
        self.check_finite()?;
        let norm = self.norm_sq();
        if norm <= T::zero() {
            return Err(Error::Data("cannot normalize a zero field".into()));
        }
        let scale = norm.sqrt().recip();
        self.data.iter_mut().for_each(|a| *a = *a * scale);
        Ok(norm)
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.data.iter().all(|a| a.re.is_finite() && a.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::Data("non-finite amplitude in field".into()))
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim || self.grid != other.grid {
            return Err(Error::Data("fields live on different grids".into()));
        }
        Ok(())
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        self.check_compatible(other)?;
        let sum = self
            .data
            .iter()
            .zip(&other.data)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b);
        Ok(sum * self.cell())
    }

    /// `|<a|b>|^2 / (<a|a> <b|b>)`.
    pub fn fidelity(&self, other: &Self) -> Result<T> {
        let overlap = self.inner(other)?;
        Ok(overlap.norm_sqr() / (self.norm_sq() * other.norm_sq()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.check_compatible(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm())))
    }

    /// `max |Xi(x, y) - Xi(y, x)|`; zero for 1D fields.
    pub fn swap_residual(&self) -> T {
        if self.dim == Dim::One {
            return T::zero();
        }
        let n = self.points();
        let mut worst = T::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((self.data[i * n + j] - self.data[j * n + i]).norm());
            }
        }
        worst
    }

    /// Probability density of the first coordinate, `int |Xi(x, y)|^2 dy`.
    pub fn marginal_x(&self) -> Vec<T> {
        match self.dim {
            Dim::One => self.data.iter().map(|a| a.norm_sqr()).collect(),
            Dim::Two => {
                let h = self.grid.spacing();
                self.data
                    .chunks(self.points())
                    .map(|row| row.iter().fold(T::zero(), |s, a| s + a.norm_sqr()) * h)
                    .collect()
            }
        }
    }

    /// Probability density of the second coordinate.
    pub fn marginal_y(&self) -> Vec<T> {
        match self.dim {
            Dim::One => self.marginal_x(),
            Dim::Two => {
                let n = self.points();
                let h = self.grid.spacing();
                (0..n)
                    .map(|j| (0..n).fold(T::zero(), |s, i| s + self.data[i * n + j].norm_sqr()) * h)
                    .collect()
            }
        }
    }

    /// Standard deviation of a 1D probability density sampled on the grid.
    pub fn density_width(grid: &Grid<T>, density: &[T]) -> T {
        let xs = grid.coordinates();
        let total = density.iter().fold(T::zero(), |s, &p| s + p);
        let mean = xs.iter().zip(density).fold(T::zero(), |s, (&x, &p)| s + x * p) / total;
        let var = xs
            .iter()
            .zip(density)
            .fold(T::zero(), |s, (&x, &p)| s + (x - mean) * (x - mean) * p)
            / total;
        var.max(T::zero()).sqrt()
    }
}

/// `exp(-(x - centre)^2 / (2 w^2) + i k x)` on a 1D grid, normalized.
pub fn gaussian_1d<T: Real>(grid: Grid<T>, centre: T, width: T, momentum: T) -> ComplexField<T> {
    let mut f = ComplexField::from_fn_1d(grid, |x| {
        let d = x - centre;
        Complex::from_polar((-(d * d) / (T::lit(2.0) * width * width)).exp(), momentum * x)
    });
    f.normalize().expect("gaussian is finite and non-zero");
    f
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_norm_and_width() {
        let g = Grid::new(40.0f64, 256).unwrap();
        let f = gaussian_1d(g, 1.0, 2.0, 0.5);
        assert!((f.norm_sq() - 1.0).abs() < 1e-13);
        let w = ComplexField::density_width(&g, &f.marginal_x());
        assert!((w - 2.0 / 2f64.sqrt()).abs() < 1e-10);
        assert!((f.fidelity(&f).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_finite_and_mismatch() {
        let g = Grid::new(10.0f64, 16).unwrap();
        let mut f = ComplexField::zeros(g, Dim::One);
        assert!(f.normalize().is_err());
        f.data_mut()[3] = Complex::new(f64::NAN, 0.0);
        assert!(matches!(f.check_finite(), Err(Error::Data(_))));
        let other = ComplexField::zeros(Grid::new(10.0f64, 32).unwrap(), Dim::One);
        assert!(f.inner(&other).is_err());
        assert!(ComplexField::from_vec(g, Dim::Two, vec![Complex::new(0.0, 0.0); 16]).is_err());
    }

    #[test]
    fn marginals_of_product_state() {
        let g = Grid::new(20.0f64, 64).unwrap();
        let mut f = ComplexField::from_fn_2d(g, |x, y| {
            Complex::new((-(x - 1.0) * (x - 1.0)).exp() * (-(y * y) / 4.0).exp(), 0.0)
        });
        f.normalize().unwrap();
        let mx = f.marginal_x();
        let my = f.marginal_y();
        let h = g.spacing();
        assert!((mx.iter().sum::<f64>() * h - 1.0).abs() < 1e-12);
        assert!((my.iter().sum::<f64>() * h - 1.0).abs() < 1e-12);
        assert!(ComplexField::density_width(&g, &mx) < ComplexField::density_width(&g, &my));
        assert!(f.swap_residual() > 0.1);
    }
}
