//! Physical state of the ball: partial trace of the meta-wavefunction over
//! the hidden coordinate, and the diagnostics of the reduced state.

use nalgebra::DMatrix;
use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{ComplexField, Dim, EnergyStats, Grid, Hamiltonian};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Eigenvalues below this are dropped from the entropy sum.
pub const EIGEN_CUTOFF: f64 = 1e-14;

/// Grid-sampled reduced state. Stored in the discrete basis of grid cells,
/// `P_ij = h rho(x_i, x_j)`, so that `tr P = 1` and the eigenvalues of `P`
/// are the occupation probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    grid: Grid<T>,
    entries: Vec<Complex<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Validity {
    pub hermiticity: f64,
    pub min_eigenvalue: f64,
    pub trace: f64,
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        self.hermiticity < 1e-12 && self.min_eigenvalue > -1e-10 && (self.trace - 1.0).abs() < 1e-10
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherenceLength {
    /// Separation at which the coherence profile falls to half its
    /// diagonal value, or the box extent if it never does.
    pub length: f64,
    pub decayed: bool,
}

/// One eigen-component of the reduced state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub weight: f64,
    pub centre: f64,
    /// Standard deviation of the eigenvector's position density.
    pub width: f64,
}

/// `rho(x_i, x_j) = h sum_k Xi(x_i, y_k) Xi*(x_j, y_k)`, renormalized to unit trace.
pub fn partial_trace<T: Real>(xi: &ComplexField<T>) -> Result<DensityMatrix<T>> {
    if xi.dim() != Dim::Two {
        return Err(Error::Data("partial trace needs a two-coordinate field".into()));
    }
    xi.check_finite()?;
    let grid = *xi.grid();
    let n = grid.points();
    let data = xi.data();
    let mut entries = vec![Complex::new(T::zero(), T::zero()); n * n];
    entries.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        let a = &data[i * n..(i + 1) * n];
        for (j, out) in row.iter_mut().enumerate().skip(i) {
            let b = &data[j * n..(j + 1) * n];
            *out = a
                .iter()
                .zip(b)
                .fold(Complex::new(T::zero(), T::zero()), |s, (p, q)| s + p * q.conj());
        }
    });
    for i in 0..n {
        for j in 0..i {
            entries[i * n + j] = entries[j * n + i].conj();
        }
    }
    DensityMatrix::from_entries(grid, entries)
}

impl<T: Real> DensityMatrix<T> {
    /// Wraps a Hermitian PSD matrix in the cell basis, rescaling to unit trace.
    pub fn from_entries(grid: Grid<T>, mut entries: Vec<Complex<T>>) -> Result<Self> {
        let n = grid.points();
        if entries.len() != n * n {
            return Err(Error::Data(format!("expected {} entries, got {}", n * n, entries.len())));
        }
        if !entries.iter().all(|a| a.re.is_finite() && a.im.is_finite()) {
            return Err(Error::Data("non-finite density-matrix entry".into()));
        }
        let trace = (0..n).fold(T::zero(), |s, i| s + entries[i * n + i].re);
        if trace <= T::zero() {
            return Err(Error::Data("density matrix has non-positive trace".into()));
        }
        let inv = trace.recip();
        entries.iter_mut().for_each(|a| *a = *a * inv);
        Ok(Self { grid, entries })
    }

    /// `|psi><psi|` for a 1D field.
    pub fn pure(psi: &ComplexField<T>) -> Result<Self> {
        Self::mixture(&[(1.0, psi)])
    }

    /// `sum_k w_k |psi_k><psi_k|` for 1D fields on a common grid.
    pub fn mixture(components: &[(f64, &ComplexField<T>)]) -> Result<Self> {
        let first = components.first().ok_or_else(|| Error::Data("empty mixture".into()))?.1;
        let grid = *first.grid();
        let n = grid.points();
        let h = grid.spacing();
        let mut entries = vec![Complex::new(T::zero(), T::zero()); n * n];
        for &(w, psi) in components {
            if psi.dim() != Dim::One || psi.grid() != &grid {
                return Err(Error::Data("mixture components must share one 1D grid".into()));
            }
            let scale = T::lit(w) * h / psi.norm_sq();
            let d = psi.data();
            for i in 0..n {
                for j in 0..n {
                    entries[i * n + j] = entries[i * n + j] + d[i] * d[j].conj() * scale;
                }
            }
        }
        Self::from_entries(grid, entries)
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn points(&self) -> usize {
        self.grid.points()
    }

    /// Cell-basis entry `P_ij`.
    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> Complex<T> {
        self.entries[i * self.points() + j]
    }

    /// Kernel value `rho(x_i, x_j) = P_ij / h`.
    pub fn kernel(&self, i: usize, j: usize) -> Complex<T> {
        self.entry(i, j) / self.grid.spacing()
    }

    pub fn trace(&self) -> f64 {
        (0..self.points()).map(|i| self.entry(i, i).re.as_f64()).sum()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.points();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.entry(i, j) - self.entry(j, i).conj()).norm().as_f64());
            }
        }
        worst
    }

    fn to_nalgebra(&self) -> DMatrix<Complex<f64>> {
        let n = self.points();
        DMatrix::from_fn(n, n, |i, j| {
            let a = self.entry(i, j);
            Complex::new(a.re.as_f64(), a.im.as_f64())
        })
    }

    /// Ascending eigenvalues (computed in `f64`).
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.to_nalgebra().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn validity(&self) -> Validity {
        Validity {
            hermiticity: self.hermiticity_residual(),
            min_eigenvalue: self.eigenvalues().first().copied().unwrap_or(0.0),
            trace: self.trace(),
        }
    }

    /// `tr P^2 = sum |P_ij|^2` for Hermitian `P`.
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|a| a.norm_sqr().as_f64()).sum()
    }

    /// `-sum p ln p` in nats over eigenvalues above [`EIGEN_CUTOFF`].
    pub fn von_neumann_entropy(&self) -> f64 {
        entropy_of(&self.eigenvalues())
    }

    /// Position density `rho(x_i, x_i)`.
    pub fn diagonal(&self) -> Vec<T> {
        let h = self.grid.spacing();
        (0..self.points()).map(|i| self.entry(i, i).re / h).collect()
    }

    pub fn diagonal_width(&self) -> f64 {
        ComplexField::density_width(&self.grid, &self.diagonal()).as_f64()
    }

    /// `C(s) = sum_xbar p(xbar) |rho(xbar + s/2, xbar - s/2)| / sum_xbar p(xbar)`
    /// for `s = m h`, `m = 0..n`, with `p` the diagonal (averaged between the
    /// two neighbouring nodes when `xbar` falls between them).
    pub fn coherence_profile(&self) -> Vec<(f64, f64)> {
        let n = self.points();
        let h = self.grid.spacing().as_f64();
        let diag: Vec<f64> = (0..n).map(|i| self.entry(i, i).re.as_f64()).collect();
        (0..n)
            .into_par_iter()
            .map(|m| {
                let (mut num, mut den) = (0.0, 0.0);
                for j in 0..n - m {
                    let i = j + m;
                    let k = j + m / 2;
                    let w = if m % 2 == 0 { diag[k] } else { 0.5 * (diag[k] + diag[k + 1]) };
                    num += w * self.entry(i, j).norm().as_f64();
                    den += w;
                }
                (m as f64 * h, if den > 0.0 { num / den } else { 0.0 })
            })
            .collect()
    }

    pub fn coherence_length(&self) -> CoherenceLength {
        coherence_length_of(&self.coherence_profile(), self.grid.extent().as_f64())
    }

    /// The `count` most probable eigen-components with their localization widths.
    pub fn branches(&self, count: usize) -> Vec<Branch> {
        let eig = self.to_nalgebra().symmetric_eigen();
        let xs: Vec<f64> = self.grid.coordinates().into_iter().map(|x| x.as_f64()).collect();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        order
            .into_iter()
            .take(count)
            .map(|k| {
                let col = eig.eigenvectors.column(k);
                let p: Vec<f64> = col.iter().map(|c| c.norm_sqr()).collect();
                let total: f64 = p.iter().sum();
                let centre = xs.iter().zip(&p).map(|(x, w)| x * w).sum::<f64>() / total;
                let var = xs.iter().zip(&p).map(|(x, w)| (x - centre).powi(2) * w).sum::<f64>() / total;
                Branch { weight: eig.eigenvalues[k], centre, width: var.sqrt() }
            })
            .collect()
    }
}

pub fn entropy_of(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .filter(|&&p| p > EIGEN_CUTOFF)
        .map(|&p| -p * p.ln())
        .sum()
}

/// First separation where a profile falls below half its value at `s = 0`,
/// linearly interpolated between samples.
pub fn coherence_length_of(profile: &[(f64, f64)], extent: f64) -> CoherenceLength {
    let Some(&(_, c0)) = profile.first() else {
        return CoherenceLength { length: extent, decayed: false };
    };
    let half = 0.5 * c0;
    for w in profile.windows(2) {
        let ((s0, a), (s1, b)) = (w[0], w[1]);
        if b < half {
            let frac = if a > b { (a - half) / (a - b) } else { 0.0 };
            return CoherenceLength { length: s0 + frac * (s1 - s0), decayed: true };
        }
    }
    CoherenceLength { length: extent, decayed: false }
}

pub fn von_neumann_entropy<T: Real>(rho: &DensityMatrix<T>) -> f64 {
    rho.von_neumann_entropy()
}

pub fn coherence_length<T: Real>(rho: &DensityMatrix<T>) -> CoherenceLength {
    rho.coherence_length()
}

/// Meta-energy mean and spread of `xi` under `ham`.
pub fn physical_energy<T: Real>(xi: &ComplexField<T>, ham: &Hamiltonian<T>) -> Result<EnergyStats<T>> {
    ham.energy_stats(xi)
}
