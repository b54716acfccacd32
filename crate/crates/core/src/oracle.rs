//! Formula-free reference propagator.
//!
//! `A_n` conserves the excitation number (excited atoms plus photons), so it
//! splits into finite sectors of dimension at most `2^n`. Each sector is
//! exponentiated exactly through a real symmetric eigendecomposition.
//! A second path exponentiates the whole truncated `A_n` at once.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::closed_form::assemble_propagator;
use crate::error::{Error, Result};
use crate::operators::{check_atoms, collective_spin, interaction_a, Basis, DenseOperator};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExcitationSector {
    pub n_atoms: usize,
    /// Excited atoms plus photons; the eigenvalue of `S₃ + N` is this minus `n/2`.
    pub excitation: usize,
    /// `(atomic index, photon number)` pairs, ordered by atomic index.
    pub states: Vec<(usize, usize)>,
}

impl ExcitationSector {
    pub fn dim(&self) -> usize {
        self.states.len()
    }

    /// `A_n` restricted to the sector.
    pub fn interaction(&self) -> Result<DMatrix<f64>> {
        let spin = collective_spin(self.n_atoms)?;
        let dim = self.dim();
        let mut m = DMatrix::<f64>::zeros(dim, dim);
        for (r, &(ar, pr)) in self.states.iter().enumerate() {
            for (c, &(ac, pc)) in self.states.iter().enumerate() {
                // S₊⊗a lowers the photon number, S₋⊗a† raises it.
                if pr + 1 == pc {
                    m[(r, c)] += spin.plus[(ar, ac)].re * (pc as f64).sqrt();
                } else if pc + 1 == pr {
                    m[(r, c)] += spin.minus[(ar, ac)].re * (pr as f64).sqrt();
                }
            }
        }
        Ok(m)
    }
}

/// Sectors with excitation `0..=emax`.
pub fn enumerate_sectors(n: usize, emax: usize) -> Result<Vec<ExcitationSector>> {
    check_atoms(n)?;
    let basis = Basis { n_atoms: n, nmax: emax };
    Ok((0..=emax)
        .map(|excitation| {
            let states = (0..basis.atomic_dim())
                .filter_map(|atomic| {
                    let excited = basis.excited_count(atomic);
                    (excited <= excitation).then(|| (atomic, excitation - excited))
                })
                .collect();
            ExcitationSector { n_atoms: n, excitation, states }
        })
        .collect())
}

/// `exp(−iτ·M)` for a real symmetric `M`.
pub fn exp_symmetric(m: DMatrix<f64>, tau: f64) -> Result<DenseOperator> {
    let dim = m.nrows();
    let eig = SymmetricEigen::try_new(m, 1e-15, 10_000)
        .ok_or_else(|| Error::Eigendecomposition(format!("no convergence for {dim}x{dim} block")))?;
    let vecs = eig.eigenvectors.map(C64::from);
    // 1 + V(e^{−iτΛ} − 1)Vᵀ keeps the identity exact when τΛ vanishes.
    let shifts = eig.eigenvalues.map(|lambda| C64::from_polar(1.0, -tau * lambda) - 1.0);
    let scaled = DMatrix::from_fn(dim, dim, |r, c| vecs[(r, c)] * shifts[c]);
    Ok(scaled * vecs.transpose() + DMatrix::<C64>::identity(dim, dim))
}

pub fn sector_propagator(sector: &ExcitationSector, t: f64, g: f64) -> Result<DenseOperator> {
    exp_symmetric(sector.interaction()?, t * g)
}

/// Reference `e^{−itgA_n}` on the truncated space. Columns whose sector does
/// not fit under `nmax` are left zero.
pub fn oracle_propagator(n: usize, t: f64, g: f64, nmax: usize) -> Result<DenseOperator> {
    let basis = Basis::new(n, nmax)?;
    let sectors = enumerate_sectors(n, nmax)?;
    let blocks: Vec<DenseOperator> = sectors
        .par_iter()
        .map(|s| sector_propagator(s, t, g))
        .collect::<Result<_>>()?;
    let mut out = DMatrix::<C64>::zeros(basis.dim(), basis.dim());
    for (sector, block) in sectors.iter().zip(&blocks) {
        for (r, &(ar, pr)) in sector.states.iter().enumerate() {
            for (c, &(ac, pc)) in sector.states.iter().enumerate() {
                out[(basis.index(ar, pr), basis.index(ac, pc))] = block[(r, c)];
            }
        }
    }
    Ok(out)
}

/// Second reference path: eigendecomposition of the full truncated `A_n`.
/// Exact on columns whose sector fits under `nmax`.
pub fn dense_oracle_propagator(n: usize, t: f64, g: f64, nmax: usize) -> Result<DenseOperator> {
    exp_symmetric(interaction_a(n, nmax)?.map(|z| z.re), t * g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BasisLabel {
    pub atomic: usize,
    pub photons: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Deviation {
    pub max_dev: f64,
    /// `(row, col)` of the worst entry; `None` when every entry matches exactly.
    pub location: Option<(BasisLabel, BasisLabel)>,
}

impl Deviation {
    pub fn describe(&self, n_atoms: usize) -> String {
        match self.location {
            Some((row, col)) => format!(
                "{:.3e} at row (atoms {:0w$b}, photons {}) col (atoms {:0w$b}, photons {})",
                self.max_dev,
                row.atomic,
                row.photons,
                col.atomic,
                col.photons,
                w = n_atoms
            ),
            None => format!("{:.3e}", self.max_dev),
        }
    }
}

/// Worst entrywise deviation of `lhs − rhs` over all rows and the
/// sector-contained columns of `basis`.
pub fn contained_deviation(basis: &Basis, lhs: &DenseOperator, rhs: &DenseOperator) -> Deviation {
    let mut worst = Deviation { max_dev: 0.0, location: None };
    for c in basis.contained_indices() {
        for r in 0..basis.dim() {
            let dev = (lhs[(r, c)] - rhs[(r, c)]).norm();
            if dev > worst.max_dev || (worst.location.is_none() && dev > 0.0) {
                let (ar, pr) = basis.split(r);
                let (ac, pc) = basis.split(c);
                worst = Deviation {
                    max_dev: dev,
                    location: Some((BasisLabel { atomic: ar, photons: pr }, BasisLabel { atomic: ac, photons: pc })),
                };
            }
        }
    }
    worst
}

/// Closed form vs. sector oracle on every fully contained sector.
pub fn compare_propagators(n: usize, t: f64, g: f64, nmax: usize) -> Result<Deviation> {
    let basis = Basis::new(n, nmax)?;
    let closed = assemble_propagator(n, t, g, nmax)?;
    let oracle = oracle_propagator(n, t, g, nmax)?;
    Ok(contained_deviation(&basis, &closed, &oracle))
}
