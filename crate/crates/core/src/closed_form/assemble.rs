use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use super::{block_propagator, FormulaVariant};
use crate::decomposition::{conjugate_atomic, SpinDecomposition};
use crate::error::{Error, Result};
use crate::operators::{Basis, DenseOperator, ModelParams};

/// Closed-form evolution on the truncated space of `n_atoms` atoms and a
/// field with at most `nmax` photons.
#[derive(Debug, Clone)]
pub struct Propagator {
    pub basis: Basis,
    pub decomposition: SpinDecomposition,
    pub variant: FormulaVariant,
}

impl Propagator {
    pub fn new(n_atoms: usize, nmax: usize) -> Result<Self> {
        Ok(Self {
            basis: Basis::new(n_atoms, nmax)?,
            decomposition: SpinDecomposition::new(n_atoms)?,
            variant: FormulaVariant::Corrected,
        })
    }

    pub fn with_decomposition(mut self, decomposition: SpinDecomposition) -> Result<Self> {
        if decomposition.n_atoms != self.basis.n_atoms {
            return Err(Error::DimensionMismatch { expected: self.basis.n_atoms, actual: decomposition.n_atoms });
        }
        self.decomposition = decomposition;
        Ok(self)
    }

    pub fn with_variant(mut self, variant: FormulaVariant) -> Self {
        self.variant = variant;
        self
    }

    /// Direct sum of the block propagators in the coupled basis.
    pub fn coupled(&self, tau: f64) -> Result<DenseOperator> {
        let field = self.basis.field_dim();
        let mut out = DMatrix::<C64>::zeros(self.basis.dim(), self.basis.dim());
        for block in &self.decomposition.blocks {
            let local = block_propagator(block.spin, tau, self.variant)?.materialize(self.basis.nmax);
            let start = block.offset * field;
            out.view_mut((start, start), local.shape()).copy_from(&local);
        }
        Ok(out)
    }

    /// `e^{−iτA_n}` in the product basis, assembled as `1 + (T⊗1)(D − 1)(T⊗1)†`
    /// so the identity part carries no rounding from `T·T†`.
    pub fn interaction(&self, tau: f64) -> Result<DenseOperator> {
        let dim = self.basis.dim();
        let shifted = self.coupled(tau)? - DMatrix::<C64>::identity(dim, dim);
        let rotated = conjugate_atomic(&shifted, &self.decomposition.transform.adjoint(), self.basis.field_dim())?;
        Ok(rotated + DMatrix::<C64>::identity(dim, dim))
    }

    /// `e^{−iτA_n}·ψ` without forming the dense propagator.
    pub fn apply_interaction(&self, tau: f64, state: &DVector<C64>) -> Result<DVector<C64>> {
        let dim = self.basis.dim();
        if state.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, actual: state.len() });
        }
        let field = self.basis.field_dim();
        let t = &self.decomposition.transform;
        let coupled_in = apply_atomic(&t.adjoint(), state, field);
        let mut coupled_out = DVector::<C64>::zeros(dim);
        for block in &self.decomposition.blocks {
            let start = block.offset * field;
            let len = block.dim() * field;
            let local = block_propagator(block.spin, tau, self.variant)?
                .apply(&coupled_in.rows(start, len).into_owned(), self.basis.nmax)?;
            coupled_out.rows_mut(start, len).copy_from(&local);
        }
        Ok(apply_atomic(t, &coupled_out, field))
    }

    /// Diagonal of `e^{−itω S₃} ⊗ e^{−itω a†a}`.
    fn free_phases(&self, omega: f64, t: f64) -> DVector<C64> {
        let half = self.basis.n_atoms as f64 / 2.0;
        DVector::from_fn(self.basis.dim(), |i, _| {
            let energy = self.basis.excitation(i) as f64 - half;
            C64::from_polar(1.0, -t * omega * energy)
        })
    }

    /// Full resonant evolution operator at time `t`.
    pub fn full(&self, omega: f64, g: f64, t: f64) -> Result<DenseOperator> {
        let mut u = self.interaction(t * g)?;
        let phases = self.free_phases(omega, t);
        for (i, phase) in phases.iter().enumerate() {
            let mut row = u.row_mut(i);
            row *= *phase;
        }
        Ok(u)
    }

    pub fn apply_full(&self, omega: f64, g: f64, t: f64, state: &DVector<C64>) -> Result<DVector<C64>> {
        let evolved = self.apply_interaction(t * g, state)?;
        Ok(evolved.component_mul(&self.free_phases(omega, t)))
    }
}

/// `(U⊗1)·ψ` for an atomic-space matrix `U`.
fn apply_atomic(u: &DenseOperator, state: &DVector<C64>, field: usize) -> DVector<C64> {
    let l = u.nrows();
    let mut out = DVector::<C64>::zeros(state.len());
    for i in 0..l {
        for k in 0..u.ncols() {
            let w = u[(i, k)];
            if w == C64::from(0.0) {
                continue;
            }
            for p in 0..field {
                out[i * field + p] += w * state[k * field + p];
            }
        }
    }
    out
}

/// `e^{−itg·A_n}` on the truncated space, assembled from the block formulas.
pub fn assemble_propagator(n: usize, t: f64, g: f64, nmax: usize) -> Result<DenseOperator> {
    Propagator::new(n, nmax)?.interaction(t * g)
}

/// Resonant evolution operator `(e^{−itωS₃} ⊗ e^{−itωa†a})·e^{−itgA_n}`.
pub fn full_evolution(p: &ModelParams, t: f64) -> Result<DenseOperator> {
    p.validate()?;
    if !p.is_resonant() {
        return Err(Error::OffResonance { delta: p.delta, omega: p.omega });
    }
    Propagator::new(p.n_atoms, p.nmax)?.full(p.omega, p.g, t)
}
