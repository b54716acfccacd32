//! Truncated Fock-space and multi-atom spin operators.
//!
//! The joint basis is `(atomic index, photon number)` with the photon number
//! varying fastest. The atomic index is the big-endian bit pattern of the
//! tensor factors (atom 1 is the most significant bit) and bit value `0` is
//! the excited level, so `σ₊ = [[0,1],[0,0]]` raises `1 → 0`.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex matrix on the truncated joint space (or one of its factors).
pub type DenseOperator = DMatrix<C64>;

pub const MAX_ATOMS: usize = 4;

pub(crate) fn check_atoms(n: usize) -> Result<()> {
    if (1..=MAX_ATOMS).contains(&n) {
        Ok(())
    } else {
        Err(Error::UnsupportedAtoms(n))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Annihilate,
    Create,
    Number,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    Plus,
    Minus,
    Three,
}

impl Pauli {
    fn matrix(self) -> DenseOperator {
        let (a, b, c, d) = match self {
            Pauli::Plus => (0.0, 1.0, 0.0, 0.0),
            Pauli::Minus => (0.0, 0.0, 1.0, 0.0),
            Pauli::Three => (1.0, 0.0, 0.0, -1.0),
        };
        DMatrix::from_row_slice(2, 2, &[a, b, c, d].map(C64::from))
    }
}

/// Index bookkeeping for the product basis of `n_atoms` atoms and a field
/// truncated at `nmax` photons.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Basis {
    pub n_atoms: usize,
    pub nmax: usize,
}

impl Basis {
    pub fn new(n_atoms: usize, nmax: usize) -> Result<Self> {
        check_atoms(n_atoms)?;
        Ok(Self { n_atoms, nmax })
    }

    pub fn atomic_dim(&self) -> usize {
        1 << self.n_atoms
    }

    pub fn field_dim(&self) -> usize {
        self.nmax + 1
    }

    pub fn dim(&self) -> usize {
        self.atomic_dim() * self.field_dim()
    }

    pub fn index(&self, atomic: usize, photons: usize) -> usize {
        atomic * self.field_dim() + photons
    }

    pub fn split(&self, index: usize) -> (usize, usize) {
        (index / self.field_dim(), index % self.field_dim())
    }

    /// Number of excited atoms in an atomic basis state.
    pub fn excited_count(&self, atomic: usize) -> usize {
        self.n_atoms - atomic.count_ones() as usize
    }

    /// Integer excitation index: excited atoms plus photons.
    pub fn excitation(&self, index: usize) -> usize {
        let (atomic, photons) = self.split(index);
        self.excited_count(atomic) + photons
    }

    /// True when every state sharing this state's excitation number fits
    /// under the photon cutoff, so truncated operators act exactly on it.
    pub fn sector_contained(&self, index: usize) -> bool {
        self.excitation(index) <= self.nmax
    }

    pub fn contained_indices(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.sector_contained(i)).collect()
    }
}

pub fn ladder(kind: Ladder, nmax: usize) -> DenseOperator {
    let dim = nmax + 1;
    let mut m = DMatrix::zeros(dim, dim);
    for k in 1..dim {
        let amp = C64::from((k as f64).sqrt());
        match kind {
            Ladder::Annihilate => m[(k - 1, k)] = amp,
            Ladder::Create => m[(k, k - 1)] = amp,
            Ladder::Number => {}
        }
    }
    if kind == Ladder::Number {
        for k in 0..dim {
            m[(k, k)] = C64::from(k as f64);
        }
    }
    m
}

/// `σ_s` acting on atom `i` (1-based) of `n`.
pub fn site_pauli(n: usize, i: usize, s: Pauli) -> Result<DenseOperator> {
    check_atoms(n)?;
    if i == 0 || i > n {
        return Err(Error::SiteOutOfRange { n_atoms: n, index: i });
    }
    let id = DMatrix::<C64>::identity(2, 2);
    let mut out = DMatrix::<C64>::identity(1, 1);
    for site in 1..=n {
        out = if site == i {
            out.kronecker(&s.matrix())
        } else {
            out.kronecker(&id)
        };
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollectiveSpin {
    pub plus: DenseOperator,
    pub minus: DenseOperator,
    pub three: DenseOperator,
}

impl CollectiveSpin {
    /// `S₊S₋ + S₋S₊ + 2S₃²`, twice the usual Casimir.
    pub fn casimir(&self) -> DenseOperator {
        &self.plus * &self.minus + &self.minus * &self.plus + (&self.three * &self.three) * C64::from(2.0)
    }
}

pub fn collective_spin(n: usize) -> Result<CollectiveSpin> {
    check_atoms(n)?;
    let dim = 1 << n;
    let mut spin = CollectiveSpin {
        plus: DMatrix::zeros(dim, dim),
        minus: DMatrix::zeros(dim, dim),
        three: DMatrix::zeros(dim, dim),
    };
    for i in 1..=n {
        spin.plus += site_pauli(n, i, Pauli::Plus)?;
        spin.minus += site_pauli(n, i, Pauli::Minus)?;
        spin.three += site_pauli(n, i, Pauli::Three)? * C64::from(0.5);
    }
    Ok(spin)
}

/// `A_n = S₊ ⊗ a + S₋ ⊗ a†`.
pub fn interaction_a(n: usize, nmax: usize) -> Result<DenseOperator> {
    let spin = collective_spin(n)?;
    let a = ladder(Ladder::Annihilate, nmax);
    let adag = ladder(Ladder::Create, nmax);
    Ok(spin.plus.kronecker(&a) + spin.minus.kronecker(&adag))
}

/// Model parameters in units with ħ = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n_atoms: usize,
    pub omega: f64,
    pub delta: f64,
    pub g: f64,
    pub nmax: usize,
}

impl ModelParams {
    pub fn resonant(n_atoms: usize, omega: f64, g: f64, nmax: usize) -> Self {
        Self { n_atoms, omega, delta: omega, g, nmax }
    }

    pub fn validate(&self) -> Result<()> {
        check_atoms(self.n_atoms)?;
        if !self.omega.is_finite() || self.omega < 0.0 {
            return Err(Error::InvalidParameter(format!("omega must be finite and >= 0, got {}", self.omega)));
        }
        if !self.delta.is_finite() || !self.g.is_finite() {
            return Err(Error::InvalidParameter("delta and g must be finite".into()));
        }
        Ok(())
    }

    pub fn is_resonant(&self) -> bool {
        self.delta == self.omega
    }

    pub fn basis(&self) -> Basis {
        Basis { n_atoms: self.n_atoms, nmax: self.nmax }
    }
}

/// `H = ω·1⊗a†a + Δ·S₃⊗1 + g·(S₊⊗a + S₋⊗a†)`.
pub fn hamiltonian(p: &ModelParams) -> Result<DenseOperator> {
    p.validate()?;
    let spin = collective_spin(p.n_atoms)?;
    let atomic_id = DMatrix::<C64>::identity(1 << p.n_atoms, 1 << p.n_atoms);
    let field_id = DMatrix::<C64>::identity(p.nmax + 1, p.nmax + 1);
    let free = atomic_id.kronecker(&ladder(Ladder::Number, p.nmax)) * C64::from(p.omega)
        + spin.three.kronecker(&field_id) * C64::from(p.delta);
    Ok(free + interaction_a(p.n_atoms, p.nmax)? * C64::from(p.g))
}

/// `E = S₃⊗1 + 1⊗N`, diagonal in the product basis.
pub fn excitation_operator(n: usize, nmax: usize) -> Result<DenseOperator> {
    let basis = Basis::new(n, nmax)?;
    let half = n as f64 / 2.0;
    Ok(DMatrix::from_diagonal(&nalgebra::DVector::from_fn(basis.dim(), |i, _| {
        C64::from(basis.excitation(i) as f64 - half)
    })))
}

pub fn commutator(a: &DenseOperator, b: &DenseOperator) -> DenseOperator {
    a * b - b * a
}

pub fn max_abs(m: &DenseOperator) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// `‖M − M†‖_max`.
pub fn hermitian_defect(m: &DenseOperator) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Max-norm of `m` restricted to the given rows and columns.
pub fn masked_max_abs(m: &DenseOperator, rows: &[usize], cols: &[usize]) -> f64 {
    let mut worst = 0.0f64;
    for &c in cols {
        for &r in rows {
            worst = worst.max(m[(r, c)].norm());
        }
    }
    worst
}
