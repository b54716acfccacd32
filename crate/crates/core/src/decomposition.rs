//! Block-diagonalizing transforms of the collective spin for two to four atoms.
//!
//! Each transform `T` maps the coupled (irreducible) basis onto the product
//! basis of the atoms, so `T†·A_n·T` splits into a direct sum of
//! `B_j = J₊⊗a + J₋⊗a†` blocks, listed in the order the columns of `T` group
//! them.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{check_atoms, ladder, max_abs, DenseOperator, Ladder};

/// Half-integer spin stored as `2j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Spin(u32);

impl Spin {
    pub const ZERO: Spin = Spin(0);
    pub const HALF: Spin = Spin(1);
    pub const ONE: Spin = Spin(2);
    pub const THREE_HALVES: Spin = Spin(3);
    pub const TWO: Spin = Spin(4);

    pub fn from_twice(twice: u32) -> Self {
        Spin(twice)
    }

    pub fn twice(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// `2j + 1`.
    pub fn dim(self) -> usize {
        self.0 as usize + 1
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_multiple_of(2) {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpinBlock {
    pub spin: Spin,
    /// First atomic row of the block in the coupled basis.
    pub offset: usize,
}

impl SpinBlock {
    pub fn dim(&self) -> usize {
        self.spin.dim()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinDecomposition {
    pub n_atoms: usize,
    pub transform: DenseOperator,
    pub blocks: Vec<SpinBlock>,
}

impl SpinDecomposition {
    pub fn new(n_atoms: usize) -> Result<Self> {
        let transform = transform_matrix(n_atoms)?;
        let spins: &[u32] = match n_atoms {
            1 => &[1],
            2 => &[0, 2],
            3 => &[1, 1, 3],
            4 => &[0, 2, 0, 2, 2, 4],
            _ => unreachable!(),
        };
        let mut offset = 0;
        let blocks = spins
            .iter()
            .map(|&twice| {
                let block = SpinBlock { spin: Spin(twice), offset };
                offset += block.dim();
                block
            })
            .collect();
        Ok(Self { n_atoms, transform, blocks })
    }

    pub fn spins(&self) -> Vec<Spin> {
        self.blocks.iter().map(|b| b.spin).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.blocks.iter().map(SpinBlock::dim).sum()
    }

    /// `‖T†T − 1‖_max`.
    pub fn unitarity_defect(&self) -> f64 {
        let l = self.transform.nrows();
        max_abs(&(self.transform.adjoint() * &self.transform - DMatrix::identity(l, l)))
    }
}

// Transcription tokens: r2 = 1/√2, r3 = 1/√3, r6 = 1/√6, s23 = √(2/3),
// h = 1/2, e = 1/(2√3), c = √3/2.
const T2: [&str; 4] = ["0 1 0 0", "r2 0 r2 0", "-r2 0 r2 0", "0 0 0 1"];

const T3: [&str; 8] = [
    "0 0 0 0 1 0 0 0",
    "r2 0 r6 0 0 r3 0 0",
    "-r2 0 r6 0 0 r3 0 0",
    "0 0 0 s23 0 0 r3 0",
    "0 0 -s23 0 0 r3 0 0",
    "0 r2 0 -r6 0 0 r3 0",
    "0 -r2 0 -r6 0 0 r3 0",
    "0 0 0 0 0 0 0 1",
];

const T4: [&str; 16] = [
    "0 0 0 0 0 0 0 0 0 0 0 1 0 0 0 0",
    "0 r2 0 0 0 r6 0 0 e 0 0 0 h 0 0 0",
    "0 -r2 0 0 0 r6 0 0 e 0 0 0 h 0 0 0",
    "0 0 0 0 r3 0 r3 0 0 r6 0 0 0 r6 0 0",
    "0 0 0 0 0 -s23 0 0 e 0 0 0 h 0 0 0",
    "h 0 h 0 -e 0 -e 0 0 r6 0 0 0 r6 0 0",
    "-h 0 -h 0 -e 0 -e 0 0 r6 0 0 0 r6 0 0",
    "0 0 0 0 0 0 0 0 0 0 c 0 0 0 h 0",
    "0 0 0 0 0 0 0 0 -c 0 0 0 h 0 0 0",
    "-h 0 h 0 -e 0 e 0 0 -r6 0 0 0 r6 0 0",
    "h 0 -h 0 -e 0 e 0 0 -r6 0 0 0 r6 0 0",
    "0 0 0 0 0 0 0 s23 0 0 -e 0 0 0 h 0",
    "0 0 0 0 r3 0 -r3 0 0 -r6 0 0 0 r6 0 0",
    "0 0 0 r2 0 0 0 -r6 0 0 -e 0 0 0 h 0",
    "0 0 0 -r2 0 0 0 -r6 0 0 -e 0 0 0 h 0",
    "0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 1",
];

fn surd(token: &str) -> f64 {
    let (sign, body) = match token.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, token),
    };
    let magnitude = match body {
        "0" => 0.0,
        "1" => 1.0,
        "r2" => 1.0 / 2f64.sqrt(),
        "r3" => 1.0 / 3f64.sqrt(),
        "r6" => 1.0 / 6f64.sqrt(),
        "s23" => (2.0f64 / 3.0).sqrt(),
        "h" => 0.5,
        "e" => 1.0 / (2.0 * 3f64.sqrt()),
        "c" => 3f64.sqrt() / 2.0,
        other => panic!("unknown surd token {other:?}"),
    };
    sign * magnitude
}

fn from_rows(rows: &[&str]) -> DenseOperator {
    let dim = rows.len();
    let entries: Vec<C64> = rows
        .iter()
        .flat_map(|row| row.split_whitespace().map(|t| C64::from(surd(t))))
        .collect();
    assert_eq!(entries.len(), dim * dim);
    DMatrix::from_row_slice(dim, dim, &entries)
}

/// The real orthogonal transform taking the coupled basis to the product basis.
pub fn transform_matrix(n: usize) -> Result<DenseOperator> {
    check_atoms(n)?;
    Ok(match n {
        1 => DMatrix::identity(2, 2),
        2 => from_rows(&T2),
        3 => from_rows(&T3),
        _ => from_rows(&T4),
    })
}

/// Irreducible `(J₊, J₋)` for spin `j`, rows ordered from the highest weight.
pub fn spin_ladder(j: Spin) -> Result<(DenseOperator, DenseOperator)> {
    if j.twice() > 4 {
        return Err(Error::UnsupportedSpin(j.twice()));
    }
    let dim = j.dim();
    let jv = j.value();
    let mut plus = DMatrix::<C64>::zeros(dim, dim);
    for r in 0..dim.saturating_sub(1) {
        let m = jv - (r + 1) as f64;
        plus[(r, r + 1)] = C64::from((jv * (jv + 1.0) - m * (m + 1.0)).sqrt());
    }
    let minus = plus.adjoint();
    Ok((plus, minus))
}

/// `B_j = J₊⊗a + J₋⊗a†` on a field truncated at `nmax`.
pub fn spin_block(j: Spin, nmax: usize) -> Result<DenseOperator> {
    let (plus, minus) = spin_ladder(j)?;
    Ok(plus.kronecker(&ladder(Ladder::Annihilate, nmax)) + minus.kronecker(&ladder(Ladder::Create, nmax)))
}

/// `(U⊗1)† · M · (U⊗1)` for an atomic-space matrix `U`, exploiting the
/// Kronecker structure instead of forming `U⊗1`.
pub fn conjugate_atomic(m: &DenseOperator, u: &DenseOperator, field_dim: usize) -> Result<DenseOperator> {
    let l = u.nrows();
    let dim = l * field_dim;
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::DimensionMismatch { expected: dim, actual: m.nrows() });
    }
    let mut right = DMatrix::<C64>::zeros(dim, dim);
    for lc in 0..l {
        for j in 0..l {
            let w = u[(lc, j)];
            if w == C64::from(0.0) {
                continue;
            }
            for q in 0..field_dim {
                let src = m.column(lc * field_dim + q);
                let mut dst = right.column_mut(j * field_dim + q);
                dst.axpy(w, &src, C64::from(1.0));
            }
        }
    }
    let mut out = DMatrix::<C64>::zeros(dim, dim);
    for k in 0..l {
        for i in 0..l {
            let w = u[(k, i)].conj();
            if w == C64::from(0.0) {
                continue;
            }
            for p in 0..field_dim {
                let (src, dst) = (k * field_dim + p, i * field_dim + p);
                for col in 0..dim {
                    out[(dst, col)] += w * right[(src, col)];
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct BlockDiagonalization {
    pub blocks: Vec<DenseOperator>,
    /// Max-norm of every entry outside the diagonal blocks.
    pub residual: f64,
    /// Off-block max-norm restricted to the rows of each block.
    pub block_residuals: Vec<f64>,
}

impl BlockDiagonalization {
    /// Entrywise deviation of each block from the spin-ladder `B_j`.
    pub fn block_errors(&self, dec: &SpinDecomposition, nmax: usize) -> Result<Vec<f64>> {
        dec.blocks
            .iter()
            .zip(&self.blocks)
            .map(|(info, block)| {
                let expected = if info.spin == Spin::ZERO {
                    DMatrix::zeros(nmax + 1, nmax + 1)
                } else {
                    spin_block(info.spin, nmax)?
                };
                Ok(max_abs(&(block - expected)))
            })
            .collect()
    }
}

pub fn block_diagonalize(a: &DenseOperator, dec: &SpinDecomposition, nmax: usize) -> Result<BlockDiagonalization> {
    let field_dim = nmax + 1;
    let conj = conjugate_atomic(a, &dec.transform, field_dim)?;
    let dim = conj.nrows();
    let mut owner = vec![0usize; dim];
    for (b, info) in dec.blocks.iter().enumerate() {
        owner[info.offset * field_dim..(info.offset + info.dim()) * field_dim].fill(b);
    }
    let mut block_residuals = vec![0.0f64; dec.blocks.len()];
    for c in 0..dim {
        for r in 0..dim {
            if owner[r] != owner[c] {
                let v = conj[(r, c)].norm();
                let slot = &mut block_residuals[owner[r]];
                *slot = slot.max(v);
            }
        }
    }
    let residual = block_residuals.iter().copied().fold(0.0, f64::max);
    let blocks = dec
        .blocks
        .iter()
        .map(|info| {
            let start = info.offset * field_dim;
            let len = info.dim() * field_dim;
            conj.view((start, start), (len, len)).into_owned()
        })
        .collect();
    Ok(BlockDiagonalization { blocks, residual, block_residuals })
}
