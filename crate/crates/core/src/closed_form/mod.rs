//! Closed-form block propagators `e^{−iτB_j}` and the assembled evolution
//! operator.
//!
//! Each propagator is an [`OperatorValuedMatrix`]: a small matrix whose
//! entries are sums of normal-ordered terms `φ(N + c)·a^k` or
//! `φ(N + c)·(a†)^k`. Materializing on a truncated Fock space gives a dense
//! matrix in the `(block row, photon)` basis.

mod assemble;
mod power;
pub mod spectral;

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::decomposition::Spin;
use crate::error::{Error, Result};
use crate::operators::DenseOperator;

pub use assemble::{assemble_propagator, full_evolution, Propagator};
pub use power::{b_power_check, power_matrix};
pub use spectral::{FormulaVariant, PowerCoefficients, Spectral3, Spectral4};

use spectral::{cos_root, sinc_root, Even3, Even4, Odd3, Odd4};

pub type Coefficient = Arc<dyn Fn(i64) -> C64 + Send + Sync>;

/// `φ(N + offset)·a^shift` for `shift ≥ 0`, `φ(N + offset)·(a†)^{−shift}` otherwise.
#[derive(Clone)]
pub struct LadderMonomial {
    pub shift: i32,
    pub offset: i64,
    pub label: &'static str,
    coeff: Coefficient,
}

impl fmt::Debug for LadderMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LadderMonomial")
            .field("label", &self.label)
            .field("offset", &self.offset)
            .field("shift", &self.shift)
            .finish()
    }
}

/// `√(hi!/lo!)`.
fn ladder_amplitude(lo: usize, hi: usize) -> f64 {
    (lo + 1..=hi).map(|x| x as f64).product::<f64>().sqrt()
}

impl LadderMonomial {
    pub fn new(label: &'static str, offset: i64, shift: i32, coeff: impl Fn(i64) -> C64 + Send + Sync + 'static) -> Self {
        Self { shift, offset, label, coeff: Arc::new(coeff) }
    }

    pub fn constant(value: C64) -> Self {
        Self::new("1", 0, 0, move |_| value)
    }

    pub fn coefficient(&self, arg: i64) -> C64 {
        (self.coeff)(arg)
    }

    /// Output photon number for input `photons`, if the ladder power does not
    /// annihilate it.
    pub fn target(&self, photons: usize) -> Option<usize> {
        if self.shift >= 0 {
            photons.checked_sub(self.shift as usize)
        } else {
            Some(photons + self.shift.unsigned_abs() as usize)
        }
    }

    /// The argument `N + offset` at which the coefficient is evaluated.
    pub fn argument(&self, photons: usize) -> Option<i64> {
        self.target(photons).map(|out| out as i64 + self.offset)
    }

    /// `(out, amplitude)` such that `term |m⟩ = amplitude |out⟩`.
    pub fn act(&self, photons: usize) -> Option<(usize, C64)> {
        let out = self.target(photons)?;
        let amp = ladder_amplitude(out.min(photons), out.max(photons));
        Some((out, self.coefficient(out as i64 + self.offset) * amp))
    }
}

/// One coefficient evaluation reached while materializing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientSample {
    pub row: usize,
    pub col: usize,
    pub label: &'static str,
    pub argument: i64,
    pub value: C64,
}

#[derive(Debug, Clone)]
pub struct OperatorValuedMatrix {
    pub spin: Spin,
    /// `t·g` for propagators; `None` for plain operator powers.
    pub tau: Option<f64>,
    entries: Vec<Vec<Vec<LadderMonomial>>>,
}

impl OperatorValuedMatrix {
    pub fn zeros(spin: Spin, tau: Option<f64>) -> Self {
        let dim = spin.dim();
        Self { spin, tau, entries: vec![vec![Vec::new(); dim]; dim] }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> &[LadderMonomial] {
        &self.entries[row][col]
    }

    pub fn push(&mut self, row: usize, col: usize, term: LadderMonomial) {
        self.entries[row][col].push(term);
    }

    /// Dense matrix in the `(row, photon)` basis with photons `0..=nmax`.
    /// Terms whose output photon exceeds `nmax` are dropped.
    pub fn materialize(&self, nmax: usize) -> DenseOperator {
        let p = nmax + 1;
        let dim = self.dim() * p;
        let mut out = DMatrix::<C64>::zeros(dim, dim);
        for (r, row) in self.entries.iter().enumerate() {
            for (c, terms) in row.iter().enumerate() {
                for term in terms {
                    for m in 0..p {
                        if let Some((target, value)) = term.act(m) {
                            if target <= nmax {
                                out[(r * p + target, c * p + m)] += value;
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Applies the operator to a vector in the `(row, photon)` basis without
    /// materializing it.
    pub fn apply(&self, state: &DVector<C64>, nmax: usize) -> Result<DVector<C64>> {
        let p = nmax + 1;
        let dim = self.dim() * p;
        if state.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, actual: state.len() });
        }
        let mut out = DVector::<C64>::zeros(dim);
        for (r, row) in self.entries.iter().enumerate() {
            for (c, terms) in row.iter().enumerate() {
                for term in terms {
                    for m in 0..p {
                        let amp = state[c * p + m];
                        if amp == C64::from(0.0) {
                            continue;
                        }
                        if let Some((target, value)) = term.act(m) {
                            if target <= nmax {
                                out[r * p + target] += value * amp;
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Every coefficient evaluation that `materialize(nmax)` performs.
    pub fn reached_coefficients(&self, nmax: usize) -> Vec<CoefficientSample> {
        let mut samples = Vec::new();
        for (r, row) in self.entries.iter().enumerate() {
            for (c, terms) in row.iter().enumerate() {
                for term in terms {
                    for m in 0..=nmax {
                        match term.target(m) {
                            Some(target) if target <= nmax => {
                                let argument = target as i64 + term.offset;
                                samples.push(CoefficientSample {
                                    row: r,
                                    col: c,
                                    label: term.label,
                                    argument,
                                    value: term.coefficient(argument),
                                });
                            }
                            _ => {}
                        }
                    }
                }
            }
        }
        samples
    }
}

const MINUS_I: C64 = C64::new(0.0, -1.0);

/// `e^{−iτB_{1/2}}`.
pub fn propagator_b_half(tau: f64) -> OperatorValuedMatrix {
    let mut m = OperatorValuedMatrix::zeros(Spin::HALF, Some(tau));
    m.push(0, 0, LadderMonomial::new("cos", 1, 0, move |x| cos_root(x as f64, tau)));
    m.push(0, 1, LadderMonomial::new("sinc", 1, 1, move |x| MINUS_I * sinc_root(x as f64, tau)));
    m.push(1, 0, LadderMonomial::new("sinc", 0, -1, move |x| MINUS_I * sinc_root(x as f64, tau)));
    m.push(1, 1, LadderMonomial::new("cos", 0, 0, move |x| cos_root(x as f64, tau)));
    m
}

/// `f(N) = (cos(τ√(2(2N+1))) − 1)/2`.
fn two_atom_f(x: i64, tau: f64) -> C64 {
    (cos_root(2.0 * (2 * x + 1) as f64, tau) - 1.0) / 2.0
}

/// `h(N) = sin(τ√(2(2N+1)))/√(2N+1)`.
fn two_atom_h(x: i64, tau: f64) -> C64 {
    2f64.sqrt() * sinc_root(2.0 * (2 * x + 1) as f64, tau)
}

/// `e^{−iτB_1}`.
pub fn propagator_b_one(tau: f64) -> OperatorValuedMatrix {
    let f = move |x: i64| two_atom_f(x, tau);
    let h = move |x: i64| MINUS_I * two_atom_h(x, tau);
    // Written with x = N + offset, e.g. (2N+2)/(2N+3) = 2x/(2x+1) at x = N+1.
    let weight = |x: i64| 2.0 / (2 * x + 1) as f64;
    let mut m = OperatorValuedMatrix::zeros(Spin::ONE, Some(tau));
    m.push(0, 0, LadderMonomial::new("f", 1, 0, move |x| 1.0 + x as f64 * weight(x) * f(x)));
    m.push(0, 1, LadderMonomial::new("h", 1, 1, h));
    m.push(0, 2, LadderMonomial::new("f", 1, 2, move |x| weight(x) * f(x)));
    m.push(1, 0, LadderMonomial::new("h", 0, -1, h));
    m.push(1, 1, LadderMonomial::new("f", 0, 0, move |x| 1.0 + 2.0 * f(x)));
    m.push(1, 2, LadderMonomial::new("h", 0, 1, h));
    m.push(2, 0, LadderMonomial::new("f", -1, -2, move |x| weight(x) * f(x)));
    m.push(2, 1, LadderMonomial::new("h", -1, -1, h));
    m.push(2, 2, LadderMonomial::new("f", -1, 0, move |x| 1.0 + (x + 1) as f64 * weight(x) * f(x)));
    m
}

#[derive(Clone, Copy)]
enum Family3 {
    Even(Even3),
    Odd(Odd3),
}

/// `(row, col, family, prefactor, offset, shift)`.
type Layout<F> = [(usize, usize, F, C64, i64, i32)];

fn label3(f: Family3) -> &'static str {
    match f {
        Family3::Even(Even3::F2) => "f2",
        Family3::Even(Even3::F1) => "f1",
        Family3::Even(Even3::F0) => "f0",
        Family3::Even(Even3::Fm1) => "f-1",
        Family3::Even(Even3::H1) => "h1",
        Family3::Odd(Odd3::F1) => "F1",
        Family3::Odd(Odd3::F0) => "F0",
        Family3::Odd(Odd3::H1) => "H1",
        Family3::Odd(Odd3::H0) => "H0",
    }
}

/// `e^{−iτB_{3/2}}`.
pub fn propagator_b_three_half(tau: f64) -> OperatorValuedMatrix {
    use Family3::{Even as E, Odd as O};
    let one = C64::from(1.0);
    let r3 = 3f64.sqrt();
    let s = C64::from(2.0 * r3);
    let mi = |x: f64| C64::new(0.0, -x);
    let layout: &Layout<Family3> = &[
        (0, 0, E(Even3::F2), one, 2, 0),
        (0, 1, O(Odd3::F1), mi(r3), 2, 1),
        (0, 2, E(Even3::H1), s, 2, 2),
        (0, 3, O(Odd3::H0), mi(6.0), 2, 3),
        (1, 0, O(Odd3::F1), mi(r3), 1, -1),
        (1, 1, E(Even3::F1), one, 1, 0),
        (1, 2, O(Odd3::H1), mi(2.0), 1, 1),
        (1, 3, E(Even3::H1), s, 1, 2),
        (2, 0, E(Even3::H1), s, 0, -2),
        (2, 1, O(Odd3::H1), mi(2.0), 0, -1),
        (2, 2, E(Even3::F0), one, 0, 0),
        (2, 3, O(Odd3::F0), mi(r3), 0, 1),
        (3, 0, O(Odd3::H0), mi(6.0), -1, -3),
        (3, 1, E(Even3::H1), s, -1, -2),
        (3, 2, O(Odd3::F0), mi(r3), -1, -1),
        (3, 3, E(Even3::Fm1), one, -1, 0),
    ];
    let mut m = OperatorValuedMatrix::zeros(Spin::THREE_HALVES, Some(tau));
    for &(r, c, family, factor, offset, shift) in layout {
        let term = LadderMonomial::new(label3(family), offset, shift, move |x| {
            factor
                * match family {
                    Family3::Even(f) => f.eval(x, tau),
                    Family3::Odd(f) => f.eval(x, tau),
                }
        });
        m.push(r, c, term);
    }
    m
}

#[derive(Clone, Copy)]
enum Family4 {
    Even(Even4),
    Odd(Odd4),
}

fn label4(f: Family4) -> &'static str {
    match f {
        Family4::Even(Even4::F2) => "f2",
        Family4::Even(Even4::F1) => "f1",
        Family4::Even(Even4::F0) => "f0",
        Family4::Even(Even4::Fm1) => "f-1",
        Family4::Even(Even4::Fm2) => "f-2",
        Family4::Even(Even4::H1) => "h1",
        Family4::Even(Even4::H0) => "h0",
        Family4::Even(Even4::Hm1) => "h-1",
        Family4::Even(Even4::K0) => "k0",
        Family4::Odd(Odd4::F1) => "F1",
        Family4::Odd(Odd4::Fm1) => "F-1",
        Family4::Odd(Odd4::H1) => "H1",
        Family4::Odd(Odd4::H0) => "H0",
        Family4::Odd(Odd4::Hm1) => "H-1",
    }
}

/// `e^{−iτB_2}` with the corrected four-atom formulas.
pub fn propagator_b_two(tau: f64) -> OperatorValuedMatrix {
    propagator_b_two_with(tau, FormulaVariant::Corrected)
}

pub fn propagator_b_two_with(tau: f64, variant: FormulaVariant) -> OperatorValuedMatrix {
    use Family4::{Even as E, Odd as O};
    let one = C64::from(1.0);
    let two_i = C64::new(0.0, -2.0);
    let half_i = C64::new(0.0, -0.5);
    let layout: &Layout<Family4> = &[
        // even part
        (0, 0, E(Even4::F2), one, 2, 0),
        (0, 2, E(Even4::H1), one, 2, 2),
        (0, 4, E(Even4::K0), one, 2, 4),
        (1, 1, E(Even4::F1), one, 1, 0),
        (1, 3, E(Even4::H0), one, 1, 2),
        (2, 0, E(Even4::H1), one, 0, -2),
        (2, 2, E(Even4::F0), one, 0, 0),
        (2, 4, E(Even4::Hm1), one, 0, 2),
        (3, 1, E(Even4::H0), one, -1, -2),
        (3, 3, E(Even4::Fm1), one, -1, 0),
        (4, 0, E(Even4::K0), one, -2, -4),
        (4, 2, E(Even4::Hm1), one, -2, -2),
        (4, 4, E(Even4::Fm2), one, -2, 0),
        // odd part
        (0, 1, O(Odd4::F1), two_i, 2, 1),
        (0, 3, O(Odd4::H0), two_i, 2, 3),
        (1, 0, O(Odd4::F1), two_i, 1, -1),
        (1, 2, O(Odd4::H1), half_i, 1, 1),
        (1, 4, O(Odd4::H0), two_i, 1, 3),
        (2, 1, O(Odd4::H1), half_i, 0, -1),
        (2, 3, O(Odd4::Hm1), half_i, 0, 1),
        (3, 0, O(Odd4::H0), two_i, -1, -3),
        (3, 2, O(Odd4::Hm1), half_i, -1, -1),
        (3, 4, O(Odd4::Fm1), two_i, -1, 1),
        (4, 1, O(Odd4::H0), two_i, -2, -3),
        (4, 3, O(Odd4::Fm1), two_i, -2, -1),
    ];
    let mut m = OperatorValuedMatrix::zeros(Spin::TWO, Some(tau));
    for &(r, c, family, factor, offset, shift) in layout {
        let term = LadderMonomial::new(label4(family), offset, shift, move |x| {
            factor
                * match family {
                    Family4::Even(f) => f.eval(x, tau, variant),
                    Family4::Odd(f) => f.eval(x, tau, variant),
                }
        });
        m.push(r, c, term);
    }
    m
}

/// Closed-form `e^{−iτB_j}`; the scalar `j = 0` block is the identity.
pub fn block_propagator(j: Spin, tau: f64, variant: FormulaVariant) -> Result<OperatorValuedMatrix> {
    Ok(match j.twice() {
        0 => {
            let mut m = OperatorValuedMatrix::zeros(Spin::ZERO, Some(tau));
            m.push(0, 0, LadderMonomial::constant(C64::from(1.0)));
            m
        }
        1 => propagator_b_half(tau),
        2 => propagator_b_one(tau),
        3 => propagator_b_three_half(tau),
        4 => propagator_b_two_with(tau, variant),
        other => return Err(Error::UnsupportedSpin(other)),
    })
}
