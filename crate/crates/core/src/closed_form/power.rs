//! Closed formulas for powers of `B_1` and `B_{3/2}`.

use num_complex::Complex64 as C64;

use super::spectral::PowerCoefficients;
use super::{LadderMonomial, OperatorValuedMatrix};
use crate::decomposition::{spin_block, Spin};
use crate::error::{Error, Result};

/// Diagonal of `D` in `B_1³ = D·B_1`, as a function of the output photon number.
fn b_one_d(row: usize, x: i64) -> f64 {
    2.0 * (2 * x + 3 - 2 * row as i64) as f64
}

fn b_one_power(p: u32) -> OperatorValuedMatrix {
    let mut m = OperatorValuedMatrix::zeros(Spin::ONE, None);
    if p == 0 {
        for r in 0..3 {
            m.push(r, r, LadderMonomial::constant(C64::from(1.0)));
        }
        return m;
    }
    let term = |row: usize, exp: i32, shift: i32, base: fn(i64) -> f64| {
        LadderMonomial::new("D^n", 0, shift, move |x| C64::from(base(x) * b_one_d(row, x).powi(exp)))
    };
    if p % 2 == 1 {
        let n = (p / 2) as i32;
        for (r, c, shift) in [(0, 1, 1), (1, 0, -1), (1, 2, 1), (2, 1, -1)] {
            m.push(r, c, term(r, n, shift, |_| 2f64.sqrt()));
        }
    } else {
        let n = (p / 2) as i32 - 1;
        m.push(0, 0, term(0, n, 0, |x| 2.0 * (x + 1) as f64));
        m.push(0, 2, term(0, n, 2, |_| 2.0));
        m.push(1, 1, term(1, n, 0, |x| 2.0 * (2 * x + 1) as f64));
        m.push(2, 0, term(2, n, -2, |_| 2.0));
        m.push(2, 2, term(2, n, 0, |x| 2.0 * x as f64));
    }
    m
}

fn b_three_half_power(p: u32) -> OperatorValuedMatrix {
    let mut m = OperatorValuedMatrix::zeros(Spin::THREE_HALVES, None);
    let n = p / 2;
    let r3 = 3f64.sqrt();
    type Pick = fn(&PowerCoefficients) -> f64;
    let mut put = |r: usize, c: usize, power: u32, pick: Pick, factor: f64, offset: i64, shift: i32| {
        m.push(
            r,
            c,
            LadderMonomial::new("power", offset, shift, move |x| C64::from(factor * pick(&PowerCoefficients::at(power, x)))),
        );
    };
    let alpha: Pick = |c| c.alpha;
    let beta: Pick = |c| c.beta;
    let gamma: Pick = |c| c.gamma;
    let delta: Pick = |c| c.delta;
    let xi: Pick = |c| c.xi;
    if p.is_multiple_of(2) {
        put(0, 0, n, alpha, 1.0, 2, 0);
        put(0, 2, n, xi, 2.0 * r3, 2, 2);
        put(1, 1, n, beta, 1.0, 1, 0);
        put(1, 3, n, xi, 2.0 * r3, 1, 2);
        put(2, 0, n, xi, 2.0 * r3, 0, -2);
        put(2, 2, n, gamma, 1.0, 0, 0);
        put(3, 1, n, xi, 2.0 * r3, -1, -2);
        put(3, 3, n, delta, 1.0, -1, 0);
    } else {
        put(0, 1, n, beta, r3, 2, 1);
        put(0, 3, n, xi, 6.0, 2, 3);
        put(1, 0, n, beta, r3, 1, -1);
        put(1, 2, n + 1, xi, 2.0, 1, 1);
        put(2, 1, n + 1, xi, 2.0, 0, -1);
        put(2, 3, n, gamma, r3, 0, 1);
        put(3, 0, n, xi, 6.0, -1, -3);
        put(3, 2, n, gamma, r3, -1, -1);
    }
    m
}

/// Closed-form `B_j^p` for `j ∈ {1, 3/2}`.
pub fn power_matrix(j: Spin, p: u32) -> Result<OperatorValuedMatrix> {
    match j {
        Spin::ONE => Ok(b_one_power(p)),
        Spin::THREE_HALVES => Ok(b_three_half_power(p)),
        other => Err(Error::UnsupportedSpin(other.twice())),
    }
}

/// Builds `B_j^p` by direct matrix power and by the closed formula and
/// returns their max deviation over columns whose excitation sector fits
/// under `nmax`, relative to `max(1, ‖B_j^p‖_max)` on those columns.
pub fn b_power_check(j: Spin, p: u32, nmax: usize) -> Result<f64> {
    if p > 7 {
        return Err(Error::InvalidParameter(format!("power {p} exceeds 7")));
    }
    if nmax < p as usize + 2 {
        return Err(Error::InvalidParameter(format!("nmax {nmax} must be at least p + 2 = {}", p + 2)));
    }
    let closed = power_matrix(j, p)?.materialize(nmax);
    let direct = spin_block(j, nmax)?.pow(p);
    let field = nmax + 1;
    let top = j.twice() as usize;
    let cols: Vec<usize> = (0..j.dim())
        .flat_map(|r| (0..field).filter(move |&m| top - r + m <= nmax).map(move |m| r * field + m))
        .collect();
    let mut worst = 0.0f64;
    let mut scale = 1.0f64;
    for &c in &cols {
        for r in 0..direct.nrows() {
            worst = worst.max((closed[(r, c)] - direct[(r, c)]).norm());
            scale = scale.max(direct[(r, c)].norm());
        }
    }
    Ok(worst / scale)
}
