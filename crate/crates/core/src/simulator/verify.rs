use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::closed_form::{b_power_check, Propagator};
use crate::decomposition::{block_diagonalize, Spin, SpinDecomposition};
use crate::error::Result;
use crate::operators::{
    collective_spin, commutator, excitation_operator, interaction_a, masked_max_abs, max_abs, Basis,
};
use crate::oracle::{contained_deviation, oracle_propagator};

const BLOCK_THRESHOLD: f64 = 1e-13;
const POWER_THRESHOLD: f64 = 1e-12;
const MAX_POWER: u32 = 7;

/// Perturbs one entry of the atomic transform before any check runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Corruption {
    pub n_atoms: usize,
    pub row: usize,
    pub col: usize,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifySettings {
    pub atoms: Vec<usize>,
    pub taus: Vec<f64>,
    pub nmax: usize,
    /// Threshold for the oracle and unitarity checks.
    pub tol: f64,
    pub corrupt: Option<Corruption>,
}

impl Default for VerifySettings {
    fn default() -> Self {
        Self { atoms: vec![1, 2, 3, 4], taus: vec![0.1, 1.0, 5.0], nmax: 16, tol: 1e-10, corrupt: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check: String,
    pub n_atoms: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    pub deviation: f64,
    pub threshold: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub nmax: usize,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn check(name: &str, n_atoms: usize, tau: Option<f64>, deviation: f64, threshold: f64, detail: Option<String>) -> CheckResult {
    CheckResult {
        check: name.into(),
        n_atoms,
        tau,
        deviation,
        threshold,
        // NaN deviations must fail
        passed: deviation <= threshold,
        detail,
    }
}

fn decomposition_for(n: usize, corrupt: Option<Corruption>) -> Result<SpinDecomposition> {
    let mut dec = SpinDecomposition::new(n)?;
    if let Some(c) = corrupt.filter(|c| c.n_atoms == n) {
        let dim = dec.transform.nrows();
        if c.row >= dim || c.col >= dim {
            return Err(crate::Error::DimensionMismatch { expected: dim, actual: c.row.max(c.col) });
        }
        dec.transform[(c.row, c.col)] += C64::from(c.delta);
    }
    Ok(dec)
}

fn checks_for(n: usize, s: &VerifySettings) -> Result<Vec<CheckResult>> {
    let nmax = s.nmax;
    let dec = decomposition_for(n, s.corrupt)?;
    let propagator = Propagator::new(n, nmax)?.with_decomposition(dec.clone())?;
    let basis = Basis::new(n, nmax)?;
    let mask = basis.contained_indices();
    let mut out = Vec::new();

    for &tau in &s.taus {
        let closed = propagator.interaction(tau)?;
        let dev = contained_deviation(&basis, &closed, &oracle_propagator(n, tau, 1.0, nmax)?);
        out.push(check("oracle", n, Some(tau), dev.max_dev, s.tol, Some(dev.describe(n))));

        let full = propagator.full(1.0, 1.0, tau)?;
        let defect = full.adjoint() * &full - DMatrix::<C64>::identity(basis.dim(), basis.dim());
        out.push(check("unitarity", n, Some(tau), masked_max_abs(&defect, &mask, &mask), s.tol, None));
    }

    let spin = collective_spin(n)?;
    let su2 = max_abs(&(commutator(&spin.plus, &spin.minus) - &spin.three * C64::from(2.0)))
        .max(max_abs(&(commutator(&spin.three, &spin.plus) - &spin.plus)))
        .max(max_abs(&(commutator(&spin.three, &spin.minus) + &spin.minus)));
    out.push(check("su2", n, None, su2, 0.0, None));

    let a = interaction_a(n, nmax)?;
    let e = excitation_operator(n, nmax)?;
    out.push(check("excitation_commutator", n, None, masked_max_abs(&commutator(&a, &e), &mask, &mask), BLOCK_THRESHOLD, None));

    if n >= 2 {
        let bd = block_diagonalize(&a, &dec, nmax)?;
        let errors = bd.block_errors(&dec, nmax)?;
        let (worst, dev) = bd
            .block_residuals
            .iter()
            .zip(&errors)
            .map(|(r, e)| r.max(*e))
            .enumerate()
            .fold((0, 0.0f64), |acc, (k, v)| if v > acc.1 { (k, v) } else { acc });
        let detail = format!("worst block {worst} (spin {})", dec.blocks[worst].spin);
        out.push(check("block_diagonal", n, None, dev, BLOCK_THRESHOLD, Some(detail)));
    }

    let top_power = MAX_POWER.min(nmax.saturating_sub(2) as u32);
    let mut spins: Vec<Spin> = dec.spins().into_iter().filter(|j| *j == Spin::ONE || *j == Spin::THREE_HALVES).collect();
    spins.dedup();
    for j in spins {
        let mut worst = 0.0f64;
        for p in 0..=top_power {
            worst = worst.max(b_power_check(j, p, nmax)?);
        }
        out.push(check("power", n, None, worst, POWER_THRESHOLD, Some(format!("spin {j}, powers 0..={top_power}"))));
    }
    Ok(out)
}

/// Runs the oracle comparison and invariant checks. Failures are report
/// content; `Err` only signals unusable settings.
pub fn verify(settings: &VerifySettings) -> Result<VerifyReport> {
    let mut checks = Vec::new();
    for &n in &settings.atoms {
        checks.extend(checks_for(n, settings)?);
    }
    Ok(VerifyReport { passed: checks.iter().all(|c| c.passed), nmax: settings.nmax, checks })
}
