use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::Basis;

/// Largest admissible weight outside the photon cutoff for a coherent field.
pub const TAIL_LIMIT: f64 = 1e-10;

/// Initial state of the cavity mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FieldSpec {
    Fock(usize),
    Coherent(f64),
}

impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("field must be fock:<m> or coherent:<alpha>, got {s:?}"));
        let (kind, value) = s.trim().split_once(':').ok_or_else(bad)?;
        match kind.trim().to_ascii_lowercase().as_str() {
            "fock" => value.trim().parse().map(FieldSpec::Fock).map_err(|_| bad()),
            "coherent" => {
                let alpha: f64 = value.trim().parse().map_err(|_| bad())?;
                if !alpha.is_finite() || alpha < 0.0 {
                    return Err(Error::InvalidParameter(format!("coherent amplitude must be real and >= 0, got {alpha}")));
                }
                Ok(FieldSpec::Coherent(alpha))
            }
            _ => Err(bad()),
        }
    }
}

impl TryFrom<String> for FieldSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Fock(m) => write!(f, "fock:{m}"),
            FieldSpec::Coherent(a) => write!(f, "coherent:{a}"),
        }
    }
}

impl From<FieldSpec> for String {
    fn from(f: FieldSpec) -> String {
        f.to_string()
    }
}

impl FieldSpec {
    /// `|c_m|²` for every `m` up to the point where the remaining weight is
    /// negligible, or up to `nmax` if that is further.
    fn weights(self, nmax: usize) -> Vec<f64> {
        match self {
            FieldSpec::Fock(k) => (0..=nmax.max(k)).map(|m| if m == k { 1.0 } else { 0.0 }).collect(),
            FieldSpec::Coherent(alpha) => {
                let mean = alpha * alpha;
                let mut out = Vec::new();
                let mut log_c = -mean / 2.0;
                let mut total = 0.0;
                for m in 0usize.. {
                    if m > 0 {
                        log_c += alpha.ln() - 0.5 * (m as f64).ln();
                    }
                    // α = 0 gives ln 0 = −∞ and exp(−∞) = 0 past the vacuum
                    let w = if alpha == 0.0 && m > 0 { 0.0 } else { (2.0 * log_c).exp() };
                    out.push(w);
                    total += w;
                    if m >= nmax && (m as f64) > mean && w <= total * 1e-20 {
                        break;
                    }
                }
                out
            }
        }
    }

    /// Photon-number amplitudes `c_0..c_nmax`, not renormalised.
    pub fn amplitudes(self, nmax: usize) -> Vec<f64> {
        self.weights(nmax).iter().take(nmax + 1).map(|w| w.sqrt()).collect()
    }

    /// `Σ_{m>nmax} |c_m|²`.
    pub fn tail(self, nmax: usize) -> f64 {
        self.weights(nmax).iter().skip(nmax + 1).sum()
    }

    /// Smallest cutoff whose tail is below [`TAIL_LIMIT`].
    pub fn required_nmax(self) -> usize {
        (0..).find(|&n| self.tail(n) < TAIL_LIMIT).unwrap()
    }
}

/// Product initial state: an atomic bitstring over `{u, d}` and a field state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialSpec {
    pub atoms: String,
    pub field: FieldSpec,
}

impl Default for InitialSpec {
    fn default() -> Self {
        Self { atoms: "u".into(), field: FieldSpec::Fock(0) }
    }
}

impl FromStr for InitialSpec {
    type Err = Error;

    /// Parses `atoms=<bits>,field=<field>`.
    fn from_str(s: &str) -> Result<Self> {
        let mut atoms = None;
        let mut field = None;
        for part in s.split(',') {
            match part.split_once('=') {
                Some(("atoms", v)) => atoms = Some(v.trim().to_string()),
                Some(("field", v)) => field = Some(v.parse()?),
                _ => return Err(Error::InvalidParameter(format!("unrecognised initial-state item {part:?}"))),
            }
        }
        match (atoms, field) {
            (Some(atoms), Some(field)) => Ok(Self { atoms, field }),
            _ => Err(Error::InvalidParameter("initial state needs both atoms= and field=".into())),
        }
    }
}

/// Atomic basis index of a `{u, d}` bitstring, first character on the most
/// significant bit and `u` encoded as 0.
pub fn atomic_index(bits: &str, n_atoms: usize) -> Result<usize> {
    let bad = || Error::BadBitstring { spec: bits.to_string(), n_atoms };
    if bits.chars().count() != n_atoms {
        return Err(bad());
    }
    bits.chars().try_fold(0usize, |acc, c| match c {
        'u' => Ok(acc << 1),
        'd' => Ok((acc << 1) | 1),
        _ => Err(bad()),
    })
}

/// Inverse of [`atomic_index`].
pub fn atomic_label(index: usize, n_atoms: usize) -> String {
    (0..n_atoms).rev().map(|k| if index >> k & 1 == 0 { 'u' } else { 'd' }).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    pub basis: Basis,
    pub amplitudes: DVector<C64>,
}

impl QuantumState {
    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    fn weights(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.amplitudes.iter().enumerate().map(|(i, z)| (i, z.norm_sqr()))
    }

    /// `⟨S₃⟩`.
    pub fn inversion(&self) -> f64 {
        let half = self.basis.n_atoms as f64 / 2.0;
        self.weights()
            .map(|(i, w)| w * (self.basis.excited_count(self.basis.split(i).0) as f64 - half))
            .sum()
    }

    /// `⟨a†a⟩`.
    pub fn mean_photons(&self) -> f64 {
        self.weights().map(|(i, w)| w * self.basis.split(i).1 as f64).sum()
    }

    /// `⟨E⟩ = ⟨S₃⟩ + ⟨N⟩`.
    pub fn mean_excitation(&self) -> f64 {
        let half = self.basis.n_atoms as f64 / 2.0;
        self.weights().map(|(i, w)| w * (self.basis.excitation(i) as f64 - half)).sum()
    }

    /// Probability of each atomic basis state, field traced out.
    pub fn populations(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.basis.atomic_dim()];
        for (i, w) in self.weights() {
            out[self.basis.split(i).0] += w;
        }
        out
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &QuantumState) -> f64 {
        self.amplitudes.dotc(&other.amplitudes).norm_sqr()
    }
}

/// Normalised product state on `n_atoms` atoms and a field truncated at `nmax`.
pub fn build_initial_state(spec: &InitialSpec, n_atoms: usize, nmax: usize) -> Result<QuantumState> {
    let basis = Basis::new(n_atoms, nmax)?;
    let atomic = atomic_index(&spec.atoms, n_atoms)?;
    let tail = spec.field.tail(nmax);
    if let FieldSpec::Fock(m) = spec.field {
        if m > nmax {
            return Err(Error::InvalidParameter(format!("fock:{m} exceeds the photon cutoff {nmax}")));
        }
    } else if tail >= TAIL_LIMIT {
        return Err(Error::TruncationTail { nmax, tail });
    }
    let field = spec.field.amplitudes(nmax);
    let scale = field.iter().map(|c| c * c).sum::<f64>().sqrt();
    let mut amplitudes = DVector::zeros(basis.dim());
    for (m, c) in field.iter().enumerate() {
        amplitudes[basis.index(atomic, m)] = C64::from(c / scale);
    }
    Ok(QuantumState { basis, amplitudes })
}
