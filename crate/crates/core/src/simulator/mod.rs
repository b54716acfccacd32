//! Time-series simulation on top of the closed-form propagator.

mod output;
mod state;
mod verify;

pub use output::{write_csv, write_json, Trajectory};
pub use state::{atomic_index, atomic_label, build_initial_state, FieldSpec, InitialSpec, QuantumState, TAIL_LIMIT};
pub use verify::{verify, CheckResult, Corruption, VerifyReport, VerifySettings};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_form::Propagator;
use crate::error::{Error, Result};
use crate::operators::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeUnits {
    #[default]
    Absolute,
    /// Grid values are multiples of `1/g`.
    InverseG,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TimeGrid {
    pub start: f64,
    pub end: f64,
    pub dt: f64,
    pub units: TimeUnits,
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self { start: 0.0, end: 10.0, dt: 0.1, units: TimeUnits::Absolute }
    }
}

impl TimeGrid {
    pub fn validate(&self) -> Result<()> {
        if !self.dt.is_finite() || self.dt <= 0.0 {
            return Err(Error::InvalidParameter(format!("dt must be > 0, got {}", self.dt)));
        }
        if !self.start.is_finite() || !self.end.is_finite() || self.end < self.start {
            return Err(Error::InvalidParameter(format!("need start <= end, got {}..{}", self.start, self.end)));
        }
        Ok(())
    }

    /// Parses `start:end:dt`.
    pub fn parse(s: &str, units: TimeUnits) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::InvalidParameter(format!("time grid must be start:end:dt, got {s:?}"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let v: Vec<f64> = parts.iter().map(|p| p.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?;
        let grid = Self { start: v[0], end: v[1], dt: v[2], units };
        grid.validate()?;
        Ok(grid)
    }

    /// Sample times in absolute units. The end point is included when it
    /// lies on the grid up to rounding.
    pub fn times(&self, g: f64) -> Result<Vec<f64>> {
        self.validate()?;
        let scale = match self.units {
            TimeUnits::Absolute => 1.0,
            TimeUnits::InverseG if g != 0.0 => 1.0 / g.abs(),
            TimeUnits::InverseG => {
                return Err(Error::InvalidParameter("time units of 1/g need g != 0".into()));
            }
        };
        let steps = ((self.end - self.start) / self.dt + 1e-9).floor() as usize;
        Ok((0..=steps).map(|k| (self.start + k as f64 * self.dt) * scale).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Evolve,
    Verify,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub model: ModelParams,
    pub time: TimeGrid,
    pub initial: InitialSpec,
    pub format: OutputFormat,
    pub mode: Mode,
    /// Raise `nmax` instead of failing when a coherent field does not fit.
    pub auto_nmax: bool,
    pub verify: VerifySettings,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            model: ModelParams::resonant(1, 1.0, 1.0, 20),
            time: TimeGrid::default(),
            initial: InitialSpec::default(),
            format: OutputFormat::Csv,
            mode: Mode::Evolve,
            auto_nmax: false,
            verify: VerifySettings::default(),
        }
    }
}

impl SimConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidParameter(format!("config: {e}")))
    }
}

/// Photon cutoff used internally for a user cutoff `nmax`: large enough that
/// every excitation sector touched by a state with at most `nmax` photons is
/// represented without truncation.
pub fn simulation_cutoff(n_atoms: usize, nmax: usize) -> usize {
    nmax + n_atoms
}

/// Initial state and propagator for one evolve run.
#[derive(Debug, Clone)]
pub struct Run {
    pub params: ModelParams,
    pub times: Vec<f64>,
    pub initial: QuantumState,
    propagator: Propagator,
}

impl Run {
    pub fn prepare(config: &SimConfig) -> Result<Self> {
        let mut params = config.model;
        params.validate()?;
        if !params.is_resonant() {
            return Err(Error::OffResonance { delta: params.delta, omega: params.omega });
        }
        let times = config.time.times(params.g)?;
        let field = config.initial.field;
        if let FieldSpec::Coherent(_) = field {
            let tail = field.tail(params.nmax);
            if tail >= TAIL_LIMIT {
                if !config.auto_nmax {
                    return Err(Error::TruncationTail { nmax: params.nmax, tail });
                }
                params.nmax = field.required_nmax();
            }
        }
        let seed = build_initial_state(&config.initial, params.n_atoms, params.nmax)?;
        let cutoff = simulation_cutoff(params.n_atoms, params.nmax);
        let propagator = Propagator::new(params.n_atoms, cutoff)?;
        let mut amplitudes = nalgebra::DVector::zeros(propagator.basis.dim());
        for (i, z) in seed.amplitudes.iter().enumerate() {
            let (a, m) = seed.basis.split(i);
            amplitudes[propagator.basis.index(a, m)] = *z;
        }
        let initial = QuantumState { basis: propagator.basis, amplitudes };
        Ok(Self { params, times, initial, propagator })
    }

    pub fn cutoff(&self) -> usize {
        self.propagator.basis.nmax
    }

    /// State at absolute time `t`, from one application of the closed form.
    pub fn state_at(&self, t: f64) -> Result<QuantumState> {
        let amplitudes = self.propagator.apply_full(self.params.omega, self.params.g, t, &self.initial.amplitudes)?;
        Ok(QuantumState { basis: self.propagator.basis, amplitudes })
    }

    pub fn records(&self) -> Result<Vec<TimeSeriesRecord>> {
        self.times.par_iter().map(|&t| Ok(TimeSeriesRecord::observe(t, &self.state_at(t)?))).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesRecord {
    pub t: f64,
    #[serde(rename = "S3")]
    pub s3: f64,
    #[serde(rename = "N")]
    pub n: f64,
    pub populations: Vec<f64>,
    pub norm_deficit: f64,
}

impl TimeSeriesRecord {
    pub fn observe(t: f64, state: &QuantumState) -> Self {
        Self {
            t,
            s3: state.inversion(),
            n: state.mean_photons(),
            populations: state.populations(),
            norm_deficit: (1.0 - state.norm()).abs(),
        }
    }

    pub fn excitation(&self) -> f64 {
        self.s3 + self.n
    }
}

pub fn evolve(config: &SimConfig) -> Result<Trajectory> {
    let run = Run::prepare(config)?;
    Ok(Trajectory {
        n_atoms: run.params.n_atoms,
        nmax: run.params.nmax,
        cutoff: run.cutoff(),
        levels: (0..1usize << run.params.n_atoms).map(|k| atomic_label(k, run.params.n_atoms)).collect(),
        records: run.records()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(n: usize, atoms: &str, field: FieldSpec, g: f64, nmax: usize) -> SimConfig {
        SimConfig {
            model: ModelParams::resonant(n, 1.0, g, nmax),
            time: TimeGrid { start: 0.0, end: 4.0, dt: 0.25, units: TimeUnits::Absolute },
            initial: InitialSpec { atoms: atoms.into(), field },
            ..SimConfig::default()
        }
    }

    #[test]
    fn grid_points() {
        let g = TimeGrid::parse("0:1:0.1", TimeUnits::Absolute).unwrap();
        let t = g.times(2.0).unwrap();
        assert_eq!(t.len(), 11);
        assert!((t[10] - 1.0).abs() < 1e-15);
        let g = TimeGrid::parse("0:2:1", TimeUnits::InverseG).unwrap();
        assert_eq!(g.times(4.0).unwrap(), vec![0.0, 0.25, 0.5]);
        assert!(g.times(0.0).is_err());
        assert!(TimeGrid::parse("0:1:0", TimeUnits::Absolute).is_err());
        assert!(TimeGrid::parse("2:1:0.1", TimeUnits::Absolute).is_err());
        assert!(TimeGrid::parse("0:1", TimeUnits::Absolute).is_err());
    }

    #[test]
    fn vacuum_rabi() {
        let g = 0.8;
        let tr = evolve(&config(1, "u", FieldSpec::Fock(0), g, 3)).unwrap();
        for r in &tr.records {
            assert!((r.s3 - 0.5 * (2.0 * g * r.t).cos()).abs() < 1e-12, "t={}", r.t);
        }
    }

    #[test]
    fn no_coupling_freezes_inversion() {
        let tr = evolve(&config(3, "udu", FieldSpec::Coherent(1.0), 0.0, 30)).unwrap();
        for r in &tr.records {
            assert!((r.s3 - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn populations_sum_to_one() {
        let tr = evolve(&config(4, "uddu", FieldSpec::Coherent(1.5), 1.0, 30)).unwrap();
        assert_eq!(tr.levels.len(), 16);
        for r in &tr.records {
            assert!((r.populations.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            assert!(r.norm_deficit < 1e-10);
        }
    }

    #[test]
    fn off_resonance_and_tail_errors() {
        let mut c = config(1, "u", FieldSpec::Fock(0), 1.0, 3);
        c.model.delta = 2.0;
        assert!(matches!(evolve(&c), Err(Error::OffResonance { .. })));
        let c = config(1, "u", FieldSpec::Coherent(3.0), 1.0, 10);
        assert!(matches!(evolve(&c), Err(Error::TruncationTail { .. })));
        let mut c = c;
        c.auto_nmax = true;
        let tr = evolve(&c).unwrap();
        assert!(tr.nmax > 10 && FieldSpec::Coherent(3.0).tail(tr.nmax) < TAIL_LIMIT);
        assert!(evolve(&config(2, "u", FieldSpec::Fock(0), 1.0, 3)).is_err());
    }

    #[test]
    fn config_round_trip() {
        let c = config(2, "ud", FieldSpec::Coherent(2.0), 0.5, 40);
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains("\"coherent:2\""));
        assert_eq!(SimConfig::from_json(&text).unwrap(), c);
        let partial = SimConfig::from_json(r#"{"initial": {"atoms": "d", "field": "fock:2"}}"#).unwrap();
        assert_eq!(partial.initial.field, FieldSpec::Fock(2));
        assert_eq!(partial.time, TimeGrid::default());
        assert!(SimConfig::from_json(r#"{"initial": {"atoms": "d", "field": "fock"}}"#).is_err());
    }
}
