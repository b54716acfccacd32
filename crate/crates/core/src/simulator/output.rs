use std::io::Write;

use serde::{Deserialize, Serialize};

use super::TimeSeriesRecord;

/// Records of one evolve run together with the cutoffs that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub n_atoms: usize,
    /// Photon cutoff of the initial state, after any automatic raise.
    pub nmax: usize,
    /// Photon cutoff of the space the state was evolved in.
    pub cutoff: usize,
    /// Bitstring of each atomic level, in `pop_k` order.
    pub levels: Vec<String>,
    pub records: Vec<TimeSeriesRecord>,
}

pub fn write_csv<W: Write>(trajectory: &Trajectory, mut out: W) -> std::io::Result<()> {
    let pops: Vec<String> = (0..trajectory.levels.len()).map(|k| format!("pop_{k}")).collect();
    writeln!(out, "t,S3,N,{},norm_deficit", pops.join(","))?;
    for r in &trajectory.records {
        write!(out, "{},{},{}", r.t, r.s3, r.n)?;
        for p in &r.populations {
            write!(out, ",{p}")?;
        }
        writeln!(out, ",{}", r.norm_deficit)?;
    }
    Ok(())
}

pub fn write_json<W: Write>(trajectory: &Trajectory, mut out: W) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut out, trajectory)?;
    writeln!(out)
}
