use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tc_core::simulator::{
    evolve, verify, write_csv, write_json, Corruption, InitialSpec, Mode, OutputFormat, SimConfig, TimeGrid, TimeUnits,
};

const EXIT_CONFIG: u8 = 1;
const EXIT_VERIFY: u8 = 2;

#[derive(Parser)]
#[command(name = "tc", version, about = "Closed-form Tavis-Cummings evolution for one to four atoms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve an initial product state and write observables over a time grid
    Evolve(EvolveArgs),
    /// Compare the closed form with the exact oracle and run invariant checks
    Verify(VerifyArgs),
    /// Run whatever mode a config file asks for
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Units {
    Absolute,
    InverseG,
}

#[derive(Args)]
struct EvolveArgs {
    /// JSON config; flags given on the command line override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    atoms: Option<usize>,
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    /// Atomic detuning, defaults to omega (resonance)
    #[arg(long)]
    delta: Option<f64>,
    /// start:end:dt
    #[arg(long = "t")]
    time: Option<String>,
    #[arg(long, value_enum)]
    units: Option<Units>,
    /// atoms=<[ud]{n}>,field=<fock:m|coherent:a>
    #[arg(long)]
    init: Option<String>,
    #[arg(long)]
    nmax: Option<usize>,
    /// Raise nmax until the coherent tail fits instead of failing
    #[arg(long)]
    auto_nmax: bool,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file, stdout if omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Atom counts to check, comma separated
    #[arg(long, value_delimiter = ',')]
    atoms: Option<Vec<usize>>,
    /// Values of t·g, comma separated
    #[arg(long, value_delimiter = ',')]
    tau: Option<Vec<f64>>,
    #[arg(long)]
    nmax: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// Only json is supported
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Add a fault to one transform entry: atoms:row:col:delta
    #[arg(long)]
    corrupt_t: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure modes mapped onto exit codes.
enum Failure {
    Config(String),
    Verification,
}

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Config(e.to_string())
    }
}

fn load_config(path: Option<&Path>) -> Result<SimConfig, Failure> {
    match path {
        None => Ok(SimConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?;
            Ok(SimConfig::from_json(&text)?)
        }
    }
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn apply_evolve_flags(mut c: SimConfig, a: &EvolveArgs) -> Result<SimConfig, Failure> {
    if let Some(n) = a.atoms {
        c.model.n_atoms = n;
    }
    if let Some(g) = a.g {
        c.model.g = g;
    }
    if let Some(w) = a.omega {
        c.model.omega = w;
        c.model.delta = w;
    }
    if let Some(d) = a.delta {
        c.model.delta = d;
    }
    if let Some(n) = a.nmax {
        c.model.nmax = n;
    }
    if let Some(u) = a.units {
        c.time.units = match u {
            Units::Absolute => TimeUnits::Absolute,
            Units::InverseG => TimeUnits::InverseG,
        };
    }
    if let Some(t) = &a.time {
        c.time = TimeGrid::parse(t, c.time.units)?;
    }
    if let Some(init) = &a.init {
        c.initial = init.parse::<InitialSpec>()?;
    }
    if let Some(f) = a.format {
        c.format = match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        };
    }
    c.auto_nmax |= a.auto_nmax;
    c.mode = Mode::Evolve;
    Ok(c)
}

fn parse_corruption(s: &str) -> Result<Corruption, Failure> {
    let bad = || Failure::Config(format!("--corrupt-t expects atoms:row:col:delta, got {s:?}"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 4 {
        return Err(bad());
    }
    let int = |p: &str| p.trim().parse::<usize>().map_err(|_| bad());
    Ok(Corruption {
        n_atoms: int(parts[0])?,
        row: int(parts[1])?,
        col: int(parts[2])?,
        delta: parts[3].trim().parse().map_err(|_| bad())?,
    })
}

fn apply_verify_flags(mut c: SimConfig, a: &VerifyArgs) -> Result<SimConfig, Failure> {
    if matches!(a.format, Format::Csv) {
        return Err(Failure::Config("verify reports are json only".into()));
    }
    let v = &mut c.verify;
    if let Some(atoms) = &a.atoms {
        v.atoms = atoms.clone();
    }
    if let Some(tau) = &a.tau {
        v.taus = tau.clone();
    }
    if let Some(n) = a.nmax {
        v.nmax = n;
    }
    if let Some(t) = a.tol {
        v.tol = t;
    }
    if let Some(s) = &a.corrupt_t {
        v.corrupt = Some(parse_corruption(s)?);
    }
    c.mode = Mode::Verify;
    Ok(c)
}

fn run_evolve(c: &SimConfig, out: Option<&Path>) -> Result<(), Failure> {
    let trajectory = evolve(c)?;
    if trajectory.nmax != c.model.nmax {
        eprintln!("nmax raised from {} to {} to fit the coherent field", c.model.nmax, trajectory.nmax);
    }
    let mut w = sink(out)?;
    match c.format {
        OutputFormat::Csv => write_csv(&trajectory, &mut w)?,
        OutputFormat::Json => write_json(&trajectory, &mut w)?,
    }
    w.flush()?;
    Ok(())
}

fn run_verify(c: &SimConfig, out: Option<&Path>) -> Result<(), Failure> {
    let report = verify(&c.verify)?;
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, &report)?;
    writeln!(w)?;
    w.flush()?;
    for f in report.failures() {
        eprintln!("FAIL {} n={} deviation {:.3e} > {:.1e}", f.check, f.n_atoms, f.deviation, f.threshold);
    }
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Evolve(a) => {
            let c = apply_evolve_flags(load_config(a.config.as_deref())?, &a)?;
            run_evolve(&c, a.out.as_deref())
        }
        Command::Verify(a) => {
            let c = apply_verify_flags(load_config(a.config.as_deref())?, &a)?;
            run_verify(&c, a.out.as_deref())
        }
        Command::Run { config, out } => {
            let c = load_config(Some(&config))?;
            match c.mode {
                Mode::Evolve => run_evolve(&c, out.as_deref()),
                Mode::Verify => run_verify(&c, out.as_deref()),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Verification) => ExitCode::from(EXIT_VERIFY),
    }
}
