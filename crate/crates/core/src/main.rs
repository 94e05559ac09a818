use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cqe::runner::{
    emit, exit, exit_code, run_delta_study, run_fci, run_scan, run_solve, DeltaConfig, FciConfig, OutputFormat, RunSpec,
    ScanManifest,
};
use cqe::{Combo, CqeError, GradientMode, MeasurementConfig, OccupationSpec, SolverConfig};

#[derive(Parser)]
#[command(name = "cqe", version, about = "Variance-based contracted quantum eigensolver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lowest eigenpairs of one (N_alpha, N_beta) sector by dense diagonalization.
    Fci {
        #[arg(long)]
        fcidump: PathBuf,
        #[arg(long)]
        n_alpha: usize,
        #[arg(long)]
        n_beta: usize,
        /// Number of levels to list.
        #[arg(long, default_value_t = 10)]
        states: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Minimize the energy variance from one initial guess.
    Solve {
        #[arg(long)]
        fcidump: PathBuf,
        #[command(flatten)]
        occupation: OccupationArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Solve several states over a set of geometries.
    Scan {
        /// Geometries, each solved with every `--state`.
        #[arg(long, required_unless_present = "manifest")]
        fcidump: Vec<PathBuf>,
        /// Guess as `ALPHA/BETA[:singlet|:triplet]`, e.g. `0,1/0,2:triplet`.
        #[arg(long = "state", value_parser = parse_state, required_unless_present = "manifest")]
        states: Vec<OccupationSpec>,
        /// JSON file listing geometries with per-geometry guesses.
        #[arg(long, conflicts_with_all = ["fcidump", "states"])]
        manifest: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Emulated against exact variance of the initial guess over a delta ladder.
    DeltaStudy {
        #[arg(long)]
        fcidump: PathBuf,
        #[command(flatten)]
        occupation: OccupationArgs,
        #[arg(long = "delta", default_values_t = [0.2, 0.1, 0.05, 0.025, 0.0125])]
        deltas: Vec<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args)]
struct OccupationArgs {
    /// Occupied alpha orbitals, 0-based, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    alpha: Vec<usize>,
    /// Occupied beta orbitals, 0-based, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    beta: Vec<usize>,
    /// Pair the determinant with its spin-flipped partner.
    #[arg(long)]
    combo: Option<ComboArg>,
}

impl OccupationArgs {
    fn spec(&self) -> OccupationSpec {
        OccupationSpec { alpha: self.alpha.clone(), beta: self.beta.clone(), combo: self.combo.map(Combo::from) }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ComboArg {
    Singlet,
    Triplet,
}

impl From<ComboArg> for Combo {
    fn from(c: ComboArg) -> Self {
        match c {
            ComboArg::Singlet => Combo::Singlet,
            ComboArg::Triplet => Combo::Triplet,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GradientArg {
    Exact,
    Emulated,
}

#[derive(Args)]
struct SolverArgs {
    /// Variance convergence threshold.
    #[arg(long, default_value_t = SolverConfig::default().epsilon)]
    tol: f64,
    #[arg(long, default_value_t = SolverConfig::default().max_iterations)]
    max_iter: usize,
    /// Largest rotation norm per line search.
    #[arg(long, default_value_t = SolverConfig::default().alpha_max)]
    alpha_max: f64,
    #[arg(long, default_value_t = SolverConfig::default().line_search_tol)]
    line_search_tol: f64,
    #[arg(long, value_enum, default_value_t = GradientArg::Exact)]
    gradient: GradientArg,
    /// Delta ladder for the emulated measurement, largest first.
    #[arg(long = "delta")]
    deltas: Vec<f64>,
    /// Ladder entries used in the extrapolation; defaults to all.
    #[arg(long)]
    richardson_levels: Option<usize>,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        let gradient_mode = match self.gradient {
            GradientArg::Exact => GradientMode::Exact,
            GradientArg::Emulated => {
                let mut m = MeasurementConfig::default();
                if !self.deltas.is_empty() {
                    m.deltas = self.deltas.clone();
                }
                m.richardson_levels = self.richardson_levels.unwrap_or(m.deltas.len());
                GradientMode::Emulated(m)
            }
        };
        SolverConfig {
            epsilon: self.tol,
            max_iterations: self.max_iter,
            alpha_max: self.alpha_max,
            line_search_tol: self.line_search_tol,
            gradient_mode,
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

impl OutputArgs {
    fn format(&self) -> OutputFormat {
        match self.format {
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Csv => OutputFormat::Csv,
        }
    }

    fn path(&self) -> Option<&Path> {
        self.out.as_deref()
    }
}

fn parse_list(text: &str) -> Result<Vec<usize>, String> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',').map(|s| s.trim().parse::<usize>().map_err(|e| format!("bad orbital index {s:?}: {e}"))).collect()
}

fn parse_state(text: &str) -> Result<OccupationSpec, String> {
    let (occ, combo) = match text.split_once(':') {
        Some((occ, "singlet")) => (occ, Some(Combo::Singlet)),
        Some((occ, "triplet")) => (occ, Some(Combo::Triplet)),
        Some((_, other)) => return Err(format!("unknown combination {other:?}")),
        None => (text, None),
    };
    let (alpha, beta) = occ.split_once('/').ok_or_else(|| format!("expected ALPHA/BETA, got {text:?}"))?;
    Ok(OccupationSpec { alpha: parse_list(alpha)?, beta: parse_list(beta)?, combo })
}

fn run(command: Command) -> Result<i32, CqeError> {
    match command {
        Command::Fci { fcidump, n_alpha, n_beta, states, output } => {
            let doc = run_fci(&FciConfig { fcidump, n_alpha, n_beta, states })?;
            emit(&doc, output.format(), output.path())?;
            Ok(exit::SUCCESS)
        }
        Command::Solve { fcidump, occupation, solver, output } => {
            let doc = run_solve(&RunSpec { fcidump, occupation: occupation.spec(), solver: solver.config() })?;
            emit(&doc, output.format(), output.path())?;
            Ok(if doc.converged() { exit::SUCCESS } else { exit::NOT_CONVERGED })
        }
        Command::Scan { fcidump, states, manifest, solver, output } => {
            let manifest = match manifest {
                Some(path) => ScanManifest::from_file(&path)?,
                None => ScanManifest::from_template(&fcidump, &states),
            };
            let doc = run_scan(&manifest, &solver.config())?;
            emit(&doc, output.format(), output.path())?;
            Ok(if doc.all_converged() { exit::SUCCESS } else { exit::NOT_CONVERGED })
        }
        Command::DeltaStudy { fcidump, occupation, deltas, output } => {
            let doc = run_delta_study(&DeltaConfig { fcidump, occupation: occupation.spec(), deltas })?;
            emit(&doc, output.format(), output.path())?;
            Ok(exit::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = run(cli.command).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        exit_code(&e)
    });
    ExitCode::from(code as u8)
}
