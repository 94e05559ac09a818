//! Orchestration behind the command line: single solves, FCI listings, bond
//! scans and delta studies, each producing a self-describing document.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CqeError, Result};
use crate::fci::{diagonalize, identify_state, SpectrumResult, DEGENERACY_TOL, MAX_DENSE_DIM};
use crate::fock::SectorBasis;
use crate::hamiltonian::HamiltonianOperator;
use crate::integrals::MolecularIntegrals;
use crate::measurement::{delta_study, DeltaRow};
use crate::solver::{initial_state, solve, ConvergenceRecord, OccupationSpec, SolveOutcome, SolverConfig, Termination};
use crate::spin::spin_expectations;
use crate::state::StateVector;

/// Exit statuses of the command-line tool.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const PARSE: i32 = 2;
    pub const NOT_CONVERGED: i32 = 3;
    pub const IO: i32 = 4;
}

pub fn exit_code(err: &CqeError) -> i32 {
    match err {
        CqeError::Parse { .. } | CqeError::Manifest { .. } | CqeError::InvalidOccupation(_) | CqeError::InvalidConfig(_) => {
            exit::PARSE
        }
        CqeError::Io { .. } => exit::IO,
        CqeError::Stagnation { .. } => exit::NOT_CONVERGED,
        CqeError::DimensionTooLarge { .. } | CqeError::SeriesDiverged { .. } => exit::FAILURE,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Everything needed to reproduce one solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub fcidump: PathBuf,
    pub occupation: OccupationSpec,
    pub solver: SolverConfig,
}

impl RunSpec {
    pub fn sector(&self) -> (usize, usize) {
        (self.occupation.alpha.len(), self.occupation.beta.len())
    }
}

/// Hamiltonian of one sector, checked against the file's electron count.
pub fn load_hamiltonian(path: &Path, sector: (usize, usize)) -> Result<HamiltonianOperator> {
    let ints = Arc::new(MolecularIntegrals::from_fcidump_file(path)?);
    hamiltonian_for(ints, sector)
}

fn hamiltonian_for(ints: Arc<MolecularIntegrals>, (na, nb): (usize, usize)) -> Result<HamiltonianOperator> {
    let n = ints.n_spatial();
    if na + nb != ints.n_electrons() {
        return Err(CqeError::InvalidConfig(format!(
            "sector ({na}, {nb}) holds {} electrons but NELEC={}",
            na + nb,
            ints.n_electrons()
        )));
    }
    if na > n || nb > n {
        return Err(CqeError::InvalidConfig(format!("sector ({na}, {nb}) does not fit in {n} orbitals")));
    }
    Ok(HamiltonianOperator::new(ints, Arc::new(SectorBasis::new(n, na, nb))))
}

/// Dense spectrum when the sector is small enough, otherwise `None`.
fn reference_spectrum(ham: &HamiltonianOperator) -> Result<Option<SpectrumResult>> {
    if ham.dim() > MAX_DENSE_DIM {
        return Ok(None);
    }
    diagonalize(ham).map(Some)
}

/// Nearest FCI level by overlap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FciComparison {
    pub index: usize,
    /// Rank among distinct eigenvalues (degenerate partners share a rank).
    pub level: usize,
    pub eigenvalue: f64,
    pub overlap: f64,
    pub degeneracy: usize,
    pub energy_error: f64,
}

fn distinct_rank(values: &[f64], index: usize) -> usize {
    (1..=index).filter(|&k| values[k] - values[k - 1] >= DEGENERACY_TOL).count()
}

fn compare(psi: &StateVector, energy: f64, spectrum: &SpectrumResult) -> FciComparison {
    let id = identify_state(psi, spectrum);
    FciComparison {
        index: id.index,
        level: distinct_rank(&spectrum.eigenvalues, id.index),
        eigenvalue: id.eigenvalue,
        overlap: id.overlap,
        degeneracy: id.degeneracy,
        energy_error: (energy - id.eigenvalue).abs(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub converged: bool,
    pub termination: Termination,
    pub iterations: usize,
    pub n_alpha: usize,
    pub n_beta: usize,
    pub dimension: usize,
    pub energy: f64,
    pub variance: f64,
    pub exact_variance: f64,
    pub cse_norm: f64,
    pub gradient_norm: f64,
    pub sz: f64,
    pub s_squared: f64,
    pub multiplicity: u32,
    pub fci: Option<FciComparison>,
    pub initial: ConvergenceRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunDocument {
    pub config: RunSpec,
    pub summary: RunSummary,
    pub trace: Vec<ConvergenceRecord>,
}

impl RunDocument {
    pub fn converged(&self) -> bool {
        self.summary.converged
    }
}

fn summarize(ham: &HamiltonianOperator, outcome: &SolveOutcome, spectrum: Option<&SpectrumResult>) -> RunSummary {
    let last = outcome.last();
    let spin = spin_expectations(&outcome.state);
    let basis = ham.basis();
    RunSummary {
        converged: outcome.converged(),
        termination: outcome.termination,
        iterations: outcome.iterations(),
        n_alpha: basis.n_alpha(),
        n_beta: basis.n_beta(),
        dimension: basis.len(),
        energy: last.energy,
        variance: last.variance,
        exact_variance: last.exact_variance,
        cse_norm: last.cse_norm,
        gradient_norm: last.gradient_norm,
        sz: spin.sz,
        s_squared: spin.s_squared,
        multiplicity: spin.multiplicity(),
        fci: spectrum.map(|s| compare(&outcome.state, last.energy, s)),
        initial: outcome.initial.clone(),
    }
}

/// Solves one state and compares it with the dense spectrum of its sector.
pub fn run_solve(spec: &RunSpec) -> Result<RunDocument> {
    spec.solver.validate()?;
    let ham = load_hamiltonian(&spec.fcidump, spec.sector())?;
    let spectrum = reference_spectrum(&ham)?;
    let psi0 = initial_state(ham.basis(), &spec.occupation)?;
    let outcome = solve(&ham, &psi0, &spec.solver)?;
    let summary = summarize(&ham, &outcome, spectrum.as_ref());
    Ok(RunDocument { config: spec.clone(), summary, trace: outcome.trace })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FciLevel {
    pub index: usize,
    pub energy: f64,
    pub sz: f64,
    pub s_squared: f64,
    pub multiplicity: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FciConfig {
    pub fcidump: PathBuf,
    pub n_alpha: usize,
    pub n_beta: usize,
    pub states: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FciDocument {
    pub config: FciConfig,
    pub dimension: usize,
    pub levels: Vec<FciLevel>,
}

/// Lowest `config.states` eigenpairs of one sector with their spin.
pub fn run_fci(config: &FciConfig) -> Result<FciDocument> {
    let ham = load_hamiltonian(&config.fcidump, (config.n_alpha, config.n_beta))?;
    let spectrum = diagonalize(&ham)?;
    let levels = spectrum
        .eigenvalues
        .iter()
        .zip(&spectrum.eigenvectors)
        .take(config.states)
        .enumerate()
        .map(|(index, (&energy, v))| {
            let spin = spin_expectations(v);
            FciLevel { index, energy, sz: spin.sz, s_squared: spin.s_squared, multiplicity: spin.multiplicity() }
        })
        .collect();
    Ok(FciDocument { config: config.clone(), dimension: ham.dim(), levels })
}

/// Geometries and per-geometry initial guesses for a scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanManifest {
    /// Display label per targeted state.
    pub states: Vec<String>,
    pub points: Vec<ScanPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub label: String,
    pub fcidump: PathBuf,
    /// One guess per entry of `ScanManifest::states`.
    pub states: Vec<OccupationSpec>,
}

impl ScanManifest {
    /// The same guesses at every geometry, labelled by file stem.
    pub fn from_template(paths: &[PathBuf], states: &[OccupationSpec]) -> Self {
        let points = paths
            .iter()
            .map(|p| ScanPoint {
                label: p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
                fcidump: p.clone(),
                states: states.to_vec(),
            })
            .collect();
        Self { states: (0..states.len()).map(|k| format!("state {k}")).collect(), points }
    }

    /// Reads a JSON manifest; relative FCIDUMP paths resolve against the
    /// manifest's directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CqeError::Io { path: path.display().to_string(), source })?;
        let mut manifest: Self = serde_json::from_str(&text)
            .map_err(|e| CqeError::Manifest { path: path.display().to_string(), message: e.to_string() })?;
        let base = path.parent().unwrap_or(Path::new(""));
        for point in &mut manifest.points {
            if point.fcidump.is_relative() {
                point.fcidump = base.join(&point.fcidump);
            }
        }
        manifest.validate(path)?;
        Ok(manifest)
    }

    fn validate(&self, path: &Path) -> Result<()> {
        for point in &self.points {
            if point.states.len() != self.states.len() {
                return Err(CqeError::Manifest {
                    path: path.display().to_string(),
                    message: format!("point {} lists {} guesses for {} states", point.label, point.states.len(), self.states.len()),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub point: String,
    pub state: usize,
    pub label: String,
    pub converged: bool,
    pub iterations: Option<usize>,
    pub energy: Option<f64>,
    pub fci_energy: Option<f64>,
    pub error: Option<f64>,
    pub fci_level: Option<usize>,
    pub variance: Option<f64>,
    pub s_squared: Option<f64>,
    /// Why the row is unusable or suspect; empty when clean.
    pub flag: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanStateSummary {
    pub state: usize,
    pub label: String,
    pub max_error: Option<f64>,
    pub flagged: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub manifest: ScanManifest,
    pub solver: SolverConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanDocument {
    pub config: ScanConfig,
    pub summary: Vec<ScanStateSummary>,
    pub rows: Vec<ScanRow>,
}

impl ScanDocument {
    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.converged)
    }
}

fn scan_point(point: &ScanPoint, labels: &[String], solver: &SolverConfig) -> Vec<ScanRow> {
    let failed = |state: usize, message: String| ScanRow {
        point: point.label.clone(),
        state,
        label: labels[state].clone(),
        converged: false,
        iterations: None,
        energy: None,
        fci_energy: None,
        error: None,
        fci_level: None,
        variance: None,
        s_squared: None,
        flag: Some(message),
    };
    let ints = match MolecularIntegrals::from_fcidump_file(&point.fcidump) {
        Ok(ints) => Arc::new(ints),
        Err(e) => return (0..labels.len()).map(|k| failed(k, e.to_string())).collect(),
    };
    let mut cache: Vec<((usize, usize), HamiltonianOperator, Option<SpectrumResult>)> = Vec::new();
    let mut rows = Vec::with_capacity(labels.len());
    for (state, occupation) in point.states.iter().enumerate() {
        let sector = (occupation.alpha.len(), occupation.beta.len());
        if !cache.iter().any(|(s, _, _)| *s == sector) {
            let built = hamiltonian_for(ints.clone(), sector)
                .and_then(|ham| reference_spectrum(&ham).map(|spec| (ham, spec)));
            match built {
                Ok((ham, spec)) => cache.push((sector, ham, spec)),
                Err(e) => {
                    rows.push(failed(state, e.to_string()));
                    continue;
                }
            }
        }
        let (_, ham, spectrum) = cache.iter().find(|(s, _, _)| *s == sector).expect("cached above");
        let outcome = initial_state(ham.basis(), occupation).and_then(|psi0| solve(ham, &psi0, solver));
        let outcome = match outcome {
            Ok(o) => o,
            Err(e) => {
                rows.push(failed(state, e.to_string()));
                continue;
            }
        };
        let summary = summarize(ham, &outcome, spectrum.as_ref());
        let flag = (!summary.converged).then(|| format!("not converged ({:?})", summary.termination));
        rows.push(ScanRow {
            point: point.label.clone(),
            state,
            label: labels[state].clone(),
            converged: summary.converged,
            iterations: Some(summary.iterations),
            energy: Some(summary.energy),
            fci_energy: summary.fci.as_ref().map(|f| f.eigenvalue),
            error: summary.fci.as_ref().map(|f| f.energy_error),
            fci_level: summary.fci.as_ref().map(|f| f.level),
            variance: Some(summary.exact_variance),
            s_squared: Some(summary.s_squared),
            flag,
        });
    }
    rows
}

/// Solves every state at every geometry. Geometries run in parallel; a
/// failing geometry is flagged in its rows and the rest still complete.
pub fn run_scan(manifest: &ScanManifest, solver: &SolverConfig) -> Result<ScanDocument> {
    solver.validate()?;
    let rows: Vec<ScanRow> = manifest
        .points
        .par_iter()
        .map(|p| scan_point(p, &manifest.states, solver))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    let summary = manifest
        .states
        .iter()
        .enumerate()
        .map(|(state, label)| {
            let mine: Vec<&ScanRow> = rows.iter().filter(|r| r.state == state).collect();
            let max_error = mine.iter().filter(|r| r.converged).filter_map(|r| r.error).reduce(f64::max);
            ScanStateSummary { state, label: label.clone(), max_error, flagged: mine.iter().filter(|r| r.flag.is_some()).count() }
        })
        .collect();
    Ok(ScanDocument { config: ScanConfig { manifest: manifest.clone(), solver: solver.clone() }, summary, rows })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaConfig {
    pub fcidump: PathBuf,
    pub occupation: OccupationSpec,
    pub deltas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaSummary {
    pub exact_variance: f64,
    pub richardson: f64,
    pub richardson_error: f64,
    pub slope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaDocument {
    pub config: DeltaConfig,
    pub summary: DeltaSummary,
    pub rows: Vec<DeltaRow>,
}

/// Emulated against exact variance of the initial guess over a delta ladder.
pub fn run_delta_study(config: &DeltaConfig) -> Result<DeltaDocument> {
    let ham = load_hamiltonian(&config.fcidump, (config.occupation.alpha.len(), config.occupation.beta.len()))?;
    let psi = initial_state(ham.basis(), &config.occupation)?;
    let mut sorted = config.deltas.clone();
    sorted.sort_by(|a, b| b.total_cmp(a));
    if config.deltas.is_empty() || sorted.windows(2).any(|w| w[0] == w[1]) || sorted.iter().any(|d| !(*d > 0.0)) {
        return Err(CqeError::InvalidConfig("deltas must be distinct and positive".into()));
    }
    let study = delta_study(&psi, &ham, &config.deltas)?;
    let exact_variance = study.rows[0].exact;
    Ok(DeltaDocument {
        config: config.clone(),
        summary: DeltaSummary {
            exact_variance,
            richardson: study.richardson,
            richardson_error: study.richardson_error,
            slope: study.slope,
        },
        rows: study.rows,
    })
}

/// A result document that can also be flattened into CSV rows.
pub trait Document: Serialize {
    fn write_csv<W: Write>(&self, out: &mut csv::Writer<W>) -> csv::Result<()>;
}

impl Document for RunDocument {
    fn write_csv<W: Write>(&self, out: &mut csv::Writer<W>) -> csv::Result<()> {
        out.serialize(&self.summary.initial)?;
        self.trace.iter().try_for_each(|r| out.serialize(r))
    }
}

impl Document for FciDocument {
    fn write_csv<W: Write>(&self, out: &mut csv::Writer<W>) -> csv::Result<()> {
        self.levels.iter().try_for_each(|r| out.serialize(r))
    }
}

impl Document for ScanDocument {
    fn write_csv<W: Write>(&self, out: &mut csv::Writer<W>) -> csv::Result<()> {
        self.rows.iter().try_for_each(|r| out.serialize(r))
    }
}

impl Document for DeltaDocument {
    fn write_csv<W: Write>(&self, out: &mut csv::Writer<W>) -> csv::Result<()> {
        self.rows.iter().try_for_each(|r| out.serialize(r))
    }
}

pub fn render(doc: &impl Document, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let mut text = serde_json::to_string_pretty(doc).expect("documents serialize");
            text.push('\n');
            text
        }
        OutputFormat::Csv => {
            let mut writer = csv::Writer::from_writer(Vec::new());
            doc.write_csv(&mut writer).expect("in-memory CSV");
            String::from_utf8(writer.into_inner().expect("in-memory CSV")).expect("CSV is UTF-8")
        }
    }
}

/// Writes the rendered document to `out`, or stdout when absent.
pub fn emit(doc: &impl Document, format: OutputFormat, out: Option<&Path>) -> Result<()> {
    let text = render(doc, format);
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CqeError::Io { path: path.display().to_string(), source }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CqeError::Io { path: "<stdout>".into(), source }),
    }
}
