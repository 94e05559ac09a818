//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any criterion fails.

mod common;

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

use common::{dense_exponential, dense_two_body, fixture, hamiltonian, random_anti_hermitian, random_state, to_dvector};
use cqe::runner::{run_scan, run_solve, RunDocument, RunSpec, ScanManifest};
use cqe::{
    apply_excitation, compute_2rdm, delta_study, diagonalize, exp_apply, identify_state, initial_state, solve,
    variance_gradient, Combo, Determinant, GradientMode, MeasurementConfig, OccupationSpec, SectorBasis, SolverConfig,
};

const H4: &str = "h4_linear_1.00.fcidump";

struct H4State {
    energy: f64,
    multiplicity: u32,
    sz: f64,
    guess: OccupationSpec,
}

fn h4_states() -> Vec<H4State> {
    use Combo::{Singlet, Triplet};
    let det = OccupationSpec::determinant;
    let pair = OccupationSpec::pair;
    let rows: Vec<(f64, u32, f64, OccupationSpec)> = vec![
        (-2.18096635, 1, 0.0, det(&[0, 1], &[0, 1])),
        (-1.95019128, 3, -1.0, det(&[0], &[0, 1, 2])),
        (-1.95019128, 3, 0.0, pair(&[0, 1], &[0, 2], Triplet)),
        (-1.95019128, 3, 1.0, det(&[0, 1, 2], &[0])),
        (-1.73654709, 3, -1.0, det(&[1], &[0, 1, 2])),
        (-1.73654709, 3, 0.0, pair(&[0, 1], &[1, 2], Triplet)),
        (-1.73654709, 3, 1.0, det(&[0, 1, 2], &[1])),
        (-1.66711149, 1, 0.0, det(&[0, 1], &[1, 2])),
        (-1.63892672, 1, 0.0, pair(&[0, 1], &[0, 2], Singlet)),
        (-1.45713456, 3, -1.0, det(&[2], &[0, 1, 2])),
        (-1.45713456, 3, 0.0, pair(&[0, 2], &[1, 2], Triplet)),
        (-1.45713456, 3, 1.0, det(&[0, 1, 2], &[2])),
        (-1.34940191, 1, 0.0, pair(&[0, 1], &[1, 2], Singlet)),
        (-1.30398471, 3, -1.0, det(&[0], &[0, 1, 3])),
        (-1.30398471, 3, 0.0, pair(&[0, 1], &[0, 3], Triplet)),
        (-1.30398471, 3, 1.0, det(&[0, 1, 3], &[0])),
    ];
    rows.into_iter().map(|(energy, multiplicity, sz, guess)| H4State { energy, multiplicity, sz, guess }).collect()
}

fn h4_spec(guess: &OccupationSpec) -> RunSpec {
    RunSpec { fcidump: fixture(H4), occupation: guess.clone(), solver: SolverConfig::default() }
}

/// Outcome of one criterion: failures collected as messages.
struct Check {
    failures: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Self { failures: Vec::new() }
    }

    fn require(&mut self, ok: bool, message: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(message());
        }
    }
}

fn h4_table(docs: &[RunDocument], elapsed: f64) -> Check {
    let mut c = Check::new();
    println!("  state  2S+1   Sz     energy          reference      |dE ref|    FCI error  variance   cse_norm   iters");
    for (k, (state, doc)) in h4_states().iter().zip(docs).enumerate() {
        let s = &doc.summary;
        let fci_error = s.fci.as_ref().map_or(f64::INFINITY, |f| f.energy_error);
        println!(
            "  {k:>5}  {:>4}  {:>4.1}  {:>14.8}  {:>14.8}  {:>9.2e}  {:>9.2e}  {:>9.2e}  {:>9.2e}  {:>5}",
            s.multiplicity,
            s.sz,
            s.energy,
            state.energy,
            (s.energy - state.energy).abs(),
            fci_error,
            s.exact_variance,
            s.cse_norm,
            s.iterations
        );
        c.require(s.converged && s.exact_variance < 1e-6, || format!("state {k}: variance {:.2e}", s.exact_variance));
        c.require((s.energy - state.energy).abs() < 1e-5, || format!("state {k}: energy {} vs {}", s.energy, state.energy));
        c.require(fci_error < 2e-5, || format!("state {k}: FCI error {fci_error:.2e}"));
        c.require(s.multiplicity == state.multiplicity, || format!("state {k}: 2S+1 = {}", s.multiplicity));
        c.require(s.sz == state.sz, || format!("state {k}: Sz = {}", s.sz));
    }
    println!("  total solve time {elapsed:.2} s");
    c.require(elapsed < 60.0, || format!("runtime {elapsed:.1} s"));
    c
}

fn diagnostics_ordering(docs: &[RunDocument]) -> Check {
    let mut c = Check::new();
    for (k, doc) in docs.iter().enumerate() {
        let s = &doc.summary;
        c.require(s.cse_norm < s.exact_variance, || {
            format!("state {k}: cse_norm {:.2e} >= variance {:.2e}", s.cse_norm, s.exact_variance)
        });
    }
    let s0 = docs[0].summary.cse_norm;
    c.require(s0 < 2e-7, || format!("state 0: cse_norm {s0:.2e} >= 2e-7"));
    c
}

fn fifth_excited_trace() -> Check {
    let mut c = Check::new();
    let ham = hamiltonian(H4, 2, 2);
    let spectrum = diagonalize(&ham).unwrap();
    let guess = OccupationSpec::pair(&[0, 1], &[1, 2], Combo::Triplet);
    let outcome = solve(&ham, &initial_state(ham.basis(), &guess).unwrap(), &SolverConfig::default()).unwrap();
    let target = identify_state(&outcome.state, &spectrum).eigenvalue;
    let records: Vec<_> = std::iter::once(&outcome.initial).chain(&outcome.trace).collect();
    println!("  iter  energy error  variance   cse_norm");
    for r in &records {
        println!("  {:>4}  {:>12.3e}  {:>9.3e}  {:>9.3e}", r.iteration, (r.energy - target).abs(), r.variance, r.cse_norm);
    }
    let tail: Vec<_> = records.iter().filter(|r| r.iteration >= 2).collect();
    for w in tail.windows(2) {
        let (a, b) = (w[0], w[1]);
        c.require((b.energy - target).abs() <= (a.energy - target).abs(), || {
            format!("energy error rises at iteration {}", b.iteration)
        });
        c.require(b.variance <= a.variance, || format!("variance rises at iteration {}", b.iteration));
        c.require(b.cse_norm <= a.cse_norm, || format!("cse_norm rises at iteration {}", b.iteration));
    }
    let last = outcome.last();
    c.require(outcome.converged(), || "not converged".into());
    c.require(outcome.iterations() <= 60, || format!("{} iterations", outcome.iterations()));
    let err = (last.energy - target).abs();
    c.require(err < 1e-5, || format!("final energy error {err:.2e}"));
    c.require(last.variance < 1e-6, || format!("final variance {:.2e}", last.variance));
    c.require(last.cse_norm < 1e-6, || format!("final cse_norm {:.2e}", last.cse_norm));
    c
}

fn bh_scan() -> Check {
    let mut c = Check::new();
    let manifest = ScanManifest::from_file(&fixture("bh/scan.json")).unwrap();
    let solver = SolverConfig { epsilon: 1e-5, ..SolverConfig::default() };
    let start = Instant::now();
    let doc = run_scan(&manifest, &solver).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let limits = [2e-5, 1.6e-4, 8e-5, 4.8e-4];
    c.require(manifest.points.len() == 19, || format!("{} geometries", manifest.points.len()));
    c.require(doc.all_converged(), || "some rows did not converge".into());
    for (summary, limit) in doc.summary.iter().zip(limits) {
        let max = summary.max_error.unwrap_or(f64::INFINITY);
        println!("  {:<10} max |E - E_FCI| {max:.2e} (limit {limit:.1e})", summary.label);
        c.require(max <= limit, || format!("{}: max error {max:.2e} > {limit:.1e}", summary.label));
    }
    println!("  scan time {elapsed:.2} s");
    c.require(elapsed < 300.0, || format!("runtime {elapsed:.1} s"));
    c
}

fn gradient_finite_differences() -> Check {
    let mut c = Check::new();
    let sectors = [("h2_0.74.fcidump", 1, 1, 15), (H4, 2, 2, 25), (H4, 3, 1, 10), (H4, 1, 3, 10)];
    let mut count = 0;
    let mut worst: f64 = 0.0;
    for (file, na, nb, n) in sectors {
        let h = hamiltonian(file, na, nb);
        let n_spatial = h.basis().n_spatial();
        for seed in 0..n {
            let psi = random_state(h.basis(), 1000 + seed);
            let b = random_anti_hermitian(n_spatial, 2000 + seed);
            let analytic = b.dot(&variance_gradient(&psi, &h));
            // truncation error of the difference quotient scales as step^2
            let step = 1e-5;
            let plus = h.variance(&exp_apply(&b, step, &psi).unwrap());
            let minus = h.variance(&exp_apply(&b, -step, &psi).unwrap());
            let fd = (plus - minus) / (2.0 * step);
            let rel = (analytic - fd).abs() / analytic.abs();
            worst = worst.max(rel);
            count += 1;
            c.require(rel < 1e-6, || format!("{file} ({na},{nb}) seed {seed}: relative error {rel:.2e}"));
        }
    }
    println!("  {count} states, worst relative error {worst:.2e}");
    c.require(count >= 50, || format!("only {count} states"));
    c
}

fn emulation_order() -> Check {
    let mut c = Check::new();
    let h = hamiltonian(H4, 2, 2);
    let hf = initial_state(h.basis(), &OccupationSpec::determinant(&[0, 1], &[0, 1])).unwrap();
    let study = delta_study(&hf, &h, &[0.1, 0.05, 0.025]).unwrap();
    for row in &study.rows {
        println!("  delta {:<6} error {:.3e}", row.delta, row.error);
    }
    let slope = study.slope.unwrap_or(f64::NAN);
    let smallest = study.rows.last().unwrap().error;
    println!("  slope {slope:.4}, Richardson error {:.3e}", study.richardson_error);
    c.require((slope - 2.0).abs() <= 0.1, || format!("slope {slope}"));
    c.require(study.richardson_error * 10.0 <= smallest, || {
        format!("Richardson error {:.2e} vs smallest raw {smallest:.2e}", study.richardson_error)
    });

    let guess = OccupationSpec::determinant(&[0, 1], &[0, 1]);
    let exact = run_solve(&h4_spec(&guess)).unwrap();
    let emulated_spec = RunSpec {
        solver: SolverConfig { gradient_mode: GradientMode::Emulated(MeasurementConfig::default()), ..SolverConfig::default() },
        ..h4_spec(&guess)
    };
    let emulated = run_solve(&emulated_spec).unwrap();
    let de = (emulated.summary.energy - exact.summary.energy).abs();
    println!(
        "  emulated solve: {} iterations, variance {:.2e}, |E - E_exact| {de:.2e}",
        emulated.summary.iterations, emulated.summary.exact_variance
    );
    c.require(emulated.converged() && emulated.summary.exact_variance < 1e-6, || {
        format!("emulated variance {:.2e}", emulated.summary.exact_variance)
    });
    c.require(de < 1e-5, || format!("emulated energy differs by {de:.2e}"));
    c
}

fn algebra_oracles() -> Check {
    let mut c = Check::new();
    // single operators applied left to right; (true, p) creates
    let apply = |det: Determinant, ops: &[(bool, usize)]| -> Option<(Determinant, f64)> {
        ops.iter().try_fold((det, 1.0), |(d, ph), &(create, p)| {
            let (next, sign) = if create { apply_excitation(d, &[p], &[])? } else { apply_excitation(d, &[], &[p])? };
            Some((next, ph * sign))
        })
    };
    let mut relations = 0usize;
    for n_spatial in 1..=3 {
        let m = 2 * n_spatial;
        for bits in 0..(1u64 << m) {
            let det = Determinant(bits);
            for p in 0..m {
                for q in 0..m {
                    for (x, y) in [(false, false), (true, true), (false, true)] {
                        let mut sum: HashMap<Determinant, f64> = HashMap::new();
                        for ops in [[(x, p), (y, q)], [(y, q), (x, p)]] {
                            if let Some((d, ph)) = apply(det, &ops) {
                                *sum.entry(d).or_default() += ph;
                            }
                        }
                        let identity = x != y && p == q;
                        let ok = sum.iter().all(|(d, v)| *v == if identity && *d == det { 1.0 } else { 0.0 })
                            && (!identity || sum.get(&det) == Some(&1.0));
                        relations += 1;
                        c.require(ok, || format!("anticommutator fails for n={n_spatial} det={bits:b} p={p} q={q}"));
                    }
                }
            }
        }
    }
    println!("  {relations} anticommutators checked");

    let mut worst: f64 = 0.0;
    for (n, na, nb) in [(2, 1, 1), (4, 3, 0), (4, 0, 3)] {
        let basis = Arc::new(SectorBasis::new(n, na, nb));
        assert_eq!(basis.len(), 4);
        for seed in 0..10 {
            let op = random_anti_hermitian(n, 300 + seed);
            let psi = random_state(&basis, 400 + seed);
            let oracle = dense_exponential(&dense_two_body(&op, &basis)) * to_dvector(&psi);
            let got = exp_apply(&op, 1.0, &psi).unwrap();
            let diff = (to_dvector(&got) - oracle).amax();
            worst = worst.max(diff);
            c.require(diff < 1e-10, || format!("exp_apply sector ({n},{na},{nb}) seed {seed}: {diff:.2e}"));
        }
    }
    println!("  exp_apply vs dense exponential, worst {worst:.2e}");

    let mut worst: f64 = 0.0;
    for (file, na, nb) in [("h2_0.74.fcidump", 1, 1), (H4, 2, 2), (H4, 3, 1)] {
        let h = hamiltonian(file, na, nb);
        for seed in 0..10 {
            let psi = random_state(h.basis(), 500 + seed);
            let diff = (compute_2rdm(&psi).energy(h.integrals(), na + nb) - h.expectation(&psi)).abs();
            worst = worst.max(diff);
            c.require(diff < 1e-10, || format!("2-RDM energy {file} seed {seed}: {diff:.2e}"));
        }
    }
    println!("  2-RDM energy contraction, worst {worst:.2e}");
    c
}

fn run(name: &str, criterion: impl FnOnce() -> Check) -> bool {
    println!("--- {name}");
    let result = catch_unwind(AssertUnwindSafe(criterion));
    let failures = match result {
        Ok(check) => check.failures,
        Err(_) => vec!["panicked".to_string()],
    };
    for f in &failures {
        println!("  failure: {f}");
    }
    let pass = failures.is_empty();
    println!("{} {name}", if pass { "PASS" } else { "FAIL" });
    pass
}

fn main() {
    let start = Instant::now();
    let docs: Vec<RunDocument> = h4_states().iter().map(|s| run_solve(&h4_spec(&s.guess)).unwrap()).collect();
    let h4_elapsed = start.elapsed().as_secs_f64();

    let results = [
        run("H4 table: 16 states converge to the reference energies and spins", || h4_table(&docs, h4_elapsed)),
        run("H4 diagnostics: cse_norm below variance, ground state below 2e-7", || diagnostics_ordering(&docs)),
        run("H4 fifth excited state: monotone convergence within 60 iterations", fifth_excited_trace),
        run("BH scan: per-state max FCI error within twice the reference maxima", bh_scan),
        run("Variance gradient matches central finite differences", gradient_finite_differences),
        run("Measurement emulation: O(delta^2) error, Richardson gain, emulated solve", emulation_order),
        run("Algebra oracles: anticommutation, dense exponential, 2-RDM energy", algebra_oracles),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("\nacceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
