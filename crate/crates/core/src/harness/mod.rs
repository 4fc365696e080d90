//! Decision procedure, sweeps and consistency experiments. Every solver
//! verdict is checked against the exact oracle; disagreement is recorded as
//! an outcome, not raised as an error.

mod report;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::encoder::{
    build_dual_feasibility, build_primal, coloring_to_dual, dcoloring_matrix, identity_sum, kernel_check, permuted,
    validate_dual, DualConstraint, EncodeError, DEFAULT_LOWER_BOUND,
};
use crate::graph::{
    enumerate_graphs, generate, oracle_3color, random_proper_coloring, Graph, GraphError, GraphKind, OracleResult,
};
use crate::solver::{solve_problem, SolveOptions, SolveStatus};

pub use report::{read_rows, report_write, write_rows, ReportFormat, CSV_HEADER};

/// Largest graph the harness hands to the oracle.
pub const ORACLE_CUTOFF: usize = 12;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {message}")]
    Format { path: String, message: String },
    #[error("worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarnessOptions {
    pub solve: SolveOptions,
    /// Floor added to the primal program.
    pub bound: f64,
    pub colorable_tol: f64,
    pub oracle_cutoff: usize,
}

impl Default for HarnessOptions {
    fn default() -> Self {
        HarnessOptions {
            solve: SolveOptions::default(),
            bound: DEFAULT_LOWER_BOUND,
            colorable_tol: 1e-5,
            oracle_cutoff: ORACLE_CUTOFF,
        }
    }
}

impl HarnessOptions {
    /// Objectives at or below this are classified as not colorable: the
    /// midpoint between 0 and the bound.
    pub fn bound_threshold(&self) -> f64 {
        0.5 * self.bound
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Decision {
    ThreeColorable,
    NotThreeColorable,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Agreement {
    Agree,
    Disagree,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub decision: Decision,
    pub objective: f64,
    pub oracle: Option<OracleResult>,
    pub agree: Agreement,
    pub solver_status: SolveStatus,
    pub iterations: usize,
    /// Seconds.
    pub wall_time: f64,
    pub message: Option<String>,
}

pub fn classify(objective: f64, status: SolveStatus, opts: &HarnessOptions) -> Decision {
    if status != SolveStatus::Converged || !objective.is_finite() {
        Decision::Inconclusive
    } else if objective.abs() <= opts.colorable_tol {
        Decision::ThreeColorable
    } else if objective <= opts.bound_threshold() {
        Decision::NotThreeColorable
    } else {
        Decision::Inconclusive
    }
}

pub fn agreement(decision: Decision, oracle_colorable: Option<bool>) -> Agreement {
    match (decision, oracle_colorable) {
        (Decision::Inconclusive, _) | (_, None) => Agreement::Unknown,
        (Decision::ThreeColorable, Some(true)) | (Decision::NotThreeColorable, Some(false)) => Agreement::Agree,
        _ => Agreement::Disagree,
    }
}

/// Solves the primal program with the objective floor and classifies the
/// optimum.
pub fn decide(g: &Graph, opts: &HarnessOptions) -> Result<Verdict, HarnessError> {
    let prob = build_primal(g, Some(opts.bound));
    let report = solve_problem(&prob, &opts.solve);
    let oracle = if g.n() <= opts.oracle_cutoff { Some(oracle_3color(g)?) } else { None };
    let decision = classify(report.objective, report.status, opts);
    Ok(Verdict {
        decision,
        objective: report.objective,
        agree: agreement(decision, oracle.as_ref().map(|o| o.colorable)),
        oracle,
        solver_status: report.status,
        iterations: report.iterations,
        wall_time: report.wall_time.as_secs_f64(),
        message: report.message,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub graph_id: String,
    pub n: usize,
    pub m: usize,
    pub edge_bitmask: u64,
    pub oracle_colorable: Option<bool>,
    #[serde(with = "report::sig12")]
    pub objective: f64,
    pub decision: Decision,
    pub agree: Agreement,
    pub solver_status: SolveStatus,
    pub iterations: usize,
    /// Seconds.
    #[serde(with = "report::sig12")]
    pub wall_time: f64,
}

impl SweepRow {
    pub fn graph_id(g: &Graph) -> String {
        format!("n{}-{:x}", g.n(), g.edge_bitmask())
    }

    fn from_verdict(g: &Graph, v: &Verdict) -> Self {
        SweepRow {
            graph_id: Self::graph_id(g),
            n: g.n(),
            m: g.m(),
            edge_bitmask: g.edge_bitmask(),
            oracle_colorable: v.oracle.as_ref().map(|o| o.colorable),
            objective: v.objective,
            decision: v.decision,
            agree: v.agree,
            solver_status: v.solver_status,
            iterations: v.iterations,
            wall_time: v.wall_time,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgreementCounts {
    pub agree: usize,
    pub disagree: usize,
    pub inconclusive: usize,
}

impl AgreementCounts {
    fn add(&mut self, row: &SweepRow) {
        match (row.decision, row.agree) {
            (Decision::Inconclusive, _) => self.inconclusive += 1,
            (_, Agreement::Agree) => self.agree += 1,
            (_, Agreement::Disagree) => self.disagree += 1,
            (_, Agreement::Unknown) => self.inconclusive += 1,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub rows: usize,
    pub oracle_colorable: AgreementCounts,
    pub oracle_not_colorable: AgreementCounts,
    pub numerical_failures: usize,
    /// Graph ids of every Disagree row.
    pub disagreements: Vec<String>,
}

pub fn summarize(rows: &[SweepRow]) -> SweepSummary {
    let mut s = SweepSummary { rows: rows.len(), ..Default::default() };
    for row in rows {
        match row.oracle_colorable {
            Some(false) => s.oracle_not_colorable.add(row),
            _ => s.oracle_colorable.add(row),
        }
        if row.solver_status == SolveStatus::NumericalFailure {
            s.numerical_failures += 1;
        }
        if row.agree == Agreement::Disagree {
            s.disagreements.push(row.graph_id.clone());
        }
    }
    s
}

/// One row per enumerated graph on up to `n_max` vertices, in enumeration
/// order regardless of `jobs`.
pub fn sweep(n_max: usize, opts: &HarnessOptions, jobs: usize) -> Result<(Vec<SweepRow>, SweepSummary), HarnessError> {
    let graphs: Vec<Graph> = enumerate_graphs(n_max)?.collect();
    sweep_graphs(&graphs, opts, jobs)
}

pub fn sweep_graphs(
    graphs: &[Graph],
    opts: &HarnessOptions,
    jobs: usize,
) -> Result<(Vec<SweepRow>, SweepSummary), HarnessError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| HarnessError::Pool(e.to_string()))?;
    let rows: Vec<SweepRow> = pool.install(|| {
        graphs.par_iter().map(|g| decide(g, opts).map(|v| SweepRow::from_verdict(g, &v))).collect::<Result<_, _>>()
    })?;
    let summary = summarize(&rows);
    Ok((rows, summary))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub trials: usize,
    pub seed: u64,
    /// `max |Σₖ X⁽ᵏ⁾ D X⁽ᵏ⁾ᵀ − f(D)|`.
    pub identity_max_residual: Option<f64>,
    /// Smallest eigenvalue over all coloring-built dual matrices.
    pub dual_min_eig: Option<f64>,
    /// Trials whose dual matrix failed some structural check.
    pub dual_failures: usize,
    pub kernel_max_residual: Option<f64>,
    /// `max ‖L − Σ vvᵀ‖_max` over the coloring matrices.
    pub dcoloring_max_residual: Option<f64>,
}

fn fold_max(acc: Option<f64>, v: f64) -> Option<f64> {
    Some(acc.map_or(v, |a| a.max(v)))
}

/// Random colorable graph with 1..=10 vertices and a random proper coloring.
fn random_colored_graph(rng: &mut ChaCha8Rng) -> Result<(Graph, crate::graph::Coloring), HarnessError> {
    loop {
        let n = rng.gen_range(1..=10);
        let p = rng.gen_range(0.1..0.7);
        let g = generate(&GraphKind::Random { n, p, seed: rng.gen() })?;
        if let Some(c) = random_proper_coloring(&g, rng) {
            return Ok((g, c));
        }
    }
}

pub fn run_identities(trials: usize, seed: u64) -> Result<IdentityReport, HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = IdentityReport {
        trials,
        seed,
        identity_max_residual: None,
        dual_min_eig: None,
        dual_failures: 0,
        kernel_max_residual: None,
        dcoloring_max_residual: None,
    };
    for _ in 0..trials {
        let (g, c) = random_colored_graph(&mut rng)?;
        let prob = build_primal(&g, None);
        let d: Vec<f64> = prob.vars.iter().map(|v| if v.is_d() { rng.gen_range(-1.0..1.0) } else { 0.0 }).collect();
        let pc = permuted(&c, g.n())?;
        let (lhs, rhs) = identity_sum(&prob, &g, &d, &pc)?;
        r.identity_max_residual = fold_max(r.identity_max_residual, (lhs - rhs).abs());

        let (_, z) = coloring_to_dual(&pc, &g)?;
        let v = validate_dual(&z, &g, 1e-9)?;
        if !v.all_passed() {
            r.dual_failures += 1;
        }
        r.dual_min_eig = Some(r.dual_min_eig.map_or(v.min_eig, |m| m.min(v.min_eig)));
        let k = kernel_check(&z, g.n(), 4, rng.gen())?;
        r.kernel_max_residual = fold_max(r.kernel_max_residual, k.max_residual);

        let l = dcoloring_matrix(&pc);
        let side = l.matrix.nrows();
        let mut outer = DMatrix::zeros(side, side);
        for x in &pc.vectors {
            for a in 0..side {
                for b in 0..side {
                    outer[(a, b)] += x[a] * x[b];
                }
            }
        }
        r.dcoloring_max_residual = fold_max(r.dcoloring_max_residual, (l.matrix - outer).amax());
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateCheck {
    pub passed: bool,
    pub min_eig: f64,
    pub failed: Vec<DualConstraint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualReport {
    pub n: usize,
    pub m: usize,
    /// Optimal identity shift; nonpositive means a feasible dual matrix exists.
    pub tau: f64,
    pub solver_status: SolveStatus,
    pub iterations: usize,
    pub oracle_colorable: Option<bool>,
    /// Validation of the matrix built from the oracle's coloring.
    pub certificate: Option<CertificateCheck>,
}

pub fn run_dual(g: &Graph, opts: &HarnessOptions) -> Result<DualReport, HarnessError> {
    let report = solve_problem(&build_dual_feasibility(g), &opts.solve);
    let oracle = if g.n() <= opts.oracle_cutoff { Some(oracle_3color(g)?) } else { None };
    let certificate = match oracle.as_ref().and_then(|o| o.witness.as_ref()) {
        Some(w) => {
            let (_, z) = coloring_to_dual(&permuted(w, g.n())?, g)?;
            let v = validate_dual(&z, g, 1e-9)?;
            Some(CertificateCheck {
                passed: v.all_passed(),
                min_eig: v.min_eig,
                failed: v.checks.iter().filter(|c| !c.passed).map(|c| c.constraint).collect(),
            })
        }
        None => None,
    };
    Ok(DualReport {
        n: g.n(),
        m: g.m(),
        tau: report.objective,
        solver_status: report.status,
        iterations: report.iterations,
        oracle_colorable: oracle.map(|o| o.colorable),
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification_bands() {
        let o = HarnessOptions::default();
        let ok = SolveStatus::Converged;
        assert_eq!(classify(0.0, ok, &o), Decision::ThreeColorable);
        assert_eq!(classify(-9e-6, ok, &o), Decision::ThreeColorable);
        assert_eq!(classify(-100.0, ok, &o), Decision::NotThreeColorable);
        assert_eq!(classify(-50.0, ok, &o), Decision::NotThreeColorable);
        assert_eq!(classify(-49.0, ok, &o), Decision::Inconclusive);
        assert_eq!(classify(0.0, SolveStatus::NumericalFailure, &o), Decision::Inconclusive);
        assert_eq!(classify(f64::NAN, ok, &o), Decision::Inconclusive);
    }

    #[test]
    fn agreement_table() {
        assert_eq!(agreement(Decision::ThreeColorable, Some(true)), Agreement::Agree);
        assert_eq!(agreement(Decision::NotThreeColorable, Some(true)), Agreement::Disagree);
        assert_eq!(agreement(Decision::ThreeColorable, Some(false)), Agreement::Disagree);
        assert_eq!(agreement(Decision::Inconclusive, Some(false)), Agreement::Unknown);
        assert_eq!(agreement(Decision::ThreeColorable, None), Agreement::Unknown);
    }

    #[test]
    fn k1_is_colorable() {
        let v = decide(&Graph::new(1, []).unwrap(), &HarnessOptions::default()).unwrap();
        assert_eq!(v.decision, Decision::ThreeColorable);
        assert_eq!(v.agree, Agreement::Agree);
    }

    #[test]
    fn small_sweeps() {
        let o = HarnessOptions::default();
        let (rows, s) = sweep(2, &o, 1).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].agree, Agreement::Agree);
        assert_eq!(s.oracle_colorable.agree, 1);
        let (rows, _) = sweep(3, &o, 1).unwrap();
        assert_eq!(rows.len(), 5);
        assert!(rows.iter().all(|r| r.oracle_colorable == Some(true) && r.decision == Decision::ThreeColorable));
    }

    #[test]
    fn empty_identity_run() {
        let r = run_identities(0, 1).unwrap();
        assert_eq!(r.identity_max_residual, None);
        assert_eq!(r.dual_failures, 0);
    }

    #[test]
    fn dual_reports() {
        let o = HarnessOptions::default();
        for kind in [GraphKind::Complete(2), GraphKind::Cycle(5)] {
            let r = run_dual(&generate(&kind).unwrap(), &o).unwrap();
            assert!(r.tau <= 1e-7, "{kind:?} {}", r.tau);
            assert!(r.certificate.unwrap().passed);
        }
        let r = run_dual(&generate(&GraphKind::Complete(4)).unwrap(), &o).unwrap();
        assert_eq!(r.oracle_colorable, Some(false));
        assert!(r.certificate.is_none());
    }
}
