//! Dense primal-dual interior-point solver for block-diagonal linear matrix
//! inequalities.
//!
//! A [`BlockLmi`] asks to minimize `cᵀx` subject to
//! `F_b(x) = F_b0 + Σ_i x_i F_bi ⪰ 0` for every block `b`. Blocks of side 1
//! are scalar inequalities and are handled as a diagonal cone.

mod ipm;

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::encoder::{LmiProblem, Sign, SymSparse, VarId};
pub use crate::linalg::{min_eigenvalue, AsymmetricMatrix};
pub use ipm::solve;

/// Where a block came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockOrigin {
    /// The problem's matrix inequality.
    Main,
    /// Sign restriction on one variable.
    Sign(usize),
    /// One of the problem's scalar inequalities.
    Linear(usize),
    /// `objective − lower_bound ≥ 0`.
    Bound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LmiBlock {
    pub side: usize,
    pub origin: BlockOrigin,
    pub constant: SymSparse,
    /// `(variable index, coefficient matrix)` for every variable touching
    /// this block.
    pub terms: Vec<(usize, SymSparse)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockLmi {
    pub vars: Vec<VarId>,
    pub objective: Vec<f64>,
    pub blocks: Vec<LmiBlock>,
    /// Initial `x`; the solver falls back to zero when absent.
    pub start: Option<Vec<f64>>,
}

impl BlockLmi {
    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn block_sides(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.side).collect()
    }

    /// Evaluates block `b` at `x`.
    pub fn block_value(&self, b: usize, x: &[f64]) -> nalgebra::DMatrix<f64> {
        let block = &self.blocks[b];
        let mut m = block.constant.to_dense();
        for (i, c) in &block.terms {
            c.add_to(&mut m, x[*i]);
        }
        m
    }
}

fn scalar(v: f64) -> SymSparse {
    SymSparse::with_entry(1, 0, 0, v)
}

/// Splits an [`LmiProblem`] into the main block, one scalar block per
/// signed variable, one per scalar inequality and one for the objective
/// floor.
pub fn canonicalize(prob: &LmiProblem) -> BlockLmi {
    let mut blocks = Vec::new();
    let terms = prob.coeff.iter().enumerate().filter(|(_, c)| !c.is_empty()).map(|(i, c)| (i, c.clone())).collect();
    blocks.push(LmiBlock { side: prob.dim, origin: BlockOrigin::Main, constant: prob.constant.clone(), terms });
    for (i, s) in prob.sign.iter().enumerate() {
        let coef = match s {
            Sign::Free => continue,
            Sign::Nonpositive => -1.0,
            Sign::Nonnegative => 1.0,
        };
        blocks.push(LmiBlock {
            side: 1,
            origin: BlockOrigin::Sign(i),
            constant: SymSparse::new(1),
            terms: vec![(i, scalar(coef))],
        });
    }
    for (k, ineq) in prob.linear.iter().enumerate() {
        blocks.push(LmiBlock {
            side: 1,
            origin: BlockOrigin::Linear(k),
            constant: scalar(ineq.constant),
            terms: ineq.coeffs.iter().map(|&(i, a)| (i, scalar(a))).collect(),
        });
    }
    if let Some(lb) = prob.lower_bound {
        blocks.push(LmiBlock {
            side: 1,
            origin: BlockOrigin::Bound,
            constant: scalar(-lb),
            terms: prob
                .objective
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0.0)
                .map(|(i, &c)| (i, scalar(c)))
                .collect(),
        });
    }
    BlockLmi { vars: prob.vars.clone(), objective: prob.objective.clone(), blocks, start: prob.start.clone() }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub feas_tol: f64,
    pub gap_tol: f64,
    pub max_iter: usize,
    /// Fraction of the distance to the cone boundary taken per step.
    pub step_fraction: f64,
    /// Per-iteration log lines on standard error.
    pub verbose: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { feas_tol: 1e-8, gap_tol: 1e-7, max_iter: 200, step_fraction: 0.98, verbose: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolveStatus {
    Converged,
    IterationLimit,
    NumericalFailure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iter: usize,
    /// Complementarity `⟨X, S⟩`.
    pub gap: f64,
    pub rel_gap: f64,
    pub primal_infeas: f64,
    pub dual_infeas: f64,
    /// Smallest eigenvalue over all blocks of the slack `S`.
    pub min_eig: f64,
    pub step_primal: f64,
    pub step_dual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub objective: f64,
    /// Objective of the conic dual, `−Σ ⟨F_b0, X_b⟩`.
    pub dual_objective: f64,
    pub x: Vec<f64>,
    /// Relative duality gap at exit.
    pub duality_gap: f64,
    /// Smallest eigenvalue over all blocks of `F(x)`.
    pub min_eig: f64,
    pub iterations: usize,
    pub wall_time: Duration,
    pub trace: Vec<IterationRecord>,
    /// Set on `NumericalFailure`.
    pub message: Option<String>,
}

/// Canonicalizes and solves.
pub fn solve_problem(prob: &LmiProblem, opts: &SolveOptions) -> SolveReport {
    solve(&canonicalize(prob), opts)
}
