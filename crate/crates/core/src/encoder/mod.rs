//! Builders for the 3-colorability programs: the primal LMI over a graph,
//! its dual certificate, the copositive/completely-positive companion
//! matrices and the coloring-vector machinery they are tested against.
//!
//! Matrix layout: vertex `i` (0-based) owns rows `3i, 3i+1, 3i+2`, one per
//! color; the last row/column (index `3n`) is the border/corner.

mod coloring;
mod cone;
mod dual;
mod primal;

use std::collections::HashMap;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::GraphError;

pub use coloring::{dcoloring_matrix, permuted, DColoringMatrix, PermutedColoring, COLOR_PERMUTATIONS};
pub use cone::{
    build_cone_matrices, build_s2, evaluate_k_objective, predicted_k_objective, ConeMatrices, S2Params, Template,
};
pub use dual::{
    build_dual_feasibility, coloring_to_dual, kernel_check, kernel_residual, validate_dual, DualCertificate, DualCheck,
    DualConstraint, DualValidation, KernelReport,
};
pub use primal::{build_primal, identity_sum, DEFAULT_LOWER_BOUND};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EncodeError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("assignment has {got} values, problem has {expected} variables")]
    AssignmentLength { got: usize, expected: usize },
    #[error("variable {0} is not part of this problem")]
    UnknownVariable(VarId),
    #[error("coloring is not proper: edge ({}, {}) is monochromatic", .0 .0 + 1, .0 .1 + 1)]
    ImproperColoring((usize, usize)),
    #[error("matrix has side {got}, expected {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("matrix does not fit the template at ({row}, {col})")]
    OffTemplate { row: usize, col: usize },
    #[error("parameter constraint violated: {0}")]
    Parameter(String),
}

/// Decision variables of the encoded programs. Vertex indices are 0-based
/// with `i < j`; `k` is the 1-based position label inside a block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VarId {
    /// Diagonal vertex block entry; k = 1..3 diagonal, 4 = (1,2), 5 = (1,3), 6 = (2,3).
    DiagD {
        i: usize,
        k: u8,
    },
    /// Adjacent-pair block entry, row-major k = 1..9.
    AdjD {
        i: usize,
        j: usize,
        k: u8,
    },
    /// Scalar multiplying the all-ones block of a non-adjacent pair.
    NonAdjD {
        i: usize,
        j: usize,
    },
    /// Border entry of vertex `i`, k = 1..3.
    BorderD {
        i: usize,
        k: u8,
    },
    CornerD,
    /// Nonpositive entry of a non-adjacent pair block, row-major k = 1..9.
    NonAdjP {
        i: usize,
        j: usize,
        k: u8,
    },
    /// Free entry k = 1..8 of a non-adjacent dual block; entry 9 is eliminated.
    DualZ {
        i: usize,
        j: usize,
        k: u8,
    },
    /// Identity shift of the dual feasibility program.
    Tau,
}

impl VarId {
    pub fn is_d(&self) -> bool {
        matches!(
            self,
            VarId::DiagD { .. } | VarId::AdjD { .. } | VarId::NonAdjD { .. } | VarId::BorderD { .. } | VarId::CornerD
        )
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            VarId::DiagD { i, k } => write!(f, "d[{},{},{k}]", i + 1, i + 1),
            VarId::AdjD { i, j, k } => write!(f, "d[{},{},{k}]", i + 1, j + 1),
            VarId::NonAdjD { i, j } => write!(f, "d[{},{}]", i + 1, j + 1),
            VarId::BorderD { i, k } => write!(f, "d[{},n+1,{k}]", i + 1),
            VarId::CornerD => write!(f, "d[n+1,n+1]"),
            VarId::NonAdjP { i, j, k } => write!(f, "p[{},{},{k}]", i + 1, j + 1),
            VarId::DualZ { i, j, k } => write!(f, "z[{},{},{k}]", i + 1, j + 1),
            VarId::Tau => write!(f, "tau"),
        }
    }
}

/// Sparse symmetric matrix stored as upper-triangle entries `(row, col, v)`
/// with `row <= col`; an off-diagonal entry stands for both mirror positions.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SymSparse {
    pub dim: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl SymSparse {
    pub fn new(dim: usize) -> Self {
        SymSparse { dim, entries: Vec::new() }
    }

    /// Adds `v` at `(r, c)` and its mirror.
    pub fn push(&mut self, r: usize, c: usize, v: f64) {
        assert!(r < self.dim && c < self.dim, "entry ({r}, {c}) outside side {}", self.dim);
        self.entries.push((r.min(c), r.max(c), v));
    }

    pub fn with_entry(dim: usize, r: usize, c: usize, v: f64) -> Self {
        let mut s = SymSparse::new(dim);
        s.push(r, c, v);
        s
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds `scale * self` into `m`, writing each off-diagonal value to both
    /// mirror positions.
    pub fn add_to(&self, m: &mut DMatrix<f64>, scale: f64) {
        for &(r, c, v) in &self.entries {
            m[(r, c)] += scale * v;
            if r != c {
                m[(c, r)] += scale * v;
            }
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        self.add_to(&mut m, 1.0);
        m
    }

    /// `tr(self * b)` for a possibly non-symmetric dense `b`.
    pub fn trace_with(&self, b: &DMatrix<f64>) -> f64 {
        self.entries.iter().map(|&(r, c, v)| if r == c { v * b[(r, r)] } else { v * (b[(r, c)] + b[(c, r)]) }).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|&(r, c, v)| if r == c { v * v } else { 2.0 * v * v }).sum::<f64>().sqrt()
    }
}

/// Sign restriction of a variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Free,
    Nonpositive,
    Nonnegative,
}

/// Scalar inequality `constant + Σ coeffs·x ≥ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearIneq {
    pub constant: f64,
    pub coeffs: Vec<(usize, f64)>,
}

/// Affinely parametrized symmetric-matrix program:
/// minimize `Σ objective·x` subject to `constant + Σ x_v·coeff_v ⪰ 0`, sign
/// restrictions, scalar inequalities and an optional objective lower bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LmiProblem {
    pub dim: usize,
    pub vars: Vec<VarId>,
    pub coeff: Vec<SymSparse>,
    pub objective: Vec<f64>,
    pub sign: Vec<Sign>,
    pub constant: SymSparse,
    pub linear: Vec<LinearIneq>,
    pub lower_bound: Option<f64>,
    /// Known strictly feasible point, if any.
    pub start: Option<Vec<f64>>,
    #[serde(skip)]
    index: HashMap<VarId, usize>,
}

impl LmiProblem {
    pub fn new(dim: usize) -> Self {
        LmiProblem {
            dim,
            vars: Vec::new(),
            coeff: Vec::new(),
            objective: Vec::new(),
            sign: Vec::new(),
            constant: SymSparse::new(dim),
            linear: Vec::new(),
            lower_bound: None,
            start: None,
            index: HashMap::new(),
        }
    }

    /// Appends a variable and returns its position.
    pub fn add_var(&mut self, id: VarId, coeff: SymSparse, objective: f64, sign: Sign) -> usize {
        assert_eq!(coeff.dim, self.dim);
        let pos = self.vars.len();
        let prev = self.index.insert(id, pos);
        assert!(prev.is_none(), "duplicate variable {id}");
        self.vars.push(id);
        self.coeff.push(coeff);
        self.objective.push(objective);
        self.sign.push(sign);
        pos
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn index_of(&self, id: &VarId) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn count_sign(&self, sign: Sign) -> usize {
        self.sign.iter().filter(|&&s| s == sign).count()
    }

    /// Dense assignment with the listed values and zero elsewhere.
    pub fn assignment(&self, values: &[(VarId, f64)]) -> Result<Vec<f64>, EncodeError> {
        let mut x = vec![0.0; self.num_vars()];
        for (id, v) in values {
            let k = self.index_of(id).ok_or(EncodeError::UnknownVariable(*id))?;
            x[k] = *v;
        }
        Ok(x)
    }

    fn check_len(&self, x: &[f64]) -> Result<(), EncodeError> {
        if x.len() != self.num_vars() {
            return Err(EncodeError::AssignmentLength { got: x.len(), expected: self.num_vars() });
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[f64]) -> Result<f64, EncodeError> {
        self.check_len(x)?;
        Ok(self.objective.iter().zip(x).map(|(c, v)| c * v).sum())
    }

    /// `constant + Σ x_v·coeff_v`, exactly symmetric.
    pub fn assemble_matrix(&self, x: &[f64]) -> Result<DMatrix<f64>, EncodeError> {
        self.check_len(x)?;
        let mut m = self.constant.to_dense();
        for (c, &v) in self.coeff.iter().zip(x) {
            if v != 0.0 {
                c.add_to(&mut m, v);
            }
        }
        Ok(m)
    }

    /// Rebuilds the lookup table after deserialization.
    pub fn reindex(&mut self) {
        self.index = self.vars.iter().enumerate().map(|(k, v)| (*v, k)).collect();
    }
}

/// Row of color `c` of vertex `i`.
#[inline]
pub(crate) fn row(i: usize, c: usize) -> usize {
    3 * i + c
}

/// Row/column position of entry `k` (1..9, row-major) inside a 3×3 block.
#[inline]
pub(crate) fn block_pos(k: u8) -> (usize, usize) {
    let k = (k - 1) as usize;
    (k / 3, k % 3)
}

/// Position of a diagonal-block label `k` (1..6).
#[inline]
pub(crate) fn diag_pos(k: u8) -> (usize, usize) {
    match k {
        1 => (0, 0),
        2 => (1, 1),
        3 => (2, 2),
        4 => (0, 1),
        5 => (0, 2),
        6 => (1, 2),
        _ => panic!("diagonal block label {k} out of range"),
    }
}

/// 3×3 block `(bi, bj)` of a `(3n+1)`-sided matrix.
pub fn vertex_block(m: &DMatrix<f64>, bi: usize, bj: usize) -> DMatrix<f64> {
    m.view((3 * bi, 3 * bj), (3, 3)).into_owned()
}
