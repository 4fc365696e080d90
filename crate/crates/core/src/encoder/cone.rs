use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{row, EncodeError};
use crate::graph::Graph;

/// Layout of a structured matrix: the `free` upper-triangle positions may
/// hold anything, every other position must equal `fixed`.
#[derive(Debug, Clone, PartialEq)]
pub struct Template {
    pub dim: usize,
    pub free: BTreeSet<(usize, usize)>,
    pub fixed: DMatrix<f64>,
}

impl Template {
    fn is_free(&self, r: usize, c: usize) -> bool {
        self.free.contains(&(r.min(c), r.max(c)))
    }

    /// First position where `m` leaves the template.
    pub fn check(&self, m: &DMatrix<f64>, tol: f64) -> Result<(), EncodeError> {
        if m.nrows() != self.dim || m.ncols() != self.dim {
            return Err(EncodeError::DimensionMismatch { got: m.nrows(), expected: self.dim });
        }
        for r in 0..self.dim {
            for c in 0..self.dim {
                let asym = (m[(r, c)] - m[(c, r)]).abs() > tol;
                let off = !self.is_free(r, c) && (m[(r, c)] - self.fixed[(r, c)]).abs() > tol;
                if asym || off {
                    return Err(EncodeError::OffTemplate { row: r, col: c });
                }
            }
        }
        Ok(())
    }
}

/// Matrices of the copositive program and its completely positive dual.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeMatrices {
    pub n: usize,
    pub t: f64,
    /// Copositive variable: diagonal, adjacent, border and corner entries
    /// free; non-adjacent blocks fixed at zero.
    pub s_template: Template,
    /// Completely positive variable: non-adjacent blocks free, the rest
    /// fixed like the dual certificate.
    pub b_template: Template,
    /// One matrix per vertex pair `i < j`; zero for non-adjacent pairs.
    pub e: BTreeMap<(usize, usize), DMatrix<f64>>,
}

impl ConeMatrices {
    /// `B + t·Σ_{i<j} E_{i,j}`.
    pub fn k_star_matrix(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        let mut m = b.clone();
        for e in self.e.values() {
            m += e * self.t;
        }
        m
    }
}

fn fill_block(m: &mut DMatrix<f64>, i: usize, j: usize, f: impl Fn(usize, usize) -> f64) {
    for a in 0..3 {
        for b in 0..3 {
            let v = f(a, b);
            m[(row(i, a), row(j, b))] = v;
            m[(row(j, b), row(i, a))] = v;
        }
    }
}

fn two_identity(a: usize, b: usize) -> f64 {
    if a == b {
        2.0
    } else {
        0.0
    }
}

fn ones_minus_identity(a: usize, b: usize) -> f64 {
    if a == b {
        0.0
    } else {
        1.0
    }
}

/// Diagonal 2·I, border 2, corner 6; all pair blocks zero.
fn frame(n: usize) -> DMatrix<f64> {
    let dim = 3 * n + 1;
    let mut m = DMatrix::zeros(dim, dim);
    for i in 0..n {
        fill_block(&mut m, i, i, two_identity);
        for a in 0..3 {
            m[(row(i, a), 3 * n)] = 2.0;
            m[(3 * n, row(i, a))] = 2.0;
        }
    }
    m[(3 * n, 3 * n)] = 6.0;
    m
}

fn s_template(g: &Graph) -> Template {
    let n = g.n();
    let dim = 3 * n + 1;
    let mut s_free = BTreeSet::new();
    for i in 0..n {
        for a in 0..3 {
            for b in a..3 {
                s_free.insert((row(i, a), row(i, b)));
            }
            s_free.insert((row(i, a), 3 * n));
        }
    }
    for &(i, j) in g.edges() {
        for a in 0..3 {
            for b in 0..3 {
                s_free.insert((row(i, a), row(j, b)));
            }
        }
    }
    s_free.insert((3 * n, 3 * n));
    Template { dim, free: s_free, fixed: DMatrix::zeros(dim, dim) }
}

pub fn build_cone_matrices(g: &Graph, t: f64) -> Result<ConeMatrices, EncodeError> {
    if t.is_nan() || t <= 0.0 {
        return Err(EncodeError::Parameter(format!("t must be positive, got {t}")));
    }
    let n = g.n();
    let dim = 3 * n + 1;

    let s_template = s_template(g);

    let mut b_fixed = frame(n);
    for &(i, j) in g.edges() {
        fill_block(&mut b_fixed, i, j, ones_minus_identity);
    }
    let mut b_free = BTreeSet::new();
    for (i, j) in g.non_edges() {
        for a in 0..3 {
            for b in 0..3 {
                b_free.insert((row(i, a), row(j, b)));
            }
        }
    }
    let b_template = Template { dim, free: b_free, fixed: b_fixed };

    let mut e = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            let m = if g.is_adjacent(i, j) {
                let mut m = frame(n);
                for &(k, l) in g.edges() {
                    if (k, l) == (i, j) {
                        fill_block(&mut m, k, l, two_identity);
                    } else {
                        fill_block(&mut m, k, l, ones_minus_identity);
                    }
                }
                m
            } else {
                DMatrix::zeros(dim, dim)
            };
            e.insert((i, j), m);
        }
    }
    Ok(ConeMatrices { n, t, s_template, b_template, e })
}

fn off_diagonal_sum(s: &DMatrix<f64>, i: usize, j: usize) -> f64 {
    let mut sum = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            if a != b {
                sum += s[(row(i, a), row(j, b))];
            }
        }
    }
    sum
}

fn block_trace(s: &DMatrix<f64>, i: usize, j: usize) -> f64 {
    (0..3).map(|a| s[(row(i, a), row(j, a))]).sum()
}

/// Objective of the copositive program, `g + t·Σ_{i<j} p_{i,j}`, where the
/// sum effectively runs over edges (non-adjacent terms vanish).
pub fn evaluate_k_objective(g: &Graph, s: &DMatrix<f64>, t: f64) -> Result<f64, EncodeError> {
    let n = g.n();
    s_template(g).check(s, 1e-12)?;

    let mut base = 0.0;
    for i in 0..n {
        base += 2.0 * block_trace(s, i, i);
        base += 4.0 * (0..3).map(|a| s[(row(i, a), 3 * n)]).sum::<f64>();
    }
    for &(i, j) in g.edges() {
        base += off_diagonal_sum(s, i, j) + off_diagonal_sum(s, j, i);
    }
    base += 6.0 * s[(3 * n, 3 * n)];

    let penalty: f64 =
        g.edges().iter().map(|&(i, j)| base - 2.0 * off_diagonal_sum(s, i, j) + 4.0 * block_trace(s, i, j)).sum();
    Ok(base + t * penalty)
}

/// Coefficients of the quadratic form behind the copositive candidate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct S2Params {
    /// Weight of same-color products across an edge.
    pub a: f64,
    /// Weight of different-color products across an edge.
    pub b: f64,
    /// Weight of `Σ(xᵢ+yᵢ+zᵢ−1)²`.
    pub c3: f64,
    /// Weight of `Σ(xᵢyᵢ+xᵢzᵢ+yᵢzᵢ)`.
    pub c4: f64,
}

impl S2Params {
    /// `a = m`, `b = −1/2`, `C₃ = C₄ = 10`.
    pub fn defaults_for(m: usize) -> Self {
        S2Params { a: m as f64, b: -0.5, c3: 10.0, c4: 10.0 }
    }
}

/// `m·b + m·(a + (m−1)·b)·t` scaled by 6: the objective value the copositive
/// candidate attains.
pub fn predicted_k_objective(m: usize, p: &S2Params, t: f64) -> f64 {
    let m = m as f64;
    6.0 * (m * p.b + m * (p.a + (m - 1.0) * p.b) * t)
}

/// Symmetric matrix `Q` of the quadratic form
///
/// ```text
/// Σ_edges [a·(same-color products) + b·(cross-color products)]
///     + C₃·Σ(xᵢ+yᵢ+zᵢ−1)² + C₄·Σ(xᵢyᵢ+xᵢzᵢ+yᵢzᵢ)
/// ```
///
/// in `(x₁,y₁,z₁, …, xₙ,yₙ,zₙ, 1)`, so that `wᵀQw` equals the form.
/// Cross terms are split evenly between the two mirror entries.
pub fn build_s2(g: &Graph, p: &S2Params) -> Result<DMatrix<f64>, EncodeError> {
    let m = g.m() as f64;
    if p.b > 0.0 {
        return Err(EncodeError::Parameter(format!("need b <= 0, got {}", p.b)));
    }
    if p.a + (m - 1.0) * p.b < 0.0 {
        return Err(EncodeError::Parameter(format!("need a + (m-1)b >= 0, got {}", p.a + (m - 1.0) * p.b)));
    }
    if p.c3 < 0.0 || p.c4 < 0.0 {
        return Err(EncodeError::Parameter("C3 and C4 must be nonnegative".into()));
    }
    let n = g.n();
    let dim = 3 * n + 1;
    let mut q = DMatrix::zeros(dim, dim);
    for &(i, j) in g.edges() {
        fill_block(&mut q, i, j, |a, b| if a == b { p.a / 2.0 } else { p.b / 2.0 });
    }
    for i in 0..n {
        fill_block(&mut q, i, i, |a, b| if a == b { p.c3 } else { p.c3 + p.c4 / 2.0 });
        for a in 0..3 {
            q[(row(i, a), 3 * n)] = -p.c3;
            q[(3 * n, row(i, a))] = -p.c3;
        }
    }
    q[(3 * n, 3 * n)] = p.c3 * n as f64;
    Ok(q)
}
