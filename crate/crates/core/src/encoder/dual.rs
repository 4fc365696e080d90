use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{block_pos, row, EncodeError, LinearIneq, LmiProblem, PermutedColoring, Sign, SymSparse, VarId};
use crate::graph::Graph;
use crate::linalg::min_eigenvalue_unchecked;

/// Dual matrix: fixed blocks implied by the graph plus nonnegative free
/// entries on non-adjacent pairs, keyed by `(i, j, k)` with `i < j`, k = 1..9.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualCertificate {
    pub n: usize,
    pub free: BTreeMap<(usize, usize, u8), f64>,
}

impl DualCertificate {
    pub fn assemble(&self, g: &Graph) -> DMatrix<f64> {
        let mut z = fixed_dual_part(g).to_dense();
        for (&(i, j, k), &v) in &self.free {
            let (a, b) = block_pos(k);
            z[(row(i, a), row(j, b))] = v;
            z[(row(j, b), row(i, a))] = v;
        }
        z
    }
}

/// Fixed part of the dual matrix: 2·I diagonal blocks, ones-minus-identity
/// adjacent blocks, border 2 and corner 6. Non-adjacent blocks are zero.
pub(crate) fn fixed_dual_part(g: &Graph) -> SymSparse {
    let n = g.n();
    let dim = 3 * n + 1;
    let mut s = SymSparse::new(dim);
    for i in 0..n {
        for a in 0..3 {
            s.push(row(i, a), row(i, a), 2.0);
            s.push(row(i, a), 3 * n, 2.0);
        }
    }
    for &(i, j) in g.edges() {
        for a in 0..3 {
            for b in 0..3 {
                if a != b {
                    s.push(row(i, a), row(j, b), 1.0);
                }
            }
        }
    }
    s.push(3 * n, 3 * n, 6.0);
    s
}

/// `Z = Σ_k X⁽ᵏ⁾ᵀX⁽ᵏ⁾` from a proper coloring, split into certificate form.
pub fn coloring_to_dual(pc: &PermutedColoring, g: &Graph) -> Result<(DualCertificate, DMatrix<f64>), EncodeError> {
    pc.base.check_len(g)?;
    if let Some(&e) = pc.base.monochromatic_edges(g).first() {
        return Err(EncodeError::ImproperColoring(e));
    }
    let side = 3 * g.n() + 1;
    let mut z = DMatrix::zeros(side, side);
    for v in &pc.vectors {
        let x = DVector::from_column_slice(v);
        z += &x * x.transpose();
    }
    let mut free = BTreeMap::new();
    for (i, j) in g.non_edges() {
        for k in 1..=9u8 {
            let (a, b) = block_pos(k);
            free.insert((i, j, k), z[(row(i, a), row(j, b))]);
        }
    }
    Ok((DualCertificate { n: g.n(), free }, z))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DualConstraint {
    /// Positive semidefinite.
    Psd,
    /// Every 3×3 vertex block sums to 6.
    BlockSums,
    Symmetric,
    /// Vertex diagonal blocks equal 2·I.
    DiagonalBlocks,
    /// Border entries equal 2.
    Border,
    /// Corner equals 6.
    Corner,
    /// Adjacent blocks have zero diagonal and ones elsewhere.
    AdjacentBlocks,
    /// Non-adjacent block entries are nonnegative.
    NonAdjacentNonnegative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualCheck {
    pub constraint: DualConstraint,
    pub passed: bool,
    /// Largest violation observed (0 when exact).
    pub worst: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualValidation {
    pub checks: Vec<DualCheck>,
    pub min_eig: f64,
}

impl DualValidation {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, c: DualConstraint) -> &DualCheck {
        self.checks.iter().find(|k| k.constraint == c).expect("every constraint is checked")
    }
}

/// Checks each dual constraint independently.
pub fn validate_dual(z: &DMatrix<f64>, g: &Graph, tol: f64) -> Result<DualValidation, EncodeError> {
    let n = g.n();
    let side = 3 * n + 1;
    if z.nrows() != side || z.ncols() != side {
        return Err(EncodeError::DimensionMismatch { got: z.nrows().max(z.ncols()), expected: side });
    }
    let border = 3 * n;
    let mut worst = BTreeMap::new();
    let mut note = |c: DualConstraint, v: f64| {
        let w = worst.entry(c as u8).or_insert((c, 0.0f64));
        w.1 = w.1.max(v);
    };

    for r in 0..side {
        for c in 0..side {
            note(DualConstraint::Symmetric, (z[(r, c)] - z[(c, r)]).abs());
        }
    }
    let sym = (z + z.transpose()) * 0.5;
    let min_eig = min_eigenvalue_unchecked(&sym);
    note(DualConstraint::Psd, (-min_eig).max(0.0));

    for i in 0..n {
        for j in 0..n {
            let block = z.view((3 * i, 3 * j), (3, 3));
            note(DualConstraint::BlockSums, (block.sum() - 6.0).abs());
            for a in 0..3 {
                for b in 0..3 {
                    let v = block[(a, b)];
                    if i == j {
                        let target = if a == b { 2.0 } else { 0.0 };
                        note(DualConstraint::DiagonalBlocks, (v - target).abs());
                    } else if g.is_adjacent(i, j) {
                        let target = if a == b { 0.0 } else { 1.0 };
                        note(DualConstraint::AdjacentBlocks, (v - target).abs());
                    } else {
                        note(DualConstraint::NonAdjacentNonnegative, (-v).max(0.0));
                    }
                }
            }
        }
        for a in 0..3 {
            note(DualConstraint::Border, (z[(row(i, a), border)] - 2.0).abs());
            note(DualConstraint::Border, (z[(border, row(i, a))] - 2.0).abs());
        }
    }
    note(DualConstraint::Corner, (z[(border, border)] - 6.0).abs());
    // constraints that had nothing to check (e.g. no edges) pass trivially
    for c in [DualConstraint::AdjacentBlocks, DualConstraint::NonAdjacentNonnegative] {
        note(c, 0.0);
    }

    let checks =
        worst.into_values().map(|(constraint, w)| DualCheck { constraint, passed: w <= tol, worst: w }).collect();
    Ok(DualValidation { checks, min_eig })
}

/// Auxiliary program deciding dual feasibility:
/// minimize `τ` subject to `Z(z) + τ·I ⪰ 0`, `z ≥ 0`, every non-adjacent
/// block summing to 6. The ninth entry of each free block is eliminated as
/// `6 − Σ_{k≤8} z_k`, which adds the scalar constraint that it stays ≥ 0.
/// The dual is feasible iff the optimal `τ` is ≤ 0.
pub fn build_dual_feasibility(g: &Graph) -> LmiProblem {
    let n = g.n();
    let dim = 3 * n + 1;
    let mut prob = LmiProblem::new(dim);
    let mut constant = fixed_dual_part(g);
    let non_edges = g.non_edges();
    let (r9, c9) = block_pos(9);
    for &(i, j) in &non_edges {
        constant.push(row(i, r9), row(j, c9), 6.0);
        let mut ninth = LinearIneq { constant: 6.0, coeffs: Vec::with_capacity(8) };
        for k in 1..=8u8 {
            let (a, b) = block_pos(k);
            let mut c = SymSparse::new(dim);
            c.push(row(i, a), row(j, b), 1.0);
            c.push(row(i, r9), row(j, c9), -1.0);
            let pos = prob.add_var(VarId::DualZ { i, j, k }, c, 0.0, Sign::Nonnegative);
            ninth.coeffs.push((pos, -1.0));
        }
        prob.linear.push(ninth);
    }
    prob.constant = constant;
    let mut identity = SymSparse::new(dim);
    for r in 0..dim {
        identity.push(r, r, 1.0);
    }
    let tau = prob.add_var(VarId::Tau, identity, 1.0, Sign::Free);

    // uniform free blocks, shifted to be strictly positive definite
    let mut start = vec![6.0 / 9.0; prob.num_vars()];
    start[tau] = 0.0;
    let z0 = prob.assemble_matrix(&start).expect("start has full length");
    start[tau] = (1.0 - min_eigenvalue_unchecked(&z0)).max(1.0);
    prob.start = Some(start);
    prob
}

/// `max |Z v|` for `v = [Q₁,Q₁,Q₁, …, Qₙ,Qₙ,Qₙ, x₀]`.
pub fn kernel_residual(z: &DMatrix<f64>, q: &[f64], x0: f64) -> f64 {
    let n = q.len();
    let mut v = DVector::zeros(3 * n + 1);
    for (i, &qi) in q.iter().enumerate() {
        for a in 0..3 {
            v[3 * i + a] = qi;
        }
    }
    v[3 * n] = x0;
    (z * v).amax()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelReport {
    pub samples: usize,
    pub max_residual: f64,
}

/// Samples `Q ∈ [-1, 1]ⁿ`, sets `x₀ = −ΣQ`, and reports the largest `|Z v|`.
pub fn kernel_check(z: &DMatrix<f64>, n: usize, samples: usize, seed: u64) -> Result<KernelReport, EncodeError> {
    if z.nrows() != 3 * n + 1 || !z.is_square() {
        return Err(EncodeError::DimensionMismatch { got: z.nrows(), expected: 3 * n + 1 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_residual: f64 = 0.0;
    for _ in 0..samples {
        let q: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let x0 = -q.iter().sum::<f64>();
        max_residual = max_residual.max(kernel_residual(z, &q, x0));
    }
    Ok(KernelReport { samples, max_residual })
}
