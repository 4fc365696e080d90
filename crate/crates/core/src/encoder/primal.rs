use nalgebra::DMatrix;

use super::{block_pos, diag_pos, row, EncodeError, LmiProblem, PermutedColoring, Sign, SymSparse, VarId};
use crate::graph::Graph;

/// Objective floor that turns an unbounded program into a bounded one.
pub const DEFAULT_LOWER_BOUND: f64 = -100.0;

/// Off-diagonal positions of a 3×3 block; these carry weight 2 in the
/// objective of an adjacent pair (both orderings of the pair are counted).
const ADJ_OBJECTIVE_POSITIONS: [u8; 6] = [2, 3, 4, 6, 7, 8];

/// Builds the primal program over `D + P ⪰ 0` for graph `g`.
///
/// Variables are added in `VarId` order. The objective sums the per-block
/// terms over ordered vertex pairs, so unordered-pair variables carry the
/// doubled coefficients (2 on adjacent off-diagonal entries, 12 on the
/// non-adjacent scalars).
pub fn build_primal(g: &Graph, lower_bound: Option<f64>) -> LmiProblem {
    let n = g.n();
    let dim = 3 * n + 1;
    let border = 3 * n;
    let mut prob = LmiProblem::new(dim);

    for i in 0..n {
        for k in 1..=6u8 {
            let (a, b) = diag_pos(k);
            let obj = if k <= 3 { 2.0 } else { 0.0 };
            prob.add_var(VarId::DiagD { i, k }, SymSparse::with_entry(dim, row(i, a), row(i, b), 1.0), obj, Sign::Free);
        }
    }
    for &(i, j) in g.edges() {
        for k in 1..=9u8 {
            let (a, b) = block_pos(k);
            let obj = if ADJ_OBJECTIVE_POSITIONS.contains(&k) { 2.0 } else { 0.0 };
            prob.add_var(
                VarId::AdjD { i, j, k },
                SymSparse::with_entry(dim, row(i, a), row(j, b), 1.0),
                obj,
                Sign::Free,
            );
        }
    }
    let non_edges = g.non_edges();
    for &(i, j) in &non_edges {
        let mut c = SymSparse::new(dim);
        for a in 0..3 {
            for b in 0..3 {
                c.push(row(i, a), row(j, b), 1.0);
            }
        }
        prob.add_var(VarId::NonAdjD { i, j }, c, 12.0, Sign::Free);
    }
    for i in 0..n {
        for k in 1..=3u8 {
            let c = SymSparse::with_entry(dim, row(i, (k - 1) as usize), border, 1.0);
            prob.add_var(VarId::BorderD { i, k }, c, 4.0, Sign::Free);
        }
    }
    prob.add_var(VarId::CornerD, SymSparse::with_entry(dim, border, border, 1.0), 6.0, Sign::Free);
    for &(i, j) in &non_edges {
        for k in 1..=9u8 {
            let (a, b) = block_pos(k);
            let c = SymSparse::with_entry(dim, row(i, a), row(j, b), 1.0);
            prob.add_var(VarId::NonAdjP { i, j, k }, c, 0.0, Sign::Nonpositive);
        }
    }
    prob.lower_bound = Some(lower_bound.unwrap_or(DEFAULT_LOWER_BOUND));
    prob.start = Some(identity_pattern(&prob, n));
    prob
}

/// Identity on the vertex diagonal and corner, small negative P entries.
/// The P magnitude keeps every row diagonally dominant.
fn identity_pattern(prob: &LmiProblem, n: usize) -> Vec<f64> {
    let p = -1.0 / (6.0 * n as f64);
    prob.vars
        .iter()
        .map(|v| match v {
            VarId::DiagD { k, .. } if *k <= 3 => 1.0,
            VarId::CornerD => 1.0,
            VarId::NonAdjP { .. } => p,
            _ => 0.0,
        })
        .collect()
}

/// Returns `(Σ_k X⁽ᵏ⁾ D X⁽ᵏ⁾ᵀ, objective)` for an assignment of the D
/// variables. P variables must be zero; they are excluded from both sides.
pub fn identity_sum(
    prob: &LmiProblem,
    g: &Graph,
    d_assignment: &[f64],
    pc: &PermutedColoring,
) -> Result<(f64, f64), EncodeError> {
    pc.base.check_len(g)?;
    if let Some(&e) = pc.base.monochromatic_edges(g).first() {
        return Err(EncodeError::ImproperColoring(e));
    }
    let d_only: Vec<f64> = prob.vars.iter().zip(d_assignment).map(|(v, &x)| if v.is_d() { x } else { 0.0 }).collect();
    let m = prob.assemble_matrix(&d_only)?;
    let lhs = pc.vectors.iter().map(|x| quadratic_form(&m, x)).sum();
    let rhs = prob.objective_value(&d_only)?;
    Ok((lhs, rhs))
}

pub(crate) fn quadratic_form(m: &DMatrix<f64>, x: &[f64]) -> f64 {
    let mut s = 0.0;
    for (r, &xr) in x.iter().enumerate() {
        if xr == 0.0 {
            continue;
        }
        for (c, &xc) in x.iter().enumerate() {
            s += xr * m[(r, c)] * xc;
        }
    }
    s
}
