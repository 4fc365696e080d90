//! Desk-scale copositivity and complete-positivity tests.
//!
//! Copositivity is searched by subdividing the standard simplex: a simplex
//! with vertex matrix `V` is certified when `VᵀAV` is entrywise nonnegative
//! (or positive semidefinite), and any point found with a negative form
//! value is returned as a witness. Complete positivity is attempted with a
//! multiplicative-update symmetric nonnegative factorization; failing to
//! find a factor is reported as inconclusive, never as a negative result.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::encoder::{build_s2, evaluate_k_objective, predicted_k_objective, EncodeError, S2Params};
use crate::graph::{is_d_graph, Graph, GraphError};
use crate::linalg::{check_symmetric, min_eigenvalue_unchecked, AsymmetricMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConeError {
    #[error(transparent)]
    Asymmetric(#[from] AsymmetricMatrix),
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("graph is not a D-graph (non-3-colorable with every single-edge deletion 3-colorable)")]
    NotDGraph,
    #[error("diagonal entry {0} is negative")]
    NegativeDiagonal(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CopositivityVerdict {
    /// Every simplex was certified; `depth` is the deepest subdivision used.
    Copositive { depth: usize },
    /// `witness ≥ 0`, `‖witness‖₁ = 1`, `witnessᵀ A witness = value < 0`.
    NotCopositive { witness: Vec<f64>, value: f64 },
    /// Some simplex was still uncertified at `depth`.
    Unknown { depth: usize },
}

impl CopositivityVerdict {
    pub fn is_copositive(&self) -> bool {
        matches!(self, CopositivityVerdict::Copositive { .. })
    }
}

/// Suggested subdivision depth for a matrix of the given side.
pub fn default_max_depth(side: usize) -> usize {
    if side <= 6 {
        12
    } else {
        4
    }
}

pub fn quadratic_form(a: &DMatrix<f64>, x: &[f64]) -> f64 {
    let v = DVector::from_column_slice(x);
    v.dot(&(a * &v))
}

struct Simplex {
    vertices: Vec<DVector<f64>>,
    depth: usize,
}

pub fn is_copositive(a: &DMatrix<f64>, max_depth: usize) -> Result<CopositivityVerdict, ConeError> {
    check_symmetric(a)?;
    let n = a.nrows();
    // form values above -tol are treated as rounding noise
    let tol = 1e-12 * a.amax().max(1.0);

    let witness = |x: DVector<f64>| -> Option<CopositivityVerdict> {
        let s = x.sum();
        let x = x / s;
        let value = x.dot(&(a * &x));
        (value < -tol).then(|| CopositivityVerdict::NotCopositive { witness: x.iter().copied().collect(), value })
    };

    if a.iter().all(|&v| v >= 0.0) {
        return Ok(CopositivityVerdict::Copositive { depth: 0 });
    }

    let mut stack =
        vec![Simplex { vertices: (0..n).map(|k| DVector::from_fn(n, |r, _| f64::from(r == k))).collect(), depth: 0 }];
    let mut deepest = 0;
    let mut exhausted = false;
    while let Some(simplex) = stack.pop() {
        deepest = deepest.max(simplex.depth);
        let v = DMatrix::from_columns(&simplex.vertices);
        let q = v.transpose() * a * &v;

        for k in 0..n {
            if q[(k, k)] < -tol {
                if let Some(w) = witness(simplex.vertices[k].clone()) {
                    return Ok(w);
                }
            }
        }
        // best point on each edge with a negative off-diagonal entry
        for r in 0..n {
            for c in r + 1..n {
                if q[(r, c)] >= 0.0 {
                    continue;
                }
                let denom = q[(r, r)] - 2.0 * q[(r, c)] + q[(c, c)];
                if denom <= 0.0 {
                    continue;
                }
                let lam = ((q[(c, c)] - q[(r, c)]) / denom).clamp(0.0, 1.0);
                let edge_min =
                    lam * lam * q[(r, r)] + 2.0 * lam * (1.0 - lam) * q[(r, c)] + (1.0 - lam).powi(2) * q[(c, c)];
                if edge_min < -tol {
                    let p = &simplex.vertices[r] * lam + &simplex.vertices[c] * (1.0 - lam);
                    if let Some(w) = witness(p) {
                        return Ok(w);
                    }
                }
            }
        }

        if q.iter().all(|&x| x >= -tol) || min_eigenvalue_unchecked(&q) >= -tol {
            continue;
        }
        if simplex.depth >= max_depth {
            exhausted = true;
            continue;
        }

        let (mut ea, mut eb, mut best) = (0, 1, -1.0);
        for r in 0..n {
            for c in r + 1..n {
                let len = (&simplex.vertices[r] - &simplex.vertices[c]).norm_squared();
                if len > best {
                    (ea, eb, best) = (r, c, len);
                }
            }
        }
        let mid = (&simplex.vertices[ea] + &simplex.vertices[eb]) * 0.5;
        if let Some(w) = witness(mid.clone()) {
            return Ok(w);
        }
        for replaced in [eb, ea] {
            let mut vertices = simplex.vertices.clone();
            vertices[replaced] = mid.clone();
            stack.push(Simplex { vertices, depth: simplex.depth + 1 });
        }
    }
    Ok(if exhausted {
        CopositivityVerdict::Unknown { depth: deepest }
    } else {
        CopositivityVerdict::Copositive { depth: deepest }
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum CpOutcome {
    /// `C ≥ 0` entrywise with `‖CᵀC − A‖_F ≤ 1e-6·(1 + ‖A‖_F)`.
    Factor {
        c: DMatrix<f64>,
        residual: f64,
    },
    Inconclusive {
        residual: f64,
    },
}

/// Relative reconstruction tolerance for accepting a factor.
pub const CP_TOLERANCE: f64 = 1e-6;

pub fn default_rank_budget(side: usize) -> usize {
    2 * side
}

fn reconstruction_error(h: &DMatrix<f64>, a: &DMatrix<f64>) -> f64 {
    (h * h.transpose() - a).norm()
}

/// Searches for `C ≥ 0` with `CᵀC = A`. Starts from `init` when given
/// (rows are factor rows), else from `|L|ᵀ` of a Cholesky factorization when
/// `A` is positive definite, else from a seeded random nonnegative matrix.
pub fn cp_factor_attempt(
    a: &DMatrix<f64>,
    rank_budget: usize,
    iters: usize,
    init: Option<&DMatrix<f64>>,
) -> Result<CpOutcome, ConeError> {
    check_symmetric(a)?;
    let n = a.nrows();
    if let Some(k) = (0..n).find(|&k| a[(k, k)] < 0.0) {
        return Err(ConeError::NegativeDiagonal(k));
    }
    let rank = rank_budget.max(1);
    // h = Cᵀ, n × rank
    let mut h = match (init, Cholesky::new(a.clone())) {
        (Some(c), _) => c.transpose().map(f64::abs),
        (None, Some(ch)) => {
            let l = ch.l().map(f64::abs);
            let mut h = DMatrix::zeros(n, rank.max(n));
            h.view_mut((0, 0), (n, n)).copy_from(&l);
            h
        }
        (None, None) => {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            let scale = (a.diagonal().mean().max(1e-12) / rank as f64).sqrt();
            DMatrix::from_fn(n, rank, |_, _| rng.gen::<f64>() * scale)
        }
    };
    let threshold = CP_TOLERANCE * (1.0 + a.norm());
    let a_plus = a.map(|v| v.max(0.0));
    let a_minus = a.map(|v| (-v).max(0.0));
    let mut residual = reconstruction_error(&h, a);
    for _ in 0..iters {
        if residual <= threshold {
            break;
        }
        // symmetric NMF multiplicative update, split A = A⁺ − A⁻
        let num = &a_plus * &h;
        let den = &h * (h.transpose() * &h) + &a_minus * &h;
        for (v, (nu, de)) in h.iter_mut().zip(num.iter().zip(den.iter())) {
            *v *= 0.5 + 0.5 * nu / de.max(1e-300);
        }
        residual = reconstruction_error(&h, a);
    }
    if residual <= threshold {
        let c = h.transpose();
        let keep: Vec<usize> = (0..c.nrows()).filter(|&r| c.row(r).iter().any(|&v| v != 0.0)).collect();
        let c = c.select_rows(&keep);
        Ok(CpOutcome::Factor { c, residual })
    } else {
        Ok(CpOutcome::Inconclusive { residual })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CopositiveProbeReport {
    pub n: usize,
    pub m: usize,
    pub params: S2Params,
    pub t: f64,
    pub verdict: CopositivityVerdict,
    pub objective: f64,
    pub predicted: f64,
    pub residual: f64,
}

/// Builds the copositive candidate for a D-graph, tests it, and compares the
/// attained objective with the closed-form prediction.
pub fn probe_copositive_program(
    g: &Graph,
    params: &S2Params,
    t: f64,
    max_depth: usize,
) -> Result<CopositiveProbeReport, ConeError> {
    if !is_d_graph(g)? {
        return Err(ConeError::NotDGraph);
    }
    if t.is_nan() || t <= 0.0 {
        return Err(EncodeError::Parameter(format!("t must be positive, got {t}")).into());
    }
    let s = build_s2(g, params)?;
    let verdict = is_copositive(&s, max_depth)?;
    let objective = evaluate_k_objective(g, &s, t)?;
    let predicted = predicted_k_objective(g.m(), params, t);
    Ok(CopositiveProbeReport {
        n: g.n(),
        m: g.m(),
        params: *params,
        t,
        verdict,
        objective,
        predicted,
        residual: (objective - predicted).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::{dcoloring_matrix, permuted};
    use crate::graph::{generate, Coloring, GraphKind};

    #[test]
    fn identity_and_nonnegative_are_copositive() {
        assert!(is_copositive(&DMatrix::identity(5, 5), 12).unwrap().is_copositive());
        let nn = DMatrix::from_fn(4, 4, |r, c| (r + c) as f64);
        assert_eq!(is_copositive(&nn, 12).unwrap(), CopositivityVerdict::Copositive { depth: 0 });
    }

    #[test]
    fn two_by_two_counterexample() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, -2.0, -2.0, 1.0]);
        match is_copositive(&a, 12).unwrap() {
            CopositivityVerdict::NotCopositive { witness, value } => {
                assert!((witness[0] - 0.5).abs() < 1e-12 && (witness[1] - 0.5).abs() < 1e-12);
                assert!((value + 0.5).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn horn_matrix_is_copositive_but_not_psd_plus_nonnegative() {
        // classic copositive matrix outside PSD + NN; needs subdivision
        let h = DMatrix::from_row_slice(
            5,
            5,
            &[
                1.0, -1.0, 1.0, 1.0, -1.0, -1.0, 1.0, -1.0, 1.0, 1.0, 1.0, -1.0, 1.0, -1.0, 1.0, 1.0, 1.0, -1.0, 1.0,
                -1.0, -1.0, 1.0, 1.0, -1.0, 1.0,
            ],
        );
        let v = is_copositive(&h, 12).unwrap();
        assert!(!matches!(v, CopositivityVerdict::NotCopositive { .. }), "{v:?}");
        let mut shifted = h.clone();
        shifted[(0, 1)] -= 0.2;
        shifted[(1, 0)] -= 0.2;
        assert!(matches!(is_copositive(&shifted, 12).unwrap(), CopositivityVerdict::NotCopositive { .. }));
    }

    #[test]
    fn rejects_asymmetric_input() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 1.0]);
        assert!(is_copositive(&a, 3).is_err());
    }

    #[test]
    fn diagonal_factor() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0, 3.0]));
        match cp_factor_attempt(&a, 6, 100, None).unwrap() {
            CpOutcome::Factor { c, .. } => {
                let expected = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2f64.sqrt(), 3f64.sqrt()]));
                assert!((c - expected).amax() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn coloring_matrix_factor_is_recovered() {
        let pc = permuted(&Coloring::new(vec![0, 0, 1, 2]).unwrap(), 4).unwrap();
        let d = dcoloring_matrix(&pc);
        match cp_factor_attempt(&d.matrix, 26, 10, Some(&d.factor)).unwrap() {
            CpOutcome::Factor { c, residual } => {
                assert!(residual <= 1e-12);
                assert!(c.iter().all(|&v| v >= 0.0));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nonnegative_cholesky_start_is_exact() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        match cp_factor_attempt(&a, 4, 0, None).unwrap() {
            CpOutcome::Factor { c, residual } => {
                assert!(residual < 1e-12);
                assert_eq!(c.nrows(), 2);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn random_start_reduces_error() {
        let v = DVector::from_vec(vec![1.0, 2.0, 0.5]);
        let a = &v * v.transpose();
        let residual = |iters| match cp_factor_attempt(&a, 3, iters, None).unwrap() {
            CpOutcome::Factor { residual, .. } | CpOutcome::Inconclusive { residual } => residual,
        };
        assert!(residual(2000) < 1e-2 * residual(0));
    }

    #[test]
    fn k4_b_template_is_recorded() {
        let k4 = generate(&GraphKind::Complete(4)).unwrap();
        let cm = crate::encoder::build_cone_matrices(&k4, 1.0).unwrap();
        let b = cm.k_star_matrix(&cm.b_template.fixed);
        match cp_factor_attempt(&b, default_rank_budget(b.nrows()), 2000, None).unwrap() {
            CpOutcome::Factor { c, residual } => {
                assert!(c.iter().all(|&v| v >= 0.0));
                assert!(residual <= CP_TOLERANCE * (1.0 + b.norm()));
            }
            CpOutcome::Inconclusive { residual } => assert!(residual.is_finite()),
        }
    }

    #[test]
    fn probe_requires_d_graph() {
        let c5 = generate(&GraphKind::Cycle(5)).unwrap();
        assert_eq!(probe_copositive_program(&c5, &S2Params::defaults_for(5), 1.0, 2), Err(ConeError::NotDGraph));
    }

    #[test]
    fn probe_k4_arithmetic() {
        let k4 = generate(&GraphKind::Complete(4)).unwrap();
        let p = S2Params { a: 6.0, b: -1.0, c3: 10.0, c4: 10.0 };
        let r = probe_copositive_program(&k4, &p, 5.0 / 6.0, 2).unwrap();
        assert!((r.predicted + 6.0).abs() < 1e-12);
        assert!(r.residual < 1e-9);
    }
}
