use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sdp3color::encoder::{build_dual_feasibility, build_primal, SymSparse, VarId};
use sdp3color::graph::{generate, Graph, GraphKind};
use sdp3color::linalg::min_eigenvalue;
use sdp3color::solver::{solve, solve_problem, BlockLmi, BlockOrigin, LmiBlock, SolveOptions, SolveStatus};

fn label(k: u8) -> VarId {
    VarId::DualZ { i: 0, j: 1, k }
}

/// minimize x subject to [x] ⪰ 0
fn scalar_sdp() -> BlockLmi {
    BlockLmi {
        vars: vec![label(1)],
        objective: vec![1.0],
        blocks: vec![LmiBlock {
            side: 1,
            origin: BlockOrigin::Main,
            constant: SymSparse::new(1),
            terms: vec![(0, SymSparse::with_entry(1, 0, 0, 1.0))],
        }],
        start: None,
    }
}

/// minimize x₁₁ + x₂₂ subject to [[x₁₁, 1], [1, x₂₂]] ⪰ 0
fn two_by_two_sdp(scale: f64) -> BlockLmi {
    BlockLmi {
        vars: vec![label(1), label(2)],
        objective: vec![scale, scale],
        blocks: vec![LmiBlock {
            side: 2,
            origin: BlockOrigin::Main,
            constant: SymSparse::with_entry(2, 0, 1, 1.0),
            terms: vec![(0, SymSparse::with_entry(2, 0, 0, 1.0)), (1, SymSparse::with_entry(2, 1, 1, 1.0))],
        }],
        start: None,
    }
}

#[test]
fn scalar_cone_minimum_is_zero() {
    let r = solve(&scalar_sdp(), &SolveOptions::default());
    assert_eq!(r.status, SolveStatus::Converged);
    assert!(r.objective.abs() <= 1e-7, "{}", r.objective);
}

#[test]
fn two_by_two_minimum_is_two() {
    let r = solve(&two_by_two_sdp(1.0), &SolveOptions::default());
    assert_eq!(r.status, SolveStatus::Converged);
    assert!((r.objective - 2.0).abs() <= 1e-7, "{}", r.objective);
    assert!((r.x[0] - 1.0).abs() < 1e-4 && (r.x[1] - 1.0).abs() < 1e-4);
}

#[test]
fn scaling_the_objective_scales_the_optimum() {
    let r = solve(&two_by_two_sdp(10.0), &SolveOptions::default());
    assert_eq!(r.status, SolveStatus::Converged);
    assert!((r.objective - 20.0).abs() <= 1e-6, "{}", r.objective);
}

#[test]
fn k2_primal_reaches_zero() {
    let g = generate(&GraphKind::Complete(2)).unwrap();
    let r = solve_problem(&build_primal(&g, None), &SolveOptions::default());
    assert_eq!(r.status, SolveStatus::Converged);
    assert!(r.objective.abs() <= 1e-6, "{}", r.objective);
    assert!(r.min_eig >= -1e-8);
}

#[test]
fn solves_are_deterministic() {
    let g = generate(&GraphKind::Cycle(5)).unwrap();
    let p = build_primal(&g, None);
    let a = solve_problem(&p, &SolveOptions::default());
    let b = solve_problem(&p, &SolveOptions::default());
    assert_eq!(a.x, b.x);
    assert_eq!(a.iterations, b.iterations);
    assert_eq!(a.objective.to_bits(), b.objective.to_bits());
}

#[test]
fn complementarity_decreases() {
    let g = Graph::petersen();
    let r = solve_problem(&build_primal(&g, None), &SolveOptions::default());
    assert_eq!(r.status, SolveStatus::Converged);
    let gaps: Vec<f64> = r.trace.iter().map(|t| t.gap).collect();
    assert!(gaps.len() >= 2);
    for w in gaps.windows(2) {
        assert!(w[1] <= 10.0 * w[0], "{gaps:?}");
    }
    assert!(gaps.last().unwrap() < &(1e-3 * gaps[0]));
}

#[test]
fn dual_feasibility_for_colorable_and_k4() {
    let c5 = generate(&GraphKind::Cycle(5)).unwrap();
    let r = solve_problem(&build_dual_feasibility(&c5), &SolveOptions::default());
    assert_eq!(r.status, SolveStatus::Converged);
    assert!(r.objective <= 1e-7);
    let k4 = generate(&GraphKind::Complete(4)).unwrap();
    let r = solve_problem(&build_dual_feasibility(&k4), &SolveOptions::default());
    assert_eq!(r.status, SolveStatus::Converged);
    assert!(r.objective.is_finite());
}

#[test]
fn iteration_limit_is_reported() {
    let g = generate(&GraphKind::Cycle(5)).unwrap();
    let opts = SolveOptions { max_iter: 2, ..Default::default() };
    let r = solve_problem(&build_primal(&g, None), &opts);
    assert_eq!(r.status, SolveStatus::IterationLimit);
    assert_eq!(r.iterations, 2);
}

/// Cyclic Jacobi rotations down to negligible off-diagonal mass.
fn jacobi_min_eigenvalue(mut a: DMatrix<f64>) -> f64 {
    let n = a.nrows();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|r| (0..n).map(move |c| (r, c)))
            .filter(|(r, c)| r != c)
            .map(|(r, c)| a[(r, c)].powi(2))
            .sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[(p, q)].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|k| a[(k, k)]).fold(f64::INFINITY, f64::min)
}

#[test]
fn min_eigenvalue_matches_jacobi() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for side in 1..9 {
        let b = DMatrix::from_fn(side, side, |_, _| rng.gen_range(-1.0..1.0));
        let a = &b + b.transpose();
        let expected = jacobi_min_eigenvalue(a.clone());
        assert!((min_eigenvalue(&a).unwrap() - expected).abs() < 1e-10);
    }
}
