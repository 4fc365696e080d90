//! Infeasible primal-dual path following with the HKM search direction and
//! a Mehrotra predictor-corrector step.
//!
//! The LMI side carries `(x, S)` with `S = F(x)` at feasibility; the conic
//! dual carries `X ⪰ 0` with `⟨F_i, X⟩ = c_i`. Both the Schur complement
//! and the step computation are dense.

use std::time::Instant;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::{BlockLmi, IterationRecord, SolveOptions, SolveReport, SolveStatus};
use crate::linalg::{frobenius_dot, min_eigenvalue_unchecked, symmetrize};

/// Full (mirrored) entry list of a symmetric coefficient.
type Entries = Vec<(usize, usize, f64)>;

struct DenseBlock {
    side: usize,
    f0: DMatrix<f64>,
    terms: Vec<(usize, Entries)>,
}

impl DenseBlock {
    fn value(&self, x: &[f64]) -> DMatrix<f64> {
        let mut m = self.f0.clone();
        for (i, e) in &self.terms {
            let xi = x[*i];
            if xi != 0.0 {
                for &(r, c, v) in e {
                    m[(r, c)] += xi * v;
                }
            }
        }
        m
    }

    /// `⟨F_i, B⟩` for every term, with `B` possibly non-symmetric.
    fn inner_products(&self, b: &DMatrix<f64>, out: &mut [f64]) {
        for (i, e) in &self.terms {
            out[*i] += e.iter().map(|&(r, c, v)| v * b[(r, c)]).sum::<f64>();
        }
    }
}

/// Scalar inequalities `f0_k + Σ a_ki x_i ≥ 0`.
struct ScalarRows {
    f0: Vec<f64>,
    terms: Vec<Vec<(usize, f64)>>,
}

impl ScalarRows {
    fn value(&self, x: &[f64]) -> Vec<f64> {
        self.f0.iter().zip(&self.terms).map(|(f, t)| f + t.iter().map(|&(i, a)| a * x[i]).sum::<f64>()).collect()
    }
}

fn expand(s: &crate::encoder::SymSparse) -> Entries {
    let mut e = Vec::with_capacity(2 * s.entries.len());
    for &(r, c, v) in &s.entries {
        e.push((r, c, v));
        if r != c {
            e.push((c, r, v));
        }
    }
    e
}

struct Direction {
    dx: DVector<f64>,
    d_xmat: Vec<DMatrix<f64>>,
    d_smat: Vec<DMatrix<f64>>,
    d_xl: Vec<f64>,
    d_sl: Vec<f64>,
}

struct Workspace<'a> {
    dense: &'a [DenseBlock],
    rows: &'a ScalarRows,
    xmat: &'a [DMatrix<f64>],
    xl: &'a [f64],
    sl: &'a [f64],
    sinv: &'a [DMatrix<f64>],
    rd: &'a [DMatrix<f64>],
    rdl: &'a [f64],
    r: &'a [f64],
    chol: &'a Cholesky<f64, Dyn>,
}

impl Workspace<'_> {
    /// Solves for the HKM direction targeting `σμ`, with an optional
    /// second-order correction `ΔX·ΔS` from a predictor step.
    fn direction(&self, sigma_mu: f64, corr: Option<(&[DMatrix<f64>], &[f64])>) -> Direction {
        let m = self.r.len();
        let mut rhs = vec![0.0; m];
        for (b, blk) in self.dense.iter().enumerate() {
            let x = &self.xmat[b];
            let sinv = &self.sinv[b];
            let mut inner = x * &self.rd[b];
            if let Some((c, _)) = corr {
                inner += &c[b];
            }
            let mut g = sinv * sigma_mu - x - inner * sinv;
            // only ⟨F_i, G⟩ is needed, so symmetrizing G changes nothing
            symmetrize(&mut g);
            blk.inner_products(&g, &mut rhs);
        }
        for (k, t) in self.rows.terms.iter().enumerate() {
            let (x, s) = (self.xl[k], self.sl[k]);
            let c = corr.map_or(0.0, |(_, cl)| cl[k]);
            let g = sigma_mu / s - x - (c + x * self.rdl[k]) / s;
            for &(i, a) in t {
                rhs[i] += a * g;
            }
        }
        for (h, r) in rhs.iter_mut().zip(self.r) {
            *h -= r;
        }
        let dx = self.chol.solve(&DVector::from_vec(rhs));

        let mut d_xmat = Vec::with_capacity(self.dense.len());
        let mut d_smat = Vec::with_capacity(self.dense.len());
        for (b, blk) in self.dense.iter().enumerate() {
            let mut ds = self.rd[b].clone();
            for (i, e) in &blk.terms {
                let d = dx[*i];
                for &(r, c, v) in e {
                    ds[(r, c)] += d * v;
                }
            }
            let x = &self.xmat[b];
            let sinv = &self.sinv[b];
            let mut inner = x * &ds;
            if let Some((c, _)) = corr {
                inner += &c[b];
            }
            let mut dxm = sinv * sigma_mu - x - inner * sinv;
            symmetrize(&mut dxm);
            d_xmat.push(dxm);
            d_smat.push(ds);
        }
        let mut d_sl = self.rdl.to_vec();
        for (k, t) in self.rows.terms.iter().enumerate() {
            for &(i, a) in t {
                d_sl[k] += a * dx[i];
            }
        }
        let d_xl = (0..self.xl.len())
            .map(|k| {
                let (x, s) = (self.xl[k], self.sl[k]);
                let c = corr.map_or(0.0, |(_, cl)| cl[k]);
                sigma_mu / s - x - (c + x * d_sl[k]) / s
            })
            .collect();
        Direction { dx, d_xmat, d_smat, d_xl, d_sl }
    }
}

/// Largest `α` with `LLᵀ + α·D ⪰ 0`, infinite when `D` points inward.
fn max_step(l: &DMatrix<f64>, d: &DMatrix<f64>) -> Option<f64> {
    let y = l.solve_lower_triangular(d)?;
    let mut b = l.solve_lower_triangular(&y.transpose())?;
    symmetrize(&mut b);
    let lam = min_eigenvalue_unchecked(&b);
    Some(if lam < 0.0 { -1.0 / lam } else { f64::INFINITY })
}

fn max_step_scalar(v: &[f64], d: &[f64]) -> f64 {
    v.iter().zip(d).filter(|(_, &dv)| dv < 0.0).map(|(&x, &dv)| -x / dv).fold(f64::INFINITY, f64::min)
}

fn factor_schur(mut m: DMatrix<f64>) -> Option<Cholesky<f64, Dyn>> {
    let scale = m.diagonal().amax().max(1e-300);
    let mut reg = 0.0;
    for _ in 0..6 {
        if let Some(c) = Cholesky::new(m.clone()) {
            return Some(c);
        }
        let next = if reg == 0.0 { 1e-14 * scale } else { reg * 100.0 };
        for k in 0..m.nrows() {
            m[(k, k)] += next - reg;
        }
        reg = next;
    }
    None
}

pub fn solve(blmi: &BlockLmi, opts: &SolveOptions) -> SolveReport {
    let started = Instant::now();
    let nvar = blmi.num_vars();
    let c = &blmi.objective;

    let mut dense = Vec::new();
    let mut rows = ScalarRows { f0: Vec::new(), terms: Vec::new() };
    for b in &blmi.blocks {
        if b.side == 1 {
            rows.f0.push(b.constant.entries.iter().map(|e| e.2).sum());
            rows.terms.push(b.terms.iter().map(|(i, s)| (*i, s.entries.iter().map(|e| e.2).sum())).collect());
        } else {
            dense.push(DenseBlock {
                side: b.side,
                f0: b.constant.to_dense(),
                terms: b.terms.iter().map(|(i, s)| (*i, expand(s))).collect(),
            });
        }
    }
    let cone_dim: usize = dense.iter().map(|b| b.side).sum::<usize>() + rows.f0.len();
    let f0_norm =
        (dense.iter().map(|b| b.f0.norm_squared()).sum::<f64>() + rows.f0.iter().map(|v| v * v).sum::<f64>()).sqrt();
    let c_norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();

    // starting point: S from F(x0) where that is interior, scaled identity
    // otherwise; X centered on S
    let mut x = blmi.start.clone().unwrap_or_else(|| vec![0.0; nvar]);
    let coef_scale = dense
        .iter()
        .flat_map(|b| b.terms.iter().flat_map(|(_, e)| e.iter().map(|t| t.2.abs())))
        .chain(rows.terms.iter().flat_map(|t| t.iter().map(|e| e.1.abs())))
        .chain(dense.iter().map(|b| b.f0.amax()))
        .chain(rows.f0.iter().map(|v| v.abs()))
        .fold(1.0, f64::max);
    let eta = 10.0 * coef_scale.max((cone_dim as f64).sqrt());
    let mu0 = 10.0 * (1.0 + c.iter().fold(0.0f64, |a, v| a.max(v.abs())));
    let mut smat: Vec<DMatrix<f64>> = dense
        .iter()
        .map(|b| {
            let f = b.value(&x);
            if Cholesky::new(f.clone()).is_some() && min_eigenvalue_unchecked(&f) > 1e-8 {
                f
            } else {
                DMatrix::identity(b.side, b.side) * eta
            }
        })
        .collect();
    let mut sl: Vec<f64> = rows.value(&x).into_iter().map(|v| if v > 1e-8 { v } else { eta }).collect();
    let mut xmat: Vec<DMatrix<f64>> = smat
        .iter()
        .map(|s| {
            let mut inv = Cholesky::new(s.clone()).expect("start slack is positive definite").inverse() * mu0;
            symmetrize(&mut inv);
            inv
        })
        .collect();
    let mut xl: Vec<f64> = sl.iter().map(|s| mu0 / s).collect();

    let mut trace = Vec::new();
    let mut status = SolveStatus::IterationLimit;
    let mut message = None;
    let mut rel_gap = f64::INFINITY;
    let mut dobj = f64::NAN;
    let mut iterations = 0;

    for iter in 0..=opts.max_iter {
        iterations = iter;
        let fx: Vec<DMatrix<f64>> = dense.iter().map(|b| b.value(&x)).collect();
        let rd: Vec<DMatrix<f64>> = fx.iter().zip(&smat).map(|(f, s)| f - s).collect();
        let flx = rows.value(&x);
        let rdl: Vec<f64> = flx.iter().zip(&sl).map(|(f, s)| f - s).collect();

        let mut ax = vec![0.0; nvar];
        for (b, blk) in dense.iter().enumerate() {
            blk.inner_products(&xmat[b], &mut ax);
        }
        for (k, t) in rows.terms.iter().enumerate() {
            for &(i, a) in t {
                ax[i] += a * xl[k];
            }
        }
        let r: Vec<f64> = c.iter().zip(&ax).map(|(ci, a)| ci - a).collect();

        let pobj: f64 = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
        dobj = -(dense.iter().zip(&xmat).map(|(b, xm)| frobenius_dot(&b.f0, xm)).sum::<f64>()
            + rows.f0.iter().zip(&xl).map(|(f, v)| f * v).sum::<f64>());
        let xs: f64 = xmat.iter().zip(&smat).map(|(a, b)| frobenius_dot(a, b)).sum::<f64>()
            + xl.iter().zip(&sl).map(|(a, b)| a * b).sum::<f64>();
        let mu = xs / cone_dim as f64;
        let pinf = (rd.iter().map(|m| m.norm_squared()).sum::<f64>() + rdl.iter().map(|v| v * v).sum::<f64>()).sqrt()
            / (1.0 + f0_norm);
        let dinf = r.iter().map(|v| v * v).sum::<f64>().sqrt() / (1.0 + c_norm);
        rel_gap = (pobj - dobj).abs().max(xs.abs()) / (1.0 + pobj.abs() + dobj.abs());
        let s_min = smat.iter().map(min_eigenvalue_unchecked).chain(sl.iter().copied()).fold(f64::INFINITY, f64::min);

        if !(pobj.is_finite() && dobj.is_finite() && xs.is_finite()) {
            status = SolveStatus::NumericalFailure;
            message = Some(format!("non-finite iterate at iteration {iter}"));
            break;
        }
        if pinf <= opts.feas_tol && dinf <= opts.feas_tol && rel_gap <= opts.gap_tol {
            let fmin = fx.iter().map(min_eigenvalue_unchecked).chain(flx.iter().copied()).fold(f64::INFINITY, f64::min);
            if fmin >= -opts.feas_tol {
                trace.push(IterationRecord {
                    iter,
                    gap: xs,
                    rel_gap,
                    primal_infeas: pinf,
                    dual_infeas: dinf,
                    min_eig: s_min,
                    step_primal: 0.0,
                    step_dual: 0.0,
                });
                if opts.verbose {
                    eprintln!("iter {iter:3}  gap {xs:.3e}  rel {rel_gap:.3e}  min_eig {s_min:.3e}  converged");
                }
                status = SolveStatus::Converged;
                break;
            }
        }
        if iter == opts.max_iter {
            break;
        }

        let mut sinv = Vec::with_capacity(dense.len());
        let mut lx = Vec::with_capacity(dense.len());
        let mut ls = Vec::with_capacity(dense.len());
        for (xm, sm) in xmat.iter().zip(&smat) {
            match (Cholesky::new(xm.clone()), Cholesky::new(sm.clone())) {
                (Some(cx), Some(cs)) => {
                    let mut inv = cs.inverse();
                    symmetrize(&mut inv);
                    sinv.push(inv);
                    lx.push(cx.l());
                    ls.push(cs.l());
                }
                _ => {
                    status = SolveStatus::NumericalFailure;
                    message = Some(format!("iterate lost definiteness at iteration {iter}"));
                    break;
                }
            }
        }
        if status == SolveStatus::NumericalFailure {
            break;
        }

        // Schur complement M_ij = tr(F_i X F_j S⁻¹) summed over blocks
        let mut schur = DMatrix::zeros(nvar, nvar);
        for (b, blk) in dense.iter().enumerate() {
            let side = blk.side;
            let xm = xmat[b].as_slice();
            let si = sinv[b].as_slice();
            for (ti, (i, ei)) in blk.terms.iter().enumerate() {
                for (j, ej) in &blk.terms[ti..] {
                    let mut v = 0.0;
                    for &(p, q, u) in ei {
                        for &(r, s, w) in ej {
                            // column-major storage
                            v += u * w * xm[q + r * side] * si[s + p * side];
                        }
                    }
                    schur[(*i, *j)] += v;
                    if i != j {
                        schur[(*j, *i)] += v;
                    }
                }
            }
        }
        for (k, t) in rows.terms.iter().enumerate() {
            let d = xl[k] / sl[k];
            for &(i, a) in t {
                for &(j, b) in t {
                    schur[(i, j)] += a * b * d;
                }
            }
        }
        let Some(chol) = factor_schur(schur) else {
            status = SolveStatus::NumericalFailure;
            message = Some(format!("Schur complement not positive definite at iteration {iter}"));
            break;
        };

        let ws = Workspace {
            dense: &dense,
            rows: &rows,
            xmat: &xmat,
            xl: &xl,
            sl: &sl,
            sinv: &sinv,
            rd: &rd,
            rdl: &rdl,
            r: &r,
            chol: &chol,
        };
        let steps = |d: &Direction, frac: f64| -> Option<(f64, f64)> {
            let mut ap = max_step_scalar(&xl, &d.d_xl);
            let mut ad = max_step_scalar(&sl, &d.d_sl);
            for b in 0..dense.len() {
                ap = ap.min(max_step(&lx[b], &d.d_xmat[b])?);
                ad = ad.min(max_step(&ls[b], &d.d_smat[b])?);
            }
            Some(((frac * ap).min(1.0), (frac * ad).min(1.0)))
        };

        let pred = ws.direction(0.0, None);
        let Some((ap, ad)) = steps(&pred, 1.0) else {
            status = SolveStatus::NumericalFailure;
            message = Some(format!("step length computation failed at iteration {iter}"));
            break;
        };
        let mut xs_aff = 0.0;
        for b in 0..dense.len() {
            let xa = &xmat[b] + &pred.d_xmat[b] * ap;
            let sa = &smat[b] + &pred.d_smat[b] * ad;
            xs_aff += frobenius_dot(&xa, &sa);
        }
        for k in 0..xl.len() {
            xs_aff += (xl[k] + ap * pred.d_xl[k]) * (sl[k] + ad * pred.d_sl[k]);
        }
        let sigma = (xs_aff / xs).clamp(0.0, 1.0).powi(3);

        let corr_dense: Vec<DMatrix<f64>> = pred.d_xmat.iter().zip(&pred.d_smat).map(|(dx, ds)| dx * ds).collect();
        let corr_scalar: Vec<f64> = pred.d_xl.iter().zip(&pred.d_sl).map(|(a, b)| a * b).collect();
        let dir = ws.direction(sigma * mu, Some((&corr_dense, &corr_scalar)));
        // back off from the boundary when the predictor could not go far
        let frac = opts.step_fraction.min(0.9 + 0.09 * ap.min(ad));
        let Some((ap, ad)) = steps(&dir, frac) else {
            status = SolveStatus::NumericalFailure;
            message = Some(format!("step length computation failed at iteration {iter}"));
            break;
        };

        trace.push(IterationRecord {
            iter,
            gap: xs,
            rel_gap,
            primal_infeas: pinf,
            dual_infeas: dinf,
            min_eig: s_min,
            step_primal: ap,
            step_dual: ad,
        });
        if opts.verbose {
            eprintln!(
                "iter {iter:3}  gap {xs:.3e}  rel {rel_gap:.3e}  pinf {pinf:.2e}  dinf {dinf:.2e}  min_eig {s_min:.3e}  step {ap:.3}/{ad:.3}  obj {pobj:.9}"
            );
        }

        for (xi, d) in x.iter_mut().zip(dir.dx.iter()) {
            *xi += ad * d;
        }
        for b in 0..dense.len() {
            xmat[b] += &dir.d_xmat[b] * ap;
            smat[b] += &dir.d_smat[b] * ad;
            symmetrize(&mut xmat[b]);
            symmetrize(&mut smat[b]);
        }
        for k in 0..xl.len() {
            xl[k] += ap * dir.d_xl[k];
            sl[k] += ad * dir.d_sl[k];
        }
    }

    let objective: f64 = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    let min_eig = (0..blmi.blocks.len())
        .map(|b| min_eigenvalue_unchecked(&blmi.block_value(b, &x)))
        .fold(f64::INFINITY, f64::min);
    SolveReport {
        status,
        objective,
        dual_objective: dobj,
        x,
        duality_gap: rel_gap,
        min_eig,
        iterations,
        wall_time: started.elapsed(),
        trace,
        message,
    }
}
