//! Dense symmetric helpers shared by the solver, the encoder checks and the
//! cone tests.

use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("matrix is not symmetric: |M - Mᵀ| reaches {asymmetry:e} at ({row}, {col})")]
pub struct AsymmetricMatrix {
    pub asymmetry: f64,
    pub row: usize,
    pub col: usize,
}

/// Absolute symmetry tolerance, relative to the largest entry when that
/// exceeds one.
const SYMMETRY_TOL: f64 = 1e-12;

pub fn check_symmetric(m: &DMatrix<f64>) -> Result<(), AsymmetricMatrix> {
    assert!(m.is_square(), "matrix must be square");
    let scale = m.amax().max(1.0);
    let mut worst = AsymmetricMatrix { asymmetry: 0.0, row: 0, col: 0 };
    for r in 0..m.nrows() {
        for c in r + 1..m.ncols() {
            let d = (m[(r, c)] - m[(c, r)]).abs();
            if d > worst.asymmetry {
                worst = AsymmetricMatrix { asymmetry: d, row: r, col: c };
            }
        }
    }
    if worst.asymmetry > SYMMETRY_TOL * scale {
        return Err(worst);
    }
    Ok(())
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> Result<f64, AsymmetricMatrix> {
    check_symmetric(m)?;
    Ok(min_eigenvalue_unchecked(m))
}

/// Smallest eigenvalue, reading only the lower triangle.
pub fn min_eigenvalue_unchecked(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    m.symmetric_eigenvalues().min()
}

pub fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for r in 0..n {
        for c in r + 1..n {
            let v = 0.5 * (m[(r, c)] + m[(c, r)]);
            m[(r, c)] = v;
            m[(c, r)] = v;
        }
    }
}

/// Frobenius inner product `tr(Aᵀ B)`.
pub fn frobenius_dot(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_spectra() {
        assert_eq!(min_eigenvalue(&DMatrix::identity(3, 3)).unwrap(), 1.0);
        let swap = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!((min_eigenvalue(&swap).unwrap() + 1.0).abs() < 1e-12);
        let skew = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(min_eigenvalue(&skew).unwrap_err().row, 0);
    }
}
