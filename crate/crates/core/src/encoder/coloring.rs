use nalgebra::DMatrix;

use super::EncodeError;
use crate::graph::{Coloring, GraphError};

/// The six bijections of {red, yellow, blue}, in lexicographic order. Applied
/// to the base coloring (red, yellow) of K₂ they list the pairs
/// (r,y), (r,b), (y,r), (y,b), (b,r), (b,y).
pub const COLOR_PERMUTATIONS: [[u8; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// A coloring together with its six color-permuted variants and their
/// indicator vectors `[e(c₁), …, e(cₙ), 1]` of length `3n+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PermutedColoring {
    pub base: Coloring,
    pub variants: Vec<Coloring>,
    pub vectors: Vec<Vec<f64>>,
}

pub fn permuted(c: &Coloring, n: usize) -> Result<PermutedColoring, EncodeError> {
    if c.len() != n {
        return Err(GraphError::ColoringLength { got: c.len(), expected: n }.into());
    }
    let variants: Vec<Coloring> = COLOR_PERMUTATIONS.iter().map(|&p| c.permuted(p)).collect();
    let vectors = variants.iter().map(indicator_vector).collect();
    Ok(PermutedColoring { base: c.clone(), variants, vectors })
}

fn indicator_vector(c: &Coloring) -> Vec<f64> {
    let n = c.len();
    let mut v = vec![0.0; 3 * n + 1];
    for (i, &color) in c.colors().iter().enumerate() {
        v[3 * i + color as usize] = 1.0;
    }
    v[3 * n] = 1.0;
    v
}

/// `L = FᵀF` with `F` the 6×(3n+1) matrix of permuted indicator vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct DColoringMatrix {
    pub matrix: DMatrix<f64>,
    pub factor: DMatrix<f64>,
}

/// Builds the coloring matrix as a sum of six outer products. Properness is
/// not required: the colorings of interest have one monochromatic edge.
pub fn dcoloring_matrix(pc: &PermutedColoring) -> DColoringMatrix {
    let side = pc.vectors[0].len();
    let factor = DMatrix::from_fn(pc.vectors.len(), side, |r, c| pc.vectors[r][c]);
    let matrix = factor.transpose() * &factor;
    DColoringMatrix { matrix, factor }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::vertex_block;
    use std::collections::BTreeSet;

    fn coloring(c: &[u8]) -> Coloring {
        Coloring::new(c.to_vec()).unwrap()
    }

    #[test]
    fn k2_vectors_follow_the_worked_example() {
        let pc = permuted(&coloring(&[0, 1]), 2).unwrap();
        let pairs: Vec<Vec<u8>> = pc.variants.iter().map(|v| v.colors().to_vec()).collect();
        assert_eq!(pairs, vec![vec![0, 1], vec![0, 2], vec![1, 0], vec![1, 2], vec![2, 0], vec![2, 1]]);
        assert_eq!(pc.vectors[0], vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0]);
        for v in &pc.vectors {
            assert_eq!(v[6], 1.0);
            assert_eq!(v[..3].iter().sum::<f64>(), 1.0);
            assert_eq!(v[3..6].iter().sum::<f64>(), 1.0);
        }
    }

    #[test]
    fn constant_coloring_stays_monochromatic() {
        let g = crate::graph::Graph::new(2, [(0, 1)]).unwrap();
        let pc = permuted(&coloring(&[0, 0]), 2).unwrap();
        assert_eq!(pc.variants.len(), 6);
        assert!(pc.variants.iter().all(|v| !v.is_proper(&g)));
    }

    #[test]
    fn variant_set_is_invariant_under_pre_permutation() {
        let c = coloring(&[0, 1, 1, 2, 0]);
        let base: BTreeSet<_> = permuted(&c, 5).unwrap().variants.into_iter().collect();
        for p in COLOR_PERMUTATIONS {
            let other: BTreeSet<_> = permuted(&c.permuted(p), 5).unwrap().variants.into_iter().collect();
            assert_eq!(base, other);
        }
        assert!(permuted(&c, 4).is_err());
    }

    #[test]
    fn dcoloring_matrix_structure() {
        let pc = permuted(&coloring(&[0, 0]), 2).unwrap();
        let d = dcoloring_matrix(&pc);
        assert_eq!(d.matrix.shape(), (7, 7));
        assert_eq!(d.factor.nrows(), 6);
        assert!(d.matrix.rank(1e-9) <= 6);
        assert_eq!(d.matrix[(6, 6)], 6.0);
        for i in 0..2 {
            assert_eq!(vertex_block(&d.matrix, i, i), DMatrix::identity(3, 3) * 2.0);
        }
        // same color at both endpoints: each permuted color pair lands on the diagonal
        assert_eq!(vertex_block(&d.matrix, 0, 1), DMatrix::identity(3, 3) * 2.0);
        assert!(d.factor.iter().all(|&v| v >= 0.0));
        assert_eq!(d.factor.transpose() * &d.factor, d.matrix);
    }
}
