//! Exact linear algebra: fraction-free rank, dense row reduction, and an
//! incremental sparse echelon basis for large relation sets.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{ExactError, LinComb, Rational};

fn check_rectangular(vectors: &[Vec<Rational>], width: Option<usize>) -> Result<usize, ExactError> {
    let width = width.or_else(|| vectors.first().map(Vec::len)).unwrap_or(0);
    for v in vectors {
        if v.len() != width {
            return Err(ExactError::DimensionMismatch { expected: width, found: v.len() });
        }
    }
    Ok(width)
}

/// Clears denominators row by row; scaling a row never changes the span's dimension.
fn integer_rows(vectors: &[Vec<Rational>]) -> Vec<Vec<BigInt>> {
    vectors
        .iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            row.iter().map(|q| q.numer() * (&l / q.denom())).collect()
        })
        .collect()
}

/// Dimension of the span of `vectors`, computed by Bareiss fraction-free elimination.
pub fn rank_of_span(vectors: &[Vec<Rational>]) -> Result<usize, ExactError> {
    let width = check_rectangular(vectors, None)?;
    let mut m = integer_rows(vectors);
    let rows = m.len();
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..width {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let (top, bottom) = m.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        let pivot = pivot_row[col].clone();
        for row in bottom.iter_mut() {
            let lead = std::mem::take(&mut row[col]);
            for j in col + 1..width {
                let num = &pivot * &row[j] - &lead * &pivot_row[j];
                debug_assert!((&num % &prev).is_zero());
                row[j] = num / &prev;
            }
        }
        prev = pivot;
        rank += 1;
    }
    Ok(rank)
}

/// `ambient_dim − rank_of_span(relations)`.
pub fn quotient_dim(ambient_dim: usize, relations: &[Vec<Rational>]) -> Result<usize, ExactError> {
    check_rectangular(relations, Some(ambient_dim))?;
    Ok(ambient_dim - rank_of_span(relations)?)
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut [Vec<Rational>]) -> Vec<usize> {
    let rows = m.len();
    let width = m.first().map(Vec::len).unwrap_or(0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..width {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][col].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in 0..width {
                    let d = &f * &m[r][j];
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}

/// Some solution `x` of `a · x = b`, with free variables set to zero, or `None` if inconsistent.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Result<Option<Vec<Rational>>, ExactError> {
    if a.len() != b.len() {
        return Err(ExactError::DimensionMismatch { expected: a.len(), found: b.len() });
    }
    let n = check_rectangular(a, None)?;
    let mut aug: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&n) {
        return Ok(None);
    }
    let mut x = vec![Rational::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][n].clone();
    }
    Ok(Some(x))
}

/// Basis of `{x : a · x = 0}`.
pub fn nullspace(a: &[Vec<Rational>], width: usize) -> Result<Vec<Vec<Rational>>, ExactError> {
    check_rectangular(a, Some(width))?;
    let mut m = a.to_vec();
    let pivots = rref(&mut m);
    let mut basis = Vec::new();
    for free in (0..width).filter(|c| !pivots.contains(c)) {
        let mut x = vec![Rational::zero(); width];
        x[free] = Rational::one();
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = -m[r][free].clone();
        }
        basis.push(x);
    }
    Ok(basis)
}

/// Inverse of a square matrix, or `None` when singular.
pub fn inverse(a: &[Vec<Rational>]) -> Result<Option<Vec<Vec<Rational>>>, ExactError> {
    let n = a.len();
    check_rectangular(a, Some(n))?;
    let mut aug: Vec<Vec<Rational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] >= n {
        return Ok(None);
    }
    Ok(Some(aug.into_iter().map(|r| r[n..].to_vec()).collect()))
}

/// Incrementally maintained echelon basis of sparse vectors. Each stored vector
/// has leading coefficient one at a distinct pivot key.
#[derive(Debug, Clone)]
pub struct SparseEchelon<K: Ord + Clone> {
    rows: BTreeMap<K, LinComb<K>>,
}

impl<K: Ord + Clone> Default for SparseEchelon<K> {
    fn default() -> Self {
        SparseEchelon { rows: BTreeMap::new() }
    }
}

impl<K: Ord + Clone> SparseEchelon<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the stored rows until its leading key is not a pivot.
    pub fn reduce(&self, mut v: LinComb<K>) -> LinComb<K> {
        let mut cursor: Option<K> = None;
        loop {
            let lead = match &cursor {
                None => v.keys().next().cloned(),
                Some(c) => v.keys().find(|k| *k > c).cloned(),
            };
            let Some(lead) = lead else { return v };
            if let Some(row) = self.rows.get(&lead) {
                let c = v.coeff(&lead);
                v.add_scaled(row, &-c);
            } else {
                cursor = Some(lead);
            }
        }
    }

    /// Inserts `v`; returns whether it enlarged the span.
    pub fn insert(&mut self, v: LinComb<K>) -> bool {
        let mut v = v;
        loop {
            let Some(lead) = v.keys().next().cloned() else { return false };
            match self.rows.get(&lead) {
                Some(row) => {
                    let c = v.coeff(&lead);
                    v.add_scaled(row, &-c);
                }
                None => {
                    let inv = v.coeff(&lead).recip();
                    self.rows.insert(lead, v.scale(&inv));
                    return true;
                }
            }
        }
    }

    pub fn contains(&self, v: &LinComb<K>) -> bool {
        self.reduce(v.clone()).is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    fn row(xs: &[(i64, i64)]) -> Vec<Rational> {
        xs.iter().map(|&(n, d)| rat(n, d)).collect()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank_of_span(&[row(&[(1, 1), (0, 1)]), row(&[(0, 1), (1, 1)])]).unwrap(), 2);
        assert_eq!(rank_of_span(&[row(&[(1, 1), (2, 1)]), row(&[(2, 1), (4, 1)])]).unwrap(), 1);
        let third = [row(&[(1, 2), (1, 3)]), row(&[(1, 4), (1, 6)]), row(&[(0, 1), (1, 1)])];
        assert_eq!(rank_of_span(&third).unwrap(), 2);
        assert_eq!(rank_of_span(&[]).unwrap(), 0);
    }

    #[test]
    fn ragged_input_is_rejected() {
        let err = rank_of_span(&[vec![int(1)], vec![int(1), int(2)]]).unwrap_err();
        assert!(matches!(err, ExactError::DimensionMismatch { .. }));
        assert!(quotient_dim(3, &[vec![int(1)]]).is_err());
    }

    #[test]
    fn quotient_examples() {
        assert_eq!(quotient_dim(3, &[]).unwrap(), 3);
        let full = [row(&[(1, 1), (0, 1), (0, 1)]), row(&[(0, 1), (1, 1), (0, 1)]), row(&[(0, 1), (0, 1), (1, 1)])];
        assert_eq!(quotient_dim(3, &full).unwrap(), 0);
        let rels = [
            row(&[(1, 1), (1, 1), (0, 1), (0, 1)]),
            row(&[(0, 1), (1, 1), (1, 1), (0, 1)]),
            row(&[(1, 1), (0, 1), (-1, 1), (0, 1)]),
        ];
        assert_eq!(quotient_dim(4, &rels).unwrap(), 2);
    }

    #[test]
    fn solve_and_inverse() {
        let a = [row(&[(2, 1), (1, 1)]), row(&[(1, 1), (3, 1)])];
        let x = solve(&a, &[int(3), int(4)]).unwrap().unwrap();
        assert_eq!(x, vec![int(1), int(1)]);
        let inv = inverse(&a).unwrap().unwrap();
        assert_eq!(inv[0], vec![rat(3, 5), rat(-1, 5)]);
        assert!(solve(&[row(&[(1, 1)]), row(&[(1, 1)])], &[int(0), int(1)]).unwrap().is_none());
        assert!(inverse(&[row(&[(1, 1), (1, 1)]), row(&[(1, 1), (1, 1)])]).unwrap().is_none());
    }

    #[test]
    fn nullspace_is_annihilated() {
        let a = [row(&[(1, 1), (1, 1), (0, 1)]), row(&[(0, 1), (1, 1), (1, 1)])];
        let ns = nullspace(&a, 3).unwrap();
        assert_eq!(ns.len(), 1);
        for r in &a {
            let dot: Rational = r.iter().zip(&ns[0]).map(|(x, y)| x * y).sum();
            assert_eq!(dot, int(0));
        }
    }

    #[test]
    fn sparse_echelon_tracks_span() {
        let mut e = SparseEchelon::new();
        assert!(e.insert(LinComb::from_iter([(0usize, int(1)), (1, int(1))])));
        assert!(e.insert(LinComb::from_iter([(1usize, int(1)), (2, int(1))])));
        assert!(!e.insert(LinComb::from_iter([(0usize, int(1)), (2, int(-1))])));
        assert_eq!(e.rank(), 2);
        assert!(e.contains(&LinComb::from_iter([(0usize, int(2)), (2, int(-2))])));
        assert!(!e.contains(&LinComb::basis(2usize)));
    }
}
