//! Exact rank of integer matrices.
//!
//! Two independent routes are provided: sparse row reduction with content
//! removal ([`SparseMatrix::rank`]) for boundary matrices, and dense
//! Bareiss elimination ([`bareiss_rank`]) over any exact integral domain.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::{Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{CheckedMul, CheckedSub, One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("integer overflow during elimination")]
pub struct Overflow;

/// Integer types usable for fraction-free elimination.
pub trait ExactInteger: Clone + Debug + Integer + Signed + CheckedMul + CheckedSub {}

impl<T: Clone + Debug + Integer + Signed + CheckedMul + CheckedSub> ExactInteger for T {}

/// Row-major sparse matrix; each row is sorted by column and holds no
/// explicit zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix<T> {
    cols: usize,
    rows: Vec<Vec<(usize, T)>>,
}

impl<T: ExactInteger> SparseMatrix<T> {
    pub fn new(cols: usize) -> Self {
        SparseMatrix {
            cols,
            rows: Vec::new(),
        }
    }

    /// Appends a row given as `(column, value)` entries in any order.
    /// Repeated columns are summed.
    pub fn push_row(&mut self, entries: impl IntoIterator<Item = (usize, T)>) {
        let mut acc: BTreeMap<usize, T> = BTreeMap::new();
        for (c, v) in entries {
            assert!(c < self.cols, "column {c} out of range");
            let slot = acc.entry(c).or_insert_with(T::zero);
            *slot = slot.clone() + v;
        }
        self.rows
            .push(acc.into_iter().filter(|(_, v)| !v.is_zero()).collect());
    }

    pub fn from_dense(dense: &[Vec<T>]) -> Self {
        let cols = dense.first().map_or(0, Vec::len);
        let mut m = Self::new(cols);
        for row in dense {
            m.push_row(row.iter().cloned().enumerate());
        }
        m
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn map<U: ExactInteger>(&self, f: impl Fn(&T) -> U) -> SparseMatrix<U> {
        SparseMatrix {
            cols: self.cols,
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|(c, v)| (*c, f(v))).collect())
                .collect(),
        }
    }

    /// Rank over the rationals. Each incoming row is reduced against the
    /// pivot rows by cross-multiplication, then divided by the gcd of its
    /// entries so values stay small.
    pub fn rank(&self) -> Result<usize, Overflow> {
        let mut pivots: BTreeMap<usize, Vec<(usize, T)>> = BTreeMap::new();
        for row in &self.rows {
            let mut r = row.clone();
            while let Some((lead, a)) = r.first().cloned() {
                match pivots.get(&lead) {
                    Some(p) => {
                        let b = p[0].1.clone();
                        let g = a.gcd(&b);
                        r = combine(&r, &(b / g.clone()), p, &(a / g))?;
                        make_primitive(&mut r);
                    }
                    None => {
                        make_primitive(&mut r);
                        pivots.insert(lead, r);
                        break;
                    }
                }
            }
        }
        Ok(pivots.len())
    }
}

impl SparseMatrix<i64> {
    /// Rank with `i64` arithmetic, retried in `BigInt` on overflow.
    pub fn rank_exact(&self) -> usize {
        match self.rank() {
            Ok(r) => r,
            Err(Overflow) => {
                log::debug!("i64 elimination overflowed; retrying with BigInt");
                self.map(|v| BigInt::from(*v))
                    .rank()
                    .expect("BigInt arithmetic does not overflow")
            }
        }
    }
}

/// `x·r - y·p` for sorted sparse rows.
fn combine<T: ExactInteger>(
    r: &[(usize, T)],
    x: &T,
    p: &[(usize, T)],
    y: &T,
) -> Result<Vec<(usize, T)>, Overflow> {
    let mut out = Vec::with_capacity(r.len() + p.len());
    let (mut i, mut j) = (0, 0);
    while i < r.len() || j < p.len() {
        let take_r = j >= p.len() || (i < r.len() && r[i].0 < p[j].0);
        let take_p = i >= r.len() || (j < p.len() && p[j].0 < r[i].0);
        let (col, v) = if take_r {
            i += 1;
            (r[i - 1].0, r[i - 1].1.checked_mul(x).ok_or(Overflow)?)
        } else if take_p {
            j += 1;
            let v = p[j - 1].1.checked_mul(y).ok_or(Overflow)?;
            (p[j - 1].0, T::zero().checked_sub(&v).ok_or(Overflow)?)
        } else {
            let a = r[i].1.checked_mul(x).ok_or(Overflow)?;
            let b = p[j].1.checked_mul(y).ok_or(Overflow)?;
            i += 1;
            j += 1;
            (r[i - 1].0, a.checked_sub(&b).ok_or(Overflow)?)
        };
        if !v.is_zero() {
            out.push((col, v));
        }
    }
    Ok(out)
}

fn make_primitive<T: ExactInteger>(r: &mut [(usize, T)]) {
    let g = r.iter().fold(T::zero(), |g, (_, v)| g.gcd(v));
    if g.is_zero() || g.is_one() {
        return;
    }
    for (_, v) in r.iter_mut() {
        *v = v.clone() / g.clone();
    }
}

/// Rank of a dense matrix by Bareiss fraction-free elimination. Valid
/// over any integral domain where the Bareiss divisions are exact
/// (integers, rationals).
pub fn bareiss_rank<T>(mut m: Vec<Vec<T>>) -> usize
where
    T: Clone + PartialEq + Zero + One + Neg<Output = T>,
    for<'a> &'a T: Mul<&'a T, Output = T> + Sub<&'a T, Output = T> + Div<&'a T, Output = T>,
{
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut prev = T::one();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for i in rank + 1..rows {
            for j in c + 1..cols {
                let num = &(&m[rank][c] * &m[i][j]) - &(&m[i][c] * &m[rank][j]);
                m[i][j] = &num / &prev;
            }
            m[i][c] = T::zero();
        }
        prev = m[rank][c].clone();
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::*;

    #[test]
    fn small_ranks() {
        let m = SparseMatrix::<i64>::from_dense(&[vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]]);
        assert_eq!(m.rank(), Ok(2));
        let z = SparseMatrix::<i64>::from_dense(&[vec![0, 0], vec![0, 0]]);
        assert_eq!(z.rank(), Ok(0));
        assert_eq!(SparseMatrix::<i64>::new(3).rank(), Ok(0));
        // boundary of a triangle: rank 2
        let d1 = SparseMatrix::<i64>::from_dense(&[vec![-1, 1, 0], vec![-1, 0, 1], vec![0, -1, 1]]);
        assert_eq!(d1.rank_exact(), 2);
    }

    #[test]
    fn overflow_falls_back_to_bigint() {
        let big = i64::MAX / 2 + 1;
        let m = SparseMatrix::<i64>::from_dense(&[vec![big, 3], vec![3, big]]);
        assert_eq!(m.rank(), Err(Overflow));
        assert_eq!(m.rank_exact(), 2);
    }

    #[test]
    fn bareiss_over_integers_and_rationals() {
        let ints: Vec<Vec<BigInt>> = [[2, 4, 1], [1, 2, 0], [3, 6, 1]]
            .iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect();
        assert_eq!(bareiss_rank(ints.clone()), 2);
        let rats: Vec<Vec<BigRational>> = ints
            .iter()
            .map(|r| r.iter().map(|v| BigRational::from_integer(v.clone())).collect())
            .collect();
        assert_eq!(bareiss_rank(rats), 2);
    }

    proptest! {
        #[test]
        fn sparse_and_bareiss_agree(rows in proptest::collection::vec(
            proptest::collection::vec(-2i64..=2, 6), 0..7)) {
            let sparse = SparseMatrix::<i64>::from_dense(&rows).rank_exact();
            let dense: Vec<Vec<BigInt>> = rows.iter()
                .map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
            prop_assert_eq!(sparse, bareiss_rank(dense));
            let big = SparseMatrix::<i64>::from_dense(&rows).map(|v| BigInt::from(*v)).rank().unwrap();
            prop_assert_eq!(sparse, big);
        }
    }
}
