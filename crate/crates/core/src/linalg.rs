//! Exact linear algebra over the rationals.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::ring::Rational;

/// Rank by fraction-free (Bareiss) elimination after clearing the
/// denominators of each row. Pivots are taken from the first nonzero row
/// of each column.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|row| {
            let l = row
                .iter()
                .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
            row.iter().map(|c| (c * Rational::from_integer(l.clone())).to_integer()).collect()
        })
        .filter(|row: &Vec<BigInt>| row.iter().any(|c| !c.is_zero()))
        .collect();
    if m.is_empty() {
        return 0;
    }
    let ncols = m[0].len();
    let mut prev = BigInt::one();
    let mut r = 0;
    for col in 0..ncols {
        let Some(piv) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, piv);
        for i in r + 1..m.len() {
            for j in col + 1..ncols {
                let v = &m[r][col] * &m[i][j] - &m[i][col] * &m[r][j];
                m[i][j] = v / &prev;
            }
            m[i][col] = BigInt::zero();
        }
        prev = m[r][col].clone();
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

/// Solves `A u = b` by rational row reduction, pivoting on columns in
/// order. Free unknowns are set to zero. `None` if inconsistent.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut v = row.clone();
            v.push(rhs.clone());
            v
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(piv) = (r..nrows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, piv);
        let inv = m[r][col].recip();
        for v in m[r].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..nrows {
            if i == r || m[i][col].is_zero() {
                continue;
            }
            let f = m[i][col].clone();
            for j in col..=ncols {
                let d = &m[r][j] * &f;
                m[i][j] -= d;
            }
        }
        pivots.push(col);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[ncols].is_zero()) {
        return None;
    }
    let mut u = vec![Rational::zero(); ncols];
    for (k, &col) in pivots.iter().enumerate() {
        u[col] = m[k][ncols].clone();
    }
    Some(u)
}

/// Assembles a linear system column by column from sparse images keyed by
/// an ordered row label.
#[derive(Clone, Debug)]
pub struct SparseSystem<K: Ord> {
    columns: Vec<BTreeMap<K, Rational>>,
}

impl<K: Ord + Clone> Default for SparseSystem<K> {
    fn default() -> Self {
        SparseSystem { columns: Vec::new() }
    }
}

impl<K: Ord + Clone> SparseSystem<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_column(&mut self, col: BTreeMap<K, Rational>) {
        self.columns.push(col);
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    fn row_labels(&self, extra: Option<&BTreeMap<K, Rational>>) -> Vec<K> {
        let mut keys: Vec<K> = self.columns.iter().flat_map(|c| c.keys().cloned()).collect();
        if let Some(e) = extra {
            keys.extend(e.keys().cloned());
        }
        keys.sort();
        keys.dedup();
        keys
    }

    fn dense(&self, labels: &[K]) -> Vec<Vec<Rational>> {
        labels
            .iter()
            .map(|k| {
                self.columns
                    .iter()
                    .map(|c| c.get(k).cloned().unwrap_or_else(Rational::zero))
                    .collect()
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        rank(&self.dense(&self.row_labels(None)))
    }

    pub fn solve(&self, rhs: &BTreeMap<K, Rational>) -> Option<Vec<Rational>> {
        let labels = self.row_labels(Some(rhs));
        let a = self.dense(&labels);
        let b: Vec<Rational> = labels
            .iter()
            .map(|k| rhs.get(k).cloned().unwrap_or_else(Rational::zero))
            .collect();
        if self.columns.is_empty() {
            return b.iter().all(Zero::is_zero).then(Vec::new);
        }
        solve(&a, &b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{rat, ratio};

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&v| rat(v)).collect()).collect()
    }

    #[test]
    fn ranks() {
        assert_eq!(rank(&m(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank(&m(&[&[0, 0], &[0, 0]])), 0);
        assert_eq!(rank(&m(&[&[0, 1, 2], &[1, 0, 3], &[1, 1, 5]])), 2);
        assert_eq!(rank(&m(&[&[2, 0, 1], &[0, 3, 1], &[1, 1, 7]])), 3);
        let half = vec![vec![ratio(1, 2), ratio(1, 3)], vec![rat(3), rat(2)]];
        assert_eq!(rank(&half), 1);
    }

    #[test]
    fn solves() {
        let a = m(&[&[1, 1], &[1, -1]]);
        assert_eq!(solve(&a, &[rat(3), rat(1)]), Some(vec![rat(2), rat(1)]));
        let a = m(&[&[1, 1], &[2, 2]]);
        assert_eq!(solve(&a, &[rat(1), rat(3)]), None);
        assert_eq!(solve(&a, &[rat(1), rat(2)]), Some(vec![rat(1), rat(0)]));
    }
}
