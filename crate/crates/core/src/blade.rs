//! Sorted index subsets of the generators, used as exterior basis labels.

use std::cmp::Ordering;

/// A subset of `{0, .., 31}` stored as a bitmask. Ordered by the
/// lexicographic order of the sorted index lists.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Blade(u32);

pub const MAX_GENERATORS: usize = 32;

impl Blade {
    pub const EMPTY: Blade = Blade(0);

    pub fn single(i: usize) -> Blade {
        Blade(1 << i)
    }

    pub fn from_indices(indices: &[usize]) -> Option<Blade> {
        let mut bits = 0u32;
        for &i in indices {
            if i >= MAX_GENERATORS || bits & (1 << i) != 0 {
                return None;
            }
            bits |= 1 << i;
        }
        Some(Blade(bits))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn is_disjoint(self, other: Blade) -> bool {
        self.0 & other.0 == 0
    }

    pub fn union(self, other: Blade) -> Blade {
        Blade(self.0 | other.0)
    }

    pub fn minus(self, other: Blade) -> Blade {
        Blade(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: Blade) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn indices(self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.degree());
        let mut b = self.0;
        while b != 0 {
            out.push(b.trailing_zeros() as usize);
            b &= b - 1;
        }
        out
    }

    /// Sign of `dx_self ^ dx_other` relative to the sorted union, or `None`
    /// if the two overlap.
    pub fn wedge_sign(self, other: Blade) -> Option<i32> {
        if !self.is_disjoint(other) {
            return None;
        }
        // count pairs (a in self, b in other) with a > b
        let mut inversions = 0u32;
        let mut b = other.0;
        while b != 0 {
            let j = b.trailing_zeros();
            inversions += (self.0 >> j).count_ones();
            b &= b - 1;
        }
        Some(if inversions.is_multiple_of(2) { 1 } else { -1 })
    }

    /// Every `k`-subset of `{0, .., r-1}` in lexicographic order.
    pub fn subsets(r: usize, k: usize) -> Vec<Blade> {
        let mut out = Vec::new();
        if k > r {
            return out;
        }
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            out.push(Blade::from_indices(&idx).expect("distinct indices"));
            let mut i = k;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if idx[i] < r - k + i {
                    idx[i] += 1;
                    for j in i + 1..k {
                        idx[j] = idx[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    /// Every `k`-subset of this blade in lexicographic order.
    pub fn sub_blades(self, k: usize) -> Vec<Blade> {
        let idx = self.indices();
        Blade::subsets(idx.len(), k)
            .into_iter()
            .map(|s| {
                let picked: Vec<usize> = s.indices().into_iter().map(|p| idx[p]).collect();
                Blade::from_indices(&picked).unwrap()
            })
            .collect()
    }
}

impl Ord for Blade {
    fn cmp(&self, other: &Self) -> Ordering {
        let (mut a, mut b) = (self.0, other.0);
        loop {
            match (a == 0, b == 0) {
                (true, true) => return Ordering::Equal,
                (true, false) => return Ordering::Less,
                (false, true) => return Ordering::Greater,
                _ => {}
            }
            let (i, j) = (a.trailing_zeros(), b.trailing_zeros());
            if i != j {
                return i.cmp(&j);
            }
            a &= a - 1;
            b &= b - 1;
        }
    }
}

impl PartialOrd for Blade {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sign of a permutation given as a sequence of distinct integers.
pub fn permutation_sign(perm: &[usize]) -> i32 {
    let mut inv = 0usize;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inv += 1;
            }
        }
    }
    if inv.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lex_order_of_subsets() {
        let s = Blade::subsets(4, 2);
        let lists: Vec<Vec<usize>> = s.iter().map(|b| b.indices()).collect();
        assert_eq!(
            lists,
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(Blade::subsets(3, 0), vec![Blade::EMPTY]);
        assert!(Blade::subsets(2, 3).is_empty());
    }

    #[test]
    fn wedge_signs() {
        let x = Blade::single(0);
        let y = Blade::single(1);
        let z = Blade::single(2);
        assert_eq!(x.wedge_sign(y), Some(1));
        assert_eq!(y.wedge_sign(x), Some(-1));
        assert_eq!(x.wedge_sign(x), None);
        assert_eq!(z.wedge_sign(x.union(y)), Some(1));
        assert_eq!(y.wedge_sign(x.union(z)), Some(-1));
        assert_eq!(permutation_sign(&[2, 0, 1]), 1);
        assert_eq!(permutation_sign(&[1, 0, 2]), -1);
    }

    #[test]
    fn sub_blades_follow_parent_order() {
        let b = Blade::from_indices(&[0, 2, 3]).unwrap();
        let subs: Vec<Vec<usize>> = b.sub_blades(2).iter().map(|s| s.indices()).collect();
        assert_eq!(subs, vec![vec![0, 2], vec![0, 3], vec![2, 3]]);
    }
}
