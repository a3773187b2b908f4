//! Sparse tensors over qubit wires and pairwise contraction.

use std::collections::BTreeMap;
use std::fmt::Debug;

use crate::phasepoly::{Coeff, LaurentPoly};

/// Entry type a tensor network can be evaluated over.
pub trait Scalar: Clone + Debug + PartialEq + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    /// Apply `Y^g = 1` for each listed variable.
    fn reduce(&self, _quotients: &BTreeMap<String, u32>) -> Self {
        self.clone()
    }
}

impl Scalar for Coeff {
    fn zero() -> Self {
        Coeff::zero()
    }
    fn one() -> Self {
        Coeff::one()
    }
    fn from_i64(n: i64) -> Self {
        Coeff::from_i64(n)
    }
    fn is_zero(&self) -> bool {
        Coeff::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
}

impl Scalar for LaurentPoly {
    fn zero() -> Self {
        LaurentPoly::zero()
    }
    fn one() -> Self {
        LaurentPoly::one()
    }
    fn from_i64(n: i64) -> Self {
        LaurentPoly::constant(Coeff::from_i64(n))
    }
    fn is_zero(&self) -> bool {
        LaurentPoly::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn reduce(&self, quotients: &BTreeMap<String, u32>) -> Self {
        let mut p = self.clone();
        for (v, g) in quotients {
            if p.mentions(v) {
                p = p.quotient_reduce(v, *g);
            }
        }
        p
    }
}

/// Bit `k` of an index is the basis value on `legs[k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseTensor<S> {
    pub legs: Vec<usize>,
    pub entries: BTreeMap<u128, S>,
}

pub const MAX_LEGS: usize = 128;

#[inline]
fn bit(idx: u128, k: usize) -> u128 {
    (idx >> k) & 1
}

impl<S: Scalar> SparseTensor<S> {
    pub fn scalar(value: S) -> Self {
        let mut entries = BTreeMap::new();
        if !value.is_zero() {
            entries.insert(0, value);
        }
        SparseTensor { legs: Vec::new(), entries }
    }

    pub fn new(legs: Vec<usize>) -> Self {
        SparseTensor {
            legs,
            entries: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, idx: u128, value: S) {
        if value.is_zero() {
            return;
        }
        match self.entries.get_mut(&idx) {
            Some(v) => {
                let s = v.add(&value);
                if s.is_zero() {
                    self.entries.remove(&idx);
                } else {
                    *v = s;
                }
            }
            None => {
                self.entries.insert(idx, value);
            }
        }
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn rank(&self) -> usize {
        self.legs.len()
    }

    /// Sum over the diagonal of every wire that occurs twice on this tensor.
    pub fn trace_repeated(self) -> Self {
        let mut legs = self.legs.clone();
        let mut tensor = self;
        loop {
            let pair = (0..legs.len())
                .flat_map(|i| (i + 1..legs.len()).map(move |j| (i, j)))
                .find(|&(i, j)| legs[i] == legs[j]);
            let Some((i, j)) = pair else { break };
            let keep: Vec<usize> = (0..legs.len()).filter(|&k| k != i && k != j).collect();
            let mut out = SparseTensor::new(keep.iter().map(|&k| legs[k]).collect());
            for (idx, v) in &tensor.entries {
                if bit(*idx, i) != bit(*idx, j) {
                    continue;
                }
                let mut n = 0u128;
                for (pos, &k) in keep.iter().enumerate() {
                    n |= bit(*idx, k) << pos;
                }
                out.insert(n, v.clone());
            }
            legs = out.legs.clone();
            tensor = out;
        }
        tensor
    }

    /// Contract all wires shared with `other`. Result legs are this
    /// tensor's free legs followed by the other's.
    pub fn contract(&self, other: &Self) -> Self {
        let shared: Vec<(usize, usize)> = self
            .legs
            .iter()
            .enumerate()
            .filter_map(|(i, w)| other.legs.iter().position(|x| x == w).map(|j| (i, j)))
            .collect();
        let free_a: Vec<usize> = (0..self.legs.len()).filter(|i| !shared.iter().any(|s| s.0 == *i)).collect();
        let free_b: Vec<usize> = (0..other.legs.len()).filter(|j| !shared.iter().any(|s| s.1 == *j)).collect();
        let mut legs: Vec<usize> = free_a.iter().map(|&i| self.legs[i]).collect();
        legs.extend(free_b.iter().map(|&j| other.legs[j]));
        let mut out = SparseTensor::new(legs);

        let gather = |idx: u128, pos: &[usize]| -> u128 {
            pos.iter().enumerate().fold(0u128, |acc, (k, &p)| acc | (bit(idx, p) << k))
        };
        let key_a: Vec<usize> = shared.iter().map(|s| s.0).collect();
        let key_b: Vec<usize> = shared.iter().map(|s| s.1).collect();
        let mut groups: BTreeMap<u128, Vec<(u128, &S)>> = BTreeMap::new();
        for (idx, v) in &other.entries {
            groups
                .entry(gather(*idx, &key_b))
                .or_default()
                .push((gather(*idx, &free_b), v));
        }
        let shift = free_a.len();
        for (idx, va) in &self.entries {
            let Some(group) = groups.get(&gather(*idx, &key_a)) else { continue };
            let ra = gather(*idx, &free_a);
            for (rb, vb) in group {
                out.insert(ra | (rb << shift), va.mul(vb));
            }
        }
        out
    }

    /// Reorder legs to `order` (a permutation of the current legs).
    pub fn permute(&self, order: &[usize]) -> Self {
        let pos: Vec<usize> = order
            .iter()
            .map(|w| self.legs.iter().position(|x| x == w).expect("leg present"))
            .collect();
        let mut out = SparseTensor::new(order.to_vec());
        for (idx, v) in &self.entries {
            let n = pos.iter().enumerate().fold(0u128, |acc, (k, &p)| acc | (bit(*idx, p) << k));
            out.entries.insert(n, v.clone());
        }
        out
    }

    pub fn map(&self, f: impl Fn(&S) -> S) -> Self {
        let mut out = SparseTensor::new(self.legs.clone());
        for (idx, v) in &self.entries {
            out.insert(*idx, f(v));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(legs: Vec<usize>, e: &[(u128, i64)]) -> SparseTensor<Coeff> {
        let mut s = SparseTensor::new(legs);
        for (i, v) in e {
            s.insert(*i, Coeff::from_i64(*v));
        }
        s
    }

    #[test]
    fn matrix_product_by_contraction() {
        // a[i,j] with legs (j=bit0 col, i=bit1 row) on wires (0, 1); b on (1, 2)
        let a = t(vec![0, 1], &[(0b00, 1), (0b01, 2), (0b10, 3), (0b11, 4)]);
        let b = t(vec![1, 2], &[(0b00, 5), (0b11, 7)]);
        let c = a.contract(&b);
        assert_eq!(c.legs, vec![0, 2]);
        assert_eq!(c.entries[&0b00], Coeff::from_i64(5));
        assert_eq!(c.entries[&0b10], Coeff::from_i64(21));
        assert_eq!(c.entries[&0b01], Coeff::from_i64(10));
        assert_eq!(c.entries[&0b11], Coeff::from_i64(28));
    }

    #[test]
    fn trace_of_identity_is_two() {
        let id = t(vec![3, 3], &[(0b00, 1), (0b11, 1)]);
        let s = id.trace_repeated();
        assert!(s.legs.is_empty());
        assert_eq!(s.entries[&0], Coeff::from_i64(2));
    }

    #[test]
    fn cancellation_removes_entries() {
        let mut s = t(vec![0], &[(1, 1)]);
        s.insert(1, Coeff::from_i64(-1));
        assert_eq!(s.nnz(), 0);
    }
}
