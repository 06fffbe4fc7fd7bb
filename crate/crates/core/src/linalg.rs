//! Exact sparse row reduction over the rationals.
//!
//! Vectors are sparse maps from an ordered basis key to a rational
//! coefficient. [`Echelon`] keeps one row per pivot, the pivot being the
//! largest key of the row, and optionally tracks how each row was built
//! from the inserted vectors so membership answers come with certificates.

use std::collections::BTreeMap;

use num::{One, Zero};

use crate::Rational;

pub type SparseVec<K> = BTreeMap<K, Rational>;

/// `acc += c * v`, dropping cancelled entries.
pub fn axpy<K: Ord + Clone>(acc: &mut SparseVec<K>, c: &Rational, v: &SparseVec<K>) {
    if c.is_zero() {
        return;
    }
    for (k, x) in v {
        let entry = acc.entry(k.clone()).or_insert_with(Rational::zero);
        *entry += c * x;
        if entry.is_zero() {
            acc.remove(k);
        }
    }
}

#[derive(Clone, Debug)]
struct Row<K> {
    vec: SparseVec<K>,
    combo: SparseVec<usize>,
}

/// Result of reducing a query against an [`Echelon`].
///
/// `query = residual + sum(certificate[i] * input[i])`.
#[derive(Clone, Debug, PartialEq)]
pub struct Reduction<K: Ord> {
    pub residual: SparseVec<K>,
    pub certificate: SparseVec<usize>,
}

impl<K: Ord> Reduction<K> {
    pub fn is_member(&self) -> bool {
        self.residual.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct Echelon<K: Ord + Clone> {
    rows: BTreeMap<K, Row<K>>,
    inputs: usize,
}

impl<K: Ord + Clone> Default for Echelon<K> {
    fn default() -> Self {
        Self::new()
    }
}

impl<K: Ord + Clone> Echelon<K> {
    pub fn new() -> Self {
        Echelon { rows: BTreeMap::new(), inputs: 0 }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Number of vectors inserted so far (independent or not).
    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn pivots(&self) -> impl Iterator<Item = &K> {
        self.rows.keys()
    }

    pub fn is_pivot(&self, k: &K) -> bool {
        self.rows.contains_key(k)
    }

    /// Insert the next input vector. Returns `true` when it enlarged the span.
    pub fn insert(&mut self, v: SparseVec<K>) -> bool {
        let index = self.inputs;
        self.inputs += 1;
        let red = self.reduce(&v);
        if red.residual.is_empty() {
            return false;
        }
        // residual = v - sum(cert * input)
        let mut combo = SparseVec::new();
        combo.insert(index, Rational::one());
        for (i, c) in &red.certificate {
            combo.insert(*i, -c.clone());
        }
        let (pivot, lead) = {
            let (k, c) = red.residual.iter().next_back().expect("nonempty");
            (k.clone(), c.clone())
        };
        let inv = Rational::one() / lead;
        let vec = red.residual.into_iter().map(|(k, c)| (k, c * &inv)).collect();
        let combo = combo.into_iter().map(|(k, c)| (k, c * &inv)).collect();
        self.rows.insert(pivot, Row { vec, combo });
        true
    }

    /// Fully reduce `v`: the residual contains no pivot keys, so it is a
    /// canonical coset representative of `v` modulo the span.
    pub fn reduce(&self, v: &SparseVec<K>) -> Reduction<K> {
        let mut residual = v.clone();
        let mut certificate = SparseVec::new();
        let mut cursor: Option<K> = None;
        loop {
            let next = {
                let mut range: Box<dyn DoubleEndedIterator<Item = (&K, &Rational)>> = match &cursor {
                    None => Box::new(residual.iter()),
                    Some(c) => Box::new(residual.range(..c.clone())),
                };
                let mut found = None;
                while let Some((k, c)) = range.next_back() {
                    if self.rows.contains_key(k) {
                        found = Some((k.clone(), c.clone()));
                        break;
                    }
                }
                found
            };
            let Some((k, c)) = next else { break };
            let row = &self.rows[&k];
            let neg = -c.clone();
            axpy(&mut residual, &neg, &row.vec);
            axpy(&mut certificate, &c, &row.combo);
            cursor = Some(k);
        }
        Reduction { residual, certificate }
    }

    pub fn contains(&self, v: &SparseVec<K>) -> bool {
        self.reduce(v).is_member()
    }
}

/// Recombine inputs with a certificate: `sum(cert[i] * inputs[i])`.
pub fn recombine<K: Ord + Clone>(inputs: &[SparseVec<K>], certificate: &SparseVec<usize>) -> SparseVec<K> {
    let mut out = SparseVec::new();
    for (i, c) in certificate {
        axpy(&mut out, c, &inputs[*i]);
    }
    out
}

/// Rank of a list of vectors.
pub fn rank<K: Ord + Clone>(vs: impl IntoIterator<Item = SparseVec<K>>) -> usize {
    let mut e = Echelon::new();
    for v in vs {
        e.insert(v);
    }
    e.rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(entries: &[(u32, i64)]) -> SparseVec<u32> {
        entries.iter().map(|&(k, c)| (k, Rational::from_integer(c.into()))).collect()
    }

    #[test]
    fn certificate_recombines() {
        let inputs = vec![v(&[(0, 1), (1, 2)]), v(&[(1, 1), (2, 1)]), v(&[(0, 1), (1, 1), (2, -1)])];
        let mut e = Echelon::new();
        let indep: Vec<bool> = inputs.iter().map(|x| e.insert(x.clone())).collect();
        assert_eq!(indep, vec![true, true, false]);
        let q = v(&[(0, 3), (1, 5), (2, -1)]);
        let red = e.reduce(&q);
        assert!(red.is_member());
        assert_eq!(recombine(&inputs, &red.certificate), q);
    }

    #[test]
    fn residual_is_canonical() {
        let mut e = Echelon::new();
        e.insert(v(&[(0, 1), (2, 1)]));
        let a = e.reduce(&v(&[(2, 1)])).residual;
        let b = e.reduce(&v(&[(0, -1)])).residual;
        assert_eq!(a, b);
        assert!(!e.contains(&v(&[(1, 1)])));
    }
}
