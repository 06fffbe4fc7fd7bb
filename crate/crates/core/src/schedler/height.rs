//! Height-labelled multi-necklace monomials and their linear combinations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::hpoly::{write_coeff, HPoly};
use crate::linalg::SparseVec;
use crate::necklace::Necklace;
use crate::quiver::{ArrowId, Quiver, VertexId};

/// One letter slot: an arrow at a height.
pub type Slot = (ArrowId, u32);

/// A product of height-labelled cyclic words and vertex idempotents.
///
/// Stored canonically: heights are `1..=N`, every component starts at its
/// lowest height, components are sorted by that height, and idempotents
/// are sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HeightMonomial {
    comps: Vec<Vec<Slot>>,
    idem: Vec<VertexId>,
}

impl HeightMonomial {
    /// The unit monomial.
    pub fn one() -> Self {
        HeightMonomial::default()
    }

    /// Validate components (closed words, distinct heights) and canonicalize.
    pub fn new(q: &Quiver, comps: Vec<Vec<Slot>>, idem: Vec<VertexId>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for c in &comps {
            let word: Vec<ArrowId> = c.iter().map(|s| s.0).collect();
            q.validate_cycle(&word)?;
            for (_, h) in c {
                if !seen.insert(*h) {
                    return Err(Error::DuplicateHeight(*h));
                }
            }
        }
        Ok(Self::canonical(comps, idem))
    }

    /// Canonicalize data known to be valid.
    pub(crate) fn canonical(comps: Vec<Vec<Slot>>, mut idem: Vec<VertexId>) -> Self {
        let mut heights: Vec<u32> = comps.iter().flatten().map(|s| s.1).collect();
        heights.sort_unstable();
        let rank = |h: u32| heights.binary_search(&h).expect("present") as u32 + 1;
        let mut comps: Vec<Vec<Slot>> = comps
            .into_iter()
            .filter(|c| !c.is_empty())
            .map(|c| {
                let start = (0..c.len()).min_by_key(|&i| c[i].1).expect("nonempty");
                (0..c.len()).map(|k| c[(start + k) % c.len()]).map(|(a, h)| (a, rank(h))).collect()
            })
            .collect();
        comps.sort_by_key(|c| c[0].1);
        idem.sort();
        HeightMonomial { comps, idem }
    }

    pub fn components(&self) -> &[Vec<Slot>] {
        &self.comps
    }

    pub fn idempotents(&self) -> &[VertexId] {
        &self.idem
    }

    pub fn letters(&self) -> usize {
        self.comps.iter().map(Vec::len).sum()
    }

    /// PBW weight: letters plus idempotent factors.
    pub fn weight(&self) -> usize {
        self.letters() + self.idem.len()
    }

    /// Place `other` above `self`.
    pub fn stack(&self, other: &HeightMonomial) -> HeightMonomial {
        let n = self.letters() as u32;
        let mut comps = self.comps.clone();
        comps.extend(other.comps.iter().map(|c| c.iter().map(|&(a, h)| (a, h + n)).collect()));
        let mut idem = self.idem.clone();
        idem.extend_from_slice(&other.idem);
        HeightMonomial::canonical(comps, idem)
    }

    /// Forget heights: the multiset of necklaces, sorted.
    pub fn forget(&self, q: &Quiver) -> Vec<Necklace> {
        let mut out: Vec<Necklace> = self
            .comps
            .iter()
            .map(|c| Necklace::normalized(q, &c.iter().map(|s| s.0).collect::<Vec<_>>()))
            .chain(self.idem.iter().map(|v| Necklace::idempotent(*v)))
            .collect();
        out.sort();
        out
    }

    /// The monomial with components in the given order and consecutive
    /// heights along each canonical rotation.
    pub fn lift_product(necklaces: &[Necklace]) -> HeightMonomial {
        let mut sorted = necklaces.to_vec();
        sorted.sort();
        let mut comps = Vec::new();
        let mut idem = Vec::new();
        let mut h = 0;
        for n in &sorted {
            if n.is_idempotent() {
                idem.push(n.vertex());
            } else {
                comps.push(
                    n.word()
                        .iter()
                        .map(|&a| {
                            h += 1;
                            (a, h)
                        })
                        .collect(),
                );
            }
        }
        HeightMonomial::canonical(comps, idem)
    }

    pub fn display<'a>(&'a self, q: &'a Quiver) -> impl fmt::Display + 'a {
        MonoDisplay { m: self, q }
    }
}

struct MonoDisplay<'a> {
    m: &'a HeightMonomial,
    q: &'a Quiver,
}

impl fmt::Display for MonoDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .m
            .comps
            .iter()
            .map(|c| {
                let slots: Vec<String> = c.iter().map(|(a, h)| format!("({},{h})", self.q.arrow_name(*a))).collect();
                format!("h[{}]", slots.join(","))
            })
            .collect();
        parts.extend(self.m.idem.iter().map(|v| format!("e({})", self.q.vertex_name(*v))));
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" & "))
        }
    }
}

/// A `Q[hbar]`-combination of height monomials.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct HeightSum {
    terms: BTreeMap<HeightMonomial, HPoly>,
}

impl From<HeightMonomial> for HeightSum {
    fn from(m: HeightMonomial) -> Self {
        HeightSum::monomial(m, HPoly::one())
    }
}

impl HeightSum {
    pub fn zero() -> Self {
        HeightSum::default()
    }

    pub fn one() -> Self {
        HeightMonomial::one().into()
    }

    pub fn monomial(m: HeightMonomial, c: HPoly) -> Self {
        let mut s = HeightSum::zero();
        s.add_term(m, c);
        s
    }

    pub fn add_term(&mut self, m: HeightMonomial, c: HPoly) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(e) => {
                *e += &c;
                if e.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&HeightMonomial, &HPoly)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &HeightMonomial) -> HPoly {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn add(&self, other: &HeightSum) -> HeightSum {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &HeightSum) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn sub(&self, other: &HeightSum) -> HeightSum {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn scale(&self, c: &HPoly) -> HeightSum {
        let mut out = HeightSum::zero();
        for (m, x) in &self.terms {
            out.add_term(m.clone(), x * c);
        }
        out
    }

    /// Largest PBW weight of a term.
    pub fn weight(&self) -> usize {
        self.terms.keys().map(HeightMonomial::weight).max().unwrap_or(0)
    }

    /// Keep only the coefficient of `hbar^k`.
    pub fn hbar_coeff(&self, k: usize) -> HeightSum {
        let mut out = HeightSum::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), HPoly::constant(c.coeff(k)));
        }
        out
    }

    /// Lowest `hbar` power occurring, if nonzero.
    pub fn valuation(&self) -> Option<usize> {
        self.terms.values().filter_map(HPoly::valuation).min()
    }

    pub fn to_sparse(&self) -> SparseVec<(HeightMonomial, usize)> {
        let mut v = SparseVec::new();
        for (m, c) in &self.terms {
            for (k, x) in c.terms() {
                v.insert((m.clone(), k), x.clone());
            }
        }
        v
    }

    pub fn from_sparse(v: &SparseVec<(HeightMonomial, usize)>) -> HeightSum {
        let mut out = HeightSum::zero();
        for ((m, k), c) in v {
            out.add_term(m.clone(), HPoly::monomial(c.clone(), *k));
        }
        out
    }

    /// Forget heights, keyed by sorted necklace multisets.
    pub fn forget(&self, q: &Quiver) -> BTreeMap<Vec<Necklace>, HPoly> {
        let mut out: BTreeMap<Vec<Necklace>, HPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = out.entry(m.forget(q)).or_default();
            *e += c;
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    pub fn display<'a>(&'a self, q: &'a Quiver) -> impl fmt::Display + 'a {
        SumDisplay { s: self, q }
    }
}

struct SumDisplay<'a> {
    s: &'a HeightSum,
    q: &'a Quiver,
}

impl fmt::Display for SumDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.s.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.s.terms.iter().enumerate() {
            let unit = *m == HeightMonomial::one();
            write_coeff(f, i == 0, c, !unit)?;
            if !unit {
                write!(f, "{}", m.display(self.q))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_relabels_and_rotates() {
        let q = Quiver::jordan().double().unwrap();
        let a = q.arrow_by_name("a").unwrap();
        let s = q.arrow_by_name("a*").unwrap();
        let m1 = HeightMonomial::new(&q, vec![vec![(s, 7), (a, 3)]], vec![]).unwrap();
        let m2 = HeightMonomial::new(&q, vec![vec![(a, 1), (s, 2)]], vec![]).unwrap();
        assert_eq!(m1, m2);
        assert_eq!(m1.display(&q).to_string(), "h[(a,1),(a*,2)]");
        let err = HeightMonomial::new(&q, vec![vec![(a, 1)], vec![(s, 1)]], vec![]);
        assert_eq!(err.unwrap_err(), Error::DuplicateHeight(1));
    }

    #[test]
    fn stacking_shifts_heights() {
        let q = Quiver::jordan().double().unwrap();
        let a = q.arrow_by_name("a").unwrap();
        let s = q.arrow_by_name("a*").unwrap();
        let x = HeightMonomial::new(&q, vec![vec![(a, 1)]], vec![]).unwrap();
        let y = HeightMonomial::new(&q, vec![vec![(s, 1)]], vec![VertexId(0)]).unwrap();
        assert_eq!(x.stack(&y).display(&q).to_string(), "h[(a,1)] & h[(a*,2)] & e(v)");
        assert_eq!(x.stack(&HeightMonomial::one()), x);
    }
}
