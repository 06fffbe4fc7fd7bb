//! Skein relations and rewriting to PBW normal form.
//!
//! For two letters at adjacent heights `h < h'` the relation reads
//! `X = X' + c X''`, where `X'` swaps the two heights and `X''` contracts
//! the pair. Across components `c = hbar^k * pair` and the two components
//! fuse; within a component `c = hbar * pair` and it splits in two.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::hpoly::HPoly;
use crate::necklace::{pairing, rest_after, Necklace};
use crate::quiver::{ArrowId, Quiver, VertexId};
use crate::rat;

use super::height::{HeightMonomial, Slot};

/// Order in which operator factors are multiplied by the quantum trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceOrder {
    /// Lowest height leftmost.
    Increasing,
    /// Highest height leftmost.
    Decreasing,
}

/// The switches left open by the skein relations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SkeinConvention {
    /// Power of `hbar` on the contraction between different components.
    pub inter_hbar: u8,
    /// Power of `hbar` on the contraction inside one component (always 1).
    pub intra_hbar: u8,
    /// `pair(a, a*)`; `pair(a*, a)` is its negative.
    pub sign: i8,
    pub order: TraceOrder,
}

impl Default for SkeinConvention {
    /// The setting selected by calibration.
    fn default() -> Self {
        SkeinConvention { inter_hbar: 1, intra_hbar: 1, sign: -1, order: TraceOrder::Increasing }
    }
}

impl SkeinConvention {
    /// All eight candidate settings.
    pub fn all() -> Vec<SkeinConvention> {
        let mut out = Vec::new();
        for order in [TraceOrder::Increasing, TraceOrder::Decreasing] {
            for inter_hbar in [0, 1] {
                for sign in [1, -1] {
                    out.push(SkeinConvention { inter_hbar, intra_hbar: 1, sign, order });
                }
            }
        }
        out
    }
}

impl fmt::Display for SkeinConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let order = match self.order {
            TraceOrder::Increasing => "increasing",
            TraceOrder::Decreasing => "decreasing",
        };
        write!(f, "inter_hbar={} intra_hbar={} sign={:+} order={order}", self.inter_hbar, self.intra_hbar, self.sign)
    }
}

/// Mutable working copy of a monomial: components keep their slot order,
/// heights may be any distinct integers.
#[derive(Clone, Debug)]
pub(crate) struct Work {
    pub comps: Vec<Vec<Slot>>,
    pub idem: Vec<VertexId>,
}

impl Work {
    pub fn from_monomial(m: &HeightMonomial) -> Work {
        Work { comps: m.components().to_vec(), idem: m.idempotents().to_vec() }
    }

    pub fn finish(self) -> HeightMonomial {
        HeightMonomial::canonical(self.comps, self.idem)
    }

    /// `(component, position)` of every height, indexed by height order.
    fn slots_by_height(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<(u32, usize, usize)> = Vec::new();
        for (c, comp) in self.comps.iter().enumerate() {
            for (j, s) in comp.iter().enumerate() {
                v.push((s.1, c, j));
            }
        }
        v.sort_unstable();
        v.into_iter().map(|(_, c, j)| (c, j)).collect()
    }

    fn swap_heights(&mut self, x: (usize, usize), y: (usize, usize)) {
        let hx = self.comps[x.0][x.1].1;
        let hy = self.comps[y.0][y.1].1;
        self.comps[x.0][x.1].1 = hy;
        self.comps[y.0][y.1].1 = hx;
    }
}

/// Tie-breaking for the PBW target order.
pub(crate) trait Choice {
    /// Pick one index among `n` equally valid ones.
    fn pick(&mut self, n: usize) -> usize;
    fn shuffle(&mut self, v: &mut [usize]);
}

/// Always take the first option.
pub(crate) struct First;

impl Choice for First {
    fn pick(&mut self, _n: usize) -> usize {
        0
    }
    fn shuffle(&mut self, _v: &mut [usize]) {}
}

pub(crate) struct Random<'r, R: Rng>(pub &'r mut R);

impl<R: Rng> Choice for Random<'_, R> {
    fn pick(&mut self, n: usize) -> usize {
        self.0.gen_range(0..n)
    }
    fn shuffle(&mut self, v: &mut [usize]) {
        v.shuffle(self.0);
    }
}

/// Target rank (0-based position in the standard order) of every slot.
///
/// Components are ordered by necklace, equal necklaces by their current
/// lowest height; each is read from a canonical-rotation start, choosing
/// among equal starts the one with the lowest current height.
pub(crate) fn target_ranks(q: &Quiver, w: &Work, choice: &mut impl Choice) -> Vec<Vec<usize>> {
    let mut keyed: Vec<(Necklace, u32, usize, usize)> = Vec::new();
    for (c, comp) in w.comps.iter().enumerate() {
        let word: Vec<ArrowId> = comp.iter().map(|s| s.0).collect();
        let neck = Necklace::normalized(q, &word);
        let n = word.len();
        let mut starts: Vec<usize> = (0..n).filter(|&r| (0..n).all(|i| word[(r + i) % n] == neck.word()[i])).collect();
        starts.sort_by_key(|&r| comp[r].1);
        let start = starts[choice.pick(starts.len())];
        let low = comp.iter().map(|s| s.1).min().expect("nonempty");
        keyed.push((neck, low, c, start));
    }
    keyed.sort_by(|x, y| x.0.cmp(&y.0).then(x.1.cmp(&y.1)));
    // random mode may permute runs of equal necklaces
    let mut i = 0;
    while i < keyed.len() {
        let mut j = i + 1;
        while j < keyed.len() && keyed[j].0 == keyed[i].0 {
            j += 1;
        }
        if j - i > 1 {
            let mut idx: Vec<usize> = (0..j - i).collect();
            choice.shuffle(&mut idx);
            let run: Vec<_> = idx.iter().map(|&k| keyed[i + k].clone()).collect();
            keyed[i..j].clone_from_slice(&run);
        }
        i = j;
    }
    let mut ranks: Vec<Vec<usize>> = w.comps.iter().map(|c| vec![0; c.len()]).collect();
    let mut r = 0;
    for (_, _, c, start) in keyed {
        let n = w.comps[c].len();
        for k in 0..n {
            ranks[c][(start + k) % n] = r;
            r += 1;
        }
    }
    ranks
}

/// The contraction term `c X''` for slots `lo` (lower height) and `hi`.
pub(crate) fn contraction(q: &Quiver, conv: &SkeinConvention, w: &Work, lo: (usize, usize), hi: (usize, usize)) -> Option<(Work, HPoly)> {
    let a_lo = w.comps[lo.0][lo.1].0;
    let a_hi = w.comps[hi.0][hi.1].0;
    let p = pairing(q, a_lo, a_hi, conv.sign as i64);
    if p == 0 {
        return None;
    }
    let mut comps: Vec<Vec<Slot>> = Vec::new();
    let mut idem = w.idem.clone();
    if lo.0 != hi.0 {
        for (c, comp) in w.comps.iter().enumerate() {
            if c != lo.0 && c != hi.0 {
                comps.push(comp.clone());
            }
        }
        let mut joined = rest_after(&w.comps[lo.0], lo.1);
        joined.extend(rest_after(&w.comps[hi.0], hi.1));
        if joined.is_empty() {
            idem.push(q.target(a_lo));
        } else {
            comps.push(joined);
        }
        Some((Work { comps, idem }, HPoly::monomial(rat(p), conv.inter_hbar as usize)))
    } else {
        let comp = &w.comps[lo.0];
        let n = comp.len();
        let (j, jp) = (lo.1, hi.1);
        // letters strictly between `from` and `to`, going forward cyclically
        let between = |from: usize, to: usize| -> Vec<Slot> {
            let mut out = Vec::new();
            let mut k = (from + 1) % n;
            while k != to {
                out.push(comp[k]);
                k = (k + 1) % n;
            }
            out
        };
        for (c, other) in w.comps.iter().enumerate() {
            if c != lo.0 {
                comps.push(other.clone());
            }
        }
        let a_part = between(jp, j);
        let b_part = between(j, jp);
        if a_part.is_empty() {
            idem.push(q.target(a_lo));
        } else {
            comps.push(a_part);
        }
        if b_part.is_empty() {
            idem.push(q.target(a_hi));
        } else {
            comps.push(b_part);
        }
        Some((Work { comps, idem }, HPoly::monomial(rat(p), conv.intra_hbar as usize)))
    }
}

/// Adjacent height pairs `(lo, hi)` that are out of target order.
pub(crate) fn inversions(w: &Work, ranks: &[Vec<usize>]) -> Vec<((usize, usize), (usize, usize))> {
    let by_h = w.slots_by_height();
    by_h.windows(2)
        .filter(|p| ranks[p[0].0][p[0].1] > ranks[p[1].0][p[1].1])
        .map(|p| (p[0], p[1]))
        .collect()
}

/// One rewriting pass: move `w` to its target order, collecting the
/// contraction terms. Returns the final standard monomial and the terms.
pub(crate) fn sort_to_target(
    q: &Quiver,
    conv: &SkeinConvention,
    mut w: Work,
    choice: &mut impl Choice,
    random_pick: &mut dyn FnMut(usize) -> usize,
) -> (HeightMonomial, Vec<(Work, HPoly)>) {
    let ranks = target_ranks(q, &w, choice);
    let mut extra = Vec::new();
    loop {
        let inv = inversions(&w, &ranks);
        if inv.is_empty() {
            break;
        }
        let (lo, hi) = inv[random_pick(inv.len())];
        if let Some(t) = contraction(q, conv, &w, lo, hi) {
            extra.push(t);
        }
        w.swap_heights(lo, hi);
    }
    (w.finish(), extra)
}

/// Whether `m` is in PBW normal form.
pub fn is_standard(q: &Quiver, m: &HeightMonomial) -> bool {
    let w = Work::from_monomial(m);
    let ranks = target_ranks(q, &w, &mut First);
    inversions(&w, &ranks).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eight_distinct_settings() {
        let all = SkeinConvention::all();
        assert_eq!(all.len(), 8);
        let set: std::collections::BTreeSet<_> = all.iter().collect();
        assert_eq!(set.len(), 8);
        assert!(all.contains(&SkeinConvention::default()));
    }

    #[test]
    fn standardness() {
        let q = Quiver::jordan().double().unwrap();
        let a = q.arrow_by_name("a").unwrap();
        let s = q.arrow_by_name("a*").unwrap();
        let good = HeightMonomial::new(&q, vec![vec![(a, 1), (s, 2)]], vec![]).unwrap();
        let bad = HeightMonomial::new(&q, vec![vec![(s, 1), (a, 2)]], vec![]).unwrap();
        assert!(is_standard(&q, &good));
        assert!(!is_standard(&q, &bad));
        let two = HeightMonomial::new(&q, vec![vec![(s, 1)], vec![(a, 2)]], vec![]).unwrap();
        assert!(!is_standard(&q, &two));
        let periodic = HeightMonomial::new(&q, vec![vec![(a, 1), (a, 2)]], vec![]).unwrap();
        assert!(is_standard(&q, &periodic));
    }
}
