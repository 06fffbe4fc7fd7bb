//! The quantized necklace algebra: height words modulo skein relations,
//! with the stacking product, PBW normal forms, lifting, the quantum
//! moment element and truncated quantum reduction ideals.

mod height;
mod skein;

use std::collections::HashMap;
use std::sync::Mutex;

use num::One;
use rand::Rng;

pub use height::{HeightMonomial, HeightSum, Slot};
pub use skein::{is_standard, SkeinConvention, TraceOrder};

use crate::error::{Error, Result};
use crate::hpoly::HPoly;
use crate::linalg::{Echelon, Reduction};
use crate::necklace::{necklaces_up_to, ClassicalIdeal, Necklace, NecklaceSum};
use crate::quiver::{ArrowId, Quiver};
use crate::Rational;

use skein::{sort_to_target, First, Random, Work};

/// `N(Q)_hbar` over a doubled quiver under a fixed skein convention.
#[derive(Debug)]
pub struct Schedler {
    quiver: Quiver,
    conv: SkeinConvention,
    memo: Mutex<HashMap<HeightMonomial, HeightSum>>,
}

impl Clone for Schedler {
    fn clone(&self) -> Self {
        Schedler::new(&self.quiver, self.conv).expect("already validated")
    }
}

impl Schedler {
    pub fn new(q: &Quiver, conv: SkeinConvention) -> Result<Schedler> {
        if !q.is_doubled() {
            return Err(Error::NotDoubled);
        }
        Ok(Schedler { quiver: q.clone(), conv, memo: Mutex::new(HashMap::new()) })
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn convention(&self) -> SkeinConvention {
        self.conv
    }

    /// PBW normal form of a single monomial.
    pub fn rewrite_to_pbw(&self, m: &HeightMonomial) -> HeightSum {
        if let Some(hit) = self.memo.lock().expect("memo").get(m) {
            return hit.clone();
        }
        let (standard, extra) = sort_to_target(&self.quiver, &self.conv, Work::from_monomial(m), &mut First, &mut |_| 0);
        let mut out = HeightSum::from(standard);
        for (w, c) in extra {
            out.add_assign(&self.rewrite_to_pbw(&w.finish()).scale(&c));
        }
        self.memo.lock().expect("memo").insert(m.clone(), out.clone());
        out
    }

    /// Normal form using random tie-breaks and random swap order, without
    /// memoization. Agrees with [`Self::rewrite_to_pbw`] when rewriting is confluent.
    pub fn rewrite_randomized(&self, m: &HeightMonomial, rng: &mut impl Rng) -> HeightSum {
        let w = Work::from_monomial(m);
        let mut local = rand_chacha::ChaCha8Rng::seed_from_u64(rng.gen());
        let mut pick_rng = rand_chacha::ChaCha8Rng::seed_from_u64(rng.gen());
        let mut picker = |n: usize| pick_rng.gen_range(0..n);
        let (standard, extra) = sort_to_target(&self.quiver, &self.conv, w, &mut Random(&mut local), &mut picker);
        let mut out = HeightSum::from(standard);
        for (w, c) in extra {
            out.add_assign(&self.rewrite_randomized(&w.finish(), rng).scale(&c));
        }
        out
    }

    /// Rewrite every term of a sum of (possibly nonstandard) monomials.
    pub fn normalize(&self, x: &HeightSum) -> HeightSum {
        let mut out = HeightSum::zero();
        for (m, c) in x.terms() {
            out.add_assign(&self.rewrite_to_pbw(m).scale(c));
        }
        out
    }

    /// `x * y`: place `y` above `x` and rewrite.
    pub fn star(&self, x: &HeightSum, y: &HeightSum) -> HeightSum {
        let mut out = HeightSum::zero();
        for (m1, c1) in x.terms() {
            for (m2, c2) in y.terms() {
                out.add_assign(&self.rewrite_to_pbw(&m1.stack(m2)).scale(&(c1 * c2)));
            }
        }
        out
    }

    /// `x * y - y * x`.
    pub fn commutator(&self, x: &HeightSum, y: &HeightSum) -> HeightSum {
        self.star(x, y).sub(&self.star(y, x))
    }

    /// Lift a necklace combination: heights increase along each canonical rotation.
    pub fn lift(&self, x: &NecklaceSum) -> HeightSum {
        let mut out = HeightSum::zero();
        for (n, c) in x.terms() {
            out.add_term(HeightMonomial::lift_product(std::slice::from_ref(n)), HPoly::constant(c.clone()));
        }
        out
    }

    /// Lift of a symmetric product of necklaces.
    pub fn lift_product(&self, ns: &[Necklace]) -> HeightSum {
        HeightMonomial::lift_product(ns).into()
    }

    /// `sum_a (a,1)(a*,2) - (a*,1)(a,2)` in normal form.
    pub fn quantum_moment(&self) -> HeightSum {
        self.normalize(&self.quantum_moment_raw())
    }

    /// The quantum moment element before rewriting.
    pub fn quantum_moment_raw(&self) -> HeightSum {
        let q = &self.quiver;
        let mut out = HeightSum::zero();
        for a in q.original_arrows() {
            let s = q.star(a).expect("doubled");
            out.add_term(HeightMonomial::canonical(vec![vec![(a, 1), (s, 2)]], vec![]), HPoly::one());
            out.add_term(HeightMonomial::canonical(vec![vec![(s, 1), (a, 2)]], vec![]), -HPoly::one());
        }
        out
    }

    /// One lifted monomial per multiset of necklaces of total weight at
    /// most `maxdeg` (an idempotent weighs 1, a cyclic word its length).
    pub fn pbw_basis(&self, maxdeg: usize) -> Vec<HeightMonomial> {
        let gens = necklaces_up_to(&self.quiver, maxdeg);
        let weight = |n: &Necklace| n.degree().max(1);
        let mut out = Vec::new();
        let mut stack: Vec<(Vec<Necklace>, usize, usize)> = vec![(Vec::new(), 0, 0)];
        while let Some((cur, start, w)) = stack.pop() {
            out.push(HeightMonomial::lift_product(&cur));
            for (i, g) in gens.iter().enumerate().skip(start) {
                if w + weight(g) <= maxdeg {
                    let mut next = cur.clone();
                    next.push(g.clone());
                    stack.push((next, i, w + weight(g)));
                }
            }
        }
        out.sort();
        out
    }
}

/// One skein relation `X = X' + c X''` for the letters at heights `h` and `h + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkeinRelation {
    pub original: HeightMonomial,
    pub swapped: HeightMonomial,
    /// `(X'', pairing with sign +1, same component)` when the letters pair.
    pub contraction: Option<(HeightMonomial, i64, bool)>,
}

impl SkeinRelation {
    /// The generator `X - X' - c X''` under `conv`.
    pub fn generator(&self, conv: &SkeinConvention) -> HeightSum {
        let mut out = HeightSum::from(self.original.clone()).sub(&self.swapped.clone().into());
        if let Some((m, p, intra)) = &self.contraction {
            let k = if *intra { conv.intra_hbar } else { conv.inter_hbar } as usize;
            out.add_term(m.clone(), HPoly::monomial(crate::rat(-p * conv.sign as i64), k));
        }
        out
    }
}

/// The skein relation swapping heights `h` and `h + 1` of `m` (1-based).
pub fn skein_relation(q: &Quiver, m: &HeightMonomial, h: u32) -> SkeinRelation {
    let w = Work::from_monomial(m);
    let find = |h: u32| -> (usize, usize) {
        for (c, comp) in w.comps.iter().enumerate() {
            if let Some(j) = comp.iter().position(|s| s.1 == h) {
                return (c, j);
            }
        }
        panic!("height {h} not present");
    };
    let (lo, hi) = (find(h), find(h + 1));
    let unit = SkeinConvention { inter_hbar: 1, intra_hbar: 1, sign: 1, order: TraceOrder::Increasing };
    let contraction = skein::contraction(q, &unit, &w, lo, hi).map(|(x, c)| {
        let p = c.terms().next().map(|(_, r)| r.to_integer().try_into().expect("small")).expect("nonzero");
        (x.finish(), p, lo.0 == hi.0)
    });
    let mut swapped = w.clone();
    swapped.comps[lo.0][lo.1].1 = h + 1;
    swapped.comps[hi.0][hi.1].1 = h;
    SkeinRelation { original: m.clone(), swapped: swapped.finish(), contraction }
}

/// Every monomial with exactly `n` letters and no idempotents.
///
/// Slots are heights `1..=n`; a permutation sends each slot to the next
/// slot of its component, and arrows are assigned so that components compose.
pub fn all_monomials(q: &Quiver, n: usize) -> Vec<HeightMonomial> {
    fn perms(n: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..n).collect();
        fn heap(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if k <= 1 {
                out.push(cur.clone());
                return;
            }
            for i in 0..k {
                heap(k - 1, cur, out);
                let j = if k.is_multiple_of(2) { i } else { 0 };
                cur.swap(j, k - 1);
            }
        }
        heap(n, &mut cur, &mut out);
        out
    }
    let arrows: Vec<ArrowId> = q.arrows().collect();
    let mut out = Vec::new();
    for next in perms(n) {
        let mut label = vec![ArrowId(0); n];
        fn assign(q: &Quiver, arrows: &[ArrowId], next: &[usize], label: &mut Vec<ArrowId>, i: usize, out: &mut Vec<Vec<ArrowId>>) {
            if i == label.len() {
                out.push(label.clone());
                return;
            }
            for &a in arrows {
                label[i] = a;
                // R-to-L composition: s(letter) = t(next letter), checked once both are set
                let ok = (0..=i).all(|k| {
                    let nk = next[k];
                    nk > i || q.source(label[k]) == q.target(label[nk])
                });
                if ok {
                    assign(q, arrows, next, label, i + 1, out);
                }
            }
        }
        let mut labels = Vec::new();
        assign(q, &arrows, &next, &mut label, 0, &mut labels);
        for lab in labels {
            let mut seen = vec![false; n];
            let mut comps = Vec::new();
            for start in 0..n {
                if seen[start] {
                    continue;
                }
                let mut comp = Vec::new();
                let mut k = start;
                while !seen[k] {
                    seen[k] = true;
                    comp.push((lab[k], k as u32 + 1));
                    k = next[k];
                }
                comps.push(comp);
            }
            out.push(HeightMonomial::canonical(comps, vec![]));
        }
    }
    out
}

/// Truncated two-sided ideal of `N(Q)_hbar` generated by lifts of the
/// cyclified preprojective ideal.
#[derive(Clone, Debug)]
pub struct QuantumIdeal {
    echelon: Echelon<(HeightMonomial, usize)>,
    inputs: Vec<HeightSum>,
    maxdeg: usize,
}

impl QuantumIdeal {
    /// Span of `hbar^j u * lift(g) * v` over PBW monomials `u, v` with
    /// total weight at most `maxdeg` and `j <= hbar_max`.
    pub fn new(alg: &Schedler, classical: &ClassicalIdeal, maxdeg: usize, hbar_max: usize) -> QuantumIdeal {
        let basis = alg.pbw_basis(maxdeg);
        let mut echelon = Echelon::new();
        let mut inputs = Vec::new();
        for g in classical.generators() {
            let gw = g.terms().map(|(n, _)| n.degree().max(1)).max().unwrap_or(0);
            if gw > maxdeg {
                continue;
            }
            let gh = alg.lift(g);
            for u in &basis {
                if u.weight() + gw > maxdeg {
                    continue;
                }
                let ug = alg.star(&u.clone().into(), &gh);
                for v in &basis {
                    if u.weight() + gw + v.weight() > maxdeg {
                        continue;
                    }
                    let e = alg.star(&ug, &v.clone().into());
                    for j in 0..=hbar_max {
                        let ej = e.scale(&HPoly::monomial(Rational::one(), j));
                        echelon.insert(ej.to_sparse());
                        inputs.push(ej);
                    }
                }
            }
        }
        QuantumIdeal { echelon, inputs, maxdeg }
    }

    pub fn rank(&self) -> usize {
        self.echelon.rank()
    }

    /// All spanning elements, indexed like certificates.
    pub fn inputs(&self) -> &[HeightSum] {
        &self.inputs
    }

    pub fn maxdeg(&self) -> usize {
        self.maxdeg
    }

    pub fn membership(&self, x: &HeightSum) -> Reduction<(HeightMonomial, usize)> {
        self.echelon.reduce(&x.to_sparse())
    }

    /// Canonical coset representative.
    pub fn reduce(&self, x: &HeightSum) -> HeightSum {
        HeightSum::from_sparse(&self.membership(x).residual)
    }
}

/// Random monomial with at most `max_letters` letters in at most
/// `max_comps` components; used by property tests.
pub fn random_monomial(q: &Quiver, max_letters: usize, max_comps: usize, rng: &mut impl Rng) -> HeightMonomial {
    let mut comps: Vec<Vec<ArrowId>> = Vec::new();
    let mut budget = rng.gen_range(1..=max_letters);
    for _ in 0..rng.gen_range(1..=max_comps) {
        if budget == 0 {
            break;
        }
        let len = rng.gen_range(1..=budget);
        let words = crate::necklace::closed_words(q, len);
        if words.is_empty() {
            continue;
        }
        comps.push(words[rng.gen_range(0..words.len())].clone());
        budget -= len;
    }
    let total: usize = comps.iter().map(Vec::len).sum();
    let mut heights: Vec<u32> = (1..=total as u32).collect();
    rand::seq::SliceRandom::shuffle(heights.as_mut_slice(), rng);
    let mut it = heights.into_iter();
    let comps = comps.into_iter().map(|w| w.into_iter().map(|a| (a, it.next().expect("enough"))).collect()).collect();
    HeightMonomial::canonical(comps, vec![])
}

use rand::SeedableRng;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::necklace::necklace_bracket;
    use crate::quiver::VertexId;
    use rand_chacha::ChaCha8Rng;

    fn jordan() -> Schedler {
        Schedler::new(&Quiver::jordan().double().unwrap(), SkeinConvention::default()).unwrap()
    }

    fn hm(alg: &Schedler, comps: &[&[(&str, u32)]], idem: &[&str]) -> HeightMonomial {
        let q = alg.quiver();
        let comps = comps.iter().map(|c| c.iter().map(|(a, h)| (q.arrow_by_name(a).unwrap(), *h)).collect()).collect();
        let idem = idem.iter().map(|v| q.vertex_by_name(v).unwrap()).collect();
        HeightMonomial::new(q, comps, idem).unwrap()
    }

    fn hbar(c: i64) -> HPoly {
        HPoly::monomial(crate::rat(c), 1)
    }

    #[test]
    fn star_examples() {
        let alg = jordan();
        let a: HeightSum = hm(&alg, &[&[("a", 1)]], &[]).into();
        let s: HeightSum = hm(&alg, &[&[("a*", 1)]], &[]).into();
        assert_eq!(alg.star(&a, &HeightSum::one()), a);
        assert_eq!(alg.star(&a, &s), hm(&alg, &[&[("a", 1)], &[("a*", 2)]], &[]).into());
        let c = alg.commutator(&a, &s);
        let e: HeightSum = hm(&alg, &[], &["v"]).into();
        // hbar * lift({a, a*}) with pairing sign -1
        assert_eq!(c, e.scale(&hbar(-1)));
    }

    #[test]
    fn rewrite_examples() {
        let alg = jordan();
        let std_m = hm(&alg, &[&[("a", 1), ("a*", 2)]], &[]);
        assert_eq!(alg.rewrite_to_pbw(&std_m), std_m.clone().into());
        // across components
        let m = hm(&alg, &[&[("a*", 1)], &[("a", 2)]], &[]);
        let expect = HeightSum::from(hm(&alg, &[&[("a", 1)], &[("a*", 2)]], &[]))
            .add(&HeightSum::from(hm(&alg, &[], &["v"])).scale(&hbar(1)));
        assert_eq!(alg.rewrite_to_pbw(&m), expect);
        // inside one component: split into two idempotents
        let m = hm(&alg, &[&[("a*", 1), ("a", 2)]], &[]);
        let expect = HeightSum::from(std_m).add(&HeightSum::from(hm(&alg, &[], &["v", "v"])).scale(&hbar(1)));
        assert_eq!(alg.rewrite_to_pbw(&m), expect);
    }

    #[test]
    fn lift_and_moment() {
        let alg = jordan();
        let q = alg.quiver().clone();
        let e = NecklaceSum::from(Necklace::idempotent(VertexId(0)));
        assert_eq!(alg.lift(&e), hm(&alg, &[], &["v"]).into());
        let aa = NecklaceSum::from(Necklace::from_names(&q, &["a", "a*"]).unwrap());
        assert_eq!(alg.lift(&aa), hm(&alg, &[&[("a", 1), ("a*", 2)]], &[]).into());
        let w = alg.quantum_moment();
        assert_eq!(w, HeightSum::from(hm(&alg, &[], &["v", "v"])).scale(&hbar(-1)));
        let raw = alg.quantum_moment_raw().forget(&q);
        assert!(raw.is_empty(), "w cyclified vanishes on the Jordan quiver");
        let a2 = Schedler::new(&Quiver::a2().double().unwrap(), SkeinConvention::default()).unwrap();
        let raw = a2.quantum_moment_raw();
        assert_eq!(raw.len(), 2);
        let w = a2.quantum_moment();
        assert_eq!(w, HeightSum::from(hm(&a2, &[], &["v1", "v2"])).scale(&hbar(-1)));
    }

    #[test]
    fn pbw_basis_counts() {
        let alg = jordan();
        assert_eq!(alg.pbw_basis(1).len(), 4);
        let b2 = alg.pbw_basis(2);
        assert_eq!(b2.len(), 13);
        let q = alg.quiver();
        let images: std::collections::BTreeSet<_> = b2.iter().map(|m| m.forget(q)).collect();
        assert_eq!(images.len(), 13);
        assert!(b2.iter().all(|m| is_standard(q, m)));
    }

    #[test]
    fn quantization_of_generators() {
        let alg = jordan();
        let q = alg.quiver().clone();
        let a = NecklaceSum::from(Necklace::from_names(&q, &["a"]).unwrap());
        let s = NecklaceSum::from(Necklace::from_names(&q, &["a*"]).unwrap());
        let c = alg.commutator(&alg.lift(&a), &alg.lift(&s));
        let br = crate::necklace::bracket_with(&q, &a, &s, -1).unwrap();
        assert_eq!(c.hbar_coeff(1), alg.lift(&br));
        assert_eq!(necklace_bracket(&q, &a, &s).unwrap(), br.scale(&crate::rat(-1)));
    }

    #[test]
    fn randomized_rewrite_agrees_on_samples() {
        let alg = jordan();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..30 {
            let m = random_monomial(alg.quiver(), 5, 3, &mut rng);
            assert_eq!(alg.rewrite_randomized(&m, &mut rng), alg.rewrite_to_pbw(&m));
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(48))]

        #[test]
        fn rewriting_is_confluent(seed: u64) {
            let alg = jordan();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_monomial(alg.quiver(), 5, 3, &mut rng);
            proptest::prop_assert_eq!(alg.rewrite_randomized(&m, &mut rng), alg.rewrite_to_pbw(&m));
        }

        #[test]
        fn star_is_associative(i in 0usize..512, j in 0usize..512, k in 0usize..512) {
            let alg = jordan();
            let basis = alg.pbw_basis(2);
            let pick = |n: usize| HeightSum::from(basis[n % basis.len()].clone());
            let (x, y, z) = (pick(i), pick(j), pick(k));
            proptest::prop_assert_eq!(alg.star(&alg.star(&x, &y), &z), alg.star(&x, &alg.star(&y, &z)));
        }
    }
}
