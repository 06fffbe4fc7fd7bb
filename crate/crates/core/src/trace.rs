//! Classical and quantum trace maps.

use std::collections::HashMap;
use std::sync::Mutex;

use num::One;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hpoly::HPoly;
use crate::necklace::NecklaceSum;
use crate::quiver::{ArrowId, DimVector, Quiver};
use crate::schedler::{HeightMonomial, HeightSum, Slot, TraceOrder};
use crate::weyl::{Entry, GlBasis, Mono, PolySum, RepSpace, WeylMono, WeylSum};
use crate::{rat, Rational};

/// Normal-ordered product of a word of generators, with integer
/// coefficients keyed by `(monomial, hbar power)`.
fn normal_order(word: &[Entry], acc: &mut HashMap<(WeylMono, usize), i64>, weight: i64) {
    let mut cur: HashMap<(WeylMono, usize), i64> = HashMap::new();
    cur.insert((WeylMono::one(), 0), weight);
    for g in word {
        let mut next: HashMap<(WeylMono, usize), i64> = HashMap::with_capacity(cur.len() * 2);
        for ((m, h), c) in cur {
            match *g {
                Entry::D(v) => {
                    *next.entry((WeylMono { x: m.x.clone(), d: m.d.bump(v, 1) }, h)).or_default() += c;
                }
                Entry::X(v) => {
                    let b = m.d.exp(v) as i64;
                    if b > 0 {
                        *next.entry((WeylMono { x: m.x.clone(), d: m.d.bump(v, -1) }, h + 1)).or_default() += c * b;
                    }
                    *next.entry((WeylMono { x: m.x.bump(v, 1), d: m.d }, h)).or_default() += c;
                }
            }
        }
        cur = next;
    }
    for (k, c) in cur {
        *acc.entry(k).or_default() += c;
    }
}

fn to_weyl(acc: HashMap<(WeylMono, usize), i64>) -> WeylSum {
    let mut out = WeylSum::zero();
    for ((m, h), c) in acc {
        if c != 0 {
            out.add_term(m, HPoly::monomial(rat(c), h));
        }
    }
    out
}

/// Calls `f` with every assignment of indices to `ranges`.
fn for_each_assignment(ranges: &[usize], mut f: impl FnMut(&[usize])) {
    if ranges.contains(&0) {
        return;
    }
    let mut idx = vec![0; ranges.len()];
    loop {
        f(&idx);
        let mut k = 0;
        loop {
            if k == ranges.len() {
                return;
            }
            idx[k] += 1;
            if idx[k] < ranges[k] {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Doubled quiver, dimension vector and operator order.
#[derive(Debug)]
pub struct TraceContext {
    space: RepSpace,
    order: TraceOrder,
    cache: Mutex<HashMap<HeightMonomial, WeylSum>>,
}

impl TraceContext {
    pub fn new(q: &Quiver, dim: &DimVector, order: TraceOrder) -> Result<TraceContext> {
        Ok(TraceContext { space: RepSpace::new(q, dim)?, order, cache: Mutex::new(HashMap::new()) })
    }

    pub fn space(&self) -> &RepSpace {
        &self.space
    }

    pub fn quiver(&self) -> &Quiver {
        self.space.quiver()
    }

    pub fn order(&self) -> TraceOrder {
        self.order
    }

    fn dim_at_target(&self, a: ArrowId) -> usize {
        self.space.rows(a)
    }

    /// `Tr` of a cyclic word: the trace of the product of coordinate matrices.
    pub fn classical_trace(&self, x: &NecklaceSum) -> Result<PolySum> {
        x.check(self.quiver())?;
        let mut out = PolySum::zero();
        for (n, c) in x.terms() {
            if n.is_idempotent() {
                out.add_term(Mono::one(), c * rat(self.space.dim().at(n.vertex()) as i64));
                continue;
            }
            let w = n.word();
            let ranges: Vec<usize> = w.iter().map(|a| self.dim_at_target(*a)).collect();
            let mut part = PolySum::zero();
            for_each_assignment(&ranges, |k| {
                let mut m = Mono::one();
                for j in 0..w.len() {
                    let v = self.space.var(w[j], k[j], k[(j + 1) % w.len()]).expect("in range");
                    m = m.bump(v, 1);
                }
                part.add_term(m, Rational::one());
            });
            out = out.add(&part.scale(c));
        }
        Ok(out)
    }

    /// Operator factors of a monomial in multiplication order, for one
    /// index assignment over its slots.
    fn factor_order(&self, slots: &[(usize, usize, u32)]) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..slots.len()).collect();
        idx.sort_by_key(|&i| slots[i].2);
        if self.order == TraceOrder::Decreasing {
            idx.reverse();
        }
        idx
    }

    /// `Tr^q` of a single monomial.
    pub fn quantum_trace_monomial(&self, m: &HeightMonomial) -> WeylSum {
        if let Some(hit) = self.cache.lock().expect("cache").get(m) {
            return hit.clone();
        }
        let out = self.compute_monomial(m);
        self.cache.lock().expect("cache").insert(m.clone(), out.clone());
        out
    }

    /// Fill the cache for many monomials in parallel.
    pub fn precompute(&self, ms: &[HeightMonomial]) {
        let todo: Vec<&HeightMonomial> = {
            let cache = self.cache.lock().expect("cache");
            ms.iter().filter(|m| !cache.contains_key(*m)).collect()
        };
        let done: Vec<(HeightMonomial, WeylSum)> = todo.par_iter().map(|m| ((*m).clone(), self.compute_monomial(m))).collect();
        self.cache.lock().expect("cache").extend(done);
    }

    fn compute_monomial(&self, m: &HeightMonomial) -> WeylSum {
        let scalar: i64 = m.idempotents().iter().map(|v| self.space.dim().at(*v) as i64).product();
        if scalar == 0 {
            return WeylSum::zero();
        }
        // slot list: (component, position, height); index variable per slot
        let mut slots: Vec<(usize, usize, u32)> = Vec::new();
        let mut first: Vec<usize> = Vec::new();
        for (c, comp) in m.components().iter().enumerate() {
            first.push(slots.len());
            for (j, s) in comp.iter().enumerate() {
                slots.push((c, j, s.1));
            }
        }
        let comps = m.components();
        let letter = |i: usize| -> ArrowId { comps[slots[i].0][slots[i].1].0 };
        let next_slot = |i: usize| -> usize {
            let (c, j, _) = slots[i];
            first[c] + (j + 1) % comps[c].len()
        };
        let ranges: Vec<usize> = (0..slots.len()).map(|i| self.dim_at_target(letter(i))).collect();
        let order = self.factor_order(&slots);
        let mut acc = HashMap::new();
        let mut word = Vec::with_capacity(slots.len());
        for_each_assignment(&ranges, |k| {
            word.clear();
            for &i in &order {
                word.push(self.space.entry(letter(i), k[i], k[next_slot(i)]));
            }
            normal_order(&word, &mut acc, scalar);
        });
        to_weyl(acc)
    }

    /// `Tr^q`, linear over `Q[hbar]`.
    pub fn quantum_trace(&self, x: &HeightSum) -> Result<WeylSum> {
        let q = self.quiver();
        let mut out = WeylSum::zero();
        for (m, c) in x.terms() {
            for comp in m.components() {
                if comp.iter().any(|s| s.0.index() >= q.num_arrows()) {
                    return Err(Error::QuiverMismatch);
                }
            }
            if m.idempotents().iter().any(|v| v.index() >= q.num_vertices()) {
                return Err(Error::QuiverMismatch);
            }
            out.add_assign(&self.quantum_trace_monomial(m).scale(c));
        }
        Ok(out)
    }

    /// Set `hbar = 0` and rename derivatives to starred coordinates.
    pub fn phi(&self, d: &WeylSum) -> PolySum {
        self.space.phi(d)
    }

    /// The `(i, j)` entry of the operator matrix of one open height word,
    /// factors multiplied in height order.
    pub fn open_entry(&self, comp: &[Slot], i: usize, j: usize) -> WeylSum {
        let n = comp.len();
        // inner indices k_1..k_{n-1} between consecutive letters
        let ranges: Vec<usize> = comp[1..].iter().map(|s| self.dim_at_target(s.0)).collect();
        let slots: Vec<(usize, usize, u32)> = comp.iter().enumerate().map(|(p, s)| (0, p, s.1)).collect();
        let order = self.factor_order(&slots);
        let mut acc = HashMap::new();
        let mut word = Vec::with_capacity(n);
        for_each_assignment(&ranges, |k| {
            let row = |p: usize| if p == 0 { i } else { k[p - 1] };
            let col = |p: usize| if p + 1 == n { j } else { k[p] };
            word.clear();
            for &p in &order {
                word.push(self.space.entry(comp[p].0, row(p), col(p)));
            }
            normal_order(&word, &mut acc, 1);
        });
        to_weyl(acc)
    }

    /// For each gl basis element, whether `-tr([w_hat] xi)` equals
    /// `(tau - hbar chi0)(xi)`; `[w_hat]` is assembled from the unrewritten
    /// quantum moment element by index contraction.
    pub fn quantum_moment_check(&self) -> Result<Vec<(GlBasis, bool)>> {
        let q = self.quiver();
        let chi = self.space.chi0();
        let mut out = Vec::new();
        for xi in self.space.gl_basis() {
            // tr(M E_pq) = M_qp
            let mut lhs = WeylSum::zero();
            for a in q.original_arrows() {
                let s = q.star(a)?;
                if q.target(a) == xi.vertex {
                    lhs = lhs.sub(&self.open_entry(&[(a, 1), (s, 2)], xi.q, xi.p));
                }
                if q.source(a) == xi.vertex {
                    lhs = lhs.add(&self.open_entry(&[(s, 1), (a, 2)], xi.q, xi.p));
                }
            }
            let rhs = self.space.reduction_generator(&chi, &xi)?;
            out.push((xi, lhs == rhs));
        }
        Ok(out)
    }

    /// `[tau(xi), Tr^q(X)]`.
    pub fn gl_commutator(&self, xi: &GlBasis, x: &HeightSum) -> Result<WeylSum> {
        Ok(self.space.tau(xi)?.commutator(&self.quantum_trace(x)?))
    }
}

/// `Tr` of a single necklace is invariant under rotation of the input word.
pub fn trace_of_word(ctx: &TraceContext, word: &[ArrowId]) -> Result<PolySum> {
    let n = crate::necklace::Necklace::new(ctx.quiver(), word)?;
    ctx.classical_trace(&n.into())
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::necklace::Necklace;
    use crate::schedler::{Schedler, SkeinConvention};
    use crate::quiver::VertexId;

    fn ctx(n: u32) -> TraceContext {
        TraceContext::new(&Quiver::jordan().double().unwrap(), &DimVector(vec![n]), TraceOrder::Increasing).unwrap()
    }

    fn nk(q: &Quiver, w: &[&str]) -> NecklaceSum {
        Necklace::from_names(q, w).unwrap().into()
    }

    #[test]
    fn classical_examples() {
        let c = ctx(2);
        let q = c.quiver().clone();
        let s = c.space();
        let a = q.arrow_by_name("a").unwrap();
        let b = q.arrow_by_name("a*").unwrap();
        let tr_a = c.classical_trace(&nk(&q, &["a"])).unwrap();
        assert_eq!(tr_a, PolySum::var(s.var(a, 0, 0).unwrap()).add(&PolySum::var(s.var(a, 1, 1).unwrap())));
        let e = NecklaceSum::from(Necklace::idempotent(VertexId(0)));
        assert_eq!(c.classical_trace(&e).unwrap(), PolySum::constant(rat(2)));
        let mut expect = PolySum::zero();
        for i in 0..2 {
            for j in 0..2 {
                expect = expect.add(&PolySum::var(s.var(a, i, j).unwrap()).mul(&PolySum::var(s.var(b, j, i).unwrap())));
            }
        }
        assert_eq!(c.classical_trace(&nk(&q, &["a", "a*"])).unwrap(), expect);
    }

    #[test]
    fn euler_operator_and_defect() {
        for n in 1..=3u32 {
            let c = ctx(n);
            let q = c.quiver().clone();
            let a = q.arrow_by_name("a").unwrap();
            let s = q.arrow_by_name("a*").unwrap();
            let std_m = HeightMonomial::new(&q, vec![vec![(a, 1), (s, 2)]], vec![]).unwrap();
            let swapped = HeightMonomial::new(&q, vec![vec![(s, 1), (a, 2)]], vec![]).unwrap();
            let euler = c.quantum_trace_monomial(&std_m);
            let mut expect = WeylSum::zero();
            for i in 0..n as usize {
                for j in 0..n as usize {
                    let v = c.space().var(a, i, j).unwrap();
                    expect = expect.add(&WeylSum::x(v).mul_d(v));
                }
            }
            assert_eq!(euler, expect);
            let defect = c.quantum_trace_monomial(&swapped).sub(&euler);
            assert_eq!(defect, WeylSum::scalar(HPoly::monomial(rat((n * n) as i64), 1)));
            let e = HeightMonomial::new(&q, vec![], vec![VertexId(0)]).unwrap();
            assert_eq!(c.quantum_trace_monomial(&e), WeylSum::scalar(HPoly::from_int(n as i64)));
        }
    }

    #[test]
    fn commutator_of_generators() {
        for n in 1..=3u32 {
            let c = ctx(n);
            let alg = Schedler::new(c.quiver(), SkeinConvention::default()).unwrap();
            let q = c.quiver().clone();
            let x = alg.lift(&nk(&q, &["a"]));
            let y = alg.lift(&nk(&q, &["a*"]));
            let t = c.quantum_trace(&alg.commutator(&x, &y)).unwrap();
            assert_eq!(t, WeylSum::scalar(HPoly::monomial(rat(-(n as i64)), 1)));
        }
    }

    #[test]
    fn phi_of_lift_is_classical_trace() {
        let c = ctx(2);
        let q = c.quiver().clone();
        let alg = Schedler::new(&q, SkeinConvention::default()).unwrap();
        for n in crate::necklace::necklaces_up_to(&q, 4) {
            let x: NecklaceSum = n.into();
            let lhs = c.phi(&c.quantum_trace(&alg.lift(&x)).unwrap());
            assert_eq!(lhs, c.classical_trace(&x).unwrap());
        }
    }

    #[test]
    fn moment_identity() {
        for (q, d) in [(Quiver::jordan(), vec![2]), (Quiver::a2(), vec![1, 1])] {
            let c = TraceContext::new(&q.double().unwrap(), &DimVector(d), TraceOrder::Increasing).unwrap();
            assert!(c.quantum_moment_check().unwrap().iter().all(|(_, ok)| *ok));
        }
        let bare = Quiver::new("pt", &["v"], &[]).unwrap().double().unwrap();
        let c = TraceContext::new(&bare, &DimVector(vec![2]), TraceOrder::Increasing).unwrap();
        assert!(c.quantum_moment_check().unwrap().iter().all(|(_, ok)| *ok));
    }
}
