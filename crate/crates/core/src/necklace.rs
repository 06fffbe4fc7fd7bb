//! Cyclic words, the necklace bracket, the moment element `w - lambda`
//! and degree-truncated preprojective ideals.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::hpoly::fmt_rational;
use crate::linalg::{Echelon, Reduction, SparseVec};
use crate::quiver::{ArrowId, Quiver, VertexId};
use crate::{rat, Rational};

/// A cyclic word in its canonical rotation, or a vertex idempotent when the
/// word is empty. `vertex` is the base vertex of the stored rotation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Necklace {
    word: Vec<ArrowId>,
    vertex: VertexId,
}

impl Ord for Necklace {
    /// Shorter words first, then lexicographic by arrow, then by vertex.
    fn cmp(&self, other: &Self) -> Ordering {
        self.word
            .len()
            .cmp(&other.word.len())
            .then_with(|| self.word.cmp(&other.word))
            .then_with(|| self.vertex.cmp(&other.vertex))
    }
}

impl PartialOrd for Necklace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Offset of the lexicographically least rotation, first one on ties.
pub fn min_rotation(word: &[ArrowId]) -> usize {
    let n = word.len();
    let mut best = 0;
    for r in 1..n {
        let less = (0..n)
            .map(|i| word[(r + i) % n].cmp(&word[(best + i) % n]))
            .find(|o| *o != Ordering::Equal)
            == Some(Ordering::Less);
        if less {
            best = r;
        }
    }
    best
}

pub fn rotate(word: &[ArrowId], r: usize) -> Vec<ArrowId> {
    let mut w = word[r..].to_vec();
    w.extend_from_slice(&word[..r]);
    w
}

impl Necklace {
    /// Validate a closed word and store its canonical rotation.
    pub fn new(q: &Quiver, word: &[ArrowId]) -> Result<Necklace> {
        q.validate_cycle(word)?;
        Ok(Self::normalized(q, word))
    }

    /// Canonicalize a word already known to be a valid cycle.
    pub(crate) fn normalized(q: &Quiver, word: &[ArrowId]) -> Necklace {
        let w = rotate(word, min_rotation(word));
        let vertex = q.target(w[0]);
        Necklace { word: w, vertex }
    }

    pub fn idempotent(v: VertexId) -> Necklace {
        Necklace { word: Vec::new(), vertex: v }
    }

    pub fn from_names(q: &Quiver, names: &[&str]) -> Result<Necklace> {
        let word = names.iter().map(|n| q.arrow_by_name(n)).collect::<Result<Vec<_>>>()?;
        Self::new(q, &word)
    }

    pub fn word(&self) -> &[ArrowId] {
        &self.word
    }

    pub fn vertex(&self) -> VertexId {
        self.vertex
    }

    pub fn degree(&self) -> usize {
        self.word.len()
    }

    pub fn is_idempotent(&self) -> bool {
        self.word.is_empty()
    }

    pub fn display<'a>(&'a self, q: &'a Quiver) -> impl fmt::Display + 'a {
        NecklaceDisplay { n: self, q }
    }
}

struct NecklaceDisplay<'a> {
    n: &'a Necklace,
    q: &'a Quiver,
}

impl fmt::Display for NecklaceDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n.is_idempotent() {
            write!(f, "e({})", self.q.vertex_name(self.n.vertex))
        } else {
            write!(f, "cyc({})", self.q.word_names(&self.n.word).join(","))
        }
    }
}

/// Canonical form of a cyclic word; the class of the empty word is the idempotent at `vertex`.
pub fn normalize(q: &Quiver, word: &[ArrowId], vertex: Option<VertexId>) -> Result<Necklace> {
    if word.is_empty() {
        return vertex.map(Necklace::idempotent).ok_or(Error::EmptyWord);
    }
    Necklace::new(q, word)
}

/// A finite rational combination of necklaces.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct NecklaceSum {
    terms: BTreeMap<Necklace, Rational>,
}

impl From<Necklace> for NecklaceSum {
    fn from(n: Necklace) -> Self {
        let mut s = NecklaceSum::zero();
        s.add_term(n, Rational::one());
        s
    }
}

impl NecklaceSum {
    pub fn zero() -> Self {
        NecklaceSum { terms: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, n: Necklace, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(n.clone()).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&n);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Necklace, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, n: &Necklace) -> Rational {
        self.terms.get(n).cloned().unwrap_or_else(Rational::zero)
    }

    /// Largest term degree; 0 for the zero sum.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Necklace::degree).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = NecklaceSum::zero();
        for (n, x) in &self.terms {
            out.add_term(n.clone(), x * c);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (n, c) in &other.terms {
            out.add_term(n.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn to_sparse(&self) -> SparseVec<Necklace> {
        self.terms.clone()
    }

    pub fn from_sparse(v: SparseVec<Necklace>) -> Self {
        let mut out = NecklaceSum::zero();
        for (n, c) in v {
            out.add_term(n, c);
        }
        out
    }

    /// Check every term is a valid canonical necklace of `q`.
    pub fn check(&self, q: &Quiver) -> Result<()> {
        for n in self.terms.keys() {
            if n.vertex.index() >= q.num_vertices() || n.word.iter().any(|a| a.index() >= q.num_arrows()) {
                return Err(Error::QuiverMismatch);
            }
            if !n.word.is_empty() && (q.validate_cycle(&n.word).is_err() || Necklace::normalized(q, &n.word) != *n) {
                return Err(Error::QuiverMismatch);
            }
        }
        Ok(())
    }

    pub fn display<'a>(&'a self, q: &'a Quiver) -> impl fmt::Display + 'a {
        SumDisplay { s: self, q }
    }
}

struct SumDisplay<'a> {
    s: &'a NecklaceSum,
    q: &'a Quiver,
}

impl fmt::Display for SumDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.s.is_zero() {
            return write!(f, "0");
        }
        for (i, (n, c)) in self.s.terms.iter().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let abs = c.abs();
            if !abs.is_one() {
                write!(f, "{}*", fmt_rational(&abs))?;
            }
            write!(f, "{}", n.display(self.q))?;
        }
        Ok(())
    }
}

/// Contraction coefficient of two letters: `sigma` for `(a, a*)`,
/// `-sigma` for `(a*, a)`, zero otherwise.
pub fn pairing(q: &Quiver, x: ArrowId, y: ArrowId, sigma: i64) -> i64 {
    match q.star(x) {
        Ok(s) if s == y => {
            if q.is_star(x) {
                -sigma
            } else {
                sigma
            }
        }
        _ => 0,
    }
}

/// The rest of a cyclic word after deleting position `i`, read from `i+1`.
pub(crate) fn rest_after<T: Copy>(word: &[T], i: usize) -> Vec<T> {
    let n = word.len();
    (1..n).map(|k| word[(i + k) % n]).collect()
}

/// Bracket of two necklaces with pairing sign `sigma`.
fn bracket_necklaces(q: &Quiver, x: &Necklace, y: &Necklace, sigma: i64, out: &mut NecklaceSum) {
    for (i, &a) in x.word.iter().enumerate() {
        for (j, &b) in y.word.iter().enumerate() {
            let c = pairing(q, a, b, sigma);
            if c == 0 {
                continue;
            }
            let mut w = rest_after(&x.word, i);
            w.extend(rest_after(&y.word, j));
            let n = if w.is_empty() { Necklace::idempotent(q.target(a)) } else { Necklace::normalized(q, &w) };
            out.add_term(n, rat(c));
        }
    }
}

/// The necklace bracket with `{a, a*} = e` and `{a*, a} = -e`.
pub fn necklace_bracket(q: &Quiver, x: &NecklaceSum, y: &NecklaceSum) -> Result<NecklaceSum> {
    bracket_with(q, x, y, 1)
}

/// The necklace bracket with `{a, a*} = sigma` and `{a*, a} = -sigma`.
pub fn bracket_with(q: &Quiver, x: &NecklaceSum, y: &NecklaceSum, sigma: i64) -> Result<NecklaceSum> {
    if !q.is_doubled() {
        return Err(Error::NotDoubled);
    }
    x.check(q)?;
    y.check(q)?;
    let mut out = NecklaceSum::zero();
    for (n, c) in &x.terms {
        for (m, d) in &y.terms {
            let mut part = NecklaceSum::zero();
            bracket_necklaces(q, n, m, sigma, &mut part);
            for (k, e) in part.terms {
                out.add_term(k, e * c * d);
            }
        }
    }
    Ok(out)
}

/// A path (or idempotent) in the path algebra, read as a matrix product.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    pub word: Vec<ArrowId>,
    /// `t(w1)` for a nonempty word; the vertex of an idempotent.
    pub vertex: VertexId,
}

impl Path {
    pub fn source(&self, q: &Quiver) -> VertexId {
        self.word.last().map_or(self.vertex, |a| q.source(*a))
    }

    pub fn target(&self) -> VertexId {
        self.vertex
    }
}

/// A non-cyclified element of the path algebra, such as `w - lambda`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MomentElement {
    pub terms: BTreeMap<Path, Rational>,
}

impl MomentElement {
    /// Right-multiply by `self` after `p`: `(p * self)` cyclified.
    pub fn cyclify_after(&self, q: &Quiver, p: &Path) -> NecklaceSum {
        let mut out = NecklaceSum::zero();
        for (m, c) in &self.terms {
            // p * m is a cycle iff s(p) = t(m) and s(m) = t(p).
            if p.source(q) != m.target() || m.source(q) != p.target() {
                continue;
            }
            let mut w = p.word.clone();
            w.extend_from_slice(&m.word);
            let n = if w.is_empty() { Necklace::idempotent(p.vertex) } else { Necklace::normalized(q, &w) };
            out.add_term(n, c.clone());
        }
        out
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|p| p.word.len()).max().unwrap_or(0)
    }
}

/// `w - lambda` where `w = sum_a (a a* - a* a)` and `lambda = sum lambda_i e_i`.
pub fn moment(q: &Quiver, lambda: Option<&[Rational]>) -> Result<MomentElement> {
    if !q.is_doubled() {
        return Err(Error::NotDoubled);
    }
    let mut terms = BTreeMap::new();
    for a in q.original_arrows() {
        let s = q.star(a)?;
        terms.insert(Path { word: vec![a, s], vertex: q.target(a) }, Rational::one());
        terms.insert(Path { word: vec![s, a], vertex: q.source(a) }, -Rational::one());
    }
    if let Some(l) = lambda {
        if l.len() != q.num_vertices() {
            return Err(Error::DimensionMismatch { expected: q.num_vertices(), found: l.len() });
        }
        for v in q.vertices() {
            if !l[v.index()].is_zero() {
                terms.insert(Path { word: vec![], vertex: v }, -l[v.index()].clone());
            }
        }
    }
    Ok(MomentElement { terms })
}

/// All closed words of length `len`.
pub fn closed_words(q: &Quiver, len: usize) -> Vec<Vec<ArrowId>> {
    fn extend(q: &Quiver, len: usize, cur: &mut Vec<ArrowId>, out: &mut Vec<Vec<ArrowId>>) {
        if cur.len() == len {
            if q.source(*cur.last().expect("nonempty")) == q.target(cur[0]) {
                out.push(cur.clone());
            }
            return;
        }
        for a in q.arrows() {
            if cur.last().is_none_or(|&l| q.source(l) == q.target(a)) {
                cur.push(a);
                extend(q, len, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    if len > 0 {
        extend(q, len, &mut Vec::new(), &mut out);
    }
    out
}

/// Closed paths of length at most `max_len`, idempotents included.
pub fn closed_paths(q: &Quiver, max_len: usize) -> Vec<Path> {
    let mut out: Vec<Path> = q.vertices().map(|v| Path { word: vec![], vertex: v }).collect();
    for len in 1..=max_len {
        for w in closed_words(q, len) {
            let vertex = q.target(w[0]);
            out.push(Path { word: w, vertex });
        }
    }
    out
}

/// Every necklace of degree at most `maxdeg`, idempotents included, in necklace order.
pub fn necklaces_up_to(q: &Quiver, maxdeg: usize) -> Vec<Necklace> {
    let mut set: BTreeSet<Necklace> = q.vertices().map(Necklace::idempotent).collect();
    for len in 1..=maxdeg {
        for w in closed_words(q, len) {
            set.insert(Necklace::normalized(q, &w));
        }
    }
    set.into_iter().collect()
}

/// Spanning set of `(p (w - lambda))` cyclified over closed paths `p` with
/// `deg p + deg w <= maxdeg`, reduced to an independent subset.
pub fn cyclified_ideal_span(q: &Quiver, m: &MomentElement, maxdeg: usize) -> Vec<NecklaceSum> {
    let pmax = maxdeg.saturating_sub(m.degree());
    let mut e = Echelon::new();
    let mut out = Vec::new();
    for p in closed_paths(q, pmax) {
        let g = m.cyclify_after(q, &p);
        if e.insert(g.to_sparse()) {
            out.push(g);
        }
    }
    out
}

/// A truncated classical ideal with a fixed reduction basis.
#[derive(Clone, Debug)]
pub struct ClassicalIdeal {
    generators: Vec<NecklaceSum>,
    echelon: Echelon<Necklace>,
    maxdeg: usize,
}

impl ClassicalIdeal {
    pub fn new(generators: Vec<NecklaceSum>, maxdeg: usize) -> Self {
        let mut echelon = Echelon::new();
        for g in &generators {
            echelon.insert(g.to_sparse());
        }
        ClassicalIdeal { generators, echelon, maxdeg }
    }

    /// The preprojective ideal of `w - lambda` truncated at `maxdeg`.
    pub fn preprojective(q: &Quiver, lambda: Option<&[Rational]>, maxdeg: usize) -> Result<Self> {
        let m = moment(q, lambda)?;
        Ok(Self::new(cyclified_ideal_span(q, &m, maxdeg), maxdeg))
    }

    pub fn generators(&self) -> &[NecklaceSum] {
        &self.generators
    }

    pub fn maxdeg(&self) -> usize {
        self.maxdeg
    }

    pub fn rank(&self) -> usize {
        self.echelon.rank()
    }

    /// Necklaces that occur as pivots; their complement spans the quotient.
    pub fn is_pivot(&self, n: &Necklace) -> bool {
        self.echelon.is_pivot(n)
    }

    pub fn membership(&self, x: &NecklaceSum) -> Reduction<Necklace> {
        self.echelon.reduce(&x.to_sparse())
    }

    /// Canonical coset representative of `x`.
    pub fn reduce(&self, x: &NecklaceSum) -> Result<NecklaceSum> {
        if x.degree() > self.maxdeg {
            return Err(Error::DegreeOverflow { found: x.degree(), max: self.maxdeg });
        }
        Ok(NecklaceSum::from_sparse(self.membership(x).residual))
    }
}

/// Coset representative of `x` modulo the span of `ideal`.
pub fn reduce_classical(x: &NecklaceSum, ideal: &[NecklaceSum], maxdeg: usize) -> Result<NecklaceSum> {
    ClassicalIdeal::new(ideal.to_vec(), maxdeg).reduce(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jordan() -> Quiver {
        Quiver::jordan().double().unwrap()
    }

    fn nk(q: &Quiver, w: &[&str]) -> NecklaceSum {
        NecklaceSum::from(Necklace::from_names(q, w).unwrap())
    }

    #[test]
    fn normalize_examples() {
        let j = jordan();
        assert_eq!(Necklace::from_names(&j, &["a*", "a"]).unwrap(), Necklace::from_names(&j, &["a", "a*"]).unwrap());
        assert_eq!(
            Necklace::from_names(&j, &["a", "a*", "a"]).unwrap(),
            Necklace::from_names(&j, &["a", "a", "a*"]).unwrap()
        );
        let q = Quiver::a2().double().unwrap();
        let x = Necklace::from_names(&q, &["a*", "a"]).unwrap();
        let y = Necklace::from_names(&q, &["a", "a*"]).unwrap();
        assert_eq!(x, y);
        // canonical rotation starts with `a`, whose target is v2
        assert_eq!(q.vertex_name(x.vertex()), "v2");
        assert!(matches!(Necklace::from_names(&q, &["a", "a"]), Err(Error::NonComposable { .. })));
    }

    #[test]
    fn normalize_matches_brute_force_minimum() {
        let j = jordan();
        for len in 1..=5 {
            for w in closed_words(&j, len) {
                let brute = (0..len).map(|r| rotate(&w, r)).min().unwrap();
                assert_eq!(Necklace::normalized(&j, &w).word(), brute.as_slice());
            }
        }
    }

    #[test]
    fn bracket_examples() {
        let j = jordan();
        let br = necklace_bracket(&j, &nk(&j, &["a"]), &nk(&j, &["a*"])).unwrap();
        assert_eq!(br, NecklaceSum::from(Necklace::idempotent(VertexId(0))));
        let e = NecklaceSum::from(Necklace::idempotent(VertexId(0)));
        assert!(necklace_bracket(&j, &e, &nk(&j, &["a", "a*"])).unwrap().is_zero());
        let br = necklace_bracket(&j, &nk(&j, &["a", "a"]), &nk(&j, &["a*", "a*"])).unwrap();
        assert_eq!(br, nk(&j, &["a", "a*"]).scale(&rat(4)));
        let x = nk(&j, &["a", "a", "a*"]);
        assert!(necklace_bracket(&j, &x, &x).unwrap().is_zero());
    }

    #[test]
    fn bracket_rejects_foreign_necklaces() {
        let j = jordan();
        let q = Quiver::a2().double().unwrap();
        let x = nk(&q, &["a", "a*"]);
        assert_eq!(necklace_bracket(&j, &x, &x).unwrap_err(), Error::QuiverMismatch);
    }

    #[test]
    fn moment_examples() {
        let j = jordan();
        let w = moment(&j, None).unwrap();
        assert_eq!(w.terms.len(), 2);
        let w1 = moment(&j, Some(&[rat(1)])).unwrap();
        assert_eq!(w1.terms[&Path { word: vec![], vertex: VertexId(0) }], rat(-1));
        assert!(moment(&j, Some(&[rat(1), rat(2)])).is_err());
        let q = Quiver::a2().double().unwrap();
        let w = moment(&q, None).unwrap();
        let bases: Vec<&str> = w.terms.keys().map(|p| q.vertex_name(p.vertex)).collect();
        assert_eq!(w.terms.len(), 2);
        assert!(bases.contains(&"v1") && bases.contains(&"v2"));
    }

    #[test]
    fn jordan_ideal_spans() {
        let j = jordan();
        let w = moment(&j, None).unwrap();
        assert!(cyclified_ideal_span(&j, &w, 2).is_empty());
        assert!(cyclified_ideal_span(&j, &w, 3).is_empty());
        let span = cyclified_ideal_span(&j, &w, 4);
        assert_eq!(span.len(), 1);
        let target = nk(&j, &["a", "a*", "a", "a*"]).sub(&nk(&j, &["a", "a", "a*", "a*"]));
        let ideal = ClassicalIdeal::new(span.clone(), 4);
        assert!(ideal.membership(&target).is_member());
        assert_eq!(
            ideal.reduce(&nk(&j, &["a", "a*", "a", "a*"])).unwrap(),
            ideal.reduce(&nk(&j, &["a", "a", "a*", "a*"])).unwrap()
        );
        assert!(ideal.reduce(&target).unwrap().is_zero());
        assert_eq!(ideal.reduce(&nk(&j, &["a"])).unwrap(), nk(&j, &["a"]));
        assert!(matches!(ideal.reduce(&nk(&j, &["a"; 5])), Err(Error::DegreeOverflow { found: 5, max: 4 })));
    }

    #[test]
    fn deformed_span_at_degree_two() {
        let j = jordan();
        let w = moment(&j, Some(&[rat(1)])).unwrap();
        let span = cyclified_ideal_span(&j, &w, 2);
        assert_eq!(span, vec![NecklaceSum::from(Necklace::idempotent(VertexId(0))).scale(&rat(-1))]);
    }

    #[test]
    fn display() {
        let j = jordan();
        let s = nk(&j, &["a", "a*"]).scale(&rat(2)).sub(&nk(&j, &["a"]));
        assert_eq!(s.display(&j).to_string(), "-cyc(a) + 2*cyc(a,a*)");
        assert_eq!(NecklaceSum::zero().display(&j).to_string(), "0");
    }

    fn sum_from(q: &Quiver, picks: &[(usize, i64)]) -> NecklaceSum {
        let pool = necklaces_up_to(q, 3);
        let mut s = NecklaceSum::zero();
        for &(i, c) in picks {
            s.add_term(pool[i % pool.len()].clone(), rat(c));
        }
        s
    }

    fn quiver_for(a2: bool) -> Quiver {
        if a2 { Quiver::a2().double().unwrap() } else { jordan() }
    }

    proptest::proptest! {
        #[test]
        fn bracket_is_antisymmetric(a2: bool, sigma in proptest::sample::select(vec![-1i64, 1]),
                                    x in proptest::collection::vec((0usize..64, -3i64..4), 1..4),
                                    y in proptest::collection::vec((0usize..64, -3i64..4), 1..4)) {
            let q = quiver_for(a2);
            let (x, y) = (sum_from(&q, &x), sum_from(&q, &y));
            let xy = bracket_with(&q, &x, &y, sigma).unwrap();
            proptest::prop_assert!(xy.add(&bracket_with(&q, &y, &x, sigma).unwrap()).is_zero());
        }

        #[test]
        fn bracket_satisfies_jacobi(a2: bool,
                                    x in proptest::collection::vec((0usize..64, -3i64..4), 1..3),
                                    y in proptest::collection::vec((0usize..64, -3i64..4), 1..3),
                                    z in proptest::collection::vec((0usize..64, -3i64..4), 1..3)) {
            let q = quiver_for(a2);
            let (x, y, z) = (sum_from(&q, &x), sum_from(&q, &y), sum_from(&q, &z));
            let br = |a: &NecklaceSum, b: &NecklaceSum| necklace_bracket(&q, a, b).unwrap();
            let cyclic = br(&x, &br(&y, &z)).add(&br(&y, &br(&z, &x))).add(&br(&z, &br(&x, &y)));
            proptest::prop_assert!(cyclic.is_zero());
        }
    }
}
