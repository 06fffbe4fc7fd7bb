//! Quivers, their doubles, dimension vectors, and cycle validation.
//!
//! Paths are written as words `w1 w2 ... wk` composed like matrices: the
//! word is composable when `s(w_i) = t(w_{i+1})`, so `w_k` is traversed
//! first. A representation assigns to each arrow `a` a
//! `d_{t(a)} x d_{s(a)}` matrix and the word to the matrix product
//! `[w1][w2]...[wk]`. A closed word is based at `t(w1) = s(wk)`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u16);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArrowId(pub u16);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl ArrowId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub source: VertexId,
    pub target: VertexId,
    /// The partner under `a <-> a*`; only set on doubled quivers.
    pub star: Option<ArrowId>,
    pub is_star: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quiver {
    name: String,
    vertices: Vec<String>,
    /// Arrows of the undoubled quiver in declaration order.
    base: Vec<(String, VertexId, VertexId)>,
    /// Arrows of this quiver. On a doubled quiver they are sorted by name,
    /// so `ArrowId` order is the fixed total order on letters.
    arrows: Vec<Arrow>,
    doubled: bool,
}

impl Quiver {
    /// Build an undoubled quiver from vertex names and `(name, source, target)` arrows.
    pub fn new(name: &str, vertices: &[&str], arrows: &[(&str, &str, &str)]) -> Result<Quiver> {
        let mut vs: Vec<String> = Vec::new();
        for v in vertices {
            if vs.iter().any(|x| x == v) {
                return Err(Error::DuplicateVertex(v.to_string()));
            }
            vs.push(v.to_string());
        }
        let lookup = |n: &str| {
            vs.iter()
                .position(|x| x == n)
                .map(|i| VertexId(i as u16))
                .ok_or_else(|| Error::UnknownVertex(n.to_string()))
        };
        let mut base = Vec::new();
        for (n, s, t) in arrows {
            if n.is_empty() || n.ends_with('*') || n.contains(|c: char| c.is_whitespace() || ",()[]&+-".contains(c)) {
                return Err(Error::ReservedName(n.to_string()));
            }
            if base.iter().any(|(m, _, _): &(String, _, _)| m == n) {
                return Err(Error::DuplicateArrow(n.to_string()));
            }
            base.push((n.to_string(), lookup(s)?, lookup(t)?));
        }
        let arrows = base
            .iter()
            .map(|(n, s, t)| Arrow { name: n.clone(), source: *s, target: *t, star: None, is_star: false })
            .collect();
        Ok(Quiver { name: name.to_string(), vertices: vs, base, arrows, doubled: false })
    }

    /// The Jordan quiver: one vertex `v` with a loop `a`.
    pub fn jordan() -> Quiver {
        Quiver::new("jordan", &["v"], &[("a", "v", "v")]).expect("valid")
    }

    /// The A2 quiver `v1 --a--> v2`.
    pub fn a2() -> Quiver {
        Quiver::new("a2", &["v1", "v2"], &[("a", "v1", "v2")]).expect("valid")
    }

    pub fn builtin(name: &str) -> Option<Quiver> {
        match name {
            "jordan" => Some(Self::jordan()),
            "a2" => Some(Self::a2()),
            _ => None,
        }
    }

    /// Add an opposite arrow `a*` for every arrow `a`.
    pub fn double(&self) -> Result<Quiver> {
        if self.doubled {
            return Err(Error::AlreadyDoubled);
        }
        let mut named: Vec<(String, VertexId, VertexId, bool)> = Vec::new();
        for (n, s, t) in &self.base {
            named.push((n.clone(), *s, *t, false));
            named.push((format!("{n}*"), *t, *s, true));
        }
        named.sort_by(|a, b| a.0.cmp(&b.0));
        for w in named.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::DuplicateArrow(w[0].0.clone()));
            }
        }
        let pos = |n: &str| named.iter().position(|x| x.0 == n).expect("present") as u16;
        let arrows = named
            .iter()
            .map(|(n, s, t, is_star)| {
                let partner = if *is_star { n.trim_end_matches('*').to_string() } else { format!("{n}*") };
                Arrow { name: n.clone(), source: *s, target: *t, star: Some(ArrowId(pos(&partner))), is_star: *is_star }
            })
            .collect();
        Ok(Quiver { name: self.name.clone(), vertices: self.vertices.clone(), base: self.base.clone(), arrows, doubled: true })
    }

    pub fn is_doubled(&self) -> bool {
        self.doubled
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertices.len() as u16).map(VertexId)
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertices[v.index()]
    }

    pub fn vertex_by_name(&self, n: &str) -> Result<VertexId> {
        self.vertices
            .iter()
            .position(|x| x == n)
            .map(|i| VertexId(i as u16))
            .ok_or_else(|| Error::UnknownVertex(n.to_string()))
    }

    pub fn arrows(&self) -> impl Iterator<Item = ArrowId> {
        (0..self.arrows.len() as u16).map(ArrowId)
    }

    pub fn num_arrows(&self) -> usize {
        self.arrows.len()
    }

    /// Arrows of the original quiver (no starred arrows).
    pub fn original_arrows(&self) -> impl Iterator<Item = ArrowId> + '_ {
        self.arrows().filter(|a| !self.arrow(*a).is_star)
    }

    pub fn arrow(&self, a: ArrowId) -> &Arrow {
        &self.arrows[a.index()]
    }

    pub fn arrow_name(&self, a: ArrowId) -> &str {
        &self.arrows[a.index()].name
    }

    pub fn arrow_by_name(&self, n: &str) -> Result<ArrowId> {
        self.arrows
            .iter()
            .position(|x| x.name == n)
            .map(|i| ArrowId(i as u16))
            .ok_or_else(|| Error::UnknownArrow(n.to_string()))
    }

    pub fn source(&self, a: ArrowId) -> VertexId {
        self.arrows[a.index()].source
    }

    pub fn target(&self, a: ArrowId) -> VertexId {
        self.arrows[a.index()].target
    }

    pub fn is_star(&self, a: ArrowId) -> bool {
        self.arrows[a.index()].is_star
    }

    /// The involution `a <-> a*`.
    pub fn star(&self, a: ArrowId) -> Result<ArrowId> {
        self.arrows[a.index()].star.ok_or(Error::NotDoubled)
    }

    /// The unstarred arrow underlying `a`.
    pub fn base_arrow(&self, a: ArrowId) -> ArrowId {
        if self.is_star(a) {
            self.arrows[a.index()].star.expect("starred arrows only exist on doubles")
        } else {
            a
        }
    }

    /// `1 + sum_a alpha_{s(a)} alpha_{t(a)} - sum_i alpha_i^2` over the undoubled arrows.
    pub fn p_value(&self, alpha: &DimVector) -> Result<i64> {
        alpha.check(self)?;
        let a = |v: VertexId| alpha.0[v.index()] as i64;
        let arrows: i64 = self.base.iter().map(|(_, s, t)| a(*s) * a(*t)).sum();
        let squares: i64 = self.vertices().map(|v| a(v) * a(v)).sum();
        Ok(1 + arrows - squares)
    }

    /// Check that `word` is a nonempty closed composable word and return
    /// its base vertex `t(w1)`.
    pub fn validate_cycle(&self, word: &[ArrowId]) -> Result<VertexId> {
        let first = *word.first().ok_or(Error::EmptyWord)?;
        self.validate_path(word)?;
        let last = *word.last().expect("nonempty");
        if self.source(last) != self.target(first) {
            return Err(Error::NotClosed {
                first: self.arrow_name(first).to_string(),
                last: self.arrow_name(last).to_string(),
            });
        }
        Ok(self.target(first))
    }

    /// Check composability `s(w_i) = t(w_{i+1})` of a nonempty word.
    pub fn validate_path(&self, word: &[ArrowId]) -> Result<()> {
        if word.is_empty() {
            return Err(Error::EmptyWord);
        }
        for (i, w) in word.windows(2).enumerate() {
            if self.source(w[0]) != self.target(w[1]) {
                return Err(Error::NonComposable {
                    pos: i,
                    left: self.arrow_name(w[0]).to_string(),
                    right: self.arrow_name(w[1]).to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn word_names(&self, word: &[ArrowId]) -> Vec<&str> {
        word.iter().map(|a| self.arrow_name(*a)).collect()
    }

    /// Serialize in the quiver definition format (always the undoubled data).
    pub fn to_definition(&self) -> String {
        let mut out = String::new();
        out.push_str("[quiver]\n");
        out.push_str(&format!("name = {}\n\n[vertices]\n", self.name));
        for v in &self.vertices {
            out.push_str(v);
            out.push('\n');
        }
        out.push_str("\n[arrows]\n");
        for (n, s, t) in &self.base {
            out.push_str(&format!("{n} = {} -> {}\n", self.vertices[s.index()], self.vertices[t.index()]));
        }
        out
    }

    /// Parse the quiver definition format. The result is undoubled.
    pub fn from_definition(text: &str) -> Result<Quiver> {
        #[derive(PartialEq)]
        enum Section {
            None,
            Quiver,
            Vertices,
            Arrows,
        }
        let err = |line: usize, column: usize, message: &str| Error::Parse { line, column, message: message.to_string() };
        let mut section = Section::None;
        let mut name: Option<String> = None;
        let mut vertices: Vec<String> = Vec::new();
        let mut arrows: Vec<(String, String, String)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let content = raw.split('#').next().unwrap_or("");
            let indent = content.len() - content.trim_start().len();
            let line = content.trim();
            if line.is_empty() {
                continue;
            }
            let col = indent + 1;
            if line.starts_with('[') {
                section = match line {
                    "[quiver]" => Section::Quiver,
                    "[vertices]" => Section::Vertices,
                    "[arrows]" => Section::Arrows,
                    _ => return Err(err(line_no, col, &format!("unknown section {line}"))),
                };
                continue;
            }
            match section {
                Section::None => return Err(err(line_no, col, "expected a section header")),
                Section::Quiver => {
                    let (k, v) = line.split_once('=').ok_or_else(|| err(line_no, col, "expected `key = value`"))?;
                    match k.trim() {
                        "name" => name = Some(v.trim().to_string()),
                        other => return Err(err(line_no, col, &format!("unknown key `{other}`"))),
                    }
                }
                Section::Vertices => {
                    if line.contains(char::is_whitespace) {
                        return Err(err(line_no, col, "vertex names may not contain whitespace"));
                    }
                    vertices.push(line.to_string());
                }
                Section::Arrows => {
                    let (n, rest) = line.split_once('=').ok_or_else(|| err(line_no, col, "expected `name = source -> target`"))?;
                    let (s, t) = rest.split_once("->").ok_or_else(|| {
                        err(line_no, col + line.find('=').unwrap_or(0) + 1, "expected `source -> target`")
                    })?;
                    arrows.push((n.trim().to_string(), s.trim().to_string(), t.trim().to_string()));
                }
            }
        }
        let name = name.ok_or_else(|| err(1, 1, "missing `name` in [quiver]"))?;
        let vrefs: Vec<&str> = vertices.iter().map(String::as_str).collect();
        let arefs: Vec<(&str, &str, &str)> = arrows.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str())).collect();
        Quiver::new(&name, &vrefs, &arefs)
    }
}

impl FromStr for Quiver {
    type Err = Error;
    fn from_str(s: &str) -> Result<Quiver> {
        Quiver::from_definition(s)
    }
}

/// Per-vertex dimensions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DimVector(pub Vec<u32>);

impl DimVector {
    pub fn new(d: Vec<u32>) -> Self {
        DimVector(d)
    }

    pub fn check(&self, q: &Quiver) -> Result<()> {
        if self.0.len() != q.num_vertices() {
            return Err(Error::DimensionMismatch { expected: q.num_vertices(), found: self.0.len() });
        }
        Ok(())
    }

    pub fn at(&self, v: VertexId) -> usize {
        self.0[v.index()] as usize
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl fmt::Display for DimVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for DimVector {
    type Err = Error;
    /// Accepts `2`, `1,1` or `(1,1)`.
    fn from_str(s: &str) -> Result<DimVector> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let mut out = Vec::new();
        for (i, part) in inner.split(',').enumerate() {
            let n = part.trim().parse::<u32>().map_err(|_| Error::Parse {
                line: 1,
                column: i + 1,
                message: format!("invalid dimension `{}`", part.trim()),
            })?;
            out.push(n);
        }
        Ok(DimVector(out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(q: &Quiver, names: &[&str]) -> Vec<ArrowId> {
        names.iter().map(|n| q.arrow_by_name(n).unwrap()).collect()
    }

    #[test]
    fn doubling_jordan_and_a2() {
        let j = Quiver::jordan().double().unwrap();
        assert_eq!(j.num_arrows(), 2);
        let a = j.arrow_by_name("a").unwrap();
        let s = j.arrow_by_name("a*").unwrap();
        assert_eq!(j.star(a).unwrap(), s);
        assert_eq!(j.star(s).unwrap(), a);
        assert_eq!(j.source(s), j.target(a));

        let q = Quiver::a2().double().unwrap();
        let a = q.arrow_by_name("a").unwrap();
        let s = q.arrow_by_name("a*").unwrap();
        assert_eq!(q.source(s), q.vertex_by_name("v2").unwrap());
        assert_eq!(q.target(s), q.vertex_by_name("v1").unwrap());
        assert_eq!(q.star(q.star(a).unwrap()).unwrap(), a);
    }

    #[test]
    fn doubling_errors() {
        assert_eq!(
            Quiver::new("x", &["v"], &[("a", "v", "v"), ("a", "v", "v")]).unwrap_err(),
            Error::DuplicateArrow("a".into())
        );
        assert_eq!(Quiver::new("x", &["v"], &[("a*", "v", "v")]).unwrap_err(), Error::ReservedName("a*".into()));
        assert_eq!(Quiver::jordan().double().unwrap().double().unwrap_err(), Error::AlreadyDoubled);
    }

    #[test]
    fn p_values() {
        let j = Quiver::jordan();
        for n in 0..5 {
            assert_eq!(j.p_value(&DimVector(vec![n])).unwrap(), 1);
        }
        let a2 = Quiver::a2();
        assert_eq!(a2.p_value(&DimVector(vec![1, 1])).unwrap(), 0);
        assert_eq!(a2.p_value(&DimVector(vec![2, 1])).unwrap(), -2);
        assert!(matches!(a2.p_value(&DimVector(vec![1])), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn cycles() {
        let j = Quiver::jordan().double().unwrap();
        assert_eq!(j.validate_cycle(&word(&j, &["a", "a*"])).unwrap(), VertexId(0));
        let q = Quiver::a2().double().unwrap();
        let v1 = q.vertex_by_name("v1").unwrap();
        let v2 = q.vertex_by_name("v2").unwrap();
        assert_eq!(q.validate_cycle(&word(&q, &["a", "a*"])).unwrap(), v2);
        assert_eq!(q.validate_cycle(&word(&q, &["a*", "a"])).unwrap(), v1);
        assert!(matches!(q.validate_cycle(&word(&q, &["a", "a"])), Err(Error::NonComposable { .. })));
        assert!(matches!(q.validate_cycle(&word(&q, &["a"])), Err(Error::NotClosed { .. })));
    }

    #[test]
    fn definition_round_trip() {
        let text = "# two vertices\n[quiver]\nname = a2\n\n[vertices]\nv1\nv2\n\n[arrows]\na = v1 -> v2\n";
        let q = Quiver::from_definition(text).unwrap();
        assert_eq!(q, Quiver::a2());
        let again = Quiver::from_definition(&q.to_definition()).unwrap();
        assert_eq!(again, q);
        let bad = Quiver::from_definition("[quiver]\nname = x\n[arrows]\na = v -> w\n");
        assert_eq!(bad.unwrap_err(), Error::UnknownVertex("v".into()));
        let bad = Quiver::from_definition("[quiver]\nname = x\n  nonsense\n");
        assert!(matches!(bad, Err(Error::Parse { line: 3, column: 3, .. })));
    }
}
