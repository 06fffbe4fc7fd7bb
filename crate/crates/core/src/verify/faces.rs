//! The six faces of the compatibility cube, each checked at a degree bound.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num::Zero;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Echelon, SparseVec};
use crate::necklace::{bracket_with, necklaces_up_to, ClassicalIdeal, Necklace, NecklaceSum};
use crate::quiver::{DimVector, Quiver};
use crate::schedler::{HeightSum, QuantumIdeal, Schedler, SkeinConvention};
use crate::trace::TraceContext;
use crate::weyl::{Character, ComomentIdeal, PolySum, QuantumReductionIdeal, WeylSum};
use crate::Rational;

use super::membership::check_reduction;

/// Largest supported degree bound.
pub const MAX_DEGREE: usize = 8;
/// Largest number of Weyl monomials a truncated ideal may range over.
pub const MAX_WEYL_MONOMIALS: u64 = 50_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Face {
    Top,
    Bottom,
    Back,
    Front,
    Left,
    Right,
}

impl Face {
    pub const ALL: [Face; 6] = [Face::Top, Face::Bottom, Face::Back, Face::Front, Face::Left, Face::Right];

    pub fn id(self) -> &'static str {
        match self {
            Face::Top => "TOP",
            Face::Bottom => "BOTTOM",
            Face::Back => "BACK",
            Face::Front => "FRONT",
            Face::Left => "LEFT",
            Face::Right => "RIGHT",
        }
    }

    pub fn statement(self) -> &'static str {
        match self {
            Face::Top => "quantum trace sends the quantum reduction ideal into the Weyl reduction ideal and commutes with coset projection",
            Face::Bottom => "classical trace sends the cyclified preprojective ideal into the comoment ideal",
            Face::Back => "the leading term of the traced commutator of lifts is the Poisson bracket of traces",
            Face::Front => "the same identity holds after reduction modulo both ideals",
            Face::Left => "PBW monomials in necklaces outside the classical ideal stay independent and span modulo the quantum ideal and hbar",
            Face::Right => "symbols of the quantum reduction generators are the classical comoments and chi0 is nonzero on the kernel of tau",
        }
    }

    /// Whether the face checks a substitute statement.
    pub fn surrogate(self) -> bool {
        self == Face::Right
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Face {
    type Err = Error;
    fn from_str(s: &str) -> Result<Face> {
        Face::ALL
            .into_iter()
            .find(|f| f.id().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse { line: 1, column: 1, message: format!("unknown face `{s}`") })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceRecord {
    pub id: Face,
    pub statement: String,
    pub surrogate: bool,
    pub cases: usize,
    pub passed: bool,
    pub witness: Option<String>,
}

/// Accumulates cases and keeps the first failure.
struct Tally {
    face: Face,
    cases: usize,
    witness: Option<String>,
}

impl Tally {
    fn new(face: Face) -> Self {
        Tally { face, cases: 0, witness: None }
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.witness.is_none() {
            self.witness = Some(witness());
        }
    }

    fn finish(self) -> FaceRecord {
        FaceRecord {
            id: self.face,
            statement: self.face.statement().to_string(),
            surrogate: self.face.surrogate(),
            cases: self.cases,
            passed: self.witness.is_none(),
            witness: self.witness,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyConfig {
    pub maxdeg: usize,
    pub seed: u64,
    pub convention: SkeinConvention,
    /// Largest necklace degree in the commutator identities.
    pub pair_degree: usize,
    /// Number of sampled PBW monomials for the coset identity.
    pub samples: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { maxdeg: 4, seed: 0, convention: SkeinConvention::default(), pair_degree: 3, samples: 8 }
    }
}

/// Shared state for the face checks; ideals are built on first use.
pub struct Verifier {
    quiver: Quiver,
    cfg: VerifyConfig,
    alg: Schedler,
    ctx: TraceContext,
    classical: OnceLock<ClassicalIdeal>,
    quantum: OnceLock<QuantumIdeal>,
    weyl: OnceLock<QuantumReductionIdeal>,
    comoment: OnceLock<ComomentIdeal>,
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

impl Verifier {
    pub fn new(q: &Quiver, dim: &DimVector, cfg: VerifyConfig) -> Result<Verifier> {
        let ctx = TraceContext::new(q, dim, cfg.convention.order)?;
        if cfg.maxdeg > MAX_DEGREE {
            return Err(Error::ResourceLimit(format!("maxdeg {} exceeds {MAX_DEGREE}", cfg.maxdeg)));
        }
        let gens = ctx.space().num_vars() as u64;
        let count = binomial(gens + cfg.maxdeg as u64, cfg.maxdeg as u64);
        if count > MAX_WEYL_MONOMIALS {
            return Err(Error::ResourceLimit(format!("{count} Weyl monomials up to degree {} exceed {MAX_WEYL_MONOMIALS}", cfg.maxdeg)));
        }
        Ok(Verifier {
            quiver: q.clone(),
            cfg,
            alg: Schedler::new(q, cfg.convention)?,
            ctx,
            classical: OnceLock::new(),
            quantum: OnceLock::new(),
            weyl: OnceLock::new(),
            comoment: OnceLock::new(),
        })
    }

    pub fn config(&self) -> &VerifyConfig {
        &self.cfg
    }

    pub fn trace_context(&self) -> &TraceContext {
        &self.ctx
    }

    pub fn classical_ideal(&self) -> &ClassicalIdeal {
        self.classical
            .get_or_init(|| ClassicalIdeal::preprojective(&self.quiver, None, self.cfg.maxdeg).expect("doubled quiver"))
    }

    pub fn quantum_ideal(&self) -> &QuantumIdeal {
        self.quantum.get_or_init(|| QuantumIdeal::new(&self.alg, self.classical_ideal(), self.cfg.maxdeg, 0))
    }

    pub fn weyl_ideal(&self) -> &QuantumReductionIdeal {
        self.weyl.get_or_init(|| {
            let space = self.ctx.space();
            QuantumReductionIdeal::new(space, &space.chi0(), self.cfg.maxdeg as u32).expect("valid basis")
        })
    }

    pub fn comoment_ideal(&self) -> &ComomentIdeal {
        self.comoment.get_or_init(|| ComomentIdeal::new(self.ctx.space(), self.cfg.maxdeg as u32).expect("valid basis"))
    }

    pub fn run(&self, face: Face) -> Result<FaceRecord> {
        match face {
            Face::Top => self.top(None),
            Face::Bottom => self.bottom(),
            Face::Back => self.back(),
            Face::Front => self.front(),
            Face::Left => self.left(),
            Face::Right => self.right(),
        }
    }

    /// Every face in order, with wall-clock time per face.
    pub fn run_all(&self) -> Result<Vec<(FaceRecord, Duration)>> {
        Face::ALL
            .into_iter()
            .map(|f| {
                let start = Instant::now();
                let r = self.run(f)?;
                Ok((r, start.elapsed()))
            })
            .collect()
    }

    /// The TOP face against the reduction ideal of an arbitrary character.
    pub fn top_with_character(&self, chi: &Character) -> Result<FaceRecord> {
        self.top(Some(chi))
    }

    fn top(&self, chi: Option<&Character>) -> Result<FaceRecord> {
        let space = self.ctx.space();
        let custom;
        let ideal = match chi {
            None => self.weyl_ideal(),
            Some(c) => {
                custom = QuantumReductionIdeal::new(space, c, self.cfg.maxdeg as u32)?;
                &custom
            }
        };
        let spanning: Vec<SparseVec<_>> = ideal.inputs().iter().map(WeylSum::to_sparse).collect();
        let mut tally = Tally::new(Face::Top);
        let traced: Vec<WeylSum> =
            self.quantum_ideal().inputs().par_iter().map(|u| self.ctx.quantum_trace(u)).collect::<Result<_>>()?;
        for (u, t) in self.quantum_ideal().inputs().iter().zip(&traced) {
            let r = ideal.membership(t)?;
            let sound = check_reduction(&spanning, &t.to_sparse(), &r.residual, &r.certificate);
            tally.record(r.is_member() && sound, || {
                let res = WeylSum::from_sparse(&r.residual);
                format!("trace of {} leaves residual {}", u.display(&self.quiver), space.display_weyl(&res))
            });
        }
        let mut basis = self.alg.pbw_basis(self.cfg.maxdeg);
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        basis.shuffle(&mut rng);
        for m in basis.into_iter().take(self.cfg.samples) {
            let x: HeightSum = m.into();
            let rep = self.quantum_ideal().reduce(&x);
            let lhs = ideal.reduce(&self.ctx.quantum_trace(&x)?)?;
            let rhs = ideal.reduce(&self.ctx.quantum_trace(&rep)?)?;
            tally.record(lhs == rhs, || format!("coset identity fails on {}", x.display(&self.quiver)));
        }
        Ok(tally.finish())
    }

    fn bottom(&self) -> Result<FaceRecord> {
        let ideal = self.comoment_ideal();
        let spanning: Vec<SparseVec<_>> = ideal.inputs().iter().map(PolySum::to_sparse).collect();
        let mut tally = Tally::new(Face::Bottom);
        for g in self.classical_ideal().generators() {
            let p = self.ctx.classical_trace(g)?;
            let r = ideal.membership(&p)?;
            let sound = check_reduction(&spanning, &p.to_sparse(), &r.residual, &r.certificate);
            tally.record(r.is_member() && sound, || {
                let res = PolySum::from_sparse(r.residual.clone());
                format!("trace of {} leaves residual {}", g.display(&self.quiver), self.ctx.space().display_poly(&res))
            });
        }
        Ok(tally.finish())
    }

    /// `(1/hbar) Tr^q(x * y - y * x)` at `hbar = 0`, or `None` if not divisible.
    fn traced_bracket(&self, x: &NecklaceSum, y: &NecklaceSum) -> Result<Option<PolySum>> {
        let c = self.alg.commutator(&self.alg.lift(x), &self.alg.lift(y));
        Ok(self.ctx.quantum_trace(&c)?.div_hbar().map(|w| self.ctx.phi(&w)))
    }

    fn poisson_of_traces(&self, x: &NecklaceSum, y: &NecklaceSum) -> Result<PolySum> {
        Ok(self.ctx.space().poisson(&self.ctx.classical_trace(x)?, &self.ctx.classical_trace(y)?))
    }

    fn pairs(&self, deg_sum: usize) -> Vec<(Necklace, Necklace)> {
        let necks = necklaces_up_to(&self.quiver, self.cfg.pair_degree);
        let mut out = Vec::new();
        for (i, x) in necks.iter().enumerate() {
            for y in &necks[i + 1..] {
                if x.degree() + y.degree() <= deg_sum {
                    out.push((x.clone(), y.clone()));
                }
            }
        }
        out
    }

    fn back(&self) -> Result<FaceRecord> {
        let q = &self.quiver;
        let sign = self.cfg.convention.sign as i64;
        let pairs = self.pairs(usize::MAX);
        let outcomes: Vec<(bool, bool)> = pairs
            .par_iter()
            .map(|(x, y)| {
                let (xs, ys): (NecklaceSum, NecklaceSum) = (x.clone().into(), y.clone().into());
                let want = self.poisson_of_traces(&xs, &ys)?;
                let lead = self.traced_bracket(&xs, &ys)?;
                let classical = self.ctx.classical_trace(&bracket_with(q, &xs, &ys, sign)?)?;
                Ok((lead.as_ref() == Some(&want), classical == want))
            })
            .collect::<Result<_>>()?;
        let mut tally = Tally::new(Face::Back);
        for ((x, y), (quantum_ok, classical_ok)) in pairs.iter().zip(outcomes) {
            tally.record(quantum_ok, || format!("quantized bracket of {} and {} disagrees with the Poisson bracket", x.display(q), y.display(q)));
            tally.record(classical_ok, || format!("trace of the bracket of {} and {} disagrees with the Poisson bracket", x.display(q), y.display(q)));
        }
        Ok(tally.finish())
    }

    fn front(&self) -> Result<FaceRecord> {
        let q = &self.quiver;
        let maxdeg = self.cfg.maxdeg;
        let classical = self.classical_ideal();
        let ideal = self.comoment_ideal();
        let in_ideal = |p: &PolySum| -> Result<bool> { Ok(ideal.membership(p)?.is_member()) };
        let mut tally = Tally::new(Face::Front);
        // brackets with ideal elements stay in the ideal
        let necks = necklaces_up_to(q, self.cfg.pair_degree);
        let mut jobs: Vec<(NecklaceSum, Necklace)> = Vec::new();
        for g in classical.generators() {
            for y in &necks {
                if g.degree() + y.degree() <= maxdeg + 2 {
                    jobs.push((g.clone(), y.clone()));
                }
            }
        }
        let results: Vec<Option<PolySum>> =
            jobs.par_iter().map(|(g, y)| self.traced_bracket(g, &y.clone().into())).collect::<Result<_>>()?;
        for ((g, y), lead) in jobs.iter().zip(results) {
            let ok = match &lead {
                Some(p) => in_ideal(p)?,
                None => false,
            };
            tally.record(ok, || format!("bracket of {} with {} leaves the comoment ideal", g.display(q), y.display(q)));
        }
        // reduced representatives give the same bracket modulo the ideal
        let pairs = self.pairs(maxdeg + 2);
        let diffs: Vec<Option<PolySum>> = pairs
            .par_iter()
            .map(|(x, y)| {
                let (xs, ys): (NecklaceSum, NecklaceSum) = (x.clone().into(), y.clone().into());
                let lhs = self.traced_bracket(&classical.reduce(&xs)?, &classical.reduce(&ys)?)?;
                Ok(lhs.map(|l| l.sub(&self.poisson_of_traces(&xs, &ys).expect("valid input"))))
            })
            .collect::<Result<_>>()?;
        for ((x, y), d) in pairs.iter().zip(diffs) {
            let ok = match &d {
                Some(p) => in_ideal(p)?,
                None => false,
            };
            tally.record(ok, || format!("reduced bracket of {} and {} differs modulo the ideal", x.display(q), y.display(q)));
        }
        Ok(tally.finish())
    }

    fn left(&self) -> Result<FaceRecord> {
        let q = &self.quiver;
        let classical = self.classical_ideal();
        let forget = |s: &HeightSum| -> SparseVec<Vec<Necklace>> {
            s.hbar_coeff(0).forget(q).into_iter().map(|(k, c)| (k, c.coeff(0))).filter(|(_, c)| !c.is_zero()).collect()
        };
        let mut span = Echelon::new();
        for u in self.quantum_ideal().inputs() {
            span.insert(forget(u));
        }
        let ideal_rank = span.rank();
        let basis = self.alg.pbw_basis(self.cfg.maxdeg);
        let complement: Vec<_> =
            basis.iter().filter(|m| m.forget(q).iter().all(|n| !classical.is_pivot(n))).cloned().collect();
        let mut tally = Tally::new(Face::Left);
        for m in &complement {
            let fresh = span.insert(forget(&m.clone().into()));
            tally.record(fresh, || format!("{} depends on earlier monomials modulo the ideal", m.display(q)));
        }
        let total = ideal_rank + complement.len();
        tally.record(total == basis.len(), || {
            format!("ideal rank {ideal_rank} plus {} complement monomials differs from {} PBW monomials", complement.len(), basis.len())
        });
        Ok(tally.finish())
    }

    fn right(&self) -> Result<FaceRecord> {
        let space = self.ctx.space();
        let chi0 = space.chi0();
        let basis = space.gl_basis();
        let mut tally = Tally::new(Face::Right);
        for xi in &basis {
            let symbol = self.ctx.phi(&space.reduction_generator(&chi0, xi)?);
            let comoment = space.classical_comoment(xi)?;
            tally.record(symbol == PolySum::zero().sub(&comoment), || {
                format!("symbol at E[{}][{}] of vertex {} is not minus the comoment", xi.p + 1, xi.q + 1, self.quiver.vertex_name(xi.vertex))
            });
        }
        // kernel of tau from dependencies among its values
        let mut images = Echelon::new();
        let mut kernel_values: Vec<Rational> = Vec::new();
        for (i, xi) in basis.iter().enumerate() {
            let v = space.tau(xi)?.to_sparse();
            let r = images.reduce(&v);
            if r.is_member() {
                let mut value = chi0.eval(xi);
                for (j, c) in &r.certificate {
                    value -= c * chi0.eval(&basis[*j]);
                }
                kernel_values.push(value);
            }
            images.insert(v);
            debug_assert_eq!(images.inputs(), i + 1);
        }
        if !kernel_values.is_empty() {
            let ok = kernel_values.iter().any(|v| !v.is_zero());
            tally.record(ok, || "chi0 vanishes on the kernel of tau".to_string());
        }
        Ok(tally.finish())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn face_ids_round_trip() {
        for f in Face::ALL {
            assert_eq!(f.id().parse::<Face>().unwrap(), f);
        }
        assert!("SIDE".parse::<Face>().is_err());
        assert_eq!(serde_json::to_string(&Face::Top).unwrap(), "\"TOP\"");
    }

    #[test]
    fn resource_limit_is_reported() {
        let q = Quiver::jordan().double().unwrap();
        let cfg = VerifyConfig { maxdeg: 8, ..VerifyConfig::default() };
        assert!(matches!(Verifier::new(&q, &DimVector(vec![3]), cfg), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn a2_faces_at_small_degree() {
        let q = Quiver::a2().double().unwrap();
        let cfg = VerifyConfig { maxdeg: 3, pair_degree: 2, ..VerifyConfig::default() };
        let v = Verifier::new(&q, &DimVector(vec![1, 1]), cfg).unwrap();
        for f in Face::ALL {
            let r = v.run(f).unwrap();
            assert!(r.passed, "{f}: {:?}", r.witness);
            assert!(r.cases > 0, "{f}");
        }
    }
}
