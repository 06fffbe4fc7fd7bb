//! Selecting the skein convention by direct computation.
//!
//! Each of the eight settings is tested three ways: the quantum trace must
//! annihilate every skein relation up to a letter budget, commutators of
//! lifted necklaces must trace to multiples of `hbar`, and the leading
//! coefficient must recover the Poisson bracket of classical traces.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hpoly::HPoly;
use crate::necklace::{necklaces_up_to, Necklace};
use crate::quiver::{DimVector, Quiver};
use crate::rat;
use crate::schedler::{all_monomials, skein_relation, Schedler, SkeinConvention, TraceOrder};
use crate::trace::TraceContext;

/// Budgets for the three checks.
#[derive(Clone, Copy, Debug)]
pub struct CalibrationOptions {
    /// Largest number of letters in an enumerated skein relation.
    pub max_letters: usize,
    /// Largest necklace degree in the commutator checks.
    pub pair_degree: usize,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        CalibrationOptions { max_letters: 6, pair_degree: 2 }
    }
}

/// Outcome of the three checks for one setting.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConventionOutcome {
    pub convention: SkeinConvention,
    pub skein_annihilated: bool,
    pub hbar_divisible: bool,
    pub recovers_poisson: bool,
    /// First failure found, if any.
    pub witness: Option<String>,
}

impl ConventionOutcome {
    pub fn passed(&self) -> bool {
        self.skein_annihilated && self.hbar_divisible && self.recovers_poisson
    }
}

/// The unique passing setting together with the evidence for all eight.
#[derive(Clone, Debug, Serialize)]
pub struct Calibration {
    pub selected: SkeinConvention,
    pub outcomes: Vec<ConventionOutcome>,
}

/// Run the checks and insist on exactly one passing setting.
pub fn calibrate(q: &Quiver, dim: &DimVector, opts: CalibrationOptions) -> Result<Calibration> {
    let outcomes = evaluate(q, dim, opts)?;
    let passing: Vec<&ConventionOutcome> = outcomes.iter().filter(|o| o.passed()).collect();
    match passing.as_slice() {
        [one] => Ok(Calibration { selected: one.convention, outcomes: outcomes.clone() }),
        [] => Err(Error::Calibration("no setting passes all checks".into())),
        many => {
            let list: Vec<String> = many.iter().map(|o| o.convention.to_string()).collect();
            Err(Error::Calibration(format!("{} settings pass: {}", many.len(), list.join("; "))))
        }
    }
}

/// Evidence for every setting, without the uniqueness requirement.
pub fn evaluate(q: &Quiver, dim: &DimVector, opts: CalibrationOptions) -> Result<Vec<ConventionOutcome>> {
    let mut outcomes = Vec::new();
    for order in [TraceOrder::Increasing, TraceOrder::Decreasing] {
        let ctx = TraceContext::new(q, dim, order)?;
        let skein = skein_failures(q, &ctx, opts.max_letters);
        for conv in SkeinConvention::all().into_iter().filter(|c| c.order == order) {
            let mut out = ConventionOutcome {
                convention: conv,
                skein_annihilated: true,
                hbar_divisible: true,
                recovers_poisson: true,
                witness: None,
            };
            if let Some(w) = &skein[&(conv.inter_hbar, conv.sign)] {
                out.skein_annihilated = false;
                out.witness = Some(w.clone());
            }
            commutator_checks(q, &ctx, conv, opts.pair_degree, &mut out)?;
            outcomes.push(out);
        }
    }
    outcomes.sort_by_key(|o| o.convention);
    Ok(outcomes)
}

/// For each `(inter_hbar, sign)` under the order of `ctx`, the first skein
/// relation the quantum trace fails to annihilate.
fn skein_failures(q: &Quiver, ctx: &TraceContext, max_letters: usize) -> BTreeMap<(u8, i8), Option<String>> {
    let combos = [(0u8, 1i8), (0, -1), (1, 1), (1, -1)];
    let mut found: BTreeMap<(u8, i8), Option<String>> = combos.iter().map(|c| (*c, None)).collect();
    for n in 2..=max_letters {
        let monos = all_monomials(q, n);
        ctx.precompute(&monos);
        for chunk in monos.chunks(4096) {
            let alive: Vec<(u8, i8)> = combos.iter().copied().filter(|c| found[c].is_none()).collect();
            if alive.is_empty() {
                return found;
            }
            let fails: Vec<Vec<((u8, i8), String)>> = chunk
                .par_iter()
                .map(|m| {
                    let mut local = Vec::new();
                    let mut dead: Vec<(u8, i8)> = Vec::new();
                    for h in 1..n as u32 {
                        let rel = skein_relation(q, m, h);
                        let diff = ctx.quantum_trace_monomial(&rel.original).sub(&ctx.quantum_trace_monomial(&rel.swapped));
                        let inner = rel.contraction.as_ref().map(|(x, p, intra)| (ctx.quantum_trace_monomial(x), *p, *intra));
                        for &(k, s) in &alive {
                            if dead.contains(&(k, s)) {
                                continue;
                            }
                            let expected = match &inner {
                                None => None,
                                Some((t, p, intra)) => {
                                    let k = if *intra { 1 } else { k as usize };
                                    Some(t.scale(&HPoly::monomial(rat(p * s as i64), k)))
                                }
                            };
                            let ok = match expected {
                                None => diff.is_zero(),
                                Some(e) => diff == e,
                            };
                            if !ok {
                                dead.push((k, s));
                                local.push(((k, s), format!("skein relation of {} at heights {h},{} survives the trace", m.display(q), h + 1)));
                            }
                        }
                    }
                    local
                })
                .collect();
            for per_mono in fails {
                for (c, w) in per_mono {
                    found.entry(c).and_modify(|e| {
                        if e.is_none() {
                            *e = Some(w);
                        }
                    });
                }
            }
        }
    }
    found
}

/// Checks on `Tr^q(x * y - y * x)` for necklaces of degree at most `deg`.
fn commutator_checks(q: &Quiver, ctx: &TraceContext, conv: SkeinConvention, deg: usize, out: &mut ConventionOutcome) -> Result<()> {
    let alg = Schedler::new(q, conv)?;
    let necks: Vec<Necklace> = necklaces_up_to(q, deg);
    for (i, x) in necks.iter().enumerate() {
        for y in &necks[i + 1..] {
            let (xs, ys) = (x.clone().into(), y.clone().into());
            let c = alg.commutator(&alg.lift(&xs), &alg.lift(&ys));
            let t = ctx.quantum_trace(&c)?;
            let Some(lead) = t.div_hbar() else {
                out.hbar_divisible = false;
                out.recovers_poisson = false;
                out.witness.get_or_insert_with(|| format!("trace of [{}, {}] is not divisible by hbar", x.display(q), y.display(q)));
                continue;
            };
            let space = ctx.space();
            let want = space.poisson(&ctx.classical_trace(&xs)?, &ctx.classical_trace(&ys)?);
            if ctx.phi(&lead) != want {
                out.recovers_poisson = false;
                out.witness.get_or_insert_with(|| format!("leading term of [{}, {}] differs from the Poisson bracket", x.display(q), y.display(q)));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a2_alone_does_not_fix_the_order() {
        // with a single coordinate per side the mirrored order also passes
        let q = Quiver::a2().double().unwrap();
        let opts = CalibrationOptions { max_letters: 4, pair_degree: 2 };
        let outcomes = evaluate(&q, &DimVector(vec![1, 1]), opts).unwrap();
        let passing: Vec<SkeinConvention> = outcomes.iter().filter(|o| o.passed()).map(|o| o.convention).collect();
        let mirror = SkeinConvention { sign: 1, order: TraceOrder::Decreasing, ..SkeinConvention::default() };
        assert_eq!(passing, vec![SkeinConvention::default(), mirror]);
        assert!(outcomes.iter().filter(|o| !o.passed()).all(|o| o.witness.is_some()));
        assert!(matches!(calibrate(&q, &DimVector(vec![1, 1]), opts), Err(Error::Calibration(_))));
    }
}
