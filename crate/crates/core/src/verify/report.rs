//! The verification report: deterministic JSON plus a human summary.

use std::fmt::Write as _;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::quiver::{DimVector, Quiver};
use crate::schedler::SkeinConvention;

use super::faces::{FaceRecord, Verifier, VerifyConfig};

pub const SCHEMA_VERSION: u32 = 1;

/// Outcome of a full run. Wall-clock times are kept out of the JSON so
/// that equal inputs give byte-identical files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub quiver: String,
    pub dim: Vec<u32>,
    pub maxdeg: usize,
    pub seed: u64,
    pub convention: SkeinConvention,
    pub faces: Vec<FaceRecord>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.faces.iter().all(|f| f.passed)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data");
        s.push('\n');
        s
    }

    /// One line per face; times are shown when given.
    pub fn summary(&self, times: Option<&[Duration]>) -> String {
        let mut out = String::new();
        let dims: Vec<String> = self.dim.iter().map(u32::to_string).collect();
        writeln!(out, "quiver {} dim ({}) maxdeg {} seed {}", self.quiver, dims.join(","), self.maxdeg, self.seed).unwrap();
        writeln!(out, "convention {}", self.convention).unwrap();
        for (i, f) in self.faces.iter().enumerate() {
            let verdict = if f.passed { "pass" } else { "FAIL" };
            let tag = if f.surrogate { " (surrogate)" } else { "" };
            write!(out, "{:<7}{verdict}  cases={}{tag}", f.id.id(), f.cases).unwrap();
            if let Some(t) = times.and_then(|t| t.get(i)) {
                write!(out, "  {:.1} ms", t.as_secs_f64() * 1e3).unwrap();
            }
            out.push('\n');
            if let Some(w) = &f.witness {
                writeln!(out, "       witness: {w}").unwrap();
            }
        }
        out
    }
}

/// Run every face and assemble the report.
pub fn verify(q: &Quiver, dim: &DimVector, cfg: VerifyConfig) -> Result<(VerificationReport, Vec<Duration>)> {
    let v = Verifier::new(q, dim, cfg)?;
    let (faces, times): (Vec<FaceRecord>, Vec<Duration>) = v.run_all()?.into_iter().unzip();
    let report = VerificationReport {
        schema_version: SCHEMA_VERSION,
        quiver: q.name().to_string(),
        dim: dim.0.clone(),
        maxdeg: cfg.maxdeg,
        seed: cfg.seed,
        convention: cfg.convention,
        faces,
    };
    Ok((report, times))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_is_stable_and_parses_back() {
        let q = Quiver::a2().double().unwrap();
        let cfg = VerifyConfig { maxdeg: 3, pair_degree: 2, seed: 7, ..VerifyConfig::default() };
        let (r1, _) = verify(&q, &DimVector(vec![1, 1]), cfg).unwrap();
        let (r2, _) = verify(&q, &DimVector(vec![1, 1]), cfg).unwrap();
        assert_eq!(r1.to_json(), r2.to_json());
        let back: VerificationReport = serde_json::from_str(&r1.to_json()).unwrap();
        assert_eq!(back, r1);
        let json = r1.to_json();
        let head: Vec<&str> = json.lines().skip(1).take(3).map(str::trim).collect();
        assert_eq!(head, ["\"schema_version\": 1,", "\"quiver\": \"a2\",", "\"dim\": ["]);
        assert!(r1.summary(None).contains("RIGHT  pass"));
    }
}
