//! JSON form of a [`Trace`]. Rationals and polynomials are strings in the
//! input grammar so that a trace can be read back exactly.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ReductionKind, ReductionStep, Trace, Verdict};
use crate::automorphism::{ElementaryData, Endo};
use crate::poly::{Polynomial, Rational};
use crate::presentation::Word;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub kind: String,
    pub coefficients: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roles: Option<[usize; 3]>,
    pub path: Vec<ElementaryData>,
    pub reduced: Endo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub input: Endo,
    pub steps: Vec<StepRecord>,
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word: Option<Word>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

fn put_g(map: &mut BTreeMap<String, String>, g: &[Polynomial; 3]) {
    for (k, p) in g.iter().enumerate() {
        map.insert(format!("g{}", k + 1), p.to_string());
    }
}

impl From<&ReductionStep> for StepRecord {
    fn from(s: &ReductionStep) -> Self {
        let mut c = BTreeMap::new();
        let mut put = |k: &str, v: &Rational| {
            c.insert(k.to_string(), v.to_string());
        };
        match &s.kind {
            ReductionKind::Elementary { .. } => {}
            ReductionKind::TypeI { beta, .. } => put("beta", beta),
            ReductionKind::TypeII { alpha, beta, .. } => {
                put("alpha", alpha);
                put("beta", beta);
            }
            ReductionKind::TypeIII { alpha, beta1, beta2, .. } => {
                put("alpha", alpha);
                put("beta1", beta1);
                put("beta2", beta2);
            }
            ReductionKind::TypeIV { alpha1, alpha2, beta1, beta2, beta3, beta4, gamma, mu, .. } => {
                for (k, v) in [
                    ("alpha1", alpha1),
                    ("alpha2", alpha2),
                    ("beta1", beta1),
                    ("beta2", beta2),
                    ("beta3", beta3),
                    ("beta4", beta4),
                    ("gamma", gamma),
                    ("mu", mu),
                ] {
                    put(k, v);
                }
            }
        }
        match &s.kind {
            ReductionKind::Elementary { index, witness } => {
                c.insert("index".into(), (index + 1).to_string());
                c.insert("witness".into(), witness.to_string());
            }
            ReductionKind::TypeI { g, .. }
            | ReductionKind::TypeII { g, .. }
            | ReductionKind::TypeIII { g, .. }
            | ReductionKind::TypeIV { g, .. } => put_g(&mut c, g),
        }
        StepRecord {
            kind: s.kind.name().to_string(),
            coefficients: c,
            roles: s.roles,
            path: s.path.clone(),
            reduced: s.reduced.clone(),
        }
    }
}

impl TryFrom<StepRecord> for ReductionStep {
    type Error = String;

    fn try_from(r: StepRecord) -> Result<Self, String> {
        let c = &r.coefficients;
        let get = |k: &str| c.get(k).ok_or_else(|| format!("missing coefficient {k}"));
        let q = |k: &str| -> Result<Rational, String> {
            get(k)?.parse::<Rational>().map_err(|e| format!("coefficient {k}: {e}"))
        };
        let p = |k: &str| -> Result<Polynomial, String> {
            Polynomial::parse(get(k)?, 3).map_err(|e| format!("coefficient {k}: {e}"))
        };
        let g = || -> Result<[Polynomial; 3], String> { Ok([p("g1")?, p("g2")?, p("g3")?]) };
        let kind = match r.kind.as_str() {
            "elementary" => {
                let index: usize = get("index")?.parse().map_err(|_| "bad index".to_string())?;
                if index == 0 || index > 3 {
                    return Err(format!("index {index} out of range"));
                }
                ReductionKind::Elementary { index: index - 1, witness: p("witness")? }
            }
            "I" => ReductionKind::TypeI { beta: q("beta")?, g: g()? },
            "II" => ReductionKind::TypeII { alpha: q("alpha")?, beta: q("beta")?, g: g()? },
            "III" => ReductionKind::TypeIII { alpha: q("alpha")?, beta1: q("beta1")?, beta2: q("beta2")?, g: g()? },
            "IV" => ReductionKind::TypeIV {
                alpha1: q("alpha1")?,
                alpha2: q("alpha2")?,
                beta1: q("beta1")?,
                beta2: q("beta2")?,
                beta3: q("beta3")?,
                beta4: q("beta4")?,
                gamma: q("gamma")?,
                mu: q("mu")?,
                g: g()?,
            },
            other => return Err(format!("unknown step kind {other:?}")),
        };
        Ok(ReductionStep { kind, roles: r.roles, reduced: r.reduced, path: r.path })
    }
}

impl From<&Trace> for TraceRecord {
    fn from(t: &Trace) -> Self {
        let reason = match &t.verdict {
            Verdict::Inconclusive(r) => Some(r.clone()),
            _ => None,
        };
        TraceRecord {
            input: t.input.clone(),
            steps: t.steps.iter().map(StepRecord::from).collect(),
            verdict: t.verdict.label().to_string(),
            reason,
            word: t.word.clone(),
            notes: t.notes.clone(),
        }
    }
}

impl TryFrom<TraceRecord> for Trace {
    type Error = String;

    fn try_from(r: TraceRecord) -> Result<Self, String> {
        let verdict = match r.verdict.as_str() {
            "TAME" => Verdict::Tame,
            "WILD" => Verdict::Wild,
            "INCONCLUSIVE" => Verdict::Inconclusive(r.reason.unwrap_or_default()),
            other => return Err(format!("unknown verdict {other:?}")),
        };
        let steps = r.steps.into_iter().map(ReductionStep::try_from).collect::<Result<_, _>>()?;
        Ok(Trace { input: r.input, steps, verdict, word: r.word, notes: r.notes })
    }
}

impl Serialize for Trace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        TraceRecord::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Trace {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rec = TraceRecord::deserialize(d)?;
        Trace::try_from(rec).map_err(serde::de::Error::custom)
    }
}
