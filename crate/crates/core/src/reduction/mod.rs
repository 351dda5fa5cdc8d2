//! Reduction search: elementary reductions and the four non-elementary
//! reduction types, iterated until the map is affine or no reduction exists.

mod detect;
mod trace;

use num_traits::Zero;
use rayon::prelude::*;
use thiserror::Error;

use crate::automorphism::{ElementaryData, Endo};
use crate::degree::{bracket_degree, make_star_reduced};
use crate::poly::{Degree, Polynomial, Rational};
use crate::presentation::{affine_decompose, evaluate, Word, WordError};
use crate::subalgebra::{reduce_against, SubalgebraError};

pub use trace::{StepRecord, TraceRecord};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    /// Largest degree of a product `f^i g^j` any membership search may form.
    pub budget: u32,
    /// Largest number of unknowns in a parametric system.
    pub detector_budget: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config { budget: 64, detector_budget: 256 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("only maps of Q[x1,x2,x3] are supported, got {0} variables")]
    Dimension(usize),
    #[error("not an automorphism: Jacobian determinant is {0}")]
    JacobianGate(String),
    #[error("assertion violated: {0}")]
    Assertion(String),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// Failure modes of a single search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum DetectError {
    Inconclusive(String),
    Assertion(String),
}

impl From<SubalgebraError> for DetectError {
    fn from(e: SubalgebraError) -> Self {
        match e {
            SubalgebraError::Inconclusive(r) => DetectError::Inconclusive(r),
            other => DetectError::Assertion(other.to_string()),
        }
    }
}

/// What kind of reduction a step performed, with its coefficients.
/// `g` holds the intermediate components in role order.
#[derive(Debug, Clone, PartialEq)]
pub enum ReductionKind {
    /// Component `index` (0-based) lowered by `witness`, a polynomial in the
    /// other two variables evaluated at the map.
    Elementary { index: usize, witness: Polynomial },
    TypeI { beta: Rational, g: [Polynomial; 3] },
    TypeII { alpha: Rational, beta: Rational, g: [Polynomial; 3] },
    TypeIII { alpha: Rational, beta1: Rational, beta2: Rational, g: [Polynomial; 3] },
    TypeIV {
        alpha1: Rational,
        alpha2: Rational,
        beta1: Rational,
        beta2: Rational,
        beta3: Rational,
        beta4: Rational,
        gamma: Rational,
        mu: Rational,
        g: [Polynomial; 3],
    },
}

impl ReductionKind {
    pub fn name(&self) -> &'static str {
        match self {
            ReductionKind::Elementary { .. } => "elementary",
            ReductionKind::TypeI { .. } => "I",
            ReductionKind::TypeII { .. } => "II",
            ReductionKind::TypeIII { .. } => "III",
            ReductionKind::TypeIV { .. } => "IV",
        }
    }
}

/// One reduction `theta = reduced * path`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionStep {
    pub kind: ReductionKind,
    /// `roles[r]` is the component playing `f_{r+1}`.
    pub roles: Option<[usize; 3]>,
    pub reduced: Endo,
    pub path: Vec<ElementaryData>,
}

impl ReductionStep {
    /// `reduced * path == theta` and the degree went down.
    pub fn verify(&self, theta: &Endo) -> bool {
        let back = self.path.iter().fold(self.reduced.clone(), |acc, e| acc.apply_elementary(e));
        let (Ok(before), Ok(after)) = (theta.degree(), self.reduced.degree()) else { return false };
        back == *theta && after < before
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Tame,
    Wild,
    Inconclusive(String),
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Tame => "TAME",
            Verdict::Wild => "WILD",
            Verdict::Inconclusive(_) => "INCONCLUSIVE",
        }
    }
}

/// Full record of a decision run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub input: Endo,
    pub steps: Vec<ReductionStep>,
    pub verdict: Verdict,
    /// For a tame verdict: a word of elementary generators evaluating to the input.
    pub word: Option<Word>,
    /// Coexisting reductions and other diagnostics.
    pub notes: Vec<String>,
}

impl Trace {
    pub fn final_map(&self) -> &Endo {
        self.steps.last().map_or(&self.input, |s| &s.reduced)
    }

    /// Replays every step and, for a tame verdict, the word.
    pub fn verify(&self) -> bool {
        let mut cur = &self.input;
        for s in &self.steps {
            if !s.verify(cur) {
                return false;
            }
            cur = &s.reduced;
        }
        match (&self.verdict, &self.word) {
            (Verdict::Tame, Some(w)) => evaluate(w) == self.input,
            (Verdict::Tame, None) => false,
            _ => true,
        }
    }
}

/// Search for an elementary reduction, trying components from the highest
/// degree down.
pub fn find_elementary(theta: &Endo, cfg: &Config) -> Result<Option<ReductionStep>, SubalgebraError> {
    let n = theta.nvars();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(theta.component_degrees()[i]), i));
    let mut inconclusive = None;
    for i in order {
        let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        let (j, k) = (others[0], others[1]);
        match reduce_against(theta.image(i), theta.image(j), theta.image(k), cfg.budget) {
            Ok(Some((wit, rem))) => {
                let witness = wit.expression.rename(n, &[j, k]);
                let reduced = theta.with_component(i, rem);
                let path = vec![ElementaryData { index: i + 1, alpha: num_traits::One::one(), f: witness.clone() }];
                return Ok(Some(ReductionStep { kind: ReductionKind::Elementary { index: i, witness }, roles: None, reduced, path }));
            }
            Ok(None) => {}
            Err(SubalgebraError::Inconclusive(r)) => inconclusive = inconclusive.or(Some(r)),
            Err(e) => return Err(e),
        }
    }
    match inconclusive {
        Some(r) => Err(SubalgebraError::Inconclusive(r)),
        None => Ok(None),
    }
}

pub fn find_type_i(theta: &Endo, cfg: &Config) -> Result<Option<ReductionStep>, DetectFailure> {
    detect::find_family(1, theta, cfg).map_err(DetectFailure::from)
}

pub fn find_type_ii(theta: &Endo, cfg: &Config) -> Result<Option<ReductionStep>, DetectFailure> {
    detect::find_family(2, theta, cfg).map_err(DetectFailure::from)
}

pub fn find_type_iii(theta: &Endo, cfg: &Config) -> Result<Option<ReductionStep>, DetectFailure> {
    detect::find_family(3, theta, cfg).map_err(DetectFailure::from)
}

pub fn find_type_iv(theta: &Endo, _cfg: &Config) -> Result<Option<ReductionStep>, DetectFailure> {
    detect::find_type_iv(theta).map_err(DetectFailure::from)
}

/// Public form of a detector failure.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DetectFailure {
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("assertion violated: {0}")]
    Assertion(String),
}

impl From<DetectError> for DetectFailure {
    fn from(e: DetectError) -> Self {
        match e {
            DetectError::Inconclusive(r) => DetectFailure::Inconclusive(r),
            DetectError::Assertion(r) => DetectFailure::Assertion(r),
        }
    }
}

/// Results of all five searches on one map, in the order
/// elementary, I, II, III, IV.
#[derive(Debug, Clone)]
pub struct SearchReport {
    pub results: Vec<Result<Option<ReductionStep>, DetectFailure>>,
}

impl SearchReport {
    pub fn triggered(&self) -> Vec<&'static str> {
        const NAMES: [&str; 5] = ["elementary", "I", "II", "III", "IV"];
        self.results
            .iter()
            .enumerate()
            .filter(|(_, r)| matches!(r, Ok(Some(_))))
            .map(|(k, _)| NAMES[k])
            .collect()
    }
}

/// Runs all five searches (in parallel) on `theta`.
pub fn search_all(theta: &Endo, cfg: &Config) -> SearchReport {
    let results = (0..5usize)
        .into_par_iter()
        .map(|k| match k {
            0 => find_elementary(theta, cfg).map_err(|e| match e {
                SubalgebraError::Inconclusive(r) => DetectFailure::Inconclusive(r),
                other => DetectFailure::Assertion(other.to_string()),
            }),
            1 => find_type_i(theta, cfg),
            2 => find_type_ii(theta, cfg),
            3 => find_type_iii(theta, cfg),
            _ => find_type_iv(theta, cfg),
        })
        .collect();
    SearchReport { results }
}

/// Detectors whose degree preconditions hold on `theta`, with the ordering
/// of components that satisfies them.
pub fn precondition_hits(theta: &Endo) -> Vec<(&'static str, [usize; 3])> {
    detect::screen(theta)
}

/// Outcome of the trichotomy check on one ordering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrichotomyCheck {
    pub roles: [usize; 3],
    /// Which of the three alternatives hold (1-based).
    pub holds: Vec<u8>,
}

/// For every ordering where `(f1, f2)` is 2-reduced with degrees `2n, sn`
/// (s odd), `deg f3 < sn` and `f3` has no elementary reduction by `f1, f2`,
/// reports which of the three alternatives hold. For a tame map at least one
/// must.
pub fn trichotomy_checks(theta: &Endo, cfg: &Config) -> Vec<TrichotomyCheck> {
    let mut out = Vec::new();
    for perm in detect::PERMS {
        let f: Vec<&Polynomial> = perm.iter().map(|&k| theta.image(k)).collect();
        if f.iter().any(|p| p.total_degree() <= Degree::Finite(0)) {
            continue;
        }
        let (d1, d2, d3) = (f[0].deg(), f[1].deg(), f[2].deg());
        if d1 % 2 != 0 || d1 >= d2 {
            continue;
        }
        let n = d1 / 2;
        if d2 % n != 0 || (d2 / n) % 2 == 0 || d2 / n < 3 {
            continue;
        }
        let s = d2 / n;
        let Some(pair) = make_star_reduced(f[0], f[1]) else { continue };
        if pair.p != 2 || pair.f != *f[0] || d3 >= s * n {
            continue;
        }
        if !matches!(reduce_against(f[2], f[0], f[1], cfg.budget), Ok(None)) {
            continue;
        }
        let b12 = pair.bracket_degree;
        let mut holds = Vec::new();
        if d3 < n * (s - 2) + b12 {
            holds.push(1);
        }
        if n % 2 == 0 {
            if let Some(det) = detect::TypeIv::new(theta, perm, n) {
                let zero: [Rational; 6] = std::array::from_fn(|_| Rational::zero());
                if matches!(det.check_at(&zero), Ok(Some(_))) {
                    holds.push(2);
                }
            }
        }
        if bracket_degree(f[0], f[2]) < Degree::Finite(3 * n + b12) {
            let sq = f[2].pow(2);
            if 2 * d3 == d2 {
                let mu = f[1].leading_term().unwrap().1 / sq.leading_term().unwrap().1;
                let rest = f[1] - &sq.scale(&mu);
                if rest.total_degree() <= Degree::Finite(2 * n) {
                    holds.push(3);
                }
            } else if d2 <= 2 * n {
                holds.push(3);
            }
        }
        out.push(TrichotomyCheck { roles: perm, holds });
    }
    out
}

/// Decide whether `theta` is tame by repeated reduction.
pub fn decide_tame(theta: &Endo, cfg: &Config) -> Result<Trace, ReductionError> {
    if theta.nvars() != 3 {
        return Err(ReductionError::Dimension(theta.nvars()));
    }
    let jac = theta.jacobian_det();
    if !jac.is_constant() || jac.is_zero() {
        return Err(ReductionError::JacobianGate(jac.to_string()));
    }
    let mut steps: Vec<ReductionStep> = Vec::new();
    let mut notes: Vec<String> = Vec::new();
    let mut checks: Vec<(usize, TrichotomyCheck)> = Vec::new();
    let mut cur = theta.clone();
    let verdict = loop {
        let deg = cur.degree().map_err(|e| ReductionError::Assertion(e.to_string()))?;
        if deg == 3 {
            break Verdict::Tame;
        }
        for c in trichotomy_checks(&cur, cfg) {
            checks.push((steps.len(), c));
        }
        let report = search_all(&cur, cfg);
        let mut found: Vec<(usize, ReductionStep)> = Vec::new();
        let mut inconclusive: Option<String> = None;
        for (k, r) in report.results.into_iter().enumerate() {
            match r {
                Ok(Some(s)) => found.push((k, s)),
                Ok(None) => {}
                Err(DetectFailure::Inconclusive(msg)) => inconclusive = inconclusive.or(Some(msg)),
                Err(DetectFailure::Assertion(msg)) => return Err(ReductionError::Assertion(msg)),
            }
        }
        let typed: Vec<usize> = found.iter().map(|(k, _)| *k).filter(|&k| k > 0).collect();
        if typed.len() > 1 {
            return Err(ReductionError::Assertion(format!(
                "map {cur} admits reductions of several types: {typed:?}"
            )));
        }
        let has_elem = found.first().is_some_and(|(k, _)| *k == 0);
        if has_elem {
            if let Some(&t) = typed.first() {
                if t <= 2 {
                    return Err(ReductionError::Assertion(format!(
                        "map {cur} admits an elementary reduction and one of type {t}"
                    )));
                }
                let msg = format!("step {}: elementary reduction coexists with type {}", steps.len() + 1, found[1].1.kind.name());
                log::info!("{msg}");
                notes.push(msg);
            }
        }
        if let Some(msg) = &inconclusive {
            if !found.is_empty() {
                notes.push(format!("step {}: a search was inconclusive: {msg}", steps.len() + 1));
            }
        }
        let Some((_, step)) = found.into_iter().next() else {
            break match inconclusive {
                Some(msg) => Verdict::Inconclusive(msg),
                None => Verdict::Wild,
            };
        };
        if !step.verify(&cur) {
            return Err(ReductionError::Assertion(format!("{} step does not replay", step.kind.name())));
        }
        cur = step.reduced.clone();
        steps.push(step);
    };

    let word = if verdict == Verdict::Tame {
        for (k, c) in &checks {
            if c.holds.is_empty() {
                return Err(ReductionError::Assertion(format!(
                    "no alternative of the trichotomy holds before step {} for roles {:?}",
                    k + 1,
                    c.roles
                )));
            }
        }
        let mut word = affine_decompose(&cur)?;
        for s in steps.iter().rev() {
            word = word.concat(&Word::from_data(3, s.path.iter().cloned()));
        }
        if evaluate(&word) != *theta {
            return Err(ReductionError::Assertion("certificate word does not evaluate to the input".into()));
        }
        Some(word)
    } else {
        None
    };
    Ok(Trace { input: theta.clone(), steps, verdict, word, notes })
}
