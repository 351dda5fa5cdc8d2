use std::fmt::Write as _;

use rayon::prelude::*;
use serde_json::json;
use tame_core::automorphism::{compose as compose_maps, AutomorphismError, Endo};
use tame_core::poly::PolyError;
use tame_core::presentation::{evaluate, Word, WordError};
use tame_core::random::{tame_automorphism, tame_word, trial_rng};
use tame_core::reduction::{self, Config, ReductionError, Trace, Verdict};
use tame_core::relations::{run_relation_suites, symmetric_group_report};

use crate::Format;

pub const EXIT_TAME: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_WILD: u8 = 3;
pub const EXIT_INCONCLUSIVE: u8 = 4;
pub const EXIT_GATE: u8 = 5;

pub struct Context {
    pub config: Config,
    pub seed: u64,
    pub format: Format,
}

pub struct Output {
    pub stdout: String,
    pub code: u8,
}

#[derive(Debug)]
pub struct Failure {
    pub message: String,
    pub code: u8,
}

impl Failure {
    pub fn usage(msg: &str) -> Failure {
        Failure { message: format!("error: {msg}"), code: EXIT_PARSE }
    }
}

fn ok(stdout: String) -> Result<Output, Failure> {
    Ok(Output { stdout, code: EXIT_TAME })
}

/// `@path` reads the input from a file.
fn read_input(arg: &str) -> Result<String, Failure> {
    match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path)
            .map(|s| s.trim().to_string())
            .map_err(|e| Failure { message: format!("error: cannot read {path}: {e}"), code: EXIT_PARSE }),
        None => Ok(arg.to_string()),
    }
}

fn poly_position(e: &PolyError) -> Option<usize> {
    match e {
        PolyError::Syntax { pos, .. } | PolyError::UnknownVariable { pos, .. } => Some(*pos),
        _ => None,
    }
}

fn parse_failure(text: &str, msg: String, pos: Option<usize>) -> Failure {
    let mut message = format!("parse error: {msg}");
    if let Some(pos) = pos {
        let col = text.get(..pos.min(text.len())).map_or(pos, |s| s.chars().count());
        let _ = write!(message, "\n  {text}\n  {}^", " ".repeat(col));
    }
    Failure { message, code: EXIT_PARSE }
}

fn parse_map(arg: &str) -> Result<Endo, Failure> {
    let text = read_input(arg)?;
    Endo::parse(&text, 3).map_err(|e| {
        let pos = match &e {
            AutomorphismError::Parse(pe) => poly_position(pe),
            _ => None,
        };
        parse_failure(&text, e.to_string(), pos)
    })
}

fn parse_word(arg: &str) -> Result<Word, Failure> {
    let text = read_input(arg)?;
    Word::parse(&text, 3).map_err(|e| {
        let pos = match &e {
            WordError::Syntax { pos, .. } => Some(*pos),
            WordError::Poly(pe) => poly_position(pe),
            _ => None,
        };
        parse_failure(&text, e.to_string(), pos)
    })
}

fn render_map(ctx: &Context, key: &str, e: &Endo) -> String {
    match ctx.format {
        Format::Text => format!("{e}\n"),
        Format::Json => format!("{}\n", json!({ key: e.to_string() })),
    }
}

pub fn compose(ctx: &Context, phi: &str, psi: &str) -> Result<Output, Failure> {
    let (phi, psi) = (parse_map(phi)?, parse_map(psi)?);
    let c = compose_maps(&phi, &psi).map_err(|e| Failure { message: format!("error: {e}"), code: EXIT_FAILURE })?;
    ok(render_map(ctx, "map", &c))
}

pub fn degree(ctx: &Context, map: &str) -> Result<Output, Failure> {
    let e = parse_map(map)?;
    let d = e.degree().map_err(|err| Failure { message: format!("error: {err}"), code: EXIT_FAILURE })?;
    ok(match ctx.format {
        Format::Text => format!("{d}\n"),
        Format::Json => format!("{}\n", json!({ "degree": d, "components": e.component_degrees() })),
    })
}

pub fn jacobian(ctx: &Context, map: &str) -> Result<Output, Failure> {
    let e = parse_map(map)?;
    let j = e.jacobian_det();
    ok(match ctx.format {
        Format::Text => format!("{j}\n"),
        Format::Json => format!("{}\n", json!({ "jacobian": j.to_string() })),
    })
}

pub fn eval_word(ctx: &Context, word: &str) -> Result<Output, Failure> {
    let w = parse_word(word)?;
    ok(render_map(ctx, "map", &evaluate(&w)))
}

fn verdict_code(v: &Verdict) -> u8 {
    match v {
        Verdict::Tame => EXIT_TAME,
        Verdict::Wild => EXIT_WILD,
        Verdict::Inconclusive(_) => EXIT_INCONCLUSIVE,
    }
}

fn run_decision(ctx: &Context, e: &Endo) -> Result<Trace, Failure> {
    reduction::decide_tame(e, &ctx.config).map_err(|err| match err {
        ReductionError::JacobianGate(_) | ReductionError::Dimension(_) => {
            Failure { message: format!("gate failure: {err}"), code: EXIT_GATE }
        }
        other => Failure { message: format!("error: {other}"), code: EXIT_FAILURE },
    })
}

fn trace_text(t: &Trace) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "input: {}", t.input);
    let _ = writeln!(s, "verdict: {}", t.verdict.label());
    let mut cur = &t.input;
    for (k, step) in t.steps.iter().enumerate() {
        let before = cur.degree().unwrap_or(0);
        let after = step.reduced.degree().unwrap_or(0);
        let what = match &step.kind {
            reduction::ReductionKind::Elementary { index, .. } => format!("elementary on x{}", index + 1),
            other => format!("type {}", other.name()),
        };
        let _ = writeln!(s, "step {}: {what}, degree {before} -> {after}", k + 1);
        cur = &step.reduced;
    }
    match &t.verdict {
        Verdict::Tame => {
            if let Some(w) = &t.word {
                let _ = writeln!(s, "word: {w}");
                let _ = writeln!(s, "letters: {}", w.len());
            }
        }
        Verdict::Wild => {
            let _ = writeln!(s, "irreducible: {}", t.final_map());
        }
        Verdict::Inconclusive(reason) => {
            let _ = writeln!(s, "reason: {reason}");
        }
    }
    for n in &t.notes {
        let _ = writeln!(s, "note: {n}");
    }
    s
}

pub fn decide_tame(ctx: &Context, map: &str) -> Result<Output, Failure> {
    let e = parse_map(map)?;
    let t = run_decision(ctx, &e)?;
    let stdout = match ctx.format {
        Format::Text => trace_text(&t),
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&t).expect("trace serializes")),
    };
    Ok(Output { stdout, code: verdict_code(&t.verdict) })
}

/// Decide seeded random tame maps; trials run in parallel and are
/// reported in trial order.
pub fn decide_random(ctx: &Context, trials: usize) -> Result<Output, Failure> {
    let results: Vec<Result<(Word, Trace), Failure>> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let (w, e) = tame_automorphism(&mut trial_rng(ctx.seed, k as u64), 8, 24);
            run_decision(ctx, &e).map(|t| (w, t))
        })
        .collect();
    let mut code = EXIT_TAME;
    let mut text = String::new();
    let mut records = Vec::new();
    for (k, r) in results.into_iter().enumerate() {
        let (w, t) = r?;
        let verified = t.word.as_ref().is_some_and(|cert| evaluate(cert) == t.input);
        code = match (code, verdict_code(&t.verdict)) {
            (EXIT_WILD, _) | (_, EXIT_WILD) => EXIT_WILD,
            (EXIT_INCONCLUSIVE, _) | (_, EXIT_INCONCLUSIVE) => EXIT_INCONCLUSIVE,
            _ => EXIT_TAME,
        };
        match ctx.format {
            Format::Text => {
                if trials == 1 {
                    let _ = writeln!(text, "generator: {w}");
                    text.push_str(&trace_text(&t));
                    let _ = writeln!(text, "verified: {}", if verified { "yes" } else { "no" });
                } else {
                    let _ = writeln!(
                        text,
                        "trial {k}: {} steps={} letters={} verified={}",
                        t.verdict.label(),
                        t.steps.len(),
                        t.word.as_ref().map_or(0, Word::len),
                        if verified { "yes" } else { "no" }
                    );
                }
            }
            Format::Json => records.push(json!({
                "trial": k,
                "generator": w.to_string(),
                "verified": verified,
                "trace": serde_json::to_value(&t).expect("trace serializes"),
            })),
        }
    }
    let stdout = match ctx.format {
        Format::Text => text,
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&records).expect("serializes")),
    };
    Ok(Output { stdout, code })
}

pub fn verify_relations(ctx: &Context, trials: usize, steinberg_trials: usize) -> Result<Output, Failure> {
    let mut reports = run_relation_suites(trials, steinberg_trials, ctx.seed);
    reports.push(symmetric_group_report());
    let all_ok = reports.iter().all(|r| r.ok());
    let stdout = match ctx.format {
        Format::Text => {
            let mut s = String::new();
            for r in &reports {
                let _ = writeln!(s, "{:<10} passed {:>5} failed {:>5}", r.name, r.passed(), r.failures.len());
            }
            let _ = writeln!(s, "{}", if all_ok { "all relations hold" } else { "FAILURES" });
            s
        }
        Format::Json => {
            let v: Vec<_> = reports
                .iter()
                .map(|r| json!({ "suite": r.name, "passed": r.passed(), "failed": r.failures.len(), "failing_trials": r.failures }))
                .collect();
            format!("{}\n", serde_json::to_string_pretty(&json!({ "suites": v, "ok": all_ok })).expect("serializes"))
        }
    };
    Ok(Output { stdout, code: if all_ok { EXIT_TAME } else { EXIT_FAILURE } })
}

pub fn random_word(ctx: &Context, max_len: usize, max_degree: u32) -> Result<Output, Failure> {
    let w = tame_word(&mut trial_rng(ctx.seed, 0), 3, max_len, max_degree);
    ok(match ctx.format {
        Format::Text => format!("{w}\n"),
        Format::Json => format!("{}\n", json!({ "word": w.to_string(), "map": evaluate(&w).to_string() })),
    })
}
