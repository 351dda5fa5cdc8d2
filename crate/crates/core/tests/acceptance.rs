//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::Rng;
use rayon::prelude::*;
use tame_core::automorphism::{nagata, Endo};
use tame_core::degree::{bracket_degree, StarReducedPair, TripleDegrees};
use tame_core::presentation::evaluate;
use tame_core::random::{nonconstant_polynomial, polynomial_with, tame_automorphism, trial_rng, TestRng};
use tame_core::reduction::{decide_tame, search_all, Config, Trace, Verdict};
use tame_core::relations::{run_relation_suites, symmetric_group_identities, SuiteReport};
use tame_core::subalgebra::{derivative_polynomial, reduce_against};
use tame_core::{Degree, Polynomial};

use common::*;

const SEED: u64 = 0x7a3e_2024;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn nagata_wild() -> Outcome {
    let cfg = Config::default();
    let start = Instant::now();
    let report = search_all(&nagata(), &cfg);
    for (k, r) in report.results.iter().enumerate() {
        check(matches!(r, Ok(None)), || format!("search {k} did not exhaust: {r:?}"))?;
    }
    let t = decide_tame(&nagata(), &cfg).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    check(t.verdict == Verdict::Wild, || format!("verdict {}", t.verdict.label()))?;
    check(t.steps.is_empty() && t.verify(), || "trace does not replay".into())?;
    check(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("WILD, five searches exhausted, {:.2} s", elapsed.as_secs_f64()))
}

fn suites_line(reports: &[SuiteReport]) -> Outcome {
    let mut parts = Vec::new();
    for r in reports {
        check(r.ok(), || format!("{} failed at trials {:?}", r.name, r.failures))?;
        parts.push(format!("{} {}/{}", r.name, r.passed(), r.trials));
    }
    Ok(parts.join(", "))
}

fn relations() -> Outcome {
    let reports = run_relation_suites(1000, 0, SEED);
    suites_line(&reports[..3])
}

fn symmetric_group() -> Outcome {
    let ids = symmetric_group_identities(3);
    let bad: Vec<_> = ids.iter().filter(|(_, ok)| !ok).map(|(n, _)| n.clone()).collect();
    check(bad.is_empty(), || format!("failing identities {bad:?}"))?;
    // disjoint transpositions need a fourth index
    let ids4 = symmetric_group_identities(4);
    let disjoint = ids4.iter().filter(|(n, _)| n.starts_with('[')).count();
    check(ids4.iter().all(|(_, ok)| *ok), || "n = 4 identity failed".into())?;
    Ok(format!("{} identities for n = 3, {} for n = 4 ({disjoint} disjoint commutations)", ids.len(), ids4.len()))
}

fn steinberg() -> Outcome {
    let reports = run_relation_suites(0, 100, SEED);
    suites_line(&reports[3..])
}

/// Sum of component degrees of every prefix of the word.
fn max_prefix_degree(w: &tame_core::presentation::Word) -> u32 {
    let mut cur = Endo::identity(3);
    let mut best = 3;
    for g in w.letters() {
        cur = cur.apply_elementary(&g.normalized());
        best = best.max(cur.degree().unwrap());
    }
    best
}

fn random_words(n: usize) -> Vec<(tame_core::presentation::Word, Endo)> {
    (0..n).map(|k| tame_automorphism(&mut trial_rng(SEED, k as u64), 8, 24)).collect()
}

fn tame_roundtrip() -> Outcome {
    let cfg = Config::default();
    let mut times = Vec::new();
    let mut steps = 0;
    for (k, (w, e)) in random_words(200).into_iter().enumerate() {
        check(w.len() <= 8 && max_prefix_degree(&w) <= 24, || format!("generator {k} out of range"))?;
        let start = Instant::now();
        let t = decide_tame(&e, &cfg).map_err(|err| format!("instance {k}: {err}"))?;
        times.push(start.elapsed());
        check(t.verdict == Verdict::Tame, || format!("instance {k}: {}", t.verdict.label()))?;
        let word = t.word.as_ref().ok_or_else(|| format!("instance {k}: no word"))?;
        check(evaluate(word) == e, || format!("instance {k}: word does not evaluate to the input"))?;
        check(t.verify(), || format!("instance {k}: trace does not replay"))?;
        steps += t.steps.len();
    }
    times.sort();
    let median = times[times.len() / 2];
    let max = *times.last().unwrap();
    check(median <= Duration::from_secs(5), || format!("median {median:?}"))?;
    Ok(format!("200/200 TAME, {steps} reduction steps, median {median:.2?}, max {max:.2?}"))
}

fn minors_degree(f: &Polynomial, g: &Polynomial) -> Degree {
    let mut best = Degree::NegInfinity;
    for i in 0..3 {
        for j in i + 1..3 {
            let m = &(&f.diff(i) * &g.diff(j)) - &(&f.diff(j) * &g.diff(i));
            best = best.max(m.total_degree());
        }
    }
    match best {
        Degree::Finite(d) => Degree::Finite(d + 2),
        other => other,
    }
}

fn random_triple(rng: &mut TestRng) -> (Polynomial, Polynomial, Polynomial) {
    let f = nonconstant_polynomial(rng, 3);
    let g = nonconstant_polynomial(rng, 3);
    let small = polynomial_with(rng, 3, 2, 3, &[]);
    let h = match rng.gen_range(0..4) {
        0 => nonconstant_polynomial(rng, 3),
        1 => &(&f * &g) + &small,
        2 => &(&f.pow(2) + &g) + &small,
        _ => &g.pow(2) - &f.pow(3),
    };
    (f, g, h)
}

fn degree_apparatus() -> Outcome {
    // triangle inequality, with the bracket degrees recomputed here
    let mut equal_cases = 0;
    for k in 0..500u64 {
        let (f, g, h) = random_triple(&mut trial_rng(SEED ^ 6, k));
        if h.total_degree() <= Degree::Finite(0) {
            return Err(format!("triple {k}: constant h"));
        }
        let add = |b: Degree, d: Degree| (b + d).as_i64();
        let (m, n, kk) = (
            add(minors_degree(&f, &g), h.total_degree()),
            add(minors_degree(&g, &h), f.total_degree()),
            add(minors_degree(&h, &f), g.total_degree()),
        );
        let td = TripleDegrees::of(&f, &g, &h);
        check(td == TripleDegrees { m, n, k: kk }, || format!("triple {k}: degrees {td:?} vs {m} {n} {kk}"))?;
        check(m <= n.max(kk), || format!("triple {k}: {m} > max({n}, {kk})"))?;
        check(n == kk || m == n.max(kk), || format!("triple {k}: {m} != max({n}, {kk})"))?;
        equal_cases += usize::from(n == kk);
    }

    // lower bounds on random evaluations, G drawn around multiples of w
    let evals: Vec<Result<bool, String>> = (0..200u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = trial_rng(SEED ^ 66, k);
            let pair = star_pair(&mut rng, 2 + (k % 2) as usize, 15);
            let w = derivative_polynomial(&pair).map_err(|e| e.to_string())?.w;
            let mut g_xy = w.pow(rng.gen_range(1..=2));
            g_xy = &g_xy * &Polynomial::monomial(2, xy(rng.gen_range(0..2), rng.gen_range(0..2)), r(1));
            for _ in 0..rng.gen_range(0..3) {
                let m = xy(rng.gen_range(0..=pair.s), rng.gen_range(0..pair.p));
                g_xy.add_term(m, r(rng.gen_range(-2..=2)));
            }
            if g_xy.is_zero() {
                g_xy = w.clone();
            }
            let value = g_xy.subst(&[pair.f.clone(), pair.g.clone()]);
            let (dx, dy) = (g_xy.degree_in(0).as_i64() as u32, g_xy.degree_in(1).as_i64() as u32);
            let bound = lower_bound(&pair, dx, dy);
            check(value.total_degree().as_i64() >= bound, || {
                format!("evaluation {k}: deg {} < bound {bound} for G = {g_xy}", value.total_degree())
            })?;
            Ok(value.total_degree().as_i64() == bound)
        })
        .collect();
    let tight = evals.into_iter().collect::<Result<Vec<bool>, String>>()?.into_iter().filter(|t| *t).count();

    // brute force: no G with the given y- (x-) degree reaches degree <= 12
    // below the bound
    let boxes: Vec<Result<usize, String>> = (0..20u64)
        .into_par_iter()
        .map(|k| {
            let pair = star_pair(&mut trial_rng(SEED ^ 666, k), 2, 12);
            let d = 12u32;
            let mut checked = 0;
            for y in 1..=2 * pair.p {
                if lower_bound(&pair, 0, y) > d as i64 {
                    let found = common::brute_low_degree(&pair.f, &pair.g, 2 * pair.s, y, d, |_, j| j == y);
                    check(!found, || format!("pair {k}: deg_y G = {y} reaches degree <= {d}"))?;
                    checked += 1;
                }
            }
            for x in 1..=2 * pair.s {
                if lower_bound(&pair, x, 0) > d as i64 {
                    let found = common::brute_low_degree(&pair.f, &pair.g, x, 2 * pair.p, d, |i, _| i == x);
                    check(!found, || format!("pair {k}: deg_x G = {x} reaches degree <= {d}"))?;
                    checked += 1;
                }
            }
            Ok(checked)
        })
        .collect();
    let brute: usize = boxes.into_iter().sum::<Result<usize, String>>()?;
    Ok(format!(
        "500 triples ({equal_cases} with n = k), 200 evaluations ({tight} attain the bound), {brute} exhaustive degree boxes at deg <= 12"
    ))
}

/// `max(q N + m r, q1 N + n r1)` for `deg_y G = q p + r`, `deg_x G = q1 s + r1`.
fn lower_bound(pair: &StarReducedPair, dx: u32, dy: u32) -> i64 {
    let big_n = (pair.m * pair.p) as i64 - pair.m as i64 - pair.n as i64 + pair.bracket_degree as i64;
    let y = (dy / pair.p) as i64 * big_n + (pair.m * (dy % pair.p)) as i64;
    let x = (dx / pair.s) as i64 * big_n + (pair.n * (dx % pair.s)) as i64;
    x.max(y)
}

fn derivative_check() -> Outcome {
    let results: Vec<Result<u32, String>> = (0..50u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = trial_rng(SEED ^ 7, k);
            let pair = star_pair(&mut rng, 2 + (k % 2) as usize, 24);
            let (f, g) = (&pair.f, &pair.g);
            let (n, m, pp, s) = (pair.n, pair.m, pair.p, pair.s);
            check(bracket_degree(f, g).is_finite(), || format!("pair {k}: dependent"))?;
            let dp = derivative_polynomial(&pair).map_err(|e| format!("pair {k}: {e}"))?;
            let w = &dp.w;
            let value = w.subst(&[f.clone(), g.clone()]);
            check(value == dp.value, || format!("pair {k}: stored value differs"))?;
            check(w.coefficient(&xy(0, pp)) == one(), || format!("pair {k}: y^p coefficient"))?;
            check(!w.coefficient(&xy(s, 0)).is_zero(), || format!("pair {k}: x^s coefficient"))?;
            for (mono, _) in w.terms() {
                let (i, j) = (mono.exponents()[0], mono.exponents()[1]);
                if (i, j) != (0, pp) && (i, j) != (s, 0) {
                    check(n * i + m * j < m * pp, || format!("pair {k}: term x^{i} y^{j}"))?;
                }
            }
            check(value.total_degree() > Degree::Finite(0), || format!("pair {k}: w(f,g) constant"))?;
            check(value.deg() < pp * m, || format!("pair {k}: deg w(f,g) = {} >= pm", value.deg()))?;
            check(!brute_top_membership(&value, f, g), || format!("pair {k}: top of w(f,g) in <top f, top g>"))?;
            let dx = w.diff(0).subst(&[f.clone(), g.clone()]);
            let dy = w.diff(1).subst(&[f.clone(), g.clone()]);
            check(dx.total_degree() == Degree::Finite(n * (s - 1)), || format!("pair {k}: deg dw/dx = {}", dx.total_degree()))?;
            check(dy.total_degree() == Degree::Finite(m * (pp - 1)), || format!("pair {k}: deg dw/dy = {}", dy.total_degree()))?;
            Ok(value.deg())
        })
        .collect();
    let degs = results.into_iter().collect::<Result<Vec<u32>, String>>()?;
    let low = degs.iter().filter(|&&d| d < 6).count();
    Ok(format!("50 pairs, conditions and derivative degrees exact ({low} with deg w(f,g) < 6)"))
}

#[derive(Default)]
struct MembershipTally {
    some: usize,
    none: usize,
    inconclusive: usize,
}

fn membership_instance(k: u64) -> Result<MembershipTally, String> {
    let mut rng = trial_rng(SEED ^ 8, k);
    let star = k % 4 != 3;
    let (f, g, box_for): (Polynomial, Polynomial, Box<dyn Fn(u32) -> (u32, u32)>) = if star {
        let pair = star_pair(&mut rng, 2, 12);
        let (f, g) = (pair.f.clone(), pair.g.clone());
        (f, g, Box::new(move |d| {
            let (bx, by) = pair.support_bounds(d);
            (bx + pair.s, by + pair.p)
        }))
    } else {
        let (f, g) = free_pair(&mut rng, 2);
        let (n, m) = (f.deg(), g.deg());
        (f, g, Box::new(move |d| (d / n + 2, d / m + 2)))
    };
    let w_value = if star {
        derivative_polynomial(&tame_core::degree::make_star_reduced(&f, &g).unwrap())
            .map_err(|e| e.to_string())?
            .value
    } else {
        &f * &g
    };
    let mut tally = MembershipTally::default();
    for variant in 0..4 {
        let noise = polynomial_with(&mut rng, 3, 3, 3, &[2]);
        let h = match variant {
            0 => nonconstant_polynomial(&mut rng, 3),
            1 => &w_value + &noise,
            2 => &(&f * &g) + &noise,
            _ => &(&w_value * &f) + &polynomial_with(&mut rng, 3, 4, 4, &[]),
        };
        if h.total_degree() <= Degree::Finite(0) || h.deg() > 12 {
            continue;
        }
        match reduce_against(&h, &f, &g, 200) {
            Ok(Some((wit, rem))) => {
                check(wit.verify(&f, &g), || format!("instance {k}/{variant}: witness does not evaluate"))?;
                check(rem == &h - &wit.value && rem.total_degree() < h.total_degree(), || {
                    format!("instance {k}/{variant}: remainder does not drop")
                })?;
                tally.some += 1;
            }
            Ok(None) => {
                let (bx, by) = box_for(h.deg());
                check(!brute_membership(&h, &f, &g, bx, by), || {
                    format!("instance {k}/{variant}: None but brute force finds G in [0,{bx}]x[0,{by}] for h = {h}")
                })?;
                tally.none += 1;
            }
            Err(_) => tally.inconclusive += 1,
        }
    }
    Ok(tally)
}

fn membership() -> Outcome {
    let results: Vec<Result<MembershipTally, String>> = (0..60u64).into_par_iter().map(membership_instance).collect();
    let mut total = MembershipTally::default();
    for r in results {
        let t = r?;
        total.some += t.some;
        total.none += t.none;
        total.inconclusive += t.inconclusive;
    }
    check(total.inconclusive == 0, || format!("{} inconclusive answers at deg <= 12", total.inconclusive))?;
    check(total.none >= 50, || format!("only {} None answers to cross-check", total.none))?;
    Ok(format!("{} None answers confirmed by enlarged boxes, {} reductions verified", total.none, total.some))
}

fn single_type_on(theta: &Endo, cfg: &Config, what: &str) -> Result<usize, String> {
    let triggered = search_all(theta, cfg).triggered();
    let typed: Vec<_> = triggered.iter().filter(|t| **t != "elementary").collect();
    check(typed.len() <= 1, || format!("{what}: types {typed:?} both trigger"))?;
    let elementary = triggered.contains(&"elementary");
    check(!(elementary && typed.iter().any(|t| **t == "I" || **t == "II")), || {
        format!("{what}: elementary together with {typed:?}")
    })?;
    Ok(usize::from(elementary && !typed.is_empty()))
}

fn stages(t: &Trace) -> Vec<Endo> {
    std::iter::once(t.input.clone()).chain(t.steps.iter().map(|s| s.reduced.clone())).collect()
}

fn no_double_types() -> Outcome {
    let cfg = Config::default();
    let mut corpus: Vec<(String, Endo)> = named_corpus().into_iter().map(|(n, e)| (n.to_string(), e)).collect();
    corpus.extend(random_words(200).into_iter().enumerate().map(|(k, (_, e))| (format!("word {k}"), e)));
    let results: Vec<Result<(usize, usize, usize), String>> = corpus
        .par_iter()
        .map(|(name, e)| {
            let t = decide_tame(e, &cfg).map_err(|err| format!("{name}: {err}"))?;
            let mut coexist = 0;
            let all = stages(&t);
            for (k, s) in all.iter().enumerate() {
                if s.degree().unwrap() > 3 {
                    coexist += single_type_on(s, &cfg, &format!("{name} stage {k}"))?;
                }
            }
            Ok((all.len(), coexist, t.notes.len()))
        })
        .collect();
    let (mut maps, mut coexist, mut notes) = (0, 0, 0);
    for r in results {
        let (a, b, c) = r?;
        maps += a;
        coexist += b;
        notes += c;
    }
    Ok(format!(
        "{} automorphisms, {maps} maps searched, no double types, {coexist} logged elementary coexistences ({notes} notes)",
        corpus.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("nagata automorphism is wild", nagata_wild),
        ("merge, commutation and conjugation relations", relations),
        ("symmetric-group identities", symmetric_group),
        ("steinberg identities", steinberg),
        ("random tame words round trip", tame_roundtrip),
        ("degree inequalities and lower bounds", degree_apparatus),
        ("derivative polynomial", derivative_check),
        ("membership None answers vs brute force", membership),
        ("no automorphism admits two reduction types", no_double_types),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail} [{secs:.1} s]", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why} [{secs:.1} s]", k + 1);
            }
        }
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
