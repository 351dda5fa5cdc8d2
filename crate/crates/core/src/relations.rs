//! Randomized checks of the defining relations of the tame group, the
//! symmetric-group identities and the Steinberg identities, all by evaluation.

use rand::Rng;
use rayon::prelude::*;

use crate::automorphism::{elementary, ElementaryData};
use crate::poly::{Polynomial, Rational};
use crate::presentation::{
    evaluate, rewrite_commute, rewrite_merge, rewrite_perm_conj, steinberg_commutator, steinberg_h, transposition_word,
    Gen, Word,
};
use crate::random::{nonzero_rational, polynomial_with, trial_rng, TestRng};

/// Pass/fail tally of one suite; `failures` lists failing trial indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub trials: usize,
    pub failures: Vec<usize>,
}

impl SuiteReport {
    pub fn passed(&self) -> usize {
        self.trials - self.failures.len()
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

fn letter(index: usize, alpha: Rational, f: Polynomial) -> ElementaryData {
    ElementaryData { index, alpha, f }
}

fn alpha(rng: &mut TestRng) -> Rational {
    nonzero_rational(rng, 5)
}

fn word(letters: impl IntoIterator<Item = Gen>) -> Word {
    Word::new(3, letters.into_iter().collect())
}

/// `s(i,a,f) s(i,b,g) = s(i, a b, b f + g)`.
pub fn merge_instance(rng: &mut TestRng) -> bool {
    let i = rng.gen_range(1..=3);
    let (a, b) = (alpha(rng), alpha(rng));
    let f = polynomial_with(rng, 3, 4, 5, &[i - 1]);
    let g = polynomial_with(rng, 3, 4, 5, &[i - 1]);
    let lhs = Word::from_data(3, [letter(i, a.clone(), f.clone()), letter(i, b.clone(), g.clone())]);
    let mut bf = f.scale(&b);
    bf.add_assign_ref(&g);
    let rhs = elementary(&letter(i, &a * &b, bf));
    let e = evaluate(&lhs);
    e == rhs && evaluate(&rewrite_merge(&lhs)) == e
}

/// `S^{-1} T S = s(j, b, S^{-1}(g))` for `S = s(i,a,f)`, `T = s(j,b,g)`,
/// `i != j`, `f` free of `x_i, x_j`.
pub fn commute_instance(rng: &mut TestRng) -> bool {
    let i = rng.gen_range(1..=3);
    let j = loop {
        let j = rng.gen_range(1..=3);
        if j != i {
            break j;
        }
    };
    let s = letter(i, alpha(rng), polynomial_with(rng, 3, 4, 5, &[i - 1, j - 1]));
    let t = letter(j, alpha(rng), polynomial_with(rng, 3, 4, 5, &[j - 1]));
    let lhs = word([Gen::plain(s.clone()).inverse(), Gen::plain(t.clone()), Gen::plain(s.clone())]);
    let s_inv = elementary(&s.inverse());
    let rhs = elementary(&letter(j, t.alpha.clone(), s_inv.apply(&t.f)));
    let e = evaluate(&lhs);
    let moved = word([Gen::plain(s.clone()), Gen::plain(t)]);
    let rewritten = rewrite_commute(&moved, 0).is_some_and(|w| evaluate(&w) == evaluate(&moved));
    e == rhs && rewritten
}

/// `s(i,a,f)^{(ks)} = s(j, a, (ks)(f))` with `x_j = (ks)(x_i)`.
pub fn conjugation_instance(rng: &mut TestRng) -> bool {
    let i = rng.gen_range(1..=3);
    let k = rng.gen_range(1..=3);
    let s_ = loop {
        let s_ = rng.gen_range(1..=3);
        if s_ != k {
            break s_;
        }
    };
    let sigma = letter(i, alpha(rng), polynomial_with(rng, 3, 4, 5, &[i - 1]));
    let perm = transposition_word(3, k, s_).expect("distinct indices");
    let p = evaluate(&perm);
    let j = (0..3).find(|&j| *p.image(i - 1) == Polynomial::var(3, j)).expect("permutation") + 1;
    let lhs = perm.inverse().concat(&Word::from_data(3, [sigma.clone()])).concat(&perm);
    let rhs = elementary(&letter(j, sigma.alpha.clone(), p.apply(&sigma.f)));
    let single = Word::from_data(3, [sigma]);
    let e = evaluate(&lhs);
    let rewritten = rewrite_perm_conj(&single, &perm).is_ok_and(|w| evaluate(&w) == e);
    e == rhs && rewritten
}

/// `evaluate(h_ij(u)) = s(i,u,0) s(j,1/u,0)` and `{u, v} = id`.
pub fn steinberg_instance(rng: &mut TestRng) -> bool {
    let (u, v) = (nonzero_rational(rng, 9), nonzero_rational(rng, 9));
    let zero = Polynomial::zero(3);
    let mut ok = true;
    for i in 1..=3 {
        for j in 1..=3 {
            if i == j {
                continue;
            }
            let h = steinberg_h(3, i, j, &u).expect("valid indices");
            let diag = Word::from_data(3, [letter(i, u.clone(), zero.clone()), letter(j, u.recip(), zero.clone())]);
            ok &= evaluate(&h) == evaluate(&diag);
            ok &= evaluate(&steinberg_commutator(3, i, j, &u, &v).expect("nonzero")).is_identity();
        }
    }
    ok
}

/// Every transposition identity in `n` variables, by name.
pub fn symmetric_group_identities(n: usize) -> Vec<(String, bool)> {
    let t = |k: usize, s: usize| transposition_word(n, k, s).expect("distinct indices");
    let mut out = Vec::new();
    for k in 1..=n {
        for s in 1..=n {
            if k == s {
                continue;
            }
            out.push((format!("({k}{s})^2 = id"), evaluate(&t(k, s).concat(&t(k, s))).is_identity()));
            out.push((format!("({k}{s}) = ({s}{k})"), evaluate(&t(k, s)) == evaluate(&t(s, k))));
            for i in 1..=n {
                if i == k || i == s {
                    continue;
                }
                let conj = t(i, s).inverse().concat(&t(i, k)).concat(&t(i, s));
                out.push((format!("({i}{k})^({i}{s}) = ({k}{s})"), evaluate(&conj) == evaluate(&t(k, s))));
                for j in 1..=n {
                    if j == i || j == k || j == s {
                        continue;
                    }
                    let (a, b) = (t(i, j), t(k, s));
                    let comm = a.inverse().concat(&b.inverse()).concat(&a).concat(&b);
                    out.push((format!("[({i}{j}),({k}{s})] = id"), evaluate(&comm).is_identity()));
                }
            }
        }
    }
    out
}

fn run(name: &'static str, tag: u64, trials: usize, seed: u64, check: fn(&mut TestRng) -> bool) -> SuiteReport {
    let failures = (0..trials)
        .into_par_iter()
        .filter(|&k| !check(&mut trial_rng(seed ^ (tag << 56), k as u64)))
        .collect();
    SuiteReport { name, trials, failures }
}

/// The three relation suites with `trials` instances each, then the
/// Steinberg suite with `steinberg_trials` pairs `(u, v)`.
pub fn run_relation_suites(trials: usize, steinberg_trials: usize, seed: u64) -> Vec<SuiteReport> {
    vec![
        run("merge", 1, trials, seed, merge_instance),
        run("commute", 2, trials, seed, commute_instance),
        run("conjugate", 3, trials, seed, conjugation_instance),
        run("steinberg", 4, steinberg_trials, seed, steinberg_instance),
    ]
}

/// The symmetric-group identities for `n = 3` and, so that the disjoint
/// commutation identity is not vacuous, `n = 4`.
pub fn symmetric_group_report() -> SuiteReport {
    let ids: Vec<(String, bool)> = [3, 4].into_iter().flat_map(symmetric_group_identities).collect();
    let failures = ids.iter().enumerate().filter(|(_, (_, ok))| !ok).map(|(k, _)| k).collect();
    SuiteReport { name: "symmetric", trials: ids.len(), failures }
}
