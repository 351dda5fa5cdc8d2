//! Seeded generators for small polynomials, generators and tame words.

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automorphism::{ElementaryData, Endo};
use crate::poly::{ratio, Monomial, Polynomial, Rational};
use crate::presentation::{evaluate, Word};

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for trial `k` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, k: u64) -> TestRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(k);
    r
}

pub fn small_coefficient<R: Rng>(rng: &mut R) -> Rational {
    let c = *[-3i64, -2, -1, 1, 2, 3].choose(rng).unwrap();
    Rational::from_integer(c.into())
}

/// Nonzero rational with numerator and denominator of absolute value at most `bound`.
pub fn nonzero_rational<R: Rng>(rng: &mut R, bound: i64) -> Rational {
    loop {
        let n = rng.gen_range(-bound..=bound);
        let d = rng.gen_range(1..=bound);
        if n != 0 {
            return ratio(n, d);
        }
    }
}

/// Random polynomial of degree at most `max_deg` with at most `max_terms`
/// terms and coefficients in `{-3..3} \ {0}`; variables in `skip` do not occur.
pub fn polynomial_with<R: Rng>(rng: &mut R, nvars: usize, max_deg: u32, max_terms: usize, skip: &[usize]) -> Polynomial {
    let allowed: Vec<usize> = (0..nvars).filter(|v| !skip.contains(v)).collect();
    let nterms = rng.gen_range(1..=max_terms);
    let mut p = Polynomial::zero(nvars);
    for _ in 0..nterms {
        let d = rng.gen_range(0..=max_deg);
        let mut e = vec![0u32; nvars];
        if !allowed.is_empty() {
            for _ in 0..d {
                e[*allowed.choose(rng).unwrap()] += 1;
            }
        }
        let m = Monomial::from_exponents(&e);
        if p.coefficient(&m).is_zero() {
            p.add_term(m, small_coefficient(rng));
        }
    }
    p
}

/// Degree at most 4, at most 5 terms.
pub fn polynomial<R: Rng>(rng: &mut R, nvars: usize) -> Polynomial {
    polynomial_with(rng, nvars, 4, 5, &[])
}

pub fn nonconstant_polynomial<R: Rng>(rng: &mut R, nvars: usize) -> Polynomial {
    loop {
        let p = polynomial(rng, nvars);
        if !p.is_constant() {
            return p;
        }
    }
}

/// Random `sigma(i, alpha, f)`.
pub fn elementary<R: Rng>(rng: &mut R, nvars: usize) -> ElementaryData {
    let index = rng.gen_range(1..=nvars);
    let alpha = if rng.gen_bool(0.5) { Rational::from_integer(1.into()) } else { nonzero_rational(rng, 3) };
    let f = polynomial_with(rng, nvars, 4, 5, &[index - 1]);
    ElementaryData { index, alpha, f }
}

/// Random word of at most `max_len` letters whose partial products all have
/// degree (sum of component degrees) at most `max_degree`. Letters that
/// would exceed the bound are redrawn a few times and then dropped.
pub fn tame_word<R: Rng>(rng: &mut R, nvars: usize, max_len: usize, max_degree: u32) -> Word {
    let len = rng.gen_range(1..=max_len);
    let mut cur = Endo::identity(nvars);
    let mut letters = Vec::new();
    for _ in 0..len {
        for _attempt in 0..8 {
            let e = elementary(rng, nvars);
            if degree_upper_bound(&cur, &e) > max_degree {
                continue;
            }
            let next = cur.apply_elementary(&e);
            if next.degree().is_ok_and(|d| d <= max_degree) {
                cur = next;
                letters.push(e);
                break;
            }
        }
    }
    Word::from_data(nvars, letters)
}

/// Bound on `deg(cur * e)` from the component degrees, without expanding.
fn degree_upper_bound(cur: &Endo, e: &ElementaryData) -> u32 {
    let degs = cur.component_degrees();
    let i = e.index - 1;
    let fdeg = e
        .f
        .terms()
        .map(|(m, _)| m.exponents().iter().zip(&degs).map(|(a, d)| a * d).sum::<u32>())
        .max()
        .unwrap_or(0);
    degs.iter().sum::<u32>() - degs[i] + fdeg.max(degs[i])
}

/// A tame automorphism together with the word that produced it.
pub fn tame_automorphism<R: Rng>(rng: &mut R, max_len: usize, max_degree: u32) -> (Word, Endo) {
    let w = tame_word(rng, 3, max_len, max_degree);
    let e = evaluate(&w);
    (w, e)
}

/// Random invertible affine map of `Q[x1..xn]`.
pub fn affine<R: Rng>(rng: &mut R, nvars: usize) -> Endo {
    loop {
        let images: Vec<Polynomial> = (0..nvars)
            .map(|_| {
                let mut p = Polynomial::constant(nvars, Rational::from_integer(rng.gen_range(-2i64..=2).into()));
                for j in 0..nvars {
                    let c = rng.gen_range(-2i64..=2);
                    if c != 0 {
                        p.add_term(Monomial::var(nvars, j), Rational::from_integer(c.into()));
                    }
                }
                p
            })
            .collect();
        let e = Endo::new(images).unwrap();
        let det = e.jacobian_det();
        if det.is_constant() && !det.constant_term().is_zero() {
            return e;
        }
    }
}
