#![allow(dead_code)]

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use tame_core::automorphism::{nagata, Endo};
use tame_core::degree::{make_star_reduced, StarReducedPair};
use tame_core::random::{nonzero_rational, polynomial_with, TestRng};
use tame_core::{Degree, Monomial, Polynomial, Rational};

pub fn p(s: &str) -> Polynomial {
    Polynomial::parse(s, 3).unwrap()
}

pub fn endo(s: &str) -> Endo {
    Endo::parse(s, 3).unwrap()
}

pub fn r(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn xy(i: u32, j: u32) -> Monomial {
    Monomial::from_exponents(&[i, j])
}

/// Random homogeneous polynomial of degree `d` in the first `nv` variables.
pub fn homogeneous(rng: &mut TestRng, nv: usize, d: u32) -> Polynomial {
    loop {
        let mut out = Polynomial::zero(3);
        for _ in 0..rng.gen_range(1..=3) {
            let mut e = [0u32; 3];
            for _ in 0..d {
                e[rng.gen_range(0..nv)] += 1;
            }
            out.add_term(Monomial::from_exponents(&e), r(rng.gen_range(-3..=3)));
        }
        if !out.is_zero() {
            return out;
        }
    }
}

/// Random polynomial of degree below `d` in the first `nv` variables.
pub fn lower(rng: &mut TestRng, nv: usize, d: u32) -> Polynomial {
    let skip: Vec<usize> = (nv..3).collect();
    polynomial_with(rng, 3, d.saturating_sub(1), 4, &skip)
}

/// A `*`-reduced pair `f = beta a^p + u`, `g = gamma a^s + v`. Half of the
/// `(2, 3)` draws use `v = 3/2 a u + v'` so that `g^2 - f^3` loses its top
/// degrees and `w(f, g)` has small degree. `nv` is the number of variables
/// that may occur; `max_pm` caps `p * deg g`.
pub fn star_pair(rng: &mut TestRng, nv: usize, max_pm: u32) -> StarReducedPair {
    const SHAPES: [(u32, u32); 4] = [(2, 3), (2, 5), (3, 4), (3, 5)];
    loop {
        let (pp, s) = *SHAPES.choose(rng).unwrap();
        let da = rng.gen_range(1..=2u32);
        if pp * s * da > max_pm {
            continue;
        }
        let a = homogeneous(rng, nv, da);
        let (n, m) = (pp * da, s * da);
        let beta = nonzero_rational(rng, 3);
        let gamma = nonzero_rational(rng, 3);
        let u = lower(rng, nv, n);
        let f = &a.pow(pp).scale(&beta) + &u;
        let mut g = &a.pow(s).scale(&gamma) + &lower(rng, nv, m);
        if (pp, s) == (2, 3) && rng.gen_bool(0.5) {
            // f = a^2 + u, g = a^3 + 3/2 a u + v'
            let f1 = &a.pow(2) + &u;
            let v = lower(rng, nv, da.max(1) + 1);
            g = &(&a.pow(3) + &(&a * &u).scale(&Rational::new(3.into(), 2.into()))) + &v;
            if let Some(pair) = make_star_reduced(&f1, &g) {
                if pair.f == f1 && pair.n == n && pair.m == m {
                    return pair;
                }
            }
            continue;
        }
        if let Some(pair) = make_star_reduced(&f, &g) {
            if pair.f == f && pair.n == n && pair.m == m {
                return pair;
            }
        }
    }
}

/// A pair with algebraically independent top parts.
pub fn free_pair(rng: &mut TestRng, nv: usize) -> (Polynomial, Polynomial) {
    loop {
        let f = &Polynomial::var(3, 0).pow(rng.gen_range(1..=2)) + &lower(rng, nv, 2);
        let g = &Polynomial::var(3, 1).pow(rng.gen_range(1..=3)) + &lower(rng, nv, 2);
        if f.total_degree() <= Degree::Finite(0) || g.total_degree() <= Degree::Finite(0) {
            continue;
        }
        if tame_core::degree::bracket_degree(&f.top(), &g.top()).is_finite() {
            return (f, g);
        }
    }
}

/// Incremental row echelon form over the rationals, dense in the columns.
pub struct Echelon {
    ncols: usize,
    pivots: Vec<(usize, Vec<Rational>)>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon { ncols, pivots: Vec::new() }
    }

    fn reduce(&self, mut row: Vec<Rational>) -> Vec<Rational> {
        for (col, prow) in &self.pivots {
            if !row[*col].is_zero() {
                let c = row[*col].clone();
                for (x, y) in row.iter_mut().zip(prow) {
                    if !y.is_zero() {
                        *x -= &c * y;
                    }
                }
            }
        }
        row
    }

    /// Adds a row; returns whether the rank grew.
    pub fn push(&mut self, row: Vec<Rational>) -> bool {
        assert_eq!(row.len(), self.ncols);
        let row = self.reduce(row);
        let Some(col) = row.iter().position(|c| !c.is_zero()) else { return false };
        let inv = row[col].recip();
        let row: Vec<Rational> = row.into_iter().map(|c| c * &inv).collect();
        for (_, prow) in self.pivots.iter_mut() {
            if !prow[col].is_zero() {
                let c = prow[col].clone();
                for (x, y) in prow.iter_mut().zip(&row) {
                    if !y.is_zero() {
                        *x -= &c * y;
                    }
                }
            }
        }
        self.pivots.push((col, row));
        true
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Rows indexed by monomial: `rows[m][k]` is the coefficient of `m` in column `k`.
fn rows_of(columns: &[Polynomial], keep: impl Fn(&Monomial) -> bool) -> BTreeMap<Monomial, Vec<Rational>> {
    let mut rows: BTreeMap<Monomial, Vec<Rational>> = BTreeMap::new();
    for (k, col) in columns.iter().enumerate() {
        for (m, c) in col.terms() {
            if keep(m) {
                rows.entry(m.clone()).or_insert_with(|| vec![Rational::zero(); columns.len()])[k] = c.clone();
            }
        }
    }
    rows
}

/// Is there `G` supported on `[0, bx] x [0, by]` with `deg(h - G(f, g)) < deg h`?
/// Decided by comparing ranks with and without the right-hand side.
pub fn brute_membership(h: &Polynomial, f: &Polynomial, g: &Polynomial, bx: u32, by: u32) -> bool {
    let d = h.deg();
    let (fp, gp): (Vec<_>, Vec<_>) = ((0..=bx).map(|i| f.pow(i)).collect(), (0..=by).map(|j| g.pow(j)).collect());
    let mut columns = Vec::new();
    for i in 0..=bx {
        for j in 0..=by {
            columns.push(&fp[i as usize] * &gp[j as usize]);
        }
    }
    columns.push(h.clone());
    let rows = rows_of(&columns, |m| m.degree() >= d);
    let ncols = columns.len();
    let mut a = Echelon::new(ncols - 1);
    let mut ab = Echelon::new(ncols);
    for row in rows.into_values() {
        a.push(row[..ncols - 1].to_vec());
        ab.push(row);
    }
    a.rank() == ab.rank()
}

/// Is there `G` with `deg_x G <= bx`, `deg_y G <= by`, a nonzero coefficient
/// among the columns selected by `exact`, and `deg G(f, g) <= d`?
pub fn brute_low_degree(
    f: &Polynomial,
    g: &Polynomial,
    bx: u32,
    by: u32,
    d: u32,
    exact: impl Fn(u32, u32) -> bool,
) -> bool {
    let (fp, gp): (Vec<_>, Vec<_>) = ((0..=bx).map(|i| f.pow(i)).collect(), (0..=by).map(|j| g.pow(j)).collect());
    let mut columns = Vec::new();
    let mut chosen = Vec::new();
    for i in 0..=bx {
        for j in 0..=by {
            chosen.push(exact(i, j));
            columns.push(&fp[i as usize] * &gp[j as usize]);
        }
    }
    let rows = rows_of(&columns, |m| m.degree() > d);
    // null vectors with a nonzero chosen entry exist iff dropping the chosen
    // columns loses more nullity than columns removed
    let rest: Vec<usize> = (0..columns.len()).filter(|&k| !chosen[k]).collect();
    let mut full = Echelon::new(columns.len());
    let mut part = Echelon::new(rest.len());
    for row in rows.into_values() {
        part.push(rest.iter().map(|&k| row[k].clone()).collect());
        full.push(row);
    }
    let nullity_full = columns.len() - full.rank();
    let nullity_part = rest.len() - part.rank();
    nullity_full > nullity_part
}

/// Is `top(h)` a combination of `top(f)^a top(g)^b` with `a deg f + b deg g = deg h`?
pub fn brute_top_membership(h: &Polynomial, f: &Polynomial, g: &Polynomial) -> bool {
    let (d, n, m) = (h.deg(), f.deg(), g.deg());
    let (tf, tg, th) = (f.top(), g.top(), h.top());
    let mut columns = Vec::new();
    for a in 0..=d / n {
        for b in 0..=d / m {
            if a * n + b * m == d {
                columns.push(&tf.pow(a) * &tg.pow(b));
            }
        }
    }
    if columns.is_empty() {
        return false;
    }
    columns.push(th);
    let ncols = columns.len();
    let rows = rows_of(&columns, |_| true);
    let mut a = Echelon::new(ncols - 1);
    let mut ab = Echelon::new(ncols);
    for row in rows.into_values() {
        a.push(row[..ncols - 1].to_vec());
        ab.push(row);
    }
    a.rank() == ab.rank()
}

/// `f1 = a^2 + x2`, `f3 = x3 + (g2^2 - g1^3)`, `f2 = g2 + beta f3` with
/// `a = x1^2 + x3`: a first-type reduction hidden behind the third component.
pub fn synthetic_type_one(beta: i64) -> Endo {
    let a = p("x1^2 + x3");
    let u = p("x2");
    let g1 = &a.pow(2) + &u;
    let g2 = &a.pow(3) + &(&a * &u).scale(&Rational::new(3.into(), 2.into()));
    let w = &g2.pow(2) - &g1.pow(3);
    let f3 = &p("x3") + &w;
    let f2 = &g2 + &f3.scale(&r(beta));
    Endo::new(vec![g1, f2, f3]).unwrap()
}

/// Fixed automorphisms exercised by the reduction tests, besides random words.
pub fn named_corpus() -> Vec<(&'static str, Endo)> {
    let shift = endo("x1 + 1; x2 - 2; x3 + 3");
    vec![
        ("identity", Endo::identity(3)),
        ("affine", endo("x2 + 1; x3 - x1; 2*x1")),
        ("triangular", endo("x1 + (x2 + x1^2)^2; x2 + x1^2; 2*x3 - x1*x2 + 1")),
        ("nagata", nagata()),
        ("nagata-permuted", nagata().permute_components(&[2, 0, 1])),
        ("nagata-shifted", tame_core::automorphism::compose(&nagata(), &shift).unwrap()),
        ("nagata-scaled", tame_core::automorphism::compose(&nagata(), &endo("2*x1; -x2; 1/3*x3")).unwrap()),
    ]
}

pub fn one() -> Rational {
    Rational::one()
}
