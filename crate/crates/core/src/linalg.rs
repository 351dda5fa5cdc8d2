//! Exact linear algebra over the rationals.
//!
//! Two independent solvers live here: a sparse fraction-free eliminator used
//! for the large membership systems, and a dense Gauss-Jordan routine that
//! returns the whole affine solution space for small parameter systems.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::poly::Rational;

/// A sparse linear system `A c = b` over the rationals.
#[derive(Debug, Clone, Default)]
pub struct LinearSystem {
    ncols: usize,
    rows: Vec<(Vec<(usize, Rational)>, Rational)>,
}

impl LinearSystem {
    pub fn new(ncols: usize) -> Self {
        LinearSystem { ncols, rows: Vec::new() }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    /// Adds the equation `sum coeffs[k].1 * c[coeffs[k].0] = rhs`.
    /// Rows that are identically `0 = 0` are dropped.
    pub fn push_row(&mut self, coeffs: Vec<(usize, Rational)>, rhs: Rational) {
        let coeffs: Vec<_> = coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if coeffs.is_empty() && rhs.is_zero() {
            return;
        }
        debug_assert!(coeffs.iter().all(|(j, _)| *j < self.ncols));
        self.rows.push((coeffs, rhs));
    }

    pub fn rows(&self) -> &[(Vec<(usize, Rational)>, Rational)] {
        &self.rows
    }

    /// Solves the system exactly. Free variables are set to zero, so the
    /// answer is deterministic for a fixed column order.
    pub fn solve(&self) -> Option<Vec<Rational>> {
        let mut elim = FractionFree::new(self.ncols);
        for (coeffs, rhs) in &self.rows {
            if !elim.insert(coeffs, rhs) {
                return None;
            }
        }
        Some(elim.back_substitute())
    }

    /// Rank of the coefficient matrix.
    pub fn rank(&self) -> usize {
        let mut elim = FractionFree::new(self.ncols);
        for (coeffs, _) in &self.rows {
            elim.insert(coeffs, &Rational::zero());
        }
        elim.pivots.len()
    }
}

type IntRow = Vec<(usize, BigInt)>;

/// Incremental row-echelon form with integer rows kept primitive.
struct FractionFree {
    ncols: usize,
    pivots: BTreeMap<usize, IntRow>,
}

fn to_integer_row(coeffs: &[(usize, Rational)], rhs: &Rational, rhs_col: usize) -> IntRow {
    let mut lcm = rhs.denom().clone();
    for (_, c) in coeffs {
        lcm = lcm.lcm(c.denom());
    }
    let mut row: IntRow = coeffs
        .iter()
        .map(|(j, c)| (*j, c.numer() * (&lcm / c.denom())))
        .collect();
    row.sort_by_key(|(j, _)| *j);
    if !rhs.is_zero() {
        row.push((rhs_col, rhs.numer() * (&lcm / rhs.denom())));
    }
    row
}

fn make_primitive(row: &mut IntRow) {
    let mut g = BigInt::zero();
    for (_, v) in row.iter() {
        g = g.gcd(v);
        if g.is_one() {
            return;
        }
    }
    if !g.is_zero() && !g.is_one() {
        for (_, v) in row.iter_mut() {
            *v /= &g;
        }
    }
}

/// `a * x - b * y` for sparse rows sorted by column.
fn combine(a: &BigInt, x: &IntRow, b: &BigInt, y: &IntRow) -> IntRow {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let cx = x.get(i).map(|e| e.0);
        let cy = y.get(j).map(|e| e.0);
        let (col, v) = match (cx, cy) {
            (Some(c1), Some(c2)) if c1 == c2 => {
                let v = a * &x[i].1 - b * &y[j].1;
                i += 1;
                j += 1;
                (c1, v)
            }
            (Some(c1), Some(c2)) if c1 < c2 => {
                let v = a * &x[i].1;
                i += 1;
                (c1, v)
            }
            (Some(c1), None) => {
                let v = a * &x[i].1;
                i += 1;
                (c1, v)
            }
            (_, Some(c2)) => {
                let v = -(b * &y[j].1);
                j += 1;
                (c2, v)
            }
            (None, None) => unreachable!(),
        };
        if !v.is_zero() {
            out.push((col, v));
        }
    }
    out
}

impl FractionFree {
    fn new(ncols: usize) -> Self {
        FractionFree { ncols, pivots: BTreeMap::new() }
    }

    /// Returns false if the row reduces to `0 = nonzero`.
    fn insert(&mut self, coeffs: &[(usize, Rational)], rhs: &Rational) -> bool {
        let mut row = to_integer_row(coeffs, rhs, self.ncols);
        make_primitive(&mut row);
        loop {
            let Some(&(lead, _)) = row.first() else { return true };
            if lead == self.ncols {
                return false;
            }
            match self.pivots.get(&lead) {
                Some(p) => {
                    let pv = &p[0].1;
                    let rv = &row[0].1;
                    let g = pv.gcd(rv);
                    let a = pv / &g;
                    let b = rv / &g;
                    row = combine(&a, &row, &b, p);
                    make_primitive(&mut row);
                }
                None => {
                    if row[0].1.is_negative() {
                        for (_, v) in row.iter_mut() {
                            *v = -&*v;
                        }
                    }
                    self.pivots.insert(lead, row);
                    return true;
                }
            }
        }
    }

    fn back_substitute(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.ncols];
        for (&col, row) in self.pivots.iter().rev() {
            let mut acc = Rational::zero();
            let mut lead = None;
            for (j, v) in row {
                if *j == col {
                    lead = Some(v.clone());
                } else if *j == self.ncols {
                    acc += Rational::from_integer(v.clone());
                } else {
                    acc -= Rational::from_integer(v.clone()) * &x[*j];
                }
            }
            x[col] = acc / Rational::from_integer(lead.expect("pivot entry"));
        }
        x
    }
}

/// Solution set `point + span(directions)` of a linear system.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineSpace {
    pub point: Vec<Rational>,
    pub directions: Vec<Vec<Rational>>,
}

impl AffineSpace {
    pub fn dimension(&self) -> usize {
        self.directions.len()
    }

    pub fn at(&self, t: &[Rational]) -> Vec<Rational> {
        let mut v = self.point.clone();
        for (d, tk) in self.directions.iter().zip(t) {
            for (vi, di) in v.iter_mut().zip(d) {
                *vi += di * tk;
            }
        }
        v
    }
}

/// Dense Gauss-Jordan elimination over the rationals returning the full
/// affine solution space, or `None` if the system is inconsistent.
pub fn solution_space(system: &LinearSystem) -> Option<AffineSpace> {
    let n = system.ncols;
    let mut m: Vec<Vec<Rational>> = system
        .rows
        .iter()
        .map(|(coeffs, rhs)| {
            let mut r = vec![Rational::zero(); n + 1];
            for (j, c) in coeffs {
                r[*j] += c;
            }
            r[n] = rhs.clone();
            r
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(k) = (r..m.len()).find(|&k| !m[k][c].is_zero()) else { continue };
        m.swap(r, k);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        for k in 0..m.len() {
            if k != r && !m[k][c].is_zero() {
                let f = m[k][c].clone();
                for j in c..=n {
                    let t = &m[r][j] * &f;
                    m[k][j] -= t;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    let mut point = vec![Rational::zero(); n];
    for (k, &c) in pivot_cols.iter().enumerate() {
        point[c] = m[k][n].clone();
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivot_cols.contains(c)).collect();
    let directions = free
        .iter()
        .map(|&fc| {
            let mut d = vec![Rational::zero(); n];
            d[fc] = Rational::one();
            for (k, &c) in pivot_cols.iter().enumerate() {
                d[c] = -m[k][fc].clone();
            }
            d
        })
        .collect();
    Some(AffineSpace { point, directions })
}
