//! Linear systems whose entries are univariate polynomials in a parameter `t`.
//!
//! Elimination runs over `Q[t]` without division. Every polynomial a row is
//! multiplied or divided by is recorded: outside the common roots of those
//! polynomials the specialized system has the same echelon form as the
//! generic one, so its solvability is decided by the leftover residues.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::poly::Rational;
use crate::unipoly::UniPoly;

type Row = Vec<(usize, UniPoly)>;

#[derive(Debug, Clone, Default)]
pub struct ParamSystem {
    ncols: usize,
    rows: Vec<Row>,
}

/// Outcome of generic elimination.
#[derive(Debug, Clone)]
pub struct ParamAnalysis {
    pub generic_rank: usize,
    /// Polynomials whose rational roots are points where the specialized
    /// system may behave differently from the generic one.
    pub exceptional: Vec<UniPoly>,
    /// `None` when the system is solvable for generic `t`; otherwise the gcd
    /// of the residues, whose roots are the only other places it can be.
    pub residue_gcd: Option<UniPoly>,
}

impl ParamSystem {
    pub fn new(ncols: usize) -> Self {
        ParamSystem { ncols, rows: Vec::new() }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    /// Adds `sum coeffs * c = rhs`.
    pub fn push_row(&mut self, coeffs: Vec<(usize, UniPoly)>, rhs: UniPoly) {
        let mut row: Row = coeffs.into_iter().filter(|(_, p)| !p.is_zero()).collect();
        row.sort_by_key(|(j, _)| *j);
        if !rhs.is_zero() {
            row.push((self.ncols, rhs));
        }
        if !row.is_empty() {
            self.rows.push(row);
        }
    }

    pub fn analyze(&self) -> ParamAnalysis {
        let mut pivots: BTreeMap<usize, Row> = BTreeMap::new();
        let mut exceptional: Vec<UniPoly> = Vec::new();
        let mut residue: Option<UniPoly> = None;
        let note = |p: &UniPoly, exc: &mut Vec<UniPoly>| {
            if !p.is_constant() {
                let m = p.monic();
                if !exc.contains(&m) {
                    exc.push(m);
                }
            }
        };
        for row in &self.rows {
            let mut row = row.clone();
            loop {
                let Some((lead, _)) = row.first() else { break };
                let lead = *lead;
                if lead == self.ncols {
                    let r = row[0].1.clone();
                    residue = Some(match residue {
                        None => r.monic(),
                        Some(g) => g.gcd(&r),
                    });
                    break;
                }
                match pivots.get(&lead) {
                    Some(piv) => {
                        let g = piv[0].1.gcd(&row[0].1);
                        let a = piv[0].1.exact_div(&g).unwrap();
                        let b = row[0].1.exact_div(&g).unwrap();
                        note(&a, &mut exceptional);
                        row = combine(&a, &row, &b, piv);
                        remove_content(&mut row, &mut exceptional, &note);
                    }
                    None => {
                        note(&row[0].1, &mut exceptional);
                        pivots.insert(lead, row);
                        break;
                    }
                }
            }
        }
        ParamAnalysis { generic_rank: pivots.len(), exceptional, residue_gcd: residue }
    }
}

fn combine(a: &UniPoly, x: &Row, b: &UniPoly, y: &Row) -> Row {
    let mut acc: BTreeMap<usize, UniPoly> = BTreeMap::new();
    for (j, v) in x {
        acc.insert(*j, a * v);
    }
    for (j, v) in y {
        let e = acc.entry(*j).or_default();
        *e = &*e - &(b * v);
    }
    acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

fn remove_content(row: &mut Row, exc: &mut Vec<UniPoly>, note: &impl Fn(&UniPoly, &mut Vec<UniPoly>)) {
    let mut g = UniPoly::zero();
    for (_, v) in row.iter() {
        g = g.gcd(v);
        if g.is_constant() {
            break;
        }
    }
    if !g.is_constant() {
        note(&g, exc);
        for (_, v) in row.iter_mut() {
            *v = v.exact_div(&g).unwrap();
        }
    }
}

impl ParamAnalysis {
    pub fn generically_solvable(&self) -> bool {
        self.residue_gcd.is_none()
    }

    /// Every rational `t` at which the system can be solvable while the
    /// generic analysis does not already cover it.
    pub fn special_points(&self) -> Vec<Rational> {
        let mut out: Vec<Rational> = Vec::new();
        for p in &self.exceptional {
            out.extend(p.rational_roots());
        }
        if let Some(r) = &self.residue_gcd {
            if !r.is_zero() && !r.is_constant() {
                out.extend(r.rational_roots());
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

/// Smallest integer `t >= 1` (then `t <= -1`) at which none of `avoid` vanishes.
pub fn generic_point(avoid: &[UniPoly]) -> Rational {
    let bad = |t: &Rational| avoid.iter().any(|p| !p.is_zero() && p.eval(t).is_zero());
    let mut k: i64 = 1;
    loop {
        for cand in [Rational::from_integer(k.into()), Rational::from_integer((-k).into())] {
            if !bad(&cand) {
                return cand;
            }
        }
        k += 1;
    }
}
