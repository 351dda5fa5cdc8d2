//! Detectors for the four non-elementary reduction types.
//!
//! Each detector walks the six orderings of the components. For a fixed
//! ordering `(f1, f2, f3)` the free scalars enter `g1, g2` linearly and the
//! bracket-degree bounds are linear conditions on them; after solving those,
//! whatever freedom is left is either absent (direct check), a single line
//! (parametric scan over `Q[t]`) or larger (inconclusive).

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use super::{Config, DetectError, ReductionKind, ReductionStep};
use crate::automorphism::{ElementaryData, Endo};
use crate::degree::{bracket_degree, jacobian_minors, make_star_reduced, StarReducedPair};
use crate::linalg::{solution_space, LinearSystem};
use crate::param::{generic_point, ParamSystem};
use crate::poly::{Degree, Monomial, Polynomial, Rational};
use crate::subalgebra::{derivative_polynomial, top_membership, SubalgebraError};
use crate::unipoly::UniPoly;

pub(crate) const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

fn minors(a: &Polynomial, b: &Polynomial) -> Vec<Polynomial> {
    jacobian_minors(a, b, 3)
}

fn deg_of(p: &Polynomial) -> Degree {
    p.total_degree()
}

/// Rows `sum_k v_k cols[k][r]_mu = -base[r]_mu` for every monomial `mu` of
/// degree `>= min_deg` in any of the polynomials.
fn push_vanishing_rows(sys: &mut LinearSystem, base: &[Polynomial], cols: &[Vec<Polynomial>], min_deg: u32) {
    for r in 0..base.len() {
        let mut rows: BTreeMap<Monomial, Vec<(usize, Rational)>> = BTreeMap::new();
        for (k, col) in cols.iter().enumerate() {
            for (m, c) in col[r].terms() {
                if m.degree() >= min_deg {
                    rows.entry(m.clone()).or_default().push((k, c.clone()));
                }
            }
        }
        for (m, _) in base[r].terms() {
            if m.degree() >= min_deg {
                rows.entry(m.clone()).or_default();
            }
        }
        for (m, coeffs) in rows {
            sys.push_row(coeffs, -base[r].coefficient(&m));
        }
    }
}

fn vec_neg(a: &[Polynomial]) -> Vec<Polynomial> {
    a.iter().map(|x| -x).collect()
}

fn vec_add(a: &[Polynomial], b: &[Polynomial]) -> Vec<Polynomial> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn vec_mul(a: &[Polynomial], p: &Polynomial) -> Vec<Polynomial> {
    a.iter().map(|x| x * p).collect()
}

/// Rewrites letters given in role coordinates into actual coordinates,
/// applies them to `theta` and returns the reduced map together with the
/// path leading back to `theta`.
pub(crate) fn realize(theta: &Endo, perm: [usize; 3], forward: &[ElementaryData]) -> (Endo, Vec<ElementaryData>) {
    let actual: Vec<ElementaryData> = forward
        .iter()
        .filter(|e| !e.is_identity())
        .map(|e| ElementaryData { index: perm[e.index - 1] + 1, alpha: e.alpha.clone(), f: e.f.rename(3, &perm) })
        .collect();
    let reduced = actual.iter().fold(theta.clone(), |acc, e| acc.apply_elementary(e));
    let path = actual.iter().rev().map(ElementaryData::inverse).collect();
    (reduced, path)
}

fn var(i: usize) -> Polynomial {
    Polynomial::var(3, i)
}

fn letter(index: usize, f: Polynomial) -> ElementaryData {
    ElementaryData { index, alpha: Rational::one(), f }
}

/// A bivariate `G(x, y)` placed on role variables `x1, x2`.
fn on_first_two(g: &Polynomial) -> Polynomial {
    g.rename(3, &[0, 1])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Tag {
    I,
    II,
    III,
}

/// A family `g1 = f1 - sum v_k a_k(f3)`, `g2 = f2 - sum v_k b_k(f3)`.
struct Family<'a> {
    tag: Tag,
    theta: &'a Endo,
    perm: [usize; 3],
    f: [Polynomial; 3],
    n: u32,
    d1: u32,
    d2: u32,
    d3: u32,
    s: u32,
    /// shapes in the role variable `x3`
    a_shape: Vec<Polynomial>,
    b_shape: Vec<Polynomial>,
    a: Vec<Polynomial>,
    b: Vec<Polynomial>,
    bracket_bound: u32,
}

struct Found {
    v: Vec<Rational>,
    g: [Polynomial; 3],
    big_g: Polynomial,
}

impl<'a> Family<'a> {
    fn new(tag: Tag, theta: &'a Endo, perm: [usize; 3]) -> Option<Family<'a>> {
        let f = [theta.image(perm[0]).clone(), theta.image(perm[1]).clone(), theta.image(perm[2]).clone()];
        if f.iter().any(|p| p.total_degree() <= Degree::Finite(0)) {
            return None;
        }
        let (d1, d2, d3) = (f[0].deg(), f[1].deg(), f[2].deg());
        if d1 % 2 != 0 {
            return None;
        }
        let n = d1 / 2;
        let x3 = var(2);
        let zero = Polynomial::zero(3);
        let (s, a_shape, b_shape, bound) = match tag {
            Tag::I => {
                if d2 % n != 0 {
                    return None;
                }
                let s = d2 / n;
                if s < 3 || s % 2 == 0 || d3 <= 2 * n || d3 > d2 {
                    return None;
                }
                if top_membership(&f[2], &f[0], &f[1]).is_some() {
                    return None;
                }
                (s, vec![zero.clone()], vec![x3.clone()], 2 * n)
            }
            Tag::II => {
                if d2 != 3 * n || 2 * d3 <= 3 * n || d3 > 2 * n {
                    return None;
                }
                if d3 == d1 && crate::degree::power_multiple(&f[2].top(), &f[0].top()).is_some() {
                    return None;
                }
                (3, vec![x3.clone(), zero.clone()], vec![zero.clone(), x3.clone()], n)
            }
            Tag::III => {
                let first = d2 == 3 * n && d3 > n && 2 * d3 <= 3 * n;
                let second = 2 * d2 > 5 * n && d2 <= 3 * n && 2 * d3 == 3 * n;
                if !(first || second) {
                    return None;
                }
                (
                    3,
                    vec![x3.clone(), zero.clone(), zero.clone()],
                    vec![zero.clone(), x3.clone(), x3.pow(2)],
                    n / 2,
                )
            }
        };
        let a = a_shape.iter().map(|p| p.subst(&f)).collect();
        let b = b_shape.iter().map(|p| p.subst(&f)).collect();
        Some(Family { tag, theta, perm, f, n, d1, d2, d3, s, a_shape, b_shape, a, b, bracket_bound: bound })
    }

    fn nparams(&self) -> usize {
        self.a.len()
    }

    fn g_at(&self, v: &[Rational]) -> (Polynomial, Polynomial) {
        let mut g1 = self.f[0].clone();
        let mut g2 = self.f[1].clone();
        for k in 0..self.nparams() {
            g1.add_scaled(&self.a[k], &-v[k].clone());
            g2.add_scaled(&self.b[k], &-v[k].clone());
        }
        (g1, g2)
    }

    /// Linear conditions on the parameters: the bracket-degree bound and the
    /// algebraic dependence of the top parts.
    fn constraints(&self) -> Option<LinearSystem> {
        if self.bracket_bound < 2 {
            return None;
        }
        let k = self.nparams();
        let mut sys = LinearSystem::new(k);
        let base = minors(&self.f[0], &self.f[1]);
        let cols: Vec<Vec<Polynomial>> = (0..k)
            .map(|i| vec_neg(&vec_add(&minors(&self.a[i], &self.f[1]), &minors(&self.f[0], &self.b[i]))))
            .collect();
        for i in 0..k {
            for j in 0..k {
                debug_assert!(minors(&self.a[i], &self.b[j]).iter().all(Polynomial::is_zero));
            }
        }
        push_vanishing_rows(&mut sys, &base, &cols, self.bracket_bound - 1);

        let t1 = self.f[0].homogeneous_part(self.d1);
        let t2 = self.f[1].homogeneous_part(self.d2);
        let ta: Vec<Polynomial> = self.a.iter().map(|p| p.homogeneous_part(self.d1)).collect();
        let tb: Vec<Polynomial> = self.b.iter().map(|p| p.homogeneous_part(self.d2)).collect();
        let base = minors(&t1, &t2);
        let cols: Vec<Vec<Polynomial>> =
            (0..k).map(|i| vec_neg(&vec_add(&minors(&ta[i], &t2), &minors(&t1, &tb[i])))).collect();
        push_vanishing_rows(&mut sys, &base, &cols, 0);
        Some(sys)
    }

    fn search(&self, cfg: &Config) -> Result<Option<ReductionStep>, DetectError> {
        let Some(sys) = self.constraints() else { return Ok(None) };
        let Some(space) = solution_space(&sys) else { return Ok(None) };
        let found = match space.dimension() {
            0 => self.check_at(&space.point, cfg)?,
            1 => self.scan_line(&space.point, &space.directions[0], cfg)?,
            d => {
                return Err(DetectError::Inconclusive(format!(
                    "type {:?}: {d} free parameters after the linear conditions",
                    self.tag
                )))
            }
        };
        Ok(found.map(|fd| self.step(fd)))
    }

    fn reduction_threshold(&self, b: u32) -> u32 {
        match self.tag {
            Tag::III => self.d3.min(self.n + b),
            _ => self.d3,
        }
    }

    fn check_at(&self, v: &[Rational], cfg: &Config) -> Result<Option<Found>, DetectError> {
        if v.iter().all(Zero::is_zero) {
            return Ok(None);
        }
        let (g1, g2) = self.g_at(v);
        if deg_of(&g1) != Degree::Finite(self.d1) || deg_of(&g2) != Degree::Finite(self.d2) {
            return Ok(None);
        }
        let Degree::Finite(b) = bracket_degree(&g1, &g2) else { return Ok(None) };
        if b > self.bracket_bound {
            return Ok(None);
        }
        let Some(pair) = make_star_reduced(&g1, &g2) else { return Ok(None) };
        if pair.n != self.d1 || pair.p != 2 || pair.s != self.s {
            return Ok(None);
        }
        let thr = self.reduction_threshold(b);
        let bracket_limit = (self.tag != Tag::III).then_some(self.d2 + b);
        let Some(big_g) = solve_reduction(&pair, &self.f[2], thr, bracket_limit, cfg)? else { return Ok(None) };
        let g3 = &self.f[2] - &big_g.subst(&[g1.clone(), g2.clone()]);
        if g3.is_zero() || g3.deg() >= thr {
            return Err(DetectError::Assertion("reduction solve returned a non-reducing G".into()));
        }
        if let Some(limit) = bracket_limit {
            if bracket_degree(&g1, &g3) >= Degree::Finite(limit) {
                return Err(DetectError::Assertion("reduction solve violated the bracket condition".into()));
            }
        }
        Ok(Some(Found { v: v.to_vec(), g: [g1, g2, g3], big_g }))
    }

    fn step(&self, fd: Found) -> ReductionStep {
        let mut fa = Polynomial::zero(3);
        let mut fb = Polynomial::zero(3);
        for k in 0..self.nparams() {
            fa.add_scaled(&self.a_shape[k], &-fd.v[k].clone());
            fb.add_scaled(&self.b_shape[k], &-fd.v[k].clone());
        }
        let forward = [letter(1, fa), letter(2, fb), letter(3, -on_first_two(&fd.big_g))];
        let (reduced, path) = realize(self.theta, self.perm, &forward);
        let [g1, g2, g3] = fd.g;
        debug_assert_eq!(reduced.image(self.perm[0]), &g1);
        debug_assert_eq!(reduced.image(self.perm[2]), &g3);
        let g = [g1, g2, g3];
        let v = fd.v;
        let kind = match self.tag {
            Tag::I => ReductionKind::TypeI { beta: v[0].clone(), g },
            Tag::II => ReductionKind::TypeII { alpha: v[0].clone(), beta: v[1].clone(), g },
            Tag::III => {
                ReductionKind::TypeIII { alpha: v[0].clone(), beta1: v[1].clone(), beta2: v[2].clone(), g }
            }
        };
        ReductionStep { kind, roles: Some(self.perm), reduced, path }
    }

    /// One free parameter: `v = p0 + t d`. Solvability of the reduction
    /// system is analysed over `Q[t]`; the finitely many special values and
    /// one generic value are then checked exactly.
    fn scan_line(&self, p0: &[Rational], dir: &[Rational], cfg: &Config) -> Result<Option<Found>, DetectError> {
        let lift = |p: &Polynomial| p.rename(4, &[0, 1, 2]);
        let t = Polynomial::var(4, 3);
        let mut g1 = lift(&self.f[0]);
        let mut g2 = lift(&self.f[1]);
        let mut avoid: Vec<UniPoly> = Vec::new();
        let mut v_gcd = UniPoly::zero();
        for k in 0..self.nparams() {
            let vk = &Polynomial::constant(4, p0[k].clone()) + &t.scale(&dir[k]);
            g1 = &g1 - &(&vk * &lift(&self.a[k]));
            g2 = &g2 - &(&vk * &lift(&self.b[k]));
            v_gcd = v_gcd.gcd(&UniPoly::linear(p0[k].clone(), dir[k].clone()));
        }
        avoid.push(v_gcd);
        for (g, d) in [(&g1, self.d1), (&g2, self.d2)] {
            let top = gcd_at_x_degree(&by_x(g), d);
            if top.is_zero() {
                return Ok(None);
            }
            avoid.push(top);
        }
        let m12: Vec<Polynomial> = jacobian_minors(&g1, &g2, 3);
        let grouped: Vec<BTreeMap<Monomial, UniPoly>> = m12.iter().map(by_x).collect();
        let Some(dtop) = grouped.iter().flat_map(|g| g.keys().map(Monomial::degree)).max() else {
            return Ok(None);
        };
        let b_gen = dtop + 2;
        let drop = grouped.iter().fold(UniPoly::zero(), |acc, g| acc.gcd(&gcd_at_x_degree(g, dtop)));
        let big_n = self.d2 as i64 - self.d1 as i64 + b_gen as i64;
        if big_n <= 0 {
            return Err(DetectError::Assertion("non-positive degree step for a *-reduced family".into()));
        }
        let q = (self.d3 as i64 / big_n) as u32 + 1;
        let (bx, by) = (self.s * q - 1, 2 * q - 1);
        let thr = self.reduction_threshold(b_gen);
        let cols: Vec<(u32, u32)> = (0..=bx)
            .flat_map(|i| (0..=by).map(move |j| (i, j)))
            .filter(|&(i, j)| i * self.d1 + j * self.d2 >= thr)
            .collect();
        if cols.len() > cfg.detector_budget {
            return Err(DetectError::Inconclusive(format!(
                "type {:?}: parametric system with {} unknowns exceeds the detector budget",
                self.tag,
                cols.len()
            )));
        }
        if let Some(maxdeg) = cols.iter().map(|&(i, j)| i * self.d1 + j * self.d2).max() {
            if maxdeg > cfg.budget {
                return Err(DetectError::Inconclusive(format!("type {:?}: products of degree {maxdeg}", self.tag)));
            }
        }
        let f3 = lift(&self.f[2]);
        let mut pow1 = vec![Polynomial::one(4)];
        let mut pow2 = vec![Polynomial::one(4)];
        for _ in 0..bx {
            let next = pow1.last().unwrap() * &g1;
            pow1.push(next);
        }
        for _ in 0..by {
            let next = pow2.last().unwrap() * &g2;
            pow2.push(next);
        }
        let mut rows: BTreeMap<(usize, Monomial), Vec<(usize, UniPoly)>> = BTreeMap::new();
        let mut rhs: HashMap<(usize, Monomial), UniPoly> = HashMap::new();
        for (k, &(i, j)) in cols.iter().enumerate() {
            let prod = &pow1[i as usize] * &pow2[j as usize];
            for (m, c) in by_x(&prod) {
                if m.degree() >= thr {
                    rows.entry((0, m)).or_default().push((k, c));
                }
            }
        }
        for (m, c) in by_x(&f3) {
            if m.degree() >= thr {
                rows.entry((0, m.clone())).or_default();
                rhs.insert((0, m), c);
            }
        }
        if self.tag != Tag::III {
            let lim = self.d2 + b_gen - 2;
            let base = jacobian_minors(&g1, &f3, 3);
            for (k, &(i, j)) in cols.iter().enumerate() {
                if j == 0 {
                    continue;
                }
                let mult = (&pow1[i as usize] * &pow2[j as usize - 1]).scale(&Rational::from_integer(j.into()));
                for (r, mr) in m12.iter().enumerate() {
                    for (m, c) in by_x(&(&mult * mr)) {
                        if m.degree() >= lim {
                            rows.entry((r + 1, m)).or_default().push((k, c));
                        }
                    }
                }
            }
            for (r, br) in base.iter().enumerate() {
                for (m, c) in by_x(br) {
                    if m.degree() >= lim {
                        rows.entry((r + 1, m.clone())).or_default();
                        rhs.insert((r + 1, m), c);
                    }
                }
            }
        }
        let mut psys = ParamSystem::new(cols.len());
        for (key, coeffs) in rows {
            let r = rhs.remove(&key).unwrap_or_default();
            psys.push_row(coeffs, r);
        }
        let analysis = psys.analyze();
        let mut candidates = analysis.special_points();
        if !drop.is_zero() && !drop.is_constant() {
            candidates.extend(drop.rational_roots());
        }
        candidates.sort();
        candidates.dedup();
        if analysis.generically_solvable() {
            let mut all_avoid = avoid.clone();
            all_avoid.extend(analysis.exceptional.iter().cloned());
            all_avoid.push(drop.clone());
            let t0 = generic_point(&all_avoid);
            if !candidates.contains(&t0) {
                candidates.push(t0);
            }
        }
        for tv in candidates {
            let v: Vec<Rational> = p0.iter().zip(dir).map(|(a, d)| a + d * &tv).collect();
            if let Some(fd) = self.check_at(&v, cfg)? {
                return Ok(Some(fd));
            }
        }
        Ok(None)
    }
}

/// Group a polynomial in `x1, x2, x3, t` by its `x`-monomial.
fn by_x(p: &Polynomial) -> BTreeMap<Monomial, UniPoly> {
    let mut acc: BTreeMap<Monomial, Vec<Rational>> = BTreeMap::new();
    for (m, c) in p.terms() {
        let e = m.exponents();
        let key = Monomial::from_exponents(&e[..3]);
        let slot = acc.entry(key).or_default();
        let k = e[3] as usize;
        if slot.len() <= k {
            slot.resize(k + 1, Rational::zero());
        }
        slot[k] += c;
    }
    acc.into_iter()
        .map(|(m, v)| (m, UniPoly::from_coeffs(v)))
        .filter(|(_, u)| !u.is_zero())
        .collect()
}

fn gcd_at_x_degree(g: &BTreeMap<Monomial, UniPoly>, d: u32) -> UniPoly {
    g.iter().filter(|(m, _)| m.degree() == d).fold(UniPoly::zero(), |acc, (_, u)| acc.gcd(u))
}

/// `G` with `deg(h - G(f, g)) < thr` and, when `bracket_limit = L` is given,
/// `deg [f, h - G(f, g)] < L`. Unknowns are the coefficients of `G` inside
/// the support box for `deg G(f, g) <= deg h`.
pub(crate) fn solve_reduction(
    pair: &StarReducedPair,
    h: &Polynomial,
    thr: u32,
    bracket_limit: Option<u32>,
    cfg: &Config,
) -> Result<Option<Polynomial>, DetectError> {
    let d = h.deg();
    let (bx, by) = pair.support_bounds(d);
    let cols: Vec<(u32, u32)> = (0..=bx)
        .flat_map(|i| (0..=by).map(move |j| (i, j)))
        .filter(|&(i, j)| i * pair.n + j * pair.m >= thr)
        .collect();
    if let Some(maxdeg) = cols.iter().map(|&(i, j)| i * pair.n + j * pair.m).max() {
        if maxdeg > cfg.budget {
            return Err(DetectError::Inconclusive(format!(
                "reduction system needs products of degree {maxdeg} > budget {}",
                cfg.budget
            )));
        }
    }
    let (f, g) = (&pair.f, &pair.g);
    let mut pf = vec![Polynomial::one(3)];
    let mut pg = vec![Polynomial::one(3)];
    for _ in 0..bx {
        let next = pf.last().unwrap() * f;
        pf.push(next);
    }
    for _ in 0..by {
        let next = pg.last().unwrap() * g;
        pg.push(next);
    }
    let mut rows: BTreeMap<(usize, Monomial), Vec<(usize, Rational)>> = BTreeMap::new();
    for (k, &(i, j)) in cols.iter().enumerate() {
        let prod = &pf[i as usize] * &pg[j as usize];
        for (m, c) in prod.terms().rev() {
            if m.degree() < thr {
                break;
            }
            rows.entry((0, m.clone())).or_default().push((k, c.clone()));
        }
    }
    let mut rhs: HashMap<(usize, Monomial), Rational> = HashMap::new();
    for (m, c) in h.terms() {
        if m.degree() >= thr {
            rows.entry((0, m.clone())).or_default();
            rhs.insert((0, m.clone()), c.clone());
        }
    }
    if let Some(limit) = bracket_limit {
        let lim = limit.saturating_sub(2);
        let mfg = minors(f, g);
        for (k, &(i, j)) in cols.iter().enumerate() {
            if j == 0 {
                continue;
            }
            let mult = (&pf[i as usize] * &pg[j as usize - 1]).scale(&Rational::from_integer(j.into()));
            for (r, mr) in mfg.iter().enumerate() {
                let term = &mult * mr;
                for (m, c) in term.terms().rev() {
                    if m.degree() < lim {
                        break;
                    }
                    rows.entry((r + 1, m.clone())).or_default().push((k, c.clone()));
                }
            }
        }
        for (r, br) in minors(f, h).iter().enumerate() {
            for (m, c) in br.terms() {
                if m.degree() >= lim {
                    rows.entry((r + 1, m.clone())).or_default();
                    rhs.insert((r + 1, m.clone()), c.clone());
                }
            }
        }
    }
    let mut sys = LinearSystem::new(cols.len());
    for (key, coeffs) in rows {
        let r = rhs.remove(&key).unwrap_or_else(Rational::zero);
        sys.push_row(coeffs, r);
    }
    Ok(sys.solve().map(|sol| {
        Polynomial::from_terms(
            2,
            cols.iter().zip(sol).map(|(&(i, j), c)| (Monomial::from_exponents(&[i, j]), c)),
        )
    }))
}

pub(crate) fn find_family(tag_index: u8, theta: &Endo, cfg: &Config) -> Result<Option<ReductionStep>, DetectError> {
    let tag = match tag_index {
        1 => Tag::I,
        2 => Tag::II,
        _ => Tag::III,
    };
    let mut inconclusive: Option<DetectError> = None;
    for perm in PERMS {
        let Some(fam) = Family::new(tag, theta, perm) else { continue };
        match fam.search(cfg) {
            Ok(Some(step)) => return Ok(Some(step)),
            Ok(None) => {}
            Err(e @ DetectError::Assertion(_)) => return Err(e),
            Err(e) => inconclusive = inconclusive.or(Some(e)),
        }
    }
    match inconclusive {
        Some(e) => Err(e),
        None => Ok(None),
    }
}

/// Parameters of the fourth type, in the order
/// `alpha1, alpha2, beta1, beta2, beta3, beta4`.
pub(crate) struct TypeIv<'a> {
    theta: &'a Endo,
    perm: [usize; 3],
    f: [Polynomial; 3],
    n: u32,
    /// `deg [g1, g2]`, forced to equal `deg [f1, f3] - 3n`
    b: u32,
}

impl<'a> TypeIv<'a> {
    /// Degree screens that every instance must pass for the given `n`.
    pub(crate) fn new(theta: &'a Endo, perm: [usize; 3], n: u32) -> Option<TypeIv<'a>> {
        let f = [theta.image(perm[0]).clone(), theta.image(perm[1]).clone(), theta.image(perm[2]).clone()];
        if n == 0 || n % 2 != 0 || f.iter().any(|p| p.total_degree() <= Degree::Finite(0)) {
            return None;
        }
        let (d1, d2, d3) = (f[0].deg(), f[1].deg(), f[2].deg());
        let total = d1 + d2 + d3;
        if 2 * d3 > 3 * n || 2 * total > 13 * n || 2 * n > d1 || 2 * d1 >= 5 * n || 2 * d2 >= 7 * n || d2 + d3 <= 4 * n {
            return None;
        }
        let Degree::Finite(b13) = bracket_degree(&f[0], &f[2]) else { return None };
        if b13 <= 3 * n {
            return None;
        }
        let b = b13 - 3 * n;
        if b < 2 || 2 * b > n || d3 < n + b || 2 * d2 < 5 * n + 2 * b {
            return None;
        }
        if bracket_degree(&f[1], &f[2]) <= Degree::Finite(3 * n) {
            return None;
        }
        Some(TypeIv { theta, perm, f, n, b })
    }

    /// Linear system in `(alpha1, alpha2, beta1, beta3, beta4, B2, B4)` with
    /// `B2 = 2 beta2 + alpha1 beta3` and `B4 = 3 beta4 + 2 alpha2 beta3`.
    pub(crate) fn constraints(&self) -> LinearSystem {
        let [f1, f2, f3] = &self.f;
        let n = self.n;
        let zero = Polynomial::zero(3);
        let f3sq = f3.pow(2);
        let mut sys = LinearSystem::new(7);
        // deg g1 <= 2n
        let mut cols = vec![vec![zero.clone()]; 7];
        cols[0] = vec![-f3];
        cols[1] = vec![-&f3sq];
        push_vanishing_rows(&mut sys, std::slice::from_ref(f1), &cols, 2 * n + 1);
        // deg g2 <= 3n
        let mut cols = vec![vec![zero.clone()]; 7];
        cols[2] = vec![-f3];
        cols[3] = vec![-&(f1 * f3)];
        cols[4] = vec![-&(&f3sq * f3)];
        push_vanishing_rows(&mut sys, std::slice::from_ref(f2), &cols, 3 * n + 1);
        // deg [g1, g2] <= b
        let m12 = minors(f1, f2);
        let m13 = minors(f1, f3);
        let m32 = minors(f3, f2);
        let cols = vec![
            vec_neg(&m32),
            vec_neg(&vec_mul(&m32, &f3.scale(&Rational::from_integer(2.into())))),
            vec_neg(&m13),
            vec_neg(&vec_mul(&m13, f1)),
            vec![zero.clone(), zero.clone(), zero],
            vec_neg(&vec_mul(&m13, f3)),
            vec_neg(&vec_mul(&m13, &f3sq)),
        ];
        push_vanishing_rows(&mut sys, &m12, &cols, self.b.saturating_sub(1));
        sys
    }

    /// Recover the six coefficients from a solution of [`Self::constraints`].
    pub(crate) fn coefficients(sol: &[Rational]) -> Option<[Rational; 6]> {
        let (a1, a2, b1, b3, b4, big2, big4) =
            (&sol[0], &sol[1], &sol[2], &sol[3], &sol[4], &sol[5], &sol[6]);
        let two = Rational::from_integer(2.into());
        let three = Rational::from_integer(3.into());
        let b2 = (big2 - a1 * b3) / &two;
        if *big4 != &three * b4 + &two * a2 * b3 {
            return None;
        }
        Some([a1.clone(), a2.clone(), b1.clone(), b2, b3.clone(), b4.clone()])
    }

    pub(crate) fn g_at(&self, c: &[Rational; 6]) -> (Polynomial, Polynomial) {
        let [f1, f2, f3] = &self.f;
        let f3sq = f3.pow(2);
        let mut g1 = f1.clone();
        g1.add_scaled(f3, &-c[0].clone());
        g1.add_scaled(&f3sq, &-c[1].clone());
        let mut g2 = f2.clone();
        g2.add_scaled(f3, &-c[2].clone());
        g2.add_scaled(&f3sq, &-c[3].clone());
        g2.add_scaled(&(f1 * f3), &-c[4].clone());
        g2.add_scaled(&(&f3sq * f3), &-c[5].clone());
        (g1, g2)
    }

    /// Literal check of the definition at fixed coefficients.
    pub(crate) fn check_at(&self, c: &[Rational; 6]) -> Result<Option<ReductionStep>, DetectError> {
        let n = self.n;
        let (g1, g2) = self.g_at(c);
        if deg_of(&g1) != Degree::Finite(2 * n) || deg_of(&g2) != Degree::Finite(3 * n) {
            return Ok(None);
        }
        let Degree::Finite(b) = bracket_degree(&g1, &g2) else { return Ok(None) };
        if b != self.b {
            return Ok(None);
        }
        let Some(pair) = make_star_reduced(&g1, &g2) else { return Ok(None) };
        if pair.n != 2 * n || pair.p != 2 || pair.s != 3 {
            return Ok(None);
        }
        let w = match derivative_polynomial(&pair) {
            Ok(w) => w,
            Err(SubalgebraError::Inconclusive(r)) => return Err(DetectError::Inconclusive(r)),
            Err(e) => return Err(DetectError::Assertion(e.to_string())),
        };
        if 2 * w.value.deg() > 3 * n {
            return Ok(None);
        }
        let f3 = &self.f[2];
        let m_w = minors(&g1, &w.value);
        let m_f = minors(&g1, f3);
        let Some(gamma) = top_ratio(&m_f, &m_w) else { return Ok(None) };
        let g3 = f3 - &w.value.scale(&gamma);
        if g3.is_zero() || 2 * g3.deg() != 3 * n {
            return Ok(None);
        }
        if bracket_degree(&g1, &g3) >= Degree::Finite(3 * n + b) {
            return Ok(None);
        }
        let sq = g3.pow(2);
        let mu = g2.leading_term().unwrap().1 / sq.leading_term().unwrap().1;
        let rest = &g2 - &sq.scale(&mu);
        if rest.total_degree() > Degree::Finite(2 * n) {
            return Ok(None);
        }
        let x = [var(0), var(1), var(2)];
        let e1 = {
            let mut p = x[2].scale(&-c[0].clone());
            p.add_scaled(&x[2].pow(2), &-c[1].clone());
            p
        };
        let e2 = {
            let f1_now = &(&x[0] + &x[2].scale(&c[0])) + &x[2].pow(2).scale(&c[1]);
            let mut p = x[2].scale(&-c[2].clone());
            p.add_scaled(&x[2].pow(2), &-c[3].clone());
            p.add_scaled(&(&f1_now * &x[2]), &-c[4].clone());
            p.add_scaled(&x[2].pow(3), &-c[5].clone());
            p
        };
        let e3 = on_first_two(&w.w).scale(&-gamma.clone());
        let e4 = x[2].pow(2).scale(&-mu.clone());
        let forward = [letter(1, e1), letter(2, e2), letter(3, e3), letter(2, e4)];
        let (reduced, path) = realize(self.theta, self.perm, &forward);
        debug_assert_eq!(reduced.image(self.perm[1]), &rest);
        let [a1, a2, b1, b2, b3, b4] = c.clone();
        let kind = ReductionKind::TypeIV {
            alpha1: a1,
            alpha2: a2,
            beta1: b1,
            beta2: b2,
            beta3: b3,
            beta4: b4,
            gamma,
            mu,
            g: [g1, g2, g3],
        };
        Ok(Some(ReductionStep { kind, roles: Some(self.perm), reduced, path }))
    }

    pub(crate) fn search(&self) -> Result<Option<ReductionStep>, DetectError> {
        let sys = self.constraints();
        let Some(space) = solution_space(&sys) else { return Ok(None) };
        if space.dimension() > 0 {
            return Err(DetectError::Inconclusive(format!(
                "type IV: {} free parameters after the linear conditions",
                space.dimension()
            )));
        }
        let again = sys.solve().ok_or_else(|| DetectError::Assertion("type IV re-solve inconsistent".into()))?;
        if again != space.point {
            return Err(DetectError::Assertion("type IV coefficients not unique".into()));
        }
        let Some(c) = Self::coefficients(&space.point) else { return Ok(None) };
        let found = self.check_at(&c)?;
        if found.is_some() && c.iter().any(|x| !x.is_zero()) {
            let [f1, f2, _] = &self.f;
            if bracket_degree(f1, f2) <= Degree::Finite(3 * self.n) {
                return Err(DetectError::Assertion("nonzero type IV coefficients with deg[f1,f2] <= 3n".into()));
            }
        }
        Ok(found)
    }

    /// Candidate values of `n` for a given ordering.
    pub(crate) fn candidate_ns(theta: &Endo, perm: [usize; 3]) -> Vec<u32> {
        let d1 = theta.image(perm[0]).total_degree();
        let Degree::Finite(d1) = d1 else { return Vec::new() };
        (1..=d1 / 2).filter(|n| n % 2 == 0 && 2 * d1 < 5 * n).collect()
    }
}

/// `gamma` with `top(a) = gamma * top(b)` for vectors of minors compared at
/// the top degree of `b`.
fn top_ratio(a: &[Polynomial], b: &[Polynomial]) -> Option<Rational> {
    let db = b.iter().map(deg_of).max()?;
    let da = a.iter().map(deg_of).max()?;
    let Degree::Finite(d) = db else { return None };
    if da != db {
        return None;
    }
    let ta: Vec<Polynomial> = a.iter().map(|p| p.homogeneous_part(d)).collect();
    let tb: Vec<Polynomial> = b.iter().map(|p| p.homogeneous_part(d)).collect();
    let (k, lead) = tb.iter().enumerate().find_map(|(k, p)| p.leading_term().map(|(_, c)| (k, c.clone())))?;
    let lead_a = ta[k].leading_term().map(|(m, c)| (m.clone(), c.clone()));
    let (ma, ca) = lead_a?;
    if tb[k].leading_term().map(|(m, _)| m.clone()) != Some(ma) {
        return None;
    }
    let gamma = ca / lead;
    let ok = ta.iter().zip(&tb).all(|(x, y)| *x == y.scale(&gamma));
    (ok && !gamma.is_zero()).then_some(gamma)
}

pub(crate) fn find_type_iv(theta: &Endo) -> Result<Option<ReductionStep>, DetectError> {
    let mut inconclusive: Option<DetectError> = None;
    for perm in PERMS {
        for n in TypeIv::candidate_ns(theta, perm) {
            let Some(det) = TypeIv::new(theta, perm, n) else { continue };
            match det.search() {
                Ok(Some(step)) => return Ok(Some(step)),
                Ok(None) => {}
                Err(e @ DetectError::Assertion(_)) => return Err(e),
                Err(e) => inconclusive = inconclusive.or(Some(e)),
            }
        }
    }
    match inconclusive {
        Some(e) => Err(e),
        None => Ok(None),
    }
}

/// Orderings on which each detector's degree and top-part screens pass.
pub(crate) fn screen(theta: &Endo) -> Vec<(&'static str, [usize; 3])> {
    let mut out = Vec::new();
    for (name, tag) in [("I", Tag::I), ("II", Tag::II), ("III", Tag::III)] {
        for perm in PERMS {
            if Family::new(tag, theta, perm).is_some() {
                out.push((name, perm));
            }
        }
    }
    for perm in PERMS {
        if TypeIv::candidate_ns(theta, perm).into_iter().any(|n| TypeIv::new(theta, perm, n).is_some()) {
            out.push(("IV", perm));
        }
    }
    out
}
