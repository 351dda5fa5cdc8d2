//! Membership questions for two-generated subalgebras `<f, g>`.
//!
//! Bivariate expressions `G(x, y)` are ordinary [`Polynomial`]s in two
//! variables; `x` stands for the first generator and `y` for the second.

use std::collections::HashMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::degree::{algebraically_dependent, make_star_reduced, power_multiple, StarReducedPair};
use crate::linalg::LinearSystem;
use crate::poly::{Degree, Monomial, Polynomial, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubalgebraError {
    /// The search space needed for an exhaustive answer exceeds the budget.
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    /// A post-condition guaranteed by the theory failed; indicates a kernel bug.
    #[error("derivative polynomial invariant violated: {0}")]
    DerivativeInvariant(String),
    #[error("low-degree membership inconsistent: {0}")]
    LowDegree(String),
}

/// `G(x, y)` with `value = G(f, g)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipWitness {
    pub expression: Polynomial,
    pub value: Polynomial,
}

impl MembershipWitness {
    /// Recomputes `G(f, g)` and compares it with the stored value.
    pub fn verify(&self, f: &Polynomial, g: &Polynomial) -> bool {
        self.expression.subst(&[f.clone(), g.clone()]) == self.value
    }
}

fn xy(i: u32, j: u32) -> Monomial {
    Monomial::from_exponents(&[i, j])
}

/// Products `f^i g^j`, built incrementally and cached.
struct Products<'a> {
    f: &'a Polynomial,
    g: &'a Polynomial,
    cache: HashMap<(u32, u32), Polynomial>,
}

impl<'a> Products<'a> {
    fn new(f: &'a Polynomial, g: &'a Polynomial) -> Self {
        let mut cache = HashMap::new();
        cache.insert((0, 0), Polynomial::one(f.nvars()));
        Products { f, g, cache }
    }

    fn get(&mut self, i: u32, j: u32) -> &Polynomial {
        if !self.cache.contains_key(&(i, j)) {
            let v = if j > 0 {
                let prev = self.get(i, j - 1).clone();
                &prev * self.g
            } else {
                let prev = self.get(i - 1, 0).clone();
                &prev * self.f
            };
            self.cache.insert((i, j), v);
        }
        &self.cache[&(i, j)]
    }
}

/// Exponent pairs `(a, b)` with `a * df + b * dg = d`.
fn weighted_pairs(d: u32, df: u32, dg: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    match (df, dg) {
        (0, 0) => {
            if d == 0 {
                out.push((0, 0));
            }
        }
        (0, _) => {
            if d % dg == 0 {
                out.push((0, d / dg));
            }
        }
        (_, 0) => {
            if d % df == 0 {
                out.push((d / df, 0));
            }
        }
        _ => {
            for a in 0..=d / df {
                let rest = d - a * df;
                if rest % dg == 0 {
                    out.push((a, rest / dg));
                }
            }
        }
    }
    out
}

/// Solve `target = sum c_ab * u^a v^b` over the given exponent pairs, matching
/// every coefficient of every polynomial involved.
fn solve_combination(
    target: &Polynomial,
    pairs: &[(u32, u32)],
    products: &[Polynomial],
) -> Option<Vec<Rational>> {
    let mut rows: std::collections::BTreeMap<Monomial, Vec<(usize, Rational)>> = Default::default();
    for (k, prod) in products.iter().enumerate() {
        for (m, c) in prod.terms() {
            rows.entry(m.clone()).or_default().push((k, c.clone()));
        }
    }
    for (m, _) in target.terms() {
        rows.entry(m.clone()).or_default();
    }
    let mut sys = LinearSystem::new(pairs.len());
    for (m, coeffs) in rows {
        sys.push_row(coeffs, target.coefficient(&m));
    }
    sys.solve()
}

/// Decides whether `top(h) = sum c_ab top(f)^a top(g)^b` with
/// `a deg f + b deg g = deg h`. The witness is expressed on the top parts.
pub fn top_membership(h: &Polynomial, f: &Polynomial, g: &Polynomial) -> Option<MembershipWitness> {
    if h.is_zero() || f.is_zero() || g.is_zero() {
        return None;
    }
    let (th, tf, tg) = (h.top(), f.top(), g.top());
    let pairs = weighted_pairs(h.deg(), f.deg(), g.deg());
    if pairs.is_empty() {
        return None;
    }
    let products: Vec<Polynomial> = pairs.iter().map(|&(a, b)| &tf.pow(a) * &tg.pow(b)).collect();
    let coeffs = solve_combination(&th, &pairs, &products)?;
    let expression = Polynomial::from_terms(2, pairs.iter().zip(coeffs).map(|(&(a, b), c)| (xy(a, b), c)));
    Some(MembershipWitness { expression, value: th })
}

/// Working generator: a polynomial and its expression in the original pair.
#[derive(Clone)]
struct Gen {
    poly: Polynomial,
    expr: Polynomial,
}

/// One-step elementary reduction of `h` modulo `<f, g>`: returns `(q, h - q)`
/// with `q` in the subalgebra and `deg(h - q) < deg h`, or `None` when no
/// element of `<f, g>` has top part `top(h)`.
///
/// `budget` caps the degree of the products `f^i g^j` the exhaustive search
/// may have to form; exceeding it yields [`SubalgebraError::Inconclusive`].
pub fn reduce_against(
    h: &Polynomial,
    f: &Polynomial,
    g: &Polynomial,
    budget: u32,
) -> Result<Option<(MembershipWitness, Polynomial)>, SubalgebraError> {
    if h.total_degree() <= Degree::Finite(0) {
        return Ok(None);
    }
    let d = h.deg();
    if budget < d {
        return Err(SubalgebraError::Inconclusive(format!("budget {budget} below degree {d}")));
    }
    let mut u = Gen { poly: f.clone(), expr: Polynomial::var(2, 0) };
    let mut v = Gen { poly: g.clone(), expr: Polynomial::var(2, 1) };

    // Make the pair reduced: strip powers of the lower top from the higher one.
    loop {
        if u.poly.total_degree() <= Degree::Finite(0) || v.poly.total_degree() <= Degree::Finite(0) {
            break;
        }
        let (lo, hi) = if u.poly.deg() <= v.poly.deg() { (&u, &mut v) } else { (&v, &mut u) };
        match power_multiple(&hi.poly.top(), &lo.poly.top()) {
            Some((c, k)) => {
                hi.poly = &hi.poly - &lo.poly.pow(k).scale(&c);
                hi.expr = &hi.expr - &lo.expr.pow(k).scale(&c);
            }
            None => break,
        }
    }

    let finish = |coeffs: Vec<(u32, u32, Rational)>, u: &Gen, v: &Gen| {
        let mut expression = Polynomial::zero(2);
        let mut value = Polynomial::zero(h.nvars());
        for (a, b, c) in coeffs {
            expression.add_scaled(&(&u.expr.pow(a) * &v.expr.pow(b)), &c);
            value.add_scaled(&(&u.poly.pow(a) * &v.poly.pow(b)), &c);
        }
        let remainder = h - &value;
        debug_assert!(remainder.total_degree() < h.total_degree());
        (MembershipWitness { expression, value }, remainder)
    };

    // A constant generator contributes nothing beyond the field.
    let u_const = u.poly.total_degree() <= Degree::Finite(0);
    let v_const = v.poly.total_degree() <= Degree::Finite(0);
    if u_const || v_const {
        let single = match (u_const, v_const) {
            (true, true) => return Ok(None),
            (true, false) => &v,
            _ => &u,
        };
        return Ok(power_multiple(&h.top(), &single.poly.top()).map(|(c, k)| {
            let coeffs = if std::ptr::eq(single, &u) { vec![(k, 0, c)] } else { vec![(0, k, c)] };
            finish(coeffs, &u, &v)
        }));
    }

    let (tu, tv) = (u.poly.top(), v.poly.top());
    if !algebraically_dependent(&tu, &tv) {
        return Ok(top_membership(h, &u.poly, &v.poly).map(|w| {
            let coeffs = w
                .expression
                .terms()
                .map(|(m, c)| (m.exponents()[0], m.exponents()[1], c.clone()))
                .collect();
            finish(coeffs, &u, &v)
        }));
    }
    if algebraically_dependent(&u.poly, &v.poly) {
        return Err(SubalgebraError::Inconclusive("algebraically dependent generators".into()));
    }
    let swapped = u.poly.deg() > v.poly.deg();
    let pair = make_star_reduced(&u.poly, &v.poly).ok_or_else(|| {
        SubalgebraError::Inconclusive("reduced pair with dependent tops is not *-reduced over Q".into())
    })?;
    let (lo, hi) = if swapped { (&v, &u) } else { (&u, &v) };
    let sol = star_reduced_search(&pair, h, budget)?;
    Ok(sol.map(|coeffs| {
        let (mut a_gen, mut b_gen) = (lo.clone(), hi.clone());
        // express in terms of (u, v) order
        if swapped {
            std::mem::swap(&mut a_gen, &mut b_gen);
            let c = coeffs.into_iter().map(|(i, j, c)| (j, i, c)).collect();
            finish(c, &a_gen, &b_gen)
        } else {
            finish(coeffs, &a_gen, &b_gen)
        }
    }))
}

/// Coefficients `c_ij` (with `G = sum c_ij x^i y^j`) such that
/// `deg(h - G(pair.f, pair.g)) < deg h`, searching the complete box given by
/// the degree lower bounds. Smaller boxes are tried first.
fn star_reduced_search(
    pair: &StarReducedPair,
    h: &Polynomial,
    budget: u32,
) -> Result<Option<Vec<(u32, u32, Rational)>>, SubalgebraError> {
    let d = h.deg();
    let (max_x, max_y) = pair.support_bounds(d);
    let top_degree = max_x * pair.n + max_y * pair.m;
    if top_degree > budget {
        return Err(SubalgebraError::Inconclusive(format!(
            "support box needs products of degree {top_degree} > budget {budget}"
        )));
    }
    let qmax = (d as i64 / pair.big_n) as u32;
    let mut products = Products::new(&pair.f, &pair.g);
    let target = h.part_from_degree(d);
    for q in 0..=qmax {
        let (bx, by) = (pair.s * (q + 1) - 1, pair.p * (q + 1) - 1);
        let cols: Vec<(u32, u32)> = (0..=bx)
            .flat_map(|i| (0..=by).map(move |j| (i, j)))
            .filter(|&(i, j)| i * pair.n + j * pair.m >= d)
            .collect();
        let mut rows: std::collections::BTreeMap<Monomial, Vec<(usize, Rational)>> = Default::default();
        for (k, &(i, j)) in cols.iter().enumerate() {
            for (m, c) in products.get(i, j).terms().rev() {
                if m.degree() < d {
                    break;
                }
                rows.entry(m.clone()).or_default().push((k, c.clone()));
            }
        }
        for (m, _) in target.terms() {
            rows.entry(m.clone()).or_default();
        }
        let mut sys = LinearSystem::new(cols.len());
        for (m, coeffs) in rows {
            sys.push_row(coeffs, target.coefficient(&m));
        }
        if let Some(sol) = sys.solve() {
            return Ok(Some(
                cols.iter()
                    .zip(sol)
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(&(i, j), c)| (i, j, c))
                    .collect(),
            ));
        }
    }
    Ok(None)
}

/// Derivative polynomial `w(x, y) = y^p - alpha x^s - sum a_ij x^i y^j` of a
/// `*`-reduced pair, with `value = w(f, g)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativePolynomial {
    pub pair: StarReducedPair,
    pub w: Polynomial,
    pub value: Polynomial,
}

/// Greedy construction: cancel the top of `g^p - alpha f^s`, then keep
/// subtracting witnesses while the top of the value lies in `<top f, top g>`.
/// All defining properties are re-checked before returning.
pub fn derivative_polynomial(pair: &StarReducedPair) -> Result<DerivativePolynomial, SubalgebraError> {
    let (f, g) = (&pair.f, &pair.g);
    let alpha = num_traits::pow(pair.gamma.clone(), pair.p as usize) / num_traits::pow(pair.beta.clone(), pair.s as usize);
    let mut w = Polynomial::monomial(2, xy(0, pair.p), Rational::one());
    w.add_term(xy(pair.s, 0), -alpha.clone());
    let mut value = &g.pow(pair.p) - &f.pow(pair.s).scale(&alpha);
    while value.total_degree() > Degree::Finite(0) {
        let Some(wit) = top_membership(&value, f, g) else { break };
        for (m, c) in wit.expression.terms() {
            let (i, j) = (m.exponents()[0], m.exponents()[1]);
            w.add_term(m.clone(), -c.clone());
            value.add_scaled(&(&f.pow(i) * &g.pow(j)), &-c.clone());
        }
    }
    let c0 = w.constant_term();
    if !c0.is_zero() {
        w.add_term(Monomial::one(2), -c0.clone());
        value.add_term(Monomial::one(f.nvars()), -c0);
    }
    let dp = DerivativePolynomial { pair: pair.clone(), w, value };
    dp.check()?;
    Ok(dp)
}

impl DerivativePolynomial {
    /// Re-verifies both defining conditions and the derivative degree identities.
    pub fn check(&self) -> Result<(), SubalgebraError> {
        let pr = &self.pair;
        let bad = |s: String| Err(SubalgebraError::DerivativeInvariant(s));
        if self.value.total_degree() <= Degree::Finite(0) {
            return bad("w(f, g) is constant".into());
        }
        if self.value.deg() >= pr.p * pr.m {
            return bad(format!("deg w(f,g) = {} not below pm = {}", self.value.deg(), pr.p * pr.m));
        }
        if top_membership(&self.value, &pr.f, &pr.g).is_some() {
            return bad("top of w(f,g) lies in <top f, top g>".into());
        }
        for (m, _) in self.w.terms() {
            let (i, j) = (m.exponents()[0], m.exponents()[1]);
            if (i, j) != (0, pr.p) && (i, j) != (pr.s, 0) && pr.n * i + pr.m * j >= pr.m * pr.p {
                return bad(format!("term x^{i} y^{j} exceeds the weight bound"));
            }
        }
        let args = [pr.f.clone(), pr.g.clone()];
        let dx = self.w.diff(0).subst(&args);
        let dy = self.w.diff(1).subst(&args);
        if dx.total_degree() != Degree::Finite(pr.n * (pr.s - 1)) {
            return bad(format!("deg dw/dx(f,g) = {} != n(s-1)", dx.total_degree()));
        }
        if dy.total_degree() != Degree::Finite(pr.m * (pr.p - 1)) {
            return bad(format!("deg dw/dy(f,g) = {} != m(p-1)", dy.total_degree()));
        }
        Ok(())
    }
}

/// Classification of a low-degree element of `<f, g>`.
#[derive(Debug, Clone, PartialEq)]
pub enum LowDegreeClass {
    /// A constant.
    InF,
    /// `h = lambda * w(f, g) + constant`.
    ScalarTimesW { lambda: Rational, constant: Rational },
    /// `deg h >= deg f`: outside the range where the dichotomy applies.
    Other,
}

/// For `h` in `<f, g>` (certified by `witness`) with `deg h < deg f`, returns
/// whether `h` is a constant or a scalar multiple of `w(f, g)` up to a constant.
pub fn low_degree_classifier(
    h: &Polynomial,
    pair: &StarReducedPair,
    witness: &MembershipWitness,
) -> Result<LowDegreeClass, SubalgebraError> {
    if witness.value != *h || !witness.verify(&pair.f, &pair.g) {
        return Err(SubalgebraError::LowDegree("witness does not evaluate to h".into()));
    }
    if h.total_degree() <= Degree::Finite(0) {
        return Ok(LowDegreeClass::InF);
    }
    if h.deg() >= pair.n {
        return Ok(LowDegreeClass::Other);
    }
    let w = derivative_polynomial(pair)?;
    if w.value.deg() != h.deg() {
        return Err(SubalgebraError::LowDegree(format!(
            "nonconstant h of degree {} < n but deg w(f,g) = {}",
            h.deg(),
            w.value.deg()
        )));
    }
    let lambda = h.leading_term().unwrap().1 / w.value.leading_term().unwrap().1;
    let rest = h - &w.value.scale(&lambda);
    if !rest.is_constant() {
        return Err(SubalgebraError::LowDegree("h - lambda w(f,g) is not constant".into()));
    }
    Ok(LowDegreeClass::ScalarTimesW { lambda, constant: rest.constant_term() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    fn p(s: &str) -> Polynomial {
        Polynomial::parse(s, 3).unwrap()
    }

    #[test]
    fn top_membership_examples() {
        let (f, g) = (p("x1^2 + x2"), p("x1^3 + x3"));
        let w = top_membership(&p("x1^5"), &f, &g).unwrap();
        assert_eq!(w.expression, Polynomial::parse("x1*x2", 2).unwrap());
        assert!(top_membership(&p("x2"), &f, &g).is_none());
        let w = top_membership(&f, &f, &g).unwrap();
        assert_eq!(w.expression, Polynomial::parse("x1", 2).unwrap());
    }

    #[test]
    fn reduce_against_examples() {
        let (f, g) = (p("x2 + x1^2"), p("x3"));
        let h = &p("x1") + &f.pow(2);
        let (q, r) = reduce_against(&h, &f, &g, 64).unwrap().unwrap();
        assert_eq!(q.expression, Polynomial::parse("x1^2", 2).unwrap());
        assert_eq!(r, p("x1"));

        let h = &f + &Polynomial::one(3);
        let (_, r) = reduce_against(&h, &f, &g, 64).unwrap().unwrap();
        assert_eq!(r, Polynomial::one(3));
    }

    #[test]
    fn nagata_quadric_is_not_reducible() {
        let f2 = p("x2 + 2*(x1^2 - x2*x3)*x1 + (x1^2 - x2*x3)^2*x3");
        let h = p("x1^2 - x2*x3");
        assert!(reduce_against(&h, &f2, &p("x3"), 64).unwrap().is_none());
    }

    #[test]
    fn budget_below_degree_is_inconclusive() {
        let r = reduce_against(&p("x1^3"), &p("x1"), &p("x2"), 2);
        assert!(matches!(r, Err(SubalgebraError::Inconclusive(_))));
    }

    #[test]
    fn star_reduced_reduction_needs_the_derivative() {
        let (f, g) = (p("x1^2 + x2"), p("x1^3 + x3"));
        // g^2 - f^3 has degree 5; subtracting it from h leaves a degree-1 remainder
        let h = &(&g.pow(2) - &f.pow(3)) + &p("x2");
        let (q, r) = reduce_against(&h, &f, &g, 64).unwrap().unwrap();
        assert!(q.verify(&f, &g));
        assert_eq!(r, p("x2"));
    }

    #[test]
    fn derivative_polynomial_of_basic_pair() {
        let pair = make_star_reduced(&p("x1^2 + x2"), &p("x1^3 + x3")).unwrap();
        let dp = derivative_polynomial(&pair).unwrap();
        assert_eq!(dp.w, Polynomial::parse("x2^2 - x1^3", 2).unwrap());
        assert_eq!(dp.value, p("2*x1^3*x3 + x3^2 - 3*x1^4*x2 - 3*x1^2*x2^2 - x2^3"));
        assert_eq!(dp.value.deg(), 5);
        let args = [pair.f.clone(), pair.g.clone()];
        assert_eq!(dp.w.diff(0).subst(&args).deg(), 4);
        assert_eq!(dp.w.diff(1).subst(&args).deg(), 3);
    }

    #[test]
    fn low_degree_classifier_paths() {
        let pair = make_star_reduced(&p("x1^2 + x2"), &p("x1^3 + x3")).unwrap();
        let seven = MembershipWitness {
            expression: Polynomial::constant(2, rat(7)),
            value: Polynomial::constant(3, rat(7)),
        };
        assert_eq!(low_degree_classifier(&seven.value, &pair, &seven).unwrap(), LowDegreeClass::InF);
        // here deg w(f,g) = 5 >= n, so a nonconstant member of degree < n cannot exist
        let fake = MembershipWitness { expression: Polynomial::var(2, 0), value: p("x1") };
        assert!(low_degree_classifier(&p("x1"), &pair, &fake).is_err());
        let f_itself = MembershipWitness { expression: Polynomial::var(2, 0), value: pair.f.clone() };
        assert_eq!(low_degree_classifier(&pair.f, &pair, &f_itself).unwrap(), LowDegreeClass::Other);
    }
}
