//! Degree estimates for pairs of polynomials.
//!
//! The Poisson bracket `[f, g]` is never built. Its degree is recovered from
//! the 2x2 minors of the Jacobian of `(f, g)`: the brackets `[x_i, x_j]` are
//! free of degree 2, so `deg [f, g] = 2 + max deg J_ij`, and the bracket
//! vanishes exactly when all minors do.

use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::poly::{Degree, Monomial, PolyError, Polynomial, Rational};

/// Jacobian minors of a pair together with the bracket degree they determine.
#[derive(Debug, Clone, PartialEq)]
pub struct BracketProfile {
    /// `J_ij` for `i < j`, in the order `(1,2), (1,3), (2,3)` for three variables.
    pub minors: Vec<Polynomial>,
    pub bracket_degree: Degree,
}

/// Minors `df/dx_i * dg/dx_j - df/dx_j * dg/dx_i` over the first `nx` variables.
pub fn jacobian_minors(f: &Polynomial, g: &Polynomial, nx: usize) -> Vec<Polynomial> {
    let df: Vec<_> = (0..nx).map(|i| f.diff(i)).collect();
    let dg: Vec<_> = (0..nx).map(|i| g.diff(i)).collect();
    let mut out = Vec::with_capacity(nx * (nx - 1) / 2);
    for i in 0..nx {
        for j in i + 1..nx {
            out.push(&(&df[i] * &dg[j]) - &(&df[j] * &dg[i]));
        }
    }
    out
}

/// Bracket degree from a list of minors.
pub fn degree_from_minors(minors: &[Polynomial]) -> Degree {
    match minors.iter().map(Polynomial::total_degree).max() {
        Some(Degree::Finite(d)) => Degree::Finite(d + 2),
        _ => Degree::NegInfinity,
    }
}

pub fn bracket_profile(f: &Polynomial, g: &Polynomial) -> BracketProfile {
    let minors = jacobian_minors(f, g, f.nvars());
    let bracket_degree = degree_from_minors(&minors);
    BracketProfile { minors, bracket_degree }
}

pub fn bracket_degree(f: &Polynomial, g: &Polynomial) -> Degree {
    bracket_profile(f, g).bracket_degree
}

/// `[f, g] = 0`, i.e. `f` and `g` are algebraically dependent.
pub fn algebraically_dependent(f: &Polynomial, g: &Polynomial) -> bool {
    bracket_degree(f, g) == Degree::NegInfinity
}

/// Exact rational `d`-th root of a homogeneous polynomial: returns `(z, alpha)`
/// with `h = alpha * z^d` and `z` monic under graded-lex, or `None` when no
/// such decomposition exists over the rationals.
pub fn homogeneous_root(h: &Polynomial, d: u32) -> Result<Option<(Polynomial, Rational)>, PolyError> {
    if !h.is_homogeneous() {
        return Err(PolyError::NotHomogeneous);
    }
    if h.is_zero() || d == 0 {
        return Ok(None);
    }
    let nvars = h.nvars();
    let (lead_m, lead_c) = h.leading_term().unwrap();
    if d == 1 {
        return Ok(Some((h.scale(&lead_c.recip()), lead_c.clone())));
    }
    if lead_m.exponents().iter().any(|e| e % d != 0) {
        return Ok(None);
    }
    let alpha = lead_c.clone();
    let target = h.scale(&alpha.recip());
    let root_lead = Monomial::from_exponents(&lead_m.exponents().iter().map(|e| e / d).collect::<Vec<_>>());
    // d * lead^(d-1) divides the leading term of each residual
    let lead_pow = Monomial::from_exponents(
        &root_lead.exponents().iter().map(|e| e * (d - 1)).collect::<Vec<_>>(),
    );
    let d_rat = Rational::from_integer(d.into());
    let mut z = Polynomial::monomial(nvars, root_lead.clone(), Rational::one());
    let mut last = root_lead;
    loop {
        let residual = &target - &z.pow(d);
        let Some((rm, rc)) = residual.leading_term() else { break };
        let Some(next) = rm.div(&lead_pow) else { return Ok(None) };
        if next >= last {
            return Ok(None);
        }
        let coeff = rc / &d_rat;
        z.add_term(next.clone(), coeff);
        last = next;
    }
    debug_assert_eq!(z.pow(d).scale(&alpha), *h);
    Ok(Some((z, alpha)))
}

/// `Some(c)` if `h = c * base^k` for some constant `c` and `k >= 0`.
/// Both arguments are expected to be homogeneous and nonzero.
pub fn power_multiple(h: &Polynomial, base: &Polynomial) -> Option<(Rational, u32)> {
    let dh = h.deg();
    let db = base.deg();
    if db == 0 {
        return if dh == 0 { Some((h.constant_term() / base.constant_term(), 0)) } else { None };
    }
    if dh % db != 0 {
        return None;
    }
    let k = dh / db;
    let bk = base.pow(k);
    let c = h.leading_term()?.1 / bk.leading_term()?.1;
    if bk.scale(&c) == *h {
        Some((c, k))
    } else {
        None
    }
}

/// A `*`-reduced pair `f, g` with `deg f < deg g` and its invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct StarReducedPair {
    pub f: Polynomial,
    pub g: Polynomial,
    /// `deg f`
    pub n: u32,
    /// `deg g`
    pub m: u32,
    /// `n / gcd(n, m)`
    pub p: u32,
    /// `m / gcd(n, m)`
    pub s: u32,
    pub bracket_degree: u32,
    /// `m p - m - n + deg [f, g]`, the step in the degree lower bounds.
    pub big_n: i64,
    /// Common homogeneous root: `top(f) = beta * a^p`, `top(g) = gamma * a^s`.
    pub root_a: Polynomial,
    pub beta: Rational,
    pub gamma: Rational,
}

/// Recognize a `*`-reduced pair, reordering so that the lower-degree element comes first.
pub fn make_star_reduced(f: &Polynomial, g: &Polynomial) -> Option<StarReducedPair> {
    if f.total_degree() <= Degree::Finite(0) || g.total_degree() <= Degree::Finite(0) {
        return None;
    }
    let (f, g) = match f.deg().cmp(&g.deg()) {
        std::cmp::Ordering::Less => (f, g),
        std::cmp::Ordering::Greater => (g, f),
        std::cmp::Ordering::Equal => return None,
    };
    let (n, m) = (f.deg(), g.deg());
    let (tf, tg) = (f.top(), g.top());
    if power_multiple(&tg, &tf).is_some() {
        return None;
    }
    let bd = bracket_degree(f, g).finite()?;
    if !algebraically_dependent(&tf, &tg) {
        return None;
    }
    let e = n.gcd(&m);
    let (p, s) = (n / e, m / e);
    let (root_a, beta) = homogeneous_root(&tf, p).ok()??;
    let (gamma, k) = power_multiple(&tg, &root_a)?;
    if k != s {
        return None;
    }
    let big_n = (m as i64) * (p as i64) - m as i64 - n as i64 + bd as i64;
    Some(StarReducedPair {
        f: f.clone(),
        g: g.clone(),
        n,
        m,
        p,
        s,
        bracket_degree: bd,
        big_n,
        root_a,
        beta,
        gamma,
    })
}

impl StarReducedPair {
    /// Lower bound on `deg G(f, g)` from the x- and y-degrees of `G`.
    pub fn degree_lower_bound(&self, degx: u32, degy: u32) -> i64 {
        let (q, r) = (degy / self.p, degy % self.p);
        let bound_y = q as i64 * self.big_n + self.m as i64 * r as i64;
        let (q1, r1) = (degx / self.s, degx % self.s);
        let bound_x = q1 as i64 * self.big_n + self.n as i64 * r1 as i64;
        bound_y.max(bound_x)
    }

    /// Box containing the support of every `G` with `deg G(f, g) <= d`:
    /// returns `(max_degx, max_degy)`.
    pub fn support_bounds(&self, d: u32) -> (u32, u32) {
        let q = (d as i64 / self.big_n) as u32 + 1;
        (self.s * q - 1, self.p * q - 1)
    }

    /// Reconstructs `top(f)` and `top(g)` from the common root.
    pub fn reconstructed_tops(&self) -> (Polynomial, Polynomial) {
        (self.root_a.pow(self.p).scale(&self.beta), self.root_a.pow(self.s).scale(&self.gamma))
    }
}

/// Free-standing form of [`StarReducedPair::degree_lower_bound`].
pub fn degree_lower_bound(pair: &StarReducedPair, degx: u32, degy: u32) -> i64 {
    pair.degree_lower_bound(degx, degy)
}

/// Free-standing form of [`StarReducedPair::support_bounds`].
pub fn support_bounds(pair: &StarReducedPair, d: u32) -> (u32, u32) {
    pair.support_bounds(d)
}

/// The three quantities compared by the Poisson-bracket triangle inequality for
/// nonconstant `f, g, h`: `(deg[f,g] + deg h, deg[g,h] + deg f, deg[h,f] + deg g)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleDegrees {
    pub m: i64,
    pub n: i64,
    pub k: i64,
}

impl TripleDegrees {
    pub fn of(f: &Polynomial, g: &Polynomial, h: &Polynomial) -> TripleDegrees {
        let add = |b: Degree, d: Degree| (b + d).as_i64();
        TripleDegrees {
            m: add(bracket_degree(f, g), h.total_degree()),
            n: add(bracket_degree(g, h), f.total_degree()),
            k: add(bracket_degree(h, f), g.total_degree()),
        }
    }

    /// `m <= max(n, k)`, with equality whenever `n != k`.
    pub fn holds(&self) -> bool {
        let mx = self.n.max(self.k);
        self.m <= mx && (self.n == self.k || self.m == mx)
    }
}

/// Evaluate a bivariate `G(x, y)` at `(f, g)`.
pub fn eval_bivariate(g_xy: &Polynomial, f: &Polynomial, g: &Polynomial) -> Polynomial {
    g_xy.subst(&[f.clone(), g.clone()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    fn p(s: &str) -> Polynomial {
        Polynomial::parse(s, 3).unwrap()
    }

    #[test]
    fn bracket_profiles() {
        assert_eq!(bracket_degree(&p("x1"), &p("x2")), Degree::Finite(2));
        let f = p("x1^3 - x2 + 1");
        assert_eq!(bracket_degree(&f, &f.pow(2)), Degree::NegInfinity);
        let prof = bracket_profile(&p("x1^2 + x2"), &p("x1^3 + x3"));
        assert_eq!(prof.minors, vec![p("-3*x1^2"), p("2*x1"), p("1")]);
        assert_eq!(prof.bracket_degree, Degree::Finite(4));
    }

    #[test]
    fn dependence() {
        assert!(algebraically_dependent(&p("x1"), &p("x1^2 - 1")));
        assert!(!algebraically_dependent(&p("x1"), &p("x2")));
        let q = p("x1^2 - x2*x3");
        assert!(algebraically_dependent(&q, &(&q.pow(3) + &q)));
    }

    #[test]
    fn roots() {
        let (z, a) = homogeneous_root(&p("x1^2*x2^2"), 2).unwrap().unwrap();
        assert_eq!((z, a), (p("x1*x2"), rat(1)));
        assert_eq!(homogeneous_root(&p("x1^2 + x2^2"), 2).unwrap(), None);
        let (z, a) = homogeneous_root(&p("8*x1^3"), 3).unwrap().unwrap();
        assert_eq!((z, a), (p("x1"), rat(8)));
        let sq = p("2*x1 - 3*x2").pow(2);
        let (z, a) = homogeneous_root(&sq, 2).unwrap().unwrap();
        assert_eq!(z.pow(2).scale(&a), sq);
        assert_eq!(homogeneous_root(&p("x1^2 + x2"), 2), Err(PolyError::NotHomogeneous));
        assert_eq!(homogeneous_root(&p("x1^3"), 2).unwrap(), None);
    }

    #[test]
    fn star_reduced_pairs() {
        let pair = make_star_reduced(&p("x1^2 + x2"), &p("x1^3 + x3")).unwrap();
        assert_eq!((pair.n, pair.m, pair.p, pair.s), (2, 3, 2, 3));
        assert_eq!(pair.bracket_degree, 4);
        assert_eq!(pair.big_n, 5);
        assert_eq!(pair.root_a, p("x1"));
        let swapped = make_star_reduced(&p("x1^3 + x3"), &p("x1^2 + x2")).unwrap();
        assert_eq!(swapped, pair);
        assert!(make_star_reduced(&p("x1"), &p("x2")).is_none());
        assert!(make_star_reduced(&p("x1^2 + x2"), &p("x1^4")).is_none());
        assert!(make_star_reduced(&p("x1^2 + x2"), &p("x1^2 + x3")).is_none());
    }

    #[test]
    fn lower_bounds_and_boxes() {
        let pair = make_star_reduced(&p("x1^2 + x2"), &p("x1^3 + x3")).unwrap();
        assert_eq!(pair.degree_lower_bound(3, 2), 5);
        assert_eq!(pair.degree_lower_bound(0, 0), 0);
        assert_eq!(pair.degree_lower_bound(0, 1), 3);
        assert_eq!(pair.support_bounds(5), (5, 3));
        assert_eq!(pair.support_bounds(0), (2, 1));
        assert_eq!(pair.support_bounds(4), (2, 1));
    }

    #[test]
    fn triple_inequality_on_fixed_instance() {
        let t = TripleDegrees::of(&p("x1^2 + x2"), &p("x1^3 + x3"), &p("x2*x3 + x1"));
        assert!(t.holds());
    }
}
