//! Exact sparse multivariate polynomials over the rationals.
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`], whose ordering is
//! graded lexicographic with `x1 > x2 > ... > xn`. Zero coefficients are never
//! stored, so structural equality is polynomial equality.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use smallvec::SmallVec;
use thiserror::Error;

/// Coefficient field. Every coefficient operation in the crate goes through this type.
pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Total degree of a polynomial. The zero polynomial has degree `NegInfinity`,
/// which compares below every finite degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(u32),
}

impl Degree {
    pub fn finite(self) -> Option<u32> {
        match self {
            Degree::Finite(d) => Some(d),
            Degree::NegInfinity => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Degree::Finite(_))
    }

    /// Degree as a signed integer, with `NegInfinity` mapped to `i64::MIN`.
    pub fn as_i64(self) -> i64 {
        match self {
            Degree::Finite(d) => d as i64,
            Degree::NegInfinity => i64::MIN,
        }
    }
}

impl Add for Degree {
    type Output = Degree;
    fn add(self, rhs: Degree) -> Degree {
        match (self, rhs) {
            (Degree::Finite(a), Degree::Finite(b)) => Degree::Finite(a + b),
            _ => Degree::NegInfinity,
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::Finite(d) => write!(f, "{d}"),
            Degree::NegInfinity => write!(f, "-inf"),
        }
    }
}

/// Exponent vector of a monomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(SmallVec<[u32; 4]>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(SmallVec::from_elem(0, nvars))
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut m = Self::one(nvars);
        m.0[i] = 1;
        m
    }

    pub fn from_exponents(exps: &[u32]) -> Self {
        Monomial(SmallVec::from_slice(exps))
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    /// `self / other` if `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = SmallVec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(Monomial(out))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("no top part of zero")]
    ZeroTopPart,
    #[error("variable index {index} out of range for {nvars} variables")]
    VariableOutOfRange { index: usize, nvars: usize },
    #[error("arity mismatch: expected {expected} images, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{name}` at position {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
}

/// Sparse polynomial in `nvars` variables with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    /// The variable `x_{i+1}` (indices are zero based).
    pub fn var(nvars: usize, i: usize) -> Self {
        Self::monomial(nvars, Monomial::var(nvars, i), Rational::one())
    }

    pub fn monomial(nvars: usize, m: Monomial, c: Rational) -> Self {
        debug_assert_eq!(m.nvars(), nvars);
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(nvars: usize, terms: I) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// Constant term (zero if absent).
    pub fn constant_term(&self) -> Rational {
        self.coefficient(&Monomial::one(self.nvars))
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    /// Leading term under graded-lex.
    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn total_degree(&self) -> Degree {
        match self.terms.keys().next_back() {
            Some(m) => Degree::Finite(m.degree()),
            None => Degree::NegInfinity,
        }
    }

    /// Finite degree; panics on zero. For internal use where nonzero is known.
    pub fn deg(&self) -> u32 {
        self.total_degree().finite().expect("degree of zero polynomial")
    }

    /// Degree in the single variable `i`.
    pub fn degree_in(&self, i: usize) -> Degree {
        self.terms
            .keys()
            .map(|m| m.0[i])
            .max()
            .map_or(Degree::NegInfinity, Degree::Finite)
    }

    /// Sum of the terms of total degree exactly `d`.
    pub fn homogeneous_part(&self, d: u32) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Sum of the terms of total degree at least `d`.
    pub fn part_from_degree(&self, d: u32) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() >= d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Highest homogeneous part.
    pub fn top_part(&self) -> Result<Polynomial, PolyError> {
        match self.total_degree() {
            Degree::Finite(d) => Ok(self.homogeneous_part(d)),
            Degree::NegInfinity => Err(PolyError::ZeroTopPart),
        }
    }

    /// Top part of a polynomial known to be nonzero.
    pub fn top(&self) -> Polynomial {
        self.top_part().expect("top part of zero polynomial")
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            Some(d) => degs.all(|e| e == d),
            None => true,
        }
    }

    /// True if some term has a positive exponent on variable `i`.
    pub fn involves(&self, i: usize) -> bool {
        self.terms.keys().any(|m| m.0[i] > 0)
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(n, a)| (n.mul(m), a * c)).collect(),
        }
    }

    pub fn add_assign_ref(&mut self, other: &Polynomial) {
        debug_assert_eq!(self.nvars, other.nvars);
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    /// `self += c * other`
    pub fn add_scaled(&mut self, other: &Polynomial, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (m, a) in &other.terms {
            self.add_term(m.clone(), a * c);
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut result = Self::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn partial_derivative(&self, i: usize) -> Result<Polynomial, PolyError> {
        if i >= self.nvars {
            return Err(PolyError::VariableOutOfRange { index: i, nvars: self.nvars });
        }
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm.0[i] -= 1;
            out.terms.insert(dm, c * Rational::from_integer(BigInt::from(e)));
        }
        Ok(out)
    }

    /// Partial derivative with respect to a variable known to be in range.
    pub fn diff(&self, i: usize) -> Polynomial {
        self.partial_derivative(i).expect("variable index in range")
    }

    /// Replace every variable `x_i` by `images[i]`. The images may live in a
    /// polynomial ring with a different number of variables.
    pub fn substitute(&self, images: &[Polynomial]) -> Result<Polynomial, PolyError> {
        if images.len() != self.nvars {
            return Err(PolyError::Arity { expected: self.nvars, got: images.len() });
        }
        let target = images.first().map_or(self.nvars, Polynomial::nvars);
        if self.nvars == 0 {
            return Ok(Self::constant(target, self.constant_term()));
        }
        let mut powers: Vec<Vec<Polynomial>> =
            images.iter().map(|p| vec![Self::one(p.nvars), p.clone()]).collect();
        let terms: Vec<(&[u32], &Rational)> = self.terms.iter().map(|(m, c)| (&m.0[..], c)).collect();
        Ok(subst_rec(&terms, 0, images, &mut powers, target))
    }

    /// Substitution with images known to have the right arity.
    pub fn subst(&self, images: &[Polynomial]) -> Polynomial {
        self.substitute(images).expect("substitution arity")
    }

    /// Evaluate all variables at rational points.
    pub fn evaluate(&self, point: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(m.0.iter()) {
                for _ in 0..e {
                    t *= x;
                }
            }
            acc += t;
        }
        acc
    }

    /// Re-embed into a ring with `nvars` variables, sending variable `i` to `map[i]`.
    pub fn rename(&self, nvars: usize, map: &[usize]) -> Polynomial {
        let mut out = Self::zero(nvars);
        for (m, c) in &self.terms {
            let mut nm = Monomial::one(nvars);
            for (i, &e) in m.0.iter().enumerate() {
                nm.0[map[i]] += e;
            }
            out.add_term(nm, c.clone());
        }
        out
    }

    /// Multiply through by the lcm of denominators and divide by the content,
    /// so that the result has coprime integer coefficients and a positive
    /// leading coefficient.
    pub fn primitive_part(&self) -> Polynomial {
        use num_integer::Integer;
        if self.is_zero() {
            return self.clone();
        }
        let mut lcm = BigInt::one();
        for c in self.terms.values() {
            lcm = lcm.lcm(c.denom());
        }
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(&(c.numer() * (&lcm / c.denom())));
        }
        let (_, lc) = self.leading_term().unwrap();
        let mut factor = Rational::new(lcm, g);
        if lc.is_negative() {
            factor = -factor;
        }
        self.scale(&factor)
    }

    /// Largest exponent appearing in any term, used for bounding searches.
    pub fn max_exponent(&self) -> u32 {
        self.terms.keys().flat_map(|m| m.0.iter().copied()).max().unwrap_or(0)
    }

    pub fn parse(text: &str, nvars: usize) -> Result<Polynomial, PolyError> {
        crate::parse::parse_polynomial(text, nvars)
    }
}

fn power<'p>(powers: &'p mut [Vec<Polynomial>], images: &[Polynomial], i: usize, e: usize) -> &'p Polynomial {
    while powers[i].len() <= e {
        let next = &powers[i][powers[i].len() - 1] * &images[i];
        powers[i].push(next);
    }
    &powers[i][e]
}

/// Nested evaluation: terms are grouped by the exponent of variable `var`,
/// so each distinct prefix costs one multiplication and the last variable
/// only scalar combinations of its powers.
fn subst_rec(
    terms: &[(&[u32], &Rational)],
    var: usize,
    images: &[Polynomial],
    powers: &mut [Vec<Polynomial>],
    target: usize,
) -> Polynomial {
    let mut out = Polynomial::zero(target);
    if var + 1 == images.len() {
        for (e, c) in terms {
            let p = power(powers, images, var, e[var] as usize);
            out.add_scaled(p, c);
        }
        return out;
    }
    let mut groups: BTreeMap<u32, Vec<(&[u32], &Rational)>> = BTreeMap::new();
    for &(e, c) in terms {
        groups.entry(e[var]).or_default().push((e, c));
    }
    for (k, group) in groups {
        let inner = subst_rec(&group, var + 1, images, powers, target);
        if k == 0 {
            out.add_assign_ref(&inner);
        } else {
            let prod = &inner * power(powers, images, var, k as usize);
            out.add_assign_ref(&prod);
        }
    }
    out
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(mut self, rhs: Polynomial) -> Polynomial {
        self.add_assign_ref(&rhs);
        self
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

/// Integer numerators over a common denominator.
fn integer_form(p: &Polynomial) -> (Vec<(&Monomial, BigInt)>, BigInt) {
    let den = p.terms.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let terms = p.terms.iter().map(|(m, c)| (m, c.numer() * (&den / c.denom()))).collect();
    (terms, den)
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        debug_assert_eq!(self.nvars, rhs.nvars);
        let (small, big) = if self.terms.len() <= rhs.terms.len() { (self, rhs) } else { (rhs, self) };
        let (st, sd) = integer_form(small);
        let (bt, bd) = integer_form(big);
        let mut acc: std::collections::HashMap<Monomial, BigInt> =
            std::collections::HashMap::with_capacity(bt.len() * st.len().min(8));
        for (m1, c1) in &st {
            for (m2, c2) in &bt {
                let m = m1.mul(m2);
                let c = c1 * c2;
                match acc.get_mut(&m) {
                    Some(e) => *e += c,
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        let den = sd * bd;
        Polynomial {
            nvars: self.nvars,
            terms: acc
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(m, c)| (m, Rational::new(c, den.clone())))
                .collect(),
        }
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

fn write_rational_coeff(f: &mut fmt::Formatter<'_>, c: &Rational) -> fmt::Result {
    if c.is_integer() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, m: &Monomial) -> fmt::Result {
    let mut first = true;
    for (i, &e) in m.0.iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            write!(f, "*")?;
        }
        first = false;
        write!(f, "x{}", i + 1)?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

/// Prints terms in descending graded-lex order, e.g. `x1^2 - x2*x3 + 1/2`.
/// The output is accepted by [`Polynomial::parse`].
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write_rational_coeff(f, &a)?;
            } else {
                if !a.is_one() {
                    write_rational_coeff(f, &a)?;
                    write!(f, "*")?;
                }
                write_monomial(f, m)?;
            }
        }
        Ok(())
    }
}

/// Small integer coefficient as `i64`, if it fits. Used by tests and pretty printers.
pub fn small_integer(c: &Rational) -> Option<i64> {
    if c.is_integer() {
        c.numer().to_i64()
    } else {
        None
    }
}
