//! Univariate polynomials over the rationals and their rational roots.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::poly::Rational;

/// Dense univariate polynomial, coefficients from the constant term upward,
/// with no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UniPoly {
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `a + b t`
    pub fn linear(a: Rational, b: Rational) -> Self {
        Self::from_coeffs(vec![a, b])
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    /// `prod (t - r)`
    pub fn from_roots(roots: &[Rational]) -> Self {
        roots
            .iter()
            .fold(Self::constant(Rational::one()), |acc, r| &acc * &Self::linear(-r.clone(), Rational::one()))
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        UniPoly { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(lc) => self.scale(&lc.recip()),
            None => Self::zero(),
        }
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lc_inv = d.leading().unwrap().recip();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] * &lc_inv;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * dc;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Self::from_coeffs(q), Self::from_coeffs(r))
    }

    /// Exact division; `None` if `d` does not divide `self`.
    pub fn exact_div(&self, d: &UniPoly) -> Option<UniPoly> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    /// Monic gcd; the gcd of two zero polynomials is zero.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r.primitive();
        }
        a.monic()
    }

    /// Scalar multiple with coprime integer coefficients (keeps remainder
    /// sequences small).
    fn primitive(&self) -> UniPoly {
        if self.is_zero() {
            return self.clone();
        }
        let ints = self.integer_coeffs();
        let mut g = BigInt::zero();
        for c in &ints {
            g = g.gcd(c);
        }
        UniPoly { coeffs: ints.into_iter().map(|c| Rational::from_integer(c / &g)).collect() }
    }

    /// Coefficients scaled by the lcm of the denominators.
    fn integer_coeffs(&self) -> Vec<BigInt> {
        let mut l = BigInt::one();
        for c in &self.coeffs {
            l = l.lcm(c.denom());
        }
        self.coeffs.iter().map(|c| c.numer() * (&l / c.denom())).collect()
    }

    pub fn squarefree_part(&self) -> UniPoly {
        if self.is_constant() {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        self.exact_div(&g).expect("gcd divides").monic()
    }

    /// All distinct rational roots, in increasing order.
    pub fn rational_roots(&self) -> Vec<Rational> {
        if self.is_zero() {
            panic!("rational_roots of the zero polynomial");
        }
        let mut p = self.squarefree_part().primitive();
        let mut roots = Vec::new();
        if p.coeffs.first().is_some_and(Zero::is_zero) {
            roots.push(Rational::zero());
            p = UniPoly { coeffs: p.coeffs[1..].to_vec() };
        }
        if p.degree().unwrap_or(0) >= 1 {
            roots.extend(nonzero_rational_roots(&p.integer_coeffs()));
        }
        roots.sort();
        roots.dedup();
        roots
    }
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, o: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let zero = Rational::zero();
        UniPoly::from_coeffs(
            (0..n)
                .map(|k| self.coeffs.get(k).unwrap_or(&zero) + o.coeffs.get(k).unwrap_or(&zero))
                .collect(),
        )
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, o: &UniPoly) -> UniPoly {
        self + &(-o)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, o: &UniPoly) -> UniPoly {
        if self.is_zero() || o.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::from_coeffs(out)
    }
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

fn reduce_mod(coeffs: &[BigInt], p: u64) -> Vec<u64> {
    let bp = BigInt::from(p);
    coeffs.iter().map(|c| c.mod_floor(&bp).to_u64().unwrap()).collect()
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % p as u128) as u64;
        }
        b = (b as u128 * b as u128 % p as u128) as u64;
        e >>= 1;
    }
    r
}

fn trim_mod(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

/// Degree of `gcd(a, b)` over `F_p`.
fn gcd_degree_mod(a: &[u64], b: &[u64], p: u64) -> usize {
    let (mut a, mut b) = (trim_mod(a.to_vec()), trim_mod(b.to_vec()));
    while !b.is_empty() {
        let inv = pow_mod(*b.last().unwrap(), p - 2, p);
        while a.len() >= b.len() {
            let shift = a.len() - b.len();
            let c = (*a.last().unwrap() as u128 * inv as u128 % p as u128) as u64;
            for (j, bj) in b.iter().enumerate() {
                let sub = (c as u128 * *bj as u128 % p as u128) as u64;
                a[shift + j] = (a[shift + j] + p - sub) % p;
            }
            a = trim_mod(a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

fn eval_big(coeffs: &[BigInt], x: &BigInt, m: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in coeffs.iter().rev() {
        acc = (acc * x + c).mod_floor(m);
    }
    acc
}

fn inv_mod(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(m)
}

/// `a / b` with `a = b r (mod m)` and `|a|, |b| <= sqrt(m / 2)`.
fn rational_reconstruction(r: &BigInt, m: &BigInt) -> Option<Rational> {
    let bound = (m / 2u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), r.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    Some(Rational::new(r1, t1))
}

/// Rational roots of a squarefree integer polynomial with nonzero constant
/// term: roots modulo a good prime, lifted by Newton iteration, then
/// reconstructed and checked exactly.
fn nonzero_rational_roots(a: &[BigInt]) -> Vec<Rational> {
    let d = a.len() - 1;
    let lc = &a[d];
    let deriv: Vec<BigInt> = a.iter().enumerate().skip(1).map(|(k, c)| c * BigInt::from(k)).collect();
    let mut p = (2 * d as u64 + 3).max(101);
    loop {
        if is_prime(p) && !(lc % BigInt::from(p)).is_zero() {
            let am = reduce_mod(a, p);
            let dm = reduce_mod(&deriv, p);
            if gcd_degree_mod(&am, &dm, p) == 0 {
                break;
            }
        }
        p += 1;
    }
    let bound = lc.abs().max(a[0].abs());
    let target = &bound * &bound * 2u32 + 1u32;
    let pb = BigInt::from(p);
    let mut out = Vec::new();
    for r0 in 0..p {
        let x = BigInt::from(r0);
        if !eval_big(a, &x, &pb).is_zero() {
            continue;
        }
        let (mut x, mut m) = (x, pb.clone());
        while m <= target {
            m = &m * &m;
            let fx = eval_big(a, &x, &m);
            let dfx = eval_big(&deriv, &x, &m);
            x = (&x - fx * inv_mod(&dfx, &m)).mod_floor(&m);
        }
        if let Some(q) = rational_reconstruction(&x, &m) {
            let val = a
                .iter()
                .rev()
                .fold(Rational::zero(), |acc, c| acc * &q + Rational::from_integer(c.clone()));
            if val.is_zero() {
                out.push(q);
            }
        }
    }
    out
}
