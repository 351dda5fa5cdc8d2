//! Endomorphisms of `Q[x1..xn]` stored as image tuples.
//!
//! Composition follows the ring-map convention: `compose(phi, psi)` sends
//! `x_i` to `psi_i(phi_1, .., phi_n)`. Under this convention an elementary
//! transformation of a triple `theta` is `compose(theta, sigma)`, and
//! `sigma(i,a,f) sigma(i,b,g) = sigma(i, a*b, b*f + g)` holds literally.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::parse::parse_polynomial_at;
use crate::poly::{PolyError, Polynomial, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomorphismError {
    #[error("arity mismatch: {left} vs {right} variables")]
    Arity { left: usize, right: usize },
    #[error("elementary index {index} out of range 1..={nvars}")]
    IndexOutOfRange { index: usize, nvars: usize },
    #[error("elementary coefficient alpha must be nonzero")]
    ZeroAlpha,
    #[error("elementary polynomial must not involve x{index}")]
    InvolvesOwnVariable { index: usize },
    #[error("transposition needs two distinct indices, got ({0}, {0})")]
    SameIndex(usize),
    #[error("component {0} is zero")]
    ZeroImage(usize),
    #[error("expected {expected} components, got {got}")]
    ComponentCount { expected: usize, got: usize },
    #[error(transparent)]
    Parse(#[from] PolyError),
}

/// An endomorphism given by the images of the variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Endo {
    images: Vec<Polynomial>,
}

impl Endo {
    pub fn new(images: Vec<Polynomial>) -> Result<Endo, AutomorphismError> {
        let n = images.len();
        if let Some(bad) = images.iter().find(|p| p.nvars() != n) {
            return Err(AutomorphismError::Arity { left: n, right: bad.nvars() });
        }
        Ok(Endo { images })
    }

    pub fn identity(n: usize) -> Endo {
        Endo { images: (0..n).map(|i| Polynomial::var(n, i)).collect() }
    }

    pub fn nvars(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[Polynomial] {
        &self.images
    }

    pub fn into_images(self) -> Vec<Polynomial> {
        self.images
    }

    /// Image of `x_{i+1}` (0-based).
    pub fn image(&self, i: usize) -> &Polynomial {
        &self.images[i]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, p)| *p == Polynomial::var(self.nvars(), i))
    }

    /// Sum of the component degrees.
    pub fn degree(&self) -> Result<u32, AutomorphismError> {
        let mut total = 0;
        for (i, p) in self.images.iter().enumerate() {
            if p.is_zero() {
                return Err(AutomorphismError::ZeroImage(i + 1));
            }
            total += p.deg();
        }
        Ok(total)
    }

    pub fn component_degrees(&self) -> Vec<u32> {
        self.images.iter().map(|p| if p.is_zero() { 0 } else { p.deg() }).collect()
    }

    /// Apply as a ring map: `phi(p) = p(phi_1, .., phi_n)`.
    pub fn apply(&self, p: &Polynomial) -> Polynomial {
        p.subst(&self.images)
    }

    /// Determinant of the Jacobian matrix `(d phi_i / d x_j)`.
    pub fn jacobian_det(&self) -> Polynomial {
        let n = self.nvars();
        let m: Vec<Vec<Polynomial>> =
            self.images.iter().map(|p| (0..n).map(|j| p.diff(j)).collect()).collect();
        let cols: Vec<usize> = (0..n).collect();
        laplace_det(&m, 0, &cols, n)
    }

    /// `theta` with component `i` (0-based) replaced.
    pub fn with_component(&self, i: usize, p: Polynomial) -> Endo {
        let mut images = self.images.clone();
        images[i] = p;
        Endo { images }
    }

    /// Reorder components: result component `k` is `self` component `perm[k]`.
    pub fn permute_components(&self, perm: &[usize]) -> Endo {
        Endo { images: perm.iter().map(|&k| self.images[k].clone()).collect() }
    }

    /// Right multiplication by an elementary generator:
    /// component `i` becomes `alpha * theta_i + f(theta)`.
    pub fn apply_elementary(&self, e: &ElementaryData) -> Endo {
        let i = e.index - 1;
        let mut images = self.images.clone();
        let mut new = e.f.subst(&self.images);
        new.add_scaled(&self.images[i], &e.alpha);
        images[i] = new;
        Endo { images }
    }

    /// Parse `f1; f2; ..; fn`. Error positions refer to the whole string.
    pub fn parse(text: &str, n: usize) -> Result<Endo, AutomorphismError> {
        let mut images = Vec::with_capacity(n);
        let mut offset = 0;
        let parts: Vec<&str> = text.split(';').collect();
        if parts.len() != n {
            return Err(AutomorphismError::ComponentCount { expected: n, got: parts.len() });
        }
        for part in parts {
            images.push(parse_polynomial_at(part, n, offset)?);
            offset += part.len() + 1;
        }
        Ok(Endo { images })
    }
}

fn laplace_det(m: &[Vec<Polynomial>], row: usize, cols: &[usize], n: usize) -> Polynomial {
    if cols.len() == 1 {
        return m[row][cols[0]].clone();
    }
    let mut acc = Polynomial::zero(n);
    for (k, &c) in cols.iter().enumerate() {
        if m[row][c].is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let minor = &m[row][c] * &laplace_det(m, row + 1, &rest, n);
        if k % 2 == 0 {
            acc.add_assign_ref(&minor);
        } else {
            acc = &acc - &minor;
        }
    }
    acc
}

impl fmt::Display for Endo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, p) in self.images.iter().enumerate() {
            if k > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl From<Endo> for String {
    fn from(e: Endo) -> String {
        e.to_string()
    }
}

impl TryFrom<String> for Endo {
    type Error = AutomorphismError;
    fn try_from(s: String) -> Result<Endo, AutomorphismError> {
        let n = s.split(';').count();
        Endo::parse(&s, n)
    }
}

/// `compose(phi, psi)(x_i) = psi_i(phi)`.
pub fn compose(phi: &Endo, psi: &Endo) -> Result<Endo, AutomorphismError> {
    if phi.nvars() != psi.nvars() {
        return Err(AutomorphismError::Arity { left: phi.nvars(), right: psi.nvars() });
    }
    Ok(Endo { images: psi.images.iter().map(|p| p.subst(&phi.images)).collect() })
}

/// Data of `sigma(i, alpha, f)`: `x_i -> alpha x_i + f`, other variables fixed.
/// The index is 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ElementaryData {
    #[serde(rename = "i")]
    pub index: usize,
    #[serde(with = "rational_string")]
    pub alpha: Rational,
    #[serde(with = "poly_string")]
    pub f: Polynomial,
}

impl ElementaryData {
    pub fn new(index: usize, alpha: Rational, f: Polynomial) -> Result<Self, AutomorphismError> {
        let d = ElementaryData { index, alpha, f };
        d.validate()?;
        Ok(d)
    }

    pub fn nvars(&self) -> usize {
        self.f.nvars()
    }

    pub fn validate(&self) -> Result<(), AutomorphismError> {
        let n = self.f.nvars();
        if self.index == 0 || self.index > n {
            return Err(AutomorphismError::IndexOutOfRange { index: self.index, nvars: n });
        }
        if self.alpha.is_zero() {
            return Err(AutomorphismError::ZeroAlpha);
        }
        if self.f.involves(self.index - 1) {
            return Err(AutomorphismError::InvolvesOwnVariable { index: self.index });
        }
        Ok(())
    }

    pub fn is_identity(&self) -> bool {
        self.alpha.is_one() && self.f.is_zero()
    }

    pub fn inverse(&self) -> ElementaryData {
        inverse_elementary(self)
    }
}

impl fmt::Display for ElementaryData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s({},{},{})", self.index, self.alpha, self.f)
    }
}

pub fn elementary(d: &ElementaryData) -> Endo {
    Endo::identity(d.nvars()).apply_elementary(d)
}

/// `sigma(i, alpha, f)^{-1} = sigma(i, 1/alpha, -f/alpha)`.
pub fn inverse_elementary(d: &ElementaryData) -> ElementaryData {
    let inv = d.alpha.recip();
    ElementaryData { index: d.index, alpha: inv.clone(), f: d.f.scale(&-inv) }
}

/// The three elementary letters `(ks) = sigma(s,-1,x_k) sigma(k,1,-x_s) sigma(s,1,x_k)`.
pub fn transposition_letters(n: usize, k: usize, s: usize) -> Result<[ElementaryData; 3], AutomorphismError> {
    if k == s {
        return Err(AutomorphismError::SameIndex(k));
    }
    for idx in [k, s] {
        if idx == 0 || idx > n {
            return Err(AutomorphismError::IndexOutOfRange { index: idx, nvars: n });
        }
    }
    let xk = Polynomial::var(n, k - 1);
    let xs = Polynomial::var(n, s - 1);
    Ok([
        ElementaryData { index: s, alpha: -Rational::one(), f: xk.clone() },
        ElementaryData { index: k, alpha: Rational::one(), f: -xs },
        ElementaryData { index: s, alpha: Rational::one(), f: xk },
    ])
}

/// Evaluation of the transposition word: swaps `x_k` and `x_s`.
pub fn transposition(n: usize, k: usize, s: usize) -> Result<Endo, AutomorphismError> {
    let letters = transposition_letters(n, k, s)?;
    Ok(letters.iter().fold(Endo::identity(n), |acc, e| acc.apply_elementary(e)))
}

fn q_nagata() -> Polynomial {
    Polynomial::parse("x1^2 - x2*x3", 3).unwrap()
}

/// `(x + q z, y + 2 q x + q^2 z, z)` with `q = x^2 - y z`.
pub fn nagata() -> Endo {
    let q = q_nagata();
    let (x, y, z) = (Polynomial::var(3, 0), Polynomial::var(3, 1), Polynomial::var(3, 2));
    let two = Rational::from_integer(2.into());
    let f1 = &x + &(&q * &z);
    let f2 = &(&y + &(&q * &x).scale(&two)) + &(&q.pow(2) * &z);
    Endo { images: vec![f1, f2, z] }
}

/// `(x - q z, y - 2 q x + q^2 z, z)`; `q` is invariant under both maps.
pub fn nagata_inverse() -> Endo {
    let q = q_nagata();
    let (x, y, z) = (Polynomial::var(3, 0), Polynomial::var(3, 1), Polynomial::var(3, 2));
    let two = Rational::from_integer(2.into());
    let f1 = &x - &(&q * &z);
    let f2 = &(&y - &(&q * &x).scale(&two)) + &(&q.pow(2) * &z);
    Endo { images: vec![f1, f2, z] }
}

pub(crate) mod rational_string {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    use crate::poly::Rational;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        s.trim().parse::<Rational>().map_err(D::Error::custom)
    }
}

pub(crate) mod poly_string {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    use crate::poly::Polynomial;

    pub fn serialize<S: Serializer>(p: &Polynomial, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&p.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Polynomial, D::Error> {
        let s = String::deserialize(d)?;
        Polynomial::parse(&s, 3).map_err(D::Error::custom)
    }
}
