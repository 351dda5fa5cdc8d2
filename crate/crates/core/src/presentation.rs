//! Words in the elementary generators and their evaluation.
//!
//! Text format: letters `s(i,alpha,f)` separated by `;`, a trailing `'`
//! marks an inverse letter, e.g. `s(2,1,x1^2); s(1,1,x2^2)'`.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automorphism::{inverse_elementary, transposition_letters, AutomorphismError, ElementaryData, Endo};
use crate::parse::parse_polynomial_at;
use crate::poly::{Degree, PolyError, Polynomial, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("malformed letter at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Generator(#[from] AutomorphismError),
    #[error("indices must differ")]
    SameIndex,
    #[error("scalar must be nonzero")]
    ZeroScalar,
    #[error("map is not affine")]
    NotAffine,
    #[error("linear part is singular")]
    Singular,
    #[error("word does not evaluate to a permutation of the variables")]
    NotPermutation,
}

/// A generator or its formal inverse.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gen {
    #[serde(flatten)]
    pub data: ElementaryData,
    #[serde(default)]
    pub inverted: bool,
}

impl Gen {
    pub fn plain(data: ElementaryData) -> Gen {
        Gen { data, inverted: false }
    }

    pub fn inverse(&self) -> Gen {
        Gen { data: self.data.clone(), inverted: !self.inverted }
    }

    /// The generator data this letter evaluates to.
    pub fn normalized(&self) -> ElementaryData {
        if self.inverted {
            inverse_elementary(&self.data)
        } else {
            self.data.clone()
        }
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.data)?;
        if self.inverted {
            write!(f, "'")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Word {
    nvars: usize,
    letters: Vec<Gen>,
}

impl Word {
    pub fn empty(nvars: usize) -> Word {
        Word { nvars, letters: Vec::new() }
    }

    pub fn new(nvars: usize, letters: Vec<Gen>) -> Word {
        debug_assert!(letters.iter().all(|g| g.data.nvars() == nvars));
        Word { nvars, letters }
    }

    pub fn from_data(nvars: usize, data: impl IntoIterator<Item = ElementaryData>) -> Word {
        Word::new(nvars, data.into_iter().map(Gen::plain).collect())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn letters(&self) -> &[Gen] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn push(&mut self, g: Gen) {
        self.letters.push(g);
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend(other.letters.iter().cloned());
        Word { nvars: self.nvars, letters }
    }

    /// Formal inverse: reversed order, every letter inverted.
    pub fn inverse(&self) -> Word {
        Word { nvars: self.nvars, letters: self.letters.iter().rev().map(Gen::inverse).collect() }
    }

    pub fn parse(text: &str, nvars: usize) -> Result<Word, WordError> {
        let mut letters = Vec::new();
        let mut offset = 0;
        if text.trim().is_empty() {
            return Ok(Word::empty(nvars));
        }
        for part in text.split(';') {
            letters.push(parse_letter(part, offset, nvars)?);
            offset += part.len() + 1;
        }
        Ok(Word { nvars, letters })
    }
}

fn parse_letter(part: &str, offset: usize, nvars: usize) -> Result<Gen, WordError> {
    let lead = part.len() - part.trim_start().len();
    let body = part.trim();
    let start = offset + lead;
    let err = |pos: usize, msg: &str| WordError::Syntax { pos, msg: msg.to_string() };
    let (body, inverted) = match body.strip_suffix('\'') {
        Some(b) => (b.trim_end(), true),
        None => (body, false),
    };
    let inner = body
        .strip_prefix("s(")
        .and_then(|b| b.strip_suffix(')'))
        .ok_or_else(|| err(start, "expected s(i,alpha,f)"))?;
    let inner_start = start + 2;
    let mut fields = inner.splitn(3, ',');
    let (Some(i_txt), Some(a_txt), Some(f_txt)) = (fields.next(), fields.next(), fields.next()) else {
        return Err(err(inner_start, "expected three comma-separated fields"));
    };
    let index: usize = i_txt.trim().parse().map_err(|_| err(inner_start, "index must be a positive integer"))?;
    let a_off = inner_start + i_txt.len() + 1;
    let alpha_poly = parse_polynomial_at(a_txt, nvars, a_off)?;
    if !alpha_poly.is_constant() {
        return Err(err(a_off, "alpha must be a rational constant"));
    }
    let f = parse_polynomial_at(f_txt, nvars, a_off + a_txt.len() + 1)?;
    let data = ElementaryData::new(index, alpha_poly.constant_term(), f)?;
    Ok(Gen { data, inverted })
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, g) in self.letters.iter().enumerate() {
            if k > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Word, D::Error> {
        let s = String::deserialize(d)?;
        Word::parse(&s, 3).map_err(serde::de::Error::custom)
    }
}

/// The evaluation homomorphism: letters are multiplied left to right.
pub fn evaluate(w: &Word) -> Endo {
    w.letters.iter().fold(Endo::identity(w.nvars), |acc, g| acc.apply_elementary(&g.normalized()))
}

/// True iff the word evaluates to the identity.
pub fn word_problem(w: &Word) -> bool {
    evaluate(w).is_identity()
}

/// Merge adjacent letters with equal index,
/// `s(i,a,f) s(i,b,g) = s(i, a b, b f + g)`, and drop identity letters.
pub fn rewrite_merge(w: &Word) -> Word {
    let mut out: Vec<ElementaryData> = Vec::with_capacity(w.len());
    for g in &w.letters {
        let mut cur = g.normalized();
        while let Some(last) = out.last() {
            if last.index != cur.index {
                break;
            }
            let last = out.pop().unwrap();
            let mut f = last.f.scale(&cur.alpha);
            f.add_assign_ref(&cur.f);
            cur = ElementaryData { index: cur.index, alpha: &last.alpha * &cur.alpha, f };
        }
        if !cur.is_identity() {
            out.push(cur);
        }
    }
    Word::from_data(w.nvars, out)
}

/// Move the letter at `pos` one step right past its neighbour:
/// `s(i,a,f) s(j,b,g) = s(j, b, s(i,a,f)(g)) s(i,a,f)` when `i != j` and `f`
/// involves neither `x_i` nor `x_j`. Inverted letters are normalized first.
pub fn rewrite_commute(w: &Word, pos: usize) -> Option<Word> {
    if pos + 1 >= w.len() {
        return None;
    }
    let a = w.letters[pos].normalized();
    let b = w.letters[pos + 1].normalized();
    if a.index == b.index || a.f.involves(b.index - 1) {
        return None;
    }
    let s_images = crate::automorphism::elementary(&a).into_images();
    let moved = ElementaryData { index: b.index, alpha: b.alpha.clone(), f: b.f.subst(&s_images) };
    let mut letters = w.letters.clone();
    letters[pos] = Gen::plain(moved);
    letters[pos + 1] = Gen::plain(a);
    Some(Word { nvars: w.nvars, letters })
}

/// Index map of a word that evaluates to a permutation of the variables:
/// `p[i] = k` when `x_{i+1}` is sent to `x_{k+1}`.
pub fn permutation_of(w: &Word) -> Result<Vec<usize>, WordError> {
    let e = evaluate(w);
    let n = w.nvars;
    let mut p = Vec::with_capacity(n);
    for img in e.images() {
        let k = (0..n).find(|&k| *img == Polynomial::var(n, k)).ok_or(WordError::NotPermutation)?;
        p.push(k);
    }
    Ok(p)
}

/// Conjugate every letter by the permutation `P` that `perm_word` evaluates
/// to: `P^{-1} s(i,a,f) P = s(p(i), a, P(f))` for involutions, and in general
/// `s(q(i), a, f(x_{q(k)}))` with `q = p^{-1}`. The result evaluates to
/// `P^{-1} evaluate(w) P`.
pub fn rewrite_perm_conj(w: &Word, perm_word: &Word) -> Result<Word, WordError> {
    let p = permutation_of(perm_word)?;
    let n = w.nvars;
    let mut q = vec![0; n];
    for (i, &k) in p.iter().enumerate() {
        q[k] = i;
    }
    let letters = w
        .letters
        .iter()
        .map(|g| {
            let d = &g.data;
            let data = ElementaryData { index: q[d.index - 1] + 1, alpha: d.alpha.clone(), f: d.f.rename(n, &q) };
            Gen { data, inverted: g.inverted }
        })
        .collect();
    Ok(Word { nvars: n, letters })
}

/// `(ks) = s(s,-1,x_k) s(k,1,-x_s) s(s,1,x_k)`.
pub fn transposition_word(n: usize, k: usize, s: usize) -> Result<Word, WordError> {
    Ok(Word::from_data(n, transposition_letters(n, k, s)?))
}

fn check_pair(i: usize, j: usize) -> Result<(), WordError> {
    if i == j {
        Err(WordError::SameIndex)
    } else {
        Ok(())
    }
}

/// `X_ij(l) = s(j, 1, l x_i)`.
pub fn steinberg_x(n: usize, i: usize, j: usize, lambda: &Rational) -> Result<Word, WordError> {
    check_pair(i, j)?;
    let data = ElementaryData::new(j, Rational::one(), Polynomial::var(n, i - 1).scale(lambda))?;
    Ok(Word::from_data(n, [data]))
}

/// `w_ij(u) = X_ij(u) X_ji(-1/u) X_ij(u)`.
pub fn steinberg_w(n: usize, i: usize, j: usize, u: &Rational) -> Result<Word, WordError> {
    if u.is_zero() {
        return Err(WordError::ZeroScalar);
    }
    let x = steinberg_x(n, i, j, u)?;
    Ok(x.concat(&steinberg_x(n, j, i, &-u.recip())?).concat(&x))
}

/// `h_ij(u) = w_ij(u) w_ij(-1)`.
pub fn steinberg_h(n: usize, i: usize, j: usize, u: &Rational) -> Result<Word, WordError> {
    Ok(steinberg_w(n, i, j, u)?.concat(&steinberg_w(n, i, j, &-Rational::one())?))
}

/// `{u,v} = h_ij(uv) h_ij(u)^{-1} h_ij(v)^{-1}`.
pub fn steinberg_commutator(n: usize, i: usize, j: usize, u: &Rational, v: &Rational) -> Result<Word, WordError> {
    if u.is_zero() || v.is_zero() {
        return Err(WordError::ZeroScalar);
    }
    Ok(steinberg_h(n, i, j, &(u * v))?
        .concat(&steinberg_h(n, i, j, u)?.inverse())
        .concat(&steinberg_h(n, i, j, v)?.inverse()))
}

/// Affine coefficients of a map: `theta_i = sum_j a[i][j] x_j + c[i]`.
fn affine_parts(theta: &Endo) -> Result<(Vec<Vec<Rational>>, Vec<Rational>), WordError> {
    let n = theta.nvars();
    let mut a = vec![vec![Rational::zero(); n]; n];
    let mut c = vec![Rational::zero(); n];
    for (i, p) in theta.images().iter().enumerate() {
        if p.total_degree() > Degree::Finite(1) {
            return Err(WordError::NotAffine);
        }
        c[i] = p.constant_term();
        for (j, aij) in a[i].iter_mut().enumerate() {
            *aij = p.coefficient(&crate::poly::Monomial::var(n, j));
        }
    }
    Ok((a, c))
}

/// Word of elementary affine generators evaluating to the invertible affine
/// map `theta`.
///
/// `theta` is reduced to the identity by right multiplication with
/// elementary letters (translations first, then Gauss-Jordan on the linear
/// part); the answer is the reversed list of inverse letters. A map that is a
/// pure permutation of the variables is written as a product of
/// transposition words instead.
pub fn affine_decompose(theta: &Endo) -> Result<Word, WordError> {
    let n = theta.nvars();
    let (mut a, c) = affine_parts(theta)?;
    if let Some(w) = permutation_decompose(&a, &c) {
        return Ok(w);
    }
    let mut steps: Vec<ElementaryData> = Vec::new();
    for (i, ci) in c.iter().enumerate() {
        if !ci.is_zero() {
            steps.push(ElementaryData { index: i + 1, alpha: Rational::one(), f: Polynomial::constant(n, -ci) });
        }
    }
    let add_row = |a: &mut Vec<Vec<Rational>>, steps: &mut Vec<ElementaryData>, dst: usize, src: usize, l: Rational| {
        for k in 0..n {
            let t = &a[src][k] * &l;
            a[dst][k] += t;
        }
        steps.push(ElementaryData { index: dst + 1, alpha: Rational::one(), f: Polynomial::var(n, src).scale(&l) });
    };
    for k in 0..n {
        if a[k][k].is_zero() {
            let r = (k + 1..n).find(|&r| !a[r][k].is_zero()).ok_or(WordError::Singular)?;
            add_row(&mut a, &mut steps, k, r, Rational::one());
        }
        if !a[k][k].is_one() {
            let inv = a[k][k].recip();
            for v in a[k].iter_mut() {
                *v *= &inv;
            }
            steps.push(ElementaryData { index: k + 1, alpha: inv, f: Polynomial::zero(n) });
        }
        for r in 0..n {
            if r != k && !a[r][k].is_zero() {
                let l = -a[r][k].clone();
                add_row(&mut a, &mut steps, r, k, l);
            }
        }
    }
    let word = Word::from_data(n, steps.iter().rev().map(inverse_elementary));
    debug_assert_eq!(evaluate(&word), *theta);
    Ok(word)
}

fn permutation_decompose(a: &[Vec<Rational>], c: &[Rational]) -> Option<Word> {
    let n = a.len();
    if c.iter().any(|x| !x.is_zero()) {
        return None;
    }
    let mut p = Vec::with_capacity(n);
    for row in a {
        let ones: Vec<usize> = (0..n).filter(|&j| !row[j].is_zero()).collect();
        if ones.len() != 1 || !row[ones[0]].is_one() {
            return None;
        }
        p.push(ones[0]);
    }
    // p = t_1 o t_2 o ... o t_r, peeled off from the left
    let mut cur = p;
    let mut word = Word::empty(n);
    for i in 0..n {
        let j = cur[i];
        if j != i {
            word = word.concat(&transposition_word(n, i + 1, j + 1).ok()?);
            for v in cur.iter_mut() {
                if *v == i {
                    *v = j;
                } else if *v == j {
                    *v = i;
                }
            }
        }
    }
    Some(word)
}

/// Best-effort normal form: merge, move translation letters left where the
/// commutation relation allows, merge again. Evaluation is preserved.
pub fn normalize(w: &Word) -> Word {
    let mut cur = rewrite_merge(w);
    let is_translation = |g: &Gen| g.data.alpha.is_one() && g.data.f.is_constant();
    let mut changed = true;
    while changed {
        changed = false;
        for pos in 0..cur.len().saturating_sub(1) {
            if !is_translation(&cur.letters[pos]) && is_translation(&cur.letters[pos + 1]) {
                if let Some(next) = rewrite_commute(&cur, pos) {
                    cur = next;
                    changed = true;
                }
            }
        }
    }
    rewrite_merge(&cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automorphism::compose;
    use crate::poly::{rat, ratio};

    fn p(s: &str) -> Polynomial {
        Polynomial::parse(s, 3).unwrap()
    }

    fn w(s: &str) -> Word {
        Word::parse(s, 3).unwrap()
    }

    #[test]
    fn evaluation_examples() {
        assert!(evaluate(&Word::empty(3)).is_identity());
        assert_eq!(
            evaluate(&w("s(2,1,x1^2); s(1,1,x2^2)")),
            Endo::parse("x1 + (x2 + x1^2)^2; x2 + x1^2; x3", 3).unwrap()
        );
        assert_eq!(evaluate(&transposition_word(3, 1, 2).unwrap()), Endo::parse("x2; x1; x3", 3).unwrap());
    }

    #[test]
    fn word_text_roundtrip_and_errors() {
        let word = w("s(2,1,x1^2); s(1,-1/2,x2^2 - 3)'");
        assert_eq!(word.len(), 2);
        assert!(word.letters()[1].inverted);
        assert_eq!(Word::parse(&word.to_string(), 3).unwrap(), word);
        assert!(matches!(Word::parse("s(1,1,x1)", 3), Err(WordError::Generator(_))));
        assert!(matches!(Word::parse("t(1,1,x2)", 3), Err(WordError::Syntax { pos: 0, .. })));
        assert!(matches!(
            Word::parse("s(1,1,x2); s(2,1,x7)", 3),
            Err(WordError::Poly(PolyError::UnknownVariable { pos: 17, .. }))
        ));
        assert!(Word::parse("s(1,x2,x3)", 3).is_err());
    }

    #[test]
    fn merge_examples() {
        assert_eq!(rewrite_merge(&w("s(1,2,x2); s(1,3,x2^2)")), w("s(1,6,3*x2 + x2^2)"));
        assert!(rewrite_merge(&w("s(1,5,x2*x3); s(1,5,x2*x3)'")).is_empty());
        let unchanged = w("s(1,1,x2); s(2,1,x3)");
        assert_eq!(rewrite_merge(&unchanged), unchanged);
        let cascade = w("s(1,2,x2); s(2,1,x3); s(2,1,x3)'; s(1,1/2,0)");
        let merged = rewrite_merge(&cascade);
        assert_eq!(merged, w("s(1,1,1/2*x2)"));
        assert_eq!(evaluate(&merged), evaluate(&cascade));
    }

    #[test]
    fn commute_examples() {
        let word = w("s(1,2,x3^2 + 1); s(2,3,x1*x3 - x1^2)");
        let swapped = rewrite_commute(&word, 0).unwrap();
        assert_eq!(swapped.letters()[0].data.index, 2);
        assert_eq!(swapped.letters()[0].data.f, p("(2*x1 + x3^2 + 1)*x3 - (2*x1 + x3^2 + 1)^2"));
        assert_eq!(evaluate(&swapped), evaluate(&word));
        assert!(rewrite_commute(&w("s(1,1,x2); s(2,1,x3)"), 0).is_none());
        let plain = w("s(1,1,x3); s(2,1,x3^2)");
        assert_eq!(rewrite_commute(&plain, 0).unwrap(), w("s(2,1,x3^2); s(1,1,x3)"));
    }

    #[test]
    fn conjugated_form_of_commutation() {
        // s^{-1} t s = s(j, b, s^{-1}(g))
        let s = ElementaryData::new(1, rat(3), p("x3 - 2")).unwrap();
        let t = ElementaryData::new(2, rat(-1), p("x1^2 + x3")).unwrap();
        let lhs = Word::new(3, vec![Gen { data: s.clone(), inverted: true }, Gen::plain(t.clone()), Gen::plain(s.clone())]);
        let s_inv = crate::automorphism::elementary(&s.inverse());
        let rhs = Word::from_data(3, [ElementaryData::new(2, rat(-1), s_inv.apply(&t.f)).unwrap()]);
        assert_eq!(evaluate(&lhs), evaluate(&rhs));
    }

    #[test]
    fn permutation_conjugation() {
        let t12 = transposition_word(3, 1, 2).unwrap();
        let word = w("s(1,5,x2^2*x3 + x3)");
        let conj = rewrite_perm_conj(&word, &t12).unwrap();
        assert_eq!(conj, w("s(2,5,x1^2*x3 + x3)"));
        let direct = t12.inverse().concat(&word).concat(&t12);
        assert_eq!(evaluate(&conj), evaluate(&direct));
        assert_eq!(rewrite_perm_conj(&conj, &t12).unwrap(), word);
        let third = rewrite_perm_conj(&w("s(3,2,x1 - x2^2)"), &t12).unwrap();
        assert_eq!(third, w("s(3,2,x2 - x1^2)"));
        assert!(rewrite_perm_conj(&word, &w("s(1,1,x2)")).is_err());
    }

    #[test]
    fn symmetric_group_relations() {
        let t = |k, s| transposition_word(3, k, s).unwrap();
        for (k, s) in [(1, 2), (1, 3), (2, 3), (2, 1), (3, 1), (3, 2)] {
            assert!(word_problem(&t(k, s).concat(&t(k, s))));
            assert_eq!(evaluate(&t(k, s)), evaluate(&t(s, k)));
        }
        // (ik)^{(is)} = (ks)
        let (i, k, s) = (1, 2, 3);
        let conj = t(i, s).inverse().concat(&t(i, k)).concat(&t(i, s));
        assert_eq!(evaluate(&conj), evaluate(&t(k, s)));
    }

    #[test]
    fn steinberg_words() {
        let u = ratio(-3, 5);
        let h = steinberg_h(3, 1, 2, &u).unwrap();
        assert_eq!(evaluate(&h), Endo::parse("-3/5*x1; -5/3*x2; x3", 3).unwrap());
        let pair = Word::from_data(
            3,
            [
                ElementaryData::new(1, u.clone(), Polynomial::zero(3)).unwrap(),
                ElementaryData::new(2, u.recip(), Polynomial::zero(3)).unwrap(),
            ],
        );
        assert_eq!(evaluate(&h), evaluate(&pair));
        assert_eq!(evaluate(&steinberg_w(3, 1, 2, &rat(1)).unwrap()), Endo::parse("-x2; x1; x3", 3).unwrap());
        assert!(word_problem(&steinberg_commutator(3, 1, 2, &rat(2), &rat(3)).unwrap()));
        assert_eq!(steinberg_h(3, 1, 2, &rat(0)), Err(WordError::ZeroScalar));
        assert_eq!(steinberg_x(3, 2, 2, &rat(1)), Err(WordError::SameIndex));
    }

    #[test]
    fn affine_decomposition() {
        assert!(affine_decompose(&Endo::identity(3)).unwrap().is_empty());
        let swap = Endo::parse("x2; x1; x3", 3).unwrap();
        assert_eq!(affine_decompose(&swap).unwrap(), transposition_word(3, 1, 2).unwrap());
        let cyc = Endo::parse("x3; x1; x2", 3).unwrap();
        assert_eq!(evaluate(&affine_decompose(&cyc).unwrap()), cyc);
        for text in ["2*x1 + x2 + 1; x2 - 3; x3", "x2 + x3; x1 - 1/2*x3 + 7; -x1 + 4*x2", "x3; 5*x2; x1 + 1"] {
            let theta = Endo::parse(text, 3).unwrap();
            assert_eq!(evaluate(&affine_decompose(&theta).unwrap()), theta, "{text}");
        }
        assert_eq!(affine_decompose(&Endo::parse("x1 + x2; x1 + x2; x3", 3).unwrap()), Err(WordError::Singular));
        assert_eq!(affine_decompose(&Endo::parse("x1^2; x2; x3", 3).unwrap()), Err(WordError::NotAffine));
    }

    #[test]
    fn normalize_preserves_evaluation() {
        let word = w("s(1,2,x2); s(2,1,5); s(2,1,x3)'; s(3,1,x1); s(3,1,-2)");
        let nf = normalize(&word);
        assert_eq!(evaluate(&nf), evaluate(&word));
        assert!(nf.len() <= word.len());
        let c = compose(&evaluate(&word), &evaluate(&word.inverse())).unwrap();
        assert!(c.is_identity());
    }
}
