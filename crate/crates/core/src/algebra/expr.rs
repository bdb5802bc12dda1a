//! Operator expressions in PBW normal form: `sum_w c_w * w` with coefficients
//! written to the left of ordered generator words.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_rational::BigRational;

use super::coeff::{levi_civita, ScalarCoeff};
use super::poly::{gq_i, gq_int, gq_is_zero, join_signed, Gq};
use super::{AlgebraError, Generator, Mode};

pub type Word = Vec<Generator>;

/// Invariant: every word is PBW-sorted and no stored coefficient is zero.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct OperatorExpr {
    terms: BTreeMap<Word, ScalarCoeff>,
}

impl OperatorExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn scalar(c: ScalarCoeff) -> Self {
        let mut e = Self::zero();
        e.push(Vec::new(), c);
        e
    }

    pub fn one() -> Self {
        Self::scalar(ScalarCoeff::one())
    }

    pub fn generator(g: Generator) -> Self {
        let mut e = Self::zero();
        e.push(vec![g], ScalarCoeff::one());
        e
    }

    fn push(&mut self, w: Word, c: ScalarCoeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&w) {
            Some(old) => {
                let sum = old.add(&c);
                if !sum.is_zero() {
                    self.terms.insert(w, sum);
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &ScalarCoeff)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The coefficient if the expression has no generator words.
    pub fn as_scalar(&self) -> Option<ScalarCoeff> {
        match self.terms.len() {
            0 => Some(ScalarCoeff::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    pub fn max_word_len(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.push(w.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        OperatorExpr {
            terms: self.terms.iter().map(|(w, c)| (w.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Left multiplication by a coefficient; no reordering is needed.
    pub fn left_scale(&self, c: &ScalarCoeff) -> Self {
        let mut out = Self::zero();
        for (w, d) in &self.terms {
            out.push(w.clone(), c.mul(d));
        }
        out
    }

    pub fn scale(&self, c: &Gq) -> Self {
        self.left_scale(&ScalarCoeff::from_gq(c.clone()))
    }

    /// Substitutes `P = (0, 0, kappa)` into every coefficient.
    pub fn evaluate_at(&self, kappa: &BigRational) -> Result<Self, AlgebraError> {
        let mut out = Self::zero();
        for (w, c) in &self.terms {
            out.push(w.clone(), c.evaluate_at(kappa)?);
        }
        Ok(out)
    }

    /// Coefficients evaluated in floating point at momentum `k`.
    pub fn eval_coefficients(
        &self,
        k: [f64; 3],
        m: f64,
        mode: Mode,
    ) -> Result<Vec<(Word, num_complex::Complex<f64>)>, AlgebraError> {
        self.terms
            .iter()
            .map(|(w, c)| Ok((w.clone(), c.eval_f64(k, m, mode)?)))
            .collect()
    }
}

impl fmt::Display for OperatorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (w, c) in &self.terms {
            let word: Vec<String> = w.iter().map(Generator::to_string).collect();
            let word = word.join("*");
            let (terms, den) = c.render();
            if terms.len() == 1 {
                let (neg, body) = terms.into_iter().next().unwrap();
                let mut text = match &den {
                    None if body == "1" && !word.is_empty() => String::new(),
                    None => body,
                    Some(d) => format!("{}/{}", body, d),
                };
                if !word.is_empty() {
                    if !text.is_empty() {
                        text.push('*');
                    }
                    text.push_str(&word);
                }
                parts.push((neg, text));
            } else if word.is_empty() {
                match den {
                    None => parts.extend(terms),
                    Some(_) => parts.push((false, format!("({})", c))),
                }
            } else {
                parts.push((false, format!("({})*{}", c, word)));
            }
        }
        write!(f, "{}", join_signed(parts))
    }
}

/// `[x, y]` for basis generators, as constant-coefficient generators.
fn bracket(x: Generator, y: Generator) -> Vec<(Gq, Generator)> {
    let (a, b) = (x.axis(), y.axis());
    let mut out = Vec::new();
    for c in 0..3 {
        let eps = levi_civita(a, b, c);
        if eps == 0 {
            continue;
        }
        let unit = gq_i() * gq_int(eps as i64);
        let (coef, g) = match (x, y) {
            (Generator::J(_), Generator::J(_)) => (unit, Generator::J(c as u8)),
            (Generator::J(_), Generator::K(_)) | (Generator::K(_), Generator::J(_)) => {
                (unit, Generator::K(c as u8))
            }
            (Generator::K(_), Generator::K(_)) => (-unit, Generator::J(c as u8)),
        };
        out.push((coef, g));
    }
    out
}

/// Context for products: the mass mode fixes how generators differentiate
/// coefficients. Holds a cache of sorted words, so it is cheap to reuse.
pub struct Algebra {
    mode: Mode,
    max_word_len: usize,
    sort_memo: RefCell<HashMap<Word, Vec<(Word, Gq)>>>,
    flipped: bool,
}

impl Algebra {
    pub const DEFAULT_MAX_WORD_LEN: usize = 12;

    pub fn new(mode: Mode) -> Self {
        Algebra {
            mode,
            max_word_len: Self::DEFAULT_MAX_WORD_LEN,
            sort_memo: RefCell::new(HashMap::new()),
            flipped: false,
        }
    }

    pub fn with_max_word_len(mut self, n: usize) -> Self {
        self.max_word_len = n;
        self
    }

    /// Flips the sign of `[K1, K2]` (and `[K2, K1]`); a mutation control only.
    pub fn with_flipped_boost_bracket(mut self) -> Self {
        self.flipped = true;
        self.sort_memo.borrow_mut().clear();
        self
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn h(&self) -> OperatorExpr {
        OperatorExpr::scalar(ScalarCoeff::h(self.mode))
    }

    pub fn m(&self) -> OperatorExpr {
        OperatorExpr::scalar(ScalarCoeff::mass(self.mode))
    }

    pub fn p(&self, axis: usize) -> OperatorExpr {
        OperatorExpr::scalar(ScalarCoeff::p(axis))
    }

    pub fn abs_p(&self) -> OperatorExpr {
        OperatorExpr::scalar(ScalarCoeff::abs_p())
    }

    /// `P_a / |P|`
    pub fn phat(&self, axis: usize) -> OperatorExpr {
        let inv = ScalarCoeff::abs_p().inv().expect("|P| is nonzero");
        OperatorExpr::scalar(ScalarCoeff::p(axis).mul(&inv))
    }

    pub fn j(&self, axis: usize) -> OperatorExpr {
        OperatorExpr::generator(Generator::J(axis as u8))
    }

    pub fn k(&self, axis: usize) -> OperatorExpr {
        OperatorExpr::generator(Generator::K(axis as u8))
    }

    pub fn int(&self, n: i64) -> OperatorExpr {
        OperatorExpr::scalar(ScalarCoeff::int(n))
    }

    pub fn i(&self) -> OperatorExpr {
        OperatorExpr::scalar(ScalarCoeff::i())
    }

    fn bracket(&self, x: Generator, y: Generator) -> Vec<(Gq, Generator)> {
        let mut out = bracket(x, y);
        if self.flipped
            && matches!((x, y), (Generator::K(0), Generator::K(1)) | (Generator::K(1), Generator::K(0)))
        {
            for (c, _) in out.iter_mut() {
                *c = -c.clone();
            }
        }
        out
    }

    /// Normal-orders a product of generators; the result has constant
    /// coefficients because the structure constants are constants.
    fn sort_word(&self, w: &[Generator]) -> Vec<(Word, Gq)> {
        if let Some(hit) = self.sort_memo.borrow().get(w) {
            return hit.clone();
        }
        let pos = (0..w.len().saturating_sub(1)).find(|&i| w[i] > w[i + 1]);
        let result = match pos {
            None => vec![(w.to_vec(), gq_int(1))],
            Some(i) => {
                let mut acc: BTreeMap<Word, Gq> = BTreeMap::new();
                let mut swapped = w.to_vec();
                swapped.swap(i, i + 1);
                for (u, c) in self.sort_word(&swapped) {
                    add_gq(&mut acc, u, c);
                }
                for (c, g) in self.bracket(w[i], w[i + 1]) {
                    let mut shorter = w[..i].to_vec();
                    shorter.push(g);
                    shorter.extend_from_slice(&w[i + 2..]);
                    for (u, d) in self.sort_word(&shorter) {
                        add_gq(&mut acc, u, c.clone() * d);
                    }
                }
                acc.into_iter().collect()
            }
        };
        self.sort_memo
            .borrow_mut()
            .insert(w.to_vec(), result.clone());
        result
    }

    /// `w * c` rewritten as `sum c_i * w_i` with each `w_i` a subword of `w`.
    fn word_times_coeff(&self, w: &[Generator], c: &ScalarCoeff) -> Vec<(ScalarCoeff, Word)> {
        if c.is_zero() {
            return Vec::new();
        }
        let Some((&x, rest)) = w.split_last() else {
            return vec![(c.clone(), Vec::new())];
        };
        let mut out: Vec<(ScalarCoeff, Word)> = self
            .word_times_coeff(rest, c)
            .into_iter()
            .map(|(d, mut u)| {
                u.push(x);
                (d, u)
            })
            .collect();
        let dc = c.derive(x, self.mode);
        out.extend(self.word_times_coeff(rest, &dc));
        out
    }

    pub fn mul(&self, a: &OperatorExpr, b: &OperatorExpr) -> Result<OperatorExpr, AlgebraError> {
        let mut out = OperatorExpr::zero();
        for (wa, ca) in &a.terms {
            for (wb, cb) in &b.terms {
                let len = wa.len() + wb.len();
                if len > self.max_word_len {
                    return Err(AlgebraError::TooLarge {
                        len,
                        max: self.max_word_len,
                    });
                }
                for (c, mut u) in self.word_times_coeff(wa, cb) {
                    let lead = ca.mul(&c);
                    u.extend_from_slice(wb);
                    for (v, k) in self.sort_word(&u) {
                        out.push(v, lead.scale(&k));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_all(&self, factors: &[&OperatorExpr]) -> Result<OperatorExpr, AlgebraError> {
        let mut acc = OperatorExpr::one();
        for f in factors {
            acc = self.mul(&acc, f)?;
        }
        Ok(acc)
    }

    pub fn commutator(
        &self,
        a: &OperatorExpr,
        b: &OperatorExpr,
    ) -> Result<OperatorExpr, AlgebraError> {
        Ok(self.mul(a, b)?.sub(&self.mul(b, a)?))
    }

    /// Non-negative powers of any expression, negative powers of scalars.
    pub fn pow(&self, a: &OperatorExpr, n: i32) -> Result<OperatorExpr, AlgebraError> {
        if n < 0 {
            let c = a.as_scalar().ok_or_else(|| {
                AlgebraError::MalformedCoefficient(
                    "negative power of an operator with generator words".into(),
                )
            })?;
            return Ok(OperatorExpr::scalar(c.pow(n)?));
        }
        let mut acc = OperatorExpr::one();
        for _ in 0..n {
            acc = self.mul(&acc, a)?;
        }
        Ok(acc)
    }

    /// Anti-automorphism fixing `H`, `P`, `J`, `K` and conjugating `i`.
    pub fn adjoint(&self, e: &OperatorExpr) -> Result<OperatorExpr, AlgebraError> {
        let mut out = OperatorExpr::zero();
        for (w, c) in &e.terms {
            let mut rev = OperatorExpr::zero();
            let mut r = w.clone();
            r.reverse();
            for (v, k) in self.sort_word(&r) {
                rev.push(v, ScalarCoeff::from_gq(k));
            }
            let cc = OperatorExpr::scalar(c.conj());
            out = out.add(&self.mul(&rev, &cc)?);
        }
        Ok(out)
    }
}

fn add_gq(acc: &mut BTreeMap<Word, Gq>, w: Word, c: Gq) {
    let slot = acc.entry(w.clone()).or_insert_with(|| gq_int(0));
    *slot += c;
    if gq_is_zero(slot) {
        acc.remove(&w);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boost_bracket_closes_on_rotation() {
        let alg = Algebra::new(Mode::Massive);
        let c = alg.commutator(&alg.k(0), &alg.k(1)).unwrap();
        assert_eq!(c, alg.j(2).scale(&-gq_i()));
        assert_eq!(c.to_string(), "-i*J[3]");
    }

    #[test]
    fn generators_differentiate_coefficients() {
        let alg = Algebra::new(Mode::Massive);
        let c = alg.commutator(&alg.k(0), &alg.h()).unwrap();
        assert_eq!(c, alg.p(0).scale(&gq_i()));
        let c = alg.commutator(&alg.j(0), &alg.p(1)).unwrap();
        assert_eq!(c, alg.p(2).scale(&gq_i()));
    }

    #[test]
    fn proof_one_commutator_before_pointwise_evaluation() {
        let alg = Algebra::new(Mode::Massive);
        let hinv = alg.pow(&alg.h(), -1).unwrap();
        let a = alg.mul(&hinv, &alg.k(0)).unwrap();
        let b = alg.mul(&hinv, &alg.k(1)).unwrap();
        let lhs = alg.commutator(&a, &b).unwrap();
        let h2 = alg.pow(&alg.h(), -2).unwrap();
        let h3 = alg.pow(&alg.h(), -3).unwrap();
        let inner = alg
            .mul(&alg.p(1), &alg.k(0))
            .unwrap()
            .sub(&alg.mul(&alg.p(0), &alg.k(1)).unwrap());
        let rhs = alg
            .mul(&h2, &alg.j(2))
            .unwrap()
            .scale(&-gq_i())
            .add(&alg.mul(&h3, &inner).unwrap().scale(&gq_i()));
        assert_eq!(lhs.sub(&rhs), OperatorExpr::zero());
    }

    #[test]
    fn word_limit_is_enforced() {
        let alg = Algebra::new(Mode::Massive).with_max_word_len(3);
        let k = alg.k(0);
        let k2 = alg.mul(&k, &k).unwrap();
        assert!(matches!(
            alg.mul(&k2, &k2),
            Err(AlgebraError::TooLarge { len: 4, max: 3 })
        ));
    }
}
