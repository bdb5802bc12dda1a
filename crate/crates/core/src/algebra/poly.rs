//! Sparse multivariate polynomials over the Gaussian rationals in the
//! momentum components and the mass symbol.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Gaussian rational `a + b i`.
pub type Gq = Complex<BigRational>;

/// Number of polynomial variables: `P1, P2, P3, m`.
pub const NVARS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    P1 = 0,
    P2 = 1,
    P3 = 2,
    M = 3,
}

impl Var {
    pub const ALL: [Var; NVARS] = [Var::P1, Var::P2, Var::P3, Var::M];

    pub fn momentum(axis: usize) -> Var {
        Var::ALL[axis]
    }
}

pub fn gq_int(n: i64) -> Gq {
    Complex::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
}

pub fn gq_rat(num: i64, den: i64) -> Gq {
    Complex::new(
        BigRational::new(BigInt::from(num), BigInt::from(den)),
        BigRational::zero(),
    )
}

pub fn gq_i() -> Gq {
    Complex::new(BigRational::zero(), BigRational::one())
}

pub fn gq_from_rational(r: BigRational) -> Gq {
    Complex::new(r, BigRational::zero())
}

pub fn gq_is_zero(c: &Gq) -> bool {
    c.re.is_zero() && c.im.is_zero()
}

fn cmp_gq(a: &Gq, b: &Gq) -> Ordering {
    a.re.cmp(&b.re).then_with(|| a.im.cmp(&b.im))
}

/// Exponent vector; graded-lexicographic order (total degree first).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(pub [u16; NVARS]);

impl Monomial {
    pub fn one() -> Self {
        Monomial([0; NVARS])
    }

    pub fn var(v: Var) -> Self {
        let mut e = [0; NVARS];
        e[v as usize] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            *a += *b;
        }
        Monomial(e)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        let mut e = other.0;
        for (a, b) in e.iter_mut().zip(self.0.iter()) {
            *a -= *b;
        }
        Monomial(e)
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
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

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly {
    terms: BTreeMap<Monomial, Gq>,
}

impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        let mut a = self.terms.iter().rev();
        let mut b = other.terms.iter().rev();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some((ma, ca)), Some((mb, cb))) => {
                    let o = ma.cmp(mb).then_with(|| cmp_gq(ca, cb));
                    if o != Ordering::Equal {
                        return o;
                    }
                }
            }
        }
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Gq) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn one() -> Self {
        Poly::constant(gq_int(1))
    }

    pub fn var(v: Var) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::var(v), gq_int(1));
        p
    }

    /// `P1^2 + P2^2 + P3^2`
    pub fn momentum_square() -> Self {
        let mut p = Poly::zero();
        for v in [Var::P1, Var::P2, Var::P3] {
            let mut e = [0; NVARS];
            e[v as usize] = 2;
            p.add_term(Monomial(e), gq_int(1));
        }
        p
    }

    pub fn mass_square() -> Self {
        let mut e = [0; NVARS];
        e[Var::M as usize] = 2;
        let mut p = Poly::zero();
        p.add_term(Monomial(e), gq_int(1));
        p
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Gq)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, m: Monomial, c: Gq) {
        if gq_is_zero(&c) {
            return;
        }
        let remove = match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing = &*existing + &c;
                gq_is_zero(existing)
            }
            None => {
                self.terms.insert(m, c);
                false
            }
        };
        if remove {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    pub fn constant_term(&self) -> Gq {
        self.terms
            .get(&Monomial::one())
            .cloned()
            .unwrap_or_else(|| gq_int(0))
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.im.is_zero())
    }

    pub fn leading(&self) -> Option<(&Monomial, &Gq)> {
        self.terms.iter().next_back()
    }

    pub fn degree_in(&self, v: Var) -> u16 {
        self.terms
            .keys()
            .map(|m| m.0[v as usize])
            .max()
            .unwrap_or(0)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        self.scale(&gq_int(-1))
    }

    pub fn scale(&self, c: &Gq) -> Poly {
        if gq_is_zero(c) {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, x)| (*m, x * c))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    pub fn conj(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (*m, c.conj())).collect(),
        }
    }

    pub fn derivative(&self, v: Var) -> Poly {
        let k = v as usize;
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.0[k];
            if e == 0 {
                continue;
            }
            let mut dm = *m;
            dm.0[k] -= 1;
            out.add_term(dm, c * gq_int(e as i64));
        }
        out
    }

    /// Exact division; `None` when `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        let (lm, lc) = divisor.leading()?;
        let lm = *lm;
        let lc = lc.clone();
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((m, c)) = rem.leading() {
            if !lm.divides(m) {
                return None;
            }
            let qm = lm.quotient_of(m);
            let qc = c / &lc;
            let mut step = Poly::zero();
            step.add_term(qm, qc.clone());
            rem = rem.sub(&step.mul(divisor));
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// Divides by the leading coefficient; returns the monic poly and that coefficient.
    pub fn monic(&self) -> (Poly, Gq) {
        match self.leading() {
            None => (Poly::zero(), gq_int(1)),
            Some((_, lc)) => {
                let lc = lc.clone();
                let inv = gq_int(1) / &lc;
                (self.scale(&inv), lc)
            }
        }
    }

    pub fn substitute(&self, v: Var, value: &Gq) -> Poly {
        let k = v as usize;
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.0[k];
            let mut nm = *m;
            nm.0[k] = 0;
            let mut f = c.clone();
            for _ in 0..e {
                f = &f * value;
            }
            out.add_term(nm, f);
        }
        out
    }

    /// Numerical evaluation at `vals = [P1, P2, P3, m]`.
    pub fn eval_f64(&self, vals: &[f64; NVARS]) -> Complex<f64> {
        let mut acc = Complex::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = 1.0;
            for (e, x) in m.0.iter().zip(vals.iter()) {
                t *= x.powi(*e as i32);
            }
            acc += Complex::new(rat_to_f64(&c.re), rat_to_f64(&c.im)) * t;
        }
        acc
    }
}

pub fn rat_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

const VAR_TEXT: [&str; NVARS] = ["P[1]", "P[2]", "P[3]", "m"];

pub(crate) fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Formats a single monomial (without coefficient) as a product of atoms.
pub(crate) fn fmt_monomial(m: &Monomial) -> Vec<String> {
    let mut atoms = Vec::new();
    for (k, &e) in m.0.iter().enumerate() {
        match e {
            0 => {}
            1 => atoms.push(VAR_TEXT[k].to_string()),
            _ => atoms.push(format!("Pow({},{})", VAR_TEXT[k], e)),
        }
    }
    atoms
}

/// Renders `c * atoms` as a signed term; the sign is returned separately so
/// callers can join terms with ` + ` / ` - `.
pub(crate) fn fmt_signed_term(c: &Gq, atoms: &[String]) -> (bool, String) {
    let (negative, body) = if c.im.is_zero() {
        let neg = c.re.is_negative();
        let a = c.re.abs();
        if a.is_one() && !atoms.is_empty() {
            (neg, String::new())
        } else {
            (neg, fmt_rational(&a))
        }
    } else if c.re.is_zero() {
        let neg = c.im.is_negative();
        let a = c.im.abs();
        if a.is_one() {
            (neg, "i".to_string())
        } else {
            (neg, format!("{}*i", fmt_rational(&a)))
        }
    } else {
        let sign = if c.im.is_negative() { "-" } else { "+" };
        (
            false,
            format!(
                "({} {} {}*i)",
                fmt_rational(&c.re),
                sign,
                fmt_rational(&c.im.abs())
            ),
        )
    };
    let mut parts = Vec::new();
    if !body.is_empty() {
        parts.push(body);
    }
    parts.extend(atoms.iter().cloned());
    (negative, parts.join("*"))
}

pub(crate) fn join_signed(terms: Vec<(bool, String)>) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (idx, (neg, body)) in terms.into_iter().enumerate() {
        if idx == 0 {
            if neg {
                out.push('-');
            }
        } else if neg {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        out.push_str(&body);
    }
    out
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| fmt_signed_term(c, &fmt_monomial(m)))
            .collect();
        write!(f, "{}", join_signed(terms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: Var) -> Poly {
        Poly::var(v)
    }

    #[test]
    fn exact_division_recovers_factor() {
        let a = p(Var::P1).add(&p(Var::M));
        let b = Poly::momentum_square().add(&Poly::mass_square());
        let prod = a.mul(&b);
        assert_eq!(prod.div_exact(&b).unwrap(), a);
        assert_eq!(prod.div_exact(&a).unwrap(), b);
        assert!(a.div_exact(&b).is_none());
    }

    #[test]
    fn derivative_and_substitution() {
        let s = Poly::momentum_square();
        assert_eq!(s.derivative(Var::P2), p(Var::P2).scale(&gq_int(2)));
        let at = s.substitute(Var::P1, &gq_int(0)).substitute(Var::P2, &gq_int(0));
        assert_eq!(at.substitute(Var::P3, &gq_int(3)), Poly::constant(gq_int(9)));
    }

    #[test]
    fn display_is_signed_sum() {
        let e = p(Var::P1).scale(&gq_int(-2)).add(&Poly::constant(gq_i()));
        assert_eq!(e.to_string(), "-2*P[1] + i");
    }
}
