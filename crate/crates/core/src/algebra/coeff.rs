//! Exact scalar coefficients: rational functions of the momentum components
//! and the mass, extended by `H = sqrt(|P|^2 + m^2)` and `R = |P|`.
//!
//! A coefficient is stored as `(n0 + n1 H + n2 R + n3 H R) / d` where the
//! `n*` are polynomials in `P1, P2, P3, m` over the Gaussian rationals and `d`
//! is a product of monic real polynomial factors. `H` and `R` never occur in
//! denominators: inverses are rationalized by multiplying through with the
//! conjugates `H -> -H`, `R -> -R` and `i -> -i`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex;
use num_rational::BigRational;

use super::poly::{
    fmt_monomial, fmt_signed_term, gq_i, gq_int, gq_is_zero, join_signed, Gq, Poly, Var,
};
use super::{AlgebraError, Generator, Mode};

const ONE: usize = 0;
const HB: usize = 1;
const RB: usize = 2;
const HRB: usize = 3;

type Num = [Poly; 4];

fn zero_num() -> Num {
    [Poly::zero(), Poly::zero(), Poly::zero(), Poly::zero()]
}

fn num_is_zero(n: &Num) -> bool {
    n.iter().all(Poly::is_zero)
}

fn mul_num(a: &Num, b: &Num) -> Num {
    let s = Poly::momentum_square();
    let t = s.add(&Poly::mass_square());
    let mut out = zero_num();
    for i in 0..4 {
        if a[i].is_zero() {
            continue;
        }
        for j in 0..4 {
            if b[j].is_zero() {
                continue;
            }
            let mut p = a[i].mul(&b[j]);
            let h = (i & 1) + (j & 1);
            let r = (i >> 1) + (j >> 1);
            if h == 2 {
                p = p.mul(&t);
            }
            if r == 2 {
                p = p.mul(&s);
            }
            let idx = (h % 2) | ((r % 2) << 1);
            out[idx] = out[idx].add(&p);
        }
    }
    out
}

fn scale_num(a: &Num, p: &Poly) -> Num {
    [a[0].mul(p), a[1].mul(p), a[2].mul(p), a[3].mul(p)]
}

fn known_factors() -> Vec<Poly> {
    let s = Poly::momentum_square();
    vec![
        Poly::var(Var::M),
        s.clone(),
        s.add(&Poly::mass_square()),
        Poly::var(Var::P1),
        Poly::var(Var::P2),
        Poly::var(Var::P3),
    ]
}

/// Splits a nonzero real polynomial into `scalar * prod(factor^exp)` with
/// monic factors, peeling off the recognised atoms first.
fn factorize(p: &Poly) -> (Gq, BTreeMap<Poly, u32>) {
    let mut rest = p.clone();
    let mut den = BTreeMap::new();
    for atom in known_factors() {
        let mut e = 0;
        while let Some(q) = rest.div_exact(&atom) {
            if q.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            den.insert(atom, e);
        }
    }
    if rest.is_constant() {
        (rest.constant_term(), den)
    } else {
        let (monic, lc) = rest.monic();
        *den.entry(monic).or_insert(0) += 1;
        (lc, den)
    }
}

fn den_product(den: &BTreeMap<Poly, u32>) -> Poly {
    let mut out = Poly::one();
    for (f, e) in den {
        out = out.mul(&f.pow(*e));
    }
    out
}

#[derive(Clone, Debug)]
pub struct ScalarCoeff {
    num: Num,
    den: BTreeMap<Poly, u32>,
}

impl PartialEq for ScalarCoeff {
    fn eq(&self, other: &Self) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        self.sub(other).is_zero()
    }
}

impl ScalarCoeff {
    fn from_parts(num: Num, den: BTreeMap<Poly, u32>) -> Self {
        ScalarCoeff { num, den }.canonical()
    }

    fn canonical(mut self) -> Self {
        if num_is_zero(&self.num) {
            self.den.clear();
            return self;
        }
        let factors: Vec<Poly> = self.den.keys().cloned().collect();
        for f in factors {
            loop {
                let e = self.den[&f];
                if e == 0 {
                    break;
                }
                let divided: Option<Vec<Poly>> =
                    self.num.iter().map(|n| n.div_exact(&f)).collect();
                match divided {
                    Some(q) => {
                        self.num = [q[0].clone(), q[1].clone(), q[2].clone(), q[3].clone()];
                        *self.den.get_mut(&f).unwrap() -= 1;
                    }
                    None => break,
                }
            }
        }
        self.den.retain(|_, e| *e > 0);
        self
    }

    pub fn zero() -> Self {
        ScalarCoeff {
            num: zero_num(),
            den: BTreeMap::new(),
        }
    }

    pub fn from_gq(c: Gq) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn int(n: i64) -> Self {
        Self::from_gq(gq_int(n))
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn i() -> Self {
        Self::from_gq(gq_i())
    }

    pub fn from_rational(r: BigRational) -> Self {
        Self::from_gq(Complex::new(r, num_traits::Zero::zero()))
    }

    pub fn from_poly(p: Poly) -> Self {
        let mut num = zero_num();
        num[ONE] = p;
        ScalarCoeff {
            num,
            den: BTreeMap::new(),
        }
    }

    /// Momentum component `P_a`, `axis` in `0..3`.
    pub fn p(axis: usize) -> Self {
        Self::from_poly(Poly::var(Var::momentum(axis)))
    }

    /// The energy `H`; equal to `|P|` in the massless mode.
    pub fn h(mode: Mode) -> Self {
        match mode {
            Mode::Massive => {
                let mut num = zero_num();
                num[HB] = Poly::one();
                ScalarCoeff {
                    num,
                    den: BTreeMap::new(),
                }
            }
            Mode::Massless => Self::abs_p(),
        }
    }

    /// `|P|`
    pub fn abs_p() -> Self {
        let mut num = zero_num();
        num[RB] = Poly::one();
        ScalarCoeff {
            num,
            den: BTreeMap::new(),
        }
    }

    /// The mass symbol; zero in the massless mode.
    pub fn mass(mode: Mode) -> Self {
        match mode {
            Mode::Massive => Self::from_poly(Poly::var(Var::M)),
            Mode::Massless => Self::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        num_is_zero(&self.num)
    }

    /// The value if this coefficient is a constant Gaussian rational.
    pub fn as_constant(&self) -> Option<Gq> {
        if !self.den.is_empty() {
            return None;
        }
        if !(self.num[HB].is_zero() && self.num[RB].is_zero() && self.num[HRB].is_zero()) {
            return None;
        }
        if self.num[ONE].is_constant() {
            Some(self.num[ONE].constant_term())
        } else {
            None
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        if self.den == other.den {
            let mut num = zero_num();
            for (k, n) in num.iter_mut().enumerate() {
                *n = self.num[k].add(&other.num[k]);
            }
            return Self::from_parts(num, self.den.clone());
        }
        let mut lcm = self.den.clone();
        for (f, e) in &other.den {
            let slot = lcm.entry(f.clone()).or_insert(0);
            *slot = (*slot).max(*e);
        }
        let lift = |c: &Self| -> Num {
            let mut m = Poly::one();
            for (f, e) in &lcm {
                let have = c.den.get(f).copied().unwrap_or(0);
                if *e > have {
                    m = m.mul(&f.pow(*e - have));
                }
            }
            scale_num(&c.num, &m)
        };
        let a = lift(self);
        let b = lift(other);
        let mut num = zero_num();
        for (k, n) in num.iter_mut().enumerate() {
            *n = a[k].add(&b[k]);
        }
        Self::from_parts(num, lcm)
    }

    pub fn neg(&self) -> Self {
        let m1 = Poly::constant(gq_int(-1));
        ScalarCoeff {
            num: scale_num(&self.num, &m1),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let num = mul_num(&self.num, &other.num);
        let mut den = self.den.clone();
        for (f, e) in &other.den {
            *den.entry(f.clone()).or_insert(0) += e;
        }
        Self::from_parts(num, den)
    }

    pub fn scale(&self, c: &Gq) -> Self {
        if gq_is_zero(c) {
            return Self::zero();
        }
        let p = Poly::constant(c.clone());
        ScalarCoeff {
            num: scale_num(&self.num, &p),
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> Result<Self, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::MalformedCoefficient(
                "division by an identically zero coefficient".into(),
            ));
        }
        let x = &self.num;
        let sigma_h = [
            x[0].clone(),
            x[1].neg(),
            x[2].clone(),
            x[3].neg(),
        ];
        let y = mul_num(x, &sigma_h);
        let sigma_r = [y[0].clone(), Poly::zero(), y[2].neg(), Poly::zero()];
        let z = mul_num(&y, &sigma_r);
        debug_assert!(z[1].is_zero() && z[2].is_zero() && z[3].is_zero());
        let z0 = z[0].clone();
        let zc = z0.conj();
        let norm = z0.mul(&zc);
        if norm.is_zero() {
            return Err(AlgebraError::MalformedCoefficient(format!(
                "denominator {} vanishes identically",
                self
            )));
        }
        let mut num = mul_num(&sigma_h, &sigma_r);
        num = scale_num(&num, &zc.mul(&den_product(&self.den)));
        let (scalar, den) = factorize(&norm);
        let inv_scalar = gq_int(1) / scalar;
        num = scale_num(&num, &Poly::constant(inv_scalar));
        Ok(Self::from_parts(num, den))
    }

    pub fn div(&self, other: &Self) -> Result<Self, AlgebraError> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, n: i32) -> Result<Self, AlgebraError> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let mut out = Self::one();
        for _ in 0..n.unsigned_abs() {
            out = out.mul(&base);
        }
        Ok(out)
    }

    /// Complex conjugation (`i -> -i`); `H`, `P`, `m` are real.
    pub fn conj(&self) -> Self {
        ScalarCoeff {
            num: [
                self.num[0].conj(),
                self.num[1].conj(),
                self.num[2].conj(),
                self.num[3].conj(),
            ],
            den: self.den.clone(),
        }
    }

    fn derive_poly(p: &Poly, g: Generator, mode: Mode) -> Self {
        match g {
            Generator::K(a) => {
                let d = p.derivative(Var::momentum(a as usize));
                ScalarCoeff::from_poly(d).mul(&Self::h(mode)).mul(&Self::i())
            }
            Generator::J(a) => {
                let mut out = Self::zero();
                for b in 0..3 {
                    for c in 0..3 {
                        let eps = levi_civita(a as usize, b, c);
                        if eps == 0 {
                            continue;
                        }
                        let d = p.derivative(Var::momentum(b));
                        let term = Self::from_poly(d.mul(&Poly::var(Var::momentum(c))))
                            .scale(&(gq_i() * gq_int(eps as i64)));
                        out = out.add(&term);
                    }
                }
                out
            }
        }
    }

    fn derive_basis(b: usize, g: Generator, mode: Mode) -> Self {
        let (dh, dr) = match g {
            Generator::J(_) => (Self::zero(), Self::zero()),
            Generator::K(a) => {
                let pa = Self::p(a as usize);
                let dh = pa.mul(&Self::i());
                let dr = match mode {
                    Mode::Massless => dh.clone(),
                    Mode::Massive => {
                        let s = Self::from_poly(Poly::momentum_square());
                        Self::h(mode)
                            .mul(&pa)
                            .mul(&Self::abs_p())
                            .mul(&Self::i())
                            .mul(&s.inv().expect("momentum square is nonzero"))
                    }
                };
                (dh, dr)
            }
        };
        match b {
            ONE => Self::zero(),
            HB => dh,
            RB => dr,
            _ => dh.mul(&Self::abs_p()).add(&Self::h(Mode::Massive).mul(&dr)),
        }
    }

    fn basis_elem(b: usize) -> Self {
        let mut num = zero_num();
        num[b] = Poly::one();
        ScalarCoeff {
            num,
            den: BTreeMap::new(),
        }
    }

    /// The commutator `[g, c]` as a multiplication operator.
    pub fn derive(&self, g: Generator, mode: Mode) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut dnum = Self::zero();
        for b in 0..4 {
            if self.num[b].is_zero() {
                continue;
            }
            let poly_part = Self::derive_poly(&self.num[b], g, mode).mul(&Self::basis_elem(b));
            let basis_part =
                Self::from_poly(self.num[b].clone()).mul(&Self::derive_basis(b, g, mode));
            dnum = dnum.add(&poly_part).add(&basis_part);
        }
        let mut inv_den = Self::one();
        if !self.den.is_empty() {
            inv_den = Self::from_parts(
                {
                    let mut n = zero_num();
                    n[ONE] = Poly::one();
                    n
                },
                self.den.clone(),
            );
        }
        let mut out = dnum.mul(&inv_den);
        for (f, e) in &self.den {
            let df = Self::derive_poly(f, g, mode);
            if df.is_zero() {
                continue;
            }
            let mut single = BTreeMap::new();
            single.insert(f.clone(), 1);
            let inv_f = Self::from_parts(
                {
                    let mut n = zero_num();
                    n[ONE] = Poly::one();
                    n
                },
                single,
            );
            let term = self.mul(&df).mul(&inv_f).scale(&gq_int(*e as i64));
            out = out.sub(&term);
        }
        out
    }

    /// Substitutes `P1 = P2 = 0`, `P3 = kappa` (so `|P| = kappa`). `H` is kept
    /// symbolic; the result is intended for comparison, not further products.
    pub fn evaluate_at(&self, kappa: &BigRational) -> Result<Self, AlgebraError> {
        let k = Complex::new(kappa.clone(), num_traits::Zero::zero());
        let sub = |p: &Poly| {
            p.substitute(Var::P1, &gq_int(0))
                .substitute(Var::P2, &gq_int(0))
                .substitute(Var::P3, &k)
        };
        let kp = Poly::constant(k.clone());
        let mut num = zero_num();
        num[ONE] = sub(&self.num[ONE]).add(&sub(&self.num[RB]).mul(&kp));
        num[HB] = sub(&self.num[HB]).add(&sub(&self.num[HRB]).mul(&kp));
        let mut den_poly = Poly::one();
        for (f, e) in &self.den {
            let v = sub(f);
            if v.is_zero() {
                return Err(AlgebraError::Pole(format!(
                    "denominator factor {} vanishes at P = (0, 0, {})",
                    f, kappa
                )));
            }
            den_poly = den_poly.mul(&v.pow(*e));
        }
        let (scalar, den) = factorize(&den_poly);
        let num = scale_num(&num, &Poly::constant(gq_int(1) / scalar));
        Ok(Self::from_parts(num, den))
    }

    /// Floating-point value at momentum `k` and mass `m`.
    pub fn eval_f64(&self, k: [f64; 3], m: f64, mode: Mode) -> Result<Complex<f64>, AlgebraError> {
        let mass = if mode == Mode::Massless { 0.0 } else { m };
        let vals = [k[0], k[1], k[2], mass];
        let r = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
        let h = (r * r + mass * mass).sqrt();
        let basis = [1.0, h, r, h * r];
        let mut acc = Complex::new(0.0, 0.0);
        for b in 0..4 {
            acc += self.num[b].eval_f64(&vals) * basis[b];
        }
        let d = den_product(&self.den).eval_f64(&vals);
        if d.norm() == 0.0 {
            return Err(AlgebraError::Pole(format!(
                "denominator of {} vanishes at k = {:?}",
                self, k
            )));
        }
        Ok(acc / d)
    }

    /// Numerator rendered as signed terms plus an optional denominator string;
    /// the denominator is parenthesized when it has several factors.
    pub(crate) fn render(&self) -> (Vec<(bool, String)>, Option<String>) {
        let basis_atoms: [&[&str]; 4] = [&[], &["H"], &["Dot(Phat,P)"], &["H", "Dot(Phat,P)"]];
        let mut terms = Vec::new();
        for b in 0..4 {
            for (m, c) in self.num[b].terms().rev() {
                let mut atoms = fmt_monomial(m);
                atoms.extend(basis_atoms[b].iter().map(|s| s.to_string()));
                terms.push(fmt_signed_term(c, &atoms));
            }
        }
        if self.den.is_empty() {
            return (terms, None);
        }
        let s = Poly::momentum_square();
        let t = s.add(&Poly::mass_square());
        let parts: Vec<String> = self
            .den
            .iter()
            .map(|(f, e)| {
                let (base, power) = if *f == s {
                    ("Dot(P,P)".to_string(), 1)
                } else if *f == t {
                    ("H".to_string(), 2)
                } else if f.num_terms() == 1 && fmt_monomial(f.leading().unwrap().0).len() == 1 {
                    (fmt_monomial(f.leading().unwrap().0).remove(0), 1)
                } else {
                    (format!("({})", f), 1)
                };
                let total = power * e;
                if total == 1 {
                    base
                } else {
                    format!("Pow({},{})", base, total)
                }
            })
            .collect();
        let den = if parts.len() > 1 {
            format!("({})", parts.join("*"))
        } else {
            parts.into_iter().next().unwrap()
        };
        (terms, Some(den))
    }

}

impl fmt::Display for ScalarCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (terms, den) = self.render();
        let n = terms.len();
        let num = join_signed(terms);
        match den {
            None => write!(f, "{}", num),
            Some(d) if n > 1 => write!(f, "({})/{}", num, d),
            Some(d) => write!(f, "{}/{}", num, d),
        }
    }
}

pub(crate) fn levi_civita(a: usize, b: usize, c: usize) -> i32 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn h() -> ScalarCoeff {
        ScalarCoeff::h(Mode::Massive)
    }

    #[test]
    fn quotient_ring_relation() {
        let s = (0..3).fold(ScalarCoeff::zero(), |acc, a| {
            acc.add(&ScalarCoeff::p(a).mul(&ScalarCoeff::p(a)))
        });
        let m = ScalarCoeff::mass(Mode::Massive);
        let rel = h().mul(&h()).sub(&s).sub(&m.mul(&m));
        assert!(rel.is_zero());
        let r = ScalarCoeff::abs_p();
        assert!(r.mul(&r).sub(&s).is_zero());
    }

    #[test]
    fn rationalization_identities() {
        let m = ScalarCoeff::mass(Mode::Massive);
        let s = ScalarCoeff::abs_p().mul(&ScalarCoeff::abs_p());
        let inv_h = h().inv().unwrap();
        let expect = h().mul(&s.add(&m.mul(&m)).inv().unwrap());
        assert_eq!(inv_h, expect);
        let inv_hm = h().add(&m).inv().unwrap();
        assert_eq!(inv_hm, h().sub(&m).mul(&s.inv().unwrap()));
        assert_eq!(inv_hm.mul(&h().add(&m)), ScalarCoeff::one());
    }

    #[test]
    fn inverse_of_complex_mixed_element() {
        let x = h()
            .add(&ScalarCoeff::abs_p().mul(&ScalarCoeff::i()))
            .add(&ScalarCoeff::p(0));
        let y = x.inv().unwrap();
        assert_eq!(x.mul(&y), ScalarCoeff::one());
    }

    #[test]
    fn zero_division_is_malformed() {
        let z = h().sub(&h());
        assert!(matches!(z.inv(), Err(AlgebraError::MalformedCoefficient(_))));
        // in the massless mode H and |P| coincide
        let d = ScalarCoeff::h(Mode::Massless).sub(&ScalarCoeff::abs_p());
        assert!(d.inv().is_err());
    }

    #[test]
    fn derivation_reproduces_boost_momentum_relations() {
        for a in 0..3u8 {
            let dh = h().derive(Generator::K(a), Mode::Massive);
            assert_eq!(dh, ScalarCoeff::p(a as usize).mul(&ScalarCoeff::i()));
            for b in 0..3 {
                let dp = ScalarCoeff::p(b).derive(Generator::K(a), Mode::Massive);
                let expect = if a as usize == b {
                    h().mul(&ScalarCoeff::i())
                } else {
                    ScalarCoeff::zero()
                };
                assert_eq!(dp, expect);
            }
        }
    }

    #[test]
    fn evaluate_inverse_energy_sum_at_axis_point() {
        let m = ScalarCoeff::mass(Mode::Massive);
        let c = h().add(&m).inv().unwrap();
        let kappa = BigRational::from_integer(BigInt::from(4));
        let at = c.evaluate_at(&kappa).unwrap();
        let expect = h().sub(&m).mul(&ScalarCoeff::from_rational(BigRational::new(
            BigInt::from(1),
            BigInt::from(16),
        )));
        assert!(at.sub(&expect).is_zero());
        // independent check with m = 3, kappa = 4, H = 5
        let v = at.eval_f64([0.0, 0.0, 4.0], 3.0, Mode::Massive).unwrap();
        assert!((v.re - 0.125).abs() < 1e-15 && v.im.abs() < 1e-15);
    }

    #[test]
    fn evaluation_pole_is_reported() {
        let c = ScalarCoeff::p(0).inv().unwrap();
        let kappa = BigRational::from_integer(BigInt::from(2));
        assert!(matches!(c.evaluate_at(&kappa), Err(AlgebraError::Pole(_))));
    }
}
