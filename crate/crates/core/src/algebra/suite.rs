//! Catalog of exact operator identities. Every entry builds a list of
//! residual expressions that must normal-form to zero.

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use super::coeff::levi_civita;
use super::expr::{Algebra, OperatorExpr};
use super::poly::{gq_i, gq_int};
use super::vector::VectorExpr;
use super::{AlgebraError, Mode};

type Residuals = Result<Vec<OperatorExpr>, AlgebraError>;
type Builder = Box<dyn Fn(&Algebra) -> Residuals + Send + Sync>;

/// Deliberate corruptions of the rewriting rules, used as negative controls.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mutation {
    #[default]
    None,
    /// Flips the sign of `[K1, K2]`.
    FlipBoostBracket,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityResult {
    pub name: String,
    pub anchor: String,
    pub zero: bool,
    pub nonzero_terms: usize,
    /// First nonzero residual, printed; empty when the identity holds.
    pub residual: String,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub mode: Mode,
    pub results: Vec<IdentityResult>,
}

impl IdentityReport {
    pub fn all_zero(&self) -> bool {
        self.results.iter().all(|r| r.zero)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityResult> {
        self.results.iter().filter(|r| !r.zero)
    }

    pub fn get(&self, name: &str) -> Option<&IdentityResult> {
        self.results.iter().find(|r| r.name == name)
    }
}

struct Entry {
    name: String,
    anchor: &'static str,
    build: Builder,
}

fn entry(
    name: impl Into<String>,
    anchor: &'static str,
    build: impl Fn(&Algebra) -> Residuals + Send + Sync + 'static,
) -> Entry {
    Entry {
        name: name.into(),
        anchor,
        build: Box::new(build),
    }
}

fn eps_sum(a: usize, b: usize, f: impl Fn(usize) -> OperatorExpr) -> OperatorExpr {
    let mut out = OperatorExpr::zero();
    for c in 0..3 {
        let e = levi_civita(a, b, c);
        if e != 0 {
            out = out.add(&f(c).scale(&gq_int(e as i64)));
        }
    }
    out
}

fn i_times(e: &OperatorExpr) -> OperatorExpr {
    e.scale(&gq_i())
}

fn vec_components(v: &VectorExpr) -> Vec<OperatorExpr> {
    v.0.to_vec()
}

/// `[V_a, W_b] - i eps_abc U_c` for all `a, b`.
fn closes(alg: &Algebra, v: &VectorExpr, w: &VectorExpr, u: &VectorExpr) -> Residuals {
    let mut out = Vec::new();
    for a in 0..3 {
        for b in 0..3 {
            let lhs = alg.commutator(&v.0[a], &w.0[b])?;
            out.push(lhs.sub(&i_times(&eps_sum(a, b, |c| u.0[c].clone()))));
        }
    }
    Ok(out)
}

fn parallel_perp(alg: &Algebra, v: &VectorExpr) -> Result<(VectorExpr, VectorExpr), AlgebraError> {
    let ph = alg.phat_vec();
    let par = alg.vec_scalar(&ph, &alg.dot(&ph, v)?)?;
    let inner = alg.cross(&ph, v)?;
    let perp = alg.cross(&ph, &inner)?;
    Ok((par, VectorExpr::from_fn(|i| perp.0[i].neg())))
}

fn bac_abc(alg: &Algebra, a: &VectorExpr, b: &VectorExpr, c: &VectorExpr) -> Residuals {
    let lhs = alg.cross(a, &alg.cross(b, c)?)?;
    let bac = alg.vec_scalar(b, &alg.dot(a, c)?)?;
    let abc = alg.scalar_vec(&alg.dot(a, b)?, c)?;
    Ok(vec_components(&lhs.sub(&bac.sub(&abc))))
}

fn catalog(mode: Mode) -> Vec<Entry> {
    let mut v: Vec<Entry> = Vec::new();

    v.push(entry("poincare.JJ", "poincare-algebra", |alg| {
        closes(alg, &alg.j_vec(), &alg.j_vec(), &alg.j_vec())
    }));
    v.push(entry("poincare.JK", "poincare-algebra", |alg| {
        closes(alg, &alg.j_vec(), &alg.k_vec(), &alg.k_vec())
    }));
    v.push(entry("poincare.KK", "poincare-algebra", |alg| {
        let minus_j = VectorExpr::from_fn(|c| alg.j(c).neg());
        closes(alg, &alg.k_vec(), &alg.k_vec(), &minus_j)
    }));
    v.push(entry("poincare.JP", "poincare-algebra", |alg| {
        closes(alg, &alg.j_vec(), &alg.p_vec(), &alg.p_vec())
    }));
    v.push(entry("poincare.KP", "poincare-algebra", |alg| {
        let mut out = Vec::new();
        for a in 0..3 {
            for b in 0..3 {
                let lhs = alg.commutator(&alg.k(a), &alg.p(b))?;
                let rhs = if a == b { i_times(&alg.h()) } else { OperatorExpr::zero() };
                out.push(lhs.sub(&rhs));
            }
        }
        Ok(out)
    }));
    v.push(entry("poincare.KH", "poincare-algebra", |alg| {
        (0..3)
            .map(|a| Ok(alg.commutator(&alg.k(a), &alg.h())?.sub(&i_times(&alg.p(a)))))
            .collect()
    }));
    v.push(entry("poincare.scalars", "poincare-algebra", |alg| {
        let mut out = Vec::new();
        for a in 0..3 {
            out.push(alg.commutator(&alg.j(a), &alg.h())?);
            out.push(alg.commutator(&alg.p(a), &alg.h())?);
            for b in 0..3 {
                out.push(alg.commutator(&alg.p(a), &alg.p(b))?);
            }
        }
        out.push(alg.commutator(&alg.h(), &alg.h())?);
        Ok(out)
    }));
    v.push(entry("quotient.H_squared", "poincare-algebra", |alg| {
        let s = alg.dot(&alg.p_vec(), &alg.p_vec())?;
        let m2 = alg.mul(&alg.m(), &alg.m())?;
        Ok(vec![alg.mul(&alg.h(), &alg.h())?.sub(&s).sub(&m2)])
    }));

    // B^-1 for B in {H, |P|, H + m}; A ranges over K_a and J_a.
    v.push(entry("inverse_comm", "inverse-commutator", |alg| {
        let bases = [alg.h(), alg.abs_p(), alg.h().add(&alg.m())];
        let mut out = Vec::new();
        for b in &bases {
            let binv = alg.pow(b, -1)?;
            for a in [alg.k(0), alg.k(2), alg.j(1)] {
                let lhs = alg.commutator(&a, &binv)?;
                let inner = alg.commutator(&a, b)?;
                let rhs = alg.mul_all(&[&binv, &inner, &binv])?.neg();
                out.push(lhs.sub(&rhs));
            }
        }
        Ok(out)
    }));
    for n in -3..=3i32 {
        v.push(entry(format!("power_comm.H^{n}"), "power-commutator", move |alg| {
            let mut out = Vec::new();
            for a in 0..3 {
                let lhs = alg.commutator(&alg.k(a), &alg.h_pow(n)?)?;
                let generic = alg
                    .mul(&alg.commutator(&alg.k(a), &alg.h())?, &alg.h_pow(n - 1)?)?
                    .scale(&gq_int(n as i64));
                let closed = alg
                    .mul(&alg.p(a), &alg.h_pow(n - 1)?)?
                    .scale(&(gq_i() * gq_int(n as i64)));
                out.push(lhs.sub(&generic));
                out.push(lhs.sub(&closed));
            }
            Ok(out)
        }));
        v.push(entry(format!("power_comm.|P|^{n}"), "power-commutator", move |alg| {
            let r = alg.abs_p();
            let mut out = Vec::new();
            for a in 0..3 {
                let lhs = alg.commutator(&alg.k(a), &alg.pow(&r, n)?)?;
                let generic = alg
                    .mul(&alg.commutator(&alg.k(a), &r)?, &alg.pow(&r, n - 1)?)?
                    .scale(&gq_int(n as i64));
                let closed = alg
                    .mul_all(&[&alg.h(), &alg.p(a), &alg.pow(&r, n - 2)?])?
                    .scale(&(gq_i() * gq_int(n as i64)));
                out.push(lhs.sub(&generic));
                out.push(lhs.sub(&closed));
            }
            Ok(out)
        }));
    }

    v.push(entry("comm.PdotK_P", "useful-commutators", |alg| {
        let pk = alg.dot(&alg.p_vec(), &alg.k_vec())?;
        (0..3)
            .map(|a| {
                let rhs = i_times(&alg.mul(&alg.h(), &alg.p(a))?);
                Ok(alg.commutator(&pk, &alg.p(a))?.sub(&rhs))
            })
            .collect()
    }));
    v.push(entry("comm.Phat_K", "useful-commutators", |alg| {
        let rinv = alg.pow(&alg.abs_p(), -1)?;
        let r3 = alg.pow(&alg.abs_p(), -3)?;
        let mut out = Vec::new();
        for a in 0..3 {
            for b in 0..3 {
                let lhs = alg.commutator(&alg.phat(a), &alg.k(b))?;
                let mut rhs = i_times(&alg.mul_all(&[&alg.h(), &alg.p(a), &alg.p(b), &r3])?);
                if a == b {
                    rhs = rhs.sub(&i_times(&alg.mul(&alg.h(), &rinv)?));
                }
                out.push(lhs.sub(&rhs));
            }
        }
        Ok(out)
    }));
    for m in -1..=1i32 {
        for n in -1..=1i32 {
            v.push(entry(
                format!("comm_id_hm_k_hn_p[{m},{n}]"),
                "useful-commutators",
                move |alg| {
                    let mut out = Vec::new();
                    for a in 0..3 {
                        for b in 0..3 {
                            let x = alg.mul(&alg.h_pow(m)?, &alg.k(a))?;
                            let y = alg.mul(&alg.h_pow(n)?, &alg.p(b))?;
                            let lhs = alg.commutator(&x, &y)?;
                            let mut rhs = alg
                                .mul_all(&[&alg.p(a), &alg.p(b), &alg.h_pow(m + n - 1)?])?
                                .scale(&(gq_i() * gq_int(n as i64)));
                            if a == b {
                                rhs = rhs.add(&i_times(&alg.h_pow(m + n + 1)?));
                            }
                            out.push(lhs.sub(&rhs));
                        }
                    }
                    Ok(out)
                },
            ));
        }
    }
    v.push(entry("comm.PhatK_minus_KPhat", "useful-commutators", |alg| {
        let a = alg.dot(&alg.phat_vec(), &alg.k_vec())?;
        let b = alg.dot(&alg.k_vec(), &alg.phat_vec())?;
        let rhs = alg
            .mul(&alg.h(), &alg.pow(&alg.abs_p(), -1)?)?
            .scale(&(gq_i() * gq_int(-2)));
        Ok(vec![a.sub(&b).sub(&rhs)])
    }));
    v.push(entry("comm.PK_minus_KP", "useful-commutators", |alg| {
        let a = alg.dot(&alg.p_vec(), &alg.k_vec())?;
        let b = alg.dot(&alg.k_vec(), &alg.p_vec())?;
        Ok(vec![a.sub(&b).sub(&alg.h().scale(&(gq_i() * gq_int(-3))))])
    }));

    v.push(entry("bac_abc.PhatPhatJ", "bac-abc", |alg| {
        bac_abc(alg, &alg.phat_vec(), &alg.phat_vec(), &alg.j_vec())
    }));
    v.push(entry("bac_abc.PhatPhatK", "bac-abc", |alg| {
        bac_abc(alg, &alg.phat_vec(), &alg.phat_vec(), &alg.k_vec())
    }));
    v.push(entry("bac_abc.PPK", "bac-abc", |alg| {
        bac_abc(alg, &alg.p_vec(), &alg.p_vec(), &alg.k_vec())
    }));
    v.push(entry("decomp.J", "parallel-perpendicular", |alg| {
        let (par, perp) = parallel_perp(alg, &alg.j_vec())?;
        let mut out = vec_components(&alg.j_vec().sub(&par.add(&perp)));
        // both pieces are vector operators
        out.extend(closes(alg, &alg.j_vec(), &par, &par)?);
        out.extend(closes(alg, &alg.j_vec(), &perp, &perp)?);
        Ok(out)
    }));
    v.push(entry("decomp.K", "parallel-perpendicular", |alg| {
        let (par, perp) = parallel_perp(alg, &alg.k_vec())?;
        let mut out = vec_components(&alg.k_vec().sub(&par.add(&perp)));
        out.extend(closes(alg, &alg.j_vec(), &par, &par)?);
        out.extend(closes(alg, &alg.j_vec(), &perp, &perp)?);
        Ok(out)
    }));
    v.push(entry("decomp.J_parallel_commute", "massless-splitting", |alg| {
        let (par, _) = parallel_perp(alg, &alg.j_vec())?;
        let mut out = Vec::new();
        for a in 0..3 {
            for b in 0..3 {
                out.push(alg.commutator(&par.0[a], &par.0[b])?);
            }
        }
        Ok(out)
    }));
    v.push(entry("decomp.J_perp_comm", "massless-splitting", |alg| {
        let (par, perp) = parallel_perp(alg, &alg.j_vec())?;
        closes(alg, &perp, &perp, &perp.sub(&par))
    }));

    v.push(entry("rotation.bridging", "rotation-connection", |alg| {
        let hinv = alg.h_pow(-1)?;
        let lhs = alg.scalar_vec(&hinv, &alg.vec_scalar(&alg.phat_vec(), &alg.phat_dot_k()?)?)?;
        let kp = alg.dot(&alg.k_vec(), &alg.phat_vec())?;
        let first = alg.vec_scalar(&alg.scalar_vec(&kp, &alg.phat_vec())?, &hinv)?;
        let p_h2 = alg.scalar_vec(&alg.h_pow(-2)?, &alg.p_vec())?;
        let hat_r = alg.scalar_vec(&alg.pow(&alg.abs_p(), -1)?, &alg.phat_vec())?;
        let rhs = VectorExpr::from_fn(|i| {
            first.0[i]
                .add(&i_times(&p_h2.0[i]))
                .sub(&i_times(&hat_r.0[i]).scale(&gq_int(2)))
        });
        Ok(vec_components(&lhs.sub(&rhs)))
    }));
    v.push(entry("rotation.two_forms_agree", "rotation-connection", |alg| {
        let a = alg.rotation_connection()?;
        let b = alg.rotation_connection_symmetric()?;
        Ok(vec_components(&a.sub(&b)))
    }));
    v.push(entry("boost.symmetric_form", "boost-connection", |alg| {
        let hinv = alg.h_pow(-1)?;
        let sym = VectorExpr::from_fn(|a| {
            let x = alg.mul(&hinv, &alg.k(a)).expect("short word");
            let y = alg.mul(&alg.k(a), &hinv).expect("short word");
            x.add(&y).scale(&(gq_i() * super::poly::gq_rat(-1, 2)))
        });
        Ok(vec_components(&alg.boost_connection()?.sub(&sym)))
    }));
    v.push(entry("boost.anti_hermitian", "boost-connection", |alg| {
        let q = i_vec(&alg.boost_connection()?);
        Ok(vec_components(&alg.adjoint_vec(&q)?.sub(&q)))
    }));
    v.push(entry("rotation.anti_hermitian", "rotation-connection", |alg| {
        let q = i_vec(&alg.rotation_connection()?);
        Ok(vec_components(&alg.adjoint_vec(&q)?.sub(&q)))
    }));
    v.push(entry("rotation.PxJ_adjoint", "rotation-connection", |alg| {
        let pj = alg.cross(&alg.p_vec(), &alg.j_vec())?;
        let expect = VectorExpr::from_fn(|a| pj.0[a].sub(&i_times(&alg.p(a)).scale(&gq_int(2))));
        Ok(vec_components(&alg.adjoint_vec(&pj)?.sub(&expect)))
    }));
    v.push(entry("connections.vector_operators", "rotational-symmetry", |alg| {
        let mut out = closes(alg, &alg.j_vec(), &alg.boost_connection()?, &alg.boost_connection()?)?;
        let dr = alg.rotation_connection()?;
        out.extend(closes(alg, &alg.j_vec(), &dr, &dr)?);
        Ok(out)
    }));

    v.push(entry("proof1.HK_HK", "boost-curvature", |alg| {
        let h1 = alg.h_pow(-1)?;
        let lhs = alg.commutator(&alg.mul(&h1, &alg.k(0))?, &alg.mul(&h1, &alg.k(1))?)?;
        let inner = alg.mul(&alg.p(1), &alg.k(0))?.sub(&alg.mul(&alg.p(0), &alg.k(1))?);
        let rhs = i_times(&alg.mul(&alg.h_pow(-3)?, &inner)?)
            .sub(&i_times(&alg.mul(&alg.h_pow(-2)?, &alg.j(2))?));
        Ok(vec![lhs.sub(&rhs)])
    }));
    v.push(entry("proof1.HK_HP", "boost-curvature", |alg| {
        let lhs = alg.commutator(
            &alg.mul(&alg.h_pow(-1)?, &alg.k(0))?,
            &alg.mul(&alg.h_pow(-2)?, &alg.p(1))?,
        )?;
        let rhs = alg
            .mul_all(&[&alg.h_pow(-4)?, &alg.p(0), &alg.p(1)])?
            .scale(&(gq_i() * gq_int(-2)));
        Ok(vec![lhs.sub(&rhs)])
    }));
    v.push(entry("proof1.HP_HK", "boost-curvature", |alg| {
        let lhs = alg.commutator(
            &alg.mul(&alg.h_pow(-2)?, &alg.p(0))?,
            &alg.mul(&alg.h_pow(-1)?, &alg.k(1))?,
        )?;
        let rhs = alg
            .mul_all(&[&alg.h_pow(-4)?, &alg.p(0), &alg.p(1)])?
            .scale(&(gq_i() * gq_int(2)));
        Ok(vec![lhs.sub(&rhs)])
    }));
    v.push(entry("proof1.curvature_at_axis", "boost-curvature", |alg| {
        let d = alg.boost_connection()?;
        let f = alg.commutator(&d.0[0], &d.0[1])?;
        let expect = i_times(&alg.mul(&alg.h_pow(-2)?, &alg.j(2))?);
        let mut out = Vec::new();
        for k in [1i64, 2, 7] {
            let kappa = BigRational::new(BigInt::from(k), BigInt::from(3));
            out.push(f.evaluate_at(&kappa)?.sub(&expect.evaluate_at(&kappa)?));
        }
        Ok(out)
    }));

    if mode == Mode::Massive {
        v.push(entry("newton_wigner.flat_connection", "flat-connection", |alg| {
            let q = i_vec(&alg.flat_connection()?);
            Ok(vec_components(&q.sub(&alg.newton_wigner()?)))
        }));
        v.push(entry("newton_wigner.hermitian", "flat-connection", |alg| {
            let q = alg.newton_wigner()?;
            Ok(vec_components(&alg.adjoint_vec(&q)?.sub(&q)))
        }));
        v.push(entry("jordan.splitting", "massive-splitting", |alg| {
            let q = alg.newton_wigner()?;
            let l = alg.cross(&alg.p_vec(), &q)?;
            let s = alg.jordan_spin()?;
            let rhs = VectorExpr::from_fn(|a| l.0[a].neg().add(&s.0[a]));
            Ok(vec_components(&alg.j_vec().sub(&rhs)))
        }));
        v.push(entry("jordan.spin_so3", "massive-splitting", |alg| {
            let s = alg.jordan_spin()?;
            let mut out = closes(alg, &s, &s, &s)?;
            for a in 0..3 {
                for b in 0..3 {
                    out.push(alg.commutator(&s.0[a], &alg.p(b))?);
                }
            }
            Ok(out)
        }));
    }
    v
}

fn i_vec(v: &VectorExpr) -> VectorExpr {
    VectorExpr::from_fn(|a| i_times(&v.0[a]))
}

fn run_entry(e: &Entry, mode: Mode, mutation: Mutation) -> IdentityResult {
    let mut alg = Algebra::new(mode);
    if mutation == Mutation::FlipBoostBracket {
        alg = alg.with_flipped_boost_bracket();
    }
    match (e.build)(&alg) {
        Ok(res) => {
            let bad: Vec<&OperatorExpr> = res.iter().filter(|r| !r.is_zero()).collect();
            IdentityResult {
                name: e.name.clone(),
                anchor: e.anchor.to_string(),
                zero: bad.is_empty(),
                nonzero_terms: bad.iter().map(|r| r.num_terms()).sum(),
                residual: bad.first().map(|r| r.to_string()).unwrap_or_default(),
                error: None,
            }
        }
        Err(err) => IdentityResult {
            name: e.name.clone(),
            anchor: e.anchor.to_string(),
            zero: false,
            nonzero_terms: 0,
            residual: String::new(),
            error: Some(err.to_string()),
        },
    }
}

/// Runs the full catalog; entries are independent and evaluated in parallel.
pub fn identity_suite(mode: Mode, mutation: Mutation) -> IdentityReport {
    let entries = catalog(mode);
    let results = entries
        .par_iter()
        .map(|e| run_entry(e, mode, mutation))
        .collect();
    IdentityReport { mode, results }
}

/// Names of every catalog entry for `mode`, in report order.
pub fn identity_names(mode: Mode) -> Vec<String> {
    catalog(mode).into_iter().map(|e| e.name).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn massive_catalog_is_exactly_zero() {
        let report = identity_suite(Mode::Massive, Mutation::None);
        let bad: Vec<_> = report.failures().map(|r| (&r.name, &r.residual, &r.error)).collect();
        assert!(bad.is_empty(), "{bad:#?}");
    }

    #[test]
    fn flipped_bracket_is_detected_by_name() {
        let report = identity_suite(Mode::Massive, Mutation::FlipBoostBracket);
        assert!(!report.get("poincare.KK").unwrap().zero);
        assert!(report.get("poincare.JJ").unwrap().zero);
    }
}
