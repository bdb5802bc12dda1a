use proptest::prelude::*;
use splitlab::algebra::{Algebra, Generator, Mode, OperatorExpr, ScalarCoeff};

fn coeff_pool(idx: usize, mode: Mode) -> ScalarCoeff {
    let h = ScalarCoeff::h(mode);
    match idx {
        0 => ScalarCoeff::int(1),
        1 => ScalarCoeff::int(-2),
        2 => ScalarCoeff::i(),
        3 => h.clone(),
        4 => ScalarCoeff::p(0),
        5 => ScalarCoeff::p(2),
        6 => h.inv().unwrap(),
        7 => ScalarCoeff::abs_p().inv().unwrap().mul(&ScalarCoeff::p(1)),
        _ => h.add(&ScalarCoeff::mass(mode)).inv().unwrap(),
    }
}

fn term() -> impl Strategy<Value = (usize, Vec<usize>)> {
    (0usize..9, prop::collection::vec(0usize..6, 0..=2))
}

fn expr_strategy() -> impl Strategy<Value = Vec<(usize, Vec<usize>)>> {
    prop::collection::vec(term(), 1..=3)
}

fn build(alg: &Algebra, spec: &[(usize, Vec<usize>)]) -> OperatorExpr {
    let mut out = OperatorExpr::zero();
    for (c, word) in spec {
        let mut t = OperatorExpr::scalar(coeff_pool(*c, alg.mode()));
        for g in word {
            t = alg.mul(&t, &OperatorExpr::generator(Generator::ALL[*g])).unwrap();
        }
        out = out.add(&t);
    }
    out
}

fn linear_strategy() -> impl Strategy<Value = Vec<(usize, usize)>> {
    prop::collection::vec((0usize..9, 0usize..6), 1..=2)
}

fn build_linear(alg: &Algebra, spec: &[(usize, usize)]) -> OperatorExpr {
    let mut out = OperatorExpr::zero();
    for (c, g) in spec {
        let t = OperatorExpr::generator(Generator::ALL[*g]).left_scale(&coeff_pool(*c, alg.mode()));
        out = out.add(&t);
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn addition_is_commutative(a in expr_strategy(), b in expr_strategy()) {
        let alg = Algebra::new(Mode::Massive);
        let (x, y) = (build(&alg, &a), build(&alg, &b));
        prop_assert_eq!(x.add(&y), y.add(&x));
    }

    #[test]
    fn massless_adjoint_is_an_involution(a in expr_strategy()) {
        let alg = Algebra::new(Mode::Massless);
        let x = build(&alg, &a);
        let back = alg.adjoint(&alg.adjoint(&x).unwrap()).unwrap();
        prop_assert!(back.sub(&x).is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn adjoint_is_an_involution(a in expr_strategy()) {
        let alg = Algebra::new(Mode::Massive);
        let x = build(&alg, &a);
        let back = alg.adjoint(&alg.adjoint(&x).unwrap()).unwrap();
        prop_assert!(back.sub(&x).is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn multiplication_is_associative(
        a in prop::collection::vec(term(), 1..=2),
        b in prop::collection::vec(term(), 1..=2),
        c in prop::collection::vec(term(), 1..=2),
    ) {
        let alg = Algebra::new(Mode::Massive);
        let (x, y, z) = (build(&alg, &a), build(&alg, &b), build(&alg, &c));
        let left = alg.mul(&alg.mul(&x, &y).unwrap(), &z).unwrap();
        let right = alg.mul(&x, &alg.mul(&y, &z).unwrap()).unwrap();
        prop_assert!(left.sub(&right).is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn jacobi_identity(a in linear_strategy(), b in linear_strategy(), c in linear_strategy()) {
        let alg = Algebra::new(Mode::Massive);
        let (x, y, z) = (build_linear(&alg, &a), build_linear(&alg, &b), build_linear(&alg, &c));
        let comm = |p: &OperatorExpr, q: &OperatorExpr| alg.commutator(p, q).unwrap();
        let total = comm(&comm(&x, &y), &z)
            .add(&comm(&comm(&y, &z), &x))
            .add(&comm(&comm(&z, &x), &y));
        prop_assert!(total.is_zero());
    }

    #[test]
    fn adjoint_reverses_products(a in expr_strategy(), b in expr_strategy()) {
        let alg = Algebra::new(Mode::Massive);
        let (x, y) = (build(&alg, &a), build(&alg, &b));
        let lhs = alg.adjoint(&alg.mul(&x, &y).unwrap()).unwrap();
        let rhs = alg.mul(&alg.adjoint(&y).unwrap(), &alg.adjoint(&x).unwrap()).unwrap();
        prop_assert!(lhs.sub(&rhs).is_zero());
    }
}

#[test]
fn derivation_rule_is_single_sourced() {
    // [K_a, H] and [K_a, P_b] come out of the coefficient derivation, with no
    // dedicated rewrite rule for either.
    let alg = Algebra::new(Mode::Massive);
    for a in 0..3 {
        let kh = alg.commutator(&alg.k(a), &alg.h()).unwrap();
        assert_eq!(kh, alg.p(a).left_scale(&ScalarCoeff::i()));
    }
}

#[test]
fn massless_mode_identifies_energy_with_momentum_norm() {
    let alg = Algebra::new(Mode::Massless);
    assert!(alg.h().sub(&alg.abs_p()).is_zero());
    assert!(alg.m().is_zero());
}
