use std::sync::Arc;

use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use splitlab::bundle::*;
use splitlab::connection::*;

fn grid(nr: usize, nt: usize, np: usize) -> Arc<Grid<f64>> {
    Arc::new(make_grid(nr, nt, np, 1.0, 2.0).unwrap())
}

fn section(rep: RepSpec, g: &Arc<Grid<f64>>, seed: u64) -> Section<f64> {
    random_test_section(rep, g.clone(), seed, Profile::broad(ProfileKind::MultiBump))
}

fn rel(a: &Section<f64>, b: &Section<f64>) -> f64 {
    a.sub(b).norm() / b.norm().max(1e-300)
}

fn sc() -> Scheme {
    Scheme::default()
}

fn conn(kind: ConnectionKind) -> Connection {
    Connection::new(kind)
}

/// `i c(r) χ ψ` for a radial factor `c`.
fn chi_times(psi: &Section<f64>, c: impl Fn(f64) -> f64) -> Section<f64> {
    let chi = apply_generator(Gen::Chi, psi, &sc()).unwrap();
    let g = psi.grid.clone();
    chi.mul_by(|n| C::new(0.0, c(g.r[g.coords(n).0])))
}

fn f_theta_phi(kind: ConnectionKind, psi: &Section<f64>) -> Section<f64> {
    curvature_commutator(&conn(kind), &TangentField::ETheta, &TangentField::EPhi, psi, &sc()).unwrap()
}

#[test]
fn leibniz_holds_for_every_kind_and_fails_for_the_mutant() {
    let g = grid(8, 24, 48);
    let f = scalar_field(&g, |k| (0.4 * k[0] - 0.3 * k[2]).sin() + 0.2 * k[1] * k[1]);
    let one = vec![C::new(1.0, 0.0); g.len()];
    for rep in [RepSpec::massive(1, 1.0).unwrap(), RepSpec::massless(1).unwrap()] {
        let psi = section(rep, &g, 3);
        let mut kinds = vec![ConnectionKind::Boost, ConnectionKind::Rotation, ConnectionKind::Affine(FProfile::Constant(0.3))];
        if !rep.is_massless() {
            kinds.push(ConnectionKind::FlatMassive);
        }
        for kind in kinds {
            let c = conn(kind.clone());
            for x in [TangentField::ETheta, TangentField::Ek, TangentField::Constant([0.2, -0.5, 0.7])] {
                let res = leibniz_residual(&c, &x, &f, &psi, &sc()).unwrap();
                assert!(res < 1e-3, "{kind:?} {x:?}: {res:e}");
                assert!(leibniz_residual(&c, &x, &one, &psi, &sc()).unwrap() < 1e-13);
            }
        }
        let mutant = Connection::perturbed(ConnectionKind::Rotation, Perturbation::DropCross);
        let res = leibniz_residual(&mutant, &TangentField::ETheta, &f, &psi, &sc()).unwrap();
        assert!(res > 0.05, "mutant passes Leibniz: {res:e}");
    }
}

#[test]
fn massless_connections_coincide() {
    let g = grid(6, 16, 32);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let frames: Vec<TangentField> = (0..10)
        .map(|_| TangentField::Constant([rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]))
        .collect();
    let profiles = [0.0, 0.5, 1.0, 2.0].map(FProfile::Constant);
    for h in [-1, 0, 1] {
        let psi = section(RepSpec::massless(h).unwrap(), &g, 5);
        for x in &frames {
            let dk = apply_connection(&conn(ConnectionKind::Boost), x, &psi, &sc()).unwrap();
            for f in &profiles {
                let df = apply_connection(&conn(ConnectionKind::Affine(f.clone())), x, &psi, &sc()).unwrap();
                assert!(rel(&df, &dk) <= 1e-6, "h={h} {f:?}");
            }
        }
    }
    let psi = section(RepSpec::massive(1, 1.0).unwrap(), &g, 5);
    let x = &frames[0];
    let dk = apply_connection(&conn(ConnectionKind::Boost), x, &psi, &sc()).unwrap();
    let dr = apply_connection(&conn(ConnectionKind::Rotation), x, &psi, &sc()).unwrap();
    assert!(rel(&dr, &dk) > 0.01);
}

#[test]
fn flat_massive_connection_needs_mass() {
    let g = grid(4, 8, 16);
    let psi = section(RepSpec::massless(1).unwrap(), &g, 1);
    let err = apply_connection(&conn(ConnectionKind::FlatMassive), &TangentField::Ek, &psi, &sc()).unwrap_err();
    assert!(matches!(err, ConnError::SingularLimit(_)));
}

#[test]
fn affine_connection_interpolates() {
    let g = grid(6, 16, 32);
    let m = 1.0;
    let psi = section(RepSpec::massive(1, m).unwrap(), &g, 8);
    let x = TangentField::Constant([0.3, 0.6, -0.2]);
    let dk = apply_connection(&conn(ConnectionKind::Boost), &x, &psi, &sc()).unwrap();
    let dr = apply_connection(&conn(ConnectionKind::Rotation), &x, &psi, &sc()).unwrap();
    for lam in [0.0, 0.5, 1.0] {
        let df = apply_connection(&conn(ConnectionKind::Affine(FProfile::EnergyRatio(lam))), &x, &psi, &sc()).unwrap();
        let gg = g.clone();
        let w = move |n: usize| {
            let r = gg.r[gg.coords(n).0];
            lam * (r * r + m * m).sqrt() / m
        };
        let expect = dk.mul_by(|n| C::new(w(n), 0.0)).add(&dr.mul_by(|n| C::new(1.0 - w(n), 0.0)));
        assert!(rel(&df, &expect) < 1e-13, "lambda={lam}");
    }
    let one = apply_connection(&conn(ConnectionKind::Affine(FProfile::Constant(1.0))), &x, &psi, &sc()).unwrap();
    assert!(rel(&one, &dk) < 1e-14);
    let flat = apply_connection(&conn(ConnectionKind::FlatMassive), &x, &psi, &sc()).unwrap();
    let ratio = apply_connection(&conn(ConnectionKind::Affine(FProfile::EnergyRatio(1.0))), &x, &psi, &sc()).unwrap();
    assert!(rel(&flat, &ratio) < 1e-14);
}

/// Predicted `F(e_θ, e_φ) = i χ (H² − f² m²) / (|P|² H²)`.
fn predicted(kind: &ConnectionKind, psi: &Section<f64>) -> Section<f64> {
    let m = psi.rep.mass;
    let w = kind.weight().unwrap();
    chi_times(psi, |r| {
        let h2 = r * r + m * m;
        let f = w.eval(r, m).unwrap();
        (h2 - f * f * m * m) / (r * r * h2)
    })
}

#[test]
fn curvature_matches_closed_forms_and_converges() {
    let cases = [
        (RepSpec::massive(1, 1.0).unwrap(), ConnectionKind::Boost),
        (RepSpec::massive(1, 1.0).unwrap(), ConnectionKind::Rotation),
        (RepSpec::massive(0, 1.0).unwrap(), ConnectionKind::Boost),
        (RepSpec::massive(2, 0.7).unwrap(), ConnectionKind::Affine(FProfile::EnergyRatio(0.5))),
        (RepSpec::massless(1).unwrap(), ConnectionKind::Boost),
        (RepSpec::massless(-1).unwrap(), ConnectionKind::Rotation),
    ];
    for (rep, kind) in cases {
        let res: Vec<f64> = [(8, 16, 32), (8, 32, 64)]
            .iter()
            .map(|&(a, b, c)| {
                let psi = section(rep, &grid(a, b, c), 21);
                f_theta_phi(kind.clone(), &psi).sub(&predicted(&kind, &psi)).norm() / psi.norm()
            })
            .collect();
        assert!(res[1] < 5e-3, "{rep:?} {kind:?}: {res:?}");
        assert!(res[1] < 1e-12 || (res[0] / res[1]).log2() >= 2.0, "{rep:?} {kind:?}: {res:?}");
    }
}

#[test]
fn flat_connection_has_no_curvature() {
    let res: Vec<f64> = [(6, 12, 24), (8, 24, 48)]
        .iter()
        .map(|&(a, b, c)| {
            let psi = section(RepSpec::massive(1, 1.0).unwrap(), &grid(a, b, c), 9);
            f_theta_phi(ConnectionKind::FlatMassive, &psi).norm() / f_theta_phi(ConnectionKind::Boost, &psi).norm()
        })
        .collect();
    assert!(res[1] < 5e-3 && (res[0] / res[1]).log2() >= 2.0, "{res:?}");
}

#[test]
fn curvature_is_antisymmetric_and_tensorial() {
    let g = grid(8, 24, 48);
    let psi = section(RepSpec::massive(1, 1.0).unwrap(), &g, 12);
    let c = conn(ConnectionKind::Boost);
    let (x, y) = (TangentField::CrossK([0.0, 0.0, 1.0]), TangentField::Constant([0.4, -0.1, 0.3]));
    let fxy = curvature_commutator(&c, &x, &y, &psi, &sc()).unwrap();
    let fyx = curvature_commutator(&c, &y, &x, &psi, &sc()).unwrap();
    assert!(rel(&fyx.scale(C::new(-1.0, 0.0)), &fxy) < 1e-12);

    let gfun = |k: [f64; 3]| 1.0 + 0.3 * (0.5 * k[0] + k[2]).cos();
    let gv = scalar_field::<f64>(&g, gfun);
    let xv = x.values(&g);
    let gx: Vec<[f64; 3]> = xv.iter().zip(&gv).map(|(v, s)| v.map(|c| c * s.re)).collect();
    let gxf = TangentField::Sampled(Arc::new(gx));
    let lhs = curvature_commutator(&c, &gxf, &y, &psi, &sc()).unwrap();
    let rhs = fxy.mul_field(&gv);
    assert!(rel(&lhs, &rhs) < 1e-3, "{:e}", rel(&lhs, &rhs));
}

#[test]
fn cross_commutators_match() {
    let g = grid(8, 24, 48);
    for rep in [RepSpec::massive(0, 1.0).unwrap(), RepSpec::massive(1, 1.0).unwrap()] {
        let rpt = cross_commutator_check(&section(rep, &g, 6), &sc()).unwrap();
        assert!(rpt.boost_rotation < 5e-3 && rpt.rotation_boost < 5e-3, "{rpt:?}");
    }
    let massless = section(RepSpec::massless(1).unwrap(), &g, 6);
    assert!(matches!(cross_commutator_check(&massless, &sc()), Err(ConnError::Unsupported(_))));
}

#[test]
fn wigner_rotation_around_small_loops() {
    let opts = TransportOptions::default();
    for (spin, m, r) in [(1, 1.0, 1.5), (2, 0.5, 0.8)] {
        let rep = RepSpec::massive(spin, m).unwrap();
        for a in [0.01, 0.05] {
            let lp = HolonomyLoop::square(r, [0.3, 0.4, 0.8], a).unwrap();
            let hol = holonomy(&conn(ConnectionKind::Boost), &rep, &lp, &opts).unwrap();
            let pred = a * r * r / (r * r + m * m);
            let got = hol.rotation_angle(&rep);
            assert!(((got - pred) / pred).abs() < 0.01, "s={spin} A={a}: {got} vs {pred}");
            let flat = holonomy(&conn(ConnectionKind::FlatMassive), &rep, &lp, &opts).unwrap();
            assert!(flat.defect() <= 1e-8, "{:e}", flat.defect());
        }
    }
}

#[test]
fn massless_holonomy_is_the_enclosed_solid_angle() {
    let opts = TransportOptions::default();
    for h in [-1, 1] {
        let rep = RepSpec::massless(h).unwrap();
        for kind in [ConnectionKind::Boost, ConnectionKind::Rotation] {
            let lp = HolonomyLoop::square(1.2, [-0.5, 0.1, 0.2], 0.05).unwrap();
            let hol = holonomy(&conn(kind), &rep, &lp, &opts).unwrap();
            let v = helicity_eigenvector(&rep, lp.vertices[0], h as i32);
            assert!((hol.phase_on(&v) + h as f64 * 0.05).abs() < 1e-9);
        }
    }
}

#[test]
fn loop_edge_cases() {
    let rep = RepSpec::massive(1, 1.0).unwrap();
    let opts = TransportOptions::default();
    let c = conn(ConnectionKind::Boost);
    let lp = HolonomyLoop::degenerate([1.0, 0.0, 0.0], [0.0, 0.6, 0.8]).unwrap();
    assert!(holonomy(&c, &rep, &lp, &opts).unwrap().defect() < 1e-10);

    let fwd = HolonomyLoop::square(1.0, [0.0, 1.0, 0.0], 0.1).unwrap();
    let mut rv = fwd.vertices.clone();
    rv.reverse();
    rv.rotate_right(1);
    let back = HolonomyLoop::new(rv).unwrap();
    assert_eq!(back.vertices[0], fwd.vertices[0]);
    let (u, w) = (holonomy(&c, &rep, &fwd, &opts).unwrap(), holonomy(&c, &rep, &back, &opts).unwrap());
    let d = u.d;
    for i in 0..d {
        for j in 0..d {
            let uw: C = (0..d).map(|k| u.matrix[i * d + k] * w.matrix[k * d + j]).sum();
            let e = if i == j { 1.0 } else { 0.0 };
            assert!((uw - e).norm() < 1e-10);
        }
    }
}

#[test]
fn commutator_and_holonomy_curvatures_agree() {
    let g = grid(8, 24, 48);
    let node = g.index(4, 7, 13);
    let k0 = g.k_vec(node);
    let opts = TransportOptions { max_step: 2e-4, unitarity_tol: 1e-8 };
    for (rep, kind) in [
        (RepSpec::massive(1, 1.0).unwrap(), ConnectionKind::Boost),
        (RepSpec::massive(1, 1.0).unwrap(), ConnectionKind::Rotation),
        (RepSpec::massless(1).unwrap(), ConnectionKind::Boost),
    ] {
        let psi = section(rep, &g, 30);
        let fpsi = f_theta_phi(kind.clone(), &psi);
        let lp = HolonomyLoop::square(norm(k0), k0, 1e-5).unwrap();
        let hol = holonomy(&conn(kind.clone()), &rep, &lp, &opts).unwrap();
        let fh = hol.curvature_estimate();
        let d = rep.fiber_dim();
        let v = psi.fiber(node);
        let est: Vec<C> = (0..d).map(|i| (0..d).map(|j| fh[i * d + j] * v[j]).sum()).collect();
        let got = fpsi.fiber(node);
        let scale = got.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let err = est.iter().zip(got).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 0.02 * scale, "{rep:?} {kind:?}: {err:e} of {scale:e}");
    }
}

fn norm(k: [f64; 3]) -> f64 {
    (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt()
}

#[test]
fn chern_number_is_minus_twice_the_helicity() {
    let opts = ChernOptions::default();
    let kinds = [
        Connection::new(ConnectionKind::Boost),
        Connection::new(ConnectionKind::Rotation),
        Connection::new(ConnectionKind::Affine(FProfile::Table { r: vec![0.5, 1.0, 2.0], f: vec![0.0, 0.7, 2.0] })),
        Connection::perturbed(ConnectionKind::Boost, Perturbation::Constant { c: 0.8, u: [0.2, -0.6, 0.3] }),
    ];
    for h in [-1i8, 0, 1] {
        let rep = RepSpec::massless(h).unwrap();
        for c in &kinds {
            let res = chern_number(c, &rep, &opts).unwrap();
            assert_eq!(res.integer, -2 * h as i64, "{c:?}");
            assert!((res.raw - res.integer as f64).abs() < 0.05);
        }
    }
}

#[test]
fn chern_lattice_resolution_is_checked() {
    let rep = RepSpec::massless(1).unwrap();
    let coarse = ChernOptions { nt: 2, np: 3, radius: 1.0, margin: 1.5 };
    let err = chern_number(&conn(ConnectionKind::Boost), &rep, &coarse).unwrap_err();
    assert!(matches!(err, ConnError::Resolution(_)));
    let massive = RepSpec::massive(1, 1.0).unwrap();
    assert!(matches!(chern_number(&conn(ConnectionKind::Boost), &massive, &ChernOptions::default()), Err(ConnError::Unsupported(_))));
}

#[test]
fn zero_field_and_radial_direction() {
    let g = grid(6, 16, 32);
    for rep in [RepSpec::massive(1, 1.0).unwrap(), RepSpec::massive(2, 0.6).unwrap()] {
        let psi = section(rep, &g, 14);
        for kind in [ConnectionKind::Boost, ConnectionKind::Rotation, ConnectionKind::FlatMassive] {
            let zero = apply_connection(&conn(kind.clone()), &TangentField::Constant([0.0; 3]), &psi, &sc()).unwrap();
            assert_eq!(zero.max_abs(), 0.0, "{kind:?}");
        }
        let dk = apply_connection(&conn(ConnectionKind::Boost), &TangentField::Ek, &psi, &sc()).unwrap();
        let dr = apply_connection(&conn(ConnectionKind::Rotation), &TangentField::Ek, &psi, &sc()).unwrap();
        assert!(rel(&dr, &dk) < 1e-13, "{:e}", rel(&dr, &dk));
    }
}
