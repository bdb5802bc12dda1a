//! One test per acceptance criterion. Each prints a single
//! `criterion N <label>: PASS|FAIL <detail>` line before asserting.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use splitlab::algebra::{identity_suite, Algebra, Mode, Mutation};
use splitlab::bundle::*;
use splitlab::connection::*;
use splitlab::lang::{eval_str, parse, LangError, Value, CATALOG, FUZZ_TOKENS};
use splitlab::split::*;

// Pinned tolerances.
const SYMBOLIC_SECONDS: f64 = 10.0;
const ALGEBRA_TOL: f64 = 1e-3;
const ALGEBRA_SECONDS: f64 = 180.0;
const MIN_ORDER: f64 = 2.0;
const CHERN_MARGIN: f64 = 0.05;
const CHERN_SECONDS: f64 = 60.0;
const CURVATURE_TOL: f64 = 1e-3;
const FLAT_TOL: f64 = 1e-3;
const NW_TOL: f64 = 1e-6;
const DEGENERACY_TOL: f64 = 1e-6;
const SEPARATION_FLOOR: f64 = 1e-3;
const SEPARATION_DRIFT: f64 = 0.05;
const FPLUS_REL: f64 = 0.01;
const FPLUS_AT_ONE: f64 = 1e-3;
const WIGNER_REL: f64 = 0.01;
const FLAT_HOLONOMY: f64 = 1e-8;
const FUZZ_CASES: usize = 100_000;

const SEED: u64 = 7;
const REFERENCE: (usize, usize, usize) = (8, 48, 96);
/// Angular refinement at the reference shell resolution.
const ANGULAR_LADDER: [(usize, usize, usize); 3] = [(6, 16, 32), (8, 24, 48), (8, 48, 96)];
/// Refines `Nr` too, for relations limited by the radial differencing.
const FULL_LADDER: [(usize, usize, usize); 3] = [(6, 16, 32), (8, 24, 48), (12, 48, 96)];

fn verdict(n: u32, label: &str, pass: bool, detail: String) {
    println!("criterion {n} {label}: {} {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {n} {label}: {detail}");
}

fn grid((nr, nt, np): (usize, usize, usize)) -> Arc<Grid<f64>> {
    Arc::new(make_grid(nr, nt, np, 1.0, 2.0).unwrap())
}

fn section(rep: RepSpec, g: &Arc<Grid<f64>>) -> Section<f64> {
    random_test_section(rep, g.clone(), SEED, Profile::broad(ProfileKind::MultiBump))
}

fn s(spin: u8) -> RepSpec {
    RepSpec::massive(spin, 1.0).unwrap()
}

fn h(helicity: i8) -> RepSpec {
    RepSpec::massless(helicity).unwrap()
}

/// Mean `log(e_i/e_{i+1}) / log(Nθ_{i+1}/Nθ_i)`; `None` at the exact floor.
fn order(ladder: &[(usize, usize, usize)], res: &[f64]) -> Option<f64> {
    let steps: Vec<f64> = (0..res.len() - 1)
        .filter(|&i| res[i] > 1e-12 && res[i + 1] > 1e-12)
        .map(|i| (res[i] / res[i + 1]).ln() / (ladder[i + 1].1 as f64 / ladder[i].1 as f64).ln())
        .collect();
    (!steps.is_empty()).then(|| steps.iter().sum::<f64>() / steps.len() as f64)
}

/// Worst reference value and worst order over a set of ladder runs.
fn converged(ladder: &[(usize, usize, usize)], runs: &[Vec<f64>], tol: f64) -> (bool, f64, f64) {
    let mut worst = 0.0f64;
    let mut min_order = f64::INFINITY;
    let mut ok = true;
    for res in runs {
        let last = *res.last().unwrap();
        worst = worst.max(last);
        if let Some(p) = order(ladder, res) {
            min_order = min_order.min(p);
            ok &= p >= MIN_ORDER || last <= 1e-12;
        }
        ok &= last <= tol;
    }
    (ok, worst, min_order)
}

fn rel(a: &Section<f64>, psi: &Section<f64>) -> f64 {
    a.norm() / psi.norm()
}

#[test]
fn criterion_01_symbolic_suite() {
    let t = Instant::now();
    let reports = [identity_suite(Mode::Massive, Mutation::None), identity_suite(Mode::Massless, Mutation::None)];
    let secs = t.elapsed().as_secs_f64();
    let total: usize = reports.iter().map(|r| r.results.len()).sum();
    let failed: Vec<&str> = reports.iter().flat_map(|r| r.failures().map(|f| f.name.as_str())).collect();
    verdict(
        1,
        "symbolic identities",
        failed.is_empty() && total > 0 && secs < SYMBOLIC_SECONDS,
        format!("{total} identities exact, failures {failed:?}, {secs:.2}s (limit {SYMBOLIC_SECONDS}s)"),
    );
}

#[test]
fn criterion_02_numerical_algebra() {
    let t = Instant::now();
    let reps = [s(0), s(1), h(-1), h(0), h(1)];
    let sc = Scheme::default();
    let g = grid(REFERENCE);
    let mut worst = 0.0f64;
    for rep in reps {
        let psi = section(rep, &g);
        for fam in Family::ALL {
            worst = worst.max(family_residual(fam, &psi, &sc).unwrap());
        }
    }
    let mut runs = Vec::new();
    let sections: Vec<Vec<Section<f64>>> =
        FULL_LADDER.iter().map(|&r| { let g = grid(r); reps.iter().map(|&rep| section(rep, &g)).collect() }).collect();
    for (i, _) in reps.iter().enumerate() {
        for fam in Family::ALL {
            runs.push(sections.iter().map(|row| family_residual(fam, &row[i], &sc).unwrap()).collect::<Vec<f64>>());
        }
    }
    let (ok, _, min_order) = converged(&FULL_LADDER, &runs, f64::INFINITY);
    let secs = t.elapsed().as_secs_f64();
    verdict(
        2,
        "numerical Poincare algebra",
        ok && worst <= ALGEBRA_TOL && secs < ALGEBRA_SECONDS,
        format!("max residual {worst:.2e} at {REFERENCE:?} (tol {ALGEBRA_TOL:e}), min order {min_order:.2} on {FULL_LADDER:?}, {secs:.1}s"),
    );
}

#[test]
fn criterion_03_chern_obstruction() {
    let t = Instant::now();
    let opts = ChernOptions { nt: 48, np: 96, ..ChernOptions::default() };
    let kinds = [
        Connection::new(ConnectionKind::Boost),
        Connection::new(ConnectionKind::Rotation),
        Connection::new(ConnectionKind::Affine(FProfile::Constant(0.5))),
        Connection::perturbed(ConnectionKind::Boost, Perturbation::Constant { c: 0.3, u: [0.2, -0.4, 0.9] }),
    ];
    let mut ok = true;
    let mut worst_margin = 0.0f64;
    let mut seen = Vec::new();
    for hel in [-1i8, 0, 1] {
        let target = -2 * hel as i64;
        for c in &kinds {
            let r = chern_number(c, &h(hel), &opts).unwrap();
            let margin = (r.raw - r.integer as f64).abs();
            worst_margin = worst_margin.max(margin);
            ok &= r.integer == target && margin <= CHERN_MARGIN;
            seen.push((hel, r.integer));
        }
    }
    let secs = t.elapsed().as_secs_f64();
    verdict(
        3,
        "Chern number -2h",
        ok && secs < CHERN_SECONDS,
        format!("(h, C) {seen:?}, worst rounding margin {worst_margin:.1e} (limit {CHERN_MARGIN}), {secs:.1}s"),
    );
}

/// `‖F(e_θ, e_φ)ψ − iχ(H² − f²m²)ψ/(|P|²H²)‖ / ‖ψ‖`.
fn curvature_defect(kind: &ConnectionKind, psi: &Section<f64>) -> f64 {
    let sc = Scheme::default();
    let f = curvature_commutator(&Connection::new(kind.clone()), &TangentField::ETheta, &TangentField::EPhi, psi, &sc).unwrap();
    let chi = apply_generator(Gen::Chi, psi, &sc).unwrap();
    let (m, w, g) = (psi.rep.mass, kind.weight().unwrap(), psi.grid.clone());
    let pred = chi.mul_by(|n| {
        let r = g.r[g.coords(n).0];
        let h2 = r * r + m * m;
        let f = w.eval(r, m).unwrap();
        C::new(0.0, (h2 - f * f * m * m) / (r * r * h2))
    });
    rel(&f.sub(&pred), psi)
}

#[test]
fn criterion_04_curvature_formulas() {
    let sc = Scheme::default();
    let mut runs: Vec<Vec<f64>> = Vec::new();
    let mut cross: Vec<Vec<f64>> = vec![Vec::new(), Vec::new()];
    let cases: Vec<(RepSpec, ConnectionKind)> = [s(0), s(1), h(-1), h(1)]
        .into_iter()
        .flat_map(|rep| [(rep, ConnectionKind::Boost), (rep, ConnectionKind::Rotation)])
        .collect();
    let mut per_case = vec![Vec::new(); cases.len()];
    for &rung in &ANGULAR_LADDER {
        let g = grid(rung);
        for (i, (rep, kind)) in cases.iter().enumerate() {
            per_case[i].push(curvature_defect(kind, &section(*rep, &g)));
        }
        let c = cross_commutator_check(&section(s(1), &g), &sc).unwrap();
        cross[0].push(c.boost_rotation);
        cross[1].push(c.rotation_boost);
    }
    runs.extend(per_case);
    let (ok_f, worst_f, order_f) = converged(&ANGULAR_LADDER, &runs, CURVATURE_TOL);
    let (ok_x, worst_x, order_x) = converged(&ANGULAR_LADDER, &cross, CURVATURE_TOL);
    verdict(
        4,
        "curvature formulas",
        ok_f && ok_x,
        format!(
            "F_K/F_R max {worst_f:.2e} min order {order_f:.2}; mixed commutators max {worst_x:.2e} min order {order_x:.2} (tol {CURVATURE_TOL:e})"
        ),
    );
}

#[test]
fn criterion_05_flat_connection_equivalence() {
    let sc = Scheme::default();
    let flat = SplitOperators::new(ConnectionKind::FlatMassive, sc);
    let boost = SplitOperators::new(ConnectionKind::Boost, sc);
    let mut so3_flat = Vec::new();
    let mut identity = Vec::new();
    let mut so3_boost = Vec::new();
    let mut jperp = Vec::new();
    for &rung in &ANGULAR_LADDER {
        let g = grid(rung);
        so3_flat.push(flat.so3_residual(Part::Orbital, &section(s(1), &g)).unwrap());
        let psi = section(h(1), &g);
        let d = boost.defect_identity(&psi).unwrap();
        identity.push(d.identity);
        so3_boost.push(d.so3);
        jperp.push(j_perp_residual(&psi, &sc).unwrap());
    }
    let (ok_flat, v_flat, p_flat) = converged(&ANGULAR_LADDER, &[so3_flat], FLAT_TOL);
    let (ok_id, v_id, _) = converged(&ANGULAR_LADDER, &[identity], FLAT_TOL);
    let (ok_jp, v_jp, _) = converged(&ANGULAR_LADDER, &[jperp], FLAT_TOL);
    let n = so3_boost.len();
    let limit = so3_boost[n - 1];
    let drift = ((limit - so3_boost[n - 2]) / limit).abs();
    let nonzero = limit > 100.0 * FLAT_TOL && drift < SEPARATION_DRIFT;
    verdict(
        5,
        "flat-connection equivalence",
        ok_flat && ok_id && ok_jp && nonzero,
        format!(
            "flat so3 {v_flat:.2e} order {p_flat:.2}; boost so3 -> {limit:.4} (drift {drift:.1e}); defect identity {v_id:.2e}; J-perp {v_jp:.2e} (tol {FLAT_TOL:e})"
        ),
    );
}

#[test]
fn criterion_06_newton_wigner() {
    let sc = Scheme::default();
    let g = grid(REFERENCE);
    let matched = [s(0), s(1), RepSpec::massive(2, 0.7).unwrap()]
        .into_iter()
        .map(|rep| nw_match_residual(&section(rep, &g), &sc).unwrap())
        .fold(0.0f64, f64::max);
    let fine = grid((12, REFERENCE.1, REFERENCE.2));
    let frame = parallel_frame(s(1), fine.clone(), fine.index(6, REFERENCE.1 / 2, 0)).unwrap();
    let coords = nw_coordinate_residual(&frame, &section(s(1), &fine), &sc).unwrap();
    verdict(
        6,
        "Newton-Wigner",
        matched <= NW_TOL && coords <= NW_TOL,
        format!("closed form vs iD+ {matched:.2e}; Q = i grad in the parallel frame {coords:.2e} at Nr=12 (tol {NW_TOL:e})"),
    );
}

#[test]
fn criterion_07_massless_degeneracy() {
    let sc = Scheme::default();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let frames: Vec<TangentField> = (0..10)
        .map(|_| TangentField::Constant([rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]))
        .collect();
    let g = grid(REFERENCE);
    let massless = [h(-1), h(0), h(1)]
        .into_iter()
        .map(|rep| degeneracy_residual(&frames, &[ConnectionKind::Rotation], &section(rep, &g), &sc).unwrap())
        .fold(0.0f64, f64::max);
    let transverse = [TangentField::ETheta, TangentField::EPhi];
    let bound: Vec<f64> = ANGULAR_LADDER[1..]
        .iter()
        .map(|&r| degeneracy_residual(&transverse, &[ConnectionKind::Rotation], &section(s(1), &grid(r)), &sc).unwrap())
        .collect();
    let drift = ((bound[1] - bound[0]) / bound[1]).abs();
    verdict(
        7,
        "massless degeneracy",
        massless <= DEGENERACY_TOL && bound[1] > SEPARATION_FLOOR && drift < SEPARATION_DRIFT,
        format!("m=0 max {massless:.2e} over 10 frames (tol {DEGENERACY_TOL:e}); m>0 bound {:.4} -> {:.4} (drift {drift:.1e})", bound[0], bound[1]),
    );
}

#[test]
fn criterion_08_f_plus_selection() {
    let rows = f_plus_scan(&section(s(1), &grid(REFERENCE)), &[0.5, 0.9, 1.0, 1.1, 2.0], &Scheme::default()).unwrap();
    let argmin = rows.iter().min_by(|a, b| a.measured.total_cmp(&b.measured)).unwrap().lambda;
    let worst_rel = rows.iter().filter(|r| r.lambda != 1.0).map(|r| r.deviation / r.predicted).fold(0.0f64, f64::max);
    let at_one = rows.iter().find(|r| r.lambda == 1.0).unwrap().measured;
    verdict(
        8,
        "f+ selection",
        argmin == 1.0 && worst_rel <= FPLUS_REL && at_one <= FPLUS_AT_ONE,
        format!("argmin lambda {argmin}; worst relative deviation {worst_rel:.2e} (tol {FPLUS_REL}); |F| at lambda=1 {at_one:.2e}"),
    );
}

#[test]
fn criterion_09_wigner_rotation() {
    let loops: Vec<HolonomyLoop> =
        [0.01, 0.05].iter().map(|&a| HolonomyLoop::square(1.5, [0.3, 0.4, 0.8], a).unwrap()).collect();
    let mut worst_rel = 0.0f64;
    let mut worst_flat = 0.0f64;
    for rep in [s(1), RepSpec::massive(2, 0.5).unwrap()] {
        for p in probe_loops(&rep, &loops, &TransportOptions::default()).unwrap() {
            worst_rel = worst_rel.max(((p.boost_angle - p.predicted_angle) / p.predicted_angle).abs());
            worst_flat = worst_flat.max(p.flat_defect);
        }
    }
    verdict(
        9,
        "Wigner rotation",
        worst_rel <= WIGNER_REL && worst_flat <= FLAT_HOLONOMY,
        format!("boost angle relative error {worst_rel:.2e} (tol {WIGNER_REL}); flat defect {worst_flat:.2e} (tol {FLAT_HOLONOMY:e})"),
    );
}

fn mutate(rng: &mut ChaCha8Rng, src: &str) -> String {
    const ALPHABET: &[u8] = b"HPJKmi0123456789()[],+-*/ ^.#$\n";
    let mut s: Vec<u8> = src.bytes().collect();
    for _ in 0..rng.gen_range(1..6) {
        let at = rng.gen_range(0..=s.len());
        let c = ALPHABET[rng.gen_range(0..ALPHABET.len())];
        match rng.gen_range(0..3) {
            0 if at < s.len() => {
                s.remove(at);
            }
            1 if at < s.len() => s[at] = c,
            _ => s.insert(at, c),
        }
    }
    String::from_utf8(s).unwrap()
}

fn token_soup(rng: &mut ChaCha8Rng) -> String {
    (0..rng.gen_range(0..24)).map(|_| FUZZ_TOKENS[rng.gen_range(0..FUZZ_TOKENS.len())]).collect()
}

#[test]
fn criterion_10_parser() {
    let alg = Algebra::new(Mode::Massive);
    let mut round_trips = 0;
    for (lhs, rhs) in CATALOG {
        let mut ok = eval_str(&format!("{lhs} - ({rhs})"), &alg).unwrap().is_zero();
        for side in [lhs, rhs] {
            let ast = parse(side).unwrap();
            ok &= parse(&ast.to_string()).unwrap().to_string() == ast.to_string();
            let parts = match eval_str(side, &alg).unwrap() {
                Value::Scalar(e) => vec![e],
                Value::Vector(v) => v.0.to_vec(),
            };
            for e in parts {
                ok &= eval_str(&e.to_string(), &alg).unwrap().into_scalar().unwrap().sub(&e).is_zero();
            }
        }
        round_trips += ok as usize;
    }
    // Token soups go through parsing and lowering; mutated catalog
    // statements, mostly still well formed, through the parser only.
    let bounded = Algebra::new(Mode::Massive).with_max_word_len(4);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut panics, mut errors, mut unstructured) = (0usize, 0usize, 0usize);
    let mut tally = |r: std::thread::Result<Result<(), LangError>>| match r {
        Err(_) => panics += 1,
        Ok(Err(e)) => {
            errors += 1;
            unstructured += (e.line == 0 || e.col == 0 || e.message.is_empty()) as usize;
        }
        Ok(Ok(())) => {}
    };
    for _ in 0..FUZZ_CASES {
        let soup = token_soup(&mut rng);
        tally(catch_unwind(AssertUnwindSafe(|| eval_str(&soup, &bounded).map(|_| ()))));
        let base = CATALOG[rng.gen_range(0..CATALOG.len())].0;
        let text = mutate(&mut rng, base);
        tally(catch_unwind(AssertUnwindSafe(|| parse(&text).map(|_| ()))));
    }
    verdict(
        10,
        "parser",
        round_trips == CATALOG.len() && panics == 0 && unstructured == 0,
        format!(
            "catalog round trips {round_trips}/{}; fuzz 2x{FUZZ_CASES} cases, {errors} errors ({unstructured} without location), {panics} panics",
            CATALOG.len()
        ),
    );
}
