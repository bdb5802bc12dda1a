use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use splitlab::algebra::{identity_suite, Algebra, Mode, Mutation};
use splitlab::bundle::{
    apply_generator, family_residual, make_grid, random_test_section, Family, Gen, Grid, Profile, ProfileKind, RepKind,
    RepSpec, Scheme, Section,
};
use splitlab::connection::{
    chern_number, cross_commutator_check, curvature_commutator, ChernOptions, Connection, ConnectionKind, FProfile,
    HolonomyLoop, TangentField, TransportOptions,
};
use splitlab::lang::{eval_str, parse, Value, CATALOG, FUZZ_TOKENS};
use splitlab::split::{
    degeneracy_residual, f_plus_scan, j_perp_residual, nw_coordinate_residual, nw_match_residual, parallel_frame,
    probe_loops, spin_in_frame, Part, SplitOperators,
};

use crate::config::{Rung, RunConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Symbolic,
    Parser,
    Algebra,
    Chern,
    Curvature,
    Flatness,
    Nw,
    Degeneracy,
    Fplus,
    Holonomy,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Symbolic,
        Suite::Parser,
        Suite::Algebra,
        Suite::Chern,
        Suite::Curvature,
        Suite::Flatness,
        Suite::Nw,
        Suite::Degeneracy,
        Suite::Fplus,
        Suite::Holonomy,
    ];

    /// Suites whose checks carry a convergence order.
    pub fn needs_ladder(self) -> bool {
        matches!(self, Suite::Algebra | Suite::Curvature | Suite::Flatness)
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Symbolic => "symbolic",
            Suite::Parser => "parser",
            Suite::Algebra => "algebra",
            Suite::Chern => "chern",
            Suite::Curvature => "curvature",
            Suite::Flatness => "flatness",
            Suite::Nw => "nw",
            Suite::Degeneracy => "degeneracy",
            Suite::Fplus => "fplus",
            Suite::Holonomy => "holonomy",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How `measured` is compared with `tolerance`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Bound {
    AtMost,
    /// `|measured − target| ≤ tolerance`.
    Near { target: f64 },
    /// Above `floor` and within `tolerance` relative change across the last
    /// two rungs.
    Stable { floor: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RungResidual {
    pub grid: Rung,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    /// Kebab-case label of the identity or result checked, or `plumbing`.
    pub anchor: String,
    pub measured: Option<f64>,
    pub tolerance: f64,
    pub bound: Bound,
    pub pass: bool,
    pub order: Option<f64>,
    /// Set when residuals fail to decrease between some pair of rungs.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub non_monotone: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub rungs: Vec<RungResidual>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Residuals at or below this are treated as exact and need no order.
pub const EXACT_FLOOR: f64 = 1e-12;

impl Check {
    fn new(suite: Suite, name: String, anchor: &str, measured: Result<f64, String>, tolerance: f64, bound: Bound) -> Self {
        let (measured, error) = match measured {
            Ok(v) => (Some(v), None),
            Err(e) => (None, Some(e)),
        };
        let pass = measured.is_some_and(|v| match bound {
            Bound::AtMost => v <= tolerance,
            Bound::Near { target } => (v - target).abs() <= tolerance,
            Bound::Stable { floor } => v > floor,
        });
        Check {
            suite,
            name,
            anchor: anchor.to_string(),
            measured,
            tolerance,
            bound,
            pass,
            order: None,
            non_monotone: false,
            rungs: Vec::new(),
            error,
        }
    }
}

/// Mean of `log(e_i / e_{i+1}) / log(h_i / h_{i+1})` with `h ∝ 1/Nθ`, or
/// `1/Nr` where the angular mesh is unchanged.
pub fn order_estimate(rungs: &[RungResidual]) -> Option<f64> {
    let steps: Vec<f64> = rungs
        .windows(2)
        .filter(|w| w[0].residual > EXACT_FLOOR && w[1].residual > EXACT_FLOOR)
        .map(|w| {
            let (a, b) = (w[0].grid, w[1].grid);
            let ratio = if b[1] != a[1] { b[1] as f64 / a[1] as f64 } else { b[0] as f64 / a[0] as f64 };
            (w[0].residual / w[1].residual).ln() / ratio.ln()
        })
        .collect();
    (!steps.is_empty()).then(|| steps.iter().sum::<f64>() / steps.len() as f64)
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    scheme: Scheme,
}

impl Ctx<'_> {
    fn grid(&self, rung: Rung) -> Result<Arc<Grid<f64>>, String> {
        let g = &self.cfg.grid;
        make_grid(rung[0], rung[1], rung[2], g.r_min, g.r_max).map(Arc::new).map_err(|e| e.to_string())
    }

    fn section(&self, rep: RepSpec, g: &Arc<Grid<f64>>) -> Section<f64> {
        random_test_section(rep, g.clone(), self.cfg.seed, Profile::broad(ProfileKind::MultiBump))
    }

    fn tol(&self, over: Option<f64>, default: f64) -> f64 {
        over.unwrap_or(default)
    }
}

pub fn rep_label(rep: &RepSpec) -> String {
    match rep.kind {
        RepKind::Massive { spin } => format!("massive-s{spin}-m{}", rep.mass),
        RepKind::Massless { helicity } => format!("massless-h{helicity}"),
    }
}

fn spin(rep: &RepSpec) -> Option<u8> {
    match rep.kind {
        RepKind::Massive { spin } => Some(spin),
        RepKind::Massless { .. } => None,
    }
}

fn err<E: fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Runs one suite. Checks come back in a fixed order.
pub fn run_suite(suite: Suite, cfg: &RunConfig) -> Vec<Check> {
    let ctx = Ctx { cfg, scheme: Scheme::default() };
    match suite {
        Suite::Symbolic => symbolic(),
        Suite::Parser => parser(cfg.seed),
        Suite::Algebra => algebra(&ctx),
        Suite::Chern => chern(&ctx),
        Suite::Curvature => curvature(&ctx),
        Suite::Flatness => flatness(&ctx),
        Suite::Nw => nw(&ctx),
        Suite::Degeneracy => degeneracy(&ctx),
        Suite::Fplus => fplus(&ctx),
        Suite::Holonomy => holonomy(&ctx),
    }
}

fn symbolic() -> Vec<Check> {
    [Mode::Massive, Mode::Massless]
        .into_iter()
        .flat_map(|mode| {
            let tag = if mode == Mode::Massive { "massive" } else { "massless" };
            identity_suite(mode, Mutation::None).results.into_iter().map(move |r| {
                let measured = match &r.error {
                    Some(e) => Err(e.clone()),
                    None => Ok(r.nonzero_terms as f64),
                };
                let mut c = Check::new(Suite::Symbolic, format!("symbolic/{tag}/{}", r.name), &r.anchor, measured, 0.0, Bound::AtMost);
                c.pass &= r.zero;
                c
            })
        })
        .collect()
}

/// Number of mutated inputs fed to the parser.
pub const PARSER_FUZZ_CASES: usize = 2000;

fn parser(seed: u64) -> Vec<Check> {
    let alg = Algebra::new(Mode::Massive);
    let mut out: Vec<Check> = CATALOG
        .iter()
        .enumerate()
        .map(|(i, (lhs, rhs))| {
            let measured = (|| -> Result<f64, String> {
                let mut bad = 0;
                if !eval_str(&format!("{lhs} - ({rhs})"), &alg).map_err(err)?.is_zero() {
                    bad += 1;
                }
                for side in [lhs, rhs] {
                    let ast = parse(side).map_err(err)?;
                    if parse(&ast.to_string()).map_err(err)?.to_string() != ast.to_string() {
                        bad += 1;
                    }
                    let parts = match eval_str(side, &alg).map_err(err)? {
                        Value::Scalar(e) => vec![e],
                        Value::Vector(v) => v.0.to_vec(),
                    };
                    for e in parts {
                        let back = eval_str(&e.to_string(), &alg).map_err(err)?.into_scalar();
                        if !back.is_some_and(|b| b.sub(&e).is_zero()) {
                            bad += 1;
                        }
                    }
                }
                Ok(bad as f64)
            })();
            Check::new(Suite::Parser, format!("parser/catalog-{:02}", i + 1), "plumbing", measured, 0.0, Bound::AtMost)
        })
        .collect();
    // Token soups are lowered; mutated catalog statements are only parsed,
    // since lowering well-formed ones costs milliseconds each.
    let bounded = Algebra::new(Mode::Massive).with_max_word_len(4);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alphabet: Vec<char> = "HPJKmi0123()[],+-*/ ^.#".chars().collect();
    let mut crashes = 0usize;
    for _ in 0..PARSER_FUZZ_CASES {
        let soup: String = (0..rng.gen_range(0..24)).map(|_| FUZZ_TOKENS[rng.gen_range(0..FUZZ_TOKENS.len())]).collect();
        let (lhs, _) = CATALOG[rng.gen_range(0..CATALOG.len())];
        let mut s: Vec<char> = lhs.chars().collect();
        for _ in 0..rng.gen_range(1..4) {
            let at = rng.gen_range(0..=s.len());
            match rng.gen_range(0..3) {
                0 if at < s.len() => {
                    s.remove(at);
                }
                1 if at < s.len() => s[at] = alphabet[rng.gen_range(0..alphabet.len())],
                _ => s.insert(at, alphabet[rng.gen_range(0..alphabet.len())]),
            }
        }
        let text: String = s.into_iter().collect();
        let lowered = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| eval_str(&soup, &bounded).map(|_| ())));
        let parsed = std::panic::catch_unwind(|| parse(&text).map(|_| ()));
        crashes += lowered.is_err() as usize + parsed.is_err() as usize;
    }
    out.push(Check::new(Suite::Parser, "parser/fuzz-no-panic".into(), "plumbing", Ok(crashes as f64), 0.0, Bound::AtMost));
    out
}

type Item = (String, &'static str, Result<f64, String>);

/// Evaluates `f` on every ladder rung and folds the residuals into checks
/// with order estimates. `f` must return the same names in the same order
/// on every rung.
fn ladder(ctx: &Ctx, suite: Suite, tol: f64, f: impl Fn(&Arc<Grid<f64>>) -> Vec<Item>) -> Vec<Check> {
    let min_order = ctx.tol(ctx.cfg.tolerances.min_order, 2.0);
    let per_rung: Vec<(Rung, Vec<Item>)> = ctx
        .cfg
        .grid
        .ladder
        .iter()
        .map(|&rung| match ctx.grid(rung) {
            Ok(g) => (rung, f(&g)),
            Err(e) => (rung, f_names_only(&f, ctx, &e)),
        })
        .collect();
    let (_, last) = per_rung.last().expect("validated ladder");
    last.iter()
        .enumerate()
        .map(|(i, (name, anchor, _))| {
            let mut rungs = Vec::new();
            let mut error = None;
            for (rung, items) in &per_rung {
                match &items[i].2 {
                    Ok(v) => rungs.push(RungResidual { grid: *rung, residual: *v }),
                    Err(e) => error = Some(format!("{rung:?}: {e}")),
                }
            }
            let measured = match error {
                Some(e) => Err(e),
                None => Ok(rungs.last().map_or(0.0, |r| r.residual)),
            };
            let mut c = Check::new(suite, name.clone(), anchor, measured, tol, Bound::AtMost);
            c.order = order_estimate(&rungs);
            c.non_monotone = rungs.windows(2).any(|w| w[1].residual > w[0].residual && w[0].residual > EXACT_FLOOR);
            if c.pass && c.measured.is_some_and(|v| v > EXACT_FLOOR) {
                c.pass = c.order.is_some_and(|p| p >= min_order);
            }
            c.rungs = rungs;
            c
        })
        .collect()
}

// Names come from the reference rung; a rung without a grid fails them all.
fn f_names_only(f: &impl Fn(&Arc<Grid<f64>>) -> Vec<Item>, ctx: &Ctx, e: &str) -> Vec<Item> {
    let rung = ctx.cfg.reference();
    match ctx.grid(rung) {
        Ok(g) => f(&g).into_iter().map(|(n, a, _)| (n, a, Err(e.to_string()))).collect(),
        Err(_) => Vec::new(),
    }
}

fn algebra(ctx: &Ctx) -> Vec<Check> {
    let reps = ctx.cfg.rep_specs();
    let tol = ctx.tol(ctx.cfg.tolerances.algebra, 1e-3);
    ladder(ctx, Suite::Algebra, tol, |g| {
        reps.iter()
            .flat_map(|rep| {
                let psi = ctx.section(*rep, g);
                Family::ALL.into_iter().map(move |fam| {
                    let r = family_residual(fam, &psi, &ctx.scheme).map_err(err);
                    (format!("algebra/{}/{fam}", rep_label(rep)), "poincare-algebra", r)
                }).collect::<Vec<_>>()
            })
            .collect()
    })
}

/// `‖F(e_θ, e_φ)ψ − iχ(H² − f²m²)ψ/(|P|²H²)‖ / ‖ψ‖`.
fn curvature_defect(kind: &ConnectionKind, psi: &Section<f64>, scheme: &Scheme) -> Result<f64, String> {
    let conn = Connection::new(kind.clone());
    let f = curvature_commutator(&conn, &TangentField::ETheta, &TangentField::EPhi, psi, scheme).map_err(err)?;
    let chi = apply_generator(Gen::Chi, psi, scheme).map_err(err)?;
    let m = psi.rep.mass;
    let w = kind.weight().expect("built-in kind");
    let g = psi.grid.clone();
    let mut c = vec![0.0; g.r.len()];
    for (ir, &r) in g.r.iter().enumerate() {
        let h2 = r * r + m * m;
        let f = w.eval(r, m).map_err(err)?;
        c[ir] = (h2 - f * f * m * m) / (r * r * h2);
    }
    let pred = chi.mul_by(|n| num_complex::Complex64::new(0.0, c[g.coords(n).0]));
    Ok(f.sub(&pred).norm() / psi.norm())
}

fn curvature(ctx: &Ctx) -> Vec<Check> {
    let reps = ctx.cfg.rep_specs();
    let tol = ctx.tol(ctx.cfg.tolerances.curvature, 1e-3);
    ladder(ctx, Suite::Curvature, tol, |g| {
        let mut out = Vec::new();
        for rep in &reps {
            let psi = ctx.section(*rep, g);
            let label = rep_label(rep);
            for (kind, tag) in [(ConnectionKind::Boost, "boost"), (ConnectionKind::Rotation, "rotation")] {
                let anchor = if tag == "boost" { "boost-curvature" } else { "rotation-curvature" };
                out.push((format!("curvature/{label}/{tag}"), anchor, curvature_defect(&kind, &psi, &ctx.scheme)));
            }
            if !rep.is_massless() {
                let cross = cross_commutator_check(&psi, &ctx.scheme).map_err(err);
                out.push((format!("curvature/{label}/boost-rotation"), "mixed-commutators", cross.clone().map(|c| c.boost_rotation)));
                out.push((format!("curvature/{label}/rotation-boost"), "mixed-commutators", cross.map(|c| c.rotation_boost)));
            }
        }
        out
    })
}

/// Relative change allowed between the last two rungs of a stable value.
pub const STABILITY: f64 = 0.05;

/// Turns a ladder check into a "converges to a positive value" check.
fn stable(mut c: Check, floor: f64) -> Check {
    c.bound = Bound::Stable { floor };
    c.tolerance = STABILITY;
    let n = c.rungs.len();
    c.pass = c.error.is_none()
        && n >= 2
        && c.rungs[n - 1].residual > floor
        && ((c.rungs[n - 1].residual - c.rungs[n - 2].residual) / c.rungs[n - 1].residual).abs() <= STABILITY;
    c.order = None;
    c.non_monotone = false;
    c
}

fn flatness(ctx: &Ctx) -> Vec<Check> {
    let reps = ctx.cfg.rep_specs();
    let tol = ctx.tol(ctx.cfg.tolerances.flatness, 1e-3);
    let checks = ladder(ctx, Suite::Flatness, tol, |g| {
        let mut out = Vec::new();
        for rep in &reps {
            let psi = ctx.section(*rep, g);
            let label = rep_label(rep);
            if !rep.is_massless() {
                let r = SplitOperators::new(ConnectionKind::FlatMassive, ctx.scheme).so3_residual(Part::Orbital, &psi);
                out.push((format!("flatness/{label}/flat-so3"), "flat-connection", r.map_err(err)));
            } else {
                if rep.transverse_helicity().is_some_and(|h| h != 0) {
                    let d = SplitOperators::new(ConnectionKind::Boost, ctx.scheme).defect_identity(&psi).map_err(err);
                    out.push((format!("flatness/{label}/defect-identity"), "curvature-defect", d.clone().map(|d| d.identity)));
                    out.push((format!("flatness/{label}/boost-so3"), "curvature-defect", d.map(|d| d.so3)));
                }
                out.push((format!("flatness/{label}/j-perp"), "massless-splitting", j_perp_residual(&psi, &ctx.scheme).map_err(err)));
            }
        }
        out
    });
    checks.into_iter().map(|c| if c.name.ends_with("/boost-so3") { stable(c, 10.0 * tol) } else { c }).collect()
}

fn chern(ctx: &Ctx) -> Vec<Check> {
    let g = &ctx.cfg.grid;
    let opts = ChernOptions { nt: g.chern_mesh[0], np: g.chern_mesh[1], radius: g.chern_radius, ..ChernOptions::default() };
    let kinds = [
        (ConnectionKind::Boost, "boost"),
        (ConnectionKind::Rotation, "rotation"),
        (ConnectionKind::Affine(FProfile::Constant(0.5)), "affine-0.5"),
    ];
    let mut out = Vec::new();
    for rep in ctx.cfg.rep_specs() {
        let RepKind::Massless { helicity } = rep.kind else { continue };
        let target = -2.0 * helicity as f64;
        for (kind, tag) in &kinds {
            let res = chern_number(&Connection::new(kind.clone()), &rep, &opts).map_err(err);
            let mut c = Check::new(
                Suite::Chern,
                format!("chern/{}/{tag}", rep_label(&rep)),
                "chern-obstruction",
                res.as_ref().map(|r| r.raw).map_err(Clone::clone),
                0.05,
                Bound::Near { target },
            );
            c.pass &= res.is_ok_and(|r| r.integer as f64 == target);
            out.push(c);
        }
    }
    out
}

fn nw(ctx: &Ctx) -> Vec<Check> {
    let tol = ctx.tol(ctx.cfg.tolerances.nw, 1e-6);
    let rung = ctx.cfg.reference();
    let mut out = Vec::new();
    for rep in ctx.cfg.rep_specs() {
        let Some(s) = spin(&rep) else { continue };
        let label = rep_label(&rep);
        let name = |t: &str| format!("nw/{label}/{t}");
        let reference = ctx.grid(rung).map(|g| (ctx.section(rep, &g), g));
        let matched = reference.clone().and_then(|(psi, _)| nw_match_residual(&psi, &ctx.scheme).map_err(err));
        out.push(Check::new(Suite::Nw, name("closed-form"), "newton-wigner", matched, tol, Bound::AtMost));
        let coord_rung = [ctx.cfg.grid.nw_radial.max(rung[0]), rung[1], rung[2]];
        let frame = ctx.grid(coord_rung).and_then(|g| {
            let reference_node = g.index(coord_rung[0] / 2, coord_rung[1] / 2, 0);
            let fr = parallel_frame(rep, g.clone(), reference_node).map_err(err)?;
            Ok((fr, ctx.section(rep, &g)))
        });
        let coords = frame.as_ref().map_err(Clone::clone).and_then(|(fr, psi)| nw_coordinate_residual(fr, psi, &ctx.scheme).map_err(err));
        out.push(Check::new(Suite::Nw, name("coordinates"), "newton-wigner-coordinates", coords, tol, Bound::AtMost));
        let ortho = frame.as_ref().map(|(fr, _)| fr.orthonormality_defect()).map_err(Clone::clone);
        out.push(Check::new(Suite::Nw, name("frame-orthonormality"), "newton-wigner-coordinates", ortho, 1e-8, Bound::AtMost));
        if s > 0 {
            let spin_dev = frame.as_ref().map_err(Clone::clone).and_then(|(fr, _)| {
                let n = fr.grid.len();
                spin_in_frame(fr, &ctx.scheme, &[0, n / 3, 2 * n / 3, n - 1]).map(|r| r.max_deviation).map_err(err)
            });
            out.push(Check::new(Suite::Nw, name("spin-in-frame"), "massive-splitting", spin_dev, tol, Bound::AtMost));
        }
    }
    out
}

/// Number of random constant frames in the degeneracy check.
pub const DEGENERACY_FRAMES: usize = 10;

fn degeneracy(ctx: &Ctx) -> Vec<Check> {
    let tol = ctx.tol(ctx.cfg.tolerances.degeneracy, 1e-6);
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.cfg.seed);
    let frames: Vec<TangentField> = (0..DEGENERACY_FRAMES)
        .map(|_| TangentField::Constant([rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]))
        .collect();
    let mut others = vec![ConnectionKind::Rotation];
    others.extend([0.0, 0.5, 1.0, 2.0].map(|f| ConnectionKind::Affine(FProfile::Constant(f))));
    let transverse = [TangentField::ETheta, TangentField::EPhi];
    let ladder = &ctx.cfg.grid.ladder;
    let mut out = Vec::new();
    for rep in ctx.cfg.rep_specs() {
        let label = rep_label(&rep);
        if rep.is_massless() {
            let r = ctx
                .grid(ctx.cfg.reference())
                .and_then(|g| degeneracy_residual(&frames, &others, &ctx.section(rep, &g), &ctx.scheme).map_err(err));
            out.push(Check::new(Suite::Degeneracy, format!("degeneracy/{label}/coincide"), "massless-degeneracy", r, tol, Bound::AtMost));
        } else if spin(&rep).is_some_and(|s| s > 0) && ladder.len() >= 2 {
            let mut rungs = Vec::new();
            let mut error = None;
            for &rung in &ladder[ladder.len() - 2..] {
                let r = ctx.grid(rung).and_then(|g| {
                    degeneracy_residual(&transverse, &[ConnectionKind::Rotation], &ctx.section(rep, &g), &ctx.scheme).map_err(err)
                });
                match r {
                    Ok(v) => rungs.push(RungResidual { grid: rung, residual: v }),
                    Err(e) => error = Some(e),
                }
            }
            let measured = error.map_or_else(|| Ok(rungs.last().expect("two rungs").residual), Err);
            let mut c = Check::new(Suite::Degeneracy, format!("degeneracy/{label}/separated"), "massive-separation", measured, 0.0, Bound::AtMost);
            c.rungs = rungs;
            out.push(stable(c, 1e-3));
        }
    }
    out
}

pub const FPLUS_LAMBDAS: [f64; 5] = [0.5, 0.9, 1.0, 1.1, 2.0];

fn fplus(ctx: &Ctx) -> Vec<Check> {
    let tol = ctx.tol(ctx.cfg.tolerances.fplus, 1e-2);
    let mut out = Vec::new();
    for rep in ctx.cfg.rep_specs() {
        if !spin(&rep).is_some_and(|s| s > 0) {
            continue;
        }
        let label = rep_label(&rep);
        let scan = ctx
            .grid(ctx.cfg.reference())
            .and_then(|g| f_plus_scan(&ctx.section(rep, &g), &FPLUS_LAMBDAS, &ctx.scheme).map_err(err));
        match scan {
            Ok(rows) => {
                for row in &rows {
                    let c = if row.lambda == 1.0 {
                        Check::new(Suite::Fplus, format!("fplus/{label}/lambda-1"), "f-plus", Ok(row.deviation), 1e-3, Bound::AtMost)
                    } else {
                        let relative = row.deviation / row.predicted;
                        Check::new(Suite::Fplus, format!("fplus/{label}/lambda-{}", row.lambda), "f-plus", Ok(relative), tol, Bound::AtMost)
                    };
                    out.push(c);
                }
                let argmin = rows.iter().min_by(|a, b| a.measured.total_cmp(&b.measured)).map(|r| r.lambda).unwrap_or(f64::NAN);
                out.push(Check::new(Suite::Fplus, format!("fplus/{label}/argmin"), "f-plus", Ok(argmin), 0.0, Bound::Near { target: 1.0 }));
            }
            Err(e) => out.push(Check::new(Suite::Fplus, format!("fplus/{label}/scan"), "f-plus", Err(e), tol, Bound::AtMost)),
        }
    }
    out
}

/// Integrator tolerance for the flat holonomy defect.
pub const FLAT_HOLONOMY_TOL: f64 = 1e-8;

fn holonomy(ctx: &Ctx) -> Vec<Check> {
    let tol = ctx.tol(ctx.cfg.tolerances.holonomy, 1e-2);
    let loops: Result<Vec<HolonomyLoop>, String> = ctx
        .cfg
        .loops
        .iter()
        .map(|l| HolonomyLoop::square(l.radius, l.center, l.solid_angle).map_err(err))
        .collect();
    let mut out = Vec::new();
    for rep in ctx.cfg.rep_specs() {
        if !spin(&rep).is_some_and(|s| s > 0) {
            continue;
        }
        let label = rep_label(&rep);
        match loops.clone().and_then(|ls| probe_loops(&rep, &ls, &TransportOptions::default()).map_err(err)) {
            Ok(reports) => {
                for (i, p) in reports.iter().enumerate() {
                    let rel = ((p.boost_angle - p.predicted_angle) / p.predicted_angle).abs();
                    out.push(Check::new(Suite::Holonomy, format!("holonomy/{label}/loop-{}/wigner", i + 1), "wigner-rotation", Ok(rel), tol, Bound::AtMost));
                    out.push(Check::new(Suite::Holonomy, format!("holonomy/{label}/loop-{}/flat", i + 1), "flat-connection", Ok(p.flat_defect), FLAT_HOLONOMY_TOL, Bound::AtMost));
                }
            }
            Err(e) => out.push(Check::new(Suite::Holonomy, format!("holonomy/{label}/loops"), "wigner-rotation", Err(e), tol, Bound::AtMost)),
        }
    }
    out
}

/// Runs the configured suites on a pool of `cfg.workers` threads and
/// returns the checks in suite order with per-suite wall times.
pub fn run_all(cfg: &RunConfig) -> (Vec<Check>, Vec<(Suite, f64)>) {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build().expect("thread pool");
    let mut suites = cfg.suites.clone();
    suites.sort();
    suites.dedup();
    let results: Vec<(Suite, Vec<Check>, f64)> = pool.install(|| {
        suites
            .par_iter()
            .map(|&s| {
                let t = std::time::Instant::now();
                let checks = run_suite(s, cfg);
                (s, checks, t.elapsed().as_secs_f64())
            })
            .collect()
    });
    let mut checks = Vec::new();
    let mut timings = Vec::new();
    for (s, c, t) in results {
        checks.extend(c);
        timings.push((s, t));
    }
    (checks, timings)
}
