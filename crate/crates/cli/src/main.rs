use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use splitlab::algebra::{Algebra, Mode};
use splitlab::lang::eval_str;
use splitlab_cli::config::{LoopEntry, RepEntry, Rung};
use splitlab_cli::{exit, exit_code, run, ConfigError, Report, RunConfig, Suite};

#[derive(Parser)]
#[command(name = "splitlab", version, about = "Checks of angular momentum splittings on particle bundles")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run suites and print one line per check.
    Run(RunArgs),
    /// Run the ladder suites and emit the convergence CSV.
    Convergence(RunArgs),
    /// Lattice Chern numbers of massless line bundles.
    Chern {
        #[command(flatten)]
        common: RunArgs,
        /// Angular mesh of the lattice.
        #[arg(long, value_name = "NT,NP", value_parser = parse_pair)]
        mesh: Option<[usize; 2]>,
    },
    /// Boost and flat holonomy around small square loops.
    Holonomy {
        #[command(flatten)]
        common: RunArgs,
        /// Enclosed solid angles; one loop each.
        #[arg(long = "solid-angle", num_args = 1..)]
        solid_angle: Vec<f64>,
        #[arg(long)]
        radius: Option<f64>,
        /// Loop centre direction.
        #[arg(long, value_name = "X,Y,Z", value_parser = parse_triple_f64)]
        center: Option<[f64; 3]>,
    },
    /// Normal-order an operator expression.
    Eval {
        expr: String,
        #[arg(long, value_enum, default_value = "massive")]
        mode: EvalMode,
        /// Exit 0 if the expression normal-orders to zero, 1 otherwise.
        #[arg(long)]
        check_zero: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum EvalMode {
    Massive,
    Massless,
}

#[derive(Args, Clone, Default)]
struct RunArgs {
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long = "suite", value_enum, num_args = 1..)]
    suites: Vec<Suite>,
    /// Mass of the massive representations.
    #[arg(long)]
    mass: Option<f64>,
    /// Massive spins; replaces the configured representations.
    #[arg(long, num_args = 1..)]
    spin: Vec<u8>,
    /// Massless helicities; replaces the configured representations.
    #[arg(long, num_args = 1.., allow_negative_numbers = true)]
    helicity: Vec<i8>,
    /// Reference grid. The ladder becomes (⌈Nr/2⌉, Nθ/3, Nφ/3),
    /// (⌈2Nr/3⌉, Nθ/2, Nφ/2), (Nr, Nθ, Nφ).
    #[arg(long, value_name = "NR,NT,NP", value_parser = parse_triple)]
    grid: Option<Rung>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Write the JSON report here; `-` prints it instead of the summary.
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Write the convergence CSV here; `-` prints it.
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
    /// Omit timings so identical runs give identical JSON.
    #[arg(long)]
    normalize: bool,
}

fn parse_list<T: std::str::FromStr, const N: usize>(s: &str) -> Result<[T; N], String> {
    let parts: Vec<T> = s
        .split(',')
        .map(|p| p.trim().parse::<T>().map_err(|_| format!("bad number {p:?}")))
        .collect::<Result<_, _>>()?;
    parts.try_into().map_err(|_| format!("expected {N} comma-separated values"))
}

fn parse_triple(s: &str) -> Result<Rung, String> {
    parse_list(s)
}

fn parse_pair(s: &str) -> Result<[usize; 2], String> {
    parse_list(s)
}

fn parse_triple_f64(s: &str) -> Result<[f64; 3], String> {
    parse_list(s)
}

fn ladder_for(g: Rung) -> Vec<Rung> {
    let [nr, nt, np] = g;
    vec![[nr.div_ceil(2), nt / 3, np / 3], [(2 * nr).div_ceil(3), nt / 2, np / 2], g]
}

fn build_config(a: &RunArgs, default_suites: &[Suite]) -> Result<RunConfig, ConfigError> {
    let mut cfg = match &a.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig { suites: default_suites.to_vec(), ..RunConfig::default() },
    };
    if !a.suites.is_empty() {
        cfg.suites = a.suites.clone();
    }
    if !a.spin.is_empty() || !a.helicity.is_empty() {
        let mass = a.mass.unwrap_or(1.0);
        cfg.reps = a.spin.iter().map(|&spin| RepEntry::Massive { spin, mass }).collect();
        cfg.reps.extend(a.helicity.iter().map(|&helicity| RepEntry::Massless { helicity }));
    } else if let Some(m) = a.mass {
        for r in &mut cfg.reps {
            if let RepEntry::Massive { mass, .. } = r {
                *mass = m;
            }
        }
    }
    if let Some(g) = a.grid {
        cfg.grid.ladder = ladder_for(g);
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(w) = a.workers {
        cfg.workers = w;
    }
    if a.json.is_some() {
        cfg.output.json = a.json.clone();
    }
    if a.csv.is_some() {
        cfg.output.csv = a.csv.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(path: &Path, text: &str) -> std::io::Result<()> {
    if path == Path::new("-") {
        print!("{text}");
        Ok(())
    } else {
        std::fs::write(path, text)
    }
}

fn finish(report: Report, normalize: bool, csv_default: bool) -> ExitCode {
    let code = exit_code(&report);
    let out = report.config.output.clone();
    let report = if normalize { report.normalized() } else { report };
    let to_stdout = |p: &Option<PathBuf>| p.as_deref() == Some(Path::new("-"));
    if !to_stdout(&out.json) && !(csv_default && out.csv.is_none()) && !to_stdout(&out.csv) {
        print!("{}", report.text());
    }
    if csv_default && out.csv.is_none() {
        print!("{}", report.to_csv());
    }
    let mut io = Ok(());
    if let Some(p) = &out.json {
        io = io.and(emit(p, &report.to_json()));
    }
    if let Some(p) = &out.csv {
        io = io.and(emit(p, &report.to_csv()));
    }
    if let Err(e) = io {
        eprintln!("error: {e}");
        return ExitCode::from(exit::RUNTIME as u8);
    }
    ExitCode::from(code as u8)
}

fn usage(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(exit::USAGE as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Run(a) => match build_config(&a, &Suite::ALL) {
            Ok(cfg) => finish(run(&cfg), a.normalize, false),
            Err(e) => usage(e),
        },
        Cmd::Convergence(a) => {
            let ladder: Vec<Suite> = Suite::ALL.into_iter().filter(|s| s.needs_ladder()).collect();
            match build_config(&a, &ladder) {
                Ok(cfg) => finish(run(&cfg), a.normalize, true),
                Err(e) => usage(e),
            }
        }
        Cmd::Chern { common, mesh } => {
            let a = RunArgs { suites: vec![Suite::Chern], ..common };
            let mut cfg = match build_config(&a, &[Suite::Chern]) {
                Ok(c) => c,
                Err(e) => return usage(e),
            };
            if let Some(m) = mesh {
                cfg.grid.chern_mesh = m;
            }
            finish(run(&cfg), a.normalize, false)
        }
        Cmd::Holonomy { common, solid_angle, radius, center } => {
            let a = RunArgs { suites: vec![Suite::Holonomy], ..common };
            let mut cfg = match build_config(&a, &[Suite::Holonomy]) {
                Ok(c) => c,
                Err(e) => return usage(e),
            };
            let base = cfg.loops.first().cloned().unwrap_or(LoopEntry { radius: 1.5, center: [0.3, 0.4, 0.8], solid_angle: 0.01 });
            if !solid_angle.is_empty() {
                cfg.loops = solid_angle.iter().map(|&s| LoopEntry { solid_angle: s, ..base.clone() }).collect();
            }
            for l in &mut cfg.loops {
                l.radius = radius.unwrap_or(l.radius);
                l.center = center.unwrap_or(l.center);
            }
            if let Err(e) = cfg.validate() {
                return usage(e);
            }
            finish(run(&cfg), a.normalize, false)
        }
        Cmd::Eval { expr, mode, check_zero } => {
            let alg = Algebra::new(match mode {
                EvalMode::Massive => Mode::Massive,
                EvalMode::Massless => Mode::Massless,
            });
            match eval_str(&expr, &alg) {
                Ok(v) => {
                    println!("{v}");
                    if check_zero {
                        let zero = v.is_zero();
                        println!("{}", if zero { "pass" } else { "fail" });
                        ExitCode::from(if zero { exit::PASS } else { exit::CHECK_FAILED } as u8)
                    } else {
                        ExitCode::SUCCESS
                    }
                }
                Err(e) => usage(e),
            }
        }
    }
}
