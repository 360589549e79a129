//! `horo`: command-line front end for the geometry, group and measure toolkit.
//!
//! Exit codes: 0 on success, 2 when a check or verification fails, 3 on
//! input errors (bad flags, unreadable or malformed specs, refused sizes).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use horo_core::groups::{
    enumerate_ball, jordan_of, length_spectrum_of, limit_cone_of, non_arithmeticity_report_with_depth,
    transversality_of, Ball, GroupElement, GroupSpec, DEFAULT_REDUCTION_DEPTH,
};
use horo_core::measures::{
    conformality_residual_of, critical_exponent_of, essential_witness_in, ps_density_of, BoundaryCell, CellGrid,
    LinearForm, DEFAULT_CELLS, DEFAULT_S_OFFSET,
};
use horo_core::product::VectorR;
use horo_core::tolerance::TOL;
use horo_core::verify::{quasi_invariance, run_pipeline_for, run_verify, VerifyJob, DENSITY_THRESHOLD};
use horo_core::Error;
use serde_json::json;

const EXIT_FAILED: u8 = 2;
const EXIT_INPUT: u8 = 3;
/// Largest relative error accepted by `br-check`.
const QUASI_INVARIANCE_TOL: f64 = 1e-9;

#[derive(Parser)]
#[command(name = "horo", version, about = "Busemann cocycles, word balls and conformal densities on products of hyperbolic planes")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Group spec JSON; the bundled diagonal Schottky fixture when omitted.
    #[arg(long, global = true)]
    spec: Option<PathBuf>,
    /// Linear form `a,b,…`; uniform `1/r` when omitted.
    #[arg(long, global = true)]
    psi: Option<String>,
    /// Word length.
    #[arg(long = "L", global = true, default_value_t = 8)]
    l: usize,
    /// Output file (or directory for `pipeline`); stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; 1 gives bit-reproducible runs.
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one seeded verification suite.
    Verify {
        #[arg(long)]
        lemma: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Enumerate the word ball: one row per element.
    Ball,
    /// Length spectrum and the non-arithmeticity heuristic.
    Spectrum {
        #[arg(long, default_value_t = DENSITY_THRESHOLD)]
        threshold: f64,
        #[arg(long, default_value_t = DEFAULT_REDUCTION_DEPTH)]
        depth: usize,
    },
    /// Normalized Cartan projections.
    Cone,
    /// Divergence and antipodality diagnostics.
    Transverse {
        #[arg(long, default_value_t = TOL.antipodal)]
        tol: f64,
    },
    /// Critical exponent of the ψ-Poincaré series.
    Delta,
    /// Atomic conformal density.
    Density {
        /// Exponent; `δ + 0.01` when omitted.
        #[arg(long)]
        s: Option<f64>,
    },
    /// Per-cell conformality residual for one generator.
    Residual {
        #[arg(long)]
        generator: String,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_CELLS)]
        cells: usize,
    },
    /// Box measure ratio under translation by a Jordan projection.
    BrCheck,
    /// Search the ball for an essential-value witness.
    Essential {
        /// Word of the loxodromic `φ`, e.g. `a b^-1`.
        #[arg(long)]
        phi: String,
        /// Target `a,b,…`; the Jordan projection of `φ` when omitted.
        #[arg(long)]
        a: Option<String>,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
    },
    /// Full export into `--out`.
    Pipeline,
}

/// Outcome of a command: the text to emit and whether its check passed.
struct Output {
    text: String,
    passed: bool,
}

impl Output {
    fn ok(text: String) -> Self {
        Self { text, passed: true }
    }
}

fn load_spec(common: &Common) -> horo_core::Result<GroupSpec> {
    match &common.spec {
        Some(p) => GroupSpec::from_path(p),
        None => Ok(GroupSpec::bundled_diagonal_schottky()),
    }
}

fn load_psi(common: &Common, r: usize) -> horo_core::Result<LinearForm> {
    let psi = match &common.psi {
        Some(text) => LinearForm::parse(text)?,
        None => LinearForm::new(vec![1.0 / r as f64; r])?,
    };
    psi.check_dim(r)?;
    Ok(psi)
}

fn pretty(v: &impl serde::Serialize) -> horo_core::Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn ball_csv(spec: &GroupSpec, ball: &Ball) -> String {
    let kappa: Vec<String> = (1..=spec.r()).map(|i| format!("kappa_{i}")).collect();
    let mut out = format!("word,word_length,{}\n", kappa.join(","));
    for e in ball.upto(ball.radius()) {
        let k: Vec<String> = e.cartan.0.iter().map(|x| format!("{x:.12e}")).collect();
        out.push_str(&format!("{},{},{}\n", spec.format_word(&e.word), e.word_length(), k.join(",")));
    }
    out
}

fn parse_vector(text: &str) -> horo_core::Result<VectorR> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("bad coordinate `{t}`")))
        })
        .collect::<horo_core::Result<Vec<_>>>()
        .map(VectorR)
}

fn exponent(ball: &Ball, psi: &LinearForm, l: usize, s: Option<f64>) -> horo_core::Result<f64> {
    match s {
        Some(s) => Ok(s),
        None => Ok(critical_exponent_of(ball, psi, l)?.delta + DEFAULT_S_OFFSET),
    }
}

fn run(cli: &Cli) -> horo_core::Result<Output> {
    let c = &cli.common;
    let l = c.l;
    match &cli.command {
        Command::Verify { lemma, trials, seed } => {
            let job = VerifyJob::parse(lemma, *trials, *seed)?;
            let start = Instant::now();
            let report = run_verify(&job)?;
            eprintln!("wall_time: {:.3} s", start.elapsed().as_secs_f64());
            Ok(Output {
                text: report.to_json() + "\n",
                passed: report.passed(),
            })
        }
        Command::Ball => {
            let spec = load_spec(c)?;
            let ball = enumerate_ball(&spec, l)?;
            Ok(Output::ok(ball_csv(&spec, &ball)))
        }
        Command::Spectrum { threshold, depth } => {
            let spec = load_spec(c)?;
            let ball = enumerate_ball(&spec, l)?;
            let spectrum = length_spectrum_of(&ball, l);
            let report = non_arithmeticity_report_with_depth(&spectrum.vectors, *threshold, *depth)?;
            Ok(Output::ok(pretty(&json!({ "spectrum": spectrum, "non_arithmeticity": report }))?))
        }
        Command::Cone => {
            let spec = load_spec(c)?;
            let ball = enumerate_ball(&spec, l)?;
            let header: Vec<String> = (1..=spec.r()).map(|i| format!("x{i}")).collect();
            let mut out = header.join(",") + "\n";
            for v in limit_cone_of(&ball, l) {
                let row: Vec<String> = v.0.iter().map(|x| format!("{x:.12e}")).collect();
                out.push_str(&(row.join(",") + "\n"));
            }
            Ok(Output::ok(out))
        }
        Command::Transverse { tol } => {
            let spec = load_spec(c)?;
            if l < 2 {
                return Err(Error::InvalidParameter("transversality check needs L ≥ 2".into()));
            }
            let report = transversality_of(&spec, &enumerate_ball(&spec, l)?, l, *tol);
            Ok(Output {
                text: pretty(&report)?,
                passed: report.passed(),
            })
        }
        Command::Delta => {
            let spec = load_spec(c)?;
            let psi = load_psi(c, spec.r())?;
            let ball = enumerate_ball(&spec, l)?;
            Ok(Output::ok(pretty(&critical_exponent_of(&ball, &psi, l)?)?))
        }
        Command::Density { s } => {
            let spec = load_spec(c)?;
            let psi = load_psi(c, spec.r())?;
            let ball = enumerate_ball(&spec, l)?;
            let s = exponent(&ball, &psi, l, *s)?;
            if !(s > 0.0) || l < 2 {
                return Err(Error::InvalidParameter("density needs s > 0 and L ≥ 2".into()));
            }
            Ok(Output::ok(ps_density_of(&spec, &ball, &psi, s, l).to_json() + "\n"))
        }
        Command::Residual { generator, s, cells } => {
            let spec = load_spec(c)?;
            let psi = load_psi(c, spec.r())?;
            let word = spec.parse_word(generator)?;
            let ball = enumerate_ball(&spec, l)?;
            let s = exponent(&ball, &psi, l, *s)?;
            if !(s > 0.0) || l < 2 {
                return Err(Error::InvalidParameter("density needs s > 0 and L ≥ 2".into()));
            }
            let nu = ps_density_of(&spec, &ball, &psi, s, l);
            let report = conformality_residual_of(&spec, &nu, &GroupElement::new(&spec, word), *cells)?;
            eprintln!("residual: {:.6e} over {} cells", report.residual, report.cells_used);
            Ok(Output::ok(report.to_csv()))
        }
        Command::BrCheck => {
            let spec = load_spec(c)?;
            let psi = load_psi(c, spec.r())?;
            let ball = enumerate_ball(&spec, l)?;
            let delta = critical_exponent_of(&ball, &psi, l)?.delta;
            let nu = ps_density_of(&spec, &ball, &psi, delta + DEFAULT_S_OFFSET, l);
            let record = quasi_invariance(&spec, &nu, &psi, delta)?;
            Ok(Output {
                passed: record.relative_error < QUASI_INVARIANCE_TOL,
                text: pretty(&record)?,
            })
        }
        Command::Essential { phi, a, eps } => {
            let spec = load_spec(c)?;
            let psi = load_psi(c, spec.r())?;
            let phi = GroupElement::new(&spec, spec.parse_word(phi)?);
            let target = match a {
                Some(text) => parse_vector(text)?,
                None => jordan_of(&phi.matrix)?,
            };
            let ball = enumerate_ball(&spec, l)?;
            let delta = critical_exponent_of(&ball, &psi, l)?.delta;
            let nu = ps_density_of(&spec, &ball, &psi, delta + DEFAULT_S_OFFSET, l);
            // E = every other support cell
            let grid = CellGrid::new(DEFAULT_CELLS, spec.r())?;
            let mut ids: Vec<usize> = nu.atoms.iter().map(|at| grid.flat_id(&grid.cell_of(&at.xi))).collect();
            ids.sort_unstable();
            ids.dedup();
            let cells: Vec<BoundaryCell> = ids
                .iter()
                .step_by(2)
                .map(|&id| BoundaryCell::from_grid(&grid, &grid.unflatten(id)))
                .collect();
            match essential_witness_in(&spec, &nu, &cells, &phi, &target, *eps, ball.upto(l)) {
                Ok(w) => Ok(Output::ok(pretty(&json!({
                    "element": spec.format_word(&w.element.word),
                    "atom": w.atom,
                    "xi_angles": nu.atoms[w.atom].xi.0.iter().map(|p| p.cayley_angle()).collect::<Vec<_>>(),
                    "busemann": w.busemann,
                    "target": target,
                    "deviation": w.deviation,
                }))?)),
                Err(Error::NoWitnessInBall) => Ok(Output {
                    text: pretty(&json!({ "element": null, "target": target, "eps": eps }))?,
                    passed: false,
                }),
                Err(e) => Err(e),
            }
        }
        Command::Pipeline => {
            let out = c
                .out
                .as_deref()
                .ok_or_else(|| Error::InvalidParameter("pipeline needs --out <dir>".into()))?;
            let spec = load_spec(c)?;
            let psi = load_psi(c, spec.r())?;
            let summary = run_pipeline_for(&spec, &psi, l, out)?;
            Ok(Output::ok(pretty(&summary)?))
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> std::io::Result<()> {
    match out {
        Some(p) => fs::write(p, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.common.workers {
        if let Err(e) = rayon_pool(n) {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    }
    match run(&cli) {
        Ok(output) => {
            // the pipeline writes into --out itself; its summary goes to stdout
            let target = match cli.command {
                Command::Pipeline => None,
                _ => cli.common.out.as_deref(),
            };
            if let Err(e) = emit(&output.text, target) {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_INPUT);
            }
            if output.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAILED)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn rayon_pool(n: usize) -> Result<(), String> {
    if n == 0 {
        return Err("--workers must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}
