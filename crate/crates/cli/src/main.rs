//! Command-line front end for polyhedral currents.
//!
//! Exit codes: 0 on success, 1 when the input is rejected, 2 when a verification check
//! or optimality certificate fails.

use std::fs;
use std::io::Write;
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use polycurrents::approximation::{convergence_csv, convergence_report, Mode};
use polycurrents::curves::{spiral_csv, spiral_suite, theta_distance};
use polycurrents::decomposition::{
    decompose, extract_cycles, to_arcs, verify_decomposition, VerifyOptions,
};
use polycurrents::flat_norm::flat_norm_0_with_cost;
use polycurrents::io::{
    edge_list, from_json, to_json, CurrentDoc, CurvesDoc, DecompositionDoc, FlatNormDoc, GridDoc,
    MeasureDoc, SpaceDoc, TransportSolutionDoc,
};
use polycurrents::transport::beckmann_with_chords;
use polycurrents::{Path, Tolerance};

#[derive(Parser, Debug)]
#[command(
    name = "polycurrents",
    version,
    about = "Polyhedral one-dimensional currents"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct Common {
    /// Relative tolerance for checks and certificates.
    #[arg(long, global = true, env = "POLYCURRENTS_TOL", default_value_t = 1e-9)]
    tol: f64,
    /// Seed for every randomized check.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Split a current into cycles and arcs and verify the decomposition.
    Decompose {
        /// Current document.
        #[arg(long)]
        input: PathBuf,
        /// Output JSON (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve Wasserstein-1 transport and build the optimal current.
    Transport {
        #[arg(long)]
        plus: PathBuf,
        #[arg(long)]
        minus: PathBuf,
        #[arg(long)]
        space: PathBuf,
        /// Pieces per straight chord in the emitted transport.
        #[arg(long, default_value_t = 1)]
        chords: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convergence table for the polyhedral approximation of a grid current.
    Approx {
        #[arg(long)]
        grid: PathBuf,
        /// Levels, e.g. `1..6` or `1,2,4`.
        #[arg(long, default_value = "1..6", value_parser = parse_levels)]
        levels: Levels,
        #[arg(long, default_value = "directional", value_parser = parse_mode)]
        mode: Mode,
        /// Output CSV (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spiral transports converging to a cycle.
    Spiral {
        #[arg(long, default_value = "1,2,4,8,16,32", value_parser = parse_levels)]
        levels: Levels,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Discrete Fréchet distance between two curves.
    Frechet {
        /// Curves document with exactly two curves.
        #[arg(long)]
        input: PathBuf,
        /// Densification in points per unit length.
        #[arg(long, default_value_t = 64.0)]
        densify: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Flat norm of a signed atomic measure.
    Flatnorm {
        /// Measure document.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        space: PathBuf,
        /// Cost per unit of unfilled mass.
        #[arg(long, default_value_t = 1.0)]
        creation_cost: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Levels(Vec<u32>);

fn parse_levels(s: &str) -> Result<Levels, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let num = |t: &str| {
            t.trim()
                .parse::<u32>()
                .map_err(|e| format!("bad level {t:?}: {e}"))
        };
        if let Some((a, b)) = part.split_once("..") {
            let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
            if a > b {
                return Err(format!("empty level range {part:?}"));
            }
            out.extend(a..=b);
        } else {
            out.push(num(part)?);
        }
    }
    if out.is_empty() {
        return Err("no levels given".into());
    }
    if out.contains(&0) {
        return Err("levels start at 1".into());
    }
    Ok(Levels(out))
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: polycurrents::Error| e.to_string())
}

enum Status {
    Ok,
    CheckFailed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::CheckFailed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<Status> {
    let common = cli.common;
    if !common.tol.is_finite() || common.tol <= 0.0 {
        bail!("tolerance must be finite and positive, got {}", common.tol);
    }
    let tol = Tolerance::default().with_rel(common.tol);
    match cli.command {
        Command::Decompose { input, out } => {
            let t = read_doc::<CurrentDoc>(&input, "current")?.to_current()?;
            let split = extract_cycles(&t);
            let eta = decompose(&split.acyclic)?;
            let arcs = to_arcs(&eta, t.space())?;
            let opts = VerifyOptions {
                tol,
                seed: common.seed,
                ..VerifyOptions::default()
            };
            let report = verify_decomposition(&split.acyclic, &arcs.arcs, &opts)?;
            let doc = DecompositionDoc::new(&split, &arcs, &report);
            for c in report.failed() {
                eprintln!(
                    "check {} failed: residual {:e} > {:e}",
                    c.name, c.residual, c.bound
                );
            }
            emit(out.as_deref(), &to_json(&doc))?;
            Ok(if doc.passed {
                Status::Ok
            } else {
                Status::CheckFailed
            })
        }
        Command::Transport {
            plus,
            minus,
            space,
            chords,
            out,
        } => {
            let space = read_doc::<SpaceDoc>(&space, "space")?.to_space()?;
            let plus = read_doc::<MeasureDoc>(&plus, "plus measure")?.to_measure(&space)?;
            let minus = read_doc::<MeasureDoc>(&minus, "minus measure")?.to_measure(&space)?;
            let sol = beckmann_with_chords(&plus, &minus, &space, chords)?;
            let passed = sol.certificate.passed(tol, sol.kantorovich.w1);
            if !passed {
                eprintln!("certificate failed: {:?}", sol.certificate);
            }
            emit(
                out.as_deref(),
                &to_json(&TransportSolutionDoc::new(&sol, passed)),
            )?;
            Ok(if passed {
                Status::Ok
            } else {
                Status::CheckFailed
            })
        }
        Command::Approx {
            grid,
            levels,
            mode,
            out,
        } => {
            let g = read_doc::<GridDoc>(&grid, "grid")?.to_grid()?;
            let rows = convergence_report(&g, &levels.0, mode)?;
            emit(out.as_deref(), &convergence_csv(&rows))?;
            Ok(Status::Ok)
        }
        Command::Spiral { levels, out } => {
            let levels: Vec<usize> = levels.0.iter().map(|&l| l as usize).collect();
            emit(out.as_deref(), &spiral_csv(&spiral_suite(&levels)?))?;
            Ok(Status::Ok)
        }
        Command::Frechet {
            input,
            densify,
            out,
        } => {
            let doc = read_doc::<CurvesDoc>(&input, "curves")?;
            if doc.curves.len() != 2 {
                bail!(
                    "curves document must hold exactly two curves, found {}",
                    doc.curves.len()
                );
            }
            let space = doc.space.to_space()?;
            let embedded = space.as_embedded()?;
            let a = Path::new(doc.curves[0].clone())?;
            let b = Path::new(doc.curves[1].clone())?;
            let distance = theta_distance(&a, &b, embedded, densify)?;
            emit(out.as_deref(), &to_json(&FrechetDoc { distance, densify }))?;
            Ok(Status::Ok)
        }
        Command::Flatnorm {
            input,
            space,
            creation_cost,
            out,
        } => {
            let space = std::sync::Arc::new(read_doc::<SpaceDoc>(&space, "space")?.to_space()?);
            let mu = read_doc::<MeasureDoc>(&input, "measure")?.to_measure(&space)?;
            let f = flat_norm_0_with_cost(&mu, &space, creation_cost)?;
            let doc = FlatNormDoc {
                value: f.value,
                residue: MeasureDoc::from_measure(&f.residue),
                filling: edge_list(&f.filling),
            };
            emit(out.as_deref(), &to_json(&doc))?;
            Ok(Status::Ok)
        }
    }
}

#[derive(Serialize)]
struct FrechetDoc {
    distance: f64,
    densify: f64,
}

fn read_doc<T: serde::de::DeserializeOwned>(path: &FsPath, what: &str) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(from_json(&text, &format!("{what} {}", path.display()))?)
}

/// Writes to `out` through a temporary file in the same directory, so a failed run never
/// leaves a partial file behind. Without `out` the text goes to stdout.
fn emit(out: Option<&FsPath>, text: &str) -> anyhow::Result<()> {
    let Some(path) = out else {
        std::io::stdout().write_all(text.as_bytes())?;
        return Ok(());
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => FsPath::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating a temporary file in {}", dir.display()))?;
    tmp.write_all(text.as_bytes())?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
