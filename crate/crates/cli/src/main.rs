use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;
use tt_core::diagram::{self, Diagram};
use tt_core::equations::EquationSystem;
use tt_core::fal;
use tt_core::io;
use tt_core::report::Pipeline;
use tt_core::solver::{self, SolverConfig};
use tt_core::{Error, C64};

#[derive(Parser)]
#[command(name = "tt", version, about = "Hyperbolic structures from crossing and edge labels")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct MeridianArgs {
    /// Meridian override for a cusp, as `p:q` or a space separated edge word (`e~` reverses e).
    #[arg(long = "meridian", value_name = "CUSP=WORD")]
    meridians: Vec<String>,
}

#[derive(Args, Clone)]
struct SolverArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Residual tolerance for accepting a root.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 1e-6)]
    dedupe_tol: f64,
    #[arg(long, default_value_t = 2000)]
    max_starts: usize,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            rng_seed: self.seed,
            residual_tol: self.tol,
            dedupe_tol: self.dedupe_tol,
            max_starts: self.max_starts,
            ..SolverConfig::default()
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the polynomial system of a diagram.
    Build {
        diagram: PathBuf,
        #[command(flatten)]
        meridians: MeridianArgs,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Enumerate roots of a system.
    Solve {
        system: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Gluing, orientation and cusp report for every root.
    Classify {
        solutions: PathBuf,
        #[arg(long)]
        diagram: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[command(flatten)]
        meridians: MeridianArgs,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Circle packing of a root of a fully augmented link.
    Pack {
        solutions: PathBuf,
        #[arg(long)]
        diagram: PathBuf,
        /// Root to pack; by default the one passing the label criteria.
        #[arg(long)]
        solution: Option<usize>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[command(flatten)]
        meridians: MeridianArgs,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Cusp shapes of every root.
    Cusp {
        solutions: PathBuf,
        #[arg(long)]
        diagram: PathBuf,
        #[command(flatten)]
        meridians: MeridianArgs,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Build, solve, classify and (for fully augmented links) pack.
    RunAll {
        diagram: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, default_value_t = 1e-8)]
        classify_tol: f64,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[command(flatten)]
        meridians: MeridianArgs,
        /// Output directory.
        #[arg(short = 'o', default_value = "tt-out")]
        output: PathBuf,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("cannot write {}", path.display()))?;
    info!("wrote {}", path.display());
    Ok(())
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => write_atomic(p, text),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn pipeline(path: &Path, m: &MeridianArgs) -> Result<Pipeline> {
    let mut parsed = diagram::parse_str(&read(path)?)?;
    for spec in &m.meridians {
        let Some((cusp, word)) = spec.split_once('=') else {
            return Err(Error::Validation { at: "--meridian".into(), msg: format!("expected CUSP=WORD, got {spec}") }.into());
        };
        parsed.meridians.insert(cusp.trim().into(), word.trim().into());
    }
    Ok(Pipeline::new(parsed)?)
}

fn load_roots(p: &Pipeline, solutions: &Path) -> Result<Vec<Vec<C64>>> {
    let recs = io::solutions_from_json(&read(solutions)?)?;
    Ok(io::records_to_roots(&p.system, &recs)?)
}

fn solve(sys: &EquationSystem, cfg: &SolverConfig) -> Result<(String, usize)> {
    let set = solver::solve_all(sys, cfg)?;
    let n = set.solutions.len();
    info!(
        "{} roots ({} nondegenerate) from {} starts",
        n,
        set.nondegenerate().count(),
        set.stats.starts_used
    );
    let text = io::to_json(&io::solutions_to_records(sys, &set))?;
    Ok((text, n))
}

fn no_roots(sys: &EquationSystem) -> anyhow::Error {
    Error::NoConvergence(format!("no root of {} found", sys.name)).into()
}

fn pack(p: &Pipeline, roots: &[Vec<C64>], which: Option<usize>, tol: f64) -> Result<(usize, io::PackingRecord, String)> {
    let Diagram::Fal(d) = &p.parsed.diagram else {
        return Err(Error::Validation { at: "diagram".into(), msg: "packings exist for fully augmented links only".into() }.into());
    };
    let k = match which {
        Some(k) if k < roots.len() => k,
        Some(k) => bail!(Error::Validation { at: "--solution".into(), msg: format!("no root {k}") }),
        None => roots
            .iter()
            .position(|x| {
                !solver::is_degenerate(&p.system, x) && fal::is_geometric_fal(&p.complex, d, x, tol).is_ok_and(|v| v.geometric)
            })
            .ok_or_else(|| Error::Validation { at: "solutions".into(), msg: "no root passes the label criteria".into() })?,
    };
    let pf = fal::solution_to_packing(&p.complex, &roots[k])?;
    let univ = fal::check_univalence(&pf.packing, tol);
    let svg = io::packing_svg(&pf.packing);
    Ok((k, io::packing_record(&p.parsed.name, k, &pf, univ), svg))
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Build { diagram, meridians, output } => {
            let p = pipeline(&diagram, &meridians)?;
            emit(output.as_deref(), &io::system_to_json(&p.system)?)
        }
        Cmd::Solve { system, solver: s, output } => {
            let sys = io::system_from_json(&read(&system)?)?;
            let (text, n) = solve(&sys, &s.config())?;
            emit(output.as_deref(), &text)?;
            if n == 0 {
                return Err(no_roots(&sys));
            }
            Ok(())
        }
        Cmd::Classify { solutions, diagram, tol, meridians, output } => {
            let p = pipeline(&diagram, &meridians)?;
            let roots = load_roots(&p, &solutions)?;
            emit(output.as_deref(), &io::to_json(&p.classify(&roots, tol))?)
        }
        Cmd::Pack { solutions, diagram, solution, tol, svg, meridians, output } => {
            let p = pipeline(&diagram, &meridians)?;
            let roots = load_roots(&p, &solutions)?;
            let (_, rec, picture) = pack(&p, &roots, solution, tol)?;
            if let Some(svg) = svg {
                write_atomic(&svg, &picture)?;
            }
            emit(output.as_deref(), &io::to_json(&rec)?)
        }
        Cmd::Cusp { solutions, diagram, meridians, output } => {
            let p = pipeline(&diagram, &meridians)?;
            let roots = load_roots(&p, &solutions)?;
            let shapes: Vec<BTreeMap<String, C64>> = roots
                .iter()
                .map(|x| p.system.cusps.iter().enumerate().map(|(t, c)| (c.id.clone(), p.system.cusp_shape(x, t))).collect())
                .collect();
            emit(output.as_deref(), &io::to_json(&shapes)?)
        }
        Cmd::RunAll { diagram, solver: s, classify_tol, svg, meridians, output } => {
            let p = pipeline(&diagram, &meridians)?;
            let dir = output;
            write_atomic(&dir.join("system.json"), &io::system_to_json(&p.system)?)?;
            let set = solver::solve_all(&p.system, &s.config())?;
            write_atomic(&dir.join("solutions.json"), &io::to_json(&io::solutions_to_records(&p.system, &set))?)?;
            if set.solutions.is_empty() {
                return Err(no_roots(&p.system));
            }
            let roots: Vec<Vec<C64>> = set.solutions.iter().map(|r| r.x.clone()).collect();
            let report = p.classify(&roots, classify_tol);
            write_atomic(&dir.join("report.json"), &io::to_json(&report)?)?;
            println!(
                "{}: {} roots, {} nondegenerate, geometric {:?}",
                p.parsed.name,
                roots.len(),
                set.nondegenerate().count(),
                report.geometric
            );
            if p.is_fal() && !report.geometric.is_empty() {
                let (k, rec, picture) = pack(&p, &roots, Some(report.geometric[0]), classify_tol)?;
                write_atomic(&dir.join("packing.json"), &io::to_json(&rec)?)?;
                write_atomic(&svg.unwrap_or_else(|| dir.join("packing.svg")), &picture)?;
                println!("packing of root {k}: {}", rec.verdict);
            }
            Ok(())
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(te) = cause.downcast_ref::<Error>() {
            return match te {
                Error::NoConvergence(_) => 3,
                Error::Degenerate(_) => 1,
                _ => 2,
            };
        }
    }
    2
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("TT_LOG", "warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tt: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
