//! Thin command-line front end; every subcommand delegates to the library.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use capmod::capacity::{brute_force_capacity, capacity};
use capmod::l0cap::{CapClass, CapContext};
use capmod::quasi::{dqu, qcr, DquMethod};
use capmod::report::Report;
use capmod::sobolev::{MClass, VertexFunction};
use capmod::space::{grid_1d, grid_2d, Space};
use capmod::study::{
    scenario_capae_vs_dcap, scenario_dominated_convergence_failure, study_refine_1d,
    study_refine_2d,
};
use capmod::suite::{module_verify, run_suite};

#[derive(Parser)]
#[command(name = "capmod", version, about = "Capacity calculus on finite weighted graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Report output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for randomized operations.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a space file or generate a grid space.
    Space(SpaceArgs),
    /// Capacity of a vertex set with its equilibrium potential.
    Cap(CapArgs),
    /// The distance d_Cap between two functions (or a batch directory).
    Dcap(DcapArgs),
    /// The quasi-uniform distance d_QU between two functions.
    Dqu(DquArgs),
    /// Canonical quasi-continuous representative of an m-class.
    Qcr(QcrArgs),
    /// Module-level verification on a given space.
    Module(ModuleArgs),
    /// Refinement studies and counterexample scenarios.
    Study(StudyArgs),
    /// Seeded verification suites.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SpaceArgs {
    /// Validate this space JSON file and echo the normalized form.
    #[arg(long)]
    space: Option<PathBuf>,
    /// Generate a 1-d grid: LO HI N.
    #[arg(long, num_args = 3, value_names = ["LO", "HI", "N"])]
    grid1d: Option<Vec<String>>,
    /// Generate a 2-d grid: LO HI N.
    #[arg(long, num_args = 3, value_names = ["LO", "HI", "N"])]
    grid2d: Option<Vec<String>>,
    /// Write the space JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CapArgs {
    #[arg(long)]
    space: PathBuf,
    /// Comma-separated vertex ids.
    #[arg(long)]
    set: String,
    /// Cross-check against the projected-gradient oracle.
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct DcapArgs {
    #[arg(long)]
    space: PathBuf,
    #[arg(long)]
    f: Option<PathBuf>,
    #[arg(long)]
    g: Option<PathBuf>,
    /// Directory of function JSON files; emits CSV over all pairs.
    #[arg(long)]
    batch: Option<PathBuf>,
}

#[derive(Args)]
struct DquArgs {
    #[arg(long)]
    space: PathBuf,
    #[arg(long)]
    f: PathBuf,
    #[arg(long)]
    g: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Exact)]
    method: Method,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Exact,
    Brute,
    Upper,
}

#[derive(Args)]
struct QcrArgs {
    #[arg(long)]
    space: PathBuf,
    /// m-class JSON (values at positive-mass vertices).
    #[arg(long)]
    class: PathBuf,
}

#[derive(Args)]
struct ModuleArgs {
    #[command(subcommand)]
    action: ModuleAction,
}

#[derive(Subcommand)]
enum ModuleAction {
    Verify {
        #[arg(long)]
        space: PathBuf,
        #[arg(long, value_parser = ["axioms", "hilbert", "quotient", "factor"])]
        suite: String,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Args)]
struct StudyArgs {
    #[command(subcommand)]
    which: StudyKind,
}

#[derive(Subcommand)]
enum StudyKind {
    /// Point capacity under 1-d grid refinement.
    Refine1d {
        #[arg(long, default_value_t = 10.0)]
        l: f64,
        /// Comma-separated increasing grid sizes.
        #[arg(long, default_value = "251,501,1001,2001")]
        n: String,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Point capacity decay on 2-d grids.
    Refine2d {
        #[arg(long, default_value = "16,32,64")]
        n: String,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Translated singletons defeating dominated convergence.
    Domconv {
        #[arg(long, default_value_t = 1001)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Pointwise convergence without d_Cap convergence.
    Capae {
        #[arg(long, default_value_t = 1001)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_parser = ["axioms", "outer", "capacity", "metrics", "modules", "all"])]
    suite: String,
    #[arg(long)]
    report: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(pass) => {
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn load_space(path: &PathBuf) -> capmod::Result<Space> {
    Space::from_json(&std::fs::read_to_string(path)?)
}

fn emit_report(report: &Report, format: Format, path: Option<&PathBuf>) -> capmod::Result<bool> {
    let text = match format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    if let Some(base) = path {
        report.write(base)?;
        eprintln!(
            "report written to {} (runtime {:.2?})",
            base.display(),
            report.runtime
        );
    } else {
        print!("{text}");
        eprintln!("runtime {:.2?}", report.runtime);
    }
    Ok(report.pass)
}

fn run(cli: Cli) -> capmod::Result<bool> {
    match cli.command {
        Command::Space(args) => {
            let space = if let Some(path) = &args.space {
                load_space(path)?
            } else if let Some(spec) = &args.grid1d {
                let (lo, hi, n) = parse_grid(spec)?;
                grid_1d(lo, hi, n)?
            } else if let Some(spec) = &args.grid2d {
                let (lo, hi, n) = parse_grid(spec)?;
                grid_2d(lo, hi, n)?
            } else {
                return Err(capmod::Error::Precondition(
                    "pass --space FILE, --grid1d, or --grid2d".into(),
                ));
            };
            let text = space.to_json();
            match &args.out {
                Some(path) => std::fs::write(path, text)?,
                None => println!("{text}"),
            }
            eprintln!(
                "space ok: {} vertices, {} edges, total mass {}",
                space.len(),
                space.edges().len(),
                space.total_mass()
            );
            Ok(true)
        }
        Command::Cap(args) => {
            let space = load_space(&args.space)?;
            let ids: Vec<&str> = args.set.split(',').filter(|s| !s.is_empty()).collect();
            let e = space.subset_of_ids(&ids)?;
            let result = capacity(&space, &e)?;
            let mut out = BTreeMap::new();
            out.insert("value", json!(result.value));
            let potential: BTreeMap<&str, f64> = (0..space.len())
                .map(|i| (space.id(i), result.potential.values()[i]))
                .collect();
            out.insert("potential", json!(potential));
            out.insert("kkt_ok", json!(result.kkt_ok));
            if args.oracle {
                let oracle = brute_force_capacity(&space, &e, cli.seed)?;
                out.insert("oracle", json!(oracle));
                out.insert("oracle_gap", json!((result.value - oracle).abs()));
            }
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(true)
        }
        Command::Dcap(args) => {
            let space = Arc::new(load_space(&args.space)?);
            let ctx = CapContext::new(Arc::clone(&space));
            if let Some(dir) = &args.batch {
                let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
                    .filter_map(|e| e.ok().map(|e| e.path()))
                    .filter(|p| p.extension().is_some_and(|x| x == "json"))
                    .collect();
                files.sort();
                println!("f,g,dcap");
                for i in 0..files.len() {
                    for j in i + 1..files.len() {
                        let fi = CapClass::new(VertexFunction::from_json(
                            &space,
                            &std::fs::read_to_string(&files[i])?,
                        )?);
                        let fj = CapClass::new(VertexFunction::from_json(
                            &space,
                            &std::fs::read_to_string(&files[j])?,
                        )?);
                        println!(
                            "{},{},{}",
                            files[i].file_stem().unwrap().to_string_lossy(),
                            files[j].file_stem().unwrap().to_string_lossy(),
                            ctx.dcap(&fi, &fj)?
                        );
                    }
                }
                return Ok(true);
            }
            let (f, g) = match (&args.f, &args.g) {
                (Some(f), Some(g)) => (f, g),
                _ => {
                    return Err(capmod::Error::Precondition(
                        "pass --f and --g, or --batch DIR".into(),
                    ))
                }
            };
            let f = CapClass::new(VertexFunction::from_json(
                &space,
                &std::fs::read_to_string(f)?,
            )?);
            let g = CapClass::new(VertexFunction::from_json(
                &space,
                &std::fs::read_to_string(g)?,
            )?);
            println!("{}", ctx.dcap(&f, &g)?);
            Ok(true)
        }
        Command::Dqu(args) => {
            let space = Arc::new(load_space(&args.space)?);
            let ctx = CapContext::new(Arc::clone(&space));
            let f = CapClass::new(VertexFunction::from_json(
                &space,
                &std::fs::read_to_string(&args.f)?,
            )?);
            let g = CapClass::new(VertexFunction::from_json(
                &space,
                &std::fs::read_to_string(&args.g)?,
            )?);
            let method = match args.method {
                Method::Exact => DquMethod::ExactScan,
                Method::Brute => DquMethod::BruteForce,
                Method::Upper => DquMethod::UpperBound,
            };
            let result = dqu(&ctx, &f, &g, method)?;
            let mut out = BTreeMap::new();
            out.insert("value", json!(result.value));
            out.insert(
                "optimal_set",
                json!(result
                    .optimal_set
                    .iter()
                    .map(|i| space.id(i).to_string())
                    .collect::<Vec<_>>()),
            );
            out.insert("downgraded_to_upper_bound", json!(result.downgraded));
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(true)
        }
        Command::Qcr(args) => {
            let space = load_space(&args.space)?;
            let class = MClass::from_json(&space, &std::fs::read_to_string(&args.class)?)?;
            let rep = qcr(&space, &class);
            let values: BTreeMap<&str, f64> = (0..space.len())
                .map(|i| (space.id(i), rep.rep.values()[i]))
                .collect();
            let out = json!({"values": values, "canonical": true});
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(true)
        }
        Command::Module(args) => match args.action {
            ModuleAction::Verify {
                space,
                suite,
                trials,
                report,
            } => {
                let space = load_space(&space)?;
                let r = module_verify(&space, &suite, cli.seed, trials)?;
                emit_report(&r, cli.format, report.as_ref())
            }
        },
        Command::Study(args) => {
            let (report, path) = match args.which {
                StudyKind::Refine1d { l, n, report } => (study_refine_1d(l, &parse_ns(&n)?)?, report),
                StudyKind::Refine2d { n, report } => (study_refine_2d(&parse_ns(&n)?)?, report),
                StudyKind::Domconv { n, count, report } => {
                    (scenario_dominated_convergence_failure(n, count)?, report)
                }
                StudyKind::Capae { n, count, report } => (scenario_capae_vs_dcap(n, count)?, report),
            };
            emit_report(&report, cli.format, path.as_ref())
        }
        Command::Verify(args) => {
            let report = run_suite(&args.suite, cli.seed)?;
            emit_report(&report, cli.format, args.report.as_ref())
        }
    }
}

fn parse_grid(spec: &[String]) -> capmod::Result<(f64, f64, usize)> {
    let bad = |what: &str| capmod::Error::Precondition(format!("invalid grid {what}"));
    let lo = spec[0].parse().map_err(|_| bad("lo"))?;
    let hi = spec[1].parse().map_err(|_| bad("hi"))?;
    let n = spec[2].parse().map_err(|_| bad("n"))?;
    Ok((lo, hi, n))
}

fn parse_ns(text: &str) -> capmod::Result<Vec<usize>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| capmod::Error::Precondition(format!("invalid grid size `{s}`")))
        })
        .collect()
}
