//! `tpls`: generate instances, run and sweep schemes, fuzz for soundness.
//!
//! Exit codes: 0 accept or sound, 1 reject or counterexample, 2 error or refusal.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tpls::catalog::{self, SchemeParams};
use tpls::distance::diameter::diameter_labels;
use tpls::engine::{self, certificates_from_json, certificates_to_json, exhaustive_soundness, fuzz_soundness};
use tpls::graph::{self, build_gadget, Instance};
use tpls::marks::with_marked_edges;
use tpls::spanning::ghs::kruskal;
use tpls::toy::root_distance_labels;
use tpls::{LabeledGraph, PlsError, Scheme};

#[derive(Parser)]
#[command(name = "tpls", version, about = "Radius-t proof-labeling schemes")]
struct Cli {
    /// Worker threads for verification.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance file.
    Gen(GenArgs),
    /// Verify an instance, proving first when no certificates are given.
    Run(RunArgs),
    /// Honest certificate sizes over several radii, as CSV rows.
    Sweep(SweepArgs),
    /// Search for certificates that a no-instance wrongly accepts.
    Fuzz(FuzzArgs),
}

#[derive(Args, Clone)]
struct SchemeArgs {
    /// Scheme name, e.g. st, mst, diameter, spanner, tree-scale:root-distance.
    scheme: String,
    #[arg(long, default_value_t = 1)]
    t: usize,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Label width of the demo bases.
    #[arg(long, default_value_t = 8)]
    k: usize,
}

impl SchemeArgs {
    fn params(&self, t: usize) -> SchemeParams {
        SchemeParams { t, k: self.k, alpha: self.alpha, beta: self.beta, seed: self.seed }
    }

    fn build(&self) -> tpls::Result<Box<dyn Scheme>> {
        catalog::build(&self.scheme, &self.params(self.t))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Path,
    Cycle,
    Grid,
    Star,
    Complete,
    RandomTree,
    RandomConnected,
    Gadget,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Weights {
    None,
    RandomDistinct,
}

#[derive(Clone, Copy, ValueEnum)]
enum Labels {
    None,
    /// Mark an arbitrary spanning tree.
    Tree,
    /// Mark every edge.
    All,
    /// Mark the minimum spanning tree (needs weights).
    Mst,
    /// The diameter bound `--x`, or the true diameter.
    Diameter,
    /// `--k`-bit hop distances from the smallest identity.
    RootDistance,
}

#[derive(Args)]
struct GenArgs {
    kind: Kind,
    /// Sizes: n for most kinds, cols rows for grid, n m for random-connected.
    params: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Weights::None)]
    weights: Weights,
    /// Replace identities 0..n by random distinct identities.
    #[arg(long)]
    random_ids: bool,
    #[arg(long, value_enum, default_value_t = Labels::None)]
    labels: Labels,
    #[arg(long)]
    x: Option<u64>,
    #[arg(long, default_value_t = 8)]
    k: usize,
    #[arg(long = "P", default_value_t = 1)]
    p: usize,
    #[arg(long, default_value_t = 1)]
    t: usize,
    #[arg(long)]
    sa: Option<String>,
    #[arg(long)]
    sb: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    scheme: SchemeArgs,
    instance: PathBuf,
    /// Certificate file; omit to run the prover.
    #[arg(long)]
    certs: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the certificates used to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    scheme: SchemeArgs,
    instance: PathBuf,
    /// Radii to measure.
    #[arg(long = "ts", value_delimiter = ',', required = true)]
    ts: Vec<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FuzzArgs {
    #[command(flatten)]
    scheme: SchemeArgs,
    instance: PathBuf,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long = "max-bits", default_value_t = 16)]
    max_bits: usize,
    /// Enumerate every assignment instead of sampling.
    #[arg(long)]
    exhaustive: bool,
    #[arg(long, default_value_t = engine::EXHAUSTIVE_BUDGET)]
    budget: u128,
    /// Where a counterexample is written.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure with its exit code.
struct Exit(u8, String);

impl From<PlsError> for Exit {
    fn from(e: PlsError) -> Self {
        Exit(2, e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Exit> {
    fs::read_to_string(path).map_err(|e| Exit(2, format!("{}: {e}", path.display())))
}

fn write(path: Option<&Path>, text: &str) -> Result<(), Exit> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Exit(2, format!("{}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn load(path: &Path) -> Result<LabeledGraph, Exit> {
    Instance::parse(&read(path)?).map_err(|e| Exit(2, format!("{}: {e}", path.display())))
}

fn bits(s: &str) -> Result<Vec<bool>, Exit> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Exit(2, format!("input string {s:?} is not binary"))),
        })
        .collect()
}

fn generate(a: &GenArgs) -> Result<ExitCode, Exit> {
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let arity = |want: usize| -> Result<&[usize], Exit> {
        if a.params.len() == want {
            Ok(&a.params)
        } else {
            Err(Exit(2, format!("expected {want} size parameters, got {}", a.params.len())))
        }
    };
    let at_least = |n: usize, min: usize| if n >= min { Ok(n) } else { Err(Exit(2, format!("size {n} is below {min}"))) };
    let mut g = match a.kind {
        Kind::Path => graph::path(at_least(arity(1)?[0], 1)?),
        Kind::Cycle => graph::cycle(at_least(arity(1)?[0], 3)?),
        Kind::Grid => {
            let p = arity(2)?;
            graph::grid(at_least(p[0], 1)?, at_least(p[1], 1)?)
        }
        Kind::Star => graph::star(at_least(arity(1)?[0], 1)?),
        Kind::Complete => graph::complete(at_least(arity(1)?[0], 1)?),
        Kind::RandomTree => graph::random_tree(at_least(arity(1)?[0], 1)?, &mut rng),
        Kind::RandomConnected => {
            let p = arity(2)?;
            graph::random_with_edges(p[0], p[1], &mut rng)?
        }
        Kind::Gadget => {
            arity(0)?;
            let (Some(sa), Some(sb)) = (&a.sa, &a.sb) else {
                return Err(Exit(2, "a gadget needs --sa and --sb".into()));
            };
            let (sa, sb) = (bits(sa)?, bits(sb)?);
            if sa.len() != a.k || sb.len() != a.k {
                return Err(Exit(2, format!("--sa and --sb must have --k = {} bits", a.k)));
            }
            build_gadget(&sa, &sb, a.p, a.t)?.graph
        }
    };
    if a.random_ids {
        g = g.with_random_ids(&mut rng);
    }
    if a.weights == Weights::RandomDistinct {
        g = g.with_random_distinct_weights(&mut rng);
    }
    g = match a.labels {
        Labels::None => g,
        Labels::Tree => {
            let tree = kruskal(&g.clone().with_weights(None)?);
            with_marked_edges(&g, &tree)?
        }
        Labels::All => {
            let edges = g.edges().to_vec();
            with_marked_edges(&g, &edges)?
        }
        Labels::Mst => {
            if !g.is_weighted() {
                return Err(Exit(2, "--labels mst needs --weights random-distinct".into()));
            }
            let tree = kruskal(&g);
            with_marked_edges(&g, &tree)?
        }
        Labels::Diameter => {
            let x = a.x.unwrap_or_else(|| g.diameter());
            diameter_labels(&g, x)?
        }
        Labels::RootDistance => root_distance_labels(&g, a.k)?,
    };
    let json = Instance::to_json(&g);
    let summary = format!("n={} m={} diameter={}", g.n(), g.m(), g.diameter());
    match &a.out {
        Some(p) => {
            write(Some(p), &json)?;
            println!("{summary}");
        }
        None => {
            println!("{json}");
            eprintln!("{summary}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn csv_row(t: usize, max_bits: usize, mean_bits: f64, accepted: bool) -> String {
    format!("{t},{max_bits},{mean_bits:.3},{}", if accepted { "accept" } else { "reject" })
}

fn run(a: &RunArgs, threads: Option<usize>) -> Result<ExitCode, Exit> {
    let scheme = a.scheme.build()?;
    let g = load(&a.instance)?;
    let certs = match &a.certs {
        Some(p) => certificates_from_json(&read(p)?)?,
        None => {
            if !scheme.holds(&g)? {
                return Err(Exit(2, format!("refused: {} does not hold on this instance", scheme.name())));
            }
            scheme.prove(&g)?
        }
    };
    if certs.len() != g.n() {
        return Err(Exit(2, format!("{} certificates for {} nodes", certs.len(), g.n())));
    }
    if let Some(p) = &a.out {
        write(Some(p), &certificates_to_json(&certs))?;
    }
    let v = engine::run(scheme.as_ref(), &g, &certs, threads)?;
    let text = match a.format {
        Format::Json => serde_json::json!({
            "scheme": scheme.name(),
            "t": scheme.radius(),
            "accepted": v.accepted,
            "rejecting": v.rejecting,
            "max_bits": v.size.max_bits,
            "mean_bits": v.size.mean_bits,
        })
        .to_string(),
        Format::Csv => format!(
            "t,max_bits,mean_bits,verdict\n{}",
            csv_row(scheme.radius(), v.size.max_bits, v.size.mean_bits, v.accepted)
        ),
    };
    println!("{text}");
    Ok(if v.accepted { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn sweep(a: &SweepArgs, threads: Option<usize>) -> Result<ExitCode, Exit> {
    let g = load(&a.instance)?;
    let mut rows = Vec::new();
    for &t in &a.ts {
        let scheme = catalog::build(&a.scheme.scheme, &a.scheme.params(t))?;
        let certs = scheme.prove(&g)?;
        let v = engine::run(scheme.as_ref(), &g, &certs, threads)?;
        rows.push(engine::ScalingRow { t, max_bits: v.size.max_bits, mean_bits: v.size.mean_bits, accepted: v.accepted });
    }
    let text = match a.format {
        Format::Csv => std::iter::once("t,max_bits,mean_bits,verdict".to_string())
            .chain(rows.iter().map(|r| csv_row(r.t, r.max_bits, r.mean_bits, r.accepted)))
            .collect::<Vec<_>>()
            .join("\n"),
        Format::Json => serde_json::to_string_pretty(&rows).expect("rows serialize"),
    };
    write(a.out.as_deref(), &text)?;
    Ok(if rows.iter().all(|r| r.accepted) { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn fuzz(a: &FuzzArgs) -> Result<ExitCode, Exit> {
    let scheme = a.scheme.build()?;
    let g = load(&a.instance)?;
    let found = if a.exhaustive {
        exhaustive_soundness(scheme.as_ref(), &g, a.max_bits, a.budget)?
    } else {
        fuzz_soundness(scheme.as_ref(), &g, a.trials, a.scheme.seed, a.max_bits)?.counterexample
    };
    match found {
        None => {
            let how = if a.exhaustive { "exhaustive search".to_string() } else { format!("{} trials", a.trials) };
            println!("sound: no accepting certificates found ({how})");
            Ok(ExitCode::SUCCESS)
        }
        Some(certs) => {
            eprintln!("counterexample: {} accepts a no-instance", scheme.name());
            write(a.out.as_deref(), &certificates_to_json(&certs))?;
            Ok(ExitCode::from(1))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = cli.threads {
        // sizes the global pool used by the fuzzers
        std::env::set_var("RAYON_NUM_THREADS", k.max(1).to_string());
    }
    let result = match &cli.cmd {
        Command::Gen(a) => generate(a),
        Command::Run(a) => run(a, cli.threads),
        Command::Sweep(a) => sweep(a, cli.threads),
        Command::Fuzz(a) => fuzz(a),
    };
    match result {
        Ok(code) => code,
        Err(Exit(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
