use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use delgt::combinatorics::binomial;
use delgt::constructions::{SchemeAux, TestingScheme};
use delgt::distances::{adel_at_least, check_coverage, deletion_distance, lcs, CoverageBudget};
use delgt::verify::{is_deletion_disjunct, is_deletion_separable, is_disjunct, is_separable, PropertyReport};
use delgt::{BitMatrix, Error, DEFAULT_CAP};
use delgt_cli::{read_vector, run_trials, ExperimentConfig};

const EXIT_FAILS: u8 = 1;
const EXIT_ERROR: u8 = 2;
const EXIT_CAP: u8 = 3;

#[derive(Parser)]
#[command(name = "delgt", version, about = "Group testing under adversarial deletions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a testing scheme and write its matrix and metadata files.
    Construct(Settings),
    /// Run seeded plant/corrupt/decode trials and emit CSV.
    Trial(Settings),
    /// Brute-force check of a combinatorial property.
    Verify(VerifyArgs),
    /// Distances between two binary vectors (files or literal bits).
    Distances(DistanceArgs),
}

/// Every flag doubles as a config-file key of the same name.
#[derive(Args, Default)]
struct Settings {
    /// Flat key=value file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// repetition | bernoulli | padded-ks | saffron
    #[arg(long)]
    construction: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    delta: Option<usize>,
    #[arg(long = "scale-c")]
    scale_c: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Base matrix file for the repetition construction.
    #[arg(long)]
    base: Option<PathBuf>,
    #[arg(long = "rs-p")]
    rs_p: Option<u32>,
    #[arg(long = "rs-len")]
    rs_len: Option<usize>,
    #[arg(long = "rs-dim")]
    rs_dim: Option<usize>,
    #[arg(long = "embed-gap")]
    embed_gap: Option<u32>,
    #[arg(long = "target-p")]
    target_p: Option<u32>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long = "inner-distance")]
    inner_distance: Option<usize>,
    /// Existing scheme metadata file to use instead of constructing one.
    #[arg(long)]
    scheme: Option<PathBuf>,
    /// disjunct | repetition | bruteforce | coverage | singleton
    #[arg(long)]
    decoder: Option<String>,
    /// random | prefix | exhaustive
    #[arg(long)]
    adversary: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    /// Output stem (construct) or CSV path (trial; stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    cap: Option<u128>,
    /// Write 0 in the time_us column so reruns are byte-identical.
    #[arg(long = "no-timing")]
    no_timing: bool,
    /// Rebuild random schemes for every trial from the trial seed.
    #[arg(long = "resample-scheme")]
    resample_scheme: bool,
}

impl Settings {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut map = match &self.config {
            Some(p) => {
                let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                ExperimentConfig::parse_file(&text)?
            }
            None => BTreeMap::new(),
        };
        let mut set = |key: &str, v: Option<String>| {
            if let Some(v) = v {
                map.insert(key.to_string(), v);
            }
        };
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        set("construction", self.construction.clone());
        set("n", self.n.map(|v| v.to_string()));
        set("k", self.k.map(|v| v.to_string()));
        set("delta", self.delta.map(|v| v.to_string()));
        set("scale-c", self.scale_c.map(|v| v.to_string()));
        set("alpha", self.alpha.map(|v| v.to_string()));
        set("seed", self.seed.map(|v| v.to_string()));
        set("base", path(&self.base));
        set("rs-p", self.rs_p.map(|v| v.to_string()));
        set("rs-len", self.rs_len.map(|v| v.to_string()));
        set("rs-dim", self.rs_dim.map(|v| v.to_string()));
        set("embed-gap", self.embed_gap.map(|v| v.to_string()));
        set("target-p", self.target_p.map(|v| v.to_string()));
        set("d", self.d.map(|v| v.to_string()));
        set("inner-distance", self.inner_distance.map(|v| v.to_string()));
        set("scheme", path(&self.scheme));
        set("decoder", self.decoder.clone());
        set("adversary", self.adversary.clone());
        set("trials", self.trials.map(|v| v.to_string()));
        set("out", path(&self.out));
        set("cap", self.cap.map(|v| v.to_string()));
        set("timing", self.no_timing.then(|| "false".to_string()));
        set("resample-scheme", self.resample_scheme.then(|| "true".to_string()));
        ExperimentConfig::from_map(&map)
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// Scheme metadata file, or a plain matrix file.
    #[arg(long)]
    scheme: PathBuf,
    /// disjunct | separable | del-separable | del-disjunct
    #[arg(long)]
    property: String,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    delta: usize,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: u128,
}

#[derive(Args)]
struct DistanceArgs {
    #[arg(long)]
    x: String,
    #[arg(long)]
    y: String,
    /// Also run the coverage check of `x` against `y` with this budget.
    #[arg(long)]
    budget: Option<usize>,
    /// Cap on deletion sets tried per step of the asymmetric distance.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: u128,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Construct(s) => s.resolve().and_then(|c| construct(&c)).map(|_| 0),
        Command::Trial(s) => s.resolve().and_then(|c| trial(&c)).map(|_| 0),
        Command::Verify(v) => verify(&v),
        Command::Distances(d) => distances(&d).map(|_| 0),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let cap = matches!(e.downcast_ref::<Error>(), Some(Error::Infeasible { .. }));
            ExitCode::from(if cap { EXIT_CAP } else { EXIT_ERROR })
        }
    }
}

fn construct(config: &ExperimentConfig) -> Result<()> {
    let scheme = config.build_scheme(config.seed)?;
    let stem = config.out.clone().unwrap_or_else(|| PathBuf::from(scheme.kind().name()));
    if let Some(dir) = stem.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let meta = scheme.save(&stem)?;
    let mut out = io::stdout().lock();
    writeln!(out, "kind={}", scheme.kind())?;
    writeln!(out, "m={}", scheme.rows())?;
    writeln!(out, "n={}", scheme.items())?;
    writeln!(out, "k={}", scheme.k())?;
    writeln!(out, "delta={}", scheme.delta())?;
    match scheme.aux() {
        SchemeAux::Repetition { base } => writeln!(out, "base_rows={}", base.rows())?,
        SchemeAux::Bernoulli { seed, .. } => writeln!(out, "seed_used={seed}")?,
        SchemeAux::PaddedKs { codebook, d, k_max } => {
            let q = codebook.alphabet() as usize;
            writeln!(out, "q={q}\nd={d}\nk_max={k_max}")?;
            writeln!(out, "expected_m={}", codebook.word_len() * (q + scheme.delta()))?;
        }
        SchemeAux::Saffron { adjacency, signatures, .. } => {
            writeln!(out, "right_nodes={}\nblock_height={}", adjacency.rows(), signatures.rows())?
        }
    }
    writeln!(out, "metadata={}", meta.display())?;
    Ok(())
}

fn trial(config: &ExperimentConfig) -> Result<()> {
    let mut sink: Box<dyn Write> = match &config.out {
        Some(p) => Box::new(io::BufWriter::new(
            fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    };
    let records = run_trials(config, &mut sink)?;
    sink.flush()?;
    let ok = records.iter().filter(|r| r.success).count();
    log::info!("{ok}/{} trials recovered the planted set", records.len());
    Ok(())
}

fn load_matrix(path: &Path) -> Result<BitMatrix> {
    if path.extension().is_some_and(|e| e == "meta") {
        return Ok(TestingScheme::load(path)?.matrix().clone());
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(BitMatrix::parse(&text)?)
}

fn verify(args: &VerifyArgs) -> Result<u8> {
    let a = load_matrix(&args.scheme)?;
    let report: PropertyReport = match args.property.as_str() {
        "disjunct" => is_disjunct(&a, args.k, args.cap)?,
        "separable" => is_separable(&a, args.k, args.cap)?,
        "del-separable" => is_deletion_separable(&a, args.k, args.delta, args.cap)?,
        "del-disjunct" => is_deletion_disjunct(&a, args.k, args.delta, args.cap)?,
        other => bail!("unknown property {other:?}"),
    };
    print!("{}", report.to_text());
    Ok(if report.holds { 0 } else { EXIT_FAILS })
}

fn distances(args: &DistanceArgs) -> Result<()> {
    let x = read_vector(&args.x)?;
    let y = read_vector(&args.y)?;
    let mut out = io::stdout().lock();
    writeln!(out, "lcs={}", lcs(&x, &y))?;
    if x.len() == y.len() {
        writeln!(out, "deletion_distance={}", deletion_distance(&x, &y)?)?;
        // grow the budget until the predicate breaks or the cap is hit
        let mut delta = 0;
        let adel = loop {
            if delta > x.len() {
                break format!("{}", x.len());
            }
            if binomial(x.len(), delta) > args.cap {
                break format!(">={}", delta as i64 - 1);
            }
            if !adel_at_least(&x, &y, delta)? {
                break match delta {
                    0 => "none".to_string(),
                    d => (d - 1).to_string(),
                };
            }
            delta += 1;
        };
        writeln!(out, "adel_distance={adel}")?;
    }
    if let Some(t) = args.budget {
        writeln!(out, "coverage={}", check_coverage(&x, &y, CoverageBudget(t))?)?;
    }
    Ok(())
}
