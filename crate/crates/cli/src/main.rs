//! `relmon`: sieve, certify, lattice-check and localize from the command line.

mod source;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use relmon_core::cert::{
    certify_correspondences, certify_relations, CertifyOptions, HomMode, DEFAULT_SEED,
};
use relmon_core::lattice::{check_localizer, make_localizer, Lattice, LatticeElement, Localizer};
use relmon_core::sieve::{classify_all, witness_pair, SieveMode};
use relmon_core::SetSize;

use crate::source::LatticeSource;

#[derive(Debug, Parser)]
#[command(
    name = "relmon",
    version,
    about = "Irreducibility sieve and representation-type certificates for relation monoids"
)]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Directory for output files without an explicit path.
    #[arg(long, global = true, env = "RELMON_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify every relation on an n-element set (n <= 4).
    Sieve(SieveArgs),
    /// Emit a certificate for relations or lattice-valued correspondences.
    Certify(CertifyArgs),
    /// Validate a lattice and print its bottom, top and atoms.
    LatticeCheck(LatticeArgs),
    /// Build the idempotent localizer and run its property suite.
    Localize(LocalizeArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SieveChoice {
    Full,
    Reduced,
}

impl From<SieveChoice> for SieveMode {
    fn from(c: SieveChoice) -> Self {
        match c {
            SieveChoice::Full => SieveMode::FullPairs,
            SieveChoice::Reduced => SieveMode::SymmetryReduced,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeChoice {
    Structured,
    Exhaustive,
    Both,
}

impl From<ModeChoice> for HomMode {
    fn from(c: ModeChoice) -> Self {
        match c {
            ModeChoice::Structured => HomMode::Structured,
            ModeChoice::Exhaustive => HomMode::Exhaustive,
            ModeChoice::Both => HomMode::Both,
        }
    }
}

#[derive(Debug, Args)]
struct SieveArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value = "reduced")]
    sieve: SieveChoice,
    /// CSV output path (default: <out-dir>/classification_n<N>.csv).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LatticeArgs {
    /// Builtin lattice: chain1..chain8, boolean1..boolean4.
    #[arg(long, group = "source")]
    lattice: Option<String>,
    /// Lattice file: element count, meet rows, join rows.
    #[arg(long, alias = "file", group = "source")]
    lattice_file: Option<PathBuf>,
    /// Poset file whose down-set lattice is used.
    #[arg(long, group = "source")]
    poset: Option<PathBuf>,
}

impl LatticeArgs {
    fn source(&self) -> Option<LatticeSource> {
        LatticeSource::from_flags(
            self.lattice.as_deref(),
            self.lattice_file.as_deref(),
            self.poset.as_deref(),
        )
    }
}

#[derive(Debug, Args)]
struct LocalizerArgs {
    #[arg(long)]
    n: usize,
    /// One-based points of the four-element subset (default 1,2,3,4).
    #[arg(long = "Y", alias = "y", value_delimiter = ',')]
    subset: Option<Vec<usize>>,
    /// Atom id (default: the smallest atom).
    #[arg(long)]
    atom: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Random pairs for the homomorphism suite.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
}

#[derive(Debug, Args)]
struct CertifyArgs {
    /// Certify the relation monoid B_n.
    #[arg(long, conflicts_with_all = ["lattice", "lattice_file", "poset"])]
    relations: bool,
    #[command(flatten)]
    lattice: LatticeArgs,
    #[command(flatten)]
    localizer: LocalizerArgs,
    #[arg(long, value_enum, default_value = "structured")]
    mode: ModeChoice,
    #[arg(long, value_enum, default_value = "reduced")]
    sieve: SieveChoice,
    /// Record elapsed_ms = 0 so the certificate is byte-stable.
    #[arg(long)]
    no_timings: bool,
    /// Certificate path (default: <out-dir>/certificate.txt).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LocalizeArgs {
    #[command(flatten)]
    lattice: LatticeArgs,
    #[command(flatten)]
    localizer: LocalizerArgs,
    /// Report path (default: <out-dir>/localizer.txt).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(workers) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn output_path(cli: &Cli, explicit: &Option<PathBuf>, default_name: &str) -> PathBuf {
    explicit
        .clone()
        .unwrap_or_else(|| cli.out_dir.join(default_name))
}

fn write_output(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

/// Returns whether the run succeeded (drives the exit status).
fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Sieve(args) => run_sieve(cli, args),
        Command::Certify(args) => run_certify(cli, args),
        Command::LatticeCheck(args) => run_lattice_check(args),
        Command::Localize(args) => run_localize(cli, args),
    }
}

fn run_sieve(cli: &Cli, args: &SieveArgs) -> Result<bool> {
    let n = SetSize::enumerable(args.n)?;
    let c = classify_all(n, args.sieve.into())?;
    let path = output_path(cli, &args.out, &format!("classification_n{}.csv", args.n));
    write_output(&path, &c.to_csv())?;
    let counts = c.counts();
    println!("n={n}");
    println!("elements={}", counts.total());
    println!("units={}", counts.units);
    println!("reducible={}", counts.reducible);
    println!("irreducible={}", counts.irreducible);
    println!("irreducible_classes={}", c.class_reps().len());
    for rep in c.class_reps() {
        println!("class_rep={rep}");
    }
    match witness_pair(&c) {
        Some((p, q)) => println!("witnesses={p},{q}"),
        None => println!("witnesses=none"),
    }
    println!("csv={}", path.display());
    Ok(true)
}

fn localizer_from(lattice: &Lattice, args: &LocalizerArgs) -> Result<Localizer> {
    let n = SetSize::new(args.n)?;
    let subset: Vec<usize> = match &args.subset {
        Some(points) => points
            .iter()
            .map(|&p| p.checked_sub(1).context("points of Y are one-based"))
            .collect::<Result<_>>()?,
        None => (0..4).collect(),
    };
    let atom = match args.atom {
        Some(id) => lattice.element(id)?,
        None => match lattice.atoms().first() {
            Some(&a) => a,
            None if lattice.is_trivial() => bail!("nontrivial lattice required"),
            None => bail!("lattice has no atom"),
        },
    };
    Ok(make_localizer(lattice, n, &subset, atom)?)
}

fn run_certify(cli: &Cli, args: &CertifyArgs) -> Result<bool> {
    let opts = CertifyOptions {
        hom_mode: args.mode.into(),
        sieve_mode: args.sieve.into(),
        seed: args.localizer.seed,
        samples: args.localizer.samples,
        timings: !args.no_timings,
    };
    let cert = match args.lattice.source() {
        Some(source) if !args.relations => {
            let lattice = source.load()?;
            let loc = localizer_from(&lattice, &args.localizer)?;
            certify_correspondences(&source.label(), &loc, &opts)?
        }
        None if args.relations => certify_relations(SetSize::enumerable(args.localizer.n)?, &opts)?,
        _ => bail!("certify needs exactly one of --relations, --lattice, --lattice-file, --poset"),
    };
    let path = output_path(cli, &args.out, "certificate.txt");
    write_output(&path, &cert.render())?;
    for check in cert.checks.iter().filter(|c| !c.passed) {
        eprintln!(
            "check {} failed{}",
            check.name,
            check
                .detail
                .as_ref()
                .map(|d| format!(": {d}"))
                .unwrap_or_default()
        );
    }
    println!("verdict={}", cert.verdict);
    println!("certificate={}", path.display());
    Ok(cert.passed())
}

fn run_lattice_check(args: &LatticeArgs) -> Result<bool> {
    let source = args
        .source()
        .context("lattice-check needs --lattice, --file or --poset")?;
    match source.load() {
        Ok(l) => {
            let atoms: Vec<String> = l.atoms().iter().map(LatticeElement::to_string).collect();
            println!("lattice={}", source.label());
            println!("status=distributive");
            println!("size={}", l.size());
            println!("bottom={}", l.bottom());
            println!("top={}", l.top());
            println!("atoms={}", atoms.join(","));
            println!("nontrivial={}", !l.is_trivial());
            Ok(true)
        }
        Err(e) => {
            println!("lattice={}", source.label());
            println!("status=rejected");
            println!("reason={e:#}");
            Ok(false)
        }
    }
}

fn run_localize(cli: &Cli, args: &LocalizeArgs) -> Result<bool> {
    let source = args
        .lattice
        .source()
        .context("localize needs --lattice, --lattice-file or --poset")?;
    let lattice = source.load()?;
    let loc = localizer_from(&lattice, &args.localizer)?;
    let report = check_localizer(&loc, args.localizer.seed, args.localizer.samples)?;
    let y: Vec<String> = loc.subset().iter().map(|p| (p + 1).to_string()).collect();
    let verdict = |ok: bool| if ok { "pass" } else { "fail" };
    let doc = format!(
        "LOCALIZER\nlattice={}\nlattice_size={}\nn={}\nY={}\nbottom={}\natom={}\ne={}\n\
         CHECKS\n\
         idempotent mode=structured result={}\n\
         roundtrip mode=exhaustive result={} count={} failures={}\n\
         homomorphism mode=random({},{}) result={} failures={}\n\
         bijection mode=random({},{}) result={} failures={}\n",
        source.label(),
        lattice.size(),
        loc.n(),
        y.join(","),
        loc.bottom(),
        loc.atom(),
        loc.idempotent(),
        verdict(report.idempotent),
        verdict(report.roundtrip_failures == 0),
        report.roundtrip_checked,
        report.roundtrip_failures,
        report.seed,
        report.samples,
        verdict(report.hom_failures == 0),
        report.hom_failures,
        report.seed,
        report.samples,
        verdict(report.bijection_failures == 0),
        report.bijection_failures,
    );
    let path = output_path(cli, &args.out, "localizer.txt");
    write_output(&path, &doc)?;
    print!("{doc}");
    Ok(report.passed())
}
