//! `permsym` command-line front end: table building, seesaw runs, parameter
//! sweeps and the self-check suite.
//!
//! Exit codes: 0 on success, 2 when an iteration cap truncated a run, 1 on
//! any error (invalid channel files name the first bad entry).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use permsym::algebra::{algebra_orbits, AlgebraSpec};
use permsym::combinatorics::binomial;
use permsym::orbit::{OrbitBasis, SystemSpec};
use permsym::seesaw::SweepRow;
use permsym::validate::{self, Level};
use permsym::{
    reference_curve, seesaw_flagged, seesaw_run, sweep, ChangeOfBasis, ChoiMatrix, MarginalData, ReferenceCurve, SeesawConfig,
    TableProvider,
};
use serde::Serialize;
use serde_json::json;

const VERSION: &str = env!("CARGO_PKG_VERSION");
const CACHE_ENV: &str = "PERMSYM_CACHE";

#[derive(Parser, Debug)]
#[command(name = "permsym", version, about = "Symmetric seesaw bounds on n-copy channel fidelity")]
struct Cli {
    /// Directory for cached tables. The PERMSYM_CACHE environment variable takes precedence.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build (or load) the tables for one configuration and print their dimensions.
    Tables(TablesArgs),
    /// Run the seesaw for one channel and copy count.
    Seesaw(SeesawArgs),
    /// Run the seesaw over a parameter grid and a range of copy counts.
    Sweep(SweepArgs),
    /// Run the dense-oracle and cross-method self-checks.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct TablesArgs {
    /// Local dimension of one copy.
    #[arg(long)]
    d: usize,
    #[arg(long)]
    n: usize,
    /// Message dimension; also builds the channel marginal tables and reports the seesaw variable sizes.
    #[arg(long)]
    d_ref: Option<usize>,
    /// Number of flag values; the flagged algebra has this many blocks of size d.
    #[arg(long)]
    flags: Option<usize>,
}

#[derive(Args, Debug, Clone)]
struct ChannelArgs {
    /// adc, depolarizing, identity, file:PATH or flagged:PATH.
    #[arg(long)]
    channel: String,
    /// Damping parameter for adc.
    #[arg(long)]
    gamma: Option<f64>,
    /// Error parameter for depolarizing.
    #[arg(long)]
    p: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct ConfigArgs {
    /// Message (reference) dimension.
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = SeesawConfig::default().seeds)]
    seeds: usize,
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
    /// Stop once the encoder half-step gains less than this.
    #[arg(long, default_value_t = SeesawConfig::default().delta)]
    delta: f64,
    /// Stop a power iteration once a step gains less than this.
    #[arg(long, default_value_t = SeesawConfig::default().delta_power)]
    delta_power: f64,
    #[arg(long, default_value_t = SeesawConfig::default().max_outer)]
    max_outer: usize,
    #[arg(long, default_value_t = SeesawConfig::default().max_power)]
    max_power: usize,
    /// Include wall-clock time in the output. Timed output is not reproducible byte for byte.
    #[arg(long)]
    timing: bool,
}

impl ConfigArgs {
    fn config(&self, n: usize) -> SeesawConfig {
        SeesawConfig {
            n,
            d: self.d,
            delta: self.delta,
            delta_power: self.delta_power,
            max_outer: self.max_outer,
            max_power: self.max_power,
            seeds: self.seeds,
            rng_seed: self.rng_seed,
        }
    }
}

#[derive(Args, Debug)]
struct SeesawArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// adc or depolarizing.
    #[arg(long)]
    channel: String,
    /// Comma-separated parameter values.
    #[arg(long, value_delimiter = ',', required = true)]
    grid: Vec<f64>,
    /// Copy counts, as a list (1,2,5) or an inclusive range (1-5).
    #[arg(long, default_value = "1")]
    n: String,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[arg(long, value_enum, default_value_t = LevelArg::Quick)]
    level: LevelArg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

/// What the run was asked to do, echoed into every output.
#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    channel: Option<serde_json::Value>,
    cache_dir: Option<String>,
    output: Option<String>,
    format: Format,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn cache_dir(cli: &Cli) -> Option<PathBuf> {
    match std::env::var_os(CACHE_ENV) {
        Some(v) if !v.is_empty() => Some(PathBuf::from(v)),
        _ => cli.cache_dir.clone(),
    }
}

fn run(cli: Cli) -> Result<u8> {
    let cache = cache_dir(&cli);
    if let Some(dir) = &cache {
        fs::create_dir_all(dir).with_context(|| format!("creating cache directory {}", dir.display()))?;
    }
    let tables = TableProvider::new(cache.as_deref());
    let manifest = |command: &'static str, channel: Option<serde_json::Value>, format: Format| Manifest {
        command,
        channel,
        cache_dir: cache.as_ref().map(|p| p.display().to_string()),
        output: cli.out.as_ref().map(|p| p.display().to_string()),
        format,
    };
    match &cli.command {
        Command::Tables(args) => {
            let format = cli.format.unwrap_or(Format::Json);
            let summary = tables_summary(args, cache.as_deref())?;
            let doc = json!({"version": VERSION, "manifest": manifest("tables", None, format), "tables": summary});
            emit(cli.out.as_deref(), format, &doc, || summary_csv(&summary))?;
            Ok(0)
        }
        Command::Seesaw(args) => {
            let format = cli.format.unwrap_or(Format::Json);
            let (channel, described) = load_channel(&args.channel)?;
            let config = args.config.config(args.n);
            let result = if channel.flags().is_some() {
                seesaw_flagged(&channel, &config, &tables)?
            } else {
                seesaw_run(&channel, &config, &tables)?
            };
            let mut doc = result.to_json(args.config.timing);
            doc["version"] = json!(VERSION);
            doc["manifest"] = serde_json::to_value(manifest("seesaw", Some(described), format))?;
            emit(cli.out.as_deref(), format, &doc, || {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["seed", "fidelity", "outer_iterations", "truncated"])?;
                for r in &result.runs {
                    w.write_record([r.run.to_string(), r.fidelity.to_string(), r.outer_iterations.to_string(), r.truncated.to_string()])?;
                }
                Ok(w.into_inner()?)
            })?;
            Ok(if result.truncated { 2 } else { 0 })
        }
        Command::Sweep(args) => {
            let format = cli.format.unwrap_or(Format::Csv);
            let family = Family::parse(&args.channel)?;
            let ns = parse_ns(&args.n)?;
            let config = args.config.config(ns[0]);
            let rows = sweep(|x| family.channel(x), &args.grid, &ns, &config, &tables)?;
            let described = json!({"family": args.channel, "grid": args.grid, "n": ns});
            let doc = json!({
                "version": VERSION,
                "manifest": manifest("sweep", Some(described), format),
                "config": config,
                "rows": rows.iter().map(|r| family.row_json(r)).collect::<Vec<_>>(),
            });
            emit(cli.out.as_deref(), format, &doc, || family.csv(&rows))?;
            Ok(if rows.iter().any(|r| r.truncated) { 2 } else { 0 })
        }
        Command::Validate(args) => {
            let format = cli.format.unwrap_or(Format::Json);
            let level = match args.level {
                LevelArg::Quick => Level::Quick,
                LevelArg::Full => Level::Full,
            };
            let report = validate::run(level);
            let doc = json!({"version": VERSION, "manifest": manifest("validate", None, format), "report": report});
            emit(cli.out.as_deref(), format, &doc, || {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["invariant", "passed", "detail"])?;
                for o in &report.outcomes {
                    w.write_record([o.name.as_str(), if o.passed { "true" } else { "false" }, o.detail.as_str()])?;
                }
                Ok(w.into_inner()?)
            })?;
            match report.first_failure() {
                None => Ok(0),
                Some(f) => bail!("invariant {} failed: {}", f.name, f.detail),
            }
        }
    }
}

fn emit(out: Option<&Path>, format: Format, doc: &serde_json::Value, csv: impl FnOnce() -> Result<Vec<u8>>) -> Result<()> {
    let bytes = match format {
        Format::Json => {
            let mut b = serde_json::to_vec_pretty(doc)?;
            b.push(b'\n');
            b
        }
        Format::Csv => csv()?,
    };
    match out {
        Some(path) => fs::write(path, bytes).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(&bytes)?;
            Ok(())
        }
    }
}

fn load_channel(args: &ChannelArgs) -> Result<(ChoiMatrix, serde_json::Value)> {
    let spec = args.channel.as_str();
    if let Some(path) = spec.strip_prefix("file:").or_else(|| spec.strip_prefix("flagged:")) {
        let text = fs::read_to_string(path).with_context(|| format!("reading channel file {path}"))?;
        let ch = ChoiMatrix::from_json(&text).with_context(|| format!("channel file {path}"))?;
        if spec.starts_with("flagged:") && ch.flags().is_none() {
            bail!("channel file {path}: flagged channel needs a \"flags\" list");
        }
        let described = json!({"file": path, "flagged": ch.flags().is_some()});
        return Ok((ch, described));
    }
    let family = Family::parse(spec)?;
    let x = match family {
        Family::Adc => args.gamma.context("--gamma is required for adc")?,
        Family::Depolarizing => args.p.context("--p is required for depolarizing")?,
        Family::Identity => 0.0,
    };
    let described = match family {
        Family::Adc => json!({"builtin": "adc", "gamma": x}),
        Family::Depolarizing => json!({"builtin": "depolarizing", "p": x}),
        Family::Identity => json!({"builtin": "identity"}),
    };
    Ok((family.channel(x)?, described))
}

#[derive(Clone, Copy, Debug)]
enum Family {
    Adc,
    Depolarizing,
    Identity,
}

impl Family {
    fn parse(name: &str) -> Result<Self> {
        match name {
            "adc" => Ok(Family::Adc),
            "depolarizing" => Ok(Family::Depolarizing),
            "identity" => Ok(Family::Identity),
            other => bail!("unknown channel {other:?}; expected adc, depolarizing, identity, file:PATH or flagged:PATH"),
        }
    }

    fn channel(self, x: f64) -> permsym::Result<ChoiMatrix> {
        match self {
            Family::Adc => ChoiMatrix::adc(x),
            Family::Depolarizing => ChoiMatrix::depolarizing(x),
            Family::Identity => Ok(ChoiMatrix::identity(2)),
        }
    }

    /// Uncoded fidelity and the named code, for overlay columns.
    fn references(self) -> (ReferenceCurve, Option<(&'static str, ReferenceCurve)>) {
        match self {
            Family::Adc => (ReferenceCurve::UncodedAdc, Some(("leung4", ReferenceCurve::Leung4))),
            Family::Depolarizing => (ReferenceCurve::UncodedDepolarizing, Some(("fivequbit", ReferenceCurve::FiveQubit))),
            Family::Identity => (ReferenceCurve::UncodedDepolarizing, None),
        }
    }

    fn row_json(self, r: &SweepRow) -> serde_json::Value {
        let (uncoded, code) = self.references();
        let mut v = serde_json::to_value(r).expect("plain row");
        v["uncoded"] = json!(reference_curve(uncoded, r.param));
        if let Some((name, curve)) = code {
            v[name] = json!(reference_curve(curve, r.param));
        }
        v
    }

    fn csv(self, rows: &[SweepRow]) -> Result<Vec<u8>> {
        let (uncoded, code) = self.references();
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["param", "n", "fidelity", "best_flag", "uncoded"];
        if let Some((name, _)) = code {
            header.push(name);
        }
        header.push("truncated");
        w.write_record(&header)?;
        for r in rows {
            let mut rec = vec![r.param.to_string(), r.n.to_string(), r.fidelity.to_string(), r.best_flag.to_string()];
            rec.push(reference_curve(uncoded, r.param).to_string());
            if let Some((_, curve)) = code {
                rec.push(reference_curve(curve, r.param).to_string());
            }
            rec.push(r.truncated.to_string());
            w.write_record(&rec)?;
        }
        Ok(w.into_inner()?)
    }
}

/// `"1-5"` or `"1,2,5"`.
fn parse_ns(spec: &str) -> Result<Vec<usize>> {
    let ns: Vec<usize> = if let Some((a, b)) = spec.split_once('-') {
        let (a, b): (usize, usize) = (a.trim().parse()?, b.trim().parse()?);
        (a..=b).collect()
    } else {
        spec.split(',').map(|s| s.trim().parse()).collect::<std::result::Result<_, _>>()?
    };
    if ns.is_empty() || ns.contains(&0) {
        bail!("copy counts must be positive, got {spec:?}");
    }
    Ok(ns)
}

#[derive(Serialize)]
struct TablesSummary {
    d: usize,
    n: usize,
    /// Orbits of one system of dimension d, C(n + d² − 1, n).
    orbits: usize,
    /// Orbits of a d×d bipartite system, as used by a d→d channel.
    channel_orbits: usize,
    irreps: usize,
    /// Σ m_λ², equal to `orbits`.
    block_dimension: u128,
    /// Σ m_λ f_λ, equal to d^n.
    hilbert_dimension: u128,
    cache: &'static str,
    seesaw: Option<SeesawSummary>,
    flagged: Option<FlaggedSummary>,
}

#[derive(Serialize)]
struct SeesawSummary {
    d_ref: usize,
    /// Real parameters of one symmetric encoder or decoder, Σ (d_ref m_λ)².
    block_parameters: usize,
    /// Real parameters of the same map without symmetry, (d_ref d^n)².
    dense_parameters: String,
}

#[derive(Serialize)]
struct FlaggedSummary {
    flags: usize,
    orbits: usize,
    /// C(n + ℓd² − 1, n) for the whole space, for comparison.
    unflagged_orbits: String,
}

fn tables_summary(args: &TablesArgs, cache: Option<&Path>) -> Result<TablesSummary> {
    let (d, n) = (args.d, args.n);
    if d == 0 || n == 0 {
        bail!("--d and --n must be positive");
    }
    let (cob, hit) = ChangeOfBasis::load_or_build(d, n, cache)?;
    let orbits = cob.basis().len();
    let channel_orbits = OrbitBasis::full(SystemSpec::bipartite(d, d, n)?)?.len();
    let mut block_dimension = 0u128;
    let mut hilbert_dimension = 0u128;
    for l in cob.lambdas() {
        let m = l.tableaux.len() as u128;
        block_dimension += m * m;
        hilbert_dimension += m * l.multiplicity.as_u128().context("multiplicity overflow")?;
    }
    let seesaw = match args.d_ref {
        None => None,
        Some(r) => {
            let joint = Arc::new(OrbitBasis::full(SystemSpec::bipartite(d, d, n)?)?);
            MarginalData::new(joint, cob.basis().clone(), cob.basis().clone())?;
            let dims = cob.layout().dims();
            let cap = (d as u128).checked_pow(n as u32).context("d^n overflows")?;
            if r == 0 || r as u128 > cap {
                bail!("--d-ref must lie in 1..={cap}");
            }
            let block_parameters = dims.iter().map(|&m| (r * m) * (r * m)).sum();
            let dense = (r as u128 * cap).checked_pow(2).map_or_else(|| "overflow".to_string(), |v| v.to_string());
            Some(SeesawSummary { d_ref: r, block_parameters, dense_parameters: dense })
        }
    };
    let flagged = match args.flags {
        None => None,
        Some(l) => {
            let spec = AlgebraSpec::new(vec![d; l], n)?;
            let orbits = algebra_orbits(&spec)?.len();
            let whole = l * d;
            Some(FlaggedSummary { flags: l, orbits, unflagged_orbits: binomial((n + whole * whole - 1) as u64, n as u64).to_string() })
        }
    };
    Ok(TablesSummary {
        d,
        n,
        orbits,
        channel_orbits,
        irreps: cob.lambdas().len(),
        block_dimension,
        hilbert_dimension,
        seesaw,
        cache: match (cache, hit) {
            (None, _) => "none",
            (Some(_), true) => "hit",
            (Some(_), false) => "built",
        },
        flagged,
    })
}

fn summary_csv(s: &TablesSummary) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["d", "n", "orbits", "channel_orbits", "irreps", "block_dimension", "hilbert_dimension", "flagged_orbits", "cache"])?;
    let flagged = s.flagged.as_ref().map_or(String::new(), |f| f.orbits.to_string());
    w.write_record([
        s.d.to_string(),
        s.n.to_string(),
        s.orbits.to_string(),
        s.channel_orbits.to_string(),
        s.irreps.to_string(),
        s.block_dimension.to_string(),
        s.hilbert_dimension.to_string(),
        flagged,
        s.cache.to_string(),
    ])?;
    Ok(w.into_inner()?)
}
