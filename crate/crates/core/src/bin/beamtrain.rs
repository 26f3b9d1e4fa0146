use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use beamtrain::array::AngleGrid;
use beamtrain::channel::sample_channel;
use beamtrain::codebook::{
    export_codebook, generate, validate_criterion1, validate_criterion2, CodewordId, Method,
};
use beamtrain::experiments::{
    default_success_snr_grid, layer_codewords, run_beam_patterns, run_received_power,
    run_success_rate, ExperimentConfig, PatternScale,
};
use beamtrain::rng::{substream, Purpose};
use beamtrain::search::{exhaustive_search, hierarchical_search, Adjudicator, Policy, PowerModel};

#[derive(Parser)]
#[command(
    name = "beamtrain",
    version,
    about = "Hierarchical beam-training codebooks and beam search simulation"
)]
struct Cli {
    /// Worker threads for Monte-Carlo runs (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate, export and validate a codebook.
    Codebook(CodebookArgs),
    /// Export beam patterns of selected codewords as CSV.
    Pattern(PatternArgs),
    /// Run one hierarchical search on one channel and print its trace.
    Search(SearchArgs),
    /// Mean received power after each search step.
    McPower(ExperimentArgs),
    /// Success rate of the search against SNR.
    McSuccess(ExperimentArgs),
}

#[derive(Args)]
struct CodebookArgs {
    #[arg(long, default_value = "bmw-ss")]
    method: Method,
    /// Array size (power of two).
    #[arg(long)]
    n: usize,
    /// Check full-layer coverage and parent containment.
    #[arg(long)]
    validate: bool,
    /// Coverage threshold used by the checks.
    #[arg(long, default_value_t = 0.5)]
    rho: f64,
    /// Angle grid size for the checks.
    #[arg(long, default_value_t = AngleGrid::DEFAULT_POINTS)]
    grid_points: usize,
    /// Write the codebook file here (stdout when neither this nor --validate is given).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PatternArgs {
    #[arg(long, default_value = "bmw-ss")]
    method: Method,
    #[arg(long)]
    n: usize,
    /// Comma-separated layers whose codewords are all exported.
    #[arg(long, value_delimiter = ',')]
    layers: Vec<usize>,
    /// Comma-separated codewords as `k:n`.
    #[arg(long, value_delimiter = ',')]
    codewords: Vec<String>,
    #[arg(long, default_value_t = AngleGrid::DEFAULT_POINTS)]
    grid_points: usize,
    /// Drive every active antenna at unit amplitude instead of unit total power.
    #[arg(long)]
    per_antenna: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    exp: ExperimentArgs,
    /// Realization index whose channel and noise streams are used.
    #[arg(long, default_value_t = 0)]
    realization: u64,
}

/// Flags mirroring the experiment configuration keys; they override `--config`.
#[derive(Args)]
struct ExperimentArgs {
    /// `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Sets both array sizes.
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    n_t: Option<String>,
    #[arg(long)]
    n_r: Option<String>,
    /// Comma-separated codebook methods.
    #[arg(long, alias = "method")]
    methods: Option<String>,
    /// `los` or `nlos`.
    #[arg(long)]
    channel: Option<String>,
    /// Number of multipath components.
    #[arg(long)]
    paths: Option<String>,
    #[arg(long)]
    eta_db: Option<String>,
    /// `total` or `per-antenna`.
    #[arg(long)]
    power_model: Option<String>,
    /// Transmit power in watts.
    #[arg(long)]
    power_w: Option<String>,
    /// SNR points in dB: `a,b,c` or `start:step:stop`.
    #[arg(long, allow_hyphen_values = true)]
    snr_db: Option<String>,
    #[arg(long)]
    realizations: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Comma-separated adjudication policies.
    #[arg(long, alias = "policy")]
    policies: Option<String>,
    /// `signal` (noiseless received power) or `measured` (|y|²).
    #[arg(long)]
    power_metric: Option<String>,
    /// CSV destination (stdout when absent).
    #[arg(long)]
    out: Option<String>,
}

impl ExperimentArgs {
    fn resolve(&self, mut cfg: ExperimentConfig) -> Result<ExperimentConfig> {
        if let Some(path) = &self.config {
            cfg.apply_file(path)
                .with_context(|| format!("reading {}", path.display()))?;
        }
        let flags = [
            ("n", &self.n),
            ("n_t", &self.n_t),
            ("n_r", &self.n_r),
            ("methods", &self.methods),
            ("channel", &self.channel),
            ("paths", &self.paths),
            ("eta_db", &self.eta_db),
            ("power_model", &self.power_model),
            ("power_w", &self.power_w),
            ("snr_db", &self.snr_db),
            ("realizations", &self.realizations),
            ("seed", &self.seed),
            ("policies", &self.policies),
            ("power_metric", &self.power_metric),
            ("out", &self.out),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)
                    .with_context(|| format!("--{}", key.replace('_', "-")))?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn parse_codeword(s: &str) -> Result<CodewordId> {
    let (k, n) = s
        .split_once(':')
        .with_context(|| format!("codeword '{s}' is not of the form k:n"))?;
    Ok(CodewordId::new(k.trim().parse()?, n.trim().parse()?))
}

fn codebook(args: &CodebookArgs) -> Result<bool> {
    let cb = generate(args.method, args.n)?;
    if args.out.is_some() || !args.validate {
        let mut out = output(args.out.as_deref())?;
        export_codebook(&cb, &mut out)?;
        out.flush()?;
    }
    if !args.validate {
        return Ok(true);
    }
    let grid = AngleGrid::uniform(args.grid_points)?;
    let c1 = validate_criterion1(&cb, args.rho, &grid)?;
    let c2 = validate_criterion2(&cb, args.rho, &grid)?;
    println!(
        "{} N={} rho={} grid={}",
        cb.method(),
        cb.size(),
        args.rho,
        grid.len()
    );
    for layer in &c1.layers {
        println!(
            "criterion1 layer {}: {} ({} uncovered points, widest gap {:.6})",
            layer.layer,
            if layer.passed() { "PASS" } else { "FAIL" },
            layer.uncovered.len(),
            layer.widest_gap()
        );
    }
    for (k, ok) in c2.layer_results() {
        let bad: usize = c2
            .parents
            .iter()
            .filter(|p| p.parent.layer == k)
            .map(|p| p.violations.len())
            .sum();
        println!(
            "criterion2 layer {k}: {} ({bad} uncontained points)",
            if ok { "PASS" } else { "FAIL" }
        );
    }
    let passed = c1.passed() && c2.passed();
    println!("overall: {}", if passed { "PASS" } else { "FAIL" });
    Ok(passed)
}

fn pattern(args: &PatternArgs) -> Result<()> {
    let mut ids = layer_codewords(&args.layers);
    for s in &args.codewords {
        ids.push(parse_codeword(s)?);
    }
    if ids.is_empty() {
        bail!("select codewords with --layers or --codewords");
    }
    let grid = AngleGrid::uniform(args.grid_points)?;
    let scale = if args.per_antenna {
        PatternScale::PerAntenna
    } else {
        PatternScale::UnitPower
    };
    let table = run_beam_patterns(args.method, args.n, &ids, &grid, scale)?;
    let mut out = output(args.out.as_deref())?;
    table.write_csv(&mut out)?;
    out.flush()?;
    Ok(())
}

fn search(args: &SearchArgs) -> Result<()> {
    let defaults = ExperimentConfig {
        methods: vec![Method::BmwSs],
        ..Default::default()
    };
    let cfg = args.exp.resolve(defaults)?;
    let [snr_db] = cfg.snr_db[..] else {
        bail!("search takes exactly one SNR point");
    };
    let params = cfg.channel_params();
    let ch = sample_channel(&params, &mut params.rng_for(args.realization))?;
    let pm = PowerModel::from_snr_db(cfg.power_mode, cfg.power_w, snr_db)?;
    let adj = Adjudicator::new(&ch);
    let ex = exhaustive_search(&ch, &pm);

    println!(
        "channel {} L={} seed={} realization={}",
        cfg.kind, cfg.paths, cfg.seed, args.realization
    );
    for (i, m) in ch.mpcs().iter().enumerate() {
        println!(
            "  path {}: |lambda|^2={:.6} omega={:.6} psi={:.6}",
            i + 1,
            m.lambda.norm_sqr(),
            m.omega,
            m.psi
        );
    }
    println!(
        "exhaustive: tx leaf {} rx leaf {} gain {:.6}",
        ex.tx_leaf, ex.rx_leaf, ex.gain
    );
    let mut out = cfg.out.as_deref().map(|p| output(Some(p))).transpose()?;
    for &method in &cfg.methods {
        let cb_t = generate(method, cfg.n_t)?;
        let cb_r = generate(method, cfg.n_r)?;
        let mut rng = substream(cfg.seed, args.realization, Purpose::Noise);
        let found = hierarchical_search(&cb_t, &cb_r, &ch, &pm, &mut rng)?;
        println!("{method}:");
        for s in &found.trace.steps {
            let m = s.winner_measurement();
            println!(
                "  stage {:>2} {} {} vs {} -> {}  |y|^2={:.6e} gain={:.6e}",
                s.stage,
                s.side,
                s.candidates[0],
                s.candidates[1],
                s.winner_id(),
                m.y_power,
                m.noiseless_gain
            );
        }
        let verdicts: Vec<String> = Policy::ALL
            .iter()
            .map(|&p| format!("{p}={}", adj.success(&found, p)))
            .collect();
        println!(
            "  found tx leaf {} rx leaf {}; {}",
            found.tx_leaf,
            found.rx_leaf,
            verdicts.join(" ")
        );
        if let Some(w) = out.as_mut() {
            found.trace.write_csv(w)?;
        }
    }
    if let Some(mut w) = out {
        w.flush()?;
    }
    Ok(())
}

fn mc_power(args: &ExperimentArgs) -> Result<()> {
    let cfg = args.resolve(ExperimentConfig::default())?;
    let result = run_received_power(&cfg)?;
    let mut out = output(cfg.out.as_deref())?;
    result.write_csv(&mut out)?;
    out.flush()?;
    Ok(())
}

fn mc_success(args: &ExperimentArgs) -> Result<()> {
    let defaults = ExperimentConfig {
        snr_db: default_success_snr_grid(),
        ..Default::default()
    };
    let cfg = args.resolve(defaults)?;
    let result = run_success_rate(&cfg)?;
    let mut out = output(cfg.out.as_deref())?;
    result.write_csv(&mut out)?;
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match &cli.command {
        Command::Codebook(a) => codebook(a),
        Command::Pattern(a) => pattern(a).map(|_| true),
        Command::Search(a) => search(a).map(|_| true),
        Command::McPower(a) => mc_power(a).map(|_| true),
        Command::McSuccess(a) => mc_success(a).map(|_| true),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match cli.threads {
        Some(t) => rayon::ThreadPoolBuilder::new().num_threads(t).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    };
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    match pool.install(|| run(cli)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
