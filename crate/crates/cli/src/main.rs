use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use ccmc::bench::{self, Graph, ResultRow};
use ccmc::config::{
    Arm, ExperimentConfig, LambdaChoice, Method, ReferenceMethod, SignSpec, SourceKind, SourceParam, WeightSpec,
};
use ccmc::hist::{correlation_histogram, hist_rows, EdgeFilter};
use ccmc::reference::{register_reference, ReferenceStore};
use ccmc::sources::{correlations_for, SourceSettings};
use ccmc_core::{
    random_cluster_policy, read_instance, write_instance, AnnealOptions, CorrelationMatrix, CorrelationMatrix64,
    LinkPolicy, MhOptions, QaoaOptimizeOptions,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};

#[derive(Parser)]
#[command(name = "ccmc", version, about = "Correlation-guided cluster Monte Carlo for Max-Cut and Ising spin glasses")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Global {
    /// Master seed (overrides the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory (overrides the config file).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a suite of random regular instances.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        degree: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, value_enum, default_value_t = Weights::Pm1)]
        weights: Weights,
    },
    /// Compute reference optima and merge them into references.csv.
    Exact {
        #[arg(required = true)]
        instances: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = RefMethod::Auto)]
        method: RefMethod,
    },
    /// Precompute a correlation matrix.
    Corr {
        #[arg(value_enum)]
        source: CorrSource,
        instance: PathBuf,
        #[command(flatten)]
        params: SourceArgs,
        /// Output file; defaults to <out-dir>/<stem>.<source>.corr
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run one annealer once and print its result row.
    Run {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = RunMethod::Ca)]
        method: RunMethod,
        #[arg(long, value_enum, conflicts_with = "corr")]
        source: Option<RunSource>,
        /// Precomputed correlation file.
        #[arg(long)]
        corr: Option<PathBuf>,
        #[command(flatten)]
        params: SourceArgs,
        #[arg(long, default_value_t = 1.0)]
        lambda_scale: f64,
        #[arg(long, default_value_t = 0.2)]
        p_const: f64,
        /// Iteration budget as a multiple of n.
        #[arg(long, default_value_t = 100)]
        budget: u64,
        #[arg(long, default_value_t = 8.0)]
        beta_f: f64,
        #[arg(long, value_enum, default_value_t = Sign::Literal)]
        link_sign: Sign,
        /// Write the acceptance events of the run to this CSV.
        #[arg(long)]
        events: Option<PathBuf>,
    },
    /// Run a benchmark suite from a config file.
    Bench(SuiteArgs),
    /// Correlation histograms over edges selected by coupling sign.
    Hist {
        #[arg(long, required = true, num_args = 1..)]
        instance: Vec<PathBuf>,
        /// Correlation files, one per instance.
        #[arg(long, conflicts_with = "source", num_args = 1..)]
        corr: Vec<PathBuf>,
        /// Compute correlations on the fly instead.
        #[arg(long, value_enum)]
        source: Option<CorrSource>,
        /// Sampling inverse temperatures (mc), one histogram each.
        #[arg(long, value_delimiter = ',')]
        beta_s: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        depth: Vec<usize>,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = EdgeFilter::Positive)]
        filter: EdgeFilter,
        /// Output CSV; defaults to <out-dir>/hist.csv
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run a suite with acceptance logging and summarize acceptance rates.
    Accept(SuiteArgs),
}

#[derive(Args, Clone)]
struct SuiteArgs {
    #[arg(long)]
    config: PathBuf,
    /// Override any config key: --set dotted.key=<toml value>
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long)]
    reps: Option<usize>,
    /// Budgets as multiples of n, comma separated.
    #[arg(long, value_delimiter = ',')]
    budgets: Vec<u64>,
}

#[derive(Args, Clone)]
struct SourceArgs {
    #[arg(long)]
    beta_s: Option<f64>,
    #[arg(long)]
    depth: Option<usize>,
    /// Metropolis samples (mc).
    #[arg(long, default_value_t = 2000)]
    samples: usize,
    /// Optimizer restarts (qaoa).
    #[arg(long, default_value_t = 10)]
    restarts: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Weights {
    Pm1,
    Unit,
}

#[derive(Clone, Copy, ValueEnum)]
enum RefMethod {
    Auto,
    BruteForce,
    LongSa,
}

#[derive(Clone, Copy, ValueEnum)]
enum CorrSource {
    Cc,
    Mc,
    Sdp,
    QaoaSim,
    QaoaP1,
}

#[derive(Clone, Copy, ValueEnum)]
enum RunSource {
    Cc,
    Random,
    Mc,
    Sdp,
    QaoaSim,
    QaoaP1,
}

#[derive(Clone, Copy, ValueEnum)]
enum RunMethod {
    Sa,
    Ca,
}

#[derive(Clone, Copy, ValueEnum)]
enum Sign {
    Literal,
    Aligned,
}

impl From<CorrSource> for SourceKind {
    fn from(s: CorrSource) -> Self {
        match s {
            CorrSource::Cc => Self::Cc,
            CorrSource::Mc => Self::Mc,
            CorrSource::Sdp => Self::Sdp,
            CorrSource::QaoaSim => Self::Qaoa,
            CorrSource::QaoaP1 => Self::QaoaP1,
        }
    }
}

impl From<RunSource> for SourceKind {
    fn from(s: RunSource) -> Self {
        match s {
            RunSource::Cc => Self::Cc,
            RunSource::Random => Self::Random,
            RunSource::Mc => Self::Mc,
            RunSource::Sdp => Self::Sdp,
            RunSource::QaoaSim => Self::Qaoa,
            RunSource::QaoaP1 => Self::QaoaP1,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if let Some(t) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let g = cli.global;
    let seed = g.seed.unwrap_or(0);
    let out_dir = g.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    match cli.command {
        Command::Gen {
            n,
            degree,
            count,
            weights,
        } => {
            let w = match weights {
                Weights::Pm1 => WeightSpec::Pm1,
                Weights::Unit => WeightSpec::Unit,
            };
            fs::create_dir_all(&out_dir)?;
            for graph in bench::generate_suite(n, degree, count, w.into(), seed)? {
                let path = out_dir.join(format!("{}.txt", graph.id));
                write_instance(&graph.inst, &path)?;
                println!("{}", path.display());
            }
            Ok(())
        }
        Command::Exact { instances, method } => {
            let method = match method {
                RefMethod::Auto => ReferenceMethod::Auto,
                RefMethod::BruteForce => ReferenceMethod::BruteForce,
                RefMethod::LongSa => ReferenceMethod::LongSa,
            };
            fs::create_dir_all(&out_dir)?;
            let store_path = out_dir.join("references.csv");
            let mut store = if store_path.exists() {
                ReferenceStore::read(&store_path)?
            } else {
                ReferenceStore::new()
            };
            for (k, path) in instances.iter().enumerate() {
                let graph = load_graph(path)?;
                let rec = register_reference(&graph.id, &graph.inst, method, ccmc_core::derive_seed(seed, &[k as u64]))?;
                println!(
                    "{}\t{}\t{}",
                    rec.graph_id,
                    rec.energy,
                    if rec.certified { "certified" } else { "uncertified" }
                );
                store.register(rec)?;
            }
            store.write(&store_path)?;
            info!("wrote {}", store_path.display());
            Ok(())
        }
        Command::Corr {
            source,
            instance,
            params,
            output,
        } => {
            let graph = load_graph(&instance)?;
            let kind: SourceKind = source.into();
            let param = source_param(kind, &params)?;
            let settings = settings_from(&params);
            let z = &correlations_for(&graph.inst, kind, &[param], &settings, seed)?[0];
            let path = output.unwrap_or_else(|| out_dir.join(format!("{}.{}.corr", graph.id, kind.tag().to_lowercase())));
            if let Some(dir) = path.parent() {
                fs::create_dir_all(dir)?;
            }
            z.write(&path)?;
            println!("{}", path.display());
            Ok(())
        }
        Command::Run {
            instance,
            method,
            source,
            corr,
            params,
            lambda_scale,
            p_const,
            budget,
            beta_f,
            link_sign,
            events,
        } => {
            let graph = load_graph(&instance)?;
            let inst = &graph.inst;
            let sign = match link_sign {
                Sign::Literal => SignSpec::Literal,
                Sign::Aligned => SignSpec::Aligned,
            };
            let (method, kind, z): (Method, Option<SourceKind>, Option<CorrelationMatrix64>) = match method {
                RunMethod::Sa => (Method::Sa, None, None),
                RunMethod::Ca => {
                    if let Some(path) = corr {
                        let z = CorrelationMatrix::read(&path)?;
                        ensure!(z.n() == inst.n(), "correlation file is for n = {}, instance has {}", z.n(), inst.n());
                        (Method::Ca, None, Some(z))
                    } else {
                        let kind: SourceKind = source.unwrap_or(RunSource::Cc).into();
                        let param = if kind == SourceKind::Random {
                            SourceParam::PConst(p_const)
                        } else {
                            source_param(kind, &params)?
                        };
                        let z = correlations_for(inst, kind, &[param], &settings_from(&params), seed)?.remove(0);
                        (Method::Ca, Some(kind), Some(z))
                    }
                }
            };
            let policy = match (&z, kind) {
                (Some(_), Some(SourceKind::Random)) => Some(random_cluster_policy(p_const)?),
                (Some(z), _) => Some(LinkPolicy::guided(inst, z, lambda_scale)?.with_sign(sign.into())),
                (None, _) => None,
            };
            let arm = Arm {
                spec: 0,
                method,
                source: kind,
                param: SourceParam::None,
                lambda: LambdaChoice::Fixed(lambda_scale),
                sign: sign.into(),
            };
            let m = budget * inst.n() as u64;
            let opts = AnnealOptions::new(beta_f, m);
            let r = bench::run_arm(inst, &arm, z.as_ref(), policy.as_ref(), opts, seed)?;
            let (source_tag, param_tag) = match (method, kind, &z) {
                (Method::Sa, ..) => ("NONE".to_string(), String::new()),
                (_, Some(k), Some(z)) if k != SourceKind::Random => (k.tag().to_string(), split_source(z).1),
                (_, Some(k), _) => (k.tag().to_string(), format!("{p_const}")),
                (_, None, Some(z)) => split_source(z),
                _ => unreachable!(),
            };
            let row = ResultRow {
                graph_id: graph.id.clone(),
                method: method.to_string(),
                source: source_tag.clone(),
                param: param_tag.clone(),
                lambda_scale: (method == Method::Ca && kind != Some(SourceKind::Random)).then_some(lambda_scale),
                budget_m: m,
                rep: 0,
                e_best: r.e_best,
                is_optimal: false,
                wall_ms: r.wall_time.as_secs_f64() * 1e3,
                seed,
            };
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(std::io::stdout());
            w.write_record(ccmc::RESULTS_HEADER.split(','))?;
            w.serialize(&row)?;
            w.flush()?;
            eprintln!("best configuration: {}", r.x_best.to_sign_string());
            if let Some(path) = events {
                let rows: Vec<_> = r
                    .acceptance_events
                    .iter()
                    .map(|e| bench::AcceptanceRow {
                        graph_id: graph.id.clone(),
                        source: if method == Method::Sa { "SA".into() } else { source_tag.clone() },
                        param: param_tag.clone(),
                        rep: 0,
                        beta: e.beta,
                        cluster_size: e.cluster_size,
                        delta_e: e.delta_e,
                        accepted: e.accepted,
                    })
                    .collect();
                bench::write_acceptance(&path, &rows)?;
            }
            Ok(())
        }
        Command::Bench(args) => suite(&g, &args, false),
        Command::Accept(args) => suite(&g, &args, true),
        Command::Hist {
            instance,
            corr,
            source,
            beta_s,
            depth,
            samples,
            filter,
            output,
        } => {
            let mut rows = Vec::new();
            if !corr.is_empty() {
                ensure!(corr.len() == instance.len(), "give one --corr per --instance");
                for (ip, cp) in instance.iter().zip(&corr) {
                    let graph = load_graph(ip)?;
                    let z = CorrelationMatrix::read(cp)?;
                    ensure!(z.n() == graph.inst.n(), "{} does not match {}", cp.display(), ip.display());
                    let h = correlation_histogram(&z, &graph.inst, filter);
                    let (tag, param) = split_source(&z);
                    rows.extend(hist_rows(&graph.id, &tag, &param, &h));
                }
            } else {
                let Some(source) = source else {
                    bail!("give either --corr files or --source");
                };
                let kind: SourceKind = source.into();
                let params: Vec<SourceParam> = match kind {
                    SourceKind::Mc => beta_s.iter().map(|&b| SourceParam::BetaS(b)).collect(),
                    SourceKind::Qaoa => depth.iter().map(|&p| SourceParam::Depth(p)).collect(),
                    SourceKind::QaoaP1 => vec![SourceParam::Depth(1)],
                    _ => vec![SourceParam::None],
                };
                ensure!(!params.is_empty(), "mc needs --beta-s and qaoa-sim needs --depth");
                let settings = SourceSettings {
                    mh: MhOptions {
                        n_samples: samples,
                        ..Default::default()
                    },
                    ..Default::default()
                };
                for (k, ip) in instance.iter().enumerate() {
                    let graph = load_graph(ip)?;
                    let zs = correlations_for(&graph.inst, kind, &params, &settings, ccmc_core::derive_seed(seed, &[k as u64]))?;
                    for (p, z) in params.iter().zip(&zs) {
                        let h = correlation_histogram(z, &graph.inst, filter);
                        rows.extend(hist_rows(&graph.id, kind.tag(), &p.to_string(), &h));
                    }
                }
            }
            let path = output.unwrap_or_else(|| out_dir.join("hist.csv"));
            if let Some(dir) = path.parent() {
                fs::create_dir_all(dir)?;
            }
            let mut w = csv::Writer::from_path(&path)?;
            for r in &rows {
                w.serialize(r)?;
            }
            w.flush()?;
            println!("{}", path.display());
            Ok(())
        }
    }
}

fn suite(g: &Global, args: &SuiteArgs, acceptance: bool) -> Result<()> {
    let mut overrides = args.overrides.clone();
    if let Some(s) = g.seed {
        overrides.push(format!("seed={s}"));
    }
    if let Some(r) = args.reps {
        overrides.push(format!("reps={r}"));
    }
    if !args.budgets.is_empty() {
        let list: Vec<String> = args.budgets.iter().map(u64::to_string).collect();
        overrides.push(format!("budgets=[{}]", list.join(",")));
    }
    if acceptance {
        overrides.push("acceptance.record=true".into());
    }
    let cfg = ExperimentConfig::read(&args.config, &overrides)?;
    let dir = g
        .out_dir
        .clone()
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    let (out, err) = match bench::run_suite(&cfg) {
        Ok(out) => (out, None),
        Err((out, e)) => (out, Some(e)),
    };
    let written = bench::write_outputs(&out, &dir)?;
    fs::write(dir.join("config.resolved.toml"), cfg.to_toml())?;
    for p in &written {
        info!("wrote {}", p.display());
    }
    let mut stdout = std::io::stdout().lock();
    if acceptance {
        writeln!(stdout, "method\tsource\tparam\tlambda\trecords\tmedian\tq1\tq3")?;
        for s in &out.acceptance_summary {
            writeln!(
                stdout,
                "{}\t{}\t{}\t{}\t{}\t{:.4}\t{:.4}\t{:.4}",
                s.method,
                s.source,
                s.param,
                s.lambda_scale.map_or(String::new(), |l| l.to_string()),
                s.records,
                s.median,
                s.q1,
                s.q3
            )?;
        }
    } else {
        writeln!(stdout, "method\tsource\tparam\tlambda\tbudget\tpct_optimal\tstd")?;
        for s in &out.summary {
            writeln!(
                stdout,
                "{}\t{}\t{}\t{}\t{}n\t{:.2}\t{:.2}",
                s.method,
                s.source,
                s.param,
                s.lambda_scale.map_or(String::new(), |l| l.to_string()),
                s.budget_mult,
                s.mean_pct_optimal,
                s.std_pct_optimal
            )?;
        }
    }
    if let Some(e) = err {
        warn!("suite stopped early; {} rows were written", out.rows.len());
        return Err(e);
    }
    Ok(())
}

fn load_graph(path: &Path) -> Result<Graph> {
    let id = path
        .file_stem()
        .and_then(|s| s.to_str())
        .with_context(|| format!("bad instance path {}", path.display()))?
        .to_string();
    let inst = read_instance(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Graph { id, inst })
}

fn source_param(kind: SourceKind, args: &SourceArgs) -> Result<SourceParam> {
    Ok(match kind {
        SourceKind::Mc => SourceParam::BetaS(args.beta_s.context("mc needs --beta-s")?),
        SourceKind::Qaoa => SourceParam::Depth(args.depth.context("qaoa-sim needs --depth")?),
        SourceKind::QaoaP1 => {
            ensure!(args.depth.unwrap_or(1) == 1, "qaoa-p1 is depth one only");
            SourceParam::Depth(1)
        }
        _ => SourceParam::None,
    })
}

fn settings_from(args: &SourceArgs) -> SourceSettings {
    SourceSettings {
        mh: MhOptions {
            n_samples: args.samples,
            ..Default::default()
        },
        qaoa: QaoaOptimizeOptions {
            restarts: args.restarts,
            ..Default::default()
        },
        ..Default::default()
    }
}

/// `("MC", "0.5")` from a matrix tagged `MC 0.5`.
fn split_source(z: &CorrelationMatrix64) -> (String, String) {
    let s = z.source().to_string();
    match s.split_once(' ') {
        Some((a, b)) => (a.to_string(), b.to_string()),
        None => (s, String::new()),
    }
}
