//! Suite execution: references, correlation precomputation, lambda tuning,
//! the (arm, graph, budget, rep) cross product and its aggregates.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use anyhow::{anyhow, bail, ensure, Context, Result};
use ccmc_core::{
    acceptance_statistics_from_events, derive_seed, generate_regular, random_cluster_policy, read_instance, run_ca,
    run_sa, AcceptanceEvent, AnnealOptions, CorrelationMatrix64, Instance64, LinkPolicy, LinkPolicy64, RunRecord64,
};
use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Arm, ExperimentConfig, LambdaChoice, Method, SourceKind, SourceParam};
use crate::reference::{register_reference, ReferenceRecord, ReferenceStore, Registration};
use crate::sources::{correlations_for, SourceSettings};

/// Exact header of the per-run results file.
pub const RESULTS_HEADER: &str = "graph_id,method,source,param,lambda_scale,budget_m,rep,e_best,is_optimal,wall_ms,seed";
/// Exact header of the acceptance event log.
pub const ACCEPTANCE_HEADER: &str = "graph_id,source,param,rep,beta,cluster_size,delta_e,accepted";

// seed-derivation salts keep the streams of different stages disjoint
const SALT_GRAPH: u64 = 1;
const SALT_REFERENCE: u64 = 2;
const SALT_SOURCE: u64 = 3;
const SALT_TUNE: u64 = 4;
const SALT_CELL: u64 = 5;

/// A named instance.
#[derive(Clone, Debug)]
pub struct Graph {
    pub id: String,
    pub inst: Instance64,
}

/// One run of one arm on one graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub graph_id: String,
    pub method: String,
    pub source: String,
    pub param: String,
    pub lambda_scale: Option<f64>,
    /// Total iterations `m` (not the multiple of `n`).
    pub budget_m: u64,
    pub rep: usize,
    pub e_best: f64,
    pub is_optimal: bool,
    pub wall_ms: f64,
    pub seed: u64,
}

/// One recorded cluster-flip decision.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceRow {
    pub graph_id: String,
    pub source: String,
    pub param: String,
    pub rep: usize,
    pub beta: f64,
    pub cluster_size: usize,
    pub delta_e: f64,
    pub accepted: bool,
}

/// Percent-optimal across graphs at one budget.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub method: String,
    pub source: String,
    pub param: String,
    pub lambda_scale: Option<f64>,
    pub budget_mult: u64,
    pub graphs: usize,
    pub mean_pct_optimal: f64,
    /// Population standard deviation across graphs.
    pub std_pct_optimal: f64,
}

/// Acceptance-rate distribution of one arm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceSummaryRow {
    pub method: String,
    pub source: String,
    pub param: String,
    pub lambda_scale: Option<f64>,
    pub records: usize,
    pub skipped: usize,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub mean: f64,
}

/// Percent-optimal at one grid point of a tuning scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TuningRow {
    pub source: String,
    pub param: String,
    pub lambda_scale: f64,
    pub pct_optimal: f64,
    pub selected: bool,
}

/// Everything a suite produces.
#[derive(Clone, Debug, Default)]
pub struct SuiteOutput {
    pub rows: Vec<ResultRow>,
    pub summary: Vec<SummaryRow>,
    pub tuning: Vec<TuningRow>,
    pub acceptance: Vec<AcceptanceRow>,
    pub acceptance_summary: Vec<AcceptanceSummaryRow>,
    pub references: ReferenceStore,
}

/// Instances named by the config: generated graphs or files (id = file stem).
pub fn load_suite(cfg: &ExperimentConfig) -> Result<Vec<Graph>> {
    let spec = &cfg.instances;
    if !spec.files.is_empty() {
        return spec
            .files
            .iter()
            .map(|f| {
                let id = f
                    .file_stem()
                    .and_then(|s| s.to_str())
                    .ok_or_else(|| anyhow!("bad instance path {}", f.display()))?
                    .to_string();
                let inst = read_instance(f).with_context(|| format!("reading {}", f.display()))?;
                Ok(Graph { id, inst })
            })
            .collect();
    }
    let (n, d) = (spec.n.expect("validated"), spec.degree.expect("validated"));
    let base = spec.seed.unwrap_or(cfg.seed);
    generate_suite(n, d, spec.count, spec.weights.into(), base)
}

pub fn generate_suite(n: usize, d: usize, count: usize, weights: ccmc_core::WeightSet, seed: u64) -> Result<Vec<Graph>> {
    (0..count)
        .map(|k| {
            let inst = generate_regular(n, d, weights, derive_seed(seed, &[SALT_GRAPH, k as u64]))?;
            Ok(Graph {
                id: format!("n{n}_d{d}_{k:03}"),
                inst,
            })
        })
        .collect()
}

/// Reference energies for every graph, computed in parallel.
pub fn compute_references(graphs: &[Graph], cfg: &ExperimentConfig) -> Result<ReferenceStore> {
    let recs = graphs
        .par_iter()
        .enumerate()
        .map(|(g, graph)| {
            register_reference(
                &graph.id,
                &graph.inst,
                cfg.reference,
                derive_seed(cfg.seed, &[SALT_REFERENCE, g as u64]),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let mut store = ReferenceStore::new();
    for r in recs {
        store.register(r)?;
    }
    Ok(store)
}

/// Correlation matrices for each (graph, run spec), keyed by source parameter.
type CorrelationTable = HashMap<(usize, usize), Vec<(SourceParam, CorrelationMatrix64)>>;

fn precompute_correlations(graphs: &[Graph], cfg: &ExperimentConfig, arms: &[Arm]) -> Result<CorrelationTable> {
    let settings = SourceSettings::from(cfg);
    let mut jobs: Vec<(usize, usize, SourceKind, Vec<SourceParam>)> = Vec::new();
    for (spec, _) in cfg.runs.iter().enumerate() {
        let mut params: Vec<SourceParam> = Vec::new();
        let mut kind = None;
        for a in arms.iter().filter(|a| a.spec == spec) {
            kind = a.source;
            if !params.contains(&a.param) {
                params.push(a.param);
            }
        }
        if let Some(kind) = kind {
            for g in 0..graphs.len() {
                jobs.push((g, spec, kind, params.clone()));
            }
        }
    }
    let done = AtomicUsize::new(0);
    let total = jobs.len();
    let results = jobs
        .into_par_iter()
        .map(|(g, spec, kind, params)| {
            let seed = derive_seed(cfg.seed, &[SALT_SOURCE, g as u64, spec as u64]);
            let zs = correlations_for(&graphs[g].inst, kind, &params, &settings, seed)
                .with_context(|| format!("{} correlations for {}", kind, graphs[g].id))?;
            let k = done.fetch_add(1, Ordering::Relaxed) + 1;
            info!("correlations {k}/{total} ({kind} on {})", graphs[g].id);
            Ok(((g, spec), params.into_iter().zip(zs).collect()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(results.into_iter().collect())
}

fn correlation_for<'a>(table: &'a CorrelationTable, g: usize, arm: &Arm) -> Option<&'a CorrelationMatrix64> {
    table
        .get(&(g, arm.spec))
        .and_then(|v| v.iter().find(|(p, _)| *p == arm.param))
        .map(|(_, z)| z)
}

fn policy_for(inst: &Instance64, z: &CorrelationMatrix64, arm: &Arm, lambda: Option<f64>) -> Result<LinkPolicy64> {
    Ok(match (arm.source, arm.param) {
        (Some(SourceKind::Random), SourceParam::PConst(p)) => random_cluster_policy(p)?,
        _ => {
            let l = lambda.ok_or_else(|| anyhow!("no lambda_scale for a guided arm"))?;
            LinkPolicy::guided(inst, z, l)?.with_sign(arm.sign)
        }
    })
}

/// One annealing run of `arm` with `m` iterations.
pub fn run_arm(
    inst: &Instance64,
    arm: &Arm,
    z: Option<&CorrelationMatrix64>,
    policy: Option<&LinkPolicy64>,
    opts: AnnealOptions,
    seed: u64,
) -> Result<RunRecord64> {
    Ok(match arm.method {
        Method::Sa => run_sa(inst, opts, seed)?,
        Method::Ca => {
            let z = z.ok_or_else(|| anyhow!("missing correlations"))?;
            let policy = policy.ok_or_else(|| anyhow!("missing link policy"))?;
            run_ca(inst, z, policy, opts, seed)?
        }
    })
}

/// Best lambda scale for one arm and its scan table.
#[derive(Clone, Debug, PartialEq)]
pub struct TuneOutcome {
    pub best: f64,
    pub scan: Vec<(f64, f64)>,
}

/// Scans `grid` by percent-optimal over all graphs at `budget_mult * n` iterations.
///
/// Returns the argmax; ties go to the smallest scale. Every grid point reuses
/// the same per-run seeds.
#[allow(clippy::too_many_arguments)]
pub fn tune_lambda_scale(
    graphs: &[Graph],
    zs: &[&CorrelationMatrix64],
    refs: &ReferenceStore,
    arm: &Arm,
    grid: &[f64],
    budget_mult: u64,
    reps: usize,
    beta_f: f64,
    seed: u64,
) -> Result<TuneOutcome> {
    ensure!(!grid.is_empty(), "empty lambda grid");
    ensure!(zs.len() == graphs.len(), "one correlation matrix per graph is required");
    let targets = graphs
        .iter()
        .map(|g| {
            refs.get(&g.id)
                .map(|r| r.energy)
                .ok_or_else(|| anyhow!("no reference registered for {}", g.id))
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    if sorted.len() == 1 {
        return Ok(TuneOutcome {
            best: sorted[0],
            scan: vec![(sorted[0], f64::NAN)],
        });
    }
    let mut scan = Vec::with_capacity(sorted.len());
    for &lambda in &sorted {
        let hits = graphs
            .par_iter()
            .enumerate()
            .map(|(g, graph)| -> Result<usize> {
                let policy = policy_for(&graph.inst, zs[g], arm, Some(lambda))?;
                let opts = AnnealOptions {
                    record_window: None,
                    ..AnnealOptions::new(beta_f, budget_mult * graph.inst.n() as u64)
                };
                let mut hits = 0;
                for rep in 0..reps {
                    let s = derive_seed(seed, &[g as u64, rep as u64]);
                    let r = run_arm(&graph.inst, arm, Some(zs[g]), Some(&policy), opts, s)?;
                    hits += usize::from(r.e_best == targets[g]);
                }
                Ok(hits)
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .sum::<usize>();
        let pct = 100.0 * hits as f64 / (graphs.len() * reps).max(1) as f64;
        scan.push((lambda, pct));
    }
    let mut best = scan[0];
    for &(l, p) in &scan[1..] {
        if p > best.1 {
            best = (l, p);
        }
    }
    Ok(TuneOutcome { best: best.0, scan })
}

/// Sets `is_optimal` from the store; rows without a reference stay unflagged.
pub fn rederive_is_optimal(rows: &mut [ResultRow], refs: &ReferenceStore) {
    for r in rows {
        r.is_optimal = refs.get(&r.graph_id).is_some_and(|x| r.e_best == x.energy);
    }
}

/// Registers any energies below uncertified references, then re-derives flags.
pub fn absorb_improvements(rows: &mut [ResultRow], refs: &mut ReferenceStore) -> Result<usize> {
    let mut best: HashMap<&str, f64> = HashMap::new();
    for r in rows.iter() {
        let e = best.entry(r.graph_id.as_str()).or_insert(f64::INFINITY);
        *e = e.min(r.e_best);
    }
    let mut improved = 0;
    let mut ids: Vec<(&str, f64)> = best.into_iter().collect();
    ids.sort_by(|a, b| a.0.cmp(b.0));
    let updates: Vec<ReferenceRecord> = ids
        .into_iter()
        .filter(|(id, e)| refs.get(id).is_some_and(|x| *e < x.energy))
        .map(|(id, e)| ReferenceRecord {
            graph_id: id.to_string(),
            energy: e,
            certified: false,
            method: "suite".into(),
        })
        .collect();
    for u in updates {
        if refs.register(u)? == Registration::Improved {
            improved += 1;
        }
    }
    rederive_is_optimal(rows, refs);
    Ok(improved)
}

struct Cell {
    arm: usize,
    graph: usize,
    budget: usize,
    rep: usize,
}

/// Runs the full cross product of the config.
///
/// Per-cell seeds depend only on the master seed and the cell coordinates, so
/// the row set does not depend on scheduling. On a worker failure the rows that
/// did complete are returned alongside the error.
pub fn run_suite(cfg: &ExperimentConfig) -> std::result::Result<SuiteOutput, (SuiteOutput, anyhow::Error)> {
    let fail = |e: anyhow::Error| (SuiteOutput::default(), e);
    let graphs = load_suite(cfg).map_err(fail)?;
    let arms = cfg.arms();
    let mut out = SuiteOutput::default();
    if cfg.reps == 0 || graphs.is_empty() || arms.is_empty() {
        return Ok(out);
    }
    info!("{} graphs, {} arms, budgets {:?}, {} reps", graphs.len(), arms.len(), cfg.budgets, cfg.reps);
    out.references = compute_references(&graphs, cfg).map_err(fail)?;
    let table = precompute_correlations(&graphs, cfg, &arms).map_err(fail)?;

    // resolve lambda scales
    let mut lambdas: Vec<Option<f64>> = Vec::with_capacity(arms.len());
    for (a, arm) in arms.iter().enumerate() {
        lambdas.push(match arm.lambda {
            LambdaChoice::NotApplicable => None,
            LambdaChoice::Fixed(l) => Some(l),
            LambdaChoice::Tuned => {
                let zs: Vec<&CorrelationMatrix64> = (0..graphs.len())
                    .map(|g| correlation_for(&table, g, arm).expect("precomputed"))
                    .collect();
                let grid = if arm.source.is_some_and(SourceKind::is_qaoa) {
                    &cfg.tuning.qaoa_grid
                } else {
                    &cfg.tuning.grid
                };
                let t = tune_lambda_scale(
                    &graphs,
                    &zs,
                    &out.references,
                    arm,
                    grid,
                    cfg.tuning.budget,
                    cfg.tuning.reps,
                    cfg.beta_f,
                    derive_seed(cfg.seed, &[SALT_TUNE, a as u64]),
                )
                .map_err(fail)?;
                info!("{} {}: tuned lambda_scale = {}", arm.source_tag(), arm.param, t.best);
                for &(l, p) in &t.scan {
                    out.tuning.push(TuningRow {
                        source: arm.source_tag().into(),
                        param: arm.param.to_string(),
                        lambda_scale: l,
                        pct_optimal: p,
                        selected: l == t.best,
                    });
                }
                Some(t.best)
            }
        });
    }

    // link policies per (arm, graph)
    let mut policies: HashMap<(usize, usize), LinkPolicy64> = HashMap::new();
    for (a, arm) in arms.iter().enumerate() {
        if arm.method == Method::Ca {
            for (g, graph) in graphs.iter().enumerate() {
                let z = correlation_for(&table, g, arm).expect("precomputed");
                policies.insert((a, g), policy_for(&graph.inst, z, arm, lambdas[a]).map_err(fail)?);
            }
        }
    }

    let acc_budget = cfg.acceptance_budget();
    let window = (cfg.acceptance.window[0], cfg.acceptance.window[1]);
    let mut cells = Vec::new();
    for a in 0..arms.len() {
        for g in 0..graphs.len() {
            for b in 0..cfg.budgets.len() {
                for rep in 0..cfg.reps {
                    cells.push(Cell {
                        arm: a,
                        graph: g,
                        budget: b,
                        rep,
                    });
                }
            }
        }
    }
    let total = cells.len();
    let done = AtomicUsize::new(0);
    let results: Vec<Result<(ResultRow, Vec<AcceptanceEvent<f64>>)>> = cells
        .par_iter()
        .map(|c| {
            let arm = &arms[c.arm];
            let graph = &graphs[c.graph];
            let mult = cfg.budgets[c.budget];
            let m = mult * graph.inst.n() as u64;
            let logged = cfg.acceptance.record && mult == acc_budget;
            let opts = AnnealOptions {
                record_window: logged.then_some(window),
                ..AnnealOptions::new(cfg.beta_f, m)
            };
            let seed = derive_seed(
                cfg.seed,
                &[SALT_CELL, c.arm as u64, c.graph as u64, c.budget as u64, c.rep as u64],
            );
            let z = correlation_for(&table, c.graph, arm);
            let r = run_arm(&graph.inst, arm, z, policies.get(&(c.arm, c.graph)), opts, seed)
                .with_context(|| format!("{} {} on {} rep {}", arm.method, arm.source_tag(), graph.id, c.rep))?;
            let k = done.fetch_add(1, Ordering::Relaxed) + 1;
            if k.is_multiple_of((total / 10).max(1)) {
                info!("runs {k}/{total}");
            }
            let row = ResultRow {
                graph_id: graph.id.clone(),
                method: arm.method.to_string(),
                source: arm.source_tag().into(),
                param: arm.param.to_string(),
                lambda_scale: lambdas[c.arm],
                budget_m: m,
                rep: c.rep,
                e_best: r.e_best,
                is_optimal: false,
                wall_ms: r.wall_time.as_secs_f64() * 1e3,
                seed,
            };
            Ok((row, if logged { r.acceptance_events } else { Vec::new() }))
        })
        .collect();

    let mut first_error = None;
    let mut coords = Vec::with_capacity(cells.len());
    let mut events: Vec<(usize, usize, usize, Vec<AcceptanceEvent<f64>>)> = Vec::new();
    for (c, res) in cells.iter().zip(results) {
        match res {
            Ok((row, ev)) => {
                if cfg.acceptance.record && cfg.budgets[c.budget] == acc_budget {
                    events.push((c.arm, c.graph, c.rep, ev));
                }
                out.rows.push(row);
                coords.push((c.arm, c.graph, c.budget));
            }
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    if let Err(e) = absorb_improvements(&mut out.rows, &mut out.references) {
        first_error.get_or_insert(e);
    }
    out.summary = summarize(&out.rows, &coords, &arms, &lambdas, graphs.len(), &cfg.budgets);
    for (a, g, rep, ev) in &events {
        let arm = &arms[*a];
        let source = if arm.method == Method::Sa { "SA" } else { arm.source_tag() };
        out.acceptance.extend(ev.iter().map(|e| AcceptanceRow {
            graph_id: graphs[*g].id.clone(),
            source: source.into(),
            param: arm.param.to_string(),
            rep: *rep,
            beta: e.beta,
            cluster_size: e.cluster_size,
            delta_e: e.delta_e,
            accepted: e.accepted,
        }));
    }
    if cfg.acceptance.record {
        for (a, arm) in arms.iter().enumerate() {
            let per_run: Vec<&[AcceptanceEvent<f64>]> = events
                .iter()
                .filter(|(x, ..)| *x == a)
                .map(|(.., ev)| ev.as_slice())
                .collect();
            match acceptance_statistics_from_events(&per_run, window) {
                Ok(s) => out.acceptance_summary.push(AcceptanceSummaryRow {
                    method: arm.method.to_string(),
                    source: arm.source_tag().into(),
                    param: arm.param.to_string(),
                    lambda_scale: lambdas[a],
                    records: s.rates.len(),
                    skipped: s.skipped,
                    median: s.median,
                    q1: s.q1,
                    q3: s.q3,
                    mean: s.mean,
                }),
                Err(e) => warn!("{} {}: {e}", arm.source_tag(), arm.param),
            }
        }
    }
    match first_error {
        None => Ok(out),
        Some(e) => Err((out, e)),
    }
}

fn summarize(
    rows: &[ResultRow],
    coords: &[(usize, usize, usize)],
    arms: &[Arm],
    lambdas: &[Option<f64>],
    graphs: usize,
    budgets: &[u64],
) -> Vec<SummaryRow> {
    let mut hits: HashMap<(usize, usize, usize), (usize, usize)> = HashMap::new();
    for (r, &c) in rows.iter().zip(coords) {
        let e = hits.entry(c).or_default();
        e.0 += usize::from(r.is_optimal);
        e.1 += 1;
    }
    let mut out = Vec::new();
    for (a, arm) in arms.iter().enumerate() {
        for (b, &mult) in budgets.iter().enumerate() {
            let pcts: Vec<f64> = (0..graphs)
                .filter_map(|g| hits.get(&(a, g, b)).map(|&(h, n)| 100.0 * h as f64 / n as f64))
                .collect();
            if pcts.is_empty() {
                continue;
            }
            let (mean, std) = mean_and_population_std(&pcts);
            out.push(SummaryRow {
                method: arm.method.to_string(),
                source: arm.source_tag().into(),
                param: arm.param.to_string(),
                lambda_scale: lambdas[a],
                budget_mult: mult,
                graphs: pcts.len(),
                mean_pct_optimal: mean,
                std_pct_optimal: std,
            });
        }
    }
    out
}

pub fn mean_and_population_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T], header: Option<&str>) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(header.is_none())
        .from_path(path)
        .with_context(|| format!("writing {}", path.display()))?;
    if let Some(h) = header {
        w.write_record(h.split(','))?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_results(path: &Path, rows: &[ResultRow]) -> Result<()> {
    write_csv(path, rows, Some(RESULTS_HEADER))
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    let mut rdr = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let header: Vec<String> = rdr.headers()?.iter().map(String::from).collect();
    ensure!(header.join(",") == RESULTS_HEADER, "unexpected results header {:?}", header.join(","));
    rdr.deserialize().map(|r| r.map_err(Into::into)).collect()
}

pub fn write_acceptance(path: &Path, rows: &[AcceptanceRow]) -> Result<()> {
    write_csv(path, rows, Some(ACCEPTANCE_HEADER))
}

/// Writes every non-empty table of `out` into `dir`; returns the paths written.
pub fn write_outputs(out: &SuiteOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = Vec::new();
    let p = dir.join("results.csv");
    write_results(&p, &out.rows)?;
    written.push(p);
    let p = dir.join("summary.csv");
    write_csv(&p, &out.summary, None)?;
    written.push(p);
    if !out.references.is_empty() {
        let p = dir.join("references.csv");
        out.references.write(&p)?;
        written.push(p);
    }
    if !out.tuning.is_empty() {
        let p = dir.join("tuning.csv");
        write_csv(&p, &out.tuning, None)?;
        written.push(p);
    }
    if !out.acceptance_summary.is_empty() || !out.acceptance.is_empty() {
        let p = dir.join("acceptance.csv");
        write_acceptance(&p, &out.acceptance)?;
        written.push(p);
        let p = dir.join("acceptance_summary.csv");
        write_csv(&p, &out.acceptance_summary, None)?;
        written.push(p);
    }
    Ok(written)
}

/// Fails unless every row flagged optimal matches its reference exactly.
pub fn check_optimal_flags(rows: &[ResultRow], refs: &ReferenceStore) -> Result<()> {
    for r in rows {
        let reference = refs.get(&r.graph_id).map(|x| x.energy);
        if r.is_optimal && reference != Some(r.e_best) {
            bail!("{} rep {} flagged optimal with e_best {} vs {:?}", r.graph_id, r.rep, r.e_best, reference);
        }
    }
    Ok(())
}
