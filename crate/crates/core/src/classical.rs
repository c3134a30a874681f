//! Classical correlation providers: coupling constants, thermal Metropolis
//! sampling and the low-rank SDP relaxation with hyperplane rounding.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use log::{debug, warn};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::cluster::LinkPolicy;
use crate::correlation::{dense_clipped, CorrelationMatrix, CorrelationSource};
use crate::error::{invalid, Error, Result};
use crate::instance::{magnetization, max_cut_value, Instance, SpinConfig};
use crate::rng::seeded;
use crate::scalar::Real;

/// Coupling-constant correlations: `Z_ij = J_ij` on edges, zero elsewhere, unit diagonal.
pub fn cc_correlations<R: Real>(inst: &Instance<R>) -> CorrelationMatrix<R> {
    let n = inst.n();
    let mut values = inst.coupling_matrix();
    let scale = inst
        .couplings()
        .iter()
        .fold(R::zero(), |m, c| m.max(c.abs()));
    // weights beyond unit magnitude are rescaled so entries stay in [-1, 1]
    if scale > R::one() {
        values.iter_mut().for_each(|v| *v /= scale);
    }
    for i in 0..n {
        values[i * n + i] = R::one();
    }
    dense_clipped(n, values, CorrelationSource::Cc)
}

/// Constant link probability replacing correlation-guided growth.
pub fn random_cluster_policy<R: Real>(p_const: f64) -> Result<LinkPolicy<R>> {
    LinkPolicy::constant(p_const)
}

/// Bitstrings drawn from some distribution over configurations.
#[derive(Clone, Debug)]
pub struct SampleSet<R> {
    pub samples: Vec<SpinConfig<R>>,
    /// Inverse temperature for thermal samples.
    pub beta_s: Option<f64>,
    /// Mean of `C(x) / C_ref` once a reference cut is attached.
    pub mean_approx_ratio: Option<f64>,
    /// Mean magnetization over the recorded samples.
    pub mean_magnetization: f64,
    /// Set when `|mean magnetization|` exceeds [`MAGNETIZATION_TOLERANCE`].
    pub equilibration_warning: bool,
}

/// Bound on `|<M>|` for a Z2-symmetric chain to be considered equilibrated.
pub const MAGNETIZATION_TOLERANCE: f64 = 0.01;

impl<R: Real> SampleSet<R> {
    pub fn new(samples: Vec<SpinConfig<R>>, beta_s: Option<f64>) -> Self {
        let mean_magnetization = if samples.is_empty() {
            0.0
        } else {
            samples.iter().map(|s| magnetization(s.spins())).sum::<f64>() / samples.len() as f64
        };
        Self {
            samples,
            beta_s,
            mean_approx_ratio: None,
            mean_magnetization,
            equilibration_warning: mean_magnetization.abs() > MAGNETIZATION_TOLERANCE,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Attaches the mean approximation ratio against a reference (optimal or best-known) cut.
    pub fn with_reference(mut self, inst: &Instance<R>, reference_cut: R) -> Result<Self> {
        if reference_cut <= R::zero() {
            return invalid("reference cut must be positive");
        }
        if self.samples.is_empty() {
            return invalid("empty sample set");
        }
        let mut total = 0.0;
        for s in &self.samples {
            total += (max_cut_value(inst, s.spins())? / reference_cut).as_f64();
        }
        self.mean_approx_ratio = Some(total / self.samples.len() as f64);
        Ok(self)
    }

    /// Text form: one metadata comment line, then one `+`/`-` string per sample.
    pub fn to_text(&self) -> String {
        let n = self.samples.first().map_or(0, |s| s.len());
        let beta = self.beta_s.map_or("none".to_string(), |b| b.to_string());
        let mut out = format!("# samples n={n} count={} beta_s={beta}\n", self.samples.len());
        for s in &self.samples {
            writeln!(out, "{}", s.to_sign_string()).unwrap();
        }
        out
    }

    pub fn from_text(inst: &Instance<R>, text: &str) -> Result<Self> {
        let mut beta_s = None;
        let mut samples = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if let Some(meta) = line.strip_prefix('#') {
                for kv in meta.split_whitespace() {
                    if let Some(b) = kv.strip_prefix("beta_s=") {
                        if b != "none" {
                            beta_s = Some(b.parse().map_err(|_| Error::Parse {
                                line: k + 1,
                                msg: format!("bad beta_s {b:?}"),
                            })?);
                        }
                    }
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let spins = line
                .chars()
                .map(|c| match c {
                    '+' => Ok(1i8),
                    '-' => Ok(-1i8),
                    _ => Err(Error::Parse {
                        line: k + 1,
                        msg: format!("unexpected character {c:?}"),
                    }),
                })
                .collect::<Result<Vec<i8>>>()?;
            samples.push(SpinConfig::new(inst, spins).map_err(|e| Error::Parse {
                line: k + 1,
                msg: e.to_string(),
            })?);
        }
        Ok(Self::new(samples, beta_s))
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read(inst: &Instance<R>, path: impl AsRef<Path>) -> Result<Self> {
        Self::from_text(inst, &fs::read_to_string(path)?)
    }
}

/// Metropolis chain settings, in sweeps of `n` proposals each.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MhOptions {
    pub burn_in: usize,
    pub thin: usize,
    pub n_samples: usize,
}

impl Default for MhOptions {
    fn default() -> Self {
        Self {
            burn_in: 1000,
            thin: 10,
            n_samples: 2000,
        }
    }
}

/// Single-spin Metropolis sampling at fixed `beta_s`.
///
/// Each sweep proposes `n` flips at uniformly random sites. After `burn_in` sweeps
/// a sample is recorded every `thin` sweeps.
pub fn mh_sample<R: Real>(inst: &Instance<R>, beta_s: f64, opts: MhOptions, seed: u64) -> Result<SampleSet<R>> {
    if !(beta_s >= 0.0 && beta_s.is_finite()) {
        return invalid(format!("beta_s must be finite and non-negative, got {beta_s}"));
    }
    if opts.n_samples == 0 {
        return invalid("n_samples must be at least 1");
    }
    if opts.thin == 0 {
        return invalid("thin must be at least 1");
    }
    let n = inst.n();
    if n == 0 {
        return invalid("instance has no vertices");
    }
    let mut rng = seeded(seed);
    let mut x = SpinConfig::random(inst, &mut rng);
    let sweep = |x: &mut SpinConfig<R>, rng: &mut crate::rng::SolverRng| {
        for _ in 0..n {
            let v = rng.random_range(0..n);
            let delta = inst.flip_delta(x.spins(), v);
            let d = delta.as_f64();
            if d <= 0.0 || rng.random::<f64>() < (-beta_s * d).exp() {
                x.flip_with_delta(&[v], delta);
            }
        }
    };
    for _ in 0..opts.burn_in {
        sweep(&mut x, &mut rng);
    }
    let mut samples = Vec::with_capacity(opts.n_samples);
    for _ in 0..opts.n_samples {
        for _ in 0..opts.thin {
            sweep(&mut x, &mut rng);
        }
        samples.push(x.clone());
    }
    let set = SampleSet::new(samples, Some(beta_s));
    if set.equilibration_warning {
        warn!(
            "beta_s = {beta_s}: |<M>| = {:.4} exceeds {MAGNETIZATION_TOLERANCE}",
            set.mean_magnetization.abs()
        );
    }
    Ok(set)
}

/// Empirical pair correlations `<x_i x_j>` over all vertex pairs.
pub fn mc_correlations<R: Real>(samples: &SampleSet<R>) -> Result<CorrelationMatrix<R>> {
    let first = samples.samples.first().ok_or_else(|| Error::InvalidParameter("empty sample set".into()))?;
    let n = first.len();
    let mut agree = vec![0u64; n * n];
    for s in &samples.samples {
        let x = s.spins();
        if x.len() != n {
            return invalid("samples of unequal length");
        }
        for i in 0..n {
            for j in i + 1..n {
                agree[i * n + j] += u64::from(x[i] == x[j]);
            }
        }
    }
    let total = samples.samples.len() as f64;
    let mut values = vec![R::zero(); n * n];
    for i in 0..n {
        values[i * n + i] = R::one();
        for j in i + 1..n {
            let a = agree[i * n + j] as f64;
            values[i * n + j] = R::lit((2.0 * a - total) / total);
        }
    }
    let beta_s = samples.beta_s.unwrap_or(f64::NAN);
    Ok(dense_clipped(n, values, CorrelationSource::Mc { beta_s }))
}

/// Settings for the low-rank SDP solver.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SdpOptions {
    /// Factor rank; `None` selects `ceil(sqrt(2n)) + 1`.
    pub rank: Option<usize>,
    pub max_sweeps: usize,
    /// Relative objective change below which the solver stops.
    pub tol: f64,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self {
            rank: None,
            max_sweeps: 10_000,
            tol: 1e-8,
        }
    }
}

pub fn default_sdp_rank(n: usize) -> usize {
    ((2.0 * n as f64).sqrt().ceil() as usize + 1).max(2)
}

/// Unit vectors maximizing the relaxed cut `1/2 sum A_ij (1 - v_i . v_j)`.
#[derive(Clone, Debug)]
pub struct SdpSolution<R> {
    rank: usize,
    /// Row-major `n x rank`.
    vectors: Vec<R>,
    pub objective: R,
    /// Objective after each sweep.
    pub history: Vec<R>,
    pub sweeps: usize,
    pub converged: bool,
}

impl<R: Real> SdpSolution<R> {
    pub fn n(&self) -> usize {
        self.vectors.len().checked_div(self.rank).unwrap_or(0)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn vector(&self, i: usize) -> &[R] {
        &self.vectors[i * self.rank..(i + 1) * self.rank]
    }

    pub fn dot(&self, i: usize, j: usize) -> R {
        self.vector(i).iter().zip(self.vector(j)).map(|(a, b)| *a * *b).sum()
    }

    /// Relaxed cut value of the current vectors.
    pub fn relaxed_cut(&self, inst: &Instance<R>) -> R {
        let half = R::lit(0.5);
        inst.edges()
            .iter()
            .map(|e| half * e.weight * (R::one() - self.dot(e.i, e.j)))
            .sum()
    }

    /// Applies a linear map to every vector (row-major `rank x rank`), e.g. a rotation.
    pub fn transformed(&self, map: &[R]) -> Self {
        let r = self.rank;
        assert_eq!(map.len(), r * r);
        let mut out = self.clone();
        for i in 0..self.n() {
            let v = self.vector(i);
            for a in 0..r {
                out.vectors[i * r + a] = (0..r).map(|b| map[a * r + b] * v[b]).sum();
            }
        }
        out
    }
}

fn random_unit<R: Real, G: Rng + ?Sized>(rng: &mut G, out: &mut [R]) {
    loop {
        for v in out.iter_mut() {
            *v = R::lit(rng.sample::<f64, _>(StandardNormal));
        }
        let norm = out.iter().map(|v| *v * *v).sum::<R>().sqrt();
        if norm > R::lit(1e-6) {
            out.iter_mut().for_each(|v| *v /= norm);
            return;
        }
    }
}

/// Cyclic coordinate ascent on the rank-`r` factor: `v_i <- -normalize(sum_j A_ij v_j)`.
///
/// Each update maximizes the objective in `v_i` exactly, so the objective never
/// decreases across sweeps. A vanishing update direction leaves the objective
/// independent of `v_i`; that vector is re-randomized.
pub fn sdp_solve<R: Real>(inst: &Instance<R>, opts: SdpOptions, seed: u64) -> Result<SdpSolution<R>> {
    let n = inst.n();
    let rank = opts.rank.unwrap_or_else(|| default_sdp_rank(n));
    if rank < 2 {
        return invalid(format!("rank must be at least 2, got {rank}"));
    }
    if opts.tol.is_nan() || opts.tol < 0.0 {
        return invalid("tolerance must be non-negative");
    }
    let mut rng = seeded(seed);
    let mut vectors = vec![R::zero(); n * rank];
    for i in 0..n {
        random_unit(&mut rng, &mut vectors[i * rank..(i + 1) * rank]);
    }
    let mut sol = SdpSolution {
        rank,
        vectors,
        objective: R::zero(),
        history: Vec::new(),
        sweeps: 0,
        converged: false,
    };
    sol.objective = sol.relaxed_cut(inst);
    let tiny = R::lit(1e-12);
    let mut g = vec![R::zero(); rank];
    for sweep in 0..opts.max_sweeps {
        for i in 0..n {
            g.iter_mut().for_each(|v| *v = R::zero());
            for &(j, e) in inst.neighbors(i) {
                let a = inst.edges()[e].weight;
                let vj = &sol.vectors[j * rank..(j + 1) * rank];
                g.iter_mut().zip(vj).for_each(|(gv, &x)| *gv += a * x);
            }
            let norm = g.iter().map(|v| *v * *v).sum::<R>().sqrt();
            let vi = &mut sol.vectors[i * rank..(i + 1) * rank];
            if norm <= tiny {
                debug!("sdp: zero update direction at vertex {i}, re-randomizing");
                random_unit(&mut rng, vi);
            } else {
                vi.iter_mut().zip(&g).for_each(|(v, gv)| *v = -*gv / norm);
            }
        }
        let obj = sol.relaxed_cut(inst);
        let change = (obj - sol.objective).abs();
        sol.objective = obj;
        sol.history.push(obj);
        sol.sweeps = sweep + 1;
        if change.as_f64() <= opts.tol * obj.abs().as_f64().max(1e-300) {
            sol.converged = true;
            break;
        }
    }
    Ok(sol)
}

/// Dense correlations `Z_ij = v_i . v_j`, clipped to `[-1, 1]`.
pub fn sdp_correlations<R: Real>(sol: &SdpSolution<R>) -> CorrelationMatrix<R> {
    let n = sol.n();
    let mut values = vec![R::zero(); n * n];
    for i in 0..n {
        values[i * n + i] = R::one();
        for j in i + 1..n {
            values[i * n + j] = sol.dot(i, j);
        }
    }
    dense_clipped(n, values, CorrelationSource::Sdp)
}

/// Outcome of repeated random-hyperplane rounding.
#[derive(Clone, Debug)]
pub struct GwRounding<R> {
    pub best: SpinConfig<R>,
    pub best_cut: R,
    pub mean_cut: f64,
    /// Standard error of `mean_cut`.
    pub std_err: f64,
    /// `mean_cut / objective`.
    pub rounding_ratio: f64,
}

/// Rounds the SDP vectors `n_rounds` times with `x_i = sign(v_i . g)`, `g ~ N(0, I_r)`; exact zero maps to `+1`.
pub fn gw_round<R: Real>(inst: &Instance<R>, sol: &SdpSolution<R>, n_rounds: usize, seed: u64) -> Result<GwRounding<R>> {
    if n_rounds == 0 {
        return invalid("n_rounds must be at least 1");
    }
    if sol.n() != inst.n() {
        return invalid("solution does not match instance size");
    }
    let mut rng = seeded(seed);
    let mut g = vec![R::zero(); sol.rank()];
    let mut best: Option<(R, Vec<i8>)> = None;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..n_rounds {
        for v in g.iter_mut() {
            *v = R::lit(rng.sample::<f64, _>(StandardNormal));
        }
        let x: Vec<i8> = (0..inst.n())
            .map(|i| {
                let s: R = sol.vector(i).iter().zip(&g).map(|(a, b)| *a * *b).sum();
                if s < R::zero() {
                    -1
                } else {
                    1
                }
            })
            .collect();
        let cut = max_cut_value(inst, &x)?;
        let c = cut.as_f64();
        sum += c;
        sum_sq += c * c;
        if best.as_ref().is_none_or(|(b, _)| cut > *b) {
            best = Some((cut, x));
        }
    }
    let k = n_rounds as f64;
    let mean = sum / k;
    let var = if n_rounds > 1 {
        ((sum_sq - k * mean * mean) / (k - 1.0)).max(0.0)
    } else {
        0.0
    };
    let (best_cut, x) = best.expect("at least one round");
    Ok(GwRounding {
        best: SpinConfig::new(inst, x)?,
        best_cut,
        mean_cut: mean,
        std_err: (var / k).sqrt(),
        rounding_ratio: mean / sol.objective.as_f64(),
    })
}
