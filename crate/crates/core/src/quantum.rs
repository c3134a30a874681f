//! QAOA correlations from a statevector simulation, plus the closed-form
//! depth-one correlations used as an independent check.
//!
//! Conventions: cost `H_C = -sum J_ij Z_i Z_j - sum h_i Z_i`, mixer
//! `H_M = -sum X_i`, state `U_M(b_p) U_C(g_p) ... U_M(b_1) U_C(g_1) |+>^n` with
//! `U(t) = exp(-i t H)`. Basis index bit `k` set means `x_k = -1`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex;
use rand::Rng;
use rayon::prelude::*;

use crate::classical::SampleSet;
use crate::correlation::{dense_clipped, CorrelationMatrix, CorrelationSource};
use crate::error::{invalid, Error, Result};
use crate::instance::{Instance, SpinConfig};
use crate::rng::seeded;
use crate::scalar::Real;

/// Largest instance the statevector simulator accepts.
pub const QAOA_MAX_N: usize = 24;
/// Largest supported circuit depth.
pub const QAOA_MAX_DEPTH: usize = 10;

const PARALLEL_MIN_QUBITS: usize = 14;

/// Mixer angles `betas` and cost angles `gammas`, one pair per layer.
#[derive(Clone, Debug, PartialEq)]
pub struct QaoaParams<R> {
    pub betas: Vec<R>,
    pub gammas: Vec<R>,
}

impl<R: Real> QaoaParams<R> {
    pub fn new(betas: Vec<R>, gammas: Vec<R>) -> Result<Self> {
        if betas.len() != gammas.len() {
            return invalid(format!("{} betas but {} gammas", betas.len(), gammas.len()));
        }
        if betas.iter().chain(&gammas).any(|a| !a.is_finite()) {
            return invalid("angles must be finite");
        }
        Ok(Self { betas, gammas })
    }

    pub fn zeros(p: usize) -> Self {
        Self {
            betas: vec![R::zero(); p],
            gammas: vec![R::zero(); p],
        }
    }

    /// Discretized-annealing start: `gamma_k = s_k dt`, `beta_k = (1 - s_k) dt` with `s_k = (k + 1/2) / p`.
    pub fn linear_ramp(p: usize, dt: f64) -> Self {
        let mut out = Self::zeros(p);
        for k in 0..p {
            let s = (k as f64 + 0.5) / p as f64;
            out.gammas[k] = R::lit(s * dt);
            out.betas[k] = R::lit((1.0 - s) * dt);
        }
        out
    }

    pub fn p(&self) -> usize {
        self.betas.len()
    }

    /// Same circuit with identity layers appended up to depth `p`.
    pub fn padded(&self, p: usize) -> Self {
        let mut out = self.clone();
        out.betas.resize(p.max(self.p()), R::zero());
        out.gammas.resize(p.max(self.p()), R::zero());
        out
    }

    /// Flattened `[gamma_1, beta_1, ..., gamma_p, beta_p]`.
    fn to_vec(&self) -> Vec<f64> {
        self.gammas
            .iter()
            .zip(&self.betas)
            .flat_map(|(g, b)| [g.as_f64(), b.as_f64()])
            .collect()
    }

    fn from_slice(v: &[f64]) -> Self {
        Self {
            gammas: v.iter().step_by(2).map(|&g| R::lit(g)).collect(),
            betas: v.iter().skip(1).step_by(2).map(|&b| R::lit(b)).collect(),
        }
    }

    /// Text form: `p`, then `p` lines `beta gamma`.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.p());
        for (b, g) in self.betas.iter().zip(&self.gammas) {
            writeln!(out, "{b} {g}").unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Parse { line, msg };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hl, h) = lines.next().ok_or_else(|| err(1, "missing depth".into()))?;
        let p: usize = h.parse().map_err(|_| err(hl, format!("bad depth {h:?}")))?;
        let mut betas = Vec::with_capacity(p);
        let mut gammas = Vec::with_capacity(p);
        let mut last = hl;
        for (line, l) in lines {
            last = line;
            let f: Vec<&str> = l.split_whitespace().collect();
            if f.len() != 2 || betas.len() == p {
                return Err(err(line, format!("expected {p} lines \"beta gamma\"")));
            }
            betas.push(f[0].parse().map_err(|_| err(line, format!("bad beta {:?}", f[0])))?);
            gammas.push(f[1].parse().map_err(|_| err(line, format!("bad gamma {:?}", f[1])))?);
        }
        if betas.len() != p {
            return Err(err(last + 1, format!("expected {p} layers, found {}", betas.len())));
        }
        Self::new(betas, gammas)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_text(&fs::read_to_string(path)?)
    }
}

/// Prepared QAOA state.
#[derive(Clone, Debug)]
pub struct QaoaState<R> {
    n: usize,
    pub amplitudes: Vec<Complex<R>>,
    pub params: QaoaParams<R>,
    /// `<H_C>` in the prepared state.
    pub expected_energy: R,
}

impl<R: Real> QaoaState<R> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn norm_sqr(&self) -> R {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Computational basis state with spins `x`.
    pub fn basis(x: &[i8]) -> Self {
        let n = x.len();
        let idx = x.iter().enumerate().fold(0usize, |b, (k, &s)| if s < 0 { b | 1 << k } else { b });
        let mut amplitudes = vec![Complex::new(R::zero(), R::zero()); 1 << n];
        amplitudes[idx] = Complex::new(R::one(), R::zero());
        Self {
            n,
            amplitudes,
            params: QaoaParams::zeros(0),
            expected_energy: R::zero(),
        }
    }

    fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr().as_f64()).collect()
    }
}

/// Diagonal of the cost Hamiltonian plus reusable scratch.
#[derive(Clone, Debug)]
pub struct QaoaSimulator<R> {
    n: usize,
    cost: Vec<R>,
}

impl<R: Real> QaoaSimulator<R> {
    pub fn new(inst: &Instance<R>) -> Result<Self> {
        let n = inst.n();
        if n > QAOA_MAX_N {
            return Err(Error::SizeLimit { n, max: QAOA_MAX_N });
        }
        let cost = crate::exact::all_energies(inst).into_iter().map(R::lit).collect();
        Ok(Self { n, cost })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cost_diagonal(&self) -> &[R] {
        &self.cost
    }

    fn evolve(&self, params: &QaoaParams<R>, amps: &mut Vec<Complex<R>>) {
        let dim = 1usize << self.n;
        let amp0 = R::one() / R::from_count(dim).sqrt();
        amps.clear();
        amps.resize(dim, Complex::new(amp0, R::zero()));
        let parallel = self.n >= PARALLEL_MIN_QUBITS;
        for (&gamma, &beta) in params.gammas.iter().zip(&params.betas) {
            let phase = |(a, &e): (&mut Complex<R>, &R)| {
                let (s, c) = (gamma * e).sin_cos();
                *a *= Complex::new(c, -s);
            };
            if parallel {
                amps.par_iter_mut().zip(self.cost.par_iter()).for_each(phase);
            } else {
                amps.iter_mut().zip(self.cost.iter()).for_each(phase);
            }
            // exp(i beta X) on every qubit
            let (s, c) = beta.sin_cos();
            for k in 0..self.n {
                let stride = 1usize << k;
                let rotate = |block: &mut [Complex<R>]| {
                    let (lo, hi) = block.split_at_mut(stride);
                    for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                        let (x0, x1) = (*a0, *a1);
                        *a0 = Complex::new(c * x0.re - s * x1.im, c * x0.im + s * x1.re);
                        *a1 = Complex::new(c * x1.re - s * x0.im, c * x1.im + s * x0.re);
                    }
                };
                if parallel {
                    amps.par_chunks_mut(2 * stride).for_each(rotate);
                } else {
                    amps.chunks_mut(2 * stride).for_each(rotate);
                }
            }
        }
    }

    fn energy_of(&self, amps: &[Complex<R>]) -> R {
        amps.iter().zip(&self.cost).map(|(a, &e)| a.norm_sqr() * e).sum()
    }

    pub fn prepare(&self, params: &QaoaParams<R>) -> QaoaState<R> {
        let mut amplitudes = Vec::new();
        self.evolve(params, &mut amplitudes);
        let expected_energy = self.energy_of(&amplitudes);
        QaoaState {
            n: self.n,
            amplitudes,
            params: params.clone(),
            expected_energy,
        }
    }

    /// `<H_C>` reusing `scratch` for the amplitudes.
    pub fn expectation(&self, params: &QaoaParams<R>, scratch: &mut Vec<Complex<R>>) -> R {
        self.evolve(params, scratch);
        self.energy_of(scratch)
    }
}

pub fn qaoa_prepare<R: Real>(inst: &Instance<R>, params: &QaoaParams<R>) -> Result<QaoaState<R>> {
    if params.p() > QAOA_MAX_DEPTH {
        return invalid(format!("depth {} exceeds {QAOA_MAX_DEPTH}", params.p()));
    }
    Ok(QaoaSimulator::new(inst)?.prepare(params))
}

/// `Z_ij = sum_x |amp_x|^2 x_i x_j` over all pairs; unit diagonal.
pub fn qaoa_correlations<R: Real>(state: &QaoaState<R>) -> CorrelationMatrix<R> {
    let n = state.n;
    let probs = state.probabilities();
    let chunk = 1usize << n.min(12);
    let acc = probs
        .par_chunks(chunk)
        .enumerate()
        .map(|(c, block)| {
            let mut acc = vec![0.0f64; n * n];
            for (k, &p) in block.iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                let bits = c * chunk + k;
                for i in 0..n {
                    let bi = bits >> i & 1;
                    for j in i + 1..n {
                        if bits >> j & 1 == bi {
                            acc[i * n + j] += p;
                        } else {
                            acc[i * n + j] -= p;
                        }
                    }
                }
            }
            acc
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(vec![0.0f64; n * n], |mut a, b| {
            a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
            a
        });
    let mut values = vec![R::zero(); n * n];
    for i in 0..n {
        values[i * n + i] = R::one();
        for j in i + 1..n {
            values[i * n + j] = R::lit(acc[i * n + j]);
        }
    }
    dense_clipped(n, values, CorrelationSource::Qaoa { p: state.params.p() })
}

/// Draws `shots` bitstrings from `|amp|^2`.
pub fn qaoa_sample<R: Real>(inst: &Instance<R>, state: &QaoaState<R>, shots: usize, seed: u64) -> Result<SampleSet<R>> {
    if shots == 0 {
        return invalid("shots must be at least 1");
    }
    if state.n != inst.n() {
        return invalid("state does not match instance size");
    }
    let mut cumulative = Vec::with_capacity(state.amplitudes.len());
    let mut total = 0.0;
    for p in state.probabilities() {
        total += p;
        cumulative.push(total);
    }
    let mut rng = seeded(seed);
    let mut samples = Vec::with_capacity(shots);
    for _ in 0..shots {
        let u = rng.random::<f64>() * total;
        let idx = cumulative.partition_point(|&c| c <= u).min(cumulative.len() - 1);
        let x = (0..state.n).map(|k| if idx >> k & 1 == 1 { -1 } else { 1 }).collect();
        samples.push(SpinConfig::new(inst, x)?);
    }
    Ok(SampleSet::new(samples, None))
}

/// Multi-start optimizer settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QaoaOptimizeOptions {
    pub restarts: usize,
    /// Simplex iterations per start; `None` means `500 p`.
    pub max_iter: Option<usize>,
    /// Time step of the linear-ramp start.
    pub ramp_dt: f64,
}

impl Default for QaoaOptimizeOptions {
    fn default() -> Self {
        Self {
            restarts: 10,
            max_iter: None,
            ramp_dt: 0.75,
        }
    }
}

/// Best parameters found by [`qaoa_optimize`].
#[derive(Clone, Debug)]
pub struct QaoaOptimum<R> {
    pub params: QaoaParams<R>,
    pub expected_energy: R,
    /// Running best `<H_C>` after each start.
    pub running_best: Vec<R>,
    /// True if the start that produced the optimum stopped on the iteration cap.
    pub iteration_limit_hit: bool,
}

/// Minimizes `<H_C>` over the `2p` angles by restarted Nelder-Mead.
///
/// Starts are the linear ramp, then uniform draws with `gamma` in `[-pi, pi]`
/// and `beta` in `[-pi/2, pi/2]`.
pub fn qaoa_optimize<R: Real>(inst: &Instance<R>, p: usize, opts: QaoaOptimizeOptions, seed: u64) -> Result<QaoaOptimum<R>> {
    qaoa_optimize_from(inst, p, opts, seed, &[])
}

/// As [`qaoa_optimize`], with additional caller-provided starting points tried first.
pub fn qaoa_optimize_from<R: Real>(
    inst: &Instance<R>,
    p: usize,
    opts: QaoaOptimizeOptions,
    seed: u64,
    extra_starts: &[QaoaParams<R>],
) -> Result<QaoaOptimum<R>> {
    if p == 0 || p > QAOA_MAX_DEPTH {
        return invalid(format!("depth must be in 1..={QAOA_MAX_DEPTH}, got {p}"));
    }
    if extra_starts.iter().any(|s| s.p() != p) {
        return invalid("starting point depth mismatch");
    }
    let sim = QaoaSimulator::new(inst)?;
    let mut rng = seeded(seed);
    let mut starts: Vec<QaoaParams<R>> = extra_starts.to_vec();
    starts.push(QaoaParams::linear_ramp(p, opts.ramp_dt));
    let pi = std::f64::consts::PI;
    for _ in 1..opts.restarts.max(1) {
        let v: Vec<f64> = (0..p)
            .flat_map(|_| [rng.random_range(-pi..pi), rng.random_range(-pi / 2.0..pi / 2.0)])
            .collect();
        starts.push(QaoaParams::from_slice(&v));
    }
    let max_iter = opts.max_iter.unwrap_or(500 * p);
    let mut scratch = Vec::new();
    let mut best: Option<(Vec<f64>, f64, bool)> = None;
    let mut running_best = Vec::with_capacity(starts.len());
    for start in &starts {
        let mut f = |v: &[f64]| sim.expectation(&QaoaParams::from_slice(v), &mut scratch).as_f64();
        let res = nelder_mead(&mut f, &start.to_vec(), 0.25, max_iter, 1e-12);
        if best.as_ref().is_none_or(|b| res.value < b.1) {
            best = Some((res.point, res.value, !res.converged));
        }
        running_best.push(R::lit(best.as_ref().unwrap().1));
    }
    let (point, _, limit) = best.expect("at least one start");
    let params = QaoaParams::from_slice(&point);
    let expected_energy = sim.expectation(&params, &mut scratch);
    Ok(QaoaOptimum {
        params,
        expected_energy,
        running_best,
        iteration_limit_hit: limit,
    })
}

/// Optimizes each depth in increasing order, seeding depth `p` with the
/// padded optimum of the previous depth so `<H_C>` never increases with depth.
pub fn qaoa_optimize_depths<R: Real>(
    inst: &Instance<R>,
    depths: &[usize],
    opts: QaoaOptimizeOptions,
    seed: u64,
) -> Result<Vec<QaoaOptimum<R>>> {
    let mut sorted = depths.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut out: Vec<QaoaOptimum<R>> = Vec::with_capacity(sorted.len());
    for (k, &p) in sorted.iter().enumerate() {
        let warm: Vec<QaoaParams<R>> = out.last().map(|o| vec![o.params.padded(p)]).unwrap_or_default();
        out.push(qaoa_optimize_from(inst, p, opts, crate::rng::derive_seed(seed, &[k as u64]), &warm)?);
    }
    Ok(out)
}

pub(crate) struct SimplexResult {
    pub point: Vec<f64>,
    pub value: f64,
    pub converged: bool,
}

/// Standard Nelder-Mead (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
pub(crate) fn nelder_mead(
    f: &mut dyn FnMut(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    max_iter: usize,
    ftol: f64,
) -> SimplexResult {
    let dim = x0.len();
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for k in 0..dim {
        let mut v = x0.to_vec();
        v[k] += step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    let mut converged = false;
    for _ in 0..max_iter {
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();
        let spread = values[dim] - values[0];
        let size = simplex[1..]
            .iter()
            .map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread.abs() <= ftol * (1.0 + values[0].abs()) && size < 1e-8 {
            converged = true;
            break;
        }
        let centroid: Vec<f64> = (0..dim)
            .map(|a| simplex[..dim].iter().map(|v| v[a]).sum::<f64>() / dim as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> { (0..dim).map(|a| centroid[a] + t * (simplex[dim][a] - centroid[a])).collect() };
        let xr = along(-1.0);
        let fr = f(&xr);
        if fr < values[0] {
            let xe = along(-2.0);
            let fe = f(&xe);
            if fe < fr {
                simplex[dim] = xe;
                values[dim] = fe;
            } else {
                simplex[dim] = xr;
                values[dim] = fr;
            }
        } else if fr < values[dim - 1] {
            simplex[dim] = xr;
            values[dim] = fr;
        } else {
            let (xc, fc) = if fr < values[dim] {
                let xc = along(-0.5);
                let fc = f(&xc);
                (xc, fc)
            } else {
                let xc = along(0.5);
                let fc = f(&xc);
                (xc, fc)
            };
            if fc < values[dim].min(fr) {
                simplex[dim] = xc;
                values[dim] = fc;
            } else {
                for k in 1..=dim {
                    let v: Vec<f64> = (0..dim).map(|a| simplex[0][a] + 0.5 * (simplex[k][a] - simplex[0][a])).collect();
                    values[k] = f(&v);
                    simplex[k] = v;
                }
            }
        }
    }
    let best = (0..=dim).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    SimplexResult {
        point: simplex[best].clone(),
        value: values[best],
        converged,
    }
}

/// The two summands of the closed-form depth-one correlation of one pair.
fn p1_terms(j: &[f64], n: usize, near: &[usize], a: usize, b: usize, beta: f64, gamma: f64) -> (f64, f64) {
    let (s2b, c2b) = (2.0 * beta).sin_cos();
    let mut prod_a = 1.0;
    let mut prod_b = 1.0;
    let mut prod_sum = 1.0;
    let mut prod_diff = 1.0;
    for &k in near {
        if k == a || k == b {
            continue;
        }
        let (jak, jbk) = (j[a * n + k], j[b * n + k]);
        prod_a *= (2.0 * gamma * jak).cos();
        prod_b *= (2.0 * gamma * jbk).cos();
        prod_sum *= (2.0 * gamma * (jak + jbk)).cos();
        prod_diff *= (2.0 * gamma * (jbk - jak)).cos();
    }
    let first = s2b * c2b * (2.0 * gamma * j[a * n + b]).sin() * (prod_a + prod_b);
    let second = -0.5 * s2b * s2b * (prod_sum - prod_diff);
    (first, second)
}

/// Vertices adjacent to `a` or `b`.
fn joint_neighborhood<R: Real>(inst: &Instance<R>, a: usize, b: usize, mark: &mut [bool]) -> Vec<usize> {
    let mut out = Vec::new();
    for &v in [a, b].iter() {
        for &(k, _) in inst.neighbors(v) {
            if !mark[k] {
                mark[k] = true;
                out.push(k);
            }
        }
    }
    out.iter().for_each(|&k| mark[k] = false);
    out
}

fn require_field_free<R: Real>(inst: &Instance<R>) -> Result<()> {
    if inst.field().is_some() {
        return invalid("closed-form depth-one correlations assume no magnetic field");
    }
    Ok(())
}

/// Closed-form depth-one QAOA correlations for any field-free weighted graph.
///
/// Pairs farther apart than two hops have exactly zero correlation and are not evaluated.
pub fn qaoa_p1_correlations<R: Real>(inst: &Instance<R>, beta1: R, gamma1: R) -> Result<CorrelationMatrix<R>> {
    require_field_free(inst)?;
    let n = inst.n();
    let j: Vec<f64> = inst.coupling_matrix().into_iter().map(R::as_f64).collect();
    let (beta, gamma) = (beta1.as_f64(), gamma1.as_f64());
    let mut values = vec![R::zero(); n * n];
    let mut mark = vec![false; n];
    let mut done = vec![false; n];
    for a in 0..n {
        values[a * n + a] = R::one();
        // every vertex within two hops of a
        let mut reach: Vec<usize> = Vec::new();
        for &(k, _) in inst.neighbors(a) {
            if !done[k] {
                done[k] = true;
                reach.push(k);
            }
            for &(l, _) in inst.neighbors(k) {
                if l != a && !done[l] {
                    done[l] = true;
                    reach.push(l);
                }
            }
        }
        reach.iter().for_each(|&k| done[k] = false);
        for b in reach.into_iter().filter(|&b| b > a) {
            let near = joint_neighborhood(inst, a, b, &mut mark);
            let (first, second) = p1_terms(&j, n, &near, a, b, beta, gamma);
            values[a * n + b] = R::lit(first + second);
        }
    }
    Ok(dense_clipped(n, values, CorrelationSource::Qaoa { p: 1 }))
}

/// `<H_C>` at depth one from the closed-form edge correlations.
pub fn qaoa_p1_energy<R: Real>(inst: &Instance<R>, beta1: R, gamma1: R) -> Result<R> {
    require_field_free(inst)?;
    let n = inst.n();
    let j: Vec<f64> = inst.coupling_matrix().into_iter().map(R::as_f64).collect();
    let mut mark = vec![false; n];
    let mut total = 0.0;
    for (e, ed) in inst.edges().iter().enumerate() {
        let near = joint_neighborhood(inst, ed.i, ed.j, &mut mark);
        let (first, second) = p1_terms(&j, n, &near, ed.i, ed.j, beta1.as_f64(), gamma1.as_f64());
        total -= inst.coupling(e).as_f64() * (first + second);
    }
    Ok(R::lit(total))
}

/// Depth-one angles minimizing the closed-form `<H_C>`; no size limit.
pub fn qaoa_p1_optimize<R: Real>(inst: &Instance<R>, opts: QaoaOptimizeOptions, seed: u64) -> Result<QaoaOptimum<R>> {
    require_field_free(inst)?;
    let mut rng = seeded(seed);
    let pi = std::f64::consts::PI;
    let mut starts = vec![QaoaParams::<R>::linear_ramp(1, opts.ramp_dt).to_vec()];
    for _ in 1..opts.restarts.max(1) {
        starts.push(vec![rng.random_range(-pi..pi), rng.random_range(-pi / 2.0..pi / 2.0)]);
    }
    let max_iter = opts.max_iter.unwrap_or(500);
    let mut best: Option<SimplexResult> = None;
    let mut running_best = Vec::with_capacity(starts.len());
    for start in &starts {
        let mut f = |v: &[f64]| qaoa_p1_energy(inst, R::lit(v[1]), R::lit(v[0])).map_or(f64::INFINITY, R::as_f64);
        let res = nelder_mead(&mut f, start, 0.25, max_iter, 1e-12);
        if best.as_ref().is_none_or(|b| res.value < b.value) {
            best = Some(res);
        }
        running_best.push(R::lit(best.as_ref().unwrap().value));
    }
    let best = best.expect("at least one start");
    Ok(QaoaOptimum {
        params: QaoaParams::from_slice(&best.point),
        expected_energy: R::lit(best.value),
        running_best,
        iteration_limit_hit: !best.converged,
    })
}

/// Mean over edges of `|second summand| / |first summand|` of the depth-one correlation.
#[derive(Clone, Debug, PartialEq)]
pub struct TermRatio {
    /// `None` when every edge was excluded.
    pub mean_ratio: Option<f64>,
    pub used_edges: usize,
    /// Edges whose first summand vanishes.
    pub excluded_edges: usize,
}

impl TermRatio {
    pub fn all_excluded(&self) -> bool {
        self.used_edges == 0
    }
}

const TERM_EPS: f64 = 1e-12;

pub fn p1_term_ratio<R: Real>(inst: &Instance<R>, params: &QaoaParams<R>) -> Result<TermRatio> {
    require_field_free(inst)?;
    if params.p() != 1 {
        return invalid(format!("term ratio needs depth-one parameters, got p = {}", params.p()));
    }
    let n = inst.n();
    let j: Vec<f64> = inst.coupling_matrix().into_iter().map(R::as_f64).collect();
    let (beta, gamma) = (params.betas[0].as_f64(), params.gammas[0].as_f64());
    let mut mark = vec![false; n];
    let mut total = 0.0;
    let mut used = 0;
    let mut excluded = 0;
    for e in inst.edges() {
        let near = joint_neighborhood(inst, e.i, e.j, &mut mark);
        let (first, second) = p1_terms(&j, n, &near, e.i, e.j, beta, gamma);
        if first.abs() <= TERM_EPS {
            excluded += 1;
        } else {
            total += second.abs() / first.abs();
            used += 1;
        }
    }
    Ok(TermRatio {
        mean_ratio: (used > 0).then(|| total / used as f64),
        used_edges: used,
        excluded_edges: excluded,
    })
}
