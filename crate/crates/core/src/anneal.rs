//! Annealing drivers: the correlation-guided cluster algorithm and the
//! single-spin simulated-annealing baseline.
//!
//! Both share a linear schedule in single-spin-equivalent steps: flipping a
//! cluster of `k` spins advances `beta` by `k * beta_f / (m - 1)`, accepted or not.

use std::time::{Duration, Instant};

use rand::Rng;

use crate::cluster::{ClusterBuilder, LinkPolicy};
use crate::correlation::CorrelationMatrix;
use crate::error::{invalid, Result};
use crate::instance::{Instance, SpinConfig};
use crate::rng::seeded;
use crate::scalar::Real;

/// Inverse-temperature schedule driven by consumed single-spin budget.
///
/// `consumed` saturates at `m - 1`, where `beta` is pinned to `beta_f`; the
/// proposal that crosses the budget is still fully executed, and the raw total
/// is kept in `spins_proposed`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScheduleState {
    pub beta: f64,
    pub beta_f: f64,
    pub m: u64,
    pub consumed: u64,
    pub spins_proposed: u64,
}

impl ScheduleState {
    pub fn new(beta_f: f64, m: u64) -> Result<Self> {
        if m < 2 {
            return invalid(format!("iteration budget m must be at least 2, got {m}"));
        }
        if !(beta_f > 0.0 && beta_f.is_finite()) {
            return invalid(format!("beta_f must be positive and finite, got {beta_f}"));
        }
        Ok(Self {
            beta: 0.0,
            beta_f,
            m,
            consumed: 0,
            spins_proposed: 0,
        })
    }

    /// Loop guard `beta < beta_f`.
    #[inline]
    pub fn active(&self) -> bool {
        self.beta < self.beta_f
    }

    /// `beta_f / (m - 1)`.
    pub fn step(&self) -> f64 {
        self.beta_f / (self.m - 1) as f64
    }

    /// Charges a flip of `k` spins to the budget.
    #[inline]
    pub fn advance(&mut self, k: usize) {
        let budget = self.m - 1;
        self.spins_proposed += k as u64;
        self.consumed = (self.consumed + k as u64).min(budget);
        self.beta = if self.consumed >= budget {
            self.beta_f
        } else {
            self.consumed as f64 * self.beta_f / budget as f64
        };
    }
}

/// One proposed flip.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AcceptanceEvent<R> {
    pub beta: f64,
    pub cluster_size: usize,
    pub delta_e: R,
    pub accepted: bool,
}

/// Statistics of one annealing run.
#[derive(Clone, Debug)]
pub struct RunRecord<R> {
    pub e_best: R,
    pub x_best: SpinConfig<R>,
    /// Events whose `beta` falls in the recording window.
    pub acceptance_events: Vec<AcceptanceEvent<R>>,
    /// Proposed flips.
    pub evaluations: u64,
    pub schedule: ScheduleState,
    pub final_state: SpinConfig<R>,
    pub wall_time: Duration,
}

/// Window of inverse temperatures whose acceptance events are recorded.
pub const DEFAULT_RECORD_WINDOW: (f64, f64) = (1.0, 8.0);

/// Settings shared by both drivers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnealOptions {
    pub beta_f: f64,
    /// Budget in single-spin-equivalent iterations.
    pub m: u64,
    /// Record events with `beta` in this closed interval; `None` disables recording.
    pub record_window: Option<(f64, f64)>,
}

impl AnnealOptions {
    pub fn new(beta_f: f64, m: u64) -> Self {
        Self {
            beta_f,
            m,
            record_window: Some(DEFAULT_RECORD_WINDOW),
        }
    }
}

/// `H(x') - H(x)` for flipping `members`: `2 sum J_ij x_i x_j` over bonds leaving
/// the set, plus `2 sum h_i x_i` over members.
pub fn delta_energy<R: Real>(inst: &Instance<R>, x: &[i8], members: &[usize]) -> R {
    let mut inside = vec![false; inst.n()];
    for &v in members {
        inside[v] = true;
    }
    boundary_delta(inst, x, members, |v| inside[v])
}

#[inline]
fn boundary_delta<R: Real>(inst: &Instance<R>, x: &[i8], members: &[usize], inside: impl Fn(usize) -> bool) -> R {
    let mut s = R::zero();
    for &i in members {
        let mut local = inst.field_at(i);
        for &(j, e) in inst.neighbors(i) {
            if !inside(j) {
                if x[j] > 0 {
                    local += inst.coupling(e);
                } else {
                    local -= inst.coupling(e);
                }
            }
        }
        if x[i] > 0 {
            s += local;
        } else {
            s -= local;
        }
    }
    s + s
}

struct Tracker<R> {
    x: SpinConfig<R>,
    e_best: R,
    x_best: SpinConfig<R>,
    events: Vec<AcceptanceEvent<R>>,
    window: Option<(f64, f64)>,
    evaluations: u64,
}

impl<R: Real> Tracker<R> {
    fn new(x: SpinConfig<R>, window: Option<(f64, f64)>) -> Self {
        Self {
            e_best: x.energy(),
            x_best: x.clone(),
            x,
            events: Vec::new(),
            window,
            evaluations: 0,
        }
    }

    /// Metropolis decision, applied once per proposed flip.
    fn propose<G: Rng + ?Sized>(&mut self, members: &[usize], delta: R, beta: f64, rng: &mut G) {
        self.evaluations += 1;
        let d = delta.as_f64();
        let accepted = if d <= 0.0 {
            self.x.flip_with_delta(members, delta);
            if self.x.energy() < self.e_best {
                self.e_best = self.x.energy();
                self.x_best.clone_from(&self.x);
            }
            true
        } else if rng.random::<f64>() < (-beta * d).exp() {
            self.x.flip_with_delta(members, delta);
            true
        } else {
            false
        };
        if let Some((lo, hi)) = self.window {
            if beta >= lo && beta <= hi {
                self.events.push(AcceptanceEvent {
                    beta,
                    cluster_size: members.len(),
                    delta_e: delta,
                    accepted,
                });
            }
        }
    }

    fn finish(self, schedule: ScheduleState, start: Instant) -> RunRecord<R> {
        RunRecord {
            e_best: self.e_best,
            x_best: self.x_best,
            acceptance_events: self.events,
            evaluations: self.evaluations,
            schedule,
            final_state: self.x,
            wall_time: start.elapsed(),
        }
    }
}

/// Correlation-guided cluster annealing.
///
/// Starting from `beta = 0` and a random configuration, each iteration picks a
/// uniform seed vertex, grows a cluster under `policy`, and proposes flipping
/// it: downhill or neutral moves are always taken (updating the best energy),
/// uphill moves pass with probability `exp(-beta dE)`.
pub fn run_ca<R: Real>(
    inst: &Instance<R>,
    z: &CorrelationMatrix<R>,
    policy: &LinkPolicy<R>,
    opts: AnnealOptions,
    seed: u64,
) -> Result<RunRecord<R>> {
    let start = Instant::now();
    let n = inst.n();
    if n == 0 {
        return invalid("instance has no vertices");
    }
    if z.n() != n {
        return invalid(format!("correlation matrix is {}x{0}, instance has {n} vertices", z.n()));
    }
    let mut schedule = ScheduleState::new(opts.beta_f, opts.m)?;
    let mut rng = seeded(seed);
    let mut tracker = Tracker::new(SpinConfig::random(inst, &mut rng), opts.record_window);
    let mut builder = ClusterBuilder::new(inst);
    while schedule.active() {
        let seed_vertex = rng.random_range(0..n);
        builder.build(inst, tracker.x.spins(), z, seed_vertex, policy, &mut rng);
        let members = builder.members();
        let delta = boundary_delta(inst, tracker.x.spins(), members, |v| builder.contains(v));
        tracker.propose(members, delta, schedule.beta, &mut rng);
        schedule.advance(members.len());
    }
    Ok(tracker.finish(schedule, start))
}

/// Single-spin simulated annealing on the same schedule with uniformly random sites.
pub fn run_sa<R: Real>(inst: &Instance<R>, opts: AnnealOptions, seed: u64) -> Result<RunRecord<R>> {
    let start = Instant::now();
    let n = inst.n();
    if n == 0 {
        return invalid("instance has no vertices");
    }
    let mut schedule = ScheduleState::new(opts.beta_f, opts.m)?;
    let mut rng = seeded(seed);
    let mut tracker = Tracker::new(SpinConfig::random(inst, &mut rng), opts.record_window);
    while schedule.active() {
        let v = rng.random_range(0..n);
        let delta = inst.flip_delta(tracker.x.spins(), v);
        tracker.propose(&[v], delta, schedule.beta, &mut rng);
        schedule.advance(1);
    }
    Ok(tracker.finish(schedule, start))
}

/// Distribution of per-run acceptance rates.
#[derive(Clone, Debug, PartialEq)]
pub struct AcceptanceSummary {
    /// Acceptance rate of each run that had events in the window.
    pub rates: Vec<f64>,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub mean: f64,
    /// Runs without any event in the window.
    pub skipped: usize,
}

/// Linear-interpolated quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Per-run acceptance rates for events with `beta` inside `window`, summarized across runs.
pub fn acceptance_statistics<R: Real>(records: &[RunRecord<R>], window: (f64, f64)) -> Result<AcceptanceSummary> {
    let events: Vec<&[AcceptanceEvent<R>]> = records.iter().map(|r| r.acceptance_events.as_slice()).collect();
    acceptance_statistics_from_events(&events, window)
}

/// As [`acceptance_statistics`], from bare event logs.
pub fn acceptance_statistics_from_events<R: Real>(
    runs: &[&[AcceptanceEvent<R>]],
    window: (f64, f64),
) -> Result<AcceptanceSummary> {
    if runs.is_empty() {
        return invalid("no run records");
    }
    let (lo, hi) = window;
    if !(lo <= hi) {
        return invalid(format!("empty beta window [{lo}, {hi}]"));
    }
    let mut rates = Vec::new();
    let mut skipped = 0;
    for events in runs {
        let (total, acc) = events
            .iter()
            .filter(|e| e.beta >= lo && e.beta <= hi)
            .fold((0usize, 0usize), |(t, a), e| (t + 1, a + usize::from(e.accepted)));
        if total == 0 {
            skipped += 1;
        } else {
            rates.push(acc as f64 / total as f64);
        }
    }
    if rates.is_empty() {
        return invalid(format!("no events recorded in beta window [{lo}, {hi}]"));
    }
    let mut sorted = rates.clone();
    sorted.sort_by(f64::total_cmp);
    Ok(AcceptanceSummary {
        median: quantile(&sorted, 0.5),
        q1: quantile(&sorted, 0.25),
        q3: quantile(&sorted, 0.75),
        mean: rates.iter().sum::<f64>() / rates.len() as f64,
        rates,
        skipped,
    })
}
