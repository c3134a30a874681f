//! Exhaustive ground-state search and exact Boltzmann correlations for small instances.

use rayon::prelude::*;

use crate::correlation::{dense_clipped, CorrelationMatrix, CorrelationSource};
use crate::error::{invalid, Error, Result};
use crate::instance::{Instance, SpinConfig};
use crate::scalar::Real;

/// Largest instance accepted by [`brute_force`].
pub const BRUTE_FORCE_MAX_N: usize = 30;
/// Largest instance accepted by [`exact_boltzmann_correlations`].
pub const BOLTZMANN_MAX_N: usize = 20;
/// Ground states kept in [`ExactResult::ground_states`]; `degeneracy` keeps counting past it.
pub const MAX_STORED_GROUND_STATES: usize = 1024;

const CHUNK_BITS: usize = 8;
const RESYNC_INTERVAL: u64 = 4096;

/// Exact extremal energies of an instance.
#[derive(Clone, Debug)]
pub struct ExactResult<R> {
    pub e_min: R,
    pub e_max: R,
    /// Optimal configurations. Without a field each Z2 pair appears once, with `x_0 = +1`.
    pub ground_states: Vec<SpinConfig<R>>,
    /// Number of optimal configurations (Z2 pairs counted once when field-free).
    pub degeneracy: u64,
}

struct ChunkBest {
    e_min: f64,
    e_max: f64,
    states: Vec<Vec<i8>>,
    count: u64,
}

/// Enumerates every configuration by Gray code with O(degree) incremental energy updates.
///
/// Without a field, `x_0` is pinned to `+1`, covering the `2^(n-1)` Z2-inequivalent
/// configurations. The search space is split into fixed chunks processed in parallel and
/// merged in chunk order, so the result does not depend on the worker count.
pub fn brute_force<R: Real>(inst: &Instance<R>) -> Result<ExactResult<R>> {
    let n = inst.n();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::SizeLimit { n, max: BRUTE_FORCE_MAX_N });
    }
    if n == 0 {
        return invalid("instance has no vertices");
    }
    let pinned = usize::from(inst.field().is_none());
    let free: Vec<usize> = (pinned..n).collect();
    let top = free.len().min(CHUNK_BITS);
    let low = free.len() - top;
    let exact_arith = inst.has_integer_weights();
    let tol = if exact_arith {
        0.0
    } else {
        1e-9 * (1.0 + inst.total_abs_coupling().as_f64())
    };

    let chunks: Vec<ChunkBest> = (0..1u64 << top)
        .into_par_iter()
        .map(|chunk| {
            let mut x = vec![1i8; n];
            for b in 0..top {
                if chunk >> b & 1 == 1 {
                    x[free[low + b]] = -1;
                }
            }
            let mut e = inst.energy_of(&x);
            let mut best = ChunkBest {
                e_min: f64::INFINITY,
                e_max: f64::NEG_INFINITY,
                states: Vec::new(),
                count: 0,
            };
            let visit = |x: &[i8], e: f64, best: &mut ChunkBest| {
                if e < best.e_min - tol {
                    best.e_min = e;
                    best.states.clear();
                    best.count = 0;
                }
                if e <= best.e_min + tol {
                    best.count += 1;
                    if best.states.len() < MAX_STORED_GROUND_STATES {
                        best.states.push(x.to_vec());
                    }
                }
                best.e_max = best.e_max.max(e);
            };
            visit(&x, e.as_f64(), &mut best);
            for t in 1..1u64 << low {
                let v = free[t.trailing_zeros() as usize];
                e += inst.flip_delta(&x, v);
                x[v] = -x[v];
                if !exact_arith && t % RESYNC_INTERVAL == 0 {
                    e = inst.energy_of(&x);
                }
                visit(&x, e.as_f64(), &mut best);
            }
            best
        })
        .collect();

    let e_min = chunks.iter().map(|c| c.e_min).fold(f64::INFINITY, f64::min);
    let e_max = chunks.iter().map(|c| c.e_max).fold(f64::NEG_INFINITY, f64::max);
    let mut ground_states = Vec::new();
    let mut degeneracy = 0;
    for c in chunks.into_iter().filter(|c| c.e_min <= e_min + tol) {
        degeneracy += c.count;
        for s in c.states {
            if ground_states.len() < MAX_STORED_GROUND_STATES {
                ground_states.push(SpinConfig::new(inst, s)?);
            }
        }
    }
    // report the energy of an actual optimum, evaluated from scratch
    let e_min = ground_states
        .iter()
        .map(|s| s.energy())
        .fold(R::lit(e_min), R::min);
    Ok(ExactResult {
        e_min,
        e_max: R::lit(e_max),
        ground_states,
        degeneracy,
    })
}

/// Exact thermal correlations `<x_i x_j>` under `exp(-beta_s H)` by full enumeration.
///
/// Boltzmann weights are shifted by the minimum energy before exponentiation.
/// The diagonal is one.
pub fn exact_boltzmann_correlations<R: Real>(inst: &Instance<R>, beta_s: f64) -> Result<CorrelationMatrix<R>> {
    let n = inst.n();
    if n > BOLTZMANN_MAX_N {
        return Err(Error::SizeLimit { n, max: BOLTZMANN_MAX_N });
    }
    if !(beta_s >= 0.0 && beta_s.is_finite()) {
        return invalid(format!("beta_s must be finite and non-negative, got {beta_s}"));
    }
    let energies = all_energies(inst);
    let e_min = energies.iter().copied().fold(f64::INFINITY, f64::min);

    let chunk = 1usize << n.min(12);
    let (z_sum, partition) = energies
        .par_chunks(chunk)
        .enumerate()
        .map(|(c, block)| {
            let mut acc = vec![0.0f64; n * n];
            let mut zsum = 0.0;
            for (k, &e) in block.iter().enumerate() {
                let bits = (c * chunk + k) as u64;
                let w = (-beta_s * (e - e_min)).exp();
                zsum += w;
                for i in 0..n {
                    let si = bits >> i & 1;
                    for j in i + 1..n {
                        if bits >> j & 1 == si {
                            acc[i * n + j] += w;
                        } else {
                            acc[i * n + j] -= w;
                        }
                    }
                }
            }
            (acc, zsum)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((vec![0.0f64; n * n], 0.0), |(mut a, z), (b, zb)| {
            a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
            (a, z + zb)
        });

    let mut values = vec![R::zero(); n * n];
    for i in 0..n {
        values[i * n + i] = R::one();
        for j in i + 1..n {
            values[i * n + j] = R::lit(z_sum[i * n + j] / partition);
        }
    }
    Ok(dense_clipped(n, values, CorrelationSource::Mc { beta_s }))
}

/// Energy of every configuration, indexed by bitmask (bit `k` set means `x_k = -1`).
pub(crate) fn all_energies<R: Real>(inst: &Instance<R>) -> Vec<f64> {
    let n = inst.n();
    let mut out = vec![0.0; 1 << n];
    let mut x = vec![1i8; n];
    let mut e = inst.energy_of(&x);
    let mut bits = 0usize;
    out[0] = e.as_f64();
    for t in 1..1u64 << n {
        let v = t.trailing_zeros() as usize;
        e += inst.flip_delta(&x, v);
        x[v] = -x[v];
        bits ^= 1 << v;
        if t % RESYNC_INTERVAL == 0 {
            e = inst.energy_of(&x);
        }
        out[bits] = e.as_f64();
    }
    out
}
