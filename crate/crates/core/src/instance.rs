//! Weighted graphs, spin configurations and the Ising / Max-Cut objectives.
//!
//! Couplings follow `J_ij = -A_ij`, so minimizing the Ising energy
//! `H(x) = -sum J_ij x_i x_j - sum h_i x_i` maximizes the cut
//! `C(x) = 1/2 sum A_ij (1 - x_i x_j)`. Without a field,
//! `C(x) = (W_total - H(x)) / 2`.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::rng::{seeded, SolverRng};
use crate::scalar::Real;

/// Undirected weighted edge with `i < j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge<R> {
    pub i: usize,
    pub j: usize,
    pub weight: R,
}

/// Immutable problem instance shared by every solver component.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance<R> {
    n: usize,
    edges: Vec<Edge<R>>,
    /// Per vertex: `(neighbor, edge index)`.
    adjacency: Vec<Vec<(usize, usize)>>,
    couplings: Vec<R>,
    field: Option<Vec<R>>,
    total_abs_coupling: R,
    degree_moments: (R, R),
}

impl<R: Real> Instance<R> {
    /// Builds an instance from `(i, j, A_ij)` triples.
    ///
    /// Endpoints may be given in either order; self-loops, duplicates and
    /// out-of-range ids are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, R)>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut stored = Vec::new();
        for (a, b, w) in edges {
            if a >= n || b >= n {
                return invalid(format!("edge ({a}, {b}) out of range for n = {n}"));
            }
            if a == b {
                return invalid(format!("self-loop at vertex {a}"));
            }
            if !w.is_finite() {
                return invalid(format!("non-finite weight on edge ({a}, {b})"));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            if !seen.insert((i, j)) {
                return invalid(format!("duplicate edge ({i}, {j})"));
            }
            stored.push(Edge { i, j, weight: w });
        }
        Ok(Self::from_checked(n, stored, None))
    }

    fn from_checked(n: usize, edges: Vec<Edge<R>>, field: Option<Vec<R>>) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for (e, edge) in edges.iter().enumerate() {
            adjacency[edge.i].push((edge.j, e));
            adjacency[edge.j].push((edge.i, e));
        }
        let couplings: Vec<R> = edges.iter().map(|e| -e.weight).collect();
        let total_abs_coupling = couplings.iter().map(|c| c.abs()).sum();
        let degree_moments = if n == 0 {
            (R::zero(), R::zero())
        } else {
            let nn = R::from_count(n);
            let d1: R = adjacency.iter().map(|a| R::from_count(a.len())).sum();
            let d2: R = adjacency
                .iter()
                .map(|a| {
                    let d = R::from_count(a.len());
                    d * d
                })
                .sum();
            (d1 / nn, d2 / nn)
        };
        Self {
            n,
            edges,
            adjacency,
            couplings,
            field,
            total_abs_coupling,
            degree_moments,
        }
    }

    /// Attaches a per-vertex magnetic field `h`, adding `-sum h_i x_i` to every energy.
    pub fn with_field(self, field: Vec<R>) -> Result<Self> {
        if field.len() != self.n {
            return invalid(format!("field has length {}, expected {}", field.len(), self.n));
        }
        if field.iter().any(|h| !h.is_finite()) {
            return invalid("non-finite field entry");
        }
        let field = if field.iter().all(|h| h.is_zero()) {
            None
        } else {
            Some(field)
        };
        Ok(Self::from_checked(self.n, self.edges, field))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge<R>] {
        &self.edges
    }

    /// `(neighbor, edge index)` pairs of vertex `v`.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Coupling `J_e = -A_e` of edge `e`.
    #[inline]
    pub fn coupling(&self, e: usize) -> R {
        self.couplings[e]
    }

    pub fn couplings(&self) -> &[R] {
        &self.couplings
    }

    pub fn field(&self) -> Option<&[R]> {
        self.field.as_deref()
    }

    #[inline]
    pub fn field_at(&self, v: usize) -> R {
        self.field.as_ref().map_or(R::zero(), |h| h[v])
    }

    /// `sum |J_ij|`.
    pub fn total_abs_coupling(&self) -> R {
        self.total_abs_coupling
    }

    /// `sum A_ij`.
    pub fn total_weight(&self) -> R {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// First and second moments of the degree sequence, `(<d>, <d^2>)`.
    pub fn degree_moments(&self) -> (R, R) {
        self.degree_moments
    }

    /// True when every weight and field entry is an integer, so energies are exact.
    pub fn has_integer_weights(&self) -> bool {
        self.edges.iter().all(|e| e.weight.is_integral())
            && self.field.iter().flatten().all(|h| h.is_integral())
    }

    /// Dense `n x n` coupling matrix (zero on non-edges).
    pub fn coupling_matrix(&self) -> Vec<R> {
        let n = self.n;
        let mut m = vec![R::zero(); n * n];
        for (e, edge) in self.edges.iter().enumerate() {
            m[edge.i * n + edge.j] = self.couplings[e];
            m[edge.j * n + edge.i] = self.couplings[e];
        }
        m
    }

    /// Breadth-first hop distances from `source` (`usize::MAX` when unreachable).
    pub fn distances_from(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        let mut queue = std::collections::VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            for &(w, _) in &self.adjacency[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    fn check_len(&self, x: &[i8]) -> Result<()> {
        if x.len() != self.n {
            return invalid(format!("configuration has length {}, expected {}", x.len(), self.n));
        }
        Ok(())
    }

    /// `H(x)` without a length check.
    pub(crate) fn energy_of(&self, x: &[i8]) -> R {
        let mut e = R::zero();
        for (edge, &j) in self.edges.iter().zip(&self.couplings) {
            if x[edge.i] == x[edge.j] {
                e -= j;
            } else {
                e += j;
            }
        }
        if let Some(h) = &self.field {
            for (hv, &xv) in h.iter().zip(x) {
                if xv > 0 {
                    e -= *hv;
                } else {
                    e += *hv;
                }
            }
        }
        e
    }

    /// `sum_j J_vj x_j + h_v`; flipping `v` changes the energy by `2 x_v` times this.
    #[inline]
    pub(crate) fn local_field(&self, x: &[i8], v: usize) -> R {
        let mut s = self.field_at(v);
        for &(w, e) in &self.adjacency[v] {
            if x[w] > 0 {
                s += self.couplings[e];
            } else {
                s -= self.couplings[e];
            }
        }
        s
    }

    /// Energy change from flipping the single spin `v`.
    #[inline]
    pub fn flip_delta(&self, x: &[i8], v: usize) -> R {
        let two = R::lit(2.0);
        if x[v] > 0 {
            two * self.local_field(x, v)
        } else {
            -two * self.local_field(x, v)
        }
    }
}

/// Spin assignment with its cached energy.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinConfig<R> {
    spins: Vec<i8>,
    energy: R,
}

impl<R: Real> SpinConfig<R> {
    pub fn new(inst: &Instance<R>, spins: Vec<i8>) -> Result<Self> {
        inst.check_len(&spins)?;
        if let Some(v) = spins.iter().position(|&s| s != 1 && s != -1) {
            return invalid(format!("spin {v} is {}, expected +1 or -1", spins[v]));
        }
        let energy = inst.energy_of(&spins);
        Ok(Self { spins, energy })
    }

    pub fn random<G: Rng + ?Sized>(inst: &Instance<R>, rng: &mut G) -> Self {
        let spins: Vec<i8> = (0..inst.n()).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
        let energy = inst.energy_of(&spins);
        Self { spins, energy }
    }

    pub fn all_up(inst: &Instance<R>) -> Self {
        let spins = vec![1; inst.n()];
        let energy = inst.energy_of(&spins);
        Self { spins, energy }
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    pub fn into_spins(self) -> Vec<i8> {
        self.spins
    }

    pub fn energy(&self) -> R {
        self.energy
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    /// Flips `members` and adds a precomputed `delta` to the cached energy.
    pub(crate) fn flip_with_delta(&mut self, members: &[usize], delta: R) {
        for &v in members {
            self.spins[v] = -self.spins[v];
        }
        self.energy += delta;
    }

    /// Flips every member and updates the energy incrementally.
    pub fn flip(&mut self, inst: &Instance<R>, members: &[usize]) {
        let delta = crate::anneal::delta_energy(inst, &self.spins, members);
        self.flip_with_delta(members, delta);
    }

    /// Global spin flip.
    pub fn flipped(&self, inst: &Instance<R>) -> Self {
        let spins: Vec<i8> = self.spins.iter().map(|s| -s).collect();
        let energy = inst.energy_of(&spins);
        Self { spins, energy }
    }

    /// Representative of the Z2 pair with `x_0 = +1`.
    pub fn canonical(&self, inst: &Instance<R>) -> Self {
        if self.spins.first().is_some_and(|&s| s < 0) {
            self.flipped(inst)
        } else {
            self.clone()
        }
    }

    /// Renders as a `+`/`-` string.
    pub fn to_sign_string(&self) -> String {
        self.spins.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect()
    }
}

/// Ising energy `H(x) = -sum J_ij x_i x_j - sum h_i x_i`.
pub fn energy<R: Real>(inst: &Instance<R>, x: &[i8]) -> Result<R> {
    inst.check_len(x)?;
    Ok(inst.energy_of(x))
}

/// Cut weight `C(x) = 1/2 sum A_ij (1 - x_i x_j)`, evaluated directly from the weights.
pub fn max_cut_value<R: Real>(inst: &Instance<R>, x: &[i8]) -> Result<R> {
    inst.check_len(x)?;
    Ok(inst
        .edges()
        .iter()
        .filter(|e| x[e.i] != x[e.j])
        .map(|e| e.weight)
        .sum())
}

/// Misfit `(e - E_min^id) / (E_max^id - E_min^id)` with ideal energies `-/+ (sum |J| + sum |h|)`.
pub fn misfit<R: Real>(inst: &Instance<R>, e: R) -> Result<R> {
    let ideal = inst.total_abs_coupling() + inst.field().map_or(R::zero(), |h| h.iter().map(|v| v.abs()).sum());
    if ideal <= R::zero() {
        return Err(Error::DegenerateInstance("sum of |J_ij| is zero".into()));
    }
    Ok((e + ideal) / (ideal + ideal))
}

/// Magnetization `M = (1/n) sum x_i`; zero for an empty configuration.
pub fn magnetization(x: &[i8]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    x.iter().map(|&s| s as i64).sum::<i64>() as f64 / x.len() as f64
}

/// Weight distribution for generated instances.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum WeightSet {
    /// i.i.d. uniform on `{-1, +1}`.
    #[default]
    PlusMinusOne,
    /// Every weight `+1` (unweighted Max-Cut).
    Unit,
}

const MAX_GENERATION_ATTEMPTS: usize = 10_000;

/// Random simple `d`-regular graph with weights from `weights`, deterministic in `seed`.
///
/// Stubs are paired at random; pairs forming self-loops or multi-edges are
/// returned to the pool and re-paired, restarting from scratch when no
/// admissible pair remains.
pub fn generate_regular<R: Real>(n: usize, d: usize, weights: WeightSet, seed: u64) -> Result<Instance<R>> {
    if !(n * d).is_multiple_of(2) {
        return invalid(format!("n * d = {} is odd", n * d));
    }
    if d >= n && !(n == 0 && d == 0) {
        return invalid(format!("degree {d} must be below n = {n}"));
    }
    let mut rng = seeded(seed);
    for _ in 0..MAX_GENERATION_ATTEMPTS {
        if let Some(pairs) = try_pairing(n, d, &mut rng) {
            let edges = pairs.into_iter().map(|(i, j)| {
                let w = match weights {
                    WeightSet::Unit => R::one(),
                    WeightSet::PlusMinusOne => {
                        if rng.random::<bool>() {
                            R::one()
                        } else {
                            -R::one()
                        }
                    }
                };
                (i, j, w)
            });
            return Instance::new(n, edges);
        }
    }
    Err(Error::GenerationFailure {
        n,
        d,
        attempts: MAX_GENERATION_ATTEMPTS,
    })
}

fn try_pairing(n: usize, d: usize, rng: &mut SolverRng) -> Option<Vec<(usize, usize)>> {
    let mut present = vec![false; n * n];
    let mut pairs = Vec::with_capacity(n * d / 2);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    let mut leftover = vec![0usize; n];
    while !stubs.is_empty() {
        stubs.shuffle(rng);
        leftover.iter_mut().for_each(|c| *c = 0);
        for pair in stubs.chunks_exact(2) {
            let (a, b) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if a != b && !present[a * n + b] {
                present[a * n + b] = true;
                pairs.push((a, b));
            } else {
                leftover[a] += 1;
                leftover[b] += 1;
            }
        }
        let open: Vec<usize> = (0..n).filter(|&v| leftover[v] > 0).collect();
        let admissible = open
            .iter()
            .enumerate()
            .any(|(k, &a)| open[k + 1..].iter().any(|&b| !present[a * n + b]));
        if !open.is_empty() && !admissible {
            return None;
        }
        stubs = open
            .iter()
            .flat_map(|&v| std::iter::repeat_n(v, leftover[v]))
            .collect();
    }
    pairs.sort_unstable();
    Some(pairs)
}

/// Serializes in the plain-text instance format: header `n m`, then `i j w` lines.
pub fn format_instance<R: Real>(inst: &Instance<R>) -> Result<String> {
    if inst.field().is_some() {
        return invalid("instance files cannot carry a magnetic field");
    }
    let mut out = String::new();
    writeln!(out, "{} {}", inst.n(), inst.num_edges()).unwrap();
    for e in inst.edges() {
        writeln!(out, "{} {} {}", e.i, e.j, e.weight).unwrap();
    }
    Ok(out)
}

pub fn write_instance<R: Real>(inst: &Instance<R>, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, format_instance(inst)?)?;
    Ok(())
}

pub fn read_instance<R: Real>(path: impl AsRef<Path>) -> Result<Instance<R>> {
    parse_instance(&fs::read_to_string(path)?)
}

/// Parses the instance format; errors carry 1-based line numbers.
pub fn parse_instance<R: Real>(text: &str) -> Result<Instance<R>> {
    let parse_err = |line: usize, msg: String| Error::Parse { line, msg };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(parse_err(hline, format!("malformed header {header:?}, expected \"n m\"")));
    }
    let n: usize = fields[0]
        .parse()
        .map_err(|_| parse_err(hline, format!("bad vertex count {:?}", fields[0])))?;
    let m: usize = fields[1]
        .parse()
        .map_err(|_| parse_err(hline, format!("bad edge count {:?}", fields[1])))?;

    let mut seen = HashSet::new();
    let mut edges = Vec::with_capacity(m);
    let mut last_line = hline;
    for (line, text) in lines {
        last_line = line;
        if edges.len() == m {
            return Err(parse_err(line, format!("more than the declared {m} edges")));
        }
        let f: Vec<&str> = text.split_whitespace().collect();
        if f.len() != 3 {
            return Err(parse_err(line, format!("expected \"i j w\", got {text:?}")));
        }
        let i: usize = f[0].parse().map_err(|_| parse_err(line, format!("bad vertex id {:?}", f[0])))?;
        let j: usize = f[1].parse().map_err(|_| parse_err(line, format!("bad vertex id {:?}", f[1])))?;
        let w: R = f[2].parse().map_err(|_| parse_err(line, format!("bad weight {:?}", f[2])))?;
        if i >= n || j >= n {
            return Err(parse_err(line, format!("vertex index out of range for n = {n}")));
        }
        if i == j {
            return Err(parse_err(line, format!("self-loop at vertex {i}")));
        }
        if !w.is_finite() {
            return Err(parse_err(line, "non-finite weight".into()));
        }
        let key = (i.min(j), i.max(j));
        if !seen.insert(key) {
            return Err(parse_err(line, format!("duplicate edge ({}, {})", key.0, key.1)));
        }
        edges.push(Edge { i: key.0, j: key.1, weight: w });
    }
    if edges.len() != m {
        return Err(parse_err(
            last_line + 1,
            format!("header declares {m} edges, found {}", edges.len()),
        ));
    }
    Ok(Instance::from_checked(n, edges, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use proptest::prelude::*;
    use rand::Rng;

    fn single_edge(a: f64) -> Instance<f64> {
        Instance::new(2, [(0, 1, a)]).unwrap()
    }

    fn triangle() -> Instance<f64> {
        Instance::new(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap()
    }

    fn direct_cut(inst: &Instance<f64>, x: &[i8]) -> f64 {
        // straight from the cut definition, no shortcuts
        inst.edges()
            .iter()
            .map(|e| 0.5 * e.weight * (1.0 - (x[e.i] as f64) * (x[e.j] as f64)))
            .sum()
    }

    fn all_configs(n: usize) -> impl Iterator<Item = Vec<i8>> {
        (0..1u32 << n).map(move |b| (0..n).map(|k| if b >> k & 1 == 1 { -1 } else { 1 }).collect())
    }

    #[test]
    fn single_edge_energy_and_cut() {
        let inst = single_edge(1.0);
        assert_eq!(inst.coupling(0), -1.0);
        assert_eq!(energy(&inst, &[1, 1]).unwrap(), 1.0);
        assert_eq!(energy(&inst, &[1, -1]).unwrap(), -1.0);
        assert_eq!(max_cut_value(&inst, &[1, -1]).unwrap(), 1.0);
        assert_eq!(max_cut_value(&inst, &[1, 1]).unwrap(), 0.0);
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let inst = single_edge(1.0);
        assert!(matches!(energy(&inst, &[1]), Err(Error::InvalidParameter(_))));
        assert!(matches!(max_cut_value(&inst, &[1, 1, 1]), Err(Error::InvalidParameter(_))));
        assert!(SpinConfig::new(&inst, vec![1, 0]).is_err());
    }

    #[test]
    fn k4_balanced_cut_is_four_and_maximal() {
        let inst = generate_regular::<f64>(4, 3, WeightSet::Unit, 11).unwrap();
        assert_eq!(inst.num_edges(), 6);
        let mut best = f64::MIN;
        for x in all_configs(4) {
            let c = max_cut_value(&inst, &x).unwrap();
            let ups = x.iter().filter(|&&s| s > 0).count();
            if ups == 2 {
                assert_eq!(c, 4.0);
            }
            best = best.max(c);
        }
        assert_eq!(best, 4.0);
    }

    #[test]
    fn generator_rejects_bad_parameters() {
        assert!(matches!(
            generate_regular::<f64>(5, 3, WeightSet::PlusMinusOne, 0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(generate_regular::<f64>(4, 4, WeightSet::PlusMinusOne, 0).is_err());
    }

    #[test]
    fn generator_handles_dense_paper_families() {
        for (d, seed) in [(3, 1), (20, 2)] {
            let inst = generate_regular::<f64>(100, d, WeightSet::PlusMinusOne, seed).unwrap();
            assert_eq!(inst.num_edges(), 50 * d);
            assert!((0..100).all(|v| inst.degree(v) == d));
            assert!(inst.edges().iter().all(|e| e.weight.abs() == 1.0));
        }
    }

    #[test]
    fn generator_is_deterministic() {
        let a = generate_regular::<f64>(30, 10, WeightSet::PlusMinusOne, 5).unwrap();
        let b = generate_regular::<f64>(30, 10, WeightSet::PlusMinusOne, 5).unwrap();
        let c = generate_regular::<f64>(30, 10, WeightSet::PlusMinusOne, 6).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn generator_output_is_regular_and_simple() {
        // 1000 random (n, d, seed) triples
        let mut rng = seeded(99);
        for _ in 0..1000 {
            let n = rng.random_range(2..40usize);
            let d = rng.random_range(0..n);
            if n * d % 2 == 1 {
                continue;
            }
            let seed = rng.random::<u64>();
            let inst = generate_regular::<f64>(n, d, WeightSet::PlusMinusOne, seed).unwrap();
            assert!((0..n).all(|v| inst.degree(v) == d), "n={n} d={d}");
            let mut seen = HashSet::new();
            for e in inst.edges() {
                assert!(e.i < e.j);
                assert!(seen.insert((e.i, e.j)));
            }
            let (d1, d2) = inst.degree_moments();
            assert_eq!(d1, d as f64);
            assert_eq!(d2, (d * d) as f64);
        }
    }

    #[test]
    fn degree_moments_of_irregular_graph() {
        let star = Instance::new(4, [(0, 1, 1.0), (0, 2, 1.0), (0, 3, -1.0)]).unwrap();
        let (d1, d2) = star.degree_moments();
        assert_eq!(d1, 1.5);
        assert_eq!(d2, (9.0 + 3.0) / 4.0);
    }

    #[test]
    fn cut_energy_identity_on_random_configs() {
        let inst = generate_regular::<f64>(10, 3, WeightSet::PlusMinusOne, 3).unwrap();
        let w = inst.total_weight();
        let mut rng = seeded(4);
        for _ in 0..100 {
            let x = SpinConfig::random(&inst, &mut rng);
            let c = direct_cut(&inst, x.spins());
            assert_eq!(c, (w - x.energy()) / 2.0);
            assert_eq!(max_cut_value(&inst, x.spins()).unwrap(), c);
        }
    }

    #[test]
    fn misfit_examples() {
        let ferro = single_edge(-1.0);
        assert_eq!(misfit(&ferro, energy(&ferro, &[1, 1]).unwrap()).unwrap(), 0.0);

        let tri = triangle();
        let e_min = all_configs(3).map(|x| energy(&tri, &x).unwrap()).fold(f64::MAX, f64::min);
        assert_eq!(e_min, -1.0);
        assert!((misfit(&tri, e_min).unwrap() - 1.0 / 3.0).abs() < 1e-15);

        let empty = Instance::<f64>::new(3, []).unwrap();
        assert!(matches!(misfit(&empty, 0.0), Err(Error::DegenerateInstance(_))));
    }

    #[test]
    fn magnetization_examples() {
        assert_eq!(magnetization(&[1, 1, 1]), 1.0);
        assert_eq!(magnetization(&[1, -1, 1, -1]), 0.0);
        let x = [1, 1, -1, 1, -1];
        let flipped: Vec<i8> = x.iter().map(|s| -s).collect();
        assert_eq!(magnetization(&flipped), -magnetization(&x));
    }

    #[test]
    fn field_term_enters_energy() {
        let inst = single_edge(1.0).with_field(vec![0.5, -2.0]).unwrap();
        // -J x0 x1 - h0 x0 - h1 x1 with J = -1
        assert_eq!(energy(&inst, &[1, 1]).unwrap(), 1.0 - 0.5 + 2.0);
        assert_eq!(energy(&inst, &[1, -1]).unwrap(), -1.0 - 0.5 - 2.0);
        assert!(inst.with_field(vec![0.0]).is_err());
    }

    #[test]
    fn construction_rejects_bad_edges() {
        assert!(Instance::<f64>::new(3, [(0, 0, 1.0)]).is_err());
        assert!(Instance::<f64>::new(3, [(0, 1, 1.0), (1, 0, 1.0)]).is_err());
        assert!(Instance::<f64>::new(3, [(0, 3, 1.0)]).is_err());
        let inst = Instance::<f64>::new(3, [(2, 0, 1.0)]).unwrap();
        assert_eq!((inst.edges()[0].i, inst.edges()[0].j), (0, 2));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let short = "3 2\n0 1 1\n";
        match parse_instance::<f64>(short) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let self_loop = "3 1\n2 2 1.0\n";
        match parse_instance::<f64>(self_loop) {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(line, 2);
                assert!(msg.contains("self-loop"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_instance::<f64>("3\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_instance::<f64>("3 2\n0 1 1\n1 0 1\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_instance::<f64>("3 1\n0 5 1\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn comments_are_skipped() {
        let inst = parse_instance::<f64>("# header\n3 1\n# edge follows\n0 2 -1\n").unwrap();
        assert_eq!(inst.edges()[0], Edge { i: 0, j: 2, weight: -1.0 });
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.txt");
        let inst = generate_regular::<f64>(12, 3, WeightSet::PlusMinusOne, 8).unwrap();
        write_instance(&inst, &path).unwrap();
        assert_eq!(read_instance::<f64>(&path).unwrap(), inst);
    }

    proptest! {
        #[test]
        fn text_round_trip_is_bit_exact(
            weights in proptest::collection::vec(-1.0e6f64..1.0e6, 1..12),
        ) {
            let n = weights.len() + 1;
            let inst = Instance::new(n, weights.iter().enumerate().map(|(k, &w)| (k, k + 1, w))).unwrap();
            let back: Instance<f64> = parse_instance(&format_instance(&inst).unwrap()).unwrap();
            for (a, b) in inst.edges().iter().zip(back.edges()) {
                prop_assert_eq!(a.weight.to_bits(), b.weight.to_bits());
            }
        }

        #[test]
        fn energy_is_z2_symmetric_and_bounded(seed in any::<u64>()) {
            let inst = generate_regular::<f64>(10, 4, WeightSet::PlusMinusOne, seed).unwrap();
            let mut rng = seeded(seed);
            let x = SpinConfig::random(&inst, &mut rng);
            let e = x.energy();
            prop_assert_eq!(e, x.flipped(&inst).energy());
            let bound = inst.total_abs_coupling();
            prop_assert!(-bound <= e && e <= bound);
            let mu = misfit(&inst, e).unwrap();
            prop_assert!((0.0..=1.0).contains(&mu));
        }
    }

    #[test]
    fn single_precision_instances_work() {
        let inst = generate_regular::<f32>(8, 3, WeightSet::PlusMinusOne, 1).unwrap();
        let x = SpinConfig::all_up(&inst);
        let w = inst.total_weight();
        assert_eq!(max_cut_value(&inst, x.spins()).unwrap(), 0.0);
        assert_eq!(x.energy(), w);
    }
}
