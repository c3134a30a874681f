//! Correlation-guided cluster construction.
//!
//! A cluster grows from a seed vertex as a single supernode. Every edge from the
//! supernode to an outside vertex `k` is aggregated into one link whose score is
//! `sum_u -x_u x_k Z_uk` over the live edges `{u, k}`. A boundary vertex is
//! picked uniformly at random and accepted with the clamped, percolation-scaled
//! probability of its aggregated score. Accepting merges `k` into the supernode
//! and aggregates its outside edges; rejecting deletes the edges aggregated at
//! that moment. Growth stops when no live boundary edge is left, so every edge
//! is consumed at most once.

use rand::Rng;

use crate::correlation::CorrelationMatrix;
use crate::error::{invalid, Error, Result};
use crate::instance::Instance;
use crate::scalar::Real;

/// Percolation threshold estimate `<d> / (2 E[|Z|] (<d^2> - <d>))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PercolationEstimate<R> {
    pub lambda_perc: R,
    pub mean_abs_z: R,
    pub d1: R,
    pub d2: R,
}

impl<R: Real> PercolationEstimate<R> {
    /// Re-evaluates the estimate from the stored moments.
    pub fn recompute(&self) -> R {
        self.d1 / (R::lit(2.0) * self.mean_abs_z * (self.d2 - self.d1))
    }
}

pub fn percolation_lambda<R: Real>(inst: &Instance<R>, z: &CorrelationMatrix<R>) -> Result<PercolationEstimate<R>> {
    let (d1, d2) = inst.degree_moments();
    if d2 <= d1 {
        return Err(Error::DegenerateTopology {
            d1: d1.as_f64(),
            d2: d2.as_f64(),
        });
    }
    let mean_abs_z = z.mean_abs_nonzero();
    if mean_abs_z <= R::zero() {
        return Err(Error::DegenerateCorrelation);
    }
    let mut est = PercolationEstimate {
        lambda_perc: R::zero(),
        mean_abs_z,
        d1,
        d2,
    };
    est.lambda_perc = est.recompute();
    Ok(est)
}

/// `min(1, max(0, (lambda_scale / lambda_perc) * score))`.
#[inline]
pub fn link_probability<R: Real>(score: R, lambda_scale: R, lambda_perc: R) -> R {
    (lambda_scale / lambda_perc * score).max(R::zero()).min(R::one())
}

/// Orientation of the guided link score.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum LinkSign {
    /// Score `-x_i x_j Z_ij` as written: links form where the current
    /// orientation disagrees with the correlation.
    #[default]
    Literal,
    /// Score `+x_i x_j Z_ij`: links form where the orientation agrees, as in
    /// Wolff clusters.
    Aligned,
}

impl LinkSign {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Literal => "literal",
            Self::Aligned => "aligned",
        }
    }
}

impl std::str::FromStr for LinkSign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "literal" => Ok(Self::Literal),
            "aligned" => Ok(Self::Aligned),
            _ => invalid(format!("unknown link sign {s:?} (expected literal or aligned)")),
        }
    }
}

/// Rule deciding whether a boundary vertex joins the cluster.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LinkPolicy<R> {
    /// Link probability from aggregated correlation scores.
    Guided { lambda_scale: R, lambda_perc: R, sign: LinkSign },
    /// Fixed probability regardless of correlations (random clusters).
    Constant { p: f64 },
}

impl<R: Real> LinkPolicy<R> {
    /// Guided policy with `lambda_perc` estimated once for `(inst, z)`.
    pub fn guided(inst: &Instance<R>, z: &CorrelationMatrix<R>, lambda_scale: R) -> Result<Self> {
        if !(lambda_scale >= R::zero()) || !lambda_scale.is_finite() {
            return invalid(format!("lambda_scale must be finite and non-negative, got {lambda_scale}"));
        }
        let est = percolation_lambda(inst, z)?;
        Ok(Self::Guided {
            lambda_scale,
            lambda_perc: est.lambda_perc,
            sign: LinkSign::Literal,
        })
    }

    /// Same policy with the score orientation replaced; constant policies are unchanged.
    pub fn with_sign(self, sign: LinkSign) -> Self {
        match self {
            Self::Guided {
                lambda_scale,
                lambda_perc,
                ..
            } => Self::Guided {
                lambda_scale,
                lambda_perc,
                sign,
            },
            c => c,
        }
    }

    pub fn constant(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return invalid(format!("link probability {p} outside [0, 1]"));
        }
        Ok(Self::Constant { p })
    }

    #[inline]
    pub fn probability(&self, score: R) -> f64 {
        match *self {
            Self::Guided {
                lambda_scale,
                lambda_perc,
                sign: LinkSign::Literal,
            } => link_probability(score, lambda_scale, lambda_perc).as_f64(),
            Self::Guided {
                lambda_scale,
                lambda_perc,
                sign: LinkSign::Aligned,
            } => link_probability(-score, lambda_scale, lambda_perc).as_f64(),
            Self::Constant { p } => p,
        }
    }
}

/// A constructed cluster.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cluster {
    /// Members in order of admission; the seed comes first.
    pub members: Vec<usize>,
    /// Edges deleted by rejections during construction.
    pub removed_edges: Vec<usize>,
}

impl Cluster {
    pub fn seed(&self) -> usize {
        self.members[0]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Reusable scratch space for repeated cluster construction on one instance.
///
/// Marks are generation-stamped, so starting a new cluster costs O(1) rather
/// than O(n + m).
#[derive(Clone, Debug)]
pub struct ClusterBuilder<R> {
    stamp: u32,
    member_mark: Vec<u32>,
    edge_dead: Vec<u32>,
    /// Aggregated score and live-edge count per outside vertex, valid when `bound_mark == stamp`.
    score: Vec<R>,
    live: Vec<u32>,
    bound_mark: Vec<u32>,
    frontier: Vec<usize>,
    frontier_pos: Vec<usize>,
    members: Vec<usize>,
    removed: Vec<usize>,
}

impl<R: Real> ClusterBuilder<R> {
    pub fn new(inst: &Instance<R>) -> Self {
        let n = inst.n();
        Self {
            stamp: 0,
            member_mark: vec![0; n],
            edge_dead: vec![0; inst.num_edges()],
            score: vec![R::zero(); n],
            live: vec![0; n],
            bound_mark: vec![0; n],
            frontier: Vec::with_capacity(n),
            frontier_pos: vec![0; n],
            members: Vec::with_capacity(n),
            removed: Vec::new(),
        }
    }

    fn next_stamp(&mut self) {
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.member_mark.iter_mut().for_each(|m| *m = 0);
            self.edge_dead.iter_mut().for_each(|m| *m = 0);
            self.bound_mark.iter_mut().for_each(|m| *m = 0);
            self.stamp = 1;
        }
        self.frontier.clear();
        self.members.clear();
        self.removed.clear();
    }

    /// True if `v` belongs to the most recently built cluster.
    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        self.member_mark[v] == self.stamp
    }

    /// Members of the most recently built cluster.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn removed_edges(&self) -> &[usize] {
        &self.removed
    }

    fn admit(&mut self, inst: &Instance<R>, x: &[i8], z: &CorrelationMatrix<R>, v: usize) {
        self.member_mark[v] = self.stamp;
        self.members.push(v);
        if self.bound_mark[v] == self.stamp && self.live[v] > 0 {
            self.drop_from_frontier(v);
        }
        self.live[v] = 0;
        for &(k, e) in inst.neighbors(v) {
            if self.member_mark[k] == self.stamp || self.edge_dead[e] == self.stamp {
                continue;
            }
            if self.bound_mark[k] != self.stamp {
                self.bound_mark[k] = self.stamp;
                self.score[k] = R::zero();
                self.live[k] = 0;
            }
            let s = if x[v] == x[k] { -z.get(v, k) } else { z.get(v, k) };
            self.score[k] += s;
            if self.live[k] == 0 {
                self.frontier_pos[k] = self.frontier.len();
                self.frontier.push(k);
            }
            self.live[k] += 1;
        }
    }

    fn drop_from_frontier(&mut self, k: usize) {
        let pos = self.frontier_pos[k];
        self.frontier.swap_remove(pos);
        if let Some(&moved) = self.frontier.get(pos) {
            self.frontier_pos[moved] = pos;
        }
    }

    fn reject(&mut self, inst: &Instance<R>, k: usize) {
        self.drop_from_frontier(k);
        self.live[k] = 0;
        self.score[k] = R::zero();
        for &(u, e) in inst.neighbors(k) {
            if self.member_mark[u] == self.stamp && self.edge_dead[e] != self.stamp {
                self.edge_dead[e] = self.stamp;
                self.removed.push(e);
            }
        }
    }

    /// Grows a cluster from `seed` and returns its members; see the module docs for the rule.
    pub fn build<G: Rng + ?Sized>(
        &mut self,
        inst: &Instance<R>,
        x: &[i8],
        z: &CorrelationMatrix<R>,
        seed: usize,
        policy: &LinkPolicy<R>,
        rng: &mut G,
    ) -> &[usize] {
        self.build_inner(inst, x, z, seed, policy, rng, false);
        &self.members
    }

    #[allow(clippy::too_many_arguments)]
    fn build_inner<G: Rng + ?Sized>(
        &mut self,
        inst: &Instance<R>,
        x: &[i8],
        z: &CorrelationMatrix<R>,
        seed: usize,
        policy: &LinkPolicy<R>,
        rng: &mut G,
        check: bool,
    ) {
        self.next_stamp();
        self.admit(inst, x, z, seed);
        while !self.frontier.is_empty() {
            if check {
                self.assert_boundary_consistent(inst, x, z);
            }
            let k = self.frontier[rng.random_range(0..self.frontier.len())];
            let p = policy.probability(self.score[k]);
            let accept = if p <= 0.0 {
                false
            } else if p >= 1.0 {
                true
            } else {
                rng.random::<f64>() < p
            };
            if accept {
                self.admit(inst, x, z, k);
            } else {
                self.reject(inst, k);
            }
        }
    }

    /// Recomputes boundary aggregates from members, edges and deletions and compares.
    fn assert_boundary_consistent(&self, inst: &Instance<R>, x: &[i8], z: &CorrelationMatrix<R>) {
        let n = inst.n();
        let mut score = vec![R::zero(); n];
        let mut live = vec![0u32; n];
        for &u in &self.members {
            for &(k, e) in inst.neighbors(u) {
                if self.contains(k) || self.edge_dead[e] == self.stamp {
                    continue;
                }
                score[k] += -R::from_i8(x[u] * x[k]).unwrap() * z.get(u, k);
                live[k] += 1;
            }
        }
        let mut on_frontier = vec![false; n];
        for &k in &self.frontier {
            on_frontier[k] = true;
        }
        for k in 0..n {
            let tracked = self.bound_mark[k] == self.stamp && !self.contains(k);
            let tracked_live = if tracked { self.live[k] } else { 0 };
            assert_eq!(tracked_live, live[k], "live edge count of {k}");
            assert_eq!(on_frontier[k], live[k] > 0, "frontier membership of {k}");
            if live[k] > 0 {
                let diff = (self.score[k] - score[k]).abs();
                assert!(diff <= R::lit(1e-9), "aggregated score of {k}");
            }
        }
    }
}

/// One-shot cluster construction; allocates fresh scratch space.
pub fn create_cluster<R: Real, G: Rng + ?Sized>(
    inst: &Instance<R>,
    x: &[i8],
    z: &CorrelationMatrix<R>,
    seed_vertex: usize,
    policy: &LinkPolicy<R>,
    rng: &mut G,
) -> Result<Cluster> {
    if seed_vertex >= inst.n() {
        return invalid(format!("seed vertex {seed_vertex} out of range"));
    }
    if x.len() != inst.n() || z.n() != inst.n() {
        return invalid("configuration or correlation size does not match instance");
    }
    let mut b = ClusterBuilder::new(inst);
    b.build(inst, x, z, seed_vertex, policy, rng);
    Ok(Cluster {
        members: b.members.clone(),
        removed_edges: b.removed.clone(),
    })
}

#[cfg(test)]
pub(crate) fn create_cluster_checked<R: Real, G: Rng + ?Sized>(
    inst: &Instance<R>,
    x: &[i8],
    z: &CorrelationMatrix<R>,
    seed_vertex: usize,
    policy: &LinkPolicy<R>,
    rng: &mut G,
) -> Cluster {
    let mut b = ClusterBuilder::new(inst);
    b.build_inner(inst, x, z, seed_vertex, policy, rng, true);
    Cluster {
        members: b.members.clone(),
        removed_edges: b.removed.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::cc_correlations;
    use crate::correlation::CorrelationSource;
    use crate::instance::{generate_regular, SpinConfig, WeightSet};
    use crate::rng::seeded;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn percolation_examples() {
        let inst = generate_regular::<f64>(16, 3, WeightSet::PlusMinusOne, 1).unwrap();
        let est = percolation_lambda(&inst, &cc_correlations(&inst)).unwrap();
        assert_eq!(est.lambda_perc, 0.25);
        assert_eq!(est.recompute(), est.lambda_perc);

        let inst = generate_regular::<f64>(30, 20, WeightSet::PlusMinusOne, 1).unwrap();
        let n = 30;
        let mut vals = inst.coupling_matrix();
        vals.iter_mut().for_each(|v| *v *= 0.5);
        let z = CorrelationMatrix::from_dense(n, vals, CorrelationSource::Sdp).unwrap();
        let est = percolation_lambda(&inst, &z).unwrap();
        assert!((est.lambda_perc - 1.0 / 19.0).abs() < 1e-15);
    }

    #[test]
    fn percolation_degenerate_cases() {
        let matching = Instance::new(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert!(matches!(
            percolation_lambda(&matching, &cc_correlations(&matching)),
            Err(Error::DegenerateTopology { .. })
        ));
        let path = Instance::new(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let zero = CorrelationMatrix::zeros(3, CorrelationSource::Sdp);
        assert!(matches!(percolation_lambda(&path, &zero), Err(Error::DegenerateCorrelation)));
    }

    #[test]
    fn link_probability_examples() {
        assert_eq!(link_probability(-0.3, 1.0, 0.25), 0.0);
        assert_eq!(link_probability(0.25, 1.0, 0.25), 1.0);
        // x_i = x_j = +1, Z_ij = -0.1: score 0.1
        assert!((link_probability(0.1f64, 1.0, 0.25) - 0.4).abs() < 1e-15);
        assert_eq!(link_probability(5.0, 1.0, 0.25), 1.0);
    }

    proptest! {
        #[test]
        fn link_probability_is_monotone_in_scale(score in -2.0f64..2.0, a in 0.0f64..10.0, b in 0.0f64..10.0, lp in 0.01f64..2.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let plo = link_probability(score, lo, lp);
            let phi = link_probability(score, hi, lp);
            prop_assert!((0.0..=1.0).contains(&plo));
            if score >= 0.0 {
                prop_assert!(plo <= phi);
            } else {
                prop_assert_eq!(phi, 0.0);
            }
        }

        #[test]
        fn cluster_invariants_hold(seed in any::<u64>(), scale in 0.0f64..8.0, d in 2usize..6) {
            let inst = generate_regular::<f64>(14, d, WeightSet::PlusMinusOne, seed).unwrap();
            let mut rng = seeded(seed ^ 1);
            let x = SpinConfig::random(&inst, &mut rng);
            let z = cc_correlations(&inst);
            let policy = LinkPolicy::guided(&inst, &z, scale).unwrap();
            let sv = rng.random_range(0..14);
            let c = create_cluster_checked(&inst, x.spins(), &z, sv, &policy, &mut rng);
            prop_assert_eq!(c.seed(), sv);
            prop_assert!(c.len() <= 14);
            let mut m = c.members.clone();
            m.sort_unstable();
            m.dedup();
            prop_assert_eq!(m.len(), c.len());
        }
    }

    #[test]
    fn non_positive_scores_give_singletons() {
        let inst = generate_regular::<f64>(10, 3, WeightSet::PlusMinusOne, 4).unwrap();
        let z = cc_correlations(&inst);
        // the ground-state orientation satisfies every bond of a tree; here align x with Z on seed edges
        let mut spins = vec![1i8; 10];
        for &(k, e) in inst.neighbors(0) {
            spins[k] = if inst.coupling(e) > 0.0 { 1 } else { -1 };
        }
        let x = SpinConfig::new(&inst, spins).unwrap();
        let policy = LinkPolicy::guided(&inst, &z, 3.0).unwrap();
        let mut rng = seeded(1);
        let c = create_cluster(&inst, x.spins(), &z, 0, &policy, &mut rng).unwrap();
        assert_eq!(c.members, vec![0]);
        assert_eq!(c.removed_edges.len(), 3);
    }

    #[test]
    fn zero_scale_gives_singletons() {
        let inst = generate_regular::<f64>(12, 4, WeightSet::PlusMinusOne, 2).unwrap();
        let z = cc_correlations(&inst);
        let policy = LinkPolicy::guided(&inst, &z, 0.0).unwrap();
        let mut rng = seeded(3);
        for _ in 0..50 {
            let x = SpinConfig::random(&inst, &mut rng);
            let s = rng.random_range(0..12);
            assert_eq!(create_cluster(&inst, x.spins(), &z, s, &policy, &mut rng).unwrap().members, vec![s]);
        }
    }

    #[test]
    fn constant_policy_extremes() {
        let inst = Instance::new(7, [(0, 1, 1.0), (1, 2, -1.0), (2, 0, 1.0), (3, 4, 1.0), (5, 6, 1.0)]).unwrap();
        let z = cc_correlations(&inst);
        let mut rng = seeded(5);
        let x = SpinConfig::random(&inst, &mut rng);
        let none = LinkPolicy::constant(0.0).unwrap();
        let all = LinkPolicy::constant(1.0).unwrap();
        assert_eq!(create_cluster(&inst, x.spins(), &z, 1, &none, &mut rng).unwrap().members, vec![1]);
        let mut comp = create_cluster(&inst, x.spins(), &z, 1, &all, &mut rng).unwrap().members;
        comp.sort_unstable();
        assert_eq!(comp, vec![0, 1, 2]);
    }

    #[test]
    fn two_vertex_inclusion_frequency_matches_link_probability() {
        // path 0-1-2 keeps <d^2> > <d>; seed at an end vertex has one neighbor
        let inst = Instance::new(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let mut vals = vec![0.0; 9];
        vals[1] = -0.3;
        vals[3] = -0.3;
        vals[5] = -0.3;
        vals[7] = -0.3;
        let z = CorrelationMatrix::from_dense(3, vals, CorrelationSource::Sdp).unwrap();
        let policy = LinkPolicy::guided(&inst, &z, 0.5).unwrap();
        let x = [1i8, 1, 1];
        let p = policy.probability(0.3);
        assert!(p > 0.0 && p < 1.0, "{p}");
        let mut rng = seeded(17);
        let trials = 100_000;
        let hits = (0..trials)
            .filter(|_| create_cluster(&inst, &x, &z, 0, &policy, &mut rng).unwrap().members.contains(&1))
            .count();
        let freq = hits as f64 / trials as f64;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((freq - p).abs() < 3.0 * sigma, "freq {freq} vs p {p}");
    }

    #[test]
    fn singleton_score_is_base_link_score() {
        let inst = generate_regular::<f64>(8, 3, WeightSet::PlusMinusOne, 6).unwrap();
        let z = cc_correlations(&inst);
        let mut rng = seeded(2);
        let x = SpinConfig::random(&inst, &mut rng);
        let mut b = ClusterBuilder::new(&inst);
        b.next_stamp();
        b.admit(&inst, x.spins(), &z, 0);
        for &(k, _) in inst.neighbors(0) {
            let expect = -(x.spins()[0] * x.spins()[k]) as f64 * z.get(0, k);
            assert_eq!(b.score[k], expect);
        }
    }

    #[test]
    fn rejected_vertex_can_return_through_fresh_edge() {
        // triangle 0-1-2: seed 0, reject 2 via edge (0,2), accept 1, then edge (1,2) is fresh
        let inst = Instance::new(3, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]).unwrap();
        let z = cc_correlations(&inst);
        let x = [1i8, 1, 1];
        let mut b = ClusterBuilder::new(&inst);
        b.next_stamp();
        b.admit(&inst, &x, &z, 0);
        b.reject(&inst, 2);
        assert_eq!(b.frontier, vec![1]);
        b.admit(&inst, &x, &z, 1);
        assert_eq!(b.frontier, vec![2]);
        assert_eq!(b.live[2], 1);
        assert_eq!(b.removed, vec![1]);
    }

    #[test]
    fn construction_is_deterministic() {
        let inst = generate_regular::<f64>(20, 4, WeightSet::PlusMinusOne, 8).unwrap();
        let z = cc_correlations(&inst);
        let policy = LinkPolicy::guided(&inst, &z, 2.0).unwrap();
        let x = SpinConfig::random(&inst, &mut seeded(1));
        let a = create_cluster(&inst, x.spins(), &z, 3, &policy, &mut seeded(9)).unwrap();
        let b = create_cluster(&inst, x.spins(), &z, 3, &policy, &mut seeded(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn cc_guidance_does_not_percolate_on_cubic_graphs() {
        let mut total = 0usize;
        let mut count = 0usize;
        for g in 0..20 {
            let inst = generate_regular::<f64>(100, 3, WeightSet::PlusMinusOne, 500 + g).unwrap();
            let z = cc_correlations(&inst);
            let policy = LinkPolicy::guided(&inst, &z, 1.0).unwrap();
            let mut rng = seeded(g);
            let mut b = ClusterBuilder::new(&inst);
            for _ in 0..200 {
                let x = SpinConfig::random(&inst, &mut rng);
                let s = rng.random_range(0..100);
                total += b.build(&inst, x.spins(), &z, s, &policy, &mut rng).len();
                count += 1;
            }
        }
        assert!((total as f64 / count as f64) < 50.0);
    }

    #[test]
    fn invalid_arguments() {
        let inst = generate_regular::<f64>(6, 3, WeightSet::PlusMinusOne, 1).unwrap();
        let z = cc_correlations(&inst);
        let policy = LinkPolicy::constant(0.5).unwrap();
        let mut rng = seeded(1);
        assert!(create_cluster(&inst, &[1; 6], &z, 6, &policy, &mut rng).is_err());
        assert!(create_cluster(&inst, &[1; 5], &z, 0, &policy, &mut rng).is_err());
        assert!(LinkPolicy::guided(&inst, &z, -1.0).is_err());
    }

    #[test]
    fn aligned_sign_mirrors_literal() {
        let inst = Instance::<f64>::new(3, [(0, 1, -1.0), (1, 2, 1.0)]).unwrap();
        let z = cc_correlations(&inst);
        let lit = LinkPolicy::guided(&inst, &z, 1.0).unwrap();
        let ali = lit.with_sign(LinkSign::Aligned);
        for score in [-0.4, -0.1, 0.0, 0.1, 0.4] {
            assert_eq!(lit.probability(score), ali.probability(-score));
        }
        // J_01 = +1 satisfied, J_12 = -1 unsatisfied; lambda_perc = 1 so p is 0 or 1
        let x = SpinConfig::new(&inst, vec![1, 1, 1]).unwrap();
        let mut rng = seeded(0);
        assert_eq!(create_cluster(&inst, x.spins(), &z, 0, &lit, &mut rng).unwrap().len(), 1);
        assert_eq!(create_cluster(&inst, x.spins(), &z, 0, &ali, &mut rng).unwrap().len(), 2);
        assert_eq!("ALIGNED".parse::<LinkSign>().unwrap(), LinkSign::Aligned);
        assert!("wolff".parse::<LinkSign>().is_err());
        assert_eq!(LinkPolicy::<f64>::constant(0.3).unwrap().with_sign(LinkSign::Aligned), LinkPolicy::constant(0.3).unwrap());
    }
}
