//! Binned edge correlations.

use ccmc_core::{CorrelationMatrix64, Instance64};
use log::warn;
use serde::Serialize;

pub const HIST_BINS: usize = 40;

/// Which edges enter a histogram, by coupling sign.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum EdgeFilter {
    All,
    /// `J_ij > 0`.
    #[default]
    Positive,
    /// `J_ij < 0`.
    Negative,
}

impl EdgeFilter {
    fn keeps(self, j: f64) -> bool {
        match self {
            Self::All => true,
            Self::Positive => j > 0.0,
            Self::Negative => j < 0.0,
        }
    }
}

/// Counts over [`HIST_BINS`] equal bins of `[-1, 1]`; the last bin is closed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Histogram {
    pub counts: Vec<u64>,
}

impl Default for Histogram {
    fn default() -> Self {
        Self {
            counts: vec![0; HIST_BINS],
        }
    }
}

pub fn bin_index(z: f64) -> usize {
    let k = ((z.clamp(-1.0, 1.0) + 1.0) * 0.5 * HIST_BINS as f64).floor() as usize;
    k.min(HIST_BINS - 1)
}

pub fn bin_edges(k: usize) -> (f64, f64) {
    let w = 2.0 / HIST_BINS as f64;
    (-1.0 + k as f64 * w, -1.0 + (k + 1) as f64 * w)
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Fraction of entries strictly below zero (zero is a bin edge).
    pub fn fraction_negative(&self) -> Option<f64> {
        let t = self.total();
        (t > 0).then(|| self.counts[..HIST_BINS / 2].iter().sum::<u64>() as f64 / t as f64)
    }

    pub fn merge(&mut self, other: &Histogram) {
        self.counts.iter_mut().zip(&other.counts).for_each(|(a, b)| *a += b);
    }
}

/// Histogram of `Z_ij` over the edges selected by `filter`.
pub fn correlation_histogram(z: &CorrelationMatrix64, inst: &Instance64, filter: EdgeFilter) -> Histogram {
    let mut h = Histogram::default();
    for (e, ed) in inst.edges().iter().enumerate() {
        if filter.keeps(inst.coupling(e)) {
            h.counts[bin_index(z.get(ed.i, ed.j))] += 1;
        }
    }
    if h.total() == 0 {
        warn!("no edges pass the {filter:?} filter; histogram is empty");
    }
    h
}

/// One CSV row per bin.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HistRow {
    pub graph_id: String,
    pub source: String,
    pub param: String,
    pub bin: usize,
    pub bin_lo: f64,
    pub bin_hi: f64,
    pub count: u64,
}

pub fn hist_rows(graph_id: &str, source: &str, param: &str, h: &Histogram) -> Vec<HistRow> {
    h.counts
        .iter()
        .enumerate()
        .map(|(bin, &count)| {
            let (bin_lo, bin_hi) = bin_edges(bin);
            HistRow {
                graph_id: graph_id.into(),
                source: source.into(),
                param: param.into(),
                bin,
                bin_lo,
                bin_hi,
                count,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ccmc_core::{cc_correlations, generate_regular, CorrelationMatrix, CorrelationSource, WeightSet};

    #[test]
    fn bins_cover_the_interval() {
        assert_eq!(bin_index(-1.0), 0);
        assert_eq!(bin_index(1.0), HIST_BINS - 1);
        assert_eq!(bin_index(0.0), HIST_BINS / 2);
        assert_eq!(bin_index(-1e-12), HIST_BINS / 2 - 1);
        for k in 0..HIST_BINS {
            let (lo, hi) = bin_edges(k);
            assert_eq!(bin_index(0.5 * (lo + hi)), k);
        }
    }

    #[test]
    fn zero_matrix_is_a_single_spike() {
        let inst = generate_regular::<f64>(10, 3, WeightSet::PlusMinusOne, 1).unwrap();
        let z = CorrelationMatrix::zeros(10, CorrelationSource::Cc);
        let h = correlation_histogram(&z, &inst, EdgeFilter::All);
        assert_eq!(h.counts[HIST_BINS / 2], 15);
        assert_eq!(h.total(), 15);
        assert_eq!(h.fraction_negative(), Some(0.0));
    }

    #[test]
    fn coupling_constants_fill_end_bins() {
        let inst = generate_regular::<f64>(12, 4, WeightSet::PlusMinusOne, 2).unwrap();
        let z = cc_correlations(&inst);
        let pos = correlation_histogram(&z, &inst, EdgeFilter::Positive);
        let neg = correlation_histogram(&z, &inst, EdgeFilter::Negative);
        assert_eq!(pos.total(), pos.counts[HIST_BINS - 1]);
        assert_eq!(neg.total(), neg.counts[0]);
        assert_eq!(pos.total() + neg.total(), 24);
        let mut all = pos.clone();
        all.merge(&neg);
        assert_eq!(all, correlation_histogram(&z, &inst, EdgeFilter::All));
    }

    #[test]
    fn empty_filter_gives_empty_histogram() {
        let inst = generate_regular::<f64>(8, 3, WeightSet::Unit, 2).unwrap();
        let z = cc_correlations(&inst);
        let h = correlation_histogram(&z, &inst, EdgeFilter::Positive);
        assert_eq!(h.total(), 0);
        assert_eq!(h.fraction_negative(), None);
        assert_eq!(hist_rows("g", "CC", "", &h).len(), HIST_BINS);
    }
}
