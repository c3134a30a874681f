//! Reference optima against which runs are scored.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use ccmc_core::{brute_force, derive_seed, run_sa, AnnealOptions, Instance64, BRUTE_FORCE_MAX_N};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ReferenceMethod;

/// Iterations per vertex of each long annealing run.
pub const LONG_SA_ITERATIONS_PER_VERTEX: u64 = 10_000;
pub const LONG_SA_REPS: usize = 50;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRecord {
    pub graph_id: String,
    pub energy: f64,
    /// True only for exhaustive search.
    pub certified: bool,
    pub method: String,
}

/// Computes a reference energy for `inst`.
///
/// `Auto` uses exhaustive search when the instance is small enough.
pub fn register_reference(graph_id: &str, inst: &Instance64, method: ReferenceMethod, seed: u64) -> Result<ReferenceRecord> {
    let exhaustive = match method {
        ReferenceMethod::BruteForce => true,
        ReferenceMethod::LongSa => false,
        ReferenceMethod::Auto => inst.n() <= BRUTE_FORCE_MAX_N,
    };
    if exhaustive {
        let res = brute_force(inst).with_context(|| format!("exact reference for {graph_id}"))?;
        return Ok(ReferenceRecord {
            graph_id: graph_id.into(),
            energy: res.e_min,
            certified: true,
            method: "brute_force".into(),
        });
    }
    let opts = AnnealOptions {
        record_window: None,
        ..AnnealOptions::new(8.0, LONG_SA_ITERATIONS_PER_VERTEX * inst.n() as u64)
    };
    let energy = (0..LONG_SA_REPS)
        .into_par_iter()
        .map(|rep| run_sa(inst, opts, derive_seed(seed, &[rep as u64])).map(|r| r.e_best))
        .collect::<ccmc_core::Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    Ok(ReferenceRecord {
        graph_id: graph_id.into(),
        energy,
        certified: false,
        method: "long_sa".into(),
    })
}

/// Reference energies keyed by graph id.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ReferenceStore {
    records: BTreeMap<String, ReferenceRecord>,
}

/// Outcome of [`ReferenceStore::register`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Registration {
    New,
    Improved,
    Unchanged,
}

impl ReferenceStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, graph_id: &str) -> Option<&ReferenceRecord> {
        self.records.get(graph_id)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> impl Iterator<Item = &ReferenceRecord> {
        self.records.values()
    }

    /// Keeps the lower energy; certification is upgraded on ties.
    ///
    /// A lower energy than a certified optimum means an instance mismatch and is an error.
    pub fn register(&mut self, rec: ReferenceRecord) -> Result<Registration> {
        let Some(old) = self.records.get_mut(&rec.graph_id) else {
            self.records.insert(rec.graph_id.clone(), rec);
            return Ok(Registration::New);
        };
        if rec.energy < old.energy {
            if old.certified {
                bail!(
                    "{}: energy {} is below the certified optimum {}",
                    rec.graph_id,
                    rec.energy,
                    old.energy
                );
            }
            *old = rec;
            return Ok(Registration::Improved);
        }
        if rec.energy == old.energy && rec.certified && !old.certified {
            *old = rec;
            return Ok(Registration::Improved);
        }
        Ok(Registration::Unchanged)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let mut store = Self::new();
        let mut rdr = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
        for rec in rdr.deserialize() {
            let rec: ReferenceRecord = rec?;
            ensure!(!store.records.contains_key(&rec.graph_id), "duplicate reference for {}", rec.graph_id);
            store.records.insert(rec.graph_id.clone(), rec);
        }
        Ok(store)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
        for r in self.records.values() {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }
}
