//! Correlation matrices for each guidance source.

use anyhow::{bail, Context, Result};
use ccmc_core::{
    cc_correlations, derive_seed, mc_correlations, mh_sample, qaoa_correlations, qaoa_optimize_depths,
    qaoa_p1_correlations, qaoa_p1_optimize, qaoa_prepare, sdp_correlations, sdp_solve, CorrelationMatrix,
    CorrelationMatrix64, CorrelationSource, Instance64, MhOptions, QaoaOptimizeOptions, SdpOptions,
};
use log::{debug, warn};

use crate::config::{ExperimentConfig, SourceKind, SourceParam};

/// Solver settings shared by all sources.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SourceSettings {
    pub mh: MhOptions,
    pub sdp: SdpOptions,
    pub qaoa: QaoaOptimizeOptions,
}

impl From<&ExperimentConfig> for SourceSettings {
    fn from(cfg: &ExperimentConfig) -> Self {
        Self {
            mh: (&cfg.mh).into(),
            sdp: (&cfg.sdp).into(),
            qaoa: (&cfg.qaoa).into(),
        }
    }
}

/// One matrix per entry of `params`, in the same order.
///
/// QAOA depths are optimized together so deeper circuits start from the
/// shallower optimum.
pub fn correlations_for(
    inst: &Instance64,
    kind: SourceKind,
    params: &[SourceParam],
    settings: &SourceSettings,
    seed: u64,
) -> Result<Vec<CorrelationMatrix64>> {
    let n = inst.n();
    match kind {
        SourceKind::Cc => Ok(params.iter().map(|_| cc_correlations(inst)).collect()),
        SourceKind::Random => Ok(params
            .iter()
            .map(|_| CorrelationMatrix::zeros(n, CorrelationSource::Random))
            .collect()),
        SourceKind::Sdp => {
            let sol = sdp_solve(inst, settings.sdp, seed)?;
            if !sol.converged {
                warn!("SDP stopped after {} sweeps without reaching tolerance", sol.sweeps);
            }
            Ok(params.iter().map(|_| sdp_correlations(&sol)).collect())
        }
        SourceKind::Mc => params
            .iter()
            .enumerate()
            .map(|(k, p)| {
                let SourceParam::BetaS(beta_s) = *p else {
                    bail!("mc needs a beta_s parameter");
                };
                let samples = mh_sample(inst, beta_s, settings.mh, derive_seed(seed, &[k as u64]))?;
                Ok(mc_correlations(&samples)?)
            })
            .collect(),
        SourceKind::Qaoa => {
            let depths = params
                .iter()
                .map(|p| match *p {
                    SourceParam::Depth(d) => Ok(d),
                    _ => bail!("qaoa needs a depth parameter"),
                })
                .collect::<Result<Vec<_>>>()?;
            let mut sorted = depths.clone();
            sorted.sort_unstable();
            sorted.dedup();
            let optima = qaoa_optimize_depths(inst, &sorted, settings.qaoa, seed)?;
            for (p, o) in sorted.iter().zip(&optima) {
                debug!("qaoa p={p}: <H_C> = {:.4}", o.expected_energy);
                if o.iteration_limit_hit {
                    warn!("qaoa p={p}: optimizer stopped on its iteration cap");
                }
            }
            depths
                .iter()
                .map(|d| {
                    let k = sorted.binary_search(d).expect("present");
                    Ok(qaoa_correlations(&qaoa_prepare(inst, &optima[k].params)?))
                })
                .collect()
        }
        SourceKind::QaoaP1 => {
            if params.iter().any(|p| *p != SourceParam::Depth(1)) {
                bail!("qaoa-p1 is depth one only");
            }
            let opt = qaoa_p1_optimize(inst, settings.qaoa, seed)?;
            let z = qaoa_p1_correlations(inst, opt.params.betas[0], opt.params.gammas[0])
                .context("closed-form correlations")?;
            Ok(params.iter().map(|_| z.clone()).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ccmc_core::{generate_regular, WeightSet};

    #[test]
    fn every_source_yields_valid_matrices() {
        let inst = generate_regular::<f64>(8, 3, WeightSet::PlusMinusOne, 2).unwrap();
        let settings = SourceSettings {
            mh: MhOptions {
                burn_in: 50,
                thin: 2,
                n_samples: 200,
            },
            qaoa: QaoaOptimizeOptions {
                restarts: 2,
                ..Default::default()
            },
            ..Default::default()
        };
        let cases = [
            (SourceKind::Cc, vec![SourceParam::None]),
            (SourceKind::Random, vec![SourceParam::PConst(0.2)]),
            (SourceKind::Sdp, vec![SourceParam::None]),
            (SourceKind::Mc, vec![SourceParam::BetaS(0.3), SourceParam::BetaS(1.0)]),
            (SourceKind::Qaoa, vec![SourceParam::Depth(2), SourceParam::Depth(1)]),
            (SourceKind::QaoaP1, vec![SourceParam::Depth(1)]),
        ];
        for (kind, params) in cases {
            let zs = correlations_for(&inst, kind, &params, &settings, 4).unwrap();
            assert_eq!(zs.len(), params.len());
            for z in &zs {
                assert_eq!(z.n(), 8);
                assert!(z.values().iter().all(|v| v.abs() <= 1.0 + 1e-9));
            }
        }
        let q = correlations_for(&inst, SourceKind::Qaoa, &[SourceParam::Depth(2), SourceParam::Depth(1)], &settings, 4).unwrap();
        assert_eq!(q[0].source(), CorrelationSource::Qaoa { p: 2 });
        assert_eq!(q[1].source(), CorrelationSource::Qaoa { p: 1 });
        assert!(correlations_for(&inst, SourceKind::Mc, &[SourceParam::None], &settings, 1).is_err());
    }

    #[test]
    fn closed_form_source_matches_statevector_at_same_angles() {
        let inst = generate_regular::<f64>(10, 3, WeightSet::PlusMinusOne, 8).unwrap();
        let settings = SourceSettings::default();
        let z = &correlations_for(&inst, SourceKind::QaoaP1, &[SourceParam::Depth(1)], &settings, 3).unwrap()[0];
        let opt = qaoa_p1_optimize(&inst, settings.qaoa, 3).unwrap();
        let sv = qaoa_correlations(&qaoa_prepare(&inst, &opt.params).unwrap());
        assert!(z.max_abs_diff(&sv) < 1e-9);
    }
}
