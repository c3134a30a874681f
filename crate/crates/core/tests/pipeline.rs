use ccmc_core::{
    brute_force, cc_correlations, gw_round, mc_correlations, mh_sample, qaoa_correlations, qaoa_optimize,
    read_instance, run_ca, run_sa, sdp_correlations, sdp_solve, write_instance, AnnealOptions, CorrelationMatrix,
    CorrelationMatrix64, Instance64, LinkPolicy, MhOptions, QaoaOptimizeOptions, SdpOptions,
};

fn instance(seed: u64) -> Instance64 {
    ccmc_core::generate_regular(12, 3, ccmc_core::WeightSet::PlusMinusOne, seed).unwrap()
}

fn sources(inst: &Instance64) -> Vec<CorrelationMatrix64> {
    let mh = MhOptions {
        n_samples: 500,
        ..Default::default()
    };
    let qaoa = QaoaOptimizeOptions {
        restarts: 3,
        ..Default::default()
    };
    vec![
        cc_correlations(inst),
        mc_correlations(&mh_sample(inst, 1.0, mh, 1).unwrap()).unwrap(),
        sdp_correlations(&sdp_solve(inst, SdpOptions::default(), 2).unwrap()),
        qaoa_correlations(&ccmc_core::qaoa_prepare(inst, &qaoa_optimize(inst, 2, qaoa, 3).unwrap().params).unwrap()),
    ]
}

#[test]
fn every_source_guides_annealing_to_the_optimum() {
    let inst = instance(11);
    let e_min = brute_force(&inst).unwrap().e_min;
    for z in sources(&inst) {
        let policy = LinkPolicy::guided(&inst, &z, 0.1).unwrap();
        let best = (0..20)
            .map(|s| run_ca(&inst, &z, &policy, AnnealOptions::new(8.0, 200 * 12), s).unwrap().e_best)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(best, e_min, "source {}", z.source());
    }
    let sa = run_sa(&inst, AnnealOptions::new(8.0, 200 * 12), 0).unwrap();
    assert!(sa.e_best >= e_min);
}

#[test]
fn files_round_trip_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let inst = instance(12);
    let ipath = dir.path().join("g.txt");
    write_instance(&inst, &ipath).unwrap();
    let back: Instance64 = read_instance(&ipath).unwrap();
    assert_eq!(back, inst);
    for (k, z) in sources(&inst).iter().enumerate() {
        let zpath = dir.path().join(format!("z{k}.corr"));
        z.write(&zpath).unwrap();
        let zb = CorrelationMatrix64::read(&zpath).unwrap();
        assert_eq!(zb.source(), z.source());
        assert!(zb.max_abs_diff(z) < 1e-12);
    }
}

#[test]
fn gw_cut_never_beats_exhaustive_optimum() {
    let inst = instance(13);
    let opt = brute_force(&inst).unwrap();
    let sol = sdp_solve(&inst, SdpOptions::default(), 4).unwrap();
    let r = gw_round(&inst, &sol, 200, 5).unwrap();
    let best_cut = (inst.total_weight() - opt.e_min) / 2.0;
    assert!(r.best_cut <= best_cut + 1e-9);
    assert!(sol.objective >= best_cut - 1e-6);
}

#[test]
fn random_clusters_ignore_correlations() {
    let inst = instance(14);
    let policy = ccmc_core::random_cluster_policy(0.3).unwrap();
    let zero = CorrelationMatrix::zeros(12, ccmc_core::CorrelationSource::Random);
    let cc = cc_correlations(&inst);
    let opts = AnnealOptions::new(5.0, 600);
    let a = run_ca(&inst, &zero, &policy, opts, 9).unwrap();
    let b = run_ca(&inst, &cc, &policy, opts, 9).unwrap();
    assert_eq!(a.e_best, b.e_best);
    assert_eq!(a.x_best, b.x_best);
    assert_eq!(a.evaluations, b.evaluations);
}
