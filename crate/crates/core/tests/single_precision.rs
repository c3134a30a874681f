use ccmc_core::{
    brute_force, cc_correlations, qaoa_correlations, qaoa_p1_correlations, qaoa_prepare, run_ca, AnnealOptions,
    Instance32, Instance64, LinkPolicy32, QaoaParams, WeightSet,
};

fn pair(seed: u64) -> (Instance32, Instance64) {
    (
        ccmc_core::generate_regular(10, 3, WeightSet::PlusMinusOne, seed).unwrap(),
        ccmc_core::generate_regular(10, 3, WeightSet::PlusMinusOne, seed).unwrap(),
    )
}

#[test]
fn generator_is_scalar_independent() {
    let (a, b) = pair(3);
    assert_eq!(a.num_edges(), b.num_edges());
    for (ea, eb) in a.edges().iter().zip(b.edges()) {
        assert_eq!((ea.i, ea.j), (eb.i, eb.j));
        assert_eq!(ea.weight as f64, eb.weight);
    }
}

#[test]
fn exact_optima_agree() {
    let (a, b) = pair(4);
    let (ra, rb) = (brute_force(&a).unwrap(), brute_force(&b).unwrap());
    assert_eq!(ra.e_min as f64, rb.e_min);
    assert_eq!(ra.degeneracy, rb.degeneracy);
}

#[test]
fn quantum_correlations_agree_to_single_precision() {
    let (a, b) = pair(5);
    let za = qaoa_correlations(&qaoa_prepare(&a, &QaoaParams::new(vec![0.4f32, 0.2], vec![0.3, 0.7]).unwrap()).unwrap());
    let zb = qaoa_correlations(&qaoa_prepare(&b, &QaoaParams::new(vec![0.4f64, 0.2], vec![0.3, 0.7]).unwrap()).unwrap());
    let worst = za.values().iter().zip(zb.values()).map(|(x, y)| (*x as f64 - y).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-5, "{worst}");
    let pa = qaoa_p1_correlations(&a, 0.39f32, 0.61).unwrap();
    let pb = qaoa_p1_correlations(&b, 0.39f64, 0.61).unwrap();
    let worst = pa.values().iter().zip(pb.values()).map(|(x, y)| (*x as f64 - y).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-5, "{worst}");
}

#[test]
fn single_precision_annealing_reaches_the_optimum() {
    let (a, _) = pair(6);
    let e_min = brute_force(&a).unwrap().e_min;
    let z = cc_correlations(&a);
    let policy = LinkPolicy32::guided(&a, &z, 0.1).unwrap();
    let best = (0..20)
        .map(|s| run_ca(&a, &z, &policy, AnnealOptions::new(8.0, 2000), s).unwrap().e_best)
        .fold(f32::INFINITY, f32::min);
    assert_eq!(best, e_min);
}
