use ccmc_core::*;
fn neg(z: &CorrelationMatrix64) -> CorrelationMatrix64 {
    let n = z.n();
    let v: Vec<f64> = z.values().iter().enumerate().map(|(k, &x)| if k / n == k % n { x } else { -x }).collect();
    CorrelationMatrix::from_dense(n, v, z.source()).unwrap()
}
fn main() {
    let n = 12;
    let t = std::time::Instant::now();
    let mut zs = vec![];
    for g in 0..10u64 {
        let inst = generate_regular::<f64>(n, 10, WeightSet::PlusMinusOne, 500 + g).unwrap();
        let opts = QaoaOptimizeOptions { restarts: 5, ..Default::default() };
        let res = qaoa_optimize_depths(&inst, &[1, 3], opts, g).unwrap();
        let z1 = qaoa_correlations(&qaoa_prepare(&inst, &res[0].params).unwrap());
        let z3 = qaoa_correlations(&qaoa_prepare(&inst, &res[1].params).unwrap());
        println!("g{g} E1 {:.3} E3 {:.3} opt {}", res[0].expected_energy, res[1].expected_energy, brute_force(&inst).unwrap().e_min);
        zs.push((inst, z1, z3));
    }
    println!("qaoa time {:?}", t.elapsed());
    for sign in ["lit", "neg"] {
        for scale in [0.1, 0.5, 1.0, 2.0, 4.0, 6.0, 8.0] {
            let mut out = vec![];
            for which in 0..2 {
                let mut recs = vec![]; let mut hits = 0;
                for (inst, z1, z3) in &zs {
                    let z = if which == 0 { z1.clone() } else { z3.clone() };
                    let z = if sign == "neg" { neg(&z) } else { z };
                    let opt = brute_force(inst).unwrap().e_min;
                    let pol = LinkPolicy::guided(inst, &z, scale).unwrap();
                    for rep in 0..20 { let r = run_ca(inst, &z, &pol, AnnealOptions::new(8.0, 100 * n as u64), rep).unwrap(); hits += (r.e_best == opt) as u32; recs.push(r); }
                }
                let s = acceptance_statistics(&recs, (1.0, 8.0)).unwrap();
                out.push(format!("p{} med {:.3} opt {:.1}%", if which == 0 {1} else {3}, s.median, hits as f64 / 2.0));
            }
            println!("{sign} {scale}: {:?}", out);
        }
    }
}
