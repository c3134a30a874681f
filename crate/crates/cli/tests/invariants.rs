use ccmc::bench::{self, check_optimal_flags, ResultRow};
use ccmc::config::ExperimentConfig;

/// Weighted pool-adjacent-violators fit, non-decreasing.
fn isotonic(ys: &[f64], ws: &[f64]) -> Vec<f64> {
    let mut blocks: Vec<(f64, f64, usize)> = Vec::new();
    for (&y, &w) in ys.iter().zip(ws) {
        blocks.push((y, w, 1));
        while blocks.len() > 1 && blocks[blocks.len() - 2].0 > blocks[blocks.len() - 1].0 {
            let (y2, w2, c2) = blocks.pop().unwrap();
            let (y1, w1, c1) = blocks.pop().unwrap();
            blocks.push(((y1 * w1 + y2 * w2) / (w1 + w2), w1 + w2, c1 + c2));
        }
    }
    blocks.iter().flat_map(|&(y, _, c)| std::iter::repeat_n(y, c)).collect()
}

#[test]
fn isotonic_fit_examples() {
    assert_eq!(isotonic(&[1.0, 2.0, 3.0], &[1.0; 3]), vec![1.0, 2.0, 3.0]);
    assert_eq!(isotonic(&[3.0, 1.0], &[1.0, 1.0]), vec![2.0, 2.0]);
    assert_eq!(isotonic(&[1.0, 4.0, 2.0, 3.0], &[1.0, 1.0, 1.0, 1.0]), vec![1.0, 3.0, 3.0, 3.0]);
}

fn pooled_rates(rows: &[ResultRow], method: &str, budgets: &[u64], n: u64) -> (Vec<f64>, Vec<f64>) {
    budgets
        .iter()
        .map(|&b| {
            let sel: Vec<_> = rows.iter().filter(|r| r.method == method && r.budget_m == b * n).collect();
            let hits = sel.iter().filter(|r| r.is_optimal).count();
            (hits as f64 / sel.len() as f64, sel.len() as f64)
        })
        .unzip()
}

#[test]
fn success_rate_grows_with_budget_and_flags_are_consistent() {
    let budgets = [2u64, 5, 10, 20, 40, 80];
    let cfg = ExperimentConfig::from_toml(
        r#"
        seed = 31
        reps = 60
        budgets = [2, 5, 10, 20, 40, 80]
        [instances]
        n = 12
        degree = 3
        count = 5
        [[runs]]
        method = "sa"
        [[runs]]
        method = "ca"
        source = "random"
        p_const = 0.2
        "#,
    )
    .unwrap();
    let out = bench::run_suite(&cfg).unwrap_or_else(|(_, e)| panic!("{e:#}"));
    check_optimal_flags(&out.rows, &out.references).unwrap();
    for r in out.rows.iter().filter(|r| r.is_optimal) {
        assert_eq!(r.e_best, out.references.get(&r.graph_id).unwrap().energy);
    }
    for method in ["SA", "CA"] {
        let (p, w) = pooled_rates(&out.rows, method, &budgets, 12);
        let fit = isotonic(&p, &w);
        for k in 0..p.len() {
            let q = fit[k].clamp(1.0 / w[k], 1.0 - 1.0 / w[k]);
            let sigma = (q * (1.0 - q) / w[k]).sqrt();
            assert!(
                (p[k] - fit[k]).abs() <= 3.0 * sigma,
                "{method} budget {}n: rate {:.3} vs isotonic {:.3} (3 sigma {:.3})",
                budgets[k],
                p[k],
                fit[k],
                3.0 * sigma
            );
        }
        assert!(p[p.len() - 1] > p[0], "{method}: {p:?}");
    }
}
