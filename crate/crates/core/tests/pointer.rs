use weakval_core::scenarios::three_box;
use weakval_core::weakmeas::{exact_pointer_distribution, PointerConfig, PointerSampler};

fn p_c_mean_ratio(lambda: f64) -> f64 {
    let s = three_box();
    let dist =
        exact_pointer_distribution(&s.pps, s.observable("P_C").unwrap(), &PointerConfig::new(lambda))
            .unwrap();
    dist.mean() / lambda
}

#[test]
fn sampled_cdf_matches_exact_cdf() {
    let s = three_box();
    let dist =
        exact_pointer_distribution(&s.pps, s.observable("P_C").unwrap(), &PointerConfig::new(0.1))
            .unwrap();
    let mut samples = PointerSampler::new(&dist).sample(100_000, 7);
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let ks = dist
        .grid
        .iter()
        .zip(dist.cdf())
        .map(|(&x, f)| {
            let below = samples.partition_point(|&v| v <= x) as f64;
            (below / n - f).abs()
        })
        .fold(0.0, f64::max);
    assert!(ks < 0.01, "KS statistic {ks}");
}

#[test]
fn weak_limit_converges_at_first_order() {
    let dev = |l: f64| (p_c_mean_ratio(l) + 1.0).abs();
    let (coarse, fine) = (dev(0.1), dev(0.05));
    assert!(coarse < 0.05, "deviation {coarse}");
    assert!(coarse / fine >= 1.8, "ratio {}", coarse / fine);
}

#[test]
fn mean_matches_closed_form() {
    // Two branches with amplitudes 2/3 at shift 0 and -1/3 at shift λ give
    // mean λ(1 − 2c)/(5 − 4c) with c = exp(−λ²/4) for unit spread.
    for lambda in [0.05, 0.1, 0.5, 1.0, 2.0] {
        let c = f64::exp(-lambda * lambda / 4.0);
        let oracle = lambda * (1.0 - 2.0 * c) / (5.0 - 4.0 * c);
        let got = p_c_mean_ratio(lambda) * lambda;
        assert!((got - oracle).abs() < 1e-9, "λ={lambda}: {got} vs {oracle}");
    }
}
