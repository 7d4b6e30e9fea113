//! Heavier cross-checks of the exact module: seeded Monte Carlo agreement,
//! convergence of the finite-n optima toward the asymptotic allocations, and
//! the empirical error-decay rates.

use alloc_design_core::{
    bahadur_allocation_closed_form, bahadur_rate, exact_mtd_error, exact_power, exact_power_split,
    general_rate, log_gamma, minimal_sample_size, monte_carlo_selection_error,
    optimal_allocation_exact, pitman_limit, wald_statistic, AllocationFraction, Design, McEstimate,
    MgfModel, MtdSpec, PitmanScenario, Sided, SuccessPair, TestSpec,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;

fn pair(pa: f64, pb: f64) -> SuccessPair {
    SuccessPair::new(pa, pb).unwrap()
}

/// Monte Carlo power of the Wald test by direct binomial sampling.
fn mc_power(p: &SuccessPair, d: &Design, t: &TestSpec, reps: u64, seed: u64) -> McEstimate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bin_a = rand_distr::Binomial::new(d.n_a(), p.p_a()).unwrap();
    let bin_b = rand_distr::Binomial::new(d.n_b(), p.p_b()).unwrap();
    let mut hits = 0u64;
    for _ in 0..reps {
        let y_a = bin_a.sample(&mut rng);
        let y_b = bin_b.sample(&mut rng);
        let w = wald_statistic(y_a, d.n_a(), y_b, d.n_b());
        let reject = match t.sided() {
            Sided::One => w > t.critical_value(),
            Sided::Two => w * w > t.critical_value() * t.critical_value(),
        };
        if reject {
            hits += 1;
        }
    }
    let estimate = hits as f64 / reps as f64;
    McEstimate { estimate, std_error: (estimate * (1.0 - estimate) / reps as f64).sqrt() }
}

/// Monte Carlo dose-misselection probability by direct binomial sampling.
fn mc_mtd_error(spec: &MtdSpec, d: &Design, reps: u64, seed: u64) -> McEstimate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bin_a = rand_distr::Binomial::new(d.n_a(), spec.p_a()).unwrap();
    let bin_b = rand_distr::Binomial::new(d.n_b(), spec.p_b()).unwrap();
    let mut hits = 0u64;
    for _ in 0..reps {
        let mid = (bin_a.sample(&mut rng) as f64 / d.n_a() as f64
            + bin_b.sample(&mut rng) as f64 / d.n_b() as f64)
            / 2.0;
        if mid >= spec.p0() {
            hits += 1;
        }
    }
    let estimate = hits as f64 / reps as f64;
    McEstimate { estimate, std_error: (estimate * (1.0 - estimate) / reps as f64).sqrt() }
}

#[test]
fn exact_power_matches_monte_carlo_large_design() {
    // 10^7 replications at the reference configuration
    let p = pair(0.7, 0.9);
    let d = Design::new(500, 250).unwrap();
    let t = TestSpec::two_sided(1.96).unwrap();
    let exact = exact_power(&p, &d, &t);
    let mc = mc_power(&p, &d, &t, 10_000_000, 20240518);
    let band = 4.0 * mc.std_error;
    assert!(
        (exact - mc.estimate).abs() <= band,
        "exact {exact} vs MC {} ± {band}",
        mc.estimate
    );
}

#[test]
fn exact_mtd_error_matches_monte_carlo() {
    let spec = MtdSpec::new(0.1, 0.3, 0.28).unwrap();
    let d = Design::new(200, 84).unwrap();
    let exact = exact_mtd_error(&spec, &d);
    // independent enumeration oracle value
    assert!((exact - 0.002051055937181).abs() < 1e-12, "{exact}");
    let mc = mc_mtd_error(&spec, &d, 10_000_000, 7);
    assert!(
        (exact - mc.estimate).abs() <= 4.0 * mc.std_error,
        "exact {exact} vs MC {} ± {}",
        mc.estimate,
        4.0 * mc.std_error
    );
}

#[test]
fn mtd_scan_approaches_rate_optimal_allocation() {
    // minimizing the misselection probability over group sizes at n = 2000
    // lands near the asymptotic optimum 0.420
    let spec = MtdSpec::new(0.1, 0.3, 0.28).unwrap();
    let n = 2000u64;
    let mut best = (0u64, f64::INFINITY);
    for n_a in 1..n {
        let err = exact_mtd_error(&spec, &Design::new(n, n_a).unwrap());
        if err < best.1 {
            best = (n_a, err);
        }
    }
    let nu = best.0 as f64 / n as f64;
    assert!((nu - 0.420).abs() < 0.02, "argmin nu = {nu}");
}

#[test]
fn optimal_allocation_trend_toward_limit() {
    // two-sided optimum drifts toward the fixed-alternative limit 0.5184
    let p = pair(0.5, 0.8);
    let t = TestSpec::two_sided(1.96).unwrap();
    let target = bahadur_allocation_closed_form(&p).unwrap().value();
    let mut dist = Vec::new();
    for n in [100u64, 200, 500, 1000] {
        let opt = optimal_allocation_exact(&p, n, &t).unwrap();
        dist.push((opt.n_a as f64 / n as f64 - target).abs());
    }
    assert!(dist[3] <= dist[2], "distance grew on the last step: {dist:?}");
    assert!(dist[3] < dist[0], "no overall approach: {dist:?}");
    assert!(dist[3] < 0.05, "still far at n = 1000: {dist:?}");
}

#[test]
fn neyman_is_suboptimal_at_reference_point() {
    let p = pair(0.7, 0.9);
    let t = TestSpec::two_sided(1.96).unwrap();
    let balanced = exact_power(&p, &Design::new(500, 250).unwrap(), &t);
    let neyman = exact_power(&p, &Design::new(500, 302).unwrap(), &t);
    assert!(balanced > neyman, "balanced {balanced} vs neyman {neyman}");
}

#[test]
fn error_rate_sequence_approaches_rate_function() {
    // empirical (1/n) log(1 - power) against the tilt-infimum rate
    let p = pair(0.5, 0.8);
    let g = bahadur_rate(AllocationFraction::balanced(), &p).unwrap().rate;

    // selection error (one-sided, zero critical value): clean convergence
    let t0 = TestSpec::one_sided(0.0).unwrap();
    let mut rel = Vec::new();
    for n in [100u64, 200, 400, 800] {
        let split = exact_power_split(&p, &Design::new(n, n / 2).unwrap(), &t0);
        let r = split.accept.ln() / n as f64;
        rel.push((r - g).abs() / g.abs());
    }
    for w in rel.windows(2) {
        assert!(w[1] < w[0], "relative gap not shrinking: {rel:?}");
    }
    assert!(rel[3] < 0.15, "one-sided gap at n=800: {rel:?}");

    // with a positive critical value the plug-in variance widens the
    // acceptance boundary by ~K σ t*/√n, so convergence is √n-slow; the
    // sequence still has to close in monotonically
    let t196 = TestSpec::two_sided(1.96).unwrap();
    let mut rel = Vec::new();
    for n in [100u64, 200, 400, 800] {
        let split = exact_power_split(&p, &Design::new(n, n / 2).unwrap(), &t196);
        let r = split.accept.ln() / n as f64;
        rel.push((r - g).abs() / g.abs());
    }
    for w in rel.windows(2) {
        assert!(w[1] < w[0], "relative gap not shrinking: {rel:?}");
    }
    assert!(rel[3] < 0.35, "two-sided gap at n=800: {rel:?}");
}

#[test]
fn minimal_n_ratio_follows_pitman_limit() {
    let sc = PitmanScenario::new(0.0, 1.0, 0.5, 0.05, 0.8).unwrap();
    let limit = pitman_limit(&sc, AllocationFraction::balanced());
    let mut gaps = Vec::new();
    for k in [25u64, 100] {
        let pk = sc.pair_at(k).unwrap();
        let n_k = minimal_sample_size(&pk, sc.alpha(), sc.beta(), |_| AllocationFraction::balanced(), 2000, 1)
            .unwrap()
            .expect("reachable power");
        let ratio = n_k as f64 / k as f64;
        assert!((ratio - limit).abs() / limit < 0.2, "k={k}: ratio {ratio} vs {limit}");
        gaps.push((ratio - limit).abs());
    }
    assert!(gaps[1] < gaps[0], "no approach to the limit: {gaps:?}");
}

#[test]
fn selection_error_monte_carlo_matches_enumeration_identical_arms() {
    // identical Bernoulli arms: P(Ȳ_A >= Ȳ_B) enumerable exactly
    let m = MgfModel::bernoulli(0.6).unwrap();
    let d = Design::new(20, 10).unwrap();
    let mut exact = 0.0;
    let pmf: Vec<f64> = (0..=10u64)
        .map(|k| alloc_design_core::log_binomial_pmf(10, k, 0.6).unwrap().exp())
        .collect();
    for i in 0..=10usize {
        for j in 0..=i {
            exact += pmf[i] * pmf[j];
        }
    }
    assert!((exact - 0.59001432291046).abs() < 1e-12, "enumeration changed: {exact}");
    let mc = monte_carlo_selection_error(&m, &m, &d, 200_000, 99).unwrap();
    assert!(mc.estimate >= 0.5, "ties included implies at least 1/2");
    assert!(
        (mc.estimate - exact).abs() <= 4.0 * mc.std_error,
        "MC {} vs exact {exact}",
        mc.estimate
    );
}

/// Exact P(Ȳ_A >= Ȳ_B) for Poisson arms via the distribution of the two sums.
fn poisson_selection_error(lambda_a: f64, m_a: u64, lambda_b: f64, m_b: u64) -> f64 {
    let mu_a = lambda_a * m_a as f64;
    let mu_b = lambda_b * m_b as f64;
    let pois_pmf = |mu: f64, k: u64| (k as f64 * mu.ln() - mu - log_gamma(k as f64 + 1.0)).exp();
    let top_a = (mu_a + 12.0 * mu_a.sqrt()).ceil() as u64 + 20;
    let top_b = (mu_b + 12.0 * mu_b.sqrt()).ceil() as u64 + 20;
    let cdf_b: Vec<f64> = {
        let mut acc = 0.0;
        (0..=top_b)
            .map(|k| {
                acc += pois_pmf(mu_b, k);
                acc
            })
            .collect()
    };
    let mut total = 0.0;
    for s_a in 0..=top_a {
        // Ȳ_A >= Ȳ_B  <=>  s_a m_b >= s_b m_a
        let cut = (s_a as u128 * m_b as u128 / m_a as u128) as u64;
        let cut = cut.min(top_b);
        total += pois_pmf(mu_a, s_a) * cdf_b[cut as usize];
    }
    total
}

#[test]
fn selection_error_monte_carlo_matches_poisson_sums() {
    let a = MgfModel::poisson(1.0).unwrap();
    let b = MgfModel::poisson(2.0).unwrap();
    let d = Design::new(200, 20).unwrap();
    let exact = poisson_selection_error(1.0, 20, 2.0, 180);
    assert!((exact - 1.0848210889869347e-4).abs() < 1e-9, "oracle drifted: {exact}");
    let mc = monte_carlo_selection_error(&a, &b, &d, 300_000, 20240519).unwrap();
    let band = 4.0 * mc.std_error.max((exact / 300_000.0).sqrt());
    assert!(
        (mc.estimate - exact).abs() <= band,
        "MC {} vs exact {exact} ± {band}",
        mc.estimate
    );
}

#[test]
fn selection_error_rate_matches_general_rate_function() {
    // at ν = 0.2 the finite-n prefactor is within the stated 25% slack
    let a = MgfModel::poisson(1.0).unwrap();
    let b = MgfModel::poisson(2.0).unwrap();
    let n = 200u64;
    let nu = AllocationFraction::new(0.2).unwrap();
    let h = general_rate(nu, &a, &b).unwrap().rate;
    let exact = poisson_selection_error(1.0, 40, 2.0, 160);
    let empirical = -(exact.ln()) / n as f64;
    let rel = (empirical - (-h)) / (-h);
    assert!(rel.abs() <= 0.25, "empirical {empirical} vs rate {} (rel {rel})", -h);
}
