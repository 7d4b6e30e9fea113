//! Asymptotic allocation criteria: Neyman fractions, shrinking-alternative
//! (Pitman) sample-size limits, and the large-deviation rate functions whose
//! minimizers give the fixed-alternative (Bahadur) optimal allocations.

use crate::error::{Error, Result};
use crate::models::{bernoulli_log_mgf, MgfModel, SuccessPair};
use crate::numerics::{minimize_convex, normal_quantile, Interval};

/// Tolerance of every inner tilt minimization.
const TILT_TOL: f64 = 1e-10;

/// Proportion of subjects assigned to arm A, strictly inside (0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AllocationFraction(f64);

impl AllocationFraction {
    pub fn new(nu: f64) -> Result<Self> {
        if !(nu > 0.0 && nu < 1.0) {
            return Err(Error::Domain(format!("allocation {nu} must lie in (0, 1)")));
        }
        Ok(Self(nu))
    }

    pub fn balanced() -> Self {
        Self(0.5)
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    pub fn complement(&self) -> Self {
        Self(1.0 - self.0)
    }
}

/// Shrinking-alternative scenario: success probabilities `p + δ/√k` on both
/// arms, with a one-sided test run at level `alpha` and target power `beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitmanScenario {
    delta_a: f64,
    delta_b: f64,
    p: f64,
    alpha: f64,
    beta: f64,
}

impl PitmanScenario {
    pub fn new(delta_a: f64, delta_b: f64, p: f64, alpha: f64, beta: f64) -> Result<Self> {
        if !(delta_a < delta_b) {
            return Err(Error::Domain(format!("need delta_A < delta_B, got {delta_a} >= {delta_b}")));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("p = {p} must lie in (0, 1)")));
        }
        if !(alpha > 0.0 && alpha < beta && beta < 1.0) {
            return Err(Error::Domain(format!("need 0 < alpha < beta < 1, got ({alpha}, {beta})")));
        }
        Ok(Self { delta_a, delta_b, p, alpha, beta })
    }

    pub fn delta_a(&self) -> f64 {
        self.delta_a
    }

    pub fn delta_b(&self) -> f64 {
        self.delta_b
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Probabilities of the k-th problem in the sequence.
    pub fn pair_at(&self, k: u64) -> Result<SuccessPair> {
        let root = (k as f64).sqrt();
        SuccessPair::new(self.p + self.delta_a / root, self.p + self.delta_b / root)
    }
}

/// Dose-finding comparison: toxicity probabilities of two doses and the
/// target probability, with the higher dose nearer the target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MtdSpec {
    p_a: f64,
    p_b: f64,
    p0: f64,
}

impl MtdSpec {
    pub fn new(p_a: f64, p_b: f64, p0: f64) -> Result<Self> {
        for (name, p) in [("p_A", p_a), ("p_B", p_b)] {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::Domain(format!("{name} = {p} must lie in (0, 1)")));
            }
        }
        if !(p0 > 0.0 && p0 <= 1.0) {
            return Err(Error::Domain(format!("p0 = {p0} must lie in (0, 1]")));
        }
        if !(p_a < p_b) {
            return Err(Error::Domain(format!("need p_A < p_B, got {p_a} >= {p_b}")));
        }
        // arm B must be the true target: equivalent to (p_A + p_B)/2 < p0
        if !((p_b - p0).abs() < (p_a - p0).abs()) {
            return Err(Error::Domain(format!(
                "dose B must be nearer the target: |{p_b} - {p0}| >= |{p_a} - {p0}|"
            )));
        }
        Ok(Self { p_a, p_b, p0 })
    }

    pub fn p_a(&self) -> f64 {
        self.p_a
    }

    pub fn p_b(&self) -> f64 {
        self.p_b
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn pair(&self) -> SuccessPair {
        SuccessPair::new(self.p_a, self.p_b).expect("validated probabilities")
    }
}

/// A rate value together with the tilt that attains it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateValue {
    pub rate: f64,
    pub t_star: f64,
}

/// An optimal allocation with the rate attained there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateResult {
    pub nu_star: AllocationFraction,
    pub rate_at_min: f64,
    pub t_star: f64,
}

/// Allocation proportional to the response standard deviations,
/// `σ_A / (σ_A + σ_B)`; minimizes the variance of the difference estimator.
pub fn neyman_allocation(a: &MgfModel, b: &MgfModel) -> AllocationFraction {
    let (sa, sb) = (a.std_dev(), b.std_dev());
    AllocationFraction(sa / (sa + sb))
}

/// Neyman fraction for two Bernoulli arms.
pub fn bernoulli_neyman_allocation(pair: &SuccessPair) -> AllocationFraction {
    let a = MgfModel::Bernoulli { p: pair.p_a() };
    let b = MgfModel::Bernoulli { p: pair.p_b() };
    neyman_allocation(&a, &b)
}

/// Scaled log-MGF of the difference of sample proportions,
/// `ν log(1-p_A+p_A e^{t/ν}) + (1-ν) log(1-p_B+p_B e^{-t/(1-ν)})`,
/// evaluated in log space so large `|t|/ν` cannot overflow.
pub fn diff_log_mgf(t: f64, nu: AllocationFraction, pair: &SuccessPair) -> f64 {
    let nu = nu.value();
    nu * bernoulli_log_mgf(pair.p_a(), t / nu)
        + (1.0 - nu) * bernoulli_log_mgf(pair.p_b(), -t / (1.0 - nu))
}

/// Error-decay rate of the Wald test at a fixed allocation: the infimum of
/// [`diff_log_mgf`] over positive tilts. Arms are oriented internally so the
/// drift `p_A - p_B` is negative; the result is invariant under relabelling.
pub fn bahadur_rate(nu: AllocationFraction, pair: &SuccessPair) -> Result<RateValue> {
    if pair.p_a() == pair.p_b() {
        return Err(Error::Domain("rate requires p_A != p_B".into()));
    }
    let (nu, pair) = if pair.p_a() > pair.p_b() {
        (nu.complement(), pair.swapped())
    } else {
        (nu, *pair)
    };
    let (t_star, rate) = minimize_convex(
        |t| diff_log_mgf(t, nu, &pair),
        Interval::positive_half_line(),
        TILT_TOL,
    )?;
    Ok(RateValue { rate, t_star })
}

/// Closed-form minimizer of the Bahadur rate over allocations.
///
/// For `p_A < p_B`:
/// `ν* = log{ p_B log(p_B/p_A) / [(1-p_B) log((1-p_A)/(1-p_B))] } / log{ p_B(1-p_A) / [p_A(1-p_B)] }`;
/// the opposite order is handled by the arm-swap symmetry `ν*(p_A,p_B) = 1 - ν*(p_B,p_A)`.
pub fn bahadur_allocation_closed_form(pair: &SuccessPair) -> Result<AllocationFraction> {
    if pair.p_a() == pair.p_b() {
        return Err(Error::Domain("optimal allocation requires p_A != p_B".into()));
    }
    if pair.p_a() > pair.p_b() {
        return Ok(bahadur_allocation_closed_form(&pair.swapped())?.complement());
    }
    let (pa, pb) = (pair.p_a(), pair.p_b());
    let (qa, qb) = (1.0 - pa, 1.0 - pb);
    let numerator = (pb * (pb / pa).ln() / (qb * (qa / qb).ln())).ln();
    let denominator = (pb * qa / (pa * qb)).ln();
    AllocationFraction::new(numerator / denominator)
}

/// Numeric minimizer of `ν ↦ bahadur_rate(ν)` over (0, 1). The outer search
/// nests the exact tilt minimization; the rate is strictly convex in ν, so the
/// minimum is unique.
pub fn bahadur_allocation_numeric(pair: &SuccessPair, tol: f64) -> Result<RateResult> {
    if pair.p_a() == pair.p_b() {
        return Err(Error::Domain("optimal allocation requires p_A != p_B".into()));
    }
    let (nu_star, rate) = minimize_convex(
        |nu| match bahadur_rate(AllocationFraction(nu), pair) {
            Ok(v) => v.rate,
            Err(_) => f64::INFINITY,
        },
        Interval::unit(),
        tol,
    )?;
    let nu_star = AllocationFraction::new(nu_star)?;
    let at_min = bahadur_rate(nu_star, pair)?;
    Ok(RateResult { nu_star, rate_at_min: rate, t_star: at_min.t_star })
}

/// Limiting ratio of required sample size to problem index under shrinking
/// alternatives: `[(z_{1-α} - z_{1-β}) / (δ_B - δ_A)]² p(1-p) / (ν(1-ν))`.
pub fn pitman_limit(sc: &PitmanScenario, nu: AllocationFraction) -> f64 {
    let z_alpha = normal_quantile(1.0 - sc.alpha).expect("alpha in (0,1)");
    let z_beta = normal_quantile(1.0 - sc.beta).expect("beta in (0,1)");
    let base = (z_alpha - z_beta) / (sc.delta_b - sc.delta_a);
    let nu = nu.value();
    base * base * sc.p * (1.0 - sc.p) / (nu * (1.0 - nu))
}

/// Decay rate of the probability of declaring the lower dose the target:
/// the infimum over all real tilts of
/// `ν log(1-p_A+p_A e^{t/ν}) + (1-ν) log(1-p_B+p_B e^{t/(1-ν)}) - 2 p₀ t`.
/// Both exponents carry `+t`; the slope at 0 is `p_A + p_B - 2p₀ < 0`, so the
/// minimizer is positive even though the search runs over the whole line.
pub fn mtd_rate(nu: AllocationFraction, spec: &MtdSpec) -> Result<RateValue> {
    let nu_v = nu.value();
    let (pa, pb, p0) = (spec.p_a(), spec.p_b(), spec.p0());
    let objective = move |t: f64| {
        nu_v * bernoulli_log_mgf(pa, t / nu_v)
            + (1.0 - nu_v) * bernoulli_log_mgf(pb, t / (1.0 - nu_v))
            - 2.0 * p0 * t
    };
    let (t_star, rate) = minimize_convex(objective, Interval::real_line(), TILT_TOL)?;
    Ok(RateValue { rate, t_star })
}

/// Allocation minimizing the dose-misselection rate [`mtd_rate`] over (0, 1).
pub fn mtd_bahadur_allocation(spec: &MtdSpec, tol: f64) -> Result<RateResult> {
    let (nu_star, rate) = minimize_convex(
        |nu| match mtd_rate(AllocationFraction(nu), spec) {
            Ok(v) => v.rate,
            Err(_) => f64::INFINITY,
        },
        Interval::unit(),
        tol,
    )?;
    let nu_star = AllocationFraction::new(nu_star)?;
    let at_min = mtd_rate(nu_star, spec)?;
    Ok(RateResult { nu_star, rate_at_min: rate, t_star: at_min.t_star })
}

/// Shrinking-alternative sample-size limit for the dose-finding problem:
/// `{z_{1-α} / (2K)}² {p_A(1-p_A)/ν + p_B(1-p_B)/(1-ν)}`.
pub fn mtd_pitman_limit(
    pair: &SuccessPair,
    k_dev: f64,
    alpha: f64,
    nu: AllocationFraction,
) -> Result<f64> {
    if !(k_dev > 0.0) {
        return Err(Error::Domain(format!("deviation scale {k_dev} must be positive")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha = {alpha} must lie in (0, 1)")));
    }
    let z = normal_quantile(1.0 - alpha)?;
    let base = z / (2.0 * k_dev);
    let nu = nu.value();
    let (pa, pb) = (pair.p_a(), pair.p_b());
    Ok(base * base * (pa * (1.0 - pa) / nu + pb * (1.0 - pb) / (1.0 - nu)))
}

/// Minimizer of [`mtd_pitman_limit`] over allocations; this is the Neyman
/// fraction of the two toxicity probabilities.
pub fn mtd_neyman_allocation(pair: &SuccessPair) -> AllocationFraction {
    bernoulli_neyman_allocation(pair)
}

/// Misselection rate for general responses:
/// `h(ν) = inf_t [ν log M_A(t/ν) + (1-ν) log M_B(-t/(1-ν))]` over the tilts
/// admissible for both MGF domains. If arm A has the larger mean, the arms are
/// swapped and the allocation complemented, so the result is always the decay
/// rate of selecting the inferior arm.
pub fn general_rate(nu: AllocationFraction, a: &MgfModel, b: &MgfModel) -> Result<RateValue> {
    if a.mean() == b.mean() {
        return Err(Error::Domain("selection rate requires different means".into()));
    }
    if a.mean() > b.mean() {
        return general_rate(nu.complement(), b, a);
    }
    let nu_v = nu.value();
    // t/ν must stay below dom(M_A).hi and -t/(1-ν) above dom(M_B).lo
    let mut t_hi = f64::INFINITY;
    if a.mgf_domain().hi().is_finite() {
        t_hi = t_hi.min(nu_v * a.mgf_domain().hi());
    }
    if b.mgf_domain().lo().is_finite() {
        t_hi = t_hi.min((1.0 - nu_v) * -b.mgf_domain().lo());
    }
    if !(t_hi > 0.0) {
        return Err(Error::Domain("no positive tilt is admissible for these models".into()));
    }
    let (av, bv) = (*a, *b);
    let objective = move |t: f64| {
        nu_v * av.log_mgf(t / nu_v) + (1.0 - nu_v) * bv.log_mgf(-t / (1.0 - nu_v))
    };
    let domain = Interval::new(0.0, t_hi)?;
    let (t_star, rate) = minimize_convex(objective, domain, TILT_TOL)?;
    Ok(RateValue { rate, t_star })
}

/// Allocation minimizing [`general_rate`] over (0, 1).
pub fn general_bahadur_allocation(a: &MgfModel, b: &MgfModel, tol: f64) -> Result<RateResult> {
    if a.mean() == b.mean() {
        return Err(Error::Domain("selection rate requires different means".into()));
    }
    let (nu_star, rate) = minimize_convex(
        |nu| match general_rate(AllocationFraction(nu), a, b) {
            Ok(v) => v.rate,
            Err(_) => f64::INFINITY,
        },
        Interval::unit(),
        tol,
    )?;
    let nu_star = AllocationFraction::new(nu_star)?;
    let at_min = general_rate(nu_star, a, b)?;
    Ok(RateResult { nu_star, rate_at_min: rate, t_star: at_min.t_star })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(pa: f64, pb: f64) -> SuccessPair {
        SuccessPair::new(pa, pb).unwrap()
    }

    fn nu(v: f64) -> AllocationFraction {
        AllocationFraction::new(v).unwrap()
    }

    #[test]
    fn neyman_examples() {
        let got = bernoulli_neyman_allocation(&pair(0.5, 0.8)).value();
        assert!((got - 0.5555555555555556).abs() < 1e-12);

        assert_eq!(bernoulli_neyman_allocation(&pair(0.4, 0.4)).value(), 0.5);

        let a = MgfModel::poisson(1.0).unwrap();
        let b = MgfModel::poisson(2.0).unwrap();
        let got = neyman_allocation(&a, &b).value();
        assert!((got - 1.0 / (1.0 + 2.0f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn diff_log_mgf_zero_tilt() {
        for &(pa, pb) in &[(0.5, 0.8), (0.1, 0.9), (0.33, 0.41)] {
            for &v in &[0.1, 0.5, 0.77] {
                assert_eq!(diff_log_mgf(0.0, nu(v), &pair(pa, pb)), 0.0);
            }
        }
    }

    #[test]
    fn diff_log_mgf_complement_identity() {
        // H(t, ν; p_A, p_B) = H(t, 1-ν; 1-p_B, 1-p_A)
        let p = pair(0.5, 0.8);
        for &t in &[0.01, 0.05, 0.3, 1.4] {
            for &v in &[0.2, 0.4, 0.5, 0.9] {
                let lhs = diff_log_mgf(t, nu(v), &p);
                let rhs = diff_log_mgf(t, nu(1.0 - v), &p.complemented());
                assert!((lhs - rhs).abs() < 1e-12, "t={t} nu={v}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn diff_log_mgf_high_precision_spot() {
        // reference value computed with 50-digit arithmetic
        let got = diff_log_mgf(0.05, nu(0.5), &pair(0.5, 0.8));
        assert!((got - -0.013967250670091603).abs() < 1e-12, "{got}");
    }

    #[test]
    fn bahadur_rate_is_negative_inside() {
        let v = bahadur_rate(nu(0.5), &pair(0.5, 0.8)).unwrap();
        assert!(v.rate < 0.0);
        assert!(v.t_star > 0.0);
    }

    #[test]
    fn bahadur_rate_matches_dense_grid() {
        // 10^6-point grid over the bracket as an independent check
        let p = pair(0.3, 0.7);
        let v = bahadur_rate(nu(0.5), &p).unwrap();
        let mut best = f64::INFINITY;
        for i in 1..1_000_000u64 {
            let t = 2.0 * i as f64 / 1_000_000.0;
            best = best.min(diff_log_mgf(t, nu(0.5), &p));
        }
        assert!((v.rate - best).abs() < 1e-9, "{} vs {best}", v.rate);
    }

    #[test]
    fn bahadur_rate_stationary_at_t_star() {
        let h = 1e-6;
        for &(pa, pb, v) in &[(0.5, 0.8, 0.518), (0.3, 0.7, 0.5), (0.85, 0.95, 0.541)] {
            let p = pair(pa, pb);
            let r = bahadur_rate(nu(v), &p).unwrap();
            let d = (diff_log_mgf(r.t_star + h, nu(v), &p) - diff_log_mgf(r.t_star - h, nu(v), &p))
                / (2.0 * h);
            assert!(d.abs() < 1e-6, "({pa},{pb}) slope {d}");
        }
    }

    #[test]
    fn table_minimizer_beats_neighbours() {
        let p = pair(0.5, 0.8);
        let at = |v: f64| bahadur_rate(nu(v), &p).unwrap().rate;
        let g_star = at(0.518);
        for v in [0.4, 0.5, 0.6] {
            assert!(g_star <= at(v), "g(0.518) should beat g({v})");
        }
    }

    #[test]
    fn closed_form_reference_values() {
        let got = bahadur_allocation_closed_form(&pair(0.5, 0.8)).unwrap().value();
        assert!((got - 0.518).abs() < 5e-4, "{got}");
        let got = bahadur_allocation_closed_form(&pair(0.7, 0.9)).unwrap().value();
        assert!((got - 0.5349374).abs() < 1e-7, "{got}");
        // p_A = 1 - p_B makes both arms mirror images
        let got = bahadur_allocation_closed_form(&pair(0.2, 0.8)).unwrap().value();
        assert!((got - 0.5).abs() < 1e-12, "{got}");
        assert!(bahadur_allocation_closed_form(&pair(0.4, 0.4)).is_err());
    }

    #[test]
    fn numeric_reference_values() {
        let got = bahadur_allocation_numeric(&pair(0.5, 0.9), 1e-9).unwrap();
        assert!((got.nu_star.value() - 0.542).abs() < 1e-3);
        assert!(got.rate_at_min < 0.0);
        let got = bahadur_allocation_numeric(&pair(0.85, 0.95), 1e-9).unwrap();
        assert!((got.nu_star.value() - 0.541).abs() < 1e-3);
    }

    #[test]
    fn numeric_arm_swap_symmetry() {
        let fwd = bahadur_allocation_numeric(&pair(0.4, 0.6), 1e-9).unwrap().nu_star.value();
        let swp = bahadur_allocation_numeric(&pair(0.6, 0.4), 1e-9).unwrap().nu_star.value();
        assert!((swp - (1.0 - fwd)).abs() < 1e-7, "{swp} vs 1-{fwd}");
    }

    #[test]
    fn pitman_limit_properties() {
        let sc = PitmanScenario::new(0.0, 1.0, 0.5, 0.05, 0.8).unwrap();
        let at_half = pitman_limit(&sc, nu(0.5));
        // hand value from the quantile difference
        assert!((at_half - 6.182557232019766).abs() < 1e-9, "{at_half}");
        for v in [0.1, 0.3, 0.45, 0.62, 0.9] {
            assert!(pitman_limit(&sc, nu(v)) >= at_half);
        }
        // doubling the gap divides the limit by four
        let wide = PitmanScenario::new(0.0, 2.0, 0.5, 0.05, 0.8).unwrap();
        assert!((pitman_limit(&wide, nu(0.5)) - at_half / 4.0).abs() < 1e-12);
    }

    #[test]
    fn mtd_rate_nonpositive_and_table_values() {
        let spec = MtdSpec::new(0.1, 0.3, 0.28).unwrap();
        let h = 1e-6;
        for v in [0.2, 0.42, 0.7] {
            let r = mtd_rate(nu(v), &spec).unwrap();
            assert!(r.rate <= 0.0);
            assert!(r.t_star > 0.0, "minimizer should sit at positive tilt");
            let obj = |t: f64| {
                v * crate::models::bernoulli_log_mgf(spec.p_a(), t / v)
                    + (1.0 - v) * crate::models::bernoulli_log_mgf(spec.p_b(), t / (1.0 - v))
                    - 2.0 * spec.p0() * t
            };
            let d = (obj(r.t_star + h) - obj(r.t_star - h)) / (2.0 * h);
            assert!(d.abs() < 1e-6, "nu={v}: slope {d} at reported tilt");
        }
        let got = mtd_bahadur_allocation(&spec, 1e-9).unwrap().nu_star.value();
        assert!((got - 0.420).abs() < 1e-3, "{got}");

        let spec = MtdSpec::new(0.2, 0.35, 0.3).unwrap();
        let got = mtd_bahadur_allocation(&spec, 1e-9).unwrap().nu_star.value();
        assert!((got - 0.460).abs() < 1e-3, "{got}");
    }

    #[test]
    fn mtd_pitman_minimized_at_neyman() {
        let p = pair(0.1, 0.3);
        let ney = mtd_neyman_allocation(&p);
        assert!((ney.value() - 0.396).abs() < 1e-3);
        let base = mtd_pitman_limit(&p, 1.0, 0.05, ney).unwrap();
        for v in [0.1, 0.3, 0.5, 0.7] {
            assert!(mtd_pitman_limit(&p, 1.0, 0.05, nu(v)).unwrap() >= base);
        }
        // doubling the deviation scale divides the limit by four
        let twice = mtd_pitman_limit(&p, 2.0, 0.05, ney).unwrap();
        assert!((twice - base / 4.0).abs() < 1e-12);
    }

    #[test]
    fn mtd_spec_invariants() {
        assert!(MtdSpec::new(0.3, 0.1, 0.28).is_err());
        // dose A nearer the target than dose B
        assert!(MtdSpec::new(0.1, 0.3, 0.15).is_err());
        assert!(MtdSpec::new(0.1, 0.3, 0.28).is_ok());
        assert!(MtdSpec::new(0.3, 0.6, 1.0).is_ok());
    }

    #[test]
    fn general_rate_specializes_to_bernoulli() {
        let p = pair(0.5, 0.8);
        let a = MgfModel::bernoulli(0.5).unwrap();
        let b = MgfModel::bernoulli(0.8).unwrap();
        for v in [0.2, 0.5, 0.518, 0.8] {
            let g = bahadur_rate(nu(v), &p).unwrap().rate;
            let h = general_rate(nu(v), &a, &b).unwrap().rate;
            assert!((g - h).abs() < 1e-10, "nu={v}: {g} vs {h}");
        }
    }

    #[test]
    fn general_rate_normal_closed_form() {
        // Normal arms: h(ν) = -(μ_B - μ_A)² / [2 (σ_A²/ν + σ_B²/(1-ν))],
        // minimized exactly at the Neyman fraction.
        let a = MgfModel::normal(0.0, 1.0).unwrap();
        let b = MgfModel::normal(1.0, 4.0).unwrap();
        for v in [0.2, 1.0 / 3.0, 0.37, 0.6] {
            let h = general_rate(nu(v), &a, &b).unwrap().rate;
            let analytic = -1.0 / (2.0 * (1.0 / v + 4.0 / (1.0 - v)));
            assert!((h - analytic).abs() < 1e-9, "nu={v}: {h} vs {analytic}");
        }
        let opt = general_bahadur_allocation(&a, &b, 1e-9).unwrap();
        assert!((opt.nu_star.value() - 1.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn general_rate_poisson_reference() {
        let a = MgfModel::poisson(1.0).unwrap();
        let b = MgfModel::poisson(2.0).unwrap();
        let opt = general_bahadur_allocation(&a, &b, 1e-9).unwrap();
        assert!((opt.nu_star.value() - 0.471).abs() < 1e-3, "{}", opt.nu_star.value());
        assert!(opt.rate_at_min < 0.0);
        // the reported tilt is stationary
        let v = opt.nu_star.value();
        let obj =
            |t: f64| v * a.log_mgf(t / v) + (1.0 - v) * b.log_mgf(-t / (1.0 - v));
        let h = 1e-6;
        let d = (obj(opt.t_star + h) - obj(opt.t_star - h)) / (2.0 * h);
        assert!(d.abs() < 1e-6, "slope {d} at reported tilt");

        let a = MgfModel::poisson(4.0).unwrap();
        let b = MgfModel::poisson(5.0).unwrap();
        let opt = general_bahadur_allocation(&a, &b, 1e-9).unwrap();
        assert!((opt.nu_star.value() - 0.491).abs() < 1e-3, "{}", opt.nu_star.value());
    }

    #[test]
    fn general_rate_relabeling_symmetry() {
        let a = MgfModel::poisson(2.0).unwrap();
        let b = MgfModel::poisson(3.0).unwrap();
        let fwd = general_bahadur_allocation(&a, &b, 1e-9).unwrap().nu_star.value();
        let swp = general_bahadur_allocation(&b, &a, 1e-9).unwrap().nu_star.value();
        assert!((fwd + swp - 1.0).abs() < 1e-7, "{fwd} + {swp} != 1");
    }

    #[test]
    fn general_rate_gamma_pole_is_handled() {
        // M_A blows up at t/ν = 1/scale; the admissible-tilt interval is finite
        let a = MgfModel::gamma(0.5, 0.5).unwrap();
        let b = MgfModel::gamma(0.5, 0.6).unwrap();
        let r = general_rate(nu(0.5), &a, &b).unwrap();
        assert!(r.rate < 0.0 && r.rate.is_finite());
        let opt = general_bahadur_allocation(&a, &b, 1e-9).unwrap();
        assert!(opt.nu_star.value() > 0.0 && opt.nu_star.value() < 1.0);
    }

    #[test]
    fn general_rate_rejects_equal_means() {
        let a = MgfModel::poisson(2.0).unwrap();
        assert!(general_rate(nu(0.5), &a, &a).is_err());
    }

    #[test]
    fn rate_vanishes_toward_edges() {
        let p = pair(0.5, 0.8);
        for &v in &[1e-3, 1.0 - 1e-3] {
            let g = bahadur_rate(nu(v), &p).unwrap().rate;
            assert!(g < 0.0 && g.abs() < 0.02, "g({v}) = {g}");
        }
    }

    #[test]
    fn rate_negative_on_grid() {
        for pa in [0.1, 0.3, 0.5, 0.7] {
            let p = pair(pa, pa + 0.2);
            for i in 1..=19 {
                let v = 0.05 * i as f64;
                assert!(bahadur_rate(nu(v), &p).unwrap().rate < 0.0, "({pa}, nu={v})");
            }
        }
    }

    #[test]
    fn rate_midpoint_convexity() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for _ in 0..20 {
            let pa: f64 = rng.random_range(0.05..0.9);
            let pb: f64 = (pa + rng.random_range(0.05..0.1)).min(0.95);
            let p = pair(pa, pb);
            let g = |v: f64| bahadur_rate(nu(v), &p).unwrap().rate;
            for i in 1..50 {
                let v1 = 0.02 * i as f64 * 0.96 + 0.02;
                let v2 = (v1 + 0.3).min(0.97);
                let mid = 0.5 * (v1 + v2);
                assert!(
                    g(mid) <= 0.5 * (g(v1) + g(v2)) + 1e-10,
                    "convexity violated at ({pa},{pb},{v1},{v2})"
                );
            }
        }
    }

    #[test]
    fn closed_form_complement_symmetry() {
        for i in 1..=9 {
            for j in 1..=9 {
                if i == j {
                    continue;
                }
                let (pa, pb) = (0.1 * i as f64, 0.1 * j as f64);
                let p = pair(pa, pb);
                let a = bahadur_allocation_closed_form(&p).unwrap().value();
                let b = bahadur_allocation_closed_form(&p.complemented()).unwrap().value();
                assert!((a + b - 1.0).abs() < 1e-10, "({pa},{pb}): {a} + {b}");
            }
        }
    }
}
