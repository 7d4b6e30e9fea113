//! Exact finite-n computations over the joint binomial outcome table:
//! Wald-test power, dose-misselection probability, exhaustive optimal
//! allocations, minimal sample sizes, and a seeded Monte Carlo oracle.
//!
//! For a fixed row `y_A` the Wald statistic is nondecreasing in `y_B`, so the
//! rejection region of each row is a pair of tail intervals. Every power
//! evaluation therefore costs `O(N_A (log N_B + band))` instead of a full
//! `O(N_A N_B)` sweep, and the no-reject band is accumulated separately so
//! that deficits far below machine epsilon relative to 1 stay meaningful.

use crate::asymptotic::{AllocationFraction, MtdSpec};
use crate::error::{Error, Result};
use crate::models::{MgfModel, SuccessPair};
use crate::numerics::{log_binomial_pmf, normal_quantile};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Sidedness of the Wald test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sided {
    One,
    Two,
}

/// Critical value and sidedness. The two-sided test rejects when `W² > K²`
/// (strict), the one-sided test when `W > K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestSpec {
    k: f64,
    sided: Sided,
}

impl TestSpec {
    pub fn new(k: f64, sided: Sided) -> Result<Self> {
        match sided {
            Sided::One if !(k >= 0.0) => {
                Err(Error::Domain(format!("one-sided critical value {k} must be >= 0")))
            }
            Sided::Two if !(k > 0.0) => {
                Err(Error::Domain(format!("two-sided critical value {k} must be > 0")))
            }
            _ => Ok(Self { k, sided }),
        }
    }

    pub fn one_sided(k: f64) -> Result<Self> {
        Self::new(k, Sided::One)
    }

    pub fn two_sided(k: f64) -> Result<Self> {
        Self::new(k, Sided::Two)
    }

    pub fn critical_value(&self) -> f64 {
        self.k
    }

    pub fn sided(&self) -> Sided {
        self.sided
    }
}

/// Group sizes of a two-arm design.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Design {
    n: u64,
    n_a: u64,
    n_b: u64,
}

impl Design {
    pub fn new(n: u64, n_a: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("total sample size {n} must be at least 2")));
        }
        if n_a == 0 || n_a >= n {
            return Err(Error::Domain(format!("group size N_A = {n_a} must satisfy 1 <= N_A <= {}", n - 1)));
        }
        Ok(Self { n, n_a, n_b: n - n_a })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn n_a(&self) -> u64 {
        self.n_a
    }

    pub fn n_b(&self) -> u64 {
        self.n_b
    }

    pub fn nu(&self) -> f64 {
        self.n_a as f64 / self.n as f64
    }
}

/// Rounds `n · ν` to a valid group size: `clamp(floor(n ν + 0.5), 1, n-1)`.
pub fn allocation_to_count(n: u64, nu: f64) -> u64 {
    let raw = (n as f64 * nu + 0.5).floor();
    (raw as i64).clamp(1, n as i64 - 1) as u64
}

/// Wald statistic with plug-in variance. When the plug-in variance vanishes
/// the sign of the difference decides: 0 for equal proportions, ±∞ otherwise,
/// which keeps the rejection decision continuous in the outcome table.
pub fn wald_statistic(y_a: u64, n_a: u64, y_b: u64, n_b: u64) -> f64 {
    debug_assert!(y_a <= n_a && y_b <= n_b && n_a > 0 && n_b > 0);
    let pa = y_a as f64 / n_a as f64;
    let pb = y_b as f64 / n_b as f64;
    let v = pa * (1.0 - pa) / n_a as f64 + pb * (1.0 - pb) / n_b as f64;
    if v == 0.0 {
        if pb > pa {
            f64::INFINITY
        } else if pb < pa {
            f64::NEG_INFINITY
        } else {
            0.0
        }
    } else {
        (pb - pa) / v.sqrt()
    }
}

/// Rejection and acceptance masses of a test, accumulated separately.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSplit {
    /// Probability mass of the rejection region.
    pub reject: f64,
    /// Probability mass of the acceptance region, `1 - power` up to rounding.
    pub accept: f64,
}

impl PowerSplit {
    /// Total enumerated mass; equals 1 up to accumulation error.
    pub fn total_mass(&self) -> f64 {
        self.reject + self.accept
    }

    /// Power, taken from whichever side is smaller for full precision.
    pub fn power(&self) -> f64 {
        if self.reject <= self.accept {
            self.reject
        } else {
            1.0 - self.accept
        }
    }
}

struct ArmPmf {
    pmf: Vec<f64>,
    /// prefix[i] = Σ_{j < i} pmf[j]
    prefix: Vec<f64>,
    /// suffix[i] = Σ_{j >= i} pmf[j]
    suffix: Vec<f64>,
}

fn binomial_table(n: u64, p: f64) -> ArmPmf {
    let len = n as usize + 1;
    let mut pmf = Vec::with_capacity(len);
    for k in 0..=n {
        pmf.push(log_binomial_pmf(n, k, p).expect("validated pmf arguments").exp());
    }
    let mut prefix = vec![0.0; len + 1];
    for i in 0..len {
        prefix[i + 1] = prefix[i] + pmf[i];
    }
    let mut suffix = vec![0.0; len + 1];
    for i in (0..len).rev() {
        suffix[i] = suffix[i + 1] + pmf[i];
    }
    ArmPmf { pmf, prefix, suffix }
}

/// Smallest `y` in `0..=n_b` with `pred(y)` true, or `n_b + 1` if none.
/// `pred` must be monotone false-then-true.
fn first_true(n_b: u64, pred: impl Fn(u64) -> bool) -> u64 {
    let (mut lo, mut hi) = (0u64, n_b + 1);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

fn split_for(pair: &SuccessPair, design: &Design, test: &TestSpec) -> PowerSplit {
    let fa = binomial_table(design.n_a, pair.p_a());
    let fb = binomial_table(design.n_b, pair.p_b());
    split_with_tables(design, test, &fa, &fb)
}

fn split_with_tables(design: &Design, test: &TestSpec, fa: &ArmPmf, fb: &ArmPmf) -> PowerSplit {
    let (n_a, n_b) = (design.n_a, design.n_b);
    let k = test.critical_value();
    let mut reject = 0.0;
    let mut accept = 0.0;
    for y_a in 0..=n_a {
        // W(y_a, ·) is nondecreasing, so each tail is a single cut
        let hi_cut = first_true(n_b, |y_b| wald_statistic(y_a, n_a, y_b, n_b) > k);
        let lo_cut = match test.sided() {
            Sided::One => 0,
            Sided::Two => first_true(n_b, |y_b| wald_statistic(y_a, n_a, y_b, n_b) >= -k),
        };
        let w = fa.pmf[y_a as usize];
        reject += w * (fb.prefix[lo_cut as usize] + fb.suffix[hi_cut as usize]);
        let band: f64 = match test.sided() {
            Sided::One => fb.prefix[hi_cut as usize],
            Sided::Two => fb.pmf[lo_cut as usize..hi_cut as usize].iter().sum(),
        };
        accept += w * band;
    }
    PowerSplit { reject, accept }
}

fn canonical(pair: &SuccessPair, design: &Design, test: &TestSpec) -> (SuccessPair, Design) {
    // the two-sided test is invariant under a joint arm swap; a canonical
    // orientation makes the swap identity hold bit-for-bit
    if test.sided() == Sided::Two && pair.p_a() > pair.p_b() {
        (pair.swapped(), Design { n: design.n, n_a: design.n_b, n_b: design.n_a })
    } else {
        (*pair, *design)
    }
}

/// Rejection/acceptance masses of the Wald test by exact enumeration.
pub fn exact_power_split(pair: &SuccessPair, design: &Design, test: &TestSpec) -> PowerSplit {
    let (p, d) = canonical(pair, design, test);
    split_for(&p, &d, test)
}

/// Exact power of the Wald test; deterministic, no sampling.
pub fn exact_power(pair: &SuccessPair, design: &Design, test: &TestSpec) -> f64 {
    exact_power_split(pair, design, test).power()
}

/// One point of a power curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub n_a: u64,
    pub power: f64,
}

/// Exact power across a grid of group sizes for fixed `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerCurve {
    pub n: u64,
    pub points: Vec<CurvePoint>,
}

/// Result of the exhaustive allocation scan.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalAllocation {
    pub n_a: u64,
    pub power: f64,
    pub curve: PowerCurve,
}

/// Grid of group sizes scanned for a given `n`: single-subject arms are
/// excluded for `n >= 4` because their plug-in variance is identically zero,
/// which turns the two-sided test into a degenerate always-reject rule.
pub fn allocation_scan_grid(n: u64) -> std::ops::RangeInclusive<u64> {
    if n >= 4 {
        2..=n - 2
    } else {
        1..=n - 1
    }
}

/// Exhaustive scan over the allocation grid maximizing exact power.
///
/// Allocations are ranked by their acceptance mass (so powers within rounding
/// distance of 1 still compare correctly); exact ties go to the group size
/// closest to `n/2`, then to the smaller one. The scan is data-parallel with
/// a deterministic reduction.
pub fn optimal_allocation_exact(
    pair: &SuccessPair,
    n: u64,
    test: &TestSpec,
) -> Result<OptimalAllocation> {
    if n < 2 {
        return Err(Error::Domain(format!("total sample size {n} must be at least 2")));
    }
    let splits: Vec<(u64, PowerSplit)> = allocation_scan_grid(n)
        .collect::<Vec<u64>>()
        .into_par_iter()
        .map(|n_a| {
            let design = Design::new(n, n_a).expect("grid sizes are valid");
            (n_a, exact_power_split(pair, &design, test))
        })
        .collect();
    let &(best_n_a, best_split) = splits
        .iter()
        .reduce(|best, cand| if scan_prefers(cand, best, n) { cand } else { best })
        .expect("scan grid is non-empty");
    let points = splits
        .iter()
        .map(|&(n_a, s)| CurvePoint { n_a, power: s.power() })
        .collect();
    Ok(OptimalAllocation {
        n_a: best_n_a,
        power: best_split.power(),
        curve: PowerCurve { n, points },
    })
}

// Ranking used by the allocation scan: smaller acceptance mass wins; exact
// ties prefer the group size closest to n/2, then the smaller group size.
fn scan_prefers(cand: &(u64, PowerSplit), best: &(u64, PowerSplit), n: u64) -> bool {
    if cand.1.accept != best.1.accept {
        return cand.1.accept < best.1.accept;
    }
    let dist = |n_a: u64| (2 * n_a).abs_diff(n);
    if dist(cand.0) != dist(best.0) {
        return dist(cand.0) < dist(best.0);
    }
    cand.0 < best.0
}

/// Exact probability of declaring the lower dose the target,
/// `P[(p̂_A + p̂_B)/2 >= p₀]`, by enumeration. The boundary is included.
pub fn exact_mtd_error(spec: &MtdSpec, design: &Design) -> f64 {
    let fa = binomial_table(design.n_a, spec.p_a());
    let fb = binomial_table(design.n_b, spec.p_b());
    let (n_a, n_b) = (design.n_a, design.n_b);
    let p0 = spec.p0();
    let mut mass = 0.0;
    for y_a in 0..=n_a {
        let pa = y_a as f64 / n_a as f64;
        let cut = first_true(n_b, |y_b| (pa + y_b as f64 / n_b as f64) / 2.0 >= p0);
        mass += fa.pmf[y_a as usize] * fb.suffix[cut as usize];
    }
    mass
}

/// Smallest `n <= n_max` whose one-sided Wald test at level `alpha` reaches
/// power `beta`, with group sizes taken from `rule`. With `stable_window > 1`
/// the power must stay at or above `beta` for that many consecutive `n`; the
/// first `n` of the qualifying run is returned.
pub fn minimal_sample_size<F: Fn(u64) -> AllocationFraction>(
    pair: &SuccessPair,
    alpha: f64,
    beta: f64,
    rule: F,
    n_max: u64,
    stable_window: u64,
) -> Result<Option<u64>> {
    if !(alpha > 0.0 && alpha < beta && beta < 1.0) {
        return Err(Error::Domain(format!("need 0 < alpha < beta < 1, got ({alpha}, {beta})")));
    }
    if stable_window == 0 {
        return Err(Error::Domain("stable window must be at least 1".into()));
    }
    let test = TestSpec::one_sided(normal_quantile(1.0 - alpha)?)?;
    let mut run_start: Option<u64> = None;
    for n in 2..=n_max {
        let n_a = allocation_to_count(n, rule(n).value());
        let design = Design::new(n, n_a)?;
        if exact_power(pair, &design, &test) >= beta {
            let start = *run_start.get_or_insert(n);
            if n - start + 1 >= stable_window {
                return Ok(Some(start));
            }
        } else {
            run_start = None;
        }
    }
    Ok(None)
}

/// Monte Carlo estimate with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
}

/// Seeded Monte Carlo estimate of the misselection probability
/// `P(Ȳ_A >= Ȳ_B)` for general response models (arm A must not have the
/// larger mean). Each arm draws from its own ChaCha8 stream, so the first `r`
/// replications of a longer run reproduce a shorter run with the same seed.
pub fn monte_carlo_selection_error(
    a: &MgfModel,
    b: &MgfModel,
    design: &Design,
    reps: u64,
    seed: u64,
) -> Result<McEstimate> {
    if a.mean() > b.mean() {
        return Err(Error::Domain("arm B must not have the smaller mean".into()));
    }
    if reps == 0 {
        return Err(Error::Domain("at least one replication is required".into()));
    }
    let mut rng_a = ChaCha8Rng::seed_from_u64(seed);
    rng_a.set_stream(1);
    let mut rng_b = ChaCha8Rng::seed_from_u64(seed);
    rng_b.set_stream(2);
    let (m_a, m_b) = (design.n_a as usize, design.n_b as usize);
    let mut hits = 0u64;
    for _ in 0..reps {
        let mean_a = a.sample_mean(&mut rng_a, m_a);
        let mean_b = b.sample_mean(&mut rng_b, m_b);
        if mean_a >= mean_b {
            hits += 1;
        }
    }
    let estimate = hits as f64 / reps as f64;
    let std_error = (estimate * (1.0 - estimate) / reps as f64).sqrt();
    Ok(McEstimate { estimate, std_error })
}
