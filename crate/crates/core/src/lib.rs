//! Optimal subject allocation for two-arm trials.
//!
//! Two asymptotic criteria are implemented side by side: the
//! shrinking-alternative (Pitman) comparison, whose optimum is the balanced
//! design for binary responses, and the fixed-alternative (Bahadur)
//! comparison, whose optimum minimizes a large-deviation rate function and
//! depends on the unknown response parameters. Exact finite-sample power
//! computations over the joint binomial outcome table back the asymptotic
//! answers and reproduce the reference tables and figures.
//!
//! Modules:
//! - [`numerics`]: log-gamma, normal CDF/quantile, convex line search,
//!   quadratic least squares.
//! - [`models`]: response distributions exposed through mean, variance and
//!   log-MGF with its finiteness domain.
//! - [`asymptotic`]: Neyman, Pitman and rate-function allocations.
//! - [`exact`]: exact power, dose-misselection probability, exhaustive
//!   allocation scans, minimal sample sizes, Monte Carlo oracle.
//! - [`reference`](mod@reference): built-in parameter grids and reference
//!   target values.
//!
//! All computations are pure; grid sweeps parallelize with deterministic
//! reductions, so results do not depend on thread count.

// parameter checks use `!(a < b)` so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotic;
pub mod error;
pub mod exact;
pub mod models;
pub mod numerics;
pub mod reference;

pub use asymptotic::{
    bahadur_allocation_closed_form, bahadur_allocation_numeric, bahadur_rate,
    bernoulli_neyman_allocation, diff_log_mgf, general_bahadur_allocation, general_rate,
    mtd_bahadur_allocation, mtd_neyman_allocation, mtd_pitman_limit, mtd_rate, neyman_allocation,
    pitman_limit, AllocationFraction, MtdSpec, PitmanScenario, RateResult, RateValue,
};
pub use error::{Error, Result};
pub use exact::{
    allocation_to_count, exact_mtd_error, exact_power, exact_power_split, minimal_sample_size,
    monte_carlo_selection_error, optimal_allocation_exact, wald_statistic, CurvePoint, Design,
    McEstimate, OptimalAllocation, PowerCurve, PowerSplit, Sided, TestSpec,
};
pub use models::{MgfModel, SuccessPair};
pub use numerics::{
    fit_quadratic, log_binomial_pmf, log_gamma, minimize_convex, normal_cdf, normal_pdf,
    normal_quantile, Interval, QuadraticFit,
};
