//! Parameter grids and target values for the built-in tables and figures.
//!
//! These constants are the single source of truth shared by the CLI table
//! and figure commands and by the regression suite; the numeric columns are
//! the reference values the tool is expected to reproduce.

/// Row of the binomial allocation table: closed-form optimum vs Neyman.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinomialRow {
    pub p_a: f64,
    pub p_b: f64,
    /// Reference rate-optimal allocation, 3 decimals.
    pub bahadur: f64,
    /// Reference Neyman allocation, 3 decimals.
    pub neyman: f64,
}

pub const BINOMIAL_ALLOCATION_ROWS: [BinomialRow; 8] = [
    BinomialRow { p_a: 0.5, p_b: 0.8, bahadur: 0.518, neyman: 0.556 },
    BinomialRow { p_a: 0.5, p_b: 0.65, bahadur: 0.504, neyman: 0.512 },
    BinomialRow { p_a: 0.6, p_b: 0.75, bahadur: 0.510, neyman: 0.531 },
    BinomialRow { p_a: 0.7, p_b: 0.75, bahadur: 0.505, neyman: 0.514 },
    BinomialRow { p_a: 0.7, p_b: 0.85, bahadur: 0.521, neyman: 0.562 },
    BinomialRow { p_a: 0.7, p_b: 0.9, bahadur: 0.535, neyman: 0.604 },
    BinomialRow { p_a: 0.85, p_b: 0.95, bahadur: 0.541, neyman: 0.621 },
    BinomialRow { p_a: 0.5, p_b: 0.9, bahadur: 0.542, neyman: 0.625 },
];

/// Row of the dose-finding allocation table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MtdRow {
    pub p_a: f64,
    pub p_b: f64,
    pub p0: f64,
    /// Reference rate-optimal allocation, 3 decimals.
    pub bahadur: f64,
    /// Reference shrinking-alternative (Neyman) allocation, 3 decimals.
    pub pitman: f64,
}

pub const MTD_ALLOCATION_ROWS: [MtdRow; 6] = [
    MtdRow { p_a: 0.1, p_b: 0.3, p0: 0.28, bahadur: 0.420, pitman: 0.396 },
    MtdRow { p_a: 0.2, p_b: 0.35, p0: 0.3, bahadur: 0.460, pitman: 0.456 },
    MtdRow { p_a: 0.22, p_b: 0.33, p0: 0.3, bahadur: 0.471, pitman: 0.468 },
    MtdRow { p_a: 0.25, p_b: 0.35, p0: 0.33, bahadur: 0.479, pitman: 0.476 },
    MtdRow { p_a: 0.2, p_b: 0.4, p0: 0.33, bahadur: 0.455, pitman: 0.449 },
    MtdRow { p_a: 0.1, p_b: 0.4, p0: 0.3, bahadur: 0.400, pitman: 0.380 },
];

/// Row of the general-response allocation table for Poisson arms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonRow {
    pub lambda_a: f64,
    pub lambda_b: f64,
    pub bahadur: f64,
    pub neyman: f64,
}

pub const POISSON_ALLOCATION_ROWS: [PoissonRow; 4] = [
    PoissonRow { lambda_a: 1.0, lambda_b: 2.0, bahadur: 0.471, neyman: 0.414 },
    PoissonRow { lambda_a: 2.0, lambda_b: 3.0, bahadur: 0.483, neyman: 0.449 },
    PoissonRow { lambda_a: 3.0, lambda_b: 4.0, bahadur: 0.488, neyman: 0.464 },
    PoissonRow { lambda_a: 4.0, lambda_b: 5.0, bahadur: 0.491, neyman: 0.472 },
];

/// Row of the general-response allocation table for Gamma arms. The reference
/// table does not say whether the second parameter is a scale or a rate, so
/// both readings are computed and annotated by the table command.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaRow {
    pub shape_a: f64,
    pub second_a: f64,
    pub shape_b: f64,
    pub second_b: f64,
    pub bahadur: f64,
    pub neyman: f64,
}

pub const GAMMA_ALLOCATION_ROWS: [GammaRow; 4] = [
    GammaRow { shape_a: 0.5, second_a: 0.5, shape_b: 0.5, second_b: 0.6, bahadur: 0.515, neyman: 0.590 },
    GammaRow { shape_a: 0.5, second_a: 0.5, shape_b: 0.5, second_b: 0.7, bahadur: 0.528, neyman: 0.662 },
    GammaRow { shape_a: 0.5, second_a: 0.5, shape_b: 0.5, second_b: 0.8, bahadur: 0.539, neyman: 0.719 },
    GammaRow { shape_a: 0.5, second_a: 0.5, shape_b: 0.5, second_b: 0.9, bahadur: 0.549, neyman: 0.764 },
];

/// Parameters of the fixed power-curve figure.
pub mod power_curve_figure {
    /// Total sample size.
    pub const N: u64 = 500;
    pub const P_A: f64 = 0.7;
    pub const P_B: f64 = 0.9;
    /// Two-sided critical value.
    pub const CRITICAL_VALUE: f64 = 1.96;
    /// Marked allocations: balanced, rate-optimal, Neyman (7 decimals).
    pub const BALANCED_NU: f64 = 0.5;
    pub const BAHADUR_NU: f64 = 0.5349374;
    pub const NEYMAN_NU: f64 = 0.6043561;
    /// Allocation window used for the parabolic fit of the curve.
    pub const FIT_LO: f64 = 0.3;
    pub const FIT_HI: f64 = 0.8;
}

/// Parameters of the power-deficit sweep figure.
pub mod deficit_sweep_figure {
    /// First-arm success probability grid: `P_A_MIN ..= P_A_MAX`.
    pub const P_A_MIN: f64 = 0.5;
    pub const P_A_MAX: f64 = 0.75;
    /// Second arm sits at `p_A + OFFSET`.
    pub const OFFSET: f64 = 0.2;
    /// Default grid step; 0.025 and 0.05 are also accepted.
    pub const DEFAULT_STEP: f64 = 0.01;
    /// Two-sided critical value.
    pub const CRITICAL_VALUE: f64 = 1.96;
    /// Sample sizes of the moderate and large variants.
    pub const N_MODERATE: u64 = 200;
    pub const N_LARGE: u64 = 500;
}
