//! Special functions and one-dimensional convex minimization.
//!
//! Everything here is pure and reentrant; the rest of the crate leans on
//! these primitives for rate-function infima and exact binomial tables.

// coefficient tables are kept verbatim from their published sources
#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};

/// Interval on the extended real line. Endpoints may be infinite and are
/// treated as open (never evaluated).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || !(lo < hi) {
            return Err(Error::Domain(format!("invalid interval ({lo}, {hi})")));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    /// (0, +inf)
    pub fn positive_half_line() -> Self {
        Self { lo: 0.0, hi: f64::INFINITY }
    }

    /// (-inf, +inf)
    pub fn real_line() -> Self {
        Self { lo: f64::NEG_INFINITY, hi: f64::INFINITY }
    }

    /// (0, 1)
    pub fn unit() -> Self {
        Self { lo: 0.0, hi: 1.0 }
    }
}

// Lanczos approximation with g = 7 and nine terms. Relative accuracy of the
// series is ~1e-15, so ln Γ carries roughly 14-15 significant digits.
const LANCZOS_COEFFS: [f64; 8] = [
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];
const LANCZOS_BASE: f64 = 0.99999999999980993;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Natural log of the gamma function for `x > 0`.
pub fn log_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection: Γ(x) Γ(1-x) = π / sin(πx)
        let pi = std::f64::consts::PI;
        return pi.ln() - (pi * x).sin().ln() - log_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut series = LANCZOS_BASE;
    for (i, c) in LANCZOS_COEFFS.iter().enumerate() {
        series += c / (z + i as f64 + 1.0);
    }
    let t = z + 7.5;
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + series.ln()
}

/// log of the binomial pmf, `log[ C(n,k) p^k (1-p)^(n-k) ]`.
pub fn log_binomial_pmf(n: u64, k: u64, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("success probability {p} must lie in (0, 1)")));
    }
    if k > n {
        return Err(Error::Domain(format!("successes {k} exceed trials {n}")));
    }
    let (nf, kf) = (n as f64, k as f64);
    let log_choose = log_gamma(nf + 1.0) - log_gamma(kf + 1.0) - log_gamma(nf - kf + 1.0);
    Ok(log_choose + kf * p.ln() + (nf - kf) * (-p).ln_1p())
}

// W. J. Cody's rational Chebyshev approximation for erf/erfc, accurate to
// roughly one ulp in double precision over all three ranges.
const ERF_A: [f64; 4] = [
    3.16112374387056560e0,
    1.13864154151050156e2,
    3.77485237685302021e2,
    3.20937758913846947e3,
];
const ERF_A5: f64 = 1.85777706184603153e-1;
const ERF_B: [f64; 4] = [
    2.36012909523441209e1,
    2.44024637934444173e2,
    1.28261652607737228e3,
    2.84423683343917062e3,
];
const ERF_C: [f64; 8] = [
    5.64188496988670089e-1,
    8.88314979438837594e0,
    6.61191906371416295e1,
    2.98635138197400131e2,
    8.81952221241769090e2,
    1.71204761263407058e3,
    2.05107837782607147e3,
    1.23033935479799725e3,
];
const ERF_C9: f64 = 2.15311535474403846e-8;
const ERF_D: [f64; 8] = [
    1.57449261107098347e1,
    1.17693950891312499e2,
    5.37181101862009858e2,
    1.62138957456669019e3,
    3.29079923573345963e3,
    4.36261909014324716e3,
    3.43936767414372164e3,
    1.23033935480374942e3,
];
const ERF_P: [f64; 5] = [
    3.05326634961232344e-1,
    3.60344899949804439e-1,
    1.25781726111229246e-1,
    1.60837851487422766e-2,
    6.58749161529837803e-4,
];
const ERF_P6: f64 = 1.63153871373020978e-2;
const ERF_Q: [f64; 5] = [
    2.56852019228982242e0,
    1.87295284992346047e0,
    5.27905102951428412e-1,
    6.05183413124413191e-2,
    2.33520497626869185e-3,
];
const FRAC_1_SQRT_PI: f64 = 5.641_895_835_477_563e-1;

/// Complementary error function.
fn erfc(x: f64) -> f64 {
    let y = x.abs();
    if y <= 0.46875 {
        // erfc via erf on the central range
        let z = if y > 1e-300 { y * y } else { 0.0 };
        let mut xnum = ERF_A5 * z;
        let mut xden = z;
        for i in 0..3 {
            xnum = (xnum + ERF_A[i]) * z;
            xden = (xden + ERF_B[i]) * z;
        }
        return 1.0 - x * (xnum + ERF_A[3]) / (xden + ERF_B[3]);
    }
    let result = if y <= 4.0 {
        let mut xnum = ERF_C9 * y;
        let mut xden = y;
        for i in 0..7 {
            xnum = (xnum + ERF_C[i]) * y;
            xden = (xden + ERF_D[i]) * y;
        }
        (xnum + ERF_C[7]) / (xden + ERF_D[7])
    } else if y < 26.543 {
        let ysq = 1.0 / (y * y);
        let mut xnum = ERF_P6 * ysq;
        let mut xden = ysq;
        for i in 0..4 {
            xnum = (xnum + ERF_P[i]) * ysq;
            xden = (xden + ERF_Q[i]) * ysq;
        }
        let r = ysq * (xnum + ERF_P[4]) / (xden + ERF_Q[4]);
        (FRAC_1_SQRT_PI - r) / y
    } else {
        0.0
    };
    // split exp(-y^2) to keep the argument exactly representable
    let ysq = (y * 16.0).trunc() / 16.0;
    let del = (y - ysq) * (y + ysq);
    let scaled = (-ysq * ysq).exp() * (-del).exp() * result;
    if x < 0.0 {
        2.0 - scaled
    } else {
        scaled
    }
}

/// Standard normal distribution function Φ(x).
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * std::f64::consts::FRAC_1_SQRT_2)
}

/// Standard normal density φ(x).
pub fn normal_pdf(x: f64) -> f64 {
    const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

// Acklam's rational approximation to the normal quantile (~1.15e-9 relative),
// refined below by a Newton step on the high-accuracy CDF.
const PPF_A: [f64; 6] = [
    -3.969683028665376e+01,
    2.209460984245205e+02,
    -2.759285104469687e+02,
    1.383577518672690e+02,
    -3.066479806614716e+01,
    2.506628277459239e+00,
];
const PPF_B: [f64; 5] = [
    -5.447609879822406e+01,
    1.615858368580409e+02,
    -1.556989798598866e+02,
    6.680131188771972e+01,
    -1.328068155288572e+01,
];
const PPF_C: [f64; 6] = [
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e+00,
    -2.549732539343734e+00,
    4.374664141464968e+00,
    2.938163982698783e+00,
];
const PPF_D: [f64; 4] = [
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e+00,
    3.754408661907416e+00,
];

/// Inverse of `normal_cdf` for `q` in the open unit interval.
pub fn normal_quantile(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Domain(format!("quantile argument {q} must lie in (0, 1)")));
    }
    const P_LOW: f64 = 0.02425;
    let x = if q < P_LOW {
        let r = (-2.0 * q.ln()).sqrt();
        (((((PPF_C[0] * r + PPF_C[1]) * r + PPF_C[2]) * r + PPF_C[3]) * r + PPF_C[4]) * r
            + PPF_C[5])
            / ((((PPF_D[0] * r + PPF_D[1]) * r + PPF_D[2]) * r + PPF_D[3]) * r + 1.0)
    } else if q <= 1.0 - P_LOW {
        let r = q - 0.5;
        let s = r * r;
        (((((PPF_A[0] * s + PPF_A[1]) * s + PPF_A[2]) * s + PPF_A[3]) * s + PPF_A[4]) * s
            + PPF_A[5])
            * r
            / (((((PPF_B[0] * s + PPF_B[1]) * s + PPF_B[2]) * s + PPF_B[3]) * s + PPF_B[4]) * s
                + 1.0)
    } else {
        let r = (-2.0 * (1.0 - q).ln()).sqrt();
        -(((((PPF_C[0] * r + PPF_C[1]) * r + PPF_C[2]) * r + PPF_C[3]) * r + PPF_C[4]) * r
            + PPF_C[5])
            / ((((PPF_D[0] * r + PPF_D[1]) * r + PPF_D[2]) * r + PPF_D[3]) * r + 1.0)
    };
    // one Newton step against the full-accuracy CDF
    let pdf = normal_pdf(x);
    if pdf > 1e-280 {
        Ok(x - (normal_cdf(x) - q) / pdf)
    } else {
        Ok(x)
    }
}

const BRACKET_EXPANSION: f64 = 2.0;
const EVAL_BUDGET: usize = 10_000;

struct Probe<F: Fn(f64) -> f64> {
    f: F,
    evals: usize,
}

impl<F: Fn(f64) -> f64> Probe<F> {
    fn eval(&mut self, x: f64) -> f64 {
        self.evals += 1;
        let v = (self.f)(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }
}

// Step from x in direction `dir`; if the step would cross a finite boundary,
// move half-way toward it instead so poles are approached geometrically.
fn advance(x: f64, step: f64, dir: f64, lo: f64, hi: f64) -> f64 {
    let cand = x + dir * step;
    if dir > 0.0 {
        if cand < hi {
            cand
        } else {
            x + (hi - x) * 0.5
        }
    } else if cand > lo {
        cand
    } else {
        x - (x - lo) * 0.5
    }
}

/// Minimizes a convex function over the interior of `domain`.
///
/// Returns `(x_min, f_min)`. A descent-ascent bracket is found first by
/// doubling steps (clamped geometrically toward finite endpoints, which
/// handles objectives that blow up at a pole), then the bracket is shrunk by
/// golden-section probes that always keep the best point interior.
pub fn minimize_convex<F: Fn(f64) -> f64>(f: F, domain: Interval, tol: f64) -> Result<(f64, f64)> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance {tol} must be positive")));
    }
    let (lo, hi) = (domain.lo(), domain.hi());
    let mut probe = Probe { f, evals: 0 };

    // seed point in the interior
    let mut x0 = if lo.is_finite() && hi.is_finite() {
        0.5 * (lo + hi)
    } else if lo.is_finite() {
        lo + 1.0
    } else if hi.is_finite() {
        hi - 1.0
    } else {
        0.0
    };
    let mut f0 = probe.eval(x0);
    let anchor = if lo.is_finite() { lo } else if hi.is_finite() { hi } else { 0.0 };
    let mut pulls = 0;
    while !f0.is_finite() {
        pulls += 1;
        if pulls > 200 {
            return Err(Error::Optimizer(
                "no finite objective value found inside the domain".into(),
            ));
        }
        x0 += (anchor - x0) * 0.5;
        f0 = probe.eval(x0);
    }

    let mut step = 0.125 * x0.abs().max(1.0);
    if hi.is_finite() && lo.is_finite() {
        step = step.min(0.25 * (hi - lo));
    }

    // establish a descent direction or an immediate bracket around the seed
    let x_r = advance(x0, step, 1.0, lo, hi);
    let f_r = probe.eval(x_r);
    let (dir, mut prev, mut cur, mut f_cur) = if f_r < f0 {
        (1.0, x0, x_r, f_r)
    } else {
        let x_l = advance(x0, step, -1.0, lo, hi);
        let f_l = probe.eval(x_l);
        if f_l < f0 {
            (-1.0, x0, x_l, f_l)
        } else {
            return golden_shrink(&mut probe, x_l.min(x_r), x0, x_l.max(x_r), f0, tol);
        }
    };

    // expand until the objective rises again
    loop {
        if probe.evals >= EVAL_BUDGET {
            return Err(Error::Optimizer(format!(
                "no descent-ascent bracket within {EVAL_BUDGET} evaluations"
            )));
        }
        step *= BRACKET_EXPANSION;
        let next = advance(cur, step, dir, lo, hi);
        if !next.is_finite() {
            return Err(Error::Optimizer("descent did not terminate before overflow".into()));
        }
        if (next - cur).abs() <= f64::EPSILON * (cur.abs() + 1.0) {
            // pinned against a boundary while still descending
            return Ok((cur, f_cur));
        }
        let f_next = probe.eval(next);
        if f_next >= f_cur {
            return golden_shrink(&mut probe, prev.min(next), cur, prev.max(next), f_cur, tol);
        }
        prev = cur;
        cur = next;
        f_cur = f_next;
    }
}

// Golden-section refinement of a bracket (a, m, b) with f(m) known to be no
// larger than the endpoint values. Probes the larger side; the best point is
// never discarded, so flat or infinite stretches near the endpoints are safe.
fn golden_shrink<F: Fn(f64) -> f64>(
    probe: &mut Probe<F>,
    mut a: f64,
    mut m: f64,
    mut b: f64,
    mut fm: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    const GOLDEN_FRAC: f64 = 0.381_966_011_250_105_1; // 2 - φ
    loop {
        let width = b - a;
        let floor = 4.0 * f64::EPSILON * (a.abs() + b.abs() + 1.0);
        if width <= tol.max(floor) {
            return Ok((m, fm));
        }
        if probe.evals >= EVAL_BUDGET {
            return Err(Error::Optimizer(format!(
                "bracket not reduced to tolerance within {EVAL_BUDGET} evaluations"
            )));
        }
        let x = if m - a > b - m {
            m - GOLDEN_FRAC * (m - a)
        } else {
            m + GOLDEN_FRAC * (b - m)
        };
        let fx = probe.eval(x);
        if fx < fm {
            if x < m {
                b = m;
            } else {
                a = m;
            }
            m = x;
            fm = fx;
        } else if x < m {
            a = x;
        } else {
            b = x;
        }
    }
}

/// Least-squares fit of `y = a x^2 + b x + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub rmse: f64,
}

/// Fits the three-parameter polynomial model through the normal equations.
pub fn fit_quadratic(points: &[(f64, f64)]) -> Result<QuadraticFit> {
    let mut xs: Vec<f64> = points.iter().map(|&(x, _)| x).collect();
    xs.sort_by(|u, v| u.partial_cmp(v).expect("non-NaN abscissa"));
    xs.dedup();
    if xs.len() < 3 {
        return Err(Error::Singular(format!(
            "quadratic fit needs 3 distinct abscissas, got {}",
            xs.len()
        )));
    }

    // normal equations for the monomial basis [x^2, x, 1]
    let mut s = [0.0f64; 5];
    let mut t = [0.0f64; 3];
    for &(x, y) in points {
        let x2 = x * x;
        s[0] += 1.0;
        s[1] += x;
        s[2] += x2;
        s[3] += x2 * x;
        s[4] += x2 * x2;
        t[0] += y;
        t[1] += x * y;
        t[2] += x2 * y;
    }
    let mut mat = [
        [s[4], s[3], s[2], t[2]],
        [s[3], s[2], s[1], t[1]],
        [s[2], s[1], s[0], t[0]],
    ];
    // Gaussian elimination with partial pivoting
    for col in 0..3 {
        let pivot_row = (col..3)
            .max_by(|&i, &j| mat[i][col].abs().partial_cmp(&mat[j][col].abs()).unwrap())
            .unwrap();
        mat.swap(col, pivot_row);
        let pivot = mat[col][col];
        if pivot.abs() < 1e-12 * s[4].max(1.0) {
            return Err(Error::Singular("normal equations are singular".into()));
        }
        let pivot_vals = mat[col];
        for row in mat.iter_mut().skip(col + 1) {
            let factor = row[col] / pivot;
            for (k, pv) in pivot_vals.iter().enumerate().skip(col) {
                row[k] -= factor * pv;
            }
        }
    }
    let mut coef = [0.0f64; 3];
    for row in (0..3).rev() {
        let mut acc = mat[row][3];
        for (k, c) in coef.iter().enumerate().take(3).skip(row + 1) {
            acc -= mat[row][k] * c;
        }
        coef[row] = acc / mat[row][row];
    }

    let mut sq_sum = 0.0;
    for &(x, y) in points {
        let r = coef[0] * x * x + coef[1] * x + coef[2] - y;
        sq_sum += r * r;
    }
    Ok(QuadraticFit {
        a: coef[0],
        b: coef[1],
        c: coef[2],
        rmse: (sq_sum / points.len() as f64).sqrt(),
    })
}
