//! Response-distribution models exposed through mean, variance and log-MGF.
//!
//! Only the pieces the allocation criteria need are modelled: the log moment
//! generating function with its finiteness domain, the first two moments and
//! deterministic sampling. Densities and fitting stay out of scope.

use crate::error::{Error, Result};
use crate::numerics::Interval;
use rand::Rng;
use rand_distr::Distribution;

/// The two Bernoulli success probabilities of a binary-response trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuccessPair {
    p_a: f64,
    p_b: f64,
}

impl SuccessPair {
    pub fn new(p_a: f64, p_b: f64) -> Result<Self> {
        for (name, p) in [("p_A", p_a), ("p_B", p_b)] {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::Domain(format!("{name} = {p} must lie in (0, 1)")));
            }
        }
        Ok(Self { p_a, p_b })
    }

    pub fn p_a(&self) -> f64 {
        self.p_a
    }

    pub fn p_b(&self) -> f64 {
        self.p_b
    }

    /// Arms exchanged.
    pub fn swapped(&self) -> Self {
        Self { p_a: self.p_b, p_b: self.p_a }
    }

    /// Success and failure relabelled on both arms, `(1-p_B, 1-p_A)`.
    pub fn complemented(&self) -> Self {
        Self { p_a: 1.0 - self.p_b, p_b: 1.0 - self.p_a }
    }
}

/// log(1 - p + p e^t) without overflow for large |t|.
pub(crate) fn bernoulli_log_mgf(p: f64, t: f64) -> f64 {
    if t <= 0.0 {
        ((1.0 - p) + p * t.exp()).ln()
    } else {
        t + (p + (1.0 - p) * (-t).exp()).ln()
    }
}

/// A response distribution with a tractable moment generating function.
///
/// Gamma is parameterized by shape and scale, so the MGF is finite exactly on
/// `t < 1/scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MgfModel {
    Bernoulli { p: f64 },
    Poisson { lambda: f64 },
    Gamma { shape: f64, scale: f64 },
    Normal { mu: f64, var: f64 },
}

impl MgfModel {
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("bernoulli p = {p} must lie in (0, 1)")));
        }
        Ok(Self::Bernoulli { p })
    }

    pub fn poisson(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Domain(format!("poisson lambda = {lambda} must be positive")));
        }
        Ok(Self::Poisson { lambda })
    }

    pub fn gamma(shape: f64, scale: f64) -> Result<Self> {
        if !(shape > 0.0 && shape.is_finite()) {
            return Err(Error::Domain(format!("gamma shape = {shape} must be positive")));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Domain(format!("gamma scale = {scale} must be positive")));
        }
        Ok(Self::Gamma { shape, scale })
    }

    pub fn normal(mu: f64, var: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::Domain(format!("normal mu = {mu} must be finite")));
        }
        if !(var > 0.0 && var.is_finite()) {
            return Err(Error::Domain(format!("normal var = {var} must be positive")));
        }
        Ok(Self::Normal { mu, var })
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::Bernoulli { p } => p,
            Self::Poisson { lambda } => lambda,
            Self::Gamma { shape, scale } => shape * scale,
            Self::Normal { mu, .. } => mu,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            Self::Bernoulli { p } => p * (1.0 - p),
            Self::Poisson { lambda } => lambda,
            Self::Gamma { shape, scale } => shape * scale * scale,
            Self::Normal { var, .. } => var,
        }
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    /// log E[e^{tX}]; `+inf` outside the finiteness domain.
    pub fn log_mgf(&self, t: f64) -> f64 {
        match *self {
            Self::Bernoulli { p } => bernoulli_log_mgf(p, t),
            Self::Poisson { lambda } => lambda * t.exp_m1(),
            Self::Gamma { shape, scale } => {
                if t < 1.0 / scale {
                    -shape * (-scale * t).ln_1p()
                } else {
                    f64::INFINITY
                }
            }
            Self::Normal { mu, var } => mu * t + 0.5 * var * t * t,
        }
    }

    /// Interval on which the MGF is finite; always contains 0 in its interior.
    pub fn mgf_domain(&self) -> Interval {
        match *self {
            Self::Gamma { scale, .. } => {
                Interval::new(f64::NEG_INFINITY, 1.0 / scale).expect("scale > 0")
            }
            _ => Interval::real_line(),
        }
    }

    fn sampler(&self) -> Sampler {
        match *self {
            Self::Bernoulli { p } => Sampler::Bernoulli(p),
            Self::Poisson { lambda } => {
                Sampler::Poisson(rand_distr::Poisson::new(lambda).expect("validated lambda"))
            }
            Self::Gamma { shape, scale } => {
                Sampler::Gamma(rand_distr::Gamma::new(shape, scale).expect("validated gamma"))
            }
            Self::Normal { mu, var } => {
                Sampler::Normal(rand_distr::Normal::new(mu, var.sqrt()).expect("validated normal"))
            }
        }
    }

    /// `m` independent draws. The same generator state yields the same stream.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, m: usize) -> Vec<f64> {
        let sampler = self.sampler();
        (0..m).map(|_| sampler.draw(rng)).collect()
    }

    /// Mean of `m` draws without materializing them; consumes the generator
    /// identically to [`MgfModel::sample`].
    pub fn sample_mean<R: Rng + ?Sized>(&self, rng: &mut R, m: usize) -> f64 {
        let sampler = self.sampler();
        let mut acc = 0.0;
        for _ in 0..m {
            acc += sampler.draw(rng);
        }
        acc / m as f64
    }
}

enum Sampler {
    Bernoulli(f64),
    Poisson(rand_distr::Poisson<f64>),
    Gamma(rand_distr::Gamma<f64>),
    Normal(rand_distr::Normal<f64>),
}

impl Sampler {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Bernoulli(p) => {
                if rng.random::<f64>() < *p {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Poisson(d) => d.sample(rng),
            Self::Gamma(d) => d.sample(rng),
            Self::Normal(d) => d.sample(rng),
        }
    }
}

impl std::fmt::Display for MgfModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            Self::Bernoulli { p } => write!(f, "bernoulli:p={p}"),
            Self::Poisson { lambda } => write!(f, "poisson:lambda={lambda}"),
            Self::Gamma { shape, scale } => write!(f, "gamma:shape={shape},scale={scale}"),
            Self::Normal { mu, var } => write!(f, "normal:mu={mu},var={var}"),
        }
    }
}

impl std::str::FromStr for MgfModel {
    type Err = Error;

    /// Parses the CLI model syntax, e.g. `bernoulli:p=0.5`, `poisson:lambda=2`,
    /// `gamma:shape=0.5,scale=0.5` (or `rate=` in place of `scale=`) and
    /// `normal:mu=0,var=1`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Domain(format!("model spec '{s}' is missing ':'")))?;
        let mut params = std::collections::BTreeMap::new();
        for part in rest.split(',') {
            let (key, val) = part
                .split_once('=')
                .ok_or_else(|| Error::Domain(format!("model parameter '{part}' is not key=value")))?;
            let val: f64 = val
                .trim()
                .parse()
                .map_err(|_| Error::Domain(format!("model parameter '{part}' is not numeric")))?;
            params.insert(key.trim().to_string(), val);
        }
        let take = |params: &mut std::collections::BTreeMap<String, f64>, key: &str| {
            params
                .remove(key)
                .ok_or_else(|| Error::Domain(format!("model spec '{s}' is missing '{key}='")))
        };
        let model = match kind.trim() {
            "bernoulli" => Self::bernoulli(take(&mut params, "p")?)?,
            "poisson" => Self::poisson(take(&mut params, "lambda")?)?,
            "gamma" => {
                let shape = take(&mut params, "shape")?;
                let scale = if params.contains_key("rate") {
                    let rate = take(&mut params, "rate")?;
                    if !(rate > 0.0) {
                        return Err(Error::Domain(format!("gamma rate = {rate} must be positive")));
                    }
                    1.0 / rate
                } else {
                    take(&mut params, "scale")?
                };
                Self::gamma(shape, scale)?
            }
            "normal" => {
                let mu = take(&mut params, "mu")?;
                let var = take(&mut params, "var")?;
                Self::normal(mu, var)?
            }
            other => return Err(Error::Domain(format!("unknown model kind '{other}'"))),
        };
        if let Some(extra) = params.keys().next() {
            return Err(Error::Domain(format!("model spec '{s}' has unknown parameter '{extra}'")));
        }
        Ok(model)
    }
}
