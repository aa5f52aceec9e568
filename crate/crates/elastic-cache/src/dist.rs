//! Inter-request time distributions: closed-form F, integral of F, mean, and
//! inverse-transform sampling.
//!
//! The analytic cost formulas only ever need `cdf`, `cdf_integral`, and
//! `mean`; all three are exact closed forms here so the analytic engine can
//! serve as an oracle for the simulator. Samplers draw from the same
//! parameterization so simulated and analytic results are directly
//! comparable.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::ModelError;

/// A distribution of the time between consecutive requests for one object.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InterRequestDistribution {
    /// Memoryless gaps with rate `rate`.
    Exponential {
        /// Rate parameter (mean gap is `1/rate`).
        rate: f64,
    },
    /// Sum of `shape` independent exponential stages, each with rate `rate`.
    Erlang {
        /// Number of stages.
        shape: u32,
        /// Per-stage rate (mean gap is `shape/rate`).
        rate: f64,
    },
    /// Every gap equals `gap`.
    Deterministic {
        /// The constant gap.
        gap: f64,
    },
    /// Heavy-tailed gaps on `[scale, inf)` with tail index `shape`.
    Pareto {
        /// Tail index; must exceed 1 so the mean is finite.
        shape: f64,
        /// Minimum gap.
        scale: f64,
    },
}

impl InterRequestDistribution {
    /// Exponential distribution with the given rate.
    pub fn exponential(rate: f64) -> Result<Self, ModelError> {
        if !rate.is_finite() || rate <= 0.0 {
            return Err(ModelError::Parameter(format!(
                "exponential rate must be positive and finite, got {rate}"
            )));
        }
        Ok(Self::Exponential { rate })
    }

    /// Erlang distribution with `shape` stages of rate `rate`.
    pub fn erlang(shape: u32, rate: f64) -> Result<Self, ModelError> {
        if shape < 1 {
            return Err(ModelError::Parameter("erlang shape must be >= 1".into()));
        }
        if !rate.is_finite() || rate <= 0.0 {
            return Err(ModelError::Parameter(format!(
                "erlang rate must be positive and finite, got {rate}"
            )));
        }
        Ok(Self::Erlang { shape, rate })
    }

    /// Deterministic distribution with constant gap `gap`.
    pub fn deterministic(gap: f64) -> Result<Self, ModelError> {
        if !gap.is_finite() || gap <= 0.0 {
            return Err(ModelError::Parameter(format!(
                "deterministic gap must be positive and finite, got {gap}"
            )));
        }
        Ok(Self::Deterministic { gap })
    }

    /// Pareto distribution with tail index `shape > 1` and minimum `scale`.
    pub fn pareto(shape: f64, scale: f64) -> Result<Self, ModelError> {
        if !shape.is_finite() || shape <= 1.0 {
            return Err(ModelError::Parameter(format!(
                "pareto shape must be > 1 for a finite mean, got {shape}"
            )));
        }
        if !scale.is_finite() || scale <= 0.0 {
            return Err(ModelError::Parameter(format!(
                "pareto scale must be positive and finite, got {scale}"
            )));
        }
        Ok(Self::Pareto { shape, scale })
    }

    /// Cumulative distribution function F(t).
    ///
    /// # Panics
    /// Panics if `t` is negative or NaN; gaps live on `[0, inf)`.
    pub fn cdf(&self, t: f64) -> f64 {
        assert!(t >= 0.0, "cdf domain is t >= 0, got {t}");
        match *self {
            Self::Exponential { rate } => -f64::exp_m1(-rate * t),
            Self::Erlang { shape, rate } => {
                if t <= 0.0 {
                    0.0
                } else {
                    1.0 - erlang_survival(shape, rate * t)
                }
            }
            Self::Deterministic { gap } => {
                if t >= gap {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Pareto { shape, scale } => {
                if t < scale {
                    0.0
                } else {
                    1.0 - (scale / t).powf(shape)
                }
            }
        }
    }

    /// Integral of the CDF from 0 to `t`, in closed form.
    ///
    /// # Panics
    /// Panics if `t` is negative or NaN.
    pub fn cdf_integral(&self, t: f64) -> f64 {
        assert!(t >= 0.0, "cdf_integral domain is t >= 0, got {t}");
        match *self {
            Self::Exponential { rate } => t - (-f64::exp_m1(-rate * t)) / rate,
            Self::Erlang { shape, rate } => {
                if t <= 0.0 {
                    0.0
                } else {
                    t - f64::from(shape) / rate + erlang_phi(shape, rate, t)
                }
            }
            Self::Deterministic { gap } => (t - gap).max(0.0),
            Self::Pareto { shape, scale } => {
                if t <= scale {
                    0.0
                } else {
                    t + (t * (scale / t).powf(shape) - scale * shape) / (shape - 1.0)
                }
            }
        }
    }

    /// Expected inter-request time.
    pub fn mean(&self) -> f64 {
        match *self {
            Self::Exponential { rate } => 1.0 / rate,
            Self::Erlang { shape, rate } => f64::from(shape) / rate,
            Self::Deterministic { gap } => gap,
            Self::Pareto { shape, scale } => shape * scale / (shape - 1.0),
        }
    }

    /// Average number of requests in a window of the given length.
    ///
    /// # Panics
    /// Panics unless `window` is positive.
    pub fn normalized_rate(&self, window: f64) -> f64 {
        assert!(window > 0.0, "window must be positive, got {window}");
        window / self.mean()
    }

    /// Draws one gap by inverse-transform sampling (Erlang as a sum of
    /// exponential stages).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Exponential { rate } => exponential_inverse(rate, rng.gen()),
            Self::Erlang { shape, rate } => {
                let mut sum = 0.0;
                for _ in 0..shape {
                    sum += exponential_inverse(rate, rng.gen());
                }
                sum
            }
            Self::Deterministic { gap } => gap,
            Self::Pareto { shape, scale } => pareto_inverse(shape, scale, rng.gen()),
        }
    }
}

/// Inverse CDF of the exponential distribution: `-ln(1-u)/rate`.
fn exponential_inverse(rate: f64, u: f64) -> f64 {
    -f64::ln_1p(-u) / rate
}

/// Inverse CDF of the Pareto distribution: `scale * (1-u)^(-1/shape)`.
fn pareto_inverse(shape: f64, scale: f64, u: f64) -> f64 {
    scale * (1.0 - u).powf(-1.0 / shape)
}

/// Survival function of the Erlang distribution at `x = rate * t`:
/// `e^-x * sum_{n<shape} x^n / n!`.
fn erlang_survival(shape: u32, x: f64) -> f64 {
    let mut term = f64::exp(-x);
    let mut sum = 0.0;
    for n in 0..shape {
        sum += term;
        term *= x / f64::from(n + 1);
    }
    sum
}

/// `erlang_phi(k, rate, t)` equals `integral_0^t F - (t - k/rate)`; written as
/// `(e^-x / rate) * sum_{n<k} (k-n) x^n / n!` with `x = rate * t`.
fn erlang_phi(shape: u32, rate: f64, t: f64) -> f64 {
    let x = rate * t;
    let mut term = 1.0;
    let mut inner = 0.0;
    for n in 0..shape {
        inner += f64::from(shape - n) * term;
        term *= x / f64::from(n + 1);
    }
    f64::exp(-x) / rate * inner
}

/// A distribution shape whose rate parameter is left free, for sweeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistFamily {
    /// Exponential with free rate.
    Exponential,
    /// Erlang with fixed stage count and free rate.
    Erlang {
        /// Number of stages.
        shape: u32,
    },
    /// Deterministic with free gap.
    Deterministic,
    /// Pareto with fixed tail index and free scale.
    Pareto {
        /// Tail index (> 1).
        shape: f64,
    },
}

impl DistFamily {
    /// Instantiates the family so that `normalized_rate(window) == rate`,
    /// i.e. the mean gap is `window / rate`.
    pub fn at_normalized_rate(
        &self,
        rate: f64,
        window: f64,
    ) -> Result<InterRequestDistribution, ModelError> {
        if !rate.is_finite() || rate <= 0.0 {
            return Err(ModelError::Parameter(format!(
                "normalized rate must be positive and finite, got {rate}"
            )));
        }
        if !window.is_finite() || window <= 0.0 {
            return Err(ModelError::Parameter(format!(
                "window must be positive and finite, got {window}"
            )));
        }
        match *self {
            Self::Exponential => InterRequestDistribution::exponential(rate / window),
            Self::Erlang { shape } => {
                InterRequestDistribution::erlang(shape, f64::from(shape) * rate / window)
            }
            Self::Deterministic => InterRequestDistribution::deterministic(window / rate),
            Self::Pareto { shape } => {
                InterRequestDistribution::pareto(shape, (shape - 1.0) / shape * window / rate)
            }
        }
    }
}

/// A parsed distribution argument: fully specified, or a family whose rate
/// parameter is swept (`auto`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistSpec {
    /// A concrete distribution.
    Fixed(InterRequestDistribution),
    /// A family with the rate parameter left to the sweep grid.
    Swept(DistFamily),
}

fn parse_err(s: &str) -> ModelError {
    ModelError::Parameter(format!(
        "cannot parse distribution {s:?}; expected exp:<rate|auto>, \
         erlang:<shape>,<rate|auto>, det:<gap|auto>, or pareto:<shape>,<scale|auto>"
    ))
}

fn parse_f64(field: &str, whole: &str) -> Result<f64, ModelError> {
    field.trim().parse::<f64>().map_err(|_| parse_err(whole))
}

impl FromStr for DistSpec {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, args) = s.split_once(':').ok_or_else(|| parse_err(s))?;
        let args: Vec<&str> = args.split(',').collect();
        let auto = |field: &str| field.trim() == "auto";
        match (name.trim(), args.as_slice()) {
            ("exp", [r]) if auto(r) => Ok(Self::Swept(DistFamily::Exponential)),
            ("exp", [r]) => Ok(Self::Fixed(InterRequestDistribution::exponential(
                parse_f64(r, s)?,
            )?)),
            ("erlang", [k, r]) => {
                let shape: u32 = k.trim().parse().map_err(|_| parse_err(s))?;
                if auto(r) {
                    if shape < 1 {
                        return Err(ModelError::Parameter("erlang shape must be >= 1".into()));
                    }
                    Ok(Self::Swept(DistFamily::Erlang { shape }))
                } else {
                    Ok(Self::Fixed(InterRequestDistribution::erlang(
                        shape,
                        parse_f64(r, s)?,
                    )?))
                }
            }
            ("det", [a]) if auto(a) => Ok(Self::Swept(DistFamily::Deterministic)),
            ("det", [a]) => Ok(Self::Fixed(InterRequestDistribution::deterministic(
                parse_f64(a, s)?,
            )?)),
            ("pareto", [alpha, tm]) => {
                let shape = parse_f64(alpha, s)?;
                if auto(tm) {
                    if !shape.is_finite() || shape <= 1.0 {
                        return Err(ModelError::Parameter(format!(
                            "pareto shape must be > 1 for a finite mean, got {shape}"
                        )));
                    }
                    Ok(Self::Swept(DistFamily::Pareto { shape }))
                } else {
                    Ok(Self::Fixed(InterRequestDistribution::pareto(
                        shape,
                        parse_f64(tm, s)?,
                    )?))
                }
            }
            _ => Err(parse_err(s)),
        }
    }
}

impl FromStr for InterRequestDistribution {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.parse::<DistSpec>()? {
            DistSpec::Fixed(d) => Ok(d),
            DistSpec::Swept(_) => Err(ModelError::Parameter(format!(
                "distribution {s:?} leaves the rate to a sweep; a concrete value is required here"
            ))),
        }
    }
}

impl fmt::Display for InterRequestDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Exponential { rate } => write!(f, "exp:{rate}"),
            Self::Erlang { shape, rate } => write!(f, "erlang:{shape},{rate}"),
            Self::Deterministic { gap } => write!(f, "det:{gap}"),
            Self::Pareto { shape, scale } => write!(f, "pareto:{shape},{scale}"),
        }
    }
}

impl fmt::Display for DistFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Exponential => write!(f, "exp:auto"),
            Self::Erlang { shape } => write!(f, "erlang:{shape},auto"),
            Self::Deterministic => write!(f, "det:auto"),
            Self::Pareto { shape } => write!(f, "pareto:{shape},auto"),
        }
    }
}
