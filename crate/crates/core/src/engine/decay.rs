use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Attenuation of a path's strength as a function of its hop count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DecayFunction {
    /// `base^h`, base in (0, 1).
    Exponential { base: f64 },
    /// `h^(-exponent)`, exponent > 0.
    PowerLaw { exponent: f64 },
    /// Explicit values for h = 1, 2, ..., nonincreasing and in (0, 1].
    Table { values: Vec<f64> },
}

impl DecayFunction {
    /// Halving per hop: the shared-DNA attenuation of the kinship setting.
    pub const fn halving() -> Self {
        DecayFunction::Exponential { base: 0.5 }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DecayFunction::Exponential { base } => {
                if !(base.is_finite() && *base > 0.0 && *base < 1.0) {
                    return Err(Error::Config(format!("exponential base {base} not in (0, 1)")));
                }
            }
            DecayFunction::PowerLaw { exponent } => {
                if !(exponent.is_finite() && *exponent > 0.0) {
                    return Err(Error::Config(format!("power-law exponent {exponent} must be > 0")));
                }
            }
            DecayFunction::Table { values } => {
                if values.is_empty() {
                    return Err(Error::Config("decay table is empty".into()));
                }
                if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0 && **v <= 1.0)) {
                    return Err(Error::Config(format!("decay table value {v} not in (0, 1]")));
                }
                if values.windows(2).any(|w| w[1] > w[0]) {
                    return Err(Error::Config("decay table must be nonincreasing".into()));
                }
            }
        }
        Ok(())
    }

    /// Largest hop count the function is defined for, if bounded.
    pub fn max_defined_hops(&self) -> Option<usize> {
        match self {
            DecayFunction::Table { values } => Some(values.len()),
            _ => None,
        }
    }

    pub fn value(&self, hops: usize) -> Result<f64> {
        match self {
            _ if hops == 0 => Err(Error::HopOutOfRange {
                hops,
                len: self.max_defined_hops().unwrap_or(usize::MAX),
            }),
            DecayFunction::Exponential { base } => Ok(base.powi(hops as i32)),
            DecayFunction::PowerLaw { exponent } => Ok((hops as f64).powf(-exponent)),
            DecayFunction::Table { values } => values
                .get(hops - 1)
                .copied()
                .ok_or(Error::HopOutOfRange { hops, len: values.len() }),
        }
    }
}

/// `f(h)` for a hop count `h >= 1`.
pub fn decay_value(d: &DecayFunction, hops: usize) -> Result<f64> {
    d.value(hops)
}

/// How per-path strengths combine into a pair strength.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    Max,
    Avg,
    Sum,
}

impl Aggregation {
    pub const ALL: [Aggregation; 3] = [Aggregation::Max, Aggregation::Avg, Aggregation::Sum];
}

/// Aggregates `counts[h - 1]` paths of length `h` into a single strength.
///
/// `Max` relies on `f` being nonincreasing and returns `f(h_min)`.
pub fn aggregate_strength(counts: &[u64], d: &DecayFunction, a: Aggregation) -> Result<f64> {
    let first = counts.iter().position(|&c| c > 0).ok_or(Error::EmptyPathSet)?;
    match a {
        Aggregation::Max => d.value(first + 1),
        Aggregation::Sum => weighted_sum(counts, d),
        Aggregation::Avg => {
            let total: f64 = counts.iter().map(|&c| c as f64).sum();
            Ok(weighted_sum(counts, d)? / total)
        }
    }
}

fn weighted_sum(counts: &[u64], d: &DecayFunction) -> Result<f64> {
    let mut sum = 0.0;
    for (i, &c) in counts.iter().enumerate() {
        if c > 0 {
            sum += c as f64 * d.value(i + 1)?;
        }
    }
    Ok(sum)
}
