//! The four measures that collapse a set of evaluation components into
//! one score on the rating scale.
//!
//! Min and Ave look only at the component values. Cos and RMSD compare
//! the component vector ω against the user's ideal vector: Cos maps the
//! cosine similarity affinely onto [1, v_max]; RMSD takes the complement
//! of the root mean square deviation, `1 + v_max − rmsd`, clamped onto
//! the scale (the raw complement can reach v_max + 1 at zero deviation).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::{SCALE_MAX, SCALE_MIN};

/// Aggregation measure for a set of evaluation components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Measure {
    Min,
    Ave,
    Cos,
    Rmsd,
}

impl Measure {
    pub const ALL: [Measure; 4] = [Measure::Min, Measure::Ave, Measure::Cos, Measure::Rmsd];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Min => "Min",
            Measure::Ave => "Ave",
            Measure::Cos => "Cos",
            Measure::Rmsd => "RMSD",
        }
    }

    /// Whether this measure compares ω against an ideal vector.
    pub fn uses_ideal(self) -> bool {
        matches!(self, Measure::Cos | Measure::Rmsd)
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_lowercase().as_str() {
            "min" => Ok(Measure::Min),
            "ave" => Ok(Measure::Ave),
            "cos" => Ok(Measure::Cos),
            "rmsd" => Ok(Measure::Rmsd),
            other => Err(Error::invalid(format!("unknown measure `{other}`"))),
        }
    }
}

/// Aggregates the component vector `values` into a score in [1, v_max].
///
/// `ideal` is consulted only by Cos and RMSD, which require it to have
/// the same length as `values`; Min and Ave ignore it.
pub fn aggregate(measure: Measure, values: &[f64], ideal: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::invalid("cannot aggregate an empty component set"));
    }
    if measure.uses_ideal() && values.len() != ideal.len() {
        return Err(Error::invalid(format!(
            "component vector has {} entries but the ideal vector has {}",
            values.len(),
            ideal.len()
        )));
    }
    let score = match measure {
        Measure::Min => values.iter().copied().fold(f64::INFINITY, f64::min),
        Measure::Ave => values.iter().sum::<f64>() / values.len() as f64,
        Measure::Cos => {
            let dot: f64 = values.iter().zip(ideal).map(|(a, b)| a * b).sum();
            let nv = values.iter().map(|a| a * a).sum::<f64>().sqrt();
            let ni = ideal.iter().map(|b| b * b).sum::<f64>().sqrt();
            if nv == 0.0 || ni == 0.0 {
                return Err(Error::invalid(
                    "cosine similarity undefined for an all-zero vector",
                ));
            }
            SCALE_MIN + (SCALE_MAX - SCALE_MIN) * (dot / (nv * ni))
        }
        Measure::Rmsd => {
            let msd: f64 = values
                .iter()
                .zip(ideal)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                / values.len() as f64;
            1.0 + SCALE_MAX - msd.sqrt()
        }
    };
    Ok(score.clamp(SCALE_MIN, SCALE_MAX))
}
