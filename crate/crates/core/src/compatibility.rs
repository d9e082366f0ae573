//! Estimated aversion curves and feature compatibility.
//!
//! A user states aversions only at the extremes of the scale; the curve
//! in between is linear interpolation. For an increasing feature the
//! aversion follows the line from (1, 1) up to (v_max, a_max). For a
//! V-shaped feature a second line falls from (1, a_min) to (v_max, 1)
//! and the estimated aversion is the pointwise maximum of the two, so
//! both extremes can bother while the middle does not.
//!
//! Compatibility is the complement of the estimated aversion in
//! [1, v_max]: `comp = v_max + 1 − ea`. An unknown feature value (the 0
//! marker) is pessimistically assigned the minimum compatibility 1.

use crate::lexicon::{Feature, MonotoneClass};
use crate::profiles::UserProfile;
use crate::{SCALE_MAX, SCALE_MIN};

/// Linear aversion model for one feature of one user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AversionCurve {
    /// Aversion grows from 1 at x = 1 to `a_max` at x = v_max.
    Increasing { a_max: f64 },
    /// Aversion is `a_min` at x = 1, `a_max` at x = v_max, and the
    /// maximum of the two connecting lines in between.
    VShaped { a_min: f64, a_max: f64 },
}

impl AversionCurve {
    /// The curve a user's stated aversions induce for `feature`.
    pub fn for_user(user: &UserProfile, feature: Feature) -> AversionCurve {
        let a = &user.aversions;
        match feature {
            Feature::Brightness => AversionCurve::VShaped {
                a_min: a.brightness_low,
                a_max: a.brightness_high,
            },
            Feature::Openness => AversionCurve::VShaped {
                a_min: a.openness_low,
                a_max: a.openness_high,
            },
            Feature::Crowding => AversionCurve::Increasing { a_max: a.crowding_high },
            Feature::Noise => AversionCurve::Increasing { a_max: a.noise_high },
            Feature::Smell => AversionCurve::Increasing { a_max: a.smell_high },
        }
    }

    fn line_up(a_max: f64, x: f64) -> f64 {
        1.0 + (a_max - 1.0) * (x - 1.0) / (SCALE_MAX - 1.0)
    }

    fn line_down(a_min: f64, x: f64) -> f64 {
        1.0 + (x - SCALE_MAX) * (1.0 - a_min) / (SCALE_MAX - 1.0)
    }

    /// Estimated aversion at feature value `x`.
    ///
    /// # Panics
    ///
    /// Panics when `x` is outside [1, v_max]; the unknown marker 0 must
    /// be handled by the caller (see [`AversionCurve::feature_compatibility`]).
    pub fn estimated_aversion(&self, x: f64) -> f64 {
        assert!(
            (SCALE_MIN..=SCALE_MAX).contains(&x),
            "feature value {x} outside [{SCALE_MIN}, {SCALE_MAX}]"
        );
        match *self {
            AversionCurve::Increasing { a_max } => Self::line_up(a_max, x),
            AversionCurve::VShaped { a_min, a_max } => {
                Self::line_up(a_max, x).max(Self::line_down(a_min, x))
            }
        }
    }

    /// Compatibility of a feature value with this curve: the complement
    /// `v_max + 1 − ea`, or pessimistically 1 for the unknown marker 0.
    pub fn feature_compatibility(&self, value: f64) -> f64 {
        if value == 0.0 {
            return SCALE_MIN;
        }
        SCALE_MAX + 1.0 - self.estimated_aversion(value)
    }

    /// The feature value minimizing the estimated aversion; ties resolve
    /// to the scale midpoint.
    pub fn ideal_value(&self) -> f64 {
        match *self {
            AversionCurve::Increasing { a_max } => {
                if a_max > 1.0 {
                    SCALE_MIN
                } else {
                    3.0
                }
            }
            AversionCurve::VShaped { a_min, a_max } => {
                if a_min + a_max > 2.0 {
                    // Intersection of the two lines.
                    (SCALE_MAX * (a_min - 1.0) + (a_max - 1.0)) / (a_min + a_max - 2.0)
                } else {
                    3.0
                }
            }
        }
    }
}

/// The per-feature values (canonical order) of the item that would
/// minimize this user's aversions.
pub fn ideal_item(user: &UserProfile) -> [f64; 5] {
    Feature::ALL.map(|f| AversionCurve::for_user(user, f).ideal_value())
}

/// Compatibility of each of an item's features with a user, canonical
/// order, using the pessimistic default for unknown values.
pub fn feature_compatibilities(
    user: &UserProfile,
    features: &[crate::profiles::FeatureEvidence; 5],
) -> [f64; 5] {
    Feature::ALL.map(|f| {
        AversionCurve::for_user(user, f).feature_compatibility(features[f.index()].value)
    })
}

impl Feature {
    /// Convenience: the curve class this feature uses.
    pub fn curve_class(self) -> MonotoneClass {
        self.monotone_class()
    }
}
