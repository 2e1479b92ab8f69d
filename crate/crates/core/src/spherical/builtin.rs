//! Built-in generators.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jetcalc::{DiffMode, GenericBivariate, Scalar};
use crate::sigma_chart;

use super::{projective_flatness_residual, SphericalMetric};

/// Source text of the Funk generator in the expression language.
pub const FUNK_SOURCE: &str = "(sqrt(s^2+1-2*t)+s)/(1-2*t)";
pub const FUNK_REVERSED_SOURCE: &str = "(sqrt(s^2+1-2*t)-s)/(1-2*t)";
pub const KLEIN_SPHERE_SOURCE: &str = "sqrt(1+2*t-s^2)/(1+2*t)";

/// Names accepted by [`by_name`].
pub const NAMES: [&str; 4] = ["euclid", "funk", "funk-reversed", "klein-sphere"];

pub struct Euclid;

impl GenericBivariate for Euclid {
    fn apply<S: Scalar>(&self, _t: S, _s: S) -> Result<S> {
        Ok(S::constant(1.0))
    }
}

/// Funk metric of the unit disk; `reversed` gives `F(x, -y)`.
pub struct Funk {
    pub reversed: bool,
}

impl Funk {
    pub fn forward() -> Self {
        Funk { reversed: false }
    }
}

impl GenericBivariate for Funk {
    fn apply<S: Scalar>(&self, t: S, s: S) -> Result<S> {
        let one = S::constant(1.0);
        let two_t = S::constant(2.0) * t;
        let root = (s * s + one - two_t).try_sqrt()?;
        let num = if self.reversed { root - s } else { root + s };
        num.try_div(one - two_t)
    }
}

/// Round sphere of curvature 1 in the Klein-type chart.
pub struct KleinSphere;

impl GenericBivariate for KleinSphere {
    fn apply<S: Scalar>(&self, t: S, s: S) -> Result<S> {
        let one = S::constant(1.0);
        let two_t = S::constant(2.0) * t;
        (one + two_t - s * s).try_sqrt()?.try_div(one + two_t)
    }
}

pub fn euclid() -> SphericalMetric {
    SphericalMetric::new("euclid", Arc::new(Euclid), f64::INFINITY)
}

pub fn funk() -> SphericalMetric {
    SphericalMetric::new("funk", Arc::new(Funk::forward()), 1.0)
}

pub fn funk_reversed() -> SphericalMetric {
    SphericalMetric::new("funk-reversed", Arc::new(Funk { reversed: true }), 1.0)
}

pub fn klein_sphere() -> SphericalMetric {
    SphericalMetric::new("klein-sphere", Arc::new(KleinSphere), f64::INFINITY)
}

pub fn by_name(name: &str) -> Option<SphericalMetric> {
    match name {
        "euclid" => Some(euclid()),
        "funk" => Some(funk()),
        "funk-reversed" => Some(funk_reversed()),
        "klein-sphere" => Some(klein_sphere()),
        _ => None,
    }
}

/// Curvature of the unscaled Funk metric.
pub const FUNK_CURVATURE: f64 = -0.25;

/// Checks a Funk fixture before use: projective flatness at a few points and
/// measured curvature `-1/(4 lambda^2)`.
pub fn validate_funk(m: &SphericalMetric) -> Result<()> {
    let samples = [(0.0, 0.0), (0.1, 0.3), (0.2, -0.5), (0.3, 0.1)];
    let flat_tol = match m.mode {
        DiffMode::Jet => 1e-9,
        DiffMode::FiniteDifference { .. } => 1e-6,
    };
    for (t, s) in samples {
        let r = projective_flatness_residual(m, t, s)?;
        if r.abs() > flat_tol {
            return Err(Error::Config(format!(
                "{}: projective flatness residual {r:e} at (t, s) = ({t}, {s})",
                m.name
            )));
        }
    }
    let target = FUNK_CURVATURE / (m.scale * m.scale);
    for (x, psi) in [([0.3, -0.2], 1.1), ([-0.1, 0.5], 4.0)] {
        let p = sigma_chart::indicatrix_lift(m, x, psi)?;
        let k = sigma_chart::flag_curvature(m, &p, sigma_chart::form_step(m.mode))?;
        if (k - target).abs() > 1e-5 {
            return Err(Error::Config(format!(
                "{}: measured curvature {k} differs from {target}",
                m.name
            )));
        }
    }
    Ok(())
}
