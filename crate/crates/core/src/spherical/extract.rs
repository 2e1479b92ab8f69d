//! Recovery of the profile functions `u(a)`, `v(a)` of a constant-curvature
//! spherically symmetric metric.
//!
//! `a_1` depends only on `z = 2t - s^2`, so each `z` of the grid names a level
//! set. On it `u^2 = K a_2^2 + a_3^2` and `u^2 v = a_2 J - a_3 I` are constant;
//! they are evaluated at one representative point and confirmed at a second.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sigma_chart::{flag_curvature, form_step, indicatrix_lift, SigmaPoint};

use super::{invariant_sample, SphericalMetric};

/// Position of the primary representative inside its level set.
pub const SIGMA_PRIMARY: f64 = 0.6;
/// Position of the confirming representative.
pub const SIGMA_CHECK: f64 = 0.3;
/// Agreement required between the two representatives.
pub const REPRESENTATIVE_TOL: f64 = 1e-6;
/// Allowed spread and offset of the measured curvature.
pub const CURVATURE_TOL: f64 = 1e-5;
/// Representatives stay inside `|x| <= 0.9 mu`.
const WORKING_RADIUS: f64 = 0.9;

/// The point of the level set `z` with `s = sigma sqrt(min(z, rho^2 - z))`,
/// `x` on the positive `x1`-axis and positive oriented area.
pub fn representative(m: &SphericalMetric, z: f64, sigma: f64) -> Result<SigmaPoint> {
    let rho = WORKING_RADIUS * m.mu;
    let room = rho * rho - z;
    if !(z > 0.0) || !(room > 0.0) {
        return Err(Error::Domain(format!(
            "level z = {z} is outside (0, {}) for {}",
            rho * rho,
            m.name
        )));
    }
    let s = sigma * z.min(room).sqrt();
    let norm_x = (z + s * s).sqrt();
    let psi = (s / norm_x).acos();
    indicatrix_lift(m, [norm_x, 0.0], psi)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileRow {
    pub z: f64,
    pub a: f64,
    pub u: f64,
    pub v: f64,
}

/// Extracted profiles in grid order.
#[derive(Clone, Debug, PartialEq)]
pub struct ProfilePair {
    pub k: f64,
    pub rows: Vec<ProfileRow>,
    /// Mean and spread of the measured curvature over the probe points.
    pub k_mean: f64,
    pub k_spread: f64,
    /// Largest disagreement between the two representatives.
    pub representative_gap: f64,
}

impl ProfilePair {
    /// `(a, u, v)` sorted by increasing `a`.
    pub fn by_a(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let mut rows = self.rows.clone();
        rows.sort_by(|l, r| l.a.total_cmp(&r.a));
        (
            rows.iter().map(|r| r.a).collect(),
            rows.iter().map(|r| r.u).collect(),
            rows.iter().map(|r| r.v).collect(),
        )
    }
}

struct LevelSet {
    row: ProfileRow,
    gap: f64,
}

fn level_values(m: &SphericalMetric, k: f64, p: &SigmaPoint) -> Result<(f64, f64, f64, f64)> {
    let inv = invariant_sample(m, &p.tangent, k)?;
    let u2 = inv.energy();
    let admissible = if k == 0.0 { inv.a3 > 0.0 } else { u2 > 0.0 };
    if !admissible {
        return Err(Error::CaseMismatch(format!(
            "K = {k}: u^2 = {u2} (a3 = {}) is not positive at z = {}",
            inv.a3, inv.z
        )));
    }
    let u = if k == 0.0 { inv.a3 } else { u2.sqrt() };
    Ok((inv.z, inv.a1, u, inv.momentum() / (u * u)))
}

fn level_set(m: &SphericalMetric, k: f64, z: f64) -> Result<LevelSet> {
    let p = representative(m, z, SIGMA_PRIMARY)?;
    let q = representative(m, z, SIGMA_CHECK)?;
    let (_, a, u, v) = level_values(m, k, &p)?;
    let (_, a_b, u_b, v_b) = level_values(m, k, &q)?;
    let gap = (a - a_b).abs().max((u - u_b).abs()).max((v - v_b).abs());
    Ok(LevelSet {
        row: ProfileRow { z, a, u, v },
        gap,
    })
}

/// Profiles of `scale * F` on the given `z` grid for the curvature case `k`.
pub fn extract_profiles(m: &SphericalMetric, k: f64, scale: f64, z_grid: &[f64]) -> Result<ProfilePair> {
    if ![1.0, 0.0, -1.0].contains(&k) {
        return Err(Error::Config(format!("K must be 1, 0 or -1, got {k}")));
    }
    if !(scale != 0.0 && scale.is_finite()) {
        return Err(Error::Config(format!("scale must be non-zero, got {scale}")));
    }
    if z_grid.len() < 2 {
        return Err(Error::Config("z grid needs at least two points".into()));
    }
    let m = m.clone().with_scale(scale);
    for &z in z_grid {
        representative(&m, z, SIGMA_PRIMARY)?;
    }
    // Curvature first: an out-of-case metric should be reported as such.
    let probes: Vec<f64> = z_grid
        .par_iter()
        .map(|&z| flag_curvature(&m, &representative(&m, z, SIGMA_PRIMARY)?, form_step(m.mode)))
        .collect::<Result<_>>()?;
    let (lo, hi) = probes
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(*v), h.max(*v)));
    let mean = probes.iter().sum::<f64>() / probes.len() as f64;
    let spread = hi - lo;
    if spread > CURVATURE_TOL {
        return Err(Error::NotConstantCurvature { spread, mean });
    }
    if (mean - k).abs() > CURVATURE_TOL {
        return Err(Error::CaseMismatch(format!(
            "measured K = {mean} for {} at scale {scale}, requested K = {k}",
            m.name
        )));
    }

    let levels: Vec<LevelSet> = z_grid
        .par_iter()
        .map(|&z| level_set(&m, k, z))
        .collect::<Result<_>>()?;
    let rows: Vec<ProfileRow> = levels.iter().map(|l| l.row).collect();
    let gap = levels.iter().fold(0.0f64, |g, l| g.max(l.gap));
    if gap > REPRESENTATIVE_TOL {
        return Err(Error::RepresentativeMismatch(format!(
            "(a, u, v) differ by {gap:e} between s-positions {SIGMA_PRIMARY} and {SIGMA_CHECK}"
        )));
    }
    let increasing = rows.windows(2).all(|w| w[1].a > w[0].a);
    let decreasing = rows.windows(2).all(|w| w[1].a < w[0].a);
    if !(increasing || decreasing) {
        return Err(Error::NonMonotone(format!(
            "a ranges over [{}, {}] without being monotone in z",
            rows.iter().fold(f64::INFINITY, |m, r| m.min(r.a)),
            rows.iter().fold(f64::NEG_INFINITY, |m, r| m.max(r.a))
        )));
    }
    Ok(ProfilePair {
        k,
        rows,
        k_mean: mean,
        k_spread: spread,
        representative_gap: gap,
    })
}

pub fn write_profile_csv(mut w: impl Write, pair: &ProfilePair) -> Result<()> {
    writeln!(w, "z,a,u,v")?;
    for r in &pair.rows {
        writeln!(w, "{:.16e},{:.16e},{:.16e},{:.16e}", r.z, r.a, r.u, r.v)?;
    }
    Ok(())
}
