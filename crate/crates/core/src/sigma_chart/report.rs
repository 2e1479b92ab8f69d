use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::jetcalc::FdStep;
use crate::spherical::SphericalMetric;

use super::{indicatrix_lift, structure_residuals, SigmaPoint};

/// Sampled points keep `|x ^ y|/|y|` at least this large; `I` has a root-type
/// factor where `x` and `y` are parallel.
pub const MIN_AREA: f64 = 0.05;

/// Sampling radius: `|x| <= min(0.8, 0.8 mu)`.
fn sampling_radius(m: &SphericalMetric) -> f64 {
    0.8f64.min(0.8 * m.mu)
}

/// `n` seeded points of the chart, uniform in the disk and in `psi`.
pub fn random_points(m: &SphericalMetric, n: usize, seed: u64) -> Result<Vec<SigmaPoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = sampling_radius(m);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let rho = radius * rng.gen::<f64>().sqrt();
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        let psi = rng.gen_range(0.0..std::f64::consts::TAU);
        let x = [rho * theta.cos(), rho * theta.sin()];
        let area = x[0] * psi.sin() - x[1] * psi.cos();
        if area.abs() < MIN_AREA {
            continue;
        }
        out.push(indicatrix_lift(m, x, psi)?);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualRow {
    pub point_id: usize,
    pub point: SigmaPoint,
    pub r: [f64; 3],
    pub k: f64,
}

pub fn residual_report(m: &SphericalMetric, n: usize, seed: u64, step: FdStep) -> Result<Vec<ResidualRow>> {
    let points = random_points(m, n, seed)?;
    points
        .par_iter()
        .enumerate()
        .map(|(point_id, p)| {
            let res = structure_residuals(m, p, step)?;
            Ok(ResidualRow {
                point_id,
                point: *p,
                r: res.r,
                k: res.k,
            })
        })
        .collect()
}

pub fn write_residual_csv(mut w: impl Write, seed: u64, rows: &[ResidualRow]) -> Result<()> {
    writeln!(w, "# seed={seed}")?;
    writeln!(w, "point_id,x1,x2,psi,R1,R2,R3,K")?;
    for row in rows {
        let p = &row.point;
        writeln!(
            w,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            row.point_id, p.x1, p.x2, p.psi, row.r[0], row.r[1], row.r[2], row.k
        )?;
    }
    Ok(())
}
