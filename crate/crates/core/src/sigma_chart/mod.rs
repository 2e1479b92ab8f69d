//! The unit tangent bundle in the chart `(x1, x2, psi)`, the Berwald coframe
//! on it, and numeric checks of the structure equations, the Bianchi chain
//! and the Killing identities.
//!
//! A chart point lifts to `y = (cos psi, sin psi)/phi(t, <x, e>)`, so `F = 1`
//! holds exactly and every `dy^i` is pulled back by the chain rule.

mod report;

pub use report::{random_points, residual_report, write_residual_csv, ResidualRow, MIN_AREA};

use crate::error::Result;
use crate::jetcalc::{
    central_jacobian, exterior_derivative, Coframe, DiffMode, FdStep, OneForm, TwoForm,
    SIGMA_BASIS,
};
use crate::spherical::{
    a_from, connection_from, landsberg_from, main_scalar_from, vars_from_xy, BaseTangent, Local,
    SphericalMetric, TangentVars,
};

/// Exterior-derivative step suited to how `phi` is differentiated: jets
/// from finite differences carry rounding noise that a `1e-4` step would
/// amplify past the residual budget.
pub fn form_step(mode: DiffMode) -> FdStep {
    match mode {
        DiffMode::Jet => FdStep::default(),
        DiffMode::FiniteDifference { .. } => FdStep::with_h(3e-3),
    }
}

/// A point of the unit tangent bundle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SigmaPoint {
    pub x1: f64,
    pub x2: f64,
    pub psi: f64,
    pub tangent: BaseTangent,
}

impl SigmaPoint {
    pub fn chart(&self) -> [f64; 3] {
        [self.x1, self.x2, self.psi]
    }
}

pub fn indicatrix_lift(m: &SphericalMetric, x: [f64; 2], psi: f64) -> Result<SigmaPoint> {
    m.check_position(x)?;
    let e = [psi.cos(), psi.sin()];
    let t = 0.5 * (x[0] * x[0] + x[1] * x[1]);
    let s = x[0] * e[0] + x[1] * e[1];
    let phi = m.phi_value(t, s)?;
    Ok(SigmaPoint {
        x1: x[0],
        x2: x[1],
        psi,
        tangent: BaseTangent::new(x, [e[0] / phi, e[1] / phi]),
    })
}

fn lift_chart(m: &SphericalMetric, c: [f64; 3]) -> Result<SigmaPoint> {
    indicatrix_lift(m, [c[0], c[1]], c[2])
}

struct Evaluated {
    vars: TangentVars,
    local: Local,
    coframe: Coframe,
}

fn evaluate(m: &SphericalMetric, p: &SigmaPoint) -> Result<Evaluated> {
    let x = [p.x1, p.x2];
    let e = [p.psi.cos(), p.psi.sin()];
    let ep = [-e[1], e[0]];
    let t = 0.5 * (x[0] * x[0] + x[1] * x[1]);
    let s = x[0] * e[0] + x[1] * e[1];
    let local = Local::at(m, t, s)?;
    let phi = local.phi.value();
    let phi_t = local.phi.partial(1, 0);
    let phi_s = local.phi.partial(0, 1);
    let y = [e[0] / phi, e[1] / phi];
    let tangent = BaseTangent::new(x, y);
    let vars = vars_from_xy(&tangent)?;

    // dy^i over (dx1, dx2, dpsi); t and s move with x, s also with psi.
    let xe_perp = x[0] * ep[0] + x[1] * ep[1];
    let mut dy = [[0.0; 3]; 2];
    for i in 0..2 {
        for k in 0..2 {
            dy[i][k] = -e[i] / (phi * phi) * (phi_t * x[k] + phi_s * e[k]);
        }
        dy[i][2] = ep[i] / phi - e[i] / (phi * phi) * phi_s * xe_perp;
    }
    let n = connection_from(&vars, &local, &tangent);
    let f_y = [
        phi * vars.r_i[0] + phi_s * vars.s_i[0],
        phi * vars.r_i[1] + phi_s * vars.s_i[1],
    ];
    let root_d = local.d.value().sqrt();
    // F = 1 on the lift, so the 1/F and 1/F^2 factors drop.
    let w1 = [f_y[0], f_y[1], 0.0];
    let w2 = [-root_d * y[1], root_d * y[0], 0.0];
    let mut w3 = [0.0; 3];
    for (k, w) in w3.iter_mut().enumerate() {
        let n1 = if k < 2 { n[0][k] } else { 0.0 };
        let n2 = if k < 2 { n[1][k] } else { 0.0 };
        *w = root_d * (y[0] * (dy[1][k] + n2) - y[1] * (dy[0][k] + n1));
    }
    Ok(Evaluated {
        vars,
        local,
        coframe: Coframe::new(SIGMA_BASIS, [w1, w2, w3]),
    })
}

/// Rows `omega_1, omega_2, omega_3` over `(dx1, dx2, dpsi)`.
pub fn berwald_coframe(m: &SphericalMetric, p: &SigmaPoint) -> Result<Coframe> {
    Ok(evaluate(m, p)?.coframe)
}

fn coframe_field(m: &SphericalMetric, row: usize) -> impl Fn([f64; 3]) -> Result<OneForm> + '_ {
    move |c| Ok(berwald_coframe(m, &lift_chart(m, c)?)?.form(row))
}

/// Numeric `d omega_i` over the chart basis.
pub fn coframe_differentials(m: &SphericalMetric, p: &SigmaPoint, step: FdStep) -> Result<[TwoForm; 3]> {
    let c = p.chart();
    Ok([
        exterior_derivative(coframe_field(m, 0), c, step)?,
        exterior_derivative(coframe_field(m, 1), c, step)?,
        exterior_derivative(coframe_field(m, 2), c, step)?,
    ])
}

/// `K` read from `d omega_3 = -K omega_1^omega_2 - J omega_2^omega_3`.
pub fn flag_curvature(m: &SphericalMetric, p: &SigmaPoint, step: FdStep) -> Result<f64> {
    let cf = berwald_coframe(m, p)?;
    let d3 = exterior_derivative(coframe_field(m, 2), p.chart(), step)?;
    Ok(-cf.two_form_components(&d3)?[2])
}

/// Residuals of the three structure equations at `p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StructureResiduals {
    pub r: [f64; 3],
    pub i: f64,
    pub j: f64,
    pub k: f64,
}

impl StructureResiduals {
    pub fn max(&self) -> f64 {
        self.r.iter().fold(0.0, |m, v| m.max(*v))
    }
}

/// Scalar invariants `(I, J)` at a chart point, from the closed forms.
pub fn scalars_at(m: &SphericalMetric, p: &SigmaPoint) -> Result<(f64, f64)> {
    let ev = evaluate(m, p)?;
    Ok((
        main_scalar_from(&ev.vars, &ev.local)?,
        landsberg_from(&ev.vars, &ev.local)?.value,
    ))
}

pub fn structure_residuals(m: &SphericalMetric, p: &SigmaPoint, step: FdStep) -> Result<StructureResiduals> {
    let cf = berwald_coframe(m, p)?;
    let [d1, d2, d3] = coframe_differentials(m, p, step)?;
    let (i, j) = scalars_at(m, p)?;
    let k = -cf.two_form_components(&d3)?[2];
    structure_residuals_from(&cf, [d1, d2, d3], i, j, k)
}

/// Residuals of `d omega_i` against the structure equations with given
/// invariants; shared with the normal forms.
pub fn structure_residuals_from(
    cf: &Coframe,
    d: [TwoForm; 3],
    i: f64,
    j: f64,
    k: f64,
) -> Result<StructureResiduals> {
    let [w23, w31, w12] = cf.two_form_basis().map(|coeffs| TwoForm {
        basis: cf.basis,
        coeffs,
    });
    let rhs1 = w23.scale(-1.0);
    // I omega_3^omega_2 = -I omega_2^omega_3
    let rhs2 = w31.scale(-1.0).add(&w23.scale(-i))?;
    let rhs3 = w12.scale(-k).add(&w23.scale(-j))?;
    Ok(StructureResiduals {
        r: [
            d[0].sub(&rhs1)?.norm_inf(),
            d[1].sub(&rhs2)?.norm_inf(),
            d[2].sub(&rhs3)?.norm_inf(),
        ],
        i,
        j,
        k,
    })
}

/// Components `(f_1, f_2, f_3)` of `df` in the Berwald coframe.
pub fn frame_derivative(
    m: &SphericalMetric,
    f: impl Fn(&SphericalMetric, &SigmaPoint) -> Result<f64>,
    p: &SigmaPoint,
    step: FdStep,
) -> Result<[f64; 3]> {
    let cf = berwald_coframe(m, p)?;
    let grad = central_jacobian(|c| Ok([f(m, &lift_chart(m, c)?)?]), p.chart(), step)?;
    cf.frame_components([grad[0][0], grad[1][0], grad[2][0]])
}

/// Main scalar as a field on the chart.
pub fn main_scalar_field(m: &SphericalMetric, p: &SigmaPoint) -> Result<f64> {
    Ok(scalars_at(m, p)?.0)
}

/// Landsberg scalar as a field on the chart.
pub fn landsberg_field(m: &SphericalMetric, p: &SigmaPoint) -> Result<f64> {
    Ok(scalars_at(m, p)?.1)
}

/// The Killing lift of the rotation field in the chart.
pub fn killing_lift(p: &SigmaPoint) -> [f64; 3] {
    [-p.x2, p.x1, 1.0]
}

/// `omega_i(X)` by direct contraction of the coframe.
pub fn killing_contraction(m: &SphericalMetric, p: &SigmaPoint) -> Result<[f64; 3]> {
    Ok(berwald_coframe(m, p)?.contract(killing_lift(p)))
}

/// `a_i` from the closed forms at a chart point.
pub fn a_field(m: &SphericalMetric, p: &SigmaPoint) -> Result<[f64; 3]> {
    let ev = evaluate(m, p)?;
    a_from(&ev.vars, &ev.local)
}

/// Residuals of the Killing identities for `a_1, a_2, a_3` and of the
/// invariance of `I` and `J` along the lift.
/// `lj` substitutes `J_1 = -K I`, which needs constant curvature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KillingResiduals {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub li: f64,
    pub lj: f64,
}

impl KillingResiduals {
    pub fn max(&self) -> f64 {
        [self.a1, self.a2, self.a3, self.li, self.lj]
            .iter()
            .fold(0.0, |m, v| m.max(*v))
    }
}

pub fn killing_residuals(m: &SphericalMetric, p: &SigmaPoint, step: FdStep) -> Result<KillingResiduals> {
    let cf = berwald_coframe(m, p)?;
    let c = p.chart();
    let [a1, a2, a3] = a_field(m, p)?;
    let (i, j) = scalars_at(m, p)?;
    let k = flag_curvature(m, p, step)?;

    // Chart gradients of the a_i, rows = chart direction.
    let grad = central_jacobian(|q| a_field(m, &lift_chart(m, q)?), c, step)?;
    let da = |n: usize| [grad[0][n], grad[1][n], grad[2][n]];
    let [w1, w2, w3] = cf.rows;
    let lin = |terms: &[(f64, [f64; 3])]| {
        let mut out = [0.0; 3];
        for (coef, w) in terms {
            for q in 0..3 {
                out[q] += coef * w[q];
            }
        }
        out
    };
    let norm = |a: [f64; 3], b: [f64; 3]| {
        (0..3).fold(0.0f64, |m, q| m.max((a[q] - b[q]).abs()))
    };
    let da1 = da(0);
    let r1 = norm(da1, lin(&[(a2, w3), (-a3, w2)]));
    let r2 = norm(da(1), lin(&[(a3, w1), (-a1, w3), (i, da1)]));
    let r3 = norm(da(2), lin(&[(k * a1, w2), (-k * a2, w1), (j, da1)]));

    let di = frame_derivative(m, main_scalar_field, p, step)?;
    let dj = frame_derivative(m, landsberg_field, p, step)?;
    let li = (a1 * j + a2 * di[1] + a3 * di[2]).abs();
    let lj = (-a1 * k * i + a2 * dj[1] + a3 * dj[2]).abs();
    Ok(KillingResiduals {
        a1: r1,
        a2: r2,
        a3: r3,
        li,
        lj,
    })
}
