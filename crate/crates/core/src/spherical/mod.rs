//! Spherically symmetric Finsler surfaces `F = |y| phi(|x|^2/2, <x,y>/|y|)`.
//!
//! Everything is computed from jets of `phi` in `(t, s)`: the geodesic
//! coefficients, the nonlinear connection, the determinant of the
//! fundamental tensor, the contractions `a_i` of the rotational Killing lift
//! with the Berwald coframe, and the invariants `I` and `J`.
//!
//! Sign convention: wherever a root `sqrt(2t - s^2)` appears we use the
//! oriented area `A = (x1 y2 - x2 y1)/|y|`, and `I` carries the sign for
//! which `d omega_2 = -omega_3^omega_1 + I omega_3^omega_2` holds with the
//! Berwald coframe as implemented in [`crate::sigma_chart`].

pub mod builtin;
mod extract;

pub use extract::{
    extract_profiles, representative, write_profile_csv, ProfilePair, ProfileRow,
    REPRESENTATIVE_TOL, SIGMA_CHECK, SIGMA_PRIMARY,
};

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jetcalc::{jet_of, BivariateFn, DiffMode, Jet2};

/// Tolerance on `F = 1` for points handed to [`a_components`].
pub const INDICATRIX_TOL: f64 = 1e-10;

/// Generator `phi(t, s)` together with its domain and evaluation settings.
#[derive(Clone)]
pub struct SphericalMetric {
    phi: Arc<dyn BivariateFn>,
    /// The metric lives on `|x| < mu`.
    pub mu: f64,
    pub name: String,
    /// Constant factor `lambda` of `lambda F`; curvature scales by `1/lambda^2`.
    pub scale: f64,
    pub mode: DiffMode,
}

impl fmt::Debug for SphericalMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SphericalMetric")
            .field("name", &self.name)
            .field("mu", &self.mu)
            .field("scale", &self.scale)
            .field("mode", &self.mode)
            .finish()
    }
}

impl SphericalMetric {
    pub fn new(name: impl Into<String>, phi: Arc<dyn BivariateFn>, mu: f64) -> Self {
        SphericalMetric {
            phi,
            mu,
            name: name.into(),
            scale: 1.0,
            mode: DiffMode::Jet,
        }
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn with_mode(mut self, mode: DiffMode) -> Self {
        self.mode = mode;
        self
    }

    /// Jet of `lambda phi` at `(t, s)`.
    pub fn phi_jet(&self, t: f64, s: f64) -> Result<Jet2> {
        let j = jet_of(self.phi.as_ref(), t, s, self.mode)? * self.scale;
        if !(j.value() > 0.0) {
            return Err(Error::Domain(format!(
                "phi must be positive, got {} at (t, s) = ({t}, {s})",
                j.value()
            )));
        }
        Ok(j)
    }

    /// `lambda phi(t, s)` without derivatives.
    pub fn phi_value(&self, t: f64, s: f64) -> Result<f64> {
        let v = self.phi.eval(t, s)? * self.scale;
        if !(v > 0.0) {
            return Err(Error::Domain(format!(
                "phi must be positive, got {v} at (t, s) = ({t}, {s})"
            )));
        }
        Ok(v)
    }

    pub fn check_position(&self, x: [f64; 2]) -> Result<()> {
        let n = x[0].hypot(x[1]);
        if !(n < self.mu) {
            return Err(Error::Domain(format!(
                "|x| = {n} is outside the ball of radius {}",
                self.mu
            )));
        }
        Ok(())
    }

    /// `F(x, y)`.
    pub fn finsler(&self, p: &BaseTangent) -> Result<f64> {
        let v = vars_from_xy(p)?;
        Ok(v.r * self.phi_value(v.t, v.s)?)
    }
}

/// A tangent vector `y` at `x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BaseTangent {
    pub x: [f64; 2],
    pub y: [f64; 2],
}

impl BaseTangent {
    pub fn new(x: [f64; 2], y: [f64; 2]) -> Self {
        BaseTangent { x, y }
    }
}

/// The variables of the `(r, t, s)` calculus at a tangent vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangentVars {
    pub r: f64,
    pub t: f64,
    pub s: f64,
    /// `d r / d y^i = y^i / r`.
    pub r_i: [f64; 2],
    /// `x^i - s r_i`, so that `d s / d y^i = s_i / r`.
    pub s_i: [f64; 2],
    /// `2t - s^2`.
    pub z: f64,
    /// Oriented area `(x1 y2 - x2 y1)/|y|`; `area^2 = z`.
    pub area: f64,
}

pub fn vars_from_xy(p: &BaseTangent) -> Result<TangentVars> {
    let [x1, x2] = p.x;
    let [y1, y2] = p.y;
    let r = y1.hypot(y2);
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::ZeroVelocity);
    }
    let t = 0.5 * (x1 * x1 + x2 * x2);
    let s = (x1 * y1 + x2 * y2) / r;
    let r_i = [y1 / r, y2 / r];
    let s_i = [x1 - s * r_i[0], x2 - s * r_i[1]];
    let area = (x1 * y2 - x2 * y1) / r;
    let z = area * area;
    let zz = 2.0 * t - s * s;
    if (z - zz).abs() > 1e-12 * (1.0 + 2.0 * t) {
        return Err(Error::Degenerate(format!(
            "2t - s^2 = {zz} disagrees with the squared area {z}"
        )));
    }
    Ok(TangentVars {
        r,
        t,
        s,
        r_i,
        s_i,
        z,
        area,
    })
}

/// Jets in `(t, s)` of the quantities built from `phi`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Local {
    pub s: f64,
    pub z: f64,
    pub phi: Jet2,
    /// `phi - s phi_s + z phi_ss`.
    pub delta: Jet2,
    pub vbar: Jet2,
    pub ubar: Jet2,
    /// `(ubar - s vbar)/2`, so that `G^i = r p y^i + (r^2 vbar / 2) x^i`.
    /// Equals `(phi_s + s phi_t)/(2 phi)` only when `vbar = 0`.
    pub p: Jet2,
    /// `det g = phi^3 Delta`.
    pub d: Jet2,
}

impl Local {
    pub fn at(m: &SphericalMetric, t: f64, s: f64) -> Result<Local> {
        let phi = m.phi_jet(t, s)?;
        let tj = Jet2::var_t(t);
        let sj = Jet2::var_s(s);
        let zj = 2.0 * tj - sj * sj;
        let phi_t = phi.d_t();
        let phi_s = phi.d_s();
        let phi_ss = phi_s.d_s();
        let phi_ts = phi_t.d_s();
        let delta = phi - sj * phi_s + zj * phi_ss;
        if !(delta.value() > 0.0) {
            return Err(Error::Convexity(delta.value()));
        }
        let vbar = (sj * phi_ts + phi_ss - phi_t).try_div(delta)?;
        let ubar = (phi_s + sj * phi_t - zj * phi_s * vbar).try_div(phi)?;
        let p = (ubar - sj * vbar) * 0.5;
        let d = phi * phi * phi * delta;
        Ok(Local {
            s,
            z: 2.0 * t - s * s,
            phi,
            delta,
            vbar,
            ubar,
            p,
            d,
        })
    }

    /// `box f = s f_t + (1 - z vbar) f_s`, the derivative along the level
    /// sets of `a_1` written in `(t, s)`.
    pub fn boxed(&self, f: &Jet2) -> f64 {
        self.s * f.d_t().value() + (1.0 - self.z * self.vbar.value()) * f.d_s().value()
    }

    /// `phi^2 D_s / (2 D^{3/2})`, the main scalar without its area factor.
    pub fn iq(&self) -> Result<Jet2> {
        (self.phi * self.phi * self.d.d_s()).try_div(self.d.powf(1.5)? * 2.0)
    }
}

pub fn hilbert_coefficients(m: &SphericalMetric, p: &BaseTangent) -> Result<[f64; 2]> {
    m.check_position(p.x)?;
    let v = vars_from_xy(p)?;
    let phi = m.phi_jet(v.t, v.s)?;
    let (f, fs) = (phi.value(), phi.partial(0, 1));
    Ok([f * v.r_i[0] + fs * v.s_i[0], f * v.r_i[1] + fs * v.s_i[1]])
}

/// Spray data at a tangent vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeodesicData {
    pub delta: f64,
    pub vbar: f64,
    pub ubar: f64,
    /// Coefficient `P` of `y^i` in `G^i`; `F_0/(2F)` for projectively flat metrics.
    pub p: f64,
    /// Geodesic coefficients `G^i`.
    pub g: [f64; 2],
}

pub fn geodesic_data(m: &SphericalMetric, p: &BaseTangent) -> Result<GeodesicData> {
    m.check_position(p.x)?;
    let v = vars_from_xy(p)?;
    let l = Local::at(m, v.t, v.s)?;
    let (ub, vb) = (l.ubar.value(), l.vbar.value());
    let half_r2 = 0.5 * v.r * v.r;
    Ok(GeodesicData {
        delta: l.delta.value(),
        vbar: vb,
        ubar: ub,
        p: v.r * l.p.value(),
        g: [
            half_r2 * (ub * v.r_i[0] + vb * v.s_i[0]),
            half_r2 * (ub * v.r_i[1] + vb * v.s_i[1]),
        ],
    })
}

/// `N^i_j = dG^i/dy^j`, row `i`, column `j`.
pub fn connection_coeffs(m: &SphericalMetric, p: &BaseTangent) -> Result<[[f64; 2]; 2]> {
    m.check_position(p.x)?;
    let v = vars_from_xy(p)?;
    let l = Local::at(m, v.t, v.s)?;
    Ok(connection_from(&v, &l, p))
}

// G^i = P y^i + (r^2 vbar / 2) x^i, differentiated with f_{y^j} = r_j f_r + s_j f_s / r.
pub(crate) fn connection_from(v: &TangentVars, l: &Local, p: &BaseTangent) -> [[f64; 2]; 2] {
    let pv = l.p.value();
    let ps = l.p.partial(0, 1);
    let vb = l.vbar.value();
    let vbs = l.vbar.partial(0, 1);
    let big_p = v.r * pv;
    let mut n = [[0.0; 2]; 2];
    for (i, row) in n.iter_mut().enumerate() {
        for (j, nij) in row.iter_mut().enumerate() {
            let p_yj = v.r_i[j] * pv + ps * v.s_i[j];
            let q_yj = v.r * (v.r_i[j] * vb + 0.5 * vbs * v.s_i[j]);
            let delta = if i == j { big_p } else { 0.0 };
            *nij = p_yj * p.y[i] + delta + p.x[i] * q_yj;
        }
    }
    n
}

/// `D = det(g_ij) = phi^3 Delta`.
pub fn metric_det(m: &SphericalMetric, p: &BaseTangent) -> Result<f64> {
    m.check_position(p.x)?;
    let v = vars_from_xy(p)?;
    Ok(Local::at(m, v.t, v.s)?.d.value())
}

fn on_indicatrix(m: &SphericalMetric, p: &BaseTangent) -> Result<(TangentVars, Local)> {
    m.check_position(p.x)?;
    let v = vars_from_xy(p)?;
    let l = Local::at(m, v.t, v.s)?;
    let f = v.r * l.phi.value();
    if !((f - 1.0).abs() <= INDICATRIX_TOL) {
        return Err(Error::NotOnIndicatrix(f));
    }
    Ok((v, l))
}

pub(crate) fn a_from(v: &TangentVars, l: &Local) -> Result<[f64; 3]> {
    let phi = l.phi.value();
    let phi_s = l.phi.partial(0, 1);
    let delta = l.delta.value();
    let (ub, vb, vbs) = (l.ubar.value(), l.vbar.value(), l.vbar.partial(0, 1));
    let s = v.s;
    let a1 = (phi - s * phi_s) * v.area;
    let a2 = s * (phi * delta).sqrt();
    let tail = 2.0 + s * (ub - s * vb) - (2.0 * vb - s * vbs) * v.z;
    let a3 = delta.sqrt() / (2.0 * phi.sqrt()) * tail;
    let a = [a1, a2, a3];
    if a.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("Killing contractions".into()));
    }
    Ok(a)
}

/// Contractions `(omega_1, omega_2, omega_3)(X)` of the Killing lift of the
/// rotation field `-x2 d/dx1 + x1 d/dx2`.
pub fn a_components(m: &SphericalMetric, p: &BaseTangent) -> Result<[f64; 3]> {
    let (v, l) = on_indicatrix(m, p)?;
    a_from(&v, &l)
}

pub(crate) fn main_scalar_from(v: &TangentVars, l: &Local) -> Result<f64> {
    Ok(-v.area * l.iq()?.value())
}

/// Main scalar `I`.
pub fn main_scalar(m: &SphericalMetric, p: &BaseTangent) -> Result<f64> {
    m.check_position(p.x)?;
    let v = vars_from_xy(p)?;
    let l = Local::at(m, v.t, v.s)?;
    main_scalar_from(&v, &l)
}

/// Landsberg scalar `J` by its two independent routes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Landsberg {
    /// `J = (1/phi) box I`.
    pub value: f64,
    /// `a_2 J` expanded through `Psi = D_s/phi^2`, divided by `a_2`;
    /// `None` where `a_2` vanishes.
    pub expanded: Option<f64>,
}

/// Below this `|a_2|` the expanded route is not reported.
pub const A2_FLOOR: f64 = 1e-8;

pub(crate) fn landsberg_from(v: &TangentVars, l: &Local) -> Result<Landsberg> {
    let phi = l.phi.value();
    let delta = l.delta.value();
    let a2 = v.s * (phi * delta).sqrt();
    if a2.abs() < 1e-12 && v.z < 1e-12 {
        return Err(Error::Degenerate(
            "a2 = 0 and 2t - s^2 = 0: both routes for J are undefined".into(),
        ));
    }
    let iq = l.iq()?;
    let vb = l.vbar.value();
    let value = -(v.area / phi) * (l.boxed(&iq) + v.s * vb * iq.value());

    let expanded = if a2.abs() >= A2_FLOOR {
        let phi_s = l.phi.d_s();
        let psi = 3.0 * phi_s * l.delta + l.phi * l.delta.d_s();
        let box_log_phi = l.boxed(&l.phi) / phi;
        let bracket = 2.0 * delta * (l.boxed(&psi) + v.s * psi.value() * vb)
            - psi.value() * (delta * box_log_phi + 3.0 * l.boxed(&l.delta));
        let a2j = -(v.s * v.area) / (4.0 * phi * delta * delta) * bracket;
        Some(a2j / a2)
    } else {
        None
    };
    if !value.is_finite() || expanded.is_some_and(|e| !e.is_finite()) {
        return Err(Error::NonFinite("Landsberg scalar".into()));
    }
    Ok(Landsberg { value, expanded })
}

pub fn landsberg(m: &SphericalMetric, p: &BaseTangent) -> Result<Landsberg> {
    m.check_position(p.x)?;
    let v = vars_from_xy(p)?;
    let l = Local::at(m, v.t, v.s)?;
    landsberg_from(&v, &l)
}

/// Invariants at one point of the unit tangent bundle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InvariantSample {
    pub z: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub i: f64,
    pub j: f64,
    pub k: f64,
}

impl InvariantSample {
    /// `K a_2^2 + a_3^2`, constant along level sets of `a_1`.
    pub fn energy(&self) -> f64 {
        self.k * self.a2 * self.a2 + self.a3 * self.a3
    }

    /// `a_2 J - a_3 I`, constant along level sets of `a_1`.
    pub fn momentum(&self) -> f64 {
        self.a2 * self.j - self.a3 * self.i
    }

    /// `K I a_2 + J a_3 - K a_1`, the slope of `energy/2` in `a_1`.
    pub fn slope(&self) -> f64 {
        self.k * self.i * self.a2 + self.j * self.a3 - self.k * self.a1
    }
}

/// All invariants at `p` (on the indicatrix); `k` is supplied by the caller.
pub fn invariant_sample(m: &SphericalMetric, p: &BaseTangent, k: f64) -> Result<InvariantSample> {
    let (v, l) = on_indicatrix(m, p)?;
    let [a1, a2, a3] = a_from(&v, &l)?;
    Ok(InvariantSample {
        z: v.z,
        a1,
        a2,
        a3,
        i: main_scalar_from(&v, &l)?,
        j: landsberg_from(&v, &l)?.value,
        k,
    })
}

/// `s phi_ts + phi_ss - phi_t`, which vanishes iff the metric is projectively flat.
pub fn projective_flatness_residual(m: &SphericalMetric, t: f64, s: f64) -> Result<f64> {
    let phi = m.phi_jet(t, s)?;
    Ok(s * phi.partial(1, 1) + phi.partial(0, 2) - phi.partial(1, 0))
}
