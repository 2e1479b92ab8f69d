//! Differential forms on three-dimensional charts, stored by components.
//!
//! A 1-form is `c1 e1 + c2 e2 + c3 e3` over the coordinate differentials of a
//! chart. A 2-form is stored over `{e2^e3, e3^e1, e1^e2}` so that wedge
//! products read like cross products.

use crate::error::{Error, Result};

/// Ordered names of the three chart coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Basis(pub [&'static str; 3]);

/// Unit tangent bundle chart `(x1, x2, psi)`.
pub const SIGMA_BASIS: Basis = Basis(["x1", "x2", "psi"]);
/// Normal-form chart `(t, a, b)`.
pub const NORMAL_BASIS: Basis = Basis(["t", "a", "b"]);

impl Basis {
    fn ensure_same(self, other: Basis) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::BasisMismatch {
                left: self.0,
                right: other.0,
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OneForm {
    pub basis: Basis,
    pub coeffs: [f64; 3],
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoForm {
    pub basis: Basis,
    /// Components over `e2^e3, e3^e1, e1^e2`.
    pub coeffs: [f64; 3],
}

impl OneForm {
    pub fn new(basis: Basis, coeffs: [f64; 3]) -> Self {
        OneForm { basis, coeffs }
    }

    /// Evaluates the form on a tangent vector given by chart components.
    pub fn apply(&self, v: [f64; 3]) -> f64 {
        dot(self.coeffs, v)
    }

    pub fn scale(&self, k: f64) -> OneForm {
        OneForm::new(self.basis, self.coeffs.map(|c| c * k))
    }
}

impl TwoForm {
    pub fn zero(basis: Basis) -> Self {
        TwoForm {
            basis,
            coeffs: [0.0; 3],
        }
    }

    pub fn add(&self, other: &TwoForm) -> Result<TwoForm> {
        self.basis.ensure_same(other.basis)?;
        Ok(TwoForm {
            basis: self.basis,
            coeffs: [
                self.coeffs[0] + other.coeffs[0],
                self.coeffs[1] + other.coeffs[1],
                self.coeffs[2] + other.coeffs[2],
            ],
        })
    }

    pub fn scale(&self, k: f64) -> TwoForm {
        TwoForm {
            basis: self.basis,
            coeffs: self.coeffs.map(|c| c * k),
        }
    }

    pub fn sub(&self, other: &TwoForm) -> Result<TwoForm> {
        self.add(&other.scale(-1.0))
    }

    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

pub fn wedge(a: &OneForm, b: &OneForm) -> Result<TwoForm> {
    a.basis.ensure_same(b.basis)?;
    Ok(TwoForm {
        basis: a.basis,
        coeffs: cross(a.coeffs, b.coeffs),
    })
}

/// Step and extrapolation settings for central differences.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdStep {
    pub h: f64,
    pub richardson: bool,
}

/// Default step for exterior derivatives and frame derivatives.
pub const DEFAULT_FORM_STEP: FdStep = FdStep {
    h: 1e-4,
    richardson: true,
};

impl Default for FdStep {
    fn default() -> Self {
        DEFAULT_FORM_STEP
    }
}

impl FdStep {
    pub fn with_h(h: f64) -> Self {
        FdStep { h, ..DEFAULT_FORM_STEP }
    }
}

/// `J[j][k] = d f_k / d p_j` by central differences.
pub fn central_jacobian<const N: usize>(
    f: impl Fn([f64; 3]) -> Result<[f64; N]>,
    p: [f64; 3],
    step: FdStep,
) -> Result<[[f64; N]; 3]> {
    let diff = |h: f64| -> Result<[[f64; N]; 3]> {
        let mut out = [[0.0; N]; 3];
        for (j, row) in out.iter_mut().enumerate() {
            let mut plus = p;
            let mut minus = p;
            plus[j] += h;
            minus[j] -= h;
            let fp = f(plus)?;
            let fm = f(minus)?;
            for k in 0..N {
                row[k] = (fp[k] - fm[k]) / (2.0 * h);
            }
        }
        Ok(out)
    };
    let mut jac = diff(step.h)?;
    if step.richardson {
        let coarse = diff(2.0 * step.h)?;
        for (row, crow) in jac.iter_mut().zip(coarse.iter()) {
            for (v, c) in row.iter_mut().zip(crow.iter()) {
                *v = (4.0 * *v - c) / 3.0;
            }
        }
    }
    for row in &jac {
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("finite-difference derivative".into()));
        }
    }
    Ok(jac)
}

/// Curl of a coefficient Jacobian `J[j][k] = d_j w_k` as a 2-form.
fn curl(jac: &[[f64; 3]; 3]) -> [f64; 3] {
    [
        jac[1][2] - jac[2][1],
        jac[2][0] - jac[0][2],
        jac[0][1] - jac[1][0],
    ]
}

/// Numeric `d` of a 1-form field on a chart.
pub fn exterior_derivative(
    field: impl Fn([f64; 3]) -> Result<OneForm>,
    p: [f64; 3],
    step: FdStep,
) -> Result<TwoForm> {
    let basis = field(p)?.basis;
    let jac = central_jacobian(|q| Ok(field(q)?.coeffs), p, step)?;
    Ok(TwoForm {
        basis,
        coeffs: curl(&jac),
    })
}

/// Three 1-forms evaluated at a point; row `i` holds the components of
/// `omega_{i+1}` over the chart basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coframe {
    pub basis: Basis,
    pub rows: [[f64; 3]; 3],
}

/// Smallest `|det|` accepted when inverting a coframe.
pub const SINGULAR_DET: f64 = 1e-12;

impl Coframe {
    pub fn new(basis: Basis, rows: [[f64; 3]; 3]) -> Self {
        Coframe { basis, rows }
    }

    pub fn form(&self, i: usize) -> OneForm {
        OneForm::new(self.basis, self.rows[i])
    }

    pub fn det(&self) -> f64 {
        dot(self.rows[0], cross(self.rows[1], self.rows[2]))
    }

    /// `(omega_1(v), omega_2(v), omega_3(v))`.
    pub fn contract(&self, v: [f64; 3]) -> [f64; 3] {
        [dot(self.rows[0], v), dot(self.rows[1], v), dot(self.rows[2], v)]
    }

    fn check_invertible(&self) -> Result<f64> {
        let det = self.det();
        if !(det.abs() >= SINGULAR_DET) {
            return Err(Error::SingularCoframe(det.abs()));
        }
        Ok(det)
    }

    /// The vector `v` with `omega_i(v) = target_i`.
    pub fn dual_vector(&self, target: [f64; 3]) -> Result<[f64; 3]> {
        solve3(self.rows, target, self.check_invertible()?)
    }

    /// Coefficients `f_i` with `df = sum_i f_i omega_i`, given the chart
    /// gradient of `f`.
    pub fn frame_components(&self, gradient: [f64; 3]) -> Result<[f64; 3]> {
        let det = self.check_invertible()?;
        solve3(transpose(self.rows), gradient, det)
    }

    /// The frame 2-forms `omega_2^omega_3, omega_3^omega_1, omega_1^omega_2`.
    pub fn two_form_basis(&self) -> [[f64; 3]; 3] {
        let [w1, w2, w3] = self.rows;
        [cross(w2, w3), cross(w3, w1), cross(w1, w2)]
    }

    /// Coefficients of a chart 2-form over the frame 2-forms
    /// `omega_2^omega_3, omega_3^omega_1, omega_1^omega_2`.
    pub fn two_form_components(&self, form: &TwoForm) -> Result<[f64; 3]> {
        self.basis.ensure_same(form.basis)?;
        let cols = self.two_form_basis();
        let m = transpose(cols);
        let det = dot(m[0], cross(m[1], m[2]));
        if !(det.abs() >= SINGULAR_DET) {
            return Err(Error::SingularCoframe(det.abs()));
        }
        solve3(m, form.coeffs, det)
    }
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn transpose(m: [[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut t = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = m[j][i];
        }
    }
    t
}

// Cramer's rule for M x = b.
fn solve3(m: [[f64; 3]; 3], b: [f64; 3], det: f64) -> Result<[f64; 3]> {
    let mut x = [0.0; 3];
    for (k, xk) in x.iter_mut().enumerate() {
        let mut mk = m;
        for (row, bi) in mk.iter_mut().zip(b.iter()) {
            row[k] = *bi;
        }
        *xk = dot(mk[0], cross(mk[1], mk[2])) / det;
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("linear solve".into()));
    }
    Ok(x)
}
