//! Differentiation substrate: truncated Taylor jets in `(t, s)`, finite
//! difference jets used as an independent check, and numeric exterior calculus
//! on three-dimensional charts.

mod forms;
mod jet;

pub use forms::{
    central_jacobian, exterior_derivative, wedge, Basis, Coframe, FdStep, OneForm, TwoForm,
    DEFAULT_FORM_STEP, NORMAL_BASIS, SIGMA_BASIS, SINGULAR_DET,
};
pub use jet::{Jet2, Scalar, LEN, ORDER, SINGULAR_EPS};

use crate::error::Result;

/// A scalar function of `(t, s)` that can be evaluated over reals and jets.
pub trait BivariateFn: Send + Sync {
    fn eval_jet(&self, t: Jet2, s: Jet2) -> Result<Jet2>;
    fn eval(&self, t: f64, s: f64) -> Result<f64>;
}

/// Functions written once, generically over [`Scalar`].
pub trait GenericBivariate: Send + Sync {
    fn apply<S: Scalar>(&self, t: S, s: S) -> Result<S>;
}

impl<G: GenericBivariate> BivariateFn for G {
    fn eval_jet(&self, t: Jet2, s: Jet2) -> Result<Jet2> {
        self.apply(t, s)
    }
    fn eval(&self, t: f64, s: f64) -> Result<f64> {
        self.apply(t, s)
    }
}

/// How partial derivatives of `phi` are produced.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum DiffMode {
    /// Truncated Taylor propagation through the expression.
    #[default]
    Jet,
    /// Central stencils of base step `h`.
    FiniteDifference { h: f64 },
}

/// Default base step of the finite-difference jet mode.
pub const DEFAULT_JET_FD_STEP: f64 = 1e-3;

impl DiffMode {
    pub fn fd() -> Self {
        DiffMode::FiniteDifference {
            h: DEFAULT_JET_FD_STEP,
        }
    }
}

/// All partials of total order `<= 4` of `f` at `(t0, s0)`.
pub fn jet_of(f: &dyn BivariateFn, t0: f64, s0: f64, mode: DiffMode) -> Result<Jet2> {
    let jet = match mode {
        DiffMode::Jet => f.eval_jet(Jet2::var_t(t0), Jet2::var_s(s0))?,
        DiffMode::FiniteDifference { h } => fd_jet(f, t0, s0, h)?,
    };
    jet.check_finite("jet coefficients")
}

// O(h^2) central weights for derivative order k, as (offset, weight) at unit step.
fn stencil(k: usize) -> &'static [(i32, f64)] {
    match k {
        0 => &[(0, 1.0)],
        1 => &[(-1, -0.5), (1, 0.5)],
        2 => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
        3 => &[(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
        4 => &[(-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)],
        _ => unreachable!("stencil order"),
    }
}

// Higher orders amplify rounding by h^-n; they use a wider step.
const STEP_MULTIPLIERS: [f64; ORDER + 1] = [1.0, 1.0, 2.0, 3.0, 5.0];
const RICHARDSON_LEVELS: usize = 3;

fn fd_jet(f: &dyn BivariateFn, t0: f64, s0: f64, h: f64) -> Result<Jet2> {
    fd_jet_with(f, t0, s0, STEP_MULTIPLIERS.map(|m| m * h), RICHARDSON_LEVELS)
}

fn fd_jet_with(
    f: &dyn BivariateFn,
    t0: f64,
    s0: f64,
    steps: [f64; ORDER + 1],
    levels: usize,
) -> Result<Jet2> {
    let mut cache = std::collections::HashMap::<(i64, i64, u64), f64>::new();
    let mut eval = |a: i32, b: i32, step: f64| -> Result<f64> {
        let key = (a as i64, b as i64, step.to_bits());
        if let Some(v) = cache.get(&key) {
            return Ok(*v);
        }
        let v = f.eval(t0 + a as f64 * step, s0 + b as f64 * step)?;
        cache.insert(key, v);
        Ok(v)
    };
    let mut partials = [[0.0; ORDER + 1]; ORDER + 1];
    for n in 0..=ORDER {
        for j in 0..=n {
            let i = n - j;
            let mut at = |step: f64| -> Result<f64> {
                let mut acc = 0.0;
                for &(a, wa) in stencil(i) {
                    for &(b, wb) in stencil(j) {
                        acc += wa * wb * eval(a, b, step)?;
                    }
                }
                Ok(acc / step.powi(n as i32))
            };
            if n == 0 {
                partials[i][j] = at(steps[0])?;
                continue;
            }
            // Richardson table on h, 2h, 4h, ...; error terms are even in h.
            let mut table = Vec::with_capacity(levels + 1);
            for l in 0..=levels {
                table.push(at(steps[n] * (1u32 << l) as f64)?);
            }
            for l in 1..=levels {
                let w = 4f64.powi(l as i32);
                for q in 0..=levels - l {
                    table[q] = (w * table[q] - table[q + 1]) / (w - 1.0);
                }
            }
            partials[i][j] = table[0];
        }
    }
    Ok(Jet2::from_partials(|i, j| partials[i][j]))
}
