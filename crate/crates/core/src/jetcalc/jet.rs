//! Truncated Taylor expansions of scalar functions of two variables `(t, s)`.
//!
//! A [`Jet2`] carries every partial derivative of total order `<= 4` at a base
//! point. Internally the coefficients are normalized Taylor coefficients
//! `c[i,j] = (d^{i+j} f / dt^i ds^j) / (i! j!)`, which makes multiplication a
//! truncated Cauchy product. [`Jet2::partial`] converts back to raw partials.
//!
//! Differentiating a jet ([`Jet2::d_t`], [`Jet2::d_s`]) loses one order of
//! validity. The valid order is tracked and propagated through arithmetic so
//! that reading a coefficient that is no longer meaningful is caught.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Maximum total order carried by a jet.
pub const ORDER: usize = 4;
/// Number of coefficients with `i + j <= ORDER`.
pub const LEN: usize = (ORDER + 1) * (ORDER + 2) / 2;

/// Leading values below this magnitude are rejected by division, square root
/// and logarithm.
pub const SINGULAR_EPS: f64 = 1e-12;

#[inline]
const fn idx(i: usize, j: usize) -> usize {
    let n = i + j;
    n * (n + 1) / 2 + j
}

const FACT: [f64; ORDER + 1] = [1.0, 1.0, 2.0, 6.0, 24.0];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2 {
    c: [f64; LEN],
    order: u8,
}

impl Jet2 {
    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; LEN];
        c[0] = v;
        Jet2 {
            c,
            order: ORDER as u8,
        }
    }

    /// The coordinate function `t` expanded at `t0`.
    pub fn var_t(t0: f64) -> Self {
        let mut j = Jet2::constant(t0);
        j.c[idx(1, 0)] = 1.0;
        j
    }

    /// The coordinate function `s` expanded at `s0`.
    pub fn var_s(s0: f64) -> Self {
        let mut j = Jet2::constant(s0);
        j.c[idx(0, 1)] = 1.0;
        j
    }

    /// Builds a jet from raw partial derivatives `partials(i, j)`.
    pub fn from_partials(mut partials: impl FnMut(usize, usize) -> f64) -> Self {
        let mut c = [0.0; LEN];
        for n in 0..=ORDER {
            for j in 0..=n {
                let i = n - j;
                c[idx(i, j)] = partials(i, j) / (FACT[i] * FACT[j]);
            }
        }
        Jet2 {
            c,
            order: ORDER as u8,
        }
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Total order up to which the coefficients are meaningful.
    #[inline]
    pub fn order(&self) -> usize {
        self.order as usize
    }

    /// Normalized Taylor coefficient of `dt^i ds^j`.
    pub fn taylor(&self, i: usize, j: usize) -> f64 {
        assert!(
            i + j <= self.order(),
            "coefficient ({i},{j}) beyond valid order {}",
            self.order
        );
        self.c[idx(i, j)]
    }

    /// The partial derivative `d^{i+j} f / dt^i ds^j` at the base point.
    pub fn partial(&self, i: usize, j: usize) -> f64 {
        self.taylor(i, j) * FACT[i] * FACT[j]
    }

    pub fn is_finite(&self) -> bool {
        self.valid_coeffs().all(|v| v.is_finite())
    }

    pub fn check_finite(self, what: &str) -> Result<Self> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(Error::NonFinite(what.to_string()))
        }
    }

    fn valid_coeffs(&self) -> impl Iterator<Item = f64> + '_ {
        let n = idx(0, self.order()) + 1;
        self.c[..n].iter().copied()
    }

    /// Jet of `df/dt`, valid to one order less.
    pub fn d_t(&self) -> Self {
        let mut out = [0.0; LEN];
        let ord = self.order();
        for n in 0..ord {
            for j in 0..=n {
                let i = n - j;
                out[idx(i, j)] = (i + 1) as f64 * self.c[idx(i + 1, j)];
            }
        }
        Jet2 {
            c: out,
            order: self.order.saturating_sub(1),
        }
    }

    /// Jet of `df/ds`, valid to one order less.
    pub fn d_s(&self) -> Self {
        let mut out = [0.0; LEN];
        let ord = self.order();
        for n in 0..ord {
            for j in 0..=n {
                let i = n - j;
                out[idx(i, j)] = (j + 1) as f64 * self.c[idx(i, j + 1)];
            }
        }
        Jet2 {
            c: out,
            order: self.order.saturating_sub(1),
        }
    }

    /// Sums `sum_k d[k]/k! h^k` where `h` is `self` with the constant term removed.
    fn compose(&self, d: [f64; ORDER + 1]) -> Self {
        let ord = self.order();
        let mut h = *self;
        h.c[0] = 0.0;
        let mut out = Jet2::constant(d[0]);
        out.order = self.order;
        let mut pow = h;
        for (k, dk) in d.iter().enumerate().skip(1) {
            if k > ord {
                break;
            }
            let w = dk / FACT[k];
            for (o, p) in out.c.iter_mut().zip(pow.c.iter()) {
                *o += w * p;
            }
            if k < ord {
                pow = pow * h;
            }
        }
        out
    }

    pub fn recip(self) -> Result<Self> {
        let x = self.value();
        if !(x.abs() >= SINGULAR_EPS) {
            return Err(Error::Domain(format!("division by near-zero value {x:e}")));
        }
        let r = 1.0 / x;
        Ok(self.compose([r, -r * r, 2.0 * r.powi(3), -6.0 * r.powi(4), 24.0 * r.powi(5)]))
    }

    pub fn try_div(self, rhs: Jet2) -> Result<Self> {
        Ok(self * rhs.recip()?)
    }

    pub fn sqrt(self) -> Result<Self> {
        let x = self.value();
        if !(x >= SINGULAR_EPS) {
            return Err(Error::Domain(format!("sqrt of non-positive value {x:e}")));
        }
        let r = x.sqrt();
        Ok(self.compose([
            r,
            0.5 / r,
            -0.25 / (x * r),
            0.375 / (x * x * r),
            -0.9375 / (x * x * x * r),
        ]))
    }

    pub fn ln(self) -> Result<Self> {
        let x = self.value();
        if !(x >= SINGULAR_EPS) {
            return Err(Error::Domain(format!("log of non-positive value {x:e}")));
        }
        let r = 1.0 / x;
        Ok(self.compose([x.ln(), r, -r * r, 2.0 * r.powi(3), -6.0 * r.powi(4)]))
    }

    pub fn exp(self) -> Self {
        let e = self.value().exp();
        self.compose([e; ORDER + 1])
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.compose([s, c, -s, -c, s])
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.compose([c, -s, -c, s, c])
    }

    pub fn sinh(self) -> Self {
        let (s, c) = (self.value().sinh(), self.value().cosh());
        self.compose([s, c, s, c, s])
    }

    pub fn cosh(self) -> Self {
        let (s, c) = (self.value().sinh(), self.value().cosh());
        self.compose([c, s, c, s, c])
    }

    /// Integer power by repeated multiplication; exact for polynomials.
    pub fn powi(self, n: i32) -> Result<Self> {
        let mut acc = Jet2::constant(1.0);
        acc.order = self.order;
        for _ in 0..n.unsigned_abs() {
            acc = acc * self;
        }
        if n < 0 {
            acc.recip()
        } else {
            Ok(acc)
        }
    }

    /// Real power with a constant exponent.
    pub fn powf(self, e: f64) -> Result<Self> {
        if e.fract() == 0.0 && e.abs() <= 64.0 {
            return self.powi(e as i32);
        }
        let x = self.value();
        if !(x >= SINGULAR_EPS) {
            return Err(Error::Domain(format!(
                "non-integer power {e} of non-positive value {x:e}"
            )));
        }
        let mut d = [0.0; ORDER + 1];
        let mut fall = 1.0;
        for (k, dk) in d.iter_mut().enumerate() {
            *dk = fall * x.powf(e - k as f64);
            fall *= e - k as f64;
        }
        Ok(self.compose(d))
    }

    /// `self ^ rhs` for a jet-valued exponent. Constant exponents go through
    /// [`Jet2::powf`] so negative bases with integer exponents are allowed.
    pub fn pow(self, rhs: Jet2) -> Result<Self> {
        if rhs.is_constant() {
            return self.powf(rhs.value());
        }
        Ok((rhs * self.ln()?).exp())
    }

    /// True when every derivative coefficient vanishes.
    pub fn is_constant(&self) -> bool {
        self.valid_coeffs().skip(1).all(|v| v == 0.0)
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(mut self, rhs: Jet2) -> Jet2 {
        for (a, b) in self.c.iter_mut().zip(rhs.c.iter()) {
            *a += b;
        }
        self.order = self.order.min(rhs.order);
        self
    }
}

impl AddAssign for Jet2 {
    fn add_assign(&mut self, rhs: Jet2) {
        *self = *self + rhs;
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(mut self, rhs: Jet2) -> Jet2 {
        for (a, b) in self.c.iter_mut().zip(rhs.c.iter()) {
            *a -= b;
        }
        self.order = self.order.min(rhs.order);
        self
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(mut self) -> Jet2 {
        for a in self.c.iter_mut() {
            *a = -*a;
        }
        self
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        let ord = self.order.min(rhs.order) as usize;
        let mut out = [0.0; LEN];
        for n1 in 0..=ord {
            for j1 in 0..=n1 {
                let a = self.c[idx(n1 - j1, j1)];
                if a == 0.0 {
                    continue;
                }
                for n2 in 0..=(ord - n1) {
                    for j2 in 0..=n2 {
                        out[idx(n1 - j1 + n2 - j2, j1 + j2)] += a * rhs.c[idx(n2 - j2, j2)];
                    }
                }
            }
        }
        Jet2 {
            c: out,
            order: ord as u8,
        }
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(mut self, rhs: f64) -> Jet2 {
        self.c[0] += rhs;
        self
    }
}

impl Sub<f64> for Jet2 {
    type Output = Jet2;
    fn sub(mut self, rhs: f64) -> Jet2 {
        self.c[0] -= rhs;
        self
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(mut self, rhs: f64) -> Jet2 {
        for a in self.c.iter_mut() {
            *a *= rhs;
        }
        self
    }
}

impl Div<f64> for Jet2 {
    type Output = Jet2;
    fn div(self, rhs: f64) -> Jet2 {
        self * (1.0 / rhs)
    }
}

impl Add<Jet2> for f64 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        rhs + self
    }
}

impl Sub<Jet2> for f64 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        -rhs + self
    }
}

impl Mul<Jet2> for f64 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        rhs * self
    }
}

/// Number-like values an expression can be evaluated over: plain reals and jets.
pub trait Scalar: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self> {
    fn constant(v: f64) -> Self;
    fn value(&self) -> f64;
    fn try_div(self, rhs: Self) -> Result<Self>;
    fn try_sqrt(self) -> Result<Self>;
    fn try_ln(self) -> Result<Self>;
    fn try_pow(self, rhs: Self) -> Result<Self>;
    fn exp(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
}

impl Scalar for Jet2 {
    fn constant(v: f64) -> Self {
        Jet2::constant(v)
    }
    fn value(&self) -> f64 {
        Jet2::value(self)
    }
    fn try_div(self, rhs: Self) -> Result<Self> {
        Jet2::try_div(self, rhs)
    }
    fn try_sqrt(self) -> Result<Self> {
        Jet2::sqrt(self)
    }
    fn try_ln(self) -> Result<Self> {
        Jet2::ln(self)
    }
    fn try_pow(self, rhs: Self) -> Result<Self> {
        Jet2::pow(self, rhs)
    }
    fn exp(self) -> Self {
        Jet2::exp(self)
    }
    fn sin(self) -> Self {
        Jet2::sin(self)
    }
    fn cos(self) -> Self {
        Jet2::cos(self)
    }
    fn sinh(self) -> Self {
        Jet2::sinh(self)
    }
    fn cosh(self) -> Self {
        Jet2::cosh(self)
    }
}

// Real evaluation applies the same domain rules as the jet path so both agree
// on which inputs are rejected.
impl Scalar for f64 {
    fn constant(v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn try_div(self, rhs: Self) -> Result<Self> {
        if !(rhs.abs() >= SINGULAR_EPS) {
            return Err(Error::Domain(format!("division by near-zero value {rhs:e}")));
        }
        Ok(self / rhs)
    }
    fn try_sqrt(self) -> Result<Self> {
        if !(self >= SINGULAR_EPS) {
            return Err(Error::Domain(format!("sqrt of non-positive value {self:e}")));
        }
        Ok(self.sqrt())
    }
    fn try_ln(self) -> Result<Self> {
        if !(self >= SINGULAR_EPS) {
            return Err(Error::Domain(format!("log of non-positive value {self:e}")));
        }
        Ok(self.ln())
    }
    fn try_pow(self, rhs: Self) -> Result<Self> {
        if rhs.fract() == 0.0 && rhs.abs() <= 64.0 {
            if rhs < 0.0 && !(self.abs() >= SINGULAR_EPS) {
                return Err(Error::Domain(format!("division by near-zero value {self:e}")));
            }
            return Ok(self.powi(rhs as i32));
        }
        if !(self >= SINGULAR_EPS) {
            return Err(Error::Domain(format!(
                "non-integer power {rhs} of non-positive value {self:e}"
            )));
        }
        Ok(self.powf(rhs))
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
}
