//! Normal-form coframes of constant-curvature Finsler surfaces with a
//! Killing field, in coordinates `(t, a, b)`.
//!
//! Each case is fixed by two profile functions `u(a) > 0` and `v(a)`. The
//! Killing lift is `d/db`, the Reeb field is `d/dt`, and `a = omega_1(d/db)`.

mod pchip;

pub use pchip::MonotoneCubic;

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::jetcalc::{
    exterior_derivative, BivariateFn, Coframe, FdStep, Jet2, OneForm, Scalar, NORMAL_BASIS,
};
use crate::sigma_chart::{structure_residuals_from, StructureResiduals};
use crate::spherical::{extract_profiles, ProfilePair, SphericalMetric};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CurvatureCase {
    PositiveOne,
    Zero,
    /// Only the subcase `-a_2^2 + a_3^2 > 0`.
    NegativeOne,
}

impl CurvatureCase {
    pub const ALL: [CurvatureCase; 3] = [
        CurvatureCase::PositiveOne,
        CurvatureCase::Zero,
        CurvatureCase::NegativeOne,
    ];

    pub fn k(self) -> f64 {
        match self {
            CurvatureCase::PositiveOne => 1.0,
            CurvatureCase::Zero => 0.0,
            CurvatureCase::NegativeOne => -1.0,
        }
    }

    pub fn from_k(k: f64) -> Result<Self> {
        if k == 1.0 {
            Ok(CurvatureCase::PositiveOne)
        } else if k == 0.0 {
            Ok(CurvatureCase::Zero)
        } else if k == -1.0 {
            Ok(CurvatureCase::NegativeOne)
        } else {
            Err(Error::Config(format!("K must be 1, 0 or -1, got {k}")))
        }
    }

    /// `(a_2, a_3)` in terms of `u` and `t`.
    pub fn killing_components(self, u: f64, t: f64) -> (f64, f64) {
        match self {
            CurvatureCase::PositiveOne => (u * t.sin(), u * t.cos()),
            CurvatureCase::Zero => (u * t, u),
            CurvatureCase::NegativeOne => (u * t.sinh(), u * t.cosh()),
        }
    }
}

impl FromStr for CurvatureCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "k1" => Ok(CurvatureCase::PositiveOne),
            "k0" => Ok(CurvatureCase::Zero),
            "k-1" => Ok(CurvatureCase::NegativeOne),
            _ => Err(Error::Config(format!("unknown case `{s}`, expected k1, k0 or k-1"))),
        }
    }
}

impl fmt::Display for CurvatureCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CurvatureCase::PositiveOne => "k1",
            CurvatureCase::Zero => "k0",
            CurvatureCase::NegativeOne => "k-1",
        })
    }
}

/// A function of one variable with its first two derivatives.
pub trait Profile: Send + Sync {
    fn derivatives(&self, a: f64) -> Result<[f64; 3]>;
}

/// A profile written once over [`Scalar`].
pub trait GenericProfile: Send + Sync {
    fn apply<S: Scalar>(&self, a: S) -> Result<S>;
}

/// Adapts a [`GenericProfile`] by evaluating it on a jet.
pub struct Jetted<G>(pub G);

impl<G: GenericProfile> Profile for Jetted<G> {
    fn derivatives(&self, a: f64) -> Result<[f64; 3]> {
        let j = self.0.apply(Jet2::var_t(a))?.check_finite("profile")?;
        Ok([j.value(), j.partial(1, 0), j.partial(2, 0)])
    }
}

/// A bivariate function read as a function of its first slot.
pub struct FirstSlot(pub Arc<dyn BivariateFn>);

impl Profile for FirstSlot {
    fn derivatives(&self, a: f64) -> Result<[f64; 3]> {
        let j = self.0.eval_jet(Jet2::var_t(a), Jet2::constant(0.0))?;
        let j = j.check_finite("profile")?;
        Ok([j.value(), j.partial(1, 0), j.partial(2, 0)])
    }
}

pub struct Constant(pub f64);

impl Profile for Constant {
    fn derivatives(&self, _a: f64) -> Result<[f64; 3]> {
        Ok([self.0, 0.0, 0.0])
    }
}

impl Profile for MonotoneCubic {
    fn derivatives(&self, a: f64) -> Result<[f64; 3]> {
        let [v, d1, d2, _] = MonotoneCubic::derivatives(self, a)?;
        Ok([v, d1, d2])
    }
}

/// `u = sqrt(1 + 4a^2)`, the first Funk profile.
pub struct FunkU;

impl GenericProfile for FunkU {
    fn apply<S: Scalar>(&self, a: S) -> Result<S> {
        (S::constant(1.0) + S::constant(4.0) * a * a).try_sqrt()
    }
}

/// `v = -3a/(1 + 4a^2)`, the second Funk profile.
pub struct FunkV;

impl GenericProfile for FunkV {
    fn apply<S: Scalar>(&self, a: S) -> Result<S> {
        (S::constant(-3.0) * a).try_div(S::constant(1.0) + S::constant(4.0) * a * a)
    }
}

#[derive(Clone)]
pub struct ProfileFunctions {
    pub u: Arc<dyn Profile>,
    pub v: Arc<dyn Profile>,
}

impl fmt::Debug for ProfileFunctions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ProfileFunctions { .. }")
    }
}

impl ProfileFunctions {
    pub fn new(u: Arc<dyn Profile>, v: Arc<dyn Profile>) -> Self {
        ProfileFunctions { u, v }
    }

    pub fn constant(u: f64, v: f64) -> Self {
        Self::new(Arc::new(Constant(u)), Arc::new(Constant(v)))
    }

    pub fn funk() -> Self {
        Self::new(Arc::new(Jetted(FunkU)), Arc::new(Jetted(FunkV)))
    }

    /// Monotone cubic interpolation of an extracted grid; at least
    /// [`MIN_INTERPOLATION_POINTS`] points are required.
    pub fn interpolate(pair: &ProfilePair) -> Result<Self> {
        if pair.rows.len() < MIN_INTERPOLATION_POINTS {
            return Err(Error::Interpolation(format!(
                "{} grid points, at least {MIN_INTERPOLATION_POINTS} required",
                pair.rows.len()
            )));
        }
        let (a, u, v) = pair.by_a();
        Ok(Self::new(
            Arc::new(MonotoneCubic::new(a.clone(), u)?),
            Arc::new(MonotoneCubic::new(a, v)?),
        ))
    }

    /// `(u, u', v)` at `a`, with `u > 0` enforced.
    pub fn at(&self, a: f64) -> Result<(f64, f64, f64)> {
        let [u, du, _] = self.u.derivatives(a)?;
        let [v, _, _] = self.v.derivatives(a)?;
        if !(u > 0.0) {
            return Err(Error::NonPositiveU { a, u });
        }
        Ok((u, du, v))
    }
}

pub const MIN_INTERPOLATION_POINTS: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalChartPoint {
    pub t: f64,
    pub a: f64,
    pub b: f64,
}

impl NormalChartPoint {
    pub fn new(t: f64, a: f64, b: f64) -> Self {
        NormalChartPoint { t, a, b }
    }

    fn from_array(c: [f64; 3]) -> Self {
        Self::new(c[0], c[1], c[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.t, self.a, self.b]
    }
}

/// Rows `omega_1, omega_2, omega_3` over `(dt, da, db)`.
pub fn coframe(case: CurvatureCase, prof: &ProfileFunctions, p: NormalChartPoint) -> Result<Coframe> {
    let (u, _, v) = prof.at(p.a)?;
    let (t, a) = (p.t, p.a);
    let rows = match case {
        CurvatureCase::PositiveOne => [
            [1.0, v, a],
            [0.0, -t.cos() / u, u * t.sin()],
            [0.0, t.sin() / u, u * t.cos()],
        ],
        CurvatureCase::Zero => [[1.0, v, a], [0.0, -1.0 / u, t * u], [0.0, 0.0, u]],
        CurvatureCase::NegativeOne => [
            [1.0, v, a],
            [0.0, -t.cosh() / u, u * t.sinh()],
            [0.0, -t.sinh() / u, u * t.cosh()],
        ],
    };
    Ok(Coframe::new(NORMAL_BASIS, rows))
}

/// `(I, J)` of the normal form.
pub fn scalars(case: CurvatureCase, prof: &ProfileFunctions, p: NormalChartPoint) -> Result<(f64, f64)> {
    let (u, du, v) = prof.at(p.a)?;
    let (t, a) = (p.t, p.a);
    Ok(match case {
        CurvatureCase::PositiveOne => {
            let w = du + a / u;
            (w * t.sin() - u * v * t.cos(), w * t.cos() + u * v * t.sin())
        }
        CurvatureCase::Zero => (du * t - u * v, du),
        CurvatureCase::NegativeOne => {
            let w = du - a / u;
            (w * t.sinh() - u * v * t.cosh(), w * t.cosh() - u * v * t.sinh())
        }
    })
}

/// Residuals of the structure equations with `K = case.k()`.
pub fn verify_structure(
    case: CurvatureCase,
    prof: &ProfileFunctions,
    p: NormalChartPoint,
    step: FdStep,
) -> Result<StructureResiduals> {
    let cf = coframe(case, prof, p)?;
    let field = |row: usize| {
        move |c: [f64; 3]| -> Result<OneForm> {
            Ok(coframe(case, prof, NormalChartPoint::from_array(c))?.form(row))
        }
    };
    let c = p.to_array();
    let d = [
        exterior_derivative(field(0), c, step)?,
        exterior_derivative(field(1), c, step)?,
        exterior_derivative(field(2), c, step)?,
    ];
    let (i, j) = scalars(case, prof, p)?;
    structure_residuals_from(&cf, d, i, j, case.k())
}

/// Absolute residuals of the three algebraic conservation laws.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConservationResiduals {
    /// `K a_2^2 + a_3^2 = u^2`.
    pub energy: f64,
    /// `K I a_2 + J a_3 = u u' + K a`.
    pub slope: f64,
    /// `a_2 J - a_3 I = u^2 v`.
    pub momentum: f64,
}

impl ConservationResiduals {
    pub fn max(&self) -> f64 {
        self.energy.max(self.slope).max(self.momentum)
    }
}

pub fn conservation_check(
    case: CurvatureCase,
    prof: &ProfileFunctions,
    p: NormalChartPoint,
) -> Result<ConservationResiduals> {
    let (u, du, v) = prof.at(p.a)?;
    let (a2, a3) = case.killing_components(u, p.t);
    let (i, j) = scalars(case, prof, p)?;
    let k = case.k();
    Ok(ConservationResiduals {
        energy: (k * a2 * a2 + a3 * a3 - u * u).abs(),
        slope: (k * i * a2 + j * a3 - (u * du + k * p.a)).abs(),
        momentum: (a2 * j - a3 * i - u * u * v).abs(),
    })
}

/// The Killing lift and the Reeb field in chart components, with the
/// contractions that identify them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeometricFields {
    pub xhat: [f64; 3],
    pub reeb: [f64; 3],
    /// `omega(xhat)`.
    pub omega_xhat: [f64; 3],
    /// `(a, a_2, a_3)` from the case reconstruction.
    pub expected_xhat: [f64; 3],
    /// `omega(reeb)`.
    pub omega_reeb: [f64; 3],
}

impl GeometricFields {
    /// Largest deviation of `omega(xhat)` from `(a, a_2, a_3)` and of
    /// `omega(reeb)` from `(1, 0, 0)`.
    pub fn max_deviation(&self) -> f64 {
        let target = [1.0, 0.0, 0.0];
        (0..3).fold(0.0f64, |m, i| {
            m.max((self.omega_xhat[i] - self.expected_xhat[i]).abs())
                .max((self.omega_reeb[i] - target[i]).abs())
        })
    }
}

pub fn geometric_fields(
    case: CurvatureCase,
    prof: &ProfileFunctions,
    p: NormalChartPoint,
) -> Result<GeometricFields> {
    let cf = coframe(case, prof, p)?;
    let (u, _, _) = prof.at(p.a)?;
    let (a2, a3) = case.killing_components(u, p.t);
    let xhat = [0.0, 0.0, 1.0];
    let reeb = cf.dual_vector([1.0, 0.0, 0.0])?;
    Ok(GeometricFields {
        xhat,
        reeb,
        omega_xhat: cf.contract(xhat),
        expected_xhat: [p.a, a2, a3],
        omega_reeb: cf.contract(reeb),
    })
}

/// Seeded chart points with `t` over a full period, `a` in `[a_lo, a_hi]`
/// and `b` in `[-1, 1]`.
pub fn random_chart_points(n: usize, seed: u64, a_lo: f64, a_hi: f64) -> Vec<NormalChartPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let t = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
            let a = if a_hi > a_lo { rng.gen_range(a_lo..a_hi) } else { a_lo };
            let b = rng.gen_range(-1.0..1.0);
            NormalChartPoint::new(t, a, b)
        })
        .collect()
}

/// Normal-form dump: `t,a,b,w11,...,w33,I,J`.
pub fn write_normal_form_csv(
    mut w: impl Write,
    case: CurvatureCase,
    prof: &ProfileFunctions,
    points: &[NormalChartPoint],
) -> Result<()> {
    writeln!(w, "t,a,b,w11,w12,w13,w21,w22,w23,w31,w32,w33,I,J")?;
    for p in points {
        let cf = coframe(case, prof, *p)?;
        let (i, j) = scalars(case, prof, *p)?;
        let mut fields = vec![p.t, p.a, p.b];
        fields.extend(cf.rows.iter().flatten());
        fields.extend([i, j]);
        let line: Vec<String> = fields.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

/// Summary of re-inserting extracted profiles into the normal form.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundtripReport {
    pub case: CurvatureCase,
    pub profiles: ProfilePair,
    pub structure_max: f64,
    pub conservation_max: f64,
    pub geometric_max: f64,
    /// `max |u - sqrt(1+4a^2)|` and `max |v + 3a/(1+4a^2)|` over the grid,
    /// reported for the Funk fixtures.
    pub funk_deviation: Option<(f64, f64)>,
}

/// Margin kept between sample points and the ends of the interpolated range.
const ROUNDTRIP_MARGIN: f64 = 1e-3;

/// Max deviation of a profile grid from the Funk closed forms.
pub fn funk_deviation(pair: &ProfilePair) -> Result<(f64, f64)> {
    let reference = ProfileFunctions::funk();
    let mut du = 0.0f64;
    let mut dv = 0.0f64;
    for r in &pair.rows {
        let (u, _, v) = reference.at(r.a)?;
        du = du.max((r.u - u).abs());
        dv = dv.max((r.v - v).abs());
    }
    Ok((du, dv))
}

/// Extracts `u, v` from `scale * m`, interpolates them, and checks the
/// resulting normal form at `points` seeded chart points.
pub fn roundtrip(
    case: CurvatureCase,
    m: &SphericalMetric,
    scale: f64,
    z_grid: &[f64],
    points: usize,
    seed: u64,
) -> Result<RoundtripReport> {
    let pair = extract_profiles(m, case.k(), scale, z_grid)?;
    let prof = ProfileFunctions::interpolate(&pair)?;
    let (a, _, _) = pair.by_a();
    let (lo, hi) = (a[0] + ROUNDTRIP_MARGIN, a[a.len() - 1] - ROUNDTRIP_MARGIN);
    let mut structure_max = 0.0f64;
    let mut conservation_max = 0.0f64;
    let mut geometric_max = 0.0f64;
    for p in random_chart_points(points, seed, lo, hi) {
        structure_max = structure_max.max(verify_structure(case, &prof, p, FdStep::default())?.max());
        conservation_max = conservation_max.max(conservation_check(case, &prof, p)?.max());
        geometric_max = geometric_max.max(geometric_fields(case, &prof, p)?.max_deviation());
    }
    let funk_deviation = if m.name.starts_with("funk") && (scale.abs() - 0.5).abs() < 1e-15 {
        Some(funk_deviation(&pair)?)
    } else {
        None
    };
    Ok(RoundtripReport {
        case,
        profiles: pair,
        structure_max,
        conservation_max,
        geometric_max,
        funk_deviation,
    })
}
