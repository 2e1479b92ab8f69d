use finsler_core::jetcalc::{
    central_jacobian, exterior_derivative, jet_of, DiffMode, FdStep, GenericBivariate, OneForm, Scalar,
    ORDER, SIGMA_BASIS,
};
use finsler_core::spherical::builtin::Funk;
use finsler_core::Result;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Sum of `c[i][j] t^i s^j`, evaluated by Horner in `t` then `s`.
struct Poly<const N: usize>([[f64; N]; N]);

impl<const N: usize> GenericBivariate for Poly<N> {
    fn apply<S: Scalar>(&self, t: S, s: S) -> Result<S> {
        let mut acc = S::constant(0.0);
        for j in (0..N).rev() {
            let mut row = S::constant(0.0);
            for i in (0..N).rev() {
                row = row * t + S::constant(self.0[i][j]);
            }
            acc = acc * s + row;
        }
        Ok(acc)
    }
}

fn poly_product(f: &[[f64; 3]; 3], g: &[[f64; 3]; 3]) -> [[f64; 5]; 5] {
    let mut out = [[0.0; 5]; 5];
    for (i, j, k, l) in index_quads(3) {
        out[i + k][j + l] += f[i][j] * g[k][l];
    }
    out
}

fn index_quads(n: usize) -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (0..n).flat_map(move |i| {
        (0..n).flat_map(move |j| (0..n).flat_map(move |k| (0..n).map(move |l| (i, j, k, l))))
    })
}

fn degree_two(c: [i8; 6]) -> [[f64; 3]; 3] {
    let c = c.map(f64::from);
    [[c[0], c[1], c[2]], [c[3], c[4], 0.0], [c[5], 0.0, 0.0]]
}

/// A smooth scalar field on a 3-chart with random parameters.
#[derive(Clone, Copy, Debug)]
struct Field {
    k: [f64; 3],
    w: [f64; 3],
    q: f64,
}

impl Field {
    fn at(&self, p: [f64; 3]) -> f64 {
        let phase = self.k[0] * p[0] + self.k[1] * p[1] + self.k[2] * p[2];
        phase.sin() * (self.w[0] * p[0]).exp() + self.q * p[1] * p[2] * p[2] + (self.w[1] * p[0] * p[1]).cos()
            - self.w[2] * p[2] * p[0]
    }
}

fn field_strategy() -> impl Strategy<Value = Field> {
    (
        prop::array::uniform3(-2.0f64..2.0),
        prop::array::uniform3(-1.0f64..1.0),
        -1.0f64..1.0,
    )
        .prop_map(|(k, w, q)| Field { k, w, q })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn d_squared_vanishes(f in field_strategy(), seed in any::<u64>()) {
        let step = FdStep::default();
        let df = |p: [f64; 3]| -> Result<OneForm> {
            let g = central_jacobian(|q| Ok([f.at(q)]), p, step)?;
            Ok(OneForm::new(SIGMA_BASIS, [g[0][0], g[1][0], g[2][0]]))
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20 {
            let p = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let ddf = exterior_derivative(df, p, step).unwrap();
            prop_assert!(ddf.norm_inf() <= 1e-7, "|d(df)| = {:e} at {:?}", ddf.norm_inf(), p);
        }
    }

    #[test]
    fn leibniz_exact_for_quadratics(
        cf in prop::array::uniform6(-8i8..=8),
        cg in prop::array::uniform6(-8i8..=8),
        nt in -16i32..=16,
        ns in -16i32..=16,
    ) {
        // Integer coefficients at dyadic points keep every product exact.
        let (f, g) = (degree_two(cf), degree_two(cg));
        let (t, s) = (f64::from(nt) / 16.0, f64::from(ns) / 16.0);
        let jf = jet_of(&Poly(f), t, s, DiffMode::Jet).unwrap();
        let jg = jet_of(&Poly(g), t, s, DiffMode::Jet).unwrap();
        let jfg = jet_of(&Poly(poly_product(&f, &g)), t, s, DiffMode::Jet).unwrap();
        prop_assert_eq!(jfg, jf * jg);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    // Sampled over |x| <= 0.5, i.e. t <= 1/8 and |s| <= |x|.
    #[test]
    fn funk_jet_matches_finite_differences(radius in 0.0f64..0.5, angle in 0.0f64..std::f64::consts::TAU) {
        let t = 0.5 * radius * radius;
        let s = radius * angle.cos();
        let f = Funk::forward();
        let exact = jet_of(&f, t, s, DiffMode::Jet).unwrap();
        let approx = jet_of(&f, t, s, DiffMode::fd()).unwrap();
        for n in 0..=ORDER {
            let tol = if n <= 3 { 1e-6 } else { 1e-4 };
            for j in 0..=n {
                let (a, b) = (exact.partial(n - j, j), approx.partial(n - j, j));
                prop_assert!((a - b).abs() <= tol, "partial ({}, {}) at ({t}, {s}): {a} vs {b}", n - j, j);
            }
        }
    }
}

#[test]
fn polynomial_jet_exact_and_fd_within_budget() {
    // 1 + 2t - s + t s^2 + t^2
    let p = Poly([[1.0, -1.0, 0.0], [2.0, 0.0, 1.0], [1.0, 0.0, 0.0]]);
    let (t, s) = (0.3, -0.7);
    let jet = jet_of(&p, t, s, DiffMode::Jet).unwrap();
    assert_eq!(jet.partial(1, 2), 2.0);
    assert_eq!(jet.partial(2, 0), 2.0);
    assert!((jet.partial(0, 1) - (-1.0 + 2.0 * t * s)).abs() < 1e-15);
    let fd = jet_of(&p, t, s, DiffMode::fd()).unwrap();
    for n in 0..=ORDER {
        for j in 0..=n {
            let tol = if n <= 3 { 1e-6 } else { 1e-4 };
            assert!((fd.partial(n - j, j) - jet.partial(n - j, j)).abs() < tol);
        }
    }
}
