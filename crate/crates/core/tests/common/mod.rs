#![allow(dead_code)]

use std::sync::Arc;

use finsler_core::jetcalc::{GenericBivariate, Scalar};
use finsler_core::spherical::SphericalMetric;
use finsler_core::Result;

/// `1 + s^2/5 + t/3 + s t/7 + s/4`: convex near the origin, not projectively
/// flat, not of constant curvature.
pub struct Lopsided;

impl GenericBivariate for Lopsided {
    fn apply<S: Scalar>(&self, t: S, s: S) -> Result<S> {
        let c = S::constant;
        Ok(c(1.0) + s * s * c(0.2) + t * c(1.0 / 3.0) + s * t * c(1.0 / 7.0) + s * c(0.25))
    }
}

pub fn lopsided() -> SphericalMetric {
    SphericalMetric::new("lopsided", Arc::new(Lopsided), 1.0)
}

/// Reference values at one chart point `(x1, x2, psi)`, computed from `F`
/// alone: metric by automatic Hessian, spray from its defining formula,
/// coframe differentials by automatic Jacobian.
pub struct Reference {
    pub chart: [f64; 3],
    pub y: [f64; 2],
    pub coframe: [[f64; 3]; 3],
    pub a: [f64; 3],
    pub i: f64,
    pub j: f64,
    pub k: f64,
    pub g: [f64; 2],
    pub n: [[f64; 2]; 2],
    pub det: f64,
}

pub const FUNK_REF: Reference = Reference {
    chart: [0.3, -0.2, 1.1],
    y: [0.44264313375301134, 0.8696873717560359],
    coframe: [
        [0.8150662225992938, 0.7349957625827546, 0.0],
        [-0.9999591358627445, 0.5089473066965532, 0.0],
        [-0.4999795679313721, 0.2544736533482765, 1.0949338634832244],
    ],
    a: [0.38351197329468517, -0.04730763516358295, 1.0712800459014329],
    i: -0.5491156525020752,
    j: 0.27455782625103625,
    k: -0.2500000000000013,
    g: [0.22132156687650573, 0.434843685878018],
    n: [
        [0.6803917334937906, 0.16267041382240743],
        [0.3544264004697506, 0.8196082665062095],
    ],
    det: 1.3220204621663574,
};

/// Funk metric scaled by 1/2.
pub const FUNK_HALF_REF: Reference = Reference {
    chart: [-0.35, 0.25, 4.0],
    y: [-1.1295822696435607, -1.3078543919580536],
    coframe: [
        [-0.5858000716341191, -0.2586607711120651, 0.0],
        [0.47389879798008755, -0.4093021999201814, 0.0],
        [0.4738987979800871, -0.4093021999201811, 1.0821311322378409],
    ],
    a: [0.23698128779775254, 0.0247810704770416, 1.1069122027148826],
    i: -0.6282125026581198,
    j: 0.62821250265812,
    k: -1.0000000000000013,
    g: [-1.12958226964356, -1.3078543919580523],
    n: [
        [1.6617093744738274, 0.29217862090052],
        [0.7661411964960244, 1.3382906255261704],
    ],
    det: 0.13129628076416644,
};

pub const LOPSIDED_REF: Reference = Reference {
    chart: [-0.25, 0.4, 2.0],
    y: [-0.34528837761373593, 0.7544688694069093],
    coframe: [
        [-0.5266175299561577, 1.0844252435513315, 0.0],
        [-0.9956518436228555, -0.45566758774674576, 0.0],
        [-0.20801703645049732, -0.09112513942656997, 0.9085250428852788],
    ],
    a: [-0.06045929890536977, 0.5121776343858286, 1.0145131423221203],
    i: 0.01887049674637176,
    j: -0.01346885978188265,
    k: -0.05190480091190368,
    g: [-0.07735167631718584, 0.1656425629231389],
    n: [
        [0.2536041123346764, -0.08898551398540283],
        [-0.09762459903245259, 0.39441850883138063],
    ],
    det: 1.7415355931756922,
};

pub const KLEIN_REF: Reference = Reference {
    chart: [0.5, 0.3, 0.7],
    y: [1.0205172364791968, 0.8595698103487199],
    coframe: [
        [0.5476878571006996, 0.5131347056493764, 0.0],
        [-0.5541456856292662, 0.6579049390715851, 0.0],
        [0.31765349434566975, -0.37713151660839483, 1.147730232189258],
    ],
    a: [0.09226099569447832, 0.49519617522457243, 0.8638684255813596],
    i: 0.0,
    j: 0.0,
    k: 1.0,
    g: [-0.5849921322395341, -0.4927320756476806],
    n: [
        [-0.9540210295401592, -0.2284740081669846],
        [-0.3207350038614628, -0.7656720182453963],
    ],
    det: 0.4156096328338257,
};

pub fn max_abs_diff<const N: usize>(a: [f64; N], b: [f64; N]) -> f64 {
    a.iter().zip(b.iter()).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Malformed inputs and the byte offset the error must point at.
pub const SYNTAX_CORPUS: [(&str, usize); 10] = [
    ("", 0),
    ("1+", 2),
    ("(t+s", 4),
    ("t+*s", 2),
    ("sqrt t", 5),
    ("t s", 2),
    ("2*(s-1))", 7),
    ("t # s", 2),
    ("sin()", 4),
    ("t*ñ", 2),
];
