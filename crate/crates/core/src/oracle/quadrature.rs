//! Globally adaptive 15-point Gauss–Kronrod quadrature.
//!
//! Error estimation follows QUADPACK's QK15 heuristic. Every result carries the
//! achieved error estimate; [`integrate`] fails when it exceeds the request.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Requested accuracy. The integral is accepted once the summed error
/// estimate is below `max(abs_tol, rel_tol * |value|)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of bisections applied to any one piece of the range.
    pub max_depth: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_depth: 40,
        }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_depth: u32) -> Result<Self> {
        if !(abs_tol > 0.0 && abs_tol.is_finite()) {
            return Err(Error::invalid("abs_tol", "must be positive"));
        }
        if !(rel_tol > 0.0 && rel_tol.is_finite()) {
            return Err(Error::invalid("rel_tol", "must be positive"));
        }
        if max_depth == 0 {
            return Err(Error::invalid("max_depth", "must be at least 1"));
        }
        Ok(Self {
            abs_tol,
            rel_tol,
            max_depth,
        })
    }

    pub fn tolerance_for(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }

    pub(crate) fn with_abs_tol(self, abs_tol: f64) -> Self {
        Self { abs_tol, ..self }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
    pub intervals: usize,
    pub converged: bool,
}

#[derive(Clone, Copy, Debug)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Piece {}

impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn qk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (1.0f64).min((200.0 * err / res_asc).powf(1.5));
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

/// Adaptive integration over consecutive segments `points[0]..points[1]..`.
/// Never fails; inspect `converged`.
pub fn adaptive_points<F: FnMut(f64) -> f64>(mut f: F, points: &[f64], spec: &QuadratureSpec) -> QuadResult {
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in points.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        let (value, error) = qk15(&mut f, w[0], w[1]);
        evaluations += 15;
        heap.push(Piece {
            a: w[0],
            b: w[1],
            value,
            error,
            depth: 0,
        });
    }
    let total = |heap: &BinaryHeap<Piece>| heap.iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
    loop {
        let (value, error) = total(&heap);
        if error <= spec.tolerance_for(value) {
            return QuadResult {
                value,
                abs_error: error,
                evaluations,
                intervals: heap.len(),
                converged: true,
            };
        }
        let worst = match heap.peek() {
            Some(p) if p.depth < spec.max_depth => heap.pop().expect("peeked"),
            _ => {
                return QuadResult {
                    value,
                    abs_error: error,
                    evaluations,
                    intervals: heap.len(),
                    converged: false,
                }
            }
        };
        let mid = 0.5 * (worst.a + worst.b);
        for (a, b) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = qk15(&mut f, a, b);
            evaluations += 15;
            heap.push(Piece {
                a,
                b,
                value,
                error,
                depth: worst.depth + 1,
            });
        }
    }
}

pub fn adaptive<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> QuadResult {
    adaptive_points(f, &[a, b], spec)
}

/// Integrate `f` over `[a, b]`, failing loudly when the requested accuracy is not reached.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<QuadResult> {
    integrate_points(f, &[a, b], spec)
}

pub fn integrate_points<F: FnMut(f64) -> f64>(f: F, points: &[f64], spec: &QuadratureSpec) -> Result<QuadResult> {
    let r = adaptive_points(f, points, spec);
    if r.converged && r.value.is_finite() {
        Ok(r)
    } else {
        Err(Error::Quadrature {
            achieved: r.abs_error,
            requested: spec.tolerance_for(r.value),
        })
    }
}
