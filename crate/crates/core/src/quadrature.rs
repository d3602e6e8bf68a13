//! Adaptive Gauss-Kronrod quadrature in one dimension, and a nested
//! spherical product rule for three-dimensional integrals with a radial
//! weight and a few point singularities.

use std::cell::Cell;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
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

#[allow(clippy::excessive_precision)]
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

// Gauss weights at XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// 15-point Kronrod rule on `[lo, hi]`, QUADPACK error heuristic.
///
/// The integrand returns `(value, carried_error)`; the carried part (error
/// of an inner integration) is integrated with the Kronrod weights, which
/// are all positive, and added to the local error.
fn gk15<F: FnMut(f64) -> (f64, f64)>(f: &mut F, lo: f64, hi: f64) -> (f64, f64) {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let (fc, ec) = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut carried = ec * WGK[7];
    let mut fv = [0.0; 15];
    fv[7] = fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let (f1, e1) = f(center - dx);
        let (f2, e2) = f(center + dx);
        fv[j] = f1;
        fv[14 - j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        carried += WGK[j] * (e1 + e2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv[j] - mean).abs() + (fv[14 - j] - mean).abs());
    }
    let kronrod = kronrod * half;
    let asc = asc * half.abs();
    let mut err = (kronrod - gauss * half).abs();
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    (kronrod, err + carried * half.abs())
}

#[derive(Clone, Copy, Debug)]
struct Piece {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive bisection driven by the largest local error.
#[derive(Clone, Copy, Debug)]
pub struct AdaptiveRule {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for AdaptiveRule {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-10,
            max_intervals: 500,
        }
    }
}

impl AdaptiveRule {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    /// Integrates over `[lo, hi]` with extra breakpoints (need not be sorted;
    /// points outside the interval are ignored). On budget exhaustion the
    /// best estimate is returned as `Err`.
    pub fn integrate<F: FnMut(f64) -> f64>(
        &self,
        mut f: F,
        lo: f64,
        hi: f64,
        breakpoints: &[f64],
    ) -> std::result::Result<Estimate, Estimate> {
        self.integrate_carrying(|x| (f(x), 0.0), lo, hi, breakpoints)
    }

    /// Like [`integrate`](Self::integrate) for integrands that carry their
    /// own error estimate (typically an inner integral).
    pub fn integrate_carrying<F: FnMut(f64) -> (f64, f64)>(
        &self,
        mut f: F,
        lo: f64,
        hi: f64,
        breakpoints: &[f64],
    ) -> std::result::Result<Estimate, Estimate> {
        let mut cuts: Vec<f64> = breakpoints
            .iter()
            .copied()
            .filter(|&b| b > lo && b < hi && b.is_finite())
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut edges = Vec::with_capacity(cuts.len() + 2);
        edges.push(lo);
        edges.extend(cuts);
        edges.push(hi);

        let mut heap = BinaryHeap::new();
        let (mut total, mut total_err) = (0.0, 0.0);
        for w in edges.windows(2) {
            let (value, error) = gk15(&mut f, w[0], w[1]);
            total += value;
            total_err += error;
            heap.push(Piece {
                lo: w[0],
                hi: w[1],
                value,
                error,
            });
        }
        let mut evaluations = 15 * heap.len();
        loop {
            let tol = self.abs_tol.max(self.rel_tol * total.abs());
            if total_err <= tol {
                break;
            }
            if heap.len() >= self.max_intervals {
                return Err(Estimate {
                    value: total,
                    error: total_err,
                    evaluations,
                });
            }
            let worst = heap.pop().expect("nonempty");
            let mid = 0.5 * (worst.lo + worst.hi);
            if mid <= worst.lo || mid >= worst.hi {
                // interval at floating-point resolution; nothing more to gain
                heap.push(worst);
                return Err(Estimate {
                    value: total,
                    error: total_err,
                    evaluations,
                });
            }
            let (v1, e1) = gk15(&mut f, worst.lo, mid);
            let (v2, e2) = gk15(&mut f, mid, worst.hi);
            evaluations += 30;
            total += v1 + v2 - worst.value;
            total_err += e1 + e2 - worst.error;
            heap.push(Piece {
                lo: worst.lo,
                hi: mid,
                value: v1,
                error: e1,
            });
            heap.push(Piece {
                lo: mid,
                hi: worst.hi,
                value: v2,
                error: e2,
            });
        }
        // re-sum to shed accumulated cancellation
        let (value, error) = heap
            .iter()
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
        Ok(Estimate {
            value,
            error,
            evaluations,
        })
    }
}

pub type Vec3 = [f64; 3];

pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn scale(s: f64, a: Vec3) -> Vec3 {
    [s * a[0], s * a[1], s * a[2]]
}

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Right-handed orthonormal frame whose third axis is `axis` and whose first
/// axis points towards `hint` (if `hint` is not parallel to `axis`).
fn frame_towards(axis: Vec3, hint: Option<Vec3>) -> [Vec3; 3] {
    let ez = scale(1.0 / norm(axis), axis);
    let pick = |v: Vec3| {
        let perp = sub(v, scale(dot(v, ez), ez));
        let n = norm(perp);
        (n > 1e-9 * norm(v).max(1e-300)).then(|| scale(1.0 / n, perp))
    };
    let ex = hint
        .and_then(pick)
        .or_else(|| pick([1.0, 0.0, 0.0]))
        .or_else(|| pick([0.0, 1.0, 0.0]))
        .expect("some coordinate axis is not parallel");
    let ey = cross(ez, ex);
    [ex, ey, ez]
}

/// Nested adaptive product rule for
/// `int_{|r - c| < r_max} w(|r - c|) f(r) d^3 r`.
///
/// The polar axis points at the first singular point and the azimuth origin
/// at the second, so the two worst spots of the integrand land on edges of
/// the nested intervals. Radial breakpoints sit at the distance of every
/// singular point from the center. The polar variable is `t = sin(theta/2)`,
/// which removes the inverse-square-root behaviour of `1/|r - p|` at the
/// pole.
#[derive(Clone, Copy, Debug)]
pub struct SphericalRule {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for SphericalRule {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            abs_tol: 1e-12,
            max_intervals: 400,
        }
    }
}

pub struct SphericalProblem<'a> {
    pub center: Vec3,
    pub r_max: f64,
    pub singular_points: &'a [Vec3],
    /// Caller promises `f` is invariant under rotations about the axis
    /// through the center and the first singular point. The azimuthal
    /// integral is then replaced by `2 pi`.
    pub axisymmetric: bool,
}

impl SphericalRule {
    pub fn with_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    pub fn integrate<W, F>(&self, problem: &SphericalProblem, weight: W, f: F) -> Result<Estimate>
    where
        W: Fn(f64) -> f64,
        F: Fn(Vec3) -> f64,
    {
        let geometry = Geometry::new(problem);
        // Inner integrals get absolute tolerances sized against the total,
        // which a coarse first pass supplies. Relative inner tolerances alone
        // waste effort on shells that barely contribute.
        let mass = AdaptiveRule::new(1e-300, 1e-8)
            .integrate(|r| (weight(r) * r * r).abs(), 0.0, problem.r_max, &geometry.radial_breaks)
            .map_or_else(|e| e.value, |e| e.value);
        let coarse = self.pass(
            &geometry,
            problem,
            &weight,
            &f,
            Tolerances {
                rel: 1e-2,
                abs: self.abs_tol,
                abs_t: 0.0,
                abs_phi: 0.0,
                max_intervals: 50,
            },
        );
        let target = self.abs_tol.max(0.5 * self.rel_tol * coarse.0.value.abs());
        let (out, ok) = self.pass(
            &geometry,
            problem,
            &weight,
            &f,
            Tolerances {
                rel: self.rel_tol,
                abs: self.abs_tol,
                abs_t: 0.5 * target / mass.max(1e-300),
                abs_phi: 0.1 * target / mass.max(1e-300),
                max_intervals: self.max_intervals,
            },
        );
        let mut out = out;
        out.evaluations += coarse.0.evaluations;
        if ok {
            Ok(out)
        } else {
            Err(Error::Quadrature {
                value: out.value,
                error: out.error,
            })
        }
    }

    fn pass<W, F>(
        &self,
        g: &Geometry,
        problem: &SphericalProblem,
        weight: &W,
        f: &F,
        tol: Tolerances,
    ) -> (Estimate, bool)
    where
        W: Fn(f64) -> f64,
        F: Fn(Vec3) -> f64,
    {
        let c = problem.center;
        let [ex, ey, ez] = g.frame;
        let t_rule = AdaptiveRule {
            abs_tol: tol.abs_t,
            rel_tol: tol.rel * 0.1,
            max_intervals: tol.max_intervals,
        };
        let phi_rule = AdaptiveRule {
            abs_tol: tol.abs_phi,
            rel_tol: tol.rel * 0.1,
            max_intervals: tol.max_intervals,
        };
        let evals = Cell::new(0usize);
        // budget exhaustion inside is reflected in the carried error
        let settle = |r: std::result::Result<Estimate, Estimate>| -> Estimate {
            let (Ok(e) | Err(e)) = r;
            evals.set(evals.get() + e.evaluations);
            e
        };

        let shell = |r: f64| -> (f64, f64) {
            let wr = weight(r);
            if wr == 0.0 || r == 0.0 {
                return (0.0, 0.0);
            }
            let polar = |t: f64| -> (f64, f64) {
                // cos(theta) = 1 - 2 t^2, d(cos theta) = -4 t dt
                let cos_t = 1.0 - 2.0 * t * t;
                let sin_t = 2.0 * t * (1.0 - t * t).max(0.0).sqrt();
                let jac = 4.0 * t;
                let point = |phi: f64| {
                    let (s, co) = phi.sin_cos();
                    let dir = add(
                        add(scale(sin_t * co, ex), scale(sin_t * s, ey)),
                        scale(cos_t, ez),
                    );
                    add(c, scale(r, dir))
                };
                if problem.axisymmetric {
                    evals.set(evals.get() + 1);
                    (jac * 2.0 * std::f64::consts::PI * f(point(0.0)), 0.0)
                } else {
                    let e = settle(phi_rule.integrate(
                        |phi| f(point(phi)),
                        -std::f64::consts::PI,
                        std::f64::consts::PI,
                        &g.phi_breaks,
                    ));
                    (jac * e.value, jac * e.error)
                }
            };
            let w = wr * r * r;
            let e = settle(t_rule.integrate_carrying(polar, 0.0, 1.0, &g.t_breaks));
            (w * e.value, w.abs() * e.error)
        };

        let outer = AdaptiveRule {
            abs_tol: tol.abs,
            rel_tol: tol.rel,
            max_intervals: tol.max_intervals,
        };
        let (est, ok) = match outer.integrate_carrying(shell, 0.0, problem.r_max, &g.radial_breaks) {
            Ok(e) => (e, true),
            Err(e) => (e, false),
        };
        (
            Estimate {
                value: est.value,
                error: est.error,
                evaluations: evals.get(),
            },
            ok,
        )
    }
}

#[derive(Clone, Copy)]
struct Tolerances {
    rel: f64,
    abs: f64,
    /// Per unit of `int w r^2 dr`, on the polar and azimuthal integrals.
    abs_t: f64,
    abs_phi: f64,
    max_intervals: usize,
}

struct Geometry {
    frame: [Vec3; 3],
    radial_breaks: Vec<f64>,
    t_breaks: Vec<f64>,
    phi_breaks: Vec<f64>,
}

impl Geometry {
    fn new(problem: &SphericalProblem) -> Self {
        let c = problem.center;
        let offsets: Vec<Vec3> = problem
            .singular_points
            .iter()
            .map(|&p| sub(p, c))
            .filter(|d| norm(*d) > 1e-14)
            .collect();
        let axis = offsets.first().copied().unwrap_or([0.0, 0.0, 1.0]);
        let [ex, ey, ez] = frame_towards(axis, offsets.get(1).copied());
        let radial_breaks = offsets.iter().map(|&d| norm(d)).collect();
        // remaining points become breakpoints in t and phi
        let angular: Vec<(f64, f64)> = offsets
            .iter()
            .skip(1)
            .map(|&d| {
                let n = norm(d);
                let cos_t = (dot(d, ez) / n).clamp(-1.0, 1.0);
                let t = ((1.0 - cos_t) / 2.0).sqrt();
                let phi = dot(d, ey).atan2(dot(d, ex));
                (t, phi)
            })
            .collect();
        let t_breaks = angular.iter().map(|&(t, _)| t).collect();
        let mut phi_breaks = vec![0.0];
        phi_breaks.extend(angular.iter().map(|&(_, p)| p));
        Self {
            frame: [ex, ey, ez],
            radial_breaks,
            t_breaks,
            phi_breaks,
        }
    }
}
