//! Inter-pair interaction in Jacobi coordinates and effective potentials.
//!
//! With `x = r2 - r1`, `y = r4 - r3` and `R` joining the pair centers of
//! mass, the four inter-pair distances are
//!
//! ```text
//! |r1 - r3| = |R + a x - b y|          V13 = +1/|.|
//! |r1 - r4| = |R - z1|                 V14 = -1/|.|,  z1 = -a x - (1-b) y
//! |r2 - r3| = |R - z2|                 V23 = -1/|.|,  z2 = (1-a) x + b y
//! |r2 - r4| = |R - (1-a) x + (1-b) y|  V24 = +1/|.|
//! ```
//!
//! `V_eff(y, R)` averages the attractive part `W-` of `W = V13 + V14 + V23 +
//! V24` over the tight-pair density `|phi0(x)|^2` (canonical frame,
//! `mu_x = 2`). Splitting `W = W1 + W2` with `W1 = V14 + V24` (particle 4
//! against the pair) and `W2 = V13 + V23` (particle 3 against the pair)
//! gives `W- <= (W1)- + (W2)-`; each split average depends only on
//! `|R + (1-b) y|` or `|R - b y|` and is bounded by `3/16` over that
//! distance squared.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::chain::{chain_coefficient, phi0};
use crate::error::{Error, Result};
use crate::quadrature::{add, norm, scale, sub, Estimate, SphericalProblem, SphericalRule, Vec3};
use crate::system::JacobiFrame;

/// `max(0, -v)`, i.e. `(|v| - v) / 2`.
pub fn negative_part(v: f64) -> f64 {
    if v < 0.0 {
        -v
    } else {
        0.0
    }
}

/// `max(0, v)`, i.e. `(|v| + v) / 2`.
pub fn positive_part(v: f64) -> f64 {
    if v > 0.0 {
        v
    } else {
        0.0
    }
}

/// `|phi0(x)|^2 = (8/pi) e^{-4x}`, normalized to one.
pub fn ground_pair_density(x: f64) -> f64 {
    phi0(x).powi(2)
}

/// Beyond this radius the pair density is below `e^{-64}`.
const DENSITY_CUTOFF: f64 = 16.0;

/// Which part of the interaction enters the effective potential.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Total,
    W1,
    W2,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteractionDecomposition {
    pub a: f64,
    pub b: f64,
}

impl InteractionDecomposition {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a < 1.0 && b > 0.0 && b < 1.0) {
            return Err(Error::domain(format!(
                "mass parameters must lie in (0, 1), got a = {a}, b = {b}"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn from_frame(frame: &JacobiFrame) -> Self {
        Self {
            a: frame.a,
            b: frame.b,
        }
    }

    pub fn z1(&self, x: Vec3, y: Vec3) -> Vec3 {
        add(scale(-self.a, x), scale(-(1.0 - self.b), y))
    }

    pub fn z2(&self, x: Vec3, y: Vec3) -> Vec3 {
        add(scale(1.0 - self.a, x), scale(self.b, y))
    }

    pub fn v13(&self, x: Vec3, y: Vec3, r: Vec3) -> f64 {
        1.0 / norm(add(r, sub(scale(self.a, x), scale(self.b, y))))
    }

    pub fn v14(&self, x: Vec3, y: Vec3, r: Vec3) -> f64 {
        -1.0 / norm(sub(r, self.z1(x, y)))
    }

    pub fn v23(&self, x: Vec3, y: Vec3, r: Vec3) -> f64 {
        -1.0 / norm(sub(r, self.z2(x, y)))
    }

    pub fn v24(&self, x: Vec3, y: Vec3, r: Vec3) -> f64 {
        1.0 / norm(add(sub(r, scale(1.0 - self.a, x)), scale(1.0 - self.b, y)))
    }

    pub fn w(&self, x: Vec3, y: Vec3, r: Vec3) -> f64 {
        self.v13(x, y, r) + self.v14(x, y, r) + self.v23(x, y, r) + self.v24(x, y, r)
    }

    pub fn w1(&self, x: Vec3, y: Vec3, r: Vec3) -> f64 {
        self.v14(x, y, r) + self.v24(x, y, r)
    }

    pub fn w2(&self, x: Vec3, y: Vec3, r: Vec3) -> f64 {
        self.v13(x, y, r) + self.v23(x, y, r)
    }

    pub fn w_plus(&self, x: Vec3, y: Vec3, r: Vec3) -> f64 {
        positive_part(self.w(x, y, r))
    }

    pub fn w_minus(&self, x: Vec3, y: Vec3, r: Vec3) -> f64 {
        negative_part(self.w(x, y, r))
    }

    pub fn split_minus(&self, which: Split, x: Vec3, y: Vec3, r: Vec3) -> f64 {
        negative_part(match which {
            Split::Total => self.w(x, y, r),
            Split::W1 => self.w1(x, y, r),
            Split::W2 => self.w2(x, y, r),
        })
    }

    /// Points in `x` where `V14` and `V23` diverge (where `W-` can blow up).
    pub fn attractive_points_in_x(&self, y: Vec3, r: Vec3) -> [Vec3; 2] {
        let p14 = scale(-1.0 / self.a, add(r, scale(1.0 - self.b, y)));
        let p23 = scale(1.0 / (1.0 - self.a), sub(r, scale(self.b, y)));
        [p14, p23]
    }

    /// `|R + (1-b) y|` and `|R - b y|`, the distances the split averages
    /// depend on.
    pub fn split_distances(&self, y: Vec3, r: Vec3) -> (f64, f64) {
        (
            norm(add(r, scale(1.0 - self.b, y))),
            norm(sub(r, scale(self.b, y))),
        )
    }

    /// `V_eff` over the tight-pair density.
    pub fn veff(&self, y: Vec3, r: Vec3, which: Split, rule: &SphericalRule) -> Result<Estimate> {
        let [p14, p23] = self.attractive_points_in_x(y, r);
        let (points, axisymmetric): (Vec<Vec3>, bool) = match which {
            Split::Total => (vec![p14, p23], false),
            // W1 depends on x only through u = R + (1-b) y, W2 through
            // v = R - b y: symmetric about those axes
            Split::W1 => (vec![p14], true),
            Split::W2 => (vec![p23], true),
        };
        let problem = SphericalProblem {
            center: [0.0; 3],
            r_max: DENSITY_CUTOFF,
            singular_points: &points,
            axisymmetric,
        };
        rule.integrate(&problem, ground_pair_density, |x| {
            self.split_minus(which, x, y, r)
        })
    }

    /// `3/16` envelopes for the two split averages.
    pub fn veff_envelopes(&self, y: Vec3, r: Vec3) -> Result<(f64, f64)> {
        let (d1, d2) = self.split_distances(y, r);
        if d1 == 0.0 || d2 == 0.0 {
            return Err(Error::domain(
                "3/16 envelope is singular at R + (1-b) y = 0 or R - b y = 0",
            ));
        }
        Ok((3.0 / (16.0 * d1 * d1), 3.0 / (16.0 * d2 * d2)))
    }

    pub fn veff_bound_check(&self, y: Vec3, r: Vec3, rule: &SphericalRule) -> Result<BoundCheck> {
        let (envelope1, envelope2) = self.veff_envelopes(y, r)?;
        let v1 = self.veff(y, r, Split::W1, rule)?;
        let v2 = self.veff(y, r, Split::W2, rule)?;
        Ok(BoundCheck {
            a: self.a,
            b: self.b,
            y,
            r,
            veff1: v1.value,
            veff2: v2.value,
            error1: v1.error,
            error2: v2.error,
            envelope1,
            envelope2,
            residual1: envelope1 - v1.value,
            residual2: envelope2 - v2.value,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub a: f64,
    pub b: f64,
    pub y: Vec3,
    pub r: Vec3,
    pub veff1: f64,
    pub veff2: f64,
    pub error1: f64,
    pub error2: f64,
    pub envelope1: f64,
    pub envelope2: f64,
    /// `envelope - veff`, must be nonnegative.
    pub residual1: f64,
    pub residual2: f64,
}

impl BoundCheck {
    pub fn min_residual(&self) -> f64 {
        self.residual1.min(self.residual2)
    }
}

/// Reconstructs `r1..r4` (center of mass at the origin) from `(x, y, R)` and
/// returns the six distances in the order 12, 13, 14, 23, 24, 34.
pub fn pair_distance_oracle(masses: [f64; 4], x: Vec3, y: Vec3, r: Vec3) -> [f64; 6] {
    let [m1, m2, m3, m4] = masses;
    let (big1, big2) = (m1 + m2, m3 + m4);
    // pair centers: c34 - c12 = R, big1 c12 + big2 c34 = 0
    let c12 = scale(-big2 / (big1 + big2), r);
    let c34 = scale(big1 / (big1 + big2), r);
    let p1 = sub(c12, scale(m2 / big1, x));
    let p2 = add(c12, scale(m1 / big1, x));
    let p3 = sub(c34, scale(m4 / big2, y));
    let p4 = add(c34, scale(m3 / big2, y));
    let d = |p: Vec3, q: Vec3| norm(sub(p, q));
    [d(p1, p2), d(p1, p3), d(p1, p4), d(p2, p3), d(p2, p4), d(p3, p4)]
}

fn unit_vector(rng: &mut ChaCha8Rng) -> Vec3 {
    let c: f64 = rng.random_range(-1.0..1.0);
    let phi: f64 = rng.random_range(0.0..2.0 * PI);
    let s = (1.0 - c * c).sqrt();
    [s * phi.cos(), s * phi.sin(), c]
}

/// One `(y, R)` point of geometry stratum `stratum % 4`.
fn stratum_point(rng: &mut ChaCha8Rng, b: f64, stratum: usize) -> (Vec3, Vec3) {
    let ylen = 10f64.powf(rng.random_range(-2.0..1.0));
    let y = scale(ylen, unit_vector(rng));
    let r = match stratum % 4 {
        0 => scale(10f64.powf(rng.random_range(-1.5..1.3)), unit_vector(rng)),
        1 => {
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            scale(sign * 10f64.powf(rng.random_range(-1.5..1.3)) / ylen, y)
        }
        2 => {
            // close to R = -(1-b) y or R = b y
            let target = if rng.random::<bool>() {
                scale(-(1.0 - b), y)
            } else {
                scale(b, y)
            };
            add(target, scale(10f64.powf(rng.random_range(-2.0..-0.5)), unit_vector(rng)))
        }
        _ => scale(10f64.powf(rng.random_range(1.0..1.7)), unit_vector(rng)),
    };
    (y, r)
}

/// Sample set for the envelope checks. Alternates between mass-parameter
/// regimes and geometry strata: generic isotropic points, `R` parallel or
/// antiparallel to `y`, points close to one envelope singularity, and far
/// points.
pub fn stratified_samples(count: usize, seed: u64) -> Vec<(InteractionDecomposition, Vec3, Vec3)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let masses = [(0.5, 0.5), (0.999, 0.001), (0.001, 0.999), (0.9, 0.2)];
    (0..count)
        .map(|i| {
            let (a, b) = match i % 5 {
                4 => (rng.random_range(0.01..0.99), rng.random_range(0.01..0.99)),
                k => masses[k],
            };
            let (y, r) = stratum_point(&mut rng, b, i / 5);
            (InteractionDecomposition { a, b }, y, r)
        })
        .collect()
}

/// Same geometry strata for one fixed decomposition, cycling through them.
pub fn stratified_points(dec: &InteractionDecomposition, count: usize, seed: u64) -> Vec<(Vec3, Vec3)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|i| stratum_point(&mut rng, dec.b, i)).collect()
}

/// Trial for the inter-pair coordinate: `f(R) = exp(-alpha |R - c|^2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianTrial {
    pub center: Vec3,
    pub alpha: f64,
}

impl GaussianTrial {
    /// `<f|p^2|f> / <f|f>`
    pub fn kinetic(&self) -> f64 {
        3.0 * self.alpha
    }

    /// `|f|^2 / <f|f>` as a function of `|R - c|`.
    pub fn density(&self, dist: f64) -> f64 {
        (2.0 * self.alpha / PI).powf(1.5) * (-2.0 * self.alpha * dist * dist).exp()
    }

    pub fn cutoff(&self) -> f64 {
        (40.0 / self.alpha).sqrt()
    }
}

/// How `V_eff` enters the quotient of [`stability_functional_check`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum StabilityPotential {
    /// Full `V_eff`, as a six-dimensional Monte Carlo average with `R`
    /// drawn from the trial density and `x` from the pair density.
    MonteCarlo { samples: usize, seed: u64 },
    /// `V_eff^(1) + V_eff^(2)`, which dominates `V_eff`.
    Split { polar: usize, azimuthal: usize },
    /// The `3/16` envelopes of the split averages.
    Envelope,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityQuotient {
    pub mu_r: f64,
    pub coefficient: f64,
    pub kinetic: f64,
    pub potential: f64,
    /// Standard error of `potential` (zero for quadrature modes).
    pub potential_error: f64,
    /// `kinetic / (2 mu_R) - C potential`
    pub quotient: f64,
}

/// Rayleigh quotient of `p_R^2 / (2 mu_R) - C(mu_R) V_eff(y, .)` on a
/// normalized Gaussian trial, with `mu_R` canonical.
pub fn stability_functional_check(
    dec: &InteractionDecomposition,
    mu_r: f64,
    y: Vec3,
    trial: &GaussianTrial,
    potential: StabilityPotential,
    rule: &SphericalRule,
) -> Result<StabilityQuotient> {
    let coefficient = chain_coefficient(mu_r)?;
    let kinetic = trial.kinetic();
    let u0 = scale(-(1.0 - dec.b), y);
    let v0 = scale(dec.b, y);
    let mut potential_error = 0.0;
    let avg = match potential {
        StabilityPotential::Envelope => {
            let problem = SphericalProblem {
                center: trial.center,
                r_max: trial.cutoff(),
                singular_points: &[u0, v0],
                axisymmetric: false,
            };
            rule.integrate(
                &problem,
                |d| trial.density(d),
                |r| {
                    let (d1, d2) = (norm(sub(r, u0)), norm(sub(r, v0)));
                    3.0 / 16.0 * (1.0 / (d1 * d1) + 1.0 / (d2 * d2))
                },
            )?
            .value
        }
        StabilityPotential::MonteCarlo { samples, seed } => {
            let (mean, stderr) = monte_carlo_average(dec, y, trial, samples, seed);
            potential_error = stderr;
            mean
        }
        StabilityPotential::Split { polar, azimuthal } => fixed_product_average(
            trial,
            polar,
            azimuthal,
            |r| {
                let v1 = dec.veff(y, r, Split::W1, rule)?.value;
                let v2 = dec.veff(y, r, Split::W2, rule)?.value;
                Ok(v1 + v2)
            },
        )?,
    };
    Ok(StabilityQuotient {
        mu_r,
        coefficient,
        kinetic,
        potential: avg,
        potential_error,
        quotient: kinetic / (2.0 * mu_r) - coefficient * avg,
    })
}

fn monte_carlo_average(
    dec: &InteractionDecomposition,
    y: Vec3,
    trial: &GaussianTrial,
    samples: usize,
    seed: u64,
) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // |phi0|^2 radial density r^2 e^{-4r}: Gamma(3, 1/4)
    let pair_radius = Gamma::new(3.0, 0.25).expect("valid shape");
    let trial_sigma = (1.0 / (4.0 * trial.alpha)).sqrt();
    let (mut sum, mut sum2) = (0.0, 0.0);
    for _ in 0..samples {
        let rad: f64 = pair_radius.sample(&mut rng);
        let c: f64 = rng.random_range(-1.0..1.0);
        let phi: f64 = rng.random_range(0.0..2.0 * PI);
        let s = (1.0 - c * c).sqrt();
        let x = [rad * s * phi.cos(), rad * s * phi.sin(), rad * c];
        let g: [f64; 3] = [0; 3].map(|_| rng.sample::<f64, _>(StandardNormal) * trial_sigma);
        let v = dec.w_minus(x, y, add(trial.center, g));
        sum += v;
        sum2 += v * v;
    }
    let n = samples.max(1) as f64;
    let mean = sum / n;
    (mean, ((sum2 / n - mean * mean).max(0.0) / n).sqrt())
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` (Newton on the Legendre
/// recurrence).
pub(crate) fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Average of `g` over the trial density with a fixed spherical product
/// rule: Gauss-Legendre in the radius on two panels, Gauss-Legendre in
/// `cos(theta)`, trapezoid in `phi`.
fn fixed_product_average(
    trial: &GaussianTrial,
    polar: usize,
    azimuthal: usize,
    mut g: impl FnMut(Vec3) -> Result<f64>,
) -> Result<f64> {
    let radial = gauss_legendre(16);
    let cos_nodes = gauss_legendre(polar.max(1));
    let width = (1.0 / (2.0 * trial.alpha)).sqrt();
    let panels = [(0.0, 2.0 * width), (2.0 * width, trial.cutoff())];
    let mut total = 0.0;
    for (lo, hi) in panels {
        let half = 0.5 * (hi - lo);
        for &(xr, wr) in &radial {
            let r = lo + half * (xr + 1.0);
            let wr = wr * half * r * r * trial.density(r);
            for &(c, wc) in &cos_nodes {
                let s = (1.0 - c * c).sqrt();
                for k in 0..azimuthal.max(1) {
                    let phi = 2.0 * PI * (k as f64 + 0.5) / azimuthal.max(1) as f64;
                    let dir = [s * phi.cos(), s * phi.sin(), c];
                    let wphi = 2.0 * PI / azimuthal.max(1) as f64;
                    total += wr * wc * wphi * g(add(trial.center, scale(r, dir)))?;
                }
            }
        }
    }
    Ok(total)
}
