//! Scalar checks behind the criterion.
//!
//! The argument reduces the four-body problem to two numbers,
//! `alpha^2 = <eta|W-|eta>` and `beta^2 = <xi|W-|xi>`, plus the hydrogen
//! spectrum of the tight pair, a Hardy inequality and the projector onto the
//! pair ground state. Everything here works with those scalars directly; no
//! wavefunctions are built.
//!
//! All `mu_r` arguments are in the canonical `mu_x = 2` frame.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::criterion::CriticalConstant;
use crate::error::{Error, Result};
use crate::quadrature::{norm, sub, SphericalProblem, SphericalRule, Vec3};
use crate::report::{CheckKind, CheckRecord};

/// Upper end of the window where the chain coefficient is defined.
pub const MU_R_LIMIT: f64 = 3.0 / 8.0;

fn check_mu(mu_r: f64) -> Result<()> {
    if !(mu_r.is_finite() && mu_r > 0.0) {
        return Err(Error::domain(format!("mu_R must be positive, got {mu_r}")));
    }
    Ok(())
}

fn check_window(mu_r: f64) -> Result<f64> {
    check_mu(mu_r)?;
    if mu_r >= MU_R_LIMIT {
        return Err(Error::domain(format!(
            "chain coefficient undefined for mu_R = {mu_r} >= 3/8"
        )));
    }
    Ok((3.0 / (8.0 * mu_r)).sqrt())
}

/// `C(mu_R) = 1 + 1 / (sqrt(3 / (8 mu_R)) - 1)` on `0 < mu_R < 3/8`.
pub fn chain_coefficient(mu_r: f64) -> Result<f64> {
    let s = check_window(mu_r)?;
    Ok(1.0 + 1.0 / (s - 1.0))
}

/// Maximum over `lambda >= -1` of `-2 (lambda+1)^2 mu_R + lambda beta^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaEnvelope {
    /// Maximizer `beta^2 / (4 mu_R) - 1`, never below `-1`.
    pub lambda_star: f64,
    /// Objective evaluated at the maximizer.
    pub maximum: f64,
    /// `beta^4 / (8 mu_R) - beta^2`
    pub closed_form: f64,
}

pub fn lambda_objective(lambda: f64, beta: f64, mu_r: f64) -> f64 {
    -2.0 * (lambda + 1.0).powi(2) * mu_r + lambda * beta * beta
}

pub fn lambda_envelope(beta: f64, mu_r: f64) -> Result<LambdaEnvelope> {
    check_mu(mu_r)?;
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::domain(format!("beta must be nonnegative, got {beta}")));
    }
    let b2 = beta * beta;
    // concave in lambda, stationary point always inside [-1, inf)
    let lambda_star = b2 / (4.0 * mu_r) - 1.0;
    Ok(LambdaEnvelope {
        lambda_star,
        maximum: lambda_objective(lambda_star, beta, mu_r),
        closed_form: b2 * b2 / (8.0 * mu_r) - b2,
    })
}

/// `beta^4/(8 mu) - beta^2 - 2 alpha beta + 3/4 + alpha^2 / (s - 1)` with
/// `s = sqrt(3 / (8 mu))`. Nonnegative for all `alpha, beta >= 0`.
pub fn quadratic_lhs(mu_r: f64, alpha: f64, beta: f64) -> Result<f64> {
    let s = check_window(mu_r)?;
    let b2 = beta * beta;
    Ok(b2 * b2 / (8.0 * mu_r) - b2 - 2.0 * alpha * beta + 0.75 + alpha * alpha / (s - 1.0))
}

/// Joint minimizer of [`quadratic_lhs`]:
/// `beta*^2 = 4 mu s`, `alpha* = beta* (s - 1)`; the minimum is exactly 0.
pub fn quadratic_minimizer(mu_r: f64) -> Result<(f64, f64)> {
    let s = check_window(mu_r)?;
    let beta = (4.0 * mu_r * s).sqrt();
    Ok((beta * (s - 1.0), beta))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticReport {
    pub mu_r: f64,
    pub grid_min: f64,
    pub grid_argmin: (f64, f64),
    pub points: usize,
    pub alpha_star: f64,
    pub beta_star: f64,
    pub analytic_min: f64,
}

pub fn verify_quadratic_inequality(
    mu_r: f64,
    alpha_grid: &[f64],
    beta_grid: &[f64],
) -> Result<QuadraticReport> {
    let (alpha_star, beta_star) = quadratic_minimizer(mu_r)?;
    let mut grid_min = f64::INFINITY;
    let mut grid_argmin = (f64::NAN, f64::NAN);
    for &a in alpha_grid {
        for &b in beta_grid {
            let v = quadratic_lhs(mu_r, a, b)?;
            if v < grid_min {
                grid_min = v;
                grid_argmin = (a, b);
            }
        }
    }
    Ok(QuadraticReport {
        mu_r,
        grid_min,
        grid_argmin,
        points: alpha_grid.len() * beta_grid.len(),
        alpha_star,
        beta_star,
        analytic_min: quadratic_lhs(mu_r, alpha_star, beta_star)?,
    })
}

/// Scalar state of the chain at one `(alpha, beta, lambda, A)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainEvaluation {
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
    pub coupling: f64,
    pub mu_r: f64,
    pub coefficient: f64,
    /// Named residuals; each must be `>= -tolerance`.
    pub residuals: BTreeMap<String, f64>,
}

impl ChainEvaluation {
    pub fn new(mu_r: f64, alpha: f64, beta: f64, lambda: f64, coupling: f64) -> Result<Self> {
        if lambda < -1.0 || coupling < 0.0 || alpha < 0.0 {
            return Err(Error::domain(
                "need lambda >= -1, A >= 0, alpha >= 0".to_string(),
            ));
        }
        let coefficient = chain_coefficient(mu_r)?;
        let env = lambda_envelope(beta, mu_r)?;
        let mut residuals = BTreeMap::new();
        residuals.insert(
            "envelope_dominates".into(),
            env.maximum - lambda_objective(lambda, beta, mu_r),
        );
        residuals.insert("quadratic".into(), quadratic_lhs(mu_r, alpha, beta)?);
        residuals.insert("coefficient_above_one".into(), coefficient - 1.0);
        // the floor -2 A^2 mu_R at A = lambda + 1 is the envelope integrand
        let a = lambda + 1.0;
        residuals.insert(
            "floor_consistent".into(),
            lambda_objective(lambda, beta, mu_r) - (-2.0 * a * a * mu_r + lambda * beta * beta),
        );
        Ok(Self {
            alpha,
            beta,
            lambda,
            coupling,
            mu_r,
            coefficient,
            residuals,
        })
    }

    pub fn min_residual(&self) -> f64 {
        self.residuals.values().copied().fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HydrogenLevel {
    pub mu: f64,
    pub n: u32,
    pub energy: f64,
}

/// `E_n = -mu / (2 n^2)` for `n = 1..=n_max`.
pub fn hydrogen_levels(mu: f64, n_max: u32) -> Vec<HydrogenLevel> {
    (1..=n_max)
        .map(|n| HydrogenLevel {
            mu,
            n,
            energy: -mu / (2.0 * f64::from(n * n)),
        })
        .collect()
}

/// Number of eigenvalues of the symmetric tridiagonal matrix below `x`.
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..diag.len() {
        let e2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        q = diag[i] - x - if i == 0 { 0.0 } else { e2 / q };
        if q == 0.0 {
            q = f64::EPSILON * (diag[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `k`-th smallest eigenvalue (0-based) by bisection on Sturm counts.
fn tridiagonal_eigenvalue(diag: &[f64], off: &[f64], k: usize) -> f64 {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Lowest two s-wave levels of `p^2 / (2 mu) - 1/r` on a uniform grid in
/// `t = ln r` with spacing `h`.
///
/// With `u(r) = e^{t/2} w(t)` the radial equation becomes
/// `-(w'' - w/4) / (2 mu) - e^t w = E e^{2t} w`, a symmetric-definite
/// tridiagonal pencil after central differences.
fn log_grid_levels(mu: f64, h: f64) -> (f64, f64) {
    let bohr = 1.0 / mu;
    let (t0, t1) = ((1e-7 * bohr).ln(), (80.0 * bohr).ln());
    let n = ((t1 - t0) / h).round() as usize;
    let ts: Vec<f64> = (1..n).map(|i| t0 + i as f64 * h).collect();
    let kin = 1.0 / (2.0 * mu);
    let diag: Vec<f64> = ts
        .iter()
        .map(|&t| (kin * (2.0 / (h * h) + 0.25) - t.exp()) * (-2.0 * t).exp())
        .collect();
    let off: Vec<f64> = ts
        .windows(2)
        .map(|w| -kin / (h * h) * (-(w[0] + w[1])).exp())
        .collect();
    (
        tridiagonal_eigenvalue(&diag, &off, 0),
        tridiagonal_eigenvalue(&diag, &off, 1),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpectrum {
    pub e0: f64,
    pub e1: f64,
    /// Change of the extrapolated `e0` under the last grid halving.
    pub refinement_change: f64,
    pub step: f64,
}

/// Finite-difference oracle for the two lowest s-levels of
/// `p^2/(2 mu) - 1/r` (at `mu = 2` this is the tight-pair Hamiltonian
/// `p^2/4 - 1/x`). Uses Richardson extrapolation over successive halvings
/// and stops once a halving moves `e0` by less than `1e-7 |e0|`.
pub fn grid_spectral_check(mu: f64) -> Result<GridSpectrum> {
    check_mu(mu)?;
    let mut h = 0.04;
    let mut coarse = log_grid_levels(mu, h);
    let mut previous: Option<(f64, f64)> = None;
    for _ in 0..5 {
        h *= 0.5;
        let fine = log_grid_levels(mu, h);
        let extrap = (
            (4.0 * fine.0 - coarse.0) / 3.0,
            (4.0 * fine.1 - coarse.1) / 3.0,
        );
        if let Some(prev) = previous {
            let change = (extrap.0 - prev.0).abs();
            if change < 1e-7 * extrap.0.abs() {
                return Ok(GridSpectrum {
                    e0: extrap.0,
                    e1: extrap.1,
                    refinement_change: change,
                    step: h,
                });
            }
        }
        previous = Some(extrap);
        coarse = fine;
    }
    Err(Error::Numerical(format!(
        "radial grid did not converge for mu = {mu}"
    )))
}

/// Radial trial `u(r) = r^sigma e^{-r/s}` (so `chi(R) = u(R) / R`) for the
/// Hardy quotient `<chi| p^2 - lambda / R^2 |chi> / <chi|chi>`.
///
/// The exponent must exceed `1/2`: at `sigma = 1/2` both `<p^2>` and
/// `<1/R^2>` diverge, which is exactly why `u ~ r^{1/2}` is the critical
/// profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardyTrial {
    pub sigma: f64,
    pub scale: f64,
}

pub const HARDY_SIGMA_MAX: f64 = 1.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardyQuotient {
    pub trial: HardyTrial,
    pub lambda: f64,
    /// `int u'^2 dr`, `int u^2 / r^2 dr`, `int u^2 dr`, all divided by the
    /// common factor `Gamma(2 sigma - 1) (s/2)^(2 sigma - 1)`.
    pub kinetic: f64,
    pub inverse_square: f64,
    pub norm: f64,
    pub quotient: f64,
}

pub fn hardy_check(lambda: f64, trial: HardyTrial) -> Result<HardyQuotient> {
    let HardyTrial { sigma, scale } = trial;
    if !(sigma > 0.5 && sigma.is_finite()) || !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::domain(format!(
            "Hardy trial needs sigma > 1/2 and s > 0, got sigma = {sigma}, s = {scale}"
        )));
    }
    // Gamma(k + 1) = k Gamma(k) reduces all three integrals to the factor
    // Gamma(2 sigma - 1) (s/2)^(2 sigma - 1).
    let kinetic = sigma / 2.0;
    let inverse_square = 1.0;
    let norm = sigma * (2.0 * sigma - 1.0) * scale * scale / 2.0;
    Ok(HardyQuotient {
        trial,
        lambda,
        kinetic,
        inverse_square,
        norm,
        quotient: (kinetic - lambda * inverse_square) / norm,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardyViolation {
    pub trial: HardyTrial,
    pub quotient: f64,
    pub halved_quotient: f64,
    /// `quotient(s/2) / quotient(s)`, equal to 4 for a `1/s^2` law.
    pub scaling_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardyScan {
    pub lambda: f64,
    pub trials: usize,
    pub min_quotient: f64,
    pub argmin: HardyTrial,
    pub violation: Option<HardyViolation>,
}

/// Evaluates the quotient over `trials`; for `lambda > 1/4` also constructs
/// a violating trial (`1/2 < sigma < 2 lambda`) at scale `s` and the
/// quotient at `s/2`.
pub fn hardy_scan(lambda: f64, trials: &[HardyTrial]) -> Result<HardyScan> {
    let mut min_quotient = f64::INFINITY;
    let mut argmin = HardyTrial {
        sigma: f64::NAN,
        scale: f64::NAN,
    };
    for &t in trials {
        let q = hardy_check(lambda, t)?.quotient;
        if q < min_quotient {
            min_quotient = q;
            argmin = t;
        }
    }
    let violation = if lambda > 0.25 {
        let sigma = (0.5 + (2.0 * lambda).min(HARDY_SIGMA_MAX)) / 2.0;
        let trial = HardyTrial { sigma, scale: 1.0 };
        let quotient = hardy_check(lambda, trial)?.quotient;
        let halved_quotient = hardy_check(lambda, HardyTrial { scale: 0.5, ..trial })?.quotient;
        Some(HardyViolation {
            trial,
            quotient,
            halved_quotient,
            scaling_ratio: halved_quotient / quotient,
        })
    } else {
        None
    };
    Ok(HardyScan {
        lambda,
        trials: trials.len(),
        min_quotient,
        argmin,
        violation,
    })
}

/// Random trials with `sigma` uniform in `(1/2, 3/2]` and `s` log-uniform in
/// `[1e-3, 1e3]`.
pub fn hardy_trial_family(count: usize, seed: u64) -> Vec<HardyTrial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| HardyTrial {
            sigma: 0.5 + (1.0 - rng.random::<f64>()) * (HARDY_SIGMA_MAX - 0.5),
            scale: 10f64.powf(rng.random_range(-3.0..=3.0)),
        })
        .collect()
}

/// Ground state of the tight pair, `sqrt(8/pi) e^{-2x}`.
pub fn phi0(x: f64) -> f64 {
    (8.0 / PI).sqrt() * (-2.0 * x).exp()
}

/// Test functions of `x` (at frozen `y`, `R`) for the projector check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ProbeFunction {
    GroundState,
    /// `exp(-|x|^2 / w^2)`
    Gaussian { width: f64 },
    /// `x_z exp(-|x|^2 / w^2)`, orthogonal to the ground state by parity.
    OddDipole { width: f64 },
    /// `exp(-|x - c|^2 / w^2)`
    Shifted { center: [f64; 3], width: f64 },
}

impl ProbeFunction {
    pub fn eval(&self, x: Vec3) -> f64 {
        match *self {
            ProbeFunction::GroundState => phi0(norm(x)),
            ProbeFunction::Gaussian { width } => (-norm(x).powi(2) / (width * width)).exp(),
            ProbeFunction::OddDipole { width } => x[2] * (-norm(x).powi(2) / (width * width)).exp(),
            ProbeFunction::Shifted { center, width } => {
                (-norm(sub(x, center)).powi(2) / (width * width)).exp()
            }
        }
    }

    fn extent(&self) -> f64 {
        match *self {
            ProbeFunction::GroundState => 0.0,
            ProbeFunction::Gaussian { width } | ProbeFunction::OddDipole { width } => 8.0 * width,
            ProbeFunction::Shifted { center, width } => norm(center) + 8.0 * width,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectorCheck {
    /// `<phi0|f>`
    pub overlap: f64,
    /// `<phi0|phi0>`, should be 1.
    pub phi0_norm: f64,
    /// `||P0 (P0 f) - P0 f||`
    pub idempotence: f64,
    /// `|<phi0|(1 - P0) f>|`
    pub orthogonality: f64,
}

/// Applies `P0 f = phi0 <phi0|f>` twice by quadrature and measures how far
/// the result is from a projection.
pub fn projector_idempotence_check(f: &ProbeFunction) -> Result<ProjectorCheck> {
    let rule = SphericalRule {
        rel_tol: 1e-11,
        abs_tol: 1e-14,
        max_intervals: 400,
    };
    let problem = SphericalProblem {
        center: [0.0; 3],
        r_max: f.extent().max(20.0),
        singular_points: &[],
        axisymmetric: false,
    };
    let integrate = |g: &dyn Fn(Vec3) -> f64| rule.integrate(&problem, |_| 1.0, g).map(|e| e.value);
    let phi0_norm = integrate(&|x| phi0(norm(x)).powi(2))?;
    let overlap = integrate(&|x| phi0(norm(x)) * f.eval(x))?;
    // P0 f = overlap * phi0; project once more
    let p0f = |x: Vec3| overlap * phi0(norm(x));
    let twice = integrate(&|x| phi0(norm(x)) * p0f(x))?;
    let idempotence = (twice - overlap).abs() * phi0_norm.sqrt();
    let orthogonality = (overlap - twice).abs();
    Ok(ProjectorCheck {
        overlap,
        phi0_norm,
        idempotence,
        orthogonality,
    })
}

/// Settings for [`run_chain_suite`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainSuiteConfig {
    pub seed: u64,
    /// Random points for the envelope identity and Hardy positivity.
    pub samples: usize,
    /// Points per axis of the quadratic-inequality grid.
    pub grid_points: usize,
}

impl Default for ChainSuiteConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            samples: 100_000,
            grid_points: 400,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub mu_r: f64,
    pub coefficient: f64,
    pub proves_instability: bool,
    pub records: Vec<CheckRecord>,
    pub all_passed: bool,
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1).max(1) as f64)
        .collect()
}

/// Runs every scalar check at one canonical `mu_R < 3/8`.
pub fn run_chain_suite(mu_r: f64, config: &ChainSuiteConfig) -> Result<ChainReport> {
    let coefficient = chain_coefficient(mu_r)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut records = Vec::new();
    let p = |pairs: &[(&str, f64)]| -> BTreeMap<String, f64> {
        pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
    };

    records.push(CheckRecord::new(
        "chain_coefficient_above_one",
        CheckKind::Inequality,
        p(&[("mu_r", mu_r), ("coefficient", coefficient)]),
        coefficient - 1.0,
        0.0,
    ));

    let boundary = CriticalConstant::get().canonical_boundary;
    let scalar = crate::criterion::solve_scalar_condition(mu_r)?;
    records.push(CheckRecord::new(
        "scalar_condition_matches_closed_form",
        CheckKind::Identity,
        p(&[("mu_r", mu_r), ("boundary", boundary), ("three_mu_c", 3.0 * mu_r * coefficient)]),
        if scalar == (mu_r <= boundary) { 0.0 } else { 1.0 },
        0.0,
    ));

    let mut worst = 0.0f64;
    for _ in 0..config.samples {
        let beta = 10f64.powf(rng.random_range(-3.0..1.0));
        let env = lambda_envelope(beta, mu_r)?;
        let scale = env.closed_form.abs().max(env.maximum.abs()).max(beta * beta);
        worst = worst.max((env.maximum - env.closed_form).abs() / scale);
    }
    records.push(CheckRecord::new(
        "lambda_envelope_identity",
        CheckKind::Identity,
        p(&[("mu_r", mu_r), ("samples", config.samples as f64)]),
        worst,
        1e-9,
    ));

    let (alpha_star, beta_star) = quadratic_minimizer(mu_r)?;
    let n = config.grid_points.max(2);
    let quad = verify_quadratic_inequality(
        mu_r,
        &linspace(0.0, 3.0 * alpha_star + 1.0, n),
        &linspace(0.0, 3.0 * beta_star + 1.0, n),
    )?;
    records.push(CheckRecord::new(
        "quadratic_inequality_grid",
        CheckKind::Inequality,
        p(&[("mu_r", mu_r), ("points", quad.points as f64)]),
        quad.grid_min,
        1e-9,
    ));
    records.push(CheckRecord::new(
        "quadratic_inequality_tight",
        CheckKind::Identity,
        p(&[("mu_r", mu_r), ("alpha_star", alpha_star), ("beta_star", beta_star)]),
        quad.analytic_min.abs(),
        1e-8,
    ));

    let grid = grid_spectral_check(2.0)?;
    records.push(CheckRecord::new(
        "pair_ground_level",
        CheckKind::Identity,
        p(&[("mu", 2.0), ("e0", grid.e0)]),
        (grid.e0 + 1.0).abs(),
        1e-6,
    ));
    records.push(CheckRecord::new(
        "pair_excited_gap",
        CheckKind::Identity,
        p(&[("mu", 2.0), ("e1", grid.e1)]),
        (grid.e1 + 0.25).abs(),
        1e-6,
    ));

    let trials = hardy_trial_family(config.samples.clamp(1, 10_000), config.seed ^ 0x4a7d);
    let scan = hardy_scan(0.25, &trials)?;
    records.push(CheckRecord::new(
        "hardy_positive_at_quarter",
        CheckKind::Inequality,
        p(&[("lambda", 0.25), ("trials", trials.len() as f64)]),
        scan.min_quotient,
        1e-8,
    ));
    let over = hardy_scan(0.26, &[])?;
    let v = over.violation.expect("lambda > 1/4 yields a violation");
    records.push(CheckRecord::new(
        "hardy_violated_above_quarter",
        CheckKind::Inequality,
        p(&[("lambda", 0.26), ("sigma", v.trial.sigma), ("quotient", v.quotient)]),
        -v.quotient,
        0.0,
    ));
    records.push(CheckRecord::new(
        "hardy_inverse_square_scaling",
        CheckKind::Identity,
        p(&[("lambda", 0.26), ("ratio", v.scaling_ratio)]),
        (v.scaling_ratio / 4.0 - 1.0).abs(),
        0.05,
    ));

    for (name, probe) in [
        ("projector_fixes_ground_state", ProbeFunction::GroundState),
        ("projector_kills_odd_function", ProbeFunction::OddDipole { width: 1.0 }),
        ("projector_gaussian", ProbeFunction::Gaussian { width: 1.0 }),
    ] {
        let check = projector_idempotence_check(&probe)?;
        records.push(CheckRecord::new(
            name,
            CheckKind::Identity,
            p(&[("overlap", check.overlap), ("phi0_norm", check.phi0_norm)]),
            check.idempotence.max(check.orthogonality),
            1e-8,
        ));
    }

    let all_passed = records.iter().all(|r| r.passed);
    Ok(ChainReport {
        mu_r,
        coefficient,
        proves_instability: scalar,
        records,
        all_passed,
    })
}
