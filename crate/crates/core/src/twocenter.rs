//! Two-center Coulomb problem `p^2/(2 mu) - A/|R - c1| - A/|R - c2|`.
//!
//! Solved variationally in s-type Gaussians placed on both centers and the
//! midpoint. At `d = 0` the problem is hydrogen-like with charge `2A`, so
//! the ground energy is `-2 A^2 mu`, the floor for every separation. As
//! `d` grows the energy rises monotonically towards `-A^2 mu / 2`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::effpot::InteractionDecomposition;
use crate::error::{Error, Result};
pub use crate::linalg::Orthogonalization;
use crate::linalg::generalized_lowest;
use crate::quadrature::{add, dot, norm, scale, sub, SphericalProblem, SphericalRule, Vec3};

/// `F_0(t) = int_0^1 e^{-t u^2} du`
pub fn boys_f0(t: f64) -> f64 {
    if t < 1e-8 {
        1.0 - t / 3.0
    } else {
        let s = t.sqrt();
        0.5 * (PI / t).sqrt() * libm::erf(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoCenterProblem {
    pub coupling: f64,
    pub mu_r: f64,
    pub separation: f64,
}

impl TwoCenterProblem {
    pub fn new(coupling: f64, mu_r: f64, separation: f64) -> Result<Self> {
        if !(coupling > 0.0 && coupling.is_finite()) {
            return Err(Error::domain(format!("coupling must be positive, got {coupling}")));
        }
        if !(mu_r > 0.0 && mu_r.is_finite()) {
            return Err(Error::domain(format!("reduced mass must be positive, got {mu_r}")));
        }
        if !(separation >= 0.0 && separation.is_finite()) {
            return Err(Error::domain(format!("separation must be nonnegative, got {separation}")));
        }
        Ok(Self {
            coupling,
            mu_r,
            separation,
        })
    }

    /// `-2 A^2 mu_R`
    pub fn floor(&self) -> f64 {
        -2.0 * self.coupling.powi(2) * self.mu_r
    }

    /// `-A^2 mu_R / 2`
    pub fn separated_limit(&self) -> f64 {
        -0.5 * self.coupling.powi(2) * self.mu_r
    }

    pub fn centers(&self) -> [Vec3; 2] {
        let h = 0.5 * self.separation;
        [[0.0, 0.0, -h], [0.0, 0.0, h]]
    }

    pub fn ground(&self, basis: &BasisSpec) -> Result<TwoCenterSolution> {
        let k = self.coupling * self.mu_r;
        let exponents = basis.exponents(k);
        let [c1, c2] = self.centers();
        let mut sites = vec![c1];
        if self.separation > 0.0 {
            sites.push(c2);
            sites.push([0.0; 3]);
        }
        let functions: Vec<SGaussian> = sites
            .iter()
            .flat_map(|&center| exponents.iter().map(move |&alpha| SGaussian { center, alpha }))
            .collect();
        let (s, h) = hamiltonian(&functions, self.mu_r, &[(c1, self.coupling), (c2, self.coupling)]);
        let eig = generalized_lowest(&h, &s, basis.orthogonalization)?;
        Ok(TwoCenterSolution {
            problem: *self,
            energy: eig.energy,
            basis_size: functions.len(),
            retained: eig.retained,
            condition: eig.condition,
            functions,
            coefficients: eig.vector.iter().copied().collect(),
        })
    }
}

/// `exp(-alpha |R - center|^2)`
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SGaussian {
    pub center: Vec3,
    pub alpha: f64,
}

impl SGaussian {
    pub fn eval(&self, r: Vec3) -> f64 {
        let d = sub(r, self.center);
        (-self.alpha * dot(d, d)).exp()
    }
}

/// Overlap, kinetic `p^2/(2 mu)` and `-sum q/|R - C|` between two s-Gaussians.
fn pair_elements(a: &SGaussian, b: &SGaussian, mu: f64, charges: &[(Vec3, f64)]) -> (f64, f64) {
    let p = a.alpha + b.alpha;
    let xi = a.alpha * b.alpha / p;
    let ab = sub(a.center, b.center);
    let ab2 = dot(ab, ab);
    let pre = (-xi * ab2).exp();
    let s = (PI / p).powf(1.5) * pre;
    let t = xi * (3.0 - 2.0 * xi * ab2) * s / mu;
    let pc = scale(1.0 / p, add(scale(a.alpha, a.center), scale(b.alpha, b.center)));
    let v: f64 = charges
        .iter()
        .map(|&(c, q)| {
            let d = sub(pc, c);
            -q * 2.0 * PI / p * pre * boys_f0(p * dot(d, d))
        })
        .sum();
    (s, t + v)
}

fn hamiltonian(functions: &[SGaussian], mu: f64, charges: &[(Vec3, f64)]) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = functions.len();
    let mut s = DMatrix::zeros(n, n);
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let (sij, hij) = pair_elements(&functions[i], &functions[j], mu, charges);
            s[(i, j)] = sij;
            s[(j, i)] = sij;
            h[(i, j)] = hij;
            h[(j, i)] = hij;
        }
    }
    (s, h)
}

/// Geometric exponent ladder `alpha_j = lowest (A mu)^2 ratio^j`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisSpec {
    pub count: usize,
    pub ratio: f64,
    /// Smallest exponent in units of `(A mu)^2`.
    pub lowest: f64,
    pub orthogonalization: Orthogonalization,
}

impl Default for BasisSpec {
    fn default() -> Self {
        Self {
            count: 26,
            ratio: 2.0,
            lowest: 1e-3,
            orthogonalization: Orthogonalization::default(),
        }
    }
}

impl BasisSpec {
    pub fn with_count(count: usize) -> Self {
        Self {
            count,
            ..Self::default()
        }
    }

    pub fn exponents(&self, k: f64) -> Vec<f64> {
        (0..self.count)
            .map(|j| self.lowest * k * k * self.ratio.powi(j as i32))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoCenterSolution {
    pub problem: TwoCenterProblem,
    pub energy: f64,
    pub basis_size: usize,
    /// Functions surviving canonical orthogonalization.
    pub retained: usize,
    /// Overlap condition number on the retained space.
    pub condition: f64,
    pub functions: Vec<SGaussian>,
    pub coefficients: Vec<f64>,
}

pub fn two_center_ground(
    coupling: f64,
    mu_r: f64,
    separation: f64,
    basis: &BasisSpec,
) -> Result<TwoCenterSolution> {
    TwoCenterProblem::new(coupling, mu_r, separation)?.ground(basis)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub separation: f64,
    pub energy: f64,
    pub basis_size: usize,
    pub condition: f64,
}

pub fn separation_scan(
    coupling: f64,
    mu_r: f64,
    separations: &[f64],
    basis: &BasisSpec,
) -> Result<Vec<ScanRow>> {
    separations
        .iter()
        .map(|&d| {
            let sol = two_center_ground(coupling, mu_r, d, basis)?;
            Ok(ScanRow {
                separation: d,
                energy: sol.energy,
                basis_size: sol.basis_size,
                condition: sol.condition,
            })
        })
        .collect()
}

/// Largest drop `E(d_i) - E(d_{i+1})` along increasing separations; at most
/// the slack when the scan is monotone.
pub fn monotonicity_violation(rows: &[ScanRow]) -> f64 {
    rows.windows(2)
        .map(|w| w[0].energy - w[1].energy)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Linear combination of s-Gaussians, a trial `chi(R)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianCombination {
    pub functions: Vec<SGaussian>,
    pub coefficients: Vec<f64>,
}

impl GaussianCombination {
    pub fn eval(&self, r: Vec3) -> f64 {
        self.functions
            .iter()
            .zip(&self.coefficients)
            .map(|(g, c)| c * g.eval(r))
            .sum()
    }

    /// `(<chi|chi>, <chi|p^2/(2 mu)|chi>)`
    pub fn norm_and_kinetic(&self, mu: f64) -> (f64, f64) {
        let mut s = 0.0;
        let mut t = 0.0;
        for (gi, ci) in self.functions.iter().zip(&self.coefficients) {
            for (gj, cj) in self.functions.iter().zip(&self.coefficients) {
                let (sij, tij) = pair_elements(gi, gj, mu, &[]);
                s += ci * cj * sij;
                t += ci * cj * tij;
            }
        }
        (s, t)
    }

    fn centroid_and_reach(&self) -> (Vec3, f64) {
        let n = self.functions.len() as f64;
        let c = scale(
            1.0 / n,
            self.functions.iter().fold([0.0; 3], |acc, g| add(acc, g.center)),
        );
        let reach = self
            .functions
            .iter()
            .map(|g| norm(sub(g.center, c)) + (40.0 / g.alpha).sqrt())
            .fold(0.0, f64::max);
        (c, reach)
    }

    pub fn random(rng: &mut impl Rng, terms: usize, spread: f64, k: f64) -> Self {
        let functions = (0..terms)
            .map(|_| SGaussian {
                center: [0; 3].map(|_| rng.random_range(-spread..spread)),
                alpha: k * k * 10f64.powf(rng.random_range(-1.5..1.5)),
            })
            .collect();
        let coefficients = (0..terms).map(|_| rng.random_range(0.2..1.0)).collect();
        Self {
            functions,
            coefficients,
        }
    }
}

/// Frozen `(x, y)` for the floor check, with the mass parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrozenPairs {
    pub decomposition: InteractionDecomposition,
    pub x: Vec3,
    pub y: Vec3,
}

impl FrozenPairs {
    /// `x = -y` with `|x|` large: both attractive centers coincide at
    /// `(1 - a - b) x` while the repulsive ones sit at distance `|x|`, the
    /// configuration where the floor is approached.
    pub fn saturating(decomposition: InteractionDecomposition, length: f64) -> Self {
        let x = [0.0, 0.0, length];
        Self {
            decomposition,
            x,
            y: scale(-1.0, x),
        }
    }

    pub fn attractive_centers(&self) -> [Vec3; 2] {
        [
            self.decomposition.z1(self.x, self.y),
            self.decomposition.z2(self.x, self.y),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FloorSample {
    pub kinetic: f64,
    pub attraction: f64,
    /// `<chi|p^2/(2 mu) - A W-|chi> / <chi|chi>`
    pub quotient: f64,
    pub floor: f64,
    /// `quotient - floor`, nonnegative when the floor holds.
    pub residual: f64,
    pub quadrature_error: f64,
}

/// Quotient of `p^2/(2 mu_R) - A W-(x, y, .)` on `chi`, evaluated with the
/// true negative part of the inter-pair interaction.
pub fn floor_quotient(
    coupling: f64,
    mu_r: f64,
    pairs: &FrozenPairs,
    chi: &GaussianCombination,
    rule: &SphericalRule,
) -> Result<FloorSample> {
    if !(coupling >= 0.0) || !(mu_r > 0.0) {
        return Err(Error::domain("need A >= 0 and mu_R > 0"));
    }
    let (s, t) = chi.norm_and_kinetic(mu_r);
    let floor = -2.0 * coupling * coupling * mu_r;
    let (attraction, err) = if coupling == 0.0 {
        (0.0, 0.0)
    } else {
        let (center, reach) = chi.centroid_and_reach();
        let points = pairs.attractive_centers();
        let problem = SphericalProblem {
            center,
            r_max: reach,
            singular_points: &points,
            axisymmetric: false,
        };
        let dec = pairs.decomposition;
        let e = rule.integrate(
            &problem,
            |_| 1.0,
            |r| chi.eval(r).powi(2) * dec.w_minus(pairs.x, pairs.y, r),
        )?;
        (e.value / s, e.error / s)
    };
    let quotient = t / s - coupling * attraction;
    Ok(FloorSample {
        kinetic: t / s,
        attraction,
        quotient,
        floor,
        residual: quotient - floor,
        quadrature_error: coupling * err,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FloorReport {
    pub coupling: f64,
    pub mu_r: f64,
    pub samples: Vec<FloorSample>,
    pub min_residual: f64,
}

/// Random trials and frozen configurations; `(x, y)` are drawn around the
/// trial so the attractive centers overlap it.
pub fn floor_check(
    coupling: f64,
    mu_r: f64,
    count: usize,
    seed: u64,
    rule: &SphericalRule,
) -> Result<FloorReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = (coupling * mu_r).max(1e-12);
    let length = 1.0 / k;
    let mut samples = Vec::with_capacity(count);
    for _ in 0..count {
        let dec = InteractionDecomposition::new(rng.random_range(0.02..0.98), rng.random_range(0.02..0.98))?;
        let pairs = FrozenPairs {
            decomposition: dec,
            x: [0; 3].map(|_| rng.random_range(-2.0..2.0) * length),
            y: [0; 3].map(|_| rng.random_range(-2.0..2.0) * length),
        };
        let terms = rng.random_range(1..=3);
        let chi = GaussianCombination::random(&mut rng, terms, length, k);
        samples.push(floor_quotient(coupling, mu_r, &pairs, &chi, rule)?);
    }
    let min_residual = samples.iter().map(|s| s.residual).fold(f64::INFINITY, f64::min);
    Ok(FloorReport {
        coupling,
        mu_r,
        samples,
        min_residual,
    })
}

pub fn scan_csv(rows: &[ScanRow]) -> String {
    let mut out = String::from("d,energy,basis_size,condition\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            crate::report::fmt_sig15(r.separation),
            crate::report::fmt_sig15(r.energy),
            r.basis_size,
            crate::report::fmt_sig15(r.condition)
        ));
    }
    out
}
