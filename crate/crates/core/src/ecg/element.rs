use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix3};
use serde::{Deserialize, Serialize};

use super::coords::JacobiCoordinates;
use crate::error::{Error, Result};

/// Where a basis element came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    /// Growth step, or `u64::MAX` for hand-built elements.
    pub step: u64,
}

impl Default for Provenance {
    fn default() -> Self {
        Self {
            seed: 0,
            step: u64::MAX,
        }
    }
}

/// `exp(-xi^T A xi)` over the relative coordinates, `A` positive definite.
///
/// Stored padded to 3x3 with `1/2` on unused diagonal slots, which leaves
/// every normalized matrix element unchanged.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianBasisElement {
    dim: usize,
    a: Matrix3<f64>,
    /// `det(2A)^{3/4}`
    norm: f64,
    pub provenance: Provenance,
}

impl GaussianBasisElement {
    /// `values` in row-major order, `dim x dim`.
    pub fn new(dim: usize, values: &[f64], provenance: Provenance) -> Result<Self> {
        if !(1..=3).contains(&dim) || values.len() != dim * dim {
            return Err(Error::Input(format!(
                "correlation matrix must be dim x dim with dim in 1..=3, got {} entries for dim {dim}",
                values.len()
            )));
        }
        let mut a = Matrix3::from_diagonal_element(0.5);
        for i in 0..dim {
            for j in 0..dim {
                let v = values[i * dim + j];
                if !v.is_finite() {
                    return Err(Error::Input("correlation matrix entry is not finite".into()));
                }
                if (v - values[j * dim + i]).abs() > 1e-12 * v.abs().max(values[j * dim + i].abs()) {
                    return Err(Error::Input("correlation matrix is not symmetric".into()));
                }
                a[(i, j)] = v;
            }
        }
        Self::from_padded(dim, a, provenance)
    }

    fn from_padded(dim: usize, a: Matrix3<f64>, provenance: Provenance) -> Result<Self> {
        if a.cholesky().is_none() {
            return Err(Error::domain("correlation matrix is not positive definite"));
        }
        let det = (2.0 * a).determinant();
        Ok(Self {
            dim,
            a,
            norm: det.powf(0.75),
            provenance,
        })
    }

    /// `A = sum_k alpha_k w_k w_k^T` over the pair vectors of `coords`.
    pub fn from_pair_form(coords: &JacobiCoordinates, alphas: &[f64], provenance: Provenance) -> Result<Self> {
        if alphas.len() != coords.pairs.len() {
            return Err(Error::Input("one exponent per pair required".into()));
        }
        let mut a = Matrix3::zeros();
        for (&(_, _, w, _), &alpha) in coords.pairs.iter().zip(alphas) {
            a += alpha * w * w.transpose();
        }
        for k in coords.dim..3 {
            a[(k, k)] = 0.5;
        }
        Self::from_padded(coords.dim, a, provenance)
    }

    /// `G^T A G`, with `G` acting on the used block only.
    pub fn congruent(&self, g: &Matrix3<f64>, provenance: Provenance) -> Result<Self> {
        let mut gp = Matrix3::identity();
        for i in 0..self.dim {
            for j in 0..self.dim {
                gp[(i, j)] = g[(i, j)];
            }
        }
        let mut a = gp.transpose() * self.a * gp;
        for k in self.dim..3 {
            a[(k, k)] = 0.5;
        }
        let a = 0.5 * (a + a.transpose());
        Self::from_padded(self.dim, a, provenance)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.a[(i, j)])
    }

    pub fn row_major(&self) -> Vec<f64> {
        (0..self.dim)
            .flat_map(|i| (0..self.dim).map(move |j| (i, j)))
            .map(|(i, j)| self.a[(i, j)])
            .collect()
    }
}

/// Normalized matrix elements between two elements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixElements {
    pub overlap: f64,
    pub kinetic: f64,
    /// `<i|1/r_pair|j>` per pair, in the order of the coordinates' pairs.
    pub coulomb: Vec<f64>,
    /// `kinetic + sum q_i q_j coulomb`
    pub hamiltonian: f64,
}

pub fn matrix_elements(
    ei: &GaussianBasisElement,
    ej: &GaussianBasisElement,
    coords: &JacobiCoordinates,
) -> Result<MatrixElements> {
    if ei.dim != coords.dim || ej.dim != coords.dim {
        return Err(Error::Input("element dimension does not match the system".into()));
    }
    let (cinv, overlap) = combined(ei, ej)?;
    let kinetic = kinetic_factor(ei, ej, &cinv, coords) * overlap;
    let coulomb: Vec<f64> = coords
        .pairs
        .iter()
        .map(|&(_, _, w, _)| coulomb_factor(&cinv, &w) * overlap)
        .collect();
    let hamiltonian = kinetic
        + coords
            .pairs
            .iter()
            .zip(&coulomb)
            .map(|(&(_, _, _, q), v)| q * v)
            .sum::<f64>();
    Ok(MatrixElements {
        overlap,
        kinetic,
        coulomb,
        hamiltonian,
    })
}

fn combined(ei: &GaussianBasisElement, ej: &GaussianBasisElement) -> Result<(Matrix3<f64>, f64)> {
    let c = ei.a + ej.a;
    let det = c.determinant();
    let cinv = c.try_inverse().filter(|_| det > 0.0 && det.is_finite());
    let Some(cinv) = cinv else {
        return Err(Error::Numerical(format!("combined correlation matrix is singular (det {det:e})")));
    };
    Ok((cinv, ei.norm * ej.norm / det.powf(1.5)))
}

/// `3 tr(A C^{-1} B Lambda)`
fn kinetic_factor(
    ei: &GaussianBasisElement,
    ej: &GaussianBasisElement,
    cinv: &Matrix3<f64>,
    coords: &JacobiCoordinates,
) -> f64 {
    3.0 * (ei.a * cinv * ej.a * coords.lambda).trace()
}

/// `(2/sqrt(pi)) / sqrt(w^T C^{-1} w)`
fn coulomb_factor(cinv: &Matrix3<f64>, w: &nalgebra::Vector3<f64>) -> f64 {
    2.0 / PI.sqrt() / w.dot(&(cinv * w)).sqrt()
}

/// Normalized `(S_ij, H_ij)`, the hot path of basis growth.
pub(crate) fn overlap_and_hamiltonian(
    ei: &GaussianBasisElement,
    ej: &GaussianBasisElement,
    coords: &JacobiCoordinates,
) -> Result<(f64, f64)> {
    let (cinv, s) = combined(ei, ej)?;
    let mut h = kinetic_factor(ei, ej, &cinv, coords);
    for &(_, _, w, q) in &coords.pairs {
        h += q * coulomb_factor(&cinv, &w);
    }
    Ok((s, h * s))
}

#[cfg(test)]
mod tests {
    use super::super::coords::CoulombSystem;
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::Vector3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn single_gaussian_two_body() {
        let mu = 0.8;
        let sys = CoulombSystem::two_body(2.0, 4.0 / 3.0).unwrap();
        let coords = JacobiCoordinates::new(&sys);
        assert_relative_eq!(coords.lambda[(0, 0)], 1.0 / mu, max_relative = 1e-14);
        let w = 0.37;
        let e = GaussianBasisElement::new(1, &[w], Provenance::default()).unwrap();
        let m = matrix_elements(&e, &e, &coords).unwrap();
        assert_relative_eq!(m.overlap, 1.0, max_relative = 1e-14);
        assert_relative_eq!(m.kinetic, 3.0 * w / (2.0 * mu), max_relative = 1e-14);
        // <1/r> = 2 sqrt(2w / pi) for exp(-2 w r^2)
        assert_relative_eq!(m.coulomb[0], 2.0 * (2.0 * w / PI).sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn geometric_ladder_hydrogen_like() {
        // mu = 2: exact ground energy -1
        let sys = CoulombSystem::two_body(4.0, 4.0).unwrap();
        let coords = JacobiCoordinates::new(&sys);
        let elements: Vec<_> = (0..20)
            .map(|k| {
                let alpha = 4.0 * 0.004 * 2.2f64.powi(k);
                GaussianBasisElement::new(1, &[alpha], Provenance::default()).unwrap()
            })
            .collect();
        let n = elements.len();
        let mut s = DMatrix::zeros(n, n);
        let mut h = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let (sij, hij) = overlap_and_hamiltonian(&elements[i], &elements[j], &coords).unwrap();
                s[(i, j)] = sij;
                h[(i, j)] = hij;
            }
        }
        let e = crate::linalg::generalized_lowest(&h, &s, crate::linalg::Orthogonalization::Strict { cap: 1e12 })
            .unwrap()
            .energy;
        assert!(e >= -1.0 && e + 1.0 < 1e-6, "{e}");
    }

    #[test]
    fn coulomb_matches_monte_carlo() {
        let sys = CoulombSystem::new(vec![1.0, 3.0, 7.0, 2.0], vec![1.0, -1.0, 1.0, -1.0]).unwrap();
        let coords = JacobiCoordinates::new(&sys);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let alphas: Vec<f64> = (0..6).map(|_| rng.random_range(0.1..2.0)).collect();
        let e = GaussianBasisElement::from_pair_form(&coords, &alphas, Provenance::default()).unwrap();
        let m = matrix_elements(&e, &e, &coords).unwrap();
        // |psi|^2 = exp(-2 xi^T A xi): xi ~ N(0, (4A)^{-1}) per Cartesian component
        let cov = (4.0 * e.a).try_inverse().unwrap();
        let l = cov.cholesky().unwrap().l();
        let n = 400_000;
        let mut sums = [(0.0, 0.0); 6];
        for _ in 0..n {
            let mut xi = [Vector3::zeros(); 3];
            #[allow(clippy::needless_range_loop)]
            for c in 0..3 {
                let z = Vector3::from_fn(|_, _| StandardNormal.sample(&mut rng));
                let v: Vector3<f64> = l * z;
                for k in 0..3 {
                    xi[k][c] = v[k];
                }
            }
            for (p, &(_, _, w, _)) in coords.pairs.iter().enumerate() {
                let r = (0..3).fold(Vector3::zeros(), |acc, k| acc + w[k] * xi[k]).norm();
                sums[p].0 += 1.0 / r;
                sums[p].1 += 1.0 / (r * r);
            }
        }
        for (p, &(s1, s2)) in sums.iter().enumerate() {
            let mean = s1 / n as f64;
            let se = ((s2 / n as f64 - mean * mean) / n as f64).sqrt();
            assert!((m.coulomb[p] - mean).abs() < 3.0 * se, "pair {p}: {} vs {mean} +- {se}", m.coulomb[p]);
        }
    }

    #[test]
    fn overlap_is_symmetric_and_bounded() {
        let sys = CoulombSystem::new(vec![1.0; 3], vec![-1.0, 1.0, -1.0]).unwrap();
        let coords = JacobiCoordinates::new(&sys);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let mk = |rng: &mut ChaCha8Rng| {
                let al: Vec<f64> = (0..3).map(|_| 10f64.powf(rng.random_range(-2.0..2.0))).collect();
                GaussianBasisElement::from_pair_form(&coords, &al, Provenance::default()).unwrap()
            };
            let (a, b) = (mk(&mut rng), mk(&mut rng));
            let ab = matrix_elements(&a, &b, &coords).unwrap();
            let ba = matrix_elements(&b, &a, &coords).unwrap();
            assert_relative_eq!(ab.overlap, ba.overlap, max_relative = 1e-12);
            assert_relative_eq!(ab.hamiltonian, ba.hamiltonian, max_relative = 1e-10, epsilon = 1e-14);
            assert!(ab.overlap > 0.0 && ab.overlap <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn rejects_invalid_matrices() {
        assert!(GaussianBasisElement::new(2, &[1.0, 2.0, 2.0, 1.0], Provenance::default()).is_err());
        assert!(GaussianBasisElement::new(2, &[1.0, 0.1, 0.2, 1.0], Provenance::default()).is_err());
        assert!(GaussianBasisElement::new(2, &[1.0, 0.0], Provenance::default()).is_err());
        let e = GaussianBasisElement::new(2, &[1.0, 0.3, 0.3, 2.0], Provenance::default()).unwrap();
        assert_eq!(e.row_major(), vec![1.0, 0.3, 0.3, 2.0]);
        let sys = CoulombSystem::new(vec![1.0; 4], vec![1.0, -1.0, 1.0, -1.0]).unwrap();
        assert!(matrix_elements(&e, &e, &JacobiCoordinates::new(&sys)).is_err());
    }
}
