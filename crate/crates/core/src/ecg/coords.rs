use nalgebra::{DMatrix, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system::{reduced_mass, FourBodySystem};

/// Two to four point charges with arbitrary positive masses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoulombSystem {
    masses: Vec<f64>,
    charges: Vec<f64>,
}

impl CoulombSystem {
    pub fn new(masses: Vec<f64>, charges: Vec<f64>) -> Result<Self> {
        if !(2..=4).contains(&masses.len()) || masses.len() != charges.len() {
            return Err(Error::Input(format!(
                "need 2 to 4 particles with one charge each, got {} masses and {} charges",
                masses.len(),
                charges.len()
            )));
        }
        if let Some(m) = masses.iter().find(|m| !(m.is_finite() && **m > 0.0)) {
            return Err(Error::domain(format!("mass must be positive and finite, got {m}")));
        }
        if let Some(q) = charges.iter().find(|q| !q.is_finite() || **q == 0.0) {
            return Err(Error::domain(format!("charge must be nonzero and finite, got {q}")));
        }
        Ok(Self { masses, charges })
    }

    /// Hydrogen-like pair with unit charges of opposite sign.
    pub fn two_body(m1: f64, m2: f64) -> Result<Self> {
        Self::new(vec![m1, m2], vec![1.0, -1.0])
    }

    pub fn from_four_body(system: &FourBodySystem) -> Self {
        Self {
            masses: system.masses().to_vec(),
            charges: system.charges().to_vec(),
        }
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn charges(&self) -> &[f64] {
        &self.charges
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
    }

    pub fn pair_reduced_mass(&self, i: usize, j: usize) -> f64 {
        reduced_mass(self.masses[i], self.masses[j]).expect("masses validated")
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.masses.iter().map(|m| m * factor).collect(), self.charges.clone())
    }

    /// Lowest dissociation threshold for unit charges: `0` for two bodies,
    /// the deepest attractive pair plus a free particle for three, two
    /// neutral pairs for four (the pairing with the largest reduced masses).
    pub fn threshold(&self) -> f64 {
        match self.len() {
            2 => 0.0,
            3 => self
                .pairs()
                .into_iter()
                .filter(|&(i, j)| self.charges[i] * self.charges[j] < 0.0)
                .map(|(i, j)| -0.5 * self.pair_reduced_mass(i, j) * (self.charges[i] * self.charges[j]).powi(2))
                .fold(0.0, f64::min),
            _ => {
                let splits = [[(0, 1), (2, 3)], [(0, 2), (1, 3)], [(0, 3), (1, 2)]];
                splits
                    .iter()
                    .filter(|s| s.iter().all(|&(i, j)| self.charges[i] * self.charges[j] < 0.0))
                    .map(|s| {
                        s.iter()
                            .map(|&(i, j)| -0.5 * self.pair_reduced_mass(i, j) * (self.charges[i] * self.charges[j]).powi(2))
                            .sum::<f64>()
                    })
                    .fold(0.0, f64::min)
            }
        }
    }
}

/// Relative coordinates for the Gaussians.
///
/// Two bodies use `r2 - r1`, three use sequential Jacobi vectors, four use
/// `x = r2 - r1`, `y = r4 - r3` and `R` between the pair centers of mass.
/// Matrices are padded to 3x3: the kinetic metric with zeros, so unused
/// directions never contribute.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobiCoordinates {
    pub dim: usize,
    /// `Lambda` in `T = (1/2) pi^T Lambda pi`.
    pub lambda: Matrix3<f64>,
    /// `(i, j, w, q_i q_j)` with `r_i - r_j = w^T xi`.
    pub pairs: Vec<(usize, usize, Vector3<f64>, f64)>,
    /// Reduced mass of each pair, same order as `pairs`.
    pub pair_mu: Vec<f64>,
}

impl JacobiCoordinates {
    pub fn new(system: &CoulombSystem) -> Self {
        let n = system.len();
        let m = system.masses();
        let total: f64 = m.iter().sum();
        // rows: relative coordinates, then the center of mass
        let mut u = DMatrix::<f64>::zeros(n, n);
        match n {
            2 => {
                u[(0, 0)] = -1.0;
                u[(0, 1)] = 1.0;
            }
            3 => {
                u[(0, 0)] = -1.0;
                u[(0, 1)] = 1.0;
                let m12 = m[0] + m[1];
                u[(1, 0)] = -m[0] / m12;
                u[(1, 1)] = -m[1] / m12;
                u[(1, 2)] = 1.0;
            }
            _ => {
                u[(0, 0)] = -1.0;
                u[(0, 1)] = 1.0;
                u[(1, 2)] = -1.0;
                u[(1, 3)] = 1.0;
                let (m12, m34) = (m[0] + m[1], m[2] + m[3]);
                u[(2, 0)] = -m[0] / m12;
                u[(2, 1)] = -m[1] / m12;
                u[(2, 2)] = m[2] / m34;
                u[(2, 3)] = m[3] / m34;
            }
        }
        for j in 0..n {
            u[(n - 1, j)] = m[j] / total;
        }
        let uinv = u.clone().try_inverse().expect("Jacobi transform is invertible");
        let dim = n - 1;
        let mut lambda = Matrix3::zeros();
        for a in 0..dim {
            for b in 0..dim {
                lambda[(a, b)] = (0..n).map(|k| u[(a, k)] * u[(b, k)] / m[k]).sum();
            }
        }
        let mut pairs = Vec::new();
        let mut pair_mu = Vec::new();
        for (i, j) in system.pairs() {
            let mut w = Vector3::zeros();
            for k in 0..dim {
                w[k] = uinv[(i, k)] - uinv[(j, k)];
            }
            pairs.push((i, j, w, system.charges()[i] * system.charges()[j]));
            pair_mu.push(system.pair_reduced_mass(i, j));
        }
        Self {
            dim,
            lambda,
            pairs,
            pair_mu,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn jacobi_metric_is_diagonal() {
        let sys = CoulombSystem::new(vec![1.0, 3.0, 7.0, 2.0], vec![1.0, -1.0, 1.0, -1.0]).unwrap();
        let c = JacobiCoordinates::new(&sys);
        assert_relative_eq!(c.lambda[(0, 0)], 1.0 / 0.75, max_relative = 1e-14);
        assert_relative_eq!(c.lambda[(1, 1)], 1.0 / (14.0 / 9.0), max_relative = 1e-14);
        assert_relative_eq!(c.lambda[(2, 2)], 1.0 / (4.0 * 9.0 / 13.0), max_relative = 1e-14);
        assert!(c.lambda[(0, 1)].abs() < 1e-15 && c.lambda[(1, 2)].abs() < 1e-15);

        let sys3 = CoulombSystem::new(vec![1.0, 2.0, 5.0], vec![-1.0, 1.0, -1.0]).unwrap();
        let c = JacobiCoordinates::new(&sys3);
        assert_relative_eq!(c.lambda[(1, 1)], 1.0 / (3.0 * 5.0 / 8.0), max_relative = 1e-14);
        assert!(c.lambda[(0, 1)].abs() < 1e-15);
        assert_eq!(c.lambda[(2, 2)], 0.0);
    }

    #[test]
    fn pair_vectors_reproduce_separations() {
        let sys = CoulombSystem::new(vec![1.0, 3.0, 7.0, 2.0], vec![1.0, -1.0, 1.0, -1.0]).unwrap();
        let c = JacobiCoordinates::new(&sys);
        // x = 1, y = 0, R = 0: particles 1 and 2 apart by one, 3 and 4 at rest
        let (_, _, w, q) = c.pairs[0];
        assert_eq!((w[0], w[1], w[2]), (-1.0, 0.0, 0.0));
        assert_eq!(q, -1.0);
        // r1 - r3 = -a x + b y - R with a = 3/4, b = 2/9
        let (i, j, w, _) = c.pairs[1];
        assert_eq!((i, j), (0, 2));
        assert_relative_eq!(w[0], -0.75, max_relative = 1e-14);
        assert_relative_eq!(w[1], 2.0 / 9.0, max_relative = 1e-14);
        assert_relative_eq!(w[2], -1.0, max_relative = 1e-14);
    }

    #[test]
    fn thresholds() {
        assert_eq!(CoulombSystem::two_body(1.0, 1.0).unwrap().threshold(), 0.0);
        let ps_minus = CoulombSystem::new(vec![1.0; 3], vec![-1.0, 1.0, -1.0]).unwrap();
        assert_eq!(ps_minus.threshold(), -0.25);
        let ps2 = CoulombSystem::from_four_body(&FourBodySystem::new([1.0; 4]).unwrap());
        assert_eq!(ps2.threshold(), -0.5);
        let hh = crate::system::presets::hydrogen_antihydrogen();
        let th = CoulombSystem::from_four_body(&hh).threshold();
        assert_relative_eq!(th, hh.jacobi().threshold_energy(false), max_relative = 1e-14);
    }

    #[test]
    fn validation() {
        assert!(CoulombSystem::new(vec![1.0], vec![1.0]).is_err());
        assert!(CoulombSystem::new(vec![1.0, -1.0], vec![1.0, -1.0]).is_err());
        assert!(CoulombSystem::new(vec![1.0, 1.0], vec![1.0, 0.0]).is_err());
        assert!(CoulombSystem::new(vec![1.0; 5], vec![1.0; 5]).is_err());
    }
}
