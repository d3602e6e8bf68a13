//! Symmetric-definite generalized eigenproblems `H c = E S c`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orthogonalization {
    /// Drop overlap eigenvectors below `threshold` times the largest.
    Canonical { threshold: f64 },
    /// Reject the basis when the overlap condition number exceeds `cap`.
    Strict { cap: f64 },
}

impl Default for Orthogonalization {
    fn default() -> Self {
        Self::Canonical { threshold: 1e-11 }
    }
}

/// Roots of the pencil in ascending order, with `S`-orthonormal vectors in
/// the original basis (one column per root).
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
    pub retained: usize,
    /// Condition number of the diagonally normalized overlap on the
    /// retained space.
    pub condition: f64,
}

#[derive(Clone, Debug)]
pub struct Lowest {
    pub energy: f64,
    pub vector: DVector<f64>,
    pub retained: usize,
    pub condition: f64,
}

/// Basis functions are normalized first so the condition number refers to
/// the scale-free overlap.
pub fn generalized_spectrum(
    h: &DMatrix<f64>,
    s: &DMatrix<f64>,
    orth: Orthogonalization,
) -> Result<Spectrum> {
    let n = s.nrows();
    if n == 0 {
        return Err(Error::Input("empty basis".into()));
    }
    if s.ncols() != n || h.nrows() != n || h.ncols() != n {
        return Err(Error::Input("H and S must be square and of equal size".into()));
    }
    if (0..n).any(|i| !(s[(i, i)] > 0.0)) {
        return Err(Error::Numerical("overlap has a nonpositive diagonal".into()));
    }
    let norms = DVector::from_iterator(n, (0..n).map(|i| 1.0 / s[(i, i)].sqrt()));
    let sn = DMatrix::from_fn(n, n, |i, j| s[(i, j)] * norms[i] * norms[j]);
    let se = SymmetricEigen::new(sn);
    let max = se.eigenvalues.max();
    let min = se.eigenvalues.min();
    let condition = if min > 0.0 { max / min } else { f64::INFINITY };
    let keep_above = match orth {
        Orthogonalization::Strict { cap } => {
            if !(condition <= cap) {
                return Err(Error::IllConditioned { condition, cap });
            }
            0.0
        }
        Orthogonalization::Canonical { threshold } => threshold * max,
    };
    let kept: Vec<usize> = (0..n).filter(|&i| se.eigenvalues[i] > keep_above).collect();
    let m = kept.len();
    if m == 0 {
        return Err(Error::Numerical("overlap has no positive eigenvalue".into()));
    }
    let x = DMatrix::from_fn(n, m, |i, j| {
        let k = kept[j];
        se.eigenvectors[(i, k)] * norms[i] / se.eigenvalues[k].sqrt()
    });
    let hp = x.transpose() * h * &x;
    let hp = 0.5 * (&hp + hp.transpose());
    let he = SymmetricEigen::new(hp);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| he.eigenvalues[a].total_cmp(&he.eigenvalues[b]));
    let values = order.iter().map(|&k| he.eigenvalues[k]).collect();
    let mut vectors = DMatrix::zeros(n, m);
    for (col, &k) in order.iter().enumerate() {
        vectors.set_column(col, &(&x * he.eigenvectors.column(k)));
    }
    let kept_min = kept.iter().map(|&k| se.eigenvalues[k]).fold(f64::INFINITY, f64::min);
    Ok(Spectrum {
        values,
        vectors,
        retained: m,
        condition: max / kept_min,
    })
}

pub fn generalized_lowest(
    h: &DMatrix<f64>,
    s: &DMatrix<f64>,
    orth: Orthogonalization,
) -> Result<Lowest> {
    let sp = generalized_spectrum(h, s, orth)?;
    Ok(Lowest {
        energy: sp.values[0],
        vector: sp.vectors.column(0).into_owned(),
        retained: sp.retained,
        condition: sp.condition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const STRICT: Orthogonalization = Orthogonalization::Strict { cap: 1e12 };

    #[test]
    fn trivial_pencils() {
        let h = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 5.0]);
        let s = DMatrix::identity(2, 2);
        assert_eq!(generalized_lowest(&h, &s, STRICT).unwrap().energy, -1.0);
        let l = generalized_lowest(
            &DMatrix::from_element(1, 1, -0.5),
            &DMatrix::from_element(1, 1, 2.0),
            STRICT,
        )
        .unwrap();
        assert!((l.energy + 0.25).abs() < 1e-15);
        assert!((l.vector[0].powi(2) * 2.0 - 1.0).abs() < 1e-15);
    }

    fn random_pencil(n: usize, seed: u64) -> (DMatrix<f64>, DMatrix<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let s = &b * b.transpose() + DMatrix::identity(n, n) * 0.1;
        let g = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let h = 0.5 * (&g + g.transpose());
        (h, s)
    }

    /// Eigenvalues of the pencil below `sigma`, by Sylvester inertia of
    /// `H - sigma S` (symmetric elimination, no pivoting).
    fn count_below(h: &DMatrix<f64>, s: &DMatrix<f64>, sigma: f64) -> usize {
        let mut m = h - s * sigma;
        let n = m.nrows();
        let mut neg = 0;
        for k in 0..n {
            let p = m[(k, k)];
            if p < 0.0 {
                neg += 1;
            }
            for i in k + 1..n {
                let f = m[(i, k)] / p;
                for j in k + 1..n {
                    m[(i, j)] -= f * m[(k, j)];
                }
            }
        }
        neg
    }

    /// Inertia bisection to locate the lowest root, then shifted inverse
    /// iteration and a Rayleigh quotient.
    fn oracle_lowest(h: &DMatrix<f64>, s: &DMatrix<f64>) -> f64 {
        let (mut lo, mut hi) = (-1e3, 1e3);
        while hi - lo > 1e-6 {
            let mid = 0.5 * (lo + hi);
            if count_below(h, s, mid) >= 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let shift = lo - 1e-4;
        let lu = (h - s * shift).lu();
        let mut v = DVector::from_element(h.nrows(), 1.0);
        for _ in 0..200 {
            v = lu.solve(&(s * &v)).unwrap();
            v /= v.norm();
        }
        (v.transpose() * h * &v)[0] / (v.transpose() * s * &v)[0]
    }

    #[test]
    fn random_pencil_matches_inverse_iteration() {
        for seed in 0..5 {
            let (h, s) = random_pencil(20, seed);
            let e = generalized_lowest(&h, &s, STRICT).unwrap().energy;
            let oracle = oracle_lowest(&h, &s);
            assert!((e - oracle).abs() < 1e-10 * oracle.abs().max(1.0), "{e} vs {oracle}");
        }
    }

    #[test]
    fn spectrum_vectors_are_s_orthonormal() {
        let (h, s) = random_pencil(12, 9);
        let sp = generalized_spectrum(&h, &s, STRICT).unwrap();
        let g = sp.vectors.transpose() * &s * &sp.vectors;
        let r = sp.vectors.transpose() * &h * &sp.vectors;
        for i in 0..12 {
            for j in 0..12 {
                let id = if i == j { 1.0 } else { 0.0 };
                assert!((g[(i, j)] - id).abs() < 1e-10);
                let d = if i == j { sp.values[i] } else { 0.0 };
                assert!((r[(i, j)] - d).abs() < 1e-9);
            }
        }
        assert!(sp.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn condition_cap_rejects() {
        let s = DMatrix::from_row_slice(2, 2, &[1.0, 1.0 - 1e-14, 1.0 - 1e-14, 1.0]);
        let h = DMatrix::identity(2, 2);
        assert!(matches!(
            generalized_lowest(&h, &s, STRICT),
            Err(Error::IllConditioned { .. })
        ));
        assert!(generalized_lowest(&h, &s, Orthogonalization::default()).is_ok());
    }
}
