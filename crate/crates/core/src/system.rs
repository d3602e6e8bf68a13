//! Four-body systems, the ordered Jacobi frame and dissociation thresholds.
//!
//! Particles carry the fixed charge pattern `(+1, -1, +1, -1)`. Of the two
//! ways to split them into neutral pairs, the frame picks the one with the
//! lowest two-pair threshold and orders the pairs so that `mu_x >= mu_y`.
//!
//! Note on the lower bound for `mu_R`: with `M1 = m1 + m2 >= 4 mu_x` and
//! `M2 = m3 + m4 >= 4 mu_y` one gets `mu_R >= 4 mu_x mu_y / (mu_x + mu_y)`,
//! which is sharp at equal masses (`mu_R = 2 mu_y` there). The frequently
//! quoted `mu_R >= 4 mu_y` only holds in the limit `mu_x >> mu_y`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Charges of the four particles, in units of the elementary charge.
pub const CHARGES: [f64; 4] = [1.0, -1.0, 1.0, -1.0];

/// Reduced mass `m mp / (m + mp)`.
pub fn reduced_mass(m: f64, mp: f64) -> Result<f64> {
    if !(m.is_finite() && mp.is_finite()) || m <= 0.0 || mp <= 0.0 {
        return Err(Error::domain(format!(
            "reduced mass needs finite positive masses, got ({m}, {mp})"
        )));
    }
    Ok(m * mp / (m + mp))
}

// Inputs are validated at construction, so internal callers skip the checks.
#[inline]
fn mu(m: f64, mp: f64) -> f64 {
    m * mp / (m + mp)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourBodySystem {
    masses: [f64; 4],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<[String; 4]>,
}

impl FourBodySystem {
    pub fn new(masses: [f64; 4]) -> Result<Self> {
        for (i, &m) in masses.iter().enumerate() {
            if !m.is_finite() || m <= 0.0 {
                return Err(Error::Input(format!(
                    "mass {} must be finite and strictly positive, got {m}",
                    i + 1
                )));
            }
        }
        Ok(Self {
            masses,
            labels: None,
        })
    }

    /// Parses exactly four decimal mass strings.
    ///
    /// `f64` parsing is correctly rounded, so every input with up to 15
    /// significant digits survives unchanged.
    pub fn from_decimal<S: AsRef<str>>(masses: &[S]) -> Result<Self> {
        if masses.len() != 4 {
            return Err(Error::Input(format!(
                "expected 4 masses, got {}",
                masses.len()
            )));
        }
        let mut parsed = [0.0; 4];
        for (slot, text) in parsed.iter_mut().zip(masses) {
            let text = text.as_ref().trim();
            *slot = text
                .parse::<f64>()
                .map_err(|e| Error::Input(format!("cannot parse mass {text:?}: {e}")))?;
        }
        Self::new(parsed)
    }

    pub fn with_labels(mut self, labels: [String; 4]) -> Self {
        self.labels = Some(labels);
        self
    }

    pub fn masses(&self) -> [f64; 4] {
        self.masses
    }

    pub fn charges(&self) -> [f64; 4] {
        CHARGES
    }

    pub fn labels(&self) -> Option<&[String; 4]> {
        self.labels.as_ref()
    }

    /// Same system with every mass multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let mut out = Self::new(self.masses.map(|m| m * factor))?;
        out.labels = self.labels.clone();
        Ok(out)
    }

    /// Relabels `1 <-> 3, 2 <-> 4`, which swaps the two pairs of pairing A.
    pub fn swap_pairs(&self) -> Self {
        let [m1, m2, m3, m4] = self.masses;
        Self {
            masses: [m3, m4, m1, m2],
            labels: self
                .labels
                .clone()
                .map(|[l1, l2, l3, l4]| [l3, l4, l1, l2]),
        }
    }

    pub fn jacobi(&self) -> JacobiFrame {
        build_jacobi(self)
    }
}

/// The two ways of forming neutral pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pairing {
    /// `(1,2) + (3,4)`
    A,
    /// `(1,4) + (3,2)`
    B,
}

impl Pairing {
    /// `(positive, negative)` particle indices (0-based) of both pairs.
    pub fn pairs(self) -> [(usize, usize); 2] {
        match self {
            Pairing::A => [(0, 1), (2, 3)],
            Pairing::B => [(0, 3), (2, 1)],
        }
    }
}

/// Ordered Jacobi frame of a four-body system.
///
/// After relabeling, particles `1, 2` form the tighter pair (`x = r2 - r1`),
/// particles `3, 4` the looser one (`y = r4 - r3`), and `R` joins the pair
/// centers of mass.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobiFrame {
    pub mu_x: f64,
    pub mu_y: f64,
    pub mu_r: f64,
    /// `m2 / (m1 + m2)` in the ordered labeling.
    pub a: f64,
    /// `m4 / (m3 + m4)` in the ordered labeling.
    pub b: f64,
    pub pairing: Pairing,
    /// Factor applied to the input masses (1 unless rescaled).
    pub scale: f64,
    /// Masses in ordered labeling, including `scale`.
    pub masses: [f64; 4],
    /// `relabel[original] = ordered` (0-based).
    pub relabel: [usize; 4],
}

impl JacobiFrame {
    /// Original index of ordered particle `k`.
    pub fn original_of(&self, ordered: usize) -> usize {
        self.relabel
            .iter()
            .position(|&o| o == ordered)
            .expect("relabel is a permutation")
    }

    pub fn ratio_x(&self) -> f64 {
        self.mu_r / self.mu_x
    }

    pub fn ratio_y(&self) -> f64 {
        self.mu_r / self.mu_y
    }

    /// Sharp lower bound `4 mu_x mu_y / (mu_x + mu_y)` on `mu_R`.
    pub fn mu_r_lower_bound(&self) -> f64 {
        4.0 * self.mu_x * self.mu_y / (self.mu_x + self.mu_y)
    }

    pub fn rescale_to_canonical(&self) -> JacobiFrame {
        rescale_to_canonical(self)
    }

    pub fn threshold_energy(&self, canonical: bool) -> f64 {
        threshold_energy(self, canonical)
    }
}

fn pair_key(m: &[f64; 4], (p, n): (usize, usize)) -> (f64, f64, f64) {
    (mu(m[p], m[n]), m[p], m[n])
}

/// Picks the pairing with the lowest two-pair threshold (largest
/// `mu_pair1 + mu_pair2`; ties go to pairing A) and orders the pairs.
pub fn build_jacobi(system: &FourBodySystem) -> JacobiFrame {
    let m = system.masses;
    let sum_a = mu(m[0], m[1]) + mu(m[2], m[3]);
    let sum_b = mu(m[0], m[3]) + mu(m[2], m[1]);
    let pairing = if sum_b > sum_a { Pairing::B } else { Pairing::A };

    let [mut first, mut second] = pairing.pairs();
    // Tighter pair first; ties broken on the masses so that the frame does
    // not depend on which pair was listed first.
    let (k1, k2) = (pair_key(&m, first), pair_key(&m, second));
    let swap = k2.partial_cmp(&k1) == Some(std::cmp::Ordering::Greater);
    if swap {
        std::mem::swap(&mut first, &mut second);
    }

    let order = [first.0, first.1, second.0, second.1];
    let mut relabel = [0usize; 4];
    for (ordered, &orig) in order.iter().enumerate() {
        relabel[orig] = ordered;
    }
    let masses = order.map(|i| m[i]);
    let [m1, m2, m3, m4] = masses;
    let (big1, big2) = (m1 + m2, m3 + m4);

    JacobiFrame {
        mu_x: mu(m1, m2),
        mu_y: mu(m3, m4),
        mu_r: big1 * big2 / (big1 + big2),
        a: m2 / big1,
        b: m4 / big2,
        pairing,
        scale: 1.0,
        masses,
        relabel,
    }
}

/// Rescales all masses by `2 / mu_x`, so that `mu_x = 2` and the tight pair
/// has ground energy `-1`.
pub fn rescale_to_canonical(frame: &JacobiFrame) -> JacobiFrame {
    let factor = 2.0 / frame.mu_x;
    JacobiFrame {
        mu_x: 2.0,
        mu_y: frame.mu_y * factor,
        mu_r: frame.mu_r * factor,
        scale: frame.scale * factor,
        masses: frame.masses.map(|m| m * factor),
        ..frame.clone()
    }
}

/// Two-pair dissociation threshold.
///
/// `canonical = true` gives `-1 - mu_y'/2` in the `mu_x = 2` frame; otherwise
/// `-(mu_x + mu_y)/2` in the frame's own mass unit.
pub fn threshold_energy(frame: &JacobiFrame, canonical: bool) -> f64 {
    if canonical {
        let mu_y = frame.mu_y * 2.0 / frame.mu_x;
        -1.0 - mu_y / 2.0
    } else {
        -(frame.mu_x + frame.mu_y) / 2.0
    }
}

/// Proton mass in electron masses, the value used throughout the tests.
pub const PROTON_MASS: f64 = 1836.152672;
/// Muon mass in electron masses.
pub const MUON_MASS: f64 = 206.7682830;

/// Reference systems that show up in tests and examples.
pub mod presets {
    use super::*;

    /// `(p, pbar, e+, e-)`
    pub fn hydrogen_antihydrogen() -> FourBodySystem {
        FourBodySystem::new([PROTON_MASS, PROTON_MASS, 1.0, 1.0])
            .unwrap()
            .with_labels(["p", "pbar", "e+", "e-"].map(String::from))
    }

    /// `(p, mu-, e+, e-)`
    pub fn muonic_molecule() -> FourBodySystem {
        FourBodySystem::new([PROTON_MASS, MUON_MASS, 1.0, 1.0])
            .unwrap()
            .with_labels(["p", "mu-", "e+", "e-"].map(String::from))
    }

    /// Positronium molecule, all masses equal.
    pub fn positronium_molecule() -> FourBodySystem {
        FourBodySystem::new([1.0; 4])
            .unwrap()
            .with_labels(["e+", "e-", "e+", "e-"].map(String::from))
    }
}

#[cfg(test)]
mod tests {
    use super::presets::*;
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn reduced_mass_examples() {
        assert_eq!(reduced_mass(1.0, 1.0).unwrap(), 0.5);
        assert_eq!(
            reduced_mass(PROTON_MASS, PROTON_MASS).unwrap(),
            918.076336
        );
        assert_relative_eq!(
            reduced_mass(PROTON_MASS, 1.0).unwrap(),
            0.999_455_679_424_339_1,
            max_relative = 1e-14
        );
    }

    #[test]
    fn reduced_mass_rejects_bad_input() {
        assert!(reduced_mass(0.0, 1.0).is_err());
        assert!(reduced_mass(-1.0, 1.0).is_err());
        assert!(reduced_mass(f64::NAN, 1.0).is_err());
        assert!(reduced_mass(1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn system_validation() {
        assert!(FourBodySystem::new([1.0, 1.0, 0.0, 1.0]).is_err());
        assert!(FourBodySystem::new([1.0, f64::NAN, 1.0, 1.0]).is_err());
        assert!(FourBodySystem::from_decimal(&["1", "1", "1"]).is_err());
        assert!(FourBodySystem::from_decimal(&["1", "x", "1", "1"]).is_err());
        let s = FourBodySystem::from_decimal(&["1836.152672", "1836.152672", "1", "1"]).unwrap();
        assert_eq!(s.masses()[0], PROTON_MASS);
    }

    #[test]
    fn hydrogen_antihydrogen_frame() {
        let f = hydrogen_antihydrogen().jacobi();
        assert_eq!(f.pairing, Pairing::A);
        assert_eq!(f.mu_x, 918.076336);
        assert_eq!(f.mu_y, 0.5);
        assert_relative_eq!(f.mu_r, 1.998_911_358_848_678, max_relative = 1e-14);
        assert_eq!(f.relabel, [0, 1, 2, 3]);
    }

    #[test]
    fn equal_masses_tie_goes_to_a() {
        let f = positronium_molecule().jacobi();
        assert_eq!(f.pairing, Pairing::A);
        assert_eq!((f.mu_x, f.mu_y, f.mu_r), (0.5, 0.5, 1.0));
        // the sharp bound is attained here
        assert_eq!(f.mu_r, f.mu_r_lower_bound());
    }

    #[test]
    fn muonic_molecule_frame() {
        let f = muonic_molecule().jacobi();
        assert_eq!(f.pairing, Pairing::A);
        assert_relative_eq!(f.mu_x, 185.840_834_607_965_6, max_relative = 1e-13);
        assert_eq!(f.mu_y, 0.5);
        assert_relative_eq!(f.mu_r, 1.998_043_934_172_507, max_relative = 1e-13);
    }

    #[test]
    fn pairing_b_and_pair_ordering() {
        // light pair listed first, heavy pair crossed: (1,4) and (3,2) bind best
        let s = FourBodySystem::new([1.0, 50.0, 50.0, 1.0]).unwrap();
        let f = s.jacobi();
        assert_eq!(f.pairing, Pairing::B);
        // both pairs (1,4)=(1,1) and (3,2)=(50,50): tighter is (3,2)
        assert_eq!(f.mu_x, 25.0);
        assert_eq!(f.mu_y, 0.5);
        assert_eq!(f.relabel, [2, 1, 0, 3]);
        assert_eq!(f.original_of(0), 2);
        assert_eq!(f.masses, [50.0, 50.0, 1.0, 1.0]);
    }

    #[test]
    fn rescale_examples() {
        let f = FourBodySystem::new([4.0, 4.0, 1.0, 1.0]).unwrap().jacobi();
        assert_eq!(f.mu_x, 2.0);
        let c = f.rescale_to_canonical();
        assert_eq!(c, JacobiFrame { scale: 1.0, ..f.clone() });

        let f = positronium_molecule().jacobi();
        let c = f.rescale_to_canonical();
        assert_eq!(c.scale, 4.0);
        assert_eq!(c.mu_x, 2.0);
        assert_eq!(c.ratio_x(), f.ratio_x());

        let c = hydrogen_antihydrogen().jacobi().rescale_to_canonical();
        assert_relative_eq!(c.scale, 0.002_178_468_087_647_126, max_relative = 1e-13);
        assert_relative_eq!(c.mu_r, 0.004_354_564_605_287_197, max_relative = 1e-13);
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(positronium_molecule().jacobi().threshold_energy(false), -0.5);
        assert_relative_eq!(
            hydrogen_antihydrogen().jacobi().threshold_energy(false),
            -459.288168,
            max_relative = 1e-14
        );
        let canon = positronium_molecule().jacobi().rescale_to_canonical();
        assert_eq!(canon.mu_y, 2.0);
        assert_eq!(canon.threshold_energy(true), -2.0);
        assert_eq!(canon.threshold_energy(false), -2.0);
    }
}
