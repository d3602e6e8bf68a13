//! The instability criterion `mu_R <= (13 - 2 sqrt 22) / 54 * mu_x`.
//!
//! The constant is the root of `3 mu_R C(mu_R) = 1` in the `mu_x = 2` frame,
//! where `C(mu_R) = 1 + 1 / (sqrt(3 / (8 mu_R)) - 1)` (see
//! [`chain::chain_coefficient`]). Writing `s = sqrt(3 / (8 mu_R))` turns the
//! condition into `8 s^2 - 8 s - 9 = 0`, so `s = (2 + sqrt 22) / 4` and
//! `mu_R = (13 - 2 sqrt 22) / 27`. The rounded `0.067` is only a display
//! value; classification uses the closed form.

use serde::{Deserialize, Serialize};

use crate::chain;
use crate::error::{Error, Result};
use crate::system::{FourBodySystem, JacobiFrame};

/// `(13 - 2 sqrt 22) / 54 = 0.0670216385...`
pub fn critical_ratio() -> f64 {
    (13.0 - 2.0 * 22f64.sqrt()) / 54.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalConstant {
    /// Bound on `mu_R / mu_x`.
    pub exact: f64,
    /// Bound on `mu_R` when `mu_x = 2`.
    pub canonical_boundary: f64,
}

impl CriticalConstant {
    pub fn get() -> Self {
        let exact = critical_ratio();
        Self {
            exact,
            canonical_boundary: 2.0 * exact,
        }
    }
}

/// Relative slack on `3 mu_R C(mu_R) <= 1`, a few ulps, so that the boundary
/// itself (computed in floating point) still counts as satisfied.
const SCALAR_CONDITION_SLACK: f64 = 8.0 * f64::EPSILON;

/// `3 mu_R C(mu_R) <= 1` in `mu_x = 2` units, for `0 < mu_R < 3/8`.
pub fn solve_scalar_condition(mu_r_canonical: f64) -> Result<bool> {
    let c = chain::chain_coefficient(mu_r_canonical)?;
    Ok(3.0 * mu_r_canonical * c <= 1.0 + SCALAR_CONDITION_SLACK)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    /// No bound state below or at the two-pair threshold.
    ProvenUnstable,
    /// The criterion says nothing. This is not a claim of stability.
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub classification: Classification,
    /// `mu_R / mu_x`
    pub ratio: f64,
    pub critical: f64,
    /// `critical - ratio`; nonnegative exactly when proven unstable.
    pub margin: f64,
    pub frame: JacobiFrame,
}

impl Verdict {
    pub fn is_proven_unstable(&self) -> bool {
        self.classification == Classification::ProvenUnstable
    }
}

pub fn classify(system: &FourBodySystem) -> Verdict {
    classify_frame(system.jacobi())
}

pub fn classify_frame(frame: JacobiFrame) -> Verdict {
    let ratio = frame.ratio_x();
    let critical = critical_ratio();
    let classification = if ratio <= critical {
        Classification::ProvenUnstable
    } else {
        Classification::Indeterminate
    };
    Verdict {
        classification,
        ratio,
        critical,
        margin: critical - ratio,
        frame,
    }
}

/// Same decision reached through the scalar condition in the canonical frame.
/// Returns `Indeterminate` where the chain coefficient is undefined.
pub fn classify_via_scalar_condition(system: &FourBodySystem) -> Classification {
    let canon = system.jacobi().rescale_to_canonical();
    match solve_scalar_condition(canon.mu_r) {
        Ok(true) => Classification::ProvenUnstable,
        Ok(false) | Err(Error::Domain(_)) => Classification::Indeterminate,
        Err(e) => unreachable!("scalar condition only fails on domain: {e}"),
    }
}
