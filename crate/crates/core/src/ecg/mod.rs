//! Variational upper bounds with explicitly correlated Gaussians.
//!
//! Basis functions are `exp(-xi^T A xi)` over relative coordinates `xi`
//! (L = 0, no permutation symmetry: particles are distinguishable, which
//! still bounds the physical ground energy from above for the systems
//! studied). The basis grows stochastically: at every step the candidate
//! from a random pool that lowers the energy most is kept. A variational
//! energy below the threshold certifies binding; nothing certifies the
//! opposite.

mod coords;
mod element;
mod probe;
mod svm;

pub use coords::{CoulombSystem, JacobiCoordinates};
pub use element::{matrix_elements, GaussianBasisElement, MatrixElements, Provenance};
pub use probe::{
    certification_epsilon, mass_ratio_scan, scan_csv, stability_probe, MassFamily, ProbeBudget,
    ScanPoint, StabilityProbe,
};
pub use svm::{svm_grow, BasisFile, GaussianBasis, GrowthOutcome, SpectralResult, SvmConfig};
