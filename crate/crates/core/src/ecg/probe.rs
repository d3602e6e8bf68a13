use serde::{Deserialize, Serialize};

use super::coords::CoulombSystem;
use super::svm::{svm_grow, SvmConfig};
use crate::criterion::{classify, Classification};
use crate::error::{Error, Result};
use crate::system::FourBodySystem;

/// `max(1e-6 |E_th|, 5e-5)`
pub fn certification_epsilon(threshold: f64) -> f64 {
    (1e-6 * threshold.abs()).max(5e-5)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeBudget {
    pub basis_size: usize,
    pub pool: usize,
    pub seeds: Vec<u64>,
    pub refine_sweeps: usize,
    pub condition_cap: f64,
}

impl Default for ProbeBudget {
    fn default() -> Self {
        Self {
            basis_size: 200,
            pool: 200,
            seeds: vec![42],
            refine_sweeps: 0,
            condition_cap: 1e12,
        }
    }
}

impl ProbeBudget {
    fn config(&self, seed: u64) -> SvmConfig {
        SvmConfig {
            target: self.basis_size,
            pool: self.pool,
            seed,
            condition_cap: self.condition_cap,
            refine_sweeps: self.refine_sweeps,
            ..SvmConfig::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityProbe {
    pub e0: f64,
    pub threshold: f64,
    pub epsilon: f64,
    /// `e0 < threshold - epsilon`
    pub certified_bound: bool,
    /// `threshold - e0`
    pub margin: f64,
    pub classification: Classification,
    pub basis_size: usize,
    pub condition: f64,
    pub seed: u64,
}

/// Best variational bound over the budget's seeds. A certified bound for a
/// system the criterion proves unstable is an inconsistency error.
pub fn stability_probe(system: &FourBodySystem, budget: &ProbeBudget) -> Result<StabilityProbe> {
    if budget.seeds.is_empty() {
        return Err(Error::Input("probe budget needs at least one seed".into()));
    }
    let coulomb = CoulombSystem::from_four_body(system);
    let mut best: Option<(u64, super::svm::SpectralResult)> = None;
    for &seed in &budget.seeds {
        let out = svm_grow(&coulomb, &budget.config(seed))?;
        if best.as_ref().is_none_or(|(_, r)| out.result.e0 < r.e0) {
            best = Some((seed, out.result));
        }
    }
    let (seed, result) = best.expect("at least one seed");
    let epsilon = certification_epsilon(result.threshold);
    let certified_bound = result.e0 < result.threshold - epsilon;
    let classification = classify(system).classification;
    if certified_bound && classification == Classification::ProvenUnstable {
        return Err(Error::Inconsistency(format!(
            "variational energy {} lies below threshold {} - {epsilon} for a system proven unstable",
            result.e0, result.threshold
        )));
    }
    Ok(StabilityProbe {
        e0: result.e0,
        threshold: result.threshold,
        epsilon,
        certified_bound,
        margin: result.margin,
        classification,
        basis_size: result.basis_size,
        condition: result.condition,
        seed,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MassFamily {
    /// `(m, m, 1, 1)`: heavy pair of opposite charges plus a light pair.
    Symmetric,
    /// `(m1, 1, m3, 1)`: two heavy positive charges.
    TwoParameter,
}

impl MassFamily {
    pub fn masses(self, point: (f64, f64)) -> [f64; 4] {
        match self {
            Self::Symmetric => [point.0, point.0, 1.0, 1.0],
            Self::TwoParameter => [point.0, 1.0, point.1, 1.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub masses: [f64; 4],
    pub ratio: Option<f64>,
    pub classification: Option<Classification>,
    pub e0: Option<f64>,
    pub threshold: Option<f64>,
    pub margin: Option<f64>,
    pub certified_bound: Option<bool>,
    pub error: Option<String>,
}

/// Verdict and solver margin at every grid point; per-point failures are
/// recorded and the scan continues. With `budget == None` only the
/// criterion is evaluated.
pub fn mass_ratio_scan(family: MassFamily, grid: &[(f64, f64)], budget: Option<&ProbeBudget>) -> Vec<ScanPoint> {
    grid.iter()
        .map(|&point| {
            let masses = family.masses(point);
            let mut row = ScanPoint {
                masses,
                ratio: None,
                classification: None,
                e0: None,
                threshold: None,
                margin: None,
                certified_bound: None,
                error: None,
            };
            let system = match FourBodySystem::new(masses) {
                Ok(s) => s,
                Err(e) => {
                    row.error = Some(e.to_string());
                    return row;
                }
            };
            let verdict = classify(&system);
            row.ratio = Some(verdict.ratio);
            row.classification = Some(verdict.classification);
            if let Some(budget) = budget {
                match stability_probe(&system, budget) {
                    Ok(p) => {
                        row.e0 = Some(p.e0);
                        row.threshold = Some(p.threshold);
                        row.margin = Some(p.margin);
                        row.certified_bound = Some(p.certified_bound);
                    }
                    Err(e) => row.error = Some(e.to_string()),
                }
            }
            row
        })
        .collect()
}

pub fn scan_csv(rows: &[ScanPoint]) -> String {
    use crate::report::fmt_sig15;
    let opt = |v: Option<f64>| v.map(fmt_sig15).unwrap_or_default();
    let mut out = String::from("m1,m2,m3,m4,ratio,verdict,e0,threshold,margin,certified_bound,error\n");
    for r in rows {
        let verdict = match r.classification {
            Some(Classification::ProvenUnstable) => "proven_unstable",
            Some(Classification::Indeterminate) => "indeterminate",
            None => "",
        };
        let error = r.error.as_deref().unwrap_or("").replace([',', '\n'], ";");
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            fmt_sig15(r.masses[0]),
            fmt_sig15(r.masses[1]),
            fmt_sig15(r.masses[2]),
            fmt_sig15(r.masses[3]),
            opt(r.ratio),
            verdict,
            opt(r.e0),
            opt(r.threshold),
            opt(r.margin),
            r.certified_bound.map(|b| b.to_string()).unwrap_or_default(),
            error
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn epsilon_floor() {
        assert_eq!(certification_epsilon(-0.5), 5e-5);
        assert_relative_eq!(certification_epsilon(-459.0), 4.59e-4, max_relative = 1e-12);
    }

    #[test]
    fn symmetric_family_ratio_column() {
        let grid: Vec<(f64, f64)> = [1.0, 2.0, 5.0, 10.0, 100.0, 1836.152672]
            .iter()
            .map(|&m| (m, 0.0))
            .collect();
        let rows = mass_ratio_scan(MassFamily::Symmetric, &grid, None);
        assert_eq!(rows.len(), 6);
        for (row, &(m, _)) in rows.iter().zip(&grid) {
            assert_relative_eq!(row.ratio.unwrap(), 4.0 / (m + 1.0), max_relative = 1e-12);
        }
        assert!(rows.windows(2).all(|w| w[1].ratio < w[0].ratio));
        assert_eq!(rows[0].classification, Some(Classification::Indeterminate));
        assert_eq!(rows[5].classification, Some(Classification::ProvenUnstable));
        let csv = scan_csv(&rows);
        assert_eq!(csv.lines().count(), 7);
    }

    #[test]
    fn scan_records_errors_and_continues() {
        let rows = mass_ratio_scan(MassFamily::TwoParameter, &[(-1.0, 1.0), (1.0, 1.0)], None);
        assert!(rows[0].error.is_some());
        assert!(rows[1].error.is_none());
    }

    #[test]
    fn small_probe_on_muonic_molecule() {
        let budget = ProbeBudget {
            basis_size: 25,
            pool: 10,
            ..ProbeBudget::default()
        };
        let p = stability_probe(&crate::system::presets::muonic_molecule(), &budget).unwrap();
        assert!(!p.certified_bound);
        assert_eq!(p.classification, Classification::ProvenUnstable);
    }
}
