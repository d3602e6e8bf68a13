use std::path::Path;

use fourbody::chain::{run_chain_suite, ChainSuiteConfig};
use fourbody::ecg::{mass_ratio_scan, scan_csv, stability_probe, MassFamily, ProbeBudget};
use fourbody::effpot::{stratified_points, InteractionDecomposition};
use fourbody::quadrature::SphericalRule;
use fourbody::report::fmt_sig15;
use fourbody::twocenter::{self, monotonicity_violation, separation_scan, BasisSpec};
use fourbody::{classify, Classification, FourBodySystem};
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::error::CliError;
use crate::input::SystemFile;
use crate::output::{csv_report, json_report};

/// Rendered report plus the exit code the command asks for.
pub struct Outcome {
    pub text: String,
    pub exit: u8,
}

fn single_report(cfg: &RunConfig, command: &str) -> Result<(), CliError> {
    match cfg.format {
        Some(Format::Csv) => Err(CliError::Input(format!("{command} writes a JSON report; csv is not available"))),
        _ => Ok(()),
    }
}

fn load(path: &Path) -> Result<(SystemFile, FourBodySystem), CliError> {
    let file = SystemFile::load(path)?;
    let system = file.system()?;
    Ok((file, system))
}

fn verdict_code(c: Classification) -> u8 {
    match c {
        Classification::ProvenUnstable => 0,
        Classification::Indeterminate => 1,
    }
}

#[derive(Serialize)]
struct CriterionResult {
    mu_x: f64,
    mu_y: f64,
    mu_r: f64,
    a: f64,
    b: f64,
    ratio: f64,
    critical: f64,
    verdict: Classification,
    margin: f64,
    pairing: fourbody::Pairing,
    /// Masses in the ordered labeling (tight pair first).
    ordered_masses: [f64; 4],
    threshold: f64,
}

/// Exit 0 for proven unstable, 1 for indeterminate.
pub fn criterion(cfg: &RunConfig, system: &Path) -> Result<Outcome, CliError> {
    single_report(cfg, "criterion")?;
    let (file, system) = load(system)?;
    let v = classify(&system);
    let f = &v.frame;
    let result = CriterionResult {
        mu_x: f.mu_x,
        mu_y: f.mu_y,
        mu_r: f.mu_r,
        a: f.a,
        b: f.b,
        ratio: v.ratio,
        critical: v.critical,
        verdict: v.classification,
        margin: v.margin,
        pairing: f.pairing,
        ordered_masses: f.masses,
        threshold: f.threshold_energy(false),
    };
    Ok(Outcome {
        text: json_report("criterion", cfg, &file, &result),
        exit: verdict_code(v.classification),
    })
}

#[derive(Serialize)]
struct ChainInput {
    /// Canonical (`mu_x = 2`) inter-pair reduced mass.
    mu_r: f64,
    system: Option<SystemFile>,
    samples: usize,
    grid_points: usize,
}

/// Exit 0 iff every check passes, 1 otherwise.
pub fn chain(
    cfg: &RunConfig,
    mu_r: Option<f64>,
    system: Option<&Path>,
    samples: usize,
    grid_points: usize,
) -> Result<Outcome, CliError> {
    let (mu_r, file) = match (mu_r, system) {
        (Some(m), None) => (m, None),
        (None, Some(path)) => {
            let (file, system) = load(path)?;
            (system.jacobi().rescale_to_canonical().mu_r, Some(file))
        }
        _ => return Err(CliError::Input("chain needs exactly one of --mu-r or --system".into())),
    };
    let suite = ChainSuiteConfig {
        seed: cfg.seed,
        samples,
        grid_points,
    };
    let report = run_chain_suite(mu_r, &suite)?;
    let exit = u8::from(!report.all_passed);
    let input = ChainInput {
        mu_r,
        system: file,
        samples,
        grid_points,
    };
    let text = match cfg.format {
        Some(Format::Csv) => {
            let mut table = String::from("name,kind,residual,tolerance,passed\n");
            for r in &report.records {
                let kind = match r.kind {
                    fourbody::report::CheckKind::Identity => "identity",
                    fourbody::report::CheckKind::Inequality => "inequality",
                };
                table.push_str(&format!(
                    "{},{kind},{},{},{}\n",
                    r.name,
                    fmt_sig15(r.residual),
                    fmt_sig15(r.tolerance),
                    r.passed
                ));
            }
            csv_report("chain", cfg, &input, &table)
        }
        _ => json_report("chain", cfg, &input, &report),
    };
    Ok(Outcome { text, exit })
}

#[derive(Serialize)]
struct VeffInput {
    system: SystemFile,
    a: f64,
    b: f64,
    samples: usize,
}

#[derive(Serialize)]
struct VeffRow {
    y: [f64; 3],
    r: [f64; 3],
    veff1: f64,
    error1: f64,
    envelope1: f64,
    residual1: f64,
    veff2: f64,
    error2: f64,
    envelope2: f64,
    residual2: f64,
}

/// Split effective potentials against their `3/16` envelopes at stratified
/// `(y, R)` points.
pub fn veff(cfg: &RunConfig, system: &Path, samples: usize) -> Result<Outcome, CliError> {
    let (file, system) = load(system)?;
    let dec = InteractionDecomposition::from_frame(&system.jacobi());
    let rule = SphericalRule::with_tol(cfg.tol);
    let rows = stratified_points(&dec, samples, cfg.seed)
        .into_iter()
        .map(|(y, r)| {
            let c = dec.veff_bound_check(y, r, &rule)?;
            Ok(VeffRow {
                y,
                r,
                veff1: c.veff1,
                error1: c.error1,
                envelope1: c.envelope1,
                residual1: c.residual1,
                veff2: c.veff2,
                error2: c.error2,
                envelope2: c.envelope2,
                residual2: c.residual2,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let input = VeffInput {
        system: file,
        a: dec.a,
        b: dec.b,
        samples,
    };
    let text = match cfg.format {
        Some(Format::Json) => json_report("veff", cfg, &input, &rows),
        _ => {
            let mut table = String::from(
                "y_x,y_y,y_z,r_x,r_y,r_z,veff1,error1,envelope1,residual1,veff2,error2,envelope2,residual2\n",
            );
            for row in &rows {
                let tail = [
                    row.veff1,
                    row.error1,
                    row.envelope1,
                    row.residual1,
                    row.veff2,
                    row.error2,
                    row.envelope2,
                    row.residual2,
                ];
                let values = row.y.iter().chain(&row.r).chain(&tail);
                let cells: Vec<String> = values.map(|v| fmt_sig15(*v)).collect();
                table.push_str(&cells.join(","));
                table.push('\n');
            }
            csv_report("veff", cfg, &input, &table)
        }
    };
    Ok(Outcome { text, exit: 0 })
}

#[derive(Serialize)]
struct TwoCenterInput {
    coupling: f64,
    mu_r: f64,
    separations: Vec<f64>,
    basis: BasisSpec,
}

#[derive(Serialize)]
struct TwoCenterResult {
    floor: f64,
    separated_limit: f64,
    /// Largest energy drop between neighbouring separations.
    monotonicity_violation: f64,
    rows: Vec<twocenter::ScanRow>,
}

pub fn two_center(
    cfg: &RunConfig,
    coupling: f64,
    mu_r: f64,
    separations: Vec<f64>,
    basis_count: usize,
) -> Result<Outcome, CliError> {
    let basis = BasisSpec::with_count(basis_count);
    let problem = twocenter::TwoCenterProblem::new(coupling, mu_r, 0.0)?;
    let mut sorted = separations.clone();
    sorted.sort_by(f64::total_cmp);
    let rows = separation_scan(coupling, mu_r, &sorted, &basis)?;
    let input = TwoCenterInput {
        coupling,
        mu_r,
        separations: sorted,
        basis,
    };
    let text = match cfg.format {
        Some(Format::Json) => {
            let result = TwoCenterResult {
                floor: problem.floor(),
                separated_limit: problem.separated_limit(),
                monotonicity_violation: if rows.len() > 1 { monotonicity_violation(&rows) } else { 0.0 },
                rows,
            };
            json_report("twocenter", cfg, &input, &result)
        }
        _ => csv_report("twocenter", cfg, &input, &twocenter::scan_csv(&rows)),
    };
    Ok(Outcome { text, exit: 0 })
}

fn budget(cfg: &RunConfig) -> ProbeBudget {
    ProbeBudget {
        basis_size: cfg.budget,
        pool: cfg.pool,
        seeds: vec![cfg.seed],
        refine_sweeps: cfg.refine_sweeps,
        condition_cap: cfg.condition_cap,
    }
}

pub fn solve(cfg: &RunConfig, system: &Path) -> Result<Outcome, CliError> {
    single_report(cfg, "solve")?;
    let (file, system) = load(system)?;
    let probe = stability_probe(&system, &budget(cfg))?;
    Ok(Outcome {
        text: json_report("solve", cfg, &file, &probe),
        exit: 0,
    })
}

#[derive(Serialize)]
struct MapInput {
    family: MassFamily,
    grid: Vec<(f64, f64)>,
    probe: bool,
}

/// Parses `m,m,...` for the symmetric family and `m1:m3,...` for the
/// two-parameter one.
pub fn parse_grid(family: MassFamily, text: &str) -> Result<Vec<(f64, f64)>, CliError> {
    let number = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|e| CliError::Input(format!("grid value {s:?}: {e}")))
    };
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|item| match family {
            MassFamily::Symmetric => Ok((number(item)?, 0.0)),
            MassFamily::TwoParameter => {
                let (m1, m3) = item
                    .split_once(':')
                    .ok_or_else(|| CliError::Input(format!("two-parameter grid point {item:?} is not m1:m3")))?;
                Ok((number(m1)?, number(m3)?))
            }
        })
        .collect()
}

/// Per-point failures are recorded in the rows; the command still exits 0.
pub fn map(cfg: &RunConfig, family: MassFamily, grid: &str, probe: bool) -> Result<Outcome, CliError> {
    let grid = parse_grid(family, grid)?;
    let budget = budget(cfg);
    let rows = mass_ratio_scan(family, &grid, probe.then_some(&budget));
    let input = MapInput { family, grid, probe };
    let text = match cfg.format {
        Some(Format::Json) => json_report("map", cfg, &input, &rows),
        _ => csv_report("map", cfg, &input, &scan_csv(&rows)),
    };
    Ok(Outcome { text, exit: 0 })
}
