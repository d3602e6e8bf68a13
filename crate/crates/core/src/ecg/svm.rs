use nalgebra::{DMatrix, DVector, Matrix3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::coords::{CoulombSystem, JacobiCoordinates};
use super::element::{overlap_and_hamiltonian, GaussianBasisElement, Provenance};
use crate::error::{Error, Result};
use crate::linalg::{generalized_spectrum, Orthogonalization, Spectrum};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvmConfig {
    pub target: usize,
    /// Candidates per growth step.
    pub pool: usize,
    pub seed: u64,
    pub condition_cap: f64,
    /// Passes that try to replace every element by a better candidate, drawn
    /// afresh or as a local perturbation of the element.
    pub refine_sweeps: usize,
    /// Pair length scales are drawn log-uniformly from `[lo, hi] / mu_pair`.
    pub width_range: (f64, f64),
    /// Fresh pools tried before a growth step gives up.
    pub stall_retries: usize,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self {
            target: 50,
            pool: 200,
            seed: 42,
            condition_cap: 1e12,
            refine_sweeps: 0,
            width_range: (1e-2, 1e2),
            stall_retries: 5,
        }
    }
}

impl SvmConfig {
    fn validate(&self) -> Result<()> {
        if self.target == 0 || self.pool == 0 {
            return Err(Error::Input("target and pool must be at least 1".into()));
        }
        let (lo, hi) = self.width_range;
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
            return Err(Error::Input(format!("invalid width range [{lo}, {hi}]")));
        }
        if !(self.condition_cap > 1.0) {
            return Err(Error::Input("condition cap must exceed 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralResult {
    /// Variational upper bound on the ground energy.
    pub e0: f64,
    pub basis_size: usize,
    pub condition: f64,
    pub threshold: f64,
    /// `threshold - e0`, positive when the bound lies below threshold.
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianBasis {
    pub system: CoulombSystem,
    pub seed: u64,
    pub elements: Vec<GaussianBasisElement>,
    /// Energy after every accepted growth step or replacement.
    pub trace: Vec<f64>,
}

/// Serialized basis: matrices row-major, floats in shortest round-trip form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisFile {
    pub masses: Vec<f64>,
    pub charges: Vec<f64>,
    pub seed: u64,
    pub dim: usize,
    pub matrices: Vec<Vec<f64>>,
    pub provenance: Vec<Provenance>,
    pub e0_trace: Vec<f64>,
}

impl GaussianBasis {
    pub fn evaluate(&self, condition_cap: f64) -> Result<SpectralResult> {
        let coords = JacobiCoordinates::new(&self.system);
        let (s, h) = build_matrices(&self.elements, &coords)?;
        let sp = generalized_spectrum(&h, &s, Orthogonalization::Strict { cap: condition_cap })?;
        let threshold = self.system.threshold();
        Ok(SpectralResult {
            e0: sp.values[0],
            basis_size: self.elements.len(),
            condition: sp.condition,
            threshold,
            margin: threshold - sp.values[0],
        })
    }

    pub fn to_file(&self) -> BasisFile {
        BasisFile {
            masses: self.system.masses().to_vec(),
            charges: self.system.charges().to_vec(),
            seed: self.seed,
            dim: self.system.len() - 1,
            matrices: self.elements.iter().map(|e| e.row_major()).collect(),
            provenance: self.elements.iter().map(|e| e.provenance).collect(),
            e0_trace: self.trace.clone(),
        }
    }

    pub fn from_file(file: &BasisFile) -> Result<Self> {
        let system = CoulombSystem::new(file.masses.clone(), file.charges.clone())?;
        if file.dim + 1 != system.len() || file.matrices.len() != file.provenance.len() {
            return Err(Error::Input("basis file is inconsistent".into()));
        }
        let elements = file
            .matrices
            .iter()
            .zip(&file.provenance)
            .map(|(m, &p)| GaussianBasisElement::new(file.dim, m, p))
            .collect::<Result<_>>()?;
        Ok(Self {
            system,
            seed: file.seed,
            elements,
            trace: file.e0_trace.clone(),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(text)?)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthOutcome {
    pub basis: GaussianBasis,
    pub result: SpectralResult,
    /// Growth stopped early because no candidate was admissible.
    pub stalled: bool,
    pub warnings: Vec<String>,
}

fn build_matrices(
    elements: &[GaussianBasisElement],
    coords: &JacobiCoordinates,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let n = elements.len();
    let mut s = DMatrix::zeros(n, n);
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let (sij, hij) = overlap_and_hamiltonian(&elements[i], &elements[j], coords)?;
            s[(i, j)] = sij;
            s[(j, i)] = sij;
            h[(i, j)] = hij;
            h[(j, i)] = hij;
        }
    }
    Ok((s, h))
}

/// Lowest root of the arrow matrix `[[diag(e), b], [b^T, c]]`.
fn arrow_lowest(e: &[f64], b: &[f64], c: f64) -> f64 {
    let top = e.first().copied().unwrap_or(f64::INFINITY).min(c);
    let bnorm = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (mut lo, mut hi) = (top - bnorm - 1e-300, top);
    // g increases on (-inf, e_0)
    let g = |l: f64| l - c + e.iter().zip(b).map(|(ek, bk)| bk * bk / (ek - l)).sum::<f64>();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Accepted basis with its matrices and spectrum.
struct Workspace {
    coords: JacobiCoordinates,
    elements: Vec<GaussianBasisElement>,
    s: DMatrix<f64>,
    h: DMatrix<f64>,
    spectrum: Option<Spectrum>,
    cap: f64,
}

struct Scored {
    energy: f64,
    element: GaussianBasisElement,
}

impl Workspace {
    fn new(coords: JacobiCoordinates, cap: f64) -> Self {
        Self {
            coords,
            elements: Vec::new(),
            s: DMatrix::zeros(0, 0),
            h: DMatrix::zeros(0, 0),
            spectrum: None,
            cap,
        }
    }

    fn energy(&self) -> f64 {
        self.spectrum.as_ref().map_or(f64::INFINITY, |sp| sp.values[0])
    }

    /// Energy of the basis plus `cand`, from the bordered secular equation.
    /// `None` when the candidate is numerically dependent on the basis.
    fn bordered(&self, cand: &GaussianBasisElement) -> Option<f64> {
        let (s0, h0) = overlap_and_hamiltonian(cand, cand, &self.coords).ok()?;
        let Some(sp) = &self.spectrum else {
            return Some(h0 / s0);
        };
        let n = self.elements.len();
        let mut sv = DVector::zeros(n);
        let mut hv = DVector::zeros(n);
        for (k, e) in self.elements.iter().enumerate() {
            let (s, h) = overlap_and_hamiltonian(e, cand, &self.coords).ok()?;
            sv[k] = s;
            hv[k] = h;
        }
        let st = sp.vectors.tr_mul(&sv);
        let ht = sp.vectors.tr_mul(&hv);
        let d2 = s0 - st.norm_squared();
        if !(d2 > (n as f64 + 1.0) / self.cap) {
            return None;
        }
        let d = d2.sqrt();
        let m = sp.values.len();
        let b: Vec<f64> = (0..m).map(|k| (ht[k] - sp.values[k] * st[k]) / d).collect();
        let cross: f64 = (0..m).map(|k| st[k] * ht[k]).sum();
        let quad: f64 = (0..m).map(|k| sp.values[k] * st[k] * st[k]).sum();
        let c = (h0 - 2.0 * cross + quad) / d2;
        Some(arrow_lowest(&sp.values, &b, c))
    }

    /// Matrices with `cand` at position `slot` (appended when `slot == n`).
    fn matrices_with(&self, cand: &GaussianBasisElement, slot: usize) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let n = self.elements.len();
        let size = if slot == n { n + 1 } else { n };
        let mut s = DMatrix::zeros(size, size);
        let mut h = DMatrix::zeros(size, size);
        s.view_mut((0, 0), (n, n)).copy_from(&self.s);
        h.view_mut((0, 0), (n, n)).copy_from(&self.h);
        for k in 0..size {
            let other = if k == slot { cand } else { &self.elements[k] };
            let (sk, hk) = overlap_and_hamiltonian(other, cand, &self.coords)?;
            s[(k, slot)] = sk;
            s[(slot, k)] = sk;
            h[(k, slot)] = hk;
            h[(slot, k)] = hk;
        }
        Ok((s, h))
    }

    /// Installs `cand` at `slot` when the full solve passes the condition
    /// cap and does not raise the energy.
    fn try_install(&mut self, cand: GaussianBasisElement, slot: usize, reference: f64) -> bool {
        let Ok((s, h)) = self.matrices_with(&cand, slot) else {
            return false;
        };
        let Ok(sp) = generalized_spectrum(&h, &s, Orthogonalization::Strict { cap: self.cap }) else {
            return false;
        };
        if !(sp.values[0] <= reference) {
            return false;
        }
        if slot == self.elements.len() {
            self.elements.push(cand);
        } else {
            self.elements[slot] = cand;
        }
        self.s = s;
        self.h = h;
        self.spectrum = Some(sp);
        true
    }

    fn without(&self, slot: usize) -> Result<Workspace> {
        let keep: Vec<usize> = (0..self.elements.len()).filter(|&k| k != slot).collect();
        let s = self.s.select_rows(&keep).select_columns(&keep);
        let h = self.h.select_rows(&keep).select_columns(&keep);
        let spectrum = if keep.is_empty() {
            None
        } else {
            Some(generalized_spectrum(&h, &s, Orthogonalization::Strict { cap: self.cap })?)
        };
        Ok(Workspace {
            coords: self.coords.clone(),
            elements: keep.iter().map(|&k| self.elements[k].clone()).collect(),
            s,
            h,
            spectrum,
            cap: self.cap,
        })
    }
}

fn candidate(
    coords: &JacobiCoordinates,
    cfg: &SvmConfig,
    stream: u64,
    step: u64,
) -> Result<GaussianBasisElement> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    let (lo, hi) = (cfg.width_range.0.log10(), cfg.width_range.1.log10());
    let alphas: Vec<f64> = coords
        .pair_mu
        .iter()
        .map(|mu| {
            let b = 10f64.powf(if hi > lo { rng.random_range(lo..hi) } else { lo }) / mu;
            1.0 / (b * b)
        })
        .collect();
    GaussianBasisElement::from_pair_form(coords, &alphas, Provenance { seed: cfg.seed, step })
}

/// Local move around `base`: `A -> G^T A G` with `G` a random matrix near
/// the identity.
fn perturbation(
    base: &GaussianBasisElement,
    cfg: &SvmConfig,
    stream: u64,
    step: u64,
    sigma: f64,
) -> Result<GaussianBasisElement> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    let mut g = Matrix3::identity();
    for i in 0..base.dim() {
        for j in 0..base.dim() {
            g[(i, j)] += sigma * rng.sample::<f64, _>(StandardNormal);
        }
    }
    base.congruent(&g, Provenance { seed: cfg.seed, step })
}

/// Candidates scored against `ws`, best first; ties keep generation order.
fn score(ws: &Workspace, candidates: impl Iterator<Item = GaussianBasisElement>) -> Vec<Scored> {
    let mut scored: Vec<Scored> = candidates
        .filter_map(|element| {
            let energy = ws.bordered(&element)?;
            energy.is_finite().then_some(Scored { energy, element })
        })
        .collect();
    scored.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    scored
}

const REFINE_STREAMS: u64 = 1 << 48;

/// Grows a basis to `cfg.target` elements, then runs the refinement
/// sweeps. Reproducible from the seed.
pub fn svm_grow(system: &CoulombSystem, cfg: &SvmConfig) -> Result<GrowthOutcome> {
    cfg.validate()?;
    let coords = JacobiCoordinates::new(system);
    let mut ws = Workspace::new(coords, cfg.condition_cap);
    let mut trace = Vec::new();
    let mut warnings = Vec::new();
    let mut stalled = false;
    let mut stream = 0u64;

    'grow: for step in 0..cfg.target as u64 {
        for _ in 0..=cfg.stall_retries {
            let pool = (0..cfg.pool as u64).filter_map(|i| candidate(&ws.coords, cfg, stream + i, step).ok());
            let scored = score(&ws, pool);
            stream += cfg.pool as u64;
            let reference = ws.energy();
            let slot = ws.elements.len();
            for cand in scored {
                if ws.try_install(cand.element, slot, reference) {
                    trace.push(ws.energy());
                    continue 'grow;
                }
            }
        }
        stalled = true;
        warnings.push(format!(
            "growth stalled at {} elements: no admissible candidate in {} pools",
            ws.elements.len(),
            cfg.stall_retries + 1
        ));
        break;
    }
    if ws.elements.is_empty() {
        return Err(Error::Numerical("no admissible basis element found".into()));
    }

    let mut refine_stream = REFINE_STREAMS;
    for sweep in 0..cfg.refine_sweeps {
        for slot in 0..ws.elements.len() {
            let reduced = ws.without(slot)?;
            let step = (sweep * ws.elements.len() + slot) as u64;
            let sigma = (0.3 * 0.7f64.powi(sweep as i32)).max(0.02);
            let base = &ws.elements[slot];
            let fresh = (0..cfg.pool as u64).filter_map(|i| candidate(&ws.coords, cfg, refine_stream + i, step).ok());
            let local = (0..cfg.pool as u64)
                .filter_map(|i| perturbation(base, cfg, refine_stream + cfg.pool as u64 + i, step, sigma).ok());
            let scored = score(&reduced, fresh.chain(local));
            refine_stream += 2 * cfg.pool as u64;
            let current = ws.energy();
            if let Some(best) = scored.into_iter().next() {
                if best.energy < current && ws.try_install(best.element, slot, current) {
                    trace.push(ws.energy());
                }
            }
        }
    }

    let sp = ws.spectrum.as_ref().expect("nonempty basis has a spectrum");
    let threshold = system.threshold();
    let result = SpectralResult {
        e0: sp.values[0],
        basis_size: ws.elements.len(),
        condition: sp.condition,
        threshold,
        margin: threshold - sp.values[0],
    };
    Ok(GrowthOutcome {
        basis: GaussianBasis {
            system: system.clone(),
            seed: cfg.seed,
            elements: ws.elements,
            trace,
        },
        result,
        stalled,
        warnings,
    })
}
