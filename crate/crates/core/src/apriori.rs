//! *A priori* evaluation: correlation and regression of modeled SGS terms
//! against the exact terms of a filtered DNS field.
//!
//! For truth `a` and model `b`, with primes denoting mean removal,
//! `ρ = ⟨a′b′⟩ / (σ_a σ_b)` and `R = ⟨a′b′⟩ / ⟨b′b′⟩`, the least-squares
//! slope of `truth ≈ R · model`.

use std::collections::BTreeMap;
use std::io::Write;

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ScalarField, SymmetricTensorField, VectorField, SYM_PAIRS};
use crate::filter::{true_sgs_divergence, true_sgs_stress, BoxFilterSpec};
use crate::fractional::{
    entropy_bound, equivalent_sgs_stress, fractional_laplacian, fsgs_coefficient, EntropyBound, FsgsParams,
};
use crate::random::seeded_rng;
use crate::smagorinsky::{smagorinsky_divergence, smagorinsky_stress, SmagorinskyParams};

/// Default half-width of the admissible band `|R₁ − 1| ≤ r_tol`.
pub const DEFAULT_R_TOL: f64 = 0.25;

/// Correlation and regression of one truth/model pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub rho: f64,
    pub reg: f64,
}

fn centered_moments(a: &[f64], b: &[f64]) -> (f64, f64, f64) {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (da, db) = (x - ma, y - mb);
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    (sab / n, saa / n, sbb / n)
}

/// Two-pass correlation of `truth` with `model` over all grid points.
pub fn correlation(truth: &ScalarField, model: &ScalarField) -> Result<Correlation> {
    if truth.grid() != model.grid() {
        return Err(Error::GridMismatch);
    }
    correlation_slices(&truth.values(), &model.values())
}

fn correlation_slices(a: &[f64], b: &[f64]) -> Result<Correlation> {
    let (cov, va, vb) = centered_moments(a, b);
    if !(va > 0.0) {
        return Err(Error::Degenerate("truth field has zero variance".into()));
    }
    if !(vb > 0.0) {
        return Err(Error::Degenerate("model field has zero variance".into()));
    }
    Ok(Correlation {
        rho: cov / (va * vb).sqrt(),
        reg: cov / vb,
    })
}

/// Per-component scores of one model evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    /// `ρ_i` between the `i`-th components of the true and modeled SGS force.
    pub rho: [f64; 3],
    /// `R_i`; `None` when the model coefficient vanishes and the slope is
    /// unbounded (FSGS at `α = 1`).
    pub reg: Option<[f64; 3]>,
    /// Stress-component correlations in `(11, 12, 13, 22, 23, 33)` order;
    /// `None` where no truth stress is available or a component is constant.
    pub rho_ij: [Option<f64>; 6],
    pub n_samples: usize,
}

/// Filtered field and exact SGS terms against which models are scored.
#[derive(Debug, Clone)]
pub struct AprioriInput {
    pub filtered: VectorField,
    /// `∂_j 𝒯ᴿ_ij`.
    pub truth_div: VectorField,
    pub truth_stress: Option<SymmetricTensorField>,
}

impl AprioriInput {
    /// Filters a DNS snapshot. The identity filter has no residual stress and
    /// is rejected.
    pub fn from_dns(v: &VectorField, spec: &BoxFilterSpec) -> Result<Self> {
        if spec.is_identity() {
            return Err(Error::Degenerate(
                "filter ratio 0 leaves no residual stress to model".into(),
            ));
        }
        let pair = true_sgs_stress(v, spec)?;
        let truth_div = true_sgs_divergence(&pair);
        Ok(Self {
            filtered: pair.filtered,
            truth_div,
            truth_stress: Some(pair.residual_stress),
        })
    }

    fn n_samples(&self) -> usize {
        self.filtered.grid().len()
    }
}

fn stress_correlations(truth: Option<&SymmetricTensorField>, model: &SymmetricTensorField) -> [Option<f64>; 6] {
    let Some(truth) = truth else {
        return [None; 6];
    };
    std::array::from_fn(|c| {
        correlation(&truth.components()[c], &model.components()[c])
            .ok()
            .map(|r| r.rho)
    })
}

/// Scores an arbitrary model force (and optionally stress) against `input`.
pub fn evaluate_model(
    input: &AprioriInput,
    model_div: &VectorField,
    model_stress: Option<&SymmetricTensorField>,
) -> Result<CorrelationResult> {
    let mut rho = [0.0; 3];
    let mut reg = [0.0; 3];
    for i in 0..3 {
        let c = correlation(input.truth_div.component(i), model_div.component(i))?;
        rho[i] = c.rho;
        reg[i] = c.reg;
    }
    Ok(CorrelationResult {
        rho,
        reg: Some(reg),
        rho_ij: model_stress.map_or([None; 6], |m| stress_correlations(input.truth_stress.as_ref(), m)),
        n_samples: input.n_samples(),
    })
}

/// Scores the FSGS model `|ν_α| (−Δ)^α V̄`.
///
/// When `ν_α = 0` (at `α = 1`) the correlations are those of the unscaled
/// operator, their limit as `α → 1`, and no regression is reported.
pub fn evaluate_fsgs_input(input: &AprioriInput, params: &FsgsParams) -> Result<CorrelationResult> {
    let coef = fsgs_coefficient(params)?.magnitude();
    let shape = fractional_laplacian(&input.filtered, params.alpha).to_physical();
    let stress = input
        .truth_stress
        .as_ref()
        .map(|_| equivalent_sgs_stress(&input.filtered, params.alpha));
    if coef > 0.0 {
        let model = shape.map(|c| c.scale(coef));
        return evaluate_model(input, &model, stress.as_ref());
    }
    let mut r = evaluate_model(input, &shape, stress.as_ref())?;
    r.reg = None;
    Ok(r)
}

pub fn evaluate_fsgs(v_dns: &VectorField, spec: &BoxFilterSpec, params: &FsgsParams) -> Result<CorrelationResult> {
    evaluate_fsgs_input(&AprioriInput::from_dns(v_dns, spec)?, params)
}

pub fn evaluate_smag_input(input: &AprioriInput, params: &SmagorinskyParams) -> Result<CorrelationResult> {
    let div = smagorinsky_divergence(&input.filtered, params);
    let stress = smagorinsky_stress(&input.filtered, params);
    evaluate_model(input, &div, Some(&stress))
}

pub fn evaluate_smag(v_dns: &VectorField, spec: &BoxFilterSpec, params: &SmagorinskyParams) -> Result<CorrelationResult> {
    evaluate_smag_input(&AprioriInput::from_dns(v_dns, spec)?, params)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaSweepResult {
    pub alphas: Vec<f64>,
    pub results: Vec<CorrelationResult>,
    pub alpha_opt: f64,
    pub selection_note: String,
}

impl AlphaSweepResult {
    pub fn opt_index(&self) -> usize {
        self.alphas
            .iter()
            .position(|&a| a == self.alpha_opt)
            .expect("alpha_opt is one of the swept values")
    }
}

/// `α_opt = argmax ρ₁` over `{α : |R₁ − 1| ≤ r_tol}`, falling back to the
/// unrestricted argmax when no α qualifies. Equal `ρ₁` resolves to the
/// larger α.
pub fn select_alpha(alphas: &[f64], results: &[CorrelationResult], r_tol: f64) -> (f64, String) {
    let best = |admissible: &dyn Fn(&CorrelationResult) -> bool| {
        let mut pick: Option<usize> = None;
        for (k, r) in results.iter().enumerate() {
            if !admissible(r) || !r.rho[0].is_finite() {
                continue;
            }
            pick = match pick {
                Some(p) if (results[p].rho[0], alphas[p]) > (r.rho[0], alphas[k]) => Some(p),
                _ => Some(k),
            };
        }
        pick
    };
    if let Some(k) = best(&|r| r.reg.is_some_and(|reg| (reg[0] - 1.0).abs() <= r_tol)) {
        return (alphas[k], format!("argmax rho1 subject to |R1 - 1| <= {r_tol}"));
    }
    let k = best(&|_| true).expect("non-empty sweep");
    (
        alphas[k],
        format!("no alpha with |R1 - 1| <= {r_tol}; fell back to unrestricted argmax rho1"),
    )
}

/// Evaluates the FSGS model for every α in `alphas` (in parallel) and
/// selects `α_opt`.
pub fn sweep_alpha_input(
    input: &AprioriInput,
    alphas: &[f64],
    base: &FsgsParams,
    r_tol: f64,
) -> Result<AlphaSweepResult> {
    if alphas.is_empty() {
        return Err(Error::InvalidParameter("alpha grid is empty".into()));
    }
    if alphas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("alpha grid must be strictly ascending".into()));
    }
    let params: Vec<FsgsParams> = alphas.iter().map(|&a| base.with_alpha(a)).collect::<Result<_>>()?;
    let results: Vec<CorrelationResult> = params
        .par_iter()
        .map(|p| evaluate_fsgs_input(input, p))
        .collect::<Result<_>>()?;
    let (alpha_opt, selection_note) = select_alpha(alphas, &results, r_tol);
    Ok(AlphaSweepResult {
        alphas: alphas.to_vec(),
        results,
        alpha_opt,
        selection_note,
    })
}

pub fn sweep_alpha(
    v_dns: &VectorField,
    spec: &BoxFilterSpec,
    alphas: &[f64],
    base: &FsgsParams,
) -> Result<AlphaSweepResult> {
    sweep_alpha_input(&AprioriInput::from_dns(v_dns, spec)?, alphas, base, DEFAULT_R_TOL)
}

/// Histograms of truth and model, both standardized by the truth's mean and
/// standard deviation, on uniform bins over `±8σ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdfHistogram {
    pub bin_edges: Vec<f64>,
    pub density_truth: Vec<f64>,
    pub density_model: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    /// Fraction of samples beyond `±8σ`, excluded from the densities.
    pub outside_truth: f64,
    pub outside_model: f64,
}

impl PdfHistogram {
    pub const RANGE: f64 = 8.0;

    pub fn bin_centers(&self) -> Vec<f64> {
        self.bin_edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "bin_center,density_truth,density_model")?;
        for ((c, t), m) in self.bin_centers().iter().zip(&self.density_truth).zip(&self.density_model) {
            writeln!(w, "{c},{t},{m}")?;
        }
        Ok(())
    }
}

fn histogram(samples: &[f64], mean: f64, std: f64, n_bins: usize) -> (Vec<f64>, f64) {
    let width = 2.0 * PdfHistogram::RANGE / n_bins as f64;
    let mut counts = vec![0usize; n_bins];
    let mut inside = 0usize;
    for x in samples {
        let z = (x - mean) / std;
        if !(z.abs() <= PdfHistogram::RANGE) {
            continue;
        }
        let b = (((z + PdfHistogram::RANGE) / width) as usize).min(n_bins - 1);
        counts[b] += 1;
        inside += 1;
    }
    let outside = (samples.len() - inside) as f64 / samples.len() as f64;
    let norm = if inside > 0 { 1.0 / (inside as f64 * width) } else { 0.0 };
    (counts.iter().map(|&c| c as f64 * norm).collect(), outside)
}

pub fn pdf_compare(truth: &ScalarField, model: &ScalarField, n_bins: usize) -> Result<PdfHistogram> {
    if truth.grid() != model.grid() {
        return Err(Error::GridMismatch);
    }
    if n_bins == 0 {
        return Err(Error::InvalidParameter("need at least one bin".into()));
    }
    let t = truth.values();
    let m = model.values();
    let n = t.len() as f64;
    let mean = t.iter().sum::<f64>() / n;
    let std = (t.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n).sqrt();
    if !(std > 0.0) {
        return Err(Error::Degenerate("truth field has zero variance".into()));
    }
    let m_mean = m.iter().sum::<f64>() / n;
    if !m.iter().any(|x| *x != m_mean) {
        return Err(Error::Degenerate("model field is constant".into()));
    }
    let width = 2.0 * PdfHistogram::RANGE / n_bins as f64;
    let bin_edges = (0..=n_bins).map(|b| -PdfHistogram::RANGE + b as f64 * width).collect();
    let (density_truth, outside_truth) = histogram(&t, mean, std, n_bins);
    let (density_model, outside_model) = histogram(&m, mean, std, n_bins);
    Ok(PdfHistogram {
        bin_edges,
        density_truth,
        density_model,
        mean,
        std,
        outside_truth,
        outside_model,
    })
}

/// Seeded subsample of `(truth, model)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatterSample {
    pub pairs: Vec<(f64, f64)>,
    /// Set when more points were requested than the grid holds.
    pub clipped: bool,
}

impl ScatterSample {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "truth,model")?;
        for (t, m) in &self.pairs {
            writeln!(w, "{t},{m}")?;
        }
        Ok(())
    }

    /// Least-squares slope of truth on model.
    pub fn slope(&self) -> Result<f64> {
        let (t, m): (Vec<f64>, Vec<f64>) = self.pairs.iter().copied().unzip();
        Ok(correlation_slices(&t, &m)?.reg)
    }
}

/// Draws `n_points` distinct grid points uniformly (without replacement),
/// listed in grid order.
pub fn scatter_export(truth: &ScalarField, model: &ScalarField, n_points: usize, seed: u64) -> Result<ScatterSample> {
    if truth.grid() != model.grid() {
        return Err(Error::GridMismatch);
    }
    let t = truth.values();
    let m = model.values();
    let total = t.len();
    let clipped = n_points > total;
    let k = n_points.min(total);
    let mut picks = if k == total {
        (0..total).collect()
    } else {
        index::sample(&mut seeded_rng(seed), total, k).into_vec()
    };
    picks.sort_unstable();
    Ok(ScatterSample {
        pairs: picks.into_iter().map(|p| (t[p], m[p])).collect(),
        clipped,
    })
}

/// Entropy-bound summary written to reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropySummary {
    pub mu_max: f64,
    pub satisfied: bool,
}

impl From<EntropyBound> for EntropySummary {
    fn from(b: EntropyBound) -> Self {
        Self {
            mu_max: b.mu_max,
            satisfied: b.satisfied,
        }
    }
}

/// Machine-readable outcome of one *a priori* analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AprioriReport {
    pub case: String,
    pub re_lambda: Option<f64>,
    pub l_delta: f64,
    pub alphas: Vec<f64>,
    /// One `[ρ₁, ρ₂, ρ₃]` row per α (a single row for Smagorinsky).
    pub rho: Vec<[f64; 3]>,
    pub reg: Vec<Option<[f64; 3]>>,
    /// Keyed `"11"`, `"12"`, ...; one entry per row of `rho`.
    pub rho_ij: BTreeMap<String, Vec<Option<f64>>>,
    pub alpha_opt: Option<f64>,
    pub selection_note: Option<String>,
    pub entropy: Option<EntropySummary>,
    pub model: String,
    pub seed: u64,
}

fn rho_ij_map(results: &[CorrelationResult]) -> BTreeMap<String, Vec<Option<f64>>> {
    SYM_PAIRS
        .iter()
        .enumerate()
        .map(|(c, (i, j))| (format!("{}{}", i + 1, j + 1), results.iter().map(|r| r.rho_ij[c]).collect()))
        .collect()
}

impl AprioriReport {
    pub fn from_sweep(
        case: &str,
        re_lambda: Option<f64>,
        l_delta: f64,
        sweep: &AlphaSweepResult,
        entropy: Option<EntropySummary>,
        seed: u64,
    ) -> Self {
        Self {
            case: case.into(),
            re_lambda,
            l_delta,
            alphas: sweep.alphas.clone(),
            rho: sweep.results.iter().map(|r| r.rho).collect(),
            reg: sweep.results.iter().map(|r| r.reg).collect(),
            rho_ij: rho_ij_map(&sweep.results),
            alpha_opt: Some(sweep.alpha_opt),
            selection_note: Some(sweep.selection_note.clone()),
            entropy,
            model: "fsgs".into(),
            seed,
        }
    }

    pub fn from_smagorinsky(case: &str, re_lambda: Option<f64>, l_delta: f64, result: &CorrelationResult, seed: u64) -> Self {
        Self {
            case: case.into(),
            re_lambda,
            l_delta,
            alphas: Vec::new(),
            rho: vec![result.rho],
            reg: vec![result.reg],
            rho_ij: rho_ij_map(std::slice::from_ref(result)),
            alpha_opt: None,
            selection_note: None,
            entropy: None,
            model: "smag".into(),
            seed,
        }
    }
}

/// Entropy bound of the FSGS model at the sweep's optimum.
pub fn entropy_at_opt(input: &AprioriInput, base: &FsgsParams, sweep: &AlphaSweepResult) -> Result<EntropySummary> {
    Ok(entropy_bound(&input.filtered, &base.with_alpha(sweep.alpha_opt)?)?.into())
}

pub const SWEEP_CSV_HEADER: &str = "alpha,rho1,rho2,rho3,reg1,reg2,reg3";

pub fn write_sweep_csv<W: Write>(sweep: &AlphaSweepResult, mut w: W) -> std::io::Result<()> {
    writeln!(w, "{SWEEP_CSV_HEADER}")?;
    for (a, r) in sweep.alphas.iter().zip(&sweep.results) {
        let reg = match r.reg {
            Some([x, y, z]) => format!("{x},{y},{z}"),
            None => ",,".into(),
        };
        writeln!(w, "{a},{},{},{},{reg}", r.rho[0], r.rho[1], r.rho[2])?;
    }
    Ok(())
}
