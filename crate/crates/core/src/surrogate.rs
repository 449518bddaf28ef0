//! Ordinary Kriging of `α_opt` over `(ℒ_δ, Re_λ)`.
//!
//! Inputs are z-scored per dimension. The covariance is
//! `σ² exp(−½ Σ_d (Δ_d/θ_d)²)` plus `σ²·nugget` on the diagonal, and the
//! constant mean is estimated jointly through the usual Lagrange constraint.

use std::io::{Read, Write};

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One direct evaluation of the optimal exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub l_delta: f64,
    pub re_lambda: f64,
    pub alpha_opt: f64,
}

impl Sample {
    pub fn new(l_delta: f64, re_lambda: f64, alpha_opt: f64) -> Self {
        Self {
            l_delta,
            re_lambda,
            alpha_opt,
        }
    }

    fn input(&self) -> [f64; 2] {
        [self.l_delta, self.re_lambda]
    }
}

/// Covariance hyper-parameters, length scales in standardized units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub theta: [f64; 2],
    pub sigma2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum KernelChoice {
    Fixed(KernelParams),
    /// Concentrated likelihood maximized over a log-spaced `θ` grid, with
    /// `σ²` at its closed-form optimum.
    Auto,
}

/// Nugget values tried in turn when the covariance is not numerically
/// positive definite.
pub const NUGGET_LADDER: [f64; 4] = [0.0, 1e-10, 1e-8, 1e-6];

#[derive(Debug, Clone)]
pub struct KrigingModel {
    samples: Vec<Sample>,
    center: [f64; 2],
    scale: [f64; 2],
    z: Vec<[f64; 2]>,
    kernel: KernelParams,
    nugget: f64,
    chol: Cholesky<f64, Dyn>,
    /// `C⁻¹ 1`.
    c_inv_one: DVector<f64>,
    /// `1ᵀ C⁻¹ 1`.
    one_c_inv_one: f64,
    mean: f64,
    /// `C⁻¹ (y − μ 1)`.
    weights: DVector<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    /// Prediction clamped to `(0, 1]`.
    pub alpha_hat: f64,
    /// Unclamped Kriging mean.
    pub raw: f64,
    pub variance: f64,
    pub clamped: bool,
}

fn correlation(a: &[f64; 2], b: &[f64; 2], theta: &[f64; 2]) -> f64 {
    let s: f64 = (0..2).map(|d| ((a[d] - b[d]) / theta[d]).powi(2)).sum();
    (-0.5 * s).exp()
}

fn correlation_matrix(z: &[[f64; 2]], theta: &[f64; 2], nugget: f64) -> DMatrix<f64> {
    let n = z.len();
    DMatrix::from_fn(n, n, |i, j| {
        correlation(&z[i], &z[j], theta) + if i == j { nugget } else { 0.0 }
    })
}

fn factor(z: &[[f64; 2]], theta: &[f64; 2], start: f64) -> Option<(Cholesky<f64, Dyn>, f64)> {
    std::iter::once(start)
        .chain(NUGGET_LADDER.into_iter().filter(|&g| g > start))
        .find_map(|g| Cholesky::new(correlation_matrix(z, theta, g)).map(|c| (c, g)))
}

/// GLS mean and the process-variance estimate for a factored correlation.
fn gls(chol: &Cholesky<f64, Dyn>, y: &DVector<f64>) -> (f64, f64, DVector<f64>, f64) {
    let n = y.len();
    let ones = DVector::from_element(n, 1.0);
    let r_inv_one = chol.solve(&ones);
    let denom = ones.dot(&r_inv_one);
    let mean = r_inv_one.dot(y) / denom;
    let resid = y - DVector::from_element(n, mean);
    let sigma2 = resid.dot(&chol.solve(&resid)) / n as f64;
    (mean, sigma2, r_inv_one, denom)
}

fn validate(samples: &[Sample]) -> Result<Vec<Sample>> {
    let mut unique: Vec<Sample> = Vec::with_capacity(samples.len());
    for s in samples {
        if !(s.l_delta.is_finite() && s.re_lambda.is_finite() && s.alpha_opt.is_finite()) {
            return Err(Error::Data(format!("non-finite sample {s:?}")));
        }
        match unique.iter().find(|u| u.input() == s.input()) {
            Some(u) if u.alpha_opt != s.alpha_opt => {
                return Err(Error::Data(format!(
                    "conflicting outputs {} and {} at (l_delta {}, re_lambda {})",
                    u.alpha_opt, s.alpha_opt, s.l_delta, s.re_lambda
                )));
            }
            Some(_) => log::warn!("dropping repeated sample {s:?}"),
            None => unique.push(*s),
        }
    }
    if unique.len() < 3 {
        return Err(Error::Data(format!("need at least 3 distinct samples, got {}", unique.len())));
    }
    Ok(unique)
}

fn standardize(samples: &[Sample]) -> ([f64; 2], [f64; 2]) {
    let n = samples.len() as f64;
    let mut center = [0.0; 2];
    let mut scale = [0.0; 2];
    for d in 0..2 {
        center[d] = samples.iter().map(|s| s.input()[d]).sum::<f64>() / n;
        let var = samples.iter().map(|s| (s.input()[d] - center[d]).powi(2)).sum::<f64>() / n;
        scale[d] = if var > 0.0 { var.sqrt() } else { 1.0 };
    }
    (center, scale)
}

fn auto_kernel(z: &[[f64; 2]], y: &DVector<f64>) -> Result<KernelParams> {
    let grid: Vec<f64> = (0..17).map(|k| 10f64.powf(-1.0 + k as f64 / 8.0)).collect();
    let n = y.len() as f64;
    let mut best: Option<(f64, KernelParams)> = None;
    for &t0 in &grid {
        for &t1 in &grid {
            let theta = [t0, t1];
            let Some((chol, _)) = factor(z, &theta, 0.0) else {
                continue;
            };
            let (_, sigma2, _, _) = gls(&chol, y);
            if !(sigma2 > 0.0) {
                continue;
            }
            let log_det: f64 = chol.l().diagonal().iter().map(|d| 2.0 * d.ln()).sum();
            let ll = -0.5 * n * sigma2.ln() - 0.5 * log_det;
            if best.as_ref().is_none_or(|(b, _)| ll > *b) {
                best = Some((ll, KernelParams { theta, sigma2 }));
            }
        }
    }
    match best {
        Some((_, k)) => Ok(k),
        // constant outputs: any kernel interpolates exactly
        None if y.iter().all(|v| *v == y[0]) => Ok(KernelParams {
            theta: [1.0, 1.0],
            sigma2: 1.0,
        }),
        None => Err(Error::Fit("no kernel on the search grid gave a usable covariance".into())),
    }
}

impl KrigingModel {
    /// Fits the model; `nugget` is the first rung tried (usually 0).
    pub fn fit(samples: &[Sample], kernel: KernelChoice, nugget: f64) -> Result<Self> {
        if !(nugget.is_finite() && nugget >= 0.0) {
            return Err(Error::InvalidParameter(format!("nugget must be >= 0, got {nugget}")));
        }
        let samples = validate(samples)?;
        let (center, scale) = standardize(&samples);
        let z: Vec<[f64; 2]> = samples
            .iter()
            .map(|s| {
                let x = s.input();
                [(x[0] - center[0]) / scale[0], (x[1] - center[1]) / scale[1]]
            })
            .collect();
        let y = DVector::from_iterator(samples.len(), samples.iter().map(|s| s.alpha_opt));
        let kernel = match kernel {
            KernelChoice::Fixed(k) => {
                if !(k.theta.iter().all(|t| t.is_finite() && *t > 0.0) && k.sigma2 > 0.0) {
                    return Err(Error::InvalidParameter(format!("bad kernel parameters {k:?}")));
                }
                k
            }
            KernelChoice::Auto => auto_kernel(&z, &y)?,
        };
        let (chol, nugget) = factor(&z, &kernel.theta, nugget)
            .ok_or_else(|| Error::Fit("covariance not positive definite after nugget escalation".into()))?;
        if nugget > 0.0 {
            log::info!("covariance regularized with nugget {nugget:e}");
        }
        let (mean, _, r_inv_one, denom) = gls(&chol, &y);
        let weights = chol.solve(&(&y - DVector::from_element(y.len(), mean)));
        // the factor is of the correlation matrix; rescale to covariance
        let s2 = kernel.sigma2;
        Ok(Self {
            samples,
            center,
            scale,
            z,
            kernel,
            nugget,
            chol,
            c_inv_one: r_inv_one / s2,
            one_c_inv_one: denom / s2,
            mean,
            weights: weights / s2,
        })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn kernel(&self) -> KernelParams {
        self.kernel
    }

    /// Nugget actually used after escalation.
    pub fn nugget(&self) -> f64 {
        self.nugget
    }

    /// Generalized least-squares estimate of the constant mean.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn predict(&self, l_delta: f64, re_lambda: f64) -> Prediction {
        let q = [
            (l_delta - self.center[0]) / self.scale[0],
            (re_lambda - self.center[1]) / self.scale[1],
        ];
        let s2 = self.kernel.sigma2;
        let c0 = DVector::from_iterator(
            self.z.len(),
            self.z.iter().map(|z| s2 * correlation(z, &q, &self.kernel.theta)),
        );
        let raw = self.mean + c0.dot(&self.weights);
        let c_inv_c0 = self.chol.solve(&c0) / s2;
        let lagrange = 1.0 - self.c_inv_one.dot(&c0);
        let variance = (s2 - c0.dot(&c_inv_c0) + lagrange * lagrange / self.one_c_inv_one).max(0.0);
        let alpha_hat = raw.clamp(f64::MIN_POSITIVE, 1.0);
        Prediction {
            alpha_hat,
            raw,
            variance,
            clamped: alpha_hat != raw,
        }
    }

    /// Evaluates the surface on the tensor product of the two axes,
    /// `l_delta` outermost.
    pub fn surface(&self, l_deltas: &[f64], re_lambdas: &[f64]) -> Vec<SurfacePoint> {
        l_deltas
            .iter()
            .flat_map(|&l| re_lambdas.iter().map(move |&r| (l, r)))
            .map(|(l_delta, re_lambda)| SurfacePoint {
                l_delta,
                re_lambda,
                prediction: self.predict(l_delta, re_lambda),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub l_delta: f64,
    pub re_lambda: f64,
    pub prediction: Prediction,
}

pub const SAMPLES_CSV_HEADER: &str = "l_delta,re_lambda,alpha_opt";
pub const SURFACE_CSV_HEADER: &str = "l_delta,re_lambda,alpha_hat,variance";

pub fn read_samples_csv<R: Read>(r: R) -> Result<Vec<Sample>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let headers = rdr.headers().map_err(|e| Error::Data(e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>().join(",") != SAMPLES_CSV_HEADER {
        return Err(Error::Data(format!("expected header {SAMPLES_CSV_HEADER:?}")));
    }
    rdr.deserialize()
        .map(|row| row.map_err(|e| Error::Data(e.to_string())))
        .collect()
}

pub fn write_samples_csv<W: Write>(samples: &[Sample], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{SAMPLES_CSV_HEADER}")?;
    for s in samples {
        writeln!(w, "{},{},{}", s.l_delta, s.re_lambda, s.alpha_opt)?;
    }
    Ok(())
}

pub fn write_surface_csv<W: Write>(points: &[SurfacePoint], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{SURFACE_CSV_HEADER}")?;
    for p in points {
        writeln!(
            w,
            "{},{},{},{}",
            p.l_delta, p.re_lambda, p.prediction.alpha_hat, p.prediction.variance
        )?;
    }
    Ok(())
}
