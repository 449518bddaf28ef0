//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use fraclest::{GridSpec, VectorField};

/// Signed `ν_α` for `ρ = 1, U = 502, c̄ = 1500`, evaluated with 50-digit
/// arithmetic at the exact binary values of the inputs:
/// `(α, ν = 1.85e-4, ν = 1e-3)`.
pub const NU_ALPHA_TABLE: [(f64, f64, f64); 9] = [
    (0.05, -9162004.6556781811514, -2006527.2572376186389),
    (0.1, -16722432.203617568606, -4335476.4012557889469),
    (0.25, -3271729.4967016438386, -1407224.0658202603362),
    (0.5, -19073.712820670085474, -19073.712820670085474),
    (0.6, -1802.5936807757565106, -2526.1753821508576858),
    (0.75, -40.692950288906152239, -94.60918769209917796),
    (0.9, -0.5358798179379861821, -2.0669502253914350296),
    (0.99, -0.0066875546338624631663, -0.034949345668177987062),
    (0.999999, -5.2999829327138410276e-7, -2.8648459710094104898e-6),
];

/// Direct two-pass `(ρ, R)` with `b` as the regressor.
pub fn brute_correlation(a: &[f64], b: &[f64]) -> (f64, f64) {
    let n = a.len() as f64;
    let mut ma = 0.0;
    let mut mb = 0.0;
    for i in 0..a.len() {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for i in 0..a.len() {
        cov += (a[i] - ma) * (b[i] - mb);
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
    }
    (cov / (va.sqrt() * vb.sqrt()), cov / vb)
}

/// Velocity `Σ a sin(k·x + φ)` built from explicit modes.
#[derive(Debug, Clone)]
pub struct Mode {
    pub k: [f64; 3],
    pub a: [f64; 3],
    pub phase: f64,
}

impl Mode {
    fn arg(&self, x: [f64; 3]) -> f64 {
        self.k[0] * x[0] + self.k[1] * x[1] + self.k[2] * x[2] + self.phase
    }

    fn norm(&self) -> f64 {
        (self.k[0].powi(2) + self.k[1].powi(2) + self.k[2].powi(2)).sqrt()
    }
}

/// A few solenoidal modes (`a·k = 0`) well inside the 2/3 cutoff of n = 16.
pub fn solenoidal_modes() -> Vec<Mode> {
    let raw = [
        ([1.0, 0.0, 0.0], [0.0, 1.0, 0.3], 0.1),
        ([0.0, 2.0, 1.0], [0.7, 0.2, -0.4], 1.3),
        ([1.0, -1.0, 3.0], [1.0, 1.0, 0.0], -0.6),
        ([3.0, 1.0, -2.0], [0.5, -0.3, 0.6], 2.2),
        ([2.0, 2.0, 0.0], [0.0, 0.0, 0.8], 0.4),
    ];
    raw.iter()
        .map(|&(k, a, phase)| {
            let dot: f64 = (0..3).map(|d| k[d] * a[d]).sum();
            assert!(dot.abs() < 1e-14, "mode not solenoidal");
            Mode { k, a, phase }
        })
        .collect()
}

pub fn modal_field(grid: GridSpec, modes: &[Mode]) -> VectorField {
    VectorField::from_fn(grid, |x, y, z| {
        let mut v = [0.0; 3];
        for m in modes {
            let s = m.arg([x, y, z]).sin();
            for d in 0..3 {
                v[d] += m.a[d] * s;
            }
        }
        v
    })
}

/// `μ · min |∇V:∇V / (ℛ_j(−Δ)^{α−½}V_i ∂_jV_i)|` by direct pointwise
/// evaluation of the closed-form mode sums.
pub fn entropy_oracle(grid: GridSpec, modes: &[Mode], alpha: f64, mu: f64) -> f64 {
    let n = grid.n();
    let mut num = Vec::with_capacity(grid.len());
    let mut den = Vec::with_capacity(grid.len());
    for ix in 0..n {
        for iy in 0..n {
            for iz in 0..n {
                let x = [grid.coord(ix), grid.coord(iy), grid.coord(iz)];
                let mut grad = [[0.0; 3]; 3];
                let mut t = [[0.0; 3]; 3];
                for m in modes {
                    let c = m.arg(x).cos();
                    let kk = m.norm();
                    for i in 0..3 {
                        for j in 0..3 {
                            grad[i][j] += m.a[i] * m.k[j] * c;
                            t[i][j] -= m.a[i] * m.k[j] * kk.powf(2.0 * alpha - 2.0) * c;
                        }
                    }
                }
                let mut p = 0.0;
                let mut q = 0.0;
                for i in 0..3 {
                    for j in 0..3 {
                        p += grad[i][j] * grad[i][j];
                        q += t[i][j] * grad[i][j];
                    }
                }
                num.push(p);
                den.push(q);
            }
        }
    }
    let rms = (den.iter().map(|d| d * d).sum::<f64>() / den.len() as f64).sqrt();
    let mut best = f64::INFINITY;
    for (p, q) in num.iter().zip(&den) {
        if q.abs() > 1e-12 * rms {
            best = best.min((p / q).abs());
        }
    }
    mu * best
}

/// Gaussian elimination with partial pivoting.
pub fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for c in col..n {
                a[row][c] -= f * a[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// Ordinary Kriging through the bordered `(N+1)` system
/// `[C 1; 1ᵀ 0][w; λ] = [c₀; 1]`, on per-dimension z-scored inputs.
/// Returns `(mean, variance)`.
pub fn kriging_oracle(inputs: &[[f64; 2]], outputs: &[f64], theta: [f64; 2], sigma2: f64, q: [f64; 2]) -> (f64, f64) {
    let n = inputs.len();
    let mut center = [0.0; 2];
    let mut scale = [0.0; 2];
    for d in 0..2 {
        center[d] = inputs.iter().map(|x| x[d]).sum::<f64>() / n as f64;
        let var = inputs.iter().map(|x| (x[d] - center[d]).powi(2)).sum::<f64>() / n as f64;
        scale[d] = if var > 0.0 { var.sqrt() } else { 1.0 };
    }
    let z = |x: [f64; 2]| [(x[0] - center[0]) / scale[0], (x[1] - center[1]) / scale[1]];
    let cov = |a: [f64; 2], b: [f64; 2]| {
        let (za, zb) = (z(a), z(b));
        let r2 = ((za[0] - zb[0]) / theta[0]).powi(2) + ((za[1] - zb[1]) / theta[1]).powi(2);
        sigma2 * (-0.5 * r2).exp()
    };
    let mut a = vec![vec![0.0; n + 1]; n + 1];
    let mut rhs = vec![0.0; n + 1];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = cov(inputs[i], inputs[j]);
        }
        a[i][n] = 1.0;
        a[n][i] = 1.0;
        rhs[i] = cov(inputs[i], q);
    }
    rhs[n] = 1.0;
    let sol = dense_solve(a, rhs.clone());
    let mean: f64 = (0..n).map(|i| sol[i] * outputs[i]).sum();
    let wc: f64 = (0..n).map(|i| sol[i] * rhs[i]).sum();
    (mean, sigma2 - wc - sol[n])
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

