//! Three-dimensional real-to-complex transforms on the periodic grid.
//!
//! Forward is the unnormalized sum `f̂(k) = Σ_x f(x) e^{−ik·x}`; inverse divides
//! by `n³`. The last (`z`, contiguous) axis is transformed real-to-complex and
//! stored as `n/2 + 1` coefficients; `x` and `y` are full complex passes.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::{Fft, FftPlanner};

use crate::grid::GridSpec;

struct Plan {
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn plan(n: usize) -> Arc<Plan> {
    static PLANS: OnceLock<Mutex<HashMap<usize, Arc<Plan>>>> = OnceLock::new();
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut cache = cache.lock().expect("fft plan cache poisoned");
    cache
        .entry(n)
        .or_insert_with(|| {
            let mut real = RealFftPlanner::<f64>::new();
            let mut cplx = FftPlanner::<f64>::new();
            Arc::new(Plan {
                r2c: real.plan_fft_forward(n),
                c2r: real.plan_fft_inverse(n),
                forward: cplx.plan_fft_forward(n),
                inverse: cplx.plan_fft_inverse(n),
            })
        })
        .clone()
}

/// Forward transform of `n³` physical samples into `n·n·(n/2+1)` coefficients.
pub fn forward(grid: &GridSpec, input: &[f64]) -> Vec<Complex64> {
    let n = grid.n();
    let nh = grid.nz_spectral();
    assert_eq!(input.len(), grid.len(), "physical buffer length");
    let p = plan(n);
    let mut out = vec![Complex64::new(0.0, 0.0); grid.spectral_len()];

    // z: real rows -> half-complex rows
    out.par_chunks_mut(n * nh)
        .zip(input.par_chunks(n * n))
        .for_each_init(
            || (vec![0.0; n], p.r2c.make_scratch_vec()),
            |(row, scratch), (plane_out, plane_in)| {
                for (dst, src) in plane_out.chunks_mut(nh).zip(plane_in.chunks(n)) {
                    row.copy_from_slice(src);
                    p.r2c
                        .process_with_scratch(row, dst, scratch)
                        .expect("r2c length mismatch");
                }
            },
        );

    complex_passes(grid, &mut out, &*p.forward, &*p.forward);
    out
}

/// Inverse transform, normalized by `1/n³`.
///
/// Imaginary parts that a real field cannot carry (the self-conjugate
/// `kz = 0` and `kz = n/2` entries after the `x`/`y` passes) are discarded.
pub fn inverse(grid: &GridSpec, input: &[Complex64]) -> Vec<f64> {
    let n = grid.n();
    let nh = grid.nz_spectral();
    assert_eq!(input.len(), grid.spectral_len(), "spectral buffer length");
    let p = plan(n);
    let mut work = input.to_vec();
    complex_passes(grid, &mut work, &*p.inverse, &*p.inverse);

    let scale = 1.0 / grid.len() as f64;
    let mut out = vec![0.0; grid.len()];
    out.par_chunks_mut(n * n)
        .zip(work.par_chunks_mut(n * nh))
        .for_each_init(
            || p.c2r.make_scratch_vec(),
            |scratch, (plane_out, plane_in)| {
                for (dst, src) in plane_out.chunks_mut(n).zip(plane_in.chunks_mut(nh)) {
                    src[0].im = 0.0;
                    src[nh - 1].im = 0.0;
                    p.c2r
                        .process_with_scratch(src, dst, scratch)
                        .expect("c2r length mismatch");
                    for v in dst.iter_mut() {
                        *v *= scale;
                    }
                }
            },
        );
    out
}

/// Full complex transforms along `y` then `x` of a half-complex buffer.
fn complex_passes(grid: &GridSpec, data: &mut [Complex64], fft_y: &dyn Fft<f64>, fft_x: &dyn Fft<f64>) {
    let n = grid.n();
    let nh = grid.nz_spectral();

    // y: within each x-plane, gather columns into contiguous runs
    data.par_chunks_mut(n * nh).for_each_init(
        || {
            (
                vec![Complex64::new(0.0, 0.0); n * nh],
                vec![Complex64::new(0.0, 0.0); fft_y.get_inplace_scratch_len()],
            )
        },
        |(buf, scratch), plane| {
            for iy in 0..n {
                for iz in 0..nh {
                    buf[iz * n + iy] = plane[iy * nh + iz];
                }
            }
            fft_y.process_with_scratch(buf, scratch);
            for iy in 0..n {
                for iz in 0..nh {
                    plane[iy * nh + iz] = buf[iz * n + iy];
                }
            }
        },
    );

    // x: stride n·nh between consecutive samples
    let mut buf = vec![Complex64::new(0.0, 0.0); n * nh];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft_x.get_inplace_scratch_len()];
    for iy in 0..n {
        for ix in 0..n {
            let row = &data[(ix * n + iy) * nh..(ix * n + iy + 1) * nh];
            for (iz, v) in row.iter().enumerate() {
                buf[iz * n + ix] = *v;
            }
        }
        fft_x.process_with_scratch(&mut buf, &mut scratch);
        for ix in 0..n {
            let row = &mut data[(ix * n + iy) * nh..(ix * n + iy + 1) * nh];
            for (iz, v) in row.iter_mut().enumerate() {
                *v = buf[iz * n + ix];
            }
        }
    }
}
