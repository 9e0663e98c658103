//! Three-dimensional FFTs on cubic grids and the matching wavenumber tables.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::{Fft, FftPlanner};

use crate::algebra::C64;

/// Lines gathered per batch for the strided axes.
const BATCH: usize = 64;

pub struct Fft3 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Fft3 {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft3 { n, forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Unnormalized forward transform, in place.
    pub fn forward(&self, data: &mut [C64]) {
        self.transform(data, &*self.forward);
    }

    /// Inverse transform including the 1/N³ normalization, in place.
    pub fn inverse(&self, data: &mut [C64]) {
        self.transform(data, &*self.inverse);
        let s = 1.0 / (self.n * self.n * self.n) as f64;
        data.iter_mut().for_each(|v| *v *= s);
    }

    fn transform(&self, data: &mut [C64], plan: &dyn Fft<f64>) {
        let n = self.n;
        assert_eq!(data.len(), n * n * n, "buffer length does not match grid");
        let mut scratch = vec![C64::default(); plan.get_inplace_scratch_len()];
        // innermost axis is contiguous
        plan.process_with_scratch(data, &mut scratch);

        let mut lines = vec![C64::default(); BATCH * n];
        // middle axis: stride n inside each slab
        for slab in data.chunks_mut(n * n) {
            for k0 in (0..n).step_by(BATCH) {
                let b = BATCH.min(n - k0);
                for j in 0..n {
                    let row = &slab[j * n + k0..j * n + k0 + b];
                    for (t, v) in row.iter().enumerate() {
                        lines[t * n + j] = *v;
                    }
                }
                plan.process_with_scratch(&mut lines[..b * n], &mut scratch);
                for j in 0..n {
                    let row = &mut slab[j * n + k0..j * n + k0 + b];
                    for (t, v) in row.iter_mut().enumerate() {
                        *v = lines[t * n + j];
                    }
                }
            }
        }
        // outermost axis: stride n²
        let plane = n * n;
        for m0 in (0..plane).step_by(BATCH) {
            let b = BATCH.min(plane - m0);
            for i in 0..n {
                let row = &data[i * plane + m0..i * plane + m0 + b];
                for (t, v) in row.iter().enumerate() {
                    lines[t * n + i] = *v;
                }
            }
            plan.process_with_scratch(&mut lines[..b * n], &mut scratch);
            for i in 0..n {
                let row = &mut data[i * plane + m0..i * plane + m0 + b];
                for (t, v) in row.iter_mut().enumerate() {
                    *v = lines[t * n + i];
                }
            }
        }
    }
}

/// Shared plan for an n³ grid.
pub fn plan(n: usize) -> Arc<Fft3> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Fft3>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard.entry(n).or_insert_with(|| Arc::new(Fft3::new(n))).clone()
}

/// Angular wavenumbers in FFT order for `n` points with spacing `h`.
///
/// The Nyquist entry is set to zero so first derivatives of real data stay real
/// and every symbol built from this table is used consistently.
pub fn wavenumbers(n: usize, h: f64) -> Vec<f64> {
    let dk = 2.0 * std::f64::consts::PI / (n as f64 * h);
    (0..n)
        .map(|j| {
            if j < n / 2 {
                j as f64 * dk
            } else if j == n / 2 {
                0.0
            } else {
                (j as f64 - n as f64) * dk
            }
        })
        .collect()
}
