//! Finite-difference, interpolation and quadrature weights on uniform grids.

use std::ops::{Add, Mul};

use nalgebra::{DMatrix, DVector};

/// Values that can be combined linearly with real weights.
pub trait Linear: Copy + Default + Add<Output = Self> + Mul<f64, Output = Self> {}
impl<T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>> Linear for T {}

/// Fornberg's recursion: weights `c[k][j]` approximating the k-th derivative at
/// `z` from values at `x[j]`, for k = 0..=order.
pub fn fornberg(z: f64, x: &[f64], order: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; order + 1];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// First-derivative operator on a uniform grid of unit spacing, using
/// `width`-point stencils (central in the interior, one-sided at the ends).
#[derive(Debug, Clone)]
pub struct UniformDerivative {
    width: usize,
    interior: Vec<f64>,
    /// `edge[p]` holds the weights for the p-th point from the left end.
    edge: Vec<Vec<f64>>,
}

impl UniformDerivative {
    pub fn new(width: usize) -> Self {
        assert!(width % 2 == 1 && width >= 3);
        let half = (width / 2) as isize;
        let nodes: Vec<f64> = (-half..=half).map(|v| v as f64).collect();
        let interior = fornberg(0.0, &nodes, 1)[1].clone();
        let left: Vec<f64> = (0..width).map(|v| v as f64).collect();
        let edge = (0..width / 2).map(|p| fornberg(p as f64, &left, 1)[1].clone()).collect();
        UniformDerivative { width, interior, edge }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// d/ds of `values` sampled with spacing `h`.
    pub fn apply<T: Linear>(&self, values: &[T], h: f64) -> Vec<T> {
        let n = values.len();
        let w = self.width;
        let half = w / 2;
        assert!(n >= w, "need at least {w} samples for the derivative stencil");
        let inv = 1.0 / h;
        let mut out = vec![T::default(); n];
        for (i, o) in out.iter_mut().enumerate() {
            let (start, weights) = if i < half {
                (0, &self.edge[i])
            } else if i + half >= n {
                (n - w, &self.edge[n - 1 - i])
            } else {
                (i - half, &self.interior)
            };
            let mirrored = i + half >= n && i >= half;
            let mut acc = T::default();
            for (j, wj) in weights.iter().enumerate() {
                if mirrored {
                    // right edge: reflect the left-edge stencil, which flips the sign
                    acc = acc + values[n - 1 - j] * (-wj);
                } else {
                    acc = acc + values[start + j] * *wj;
                }
            }
            *o = acc * inv;
        }
        out
    }
}

/// Lagrange interpolation on a uniform grid with unit spacing.
pub fn interpolate_uniform<T: Linear>(values: &[T], s: f64, width: usize) -> T {
    let n = values.len();
    let width = width.min(n);
    let base = s.floor() as isize - (width as isize / 2 - 1);
    let start = base.clamp(0, (n - width) as isize) as usize;
    let nodes: Vec<f64> = (start..start + width).map(|v| v as f64).collect();
    let w = &fornberg(s, &nodes, 0)[0];
    w.iter().enumerate().fold(T::default(), |acc, (j, wj)| acc + values[start + j] * *wj)
}

/// Weights integrating the degree-(width−1) interpolant over each unit cell.
#[derive(Debug, Clone)]
pub struct CellIntegrator {
    width: usize,
    /// `weights[a]`: integral over `[a, a+1]` of the interpolant through nodes 0..width.
    weights: Vec<Vec<f64>>,
}

impl CellIntegrator {
    pub fn new(width: usize) -> Self {
        assert!(width >= 2);
        let weights = (0..width - 1)
            .map(|a| {
                let mut v = DMatrix::<f64>::zeros(width, width);
                let mut rhs = DVector::<f64>::zeros(width);
                for k in 0..width {
                    for j in 0..width {
                        v[(k, j)] = (j as f64).powi(k as i32);
                    }
                    let lo = a as f64;
                    rhs[k] = ((lo + 1.0).powi(k as i32 + 1) - lo.powi(k as i32 + 1)) / (k as f64 + 1.0);
                }
                let sol = v.lu().solve(&rhs).expect("Vandermonde system is nonsingular");
                sol.iter().copied().collect()
            })
            .collect();
        CellIntegrator { width, weights }
    }

    /// Running integral `∫_{s_0}^{s_i} values ds` for every node, spacing `h`.
    pub fn cumulative<T: Linear>(&self, values: &[T], h: f64) -> Vec<T> {
        let n = values.len();
        let w = self.width.min(n);
        let mut out = vec![T::default(); n];
        let integ = if w == self.width { self.clone() } else { CellIntegrator::new(w) };
        let mut acc = T::default();
        for i in 0..n - 1 {
            let start = (i as isize - (w as isize / 2 - 1)).clamp(0, (n - w) as isize) as usize;
            let a = i - start;
            let cell = integ.weights[a]
                .iter()
                .enumerate()
                .fold(T::default(), |s, (j, wj)| s + values[start + j] * *wj);
            acc = acc + cell * h;
            out[i + 1] = acc;
        }
        out
    }
}

/// Closed extended quadrature weights of order h⁴ (3/8, 7/6, 23/24, 1, …).
pub fn closed_weights(n: usize) -> Vec<f64> {
    assert!(n >= 7, "closed quadrature needs at least 7 nodes");
    let mut w = vec![1.0; n];
    let ends = [3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0];
    for (k, e) in ends.iter().enumerate() {
        w[k] = *e;
        w[n - 1 - k] = *e;
    }
    w
}
