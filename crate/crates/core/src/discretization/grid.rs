use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::stencil::{closed_weights, interpolate_uniform, CellIntegrator, Linear, UniformDerivative};
use crate::algebra::Vec3;
use crate::error::{Error, Result};

/// Stencil width for derivatives on the logarithmic radial grid (8th order).
pub const RADIAL_STENCIL: usize = 9;
/// Interpolation / cumulative-integration window on the radial grid.
pub const RADIAL_WINDOW: usize = 8;

/// Uniform cube `[−L, L)³` with `N` points per axis, nodes at half-integer
/// multiples of the spacing so that no node sits on the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartesianGrid {
    half_width: f64,
    n: usize,
}

impl CartesianGrid {
    pub fn new(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!("half-width must be positive, got {half_width}")));
        }
        if n < 4 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!("points per axis must be even and >= 4, got {n}")));
        }
        Ok(CartesianGrid { half_width, n })
    }

    /// Box sized to the decay rate √(ε² + m²) of the extremal spinors.
    pub fn for_decay(eps: f64, m: f64, n: usize) -> Result<Self> {
        let rate = (eps * eps + m * m).sqrt();
        Self::new(16.0 / rate.max(1.0), n)
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(3)
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + (i as f64 + 0.5) * self.spacing()
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    pub fn position(&self, idx: usize) -> Vec3 {
        let n = self.n;
        let (i, j, k) = (idx / (n * n), (idx / n) % n, idx % n);
        Vec3::new(self.coord(i), self.coord(j), self.coord(k))
    }

    pub fn positions(&self) -> impl Iterator<Item = Vec3> + '_ {
        (0..self.len()).map(move |idx| self.position(idx))
    }

    /// Same box, twice the points per axis.
    pub fn refined(&self) -> CartesianGrid {
        CartesianGrid { half_width: self.half_width, n: 2 * self.n }
    }
}

/// Log-uniform nodes `r_i = r_min·exp(i·h)`, `h = ln(r_max/r_min)/(M−1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    r_min: f64,
    r_max: f64,
    m: usize,
}

impl Default for RadialGrid {
    fn default() -> Self {
        RadialGrid { r_min: 1e-4, r_max: 40.0, m: 2048 }
    }
}

fn derivative_op() -> &'static UniformDerivative {
    static OP: OnceLock<UniformDerivative> = OnceLock::new();
    OP.get_or_init(|| UniformDerivative::new(RADIAL_STENCIL))
}

fn cell_integrator() -> &'static CellIntegrator {
    static OP: OnceLock<CellIntegrator> = OnceLock::new();
    OP.get_or_init(|| CellIntegrator::new(RADIAL_WINDOW))
}

impl RadialGrid {
    pub fn new(r_min: f64, r_max: f64, m: usize) -> Result<Self> {
        if !(r_min.is_finite() && r_min > 0.0 && r_max.is_finite() && r_min < r_max) {
            return Err(Error::InvalidGrid(format!("need 0 < r_min < r_max, got [{r_min}, {r_max}]")));
        }
        if m < 16 {
            return Err(Error::InvalidGrid(format!("radial grid needs at least 16 nodes, got {m}")));
        }
        Ok(RadialGrid { r_min, r_max, m })
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Step in `t = ln r`.
    pub fn log_step(&self) -> f64 {
        (self.r_max / self.r_min).ln() / (self.m - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.m - 1 {
            self.r_max
        } else {
            self.r_min * (i as f64 * self.log_step()).exp()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.m).map(|i| self.node(i)).collect()
    }

    /// Same interval with the log step halved (2M − 1 nodes; old nodes kept).
    pub fn refined(&self) -> RadialGrid {
        RadialGrid { r_min: self.r_min, r_max: self.r_max, m: 2 * self.m - 1 }
    }

    /// d/dr = (1/r) d/dt with 8th-order differences in t.
    pub fn derivative<T: Linear>(&self, values: &[T]) -> Vec<T> {
        let h = self.log_step();
        let dt = derivative_op().apply(values, h);
        dt.into_iter().enumerate().map(|(i, v)| v * (1.0 / self.node(i))).collect()
    }

    /// Lagrange interpolation in `ln r`. Outside the grid the end value is held.
    pub fn interpolate<T: Linear>(&self, values: &[T], r: f64) -> T {
        if r <= self.r_min {
            return values[0];
        }
        if r >= self.r_max {
            return values[self.m - 1];
        }
        let s = (r / self.r_min).ln() / self.log_step();
        interpolate_uniform(values, s, RADIAL_WINDOW)
    }

    /// Samples of `values` transferred onto another radial grid.
    pub fn resample<T: Linear>(&self, values: &[T], target: &RadialGrid) -> Vec<T> {
        target.nodes().into_iter().map(|r| self.interpolate(values, r)).collect()
    }

    /// `∫_{r_min}^{r_i} g(r) dr` at every node.
    pub fn cumulative<T: Linear>(&self, g: &[T]) -> Vec<T> {
        let h = self.log_step();
        let f: Vec<T> = g.iter().enumerate().map(|(i, v)| *v * self.node(i)).collect();
        cell_integrator().cumulative(&f, h)
    }

    /// `∫_{r_i}^{r_max} g(r) dr` at every node, accumulated from the outer end
    /// so that small tails do not cancel against a large total.
    pub fn reverse_cumulative<T: Linear>(&self, g: &[T]) -> Vec<T> {
        let h = self.log_step();
        let f: Vec<T> = g.iter().enumerate().rev().map(|(i, v)| *v * self.node(i)).collect();
        let mut out = cell_integrator().cumulative(&f, h);
        out.reverse();
        out
    }

    /// `∫_0^∞ g(r) dr` for a real density sampled on the grid.
    ///
    /// The interior uses an h⁴ closed rule in `t = ln r`. The pieces below
    /// `r_min` and above `r_max` are added by fitting a local power law
    /// `g ~ c·r^p` to the two outermost nodes; a head with `p <= −1` is
    /// non-integrable and reported as such.
    pub fn integrate(&self, g: &[f64]) -> Result<f64> {
        self.integrate_parts(g).map(|p| p.total())
    }

    pub fn integrate_parts(&self, g: &[f64]) -> Result<QuadratureParts> {
        assert_eq!(g.len(), self.m);
        let h = self.log_step();
        let w = closed_weights(self.m);
        let interior: f64 = g.iter().enumerate().map(|(i, v)| w[i] * v * self.node(i)).sum::<f64>() * h;
        let head = power_law_piece(g[0], g[1], h, self.r_min, End::Head)?;
        let tail = power_law_piece(g[self.m - 1], g[self.m - 2], h, self.r_max, End::Tail)?;
        if !interior.is_finite() {
            return Err(Error::Numerical("non-finite radial quadrature".into()));
        }
        Ok(QuadratureParts { head, interior, tail })
    }

    /// `∫_0^{r_min} g dr` from a power-law fit to the first two nodes.
    pub fn head_piece(&self, g: &[f64]) -> Result<f64> {
        power_law_piece(g[0], g[1], self.log_step(), self.r_min, End::Head)
    }

    /// `∫_{r_max}^∞ g dr` from a power-law fit to the last two nodes.
    pub fn tail_piece(&self, g: &[f64]) -> Result<f64> {
        power_law_piece(g[self.m - 1], g[self.m - 2], self.log_step(), self.r_max, End::Tail)
    }

    /// `∫_{r ≥ δ} g(r) dr`, with the lower limit resolved by interpolation.
    pub fn integrate_from(&self, g: &[f64], delta: f64) -> Result<f64> {
        if delta <= self.r_min {
            return self.integrate(g);
        }
        // the head below r_min is never needed here, and may not exist
        let above = self.reverse_cumulative(g);
        Ok(self.interpolate(&above, delta) + self.tail_piece(g)?)
    }

    /// `∫_a^b g(r) dr` for `r_min ≤ a < b ≤ r_max`, no extrapolation.
    pub fn integrate_between(&self, g: &[f64], a: f64, b: f64) -> Result<f64> {
        if !(self.r_min <= a && a < b && b <= self.r_max) {
            return Err(Error::InvalidParameter(format!(
                "window [{a}, {b}] is not inside [{}, {}]",
                self.r_min, self.r_max
            )));
        }
        let cum = self.cumulative(g);
        Ok(self.interpolate(&cum, b) - self.interpolate(&cum, a))
    }
}

/// Split of a radial integral into its extrapolated and sampled parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureParts {
    pub head: f64,
    pub interior: f64,
    pub tail: f64,
}

impl QuadratureParts {
    pub fn total(&self) -> f64 {
        self.head + self.interior + self.tail
    }
}

enum End {
    Head,
    Tail,
}

fn power_law_piece(edge: f64, next: f64, h: f64, r: f64, end: End) -> Result<f64> {
    if edge == 0.0 {
        return Ok(0.0);
    }
    if next == 0.0 || edge.signum() != next.signum() {
        // no usable power law; the sampled part already carries the sign change
        return Ok(0.0);
    }
    let slope = (next / edge).ln() / h;
    match end {
        End::Head => {
            // g ~ r^p with p = slope measured outward
            let p = slope;
            if p <= -1.0 + 1e-9 {
                return Err(Error::Divergent {
                    integral: "radial integral near r = 0",
                    detail: format!("local power r^{p:.3} is not integrable"),
                });
            }
            Ok(edge * r / (p + 1.0))
        }
        End::Tail => {
            // slope measured inward, so the outward exponent is −slope
            let p = -slope;
            if p >= -1.0 - 1e-9 {
                if (edge * r).abs() < 1e-14 {
                    return Ok(0.0);
                }
                return Err(Error::Divergent {
                    integral: "radial integral at r = ∞",
                    detail: format!("local power r^{p:.3} is not integrable"),
                });
            }
            Ok(-edge * r / (p + 1.0))
        }
    }
}

/// Either kind of grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Grid {
    Cartesian(CartesianGrid),
    Radial(RadialGrid),
}

impl Grid {
    pub fn len(&self) -> usize {
        match self {
            Grid::Cartesian(g) => g.len(),
            Grid::Radial(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_cartesian(&self) -> Result<&CartesianGrid> {
        match self {
            Grid::Cartesian(g) => Ok(g),
            Grid::Radial(_) => Err(Error::Unsupported("operation requires a Cartesian grid".into())),
        }
    }

    pub fn as_radial(&self) -> Result<&RadialGrid> {
        match self {
            Grid::Radial(g) => Ok(g),
            Grid::Cartesian(_) => Err(Error::Unsupported("operation requires a radial grid".into())),
        }
    }
}

impl From<CartesianGrid> for Grid {
    fn from(g: CartesianGrid) -> Self {
        Grid::Cartesian(g)
    }
}

impl From<RadialGrid> for Grid {
    fn from(g: RadialGrid) -> Self {
        Grid::Radial(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cartesian_nodes_avoid_origin() {
        let g = CartesianGrid::new(3.0, 8).unwrap();
        let min_r = g.positions().map(|x| x.norm()).fold(f64::INFINITY, f64::min);
        assert!((min_r - 3f64.sqrt() * g.spacing() / 2.0).abs() < 1e-14);
        assert!(CartesianGrid::new(3.0, 7).is_err());
        assert!(CartesianGrid::new(-1.0, 8).is_err());
    }

    #[test]
    fn radial_grid_layout() {
        let g = RadialGrid::default();
        assert_eq!(g.node(0), 1e-4);
        assert_eq!(g.node(g.len() - 1), 40.0);
        let nodes = g.nodes();
        assert!(nodes.windows(2).all(|w| w[1] > w[0]));
        let r = g.refined();
        assert!((r.node(2 * 100) - g.node(100)).abs() < 1e-12 * g.node(100));
        assert!(RadialGrid::new(1.0, 0.5, 100).is_err());
    }

    #[test]
    fn integrates_gamma_profiles() {
        let g = RadialGrid::default();
        for &(p, lam) in &[(0i32, 1.0f64), (2, 0.5), (-1, 2.0)] {
            // ∫ r^{p+2} e^{−2λr} dr = Γ(p+3)/(2λ)^{p+3}
            let dens: Vec<f64> = g.nodes().iter().map(|r| r.powi(p + 2) * (-2.0 * lam * r).exp()).collect();
            let fact: f64 = (1..=(p + 2)).map(|k| k as f64).product();
            let exact = fact / (2.0 * lam).powi(p + 3);
            let got = g.integrate(&dens).unwrap();
            assert!(((got - exact) / exact).abs() < 1e-9, "p={p}: {got} vs {exact}");
        }
    }

    #[test]
    fn detects_nonintegrable_head_and_tail() {
        let g = RadialGrid::default();
        let head: Vec<f64> = g.nodes().iter().map(|r| 1.0 / (r * r)).collect();
        assert!(matches!(g.integrate(&head), Err(Error::Divergent { .. })));
        let tail: Vec<f64> = g.nodes().iter().map(|r| 1.0 / r.sqrt()).collect();
        assert!(matches!(g.integrate(&tail), Err(Error::Divergent { .. })));
    }

    #[test]
    fn integrate_from_lower_limit() {
        let g = RadialGrid::default();
        let dens: Vec<f64> = g.nodes().iter().map(|r| (-r).exp()).collect();
        let got = g.integrate_from(&dens, 0.37).unwrap();
        assert!((got - (-0.37f64).exp()).abs() < 1e-10);
    }
}
