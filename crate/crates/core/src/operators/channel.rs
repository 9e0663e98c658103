//! Partial-wave representation in a single spin-orbit channel.
//!
//! Conventions: a Pauli spinor in channel κ is `f(r) Ω_κ(x̂)`, a Dirac spinor
//! is `(f Ω_κ, i g Ω_{−κ})`, with `σ·L Ω_κ = (−κ−1) Ω_κ` and
//! `(σ·x̂) Ω_κ = −Ω_{−κ}`. The spherical spinors are normalized on the unit
//! sphere and taken in their top `m_j = j` state, so profile integrals carry
//! no `4π`.

use std::f64::consts::PI;

use super::FreeDiracParams;
use crate::algebra::{contract_sigma, Vec3, C64, I, ZERO};
use crate::discretization::{CartesianGrid, Field, RadialGrid, WeightKind};
use crate::error::{Error, Result};

fn check_kappa(kappa: i32) -> Result<()> {
    if kappa == 0 {
        Err(Error::InvalidParameter("spin-orbit number kappa must be nonzero".into()))
    } else {
        Ok(())
    }
}

/// `Y_ℓℓ(x̂)` with the Condon–Shortley phase.
fn top_harmonic(l: u32, u: Vec3) -> C64 {
    let mut fact = 1.0;
    for k in 1..=(2 * l + 1) {
        fact *= k as f64;
    }
    let mut lf = 1.0;
    for k in 1..=l {
        lf *= k as f64;
    }
    let c = (fact / (4.0 * PI)).sqrt() / (2f64.powi(l as i32) * lf);
    let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
    C64::new(u.0[0], u.0[1]).powu(l) * (sign * c)
}

/// `Ω_κ(x̂)` in its `m_j = j` state.
pub fn spherical_spinor(kappa: i32, x: Vec3) -> Result<[C64; 2]> {
    check_kappa(kappa)?;
    let u = x.unit();
    if kappa < 0 {
        let l = (-kappa - 1) as u32;
        Ok([top_harmonic(l, u), ZERO])
    } else {
        let base = spherical_spinor(-kappa, x)?;
        let s = contract_sigma(u).apply(&base);
        Ok([-s[0], -s[1]])
    }
}

fn weighted(grid: &RadialGrid, dens: impl Fn(usize) -> f64, w: WeightKind) -> Result<f64> {
    let mut vals = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let r = grid.node(i);
        let wr = w.at(r).ok_or_else(|| Error::Unsupported("H^1/2 weight on a radial channel".into()))?;
        vals.push(wr * dens(i) * r * r);
    }
    grid.integrate(&vals)
}

/// Pauli spinor `f(r) Ω_κ(x̂)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliChannel {
    kappa: i32,
    grid: RadialGrid,
    profile: Vec<C64>,
}

impl PauliChannel {
    pub fn new(kappa: i32, grid: RadialGrid, profile: Vec<C64>) -> Result<Self> {
        check_kappa(kappa)?;
        if profile.len() != grid.len() {
            return Err(Error::GridMismatch("profile length differs from radial grid".into()));
        }
        Ok(PauliChannel { kappa, grid, profile })
    }

    pub fn from_fn(kappa: i32, grid: RadialGrid, f: impl Fn(f64) -> C64) -> Result<Self> {
        Self::new(kappa, grid, grid.nodes().into_iter().map(f).collect())
    }

    pub fn kappa(&self) -> i32 {
        self.kappa
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn profile(&self) -> &[C64] {
        &self.profile
    }

    /// `∂_r φ`, still in channel κ.
    pub fn radial_derivative(&self) -> PauliChannel {
        PauliChannel { profile: self.grid.derivative(&self.profile), ..self.clone() }
    }

    /// `σ·∇(fΩ_κ) = −(f′ + (1+κ)f/r) Ω_{−κ}`.
    pub fn sigma_grad(&self) -> PauliChannel {
        let df = self.grid.derivative(&self.profile);
        let k1 = 1.0 + self.kappa as f64;
        let profile = df
            .iter()
            .zip(&self.profile)
            .enumerate()
            .map(|(i, (d, f))| -(d + f * (k1 / self.grid.node(i))))
            .collect();
        PauliChannel { kappa: -self.kappa, grid: self.grid, profile }
    }

    /// `σ·L` eigenvalue of this channel.
    pub fn spin_orbit_eigenvalue(&self) -> f64 {
        -(self.kappa as f64) - 1.0
    }

    pub fn weighted_norm_sq(&self, w: WeightKind) -> Result<f64> {
        weighted(&self.grid, |i| self.profile[i].norm_sqr(), w)
    }

    pub fn evaluate(&self, x: Vec3) -> Result<[C64; 2]> {
        let f = self.grid.interpolate(&self.profile, x.norm());
        let om = spherical_spinor(self.kappa, x)?;
        Ok([f * om[0], f * om[1]])
    }

    pub fn embed(&self, grid: CartesianGrid) -> Result<Field> {
        let om: Vec<[C64; 2]> = grid.positions().map(|x| spherical_spinor(self.kappa, x)).collect::<Result<_>>()?;
        let mut out = Field::zeros(grid, 2)?;
        for (idx, o) in om.iter().enumerate() {
            let f = self.grid.interpolate(&self.profile, grid.position(idx).norm());
            out.component_mut(0)[idx] = f * o[0];
            out.component_mut(1)[idx] = f * o[1];
        }
        Ok(out)
    }
}

/// Dirac spinor `(f(r) Ω_κ, i g(r) Ω_{−κ})`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialChannel {
    kappa: i32,
    grid: RadialGrid,
    upper: Vec<C64>,
    lower: Vec<C64>,
}

impl RadialChannel {
    pub fn new(kappa: i32, grid: RadialGrid, upper: Vec<C64>, lower: Vec<C64>) -> Result<Self> {
        check_kappa(kappa)?;
        if upper.len() != grid.len() || lower.len() != grid.len() {
            return Err(Error::GridMismatch("profile length differs from radial grid".into()));
        }
        Ok(RadialChannel { kappa, grid, upper, lower })
    }

    /// Profiles from `r ↦ (f(r), g(r))`.
    pub fn from_fn(kappa: i32, grid: RadialGrid, fg: impl Fn(f64) -> (C64, C64)) -> Result<Self> {
        let (upper, lower) = grid.nodes().into_iter().map(fg).unzip();
        Self::new(kappa, grid, upper, lower)
    }

    pub fn kappa(&self) -> i32 {
        self.kappa
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn upper(&self) -> &[C64] {
        &self.upper
    }

    pub fn lower(&self) -> &[C64] {
        &self.lower
    }

    /// φ as a Pauli channel.
    pub fn upper_channel(&self) -> PauliChannel {
        PauliChannel { kappa: self.kappa, grid: self.grid, profile: self.upper.clone() }
    }

    /// χ as a Pauli channel: `i g Ω_{−κ}`.
    pub fn lower_channel(&self) -> PauliChannel {
        PauliChannel { kappa: -self.kappa, grid: self.grid, profile: self.lower.iter().map(|g| I * g).collect() }
    }

    fn with_profiles(&self, upper: Vec<C64>, lower: Vec<C64>) -> RadialChannel {
        RadialChannel { kappa: self.kappa, grid: self.grid, upper, lower }
    }

    /// `(−iα·∇ + mβ)ψ`:
    /// `(f, g) ↦ (m f − g′ − (1−κ) g/r, f′ + (1+κ) f/r − m g)`.
    pub fn free_dirac(&self, mass: f64) -> RadialChannel {
        let k = self.kappa as f64;
        let df = self.grid.derivative(&self.upper);
        let dg = self.grid.derivative(&self.lower);
        let mut up = Vec::with_capacity(self.upper.len());
        let mut lo = Vec::with_capacity(self.upper.len());
        for i in 0..self.upper.len() {
            let r = self.grid.node(i);
            let (f, g) = (self.upper[i], self.lower[i]);
            up.push(f * mass - dg[i] - g * ((1.0 - k) / r));
            lo.push(df[i] + f * ((1.0 + k) / r) - g * mass);
        }
        self.with_profiles(up, lo)
    }

    /// `iα·∇ψ`.
    pub fn i_alpha_grad(&self) -> RadialChannel {
        // iα·∇ = −H₀ + mβ for any m; take m = 0
        self.free_dirac(0.0).scaled(C64::new(-1.0, 0.0))
    }

    /// `(iα·∇ − mβ ± iε)ψ`.
    pub fn dirac_operator(&self, p: &FreeDiracParams) -> RadialChannel {
        let z = I * (p.sign.value() * p.shift);
        let h = self.free_dirac(p.mass);
        let up = h.upper.iter().zip(&self.upper).map(|(a, f)| -a + z * f).collect();
        let lo = h.lower.iter().zip(&self.lower).map(|(a, g)| -a + z * g).collect();
        self.with_profiles(up, lo)
    }

    pub fn scaled(&self, s: C64) -> RadialChannel {
        self.with_profiles(self.upper.iter().map(|v| v * s).collect(), self.lower.iter().map(|v| v * s).collect())
    }

    pub fn sub(&self, other: &RadialChannel) -> Result<RadialChannel> {
        if self.kappa != other.kappa || self.grid != other.grid {
            return Err(Error::GridMismatch("channels differ in kappa or grid".into()));
        }
        Ok(self.with_profiles(
            self.upper.iter().zip(&other.upper).map(|(a, b)| a - b).collect(),
            self.lower.iter().zip(&other.lower).map(|(a, b)| a - b).collect(),
        ))
    }

    /// Pointwise `|ψ|²` on the sphere average: `|f|² + |g|²`.
    pub fn density(&self) -> Vec<f64> {
        self.upper.iter().zip(&self.lower).map(|(f, g)| f.norm_sqr() + g.norm_sqr()).collect()
    }

    /// `∫ w |ψ|² dx = ∫ w (|f|² + |g|²) r² dr`.
    pub fn weighted_norm_sq(&self, w: WeightKind) -> Result<f64> {
        let d = self.density();
        weighted(&self.grid, |i| d[i], w)
    }

    pub fn evaluate(&self, x: Vec3) -> Result<[C64; 4]> {
        let r = x.norm();
        let f = self.grid.interpolate(&self.upper, r);
        let g = self.grid.interpolate(&self.lower, r);
        let a = spherical_spinor(self.kappa, x)?;
        let b = spherical_spinor(-self.kappa, x)?;
        Ok([f * a[0], f * a[1], I * g * b[0], I * g * b[1]])
    }

    /// Samples the spinor on a Cartesian grid.
    pub fn embed(&self, grid: CartesianGrid) -> Result<Field> {
        let mut out = Field::zeros(grid, 4)?;
        for idx in 0..grid.len() {
            let v = self.evaluate(grid.position(idx))?;
            for (a, val) in v.iter().enumerate() {
                out.component_mut(a)[idx] = *val;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spherical_spinor_relations() {
        let x = Vec3::new(0.3, -0.7, 0.4);
        for kappa in [-3, -2, -1, 1, 2, 3] {
            let om = spherical_spinor(kappa, x).unwrap();
            let flipped = contract_sigma(x.unit()).apply(&om);
            let other = spherical_spinor(-kappa, x).unwrap();
            assert!((flipped[0] + other[0]).norm() < 1e-14 && (flipped[1] + other[1]).norm() < 1e-14);
        }
        // Ω_{−1} is the constant (1, 0)/√(4π)
        let om = spherical_spinor(-1, x).unwrap();
        assert!((om[0].re - 1.0 / (4.0 * PI).sqrt()).abs() < 1e-15);
        assert!(spherical_spinor(0, x).is_err());
    }

    #[test]
    fn sphere_normalization() {
        // ∫_{S²} |Ω_κ|² = 1, by Gauss–Legendre × uniform azimuth
        let (nodes, weights) = super::super::gauss_legendre(24);
        let nphi = 48;
        for kappa in [-3, -1, 2] {
            let mut acc = 0.0;
            for (c, w) in nodes.iter().zip(&weights) {
                let s = (1.0 - c * c).sqrt();
                for j in 0..nphi {
                    let ph = 2.0 * PI * j as f64 / nphi as f64;
                    let om = spherical_spinor(kappa, Vec3::new(s * ph.cos(), s * ph.sin(), *c)).unwrap();
                    acc += w * (om[0].norm_sqr() + om[1].norm_sqr()) * 2.0 * PI / nphi as f64;
                }
            }
            assert!((acc - 1.0).abs() < 1e-12, "kappa {kappa}: {acc}");
        }
    }

    #[test]
    fn channel_norm_of_exponential() {
        let g = RadialGrid::default();
        let ch = RadialChannel::from_fn(-1, g, |r| (C64::new((-r).exp(), 0.0), ZERO)).unwrap();
        assert!((ch.weighted_norm_sq(WeightKind::One).unwrap() - 0.25).abs() < 1e-10);
    }

    #[test]
    fn sigma_grad_maps_kappa() {
        let g = RadialGrid::default();
        let ch = PauliChannel::from_fn(-1, g, |r| C64::new((-r).exp(), 0.0)).unwrap();
        let s = ch.sigma_grad();
        assert_eq!(s.kappa(), 1);
        // κ = −1: σ·∇(fΩ) = −f′ Ω_{+1} = f Ω_{+1} for f = e^{−r}
        let i = 1000;
        assert!((s.profile()[i] - ch.profile()[i]).norm() < 1e-9 * ch.profile()[i].norm());
        assert_eq!(ch.spin_orbit_eigenvalue(), 0.0);
    }
}
