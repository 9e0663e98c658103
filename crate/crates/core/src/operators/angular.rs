//! Angular momentum: spectral `σ·L` on Cartesian fields, and expansion in
//! `Y_ℓm χ_s` on spheres for the projectors onto the sign of `1 + σ·L`.

use std::f64::consts::PI;

use crate::algebra::{Vec3, C64, I, ZERO};
use crate::discretization::spectral::gradient;
use crate::discretization::{Field, RadialGrid};
use crate::error::{Error, Result};

pub const DEFAULT_L_MAX: usize = 8;

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Orthonormal `Y_ℓm(x̂)` with the Condon–Shortley phase.
pub fn spherical_harmonic(l: usize, m: i32, x: Vec3) -> C64 {
    let am = m.unsigned_abs() as usize;
    if am > l {
        return ZERO;
    }
    let u = x.unit();
    let ct = u.0[2].clamp(-1.0, 1.0);
    let st = (1.0 - ct * ct).max(0.0).sqrt();
    let phi = u.0[1].atan2(u.0[0]);
    // P_m^m, then upward in ℓ
    let mut pmm = 1.0;
    for k in 1..=am {
        pmm *= -((2 * k - 1) as f64) * st;
    }
    let p = if l == am {
        pmm
    } else {
        let mut p0 = pmm;
        let mut p1 = ct * (2 * am + 1) as f64 * pmm;
        for ll in (am + 2)..=l {
            let p2 = ((2 * ll - 1) as f64 * ct * p1 - (ll + am - 1) as f64 * p0) / (ll - am) as f64;
            p0 = p1;
            p1 = p2;
        }
        p1
    };
    let mut ratio = 1.0;
    for k in (l - am + 1)..=(l + am) {
        ratio /= k as f64;
    }
    let norm = ((2 * l + 1) as f64 / (4.0 * PI) * ratio).sqrt();
    let y = C64::from_polar(norm * p, am as f64 * phi);
    if m >= 0 {
        y
    } else if am % 2 == 0 {
        y.conj()
    } else {
        -y.conj()
    }
}

fn idx(l: usize, m: i32) -> usize {
    ((l * l + l) as i64 + m as i64) as usize
}

/// `(σ·L + 1)` sign class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectorSign {
    /// Positive spectral space of `1 + σ·L` (`j = ℓ + ½`).
    Positive,
    /// Negative spectral space (`j = ℓ − ½`).
    Negative,
}

/// Coefficients `a_s(ℓ, m)` of a two-component function on the unit sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularExpansion {
    l_max: usize,
    coeffs: [Vec<C64>; 2],
}

/// Quadrature on the unit sphere with the harmonics tabulated at its nodes.
struct SphereRule {
    dirs: Vec<Vec3>,
    weights: Vec<f64>,
    ylm: Vec<Vec<C64>>,
}

impl SphereRule {
    fn new(l_max: usize) -> Self {
        let nt = 2 * l_max + 2;
        let np = 4 * l_max + 4;
        let (ct, wt) = gauss_legendre(nt);
        let mut dirs = Vec::with_capacity(nt * np);
        let mut weights = Vec::with_capacity(nt * np);
        for (c, w) in ct.iter().zip(&wt) {
            let s = (1.0 - c * c).sqrt();
            for j in 0..np {
                let ph = 2.0 * PI * j as f64 / np as f64;
                dirs.push(Vec3::new(s * ph.cos(), s * ph.sin(), *c));
                weights.push(w * 2.0 * PI / np as f64);
            }
        }
        let n = (l_max + 1) * (l_max + 1);
        let ylm = dirs
            .iter()
            .map(|d| {
                let mut row = vec![ZERO; n];
                for l in 0..=l_max {
                    for m in -(l as i32)..=(l as i32) {
                        row[idx(l, m)] = spherical_harmonic(l, m, *d);
                    }
                }
                row
            })
            .collect();
        SphereRule { dirs, weights, ylm }
    }

    /// Coefficients and the energy not captured by them.
    fn expand(&self, l_max: usize, f: &dyn Fn(Vec3) -> [C64; 2]) -> (AngularExpansion, f64, f64) {
        let n = (l_max + 1) * (l_max + 1);
        let mut coeffs = [vec![ZERO; n], vec![ZERO; n]];
        let mut total = 0.0;
        for ((d, w), row) in self.dirs.iter().zip(&self.weights).zip(&self.ylm) {
            let v = f(*d);
            total += w * (v[0].norm_sqr() + v[1].norm_sqr());
            for (k, y) in row.iter().enumerate() {
                let yc = y.conj() * *w;
                coeffs[0][k] += yc * v[0];
                coeffs[1][k] += yc * v[1];
            }
        }
        let exp = AngularExpansion { l_max, coeffs };
        let kept = exp.energy();
        (exp, total, (total - kept).max(0.0))
    }
}

impl AngularExpansion {
    /// Expands `f` sampled on the unit sphere. Returns the expansion and the
    /// fraction of `∫|f|²` above `l_max`.
    pub fn from_fn(l_max: usize, f: impl Fn(Vec3) -> [C64; 2]) -> (AngularExpansion, f64) {
        let (e, total, lost) = SphereRule::new(l_max).expand(l_max, &f);
        (e, if total > 0.0 { lost / total } else { 0.0 })
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn coefficient(&self, s: usize, l: usize, m: i32) -> C64 {
        self.coeffs[s][idx(l, m)]
    }

    pub fn energy(&self) -> f64 {
        self.coeffs.iter().flatten().map(|c| c.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &AngularExpansion) -> C64 {
        self.coeffs.iter().flatten().zip(other.coeffs.iter().flatten()).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn sub(&self, other: &AngularExpansion) -> AngularExpansion {
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().flatten().zip(other.coeffs.iter().flatten()) {
            *a -= b;
        }
        out
    }

    pub fn add(&self, other: &AngularExpansion) -> AngularExpansion {
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().flatten().zip(other.coeffs.iter().flatten()) {
            *a += b;
        }
        out
    }

    /// `σ·L = σ_z L_z + ½(σ₊L₋ + σ₋L₊)` on the coefficients.
    pub fn spin_orbit(&self) -> AngularExpansion {
        let n = self.coeffs[0].len();
        let mut out = [vec![ZERO; n], vec![ZERO; n]];
        let (up, dn) = (&self.coeffs[0], &self.coeffs[1]);
        for l in 0..=self.l_max {
            let li = l as i32;
            for m in -li..=li {
                let k = idx(l, m);
                let mf = m as f64;
                out[0][k] += up[k] * mf;
                out[1][k] -= dn[k] * mf;
                // L₋ Y_{ℓ,m} lands on m − 1 (down component feeds up)
                if m > -li {
                    let c = (((li + m) * (li - m + 1)) as f64).sqrt();
                    out[0][idx(l, m - 1)] += dn[k] * c;
                }
                // L₊ Y_{ℓ,m} lands on m + 1 (up component feeds down)
                if m < li {
                    let c = (((li - m) * (li + m + 1)) as f64).sqrt();
                    out[1][idx(l, m + 1)] += up[k] * c;
                }
            }
        }
        AngularExpansion { l_max: self.l_max, coeffs: out }
    }

    /// `P± = ½(1 ± (1+σ·L)/|1+σ·L|)`; on each ℓ block `P₊ = (σ·L + ℓ + 1)/(2ℓ + 1)`.
    pub fn project(&self, sign: ProjectorSign) -> AngularExpansion {
        let so = self.spin_orbit();
        let mut out = self.clone();
        for l in 0..=self.l_max {
            let li = l as i32;
            let d = (2 * l + 1) as f64;
            for m in -li..=li {
                let k = idx(l, m);
                for s in 0..2 {
                    let plus = (so.coeffs[s][k] + self.coeffs[s][k] * (l as f64 + 1.0)) / d;
                    out.coeffs[s][k] = match sign {
                        ProjectorSign::Positive => plus,
                        ProjectorSign::Negative => self.coeffs[s][k] - plus,
                    };
                }
            }
        }
        out
    }

    pub fn evaluate(&self, x: Vec3) -> [C64; 2] {
        let mut v = [ZERO; 2];
        for l in 0..=self.l_max {
            for m in -(l as i32)..=(l as i32) {
                let y = spherical_harmonic(l, m, x);
                let k = idx(l, m);
                v[0] += self.coeffs[0][k] * y;
                v[1] += self.coeffs[1][k] * y;
            }
        }
        v
    }
}

/// A two-component field expanded on every sphere of a radial grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ShellExpansion {
    grid: RadialGrid,
    shells: Vec<AngularExpansion>,
    truncation: f64,
}

impl ShellExpansion {
    /// Expands `f(x)` on each sphere `|x| = r_i`. Fails if the relative energy
    /// above `l_max` exceeds `tolerance`.
    pub fn from_fn(grid: RadialGrid, l_max: usize, tolerance: f64, f: impl Fn(Vec3) -> [C64; 2]) -> Result<Self> {
        let rule = SphereRule::new(l_max);
        let mut shells = Vec::with_capacity(grid.len());
        let (mut total, mut lost) = (0.0, 0.0);
        for r in grid.nodes() {
            let (e, t, l) = rule.expand(l_max, &|u: Vec3| f(u.scale(r)));
            total += t * r * r;
            lost += l * r * r;
            shells.push(e);
        }
        let truncation = if total > 0.0 { lost / total } else { 0.0 };
        if truncation > tolerance {
            return Err(Error::Truncation { l_max, residual: truncation, tolerance });
        }
        Ok(ShellExpansion { grid, shells, truncation })
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    /// Relative energy discarded above `l_max`.
    pub fn truncation(&self) -> f64 {
        self.truncation
    }

    pub fn shells(&self) -> &[AngularExpansion] {
        &self.shells
    }

    fn map(&self, f: impl Fn(&AngularExpansion) -> AngularExpansion) -> ShellExpansion {
        ShellExpansion { grid: self.grid, shells: self.shells.iter().map(f).collect(), truncation: self.truncation }
    }

    pub fn project(&self, sign: ProjectorSign) -> ShellExpansion {
        self.map(|s| s.project(sign))
    }

    pub fn spin_orbit(&self) -> ShellExpansion {
        self.map(|s| s.spin_orbit())
    }

    pub fn add(&self, other: &ShellExpansion) -> ShellExpansion {
        ShellExpansion {
            grid: self.grid,
            shells: self.shells.iter().zip(&other.shells).map(|(a, b)| a.add(b)).collect(),
            truncation: self.truncation,
        }
    }

    pub fn sub(&self, other: &ShellExpansion) -> ShellExpansion {
        ShellExpansion {
            grid: self.grid,
            shells: self.shells.iter().zip(&other.shells).map(|(a, b)| a.sub(b)).collect(),
            truncation: self.truncation,
        }
    }

    /// `∫ |φ|² dx` of the expanded field.
    pub fn norm_sq(&self) -> Result<f64> {
        let dens: Vec<f64> =
            self.shells.iter().zip(self.grid.nodes()).map(|(s, r)| s.energy() * r * r).collect();
        self.grid.integrate(&dens)
    }

    /// `∫ conj(self)·other dx`.
    pub fn inner(&self, other: &ShellExpansion) -> Result<C64> {
        let nodes = self.grid.nodes();
        let mut re = Vec::with_capacity(nodes.len());
        let mut im = Vec::with_capacity(nodes.len());
        for ((a, b), r) in self.shells.iter().zip(&other.shells).zip(nodes) {
            let v = a.inner(b) * (r * r);
            re.push(v.re);
            im.push(v.im);
        }
        Ok(C64::new(self.grid.integrate(&re)?, self.grid.integrate(&im)?))
    }
}

/// `(σ·L)φ` with `L = −i x × ∇`, using the spectral gradient.
pub fn apply_spin_orbit(phi: &Field) -> Result<Field> {
    phi.require_arity(2)?;
    let [dx, dy, dz] = gradient(phi)?;
    let mut out = Field::zeros(*phi.grid(), 2)?;
    for n in 0..phi.len() {
        let x = phi.position(n);
        let [x1, x2, x3] = x.0;
        let l = |a: usize| -> [C64; 3] {
            let g = [dx.component(a)[n], dy.component(a)[n], dz.component(a)[n]];
            [
                -I * (g[2] * x2 - g[1] * x3),
                -I * (g[0] * x3 - g[2] * x1),
                -I * (g[1] * x1 - g[0] * x2),
            ]
        };
        let lu = l(0);
        let ld = l(1);
        out.component_mut(0)[n] = lu[2] + (ld[0] - I * ld[1]);
        out.component_mut(1)[n] = (lu[0] + I * lu[1]) - ld[2];
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::CartesianGrid;
    use crate::operators::spherical_spinor;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(6);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(10)).sum();
        assert!((s - 2.0 / 11.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn harmonics_are_orthonormal() {
        let (a, _) = AngularExpansion::from_fn(4, |u| [spherical_harmonic(3, -2, u), ZERO]);
        assert!((a.coefficient(0, 3, -2) - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((a.energy() - 1.0).abs() < 1e-12);
        let y10 = spherical_harmonic(1, 0, Vec3::new(0.0, 0.0, 1.0));
        assert!((y10.re - (3.0 / (4.0 * PI)).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn spin_orbit_eigenvalues_of_channels() {
        for kappa in [-3, -2, -1, 1, 2, 3] {
            let (a, lost) = AngularExpansion::from_fn(4, |u| spherical_spinor(kappa, u).unwrap());
            assert!(lost < 1e-12);
            let so = a.spin_orbit();
            let expect = -(kappa as f64) - 1.0;
            let diff = so.sub(&AngularExpansion { l_max: 4, coeffs: [
                a.coeffs[0].iter().map(|c| c * expect).collect(),
                a.coeffs[1].iter().map(|c| c * expect).collect(),
            ] });
            assert!(diff.energy() < 1e-24, "kappa {kappa}");
        }
    }

    #[test]
    fn projectors_on_channels() {
        let (plus, _) = AngularExpansion::from_fn(3, |u| spherical_spinor(-1, u).unwrap());
        assert!(plus.project(ProjectorSign::Negative).energy() < 1e-26);
        let (minus, _) = AngularExpansion::from_fn(3, |u| spherical_spinor(1, u).unwrap());
        assert!(minus.project(ProjectorSign::Positive).energy() < 1e-26);
    }

    #[test]
    fn spectral_spin_orbit_matches_channels() {
        let g = CartesianGrid::new(7.0, 32).unwrap();
        for (kappa, eig) in [(-1, 0.0), (1, -2.0), (-2, 1.0)] {
            let phi = Field::from_fn(g, 2, |x, o| {
                let om = spherical_spinor(kappa, x).unwrap();
                // r^ℓ keeps the sample smooth at the origin
                let l = if kappa < 0 { -kappa - 1 } else { kappa };
                let f = x.norm().powi(l) * (-0.5 * x.norm_sq()).exp();
                o[0] = om[0] * f;
                o[1] = om[1] * f;
            })
            .unwrap();
            let so = apply_spin_orbit(&phi).unwrap();
            let err = so.sub(&phi.scaled(C64::new(eig, 0.0))).unwrap().norm().unwrap();
            assert!(err < 1e-6 * phi.norm().unwrap(), "kappa {kappa}: {err}");
        }
    }

    #[test]
    fn truncation_is_reported() {
        let grid = RadialGrid::new(0.1, 2.0, 16).unwrap();
        let res = ShellExpansion::from_fn(grid, 1, 1e-10, |x| {
            let om = spherical_spinor(-4, x).unwrap();
            [om[0] * x.norm(), om[1]]
        });
        assert!(matches!(res, Err(Error::Truncation { .. })));
    }
}
