use std::f64::consts::PI;

use super::grid::Grid;
use crate::algebra::{Vec3, C64, ZERO};
use crate::error::{Error, Result};

/// Weights available for `∫ w(x)|ψ|² dx`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    One,
    AbsX,
    InvAbsX,
    OnePlusAbsX,
    /// `∫ (1 + |ξ|²)^{1/2} |ψ̂|²`, Cartesian grids only.
    HHalf,
}

impl WeightKind {
    /// Pointwise weight at radius `r` (not defined for `HHalf`).
    pub fn at(self, r: f64) -> Option<f64> {
        match self {
            WeightKind::One => Some(1.0),
            WeightKind::AbsX => Some(r),
            WeightKind::InvAbsX => Some(1.0 / r),
            WeightKind::OnePlusAbsX => Some(1.0 + r),
            WeightKind::HHalf => None,
        }
    }
}

/// Multi-component complex field sampled on a grid, stored one buffer per
/// component. Arity 4 holds a spinor `(φ, χ)`, arity 2 a Pauli spinor.
///
/// On a radial grid the samples describe an isotropic field: node `i` carries
/// the common value on the sphere `|x| = r_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    comps: Vec<Vec<C64>>,
}

pub type SpinorField = Field;

fn check_arity(arity: usize) -> Result<()> {
    if arity == 2 || arity == 4 {
        Ok(())
    } else {
        Err(Error::ArityMismatch { expected: 4, found: arity })
    }
}

impl Field {
    pub fn zeros(grid: impl Into<Grid>, arity: usize) -> Result<Self> {
        check_arity(arity)?;
        let grid = grid.into();
        Ok(Field { comps: vec![vec![ZERO; grid.len()]; arity], grid })
    }

    pub fn from_components(grid: impl Into<Grid>, comps: Vec<Vec<C64>>) -> Result<Self> {
        check_arity(comps.len())?;
        let grid = grid.into();
        if let Some(c) = comps.iter().find(|c| c.len() != grid.len()) {
            return Err(Error::GridMismatch(format!("component has {} samples, grid has {}", c.len(), grid.len())));
        }
        Ok(Field { grid, comps })
    }

    /// Samples `f(x, out)` at every node. Radial nodes are passed as `(0, 0, r)`.
    pub fn from_fn(grid: impl Into<Grid>, arity: usize, f: impl Fn(Vec3, &mut [C64])) -> Result<Self> {
        let mut field = Field::zeros(grid, arity)?;
        let mut buf = vec![ZERO; arity];
        for idx in 0..field.len() {
            let x = field.position(idx);
            buf.iter_mut().for_each(|v| *v = ZERO);
            f(x, &mut buf);
            for (c, v) in field.comps.iter_mut().zip(&buf) {
                c[idx] = *v;
            }
        }
        Ok(field)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn arity(&self) -> usize {
        self.comps.len()
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn position(&self, idx: usize) -> Vec3 {
        match &self.grid {
            Grid::Cartesian(g) => g.position(idx),
            Grid::Radial(g) => Vec3::new(0.0, 0.0, g.node(idx)),
        }
    }

    pub fn radius(&self, idx: usize) -> f64 {
        match &self.grid {
            Grid::Cartesian(g) => g.position(idx).norm(),
            Grid::Radial(g) => g.node(idx),
        }
    }

    pub fn component(&self, a: usize) -> &[C64] {
        &self.comps[a]
    }

    pub fn component_mut(&mut self, a: usize) -> &mut [C64] {
        &mut self.comps[a]
    }

    pub fn components(&self) -> &[Vec<C64>] {
        &self.comps
    }

    pub fn into_components(self) -> Vec<Vec<C64>> {
        self.comps
    }

    pub fn value(&self, idx: usize) -> Vec<C64> {
        self.comps.iter().map(|c| c[idx]).collect()
    }

    pub fn require_arity(&self, arity: usize) -> Result<()> {
        if self.arity() == arity {
            Ok(())
        } else {
            Err(Error::ArityMismatch { expected: arity, found: self.arity() })
        }
    }

    fn require_compatible(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("fields live on different grids".into()));
        }
        other.require_arity(self.arity())
    }

    /// Upper pair φ of a spinor.
    pub fn upper(&self) -> Result<Field> {
        self.require_arity(4)?;
        Ok(Field { grid: self.grid, comps: self.comps[..2].to_vec() })
    }

    /// Lower pair χ of a spinor.
    pub fn lower(&self) -> Result<Field> {
        self.require_arity(4)?;
        Ok(Field { grid: self.grid, comps: self.comps[2..].to_vec() })
    }

    pub fn from_pair(upper: &Field, lower: &Field) -> Result<Field> {
        upper.require_arity(2)?;
        upper.require_compatible(lower)?;
        let comps = upper.comps.iter().chain(&lower.comps).cloned().collect();
        Ok(Field { grid: upper.grid, comps })
    }

    pub fn scale(&mut self, s: C64) {
        self.comps.iter_mut().flatten().for_each(|v| *v *= s);
    }

    pub fn scaled(&self, s: C64) -> Field {
        let mut out = self.clone();
        out.scale(s);
        out
    }

    /// `self += s·other`.
    pub fn axpy(&mut self, s: C64, other: &Field) -> Result<()> {
        self.require_compatible(other)?;
        for (a, b) in self.comps.iter_mut().zip(&other.comps) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += s * y);
        }
        Ok(())
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        let mut out = self.clone();
        out.axpy(C64::new(-1.0, 0.0), other)?;
        Ok(out)
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        let mut out = self.clone();
        out.axpy(C64::new(1.0, 0.0), other)?;
        Ok(out)
    }

    /// Multiplies every node by a real function of the position.
    pub fn mul_real(&self, w: impl Fn(Vec3) -> f64) -> Field {
        let mut out = self.clone();
        for idx in 0..self.len() {
            let s = w(self.position(idx));
            out.comps.iter_mut().for_each(|c| c[idx] *= s);
        }
        out
    }

    /// Pointwise `|ψ(x_i)|²`.
    pub fn density(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.comps.iter().map(|c| c[i].norm_sqr()).sum()).collect()
    }

    /// First node holding a NaN or infinite value.
    pub fn first_non_finite(&self) -> Option<(usize, usize)> {
        self.comps.iter().enumerate().find_map(|(a, c)| {
            c.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())).map(|i| (a, i))
        })
    }

    pub fn is_finite(&self) -> bool {
        self.first_non_finite().is_none()
    }

    pub fn ensure_finite(&self, what: &str) -> Result<()> {
        match self.first_non_finite() {
            None => Ok(()),
            Some((a, i)) => {
                let x = self.position(i);
                Err(Error::Numerical(format!(
                    "{what}: non-finite value in component {a} at node {i} (x = {:.4}, {:.4}, {:.4})",
                    x.0[0], x.0[1], x.0[2]
                )))
            }
        }
    }

    /// `∫ w(x) d(x) dx` for a real density given per node.
    pub fn integrate_density(&self, density: &[f64], w: WeightKind) -> Result<f64> {
        let weight_at = |r: f64| {
            w.at(r).ok_or_else(|| Error::Unsupported("spectral weight has no pointwise form".into()))
        };
        match &self.grid {
            Grid::Cartesian(g) => {
                let mut acc = 0.0;
                for (i, d) in density.iter().enumerate() {
                    acc += weight_at(g.position(i).norm())? * d;
                }
                Ok(acc * g.cell_volume())
            }
            Grid::Radial(g) => {
                let mut dens = Vec::with_capacity(g.len());
                for (i, d) in density.iter().enumerate() {
                    let r = g.node(i);
                    dens.push(4.0 * PI * weight_at(r)? * d * r * r);
                }
                g.integrate(&dens)
            }
        }
    }

    /// `∫ w |ψ|²`; rectangle rule on Cartesian grids, log-grid quadrature on radial grids.
    pub fn weighted_norm_sq(&self, w: WeightKind) -> Result<f64> {
        if w == WeightKind::HHalf {
            return match &self.grid {
                Grid::Cartesian(_) => super::spectral::h_half_norm_sq(self),
                Grid::Radial(_) => Err(Error::Unsupported("H^1/2 weight on a radial grid".into())),
            };
        }
        self.integrate_density(&self.density(), w)
    }

    pub fn norm(&self) -> Result<f64> {
        Ok(self.weighted_norm_sq(WeightKind::One)?.sqrt())
    }

    /// `⟨self, other⟩ = ∫ Σ_a conj(self_a) other_a` (Cartesian rectangle rule).
    pub fn inner(&self, other: &Field) -> Result<C64> {
        self.require_compatible(other)?;
        let g = self.grid.as_cartesian()?;
        let mut acc = ZERO;
        for (a, b) in self.comps.iter().zip(&other.comps) {
            for (x, y) in a.iter().zip(b) {
                acc += x.conj() * y;
            }
        }
        Ok(acc * g.cell_volume())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::{CartesianGrid, RadialGrid};

    fn exp_profile(grid: Grid, lam: f64) -> Field {
        Field::from_fn(grid, 4, |x, out| out[0] = C64::new((-lam * x.norm()).exp(), 0.0)).unwrap()
    }

    #[test]
    fn gamma_integrals_on_radial_grid() {
        let f = exp_profile(RadialGrid::default().into(), 1.0);
        assert!((f.weighted_norm_sq(WeightKind::One).unwrap() - PI).abs() < 1e-9);
        assert!((f.weighted_norm_sq(WeightKind::AbsX).unwrap() - 1.5 * PI).abs() < 1e-9);
        assert!((f.weighted_norm_sq(WeightKind::InvAbsX).unwrap() - PI).abs() < 1e-9);
        assert!(matches!(f.weighted_norm_sq(WeightKind::HHalf), Err(Error::Unsupported(_))));
    }

    #[test]
    fn zero_field_has_zero_norms() {
        let z = Field::zeros(CartesianGrid::new(4.0, 8).unwrap(), 4).unwrap();
        for w in [WeightKind::One, WeightKind::AbsX, WeightKind::InvAbsX, WeightKind::OnePlusAbsX, WeightKind::HHalf] {
            assert_eq!(z.weighted_norm_sq(w).unwrap(), 0.0);
        }
    }

    #[test]
    fn split_and_join() {
        let f = exp_profile(RadialGrid::new(1e-3, 10.0, 64).unwrap().into(), 1.0);
        let joined = Field::from_pair(&f.upper().unwrap(), &f.lower().unwrap()).unwrap();
        assert_eq!(joined, f);
        assert!(f.upper().unwrap().upper().is_err());
    }

    #[test]
    fn reports_non_finite_location() {
        let mut f = Field::zeros(CartesianGrid::new(4.0, 8).unwrap(), 2).unwrap();
        f.component_mut(1)[5] = C64::new(f64::NAN, 0.0);
        assert_eq!(f.first_non_finite(), Some((1, 5)));
        assert!(matches!(f.ensure_finite("probe"), Err(Error::Numerical(_))));
    }
}
