use std::fmt;
use std::sync::Arc;

use super::{MatrixPotential, RadialProfile};
use crate::discretization::RadialGrid;
use crate::error::{Error, Result};

/// A non-negative radial profile `V(r)`.
#[derive(Clone)]
pub struct RadialScalarPotential {
    profile: RadialProfile,
    label: String,
}

impl fmt::Debug for RadialScalarPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialScalarPotential").field("label", &self.label).finish()
    }
}

/// `h⁺(r) = r⁻²∫₀ʳ V t² dt` and `h⁻(r) = r²∫_r^∞ V t⁻² dt` on a radial grid.
#[derive(Debug, Clone, PartialEq)]
pub struct HProfiles {
    pub grid: RadialGrid,
    pub h_plus: Vec<f64>,
    pub h_minus: Vec<f64>,
    pub sup_plus: f64,
    pub sup_minus: f64,
}

impl HProfiles {
    /// Relative residuals of `2h⁺/r + h⁺′ = V` and `2h⁻/r − h⁻′ = V`,
    /// measured away from the stencil-affected ends.
    pub fn ode_residuals(&self, v: &[f64]) -> (f64, f64) {
        let dp = self.grid.derivative(&self.h_plus);
        let dm = self.grid.derivative(&self.h_minus);
        let (mut ep, mut em, mut scale) = (0.0_f64, 0.0_f64, 0.0_f64);
        let skip = 8;
        for i in skip..self.grid.len() - skip {
            let r = self.grid.node(i);
            ep = ep.max((2.0 * self.h_plus[i] / r + dp[i] - v[i]).abs() * r);
            em = em.max((2.0 * self.h_minus[i] / r - dm[i] - v[i]).abs() * r);
            scale = scale.max(v[i].abs() * r);
        }
        let s = if scale > 0.0 { scale } else { 1.0 };
        (ep / s, em / s)
    }
}

impl RadialScalarPotential {
    pub fn new(label: impl Into<String>, profile: RadialProfile) -> Self {
        RadialScalarPotential { profile, label: label.into() }
    }

    /// `V = ν/r`.
    pub fn coulomb(nu: f64) -> Self {
        Self::new(format!("{nu}/r"), Arc::new(move |r| nu / r))
    }

    /// `V = ν e^{−μr}/r`.
    pub fn yukawa(nu: f64, screening: f64) -> Self {
        Self::new(format!("{nu} exp(-{screening} r)/r"), Arc::new(move |r| nu * (-screening * r).exp() / r))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn profile(&self) -> &RadialProfile {
        &self.profile
    }

    pub fn at(&self, r: f64) -> f64 {
        (self.profile)(r)
    }

    pub fn sample(&self, grid: &RadialGrid) -> Vec<f64> {
        grid.nodes().into_iter().map(|r| self.at(r)).collect()
    }

    /// `V(|x|)·𝕀₄`.
    pub fn to_matrix(&self) -> Result<MatrixPotential> {
        MatrixPotential::radial_scalar(self.profile.clone())
    }

    /// Tabulates h⁺ and h⁻. The pieces of the integrals outside the grid
    /// come from local power-law fits at the ends; a non-integrable end is
    /// reported by name.
    pub fn h_plus_minus(&self, grid: &RadialGrid) -> Result<HProfiles> {
        let v = self.sample(grid);
        if let Some((i, bad)) = v.iter().enumerate().find(|(_, x)| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "V must be finite and non-negative, got {bad} at r = {:e}",
                grid.node(i)
            )));
        }
        let nodes = grid.nodes();
        let inner: Vec<f64> = v.iter().zip(&nodes).map(|(v, r)| v * r * r).collect();
        let outer: Vec<f64> = v.iter().zip(&nodes).map(|(v, r)| v / (r * r)).collect();

        let head = grid.head_piece(&inner).map_err(|e| rename(e, "h+ integral of V t^2 near 0"))?;
        let tail = grid.tail_piece(&outer).map_err(|e| rename(e, "h- integral of V / t^2 at infinity"))?;
        let cum_in = grid.cumulative(&inner);
        let rev_out = grid.reverse_cumulative(&outer);

        let h_plus: Vec<f64> = nodes.iter().zip(&cum_in).map(|(r, c)| (head + c) / (r * r)).collect();
        let h_minus: Vec<f64> = nodes.iter().zip(&rev_out).map(|(r, c)| r * r * (c + tail)).collect();
        if h_plus.iter().chain(&h_minus).any(|x| !x.is_finite()) {
            return Err(Error::Numerical("non-finite h profile".into()));
        }
        let sup = |h: &[f64]| h.iter().fold(0.0_f64, |a, b| a.max(b.abs()));
        Ok(HProfiles { grid: *grid, sup_plus: sup(&h_plus), sup_minus: sup(&h_minus), h_plus, h_minus })
    }
}

fn rename(e: Error, integral: &'static str) -> Error {
    match e {
        Error::Divergent { detail, .. } => Error::Divergent { integral, detail },
        other => other,
    }
}
