use serde::{Deserialize, Serialize};

use super::unit_phase;
use statrs::function::gamma::gamma;

use crate::algebra::C64;
use crate::discretization::RadialGrid;
use crate::error::{Error, Result};
use crate::operators::{PauliChannel, RadialChannel};

/// The explicit extremal fields, all in the κ = −1 channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyTag {
    /// `φ = r^{−1+δ} e^{−μr} C`, `χ = ((ε+im)/μ) σ·x̂ φ`, `μ = √(ε²+m²)`.
    Psi0,
    /// `φ = e^{−λr} C`, with `χ` carrying the same phase as `Psi0`.
    ExpLambda,
    /// `φ₀ = r^{−1} e^{−μr} C`, integrated over `r ≥ cutoff`.
    Phi0Radial,
}

/// One member of an extremal family. The constant spinor `C` is the top
/// state of `Ω_{−1}`; other choices are rotations and change nothing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremizerFamily {
    pub tag: FamilyTag,
    pub eps: f64,
    pub mass: f64,
    /// Decay rate of the radial profile.
    pub lambda: f64,
    /// Regularization exponent: the core is `r^{−1+δ}`.
    pub exponent: f64,
    /// Lower limit of the radial integrals.
    pub cutoff: f64,
}

impl ExtremizerFamily {
    fn checked(self) -> Result<Self> {
        let ok = self.eps.is_finite()
            && self.eps > 0.0
            && self.mass.is_finite()
            && self.mass >= 0.0
            && self.lambda.is_finite()
            && self.lambda > 0.0
            && self.exponent.is_finite()
            && self.exponent >= 0.0
            && self.cutoff.is_finite()
            && self.cutoff >= 0.0;
        if ok {
            Ok(self)
        } else {
            Err(Error::InvalidParameter(format!("invalid extremizer parameters {self:?}")))
        }
    }

    /// `ψ₀^{ε,m}` regularized to `r^{−1+δ}`.
    pub fn psi0(eps: f64, mass: f64, exponent: f64) -> Result<Self> {
        ExtremizerFamily { tag: FamilyTag::Psi0, eps, mass, lambda: eps.hypot(mass), exponent, cutoff: 0.0 }.checked()
    }

    /// `e^{−λr}` profile.
    pub fn exp_lambda(eps: f64, mass: f64, lambda: f64) -> Result<Self> {
        ExtremizerFamily { tag: FamilyTag::ExpLambda, eps, mass, lambda, exponent: 1.0, cutoff: 0.0 }.checked()
    }

    /// The extremal decay rate `3√(ε² + m²)` of the 8/9 inequality.
    pub fn exp_lambda_extremal(eps: f64, mass: f64) -> Result<Self> {
        Self::exp_lambda(eps, mass, 3.0 * eps.hypot(mass))
    }

    /// `r^{−1}e^{−μr}` with the integrals taken over `r ≥ cutoff`.
    pub fn phi0_radial(eps: f64, mass: f64, cutoff: f64) -> Result<Self> {
        ExtremizerFamily { tag: FamilyTag::Phi0Radial, eps, mass, lambda: eps.hypot(mass), exponent: 0.0, cutoff }
            .checked()
    }

    pub fn name(&self) -> &'static str {
        match self.tag {
            FamilyTag::Psi0 => "psi0",
            FamilyTag::ExpLambda => "exp_lambda",
            FamilyTag::Phi0Radial => "phi0_radial",
        }
    }

    /// Power of r in the profile: `−1 + δ`.
    pub fn power(&self) -> f64 {
        self.exponent - 1.0
    }

    /// `r^{p} e^{−λr}`.
    pub fn profile(&self, r: f64) -> f64 {
        r.powf(self.power()) * (-self.lambda * r).exp()
    }

    /// `∫₀^∞ |profile|² r² dr = Γ(2p+3)/(2λ)^{2p+3}`.
    pub fn profile_norm_sq(&self) -> f64 {
        let a = 2.0 * self.power() + 3.0;
        gamma(a) / (2.0 * self.lambda).powf(a)
    }

    /// Phase `(ε + im)/√(ε² + m²)` of the lower component.
    pub fn phase(&self) -> C64 {
        unit_phase(self.eps, self.mass)
    }

    /// Upper component alone, normalized in L².
    pub fn pauli(&self, grid: RadialGrid) -> Result<PauliChannel> {
        let s = 1.0 / self.profile_norm_sq().sqrt();
        PauliChannel::from_fn(-1, grid, |r| C64::new(s * self.profile(r), 0.0))
    }

    /// Dirac spinor `(fΩ₋₁, i·phase·f Ω₁)`, normalized in L².
    pub fn dirac(&self, grid: RadialGrid) -> Result<RadialChannel> {
        let s = 1.0 / (2.0 * self.profile_norm_sq()).sqrt();
        let lower = C64::new(0.0, 1.0) * self.phase();
        RadialChannel::from_fn(-1, grid, |r| {
            let f = C64::new(s * self.profile(r), 0.0);
            (f, lower * f)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::WeightKind;

    #[test]
    fn families_are_normalized() {
        let grid = RadialGrid::default();
        for fam in [
            ExtremizerFamily::psi0(1.0, 1.0, 0.3).unwrap(),
            ExtremizerFamily::exp_lambda_extremal(1.0, 0.0).unwrap(),
            ExtremizerFamily::phi0_radial(1.0, 0.0, 0.0).unwrap(),
        ] {
            let d = fam.dirac(grid).unwrap().weighted_norm_sq(WeightKind::One).unwrap();
            let p = fam.pauli(grid).unwrap().weighted_norm_sq(WeightKind::One).unwrap();
            // the two-node head fit is exact for pure powers only; the
            // e^{−2λr} factor leaves an O(λ r_min²) error
            assert!((d - 1.0).abs() < 1e-7, "{fam:?} {d}");
            assert!((p - 1.0).abs() < 1e-7, "{fam:?} {p}");
        }
        assert!(ExtremizerFamily::psi0(0.0, 1.0, 0.1).is_err());
    }
}
