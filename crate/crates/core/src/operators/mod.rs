//! Free Dirac operator, its resolvent, angular operators and radial channels.

mod angular;
mod channel;
mod identities;

pub use angular::{
    apply_spin_orbit, gauss_legendre, spherical_harmonic, AngularExpansion, ProjectorSign, ShellExpansion,
    DEFAULT_L_MAX,
};
pub use channel::{spherical_spinor, PauliChannel, RadialChannel};
pub use identities::{check_commutator_identity, check_exponential_conjugation, exponential_conjugation};

use std::cell::Cell;

use serde::{Deserialize, Serialize};

use crate::algebra::{Vec3, C64, I};
use crate::discretization::spectral::apply_multiplier;
use crate::discretization::Field;
use crate::error::{Error, Result};

/// Sign of the imaginary shift: `Plus` selects `+iε`, `Minus` selects `−iε`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Parameters of `iα·∇ − mβ ± iε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeDiracParams {
    pub mass: f64,
    pub shift: f64,
    pub sign: Sign,
}

impl FreeDiracParams {
    pub fn new(mass: f64, shift: f64, sign: Sign) -> Result<Self> {
        if !(mass.is_finite() && mass >= 0.0) {
            return Err(Error::InvalidParameter(format!("mass must be finite and >= 0, got {mass}")));
        }
        if !(shift.is_finite() && shift >= 0.0) {
            return Err(Error::InvalidParameter(format!("shift must be finite and >= 0, got {shift}")));
        }
        Ok(FreeDiracParams { mass, shift, sign })
    }

    /// Same operator with the opposite shift, i.e. the adjoint.
    pub fn adjoint(&self) -> FreeDiracParams {
        FreeDiracParams { sign: self.sign.flip(), ..*self }
    }
}

/// `(σ·ξ)(a, b)`.
#[inline]
fn sigma_dot(xi: Vec3, a: C64, b: C64) -> (C64, C64) {
    let [x, y, z] = xi.0;
    (a * z + b * C64::new(x, -y), a * C64::new(x, y) - b * z)
}

/// `(α·ξ + mβ + z)v` with `z` a complex scalar.
#[inline]
fn dirac_symbol(xi: Vec3, m: f64, z: C64, v: &[C64], out: &mut [C64]) {
    let (u0, u1) = sigma_dot(xi, v[2], v[3]);
    let (l0, l1) = sigma_dot(xi, v[0], v[1]);
    out[0] = u0 + (m + z) * v[0];
    out[1] = u1 + (m + z) * v[1];
    out[2] = l0 + (z - m) * v[2];
    out[3] = l1 + (z - m) * v[3];
}

/// `(−iα·∇ + mβ)ψ`, applied spectrally.
pub fn apply_free_dirac(psi: &Field, mass: f64) -> Result<Field> {
    psi.require_arity(4)?;
    apply_multiplier(psi, 4, |xi, v, out| dirac_symbol(xi, mass, C64::new(0.0, 0.0), v, out))
}

/// `(−iα·∇ + mβ + z)ψ` for a complex scalar `z`.
pub fn apply_shifted_free_dirac(psi: &Field, mass: f64, z: C64) -> Result<Field> {
    psi.require_arity(4)?;
    apply_multiplier(psi, 4, |xi, v, out| dirac_symbol(xi, mass, z, v, out))
}

/// `(iα·∇ − mβ ± iε)ψ`.
pub fn apply_dirac_operator(psi: &Field, p: &FreeDiracParams) -> Result<Field> {
    // iα·∇ − mβ + s·iε = −(−iα·∇ + mβ − s·iε)
    let z = -I * (p.sign.value() * p.shift);
    let mut out = apply_shifted_free_dirac(psi, p.mass, z)?;
    out.scale(C64::new(-1.0, 0.0));
    Ok(out)
}

/// `(iα·∇ − mβ ± iε)^{−1} f` as the multiplier `(−α·ξ − mβ ∓ iε)/(|ξ|² + m² + ε²)`.
///
/// With `m = ε = 0` the symbol vanishes at `ξ = 0` (and, on the grid, on
/// the modes whose wavenumbers are all zero or Nyquist). The inverse is
/// then taken on the complement, and `f` must carry no weight there.
pub fn apply_free_resolvent(f: &Field, p: &FreeDiracParams) -> Result<Field> {
    f.require_arity(4)?;
    let z = I * (p.sign.value() * p.shift);
    let m = p.mass;
    let base = m * m + p.shift * p.shift;
    let singular = Cell::new(0.0_f64);
    let total = Cell::new(0.0_f64);
    let out = apply_multiplier(f, 4, |xi, v, out| {
        let weight: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        total.set(total.get() + weight);
        let d = xi.norm_sq() + base;
        if d == 0.0 {
            singular.set(singular.get() + weight);
            return;
        }
        // −(α·ξ + mβ + s·iε)
        dirac_symbol(xi, m, z, v, out);
        let s = -1.0 / d;
        out.iter_mut().for_each(|o| *o *= s);
    })?;
    if singular.get() > SINGULAR_MODE_TOL * SINGULAR_MODE_TOL * total.get() {
        return Err(Error::Refused(format!(
            "massless unshifted resolvent is singular at xi = 0 and f has relative weight {:.2e} there",
            (singular.get() / total.get()).sqrt()
        )));
    }
    Ok(out)
}

/// Relative amplitude on the null modes of the massless symbol below which
/// it is dropped. The round trip then misses `f` by exactly this amount.
pub const SINGULAR_MODE_TOL: f64 = 1e-10;

/// Dense 4×4 symbol of `iα·∇ − mβ ± iε` at wavevector `ξ`.
pub fn operator_symbol(xi: Vec3, p: &FreeDiracParams) -> crate::algebra::Mat4 {
    let mut m = crate::algebra::contract_alpha(xi).scale(C64::new(-1.0, 0.0));
    let beta = crate::algebra::dirac_beta();
    for a in 0..4 {
        m[(a, a)] += -p.mass * beta[(a, a)] + I * (p.sign.value() * p.shift);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{contract_alpha, dirac_beta, Mat4, ONE, ZERO};
    use crate::discretization::{CartesianGrid, WeightKind};
    use nalgebra::Matrix4;

    fn to_na(m: &Mat4) -> Matrix4<C64> {
        Matrix4::from_fn(|i, j| m[(i, j)])
    }

    #[test]
    fn constant_spinor_sees_only_beta() {
        let g = CartesianGrid::new(4.0, 8).unwrap();
        let c = C64::new(0.7, -0.2);
        let psi = Field::from_fn(g, 4, |_, o| o[0] = c).unwrap();
        let out = apply_free_dirac(&psi, 1.0).unwrap();
        assert!((out.component(0)[11] - c).norm() < 1e-13);
        assert!(out.component(2)[11].norm() < 1e-13);
    }

    #[test]
    fn resolvent_at_zero_frequency() {
        let g = CartesianGrid::new(4.0, 8).unwrap();
        let p = FreeDiracParams::new(1.0, 1.0, Sign::Minus).unwrap();
        let f = Field::from_fn(g, 4, |_, o| o[0] = ONE).unwrap();
        let out = apply_free_resolvent(&f, &p).unwrap();
        let expect = C64::new(-0.5, 0.5);
        assert!(out.component(0).iter().all(|v| (v - expect).norm() < 1e-13));
        // dense solve of the symbol at ξ = 0
        let sym = to_na(&operator_symbol(Vec3::new(0.0, 0.0, 0.0), &p));
        let sol = sym.lu().solve(&nalgebra::Vector4::new(ONE, ZERO, ZERO, ZERO)).unwrap();
        assert!((sol[0] - expect).norm() < 1e-14);
    }

    #[test]
    fn resolvent_symbol_singular_values() {
        let p = FreeDiracParams::new(0.0, 1.0, Sign::Plus).unwrap();
        let xi = Vec3::new(1.0, 1.0, 1.0);
        let inv = to_na(&operator_symbol(xi, &p)).try_inverse().unwrap();
        let sv = inv.svd(false, false).singular_values;
        for s in sv.iter() {
            assert!((s - 0.5).abs() < 1e-13);
        }
    }

    #[test]
    fn symbol_matches_dense_matrices() {
        let p = FreeDiracParams::new(0.5, 2.0, Sign::Minus).unwrap();
        let xi = Vec3::new(0.3, -1.1, 0.4);
        let dense = contract_alpha(xi).scale(C64::new(-1.0, 0.0)) - dirac_beta().scale(C64::new(0.5, 0.0))
            + Mat4::identity().scale(C64::new(0.0, -2.0));
        assert!((operator_symbol(xi, &p) - dense).max_abs() < 1e-15);
    }

    #[test]
    fn resolvent_round_trip() {
        let g = CartesianGrid::new(5.0, 16).unwrap();
        let f = Field::from_fn(g, 4, |x, o| {
            let e = (-0.5 * x.norm_sq()).exp();
            o[0] = C64::new(e, 0.0);
            o[3] = C64::new(0.0, e * x.0[1]);
        })
        .unwrap();
        for sign in [Sign::Plus, Sign::Minus] {
            let p = FreeDiracParams::new(0.5, 2.0, sign).unwrap();
            let back = apply_dirac_operator(&apply_free_resolvent(&f, &p).unwrap(), &p).unwrap();
            let err = back.sub(&f).unwrap().weighted_norm_sq(WeightKind::One).unwrap().sqrt();
            assert!(err < 1e-12 * f.norm().unwrap());
        }
    }

    #[test]
    fn rejects_bad_params() {
        assert!(FreeDiracParams::new(-1.0, 1.0, Sign::Plus).is_err());
        assert!(FreeDiracParams::new(1.0, -0.5, Sign::Plus).is_err());
        assert!(FreeDiracParams::new(1.0, f64::NAN, Sign::Plus).is_err());
    }

    #[test]
    fn massless_unshifted_resolvent_needs_zero_mean() {
        let g = CartesianGrid::new(8.0, 48).unwrap();
        let p = FreeDiracParams::new(0.0, 0.0, Sign::Plus).unwrap();
        let bump = Field::from_fn(g, 4, |x, o| o[1] = C64::new((-x.norm_sq()).exp(), 0.0)).unwrap();
        assert!(matches!(apply_free_resolvent(&bump, &p), Err(Error::Refused(_))));
        // x₁ e^{−|x|²/2} is odd, so its mean vanishes; it must also be
        // resolved, since the cell-centred Nyquist mode (−1)ⁱ is odd too
        let odd = Field::from_fn(g, 4, |x, o| o[2] = C64::new(x.0[0] * (-0.5 * x.norm_sq()).exp(), 0.0)).unwrap();
        let back = apply_dirac_operator(&apply_free_resolvent(&odd, &p).unwrap(), &p).unwrap();
        assert!(back.sub(&odd).unwrap().norm().unwrap() < 1e-6 * odd.norm().unwrap());
    }
}
