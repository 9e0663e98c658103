//! Numerical checks of operator identities used with the projectors.

use crate::algebra::{contract_alpha, contract_sigma, C64};
use crate::discretization::{alpha_grad, sigma_grad, Field, RadialGrid};
use crate::error::{Error, Result};

use super::angular::apply_spin_orbit;

fn relative(diff: &Field, reference: &Field) -> Result<f64> {
    let d = diff.norm()?;
    let r = reference.norm()?;
    Ok(if r > 0.0 { d / r } else { d })
}

fn pointwise_matrix2(field: &Field, m: impl Fn(usize) -> crate::algebra::Mat2) -> Field {
    let mut out = field.clone();
    for i in 0..field.len() {
        let v = m(i).apply(&[field.component(0)[i], field.component(1)[i]]);
        out.component_mut(0)[i] = v[0];
        out.component_mut(1)[i] = v[1];
    }
    out
}

/// Relative L² residual of
/// `[σ·∇, (σ·x̂) h] φ = 2(1 + σ·L)(h/r) φ + (h/r) φ + r (h/r)′ φ`
/// for a radial profile `h` tabulated on `h_grid` and a Cartesian field `φ`.
/// The left side is computed with spectral derivatives, the right side from
/// the tabulated profile.
pub fn check_commutator_identity(h_grid: &RadialGrid, h: &[f64], phi: &Field) -> Result<f64> {
    phi.require_arity(2)?;
    if h.len() != h_grid.len() {
        return Err(Error::GridMismatch("profile length differs from radial grid".into()));
    }
    let q: Vec<f64> = h.iter().zip(h_grid.nodes()).map(|(v, r)| v / r).collect();
    let dq = h_grid.derivative(&q);
    let h_at = |i: usize| h_grid.interpolate(h, phi.radius(i));

    let sx_h = |f: &Field| pointwise_matrix2(f, |i| contract_sigma(phi.position(i).unit()).scale(C64::new(h_at(i), 0.0)));
    let lhs = sigma_grad(&sx_h(phi))?.sub(&sx_h(&sigma_grad(phi)?))?;

    let so = apply_spin_orbit(phi)?;
    let mut rhs = phi.clone();
    for i in 0..phi.len() {
        let r = phi.radius(i);
        let qi = h_grid.interpolate(&q, r);
        let dqi = h_grid.interpolate(&dq, r);
        for a in 0..2 {
            let p = phi.component(a)[i];
            rhs.component_mut(a)[i] = (p + so.component(a)[i]) * (2.0 * qi) + p * qi + p * (r * dqi);
        }
    }
    let diff = lhs.sub(&rhs)?;
    let scale = if rhs.norm()? > 0.0 { rhs } else { phi.clone() };
    relative(&diff, &scale)
}

/// `e^{−s|x|} α·∇ (e^{s|x|} ψ) − α·∇ψ`, which equals `s (α·x̂) ψ`.
pub fn exponential_conjugation(psi: &Field, s: f64) -> Result<Field> {
    psi.require_arity(4)?;
    let up = psi.mul_real(|x| (s * x.norm()).exp());
    let conj = alpha_grad(&up)?.mul_real(|x| (-s * x.norm()).exp());
    conj.sub(&alpha_grad(psi)?)
}

/// Relative residual of `α·x̂ ψ = e^{−|x|} α·∇ e^{|x|} ψ − α·∇ψ`. The test
/// field should vanish to high order at the origin, where `e^{|x|}` has a kink.
pub fn check_exponential_conjugation(psi: &Field) -> Result<f64> {
    let lhs = exponential_conjugation(psi, 1.0)?;
    let mut ax = psi.clone();
    for i in 0..psi.len() {
        let v = contract_alpha(psi.position(i).unit()).apply(&[
            psi.component(0)[i],
            psi.component(1)[i],
            psi.component(2)[i],
            psi.component(3)[i],
        ]);
        for (a, val) in v.iter().enumerate() {
            ax.component_mut(a)[i] = *val;
        }
    }
    relative(&lhs.sub(&ax)?, &ax)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Vec3;
    use crate::discretization::CartesianGrid;

    fn gaussian2(g: CartesianGrid) -> Field {
        Field::from_fn(g, 2, |x, o| {
            let e = (-(x - Vec3::new(0.2, 0.1, -0.3)).norm_sq()).exp();
            o[0] = C64::new(e, 0.3 * e * x.0[1]);
            o[1] = C64::new(-0.5 * e * x.0[2], e);
        })
        .unwrap()
    }

    #[test]
    fn commutator_identity_for_linear_profile() {
        let g = CartesianGrid::new(6.0, 32).unwrap();
        let rg = RadialGrid::default();
        let phi = gaussian2(g);
        let zero = vec![0.0; rg.len()];
        assert_eq!(check_commutator_identity(&rg, &zero, &phi).unwrap(), 0.0);
        let h: Vec<f64> = rg.nodes().iter().map(|r| r / 2.0).collect();
        let res = check_commutator_identity(&rg, &h, &phi).unwrap();
        assert!(res < 1e-5, "{res}");
    }

    #[test]
    fn exponential_identity_sign() {
        let g = CartesianGrid::new(6.0, 48).unwrap();
        let psi = Field::from_fn(g, 4, |x, o| {
            let r2 = x.norm_sq();
            let e = r2.powi(5) * (-r2).exp();
            o[0] = C64::new(e, 0.0);
            o[2] = C64::new(0.0, 0.5 * e);
        })
        .unwrap();
        let res = check_exponential_conjugation(&psi).unwrap();
        assert!(res < 1e-5, "{res}");
        // with the exponentials the other way round the difference is −α·x̂ψ
        let flipped = exponential_conjugation(&psi, -1.0).unwrap();
        let plus = exponential_conjugation(&psi, 1.0).unwrap();
        let rel = flipped.add(&plus).unwrap().norm().unwrap() / plus.norm().unwrap();
        assert!(rel < 1e-4, "{rel}");
    }
}
