//! Neumann-series solution of `(H ± i)ψ = f` with `H = −iα·∇ + mβ − 𝕍`.
//!
//! With `R₀ = (−iα·∇ + mβ ± i)⁻¹` the equation reads `ψ = R₀f + R₀𝕍ψ`, so
//! `ψ = Σⱼ (R₀𝕍)ʲ R₀ f`. Each term costs one spectral resolvent application.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{C64, I};
use crate::discretization::spectral::h_half_norm_sq;
use crate::discretization::{alpha_grad, CartesianGrid, Field, WeightKind};
use crate::error::{Error, Result};
use crate::fields::BandLimitedSpec;
use crate::operators::{apply_free_dirac, apply_free_resolvent, FreeDiracParams, Sign};
use crate::potentials::{MatrixPotential, SampledPotential};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("potential bound {bound:.6} is not below 1; the series is not guaranteed to converge")]
    HypothesisViolated { bound: f64 },

    #[error("series diverges: term ratio {factor:.4} >= 1 for {streak} consecutive terms (at term {term})")]
    Divergent { factor: f64, streak: usize, term: usize },

    #[error("no convergence after {terms} terms: last term ratio {factor:.4}, relative term size {relative:.3e}")]
    NonContraction { terms: usize, factor: f64, relative: f64 },

    #[error("non-finite value in term {term}, component {component}, node {index}")]
    NonFinite { term: usize, component: usize, index: usize },
}

/// Ratio `>= 1` this many times in a row counts as divergence.
pub const DIVERGENCE_STREAK: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub sign: Sign,
    pub mass: f64,
    pub max_terms: usize,
    pub series_tol: f64,
    pub residual_tol: f64,
    /// Refuse potentials whose declared bound is not below 1. Switching this
    /// off turns the solve into a probe of the series itself.
    pub enforce_hypothesis: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            sign: Sign::Plus,
            mass: 0.0,
            max_terms: 2000,
            series_tol: 1e-10,
            residual_tol: 1e-6,
            enforce_hypothesis: true,
        }
    }
}

impl SolverConfig {
    pub fn new(sign: Sign, mass: f64) -> Self {
        SolverConfig { sign, mass, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_terms < 1 {
            return Err(Error::InvalidParameter("max_terms must be at least 1".into()));
        }
        if !(self.series_tol > 0.0 && self.residual_tol > 0.0) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        if !(self.mass.is_finite() && self.mass >= 0.0) {
            return Err(Error::InvalidParameter(format!("mass must be finite and >= 0, got {}", self.mass)));
        }
        Ok(())
    }

    pub fn with_sign(&self, sign: Sign) -> Self {
        SolverConfig { sign, ..*self }
    }
}

/// Post-condition norms of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub norm_psi: f64,
    pub norm_f: f64,
    /// `‖ψ‖/‖f‖`.
    pub norm_ratio: f64,
    /// `∫|ψ|²/|x|`.
    pub inverse_weighted: f64,
    /// `∫|ψ|²/|x| ÷ ∫|f|²`.
    pub inverse_weighted_ratio: f64,
    /// `∫_{|x|≤1} |x||α·∇ψ|²`.
    pub local_gradient: f64,
    /// `‖ψ‖_{H^{1/2}}`.
    pub h_half: f64,
}

impl Diagnostics {
    pub fn is_finite(&self) -> bool {
        [
            self.norm_psi,
            self.norm_f,
            self.norm_ratio,
            self.inverse_weighted,
            self.inverse_weighted_ratio,
            self.local_gradient,
            self.h_half,
        ]
        .iter()
        .all(|v| v.is_finite() && *v >= 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub config: SolverConfig,
    pub potential_bound: f64,
    pub terms: usize,
    pub contraction_factor: f64,
    pub term_norms: Vec<f64>,
    pub residual: f64,
    pub diagnostics: Diagnostics,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct SolverResult {
    pub psi: Field,
    pub summary: SolveSummary,
}

fn free_params(mass: f64, sign: Sign) -> FreeDiracParams {
    // (H₀ + s·i)⁻¹ = −(iα·∇ − mβ − s·i)⁻¹
    FreeDiracParams { mass, shift: 1.0, sign: sign.flip() }
}

/// `R₀ f = (−iα·∇ + mβ ± i)⁻¹ f`.
pub fn apply_r0(f: &Field, mass: f64, sign: Sign) -> Result<Field> {
    let mut out = apply_free_resolvent(f, &free_params(mass, sign))?;
    out.scale(C64::new(-1.0, 0.0));
    Ok(out)
}

/// `(H ± i)ψ` with the potential already sampled on the grid.
pub fn apply_shifted_hamiltonian(psi: &Field, v: &SampledPotential, mass: f64, sign: Sign) -> Result<Field> {
    let mut out = apply_free_dirac(psi, mass)?;
    out.axpy(I * sign.value(), psi)?;
    out.axpy(C64::new(-1.0, 0.0), &v.apply(psi)?)?;
    Ok(out)
}

fn check_finite(f: &Field, term: usize) -> Result<()> {
    match f.first_non_finite() {
        Some((component, index)) => Err(SolverError::NonFinite { term, component, index }.into()),
        None => Ok(()),
    }
}

fn cartesian(f: &Field) -> Result<CartesianGrid> {
    Ok(*f.grid().as_cartesian()?)
}

/// `∫_{|x|≤1} |x||α·∇ψ|²`.
fn local_gradient(psi: &Field) -> Result<f64> {
    let g = cartesian(psi)?;
    let d = alpha_grad(psi)?.density();
    let s: f64 = (0..g.len())
        .filter_map(|i| {
            let r = g.position(i).norm();
            (r <= 1.0).then(|| r * d[i])
        })
        .sum();
    Ok(s * g.cell_volume())
}

pub fn diagnostics(psi: &Field, f: &Field) -> Result<Diagnostics> {
    let norm_psi = psi.norm()?;
    let norm_f = f.norm()?;
    let inverse_weighted = psi.weighted_norm_sq(WeightKind::InvAbsX)?;
    let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else { 0.0 };
    Ok(Diagnostics {
        norm_psi,
        norm_f,
        norm_ratio: ratio(norm_psi, norm_f),
        inverse_weighted,
        inverse_weighted_ratio: ratio(inverse_weighted, norm_f * norm_f),
        local_gradient: local_gradient(psi)?,
        h_half: h_half_norm_sq(psi)?.sqrt(),
    })
}

/// Sums the Neumann series for `(H ± i)ψ = f`.
pub fn solve(f: &Field, potential: &MatrixPotential, cfg: &SolverConfig) -> Result<SolverResult> {
    cfg.validate()?;
    f.require_arity(4)?;
    f.ensure_finite("right-hand side")?;
    if cfg.enforce_hypothesis && !potential.satisfies_hypothesis() {
        return Err(SolverError::HypothesisViolated { bound: potential.bound() }.into());
    }
    let grid = cartesian(f)?;
    let v = potential.sample(&grid);

    let mut term = apply_r0(f, cfg.mass, cfg.sign)?;
    check_finite(&term, 0)?;
    let mut psi = term.clone();
    let mut norms = vec![term.norm()?];
    let mut factor = 0.0;
    let mut streak = 0;
    let mut converged = norms[0] == 0.0;
    let mut relative = 0.0;

    while !converged && norms.len() < cfg.max_terms {
        let j = norms.len();
        term = apply_r0(&v.apply(&term)?, cfg.mass, cfg.sign)?;
        check_finite(&term, j)?;
        let n = term.norm()?;
        factor = n / norms[j - 1];
        norms.push(n);
        psi.axpy(C64::new(1.0, 0.0), &term)?;
        streak = if factor >= 1.0 { streak + 1 } else { 0 };
        if streak >= DIVERGENCE_STREAK {
            return Err(SolverError::Divergent { factor, streak, term: j }.into());
        }
        relative = n / psi.norm()?;
        converged = relative <= cfg.series_tol;
    }
    if !converged {
        return Err(SolverError::NonContraction { terms: norms.len(), factor, relative }.into());
    }

    let hpsi = apply_shifted_hamiltonian(&psi, &v, cfg.mass, cfg.sign)?;
    let nf = f.norm()?;
    let residual = if nf > 0.0 { hpsi.sub(f)?.norm()? / nf } else { hpsi.norm()? };
    let diagnostics = diagnostics(&psi, f)?;
    let mut warnings = Vec::new();
    if !residual.is_finite() {
        return Err(Error::Numerical("non-finite residual".into()));
    }
    if residual > cfg.residual_tol {
        warnings.push(format!(
            "residual {residual:.3e} exceeds {:.1e}: discretization error dominates",
            cfg.residual_tol
        ));
    }
    Ok(SolverResult {
        psi,
        summary: SolveSummary {
            config: *cfg,
            potential_bound: potential.bound(),
            terms: norms.len(),
            contraction_factor: factor,
            term_norms: norms,
            residual,
            diagnostics,
            warnings,
        },
    })
}

/// `|⟨(H+i)ψ₁, ψ₂⟩ − ⟨ψ₁, (H−i)ψ₂⟩| / (‖f₁‖‖f₂‖)` with ψ₁ solved for `+i`
/// and ψ₂ for `−i`. Zero right-hand sides give 0.
pub fn symmetry_check(f1: &Field, f2: &Field, potential: &MatrixPotential, cfg: &SolverConfig) -> Result<f64> {
    let (n1, n2) = (f1.norm()?, f2.norm()?);
    if n1 == 0.0 || n2 == 0.0 {
        return Ok(0.0);
    }
    let plus = solve(f1, potential, &cfg.with_sign(Sign::Plus))?;
    let minus = solve(f2, potential, &cfg.with_sign(Sign::Minus))?;
    let v = potential.sample(&cartesian(f1)?);
    let h1 = apply_shifted_hamiltonian(&plus.psi, &v, cfg.mass, Sign::Plus)?;
    let h2 = apply_shifted_hamiltonian(&minus.psi, &v, cfg.mass, Sign::Minus)?;
    let lhs = h1.inner(&minus.psi)?;
    let rhs = plus.psi.inner(&h2)?;
    Ok((lhs - rhs).norm() / (n1 * n2))
}

/// Duality check: ψ solves with `+i`, φ solves `(H − i)φ = ψ`; returns
/// `(‖ψ‖², ‖f‖‖φ‖)`, which must satisfy the first ≤ the second.
pub fn duality(f: &Field, potential: &MatrixPotential, cfg: &SolverConfig) -> Result<(f64, f64)> {
    let psi = solve(f, potential, &cfg.with_sign(Sign::Plus))?.psi;
    let phi = solve(&psi, potential, &cfg.with_sign(Sign::Minus))?.psi;
    Ok((psi.norm()?.powi(2), f.norm()? * phi.norm()?))
}

/// Empirical norm of `g ↦ |x|^{−1/2} R |x|^{−1/2} (|x|𝕍) g`, i.e. the best
/// constant in `∫|R(|x|𝕍f)|²/|x| ≤ C² ∫|x||f|²`, by power iteration on
/// `T*T` from a seeded band-limited start. `probes` counts applications of
/// `T*T`.
pub fn contraction_estimate(
    potential: &MatrixPotential,
    p: &FreeDiracParams,
    grid: CartesianGrid,
    probes: usize,
    seed: u64,
) -> Result<f64> {
    if probes < 1 {
        return Err(Error::InvalidParameter("probes must be at least 1".into()));
    }
    let inv_sqrt = |x: crate::algebra::Vec3| 1.0 / x.norm().sqrt();
    let xv: Vec<crate::algebra::Mat4> =
        grid.positions().map(|x| potential.evaluate(x).scale(C64::new(x.norm(), 0.0))).collect();
    let xv = SampledPotential::Matrix(xv);
    let xv_adj = match &xv {
        SampledPotential::Matrix(ms) => SampledPotential::Matrix(ms.iter().map(|m| m.adjoint()).collect()),
        SampledPotential::Scalar(_) => unreachable!(),
    };
    let adj = p.adjoint();
    let t = |g: &Field| -> Result<Field> {
        let u = xv.apply(g)?.mul_real(inv_sqrt);
        Ok(apply_free_resolvent(&u, p)?.mul_real(inv_sqrt))
    };
    let t_adj = |h: &Field| -> Result<Field> {
        let u = h.mul_real(inv_sqrt);
        xv_adj.apply(&apply_free_resolvent(&u, &adj)?.mul_real(inv_sqrt))
    };

    let mut g = BandLimitedSpec::new(seed, 4).sample(grid)?;
    let mut best = 0.0_f64;
    for _ in 0..probes {
        let ng = g.norm()?;
        if ng == 0.0 {
            return Ok(best);
        }
        let tg = t(&g)?;
        best = best.max(tg.norm()? / ng);
        let next = t_adj(&tg)?;
        let nn = next.norm()?;
        if nn == 0.0 {
            return Ok(best);
        }
        g = next.scaled(C64::new(1.0 / nn, 0.0));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::GaussianPacket;

    fn grid() -> CartesianGrid {
        CartesianGrid::new(8.0, 32).unwrap()
    }

    fn packet() -> Field {
        GaussianPacket {
            center: [0.2, -0.1, 0.3],
            width: 1.0,
            wavevector: [0.5, 0.0, -0.3],
            polarization: vec![C64::new(0.6, 0.0), C64::new(0.0, 0.4), C64::new(0.5, 0.1), C64::new(-0.2, 0.0)],
        }
        .sample(grid())
        .unwrap()
    }

    #[test]
    fn free_case_is_one_term() {
        let f = packet();
        let r = solve(&f, &MatrixPotential::zero(), &SolverConfig::new(Sign::Plus, 1.0)).unwrap();
        assert!(r.summary.terms <= 2);
        assert!(r.summary.residual < 1e-9, "{}", r.summary.residual);
    }

    #[test]
    fn coulomb_half_contracts() {
        let f = packet();
        let r = solve(&f, &MatrixPotential::coulomb(0.5).unwrap(), &SolverConfig::new(Sign::Plus, 1.0)).unwrap();
        let s = &r.summary;
        assert!(s.contraction_factor <= 0.5 + 0.05, "{}", s.contraction_factor);
        assert!(s.residual < 1e-6, "{}", s.residual);
        assert!(s.diagnostics.norm_ratio <= 1.0 + 1e-3);
        assert!(s.diagnostics.is_finite());
        assert!(s.warnings.is_empty());
    }

    #[test]
    fn refuses_bound_one() {
        let f = packet();
        let v = MatrixPotential::remark14_family(0.0, 1.0, 0.0).unwrap();
        let e = solve(&f, &v, &SolverConfig::default()).unwrap_err();
        assert!(matches!(e, Error::Solver(SolverError::HypothesisViolated { .. })));
    }

    #[test]
    fn symmetry_of_zero_and_free() {
        let z = Field::zeros(grid(), 4).unwrap();
        let cfg = SolverConfig::new(Sign::Plus, 1.0);
        assert_eq!(symmetry_check(&z, &z, &MatrixPotential::zero(), &cfg).unwrap(), 0.0);
        let f2 = BandLimitedSpec::new(5, 4).sample(grid()).unwrap();
        let s = symmetry_check(&packet(), &f2, &MatrixPotential::zero(), &cfg).unwrap();
        assert!(s < 1e-9, "{s}");
    }

    #[test]
    fn contraction_of_zero_potential() {
        let p = FreeDiracParams::new(1.0, 1.0, Sign::Minus).unwrap();
        let g = CartesianGrid::new(8.0, 16).unwrap();
        assert_eq!(contraction_estimate(&MatrixPotential::zero(), &p, g, 3, 1).unwrap(), 0.0);
    }
}
