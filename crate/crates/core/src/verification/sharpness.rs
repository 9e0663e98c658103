//! Extremal fields: equality cases, the minimizing δ-sweep, and the explicit
//! eigenfunctions that show the bound `sup|x|‖𝕍‖ < 1` cannot be relaxed.

use serde::{Deserialize, Serialize};

use super::family::{ExtremizerFamily, FamilyTag};
use super::{channel_sides, report_from_sides, unit_phase, InequalityId, InequalityReport, ReportParams, VerifyInput, VerifyParams};
use crate::algebra::{C64, I};
use crate::discretization::RadialGrid;
use crate::error::{Error, Result};
use crate::operators::{RadialChannel, Sign};
use crate::potentials::{MatrixPotential, Structure};

/// Largest share of the Hardy LHS that may come from the extrapolated head
/// below `r_min` before a sweep point counts as unresolved.
pub const HEAD_FRACTION_LIMIT: f64 = 0.5;

fn family_params(family: &ExtremizerFamily) -> VerifyParams {
    VerifyParams::new(family.eps, family.mass)
}

fn family_report_params(family: &ExtremizerFamily, kappa: i32) -> ReportParams {
    ReportParams {
        mass: family.mass,
        eps: family.eps,
        sign: Some(Sign::Plus),
        lambda: Some(family.lambda),
        delta: (family.tag == FamilyTag::Psi0).then_some(family.exponent),
        kappa: Some(kappa),
        family: Some(family.name().to_string()),
        potential: None,
    }
}

fn input_for(id: InequalityId, family: &ExtremizerFamily, grid: RadialGrid) -> Result<VerifyInput> {
    Ok(if id.arity() == 2 { VerifyInput::Pauli(family.pauli(grid)?) } else { VerifyInput::Dirac(family.dirac(grid)?) })
}

/// Evaluates `id` on the member of `family` that realizes its constant.
///
/// Pairings: the 8/9 inequality and the Pauli inequalities with
/// `exp_lambda`, the Hardy-Dirac inequality with `psi0`, the first-order
/// Pauli inequality with `phi0_radial` over `r ≥ cutoff`.
pub fn equality_case(id: InequalityId, family: &ExtremizerFamily, grid: RadialGrid) -> Result<InequalityReport> {
    use InequalityId::*;
    match (id, family.tag) {
        (Improved89 | Lem1 | Lem2 | Lem3, FamilyTag::ExpLambda) | (HardyDiracFinal, FamilyTag::Psi0) => {
            if family.tag == FamilyTag::Psi0 && family.exponent == 0.0 {
                return Err(Error::Refused("psi0 with exponent 0 has infinite Hardy LHS; use a positive exponent".into()));
            }
            let params = family_params(family);
            let coarse = channel_sides(id, &input_for(id, family, grid)?, &params)?;
            let fine = channel_sides(id, &input_for(id, family, grid.refined())?, &params)?;
            report_from_sides(id, coarse, Some(fine), family_report_params(family, -1), grid.into())
        }
        (ForFi, FamilyTag::Phi0Radial) => truncated_for_fi(family, grid),
        _ => Err(Error::Refused(format!("no equality case for {id} with family {}", family.name()))),
    }
}

/// Both sides of the first-order Pauli inequality over `r ≥ δ`.
fn for_fi_from(family: &ExtremizerFamily, grid: RadialGrid) -> Result<(f64, f64)> {
    let phi = family.pauli(grid)?;
    let dphi = phi.radial_derivative();
    let mu = family.eps.hypot(family.mass);
    let delta = family.cutoff;
    let (mut lhs, mut rhs) = (Vec::with_capacity(grid.len()), Vec::with_capacity(grid.len()));
    for i in 0..grid.len() {
        let r = grid.node(i);
        let a = phi.profile()[i].norm_sqr();
        let d = dphi.profile()[i].norm_sqr();
        lhs.push((a / r + mu * a) * r * r);
        rhs.push((r * d + mu * mu * r * a) * r * r);
    }
    Ok((grid.integrate_from(&lhs, delta)?, grid.integrate_from(&rhs, delta)?))
}

fn truncated_for_fi(family: &ExtremizerFamily, grid: RadialGrid) -> Result<InequalityReport> {
    let delta = family.cutoff;
    if delta <= grid.r_min() {
        return Err(Error::Refused(format!(
            "phi0_radial needs a cutoff above r_min = {:e}; its Hardy weight is not integrable at 0",
            grid.r_min()
        )));
    }
    let coarse = for_fi_from(family, grid)?;
    let fine = for_fi_from(family, grid.refined())?;
    let mut report = report_from_sides(
        InequalityId::ForFi,
        (coarse.0, coarse.1, None),
        Some((fine.0, fine.1, None)),
        family_report_params(family, -1),
        grid.into(),
    )?;
    report.params.delta = Some(delta);
    // the integrands differ by an exact derivative, so the slack is the
    // boundary term δ²|φ(δ)|²(1 + μδ)
    let mu = family.eps.hypot(family.mass);
    let phi_delta = family.profile(delta) / family.profile_norm_sq().sqrt();
    let flux = delta * delta * phi_delta * phi_delta * (1.0 + mu * delta);
    report.notes.push(format!("integrals over r >= {delta:e}; boundary flux {flux:.12e}"));
    Ok(report)
}

/// Result of a δ-sweep of the Hardy-Dirac inequality along `psi0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub reports: Vec<InequalityReport>,
    /// Ratios increase strictly as δ decreases.
    pub monotone: bool,
}

impl SweepOutcome {
    pub fn ratios(&self) -> Vec<f64> {
        self.reports.iter().map(|r| r.ratio.unwrap_or(f64::NAN)).collect()
    }

    pub fn deltas(&self) -> Vec<f64> {
        self.reports.iter().map(|r| r.params.delta.unwrap_or(f64::NAN)).collect()
    }
}

/// Radial grid that resolves the sweep down to δ = 0.05 for `√(ε²+m²) ≥ 1/2`.
pub fn sweep_grid() -> RadialGrid {
    RadialGrid::new(1e-12, 60.0, 4096).expect("valid constant grid")
}

/// `r_min` at which the head below it carries half of the Hardy LHS of
/// `psi0` at regularization δ (leading order in `r_min`).
pub fn required_r_min(delta: f64, mu: f64) -> f64 {
    HEAD_FRACTION_LIMIT.powf(1.0 / (2.0 * delta)) / (2.0 * mu)
}

/// Runs `psi0` with exponents `deltas` (strictly decreasing, positive)
/// through the Hardy-Dirac inequality. A δ whose LHS is dominated by the
/// extrapolated head is refused with [`Error::Unresolved`].
pub fn sharpness_sweep(eps: f64, mass: f64, deltas: &[f64], grid: RadialGrid) -> Result<SweepOutcome> {
    if deltas.is_empty() || deltas.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
        return Err(Error::InvalidParameter("sweep needs positive exponents".into()));
    }
    if deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter("sweep exponents must decrease strictly".into()));
    }
    let mu = eps.hypot(mass);
    let mut reports = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let family = ExtremizerFamily::psi0(eps, mass, delta)?;
        let psi = family.dirac(grid)?;
        let integrand: Vec<f64> =
            psi.density().iter().enumerate().map(|(i, d)| d * grid.node(i)).collect();
        let parts = grid.integrate_parts(&integrand)?;
        if parts.head > HEAD_FRACTION_LIMIT * parts.total() {
            return Err(Error::Unresolved { delta, r_min: grid.r_min(), required: required_r_min(delta, mu) });
        }
        let mut report = equality_case(InequalityId::HardyDiracFinal, &family, grid)?;
        report.notes.push(format!("head fraction {:.3e}", parts.head / parts.total()));
        reports.push(report);
    }
    let ratios: Vec<f64> = reports.iter().map(|r| r.ratio.unwrap_or(f64::NAN)).collect();
    let monotone = ratios.windows(2).all(|w| w[1] > w[0]);
    Ok(SweepOutcome { reports, monotone })
}

/// One row per sweep point.
pub fn sweep_csv(outcome: &SweepOutcome) -> String {
    let mut out = String::from("delta,ratio,lhs,rhs,slack,quad_err\n");
    for r in &outcome.reports {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.params.delta.unwrap_or(f64::NAN),
            r.ratio.unwrap_or(f64::NAN),
            r.lhs,
            r.rhs,
            r.slack,
            r.quad_err
        ));
    }
    out
}

/// An explicit κ = −1 solution of `(H − λ)ψ = 0` with `H = −iα·∇ + mβ − 𝕍`
/// and profile `f = e^{−μr}/r`, `g = γ f`.
#[derive(Debug, Clone)]
pub struct EigenfunctionCase {
    pub label: String,
    pub potential: MatrixPotential,
    pub mass: f64,
    pub eigenvalue: C64,
    /// `g/f`.
    pub lower_ratio: C64,
    pub decay: f64,
}

impl EigenfunctionCase {
    /// The spin-coupled potential with `c = 0` at shift `ε`, `m = 0`: the
    /// bound equals 1 and `ψ₀^{ε,0}` is an eigenfunction with eigenvalue `iε`.
    pub fn shifted_kernel(eps: f64) -> Result<Self> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidParameter("shift must be positive".into()));
        }
        Ok(EigenfunctionCase {
            label: format!("remark14(c=0, eps={eps}, m=0)"),
            potential: MatrixPotential::remark14_family(0.0, eps, 0.0)?,
            mass: 0.0,
            eigenvalue: C64::new(0.0, eps),
            lower_ratio: I * unit_phase(eps, 0.0),
            decay: eps,
        })
    }

    /// `𝕍 = 𝕀₄/|x|` with mass `m`: `ψ₀^{0,m}` lies in the kernel of H.
    pub fn zero_mode(mass: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidParameter("mass must be positive".into()));
        }
        Ok(EigenfunctionCase {
            label: format!("identity/r, m={mass}"),
            potential: MatrixPotential::unit_coulomb()?,
            mass,
            eigenvalue: C64::new(0.0, 0.0),
            lower_ratio: C64::new(-1.0, 0.0),
            decay: mass,
        })
    }

    pub fn psi(&self, grid: RadialGrid) -> Result<RadialChannel> {
        let mu = self.decay;
        RadialChannel::from_fn(-1, grid, |r| {
            let f = C64::new((-mu * r).exp() / r, 0.0);
            (f, self.lower_ratio * f)
        })
    }
}

/// `‖(H − λ)ψ‖ / ‖ψ‖` with both norms over `window = (a, b)`, which must
/// lie inside the grid. Keep a margin to the grid ends, where the
/// derivative stencils are one-sided.
pub fn eigenfunction_residual(case: &EigenfunctionCase, window: (f64, f64), grid: RadialGrid) -> Result<f64> {
    if !matches!(case.potential.structure(), Structure::Radial { .. }) {
        return Err(Error::Unsupported("eigenfunction check needs a channel-preserving potential".into()));
    }
    let psi = case.psi(grid)?;
    let h_psi = psi.free_dirac(case.mass).sub(&case.potential.apply_channel(&psi)?)?;
    let res = h_psi.sub(&psi.scaled(case.eigenvalue))?;
    let norm = |c: &RadialChannel| {
        let d: Vec<f64> = c.density().iter().enumerate().map(|(i, v)| v * grid.node(i).powi(2)).collect();
        grid.integrate_between(&d, window.0, window.1)
    };
    let den = norm(&psi)?;
    if den <= 0.0 {
        return Err(Error::Numerical("eigenfunction has zero norm on the window".into()));
    }
    Ok((norm(&res)? / den).sqrt())
}
