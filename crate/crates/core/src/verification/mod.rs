//! Both sides of each Hardy-type inequality, evaluated on a field.
//!
//! Every check is written `LHS ≤ RHS`. Pure spin-orbit channels are evaluated
//! on the logarithmic radial grid, arbitrary fields on the Cartesian grid.
//! The quadrature estimate is the change of LHS and RHS under one grid
//! refinement.

mod family;
mod sharpness;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebra::{C64, I};
use crate::discretization::spectral::upsample;
use crate::discretization::{alpha_grad, radial_derivative, sigma_grad, Field, Grid, RadialGrid};
use crate::error::{Error, Result};
use crate::operators::{apply_dirac_operator, FreeDiracParams, PauliChannel, RadialChannel, Sign};
use crate::potentials::{HProfiles, RadialScalarPotential};

pub use family::{ExtremizerFamily, FamilyTag};
pub use sharpness::{
    eigenfunction_residual, equality_case, required_r_min, sharpness_sweep, sweep_csv, sweep_grid, EigenfunctionCase, SweepOutcome,
    HEAD_FRACTION_LIMIT,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InequalityId {
    Lem2,
    ForFi,
    ForFiNabla,
    Lem1,
    Lem3,
    #[serde(rename = "improved-89")]
    Improved89,
    HardyDiracFinal,
    GeneralHip,
}

impl InequalityId {
    pub const ALL: [InequalityId; 8] = [
        InequalityId::Lem2,
        InequalityId::ForFi,
        InequalityId::ForFiNabla,
        InequalityId::Lem1,
        InequalityId::Lem3,
        InequalityId::Improved89,
        InequalityId::HardyDiracFinal,
        InequalityId::GeneralHip,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InequalityId::Lem2 => "lem2",
            InequalityId::ForFi => "for-fi",
            InequalityId::ForFiNabla => "for-fi-nabla",
            InequalityId::Lem1 => "lem1",
            InequalityId::Lem3 => "lem3",
            InequalityId::Improved89 => "improved-89",
            InequalityId::HardyDiracFinal => "hardy-dirac-final",
            InequalityId::GeneralHip => "general-hip",
        }
    }

    /// Components of the field the inequality is stated for.
    pub fn arity(self) -> usize {
        match self {
            InequalityId::Lem2 | InequalityId::ForFi | InequalityId::ForFiNabla | InequalityId::Lem1 | InequalityId::Lem3 => 2,
            _ => 4,
        }
    }
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InequalityId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace('_', "-");
        InequalityId::ALL
            .into_iter()
            .find(|id| id.name() == norm)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown inequality id `{s}`")))
    }
}

/// Parameters echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ReportParams {
    pub mass: f64,
    pub eps: f64,
    pub sign: Option<Sign>,
    pub lambda: Option<f64>,
    pub delta: Option<f64>,
    pub kappa: Option<i32>,
    pub family: Option<String>,
    pub potential: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub id: InequalityId,
    pub params: ReportParams,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub ratio: Option<f64>,
    pub quad_err: f64,
    /// For the 8/9 inequality: `∫r|Dψ|² ÷ ∫r|iα·∇ψ|²`.
    pub realized_constant: Option<f64>,
    pub grid: Grid,
    pub seed: Option<u64>,
    pub notes: Vec<String>,
}

impl InequalityReport {
    fn new(id: InequalityId, sides: Sides, fine: Option<Sides>, params: ReportParams, grid: Grid) -> Result<Self> {
        let quad_err = match fine {
            Some(f) => (sides.lhs - f.lhs).abs().max((sides.rhs - f.rhs).abs()),
            None => 0.0,
        };
        let report = InequalityReport {
            id,
            params,
            lhs: sides.lhs,
            rhs: sides.rhs,
            slack: sides.rhs - sides.lhs,
            ratio: (sides.rhs > 0.0).then(|| sides.lhs / sides.rhs),
            quad_err,
            realized_constant: sides.realized,
            grid,
            seed: None,
            notes: Vec::new(),
        };
        if ![report.lhs, report.rhs, report.slack, report.quad_err].iter().all(|v| v.is_finite()) {
            return Err(Error::Numerical(format!("non-finite report for {id}")));
        }
        Ok(report)
    }

    /// The inequality holds up to the quadrature estimate.
    pub fn holds(&self) -> bool {
        self.slack >= -self.quad_err
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

/// Evaluation settings: mass, shift `ε`, shift sign, and the potential for
/// the generalized inequality.
#[derive(Debug, Clone)]
pub struct VerifyParams {
    pub mass: f64,
    pub eps: f64,
    pub sign: Sign,
    pub potential: Option<RadialScalarPotential>,
    /// Radial grid used to tabulate h± when the field is Cartesian.
    pub h_grid: RadialGrid,
}

impl VerifyParams {
    pub fn new(eps: f64, mass: f64) -> Self {
        VerifyParams { mass, eps, sign: Sign::Plus, potential: None, h_grid: RadialGrid::default() }
    }

    pub fn with_potential(mut self, v: RadialScalarPotential) -> Self {
        self.potential = Some(v);
        self
    }

    pub fn with_sign(mut self, sign: Sign) -> Self {
        self.sign = sign;
        self
    }

    /// `√(ε² + m²)`.
    pub fn decay(&self) -> f64 {
        self.eps.hypot(self.mass)
    }

    fn free(&self) -> Result<FreeDiracParams> {
        FreeDiracParams::new(self.mass, self.eps, self.sign)
    }

    fn report_params(&self, kappa: Option<i32>) -> ReportParams {
        ReportParams {
            mass: self.mass,
            eps: self.eps,
            sign: Some(self.sign),
            kappa,
            potential: self.potential.as_ref().map(|p| p.label().to_string()),
            ..Default::default()
        }
    }
}

/// A field in one of the supported representations.
#[derive(Debug, Clone)]
pub enum VerifyInput {
    Cartesian(Field),
    Pauli(PauliChannel),
    Dirac(RadialChannel),
}

impl VerifyInput {
    fn arity(&self) -> usize {
        match self {
            VerifyInput::Cartesian(f) => f.arity(),
            VerifyInput::Pauli(_) => 2,
            VerifyInput::Dirac(_) => 4,
        }
    }

    fn kappa(&self) -> Option<i32> {
        match self {
            VerifyInput::Cartesian(_) => None,
            VerifyInput::Pauli(p) => Some(p.kappa()),
            VerifyInput::Dirac(d) => Some(d.kappa()),
        }
    }

    fn grid(&self) -> Grid {
        match self {
            VerifyInput::Cartesian(f) => *f.grid(),
            VerifyInput::Pauli(p) => (*p.grid()).into(),
            VerifyInput::Dirac(d) => (*d.grid()).into(),
        }
    }

    /// The same field on the grid refined once.
    pub fn refined(&self) -> Result<VerifyInput> {
        Ok(match self {
            VerifyInput::Cartesian(f) => VerifyInput::Cartesian(upsample(f)?),
            VerifyInput::Pauli(p) => {
                let fine = p.grid().refined();
                VerifyInput::Pauli(PauliChannel::new(p.kappa(), fine, p.grid().resample(p.profile(), &fine))?)
            }
            VerifyInput::Dirac(d) => {
                let fine = d.grid().refined();
                VerifyInput::Dirac(RadialChannel::new(
                    d.kappa(),
                    fine,
                    d.grid().resample(d.upper(), &fine),
                    d.grid().resample(d.lower(), &fine),
                )?)
            }
        })
    }
}

/// Weighted squared norms `∫ w(|x|)|ψ|² dx` and the derivatives the
/// inequalities need, for each representation.
trait Measure: Sized {
    fn wnorm(&self, w: &dyn Fn(f64) -> f64) -> Result<f64>;
}

trait PauliOps: Measure {
    fn d_r(&self) -> Result<Self>;
    fn sigma_grad(&self) -> Result<Self>;
}

trait DiracOps: Measure {
    fn i_alpha_grad(&self) -> Result<Self>;
    fn dirac(&self, p: &FreeDiracParams) -> Result<Self>;
    /// `∫|w(|x|)ψ|²` style weighted norms with a tabulated radial weight.
    fn tabulated_wnorm(&self, grid: &RadialGrid, w: &[f64]) -> Result<f64>;
}

fn radial_wnorm(grid: &RadialGrid, dens: &[f64], w: &dyn Fn(f64) -> f64) -> Result<f64> {
    let vals: Vec<f64> = dens.iter().enumerate().map(|(i, d)| {
        let r = grid.node(i);
        w(r) * d * r * r
    }).collect();
    grid.integrate(&vals)
}

impl Measure for Field {
    fn wnorm(&self, w: &dyn Fn(f64) -> f64) -> Result<f64> {
        let g = self.grid().as_cartesian()?;
        let d = self.density();
        let s: f64 = d.iter().enumerate().map(|(i, d)| w(g.position(i).norm()) * d).sum();
        Ok(s * g.cell_volume())
    }
}

impl PauliOps for Field {
    fn d_r(&self) -> Result<Self> {
        radial_derivative(self)
    }
    fn sigma_grad(&self) -> Result<Self> {
        sigma_grad(self)
    }
}

impl DiracOps for Field {
    fn i_alpha_grad(&self) -> Result<Self> {
        Ok(alpha_grad(self)?.scaled(I))
    }
    fn dirac(&self, p: &FreeDiracParams) -> Result<Self> {
        apply_dirac_operator(self, p)
    }
    fn tabulated_wnorm(&self, grid: &RadialGrid, w: &[f64]) -> Result<f64> {
        self.wnorm(&|r| grid.interpolate(w, r))
    }
}

impl Measure for PauliChannel {
    fn wnorm(&self, w: &dyn Fn(f64) -> f64) -> Result<f64> {
        let d: Vec<f64> = self.profile().iter().map(|v| v.norm_sqr()).collect();
        radial_wnorm(self.grid(), &d, w)
    }
}

impl PauliOps for PauliChannel {
    fn d_r(&self) -> Result<Self> {
        Ok(self.radial_derivative())
    }
    fn sigma_grad(&self) -> Result<Self> {
        Ok(PauliChannel::sigma_grad(self))
    }
}

impl Measure for RadialChannel {
    fn wnorm(&self, w: &dyn Fn(f64) -> f64) -> Result<f64> {
        radial_wnorm(self.grid(), &self.density(), w)
    }
}

impl DiracOps for RadialChannel {
    fn i_alpha_grad(&self) -> Result<Self> {
        Ok(RadialChannel::i_alpha_grad(self))
    }
    fn dirac(&self, p: &FreeDiracParams) -> Result<Self> {
        Ok(self.dirac_operator(p))
    }
    fn tabulated_wnorm(&self, grid: &RadialGrid, w: &[f64]) -> Result<f64> {
        if grid != self.grid() {
            let on_self = grid.resample(w, self.grid());
            return radial_wnorm(self.grid(), &self.density(), &|r| self.grid().interpolate(&on_self, r));
        }
        let d = self.density();
        let vals: Vec<f64> = (0..grid.len()).map(|i| w[i] * d[i] * grid.node(i).powi(2)).collect();
        grid.integrate(&vals)
    }
}

#[derive(Debug, Clone, Copy)]
struct Sides {
    lhs: f64,
    rhs: f64,
    realized: Option<f64>,
}

impl Sides {
    fn plain(lhs: f64, rhs: f64) -> Self {
        Sides { lhs, rhs, realized: None }
    }
}

fn inv(r: f64) -> f64 {
    1.0 / r
}

fn ident(r: f64) -> f64 {
    r
}

fn pauli_sides<P: PauliOps>(id: InequalityId, phi: &P, mu: f64) -> Result<Sides> {
    let mass_term = |phi: &P| phi.wnorm(&|_| 1.0);
    Ok(match id {
        InequalityId::Lem2 => Sides::plain(phi.d_r()?.wnorm(&ident)?, phi.sigma_grad()?.wnorm(&ident)?),
        InequalityId::ForFi => Sides::plain(
            phi.wnorm(&inv)? + mu * mass_term(phi)?,
            phi.d_r()?.wnorm(&ident)? + mu * mu * phi.wnorm(&ident)?,
        ),
        InequalityId::ForFiNabla => Sides::plain(
            mu * mass_term(phi)?,
            phi.sigma_grad()?.wnorm(&ident)? + mu * mu * phi.wnorm(&ident)? - phi.wnorm(&inv)?,
        ),
        InequalityId::Lem1 => {
            Sides::plain(mass_term(phi)?, (2.0 / 3.0) * (phi.wnorm(&ident)? * phi.d_r()?.wnorm(&ident)?).sqrt())
        }
        InequalityId::Lem3 => Sides::plain(
            mass_term(phi)?,
            (2.0 / 3.0) * (phi.wnorm(&ident)? * phi.sigma_grad()?.wnorm(&ident)?).sqrt(),
        ),
        _ => unreachable!("not a Pauli inequality"),
    })
}

fn h_profiles(params: &VerifyParams, grid: Option<&RadialGrid>) -> Result<(RadialScalarPotential, HProfiles)> {
    let v = params
        .potential
        .clone()
        .ok_or_else(|| Error::InvalidParameter("general-hip needs a radial scalar potential".into()))?;
    let grid = grid.copied().unwrap_or(params.h_grid);
    let h = v.h_plus_minus(&grid)?;
    Ok((v, h))
}

fn dirac_sides<D: DiracOps>(id: InequalityId, psi: &D, params: &VerifyParams, radial: Option<&RadialGrid>) -> Result<Sides> {
    let p = params.free()?;
    Ok(match id {
        InequalityId::Improved89 => {
            let a = psi.i_alpha_grad()?.wnorm(&ident)?;
            let b = psi.dirac(&p)?.wnorm(&ident)?;
            Sides { lhs: 8.0 / 9.0 * a, rhs: b, realized: (a > 0.0).then(|| b / a) }
        }
        InequalityId::HardyDiracFinal => Sides::plain(psi.wnorm(&inv)?, psi.dirac(&p)?.wnorm(&ident)?),
        InequalityId::GeneralHip => {
            let (v, h) = h_profiles(params, radial)?;
            let vt = v.sample(&h.grid);
            if let Some(i) = vt.iter().position(|x| *x <= 0.0) {
                return Err(Error::Divergent {
                    integral: "weight 1/V",
                    detail: format!("V vanishes at r = {:e}", h.grid.node(i)),
                });
            }
            let lhs = psi.tabulated_wnorm(&h.grid, &vt)?;
            let inv_v: Vec<f64> = vt.iter().map(|x| 1.0 / x).collect();
            let main = psi.dirac(&p)?.tabulated_wnorm(&h.grid, &inv_v)?;
            let diff_sq: Vec<f64> = h.h_minus.iter().zip(&h.h_plus).map(|(a, b)| (a - b).powi(2)).collect();
            let cross = params.decay() * (psi.tabulated_wnorm(&h.grid, &diff_sq)? * psi.wnorm(&|_| 1.0)?).sqrt();
            Sides::plain(lhs, main + cross)
        }
        _ => unreachable!("not a Dirac inequality"),
    })
}

fn sides(id: InequalityId, input: &VerifyInput, params: &VerifyParams) -> Result<Sides> {
    let mu = params.decay();
    match input {
        VerifyInput::Cartesian(f) if f.arity() == 2 => pauli_sides(id, f, mu),
        VerifyInput::Cartesian(f) => dirac_sides(id, f, params, None),
        VerifyInput::Pauli(p) => pauli_sides(id, p, mu),
        VerifyInput::Dirac(d) => dirac_sides(id, d, params, Some(d.grid())),
    }
}

/// Evaluates inequality `id` on `input`.
pub fn verify(id: InequalityId, input: &VerifyInput, params: &VerifyParams) -> Result<InequalityReport> {
    if input.arity() != id.arity() {
        return Err(Error::ArityMismatch { expected: id.arity(), found: input.arity() });
    }
    if !(params.eps.is_finite() && params.eps > 0.0 && params.mass.is_finite() && params.mass >= 0.0) {
        return Err(Error::InvalidParameter("need eps > 0 and mass >= 0".into()));
    }
    let coarse = sides(id, input, params)?;
    let fine = sides(id, &input.refined()?, params)?;
    InequalityReport::new(id, coarse, Some(fine), params.report_params(input.kappa()), input.grid())
}

/// Channel evaluation plus the Cartesian cross-check of the same field.
pub fn verify_with_cross_check(
    id: InequalityId,
    input: &VerifyInput,
    params: &VerifyParams,
    cartesian: crate::discretization::CartesianGrid,
) -> Result<(InequalityReport, InequalityReport)> {
    let embedded = match input {
        VerifyInput::Pauli(p) => p.embed(cartesian)?,
        VerifyInput::Dirac(d) => d.embed(cartesian)?,
        VerifyInput::Cartesian(_) => return Err(Error::Unsupported("cross-check needs a channel field".into())),
    };
    Ok((verify(id, input, params)?, verify(id, &VerifyInput::Cartesian(embedded), params)?))
}

pub(crate) fn report_from_sides(
    id: InequalityId,
    coarse: (f64, f64, Option<f64>),
    fine: Option<(f64, f64, Option<f64>)>,
    params: ReportParams,
    grid: Grid,
) -> Result<InequalityReport> {
    let s = |t: (f64, f64, Option<f64>)| Sides { lhs: t.0, rhs: t.1, realized: t.2 };
    InequalityReport::new(id, s(coarse), fine.map(s), params, grid)
}

pub(crate) fn channel_sides(id: InequalityId, input: &VerifyInput, params: &VerifyParams) -> Result<(f64, f64, Option<f64>)> {
    let s = sides(id, input, params)?;
    Ok((s.lhs, s.rhs, s.realized))
}

pub(crate) fn unit_phase(eps: f64, m: f64) -> C64 {
    C64::new(eps, m) / eps.hypot(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::CartesianGrid;
    use std::f64::consts::PI;

    #[test]
    fn ids_round_trip() {
        for id in InequalityId::ALL {
            assert_eq!(id.name().parse::<InequalityId>().unwrap(), id);
            let js = serde_json::to_string(&id).unwrap();
            assert_eq!(js, format!("\"{}\"", id.name()));
        }
        assert!("nope".parse::<InequalityId>().is_err());
    }

    #[test]
    fn lem1_exponential_gamma_integrals() {
        let grid = RadialGrid::default();
        let phi = PauliChannel::from_fn(-1, grid, |r| C64::new((-r).exp(), 0.0)).unwrap();
        // with the 4π restored: ∫|φ|² = π, ∫r|φ|² = ∫r|∂_rφ|² = 3π/2
        let four_pi = 4.0 * PI;
        let a = phi.wnorm(&|_| 1.0).unwrap() * four_pi;
        let b = phi.wnorm(&ident).unwrap() * four_pi;
        let c = phi.radial_derivative().wnorm(&ident).unwrap() * four_pi;
        assert!((a - PI).abs() < 1e-6 && (b - 1.5 * PI).abs() < 1e-6 && (c - 1.5 * PI).abs() < 1e-6);
        let rep = verify(InequalityId::Lem1, &VerifyInput::Pauli(phi), &VerifyParams::new(1.0, 0.0)).unwrap();
        assert!((rep.ratio.unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn arity_is_checked() {
        let g = CartesianGrid::new(4.0, 8).unwrap();
        let f = Field::zeros(g, 4).unwrap();
        let e = verify(InequalityId::Lem2, &VerifyInput::Cartesian(f), &VerifyParams::new(1.0, 0.0)).unwrap_err();
        assert!(matches!(e, Error::ArityMismatch { expected: 2, found: 4 }));
    }

    #[test]
    fn zero_field_is_trivial() {
        let g = CartesianGrid::new(4.0, 8).unwrap();
        let f = Field::zeros(g, 4).unwrap();
        let r = verify(InequalityId::HardyDiracFinal, &VerifyInput::Cartesian(f), &VerifyParams::new(1.0, 0.0)).unwrap();
        assert_eq!((r.lhs, r.rhs, r.slack), (0.0, 0.0, 0.0));
        assert!(r.ratio.is_none());
    }

    #[test]
    fn non_integrable_weight_is_reported() {
        let grid = RadialGrid::default();
        // |φ|²/r ~ r^{-3} near 0 in the r²dr measure: r^{-1}
        let phi = PauliChannel::from_fn(-1, grid, |r| C64::new(1.0 / r, 0.0)).unwrap();
        let e = verify(InequalityId::ForFi, &VerifyInput::Pauli(phi), &VerifyParams::new(1.0, 0.0)).unwrap_err();
        assert!(matches!(e, Error::Divergent { .. }));
    }
}
