//! Hermitian matrix potentials with a Coulomb-type singularity at the origin.
//!
//! Most shipped potentials have the radial block form
//! `(1/r)·[[c(r)·𝕀₂, b̄·σ·x̂], [b·σ·x̂, c(r)·𝕀₂]]`, which preserves every
//! spin-orbit channel. Those carry a [`Structure::Radial`] tag so the channel
//! solvers can apply them exactly; anything else is [`Structure::General`].

mod radial;
mod spec;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{contract_sigma, operator_norm, Mat2, Mat4, Vec3, C64, I, ZERO};
use crate::discretization::{CartesianGrid, Field};
use crate::error::{Error, Result};
use crate::operators::RadialChannel;

pub use radial::{HProfiles, RadialScalarPotential};
pub use spec::PotentialSpec;

pub type Evaluator = Arc<dyn Fn(Vec3) -> Mat4 + Send + Sync>;
pub type RadialProfile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type VectorField = Arc<dyn Fn(Vec3) -> Vec3 + Send + Sync>;

/// Radii of the sampling shells used for empirical singularity bounds:
/// two per decade from 1e−6 to 10.
pub fn shell_radii() -> Vec<f64> {
    (0..=14).map(|k| 10f64.powf(-6.0 + 0.5 * k as f64)).collect()
}

/// Directions per shell.
pub const SHELL_DIRECTIONS: usize = 200;

/// Quasi-uniform unit vectors on the sphere (Fibonacci lattice).
pub fn fibonacci_directions(n: usize) -> Vec<Vec3> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let s = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            Vec3::new(s * phi.cos(), s * phi.sin(), z)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PotentialKind {
    Coulomb { nu: f64 },
    /// `A = a·x/|x|²` when `radial_a` is set, otherwise a user field.
    Electromagnetic { nu: f64, radial_a: Option<f64> },
    Remark14 { c: f64, eps: f64, m: f64 },
    RadialScalar,
    Custom,
}

impl PotentialKind {
    pub fn tag(&self) -> &'static str {
        match self {
            PotentialKind::Coulomb { .. } => "coulomb",
            PotentialKind::Electromagnetic { .. } => "electromagnetic",
            PotentialKind::Remark14 { .. } => "remark14",
            PotentialKind::RadialScalar => "radial-scalar",
            PotentialKind::Custom => "custom",
        }
    }
}

/// Block structure of the potential, used by channel-exact code paths.
#[derive(Clone)]
pub enum Structure {
    /// `(1/r)[[c(r), b̄ σ·x̂], [b σ·x̂, c(r)]]`.
    Radial { c: RadialProfile, b: C64 },
    General,
}

impl fmt::Debug for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Structure::Radial { b, .. } => write!(f, "Radial {{ b: {b} }}"),
            Structure::General => write!(f, "General"),
        }
    }
}

#[derive(Clone)]
pub struct MatrixPotential {
    kind: PotentialKind,
    evaluator: Evaluator,
    structure: Structure,
    bound: f64,
}

impl fmt::Debug for MatrixPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MatrixPotential")
            .field("kind", &self.kind)
            .field("structure", &self.structure)
            .field("bound", &self.bound)
            .finish()
    }
}

fn radial_block(c: f64, b: C64, x: Vec3) -> Mat4 {
    let r = x.norm();
    let s = contract_sigma(x.unit());
    let diag = Mat2::identity().scale(C64::new(c / r, 0.0));
    Mat4::from_blocks(diag, s.scale(b.conj() / r), s.scale(b / r), diag)
}

/// Empirical `sup |x|·‖𝕍(x)‖` over the sampling shells.
fn empirical_bound(ev: &Evaluator) -> Result<f64> {
    let dirs = fibonacci_directions(SHELL_DIRECTIONS);
    let mut sup = 0.0_f64;
    for r in shell_radii() {
        for d in &dirs {
            let v = ev(d.scale(r));
            if !v.is_finite() {
                return Err(Error::Numerical(format!("potential is not finite at |x| = {r:e}")));
            }
            sup = sup.max(r * operator_norm(&v)?);
        }
    }
    Ok(sup)
}

impl MatrixPotential {
    fn radial(kind: PotentialKind, c: RadialProfile, b: C64) -> Result<Self> {
        let cc = c.clone();
        let evaluator: Evaluator = Arc::new(move |x: Vec3| radial_block(cc(x.norm()), b, x));
        let bound = empirical_bound(&evaluator)?;
        Ok(MatrixPotential { kind, evaluator, structure: Structure::Radial { c, b }, bound })
    }

    /// The zero potential.
    pub fn zero() -> Self {
        MatrixPotential {
            kind: PotentialKind::Coulomb { nu: 0.0 },
            evaluator: Arc::new(|_| Mat4::zeros()),
            structure: Structure::Radial { c: Arc::new(|_| 0.0), b: ZERO },
            bound: 0.0,
        }
    }

    /// `(ν/|x|)·𝕀₄`.
    pub fn coulomb(nu: f64) -> Result<Self> {
        if !nu.is_finite() {
            return Err(Error::InvalidParameter(format!("nu must be finite, got {nu}")));
        }
        Self::radial(PotentialKind::Coulomb { nu }, Arc::new(move |_| nu), ZERO)
    }

    /// `[[ν/|x|, σ·A], [σ·A, ν/|x|]]` with the radial field `A = a·x/|x|²`.
    pub fn electromagnetic_radial(nu: f64, a: f64) -> Result<Self> {
        if !(nu.is_finite() && a.is_finite()) {
            return Err(Error::InvalidParameter("nu and a must be finite".into()));
        }
        Self::radial(PotentialKind::Electromagnetic { nu, radial_a: Some(a) }, Arc::new(move |_| nu), C64::new(a, 0.0))
    }

    /// `[[ν/|x|, σ·A], [σ·A, ν/|x|]]` for an arbitrary real vector field `A`.
    pub fn electromagnetic(nu: f64, a: VectorField) -> Result<Self> {
        if !nu.is_finite() {
            return Err(Error::InvalidParameter(format!("nu must be finite, got {nu}")));
        }
        let evaluator: Evaluator = Arc::new(move |x: Vec3| {
            let d = Mat2::identity().scale(C64::new(nu / x.norm(), 0.0));
            let s = contract_sigma(a(x));
            Mat4::from_blocks(d, s, s, d)
        });
        let bound = empirical_bound(&evaluator)?;
        Ok(MatrixPotential {
            kind: PotentialKind::Electromagnetic { nu, radial_a: None },
            evaluator,
            structure: Structure::General,
            bound,
        })
    }

    /// Coupling of the potentials that make `ψ₀^{ε,m}` a kernel element:
    /// `b = i − c(ε + im)/√(ε² + m²)`.
    pub fn remark14_coupling(c: f64, eps: f64, m: f64) -> C64 {
        let mu = (eps * eps + m * m).sqrt();
        I - C64::new(eps, m) * (c / mu)
    }

    /// `(1/|x|)[[c, b̄ σ·x̂], [b σ·x̂, c]]` with the coupling above.
    pub fn remark14_family(c: f64, eps: f64, m: f64) -> Result<Self> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
        }
        if !(m.is_finite() && m >= 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter("need finite c and m >= 0".into()));
        }
        let b = Self::remark14_coupling(c, eps, m);
        Self::radial(PotentialKind::Remark14 { c, eps, m }, Arc::new(move |_| c), b)
    }

    /// `𝕀₄/|x|`, the ε → 0 member of the family with `c = 1`.
    pub fn unit_coulomb() -> Result<Self> {
        Self::coulomb(1.0)
    }

    /// Channel-preserving potential with explicit `c` and `b`.
    pub fn spin_coupled(c: f64, b: C64) -> Result<Self> {
        Self::radial(PotentialKind::Custom, Arc::new(move |_| c), b)
    }

    /// `V(|x|)·𝕀₄`.
    pub fn radial_scalar(v: RadialProfile) -> Result<Self> {
        let vv = v.clone();
        Self::radial(PotentialKind::RadialScalar, Arc::new(move |r| r * vv(r)), ZERO)
    }

    /// A user evaluator. Hermiticity is checked on the sampling shells and
    /// the bound is the empirical sup there.
    pub fn custom(evaluator: Evaluator) -> Result<Self> {
        let bound = empirical_bound(&evaluator)?;
        Ok(MatrixPotential { kind: PotentialKind::Custom, evaluator, structure: Structure::General, bound })
    }

    pub fn kind(&self) -> PotentialKind {
        self.kind
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    /// Declared singularity bound `sup |x|·‖𝕍(x)‖`.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// Whether the declared bound is strictly below 1.
    pub fn satisfies_hypothesis(&self) -> bool {
        self.bound < 1.0
    }

    pub fn evaluate(&self, x: Vec3) -> Mat4 {
        (self.evaluator)(x)
    }

    /// `sup |x|·‖𝕍(x)‖` over the nodes of a Cartesian grid.
    pub fn bound_on_grid(&self, grid: &CartesianGrid) -> Result<f64> {
        let mut sup = 0.0_f64;
        for x in grid.positions() {
            sup = sup.max(x.norm() * operator_norm(&self.evaluate(x))?);
        }
        Ok(sup)
    }

    /// Tabulates the potential on a Cartesian grid.
    pub fn sample(&self, grid: &CartesianGrid) -> SampledPotential {
        match &self.structure {
            Structure::Radial { c, b } if *b == ZERO => {
                SampledPotential::Scalar(grid.positions().map(|x| c(x.norm()) / x.norm()).collect())
            }
            _ => SampledPotential::Matrix(grid.positions().map(|x| self.evaluate(x)).collect()),
        }
    }

    /// `𝕍ψ` on a Cartesian field.
    pub fn apply(&self, psi: &Field) -> Result<Field> {
        let grid = psi.grid().as_cartesian()?;
        self.sample(grid).apply(psi)
    }

    /// `𝕍ψ` in a spin-orbit channel:
    /// `(f, g) ↦ ((c f − i b̄ g)/r, (c g + i b f)/r)`.
    pub fn apply_channel(&self, psi: &RadialChannel) -> Result<RadialChannel> {
        let Structure::Radial { c, b } = &self.structure else {
            return Err(Error::Unsupported("potential does not preserve spin-orbit channels".into()));
        };
        let grid = *psi.grid();
        let mut up = Vec::with_capacity(grid.len());
        let mut lo = Vec::with_capacity(grid.len());
        for i in 0..grid.len() {
            let r = grid.node(i);
            let cr = c(r);
            let (f, g) = (psi.upper()[i], psi.lower()[i]);
            up.push((f * cr - I * b.conj() * g) / r);
            lo.push((g * cr + I * b * f) / r);
        }
        RadialChannel::new(psi.kappa(), grid, up, lo)
    }
}

/// A potential tabulated on grid nodes.
#[derive(Debug, Clone)]
pub enum SampledPotential {
    Scalar(Vec<f64>),
    Matrix(Vec<Mat4>),
}

impl SampledPotential {
    pub fn len(&self) -> usize {
        match self {
            SampledPotential::Scalar(v) => v.len(),
            SampledPotential::Matrix(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn apply(&self, psi: &Field) -> Result<Field> {
        psi.require_arity(4)?;
        if psi.len() != self.len() {
            return Err(Error::GridMismatch("potential sampled on a different grid".into()));
        }
        let mut out = psi.clone();
        match self {
            SampledPotential::Scalar(v) => {
                for a in 0..4 {
                    for (o, s) in out.component_mut(a).iter_mut().zip(v) {
                        *o *= *s;
                    }
                }
            }
            SampledPotential::Matrix(ms) => {
                for (i, m) in ms.iter().enumerate() {
                    let x = [psi.component(0)[i], psi.component(1)[i], psi.component(2)[i], psi.component(3)[i]];
                    let y = m.apply(&x);
                    for (a, v) in y.iter().enumerate() {
                        out.component_mut(a)[i] = *v;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `|x|^p`-weighted multiplication: used for `|x|𝕍` and similar.
    pub fn apply_weighted(&self, psi: &Field, w: impl Fn(Vec3) -> f64) -> Result<Field> {
        Ok(self.apply(psi)?.mul_real(w))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::RadialChannel;
    use crate::discretization::RadialGrid;

    #[test]
    fn coulomb_bound_is_nu() {
        let v = MatrixPotential::coulomb(0.5).unwrap();
        assert!((v.bound() - 0.5).abs() < 1e-12);
        assert!(v.satisfies_hypothesis());
    }

    #[test]
    fn electromagnetic_bounds() {
        let a0 = MatrixPotential::electromagnetic_radial(0.3, 0.0).unwrap();
        assert!((a0.bound() - 0.3).abs() < 1e-12);
        let pure = MatrixPotential::electromagnetic_radial(0.0, 0.4).unwrap();
        assert!((pure.bound() - 0.4).abs() < 1e-12);
        // the general path agrees with the radial shortcut
        let general = MatrixPotential::electromagnetic(0.0, Arc::new(|x: Vec3| x.scale(0.4 / x.norm_sq()))).unwrap();
        assert!((general.bound() - 0.4).abs() < 1e-12);
        let x = Vec3::new(0.3, -0.7, 0.2);
        assert!((general.evaluate(x) - pure.evaluate(x)).max_abs() < 1e-14);
    }

    #[test]
    fn remark14_bounds() {
        let zero = MatrixPotential::remark14_family(0.0, 1.0, 0.0).unwrap();
        assert!((zero.bound() - 1.0).abs() < 1e-12);
        assert!(!zero.satisfies_hypothesis());
        let b = MatrixPotential::remark14_coupling(0.0, 1.0, 0.0);
        assert!((b - C64::new(0.0, 1.0)).norm() < 1e-15);
        // c = 0.3, ε = 1, m = 0: |b| = |i − 0.3|
        let v = MatrixPotential::remark14_family(0.3, 1.0, 0.0).unwrap();
        assert!((v.bound() - (0.3 + 1.09f64.sqrt())).abs() < 1e-12);
        // c = 1 in the ε → 0 limit gives b = 0 when m > 0
        let lim = MatrixPotential::remark14_coupling(1.0, 1e-14, 1.0);
        assert!(lim.norm() < 1e-13);
    }

    #[test]
    fn channel_application_matches_pointwise() {
        let v = MatrixPotential::remark14_family(0.3, 1.0, 0.5).unwrap();
        let grid = RadialGrid::new(1e-2, 5.0, 64).unwrap();
        for kappa in [-2, -1, 1, 2] {
            let ch = RadialChannel::from_fn(kappa, grid, |r| {
                (C64::new((-r).exp(), 0.2), C64::new(0.1, r * (-r).exp()))
            })
            .unwrap();
            let vch = v.apply_channel(&ch).unwrap();
            let i = 30;
            let x = Vec3::new(0.3, 0.4, 0.5).unit().scale(grid.node(i));
            let direct = v.evaluate(x).apply(&ch.evaluate(x).unwrap());
            let via = vch.evaluate(x).unwrap();
            for a in 0..4 {
                assert!((direct[a] - via[a]).norm() < 1e-12, "kappa {kappa} comp {a}");
            }
        }
    }

    #[test]
    fn custom_rejects_non_hermitian() {
        let bad: Evaluator = Arc::new(|x: Vec3| {
            let mut m = Mat4::identity().scale(C64::new(0.1 / x.norm(), 0.0));
            m[(0, 1)] = C64::new(0.1 / x.norm(), 0.0);
            m
        });
        assert!(matches!(MatrixPotential::custom(bad), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn sampled_scalar_and_matrix_agree() {
        let g = CartesianGrid::new(3.0, 8).unwrap();
        let psi = Field::from_fn(g, 4, |x, o| {
            o[0] = C64::new(x.0[0], 1.0);
            o[3] = C64::new(0.0, x.0[2]);
        })
        .unwrap();
        let v = MatrixPotential::coulomb(0.7).unwrap();
        let fast = v.apply(&psi).unwrap();
        let slow = SampledPotential::Matrix(g.positions().map(|x| v.evaluate(x)).collect()).apply(&psi).unwrap();
        assert!(fast.sub(&slow).unwrap().norm().unwrap() < 1e-13);
    }
}
