//! Fourier-side operations on Cartesian fields.

use super::fft::{plan, wavenumbers};
use super::field::Field;
use super::grid::{CartesianGrid, Grid};
use crate::algebra::{alpha_all, pauli_all, Vec3, C64, I, ZERO};
use crate::error::{Error, Result};

/// Forward transforms of every component.
pub fn spectra(field: &Field) -> Result<Vec<Vec<C64>>> {
    let g = field.grid().as_cartesian()?;
    let fft = plan(g.n());
    Ok(field
        .components()
        .iter()
        .map(|c| {
            let mut s = c.clone();
            fft.forward(&mut s);
            s
        })
        .collect())
}

/// Visits every wavevector as `(ξ, values)` where `values` holds the spectral
/// coefficients of all components at that wavevector.
fn for_each_mode(g: &CartesianGrid, spec: &mut [Vec<C64>], mut visit: impl FnMut(Vec3, &mut [C64])) {
    let n = g.n();
    let k = wavenumbers(n, g.spacing());
    let mut buf = vec![ZERO; spec.len()];
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                let idx = (i * n + j) * n + l;
                for (b, s) in buf.iter_mut().zip(spec.iter()) {
                    *b = s[idx];
                }
                visit(Vec3::new(k[i], k[j], k[l]), &mut buf);
                for (b, s) in buf.iter().zip(spec.iter_mut()) {
                    s[idx] = *b;
                }
            }
        }
    }
}

/// Applies a Fourier multiplier: `out(ξ) = M(ξ) in(ξ)`, with `M` acting in
/// place on the component vector. The output may have a different arity.
pub fn apply_multiplier(
    field: &Field,
    out_arity: usize,
    symbol: impl Fn(Vec3, &[C64], &mut [C64]),
) -> Result<Field> {
    let g = *field.grid().as_cartesian()?;
    let mut spec = spectra(field)?;
    let mut out = vec![vec![ZERO; g.len()]; out_arity];
    let n = g.n();
    let k = wavenumbers(n, g.spacing());
    let arity = field.arity();
    let mut inb = vec![ZERO; arity];
    let mut outb = vec![ZERO; out_arity];
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                let idx = (i * n + j) * n + l;
                for (b, s) in inb.iter_mut().zip(spec.iter()) {
                    *b = s[idx];
                }
                outb.iter_mut().for_each(|v| *v = ZERO);
                symbol(Vec3::new(k[i], k[j], k[l]), &inb, &mut outb);
                for (b, s) in outb.iter().zip(out.iter_mut()) {
                    s[idx] = *b;
                }
            }
        }
    }
    spec.clear();
    let fft = plan(n);
    out.iter_mut().for_each(|c| fft.inverse(c));
    Field::from_components(g, out)
}

/// Spectral gradient of each component: `[∂₁ψ, ∂₂ψ, ∂₃ψ]`.
pub fn gradient(field: &Field) -> Result<[Field; 3]> {
    let g = *field.grid().as_cartesian()?;
    let spec = spectra(field)?;
    let fft = plan(g.n());
    let build = |axis: usize| -> Result<Field> {
        let mut s = spec.clone();
        for_each_mode(&g, &mut s, |xi, v| {
            let f = I * xi.0[axis];
            v.iter_mut().for_each(|c| *c *= f);
        });
        s.iter_mut().for_each(|c| fft.inverse(c));
        Field::from_components(g, s)
    };
    Ok([build(0)?, build(1)?, build(2)?])
}

/// `∂_r = x̂·∇`: log-grid differences on radial grids, spectral on Cartesian.
pub fn radial_derivative(field: &Field) -> Result<Field> {
    match field.grid() {
        Grid::Radial(g) => {
            let comps = field.components().iter().map(|c| g.derivative(c)).collect();
            Field::from_components(*g, comps)
        }
        Grid::Cartesian(_) => {
            let [dx, dy, dz] = gradient(field)?;
            let mut out = Field::zeros(*field.grid(), field.arity())?;
            for idx in 0..field.len() {
                let u = field.position(idx).unit();
                for a in 0..field.arity() {
                    out.component_mut(a)[idx] =
                        dx.component(a)[idx] * u.0[0] + dy.component(a)[idx] * u.0[1] + dz.component(a)[idx] * u.0[2];
                }
            }
            Ok(out)
        }
    }
}

fn cartesian_only(field: &Field, what: &str) -> Result<()> {
    match field.grid() {
        Grid::Cartesian(_) => Ok(()),
        Grid::Radial(_) => Err(Error::Unsupported(format!("{what} on a radial grid; use a radial channel"))),
    }
}

/// `σ·∇φ` for a two-component field.
pub fn sigma_grad(field: &Field) -> Result<Field> {
    cartesian_only(field, "sigma_grad")?;
    field.require_arity(2)?;
    let sig = pauli_all();
    apply_multiplier(field, 2, |xi, v, out| {
        for (k, s) in sig.iter().enumerate() {
            let f = I * xi.0[k];
            let w = s.apply(&[v[0], v[1]]);
            out[0] += f * w[0];
            out[1] += f * w[1];
        }
    })
}

/// `α·∇ψ` for a spinor.
pub fn alpha_grad(field: &Field) -> Result<Field> {
    cartesian_only(field, "alpha_grad")?;
    field.require_arity(4)?;
    let al = alpha_all();
    apply_multiplier(field, 4, |xi, v, out| {
        let v4 = [v[0], v[1], v[2], v[3]];
        for (k, a) in al.iter().enumerate() {
            let f = I * xi.0[k];
            for (o, w) in out.iter_mut().zip(a.apply(&v4)) {
                *o += f * w;
            }
        }
    })
}

/// `‖ψ‖²` evaluated on the Fourier side (Plancherel).
pub fn spectral_norm_sq(field: &Field) -> Result<f64> {
    spectral_weighted(field, |_| 1.0)
}

/// `∫ (1 + |ξ|²)^{1/2} |ψ̂|²` with the discrete Plancherel normalization.
pub fn h_half_norm_sq(field: &Field) -> Result<f64> {
    spectral_weighted(field, |xi| (1.0 + xi.norm_sq()).sqrt())
}

fn spectral_weighted(field: &Field, weight: impl Fn(Vec3) -> f64) -> Result<f64> {
    let g = *field.grid().as_cartesian()?;
    let mut spec = spectra(field)?;
    let mut acc = 0.0;
    for_each_mode(&g, &mut spec, |xi, v| {
        acc += weight(xi) * v.iter().map(|c| c.norm_sqr()).sum::<f64>();
    });
    Ok(acc * g.cell_volume() / g.len() as f64)
}

/// Trigonometric interpolation onto the grid with twice the points per axis.
///
/// The refined nodes are offset by a quarter of the coarse spacing, so each
/// coefficient picks up the phase `e^{−iξh/4}` per axis. The Nyquist plane is
/// dropped, consistent with [`wavenumbers`].
pub fn upsample(field: &Field) -> Result<Field> {
    let g = *field.grid().as_cartesian()?;
    let fine = g.refined();
    let (n, nf) = (g.n(), fine.n());
    let h = g.spacing();
    let k = wavenumbers(n, h);
    let spec = spectra(field)?;
    let fft = plan(nf);
    let target = |j: usize| if j < n / 2 { Some(j) } else if j == n / 2 { None } else { Some(j + n) };
    let phase: Vec<C64> = k.iter().map(|kk| C64::from_polar(1.0, -kk * h / 4.0)).collect();
    let scale = (nf * nf * nf) as f64 / (n * n * n) as f64;
    let comps = spec
        .iter()
        .map(|s| {
            let mut out = vec![ZERO; fine.len()];
            for i in 0..n {
                let Some(ti) = target(i) else { continue };
                for j in 0..n {
                    let Some(tj) = target(j) else { continue };
                    for l in 0..n {
                        let Some(tl) = target(l) else { continue };
                        out[(ti * nf + tj) * nf + tl] = s[(i * n + j) * n + l] * phase[i] * phase[j] * phase[l] * scale;
                    }
                }
            }
            fft.inverse(&mut out);
            out
        })
        .collect();
    Field::from_components(fine, comps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::contract_sigma;
    use crate::discretization::WeightKind;

    fn grid() -> CartesianGrid {
        CartesianGrid::new(5.0, 16).unwrap()
    }

    fn gaussian(g: CartesianGrid, arity: usize) -> Field {
        Field::from_fn(g, arity, |x, out| {
            let e = (-0.6 * (x - Vec3::new(0.3, -0.2, 0.1)).norm_sq()).exp();
            for (a, o) in out.iter_mut().enumerate() {
                *o = C64::new(e * (1.0 + a as f64 * 0.1), e * x.0[a % 3]);
            }
        })
        .unwrap()
    }

    #[test]
    fn plancherel() {
        let f = gaussian(grid(), 4);
        let a = f.weighted_norm_sq(WeightKind::One).unwrap();
        let b = spectral_norm_sq(&f).unwrap();
        assert!((a - b).abs() < 1e-10 * a);
    }

    #[test]
    fn plane_wave_is_eigenfunction_of_sigma_grad() {
        let g = grid();
        let dk = 2.0 * std::f64::consts::PI / (2.0 * g.half_width());
        let kv = Vec3::new(dk, -2.0 * dk, 3.0 * dk);
        let u = [C64::new(0.3, 0.1), C64::new(-0.5, 0.7)];
        let f = Field::from_fn(g, 2, |x, out| {
            let e = C64::from_polar(1.0, kv.dot(&x));
            out[0] = e * u[0];
            out[1] = e * u[1];
        })
        .unwrap();
        let got = sigma_grad(&f).unwrap();
        let su = contract_sigma(kv).apply(&u);
        for idx in [0, 17, 999, g.len() - 1] {
            let e = C64::from_polar(1.0, kv.dot(&g.position(idx)));
            for (a, sa) in su.iter().enumerate() {
                assert!((got.component(a)[idx] - I * sa * e).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn constant_has_zero_gradient() {
        let f = Field::from_fn(grid(), 2, |_, out| out[0] = C64::new(2.0, -1.0)).unwrap();
        let d = radial_derivative(&f).unwrap();
        assert!(d.density().iter().all(|v| *v < 1e-24));
        let s = sigma_grad(&f).unwrap();
        assert!(s.density().iter().all(|v| *v < 1e-24));
    }

    #[test]
    fn radial_derivative_of_gaussian() {
        let g = CartesianGrid::new(6.0, 32).unwrap();
        let f = Field::from_fn(g, 2, |x, out| out[1] = C64::new((-x.norm_sq()).exp(), 0.0)).unwrap();
        let d = radial_derivative(&f).unwrap();
        let err = (0..g.len())
            .map(|i| {
                let r = g.position(i).norm();
                (d.component(1)[i].re + 2.0 * r * (-r * r).exp()).abs()
            })
            .fold(0.0, f64::max);
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn upsampling_preserves_band_limited_fields() {
        let g = CartesianGrid::new(6.0, 32).unwrap();
        let f = gaussian(g, 2);
        let up = upsample(&f).unwrap();
        let fine = g.refined();
        let err = (0..fine.len())
            .map(|i| {
                let x = fine.position(i);
                let e = (-0.6 * (x - Vec3::new(0.3, -0.2, 0.1)).norm_sq()).exp();
                (up.component(0)[i] - C64::new(e, e * x.0[0])).norm()
            })
            .fold(0.0, f64::max);
        assert!(err < 1e-6, "{err}");
        let n1 = f.weighted_norm_sq(WeightKind::One).unwrap();
        let n2 = up.weighted_norm_sq(WeightKind::One).unwrap();
        assert!((n1 - n2).abs() < 1e-10 * n1);
    }

    #[test]
    fn radial_grid_rejects_spectral_operators() {
        let f = Field::zeros(crate::discretization::RadialGrid::default(), 2).unwrap();
        assert!(matches!(sigma_grad(&f), Err(Error::Unsupported(_))));
    }
}
