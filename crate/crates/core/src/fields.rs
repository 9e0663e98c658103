//! Reproducible test fields: Gaussian packets and seeded band-limited noise.
//!
//! Randomness comes from ChaCha8 seeded with a `u64`, so every corpus is
//! identical across platforms.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::algebra::{Vec3, C64};
use crate::discretization::fft::{plan, wavenumbers};
use crate::discretization::{CartesianGrid, Field};
use crate::error::{Error, Result};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn complex_normal(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) / 2f64.sqrt()
}

/// `p · exp(−|x − c|²/(2w²)) · e^{ik·x}` with a constant polarization `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianPacket {
    pub center: [f64; 3],
    pub width: f64,
    pub wavevector: [f64; 3],
    pub polarization: Vec<C64>,
}

impl GaussianPacket {
    pub fn validate(&self) -> Result<()> {
        if !(self.width.is_finite() && self.width > 0.0) {
            return Err(Error::InvalidParameter(format!("packet width must be positive, got {}", self.width)));
        }
        if !matches!(self.polarization.len(), 2 | 4) {
            return Err(Error::InvalidParameter("packet polarization needs 2 or 4 components".into()));
        }
        Ok(())
    }

    pub fn value(&self, x: Vec3, out: &mut [C64]) {
        let d = x - Vec3(self.center);
        let env = (-d.norm_sq() / (2.0 * self.width * self.width)).exp();
        let phase = C64::from_polar(env, Vec3(self.wavevector).dot(&x));
        for (o, p) in out.iter_mut().zip(&self.polarization) {
            *o = phase * p;
        }
    }

    pub fn sample(&self, grid: CartesianGrid) -> Result<Field> {
        self.validate()?;
        Field::from_fn(grid, self.polarization.len(), |x, o| self.value(x, o))
    }

    /// A random packet: width in [0.7, 1.2], centre within 1.5 of the
    /// origin, modulation |k| ≤ 2, unit polarization.
    pub fn random(rng: &mut ChaCha8Rng, arity: usize) -> Self {
        let ball = |rng: &mut ChaCha8Rng, radius: f64| loop {
            let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if v.norm() <= 1.0 {
                return v.scale(radius).0;
            }
        };
        let width = rng.gen_range(0.7..1.2);
        let center = ball(rng, 1.5);
        let wavevector = ball(rng, 2.0);
        let mut polarization: Vec<C64> = (0..arity).map(|_| complex_normal(rng)).collect();
        let n = polarization.iter().map(|p| p.norm_sqr()).sum::<f64>().sqrt();
        polarization.iter_mut().for_each(|p| *p /= n);
        GaussianPacket { center, width, wavevector, polarization }
    }
}

/// Seeded random field whose spectrum is supported in `|ξ| ≤ k_max`, with a
/// cosine taper over the top fifth, then localized by `exp(−|x|²/(2s²))`.
/// The envelope makes the field vanish at the box walls (s = L/7 by
/// default, so below 1e−12 there) at the price of widening the spectrum by
/// about `1/s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandLimitedSpec {
    pub seed: u64,
    pub arity: usize,
    pub k_max: f64,
    pub envelope: Option<f64>,
    /// After localizing, drop the modes whose grid wavenumber vanishes
    /// (`ξ = 0` and the all-Nyquist corners), where the massless symbol is
    /// singular.
    #[serde(default)]
    pub zero_mean: bool,
}

impl BandLimitedSpec {
    pub fn new(seed: u64, arity: usize) -> Self {
        BandLimitedSpec { seed, arity, k_max: 2.0, envelope: None, zero_mean: false }
    }

    pub fn with_zero_mean(mut self) -> Self {
        self.zero_mean = true;
        self
    }

    pub fn sample(&self, grid: CartesianGrid) -> Result<Field> {
        if !matches!(self.arity, 2 | 4) {
            return Err(Error::InvalidParameter("band-limited field needs arity 2 or 4".into()));
        }
        let envelope = self.envelope.unwrap_or(grid.half_width() / 7.0);
        if !(self.k_max > 0.0 && envelope > 0.0) {
            return Err(Error::InvalidParameter("k_max and envelope must be positive".into()));
        }
        let n = grid.n();
        let k = wavenumbers(n, grid.spacing());
        let fft = plan(n);
        let mut rng = rng(self.seed);
        let mut comps = Vec::with_capacity(self.arity);
        for _ in 0..self.arity {
            let mut data = vec![C64::new(0.0, 0.0); grid.len()];
            for i in 0..n {
                for j in 0..n {
                    for l in 0..n {
                        // draw for every mode so the stream does not depend on k_max
                        let z = complex_normal(&mut rng);
                        let q = Vec3::new(k[i], k[j], k[l]).norm() / self.k_max;
                        let nyquist = i == n / 2 || j == n / 2 || l == n / 2;
                        let taper = if nyquist {
                            0.0
                        } else if q <= 0.8 {
                            1.0
                        } else if q < 1.0 {
                            0.5 * (1.0 + (PI * (q - 0.8) / 0.2).cos())
                        } else {
                            0.0
                        };
                        data[grid.index(i, j, l)] = z * taper;
                    }
                }
            }
            fft.inverse(&mut data);
            comps.push(data);
        }
        let s2 = 2.0 * envelope * envelope;
        for idx in 0..grid.len() {
            let w = (-grid.position(idx).norm_sq() / s2).exp();
            for c in comps.iter_mut() {
                c[idx] *= w;
            }
        }
        if self.zero_mean {
            let null = [0, n / 2];
            for c in comps.iter_mut() {
                fft.forward(c);
                for &i in &null {
                    for &j in &null {
                        for &l in &null {
                            c[grid.index(i, j, l)] = C64::new(0.0, 0.0);
                        }
                    }
                }
                fft.inverse(c);
            }
        }
        let mut f = Field::from_components(grid, comps)?;
        let norm = f.norm()?;
        if norm > 0.0 {
            f.scale(C64::new(1.0 / norm, 0.0));
        }
        Ok(f)
    }
}

/// The smooth corpus: `count` random packets (optionally a sum of
/// `per_field` packets each) normalized in L².
pub fn packet_corpus(seed: u64, count: usize, arity: usize, per_field: usize) -> Vec<Vec<GaussianPacket>> {
    let mut rng = rng(seed);
    (0..count).map(|_| (0..per_field.max(1)).map(|_| GaussianPacket::random(&mut rng, arity)).collect()).collect()
}

/// Sum of packets on a grid, normalized in L².
pub fn sample_packets(packets: &[GaussianPacket], grid: CartesianGrid) -> Result<Field> {
    let first = packets.first().ok_or_else(|| Error::InvalidParameter("empty packet list".into()))?;
    let mut f = first.sample(grid)?;
    for p in &packets[1..] {
        f.axpy(C64::new(1.0, 0.0), &p.sample(grid)?)?;
    }
    let n = f.norm()?;
    if n > 0.0 {
        f.scale(C64::new(1.0 / n, 0.0));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::spectral::spectra;

    #[test]
    fn seeded_fields_are_reproducible() {
        let g = CartesianGrid::new(6.0, 16).unwrap();
        let a = BandLimitedSpec::new(7, 4).sample(g).unwrap();
        let b = BandLimitedSpec::new(7, 4).sample(g).unwrap();
        let c = BandLimitedSpec::new(8, 4).sample(g).unwrap();
        assert_eq!(a, b);
        assert!(a.sub(&c).unwrap().norm().unwrap() > 0.1);
        assert!((a.norm().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn band_limited_spectrum_decays() {
        let g = CartesianGrid::new(8.0, 32).unwrap();
        let f = BandLimitedSpec::new(3, 2).sample(g).unwrap();
        let spec = spectra(&f).unwrap();
        let k = wavenumbers(32, g.spacing());
        let (mut inside, mut outside) = (0.0, 0.0);
        for i in 0..32 {
            for j in 0..32 {
                for l in 0..32 {
                    let nyquist = i == 16 || j == 16 || l == 16;
                    let q = if nyquist { f64::INFINITY } else { Vec3::new(k[i], k[j], k[l]).norm() };
                    let e: f64 = spec.iter().map(|c| c[g.index(i, j, l)].norm_sqr()).sum();
                    if q <= 0.8 * PI / g.spacing() {
                        inside += e;
                    } else {
                        outside += e;
                    }
                }
            }
        }
        assert!(outside / inside < 1e-4, "{}", outside / inside);
    }

    #[test]
    fn zero_mean_fields_pass_the_massless_resolvent() {
        use crate::operators::{apply_dirac_operator, apply_free_resolvent, FreeDiracParams, Sign};
        let g = CartesianGrid::new(8.0, 32).unwrap();
        let f = BandLimitedSpec::new(5, 4).with_zero_mean().sample(g).unwrap();
        let p = FreeDiracParams::new(0.0, 0.0, Sign::Minus).unwrap();
        let back = apply_dirac_operator(&apply_free_resolvent(&f, &p).unwrap(), &p).unwrap();
        assert!(back.sub(&f).unwrap().norm().unwrap() < 1e-9);
        let plain = BandLimitedSpec::new(5, 4).sample(g).unwrap();
        assert!(apply_free_resolvent(&plain, &p).is_err());
    }

    #[test]
    fn packets_within_ranges() {
        let corpus = packet_corpus(1, 50, 4, 1);
        for p in corpus.iter().flatten() {
            assert!((0.7..1.2).contains(&p.width));
            assert!(Vec3(p.center).norm() <= 1.5);
            assert!(Vec3(p.wavevector).norm() <= 2.0);
            let n: f64 = p.polarization.iter().map(|c| c.norm_sqr()).sum();
            assert!((n - 1.0).abs() < 1e-12);
        }
        let g = CartesianGrid::new(8.0, 16).unwrap();
        let f = sample_packets(&corpus[0], g).unwrap();
        assert!((f.norm().unwrap() - 1.0).abs() < 1e-12);
    }
}
