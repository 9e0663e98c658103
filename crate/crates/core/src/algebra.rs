//! Dense complex 2×2 and 4×4 matrix algebra for the Pauli and Dirac matrices.
//!
//! The Dirac matrices are written in the standard (Dirac) representation,
//!
//! ```text
//! αₖ = [[0, σₖ], [σₖ, 0]],   β = [[𝕀₂, 0], [0, −𝕀₂]],
//! ```
//!
//! so a four-spinor splits into an upper pair φ and a lower pair χ. Everything
//! is stored dense and row-major; there is no Clifford-algebra abstraction.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Relative tolerance used to accept a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// A real 3-vector: a position, a frequency, or a unit direction.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3(pub [f64; 3]);

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3([x, y, z])
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }

    pub fn dot(&self, other: &Vec3) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn cross(&self, o: &Vec3) -> Vec3 {
        let [a1, a2, a3] = self.0;
        let [b1, b2, b3] = o.0;
        Vec3([a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1])
    }

    pub fn scale(&self, s: f64) -> Vec3 {
        Vec3(self.0.map(|v| v * s))
    }

    /// `x/|x|`; the zero vector maps to itself.
    pub fn unit(&self) -> Vec3 {
        let n = self.norm();
        if n == 0.0 {
            *self
        } else {
            self.scale(1.0 / n)
        }
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

macro_rules! square_matrix {
    ($name:ident, $n:expr) => {
        #[derive(Debug, Clone, Copy, PartialEq)]
        pub struct $name(pub [[C64; $n]; $n]);

        impl $name {
            pub const DIM: usize = $n;

            pub fn zeros() -> Self {
                $name([[ZERO; $n]; $n])
            }

            pub fn identity() -> Self {
                let mut m = Self::zeros();
                for i in 0..$n {
                    m.0[i][i] = ONE;
                }
                m
            }

            pub fn from_diagonal(d: [C64; $n]) -> Self {
                let mut m = Self::zeros();
                for i in 0..$n {
                    m.0[i][i] = d[i];
                }
                m
            }

            pub fn scale(&self, s: C64) -> Self {
                let mut m = *self;
                m.0.iter_mut().flatten().for_each(|v| *v *= s);
                m
            }

            pub fn adjoint(&self) -> Self {
                let mut m = Self::zeros();
                for i in 0..$n {
                    for j in 0..$n {
                        m.0[i][j] = self.0[j][i].conj();
                    }
                }
                m
            }

            /// Frobenius norm.
            pub fn frobenius(&self) -> f64 {
                self.0.iter().flatten().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
            }

            /// Largest absolute entry.
            pub fn max_abs(&self) -> f64 {
                self.0.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max)
            }

            /// `‖M − M†‖_F`, the absolute deviation from Hermiticity.
            pub fn hermitian_deviation(&self) -> f64 {
                (*self - self.adjoint()).frobenius()
            }

            pub fn is_hermitian(&self) -> bool {
                self.hermitian_deviation() <= HERMITIAN_TOL * self.frobenius().max(1.0)
            }

            pub fn apply(&self, v: &[C64; $n]) -> [C64; $n] {
                let mut out = [ZERO; $n];
                for i in 0..$n {
                    let mut acc = ZERO;
                    for j in 0..$n {
                        acc += self.0[i][j] * v[j];
                    }
                    out[i] = acc;
                }
                out
            }

            pub fn is_finite(&self) -> bool {
                self.0.iter().flatten().all(|v| v.re.is_finite() && v.im.is_finite())
            }
        }

        impl Index<(usize, usize)> for $name {
            type Output = C64;
            fn index(&self, (i, j): (usize, usize)) -> &C64 {
                &self.0[i][j]
            }
        }

        impl IndexMut<(usize, usize)> for $name {
            fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
                &mut self.0[i][j]
            }
        }

        impl Add for $name {
            type Output = $name;
            fn add(self, o: $name) -> $name {
                let mut m = self;
                for i in 0..$n {
                    for j in 0..$n {
                        m.0[i][j] += o.0[i][j];
                    }
                }
                m
            }
        }

        impl Sub for $name {
            type Output = $name;
            fn sub(self, o: $name) -> $name {
                let mut m = self;
                for i in 0..$n {
                    for j in 0..$n {
                        m.0[i][j] -= o.0[i][j];
                    }
                }
                m
            }
        }

        impl Neg for $name {
            type Output = $name;
            fn neg(self) -> $name {
                self.scale(-ONE)
            }
        }

        impl Mul for $name {
            type Output = $name;
            fn mul(self, o: $name) -> $name {
                let mut m = $name::zeros();
                for i in 0..$n {
                    for k in 0..$n {
                        let a = self.0[i][k];
                        if a == ZERO {
                            continue;
                        }
                        for j in 0..$n {
                            m.0[i][j] += a * o.0[k][j];
                        }
                    }
                }
                m
            }
        }
    };
}

square_matrix!(Mat2, 2);
square_matrix!(Mat4, 4);

impl Mat4 {
    /// Assembles `[[a, b], [c, d]]` from 2×2 blocks.
    pub fn from_blocks(a: Mat2, b: Mat2, c: Mat2, d: Mat2) -> Mat4 {
        let mut m = Mat4::zeros();
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] = a.0[i][j];
                m.0[i][j + 2] = b.0[i][j];
                m.0[i + 2][j] = c.0[i][j];
                m.0[i + 2][j + 2] = d.0[i][j];
            }
        }
        m
    }

    fn to_nalgebra(self) -> Matrix4<C64> {
        Matrix4::from_fn(|i, j| self.0[i][j])
    }
}

/// Pauli matrix σₖ, k ∈ {1, 2, 3}.
pub fn pauli(k: usize) -> Result<Mat2> {
    let m = match k {
        1 => [[ZERO, ONE], [ONE, ZERO]],
        2 => [[ZERO, -I], [I, ZERO]],
        3 => [[ONE, ZERO], [ZERO, -ONE]],
        _ => return Err(Error::IndexOutOfRange { what: "pauli", index: k }),
    };
    Ok(Mat2(m))
}

/// Dirac matrix αₖ = [[0, σₖ], [σₖ, 0]].
pub fn dirac_alpha(k: usize) -> Result<Mat4> {
    let s = pauli(k).map_err(|_| Error::IndexOutOfRange { what: "dirac_alpha", index: k })?;
    Ok(Mat4::from_blocks(Mat2::zeros(), s, s, Mat2::zeros()))
}

/// β = diag(1, 1, −1, −1).
pub fn dirac_beta() -> Mat4 {
    Mat4::from_diagonal([ONE, ONE, -ONE, -ONE])
}

/// The three Pauli matrices, for hot loops.
pub fn pauli_all() -> [Mat2; 3] {
    [pauli(1).unwrap(), pauli(2).unwrap(), pauli(3).unwrap()]
}

/// The three α matrices, for hot loops.
pub fn alpha_all() -> [Mat4; 3] {
    [dirac_alpha(1).unwrap(), dirac_alpha(2).unwrap(), dirac_alpha(3).unwrap()]
}

/// σ·v = Σₖ vₖσₖ.
pub fn contract_sigma(v: Vec3) -> Mat2 {
    let [x, y, z] = v.0;
    Mat2([[C64::new(z, 0.0), C64::new(x, -y)], [C64::new(x, y), C64::new(-z, 0.0)]])
}

/// α·v = Σₖ vₖαₖ.
pub fn contract_alpha(v: Vec3) -> Mat4 {
    let s = contract_sigma(v);
    Mat4::from_blocks(Mat2::zeros(), s, s, Mat2::zeros())
}

/// Largest absolute eigenvalue of a Hermitian 4×4 matrix, i.e. its spectral norm.
pub fn operator_norm(m: &Mat4) -> Result<f64> {
    let deviation = m.hermitian_deviation();
    let tolerance = HERMITIAN_TOL * m.frobenius().max(1.0);
    if deviation > tolerance {
        return Err(Error::NotHermitian { deviation, tolerance });
    }
    // Symmetrize so round-off in the input does not leak into the eigensolver.
    let h = (*m + m.adjoint()).scale(C64::new(0.5, 0.0));
    let eig = SymmetricEigen::new(h.to_nalgebra());
    Ok(eig.eigenvalues.iter().fold(0.0_f64, |acc, v| acc.max(v.abs())))
}

/// One identity of the Dirac or Pauli algebra with its worst entry-wise error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraResidual {
    pub relation: String,
    pub residual: f64,
}

/// `Γ = α₁α₂α₃β`: Hermitian, squares to 𝕀₄ and anticommutes with every αₖ
/// and β, completing the five generators of the 4×4 Clifford algebra.
pub fn dirac_gamma5() -> Mat4 {
    let a = alpha_all();
    a[0] * a[1] * a[2] * dirac_beta()
}

/// The 15 anticommutators `{Aⱼ, Aₖ} = 2δⱼₖ𝕀₄` over the generators
/// α₁, α₂, α₃, β, Γ (j ≤ k), then the 9 products `σₖσₗ = δₖₗ + iεₖₗₘσₘ`.
pub fn algebra_residuals() -> Vec<AlgebraResidual> {
    let a = alpha_all();
    let gens = [(a[0], "a1"), (a[1], "a2"), (a[2], "a3"), (dirac_beta(), "beta"), (dirac_gamma5(), "gamma5")];
    let mut out = Vec::with_capacity(24);
    for j in 0..gens.len() {
        for k in j..gens.len() {
            let (x, nx) = gens[j];
            let (y, ny) = gens[k];
            let expected = if j == k { Mat4::identity().scale(C64::new(2.0, 0.0)) } else { Mat4::zeros() };
            out.push(AlgebraResidual {
                relation: format!("{{{nx},{ny}}} = {}", if j == k { "2I" } else { "0" }),
                residual: (x * y + y * x - expected).max_abs(),
            });
        }
    }
    let s = pauli_all();
    let levi = |k: usize, l: usize, m: usize| -> f64 {
        match (k, l, m) {
            (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
            (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
            _ => 0.0,
        }
    };
    for k in 0..3 {
        for l in 0..3 {
            let mut expected = if k == l { Mat2::identity() } else { Mat2::zeros() };
            for (m, sm) in s.iter().enumerate() {
                expected = expected + sm.scale(I * levi(k, l, m));
            }
            out.push(AlgebraResidual {
                relation: format!("s{}s{} = d + i eps s", k + 1, l + 1),
                residual: (s[k] * s[l] - expected).max_abs(),
            });
        }
    }
    out
}
