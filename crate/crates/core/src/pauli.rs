//! Exact arithmetic on 2×2 complex operators.
//!
//! Everything the search models compute lives in the two-dimensional
//! invariant subspace spanned by the target state and its complement, so
//! this layer keeps matrices as fixed-size arrays and evaluates norms,
//! exponentials and Bloch coordinates in closed form.
//!
//! Conventions: the basis is `|t⟩ = (1, 0)`, `|t⊥⟩ = (0, 1)`; a rotation by
//! `θ` about `n̂` is `exp(-i θ/2 n̂·σ)`; ħ = 1 and all angles are radians.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Tolerance at which a caller-supplied axis is accepted and renormalized.
pub const AXIS_TOLERANCE: f64 = 1e-10;
/// Tolerance on `‖ψ‖ = 1` for [`bloch_point`].
pub const STATE_NORM_TOLERANCE: f64 = 1e-12;

/// A pure state in the two-dimensional subspace.
pub type Spinor = [Complex64; 2];

/// A 2×2 complex matrix stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexMatrix2(pub [[Complex64; 2]; 2]);

impl ComplexMatrix2 {
    pub const fn new(m00: Complex64, m01: Complex64, m10: Complex64, m11: Complex64) -> Self {
        Self([[m00, m01], [m10, m11]])
    }

    pub fn from_real(m00: f64, m01: f64, m10: f64, m11: f64) -> Self {
        Self::new(m00.into(), m01.into(), m10.into(), m11.into())
    }

    pub const fn identity() -> Self {
        Self::new(ONE, ZERO, ZERO, ONE)
    }

    pub const fn zero() -> Self {
        Self::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub const fn sigma_x() -> Self {
        Self::new(ZERO, ONE, ONE, ZERO)
    }

    pub fn sigma_y() -> Self {
        Self::new(ZERO, -I, I, ZERO)
    }

    pub fn sigma_z() -> Self {
        Self::new(ONE, ZERO, ZERO, -ONE)
    }

    /// `|ψ⟩⟨ψ|`
    pub fn outer(psi: &Spinor) -> Self {
        Self::new(
            psi[0] * psi[0].conj(),
            psi[0] * psi[1].conj(),
            psi[1] * psi[0].conj(),
            psi[1] * psi[1].conj(),
        )
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[row][col]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Self::new(m[0][0].conj(), m[1][0].conj(), m[0][1].conj(), m[1][1].conj())
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn scale(&self, z: Complex64) -> Self {
        let m = &self.0;
        Self::new(m[0][0] * z, m[0][1] * z, m[1][0] * z, m[1][1] * z)
    }

    pub fn apply(&self, psi: &Spinor) -> Spinor {
        let m = &self.0;
        [
            m[0][0] * psi[0] + m[0][1] * psi[1],
            m[1][0] * psi[0] + m[1][1] * psi[1],
        ]
    }

    /// `[A, B] = AB − BA`
    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    /// Integer power by repeated squaring.
    pub fn powu(&self, mut n: u64) -> Self {
        let mut base = *self;
        let mut acc = Self::identity();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            n >>= 1;
        }
        acc
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        // σ_max² is the top eigenvalue of the Hermitian PSD matrix M†M.
        let g = self.adjoint() * *self;
        let a = g.0[0][0].re;
        let d = g.0[1][1].re;
        let b = g.0[0][1].norm();
        let top = 0.5 * (a + d) + (0.25 * (a - d) * (a - d) + b * b).sqrt();
        top.max(0.0).sqrt()
    }

    pub fn hermitian_deviation(&self) -> f64 {
        (*self - self.adjoint()).max_abs()
    }

    pub fn unitary_deviation(&self) -> f64 {
        (self.adjoint() * *self - Self::identity()).max_abs()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitary_deviation() <= tol
    }
}

impl Default for ComplexMatrix2 {
    fn default() -> Self {
        Self::identity()
    }
}

impl Mul for ComplexMatrix2 {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let a = &self.0;
        let b = &rhs.0;
        Self::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl Add for ComplexMatrix2 {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        let a = &self.0;
        let b = &rhs.0;
        Self::new(
            a[0][0] + b[0][0],
            a[0][1] + b[0][1],
            a[1][0] + b[1][0],
            a[1][1] + b[1][1],
        )
    }
}

impl Sub for ComplexMatrix2 {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for ComplexMatrix2 {
    type Output = Self;

    fn neg(self) -> Self {
        self.scale(-ONE)
    }
}

/// Coefficients of a 2×2 operator over `{I, σ₁, σ₂, σ₃}`.
///
/// Coefficients are complex so that unitaries such as the Grover step
/// (`(1 − 2/N) I + 2i(√(N−1)/N) σ₂`) decompose without loss. A Hermitian
/// operator has all four coefficients real.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliVector {
    pub a0: Complex64,
    pub a: [Complex64; 3],
}

impl PauliVector {
    pub fn new(a0: Complex64, a: [Complex64; 3]) -> Self {
        Self { a0, a }
    }

    /// Real (Hermitian) coefficients.
    pub fn real(a0: f64, a1: f64, a2: f64, a3: f64) -> Self {
        Self::new(a0.into(), [a1.into(), a2.into(), a3.into()])
    }

    pub fn to_matrix(&self) -> ComplexMatrix2 {
        let [a1, a2, a3] = self.a;
        ComplexMatrix2::new(
            self.a0 + a3,
            a1 - I * a2,
            a1 + I * a2,
            self.a0 - a3,
        )
    }

    /// Largest imaginary part over all four coefficients.
    pub fn max_imag(&self) -> f64 {
        std::iter::once(self.a0)
            .chain(self.a)
            .map(|z| z.im.abs())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_imag() <= tol
    }

    /// Real parts `(a0, a1, a2, a3)`.
    pub fn real_parts(&self) -> [f64; 4] {
        [self.a0.re, self.a[0].re, self.a[1].re, self.a[2].re]
    }

    /// Real part of the vector component.
    pub fn vector_re(&self) -> [f64; 3] {
        [self.a[0].re, self.a[1].re, self.a[2].re]
    }
}

/// Splits `m` into `a0·I + a·σ` with `a0 = tr(M)/2` and `a_k = tr(σ_k M)/2`.
pub fn pauli_decompose(m: &ComplexMatrix2) -> PauliVector {
    let [[m00, m01], [m10, m11]] = m.0;
    PauliVector {
        a0: (m00 + m11) * 0.5,
        a: [(m01 + m10) * 0.5, I * (m01 - m10) * 0.5, (m00 - m11) * 0.5],
    }
}

/// A rotation of the Bloch sphere: unit axis and angle in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisAngle {
    axis: [f64; 3],
    angle: f64,
}

impl AxisAngle {
    /// Accepts axes within [`AXIS_TOLERANCE`] of unit length and renormalizes them.
    pub fn new(axis: [f64; 3], angle: f64) -> Result<Self> {
        let norm = norm3(&axis);
        if !norm.is_finite() || (norm - 1.0).abs() > AXIS_TOLERANCE {
            return Err(Error::NonUnitAxis(norm));
        }
        Ok(Self {
            axis: axis.map(|x| x / norm),
            angle,
        })
    }

    pub fn x(angle: f64) -> Self {
        Self { axis: [1.0, 0.0, 0.0], angle }
    }

    pub fn y(angle: f64) -> Self {
        Self { axis: [0.0, 1.0, 0.0], angle }
    }

    pub fn z(angle: f64) -> Self {
        Self { axis: [0.0, 0.0, 1.0], angle }
    }

    pub fn axis(&self) -> [f64; 3] {
        self.axis
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn inverse(&self) -> Self {
        Self { axis: self.axis, angle: -self.angle }
    }

    /// Rotates a real 3-vector with Rodrigues' formula.
    pub fn rotate(&self, v: [f64; 3]) -> [f64; 3] {
        let k = self.axis;
        let (s, c) = self.angle.sin_cos();
        let kxv = cross(&k, &v);
        let kdv = dot3(&k, &v);
        std::array::from_fn(|i| v[i] * c + kxv[i] * s + k[i] * kdv * (1.0 - c))
    }
}

/// `exp(-i (angle/2) n̂·σ)`. A full turn gives `−I`.
pub fn rotation_unitary(r: &AxisAngle) -> ComplexMatrix2 {
    let (s, c) = (0.5 * r.angle).sin_cos();
    let [nx, ny, nz] = r.axis;
    let ndots = PauliVector::real(0.0, nx, ny, nz).to_matrix();
    ComplexMatrix2::identity().scale(c.into()) + ndots.scale(-I * s)
}

/// `exp(-i H t)` for a Hermitian `H = a0·I + a·σ`, including the global phase.
pub fn exp_hermitian(h: &PauliVector, t: f64) -> Result<ComplexMatrix2> {
    if !h.is_hermitian(1e-14) {
        return Err(Error::NotHermitian(h.max_imag()));
    }
    let v = h.vector_re();
    let len = norm3(&v);
    let phase = Complex64::from_polar(1.0, -h.a0.re * t);
    if len == 0.0 {
        return Ok(ComplexMatrix2::identity().scale(phase));
    }
    let rot = AxisAngle {
        axis: v.map(|x| x / len),
        angle: 2.0 * len * t,
    };
    Ok(rotation_unitary(&rot).scale(phase))
}

/// `min_φ ‖U − e^{iφ} V‖` in the spectral norm.
///
/// For 2×2 unitaries the minimizer is `φ* = arg tr(V†U)`: the eigenphases of
/// `W = V†U` sit on the unit circle and `arg tr W` bisects the shorter arc
/// between them. When the eigenphases are antipodal the trace vanishes and
/// any bisector is optimal; one is taken from an eigenvalue of `W`.
pub fn phase_aligned_distance(u: &ComplexMatrix2, v: &ComplexMatrix2) -> f64 {
    let w = v.adjoint() * *u;
    let tr = w.trace();
    let phi = if tr.norm() > 1e-12 {
        tr.arg()
    } else {
        // λ² = −det W when tr W = 0
        (-w.det()).sqrt().arg() + std::f64::consts::FRAC_PI_2
    };
    (*u - v.scale(Complex64::from_polar(1.0, phi))).spectral_norm()
}

/// Bloch vector `(⟨σ₁⟩, ⟨σ₂⟩, ⟨σ₃⟩)` of a normalized state.
pub fn bloch_point(state: &Spinor) -> Result<[f64; 3]> {
    let norm = spinor_norm(state);
    if (norm - 1.0).abs() > STATE_NORM_TOLERANCE {
        return Err(Error::Unnormalized(norm));
    }
    let [a, b] = *state;
    let cross = a.conj() * b;
    Ok([
        2.0 * cross.re,
        2.0 * cross.im,
        a.norm_sqr() - b.norm_sqr(),
    ])
}

pub fn spinor_norm(state: &Spinor) -> f64 {
    (state[0].norm_sqr() + state[1].norm_sqr()).sqrt()
}

pub(crate) fn norm3(v: &[f64; 3]) -> f64 {
    dot3(v, v).sqrt()
}

pub(crate) fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}
