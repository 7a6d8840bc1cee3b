//! Fixed-size complex linear algebra for qubit (2×2) and two-qubit (4×4) operators.
//!
//! Dimensions are carried as const generics, so a qubit operator can never be
//! mixed up with a two-qubit one. The Kronecker product uses the row-major block
//! convention `entry[(2i+k), (2j+l)] = a[i][j] * b[k][l]`: the first factor
//! (Alice) indexes the outer blocks.

use std::ops::{Add, Index, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Entrywise tolerance for the Hermiticity invariant.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Default eigenvalue slack for positive-semidefiniteness.
pub const PSD_TOL: f64 = 1e-10;
/// Unit-norm tolerance for directions.
pub const UNIT_TOL: f64 = 1e-12;

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_OFF_TOL: f64 = 1e-13;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Real 3-vector of Bloch components.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(&self, other: &Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(c: [f64; 3]) -> Self {
        Vec3::new(c[0], c[1], c[2])
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self * rhs.x, self * rhs.y, self * rhs.z)
    }
}

/// A direction on the Bloch sphere: a [`Vec3`] of norm one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec3", into = "Vec3")]
pub struct UnitVec3(Vec3);

impl UnitVec3 {
    pub const X: UnitVec3 = UnitVec3(Vec3::new(1.0, 0.0, 0.0));
    pub const Y: UnitVec3 = UnitVec3(Vec3::new(0.0, 1.0, 0.0));
    pub const Z: UnitVec3 = UnitVec3(Vec3::new(0.0, 0.0, 1.0));

    /// Accepts `v` only if `|v| = 1` within [`UNIT_TOL`].
    pub fn new(v: Vec3) -> Result<Self> {
        let n = v.norm();
        if !v.is_finite() || (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotUnit(n));
        }
        Ok(Self(v))
    }

    pub fn normalize(v: Vec3) -> Result<Self> {
        let n = v.norm();
        if !v.is_finite() || n == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(Self((1.0 / n) * v))
    }

    /// Direction with polar angle `theta` and azimuth `phi`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self(Vec3::new(st * cp, st * sp, ct))
    }

    /// Uniformly distributed direction.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let v = Vec3::new(
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
            );
            if let Ok(u) = Self::normalize(v) {
                if v.norm() > 1e-6 {
                    return u;
                }
            }
        }
    }

    pub fn vec(&self) -> Vec3 {
        self.0
    }
}

impl std::ops::Deref for UnitVec3 {
    type Target = Vec3;
    fn deref(&self) -> &Vec3 {
        &self.0
    }
}

impl TryFrom<Vec3> for UnitVec3 {
    type Error = Error;
    fn try_from(v: Vec3) -> Result<Self> {
        Self::new(v)
    }
}

impl From<UnitVec3> for Vec3 {
    fn from(u: UnitVec3) -> Vec3 {
        u.0
    }
}

impl Neg for UnitVec3 {
    type Output = UnitVec3;
    fn neg(self) -> UnitVec3 {
        UnitVec3(-self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Dense `N×N` complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareOperator<const N: usize> {
    entries: [[Complex64; N]; N],
}

impl<const N: usize> SquareOperator<N> {
    pub const DIM: usize = N;

    pub fn from_entries(entries: [[Complex64; N]; N]) -> Self {
        Self { entries }
    }

    pub fn zero() -> Self {
        Self {
            entries: [[ZERO; N]; N],
        }
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..N {
            m.entries[i][i] = ONE;
        }
        m
    }

    pub fn from_real_diagonal(diag: [f64; N]) -> Self {
        let mut m = Self::zero();
        for (i, d) in diag.into_iter().enumerate() {
            m.entries[i][i] = Complex64::new(d, 0.0);
        }
        m
    }

    pub fn entries(&self) -> &[[Complex64; N]; N] {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero();
        for i in 0..N {
            for j in 0..N {
                out.entries[j][i] = self.entries[i][j].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..N).map(|i| self.entries[i][i]).sum()
    }

    /// `Tr[self · other]` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex64 {
        let mut acc = ZERO;
        for i in 0..N {
            for j in 0..N {
                acc += self.entries[i][j] * other.entries[j][i];
            }
        }
        acc
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = *self;
        out.entries.iter_mut().flatten().for_each(|z| *z *= factor);
        out
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .zip(other.entries.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().flatten().all(|z| z.is_finite())
    }
}

impl<const N: usize> Index<(usize, usize)> for SquareOperator<N> {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i][j]
    }
}

impl<const N: usize> Add for SquareOperator<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for i in 0..N {
            for j in 0..N {
                self.entries[i][j] += rhs.entries[i][j];
            }
        }
        self
    }
}

impl<const N: usize> Sub for SquareOperator<N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..N {
            for j in 0..N {
                self.entries[i][j] -= rhs.entries[i][j];
            }
        }
        self
    }
}

impl<const N: usize> Mul for SquareOperator<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zero();
        for i in 0..N {
            for k in 0..N {
                let a = self.entries[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..N {
                    out.entries[i][j] += a * rhs.entries[k][j];
                }
            }
        }
        out
    }
}

/// Kronecker product of two qubit operators.
pub fn tensor(a: &SquareOperator<2>, b: &SquareOperator<2>) -> SquareOperator<4> {
    let mut out = SquareOperator::<4>::zero();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out.entries[2 * i + k][2 * j + l] = a.entries[i][j] * b.entries[k][l];
                }
            }
        }
    }
    out
}

/// Square operator that equals its own adjoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianOperator<const N: usize>(SquareOperator<N>);

impl<const N: usize> HermitianOperator<N> {
    /// Validates Hermiticity entrywise within [`HERMITIAN_TOL`] and returns the
    /// symmetrized operator `(H + H†)/2`.
    pub fn new(op: SquareOperator<N>) -> Result<Self> {
        if !op.is_finite() {
            return Err(Error::NonFinite);
        }
        let adj = op.adjoint();
        let asym = op.max_abs_diff(&adj);
        if asym > HERMITIAN_TOL {
            return Err(Error::NotHermitian(asym));
        }
        Ok(Self((op + adj).scale(Complex64::new(0.5, 0.0))))
    }

    pub fn zero() -> Self {
        Self(SquareOperator::zero())
    }

    pub fn identity() -> Self {
        Self(SquareOperator::identity())
    }

    pub fn from_real_diagonal(diag: [f64; N]) -> Self {
        Self(SquareOperator::from_real_diagonal(diag))
    }

    pub fn operator(&self) -> &SquareOperator<N> {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0.max_abs_diff(&other.0)
    }

    pub fn eigvals(&self) -> Result<[f64; N]> {
        eigvals_hermitian(self)
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        is_psd(self, tol)
    }
}

impl HermitianOperator<2> {
    pub fn tensor(&self, other: &HermitianOperator<2>) -> HermitianOperator<4> {
        HermitianOperator(tensor(&self.0, &other.0))
    }
}

impl<const N: usize> Add for HermitianOperator<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl<const N: usize> Sub for HermitianOperator<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(self.0 - rhs.0)
    }
}

impl<const N: usize> Mul<HermitianOperator<N>> for f64 {
    type Output = HermitianOperator<N>;
    fn mul(self, rhs: HermitianOperator<N>) -> HermitianOperator<N> {
        HermitianOperator(rhs.0.scale(Complex64::new(self, 0.0)))
    }
}

impl<const N: usize> Mul for HermitianOperator<N> {
    type Output = SquareOperator<N>;
    fn mul(self, rhs: Self) -> SquareOperator<N> {
        self.0 * rhs.0
    }
}

/// Pauli matrix for the given axis.
pub fn pauli(axis: Axis) -> HermitianOperator<2> {
    let entries = match axis {
        Axis::X => [[ZERO, ONE], [ONE, ZERO]],
        Axis::Y => [[ZERO, -I], [I, ZERO]],
        Axis::Z => [[ONE, ZERO], [ZERO, -ONE]],
    };
    HermitianOperator(SquareOperator::from_entries(entries))
}

/// `v·σ = v_x σ_x + v_y σ_y + v_z σ_z`, with eigenvalues `±|v|`.
pub fn bloch_operator(v: Vec3) -> HermitianOperator<2> {
    let off = Complex64::new(v.x, -v.y);
    HermitianOperator(SquareOperator::from_entries([
        [Complex64::new(v.z, 0.0), off],
        [off.conj(), Complex64::new(-v.z, 0.0)],
    ]))
}

/// Eigenvalues in ascending order.
///
/// Qubit operators use the closed form; larger ones use cyclic complex Jacobi
/// rotations until the off-diagonal Frobenius norm drops below `1e-13`
/// (relative to the matrix norm when that exceeds one).
pub fn eigvals_hermitian<const N: usize>(h: &HermitianOperator<N>) -> Result<[f64; N]> {
    let mut vals = if N == 2 {
        let e = h.0.entries();
        let a = e[0][0].re;
        let d = e[1][1].re;
        let mean = 0.5 * (a + d);
        let radius = (0.5 * (a - d)).hypot(e[0][1].norm());
        let mut out = [0.0; N];
        out[0] = mean - radius;
        out[1] = mean + radius;
        out
    } else {
        jacobi_eigvals(&h.0)?
    };
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

fn off_diagonal_norm<const N: usize>(a: &[[Complex64; N]; N]) -> f64 {
    let mut acc = 0.0;
    for (i, row) in a.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            if i != j {
                acc += z.norm_sqr();
            }
        }
    }
    acc.sqrt()
}

#[allow(clippy::needless_range_loop)]
fn jacobi_eigvals<const N: usize>(h: &SquareOperator<N>) -> Result<[f64; N]> {
    let mut a = h.entries;
    let threshold = JACOBI_OFF_TOL * h.frobenius_norm().max(1.0);
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) < threshold {
            let mut out = [0.0; N];
            for (i, v) in out.iter_mut().enumerate() {
                *v = a[i][i].re;
            }
            return Ok(out);
        }
        for p in 0..N {
            for q in p + 1..N {
                let apq = a[p][q];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                // Phase-rotate column q so that a[p][q] becomes real, then apply
                // the real symmetric rotation that annihilates it.
                let phase = apq / mag;
                let theta = (a[q][q].re - a[p][p].re) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                let v_qp = -s * phase.conj();
                let v_qq = c * phase.conj();

                for row in a.iter_mut() {
                    let kp = row[p];
                    let kq = row[q];
                    row[p] = kp * c + kq * v_qp;
                    row[q] = kp * s + kq * v_qq;
                }
                for k in 0..N {
                    let pk = a[p][k];
                    let qk = a[q][k];
                    a[p][k] = pk * c - qk * (s * phase);
                    a[q][k] = pk * s + qk * (c * phase);
                }
                a[p][q] = ZERO;
                a[q][p] = ZERO;
                a[p][p].im = 0.0;
                a[q][q].im = 0.0;
            }
        }
    }
    Err(Error::NoConvergence(JACOBI_MAX_SWEEPS))
}

/// True iff the smallest eigenvalue is at least `-tol`.
pub fn is_psd<const N: usize>(h: &HermitianOperator<N>, tol: f64) -> bool {
    match eigvals_hermitian(h) {
        Ok(vals) => vals[0] >= -tol,
        Err(_) => false,
    }
}
