//! Fixed-size complex matrix aliases and the index plumbing shared by every module.

use nalgebra::{Matrix2, Matrix4, SMatrix};

use crate::C64;

pub type Mat2 = Matrix2<C64>;
pub type Mat4 = Matrix4<C64>;
pub type Mat16 = SMatrix<C64, 16, 16>;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Kronecker product with the `(A⊗B)[2i+k][2j+l] = A[i][j]·B[k][l]` layout.
pub fn kron2(a: &Mat2, b: &Mat2) -> Mat4 {
    Mat4::from_fn(|r, col| a[(r / 2, col / 2)] * b[(r % 2, col % 2)])
}

/// Kronecker product of two 4×4 matrices, `(A⊗B)[4α+β][4μ+ν] = A[α][μ]·B[β][ν]`.
pub fn kron4(a: &Mat4, b: &Mat4) -> Mat16 {
    Mat16::from_fn(|r, col| a[(r / 4, col / 4)] * b[(r % 4, col % 4)])
}

/// The reshuffling permutation `R[2i+j][2k+l] = M[2i+k][2j+l]`.
///
/// The same permutation turns a Standard-basis Mueller matrix into its dynamical
/// matrix and a two-qubit density matrix into its reshuffled form. It is an
/// involution.
pub fn reshuffle(m: &Mat4) -> Mat4 {
    Mat4::from_fn(|r, col| {
        let (i, j) = (r / 2, r % 2);
        let (k, l) = (col / 2, col % 2);
        m[(2 * i + k, 2 * j + l)]
    })
}

/// Row-major vectorization `v[2i+j] = m[i][j]`.
pub fn vec2(m: &Mat2) -> nalgebra::Vector4<C64> {
    nalgebra::Vector4::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)])
}

/// Inverse of [`vec2`].
pub fn unvec2(v: &nalgebra::Vector4<C64>) -> Mat2 {
    Mat2::new(v[0], v[1], v[2], v[3])
}

pub fn max_abs_diff<const R: usize, const C: usize>(
    a: &SMatrix<C64, R, C>,
    b: &SMatrix<C64, R, C>,
) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_abs<const R: usize, const C: usize>(a: &SMatrix<C64, R, C>) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Largest entrywise deviation of `m` from `m†`.
pub fn hermitian_defect<const N: usize>(m: &SMatrix<C64, N, N>) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

pub fn trace<const N: usize>(m: &SMatrix<C64, N, N>) -> C64 {
    (0..N).map(|i| m[(i, i)]).sum()
}

/// Complex matrix built from real entries.
pub fn complexify<const R: usize, const C: usize>(m: &SMatrix<f64, R, C>) -> SMatrix<C64, R, C> {
    m.map(re)
}
