//! Cyclic Jacobi eigensolver for small Hermitian matrices.
//!
//! Every eigenproblem in the crate is 4×4 or smaller, so a fixed-size,
//! allocation-free Jacobi sweep is both fast enough and fully deterministic.
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary, then applies the real symmetric Jacobi rotation that annihilates it.

use nalgebra::{SMatrix, SVector};

use crate::linalg::{hermitian_defect, max_abs};
use crate::C64;

const MAX_SWEEPS: usize = 64;
const OFF_DIAGONAL_TOL: f64 = 1e-14;

/// Eigenvalues (descending) and the matching orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct HermitianEigen<const N: usize> {
    pub values: SVector<f64, N>,
    pub vectors: SMatrix<C64, N, N>,
}

impl<const N: usize> HermitianEigen<N> {
    pub fn vector(&self, k: usize) -> SVector<C64, N> {
        self.vectors.column(k).into_owned()
    }

    pub fn min_value(&self) -> f64 {
        self.values[N - 1]
    }

    /// `V diag(f(λ)) V†`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> SMatrix<C64, N, N> {
        let mut out = SMatrix::<C64, N, N>::zeros();
        for k in 0..N {
            let v = self.vectors.column(k);
            out += (v * v.adjoint()) * C64::new(f(self.values[k]), 0.0);
        }
        out
    }
}

fn off_diagonal_norm<const N: usize>(a: &SMatrix<C64, N, N>) -> f64 {
    let mut s = 0.0;
    for p in 0..N {
        for q in 0..N {
            if p != q {
                s += a[(p, q)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Diagonalizes the Hermitian part of `m`.
///
/// The input is symmetrized as `(m + m†)/2` before iterating, so callers decide
/// separately how much asymmetry they tolerate (see [`hermitian_defect`]).
pub fn hermitian_eigen<const N: usize>(m: &SMatrix<C64, N, N>) -> HermitianEigen<N> {
    let mut a = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let mut v = SMatrix::<C64, N, N>::identity();
    let scale = max_abs(&a).max(1.0);

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= OFF_DIAGONAL_TOL * scale {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..N).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = SVector::<f64, N>::from_fn(|k, _| a[(order[k], order[k])].re);
    let vectors = SMatrix::<C64, N, N>::from_fn(|r, k| v[(r, order[k])]);
    HermitianEigen { values, vectors }
}

fn rotate<const N: usize>(
    a: &mut SMatrix<C64, N, N>,
    v: &mut SMatrix<C64, N, N>,
    p: usize,
    q: usize,
) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Below this the rotation angle underflows relative to the diagonal gap.
    if r <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = C64::new(0.0, 0.0);
        a[(q, p)] = C64::new(0.0, 0.0);
        return;
    }
    let phase = apq / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta >= 0.0 {
        1.0 / (theta + (theta * theta + 1.0).sqrt())
    } else {
        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
    };
    let cs = 1.0 / (t * t + 1.0).sqrt();
    let sn = t * cs;

    // Unitary acting on columns p, q: G = diag(1, conj(phase)) · [[c, s], [-s, c]].
    let g_pp = C64::new(cs, 0.0);
    let g_pq = C64::new(sn, 0.0);
    let g_qp = phase.conj() * (-sn);
    let g_qq = phase.conj() * cs;

    for k in 0..N {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    for k in 0..N {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for k in 0..N {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

/// Principal square root of a positive semidefinite matrix; negative round-off
/// eigenvalues are clamped to zero.
pub fn sqrt_psd<const N: usize>(m: &SMatrix<C64, N, N>) -> SMatrix<C64, N, N> {
    hermitian_eigen(m).map_values(|x| x.max(0.0).sqrt())
}

/// Eigenvalues only, descending.
pub fn eigenvalues<const N: usize>(m: &SMatrix<C64, N, N>) -> SVector<f64, N> {
    hermitian_eigen(m).values
}

/// `true` when `m` is Hermitian within `tol` (absolute, entrywise).
pub fn is_hermitian<const N: usize>(m: &SMatrix<C64, N, N>, tol: f64) -> bool {
    hermitian_defect(m) <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, max_abs_diff, Mat4};
    use approx::assert_abs_diff_eq;

    fn sample_hermitian(seed: u64) -> Mat4 {
        // small LCG keeps the test free of RNG dependencies
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let m = Mat4::from_fn(|_, _| c(next(), next()));
        m + m.adjoint()
    }

    #[test]
    fn diagonalizes_and_reconstructs() {
        for seed in 0..50 {
            let h = sample_hermitian(seed);
            let e = hermitian_eigen(&h);
            let back = e.map_values(|x| x);
            assert!(max_abs_diff(&back, &h) < 1e-12, "seed {seed}");
            let gram = e.vectors.adjoint() * e.vectors;
            assert!(max_abs_diff(&gram, &Mat4::identity()) < 1e-13);
            for k in 1..4 {
                assert!(e.values[k - 1] >= e.values[k]);
            }
        }
    }

    #[test]
    fn agrees_with_nalgebra_reference() {
        for seed in 100..130 {
            let h = sample_hermitian(seed);
            let ours = eigenvalues(&h);
            let mut reference: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
            reference.sort_by(|a, b| b.total_cmp(a));
            for k in 0..4 {
                assert_abs_diff_eq!(ours[k], reference[k], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn handles_diagonal_and_degenerate_input() {
        let d = Mat4::from_diagonal(&nalgebra::Vector4::new(c(1.0, 0.0), c(3.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)));
        let e = hermitian_eigen(&d);
        assert_eq!(e.values, nalgebra::Vector4::new(3.0, 1.0, 1.0, 0.0));
        let zero = hermitian_eigen(&Mat4::zeros());
        assert_eq!(zero.values, nalgebra::Vector4::zeros());
    }

    #[test]
    fn sqrt_squares_back() {
        let h = sample_hermitian(7);
        let psd = h * h;
        let r = sqrt_psd(&psd);
        assert!(max_abs_diff(&(r * r), &psd) < 1e-11);
    }
}
