//! Jones vectors, coherency matrices and Stokes parameters.
//!
//! A coherency matrix `J` can be expanded in the Pauli basis `X_α`, giving the
//! real Stokes parameters `x_α = Tr(X_α J)`, or in the Standard basis `Y_β`,
//! giving the complex components `y_β = (J00, J01, J10, J11)`. The two are
//! related by `x = V y` with the fixed change-of-basis matrix `V`, which
//! satisfies `V†V = V V† = 2 I₄`.
//!
//! Intensities are kept raw; nothing here normalizes `Tr J` to one.

use nalgebra::Vector4;
use serde::Serialize;

use crate::eigen::hermitian_eigen;
use crate::linalg::{c, hermitian_defect, re, trace, unvec2, vec2, Mat2, Mat4};
use crate::{Error, Result, C64, EPS_NUM, EPS_PSD};

/// Complex field amplitudes `(E0, E1)` of a fully polarized beam.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JonesVector {
    pub e0: C64,
    pub e1: C64,
}

impl JonesVector {
    pub fn new(e0: C64, e1: C64) -> Self {
        Self { e0, e1 }
    }

    pub fn horizontal() -> Self {
        Self::new(re(1.0), re(0.0))
    }

    pub fn vertical() -> Self {
        Self::new(re(0.0), re(1.0))
    }

    pub fn intensity(&self) -> f64 {
        self.e0.norm_sqr() + self.e1.norm_sqr()
    }

    pub fn is_finite(&self) -> bool {
        self.e0.is_finite() && self.e1.is_finite()
    }

    pub fn as_vector(&self) -> nalgebra::Vector2<C64> {
        nalgebra::Vector2::new(self.e0, self.e1)
    }

    pub fn from_vector(v: &nalgebra::Vector2<C64>) -> Self {
        Self::new(v[0], v[1])
    }
}

/// The 2×2 coherency matrix `J_ij = ⟨E_i E_j*⟩` of a (partially) polarized beam.
///
/// Construction does not validate; call [`CoherencyMatrix::validate`] when the
/// Hermitian/PSD guarantee matters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoherencyMatrix {
    pub j: Mat2,
}

impl CoherencyMatrix {
    pub fn new(j: Mat2) -> Self {
        Self { j }
    }

    pub fn intensity(&self) -> f64 {
        trace(&self.j).re
    }

    pub fn determinant(&self) -> C64 {
        self.j.determinant()
    }

    /// Checks Hermiticity and positive semidefiniteness; eigenvalues are compared
    /// against [`EPS_PSD`] after dividing by the trace.
    pub fn validate(&self) -> Result<()> {
        let scale = crate::linalg::max_abs(&self.j).max(1.0);
        let defect = hermitian_defect(&self.j);
        if defect > EPS_PSD * scale {
            return Err(Error::NonHermitian(defect));
        }
        let tr = self.intensity();
        if tr < -EPS_PSD * scale {
            return Err(Error::NotPsd(tr));
        }
        let min = hermitian_eigen(&self.j).min_value();
        let norm = if tr > 0.0 { tr } else { 1.0 };
        if min / norm < -EPS_PSD {
            return Err(Error::NotPsd(min));
        }
        Ok(())
    }
}

/// Real Stokes 4-vector `(x0, x1, x2, x3)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StokesVector {
    pub x: [f64; 4],
}

impl StokesVector {
    pub fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Self { x: [x0, x1, x2, x3] }
    }

    pub fn as_vector(&self) -> Vector4<f64> {
        Vector4::from(self.x)
    }

    pub fn from_vector(v: &Vector4<f64>) -> Self {
        Self { x: [v[0], v[1], v[2], v[3]] }
    }

    /// `x0 ≥ 0` and `x1² + x2² + x3² ≤ x0²`, the Stokes form of `J ⪰ 0`.
    pub fn is_physical(&self, tol: f64) -> bool {
        let [x0, x1, x2, x3] = self.x;
        x0 >= -tol && x1 * x1 + x2 * x2 + x3 * x3 <= x0 * x0 + tol
    }
}

/// Pauli basis `X_0 … X_3`, Standard basis `Y_0 … Y_3`, and the change-of-basis
/// matrix `V_{αβ} = Tr(X_α Y_β)`.
#[derive(Clone, Debug)]
pub struct BasisTables {
    pub pauli: [Mat2; 4],
    pub standard: [Mat2; 4],
    pub v: Mat4,
}

impl BasisTables {
    pub fn new() -> Self {
        Self {
            pauli: [pauli(0), pauli(1), pauli(2), pauli(3)],
            standard: [standard(0), standard(1), standard(2), standard(3)],
            v: change_of_basis(),
        }
    }
}

impl Default for BasisTables {
    fn default() -> Self {
        Self::new()
    }
}

/// Pauli matrix `X_α`, with `X_0 = I`.
pub fn pauli(alpha: usize) -> Mat2 {
    let (o, l, i) = (re(0.0), re(1.0), c(0.0, 1.0));
    match alpha {
        0 => Mat2::new(l, o, o, l),
        1 => Mat2::new(o, l, l, o),
        2 => Mat2::new(o, -i, i, o),
        3 => Mat2::new(l, o, o, -l),
        _ => panic!("Pauli index {alpha} out of range"),
    }
}

/// Standard matrix unit `Y_β = |i⟩⟨j|` with `β = 2i + j`.
pub fn standard(beta: usize) -> Mat2 {
    assert!(beta < 4, "Standard index {beta} out of range");
    let mut y = Mat2::zeros();
    y[(beta / 2, beta % 2)] = re(1.0);
    y
}

/// `V` with rows `(1,0,0,1)`, `(0,1,1,0)`, `(0,i,−i,0)`, `(1,0,0,−1)`.
pub fn change_of_basis() -> Mat4 {
    Mat4::from_fn(|a, b| (pauli(a) * standard(b)).trace())
}

/// `J = E E†`.
pub fn coherency_from_jones(e: &JonesVector) -> CoherencyMatrix {
    let v = e.as_vector();
    CoherencyMatrix::new(v * v.adjoint())
}

/// `x_α = Tr(X_α J)`; rejects `J` whose asymmetry exceeds [`EPS_NUM`] relative to its size.
pub fn stokes_from_coherency(j: &CoherencyMatrix) -> Result<StokesVector> {
    let scale = crate::linalg::max_abs(&j.j).max(1.0);
    let defect = hermitian_defect(&j.j);
    if defect > EPS_NUM * scale {
        return Err(Error::NonHermitian(defect));
    }
    let mut x = [0.0; 4];
    for (alpha, slot) in x.iter_mut().enumerate() {
        *slot = (pauli(alpha) * j.j).trace().re;
    }
    Ok(StokesVector { x })
}

/// `J = ½ Σ x_α X_α`.
pub fn coherency_from_stokes(x: &StokesVector) -> CoherencyMatrix {
    let j = (0..4).fold(Mat2::zeros(), |acc, a| acc + pauli(a) * re(x.x[a]));
    CoherencyMatrix::new(j * re(0.5))
}

/// Standard-basis components `y = (J00, J01, J10, J11)`.
pub fn standard_components(j: &CoherencyMatrix) -> Vector4<C64> {
    vec2(&j.j)
}

/// `x = V y`. The result is complex in general; it is real exactly when `y`
/// comes from a Hermitian matrix.
pub fn pauli_from_standard(y: &Vector4<C64>) -> Vector4<C64> {
    change_of_basis() * y
}

/// `y = V† x / 2`, the inverse of [`pauli_from_standard`].
pub fn standard_from_pauli(x: &Vector4<C64>) -> Vector4<C64> {
    change_of_basis().adjoint() * x * re(0.5)
}

/// Coherency matrix with the given Standard-basis components.
pub fn coherency_from_standard(y: &Vector4<C64>) -> CoherencyMatrix {
    CoherencyMatrix::new(unvec2(y))
}

/// Degree of polarization `P` from `Det J = (Tr J)² (1 − P²) / 4`, clamped to `[0, 1]`.
pub fn degree_of_polarization(j: &CoherencyMatrix) -> Result<f64> {
    let tr = j.intensity();
    if tr <= 0.0 {
        return Err(Error::ZeroIntensity);
    }
    let det = j.determinant().re;
    let p2 = 1.0 - 4.0 * det / (tr * tr);
    Ok(p2.max(0.0).sqrt().min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn m2(a: [[(f64, f64); 2]; 2]) -> Mat2 {
        Mat2::new(
            c(a[0][0].0, a[0][0].1),
            c(a[0][1].0, a[0][1].1),
            c(a[1][0].0, a[1][0].1),
            c(a[1][1].0, a[1][1].1),
        )
    }

    #[test]
    fn coherency_of_basic_polarizations() {
        let h = coherency_from_jones(&JonesVector::horizontal());
        assert_eq!(h.j, m2([[(1., 0.), (0., 0.)], [(0., 0.), (0., 0.)]]));

        let d = coherency_from_jones(&JonesVector::new(re(FRAC_1_SQRT_2), re(FRAC_1_SQRT_2)));
        assert!(max_abs_diff(&d.j, &m2([[(0.5, 0.), (0.5, 0.)], [(0.5, 0.), (0.5, 0.)]])) < 1e-15);

        // right circular: outer product of (1, i)/√2
        let r = coherency_from_jones(&JonesVector::new(re(FRAC_1_SQRT_2), c(0.0, FRAC_1_SQRT_2)));
        let expected = m2([[(0.5, 0.), (0., -0.5)], [(0., 0.5), (0.5, 0.)]]);
        assert!(max_abs_diff(&r.j, &expected) < 1e-15);
    }

    #[test]
    fn jones_coherency_is_a_projection() {
        let e = JonesVector::new(c(0.3, -1.2), c(0.7, 0.4));
        let j = coherency_from_jones(&e);
        assert_abs_diff_eq!(j.intensity(), e.intensity(), epsilon = 1e-14);
        let lhs = j.j * j.j;
        let rhs = j.j * re(j.intensity());
        assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
        assert_abs_diff_eq!(degree_of_polarization(&j).unwrap(), 1.0, epsilon = 1e-7);
        j.validate().unwrap();
    }

    #[test]
    fn stokes_examples() {
        let h = CoherencyMatrix::new(m2([[(1., 0.), (0., 0.)], [(0., 0.), (0., 0.)]]));
        assert_eq!(stokes_from_coherency(&h).unwrap().x, [1.0, 0.0, 0.0, 1.0]);

        let u = CoherencyMatrix::new(Mat2::identity() * re(0.5));
        assert_eq!(stokes_from_coherency(&u).unwrap().x, [1.0, 0.0, 0.0, 0.0]);

        let r = CoherencyMatrix::new(m2([[(0.5, 0.), (0., -0.5)], [(0., 0.5), (0.5, 0.)]]));
        let x = stokes_from_coherency(&r).unwrap().x;
        for (got, want) in x.iter().zip([1.0, 0.0, 1.0, 0.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
    }

    #[test]
    fn stokes_rejects_non_hermitian() {
        let j = CoherencyMatrix::new(m2([[(1., 0.), (1., 0.)], [(0., 0.), (0., 0.)]]));
        assert!(matches!(stokes_from_coherency(&j), Err(Error::NonHermitian(_))));
    }

    #[test]
    fn coherency_from_stokes_examples() {
        let u = coherency_from_stokes(&StokesVector::new(1.0, 0.0, 0.0, 0.0));
        assert_eq!(u.j, Mat2::identity() * re(0.5));
        let h = coherency_from_stokes(&StokesVector::new(1.0, 0.0, 0.0, 1.0));
        assert_eq!(h.j, m2([[(1., 0.), (0., 0.)], [(0., 0.), (0., 0.)]]));
        let x = coherency_from_stokes(&StokesVector::new(2.0, 0.0, 2.0, 0.0));
        assert_eq!(x.j, m2([[(1., 0.), (0., -1.)], [(0., 1.), (1., 0.)]]));
    }

    #[test]
    fn standard_and_pauli_components() {
        let h = CoherencyMatrix::new(m2([[(1., 0.), (0., 0.)], [(0., 0.), (0., 0.)]]));
        let y = standard_components(&h);
        assert_eq!(y, Vector4::new(re(1.0), re(0.0), re(0.0), re(0.0)));
        assert_eq!(pauli_from_standard(&y), Vector4::new(re(1.0), re(0.0), re(0.0), re(1.0)));

        let d = CoherencyMatrix::new(Mat2::from_element(re(0.5)));
        let y = standard_components(&d);
        assert_eq!(y, Vector4::from_element(re(0.5)));
        assert_eq!(pauli_from_standard(&y), Vector4::new(re(1.0), re(1.0), re(0.0), re(0.0)));

        let y1 = Vector4::new(re(0.0), re(1.0), re(0.0), re(0.0));
        assert_eq!(pauli_from_standard(&y1), Vector4::new(re(0.0), re(1.0), c(0.0, 1.0), re(0.0)));
    }

    #[test]
    fn change_of_basis_matches_table_and_is_exact() {
        let (o, l, i) = (re(0.0), re(1.0), c(0.0, 1.0));
        #[rustfmt::skip]
        let expected = Mat4::new(
            l, o, o, l,
            o, l, l, o,
            o, i, -i, o,
            l, o, o, -l,
        );
        let v = change_of_basis();
        assert_eq!(v, expected);
        assert_eq!(v.adjoint() * v, Mat4::identity() * re(2.0));
        assert_eq!(v * v.adjoint(), Mat4::identity() * re(2.0));
    }

    #[test]
    fn degree_of_polarization_examples() {
        let h = CoherencyMatrix::new(m2([[(1., 0.), (0., 0.)], [(0., 0.), (0., 0.)]]));
        assert_eq!(degree_of_polarization(&h).unwrap(), 1.0);
        let u = CoherencyMatrix::new(Mat2::identity() * re(0.5));
        assert_eq!(degree_of_polarization(&u).unwrap(), 0.0);
        let part = CoherencyMatrix::new(m2([[(0.75, 0.), (0., 0.)], [(0., 0.), (0.25, 0.)]]));
        assert_abs_diff_eq!(degree_of_polarization(&part).unwrap(), 0.5, epsilon = 1e-15);
        assert!(matches!(
            degree_of_polarization(&CoherencyMatrix::new(Mat2::zeros())),
            Err(Error::ZeroIntensity)
        ));
    }

    #[test]
    fn validate_flags_indefinite_matrix() {
        let j = CoherencyMatrix::new(m2([[(1., 0.), (0., 0.)], [(0., 0.), (-0.5, 0.)]]));
        assert!(matches!(j.validate(), Err(Error::NotPsd(_))));
        assert!(!stokes_from_coherency(&j).unwrap().is_physical(1e-12));
    }
}
