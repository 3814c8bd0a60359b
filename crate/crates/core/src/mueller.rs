//! Jones and Mueller matrices.
//!
//! A Jones matrix `T` acts on field amplitudes. Its Standard-basis Mueller
//! matrix `𝓜 = T ⊗ T*` acts on the row-major vectorized coherency matrix, and
//! the real Pauli-basis form is `M = ½ V 𝓜 V†`. Depolarizing elements are
//! weighted sums `Σ w T⊗T*`, which are no longer of product form.
//!
//! Products compose right to left: `compose(&[m1, m2])` is `m1 · m2`, so `m2`
//! is the first element on the optical path.

use nalgebra::{Matrix3, Matrix4, Vector3};

use crate::linalg::{c, kron2, max_abs, re, Mat2, Mat4};
use crate::stokes::{change_of_basis, CoherencyMatrix, StokesVector};
use crate::{Error, Result, C64, EPS_NUM};

/// A 2×2 complex Jones matrix. Passivity is not enforced at construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JonesMatrix {
    pub t: Mat2,
}

impl JonesMatrix {
    pub fn new(t: Mat2) -> Self {
        Self { t }
    }

    pub fn identity() -> Self {
        Self::new(Mat2::identity())
    }

    pub fn unitarity_defect(&self) -> f64 {
        crate::linalg::max_abs_diff(&(self.t.adjoint() * self.t), &Mat2::identity())
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    /// Largest singular value at most `1 + tol`, i.e. the element never amplifies.
    pub fn is_passive(&self, tol: f64) -> bool {
        self.t.singular_values().max() <= 1.0 + tol
    }

    /// `T J T†`.
    pub fn apply(&self, j: &CoherencyMatrix) -> CoherencyMatrix {
        CoherencyMatrix::new(self.t * j.j * self.t.adjoint())
    }

    pub fn compose(&self, other: &JonesMatrix) -> JonesMatrix {
        JonesMatrix::new(self.t * other.t)
    }
}

/// Standard-basis Mueller matrix `𝓜`, acting on `y = vec(J)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MuellerStd {
    pub m: Mat4,
}

impl MuellerStd {
    pub fn new(m: Mat4) -> Self {
        Self { m }
    }

    pub fn identity() -> Self {
        Self::new(Mat4::identity())
    }

    /// `M00 = (𝓜00 + 𝓜03 + 𝓜30 + 𝓜33) / 2`, the intensity transmission for unpolarized light.
    pub fn m00(&self) -> f64 {
        let m = &self.m;
        ((m[(0, 0)] + m[(0, 3)] + m[(3, 0)] + m[(3, 3)]) * 0.5).re
    }

    /// Real Pauli-basis form; fails when the imaginary residue exceeds `1e-12`
    /// relative to the matrix size.
    pub fn to_real(&self) -> Result<MuellerReal> {
        let v = change_of_basis();
        let mc = v * self.m * v.adjoint() * re(0.5);
        let residue = mc.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        if residue > EPS_NUM * max_abs(&mc).max(1.0) {
            return Err(Error::ImaginaryResidue(residue));
        }
        Ok(MuellerReal::new(mc.map(|z| z.re)))
    }

    /// Applies `𝓜` to a coherency matrix through its Standard components.
    pub fn apply(&self, j: &CoherencyMatrix) -> CoherencyMatrix {
        let y = self.m * crate::linalg::vec2(&j.j);
        CoherencyMatrix::new(crate::linalg::unvec2(&y))
    }

    pub fn scale(&self, s: f64) -> MuellerStd {
        MuellerStd::new(self.m * re(s))
    }
}

/// Real Pauli-basis Mueller matrix with the block form
/// `[[M00, dᵀ], [p, W]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MuellerReal {
    pub m: Matrix4<f64>,
}

impl MuellerReal {
    pub fn new(m: Matrix4<f64>) -> Self {
        Self { m }
    }

    pub fn identity() -> Self {
        Self::new(Matrix4::identity())
    }

    pub fn m00(&self) -> f64 {
        self.m[(0, 0)]
    }

    /// First row without `M00`.
    pub fn diattenuation(&self) -> Vector3<f64> {
        Vector3::new(self.m[(0, 1)], self.m[(0, 2)], self.m[(0, 3)])
    }

    /// First column without `M00`.
    pub fn polarizance(&self) -> Vector3<f64> {
        Vector3::new(self.m[(1, 0)], self.m[(2, 0)], self.m[(3, 0)])
    }

    pub fn block_w(&self) -> Matrix3<f64> {
        self.m.fixed_view::<3, 3>(1, 1).into_owned()
    }

    /// Assembles `[[m00, dᵀ], [p, W]]`.
    pub fn from_blocks(m00: f64, d: &Vector3<f64>, p: &Vector3<f64>, w: &Matrix3<f64>) -> Self {
        let mut m = Matrix4::zeros();
        m[(0, 0)] = m00;
        for k in 0..3 {
            m[(0, k + 1)] = d[k];
            m[(k + 1, 0)] = p[k];
        }
        m.fixed_view_mut::<3, 3>(1, 1).copy_from(w);
        Self::new(m)
    }

    /// Divides by `M00`, a polarization-independent rescaling.
    pub fn normalize(&self) -> Result<MuellerReal> {
        let m00 = self.m00();
        if m00.abs() <= EPS_NUM {
            return Err(Error::TotalAbsorption(m00));
        }
        Ok(MuellerReal::new(self.m / m00))
    }

    /// `𝓜 = ½ V† M V`.
    pub fn to_std(&self) -> MuellerStd {
        let v = change_of_basis();
        MuellerStd::new(v.adjoint() * crate::linalg::complexify(&self.m) * v * re(0.5))
    }
}

/// Weighted collection of Jones matrices describing a depolarizing element.
#[derive(Clone, Debug, Default)]
pub struct EnsembleSpec {
    pub members: Vec<(f64, JonesMatrix)>,
}

impl EnsembleSpec {
    pub fn new(members: Vec<(f64, JonesMatrix)>) -> Result<Self> {
        for &(w, _) in &members {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::OutOfRange { name: "weight", value: w, range: "[0, ∞)" });
            }
        }
        Ok(Self { members })
    }
}

/// `𝓜 = T ⊗ T*` together with its real form.
pub fn mueller_from_jones(t: &JonesMatrix) -> (MuellerStd, MuellerReal) {
    let std = MuellerStd::new(kron2(&t.t, &t.t.conjugate()));
    let real = std.to_real().expect("Mueller-Jones matrices are real in the Pauli basis");
    (std, real)
}

/// `𝓜 = Σ w T ⊗ T*`. Weights are not renormalized.
pub fn mueller_from_ensemble(spec: &EnsembleSpec) -> Result<(MuellerStd, MuellerReal)> {
    if spec.members.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let m = spec
        .members
        .iter()
        .fold(Mat4::zeros(), |acc, (w, t)| acc + kron2(&t.t, &t.t.conjugate()) * re(*w));
    let std = MuellerStd::new(m);
    let real = std.to_real()?;
    Ok((std, real))
}

/// Parametrized optical elements with a Jones description.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Element {
    /// Half-wave plate with its optic axis at angle `theta`.
    Hwp { theta: f64 },
    /// Polarization rotator by `theta`.
    Rotator { theta: f64 },
    /// Linear diattenuator with amplitude transmissions `d0`, `d1` and axis `theta`.
    Diattenuator { d0: f64, d1: f64, theta: f64 },
    /// `exp(-i δ/2 n·σ)` with unit axis `n` on the Poincaré sphere and retardance `δ`.
    Retarder { axis: [f64; 3], retardance: f64 },
}

pub fn make_element(e: Element) -> Result<JonesMatrix> {
    match e {
        Element::Hwp { theta } => Ok(hwp(theta)),
        Element::Rotator { theta } => Ok(rotator(theta)),
        Element::Diattenuator { d0, d1, theta } => diattenuator(d0, d1, theta),
        Element::Retarder { axis, retardance } => retarder(axis, retardance),
    }
}

/// `[[−cos2θ, −sin2θ], [−sin2θ, cos2θ]]`.
pub fn hwp(theta: f64) -> JonesMatrix {
    let (s, c2) = (2.0 * theta).sin_cos();
    JonesMatrix::new(Mat2::new(re(-c2), re(-s), re(-s), re(c2)))
}

/// `[[cosθ, −sinθ], [sinθ, cosθ]]`, equal to two half-wave plates in series.
pub fn rotator(theta: f64) -> JonesMatrix {
    let (s, co) = theta.sin_cos();
    JonesMatrix::new(Mat2::new(re(co), re(-s), re(s), re(co)))
}

/// `d0 |u⟩⟨u| + d1 |v⟩⟨v|` with `u = (cosθ, sinθ)`, `v = (−sinθ, cosθ)`.
pub fn diattenuator(d0: f64, d1: f64, theta: f64) -> Result<JonesMatrix> {
    for (name, v) in [("d0", d0), ("d1", d1)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::OutOfRange { name, value: v, range: "[0, 1]" });
        }
    }
    if !theta.is_finite() {
        return Err(Error::NonFinite);
    }
    let (s, co) = theta.sin_cos();
    let off = (d0 - d1) * co * s;
    Ok(JonesMatrix::new(Mat2::new(
        re(d0 * co * co + d1 * s * s),
        re(off),
        re(off),
        re(d1 * co * co + d0 * s * s),
    )))
}

/// General unitary retarder `cos(δ/2) I − i sin(δ/2) n·σ`.
pub fn retarder(axis: [f64; 3], retardance: f64) -> Result<JonesMatrix> {
    let norm = axis.iter().map(|a| a * a).sum::<f64>().sqrt();
    if !norm.is_finite() || norm <= 0.0 || !retardance.is_finite() {
        return Err(Error::OutOfRange { name: "retarder axis norm", value: norm, range: "(0, ∞)" });
    }
    let n: Vec<f64> = axis.iter().map(|a| a / norm).collect();
    let (s, co) = (retardance / 2.0).sin_cos();
    let sigma = (1..4).fold(Mat2::zeros(), |acc, k| acc + crate::stokes::pauli(k) * re(n[k - 1]));
    Ok(JonesMatrix::new(Mat2::identity() * re(co) - sigma * c(0.0, s)))
}

/// Pure depolarizer with zero polarizance; real form `diag(1, a, b, c)`.
pub fn make_depolarizer(a: f64, b: f64, cc: f64) -> MuellerStd {
    let (o, h) = (re(0.0), 0.5);
    #[rustfmt::skip]
    let m = Mat4::new(
        re(h * (1.0 + cc)), o, o, re(h * (1.0 - cc)),
        o, re(h * (a + b)), re(h * (a - b)), o,
        o, re(h * (a - b)), re(h * (a + b)), o,
        re(h * (1.0 - cc)), o, o, re(h * (1.0 + cc)),
    );
    MuellerStd::new(m)
}

/// `make_depolarizer(p, p, p)`.
pub fn isotropic_depolarizer(p: f64) -> MuellerStd {
    make_depolarizer(p, p, p)
}

/// Product `ms[0] · ms[1] · …`; the last element acts first. Empty input gives `I₄`.
pub fn compose(ms: &[MuellerStd]) -> MuellerStd {
    MuellerStd::new(ms.iter().fold(Mat4::identity(), |acc, m| acc * m.m))
}

/// `𝓜_D 𝓜_B 𝓜_Δ`.
pub fn lu_chipman_product(m_d: &MuellerStd, m_b: &MuellerStd, m_delta: &MuellerStd) -> MuellerStd {
    compose(&[*m_d, *m_b, *m_delta])
}

/// `x_out = M x_in`.
pub fn apply_mueller_stokes(m: &MuellerReal, x: &StokesVector) -> StokesVector {
    StokesVector::from_vector(&(m.m * x.as_vector()))
}

/// Complex helper for callers holding a real Mueller matrix and needing `C64` arithmetic.
pub fn real_to_complex(m: &Matrix4<f64>) -> Mat4 {
    m.map(|x| C64::new(x, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::stokes::{coherency_from_stokes, pauli, stokes_from_coherency};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    fn diag(v: [f64; 4]) -> Matrix4<f64> {
        Matrix4::from_diagonal(&nalgebra::Vector4::from(v))
    }

    fn real_close(a: &Matrix4<f64>, b: &Matrix4<f64>, tol: f64) -> bool {
        (a - b).abs().max() <= tol
    }

    #[test]
    fn jones_to_mueller_examples() {
        let (s, r) = mueller_from_jones(&JonesMatrix::identity());
        assert_eq!(s.m, Mat4::identity());
        assert!(real_close(&r.m, &Matrix4::identity(), 1e-15));

        let (_, r) = mueller_from_jones(&hwp(0.0));
        assert!(real_close(&r.m, &diag([1.0, -1.0, -1.0, 1.0]), 1e-15));

        let (_, r) = mueller_from_jones(&JonesMatrix::new(pauli(1)));
        assert!(real_close(&r.m, &diag([1.0, 1.0, -1.0, -1.0]), 1e-15));
    }

    #[test]
    fn ensemble_examples() {
        let one = EnsembleSpec::new(vec![(1.0, JonesMatrix::identity())]).unwrap();
        assert_eq!(mueller_from_ensemble(&one).unwrap().0.m, Mat4::identity());

        let mix = EnsembleSpec::new(vec![
            (0.5, JonesMatrix::identity()),
            (0.5, JonesMatrix::new(pauli(3))),
        ])
        .unwrap();
        let (_, r) = mueller_from_ensemble(&mix).unwrap();
        assert!(real_close(&r.m, &diag([1.0, 0.0, 0.0, 1.0]), 1e-15));

        let half = EnsembleSpec::new(vec![(0.5, JonesMatrix::identity())]).unwrap();
        assert_eq!(mueller_from_ensemble(&half).unwrap().0.m, Mat4::identity() * re(0.5));

        assert!(matches!(
            mueller_from_ensemble(&EnsembleSpec::default()),
            Err(Error::EmptyEnsemble)
        ));
        assert!(EnsembleSpec::new(vec![(-0.1, JonesMatrix::identity())]).is_err());
    }

    #[test]
    fn element_examples() {
        assert_eq!(hwp(0.0).t, Mat2::new(re(-1.0), re(0.0), re(0.0), re(1.0)));
        let r = rotator(FRAC_PI_2).t;
        assert!(max_abs_diff(&r, &Mat2::new(re(0.0), re(-1.0), re(1.0), re(0.0))) < 1e-15);
        let pol = diattenuator(1.0, 0.0, 0.0).unwrap().t;
        assert_eq!(pol, Mat2::new(re(1.0), re(0.0), re(0.0), re(0.0)));
        assert!(matches!(diattenuator(1.2, 0.0, 0.0), Err(Error::OutOfRange { name: "d0", .. })));
        assert!(diattenuator(0.5, -0.1, 0.0).is_err());
    }

    #[test]
    fn two_half_wave_plates_make_a_rotator() {
        for k in 0..12 {
            let a = 0.3 * k as f64;
            let b = a - 0.7;
            let product = hwp(a).t * hwp(b).t;
            assert!(max_abs_diff(&product, &rotator(2.0 * (a - b)).t) < 1e-14);
        }
    }

    #[test]
    fn diattenuator_eigenvalues_and_unitary_elements() {
        let t = diattenuator(0.9, 0.3, 0.4).unwrap();
        let ev = crate::eigen::eigenvalues(&t.t);
        assert_abs_diff_eq!(ev[0], 0.9, epsilon = 1e-14);
        assert_abs_diff_eq!(ev[1], 0.3, epsilon = 1e-14);
        assert!(t.is_passive(1e-12));
        assert!(hwp(0.3).is_unitary(1e-14));
        assert!(rotator(1.1).is_unitary(1e-14));
        let r = retarder([0.2, -0.5, 1.0], 1.3).unwrap();
        assert!(r.is_unitary(1e-14));
        assert!(retarder([0.0; 3], 1.0).is_err());
        assert!(!JonesMatrix::new(Mat2::identity() * re(1.5)).is_passive(1e-12));
    }

    #[test]
    fn retarder_blocks_form_a_rotation() {
        let (_, m) = mueller_from_jones(&retarder([1.0, 2.0, -0.5], 0.8).unwrap());
        assert!(m.diattenuation().norm() < 1e-12);
        assert!(m.polarizance().norm() < 1e-12);
        let w = m.block_w();
        assert!((w.transpose() * w - Matrix3::identity()).abs().max() < 1e-12);
        assert_abs_diff_eq!(w.determinant(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn depolarizer_examples() {
        assert_eq!(make_depolarizer(1.0, 1.0, 1.0).m, Mat4::identity());
        let z = make_depolarizer(0.0, 0.0, 0.0).m;
        for (r, col) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert_eq!(z[(r, col)], re(0.5));
        }
        assert_eq!(z.iter().filter(|x| x.norm() > 0.0).count(), 4);

        let r = make_depolarizer(0.2, -0.4, 0.7).to_real().unwrap();
        assert!(real_close(&r.m, &diag([1.0, 0.2, -0.4, 0.7]), 1e-15));
        assert_eq!(r.polarizance(), Vector3::zeros());
        assert_eq!(r.diattenuation(), Vector3::zeros());
    }

    #[test]
    fn compose_order_and_identity() {
        let i = MuellerStd::identity();
        assert_eq!(compose(&[i, i]).m, Mat4::identity());
        assert_eq!(compose(&[]).m, Mat4::identity());
        let b = mueller_from_jones(&rotator(0.3)).0;
        assert_eq!(lu_chipman_product(&i, &b, &i).m, b.m);

        // polarizer then rotator: the rotator is listed first because it acts last
        let pol = mueller_from_jones(&diattenuator(1.0, 0.0, 0.0).unwrap()).0;
        let rot = mueller_from_jones(&rotator(FRAC_PI_2)).0;
        let path = compose(&[rot, pol]).to_real().unwrap();
        let out = apply_mueller_stokes(&path, &StokesVector::new(1.0, 0.0, 0.0, 0.0));
        // vertical light after the rotator
        assert_abs_diff_eq!(out.x[3], -0.5, epsilon = 1e-15);
    }

    #[test]
    fn stokes_application_examples() {
        let x = StokesVector::new(1.0, 0.3, -0.2, 0.4);
        assert_eq!(apply_mueller_stokes(&MuellerReal::identity(), &x), x);

        let h = mueller_from_jones(&hwp(0.0)).1;
        let out = apply_mueller_stokes(&h, &StokesVector::new(1.0, 1.0, 0.0, 0.0));
        assert_eq!(out.x, [1.0, -1.0, 0.0, 0.0]);

        let pol = mueller_from_jones(&diattenuator(1.0, 0.0, 0.0).unwrap()).1;
        let out = apply_mueller_stokes(&pol, &StokesVector::new(1.0, 0.0, 0.0, 0.0));
        for (g, w) in out.x.iter().zip([0.5, 0.0, 0.0, 0.5]) {
            assert_abs_diff_eq!(*g, w, epsilon = 1e-15);
        }
    }

    #[test]
    fn std_application_matches_jones_sandwich() {
        let t = JonesMatrix::new(Mat2::new(c(0.3, 0.1), c(-0.2, 0.5), c(0.0, -0.4), c(0.6, 0.2)));
        let j = coherency_from_stokes(&StokesVector::new(1.0, 0.2, 0.5, -0.3));
        let (s, r) = mueller_from_jones(&t);
        assert!(max_abs_diff(&s.apply(&j).j, &t.apply(&j).j) < 1e-14);
        let via_real = apply_mueller_stokes(&r, &stokes_from_coherency(&j).unwrap());
        let direct = stokes_from_coherency(&t.apply(&j)).unwrap();
        for k in 0..4 {
            assert_abs_diff_eq!(via_real.x[k], direct.x[k], epsilon = 1e-14);
        }
    }

    #[test]
    fn real_std_roundtrip_and_blocks() {
        let mut m = Matrix4::zeros();
        for r in 0..4 {
            for col in 0..4 {
                m[(r, col)] = (r as f64 + 1.0) * 0.1 - col as f64 * 0.05;
            }
        }
        let real = MuellerReal::new(m);
        let back = real.to_std().to_real().unwrap();
        assert!(real_close(&back.m, &m, 1e-15));
        let rebuilt =
            MuellerReal::from_blocks(real.m00(), &real.diattenuation(), &real.polarizance(), &real.block_w());
        assert_eq!(rebuilt, real);
        let n = real.normalize().unwrap();
        assert_abs_diff_eq!(n.m00(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(real.to_std().m00(), real.m00(), epsilon = 1e-15);
        assert!(MuellerReal::new(Matrix4::zeros()).normalize().is_err());
    }

    #[test]
    fn complex_std_matrix_is_rejected_as_real() {
        let mut m = Mat4::identity();
        m[(0, 1)] = c(0.0, 0.3);
        assert!(matches!(MuellerStd::new(m).to_real(), Err(Error::ImaginaryResidue(_))));
    }
}
