//! Dynamical matrix, spectral decomposition and map classification.
//!
//! Reshuffling a Standard-basis Mueller matrix, `H[2i+j][2k+l] = 𝓜[2i+k][2j+l]`,
//! gives a matrix that is Hermitian for every real ensemble and positive
//! semidefinite exactly when the map is physical. Its eigenpairs `(λ, u)` give
//! the Kraus form `𝓜 = Σ λ T ⊗ T*` with `T[i][j] = u[2i+j]`.

use nalgebra::Vector4;
use serde::Serialize;

use crate::eigen::hermitian_eigen;
use crate::linalg::{hermitian_defect, max_abs, re, trace, unvec2, vec2, Mat2, Mat4};
use crate::mueller::{JonesMatrix, MuellerReal, MuellerStd};
use crate::stokes::change_of_basis;
use crate::{Error, Result, C64, EPS_NUM, EPS_PSD};

/// Flag tolerance used by [`classify`].
pub const CLASSIFY_TOL: f64 = 1e-9;

/// Eigenvalues closer than this are treated as degenerate when ordering Kraus terms.
const DEGENERACY_TOL: f64 = 1e-10;

/// Dynamical (Choi) matrix of a polarization map.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HMatrix {
    pub h: Mat4,
}

impl HMatrix {
    pub fn new(h: Mat4) -> Self {
        Self { h }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        hermitian_defect(&self.h) <= tol * max_abs(&self.h).max(1.0)
    }

    /// Equal to `2 M00`.
    pub fn trace(&self) -> f64 {
        trace(&self.h).re
    }
}

pub fn reshuffle(m: &MuellerStd) -> HMatrix {
    HMatrix::new(crate::linalg::reshuffle(&m.m))
}

pub fn unreshuffle(h: &HMatrix) -> MuellerStd {
    MuellerStd::new(crate::linalg::reshuffle(&h.h))
}

/// One weighted Kraus operator `(λ, T)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KrausTerm {
    pub weight: f64,
    pub op: JonesMatrix,
}

/// A weighted Kraus decomposition, sorted by weight descending.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct KrausSet {
    pub terms: Vec<KrausTerm>,
}

impl KrausSet {
    pub fn new(mut terms: Vec<KrausTerm>) -> Self {
        terms.sort_by(|a, b| b.weight.total_cmp(&a.weight));
        Self { terms }
    }

    /// Splits each operator `K` into `λ = Tr K†K` and `T = K/√λ`; zero operators are dropped.
    pub fn from_scaled_operators(ops: &[Mat2]) -> Self {
        let terms = ops
            .iter()
            .filter_map(|k| {
                let w = trace(&(k.adjoint() * k)).re;
                (w > 0.0).then(|| KrausTerm { weight: w, op: JonesMatrix::new(k * re(1.0 / w.sqrt())) })
            })
            .collect();
        Self::new(terms)
    }

    /// `√λ T` for every term.
    pub fn scaled_operators(&self) -> Vec<Mat2> {
        self.terms.iter().map(|t| t.op.t * re(t.weight.sqrt())).collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.weight).collect()
    }

    /// `Σ λ T ⊗ T*`.
    pub fn reconstruct(&self) -> MuellerStd {
        let m = self.terms.iter().fold(Mat4::zeros(), |acc, t| {
            acc + crate::linalg::kron2(&t.op.t, &t.op.t.conjugate()) * re(t.weight)
        });
        MuellerStd::new(m)
    }

    /// `Σ λ T† T`, equal to `I` for a trace-preserving map.
    pub fn trace_condition(&self) -> Mat2 {
        self.terms
            .iter()
            .fold(Mat2::zeros(), |acc, t| acc + t.op.t.adjoint() * t.op.t * re(t.weight))
    }

    /// `Σ λ T T†`, equal to `I` for a unital map.
    pub fn unital_condition(&self) -> Mat2 {
        self.terms
            .iter()
            .fold(Mat2::zeros(), |acc, t| acc + t.op.t * t.op.t.adjoint() * re(t.weight))
    }

    /// `Σ λ T ρ T†`, without renormalization.
    pub fn apply(&self, rho: &Mat2) -> Mat2 {
        self.terms
            .iter()
            .fold(Mat2::zeros(), |acc, t| acc + t.op.t * rho * t.op.t.adjoint() * re(t.weight))
    }
}

/// Multiplies `u` by the phase that makes its largest-magnitude entry real and positive.
/// Among entries of equal magnitude (within round-off) the first one wins.
fn fix_phase(u: &Vector4<C64>) -> Vector4<C64> {
    let max = u.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return *u;
    }
    let pivot = u.iter().find(|z| z.norm() >= max * (1.0 - 1e-12)).copied().unwrap_or(re(1.0));
    u * (pivot.conj() / pivot.norm())
}

/// Descending lexicographic order on `(re, im)` of each entry.
fn lexicographic(a: &Vector4<C64>, b: &Vector4<C64>) -> std::cmp::Ordering {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im)))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Spectral decomposition `𝓜 = Σ λ T ⊗ T*`.
///
/// Terms come sorted by `λ` descending; inside a degenerate group they are
/// ordered lexicographically (descending) on the phase-fixed eigenvector. Each
/// `T` satisfies `Tr T†T = 1`. Eigenvalues in `[−ε, 0)` with
/// `ε = EPS_PSD · Σ|λ|` are clamped to zero; anything more negative is rejected.
pub fn cloude_decompose(m: &MuellerStd) -> Result<KrausSet> {
    let h = reshuffle(m);
    let scale = max_abs(&h.h).max(1.0);
    let defect = hermitian_defect(&h.h);
    if defect > EPS_NUM * scale {
        return Err(Error::NonHermitian(defect));
    }
    let eig = hermitian_eigen(&h.h);
    let total: f64 = eig.values.iter().map(|x| x.abs()).sum();
    let norm = if total > 0.0 { total } else { 1.0 };
    if eig.min_value() / norm < -EPS_PSD {
        return Err(Error::Unphysical(eig.min_value() / norm));
    }

    let mut pairs: Vec<(f64, Vector4<C64>)> =
        (0..4).map(|k| (eig.values[k].max(0.0), fix_phase(&eig.vector(k)))).collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && pairs[start].0 - pairs[end].0 <= DEGENERACY_TOL * norm {
            end += 1;
        }
        pairs[start..end].sort_by(|a, b| lexicographic(&a.1, &b.1));
        start = end;
    }
    let terms = pairs
        .into_iter()
        .map(|(w, u)| KrausTerm { weight: w, op: JonesMatrix::new(unvec2(&u)) })
        .collect();
    Ok(KrausSet { terms })
}

/// Eigenvalues of `H`, descending and unclamped.
pub fn spectrum(m: &MuellerStd) -> [f64; 4] {
    let v = hermitian_eigen(&reshuffle(m).h).values;
    [v[0], v[1], v[2], v[3]]
}

/// Physicality, trace preservation, unitality and dichroism of a map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MapClassification {
    pub physical: bool,
    pub trace_preserving: bool,
    pub unital: bool,
    pub dichroic: bool,
    /// Smallest eigenvalue of `H` divided by `Σ|λ|`.
    pub min_eigenvalue: f64,
    pub diattenuation_norm: f64,
    pub polarizance_norm: f64,
}

/// Classifies a Standard-basis Mueller matrix.
///
/// A non-Hermitian `H` is reported as unphysical. The block vectors are read
/// from the real part of `½ V 𝓜 V†`.
pub fn classify(m: &MuellerStd) -> MapClassification {
    let h = reshuffle(m);
    let hermitian = h.is_hermitian(CLASSIFY_TOL);
    let values = hermitian_eigen(&h.h).values;
    let total: f64 = values.iter().map(|x| x.abs()).sum();
    let min = if total > 0.0 { values[3] / total } else { 0.0 };

    let v = change_of_basis();
    let real = MuellerReal::new((v * m.m * v.adjoint() * re(0.5)).map(|z| z.re));
    let d = real.diattenuation().norm();
    let p = real.polarizance().norm();
    let trace_preserving = (real.m00() - 1.0).abs() <= CLASSIFY_TOL && d <= CLASSIFY_TOL;
    MapClassification {
        physical: hermitian && min >= -EPS_PSD,
        trace_preserving,
        unital: trace_preserving && p <= CLASSIFY_TOL,
        dichroic: d > CLASSIFY_TOL,
        min_eigenvalue: min,
        diattenuation_norm: d,
        polarizance_norm: p,
    }
}

pub fn classify_real(m: &MuellerReal) -> MapClassification {
    classify(&m.to_std())
}

/// `Σ λ T† T`.
pub fn kraus_trace_condition(ks: &KrausSet) -> Mat2 {
    ks.trace_condition()
}

/// `vec(T)`, the eigenvector of `H` belonging to a single Jones matrix.
pub fn jones_vector_of(t: &JonesMatrix) -> Vector4<C64> {
    vec2(&t.t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, max_abs_diff};
    use crate::mueller::{diattenuator, isotropic_depolarizer, mueller_from_jones, rotator};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn identity_reshuffles_to_rank_one() {
        let h = reshuffle(&MuellerStd::identity());
        let e = hermitian_eigen(&h.h);
        assert_abs_diff_eq!(e.values[0], 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.values[1], 0.0, epsilon = 1e-15);
        let u = fix_phase(&e.vector(0));
        let expected = Vector4::new(re(FRAC_1_SQRT_2), re(0.0), re(0.0), re(FRAC_1_SQRT_2));
        assert!((u - expected).norm() < 1e-15);
        assert_eq!(unreshuffle(&h).m, Mat4::identity());
    }

    #[test]
    fn mueller_jones_reshuffles_to_outer_product() {
        let t = JonesMatrix::new(Mat2::new(c(0.2, 0.1), c(-0.7, 0.3), c(0.5, 0.0), c(0.1, -0.4)));
        let h = reshuffle(&mueller_from_jones(&t).0);
        let v = vec2(&t.t);
        assert!(max_abs_diff(&h.h, &(v * v.adjoint())) < 1e-15);
    }

    #[test]
    fn depolarizer_spectrum() {
        for k in 0..=10 {
            let p = k as f64 / 10.0;
            let s = spectrum(&isotropic_depolarizer(p));
            let mut expected = [(1.0 + 3.0 * p) / 2.0, (1.0 - p) / 2.0, (1.0 - p) / 2.0, (1.0 - p) / 2.0];
            expected.sort_by(|a, b| b.total_cmp(a));
            for (g, w) in s.iter().zip(expected) {
                assert_abs_diff_eq!(*g, w, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn identity_decomposes_to_scaled_identity() {
        let ks = cloude_decompose(&MuellerStd::identity()).unwrap();
        assert_abs_diff_eq!(ks.terms[0].weight, 2.0, epsilon = 1e-15);
        let t = ks.terms[0].op.t;
        assert!(max_abs_diff(&t, &(Mat2::identity() * re(FRAC_1_SQRT_2))) < 1e-15);
        assert!(ks.terms[1..].iter().all(|t| t.weight.abs() < 1e-15));
        assert!(max_abs_diff(&ks.reconstruct().m, &Mat4::identity()) < 1e-15);
    }

    #[test]
    fn full_depolarizer_gives_pauli_kraus() {
        let ks = cloude_decompose(&isotropic_depolarizer(0.0)).unwrap();
        for t in &ks.terms {
            assert_abs_diff_eq!(t.weight, 0.5, epsilon = 1e-14);
        }
        // fully degenerate: any orthonormal operator basis is valid
        for (i, a) in ks.terms.iter().enumerate() {
            for (j, b) in ks.terms.iter().enumerate() {
                let g = (a.op.t.adjoint() * b.op.t).trace();
                assert!((g - re(if i == j { 1.0 } else { 0.0 })).norm() < 1e-12);
            }
        }
        assert!(max_abs_diff(&ks.reconstruct().m, &isotropic_depolarizer(0.0).m) < 1e-14);
        assert!(max_abs_diff(&ks.trace_condition(), &Mat2::identity()) < 1e-14);
        let one = cloude_decompose(&isotropic_depolarizer(1.0)).unwrap();
        assert_eq!(one.weights().iter().map(|w| (w * 1e12).round() / 1e12).collect::<Vec<_>>(), vec![2.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn kraus_operators_are_orthonormal() {
        let m = isotropic_depolarizer(0.3).m * re(0.6) + mueller_from_jones(&rotator(0.4)).0.m * re(0.4);
        let ks = cloude_decompose(&MuellerStd::new(m)).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                let g = (ks.terms[a].op.t.adjoint() * ks.terms[b].op.t).trace();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((g - re(want)).norm() < 1e-12);
            }
        }
        assert!(max_abs_diff(&ks.reconstruct().m, &m) < 1e-12);
        let total: f64 = ks.weights().iter().sum();
        assert_abs_diff_eq!(total, 2.0 * MuellerStd::new(m).m00(), epsilon = 1e-12);
    }

    #[test]
    fn decomposition_errors() {
        let mut m = Mat4::identity();
        m[(0, 1)] = re(0.5);
        assert!(matches!(cloude_decompose(&MuellerStd::new(m)), Err(Error::NonHermitian(_))));
        // reshuffled -I₄ has eigenvalue -2
        assert!(matches!(
            cloude_decompose(&MuellerStd::new(-Mat4::identity())),
            Err(Error::Unphysical(_))
        ));
    }

    #[test]
    fn classification_examples() {
        let rot = classify(&mueller_from_jones(&rotator(0.7)).0);
        assert!(rot.physical && rot.trace_preserving && rot.unital && !rot.dichroic);

        let pol = mueller_from_jones(&diattenuator(1.0, 0.0, 0.0).unwrap()).1.normalize().unwrap();
        let cls = classify_real(&pol);
        assert!(cls.dichroic && !cls.trace_preserving && cls.physical);

        let bad = classify(&MuellerStd::new(-Mat4::identity()));
        assert!(!bad.physical);
    }

    #[test]
    fn trace_condition_of_polarizer() {
        let ks = KrausSet::from_scaled_operators(&[diattenuator(1.0, 0.0, 0.0).unwrap().t]);
        assert_eq!(kraus_trace_condition(&ks), Mat2::new(re(1.0), re(0.0), re(0.0), re(0.0)));
        assert!(KrausSet::from_scaled_operators(&[Mat2::zeros()]).terms.is_empty());
    }
}
