#![allow(dead_code)]

use nalgebra::Vector4;
use polarmap::eigen::hermitian_eigen;
use polarmap::linalg::{c, kron2, re, Mat2, Mat4};
use polarmap::mueller::{JonesMatrix, MuellerStd};
use polarmap::qmaps::DensityMatrix2;
use polarmap::C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cplx(r: &mut impl Rng) -> C64 {
    c(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))
}

pub fn jones(r: &mut impl Rng) -> Mat2 {
    Mat2::from_fn(|_, _| cplx(r))
}

/// Random Jones matrix with singular values at most 1.
pub fn passive_jones(r: &mut impl Rng) -> JonesMatrix {
    let t = jones(r);
    let smax = t.singular_values().max();
    JonesMatrix::new(t / re(smax.max(1e-12) * r.random_range(1.0..1.5)))
}

pub fn unitary(r: &mut impl Rng) -> JonesMatrix {
    let v = Vector4::from_fn(|_, _| r.random_range(-1.0..1.0f64));
    let v = v / v.norm().max(1e-12);
    let (a, b) = (c(v[0], v[1]), c(v[2], v[3]));
    let ph = C64::from_polar(1.0, r.random_range(0.0..std::f64::consts::TAU));
    JonesMatrix::new(Mat2::new(a, -b.conj(), b, a.conj()) * ph)
}

/// Weighted Jones ensemble with 1 to 4 members.
pub fn ensemble(r: &mut impl Rng) -> Vec<(f64, Mat2)> {
    let n = r.random_range(1..=4);
    (0..n).map(|_| (r.random_range(0.0..1.0), passive_jones(r).t)).collect()
}

pub fn mueller_of(ops: &[(f64, Mat2)]) -> MuellerStd {
    MuellerStd::new(ops.iter().fold(Mat4::zeros(), |acc, (w, t)| acc + kron2(t, &t.conjugate()) * re(*w)))
}

/// `Σ w (T⊗I) ρ (T⊗I)†`, the Kraus route for a map on qubit A.
pub fn kraus_on_a(ops: &[(f64, Mat2)], rho: &Mat4) -> Mat4 {
    kraus_bilocal(ops, &[(1.0, Mat2::identity())], rho)
}

pub fn kraus_bilocal(a: &[(f64, Mat2)], b: &[(f64, Mat2)], rho: &Mat4) -> Mat4 {
    let mut out = Mat4::zeros();
    for (wa, ta) in a {
        for (wb, tb) in b {
            let k = kron2(ta, tb);
            out += k * rho * k.adjoint() * re(wa * wb);
        }
    }
    out
}

/// Ensemble rescaled so that `M00 = 1`.
pub fn normalized_ensemble(r: &mut impl Rng) -> Vec<(f64, Mat2)> {
    loop {
        let e = ensemble(r);
        let m00 = mueller_of(&e).m00();
        if m00 > 1e-6 {
            return e.into_iter().map(|(w, t)| (w / m00, t)).collect();
        }
    }
}

/// Random trace-preserving Kraus set `K_k = A_k S^{-1/2}`, `S = Σ A†A`.
pub fn trace_preserving(r: &mut impl Rng) -> Vec<(f64, Mat2)> {
    let n = r.random_range(1..=4);
    let raw: Vec<Mat2> = (0..n).map(|_| jones(r)).collect();
    let s = raw.iter().fold(Mat2::zeros(), |acc, a| acc + a.adjoint() * a);
    let inv_sqrt = hermitian_eigen(&s).map_values(|x| 1.0 / x.sqrt());
    raw.into_iter().map(|a| (1.0, a * inv_sqrt)).collect()
}

pub fn density2(r: &mut impl Rng) -> DensityMatrix2 {
    let g = Mat4::from_fn(|_, _| cplx(r));
    let rho = g * g.adjoint();
    let tr = rho.trace().re;
    DensityMatrix2::new(rho / re(tr)).expect("G G† / Tr is a state")
}

pub fn werner(p: f64) -> Mat4 {
    let s = polarmap::qmaps::singlet().r;
    s * re(p) + Mat4::identity() * re((1.0 - p) / 4.0)
}

/// Eigenvalues sorted descending.
pub fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
