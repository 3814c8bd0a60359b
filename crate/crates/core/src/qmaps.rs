//! Mueller matrices acting on one- and two-qubit density matrices.
//!
//! A one-qubit map acts as `ρ̃_out = unvec(𝓜 vec ρ_in)`. For two qubits the
//! reshuffled state `ρ^R[2i+k][2j+l] = ρ[2i+j][2k+l]` carries the local maps as
//! `ρ̃^R = 𝓜^A ρ^R 𝓜^Bᵀ`, or equivalently `(𝓜^A ⊗ 𝓜^B) vec(ρ^R)` with the
//! row-major index `4μ + ν`. Qubit A is the most significant factor of the
//! basis `|00⟩, |01⟩, |10⟩, |11⟩`.
//!
//! Every unnormalized result comes with its trace so that post-selection
//! factors of dichroic maps stay visible.

use nalgebra::{DMatrix, Matrix3, SVector, Vector3};

use crate::cloude::KrausSet;
use crate::eigen::hermitian_eigen;
use crate::linalg::{c, hermitian_defect, kron2, kron4, max_abs, re, reshuffle, trace, Mat16, Mat2, Mat4};
use crate::mueller::{MuellerReal, MuellerStd};
use crate::stokes::pauli;
use crate::{Error, Result, C64, EPS_NUM, EPS_PSD};

/// Trace tolerance applied when validating normalized states.
pub const TRACE_TOL: f64 = 1e-12;

fn validate_state<const N: usize>(r: &nalgebra::SMatrix<C64, N, N>) -> Result<()> {
    if r.iter().any(|z| !z.is_finite()) {
        return Err(Error::NonFinite);
    }
    let defect = hermitian_defect(r);
    if defect > EPS_NUM * max_abs(r).max(1.0) {
        return Err(Error::NonHermitian(defect));
    }
    let tr = trace(r).re;
    if (tr - 1.0).abs() > TRACE_TOL {
        return Err(Error::InvalidTrace(tr));
    }
    let min = hermitian_eigen(r).min_value();
    if min < -EPS_PSD {
        return Err(Error::NotPsd(min));
    }
    Ok(())
}

/// Normalized single-qubit density matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix1 {
    pub r: Mat2,
}

impl DensityMatrix1 {
    /// Checks Hermiticity, unit trace and positivity.
    pub fn new(r: Mat2) -> Result<Self> {
        validate_state(&r)?;
        Ok(Self { r })
    }

    pub fn new_unchecked(r: Mat2) -> Self {
        Self { r }
    }

    pub fn maximally_mixed() -> Self {
        Self { r: Mat2::identity() * re(0.5) }
    }

    pub fn trace(&self) -> f64 {
        trace(&self.r).re
    }
}

/// Normalized two-qubit density matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix2 {
    pub r: Mat4,
}

impl DensityMatrix2 {
    /// Checks Hermiticity, unit trace and positivity.
    pub fn new(r: Mat4) -> Result<Self> {
        validate_state(&r)?;
        Ok(Self { r })
    }

    pub fn new_unchecked(r: Mat4) -> Self {
        Self { r }
    }

    pub fn maximally_mixed() -> Self {
        Self { r: Mat4::identity() * re(0.25) }
    }

    pub fn trace(&self) -> f64 {
        trace(&self.r).re
    }

    pub fn purity(&self) -> f64 {
        (self.r * self.r).trace().re
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        let v = hermitian_eigen(&self.r).values;
        [v[0], v[1], v[2], v[3]]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Qubit {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    /// The singlet.
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [Self::PhiPlus, Self::PhiMinus, Self::PsiPlus, Self::PsiMinus];
}

/// `|ψ⟩⟨ψ|` for the requested Bell state.
pub fn bell_state(b: BellState) -> DensityMatrix2 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let v = match b {
        BellState::PhiPlus => [h, 0.0, 0.0, h],
        BellState::PhiMinus => [h, 0.0, 0.0, -h],
        BellState::PsiPlus => [0.0, h, h, 0.0],
        BellState::PsiMinus => [0.0, h, -h, 0.0],
    };
    let v = nalgebra::Vector4::from(v).map(re);
    DensityMatrix2::new_unchecked(v * v.adjoint())
}

/// `ρ_s = ¼ (X0⊗X0 − X1⊗X1 − X2⊗X2 − X3⊗X3)`.
pub fn singlet() -> DensityMatrix2 {
    let r = (1..4).fold(kron2(&pauli(0), &pauli(0)), |acc, k| acc - kron2(&pauli(k), &pauli(k)));
    DensityMatrix2::new_unchecked(r * re(0.25))
}

/// `ρ^R`, an involution. The result is generally not Hermitian.
pub fn reshuffle_state(r: &Mat4) -> Mat4 {
    reshuffle(r)
}

/// Inverse of [`reshuffle_state`].
pub fn unreshuffle_state(r: &Mat4) -> Mat4 {
    reshuffle(r)
}

/// `ρ̃ = unvec(𝓜 vec ρ)` normalized, with `Tr ρ̃`.
pub fn apply_one_qubit(m: &MuellerStd, rin: &DensityMatrix1) -> Result<(DensityMatrix1, f64)> {
    let y = m.m * crate::linalg::vec2(&rin.r);
    let out = crate::linalg::unvec2(&y);
    let tr = trace(&out).re;
    if tr <= EPS_NUM {
        return Err(Error::TotalAbsorption(tr));
    }
    Ok((DensityMatrix1::new_unchecked(out / re(tr)), tr))
}

/// `Tr ρ̃ = M00 + M01(ρ01+ρ10) + i M02(ρ01−ρ10) + M03(ρ00−ρ11)` for unit-trace input.
pub fn transmitted_trace(m: &MuellerReal, rin: &DensityMatrix1) -> f64 {
    let r = &rin.r;
    let t = re(m.m[(0, 0)])
        + (r[(0, 1)] + r[(1, 0)]) * m.m[(0, 1)]
        + c(0.0, m.m[(0, 2)]) * (r[(0, 1)] - r[(1, 0)])
        + (r[(0, 0)] - r[(1, 1)]) * m.m[(0, 3)];
    t.re
}

/// `(𝓜 ρ^R)^R` without normalization; `𝓜` acts on qubit A.
pub fn apply_exact(m: &MuellerStd, r: &Mat4) -> Mat4 {
    reshuffle(&(m.m * reshuffle(r)))
}

/// `(𝓜^A ρ^R 𝓜^Bᵀ)^R` without normalization.
pub fn apply_bilocal_unnormalized(m_a: &MuellerStd, m_b: &MuellerStd, r: &Mat4) -> Mat4 {
    reshuffle(&(m_a.m * reshuffle(r) * m_b.m.transpose()))
}

fn normalize2(out: Mat4) -> Result<(DensityMatrix2, f64)> {
    let tr = trace(&out).re;
    if tr.is_nan() || tr <= EPS_NUM {
        return Err(Error::TotalAbsorption(tr));
    }
    Ok((DensityMatrix2::new_unchecked(out / re(tr)), tr))
}

/// Bi-local map `𝓔_A ⊗ 𝓔_B`, normalized, with the trace of the raw output.
pub fn apply_bilocal(m_a: &MuellerStd, m_b: &MuellerStd, r: &DensityMatrix2) -> Result<(DensityMatrix2, f64)> {
    normalize2(apply_bilocal_unnormalized(m_a, m_b, &r.r))
}

/// `Σ λ_μ λ_ν (A_μ ⊗ B_ν) ρ (A_μ ⊗ B_ν)†`, normalized, with the raw trace.
pub fn apply_bilocal_kraus(ks_a: &KrausSet, ks_b: &KrausSet, r: &DensityMatrix2) -> Result<(DensityMatrix2, f64)> {
    let mut out = Mat4::zeros();
    for a in &ks_a.terms {
        for b in &ks_b.terms {
            let k = kron2(&a.op.t, &b.op.t);
            out += k * r.r * k.adjoint() * re(a.weight * b.weight);
        }
    }
    normalize2(out)
}

/// `(𝓜 ρ_s^R)^R`, which is already normalized when `M00 = 1`.
pub fn apply_to_singlet(m: &MuellerStd) -> Result<DensityMatrix2> {
    let m00 = m.m00();
    if (m00 - 1.0).abs() > EPS_NUM {
        return Err(Error::NotNormalized(m00));
    }
    Ok(DensityMatrix2::new_unchecked(apply_exact(m, &singlet().r)))
}

/// Purity of the normalized output of the map applied to one half of the
/// singlet, `Tr(M Mᵀ) / (4 M00²)`. For `M00 = 1` this is `Tr(M Mᵀ)/4`.
pub fn purity_from_mueller(m: &MuellerReal) -> Result<f64> {
    let m00 = m.m00();
    if m00.abs() <= EPS_NUM {
        return Err(Error::TotalAbsorption(m00));
    }
    Ok((m.m * m.m.transpose()).trace() / (4.0 * m00 * m00))
}

/// Reduced state of the `keep` qubit.
pub fn partial_trace(r: &Mat4, keep: Qubit) -> Mat2 {
    Mat2::from_fn(|i, j| match keep {
        // sum of the diagonal blocks A + D
        Qubit::B => r[(i, j)] + r[(2 + i, 2 + j)],
        // in-block traces
        Qubit::A => r[(2 * i, 2 * j)] + r[(2 * i + 1, 2 * j + 1)],
    })
}

/// The 2×2 blocks of a two-qubit matrix indexed by qubit A.
#[derive(Clone, Copy, Debug)]
struct StateBlocks {
    a: Mat2,
    b: Mat2,
    c: Mat2,
    d: Mat2,
}

impl StateBlocks {
    fn of(r: &Mat4) -> Self {
        let block = |i0: usize, j0: usize| Mat2::from_fn(|i, j| r[(i0 + i, j0 + j)]);
        Self { a: block(0, 0), b: block(0, 2), c: block(2, 0), d: block(2, 2) }
    }
}

/// Reduced state of qubit B after `M` acts on qubit A, from the block closed form
/// `M00(A+D) + M01(B+C) + i M02(B−C) + M03(A−D)`.
pub fn traced_output(m: &MuellerReal, r: &Mat4) -> Mat2 {
    let s = StateBlocks::of(r);
    (s.a + s.d) * re(m.m[(0, 0)])
        + (s.b + s.c) * re(m.m[(0, 1)])
        + (s.b - s.c) * c(0.0, m.m[(0, 2)])
        + (s.a - s.d) * re(m.m[(0, 3)])
}

/// 16×16 two-qubit Mueller matrix acting on row-major `vec(ρ^R)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoQubitMueller {
    pub m: Mat16,
}

impl TwoQubitMueller {
    /// Unnormalized `ρ̃` obtained from `y_out = 𝓜 y_in`.
    pub fn apply(&self, r: &Mat4) -> Mat4 {
        let rr = reshuffle(r);
        let y = SVector::<C64, 16>::from_fn(|b, _| rr[(b / 4, b % 4)]);
        let out = self.m * y;
        reshuffle(&Mat4::from_fn(|a, b| out[4 * a + b]))
    }
}

/// `𝓜^A ⊗ 𝓜^B`.
pub fn build_two_qubit_mueller(m_a: &MuellerStd, m_b: &MuellerStd) -> TwoQubitMueller {
    TwoQubitMueller { m: kron4(&m_a.m, &m_b.m) }
}

/// Weighted sum `Σ w 𝓜^A ⊗ 𝓜^B` describing a non-local map.
#[derive(Clone, Debug, Default)]
pub struct NonSeparableCombo {
    pub terms: Vec<(f64, MuellerStd, MuellerStd)>,
}

impl NonSeparableCombo {
    pub fn new(terms: Vec<(f64, MuellerStd, MuellerStd)>) -> Result<Self> {
        if let Some(&(w, _, _)) = terms.iter().find(|t| !t.0.is_finite() || t.0 < 0.0) {
            return Err(Error::OutOfRange { name: "w_AB", value: w, range: "[0, ∞)" });
        }
        Ok(Self { terms })
    }
}

pub fn from_combo(combo: &NonSeparableCombo) -> Result<TwoQubitMueller> {
    if combo.terms.is_empty() {
        return Err(Error::EmptyCombo);
    }
    let m = combo
        .terms
        .iter()
        .fold(Mat16::zeros(), |acc, (w, a, b)| acc + kron4(&a.m, &b.m) * re(*w));
    Ok(TwoQubitMueller { m })
}

/// Frobenius distance from `m` to the nearest `𝓜^A ⊗ 𝓜^B`, via the singular
/// values of the rearranged matrix `R[4α+μ][4β+ν] = m[4α+β][4μ+ν]`.
pub fn kronecker_rank1_residual(m: &TwoQubitMueller) -> f64 {
    let r = DMatrix::<C64>::from_fn(16, 16, |row, col| {
        let (alpha, mu) = (row / 4, row % 4);
        let (beta, nu) = (col / 4, col % 4);
        m.m[(4 * alpha + beta, 4 * mu + nu)]
    });
    let mut s: Vec<f64> = r.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s[1..].iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Output of two trace-preserving maps with polarizance vectors `a`, `b` and
/// blocks `A`, `B` applied to the singlet, assembled entry by entry from
/// `C = A Bᵀ`.
pub fn singlet_output_components(
    a: &Vector3<f64>,
    b: &Vector3<f64>,
    ma: &Matrix3<f64>,
    mb: &Matrix3<f64>,
) -> DensityMatrix2 {
    let cm = ma * mb.transpose();
    // one-based accessors keep the formulas readable
    let cc = |i: usize, j: usize| cm[(i - 1, j - 1)];
    let (a1, a2, a3) = (a[0], a[1], a[2]);
    let (b1, b2, b3) = (b[0], b[1], b[2]);

    let alpha_pp = (1.0 + a3) + (b3 * (1.0 + a3) - cc(3, 3));
    let alpha_mp = (1.0 + a3) - (b3 * (1.0 + a3) - cc(3, 3));
    let alpha_pm = (1.0 - a3) + (b3 * (1.0 - a3) + cc(3, 3));
    let alpha_mm = (1.0 - a3) - (b3 * (1.0 - a3) + cc(3, 3));

    let beta = |s: f64| b1 + s * (a3 * b1 - cc(3, 1));
    let gamma = |s: f64| a1 + s * (a1 * b3 - cc(1, 3));
    let delta = |s: f64| a1 * b1 - cc(1, 1) - s * (a2 * b2 - cc(2, 2));
    let xi = |s: f64| b2 + s * (a3 * b2 - cc(3, 2));
    let eta = |s: f64| a2 + s * (a2 * b3 - cc(2, 3));
    let tau = |s: f64| a2 * b1 - cc(2, 1) + s * (a1 * b2 - cc(1, 2));

    #[rustfmt::skip]
    let real = nalgebra::Matrix4::new(
        alpha_pp,    beta(1.0),   gamma(1.0),  delta(1.0),
        beta(1.0),   alpha_mp,    delta(-1.0), gamma(-1.0),
        gamma(1.0),  delta(-1.0), alpha_pm,    beta(-1.0),
        delta(1.0),  gamma(-1.0), beta(-1.0),  alpha_mm,
    );
    #[rustfmt::skip]
    let imag = nalgebra::Matrix4::new(
        0.0,        -xi(1.0),    -eta(1.0),   -tau(1.0),
        xi(1.0),     0.0,        -tau(-1.0),  -eta(-1.0),
        eta(1.0),    tau(-1.0),   0.0,        -xi(-1.0),
        tau(1.0),    eta(-1.0),   xi(-1.0),    0.0,
    );
    DensityMatrix2::new_unchecked(Mat4::from_fn(|i, j| c(real[(i, j)], imag[(i, j)]) * 0.25))
}
