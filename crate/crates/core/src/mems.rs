//! Maximally entangled mixed states from a bi-local map on the singlet.
//!
//! Both single-qubit maps depend on the same parameter `p`, so the API hands
//! out the pair from a single value. The family splits at `p = 2/3`:
//! region II is `[0, 2/3]` with `g = 2/3`, region I is `(2/3, 1]` with `g = p`.

use nalgebra::{Matrix3, Matrix4, Vector3};
use serde::Serialize;

use crate::cloude::{classify, cloude_decompose, spectrum, KrausSet};
use crate::linalg::{max_abs_diff, re, Mat2, Mat4};
use crate::metrics::concurrence_tangle;
use crate::mueller::MuellerReal;
use crate::qmaps::{apply_bilocal, partial_trace, singlet, DensityMatrix2, Qubit};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Region {
    /// `2/3 < p ≤ 1`.
    I,
    /// `0 ≤ p ≤ 2/3`.
    II,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MemsParams {
    pub p: f64,
    pub region: Region,
    pub g: f64,
}

impl MemsParams {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::OutOfRange { name: "p", value: p, range: "[0, 1]" });
        }
        let region = if p > 2.0 / 3.0 { Region::I } else { Region::II };
        Ok(Self { p, region, g: g(p) })
    }
}

/// `2/3` on `[0, 2/3]`, `p` above.
pub fn g(p: f64) -> f64 {
    if p > 2.0 / 3.0 {
        p
    } else {
        2.0 / 3.0
    }
}

/// Region II amplitudes `φ±` and `ψ±`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Coefficients {
    pub phi_plus: f64,
    pub phi_minus: f64,
    pub psi_plus: f64,
    pub psi_minus: f64,
}

/// `φ± = √(½(1 ± (1+6p)/s))`, `ψ± = √(⅓(1 ± (1−9p)/s))` with `s = √(1+36p)`.
pub fn coefficients(p: f64) -> Coefficients {
    let s = (1.0 + 36.0 * p).sqrt();
    let phi = |sign: f64| (0.5 * (1.0 + sign * (1.0 + 6.0 * p) / s)).max(0.0).sqrt();
    let psi = |sign: f64| ((1.0 + sign * (1.0 - 9.0 * p) / s) / 3.0).max(0.0).sqrt();
    Coefficients { phi_plus: phi(1.0), phi_minus: phi(-1.0), psi_plus: psi(1.0), psi_minus: psi(-1.0) }
}

/// Beam-splitter angles used by the optical networks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NetworkAngles {
    /// `arccos √p`.
    pub theta_p: f64,
    /// `arccos √(1/3)`.
    pub theta_third: f64,
    /// `arccos(√(3/2) ψ₊)`.
    pub theta_psi: f64,
    /// `arccos φ₊`.
    pub theta_phi: f64,
}

/// Evaluated as `atan2(sin, cos)` of the amplitude pairs, which keeps the angles
/// accurate where the cosine approaches 1.
pub fn network_angles(p: f64) -> NetworkAngles {
    let c = coefficients(p);
    let p = p.clamp(0.0, 1.0);
    NetworkAngles {
        theta_p: (1.0 - p).sqrt().atan2(p.sqrt()),
        theta_third: 2f64.sqrt().atan2(1.0),
        theta_psi: c.psi_minus.atan2(c.psi_plus),
        theta_phi: c.phi_minus.atan2(c.phi_plus),
    }
}

/// `ρ_MEMS` with corners `g/2`, coherence `p/2` and `⟨01|ρ|01⟩ = 1 − g`.
pub fn mems_state(p: f64) -> Result<DensityMatrix2> {
    let params = MemsParams::new(p)?;
    let g = params.g;
    let mut r = Mat4::zeros();
    r[(0, 0)] = re(g / 2.0);
    r[(3, 3)] = re(g / 2.0);
    r[(0, 3)] = re(p / 2.0);
    r[(3, 0)] = re(p / 2.0);
    r[(1, 1)] = re(1.0 - g);
    Ok(DensityMatrix2::new_unchecked(r))
}

/// The two real Mueller matrices sending the singlet to `ρ_MEMS(p)`.
pub fn mueller_pair_real(p: f64) -> Result<(MuellerReal, MuellerReal)> {
    let g = MemsParams::new(p)?.g;
    let s = p.sqrt();
    #[rustfmt::skip]
    let m_a = Matrix4::new(
        1.0,     0.0, 0.0, 0.0,
        0.0,     s,   0.0, 0.0,
        0.0,     0.0, s,   0.0,
        1.0 - g, 0.0, 0.0, g,
    );
    #[rustfmt::skip]
    let m_b = Matrix4::new(
        1.0,     0.0, 0.0, 0.0,
        0.0,     -s,  0.0, 0.0,
        0.0,     0.0, s,   0.0,
        g - 1.0, 0.0, 0.0, -g,
    );
    Ok((MuellerReal::new(m_a), MuellerReal::new(m_b)))
}

/// `√λ A` and `√λ B` operators in closed form. At `p = 1` some of them vanish.
pub fn scaled_kraus_operators(p: f64) -> Result<(Vec<Mat2>, Vec<Mat2>)> {
    let params = MemsParams::new(p)?;
    let m = |a: f64, b: f64, c: f64, d: f64| Mat2::new(re(a), re(b), re(c), re(d));
    Ok(match params.region {
        Region::I => {
            let (q, s) = ((1.0 - p).sqrt(), p.sqrt());
            (
                vec![m(0.0, q, 0.0, 0.0), m(1.0, 0.0, 0.0, s)],
                vec![m(0.0, 0.0, 0.0, q), m(0.0, -s, 1.0, 0.0)],
            )
        }
        Region::II => {
            let c = coefficients(p);
            let t = (1.0_f64 / 3.0).sqrt();
            (
                vec![
                    m(0.0, t, 0.0, 0.0),
                    m(-c.phi_minus, 0.0, 0.0, c.psi_plus),
                    m(c.phi_plus, 0.0, 0.0, c.psi_minus),
                ],
                vec![
                    m(0.0, 0.0, 0.0, t),
                    m(0.0, c.psi_plus, c.phi_minus, 0.0),
                    m(0.0, -c.psi_minus, c.phi_plus, 0.0),
                ],
            )
        }
    })
}

/// Closed-form Kraus sets for both sides.
pub fn mems_kraus(p: f64) -> Result<(KrausSet, KrausSet)> {
    let (a, b) = scaled_kraus_operators(p)?;
    Ok((KrausSet::from_scaled_operators(&a), KrausSet::from_scaled_operators(&b)))
}

/// Spectrum of `H_A` (equal to that of `H_B`), sorted descending:
/// `{1+p, 1−p, 0, 0}` in region I and `{(5+s)/6, 1/3, (5−s)/6, 0}` in region II.
pub fn expected_spectrum(p: f64) -> Result<[f64; 4]> {
    let params = MemsParams::new(p)?;
    let mut v = match params.region {
        Region::I => [1.0 + p, 1.0 - p, 0.0, 0.0],
        Region::II => {
            let s = (1.0 + 36.0 * p).sqrt();
            [(5.0 + s) / 6.0, 1.0 / 3.0, (5.0 - s) / 6.0, 0.0]
        }
    };
    v.sort_by(|a, b| b.total_cmp(a));
    Ok(v)
}

/// Mueller pair, closed-form Kraus sets and the shared spectrum.
#[derive(Clone, Debug)]
pub struct MemsMapPair {
    pub params: MemsParams,
    pub m_a: MuellerReal,
    pub m_b: MuellerReal,
    pub kraus_a: KrausSet,
    pub kraus_b: KrausSet,
    pub spectrum: [f64; 4],
}

pub fn mems_mueller_pair(p: f64) -> Result<MemsMapPair> {
    let params = MemsParams::new(p)?;
    let (m_a, m_b) = mueller_pair_real(p)?;
    let (kraus_a, kraus_b) = mems_kraus(p)?;
    Ok(MemsMapPair { params, m_a, m_b, kraus_a, kraus_b, spectrum: expected_spectrum(p)? })
}

/// Polarizance vectors and `W` blocks of the pair.
pub fn block_parts(pair: &MemsMapPair) -> (Vector3<f64>, Vector3<f64>, Matrix3<f64>, Matrix3<f64>) {
    (pair.m_a.polarizance(), pair.m_b.polarizance(), pair.m_a.block_w(), pair.m_b.block_w())
}

/// Largest deviations of the constructed output from the targets. All fields are
/// maximum absolute entrywise errors except `tangle`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MemsReport {
    pub p: f64,
    pub region: Region,
    pub g: f64,
    pub state_error: f64,
    pub reduced_a_error: f64,
    pub reduced_b_error: f64,
    pub imaginary_part: f64,
    pub output_trace: f64,
    pub spectrum_error_a: f64,
    pub spectrum_error_b: f64,
    pub kraus_reconstruction_error: f64,
    pub kraus_trace_error: f64,
    pub kraus_unital_error: f64,
    pub physical: bool,
    pub trace_preserving: bool,
    pub unital: bool,
    pub tangle: f64,
    pub tangle_error: f64,
}

impl MemsReport {
    /// Largest of the error fields.
    pub fn max_error(&self) -> f64 {
        [
            self.state_error,
            self.reduced_a_error,
            self.reduced_b_error,
            self.imaginary_part,
            (self.output_trace - 1.0).abs(),
            self.spectrum_error_a,
            self.spectrum_error_b,
            self.kraus_reconstruction_error,
            self.kraus_trace_error,
            self.kraus_unital_error,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// All errors within `tol`, both maps physical and trace-preserving, and
    /// non-unital exactly when the polarizance `1 − g` is nonzero.
    pub fn passed(&self, tol: f64) -> bool {
        let unital_expected = 1.0 - self.g <= crate::cloude::CLASSIFY_TOL;
        self.max_error() <= tol && self.physical && self.trace_preserving && self.unital == unital_expected
    }
}

fn spectrum_error(got: [f64; 4], want: [f64; 4]) -> f64 {
    got.iter().zip(want).map(|(g, w)| (g - w).abs()).fold(0.0, f64::max)
}

/// Runs the full pipeline for one `p` and collects the deviations.
pub fn verify_mems(p: f64) -> Result<MemsReport> {
    let pair = mems_mueller_pair(p)?;
    let (a, b) = (pair.m_a.to_std(), pair.m_b.to_std());
    let (out, tr) = apply_bilocal(&a, &b, &singlet())?;
    let target = mems_state(p)?;
    let g = pair.params.g;

    let red_a = Mat2::new(re(1.0 - g / 2.0), re(0.0), re(0.0), re(g / 2.0));
    let red_b = Mat2::new(re(g / 2.0), re(0.0), re(0.0), re(1.0 - g / 2.0));
    let imaginary_part = out.r.iter().map(|z| z.im.abs()).fold(0.0, f64::max);

    let recon = max_abs_diff(&pair.kraus_a.reconstruct().m, &a.m)
        .max(max_abs_diff(&pair.kraus_b.reconstruct().m, &b.m));
    let trace_err = max_abs_diff(&pair.kraus_a.trace_condition(), &Mat2::identity())
        .max(max_abs_diff(&pair.kraus_b.trace_condition(), &Mat2::identity()));
    let unital_err = max_abs_diff(&pair.kraus_a.unital_condition(), &unital_target(g, false))
        .max(max_abs_diff(&pair.kraus_b.unital_condition(), &unital_target(g, true)));

    // the numerical decomposition must generate the same channel as the closed form
    let numeric = cloude_decompose(&a)?;
    let recon = recon.max(max_abs_diff(&numeric.reconstruct().m, &a.m));

    let cls_a = classify(&a);
    let cls_b = classify(&b);
    let (_, tangle) = concurrence_tangle(&out);
    Ok(MemsReport {
        p,
        region: pair.params.region,
        g,
        state_error: max_abs_diff(&out.r, &target.r),
        reduced_a_error: max_abs_diff(&partial_trace(&out.r, Qubit::A), &red_a),
        reduced_b_error: max_abs_diff(&partial_trace(&out.r, Qubit::B), &red_b),
        imaginary_part,
        output_trace: tr,
        spectrum_error_a: spectrum_error(spectrum(&a), pair.spectrum),
        spectrum_error_b: spectrum_error(spectrum(&b), pair.spectrum),
        kraus_reconstruction_error: recon,
        kraus_trace_error: trace_err,
        kraus_unital_error: unital_err,
        physical: cls_a.physical && cls_b.physical,
        trace_preserving: cls_a.trace_preserving && cls_b.trace_preserving,
        unital: cls_a.unital || cls_b.unital,
        tangle,
        tangle_error: (tangle - p * p).abs(),
    })
}

/// `Σ λ K K†`: `diag(2−g, g)` on side A, `diag(g, 2−g)` on side B.
fn unital_target(g: f64, side_b: bool) -> Mat2 {
    let (x, y) = if side_b { (g, 2.0 - g) } else { (2.0 - g, g) };
    Mat2::new(re(x), re(0.0), re(0.0), re(y))
}
