//! Mixedness and entanglement of two-qubit states, Werner-family generators and
//! the dichroic-scatterer Monte Carlo.
//!
//! Conventions: linear entropy `S_L = 4/3 (1 − Tr ρ²)` and Wootters concurrence
//! `C = max(0, λ1 − λ2 − λ3 − λ4)`, where `λ` are the square roots of the
//! eigenvalues of `ρ ρ̃` with `ρ̃ = (Y⊗Y) ρ* (Y⊗Y)`. The tangle is `τ = C²`.
//! The Werner curve is the parametric curve `(S_L, τ)` of `p ρ_s + (1−p) I/4`,
//! which in closed form reads `τ = max(0, (3√(1−S_L) − 1)/2)²`.

use std::f64::consts::TAU;
use std::io::Write;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::eigen::hermitian_eigen;
use crate::linalg::{kron2, re, Mat2, Mat4};
use crate::mueller::{diattenuator, JonesMatrix};
use crate::qmaps::{partial_trace, singlet, DensityMatrix2, Qubit};
use crate::stokes::pauli;
use crate::{Error, Result, C64, EPS_NUM};

/// Eigenvalues of `ρ` below this (relative to the trace) are treated as exact zeros
/// when computing the concurrence, which is otherwise √-sensitive to round-off.
const RANK_TOL: f64 = 1e-13;

/// Tolerance separating on-curve from off-curve samples in [`ScatterClass`].
pub const CLASS_TOL: f64 = 1e-9;

/// `4/3 (1 − Tr ρ²)`.
pub fn linear_entropy(r: &DensityMatrix2) -> f64 {
    (4.0 / 3.0) * (1.0 - r.purity())
}

/// Wootters concurrence.
///
/// The state is written as `ρ = W W†` from its eigen-decomposition, dropping
/// eigenvalues below round-off, and the `λ` are the singular values of
/// `Wᵀ (Y⊗Y) W`.
pub fn concurrence(r: &DensityMatrix2) -> f64 {
    let e = hermitian_eigen(&r.r);
    let scale = e.values.iter().map(|x| x.abs()).sum::<f64>().max(f64::MIN_POSITIVE);
    let kept: Vec<usize> = (0..4).filter(|&k| e.values[k] > RANK_TOL * scale).collect();
    if kept.is_empty() {
        return 0.0;
    }
    let w = DMatrix::<C64>::from_fn(4, kept.len(), |row, col| {
        let k = kept[col];
        e.vectors[(row, k)] * e.values[k].sqrt()
    });
    let yy = kron2(&pauli(2), &pauli(2));
    let yy = DMatrix::<C64>::from_fn(4, 4, |i, j| yy[(i, j)]);
    let tau = w.transpose() * yy * &w;
    let mut s: Vec<f64> = tau.singular_values().iter().copied().collect();
    s.resize(4, 0.0);
    s.sort_by(|a, b| b.total_cmp(a));
    (s[0] - s[1] - s[2] - s[3]).clamp(0.0, 1.0)
}

/// `(C, τ)`.
pub fn concurrence_tangle(r: &DensityMatrix2) -> (f64, f64) {
    let c = concurrence(r);
    (c, c * c)
}

fn check_unit(name: &'static str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::OutOfRange { name, value: v, range: "[0, 1]" });
    }
    Ok(())
}

/// `p ρ_s + (1 − p) I/4` for `p ∈ [0, 1]`.
pub fn werner_state(p: f64) -> Result<DensityMatrix2> {
    check_unit("p", p)?;
    Ok(DensityMatrix2::new_unchecked(
        singlet().r * re(p) + Mat4::identity() * re((1.0 - p) / 4.0),
    ))
}

/// Tangle of the Werner state with linear entropy `s_l`.
pub fn werner_tangle_at(s_l: f64) -> f64 {
    let c = ((3.0 * (1.0 - s_l).max(0.0).sqrt() - 1.0) / 2.0).max(0.0);
    c * c
}

/// `(T_U ⊗ I) ρ_W(p) (T_U ⊗ I)†`.
pub fn generalized_werner(p: f64, t_u: &JonesMatrix) -> Result<DensityMatrix2> {
    let defect = t_u.unitarity_defect();
    if defect > 1e-10 {
        return Err(Error::NonUnitary(defect));
    }
    let w = werner_state(p)?;
    let u = kron2(&t_u.t, &Mat2::identity());
    Ok(DensityMatrix2::new_unchecked(u * w.r * u.adjoint()))
}

/// Werner state after a diattenuator on qubit A, normalized, with `Tr ρ̃ = (d0² + d1²)/2`.
pub fn dichroic_sample(p: f64, d0: f64, d1: f64, theta: f64) -> Result<(DensityMatrix2, f64)> {
    check_unit("p", p)?;
    let t = diattenuator(d0, d1, theta)?;
    let w = werner_state(p)?;
    let k = kron2(&t.t, &Mat2::identity());
    let out = k * w.r * k.adjoint();
    let tr = out.trace().re;
    if tr <= EPS_NUM {
        return Err(Error::TotalAbsorption(tr));
    }
    Ok((DensityMatrix2::new_unchecked(out / re(tr)), tr))
}

/// Reduced state of qubit B after the dichroic scatterer, in closed form:
/// `X0/2 − p (d0² − d1²)/(d0² + d1²) (X1 sin2θ + X3 cos2θ)/2`.
pub fn dichroic_reduced_b_closed_form(p: f64, d0: f64, d1: f64, theta: f64) -> Mat2 {
    let k = p * (d0 * d0 - d1 * d1) / (d0 * d0 + d1 * d1);
    let (s, c) = (2.0 * theta).sin_cos();
    pauli(0) * re(0.5) - (pauli(1) * re(s) + pauli(3) * re(c)) * re(k / 2.0)
}

/// Reduced state of qubit B computed from the full output.
pub fn dichroic_reduced_b(p: f64, d0: f64, d1: f64, theta: f64) -> Result<Mat2> {
    let (r, _) = dichroic_sample(p, d0, d1, theta)?;
    Ok(partial_trace(&r.r, Qubit::B))
}

/// Position of a sample in the tangle/linear-entropy plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScatterClass {
    /// Non-dichroic draw (`d0 = d1`): the output is exactly a Werner state.
    Werner,
    /// On the Werner curve without being a Werner state.
    GeneralizedWerner,
    /// Strictly below the Werner curve.
    SubWerner,
    /// Above the Werner curve.
    Other,
}

impl ScatterClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Werner => "werner",
            Self::GeneralizedWerner => "generalized_werner",
            Self::SubWerner => "sub_werner",
            Self::Other => "other",
        }
    }

    pub fn is_werner_family(&self) -> bool {
        matches!(self, Self::Werner | Self::GeneralizedWerner)
    }
}

/// One Monte Carlo draw and its metrics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScatterSample {
    pub index: u64,
    pub p: f64,
    pub d0: f64,
    pub d1: f64,
    pub theta: f64,
    pub linear_entropy: f64,
    pub tangle: f64,
    pub class: ScatterClass,
}

fn classify_point(d0: f64, d1: f64, s_l: f64, tangle: f64) -> ScatterClass {
    let curve = werner_tangle_at(s_l);
    if (d0 - d1).abs() <= CLASS_TOL {
        ScatterClass::Werner
    } else if (tangle - curve).abs() <= CLASS_TOL {
        ScatterClass::GeneralizedWerner
    } else if tangle < curve {
        ScatterClass::SubWerner
    } else {
        ScatterClass::Other
    }
}

/// Metrics of the dichroic output for explicit parameters.
pub fn scatter_sample(index: u64, p: f64, d0: f64, d1: f64, theta: f64) -> Result<ScatterSample> {
    let (r, _) = dichroic_sample(p, d0, d1, theta)?;
    let s_l = linear_entropy(&r).clamp(0.0, 1.0);
    let (_, tangle) = concurrence_tangle(&r);
    Ok(ScatterSample {
        index,
        p,
        d0,
        d1,
        theta,
        linear_entropy: s_l,
        tangle,
        class: classify_point(d0, d1, s_l, tangle),
    })
}

/// Draw `index` of the stream for `seed`: `p, d0, d1` uniform on `(0, 1]` and
/// `θ` uniform on `(0, 2π]`. Independent of thread count and evaluation order.
pub fn draw(seed: u64, index: u64) -> (f64, f64, f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut unit = || 1.0 - rng.random::<f64>();
    let (p, d0, d1) = (unit(), unit(), unit());
    (p, d0, d1, TAU * unit())
}

/// `n` seeded samples of the dichroic scatterer acting on Werner states.
pub fn monte_carlo_dichroic(n: usize, seed: u64) -> Vec<ScatterSample> {
    (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let (p, d0, d1, theta) = draw(seed, i);
            scatter_sample(i, p, d0, d1, theta).expect("draws lie in (0, 1], so the trace is positive")
        })
        .collect()
}

/// Shortest round-trip decimal form.
fn fmt(x: f64) -> String {
    format!("{x}")
}

pub fn write_scatter_csv<W: Write>(samples: &[ScatterSample], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "p", "d0", "d1", "theta", "linear_entropy", "tangle", "class"])?;
    for s in samples {
        w.write_record([
            s.index.to_string(),
            fmt(s.p),
            fmt(s.d0),
            fmt(s.d1),
            fmt(s.theta),
            fmt(s.linear_entropy),
            fmt(s.tangle),
            s.class.as_str().to_string(),
        ])?;
    }
    w.flush()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveLabel {
    Werner,
    Mems,
}

impl CurveLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Werner => "werner",
            Self::Mems => "mems",
        }
    }
}

/// Points `(p, S_L, τ)` on a uniform `p` grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryCurve {
    pub label: CurveLabel,
    pub points: Vec<(f64, f64, f64)>,
}

/// Werner and MEMS curves on `grid` equally spaced values of `p ∈ [0, 1]`.
pub fn boundary_curves(grid: usize) -> Result<(BoundaryCurve, BoundaryCurve)> {
    if grid < 2 {
        return Err(Error::OutOfRange { name: "grid", value: grid as f64, range: "[2, ∞)" });
    }
    let ps: Vec<f64> = (0..grid).map(|k| k as f64 / (grid - 1) as f64).collect();
    let point = |r: DensityMatrix2, p: f64| (p, linear_entropy(&r).clamp(0.0, 1.0), concurrence_tangle(&r).1);
    let werner = ps
        .iter()
        .map(|&p| Ok(point(werner_state(p)?, p)))
        .collect::<Result<Vec<_>>>()?;
    let mems = ps
        .iter()
        .map(|&p| Ok(point(crate::mems::mems_state(p)?, p)))
        .collect::<Result<Vec<_>>>()?;
    Ok((
        BoundaryCurve { label: CurveLabel::Werner, points: werner },
        BoundaryCurve { label: CurveLabel::Mems, points: mems },
    ))
}

pub fn write_curves_csv<W: Write>(curves: &[BoundaryCurve], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["curve", "p", "linear_entropy", "tangle"])?;
    for c in curves {
        for &(p, s, t) in &c.points {
            w.write_record([c.label.as_str().to_string(), fmt(p), fmt(s), fmt(t)])?;
        }
    }
    w.flush()
}
