//! JSON matrix documents.
//!
//! A document is `{"kind": ..., "data": [[...], ...]}` with row-major nested
//! arrays. Scalars are plain numbers or `[re, im]` pairs. Numbers are written
//! with shortest round-trip formatting, so parse ∘ serialize is lossless.

use std::path::Path;

use nalgebra::{Matrix4, SMatrix};
use serde::{Deserialize, Serialize};

use crate::linalg::{c, Mat4};
use crate::mueller::{JonesMatrix, MuellerReal, MuellerStd};
use crate::qmaps::{DensityMatrix1, DensityMatrix2};
use crate::{Error, Result, C64};

/// Largest imaginary part tolerated in a real-valued document.
pub const IMAG_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixKind {
    Jones,
    MuellerStd,
    MuellerReal,
    Density1,
    Density2,
}

impl MatrixKind {
    pub fn dim(self) -> usize {
        match self {
            MatrixKind::Jones | MatrixKind::Density1 => 2,
            _ => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MatrixKind::Jones => "jones",
            MatrixKind::MuellerStd => "mueller_std",
            MatrixKind::MuellerReal => "mueller_real",
            MatrixKind::Density1 => "density1",
            MatrixKind::Density2 => "density2",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Real(f64),
    Complex([f64; 2]),
}

impl Scalar {
    pub fn value(self) -> C64 {
        match self {
            Scalar::Real(x) => c(x, 0.0),
            Scalar::Complex([x, y]) => c(x, y),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDocument {
    pub kind: MatrixKind,
    pub data: Vec<Vec<Scalar>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TypedMatrix {
    Jones(JonesMatrix),
    MuellerStd(MuellerStd),
    MuellerReal(MuellerReal),
    Density1(DensityMatrix1),
    Density2(DensityMatrix2),
}

impl TypedMatrix {
    pub fn kind(&self) -> MatrixKind {
        match self {
            TypedMatrix::Jones(_) => MatrixKind::Jones,
            TypedMatrix::MuellerStd(_) => MatrixKind::MuellerStd,
            TypedMatrix::MuellerReal(_) => MatrixKind::MuellerReal,
            TypedMatrix::Density1(_) => MatrixKind::Density1,
            TypedMatrix::Density2(_) => MatrixKind::Density2,
        }
    }

    /// Either Mueller form, in the standard basis.
    pub fn as_mueller_std(&self) -> Option<MuellerStd> {
        match self {
            TypedMatrix::MuellerStd(m) => Some(*m),
            TypedMatrix::MuellerReal(m) => Some(m.to_std()),
            TypedMatrix::Jones(t) => Some(crate::mueller::mueller_from_jones(t).0),
            _ => None,
        }
    }
}

fn shape_error(kind: MatrixKind, got: String) -> Error {
    let expected = if kind.dim() == 2 { "2x2" } else { "4x4" };
    Error::Shape { kind: kind.as_str(), expected, got }
}

fn to_matrix<const N: usize>(doc: &MatrixDocument) -> Result<SMatrix<C64, N, N>> {
    if doc.data.len() != N {
        return Err(shape_error(doc.kind, format!("{} rows", doc.data.len())));
    }
    let mut m = SMatrix::<C64, N, N>::zeros();
    for (i, row) in doc.data.iter().enumerate() {
        if row.len() != N {
            return Err(shape_error(doc.kind, format!("row {i} has {} entries", row.len())));
        }
        for (j, s) in row.iter().enumerate() {
            let z = s.value();
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite);
            }
            m[(i, j)] = z;
        }
    }
    Ok(m)
}

fn to_real4(m: &Mat4) -> Result<Matrix4<f64>> {
    let worst = m.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if worst > IMAG_TOL {
        return Err(Error::ImaginaryResidue(worst));
    }
    Ok(m.map(|z| z.re))
}

/// Decodes and validates a document. Density matrices must be physical states.
pub fn parse_matrix(doc: &MatrixDocument) -> Result<TypedMatrix> {
    Ok(match doc.kind {
        MatrixKind::Jones => TypedMatrix::Jones(JonesMatrix::new(to_matrix::<2>(doc)?)),
        MatrixKind::MuellerStd => TypedMatrix::MuellerStd(MuellerStd::new(to_matrix::<4>(doc)?)),
        MatrixKind::MuellerReal => TypedMatrix::MuellerReal(MuellerReal::new(to_real4(&to_matrix::<4>(doc)?)?)),
        MatrixKind::Density1 => TypedMatrix::Density1(DensityMatrix1::new(to_matrix::<2>(doc)?)?),
        MatrixKind::Density2 => TypedMatrix::Density2(DensityMatrix2::new(to_matrix::<4>(doc)?)?),
    })
}

fn rows<const N: usize>(m: &SMatrix<C64, N, N>, real: bool) -> Vec<Vec<Scalar>> {
    (0..N)
        .map(|i| {
            (0..N)
                .map(|j| {
                    let z = m[(i, j)];
                    if real {
                        Scalar::Real(z.re)
                    } else {
                        Scalar::Complex([z.re, z.im])
                    }
                })
                .collect()
        })
        .collect()
}

pub fn serialize_matrix(m: &TypedMatrix) -> MatrixDocument {
    let data = match m {
        TypedMatrix::Jones(t) => rows(&t.t, false),
        TypedMatrix::MuellerStd(s) => rows(&s.m, false),
        TypedMatrix::MuellerReal(r) => rows(&crate::linalg::complexify(&r.m), true),
        TypedMatrix::Density1(d) => rows(&d.r, false),
        TypedMatrix::Density2(d) => rows(&d.r, false),
    };
    MatrixDocument { kind: m.kind(), data }
}

/// Complex 2×2 or 4×4 matrix as `[re, im]` nested arrays, for report output.
pub fn complex_rows<const N: usize>(m: &SMatrix<C64, N, N>) -> Vec<Vec<[f64; 2]>> {
    (0..N).map(|i| (0..N).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

pub fn parse_str(s: &str) -> Result<TypedMatrix> {
    let doc: MatrixDocument = serde_json::from_str(s).map_err(|e| Error::Document(e.to_string()))?;
    parse_matrix(&doc)
}

pub fn to_json(m: &TypedMatrix) -> String {
    serde_json::to_string(&serialize_matrix(m)).expect("matrix documents always serialize")
}

/// Reads a document from disk. I/O failures are returned separately from
/// decoding failures so callers can tell them apart.
pub fn read_matrix(path: &Path) -> std::io::Result<Result<TypedMatrix>> {
    let s = std::fs::read_to_string(path)?;
    Ok(parse_str(&s))
}
