//! Minkowski space ℝ^{d+2,1}, the hyperquadric of unit space-like vectors and
//! its submanifold of oriented affine hyperplanes of ℝ^d.
//!
//! An oriented hyperplane `n · x = c` with `|n| = 1` is stored as `(n, c)`; its
//! Minkowski form `(n, c, c)` is produced on demand by [`HyperplanePoint::embed`].
//! The last two coordinates cancel in the Lorentzian norm, so every embedded
//! hyperplane has norm exactly one.

use nalgebra::DVector;

use crate::error::{GeomError, Result};

/// Homogeneous coordinates whose spatial part is shorter than this are treated
/// as the point at infinity.
pub const INFINITY_THRESHOLD: f64 = 1e-12;

/// A vector of ℝ^{d+2,1} carrying the index-1 inner product.
#[derive(Debug, Clone, PartialEq)]
pub struct MinkowskiVector(DVector<f64>);

impl MinkowskiVector {
    pub fn new(coords: DVector<f64>) -> Result<Self> {
        // d + 2 coordinates with d >= 2
        if coords.len() < 4 {
            return Err(GeomError::DimensionTooSmall(coords.len().saturating_sub(2)));
        }
        Ok(Self(coords))
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(coords))
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DVector<f64> {
        self.0
    }

    /// Hyperplane dimension `d` (the vector has `d + 2` coordinates).
    pub fn ambient_dim(&self) -> usize {
        self.0.len() - 2
    }

    pub fn inner(&self, other: &MinkowskiVector) -> Result<f64> {
        lorentz_inner(self, other)
    }

    /// Lorentzian squared norm `⟨v, v⟩_L`.
    pub fn norm_sq(&self) -> f64 {
        lorentz_dot(&self.0, &self.0)
    }

    /// Euclidean norm of the raw coordinates.
    pub fn euclidean_norm(&self) -> f64 {
        self.0.norm()
    }
}

/// `Σ_{i ≤ d+1} v_i w_i − v_{d+2} w_{d+2}`.
pub fn lorentz_inner(v: &MinkowskiVector, w: &MinkowskiVector) -> Result<f64> {
    if v.0.len() != w.0.len() {
        return Err(GeomError::DimensionMismatch {
            expected: v.0.len(),
            found: w.0.len(),
        });
    }
    Ok(lorentz_dot(&v.0, &w.0))
}

pub(crate) fn lorentz_dot(v: &DVector<f64>, w: &DVector<f64>) -> f64 {
    let last = v.len() - 1;
    // pair the last two terms first so that (n, c, c) cancels exactly
    let tail = v[last - 1] * w[last - 1] - v[last] * w[last];
    v.rows(0, last - 1).dot(&w.rows(0, last - 1)) + tail
}

/// An oriented affine hyperplane `normal · x = offset` of ℝ^d.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperplanePoint {
    normal: DVector<f64>,
    offset: f64,
}

impl HyperplanePoint {
    /// Builds a hyperplane, rescaling `normal` to unit length.
    pub fn new(normal: DVector<f64>, offset: f64) -> Result<Self> {
        if normal.len() < 2 {
            return Err(GeomError::DimensionTooSmall(normal.len()));
        }
        let len = normal.norm();
        if !(len > 0.0) || !len.is_finite() {
            return Err(GeomError::ZeroNormal);
        }
        Ok(Self {
            normal: normal / len,
            offset,
        })
    }

    pub fn from_slice(normal: &[f64], offset: f64) -> Result<Self> {
        Self::new(DVector::from_column_slice(normal), offset)
    }

    /// Stores `normal` verbatim. Callers guarantee unit length up to round-off.
    pub(crate) fn from_parts_unchecked(normal: DVector<f64>, offset: f64) -> Self {
        Self { normal, offset }
    }

    pub fn normal(&self) -> &DVector<f64> {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Dimension `d` of the ambient space the hyperplane lives in.
    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    /// Minkowski form `(n, c, c)`.
    pub fn embed(&self) -> MinkowskiVector {
        let d = self.dim();
        let mut v = DVector::zeros(d + 2);
        v.rows_mut(0, d).copy_from(&self.normal);
        v[d] = self.offset;
        v[d + 1] = self.offset;
        MinkowskiVector(v)
    }

    /// Signed distance-like residual `n · x − c`.
    pub fn residual(&self, x: &DVector<f64>) -> f64 {
        self.normal.dot(x) - self.offset
    }
}

/// Tangent hyperplane at `point` with normal direction `unit_normal`.
///
/// The normal is renormalized, so any positive rescaling gives the same result.
pub fn lorentz_map(point: &DVector<f64>, unit_normal: &DVector<f64>) -> Result<HyperplanePoint> {
    if point.len() != unit_normal.len() {
        return Err(GeomError::DimensionMismatch {
            expected: unit_normal.len(),
            found: point.len(),
        });
    }
    let plane = HyperplanePoint::new(unit_normal.clone(), 0.0)?;
    let offset = plane.normal.dot(point);
    Ok(HyperplanePoint { offset, ..plane })
}

/// A point `⟨y_1, …, y_{d+1}⟩` of the dual projective space, off the point at
/// infinity `⟨0, …, 0, 1⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualProjectivePoint {
    homogeneous: DVector<f64>,
}

impl DualProjectivePoint {
    pub fn new(homogeneous: DVector<f64>) -> Result<Self> {
        if homogeneous.len() < 3 {
            return Err(GeomError::DimensionTooSmall(homogeneous.len().saturating_sub(1)));
        }
        let d = homogeneous.len() - 1;
        if homogeneous.rows(0, d).norm() < INFINITY_THRESHOLD {
            return Err(GeomError::PointAtInfinity(d));
        }
        Ok(Self { homogeneous })
    }

    pub fn from_slice(homogeneous: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(homogeneous))
    }

    pub fn homogeneous(&self) -> &DVector<f64> {
        &self.homogeneous
    }

    pub fn dim(&self) -> usize {
        self.homogeneous.len() - 1
    }

    /// True when both represent the same projective point, i.e. the
    /// coordinates agree up to a nonzero scale within `tol` after
    /// normalization.
    pub fn same_point(&self, other: &Self, tol: f64) -> bool {
        if self.homogeneous.len() != other.homogeneous.len() {
            return false;
        }
        let a = self.homogeneous.normalize();
        let b = other.homogeneous.normalize();
        (&a - &b).norm() < tol || (&a + &b).norm() < tol
    }
}

/// Dual projective coordinates to hyperplanes: `⟨(a, −c)⟩ ↦ (a/|a|, c/|a|)`.
///
/// The sign of the offset is chosen so that `nu_map(nu_inverse(z)) = z`,
/// i.e. `ν ∘ δ` equals the Lorentz map.
pub fn nu_map(p: &DualProjectivePoint) -> Result<HyperplanePoint> {
    let d = p.dim();
    let spatial = p.homogeneous.rows(0, d);
    let len = spatial.norm();
    if len < INFINITY_THRESHOLD {
        return Err(GeomError::PointAtInfinity(d));
    }
    let scale = 1.0 / len;
    Ok(HyperplanePoint {
        normal: spatial * scale,
        offset: -p.homogeneous[d] * scale,
    })
}

/// `(n, c) ↦ ⟨(n_1, …, n_d, −c)⟩`.
pub fn nu_inverse(z: &HyperplanePoint) -> DualProjectivePoint {
    let d = z.dim();
    let mut h = DVector::zeros(d + 1);
    h.rows_mut(0, d).copy_from(&z.normal);
    h[d] = -z.offset;
    DualProjectivePoint { homogeneous: h }
}
