//! Closed-form Lorentzian geodesics between oriented hyperplanes, the extended
//! Poincaré action on hyperplanes, and the special flows built from them.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector};

use crate::error::{GeomError, Result};
use crate::lorentz::{HyperplanePoint, MinkowskiVector};
use crate::weights::{lambda_unchecked, mu_fn, TAU_SMALL};

/// Segments whose normals satisfy `n0 · n1 ≤ −1 + ANTIPODAL_MARGIN` are rejected.
pub const ANTIPODAL_MARGIN: f64 = 1e-9;

/// A geodesic of the hyperquadric joining two hyperplanes.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicSegment {
    z0: HyperplanePoint,
    z1: HyperplanePoint,
    theta: f64,
}

/// A point of a segment together with whether `t` left `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicSample {
    pub t: f64,
    pub plane: HyperplanePoint,
    pub extrapolated: bool,
}

impl GeodesicSegment {
    pub fn new(z0: HyperplanePoint, z1: HyperplanePoint) -> Result<Self> {
        if z0.dim() != z1.dim() {
            return Err(GeomError::DimensionMismatch {
                expected: z0.dim(),
                found: z1.dim(),
            });
        }
        let dot = z0.normal().dot(z1.normal());
        if dot <= -1.0 + ANTIPODAL_MARGIN {
            return Err(GeomError::AntipodalNormals { dot });
        }
        let theta = dot.clamp(-1.0, 1.0).acos();
        Ok(Self { z0, z1, theta })
    }

    pub fn start(&self) -> &HyperplanePoint {
        &self.z0
    }

    pub fn end(&self) -> &HyperplanePoint {
        &self.z1
    }

    /// Angle between the normals, in `[0, π)`. Also the Lorentzian length.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn dim(&self) -> usize {
        self.z0.dim()
    }

    /// `λ(t, θ) z1 + λ(1 − t, θ) z0`. The normal is not renormalized.
    pub fn point(&self, t: f64) -> HyperplanePoint {
        let a = lambda_unchecked(t, self.theta);
        let b = lambda_unchecked(1.0 - t, self.theta);
        let normal = self.z1.normal() * a + self.z0.normal() * b;
        let offset = a * self.z1.offset() + b * self.z0.offset();
        HyperplanePoint::from_parts_unchecked(normal, offset)
    }

    pub fn sample(&self, t: f64) -> GeodesicSample {
        GeodesicSample {
            t,
            plane: self.point(t),
            extrapolated: !(0.0..=1.0).contains(&t),
        }
    }

    /// `dγ/dt` in Minkowski coordinates, `(dn/dt, dc/dt, dc/dt)`.
    pub fn velocity(&self, t: f64) -> MinkowskiVector {
        let th = self.theta;
        let (da, db) = if th < TAU_SMALL {
            (1.0, -1.0)
        } else {
            let s = th.sin();
            (th * (t * th).cos() / s, -th * ((1.0 - t) * th).cos() / s)
        };
        let dn = self.z1.normal() * da + self.z0.normal() * db;
        let dc = da * self.z1.offset() + db * self.z0.offset();
        embed_tangent(&dn, dc)
    }

    /// Initial velocity `(θ/sin θ)·(n1 − cos θ n0, (c1 − cos θ c0)ε)`,
    /// `(0, (c1 − c0)ε)` for parallel planes.
    pub fn velocity0(&self) -> MinkowskiVector {
        let th = self.theta;
        let n0 = self.z0.normal();
        let n1 = self.z1.normal();
        let (c0, c1) = (self.z0.offset(), self.z1.offset());
        if th < TAU_SMALL {
            return embed_tangent(&DVector::zeros(self.dim()), c1 - c0);
        }
        let cos = n0.dot(n1);
        let scale = th / th.sin();
        let proj = n1 - n0 * cos;
        embed_tangent(&(proj * scale), scale * (c1 - th.cos() * c0))
    }
}

/// `(v, s, s)`; tangent vectors of the hyperplane submanifold have this form.
pub(crate) fn embed_tangent(v: &DVector<f64>, s: f64) -> MinkowskiVector {
    let d = v.len();
    let mut out = DVector::zeros(d + 2);
    out.rows_mut(0, d).copy_from(v);
    out[d] = s;
    out[d + 1] = s;
    MinkowskiVector::new(out).expect("d >= 2")
}

pub fn geodesic_point(seg: &GeodesicSegment, t: f64) -> HyperplanePoint {
    seg.point(t)
}

pub fn geodesic_velocity0(seg: &GeodesicSegment) -> MinkowskiVector {
    seg.velocity0()
}

/// An element `x ↦ b A x + p` of the extended Poincaré group.
#[derive(Debug, Clone, PartialEq)]
pub struct PoincareElement {
    rotation: DMatrix<f64>,
    scale: f64,
    translation: DVector<f64>,
}

impl PoincareElement {
    pub fn new(rotation: DMatrix<f64>, scale: f64, translation: DVector<f64>) -> Result<Self> {
        let d = translation.len();
        if rotation.nrows() != d || rotation.ncols() != d {
            return Err(GeomError::DimensionMismatch {
                expected: d,
                found: rotation.nrows(),
            });
        }
        let defect = (rotation.transpose() * &rotation - DMatrix::identity(d, d)).amax();
        if defect > 1e-10 {
            return Err(GeomError::InvalidPoincare(format!(
                "rotation is not orthogonal (defect {defect:e})"
            )));
        }
        if scale == 0.0 || !scale.is_finite() {
            return Err(GeomError::InvalidPoincare("scale must be nonzero".into()));
        }
        Ok(Self {
            rotation,
            scale,
            translation,
        })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            rotation: DMatrix::identity(d, d),
            scale: 1.0,
            translation: DVector::zeros(d),
        }
    }

    /// Homothety by `scale` followed by translation by `translation`.
    pub fn homothety(scale: f64, translation: DVector<f64>) -> Result<Self> {
        let d = translation.len();
        Self::new(DMatrix::identity(d, d), scale, translation)
    }

    pub fn rotation(&self) -> &DMatrix<f64> {
        &self.rotation
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn translation(&self) -> &DVector<f64> {
        &self.translation
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn apply_point(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.rotation * x * self.scale + &self.translation
    }

    pub fn apply_vector(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.rotation * v * self.scale
    }

    /// Image of the hyperplane `n · x = c`: `(A n, b c + (A n) · p)`.
    pub fn apply(&self, z: &HyperplanePoint) -> HyperplanePoint {
        let n = &self.rotation * z.normal();
        let c = self.scale * z.offset() + n.dot(&self.translation);
        HyperplanePoint::from_parts_unchecked(n, c)
    }
}

pub fn poincare_apply(g: &PoincareElement, z: &HyperplanePoint) -> HyperplanePoint {
    g.apply(z)
}

/// Flow between a hyperplane and its image under `x ↦ b x + p`:
/// parallel planes with `c_t = (1 + (b − 1)t) c0 + t n0 · p`.
pub fn translation_homothety_flow(
    z0: &HyperplanePoint,
    b: f64,
    p: &DVector<f64>,
    t: f64,
) -> Result<HyperplanePoint> {
    if b == 0.0 {
        return Err(GeomError::InvalidPoincare("scale must be nonzero".into()));
    }
    if p.len() != z0.dim() {
        return Err(GeomError::DimensionMismatch {
            expected: z0.dim(),
            found: p.len(),
        });
    }
    let c = (1.0 + (b - 1.0) * t) * z0.offset() + t * z0.normal().dot(p);
    Ok(HyperplanePoint::from_parts_unchecked(z0.normal().clone(), c))
}

/// `arccos(1 + |v|²(cos ω − 1))`: angle between `n0` and its image under a
/// planar rotation by ω, where `v` is the component of `n0` in the rotation plane.
pub fn pseudo_rotation_angle(v_norm_sq: f64, omega: f64) -> Result<f64> {
    let arg = 1.0 + v_norm_sq * (omega.cos() - 1.0);
    if !(-1.0..=1.0).contains(&arg) {
        return Err(GeomError::ArccosDomain(arg));
    }
    Ok(arg.acos())
}

/// A rotation by `omega` in the plane spanned by two orthonormal vectors,
/// fixing the orthogonal complement pointwise.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarRotation {
    e1: DVector<f64>,
    e2: DVector<f64>,
    omega: f64,
}

impl PlanarRotation {
    /// Orthonormalizes `(a, b)` by Gram–Schmidt; rotation goes from `a` toward `b`.
    pub fn new(a: DVector<f64>, b: DVector<f64>, omega: f64) -> Result<Self> {
        if a.len() != b.len() {
            return Err(GeomError::DimensionMismatch {
                expected: a.len(),
                found: b.len(),
            });
        }
        let e1 = a.try_normalize(1e-12).ok_or(GeomError::ZeroNormal)?;
        let e2 = (&b - &e1 * e1.dot(&b))
            .try_normalize(1e-12)
            .ok_or_else(|| GeomError::Invalid("rotation plane is degenerate".into()))?;
        Ok(Self { e1, e2, omega })
    }

    /// Rotation in the `(x_i, x_j)` coordinate plane.
    pub fn coordinate(d: usize, i: usize, j: usize, omega: f64) -> Result<Self> {
        if i >= d || j >= d || i == j {
            return Err(GeomError::Invalid(format!("bad coordinate plane ({i}, {j}) in dimension {d}")));
        }
        let mut a = DVector::zeros(d);
        let mut b = DVector::zeros(d);
        a[i] = 1.0;
        b[j] = 1.0;
        Self::new(a, b, omega)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let d = self.e1.len();
        let (s, c) = self.omega.sin_cos();
        let p = &self.e1 * self.e1.transpose() + &self.e2 * self.e2.transpose();
        let j = &self.e2 * self.e1.transpose() - &self.e1 * self.e2.transpose();
        DMatrix::identity(d, d) - &p + p * c + j * s
    }

    /// Splits `v` into its component in the rotation plane and the fixed part.
    pub fn split(&self, v: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        let inplane = &self.e1 * self.e1.dot(v) + &self.e2 * self.e2.dot(v);
        let fixed = v - &inplane;
        (inplane, fixed)
    }

    pub fn as_poincare(&self) -> PoincareElement {
        PoincareElement {
            rotation: self.matrix(),
            scale: 1.0,
            translation: DVector::zeros(self.e1.len()),
        }
    }
}

/// Geodesic flow from `z0` to its rotated copy `(A n0, c0)`, assembled from
/// the rotation-plane part `λ(t,θ) A v + λ(1−t,θ) v`, the fixed part
/// `μ(1−2t, θ/2) p` and the offset `μ(1−2t, θ/2) c0`.
pub fn pseudo_rotation_flow(
    z0: &HyperplanePoint,
    rotation: &PlanarRotation,
    t: f64,
) -> Result<HyperplanePoint> {
    if rotation.e1.len() != z0.dim() {
        return Err(GeomError::DimensionMismatch {
            expected: z0.dim(),
            found: rotation.e1.len(),
        });
    }
    let (v, p) = rotation.split(z0.normal());
    let rotated_v = rotation.matrix() * &v;
    let dot = z0.normal().dot(&(&rotated_v + &p));
    if dot <= -1.0 + ANTIPODAL_MARGIN {
        return Err(GeomError::AntipodalNormals { dot });
    }
    let theta = pseudo_rotation_angle(v.norm_squared().min(1.0), rotation.omega)?;
    let a = lambda_unchecked(t, theta);
    let b = lambda_unchecked(1.0 - t, theta);
    let bulge = mu_fn(1.0 - 2.0 * t, theta / 2.0)?;
    let normal = rotated_v * a + v * b + p * bulge;
    Ok(HyperplanePoint::from_parts_unchecked(normal, bulge * z0.offset()))
}

/// Offset of the comparison flow through the dual projective space,
/// `tan(t·arctan c1 + (1 − t)·arctan c0)`.
pub fn projective_flow_offset(c0: f64, c1: f64, t: f64) -> Result<f64> {
    let angle = t * c1.atan() + (1.0 - t) * c0.atan();
    if angle.abs() >= FRAC_PI_2 {
        return Err(GeomError::PlaneThroughInfinity(angle));
    }
    Ok(angle.tan())
}

/// Maximum admissible angle for geodesics built from surface data.
pub const MAX_THETA: f64 = PI - 1e-6;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lorentz::lorentz_inner;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_4;

    fn hp(n: &[f64], c: f64) -> HyperplanePoint {
        HyperplanePoint::from_slice(n, c).unwrap()
    }

    #[test]
    fn endpoints_and_midpoint() {
        let seg = GeodesicSegment::new(hp(&[1.0, 0.0], 0.0), hp(&[0.0, 1.0], 0.0)).unwrap();
        assert_abs_diff_eq!(seg.theta(), FRAC_PI_2, epsilon = 1e-15);
        let p0 = seg.point(0.0);
        let p1 = seg.point(1.0);
        assert_abs_diff_eq!((p0.normal() - seg.start().normal()).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((p1.normal() - seg.end().normal()).norm(), 0.0, epsilon = 1e-15);
        let mid = seg.point(0.5);
        let h = 0.5f64.sqrt();
        assert_abs_diff_eq!(mid.normal()[0], h, epsilon = 1e-15);
        assert_abs_diff_eq!(mid.normal()[1], h, epsilon = 1e-15);
        assert_abs_diff_eq!(mid.offset(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn parallel_planes_interpolate_linearly() {
        let seg = GeodesicSegment::new(hp(&[0.0, 0.0, 1.0], 1.0), hp(&[0.0, 0.0, 1.0], 3.0)).unwrap();
        assert_eq!(seg.theta(), 0.0);
        let z = seg.point(0.25);
        assert_abs_diff_eq!(z.offset(), 1.5, epsilon = 1e-15);
        assert_eq!(z.normal()[2], 1.0);
        let v = seg.velocity0();
        assert_eq!(v.coords().as_slice(), &[0.0, 0.0, 0.0, 2.0, 2.0]);
        assert_abs_diff_eq!(v.norm_sq(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn antipodal_rejected() {
        let err = GeodesicSegment::new(hp(&[1.0, 0.0], 0.0), hp(&[-1.0, 0.0], 1.0)).unwrap_err();
        assert!(matches!(err, GeomError::AntipodalNormals { .. }));
    }

    #[test]
    fn extrapolation_is_flagged() {
        let seg = GeodesicSegment::new(hp(&[1.0, 0.0], 0.0), hp(&[0.0, 1.0], 2.0)).unwrap();
        assert!(!seg.sample(0.5).extrapolated);
        assert!(seg.sample(1.2).extrapolated);
        assert!(seg.sample(-0.1).extrapolated);
    }

    #[test]
    fn initial_velocity_quarter_turn() {
        let seg = GeodesicSegment::new(hp(&[1.0, 0.0], 0.0), hp(&[0.0, 1.0], 0.0)).unwrap();
        let v = seg.velocity0();
        let expected = [0.0, FRAC_PI_2, 0.0, 0.0];
        for (a, b) in v.coords().iter().zip(expected) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(v.norm_sq().sqrt(), FRAC_PI_2, epsilon = 1e-15);
    }

    #[test]
    fn initial_velocity_matches_finite_difference() {
        let seg = GeodesicSegment::new(hp(&[0.3, -0.2, 0.9], 1.5), hp(&[-0.5, 0.7, 0.1], -0.4)).unwrap();
        let h = 1e-6;
        let fd = (seg.point(h).embed().into_inner() - seg.point(-h).embed().into_inner()) / (2.0 * h);
        let v = seg.velocity0().into_inner();
        assert!((fd - &v).amax() < 1e-6);
        let speed = lorentz_inner(&seg.velocity0(), &seg.velocity0()).unwrap().sqrt();
        assert_abs_diff_eq!(speed, seg.theta(), epsilon = 1e-12);
        assert!((seg.velocity(0.0).into_inner() - v).amax() < 1e-12);
    }

    #[test]
    fn poincare_examples() {
        let z = hp(&[0.6, 0.8], 2.5);
        let id = PoincareElement::identity(2);
        assert_eq!(id.apply(&z), z);

        let g = PoincareElement::homothety(2.0, DVector::from_column_slice(&[1.0, 0.0])).unwrap();
        let out = g.apply(&hp(&[1.0, 0.0], 3.0));
        assert_eq!(out.offset(), 7.0);

        let rot = PlanarRotation::coordinate(2, 0, 1, FRAC_PI_2).unwrap();
        let out = rot.as_poincare().apply(&hp(&[1.0, 0.0], 5.0));
        assert_abs_diff_eq!(out.normal()[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out.normal()[1], 1.0, epsilon = 1e-15);
        assert_eq!(out.offset(), 5.0);
    }

    #[test]
    fn poincare_maps_points_of_plane_to_points_of_image() {
        let rot = PlanarRotation::coordinate(3, 0, 2, 0.7).unwrap().matrix();
        let g = PoincareElement::new(rot, -1.7, DVector::from_column_slice(&[0.2, -1.0, 3.0])).unwrap();
        let z = hp(&[0.0, 0.6, 0.8], 1.3);
        // a point on z
        let x = z.normal() * 1.3 + DVector::from_column_slice(&[1.0, 0.8, -0.6]) * 2.0;
        assert_abs_diff_eq!(z.residual(&x), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(g.apply(&z).residual(&g.apply_point(&x)), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn poincare_rejects_bad_elements() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(PoincareElement::new(m, 1.0, DVector::zeros(2)).is_err());
        assert!(PoincareElement::homothety(0.0, DVector::zeros(2)).is_err());
    }

    #[test]
    fn translation_homothety_examples() {
        let z0 = hp(&[0.0, 0.0, 1.0], 0.5);
        let zero = DVector::zeros(3);
        for t in [0.0, 0.3, 1.0] {
            assert_eq!(translation_homothety_flow(&z0, 1.0, &zero, t).unwrap().offset(), 0.5);
        }
        let p = DVector::from_column_slice(&[0.0, 0.0, 3.2]);
        let end = translation_homothety_flow(&z0, 0.4, &p, 1.0).unwrap();
        assert_abs_diff_eq!(end.offset(), 0.4 * 0.5 + 3.2, epsilon = 1e-15);
        let mid = translation_homothety_flow(&z0, 0.4, &p, 0.5).unwrap();
        assert_abs_diff_eq!(mid.offset(), 1.95, epsilon = 1e-15);
        let seg = GeodesicSegment::new(z0.clone(), end).unwrap();
        assert_abs_diff_eq!(seg.point(0.5).offset(), 1.95, epsilon = 1e-15);
    }

    #[test]
    fn pseudo_rotation_angle_examples() {
        assert_abs_diff_eq!(pseudo_rotation_angle(1.0, 0.8).unwrap(), 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(pseudo_rotation_angle(1.0, -0.8).unwrap(), 0.8, epsilon = 1e-12);
        assert_eq!(pseudo_rotation_angle(0.0, 2.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            pseudo_rotation_angle(0.5, FRAC_PI_2).unwrap(),
            std::f64::consts::FRAC_PI_3,
            epsilon = 1e-15
        );
        assert!(pseudo_rotation_angle(1.5, PI).is_err());
    }

    #[test]
    fn pseudo_rotation_endpoints_and_bulge() {
        let z0 = hp(&[0.6, 0.0, 0.8], 2.0);
        let rot = PlanarRotation::coordinate(3, 0, 1, 1.1).unwrap();
        let start = pseudo_rotation_flow(&z0, &rot, 0.0).unwrap();
        assert!((start.normal() - z0.normal()).amax() < 1e-15);
        let end = pseudo_rotation_flow(&z0, &rot, 1.0).unwrap();
        let expected = rot.matrix() * z0.normal();
        assert!((end.normal() - expected).amax() < 1e-15);
        assert_abs_diff_eq!(end.offset(), 2.0, epsilon = 1e-15);

        let theta = pseudo_rotation_angle(0.36, 1.1).unwrap();
        let mid = pseudo_rotation_flow(&z0, &rot, 0.5).unwrap();
        assert_abs_diff_eq!(mid.offset(), 2.0 / (theta / 2.0).cos(), epsilon = 1e-12);
    }

    #[test]
    fn projective_offset_examples() {
        assert_abs_diff_eq!(projective_flow_offset(0.3, -2.0, 0.0).unwrap(), 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(projective_flow_offset(0.3, -2.0, 1.0).unwrap(), -2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(projective_flow_offset(0.0, 1.0, 0.5).unwrap(), 0.41421356237309503, epsilon = 1e-15);
        assert!(projective_flow_offset(0.0, 1e9, 3.0).is_err());
        let _ = FRAC_PI_4;
    }
}
