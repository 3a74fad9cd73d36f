//! Built-in parametric surfaces with analytic first and second partials.
//!
//! Graph surfaces `z = f(x, y)` use `u = (x, y)` and the upward normal, so two
//! graphs related by "same `(x, y)`" are corresponded by a shared parameter.

use nalgebra::DVector;

use crate::error::{GeomError, Result};
use crate::flow::{SurfaceJet, SurfacePatch};

fn v3(x: f64, y: f64, z: f64) -> DVector<f64> {
    DVector::from_column_slice(&[x, y, z])
}

/// A polynomial `Σ a · x^i y^j` in two variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial2 {
    terms: Vec<(u32, u32, f64)>,
}

impl Polynomial2 {
    pub fn new(terms: Vec<(u32, u32, f64)>) -> Self {
        Self { terms }
    }

    pub fn terms(&self) -> &[(u32, u32, f64)] {
        &self.terms
    }

    /// Value and partials `[f, f_x, f_y, f_xx, f_xy, f_yy]`.
    pub fn jet(&self, x: f64, y: f64) -> [f64; 6] {
        let p = |b: f64, e: i64| if e < 0 { 0.0 } else { b.powi(e as i32) };
        let mut out = [0.0; 6];
        for &(i, j, a) in &self.terms {
            let (fi, fj) = (i as f64, j as f64);
            let (i, j) = (i as i64, j as i64);
            out[0] += a * p(x, i) * p(y, j);
            out[1] += a * fi * p(x, i - 1) * p(y, j);
            out[2] += a * fj * p(x, i) * p(y, j - 1);
            out[3] += a * fi * (fi - 1.0) * p(x, i - 2) * p(y, j);
            out[4] += a * fi * fj * p(x, i - 1) * p(y, j - 1);
            out[5] += a * fj * (fj - 1.0) * p(x, i) * p(y, j - 2);
        }
        out
    }
}

/// Graph `z = f(x, y)` of a polynomial.
pub fn polynomial_graph(poly: Polynomial2) -> SurfacePatch {
    let eval_poly = poly.clone();
    SurfacePatch::from_fn(3, move |u: &[f64]| v3(u[0], u[1], eval_poly.jet(u[0], u[1])[0]))
        .expect("dimension 3")
        .with_jet(move |u: &[f64]| {
            let [f, fx, fy, fxx, fxy, fyy] = poly.jet(u[0], u[1]);
            SurfaceJet {
                x: v3(u[0], u[1], f),
                dx: vec![v3(1.0, 0.0, fx), v3(0.0, 1.0, fy)],
                ddx: Some(vec![
                    vec![v3(0.0, 0.0, fxx), v3(0.0, 0.0, fxy)],
                    vec![v3(0.0, 0.0, fxy), v3(0.0, 0.0, fyy)],
                ]),
            }
        })
}

/// Paraboloid `z = height − coefficient · (x² + y²)`.
pub fn paraboloid(height: f64, coefficient: f64) -> SurfacePatch {
    polynomial_graph(Polynomial2::new(vec![(0, 0, height), (2, 0, -coefficient), (0, 2, -coefficient)]))
}

/// Ellipsoid with semi-axes `axes` about `center`, parametrized by polar
/// angle `u₀` and azimuth `u₁`, outward normal.
pub fn ellipsoid(axes: [f64; 3], center: [f64; 3]) -> Result<SurfacePatch> {
    if axes.iter().any(|a| !(*a > 0.0)) {
        return Err(GeomError::Invalid(format!("ellipsoid axes must be positive, got {axes:?}")));
    }
    let [a, b, c] = axes;
    let ctr = v3(center[0], center[1], center[2]);
    let ctr2 = ctr.clone();
    let point = move |u: &[f64]| {
        let (st, ct) = u[0].sin_cos();
        let (sp, cp) = u[1].sin_cos();
        &ctr + v3(a * st * cp, b * st * sp, c * ct)
    };
    Ok(SurfacePatch::from_fn(3, point).expect("dimension 3").with_jet(move |u: &[f64]| {
        let (st, ct) = u[0].sin_cos();
        let (sp, cp) = u[1].sin_cos();
        SurfaceJet {
            x: &ctr2 + v3(a * st * cp, b * st * sp, c * ct),
            dx: vec![v3(a * ct * cp, b * ct * sp, -c * st), v3(-a * st * sp, b * st * cp, 0.0)],
            ddx: Some(vec![
                vec![v3(-a * st * cp, -b * st * sp, -c * ct), v3(-a * ct * sp, b * ct * cp, 0.0)],
                vec![v3(-a * ct * sp, b * ct * cp, 0.0), v3(-a * st * cp, -b * st * sp, 0.0)],
            ]),
        }
    }))
}

/// Sphere of radius `radius` about `center`; see [`ellipsoid`].
pub fn sphere(radius: f64, center: [f64; 3]) -> Result<SurfacePatch> {
    ellipsoid([radius; 3], center)
}

/// Plane `normal · x = offset`, parametrized by an orthonormal basis of its
/// directions ordered so that the derived normal equals `normal`.
pub fn plane(normal: [f64; 3], offset: f64) -> Result<SurfacePatch> {
    let n = v3(normal[0], normal[1], normal[2])
        .try_normalize(1e-12)
        .ok_or(GeomError::ZeroNormal)?;
    let seed = if n[0].abs() < 0.9 { v3(1.0, 0.0, 0.0) } else { v3(0.0, 1.0, 0.0) };
    let e1 = (&seed - &n * n.dot(&seed)).normalize();
    let e2 = n.cross(&e1);
    let base = &n * offset;
    let (b2, e1b, e2b) = (base.clone(), e1.clone(), e2.clone());
    Ok(SurfacePatch::from_fn(3, move |u: &[f64]| &base + &e1 * u[0] + &e2 * u[1])
        .expect("dimension 3")
        .with_jet(move |u: &[f64]| SurfaceJet {
            x: &b2 + &e1b * u[0] + &e2b * u[1],
            dx: vec![e1b.clone(), e2b.clone()],
            ddx: Some(vec![vec![DVector::zeros(3); 2]; 2]),
        }))
}

/// Circle of radius `radius` about `center` in ℝ², outward normal.
pub fn circle(radius: f64, center: [f64; 2]) -> Result<SurfacePatch> {
    if !(radius > 0.0) {
        return Err(GeomError::Invalid(format!("radius must be positive, got {radius}")));
    }
    let ctr = DVector::from_column_slice(&center);
    let ctr2 = ctr.clone();
    // (X_u rotated by −90°) points outward for counterclockwise X
    Ok(SurfacePatch::from_fn(2, move |u: &[f64]| {
        &ctr + DVector::from_column_slice(&[radius * u[0].cos(), radius * u[0].sin()])
    })
    .expect("dimension 2")
    .with_jet(move |u: &[f64]| {
        let (s, c) = u[0].sin_cos();
        SurfaceJet {
            x: &ctr2 + DVector::from_column_slice(&[radius * c, radius * s]),
            dx: vec![DVector::from_column_slice(&[-radius * s, radius * c])],
            ddx: Some(vec![vec![DVector::from_column_slice(&[-radius * c, -radius * s])]]),
        }
    }))
}
