//! Lorentzian parallel sections and orthonormal frames along hyperplane
//! families.
//!
//! A section `t ↦ (e_t, β(t) ε)` of directions in the hyperplanes
//! `n_t · x = c_t` is Lorentzian parallel when `e′ = φ n_t` for some scalar
//! `φ` and `β′ = φ c_t`. Along a geodesic family the parallel frames have a
//! closed form: the direction `e₁` in the plane of `n₀, n₁` turns with the
//! normal and the complementary directions stay fixed.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{GeomError, Result};
use crate::geodesic::GeodesicSegment;
use crate::lorentz::{lorentz_dot, HyperplanePoint};
use crate::weights::{lambda_unchecked, TAU_SMALL};

/// Tolerance for `|e · n|` of a section or frame vector.
pub const IN_PLANE_TOL: f64 = 1e-8;
/// Tolerance for orthonormality of input frames.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

/// A one-parameter family of hyperplanes `t ↦ (n_t, c_t)`.
pub trait PlaneCurve {
    fn plane_at(&self, t: f64) -> Result<HyperplanePoint>;
}

impl PlaneCurve for GeodesicSegment {
    fn plane_at(&self, t: f64) -> Result<HyperplanePoint> {
        Ok(self.point(t))
    }
}

impl<F: Fn(f64) -> Result<HyperplanePoint>> PlaneCurve for F {
    fn plane_at(&self, t: f64) -> Result<HyperplanePoint> {
        self(t)
    }
}

/// A sampled section `e_t` with offsets `β(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionSample {
    pub times: Vec<f64>,
    pub vectors: Vec<DVector<f64>>,
    pub offsets: Vec<f64>,
}

/// Outcome of [`parallel_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct ParallelReport {
    pub is_parallel: bool,
    /// `e′ · n_t` per sample.
    pub phi: Vec<f64>,
    /// `β(0) + ∫₀ᵗ φ c`.
    pub beta_expected: Vec<f64>,
    /// `max_t |e′ − φ n_t|`.
    pub residual: f64,
    /// `max_t |β − β_expected|`.
    pub beta_error: f64,
    pub tol: f64,
}

/// Finite-difference weights for derivatives `0..=m` at `z` on nodes `x`
/// (Fornberg's recursion). `w[k][j]` weights node `j` for derivative `k`.
pub fn fornberg_weights(z: f64, x: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    if n == 0 {
        return c;
    }
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

const STENCIL: usize = 5;

fn stencil_start(i: usize, n: usize) -> usize {
    i.saturating_sub(STENCIL / 2).min(n - STENCIL)
}

/// Derivative of order `order` of sampled vectors at every sample, from a
/// five-point stencil (one-sided near the ends).
pub(crate) fn sampled_derivative(times: &[f64], values: &[DVector<f64>], order: usize) -> Vec<DVector<f64>> {
    let n = times.len();
    (0..n)
        .map(|i| {
            let s = stencil_start(i, n);
            let w = fornberg_weights(times[i], &times[s..s + STENCIL], order);
            let mut acc = DVector::zeros(values[i].len());
            for (k, wk) in w[order].iter().enumerate() {
                acc += &values[s + k] * *wk;
            }
            acc
        })
        .collect()
}

fn sampled_scalar_derivative(times: &[f64], values: &[f64]) -> Vec<f64> {
    let v: Vec<DVector<f64>> = values.iter().map(|&x| DVector::from_element(1, x)).collect();
    sampled_derivative(times, &v, 1).into_iter().map(|d| d[0]).collect()
}

/// `start + ∫ f` by the end-corrected trapezoid rule, using sampled `f′`.
pub(crate) fn cumulative_integral(times: &[f64], f: &[f64], start: f64) -> Vec<f64> {
    let df = sampled_scalar_derivative(times, f);
    let mut out = Vec::with_capacity(times.len());
    out.push(start);
    for i in 1..times.len() {
        let h = times[i] - times[i - 1];
        let step = 0.5 * h * (f[i] + f[i - 1]) - h * h / 12.0 * (df[i] - df[i - 1]);
        out.push(out[i - 1] + step);
    }
    out
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.len() < STENCIL {
        return Err(GeomError::TooFewSamples {
            needed: STENCIL,
            got: times.len(),
        });
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(GeomError::Invalid("sample times must be strictly increasing".into()));
    }
    Ok(())
}

/// Tests whether a sampled section is Lorentzian parallel along `family`.
///
/// `∂e/∂t` is estimated with five-point stencils and split into `φ n_t` plus a
/// residual. Both the residual and `|β − β_expected|` must stay below
/// `1e−5 · max(1, max_t |c_t|)`.
pub fn parallel_check<P: PlaneCurve + ?Sized>(family: &P, section: &SectionSample) -> Result<ParallelReport> {
    let times = &section.times;
    check_times(times)?;
    if section.vectors.len() != times.len() || section.offsets.len() != times.len() {
        return Err(GeomError::DimensionMismatch {
            expected: times.len(),
            found: section.vectors.len().min(section.offsets.len()),
        });
    }
    let planes = times.iter().map(|&t| family.plane_at(t)).collect::<Result<Vec<_>>>()?;
    for (i, (e, z)) in section.vectors.iter().zip(&planes).enumerate() {
        let defect = e.dot(z.normal()).abs();
        if defect > IN_PLANE_TOL {
            return Err(GeomError::SectionNotInPlane { index: i, defect });
        }
    }
    let de = sampled_derivative(times, &section.vectors, 1);
    let mut phi = Vec::with_capacity(times.len());
    let mut residual: f64 = 0.0;
    for (d, z) in de.iter().zip(&planes) {
        let p = d.dot(z.normal());
        residual = residual.max((d - z.normal() * p).norm());
        phi.push(p);
    }
    let integrand: Vec<f64> = phi.iter().zip(&planes).map(|(p, z)| p * z.offset()).collect();
    let beta_expected = cumulative_integral(times, &integrand, section.offsets[0]);
    let beta_error = section
        .offsets
        .iter()
        .zip(&beta_expected)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let scale = planes.iter().map(|z| z.offset().abs()).fold(1.0, f64::max);
    let tol = 1e-5 * scale;
    Ok(ParallelReport {
        is_parallel: residual < tol && beta_error < tol,
        phi,
        beta_expected,
        residual,
        beta_error,
        tol,
    })
}

/// Orthonormal frames `e_{1,t}, …, e_{d−1,t}` of the hyperplane directions
/// with offsets `β_i(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameFamily {
    pub times: Vec<f64>,
    pub frames: Vec<Vec<DVector<f64>>>,
    pub offsets: Vec<Vec<f64>>,
}

impl FrameFamily {
    /// Frame vector `i` as a section over all sample times.
    pub fn section(&self, i: usize) -> SectionSample {
        SectionSample {
            times: self.times.clone(),
            vectors: self.frames.iter().map(|f| f[i].clone()).collect(),
            offsets: self.offsets.iter().map(|b| b[i]).collect(),
        }
    }

    /// `max |e_i · e_j − δ_ij|` over all samples.
    pub fn orthonormality_defect(&self) -> f64 {
        self.frames.iter().map(|f| orthonormality_defect(f)).fold(0.0, f64::max)
    }

    /// `max |e_i · n_t|` over all samples.
    pub fn in_plane_defect<P: PlaneCurve + ?Sized>(&self, family: &P) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (t, f) in self.times.iter().zip(&self.frames) {
            let z = family.plane_at(*t)?;
            for e in f {
                worst = worst.max(e.dot(z.normal()).abs());
            }
        }
        Ok(worst)
    }

    /// `det(n_t, e_{1,t}, …)` per sample.
    pub fn orientation<P: PlaneCurve + ?Sized>(&self, family: &P) -> Result<Vec<f64>> {
        self.times
            .iter()
            .zip(&self.frames)
            .map(|(t, f)| Ok(oriented_det(family.plane_at(*t)?.normal(), f)))
            .collect()
    }
}

fn orthonormality_defect(frame: &[DVector<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in frame.iter().enumerate() {
        for (j, b) in frame.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((a.dot(b) - target).abs());
        }
    }
    worst
}

fn oriented_det(n: &DVector<f64>, frame: &[DVector<f64>]) -> f64 {
    let mut cols = Vec::with_capacity(frame.len() + 1);
    cols.push(n.clone());
    cols.extend(frame.iter().cloned());
    DMatrix::from_columns(&cols).determinant()
}

fn validate_frame(frame: &[DVector<f64>], n: &DVector<f64>) -> Result<()> {
    let d = n.len();
    if frame.len() != d - 1 {
        return Err(GeomError::DimensionMismatch {
            expected: d - 1,
            found: frame.len(),
        });
    }
    for v in frame {
        if v.len() != d {
            return Err(GeomError::DimensionMismatch { expected: d, found: v.len() });
        }
    }
    let defect = orthonormality_defect(frame);
    if defect > ORTHONORMAL_TOL {
        return Err(GeomError::NotOrthonormal(defect));
    }
    for (index, v) in frame.iter().enumerate() {
        let defect = v.dot(n).abs();
        if defect > IN_PLANE_TOL {
            return Err(GeomError::NotInPlane { index, defect });
        }
    }
    Ok(())
}

/// Orthonormal basis of the complement of `span{a, b}` (both unit,
/// orthogonal): standard basis vectors are projected off the span and off the
/// vectors already chosen, taking the largest residual each time.
fn complement_basis(a: &DVector<f64>, b: &DVector<f64>) -> Vec<DVector<f64>> {
    let d = a.len();
    let mut basis: Vec<DVector<f64>> = vec![a.clone(), b.clone()];
    let mut out = Vec::with_capacity(d.saturating_sub(2));
    while basis.len() < d {
        let best = (0..d)
            .map(|k| {
                let mut v = DVector::zeros(d);
                v[k] = 1.0;
                for q in &basis {
                    v -= q * q.dot(&v);
                }
                v
            })
            .enumerate()
            .max_by(|(i, x), (j, y)| x.norm().total_cmp(&y.norm()).then(j.cmp(i)))
            .map(|(_, v)| v)
            .expect("d > 0");
        let mut v = best.normalize();
        // second pass keeps the basis orthonormal to round-off
        for q in &basis {
            v -= q * q.dot(&v);
        }
        let v = v.normalize();
        basis.push(v.clone());
        out.push(v);
    }
    out
}

/// The distinguished parallel frame of a non-degenerate segment at `t = 0`:
/// `e₁` in the plane of `n₀, n₁`, the rest spanning its complement, with
/// `(n₀, e₁, …)` positively oriented. Also returns `s = ±1` with `e₁ = s w`,
/// where `w` points from `n₀` toward `n₁`.
fn distinguished_frame(seg: &GeodesicSegment) -> (Vec<DVector<f64>>, f64) {
    let n0 = seg.start().normal();
    let n1 = seg.end().normal();
    let cos = n0.dot(n1);
    let w = (n1 - n0 * cos).normalize();
    let mut rest = complement_basis(n0, &w);
    let mut frame = vec![w.clone()];
    frame.extend(rest.iter().cloned());
    let mut sign = 1.0;
    if oriented_det(n0, &frame) < 0.0 {
        if let Some(last) = rest.last_mut() {
            *last = -&*last;
        } else {
            sign = -1.0;
        }
    }
    let mut frame = vec![w * sign];
    frame.extend(rest);
    (frame, sign)
}

/// Lorentzian parallel orthonormal frames along `seg`, starting from
/// `initial_frame` in the first hyperplane. Offsets start at zero.
pub fn parallel_transport_frame(
    seg: &GeodesicSegment,
    initial_frame: &[DVector<f64>],
    times: &[f64],
) -> Result<FrameFamily> {
    let n0 = seg.start().normal();
    validate_frame(initial_frame, n0)?;
    let k = initial_frame.len();
    let theta = seg.theta();
    if theta < TAU_SMALL {
        return Ok(FrameFamily {
            times: times.to_vec(),
            frames: vec![initial_frame.to_vec(); times.len()],
            offsets: vec![vec![0.0; k]; times.len()],
        });
    }
    let (base, sign) = distinguished_frame(seg);
    // coefficients of the initial frame in the distinguished basis
    let a = DMatrix::from_fn(k, k, |i, j| initial_frame[i].dot(&base[j]));
    let (sin, cos) = theta.sin_cos();
    // e_{1,1}: e_{1,0} turned by θ toward n₁
    let e10 = &base[0];
    let e11 = e10 * cos - n0 * (sign * sin);
    let (c0, c1) = (seg.start().offset(), seg.end().offset());

    let mut frames = Vec::with_capacity(times.len());
    let mut offsets = Vec::with_capacity(times.len());
    for &t in times {
        let e1t = &e11 * lambda_unchecked(t, theta) + e10 * lambda_unchecked(1.0 - t, theta);
        // β₁ = ∫₀ᵗ φ c with φ = −s θ
        let beta1 = -sign * ((1.0 - (t * theta).cos()) * c1 + (((1.0 - t) * theta).cos() - cos) * c0) / sin;
        let mut moving = vec![e1t];
        moving.extend(base[1..].iter().cloned());
        let frame: Vec<DVector<f64>> = (0..k)
            .map(|i| {
                let mut v = DVector::zeros(n0.len());
                for (j, e) in moving.iter().enumerate() {
                    v += e * a[(i, j)];
                }
                v
            })
            .collect();
        frames.push(frame);
        offsets.push((0..k).map(|i| a[(i, 0)] * beta1).collect());
    }
    Ok(FrameFamily {
        times: times.to_vec(),
        frames,
        offsets,
    })
}

/// A nondecreasing map of `[0, 1]` onto itself fixing both ends.
#[derive(Clone, Default)]
pub enum Ramp {
    #[default]
    Linear,
    /// `3t² − 2t³`.
    Smoothstep,
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for Ramp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Ramp::Linear => write!(f, "Linear"),
            Ramp::Smoothstep => write!(f, "Smoothstep"),
            Ramp::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl Ramp {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Ramp::Linear => t,
            Ramp::Smoothstep => t * t * (3.0 - 2.0 * t),
            Ramp::Custom(f) => f(t),
        }
    }
}

/// A skew-symmetric twist `E` applied as `exp(φ(t) E)`.
#[derive(Debug, Clone)]
pub struct SkewGenerator {
    matrix: DMatrix<f64>,
    ramp: Ramp,
}

impl SkewGenerator {
    pub fn new(matrix: DMatrix<f64>, ramp: Ramp) -> Result<Self> {
        if !matrix.is_square() {
            return Err(GeomError::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        let defect = (&matrix + matrix.transpose()).amax();
        if defect > 1e-12 {
            return Err(GeomError::Invalid(format!("generator is not skew-symmetric (defect {defect:e})")));
        }
        Ok(Self { matrix, ramp })
    }

    /// Principal generator of the rotation `b`.
    pub fn from_rotation(b: &DMatrix<f64>, ramp: Ramp) -> Result<Self> {
        Self::new(skew_log(b)?, ramp)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn ramp(&self) -> &Ramp {
        &self.ramp
    }

    /// `exp(φ(t) E)`.
    pub fn at(&self, t: f64) -> DMatrix<f64> {
        skew_exp(&(&self.matrix * self.ramp.eval(t)))
    }

    /// `B = exp(E)`.
    pub fn end_rotation(&self) -> DMatrix<f64> {
        skew_exp(&self.matrix)
    }
}

/// Largest rotation angle accepted by [`skew_log`].
pub const MAX_TWIST: f64 = std::f64::consts::PI - 1e-6;

/// Principal logarithm of a rotation matrix.
///
/// With `M + Mᵀ = Q diag(2 cos ω_k) Qᵀ`, the logarithm is
/// `Q diag(ω_k / sin ω_k) Qᵀ · (M − Mᵀ)/2`.
pub fn skew_log(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let k = m.nrows();
    if !m.is_square() {
        return Err(GeomError::DimensionMismatch { expected: k, found: m.ncols() });
    }
    let defect = (m.transpose() * m - DMatrix::identity(k, k)).amax();
    if defect > 1e-8 {
        return Err(GeomError::NotOrthonormal(defect));
    }
    let det = m.determinant();
    if det < 0.0 {
        return Err(GeomError::OrientationMismatch(det));
    }
    let sym = (m + m.transpose()) * 0.5;
    let skew = (m - m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut gains = DVector::zeros(k);
    for (g, &c) in gains.iter_mut().zip(eig.eigenvalues.iter()) {
        let omega = c.clamp(-1.0, 1.0).acos();
        if omega > MAX_TWIST {
            return Err(GeomError::AmbiguousTwist(omega));
        }
        *g = if omega < 1e-8 { 1.0 + omega * omega / 6.0 } else { omega / omega.sin() };
    }
    let q = &eig.eigenvectors;
    let g = q * DMatrix::from_diagonal(&gains) * q.transpose();
    let e = g * skew;
    Ok((&e - e.transpose()) * 0.5)
}

/// Exponential of a skew-symmetric matrix.
pub fn skew_exp(e: &DMatrix<f64>) -> DMatrix<f64> {
    e.clone().exp()
}

/// Replaces the parallel frames by `exp(φ(t) E)` applied in frame
/// coordinates, where `exp(E)` carries the transported end frame onto
/// `target_frame`. Offsets are combined with the same coefficients.
pub fn frame_interpolate(
    parallel: &FrameFamily,
    target_frame: &[DVector<f64>],
    ramp: Ramp,
) -> Result<FrameFamily> {
    let end = parallel
        .frames
        .last()
        .ok_or(GeomError::TooFewSamples { needed: 1, got: 0 })?;
    let k = end.len();
    if target_frame.len() != k {
        return Err(GeomError::DimensionMismatch {
            expected: k,
            found: target_frame.len(),
        });
    }
    let defect = orthonormality_defect(target_frame);
    if defect > ORTHONORMAL_TOL {
        return Err(GeomError::NotOrthonormal(defect));
    }
    // column i holds the coordinates of f_i in the end frame
    let b = DMatrix::from_fn(k, k, |j, i| end[j].dot(&target_frame[i]));
    for (index, f) in target_frame.iter().enumerate() {
        let mut r = f.clone();
        for e in end {
            r -= e * e.dot(f);
        }
        if r.norm() > IN_PLANE_TOL {
            return Err(GeomError::NotInPlane { index, defect: r.norm() });
        }
    }
    let det = b.determinant();
    if (det - 1.0).abs() > 1e-8 {
        return Err(GeomError::OrientationMismatch(det));
    }
    let gen = SkewGenerator::from_rotation(&b, ramp)?;
    let mut frames = Vec::with_capacity(parallel.times.len());
    let mut offsets = Vec::with_capacity(parallel.times.len());
    for ((&t, frame), beta) in parallel.times.iter().zip(&parallel.frames).zip(&parallel.offsets) {
        let r = gen.at(t);
        frames.push(
            (0..k)
                .map(|i| {
                    let mut v = DVector::zeros(frame[0].len());
                    for (j, e) in frame.iter().enumerate() {
                        v += e * r[(j, i)];
                    }
                    v
                })
                .collect(),
        );
        offsets.push((0..k).map(|i| (0..k).map(|j| beta[j] * r[(j, i)]).sum()).collect());
    }
    Ok(FrameFamily {
        times: parallel.times.clone(),
        frames,
        offsets,
    })
}

/// Outcome of [`frenet_normal_plane_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct FrenetReport {
    pub is_geodesic_family: bool,
    pub frenet_parallel: bool,
    /// `max |γ̃″ − ⟨γ̃″, γ̃⟩_L γ̃| / |γ̃″|` over interior samples.
    pub geodesic_residual: f64,
    /// Largest [`ParallelReport::residual`] of `N` and `B`.
    pub parallel_residual: f64,
}

/// Relative tolerance of the geodesic test in [`frenet_normal_plane_check`].
pub const GEODESIC_TOL: f64 = 1e-5;

/// Tests the normal planes `(T(s), α(s)·T(s))` of a unit-speed space curve:
/// whether they form a Lorentzian geodesic (acceleration normal to the
/// quadric) and whether the Frenet vectors `N`, `B` are parallel sections.
pub fn frenet_normal_plane_check<C>(curve: C, times: &[f64]) -> Result<FrenetReport>
where
    C: Fn(f64) -> DVector<f64>,
{
    check_times(times)?;
    let h1 = 1e-5;
    let h2 = 1e-4;
    let mut tangents = Vec::with_capacity(times.len());
    let mut normals = Vec::with_capacity(times.len());
    let mut binormals = Vec::with_capacity(times.len());
    let mut points = Vec::with_capacity(times.len());
    for &s in times {
        let x = curve(s);
        if x.len() != 3 {
            return Err(GeomError::DimensionMismatch { expected: 3, found: x.len() });
        }
        let d1 = (curve(s + h1) - curve(s - h1)) / (2.0 * h1);
        let speed = d1.norm();
        if (speed - 1.0).abs() > 1e-6 {
            return Err(GeomError::Invalid(format!("curve is not unit speed at s = {s} (|α′| = {speed})")));
        }
        let t = d1 / speed;
        let d2 = (curve(s + h2) - &x * 2.0 + curve(s - h2)) / (h2 * h2);
        let k = &d2 - &t * t.dot(&d2);
        let kappa = k.norm();
        if kappa < 1e-6 {
            return Err(GeomError::FrenetUndefined { s, kappa });
        }
        let n = k / kappa;
        let b = t.cross(&n);
        points.push(x);
        tangents.push(t);
        normals.push(n);
        binormals.push(b);
    }

    let lifted: Vec<DVector<f64>> = tangents
        .iter()
        .zip(&points)
        .map(|(t, x)| {
            let c = t.dot(x);
            DVector::from_column_slice(&[t[0], t[1], t[2], c, c])
        })
        .collect();
    // centered stencils only; the one-sided end stencils lose an order
    let acc = sampled_derivative(times, &lifted, 2);
    let inner = STENCIL / 2..times.len() - STENCIL / 2;
    let geodesic_residual = acc[inner.clone()]
        .iter()
        .zip(&lifted[inner])
        .map(|(a, g)| {
            let normal = g * lorentz_dot(a, g);
            (a - normal).norm() / a.norm().max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max);

    let planes: Vec<HyperplanePoint> = tangents
        .iter()
        .zip(&points)
        .map(|(t, x)| HyperplanePoint::from_parts_unchecked(t.clone(), t.dot(x)))
        .collect();
    let family = |s: f64| -> Result<HyperplanePoint> {
        let i = times
            .iter()
            .position(|&x| x == s)
            .ok_or_else(|| GeomError::Invalid(format!("time {s} not sampled")))?;
        Ok(planes[i].clone())
    };
    let mut parallel_residual: f64 = 0.0;
    let mut frenet_parallel = true;
    for vectors in [normals, binormals] {
        let section = SectionSample {
            times: times.to_vec(),
            vectors,
            offsets: vec![0.0; times.len()],
        };
        let rep = parallel_check(&family, &section)?;
        parallel_residual = parallel_residual.max(rep.residual);
        // offsets are free here: any section with e′ ∥ n lifts with β = ∫ φ c
        frenet_parallel &= rep.residual < rep.tol;
    }
    Ok(FrenetReport {
        is_geodesic_family: geodesic_residual < GEODESIC_TOL,
        frenet_parallel,
        geodesic_residual,
        parallel_residual,
    })
}
