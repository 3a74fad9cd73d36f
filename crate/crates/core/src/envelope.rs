//! Envelopes of hyperplane families.
//!
//! A family `u ↦ (n(u), c(u))`, `u ∈ ℝ^{d−1}`, of oriented hyperplanes of ℝ^d
//! touches its envelope at the solution of
//!
//! ```text
//! n(u) · x = c(u),   n_{u_i}(u) · x = c_{u_i}(u)   (i = 1, …, d−1)
//! ```
//!
//! The envelope is smooth there when the Hessian of `F(x, u) = n(u)·x − c(u)`
//! in `u` is nonsingular. That Hessian is evaluated without `x` through the
//! generalized cross product `h̃` of `ñ = (n, −c)` and its first derivatives.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{GeomError, Result};

/// Threshold on row-norm-normalized determinants.
pub const TAU_SING: f64 = 1e-8;

/// Relative finite-difference steps: `h = rel · max(1, |u_i|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdSteps {
    pub first: f64,
    pub second: f64,
}

impl Default for FdSteps {
    fn default() -> Self {
        Self {
            first: 1e-5,
            second: 1e-4,
        }
    }
}

impl FdSteps {
    pub fn first_at(&self, ui: f64) -> f64 {
        self.first * ui.abs().max(1.0)
    }

    pub fn second_at(&self, ui: f64) -> f64 {
        self.second * ui.abs().max(1.0)
    }
}

/// How a family supplies derivatives of `(n, c)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DerivativeMode {
    #[default]
    FiniteDifference,
    Analytic,
}

/// Value and first partials of a hyperplane family at one parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyJet {
    pub n: DVector<f64>,
    pub c: f64,
    pub dn: Vec<DVector<f64>>,
    pub dc: Vec<f64>,
}

/// A [`FamilyJet`] plus second partials, stored as full symmetric tables.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondJet {
    pub first: FamilyJet,
    pub ddn: Vec<Vec<DVector<f64>>>,
    pub ddc: Vec<Vec<f64>>,
}

/// A smooth `(d−1)`-parameter family of oriented hyperplanes of ℝ^d.
///
/// Only [`eval`](Self::eval) is required; derivatives default to central
/// differences of the renormalized evaluator.
pub trait HyperplaneFamily: Sync {
    /// Ambient dimension `d`.
    fn dim(&self) -> usize;

    /// Raw `(n(u), c(u))`; `n` need not be exactly unit length.
    fn eval(&self, u: &[f64]) -> Result<(DVector<f64>, f64)>;

    fn param_dim(&self) -> usize {
        self.dim() - 1
    }

    fn steps(&self) -> FdSteps {
        FdSteps::default()
    }

    /// Whether [`first_jet`](Self::first_jet) is exact rather than differenced.
    fn analytic_first(&self) -> bool {
        false
    }

    /// `(n, c)` with the normal rescaled to unit length.
    fn eval_unit(&self, u: &[f64]) -> Result<(DVector<f64>, f64)> {
        let (n, c) = self.eval(u)?;
        check_param(self, u)?;
        let len = n.norm();
        if !(len > 0.0) || !len.is_finite() {
            return Err(GeomError::ZeroNormal);
        }
        Ok((n / len, c / len))
    }

    fn first_jet(&self, u: &[f64]) -> Result<FamilyJet> {
        fd_first_jet(self, u)
    }

    fn second_jet(&self, u: &[f64]) -> Result<SecondJet> {
        if self.analytic_first() {
            fd_second_from_first(self, u)
        } else {
            fd_second_from_values(self, u)
        }
    }
}

fn check_param<F: HyperplaneFamily + ?Sized>(family: &F, u: &[f64]) -> Result<()> {
    if u.len() != family.param_dim() {
        return Err(GeomError::DimensionMismatch {
            expected: family.param_dim(),
            found: u.len(),
        });
    }
    Ok(())
}

fn shifted(u: &[f64], moves: &[(usize, f64)]) -> Vec<f64> {
    let mut v = u.to_vec();
    for &(i, h) in moves {
        v[i] += h;
    }
    v
}

/// Central differences of the unit-normalized evaluator, step `h₁`.
pub fn fd_first_jet<F: HyperplaneFamily + ?Sized>(family: &F, u: &[f64]) -> Result<FamilyJet> {
    let (n, c) = family.eval_unit(u)?;
    let steps = family.steps();
    let mut dn = Vec::with_capacity(u.len());
    let mut dc = Vec::with_capacity(u.len());
    for i in 0..u.len() {
        let h = steps.first_at(u[i]);
        let (np, cp) = family.eval_unit(&shifted(u, &[(i, h)]))?;
        let (nm, cm) = family.eval_unit(&shifted(u, &[(i, -h)]))?;
        dn.push((np - nm) / (2.0 * h));
        dc.push((cp - cm) / (2.0 * h));
    }
    Ok(FamilyJet { n, c, dn, dc })
}

/// Second partials from values with step `h₂`.
pub fn fd_second_from_values<F: HyperplaneFamily + ?Sized>(family: &F, u: &[f64]) -> Result<SecondJet> {
    let first = family.first_jet(u)?;
    let k = u.len();
    let steps = family.steps();
    let d = first.n.len();
    let mut ddn = vec![vec![DVector::zeros(d); k]; k];
    let mut ddc = vec![vec![0.0; k]; k];
    for i in 0..k {
        let hi = steps.second_at(u[i]);
        let (np, cp) = family.eval_unit(&shifted(u, &[(i, hi)]))?;
        let (nm, cm) = family.eval_unit(&shifted(u, &[(i, -hi)]))?;
        ddn[i][i] = (np + nm - &first.n * 2.0) / (hi * hi);
        ddc[i][i] = (cp + cm - 2.0 * first.c) / (hi * hi);
        for j in 0..i {
            let hj = steps.second_at(u[j]);
            let (npp, cpp) = family.eval_unit(&shifted(u, &[(i, hi), (j, hj)]))?;
            let (npm, cpm) = family.eval_unit(&shifted(u, &[(i, hi), (j, -hj)]))?;
            let (nmp, cmp) = family.eval_unit(&shifted(u, &[(i, -hi), (j, hj)]))?;
            let (nmm, cmm) = family.eval_unit(&shifted(u, &[(i, -hi), (j, -hj)]))?;
            let scale = 4.0 * hi * hj;
            let vn = (npp - npm - nmp + nmm) / scale;
            let vc = (cpp - cpm - cmp + cmm) / scale;
            ddn[i][j] = vn.clone();
            ddn[j][i] = vn;
            ddc[i][j] = vc;
            ddc[j][i] = vc;
        }
    }
    Ok(SecondJet { first, ddn, ddc })
}

/// Second partials as central differences of the first jet with step `h₁`,
/// symmetrized.
pub fn fd_second_from_first<F: HyperplaneFamily + ?Sized>(family: &F, u: &[f64]) -> Result<SecondJet> {
    let first = family.first_jet(u)?;
    let k = u.len();
    let steps = family.steps();
    let d = first.n.len();
    let mut ddn = vec![vec![DVector::zeros(d); k]; k];
    let mut ddc = vec![vec![0.0; k]; k];
    for j in 0..k {
        let h = steps.first_at(u[j]);
        let p = family.first_jet(&shifted(u, &[(j, h)]))?;
        let m = family.first_jet(&shifted(u, &[(j, -h)]))?;
        for i in 0..k {
            ddn[i][j] += (&p.dn[i] - &m.dn[i]) / (4.0 * h);
            ddn[j][i] += (&p.dn[i] - &m.dn[i]) / (4.0 * h);
            ddc[i][j] += (p.dc[i] - m.dc[i]) / (4.0 * h);
            ddc[j][i] += (p.dc[i] - m.dc[i]) / (4.0 * h);
        }
    }
    Ok(SecondJet { first, ddn, ddc })
}

type EvalFn = dyn Fn(&[f64]) -> Result<(DVector<f64>, f64)> + Send + Sync;
type FirstFn = dyn Fn(&[f64]) -> Result<FamilyJet> + Send + Sync;
type SecondFn = dyn Fn(&[f64]) -> Result<SecondJet> + Send + Sync;

/// A hyperplane family given by closures, with optional analytic jets.
#[derive(Clone)]
pub struct HyperplaneFamilyPatch {
    dim: usize,
    eval: Arc<EvalFn>,
    first: Option<Arc<FirstFn>>,
    second: Option<Arc<SecondFn>>,
    mode: DerivativeMode,
    steps: FdSteps,
}

impl std::fmt::Debug for HyperplaneFamilyPatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HyperplaneFamilyPatch")
            .field("dim", &self.dim)
            .field("mode", &self.mode)
            .field("steps", &self.steps)
            .finish_non_exhaustive()
    }
}

impl HyperplaneFamilyPatch {
    pub fn new<F>(dim: usize, eval: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Result<(DVector<f64>, f64)> + Send + Sync + 'static,
    {
        if dim < 2 {
            return Err(GeomError::DimensionTooSmall(dim));
        }
        Ok(Self {
            dim,
            eval: Arc::new(eval),
            first: None,
            second: None,
            mode: DerivativeMode::FiniteDifference,
            steps: FdSteps::default(),
        })
    }

    /// Supplies exact first partials and switches to analytic mode.
    pub fn with_first_jet<F>(mut self, f: F) -> Self
    where
        F: Fn(&[f64]) -> Result<FamilyJet> + Send + Sync + 'static,
    {
        self.first = Some(Arc::new(f));
        self.mode = DerivativeMode::Analytic;
        self
    }

    pub fn with_second_jet<F>(mut self, f: F) -> Self
    where
        F: Fn(&[f64]) -> Result<SecondJet> + Send + Sync + 'static,
    {
        self.second = Some(Arc::new(f));
        self
    }

    pub fn with_steps(mut self, steps: FdSteps) -> Self {
        self.steps = steps;
        self
    }

    /// Forces a derivative mode. Analytic mode without jets falls back to
    /// finite differences.
    pub fn with_mode(mut self, mode: DerivativeMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn mode(&self) -> DerivativeMode {
        self.mode
    }

    fn use_analytic(&self) -> bool {
        self.mode == DerivativeMode::Analytic
    }
}

impl HyperplaneFamily for HyperplaneFamilyPatch {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, u: &[f64]) -> Result<(DVector<f64>, f64)> {
        (self.eval)(u)
    }

    fn steps(&self) -> FdSteps {
        self.steps
    }

    fn analytic_first(&self) -> bool {
        self.use_analytic() && self.first.is_some()
    }

    fn first_jet(&self, u: &[f64]) -> Result<FamilyJet> {
        match (&self.first, self.use_analytic()) {
            (Some(f), true) => {
                check_param(self, u)?;
                f(u)
            }
            _ => fd_first_jet(self, u),
        }
    }

    fn second_jet(&self, u: &[f64]) -> Result<SecondJet> {
        match (&self.second, self.use_analytic()) {
            (Some(f), true) => {
                check_param(self, u)?;
                f(u)
            }
            _ if self.analytic_first() => fd_second_from_first(self, u),
            _ => fd_second_from_values(self, u),
        }
    }
}

/// Tri-state smoothness verdict of an envelope sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothness {
    Smooth,
    Singular,
    Undetermined,
}

impl Smoothness {
    /// `Smooth` at or above `10 τ`, `Singular` below `τ`, `Undetermined` between.
    pub fn classify(normalized_det: f64, tau: f64) -> Self {
        let a = normalized_det.abs();
        if a >= 10.0 * tau {
            Smoothness::Smooth
        } else if a < tau {
            Smoothness::Singular
        } else {
            Smoothness::Undetermined
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Smoothness::Smooth => "smooth",
            Smoothness::Singular => "singular",
            Smoothness::Undetermined => "undetermined",
        }
    }
}

/// Result of reconstructing one envelope point.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeSample {
    pub u: Vec<f64>,
    /// Present iff `|det_n| ≥ τ_sing`.
    pub point: Option<DVector<f64>>,
    /// `det N(u)` divided by the product of its row norms.
    pub det_n: f64,
    pub smooth: Smoothness,
    pub hessian_det: Option<f64>,
    /// `det N′_t` when the sample comes from a flow level.
    pub det_nprime: Option<f64>,
    /// Evaluation failure, recorded instead of aborting a grid.
    pub error: Option<GeomError>,
}

impl EnvelopeSample {
    fn failed(u: &[f64], err: GeomError) -> Self {
        Self {
            u: u.to_vec(),
            point: None,
            det_n: f64::NAN,
            smooth: Smoothness::Undetermined,
            hessian_det: None,
            det_nprime: None,
            error: Some(err),
        }
    }
}

/// Determinant divided by the product of row norms; zero rows give zero.
pub fn normalized_det_rows(m: &DMatrix<f64>) -> f64 {
    let scale: f64 = m.row_iter().map(|r| r.norm()).product();
    if scale == 0.0 {
        return 0.0;
    }
    m.clone().lu().determinant() / scale
}

/// Determinant divided by the product of column norms.
pub fn normalized_det_cols(m: &DMatrix<f64>) -> f64 {
    let scale: f64 = m.column_iter().map(|c| c.norm()).product();
    if scale == 0.0 {
        return 0.0;
    }
    m.clone().lu().determinant() / scale
}

/// Generalized cross product of `d` vectors of ℝ^{d+1}: the unique vector with
/// `v · result = det(v, v₁, …, v_d)` for every `v`.
pub fn cross_product_general(vectors: &[DVector<f64>]) -> Result<DVector<f64>> {
    let d = vectors.len();
    if d == 0 {
        return Err(GeomError::DimensionTooSmall(0));
    }
    for v in vectors {
        if v.len() != d + 1 {
            return Err(GeomError::DimensionMismatch {
                expected: d + 1,
                found: v.len(),
            });
        }
    }
    let m = DMatrix::from_columns(vectors);
    let mut out = DVector::zeros(d + 1);
    for i in 0..=d {
        let minor = m.clone().remove_row(i);
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        out[i] = sign * minor.lu().determinant();
    }
    Ok(out)
}

fn envelope_matrix(jet: &FamilyJet) -> (DMatrix<f64>, DVector<f64>) {
    let d = jet.n.len();
    let mut m = DMatrix::zeros(d, d);
    let mut rhs = DVector::zeros(d);
    m.set_row(0, &jet.n.transpose());
    rhs[0] = jet.c;
    for (i, (dn, dc)) in jet.dn.iter().zip(&jet.dc).enumerate() {
        m.set_row(i + 1, &dn.transpose());
        rhs[i + 1] = *dc;
    }
    (m, rhs)
}

fn point_from_jet(u: &[f64], jet: &FamilyJet) -> EnvelopeSample {
    let (m, rhs) = envelope_matrix(jet);
    let det_n = normalized_det_rows(&m);
    let point = if det_n.abs() >= TAU_SING {
        m.lu().solve(&rhs)
    } else {
        None
    };
    let smooth = if point.is_some() {
        Smoothness::Undetermined
    } else {
        Smoothness::Singular
    };
    EnvelopeSample {
        u: u.to_vec(),
        point,
        det_n,
        smooth,
        hessian_det: None,
        det_nprime: None,
        error: None,
    }
}

/// Solves the envelope system at `u` by LU with partial pivoting. The
/// smoothness fields are left `Undetermined` (or `Singular` without a point);
/// [`envelope_sample`] fills them in.
pub fn envelope_point<F: HyperplaneFamily + ?Sized>(family: &F, u: &[f64]) -> Result<EnvelopeSample> {
    let jet = family.first_jet(u)?;
    Ok(point_from_jet(u, &jet))
}

/// Hessian `H(ñ)·h̃` and its verdict at one parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothnessReport {
    pub hessian: DMatrix<f64>,
    pub h_tilde: DVector<f64>,
    /// `det H / Π_i (|h̃| ‖ñ_{u_i}‖²)`.
    pub det_normalized: f64,
    pub verdict: Smoothness,
}

impl SmoothnessReport {
    pub fn nonsingular(&self) -> bool {
        self.verdict == Smoothness::Smooth
    }
}

fn tilde(n: &DVector<f64>, c: f64) -> DVector<f64> {
    let d = n.len();
    let mut out = DVector::zeros(d + 1);
    out.rows_mut(0, d).copy_from(n);
    out[d] = -c;
    out
}

fn smoothness_from_jet(jet: &SecondJet) -> Result<SmoothnessReport> {
    let f = &jet.first;
    let k = f.dn.len();
    let mut vecs = Vec::with_capacity(k + 1);
    vecs.push(tilde(&f.n, f.c));
    for (dn, dc) in f.dn.iter().zip(&f.dc) {
        vecs.push(tilde(dn, *dc));
    }
    let h = cross_product_general(&vecs)?;
    let hessian = DMatrix::from_fn(k, k, |i, j| tilde(&jet.ddn[i][j], jet.ddc[i][j]).dot(&h));
    let hn = h.norm();
    let scale: f64 = vecs[1..].iter().map(|v| hn * v.norm_squared()).product();
    let det = hessian.clone().lu().determinant();
    let det_normalized = if scale > 0.0 { det / scale } else { 0.0 };
    Ok(SmoothnessReport {
        hessian,
        h_tilde: h,
        det_normalized,
        verdict: Smoothness::classify(det_normalized, TAU_SING),
    })
}

/// Builds `ñ = (n, −c)`, `h̃ = ñ × ñ_{u_1} × … × ñ_{u_{d−1}}` and the matrix
/// `(ñ_{u_i u_j} · h̃)`. Fails where the envelope point is undefined.
pub fn smoothness_test<F: HyperplaneFamily + ?Sized>(family: &F, u: &[f64]) -> Result<SmoothnessReport> {
    let jet = family.second_jet(u)?;
    let sample = point_from_jet(u, &jet.first);
    if sample.point.is_none() {
        return Err(GeomError::EnvelopeUndefined {
            u: u.to_vec(),
            det: sample.det_n,
        });
    }
    smoothness_from_jet(&jet)
}

/// Envelope point plus smoothness verdict; failures become flags.
pub fn envelope_sample<F: HyperplaneFamily + ?Sized>(family: &F, u: &[f64]) -> EnvelopeSample {
    let jet = match family.second_jet(u) {
        Ok(j) => j,
        Err(e) => return EnvelopeSample::failed(u, e),
    };
    let mut sample = point_from_jet(u, &jet.first);
    if sample.point.is_some() {
        match smoothness_from_jet(&jet) {
            Ok(rep) => {
                sample.smooth = rep.verdict;
                sample.hessian_det = Some(rep.det_normalized);
            }
            Err(e) => sample.error = Some(e),
        }
    }
    sample
}

/// A rectangular parameter grid, enumerated with the last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamGrid {
    axes: Vec<Vec<f64>>,
}

impl ParamGrid {
    pub fn new(axes: Vec<Vec<f64>>) -> Self {
        Self { axes }
    }

    /// `counts[i]` evenly spaced values on `[lo_i, hi_i]`.
    pub fn uniform(ranges: &[(f64, f64)], counts: &[usize]) -> Result<Self> {
        if ranges.len() != counts.len() {
            return Err(GeomError::DimensionMismatch {
                expected: ranges.len(),
                found: counts.len(),
            });
        }
        let axes = ranges
            .iter()
            .zip(counts)
            .map(|(&(lo, hi), &n)| linspace(lo, hi, n))
            .collect();
        Ok(Self { axes })
    }

    pub fn axes(&self) -> &[Vec<f64>] {
        &self.axes
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Vec::len).collect()
    }

    pub fn len(&self) -> usize {
        if self.axes.is_empty() {
            0
        } else {
            self.axes.iter().map(Vec::len).product()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Parameter with flat index `idx`.
    pub fn point(&self, idx: usize) -> Vec<f64> {
        let mut rem = idx;
        let mut out = vec![0.0; self.axes.len()];
        for (k, axis) in self.axes.iter().enumerate().rev() {
            out[k] = axis[rem % axis.len()];
            rem /= axis.len();
        }
        out
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// [`envelope_sample`] over every grid point, in grid order. Samples are
/// evaluated in parallel.
pub fn envelope_grid<F: HyperplaneFamily + ?Sized>(family: &F, grid: &ParamGrid) -> Result<Vec<EnvelopeSample>> {
    if grid.is_empty() {
        return Err(GeomError::EmptyGrid);
    }
    if grid.axes().len() != family.param_dim() {
        return Err(GeomError::DimensionMismatch {
            expected: family.param_dim(),
            found: grid.axes().len(),
        });
    }
    Ok((0..grid.len())
        .into_par_iter()
        .map(|i| envelope_sample(family, &grid.point(i)))
        .collect())
}
