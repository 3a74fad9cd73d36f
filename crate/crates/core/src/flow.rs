//! Lorentzian geodesic flows between corresponded hypersurfaces.
//!
//! Each point `u` of the source gives a tangent hyperplane `z₀(u)`, the
//! correspondence gives `z₁(u)` on the target, and
//! `ψ_t(u) = λ(t, θ) z₁ + λ(1 − t, θ) z₀` with `cos θ = n₀ · n₁` flows one to
//! the other. The level hypersurface `M_t` is the envelope of `u ↦ ψ_t(u)`.
//!
//! Two diagnostics watch for singular levels:
//! * `det N′_t`, the nonsingularity matrix `λ(t,θ)N₁ + λ(1−t,θ)N₀ + σ(t,θ)[0 | θ_u n₀]`,
//!   which has the rank of the flowed Gauss-map matrix `(n_t | ∂n_t/∂u)`;
//! * the smoothness Hessian of the flowed family, whose sign changes mark
//!   cusps of the envelope.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::envelope::{
    cross_product_general, envelope_grid, envelope_point, envelope_sample, fd_first_jet, normalized_det_cols,
    DerivativeMode, EnvelopeSample, FamilyJet, FdSteps, HyperplaneFamily, ParamGrid, TAU_SING,
};
use crate::error::{GeomError, Result};
use crate::geodesic::{GeodesicSegment, PoincareElement, MAX_THETA};
use crate::lorentz::HyperplanePoint;
use crate::weights::{dlambda_unchecked, lambda_unchecked, sigma_unchecked, TAU_SMALL};

/// Point and partials of a parametrized hypersurface.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceJet {
    pub x: DVector<f64>,
    pub dx: Vec<DVector<f64>>,
    /// `ddx[i][j] = X_{u_i u_j}` when known.
    pub ddx: Option<Vec<Vec<DVector<f64>>>>,
}

type PointFn = dyn Fn(&[f64]) -> DVector<f64> + Send + Sync;
type JetFn = dyn Fn(&[f64]) -> SurfaceJet + Send + Sync;

/// A parametrized hypersurface `u ↦ X(u) ∈ ℝ^d`, `u ∈ ℝ^{d−1}`, oriented by
/// the generalized cross product of its partials.
#[derive(Clone)]
pub struct SurfacePatch {
    dim: usize,
    eval: Arc<PointFn>,
    jet: Option<Arc<JetFn>>,
    flip: bool,
    steps: FdSteps,
}

impl std::fmt::Debug for SurfacePatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SurfacePatch")
            .field("dim", &self.dim)
            .field("analytic", &self.jet.is_some())
            .field("flip", &self.flip)
            .finish_non_exhaustive()
    }
}

impl SurfacePatch {
    /// A surface known only by its points; partials come from central differences.
    pub fn from_fn<F>(dim: usize, eval: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> DVector<f64> + Send + Sync + 'static,
    {
        if dim < 2 {
            return Err(GeomError::DimensionTooSmall(dim));
        }
        Ok(Self {
            dim,
            eval: Arc::new(eval),
            jet: None,
            flip: false,
            steps: FdSteps::default(),
        })
    }

    /// Supplies analytic partials.
    pub fn with_jet<F>(mut self, jet: F) -> Self
    where
        F: Fn(&[f64]) -> SurfaceJet + Send + Sync + 'static,
    {
        self.jet = Some(Arc::new(jet));
        self
    }

    /// Reverses the orientation.
    pub fn flipped(mut self) -> Self {
        self.flip = !self.flip;
        self
    }

    pub fn with_steps(mut self, steps: FdSteps) -> Self {
        self.steps = steps;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn has_second_partials(&self) -> bool {
        self.jet.is_some()
    }

    fn check_param(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.dim - 1 {
            return Err(GeomError::DimensionMismatch {
                expected: self.dim - 1,
                found: u.len(),
            });
        }
        Ok(())
    }

    pub fn point(&self, u: &[f64]) -> Result<DVector<f64>> {
        self.check_param(u)?;
        Ok((self.eval)(u))
    }

    pub fn jet(&self, u: &[f64]) -> Result<SurfaceJet> {
        self.check_param(u)?;
        if let Some(j) = &self.jet {
            return Ok(j(u));
        }
        let x = (self.eval)(u);
        let dx = (0..u.len())
            .map(|i| {
                let h = self.steps.first_at(u[i]);
                let mut up = u.to_vec();
                let mut um = u.to_vec();
                up[i] += h;
                um[i] -= h;
                ((self.eval)(&up) - (self.eval)(&um)) / (2.0 * h)
            })
            .collect();
        Ok(SurfaceJet { x, dx, ddx: None })
    }

    /// Unnormalized oriented normal `m` (cross product of the partials).
    fn raw_normal(&self, u: &[f64], jet: &SurfaceJet) -> Result<DVector<f64>> {
        let m = cross_product_general(&jet.dx)?;
        let scale: f64 = jet.dx.iter().map(|v| v.norm()).product();
        if !(m.norm() > 1e-12 * scale) {
            return Err(GeomError::NotImmersed(u.to_vec()));
        }
        Ok(if self.flip { -m } else { m })
    }

    pub fn normal(&self, u: &[f64]) -> Result<DVector<f64>> {
        let jet = self.jet(u)?;
        Ok(self.raw_normal(u, &jet)?.normalize())
    }

    /// Tangent hyperplane `(n(u), n(u) · X(u))`.
    pub fn tangent_plane(&self, u: &[f64]) -> Result<HyperplanePoint> {
        let jet = self.jet(u)?;
        let n = self.raw_normal(u, &jet)?.normalize();
        let c = n.dot(&jet.x);
        Ok(HyperplanePoint::from_parts_unchecked(n, c))
    }

    /// Analytic first jet of the tangent-plane family; `None` without second
    /// partials.
    fn tangent_first_jet(&self, u: &[f64]) -> Result<Option<FamilyJet>> {
        let jet = self.jet(u)?;
        let ddx = match &jet.ddx {
            Some(d) => d,
            None => return Ok(None),
        };
        let m = self.raw_normal(u, &jet)?;
        let len = m.norm();
        let n = &m / len;
        let sign = if self.flip { -1.0 } else { 1.0 };
        let k = jet.dx.len();
        let mut dn = Vec::with_capacity(k);
        let mut dc = Vec::with_capacity(k);
        for i in 0..k {
            // the cross product is multilinear in the partials
            let mut dm = DVector::zeros(self.dim);
            for j in 0..k {
                let mut cols = jet.dx.clone();
                cols[j] = ddx[j][i].clone();
                dm += cross_product_general(&cols)?;
            }
            dm *= sign;
            let dni = (&dm - &n * n.dot(&dm)) / len;
            dc.push(dni.dot(&jet.x));
            dn.push(dni);
        }
        let c = n.dot(&jet.x);
        Ok(Some(FamilyJet { n, c, dn, dc }))
    }

    /// The family of tangent hyperplanes, usable with the envelope kernels.
    pub fn tangent_family(&self, mode: DerivativeMode) -> TangentFamily<'_> {
        TangentFamily { surface: self, mode }
    }

    /// Image of the surface under `x ↦ b A x + p`.
    pub fn transformed(&self, g: &PoincareElement) -> SurfacePatch {
        let eval = self.eval.clone();
        let g1 = g.clone();
        let mut out = SurfacePatch {
            dim: self.dim,
            eval: Arc::new(move |u: &[f64]| g1.apply_point(&eval(u))),
            jet: None,
            flip: self.flip,
            steps: self.steps,
        };
        if let Some(jet) = self.jet.clone() {
            let g2 = g.clone();
            out.jet = Some(Arc::new(move |u: &[f64]| {
                let j = jet(u);
                SurfaceJet {
                    x: g2.apply_point(&j.x),
                    dx: j.dx.iter().map(|v| g2.apply_vector(v)).collect(),
                    ddx: j
                        .ddx
                        .map(|rows| rows.iter().map(|r| r.iter().map(|v| g2.apply_vector(v)).collect()).collect()),
                }
            }));
        }
        out
    }
}

/// Tangent hyperplanes of a [`SurfacePatch`] as a hyperplane family.
#[derive(Debug, Clone, Copy)]
pub struct TangentFamily<'a> {
    surface: &'a SurfacePatch,
    mode: DerivativeMode,
}

impl HyperplaneFamily for TangentFamily<'_> {
    fn dim(&self) -> usize {
        self.surface.dim
    }

    fn eval(&self, u: &[f64]) -> Result<(DVector<f64>, f64)> {
        let z = self.surface.tangent_plane(u)?;
        Ok((z.normal().clone(), z.offset()))
    }

    fn steps(&self) -> FdSteps {
        self.surface.steps
    }

    fn analytic_first(&self) -> bool {
        self.mode == DerivativeMode::Analytic && self.surface.has_second_partials()
    }

    fn first_jet(&self, u: &[f64]) -> Result<FamilyJet> {
        if self.analytic_first() {
            if let Some(j) = self.surface.tangent_first_jet(u)? {
                return Ok(j);
            }
        }
        fd_first_jet(self, u)
    }
}

type ReparamFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// How source points correspond to target points.
#[derive(Clone)]
pub enum Correspondence {
    /// `χ(u) = u`. For graphs `z = f(x, y)` this is the vertical correspondence.
    SharedParameter,
    /// `χ(u) = ũ(u)` in the target's parameters.
    Reparametrization(Arc<ReparamFn>),
    /// `χ = g`; the target is `g` applied to the source.
    Poincare(PoincareElement),
}

impl std::fmt::Debug for Correspondence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Correspondence::SharedParameter => write!(f, "SharedParameter"),
            Correspondence::Reparametrization(_) => write!(f, "Reparametrization(..)"),
            Correspondence::Poincare(g) => f.debug_tuple("Poincare").field(g).finish(),
        }
    }
}

impl Correspondence {
    pub fn reparametrization<F>(f: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Correspondence::Reparametrization(Arc::new(f))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Correspondence::SharedParameter => "shared_parameter",
            Correspondence::Reparametrization(_) => "reparametrization",
            Correspondence::Poincare(_) => "poincare",
        }
    }
}

/// Two hypersurfaces, a correspondence and the derivative mode of the flow.
#[derive(Debug, Clone)]
pub struct FlowProblem {
    source: SurfacePatch,
    target: SurfacePatch,
    chi: Correspondence,
    mode: DerivativeMode,
}

/// `N′_t` and its column-normalized determinant.
#[derive(Debug, Clone, PartialEq)]
pub struct NonsingularityMatrix {
    pub n_prime: DMatrix<f64>,
    /// `λ(t,θ)N₁ + λ(1−t,θ)N₀`.
    pub n_tilde: DMatrix<f64>,
    /// `det N′_t` over the product of the column norms of `Ñ_t`.
    pub det_normalized: f64,
}

/// The flowed envelope point at one time along a flow curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSample {
    pub t: f64,
    pub point: Option<DVector<f64>>,
    pub error: Option<GeomError>,
}

impl FlowProblem {
    /// For a Poincaré correspondence `target` is replaced by the image of
    /// `source`, so that `z₁ = g(z₀)` holds exactly.
    pub fn new(source: SurfacePatch, target: SurfacePatch, chi: Correspondence) -> Result<Self> {
        if source.dim() != target.dim() {
            return Err(GeomError::DimensionMismatch {
                expected: source.dim(),
                found: target.dim(),
            });
        }
        let target = match &chi {
            Correspondence::Poincare(g) => {
                if g.dim() != source.dim() {
                    return Err(GeomError::DimensionMismatch {
                        expected: source.dim(),
                        found: g.dim(),
                    });
                }
                source.transformed(g)
            }
            _ => target,
        };
        Ok(Self {
            source,
            target,
            chi,
            mode: DerivativeMode::FiniteDifference,
        })
    }

    /// Flow from `source` to its image under `g`.
    pub fn poincare(source: SurfacePatch, g: PoincareElement) -> Result<Self> {
        let target = source.clone();
        Self::new(source, target, Correspondence::Poincare(g))
    }

    pub fn with_mode(mut self, mode: DerivativeMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn mode(&self) -> DerivativeMode {
        self.mode
    }

    pub fn dim(&self) -> usize {
        self.source.dim()
    }

    pub fn source(&self) -> &SurfacePatch {
        &self.source
    }

    pub fn target(&self) -> &SurfacePatch {
        &self.target
    }

    pub fn correspondence(&self) -> &Correspondence {
        &self.chi
    }

    /// Same flow with both surfaces and the correspondence moved by `g`.
    pub fn transformed(&self, g: &PoincareElement) -> Result<Self> {
        let chi = match &self.chi {
            Correspondence::Poincare(h) => {
                // g h g⁻¹ carries g(M₀) to g(h(M₀))
                let ginv_a = g.rotation().transpose();
                let rot = g.rotation() * h.rotation() * &ginv_a;
                let scale = h.scale();
                let trans = g.apply_vector(h.translation()) + g.translation() - &rot * g.translation() * scale;
                Correspondence::Poincare(PoincareElement::new(rot, scale, trans)?)
            }
            other => other.clone(),
        };
        Ok(Self {
            source: self.source.transformed(g),
            target: self.target.transformed(g),
            chi,
            mode: self.mode,
        })
    }

    /// Target parameter `χ(u)`.
    pub fn target_param(&self, u: &[f64]) -> Vec<f64> {
        match &self.chi {
            Correspondence::Reparametrization(f) => f(u),
            _ => u.to_vec(),
        }
    }

    pub fn source_plane(&self, u: &[f64]) -> Result<HyperplanePoint> {
        self.source.tangent_plane(u)
    }

    /// `z₁(u)`, the target tangent plane corresponding to source parameter `u`.
    pub fn target_plane(&self, u: &[f64]) -> Result<HyperplanePoint> {
        match &self.chi {
            Correspondence::Poincare(g) => Ok(g.apply(&self.source.tangent_plane(u)?)),
            _ => self.target.tangent_plane(&self.target_param(u)),
        }
    }

    /// Geodesic from `z₀(u)` to `z₁(u)`, rejecting `θ ≥ π − 1e−6`.
    pub fn segment(&self, u: &[f64]) -> Result<GeodesicSegment> {
        let z0 = self.source_plane(u)?;
        let z1 = self.target_plane(u)?;
        let seg = GeodesicSegment::new(z0, z1).map_err(|e| match e {
            GeomError::AntipodalNormals { dot } => GeomError::AntipodalAt {
                u: u.to_vec(),
                theta: dot.clamp(-1.0, 1.0).acos(),
            },
            other => other,
        })?;
        if seg.theta() > MAX_THETA {
            return Err(GeomError::AntipodalAt {
                u: u.to_vec(),
                theta: seg.theta(),
            });
        }
        Ok(seg)
    }

    /// Relative orientation angle `θ(u) = arccos(n₀ · n₁)`.
    pub fn theta(&self, u: &[f64]) -> Result<f64> {
        Ok(self.segment(u)?.theta())
    }

    /// `ψ_t(u)`.
    pub fn flow_map(&self, u: &[f64], t: f64) -> Result<HyperplanePoint> {
        Ok(self.segment(u)?.point(t))
    }

    /// Largest `θ` over a grid; errors if relative orientation fails anywhere.
    pub fn check_orientation(&self, grid: &ParamGrid) -> Result<f64> {
        if grid.is_empty() {
            return Err(GeomError::EmptyGrid);
        }
        (0..grid.len())
            .into_par_iter()
            .map(|i| self.theta(&grid.point(i)))
            .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
    }

    /// Detects two grid points sent to the same target parameter.
    pub fn check_injective(&self, grid: &ParamGrid) -> Result<()> {
        if !matches!(self.chi, Correspondence::Reparametrization(_)) {
            return Ok(());
        }
        let images: Vec<Vec<f64>> = grid.points().iter().map(|u| self.target_param(u)).collect();
        let spacing = grid
            .axes()
            .iter()
            .filter(|a| a.len() > 1)
            .map(|a| (a[a.len() - 1] - a[0]).abs() / (a.len() - 1) as f64)
            .fold(f64::INFINITY, f64::min);
        let tol = if spacing.is_finite() { 1e-9 * spacing.max(1e-300) } else { 1e-12 };
        for i in 0..images.len() {
            for j in i + 1..images.len() {
                let dist = images[i]
                    .iter()
                    .zip(&images[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                if dist <= tol {
                    return Err(GeomError::NotInjective(i, j));
                }
            }
        }
        Ok(())
    }

    /// First jets of `z₀` and `z₁` in the source parameter.
    pub fn pair_jets(&self, u: &[f64]) -> Result<(FamilyJet, FamilyJet)> {
        let j0 = self.source.tangent_family(self.mode).first_jet(u)?;
        let j1 = match &self.chi {
            Correspondence::Poincare(g) => FamilyJet {
                n: g.rotation() * &j0.n,
                c: g.scale() * j0.c + (g.rotation() * &j0.n).dot(g.translation()),
                dn: j0.dn.iter().map(|v| g.rotation() * v).collect(),
                dc: j0
                    .dn
                    .iter()
                    .zip(&j0.dc)
                    .map(|(v, dc)| g.scale() * dc + (g.rotation() * v).dot(g.translation()))
                    .collect(),
            },
            Correspondence::SharedParameter => self.target.tangent_family(self.mode).first_jet(u)?,
            Correspondence::Reparametrization(f) => {
                let v = f(u);
                let jt = self.target.tangent_family(self.mode).first_jet(&v)?;
                let steps = self.source.steps;
                let k = u.len();
                // Jacobian of χ by central differences
                let mut jac = DMatrix::zeros(k, k);
                for i in 0..k {
                    let h = steps.first_at(u[i]);
                    let mut up = u.to_vec();
                    let mut um = u.to_vec();
                    up[i] += h;
                    um[i] -= h;
                    let (fp, fm) = (f(&up), f(&um));
                    for r in 0..k {
                        jac[(r, i)] = (fp[r] - fm[r]) / (2.0 * h);
                    }
                }
                let dn = (0..k)
                    .map(|i| (0..k).fold(DVector::zeros(jt.n.len()), |acc, r| acc + &jt.dn[r] * jac[(r, i)]))
                    .collect();
                let dc = (0..k).map(|i| (0..k).map(|r| jt.dc[r] * jac[(r, i)]).sum()).collect();
                FamilyJet { n: jt.n, c: jt.c, dn, dc }
            }
        };
        Ok((j0, j1))
    }

    /// `∂θ/∂u_i`; zero where `θ < τ_small`.
    pub fn theta_gradient(&self, u: &[f64]) -> Result<Vec<f64>> {
        let (j0, j1) = self.pair_jets(u)?;
        Ok(theta_gradient_from(&j0, &j1))
    }

    /// `N′_t = λ(t,θ)N₁ + λ(1−t,θ)N₀ + σ(t,θ)[0 | θ_{u_1} n₀ | …]` with
    /// `N_i = (n_i | ∂n_i/∂u)`.
    pub fn nonsingularity_matrix(&self, u: &[f64], t: f64) -> Result<NonsingularityMatrix> {
        let theta = self.theta(u)?;
        let (j0, j1) = self.pair_jets(u)?;
        let grad = theta_gradient_from(&j0, &j1);
        let a = lambda_unchecked(t, theta);
        let b = lambda_unchecked(1.0 - t, theta);
        let n0 = jet_matrix(&j0);
        let n1 = jet_matrix(&j1);
        let n_tilde = n1 * a + n0 * b;
        let mut n_prime = n_tilde.clone();
        if theta >= TAU_SMALL {
            let s = sigma_unchecked(t, theta);
            for (i, g) in grad.iter().enumerate() {
                let mut col = n_prime.column_mut(i + 1);
                col += &j0.n * (s * g);
            }
        }
        let scale: f64 = n_tilde.column_iter().map(|c| c.norm()).product();
        let det = n_prime.clone().lu().determinant();
        Ok(NonsingularityMatrix {
            n_prime,
            n_tilde,
            det_normalized: if scale > 0.0 { det / scale } else { 0.0 },
        })
    }

    /// `N_t = (n_t | ∂n_t/∂u)` of the flowed family itself and its
    /// column-normalized determinant.
    pub fn direct_matrix(&self, u: &[f64], t: f64) -> Result<(DMatrix<f64>, f64)> {
        let jet = self.level_family(t).first_jet(u)?;
        let m = jet_matrix(&jet);
        let det = normalized_det_cols(&m);
        Ok((m, det))
    }

    /// The hyperplane family `u ↦ ψ_t(u)` at fixed `t`.
    pub fn level_family(&self, t: f64) -> LevelFamily<'_> {
        LevelFamily { problem: self, t }
    }

    /// Envelope of the flowed family at time `t` over `grid`, with `det N′_t`
    /// recorded per sample.
    pub fn level_surface(&self, t: f64, grid: &ParamGrid) -> Result<Vec<EnvelopeSample>> {
        let mut samples = envelope_grid(&self.level_family(t), grid)?;
        samples.par_iter_mut().for_each(|s| match self.nonsingularity_matrix(&s.u, t) {
            Ok(m) => s.det_nprime = Some(m.det_normalized),
            Err(e) => {
                if s.error.is_none() {
                    s.error = Some(e);
                }
            }
        });
        Ok(samples)
    }

    /// Envelope points of the flowed families at fixed `u`.
    pub fn flow_curve(&self, u: &[f64], times: &[f64]) -> Vec<CurveSample> {
        times
            .iter()
            .map(|&t| match envelope_point(&self.level_family(t), u) {
                Ok(s) => CurveSample {
                    t,
                    point: s.point,
                    error: None,
                },
                Err(e) => CurveSample {
                    t,
                    point: None,
                    error: Some(e),
                },
            })
            .collect()
    }

    /// Evaluates `det N′_t` and the smoothness Hessian of the flowed family on
    /// the product grid and records sign changes between consecutive times.
    pub fn singularity_scan(&self, u_grid: &ParamGrid, t_grid: &[f64]) -> Result<SingularityReport> {
        if u_grid.is_empty() || t_grid.is_empty() {
            return Err(GeomError::EmptyGrid);
        }
        if let Some(t) = t_grid.iter().find(|t| !(0.0..=1.0).contains(*t)) {
            return Err(GeomError::Invalid(format!("scan time {t} outside [0, 1]")));
        }
        let nt = t_grid.len();
        let rows: Vec<Vec<(f64, f64)>> = (0..u_grid.len())
            .into_par_iter()
            .map(|iu| {
                let u = u_grid.point(iu);
                t_grid
                    .iter()
                    .map(|&t| {
                        let det = self.nonsingularity_matrix(&u, t)?.det_normalized;
                        let sample = envelope_sample(&self.level_family(t), &u);
                        if let Some(e) = sample.error {
                            return Err(e);
                        }
                        Ok((det, sample.hessian_det.unwrap_or(0.0)))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;

        let mut det_field = Vec::with_capacity(rows.len() * nt);
        let mut hessian_field = Vec::with_capacity(rows.len() * nt);
        for row in &rows {
            for &(d, h) in row {
                det_field.push(d);
                hessian_field.push(h);
            }
        }
        let mut sign_changes = Vec::new();
        for iu in 0..rows.len() {
            for it in 0..nt.saturating_sub(1) {
                let k = iu * nt + it;
                if det_field[k] * det_field[k + 1] < 0.0 {
                    sign_changes.push(SignChange {
                        u_index: iu,
                        t_index: it,
                        field: ScanField::NPrime,
                    });
                }
                if hessian_field[k] * hessian_field[k + 1] < 0.0 {
                    sign_changes.push(SignChange {
                        u_index: iu,
                        t_index: it,
                        field: ScanField::Hessian,
                    });
                }
            }
        }
        let flags: Vec<ScanFlag> = det_field
            .iter()
            .zip(&hessian_field)
            .map(|(d, h)| ScanFlag::classify(d.abs().min(h.abs())))
            .collect();
        let min_abs_det = det_field.iter().map(|d| d.abs()).fold(f64::INFINITY, f64::min);
        let min_abs_hessian = hessian_field.iter().map(|d| d.abs()).fold(f64::INFINITY, f64::min);
        let verdict = if sign_changes.is_empty() && flags.iter().all(|f| *f != ScanFlag::Singular) {
            Verdict::Nonsingular
        } else {
            Verdict::Singular
        };
        Ok(SingularityReport {
            u_points: u_grid.points(),
            t_values: t_grid.to_vec(),
            det_field,
            hessian_field,
            flags,
            sign_changes,
            min_abs_det,
            min_abs_hessian,
            verdict,
        })
    }
}

fn jet_matrix(jet: &FamilyJet) -> DMatrix<f64> {
    let mut cols = Vec::with_capacity(jet.dn.len() + 1);
    cols.push(jet.n.clone());
    cols.extend(jet.dn.iter().cloned());
    DMatrix::from_columns(&cols)
}

fn theta_gradient_from(j0: &FamilyJet, j1: &FamilyJet) -> Vec<f64> {
    let cos = j0.n.dot(&j1.n).clamp(-1.0, 1.0);
    let theta = cos.acos();
    if theta < TAU_SMALL {
        return vec![0.0; j0.dn.len()];
    }
    let sin = theta.sin();
    j0.dn
        .iter()
        .zip(&j1.dn)
        .map(|(a, b)| -(a.dot(&j1.n) + j0.n.dot(b)) / sin)
        .collect()
}

/// `u ↦ ψ_t(u)` at a fixed time.
#[derive(Debug, Clone, Copy)]
pub struct LevelFamily<'a> {
    problem: &'a FlowProblem,
    t: f64,
}

impl HyperplaneFamily for LevelFamily<'_> {
    fn dim(&self) -> usize {
        self.problem.dim()
    }

    fn eval(&self, u: &[f64]) -> Result<(DVector<f64>, f64)> {
        let z = self.problem.flow_map(u, self.t)?;
        Ok((z.normal().clone(), z.offset()))
    }

    fn steps(&self) -> FdSteps {
        self.problem.source.steps
    }

    fn analytic_first(&self) -> bool {
        self.problem.mode == DerivativeMode::Analytic
    }

    fn first_jet(&self, u: &[f64]) -> Result<FamilyJet> {
        if !self.analytic_first() {
            return fd_first_jet(self, u);
        }
        // chain rule through λ(t, θ(u)) and λ(1 − t, θ(u))
        let t = self.t;
        let theta = self.problem.theta(u)?;
        let (j0, j1) = self.problem.pair_jets(u)?;
        let grad = theta_gradient_from(&j0, &j1);
        let a = lambda_unchecked(t, theta);
        let b = lambda_unchecked(1.0 - t, theta);
        let da = dlambda_unchecked(t, theta);
        let db = dlambda_unchecked(1.0 - t, theta);
        let n = &j1.n * a + &j0.n * b;
        let c = a * j1.c + b * j0.c;
        let dn_theta = &j1.n * da + &j0.n * db;
        let dc_theta = da * j1.c + db * j0.c;
        let dn_raw: Vec<DVector<f64>> = (0..grad.len())
            .map(|i| &j1.dn[i] * a + &j0.dn[i] * b + &dn_theta * grad[i])
            .collect();
        let dc_raw: Vec<f64> = (0..grad.len())
            .map(|i| a * j1.dc[i] + b * j0.dc[i] + dc_theta * grad[i])
            .collect();
        // match the renormalized finite-difference jets: (n, c) / |n|
        let len = n.norm();
        let unit = &n / len;
        let dn = dn_raw
            .iter()
            .map(|d| (d - &unit * unit.dot(d)) / len)
            .collect::<Vec<_>>();
        let dc = dn_raw
            .iter()
            .zip(&dc_raw)
            .map(|(d, dc)| dc / len - c * unit.dot(d) / (len * len))
            .collect();
        Ok(FamilyJet {
            n: unit,
            c: c / len,
            dn,
            dc,
        })
    }
}

/// Which diagnostic field changed sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanField {
    NPrime,
    Hessian,
}

/// A sign change between times `t_index` and `t_index + 1` at `u_index`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignChange {
    pub u_index: usize,
    pub t_index: usize,
    pub field: ScanField,
}

/// Per-sample classification of a scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanFlag {
    Regular,
    /// Within `[τ_sing, 10 τ_sing)`.
    Undetermined,
    Singular,
}

impl ScanFlag {
    pub fn classify(value: f64) -> Self {
        if value < TAU_SING {
            ScanFlag::Singular
        } else if value < 10.0 * TAU_SING {
            ScanFlag::Undetermined
        } else {
            ScanFlag::Regular
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ScanFlag::Regular => "regular",
            ScanFlag::Undetermined => "undetermined",
            ScanFlag::Singular => "singular",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Nonsingular,
    Singular,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Nonsingular => "nonsingular",
            Verdict::Singular => "singular",
        }
    }
}

/// Diagnostic fields of a flow on a `(u, t)` grid, stored with `t` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularityReport {
    pub u_points: Vec<Vec<f64>>,
    pub t_values: Vec<f64>,
    /// Normalized `det N′_t`.
    pub det_field: Vec<f64>,
    /// Normalized determinant of the smoothness Hessian of the level family.
    pub hessian_field: Vec<f64>,
    pub flags: Vec<ScanFlag>,
    pub sign_changes: Vec<SignChange>,
    pub min_abs_det: f64,
    pub min_abs_hessian: f64,
    pub verdict: Verdict,
}

impl SingularityReport {
    pub fn index(&self, u_index: usize, t_index: usize) -> usize {
        u_index * self.t_values.len() + t_index
    }

    pub fn sign_change_count(&self, field: ScanField) -> usize {
        self.sign_changes.iter().filter(|s| s.field == field).count()
    }

    pub fn count(&self, flag: ScanFlag) -> usize {
        self.flags.iter().filter(|f| **f == flag).count()
    }
}
