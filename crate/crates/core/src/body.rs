//! Oracle-backed convex bodies.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{invalid, precondition, Error, Result};
use crate::polytope::{Halfspace, Polytope};
use crate::tolerances::Tolerances;
use crate::vector::{check_dim, check_same_dim, dot, norm, LinearFunctional, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BodyKind {
    Ball,
    Ellipsoid,
    PBall,
    PolytopeH,
    PolytopeV,
    SmoothedPolytope,
    SlabIntersection,
}

impl BodyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BodyKind::Ball => "ball",
            BodyKind::Ellipsoid => "ellipsoid",
            BodyKind::PBall => "p-ball",
            BodyKind::PolytopeH => "polytope-h",
            BodyKind::PolytopeV => "polytope-v",
            BodyKind::SmoothedPolytope => "smoothed-polytope",
            BodyKind::SlabIntersection => "slab-intersection",
        }
    }
}

impl fmt::Display for BodyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum PolytopeSource {
    Halfspaces(Vec<Halfspace>),
    Vertices(Vec<Vector>),
    Slabs(Vec<LinearFunctional>),
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Ball,
    Ellipsoid {
        matrix: DMatrix<f64>,
        inverse: DMatrix<f64>,
        eigenvalues: Vec<f64>,
    },
    PBall {
        p: f64,
        q: f64,
    },
    Polytope {
        poly: Arc<Polytope>,
        source: PolytopeSource,
    },
    Smoothed {
        base: Box<ConvexBody>,
        radius: f64,
    },
}

/// A convex body with nonempty interior, described by its support function,
/// gauge and supporting functionals.
///
/// Every kind except polytopes is o-symmetric by construction. Polytopes may be
/// non-symmetric so that they can be fed to [`ConvexBody::minkowski_symmetrize`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BodySpec", into = "BodySpec")]
pub struct ConvexBody {
    dim: usize,
    shape: Shape,
}

/// A supporting functional `f` at a boundary point `b`, scaled so that `f(b) = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportingFunctional {
    pub functional: LinearFunctional,
    /// False at ridges of polytopes, where the returned functional is the
    /// normalised average of the active facet functionals.
    pub unique: bool,
}

/// Raw JSON form `{"dim", "kind", "params"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BodySpec {
    pub dim: usize,
    pub kind: BodyKind,
    #[serde(default)]
    pub params: Value,
}

#[derive(Deserialize)]
struct EllipsoidParams {
    matrix: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct PBallParams {
    p: f64,
}

#[derive(Deserialize)]
struct HalfspaceParams {
    halfspaces: Vec<Halfspace>,
}

#[derive(Deserialize)]
struct VertexParams {
    vertices: Vec<Vector>,
}

#[derive(Deserialize)]
struct SmoothedParams {
    polytope: ConvexBody,
    radius: f64,
}

#[derive(Deserialize)]
struct SlabParams {
    functionals: Vec<LinearFunctional>,
}

fn params<T: serde::de::DeserializeOwned>(kind: BodyKind, value: Value) -> Result<T> {
    serde_json::from_value(value).map_err(|e| invalid(format!("{kind} params: {e}")))
}

impl TryFrom<BodySpec> for ConvexBody {
    type Error = Error;

    fn try_from(spec: BodySpec) -> Result<Self> {
        let dim = spec.dim;
        match spec.kind {
            BodyKind::Ball => ConvexBody::ball(dim),
            BodyKind::Ellipsoid => {
                let p: EllipsoidParams = params(spec.kind, spec.params)?;
                if p.matrix.len() != dim || p.matrix.iter().any(|r| r.len() != dim) {
                    return Err(invalid(format!("ellipsoid matrix must be {dim}x{dim}")));
                }
                ConvexBody::ellipsoid(DMatrix::from_fn(dim, dim, |r, c| p.matrix[r][c]))
            }
            BodyKind::PBall => {
                let p: PBallParams = params(spec.kind, spec.params)?;
                ConvexBody::p_ball(dim, p.p)
            }
            BodyKind::PolytopeH => {
                let p: HalfspaceParams = params(spec.kind, spec.params)?;
                ConvexBody::polytope_h(dim, p.halfspaces)
            }
            BodyKind::PolytopeV => {
                let p: VertexParams = params(spec.kind, spec.params)?;
                ConvexBody::polytope_v(dim, p.vertices)
            }
            BodyKind::SmoothedPolytope => {
                let p: SmoothedParams = params(spec.kind, spec.params)?;
                if p.polytope.dim != dim {
                    return Err(invalid("smoothed polytope dimension mismatch"));
                }
                ConvexBody::smoothed(p.polytope, p.radius)
            }
            BodyKind::SlabIntersection => {
                let p: SlabParams = params(spec.kind, spec.params)?;
                ConvexBody::slab_intersection(dim, p.functionals)
            }
        }
    }
}

impl From<ConvexBody> for BodySpec {
    fn from(body: ConvexBody) -> Self {
        let kind = body.kind();
        let params = match body.shape {
            Shape::Ball => json!({}),
            Shape::Ellipsoid { matrix, .. } => {
                let rows: Vec<Vec<f64>> = (0..body.dim)
                    .map(|r| (0..body.dim).map(|c| matrix[(r, c)]).collect())
                    .collect();
                json!({ "matrix": rows })
            }
            Shape::PBall { p, .. } => json!({ "p": p }),
            Shape::Polytope { source, .. } => match source {
                PolytopeSource::Halfspaces(h) => json!({ "halfspaces": h }),
                PolytopeSource::Vertices(v) => json!({ "vertices": v }),
                PolytopeSource::Slabs(f) => json!({ "functionals": f }),
            },
            Shape::Smoothed { base, radius } => {
                json!({ "polytope": BodySpec::from(*base), "radius": radius })
            }
        };
        BodySpec {
            dim: body.dim,
            kind,
            params,
        }
    }
}

/// Volume of the Euclidean unit ball in `E^d`.
pub fn unit_ball_volume(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    PI.powf(h) / statrs::function::gamma::gamma(h + 1.0)
}

impl ConvexBody {
    pub fn ball(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(ConvexBody {
            dim,
            shape: Shape::Ball,
        })
    }

    /// `{x : x^T A^{-1} x <= 1}` for a symmetric positive-definite `A`.
    pub fn ellipsoid(matrix: DMatrix<f64>) -> Result<Self> {
        let dim = matrix.nrows();
        check_dim(dim)?;
        if matrix.ncols() != dim || matrix.iter().any(|x| !x.is_finite()) {
            return Err(invalid("ellipsoid matrix must be square and finite"));
        }
        if (&matrix - matrix.transpose()).abs().max() > 1e-12 * matrix.abs().max().max(1.0) {
            return Err(invalid("ellipsoid matrix must be symmetric"));
        }
        let chol = matrix
            .clone()
            .cholesky()
            .ok_or_else(|| invalid("ellipsoid matrix must be positive definite"))?;
        let inverse = chol.inverse();
        let mut eigenvalues: Vec<f64> = matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        eigenvalues.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(ConvexBody {
            dim,
            shape: Shape::Ellipsoid {
                matrix,
                inverse,
                eigenvalues,
            },
        })
    }

    /// Unit ball of the `l_p` norm, `1 < p < inf`.
    pub fn p_ball(dim: usize, p: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(p > 1.0 && p.is_finite()) {
            return Err(invalid(format!("p-ball exponent {p} outside (1, inf)")));
        }
        Ok(ConvexBody {
            dim,
            shape: Shape::PBall {
                p,
                q: p / (p - 1.0),
            },
        })
    }

    pub fn polytope_v(dim: usize, vertices: Vec<Vector>) -> Result<Self> {
        check_dim(dim)?;
        for v in &vertices {
            check_same_dim(dim, &v.0, "vertex")?;
            if !v.is_finite() {
                return Err(invalid("vertex coordinates must be finite"));
            }
        }
        let poly = Polytope::from_points(dim, &vertices)?;
        Ok(ConvexBody {
            dim,
            shape: Shape::Polytope {
                poly: Arc::new(poly),
                source: PolytopeSource::Vertices(vertices),
            },
        })
    }

    pub fn polytope_h(dim: usize, halfspaces: Vec<Halfspace>) -> Result<Self> {
        check_dim(dim)?;
        for h in &halfspaces {
            check_same_dim(dim, &h.normal.0, "halfspace normal")?;
            if !h.normal.is_finite() || !h.offset.is_finite() {
                return Err(invalid("halfspace entries must be finite"));
            }
        }
        let poly = Polytope::from_halfspaces(dim, &halfspaces)?;
        Ok(ConvexBody {
            dim,
            shape: Shape::Polytope {
                poly: Arc::new(poly),
                source: PolytopeSource::Halfspaces(halfspaces),
            },
        })
    }

    /// `{x : |f_i(x)| <= 1 for all i}`.
    pub fn slab_intersection(dim: usize, functionals: Vec<LinearFunctional>) -> Result<Self> {
        check_dim(dim)?;
        let mut halfspaces = Vec::with_capacity(2 * functionals.len());
        for f in &functionals {
            check_same_dim(dim, &f.0, "functional")?;
            if f.0.iter().any(|x| !x.is_finite()) {
                return Err(invalid("functional coefficients must be finite"));
            }
            halfspaces.push(Halfspace {
                normal: f.as_vector(),
                offset: 1.0,
            });
            halfspaces.push(Halfspace {
                normal: -&f.as_vector(),
                offset: 1.0,
            });
        }
        let poly = Polytope::from_halfspaces(dim, &halfspaces)?;
        Ok(ConvexBody {
            dim,
            shape: Shape::Polytope {
                poly: Arc::new(poly),
                source: PolytopeSource::Slabs(functionals),
            },
        })
    }

    /// Outer parallel body `P + radius * B^d` of a polytope.
    pub fn smoothed(polytope: ConvexBody, radius: f64) -> Result<Self> {
        if !matches!(polytope.shape, Shape::Polytope { .. }) {
            return Err(invalid("smoothing requires a polytope"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(invalid(format!(
                "smoothing radius {radius} must be positive"
            )));
        }
        let (_, d0) = polytope
            .polytope()
            .unwrap()
            .nearest_point(&vec![0.0; polytope.dim]);
        if d0 >= radius {
            return Err(invalid(
                "origin must lie in the interior of the smoothed body",
            ));
        }
        Ok(ConvexBody {
            dim: polytope.dim,
            shape: Shape::Smoothed {
                base: Box::new(polytope),
                radius,
            },
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> BodyKind {
        match &self.shape {
            Shape::Ball => BodyKind::Ball,
            Shape::Ellipsoid { .. } => BodyKind::Ellipsoid,
            Shape::PBall { .. } => BodyKind::PBall,
            Shape::Polytope { source, .. } => match source {
                PolytopeSource::Halfspaces(_) => BodyKind::PolytopeH,
                PolytopeSource::Vertices(_) => BodyKind::PolytopeV,
                PolytopeSource::Slabs(_) => BodyKind::SlabIntersection,
            },
            Shape::Smoothed { .. } => BodyKind::SmoothedPolytope,
        }
    }

    pub fn is_smooth(&self) -> bool {
        !matches!(self.shape, Shape::Polytope { .. })
    }

    pub fn is_strictly_convex(&self) -> bool {
        matches!(
            self.shape,
            Shape::Ball | Shape::Ellipsoid { .. } | Shape::PBall { .. }
        )
    }

    pub fn is_symmetric(&self) -> bool {
        match &self.shape {
            Shape::Polytope { poly, .. } => poly.is_symmetric(),
            Shape::Smoothed { base, .. } => base.is_symmetric(),
            _ => true,
        }
    }

    /// The polytope behind a polytope or smoothed-polytope body.
    pub fn polytope(&self) -> Option<&Polytope> {
        match &self.shape {
            Shape::Polytope { poly, .. } => Some(poly),
            Shape::Smoothed { base, .. } => base.polytope(),
            _ => None,
        }
    }

    /// Smoothing radius, if any.
    pub fn smoothing_radius(&self) -> Option<f64> {
        match &self.shape {
            Shape::Smoothed { radius, .. } => Some(*radius),
            _ => None,
        }
    }

    /// Exponent of a p-ball.
    pub fn exponent(&self) -> Option<f64> {
        match &self.shape {
            Shape::PBall { p, .. } => Some(*p),
            _ => None,
        }
    }

    fn check_direction(&self, u: &Vector) -> Result<()> {
        check_same_dim(self.dim, &u.0, "direction")?;
        if !u.is_finite() {
            return Err(invalid("direction must be finite"));
        }
        if u.is_zero() {
            return Err(invalid("zero direction"));
        }
        Ok(())
    }

    /// `h_K(u) = max <u, x>` over `K`.
    pub fn support(&self, u: &Vector) -> Result<f64> {
        self.check_direction(u)?;
        Ok(self.support_unchecked(&u.0))
    }

    pub(crate) fn support_unchecked(&self, u: &[f64]) -> f64 {
        match &self.shape {
            Shape::Ball => norm(u),
            Shape::Ellipsoid { matrix, .. } => {
                let v = DVector::from_column_slice(u);
                (v.dot(&(matrix * &v))).max(0.0).sqrt()
            }
            Shape::PBall { q, .. } => lp_norm(u, *q),
            Shape::Polytope { poly, .. } => poly.support(u),
            Shape::Smoothed { base, radius } => base.support_unchecked(u) + radius * norm(u),
        }
    }

    /// A point of `K` attaining `h_K(u)`.
    pub fn support_point(&self, u: &Vector) -> Result<Vector> {
        self.check_direction(u)?;
        Ok(match &self.shape {
            Shape::Ball => u.normalized(),
            Shape::Ellipsoid { matrix, .. } => {
                let v = DVector::from_column_slice(&u.0);
                let au = matrix * &v;
                let h = v.dot(&au).sqrt();
                Vector(au.iter().map(|x| x / h).collect())
            }
            Shape::PBall { q, .. } => {
                let n = lp_norm(&u.0, *q);
                Vector(
                    u.0.iter()
                        .map(|&x| x.signum() * (x.abs() / n).powf(q - 1.0))
                        .collect(),
                )
            }
            Shape::Polytope { poly, .. } => poly.support_point(&u.0).clone(),
            Shape::Smoothed { base, radius } => {
                let p = base.support_point(u)?;
                &p + &u.normalized().scale(*radius)
            }
        })
    }

    /// Minkowski functional `min{t >= 0 : x in tK}`.
    pub fn gauge(&self, x: &Vector) -> f64 {
        debug_assert_eq!(x.dim(), self.dim);
        self.gauge_slice(&x.0)
    }

    pub(crate) fn gauge_slice(&self, x: &[f64]) -> f64 {
        if x.iter().all(|&c| c == 0.0) {
            return 0.0;
        }
        match &self.shape {
            Shape::Ball => norm(x),
            Shape::Ellipsoid { inverse, .. } => {
                let v = DVector::from_column_slice(x);
                v.dot(&(inverse * &v)).max(0.0).sqrt()
            }
            Shape::PBall { p, .. } => lp_norm(x, *p),
            Shape::Polytope { poly, .. } => poly.gauge(x),
            Shape::Smoothed { base, radius } => {
                smoothed_gauge(base.polytope().unwrap(), *radius, x)
            }
        }
    }

    /// Membership with relative slack: `gauge(x) <= 1 + slack`.
    pub fn contains_with_slack(&self, x: &[f64], slack: f64) -> bool {
        match &self.shape {
            Shape::Smoothed { base, radius } => {
                let s = 1.0 / (1.0 + slack);
                let y: Vec<f64> = x.iter().map(|c| c * s).collect();
                base.polytope().unwrap().nearest_point(&y).1 <= *radius
            }
            _ => self.gauge_slice(x) <= 1.0 + slack,
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.contains_with_slack(x, 0.0)
    }

    /// The boundary point on the ray through `u`.
    pub fn boundary_point(&self, u: &Vector) -> Result<Vector> {
        self.check_direction(u)?;
        let g = self.gauge(u);
        if !g.is_finite() {
            return Err(invalid("ray does not meet the boundary"));
        }
        Ok(u.scale(1.0 / g))
    }

    /// Supporting functional at a boundary point, using the default boundary tolerance.
    pub fn supporting_functional(&self, b: &Vector) -> Result<SupportingFunctional> {
        self.supporting_functional_tol(b, Tolerances::default().boundary)
    }

    pub fn supporting_functional_tol(
        &self,
        b: &Vector,
        boundary_tol: f64,
    ) -> Result<SupportingFunctional> {
        check_same_dim(self.dim, &b.0, "boundary point")?;
        let g = self.gauge(b);
        if !((g - 1.0).abs() <= boundary_tol) {
            return Err(precondition(format!(
                "point is not on the boundary (gauge {g})"
            )));
        }
        let (normal, unique) = match &self.shape {
            Shape::Ball => (b.0.clone(), true),
            Shape::Ellipsoid { inverse, .. } => {
                let v = DVector::from_column_slice(&b.0);
                ((inverse * v).iter().copied().collect(), true)
            }
            Shape::PBall { p, .. } => (
                b.0.iter()
                    .map(|&x| x.signum() * x.abs().powf(p - 1.0))
                    .collect(),
                true,
            ),
            Shape::Polytope { poly, .. } => {
                let mut sum = vec![0.0; self.dim];
                let mut active = 0usize;
                for f in poly.facets() {
                    if f.offset <= 1e-12 {
                        continue;
                    }
                    if dot(&f.normal.0, &b.0) / f.offset >= g - 1e-9 * g.max(1.0) {
                        for (s, a) in sum.iter_mut().zip(&f.normal.0) {
                            *s += a / f.offset;
                        }
                        active += 1;
                    }
                }
                if active == 0 {
                    return Err(precondition("no supporting facet at this point"));
                }
                (sum, active == 1)
            }
            Shape::Smoothed { base, .. } => {
                let (p, _) = base.polytope().unwrap().nearest_point(&b.0);
                ((b - &p).0, true)
            }
        };
        let scale = dot(&normal, &b.0);
        if !(scale > 0.0) {
            return Err(precondition("degenerate supporting functional"));
        }
        Ok(SupportingFunctional {
            functional: LinearFunctional(normal.iter().map(|x| x / scale).collect()),
            unique,
        })
    }

    /// Unit outer normal at a boundary point (no boundary check).
    pub(crate) fn outer_normal(&self, b: &[f64]) -> Vec<f64> {
        let n: Vec<f64> = match &self.shape {
            Shape::Ball => b.to_vec(),
            Shape::Ellipsoid { inverse, .. } => (inverse * DVector::from_column_slice(b))
                .iter()
                .copied()
                .collect(),
            Shape::PBall { p, .. } => b
                .iter()
                .map(|&x| x.signum() * x.abs().powf(p - 1.0))
                .collect(),
            Shape::Polytope { poly, .. } => {
                let best = poly
                    .facets()
                    .iter()
                    .filter(|f| f.offset > 1e-12)
                    .max_by(|f, g| {
                        (dot(&f.normal.0, b) / f.offset)
                            .partial_cmp(&(dot(&g.normal.0, b) / g.offset))
                            .unwrap()
                    })
                    .expect("polytope with interior origin has facets");
                best.normal.0.clone()
            }
            Shape::Smoothed { base, .. } => {
                let (p, _) = base.polytope().unwrap().nearest_point(b);
                b.iter().zip(&p.0).map(|(x, y)| x - y).collect()
            }
        };
        let l = norm(&n);
        n.iter().map(|x| x / l).collect()
    }

    /// Largest Euclidean norm of a point of `K`.
    pub fn circumradius(&self) -> f64 {
        let d = self.dim as f64;
        match &self.shape {
            Shape::Ball => 1.0,
            Shape::Ellipsoid { eigenvalues, .. } => eigenvalues.last().unwrap().sqrt(),
            Shape::PBall { p, .. } => {
                if *p <= 2.0 {
                    1.0
                } else {
                    d.powf(0.5 - 1.0 / p)
                }
            }
            Shape::Polytope { poly, .. } => {
                poly.vertices().iter().map(|v| v.norm()).fold(0.0, f64::max)
            }
            Shape::Smoothed { base, radius } => base.circumradius() + radius,
        }
    }

    /// Per-axis bounds `(-h(-e_k), h(e_k))` of the bounding box.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = Vec::with_capacity(self.dim);
        let mut hi = Vec::with_capacity(self.dim);
        for k in 0..self.dim {
            let e = Vector::basis(self.dim, k);
            hi.push(self.support_unchecked(&e.0));
            lo.push(-self.support_unchecked(&(-&e).0));
        }
        (lo, hi)
    }

    /// Vertices of the underlying polytope, useful as extremal probe directions.
    pub fn vertices(&self) -> Vec<Vector> {
        self.polytope()
            .map(|p| p.vertices().to_vec())
            .unwrap_or_default()
    }

    /// `K_o = (K - K) / 2`.
    pub fn minkowski_symmetrize(&self) -> Result<ConvexBody> {
        if self.is_symmetric() {
            return Ok(self.clone());
        }
        match &self.shape {
            Shape::Polytope { poly, .. } => {
                let vs = poly.vertices();
                let mut pts = Vec::with_capacity(vs.len() * vs.len());
                for a in vs {
                    for b in vs {
                        if a != b {
                            pts.push((a - b).scale(0.5));
                        }
                    }
                }
                ConvexBody::polytope_v(self.dim, pts)
            }
            Shape::Smoothed { base, radius } => {
                ConvexBody::smoothed(base.minkowski_symmetrize()?, *radius)
            }
            _ => Ok(self.clone()),
        }
    }

    /// Translate of a vertex-described polytope.
    pub fn translate(&self, t: &Vector) -> Result<ConvexBody> {
        check_same_dim(self.dim, &t.0, "translation")?;
        match &self.shape {
            Shape::Polytope { poly, .. } => {
                ConvexBody::polytope_v(self.dim, poly.vertices().iter().map(|v| v + t).collect())
            }
            _ => Err(invalid("only polytopes can be translated")),
        }
    }

    /// Whether `points` (on the boundary) form an Auerbach basis of `K`.
    pub fn is_auerbach_basis(&self, points: &[Vector]) -> Result<bool> {
        self.is_auerbach_basis_tol(points, &Tolerances::default())
    }

    pub fn is_auerbach_basis_tol(&self, points: &[Vector], tol: &Tolerances) -> Result<bool> {
        if points.len() != self.dim {
            return Err(invalid(format!(
                "an Auerbach basis needs {} points, got {}",
                self.dim,
                points.len()
            )));
        }
        for (i, x) in points.iter().enumerate() {
            check_same_dim(self.dim, &x.0, "basis point")?;
            let g = self.gauge(x);
            if !((g - 1.0).abs() <= tol.boundary) {
                return Err(precondition(format!(
                    "basis point {i} is off the boundary (gauge {g})"
                )));
            }
        }
        let x = DMatrix::from_fn(self.dim, self.dim, |r, c| points[r][c]);
        if x.determinant().abs() <= 1e-9 {
            return Ok(false);
        }
        // rows of (X^T)^{-1} are the dual functionals n_i with n_i(x_j) = delta_ij
        let Some(dual) = x.transpose().try_inverse() else {
            return Ok(false);
        };
        for i in 0..self.dim {
            let n: Vec<f64> = dual.row(i).iter().copied().collect();
            let h = self.support_unchecked(&n);
            if (h - dot(&n, &points[i].0)).abs() > tol.equality {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Exact volume when a closed form is available.
    pub fn analytic_volume(&self) -> Option<f64> {
        let d = self.dim;
        match &self.shape {
            Shape::Ball => Some(unit_ball_volume(d)),
            Shape::Ellipsoid { eigenvalues, .. } => {
                Some(unit_ball_volume(d) * eigenvalues.iter().product::<f64>().sqrt())
            }
            Shape::PBall { p, .. } => {
                use statrs::function::gamma::ln_gamma;
                let df = d as f64;
                Some((df * (2f64.ln() + ln_gamma(1.0 + 1.0 / p)) - ln_gamma(1.0 + df / p)).exp())
            }
            Shape::Polytope { poly, .. } => poly.volume(),
            Shape::Smoothed { base, radius } if d == 2 => {
                let p = base.polytope().unwrap();
                Some(p.volume()? + p.surface_area()? * radius + PI * radius * radius)
            }
            Shape::Smoothed { .. } if d == 1 => Some(2.0 * self.support_unchecked(&[1.0])),
            _ => None,
        }
    }

    /// Exact `(d-1)`-dimensional boundary measure when a closed form is available.
    pub fn analytic_surface_area(&self) -> Option<f64> {
        let d = self.dim;
        if d == 1 {
            return Some(2.0);
        }
        match &self.shape {
            Shape::Ball => Some(d as f64 * unit_ball_volume(d)),
            Shape::Ellipsoid { eigenvalues, .. } if d == 2 => Some(ellipse_perimeter(
                eigenvalues[0].sqrt(),
                eigenvalues[1].sqrt(),
            )),
            Shape::Polytope { poly, .. } => poly.surface_area(),
            Shape::Smoothed { base, radius } if d == 2 => {
                Some(base.polytope().unwrap().surface_area()? + 2.0 * PI * radius)
            }
            _ => None,
        }
    }
}

fn ellipse_perimeter(a: f64, b: f64) -> f64 {
    // trapezoid rule is spectrally accurate for periodic integrands
    let n = 4096;
    let h = 2.0 * PI / n as f64;
    (0..n)
        .map(|k| {
            let t = k as f64 * h;
            (a * a * t.sin().powi(2) + b * b * t.cos().powi(2)).sqrt()
        })
        .sum::<f64>()
        * h
}

fn lp_norm(x: &[f64], p: f64) -> f64 {
    let m = x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if m == 0.0 {
        return 0.0;
    }
    m * x
        .iter()
        .map(|v| (v.abs() / m).powf(p))
        .sum::<f64>()
        .powf(1.0 / p)
}

/// Gauge of `P + eps B` via Newton's method on `s -> dist(s x, P) - eps`.
///
/// The map is convex and increasing past its root, so iterating from the
/// right converges monotonically.
fn smoothed_gauge(poly: &Polytope, eps: f64, x: &[f64]) -> f64 {
    let len = norm(x);
    let r_outer = poly.vertices().iter().map(|v| v.norm()).fold(0.0, f64::max) + eps;
    let mut s = r_outer / len;
    let mut y: Vec<f64> = vec![0.0; x.len()];
    for _ in 0..200 {
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi = s * xi;
        }
        let (p, dist) = poly.nearest_point(&y);
        let psi = dist - eps;
        if psi <= 1e-15 * r_outer {
            break;
        }
        let slope = y
            .iter()
            .zip(&p.0)
            .zip(x)
            .map(|((yi, pi), xi)| (yi - pi) * xi)
            .sum::<f64>()
            / dist;
        if !(slope > 0.0) {
            break;
        }
        let step = psi / slope;
        s -= step;
        if step <= 1e-16 * s {
            break;
        }
    }
    1.0 / s
}
