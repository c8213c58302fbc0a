//! Explicit configurations and bodies.

use crate::body::ConvexBody;
use crate::error::{invalid, precondition, Result};
use crate::linearization::{ExactPairSystem, PairSystem};
use crate::lp::Surd3;
use crate::packing::Packing;
use crate::vector::Vector;

fn require_auerbach(body: &ConvexBody, basis: &[Vector]) -> Result<()> {
    if body.is_auerbach_basis(basis)? {
        Ok(())
    } else {
        Err(precondition("the given points are not an Auerbach basis"))
    }
}

/// Touching vectors `±2 a_i` of the cross-polytope configuration on an Auerbach basis.
pub fn cross_polytope_config(body: &ConvexBody, auerbach: &[Vector]) -> Result<Vec<Vector>> {
    require_auerbach(body, auerbach)?;
    Ok(auerbach
        .iter()
        .flat_map(|a| [a.scale(2.0), a.scale(-2.0)])
        .collect())
}

/// The `k x k` grid `{2i a_1 + 2j a_2}` on a planar Auerbach basis, ordered row by row.
pub fn grid_packing_2d(body: &ConvexBody, auerbach: &[Vector], k: usize) -> Result<Packing> {
    if body.dim() != 2 {
        return Err(invalid("grid packings are planar"));
    }
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    require_auerbach(body, auerbach)?;
    let (a, b) = (&auerbach[0], &auerbach[1]);
    let centers = (0..k)
        .flat_map(|j| {
            (0..k).map(move |i| {
                let (s, t) = (2.0 * i as f64, 2.0 * j as f64);
                Vector(vec![s * a[0] + t * b[0], s * a[1] + t * b[1]])
            })
        })
        .collect();
    Packing::new(body.clone(), centers)
}

/// Six pairs in dimension 5 satisfying OpenLin with `o` outside the hull of
/// the vectors: three unit vectors plus three points over the triangle
/// `(e_1 + e_2 + e_3) / 3 + v_i`, `v_i` an equilateral triangle in `span{e_4, e_5}`.
pub fn example_5d_exact() -> ExactPairSystem<Surd3> {
    let q = Surd3::from_ratio;
    let zero = || q(0, 1);
    let third = || q(1, 3);
    // (e_4, e_5) coordinates of the triangle
    let tri = [
        [q(1, 1), q(0, 1)],
        [q(-1, 2), Surd3::sqrt3_times(1, 2)],
        [q(-1, 2), Surd3::sqrt3_times(-1, 2)],
    ];
    let mut xs = Vec::with_capacity(6);
    let mut fs = Vec::with_capacity(6);
    for i in 0..3 {
        let mut x = vec![zero(), zero(), zero(), zero(), zero()];
        x[i] = q(1, 1);
        xs.push(x);
        let mut f = vec![q(-1, 2), q(-1, 2), q(-1, 2), zero(), zero()];
        f[i] = q(1, 1);
        fs.push(f);
    }
    for v in &tri {
        xs.push(vec![third(), third(), third(), v[0].clone(), v[1].clone()]);
        fs.push(vec![zero(), zero(), zero(), v[0].clone(), v[1].clone()]);
    }
    ExactPairSystem { dim: 5, xs, fs }
}

pub fn example_5d() -> PairSystem {
    example_5d_exact()
        .to_f64()
        .expect("the example is normalised")
}

/// `conv{±e_1, ±e_2, ±e_3, ±0.9 (e_1 + e_2 + e_3)} + epsilon B^3`.
pub fn spiky_body_3d(epsilon: f64) -> Result<ConvexBody> {
    if !(epsilon > 0.0 && epsilon <= 0.1) {
        return Err(invalid("epsilon must lie in (0, 0.1]"));
    }
    let mut vertices = Vec::with_capacity(8);
    for k in 0..3 {
        vertices.push(Vector::basis(3, k));
        vertices.push(Vector::basis(3, k).scale(-1.0));
    }
    vertices.push(Vector(vec![0.9; 3]));
    vertices.push(Vector(vec![-0.9; 3]));
    ConvexBody::smoothed(ConvexBody::polytope_v(3, vertices)?, epsilon)
}

/// Coordinate axes scaled onto the boundary of `body`.
pub fn axis_basis(body: &ConvexBody) -> Result<Vec<Vector>> {
    (0..body.dim())
        .map(|k| body.boundary_point(&Vector::basis(body.dim(), k)))
        .collect()
}

/// Touching vectors `c_k - c_0` of a packing whose first member is the central body.
pub fn touching_vectors(p: &Packing) -> Vec<Vector> {
    let c0 = &p.centers()[0];
    p.centers()[1..].iter().map(|c| c - c0).collect()
}
