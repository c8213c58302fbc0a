//! Totally separable packings of translates of convex bodies.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod body;
pub mod bounds;
pub mod constructors;
pub mod error;
pub mod linearization;
pub mod lp;
pub mod measure;
pub mod packing;
pub mod polytope;
pub mod sampling;
pub mod search;
pub mod separability;
pub mod tolerances;
pub mod vector;

pub use body::{BodyKind, ConvexBody, SupportingFunctional};
pub use error::{Error, Result};
pub use tolerances::Tolerances;
pub use vector::{LinearFunctional, Vector, MAX_DIM};
