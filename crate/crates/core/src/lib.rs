//! Exact adapted optimal transport between finitely supported path measures.

pub mod adapted;
pub mod bounds;
pub mod error;
pub mod measure;
pub mod moduli;
pub mod ot;
pub mod scalar;
pub mod smoothing;

pub use error::{Error, Result};
pub use measure::{tv_distance, DisintegrationTree, PathMeasure};
pub use scalar::Scalar;

pub type Measure = PathMeasure<f64>;
pub type Measure32 = PathMeasure<f32>;
pub type Tree = DisintegrationTree<f64>;
