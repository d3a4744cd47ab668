//! Morton-coded voxel complexes for discrete calculus on sampled geometry.
//!
//! The pipeline samples a line network, surface mesh or closed volume with
//! axis-aligned rays, turns the samples into a Morton-sorted voxel cloud,
//! sweeps stencils over the cloud to build a cubical complex, and exposes
//! incidence-based differential operators on it.

pub mod complex;
pub mod error;
pub mod geometry;
pub mod io;
pub mod morton;
pub mod operators;
pub mod sampling;
pub mod shapes;
pub mod sparse;
pub mod stencil;
pub mod voxelize;

pub use complex::{CellId, Dim, EulerCharacteristic, FaceId, VoxelComplex};
pub use error::{Error, Result};
pub use geometry::{Frame, GridSpec, LineSet, Mat3, Point3, TriMesh, Vec3};
pub use morton::{MortonCode3, MortonCode6};
pub use operators::OperatorSet;
pub use sampling::{Sampling, SamplingMode, SamplingOptions};
pub use sparse::{IndexMap, SparseMatrix};
pub use stencil::{Condition, FacePlane, Stencil, StencilKind};
pub use voxelize::{Voxel, VoxelCloud};
