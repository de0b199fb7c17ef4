//! Bilabelled graph categories, graph fibrations and exact intertwiner spaces.

pub mod diagram;
pub mod error;
pub mod fibration;
pub mod free_product;
pub mod graph;
pub mod linalg;
pub mod partition;
pub mod rep;
pub mod tensor;

pub use diagram::{BilabelledGraph, DiagramKey};
pub use error::{Error, Result};
pub use fibration::{fibration_from_group, Fibre, GraphFibration};
pub use free_product::{Membership, NormalClosureSpec, Strategy, Word};
pub use graph::{Graph, VertexMap, VertexOverlap, VertexPartition};
pub use partition::SetPartition;
pub use tensor::{build_t, build_that, BigTensor, IntTensor, LawCheck, Report};
pub use rep::{OrbitClass, PermutationGroup};
