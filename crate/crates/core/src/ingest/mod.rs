//! Instance acquisition: meshes, segmentation into inspection patches, cost
//! graphs, the instance file format and synthetic generators.

pub mod format;
pub mod generate;
pub mod graph;
pub mod mesh;
pub mod segment;

pub use format::{read_instance, write_instance, BEST_KNOWN_COST_KEY};
pub use generate::{generate_instance, SurfaceKind};
pub use graph::{build_graph, build_graph_with, Euclidean, MotionCost};
pub use mesh::{load_mesh, Mesh, MeshFormat};
pub use segment::{inspection_points, segment_mesh, AreaLimit, Patch, Segmentation, SegmentationConfig};

use crate::error::Result;
use crate::num::Scalar;
use crate::problem::Instance;

/// Mesh → patches → inspection points → k-NN cost graph.
pub fn instance_from_mesh<T: Scalar>(name: &str, mesh: &Mesh<T>, config: &SegmentationConfig) -> Result<Instance<T>> {
    let segmentation = segment_mesh(mesh, config)?;
    let points = inspection_points(&segmentation.patches, config);
    let instance = build_graph(name, points, config.knn)?;
    Ok(instance
        .with_metadata("faces", mesh.face_count())
        .with_metadata("patches", segmentation.patches.len())
        .with_metadata("oversized_patches", segmentation.oversized.len()))
}
