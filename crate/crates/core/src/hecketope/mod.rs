//! The truncated Hecketope and the fibers `W_u` dual to it.

mod ball;
mod fiber;
mod gamma;

pub use ball::{ball_score, hull_point, select_ball};
pub use fiber::{
    cell_facets, default_vertex_count, dump_line, fiber_cells, fiber_with_retry, psi_rank, Fiber, FiberCell, Vertex,
};
pub use gamma::{cell_key, gamma_classify, gamma_member, stabilizer, transform_set, transporters, CellKey, Marked, OrbitTable};
