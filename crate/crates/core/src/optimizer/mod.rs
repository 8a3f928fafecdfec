//! Grid search over test channels: frontier tracing under distortion
//! targets, and the single-encoder side-information curve used as an anchor.

mod evaluator;
mod frontier;
mod grid;
mod hull;
mod wyner_ziv;

pub use evaluator::{EncoderProblem, Scratch};
pub use frontier::{
    is_separable, optimal_rates, search, trace_frontier, FrontierPoint, Objective, SearchConfig,
    SearchOutcome, FEASIBILITY_TOL, MAX_JOINT_TRIPLES,
};
pub use grid::{enumerate_channels, grid_steps, ChannelGrid, MAX_GRID_CHANNELS};
pub use hull::{lower_hull, Envelope};
pub use wyner_ziv::{
    binary_symmetric_crossover, binary_wz_rate, embed_two_variable, wyner_ziv_reduction, WzConfig, WzPoint,
};
