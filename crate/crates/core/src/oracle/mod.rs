//! Independent exact engines used to cross-validate the transfer and Monte
//! Carlo routes: combinatorial loop/strand enumeration of the Z matrix on
//! low-degree graphs, direct strand sums for vertical columns, and a
//! brute-force Schwinger-boson construction of the reduced density matrix on
//! tiny doubled graphs.

pub mod ed;
pub mod loops;
pub mod strands;

pub use ed::{doubled_graph, vbs_cut_entropy};
pub use loops::{loop_enumerate_z, LoopZ};
pub use strands::strand_z;
