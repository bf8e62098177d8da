//! Exact equivariant vertex computations for curve counting on toric
//! Calabi-Yau 4-folds.
//!
//! The crate enumerates torus-fixed points (solid partitions on the
//! ideal-sheaf side, box configurations on the stable-pairs side), computes
//! their square-rooted, insertion-twisted vertex and edge classes as factored
//! rational expressions over exact integers, assembles generating series,
//! searches sign choices, and checks the correspondence identities and their
//! three limits at low orders.

pub mod character;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod laurent;
pub mod limits;
pub mod oracles;
pub mod partitions;
pub mod series;
pub mod signs;
pub mod verify;
pub mod vertexcore;

pub use error::QvError;
