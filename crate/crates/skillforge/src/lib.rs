//! Self-evolving agent skill engine.
//!
//! The library closes a create → execute → judge → analyze → diagnose →
//! optimize loop over versioned skill packages: it synthesizes an initial
//! skill from a ticket corpus, runs tasks with the skill loaded, judges
//! outputs against expert references, diagnoses failures across four
//! dimensions, maps failure patterns to skill defects, and rewrites the
//! skill under additive-edit constraints, producing a lineage v0..vN.
//!
//! Start with the runnable examples:
//!
//! ```bash
//! cargo run --example vfs_tour
//! cargo run --example evolve_offline
//! ```

pub mod analyzer;
pub mod gateway;
pub mod skill;
pub mod vfs;

pub use vfs::{OpResult, Vfs};
