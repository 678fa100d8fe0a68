//! Strip packing: place rectangles into a strip of fixed width, minimising height.
//!
//! The crate bundles classical shelf baselines, an exact branch-and-bound oracle and a
//! structured pipeline built from item classification, height rounding, box
//! reordering, configuration linear programs and a dynamic program over box loads.

pub mod baselines;
pub mod classify;
pub mod cli;
pub mod gen;
pub mod model;
pub mod placement;
pub mod rational;
pub mod restructure;
pub mod search;
pub mod solver;

pub use model::{lower_bound, packing_height, total_area, validate_packing, Instance, Item, Packing, Placement};
