//! Turning an arbitrary packing into one made of few uniform containers.
//!
//! Tall items stay whole; everything else is cut into unit-width slices that
//! only need to be conserved as a multiset. The reorderings move items up or
//! down inside their column and then permute columns so that equal heights end
//! up next to each other.

mod boxes;
mod engine;
mod grid;
mod partition;
mod shelf;
mod structure;

use serde::{Deserialize, Serialize};

use crate::model::Rect;

pub use boxes::{
    reorder_medium_box, reorder_small_box, reorder_tall_box, simple_reorder, BoxContents, BoxReorder, ExtraSlices,
    MediumReorder, SimpleReorder,
};
pub use engine::ReorderStats;
pub use grid::{check_disjoint, default_lines, make_grid_packing, slice_multiset, GridError, GridPacking, Slice, TallItem};
pub use partition::{
    check_partition, grid_step, partition_into_boxes, BoxPartition, PartitionError, PartitionReport, PartitionViolation,
};
pub use structure::{build_structure, structure_limit, StructureError, StructureStats, StructuredPacking};
pub use shelf::{two_shelf_reorder, ShapeError, ShelfItem, ShelfLayout, ShelfSide};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoxKind {
    LargeItem,
    Horizontal,
    TallVertical,
    TallSub,
    VerticalSub,
    SmallEmpty,
    ExtraVertical,
}

/// A typed rectangular part of a packing.
///
/// For `TallSub` and `VerticalSub` boxes `uniform_height` is the common height
/// of what is stacked inside: the tall items, or the pseudo item the slices were
/// gathered into.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoxArea {
    pub kind: BoxKind,
    pub rect: Rect,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniform_height: Option<i64>,
}

impl BoxArea {
    pub fn new(kind: BoxKind, rect: Rect) -> Self {
        BoxArea { kind, rect, uniform_height: None }
    }

    pub fn uniform(kind: BoxKind, rect: Rect, h: i64) -> Self {
        BoxArea { kind, rect, uniform_height: Some(h) }
    }
}

/// Containers produced by a reordering.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContainerSet {
    pub tall_containers: Vec<BoxArea>,
    pub sliced_containers: Vec<BoxArea>,
    /// Height of the region the containers live in.
    pub height: i64,
}

impl ContainerSet {
    pub fn all(&self) -> impl Iterator<Item = &BoxArea> {
        self.tall_containers.iter().chain(&self.sliced_containers)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ReorderError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("box height {hb} is outside the range for this reordering (H = {big_h})")]
    HeightOutOfRange { hb: i64, big_h: i64 },
    #[error("tall item {0} crosses the box border too high")]
    BorderViolation(String),
    #[error("too many items cross one box border")]
    TooManyUnmovables,
    #[error("slab at x = {0} has more tall items than its box allows")]
    Crowded(i64),
    #[error("{stage}: {detail}")]
    Stage { stage: &'static str, detail: String },
}

impl ReorderError {
    pub(crate) fn stage(stage: &'static str, detail: impl Into<String>) -> Self {
        ReorderError::Stage { stage, detail: detail.into() }
    }
}
