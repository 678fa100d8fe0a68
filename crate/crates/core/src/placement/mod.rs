//! Placing the item classes into boxes: configuration LPs for vertical and
//! horizontal items, NFDH for small and medium items.

pub mod config;
pub mod horizontal;
pub mod lp;
pub mod small;
pub mod vertical;

pub use config::{solve_config_lp, ConfigBox, ConfigEntry, ConfigSolution, Configuration, LpError};
pub use horizontal::{group_items, place_horizontal, HorizontalPlacement};
pub use small::{place_medium, place_small, MediumPlacement, SmallPlacement};
pub use vertical::{place_vertical, VerticalPlacement};

use crate::model::Item;

/// An item id with a lower-left corner.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlacedItem {
    pub id: String,
    pub x: i64,
    pub y: i64,
}

/// A box created during placement whose position is chosen later.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExtraBox {
    pub width: i64,
    pub height: i64,
    /// Contents relative to the box's lower-left corner.
    pub items: Vec<PlacedItem>,
}

impl ExtraBox {
    pub fn single(item: &Item) -> Self {
        ExtraBox {
            width: item.width,
            height: item.height,
            items: vec![PlacedItem { id: item.id.clone(), x: 0, y: 0 }],
        }
    }
}
