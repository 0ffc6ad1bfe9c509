//! Robinson tiles, a finite tiler, cross-net checks and the three-layer
//! homogeneity composition.

pub mod compose;
pub mod crossnet;
pub mod export;
pub mod tiler;
pub mod tileset;

pub use compose::{
    compose_homogeneity_layers, composed_count_by_components, homogeneity_growth, GrowthCell,
    GrowthReport,
};
pub use crossnet::{verify_cross_net, CrossNetReport, LevelReport, NET_BORDER};
pub use export::{cross_highlight_ppm, tiling_pgm};
pub use tiler::{tile_rectangle, Boundary, RobinsonTiling, TilingOutcome};
pub use tileset::{
    generate_robinson_tiles, robinson_set, robinson_tiles, robinson_tileset, tileset_document,
    tileset_from_tiles, Edge, Edges, RobinsonSet, RobinsonTile, TileKind, TilesetDocument,
    TILESET_VERSION,
};
