//! Corridor selection for new roads: k spatially dissimilar, near-optimal 3D
//! corridors over an orientation-augmented terrain grid.
//!
//! All numerics are generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64`, which the CLI and bench use.

pub mod bench;
pub mod cli;
pub mod cost;
pub mod dissimilarity;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod multipath;
pub mod scalar;
pub mod search;
pub mod terrain;

pub use cost::CostModel;
pub use dissimilarity::{area_diff, AreaConfig, Decision, PathSet, StationProfile};
pub use error::{CorridorError, Result};
pub use graph::{AugVertex, GeomEdge, Graph3do, GraphStats, GridPoint, HeightMask};
pub use multipath::{solve, Algorithm, HeightRule, LabelKeying, MultipathConfig, MultipathResult};
pub use scalar::Scalar;
pub use search::{EdgeRules, MeetEvent, Path, SearchOutcome, SearchProblem, SearchStats};
pub use terrain::{synth_terrain, TerrainClassBreakdown, TerrainGrid};

pub type Grid = TerrainGrid<f64>;
pub type Model = CostModel<f64>;
pub type Route = Path<f64>;
pub type Areas = AreaConfig<f64>;
pub type Config = MultipathConfig<f64>;
pub type Outcome = MultipathResult<f64>;
