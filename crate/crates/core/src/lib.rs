//! Max-plus and monotone dynamic-programming models of train dynamics on a
//! circular metro line.

pub mod analysis;
pub mod dp;
pub mod error;
pub mod graph;
pub mod line;
pub mod maxplus;
pub mod sim;
pub mod spectral;

pub use analysis::{DiagramParams, Phase};
pub use dp::{GrowthResult, HomogeneousMap, LaggedSystem, MaxAffineSystem, Piece};
pub use error::{Error, Result};
pub use graph::{Arc, Cycle, PrecedenceGraph};
pub use line::{
    closed_form_headway, place_trains, segmentize, ControlParameters, Demand, LineConfig,
    LineModel, TrainPlacement,
};
pub use maxplus::{MaxPlus, MaxPlusMatrix, MaxPlusPoly, MaxPlusPolyMatrix, Monomial};
pub use sim::{simulate, SimulationResult};
pub use spectral::{generalized_eigenpair, max_cycle_mean, CycleMean, EigenResult};

/// Bundled configuration for the nine-station Paris line 14.
pub const PARIS_LINE14: &str = include_str!("../data/paris_line14.json");
