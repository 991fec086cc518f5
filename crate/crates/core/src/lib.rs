//! System-level Monte Carlo simulator for HAPS (high-altitude platform
//! station) networks, comparing a bent-pipe repeater payload against a
//! regenerative on-board base station.
//!
//! The radio building blocks are generic over the scalar type ([`num::Real`],
//! `f32` or `f64`); the aliases below fix them to `f64`, which is what the
//! campaign engine in [`simulation`] uses.
//!
//! ```
//! use haps_core::{channel::NtnTables, config::ScenarioConfig, simulation::run_campaign};
//!
//! let mut cfg = ScenarioConfig::preset("single-cell-rg").unwrap();
//! cfg.haps.positions = 2;
//! let result = run_campaign(&cfg, NtnTables::rural_default()).unwrap();
//! assert_eq!(result.terminals.len(), 20);
//! assert!(result.dl.mean_se > result.ul.mean_se);
//! ```

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod antenna;
pub mod architecture;
pub mod channel;
pub mod config;
pub mod consumption;
pub mod error;
pub mod geometry;
pub mod num;
pub mod report;
pub mod simulation;

pub use error::{Error, Result};

pub type Point3f = geometry::Point3<f64>;
pub type FlightPatternf = geometry::FlightPattern<f64>;
pub type LinkGeometryf = geometry::LinkGeometry<f64>;
pub type ElementPatternf = antenna::ElementPattern<f64>;
pub type PanelArrayf = antenna::PanelArray<f64>;
pub type SteeringWeightsf = antenna::SteeringWeights<f64>;
pub type HexArrayConfigf = antenna::HexArrayConfig<f64>;
pub type Radiatorf = antenna::Radiator<f64>;
pub type NtnTablesf = channel::NtnTables<f64>;
pub type LinkLossf = channel::LinkLoss<f64>;
pub type RepeaterModelf = architecture::RepeaterModel<f64>;
pub type LinkBudgetf = architecture::LinkBudget<f64>;
pub type RadioChainf = architecture::RadioChain<f64>;
pub type EfficiencyStagef = consumption::EfficiencyStage<f64>;
pub type RelayChainsf = consumption::RelayChains<f64>;
