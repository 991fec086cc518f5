//! Monte Carlo campaign engine.
//!
//! A campaign drops terminals once (positions, LOS state, shadow fading),
//! then evaluates downlink and uplink SINR for every platform position on the
//! flight circle. Per-user spectral efficiency is accumulated over all
//! positions and summarized as mean and cell-edge statistics.

mod aggregate;
mod campaign;
mod drop;
mod layout;
mod link;
mod schedule;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use aggregate::{aggregate, cell_edge_count, SeReport};
pub use campaign::{
    attach, run_campaign, Campaign, CampaignResult, PositionOutcome, TerminalLink, TerminalResult,
};
pub use drop::{drop_terminals, DropParams, Terminal};
pub use layout::CellLayout;
pub use link::{sinr_to_se, LinkAbstraction};
pub use schedule::{
    schedule, uplink_grants, user_se, Allocation, Direction, PacketRecord, UplinkGrant, UserSe,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LayoutMode {
    #[serde(rename = "single")]
    Single,
    #[serde(rename = "seven-cell")]
    SevenCell,
}

impl LayoutMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "single" | "single-cell" => Some(LayoutMode::Single),
            "seven-cell" | "seven_cell" | "multi-cell" | "7-cell" => Some(LayoutMode::SevenCell),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LayoutMode::Single => "single",
            LayoutMode::SevenCell => "seven-cell",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TerminalKind {
    /// Handset with a 0 dBi omnidirectional antenna.
    #[serde(rename = "ue")]
    UeOmni,
    /// Fixed customer-premises equipment with a directional antenna.
    #[serde(rename = "cpe")]
    CpeDirectional,
}

impl TerminalKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ue" | "omni" | "ue-omni" => Some(TerminalKind::UeOmni),
            "cpe" | "cpe-directional" => Some(TerminalKind::CpeDirectional),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TerminalKind::UeOmni => "ue",
            TerminalKind::CpeDirectional => "cpe",
        }
    }
}

impl fmt::Display for TerminalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AttachmentMode {
    /// Panels steer toward fixed ground cells; terminals stay in their home cell.
    #[serde(rename = "beam-steering")]
    BeamSteering,
    /// Panels keep broadside beams; terminals pick the strongest beam.
    #[serde(rename = "beam-selection")]
    BeamSelection,
}

impl AttachmentMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "beam-steering" | "beam_steering" | "steering" => Some(AttachmentMode::BeamSteering),
            "beam-selection" | "beam_selection" | "selection" => {
                Some(AttachmentMode::BeamSelection)
            }
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AttachmentMode::BeamSteering => "beam-steering",
            AttachmentMode::BeamSelection => "beam-selection",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LosMode {
    /// Redraw LOS assignments until the LOS count hits the target.
    #[serde(rename = "target")]
    Target,
    /// Plain independent Bernoulli draws.
    #[serde(rename = "probabilistic")]
    Probabilistic,
}

impl LosMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "target" => Some(LosMode::Target),
            "probabilistic" => Some(LosMode::Probabilistic),
            _ => None,
        }
    }
}
