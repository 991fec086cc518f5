//! Scenario configuration: TOML schema, defaults, validation and presets.
//!
//! Every key is optional; an empty document yields the default single-cell
//! bent-pipe scenario. Unknown keys are rejected. Enumerated settings live at
//! the top level so that the canonical dump keeps them above the tables.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::antenna::{ElementPattern, HexArrayParams};
use crate::architecture::{Architecture, RadioChain, RepeaterModel};
use crate::consumption::{h_relay, h_source, EfficiencyStage, RelayChains};
use crate::error::{Error, Result};
use crate::geometry::{FlightPattern, Point3};
use crate::simulation::{
    AttachmentMode, CellLayout, LayoutMode, LinkAbstraction, LosMode, TerminalKind,
};

macro_rules! defaults {
    ($ty:ident { $($field:ident : $value:expr),* $(,)? }) => {
        impl Default for $ty {
            fn default() -> Self {
                Self { $($field: $value),* }
            }
        }
    };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DropSection {
    /// Terminal count; 20 for a single cell and 210 for seven cells when unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terminal_count: Option<usize>,
    /// LOS count in target mode; 17 of 20 or 175 of 210 scaled when unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_los: Option<usize>,
    pub single_cell_radius_m: f64,
    pub seven_cell_radius_m: f64,
    pub outer_center_radius_m: f64,
    pub cell_azimuth_offset_deg: f64,
}

defaults!(DropSection {
    terminal_count: None,
    target_los: None,
    single_cell_radius_m: 60e3,
    seven_cell_radius_m: 100e3,
    // broadside aim point of the tilted panels: altitude / tan(23 deg)
    outer_center_radius_m: 47_117.0,
    cell_azimuth_offset_deg: 0.0,
});

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HapsSection {
    pub altitude_m: f64,
    pub flight_diameter_m: f64,
    pub positions: usize,
    /// Cruise speed; informational only since Doppler is not modeled.
    pub speed_kmh: f64,
}

defaults!(HapsSection {
    altitude_m: 20e3,
    flight_diameter_m: 6e3,
    positions: 12,
    speed_kmh: 100.0,
});

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GatewaySection {
    pub x_m: f64,
    pub y_m: f64,
    pub carrier_hz: f64,
    pub tx_power_dbm: f64,
    pub antenna_gain_dbi: f64,
    pub noise_figure_db: f64,
}

defaults!(GatewaySection {
    x_m: 45e3,
    y_m: 0.0,
    carrier_hz: 3.65e9,
    tx_power_dbm: 43.0,
    antenna_gain_dbi: 32.3,
    noise_figure_db: 3.0,
});

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RepeaterSection {
    pub gain_db: f64,
    pub noise_figure_db: f64,
    /// Clamp the repeater output at `max_output_power_dbm`.
    pub limit_output: bool,
    pub max_output_power_dbm: f64,
    /// Add the amplified repeater noise to the terminal's downlink noise.
    pub model_noise_at_ue: bool,
}

defaults!(RepeaterSection {
    gain_db: 105.0,
    noise_figure_db: 7.0,
    limit_output: false,
    max_output_power_dbm: 30.0,
    model_noise_at_ue: false,
});

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AccessSection {
    pub dl_carrier_hz: f64,
    pub ul_carrier_hz: f64,
    pub dl_bandwidth_hz: f64,
    /// Uplink allocation per terminal.
    pub ul_block_hz: f64,
    /// Uplink blocks per carrier.
    pub ul_blocks: usize,
    /// Uplink transmission intervals per platform position.
    pub ul_ttis: usize,
    pub bs_tx_power_dbm: f64,
    pub bs_noise_figure_db: f64,
}

defaults!(AccessSection {
    dl_carrier_hz: 2.1e9,
    ul_carrier_hz: 1.8e9,
    dl_bandwidth_hz: 20e6,
    ul_block_hz: 1e6,
    ul_blocks: 1,
    ul_ttis: 400,
    bs_tx_power_dbm: 43.0,
    bs_noise_figure_db: 5.0,
});

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TerminalSection {
    pub tx_power_dbm: f64,
    pub noise_figure_db: f64,
    pub omni_gain_dbi: f64,
    pub cpe_gain_dbi: f64,
    pub cpe_hpbw_deg: f64,
    pub cpe_front_to_back_db: f64,
}

defaults!(TerminalSection {
    tx_power_dbm: 23.0,
    noise_figure_db: 7.0,
    omni_gain_dbi: 0.0,
    cpe_gain_dbi: 12.0,
    cpe_hpbw_deg: 60.0,
    cpe_front_to_back_db: 30.0,
});

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AntennaSection {
    pub single_gain_dbi: f64,
    pub single_hpbw_deg: f64,
    pub single_front_to_back_db: f64,
    pub element_gain_dbi: f64,
    pub element_hpbw_deg: f64,
    pub element_front_to_back_db: f64,
    pub bottom_rows: usize,
    pub bottom_cols: usize,
    pub side_rows: usize,
    pub side_cols: usize,
    pub polarizations: usize,
    pub spacing_wavelengths: f64,
    pub design_frequency_hz: f64,
    pub side_downtilt_deg: f64,
    pub panel_azimuth_offset_deg: f64,
}

defaults!(AntennaSection {
    single_gain_dbi: 8.0,
    single_hpbw_deg: 65.0,
    single_front_to_back_db: 30.0,
    element_gain_dbi: 5.0,
    element_hpbw_deg: 90.0,
    element_front_to_back_db: 30.0,
    bottom_rows: 2,
    bottom_cols: 2,
    side_rows: 4,
    side_cols: 2,
    polarizations: 2,
    spacing_wavelengths: 0.5,
    design_frequency_hz: 2.1e9,
    side_downtilt_deg: 23.0,
    panel_azimuth_offset_deg: 0.0,
});

/// Gain (dB) and efficiency of the component chains used by the consumption
/// assessment. The values are illustrative, not measured.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConsumptionSection {
    pub relay_mixer_gain_db: f64,
    pub relay_mixer_efficiency: f64,
    pub relay_amp_efficiency: f64,
    pub source_bb_gain_db: f64,
    pub source_bb_efficiency: f64,
    pub source_mixer_gain_db: f64,
    pub source_mixer_efficiency: f64,
    pub source_rf_efficiency: f64,
    /// Receive-chain gain ahead of the relay's power amplifier, dB.
    pub relay_rx_gain_db: f64,
    pub sink_rx_gain_db: f64,
    /// Ground distances from the origin swept by the assessment, meters.
    pub terminal_distances_m: Vec<f64>,
}

defaults!(ConsumptionSection {
    relay_mixer_gain_db: 10.0,
    relay_mixer_efficiency: 0.6,
    relay_amp_efficiency: 0.3,
    source_bb_gain_db: 10.0,
    source_bb_efficiency: 0.5,
    source_mixer_gain_db: 10.0,
    source_mixer_efficiency: 0.6,
    source_rf_efficiency: 0.3,
    relay_rx_gain_db: 105.0,
    sink_rx_gain_db: 0.0,
    terminal_distances_m: vec![0.0, 10e3, 20e3, 30e3, 40e3, 50e3, 60e3, 80e3, 100e3],
});

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: String,
    pub write_cdf: bool,
}

defaults!(OutputSection {
    dir: "out".into(),
    write_cdf: true,
});

/// Fully resolved campaign description.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub seed: u64,
    pub architecture: Architecture,
    pub layout: LayoutMode,
    pub terminal_kind: TerminalKind,
    pub attachment: AttachmentMode,
    pub los_mode: LosMode,
    /// CSV file overriding the built-in NTN table.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ntn_table: Option<String>,
    pub drop: DropSection,
    pub haps: HapsSection,
    pub gateway: GatewaySection,
    pub repeater: RepeaterSection,
    pub access: AccessSection,
    pub terminal: TerminalSection,
    pub antenna: AntennaSection,
    /// Downlink SINR-to-SE mapping.
    pub link_abstraction: LinkAbstraction,
    /// Uplink SINR-to-SE mapping.
    pub link_abstraction_ul: LinkAbstraction,
    pub consumption: ConsumptionSection,
    pub output: OutputSection,
}

/// On-disk form: enumerations stay strings until validation so that bad
/// values are reported against their key.
#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawConfig {
    name: Option<String>,
    seed: Option<u64>,
    architecture: Option<String>,
    layout: Option<String>,
    terminal_kind: Option<String>,
    attachment: Option<String>,
    los_mode: Option<String>,
    ntn_table: Option<String>,
    drop: DropSection,
    haps: HapsSection,
    gateway: GatewaySection,
    repeater: RepeaterSection,
    access: AccessSection,
    terminal: TerminalSection,
    antenna: AntennaSection,
    link_abstraction: LinkAbstraction,
    #[serde(default = "LinkAbstraction::uplink")]
    link_abstraction_ul: LinkAbstraction,
    consumption: ConsumptionSection,
    output: OutputSection,
}

impl Default for RawConfig {
    fn default() -> Self {
        Self {
            name: None,
            seed: None,
            architecture: None,
            layout: None,
            terminal_kind: None,
            attachment: None,
            los_mode: None,
            ntn_table: None,
            drop: Default::default(),
            haps: Default::default(),
            gateway: Default::default(),
            repeater: Default::default(),
            access: Default::default(),
            terminal: Default::default(),
            antenna: Default::default(),
            link_abstraction: LinkAbstraction::default(),
            link_abstraction_ul: LinkAbstraction::uplink(),
            consumption: Default::default(),
            output: Default::default(),
        }
    }
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        RawConfig::default().resolve().expect("defaults are valid")
    }
}

fn enum_field<T>(
    value: Option<String>,
    field: &str,
    default: T,
    parse: fn(&str) -> Option<T>,
    allowed: &str,
) -> Result<T> {
    match value {
        None => Ok(default),
        Some(s) => {
            parse(&s).ok_or_else(|| Error::config(field, format!("`{s}` is not one of {allowed}")))
        }
    }
}

impl RawConfig {
    fn resolve(self) -> Result<ScenarioConfig> {
        let cfg = ScenarioConfig {
            name: self.name.unwrap_or_else(|| "custom".into()),
            seed: self.seed.unwrap_or(1),
            architecture: enum_field(
                self.architecture,
                "architecture",
                Architecture::BentPipe,
                Architecture::parse,
                "bp, rg",
            )?,
            layout: enum_field(
                self.layout,
                "layout",
                LayoutMode::Single,
                LayoutMode::parse,
                "single, seven-cell",
            )?,
            terminal_kind: enum_field(
                self.terminal_kind,
                "terminal_kind",
                TerminalKind::UeOmni,
                TerminalKind::parse,
                "ue, cpe",
            )?,
            attachment: enum_field(
                self.attachment,
                "attachment",
                AttachmentMode::BeamSteering,
                AttachmentMode::parse,
                "beam-steering, beam-selection",
            )?,
            los_mode: enum_field(
                self.los_mode,
                "los_mode",
                LosMode::Target,
                LosMode::parse,
                "target, probabilistic",
            )?,
            ntn_table: self.ntn_table,
            drop: self.drop,
            haps: self.haps,
            gateway: self.gateway,
            repeater: self.repeater,
            access: self.access,
            terminal: self.terminal,
            antenna: self.antenna,
            link_abstraction: self.link_abstraction,
            link_abstraction_ul: self.link_abstraction_ul,
            consumption: self.consumption,
            output: self.output,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(
            field,
            format!("{v} must be finite and positive"),
        ))
    }
}

fn non_negative(field: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(
            field,
            format!("{v} must be finite and non-negative"),
        ))
    }
}

fn finite(field: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(field, "must be finite"))
    }
}

fn efficiency(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v <= 1.0 {
        Ok(())
    } else {
        Err(Error::config(field, format!("{v} must lie in (0, 1]")))
    }
}

fn count(field: &str, v: usize) -> Result<()> {
    if v > 0 {
        Ok(())
    } else {
        Err(Error::config(field, "must be at least 1"))
    }
}

impl ScenarioConfig {
    /// Parses a TOML document and fills defaults.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| {
            let (line, column) = e
                .span()
                .map(|s| line_column(text, s.start))
                .unwrap_or((0, 0));
            Error::Parse {
                line,
                column,
                message: e.message().to_string(),
            }
        })?;
        raw.resolve()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    /// Canonical TOML form with every field spelled out.
    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("configuration serializes to TOML")
    }

    pub fn validate(&self) -> Result<()> {
        let d = &self.drop;
        if let Some(n) = d.terminal_count {
            count("drop.terminal_count", n)?;
        }
        if let (Some(t), n) = (d.target_los, self.terminal_count()) {
            if t > n {
                return Err(Error::config(
                    "drop.target_los",
                    format!("{t} exceeds the {n} terminals"),
                ));
            }
        }
        positive("drop.single_cell_radius_m", d.single_cell_radius_m)?;
        positive("drop.seven_cell_radius_m", d.seven_cell_radius_m)?;
        non_negative("drop.outer_center_radius_m", d.outer_center_radius_m)?;
        finite("drop.cell_azimuth_offset_deg", d.cell_azimuth_offset_deg)?;

        let h = &self.haps;
        positive("haps.altitude_m", h.altitude_m)?;
        non_negative("haps.flight_diameter_m", h.flight_diameter_m)?;
        count("haps.positions", h.positions)?;
        non_negative("haps.speed_kmh", h.speed_kmh)?;

        let g = &self.gateway;
        finite("gateway.x_m", g.x_m)?;
        finite("gateway.y_m", g.y_m)?;
        positive("gateway.carrier_hz", g.carrier_hz)?;
        non_negative("gateway.tx_power_dbm", g.tx_power_dbm)?;
        finite("gateway.antenna_gain_dbi", g.antenna_gain_dbi)?;
        non_negative("gateway.noise_figure_db", g.noise_figure_db)?;

        let r = &self.repeater;
        positive("repeater.gain_db", r.gain_db)?;
        non_negative("repeater.noise_figure_db", r.noise_figure_db)?;
        finite("repeater.max_output_power_dbm", r.max_output_power_dbm)?;

        let a = &self.access;
        positive("access.dl_carrier_hz", a.dl_carrier_hz)?;
        positive("access.ul_carrier_hz", a.ul_carrier_hz)?;
        positive("access.dl_bandwidth_hz", a.dl_bandwidth_hz)?;
        positive("access.ul_block_hz", a.ul_block_hz)?;
        count("access.ul_blocks", a.ul_blocks)?;
        count("access.ul_ttis", a.ul_ttis)?;
        non_negative("access.bs_tx_power_dbm", a.bs_tx_power_dbm)?;
        non_negative("access.bs_noise_figure_db", a.bs_noise_figure_db)?;

        let t = &self.terminal;
        non_negative("terminal.tx_power_dbm", t.tx_power_dbm)?;
        non_negative("terminal.noise_figure_db", t.noise_figure_db)?;
        finite("terminal.omni_gain_dbi", t.omni_gain_dbi)?;
        finite("terminal.cpe_gain_dbi", t.cpe_gain_dbi)?;
        positive("terminal.cpe_hpbw_deg", t.cpe_hpbw_deg)?;
        non_negative("terminal.cpe_front_to_back_db", t.cpe_front_to_back_db)?;

        let an = &self.antenna;
        finite("antenna.single_gain_dbi", an.single_gain_dbi)?;
        positive("antenna.single_hpbw_deg", an.single_hpbw_deg)?;
        non_negative(
            "antenna.single_front_to_back_db",
            an.single_front_to_back_db,
        )?;
        finite("antenna.element_gain_dbi", an.element_gain_dbi)?;
        positive("antenna.element_hpbw_deg", an.element_hpbw_deg)?;
        non_negative(
            "antenna.element_front_to_back_db",
            an.element_front_to_back_db,
        )?;
        count("antenna.bottom_rows", an.bottom_rows)?;
        count("antenna.bottom_cols", an.bottom_cols)?;
        count("antenna.side_rows", an.side_rows)?;
        count("antenna.side_cols", an.side_cols)?;
        count("antenna.polarizations", an.polarizations)?;
        positive("antenna.spacing_wavelengths", an.spacing_wavelengths)?;
        positive("antenna.design_frequency_hz", an.design_frequency_hz)?;
        if !(an.side_downtilt_deg > -90.0 && an.side_downtilt_deg <= 90.0) {
            return Err(Error::config(
                "antenna.side_downtilt_deg",
                "must lie in (-90, 90]",
            ));
        }
        finite(
            "antenna.panel_azimuth_offset_deg",
            an.panel_azimuth_offset_deg,
        )?;

        self.link_abstraction.validate("link_abstraction")?;
        self.link_abstraction_ul.validate("link_abstraction_ul")?;

        let c = &self.consumption;
        finite("consumption.relay_mixer_gain_db", c.relay_mixer_gain_db)?;
        efficiency(
            "consumption.relay_mixer_efficiency",
            c.relay_mixer_efficiency,
        )?;
        efficiency("consumption.relay_amp_efficiency", c.relay_amp_efficiency)?;
        finite("consumption.source_bb_gain_db", c.source_bb_gain_db)?;
        efficiency("consumption.source_bb_efficiency", c.source_bb_efficiency)?;
        finite("consumption.source_mixer_gain_db", c.source_mixer_gain_db)?;
        efficiency(
            "consumption.source_mixer_efficiency",
            c.source_mixer_efficiency,
        )?;
        efficiency("consumption.source_rf_efficiency", c.source_rf_efficiency)?;
        finite("consumption.relay_rx_gain_db", c.relay_rx_gain_db)?;
        finite("consumption.sink_rx_gain_db", c.sink_rx_gain_db)?;
        for &x in &c.terminal_distances_m {
            non_negative("consumption.terminal_distances_m", x)?;
        }

        if self.output.dir.is_empty() {
            return Err(Error::config("output.dir", "must not be empty"));
        }
        Ok(())
    }

    pub fn terminal_count(&self) -> usize {
        self.drop.terminal_count.unwrap_or(match self.layout {
            LayoutMode::Single => 20,
            LayoutMode::SevenCell => 210,
        })
    }

    /// Required LOS count, `None` in probabilistic mode.
    pub fn target_los(&self) -> Option<usize> {
        match self.los_mode {
            LosMode::Probabilistic => None,
            LosMode::Target => Some(self.drop.target_los.unwrap_or_else(|| {
                let n = self.terminal_count();
                // 17 of 20 and 175 of 210 both round from these fractions
                match self.layout {
                    LayoutMode::Single => (n * 17 + 10) / 20,
                    LayoutMode::SevenCell => (n * 175 + 105) / 210,
                }
            })),
        }
    }

    pub fn cell_layout(&self) -> CellLayout {
        match self.layout {
            LayoutMode::Single => CellLayout::single(self.drop.single_cell_radius_m),
            LayoutMode::SevenCell => CellLayout::seven_cell(
                self.drop.seven_cell_radius_m,
                self.drop.outer_center_radius_m,
                self.drop.cell_azimuth_offset_deg,
            ),
        }
    }

    pub fn flight_pattern(&self) -> Result<FlightPattern<f64>> {
        FlightPattern::new(
            Point3::new(0.0, 0.0, self.haps.altitude_m),
            self.haps.flight_diameter_m,
            self.haps.positions,
        )
    }

    pub fn gateway_position(&self) -> Point3<f64> {
        Point3::ground(self.gateway.x_m, self.gateway.y_m)
    }

    pub fn radio_chain(&self) -> RadioChain<f64> {
        RadioChain {
            architecture: self.architecture,
            bs_tx_power: self.access.bs_tx_power_dbm,
            bs_noise_figure: self.access.bs_noise_figure_db,
            gateway_tx_power: self.gateway.tx_power_dbm,
            gateway_antenna_gain: self.gateway.antenna_gain_dbi,
            gateway_noise_figure: self.gateway.noise_figure_db,
            repeater: RepeaterModel {
                gain: self.repeater.gain_db,
                noise_figure: self.repeater.noise_figure_db,
                max_output_power: self
                    .repeater
                    .limit_output
                    .then_some(self.repeater.max_output_power_dbm),
            },
            model_repeater_noise: self.repeater.model_noise_at_ue,
        }
    }

    pub fn single_cell_pattern(&self) -> Result<ElementPattern<f64>> {
        let a = &self.antenna;
        ElementPattern::new(
            a.single_gain_dbi,
            a.single_hpbw_deg,
            a.single_hpbw_deg,
            a.single_front_to_back_db,
        )
    }

    pub fn hex_params(&self) -> Result<HexArrayParams<f64>> {
        let a = &self.antenna;
        Ok(HexArrayParams {
            element: ElementPattern::new(
                a.element_gain_dbi,
                a.element_hpbw_deg,
                a.element_hpbw_deg,
                a.element_front_to_back_db,
            )?,
            bottom_rows: a.bottom_rows,
            bottom_cols: a.bottom_cols,
            side_rows: a.side_rows,
            side_cols: a.side_cols,
            polarizations: a.polarizations,
            spacing_wavelengths: a.spacing_wavelengths,
            design_frequency: a.design_frequency_hz,
            side_downtilt: a.side_downtilt_deg,
            azimuth_offset: a.panel_azimuth_offset_deg,
        })
    }

    pub fn cpe_pattern(&self) -> Result<ElementPattern<f64>> {
        let t = &self.terminal;
        ElementPattern::new(
            t.cpe_gain_dbi,
            t.cpe_hpbw_deg,
            t.cpe_hpbw_deg,
            t.cpe_front_to_back_db,
        )
    }

    /// Power-efficiency factors and receive gains of the consumption chains.
    pub fn relay_chains(&self) -> Result<RelayChains<f64>> {
        let c = &self.consumption;
        let stage = |g: f64, e: f64| EfficiencyStage::new(10f64.powf(g / 10.0), e);
        Ok(RelayChains {
            g_rx_relay: 10f64.powf(c.relay_rx_gain_db / 10.0),
            g_rx_sink: 10f64.powf(c.sink_rx_gain_db / 10.0),
            h_relay: h_relay(
                &stage(c.relay_mixer_gain_db, c.relay_mixer_efficiency),
                &EfficiencyStage::new(1.0, c.relay_amp_efficiency),
            )?,
            h_source: h_source(
                &stage(c.source_bb_gain_db, c.source_bb_efficiency),
                &stage(c.source_mixer_gain_db, c.source_mixer_efficiency),
                &EfficiencyStage::new(1.0, c.source_rf_efficiency),
            )?,
        })
    }

    /// Named scenario, see [`PRESETS`].
    pub fn preset(name: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let parts: Vec<&str> = name.split('-').collect();
        match parts.as_slice() {
            ["single", "cell", arch] => {
                cfg.architecture = parse_arch(name, arch)?;
            }
            ["multi", "cell", arch, kind, mode] => {
                cfg.architecture = parse_arch(name, arch)?;
                cfg.layout = LayoutMode::SevenCell;
                cfg.terminal_kind =
                    TerminalKind::parse(kind).ok_or_else(|| unknown_preset(name))?;
                cfg.attachment = AttachmentMode::parse(mode).ok_or_else(|| unknown_preset(name))?;
            }
            _ => return Err(unknown_preset(name)),
        }
        cfg.name = name.to_string();
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Built-in scenarios: both single-cell architectures and the full grid of
/// seven-cell cases.
pub const PRESETS: &[&str] = &[
    "single-cell-bp",
    "single-cell-rg",
    "multi-cell-bp-ue-steering",
    "multi-cell-bp-ue-selection",
    "multi-cell-bp-cpe-steering",
    "multi-cell-bp-cpe-selection",
    "multi-cell-rg-ue-steering",
    "multi-cell-rg-ue-selection",
    "multi-cell-rg-cpe-steering",
    "multi-cell-rg-cpe-selection",
];

fn parse_arch(name: &str, s: &str) -> Result<Architecture> {
    Architecture::parse(s).ok_or_else(|| unknown_preset(name))
}

fn unknown_preset(name: &str) -> Error {
    Error::config(
        "preset",
        format!("unknown preset `{name}`; known: {}", PRESETS.join(", ")),
    )
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before
        .rfind('\n')
        .map_or(before.len(), |i| before.len() - i - 1)
        + 1;
    (line, column)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_baseline() {
        let cfg = ScenarioConfig::from_toml_str("").unwrap();
        assert_eq!(cfg.architecture, Architecture::BentPipe);
        assert_eq!(cfg.layout, LayoutMode::Single);
        assert_eq!(cfg.terminal_count(), 20);
        assert_eq!(cfg.target_los(), Some(17));
        assert_eq!(cfg.repeater.gain_db, 105.0);
        assert_eq!(cfg.access.dl_bandwidth_hz, 20e6);
        assert_eq!(cfg.gateway.carrier_hz, 3.65e9);
    }

    #[test]
    fn bad_enum_names_field() {
        let err = ScenarioConfig::from_toml_str("architecture = \"XX\"").unwrap_err();
        match err {
            Error::Config { field, .. } => assert_eq!(field, "architecture"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_key_rejected_with_position() {
        let err = ScenarioConfig::from_toml_str("seed = 3\n[haps]\naltitude = 5\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn impossible_values_rejected() {
        for (doc, field) in [
            (
                "[antenna]\nsingle_hpbw_deg = 0.0",
                "antenna.single_hpbw_deg",
            ),
            ("[terminal]\ntx_power_dbm = -3.0", "terminal.tx_power_dbm"),
            (
                "[drop]\nterminal_count = 4\ntarget_los = 5",
                "drop.target_los",
            ),
        ] {
            match ScenarioConfig::from_toml_str(doc).unwrap_err() {
                Error::Config { field: f, .. } => assert_eq!(f, field),
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn canonical_dump_is_idempotent() {
        for name in PRESETS {
            let cfg = ScenarioConfig::preset(name).unwrap();
            let dumped = cfg.to_toml_string();
            let reloaded = ScenarioConfig::from_toml_str(&dumped).unwrap();
            assert_eq!(reloaded, cfg);
            assert_eq!(reloaded.to_toml_string(), dumped);
        }
    }

    #[test]
    fn presets_resolve() {
        let cfg = ScenarioConfig::preset("multi-cell-rg-cpe-selection").unwrap();
        assert_eq!(cfg.architecture, Architecture::Regenerative);
        assert_eq!(cfg.layout, LayoutMode::SevenCell);
        assert_eq!(cfg.terminal_kind, TerminalKind::CpeDirectional);
        assert_eq!(cfg.attachment, AttachmentMode::BeamSelection);
        assert_eq!(cfg.terminal_count(), 210);
        assert_eq!(cfg.target_los(), Some(175));
        assert!(ScenarioConfig::preset("multi-cell-xx-ue-steering").is_err());
        assert!(ScenarioConfig::preset("nope").is_err());
    }

    #[test]
    fn repeater_limit_flag() {
        let cfg = ScenarioConfig::from_toml_str("[repeater]\nlimit_output = true").unwrap();
        assert_eq!(cfg.radio_chain().repeater.max_output_power, Some(30.0));
        assert_eq!(
            ScenarioConfig::default()
                .radio_chain()
                .repeater
                .max_output_power,
            None
        );
    }
}
