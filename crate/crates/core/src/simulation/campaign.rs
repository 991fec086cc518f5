use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::antenna::{
    broadside_weights, cpe_gain, steering_weights, ElementPattern, HexArrayConfig, PanelFrame,
    Radiator,
};
use crate::architecture::{dl_sinr, ul_sinr, LinkBudget, RadioChain, UplinkPath};
use crate::channel::{access_path_loss, feeder_loss, LosState, NtnTables};
use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::geometry::{haps_position, link_geometry, FlightPattern, LinkGeometry, Point3};

use super::{
    aggregate, drop_terminals, schedule, sinr_to_se, uplink_grants, user_se, AttachmentMode,
    CellLayout, Direction, DropParams, LayoutMode, LinkAbstraction, PacketRecord, SeReport,
    Terminal, TerminalKind,
};

/// Length of one scheduling interval; SE is bits per (second * hertz).
const INTERVAL_S: f64 = 1.0;

/// Serving beam of a terminal.
///
/// Steering keeps the terminal on its home cell. Selection picks the beam
/// with the highest gain toward the terminal, the lowest index on ties.
/// `None` when no beam exists.
pub fn attach(mode: AttachmentMode, home_cell: usize, beam_gains: &[f64]) -> Option<usize> {
    if beam_gains.is_empty() {
        return None;
    }
    match mode {
        AttachmentMode::BeamSteering => (home_cell < beam_gains.len()).then_some(home_cell),
        AttachmentMode::BeamSelection => {
            let mut best = 0;
            for (k, &g) in beam_gains.iter().enumerate() {
                if g > beam_gains[best] {
                    best = k;
                }
            }
            Some(best)
        }
    }
}

/// One terminal's links for one platform position.
#[derive(Debug, Clone, PartialEq)]
pub struct TerminalLink {
    pub serving: Option<usize>,
    pub dl: Option<LinkBudget<f64>>,
    /// Budget of the terminal's first uplink grant.
    pub ul: Option<LinkBudget<f64>>,
    pub dl_se: f64,
    /// Mean over the terminal's uplink grants.
    pub ul_se: f64,
    pub ul_grants: usize,
    pub dl_bandwidth: f64,
    pub ul_bandwidth: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositionOutcome {
    pub index: usize,
    pub haps: Point3<f64>,
    pub feeder_loss: f64,
    pub links: Vec<TerminalLink>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TerminalResult {
    pub id: usize,
    pub position: Point3<f64>,
    pub kind: TerminalKind,
    pub los: LosState,
    /// Most frequent serving cell over the flight positions.
    pub serving_cell: Option<usize>,
    pub dl_se: f64,
    pub ul_se: f64,
    pub dl_outage: bool,
    pub ul_outage: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignResult {
    pub terminals: Vec<TerminalResult>,
    pub dl: SeReport,
    pub ul: SeReport,
    pub positions: Vec<PositionOutcome>,
}

/// Immutable campaign state: the drop, the payload and the radio chain.
#[derive(Debug, Clone)]
pub struct Campaign {
    config: ScenarioConfig,
    tables: NtnTables<f64>,
    layout: CellLayout,
    flight: FlightPattern<f64>,
    chain: RadioChain<f64>,
    payload: Payload,
    cpe: ElementPattern<f64>,
    dl_link: LinkAbstraction,
    ul_link: LinkAbstraction,
    terminals: Vec<Terminal>,
}

#[derive(Debug, Clone)]
enum Payload {
    Single(ElementPattern<f64>),
    Hex(HexArrayConfig<f64>),
}

impl Campaign {
    /// Validates the configuration and drops the terminals.
    pub fn new(config: &ScenarioConfig, tables: NtnTables<f64>) -> Result<Self> {
        config.validate()?;
        let layout = config.cell_layout();
        let flight = config.flight_pattern()?;
        let payload = match config.layout {
            LayoutMode::Single => Payload::Single(config.single_cell_pattern()?),
            LayoutMode::SevenCell => Payload::Hex(HexArrayConfig::new(&config.hex_params()?)?),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let terminals = drop_terminals(
            &DropParams {
                layout: &layout,
                count: config.terminal_count(),
                kind: config.terminal_kind,
                tx_power_dbm: config.terminal.tx_power_dbm,
                noise_figure_db: config.terminal.noise_figure_db,
                reference: flight.center,
                tables: &tables,
                target_los: config.target_los(),
            },
            &mut rng,
        )?;
        log::info!(
            "{}: {} terminals, {} LOS, {} positions",
            config.name,
            terminals.len(),
            terminals.iter().filter(|t| t.los == LosState::Los).count(),
            flight.position_count
        );
        Ok(Self {
            chain: config.radio_chain(),
            cpe: config.cpe_pattern()?,
            dl_link: config.link_abstraction,
            ul_link: config.link_abstraction_ul,
            config: config.clone(),
            tables,
            layout,
            flight,
            payload,
            terminals,
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn terminals(&self) -> &[Terminal] {
        &self.terminals
    }

    pub fn layout(&self) -> &CellLayout {
        &self.layout
    }

    /// One beam per cell for the platform at `haps`, formed at `carrier`.
    fn beams(&self, haps: Point3<f64>, carrier: f64) -> Result<Vec<Radiator<f64>>> {
        match &self.payload {
            Payload::Single(pattern) => Ok(vec![Radiator::Element {
                pattern: *pattern,
                frame: PanelFrame::nadir(),
            }]),
            Payload::Hex(hex) => hex
                .panels()
                .zip(self.layout.centers())
                .map(|(panel, center)| {
                    let weights = match self.config.attachment {
                        AttachmentMode::BeamSteering => {
                            steering_weights(panel, *center - haps, carrier)?
                        }
                        AttachmentMode::BeamSelection => broadside_weights(panel),
                    };
                    Radiator::array(panel.clone(), weights)
                })
                .collect(),
        }
    }

    fn terminal_gain(&self, t: &Terminal, g: &LinkGeometry<f64>) -> f64 {
        match t.kind {
            TerminalKind::UeOmni => self.config.terminal.omni_gain_dbi,
            // aimed at the platform in azimuth, boresight on the horizon
            TerminalKind::CpeDirectional => cpe_gain(&self.cpe, g.azimuth, g),
        }
    }

    /// Downlink and uplink budgets of every terminal at flight position `index`.
    pub fn evaluate_position(&self, index: usize) -> Result<PositionOutcome> {
        let haps = haps_position(&self.flight, index)?;
        let access = &self.config.access;
        let feeder = feeder_loss(
            haps,
            self.config.gateway_position(),
            self.config.gateway.carrier_hz,
        )?;
        let dl_beams = self.beams(haps, access.dl_carrier_hz)?;
        let ul_beams = self.beams(haps, access.ul_carrier_hz)?;

        struct Geo {
            dir: Point3<f64>,
            dl_loss: f64,
            ul_loss: f64,
            rx_gain: f64,
            dl_gains: Vec<f64>,
            serving: Option<usize>,
        }
        let geo = self
            .terminals
            .iter()
            .map(|t| {
                let g = link_geometry(t.position, haps)?;
                let dir = (t.position - haps)
                    .unit()
                    .ok_or(Error::DegenerateGeometry)?;
                let dl_loss =
                    access_path_loss(access.dl_carrier_hz, &g, t.los, &self.tables, t.shadow_db)?
                        .total;
                let ul_loss =
                    access_path_loss(access.ul_carrier_hz, &g, t.los, &self.tables, t.shadow_db)?
                        .total;
                let dl_gains: Vec<f64> = dl_beams
                    .iter()
                    .map(|b| b.gain(dir, access.dl_carrier_hz))
                    .collect();
                let serving = attach(self.config.attachment, t.home_cell, &dl_gains);
                Ok(Geo {
                    dir,
                    dl_loss,
                    ul_loss,
                    rx_gain: self.terminal_gain(t, &g),
                    dl_gains,
                    serving,
                })
            })
            .collect::<Result<Vec<_>>>()?;

        let serving: Vec<Option<usize>> = geo.iter().map(|g| g.serving).collect();
        let dl_alloc = schedule(&serving, Direction::Downlink, access.dl_bandwidth_hz, 1);
        let panel_power = self.chain.dl_panel_power(feeder);
        let ul_noise = self.chain.ul_noise(access.ul_block_hz)?;

        let mut links = Vec::with_capacity(self.terminals.len());
        for (t, (g, dl_a)) in self.terminals.iter().zip(geo.iter().zip(&dl_alloc)) {
            let (Some(s), Some(dl_a)) = (g.serving, dl_a) else {
                links.push(TerminalLink {
                    serving: None,
                    dl: None,
                    ul: None,
                    dl_se: 0.0,
                    ul_se: 0.0,
                    ul_grants: 0,
                    dl_bandwidth: access.dl_bandwidth_hz,
                    ul_bandwidth: access.ul_block_hz,
                });
                continue;
            };
            let dl_noise =
                self.chain
                    .dl_noise(t.noise_figure_db, access.dl_bandwidth_hz, g.dl_loss)?;
            let dl = dl_sinr(
                Some(s),
                &g.dl_gains,
                panel_power,
                g.dl_loss,
                g.rx_gain,
                dl_noise,
            )?;
            links.push(TerminalLink {
                serving: Some(s),
                dl_se: sinr_to_se(dl.sinr, &self.dl_link),
                dl: Some(dl),
                ul: None,
                ul_se: 0.0,
                ul_grants: 0,
                dl_bandwidth: dl_a.bandwidth,
                ul_bandwidth: access.ul_block_hz,
            });
        }

        // uplink: gain of every cell's beam toward every terminal
        let ul_gain: Vec<Vec<f64>> = geo
            .iter()
            .map(|g| {
                ul_beams
                    .iter()
                    .map(|b| b.gain(g.dir, access.ul_carrier_hz))
                    .collect()
            })
            .collect();
        let path = |j: usize, cell: usize| UplinkPath {
            tx_power: self.terminals[j].tx_power_dbm,
            tx_gain: geo[j].rx_gain,
            path_loss: geo[j].ul_loss,
            rx_gain: ul_gain[j][cell],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(1 + index as u64);
        let mut ul_sum = vec![0.0; links.len()];
        for tti in uplink_grants(&serving, access.ul_blocks, access.ul_ttis, &mut rng) {
            for g in &tti {
                let interferers: Vec<UplinkPath<f64>> = tti
                    .iter()
                    .filter(|o| o.block == g.block && o.cell != g.cell)
                    .map(|o| path(o.terminal, g.cell))
                    .collect();
                let ul = ul_sinr(Some(&path(g.terminal, g.cell)), &interferers, ul_noise)?;
                let l = &mut links[g.terminal];
                ul_sum[g.terminal] += sinr_to_se(ul.sinr, &self.ul_link);
                l.ul_grants += 1;
                l.ul.get_or_insert(ul);
            }
        }
        for (l, sum) in links.iter_mut().zip(ul_sum) {
            if l.ul_grants > 0 {
                l.ul_se = sum / l.ul_grants as f64;
            }
        }
        Ok(PositionOutcome {
            index,
            haps,
            feeder_loss: feeder,
            links,
        })
    }

    /// Evaluates every flight position.
    pub fn run(&self) -> Result<CampaignResult> {
        let order: Vec<usize> = (0..self.flight.position_count).collect();
        self.run_positions(&order)
    }

    /// Evaluates the positions in `order` (in parallel) and reduces them in
    /// position-index order, so the result does not depend on `order`.
    pub fn run_positions(&self, order: &[usize]) -> Result<CampaignResult> {
        let mut positions = order
            .par_iter()
            .map(|&i| self.evaluate_position(i))
            .collect::<Result<Vec<_>>>()?;
        positions.sort_by_key(|p| p.index);
        self.reduce(positions)
    }

    fn reduce(&self, positions: Vec<PositionOutcome>) -> Result<CampaignResult> {
        let n_cells = self.layout.cell_count();
        let mut terminals = Vec::with_capacity(self.terminals.len());
        let mut dl_users = Vec::with_capacity(self.terminals.len());
        let mut ul_users = Vec::with_capacity(self.terminals.len());
        for (i, t) in self.terminals.iter().enumerate() {
            let mut dl_packets = Vec::with_capacity(positions.len());
            let mut ul_packets = Vec::with_capacity(positions.len());
            let mut votes = vec![0usize; n_cells];
            for p in &positions {
                let l = &p.links[i];
                dl_packets.push(PacketRecord::from_se(l.dl_se, INTERVAL_S, l.dl_bandwidth)?);
                if l.ul_grants > 0 {
                    let airtime =
                        l.ul_grants as f64 * INTERVAL_S / self.config.access.ul_ttis as f64;
                    ul_packets.push(PacketRecord::from_se(l.ul_se, airtime, l.ul_bandwidth)?);
                }
                if let Some(s) = l.serving {
                    votes[s] += 1;
                }
            }
            let dl = user_se(&dl_packets);
            let ul = user_se(&ul_packets);
            let serving_cell = votes
                .iter()
                .enumerate()
                .filter(|&(_, &v)| v > 0)
                .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
                .map(|(c, _)| c);
            terminals.push(TerminalResult {
                id: t.id,
                position: t.position,
                kind: t.kind,
                los: t.los,
                serving_cell,
                dl_se: dl.se,
                ul_se: ul.se,
                dl_outage: dl.outage,
                ul_outage: ul.outage,
            });
            dl_users.push(dl);
            ul_users.push(ul);
        }
        Ok(CampaignResult {
            terminals,
            dl: aggregate(&dl_users)?,
            ul: aggregate(&ul_users)?,
            positions,
        })
    }
}

/// Builds and runs a campaign.
pub fn run_campaign(config: &ScenarioConfig, tables: NtnTables<f64>) -> Result<CampaignResult> {
    Campaign::new(config, tables)?.run()
}
