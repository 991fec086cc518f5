use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::channel::{assign_los, LosState, NtnTables};
use crate::error::{Error, Result};
use crate::geometry::{link_geometry, Point3};

use super::{CellLayout, TerminalKind};

/// Upper bound on LOS redraws in target-count mode.
const MAX_LOS_ATTEMPTS: usize = 100_000;

/// A dropped UE or CPE. LOS state and shadow fading are fixed for the campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct Terminal {
    pub id: usize,
    pub position: Point3<f64>,
    pub kind: TerminalKind,
    pub tx_power_dbm: f64,
    pub noise_figure_db: f64,
    pub los: LosState,
    /// Shadow-fading draw in dB, shared by downlink and uplink.
    pub shadow_db: f64,
    /// Ground cell containing the terminal.
    pub home_cell: usize,
}

pub struct DropParams<'a> {
    pub layout: &'a CellLayout,
    pub count: usize,
    pub kind: TerminalKind,
    pub tx_power_dbm: f64,
    pub noise_figure_db: f64,
    /// Point the LOS and shadow bins are evaluated against (the flight-circle center).
    pub reference: Point3<f64>,
    pub tables: &'a NtnTables<f64>,
    /// Required number of LOS terminals, if any.
    pub target_los: Option<usize>,
}

/// Drops `count` terminals uniformly over the service disc.
///
/// Random draws happen in a fixed order (positions, then LOS, then shadow
/// fading) and never depend on the terminal kind, so UE and CPE campaigns
/// with the same seed share locations and fading.
pub fn drop_terminals<R: Rng + ?Sized>(p: &DropParams<'_>, rng: &mut R) -> Result<Vec<Terminal>> {
    if p.count == 0 {
        return Err(Error::config("drop.count", "need at least one terminal"));
    }
    let positions: Vec<Point3<f64>> = (0..p.count)
        .map(|_| {
            let r = p.layout.radius() * rng.random::<f64>().sqrt();
            let theta = std::f64::consts::TAU * rng.random::<f64>();
            Point3::ground(r * theta.cos(), r * theta.sin())
        })
        .collect();
    let elevations = positions
        .iter()
        .map(|pos| link_geometry(*pos, p.reference).map(|g| g.elevation))
        .collect::<Result<Vec<_>>>()?;

    let los = match p.target_los {
        None => elevations
            .iter()
            .map(|&e| assign_los(e, p.tables, rng))
            .collect(),
        Some(target) => draw_los_with_target(&elevations, p.tables, target, rng)?,
    };

    let mut terminals = Vec::with_capacity(p.count);
    for (id, ((position, elevation), los)) in
        positions.into_iter().zip(elevations).zip(los).enumerate()
    {
        let std = p.tables.bin(elevation).shadow_std(los);
        let shadow_db = if std > 0.0 {
            Normal::new(0.0, std)
                .map_err(|e| Error::config("ntn_table", e.to_string()))?
                .sample(rng)
        } else {
            0.0
        };
        terminals.push(Terminal {
            id,
            position,
            kind: p.kind,
            tx_power_dbm: p.tx_power_dbm,
            noise_figure_db: p.noise_figure_db,
            los,
            shadow_db,
            home_cell: p.layout.cell_of(position),
        });
    }
    Ok(terminals)
}

fn draw_los_with_target<R: Rng + ?Sized>(
    elevations: &[f64],
    tables: &NtnTables<f64>,
    target: usize,
    rng: &mut R,
) -> Result<Vec<LosState>> {
    let field = "drop.target_los";
    let n = elevations.len();
    if target > n {
        return Err(Error::config(
            field,
            format!("{target} LOS terminals requested out of {n}"),
        ));
    }
    let probs: Vec<f64> = elevations
        .iter()
        .map(|&e| tables.bin(e).los_probability)
        .collect();
    let can_be_los = probs.iter().filter(|&&q| q > 0.0).count();
    let can_be_nlos = probs.iter().filter(|&&q| q < 1.0).count();
    if target > can_be_los || n - target > can_be_nlos {
        return Err(Error::config(
            field,
            format!("{target} LOS of {n} is unreachable with the table's LOS probabilities"),
        ));
    }
    for _ in 0..MAX_LOS_ATTEMPTS {
        let draw: Vec<LosState> = elevations
            .iter()
            .map(|&e| assign_los(e, tables, rng))
            .collect();
        if draw.iter().filter(|&&s| s == LosState::Los).count() == target {
            return Ok(draw);
        }
    }
    Err(Error::config(
        field,
        format!("no LOS assignment with {target} LOS terminals after {MAX_LOS_ATTEMPTS} draws"),
    ))
}
