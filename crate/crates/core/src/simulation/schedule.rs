//! Full-buffer resource allocation and the per-user spectral efficiency
//! `sum(bits) / sum(duration * bandwidth)` over a user's packets.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Downlink,
    Uplink,
}

/// One transmission of a user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketRecord {
    /// Information bits delivered.
    pub bits: f64,
    /// Transmission time, seconds.
    pub duration: f64,
    /// Allocated bandwidth, Hz.
    pub bandwidth: f64,
}

impl PacketRecord {
    pub fn new(bits: f64, duration: f64, bandwidth: f64) -> Result<Self> {
        if !(bits >= 0.0) || !(duration > 0.0) || !(bandwidth > 0.0) {
            return Err(Error::domain(
                "packet needs bits >= 0, duration > 0 and bandwidth > 0",
            ));
        }
        Ok(Self {
            bits,
            duration,
            bandwidth,
        })
    }

    /// Packet carrying `se * duration * bandwidth` bits.
    pub fn from_se(se: f64, duration: f64, bandwidth: f64) -> Result<Self> {
        Self::new(se * duration * bandwidth, duration, bandwidth)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserSe {
    pub se: f64,
    /// No packet delivered any bits.
    pub outage: bool,
}

pub fn user_se(packets: &[PacketRecord]) -> UserSe {
    let bits: f64 = packets.iter().map(|p| p.bits).sum();
    let resources: f64 = packets.iter().map(|p| p.duration * p.bandwidth).sum();
    if packets.is_empty() || !(bits > 0.0) {
        return UserSe {
            se: 0.0,
            outage: true,
        };
    }
    UserSe {
        se: bits / resources,
        outage: false,
    }
}

/// Resources granted to one terminal for one scheduling interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Allocation {
    pub bandwidth: f64,
    /// Uplink block index within the carrier (always 0 for downlink).
    pub block: usize,
    /// Uplink time slot; cells with more terminals than blocks cycle
    /// through several slots.
    pub slot: usize,
}

/// Allocates resources to terminals given their serving cell (`None` when
/// detached).
///
/// * Downlink: each cell's `bandwidth` is shared equally among its terminals.
/// * Uplink: each terminal gets one block of `bandwidth`, assigned
///   round-robin in id order within its cell over `blocks` blocks. Terminals
///   of different cells with the same `(slot, block)` collide.
pub fn schedule(
    serving: &[Option<usize>],
    direction: Direction,
    bandwidth: f64,
    blocks: usize,
) -> Vec<Option<Allocation>> {
    let mut per_cell: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, s) in serving.iter().enumerate() {
        if let Some(c) = s {
            per_cell.entry(*c).or_default().push(i);
        }
    }
    let mut out = vec![None; serving.len()];
    for members in per_cell.values() {
        for (rank, &i) in members.iter().enumerate() {
            out[i] = Some(match direction {
                Direction::Downlink => Allocation {
                    bandwidth: bandwidth / members.len() as f64,
                    block: 0,
                    slot: 0,
                },
                Direction::Uplink => Allocation {
                    bandwidth,
                    block: rank % blocks.max(1),
                    slot: rank / blocks.max(1),
                },
            });
        }
    }
    out
}

/// One uplink transmission opportunity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UplinkGrant {
    pub terminal: usize,
    pub cell: usize,
    pub block: usize,
}

/// Full-buffer uplink grants over `ttis` transmission intervals.
///
/// Every cell with attached terminals fills all `blocks` blocks in every
/// interval, cycling through its terminals in rounds. Each round visits every
/// terminal once in an order shuffled by `rng`, so over many intervals a
/// terminal meets many different co-scheduled terminals of other cells.
/// Grants of different cells on the same block collide.
pub fn uplink_grants<R: Rng + ?Sized>(
    serving: &[Option<usize>],
    blocks: usize,
    ttis: usize,
    rng: &mut R,
) -> Vec<Vec<UplinkGrant>> {
    let mut per_cell: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, s) in serving.iter().enumerate() {
        if let Some(c) = s {
            per_cell.entry(*c).or_default().push(i);
        }
    }
    let blocks = blocks.max(1);
    let mut queues: Vec<(usize, Vec<usize>, Vec<usize>)> = per_cell
        .into_iter()
        .map(|(c, members)| (c, members, Vec::new()))
        .collect();
    let mut out = Vec::with_capacity(ttis);
    for _ in 0..ttis {
        let mut grants = Vec::new();
        for (cell, members, pending) in &mut queues {
            for block in 0..blocks.min(members.len()) {
                if pending.is_empty() {
                    *pending = members.clone();
                    pending.shuffle(rng);
                }
                let terminal = pending.pop().expect("refilled above");
                grants.push(UplinkGrant {
                    terminal,
                    cell: *cell,
                    block,
                });
            }
        }
        out.push(grants);
    }
    out
}
