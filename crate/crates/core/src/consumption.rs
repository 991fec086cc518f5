//! Consumption-factor analysis of the two payloads.
//!
//! A transmit chain is a cascade of stages with gain `G_k` and power
//! efficiency `eta_k`. Its power-efficiency factor is
//!
//! ```text
//! H = { 1 + sum_k (1/eta_k - 1) / (G_1 ... G_{k-1}) }^-1
//! ```
//!
//! with stages ordered from the source toward the antenna. Antennas are
//! lossless (`eta = 1`) and drop out. Relaying through the platform saves
//! energy when the terminal lies inside the ellipse
//!
//! ```text
//! (d1/d3)^2 / (G_rx,relay / G_rx,sink) + (d2/d3)^2 / (H_relay / H_source) < 1
//! ```

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::num::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyStage<T> {
    /// Linear power gain.
    pub gain: T,
    /// Power efficiency in `(0, 1]`.
    pub efficiency: T,
}

impl<T: Real> EfficiencyStage<T> {
    pub fn new(gain: T, efficiency: T) -> Self {
        Self { gain, efficiency }
    }

    fn check(&self, idx: usize) -> Result<()> {
        if !(self.efficiency > T::zero()) || self.efficiency > T::one() {
            return Err(Error::domain(format!(
                "stage {idx}: efficiency {} outside (0, 1]",
                self.efficiency
            )));
        }
        if !(self.gain > T::zero()) || !self.gain.is_finite() {
            return Err(Error::domain(format!(
                "stage {idx}: gain must be finite and positive"
            )));
        }
        Ok(())
    }

    fn excess(&self) -> T {
        T::one() / self.efficiency - T::one()
    }
}

/// Power-efficiency factor of an N-stage cascade ordered source to antenna.
pub fn power_efficiency_factor<T: Real>(stages: &[EfficiencyStage<T>]) -> Result<T> {
    if stages.is_empty() {
        return Err(Error::domain("efficiency chain needs at least one stage"));
    }
    for (i, s) in stages.iter().enumerate() {
        s.check(i)?;
    }
    // H = eta_1 / (1 + eta_1 * tail), exact for a single stage
    let first = stages[0];
    let mut tail = T::zero();
    let mut gain_before = first.gain;
    for s in &stages[1..] {
        tail = tail + s.excess() / gain_before;
        gain_before = gain_before * s.gain;
    }
    Ok(first.efficiency / (T::one() + first.efficiency * tail))
}

/// Repeater payload: mixer followed by RF amplifier.
pub fn h_relay<T: Real>(mixer: &EfficiencyStage<T>, amp: &EfficiencyStage<T>) -> Result<T> {
    mixer.check(0)?;
    amp.check(1)?;
    let one = T::one();
    Ok(one
        / (one
            + (one / mixer.efficiency - one)
            + (one / mixer.gain) * (one / amp.efficiency - one)))
}

/// Base-station payload: baseband amplifier, mixer, RF amplifier.
pub fn h_source<T: Real>(
    bb_amp: &EfficiencyStage<T>,
    mixer: &EfficiencyStage<T>,
    rf_amp: &EfficiencyStage<T>,
) -> Result<T> {
    bb_amp.check(0)?;
    mixer.check(1)?;
    rf_amp.check(2)?;
    let one = T::one();
    Ok(one
        / (one
            + (one / bb_amp.efficiency - one)
            + (one / bb_amp.gain) * (one / mixer.efficiency - one)
            + (one / (bb_amp.gain * mixer.gain)) * (one / rf_amp.efficiency - one)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelayScenario<T> {
    /// Source to relay, meters.
    pub d1: T,
    /// Relay to sink, meters.
    pub d2: T,
    /// Source to sink, meters.
    pub d3: T,
    pub g_rx_relay: T,
    pub g_rx_sink: T,
    pub h_relay: T,
    pub h_source: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    RelayPreferred,
    DirectPreferred,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::RelayPreferred => "relay_preferred",
            Verdict::DirectPreferred => "direct_preferred",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelayAdvantage<T> {
    pub verdict: Verdict,
    /// Right-hand side of the ellipse inequality.
    pub rhs: T,
    /// `1 - rhs`; positive when relaying is preferred.
    pub margin: T,
}

pub fn relay_advantage<T: Real>(s: &RelayScenario<T>) -> Result<RelayAdvantage<T>> {
    if !(s.d3 > T::zero()) {
        return Err(Error::domain("source-to-sink distance must be positive"));
    }
    if !(s.d1 > T::zero()) || !(s.d2 > T::zero()) {
        return Err(Error::domain("relay distances must be positive"));
    }
    if !(s.g_rx_relay > T::zero()) || !(s.g_rx_sink > T::zero()) {
        return Err(Error::domain("receive gains must be positive"));
    }
    for h in [s.h_relay, s.h_source] {
        if !(h > T::zero()) || h > T::one() {
            return Err(Error::domain("power-efficiency factors must lie in (0, 1]"));
        }
    }
    let r1 = s.d1 / s.d3;
    let r2 = s.d2 / s.d3;
    let rhs = r1 * r1 / (s.g_rx_relay / s.g_rx_sink) + r2 * r2 / (s.h_relay / s.h_source);
    let verdict = if rhs < T::one() {
        Verdict::RelayPreferred
    } else {
        Verdict::DirectPreferred
    };
    Ok(RelayAdvantage {
        verdict,
        rhs,
        margin: T::one() - rhs,
    })
}

/// One terminal of a platform relay assessment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssessmentRow<T> {
    pub d1: T,
    pub d2: T,
    pub d3: T,
    /// `(d1/d3)^2`.
    pub d1_d3_sq: T,
    /// Whether `(d1/d3)^2 < 25/4`.
    pub within_distance_bound: bool,
    pub advantage: RelayAdvantage<T>,
}

/// Receive gains and efficiency factors shared by every terminal of an assessment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelayChains<T> {
    pub g_rx_relay: T,
    pub g_rx_sink: T,
    pub h_relay: T,
    pub h_source: T,
}

/// Bent-pipe versus regenerative verdict per terminal. `d1` is the feeder
/// slant range, and `d2 = d3` the access slant range.
pub fn haps_relay_assessment<T: Real>(
    haps: Point3<T>,
    gateway: Point3<T>,
    terminals: &[Point3<T>],
    chains: &RelayChains<T>,
) -> Result<Vec<AssessmentRow<T>>> {
    let d1 = haps.distance(gateway);
    terminals
        .iter()
        .map(|t| {
            let d3 = haps.distance(*t);
            let advantage = relay_advantage(&RelayScenario {
                d1,
                d2: d3,
                d3,
                g_rx_relay: chains.g_rx_relay,
                g_rx_sink: chains.g_rx_sink,
                h_relay: chains.h_relay,
                h_source: chains.h_source,
            })?;
            let d1_d3_sq = (d1 / d3) * (d1 / d3);
            Ok(AssessmentRow {
                d1,
                d2: d3,
                d3,
                d1_d3_sq,
                within_distance_bound: d1_d3_sq < T::lit(6.25),
                advantage,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn st(g: f64, e: f64) -> EfficiencyStage<f64> {
        EfficiencyStage::new(g, e)
    }

    #[test]
    fn generic_factor_examples() {
        assert_eq!(
            power_efficiency_factor(&[st(10.0, 1.0), st(3.0, 1.0)]).unwrap(),
            1.0
        );
        assert_eq!(power_efficiency_factor(&[st(7.0, 0.4)]).unwrap(), 0.4);
        // 1 / (1 + 1 + 0.1)
        assert_abs_diff_eq!(
            power_efficiency_factor(&[st(10.0, 0.5), st(1.0, 0.5)]).unwrap(),
            1.0 / 2.1,
            epsilon = 1e-15
        );
        assert!(power_efficiency_factor::<f64>(&[]).is_err());
        assert!(power_efficiency_factor(&[st(1.0, 0.0)]).is_err());
        assert!(power_efficiency_factor(&[st(1.0, 1.2)]).is_err());
    }

    #[test]
    fn relay_and_source_examples() {
        assert_eq!(h_relay(&st(3.0, 1.0), &st(100.0, 1.0)).unwrap(), 1.0);
        assert_abs_diff_eq!(
            h_relay(&st(1.0, 0.5), &st(100.0, 0.5)).unwrap(),
            1.0 / 3.0,
            epsilon = 1e-15
        );
        assert_eq!(
            h_source(&st(2.0, 1.0), &st(2.0, 1.0), &st(2.0, 1.0)).unwrap(),
            1.0
        );
        // 1 / (1 + 1 + 0.1 + 0.01)
        let h = h_source(&st(10.0, 0.5), &st(10.0, 0.5), &st(5.0, 0.5)).unwrap();
        assert_abs_diff_eq!(h, 1.0 / 2.11, epsilon = 1e-15);
        assert_eq!((h * 1000.0).round() / 1000.0, 0.474);
    }

    #[test]
    fn relay_advantage_examples() {
        let base = RelayScenario {
            d1: 50.0,
            d2: 50.0,
            d3: 100.0,
            g_rx_relay: 1.0,
            g_rx_sink: 1.0,
            h_relay: 0.5,
            h_source: 0.5,
        };
        let a = relay_advantage(&base).unwrap();
        assert_abs_diff_eq!(a.rhs, 0.5, epsilon = 1e-15);
        assert_eq!(a.verdict, Verdict::RelayPreferred);
        assert_abs_diff_eq!(a.margin, 0.5, epsilon = 1e-15);

        let far = RelayScenario {
            d1: 100.0,
            d2: 100.0,
            ..base
        };
        let a = relay_advantage(&far).unwrap();
        assert_abs_diff_eq!(a.rhs, 2.0, epsilon = 1e-15);
        assert_eq!(a.verdict, Verdict::DirectPreferred);

        let huge_gain = RelayScenario {
            d1: 100.0,
            d2: 1.0,
            g_rx_relay: 1e12,
            ..base
        };
        let a = relay_advantage(&huge_gain).unwrap();
        assert!(a.rhs < 1e-3);
        assert_eq!(a.verdict, Verdict::RelayPreferred);

        assert!(relay_advantage(&RelayScenario { d3: 0.0, ..base }).is_err());
    }

    fn haps() -> Point3<f64> {
        Point3::new(0.0, 0.0, 20e3)
    }

    fn gateway() -> Point3<f64> {
        Point3::ground(45e3, 0.0)
    }

    #[test]
    fn baseline_geometry_distance_bound() {
        let chains = RelayChains {
            g_rx_relay: 10f64.powf(10.5),
            g_rx_sink: 1.0,
            h_relay: 0.5,
            h_source: 0.5,
        };
        let rows = haps_relay_assessment(haps(), gateway(), &[Point3::ground(20e3, 0.0)], &chains)
            .unwrap();
        let r = rows[0];
        assert_abs_diff_eq!(r.d3, 28_284.271_247_461_9, epsilon = 1e-6);
        assert_abs_diff_eq!(r.d1, 49_244.289_008_980_52, epsilon = 1e-6);
        // 2425 / 800
        assert_abs_diff_eq!(r.d1_d3_sq, 3.031_25, epsilon = 1e-12);
        assert!(r.within_distance_bound);
        // equal H, enormous relay gain: rhs = tiny + 1, direct wins on the boundary
        assert!(r.advantage.rhs >= 1.0);
        assert_eq!(r.advantage.verdict, Verdict::DirectPreferred);

        let terminals: Vec<_> = (0..=60)
            .map(|k| Point3::ground(1e3 * k as f64, 0.0))
            .collect();
        for row in haps_relay_assessment(haps(), gateway(), &terminals, &chains).unwrap() {
            assert!(row.within_distance_bound);
        }
    }

    #[test]
    fn efficient_repeater_is_preferred() {
        let chains = RelayChains {
            g_rx_relay: 10f64.powf(10.5),
            g_rx_sink: 1.0,
            h_relay: 0.6,
            h_source: 0.45,
        };
        let rows = haps_relay_assessment(haps(), gateway(), &[Point3::ground(30e3, 10e3)], &chains)
            .unwrap();
        assert_eq!(rows[0].advantage.verdict, Verdict::RelayPreferred);
    }

    fn chain_strategy() -> impl Strategy<Value = Vec<(f64, f64)>> {
        proptest::collection::vec((0.01f64..1000.0, 0.01f64..=1.0), 1..6)
    }

    proptest! {
        #[test]
        fn factor_in_unit_interval(chain in chain_strategy()) {
            let stages: Vec<_> = chain.iter().map(|&(g, e)| st(g, e)).collect();
            let h = power_efficiency_factor(&stages).unwrap();
            prop_assert!(h > 0.0 && h <= 1.0);
        }

        #[test]
        fn factor_increases_with_every_efficiency(chain in chain_strategy(), k in 0usize..6, bump in 0.01f64..0.5) {
            let stages: Vec<_> = chain.iter().map(|&(g, e)| st(g, e)).collect();
            let k = k % stages.len();
            prop_assume!(stages[k].efficiency < 1.0);
            let mut better = stages.clone();
            better[k].efficiency = (stages[k].efficiency + bump).min(1.0);
            prop_assert!(power_efficiency_factor(&better).unwrap() > power_efficiency_factor(&stages).unwrap());
        }

        #[test]
        fn lossless_stage_is_neutral(chain in chain_strategy(), g in 0.01f64..1000.0) {
            let stages: Vec<_> = chain.iter().map(|&(g, e)| st(g, e)).collect();
            let mut longer = stages.clone();
            longer.push(st(g, 1.0));
            let a = power_efficiency_factor(&stages).unwrap();
            let b = power_efficiency_factor(&longer).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a);
        }

        #[test]
        fn closed_forms_match_generic(m in (0.01f64..1000.0, 0.01f64..=1.0), a in (0.01f64..1000.0, 0.01f64..=1.0),
                                      b in (0.01f64..1000.0, 0.01f64..=1.0)) {
            let (m, a, b) = (st(m.0, m.1), st(a.0, a.1), st(b.0, b.1));
            let r = h_relay(&m, &a).unwrap();
            let rg = power_efficiency_factor(&[m, a]).unwrap();
            prop_assert!((r - rg).abs() <= 1e-12 * rg);
            let s = h_source(&b, &m, &a).unwrap();
            let sg = power_efficiency_factor(&[b, m, a]).unwrap();
            prop_assert!((s - sg).abs() <= 1e-12 * sg);
        }

        #[test]
        fn verdict_scale_invariant(d1 in 1.0f64..1e5, d2 in 1.0f64..1e5, d3 in 1.0f64..1e5, k in 1e-3f64..1e3,
                                   gr in 0.1f64..10.0, hr in 0.05f64..1.0, hs in 0.05f64..1.0) {
            let s = RelayScenario { d1, d2, d3, g_rx_relay: gr, g_rx_sink: 1.0, h_relay: hr, h_source: hs };
            let scaled = RelayScenario { d1: d1 * k, d2: d2 * k, d3: d3 * k, ..s };
            let a = relay_advantage(&s).unwrap();
            let b = relay_advantage(&scaled).unwrap();
            prop_assume!((a.rhs - 1.0).abs() > 1e-9);
            prop_assert_eq!(a.verdict, b.verdict);
        }
    }
}
