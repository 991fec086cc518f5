//! Link-budget chains of the two payload architectures.
//!
//! * Bent-pipe (BP): the gateway signal crosses the feeder link and is
//!   amplified and forwarded by an on-board repeater. The downlink power at
//!   the panel input is whatever survives the feeder loss plus the repeater
//!   gain; uplink noise is the Friis cascade of repeater and gateway receiver.
//! * Regenerative (RG): the base station is on board; panel power and
//!   receiver noise figure are those of the base station.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{db_to_linear, linear_to_db, power_sum_db, Real, THERMAL_NOISE_DBM_PER_HZ};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Architecture {
    #[serde(rename = "bp")]
    BentPipe,
    #[serde(rename = "rg")]
    Regenerative,
}

impl Architecture {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bp" | "bent-pipe" | "bent_pipe" => Some(Architecture::BentPipe),
            "rg" | "regenerative" => Some(Architecture::Regenerative),
            _ => None,
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            Architecture::BentPipe => "bp",
            Architecture::Regenerative => "rg",
        }
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Architecture::BentPipe => "BP",
            Architecture::Regenerative => "RG",
        })
    }
}

/// Amplify-and-forward repeater.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepeaterModel<T> {
    pub gain: T,
    pub noise_figure: T,
    /// Output power limit in dBm, `None` when unconstrained.
    pub max_output_power: Option<T>,
}

impl<T: Real> RepeaterModel<T> {
    /// 105 dB gain, 7 dB noise figure, no output limit.
    pub fn baseline() -> Self {
        Self {
            gain: T::lit(105.0),
            noise_figure: T::lit(7.0),
            max_output_power: None,
        }
    }

    /// Output power for a given input power, both dBm.
    pub fn output_power(&self, input_dbm: T) -> T {
        let out = input_dbm + self.gain;
        match self.max_output_power {
            Some(limit) => out.min(limit),
            None => out,
        }
    }
}

/// One stage of a receive chain, in linear units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeStage<T> {
    pub gain: T,
    pub noise_figure: T,
}

impl<T: Real> CascadeStage<T> {
    pub fn from_db(gain_db: T, noise_figure_db: T) -> Self {
        Self {
            gain: db_to_linear(gain_db),
            noise_figure: db_to_linear(noise_figure_db),
        }
    }
}

/// Friis cascade noise figure in dB: `F = F1 + sum_k (F_k - 1) / (G_1 ... G_{k-1})`.
pub fn cascade_noise_figure<T: Real>(stages: &[CascadeStage<T>]) -> Result<T> {
    let (first, rest) = stages
        .split_first()
        .ok_or_else(|| Error::domain("cascade needs at least one stage"))?;
    for s in stages {
        if !(s.gain > T::zero()) || !(s.noise_figure >= T::one()) {
            return Err(Error::domain(
                "cascade stages need gain > 0 and noise factor >= 1",
            ));
        }
    }
    let mut f = first.noise_figure;
    let mut gain = first.gain;
    for s in rest {
        f = f + (s.noise_figure - T::one()) / gain;
        gain = gain * s.gain;
    }
    Ok(linear_to_db(f))
}

/// Thermal noise floor `-174 dBm/Hz + 10 log10(B) + NF`, dBm.
pub fn thermal_noise_dbm<T: Real>(bandwidth: T, noise_figure_db: T) -> Result<T> {
    if !(bandwidth > T::zero()) {
        return Err(Error::domain("bandwidth must be positive"));
    }
    Ok(T::lit(THERMAL_NOISE_DBM_PER_HZ) + linear_to_db(bandwidth) + noise_figure_db)
}

/// Bent-pipe downlink power radiated by a panel (EIRP when `panel_gain` is the
/// beam gain, panel input power when it is zero), dBm.
pub fn bp_effective_dl_eirp<T: Real>(
    gateway_tx: T,
    gateway_gain: T,
    feeder: T,
    rep: &RepeaterModel<T>,
    panel_gain: T,
) -> T {
    rep.output_power(gateway_tx + gateway_gain - feeder) + panel_gain
}

/// Repeater input noise amplified by gain plus noise figure and attenuated by
/// the access link, dBm at the terminal.
pub fn repeater_noise_at_ue<T: Real>(
    rep: &RepeaterModel<T>,
    access_loss: T,
    bandwidth: T,
) -> Result<T> {
    Ok(thermal_noise_dbm(bandwidth, T::zero())? + rep.gain + rep.noise_figure - access_loss)
}

/// Per-link budget record. `interference_power` is `None` when no
/// co-channel source is present.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget<T> {
    pub tx_power: T,
    pub tx_gain: T,
    pub path_loss: T,
    pub rx_gain: T,
    pub noise_power: T,
    pub interference_power: Option<T>,
    pub sinr: T,
}

impl<T: Real> LinkBudget<T> {
    fn new(
        tx_power: T,
        tx_gain: T,
        path_loss: T,
        rx_gain: T,
        noise_power: T,
        interference_power: Option<T>,
    ) -> Self {
        let signal = tx_power + tx_gain - path_loss + rx_gain;
        let impairment = match interference_power {
            Some(i) => power_sum_db([noise_power, i]).unwrap(),
            None => noise_power,
        };
        Self {
            tx_power,
            tx_gain,
            path_loss,
            rx_gain,
            noise_power,
            interference_power,
            sinr: signal - impairment,
        }
    }

    pub fn received_power(&self) -> T {
        self.tx_power + self.tx_gain - self.path_loss + self.rx_gain
    }
}

/// Downlink SINR with full frequency reuse: every beam other than `serving`
/// radiates `panel_power_dbm` and interferes. All beams share the platform,
/// so they share the path loss and terminal antenna gain.
pub fn dl_sinr<T: Real>(
    serving: Option<usize>,
    beam_gains_dbi: &[T],
    panel_power_dbm: T,
    path_loss_db: T,
    rx_gain_dbi: T,
    noise_dbm: T,
) -> Result<LinkBudget<T>> {
    let serving = serving
        .filter(|&s| s < beam_gains_dbi.len())
        .ok_or_else(|| Error::Scheduling("terminal is not attached to a beam".into()))?;
    let interference = power_sum_db(
        beam_gains_dbi
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != serving)
            .map(|(_, &g)| panel_power_dbm + g - path_loss_db + rx_gain_dbi),
    );
    Ok(LinkBudget::new(
        panel_power_dbm,
        beam_gains_dbi[serving],
        path_loss_db,
        rx_gain_dbi,
        noise_dbm,
        interference,
    ))
}

/// One terminal-to-panel uplink path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UplinkPath<T> {
    pub tx_power: T,
    pub tx_gain: T,
    pub path_loss: T,
    pub rx_gain: T,
}

impl<T: Real> UplinkPath<T> {
    pub fn received_power(&self) -> T {
        self.tx_power + self.tx_gain - self.path_loss + self.rx_gain
    }
}

/// Uplink SINR of a scheduled terminal against co-scheduled terminals of
/// other cells on the same resource block.
pub fn ul_sinr<T: Real>(
    signal: Option<&UplinkPath<T>>,
    interferers: &[UplinkPath<T>],
    noise_dbm: T,
) -> Result<LinkBudget<T>> {
    let s = signal.ok_or_else(|| Error::Scheduling("terminal has no uplink allocation".into()))?;
    let interference = power_sum_db(interferers.iter().map(UplinkPath::received_power));
    Ok(LinkBudget::new(
        s.tx_power,
        s.tx_gain,
        s.path_loss,
        s.rx_gain,
        noise_dbm,
        interference,
    ))
}

/// Architecture-dependent power and noise terms of the radio chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioChain<T> {
    pub architecture: Architecture,
    /// On-board base-station power per panel, dBm.
    pub bs_tx_power: T,
    pub bs_noise_figure: T,
    pub gateway_tx_power: T,
    pub gateway_antenna_gain: T,
    pub gateway_noise_figure: T,
    pub repeater: RepeaterModel<T>,
    /// Add amplified repeater noise to the terminal's downlink noise.
    pub model_repeater_noise: bool,
}

impl<T: Real> RadioChain<T> {
    pub fn baseline(architecture: Architecture) -> Self {
        Self {
            architecture,
            bs_tx_power: T::lit(43.0),
            bs_noise_figure: T::lit(5.0),
            gateway_tx_power: T::lit(43.0),
            gateway_antenna_gain: T::lit(32.3),
            gateway_noise_figure: T::lit(3.0),
            repeater: RepeaterModel::baseline(),
            model_repeater_noise: false,
        }
    }

    /// Power fed to each panel, dBm.
    pub fn dl_panel_power(&self, feeder_loss: T) -> T {
        match self.architecture {
            Architecture::Regenerative => self.bs_tx_power,
            Architecture::BentPipe => bp_effective_dl_eirp(
                self.gateway_tx_power,
                self.gateway_antenna_gain,
                feeder_loss,
                &self.repeater,
                T::zero(),
            ),
        }
    }

    /// Downlink noise at the terminal, dBm.
    pub fn dl_noise(&self, ue_noise_figure: T, bandwidth: T, access_loss: T) -> Result<T> {
        let floor = thermal_noise_dbm(bandwidth, ue_noise_figure)?;
        if self.architecture == Architecture::BentPipe && self.model_repeater_noise {
            let rep = repeater_noise_at_ue(&self.repeater, access_loss, bandwidth)?;
            Ok(power_sum_db([floor, rep]).unwrap())
        } else {
            Ok(floor)
        }
    }

    /// Receiver noise figure of the uplink chain referred to the panel, dB.
    pub fn ul_noise_figure(&self) -> Result<T> {
        match self.architecture {
            Architecture::Regenerative => Ok(self.bs_noise_figure),
            Architecture::BentPipe => cascade_noise_figure(&[
                CascadeStage::from_db(self.repeater.gain, self.repeater.noise_figure),
                CascadeStage::from_db(T::zero(), self.gateway_noise_figure),
            ]),
        }
    }

    pub fn ul_noise(&self, bandwidth: T) -> Result<T> {
        thermal_noise_dbm(bandwidth, self.ul_noise_figure()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn cascade_examples() {
        assert_abs_diff_eq!(
            cascade_noise_figure(&[CascadeStage::from_db(10.0, 7.0)]).unwrap(),
            7.0,
            epsilon = 1e-12
        );
        let nf: f64 = cascade_noise_figure(&[
            CascadeStage::from_db(105.0, 7.0),
            CascadeStage::from_db(0.0, 3.0),
        ])
        .unwrap();
        assert_eq!((nf * 1000.0).round() / 1000.0, 7.0);
        let zero = cascade_noise_figure(&[
            CascadeStage::from_db(20.0, 0.0),
            CascadeStage::from_db(20.0, 0.0),
        ])
        .unwrap();
        assert_abs_diff_eq!(zero, 0.0, epsilon = 1e-12);
        assert!(cascade_noise_figure::<f64>(&[]).is_err());
    }

    #[test]
    fn cascade_hand_oracle() {
        // LNA 1.5 dB / 20 dB, mixer 8 dB / -6 dB, IF 3 dB
        let f1: f64 = 10f64.powf(0.15);
        let f2: f64 = 10f64.powf(0.8);
        let f3: f64 = 10f64.powf(0.3);
        let expected =
            10.0 * (f1 + (f2 - 1.0) / 100.0 + (f3 - 1.0) / (100.0 * 10f64.powf(-0.6))).log10();
        let got = cascade_noise_figure(&[
            CascadeStage::from_db(20.0, 1.5),
            CascadeStage::from_db(-6.0, 8.0),
            CascadeStage::from_db(30.0, 3.0),
        ])
        .unwrap();
        assert_abs_diff_eq!(got, expected, epsilon = 1e-12);
    }

    #[test]
    fn bent_pipe_eirp() {
        let rep = RepeaterModel::<f64>::baseline();
        assert_abs_diff_eq!(
            bp_effective_dl_eirp(43.0, 32.3, 137.7, &rep, 0.0),
            42.6,
            epsilon = 1e-9
        );
        // feeder exactly offsets gateway gain plus repeater gain
        assert_abs_diff_eq!(
            bp_effective_dl_eirp(43.0, 32.3, 137.3, &rep, 0.0),
            43.0,
            epsilon = 1e-9
        );
        let hot = RepeaterModel { gain: 110.0, ..rep };
        let out = bp_effective_dl_eirp(43.0, 32.3, 137.7, &hot, 0.0);
        assert_abs_diff_eq!(out, 47.6, epsilon = 1e-9);
        assert!(out > 43.0);
        let limited = RepeaterModel {
            max_output_power: Some(30.0),
            ..rep
        };
        assert_eq!(bp_effective_dl_eirp(43.0, 32.3, 137.7, &limited, 8.0), 38.0);
    }

    #[test]
    fn repeater_noise_examples() {
        let rep = RepeaterModel::<f64>::baseline();
        // -174 + 73.0103 + 112 - 121
        assert_abs_diff_eq!(
            repeater_noise_at_ue(&rep, 121.0, 20e6).unwrap(),
            -109.989_700_043_360_19,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            repeater_noise_at_ue(&rep, 200.0, 20e6).unwrap(),
            -188.989_700_043_360_2,
            epsilon = 1e-9
        );
        let flat = RepeaterModel {
            gain: 0.0,
            noise_figure: 0.0,
            max_output_power: None,
        };
        let floor = thermal_noise_dbm(20e6, 0.0).unwrap();
        assert_abs_diff_eq!(
            repeater_noise_at_ue(&flat, 150.0, 20e6).unwrap(),
            floor - 150.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn single_cell_dl_budget() {
        let floor = thermal_noise_dbm(20e6, 7.0).unwrap();
        assert_abs_diff_eq!(floor, -93.989_700_043_360_19, epsilon = 1e-9);
        let b = dl_sinr(Some(0), &[8.0], 43.0, 124.91, 0.0, floor).unwrap();
        assert_abs_diff_eq!(b.sinr, 20.08, epsilon = 0.005);
        assert!(b.interference_power.is_none());
    }

    #[test]
    fn equal_interferer_caps_sinr_near_zero() {
        let b = dl_sinr(Some(0), &[10.0, 10.0], 43.0, 120.0, 0.0, -200.0).unwrap();
        assert_abs_diff_eq!(b.sinr, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn detached_terminal_is_a_scheduling_error() {
        assert!(matches!(
            dl_sinr(None, &[1.0], 43.0, 120.0, 0.0, -94.0),
            Err(Error::Scheduling(_))
        ));
        assert!(matches!(
            dl_sinr(Some(3), &[1.0], 43.0, 120.0, 0.0, -94.0),
            Err(Error::Scheduling(_))
        ));
        assert!(matches!(
            ul_sinr::<f64>(None, &[], -109.0),
            Err(Error::Scheduling(_))
        ));
    }

    #[test]
    fn uplink_floors() {
        let rg = RadioChain::<f64>::baseline(Architecture::Regenerative);
        assert_abs_diff_eq!(rg.ul_noise(1e6).unwrap(), -109.0, epsilon = 1e-9);
        let bp = RadioChain::<f64>::baseline(Architecture::BentPipe);
        assert_abs_diff_eq!(bp.ul_noise(1e6).unwrap(), -107.0, epsilon = 1e-6);
    }

    #[test]
    fn nadir_uplink_budget() {
        let rg = RadioChain::<f64>::baseline(Architecture::Regenerative);
        let loss = 123.573_833_237_229_12; // 1.8 GHz over 20 km
        let path = UplinkPath {
            tx_power: 23.0,
            tx_gain: 0.0,
            path_loss: loss,
            rx_gain: 8.0,
        };
        let b = ul_sinr(Some(&path), &[], rg.ul_noise(1e6).unwrap()).unwrap();
        assert_abs_diff_eq!(b.sinr, 23.0 - loss + 8.0 + 109.0, epsilon = 1e-9);
    }

    #[test]
    fn repeater_noise_flag_only_affects_bent_pipe() {
        let mut rg = RadioChain::<f64>::baseline(Architecture::Regenerative);
        rg.model_repeater_noise = true;
        let floor = thermal_noise_dbm(20e6, 7.0).unwrap();
        assert_eq!(rg.dl_noise(7.0, 20e6, 121.0).unwrap(), floor);
        let mut bp = RadioChain::<f64>::baseline(Architecture::BentPipe);
        assert_eq!(bp.dl_noise(7.0, 20e6, 121.0).unwrap(), floor);
        bp.model_repeater_noise = true;
        let n = bp.dl_noise(7.0, 20e6, 121.0).unwrap();
        assert!(n > floor && n - floor < 0.2);
    }

    #[test]
    fn repeater_noise_below_ue_floor() {
        let rep = RepeaterModel::<f64>::baseline();
        let floor = thermal_noise_dbm(20e6, 7.0).unwrap();
        let mut loss = 121.0;
        while loss <= 200.0 {
            assert!(repeater_noise_at_ue(&rep, loss, 20e6).unwrap() < floor);
            loss += 0.5;
        }
    }

    #[test]
    fn bp_rg_dl_offset_over_flight_circle() {
        use crate::channel::feeder_loss;
        use crate::geometry::{haps_position, FlightPattern, Point3};
        let p = FlightPattern::<f64>::baseline();
        let bp = RadioChain::<f64>::baseline(Architecture::BentPipe);
        let rg = RadioChain::<f64>::baseline(Architecture::Regenerative);
        let gw = Point3::ground(45e3, 0.0);
        let floor = thermal_noise_dbm(20e6, 7.0).unwrap();
        for i in 0..12 {
            let f = feeder_loss(haps_position(&p, i).unwrap(), gw, 3.65e9).unwrap();
            let a = dl_sinr(Some(0), &[8.0], bp.dl_panel_power(f), 130.0, 0.0, floor).unwrap();
            let b = dl_sinr(Some(0), &[8.0], rg.dl_panel_power(f), 130.0, 0.0, floor).unwrap();
            let offset = bp.dl_panel_power(f) - rg.dl_panel_power(f);
            assert_abs_diff_eq!(a.sinr - b.sinr, offset, epsilon = 1e-9);
            assert!(offset.abs() <= 0.75);
        }
    }

    proptest! {
        #[test]
        fn dl_monotone(loss in 100.0f64..200.0, extra in 0.0f64..20.0, g in -20.0f64..20.0, dg in 0.0f64..10.0,
                       others in proptest::collection::vec(-30.0f64..15.0, 0..6)) {
            let mut gains = vec![g];
            gains.extend(others.iter().copied());
            let base = dl_sinr(Some(0), &gains, 43.0, loss, 0.0, -94.0).unwrap().sinr;
            let lossier = dl_sinr(Some(0), &gains, 43.0, loss + extra, 0.0, -94.0).unwrap().sinr;
            prop_assert!(lossier <= base + 1e-12);
            gains[0] = g + dg;
            let stronger = dl_sinr(Some(0), &gains, 43.0, loss, 0.0, -94.0).unwrap().sinr;
            prop_assert!(stronger >= base - 1e-12);
        }

        #[test]
        fn removing_an_interferer_never_hurts(g in -10.0f64..15.0,
                                               others in proptest::collection::vec(-30.0f64..15.0, 1..7),
                                               drop in 0usize..7) {
            let mut gains = vec![g];
            gains.extend(others.iter().copied());
            let full = dl_sinr(Some(0), &gains, 43.0, 140.0, 0.0, -94.0).unwrap().sinr;
            let k = 1 + drop % others.len();
            gains.remove(k);
            let fewer = dl_sinr(Some(0), &gains, 43.0, 140.0, 0.0, -94.0).unwrap().sinr;
            prop_assert!(fewer >= full - 1e-12);
        }

        #[test]
        fn budget_identity(tx in 0.0f64..50.0, g in -10.0f64..20.0, l in 100.0f64..200.0, r in -20.0f64..15.0,
                           n in -120.0f64..-80.0, i in -140.0f64..-60.0) {
            let b = LinkBudget::new(tx, g, l, r, n, Some(i));
            let expected = (tx + g - l + r) - 10.0 * (10f64.powf(n / 10.0) + 10f64.powf(i / 10.0)).log10();
            prop_assert!((b.sinr - expected).abs() < 1e-9);
        }
    }
}
