use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Truncated, attenuated Shannon mapping from SINR to spectral efficiency.
///
/// The default is the usual downlink parameter set; [`LinkAbstraction::uplink`]
/// is its single-antenna SC-FDMA uplink counterpart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkAbstraction {
    /// Attenuation factor applied to the Shannon bound.
    pub attenuation: f64,
    /// SINR below which nothing is delivered, dB.
    pub sinr_min_db: f64,
    /// Highest spectral efficiency of the modulation set, bit/s/Hz.
    pub se_max: f64,
}

impl Default for LinkAbstraction {
    fn default() -> Self {
        Self {
            attenuation: 0.6,
            sinr_min_db: -10.0,
            se_max: 4.4,
        }
    }
}

impl LinkAbstraction {
    /// Attenuation 0.4, threshold -10 dB, cap 2.0 bit/s/Hz.
    pub fn uplink() -> Self {
        Self {
            attenuation: 0.4,
            sinr_min_db: -10.0,
            se_max: 2.0,
        }
    }

    /// Checks the parameters; errors name fields under `section`.
    pub fn validate(&self, section: &str) -> Result<()> {
        if !(self.attenuation > 0.0 && self.attenuation <= 1.0) {
            return Err(Error::config(
                format!("{section}.attenuation"),
                "must lie in (0, 1]",
            ));
        }
        if !self.sinr_min_db.is_finite() {
            return Err(Error::config(
                format!("{section}.sinr_min_db"),
                "must be finite",
            ));
        }
        if !(self.se_max > 0.0) || !self.se_max.is_finite() {
            return Err(Error::config(
                format!("{section}.se_max"),
                "must be finite and positive",
            ));
        }
        Ok(())
    }

    pub fn se(&self, sinr_db: f64) -> f64 {
        sinr_to_se(sinr_db, self)
    }
}

/// Spectral efficiency in bit/s/Hz: zero below `sinr_min_db`, otherwise
/// `min(attenuation * log2(1 + sinr), se_max)`.
pub fn sinr_to_se(sinr_db: f64, params: &LinkAbstraction) -> f64 {
    if !(sinr_db >= params.sinr_min_db) {
        return 0.0;
    }
    let lin = 10f64.powf(sinr_db / 10.0);
    (params.attenuation * (1.0 + lin).log2()).min(params.se_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn mapping_examples() {
        let p = LinkAbstraction::default();
        assert_eq!(sinr_to_se(-15.0, &p), 0.0);
        assert!((sinr_to_se(0.0, &p) - 0.6).abs() < 1e-15);
        assert_eq!(sinr_to_se(40.0, &p), 4.4);
        assert_eq!(sinr_to_se(f64::NAN, &p), 0.0);
        // threshold itself is served
        assert!(sinr_to_se(-10.0, &p) > 0.0);
        let ul = LinkAbstraction::uplink();
        assert!((sinr_to_se(0.0, &ul) - 0.4).abs() < 1e-15);
        assert_eq!(sinr_to_se(30.0, &ul), 2.0);
    }

    #[test]
    fn validation() {
        assert!(LinkAbstraction::default().validate("la").is_ok());
        assert!(LinkAbstraction::uplink().validate("la").is_ok());
        assert!(LinkAbstraction {
            attenuation: 0.0,
            ..Default::default()
        }
        .validate("la")
        .is_err());
        assert!(LinkAbstraction {
            se_max: -1.0,
            ..Default::default()
        }
        .validate("la")
        .is_err());
    }

    proptest! {
        #[test]
        fn monotone_and_bounded(a in -30.0f64..50.0, b in -30.0f64..50.0) {
            let p = LinkAbstraction::default();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(sinr_to_se(lo, &p) <= sinr_to_se(hi, &p));
            prop_assert!(sinr_to_se(hi, &p) <= p.se_max);
            prop_assert!(sinr_to_se(lo, &p) >= 0.0);
        }
    }
}
