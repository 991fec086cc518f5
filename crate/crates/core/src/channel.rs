//! Large-scale propagation: free-space loss, elevation-binned LOS probability,
//! shadow fading and clutter loss for the access link, and the free-space
//! feeder link.
//!
//! The elevation tables are data. [`NtnTables::rural_default`] embeds the
//! rural S-band set shipped in `data/ntn_rural_sband.csv`; any file with the
//! same five columns can be loaded instead:
//!
//! ```text
//! elevation_deg,los_probability,shadow_std_los_db,shadow_std_nlos_db,clutter_loss_nlos_db
//! 10,0.782,1.79,8.93,19.52
//! ```

use std::fmt;
use std::io::Read;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{LinkGeometry, Point3};
use crate::num::{Real, SPEED_OF_LIGHT};

const RURAL_SBAND: &str = include_str!("../data/ntn_rural_sband.csv");

/// Free-space path loss `20 log10(4 pi d f / c)` in dB.
pub fn fspl<T: Real>(carrier: T, distance: T) -> Result<T> {
    if !(carrier > T::zero()) || !(distance > T::zero()) {
        return Err(Error::domain(format!(
            "free-space loss needs positive carrier and distance (got {carrier} Hz, {distance} m)"
        )));
    }
    let x = T::lit(4.0) * T::PI() * distance * carrier / T::lit(SPEED_OF_LIGHT);
    Ok(T::lit(20.0) * x.log10())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum LosState {
    Los,
    Nlos,
}

impl fmt::Display for LosState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LosState::Los => "LOS",
            LosState::Nlos => "NLOS",
        })
    }
}

/// One elevation bin of the NTN tables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NtnBin<T> {
    #[serde(rename = "elevation_deg")]
    pub elevation: T,
    pub los_probability: T,
    #[serde(rename = "shadow_std_los_db")]
    pub shadow_std_los: T,
    #[serde(rename = "shadow_std_nlos_db")]
    pub shadow_std_nlos: T,
    #[serde(rename = "clutter_loss_nlos_db")]
    pub clutter_loss_nlos: T,
}

impl<T: Real> NtnBin<T> {
    pub fn shadow_std(&self, los: LosState) -> T {
        match los {
            LosState::Los => self.shadow_std_los,
            LosState::Nlos => self.shadow_std_nlos,
        }
    }

    pub fn clutter_loss(&self, los: LosState) -> T {
        match los {
            LosState::Los => T::zero(),
            LosState::Nlos => self.clutter_loss_nlos,
        }
    }
}

/// Elevation-binned LOS probability, shadow fading and clutter loss.
#[derive(Debug, Clone, PartialEq)]
pub struct NtnTables<T> {
    bins: Vec<NtnBin<T>>,
}

impl<T: Real> NtnTables<T> {
    /// Validates and wraps a bin list. Bins must be sorted by strictly
    /// increasing elevation and span at least 10 to 90 degrees.
    pub fn new(bins: Vec<NtnBin<T>>) -> Result<Self> {
        let field = "ntn_table";
        if bins.is_empty() {
            return Err(Error::config(field, "table has no elevation bins"));
        }
        for (i, b) in bins.iter().enumerate() {
            let values = [
                b.elevation,
                b.los_probability,
                b.shadow_std_los,
                b.shadow_std_nlos,
                b.clutter_loss_nlos,
            ];
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::config(field, format!("bin {i}: non-finite value")));
            }
            if b.los_probability < T::zero() || b.los_probability > T::one() {
                return Err(Error::config(
                    field,
                    format!("bin {i}: LOS probability outside [0, 1]"),
                ));
            }
            if b.shadow_std_los < T::zero() || b.shadow_std_nlos < T::zero() {
                return Err(Error::config(
                    field,
                    format!("bin {i}: negative shadow-fading std"),
                ));
            }
            if b.clutter_loss_nlos < T::zero() {
                return Err(Error::config(
                    field,
                    format!("bin {i}: negative clutter loss"),
                ));
            }
            if i > 0 {
                let prev = &bins[i - 1];
                if b.elevation <= prev.elevation {
                    return Err(Error::config(
                        field,
                        "elevations must be strictly increasing",
                    ));
                }
                if b.los_probability < prev.los_probability {
                    return Err(Error::config(
                        field,
                        "LOS probability must be non-decreasing with elevation",
                    ));
                }
            }
        }
        if bins[0].elevation > T::lit(10.0) || bins[bins.len() - 1].elevation < T::lit(90.0) {
            return Err(Error::config(field, "bins must cover 10 to 90 degrees"));
        }
        Ok(Self { bins })
    }

    /// Rural S-band tables embedded in the crate.
    pub fn rural_default() -> Self {
        Self::from_reader(RURAL_SBAND.as_bytes()).expect("embedded NTN table is valid")
    }

    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut bins = Vec::new();
        for (i, rec) in rdr.deserialize::<NtnBin<f64>>().enumerate() {
            let b = rec.map_err(|e| Error::Parse {
                line: e.position().map_or(i + 2, |p| p.line() as usize),
                column: 1,
                message: e.to_string(),
            })?;
            bins.push(NtnBin {
                elevation: T::lit(b.elevation),
                los_probability: T::lit(b.los_probability),
                shadow_std_los: T::lit(b.shadow_std_los),
                shadow_std_nlos: T::lit(b.shadow_std_nlos),
                clutter_loss_nlos: T::lit(b.clutter_loss_nlos),
            });
        }
        Self::new(bins)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(file).map_err(|e| match e {
            Error::Parse {
                line,
                column,
                message,
            } => Error::Parse {
                line,
                column,
                message: format!("{}: {message}", path.display()),
            },
            other => other,
        })
    }

    pub fn bins(&self) -> &[NtnBin<T>] {
        &self.bins
    }

    /// Nearest bin to `elevation`; ties go to the higher bin. Elevations
    /// outside the table clamp to the end bins.
    pub fn bin(&self, elevation: T) -> &NtnBin<T> {
        let first = &self.bins[0];
        let last = &self.bins[self.bins.len() - 1];
        if elevation < first.elevation || elevation > last.elevation {
            log::debug!("elevation {elevation} outside NTN table range, clamping");
        }
        let mut best = first;
        let mut best_d = (elevation - first.elevation).abs();
        for b in &self.bins[1..] {
            let d = (elevation - b.elevation).abs();
            if d <= best_d {
                best = b;
                best_d = d;
            }
        }
        best
    }
}

/// Bernoulli LOS draw with the probability of the elevation's bin.
pub fn assign_los<T: Real, R: Rng + ?Sized>(
    elevation: T,
    tables: &NtnTables<T>,
    rng: &mut R,
) -> LosState {
    let p = tables
        .bin(elevation)
        .los_probability
        .to_f64()
        .unwrap_or(0.0);
    if rng.random::<f64>() < p {
        LosState::Los
    } else {
        LosState::Nlos
    }
}

/// Breakdown of an access-link loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkLoss<T> {
    pub fspl: T,
    pub shadow: T,
    pub clutter: T,
    pub total: T,
    pub los_state: LosState,
}

/// Access-link loss: free-space over the slant range, the terminal's fixed
/// shadow-fading draw, and the bin's clutter loss for NLOS terminals.
pub fn access_path_loss<T: Real>(
    carrier: T,
    geom: &LinkGeometry<T>,
    los: LosState,
    tables: &NtnTables<T>,
    shadow_draw: T,
) -> Result<LinkLoss<T>> {
    let fspl = fspl(carrier, geom.slant_range)?;
    let clutter = tables.bin(geom.elevation).clutter_loss(los);
    Ok(LinkLoss {
        fspl,
        shadow: shadow_draw,
        clutter,
        total: fspl + shadow_draw + clutter,
        los_state: los,
    })
}

/// Feeder-link loss between platform and gateway (free space, always LOS).
pub fn feeder_loss<T: Real>(haps: Point3<T>, gateway: Point3<T>, carrier: T) -> Result<T> {
    fspl(carrier, haps.distance(gateway))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{haps_position, link_geometry, FlightPattern};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    // Frozen from an independent evaluation of 20 log10(4 pi d f / c).
    const FSPL_365_50KM: f64 = 137.673_040_597_733_26;
    const FSPL_21_20KM: f64 = 124.912_769_029_841_39;

    #[test]
    fn fspl_values() {
        assert_abs_diff_eq!(fspl(3.65e9, 50e3).unwrap(), FSPL_365_50KM, epsilon = 1e-9);
        assert!((fspl(3.65e9_f64, 50e3).unwrap() - 137.7).abs() < 0.05);
        assert_abs_diff_eq!(fspl(2.1e9, 20e3).unwrap(), FSPL_21_20KM, epsilon = 1e-9);
        // 32.45 + 20 log10(2100 MHz) + 20 log10(20 km)
        assert!((fspl(2.1e9_f64, 20e3).unwrap() - 124.91).abs() < 0.01);
        let d = fspl(2.1e9, 40e3).unwrap() - fspl(2.1e9, 20e3).unwrap();
        assert_abs_diff_eq!(d, 6.020_599_913_279_624, epsilon = 1e-9);
        assert!((fspl(3.65e9f32, 50e3f32).unwrap() - 137.673).abs() < 1e-3);
    }

    #[test]
    fn fspl_domain_errors() {
        assert!(fspl(0.0, 1.0).is_err());
        assert!(fspl(1.0, -1.0).is_err());
        assert!(fspl(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn embedded_table_is_valid() {
        let t = NtnTables::<f64>::rural_default();
        assert_eq!(t.bins().len(), 9);
        assert_eq!(t.bin(10.0).elevation, 10.0);
        assert_eq!(t.bin(14.9).elevation, 10.0);
        assert_eq!(t.bin(15.0).elevation, 20.0);
        assert_eq!(t.bin(3.0).elevation, 10.0);
        assert_eq!(t.bin(90.0).elevation, 90.0);
    }

    #[test]
    fn table_validation() {
        let ok = "elevation_deg,los_probability,shadow_std_los_db,shadow_std_nlos_db,clutter_loss_nlos_db\n10,0.5,1,8,10\n90,0.9,1,8,10\n";
        assert!(NtnTables::<f64>::from_reader(ok.as_bytes()).is_ok());
        let decreasing = ok.replace("90,0.9", "90,0.4");
        assert!(NtnTables::<f64>::from_reader(decreasing.as_bytes()).is_err());
        let short = ok.replace("90,0.9", "80,0.9");
        assert!(NtnTables::<f64>::from_reader(short.as_bytes()).is_err());
        let negative = ok.replace("1,8,10\n90", "1,8,-1\n90");
        assert!(NtnTables::<f64>::from_reader(negative.as_bytes()).is_err());
        let garbage = ok.replace("0.5", "abc");
        assert!(matches!(
            NtnTables::<f64>::from_reader(garbage.as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    fn certain_table(p: f64, clutter: f64) -> NtnTables<f64> {
        NtnTables::new(
            (1..=9)
                .map(|i| NtnBin {
                    elevation: 10.0 * i as f64,
                    los_probability: p,
                    shadow_std_los: 1.0,
                    shadow_std_nlos: 8.0,
                    clutter_loss_nlos: clutter,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn certain_los() {
        let t = certain_table(1.0, 20.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for i in 0..1000 {
            let el = 10.0 + (i % 80) as f64;
            assert_eq!(assign_los(el, &t, &mut rng), LosState::Los);
        }
    }

    #[test]
    fn nadir_los_loss_reduces_to_fspl() {
        let t = NtnTables::rural_default();
        let g = link_geometry(Point3::ground(0.0, 0.0), Point3::new(0.0, 0.0, 20e3)).unwrap();
        let l = access_path_loss(2.1e9, &g, LosState::Los, &t, 0.0).unwrap();
        assert_abs_diff_eq!(l.total, FSPL_21_20KM, epsilon = 1e-9);
        assert_eq!(l.clutter, 0.0);
    }

    #[test]
    fn zero_clutter_nlos_equals_los() {
        let t = certain_table(0.5, 0.0);
        let g = link_geometry(Point3::ground(30e3, 0.0), Point3::new(0.0, 0.0, 20e3)).unwrap();
        let a = access_path_loss(2.1e9, &g, LosState::Los, &t, 0.0).unwrap();
        let b = access_path_loss(2.1e9, &g, LosState::Nlos, &t, 0.0).unwrap();
        assert_eq!(a.total, b.total);
    }

    #[test]
    fn feeder_examples() {
        let gw = Point3::ground(45e3, 0.0);
        let near = feeder_loss(Point3::new(3e3, 0.0, 20e3), gw, 3.65e9).unwrap();
        // slant sqrt(42000^2 + 20000^2) = 46 518.8 m
        assert_abs_diff_eq!(near, 137.046_213_075_358_2, epsilon = 1e-9);
        let far = feeder_loss(Point3::new(-3e3, 0.0, 20e3), gw, 3.65e9).unwrap();
        // slant sqrt(48000^2 + 20000^2) = 52 000 m
        assert_abs_diff_eq!(far, 138.013_707_383_708_8, epsilon = 1e-9);
        let nadir = feeder_loss(Point3::new(45e3, 0.0, 20e3), gw, 3.65e9).unwrap();
        assert_abs_diff_eq!(nadir, fspl(3.65e9, 20e3).unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn feeder_loss_stays_near_center_value() {
        let p = FlightPattern::<f64>::baseline();
        let gw = Point3::ground(45e3, 0.0);
        let center = feeder_loss(p.center, gw, 3.65e9).unwrap();
        for i in 0..p.position_count {
            let l = feeder_loss(haps_position(&p, i).unwrap(), gw, 3.65e9).unwrap();
            assert!((l - center).abs() <= 1.0);
        }
    }

    proptest! {
        #[test]
        fn fspl_monotone(f in 1e8f64..1e11, d in 1.0f64..1e6, k in 1.0001f64..10.0) {
            let base = fspl(f, d).unwrap();
            prop_assert!(fspl(f * k, d).unwrap() > base);
            prop_assert!(fspl(f, d * k).unwrap() > base);
        }

        #[test]
        fn nlos_never_below_los(x in 0.0f64..100e3, y in 0.0f64..100e3) {
            let t = NtnTables::rural_default();
            let g = link_geometry(Point3::ground(x, y), Point3::new(0.0, 0.0, 20e3)).unwrap();
            let a = access_path_loss(2.1e9, &g, LosState::Los, &t, 0.0).unwrap();
            let b = access_path_loss(2.1e9, &g, LosState::Nlos, &t, 0.0).unwrap();
            prop_assert!(a.total <= b.total);
            prop_assert_eq!(a.total, a.fspl + a.shadow + a.clutter);
        }
    }
}
