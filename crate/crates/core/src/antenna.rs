//! Antenna models: parabolic-in-dB element patterns, uniform planar panel
//! arrays with conjugate-phase steering, the hexagonal seven-panel payload,
//! and the directional CPE antenna.
//!
//! Each panel carries two co-located polarization subarrays; link gains are
//! computed on one co-polarized subarray of `rows * cols` elements.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::geometry::{LinkGeometry, Point3};
use crate::num::{wrap_degrees, Real, SPEED_OF_LIGHT};

/// Separable quadratic-in-angle gain pattern with a front-to-back floor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementPattern<T> {
    peak_gain: T,
    hpbw_az: T,
    hpbw_el: T,
    front_to_back: T,
}

impl<T: Real> ElementPattern<T> {
    pub fn new(peak_gain: T, hpbw_az: T, hpbw_el: T, front_to_back: T) -> Result<Self> {
        if !(hpbw_az > T::zero()) || !(hpbw_el > T::zero()) {
            return Err(Error::config(
                "hpbw",
                "half-power beamwidth must be positive",
            ));
        }
        if !(front_to_back >= T::zero()) || !front_to_back.is_finite() {
            return Err(Error::config(
                "front_to_back",
                "front-to-back ratio must be finite and non-negative",
            ));
        }
        if !peak_gain.is_finite() {
            return Err(Error::config("peak_gain", "peak gain must be finite"));
        }
        Ok(Self {
            peak_gain,
            hpbw_az,
            hpbw_el,
            front_to_back,
        })
    }

    /// Single-cell antenna: 8 dBi, 65 degree HPBW, 30 dB front-to-back.
    pub fn single_cell() -> Self {
        Self::new(T::lit(8.0), T::lit(65.0), T::lit(65.0), T::lit(30.0)).unwrap()
    }

    /// Array element of the hexagonal payload: 5 dBi, 90 degree HPBW, 30 dB front-to-back.
    pub fn array_element() -> Self {
        Self::new(T::lit(5.0), T::lit(90.0), T::lit(90.0), T::lit(30.0)).unwrap()
    }

    /// CPE directional antenna: 12 dBi, 60 degree HPBW. The 30 dB floor follows
    /// the convention used for the other antennas.
    pub fn cpe() -> Self {
        Self::new(T::lit(12.0), T::lit(60.0), T::lit(60.0), T::lit(30.0)).unwrap()
    }

    pub fn peak_gain(&self) -> T {
        self.peak_gain
    }

    pub fn hpbw_az(&self) -> T {
        self.hpbw_az
    }

    pub fn hpbw_el(&self) -> T {
        self.hpbw_el
    }

    pub fn front_to_back(&self) -> T {
        self.front_to_back
    }

    /// Back-lobe floor, dBi.
    pub fn floor(&self) -> T {
        self.peak_gain - self.front_to_back
    }

    /// Gain in dBi for the given off-boresight angles in degrees.
    pub fn gain(&self, off_boresight_az: T, off_boresight_el: T) -> T {
        let twelve = T::lit(12.0);
        let a = off_boresight_az / self.hpbw_az;
        let e = off_boresight_el / self.hpbw_el;
        let attenuation = (twelve * a * a + twelve * e * e).min(self.front_to_back);
        self.peak_gain - attenuation
    }
}

/// Free function form of [`ElementPattern::gain`].
pub fn element_gain<T: Real>(p: &ElementPattern<T>, off_boresight_az: T, off_boresight_el: T) -> T {
    p.gain(off_boresight_az, off_boresight_el)
}

/// Orthonormal antenna frame: boresight, a horizontal axis across the panel
/// (columns) and a vertical axis along the panel (rows).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanelFrame<T> {
    boresight: Point3<T>,
    horizontal: Point3<T>,
    vertical: Point3<T>,
}

impl<T: Real> PanelFrame<T> {
    /// Boresight at `azimuth_deg` (ccw from +x) pointing `downtilt_deg` below the horizon.
    pub fn new(azimuth_deg: T, downtilt_deg: T) -> Self {
        let az = azimuth_deg.to_radians();
        let tilt = downtilt_deg.to_radians();
        let boresight = Point3::new(tilt.cos() * az.cos(), tilt.cos() * az.sin(), -tilt.sin());
        let horizontal = Point3::new(-az.sin(), az.cos(), T::zero());
        let vertical = boresight.cross(horizontal);
        Self {
            boresight,
            horizontal,
            vertical,
        }
    }

    pub fn nadir() -> Self {
        Self::new(T::zero(), T::lit(90.0))
    }

    pub fn boresight(&self) -> Point3<T> {
        self.boresight
    }

    pub fn horizontal(&self) -> Point3<T> {
        self.horizontal
    }

    pub fn vertical(&self) -> Point3<T> {
        self.vertical
    }

    /// Off-boresight (azimuth, elevation) of a unit world direction, degrees.
    pub fn local_angles(&self, direction: Point3<T>) -> (T, T) {
        let xb = direction.dot(self.boresight);
        let xh = direction.dot(self.horizontal);
        let xv = direction.dot(self.vertical).max(-T::one()).min(T::one());
        (xh.atan2(xb).to_degrees(), xv.asin().to_degrees())
    }

    pub fn in_front(&self, direction: Point3<T>) -> bool {
        direction.dot(self.boresight) > T::zero()
    }
}

/// Uniform planar array with half-wavelength spacing by default.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelArray<T> {
    rows: usize,
    cols: usize,
    polarizations: usize,
    element: ElementPattern<T>,
    spacing_wavelengths: T,
    design_frequency: T,
    frame: PanelFrame<T>,
    /// Co-pol element positions relative to the panel center, meters.
    positions: Vec<Point3<T>>,
}

impl<T: Real> PanelArray<T> {
    pub fn new(
        rows: usize,
        cols: usize,
        polarizations: usize,
        element: ElementPattern<T>,
        spacing_wavelengths: T,
        design_frequency: T,
        frame: PanelFrame<T>,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 || polarizations == 0 {
            return Err(Error::config(
                "panel",
                "rows, columns and polarizations must be non-zero",
            ));
        }
        if !(spacing_wavelengths > T::zero()) {
            return Err(Error::config(
                "antenna.spacing_wavelengths",
                "element spacing must be positive",
            ));
        }
        if !(design_frequency > T::zero()) {
            return Err(Error::config(
                "panel.design_frequency",
                "design frequency must be positive",
            ));
        }
        let spacing = spacing_wavelengths * T::lit(SPEED_OF_LIGHT) / design_frequency;
        let half = T::lit(0.5);
        let row_mid = T::from_usize(rows - 1).unwrap() * half;
        let col_mid = T::from_usize(cols - 1).unwrap() * half;
        let mut positions = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let dv = (T::from_usize(r).unwrap() - row_mid) * spacing;
                let dh = (T::from_usize(c).unwrap() - col_mid) * spacing;
                positions.push(frame.vertical * dv + frame.horizontal * dh);
            }
        }
        Ok(Self {
            rows,
            cols,
            polarizations,
            element,
            spacing_wavelengths,
            design_frequency,
            frame,
            positions,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn polarizations(&self) -> usize {
        self.polarizations
    }

    /// Element count of one co-polarized subarray.
    pub fn co_pol_elements(&self) -> usize {
        self.rows * self.cols
    }

    pub fn total_elements(&self) -> usize {
        self.rows * self.cols * self.polarizations
    }

    pub fn element(&self) -> &ElementPattern<T> {
        &self.element
    }

    pub fn spacing_wavelengths(&self) -> T {
        self.spacing_wavelengths
    }

    pub fn frame(&self) -> &PanelFrame<T> {
        &self.frame
    }

    pub fn element_positions(&self) -> &[Point3<T>] {
        &self.positions
    }

    fn steering_vector(
        &self,
        direction: Point3<T>,
        carrier: T,
    ) -> impl Iterator<Item = Complex<T>> + '_ {
        let k = T::lit(2.0) * T::PI() * carrier / T::lit(SPEED_OF_LIGHT);
        self.positions
            .iter()
            .map(move |p| Complex::from_polar(T::one(), k * p.dot(direction)))
    }
}

/// Per-element complex weights of one co-polarized subarray.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringWeights<T> {
    weights: Vec<Complex<T>>,
}

impl<T: Real> SteeringWeights<T> {
    /// Uniform amplitude weights, renormalized to unit norm.
    pub fn from_weights(weights: Vec<Complex<T>>) -> Result<Self> {
        let norm = weights
            .iter()
            .map(|w| w.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt();
        if weights.is_empty() || !(norm > T::zero()) {
            return Err(Error::config(
                "weights",
                "weight vector must be non-empty and non-zero",
            ));
        }
        Ok(Self {
            weights: weights.into_iter().map(|w| w / norm).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.weights
    }
}

/// Conjugate-phase weights that point the main lobe of `panel` at `target`.
pub fn steering_weights<T: Real>(
    panel: &PanelArray<T>,
    target: Point3<T>,
    carrier: T,
) -> Result<SteeringWeights<T>> {
    let target = target
        .unit()
        .ok_or_else(|| Error::domain("zero steering direction"))?;
    if !panel.frame.in_front(target) {
        return Err(Error::OutOfCoverage);
    }
    let scale = T::one() / T::from_usize(panel.co_pol_elements()).unwrap().sqrt();
    let weights = panel
        .steering_vector(target, carrier)
        .map(|a| a.conj() * scale)
        .collect();
    Ok(SteeringWeights { weights })
}

/// Equal-phase weights: the fixed beam along the panel boresight.
pub fn broadside_weights<T: Real>(panel: &PanelArray<T>) -> SteeringWeights<T> {
    let n = panel.co_pol_elements();
    let w = Complex::new(T::one() / T::from_usize(n).unwrap().sqrt(), T::zero());
    SteeringWeights {
        weights: vec![w; n],
    }
}

/// Array factor `sum_n w_n exp(j k p_n . u)`.
pub fn array_factor<T: Real>(
    panel: &PanelArray<T>,
    weights: &SteeringWeights<T>,
    direction: Point3<T>,
    carrier: T,
) -> Result<Complex<T>> {
    if weights.len() != panel.co_pol_elements() {
        return Err(Error::config(
            "weights",
            format!(
                "{} weights for a {}-element co-pol subarray",
                weights.len(),
                panel.co_pol_elements()
            ),
        ));
    }
    Ok(array_factor_unchecked(panel, weights, direction, carrier))
}

fn array_factor_unchecked<T: Real>(
    panel: &PanelArray<T>,
    weights: &SteeringWeights<T>,
    direction: Point3<T>,
    carrier: T,
) -> Complex<T> {
    panel
        .steering_vector(direction, carrier)
        .zip(&weights.weights)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (a, w)| {
            acc + a * w
        })
}

/// Element gain plus `20 log10 |AF|` of one co-polarized subarray, dBi.
pub fn array_gain<T: Real>(
    panel: &PanelArray<T>,
    weights: &SteeringWeights<T>,
    direction: Point3<T>,
    carrier: T,
) -> Result<T> {
    let af = array_factor(panel, weights, direction, carrier)?;
    Ok(combine(panel, af, direction))
}

fn combine<T: Real>(panel: &PanelArray<T>, af: Complex<T>, direction: Point3<T>) -> T {
    let (az, el) = panel.frame.local_angles(direction);
    // keep deep nulls finite
    let af_power = af.norm_sqr().max(T::min_positive_value());
    panel.element.gain(az, el) + T::lit(10.0) * af_power.log10()
}

/// Directional CPE gain toward the platform. The CPE is aimed at
/// `pointing_az` in azimuth with its boresight on the horizon.
pub fn cpe_gain<T: Real>(pattern: &ElementPattern<T>, pointing_az: T, link: &LinkGeometry<T>) -> T {
    pattern.gain(wrap_degrees(link.azimuth - pointing_az), link.elevation)
}

/// The seven-panel payload: one nadir panel for the center cell and six
/// down-tilted side panels for the outer ring.
#[derive(Debug, Clone, PartialEq)]
pub struct HexArrayConfig<T> {
    pub bottom_panel: PanelArray<T>,
    pub side_panels: Vec<PanelArray<T>>,
}

/// Geometry parameters of [`HexArrayConfig`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HexArrayParams<T> {
    pub element: ElementPattern<T>,
    pub bottom_rows: usize,
    pub bottom_cols: usize,
    pub side_rows: usize,
    pub side_cols: usize,
    pub polarizations: usize,
    pub spacing_wavelengths: T,
    pub design_frequency: T,
    /// Side-panel downtilt below the horizon, degrees.
    pub side_downtilt: T,
    /// Azimuth of the first side panel, degrees.
    pub azimuth_offset: T,
}

impl<T: Real> HexArrayParams<T> {
    pub fn baseline() -> Self {
        Self {
            element: ElementPattern::array_element(),
            bottom_rows: 2,
            bottom_cols: 2,
            side_rows: 4,
            side_cols: 2,
            polarizations: 2,
            spacing_wavelengths: T::lit(0.5),
            design_frequency: T::lit(2.1e9),
            side_downtilt: T::lit(23.0),
            azimuth_offset: T::zero(),
        }
    }
}

impl<T: Real> HexArrayConfig<T> {
    pub fn new(p: &HexArrayParams<T>) -> Result<Self> {
        let bottom_panel = PanelArray::new(
            p.bottom_rows,
            p.bottom_cols,
            p.polarizations,
            p.element,
            p.spacing_wavelengths,
            p.design_frequency,
            PanelFrame::nadir(),
        )?;
        let side_panels = (0..6)
            .map(|i| {
                let az = p.azimuth_offset + T::lit(60.0) * T::from_usize(i).unwrap();
                PanelArray::new(
                    p.side_rows,
                    p.side_cols,
                    p.polarizations,
                    p.element,
                    p.spacing_wavelengths,
                    p.design_frequency,
                    PanelFrame::new(az, p.side_downtilt),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            bottom_panel,
            side_panels,
        })
    }

    /// Panels in cell order: index 0 is the center cell, 1..=6 the outer ring.
    pub fn panels(&self) -> impl Iterator<Item = &PanelArray<T>> {
        std::iter::once(&self.bottom_panel).chain(self.side_panels.iter())
    }
}

/// One transmit/receive beam of the payload, ready for gain evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum Radiator<T> {
    /// A single antenna with a fixed pattern (the single-cell case).
    Element {
        pattern: ElementPattern<T>,
        frame: PanelFrame<T>,
    },
    /// A panel array with a fixed weight vector.
    Array {
        panel: PanelArray<T>,
        weights: SteeringWeights<T>,
    },
}

impl<T: Real> Radiator<T> {
    pub fn array(panel: PanelArray<T>, weights: SteeringWeights<T>) -> Result<Self> {
        if weights.len() != panel.co_pol_elements() {
            return Err(Error::config(
                "weights",
                "weight count does not match panel",
            ));
        }
        Ok(Radiator::Array { panel, weights })
    }

    pub fn frame(&self) -> &PanelFrame<T> {
        match self {
            Radiator::Element { frame, .. } => frame,
            Radiator::Array { panel, .. } => panel.frame(),
        }
    }

    /// Gain in dBi toward the unit world `direction` at `carrier` Hz.
    pub fn gain(&self, direction: Point3<T>, carrier: T) -> T {
        match self {
            Radiator::Element { pattern, frame } => {
                let (az, el) = frame.local_angles(direction);
                pattern.gain(az, el)
            }
            Radiator::Array { panel, weights } => {
                let af = array_factor_unchecked(panel, weights, direction, carrier);
                combine(panel, af, direction)
            }
        }
    }
}
