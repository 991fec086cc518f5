//! Local flat-earth ENU frame, the station-keeping flight circle and
//! the angular geometry between platform, terminals and gateway.
//!
//! `x` points east, `y` north and `z` up; the ground is the plane `z = 0`.
//! Azimuths are measured counter-clockwise from the `x` axis.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Real;

/// Position (or direction vector) in meters in the local frame.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Point3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn ground(x: T, y: T) -> Self {
        Self { x, y, z: T::zero() }
    }

    pub fn dot(self, other: Self) -> T {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> T {
        self.dot(self).sqrt()
    }

    pub fn horizontal_norm(self) -> T {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Self) -> T {
        (other - self).norm()
    }

    /// Unit vector in the same direction, or `None` for the zero vector.
    pub fn unit(self) -> Option<Self> {
        let n = self.norm();
        if n > T::zero() && n.is_finite() {
            Some(self * (T::one() / n))
        } else {
            None
        }
    }

    /// Unit direction from azimuth (ccw from +x) and elevation above the horizon, degrees.
    pub fn from_angles(azimuth_deg: T, elevation_deg: T) -> Self {
        let (az, el) = (azimuth_deg.to_radians(), elevation_deg.to_radians());
        Self::new(el.cos() * az.cos(), el.cos() * az.sin(), el.sin())
    }
}

impl<T: Real> Add for Point3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> Sub for Point3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> Mul<T> for Point3<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

impl<T: Real> Neg for Point3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

/// Circular station-keeping route of the platform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlightPattern<T> {
    /// Circle center; its `z` is the flight altitude.
    pub center: Point3<T>,
    pub diameter: T,
    /// Number of equally spaced snapshot positions on the circle.
    pub position_count: usize,
}

impl<T: Real> FlightPattern<T> {
    pub fn new(center: Point3<T>, diameter: T, position_count: usize) -> Result<Self> {
        if !(center.z > T::zero()) {
            return Err(Error::config(
                "haps.altitude_m",
                "altitude must be positive",
            ));
        }
        if !(diameter >= T::zero()) || !diameter.is_finite() {
            return Err(Error::config(
                "haps.flight_diameter_m",
                "diameter must be finite and non-negative",
            ));
        }
        if position_count == 0 {
            return Err(Error::config(
                "haps.positions",
                "need at least one flight position",
            ));
        }
        Ok(Self {
            center,
            diameter,
            position_count,
        })
    }

    /// 20 km altitude, 6 km diameter, 12 positions 30 degrees apart.
    pub fn baseline() -> Self {
        Self {
            center: Point3::new(T::zero(), T::zero(), T::lit(20_000.0)),
            diameter: T::lit(6_000.0),
            position_count: 12,
        }
    }

    pub fn altitude(&self) -> T {
        self.center.z
    }

    pub fn radius(&self) -> T {
        self.diameter / T::lit(2.0)
    }

    /// Azimuth increment between consecutive positions, degrees.
    pub fn angular_step(&self) -> T {
        T::lit(360.0) / T::from_usize(self.position_count).unwrap()
    }
}

/// Platform position for snapshot `run_index`, at azimuth `run_index * angular_step`
/// from the `x` axis.
pub fn haps_position<T: Real>(pattern: &FlightPattern<T>, run_index: usize) -> Result<Point3<T>> {
    if run_index >= pattern.position_count {
        return Err(Error::config(
            "run_index",
            format!(
                "{run_index} is out of range for {} flight positions",
                pattern.position_count
            ),
        ));
    }
    let az = (T::from_usize(run_index).unwrap() * pattern.angular_step()).to_radians();
    let r = pattern.radius();
    Ok(Point3::new(
        pattern.center.x + r * az.cos(),
        pattern.center.y + r * az.sin(),
        pattern.center.z,
    ))
}

/// Angles and range of the ray from one endpoint to another.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry<T> {
    /// Angle of the ray above the local horizontal plane at the first endpoint, degrees.
    pub elevation: T,
    /// Azimuth of the ray, degrees in `[0, 360)`.
    pub azimuth: T,
    /// Euclidean distance, meters.
    pub slant_range: T,
}

/// Geometry of the `a -> b` ray. For a terminal-to-platform link the
/// elevation is in `(0, 90]`; it is negative when `b` is below `a`.
pub fn link_geometry<T: Real>(a: Point3<T>, b: Point3<T>) -> Result<LinkGeometry<T>> {
    let d = b - a;
    let slant = d.norm();
    if !(slant > T::zero()) {
        return Err(Error::DegenerateGeometry);
    }
    let horizontal = d.horizontal_norm();
    let elevation = d.z.atan2(horizontal).to_degrees();
    let mut azimuth = d.y.atan2(d.x).to_degrees();
    if azimuth < T::zero() {
        azimuth = azimuth + T::lit(360.0);
    }
    if azimuth >= T::lit(360.0) {
        azimuth = azimuth - T::lit(360.0);
    }
    Ok(LinkGeometry {
        elevation,
        azimuth,
        slant_range: slant,
    })
}
