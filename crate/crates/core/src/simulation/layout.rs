use crate::geometry::Point3;

use super::LayoutMode;

/// Service area and ground cell centers.
#[derive(Debug, Clone, PartialEq)]
pub struct CellLayout {
    mode: LayoutMode,
    radius: f64,
    centers: Vec<Point3<f64>>,
}

impl CellLayout {
    pub fn single(radius: f64) -> Self {
        Self {
            mode: LayoutMode::Single,
            radius,
            centers: vec![Point3::ground(0.0, 0.0)],
        }
    }

    /// Center cell at the origin plus six outer cells `outer_center_radius`
    /// away, the first at `azimuth_offset` degrees and the rest 60 degrees apart.
    pub fn seven_cell(radius: f64, outer_center_radius: f64, azimuth_offset: f64) -> Self {
        let mut centers = vec![Point3::ground(0.0, 0.0)];
        for i in 0..6 {
            let az = (azimuth_offset + 60.0 * i as f64).to_radians();
            centers.push(Point3::ground(
                outer_center_radius * az.cos(),
                outer_center_radius * az.sin(),
            ));
        }
        Self {
            mode: LayoutMode::SevenCell,
            radius,
            centers,
        }
    }

    pub fn mode(&self) -> LayoutMode {
        self.mode
    }

    /// Radius of the whole service area, meters.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn centers(&self) -> &[Point3<f64>] {
        &self.centers
    }

    pub fn cell_count(&self) -> usize {
        self.centers.len()
    }

    /// Index of the nearest cell center; ties resolve to the lower index.
    pub fn cell_of(&self, p: Point3<f64>) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, c) in self.centers.iter().enumerate() {
            let d = (p - *c).horizontal_norm();
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        best
    }
}
