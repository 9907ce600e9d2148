//! Waveguide deployment schemes and optimal pinching-antenna placement.
//!
//! Every quantity downstream of placement depends only on the squared
//! antenna-user distance, so that is the only distance this module exposes
//! (as [`SquaredDistance`]).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sysconfig::RegionGeometry;
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("user position ({x}, {y}) lies outside the {d_x} x {d_y} region")]
    OutsideRegion { x: f64, y: f64, d_x: f64, d_y: f64 },
    #[error("unknown deployment scheme {0:?} (expected eds, cds or dds)")]
    UnknownScheme(String),
}

/// Line along which the waveguide runs, at height `h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// `y = 0`.
    Eds,
    /// `y = D_y / 2`.
    Cds,
    /// `y = (D_y / D_x) x`.
    Dds,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Eds, Scheme::Cds, Scheme::Dds];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Eds => "eds",
            Scheme::Cds => "cds",
            Scheme::Dds => "dds",
        }
    }

    /// Number of equal strips the waveguide cuts the `y` range into for the
    /// axis-parallel schemes; `None` for the diagonal.
    pub fn strips(self) -> Option<u8> {
        match self {
            Scheme::Eds => Some(1),
            Scheme::Cds => Some(2),
            Scheme::Dds => None,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "eds" | "edge" => Ok(Scheme::Eds),
            "cds" | "center" | "centre" => Ok(Scheme::Cds),
            "dds" | "diagonal" => Ok(Scheme::Dds),
            _ => Err(GeometryError::UnknownScheme(s.to_owned())),
        }
    }
}

/// A scheme bound to the region it is deployed in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deployment<T> {
    pub scheme: Scheme,
    pub region: RegionGeometry<T>,
}

/// User position on the ground plane (`z = 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UePosition<T> {
    pub x: T,
    pub y: T,
}

impl<T> UePosition<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }
}

/// Antenna position on the waveguide (`z = h`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntennaPosition<T> {
    pub x: T,
    pub y: T,
}

/// Squared Euclidean antenna-user distance, in square meters.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SquaredDistance<T>(pub T);

impl<T: Copy> SquaredDistance<T> {
    pub fn get(self) -> T {
        self.0
    }
}

impl<T: Scalar> Deployment<T> {
    pub fn new(scheme: Scheme, region: RegionGeometry<T>) -> Self {
        Self { scheme, region }
    }

    pub fn contains(&self, ue: &UePosition<T>) -> bool {
        ue.x >= T::zero()
            && ue.x <= self.region.d_x()
            && ue.y >= T::zero()
            && ue.y <= self.region.d_y()
    }

    /// `y` coordinate of the waveguide above ground point `x`.
    pub fn waveguide_y(&self, x: T) -> T {
        match self.scheme {
            Scheme::Eds => T::zero(),
            Scheme::Cds => self.region.d_y() * T::half(),
            Scheme::Dds => self.region.aspect() * x,
        }
    }

    /// Point on the waveguide closest to `ue`.
    pub fn optimal_antenna_position(
        &self,
        ue: &UePosition<T>,
    ) -> Result<AntennaPosition<T>, GeometryError> {
        if !self.contains(ue) {
            return Err(GeometryError::OutsideRegion {
                x: ue.x.to_f64_lossy(),
                y: ue.y.to_f64_lossy(),
                d_x: self.region.d_x().to_f64_lossy(),
                d_y: self.region.d_y().to_f64_lossy(),
            });
        }
        Ok(self.project(ue))
    }

    /// Placement without the containment check; callers guarantee `ue` is in
    /// the rectangle.
    pub(crate) fn project(&self, ue: &UePosition<T>) -> AntennaPosition<T> {
        match self.scheme {
            Scheme::Eds | Scheme::Cds => AntennaPosition {
                x: ue.x,
                y: self.waveguide_y(ue.x),
            },
            Scheme::Dds => {
                let k = self.region.aspect();
                let x = (ue.x + k * ue.y) / (T::one() + k * k);
                // x + k y <= D_x (1 + k^2) inside the rectangle, so the foot of
                // the perpendicular never leaves the waveguide.
                let slack = T::lit(8.0) * T::epsilon() * self.region.d_x();
                assert!(
                    x >= -slack && x <= self.region.d_x() + slack,
                    "diagonal placement left the waveguide: x_p = {x}"
                );
                AntennaPosition { x, y: k * x }
            }
        }
    }

    /// Squared distance from `ue` to its optimally placed antenna.
    pub fn optimal_squared_distance(
        &self,
        ue: &UePosition<T>,
    ) -> Result<SquaredDistance<T>, GeometryError> {
        let p = self.optimal_antenna_position(ue)?;
        Ok(squared_distance(&self.region, &p, ue))
    }

    /// Length of the waveguide segment over the rectangle.
    pub fn waveguide_length(&self) -> T {
        match self.scheme {
            Scheme::Eds | Scheme::Cds => self.region.d_x(),
            Scheme::Dds => self.region.d_x().hypot(self.region.d_y()),
        }
    }
}

/// `(x_p - x_u)^2 + (y_p - y_u)^2 + h^2`.
pub fn squared_distance<T: Scalar>(
    region: &RegionGeometry<T>,
    p: &AntennaPosition<T>,
    ue: &UePosition<T>,
) -> SquaredDistance<T> {
    let dx = p.x - ue.x;
    let dy = p.y - ue.y;
    let h = region.height();
    SquaredDistance(dx * dx + dy * dy + h * h)
}

/// Derivative of the diagonal-scheme squared distance with respect to the
/// antenna's `x` coordinate: `2 (1 + k^2) x_p - 2 (x_u + k y_u)`.
pub fn diagonal_distance_slope<T: Scalar>(
    region: &RegionGeometry<T>,
    x_p: T,
    ue: &UePosition<T>,
) -> T {
    let k = region.aspect();
    T::two() * (T::one() + k * k) * x_p - T::two() * (ue.x + k * ue.y)
}

/// Smallest squared distance over `grid_points` evenly spaced antenna
/// positions along the waveguide, endpoints included.
pub fn min_squared_distance_bruteforce<T: Scalar>(
    deployment: &Deployment<T>,
    ue: &UePosition<T>,
    grid_points: usize,
) -> SquaredDistance<T> {
    assert!(grid_points >= 2, "grid needs at least two points");
    let d_x = deployment.region.d_x();
    let last = T::from_usize(grid_points - 1).expect("grid size fits the scalar");
    let min = (0..grid_points)
        .map(|i| {
            let x = d_x * T::from_usize(i).expect("index fits the scalar") / last;
            let p = AntennaPosition {
                x,
                y: deployment.waveguide_y(x),
            };
            squared_distance(&deployment.region, &p, ue).0
        })
        .fold(T::infinity(), T::min);
    SquaredDistance(min)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn region(d_x: f64, d_y: f64, h: f64) -> RegionGeometry<f64> {
        RegionGeometry::new(d_x, d_y, h).unwrap()
    }

    #[test]
    fn dds_square_corner_lands_mid_diagonal() {
        let dep = Deployment::new(Scheme::Dds, region(8.0, 8.0, 3.0));
        let p = dep
            .optimal_antenna_position(&UePosition::new(8.0, 0.0))
            .unwrap();
        assert!((p.x - 4.0).abs() < 1e-15 && (p.y - 4.0).abs() < 1e-15);
        // 4^2 + 4^2 + 3^2
        let d = dep
            .optimal_squared_distance(&UePosition::new(8.0, 0.0))
            .unwrap();
        assert!((d.get() - 41.0).abs() < 1e-12);
    }

    #[test]
    fn eds_projects_onto_edge() {
        let dep = Deployment::new(Scheme::Eds, region(15.0, 10.0, 3.0));
        let ue = UePosition::new(5.0, 7.0);
        let p = dep.optimal_antenna_position(&ue).unwrap();
        assert_eq!(p, AntennaPosition { x: 5.0, y: 0.0 });
        assert_eq!(dep.optimal_squared_distance(&ue).unwrap().get(), 49.0 + 9.0);
    }

    #[test]
    fn cds_projects_onto_center_line() {
        let dep = Deployment::new(Scheme::Cds, region(15.0, 10.0, 3.0));
        let p = dep
            .optimal_antenna_position(&UePosition::new(2.0, 9.0))
            .unwrap();
        assert_eq!(p, AntennaPosition { x: 2.0, y: 5.0 });
    }

    #[test]
    fn dds_diagonal_point_is_fixed() {
        let r = region(15.0, 10.0, 3.0);
        let dep = Deployment::new(Scheme::Dds, r);
        let ue = UePosition::new(6.0, r.aspect() * 6.0);
        let p = dep.optimal_antenna_position(&ue).unwrap();
        assert!((p.x - ue.x).abs() < 1e-12 && (p.y - ue.y).abs() < 1e-12);
        let d = dep.optimal_squared_distance(&ue).unwrap().get();
        assert!((d - 9.0).abs() < 1e-12);
    }

    #[test]
    fn directly_above_gives_height_squared() {
        let r = region(15.0, 10.0, 3.0);
        let ue = UePosition::new(1.0, 2.0);
        let d = squared_distance(&r, &AntennaPosition { x: 1.0, y: 2.0 }, &ue);
        assert_eq!(d.get(), 9.0);
    }

    #[test]
    fn rejects_outside_user() {
        let dep = Deployment::new(Scheme::Eds, region(15.0, 10.0, 3.0));
        for ue in [
            UePosition::new(-0.1, 1.0),
            UePosition::new(1.0, 10.5),
            UePosition::new(16.0, 1.0),
            UePosition::new(f64::NAN, 1.0),
        ] {
            assert!(matches!(
                dep.optimal_antenna_position(&ue),
                Err(GeometryError::OutsideRegion { .. })
            ));
        }
    }

    #[test]
    fn dds_extreme_corners_stay_on_waveguide() {
        for (d_x, d_y) in [(15.0, 10.0), (1.0, 100.0), (100.0, 1.0), (8.0, 8.0)] {
            let dep = Deployment::new(Scheme::Dds, region(d_x, d_y, 3.0));
            for (x, y) in [(0.0, 0.0), (d_x, 0.0), (0.0, d_y), (d_x, d_y)] {
                dep.optimal_antenna_position(&UePosition::new(x, y))
                    .unwrap();
            }
        }
    }

    #[test]
    fn bruteforce_on_diagonal_reaches_height() {
        let r = region(8.0, 8.0, 3.0);
        let dep = Deployment::new(Scheme::Dds, r);
        let n = 10_000;
        let d = min_squared_distance_bruteforce(&dep, &UePosition::new(3.0, 3.0), n).get();
        let step = dep.waveguide_length() / (n - 1) as f64;
        assert!(d >= 9.0 && d <= 9.0 + step * step);
    }

    #[test]
    fn scheme_parsing() {
        assert_eq!("EDS".parse::<Scheme>().unwrap(), Scheme::Eds);
        assert_eq!("diagonal".parse::<Scheme>().unwrap(), Scheme::Dds);
        assert!("ring".parse::<Scheme>().is_err());
    }

    proptest::proptest! {
        #[test]
        fn placement_beats_grid(
            scheme in proptest::sample::select(Scheme::ALL.to_vec()),
            d_x in 1.0_f64..30.0, d_y in 1.0_f64..30.0, h in 0.5_f64..6.0,
            fx in 0.0_f64..=1.0, fy in 0.0_f64..=1.0,
        ) {
            let dep = Deployment::new(scheme, region(d_x, d_y, h));
            let ue = UePosition::new(fx * d_x, fy * d_y);
            let best = dep.optimal_squared_distance(&ue).unwrap().get();
            let grid = min_squared_distance_bruteforce(&dep, &ue, 2_000).get();
            proptest::prop_assert!(best >= h * h);
            proptest::prop_assert!(best <= grid + 1e-9 * grid);
        }

        #[test]
        fn dds_first_order_condition(
            d_x in 1.0_f64..30.0, d_y in 1.0_f64..30.0,
            fx in 0.0_f64..=1.0, fy in 0.0_f64..=1.0,
        ) {
            let r = region(d_x, d_y, 3.0);
            let dep = Deployment::new(Scheme::Dds, r);
            let ue = UePosition::new(fx * d_x, fy * d_y);
            let p = dep.optimal_antenna_position(&ue).unwrap();
            proptest::prop_assert!(diagonal_distance_slope(&r, p.x, &ue).abs() < 1e-9);
            proptest::prop_assert!((p.y - r.aspect() * p.x).abs() <= 1e-12 * p.y.abs().max(1.0));
        }

        #[test]
        fn projection_is_idempotent(
            scheme in proptest::sample::select(Scheme::ALL.to_vec()),
            fx in 0.0_f64..=1.0, fy in 0.0_f64..=1.0,
        ) {
            let dep = Deployment::new(scheme, region(15.0, 10.0, 3.0));
            let p = dep.optimal_antenna_position(&UePosition::new(fx * 15.0, fy * 10.0)).unwrap();
            let q = dep.optimal_antenna_position(&UePosition::new(p.x, p.y)).unwrap();
            proptest::prop_assert!((p.x - q.x).abs() < 1e-12 && (p.y - q.y).abs() < 1e-12);
        }
    }
}
