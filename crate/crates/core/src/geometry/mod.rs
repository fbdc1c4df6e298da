//! Points, distances, obstacles and deployment areas.
//!
//! Line-of-sight is decided purely geometrically: a link is NLoS when the
//! straight segment between the two antennas crosses any face of any cuboid
//! obstacle. Obstacle material is not modelled.

mod area;
mod cuboid;

use core::ops::{Add, Mul, Sub};

pub use area::{AreaPolygon, BoundingBox, HalfPlane, MAX_SAMPLE_ATTEMPTS};
pub use cuboid::{max_depth_along, segment_blocked_by, Cuboid, FACES};

/// Speed of light used by the breakpoint-distance formula, in m/s.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// Intersections closer than this (in segment parameter) to either endpoint
/// do not block the link.
pub const ENDPOINT_EXCLUSION: f64 = 1e-9;

/// A face hit blocks only if the segment goes deeper than this into the solid, in meters.
pub const PENETRATION_TOLERANCE: f64 = 1e-9;

/// Relative tolerance for the planarity of cuboid faces.
pub const PLANARITY_TOLERANCE: f64 = 1e-6;

/// Absolute slack of the half-plane membership test, in meters.
pub const AREA_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("breakpoint distance undefined: antenna heights {h_bs} m / {h_ut} m must exceed the effective environment height {h_e} m")]
    HeightBelowEnvironment { h_bs: f64, h_ut: f64, h_e: f64 },
    #[error("carrier frequency must be positive, got {0} GHz")]
    NonPositiveFrequency(f64),
    #[error("segment endpoints coincide")]
    DegenerateSegment,
    #[error("coordinate is not finite")]
    NonFinite,
    #[error("cuboid face {face} is not planar (deviation {deviation:.3e} m, allowed {allowed:.3e} m)")]
    NonPlanarFace { face: usize, deviation: f64, allowed: f64 },
    #[error("cuboid has no volume")]
    ZeroVolume,
    #[error("half-plane {0} has a zero normal")]
    ZeroNormal(usize),
    #[error("area is unbounded")]
    UnboundedArea,
    #[error("area is empty or has zero extent")]
    EmptyArea,
    #[error("rejection sampling gave up after {0} attempts")]
    SamplingExhausted(usize),
}

/// A position in meters. `z` is the antenna height above ground.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Self) -> Self {
        Self::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm(self) -> f64 {
        libm::sqrt(self.dot(self))
    }

    /// Point at parameter `t` on the way from `self` to `other`.
    pub fn lerp(self, other: Self, t: f64) -> Self {
        self + (other - self) * t
    }
}

impl Add for Point3 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Point3 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self::new(self.x * k, self.y * k, self.z * k)
    }
}

/// Euclidean 3D distance.
pub fn dist3d(p: Point3, q: Point3) -> f64 {
    (q - p).norm()
}

/// Horizontal distance; heights are ignored.
pub fn dist2d(p: Point3, q: Point3) -> f64 {
    libm::hypot(q.x - p.x, q.y - p.y)
}

/// UMi breakpoint distance `4 (h_bs - h_e) (h_ut - h_e) f / c`, with `f` in GHz.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn breakpoint_distance(h_bs: f64, h_ut: f64, h_e: f64, f_ghz: f64) -> Result<f64, GeometryError> {
    if !(h_bs > h_e && h_ut > h_e) {
        return Err(GeometryError::HeightBelowEnvironment { h_bs, h_ut, h_e });
    }
    if !(f_ghz > 0.0) {
        return Err(GeometryError::NonPositiveFrequency(f_ghz));
    }
    Ok(4.0 * (h_bs - h_e) * (h_ut - h_e) * f_ghz * 1e9 / SPEED_OF_LIGHT)
}

/// A sightline between two antennas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    p: Point3,
    q: Point3,
}

impl Segment {
    pub fn new(p: Point3, q: Point3) -> Result<Self, GeometryError> {
        if !p.is_finite() || !q.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        if p == q {
            return Err(GeometryError::DegenerateSegment);
        }
        Ok(Self { p, q })
    }

    pub fn start(&self) -> Point3 {
        self.p
    }

    pub fn end(&self) -> Point3 {
        self.q
    }

    pub fn length(&self) -> f64 {
        dist3d(self.p, self.q)
    }

    pub fn at(&self, t: f64) -> Point3 {
        self.p.lerp(self.q, t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LosClass {
    Los,
    Nlos,
}

/// NLoS iff at least one obstacle blocks the segment.
pub fn los_class(seg: &Segment, obstacles: &[Cuboid]) -> LosClass {
    if obstacles.iter().any(|obs| segment_blocked_by(seg, obs)) {
        LosClass::Nlos
    } else {
        LosClass::Los
    }
}
