use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;

use super::{GeometryError, AREA_TOLERANCE};

/// Rejection-sampling budget of [`AreaPolygon::sample`].
pub const MAX_SAMPLE_ATTEMPTS: usize = 1_000_000;

/// The closed half-plane `a x + b y <= c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlane {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl HalfPlane {
    pub const fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    /// Signed excess `a x + b y - c`; positive means outside.
    pub fn excess(&self, x: f64, y: f64) -> f64 {
        self.a * x + self.b * y - self.c
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl BoundingBox {
    pub fn width(&self) -> f64 {
        self.max_x - self.min_x
    }

    pub fn height(&self) -> f64 {
        self.max_y - self.min_y
    }

    pub fn diagonal(&self) -> f64 {
        libm::hypot(self.width(), self.height())
    }
}

/// A bounded convex deployment area given as an intersection of half-planes.
///
/// The vertex ring is derived once on construction; it drives the bounding
/// box, the exact Euclidean projection and the polygon area.
#[derive(Debug, Clone, PartialEq)]
pub struct AreaPolygon {
    half_planes: Vec<HalfPlane>,
    /// Counter-clockwise.
    vertices: Vec<(f64, f64)>,
    bbox: BoundingBox,
}

impl AreaPolygon {
    pub fn new(half_planes: Vec<HalfPlane>) -> Result<Self, GeometryError> {
        let mut normalised = Vec::with_capacity(half_planes.len());
        for (i, hp) in half_planes.iter().enumerate() {
            if !(hp.a.is_finite() && hp.b.is_finite() && hp.c.is_finite()) {
                return Err(GeometryError::NonFinite);
            }
            let n = libm::hypot(hp.a, hp.b);
            if n == 0.0 {
                return Err(GeometryError::ZeroNormal(i));
            }
            normalised.push(HalfPlane::new(hp.a / n, hp.b / n, hp.c / n));
        }
        if !normals_span_plane(&normalised) {
            return Err(GeometryError::UnboundedArea);
        }

        let inside = |x: f64, y: f64| normalised.iter().all(|h| h.excess(x, y) <= 1e-7);
        let mut vertices: Vec<(f64, f64)> = Vec::new();
        for (i, h) in normalised.iter().enumerate() {
            for g in &normalised[i + 1..] {
                let det = h.a * g.b - h.b * g.a;
                if det.abs() < 1e-12 {
                    continue;
                }
                let x = (h.c * g.b - h.b * g.c) / det;
                let y = (h.a * g.c - h.c * g.a) / det;
                if inside(x, y)
                    && !vertices
                        .iter()
                        .any(|&(vx, vy)| libm::hypot(vx - x, vy - y) < 1e-7)
                {
                    vertices.push((x, y));
                }
            }
        }
        if vertices.len() < 3 {
            return Err(GeometryError::EmptyArea);
        }
        let n = vertices.len() as f64;
        let cx = vertices.iter().map(|v| v.0).sum::<f64>() / n;
        let cy = vertices.iter().map(|v| v.1).sum::<f64>() / n;
        vertices.sort_by(|p, q| {
            let ap = libm::atan2(p.1 - cy, p.0 - cx);
            let aq = libm::atan2(q.1 - cy, q.0 - cx);
            ap.total_cmp(&aq)
        });
        if shoelace(&vertices) <= 1e-9 {
            return Err(GeometryError::EmptyArea);
        }

        let bbox = BoundingBox {
            min_x: vertices.iter().map(|v| v.0).fold(f64::INFINITY, f64::min),
            min_y: vertices.iter().map(|v| v.1).fold(f64::INFINITY, f64::min),
            max_x: vertices.iter().map(|v| v.0).fold(f64::NEG_INFINITY, f64::max),
            max_y: vertices.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max),
        };
        Ok(Self { half_planes, vertices, bbox })
    }

    /// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self, GeometryError> {
        Self::new(alloc::vec![
            HalfPlane::new(-1.0, 0.0, -x0),
            HalfPlane::new(1.0, 0.0, x1),
            HalfPlane::new(0.0, -1.0, -y0),
            HalfPlane::new(0.0, 1.0, y1),
        ])
    }

    /// Convex polygon from its corners, listed counter-clockwise.
    pub fn from_vertices(corners: &[(f64, f64)]) -> Result<Self, GeometryError> {
        let planes = (0..corners.len())
            .map(|i| {
                let (x0, y0) = corners[i];
                let (x1, y1) = corners[(i + 1) % corners.len()];
                // Outward normal of a CCW edge is (dy, -dx).
                let (a, b) = (y1 - y0, x0 - x1);
                HalfPlane::new(a, b, a * x0 + b * y0)
            })
            .collect();
        Self::new(planes)
    }

    /// The half-planes as supplied (not normalised).
    pub fn half_planes(&self) -> &[HalfPlane] {
        &self.half_planes
    }

    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    pub fn bounding_box(&self) -> BoundingBox {
        self.bbox
    }

    /// Surface in m².
    pub fn area(&self) -> f64 {
        shoelace(&self.vertices)
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.half_planes.iter().all(|h| {
            let scale = libm::hypot(h.a, h.b);
            h.excess(x, y) <= AREA_TOLERANCE * scale
        })
    }

    /// Uniform point inside the area by rejection from the bounding box.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(f64, f64), GeometryError> {
        let b = self.bbox;
        for _ in 0..MAX_SAMPLE_ATTEMPTS {
            let x = b.min_x + rng.gen::<f64>() * b.width();
            let y = b.min_y + rng.gen::<f64>() * b.height();
            if self.contains(x, y) {
                return Ok((x, y));
            }
        }
        Err(GeometryError::SamplingExhausted(MAX_SAMPLE_ATTEMPTS))
    }

    /// Euclidean-nearest point of the area; the input itself when inside.
    pub fn project(&self, x: f64, y: f64) -> (f64, f64) {
        if self.contains(x, y) {
            return (x, y);
        }
        let mut best = (x, y);
        let mut best_d = f64::INFINITY;
        let n = self.vertices.len();
        for i in 0..n {
            let p = closest_on_edge(self.vertices[i], self.vertices[(i + 1) % n], x, y);
            let d = libm::hypot(p.0 - x, p.1 - y);
            if d < best_d {
                best_d = d;
                best = p;
            }
        }
        best
    }

    /// Distance from the point to the area; zero inside.
    pub fn distance_to(&self, x: f64, y: f64) -> f64 {
        let (px, py) = self.project(x, y);
        libm::hypot(px - x, py - y)
    }
}

fn closest_on_edge(a: (f64, f64), b: (f64, f64), x: f64, y: f64) -> (f64, f64) {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return a;
    }
    let t = (((x - a.0) * dx + (y - a.1) * dy) / len2).clamp(0.0, 1.0);
    (a.0 + t * dx, a.1 + t * dy)
}

fn shoelace(v: &[(f64, f64)]) -> f64 {
    let n = v.len();
    let twice: f64 = (0..n)
        .map(|i| {
            let (x0, y0) = v[i];
            let (x1, y1) = v[(i + 1) % n];
            x0 * y1 - x1 * y0
        })
        .sum();
    twice.abs() / 2.0
}

/// True when no direction escapes every half-plane, i.e. the outward normals
/// leave no angular gap of π or more.
fn normals_span_plane(planes: &[HalfPlane]) -> bool {
    if planes.len() < 3 {
        return false;
    }
    let mut angles: Vec<f64> = planes.iter().map(|h| libm::atan2(h.b, h.a)).collect();
    angles.sort_by(f64::total_cmp);
    let wrap = angles[0] + 2.0 * PI - angles[angles.len() - 1];
    let max_gap = angles
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(wrap, f64::max);
    max_gap < PI - 1e-12
}
