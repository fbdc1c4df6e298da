use super::{GeometryError, Point3, Segment, ENDPOINT_EXCLUSION, PENETRATION_TOLERANCE, PLANARITY_TOLERANCE};

/// Vertex indices of the six faces: bottom, top, then the four sides.
///
/// Vertices 0..4 form the bottom ring counter-clockwise seen from above and
/// vertex `i + 4` sits above vertex `i`. With that convention every face
/// below is wound with its normal pointing out of the solid.
pub const FACES: [[usize; 4]; 6] = [
    [0, 3, 2, 1],
    [4, 5, 6, 7],
    [0, 1, 5, 4],
    [1, 2, 6, 5],
    [2, 3, 7, 6],
    [3, 0, 4, 7],
];

/// An eight-vertex, six-face obstacle ("trapezoidal cuboid").
///
/// Faces need only be planar up to a relative tolerance; LoS tests split each
/// face into two triangles so mild non-planarity is harmless.
#[derive(Debug, Clone, PartialEq)]
pub struct Cuboid {
    vertices: [Point3; 8],
    /// Outward unit normal and offset per face, for containment tests.
    planes: [(Point3, f64); 6],
}

impl Cuboid {
    pub fn new(vertices: [Point3; 8]) -> Result<Self, GeometryError> {
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        for (i, face) in FACES.iter().enumerate() {
            let [a, b, c, d] = face.map(|k| vertices[k]);
            let normal = (c - a).cross(d - b);
            let diagonal = (c - a).norm().max((d - b).norm());
            let len = normal.norm();
            if len <= f64::EPSILON * diagonal * diagonal {
                return Err(GeometryError::ZeroVolume);
            }
            let n = normal * (1.0 / len);
            let centre = (a + b + c + d) * 0.25;
            let deviation = [a, b, c, d]
                .iter()
                .map(|v| n.dot(*v - centre).abs())
                .fold(0.0, f64::max);
            let allowed = PLANARITY_TOLERANCE * diagonal;
            if deviation > allowed {
                return Err(GeometryError::NonPlanarFace { face: i, deviation, allowed });
            }
        }
        let volume = signed_volume(&vertices);
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(volume.abs() > 1e-12) {
            return Err(GeometryError::ZeroVolume);
        }

        let centroid = vertices.iter().fold(Point3::default(), |acc, v| acc + *v) * 0.125;
        let planes = FACES.map(|face| {
            let [a, b, c, d] = face.map(|k| vertices[k]);
            let mut n = (c - a).cross(d - b);
            n = n * (1.0 / n.norm());
            let centre = (a + b + c + d) * 0.25;
            if n.dot(centroid - centre) > 0.0 {
                n = n * -1.0;
            }
            (n, n.dot(centre))
        });
        Ok(Self { vertices, planes })
    }

    /// Box with faces parallel to the axes, spanning `min..max`.
    pub fn axis_aligned(min: Point3, max: Point3) -> Result<Self, GeometryError> {
        let (x0, y0, z0) = (min.x, min.y, min.z);
        let (x1, y1, z1) = (max.x, max.y, max.z);
        Self::new([
            Point3::new(x0, y0, z0),
            Point3::new(x1, y0, z0),
            Point3::new(x1, y1, z0),
            Point3::new(x0, y1, z0),
            Point3::new(x0, y0, z1),
            Point3::new(x1, y0, z1),
            Point3::new(x1, y1, z1),
            Point3::new(x0, y1, z1),
        ])
    }

    pub fn vertices(&self) -> &[Point3; 8] {
        &self.vertices
    }

    pub fn volume(&self) -> f64 {
        signed_volume(&self.vertices).abs()
    }

    /// The twelve triangles obtained by splitting each face along `0-2`.
    pub fn triangles(&self) -> impl Iterator<Item = [Point3; 3]> + '_ {
        FACES.iter().flat_map(move |&[a, b, c, d]| {
            let v = &self.vertices;
            [[v[a], v[b], v[c]], [v[a], v[c], v[d]]]
        })
    }

    /// Signed depth of `p` inside the solid: positive inside, negative outside.
    ///
    /// For points outside this is minus the largest plane violation, a lower
    /// bound on the Euclidean distance to the solid.
    pub fn depth(&self, p: Point3) -> f64 {
        self.planes
            .iter()
            .map(|(n, off)| off - n.dot(p))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, p: Point3) -> bool {
        self.depth(p) >= 0.0
    }
}

fn signed_volume(v: &[Point3; 8]) -> f64 {
    FACES
        .iter()
        .flat_map(|&[a, b, c, d]| [[a, b, c], [a, c, d]])
        .map(|[a, b, c]| v[a].dot(v[b].cross(v[c])))
        .sum::<f64>()
        / 6.0
}

/// Parameter `t` along `origin + t * dir` where the line meets `tri`, if it does.
fn intersect_triangle(origin: Point3, dir: Point3, tri: &[Point3; 3]) -> Option<f64> {
    const BARY_EPS: f64 = 1e-12;
    let e1 = tri[1] - tri[0];
    let e2 = tri[2] - tri[0];
    let h = dir.cross(e2);
    let det = e1.dot(h);
    if det.abs() <= 1e-12 * dir.norm() * e1.norm() * e2.norm() {
        return None;
    }
    let inv = 1.0 / det;
    let s = origin - tri[0];
    let u = inv * s.dot(h);
    if !(-BARY_EPS..=1.0 + BARY_EPS).contains(&u) {
        return None;
    }
    let q = s.cross(e1);
    let v = inv * dir.dot(q);
    if v < -BARY_EPS || u + v > 1.0 + BARY_EPS {
        return None;
    }
    Some(inv * e2.dot(q))
}

/// Deepest penetration of the segment into the solid over `t in [lo, hi]`.
///
/// `depth` along the segment is the minimum of six affine functions of `t`,
/// so its maximum sits at an end of the range or where two of them cross.
pub fn max_depth_along(seg: &Segment, obs: &Cuboid, lo: f64, hi: f64) -> f64 {
    let p = seg.start();
    let d = seg.end() - p;
    // depth_i(t) = k_i - s_i t
    let lines = obs.planes.map(|(n, off)| (off - n.dot(p), n.dot(d)));
    let depth_at = |t: f64| {
        lines
            .iter()
            .map(|(k, s)| k - s * t)
            .fold(f64::INFINITY, f64::min)
    };
    let mut best = depth_at(lo).max(depth_at(hi));
    for (i, (ki, si)) in lines.iter().enumerate() {
        for (kj, sj) in &lines[i + 1..] {
            if si != sj {
                let t = (ki - kj) / (si - sj);
                if t > lo && t < hi {
                    best = best.max(depth_at(t));
                }
            }
        }
    }
    best
}

/// Whether the open segment crosses the obstacle.
///
/// Each face is tested as two triangles. Hits within [`ENDPOINT_EXCLUSION`]
/// of either end are ignored, so an antenna mounted on an obstacle does not
/// shadow itself, and a hit only counts when the segment actually enters the
/// solid by more than [`PENETRATION_TOLERANCE`]: sliding along a face or
/// touching an edge is LoS. A segment lying entirely inside the solid never
/// meets a face and is caught by the midpoint containment check.
pub fn segment_blocked_by(seg: &Segment, obs: &Cuboid) -> bool {
    let origin = seg.start();
    let dir = seg.end() - origin;
    let crosses = obs.triangles().any(|tri| {
        intersect_triangle(origin, dir, &tri)
            .is_some_and(|t| t > ENDPOINT_EXCLUSION && t < 1.0 - ENDPOINT_EXCLUSION)
    });
    if !crosses && obs.depth(seg.at(0.5)) <= PENETRATION_TOLERANCE {
        return false;
    }
    max_depth_along(seg, obs, ENDPOINT_EXCLUSION, 1.0 - ENDPOINT_EXCLUSION) > PENETRATION_TOLERANCE
}
