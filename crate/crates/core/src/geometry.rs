//! Planar geometry: rooms, walls, device placements and the image-source
//! construction of single-bounce wall reflections.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance (meters) for a reflection point to count as lying on a wall segment.
pub const ON_SEGMENT_TOLERANCE_M: f64 = 1e-9;

/// Distances below this are treated as coincident points.
const COINCIDENT_M: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("wall from ({ax}, {ay}) to ({bx}, {by}) has zero length")]
    DegenerateWall { ax: f64, ay: f64, bx: f64, by: f64 },
    #[error("coordinate is not finite")]
    NonFinite,
    #[error("room needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("room boundary self-intersects (walls {0} and {1})")]
    SelfIntersecting(usize, usize),
    #[error("reflective wall index {index} out of range for {walls} walls")]
    ReflectiveWallOutOfRange { index: usize, walls: usize },
    #[error("transmitter and receiver coincide")]
    CoincidentDevices,
    #[error("{0} is not strictly inside the room")]
    DeviceOutsideRoom(&'static str),
}

/// A point in the floor plane, meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3-D cross product.
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point) -> f64 {
        (self - other).norm()
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Self { x, y }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// A straight wall from `a` to `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WallSegment {
    pub a: Point,
    pub b: Point,
    pub reflective: bool,
}

/// Orthonormal frame attached to a wall: `along` runs from `a` to `b`,
/// `normal` is the left-hand normal of that direction.
#[derive(Debug, Clone, Copy)]
struct WallFrame {
    origin: Point,
    along: Point,
    normal: Point,
    length: f64,
}

impl WallFrame {
    fn local(&self, p: Point) -> (f64, f64) {
        let d = p - self.origin;
        (d.dot(self.along), d.dot(self.normal))
    }

    fn global(&self, s: f64, n: f64) -> Point {
        self.origin + self.along * s + self.normal * n
    }
}

impl WallSegment {
    pub fn new(a: Point, b: Point, reflective: bool) -> Self {
        Self { a, b, reflective }
    }

    pub fn length(&self) -> f64 {
        self.a.distance(self.b)
    }

    fn frame(&self) -> Result<WallFrame, GeometryError> {
        if !self.a.is_finite() || !self.b.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        let length = self.length();
        if length <= COINCIDENT_M {
            return Err(GeometryError::DegenerateWall {
                ax: self.a.x,
                ay: self.a.y,
                bx: self.b.x,
                by: self.b.y,
            });
        }
        let along = (self.b - self.a) * (1.0 / length);
        Ok(WallFrame {
            origin: self.a,
            along,
            normal: Point::new(-along.y, along.x),
            length,
        })
    }

    /// Signed distance of `p` from the wall's infinite line; positive on the
    /// left of `a -> b`.
    pub fn signed_distance(&self, p: Point) -> Result<f64, GeometryError> {
        Ok(self.frame()?.local(p).1)
    }
}

/// Reflection of `p` across the infinite line through `wall`.
pub fn mirror_point(p: Point, wall: &WallSegment) -> Result<Point, GeometryError> {
    let frame = wall.frame()?;
    let (s, n) = frame.local(p);
    Ok(frame.global(s, -n))
}

/// One specular bounce: device -> wall (`d1`) -> target (`d2`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectedPath {
    pub d1: f64,
    pub d2: f64,
    pub reflection_point: Point,
    pub valid: bool,
}

impl ReflectedPath {
    pub fn length(&self) -> f64 {
        self.d1 + self.d2
    }
}

/// Specular path from `device` off `wall` to `target`, built with the image
/// source. The path is invalid when the two points are not strictly on the
/// same side of the wall line or when the bounce would land outside the
/// finite segment.
pub fn reflected_path(
    device: Point,
    target: Point,
    wall: &WallSegment,
) -> Result<ReflectedPath, GeometryError> {
    let frame = wall.frame()?;
    let (s_dev, n_dev) = frame.local(device);
    let (s_tgt, n_tgt) = frame.local(target);

    if n_dev * n_tgt <= 0.0 {
        // Opposite sides or touching the line: report where the straight
        // device-target segment meets the line, flagged invalid.
        let denom = n_dev - n_tgt;
        let t = if denom == 0.0 { 0.0 } else { n_dev / denom };
        let s_r = s_dev + t * (s_tgt - s_dev);
        let reflection_point = frame.global(s_r, 0.0);
        return Ok(ReflectedPath {
            d1: device.distance(reflection_point),
            d2: reflection_point.distance(target),
            reflection_point,
            valid: false,
        });
    }

    // Intersection of [mirror(device), target] with the line, parameterised
    // from the mirror image; |n| of mirror and target add up along the normal.
    let (h_dev, h_tgt) = (n_dev.abs(), n_tgt.abs());
    let t = h_dev / (h_dev + h_tgt);
    let s_r = s_dev + t * (s_tgt - s_dev);
    let d1 = (s_r - s_dev).hypot(h_dev);
    let d2 = (s_tgt - s_r).hypot(h_tgt);
    let valid = s_r >= -ON_SEGMENT_TOLERANCE_M && s_r <= frame.length + ON_SEGMENT_TOLERANCE_M;
    Ok(ReflectedPath {
        d1,
        d2,
        reflection_point: frame.global(s_r, 0.0),
        valid,
    })
}

/// Closed simple polygon whose edges are walls. Wall `i` runs from vertex `i`
/// to vertex `i + 1` (wrapping).
#[derive(Debug, Clone, PartialEq)]
pub struct RoomLayout {
    walls: Vec<WallSegment>,
    reflective_wall: usize,
}

impl RoomLayout {
    pub fn from_vertices(
        vertices: &[Point],
        reflective_wall: usize,
    ) -> Result<Self, GeometryError> {
        let n = vertices.len();
        if n < 3 {
            return Err(GeometryError::TooFewVertices(n));
        }
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        if reflective_wall >= n {
            return Err(GeometryError::ReflectiveWallOutOfRange {
                index: reflective_wall,
                walls: n,
            });
        }
        let walls: Vec<WallSegment> = (0..n)
            .map(|i| WallSegment::new(vertices[i], vertices[(i + 1) % n], i == reflective_wall))
            .collect();
        for w in &walls {
            w.frame()?;
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    continue;
                }
                if segments_intersect(&walls[i], &walls[j]) {
                    return Err(GeometryError::SelfIntersecting(i, j));
                }
            }
        }
        Ok(Self {
            walls,
            reflective_wall,
        })
    }

    /// Axis-aligned rectangle `[0, width] x [0, height]` with the reflective
    /// wall on the `x = 0` side.
    pub fn rectangle(width: f64, height: f64) -> Result<Self, GeometryError> {
        let v = [
            Point::new(0.0, 0.0),
            Point::new(width, 0.0),
            Point::new(width, height),
            Point::new(0.0, height),
        ];
        Self::from_vertices(&v, 3)
    }

    pub fn walls(&self) -> &[WallSegment] {
        &self.walls
    }

    pub fn vertices(&self) -> Vec<Point> {
        self.walls.iter().map(|w| w.a).collect()
    }

    pub fn reflective_wall_index(&self) -> usize {
        self.reflective_wall
    }

    pub fn reflective_wall(&self) -> &WallSegment {
        &self.walls[self.reflective_wall]
    }

    /// Twice the signed polygon area; positive for counter-clockwise.
    fn signed_area2(&self) -> f64 {
        self.walls.iter().map(|w| w.a.cross(w.b)).sum()
    }

    /// Unit normal of the reflective wall pointing into the room.
    pub fn inward_normal(&self) -> Point {
        let w = self.reflective_wall();
        let frame = w.frame().expect("validated at construction");
        if self.signed_area2() > 0.0 {
            frame.normal
        } else {
            -frame.normal
        }
    }

    /// Signed distance from the reflective wall line, positive on the room side.
    pub fn wall_side_distance(&self, p: Point) -> f64 {
        let w = self.reflective_wall();
        (p - w.a).dot(self.inward_normal())
    }

    /// Strict point-in-polygon test (points on the boundary are outside).
    pub fn contains(&self, p: Point) -> bool {
        if self.distance_to_boundary(p) <= COINCIDENT_M {
            return false;
        }
        let mut inside = false;
        for w in &self.walls {
            let (a, b) = (w.a, w.b);
            if (a.y > p.y) != (b.y > p.y) {
                let x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if p.x < x_cross {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub fn distance_to_boundary(&self, p: Point) -> f64 {
        self.walls
            .iter()
            .map(|w| point_segment_distance(p, w.a, w.b))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for w in &self.walls {
            lo = Point::new(lo.x.min(w.a.x), lo.y.min(w.a.y));
            hi = Point::new(hi.x.max(w.a.x), hi.y.max(w.a.y));
        }
        (lo, hi)
    }
}

pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.distance(a + ab * t)
}

fn segments_intersect(p: &WallSegment, q: &WallSegment) -> bool {
    let o = |a: Point, b: Point, c: Point| (b - a).cross(c - a);
    let d1 = o(q.a, q.b, p.a);
    let d2 = o(q.a, q.b, p.b);
    let d3 = o(p.a, p.b, q.a);
    let d4 = o(p.a, p.b, q.b);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |a: Point, b: Point, c: Point, d: f64| {
        d == 0.0
            && c.x >= a.x.min(b.x)
            && c.x <= a.x.max(b.x)
            && c.y >= a.y.min(b.y)
            && c.y <= a.y.max(b.y)
    };
    on(q.a, q.b, p.a, d1) || on(q.a, q.b, p.b, d2) || on(p.a, p.b, q.a, d3) || on(p.a, p.b, q.b, d4)
}

/// Transmitter and receiver positions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DevicePlacement {
    pub tx: Point,
    pub rx: Point,
}

impl DevicePlacement {
    pub fn new(tx: Point, rx: Point) -> Self {
        Self { tx, rx }
    }

    pub fn separation(&self) -> f64 {
        self.tx.distance(self.rx)
    }

    pub fn validate(&self, room: &RoomLayout) -> Result<(), GeometryError> {
        if !self.tx.is_finite() || !self.rx.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        if self.separation() <= COINCIDENT_M {
            return Err(GeometryError::CoincidentDevices);
        }
        if !room.contains(self.tx) {
            return Err(GeometryError::DeviceOutsideRoom("transmitter"));
        }
        if !room.contains(self.rx) {
            return Err(GeometryError::DeviceOutsideRoom("receiver"));
        }
        Ok(())
    }

    pub fn swapped(&self) -> Self {
        Self {
            tx: self.rx,
            rx: self.tx,
        }
    }
}

/// Which device the wall bounce is attached to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// tx -> wall -> target -> rx
    Tx,
    /// tx -> target -> wall -> rx
    Rx,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectedLeg {
    pub side: Side,
    pub wall_index: usize,
    pub path: ReflectedPath,
}

/// Every distance the channel model needs for one target position.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSet {
    /// Static LoS length, tx to rx.
    pub r_d: f64,
    /// tx to target.
    pub r_t: f64,
    /// target to rx.
    pub r_r: f64,
    pub reflected: Vec<ReflectedLeg>,
    /// Target coincides with a device; SSNR is unbounded there.
    pub singular: bool,
}

impl PathSet {
    /// A path set with no wall contribution.
    pub fn direct(r_d: f64, r_t: f64, r_r: f64) -> Self {
        Self {
            r_d,
            r_t,
            r_r,
            reflected: Vec::new(),
            singular: r_t <= COINCIDENT_M || r_r <= COINCIDENT_M,
        }
    }

    pub fn valid_legs(&self) -> impl Iterator<Item = &ReflectedLeg> {
        self.reflected.iter().filter(|l| l.path.valid)
    }
}

pub fn path_set(
    placement: &DevicePlacement,
    target: Point,
    room: &RoomLayout,
) -> Result<PathSet, GeometryError> {
    if !target.is_finite() {
        return Err(GeometryError::NonFinite);
    }
    let mut set = PathSet::direct(
        placement.tx.distance(placement.rx),
        placement.tx.distance(target),
        target.distance(placement.rx),
    );
    for (wall_index, wall) in room
        .walls()
        .iter()
        .enumerate()
        .filter(|(_, w)| w.reflective)
    {
        set.reflected.push(ReflectedLeg {
            side: Side::Tx,
            wall_index,
            path: reflected_path(placement.tx, target, wall)?,
        });
        set.reflected.push(ReflectedLeg {
            side: Side::Rx,
            wall_index,
            path: reflected_path(placement.rx, target, wall)?,
        });
    }
    Ok(set)
}
