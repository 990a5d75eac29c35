//! Polygonal domains, boundary condition layout and critical points.
//!
//! The boundary of a polygon is split into segments, each a run of
//! consecutive polygon edges carrying one condition tag (Dirichlet,
//! Neumann, control or Signorini). Critical points are the polygon
//! vertices where either the geometry has a corner or the condition
//! type changes; they are where corner singularities can sit.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

use crate::field::AnalyticField;

/// A point (or vector) in the plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the cross product.
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }
}

impl std::ops::Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

/// Boundary condition type of a segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConditionTag {
    Dirichlet,
    Neumann,
    Control,
    Signorini,
}

impl ConditionTag {
    pub fn letter(self) -> char {
        match self {
            ConditionTag::Dirichlet => 'D',
            ConditionTag::Neumann => 'N',
            ConditionTag::Control => 'U',
            ConditionTag::Signorini => 'S',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'D' => Some(ConditionTag::Dirichlet),
            'N' => Some(ConditionTag::Neumann),
            'U' => Some(ConditionTag::Control),
            'S' => Some(ConditionTag::Signorini),
            _ => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("polygon is not simple: {0}")]
    NonSimplePolygon(String),
    #[error("boundary edge {edge} is not covered by any segment")]
    UncoveredEdge { edge: usize },
    #[error("boundary edge {edge} is covered by more than one segment")]
    EdgeCoveredTwice { edge: usize },
    #[error("Signorini and control segments share the boundary point at vertex {vertex}")]
    SignoriniTouchesControl { vertex: usize },
    #[error("boundary has no Dirichlet segment")]
    MissingDirichlet,
    #[error("segment {segment} is invalid: {reason}")]
    InvalidSegment { segment: usize, reason: String },
}

/// Simple, counterclockwise polygon.
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl Polygon {
    pub fn new(vertices: Vec<Point>) -> Result<Self, GeometryError> {
        let p = Polygon { vertices };
        p.check_simple()?;
        Ok(p)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn edge_count(&self) -> usize {
        self.vertices.len()
    }

    /// Edge i runs from vertex i to vertex i+1 (cyclic).
    pub fn edge(&self, i: usize) -> (Point, Point) {
        let n = self.vertices.len();
        (self.vertices[i % n], self.vertices[(i + 1) % n])
    }

    pub fn edge_length(&self, i: usize) -> f64 {
        let (a, b) = self.edge(i);
        a.dist(b)
    }

    pub fn signed_area(&self) -> f64 {
        let n = self.vertices.len();
        let mut s = 0.0;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            s += a.cross(b);
        }
        0.5 * s
    }

    /// Cumulative arclength at the start of each edge, plus the perimeter
    /// as the final entry.
    pub fn arclength_offsets(&self) -> Vec<f64> {
        let n = self.edge_count();
        let mut out = Vec::with_capacity(n + 1);
        let mut s = 0.0;
        for i in 0..n {
            out.push(s);
            s += self.edge_length(i);
        }
        out.push(s);
        out
    }

    pub fn contains(&self, p: Point) -> bool {
        // Ray casting along +x.
        let n = self.vertices.len();
        let mut inside = false;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            if (a.y > p.y) != (b.y > p.y) {
                let t = (p.y - a.y) / (b.y - a.y);
                if p.x < a.x + t * (b.x - a.x) {
                    inside = !inside;
                }
            }
        }
        inside
    }

    fn check_simple(&self) -> Result<(), GeometryError> {
        let n = self.vertices.len();
        if n < 3 {
            return Err(GeometryError::NonSimplePolygon(format!(
                "needs at least 3 vertices, got {n}"
            )));
        }
        for i in 0..n {
            if self.vertices[i] == self.vertices[(i + 1) % n] {
                return Err(GeometryError::NonSimplePolygon(format!(
                    "vertices {i} and {} coincide",
                    (i + 1) % n
                )));
            }
        }
        let area = self.signed_area();
        if area <= 0.0 {
            return Err(GeometryError::NonSimplePolygon(format!(
                "signed area {area} is not positive (orientation must be counterclockwise)"
            )));
        }
        // Zero-angle spikes make two adjacent edges overlap without the
        // pairwise test below noticing.
        for i in 0..n {
            let alpha = interior_angle_unchecked(&self.vertices, i);
            if !(alpha > 1e-12 && alpha < 2.0 * PI - 1e-12) {
                return Err(GeometryError::NonSimplePolygon(format!(
                    "degenerate interior angle {alpha} at vertex {i}"
                )));
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                // Skip adjacent edges (they legitimately share a vertex).
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                let (a, b) = self.edge(i);
                let (c, d) = self.edge(j);
                if segments_intersect(a, b, c, d) {
                    return Err(GeometryError::NonSimplePolygon(format!(
                        "edges {i} and {j} intersect"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b - a).cross(c - a)
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Intersection test including touching configurations.
fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

/// Boundary datum attached to a segment: either polynomial coefficients in
/// normalized segment arclength (lowest degree first, degree <= 4) or a
/// named analytic field evaluated at boundary points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SegmentData {
    Poly(Vec<f64>),
    Field(AnalyticField),
}

/// One run of consecutive boundary edges with a common condition tag.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentSpec {
    pub edges: Vec<usize>,
    pub tag: ConditionTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<SegmentData>,
}

impl SegmentSpec {
    pub fn new(edges: Vec<usize>, tag: ConditionTag) -> Self {
        SegmentSpec {
            edges,
            tag,
            data: None,
        }
    }

    pub fn with_data(edges: Vec<usize>, tag: ConditionTag, data: SegmentData) -> Self {
        SegmentSpec {
            edges,
            tag,
            data: Some(data),
        }
    }
}

/// Polygon plus boundary condition layout and optional Dirichlet lifting.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundarySpec {
    pub polygon: Polygon,
    pub segments: Vec<SegmentSpec>,
    /// Dirichlet values as a global analytic field; takes precedence over
    /// per-segment polynomial data on Dirichlet segments.
    pub lifting: Option<AnalyticField>,
}

impl BoundarySpec {
    /// Tag of each polygon edge, and the segment it belongs to.
    /// Only meaningful on a validated spec.
    pub fn edge_table(&self) -> Vec<(usize, ConditionTag)> {
        let n = self.polygon.edge_count();
        let mut table = vec![(usize::MAX, ConditionTag::Dirichlet); n];
        for (si, seg) in self.segments.iter().enumerate() {
            for &e in &seg.edges {
                if e < n {
                    table[e] = (si, seg.tag);
                }
            }
        }
        table
    }

    pub fn edge_tag(&self, edge: usize) -> ConditionTag {
        self.edge_table()[edge].1
    }

    /// Total length of a segment.
    pub fn segment_length(&self, segment: usize) -> f64 {
        self.segments[segment]
            .edges
            .iter()
            .map(|&e| self.polygon.edge_length(e))
            .sum()
    }

    /// Normalized arclength of a point lying on `poly_edge` within the
    /// given segment, in [0, 1] measured from the segment start.
    pub fn segment_param(&self, segment: usize, poly_edge: usize, p: Point) -> f64 {
        let seg = &self.segments[segment];
        let total = self.segment_length(segment);
        let mut acc = 0.0;
        for &e in &seg.edges {
            if e == poly_edge {
                let (a, _) = self.polygon.edge(e);
                return (acc + a.dist(p)) / total;
            }
            acc += self.polygon.edge_length(e);
        }
        acc / total
    }

    /// Evaluate the boundary datum of a segment at a point on it.
    pub fn segment_datum(&self, segment: usize, poly_edge: usize, p: Point) -> f64 {
        match &self.segments[segment].data {
            None => 0.0,
            Some(SegmentData::Field(f)) => f.value(p),
            Some(SegmentData::Poly(coeffs)) => {
                let s = self.segment_param(segment, poly_edge, p);
                poly_eval(coeffs, s)
            }
        }
    }

    /// Dirichlet value at a boundary point on a Dirichlet segment.
    pub fn dirichlet_value(&self, segment: usize, poly_edge: usize, p: Point) -> f64 {
        if let Some(field) = &self.lifting {
            field.value(p)
        } else {
            self.segment_datum(segment, poly_edge, p)
        }
    }
}

pub fn poly_eval(coeffs: &[f64], s: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c)
}

/// Check all `BoundarySpec` invariants and hand the value back unchanged.
///
/// Idempotent: validating an already validated layout succeeds with the
/// same value.
pub fn validate_boundary(spec: BoundarySpec) -> Result<BoundarySpec, GeometryError> {
    spec.polygon.check_simple()?;
    let n = spec.polygon.edge_count();

    let mut cover = vec![usize::MAX; n];
    for (si, seg) in spec.segments.iter().enumerate() {
        if seg.edges.is_empty() {
            return Err(GeometryError::InvalidSegment {
                segment: si,
                reason: "segment covers no edges".into(),
            });
        }
        for k in 1..seg.edges.len() {
            if seg.edges[k] != (seg.edges[k - 1] + 1) % n {
                return Err(GeometryError::InvalidSegment {
                    segment: si,
                    reason: "edges are not a consecutive run along the boundary".into(),
                });
            }
        }
        for &e in &seg.edges {
            if e >= n {
                return Err(GeometryError::InvalidSegment {
                    segment: si,
                    reason: format!("edge index {e} out of range ({n} edges)"),
                });
            }
            if cover[e] != usize::MAX {
                return Err(GeometryError::EdgeCoveredTwice { edge: e });
            }
            cover[e] = si;
        }
        if let Some(SegmentData::Poly(coeffs)) = &seg.data {
            if coeffs.len() > 5 {
                return Err(GeometryError::InvalidSegment {
                    segment: si,
                    reason: format!(
                        "polynomial datum has degree {} (max 4)",
                        coeffs.len() - 1
                    ),
                });
            }
        }
    }
    if let Some(e) = cover.iter().position(|&s| s == usize::MAX) {
        return Err(GeometryError::UncoveredEdge { edge: e });
    }

    if !spec
        .segments
        .iter()
        .any(|s| s.tag == ConditionTag::Dirichlet)
    {
        return Err(GeometryError::MissingDirichlet);
    }

    // Closures of Signorini and control parts may not meet. Segments are
    // unions of whole edges, so the closures meet exactly when a Signorini
    // edge and a control edge share a vertex.
    let table = spec.edge_table();
    for v in 0..n {
        let incoming = table[(v + n - 1) % n].1;
        let outgoing = table[v].1;
        let pair = (incoming, outgoing);
        if pair == (ConditionTag::Signorini, ConditionTag::Control)
            || pair == (ConditionTag::Control, ConditionTag::Signorini)
        {
            return Err(GeometryError::SignoriniTouchesControl { vertex: v });
        }
    }

    Ok(spec)
}

fn interior_angle_unchecked(vertices: &[Point], v: usize) -> f64 {
    let n = vertices.len();
    let prev = vertices[(v + n - 1) % n];
    let here = vertices[v];
    let next = vertices[(v + 1) % n];
    let a = next - here;
    let b = prev - here;
    let mut phi = a.cross(b).atan2(a.dot(b));
    if phi < 0.0 {
        phi += 2.0 * PI;
    }
    phi
}

/// Interior angle of the domain at a polygon vertex, in (0, 2π).
pub fn interior_angle(polygon: &Polygon, vertex: usize) -> f64 {
    interior_angle_unchecked(polygon.vertices(), vertex)
}

/// A vertex is a geometric corner when its angle differs from π by more
/// than this.
pub const CORNER_ANGLE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CriticalKind {
    Corner,
    ConditionChange,
    Both,
}

/// A critical boundary point: a corner of the domain or a point where the
/// boundary condition type changes.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalPoint {
    pub location: Point,
    /// Index of the polygon vertex this point sits on.
    pub vertex: usize,
    /// Interior angle in (0, 2π); π at pure condition changes.
    pub angle: f64,
    /// Tags of the incident boundary arcs in counterclockwise order
    /// (incoming edge, outgoing edge).
    pub tags: (ConditionTag, ConditionTag),
    pub kind: CriticalKind,
    /// Direction of the outgoing boundary edge; the interior spans the
    /// angular range [leg_angle, leg_angle + angle].
    pub leg_angle: f64,
}

/// All critical points, ordered along the boundary.
pub fn critical_points(spec: &BoundarySpec) -> Vec<CriticalPoint> {
    let polygon = &spec.polygon;
    let table = spec.edge_table();
    let n = polygon.edge_count();
    let mut out = Vec::new();
    for v in 0..n {
        let angle = interior_angle(polygon, v);
        let tag_in = table[(v + n - 1) % n].1;
        let tag_out = table[v].1;
        let corner = (angle - PI).abs() > CORNER_ANGLE_TOL;
        let change = tag_in != tag_out;
        if !corner && !change {
            continue;
        }
        let kind = match (corner, change) {
            (true, true) => CriticalKind::Both,
            (true, false) => CriticalKind::Corner,
            (false, true) => CriticalKind::ConditionChange,
            _ => unreachable!(),
        };
        let (a, b) = polygon.edge(v);
        out.push(CriticalPoint {
            location: polygon.vertices()[v],
            vertex: v,
            angle,
            tags: (tag_in, tag_out),
            kind,
            leg_angle: (b - a).angle(),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    pub fn unit_square() -> Polygon {
        Polygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ])
        .unwrap()
    }

    fn square_spec(tags: [ConditionTag; 4]) -> BoundarySpec {
        BoundarySpec {
            polygon: unit_square(),
            segments: tags
                .iter()
                .enumerate()
                .map(|(i, &t)| SegmentSpec::new(vec![i], t))
                .collect(),
            lifting: None,
        }
    }

    use ConditionTag::*;

    #[test]
    fn valid_square_passes() {
        let spec = square_spec([Signorini, Dirichlet, Neumann, Dirichlet]);
        assert!(validate_boundary(spec).is_ok());
    }

    #[test]
    fn control_next_to_signorini_rejected() {
        let spec = square_spec([Signorini, Control, Dirichlet, Dirichlet]);
        match validate_boundary(spec) {
            Err(GeometryError::SignoriniTouchesControl { vertex }) => assert_eq!(vertex, 1),
            other => panic!("expected SignoriniTouchesControl, got {other:?}"),
        }
    }

    #[test]
    fn all_neumann_rejected() {
        let spec = square_spec([Neumann, Neumann, Neumann, Neumann]);
        assert!(matches!(
            validate_boundary(spec),
            Err(GeometryError::MissingDirichlet)
        ));
    }

    #[test]
    fn uncovered_edge_rejected() {
        let mut spec = square_spec([Dirichlet, Dirichlet, Dirichlet, Dirichlet]);
        spec.segments.pop();
        assert!(matches!(
            validate_boundary(spec),
            Err(GeometryError::UncoveredEdge { edge: 3 })
        ));
    }

    #[test]
    fn twice_covered_edge_rejected() {
        let mut spec = square_spec([Dirichlet, Dirichlet, Dirichlet, Dirichlet]);
        spec.segments.push(SegmentSpec::new(vec![2], Neumann));
        assert!(matches!(
            validate_boundary(spec),
            Err(GeometryError::EdgeCoveredTwice { edge: 2 })
        ));
    }

    #[test]
    fn bowtie_rejected() {
        let poly = Polygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
        ]);
        assert!(matches!(poly, Err(GeometryError::NonSimplePolygon(_))));
    }

    #[test]
    fn clockwise_rejected() {
        let poly = Polygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(1.0, 1.0),
            Point::new(1.0, 0.0),
        ]);
        assert!(poly.is_err());
    }

    #[test]
    fn validation_is_idempotent() {
        let spec = square_spec([Signorini, Dirichlet, Neumann, Dirichlet]);
        let once = validate_boundary(spec).unwrap();
        let twice = validate_boundary(once.clone()).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn square_interior_angles() {
        let sq = unit_square();
        for v in 0..4 {
            assert!((interior_angle(&sq, v) - PI / 2.0).abs() < 1e-15);
        }
    }

    fn l_domain() -> Polygon {
        Polygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(-1.0, 1.0),
            Point::new(-1.0, -1.0),
            Point::new(0.0, -1.0),
        ])
        .unwrap()
    }

    #[test]
    fn l_domain_reentrant_angle() {
        let l = l_domain();
        assert!((interior_angle(&l, 0) - 1.5 * PI).abs() < 1e-12);
        for v in 1..6 {
            assert!((interior_angle(&l, v) - PI / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn collinear_triple_angle_is_pi() {
        let poly = Polygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(0.5, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ])
        .unwrap();
        assert!((interior_angle(&poly, 1) - PI).abs() < 1e-15);
    }

    #[test]
    fn exterior_angles_sum_to_two_pi() {
        for poly in [unit_square(), l_domain()] {
            let sum: f64 = (0..poly.edge_count())
                .map(|v| PI - interior_angle(&poly, v))
                .sum();
            assert!((sum - 2.0 * PI).abs() < 1e-12);
        }
    }

    #[test]
    fn critical_points_square_bottom_signorini() {
        let spec = validate_boundary(square_spec([Signorini, Dirichlet, Dirichlet, Dirichlet]))
            .unwrap();
        let cps = critical_points(&spec);
        assert_eq!(cps.len(), 4);
        for cp in &cps {
            assert!((cp.angle - PI / 2.0).abs() < 1e-12);
        }
        assert_eq!(cps[0].tags, (Dirichlet, Signorini));
        assert_eq!(cps[1].tags, (Signorini, Dirichlet));
        assert_eq!(cps[0].kind, CriticalKind::Both);
        assert_eq!(cps[2].kind, CriticalKind::Corner);
    }

    #[test]
    fn condition_change_on_straight_edge() {
        let poly = Polygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(0.5, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ])
        .unwrap();
        let spec = validate_boundary(BoundarySpec {
            polygon: poly,
            segments: vec![
                SegmentSpec::new(vec![0], Dirichlet),
                SegmentSpec::new(vec![1], Neumann),
                SegmentSpec::new(vec![2, 3, 4], Dirichlet),
            ],
            lifting: None,
        })
        .unwrap();
        let cps = critical_points(&spec);
        let split = cps.iter().find(|c| c.vertex == 1).expect("split point");
        assert_eq!(split.kind, CriticalKind::ConditionChange);
        assert!((split.angle - PI).abs() < 1e-15);
    }

    #[test]
    fn critical_points_invariant_under_cyclic_relabeling() {
        let base = validate_boundary(square_spec([Signorini, Dirichlet, Neumann, Dirichlet]))
            .unwrap();
        let a = critical_points(&base);
        // Rotate vertex labels by 2.
        let verts = base.polygon.vertices().to_vec();
        let rotated: Vec<Point> = (0..4).map(|i| verts[(i + 2) % 4]).collect();
        let tags = [Neumann, Dirichlet, Signorini, Dirichlet];
        let spec2 = validate_boundary(BoundarySpec {
            polygon: Polygon::new(rotated).unwrap(),
            segments: tags
                .iter()
                .enumerate()
                .map(|(i, &t)| SegmentSpec::new(vec![i], t))
                .collect(),
            lifting: None,
        })
        .unwrap();
        let b = critical_points(&spec2);
        assert_eq!(a.len(), b.len());
        for cp in &a {
            let twin = b
                .iter()
                .find(|c| c.location.dist(cp.location) < 1e-14)
                .expect("location preserved");
            assert!((twin.angle - cp.angle).abs() < 1e-14);
            assert_eq!(twin.tags, cp.tags);
        }
    }

    #[test]
    fn segment_param_spans_run_of_edges() {
        let spec = validate_boundary(BoundarySpec {
            polygon: unit_square(),
            segments: vec![
                SegmentSpec::new(vec![0, 1], Dirichlet),
                SegmentSpec::new(vec![2, 3], Neumann),
            ],
            lifting: None,
        })
        .unwrap();
        // Segment 0 covers bottom+right, total length 2.
        let s = spec.segment_param(0, 1, Point::new(1.0, 0.5));
        assert!((s - 0.75).abs() < 1e-15);
    }
}
