//! Conforming P1 triangulations of polygons.
//!
//! Meshes are built by ear clipping followed by conformity-preserving
//! longest-edge bisection down to the size target and one Laplacian
//! smoothing pass over interior nodes. Uniform red refinement and radial
//! grading toward a corner produce the refinement hierarchies used by the
//! convergence and coincidence studies.

use std::collections::HashMap;
use thiserror::Error;

use crate::geometry::{BoundarySpec, ConditionTag, Point};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),
    #[error("grading tangled the mesh at triangle {triangle}")]
    TangledMesh { triangle: usize },
    #[error("invalid mesh: {0}")]
    Invalid(String),
    #[error("mesh parse error: {0}")]
    Parse(String),
}

/// One mesh edge on the domain boundary, oriented counterclockwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryEdge {
    pub nodes: [usize; 2],
    /// Index of the boundary segment in the generating `BoundarySpec`.
    pub segment: usize,
    /// Index of the polygon edge this mesh edge lies on.
    pub poly_edge: usize,
    pub tag: ConditionTag,
}

/// Where a node of a refined mesh comes from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NodeOrigin {
    /// Same node existed in the parent mesh.
    Inherited(usize),
    /// Midpoint of a parent-mesh edge.
    EdgeMidpoint(usize, usize),
}

#[derive(Clone, Debug)]
pub struct Lineage {
    pub parent_nodes: usize,
    pub origins: Vec<NodeOrigin>,
}

/// Radial grading toward a corner: a node at distance r < radius from the
/// center moves to distance radius·(r/radius)^{1/mu}.
#[derive(Clone, Copy, Debug)]
pub struct GradingParams {
    pub center: Point,
    pub mu: f64,
    pub radius: f64,
}

/// Conforming triangle mesh with tagged boundary edges.
#[derive(Clone, Debug)]
pub struct TriMesh {
    nodes: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    boundary: Vec<BoundaryEdge>,
    /// Vertices of the generating polygon, for boundary arclength
    /// bookkeeping.
    polygon: Vec<Point>,
    level: u32,
    lineage: Option<Lineage>,
}

impl TriMesh {
    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary(&self) -> &[BoundaryEdge] {
        &self.boundary
    }

    pub fn polygon_vertices(&self) -> &[Point] {
        &self.polygon
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn lineage(&self) -> Option<&Lineage> {
        self.lineage.as_ref()
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        triangle_area(self.nodes[a], self.nodes[b], self.nodes[c])
    }

    pub fn max_edge_length(&self) -> f64 {
        let mut max = 0.0f64;
        for &[a, b, c] in &self.triangles {
            max = max
                .max(self.nodes[a].dist(self.nodes[b]))
                .max(self.nodes[b].dist(self.nodes[c]))
                .max(self.nodes[c].dist(self.nodes[a]));
        }
        max
    }

    /// Largest boundary edge length among edges with the given tag.
    pub fn max_boundary_edge(&self, tag: ConditionTag) -> f64 {
        self.boundary
            .iter()
            .filter(|e| e.tag == tag)
            .map(|e| self.nodes[e.nodes[0]].dist(self.nodes[e.nodes[1]]))
            .fold(0.0, f64::max)
    }

    /// Union of boundary tags incident to each node (empty for interior).
    pub fn node_tags(&self) -> Vec<Vec<ConditionTag>> {
        let mut tags: Vec<Vec<ConditionTag>> = vec![Vec::new(); self.nodes.len()];
        for e in &self.boundary {
            for &n in &e.nodes {
                if !tags[n].contains(&e.tag) {
                    tags[n].push(e.tag);
                }
            }
        }
        for t in &mut tags {
            t.sort();
        }
        tags
    }

    /// Global boundary arclength of a point on the given polygon edge,
    /// measured counterclockwise from vertex 0.
    pub fn arclength_on_edge(&self, poly_edge: usize, p: Point) -> f64 {
        let mut s = 0.0;
        for e in 0..poly_edge {
            s += self.polygon[e].dist(self.polygon[(e + 1) % self.polygon.len()]);
        }
        s + self.polygon[poly_edge].dist(p)
    }

    pub fn node_index_at(&self, p: Point, tol: f64) -> Option<usize> {
        self.nodes.iter().position(|n| n.dist(p) <= tol)
    }

    /// Structural validation: conformity, positive areas, Euler formula,
    /// boundary records matching the triangulation.
    pub fn validate(&self) -> Result<(), MeshError> {
        let nv = self.nodes.len();
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri[0] >= nv || tri[1] >= nv || tri[2] >= nv {
                return Err(MeshError::Invalid(format!(
                    "triangle {t} references a missing node"
                )));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(MeshError::Invalid(format!("triangle {t} is degenerate")));
            }
            if self.triangle_area(t) <= 0.0 {
                return Err(MeshError::Invalid(format!(
                    "triangle {t} has non-positive area {}",
                    self.triangle_area(t)
                )));
            }
        }
        let mut edge_count: HashMap<(usize, usize), usize> = HashMap::new();
        for tri in &self.triangles {
            for k in 0..3 {
                let a = tri[k];
                let b = tri[(k + 1) % 3];
                *edge_count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        for (&(a, b), &cnt) in &edge_count {
            if cnt > 2 {
                return Err(MeshError::Invalid(format!(
                    "edge ({a},{b}) shared by {cnt} triangles"
                )));
            }
        }
        let mut brec: HashMap<(usize, usize), usize> = HashMap::new();
        for e in &self.boundary {
            let key = (e.nodes[0].min(e.nodes[1]), e.nodes[0].max(e.nodes[1]));
            *brec.entry(key).or_insert(0) += 1;
        }
        for (key, &cnt) in &edge_count {
            let recorded = brec.get(key).copied().unwrap_or(0);
            let expected = if cnt == 1 { 1 } else { 0 };
            if recorded != expected {
                return Err(MeshError::Invalid(format!(
                    "edge {key:?}: {cnt} incident triangles but {recorded} boundary records"
                )));
            }
        }
        if brec.values().any(|&c| c != 1) {
            return Err(MeshError::Invalid("duplicate boundary record".into()));
        }
        let v = nv as i64;
        let e = edge_count.len() as i64;
        let f = self.triangles.len() as i64;
        if v - e + f != 1 {
            return Err(MeshError::Invalid(format!(
                "Euler check failed: V-E+F = {} (V={v}, E={e}, F={f})",
                v - e + f
            )));
        }
        Ok(())
    }

    /// Assemble a mesh from raw arrays, validating the result. Used by the
    /// text-format importer and by tests.
    pub fn from_raw_parts(
        nodes: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        boundary: Vec<BoundaryEdge>,
        polygon: Vec<Point>,
        level: u32,
    ) -> Result<TriMesh, MeshError> {
        let mesh = TriMesh {
            nodes,
            triangles,
            boundary,
            polygon,
            level,
            lineage: None,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    /// Plain-text export with `polygon`, `nodes`, `triangles` and
    /// `boundary` sections; floats print as shortest round-trip decimals
    /// so export/import round-trips bit-exactly.
    pub fn to_text(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        writeln!(out, "level {}", self.level).unwrap();
        writeln!(out, "polygon {}", self.polygon.len()).unwrap();
        for p in &self.polygon {
            writeln!(out, "{} {}", p.x, p.y).unwrap();
        }
        writeln!(out, "nodes {}", self.nodes.len()).unwrap();
        for p in &self.nodes {
            writeln!(out, "{} {}", p.x, p.y).unwrap();
        }
        writeln!(out, "triangles {}", self.triangles.len()).unwrap();
        for t in &self.triangles {
            writeln!(out, "{} {} {}", t[0], t[1], t[2]).unwrap();
        }
        writeln!(out, "boundary {}", self.boundary.len()).unwrap();
        for e in &self.boundary {
            writeln!(
                out,
                "{} {} {} {} {}",
                e.nodes[0],
                e.nodes[1],
                e.segment,
                e.poly_edge,
                e.tag.letter()
            )
            .unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<TriMesh, MeshError> {
        let mut lines = text.lines();
        let mut next = || {
            lines
                .next()
                .ok_or_else(|| MeshError::Parse("unexpected end of input".into()))
        };
        let header = |line: &str, word: &str| -> Result<usize, MeshError> {
            let mut it = line.split_whitespace();
            match (it.next(), it.next()) {
                (Some(w), Some(n)) if w == word => n
                    .parse()
                    .map_err(|_| MeshError::Parse(format!("bad count in '{line}'"))),
                _ => Err(MeshError::Parse(format!("expected '{word} <count>', got '{line}'"))),
            }
        };
        let level = header(next()?, "level")? as u32;
        let parse_point = |line: &str| -> Result<Point, MeshError> {
            let mut it = line.split_whitespace();
            let x = it
                .next()
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| MeshError::Parse(format!("bad point '{line}'")))?;
            let y = it
                .next()
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| MeshError::Parse(format!("bad point '{line}'")))?;
            Ok(Point::new(x, y))
        };
        let np = header(next()?, "polygon")?;
        let mut polygon = Vec::with_capacity(np);
        for _ in 0..np {
            polygon.push(parse_point(next()?)?);
        }
        let nn = header(next()?, "nodes")?;
        let mut nodes = Vec::with_capacity(nn);
        for _ in 0..nn {
            nodes.push(parse_point(next()?)?);
        }
        let nt = header(next()?, "triangles")?;
        let mut triangles = Vec::with_capacity(nt);
        for _ in 0..nt {
            let line = next()?;
            let idx: Vec<usize> = line
                .split_whitespace()
                .map(|v| v.parse())
                .collect::<Result<_, _>>()
                .map_err(|_| MeshError::Parse(format!("bad triangle '{line}'")))?;
            if idx.len() != 3 {
                return Err(MeshError::Parse(format!("bad triangle '{line}'")));
            }
            triangles.push([idx[0], idx[1], idx[2]]);
        }
        let nb = header(next()?, "boundary")?;
        let mut boundary = Vec::with_capacity(nb);
        for _ in 0..nb {
            let line = next()?;
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 5 {
                return Err(MeshError::Parse(format!("bad boundary record '{line}'")));
            }
            let tag = parts[4]
                .chars()
                .next()
                .and_then(ConditionTag::from_letter)
                .ok_or_else(|| MeshError::Parse(format!("bad tag in '{line}'")))?;
            boundary.push(BoundaryEdge {
                nodes: [
                    parts[0]
                        .parse()
                        .map_err(|_| MeshError::Parse(format!("bad record '{line}'")))?,
                    parts[1]
                        .parse()
                        .map_err(|_| MeshError::Parse(format!("bad record '{line}'")))?,
                ],
                segment: parts[2]
                    .parse()
                    .map_err(|_| MeshError::Parse(format!("bad record '{line}'")))?,
                poly_edge: parts[3]
                    .parse()
                    .map_err(|_| MeshError::Parse(format!("bad record '{line}'")))?,
                tag,
            });
        }
        TriMesh::from_raw_parts(nodes, triangles, boundary, polygon, level)
    }

    /// Spatial index for point location.
    pub fn locator(&self) -> Locator {
        Locator::build(self)
    }
}

pub fn triangle_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * (b - a).cross(c - a)
}

/// P1 point locator over a uniform grid of triangle bins.
pub struct Locator {
    min: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    bins: Vec<Vec<usize>>,
}

impl Locator {
    fn build(mesh: &TriMesh) -> Locator {
        let mut min = Point::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in mesh.nodes() {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        let span = (max.x - min.x).max(max.y - min.y).max(1e-300);
        let target = ((mesh.triangles().len() as f64).sqrt() as usize).clamp(1, 512);
        let cell = span / target as f64;
        let nx = (((max.x - min.x) / cell).ceil() as usize + 1).max(1);
        let ny = (((max.y - min.y) / cell).ceil() as usize + 1).max(1);
        let mut bins = vec![Vec::new(); nx * ny];
        for (t, tri) in mesh.triangles().iter().enumerate() {
            let (mut x0, mut y0) = (f64::INFINITY, f64::INFINITY);
            let (mut x1, mut y1) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
            for &v in tri {
                let p = mesh.nodes()[v];
                x0 = x0.min(p.x);
                y0 = y0.min(p.y);
                x1 = x1.max(p.x);
                y1 = y1.max(p.y);
            }
            let i0 = (((x0 - min.x) / cell).floor() as usize).min(nx - 1);
            let i1 = (((x1 - min.x) / cell).floor() as usize).min(nx - 1);
            let j0 = (((y0 - min.y) / cell).floor() as usize).min(ny - 1);
            let j1 = (((y1 - min.y) / cell).floor() as usize).min(ny - 1);
            for j in j0..=j1 {
                for i in i0..=i1 {
                    bins[j * nx + i].push(t);
                }
            }
        }
        Locator {
            min,
            cell,
            nx,
            ny,
            bins,
        }
    }

    /// Containing triangle and barycentric coordinates, with a small
    /// tolerance toward the outside.
    pub fn locate(&self, mesh: &TriMesh, p: Point) -> Option<(usize, [f64; 3])> {
        let i = (((p.x - self.min.x) / self.cell).floor() as isize).clamp(0, self.nx as isize - 1)
            as usize;
        let j = (((p.y - self.min.y) / self.cell).floor() as isize).clamp(0, self.ny as isize - 1)
            as usize;
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for &t in &self.bins[j * self.nx + i] {
            let [a, b, c] = mesh.triangles()[t];
            let area = triangle_area(mesh.nodes()[a], mesh.nodes()[b], mesh.nodes()[c]);
            if area <= 0.0 {
                continue;
            }
            let la = triangle_area(p, mesh.nodes()[b], mesh.nodes()[c]) / area;
            let lb = triangle_area(mesh.nodes()[a], p, mesh.nodes()[c]) / area;
            let lc = 1.0 - la - lb;
            let worst = la.min(lb).min(lc);
            if worst >= -1e-9 {
                match best {
                    Some((_, _, w)) if w >= worst => {}
                    _ => best = Some((t, [la, lb, lc], worst)),
                }
            }
        }
        best.map(|(t, bary, _)| (t, bary))
    }

    /// P1 interpolation of nodal values at a point.
    pub fn interpolate(&self, mesh: &TriMesh, values: &[f64], p: Point) -> Option<f64> {
        self.locate(mesh, p).map(|(t, bary)| {
            let [a, b, c] = mesh.triangles()[t];
            bary[0] * values[a] + bary[1] * values[b] + bary[2] * values[c]
        })
    }
}

/// Triangulate a validated boundary spec with target mesh size `h`.
///
/// All polygon vertices (hence all critical points) become mesh nodes and
/// every edge ends up no longer than `h`.
pub fn triangulate(spec: &BoundarySpec, h: f64) -> Result<TriMesh, MeshError> {
    assert!(h > 0.0, "mesh size must be positive");
    let polygon = spec.polygon.vertices().to_vec();
    let n = polygon.len();
    let edge_table = spec.edge_table();

    let mut nodes = polygon.clone();
    let triangles = ear_clip(&polygon)?;
    let mut triangles = triangles;
    let mut boundary: Vec<BoundaryEdge> = (0..n)
        .map(|e| BoundaryEdge {
            nodes: [e, (e + 1) % n],
            segment: edge_table[e].0,
            poly_edge: e,
            tag: edge_table[e].1,
        })
        .collect();

    bisect_to_size(&mut nodes, &mut triangles, &mut boundary, h);
    smooth_interior(&mut nodes, &triangles, &boundary);

    let mesh = TriMesh {
        nodes,
        triangles,
        boundary,
        polygon,
        level: 0,
        lineage: None,
    };
    debug_assert!(mesh.validate().is_ok());
    Ok(mesh)
}

fn ear_clip(polygon: &[Point]) -> Result<Vec<[usize; 3]>, MeshError> {
    let scale: f64 = polygon.iter().map(|p| p.norm()).fold(0.0, f64::max).max(1.0);
    let area_eps = 1e-14 * scale * scale;
    let mut remaining: Vec<usize> = (0..polygon.len()).collect();
    let mut tris = Vec::with_capacity(polygon.len() - 2);
    while remaining.len() > 3 {
        let m = remaining.len();
        let mut clipped = false;
        for i in 0..m {
            let ia = remaining[(i + m - 1) % m];
            let ib = remaining[i];
            let ic = remaining[(i + 1) % m];
            let (a, b, c) = (polygon[ia], polygon[ib], polygon[ic]);
            if triangle_area(a, b, c) <= area_eps {
                continue;
            }
            // No other remaining vertex inside or on the candidate ear.
            let blocked = remaining.iter().any(|&iv| {
                if iv == ia || iv == ib || iv == ic {
                    return false;
                }
                point_in_triangle_closed(polygon[iv], a, b, c, area_eps)
            });
            if !blocked {
                tris.push([ia, ib, ic]);
                remaining.remove(i);
                clipped = true;
                break;
            }
        }
        if !clipped {
            return Err(MeshError::DegenerateGeometry(
                "ear clipping found no ear (non-simple input?)".into(),
            ));
        }
    }
    let [ia, ib, ic] = [remaining[0], remaining[1], remaining[2]];
    if triangle_area(polygon[ia], polygon[ib], polygon[ic]) <= area_eps {
        return Err(MeshError::DegenerateGeometry(
            "final triangle is degenerate".into(),
        ));
    }
    tris.push([ia, ib, ic]);
    Ok(tris)
}

fn point_in_triangle_closed(p: Point, a: Point, b: Point, c: Point, eps: f64) -> bool {
    let d1 = triangle_area(a, b, p);
    let d2 = triangle_area(b, c, p);
    let d3 = triangle_area(c, a, p);
    d1 >= -eps && d2 >= -eps && d3 >= -eps
}

fn longest_edge(nodes: &[Point], tri: &[usize; 3]) -> (usize, f64) {
    let mut best = 0;
    let mut len = 0.0;
    for k in 0..3 {
        let l = nodes[tri[k]].dist(nodes[tri[(k + 1) % 3]]);
        if l > len {
            len = l;
            best = k;
        }
    }
    (best, len)
}

/// Conformity-preserving longest-edge bisection until every edge is at
/// most `h` long.
fn bisect_to_size(
    nodes: &mut Vec<Point>,
    triangles: &mut Vec<[usize; 3]>,
    boundary: &mut Vec<BoundaryEdge>,
    h: f64,
) {
    let threshold = h * (1.0 + 1e-12);
    loop {
        let mut start = None;
        for (t, tri) in triangles.iter().enumerate() {
            if longest_edge(nodes, tri).1 > threshold {
                start = Some(t);
                break;
            }
        }
        let Some(start) = start else { break };
        // Longest-edge propagation path: follow neighbors across longest
        // edges until a terminal pair or a terminal boundary edge.
        let mut t = start;
        let mut guard = 0;
        loop {
            guard += 1;
            assert!(guard < 10_000, "bisection path failed to terminate");
            let tri = triangles[t];
            let (k, _) = longest_edge(nodes, &tri);
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            let neighbor = triangles.iter().enumerate().position(|(s, st)| {
                s != t && st.contains(&a) && st.contains(&b)
            });
            match neighbor {
                None => {
                    let m = split_edge_node(nodes, a, b);
                    split_boundary_record(boundary, a, b, m);
                    bisect_triangle(triangles, t, a, b, m);
                    break;
                }
                Some(s) => {
                    let (ks, _) = longest_edge(nodes, &triangles[s]);
                    let sa = triangles[s][ks];
                    let sb = triangles[s][(ks + 1) % 3];
                    if (sa == a && sb == b) || (sa == b && sb == a) {
                        let m = split_edge_node(nodes, a, b);
                        // Split the higher index first so the other index
                        // stays valid.
                        let (first, second) = if t > s { (t, s) } else { (s, t) };
                        bisect_triangle(triangles, first, a, b, m);
                        bisect_triangle(triangles, second, a, b, m);
                        break;
                    }
                    t = s;
                }
            }
        }
    }
}

fn split_edge_node(nodes: &mut Vec<Point>, a: usize, b: usize) -> usize {
    let m = Point::new(
        0.5 * (nodes[a].x + nodes[b].x),
        0.5 * (nodes[a].y + nodes[b].y),
    );
    nodes.push(m);
    nodes.len() - 1
}

fn split_boundary_record(boundary: &mut Vec<BoundaryEdge>, a: usize, b: usize, m: usize) {
    let pos = boundary
        .iter()
        .position(|e| e.nodes == [a, b] || e.nodes == [b, a])
        .expect("boundary record for split edge");
    let rec = boundary[pos];
    let (x, y) = (rec.nodes[0], rec.nodes[1]);
    boundary[pos] = BoundaryEdge {
        nodes: [x, m],
        ..rec
    };
    boundary.insert(
        pos + 1,
        BoundaryEdge {
            nodes: [m, y],
            ..rec
        },
    );
}

/// Replace triangle `t` by its two children across edge (a, b) with
/// midpoint node `m`. Orientation is preserved.
fn bisect_triangle(triangles: &mut Vec<[usize; 3]>, t: usize, a: usize, b: usize, m: usize) {
    let tri = triangles[t];
    let k = (0..3)
        .find(|&k| {
            (tri[k] == a && tri[(k + 1) % 3] == b) || (tri[k] == b && tri[(k + 1) % 3] == a)
        })
        .expect("edge not in triangle");
    let (va, vb) = (tri[k], tri[(k + 1) % 3]);
    let vc = tri[(k + 2) % 3];
    triangles[t] = [va, m, vc];
    triangles.push([m, vb, vc]);
}

/// One Laplacian pass over interior nodes; a move is kept only when every
/// incident triangle keeps positive area.
fn smooth_interior(nodes: &mut [Point], triangles: &[[usize; 3]], boundary: &[BoundaryEdge]) {
    let n = nodes.len();
    let mut on_boundary = vec![false; n];
    for e in boundary {
        on_boundary[e.nodes[0]] = true;
        on_boundary[e.nodes[1]] = true;
    }
    let mut neighbors: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (t, tri) in triangles.iter().enumerate() {
        for k in 0..3 {
            let a = tri[k];
            let b = tri[(k + 1) % 3];
            if !neighbors[a].contains(&b) {
                neighbors[a].push(b);
            }
            if !neighbors[b].contains(&a) {
                neighbors[b].push(a);
            }
            incident[tri[k]].push(t);
        }
    }
    for v in 0..n {
        if on_boundary[v] || neighbors[v].is_empty() {
            continue;
        }
        let mut avg = Point::new(0.0, 0.0);
        for &u in &neighbors[v] {
            avg = avg + nodes[u];
        }
        let avg = avg * (1.0 / neighbors[v].len() as f64);
        let old = nodes[v];
        nodes[v] = avg;
        let ok = incident[v].iter().all(|&t| {
            let [a, b, c] = triangles[t];
            triangle_area(nodes[a], nodes[b], nodes[c]) > 0.0
        });
        if !ok {
            nodes[v] = old;
        }
    }
}

/// Uniform red refinement: every triangle splits into 4 congruent
/// children via its edge midpoints.
pub fn refine_red(mesh: &TriMesh) -> TriMesh {
    let parent_nodes = mesh.nodes.len();
    let mut nodes = mesh.nodes.clone();
    let mut origins: Vec<NodeOrigin> = (0..parent_nodes).map(NodeOrigin::Inherited).collect();
    let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
    let mut triangles = Vec::with_capacity(4 * mesh.triangles.len());

    let mut mid = |a: usize, b: usize, nodes: &mut Vec<Point>, origins: &mut Vec<NodeOrigin>| {
        let key = (a.min(b), a.max(b));
        *midpoint.entry(key).or_insert_with(|| {
            let m = Point::new(
                0.5 * (nodes[a].x + nodes[b].x),
                0.5 * (nodes[a].y + nodes[b].y),
            );
            nodes.push(m);
            origins.push(NodeOrigin::EdgeMidpoint(key.0, key.1));
            nodes.len() - 1
        })
    };

    for &[a, b, c] in &mesh.triangles {
        let mab = mid(a, b, &mut nodes, &mut origins);
        let mbc = mid(b, c, &mut nodes, &mut origins);
        let mca = mid(c, a, &mut nodes, &mut origins);
        triangles.push([a, mab, mca]);
        triangles.push([mab, b, mbc]);
        triangles.push([mca, mbc, c]);
        triangles.push([mab, mbc, mca]);
    }

    let mut boundary = Vec::with_capacity(2 * mesh.boundary.len());
    for e in &mesh.boundary {
        let key = (e.nodes[0].min(e.nodes[1]), e.nodes[0].max(e.nodes[1]));
        let m = midpoint[&key];
        boundary.push(BoundaryEdge {
            nodes: [e.nodes[0], m],
            ..*e
        });
        boundary.push(BoundaryEdge {
            nodes: [m, e.nodes[1]],
            ..*e
        });
    }

    let mesh = TriMesh {
        nodes,
        triangles,
        boundary,
        polygon: mesh.polygon.clone(),
        level: mesh.level + 1,
        lineage: Some(Lineage {
            parent_nodes,
            origins,
        }),
    };
    debug_assert!(mesh.validate().is_ok());
    mesh
}

/// Move nodes radially toward `params.center` so that r becomes
/// R·(r/R)^{1/μ} inside the grading radius R. Boundary nodes move only
/// when they sit on boundary edges whose supporting line passes through
/// the center (the legs of the corner).
pub fn grade(mesh: &TriMesh, params: &GradingParams) -> Result<TriMesh, MeshError> {
    assert!(
        params.mu > 0.0 && params.mu <= 1.0,
        "grading exponent must be in (0, 1]"
    );
    assert!(params.radius > 0.0, "grading radius must be positive");
    if mesh.node_index_at(params.center, 1e-12).is_none() {
        return Err(MeshError::Invalid(
            "grading center is not a mesh node".into(),
        ));
    }

    let n = mesh.nodes.len();
    let mut leg_only = vec![true; n];
    let mut on_boundary = vec![false; n];
    for e in &mesh.boundary {
        let a = mesh.nodes[e.nodes[0]];
        let b = mesh.nodes[e.nodes[1]];
        let dir = b - a;
        // Does the supporting line of this edge pass through the center?
        let through_center = (a - params.center).cross(dir).abs()
            <= 1e-12 * dir.norm() * (a - params.center).norm().max(1.0);
        for &v in &e.nodes {
            on_boundary[v] = true;
            if !through_center {
                leg_only[v] = false;
            }
        }
    }

    let mut nodes = mesh.nodes.clone();
    let exponent = 1.0 / params.mu - 1.0;
    for v in 0..n {
        let d = mesh.nodes[v] - params.center;
        let r = d.norm();
        if r <= 0.0 || r >= params.radius {
            continue;
        }
        if on_boundary[v] && !leg_only[v] {
            continue;
        }
        let scale = (r / params.radius).powf(exponent);
        nodes[v] = params.center + d * scale;
    }

    let graded = TriMesh {
        nodes,
        triangles: mesh.triangles.clone(),
        boundary: mesh.boundary.clone(),
        polygon: mesh.polygon.clone(),
        level: mesh.level,
        lineage: mesh.lineage.clone(),
    };
    for t in 0..graded.triangles.len() {
        if graded.triangle_area(t) <= 0.0 {
            return Err(MeshError::TangledMesh { triangle: t });
        }
    }
    Ok(graded)
}
