//! Analysis of discrete Signorini solutions: structure of the coincidence
//! set, refinement stability, the boundary complementarity product, the
//! singular exponent table with its exceptional integrability indices,
//! arc-norm exponent fitting, and error norms against reference fields.

use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

use crate::assembly::DofPartition;
use crate::field::AnalyticField;
use crate::geometry::{BoundarySpec, ConditionTag, CriticalPoint, Point};
use crate::mesh::TriMesh;
use crate::quad::tri_degree5;
use crate::solver::{DiscreteSolution, ObstacleData};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("fit window admits only {usable} usable arcs (need at least 4)")]
    WindowTooNarrow { usable: usize },
    #[error("the singular term is not excited (arc norm below noise floor)")]
    SingularityNotExcited,
    #[error("need at least 3 refinement levels, got {got}")]
    InsufficientLevels { got: usize },
    #[error("condition pair {a:?}-{b:?} has no table row (Signorini may not touch control)")]
    UnsupportedPair { a: ConditionTag, b: ConditionTag },
    #[error("index j = {j} below the row minimum {min}")]
    InvalidIndex { j: u32, min: u32 },
    #[error("fit center lies outside the mesh")]
    CenterOutsideMesh,
}

// ---------------------------------------------------------------------------
// Signorini boundary chains
// ---------------------------------------------------------------------------

/// The ordered nodes of one Signorini segment, with global boundary
/// arclengths.
#[derive(Clone, Debug)]
pub struct SignoriniChain {
    pub segment: usize,
    pub nodes: Vec<usize>,
    pub arclengths: Vec<f64>,
}

/// Ordered node chains of all Signorini segments.
pub fn signorini_chains(mesh: &TriMesh, spec: &BoundarySpec) -> Vec<SignoriniChain> {
    let mut per_segment: Vec<Vec<usize>> = vec![Vec::new(); spec.segments.len()];
    for (k, e) in mesh.boundary().iter().enumerate() {
        if e.tag == ConditionTag::Signorini {
            per_segment[e.segment].push(k);
        }
    }
    let mut chains = Vec::new();
    for (seg_idx, mut records) in per_segment.into_iter().enumerate() {
        if records.is_empty() {
            continue;
        }
        let seg = &spec.segments[seg_idx];
        let rank = |poly_edge: usize| -> usize {
            seg.edges
                .iter()
                .position(|&e| e == poly_edge)
                .expect("boundary record outside its segment")
        };
        records.sort_by(|&a, &b| {
            let ea = &mesh.boundary()[a];
            let eb = &mesh.boundary()[b];
            let ka = (
                rank(ea.poly_edge),
                mesh.arclength_on_edge(ea.poly_edge, mesh.nodes()[ea.nodes[0]]),
            );
            let kb = (
                rank(eb.poly_edge),
                mesh.arclength_on_edge(eb.poly_edge, mesh.nodes()[eb.nodes[0]]),
            );
            ka.partial_cmp(&kb).unwrap()
        });
        let mut nodes = Vec::with_capacity(records.len() + 1);
        let mut arcs = Vec::with_capacity(records.len() + 1);
        for (i, &rec) in records.iter().enumerate() {
            let e = &mesh.boundary()[rec];
            if i == 0 {
                nodes.push(e.nodes[0]);
                arcs.push(mesh.arclength_on_edge(e.poly_edge, mesh.nodes()[e.nodes[0]]));
            } else {
                debug_assert_eq!(*nodes.last().unwrap(), e.nodes[0], "chain not contiguous");
            }
            nodes.push(e.nodes[1]);
            arcs.push(mesh.arclength_on_edge(e.poly_edge, mesh.nodes()[e.nodes[1]]));
        }
        chains.push(SignoriniChain {
            segment: seg_idx,
            nodes,
            arclengths: arcs,
        });
    }
    chains
}

// ---------------------------------------------------------------------------
// Coincidence set extraction
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct CoincidenceInterval {
    pub segment: usize,
    pub start: f64,
    pub end: f64,
    pub start_point: Point,
    pub end_point: Point,
}

#[derive(Clone, Debug, Serialize)]
pub struct IsolatedContact {
    pub segment: usize,
    pub arclength: f64,
    pub point: Point,
}

/// Discrete coincidence set of one solution: contact intervals, isolated
/// contact points, and the free endpoints where contact meets non-contact
/// inside a Signorini segment.
#[derive(Clone, Debug, Serialize)]
pub struct CoincidenceReport {
    pub level: u32,
    /// Max Signorini boundary edge length (the h of 2h endpoint bounds).
    pub mesh_width: f64,
    pub intervals: Vec<CoincidenceInterval>,
    pub isolated: Vec<IsolatedContact>,
    /// Transition points strictly inside Γ_S (contact ↔ non-contact),
    /// located at the midpoint of the transition edge.
    pub endpoints: Vec<Point>,
    pub endpoint_arclengths: Vec<f64>,
}

impl CoincidenceReport {
    pub fn component_count(&self) -> (usize, usize) {
        (self.intervals.len(), self.isolated.len())
    }
}

/// Classify contact by active set membership, plus exact equality
/// y_i == ψ_i (which covers the all-zero solution where the active set
/// is empty but the whole boundary touches the obstacle).
fn is_contact(
    node: usize,
    sol: &DiscreteSolution,
    obstacle: &ObstacleData,
    active_mask: &[bool],
) -> bool {
    active_mask[node] || sol.values[node] == obstacle.value(node)
}

pub fn extract_coincidence(
    sol: &DiscreteSolution,
    mesh: &TriMesh,
    spec: &BoundarySpec,
    partition: &DofPartition,
    obstacle: &ObstacleData,
) -> CoincidenceReport {
    let n = mesh.node_count();
    let mut active_mask = vec![false; n];
    for &i in &sol.active {
        active_mask[i] = true;
    }
    let mut signorini_mask = vec![false; n];
    for &i in &partition.signorini {
        signorini_mask[i] = true;
    }

    let mut intervals = Vec::new();
    let mut isolated = Vec::new();
    let mut endpoints = Vec::new();
    let mut endpoint_arcs = Vec::new();

    for chain in signorini_chains(mesh, spec) {
        let m = chain.nodes.len();
        // Positions of classified Signorini nodes along the chain;
        // junction ends (Dirichlet-assigned) are never contact.
        let contact: Vec<bool> = chain
            .nodes
            .iter()
            .map(|&v| signorini_mask[v] && is_contact(v, sol, obstacle, &active_mask))
            .collect();

        let mut k = 0;
        while k < m {
            if !contact[k] {
                k += 1;
                continue;
            }
            let start = k;
            while k + 1 < m && contact[k + 1] {
                k += 1;
            }
            let end = k;
            k += 1;

            // Left end: clamp to the segment start when no Signorini
            // transition precedes the run.
            let left_clamped = start == 0 || !signorini_mask[chain.nodes[start - 1]];
            let right_clamped = end + 1 >= m || !signorini_mask[chain.nodes[end + 1]];
            let (s0, p0) = if left_clamped {
                (chain.arclengths[0], mesh.nodes()[chain.nodes[0]])
            } else {
                let mid = midpoint(mesh.nodes()[chain.nodes[start - 1]], mesh.nodes()[chain.nodes[start]]);
                let arc = 0.5 * (chain.arclengths[start - 1] + chain.arclengths[start]);
                endpoints.push(mid);
                endpoint_arcs.push(arc);
                (arc, mid)
            };
            let (s1, p1) = if right_clamped {
                (chain.arclengths[m - 1], mesh.nodes()[chain.nodes[m - 1]])
            } else {
                let mid = midpoint(mesh.nodes()[chain.nodes[end]], mesh.nodes()[chain.nodes[end + 1]]);
                let arc = 0.5 * (chain.arclengths[end] + chain.arclengths[end + 1]);
                endpoints.push(mid);
                endpoint_arcs.push(arc);
                (arc, mid)
            };

            if start == end && !left_clamped && !right_clamped {
                isolated.push(IsolatedContact {
                    segment: chain.segment,
                    arclength: chain.arclengths[start],
                    point: mesh.nodes()[chain.nodes[start]],
                });
            } else {
                intervals.push(CoincidenceInterval {
                    segment: chain.segment,
                    start: s0,
                    end: s1,
                    start_point: p0,
                    end_point: p1,
                });
            }
        }
    }

    CoincidenceReport {
        level: mesh.level(),
        mesh_width: mesh.max_boundary_edge(ConditionTag::Signorini),
        intervals,
        isolated,
        endpoints,
        endpoint_arclengths: endpoint_arcs,
    }
}

fn midpoint(a: Point, b: Point) -> Point {
    Point::new(0.5 * (a.x + b.x), 0.5 * (a.y + b.y))
}

// ---------------------------------------------------------------------------
// Refinement stability of the coincidence structure
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum StabilityVerdict {
    Stable {
        interval_count: usize,
        isolated_count: usize,
        max_endpoint_drift: f64,
        drift_limit: f64,
    },
    Unstable {
        reason: String,
    },
}

impl StabilityVerdict {
    pub fn is_stable(&self) -> bool {
        matches!(self, StabilityVerdict::Stable { .. })
    }
}

/// Stable iff the component counts agree on the last two levels and every
/// free endpoint moves by at most 2h between them (h from the coarser
/// level).
pub fn component_stability(
    reports: &[CoincidenceReport],
) -> Result<StabilityVerdict, AnalysisError> {
    if reports.len() < 3 {
        return Err(AnalysisError::InsufficientLevels {
            got: reports.len(),
        });
    }
    let coarse = &reports[reports.len() - 2];
    let fine = &reports[reports.len() - 1];
    if coarse.component_count() != fine.component_count() {
        return Ok(StabilityVerdict::Unstable {
            reason: format!(
                "component counts changed between the last two levels: {:?} vs {:?}",
                coarse.component_count(),
                fine.component_count()
            ),
        });
    }
    if coarse.endpoints.len() != fine.endpoints.len() {
        return Ok(StabilityVerdict::Unstable {
            reason: format!(
                "endpoint counts changed: {} vs {}",
                coarse.endpoints.len(),
                fine.endpoints.len()
            ),
        });
    }
    let limit = 2.0 * coarse.mesh_width;
    let mut max_drift = 0.0f64;
    for (a, b) in coarse.endpoints.iter().zip(&fine.endpoints) {
        max_drift = max_drift.max(a.dist(*b));
    }
    if max_drift > limit {
        return Ok(StabilityVerdict::Unstable {
            reason: format!("endpoint drift {max_drift} exceeds 2h = {limit}"),
        });
    }
    Ok(StabilityVerdict::Stable {
        interval_count: fine.intervals.len(),
        isolated_count: fine.isolated.len(),
        max_endpoint_drift: max_drift,
        drift_limit: limit,
    })
}

// ---------------------------------------------------------------------------
// Complementarity product diagnostic
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct ComplementaritySample {
    pub node: usize,
    pub arclength: f64,
    /// One-sided tangential difference quotient of y along the boundary.
    pub tangential: f64,
    /// Multiplier divided by the node's boundary edge mass.
    pub flux_density: f64,
    pub product: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComplementarityReport {
    pub delta: f64,
    pub max_product: f64,
    pub samples: Vec<ComplementaritySample>,
}

/// Max over Signorini nodes (outside δ-balls around the critical points)
/// of |t_h · n_h|, the discrete tangential-derivative × flux-density
/// product.
pub fn complementarity_product(
    sol: &DiscreteSolution,
    mesh: &TriMesh,
    spec: &BoundarySpec,
    partition: &DofPartition,
    critical: &[Point],
    delta: f64,
) -> ComplementarityReport {
    assert!(delta > 0.0, "exclusion radius must be positive");
    let mut signorini_mask = vec![false; mesh.node_count()];
    for &i in &partition.signorini {
        signorini_mask[i] = true;
    }
    let mut samples = Vec::new();
    let mut max_product = 0.0f64;
    for chain in signorini_chains(mesh, spec) {
        let m = chain.nodes.len();
        for k in 0..m {
            let v = chain.nodes[k];
            if !signorini_mask[v] {
                continue;
            }
            let p = mesh.nodes()[v];
            if critical.iter().any(|c| c.dist(p) <= delta) {
                continue;
            }
            // One-sided difference toward the next chain node; fall back
            // to the previous one at the chain end.
            let nb = if k + 1 < m {
                chain.nodes[k + 1]
            } else {
                chain.nodes[k - 1]
            };
            let dist = mesh.nodes()[nb].dist(p);
            let tangential = (sol.values[nb] - sol.values[v]) / dist;
            let mut mass = 0.0;
            if k > 0 {
                mass += 0.5 * mesh.nodes()[chain.nodes[k - 1]].dist(p);
            }
            if k + 1 < m {
                mass += 0.5 * mesh.nodes()[chain.nodes[k + 1]].dist(p);
            }
            let flux_density = sol.multiplier[v] / mass;
            let product = (tangential * flux_density).abs();
            max_product = max_product.max(product);
            samples.push(ComplementaritySample {
                node: v,
                arclength: chain.arclengths[k],
                tangential,
                flux_density,
                product,
            });
        }
    }
    ComplementarityReport {
        delta,
        max_product,
        samples,
    }
}

// ---------------------------------------------------------------------------
// Singular exponent table
// ---------------------------------------------------------------------------

/// Pair of boundary conditions meeting at a critical point, or the free
/// endpoint of a coincidence interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConditionPair {
    Pair(ConditionTag, ConditionTag),
    CoincidenceEndpoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum TableRow {
    /// D-D, N-N, U-U, U-N: λ = jπ/α, j ≥ 1.
    SamePi,
    /// D-N, D-U: λ = (j - ½)π/α, j ≥ 1.
    MixedHalf,
    /// S-S: λ = jπ/(2α), j ≥ 2.
    SignoriniBoth,
    /// S-D, S-N: λ = jπ/(2α), j ≥ 1.
    SignoriniMixed,
    /// Free endpoint of the coincidence set: λ = 3/2 (α = π).
    Endpoint,
}

impl ConditionPair {
    pub fn new(a: ConditionTag, b: ConditionTag) -> Result<Self, AnalysisError> {
        use ConditionTag::*;
        if matches!((a, b), (Signorini, Control) | (Control, Signorini)) {
            return Err(AnalysisError::UnsupportedPair { a, b });
        }
        Ok(ConditionPair::Pair(a, b))
    }

    pub fn of_critical_point(cp: &CriticalPoint) -> Result<Self, AnalysisError> {
        ConditionPair::new(cp.tags.0, cp.tags.1)
    }

    fn row(&self) -> TableRow {
        use ConditionTag::*;
        match self {
            ConditionPair::CoincidenceEndpoint => TableRow::Endpoint,
            ConditionPair::Pair(a, b) => match (*a, *b) {
                (Signorini, Signorini) => TableRow::SignoriniBoth,
                (Signorini, Dirichlet)
                | (Dirichlet, Signorini)
                | (Signorini, Neumann)
                | (Neumann, Signorini) => TableRow::SignoriniMixed,
                (Dirichlet, Neumann)
                | (Neumann, Dirichlet)
                | (Dirichlet, Control)
                | (Control, Dirichlet) => TableRow::MixedHalf,
                (Dirichlet, Dirichlet)
                | (Neumann, Neumann)
                | (Control, Control)
                | (Neumann, Control)
                | (Control, Neumann) => TableRow::SamePi,
                (Signorini, Control) | (Control, Signorini) => {
                    unreachable!("rejected by constructor")
                }
            },
        }
    }

    fn min_index(&self) -> u32 {
        match self.row() {
            TableRow::SignoriniBoth => 2,
            _ => 1,
        }
    }

    pub fn label(&self) -> String {
        match self {
            ConditionPair::CoincidenceEndpoint => "endpoint".to_string(),
            ConditionPair::Pair(a, b) => format!("{}-{}", a.letter(), b.letter()),
        }
    }
}

/// The j-th singular exponent for a condition pair at interior angle α.
pub fn singular_exponent_table(
    pair: &ConditionPair,
    alpha: f64,
    j: u32,
) -> Result<f64, AnalysisError> {
    assert!(alpha > 0.0 && alpha < 2.0 * PI, "angle out of range");
    let min = pair.min_index();
    if j < min {
        return Err(AnalysisError::InvalidIndex { j, min });
    }
    let jf = j as f64;
    Ok(match pair.row() {
        TableRow::SamePi => jf * PI / alpha,
        TableRow::MixedHalf => (jf - 0.5) * PI / alpha,
        TableRow::SignoriniBoth | TableRow::SignoriniMixed => jf * PI / (2.0 * alpha),
        TableRow::Endpoint => {
            if j != 1 {
                return Err(AnalysisError::InvalidIndex { j, min: 1 });
            }
            1.5
        }
    })
}

/// Smallest admissible table exponent with λ ≠ 1, together with its index.
pub fn predicted_leading_exponent(pair: &ConditionPair, alpha: f64) -> (f64, u32) {
    if matches!(pair, ConditionPair::CoincidenceEndpoint) {
        return (1.5, 1);
    }
    let mut j = pair.min_index();
    loop {
        let lambda = singular_exponent_table(pair, alpha, j).expect("j above row minimum");
        if (lambda - 1.0).abs() > 1e-12 {
            return (lambda, j);
        }
        j += 1;
    }
}

/// Convenience: predicted leading exponent of a geometric critical point.
pub fn predicted_for(cp: &CriticalPoint) -> Result<(f64, u32), AnalysisError> {
    Ok(predicted_leading_exponent(
        &ConditionPair::of_critical_point(cp)?,
        cp.angle,
    ))
}

/// The exceptional integrability indices p > 2 excluded by the W^{2,p}
/// regularity splitting: values 2/(2 − kπ/(2α)) with k ∈ ℕ and
/// kπ/(2α) < 2, over all given angles, duplicates merged.
pub fn exceptional_p(angles: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for &alpha in angles {
        assert!(alpha > 0.0 && alpha < 2.0 * PI, "angle out of range");
        let mut k = 1u32;
        loop {
            let t = k as f64 * PI / (2.0 * alpha);
            if t >= 2.0 {
                break;
            }
            let p = 2.0 / (2.0 - t);
            if p > 2.0 + 1e-12 && !out.iter().any(|&q| (q - p).abs() < 1e-9) {
                out.push(p);
            }
            k += 1;
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

// ---------------------------------------------------------------------------
// Exponent fitting
// ---------------------------------------------------------------------------

/// Center of a local r^λ expansion: a corner of the domain or a detected
/// coincidence endpoint on a straight Signorini edge.
#[derive(Clone, Copy, Debug)]
pub struct FitCenter {
    pub location: Point,
    /// Direction of the first leg; the interior spans
    /// [start_angle, start_angle + opening].
    pub start_angle: f64,
    pub opening: f64,
}

impl FitCenter {
    pub fn from_critical_point(cp: &CriticalPoint) -> Self {
        FitCenter {
            location: cp.location,
            start_angle: cp.leg_angle,
            opening: cp.angle,
        }
    }

    /// Coincidence endpoint on a straight boundary piece running in
    /// direction `boundary_angle` (counterclockwise orientation); the
    /// interior is the half-plane on its left.
    pub fn endpoint(location: Point, boundary_angle: f64) -> Self {
        FitCenter {
            location,
            start_angle: boundary_angle,
            opening: PI,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FitWindow {
    pub r_min: f64,
    pub r_max: f64,
}

/// Result of an arc-norm exponent fit.
#[derive(Clone, Debug, Serialize)]
pub struct ExponentReport {
    pub center: Point,
    pub opening: f64,
    /// Least-squares slope of log g(r) against log r.
    pub fitted: f64,
    /// Table prediction, when the caller provides one.
    pub predicted: Option<f64>,
    pub window: FitWindow,
    pub arcs: usize,
    pub r_squared: f64,
    /// Arc norm at the outermost radius; proxy for the coefficient size.
    pub coefficient_proxy: f64,
    /// Local mesh size used to clamp the window.
    pub h_local: f64,
    /// Per-arc (r, g(r)) pairs for log-log plotting.
    pub samples: Vec<(f64, f64)>,
}

/// Largest edge among triangles whose closure contains the center.
fn local_mesh_size(mesh: &TriMesh, center: Point) -> Option<f64> {
    let mut h: f64 = 0.0;
    let mut found = false;
    for tri in mesh.triangles() {
        let (a, b, c) = (
            mesh.nodes()[tri[0]],
            mesh.nodes()[tri[1]],
            mesh.nodes()[tri[2]],
        );
        let area = crate::mesh::triangle_area(a, b, c);
        if area <= 0.0 {
            continue;
        }
        let la = crate::mesh::triangle_area(center, b, c) / area;
        let lb = crate::mesh::triangle_area(a, center, c) / area;
        let lc = 1.0 - la - lb;
        if la.min(lb).min(lc) >= -1e-9 {
            found = true;
            h = h.max(a.dist(b)).max(b.dist(c)).max(c.dist(a));
        }
    }
    if found {
        Some(h)
    } else {
        None
    }
}

/// Default fit window [4·h_local, half the distance to the nearest other
/// expansion center].
pub fn default_window(
    mesh: &TriMesh,
    center: &FitCenter,
    other_centers: &[Point],
) -> Result<FitWindow, AnalysisError> {
    let h_loc =
        local_mesh_size(mesh, center.location).ok_or(AnalysisError::CenterOutsideMesh)?;
    let mut r_max = f64::INFINITY;
    for c in other_centers {
        let d = c.dist(center.location);
        if d > 1e-12 {
            r_max = r_max.min(0.5 * d);
        }
    }
    if !r_max.is_finite() {
        // Sole center: half the mesh diameter.
        let diam = mesh
            .nodes()
            .iter()
            .map(|p| p.dist(center.location))
            .fold(0.0, f64::max);
        r_max = 0.5 * diam;
    }
    Ok(FitWindow {
        r_min: 4.0 * h_loc,
        r_max,
    })
}

/// Number of geometrically spaced arcs with ratio √2 across the window.
pub fn default_arc_count(window: &FitWindow) -> usize {
    let n = ((window.r_max / window.r_min).ln() / 0.5f64.ln().abs()).floor() as usize + 1;
    n.max(4)
}

/// Fit the local singular exponent of a nodal field around a center by
/// regressing the angular L² arc norm of (y − y(center)) against the arc
/// radius on a log-log scale.
pub fn fit_exponent(
    values: &[f64],
    mesh: &TriMesh,
    center: &FitCenter,
    window: FitWindow,
    arcs: usize,
    samples_per_arc: usize,
) -> Result<ExponentReport, AnalysisError> {
    assert!(window.r_min > 0.0 && window.r_max > window.r_min);
    assert!(samples_per_arc >= 4);
    let max_abs = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max_abs == 0.0 {
        return Err(AnalysisError::SingularityNotExcited);
    }
    let locator = mesh.locator();
    let h_loc =
        local_mesh_size(mesh, center.location).ok_or(AnalysisError::CenterOutsideMesh)?;
    let r_min = window.r_min.max(2.0 * h_loc);
    let r_max = window.r_max;
    if r_max <= r_min * (1.0 + 1e-9) {
        return Err(AnalysisError::WindowTooNarrow { usable: 0 });
    }
    let arcs = arcs.max(2);
    let center_value = locator
        .interpolate(mesh, values, center.location)
        .ok_or(AnalysisError::CenterOutsideMesh)?;

    let ratio = (r_max / r_min).powf(1.0 / (arcs as f64 - 1.0));
    let mut samples: Vec<(f64, f64)> = Vec::with_capacity(arcs);
    for k in 0..arcs {
        let r = r_min * ratio.powi(k as i32);
        let mut sum = 0.0;
        let mut hits = 0usize;
        for q in 0..samples_per_arc {
            let theta =
                center.start_angle + (q as f64 + 0.5) / samples_per_arc as f64 * center.opening;
            let p = center.location + Point::new(r * theta.cos(), r * theta.sin());
            if let Some(v) = locator.interpolate(mesh, values, p) {
                let d = v - center_value;
                sum += d * d;
                hits += 1;
            }
        }
        if hits * 5 >= samples_per_arc * 4 {
            // Angular L² norm via the midpoint rule over the sector.
            let g = (center.opening * sum / hits as f64).sqrt();
            if g > 0.0 {
                samples.push((r, g));
            }
        }
    }
    if samples.len() < 4 {
        return Err(AnalysisError::WindowTooNarrow {
            usable: samples.len(),
        });
    }
    let g_outer = samples.last().unwrap().1;
    if max_abs == 0.0 || g_outer < 1e-8 * max_abs {
        return Err(AnalysisError::SingularityNotExcited);
    }

    let logs: Vec<(f64, f64)> = samples.iter().map(|&(r, g)| (r.ln(), g.ln())).collect();
    let (slope, r_squared) = least_squares_slope(&logs);
    Ok(ExponentReport {
        center: center.location,
        opening: center.opening,
        fitted: slope,
        predicted: None,
        window: FitWindow { r_min, r_max },
        arcs: samples.len(),
        r_squared,
        coefficient_proxy: g_outer,
        h_local: h_loc,
        samples,
    })
}

/// Slope and R² of the least-squares line through (x, y) pairs.
pub fn least_squares_slope(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for &(x, y) in points {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
        syy += (y - mean_y) * (y - mean_y);
    }
    let slope = sxy / sxx;
    let r2 = if syy <= 1e-300 {
        1.0
    } else {
        ((sxy * sxy) / (sxx * syy)).clamp(0.0, 1.0)
    };
    (slope, r2)
}

/// Least-squares convergence rate: slope of log(error) against log(h).
pub fn convergence_rate(hs: &[f64], errors: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = hs
        .iter()
        .zip(errors)
        .filter(|(_, &e)| e > 0.0)
        .map(|(&h, &e)| (h.ln(), e.ln()))
        .collect();
    least_squares_slope(&pts).0
}

// ---------------------------------------------------------------------------
// Error norms
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ErrorNorms {
    pub l2: f64,
    /// H¹ seminorm (energy norm) of the error.
    pub h1: f64,
}

/// L² and H¹-seminorm distances between a P1 nodal field and a reference
/// field, by a degree-5 triangle rule.
pub fn error_norms(values: &[f64], mesh: &TriMesh, exact: &AnalyticField) -> ErrorNorms {
    let rule = tri_degree5();
    let mut l2 = 0.0;
    let mut h1 = 0.0;
    for tri in mesh.triangles() {
        let (a, b, c) = (
            mesh.nodes()[tri[0]],
            mesh.nodes()[tri[1]],
            mesh.nodes()[tri[2]],
        );
        let area = crate::mesh::triangle_area(a, b, c);
        // Constant P1 gradient on the triangle.
        let s = 1.0 / (2.0 * area);
        let g0 = Point::new(b.y - c.y, c.x - b.x) * s;
        let g1 = Point::new(c.y - a.y, a.x - c.x) * s;
        let g2 = Point::new(a.y - b.y, b.x - a.x) * s;
        let grad_h = g0 * values[tri[0]] + g1 * values[tri[1]] + g2 * values[tri[2]];
        for (bary, w) in rule {
            let p = a * bary[0] + b * bary[1] + c * bary[2];
            let yh = bary[0] * values[tri[0]] + bary[1] * values[tri[1]] + bary[2] * values[tri[2]];
            let diff = yh - exact.value(p);
            l2 += area * w * diff * diff;
            let gd = grad_h - exact.gradient(p);
            h1 += area * w * gd.dot(gd);
        }
    }
    ErrorNorms {
        l2: l2.sqrt(),
        h1: h1.sqrt(),
    }
}

#[cfg(test)]
impl ConditionPair {
    fn row_is_signorini_both(&self) -> bool {
        matches!(
            self,
            ConditionPair::Pair(ConditionTag::Signorini, ConditionTag::Signorini)
        )
    }
}
