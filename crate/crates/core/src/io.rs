//! File formats: the JSON problem file, the solution CSV and the solver
//! artifact JSON. All floats are written as shortest round-trip decimals,
//! so identical runs produce byte-identical files.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assembly::{DofClass, DofPartition};
use crate::field::{AnalyticField, VolumeLoad};
use crate::geometry::{
    validate_boundary, BoundarySpec, ConditionTag, GeometryError, Point, Polygon, SegmentData,
    SegmentSpec,
};
use crate::mesh::TriMesh;
use crate::pipeline::Problem;
use crate::solver::{DiscreteSolution, KktResiduals, SolverTrace};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("problem file error: {0}")]
    Problem(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("csv error: {0}")]
    Csv(String),
}

/// Serde mirror of the problem file. Unknown keys are rejected.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    vertices: Vec<[f64; 2]>,
    segments: Vec<SegmentRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lifting: Option<AnalyticField>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    volume_load: Option<VolumeLoad>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gap: Option<AnalyticField>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exact: Option<AnalyticField>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SegmentRecord {
    edges: Vec<usize>,
    tag: ConditionTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    data: Option<SegmentData>,
}

pub fn problem_to_json(problem: &Problem) -> String {
    let file = ProblemFile {
        vertices: problem
            .boundary
            .polygon
            .vertices()
            .iter()
            .map(|p| [p.x, p.y])
            .collect(),
        segments: problem
            .boundary
            .segments
            .iter()
            .map(|s| SegmentRecord {
                edges: s.edges.clone(),
                tag: s.tag,
                data: s.data.clone(),
            })
            .collect(),
        lifting: problem.boundary.lifting,
        volume_load: problem.volume_load,
        gap: problem.gap,
        exact: problem.exact,
    };
    let mut json = serde_json::to_string_pretty(&file).expect("problem serializes");
    json.push('\n');
    json
}

/// Parse and validate a problem file.
pub fn problem_from_json(text: &str) -> Result<Problem, IoError> {
    let file: ProblemFile =
        serde_json::from_str(text).map_err(|e| IoError::Problem(e.to_string()))?;
    let polygon = Polygon::new(
        file.vertices
            .iter()
            .map(|&[x, y]| Point::new(x, y))
            .collect(),
    )?;
    let boundary = validate_boundary(BoundarySpec {
        polygon,
        segments: file
            .segments
            .into_iter()
            .map(|s| SegmentSpec {
                edges: s.edges,
                tag: s.tag,
                data: s.data,
            })
            .collect(),
        lifting: file.lifting,
    })?;
    Ok(Problem {
        boundary,
        volume_load: file.volume_load,
        gap: file.gap,
        exact: file.exact,
    })
}

/// Effective condition letter of a node for the solution CSV.
fn node_letter(class: DofClass, tags: &[ConditionTag]) -> char {
    match class {
        DofClass::Dirichlet => 'D',
        DofClass::Signorini => 'S',
        DofClass::Free => {
            if tags.contains(&ConditionTag::Neumann) {
                'N'
            } else if tags.contains(&ConditionTag::Control) {
                'U'
            } else {
                'I'
            }
        }
    }
}

/// Solution export: `node,x,y,value,tag,multiplier`, one row per node in
/// node order.
pub fn solution_to_csv(mesh: &TriMesh, partition: &DofPartition, sol: &DiscreteSolution) -> String {
    use std::fmt::Write;
    let tags = mesh.node_tags();
    let mut out = String::from("node,x,y,value,tag,multiplier\n");
    for (i, p) in mesh.nodes().iter().enumerate() {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            i,
            p.x,
            p.y,
            sol.values[i],
            node_letter(partition.class[i], &tags[i]),
            sol.multiplier[i]
        )
        .unwrap();
    }
    out
}

/// Read back nodal values and multipliers from a solution CSV.
pub fn solution_from_csv(text: &str, nodes: usize) -> Result<(Vec<f64>, Vec<f64>), IoError> {
    let mut values = vec![f64::NAN; nodes];
    let mut multiplier = vec![f64::NAN; nodes];
    let mut seen = 0usize;
    for (k, line) in text.lines().enumerate() {
        if k == 0 {
            if line != "node,x,y,value,tag,multiplier" {
                return Err(IoError::Csv(format!("unexpected header '{line}'")));
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 6 {
            return Err(IoError::Csv(format!("row {k} has {} columns", cols.len())));
        }
        let node: usize = cols[0]
            .parse()
            .map_err(|_| IoError::Csv(format!("bad node id in row {k}")))?;
        if node >= nodes {
            return Err(IoError::Csv(format!("node id {node} out of range")));
        }
        if !values[node].is_nan() {
            return Err(IoError::Csv(format!("duplicate row for node {node}")));
        }
        values[node] = cols[3]
            .parse()
            .map_err(|_| IoError::Csv(format!("bad value in row {k}")))?;
        multiplier[node] = cols[5]
            .parse()
            .map_err(|_| IoError::Csv(format!("bad multiplier in row {k}")))?;
        seen += 1;
    }
    if seen != nodes {
        return Err(IoError::Csv(format!("expected {nodes} rows, found {seen}")));
    }
    Ok((values, multiplier))
}

/// Solver artifact written next to each solution CSV.
#[derive(Serialize, Deserialize)]
pub struct SolveArtifact {
    pub level: u32,
    pub nodes: usize,
    pub iterations: usize,
    /// Final active set (sorted node ids).
    pub active: Vec<usize>,
    pub kkt: KktResiduals,
    pub trace: SolverTrace,
}

impl SolveArtifact {
    pub fn new(
        mesh: &TriMesh,
        sol: &DiscreteSolution,
        kkt: KktResiduals,
    ) -> SolveArtifact {
        SolveArtifact {
            level: mesh.level(),
            nodes: mesh.node_count(),
            iterations: sol.iterations,
            active: sol.active.clone(),
            kkt,
            trace: sol.trace.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut json = serde_json::to_string_pretty(self).expect("artifact serializes");
        json.push('\n');
        json
    }

    pub fn from_json(text: &str) -> Result<SolveArtifact, IoError> {
        serde_json::from_str(text).map_err(|e| IoError::Problem(e.to_string()))
    }
}
