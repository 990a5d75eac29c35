//! Orchestration plumbing: a parsed problem, mesh hierarchies, and the
//! assemble-reduce-solve chain used by the CLI, the tests, and the
//! benchmarks.

use crate::assembly::{load_control, load_volume, partition_dofs, stiffness, DofPartition,
    SymmetricSparseOperator};
use crate::cases::CaseSpec;
use crate::field::{AnalyticField, VolumeLoad};
use crate::geometry::BoundarySpec;
use crate::mesh::{grade, refine_red, triangulate, GradingParams, MeshError, TriMesh};
use crate::solver::{kkt_residuals, solve_signorini, DiscreteSolution, KktResiduals,
    ObstacleData, SolveOptions, SolverError};

/// A complete problem instance: boundary layout plus loads, gap and an
/// optional reference solution.
#[derive(Clone, Debug)]
pub struct Problem {
    pub boundary: BoundarySpec,
    pub volume_load: Option<VolumeLoad>,
    pub gap: Option<AnalyticField>,
    pub exact: Option<AnalyticField>,
}

impl From<&CaseSpec> for Problem {
    fn from(case: &CaseSpec) -> Self {
        Problem {
            boundary: case.boundary.clone(),
            volume_load: case.volume_load,
            gap: case.gap,
            exact: case.exact,
        }
    }
}

/// Uniform refinement hierarchy with optional per-level radial grading.
/// The grading map is applied to each refined mesh, not compounded.
pub fn mesh_hierarchy(
    spec: &BoundarySpec,
    h: f64,
    levels: usize,
    grading: Option<GradingParams>,
) -> Result<Vec<TriMesh>, MeshError> {
    assert!(levels >= 1, "need at least one level");
    let mut uniform = vec![triangulate(spec, h)?];
    for _ in 1..levels {
        uniform.push(refine_red(uniform.last().unwrap()));
    }
    match grading {
        None => Ok(uniform),
        Some(params) => uniform.iter().map(|m| grade(m, &params)).collect(),
    }
}

/// Operator, load and dof bookkeeping of one discretized level.
pub struct Assembled {
    pub operator: SymmetricSparseOperator,
    pub load: Vec<f64>,
    pub partition: DofPartition,
    pub obstacle: ObstacleData,
}

pub fn assemble(problem: &Problem, mesh: &TriMesh) -> Assembled {
    let operator = stiffness(mesh);
    let mut load = load_control(mesh, &problem.boundary);
    if let Some(vl) = &problem.volume_load {
        let volume = load_volume(mesh, vl);
        for (b, v) in load.iter_mut().zip(volume) {
            *b += v;
        }
    }
    let partition = partition_dofs(mesh, &problem.boundary);
    let obstacle = match &problem.gap {
        None => ObstacleData::zeros(mesh.node_count()),
        Some(field) => ObstacleData::from_field(mesh, field),
    };
    Assembled {
        operator,
        load,
        partition,
        obstacle,
    }
}

/// One solved refinement level with its certified residuals.
pub struct LevelSolution {
    pub mesh: TriMesh,
    pub assembled: Assembled,
    pub solution: DiscreteSolution,
    pub kkt: KktResiduals,
}

pub fn solve_level(
    problem: &Problem,
    mesh: &TriMesh,
    opts: &SolveOptions,
) -> Result<LevelSolution, SolverError> {
    let assembled = assemble(problem, mesh);
    let solution = solve_signorini(
        &assembled.operator,
        &assembled.load,
        &assembled.partition,
        &assembled.obstacle,
        opts,
    )?;
    let kkt = kkt_residuals(
        &solution,
        &assembled.operator,
        &assembled.load,
        &assembled.partition,
        &assembled.obstacle,
    );
    Ok(LevelSolution {
        mesh: mesh.clone(),
        assembled,
        solution,
        kkt,
    })
}
