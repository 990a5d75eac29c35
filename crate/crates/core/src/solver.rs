//! Conjugate-gradient linear solver and the primal-dual active-set method
//! for the discrete Signorini variational inequality.
//!
//! The active-set loop enforces y_i = ψ_i on the current guess of the
//! contact set, recovers the multiplier from the residual of the
//! unconstrained equations, and reclassifies nodes until the set repeats.
//! At the fixed point the discrete complementarity system
//! y ≥ ψ, λ ≥ 0, (y - ψ)·λ = 0 holds exactly up to the inner solver
//! tolerance.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assembly::{reduce_dirichlet, DofPartition, SymmetricSparseOperator};
use crate::field::AnalyticField;
use crate::mesh::TriMesh;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("inner solver did not converge: relative residual {relative_residual} after {iterations} iterations")]
    NoConvergence {
        iterations: usize,
        relative_residual: f64,
    },
    #[error("active set cycled without stabilizing after {iterations} outer iterations")]
    CycleDetected {
        iterations: usize,
        last_active: Vec<usize>,
        previous_active: Vec<usize>,
    },
}

/// Gap values ψ at the mesh nodes; only the entries at Signorini nodes
/// are read.
#[derive(Clone, Debug)]
pub struct ObstacleData {
    values: Vec<f64>,
}

impl ObstacleData {
    pub fn zeros(n: usize) -> Self {
        ObstacleData {
            values: vec![0.0; n],
        }
    }

    pub fn from_field(mesh: &TriMesh, field: &AnalyticField) -> Self {
        let values: Vec<f64> = mesh.nodes().iter().map(|&p| field.value(p)).collect();
        assert!(values.iter().all(|v| v.is_finite()), "gap must be finite");
        ObstacleData { values }
    }

    pub fn from_values(values: Vec<f64>) -> Self {
        assert!(values.iter().all(|v| v.is_finite()), "gap must be finite");
        ObstacleData { values }
    }

    pub fn value(&self, node: usize) -> f64 {
        self.values[node]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct OuterRecord {
    pub active_size: usize,
    pub cg_iterations: usize,
    pub cg_residual: f64,
    /// Quadratic objective ½ xᵀAx − bᵀx of the reduced system.
    pub energy: f64,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SolverTrace {
    pub outer: Vec<OuterRecord>,
}

/// Solution of the discrete variational inequality on the full node set.
#[derive(Clone, Debug)]
pub struct DiscreteSolution {
    /// Nodal values including the Dirichlet lifting.
    pub values: Vec<f64>,
    /// Multiplier (edge-integrated flux functional); zero away from the
    /// active Signorini nodes.
    pub multiplier: Vec<f64>,
    /// Sorted node ids with y = ψ enforced.
    pub active: Vec<usize>,
    pub iterations: usize,
    pub trace: SolverTrace,
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    /// Active-set weight c in the reclassification test
    /// y_i − ψ_i − c·λ_i/diag_i < 0.
    pub active_set_weight: f64,
    pub max_outer: usize,
    /// Relative residual tolerance of the inner CG solves.
    pub linear_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            active_set_weight: 1.0,
            max_outer: 100,
            linear_tol: 1e-13,
        }
    }
}

struct CgOutcome {
    x: Vec<f64>,
    iterations: usize,
    relative_residual: f64,
}

/// Preconditioned CG on the subspace of unpinned dofs; pinned dofs are
/// held at their prescribed values. Jacobi preconditioning, iteration cap
/// 20·n.
fn cg_pinned(
    a: &SymmetricSparseOperator,
    b: &[f64],
    pinned: &[bool],
    pinned_values: &[f64],
    tol: f64,
) -> Result<CgOutcome, SolverError> {
    let n = a.n();
    let mut x = vec![0.0; n];
    for i in 0..n {
        if pinned[i] {
            x[i] = pinned_values[i];
        }
    }
    let free_count = pinned.iter().filter(|&&p| !p).count();
    if free_count == 0 {
        return Ok(CgOutcome {
            x,
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let diag = a.diagonal();
    let precond = |r: &[f64], z: &mut [f64]| {
        for i in 0..n {
            z[i] = if pinned[i] || diag[i] == 0.0 {
                0.0
            } else {
                r[i] / diag[i]
            };
        }
    };

    let mut r = a.apply(&x);
    for i in 0..n {
        r[i] = if pinned[i] { 0.0 } else { b[i] - r[i] };
    }
    let b_norm = norm2(&r);
    if b_norm == 0.0 {
        return Ok(CgOutcome {
            x,
            iterations: 0,
            relative_residual: 0.0,
        });
    }

    let mut z = vec![0.0; n];
    precond(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let cap = 20 * free_count.max(2);
    let mut res_norm = norm2(&r);
    for iter in 1..=cap {
        a.matvec(&p, &mut ap);
        for i in 0..n {
            if pinned[i] {
                ap[i] = 0.0;
            }
        }
        let pap = dot(&p, &ap);
        if !pap.is_finite() || pap <= 0.0 {
            return Err(SolverError::NoConvergence {
                iterations: iter,
                relative_residual: res_norm / b_norm,
            });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        res_norm = norm2(&r);
        if !res_norm.is_finite() {
            return Err(SolverError::NoConvergence {
                iterations: iter,
                relative_residual: f64::INFINITY,
            });
        }
        if res_norm <= tol * b_norm {
            return Ok(CgOutcome {
                x,
                iterations: iter,
                relative_residual: res_norm / b_norm,
            });
        }
        precond(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(SolverError::NoConvergence {
        iterations: cap,
        relative_residual: res_norm / b_norm,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solve the SPD system A x = b by diagonally preconditioned conjugate
/// gradients to relative residual `tol`.
pub fn solve_spd(
    a: &SymmetricSparseOperator,
    b: &[f64],
    tol: f64,
) -> Result<Vec<f64>, SolverError> {
    assert!(tol > 0.0 && tol < 1.0, "tolerance must be in (0, 1)");
    let pinned = vec![false; a.n()];
    let zeros = vec![0.0; a.n()];
    cg_pinned(a, b, &pinned, &zeros, tol).map(|out| out.x)
}

/// Solve the discrete Signorini problem by the primal-dual active-set
/// method. `a` and `b` are the unreduced operator and load; the Dirichlet
/// reduction happens internally.
pub fn solve_signorini(
    a: &SymmetricSparseOperator,
    b: &[f64],
    partition: &DofPartition,
    obstacle: &ObstacleData,
    opts: &SolveOptions,
) -> Result<DiscreteSolution, SolverError> {
    let reduced = reduce_dirichlet(a, b, partition);
    let m = reduced.matrix.n();
    let mut trace = SolverTrace::default();

    // Degenerate input: everything Dirichlet.
    if m == 0 {
        let values = reduced.lifting.clone();
        return Ok(finish(a, b, values, Vec::new(), 0, trace));
    }

    let sig_reduced: Vec<usize> = partition
        .signorini
        .iter()
        .map(|&i| reduced.full_to_reduced[i].expect("Signorini node survived reduction"))
        .collect();
    let psi_reduced = {
        let mut psi = vec![0.0; m];
        for (&full, &red) in partition.signorini.iter().zip(&sig_reduced) {
            psi[red] = obstacle.value(full);
        }
        psi
    };

    // Without Signorini nodes the problem is a single linear solve.
    if sig_reduced.is_empty() {
        let pinned = vec![false; m];
        let out = cg_pinned(&reduced.matrix, &reduced.rhs, &pinned, &psi_reduced, opts.linear_tol)?;
        trace.outer.push(OuterRecord {
            active_size: 0,
            cg_iterations: out.iterations,
            cg_residual: out.relative_residual,
            energy: reduced_energy(&reduced.matrix, &reduced.rhs, &out.x),
        });
        let values = reduced.scatter(&out.x);
        return Ok(finish(a, b, values, Vec::new(), 1, trace));
    }

    let diag = reduced.matrix.diagonal();
    let c = opts.active_set_weight;
    // Start from full contact. Releasing nodes relaxes the equality
    // constraints, so the quadratic objective is non-increasing along the
    // outer iterations; an empty start would begin at the unconstrained
    // minimizer instead.
    let mut active = vec![false; m];
    for &i in &sig_reduced {
        active[i] = true;
    }
    let mut previous_active: Vec<usize> = Vec::new();
    let mut x = vec![0.0; m];
    let mut outer_done = 0;

    for outer in 1..=opts.max_outer {
        let out = cg_pinned(&reduced.matrix, &reduced.rhs, &active, &psi_reduced, opts.linear_tol)?;
        x = out.x;
        let residual = {
            let mut r = reduced.matrix.apply(&x);
            for (ri, bi) in r.iter_mut().zip(&reduced.rhs) {
                *ri -= bi;
            }
            r
        };
        let mut next = vec![false; m];
        for &i in &sig_reduced {
            let lambda = if active[i] { residual[i] } else { 0.0 };
            // Exact zero of the indicator classifies as inactive.
            if x[i] - psi_reduced[i] - c * lambda / diag[i] < 0.0 {
                next[i] = true;
            }
        }
        trace.outer.push(OuterRecord {
            active_size: active.iter().filter(|&&a| a).count(),
            cg_iterations: out.iterations,
            cg_residual: out.relative_residual,
            energy: reduced_energy(&reduced.matrix, &reduced.rhs, &x),
        });
        outer_done = outer;
        if next == active {
            let active_full: Vec<usize> = partition
                .signorini
                .iter()
                .zip(&sig_reduced)
                .filter(|(_, &r)| active[r])
                .map(|(&f, _)| f)
                .collect();
            let values = reduced.scatter(&x);
            return Ok(finish(a, b, values, active_full, outer_done, trace));
        }
        previous_active = active_set_ids(partition, &sig_reduced, &active);
        active = next;
    }

    let _ = x;
    Err(SolverError::CycleDetected {
        iterations: outer_done,
        last_active: active_set_ids(partition, &sig_reduced, &active),
        previous_active,
    })
}

fn active_set_ids(partition: &DofPartition, sig_reduced: &[usize], active: &[bool]) -> Vec<usize> {
    partition
        .signorini
        .iter()
        .zip(sig_reduced)
        .filter(|(_, &r)| active[r])
        .map(|(&f, _)| f)
        .collect()
}

fn reduced_energy(a: &SymmetricSparseOperator, b: &[f64], x: &[f64]) -> f64 {
    let ax = a.apply(x);
    0.5 * dot(x, &ax) - dot(b, x)
}

fn finish(
    a: &SymmetricSparseOperator,
    b: &[f64],
    values: Vec<f64>,
    active: Vec<usize>,
    iterations: usize,
    trace: SolverTrace,
) -> DiscreteSolution {
    let mut multiplier = vec![0.0; a.n()];
    let residual = a.apply(&values);
    for &i in &active {
        multiplier[i] = residual[i] - b[i];
    }
    DiscreteSolution {
        values,
        multiplier,
        active,
        iterations,
        trace,
    }
}

/// Primal, dual and complementarity residuals recomputed from scratch.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct KktResiduals {
    pub primal: f64,
    pub dual: f64,
    pub complementarity: f64,
    pub primal_scaled: f64,
    pub dual_scaled: f64,
    pub complementarity_scaled: f64,
}

impl KktResiduals {
    pub fn max_scaled(&self) -> f64 {
        self.primal_scaled
            .max(self.dual_scaled)
            .max(self.complementarity_scaled)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_scaled() <= tol
    }
}

/// Recompute the three complementarity residuals of a solution from the
/// full operator and load, independently of any solver state.
pub fn kkt_residuals(
    sol: &DiscreteSolution,
    a: &SymmetricSparseOperator,
    b: &[f64],
    partition: &DofPartition,
    obstacle: &ObstacleData,
) -> KktResiduals {
    let residual = {
        let mut r = a.apply(&sol.values);
        for i in 0..r.len() {
            r[i] -= b[i];
        }
        r
    };
    let mut primal = 0.0f64;
    let mut dual = 0.0f64;
    let mut comp = 0.0f64;
    for &i in &partition.signorini {
        let gap = sol.values[i] - obstacle.value(i);
        let lambda = residual[i];
        primal = primal.max(-gap);
        dual = dual.max(-lambda);
        comp = comp.max((gap * lambda).abs());
    }
    let y_scale = sol
        .values
        .iter()
        .chain(obstacle.values())
        .fold(1.0f64, |m, v| m.max(v.abs()));
    let ay = a.apply(&sol.values);
    let f_scale = b
        .iter()
        .chain(&ay)
        .fold(1.0f64, |m, v| m.max(v.abs()));
    KktResiduals {
        primal,
        dual,
        complementarity: comp,
        primal_scaled: primal / y_scale,
        dual_scaled: dual / f_scale,
        complementarity_scaled: comp / (y_scale * f_scale),
    }
}
