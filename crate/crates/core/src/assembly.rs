//! P1 finite element assembly: stiffness operator, boundary and volume
//! loads, degree-of-freedom partition and Dirichlet reduction.
//!
//! Assembly runs single-threaded in triangle order, so results are
//! bitwise reproducible run to run.

use crate::field::VolumeLoad;
use crate::geometry::{BoundarySpec, ConditionTag, Point};
use crate::mesh::{triangle_area, TriMesh};
use crate::quad::{edge_gauss_3, TRI_MIDEDGE};

/// Sparse symmetric operator storing the lower triangle (including the
/// diagonal) in CSR layout and applying it symmetrically.
#[derive(Clone, Debug)]
pub struct SymmetricSparseOperator {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SymmetricSparseOperator {
    /// Build from a fixed sparsity pattern given as per-row sorted column
    /// lists (lower triangle only).
    pub(crate) fn with_pattern(lower: Vec<Vec<usize>>) -> Self {
        let n = lower.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        row_ptr.push(0);
        for cols in &lower {
            col_idx.extend_from_slice(cols);
            row_ptr.push(col_idx.len());
        }
        let nnz = col_idx.len();
        SymmetricSparseOperator {
            n,
            row_ptr,
            col_idx,
            values: vec![0.0; nnz],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn stored_entries(&self) -> usize {
        self.col_idx.len()
    }

    pub(crate) fn add(&mut self, i: usize, j: usize, v: f64) {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        let lo = self.row_ptr[r];
        let hi = self.row_ptr[r + 1];
        let k = self.col_idx[lo..hi]
            .binary_search(&c)
            .expect("entry outside assembled pattern");
        self.values[lo + k] += v;
    }

    /// Stored or mirrored entry value; zero outside the pattern.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        let lo = self.row_ptr[r];
        let hi = self.row_ptr[r + 1];
        match self.col_idx[lo..hi].binary_search(&c) {
            Ok(k) => self.values[lo + k],
            Err(_) => 0.0,
        }
    }

    /// y = A x using the symmetric half-storage.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        y.fill(0.0);
        for i in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[k];
                let v = self.values[k];
                acc += v * x[j];
                if j != i {
                    y[j] += v * x[i];
                }
            }
            y[i] += acc;
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec(x, &mut y);
        y
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Extract the symmetric submatrix over `kept` (sorted node ids).
    /// Reduced indices are monotone in the node ids, so stored
    /// lower-triangle entries stay lower-triangle.
    pub fn submatrix(&self, kept: &[usize], full_to_reduced: &[Option<usize>]) -> Self {
        let mut lower: Vec<Vec<usize>> = vec![Vec::new(); kept.len()];
        for (r, &i) in kept.iter().enumerate() {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                if let Some(c) = full_to_reduced[self.col_idx[k]] {
                    debug_assert!(c <= r);
                    lower[r].push(c);
                }
            }
        }
        for cols in &mut lower {
            cols.sort_unstable();
        }
        let mut out = SymmetricSparseOperator::with_pattern(lower);
        for (r, &i) in kept.iter().enumerate() {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                if let Some(c) = full_to_reduced[self.col_idx[k]] {
                    out.add(r, c, self.values[k]);
                }
            }
        }
        out
    }

    /// Debug dump in coordinate format, one `row col value` per line
    /// (stored lower triangle).
    pub fn to_coo_text(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                writeln!(out, "{} {} {}", i, self.col_idx[k], self.values[k]).unwrap();
            }
        }
        out
    }
}

/// Gradients of the three P1 basis functions on a triangle, and its area.
fn p1_gradients(a: Point, b: Point, c: Point) -> ([Point; 3], f64) {
    let area = triangle_area(a, b, c);
    let s = 1.0 / (2.0 * area);
    let g0 = Point::new(b.y - c.y, c.x - b.x) * s;
    let g1 = Point::new(c.y - a.y, a.x - c.x) * s;
    let g2 = Point::new(a.y - b.y, b.x - a.x) * s;
    ([g0, g1, g2], area)
}

/// Stiffness operator A_ij = Σ_T ∫_T ∇φ_i · ∇φ_j, assembled in triangle
/// order with exact constant-gradient integration.
pub fn stiffness(mesh: &TriMesh) -> SymmetricSparseOperator {
    let n = mesh.node_count();
    let mut lower: Vec<Vec<usize>> = vec![Vec::new(); n];
    for tri in mesh.triangles() {
        for &i in tri {
            for &j in tri {
                if j <= i {
                    lower[i].push(j);
                }
            }
        }
    }
    for cols in &mut lower {
        cols.sort_unstable();
        cols.dedup();
    }
    let mut a = SymmetricSparseOperator::with_pattern(lower);
    for tri in mesh.triangles() {
        let (g, area) = p1_gradients(
            mesh.nodes()[tri[0]],
            mesh.nodes()[tri[1]],
            mesh.nodes()[tri[2]],
        );
        for r in 0..3 {
            for c in 0..=r {
                a.add(tri[r], tri[c], area * g[r].dot(g[c]));
            }
        }
    }
    a
}

/// Boundary flux load b_i = ∫ u φ_i over control segments (and any
/// Neumann segment carrying a datum), by edge Gauss quadrature exact for
/// the declared polynomial degrees.
pub fn load_control(mesh: &TriMesh, spec: &BoundarySpec) -> Vec<f64> {
    let mut b = vec![0.0; mesh.node_count()];
    for e in mesh.boundary() {
        let seg = &spec.segments[e.segment];
        let has_data = seg.data.is_some();
        let integrate = match e.tag {
            ConditionTag::Control => true,
            ConditionTag::Neumann => has_data,
            _ => false,
        };
        if !integrate {
            continue;
        }
        let pa = mesh.nodes()[e.nodes[0]];
        let pb = mesh.nodes()[e.nodes[1]];
        let len = pa.dist(pb);
        for (t, w) in edge_gauss_3() {
            let p = pa + (pb - pa) * t;
            let u = spec.segment_datum(e.segment, e.poly_edge, p);
            b[e.nodes[0]] += len * w * u * (1.0 - t);
            b[e.nodes[1]] += len * w * u * t;
        }
    }
    b
}

/// Volume load b_i = Σ_T ∫_T f φ_i by the 3-point mid-edge rule (exact
/// for quadratic f).
pub fn load_volume(mesh: &TriMesh, f: &VolumeLoad) -> Vec<f64> {
    let mut b = vec![0.0; mesh.node_count()];
    for tri in mesh.triangles() {
        let pa = mesh.nodes()[tri[0]];
        let pb = mesh.nodes()[tri[1]];
        let pc = mesh.nodes()[tri[2]];
        let area = triangle_area(pa, pb, pc);
        for (bary, w) in TRI_MIDEDGE {
            let p = pa * bary[0] + pb * bary[1] + pc * bary[2];
            let fv = f.eval(p);
            for k in 0..3 {
                b[tri[k]] += area * w * fv * bary[k];
            }
        }
    }
    b
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DofClass {
    Dirichlet,
    Signorini,
    Free,
}

/// Partition of the mesh nodes into Dirichlet, Signorini and free sets,
/// with the Dirichlet lifting values.
///
/// A node where the Dirichlet and Signorini boundaries meet counts as
/// Dirichlet; a node where Neumann or control meets Signorini counts as
/// Signorini.
#[derive(Clone, Debug)]
pub struct DofPartition {
    pub class: Vec<DofClass>,
    pub dirichlet: Vec<usize>,
    pub signorini: Vec<usize>,
    pub free: Vec<usize>,
    /// Full-length lifting vector; zero away from Dirichlet nodes.
    pub lifting: Vec<f64>,
}

pub fn partition_dofs(mesh: &TriMesh, spec: &BoundarySpec) -> DofPartition {
    let n = mesh.node_count();
    let mut class = vec![DofClass::Free; n];
    let mut lifting = vec![0.0; n];
    // (segment, poly_edge) carrying the Dirichlet datum for each node;
    // the lowest segment index wins at junctions.
    let mut dir_source: Vec<Option<(usize, usize)>> = vec![None; n];

    for e in mesh.boundary() {
        for &v in &e.nodes {
            match e.tag {
                ConditionTag::Dirichlet => {
                    class[v] = DofClass::Dirichlet;
                    let candidate = (e.segment, e.poly_edge);
                    if dir_source[v].is_none_or(|cur| candidate < cur) {
                        dir_source[v] = Some(candidate);
                    }
                }
                ConditionTag::Signorini if class[v] != DofClass::Dirichlet => {
                    class[v] = DofClass::Signorini;
                }
                _ => {}
            }
        }
    }
    // A Signorini tag seen before a Dirichlet tag must not stick.
    for e in mesh.boundary() {
        if e.tag == ConditionTag::Dirichlet {
            for &v in &e.nodes {
                class[v] = DofClass::Dirichlet;
            }
        }
    }

    let mut dirichlet = Vec::new();
    let mut signorini = Vec::new();
    let mut free = Vec::new();
    for v in 0..n {
        match class[v] {
            DofClass::Dirichlet => {
                let (seg, pe) = dir_source[v].expect("Dirichlet node without source edge");
                lifting[v] = spec.dirichlet_value(seg, pe, mesh.nodes()[v]);
                dirichlet.push(v);
            }
            DofClass::Signorini => signorini.push(v),
            DofClass::Free => free.push(v),
        }
    }
    DofPartition {
        class,
        dirichlet,
        signorini,
        free,
        lifting,
    }
}

/// The Dirichlet-reduced system: rows and columns of Dirichlet nodes are
/// eliminated and the right-hand side picks up -A·g_D.
#[derive(Clone, Debug)]
pub struct ReducedSystem {
    pub matrix: SymmetricSparseOperator,
    pub rhs: Vec<f64>,
    /// kept[r] = full node id of reduced dof r (sorted ascending).
    pub kept: Vec<usize>,
    pub full_to_reduced: Vec<Option<usize>>,
    /// Full-length lifting vector (g_D at Dirichlet nodes, zero elsewhere).
    pub lifting: Vec<f64>,
}

impl ReducedSystem {
    /// Scatter a reduced vector back to all mesh nodes, inserting the
    /// lifting values at Dirichlet nodes.
    pub fn scatter(&self, x: &[f64]) -> Vec<f64> {
        let mut full = self.lifting.clone();
        for (r, &i) in self.kept.iter().enumerate() {
            full[i] = x[r];
        }
        full
    }
}

pub fn reduce_dirichlet(
    a: &SymmetricSparseOperator,
    b: &[f64],
    partition: &DofPartition,
) -> ReducedSystem {
    let n = a.n();
    assert_eq!(b.len(), n);
    let mut full_to_reduced = vec![None; n];
    let mut kept = Vec::with_capacity(n - partition.dirichlet.len());
    for (v, slot) in full_to_reduced.iter_mut().enumerate() {
        if partition.class[v] != DofClass::Dirichlet {
            *slot = Some(kept.len());
            kept.push(v);
        }
    }
    let matrix = a.submatrix(&kept, &full_to_reduced);
    let correction = a.apply(&partition.lifting);
    let rhs: Vec<f64> = kept.iter().map(|&i| b[i] - correction[i]).collect();
    ReducedSystem {
        matrix,
        rhs,
        kept,
        full_to_reduced,
        lifting: partition.lifting.clone(),
    }
}
