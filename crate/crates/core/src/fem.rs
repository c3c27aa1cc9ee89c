//! P1 finite-element operators of the bulk and the adhesive interface.
//!
//! Displacement dofs are interleaved, `2 * node + component`. Interface terms
//! are integrated with two Gauss points per segment, which is exact for the
//! products of piecewise-linear jumps and slips.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, Matrix3, SMatrix, SVector};

use crate::error::{Error, Result};
use crate::model::{BulkMaterial, InterfaceLaw, InterfaceSegment, Mesh, NeumannLoad, SystemState};

/// Symmetric matrix in compressed-row form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSpdMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseSpdMatrix {
    /// Sums duplicate entries; iteration order is row-major and deterministic.
    pub fn from_triplets(dim: usize, triplets: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let mut acc: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (i, j, v) in triplets {
            debug_assert!(i < dim && j < dim);
            *acc.entry((i, j)).or_insert(0.0) += v;
        }
        let mut row_ptr = vec![0; dim + 1];
        let mut cols = Vec::with_capacity(acc.len());
        let mut vals = Vec::with_capacity(acc.len());
        for (&(i, j), &v) in &acc {
            row_ptr[i + 1] += 1;
            cols.push(j);
            vals.push(v);
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseSpdMatrix { dim, row_ptr, cols, vals }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_triplets(dim, [])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[r.clone()].binary_search(&j) {
            Ok(k) => self.vals[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    pub fn quad_form(&self, x: &[f64]) -> f64 {
        self.mul_vec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        SparseSpdMatrix { vals: self.vals.iter().map(|v| v * s).collect(), ..self.clone() }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (i, j, v) in self.triplets() {
            m[(i, j)] = v;
        }
        m
    }

    /// Dense sub-block for the given row and column index lists.
    pub fn block(&self, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
        let mut col_pos = vec![usize::MAX; self.dim];
        for (k, &c) in cols.iter().enumerate() {
            col_pos[c] = k;
        }
        let mut m = DMatrix::zeros(rows.len(), cols.len());
        for (a, &r) in rows.iter().enumerate() {
            for (j, v) in self.row(r) {
                if col_pos[j] != usize::MAX {
                    m[(a, col_pos[j])] = v;
                }
            }
        }
        m
    }

    pub fn max_asymmetry(&self) -> f64 {
        self.triplets().map(|(i, j, v)| (v - self.get(j, i)).abs()).fold(0.0, f64::max)
    }
}

/// Gradients of the three P1 shape functions and the signed area.
fn p1_gradients(p: [[f64; 2]; 3]) -> ([[f64; 2]; 3], f64) {
    let [a, b, c] = p;
    let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
    let area = 0.5 * det;
    let grads = [
        [(b[1] - c[1]) / det, (c[0] - b[0]) / det],
        [(c[1] - a[1]) / det, (a[0] - c[0]) / det],
        [(a[1] - b[1]) / det, (b[0] - a[0]) / det],
    ];
    (grads, area)
}

/// Strain-displacement matrix for `[e_xx, e_yy, gamma_xy]`.
fn strain_matrix(grads: &[[f64; 2]; 3]) -> SMatrix<f64, 3, 6> {
    let mut b = SMatrix::<f64, 3, 6>::zeros();
    for (k, g) in grads.iter().enumerate() {
        b[(0, 2 * k)] = g[0];
        b[(1, 2 * k + 1)] = g[1];
        b[(2, 2 * k)] = g[1];
        b[(2, 2 * k + 1)] = g[0];
    }
    b
}

pub fn element_stiffness(p: [[f64; 2]; 3], c: &Matrix3<f64>, index: usize) -> Result<SMatrix<f64, 6, 6>> {
    let (grads, area) = p1_gradients(p);
    if !(area > 0.0) {
        return Err(Error::DegenerateTriangle { index, area });
    }
    let b = strain_matrix(&grads);
    Ok(b.transpose() * c * b * area)
}

fn element_coords(mesh: &Mesh, t: usize) -> [[f64; 2]; 3] {
    let [a, b, c] = mesh.triangles[t];
    [mesh.nodes[a], mesh.nodes[b], mesh.nodes[c]]
}

/// Stiffness `K` with `uᵀKu = ∫ ℂe(u):e(u)`.
pub fn assemble_stiffness(mesh: &Mesh, mat: &BulkMaterial) -> Result<SparseSpdMatrix> {
    let c = mat.stiffness_voigt();
    let mut trip = Vec::with_capacity(36 * mesh.triangles.len());
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let ke = element_stiffness(element_coords(mesh, t), &c, t)?;
        for a in 0..6 {
            for b in 0..6 {
                trip.push((2 * tri[a / 2] + a % 2, 2 * tri[b / 2] + b % 2, ke[(a, b)]));
            }
        }
    }
    Ok(SparseSpdMatrix::from_triplets(mesh.n_dofs(), trip))
}

/// Viscosity matrix `χK`.
pub fn assemble_viscosity(mesh: &Mesh, mat: &BulkMaterial) -> Result<SparseSpdMatrix> {
    Ok(assemble_stiffness(mesh, mat)?.scaled(mat.relaxation_time))
}

/// Constant strain `[e_xx, e_yy, gamma_xy]` of every triangle.
pub fn element_strains(mesh: &Mesh, u: &[f64]) -> Vec<[f64; 3]> {
    (0..mesh.triangles.len())
        .map(|t| {
            let (grads, _) = p1_gradients(element_coords(mesh, t));
            let tri = mesh.triangles[t];
            let ue = SVector::<f64, 6>::from_fn(|a, _| u[2 * tri[a / 2] + a % 2]);
            let e = strain_matrix(&grads) * ue;
            [e[0], e[1], e[2]]
        })
        .collect()
}

pub fn element_stresses(mesh: &Mesh, mat: &BulkMaterial, u: &[f64]) -> Vec<[f64; 3]> {
    let c = mat.stiffness_voigt();
    element_strains(mesh, u)
        .into_iter()
        .map(|e| {
            let s = c * nalgebra::Vector3::from(e);
            [s[0], s[1], s[2]]
        })
        .collect()
}

pub const GAUSS_2: [(f64, f64); 2] = [(0.211_324_865_405_187_1, 0.5), (0.788_675_134_594_812_9, 0.5)];

/// Linear form of one jump component at segment parameter `s`, optionally
/// minus the slip (with slip dofs starting at `pi_offset`).
fn jump_row(seg: &InterfaceSegment, dir: [f64; 2], s: f64, pi_offset: Option<usize>) -> Vec<(usize, f64)> {
    let shape = [1.0 - s, s];
    let mut row = Vec::with_capacity(10);
    for e in 0..2 {
        for c in 0..2 {
            if dir[c] == 0.0 {
                continue;
            }
            row.push((2 * seg.plus[e] + c, -shape[e] * dir[c]));
            if let Some(m) = seg.minus {
                row.push((2 * m[e] + c, shape[e] * dir[c]));
            }
        }
        if let Some(off) = pi_offset {
            row.push((off + seg.slip_nodes[e], -shape[e]));
        }
    }
    row
}

fn eval_row(row: &[(usize, f64)], x: &[f64]) -> f64 {
    row.iter().map(|&(i, v)| v * x[i]).sum()
}

/// Normal and tangential jump `⟦u⟧ = u⁻ - u⁺` at parameter `s` of a segment.
pub fn jump_at(seg: &InterfaceSegment, u: &[f64], s: f64) -> (f64, f64) {
    (eval_row(&jump_row(seg, seg.normal, s, None), u), eval_row(&jump_row(seg, seg.tangent, s, None), u))
}

pub fn slip_at(seg: &InterfaceSegment, pi: Option<&[f64]>, s: f64) -> f64 {
    pi.map_or(0.0, |p| (1.0 - s) * p[seg.slip_nodes[0]] + s * p[seg.slip_nodes[1]])
}

/// Hessian of `½∫ z 𝔸(⟦u⟧ - πt)·(⟦u⟧ - πt)` over displacement dofs followed,
/// when `with_slip`, by one slip dof per interface node.
pub fn assemble_adhesive_joint(mesh: &Mesh, law: &InterfaceLaw, z: &[f64], with_slip: bool) -> SparseSpdMatrix {
    let n_u = mesh.n_dofs();
    let off = with_slip.then_some(n_u);
    let dim = n_u + if with_slip { mesh.interface.nodes.len() } else { 0 };
    let mut trip = Vec::new();
    for (seg, &zs) in mesh.interface.segments.iter().zip(z) {
        if zs == 0.0 {
            continue;
        }
        for &(s, w) in &GAUSS_2 {
            let weight = w * seg.length * zs;
            for (dir, kappa, slip) in [(seg.normal, law.kappa_n, None), (seg.tangent, law.kappa_t, off)] {
                let row = jump_row(seg, dir, s, slip);
                for &(i, a) in &row {
                    for &(j, b) in &row {
                        trip.push((i, j, weight * kappa * a * b));
                    }
                }
            }
        }
    }
    SparseSpdMatrix::from_triplets(dim, trip)
}

/// Adhesive energy as `½uᵀAu + bᵀu + c` in the displacements for a given slip.
pub fn assemble_adhesive(
    mesh: &Mesh,
    law: &InterfaceLaw,
    z: &[f64],
    pi: Option<&[f64]>,
) -> (SparseSpdMatrix, DVector<f64>, f64) {
    let n_u = mesh.n_dofs();
    let Some(pi) = pi else {
        return (assemble_adhesive_joint(mesh, law, z, false), DVector::zeros(n_u), 0.0);
    };
    let joint = assemble_adhesive_joint(mesh, law, z, true);
    let mut uu = Vec::new();
    let mut lin = DVector::zeros(n_u);
    let mut constant = 0.0;
    for (i, j, v) in joint.triplets() {
        match (i < n_u, j < n_u) {
            (true, true) => uu.push((i, j, v)),
            (true, false) => lin[i] += v * pi[j - n_u],
            (false, false) => constant += 0.5 * v * pi[i - n_u] * pi[j - n_u],
            (false, true) => {}
        }
    }
    (SparseSpdMatrix::from_triplets(n_u, uu), lin, constant)
}

/// Adhesive energy evaluated directly by quadrature.
pub fn adhesive_energy(mesh: &Mesh, law: &InterfaceLaw, z: &[f64], u: &[f64], pi: Option<&[f64]>) -> f64 {
    mesh.interface
        .segments
        .iter()
        .zip(z)
        .map(|(seg, &zs)| {
            GAUSS_2
                .iter()
                .map(|&(s, w)| {
                    let (gn, gt) = jump_at(seg, u, s);
                    let wt = gt - slip_at(seg, pi, s);
                    0.5 * zs * w * seg.length * (law.kappa_n * gn * gn + law.kappa_t * wt * wt)
                })
                .sum::<f64>()
        })
        .sum()
}

/// One non-penetration row `n·(u⁻ - u⁺) ≥ 0` at an interface node.
#[derive(Debug, Clone, PartialEq)]
pub struct SignoriniRow {
    pub interface_node: usize,
    pub coeffs: Vec<(usize, f64)>,
}

/// Rows at every interface node, deduplicated per node and normal direction.
pub fn signorini_rows(mesh: &Mesh) -> Vec<SignoriniRow> {
    let mut seen: BTreeMap<(usize, u64, u64), ()> = BTreeMap::new();
    let mut rows = Vec::new();
    for seg in &mesh.interface.segments {
        for e in 0..2 {
            let node = seg.slip_nodes[e];
            let key = (node, seg.normal[0].to_bits(), seg.normal[1].to_bits());
            if seen.insert(key, ()).is_some() {
                continue;
            }
            let mut coeffs = Vec::with_capacity(4);
            for c in 0..2 {
                if seg.normal[c] != 0.0 {
                    coeffs.push((2 * seg.plus[e] + c, -seg.normal[c]));
                    if let Some(m) = seg.minus {
                        coeffs.push((2 * m[e] + c, seg.normal[c]));
                    }
                }
            }
            rows.push(SignoriniRow { interface_node: node, coeffs });
        }
    }
    rows.sort_by_key(|r| r.interface_node);
    rows
}

/// Nodal load vector of the surface tractions at time `t`.
pub fn assemble_neumann(mesh: &Mesh, loads: &[NeumannLoad], t: f64) -> DVector<f64> {
    let mut f = DVector::zeros(mesh.n_dofs());
    for load in loads {
        let tr = load.value(t);
        for edge in mesh.edge_groups.get(&load.group).map(Vec::as_slice).unwrap_or(&[]) {
            let (a, b) = (mesh.nodes[edge[0]], mesh.nodes[edge[1]]);
            let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
            for &n in edge {
                for c in 0..2 {
                    f[2 * n + c] += 0.5 * len * tr[c];
                }
            }
        }
    }
    f
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SegmentTraction {
    pub normal: f64,
    pub tangential: f64,
}

/// Adhesive tractions at segment midpoints, `T_n = zκ_n⟦u⟧_n`,
/// `T_t = zκ_t(⟦u⟧_t - π)`. Nodal contact pressures (compressive positive),
/// when given, are averaged onto the segment and subtracted from `T_n`.
pub fn recover_tractions(
    mesh: &Mesh,
    law: &InterfaceLaw,
    state: &SystemState,
    contact_pressure: Option<&[f64]>,
) -> Vec<SegmentTraction> {
    mesh.interface
        .segments
        .iter()
        .zip(&state.z)
        .map(|(seg, &z)| {
            let (gn, gt) = jump_at(seg, &state.u, 0.5);
            let wt = gt - slip_at(seg, state.pi.as_deref(), 0.5);
            let contact = contact_pressure.map_or(0.0, |p| 0.5 * (p[seg.slip_nodes[0]] + p[seg.slip_nodes[1]]));
            SegmentTraction { normal: z * law.kappa_n * gn - contact, tangential: z * law.kappa_t * wt }
        })
        .collect()
}
