//! Discretization shared by both steppers.
//!
//! Displacement dofs split into prescribed dofs `P`, free dofs touching the
//! interface `I` and the remaining interior bulk dofs `B`. The bulk operator
//! `Q` is quadratic only, so `B` is eliminated once per run and every step
//! solves a QP in `u_I` (plus the free slips for the plasticity model).

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::fem::{self, SignoriniRow, SparseSpdMatrix};
use crate::model::{Mesh, ModelKind, Scenario};
use crate::qp::{self, Constraint, QpProblem, QpSummary};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    Prescribed(usize),
    Interface(usize),
    Interior(usize),
}

/// Prescribed component: dof, Dirichlet load index, component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrescribedDof {
    pub dof: usize,
    pub load: usize,
    pub component: usize,
}

pub struct Discretization {
    pub stiffness: SparseSpdMatrix,
    pub viscosity: SparseSpdMatrix,
    /// `K + D/τ` for the viscous stepper, `K` otherwise.
    bulk_operator: SparseSpdMatrix,
    pub prescribed: Vec<PrescribedDof>,
    pub interface_dofs: Vec<usize>,
    pub interior_dofs: Vec<usize>,
    roles: Vec<Role>,
    interior_chol: Option<Cholesky<f64, Dyn>>,
    /// `Q_BB⁻¹ Q_BI`.
    coupling: DMatrix<f64>,
    /// `Q_II - Q_IB Q_BB⁻¹ Q_BI`.
    condensed: DMatrix<f64>,
    pub signorini: Vec<SignoriniRow>,
    pub lumped: Vec<f64>,
    pub tau: f64,
    pub viscous: bool,
}

/// Data of one displacement (and slip) solve.
#[derive(Debug, Clone)]
pub struct DisplacementSolve {
    pub u: Vec<f64>,
    pub pi: Option<Vec<f64>>,
    pub qp: QpSummary,
    /// Contact pressure per interface node, compressive positive (Pa).
    pub contact_pressure: Vec<f64>,
    /// Inequality rows active at the solution, for warm starts.
    pub active: Vec<usize>,
}

/// Frozen fields and reference values of one step.
pub struct StepInput<'a> {
    pub z: &'a [f64],
    pub u_old: &'a [f64],
    pub pi_old: Option<&'a [f64]>,
    pub time: f64,
    pub warm: Option<&'a [usize]>,
    /// Slip-only operators: hardening on the lumped weights and the gradient term.
    pub slip: Option<SlipTerms<'a>>,
}

pub struct SlipTerms<'a> {
    pub kappa_h: f64,
    pub sigma_yield: f64,
    pub gradient: &'a SparseSpdMatrix,
    /// Nodes whose slip cannot move.
    pub frozen: &'a [bool],
}

impl Discretization {
    pub fn new(scenario: &Scenario) -> Result<Self> {
        let mesh = &scenario.mesh;
        let n_u = mesh.n_dofs();
        let stiffness = fem::assemble_stiffness(mesh, &scenario.bulk)?;
        let viscosity = stiffness.scaled(scenario.bulk.relaxation_time);
        let tau = scenario.load.tau;
        let viscous = scenario.model == ModelKind::Lebim && !scenario.bulk.is_inviscid();
        let bulk_operator = if viscous {
            SparseSpdMatrix::from_triplets(
                n_u,
                stiffness.triplets().chain(viscosity.triplets().map(|(i, j, v)| (i, j, v / tau))),
            )
        } else {
            stiffness.clone()
        };

        let mut prescribed_by: Vec<Option<(usize, usize)>> = vec![None; n_u];
        for (l, load) in scenario.load.dirichlet.iter().enumerate() {
            let group = mesh
                .node_groups
                .get(&load.group)
                .ok_or_else(|| Error::Scenario(format!("unknown node group '{}'", load.group)))?;
            for &node in group {
                for c in 0..2 {
                    if load.components[c] {
                        prescribed_by[2 * node + c] = Some((l, c));
                    }
                }
            }
        }
        let mut touches = vec![false; n_u];
        for seg in &mesh.interface.segments {
            for e in 0..2 {
                for c in 0..2 {
                    touches[2 * seg.plus[e] + c] = true;
                    if let Some(m) = seg.minus {
                        touches[2 * m[e] + c] = true;
                    }
                }
            }
        }
        let mut roles = Vec::with_capacity(n_u);
        let (mut prescribed, mut interface_dofs, mut interior_dofs) = (Vec::new(), Vec::new(), Vec::new());
        for dof in 0..n_u {
            roles.push(match prescribed_by[dof] {
                Some((load, component)) => {
                    prescribed.push(PrescribedDof { dof, load, component });
                    Role::Prescribed(prescribed.len() - 1)
                }
                None if touches[dof] => {
                    interface_dofs.push(dof);
                    Role::Interface(interface_dofs.len() - 1)
                }
                None => {
                    interior_dofs.push(dof);
                    Role::Interior(interior_dofs.len() - 1)
                }
            });
        }

        let q_ii = bulk_operator.block(&interface_dofs, &interface_dofs);
        let (interior_chol, coupling, condensed) = if interior_dofs.is_empty() {
            (None, DMatrix::zeros(0, interface_dofs.len()), q_ii)
        } else {
            let q_bb = bulk_operator.block(&interior_dofs, &interior_dofs);
            let chol = Cholesky::new(q_bb).ok_or_else(|| {
                Error::Scenario("interior bulk operator is singular: supports do not remove rigid motions".into())
            })?;
            let q_bi = bulk_operator.block(&interior_dofs, &interface_dofs);
            let y = chol.solve(&q_bi);
            let s = &q_ii - q_bi.transpose() * &y;
            let s = (&s + s.transpose()) * 0.5;
            (Some(chol), y, s)
        };

        Ok(Discretization {
            stiffness,
            viscosity,
            bulk_operator,
            prescribed,
            interface_dofs,
            interior_dofs,
            roles,
            interior_chol,
            coupling,
            condensed,
            signorini: fem::signorini_rows(mesh),
            lumped: mesh.interface.lumped_weights(),
            tau,
            viscous,
        })
    }

    pub fn n_dofs(&self) -> usize {
        self.roles.len()
    }

    /// Prescribed displacement field (zero on free dofs) at time `t`.
    pub fn prescribed_field(&self, scenario: &Scenario, t: f64) -> Vec<f64> {
        let mut u = vec![0.0; self.n_dofs()];
        for p in &self.prescribed {
            u[p.dof] = scenario.load.dirichlet[p.load].value(t)[p.component];
        }
        u
    }

    /// Minimizes the incremental functional with damage frozen at `input.z`.
    pub fn solve(&self, scenario: &Scenario, input: &StepInput<'_>) -> Result<DisplacementSolve> {
        let mesh = &scenario.mesh;
        let law = &scenario.law;
        let n_u = self.n_dofs();
        let n_i = self.interface_dofs.len();
        let n_s = mesh.interface.nodes.len();
        let with_slip = input.slip.is_some();
        let slip_free: Vec<usize> = match &input.slip {
            Some(s) => (0..n_s).filter(|&j| !s.frozen[j]).collect(),
            None => Vec::new(),
        };
        let n_pf = slip_free.len();
        let pi_old: Vec<f64> = input.pi_old.map_or_else(|| vec![0.0; n_s], <[f64]>::to_vec);

        let u_p = self.prescribed_field(scenario, input.time);
        // Linear term of the bulk functional over all dofs.
        let mut c_full = fem::assemble_neumann(mesh, &scenario.load.neumann, input.time) * -1.0;
        if self.viscous {
            let du = self.viscosity.mul_vec(input.u_old);
            for (c, d) in c_full.iter_mut().zip(&du) {
                *c -= d / self.tau;
            }
        }
        let q_up = self.bulk_operator.mul_vec(&u_p);
        for dof in 0..n_u {
            if !matches!(self.roles[dof], Role::Prescribed(_)) {
                c_full[dof] += q_up[dof];
            }
        }

        let adhesive = fem::assemble_adhesive_joint(mesh, law, input.z, with_slip);
        // Known part of the extended vector: prescribed dofs and frozen slips.
        let mut known = u_p.clone();
        if with_slip {
            known.extend(pi_old.iter().copied());
            for &j in &slip_free {
                known[n_u + j] = 0.0;
            }
        }
        let adh_known = adhesive.mul_vec(&known);

        let n = n_i + n_pf;
        let mut h = DMatrix::zeros(n, n);
        h.view_mut((0, 0), (n_i, n_i)).copy_from(&self.condensed);
        let mut var_of = vec![usize::MAX; adhesive.dim()];
        for (k, &dof) in self.interface_dofs.iter().enumerate() {
            var_of[dof] = k;
        }
        for (k, &j) in slip_free.iter().enumerate() {
            var_of[n_u + j] = n_i + k;
        }
        for (i, j, v) in adhesive.triplets() {
            let (a, b) = (var_of[i], var_of[j]);
            if a != usize::MAX && b != usize::MAX {
                h[(a, b)] += v;
            }
        }

        let mut g = DVector::zeros(n);
        let c_b = DVector::from_iterator(self.interior_dofs.len(), self.interior_dofs.iter().map(|&d| c_full[d]));
        for (k, &dof) in self.interface_dofs.iter().enumerate() {
            g[k] = c_full[dof] + adh_known[dof];
        }
        if !self.interior_dofs.is_empty() {
            g.rows_mut(0, n_i).axpy(-1.0, &(self.coupling.transpose() * &c_b), 1.0);
        }

        let mut l1 = Vec::new();
        if let Some(s) = &input.slip {
            let known_slip: Vec<f64> = (0..n_s).map(|j| if s.frozen[j] { pi_old[j] } else { 0.0 }).collect();
            let grad_known = s.gradient.mul_vec(&known_slip);
            for (k, &j) in slip_free.iter().enumerate() {
                let v = n_i + k;
                h[(v, v)] += s.kappa_h * self.lumped[j];
                for (jj, gv) in s.gradient.row(j) {
                    if !s.frozen[jj] {
                        h[(v, var_of[n_u + jj])] += gv;
                    }
                }
                g[v] = adh_known[n_u + j] + grad_known[j];
                l1.push((v, s.sigma_yield * self.lumped[j]));
            }
        }

        // Non-penetration rows over free interface dofs.
        let mut rows = Vec::with_capacity(self.signorini.len());
        let mut row_node = Vec::with_capacity(self.signorini.len());
        let mut row_norm = Vec::with_capacity(self.signorini.len());
        for r in &self.signorini {
            let mut coeffs = Vec::new();
            let mut rhs = 0.0;
            for &(dof, a) in &r.coeffs {
                match self.roles[dof] {
                    Role::Interface(k) => coeffs.push((k, a)),
                    Role::Prescribed(_) => rhs -= a * u_p[dof],
                    Role::Interior(_) => unreachable!("interface dofs are never interior"),
                }
            }
            if coeffs.is_empty() {
                continue;
            }
            row_norm.push(coeffs.iter().map(|&(_, a)| a * a).sum::<f64>().sqrt());
            row_node.push(r.interface_node);
            rows.push(Constraint::new(coeffs, rhs));
        }
        let n_rows = rows.len();

        let mut x0 = DVector::zeros(n);
        for (k, &dof) in self.interface_dofs.iter().enumerate() {
            x0[k] = input.u_old[dof];
        }
        for (k, &j) in slip_free.iter().enumerate() {
            x0[n_i + k] = pi_old[j];
        }
        let mut problem = QpProblem::new(h, g);
        problem.ineq = rows;
        problem.initial_point = Some(x0.clone());
        problem.warm_start = input.warm.map(|w| w.iter().copied().filter(|&i| i < n_rows).collect());

        let (x, sol) = if with_slip {
            let split = qp::split_l1(&problem, &l1, &x0)?;
            split.solve(qp::DEFAULT_TOL_KKT)?
        } else {
            let sol = qp::solve_qp(&problem, qp::DEFAULT_TOL_KKT)?;
            (sol.x.clone(), sol)
        };

        let mut u = u_p;
        let x_i = x.rows(0, n_i).into_owned();
        for (k, &dof) in self.interface_dofs.iter().enumerate() {
            u[dof] = x_i[k];
        }
        if let Some(chol) = &self.interior_chol {
            let u_b = -(chol.solve(&c_b) + &self.coupling * &x_i);
            for (k, &dof) in self.interior_dofs.iter().enumerate() {
                u[dof] = u_b[k];
            }
        }
        let pi = input.slip.as_ref().map(|_| {
            let mut p = pi_old.clone();
            for (k, &j) in slip_free.iter().enumerate() {
                p[j] = x[n_i + k];
            }
            p
        });

        let mut contact_pressure = vec![0.0; n_s];
        for r in 0..n_rows {
            let force = sol.ineq_multipliers[r] / row_norm[r];
            contact_pressure[row_node[r]] += force / self.lumped[row_node[r]];
        }
        let active = sol.active_set.iter().copied().filter(|&i| i < n_rows).collect();
        Ok(DisplacementSolve { u, pi, qp: QpSummary::from(&sol), contact_pressure, active })
    }

    /// Gradient of the stored and viscous energy on the prescribed dofs,
    /// i.e. the force the supports exert to hold the prescribed displacements.
    pub fn prescribed_forces(
        &self,
        mesh: &Mesh,
        scenario: &Scenario,
        z: &[f64],
        u: &[f64],
        u_old: &[f64],
        pi: Option<&[f64]>,
    ) -> Vec<f64> {
        let ku = self.stiffness.mul_vec(u);
        let du: Vec<f64> = u.iter().zip(u_old).map(|(a, b)| a - b).collect();
        let dv = if self.viscous { self.viscosity.mul_vec(&du) } else { vec![0.0; u.len()] };
        let adhesive = fem::assemble_adhesive_joint(mesh, &scenario.law, z, pi.is_some());
        let mut ext = u.to_vec();
        if let Some(p) = pi {
            ext.extend_from_slice(p);
        }
        let au = adhesive.mul_vec(&ext);
        self.prescribed.iter().map(|p| ku[p.dof] + dv[p.dof] / self.tau + au[p.dof]).collect()
    }
}
