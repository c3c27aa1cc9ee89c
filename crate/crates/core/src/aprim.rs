//! Interface plasticity with hardening, gradient-regularized slip and brittle
//! debonding: a joint displacement/slip solve with frozen damage, then the
//! explicit damage update.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fem::{self, SparseSpdMatrix};
use crate::model::{AprimParams, InterfaceLaw, Mesh, Scenario, SystemState};
use crate::qp::QpSummary;
use crate::stepping::{Discretization, DisplacementSolve, SlipTerms, StepInput};

/// `½ κ_G ∫ |∂π/∂s|²` on the piecewise-linear slip field.
#[derive(Debug, Clone)]
pub struct InterfaceGradientOperator {
    pub matrix: SparseSpdMatrix,
}

impl InterfaceGradientOperator {
    pub fn new(mesh: &Mesh, kappa_g: f64) -> Self {
        let n = mesh.interface.nodes.len();
        let mut trip = Vec::with_capacity(4 * mesh.interface.segments.len());
        for seg in &mesh.interface.segments {
            let k = kappa_g / seg.length;
            let [a, b] = seg.slip_nodes;
            trip.extend([(a, a, k), (b, b, k), (a, b, -k), (b, a, -k)]);
        }
        InterfaceGradientOperator { matrix: SparseSpdMatrix::from_triplets(n, trip) }
    }

    pub fn energy(&self, pi: &[f64]) -> f64 {
        0.5 * self.matrix.quad_form(pi)
    }
}

/// Gradient coefficient used when none is configured: small relative to
/// hardening over one segment.
pub fn default_kappa_g(mesh: &Mesh, kappa_h: f64) -> f64 {
    let segs = &mesh.interface.segments;
    if segs.is_empty() {
        return 0.0;
    }
    let mean = mesh.interface.total_length() / segs.len() as f64;
    1e-6 * kappa_h * mean * mean
}

/// Slip nodes all of whose adjacent segments are fully debonded.
pub fn frozen_slip_nodes(mesh: &Mesh, z: &[f64]) -> Vec<bool> {
    let mut frozen = vec![true; mesh.interface.nodes.len()];
    for (seg, &zs) in mesh.interface.segments.iter().zip(z) {
        if zs > 0.0 {
            for &j in &seg.slip_nodes {
                frozen[j] = false;
            }
        }
    }
    frozen
}

pub fn params(law: &InterfaceLaw) -> Result<&AprimParams> {
    law.aprim_params().ok_or(Error::WrongModel { expected: "plasticity" })
}

/// Elastic energy density `½𝔸(⟦u⟧ - πt)·(⟦u⟧ - πt)` at the segment midpoint.
pub fn midpoint_energy(law: &InterfaceLaw, seg: &crate::model::InterfaceSegment, u: &[f64], pi: &[f64]) -> f64 {
    let (gn, gt) = fem::jump_at(seg, u, 0.5);
    let w = gt - fem::slip_at(seg, Some(pi), 0.5);
    0.5 * (law.kappa_n * gn * gn + law.kappa_t * w * w)
}

/// Damage driving force `ξ` per segment and slip driving force `ζ` per node.
pub fn driving_forces(state: &SystemState, law: &InterfaceLaw, mesh: &Mesh) -> Result<(Vec<f64>, Vec<f64>)> {
    let p = params(law)?;
    let pi = state.pi.as_deref().ok_or_else(|| Error::Scenario("state carries no slip field".into()))?;
    let xi = mesh.interface.segments.iter().map(|seg| midpoint_energy(law, seg, &state.u, pi) - p.a0).collect();

    let n_u = mesh.n_dofs();
    let joint = fem::assemble_adhesive_joint(mesh, law, &state.z, true);
    let mut ext = state.u.clone();
    ext.extend_from_slice(pi);
    let grad_adh = joint.mul_vec(&ext);
    let grad_g = InterfaceGradientOperator::new(mesh, p.kappa_g).matrix.mul_vec(pi);
    let lumped = mesh.interface.lumped_weights();
    let zeta = (0..pi.len())
        .map(|j| -(grad_adh[n_u + j] + p.kappa_h * lumped[j] * pi[j] + grad_g[j]) / lumped[j])
        .collect();
    Ok((xi, zeta))
}

#[derive(Debug, Clone, Serialize)]
pub struct AprimStepReport {
    pub state_next: SystemState,
    pub newly_broken: Vec<usize>,
    pub joint_qp: QpSummary,
    pub xi: Vec<f64>,
    pub zeta: Vec<f64>,
    #[serde(skip)]
    pub solve: DisplacementSolve,
}

/// Advances `state` from step `k - 1` to step `k`.
pub fn step_aprim(
    disc: &Discretization,
    gradient: &InterfaceGradientOperator,
    scenario: &Scenario,
    state: &SystemState,
    k: usize,
    warm: Option<&[usize]>,
) -> Result<AprimStepReport> {
    let law = &scenario.law;
    let p = params(law)?;
    let mesh = &scenario.mesh;
    let t = scenario.load.time(k);
    let pi_old = state.pi.as_deref().ok_or_else(|| Error::Scenario("state carries no slip field".into()))?;
    let frozen = frozen_slip_nodes(mesh, &state.z);
    let slip = SlipTerms { kappa_h: p.kappa_h, sigma_yield: p.sigma_yield, gradient: &gradient.matrix, frozen: &frozen };
    let input = StepInput { z: &state.z, u_old: &state.u, pi_old: Some(pi_old), time: t, warm, slip: Some(slip) };
    let solve = disc.solve(scenario, &input).map_err(|e| e.at_step(k))?;
    let pi = solve.pi.clone().expect("slip solve returns a slip field");

    let mut z = state.z.clone();
    let mut newly_broken = Vec::new();
    for (s, seg) in mesh.interface.segments.iter().enumerate() {
        if z[s] > 0.0 && midpoint_energy(law, seg, &solve.u, &pi) >= p.a0 + p.a1 {
            z[s] = 0.0;
            newly_broken.push(s);
        }
    }
    let state_next = SystemState { u: solve.u.clone(), z, pi: Some(pi), time: t };
    let (xi, zeta) = driving_forces(&state_next, law, mesh)?;
    Ok(AprimStepReport { state_next, newly_broken, joint_qp: solve.qp, xi, zeta, solve })
}

/// Estimated state of a segment at the instant it debonded within a step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RuptureEstimate {
    /// Fraction of the step at which the elastic energy reached `a0 + a1`.
    pub fraction: f64,
    pub psi_g: Option<f64>,
    /// Elastic, plastic and hardening energy per unit length at rupture.
    pub fracture_energy: f64,
}

/// Linear interpolation between the end states of the breaking step.
/// `plastic_before` is the plastic dissipation already accumulated on the
/// segment (J), `plastic_step` the segment's share from this step.
pub fn rupture_estimate(
    law: &InterfaceLaw,
    seg: &crate::model::InterfaceSegment,
    prev: (&[f64], &[f64]),
    next: (&[f64], &[f64]),
    plastic_before: f64,
    plastic_step: f64,
) -> Result<RuptureEstimate> {
    let p = params(law)?;
    let parts = |u: &[f64], pi: &[f64]| {
        let (gn, gt) = fem::jump_at(seg, u, 0.5);
        (gn, gt, gt - fem::slip_at(seg, Some(pi), 0.5))
    };
    let (n0, t0, w0) = parts(prev.0, prev.1);
    let (n1, t1, w1) = parts(next.0, next.1);
    let (dn, dw) = (n1 - n0, w1 - w0);
    let a = 0.5 * (law.kappa_n * dn * dn + law.kappa_t * dw * dw);
    let b = law.kappa_n * n0 * dn + law.kappa_t * w0 * dw;
    let c = 0.5 * (law.kappa_n * n0 * n0 + law.kappa_t * w0 * w0) - p.a_i();
    let s = if c >= 0.0 {
        0.0
    } else if a > 0.0 {
        ((-b + (b * b - 4.0 * a * c).sqrt()) / (2.0 * a)).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let gn = n0 + s * dn;
    let gt = t0 + s * (t1 - t0);
    let psi_g = crate::laws::mixity(gn, gt, law.kappa_n, law.kappa_t).psi_g();
    let hardening: f64 = seg
        .slip_nodes
        .iter()
        .map(|&j| {
            let pj = prev.1[j] + s * (next.1[j] - prev.1[j]);
            0.25 * seg.length * p.kappa_h * pj * pj
        })
        .sum();
    let fracture_energy = p.a_i() + (plastic_before + s * plastic_step + hardening) / seg.length;
    Ok(RuptureEstimate { fraction: s, psi_g, fracture_energy })
}
