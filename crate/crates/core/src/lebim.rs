//! Brittle interface with mode-dependent fracture energy: one viscoelastic
//! displacement solve with frozen damage, then an explicit damage update.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fem;
use crate::laws;
use crate::model::{AlphaEvaluation, AlphaLaw, InterfaceModel, Scenario, SystemState};
use crate::qp::QpSummary;
use crate::stepping::{Discretization, DisplacementSolve, StepInput};

#[derive(Debug, Clone, Serialize)]
pub struct LebimStepReport {
    pub state_next: SystemState,
    pub newly_broken: Vec<usize>,
    pub u_qp: QpSummary,
    /// `½𝔸⟦u⟧·⟦u⟧ - a_I` at segment midpoints.
    pub driving_force: Vec<f64>,
    pub alpha_used: Vec<f64>,
    /// Energetic mixity of the jump the fracture energy was evaluated at.
    pub psi_g: Vec<Option<f64>>,
    #[serde(skip)]
    pub solve: DisplacementSolve,
}

pub fn alpha_law(scenario: &Scenario) -> Result<AlphaLaw> {
    match scenario.law.model {
        InterfaceModel::Lebim { alpha } => Ok(alpha),
        InterfaceModel::Aprim { .. } => Err(Error::WrongModel { expected: "brittle" }),
    }
}

/// Advances `state` from step `k - 1` to step `k`.
pub fn step_lebim(
    disc: &Discretization,
    scenario: &Scenario,
    state: &SystemState,
    k: usize,
    warm: Option<&[usize]>,
) -> Result<LebimStepReport> {
    let alpha = alpha_law(scenario)?;
    let law = &scenario.law;
    let t = scenario.load.time(k);
    let input = StepInput { z: &state.z, u_old: &state.u, pi_old: None, time: t, warm, slip: None };
    let solve = disc.solve(scenario, &input).map_err(|e| e.at_step(k))?;

    let segments = &scenario.mesh.interface.segments;
    let mut z = state.z.clone();
    let mut newly_broken = Vec::new();
    let mut driving_force = Vec::with_capacity(segments.len());
    let mut alpha_used = Vec::with_capacity(segments.len());
    let mut psi_g = Vec::with_capacity(segments.len());
    for (s, seg) in segments.iter().enumerate() {
        let (gn, gt) = fem::jump_at(seg, &solve.u, 0.5);
        let energy = 0.5 * (law.kappa_n * gn * gn + law.kappa_t * gt * gt);
        let (en, et) = match scenario.lebim_alpha_at {
            AlphaEvaluation::Current => (gn, gt),
            AlphaEvaluation::Previous => fem::jump_at(seg, &state.u, 0.5),
        };
        let (a, mix) = laws::alpha_for_jump(&alpha, en, et, law.kappa_n, law.kappa_t).map_err(|e| e.at_step(k))?;
        driving_force.push(energy - alpha.a_i());
        alpha_used.push(a);
        psi_g.push(mix.psi_g());
        if z[s] > 0.0 && energy >= a {
            z[s] = 0.0;
            newly_broken.push(s);
        }
    }
    let state_next = SystemState { u: solve.u.clone(), z, pi: None, time: t };
    Ok(LebimStepReport { state_next, newly_broken, u_qp: solve.qp, driving_force, alpha_used, psi_g, solve })
}
