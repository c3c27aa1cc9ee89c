//! Energy bookkeeping of a run and the a-posteriori maximum-dissipation audit.

use serde::Serialize;

use crate::aprim::{self, InterfaceGradientOperator};
use crate::error::{Error, Result};
use crate::fem;
use crate::model::{Mesh, Scenario, SystemState};
use crate::stepping::Discretization;

/// One row of `energies.csv`. Cumulative quantities start at zero at `k = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyRow {
    pub k: usize,
    pub t: f64,
    pub bulk_stored: f64,
    pub interface_stored: f64,
    pub viscous_cum: f64,
    pub delam_cum: f64,
    pub plastic_cum: f64,
    pub work_cum: f64,
    /// Stored plus dissipated.
    pub total: f64,
    /// `ΔE + ΔD - ΔW` of this step.
    pub residual: f64,
}

/// Increments of one step plus the stored energies at its end.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct LedgerStep {
    pub k: usize,
    pub t: f64,
    pub bulk_stored: f64,
    pub interface_stored: f64,
    pub viscous: f64,
    pub delamination: f64,
    pub plastic: f64,
    pub work: f64,
    pub broke: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct EnergyLedger {
    pub rows: Vec<EnergyRow>,
    /// Steps at which some segment debonded.
    pub breakage_steps: Vec<usize>,
}

impl EnergyLedger {
    /// Ledger holding only the initial row.
    pub fn start(t: f64, bulk_stored: f64, interface_stored: f64) -> Self {
        let total = bulk_stored + interface_stored;
        EnergyLedger {
            rows: vec![EnergyRow {
                k: 0,
                t,
                bulk_stored,
                interface_stored,
                viscous_cum: 0.0,
                delam_cum: 0.0,
                plastic_cum: 0.0,
                work_cum: 0.0,
                total,
                residual: 0.0,
            }],
            breakage_steps: Vec::new(),
        }
    }

    pub fn last(&self) -> &EnergyRow {
        self.rows.last().expect("ledger has an initial row")
    }

    pub fn record(&mut self, step: &LedgerStep) {
        let prev = *self.last();
        let viscous_cum = prev.viscous_cum + step.viscous;
        let delam_cum = prev.delam_cum + step.delamination;
        let plastic_cum = prev.plastic_cum + step.plastic;
        let stored = step.bulk_stored + step.interface_stored;
        let d_stored = stored - (prev.bulk_stored + prev.interface_stored);
        self.rows.push(EnergyRow {
            k: step.k,
            t: step.t,
            bulk_stored: step.bulk_stored,
            interface_stored: step.interface_stored,
            viscous_cum,
            delam_cum,
            plastic_cum,
            work_cum: prev.work_cum + step.work,
            total: stored + viscous_cum + delam_cum + plastic_cum,
            residual: d_stored + step.viscous + step.delamination + step.plastic - step.work,
        });
        if step.broke {
            self.breakage_steps.push(step.k);
        }
    }

    pub fn is_breakage_step(&self, k: usize) -> bool {
        self.breakage_steps.binary_search(&k).is_ok()
    }

    /// No debonding at `k` or in the `settle` steps before it.
    pub fn is_smooth_step(&self, k: usize, settle: usize) -> bool {
        k > 0 && (k.saturating_sub(settle)..=k).all(|j| !self.is_breakage_step(j))
    }

    /// Largest magnitude of the running total or the cumulative work.
    pub fn energy_scale(&self) -> f64 {
        self.rows.iter().map(|r| r.total.abs().max(r.work_cum.abs())).fold(0.0, f64::max)
    }

    /// Smallest `C` with `|residual_k| <= C (τ/T) scale` on all smooth steps.
    pub fn smooth_residual_constant(&self, tau: f64, horizon: f64, settle: usize) -> f64 {
        let scale = self.energy_scale() * tau / horizon;
        if scale == 0.0 {
            return 0.0;
        }
        self.rows
            .iter()
            .filter(|r| self.is_smooth_step(r.k, settle))
            .map(|r| r.residual.abs() / scale)
            .fold(0.0, f64::max)
    }
}

pub fn ledger_update(prev: &EnergyLedger, step: &LedgerStep) -> EnergyLedger {
    let mut next = prev.clone();
    next.record(step);
    next
}

/// Bulk and interface stored energy of a state.
pub fn stored_energies(
    disc: &Discretization,
    scenario: &Scenario,
    state: &SystemState,
    gradient: Option<&InterfaceGradientOperator>,
) -> (f64, f64) {
    let mesh = &scenario.mesh;
    let bulk = 0.5 * disc.stiffness.quad_form(&state.u);
    let mut iface = fem::adhesive_energy(mesh, &scenario.law, &state.z, &state.u, state.pi.as_deref());
    if let (Some(p), Some(pi)) = (scenario.law.aprim_params(), state.pi.as_deref()) {
        iface += 0.5 * p.kappa_h * pi.iter().zip(&disc.lumped).map(|(x, m)| m * x * x).sum::<f64>();
        if let Some(g) = gradient {
            iface += g.energy(pi);
        }
        iface += p.a0 * mesh.interface.segments.iter().zip(&state.z).map(|(s, z)| (1.0 - z) * s.length).sum::<f64>();
    }
    (bulk, iface)
}

/// Generalized forces at the end of a step: support reactions on the
/// prescribed dofs and the nodal surface loads on all dofs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StepForces {
    pub prescribed: Vec<f64>,
    pub external: Vec<f64>,
}

/// External work of a step, with the forces at its end: the support
/// reaction on the prescribed dofs and the surface loads elsewhere.
pub fn work_increment(disc: &Discretization, forces: &StepForces, u_prev: &[f64], u_next: &[f64]) -> f64 {
    let mut is_p = vec![false; u_prev.len()];
    let mut w = 0.0;
    for (i, p) in disc.prescribed.iter().enumerate() {
        is_p[p.dof] = true;
        w += forces.prescribed[i] * (u_next[p.dof] - u_prev[p.dof]);
    }
    for d in 0..u_prev.len() {
        if !is_p[d] {
            w += forces.external[d] * (u_next[d] - u_prev[d]);
        }
    }
    w
}

/// `ΔuᵀDΔu/τ`; zero for the inviscid stepper. Rigid increments can give a
/// roundoff-negative form, clipped to zero.
pub fn viscous_increment(disc: &Discretization, u_prev: &[f64], u_next: &[f64]) -> f64 {
    if !disc.viscous {
        return 0.0;
    }
    let du: Vec<f64> = u_next.iter().zip(u_prev).map(|(a, b)| a - b).collect();
    (disc.viscosity.quad_form(&du) / disc.tau).max(0.0)
}

/// `σ_y Σ m_j |Δπ_j|`.
pub fn plastic_increment(sigma_yield: f64, lumped: &[f64], pi_prev: &[f64], pi_next: &[f64]) -> f64 {
    sigma_yield * lumped.iter().zip(pi_prev.iter().zip(pi_next)).map(|(m, (a, b))| m * (b - a).abs()).sum::<f64>()
}

/// Debonding dissipation with per-segment fracture energies.
pub fn delamination_increment(mesh: &Mesh, energy_per_area: &[f64], z_prev: &[f64], z_next: &[f64]) -> f64 {
    mesh.interface
        .segments
        .iter()
        .enumerate()
        .map(|(s, seg)| energy_per_area[s] * (z_next[s] - z_prev[s]).abs() * seg.length)
        .sum()
}

/// Fields of one step needed by the maximum-dissipation audit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmdpRecord {
    pub k: usize,
    pub z: Vec<f64>,
    pub pi: Vec<f64>,
    pub xi: Vec<f64>,
    pub zeta: Vec<f64>,
}

/// Cumulative audit after step `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmdpRow {
    pub k: usize,
    pub z_lhs: f64,
    pub z_rhs: f64,
    pub pi_lhs: f64,
    pub pi_rhs: f64,
}

impl AmdpRow {
    pub fn z_residual(&self) -> f64 {
        (self.z_lhs - self.z_rhs).abs()
    }

    pub fn pi_residual(&self) -> f64 {
        (self.pi_lhs - self.pi_rhs).abs()
    }

    pub fn z_relative(&self) -> f64 {
        relative(self.z_residual(), self.z_lhs, self.z_rhs)
    }

    pub fn pi_relative(&self) -> f64 {
        relative(self.pi_residual(), self.pi_lhs, self.pi_rhs)
    }
}

fn relative(res: f64, a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 { 0.0 } else { res / scale }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct AmdpAudit {
    pub rows: Vec<AmdpRow>,
}

impl AmdpAudit {
    pub fn last(&self) -> Option<&AmdpRow> {
        self.rows.last()
    }
}

/// Lower-sum Stieltjes audit over a run history; `records[0]` is the
/// initial state.
pub fn amdp_audit(records: &[AmdpRecord], mesh: &Mesh, a1: f64, sigma_yield: f64) -> Result<AmdpAudit> {
    let first = records.first().ok_or_else(|| Error::Scenario("empty audit history".into()))?;
    let n_seg = mesh.interface.segments.len();
    let n_node = mesh.interface.nodes.len();
    for r in records {
        if r.z.len() != n_seg || r.xi.len() != n_seg || r.pi.len() != n_node || r.zeta.len() != n_node {
            return Err(Error::Scenario(format!("audit record of step {} has missing fields", r.k)));
        }
    }
    let lengths: Vec<f64> = mesh.interface.segments.iter().map(|s| s.length).collect();
    let lumped = mesh.interface.lumped_weights();
    let mut audit = AmdpAudit::default();
    let (mut z_lhs, mut pi_lhs, mut pi_rhs) = (0.0, 0.0, 0.0);
    for w in records.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        for s in 0..n_seg {
            z_lhs += a.xi[s] * (b.z[s] - a.z[s]) * lengths[s];
        }
        for j in 0..n_node {
            let d = b.pi[j] - a.pi[j];
            pi_lhs += a.zeta[j] * d * lumped[j];
            pi_rhs += sigma_yield * d.abs() * lumped[j];
        }
        let z_rhs: f64 = (0..n_seg).map(|s| a1 * (b.z[s] - first.z[s]) * lengths[s]).sum();
        audit.rows.push(AmdpRow { k: b.k, z_lhs, z_rhs, pi_lhs, pi_rhs });
    }
    Ok(audit)
}

/// Audit record of a plasticity-model state.
pub fn amdp_record(k: usize, state: &SystemState, scenario: &Scenario) -> Result<AmdpRecord> {
    let (xi, zeta) = aprim::driving_forces(state, &scenario.law, &scenario.mesh)?;
    Ok(AmdpRecord { k, z: state.z.clone(), pi: state.pi.clone().unwrap_or_default(), xi, zeta })
}
