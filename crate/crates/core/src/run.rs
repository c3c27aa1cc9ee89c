//! Time-stepping driver collecting everything the output writers need.

use serde::Serialize;

use crate::aprim::{self, AprimStepReport, InterfaceGradientOperator};
use crate::energetics::{self, AmdpAudit, AmdpRecord, EnergyLedger, LedgerStep, StepForces};
use crate::error::{Error, Result};
use crate::fem;
use crate::lebim::{self, LebimStepReport};
use crate::model::{validate_scenario, ModelKind, Scenario, SystemState};
use crate::stepping::Discretization;

/// Force response of the measured support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForceRow {
    pub k: usize,
    pub t: f64,
    pub f_horizontal: f64,
    pub f_vertical: f64,
}

/// Debonding event of one segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rupture {
    pub segment: usize,
    pub k: usize,
    pub x: f64,
    pub y: f64,
    pub psi_g: Option<f64>,
    /// Energy spent on the segment up to debonding relative to `a_I`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Snapshot {
    pub k: usize,
    pub t: f64,
    pub u: Vec<f64>,
    pub z: Vec<f64>,
    pub pi: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub enum StepReport {
    Lebim(LebimStepReport),
    Aprim(AprimStepReport),
}

impl StepReport {
    pub fn state_next(&self) -> &SystemState {
        match self {
            StepReport::Lebim(r) => &r.state_next,
            StepReport::Aprim(r) => &r.state_next,
        }
    }

    pub fn newly_broken(&self) -> &[usize] {
        match self {
            StepReport::Lebim(r) => &r.newly_broken,
            StepReport::Aprim(r) => &r.newly_broken,
        }
    }

    pub fn kkt_residual(&self) -> f64 {
        match self {
            StepReport::Lebim(r) => r.u_qp.kkt_residual,
            StepReport::Aprim(r) => r.joint_qp.kkt_residual,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    Failed { step: usize, message: String },
}

/// Incremental simulation of one scenario.
pub struct Simulation<'a> {
    scenario: &'a Scenario,
    disc: Discretization,
    gradient: Option<InterfaceGradientOperator>,
    state: SystemState,
    k: usize,
    warm: Option<Vec<usize>>,
    forces: StepForces,
    ledger: EnergyLedger,
    amdp: Vec<AmdpRecord>,
    force_rows: Vec<ForceRow>,
    ruptures: Vec<Rupture>,
    snapshots: Vec<Snapshot>,
    /// Plastic dissipation accumulated per segment (J).
    segment_plastic: Vec<f64>,
    max_kkt: f64,
}

impl<'a> Simulation<'a> {
    pub fn new(scenario: &'a Scenario) -> Result<Self> {
        let report = validate_scenario(scenario);
        for w in &report.warnings {
            log::warn!("{w}");
        }
        if !report.is_runnable() {
            return Err(Error::Scenario(report.violations.join("; ")));
        }
        let disc = Discretization::new(scenario)?;
        let gradient = scenario.law.aprim_params().map(|p| InterfaceGradientOperator::new(&scenario.mesh, p.kappa_g));
        let state = SystemState::initial(&scenario.mesh, &scenario.law);
        let (bulk, iface) = energetics::stored_energies(&disc, scenario, &state, gradient.as_ref());
        let ledger = EnergyLedger::start(0.0, bulk, iface);
        let forces = Self::forces_at(&disc, scenario, &state, &state);
        let mut amdp = Vec::new();
        if scenario.model == ModelKind::Aprim {
            amdp.push(energetics::amdp_record(0, &state, scenario)?);
        }
        let n_seg = scenario.mesh.interface.segments.len();
        let mut sim = Simulation {
            scenario,
            disc,
            gradient,
            state,
            k: 0,
            warm: None,
            forces,
            ledger,
            amdp,
            force_rows: Vec::new(),
            ruptures: Vec::new(),
            snapshots: Vec::new(),
            segment_plastic: vec![0.0; n_seg],
            max_kkt: 0.0,
        };
        sim.record_forces();
        sim.maybe_snapshot();
        Ok(sim)
    }

    fn forces_at(disc: &Discretization, sc: &Scenario, prev: &SystemState, state: &SystemState) -> StepForces {
        StepForces {
            prescribed: disc.prescribed_forces(&sc.mesh, sc, &prev.z, &state.u, &prev.u, state.pi.as_deref()),
            external: fem::assemble_neumann(&sc.mesh, &sc.load.neumann, state.time).iter().copied().collect(),
        }
    }

    pub fn is_finished(&self) -> bool {
        self.k >= self.scenario.load.steps
    }

    pub fn step_index(&self) -> usize {
        self.k
    }

    pub fn state(&self) -> &SystemState {
        &self.state
    }

    pub fn discretization(&self) -> &Discretization {
        &self.disc
    }

    pub fn gradient(&self) -> Option<&InterfaceGradientOperator> {
        self.gradient.as_ref()
    }

    pub fn ledger(&self) -> &EnergyLedger {
        &self.ledger
    }

    pub fn ruptures(&self) -> &[Rupture] {
        &self.ruptures
    }

    pub fn force_rows(&self) -> &[ForceRow] {
        &self.force_rows
    }

    pub fn amdp_records(&self) -> &[AmdpRecord] {
        &self.amdp
    }

    pub fn max_kkt(&self) -> f64 {
        self.max_kkt
    }

    /// Advances one step.
    pub fn step(&mut self) -> Result<StepReport> {
        let sc = self.scenario;
        let k = self.k + 1;
        let prev = self.state.clone();
        let report = match sc.model {
            ModelKind::Lebim => {
                StepReport::Lebim(lebim::step_lebim(&self.disc, sc, &prev, k, self.warm.as_deref())?)
            }
            ModelKind::Aprim => {
                let g = self.gradient.as_ref().expect("plasticity scenario carries a gradient operator");
                StepReport::Aprim(aprim::step_aprim(&self.disc, g, sc, &prev, k, self.warm.as_deref())?)
            }
        };
        let next = report.state_next().clone();
        self.max_kkt = self.max_kkt.max(report.kkt_residual());

        let forces = Self::forces_at(&self.disc, sc, &prev, &next);
        let work = energetics::work_increment(&self.disc, &forces, &prev.u, &next.u);
        let viscous = energetics::viscous_increment(&self.disc, &prev.u, &next.u);
        let mut plastic = 0.0;
        let energy_per_area: Vec<f64> = match &report {
            StepReport::Lebim(r) => r.alpha_used.clone(),
            StepReport::Aprim(_) => {
                let p = *aprim::params(&sc.law)?;
                let (pa, pb) = (prev.pi.as_deref().unwrap_or(&[]), next.pi.as_deref().unwrap_or(&[]));
                plastic = energetics::plastic_increment(p.sigma_yield, &self.disc.lumped, pa, pb);
                vec![p.a1; sc.mesh.interface.segments.len()]
            }
        };
        let delamination = energetics::delamination_increment(&sc.mesh, &energy_per_area, &prev.z, &next.z);
        let (bulk, iface) = energetics::stored_energies(&self.disc, sc, &next, self.gradient.as_ref());
        self.ledger.record(&LedgerStep {
            k,
            t: next.time,
            bulk_stored: bulk,
            interface_stored: iface,
            viscous,
            delamination,
            plastic,
            work,
            broke: !report.newly_broken().is_empty(),
        });

        self.record_ruptures(k, &prev, &report)?;
        if let StepReport::Aprim(r) = &report {
            self.amdp.push(energetics::AmdpRecord {
                k,
                z: next.z.clone(),
                pi: next.pi.clone().unwrap_or_default(),
                xi: r.xi.clone(),
                zeta: r.zeta.clone(),
            });
        }
        self.warm = Some(match &report {
            StepReport::Lebim(r) => r.solve.active.clone(),
            StepReport::Aprim(r) => r.solve.active.clone(),
        });
        self.forces = forces;
        self.state = next;
        self.k = k;
        self.record_forces();
        self.maybe_snapshot();
        Ok(report)
    }

    fn record_ruptures(&mut self, k: usize, prev: &SystemState, report: &StepReport) -> Result<()> {
        let sc = self.scenario;
        let mesh = &sc.mesh;
        let next = report.state_next();
        let a_i = sc.law.a_i();
        match report {
            StepReport::Lebim(r) => {
                for &s in &r.newly_broken {
                    let [x, y] = mesh.interface.segments[s].midpoint(&mesh.nodes);
                    self.ruptures.push(Rupture { segment: s, k, x, y, psi_g: r.psi_g[s], ratio: r.alpha_used[s] / a_i });
                }
            }
            StepReport::Aprim(r) => {
                let p = *aprim::params(&sc.law)?;
                let (pa, pb) = (prev.pi.as_deref().unwrap_or(&[]), next.pi.as_deref().unwrap_or(&[]));
                let step_plastic: Vec<f64> = mesh
                    .interface
                    .segments
                    .iter()
                    .map(|seg| {
                        seg.slip_nodes.iter().map(|&j| 0.5 * seg.length * p.sigma_yield * (pb[j] - pa[j]).abs()).sum()
                    })
                    .collect();
                for &s in &r.newly_broken {
                    let seg = &mesh.interface.segments[s];
                    let est = aprim::rupture_estimate(
                        &sc.law,
                        seg,
                        (&prev.u, pa),
                        (&next.u, pb),
                        self.segment_plastic[s],
                        step_plastic[s],
                    )?;
                    let [x, y] = seg.midpoint(&mesh.nodes);
                    self.ruptures.push(Rupture {
                        segment: s,
                        k,
                        x,
                        y,
                        psi_g: est.psi_g,
                        ratio: est.fracture_energy / a_i,
                    });
                }
                for (acc, d) in self.segment_plastic.iter_mut().zip(step_plastic) {
                    *acc += d;
                }
            }
        }
        Ok(())
    }

    fn record_forces(&mut self) {
        let sc = self.scenario;
        let mut f = [0.0; 2];
        for (i, p) in self.disc.prescribed.iter().enumerate() {
            if sc.load.dirichlet[p.load].measured {
                f[p.component] += self.forces.prescribed[i] - self.forces.external[p.dof];
            }
        }
        self.force_rows.push(ForceRow { k: self.k, t: self.state.time, f_horizontal: f[0], f_vertical: f[1] });
    }

    fn maybe_snapshot(&mut self) {
        if self.scenario.snapshots.contains(&self.k) {
            self.snapshots.push(Snapshot {
                k: self.k,
                t: self.state.time,
                u: self.state.u.clone(),
                z: self.state.z.clone(),
                pi: self.state.pi.clone(),
            });
        }
    }

    pub fn into_artifacts(self, status: RunStatus) -> Result<RunArtifacts> {
        let amdp = match (&status, self.scenario.law.aprim_params()) {
            (_, Some(p)) if self.amdp.len() > 1 => {
                Some(energetics::amdp_audit(&self.amdp, &self.scenario.mesh, p.a1, p.sigma_yield)?)
            }
            _ => None,
        };
        Ok(RunArtifacts {
            status,
            steps_completed: self.k,
            energies: self.ledger,
            forces: self.force_rows,
            ruptures: self.ruptures,
            snapshots: self.snapshots,
            amdp,
            final_state: self.state,
            max_kkt: self.max_kkt,
        })
    }
}

/// Everything a run produced, complete or not.
#[derive(Debug, Clone, Serialize)]
pub struct RunArtifacts {
    pub status: RunStatus,
    pub steps_completed: usize,
    pub energies: EnergyLedger,
    pub forces: Vec<ForceRow>,
    pub ruptures: Vec<Rupture>,
    pub snapshots: Vec<Snapshot>,
    pub amdp: Option<AmdpAudit>,
    pub final_state: SystemState,
    pub max_kkt: f64,
}

/// Runs all steps. A failing step ends the run with the artifacts collected
/// so far; only an invalid scenario is an error.
pub fn run(scenario: &Scenario) -> Result<RunArtifacts> {
    let mut sim = Simulation::new(scenario)?;
    while !sim.is_finished() {
        if let Err(e) = sim.step() {
            let step = sim.step_index() + 1;
            log::error!("aborting: {e}");
            return sim.into_artifacts(RunStatus::Failed { step, message: e.to_string() });
        }
    }
    sim.into_artifacts(RunStatus::Completed)
}
