//! Builders for the shipped benchmarks: the pull-push bar on a rigid
//! obstacle, the two-arm mixed-mode flexure specimen and a one-segment block
//! used for analytic checks.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::aprim;
use crate::error::{Error, Result};
use crate::laws;
use crate::mesh::{linspace, Grid};
use crate::model::{
    AlphaEvaluation, AlphaLaw, AprimParams, BulkMaterial, DirichletLoad, FitScenario, Interface, InterfaceLaw,
    LoadProgram, Mesh, ModelKind, Scenario,
};

/// Fracture-energy law family for the brittle model when no fit is requested.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LebimLawChoice {
    /// Mode dependence inherited from the plasticity parameters.
    #[default]
    Plasticity,
    Constant,
    HutchinsonSuo { lambda: f64 },
}

/// Interface material data from which both models are derived. SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterfaceData {
    pub kappa_n: f64,
    pub kappa_t: f64,
    pub a_i: f64,
    pub kappa_h: f64,
    pub sigma_yield: f64,
    pub a0: f64,
    /// `None` selects the mesh-dependent default.
    pub kappa_g: Option<f64>,
    pub lebim_law: LebimLawChoice,
}

impl InterfaceData {
    /// Adhesive of both benchmarks with the yield stress given as a fraction
    /// of the mode-II strength.
    pub fn benchmark(yield_factor: f64) -> Self {
        let kappa_n = 150e9;
        let kappa_t = 0.5 * kappa_n;
        let a_i = 187.5;
        InterfaceData {
            kappa_n,
            kappa_t,
            a_i,
            kappa_h: kappa_t / 9.0,
            sigma_yield: yield_factor * laws::sigma_t_crit(kappa_t, a_i),
            a0: 0.0,
            kappa_g: None,
            lebim_law: LebimLawChoice::Plasticity,
        }
    }

    pub fn aprim_law(&self, mesh: &Mesh) -> InterfaceLaw {
        let kappa_g = self.kappa_g.unwrap_or_else(|| aprim::default_kappa_g(mesh, self.kappa_h));
        InterfaceLaw::aprim(
            self.kappa_n,
            self.kappa_t,
            AprimParams {
                a0: self.a0,
                a1: self.a_i - self.a0,
                kappa_h: self.kappa_h,
                kappa_g,
                sigma_yield: self.sigma_yield,
            },
        )
    }

    /// Law the stepper of `model` runs with, and the plasticity law a fit
    /// was taken from.
    pub fn law_for(
        &self,
        mesh: &Mesh,
        model: ModelKind,
        fit: Option<FitScenario>,
    ) -> Result<(InterfaceLaw, Option<InterfaceLaw>)> {
        let source = self.aprim_law(mesh);
        match (model, fit) {
            (ModelKind::Aprim, None) => Ok((source, None)),
            (ModelKind::Aprim, Some(_)) => {
                Err(Error::Config("fit scenarios apply to the brittle model only".into()))
            }
            (ModelKind::Lebim, Some(f)) => Ok((laws::fit_lebim_to_aprim(&source, f)?, Some(source))),
            (ModelKind::Lebim, None) => {
                let alpha = match self.lebim_law {
                    LebimLawChoice::Plasticity => AlphaLaw::PlasticityDerived {
                        a_i: self.a_i,
                        kappa_t: self.kappa_t,
                        kappa_h: self.kappa_h,
                        sigma_yield: self.sigma_yield,
                    },
                    LebimLawChoice::Constant => AlphaLaw::Constant { a_i: self.a_i },
                    LebimLawChoice::HutchinsonSuo { lambda } => AlphaLaw::HutchinsonSuo { a_i: self.a_i, lambda },
                };
                Ok((InterfaceLaw::lebim(self.kappa_n, self.kappa_t, alpha), None))
            }
        }
    }
}

/// Options shared by the benchmark builders. SI units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkOptions {
    pub n: usize,
    pub tau: f64,
    pub bulk_layers: usize,
    pub horizon: f64,
    pub speed: f64,
    pub model: ModelKind,
    pub fit: Option<FitScenario>,
    pub lebim_alpha_at: AlphaEvaluation,
    pub bulk: BulkMaterial,
    pub interface: InterfaceData,
    /// Explicit snapshot steps; `None` gives five evenly spaced ones.
    pub snapshots: Option<Vec<usize>>,
}

impl BenchmarkOptions {
    pub fn pullpush() -> Self {
        BenchmarkOptions {
            n: 54,
            tau: 5e-3,
            bulk_layers: 3,
            horizon: 2.5,
            speed: 0.3e-3,
            model: ModelKind::Lebim,
            fit: None,
            lebim_alpha_at: AlphaEvaluation::Current,
            bulk: BulkMaterial { youngs_modulus: 70e9, poisson_ratio: 0.35, relaxation_time: 1e-3 },
            interface: InterfaceData::benchmark(0.79),
            snapshots: None,
        }
    }

    pub fn mmf() -> Self {
        BenchmarkOptions {
            n: 60,
            tau: 5e-3,
            bulk_layers: 3,
            horizon: 2.5,
            speed: 1e-3,
            model: ModelKind::Lebim,
            fit: None,
            lebim_alpha_at: AlphaEvaluation::Current,
            bulk: BulkMaterial { youngs_modulus: 70e9, poisson_ratio: 0.35, relaxation_time: 0.0 },
            interface: InterfaceData::benchmark(0.56),
            snapshots: None,
        }
    }
}

fn default_snapshots(steps: usize) -> Vec<usize> {
    let mut s: Vec<usize> = (0..=4).map(|i| i * steps / 4).collect();
    s.dedup();
    s
}

fn finish(name: &str, mesh: Mesh, load: LoadProgram, opts: &BenchmarkOptions) -> Result<Scenario> {
    let (law, source_aprim) = opts.interface.law_for(&mesh, opts.model, opts.fit)?;
    let snapshots = opts.snapshots.clone().unwrap_or_else(|| default_snapshots(load.steps));
    Ok(Scenario {
        name: name.into(),
        mesh,
        bulk: opts.bulk,
        law,
        source_aprim,
        load,
        model: opts.model,
        fit_scenario: opts.fit,
        lebim_alpha_at: opts.lebim_alpha_at,
        snapshots,
    })
}

/// Bar of 250 x 12.5 mm on a rigid obstacle, glued along its right 225 mm and
/// pulled at its right end in direction (1, 0.6).
pub fn build_pullpush(n: usize, tau: f64) -> Result<Scenario> {
    build_pullpush_with(&BenchmarkOptions { n, tau, ..BenchmarkOptions::pullpush() })
}

pub fn build_pullpush_with(opts: &BenchmarkOptions) -> Result<Scenario> {
    if opts.n < 4 {
        return Err(Error::InvalidParameter(format!("pull-push needs at least 4 interface elements, got {}", opts.n)));
    }
    let (length, glued, height) = (0.25, 0.225, 0.0125);
    let h = glued / opts.n as f64;
    let free_cols = (((length - glued) / h).round() as usize).max(1);
    let mut xs = linspace(0.0, length - glued, free_cols);
    xs.extend(linspace(length - glued, length, opts.n).into_iter().skip(1));
    let g = Grid::with_columns(&xs, [0.0, height], opts.bulk_layers.max(1), 0);
    let bottom = g.bottom();
    let records: Vec<_> = (0..opts.n).map(|i| ([bottom[free_cols + i], bottom[free_cols + i + 1]], None, [0.0, -1.0], 1.0)).collect();
    let interface = Interface::from_segments(&g.nodes, &records);
    let mut node_groups = BTreeMap::new();
    node_groups.insert("right".to_string(), g.right());
    let mesh = Mesh { nodes: g.nodes, triangles: g.triangles, interface, node_groups, edge_groups: BTreeMap::new() };
    let pull = DirichletLoad {
        group: "right".into(),
        components: [true, true],
        direction: [1.0, 0.6],
        speed: opts.speed,
        measured: true,
    };
    let load = LoadProgram::new(vec![pull], vec![], opts.horizon, opts.tau)?;
    finish("pullpush", mesh, load, opts)
}

/// Mixed-mode flexure specimen: a 120 mm upper arm of 3 mm bonded to a
/// 2 mm lower arm spanning x in [20, 120] mm, precracked up to 37 mm, loaded
/// downwards at mid-span of the upper arm, on a roller at 10 mm and with the
/// lower arm clamped at the right end.
pub fn build_mmf(n: usize, tau: f64) -> Result<Scenario> {
    build_mmf_with(&BenchmarkOptions { n, tau, ..BenchmarkOptions::mmf() })
}

pub fn build_mmf_with(opts: &BenchmarkOptions) -> Result<Scenario> {
    if opts.n < 20 {
        return Err(Error::InvalidParameter(format!("mixed-mode flexure needs at least 20 interface elements, got {}", opts.n)));
    }
    let (span, overlap_start, crack_tip, upper_h, lower_h) = (0.12, 0.02, 0.037, 3e-3, 2e-3);
    let layers = opts.bulk_layers.max(1);
    let h = (span - overlap_start) / opts.n as f64;
    let left_cols = ((overlap_start / h).round() as usize).max(1);
    let mut xs = linspace(0.0, overlap_start, left_cols);
    let overlap = linspace(overlap_start, span, opts.n);
    xs.extend(overlap.iter().skip(1));
    let upper = Grid::with_columns(&xs, [0.0, upper_h], layers, 0);
    let lower = Grid::with_columns(&overlap, [-lower_h, 0.0], layers, upper.nodes.len());

    let mut nodes = upper.nodes.clone();
    nodes.extend(&lower.nodes);
    let mut triangles = upper.triangles.clone();
    triangles.extend(&lower.triangles);
    let records: Vec<_> = (0..opts.n)
        .map(|i| {
            let plus = [upper.node(left_cols + i, 0), upper.node(left_cols + i + 1, 0)];
            let minus = [lower.node(i, lower.ny), lower.node(i + 1, lower.ny)];
            let mid = 0.5 * (overlap[i] + overlap[i + 1]);
            (plus, Some(minus), [0.0, -1.0], if mid < crack_tip { 0.0 } else { 1.0 })
        })
        .collect();
    let interface = Interface::from_segments(&nodes, &records);

    let mut node_groups = BTreeMap::new();
    node_groups.insert("load".to_string(), vec![upper.nearest([0.06, upper_h])]);
    node_groups.insert("roller".to_string(), vec![upper.nearest([0.01, 0.0])]);
    node_groups.insert("clamp".to_string(), lower.right());
    let mesh = Mesh { nodes, triangles, interface, node_groups, edge_groups: BTreeMap::new() };
    let loads = vec![
        DirichletLoad {
            group: "load".into(),
            components: [true, true],
            direction: [0.0, -1.0],
            speed: opts.speed,
            measured: true,
        },
        DirichletLoad::support("roller", [false, true]),
        DirichletLoad::support("clamp", [true, true]),
    ];
    let load = LoadProgram::new(loads, vec![], opts.horizon, opts.tau)?;
    finish("mmf", mesh, load, opts)
}

/// Loading mode of the one-segment block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockMode {
    Opening,
    Shear,
}

/// One interface segment of 1 mm under a 0.1 mm block of two triangles whose
/// top is moved rigidly; the prescribed displacement ramps linearly from 0
/// to `peak` over `steps` steps of a unit time horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockOptions {
    pub mode: BlockMode,
    pub model: ModelKind,
    pub steps: usize,
    pub peak: f64,
    pub relaxation_time: f64,
    pub interface: InterfaceData,
    pub fit: Option<FitScenario>,
}

impl BlockOptions {
    pub fn new(mode: BlockMode, model: ModelKind, steps: usize, peak: f64) -> Self {
        let mut interface = InterfaceData::benchmark(0.79);
        interface.kappa_g = Some(0.0);
        BlockOptions { mode, model, steps, peak, relaxation_time: 0.0, interface, fit: None }
    }
}

pub fn build_block(opts: &BlockOptions) -> Result<Scenario> {
    let g = Grid::new([0.0, 1e-3], [0.0, 1e-4], 1, 1, 0);
    let bottom = g.bottom();
    let interface = Interface::from_segments(&g.nodes, &[([bottom[0], bottom[1]], None, [0.0, -1.0], 1.0)]);
    let mut node_groups = BTreeMap::new();
    node_groups.insert("top".to_string(), g.top());
    let mesh = Mesh { nodes: g.nodes, triangles: g.triangles, interface, node_groups, edge_groups: BTreeMap::new() };
    let direction = match opts.mode {
        BlockMode::Opening => [0.0, 1.0],
        BlockMode::Shear => [1.0, 0.0],
    };
    let load = LoadProgram::new(
        vec![DirichletLoad { group: "top".into(), components: [true, true], direction, speed: opts.peak, measured: true }],
        vec![],
        1.0,
        1.0 / opts.steps as f64,
    )?;
    let bench = BenchmarkOptions {
        n: 1,
        tau: load.tau,
        bulk_layers: 1,
        horizon: 1.0,
        speed: opts.peak,
        model: opts.model,
        fit: opts.fit,
        lebim_alpha_at: AlphaEvaluation::Current,
        bulk: BulkMaterial::new(70e9, 0.35, opts.relaxation_time)?,
        interface: opts.interface,
        snapshots: Some(vec![]),
    };
    finish("block", mesh, load, &bench)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_scenario;

    #[test]
    fn pullpush_defaults() {
        let sc = build_pullpush(54, 5e-3).unwrap();
        let segs = &sc.mesh.interface.segments;
        assert_eq!(segs.len(), 54);
        for s in segs {
            assert!((s.length - 0.225 / 54.0).abs() < 1e-15);
        }
        assert!((sc.mesh.interface.total_length() - 0.225).abs() < 1e-14);
        assert_eq!(sc.load.steps, 500);
        assert!(validate_scenario(&sc).is_runnable());
    }

    #[test]
    fn pullpush_coarse_keeps_glued_length() {
        let sc = build_pullpush(4, 5e-3).unwrap();
        assert_eq!(sc.mesh.interface.segments.len(), 4);
        assert!((sc.mesh.interface.total_length() - 0.225).abs() < 1e-14);
        assert!(build_pullpush(3, 5e-3).is_err());
    }

    #[test]
    fn doubling_tau_halves_steps() {
        assert_eq!(build_pullpush(18, 10e-3).unwrap().load.steps, 250);
    }

    #[test]
    fn mmf_defaults() {
        let sc = build_mmf(60, 5e-3).unwrap();
        assert!(validate_scenario(&sc).is_runnable());
        let segs = &sc.mesh.interface.segments;
        assert_eq!(segs.len(), 60);
        assert!(segs.iter().all(|s| s.minus.is_some()));
        let bonded: f64 = segs.iter().filter(|s| s.initial_damage == 1.0).map(|s| s.length).sum();
        assert!((bonded - 0.083).abs() < 0.1 / 60.0 + 1e-12);
        // Both arms meet at matched positions.
        for s in segs {
            for e in 0..2 {
                assert_eq!(sc.mesh.nodes[s.plus[e]], sc.mesh.nodes[s.minus.unwrap()[e]]);
            }
        }
        let p = sc.law.a_i();
        assert_eq!(p, 187.5);
        let k = sc.load.dirichlet[0].value(sc.load.time(500));
        assert!((k[1] + 2.5e-3).abs() < 1e-15);
    }

    #[test]
    fn mmf_yield_factor_is_admissible() {
        let d = InterfaceData::benchmark(0.56);
        assert!(laws::check_yield_window(d.a_i, d.kappa_t, d.sigma_yield).is_ok());
    }

    #[test]
    fn fit_requires_brittle_model() {
        let opts = BenchmarkOptions { model: ModelKind::Aprim, fit: Some(FitScenario::SameStiffness), ..BenchmarkOptions::pullpush() };
        assert!(build_pullpush_with(&opts).is_err());
        let opts = BenchmarkOptions { fit: Some(FitScenario::SameRuptureSlip), ..BenchmarkOptions::pullpush() };
        let sc = build_pullpush_with(&opts).unwrap();
        assert!((sc.law.kappa_t / 3.935e10 - 1.0).abs() < 1e-3);
        assert!(sc.source_aprim.is_some());
    }
}
