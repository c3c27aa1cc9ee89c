//! Domain data shared by both interface models: bulk material, interface
//! laws, the mesh with its interface bookkeeping, load programs, the
//! evolving system state and the assembled scenario.

use std::collections::BTreeMap;

use nalgebra::{Matrix2, Matrix3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laws;

/// Audit bound for the non-penetration condition on computed states.
pub const TOL_GAP: f64 = 1e-12;

/// Isotropic linear (visco)elastic bulk in plane strain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BulkMaterial {
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    /// Kelvin-Voigt relaxation time; the viscosity tensor is this times the
    /// elastic tensor.
    pub relaxation_time: f64,
}

impl BulkMaterial {
    pub fn new(youngs_modulus: f64, poisson_ratio: f64, relaxation_time: f64) -> Result<Self> {
        let mat = BulkMaterial { youngs_modulus, poisson_ratio, relaxation_time };
        let issues = mat.issues();
        if let Some(first) = issues.into_iter().next() {
            return Err(Error::InvalidParameter(first));
        }
        Ok(mat)
    }

    fn issues(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.youngs_modulus > 0.0) {
            out.push(format!("Young's modulus must be positive, got {}", self.youngs_modulus));
        }
        if !(self.poisson_ratio >= 0.0 && self.poisson_ratio < 0.5) {
            out.push(format!("Poisson ratio must lie in [0, 0.5), got {}", self.poisson_ratio));
        }
        if !(self.relaxation_time >= 0.0) {
            out.push(format!("relaxation time must be non-negative, got {}", self.relaxation_time));
        }
        out
    }

    /// Lamé constants `(lambda, mu)`.
    pub fn lame(&self) -> (f64, f64) {
        let e = self.youngs_modulus;
        let nu = self.poisson_ratio;
        (e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)), e / (2.0 * (1.0 + nu)))
    }

    /// Plane-strain elasticity in Voigt form acting on `[e_xx, e_yy, gamma_xy]`
    /// with engineering shear strain.
    pub fn stiffness_voigt(&self) -> Matrix3<f64> {
        let (lambda, mu) = self.lame();
        Matrix3::new(
            lambda + 2.0 * mu,
            lambda,
            0.0,
            lambda,
            lambda + 2.0 * mu,
            0.0,
            0.0,
            0.0,
            mu,
        )
    }

    pub fn viscosity_voigt(&self) -> Matrix3<f64> {
        self.stiffness_voigt() * self.relaxation_time
    }

    /// Applies the fourth-order tensor `C_ijkl = lambda d_ij d_kl + mu (d_ik d_jl + d_il d_jk)`
    /// to a 2x2 strain.
    pub fn apply(&self, strain: &Matrix2<f64>) -> Matrix2<f64> {
        let (lambda, mu) = self.lame();
        let mut out = Matrix2::zeros();
        let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        for i in 0..2 {
            for j in 0..2 {
                let mut s = 0.0;
                for k in 0..2 {
                    for l in 0..2 {
                        let c = lambda * delta(i, j) * delta(k, l)
                            + mu * (delta(i, k) * delta(j, l) + delta(i, l) * delta(j, k));
                        s += c * strain[(k, l)];
                    }
                }
                out[(i, j)] = s;
            }
        }
        out
    }

    pub fn is_inviscid(&self) -> bool {
        self.relaxation_time == 0.0
    }
}

/// Fracture-energy law of the brittle interface model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlphaLaw {
    Constant { a_i: f64 },
    HutchinsonSuo { a_i: f64, lambda: f64 },
    /// Mode dependence inherited from interfacial plasticity; `kappa_t` is
    /// the plasticity model's tangential stiffness, which may differ from the
    /// brittle model's own stiffness after fitting.
    PlasticityDerived { a_i: f64, kappa_t: f64, kappa_h: f64, sigma_yield: f64 },
}

impl AlphaLaw {
    /// Mode-I fracture energy.
    pub fn a_i(&self) -> f64 {
        match *self {
            AlphaLaw::Constant { a_i }
            | AlphaLaw::HutchinsonSuo { a_i, .. }
            | AlphaLaw::PlasticityDerived { a_i, .. } => a_i,
        }
    }

    /// Fracture energy at the given energetic mixity angle.
    pub fn alpha(&self, psi_g: f64) -> Result<f64> {
        match *self {
            AlphaLaw::Constant { a_i } => Ok(a_i),
            AlphaLaw::HutchinsonSuo { a_i, lambda } => {
                Ok(laws::alpha_hutchinson_suo(psi_g, a_i, lambda).0)
            }
            AlphaLaw::PlasticityDerived { a_i, kappa_t, kappa_h, sigma_yield } => {
                laws::alpha_plasticity_derived(psi_g, a_i, kappa_t, kappa_h, sigma_yield)
            }
        }
    }
}

/// Parameters of the plasticity-based interface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AprimParams {
    /// Energy stored in the newly created surface on debonding.
    pub a0: f64,
    /// Energy dissipated by debonding.
    pub a1: f64,
    pub kappa_h: f64,
    pub kappa_g: f64,
    pub sigma_yield: f64,
}

impl AprimParams {
    pub fn a_i(&self) -> f64 {
        self.a0 + self.a1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum InterfaceModel {
    Lebim { alpha: AlphaLaw },
    Aprim { params: AprimParams },
}

/// Adhesive with diagonal stiffness `diag(kappa_n, kappa_t)` in the local
/// (normal, tangent) frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterfaceLaw {
    pub kappa_n: f64,
    pub kappa_t: f64,
    pub model: InterfaceModel,
}

impl InterfaceLaw {
    pub fn lebim(kappa_n: f64, kappa_t: f64, alpha: AlphaLaw) -> Self {
        InterfaceLaw { kappa_n, kappa_t, model: InterfaceModel::Lebim { alpha } }
    }

    pub fn aprim(kappa_n: f64, kappa_t: f64, params: AprimParams) -> Self {
        InterfaceLaw { kappa_n, kappa_t, model: InterfaceModel::Aprim { params } }
    }

    pub fn a_i(&self) -> f64 {
        match &self.model {
            InterfaceModel::Lebim { alpha } => alpha.a_i(),
            InterfaceModel::Aprim { params } => params.a_i(),
        }
    }

    pub fn aprim_params(&self) -> Option<&AprimParams> {
        match &self.model {
            InterfaceModel::Aprim { params } => Some(params),
            InterfaceModel::Lebim { .. } => None,
        }
    }

    pub fn is_aprim(&self) -> bool {
        self.aprim_params().is_some()
    }

    fn issues(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.kappa_n > 0.0) {
            out.push(format!("kappa_n must be positive, got {}", self.kappa_n));
        }
        if !(self.kappa_t > 0.0) {
            out.push(format!("kappa_t must be positive, got {}", self.kappa_t));
        }
        match &self.model {
            InterfaceModel::Lebim { alpha } => {
                if !(alpha.a_i() > 0.0) {
                    out.push(format!("mode-I fracture energy must be positive, got {}", alpha.a_i()));
                }
                match *alpha {
                    AlphaLaw::HutchinsonSuo { lambda, .. } if !(0.0..=1.0).contains(&lambda) => {
                        out.push(format!("mode sensitivity lambda must lie in [0, 1], got {lambda}"));
                    }
                    AlphaLaw::PlasticityDerived { a_i, kappa_t, kappa_h, sigma_yield } => {
                        if !(kappa_h > 0.0) {
                            out.push(format!("kappa_H must be positive, got {kappa_h}"));
                        }
                        if let Err(e) = laws::check_yield_window(a_i, kappa_t, sigma_yield) {
                            out.push(e.to_string());
                        }
                    }
                    _ => {}
                }
            }
            InterfaceModel::Aprim { params } => {
                if !(params.a0 >= 0.0) {
                    out.push(format!("a0 must be non-negative, got {}", params.a0));
                }
                if !(params.a1 > 0.0) {
                    out.push(format!("a1 must be positive, got {}", params.a1));
                }
                if !(params.kappa_h > 0.0) {
                    out.push(format!("kappa_H must be positive, got {}", params.kappa_h));
                }
                if !(params.kappa_g >= 0.0) {
                    out.push(format!("kappa_G must be non-negative, got {}", params.kappa_g));
                }
                if !(params.sigma_yield > 0.0) {
                    out.push(format!("sigma_t_yield must be positive, got {}", params.sigma_yield));
                } else if let Err(e) =
                    laws::check_yield_window(params.a_i(), self.kappa_t, params.sigma_yield)
                {
                    out.push(e.to_string());
                }
            }
        }
        out
    }
}

/// One straight piece of the prescribed delamination surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterfaceSegment {
    /// Endpoint nodes on the side the normal points away from.
    pub plus: [usize; 2],
    /// Matched endpoint nodes on the opposite body; `None` for a rigid obstacle.
    pub minus: Option<[usize; 2]>,
    /// Indices into [`Interface::nodes`] carrying the nodal slip.
    pub slip_nodes: [usize; 2],
    pub normal: [f64; 2],
    pub tangent: [f64; 2],
    pub length: f64,
    /// Initial damage: 1 for glued adhesive, 0 for contact-only crack faces.
    pub initial_damage: f64,
}

impl InterfaceSegment {
    pub fn midpoint(&self, nodes: &[[f64; 2]]) -> [f64; 2] {
        let a = nodes[self.plus[0]];
        let b = nodes[self.plus[1]];
        [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterfaceNode {
    pub plus: usize,
    pub minus: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Interface {
    pub segments: Vec<InterfaceSegment>,
    pub nodes: Vec<InterfaceNode>,
}

impl Interface {
    /// Builds the interface from `(plus pair, minus pair, initial damage)`
    /// records. Normals point from the plus body towards the minus side; the
    /// caller supplies the outward normal of the plus body for each segment.
    pub fn from_segments(
        nodes: &[[f64; 2]],
        records: &[([usize; 2], Option<[usize; 2]>, [f64; 2], f64)],
    ) -> Self {
        let mut iface = Interface::default();
        let mut lookup: BTreeMap<(usize, Option<usize>), usize> = BTreeMap::new();
        let mut slip_index = |plus: usize, minus: Option<usize>, iface: &mut Interface| {
            *lookup.entry((plus, minus)).or_insert_with(|| {
                iface.nodes.push(InterfaceNode { plus, minus });
                iface.nodes.len() - 1
            })
        };
        for &(plus, minus, outward, z0) in records {
            let a = nodes[plus[0]];
            let b = nodes[plus[1]];
            let dx = b[0] - a[0];
            let dy = b[1] - a[1];
            let length = (dx * dx + dy * dy).sqrt();
            let nl = (outward[0] * outward[0] + outward[1] * outward[1]).sqrt();
            let normal = [outward[0] / nl, outward[1] / nl];
            let tangent = [-normal[1], normal[0]];
            let s0 = slip_index(plus[0], minus.map(|m| m[0]), &mut iface);
            let s1 = slip_index(plus[1], minus.map(|m| m[1]), &mut iface);
            iface.segments.push(InterfaceSegment {
                plus,
                minus,
                slip_nodes: [s0, s1],
                normal,
                tangent,
                length,
                initial_damage: z0,
            });
        }
        iface
    }

    /// Trapezoidal (lumped) weight of each interface node.
    pub fn lumped_weights(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.nodes.len()];
        for seg in &self.segments {
            for &s in &seg.slip_nodes {
                m[s] += 0.5 * seg.length;
            }
        }
        m
    }

    pub fn total_length(&self) -> f64 {
        self.segments.iter().map(|s| s.length).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub nodes: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub interface: Interface,
    /// Named node sets usable as Dirichlet supports.
    pub node_groups: BTreeMap<String, Vec<usize>>,
    /// Named boundary edge sets usable as Neumann boundaries.
    pub edge_groups: BTreeMap<String, Vec<[usize; 2]>>,
}

impl Mesh {
    pub fn n_dofs(&self) -> usize {
        2 * self.nodes.len()
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let (pa, pb, pc) = (self.nodes[a], self.nodes[b], self.nodes[c]);
        0.5 * ((pb[0] - pa[0]) * (pc[1] - pa[1]) - (pc[0] - pa[0]) * (pb[1] - pa[1]))
    }

    fn issues(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.nodes.len();
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri.iter().any(|&i| i >= n) {
                out.push(format!("triangle {t} references a missing node"));
                continue;
            }
            let area = self.triangle_area(t);
            if !(area > 0.0) {
                out.push(format!("triangle {t} has non-positive area {area:e}"));
            }
        }
        for (i, seg) in self.interface.segments.iter().enumerate() {
            if !(seg.length > 0.0) {
                out.push(format!("interface segment {i} has zero length"));
            }
            let [nx, ny] = seg.normal;
            let [tx, ty] = seg.tangent;
            let unit = ((nx * nx + ny * ny) - 1.0).abs() < 1e-12 && ((tx * tx + ty * ty) - 1.0).abs() < 1e-12;
            if !unit || (nx * tx + ny * ty).abs() > 1e-12 {
                out.push(format!("interface segment {i} frame is not orthonormal"));
            }
            if !(0.0..=1.0).contains(&seg.initial_damage) {
                out.push(format!("interface segment {i} initial damage outside [0, 1]"));
            }
        }
        for (name, edges) in &self.edge_groups {
            for (gname, group) in &self.node_groups {
                if edges.iter().any(|e| group.contains(&e[0]) && group.contains(&e[1])) {
                    out.push(format!("Neumann edges '{name}' overlap Dirichlet support '{gname}'"));
                }
            }
        }
        out
    }
}

/// Prescribed displacement ramp `direction * speed * t` on a node group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletLoad {
    pub group: String,
    /// Which displacement components are prescribed.
    pub components: [bool; 2],
    /// Loading direction; normalized so that `speed` is the velocity magnitude.
    pub direction: [f64; 2],
    pub speed: f64,
    /// Reaction of this support is reported as the specimen force response.
    pub measured: bool,
}

impl DirichletLoad {
    pub fn support(group: &str, components: [bool; 2]) -> Self {
        DirichletLoad { group: group.into(), components, direction: [0.0, 0.0], speed: 0.0, measured: false }
    }

    pub fn value(&self, t: f64) -> [f64; 2] {
        let [dx, dy] = self.direction;
        let norm = (dx * dx + dy * dy).sqrt();
        if norm == 0.0 {
            return [0.0, 0.0];
        }
        let s = self.speed * t / norm;
        [dx * s, dy * s]
    }
}

/// Surface traction ramp `rate * t` on an edge group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeumannLoad {
    pub group: String,
    pub traction_rate: [f64; 2],
}

impl NeumannLoad {
    pub fn value(&self, t: f64) -> [f64; 2] {
        [self.traction_rate[0] * t, self.traction_rate[1] * t]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadProgram {
    pub dirichlet: Vec<DirichletLoad>,
    pub neumann: Vec<NeumannLoad>,
    pub horizon: f64,
    pub tau: f64,
    pub steps: usize,
}

impl LoadProgram {
    /// The step count is `ceil(horizon / tau)`; when that is not an integer
    /// the horizon is extended to a whole number of steps.
    pub fn new(dirichlet: Vec<DirichletLoad>, neumann: Vec<NeumannLoad>, horizon: f64, tau: f64) -> Result<Self> {
        if !(horizon > 0.0) || !(tau > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "time horizon and step must be positive (T = {horizon}, tau = {tau})"
            )));
        }
        let ratio = horizon / tau;
        let steps = (ratio - 1e-9 * ratio.max(1.0)).ceil().max(1.0) as usize;
        let adjusted = steps as f64 * tau;
        if (adjusted - horizon).abs() > 1e-9 * horizon {
            log::warn!("T/tau = {ratio} is not an integer; horizon extended to {adjusted} s ({steps} steps)");
        }
        Ok(LoadProgram { dirichlet, neumann, horizon: adjusted, tau, steps })
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.tau
    }
}

/// Kinematic state of the delaminating structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemState {
    /// Nodal displacements, interleaved `(x, y)` per node.
    pub u: Vec<f64>,
    /// Damage per interface segment.
    pub z: Vec<f64>,
    /// Tangential plastic slip per interface node (plasticity model only).
    pub pi: Option<Vec<f64>>,
    pub time: f64,
}

impl SystemState {
    pub fn initial(mesh: &Mesh, law: &InterfaceLaw) -> Self {
        SystemState {
            u: vec![0.0; mesh.n_dofs()],
            z: mesh.interface.segments.iter().map(|s| s.initial_damage).collect(),
            pi: law.is_aprim().then(|| vec![0.0; mesh.interface.nodes.len()]),
            time: 0.0,
        }
    }

    pub fn slip(&self, node: usize) -> f64 {
        self.pi.as_ref().map_or(0.0, |p| p[node])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Lebim,
    Aprim,
}

impl std::str::FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lebim" => Ok(ModelKind::Lebim),
            "aprim" => Ok(ModelKind::Aprim),
            other => Err(Error::Config(format!("unknown model '{other}' (expected lebim or aprim)"))),
        }
    }
}

/// Which mode-II fit of the brittle model to the plasticity model is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FitScenario {
    /// Same stiffness matrix.
    SameStiffness,
    /// Tangential stiffness lowered to match the mode-II rupture displacement.
    SameRuptureSlip,
}

impl FitScenario {
    pub fn number(&self) -> u8 {
        match self {
            FitScenario::SameStiffness => 1,
            FitScenario::SameRuptureSlip => 2,
        }
    }

    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(FitScenario::SameStiffness),
            2 => Ok(FitScenario::SameRuptureSlip),
            other => Err(Error::Config(format!("fit scenario must be 1 or 2, got {other}"))),
        }
    }
}

/// Jump used to evaluate the mode-dependent fracture energy in the brittle
/// model's damage update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaEvaluation {
    #[default]
    Current,
    Previous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub mesh: Mesh,
    pub bulk: BulkMaterial,
    /// Law the stepper runs with (already fitted when a fit scenario is set).
    pub law: InterfaceLaw,
    /// Plasticity parameters the fit was derived from, if any.
    pub source_aprim: Option<InterfaceLaw>,
    pub load: LoadProgram,
    pub model: ModelKind,
    pub fit_scenario: Option<FitScenario>,
    pub lebim_alpha_at: AlphaEvaluation,
    /// Steps at which nodal snapshots are written.
    pub snapshots: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_runnable(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Collects every violated invariant of the scenario without failing early.
pub fn validate_scenario(scenario: &Scenario) -> ValidationReport {
    let mut report = ValidationReport::default();
    report.violations.extend(scenario.bulk.issues());
    report.violations.extend(scenario.law.issues());
    report.violations.extend(scenario.mesh.issues());

    match (scenario.model, scenario.law.is_aprim()) {
        (ModelKind::Aprim, false) => report.violations.push("model 'aprim' requires plasticity interface parameters".into()),
        (ModelKind::Lebim, true) => report.violations.push("model 'lebim' requires a fracture-energy law".into()),
        _ => {}
    }
    if scenario.model == ModelKind::Lebim && scenario.bulk.is_inviscid() {
        report.warnings.push("relaxation time is zero: inviscid brittle-interface model, not theoretically justified".into());
    }

    let load = &scenario.load;
    if !(load.horizon > 0.0) || !(load.tau > 0.0) || load.steps == 0 {
        report.violations.push("time horizon, step and step count must be positive".into());
    }
    for d in &load.dirichlet {
        if !scenario.mesh.node_groups.contains_key(&d.group) {
            report.violations.push(format!("Dirichlet load references unknown node group '{}'", d.group));
        }
        if !d.speed.is_finite() || d.speed < 0.0 {
            report.violations.push(format!("Dirichlet speed on '{}' must be finite and non-negative", d.group));
        }
    }
    for nl in &load.neumann {
        if !scenario.mesh.edge_groups.contains_key(&nl.group) {
            report.violations.push(format!("Neumann load references unknown edge group '{}'", nl.group));
        }
    }
    if load.dirichlet.is_empty() {
        report.violations.push("no Dirichlet support: rigid motions are unconstrained".into());
    }
    if scenario.mesh.interface.segments.is_empty() {
        report.warnings.push("scenario has no interface segments".into());
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::{build_block, build_pullpush, BlockMode, BlockOptions, InterfaceData};

    fn block(model: ModelKind, yield_factor: f64) -> Scenario {
        let mut o = BlockOptions::new(BlockMode::Shear, model, 10, 1e-4);
        o.interface = InterfaceData { kappa_g: Some(0.0), ..InterfaceData::benchmark(yield_factor) };
        build_block(&o).unwrap()
    }

    #[test]
    fn benchmark_yield_is_admissible() {
        let r = validate_scenario(&block(ModelKind::Aprim, 0.79));
        assert!(r.is_runnable(), "{:?}", r.violations);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn yield_below_window_is_reported_by_both_models() {
        for model in [ModelKind::Aprim, ModelKind::Lebim] {
            let r = validate_scenario(&block(model, 0.4));
            assert!(!r.is_runnable(), "{model:?}");
        }
    }

    #[test]
    fn violations_are_collected_not_short_circuited() {
        let mut sc = block(ModelKind::Aprim, 0.79);
        sc.bulk.poisson_ratio = 0.5;
        let b = sc.mesh.interface.segments[0].plus[0];
        sc.mesh.interface.segments[0].plus[1] = b;
        sc.mesh.interface.segments[0].length = 0.0;
        sc.load.dirichlet[0].group = "nowhere".into();
        let r = validate_scenario(&sc);
        assert_eq!(r.violations.len(), 3, "{:?}", r.violations);
        assert!(r.violations.iter().any(|v| v.contains("zero length")));
    }

    #[test]
    fn model_and_law_must_agree() {
        let mut sc = block(ModelKind::Aprim, 0.79);
        sc.model = ModelKind::Lebim;
        assert!(!validate_scenario(&sc).is_runnable());
    }

    #[test]
    fn inviscid_brittle_model_warns() {
        let r = validate_scenario(&block(ModelKind::Lebim, 0.79));
        assert!(r.is_runnable());
        assert_eq!(r.warnings.len(), 1);
        let pp = build_pullpush(18, 20e-3).unwrap();
        assert!(validate_scenario(&pp).warnings.is_empty());
    }

    #[test]
    fn validation_does_not_touch_the_scenario() {
        let sc = build_pullpush(18, 20e-3).unwrap();
        let copy = sc.clone();
        let a = validate_scenario(&sc);
        let b = validate_scenario(&sc);
        assert_eq!(a, b);
        assert_eq!(sc, copy);
    }

    #[test]
    fn bulk_parameters_are_checked() {
        assert!(BulkMaterial::new(70e9, 0.35, 0.0).is_ok());
        assert!(BulkMaterial::new(0.0, 0.35, 0.0).is_err());
        assert!(BulkMaterial::new(70e9, -0.1, 0.0).is_err());
        assert!(BulkMaterial::new(70e9, 0.35, -1.0).is_err());
    }

    #[test]
    fn load_ramp_and_step_count() {
        let d = DirichletLoad { group: "g".into(), components: [true, true], direction: [3.0, 4.0], speed: 2.0, measured: false };
        let v = d.value(0.5);
        assert!((v[0] - 0.6).abs() < 1e-15 && (v[1] - 0.8).abs() < 1e-15);
        let p = LoadProgram::new(vec![d], vec![], 2.5, 5e-3).unwrap();
        assert_eq!(p.steps, 500);
        assert_eq!(p.time(500), 2.5);
    }

    #[test]
    fn fit_numbers_round_trip() {
        for f in [FitScenario::SameStiffness, FitScenario::SameRuptureSlip] {
            assert_eq!(FitScenario::from_number(f.number()).unwrap(), f);
        }
        assert!(FitScenario::from_number(3).is_err());
        assert_eq!("APRIM".parse::<ModelKind>().unwrap(), ModelKind::Aprim);
        assert!("gurson".parse::<ModelKind>().is_err());
    }
}
