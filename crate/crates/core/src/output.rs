//! CSV and manifest writers for a run directory.

use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::Scenario;
use crate::run::{RunArtifacts, RunStatus};

/// Unit system of the written tables. Plane quantities are per unit depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Units {
    /// m, N/m, J/m.
    #[default]
    Si,
    /// mm, N/mm, N·mm/mm.
    MmMpa,
}

impl Units {
    pub fn length(self) -> f64 {
        match self {
            Units::Si => 1.0,
            Units::MmMpa => 1e3,
        }
    }

    pub fn force(self) -> f64 {
        match self {
            Units::Si => 1.0,
            Units::MmMpa => 1e-3,
        }
    }

    /// J/m and N·mm/mm coincide.
    pub fn energy(self) -> f64 {
        1.0
    }
}

impl std::str::FromStr for Units {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "si" | "SI" => Ok(Units::Si),
            "mm-mpa" => Ok(Units::MmMpa),
            other => Err(Error::Config(format!("unknown unit system '{other}' (si, mm-mpa)"))),
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn write_table(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(&r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct Manifest<'a> {
    name: &'a str,
    version: &'a str,
    model: crate::model::ModelKind,
    fit_scenario: Option<u8>,
    units: Units,
    config_sha256: Option<&'a str>,
    #[serde(flatten)]
    status: &'a RunStatus,
    steps_planned: usize,
    steps_completed: usize,
    max_kkt_residual: f64,
    files: Vec<String>,
    parameters: Parameters<'a>,
}

/// Parameter echo, always SI.
#[derive(Serialize)]
struct Parameters<'a> {
    bulk: &'a crate::model::BulkMaterial,
    interface: &'a crate::model::InterfaceLaw,
    fitted_from: Option<&'a crate::model::InterfaceLaw>,
    tau: f64,
    horizon: f64,
    dirichlet: &'a [crate::model::DirichletLoad],
    neumann: &'a [crate::model::NeumannLoad],
    lebim_alpha_at: crate::model::AlphaEvaluation,
    nodes: usize,
    triangles: usize,
    interface_segments: usize,
}

/// Writes all tables and `MANIFEST.json` into `dir`.
pub fn write_run(
    dir: &Path,
    scenario: &Scenario,
    art: &RunArtifacts,
    units: Units,
    config_sha256: Option<&str>,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    let (lu, fu, eu) = (units.length(), units.force(), units.energy());
    let mut files = Vec::new();

    write_table(
        &dir.join("energies.csv"),
        &[
            "k", "t", "bulk_stored", "interface_stored", "viscous_cum", "delam_cum", "plastic_cum", "work_cum", "total",
            "residual",
        ],
        art.energies.rows.iter().map(|r| {
            vec![
                r.k.to_string(),
                num(r.t),
                num(r.bulk_stored * eu),
                num(r.interface_stored * eu),
                num(r.viscous_cum * eu),
                num(r.delam_cum * eu),
                num(r.plastic_cum * eu),
                num(r.work_cum * eu),
                num(r.total * eu),
                num(r.residual * eu),
            ]
        }),
    )?;
    files.push("energies.csv".to_string());

    write_table(
        &dir.join("forces.csv"),
        &["k", "t", "F_horizontal", "F_vertical"],
        art.forces
            .iter()
            .map(|r| vec![r.k.to_string(), num(r.t), num(r.f_horizontal * fu), num(r.f_vertical * fu)]),
    )?;
    files.push("forces.csv".to_string());

    let mesh = &scenario.mesh;
    let rows = mesh.interface.segments.iter().enumerate().map(|(s, seg)| {
        let [x, y] = seg.midpoint(&mesh.nodes);
        match art.ruptures.iter().find(|r| r.segment == s) {
            Some(r) => vec![s.to_string(), num(x * lu), num(y * lu), r.k.to_string(), opt(r.psi_g), num(r.ratio)],
            None => vec![s.to_string(), num(x * lu), num(y * lu), String::new(), String::new(), String::new()],
        }
    });
    write_table(&dir.join("mixity.csv"), &["segment", "x", "y", "k_rupture", "psi_g", "ratio"], rows)?;
    files.push("mixity.csv".to_string());

    if !art.snapshots.is_empty() {
        let sdir = dir.join("snapshots");
        fs::create_dir_all(&sdir)?;
        for snap in &art.snapshots {
            let name = format!("nodes_{:06}.csv", snap.k);
            write_table(
                &sdir.join(&name),
                &["node", "x", "y", "ux", "uy"],
                mesh.nodes.iter().enumerate().map(|(i, p)| {
                    vec![
                        i.to_string(),
                        num(p[0] * lu),
                        num(p[1] * lu),
                        num(snap.u[2 * i] * lu),
                        num(snap.u[2 * i + 1] * lu),
                    ]
                }),
            )?;
            files.push(format!("snapshots/{name}"));
            let name = format!("interface_{:06}.csv", snap.k);
            write_table(
                &sdir.join(&name),
                &["segment", "x", "y", "z", "pi_left", "pi_right"],
                mesh.interface.segments.iter().enumerate().map(|(s, seg)| {
                    let [x, y] = seg.midpoint(&mesh.nodes);
                    let pi = |e: usize| snap.pi.as_ref().map(|p| p[seg.slip_nodes[e]] * lu);
                    vec![s.to_string(), num(x * lu), num(y * lu), num(snap.z[s]), opt(pi(0)), opt(pi(1))]
                }),
            )?;
            files.push(format!("snapshots/{name}"));
        }
    }

    if let Some(audit) = &art.amdp {
        write_table(
            &dir.join("amdp.csv"),
            &[
                "k", "z_lhs", "z_rhs", "pi_lhs", "pi_rhs", "z_residual", "pi_residual", "z_relative", "pi_relative",
            ],
            audit.rows.iter().map(|r| {
                vec![
                    r.k.to_string(),
                    num(r.z_lhs * eu),
                    num(r.z_rhs * eu),
                    num(r.pi_lhs * eu),
                    num(r.pi_rhs * eu),
                    num(r.z_residual() * eu),
                    num(r.pi_residual() * eu),
                    num(r.z_relative()),
                    num(r.pi_relative()),
                ]
            }),
        )?;
        files.push("amdp.csv".to_string());
    }

    let manifest = Manifest {
        name: &scenario.name,
        version: env!("CARGO_PKG_VERSION"),
        model: scenario.model,
        fit_scenario: scenario.fit_scenario.map(|f| f.number()),
        units,
        config_sha256,
        status: &art.status,
        steps_planned: scenario.load.steps,
        steps_completed: art.steps_completed,
        max_kkt_residual: art.max_kkt,
        files,
        parameters: Parameters {
            bulk: &scenario.bulk,
            interface: &scenario.law,
            fitted_from: scenario.source_aprim.as_ref(),
            tau: scenario.load.tau,
            horizon: scenario.load.horizon,
            dirichlet: &scenario.load.dirichlet,
            neumann: &scenario.load.neumann,
            lebim_alpha_at: scenario.lebim_alpha_at,
            nodes: mesh.nodes.len(),
            triangles: mesh.triangles.len(),
            interface_segments: mesh.interface.segments.len(),
        },
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(dir.join("MANIFEST.json"), text)?;
    Ok(())
}
