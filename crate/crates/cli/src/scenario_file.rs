//! TOML scenario files.
//!
//! ```toml
//! seed = 7
//! broadcast_mbps = 11.0
//! t_slot_ms = 20.0
//!
//! [loss]
//! lo = 0.0
//! hi = 0.1
//!
//! [pcd_error]
//! stddev = 1.0
//!
//! [[nodes]]
//! id = 1
//! join_s = 0.0
//! leave_s = 10.0
//! data_mb = 10.0
//! upload_mbps = 11.0
//! ```
//!
//! A file may also name a `preset` and override some of its fields.

use std::path::Path;

use airtime_core::grouping::ConnectivityGraph;
use airtime_core::sim::{Connectivity, DataSpec, LossModel, NodeSpec, PcdErrorModel, Scenario};
use airtime_core::NodeId;
use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileNode {
    id: u32,
    join_s: f64,
    leave_s: f64,
    data_mb: Option<f64>,
    data_mb_per_peer: Option<f64>,
    upload_mbps: f64,
    #[serde(default = "one")]
    alpha: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileLoss {
    lo: f64,
    hi: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FilePcdError {
    #[serde(default)]
    mean: f64,
    stddev: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConnectivity {
    edges: Vec<(u32, u32)>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileScenario {
    preset: Option<String>,
    seed: Option<u64>,
    broadcast_mbps: Option<f64>,
    t_slot_ms: Option<f64>,
    loss: Option<FileLoss>,
    pcd_error: Option<FilePcdError>,
    go: Option<u32>,
    go_alpha_factor: Option<f64>,
    carry_over: Option<bool>,
    connectivity: Option<FileConnectivity>,
    #[serde(default)]
    nodes: Vec<FileNode>,
}

/// Looks up a built-in scenario by name.
pub fn preset(name: &str) -> CliResult<Scenario> {
    match name {
        "table1" => Ok(Scenario::table1()),
        "dynamic4" => Ok(Scenario::dynamic4()),
        other => Err(CliError::Schema(format!("unknown preset `{other}` (expected table1 or dynamic4)"))),
    }
}

pub fn load(path: &Path) -> CliResult<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse(&text).map_err(|e| match e {
        CliError::Schema(msg) => CliError::Schema(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse(text: &str) -> CliResult<Scenario> {
    let file: FileScenario = toml::from_str(text).map_err(|e| CliError::Schema(e.to_string()))?;
    let mut scenario = match &file.preset {
        Some(name) => preset(name)?,
        None => {
            if file.nodes.is_empty() {
                return Err(CliError::Schema("scenario has no nodes".into()));
            }
            let rate = file
                .broadcast_mbps
                .ok_or_else(|| CliError::Schema("missing `broadcast_mbps`".into()))?;
            Scenario::new(Vec::new(), rate)
        }
    };
    if !file.nodes.is_empty() {
        scenario.nodes = file.nodes.iter().map(node).collect::<CliResult<_>>()?;
    }
    if let Some(rate) = file.broadcast_mbps {
        scenario.broadcast_mbps = rate;
    }
    if let Some(ms) = file.t_slot_ms {
        scenario.t_slot_s = ms / 1000.0;
    }
    if let Some(seed) = file.seed {
        scenario.seed = seed;
    }
    if let Some(l) = file.loss {
        scenario.loss = Some(LossModel { lo: l.lo, hi: l.hi });
    }
    if let Some(e) = file.pcd_error {
        scenario.pcd_error = Some(PcdErrorModel {
            mean: e.mean,
            stddev: e.stddev,
        });
    }
    if let Some(go) = file.go {
        scenario.go = Some(NodeId(go));
    }
    if let Some(f) = file.go_alpha_factor {
        scenario.go_alpha_factor = f;
    }
    if let Some(c) = file.carry_over {
        scenario.carry_over = c;
    }
    if let Some(c) = file.connectivity {
        let edges = c.edges.into_iter().map(|(a, b)| (NodeId(a), NodeId(b)));
        let mut graph = ConnectivityGraph::from_edges(edges).map_err(|e| CliError::Schema(e.to_string()))?;
        for n in &scenario.nodes {
            graph.add_node(n.id);
        }
        scenario.connectivity = Connectivity::Graph(graph);
    }
    scenario.validate().map_err(|e| CliError::Schema(e.to_string()))?;
    Ok(scenario)
}

fn node(n: &FileNode) -> CliResult<NodeSpec> {
    let data = match (n.data_mb, n.data_mb_per_peer) {
        (Some(m), None) => DataSpec::Total(m),
        (None, Some(d)) => DataSpec::PerPeer(d),
        _ => {
            return Err(CliError::Schema(format!(
                "node {}: give exactly one of `data_mb` and `data_mb_per_peer`",
                n.id
            )))
        }
    };
    Ok(NodeSpec {
        alpha: n.alpha,
        ..NodeSpec::new(n.id, n.join_s, n.leave_s, data, n.upload_mbps)
    })
}
