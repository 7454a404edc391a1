use std::fs;
use std::path::Path;

use anyhow::Context;
use seqfab::gates::GateSpec;
use seqfab::vmpo::{fidelity_gap, OptimizationReport, OptimizerConfig};
use serde::{Deserialize, Serialize};

use crate::matrix_file::MatrixFile;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything needed to reproduce and audit one decomposition run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: OptimizerConfig,
    pub gate: GateSpec,
    /// Matrix file for custom gates.
    pub gate_source: Option<String>,
    pub ancilla_dim: usize,
    pub rounds: usize,
    pub results: ResultSummary,
    pub tool_version: String,
    /// UTC, RFC 3339.
    pub timestamp: String,
    pub wall_time_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultSummary {
    pub cost: f64,
    pub normalized_cost: f64,
    pub fidelity: f64,
    pub gap: f64,
    pub sweeps_used: usize,
    pub converged: bool,
    pub restarts_run: usize,
    pub converged_restarts: usize,
    pub best_restart: usize,
    pub cost_trace: Vec<f64>,
    /// Qubit touched by each site, in application order.
    pub site_qubits: Vec<usize>,
    pub best_circuit: Vec<MatrixFile>,
}

impl ResultSummary {
    pub fn from_report(r: &OptimizationReport) -> Self {
        Self {
            cost: r.cost,
            normalized_cost: r.normalized_cost,
            fidelity: r.fidelity,
            gap: fidelity_gap(r),
            sweeps_used: r.sweeps_used,
            converged: r.converged,
            restarts_run: r.restarts_run,
            converged_restarts: r.converged_restarts,
            best_restart: r.best_restart,
            cost_trace: r.cost_trace.clone(),
            site_qubits: r.best_circuit.site_qubits(),
            best_circuit: r.best_circuit.unitaries().iter().map(MatrixFile::from_matrix).collect(),
        }
    }
}

pub fn utc_timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

impl RunManifest {
    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        fs::write(path, text + "\n").with_context(|| format!("writing manifest {}", path.display()))
    }

    pub fn read(path: &Path) -> anyhow::Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading manifest {}", path.display()))?;
        Ok(serde_json::from_str(&text)?)
    }
}
