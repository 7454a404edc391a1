use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::update::{coupling_from_unitary, pauli_gradient_ascent};
use super::{
    cost, lift_target, local_update_procrustes, real_overlap, CostBreakdown, Layout, Schedule,
    SequentialCircuit,
};
use crate::error::{Error, Result};
use crate::random::{haar_unitary, stream_rng};
use crate::tensor::ComplexMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateRule {
    /// Closed-form SVD maximizer of the site overlap.
    #[default]
    Procrustes,
    /// Finite-difference gradient ascent on the Pauli couplings of the site.
    PauliGradient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitStrategy {
    #[default]
    HaarRandom,
    Identity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub max_sweeps: usize,
    /// Stop once a sweep lowers the cost by less than this.
    pub tol: f64,
    pub restarts: usize,
    pub seed: u64,
    pub update_rule: UpdateRule,
    pub init: InitStrategy,
    pub schedule: Schedule,
    /// Gradient steps per site visit (Pauli-gradient rule only).
    pub pauli_steps: usize,
    /// Initial ascent rate (Pauli-gradient rule only).
    pub pauli_rate: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            max_sweeps: 500,
            tol: 1e-10,
            restarts: 8,
            seed: 0,
            update_rule: UpdateRule::Procrustes,
            init: InitStrategy::HaarRandom,
            schedule: Schedule::Alternating,
            pauli_steps: 30,
            pauli_rate: 0.5,
        }
    }
}

impl OptimizerConfig {
    fn validate(&self) -> Result<()> {
        if self.max_sweeps == 0 {
            return Err(Error::InvalidConfig("max_sweeps must be positive".into()));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be positive".into()));
        }
        if !(self.tol.is_finite() && self.tol >= 0.0) {
            return Err(Error::InvalidConfig(format!("tol must be finite and ≥ 0, got {}", self.tol)));
        }
        if self.update_rule == UpdateRule::PauliGradient
            && (self.pauli_steps == 0 || !(self.pauli_rate > 0.0 && self.pauli_rate.is_finite()))
        {
            return Err(Error::InvalidConfig("Pauli-gradient steps and rate must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationReport {
    /// Frobenius cost `C` of the best circuit.
    pub cost: f64,
    /// `C / (2·2^N·D)`.
    pub normalized_cost: f64,
    /// `1 − normalized_cost`.
    pub fidelity: f64,
    pub sweeps_used: usize,
    pub converged: bool,
    /// Cost after each sweep of the best restart.
    pub cost_trace: Vec<f64>,
    pub best_circuit: SequentialCircuit,
    pub restarts_run: usize,
    /// Index of the restart that produced the best circuit.
    pub best_restart: usize,
    /// How many restarts met the tolerance before `max_sweeps`.
    pub converged_restarts: usize,
}

/// `1 − F`.
pub fn fidelity_gap(report: &OptimizationReport) -> f64 {
    1.0 - report.fidelity
}

/// Best sequential approximation of an `N`-qubit gate with a `D`-level
/// ancilla over `rounds` passes. The gate is lifted to `gate ⊗ 𝟙_D`.
pub fn optimize(
    target_gate: &ComplexMatrix,
    n_qubits: usize,
    ancilla_dim: usize,
    rounds: usize,
    cfg: &OptimizerConfig,
) -> Result<OptimizationReport> {
    target_gate.ensure_square(1usize << n_qubits.min(16), "target gate")?;
    target_gate.ensure_unitary(1e-8)?;
    optimize_lifted(&lift_target(target_gate, ancilla_dim), n_qubits, ancilla_dim, rounds, cfg)
}

/// Like [`optimize`] with an already lifted `2^N·D`-dimensional target.
pub fn optimize_lifted(
    target: &ComplexMatrix,
    n_qubits: usize,
    ancilla_dim: usize,
    rounds: usize,
    cfg: &OptimizerConfig,
) -> Result<OptimizationReport> {
    cfg.validate()?;
    // Validates the layout.
    let template = SequentialCircuit::identity(n_qubits, ancilla_dim, rounds, cfg.schedule)?;
    target.ensure_square(template.global_dim(), "lifted target")?;
    if cfg.update_rule == UpdateRule::PauliGradient && !(ancilla_dim == 2 || ancilla_dim == 4) {
        return Err(Error::UnsupportedAncillaDim(ancilla_dim));
    }

    let runs: Vec<Result<RestartOutcome>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|restart| run_restart(target, &template, cfg, restart))
        .collect();
    let runs: Vec<RestartOutcome> = runs.into_iter().collect::<Result<_>>()?;

    let converged_restarts = runs.iter().filter(|r| r.converged).count();
    // Highest fidelity wins; ties go to the lower restart index.
    let best = runs
        .into_iter()
        .reduce(|a, b| if b.fidelity > a.fidelity { b } else { a })
        .expect("at least one restart");

    let final_cost = cost(&best.circuit, target)?;
    Ok(OptimizationReport {
        cost: final_cost.cost,
        normalized_cost: final_cost.normalized_cost,
        fidelity: final_cost.fidelity,
        sweeps_used: best.cost_trace.len(),
        converged: best.converged,
        cost_trace: best.cost_trace,
        best_circuit: best.circuit,
        restarts_run: cfg.restarts,
        best_restart: best.restart,
        converged_restarts,
    })
}

struct RestartOutcome {
    restart: usize,
    circuit: SequentialCircuit,
    fidelity: f64,
    cost_trace: Vec<f64>,
    converged: bool,
}

fn run_restart(
    target: &ComplexMatrix,
    template: &SequentialCircuit,
    cfg: &OptimizerConfig,
    restart: usize,
) -> Result<RestartOutcome> {
    let mut circuit = template.clone();
    let site_dim = 2 * circuit.ancilla_dim();
    if cfg.init == InitStrategy::HaarRandom {
        let mut rng = stream_rng(cfg.seed, restart as u64);
        for u in circuit.sites_mut() {
            *u = haar_unitary(site_dim, &mut rng);
        }
    }

    let m = circuit.global_dim();
    let mut sweeper = Sweeper {
        layout: circuit.layout(),
        qubits: circuit.site_qubits(),
        target_adj: target.adjoint(),
        cfg,
        m,
    };
    let mut previous = cost(&circuit, target)?.cost;
    let mut cost_trace = Vec::new();
    let mut converged = false;
    for _ in 0..cfg.max_sweeps {
        let overlap = sweeper.sweep(&mut circuit)?;
        let c = CostBreakdown::from_overlap(overlap, m).cost;
        cost_trace.push(c);
        if previous - c < cfg.tol {
            converged = true;
            break;
        }
        previous = c;
    }
    let fidelity = cost(&circuit, target)?.fidelity;
    Ok(RestartOutcome {
        restart,
        circuit,
        fidelity,
        cost_trace,
        converged,
    })
}

struct Sweeper<'a> {
    layout: Layout,
    qubits: Vec<usize>,
    target_adj: ComplexMatrix,
    cfg: &'a OptimizerConfig,
    m: usize,
}

impl Sweeper<'_> {
    /// One left-to-right and right-to-left pass; returns `Re Tr[T†·U_seq]` afterwards.
    fn sweep(&mut self, circuit: &mut SequentialCircuit) -> Result<f64> {
        let n = circuit.len();
        let dim = self.layout.dim();
        let sites = circuit.sites_mut();

        // Forward: tails[s] = T†·emb(U_{n−1})···emb(U_{s+1}) is fixed while
        // sites below s change.
        let mut tails = vec![self.target_adj.clone(); n];
        for s in (0..n.saturating_sub(1)).rev() {
            tails[s] = self.layout.apply_right(&tails[s + 1], &sites[s + 1], self.qubits[s + 1]);
        }
        let mut head = ComplexMatrix::identity(dim);
        let mut overlap = 0.0;
        for s in 0..n {
            overlap = self.update_site(&mut sites[s], &head, &tails[s], self.qubits[s])?;
            head = self.layout.apply_left(&sites[s], self.qubits[s], &head);
        }

        // Backward, skipping the last site which was just optimized.
        if n > 1 {
            let mut heads = vec![ComplexMatrix::identity(dim); n];
            for s in 1..n {
                heads[s] = self.layout.apply_left(&sites[s - 1], self.qubits[s - 1], &heads[s - 1]);
            }
            let mut tail = self.layout.apply_right(&self.target_adj, &sites[n - 1], self.qubits[n - 1]);
            for s in (0..n - 1).rev() {
                overlap = self.update_site(&mut sites[s], &heads[s], &tail, self.qubits[s])?;
                tail = self.layout.apply_right(&tail, &sites[s], self.qubits[s]);
            }
        }
        Ok(overlap)
    }

    fn update_site(
        &self,
        site: &mut ComplexMatrix,
        head: &ComplexMatrix,
        tail: &ComplexMatrix,
        qubit: usize,
    ) -> Result<f64> {
        let env = self.layout.environment_from(head, tail, qubit);
        let before = real_overlap(&env, site);
        let candidate = match self.cfg.update_rule {
            UpdateRule::Procrustes => match local_update_procrustes(&env) {
                Ok(u) => u,
                Err(Error::ZeroEnvironment) => return Ok(before),
                Err(e) => return Err(e),
            },
            UpdateRule::PauliGradient => {
                let h = coupling_from_unitary(site, site.rows() / 2)?;
                pauli_gradient_ascent(&env, &h, self.m as f64, self.cfg.pauli_steps, self.cfg.pauli_rate)?.0
            }
        };
        let after = real_overlap(&env, &candidate);
        // Keep the old site if the update does not help (ties or rounding).
        if after >= before {
            *site = candidate;
            Ok(after)
        } else {
            Ok(before)
        }
    }
}
