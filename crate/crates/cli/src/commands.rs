use std::io::Write;
use std::path::Path;
use std::time::Instant;

use anyhow::Context;
use seqfab::gates::{gate, GateName, GateSpec};
use seqfab::kraus::nogo_witness_report;
use seqfab::random::{haar_unitary, seeded_rng};
use seqfab::schmidt::{is_entangling, summarize, SchmidtSummary};
use seqfab::vmpo::{fidelity_gap, optimize, OptimizerConfig};
use seqfab::Error;
use serde::{Deserialize, Serialize};

use crate::args::{AnalyzeArgs, Cli, Command, DecomposeArgs, OptimizerArgs, Table1Args, WitnessArgs};
use crate::manifest::{utc_timestamp, ResultSummary, RunManifest, TOOL_VERSION};
use crate::matrix_file::read_matrix;
use crate::reference::{reference_fidelity, Status, TOLERANCE};
use crate::{bad_input, load_gate, runtime, Failure, EXIT_NOT_CONVERGED, EXIT_OK};

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> u8 {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = match cli.command {
        Command::Analyze(a) => analyze(&a, &mut out).map(|_| EXIT_OK),
        Command::Decompose(a) => decompose(&a, &mut out).map(|(_, code)| code),
        Command::Table1(a) => table1(&a, &mut out).map(|(_, code)| code),
        Command::Witness(a) => witness(&a, &mut out).map(|_| EXIT_OK),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {f}");
            f.exit_code()
        }
    }
}

/// Library errors caused by the caller's input map to exit code 2.
fn classify(e: Error) -> Failure {
    match e {
        Error::NoConvergence { .. } | Error::ZeroEnvironment => runtime(e),
        _ => bad_input(e),
    }
}

fn io(e: std::io::Error) -> Failure {
    runtime(e)
}

pub fn optimizer_config(opt: &OptimizerArgs) -> OptimizerConfig {
    OptimizerConfig {
        max_sweeps: opt.sweeps,
        tol: opt.tol,
        restarts: opt.restarts,
        seed: opt.seed,
        update_rule: opt.update.into(),
        init: opt.init.into(),
        schedule: opt.schedule.into(),
        ..OptimizerConfig::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeReport {
    pub gate: GateSpec,
    pub qubits: usize,
    pub cut: usize,
    pub unitary: bool,
    pub schmidt: SchmidtSummary,
}

pub fn analyze(args: &AnalyzeArgs, out: &mut impl Write) -> Result<AnalyzeReport, Failure> {
    let g = load_gate(&args.gate, args.phase)?;
    let qubits = g.spec.qubits;
    if args.cut == 0 || args.cut >= qubits {
        return Err(bad_input(anyhow::anyhow!("--cut must be between 1 and {} for a {qubits}-qubit gate", qubits - 1)));
    }
    let unitary = g.matrix.is_unitary(1e-8);
    if !unitary {
        eprintln!("warning: matrix is not unitary; analyzing it anyway");
    }
    let dim_a = 1 << args.cut;
    let dim_b = 1 << (qubits - args.cut);
    let schmidt = summarize(&g.matrix, dim_a, dim_b).map_err(classify)?;
    let report = AnalyzeReport {
        gate: g.spec,
        qubits,
        cut: args.cut,
        unitary,
        schmidt,
    };
    if args.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&report).map_err(runtime)?).map_err(io)?;
    } else {
        let s = &report.schmidt;
        let label = gate_label(&report.gate, &args.gate);
        writeln!(out, "gate             {label}").map_err(io)?;
        writeln!(out, "cut              {} | {} qubits ({dim_a} × {dim_b})", args.cut, qubits - args.cut).map_err(io)?;
        let coeffs: Vec<String> = s.coefficients[..s.schmidt_number].iter().map(|c| format!("{c:.6}")).collect();
        writeln!(out, "coefficients     {}", coeffs.join(" ")).map_err(io)?;
        writeln!(out, "schmidt number   {}", s.schmidt_number).map_err(io)?;
        writeln!(out, "schmidt strength {:.10}", s.schmidt_strength).map_err(io)?;
        writeln!(out, "entropy (bits)   {:.10}", s.schmidt_entropy_bits).map_err(io)?;
        writeln!(out, "entangling       {}", s.entangling).map_err(io)?;
    }
    Ok(report)
}

fn gate_label(spec: &GateSpec, raw: &str) -> String {
    match (spec.name, spec.phase) {
        (GateName::Custom, _) => raw.to_string(),
        (name, Some(phi)) => format!("{name}({phi})"),
        (name, None) => name.to_string(),
    }
}

/// Runs the optimizer and writes the manifest. The exit code is 3 when no
/// restart met the tolerance within the sweep limit.
pub fn decompose(args: &DecomposeArgs, out: &mut impl Write) -> Result<(RunManifest, u8), Failure> {
    let g = load_gate(&args.gate, args.phase)?;
    let cfg = optimizer_config(&args.opt);
    let start = Instant::now();
    let report = optimize(&g.matrix, g.spec.qubits, args.opt.ancilla_dim, args.rounds, &cfg).map_err(classify)?;
    let wall_time_ms = start.elapsed().as_millis() as u64;

    let manifest = RunManifest {
        command: "decompose".into(),
        config: cfg,
        gate_source: g.path.as_ref().map(|p| p.display().to_string()),
        gate: g.spec,
        ancilla_dim: args.opt.ancilla_dim,
        rounds: args.rounds,
        results: ResultSummary::from_report(&report),
        tool_version: TOOL_VERSION.into(),
        timestamp: utc_timestamp(),
        wall_time_ms,
    };
    if let Some(path) = &args.out {
        manifest.write(path).map_err(runtime)?;
    }
    if let Some(path) = &args.trace {
        write_trace(path, &report.cost_trace).map_err(runtime)?;
    }

    let r = &manifest.results;
    let label = gate_label(&manifest.gate, &args.gate);
    writeln!(out, "gate        {label}").map_err(io)?;
    writeln!(
        out,
        "layout      N = {}, D = {}, rounds = {}",
        manifest.gate.qubits, manifest.ancilla_dim, manifest.rounds
    )
    .map_err(io)?;
    writeln!(out, "fidelity    {:.10}", r.fidelity).map_err(io)?;
    writeln!(out, "gap         {:.10}", r.gap).map_err(io)?;
    writeln!(out, "cost        {:.10e}", r.cost).map_err(io)?;
    writeln!(out, "sweeps      {}", r.sweeps_used).map_err(io)?;
    writeln!(
        out,
        "converged   {}/{} restarts (best: #{})",
        r.converged_restarts, r.restarts_run, r.best_restart
    )
    .map_err(io)?;
    writeln!(out, "wall time   {wall_time_ms} ms").map_err(io)?;

    let code = if r.converged_restarts == 0 {
        eprintln!(
            "warning: no restart reached tol = {:e} within {} sweeps",
            manifest.config.tol, manifest.config.max_sweeps
        );
        EXIT_NOT_CONVERGED
    } else {
        EXIT_OK
    };
    Ok((manifest, code))
}

fn write_trace(path: &Path, trace: &[f64]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(["sweep", "cost"])?;
    for (i, c) in trace.iter().enumerate() {
        w.write_record([(i + 1).to_string(), c.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// One CSV row of the table reproduction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub gate: String,
    pub ancilla_dim: usize,
    pub rounds: usize,
    pub fidelity: f64,
    pub gap: f64,
    pub sweeps: usize,
    pub wall_time_ms: u64,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Entry {
    pub gate: String,
    pub ancilla_dim: usize,
    pub rounds: usize,
    pub fidelity: f64,
    pub gap: f64,
    pub sweeps: usize,
    pub wall_time_ms: u64,
    pub status: Status,
    pub reference: f64,
    pub converged: bool,
    pub converged_restarts: usize,
    /// Full cost trace of the best restart.
    pub cost_trace: Vec<f64>,
}

impl Table1Entry {
    pub fn row(&self) -> Table1Row {
        Table1Row {
            gate: self.gate.clone(),
            ancilla_dim: self.ancilla_dim,
            rounds: self.rounds,
            fidelity: self.fidelity,
            gap: self.gap,
            sweeps: self.sweeps,
            wall_time_ms: self.wall_time_ms,
            status: self.status,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Report {
    pub config: OptimizerConfig,
    pub ancilla_dim: usize,
    pub entries: Vec<Table1Entry>,
    pub tool_version: String,
    pub timestamp: String,
}

impl Table1Report {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.status == Status::Pass)
    }
}

pub fn write_table_csv(path: &Path, rows: &[Table1Row]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_table_csv(path: &Path) -> anyhow::Result<Vec<Table1Row>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

/// All six reference gates at one ancilla dimension. Exit code 3 if any
/// fidelity misses its reference by more than the tolerance.
pub fn table1(args: &Table1Args, out: &mut impl Write) -> Result<(Table1Report, u8), Failure> {
    let cfg = optimizer_config(&args.opt);
    let d = args.opt.ancilla_dim;
    eprintln!("note: CPHASE uses phase π/2 (controlled-S)");
    let mut entries = Vec::new();
    for name in GateName::TABLE {
        let spec = GateSpec::named(name, None).map_err(bad_input)?;
        let matrix = gate(&spec).map_err(bad_input)?;
        let start = Instant::now();
        let r = optimize(&matrix, spec.qubits, d, 1, &cfg).map_err(classify)?;
        let wall_time_ms = start.elapsed().as_millis() as u64;
        let reference = reference_fidelity(name).expect("table gate");
        if !r.converged {
            eprintln!("note: {name} stopped at the {}-sweep limit before reaching tol", cfg.max_sweeps);
        }
        if r.fidelity > reference + TOLERANCE {
            eprintln!("warning: {name} fidelity {:.6} exceeds the reference {reference}", r.fidelity);
        }
        entries.push(Table1Entry {
            gate: name.to_string(),
            ancilla_dim: d,
            rounds: 1,
            fidelity: r.fidelity,
            gap: fidelity_gap(&r),
            sweeps: r.sweeps_used,
            wall_time_ms,
            status: Status::check(r.fidelity, reference),
            reference,
            converged: r.converged,
            converged_restarts: r.converged_restarts,
            cost_trace: r.cost_trace,
        });
    }
    let report = Table1Report {
        config: cfg,
        ancilla_dim: d,
        entries,
        tool_version: TOOL_VERSION.into(),
        timestamp: utc_timestamp(),
    };

    if let Some(path) = &args.out {
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            let text = serde_json::to_string_pretty(&report).map_err(runtime)?;
            std::fs::write(path, text + "\n")
                .with_context(|| format!("writing {}", path.display()))
                .map_err(runtime)?;
        } else {
            let rows: Vec<_> = report.entries.iter().map(Table1Entry::row).collect();
            write_table_csv(path, &rows).map_err(runtime)?;
        }
    }

    writeln!(out, "{:<8} {:>2} {:>10} {:>9} {:>8} {:>6} {:>9}  status", "gate", "D", "fidelity", "reference", "gap", "sweeps", "time(ms)")
        .map_err(io)?;
    for e in &report.entries {
        writeln!(
            out,
            "{:<8} {:>2} {:>10.6} {:>9.4} {:>8.4} {:>6} {:>9}  {}",
            e.gate,
            e.ancilla_dim,
            e.fidelity,
            e.reference,
            e.gap,
            e.sweeps,
            e.wall_time_ms,
            e.status.as_str()
        )
        .map_err(io)?;
    }
    let code = if report.all_pass() { EXIT_OK } else { EXIT_NOT_CONVERGED };
    Ok((report, code))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessOutput {
    pub ancilla_dim: usize,
    /// Seed used for `--random` draws.
    pub seed: Option<u64>,
    pub u2a_entangling: bool,
    pub witness: f64,
    pub raw_witness: f64,
    pub natural_norms: Vec<f64>,
    pub aligned_norms: Vec<f64>,
}

pub fn witness(args: &WitnessArgs, out: &mut impl Write) -> Result<WitnessOutput, Failure> {
    let d = args.ancilla_dim;
    let (u1a, u2a, seed) = if args.random {
        let mut rng = seeded_rng(args.seed);
        (haar_unitary(2 * d, &mut rng), haar_unitary(2 * d, &mut rng), Some(args.seed))
    } else {
        let (p1, p2) = match (&args.u1a, &args.u2a) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(bad_input(anyhow::anyhow!("give two matrix files or --random"))),
        };
        (read_matrix(p1).map_err(bad_input)?, read_matrix(p2).map_err(bad_input)?, None)
    };
    for (label, m) in [("U1a", &u1a), ("U2a", &u2a)] {
        if m.shape() != (2 * d, 2 * d) {
            return Err(bad_input(anyhow::anyhow!(
                "{label} must be {0}×{0} for --ancilla-dim {d}, got {1}×{2}",
                2 * d,
                m.rows(),
                m.cols()
            )));
        }
    }
    let report = nogo_witness_report(&u1a, &u2a, d).map_err(classify)?;
    let output = WitnessOutput {
        ancilla_dim: d,
        seed,
        u2a_entangling: is_entangling(&u2a, 2, d).map_err(classify)?,
        witness: report.witness,
        raw_witness: report.raw_witness,
        natural_norms: report.natural_norms,
        aligned_norms: report.aligned_norms,
    };
    if args.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&output).map_err(runtime)?).map_err(io)?;
    } else {
        let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.6e}")).collect::<Vec<_>>().join(" ");
        writeln!(out, "witness            {:.10e}", output.witness).map_err(io)?;
        writeln!(out, "raw witness        {:.10e}", output.raw_witness).map_err(io)?;
        writeln!(out, "‖E_k‖ natural      {}", fmt(&output.natural_norms)).map_err(io)?;
        writeln!(out, "‖E_k‖ aligned      {}", fmt(&output.aligned_norms)).map_err(io)?;
        writeln!(out, "U2a entangling     {}", output.u2a_entangling).map_err(io)?;
    }
    Ok(output)
}
