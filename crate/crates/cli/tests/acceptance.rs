//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use seqfab::gates::{gate, GateName, GateSpec};
use seqfab::kraus::{apply_channel, correlation_sensitivity, kraus_from_dilation, nogo_witness};
use seqfab::random::{haar_unitary, noisy_pure_state, seeded_rng, wishart_density, SeededRng};
use seqfab::schmidt::is_entangling;
use seqfab::tensor::{kron, kron_all, svd};
use seqfab::vmpo::{
    coupling_from_unitary, coupling_gradient, environment, lift_target, optimize, seq_to_global, OptimizerConfig,
    Schedule, SequentialCircuit,
};
use seqfab::{ComplexMatrix, FactorShape, C64};
use seqfab_cli::commands::Table1Report;
use seqfab_cli::manifest::RunManifest;

/// Published single-round fidelities at D = 2.
#[allow(clippy::approx_constant)]
const PUBLISHED: [(&str, f64); 6] = [
    ("CNOT", 0.7071),
    ("CZ", 0.7071),
    ("CPHASE", 0.9239),
    ("SWAP", 0.50),
    ("TOFFOLI", 0.75),
    ("FREDKIN", 0.75),
];
const TABLE_TOL: f64 = 1e-3;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn seqfab(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_seqfab"))
        .args(args)
        .env_remove("SEQFAB_SEED")
        .output()
        .expect("seqfab binary runs")
}

fn run_table(dir: &Path, d: usize) -> Result<(Table1Report, Duration), String> {
    let out = dir.join(format!("table1_d{d}.json"));
    let start = Instant::now();
    let o = seqfab(&[
        "table1",
        "--ancilla-dim",
        &d.to_string(),
        "--restarts",
        "8",
        "--out",
        out.to_str().unwrap(),
    ]);
    let elapsed = start.elapsed();
    let text = std::fs::read_to_string(&out).map_err(|e| {
        format!(
            "no table output (exit {:?}): {e}; stderr: {}",
            o.status.code(),
            String::from_utf8_lossy(&o.stderr)
        )
    })?;
    let report = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    Ok((report, elapsed))
}

fn fidelity_of(report: &Table1Report, gate: &str) -> f64 {
    report.entries.iter().find(|e| e.gate == gate).map(|e| e.fidelity).unwrap_or(f64::NAN)
}

fn criterion_1(d2: &Result<(Table1Report, Duration), String>) -> Outcome {
    let (report, elapsed) = match d2 {
        Ok(r) => r,
        Err(e) => return outcome(false, e.clone()),
    };
    let mut pass = elapsed.as_secs_f64() < 120.0;
    let mut parts = Vec::new();
    for (g, expect) in PUBLISHED {
        let f = fidelity_of(report, g);
        let ok = (f - expect).abs() <= TABLE_TOL;
        pass &= ok;
        parts.push(format!("{g} {f:.6}{}", if ok { "" } else { " (off)" }));
    }
    outcome(pass, format!("{}; {:.1}s", parts.join(", "), elapsed.as_secs_f64()))
}

fn criterion_2(d2: &Result<(Table1Report, Duration), String>, d4: &Result<(Table1Report, Duration), String>) -> Outcome {
    let ((r2, _), (r4, elapsed)) = match (d2, d4) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return outcome(false, e.clone()),
    };
    let mut worst = 0.0f64;
    for (g, _) in PUBLISHED {
        worst = worst.max((fidelity_of(r2, g) - fidelity_of(r4, g)).abs());
    }
    let pass = worst <= TABLE_TOL && elapsed.as_secs_f64() < 600.0;
    outcome(pass, format!("max |F(D=4) − F(D=2)| = {worst:.2e}; {:.1}s", elapsed.as_secs_f64()))
}

fn analyze_strength(gate: &str) -> Result<f64, String> {
    let o = seqfab(&["analyze", gate, "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).map_err(|e| e.to_string())?;
    v["schmidt"]["schmidt_strength"].as_f64().ok_or_else(|| "missing strength".into())
}

fn criterion_3(d2: &Result<(Table1Report, Duration), String>) -> Outcome {
    let (cnot, swap) = match (analyze_strength("CNOT"), analyze_strength("SWAP")) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return outcome(false, e),
    };
    let exact = (cnot - 0.5).abs() <= 1e-9 && (swap - 0.75).abs() <= 1e-9;
    let (gap_cnot, gap_swap) = match d2 {
        Ok((r, _)) => (1.0 - fidelity_of(r, "CNOT"), 1.0 - fidelity_of(r, "SWAP")),
        Err(e) => return outcome(false, e.clone()),
    };
    let monotone = cnot < swap && gap_cnot < gap_swap;
    outcome(
        exact && monotone,
        format!("strength CNOT {cnot:.12}, SWAP {swap:.12}; gap CNOT {gap_cnot:.4} < SWAP {gap_swap:.4}: {monotone}"),
    )
}

fn criterion_4(dir: &Path) -> Outcome {
    let path = dir.join("cnot_r2.json");
    let o = seqfab(&["decompose", "CNOT", "--rounds", "2", "--out", path.to_str().unwrap()]);
    match RunManifest::read(&path) {
        Ok(m) => {
            let f = m.results.fidelity;
            outcome(f >= 1.0 - 1e-6 && o.status.code() == Some(0), format!("F = {f:.12}"))
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

/// Schmidt rank of `u·|0⟩_q|0⟩_a` across the qubit–ancilla cut.
fn state_schmidt_rank(u: &ComplexMatrix, d: usize) -> usize {
    let col: Vec<C64> = (0..2 * d).map(|i| u[(i, 0)]).collect();
    let m = ComplexMatrix::from_vec(2, d, col).unwrap();
    let s = svd(&m).unwrap().singular_values;
    s.iter().filter(|&&x| x > 1e-10 * s[0]).count()
}

fn criterion_5() -> Outcome {
    let mut rng = seeded_rng(2024);
    let mut min_entangling = f64::INFINITY;
    let mut drawn = 0;
    while drawn < 100 {
        let d = [2, 3, 4][drawn % 3];
        let u1a = haar_unitary(2 * d, &mut rng);
        let u2a = haar_unitary(2 * d, &mut rng);
        if state_schmidt_rank(&u1a, d) < 2 || !is_entangling(&u2a, 2, d).unwrap() {
            continue;
        }
        drawn += 1;
        min_entangling = min_entangling.min(nogo_witness(&u1a, &u2a, d).unwrap());
    }
    let mut max_product = 0.0f64;
    for i in 0..100 {
        let d = [2, 3, 4][i % 3];
        let u2a = kron(&haar_unitary(2, &mut rng), &haar_unitary(d, &mut rng));
        max_product = max_product.max(nogo_witness(&ComplexMatrix::identity(2 * d), &u2a, d).unwrap());
    }
    outcome(
        min_entangling > 0.0 && max_product <= 1e-9,
        format!("min entangling witness {min_entangling:.3e}; max product witness {max_product:.3e}"),
    )
}

/// `Tr_a[U·(ρ ⊗ |0⟩⟨0|)·U†]` by explicit index sums.
fn dilation_oracle(u: &ComplexMatrix, rho: &ComplexMatrix, d: usize) -> ComplexMatrix {
    let n = rho.rows();
    ComplexMatrix::from_fn(n, n, |i, j| {
        let mut acc = C64::new(0.0, 0.0);
        for a in 0..d {
            for p in 0..n {
                for q in 0..n {
                    acc += u[(i * d + a, p * d)] * rho[(p, q)] * u[(j * d + a, q * d)].conj();
                }
            }
        }
        acc
    })
}

fn criterion_6() -> Outcome {
    let mut rng = seeded_rng(606);
    let (mut worst_complete, mut worst_channel) = (0.0f64, 0.0f64);
    for i in 0..100 {
        let d = [2, 3, 4][i % 3];
        let u = haar_unitary(4 * d, &mut rng);
        let k = kraus_from_dilation(&u, &FactorShape::new(vec![2, 2, d]).unwrap(), 0).unwrap();
        worst_complete = worst_complete.max(k.completeness_error());
        let rho = wishart_density(4, &mut rng);
        let diff = &apply_channel(&k, &rho).unwrap() - &dilation_oracle(&u, &rho, d);
        worst_channel = worst_channel.max(diff.frobenius_norm());
    }
    outcome(
        worst_complete <= 1e-10 && worst_channel <= 1e-10,
        format!("completeness {worst_complete:.2e}; channel vs dilation {worst_channel:.2e}"),
    )
}

fn random_sequential(rng: &mut SeededRng, d: usize) -> ComplexMatrix {
    let sites = (0..2).map(|_| haar_unitary(2 * d, rng)).collect();
    seq_to_global(&SequentialCircuit::new(2, d, 1, Schedule::Alternating, sites).unwrap())
}

fn criterion_7() -> Outcome {
    let mut rng = seeded_rng(707);
    let d = 2;
    let shape = FactorShape::new(vec![2, 2, d]).unwrap();
    let mut worst_factorized = 0.0f64;
    let mut best_sequential = 0.0f64;
    for _ in 0..100 {
        let rho = noisy_pure_state(4 * d, 0.5, &mut rng);
        let fact = kron(&haar_unitary(4, &mut rng), &haar_unitary(d, &mut rng));
        worst_factorized = worst_factorized.max(correlation_sensitivity(&fact, &rho, &shape).unwrap());
        let seq = random_sequential(&mut rng, d);
        best_sequential = best_sequential.max(correlation_sensitivity(&seq, &rho, &shape).unwrap());
    }
    outcome(
        worst_factorized <= 1e-10 && best_sequential > 1e-3,
        format!("factorized max {worst_factorized:.2e}; sequential max {best_sequential:.3e}"),
    )
}

fn criterion_8(tables: &[&Result<(Table1Report, Duration), String>]) -> Outcome {
    let mut worst_rise = f64::NEG_INFINITY;
    let mut runs = 0;
    for t in tables {
        match t {
            Ok((r, _)) => {
                for e in &r.entries {
                    runs += 1;
                    for w in e.cost_trace.windows(2) {
                        worst_rise = worst_rise.max(w[1] - w[0]);
                    }
                }
            }
            Err(e) => return outcome(false, e.clone()),
        }
    }
    let monotone = worst_rise <= 1e-12;

    let cnot = gate(&GateSpec::named(GateName::Cnot, None).unwrap()).unwrap();
    let report = optimize(&cnot, 2, 2, 1, &OptimizerConfig::default()).unwrap();
    let target = lift_target(&cnot, 2);
    let c = &report.best_circuit;
    let mut grad_inf = 0.0f64;
    for s in 0..c.len() {
        let env = environment(c, &target, s).unwrap();
        let h = coupling_from_unitary(&c.unitaries()[s], 2).unwrap();
        let g = coupling_gradient(&env, &h, c.global_dim() as f64).unwrap();
        grad_inf = grad_inf.max(g.iter().fold(0.0f64, |m, x| m.max(x.abs())));
    }
    outcome(
        monotone && grad_inf <= 1e-5,
        format!("{runs} runs, max per-sweep rise {worst_rise:.2e}; CNOT ‖∇F‖∞ = {grad_inf:.2e}"),
    )
}

fn criterion_9() -> Outcome {
    let mut rng = seeded_rng(909);
    let cfg = OptimizerConfig::default();
    let mut worst = f64::INFINITY;
    for n in [2, 3] {
        for _ in 0..3 {
            let locals: Vec<_> = (0..n).map(|_| haar_unitary(2, &mut rng)).collect();
            let target = kron_all(&locals);
            worst = worst.min(optimize(&target, n, 2, 1, &cfg).unwrap().fidelity);
        }
    }
    outcome(worst >= 1.0 - 1e-9, format!("min F = {worst:.12}"))
}

fn main() -> ExitCode {
    let dir = tempfile::tempdir().expect("temp dir");
    let d2 = run_table(dir.path(), 2);
    let d4 = run_table(dir.path(), 4);

    let results = [
        ("1 reference fidelities at D = 2", criterion_1(&d2)),
        ("2 D = 4 reproduces D = 2", criterion_2(&d2, &d4)),
        ("3 Schmidt strengths and gap ordering", criterion_3(&d2)),
        ("4 two-round CNOT is exact", criterion_4(dir.path())),
        ("5 decoupling witness", criterion_5()),
        ("6 Kraus completeness and channel", criterion_6()),
        ("7 correlation insensitivity", criterion_7()),
        ("8 optimizer monotonicity and stationarity", criterion_8(&[&d2, &d4])),
        ("9 product targets are exact", criterion_9()),
    ];
    let mut all = true;
    for (name, o) in &results {
        println!("{} criterion {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        all &= o.pass;
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
