//! Published single-round fidelities with a two-level ancilla.

use seqfab::gates::GateName;

/// Allowed deviation from a reference fidelity.
pub const TOLERANCE: f64 = 1e-3;

#[allow(clippy::approx_constant)]
pub const TABLE1: [(GateName, f64); 6] = [
    (GateName::Cnot, 0.7071),
    (GateName::Cz, 0.7071),
    (GateName::Cphase, 0.9239),
    (GateName::Swap, 0.50),
    (GateName::Toffoli, 0.75),
    (GateName::Fredkin, 0.75),
];

pub fn reference_fidelity(name: GateName) -> Option<f64> {
    TABLE1.iter().find(|(g, _)| *g == name).map(|&(_, f)| f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn check(fidelity: f64, reference: f64) -> Self {
        if (fidelity - reference).abs() <= TOLERANCE {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_table_gate_has_a_reference() {
        for g in GateName::TABLE {
            assert!(reference_fidelity(g).is_some());
        }
        assert_eq!(reference_fidelity(GateName::Custom), None);
    }

    #[test]
    fn status_uses_tolerance() {
        assert_eq!(Status::check(0.9240, 0.9239), Status::Pass);
        assert_eq!(Status::check(0.9252, 0.9239), Status::Fail);
    }
}
