use alloc::string::String;

/// Errors raised by the simulation core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{name} = {value} is outside [{lo}, {hi}]")]
    Domain {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// A map drifted further from trace preservation or positivity than
    /// rounding can explain.
    #[error("internal consistency violated: {0}")]
    Consistency(String),

    #[error("qubit index {index} out of range for a {n_qubits}-qubit state")]
    QubitIndex { index: usize, n_qubits: usize },

    #[error("two-qubit operation needs distinct qubits, got {0} twice")]
    DuplicateQubit(usize),

    #[error("gate is not unitary (deviation {0:e})")]
    NonUnitary(f64),

    #[error("scheme {0} is not valid here")]
    InvalidScheme(char),

    #[error("fixpoint iteration did not converge within {0} iterations")]
    NoConvergence(usize),

    #[error("target fidelity {target} is unreachable from fidelity {start}")]
    Unreachable { start: f64, target: f64 },

    /// The connect/re-purify loop fails to restore the working fidelity.
    #[error("purification loop does not close at level {level} (fidelity after connection {connected})")]
    LoopOpen { level: usize, connected: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn check_unit(name: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            value,
            lo: 0.0,
            hi: 1.0,
        })
    }
}
