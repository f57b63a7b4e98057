use std::fmt;
use std::path::Path;

use serde_json::{json, Value};

/// Process exit status: 1 for compute failures, 2 for bad input.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitKind {
    Compute = 1,
    Input = 2,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ExitKind,
    pub message: String,
    /// Machine-readable details printed to stderr.
    pub detail: Option<Value>,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            kind: ExitKind::Input,
            message: message.into(),
            detail: None,
        }
    }

    pub fn output(path: &Path, e: std::io::Error) -> Self {
        CliError {
            kind: ExitKind::Compute,
            message: format!("{}: {e}", path.display()),
            detail: None,
        }
    }

    pub fn read(path: &Path, e: gmspec::Error) -> Self {
        let mut err = CliError::from(e);
        err.message = format!("{}: {}", path.display(), err.message);
        err
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<gmspec::Error> for CliError {
    fn from(e: gmspec::Error) -> Self {
        use gmspec::Error as E;
        let kind = match &e {
            E::Parse { .. } | E::Range { .. } | E::EmptyInput | E::BadCache(_) | E::InvalidArgument(_) => {
                ExitKind::Input
            }
            _ => ExitKind::Compute,
        };
        let detail = match &e {
            E::NotConverged {
                iterations,
                residual,
                ..
            } => Some(json!({
                "error": "not_converged",
                "iterations": iterations,
                "residual": gmspec::export::json_sig(*residual),
            })),
            E::EigenNotConverged { unconverged } => Some(json!({
                "error": "eigen_not_converged",
                "unconverged": unconverged,
            })),
            E::MemoryBudget { required, budget } => Some(json!({
                "error": "memory_budget",
                "required_bytes": required,
                "budget_bytes": budget,
            })),
            E::Capacity { subspace, dim, limit } => Some(json!({
                "error": "capacity",
                "subspace": subspace + 1,
                "dim": dim,
                "limit": limit,
            })),
            _ => None,
        };
        CliError {
            kind,
            message: e.to_string(),
            detail,
        }
    }
}
