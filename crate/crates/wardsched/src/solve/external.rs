//! Driving an external LP/MILP engine through files.
//!
//! The engine is described by a command template such as
//! `cbc {lp} solve solution {sol}` or `gurobi_cl ResultFile={sol} {lp}`:
//! the system is written to `{lp}` in LP format, the command runs, and
//! `{sol}` is parsed back. Whatever the engine claims, the returned
//! point is verified against the original system here — a solution that
//! violates a row or an integrality mark is rejected, not passed along.
//! Optimality, by contrast, is the engine's claim and is reported as
//! received.

use std::process::Command;

use thiserror::Error;

use super::branch::{MilpSolution, SolveStatus};
use super::lp_format::write_lp;
use super::sol_file::{parse_solution, values_for_system, DeclaredStatus, SolParseError};
use crate::linear::{ConstraintSystem, VarKind};
use crate::num::Scalar;

/// Ways handing work to an external engine can fail.
#[derive(Debug, Error)]
pub enum ExternalError {
    #[error("could not launch `{command}`: {source}")]
    Launch {
        command: String,
        source: std::io::Error,
    },
    #[error("solver exited with status {code:?}; stderr:\n{stderr}")]
    Failed { code: Option<i32>, stderr: String },
    #[error("solver wrote no solution file at {path}")]
    MissingSolution { path: String },
    #[error(transparent)]
    Parse(#[from] SolParseError),
    #[error("solver returned a point that fails verification:\n{details}")]
    Rejected { details: String },
    #[error("workspace error: {0}")]
    Io(#[from] std::io::Error),
}

/// Solve `sys` by running `command`, a whitespace-separated template in
/// which `{lp}` and `{sol}` are replaced by the model and solution file
/// paths. The files live in a temporary directory that is cleaned up on
/// return.
pub fn solve_with_command<T: Scalar>(
    sys: &ConstraintSystem<T>,
    command: &str,
) -> Result<MilpSolution<T>, ExternalError> {
    let dir = tempfile::tempdir()?;
    let lp_path = dir.path().join("model.lp");
    let sol_path = dir.path().join("model.sol");
    std::fs::write(&lp_path, write_lp(sys))?;

    let tokens: Vec<String> = command
        .split_whitespace()
        .map(|t| {
            t.replace("{lp}", &lp_path.to_string_lossy())
                .replace("{sol}", &sol_path.to_string_lossy())
        })
        .collect();
    let Some((program, args)) = tokens.split_first() else {
        return Err(ExternalError::Launch {
            command: command.to_string(),
            source: std::io::Error::new(std::io::ErrorKind::InvalidInput, "empty command"),
        });
    };
    let output = Command::new(program)
        .args(args)
        .output()
        .map_err(|source| ExternalError::Launch {
            command: command.to_string(),
            source,
        })?;
    if !output.status.success() {
        return Err(ExternalError::Failed {
            code: output.status.code(),
            stderr: String::from_utf8_lossy(&output.stderr).into_owned(),
        });
    }

    let text = std::fs::read_to_string(&sol_path).map_err(|_| ExternalError::MissingSolution {
        path: sol_path.display().to_string(),
    })?;
    let parsed = parse_solution(&text)?;

    match parsed.status {
        Some(DeclaredStatus::Infeasible) => {
            return Ok(MilpSolution {
                status: SolveStatus::Infeasible,
                objective: T::infinity(),
                values: Vec::new(),
                bound: T::infinity(),
                nodes: 0,
            });
        }
        Some(DeclaredStatus::Unbounded) => {
            return Ok(MilpSolution {
                status: SolveStatus::Unbounded,
                objective: T::neg_infinity(),
                values: Vec::new(),
                bound: T::neg_infinity(),
                nodes: 0,
            });
        }
        _ => {}
    }

    // Snap integer marks to whole numbers, then verify the point against
    // the system we actually posed — not the engine's reading of it.
    let mut values = values_for_system(sys, &parsed);
    for (j, var) in sys.vars().iter().enumerate() {
        if var.kind != VarKind::Continuous {
            values[j] = values[j].round();
        }
    }
    let problems = sys.violations(&values, T::from_f64_const(1e-6));
    if !problems.is_empty() {
        return Err(ExternalError::Rejected {
            details: problems.join("\n"),
        });
    }

    let objective = sys.objective_value(&values);
    let status = match parsed.status {
        Some(DeclaredStatus::Feasible) => SolveStatus::Feasible,
        // A bare point (or an explicit Optimal header) is the engine
        // saying it finished; report that claim.
        _ => SolveStatus::Optimal,
    };
    let bound = match status {
        SolveStatus::Optimal => objective,
        _ => T::neg_infinity(),
    };
    Ok(MilpSolution {
        status,
        objective,
        values,
        bound,
        nodes: 0,
    })
}
