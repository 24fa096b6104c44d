//! Parsing solution files written by external LP/MILP engines.
//!
//! Two shapes cover the tools people actually point this at:
//!
//! * plain `name value` pairs, one per line, with `#` comments — the
//!   format several commercial engines write;
//! * a status header line (`Optimal - objective value ...`) followed by
//!   `index name value [reduced cost]` rows, optionally prefixed with
//!   `**` — the open-source branch-and-cut convention.
//!
//! The shape is auto-detected from the first meaningful line. Values for
//! variables a file does not mention default to zero, matching how the
//! writers omit zeros.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::linear::ConstraintSystem;
use crate::num::Scalar;

/// Parse failure with the 1-based source line.
#[derive(Debug, Error)]
#[error("solution line {line}: {message}")]
pub struct SolParseError {
    pub line: usize,
    pub message: String,
}

/// What the engine claims about its result. Feasibility is always
/// re-checked independently; optimality claims are taken at face value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeclaredStatus {
    Optimal,
    /// A usable point without an optimality proof (e.g. hit a limit).
    Feasible,
    Infeasible,
    Unbounded,
}

/// A parsed solution file.
#[derive(Debug, Clone)]
pub struct ParsedSolution {
    /// Status from the header line, when the format carries one.
    pub status: Option<DeclaredStatus>,
    pub values: BTreeMap<String, f64>,
}

impl ParsedSolution {
    /// Whether the file says there is no point worth reading.
    pub fn declared_hopeless(&self) -> bool {
        matches!(
            self.status,
            Some(DeclaredStatus::Infeasible) | Some(DeclaredStatus::Unbounded)
        )
    }
}

fn header_status(first_token: &str) -> Option<DeclaredStatus> {
    match first_token.to_ascii_lowercase().as_str() {
        "optimal" => Some(DeclaredStatus::Optimal),
        "infeasible" => Some(DeclaredStatus::Infeasible),
        "integer" => Some(DeclaredStatus::Infeasible), // "Integer infeasible"
        "unbounded" => Some(DeclaredStatus::Unbounded),
        "stopped" => Some(DeclaredStatus::Feasible),
        _ => None,
    }
}

/// Parse a solution file of either supported shape.
pub fn parse_solution(text: &str) -> Result<ParsedSolution, SolParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let Some((first_no, first)) = lines.clone().find(|(_, l)| !l.starts_with('#')) else {
        return Err(SolParseError {
            line: 1,
            message: "no content in solution file".into(),
        });
    };
    let first_token = first.split_whitespace().next().unwrap_or("");
    let status = header_status(first_token);

    let mut values = BTreeMap::new();
    if let Some(status) = status {
        // Header + indexed rows.
        for (line, l) in lines.by_ref() {
            if line <= first_no || l.starts_with('#') {
                continue;
            }
            let mut toks: Vec<&str> = l.split_whitespace().collect();
            if toks.first() == Some(&"**") {
                toks.remove(0);
            }
            // Rows read `index name value [reduced cost]`; tolerate a
            // missing index column.
            let (name, value) = match toks.as_slice() {
                [idx, name, value, ..] if idx.parse::<u64>().is_ok() => (*name, *value),
                [name, value] => (*name, *value),
                _ => {
                    return Err(SolParseError {
                        line,
                        message: format!("unrecognized solution row {l:?}"),
                    });
                }
            };
            let v: f64 = value.parse().map_err(|_| SolParseError {
                line,
                message: format!("bad value {value:?}"),
            })?;
            values.insert(name.to_string(), v);
        }
        Ok(ParsedSolution {
            status: Some(status),
            values,
        })
    } else {
        // Plain pairs.
        for (line, l) in lines {
            if l.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = l.split_whitespace().collect();
            let [name, value] = toks.as_slice() else {
                return Err(SolParseError {
                    line,
                    message: format!("expected `name value`, found {l:?}"),
                });
            };
            let v: f64 = value.parse().map_err(|_| SolParseError {
                line,
                message: format!("bad value {value:?}"),
            })?;
            values.insert(name.to_string(), v);
        }
        Ok(ParsedSolution {
            status: None,
            values,
        })
    }
}

/// Lay the parsed values out in a system's variable order. Variables the
/// file does not mention get zero; names the system does not know are
/// ignored (engines sometimes emit their own bookkeeping columns).
pub fn values_for_system<T: Scalar>(sys: &ConstraintSystem<T>, sol: &ParsedSolution) -> Vec<T> {
    let mut out = vec![T::zero(); sys.num_vars()];
    for (name, &v) in &sol.values {
        if let Some(id) = sys.var_by_name(name) {
            out[id.0] = T::from_f64_const(v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear::{ConstraintSystem, VarKind};

    #[test]
    fn plain_pairs_with_comments() {
        let text = "# Solution for model staffing\n\
                    # Objective value = 2.1000000000e+01\n\
                    x_a 1\n\
                    x_b 0\n\
                    level 2.5e-1\n";
        let sol = parse_solution(text).expect("parses");
        assert_eq!(sol.status, None);
        assert_eq!(sol.values["x_a"], 1.0);
        assert_eq!(sol.values["x_b"], 0.0);
        assert_eq!(sol.values["level"], 0.25);
    }

    #[test]
    fn status_header_with_indexed_rows() {
        let text = "Optimal - objective value 21.00000000\n\
                    \x20     0 x_a                    1                 8\n\
                    **     1 x_b                    0.5              11\n";
        let sol = parse_solution(text).expect("parses");
        assert_eq!(sol.status, Some(DeclaredStatus::Optimal));
        assert_eq!(sol.values["x_a"], 1.0);
        assert_eq!(sol.values["x_b"], 0.5);
        assert!(!sol.declared_hopeless());
    }

    #[test]
    fn infeasible_header_is_reported() {
        let sol = parse_solution("Infeasible - objective value 0\n").expect("parses");
        assert_eq!(sol.status, Some(DeclaredStatus::Infeasible));
        assert!(sol.declared_hopeless());
        assert!(sol.values.is_empty());

        let sol = parse_solution("Stopped on iterations - objective value 4\n").expect("parses");
        assert_eq!(sol.status, Some(DeclaredStatus::Feasible));
    }

    #[test]
    fn missing_names_default_to_zero() {
        let mut sys: ConstraintSystem<f64> = ConstraintSystem::new();
        let a = sys.add_binary("a");
        let b = sys.add_binary("b");
        let c = sys.add_var("c", VarKind::Continuous, 0.0, 5.0);
        let sol = parse_solution("a 1\nghost 9\n").expect("parses");
        let vals = values_for_system(&sys, &sol);
        assert_eq!(vals[a.0], 1.0);
        assert_eq!(vals[b.0], 0.0);
        assert_eq!(vals[c.0], 0.0);
    }

    #[test]
    fn junk_is_rejected_with_a_line_number() {
        let err = parse_solution("x one\n").unwrap_err();
        assert_eq!(err.line, 1);
        let err = parse_solution("x 1\ny 2 3\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(parse_solution("").is_err());
        assert!(parse_solution("# only a comment\n").is_err());
    }
}
