//! A small mixed-integer linear constraint algebra.
//!
//! Model builders assemble a [`ConstraintSystem`] — named variables with
//! bounds and integrality, named linear constraints, a minimization
//! objective — and solvers consume it. The system also knows how to
//! *check* a candidate point against itself ([`ConstraintSystem::violations`]),
//! which is used to validate answers from external engines and to
//! cross-check the built-in solver in tests.

use crate::num::Scalar;
use std::collections::BTreeMap;
use std::fmt;

/// Index of a variable within its [`ConstraintSystem`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

/// Integrality class of a variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    /// General integer within its bounds.
    Integer,
    /// Integer restricted to `{0, 1}`.
    Binary,
}

/// One decision variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Variable<T> {
    /// Unique name, safe for LP files (alphanumeric and `_`).
    pub name: String,
    pub kind: VarKind,
    pub lower: T,
    pub upper: T,
    /// Objective coefficient (the objective is always minimized).
    pub objective: T,
}

/// Relation of a constraint row to its right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        })
    }
}

/// One linear constraint `sum(coeff * var) rel rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint<T> {
    pub name: String,
    /// Terms with distinct variables, in ascending variable order.
    pub terms: Vec<(VarId, T)>,
    pub relation: Relation,
    pub rhs: T,
}

/// A complete minimization problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSystem<T> {
    vars: Vec<Variable<T>>,
    cons: Vec<LinearConstraint<T>>,
    names: BTreeMap<String, VarId>,
}

impl<T: Scalar> Default for ConstraintSystem<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> ConstraintSystem<T> {
    pub fn new() -> Self {
        ConstraintSystem {
            vars: Vec::new(),
            cons: Vec::new(),
            names: BTreeMap::new(),
        }
    }

    /// Add a variable with explicit bounds.
    ///
    /// # Panics
    /// On a duplicate name, inverted bounds, or binary bounds outside
    /// `[0, 1]` — all of which are builder bugs, not data errors.
    pub fn add_var(&mut self, name: impl Into<String>, kind: VarKind, lower: T, upper: T) -> VarId {
        let name = name.into();
        assert!(lower <= upper, "inverted bounds on `{name}`");
        if kind == VarKind::Binary {
            assert!(
                lower >= T::zero() && upper <= T::one(),
                "binary `{name}` must stay within [0, 1]"
            );
        }
        let id = VarId(self.vars.len());
        let previous = self.names.insert(name.clone(), id);
        assert!(previous.is_none(), "duplicate variable name `{name}`");
        self.vars.push(Variable {
            name,
            kind,
            lower,
            upper,
            objective: T::zero(),
        });
        id
    }

    /// Shorthand for a `{0, 1}` variable.
    pub fn add_binary(&mut self, name: impl Into<String>) -> VarId {
        self.add_var(name, VarKind::Binary, T::zero(), T::one())
    }

    /// Add to a variable's objective coefficient.
    pub fn add_objective(&mut self, var: VarId, coeff: T) {
        self.vars[var.0].objective += coeff;
    }

    /// Replace a variable's bounds, typically to pin a decided value
    /// (`lower == upper`) before a re-solve.
    ///
    /// # Panics
    /// On inverted bounds, or binary bounds outside `[0, 1]` — the same
    /// builder-bug rules as [`ConstraintSystem::add_var`].
    pub fn set_bounds(&mut self, var: VarId, lower: T, upper: T) {
        let v = &mut self.vars[var.0];
        assert!(lower <= upper, "inverted bounds on `{}`", v.name);
        if v.kind == VarKind::Binary {
            assert!(
                lower >= T::zero() && upper <= T::one(),
                "binary `{}` must stay within [0, 1]",
                v.name
            );
        }
        v.lower = lower;
        v.upper = upper;
    }

    /// Add a constraint; terms with the same variable are merged and
    /// zero coefficients dropped.
    pub fn add_con(
        &mut self,
        name: impl Into<String>,
        terms: impl IntoIterator<Item = (VarId, T)>,
        relation: Relation,
        rhs: T,
    ) {
        let mut merged: BTreeMap<VarId, T> = BTreeMap::new();
        for (v, c) in terms {
            assert!(v.0 < self.vars.len(), "constraint references unknown variable");
            *merged.entry(v).or_insert_with(T::zero) += c;
        }
        let terms: Vec<(VarId, T)> = merged
            .into_iter()
            .filter(|(_, c)| *c != T::zero())
            .collect();
        self.cons.push(LinearConstraint {
            name: name.into(),
            terms,
            relation,
            rhs,
        });
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_cons(&self) -> usize {
        self.cons.len()
    }

    pub fn var(&self, id: VarId) -> &Variable<T> {
        &self.vars[id.0]
    }

    pub fn vars(&self) -> &[Variable<T>] {
        &self.vars
    }

    pub fn cons(&self) -> &[LinearConstraint<T>] {
        &self.cons
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.names.get(name).copied()
    }

    /// Objective value of a full assignment (indexed by [`VarId`]).
    pub fn objective_value(&self, values: &[T]) -> T {
        assert_eq!(values.len(), self.vars.len());
        self.vars
            .iter()
            .zip(values)
            .map(|(v, &x)| v.objective * x)
            .sum()
    }

    /// Evaluate one constraint's left-hand side.
    pub fn lhs_value(&self, con: &LinearConstraint<T>, values: &[T]) -> T {
        con.terms.iter().map(|&(v, c)| c * values[v.0]).sum()
    }

    /// All bound, integrality and constraint violations of a candidate
    /// point, each beyond `tol`, described for humans. Empty means the
    /// point is feasible at that tolerance.
    pub fn violations(&self, values: &[T], tol: T) -> Vec<String> {
        let mut out = Vec::new();
        if values.len() != self.vars.len() {
            out.push(format!(
                "point has {} values for {} variables",
                values.len(),
                self.vars.len()
            ));
            return out;
        }
        for (v, &x) in self.vars.iter().zip(values) {
            if x < v.lower - tol || x > v.upper + tol {
                out.push(format!(
                    "`{}` = {x} outside bounds [{}, {}]",
                    v.name, v.lower, v.upper
                ));
            }
            if v.kind != VarKind::Continuous {
                let nearest = x.round();
                if (x - nearest).abs() > tol {
                    out.push(format!("`{}` = {x} is not integral", v.name));
                }
            }
        }
        for con in &self.cons {
            let lhs = self.lhs_value(con, values);
            let broken = match con.relation {
                Relation::Le => lhs > con.rhs + tol,
                Relation::Ge => lhs < con.rhs - tol,
                Relation::Eq => (lhs - con.rhs).abs() > tol,
            };
            if broken {
                out.push(format!(
                    "`{}`: {lhs} {} {} does not hold",
                    con.name, con.relation, con.rhs
                ));
            }
        }
        out
    }
}
