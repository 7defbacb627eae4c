//! Exact linear programming over the rationals and branch-and-bound over
//! either/or constraint groups.
//!
//! All variables are implicitly nonnegative. The objective is maximized.

mod branch;
mod simplex;

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Rational;

pub use branch::{
    branch_search, branch_solve, BranchLeaf, BranchOptions, BranchOutcome, BranchSolution, BranchSpec,
    Indicator, DEFAULT_INDICATOR_CAP,
};
pub use simplex::solve_lp;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    pub name: String,
    /// Sparse linear form as (variable index, coefficient).
    pub terms: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(
        name: impl Into<String>,
        terms: Vec<(usize, Rational)>,
        relation: Relation,
        rhs: Rational,
    ) -> Self {
        Constraint {
            name: name.into(),
            terms,
            relation,
            rhs,
        }
    }

    pub fn lhs(&self, x: &[Rational]) -> Rational {
        self.terms.iter().map(|(j, a)| a * &x[*j]).sum()
    }

    pub fn holds(&self, x: &[Rational]) -> bool {
        let lhs = self.lhs(x);
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
            Relation::Ge => lhs >= self.rhs,
        }
    }

    /// Tightens an inequality by `delta`; equalities cannot be shifted.
    pub fn shifted(&self, delta: &Rational) -> Result<Constraint> {
        let rhs = match self.relation {
            Relation::Le => &self.rhs - delta,
            Relation::Ge => &self.rhs + delta,
            Relation::Eq if delta.is_zero() => self.rhs.clone(),
            Relation::Eq => {
                return Err(Error::MalformedLp(format!(
                    "cannot shift equality {:?} by a strictness gap",
                    self.name
                )))
            }
        };
        Ok(Constraint {
            rhs,
            ..self.clone()
        })
    }
}

/// `maximize objective . x` subject to the constraints and `x >= 0`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub variables: Vec<String>,
    /// Dense objective, one coefficient per variable.
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_variable(&mut self, name: impl Into<String>) -> usize {
        self.variables.push(name.into());
        self.objective.push(Rational::zero());
        self.variables.len() - 1
    }

    pub fn set_objective(&mut self, var: usize, coef: Rational) {
        self.objective[var] = coef;
    }

    pub fn add_constraint(&mut self, c: Constraint) {
        self.constraints.push(c);
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.objective.len() != self.variables.len() {
            return Err(Error::MalformedLp(format!(
                "{} objective coefficients for {} variables",
                self.objective.len(),
                self.variables.len()
            )));
        }
        let mut names = HashSet::new();
        for name in &self.variables {
            if !names.insert(name.as_str()) {
                return Err(Error::MalformedLp(format!("variable {name:?} declared twice")));
            }
        }
        for c in &self.constraints {
            check_constraint(c, self.variables.len())?;
        }
        Ok(())
    }

    /// Every constraint holds and every variable is nonnegative.
    pub fn is_feasible_point(&self, x: &[Rational]) -> bool {
        x.len() == self.variables.len()
            && x.iter().all(|v| !v.is_negative())
            && self.constraints.iter().all(|c| c.holds(x))
    }

    pub fn to_json(&self) -> Result<String> {
        crate::model::io::to_json_string(self)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let lp: LinearProgram = serde_json::from_str(s)?;
        lp.validate()?;
        Ok(lp)
    }
}

pub(crate) fn check_constraint(c: &Constraint, n: usize) -> Result<()> {
    let mut seen = HashSet::new();
    for (j, _) in &c.terms {
        if *j >= n {
            return Err(Error::MalformedLp(format!(
                "constraint {:?} references undeclared variable {j}",
                c.name
            )));
        }
        if !seen.insert(*j) {
            return Err(Error::MalformedLp(format!(
                "constraint {:?} mentions variable {j} twice",
                c.name
            )));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LpSolution {
    pub value: Rational,
    pub x: Vec<Rational>,
    /// One multiplier per constraint: `>= 0` on `<=` rows, `<= 0` on `>=`
    /// rows, free on equalities.
    pub duals: Vec<Rational>,
    pub pivots: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(&self) -> Option<&LpSolution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }

    pub fn into_optimal(self) -> Option<LpSolution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

/// Checks primal feasibility, dual feasibility and a zero duality gap.
///
/// With `y` sign-constrained per row and `y^T A >= c` columnwise, every
/// feasible `x >= 0` has `c.x <= y^T A x <= y.b`; equality of the two
/// objective values then proves optimality.
pub fn verify_certificate(lp: &LinearProgram, sol: &LpSolution) -> bool {
    if !lp.is_feasible_point(&sol.x) || sol.duals.len() != lp.constraints.len() {
        return false;
    }
    if lp.objective_value(&sol.x) != sol.value {
        return false;
    }
    let mut column = vec![Rational::zero(); lp.num_variables()];
    let mut dual_value = Rational::zero();
    for (c, y) in lp.constraints.iter().zip(&sol.duals) {
        let sign_ok = match c.relation {
            Relation::Le => !y.is_negative(),
            Relation::Ge => !y.is_positive(),
            Relation::Eq => true,
        };
        if !sign_ok {
            return false;
        }
        if y.is_zero() {
            continue;
        }
        for (j, a) in &c.terms {
            column[*j] += &(a * y);
        }
        dual_value += &(y * &c.rhs);
    }
    column.iter().zip(&lp.objective).all(|(col, c)| col >= c) && dual_value == sol.value
}
