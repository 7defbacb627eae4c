//! Two-phase primal simplex on a compact (Tucker) tableau with Bland's rule.
//!
//! Row `i` reads `x_B[i] = b[i] - sum_k a[i][k] x_N[k]` and the objective row
//! `z = z0 + sum_k d[k] x_N[k]`. Artificial variables keep their columns
//! after leaving the basis but may never re-enter; their reduced costs give
//! the multipliers of equality rows.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{verify_certificate, LinearProgram, LpOutcome, LpSolution, Relation};
use crate::error::{Error, Result};
use crate::model::Rational;

#[derive(Clone, Copy, PartialEq, Eq)]
enum RowKind {
    Le,
    Ge,
    Eq,
}

struct Tableau {
    n: usize,
    m: usize,
    a: Vec<Vec<BigRational>>,
    b: Vec<BigRational>,
    d: Vec<BigRational>,
    z0: BigRational,
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
    /// Position of each variable: `Ok(row)` if basic, `Err(col)` otherwise.
    position: Vec<std::result::Result<usize, usize>>,
    pivots: usize,
}

impl Tableau {
    fn slack_id(&self, row: usize) -> usize {
        self.n + row
    }

    fn artificial_id(&self, row: usize) -> usize {
        self.n + self.m + row
    }

    fn is_artificial(&self, var: usize) -> bool {
        var >= self.n + self.m
    }

    fn build(lp: &LinearProgram) -> (Tableau, Vec<RowKind>, Vec<bool>) {
        let n = lp.num_variables();
        let m = lp.constraints.len();
        let mut kinds = Vec::with_capacity(m);
        let mut negated = Vec::with_capacity(m);
        let mut rows = Vec::with_capacity(m);
        let mut b = Vec::with_capacity(m);
        for c in &lp.constraints {
            let flip = c.rhs.is_negative() || (c.relation == Relation::Ge && c.rhs.is_zero());
            let sign = if flip { -BigRational::one() } else { BigRational::one() };
            let mut row = vec![BigRational::zero(); n];
            for (j, coef) in &c.terms {
                row[*j] = coef.as_big() * &sign;
            }
            rows.push(row);
            b.push(c.rhs.as_big() * &sign);
            kinds.push(match (c.relation, flip) {
                (Relation::Eq, _) => RowKind::Eq,
                (Relation::Le, false) | (Relation::Ge, true) => RowKind::Le,
                (Relation::Ge, false) | (Relation::Le, true) => RowKind::Ge,
            });
            negated.push(flip);
        }

        let mut nonbasic: Vec<usize> = (0..n).collect();
        let surplus_rows: Vec<usize> = (0..m).filter(|&i| kinds[i] == RowKind::Ge).collect();
        nonbasic.extend(surplus_rows.iter().map(|&i| n + i));
        let cols = nonbasic.len();
        let mut a = Vec::with_capacity(m);
        for (i, mut row) in rows.into_iter().enumerate() {
            row.resize(cols, BigRational::zero());
            if kinds[i] == RowKind::Ge {
                let col = n + surplus_rows.iter().position(|&r| r == i).unwrap();
                row[col] = -BigRational::one();
            }
            a.push(row);
        }
        let basic: Vec<usize> = (0..m)
            .map(|i| match kinds[i] {
                RowKind::Le => n + i,
                RowKind::Ge | RowKind::Eq => n + m + i,
            })
            .collect();
        let mut position = vec![Err(usize::MAX); n + 2 * m];
        for (col, &v) in nonbasic.iter().enumerate() {
            position[v] = Err(col);
        }
        for (row, &v) in basic.iter().enumerate() {
            position[v] = Ok(row);
        }
        let tableau = Tableau {
            n,
            m,
            a,
            b,
            d: vec![BigRational::zero(); cols],
            z0: BigRational::zero(),
            basic,
            nonbasic,
            position,
            pivots: 0,
        };
        (tableau, kinds, negated)
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.a[r][c].clone();
        let inv = p.recip();
        let cols = self.nonbasic.len();

        self.b[r] = &self.b[r] * &inv;
        for k in 0..cols {
            if k != c && !self.a[r][k].is_zero() {
                self.a[r][k] = &self.a[r][k] * &inv;
            }
        }
        self.a[r][c] = inv.clone();
        let support: Vec<usize> = (0..cols).filter(|&k| k != c && !self.a[r][k].is_zero()).collect();

        let (before, rest) = self.a.split_at_mut(r);
        let (pivot_row, after) = rest.split_first_mut().unwrap();
        for (i, row) in before.iter_mut().enumerate().chain(
            after.iter_mut().enumerate().map(|(i, row)| (i + r + 1, row)),
        ) {
            let factor = row[c].clone();
            if factor.is_zero() {
                continue;
            }
            if !self.b[r].is_zero() {
                let delta = &factor * &self.b[r];
                self.b[i] -= delta;
            }
            for &k in &support {
                let delta = &factor * &pivot_row[k];
                row[k] -= delta;
            }
            row[c] = -(&factor * &inv);
        }

        let factor = self.d[c].clone();
        if !factor.is_zero() {
            self.z0 += &factor * &self.b[r];
            for &k in &support {
                let delta = &factor * &pivot_row[k];
                self.d[k] -= delta;
            }
            self.d[c] = -(&factor * &inv);
        }

        let entering = self.nonbasic[c];
        let leaving = self.basic[r];
        self.basic[r] = entering;
        self.nonbasic[c] = leaving;
        self.position[entering] = Ok(r);
        self.position[leaving] = Err(c);
        self.pivots += 1;
    }

    /// Bland: lowest-index improving variable enters; among tied ratios the
    /// lowest-index basic variable leaves.
    fn choose_entering(&self) -> Option<usize> {
        self.nonbasic
            .iter()
            .enumerate()
            .filter(|(k, &v)| !self.is_artificial(v) && self.d[*k].is_positive())
            .min_by_key(|(_, &v)| v)
            .map(|(k, _)| k)
    }

    fn choose_leaving(&self, c: usize) -> Option<usize> {
        let mut best: Option<usize> = None;
        for i in 0..self.m {
            if !self.a[i][c].is_positive() {
                continue;
            }
            best = Some(match best {
                None => i,
                Some(j) => {
                    let lhs = &self.b[i] * &self.a[j][c];
                    let rhs = &self.b[j] * &self.a[i][c];
                    if lhs < rhs || (lhs == rhs && self.basic[i] < self.basic[j]) {
                        i
                    } else {
                        j
                    }
                }
            });
        }
        best
    }

    /// Runs to optimality; `false` means unbounded.
    fn optimize(&mut self) -> bool {
        while let Some(c) = self.choose_entering() {
            match self.choose_leaving(c) {
                Some(r) => self.pivot(r, c),
                None => return false,
            }
        }
        true
    }

    fn set_objective(&mut self, costs: &[BigRational]) {
        let cost = |v: usize| -> BigRational {
            if v < self.n {
                costs[v].clone()
            } else {
                BigRational::zero()
            }
        };
        let mut z0 = BigRational::zero();
        let mut d: Vec<BigRational> = self.nonbasic.iter().map(|&v| cost(v)).collect();
        for i in 0..self.m {
            let cb = cost(self.basic[i]);
            if cb.is_zero() {
                continue;
            }
            z0 += &cb * &self.b[i];
            for (k, dk) in d.iter_mut().enumerate() {
                if !self.a[i][k].is_zero() {
                    *dk -= &cb * &self.a[i][k];
                }
            }
        }
        self.d = d;
        self.z0 = z0;
    }
}

pub fn solve_lp(lp: &LinearProgram) -> Result<LpOutcome> {
    lp.validate()?;
    let (mut t, kinds, negated) = Tableau::build(lp);
    let n = t.n;
    let m = t.m;

    let artificial_rows: Vec<usize> = (0..m).filter(|&i| kinds[i] != RowKind::Le).collect();
    if !artificial_rows.is_empty() {
        // Phase 1: maximize -(sum of artificials).
        let cols = t.nonbasic.len();
        let mut d = vec![BigRational::zero(); cols];
        let mut z0 = BigRational::zero();
        for &i in &artificial_rows {
            z0 -= &t.b[i];
            for (k, dk) in d.iter_mut().enumerate() {
                *dk += &t.a[i][k];
            }
        }
        t.d = d;
        t.z0 = z0;
        t.optimize();
        if t.z0.is_negative() {
            return Ok(LpOutcome::Infeasible);
        }
        for i in 0..m {
            if !t.is_artificial(t.basic[i]) {
                continue;
            }
            let col = (0..t.nonbasic.len())
                .filter(|&k| !t.is_artificial(t.nonbasic[k]) && !t.a[i][k].is_zero())
                .min_by_key(|&k| t.nonbasic[k]);
            if let Some(k) = col {
                t.pivot(i, k);
            }
        }
    }

    let costs: Vec<BigRational> = lp.objective.iter().map(|c| c.as_big().clone()).collect();
    t.set_objective(&costs);
    if !t.optimize() {
        return Ok(LpOutcome::Unbounded);
    }

    let mut x = vec![Rational::zero(); n];
    for (i, &v) in t.basic.iter().enumerate() {
        if v < n {
            x[v] = Rational::from(t.b[i].clone());
        }
    }
    let duals = (0..m)
        .map(|i| {
            let (var, sign) = match kinds[i] {
                RowKind::Le => (t.slack_id(i), -1),
                RowKind::Ge => (t.slack_id(i), 1),
                RowKind::Eq => (t.artificial_id(i), -1),
            };
            let y = match t.position[var] {
                Ok(_) => BigRational::zero(),
                Err(col) if sign < 0 => -t.d[col].clone(),
                Err(col) => t.d[col].clone(),
            };
            Rational::from(if negated[i] { -y } else { y })
        })
        .collect();
    let solution = LpSolution {
        value: Rational::from(t.z0.clone()),
        x,
        duals,
        pivots: t.pivots,
    };
    if !verify_certificate(lp, &solution) {
        return Err(Error::Certificate(format!(
            "optimality certificate failed after {} pivots",
            solution.pivots
        )));
    }
    Ok(LpOutcome::Optimal(solution))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::Constraint;
    use crate::model::rat;

    fn single(rel: Relation, rhs: i64) -> LinearProgram {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable("x");
        lp.set_objective(x, rat(1, 1));
        lp.add_constraint(Constraint::new("c", vec![(x, rat(1, 1))], rel, rat(rhs, 1)));
        lp
    }

    #[test]
    fn one_variable_bound() {
        let sol = solve_lp(&single(Relation::Le, 3)).unwrap().into_optimal().unwrap();
        assert_eq!(sol.value, rat(3, 1));
        assert_eq!(sol.duals, vec![rat(1, 1)]);
    }

    #[test]
    fn unbounded_and_infeasible() {
        assert_eq!(solve_lp(&single(Relation::Ge, 3)).unwrap(), LpOutcome::Unbounded);
        assert_eq!(solve_lp(&single(Relation::Le, -1)).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn equality_and_negative_rhs() {
        // max x + 2y s.t. x + y = 4, x - y >= -2  ->  x = 1, y = 3, value 7
        let mut lp = LinearProgram::new();
        let x = lp.add_variable("x");
        let y = lp.add_variable("y");
        lp.set_objective(x, rat(1, 1));
        lp.set_objective(y, rat(2, 1));
        lp.add_constraint(Constraint::new("sum", vec![(x, rat(1, 1)), (y, rat(1, 1))], Relation::Eq, rat(4, 1)));
        lp.add_constraint(Constraint::new("gap", vec![(x, rat(1, 1)), (y, rat(-1, 1))], Relation::Ge, rat(-2, 1)));
        let sol = solve_lp(&lp).unwrap().into_optimal().unwrap();
        assert_eq!(sol.value, rat(7, 1));
        assert_eq!(sol.x, vec![rat(1, 1), rat(3, 1)]);
        assert!(verify_certificate(&lp, &sol));
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable("x");
        let y = lp.add_variable("y");
        lp.set_objective(x, rat(1, 1));
        for name in ["a", "b"] {
            lp.add_constraint(Constraint::new(name, vec![(x, rat(1, 1)), (y, rat(1, 1))], Relation::Eq, rat(2, 1)));
        }
        let sol = solve_lp(&lp).unwrap().into_optimal().unwrap();
        assert_eq!(sol.value, rat(2, 1));
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example cycles under Dantzig pricing without an anti-cycling rule.
        let mut lp = LinearProgram::new();
        let v: Vec<usize> = (0..4).map(|i| lp.add_variable(format!("x{i}"))).collect();
        for (j, c) in [rat(3, 4), rat(-150, 1), rat(1, 50), rat(-6, 1)].into_iter().enumerate() {
            lp.set_objective(v[j], c);
        }
        let rows = [
            ([rat(1, 4), rat(-60, 1), rat(-1, 25), rat(9, 1)], rat(0, 1)),
            ([rat(1, 2), rat(-90, 1), rat(-1, 50), rat(3, 1)], rat(0, 1)),
            ([rat(0, 1), rat(0, 1), rat(1, 1), rat(0, 1)], rat(1, 1)),
        ];
        for (i, (coefs, rhs)) in rows.into_iter().enumerate() {
            let terms = v.iter().copied().zip(coefs).collect();
            lp.add_constraint(Constraint::new(format!("r{i}"), terms, Relation::Le, rhs));
        }
        let sol = solve_lp(&lp).unwrap().into_optimal().unwrap();
        assert_eq!(sol.value, rat(1, 20));
    }
}
