//! The slot program: every class solver reduces to it.
//!
//! Types are assigned to lottery slots or to the trivial lottery. Each slot
//! `k` carries variables `x_k` (allocation) and `s_k` (expected payment), so
//! types sharing a slot share a lottery. A type deviating to another slot is
//! governed by the class rule:
//!
//! - strong IC: always constrained;
//! - cash bond: constrained when some member of the target slot has a budget
//!   no larger than the deviator's;
//! - class M: constrained when the target lottery is affordable. Since every
//!   member `j` of the slot forces `s_k <= min(v_j, w_j) x_k`, a deviator with
//!   `w_i >= min_j min(v_j, w_j)` can always afford it and the constraint is
//!   imposed outright; otherwise the pair becomes a branching indicator.

use crate::error::Result;
use crate::lp::{Constraint, Indicator, LinearProgram, Relation};
use crate::model::{BuyerDistribution, Lottery, Mechanism, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Rule {
    Sic,
    Cb,
    M,
}

pub(crate) struct SlotProgram {
    pub lp: LinearProgram,
    pub indicators: Vec<Indicator>,
    /// (deviating type, target slot) per indicator.
    pub indicator_pairs: Vec<(usize, usize)>,
    pub forced: usize,
    slot_of: Vec<Option<usize>>,
}

fn x_var(k: usize) -> usize {
    2 * k
}

fn s_var(k: usize) -> usize {
    2 * k + 1
}

fn one() -> Rational {
    Rational::one()
}

impl SlotProgram {
    pub fn identity(d: &BuyerDistribution, rule: Rule) -> Self {
        Self::build(d, (0..d.len()).map(Some).collect(), rule)
    }

    /// `slot_of[i]` is type `i`'s slot; slots must be numbered `0..K` with
    /// every slot occupied.
    pub fn build(d: &BuyerDistribution, slot_of: Vec<Option<usize>>, rule: Rule) -> Self {
        let points = d.points();
        let n_slots = slot_of.iter().flatten().map(|k| k + 1).max().unwrap_or(0);
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_slots];
        for (i, slot) in slot_of.iter().enumerate() {
            if let Some(k) = slot {
                members[*k].push(i);
            }
        }

        let mut lp = LinearProgram::new();
        for k in 0..n_slots {
            lp.add_variable(format!("x{k}"));
            lp.add_variable(format!("s{k}"));
            let mass: Rational = members[k].iter().map(|&i| &points[i].prob).sum();
            lp.set_objective(s_var(k), mass);
        }
        let min_v: Vec<Rational> = members
            .iter()
            .map(|m| m.iter().map(|&i| points[i].v.clone()).min().expect("occupied slot"))
            .collect();
        let min_w: Vec<Rational> = members
            .iter()
            .map(|m| m.iter().map(|&i| points[i].w.clone()).min().expect("occupied slot"))
            .collect();
        let min_cap: Vec<Rational> = (0..n_slots).map(|k| Rational::min_of(&min_v[k], &min_w[k])).collect();

        for k in 0..n_slots {
            lp.add_constraint(Constraint::new(format!("cap{k}"), vec![(x_var(k), one())], Relation::Le, one()));
            lp.add_constraint(Constraint::new(
                format!("ir{k}"),
                vec![(x_var(k), -&min_v[k]), (s_var(k), one())],
                Relation::Le,
                Rational::zero(),
            ));
            lp.add_constraint(Constraint::new(
                format!("bf{k}"),
                vec![(x_var(k), -&min_w[k]), (s_var(k), one())],
                Relation::Le,
                Rational::zero(),
            ));
        }

        let mut indicators = Vec::new();
        let mut indicator_pairs = Vec::new();
        let mut forced = 0;
        for (i, point) in points.iter().enumerate() {
            for k in 0..n_slots {
                if slot_of[i] == Some(k) {
                    continue;
                }
                let ic = incentive_constraint(&point.v, slot_of[i], i, k);
                let imposed = match rule {
                    Rule::Sic => Some(true),
                    Rule::Cb => Some(members[k].iter().any(|&j| points[j].w <= point.w)),
                    Rule::M if point.w >= min_cap[k] => Some(true),
                    Rule::M => None,
                };
                match imposed {
                    Some(true) => {
                        forced += 1;
                        lp.add_constraint(ic);
                    }
                    Some(false) => {}
                    None => {
                        let afford = |rel: Relation, tag: &str| {
                            Constraint::new(
                                format!("{tag}{i}>{k}"),
                                vec![(x_var(k), -&point.w), (s_var(k), one())],
                                rel,
                                Rational::zero(),
                            )
                        };
                        indicators.push(Indicator {
                            id: format!("{i}>{k}"),
                            on: vec![ic, afford(Relation::Le, "aff")],
                            off: vec![afford(Relation::Ge, "unaff")],
                        });
                        indicator_pairs.push((i, k));
                    }
                }
            }
        }

        SlotProgram {
            lp,
            indicators,
            indicator_pairs,
            forced,
            slot_of,
        }
    }

    pub fn mechanism(&self, d: &BuyerDistribution, x: &[Rational]) -> Result<Mechanism> {
        let lotteries = self
            .slot_of
            .iter()
            .map(|slot| match slot {
                Some(k) => Lottery::new(x[x_var(*k)].clone(), x[s_var(*k)].clone()),
                None => Ok(Lottery::trivial()),
            })
            .collect::<Result<Vec<_>>>()?;
        Mechanism::from_aligned(d, lotteries)
    }
}

/// `v_i x_own - s_own >= v_i x_k - s_k`, written as `<= 0`.
fn incentive_constraint(v: &Rational, own: Option<usize>, i: usize, k: usize) -> Constraint {
    let mut terms = vec![(x_var(k), v.clone()), (s_var(k), -one())];
    if let Some(h) = own {
        terms.push((x_var(h), -v));
        terms.push((s_var(h), one()));
    }
    Constraint::new(format!("ic{i}>{k}"), terms, Relation::Le, Rational::zero())
}
