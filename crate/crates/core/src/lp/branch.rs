//! Branch-and-bound over either/or constraint groups.
//!
//! Each indicator holds an "on" group and an "off" group; a pattern picks one
//! group per indicator. A node fixes some indicators and relaxes the rest.
//! When the node optimum already satisfies one group of every free
//! indicator, it is optimal for the whole subtree and no branching happens.

use serde::{Deserialize, Serialize};

use super::{check_constraint, solve_lp, Constraint, LinearProgram, LpOutcome};
use crate::error::{Error, Result};
use crate::model::Rational;

pub const DEFAULT_INDICATOR_CAP: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Indicator {
    pub id: String,
    pub on: Vec<Constraint>,
    pub off: Vec<Constraint>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchSpec {
    pub indicators: Vec<Indicator>,
    /// Strictness gap added to every "off" constraint.
    pub delta: Rational,
    pub cap: usize,
}

impl BranchSpec {
    pub fn new(indicators: Vec<Indicator>, delta: Rational) -> Result<Self> {
        if delta.is_negative() {
            return Err(Error::InvalidParameter(format!("delta must be >= 0, got {delta}")));
        }
        Ok(BranchSpec {
            indicators,
            delta,
            cap: DEFAULT_INDICATOR_CAP,
        })
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }
}

pub struct BranchOptions<'a> {
    pub cap: usize,
    /// Value already certified elsewhere; only strictly better leaves count.
    pub incumbent: Option<Rational>,
    /// Final say on a candidate point. A rejected candidate is split further
    /// on the free indicators it satisfied through the "off" group, and
    /// discarded once none remain.
    pub accept: Option<&'a dyn Fn(&[Rational]) -> bool>,
}

impl Default for BranchOptions<'_> {
    fn default() -> Self {
        BranchOptions {
            cap: DEFAULT_INDICATOR_CAP,
            incumbent: None,
            accept: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BranchOutcome {
    /// Best accepted leaf strictly above the incumbent, if any.
    pub best: Option<BranchLeaf>,
    /// Largest relaxation value over leaves that were not pruned by the
    /// incumbent, accepted or not.
    pub upper_bound: Option<Rational>,
    pub nodes: usize,
    pub rejected: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BranchLeaf {
    pub value: Rational,
    pub x: Vec<Rational>,
    /// `true` where the "on" group was chosen.
    pub pattern: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BranchSolution {
    pub value: Rational,
    pub x: Vec<Rational>,
    pub pattern: Vec<bool>,
    /// Optimum with `delta = 0`.
    pub upper_bound: Rational,
    pub nodes: usize,
}

fn all_hold(cs: &[Constraint], x: &[Rational]) -> bool {
    cs.iter().all(|c| c.holds(x))
}

/// Depth-first search over indicator patterns of `lp` with "off" groups
/// tightened by `delta`.
pub fn branch_search(
    lp: &LinearProgram,
    indicators: &[Indicator],
    delta: &Rational,
    opts: &BranchOptions<'_>,
) -> Result<BranchOutcome> {
    lp.validate()?;
    let n = lp.num_variables();
    let mut shifted_off = Vec::with_capacity(indicators.len());
    for ind in indicators {
        for c in ind.on.iter().chain(&ind.off) {
            check_constraint(c, n)?;
        }
        let off: Vec<Constraint> = ind.off.iter().map(|c| c.shifted(delta)).collect::<Result<_>>()?;
        shifted_off.push(off);
    }

    let mut incumbent = opts.incumbent.clone();
    let mut out = BranchOutcome {
        best: None,
        upper_bound: None,
        nodes: 0,
        rejected: 0,
    };
    let mut stack: Vec<Vec<Option<bool>>> = vec![vec![None; indicators.len()]];

    while let Some(decided) = stack.pop() {
        out.nodes += 1;
        let mut node = lp.clone();
        for (i, choice) in decided.iter().enumerate() {
            match choice {
                Some(true) => node.constraints.extend(indicators[i].on.iter().cloned()),
                Some(false) => node.constraints.extend(shifted_off[i].iter().cloned()),
                None => {}
            }
        }
        let sol = match solve_lp(&node)? {
            LpOutcome::Optimal(sol) => sol,
            LpOutcome::Infeasible => continue,
            LpOutcome::Unbounded => {
                return Err(Error::MalformedLp("branch relaxation is unbounded".into()))
            }
        };
        if incumbent.as_ref().is_some_and(|inc| sol.value <= *inc) {
            continue;
        }

        let mut violated = None;
        let mut chosen_off = Vec::new();
        let mut pattern = Vec::with_capacity(indicators.len());
        for (i, choice) in decided.iter().enumerate() {
            match choice {
                Some(on) => pattern.push(*on),
                None => {
                    if all_hold(&indicators[i].on, &sol.x) {
                        pattern.push(true);
                    } else if all_hold(&shifted_off[i], &sol.x) {
                        pattern.push(false);
                        chosen_off.push(i);
                    } else {
                        violated = Some(i);
                        break;
                    }
                }
            }
        }

        let split = match violated {
            Some(i) => Some(i),
            None => {
                let accepted = opts.accept.map_or(true, |f| f(&sol.x));
                if accepted {
                    out.upper_bound = Some(max_opt(out.upper_bound.take(), &sol.value));
                    incumbent = Some(sol.value.clone());
                    out.best = Some(BranchLeaf {
                        value: sol.value,
                        x: sol.x,
                        pattern,
                    });
                    continue;
                }
                match chosen_off.first() {
                    Some(&i) => Some(i),
                    None => {
                        out.rejected += 1;
                        out.upper_bound = Some(max_opt(out.upper_bound.take(), &sol.value));
                        continue;
                    }
                }
            }
        };
        if let Some(i) = split {
            if indicators.len() > opts.cap {
                return Err(Error::IndicatorBudget {
                    needed: indicators.len(),
                    cap: opts.cap,
                });
            }
            let mut off = decided.clone();
            off[i] = Some(false);
            let mut on = decided;
            on[i] = Some(true);
            stack.push(off);
            stack.push(on);
        }
    }
    Ok(out)
}

fn max_opt(a: Option<Rational>, b: &Rational) -> Rational {
    match a {
        Some(a) if a >= *b => a,
        _ => b.clone(),
    }
}

/// Best pattern at `spec.delta`, together with the `delta = 0` optimum as an
/// upper bound. `None` when every pattern is infeasible.
pub fn branch_solve(lp: &LinearProgram, spec: &BranchSpec) -> Result<Option<BranchSolution>> {
    if spec.delta.is_negative() {
        return Err(Error::InvalidParameter(format!("delta must be >= 0, got {}", spec.delta)));
    }
    let opts = BranchOptions {
        cap: spec.cap,
        ..Default::default()
    };
    let strict = branch_search(lp, &spec.indicators, &spec.delta, &opts)?;
    let relaxed = if spec.delta.is_zero() {
        strict.clone()
    } else {
        branch_search(lp, &spec.indicators, &Rational::zero(), &opts)?
    };
    let Some(leaf) = strict.best else {
        return Ok(None);
    };
    Ok(Some(BranchSolution {
        value: leaf.value,
        x: leaf.x,
        pattern: leaf.pattern,
        upper_bound: relaxed.upper_bound.expect("relaxation contains the strict optimum"),
        nodes: strict.nodes + if spec.delta.is_zero() { 0 } else { relaxed.nodes },
    }))
}
