//! Optimal revenue per mechanism class, plus an independent grid oracle.

mod oracle;
mod slots;

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::feasibility::{check_feasible, implement_menu, TieBreak};
use crate::lp::{branch_search, solve_lp, BranchOptions, LpOutcome, DEFAULT_INDICATOR_CAP};
use crate::model::io::{mechanism_rows, MechanismRow};
use crate::model::{revenue, BuyerDistribution, ClassSpec, Lottery, Mechanism, Rational, TypeKey};

pub use oracle::brute_force_oracle;
use slots::{Rule, SlotProgram};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    /// Largest number of branching indicators a class-M search may split on.
    pub indicator_cap: usize,
    /// Largest number of slot assignments a menu-limited solve may visit.
    pub enumeration_cap: u128,
    pub oracle_grid_cap: u32,
    /// Strictness gap for unaffordable deviations.
    pub delta: Rational,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            indicator_cap: DEFAULT_INDICATOR_CAP,
            enumeration_cap: 1 << 20,
            oracle_grid_cap: 128,
            delta: Rational::zero(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Diagnostics {
    pub lp_solves: usize,
    pub branch_nodes: usize,
    pub indicators: usize,
    pub forced_pairs: usize,
    pub rejected_leaves: usize,
    pub assignments: u128,
    /// What certified the value: `lp`, `relaxation`, a `seed:` name, or `branch`.
    pub certified_by: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatternEntry {
    pub deviator: TypeKey,
    pub target: TypeKey,
    pub affordable: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub class: ClassSpec,
    /// Revenue of `mechanism`, which passes the class check.
    pub value: Rational,
    /// No mechanism in the class earns more.
    pub upper_bound: Rational,
    pub mechanism: Mechanism,
    pub diagnostics: Diagnostics,
    /// Affordability of every deviation that needed branching.
    pub pattern: Vec<PatternEntry>,
}

impl Serialize for SolveResult {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out<'a> {
            class: ClassSpec,
            value: &'a Rational,
            upper_bound: &'a Rational,
            mechanism: Vec<MechanismRow>,
            diagnostics: &'a Diagnostics,
            pattern: &'a [PatternEntry],
        }
        Out {
            class: self.class,
            value: &self.value,
            upper_bound: &self.upper_bound,
            mechanism: mechanism_rows(&self.mechanism),
            diagnostics: &self.diagnostics,
            pattern: &self.pattern,
        }
        .serialize(serializer)
    }
}

fn solve_exact(lp: &crate::lp::LinearProgram) -> Result<crate::lp::LpSolution> {
    match solve_lp(lp)? {
        LpOutcome::Optimal(sol) => Ok(sol),
        // The trivial mechanism is feasible and revenue is capped by E[min(V, W)].
        other => Err(Error::Certificate(format!("mechanism program not optimal: {other:?}"))),
    }
}

fn ensure_valid(d: &BuyerDistribution) -> Result<()> {
    let report = crate::model::validate_distribution(d);
    if report.is_valid() {
        Ok(())
    } else {
        Err(Error::InvalidDistribution(report.to_string()))
    }
}

/// Revenue-optimal mechanism under strong IC or the cash-bond constraints.
pub fn optimal_lp_class(d: &BuyerDistribution, class: ClassSpec) -> Result<SolveResult> {
    let rule = match class {
        ClassSpec::Sic => Rule::Sic,
        ClassSpec::Cb => Rule::Cb,
        other => {
            return Err(Error::InvalidParameter(format!(
                "class {other} is not a linear-program class; use sic or cb"
            )))
        }
    };
    ensure_valid(d)?;
    let program = SlotProgram::identity(d, rule);
    let sol = solve_exact(&program.lp)?;
    let mechanism = program.mechanism(d, &sol.x)?;
    Ok(SolveResult {
        class,
        value: sol.value.clone(),
        upper_bound: sol.value,
        mechanism,
        diagnostics: Diagnostics {
            lp_solves: 1,
            forced_pairs: program.forced,
            certified_by: "lp".into(),
            ..Default::default()
        },
        pattern: Vec::new(),
    })
}

/// Best single sure-sale price.
///
/// Revenue at price `p` is `p P(min(V, W) >= p)`. Between consecutive values
/// of `min(v_i, w_i)` the buying set is fixed while `p` grows, so some
/// optimal price sits at one of those values; ties go to the lowest price.
pub fn optimal_posted(d: &BuyerDistribution) -> Result<SolveResult> {
    ensure_valid(d)?;
    let caps: BTreeSet<Rational> = d.points().iter().map(|p| p.cap()).filter(|c| c.is_positive()).collect();
    let mut best: Option<(Rational, Rational)> = None;
    for price in caps {
        let mass: Rational = d.points().iter().filter(|p| p.cap() >= price).map(|p| &p.prob).sum();
        let rev = &price * &mass;
        if best.as_ref().map_or(true, |(b, _)| rev > *b) {
            best = Some((rev, price));
        }
    }
    let (value, mechanism) = match best {
        Some((rev, price)) => (rev, posted_mechanism(d, &price)),
        None => (Rational::zero(), Mechanism::trivial(d)),
    };
    Ok(SolveResult {
        class: ClassSpec::Posted,
        value: value.clone(),
        upper_bound: value,
        mechanism,
        diagnostics: Diagnostics {
            certified_by: "enumeration".into(),
            ..Default::default()
        },
        pattern: Vec::new(),
    })
}

pub fn posted_mechanism(d: &BuyerDistribution, price: &Rational) -> Mechanism {
    let lotteries = d
        .points()
        .iter()
        .map(|p| if p.cap() >= *price { Lottery::posted(price.clone()) } else { Lottery::trivial() })
        .collect();
    Mechanism::from_aligned(d, lotteries).expect("one lottery per type")
}

fn pattern_of(d: &BuyerDistribution, program: &SlotProgram, mech: &Mechanism, slot_rep: &[usize]) -> Vec<PatternEntry> {
    let points = d.points();
    program
        .indicator_pairs
        .iter()
        .map(|&(i, k)| {
            let target = &points[slot_rep[k]];
            let lottery = mech.get(&target.key()).expect("mechanism covers support");
            PatternEntry {
                deviator: points[i].key(),
                target: target.key(),
                affordable: lottery.affordable(&points[i].w),
            }
        })
        .collect()
}

struct Certified {
    value: Rational,
    mechanism: Mechanism,
    by: String,
}

fn m_feasible(mech: &Mechanism, d: &BuyerDistribution) -> bool {
    check_feasible(mech, d, ClassSpec::M).map(|r| r.is_feasible()).unwrap_or(false)
}

/// Solves one slot program over class M: relaxation first, then certified
/// seeds, then branch-and-bound above the best seed.
struct SlotSearch<'a> {
    d: &'a BuyerDistribution,
    cfg: &'a SolverConfig,
    diag: Diagnostics,
}

struct SlotOutcome {
    best: Option<Certified>,
    upper_bound: Option<Rational>,
}

impl<'a> SlotSearch<'a> {
    fn run(
        &mut self,
        program: &SlotProgram,
        floor: Option<&Rational>,
        seeds: &mut dyn FnMut(&Mechanism, &mut Diagnostics) -> Result<Vec<Certified>>,
    ) -> Result<SlotOutcome> {
        let d = self.d;
        self.diag.indicators = self.diag.indicators.max(program.indicators.len());
        self.diag.forced_pairs = self.diag.forced_pairs.max(program.forced);
        self.diag.lp_solves += 1;
        let root = solve_exact(&program.lp)?;
        if floor.is_some_and(|f| root.value <= *f) {
            return Ok(SlotOutcome {
                best: None,
                upper_bound: None,
            });
        }
        let root_mech = program.mechanism(d, &root.x)?;
        if m_feasible(&root_mech, d) {
            return Ok(SlotOutcome {
                best: Some(Certified {
                    value: root.value.clone(),
                    mechanism: root_mech,
                    by: "relaxation".into(),
                }),
                upper_bound: Some(root.value),
            });
        }

        let mut best: Option<Certified> = None;
        for seed in seeds(&root_mech, &mut self.diag)? {
            debug_assert!(m_feasible(&seed.mechanism, d));
            if best.as_ref().map_or(true, |b| seed.value > b.value) {
                best = Some(seed);
            }
        }
        if let Some(b) = &best {
            if b.value == root.value {
                return Ok(SlotOutcome {
                    upper_bound: Some(root.value),
                    best,
                });
            }
        }

        let incumbent = match (&best, floor) {
            (Some(b), Some(f)) => Some(Rational::max_of(&b.value, f)),
            (Some(b), None) => Some(b.value.clone()),
            (None, f) => f.cloned(),
        };
        let accept = |x: &[Rational]| program.mechanism(d, x).map(|m| m_feasible(&m, d)).unwrap_or(false);
        let opts = BranchOptions {
            cap: self.cfg.indicator_cap,
            incumbent: incumbent.clone(),
            accept: Some(&accept),
        };
        let strict = branch_search(&program.lp, &program.indicators, &self.cfg.delta, &opts)?;
        self.diag.branch_nodes += strict.nodes;
        self.diag.lp_solves += strict.nodes;
        self.diag.rejected_leaves += strict.rejected;
        if let Some(leaf) = strict.best {
            best = Some(Certified {
                value: leaf.value,
                mechanism: program.mechanism(d, &leaf.x)?,
                by: "branch".into(),
            });
        }
        let mut upper = strict.upper_bound;
        if !self.cfg.delta.is_zero() {
            let relaxed_opts = BranchOptions {
                cap: self.cfg.indicator_cap,
                incumbent: incumbent.clone(),
                accept: None,
            };
            let relaxed = branch_search(&program.lp, &program.indicators, &Rational::zero(), &relaxed_opts)?;
            self.diag.branch_nodes += relaxed.nodes;
            self.diag.lp_solves += relaxed.nodes;
            upper = relaxed.upper_bound;
        }
        // Pruned subtrees are bounded by the incumbent.
        let upper = match (upper, incumbent) {
            (Some(u), Some(i)) => Some(Rational::max_of(&u, &i)),
            (u, i) => u.or(i),
        };
        Ok(SlotOutcome {
            best,
            upper_bound: upper,
        })
    }
}

fn certified(d: &BuyerDistribution, mechanism: Mechanism, by: &str) -> Result<Option<Certified>> {
    if !m_feasible(&mechanism, d) {
        return Ok(None);
    }
    Ok(Some(Certified {
        value: revenue(&mechanism, d)?,
        mechanism,
        by: format!("seed:{by}"),
    }))
}

/// Lets every type choose from the menu of `mech`; always class M.
fn menu_repair(d: &BuyerDistribution, mech: &Mechanism) -> Mechanism {
    implement_menu(&crate::model::menu_of(mech), d, TieBreak::SellerFavorable)
}

/// Revenue-optimal mechanism over class M.
///
/// `value` is attained by the returned witness; `upper_bound` also counts
/// candidate points that sit on an affordability boundary without the
/// corresponding incentive constraint, bracketing the supremum.
pub fn optimal_full(d: &BuyerDistribution, cfg: &SolverConfig) -> Result<SolveResult> {
    ensure_valid(d)?;
    let program = SlotProgram::identity(d, Rule::M);
    let mut search = SlotSearch {
        d,
        cfg,
        diag: Diagnostics::default(),
    };
    let n = d.len();
    let mut seeds = |root: &Mechanism, diag: &mut Diagnostics| -> Result<Vec<Certified>> {
        let mut out = Vec::new();
        out.extend(certified(d, menu_repair(d, root), "menu_repair")?);
        out.extend(certified(d, optimal_posted(d)?.mechanism, "posted")?);
        if n <= 12 {
            diag.lp_solves += 1;
            let sic = optimal_lp_class(d, ClassSpec::Sic)?;
            out.extend(certified(d, sic.mechanism, "sic")?);
        }
        Ok(out)
    };
    let outcome = search.run(&program, None, &mut seeds)?;
    let best = outcome.best.expect("trivial mechanism bounds every search from below");
    let mut diag = search.diag;
    diag.certified_by = best.by;
    let rep: Vec<usize> = (0..n).collect();
    Ok(SolveResult {
        class: ClassSpec::M,
        pattern: pattern_of(d, &program, &best.mechanism, &rep),
        value: best.value.clone(),
        upper_bound: outcome.upper_bound.unwrap_or(best.value),
        mechanism: best.mechanism,
        diagnostics: diag,
    })
}

/// Number of ways to place `n` types into at most `m` unlabeled slots or
/// the trivial lottery; `(m + 1)^n` bounds it.
fn assignment_bound(n: usize, m: u32) -> u128 {
    (m as u128 + 1).saturating_pow(n as u32)
}

/// Visits slot assignments in canonical form: slot labels appear in order of
/// first use, and the trivial lottery is a free extra slot.
fn for_each_assignment(
    n: usize,
    m: usize,
    f: &mut dyn FnMut(&[Option<usize>]) -> Result<()>,
) -> Result<()> {
    fn rec(
        i: usize,
        used: usize,
        m: usize,
        cur: &mut Vec<Option<usize>>,
        f: &mut dyn FnMut(&[Option<usize>]) -> Result<()>,
    ) -> Result<()> {
        if i == cur.len() {
            return f(cur);
        }
        for k in 0..used.min(m) {
            cur[i] = Some(k);
            rec(i + 1, used, m, cur, f)?;
        }
        if used < m {
            cur[i] = Some(used);
            rec(i + 1, used + 1, m, cur, f)?;
        }
        cur[i] = None;
        rec(i + 1, used, m, cur, f)
    }
    let mut cur = vec![None; n];
    rec(0, 0, m, &mut cur, f)
}

/// Revenue-optimal class-M mechanism with at most `m` non-trivial menu entries.
pub fn optimal_menu_limited(d: &BuyerDistribution, m: u32, cfg: &SolverConfig) -> Result<SolveResult> {
    let class = ClassSpec::menu(m)?;
    ensure_valid(d)?;
    let n = d.len();
    if m as usize >= n {
        let mut full = optimal_full(d, cfg)?;
        full.class = class;
        return Ok(full);
    }
    let needed = assignment_bound(n, m);
    if needed > cfg.enumeration_cap {
        return Err(Error::EnumerationBudget {
            needed,
            cap: cfg.enumeration_cap,
        });
    }

    let mut search = SlotSearch {
        d,
        cfg,
        diag: Diagnostics::default(),
    };
    let mut best = Certified {
        value: Rational::zero(),
        mechanism: Mechanism::trivial(d),
        by: "trivial".into(),
    };
    let mut best_pattern = Vec::new();
    let mut upper = Rational::zero();
    let mut count: u128 = 0;
    for_each_assignment(n, m as usize, &mut |slot_of| {
        count += 1;
        if slot_of.iter().all(Option::is_none) {
            return Ok(());
        }
        let program = SlotProgram::build(d, slot_of.to_vec(), Rule::M);
        let mut seeds = |root: &Mechanism, _: &mut Diagnostics| -> Result<Vec<Certified>> {
            let repaired = menu_repair(d, root);
            if crate::model::menu_of(&repaired).len() <= m as usize {
                Ok(certified(d, repaired, "menu_repair")?.into_iter().collect())
            } else {
                Ok(Vec::new())
            }
        };
        let floor = best.value.clone();
        let outcome = search.run(&program, Some(&floor), &mut seeds)?;
        if let Some(u) = outcome.upper_bound {
            upper = Rational::max_of(&upper, &u);
        }
        if let Some(found) = outcome.best {
            if found.value > best.value {
                let mut rep = vec![0; slot_of.iter().flatten().count()];
                for (i, s) in slot_of.iter().enumerate().rev() {
                    if let Some(k) = s {
                        rep[*k] = i;
                    }
                }
                best_pattern = pattern_of(d, &program, &found.mechanism, &rep);
                best = found;
            }
        }
        Ok(())
    })?;
    let mut diag = search.diag;
    diag.assignments = count;
    diag.certified_by = best.by;
    Ok(SolveResult {
        class,
        upper_bound: Rational::max_of(&upper, &best.value),
        value: best.value,
        mechanism: best.mechanism,
        diagnostics: diag,
        pattern: best_pattern,
    })
}

/// Dispatches on the class tag.
pub fn solve_class(d: &BuyerDistribution, class: ClassSpec, cfg: &SolverConfig) -> Result<SolveResult> {
    match class {
        ClassSpec::Sic | ClassSpec::Cb => optimal_lp_class(d, class),
        ClassSpec::M => optimal_full(d, cfg),
        ClassSpec::Menu(m) => optimal_menu_limited(d, m, cfg),
        ClassSpec::Posted => optimal_posted(d),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rat;

    fn single() -> BuyerDistribution {
        BuyerDistribution::from_triples("one", [(rat(2, 1), rat(3, 1), rat(1, 1))]).unwrap()
    }

    fn prop9() -> BuyerDistribution {
        BuyerDistribution::from_triples(
            "prop9",
            [(rat(11, 2), rat(5, 1), rat(4, 5)), (rat(6, 1), rat(1, 1), rat(1, 5))],
        )
        .unwrap()
    }

    fn prop7(k: i64) -> BuyerDistribution {
        BuyerDistribution::from_triples(
            "prop7",
            (1..=k).map(|i| (rat(1, i), rat(k + i, k), rat(1, k))),
        )
        .unwrap()
    }

    #[test]
    fn single_type_extracts_full_surplus() {
        let d = single();
        let cfg = SolverConfig::default();
        for class in [ClassSpec::Sic, ClassSpec::Cb, ClassSpec::M, ClassSpec::Posted, ClassSpec::Menu(1)] {
            let r = solve_class(&d, class, &cfg).unwrap();
            assert_eq!(r.value, rat(2, 1), "{class}");
            assert_eq!(r.upper_bound, rat(2, 1));
        }
    }

    #[test]
    fn prop9_values() {
        let d = prop9();
        let cfg = SolverConfig::default();
        let sic = optimal_lp_class(&d, ClassSpec::Sic).unwrap();
        assert_eq!(sic.value, rat(1, 1));
        let full = optimal_full(&d, &cfg).unwrap();
        assert_eq!(full.value, rat(181, 45));
        assert_eq!(full.upper_bound, rat(181, 45));
        let posted = optimal_posted(&d).unwrap();
        assert_eq!(posted.value, rat(4, 1));
        assert_eq!(posted.mechanism.get(&TypeKey::new(rat(11, 2), rat(5, 1))), Some(&Lottery::posted(rat(5, 1))));
    }

    #[test]
    fn prop7_values() {
        let d = prop7(3);
        let cfg = SolverConfig::default();
        assert_eq!(optimal_full(&d, &cfg).unwrap().value, rat(1, 3));
        assert!(optimal_lp_class(&d, ClassSpec::Cb).unwrap().value >= rat(11, 18));
        let posted = optimal_posted(&d).unwrap();
        assert_eq!(posted.value, rat(1, 3));
        assert_eq!(posted.mechanism.get(&TypeKey::new(rat(1, 3), rat(2, 1))), Some(&Lottery::posted(rat(1, 3))));
    }

    #[test]
    fn lp_class_rejects_other_tags() {
        assert!(matches!(optimal_lp_class(&single(), ClassSpec::M), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn assignment_enumeration_is_canonical() {
        let mut seen = Vec::new();
        for_each_assignment(3, 1, &mut |a| {
            seen.push(a.to_vec());
            Ok(())
        })
        .unwrap();
        assert_eq!(seen.len(), 8);
        let mut count = 0;
        for_each_assignment(3, 3, &mut |_| {
            count += 1;
            Ok(())
        })
        .unwrap();
        // Set partitions of a 4-element set with one marked block: Bell(4) = 15.
        assert_eq!(count, 15);
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let d = prop7(4);
        let cfg = SolverConfig {
            enumeration_cap: 10,
            ..Default::default()
        };
        assert!(matches!(optimal_menu_limited(&d, 1, &cfg), Err(Error::EnumerationBudget { .. })));
    }
}
