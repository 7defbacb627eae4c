//! Constraint verification for every mechanism class, buyer best-response
//! simulation, and payment scaling toward seller-favorable choices.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{menu_of, BuyerDistribution, ClassSpec, Lottery, Mechanism, Rational, TypeKey};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ConstraintTag {
    BF,
    IR,
    IC,
    SIC,
    CB,
    /// Menu larger than the class cap.
    MENU,
    /// Menu is not a single sure-sale price.
    POSTED,
}

impl fmt::Display for ConstraintTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub tag: ConstraintTag,
    /// Offending types; for incentive constraints `[deviator, target]`.
    pub types: Vec<TypeKey>,
    /// Signed residual of the constraint, strictly negative.
    pub slack: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FeasibilityReport {
    pub class: ClassSpec,
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_tag(&self, tag: ConstraintTag) -> bool {
        self.violations.iter().any(|v| v.tag == tag)
    }
}

/// Whether the incentive constraint of `deviator` toward `target`'s lottery
/// is imposed by `class`, and under which tag.
fn deviation_tag(
    class: ClassSpec,
    deviator_w: &Rational,
    target_w: &Rational,
    target: &Lottery,
) -> Option<ConstraintTag> {
    match class {
        ClassSpec::Sic => Some(ConstraintTag::SIC),
        ClassSpec::Cb => (target_w <= deviator_w).then_some(ConstraintTag::CB),
        ClassSpec::M | ClassSpec::Menu(_) | ClassSpec::Posted => {
            target.affordable(deviator_w).then_some(ConstraintTag::IC)
        }
    }
}

/// Checks (BF), (IR), the class's incentive constraints and any menu
/// restriction on the support of `d`. Violations come out in a fixed order:
/// per type BF then IR, then incentive pairs row-major, then menu checks.
pub fn check_feasible(
    mech: &Mechanism,
    d: &BuyerDistribution,
    class: ClassSpec,
) -> Result<FeasibilityReport> {
    let lotteries = mech.aligned(d)?;
    let keys: Vec<TypeKey> = d.points().iter().map(|p| p.key()).collect();
    let mut violations = Vec::new();

    for (i, (point, lottery)) in d.points().iter().zip(&lotteries).enumerate() {
        let bf = &point.w * &lottery.q - &lottery.p;
        if bf.is_negative() {
            violations.push(Violation {
                tag: ConstraintTag::BF,
                types: vec![keys[i].clone()],
                slack: bf,
            });
        }
        let ir = lottery.utility(&point.v);
        if ir.is_negative() {
            violations.push(Violation {
                tag: ConstraintTag::IR,
                types: vec![keys[i].clone()],
                slack: ir,
            });
        }
    }

    for (i, point) in d.points().iter().enumerate() {
        let own = lotteries[i].utility(&point.v);
        for (j, target) in d.points().iter().enumerate() {
            if i == j {
                continue;
            }
            let Some(tag) = deviation_tag(class, &point.w, &target.w, &lotteries[j]) else {
                continue;
            };
            let slack = &own - lotteries[j].utility(&point.v);
            if slack.is_negative() {
                violations.push(Violation {
                    tag,
                    types: vec![keys[i].clone(), keys[j].clone()],
                    slack,
                });
            }
        }
    }

    let menu = menu_of(mech_restricted(mech, d, &lotteries).as_ref().unwrap_or(mech));
    match class {
        ClassSpec::Menu(cap) => {
            let excess = Rational::from(cap as i64) - Rational::from(menu.len() as i64);
            if excess.is_negative() {
                violations.push(Violation {
                    tag: ConstraintTag::MENU,
                    types: Vec::new(),
                    slack: excess,
                });
            }
        }
        ClassSpec::Posted => {
            if menu.len() > 1 {
                violations.push(Violation {
                    tag: ConstraintTag::POSTED,
                    types: Vec::new(),
                    slack: Rational::one() - Rational::from(menu.len() as i64),
                });
            }
            for l in &menu {
                if l.q < Rational::one() {
                    violations.push(Violation {
                        tag: ConstraintTag::POSTED,
                        types: Vec::new(),
                        slack: &l.q - Rational::one(),
                    });
                }
            }
        }
        _ => {}
    }

    Ok(FeasibilityReport { class, violations })
}

/// The mechanism limited to the support of `d`, when it carries extra types.
fn mech_restricted(mech: &Mechanism, d: &BuyerDistribution, lotteries: &[Lottery]) -> Option<Mechanism> {
    (mech.len() != d.len()).then(|| {
        Mechanism::from_aligned(d, lotteries.to_vec()).expect("aligned lotteries match support")
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// Among utility ties, highest payment, then highest allocation.
    SellerFavorable,
    /// Among utility ties, lowest payment, then highest allocation.
    BuyerFirst,
}

/// Buyer choice from a menu: shortlist the entries with `p <= q min(v, w)`
/// plus the outside option, then maximize `v q - p`.
pub fn best_response<'a, I>(menu: I, v: &Rational, w: &Rational, tie_break: TieBreak) -> Lottery
where
    I: IntoIterator<Item = &'a Lottery>,
{
    let cap = Rational::min_of(v, w);
    let mut best = Lottery::trivial();
    let mut best_u = Rational::zero();
    for l in menu {
        if l.p > &l.q * &cap {
            continue;
        }
        let u = l.utility(v);
        let better = match u.cmp(&best_u) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => match tie_break {
                TieBreak::SellerFavorable => (&l.p, &l.q) > (&best.p, &best.q),
                TieBreak::BuyerFirst => {
                    l.p < best.p || (l.p == best.p && l.q > best.q)
                }
            },
        };
        if better {
            best = l.clone();
            best_u = u;
        }
    }
    best
}

/// Lets every type of `d` choose from `menu`; the result is always in class M.
pub fn implement_menu(menu: &BTreeSet<Lottery>, d: &BuyerDistribution, tie_break: TieBreak) -> Mechanism {
    let lotteries = d
        .points()
        .iter()
        .map(|p| best_response(menu, &p.v, &p.w, tie_break))
        .collect();
    Mechanism::from_aligned(d, lotteries).expect("one lottery per type")
}

/// Multiplies every payment by `1 - eps_prime`.
///
/// Lotteries that tied for some type before the scaling are separated in
/// favor of the one with the higher payment.
pub fn seller_favorable_scale(mech: &Mechanism, eps_prime: &Rational) -> Result<Mechanism> {
    if !eps_prime.is_positive() || *eps_prime >= Rational::one() {
        return Err(Error::InvalidParameter(format!(
            "eps' must lie in (0, 1), got {eps_prime}"
        )));
    }
    Ok(mech.map_payments(&(Rational::one() - eps_prime)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{rat, revenue};

    fn two_type_instance() -> BuyerDistribution {
        // (B + eps, B) w.p. 1 - 1/B and (B + 2 eps, 1) w.p. 1/B at B = 5, eps = 1/2.
        BuyerDistribution::from_triples(
            "two",
            [(rat(11, 2), rat(5, 1), rat(4, 5)), (rat(6, 1), rat(1, 1), rat(1, 5))],
        )
        .unwrap()
    }

    fn prop3_k2() -> (BuyerDistribution, Mechanism) {
        let d = BuyerDistribution::from_triples(
            "prop3",
            [(rat(64, 1), rat(4, 1), rat(3, 4)), (rat(64, 1), rat(16, 1), rat(1, 4))],
        )
        .unwrap();
        let mech = Mechanism::from_aligned(
            &d,
            vec![
                Lottery::new(rat(3, 4), rat(3, 1)).unwrap(),
                Lottery::new(rat(1, 1), rat(16, 1)).unwrap(),
            ],
        )
        .unwrap();
        (d, mech)
    }

    #[test]
    fn trivial_mechanism_is_feasible_everywhere() {
        let d = two_type_instance();
        for class in [ClassSpec::M, ClassSpec::Sic, ClassSpec::Cb, ClassSpec::Menu(1), ClassSpec::Posted] {
            assert!(check_feasible(&Mechanism::trivial(&d), &d, class).unwrap().is_feasible());
        }
    }

    #[test]
    fn posted_price_b_violates_strong_ic() {
        let d = two_type_instance();
        let mech = Mechanism::from_aligned(&d, vec![Lottery::trivial(), Lottery::posted(rat(5, 1))]).unwrap();
        // canonical order: (6, 1) first, then (11/2, 5)
        let report = check_feasible(&mech, &d, ClassSpec::Sic).unwrap();
        assert!(!report.is_feasible());
        let v = &report.violations[0];
        assert_eq!(v.tag, ConstraintTag::SIC);
        assert_eq!(v.types[0], TypeKey::new(rat(6, 1), rat(1, 1)));
        assert_eq!(v.types[1], TypeKey::new(rat(11, 2), rat(5, 1)));
        assert_eq!(v.slack, rat(-1, 1));
        // The deviation is unaffordable, so class M accepts the mechanism.
        assert!(check_feasible(&mech, &d, ClassSpec::M).unwrap().is_feasible());
    }

    #[test]
    fn prop3_witness_is_m_feasible() {
        let (d, mech) = prop3_k2();
        assert!(check_feasible(&mech, &d, ClassSpec::M).unwrap().is_feasible());
        assert!(check_feasible(&mech, &d, ClassSpec::Menu(2)).unwrap().is_feasible());
        let capped = check_feasible(&mech, &d, ClassSpec::Menu(1)).unwrap();
        assert!(capped.has_tag(ConstraintTag::MENU));
        assert!(check_feasible(&mech, &d, ClassSpec::Posted).unwrap().has_tag(ConstraintTag::POSTED));
    }

    #[test]
    fn equality_affordability_counts_as_affordable() {
        // Type (10, 5) can exactly afford (1, 5); it must then not prefer it.
        let d = BuyerDistribution::from_triples(
            "eq",
            [(rat(10, 1), rat(5, 1), rat(1, 2)), (rat(10, 1), rat(6, 1), rat(1, 2))],
        )
        .unwrap();
        let mech = Mechanism::from_aligned(&d, vec![Lottery::trivial(), Lottery::posted(rat(5, 1))]).unwrap();
        let report = check_feasible(&mech, &d, ClassSpec::M).unwrap();
        assert!(report.has_tag(ConstraintTag::IC));
    }

    #[test]
    fn best_response_examples() {
        let menu = [Lottery::posted(rat(3, 1))];
        assert_eq!(
            best_response(&menu, &rat(5, 1), &rat(2, 1), TieBreak::SellerFavorable),
            Lottery::trivial()
        );
        assert_eq!(
            best_response(&menu, &rat(5, 1), &rat(4, 1), TieBreak::SellerFavorable),
            Lottery::posted(rat(3, 1))
        );
        let (_, mech) = prop3_k2();
        let menu = menu_of(&mech);
        assert_eq!(
            best_response(&menu, &rat(64, 1), &rat(4, 1), TieBreak::SellerFavorable),
            Lottery::new(rat(3, 4), rat(3, 1)).unwrap()
        );
    }

    #[test]
    fn tie_breaking_rules() {
        // Type v = 2: (1/2, 1/2) and (1, 3/2) both give utility 1/2.
        let a = Lottery::new(rat(1, 2), rat(1, 2)).unwrap();
        let b = Lottery::new(rat(1, 1), rat(3, 2)).unwrap();
        let menu = [a.clone(), b.clone()];
        assert_eq!(best_response(&menu, &rat(2, 1), &rat(9, 1), TieBreak::SellerFavorable), b);
        assert_eq!(best_response(&menu, &rat(2, 1), &rat(9, 1), TieBreak::BuyerFirst), a);
    }

    #[test]
    fn scaling_examples() {
        let d = BuyerDistribution::from_triples("one", [(rat(20, 1), rat(20, 1), rat(1, 1))]).unwrap();
        let posted = Mechanism::uniform(&d, Lottery::posted(rat(10, 1)));
        assert!(seller_favorable_scale(&posted, &rat(0, 1)).is_err());
        assert!(seller_favorable_scale(&posted, &rat(1, 1)).is_err());
        let scaled = seller_favorable_scale(&posted, &rat(1, 10)).unwrap();
        assert_eq!(scaled.aligned(&d).unwrap()[0], Lottery::posted(rat(9, 1)));

        let (d, mech) = prop3_k2();
        let scaled = seller_favorable_scale(&mech, &rat(1, 100)).unwrap();
        assert_eq!(revenue(&scaled, &d).unwrap(), rat(99, 16));
        assert!(check_feasible(&scaled, &d, ClassSpec::M).unwrap().is_feasible());
    }

    #[test]
    fn implemented_menus_are_m_feasible() {
        let d = two_type_instance();
        let menu: BTreeSet<_> = [Lottery::posted(rat(5, 1)), Lottery::new(rat(1, 9), rat(1, 9)).unwrap()]
            .into_iter()
            .collect();
        let mech = implement_menu(&menu, &d, TieBreak::SellerFavorable);
        assert!(check_feasible(&mech, &d, ClassSpec::M).unwrap().is_feasible());
        assert_eq!(revenue(&mech, &d).unwrap(), rat(181, 45));
    }
}
