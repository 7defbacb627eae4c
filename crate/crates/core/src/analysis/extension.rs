//! Extending a mechanism from its support to every type, and checking that
//! payments rise with the type.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::Result;
use crate::feasibility::{best_response, TieBreak};
use crate::model::{menu_of, BuyerDistribution, Lottery, Mechanism, Rational, TypeKey, TypePoint};

/// A menu offered to every type. Each type takes its favorite entry among
/// those it can afford at the realized price, or the outside option `(0, 0)`;
/// ties go to the seller.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedMechanism {
    base_menu: BTreeSet<Lottery>,
    /// When set, types in this mechanism's support keep their original
    /// lottery instead of choosing.
    pinned: Option<Mechanism>,
}

impl ExtendedMechanism {
    pub fn from_menu(menu: impl IntoIterator<Item = Lottery>) -> Self {
        ExtendedMechanism {
            base_menu: menu.into_iter().filter(|l| !l.is_trivial()).collect(),
            pinned: None,
        }
    }

    pub fn from_mechanism(mech: &Mechanism) -> Self {
        ExtendedMechanism {
            base_menu: menu_of(mech),
            pinned: None,
        }
    }

    /// Keeps the original assignment on the support and lets only the
    /// remaining types choose. Agrees with `from_mechanism` exactly when the
    /// original is incentive compatible in class M.
    pub fn pinned(mech: &Mechanism) -> Self {
        ExtendedMechanism {
            base_menu: menu_of(mech),
            pinned: Some(mech.clone()),
        }
    }

    pub fn base_menu(&self) -> &BTreeSet<Lottery> {
        &self.base_menu
    }
}

pub fn extend_query(ext: &ExtendedMechanism, v: &Rational, w: &Rational) -> Lottery {
    if let Some(l) = ext.pinned.as_ref().and_then(|m| m.get(&TypeKey::new(v.clone(), w.clone()))) {
        return l.clone();
    }
    best_response(&ext.base_menu, v, w, TieBreak::SellerFavorable)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PaymentViolation {
    pub lower: TypeKey,
    pub upper: TypeKey,
    pub lower_payment: Rational,
    pub upper_payment: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonotonicityReport {
    pub points: usize,
    pub comparable_pairs: usize,
    pub violations: Vec<PaymentViolation>,
}

impl MonotonicityReport {
    pub fn is_monotone(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Compares expected payments over every componentwise-ordered pair of grid
/// points.
pub fn check_payment_monotone(ext: &ExtendedMechanism, grid: &[(Rational, Rational)]) -> MonotonicityReport {
    let keys: Vec<TypeKey> = grid
        .iter()
        .map(|(v, w)| TypeKey::new(v.clone(), w.clone()))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let pay: Vec<Rational> = keys.iter().map(|k| extend_query(ext, &k.v, &k.w).p).collect();
    let mut report = MonotonicityReport {
        points: keys.len(),
        comparable_pairs: 0,
        violations: Vec::new(),
    };
    for (a, ka) in keys.iter().enumerate() {
        for (b, kb) in keys.iter().enumerate() {
            if a == b || ka.v > kb.v || ka.w > kb.w {
                continue;
            }
            report.comparable_pairs += 1;
            if pay[a] > pay[b] {
                report.violations.push(PaymentViolation {
                    lower: ka.clone(),
                    upper: kb.clone(),
                    lower_payment: pay[a].clone(),
                    upper_payment: pay[b].clone(),
                });
            }
        }
    }
    report
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AgreementIssue {
    pub point: TypeKey,
    pub original: Lottery,
    pub extended: Lottery,
    pub same_utility: bool,
}

/// Support points where the extension's choice differs from the original
/// in utility or in payment.
pub fn check_agreement(ext: &ExtendedMechanism, mech: &Mechanism, d: &BuyerDistribution) -> Result<Vec<AgreementIssue>> {
    let mut out = Vec::new();
    for p in d.points() {
        let original = mech.lottery_for(&p.key())?.clone();
        let extended = extend_query(ext, &p.v, &p.w);
        let same_utility = original.utility(&p.v) == extended.utility(&p.v);
        if !same_utility || original.p != extended.p {
            out.push(AgreementIssue {
                point: p.key(),
                original,
                extended,
                same_utility,
            });
        }
    }
    Ok(out)
}

/// The extension restricted to `points`, as a distribution with equal
/// masses and the mechanism it induces there.
pub fn restrict_to(ext: &ExtendedMechanism, points: &[(Rational, Rational)]) -> Result<(BuyerDistribution, Mechanism)> {
    let keys: BTreeSet<TypeKey> = points.iter().map(|(v, w)| TypeKey::new(v.clone(), w.clone())).collect();
    let mass = Rational::new(1, keys.len().max(1) as i64);
    let d = BuyerDistribution::new(
        "extension",
        keys.iter().map(|k| TypePoint::new(k.v.clone(), k.w.clone(), mass.clone())).collect(),
    )?;
    let lotteries = d.points().iter().map(|p| extend_query(ext, &p.v, &p.w)).collect();
    let mech = Mechanism::from_aligned(&d, lotteries)?;
    Ok((d, mech))
}

/// `n x n` grid over `[0, v_max] x [0, w_max]` including both endpoints.
pub fn uniform_grid(n: u32, v_max: &Rational, w_max: &Rational) -> Vec<(Rational, Rational)> {
    let steps = (n.max(2) - 1) as i64;
    let mut out = Vec::with_capacity((n * n) as usize);
    for a in 0..=steps {
        for b in 0..=steps {
            out.push((v_max * Rational::new(a, steps), w_max * Rational::new(b, steps)));
        }
    }
    out
}
