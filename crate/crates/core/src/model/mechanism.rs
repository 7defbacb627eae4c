use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{BuyerDistribution, Rational, TypeKey};
use crate::error::{Error, Result};

/// A menu entry: win with probability `q` for expected payment `p`.
///
/// The actual price on winning is `p / q`; a lottery that never allocates
/// never charges.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Lottery {
    pub q: Rational,
    pub p: Rational,
}

impl Lottery {
    pub fn new(q: Rational, p: Rational) -> Result<Self> {
        if q.is_negative() || q > Rational::one() {
            return Err(Error::InvalidLottery(format!("allocation {q} outside [0, 1]")));
        }
        if p.is_negative() {
            return Err(Error::InvalidLottery(format!("negative payment {p}")));
        }
        if q.is_zero() && !p.is_zero() {
            return Err(Error::InvalidLottery(format!(
                "payment {p} charged with zero allocation"
            )));
        }
        Ok(Lottery { q, p })
    }

    pub fn trivial() -> Self {
        Lottery {
            q: Rational::zero(),
            p: Rational::zero(),
        }
    }

    /// A sure sale at `price`.
    pub fn posted(price: Rational) -> Self {
        Lottery {
            q: Rational::one(),
            p: price,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.q.is_zero() && self.p.is_zero()
    }

    pub fn actual_price(&self) -> Rational {
        if self.q.is_zero() {
            Rational::zero()
        } else {
            &self.p / &self.q
        }
    }

    pub fn utility(&self, v: &Rational) -> Rational {
        v * &self.q - &self.p
    }

    /// Ex-post affordable for a buyer with budget `w`: `p <= w q`.
    pub fn affordable(&self, w: &Rational) -> bool {
        self.p <= w * &self.q
    }
}

impl<'de> Deserialize<'de> for Lottery {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            q: Rational,
            p: Rational,
        }
        let raw = Raw::deserialize(deserializer)?;
        Lottery::new(raw.q, raw.p).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Lottery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.q, self.p)
    }
}

/// A direct mechanism restricted to a finite set of types.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Mechanism {
    assignment: BTreeMap<TypeKey, Lottery>,
}

impl Mechanism {
    pub fn new(assignment: BTreeMap<TypeKey, Lottery>) -> Self {
        Mechanism { assignment }
    }

    /// Pairs lotteries with the support of `d` in canonical order.
    pub fn from_aligned(d: &BuyerDistribution, lotteries: Vec<Lottery>) -> Result<Self> {
        if lotteries.len() != d.len() {
            return Err(Error::InvalidParameter(format!(
                "{} lotteries for {} types",
                lotteries.len(),
                d.len()
            )));
        }
        Ok(Mechanism {
            assignment: d.points().iter().map(|p| p.key()).zip(lotteries).collect(),
        })
    }

    /// The mechanism that gives every type of `d` the same lottery.
    pub fn uniform(d: &BuyerDistribution, lottery: Lottery) -> Self {
        Mechanism {
            assignment: d.points().iter().map(|p| (p.key(), lottery.clone())).collect(),
        }
    }

    pub fn trivial(d: &BuyerDistribution) -> Self {
        Self::uniform(d, Lottery::trivial())
    }

    pub fn get(&self, key: &TypeKey) -> Option<&Lottery> {
        self.assignment.get(key)
    }

    /// Lottery assigned to a type of `d`, or an error naming the type.
    pub fn lottery_for(&self, key: &TypeKey) -> Result<&Lottery> {
        self.assignment.get(key).ok_or_else(|| Error::MissingAssignment {
            v: key.v.to_string(),
            w: key.w.to_string(),
        })
    }

    /// Lotteries for the support of `d`, in canonical order.
    pub fn aligned(&self, d: &BuyerDistribution) -> Result<Vec<Lottery>> {
        d.points()
            .iter()
            .map(|p| self.lottery_for(&p.key()).cloned())
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TypeKey, &Lottery)> {
        self.assignment.iter()
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// Scales every payment by `factor`, keeping allocations.
    pub fn map_payments(&self, factor: &Rational) -> Mechanism {
        Mechanism {
            assignment: self
                .assignment
                .iter()
                .map(|(k, l)| {
                    (
                        k.clone(),
                        Lottery {
                            q: l.q.clone(),
                            p: &l.p * factor,
                        },
                    )
                })
                .collect(),
        }
    }
}

/// `E[s(V, W)]`.
pub fn revenue(mech: &Mechanism, d: &BuyerDistribution) -> Result<Rational> {
    let mut total = Rational::zero();
    for point in d.points() {
        let lottery = mech.lottery_for(&point.key())?;
        total += &point.prob * &lottery.p;
    }
    Ok(total)
}

/// The image of the mechanism without the trivial lottery. Its size is the
/// menu size.
pub fn menu_of(mech: &Mechanism) -> BTreeSet<Lottery> {
    mech.assignment
        .values()
        .filter(|l| !l.is_trivial())
        .cloned()
        .collect()
}

/// Which constraint set governs feasibility and optimization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClassSpec {
    /// (BF), (IR) and affordability-conditioned (IC).
    M,
    /// (BF), (IR) and unconditional incentive constraints.
    Sic,
    /// (BF), (IR) and incentive constraints against budget under-reports only.
    Cb,
    /// Class M with at most this many non-trivial menu entries.
    Menu(u32),
    /// Class M with a single sure-sale price.
    Posted,
}

impl ClassSpec {
    pub fn menu(cap: u32) -> Result<Self> {
        if cap == 0 {
            return Err(Error::InvalidParameter("menu cap must be at least 1".into()));
        }
        Ok(ClassSpec::Menu(cap))
    }
}

impl fmt::Display for ClassSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassSpec::M => write!(f, "m"),
            ClassSpec::Sic => write!(f, "sic"),
            ClassSpec::Cb => write!(f, "cb"),
            ClassSpec::Menu(m) => write!(f, "menu:{m}"),
            ClassSpec::Posted => write!(f, "posted"),
        }
    }
}

impl FromStr for ClassSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "m" => Ok(ClassSpec::M),
            "sic" => Ok(ClassSpec::Sic),
            "cb" => Ok(ClassSpec::Cb),
            "posted" => Ok(ClassSpec::Posted),
            other => {
                let cap = other
                    .strip_prefix("menu:")
                    .or_else(|| other.strip_prefix("menu"))
                    .ok_or_else(|| Error::Parse(format!("unknown class {s:?}")))?;
                let cap: u32 = cap
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad menu cap in {s:?}")))?;
                ClassSpec::menu(cap)
            }
        }
    }
}

impl Serialize for ClassSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ClassSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}
