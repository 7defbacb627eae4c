use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::Rational;
use crate::error::{Error, Result};

/// One realization of the buyer's (valuation, budget) with its probability mass.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypePoint {
    pub v: Rational,
    pub w: Rational,
    pub prob: Rational,
}

impl TypePoint {
    pub fn new(v: Rational, w: Rational, prob: Rational) -> Self {
        TypePoint { v, w, prob }
    }

    pub fn key(&self) -> TypeKey {
        TypeKey {
            w: self.w.clone(),
            v: self.v.clone(),
        }
    }

    /// `min(v, w)`: the most this type can ever pay for a sure win.
    pub fn cap(&self) -> Rational {
        Rational::min_of(&self.v, &self.w)
    }
}

/// Identity of a type independent of its mass. Orders lexicographically by
/// `(w, v)`, which is the canonical support order used everywhere.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeKey {
    pub w: Rational,
    pub v: Rational,
}

impl TypeKey {
    pub fn new(v: Rational, w: Rational) -> Self {
        TypeKey { w, v }
    }
}

impl Serialize for TypeKey {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("TypeKey", 2)?;
        s.serialize_field("v", &self.v)?;
        s.serialize_field("w", &self.w)?;
        s.end()
    }
}

impl fmt::Display for TypeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(v={}, w={})", self.v, self.w)
    }
}

/// A finite-support (V, W)-buyer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuyerDistribution {
    label: String,
    points: Vec<TypePoint>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistributionIssue {
    Empty,
    NegativeValuation { index: usize, v: Rational },
    NegativeBudget { index: usize, w: Rational },
    MassOutOfRange { index: usize, prob: Rational },
    MassSum { total: Rational },
    DuplicateType { first: usize, second: usize },
}

impl fmt::Display for DistributionIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistributionIssue::Empty => write!(f, "support is empty"),
            DistributionIssue::NegativeValuation { index, v } => {
                write!(f, "type {index} has negative valuation {v}")
            }
            DistributionIssue::NegativeBudget { index, w } => {
                write!(f, "type {index} has negative budget {w}")
            }
            DistributionIssue::MassOutOfRange { index, prob } => {
                write!(f, "type {index} has mass {prob} outside (0, 1]")
            }
            DistributionIssue::MassSum { total } => write!(f, "mass sums to {total}"),
            DistributionIssue::DuplicateType { first, second } => {
                write!(f, "types {first} and {second} share the same (v, w)")
            }
        }
    }
}

/// Outcome of [`validate_distribution`]; valid iff `issues` is empty.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<DistributionIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.issues.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

impl BuyerDistribution {
    /// Builds a validated distribution, sorting the support into canonical order.
    pub fn new(label: impl Into<String>, points: Vec<TypePoint>) -> Result<Self> {
        let d = Self::new_unchecked(label, points);
        let report = validate_distribution(&d);
        if report.is_valid() {
            Ok(d)
        } else {
            Err(Error::InvalidDistribution(report.to_string()))
        }
    }

    /// Canonically ordered but not validated; pair with [`validate_distribution`].
    pub fn new_unchecked(label: impl Into<String>, mut points: Vec<TypePoint>) -> Self {
        points.sort_by(|a, b| a.key().cmp(&b.key()));
        BuyerDistribution {
            label: label.into(),
            points,
        }
    }

    /// Builds from `(v, w, prob)` triples.
    pub fn from_triples(
        label: impl Into<String>,
        triples: impl IntoIterator<Item = (Rational, Rational, Rational)>,
    ) -> Result<Self> {
        let points = triples
            .into_iter()
            .map(|(v, w, p)| TypePoint::new(v, w, p))
            .collect();
        Self::new(label, points)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn points(&self) -> &[TypePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn index_of(&self, key: &TypeKey) -> Option<usize> {
        self.points
            .binary_search_by(|p| p.key().cmp(key))
            .ok()
    }

    /// Largest budget in the support (zero for an empty support).
    pub fn max_budget(&self) -> Rational {
        self.points
            .iter()
            .map(|p| p.w.clone())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// Multiplies every valuation and budget by `factor`, keeping masses.
    pub fn scaled(&self, factor: &Rational) -> Result<Self> {
        if !factor.is_positive() {
            return Err(Error::InvalidParameter(format!(
                "scale factor must be positive, got {factor}"
            )));
        }
        let points = self
            .points
            .iter()
            .map(|p| TypePoint::new(&p.v * factor, &p.w * factor, p.prob.clone()))
            .collect();
        Self::new(format!("{}*{}", self.label, factor), points)
    }

    /// `E[min(V, W)]`, an upper bound on revenue from any (BF)+(IR) mechanism.
    pub fn expected_cap(&self) -> Rational {
        self.points.iter().map(|p| &p.prob * p.cap()).sum()
    }
}

/// Reports every violated invariant of a distribution.
pub fn validate_distribution(d: &BuyerDistribution) -> ValidationReport {
    let mut issues = Vec::new();
    if d.points.is_empty() {
        issues.push(DistributionIssue::Empty);
    }
    for (index, p) in d.points.iter().enumerate() {
        if p.v.is_negative() {
            issues.push(DistributionIssue::NegativeValuation {
                index,
                v: p.v.clone(),
            });
        }
        if p.w.is_negative() {
            issues.push(DistributionIssue::NegativeBudget {
                index,
                w: p.w.clone(),
            });
        }
        if !p.prob.is_positive() || p.prob > Rational::one() {
            issues.push(DistributionIssue::MassOutOfRange {
                index,
                prob: p.prob.clone(),
            });
        }
    }
    let total: Rational = d.points.iter().map(|p| &p.prob).sum();
    if !d.points.is_empty() && total != Rational::one() {
        issues.push(DistributionIssue::MassSum { total });
    }
    // Canonical order puts equal keys next to each other.
    for i in 1..d.points.len() {
        if d.points[i - 1].key() == d.points[i].key() {
            issues.push(DistributionIssue::DuplicateType {
                first: i - 1,
                second: i,
            });
        }
    }
    ValidationReport { issues }
}

/// A finite distribution on the real line, support sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScalarDistribution {
    pub atoms: Vec<(Rational, Rational)>,
}

impl ScalarDistribution {
    /// `P{Z >= x}`.
    pub fn tail(&self, x: &Rational) -> Rational {
        self.atoms
            .iter()
            .filter(|(z, _)| z >= x)
            .map(|(_, p)| p)
            .sum()
    }

    pub fn mean(&self) -> Rational {
        self.atoms.iter().map(|(z, p)| z * p).sum()
    }
}

/// Distribution of `Z = min(V, W)` with equal minima merged.
pub fn min_rv(d: &BuyerDistribution) -> ScalarDistribution {
    let mut merged: BTreeMap<Rational, Rational> = BTreeMap::new();
    for p in d.points() {
        *merged.entry(p.cap()).or_insert_with(Rational::zero) += &p.prob;
    }
    ScalarDistribution {
        atoms: merged.into_iter().collect(),
    }
}
