//! Instance families, their explicit witness mechanisms, the geometric
//! rounding of a type space, and the public-value uniform-budget example.

mod example1;
mod rounding;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BuyerDistribution, Lottery, Mechanism, Rational, TypePoint};

pub use example1::{
    example1_grid, example1_optimal_wc, example1_query, example1_revenue, Example1Optimum, Example1Params,
    DEFAULT_TOLERANCE,
};
pub use rounding::{round_down, round_down_bound};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyName {
    Prop3,
    Prop4,
    Lemma4Trunc,
    Lemma5Trunc,
    Prop7,
    Prop8Pair,
    Prop9,
    Prop10,
    Prop11Pair,
}

impl FamilyName {
    pub const ALL: [FamilyName; 9] = [
        FamilyName::Prop3,
        FamilyName::Prop4,
        FamilyName::Lemma4Trunc,
        FamilyName::Lemma5Trunc,
        FamilyName::Prop7,
        FamilyName::Prop8Pair,
        FamilyName::Prop9,
        FamilyName::Prop10,
        FamilyName::Prop11Pair,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FamilyName::Prop3 => "prop3",
            FamilyName::Prop4 => "prop4",
            FamilyName::Lemma4Trunc => "lemma4_trunc",
            FamilyName::Lemma5Trunc => "lemma5_trunc",
            FamilyName::Prop7 => "prop7",
            FamilyName::Prop8Pair => "prop8_pair",
            FamilyName::Prop9 => "prop9",
            FamilyName::Prop10 => "prop10",
            FamilyName::Prop11Pair => "prop11_pair",
        }
    }

    pub fn is_pair(&self) -> bool {
        matches!(self, FamilyName::Prop8Pair | FamilyName::Prop11Pair)
    }

    pub fn has_witness(&self) -> bool {
        matches!(
            self,
            FamilyName::Prop3 | FamilyName::Prop4 | FamilyName::Lemma4Trunc | FamilyName::Lemma5Trunc | FamilyName::Prop7
        )
    }
}

impl fmt::Display for FamilyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FamilyName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown family {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyParams {
    pub name: FamilyName,
    pub k: Option<u32>,
    pub n: Option<u32>,
    #[serde(rename = "B")]
    pub b: Option<Rational>,
    #[serde(rename = "H")]
    pub h: Option<Rational>,
    pub eps: Option<Rational>,
    pub precision: Option<u32>,
}

impl FamilyParams {
    pub fn new(name: FamilyName) -> Self {
        FamilyParams {
            name,
            k: None,
            n: None,
            b: None,
            h: None,
            eps: None,
            precision: None,
        }
    }

    pub fn with_k(name: FamilyName, k: u32) -> Self {
        FamilyParams { k: Some(k), ..Self::new(name) }
    }

    pub fn with_n(name: FamilyName, n: u32) -> Self {
        FamilyParams { n: Some(n), ..Self::new(name) }
    }

    pub fn with_b_eps(name: FamilyName, b: Rational, eps: Rational) -> Self {
        FamilyParams {
            b: Some(b),
            eps: Some(eps),
            ..Self::new(name)
        }
    }

    pub fn with_h_eps(name: FamilyName, h: Rational, eps: Rational) -> Self {
        FamilyParams {
            h: Some(h),
            eps: Some(eps),
            ..Self::new(name)
        }
    }

    /// Smallest admissible parameters for each family.
    pub fn smallest(name: FamilyName) -> Self {
        match name {
            FamilyName::Prop3 | FamilyName::Prop4 | FamilyName::Prop7 | FamilyName::Prop8Pair => Self::with_k(name, 2),
            FamilyName::Lemma4Trunc | FamilyName::Lemma5Trunc => Self::with_n(name, 1),
            FamilyName::Prop9 | FamilyName::Prop10 => Self::with_b_eps(name, Rational::from(2), Rational::new(1, 2)),
            FamilyName::Prop11Pair => Self::with_h_eps(name, Rational::from(2), Rational::one()),
        }
    }

    fn need<T: Clone>(&self, v: &Option<T>, what: &str) -> Result<T> {
        v.clone().ok_or_else(|| Error::InvalidParameter(format!("{} requires {what}", self.name)))
    }

    fn positive_int(&self, v: Option<u32>, what: &str) -> Result<u32> {
        let x = self.need(&v, what)?;
        if x == 0 {
            return Err(Error::InvalidParameter(format!("{}: {what} must be positive", self.name)));
        }
        Ok(x)
    }

    fn positive(&self, v: &Option<Rational>, what: &str) -> Result<Rational> {
        let x = self.need(v, what)?;
        if !x.is_positive() {
            return Err(Error::InvalidParameter(format!("{}: {what} must be positive, got {x}", self.name)));
        }
        Ok(x)
    }

    fn above_one(&self, v: &Option<Rational>, what: &str) -> Result<Rational> {
        let x = self.need(v, what)?;
        if x <= Rational::one() {
            return Err(Error::InvalidParameter(format!("{}: {what} must exceed 1, got {x}", self.name)));
        }
        Ok(x)
    }

    fn label(&self) -> String {
        let mut parts = vec![self.name.to_string()];
        if let Some(k) = self.k {
            parts.push(format!("k={k}"));
        }
        if let Some(n) = self.n {
            parts.push(format!("n={n}"));
        }
        if let Some(b) = &self.b {
            parts.push(format!("B={b}"));
        }
        if let Some(h) = &self.h {
            parts.push(format!("H={h}"));
        }
        if let Some(e) = &self.eps {
            parts.push(format!("eps={e}"));
        }
        if let Some(p) = self.precision {
            parts.push(format!("precision={p}"));
        }
        parts.join(",")
    }
}

/// Two distributions on a shared probability space: `upper` dominates
/// `lower` along `coupling`, a list of `(lower index, upper index, mass)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominancePair {
    pub lower: BuyerDistribution,
    pub upper: BuyerDistribution,
    pub coupling: Vec<(usize, usize, Rational)>,
}

impl DominancePair {
    /// Builds the pair from index-aligned point lists.
    pub fn aligned(label: &str, lower: Vec<TypePoint>, upper: Vec<TypePoint>) -> Result<Self> {
        let lower_d = BuyerDistribution::new(format!("{label}:lower"), lower.clone())?;
        let upper_d = BuyerDistribution::new(format!("{label}:upper"), upper.clone())?;
        let coupling = lower
            .iter()
            .zip(&upper)
            .map(|(a, b)| {
                (
                    lower_d.index_of(&a.key()).expect("point in support"),
                    upper_d.index_of(&b.key()).expect("point in support"),
                    a.prob.clone(),
                )
            })
            .collect();
        Ok(DominancePair {
            lower: lower_d,
            upper: upper_d,
            coupling,
        })
    }

    /// Checks that the coupling has the right marginals and that every
    /// coupled pair is ordered componentwise.
    pub fn check(&self) -> Result<()> {
        check_dominance(&self.lower, &self.upper, &self.coupling)
    }

    /// A distribution paired with itself.
    pub fn identical(d: &BuyerDistribution) -> Self {
        DominancePair {
            lower: d.clone(),
            upper: d.clone(),
            coupling: d.points().iter().enumerate().map(|(i, p)| (i, i, p.prob.clone())).collect(),
        }
    }
}

pub fn check_dominance(
    lower: &BuyerDistribution,
    upper: &BuyerDistribution,
    coupling: &[(usize, usize, Rational)],
) -> Result<()> {
    let mut lower_mass = vec![Rational::zero(); lower.len()];
    let mut upper_mass = vec![Rational::zero(); upper.len()];
    for (i, j, m) in coupling {
        let (Some(a), Some(b)) = (lower.points().get(*i), upper.points().get(*j)) else {
            return Err(Error::Dominance(format!("coupling index ({i}, {j}) out of range")));
        };
        if m.is_negative() {
            return Err(Error::Dominance(format!("negative coupling mass {m}")));
        }
        if m.is_zero() {
            continue;
        }
        if a.v > b.v {
            return Err(Error::Dominance(format!("valuation {} > {} at {} vs {}", a.v, b.v, a.key(), b.key())));
        }
        if a.w > b.w {
            return Err(Error::Dominance(format!("budget {} > {} at {} vs {}", a.w, b.w, a.key(), b.key())));
        }
        lower_mass[*i] += m;
        upper_mass[*j] += m;
    }
    for (p, m) in lower.points().iter().zip(&lower_mass) {
        if *m != p.prob {
            return Err(Error::Dominance(format!("coupling gives {} mass {m}, expected {}", p.key(), p.prob)));
        }
    }
    for (p, m) in upper.points().iter().zip(&upper_mass) {
        if *m != p.prob {
            return Err(Error::Dominance(format!("coupling gives {} mass {m}, expected {}", p.key(), p.prob)));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    Single {
        distribution: BuyerDistribution,
        /// Mass of the untruncated tail, for truncated infinite supports.
        tail_mass: Option<Rational>,
        /// Bound on the mass error introduced by rational approximation.
        residual: Option<Rational>,
    },
    Pair(DominancePair),
}

impl Family {
    pub fn single(&self) -> Option<&BuyerDistribution> {
        match self {
            Family::Single { distribution, .. } => Some(distribution),
            Family::Pair(_) => None,
        }
    }

    pub fn pair(&self) -> Option<&DominancePair> {
        match self {
            Family::Pair(p) => Some(p),
            Family::Single { .. } => None,
        }
    }

    /// The distribution itself, or the dominated member of a pair.
    pub fn primary(&self) -> &BuyerDistribution {
        match self {
            Family::Single { distribution, .. } => distribution,
            Family::Pair(p) => &p.lower,
        }
    }
}

fn pt(v: Rational, w: Rational, prob: Rational) -> TypePoint {
    TypePoint::new(v, w, prob)
}

fn single(label: String, points: Vec<TypePoint>) -> Result<Family> {
    Ok(Family::Single {
        distribution: BuyerDistribution::new(label, points)?,
        tail_mass: None,
        residual: None,
    })
}

/// Masses `(1 - 1/B) B^{-(i-1)}` for `i < k` and the remainder on `k`.
fn geometric_masses(b: &Rational, k: u32) -> Vec<Rational> {
    let mut out: Vec<Rational> = (1..k)
        .map(|i| (Rational::one() - b.recip()) * b.pow(-(i as i32 - 1)))
        .collect();
    let used: Rational = out.iter().sum();
    out.push(Rational::one() - used);
    out
}

fn prop3_support(k: u32) -> (Rational, Vec<TypePoint>) {
    let b = Rational::from(2 * k as i64);
    let vbar = b.pow(k as i32 + 1);
    let points = geometric_masses(&b, k)
        .into_iter()
        .enumerate()
        .map(|(i, f)| pt(vbar.clone(), b.pow(i as i32 + 1), f))
        .collect();
    (b, points)
}

fn prop4_support(k: u32) -> (Rational, Vec<TypePoint>) {
    let (b, points) = prop3_support(k);
    let scale = b.pow(-(2 * k as i32));
    let points = points
        .into_iter()
        .map(|p| pt(Rational::one(), &p.w * &scale, p.prob))
        .collect();
    (b, points)
}

fn prop7_points(k: u32) -> Vec<TypePoint> {
    let k = k as i64;
    (1..=k).map(|i| pt(Rational::new(1, i), Rational::new(k + i, k), Rational::new(1, k))).collect()
}

fn prop9_points(b: &Rational, eps: &Rational) -> Vec<TypePoint> {
    vec![
        pt(b + eps, b.clone(), Rational::one() - b.recip()),
        pt(b + eps + eps, Rational::one(), b.recip()),
    ]
}

/// Continued-fraction convergent of `sqrt 2` within `10^{-precision} / 8`,
/// with a certified error bound.
fn sqrt2_convergent(precision: u32) -> (Rational, Rational) {
    let target = Rational::from_big(BigInt::from(1), BigInt::from(8) * BigInt::from(10).pow(precision));
    let (mut p0, mut q0) = (BigInt::from(1), BigInt::from(1));
    let (mut p1, mut q1) = (BigInt::from(3), BigInt::from(2));
    loop {
        // |p0/q0 - sqrt 2| < 1/(q0 q1)
        let err = Rational::from_big(BigInt::from(1), &q0 * &q1);
        if err < target {
            return (Rational::from_big(p0, q0), err);
        }
        let p2 = BigInt::from(2) * &p1 + &p0;
        let q2 = BigInt::from(2) * &q1 + &q0;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
}

fn lemma5_parts(n: u32, precision: u32) -> (Vec<Rational>, Rational, Rational) {
    let (r, err) = sqrt2_convergent(precision);
    // (sqrt2 - 1) 2^{-t} for i = 2t, (1 - sqrt2/2) 2^{-t} for i = 2t + 1
    let raw: Vec<Rational> = (1..=n as i32)
        .map(|i| {
            let t = i / 2;
            let head = if i % 2 == 0 { &r - Rational::one() } else { Rational::one() - &r / Rational::from(2) };
            head * Rational::from(2).pow(-t)
        })
        .collect();
    let total: Rational = raw.iter().sum();
    let marginal: Vec<Rational> = raw.iter().map(|a| a / &total).collect();
    // the product support keeps (marginal mass kept)^2 of the untruncated law
    let tail = Rational::one() - &total * &total;
    // each raw mass moves by at most |r - sqrt2| 2^{-t}; summing over t gives 3 err
    let residual = err * Rational::from(3);
    (marginal, tail, residual)
}

pub fn make_family(params: &FamilyParams) -> Result<Family> {
    let label = params.label();
    match params.name {
        FamilyName::Prop3 => {
            let k = params.positive_int(params.k, "k")?;
            single(label, prop3_support(k).1)
        }
        FamilyName::Prop4 => {
            let k = params.positive_int(params.k, "k")?;
            single(label, prop4_support(k).1)
        }
        FamilyName::Lemma4Trunc => {
            let n = params.positive_int(params.n, "n")?;
            let tail = Rational::from(2).pow(-(n as i32));
            let norm = Rational::one() - &tail;
            let points = (1..=n as i32)
                .map(|i| {
                    let w = Rational::from(2).pow(i);
                    pt(&w * &w, w, Rational::from(2).pow(-i) / &norm)
                })
                .collect();
            Ok(Family::Single {
                distribution: BuyerDistribution::new(label, points)?,
                tail_mass: Some(tail),
                residual: None,
            })
        }
        FamilyName::Lemma5Trunc => {
            let n = params.positive_int(params.n, "n")?;
            let precision = params.precision.unwrap_or(12);
            let (marginal, tail, residual) = lemma5_parts(n, precision);
            let mut points = Vec::new();
            for i in 1..=n as i32 {
                for j in 1..=n as i32 {
                    let v = Rational::from(2).pow(2 * i);
                    let w = Rational::from(2).pow(j);
                    points.push(pt(v, w, &marginal[i as usize - 1] * &marginal[j as usize - 1]));
                }
            }
            Ok(Family::Single {
                distribution: BuyerDistribution::new(label, points)?,
                tail_mass: Some(tail),
                residual: Some(residual),
            })
        }
        FamilyName::Prop7 => {
            let k = params.positive_int(params.k, "k")?;
            single(label, prop7_points(k))
        }
        FamilyName::Prop8Pair => {
            let k = params.positive_int(params.k, "k")?;
            let lower = prop7_points(k);
            let upper = lower.iter().map(|p| pt(p.v.clone(), Rational::from(2), p.prob.clone())).collect();
            let pair = DominancePair::aligned(&label, lower, upper)?;
            pair.check()?;
            Ok(Family::Pair(pair))
        }
        FamilyName::Prop9 => {
            let b = params.above_one(&params.b, "B")?;
            let eps = params.positive(&params.eps, "eps")?;
            single(label, prop9_points(&b, &eps))
        }
        FamilyName::Prop10 => {
            let b = params.above_one(&params.b, "B")?;
            let eps = params.positive(&params.eps, "eps")?;
            let d = BuyerDistribution::new(label.clone(), prop9_points(&b, &eps))?;
            let scale = (&b + &eps + &eps).recip();
            Ok(Family::Single {
                distribution: d.scaled(&scale)?.with_label(label),
                tail_mass: None,
                residual: None,
            })
        }
        FamilyName::Prop11Pair => {
            let h = params.above_one(&params.h, "H")?;
            let eps = params.positive(&params.eps, "eps")?;
            let low_mass = h.recip();
            let high_mass = Rational::one() - &low_mass;
            let lower = vec![pt(h.clone(), Rational::one(), low_mass.clone()), pt(h.clone(), h.clone(), high_mass.clone())];
            let upper = vec![pt(&h + &eps, Rational::one(), low_mass), pt(h.clone(), h.clone(), high_mass)];
            let pair = DominancePair::aligned(&label, lower, upper)?;
            pair.check()?;
            Ok(Family::Pair(pair))
        }
    }
}

/// The explicitly constructed mechanism for a family, on its support.
pub fn witness_mechanism(params: &FamilyParams) -> Result<Mechanism> {
    let family = make_family(params)?;
    let d = family.primary();
    let two = Rational::from(2);
    let lotteries: Vec<Lottery> = match params.name {
        FamilyName::Prop3 | FamilyName::Prop4 => {
            let k = params.positive_int(params.k, "k")?;
            let b = Rational::from(2 * k as i64);
            // support is sorted by budget, so index i holds w = B^{i+1} (scaled for prop4)
            d.points()
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let q = Rational::new(1, 2) + Rational::from(i as i64 + 1) / &b;
                    let pay = &q * &p.w;
                    Lottery::new(q, pay)
                })
                .collect::<Result<_>>()?
        }
        FamilyName::Lemma4Trunc | FamilyName::Lemma5Trunc => d
            .points()
            .iter()
            .map(|p| {
                // entry k = min(i, j) where v = 4^i, w = 2^j
                let i = log2_exact(&p.v) / 2;
                let j = log2_exact(&p.w);
                let k = i.min(j);
                let q = Rational::one() - two.pow(-k);
                let pay = &q * two.pow(k);
                Lottery::new(q, pay)
            })
            .collect::<Result<_>>()?,
        FamilyName::Prop7 => d.points().iter().map(|p| Lottery::new(Rational::one(), p.v.clone())).collect::<Result<_>>()?,
        other => {
            return Err(Error::InvalidParameter(format!("family {other} has no explicit witness mechanism")))
        }
    };
    Mechanism::from_aligned(d, lotteries)
}

fn log2_exact(x: &Rational) -> i32 {
    (x.numer().bits() as i32) - 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{rat, revenue, validate_distribution};

    fn triples(d: &BuyerDistribution) -> Vec<(Rational, Rational, Rational)> {
        d.points().iter().map(|p| (p.v.clone(), p.w.clone(), p.prob.clone())).collect()
    }

    #[test]
    fn prop3_k2_support() {
        let d = make_family(&FamilyParams::with_k(FamilyName::Prop3, 2)).unwrap();
        assert_eq!(
            triples(d.single().unwrap()),
            vec![(rat(64, 1), rat(4, 1), rat(3, 4)), (rat(64, 1), rat(16, 1), rat(1, 4))]
        );
    }

    #[test]
    fn prop7_k3_support() {
        let d = make_family(&FamilyParams::with_k(FamilyName::Prop7, 3)).unwrap();
        assert_eq!(
            triples(d.single().unwrap()),
            vec![
                (rat(1, 1), rat(4, 3), rat(1, 3)),
                (rat(1, 2), rat(5, 3), rat(1, 3)),
                (rat(1, 3), rat(2, 1), rat(1, 3)),
            ]
        );
    }

    #[test]
    fn prop11_pair_support() {
        let fam = make_family(&FamilyParams::with_h_eps(FamilyName::Prop11Pair, rat(4, 1), rat(1, 1))).unwrap();
        let pair = fam.pair().unwrap();
        assert_eq!(triples(&pair.lower), vec![(rat(4, 1), rat(1, 1), rat(1, 4)), (rat(4, 1), rat(4, 1), rat(3, 4))]);
        assert_eq!(triples(&pair.upper), vec![(rat(5, 1), rat(1, 1), rat(1, 4)), (rat(4, 1), rat(4, 1), rat(3, 4))]);
    }

    #[test]
    fn prop8_pair_needs_coupling() {
        let fam = make_family(&FamilyParams::with_k(FamilyName::Prop8Pair, 3)).unwrap();
        let pair = fam.pair().unwrap();
        pair.check().unwrap();
        // Pairing by canonical index breaks dominance: the upper support is sorted by valuation.
        let naive: Vec<_> = (0..3).map(|i| (i, i, rat(1, 3))).collect();
        assert!(matches!(check_dominance(&pair.lower, &pair.upper, &naive), Err(Error::Dominance(_))));
    }

    #[test]
    fn witnesses_match_examples() {
        let m = witness_mechanism(&FamilyParams::with_k(FamilyName::Prop3, 2)).unwrap();
        let d = make_family(&FamilyParams::with_k(FamilyName::Prop3, 2)).unwrap();
        assert_eq!(
            m.aligned(d.primary()).unwrap(),
            vec![Lottery::new(rat(3, 4), rat(3, 1)).unwrap(), Lottery::new(rat(1, 1), rat(16, 1)).unwrap()]
        );
        let m = witness_mechanism(&FamilyParams::with_k(FamilyName::Prop7, 2)).unwrap();
        let d = make_family(&FamilyParams::with_k(FamilyName::Prop7, 2)).unwrap();
        assert_eq!(
            m.aligned(d.primary()).unwrap(),
            vec![Lottery::new(rat(1, 1), rat(1, 1)).unwrap(), Lottery::new(rat(1, 1), rat(1, 2)).unwrap()]
        );
        let m = witness_mechanism(&FamilyParams::with_n(FamilyName::Lemma4Trunc, 3)).unwrap();
        let d = make_family(&FamilyParams::with_n(FamilyName::Lemma4Trunc, 3)).unwrap();
        let expected: Vec<Lottery> = (1..=3)
            .map(|i| {
                let q = Rational::one() - rat(2, 1).pow(-i);
                Lottery::new(q.clone(), q * rat(2, 1).pow(i)).unwrap()
            })
            .collect();
        assert_eq!(m.aligned(d.primary()).unwrap(), expected);
        assert!(witness_mechanism(&FamilyParams::smallest(FamilyName::Prop9)).is_err());
    }

    #[test]
    fn missing_parameters_are_reported() {
        assert!(matches!(make_family(&FamilyParams::new(FamilyName::Prop3)), Err(Error::InvalidParameter(_))));
        assert!(make_family(&FamilyParams::with_k(FamilyName::Prop7, 0)).is_err());
        assert!(make_family(&FamilyParams::with_b_eps(FamilyName::Prop9, rat(1, 1), rat(1, 2))).is_err());
        assert!(make_family(&FamilyParams::with_h_eps(FamilyName::Prop11Pair, rat(4, 1), rat(0, 1))).is_err());
    }

    #[test]
    fn lemma5_masses_are_exact_after_renormalization() {
        let params = FamilyParams {
            precision: Some(10),
            ..FamilyParams::with_n(FamilyName::Lemma5Trunc, 4)
        };
        let Family::Single { distribution, residual, tail_mass } = make_family(&params).unwrap() else {
            panic!("single")
        };
        assert_eq!(distribution.len(), 16);
        assert!(validate_distribution(&distribution).is_valid());
        assert!(residual.unwrap() < Rational::from_big(1.into(), BigInt::from(10).pow(10)));
        // untruncated tail: 1 - (1 - 2^{-2})^2 = 7/16 up to the approximation
        assert!((tail_mass.unwrap().to_f64() - 7.0 / 16.0).abs() < 1e-9);
    }

    #[test]
    fn prop10_is_prop9_scaled() {
        let p9 = make_family(&FamilyParams::with_b_eps(FamilyName::Prop9, rat(5, 1), rat(1, 2))).unwrap();
        let p10 = make_family(&FamilyParams::with_b_eps(FamilyName::Prop10, rat(5, 1), rat(1, 2))).unwrap();
        let scaled = p9.primary().scaled(&rat(1, 6)).unwrap();
        assert_eq!(triples(&scaled), triples(p10.primary()));
    }

    #[test]
    fn prop4_revenue_is_scaled_prop3() {
        let d3 = make_family(&FamilyParams::with_k(FamilyName::Prop3, 2)).unwrap();
        let d4 = make_family(&FamilyParams::with_k(FamilyName::Prop4, 2)).unwrap();
        let m3 = witness_mechanism(&FamilyParams::with_k(FamilyName::Prop3, 2)).unwrap();
        let m4 = witness_mechanism(&FamilyParams::with_k(FamilyName::Prop4, 2)).unwrap();
        let r3 = revenue(&m3, d3.primary()).unwrap();
        let r4 = revenue(&m4, d4.primary()).unwrap();
        assert_eq!(r4, r3 * rat(4, 1).pow(-4));
    }
}
