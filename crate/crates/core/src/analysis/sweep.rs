//! Revenue ratios between classes across a family's parameter.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::constructions::{make_family, witness_mechanism, DominancePair, FamilyName, FamilyParams};
use crate::error::{Error, Result};
use crate::model::{harmonic, revenue, ClassSpec, Rational};
use crate::solvers::{solve_class, SolverConfig};

/// A class optimum, or the revenue of the family's explicit witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Benchmark {
    Class(ClassSpec),
    Witness,
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Benchmark::Class(c) => write!(f, "{c}"),
            Benchmark::Witness => f.write_str("witness"),
        }
    }
}

impl FromStr for Benchmark {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("witness") {
            Ok(Benchmark::Witness)
        } else {
            s.parse().map(Benchmark::Class)
        }
    }
}

impl Serialize for Benchmark {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    DecreasingToZero,
    IncreasingUnbounded,
    Flat,
    /// Neither monotone direction holds on the grid.
    Mixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// The ratio should not exceed the reference.
    Upper,
    /// The ratio should reach at least the reference.
    Lower,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GapPoint {
    pub param: Rational,
    pub numerator: Option<Rational>,
    pub denominator: Option<Rational>,
    pub ratio: Option<Rational>,
    /// Closed-form reference for the ratio where one is known.
    pub reference: Option<Rational>,
    pub reference_kind: Option<BoundKind>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GapReport {
    pub family: FamilyName,
    pub parameter: &'static str,
    pub numerator: Benchmark,
    pub denominator: Benchmark,
    pub points: Vec<GapPoint>,
    pub trend: Trend,
}

fn sweep_parameter(name: FamilyName) -> &'static str {
    match name {
        FamilyName::Prop3 | FamilyName::Prop4 | FamilyName::Prop7 | FamilyName::Prop8Pair => "k",
        FamilyName::Lemma4Trunc | FamilyName::Lemma5Trunc => "n",
        FamilyName::Prop9 | FamilyName::Prop10 => "B",
        FamilyName::Prop11Pair => "H",
    }
}

fn as_u32(x: &Rational) -> Result<u32> {
    use num_traits::ToPrimitive;
    let err = || Error::InvalidParameter(format!("expected a nonnegative integer, got {x}"));
    if x.denom() != &num_bigint::BigInt::from(1) {
        return Err(err());
    }
    x.numer().to_u32().ok_or_else(err)
}

fn instantiate(template: &FamilyParams, value: &Rational) -> Result<FamilyParams> {
    let mut p = template.clone();
    match sweep_parameter(template.name) {
        "k" => p.k = Some(as_u32(value)?),
        "n" => p.n = Some(as_u32(value)?),
        "B" => p.b = Some(value.clone()),
        _ => p.h = Some(value.clone()),
    }
    Ok(p)
}

fn evaluate(params: &FamilyParams, bench: Benchmark, cfg: &SolverConfig) -> Result<Rational> {
    let family = make_family(params)?;
    let d = family.primary();
    match bench {
        Benchmark::Class(c) => Ok(solve_class(d, c, cfg)?.value),
        Benchmark::Witness => revenue(&witness_mechanism(params)?, d),
    }
}

/// Closed-form references: `8(m + 1)/B` caps the menu-size gap on the
/// budget-ladder families, `H_k` is the cash-bond gap on the harmonic family,
/// and `1/(B - 1)` caps the strong-IC fraction on the two-type family.
fn reference(params: &FamilyParams, num: Benchmark, den: Benchmark) -> Option<(Rational, BoundKind)> {
    use Benchmark::{Class, Witness};
    match (params.name, num, den) {
        (FamilyName::Prop3 | FamilyName::Prop4, Class(ClassSpec::Menu(m)), Witness | Class(ClassSpec::M)) => {
            let b = Rational::from(2 * params.k? as i64);
            Some((Rational::from(8 * (m as i64 + 1)) / b, BoundKind::Upper))
        }
        (FamilyName::Prop7, Class(ClassSpec::Cb), Class(ClassSpec::M)) => Some((harmonic(params.k?), BoundKind::Lower)),
        (FamilyName::Prop9 | FamilyName::Prop10, Class(ClassSpec::Sic), Class(ClassSpec::M)) => {
            let b = params.b.clone()?;
            Some(((b - Rational::one()).recip(), BoundKind::Upper))
        }
        _ => None,
    }
}

fn trend_of(ratios: &[Rational]) -> Trend {
    if ratios.windows(2).all(|w| w[0] == w[1]) {
        Trend::Flat
    } else if ratios.windows(2).all(|w| w[1] <= w[0]) {
        Trend::DecreasingToZero
    } else if ratios.windows(2).all(|w| w[1] >= w[0]) {
        Trend::IncreasingUnbounded
    } else {
        Trend::Mixed
    }
}

/// Solves both benchmarks at every parameter value. A point that fails
/// carries its error and is left out of the trend.
pub fn gap_sweep(
    template: &FamilyParams,
    values: &[Rational],
    numerator: Benchmark,
    denominator: Benchmark,
    cfg: &SolverConfig,
) -> Result<GapReport> {
    let mut points = Vec::with_capacity(values.len());
    for value in values {
        let params = instantiate(template, value)?;
        let num = evaluate(&params, numerator, cfg);
        let den = evaluate(&params, denominator, cfg);
        let error = match (&num, &den) {
            (Err(e), _) | (_, Err(e)) => Some(format!("kind={} msg={e}", e.kind())),
            (Ok(_), Ok(d)) if d.is_zero() => Some("denominator is zero".to_string()),
            _ => None,
        };
        let ratio = match (&num, &den, &error) {
            (Ok(n), Ok(d), None) => Some(n / d),
            _ => None,
        };
        let reference = reference(&params, numerator, denominator);
        points.push(GapPoint {
            param: value.clone(),
            numerator: num.ok(),
            denominator: den.ok(),
            ratio,
            reference_kind: reference.as_ref().map(|r| r.1),
            reference: reference.map(|r| r.0),
            error,
        });
    }
    let ratios: Vec<Rational> = points.iter().filter_map(|p| p.ratio.clone()).collect();
    Ok(GapReport {
        family: template.name,
        parameter: sweep_parameter(template.name),
        numerator,
        denominator,
        trend: trend_of(&ratios),
        points,
    })
}

impl GapReport {
    pub fn to_json(&self) -> Result<String> {
        crate::model::io::to_json_string(self)
    }

    /// Columns: parameter, exact and decimal values of both benchmarks and
    /// of their ratio, the reference value, and any error.
    pub fn to_csv(&self) -> Result<String> {
        const DIGITS: usize = 12;
        let mut w = csv::Writer::from_writer(Vec::new());
        let map_csv = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record([
            self.parameter,
            "numerator",
            "numerator_decimal",
            "denominator",
            "denominator_decimal",
            "ratio",
            "ratio_decimal",
            "reference",
            "reference_kind",
            "error",
        ])
        .map_err(map_csv)?;
        let exact = |x: &Option<Rational>| x.as_ref().map(|r| r.to_string()).unwrap_or_default();
        let decimal = |x: &Option<Rational>| x.as_ref().map(|r| r.to_decimal_string(DIGITS)).unwrap_or_default();
        for p in &self.points {
            let kind = match p.reference_kind {
                Some(BoundKind::Upper) => "upper",
                Some(BoundKind::Lower) => "lower",
                None => "",
            };
            w.write_record([
                p.param.to_string(),
                exact(&p.numerator),
                decimal(&p.numerator),
                exact(&p.denominator),
                decimal(&p.denominator),
                exact(&p.ratio),
                decimal(&p.ratio),
                exact(&p.reference),
                kind.to_string(),
                p.error.clone().unwrap_or_default(),
            ])
            .map_err(map_csv)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
        String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NonmonotonicityGap {
    pub class: ClassSpec,
    pub lower_revenue: Rational,
    pub upper_revenue: Rational,
    pub ratio: Rational,
}

/// `Rev(lower | class) / Rev(upper | class)` after checking that `upper`
/// dominates `lower` along the coupling.
pub fn nonmono_gap(pair: &DominancePair, class: ClassSpec, cfg: &SolverConfig) -> Result<NonmonotonicityGap> {
    pair.check()?;
    let lower_revenue = solve_class(&pair.lower, class, cfg)?.value;
    let upper_revenue = solve_class(&pair.upper, class, cfg)?.value;
    if upper_revenue.is_zero() {
        return Err(Error::InvalidParameter("dominating distribution earns zero revenue".into()));
    }
    Ok(NonmonotonicityGap {
        class,
        ratio: &lower_revenue / &upper_revenue,
        lower_revenue,
        upper_revenue,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{rat, BuyerDistribution};

    #[test]
    fn trend_verdicts() {
        assert_eq!(trend_of(&[rat(1, 1), rat(1, 1)]), Trend::Flat);
        assert_eq!(trend_of(&[rat(2, 1), rat(1, 1)]), Trend::DecreasingToZero);
        assert_eq!(trend_of(&[rat(1, 1), rat(2, 1)]), Trend::IncreasingUnbounded);
        assert_eq!(trend_of(&[rat(1, 1), rat(2, 1), rat(1, 1)]), Trend::Mixed);
    }

    #[test]
    fn identical_pair_has_unit_gap() {
        let d = BuyerDistribution::from_triples(
            "x",
            [(rat(3, 1), rat(1, 1), rat(1, 2)), (rat(2, 1), rat(5, 1), rat(1, 2))],
        )
        .unwrap();
        let pair = DominancePair::identical(&d);
        for class in [ClassSpec::M, ClassSpec::Sic, ClassSpec::Cb] {
            assert_eq!(nonmono_gap(&pair, class, &SolverConfig::default()).unwrap().ratio, rat(1, 1));
        }
    }

    #[test]
    fn prop9_sweep() {
        let template = FamilyParams::with_b_eps(FamilyName::Prop9, rat(3, 1), rat(1, 2));
        let report = gap_sweep(
            &template,
            &[rat(3, 1), rat(5, 1), rat(9, 1)],
            Benchmark::Class(ClassSpec::Sic),
            Benchmark::Class(ClassSpec::M),
            &SolverConfig::default(),
        )
        .unwrap();
        assert_eq!(report.trend, Trend::DecreasingToZero);
        for p in &report.points {
            assert!(p.ratio.as_ref().unwrap() <= p.reference.as_ref().unwrap());
        }
        let csv = report.to_csv().unwrap();
        assert!(csv.starts_with("B,numerator,"));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn failing_points_are_flagged() {
        let template = FamilyParams::with_k(FamilyName::Prop7, 2);
        let cfg = SolverConfig {
            enumeration_cap: 1,
            ..Default::default()
        };
        let report = gap_sweep(
            &template,
            &[rat(3, 1)],
            Benchmark::Class(ClassSpec::Menu(1)),
            Benchmark::Class(ClassSpec::M),
            &cfg,
        )
        .unwrap();
        assert!(report.points[0].error.as_ref().unwrap().contains("enumeration_budget"));
        assert!(report.points[0].ratio.is_none());
    }
}
