//! Public valuation `v_hat > 1`, budget uniform on `[0, 1]`.
//!
//! The optimal mechanism has a critical budget `w_c`: types below it get
//! `x = (v_hat - w_c)/(v_hat - w)` and pay their whole budget on winning;
//! types above it share the sure sale at price `w_c`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{BuyerDistribution, Lottery, Rational, TypePoint};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Example1Params {
    pub v_hat: Rational,
    pub w_c: Rational,
}

impl Example1Params {
    pub fn new(v_hat: Rational, w_c: Rational) -> Result<Self> {
        if v_hat <= Rational::one() {
            return Err(Error::InvalidParameter(format!("v_hat must exceed 1, got {v_hat}")));
        }
        if !w_c.is_positive() || w_c >= Rational::one() {
            return Err(Error::InvalidParameter(format!("w_c must lie in (0, 1), got {w_c}")));
        }
        Ok(Example1Params { v_hat, w_c })
    }
}

pub fn example1_query(params: &Example1Params, w: &Rational) -> Result<Lottery> {
    if w.is_negative() || *w > Rational::one() {
        return Err(Error::InvalidParameter(format!("budget must lie in [0, 1], got {w}")));
    }
    if *w >= params.w_c {
        return Lottery::new(Rational::one(), params.w_c.clone());
    }
    let q = (&params.v_hat - &params.w_c) / (&params.v_hat - w);
    let p = w * &q;
    Lottery::new(q, p)
}

/// Revenue of the mechanism with critical budget `c`:
/// `(v - c)(v ln(v/(v - c)) - c) + c(1 - c)`.
pub fn example1_revenue(v_hat: f64, c: f64) -> f64 {
    (v_hat - c) * (v_hat * (v_hat / (v_hat - c)).ln() - c) + c * (1.0 - c)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Example1Optimum {
    pub w_c: f64,
    pub revenue: f64,
    /// Independent maximizer from a uniform scan, for cross-checking.
    pub scan_w_c: f64,
    pub scan_revenue: f64,
    pub tolerance: f64,
}

impl Example1Optimum {
    /// Rational stand-in for `w_c`, for exact queries.
    pub fn params(&self, v_hat: &Rational) -> Result<Example1Params> {
        let w_c = Rational::approximate_f64(self.w_c, 1_000_000)
            .ok_or_else(|| Error::InvalidParameter(format!("w_c {} not representable", self.w_c)))?;
        Example1Params::new(v_hat.clone(), w_c)
    }
}

pub const DEFAULT_TOLERANCE: f64 = 1e-6;
const SCAN_STEP: f64 = 1e-4;

/// Maximizes the revenue over `c` in `(0, 1)` by golden-section search down
/// to `tolerance`, alongside a uniform scan.
pub fn example1_optimal_wc(v_hat: &Rational, tolerance: f64) -> Result<Example1Optimum> {
    if *v_hat <= Rational::one() {
        return Err(Error::InvalidParameter(format!("v_hat must exceed 1, got {v_hat}")));
    }
    if !(tolerance > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tolerance}")));
    }
    let v = v_hat.to_f64();
    let r = |c: f64| example1_revenue(v, c);

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let (mut fa, mut fb) = (r(a), r(b));
    while hi - lo > tolerance {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = r(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = r(a);
        }
    }
    let w_c = (lo + hi) / 2.0;

    let steps = (1.0 / SCAN_STEP).round() as usize;
    let (scan_w_c, scan_revenue) = (1..steps)
        .map(|i| {
            let c = i as f64 * SCAN_STEP;
            (c, r(c))
        })
        .fold((0.0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });

    Ok(Example1Optimum {
        w_c,
        revenue: r(w_c),
        scan_w_c,
        scan_revenue,
        tolerance,
    })
}

/// Budgets `0, 1/n, ..., (n-1)/n` with mass `1/n` each: the uniform law
/// with each budget rounded down to the grid. Refining the grid moves mass
/// upward, so finer grids dominate coarser ones.
pub fn example1_grid(v_hat: &Rational, n: u32) -> Result<BuyerDistribution> {
    if n == 0 {
        return Err(Error::InvalidParameter("grid needs at least one point".into()));
    }
    let n = n as i64;
    let points = (0..n)
        .map(|k| TypePoint::new(v_hat.clone(), Rational::new(k, n), Rational::new(1, n)))
        .collect();
    BuyerDistribution::new(format!("example1,v_hat={v_hat},n={n}"), points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rat;

    #[test]
    fn query_examples() {
        let p = Example1Params::new(rat(2, 1), rat(1, 2)).unwrap();
        assert_eq!(example1_query(&p, &rat(1, 4)).unwrap(), Lottery::new(rat(6, 7), rat(3, 14)).unwrap());
        assert_eq!(example1_query(&p, &rat(3, 4)).unwrap(), Lottery::new(rat(1, 1), rat(1, 2)).unwrap());
        assert_eq!(example1_query(&p, &rat(1, 2)).unwrap(), Lottery::new(rat(1, 1), rat(1, 2)).unwrap());
        assert_eq!(example1_query(&p, &rat(0, 1)).unwrap(), Lottery::new(rat(3, 4), rat(0, 1)).unwrap());
        assert!(example1_query(&p, &rat(3, 2)).is_err());
        assert!(Example1Params::new(rat(1, 1), rat(1, 2)).is_err());
        assert!(Example1Params::new(rat(2, 1), rat(1, 1)).is_err());
    }

    #[test]
    fn optimum_agrees_with_scan() {
        let opt = example1_optimal_wc(&rat(2, 1), DEFAULT_TOLERANCE).unwrap();
        assert!((opt.w_c - opt.scan_w_c).abs() < 1e-3);
        assert!((opt.revenue - opt.scan_revenue).abs() < 1e-3);
        for shift in [-1e-3, 1e-3] {
            assert!(opt.revenue >= example1_revenue(2.0, opt.w_c + shift));
        }
        assert!(example1_optimal_wc(&rat(1, 1), DEFAULT_TOLERANCE).is_err());
    }

    #[test]
    fn grid_has_uniform_mass() {
        let d = example1_grid(&rat(2, 1), 10).unwrap();
        assert_eq!(d.len(), 10);
        assert_eq!(d.points()[3].w, rat(3, 10));
    }
}
