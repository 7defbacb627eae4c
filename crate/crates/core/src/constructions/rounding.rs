//! Geometric rounding of a bounded type space.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{BuyerDistribution, Rational, TypeKey, TypePoint};

/// Largest `(1 + eps)^j <= x` with `j >= 0`; `x >= 1` required.
fn floor_power(x: &Rational, base: &Rational) -> Rational {
    let mut p = Rational::one();
    loop {
        let next = &p * base;
        if next > *x {
            return p;
        }
        p = next;
    }
}

/// Number of powers `(1 + eps)^j`, `j >= 0`, not exceeding `h / l`.
fn levels(eps: &Rational, l: &Rational, h: &Rational) -> u64 {
    let top = h / l;
    let base = Rational::one() + eps;
    let mut p = Rational::one();
    let mut count = 0;
    while p <= top {
        count += 1;
        p *= &base;
    }
    count
}

/// `(1 + floor(log_{1+eps}(H/L)))^2`.
pub fn round_down_bound(eps: &Rational, l: &Rational, h: &Rational) -> Result<u64> {
    check_params(eps, l, h)?;
    let n = levels(eps, l, h);
    Ok(n * n)
}

fn check_params(eps: &Rational, l: &Rational, h: &Rational) -> Result<()> {
    if !eps.is_positive() {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    if !l.is_positive() || l >= h {
        return Err(Error::InvalidParameter(format!("need 0 < L < H, got L={l}, H={h}")));
    }
    Ok(())
}

/// Divides every coordinate by `l`, rounds it down to a power of `1 + eps`
/// and merges types that collide.
pub fn round_down(d: &BuyerDistribution, eps: &Rational, l: &Rational, h: &Rational) -> Result<BuyerDistribution> {
    check_params(eps, l, h)?;
    let base = Rational::one() + eps;
    let mut merged: BTreeMap<TypeKey, Rational> = BTreeMap::new();
    for p in d.points() {
        for c in [&p.v, &p.w] {
            if c < l || c > h {
                return Err(Error::InvalidParameter(format!(
                    "type {} lies outside [{l}, {h}]^2",
                    p.key()
                )));
            }
        }
        let v = floor_power(&(&p.v / l), &base);
        let w = floor_power(&(&p.w / l), &base);
        *merged.entry(TypeKey::new(v, w)).or_insert_with(Rational::zero) += &p.prob;
    }
    let points = merged.into_iter().map(|(k, prob)| TypePoint::new(k.v, k.w, prob)).collect();
    BuyerDistribution::new(format!("{}:rounded(eps={eps})", d.label()), points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rat;

    #[test]
    fn rounds_to_powers() {
        let d = BuyerDistribution::from_triples("x", [(rat(4, 1), rat(4, 1), rat(1, 1))]).unwrap();
        let r = round_down(&d, &rat(1, 2), &rat(1, 1), &rat(4, 1)).unwrap();
        assert_eq!(r.points()[0].key(), TypeKey::new(rat(27, 8), rat(27, 8)));
        let fixed = BuyerDistribution::from_triples("y", [(rat(9, 4), rat(3, 2), rat(1, 1))]).unwrap();
        let r = round_down(&fixed, &rat(1, 2), &rat(1, 1), &rat(4, 1)).unwrap();
        assert_eq!(r.points()[0].key(), TypeKey::new(rat(9, 4), rat(3, 2)));
    }

    #[test]
    fn bounds() {
        assert_eq!(round_down_bound(&rat(1, 2), &rat(1, 1), &rat(4, 1)).unwrap(), 16);
        assert_eq!(round_down_bound(&rat(1, 5), &rat(1, 1), &rat(4, 1)).unwrap(), 64);
    }

    #[test]
    fn rejects_out_of_range() {
        let d = BuyerDistribution::from_triples("x", [(rat(5, 1), rat(4, 1), rat(1, 1))]).unwrap();
        assert!(round_down(&d, &rat(1, 2), &rat(1, 1), &rat(4, 1)).is_err());
        assert!(round_down(&d, &rat(0, 1), &rat(1, 1), &rat(8, 1)).is_err());
    }
}
