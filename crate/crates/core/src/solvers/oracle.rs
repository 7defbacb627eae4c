//! Grid search over lotteries for instances with at most three types.
//!
//! Works in scaled integers: with `L` the common denominator of all values
//! and budgets, a lottery with `q = a/g` and actual price `b z_j / g` on
//! type `j`'s grid becomes `(Q, P) = (a, a b Z_j)`, where `Z_j = L min(v_j,
//! w_j)`. Utilities and affordability then compare exactly in `i128`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use super::SolverConfig;
use crate::error::{Error, Result};
use crate::feasibility::check_feasible;
use crate::model::{revenue, BuyerDistribution, ClassSpec, Lottery, Mechanism, Rational};

const MAX_TYPES: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub value: Rational,
    pub mechanism: Mechanism,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Opt {
    q: i128,
    pay: i128,
}

struct Scaled {
    g: i128,
    v: Vec<i128>,
    w: Vec<i128>,
    z: Vec<i128>,
    f: Vec<i128>,
    /// Payment denominator `g^2 L`.
    pay_den: BigInt,
}

fn to_i128(x: &BigInt) -> Result<i128> {
    x.to_i128()
        .ok_or_else(|| Error::InvalidParameter("instance too large for the grid oracle".into()))
}

fn scale_instance(d: &BuyerDistribution, g: u32) -> Result<Scaled> {
    let mut l = BigInt::one();
    let mut fden = BigInt::one();
    for p in d.points() {
        l = l.lcm(p.v.denom()).lcm(p.w.denom());
        fden = fden.lcm(p.prob.denom());
    }
    let scaled = |x: &Rational, s: &BigInt| to_i128(&(x.numer() * (s / x.denom())));
    let mut out = Scaled {
        g: g as i128,
        v: Vec::new(),
        w: Vec::new(),
        z: Vec::new(),
        f: Vec::new(),
        pay_den: BigInt::from(g) * BigInt::from(g) * &l,
    };
    for p in d.points() {
        out.v.push(scaled(&p.v, &l)?);
        out.w.push(scaled(&p.w, &l)?);
        out.z.push(scaled(&p.cap(), &l)?);
        out.f.push(scaled(&p.prob, &fden)?);
    }
    Ok(out)
}

impl Scaled {
    fn utility(&self, t: usize, o: Opt) -> i128 {
        self.v[t] * o.q * self.g - o.pay
    }

    fn affordable(&self, t: usize, o: Opt) -> bool {
        o.pay <= self.w[t] * o.q * self.g
    }

    fn lottery(&self, o: Opt) -> Result<Lottery> {
        Lottery::new(
            Rational::from_big(BigInt::from(o.q), BigInt::from(self.g)),
            Rational::from_big(BigInt::from(o.pay), self.pay_den.clone()),
        )
    }

    /// Whether type `t` is bound by its incentive constraint toward lottery
    /// `o` held by type `u`.
    fn binds(&self, class: ClassSpec, t: usize, u: usize, o: Opt) -> bool {
        match class {
            ClassSpec::Sic => true,
            ClassSpec::Cb => self.w[u] <= self.w[t],
            _ => self.affordable(t, o),
        }
    }

    fn compatible(&self, class: ClassSpec, i: usize, a: Opt, j: usize, b: Opt) -> bool {
        (!self.binds(class, i, j, b) || self.utility(i, a) >= self.utility(i, b))
            && (!self.binds(class, j, i, a) || self.utility(j, b) >= self.utility(j, a))
    }

    /// Every lottery type `t` can accept on the union of all types' grids,
    /// by decreasing payment.
    fn options(&self, t: usize) -> Vec<Opt> {
        let mut pays = std::collections::BTreeSet::new();
        for &zj in &self.z {
            for b in 0..=self.g {
                if b * zj > self.g * self.z[t] {
                    break;
                }
                pays.insert(b * zj);
            }
        }
        let mut out = vec![Opt { q: 0, pay: 0 }];
        for a in 1..=self.g {
            out.extend(pays.iter().map(|&unit| Opt { q: a, pay: a * unit }));
        }
        out.sort_by(|x, y| y.pay.cmp(&x.pay).then(y.q.cmp(&x.q)));
        out
    }
}

/// Best revenue over lotteries on a `grid`-point lattice per coordinate.
///
/// For classes M, strong IC and cash bond each type draws `q = a/g` and an
/// actual price `b min(v_j, w_j)/g` from any type's lattice, up to its own
/// `min(v, w)`. For menu caps below the type count and for posted prices the
/// menu is drawn from the same union and types choose from it. Always a lower
/// bound on the class optimum.
pub fn brute_force_oracle(
    d: &BuyerDistribution,
    class: ClassSpec,
    grid: u32,
    cfg: &SolverConfig,
) -> Result<OracleResult> {
    if d.len() > MAX_TYPES {
        return Err(Error::InvalidParameter(format!(
            "oracle handles at most {MAX_TYPES} types, got {}",
            d.len()
        )));
    }
    if grid == 0 || grid > cfg.oracle_grid_cap {
        return Err(Error::InvalidParameter(format!(
            "oracle grid must lie in 1..={}, got {grid}",
            cfg.oracle_grid_cap
        )));
    }
    let s = scale_instance(d, grid)?;
    let n = d.len();
    let choice = match class {
        ClassSpec::Menu(m) if (m as usize) < n => search_menu(&s, m as usize, false),
        ClassSpec::Posted => search_menu(&s, 1, true),
        _ => search_direct(&s, class),
    };

    let lotteries = choice.iter().map(|o| s.lottery(*o)).collect::<Result<Vec<_>>>()?;
    let mechanism = Mechanism::from_aligned(d, lotteries)?;
    let report = check_feasible(&mechanism, d, class)?;
    if !report.is_feasible() {
        return Err(Error::Certificate(format!(
            "oracle produced an infeasible mechanism: {:?}",
            report.violations
        )));
    }
    Ok(OracleResult {
        value: revenue(&mechanism, d)?,
        mechanism,
    })
}

fn search_direct(s: &Scaled, class: ClassSpec) -> Vec<Opt> {
    let n = s.v.len();
    let opts: Vec<Vec<Opt>> = (0..n).map(|t| s.options(t)).collect();
    let rev = |t: usize, o: Opt| s.f[t] * o.pay;
    let top: Vec<i128> = (0..n).map(|t| rev(t, opts[t][0])).collect();
    let trivial = Opt { q: 0, pay: 0 };
    match n {
        0 => Vec::new(),
        1 => vec![opts[0][0]],
        2 => {
            let mut best = (0, vec![trivial, trivial]);
            for &a in &opts[0] {
                if rev(0, a) + top[1] <= best.0 {
                    break;
                }
                for &b in &opts[1] {
                    let r = rev(0, a) + rev(1, b);
                    if r <= best.0 {
                        break;
                    }
                    if s.compatible(class, 0, a, 1, b) {
                        best = (r, vec![a, b]);
                        break;
                    }
                }
            }
            best.1
        }
        _ => {
            let words = opts[2].len().div_ceil(64);
            let bits = |t: usize| -> Vec<Vec<u64>> {
                opts[t]
                    .iter()
                    .map(|&a| {
                        let mut row = vec![0u64; words];
                        for (k, &c) in opts[2].iter().enumerate() {
                            if s.compatible(class, t, a, 2, c) {
                                row[k / 64] |= 1 << (k % 64);
                            }
                        }
                        row
                    })
                    .collect()
            };
            let with0 = bits(0);
            let with1 = bits(1);
            let mut best = (0, vec![trivial, trivial, trivial]);
            for (ia, &a) in opts[0].iter().enumerate() {
                if rev(0, a) + top[1] + top[2] <= best.0 {
                    break;
                }
                for (ib, &b) in opts[1].iter().enumerate() {
                    let r = rev(0, a) + rev(1, b);
                    if r + top[2] <= best.0 {
                        break;
                    }
                    if !s.compatible(class, 0, a, 1, b) {
                        continue;
                    }
                    let first = with0[ia]
                        .iter()
                        .zip(&with1[ib])
                        .enumerate()
                        .find_map(|(wi, (x, y))| {
                            let both = x & y;
                            (both != 0).then(|| wi * 64 + both.trailing_zeros() as usize)
                        });
                    if let Some(k) = first {
                        let c = opts[2][k];
                        let total = r + rev(2, c);
                        if total > best.0 {
                            best = (total, vec![a, b, c]);
                        }
                    }
                }
            }
            best.1
        }
    }
}

/// Menus of at most `m` lotteries from a shared lattice; each type takes its
/// favorite affordable entry (ties to the higher payment) or nothing.
fn search_menu(s: &Scaled, m: usize, posted: bool) -> Vec<Opt> {
    let n = s.v.len();
    let units: std::collections::BTreeSet<i128> =
        s.z.iter().flat_map(|&zj| (1..=s.g).map(move |b| b * zj)).collect();
    let mut lattice = Vec::new();
    let qs: Vec<i128> = if posted { vec![s.g] } else { (1..=s.g).collect() };
    for &a in &qs {
        lattice.extend(units.iter().map(|&unit| Opt { q: a, pay: a * unit }));
    }
    let respond = |menu: &[Opt]| -> (i128, Vec<Opt>) {
        let mut total = 0;
        let mut picks = Vec::with_capacity(n);
        for t in 0..n {
            let mut pick = Opt { q: 0, pay: 0 };
            let mut best_u = 0;
            for &o in menu {
                // individually rational and affordable at the realized price
                if o.pay > s.z[t] * o.q * s.g {
                    continue;
                }
                let u = s.utility(t, o);
                if u > best_u || (u == best_u && (o.pay, o.q) > (pick.pay, pick.q)) {
                    pick = o;
                    best_u = u;
                }
            }
            total += s.f[t] * pick.pay;
            picks.push(pick);
        }
        (total, picks)
    };
    let mut best = (0, vec![Opt { q: 0, pay: 0 }; n]);
    let mut idx = vec![0usize; m];
    loop {
        let menu: Vec<Opt> = idx.iter().map(|&i| lattice[i]).collect();
        let (r, picks) = respond(&menu);
        if r > best.0 {
            best = (r, picks);
        }
        // next non-decreasing index tuple
        let mut pos = m;
        while pos > 0 && idx[pos - 1] == lattice.len() - 1 {
            pos -= 1;
        }
        if pos == 0 {
            break;
        }
        idx[pos - 1] += 1;
        let v = idx[pos - 1];
        for slot in idx.iter_mut().skip(pos) {
            *slot = v;
        }
    }
    best.1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rat;

    #[test]
    fn single_type_grid_eight() {
        let d = BuyerDistribution::from_triples("one", [(rat(2, 1), rat(3, 1), rat(1, 1))]).unwrap();
        let cfg = SolverConfig::default();
        for class in [ClassSpec::M, ClassSpec::Sic, ClassSpec::Cb, ClassSpec::Posted, ClassSpec::Menu(1)] {
            assert_eq!(brute_force_oracle(&d, class, 8, &cfg).unwrap().value, rat(2, 1), "{class}");
        }
    }

    #[test]
    fn caps_are_enforced() {
        let d = BuyerDistribution::from_triples("one", [(rat(2, 1), rat(3, 1), rat(1, 1))]).unwrap();
        let cfg = SolverConfig::default();
        assert!(brute_force_oracle(&d, ClassSpec::M, 0, &cfg).is_err());
        assert!(brute_force_oracle(&d, ClassSpec::M, cfg.oracle_grid_cap + 1, &cfg).is_err());
    }
}
