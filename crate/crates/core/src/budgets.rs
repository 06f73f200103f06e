//! Budget and weight functions for weighted approval voting.
//!
//! For an agent who still wants `r` of the remaining goods and needs `s` of
//! them, the budget `B(r, s)` is the fraction of such agents the two-group
//! round-robin can guarantee, and `w(r, s) = B(r, s) - B(r - 1, s)` is the
//! agent's voting weight. All two-group values are dyadic rationals and are
//! kept exact. The coin-toss variant uses `C(r, s)`, and the `k`-group
//! variant uses a geometric weight with base `2^(1/(k-1))`, which is
//! irrational for `k >= 3` and therefore evaluated in `f64`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::model::Rational;

/// An exact rational `numerator / 2^exponent`, kept canonical (odd numerator
/// or zero with exponent 0).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    numerator: BigInt,
    exponent: u32,
}

impl Dyadic {
    pub fn new(numerator: impl Into<BigInt>, exponent: u32) -> Self {
        let mut d = Dyadic {
            numerator: numerator.into(),
            exponent,
        };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        Dyadic::new(0, 0)
    }

    pub fn one() -> Self {
        Dyadic::new(1, 0)
    }

    pub fn from_int(n: i64) -> Self {
        Dyadic::new(n, 0)
    }

    fn normalize(&mut self) {
        if self.numerator.is_zero() {
            self.exponent = 0;
            return;
        }
        let tz = self.numerator.trailing_zeros().unwrap_or(0) as u32;
        let shift = tz.min(self.exponent);
        if shift > 0 {
            self.numerator >>= shift as usize;
            self.exponent -= shift;
        }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.numerator
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.numerator.is_negative()
    }

    pub fn half(&self) -> Self {
        Dyadic::new(self.numerator.clone(), self.exponent + 1)
    }

    /// Numerators of `self` and `other` over the common denominator.
    fn aligned(&self, other: &Dyadic) -> (BigInt, BigInt, u32) {
        let e = self.exponent.max(other.exponent);
        (
            &self.numerator << (e - self.exponent) as usize,
            &other.numerator << (e - other.exponent) as usize,
            e,
        )
    }

    pub fn min(self, other: Dyadic) -> Dyadic {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Dyadic) -> Dyadic {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(self.numerator.clone(), BigInt::one() << self.exponent as usize)
    }

    pub fn to_f64(&self) -> f64 {
        self.numerator.to_f64().unwrap_or(f64::NAN) / 2f64.powi(self.exponent as i32)
    }

    /// Exact decimal expansion; every dyadic rational has a finite one.
    pub fn to_decimal(&self) -> String {
        if self.exponent == 0 {
            return self.numerator.to_string();
        }
        let scaled = self.numerator.abs() * BigInt::from(5).pow(self.exponent);
        let digits = scaled.to_string();
        let e = self.exponent as usize;
        let padded = format!("{digits:0>width$}", width = e + 1);
        let (int_part, frac) = padded.split_at(padded.len() - e);
        let sign = if self.numerator.is_negative() { "-" } else { "" };
        format!("{sign}{int_part}.{frac}")
    }

    /// Decimal rendering used in protocol traces: `0` for zero, a trailing
    /// `.0` for other integers, the exact expansion otherwise.
    pub fn to_trace_string(&self) -> String {
        if self.is_zero() {
            "0".to_string()
        } else if self.exponent == 0 {
            format!("{}.0", self.numerator)
        } else {
            self.to_decimal()
        }
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 0 {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/{}", self.numerator, BigInt::one() << self.exponent as usize)
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, e) = self.aligned(rhs);
        Dyadic::new(a + b, e)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        &self + &rhs
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, e) = self.aligned(rhs);
        Dyadic::new(a - b, e)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        &self - &rhs
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic::new(-self.numerator, self.exponent)
    }
}

impl AddAssign<&Dyadic> for Dyadic {
    fn add_assign(&mut self, rhs: &Dyadic) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Dyadic> for Dyadic {
    fn sub_assign(&mut self, rhs: &Dyadic) {
        *self = &*self - rhs;
    }
}

impl std::iter::Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::zero(), |a, b| a + b)
    }
}

pub const DEFAULT_R_MAX: i64 = 64;

/// Memoized `B` and `C` over `[-2, r_max] x [-2, r_max]`.
#[derive(Clone, Debug)]
pub struct BudgetTable {
    r_max: i64,
    budget: Vec<Dyadic>,
    coin: Vec<Dyadic>,
}

const LOW: i64 = -2;

impl BudgetTable {
    pub fn new(r_max: i64) -> Self {
        let r_max = r_max.max(0);
        let side = (r_max - LOW + 1) as usize;
        let mut table = BudgetTable {
            r_max,
            budget: vec![Dyadic::zero(); side * side],
            coin: vec![Dyadic::zero(); side * side],
        };
        // Row r only depends on rows r-1 and r-2.
        for r in LOW..=r_max {
            for s in LOW..=r_max {
                let (b, c) = if s <= 0 {
                    (Dyadic::one(), Dyadic::one())
                } else if r < s {
                    (Dyadic::zero(), Dyadic::zero())
                } else {
                    let avg = (table.get_b(r - 1, s) + table.get_b(r - 1, s - 1)).half();
                    let b = avg.min(table.get_b(r - 2, s - 1));
                    let c = (table.get_c(r - 1, s) + table.get_c(r - 1, s - 1)).half();
                    (b, c)
                };
                let i = table.index(r, s);
                table.budget[i] = b;
                table.coin[i] = c;
            }
        }
        table
    }

    pub fn r_max(&self) -> i64 {
        self.r_max
    }

    fn index(&self, r: i64, s: i64) -> usize {
        let side = (self.r_max - LOW + 1) as usize;
        (r - LOW) as usize * side + (s - LOW) as usize
    }

    fn get_b(&self, r: i64, s: i64) -> Dyadic {
        self.lookup(&self.budget, r, s)
    }

    fn get_c(&self, r: i64, s: i64) -> Dyadic {
        self.lookup(&self.coin, r, s)
    }

    // Arguments outside the stored square fall in a boundary branch.
    fn lookup(&self, values: &[Dyadic], r: i64, s: i64) -> Dyadic {
        if s <= 0 {
            Dyadic::one()
        } else if r < s {
            Dyadic::zero()
        } else {
            values[self.index(r.max(LOW), s.max(LOW))].clone()
        }
    }

    fn check(&self, r: i64) -> Result<()> {
        if r > self.r_max {
            Err(Error::BudgetRange { r, r_max: self.r_max })
        } else {
            Ok(())
        }
    }

    /// `B(r, s)`.
    pub fn budget(&self, r: i64, s: i64) -> Result<Dyadic> {
        self.check(r)?;
        Ok(self.get_b(r, s))
    }

    /// `w(r, s) = B(r, s) - B(r - 1, s)`.
    pub fn weight(&self, r: i64, s: i64) -> Result<Dyadic> {
        self.check(r)?;
        Ok(self.get_b(r, s) - self.get_b(r - 1, s))
    }

    /// `C(r, s)`, the coin-toss budget.
    pub fn coin_budget(&self, r: i64, s: i64) -> Result<Dyadic> {
        self.check(r)?;
        Ok(self.get_c(r, s))
    }

    /// `C(r, s) - C(r - 1, s)`.
    pub fn coin_weight(&self, r: i64, s: i64) -> Result<Dyadic> {
        self.check(r)?;
        Ok(self.get_c(r, s) - self.get_c(r - 1, s))
    }
}

/// Shared table with `r_max = 64`.
pub fn default_table() -> &'static BudgetTable {
    static TABLE: OnceLock<BudgetTable> = OnceLock::new();
    TABLE.get_or_init(|| BudgetTable::new(DEFAULT_R_MAX))
}

pub fn budget(r: i64, s: i64) -> Result<Dyadic> {
    default_table().budget(r, s)
}

pub fn weight(r: i64, s: i64) -> Result<Dyadic> {
    default_table().weight(r, s)
}

pub fn coin_budget(r: i64, s: i64) -> Result<Dyadic> {
    default_table().coin_budget(r, s)
}

pub fn coin_weight(r: i64, s: i64) -> Result<Dyadic> {
    default_table().coin_weight(r, s)
}

pub fn binom(n: i64, k: i64) -> BigInt {
    if k < 0 || n < 0 || k > n {
        return BigInt::zero();
    }
    num_integer::binomial(BigInt::from(n), BigInt::from(k))
}

/// Closed form `2^-r * sum_{i=s}^{r-s+1} binom(r, i)` for `r, s >= 0`.
pub fn budget_closed(r: u32, s: u32) -> Dyadic {
    let (r, s) = (r as i64, s as i64);
    let sum: BigInt = (s..=r - s + 1).map(|i| binom(r, i)).sum();
    Dyadic::new(sum, r as u32)
}

/// `C(r, s) = 2^-r * sum_{i=s}^{r} binom(r, i)`.
pub fn coin_budget_closed(r: u32, s: u32) -> Dyadic {
    let (r, s) = (r as i64, s as i64);
    let sum: BigInt = (s..=r).map(|i| binom(r, i)).sum();
    Dyadic::new(sum, r as u32)
}

/// Upper bound on the achievable democratic fraction when every agent wants
/// `r` goods and needs `s`, as the number of goods grows: zero when
/// `r <= k s - 1`, otherwise `k^-r * sum_{i=s}^r (k-1)^(r-i) binom(r, i)`.
pub fn max_h_bound(r: u32, s: u32, k: u32) -> Rational {
    let (r, s, k) = (r as i64, s as i64, k as i64);
    if r < k * s {
        return Rational::zero();
    }
    let num: BigInt = (s..=r)
        .map(|i| BigInt::from(k - 1).pow((r - i) as u32) * binom(r, i))
        .sum();
    Rational::new(num, BigInt::from(k).pow(r as u32))
}

/// The same bound on the concrete instance with `k m` goods and one agent
/// per `r`-subset: the fraction of `r`-subsets meeting a fixed `m`-subset in
/// at least `s` goods.
pub fn max_h_finite(r: u32, s: u32, k: u32, m: u32) -> Rational {
    let (r, s, k, m) = (r as i64, s as i64, k as i64, m as i64);
    let num: BigInt = (s..=r).map(|i| binom(m, i) * binom((k - 1) * m, r - i)).sum();
    let den = binom(k * m, r);
    if den.is_zero() {
        return Rational::zero();
    }
    Rational::new(num, den)
}

pub const DEFAULT_K_TOLERANCE: f64 = 1e-12;

/// Budgets and weights for `k` groups, defined for `s` in `{0, 1}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KGroupBudget {
    k: u32,
    base: f64,
    pub tolerance: f64,
}

impl KGroupBudget {
    pub fn new(k: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::Precondition(format!("k-group budget needs k >= 2, got {k}")));
        }
        let base = if k == 2 { 2.0 } else { 2f64.powf(1.0 / (k as f64 - 1.0)) };
        Ok(KGroupBudget {
            k,
            base,
            tolerance: DEFAULT_K_TOLERANCE,
        })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// `L_k = 2^(1/(k-1))`.
    pub fn base(&self) -> f64 {
        self.base
    }

    fn check_s(s: i64) -> Result<()> {
        if s == 0 || s == 1 {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "k-group weights are defined only for s in {{0, 1}}, got {s}"
            )))
        }
    }

    pub fn budget(&self, r: i64, s: i64) -> Result<f64> {
        Self::check_s(s)?;
        Ok(if s == 0 {
            1.0
        } else if r <= 0 {
            0.0
        } else {
            1.0 - self.base.powi(-(r as i32))
        })
    }

    pub fn weight(&self, r: i64, s: i64) -> Result<f64> {
        Self::check_s(s)?;
        Ok(if s == 0 || r <= 0 {
            0.0
        } else {
            (self.base - 1.0) / self.base.powi(r as i32)
        })
    }
}

/// Spot checks of the budget table's analytic properties. Each returns the
/// first `(r, s)` (or `(c, s)`) violating the property, if any.
pub mod facts {
    use super::*;

    pub fn closed_form_mismatch(table: &BudgetTable, r_max: u32) -> Option<(u32, u32)> {
        (0..=r_max)
            .flat_map(|r| (0..=r).map(move |s| (r, s)))
            .find(|&(r, s)| table.budget(r as i64, s as i64).ok() != Some(budget_closed(r, s)))
    }

    pub fn monotonicity_violation(table: &BudgetTable, r_max: i64) -> Option<(i64, i64)> {
        for r in 0..=r_max {
            for s in 0..=r_max {
                let b = table.budget(r, s).ok()?;
                if r >= 1 && table.budget(r - 1, s).ok()? > b {
                    return Some((r, s));
                }
                if s >= 1 && table.budget(r, s - 1).ok()? < b {
                    return Some((r, s));
                }
                if b.is_negative() || b > Dyadic::one() {
                    return Some((r, s));
                }
            }
        }
        None
    }

    pub fn zero_region_violation(table: &BudgetTable, s_max: i64) -> Option<(i64, i64)> {
        (1..=s_max)
            .flat_map(|s| (0..=2 * s - 2).map(move |r| (r, s)))
            .find(|&(r, s)| !table.budget(r, s).map(|b| b.is_zero()).unwrap_or(false))
    }

    pub fn simplified_recurrence_violation(table: &BudgetTable, r_max: i64) -> Option<(i64, i64)> {
        for s in 1..=r_max {
            for r in (2 * s - 1).max(0)..=r_max {
                let lhs = table.budget(r, s).ok()?;
                let rhs = (table.budget(r - 1, s).ok()? + table.budget(r - 1, s - 1).ok()?).half();
                if lhs != rhs {
                    return Some((r, s));
                }
            }
        }
        None
    }

    /// `B(c s - 1, s) >= 1 - 2^-(c-1)`.
    pub fn key_bound_violation(table: &BudgetTable, c_range: (u32, u32), s_max: u32) -> Option<(u32, u32)> {
        for c in c_range.0..=c_range.1 {
            let bound = Dyadic::one() - Dyadic::new(1, c - 1);
            for s in 1..=s_max {
                let b = table.budget((c * s) as i64 - 1, s as i64).ok()?;
                if b < bound {
                    return Some((c, s));
                }
            }
        }
        None
    }

    /// `binom(3s-1, s-1) * 3s / (s+2) <= 2^(3s-3)`.
    pub fn three_s_bound_violation(s_max: u32) -> Option<u32> {
        (1..=s_max).find(|&s| {
            let s = s as i64;
            let lhs = binom(3 * s - 1, s - 1) * BigInt::from(3 * s);
            let rhs = (BigInt::one() << (3 * s - 3) as usize) * BigInt::from(s + 2);
            lhs > rhs
        })
    }

    /// `sum_{i<s} binom(cs-1, i) + sum_{i<s-1} binom(cs-1, i) <= 2^(cs-c)`.
    pub fn tail_sum_bound_violation(c_range: (u32, u32), s_max: u32) -> Option<(u32, u32)> {
        for c in c_range.0..=c_range.1 {
            for s in 1..=s_max {
                let (ci, si) = (c as i64, s as i64);
                let n = ci * si - 1;
                let lhs: BigInt =
                    (0..si).map(|i| binom(n, i)).sum::<BigInt>() + (0..si - 1).map(|i| binom(n, i)).sum::<BigInt>();
                if lhs > BigInt::one() << (ci * si - ci) as usize {
                    return Some((c, s));
                }
            }
        }
        None
    }
}

pub fn rational_to_f64(value: &Rational) -> f64 {
    match (value.numer().to_f64(), value.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => round_rational(value, 17).parse().unwrap_or(f64::NAN),
    }
}

/// Exact rational as a decimal rounded to `places`, half away from zero.
pub fn round_rational(value: &Rational, places: usize) -> String {
    let scale = BigInt::from(10).pow(places as u32);
    let scaled = value * Rational::from_integer(scale.clone());
    let (q, r) = scaled.numer().div_rem(scaled.denom());
    let twice = r.abs() * 2;
    let mut q = q;
    if &twice >= scaled.denom() {
        q += if value.is_negative() { -1 } else { 1 };
    }
    let neg = q.is_negative();
    let digits = q.abs().to_string();
    let padded = format!("{digits:0>width$}", width = places + 1);
    let (i, f) = padded.split_at(padded.len() - places);
    let sign = if neg { "-" } else { "" };
    if places == 0 {
        format!("{sign}{i}")
    } else {
        format!("{sign}{i}.{f}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ratio;

    #[test]
    fn dyadic_canonical_form() {
        let d = Dyadic::new(6, 3);
        assert_eq!(d.numerator(), &BigInt::from(3));
        assert_eq!(d.exponent(), 2);
        assert_eq!(Dyadic::new(0, 9).exponent(), 0);
        assert_eq!(Dyadic::new(4, 0).exponent(), 0);
    }

    #[test]
    fn dyadic_arithmetic() {
        let a = Dyadic::new(3, 2);
        let b = Dyadic::new(1, 3);
        assert_eq!(&a + &b, Dyadic::new(7, 3));
        assert_eq!(&a - &b, Dyadic::new(5, 3));
        assert_eq!(a.half(), Dyadic::new(3, 3));
        assert!(b < a);
        assert_eq!(a.clone().min(b.clone()), b);
        assert_eq!(a.to_decimal(), "0.75");
        assert_eq!(Dyadic::new(-1, 4).to_decimal(), "-0.0625");
        assert_eq!(Dyadic::from_int(2).to_trace_string(), "2.0");
        assert_eq!(Dyadic::new(11, 3).to_trace_string(), "1.375");
        assert_eq!(Dyadic::zero().to_trace_string(), "0");
        assert_eq!(a.to_rational(), ratio(3, 4));
    }

    #[test]
    fn worked_example_values() {
        assert_eq!(budget(2, 1).unwrap(), Dyadic::new(3, 2));
        assert_eq!(budget(4, 2).unwrap(), Dyadic::new(5, 3));
        assert_eq!(weight(1, 1).unwrap(), Dyadic::new(1, 1));
        assert_eq!(weight(3, 2).unwrap(), Dyadic::new(3, 3));
        for r in 0..10 {
            assert_eq!(budget(r, 0).unwrap(), Dyadic::one());
            assert!(weight(r, 0).unwrap().is_zero());
            assert_eq!(coin_budget(r, 0).unwrap(), Dyadic::one());
        }
    }

    #[test]
    fn negative_arguments_hit_boundaries() {
        assert_eq!(budget(-5, -1).unwrap(), Dyadic::one());
        assert_eq!(budget(-1, 1).unwrap(), Dyadic::zero());
        assert_eq!(budget(0, 1).unwrap(), Dyadic::zero());
    }

    #[test]
    fn range_error_past_r_max() {
        let t = BudgetTable::new(8);
        assert!(t.budget(8, 3).is_ok());
        assert_eq!(t.budget(9, 3), Err(Error::BudgetRange { r: 9, r_max: 8 }));
    }

    #[test]
    fn closed_forms() {
        assert_eq!(budget_closed(3, 2), Dyadic::new(3, 3));
        for c in 0..20 {
            assert_eq!(budget_closed(c, 1), Dyadic::one() - Dyadic::new(1, c));
        }
        for s in 1..10 {
            assert!(budget_closed(2 * s - 2, s).is_zero());
        }
        assert_eq!(coin_budget(2, 1).unwrap(), Dyadic::new(3, 2));
        for s in 1..=10 {
            assert_eq!(coin_budget(2 * s as i64 - 1, s as i64).unwrap(), Dyadic::new(1, 1));
            assert_eq!(coin_budget_closed(2 * s - 1, s), Dyadic::new(1, 1));
        }
    }

    #[test]
    fn max_h_values() {
        assert_eq!(max_h_bound(2, 1, 2), ratio(3, 4));
        assert_eq!(max_h_bound(3, 2, 2), ratio(0, 1));
        assert_eq!(max_h_bound(3, 1, 3), ratio(19, 27));
        assert_eq!(max_h_finite(2, 1, 2, 2), ratio(5, 6));
        assert_eq!(max_h_finite(4, 1, 2, 2), ratio(1, 1));
        let gap = max_h_finite(2, 1, 2, 50) - ratio(3, 4);
        assert!(gap.abs() < ratio(1, 100));
    }

    #[test]
    fn k_group_weights() {
        let two = KGroupBudget::new(2).unwrap();
        assert_eq!(two.base(), 2.0);
        for r in 1..20 {
            assert_eq!(two.weight(r, 1).unwrap(), 0.5f64.powi(r as i32));
        }
        for k in 2..12u32 {
            let kb = KGroupBudget::new(k).unwrap();
            assert!(kb.base() > 1.0);
            assert_eq!(kb.weight(0, 1).unwrap(), 0.0);
            let bk = kb.budget(k as i64, 1).unwrap();
            let expected = 1.0 - 2f64.powf(-(k as f64) / (k as f64 - 1.0));
            assert!((bk - expected).abs() < 1e-12);
            assert!(bk > 0.5);
            for r in -2..30 {
                for s in 0..=1 {
                    let diff = kb.budget(r, s).unwrap() - kb.budget(r - 1, s).unwrap();
                    assert!((kb.weight(r, s).unwrap() - diff).abs() < kb.tolerance);
                }
            }
        }
        assert!(KGroupBudget::new(3).unwrap().weight(2, 2).is_err());
    }

    #[test]
    fn rounding() {
        assert_eq!(round_rational(&ratio(1, 16), 3), "0.063");
        assert_eq!(round_rational(&ratio(5, 16), 3), "0.313");
        assert_eq!(round_rational(&ratio(1, 2), 3), "0.500");
        assert_eq!(round_rational(&ratio(0, 1), 3), "0.000");
    }
}
