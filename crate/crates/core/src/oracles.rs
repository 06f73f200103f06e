//! Exhaustive solvers and adversarial instance generators.
//!
//! Allocations are enumerated as base-`k` counters over the goods, good 0
//! being the most significant digit, so "first found" means lexicographically
//! smallest assignment vector. Work is split into a fixed number of prefix
//! shards, which keeps results independent of the number of worker threads.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::budgets;
use crate::error::{Error, Result};
use crate::fairness::{Criterion, Judge};
use crate::model::{Agent, Allocation, Bundle, Instance, Rational, Valuation};
use crate::random::good_labels;

pub const DEFAULT_CAP: u128 = 1 << 24;
/// Largest number of members a generator may put in one group.
pub const MEMBER_CAP: u128 = 100_000;
const MIN_SHARDS: u128 = 256;

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub best_h: Rational,
    pub witness: Allocation,
    pub allocations_examined: u128,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExistsResult {
    pub exists: bool,
    pub witness: Option<Allocation>,
}

/// Happy fraction `num / den` compared exactly without allocation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Frac {
    num: u64,
    den: u64,
}

/// Best fraction found so far and the assignment reaching it.
type Best = (Frac, Vec<usize>);

impl Ord for Frac {
    fn cmp(&self, other: &Self) -> Ordering {
        (u128::from(self.num) * u128::from(other.den)).cmp(&(u128::from(other.num) * u128::from(self.den)))
    }
}

impl PartialOrd for Frac {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Frac {
    fn to_rational(self) -> Rational {
        Rational::new(BigInt::from(self.num), BigInt::from(self.den))
    }
}

struct Space<'a> {
    instance: &'a Instance,
    judge: Judge,
    k: usize,
    m: usize,
    prefix: usize,
}

impl<'a> Space<'a> {
    fn new(instance: &'a Instance, criteria: &[Criterion], cap: u128) -> Result<Self> {
        let (k, m) = (instance.k(), instance.m());
        let size = (k as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
        if size > cap {
            return Err(Error::CapExceeded { size, cap });
        }
        let judge = Judge::new(instance, criteria)?;
        let mut prefix = 0;
        while prefix < m && (k as u128).pow(prefix as u32) < MIN_SHARDS {
            prefix += 1;
        }
        Ok(Space {
            instance,
            judge,
            k,
            m,
            prefix,
        })
    }

    fn shards(&self) -> usize {
        self.k.pow(self.prefix as u32)
    }

    /// Digits of shard `index` followed by zeros for the free suffix.
    fn first_of_shard(&self, index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.m];
        let mut rest = index;
        for d in (0..self.prefix).rev() {
            digits[d] = rest % self.k;
            rest /= self.k;
        }
        digits
    }

    /// Advances the suffix counter; false once the shard is exhausted.
    fn advance(&self, digits: &mut [usize]) -> bool {
        for d in (self.prefix..self.m).rev() {
            digits[d] += 1;
            if digits[d] < self.k {
                return true;
            }
            digits[d] = 0;
        }
        false
    }

    fn bundles(&self, digits: &[usize]) -> Vec<Bundle> {
        let mut bundles = vec![Bundle::EMPTY; self.k];
        for (g, &owner) in digits.iter().enumerate() {
            bundles[owner].insert(g);
        }
        bundles
    }

    fn fraction(&self, group: usize, bundles: &[Bundle]) -> Frac {
        Frac {
            num: self.judge.happy_count(self.instance, group, bundles) as u64,
            den: self.instance.group(group).len() as u64,
        }
    }

    /// Minimum happy fraction if every group beats `floor`, else `None`.
    fn h_above(&self, bundles: &[Bundle], floor: Option<Frac>) -> Option<Frac> {
        let mut h: Option<Frac> = None;
        for g in 0..self.k {
            let f = self.fraction(g, bundles);
            if floor.is_some_and(|fl| f <= fl) {
                return None;
            }
            h = Some(h.map_or(f, |x| x.min(f)));
        }
        h
    }

    fn meets(&self, bundles: &[Bundle], h: &Rational) -> bool {
        (0..self.k).all(|g| self.fraction(g, bundles).to_rational() >= *h)
    }

    fn allocation(&self, digits: Vec<usize>) -> Result<Allocation> {
        Allocation::new(digits, self.k)
    }
}

/// Best democratic fraction over all allocations, with the lexicographically
/// smallest maximizer.
pub fn max_h(instance: &Instance, criteria: &[Criterion]) -> Result<OracleResult> {
    max_h_with_cap(instance, criteria, DEFAULT_CAP)
}

pub fn max_h_with_cap(instance: &Instance, criteria: &[Criterion], cap: u128) -> Result<OracleResult> {
    let space = Space::new(instance, criteria, cap)?;
    let full = Frac { num: 1, den: 1 };
    let per_shard: Vec<(Option<Best>, u128)> = (0..space.shards())
        .into_par_iter()
        .map(|shard| {
            let mut digits = space.first_of_shard(shard);
            let mut best: Option<Best> = None;
            let mut examined = 0u128;
            loop {
                examined += 1;
                let bundles = space.bundles(&digits);
                if let Some(h) = space.h_above(&bundles, best.as_ref().map(|b| b.0)) {
                    best = Some((h, digits.clone()));
                    if h >= full {
                        break;
                    }
                }
                if !space.advance(&mut digits) {
                    break;
                }
            }
            (best, examined)
        })
        .collect();

    let examined = per_shard.iter().map(|s| s.1).sum();
    // Shards are in lexicographic order, so the first strict maximum wins ties.
    let mut best: Option<Best> = None;
    for (candidate, _) in per_shard.into_iter() {
        if let Some((h, digits)) = candidate {
            if best.as_ref().is_none_or(|b| h > b.0) {
                best = Some((h, digits));
            }
        }
    }
    let (h, digits) = best.expect("at least one allocation");
    Ok(OracleResult {
        best_h: h.to_rational(),
        witness: space.allocation(digits)?,
        allocations_examined: examined,
    })
}

/// Whether some allocation gives every group a happy fraction of at least
/// `h`; the witness is the lexicographically smallest such allocation.
pub fn exists_h(instance: &Instance, criteria: &[Criterion], h: &Rational) -> Result<ExistsResult> {
    exists_h_with_cap(instance, criteria, h, DEFAULT_CAP)
}

pub fn exists_h_with_cap(instance: &Instance, criteria: &[Criterion], h: &Rational, cap: u128) -> Result<ExistsResult> {
    let space = Space::new(instance, criteria, cap)?;
    let found = (0..space.shards()).into_par_iter().find_map_first(|shard| {
        let mut digits = space.first_of_shard(shard);
        loop {
            if space.meets(&space.bundles(&digits), h) {
                return Some(digits);
            }
            if !space.advance(&mut digits) {
                return None;
            }
        }
    });
    Ok(ExistsResult {
        exists: found.is_some(),
        witness: found.map(|d| space.allocation(d)).transpose()?,
    })
}

/// Adversarial instance families.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    /// Three goods; every group has three members, each wanting all goods but one.
    ThreeGoodCycle { k: usize },
    /// `k m` goods; every group has one member per `r`-subset.
    AllSubsets { r: usize, s: usize, k: usize, m: usize },
    /// `2k - 1` goods on a circle; every group has one member per window of
    /// `k` consecutive goods.
    Circle { k: usize },
    /// Two groups of three additive agents valuing `(2,1,1)` and its rotations.
    AdditiveThird,
    /// All-subsets instance with `r = 2l` goods wanted, judged by EFc.
    EfcLimit { c: usize, l: usize },
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::ThreeGoodCycle { k } => write!(f, "three-good-cycle:k={k}"),
            GeneratorSpec::AllSubsets { r, s, k, m } => write!(f, "all-subsets:r={r},s={s},k={k},m={m}"),
            GeneratorSpec::Circle { k } => write!(f, "circle:k={k}"),
            GeneratorSpec::AdditiveThird => write!(f, "additive-third"),
            GeneratorSpec::EfcLimit { c, l } => write!(f, "efc-limit:c={c},l={l}"),
        }
    }
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    /// Parses `name:key=value,...`, e.g. `all-subsets:r=2,s=1,k=2,m=3`.
    fn from_str(text: &str) -> Result<Self> {
        let (name, params) = text.split_once(':').unwrap_or((text, ""));
        let mut values = std::collections::BTreeMap::new();
        for item in params.split(',').filter(|p| !p.trim().is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::BadGenerator(format!("expected key=value, got {item:?}")))?;
            let value: usize = value
                .trim()
                .parse()
                .map_err(|_| Error::BadGenerator(format!("{key} must be a non-negative integer")))?;
            values.insert(key.trim().to_string(), value);
        }
        let mut take = |key: &str| {
            values
                .remove(key)
                .ok_or_else(|| Error::BadGenerator(format!("{name} needs parameter {key}")))
        };
        let spec = match name.trim() {
            "three-good-cycle" => GeneratorSpec::ThreeGoodCycle { k: take("k")? },
            "all-subsets" => GeneratorSpec::AllSubsets {
                r: take("r")?,
                s: take("s")?,
                k: take("k")?,
                m: take("m")?,
            },
            "circle" => GeneratorSpec::Circle { k: take("k")? },
            "additive-third" => GeneratorSpec::AdditiveThird,
            "efc-limit" => GeneratorSpec::EfcLimit {
                c: take("c")?,
                l: take("l")?,
            },
            other => {
                return Err(Error::BadGenerator(format!(
                    "unknown generator {other:?}; expected one of three-good-cycle, all-subsets, circle, additive-third, efc-limit"
                )))
            }
        };
        if let Some(key) = values.keys().next() {
            return Err(Error::BadGenerator(format!("unexpected parameter {key}")));
        }
        Ok(spec)
    }
}

fn copies(k: usize, members: &[Valuation]) -> Vec<Vec<Agent>> {
    (0..k)
        .map(|g| {
            members
                .iter()
                .enumerate()
                .map(|(j, v)| Agent::new(format!("{}.{}", g + 1, j + 1), v.clone()))
                .collect()
        })
        .collect()
}

fn all_subsets(r: usize, k: usize, m: usize) -> Result<Instance> {
    let goods = k * m;
    if goods > 64 {
        return Err(Error::TooManyGoods {
            what: "generated instance",
            m: goods,
            max: 64,
        });
    }
    let count = budgets::binom(goods as i64, r as i64);
    if count > BigInt::from(MEMBER_CAP) {
        return Err(Error::CapExceeded {
            size: u128::try_from(count).unwrap_or(u128::MAX),
            cap: MEMBER_CAP,
        });
    }
    let members: Vec<Valuation> = Bundle::full(goods)
        .subsets_of_size(r)
        .into_iter()
        .map(|b| Valuation::Binary { desired: b })
        .collect();
    Instance::new(good_labels(goods), copies(k, &members))
}

fn check(ok: bool, reason: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::BadGenerator(reason()))
    }
}

pub fn generate(spec: &GeneratorSpec) -> Result<Instance> {
    match *spec {
        GeneratorSpec::ThreeGoodCycle { k } => {
            check(k >= 2, || "three-good-cycle needs k >= 2".into())?;
            let members: Vec<Valuation> = (0..3)
                .map(|skip| Valuation::binary((0..3).filter(|&g| g != skip)))
                .collect();
            Instance::new(good_labels(3), copies(k, &members))
        }
        GeneratorSpec::AllSubsets { r, s, k, m } => {
            check(k >= 2, || "all-subsets needs k >= 2".into())?;
            check(m >= 1, || "all-subsets needs m >= 1".into())?;
            check(1 <= s && s <= r && r <= k * m, || {
                "all-subsets needs 1 <= s <= r <= k m".into()
            })?;
            all_subsets(r, k, m)
        }
        GeneratorSpec::Circle { k } => {
            check(k >= 2, || "circle needs k >= 2".into())?;
            let n = 2 * k - 1;
            let members: Vec<Valuation> = (0..n)
                .map(|start| Valuation::binary((0..k).map(|i| (start + i) % n)))
                .collect();
            Instance::new(good_labels(n), copies(k, &members))
        }
        GeneratorSpec::AdditiveThird => {
            let members: Vec<Valuation> = (0..3)
                .map(|top| Valuation::additive((0..3).map(|g| if g == top { 2 } else { 1 })))
                .collect();
            Instance::new(good_labels(3), copies(2, &members))
        }
        GeneratorSpec::EfcLimit { c, l } => {
            check(c >= 1 && l >= 1, || "efc-limit needs c >= 1 and l >= 1".into())?;
            check(2 * l >= c, || "efc-limit needs 2l >= c".into())?;
            all_subsets(2 * l, 2, 2 * l)
        }
    }
}

/// The criterion a family was built to defeat.
pub fn natural_criterion(spec: &GeneratorSpec) -> Result<Criterion> {
    match *spec {
        GeneratorSpec::ThreeGoodCycle { .. } | GeneratorSpec::Circle { .. } => Ok(Criterion::PositiveMms),
        GeneratorSpec::AdditiveThird => Ok(Criterion::FractionMms(crate::model::ratio(51, 100))),
        GeneratorSpec::EfcLimit { c, .. } => Ok(Criterion::EnvyFree(c)),
        GeneratorSpec::AllSubsets { r, s, k, .. } => {
            if s == 1 {
                return Ok(Criterion::OneOfBest(r));
            }
            if r / k == s {
                return Ok(Criterion::Mms);
            }
            (1..=r)
                .find(|&c| r / c == s)
                .map(Criterion::OneOutOf)
                .ok_or_else(|| Error::BadGenerator(format!("no criterion needs {s} of {r} goods")))
        }
    }
}

/// The finite-instance bound each family is claimed to respect.
pub fn claimed_bound(spec: &GeneratorSpec) -> Rational {
    match *spec {
        GeneratorSpec::ThreeGoodCycle { .. } => crate::model::ratio(2, 3),
        GeneratorSpec::AdditiveThird => crate::model::ratio(1, 3),
        GeneratorSpec::Circle { k } => crate::model::ratio(k as i64, 2 * k as i64 - 1),
        GeneratorSpec::AllSubsets { r, s, k, m } => budgets::max_h_finite(r as u32, s as u32, k as u32, m as u32),
        GeneratorSpec::EfcLimit { c, l } => {
            budgets::max_h_finite((2 * l) as u32, (l - c / 2) as u32, 2, (2 * l) as u32)
        }
    }
}

/// Whether no allocation of the generated instance beats `bound`.
pub fn verify_negative(spec: &GeneratorSpec, criterion: &Criterion, bound: &Rational) -> Result<bool> {
    let instance = generate(spec)?;
    Ok(max_h(&instance, std::slice::from_ref(criterion))?.best_h <= *bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ratio;

    #[test]
    fn three_good_cycle_is_two_thirds() {
        let spec = GeneratorSpec::ThreeGoodCycle { k: 2 };
        let inst = generate(&spec).unwrap();
        let res = max_h(&inst, &[Criterion::PositiveMms]).unwrap();
        assert_eq!(res.best_h, ratio(2, 3));
        assert_eq!(res.allocations_examined, 8);
        assert_eq!(res.witness.assignment(), &[0, 0, 1]);
        let none = exists_h(&inst, &[Criterion::PositiveMms], &ratio(1, 1)).unwrap();
        assert!(!none.exists);
    }

    #[test]
    fn zero_h_is_met_by_the_first_allocation() {
        let inst = generate(&GeneratorSpec::Circle { k: 2 }).unwrap();
        let res = exists_h(&inst, &[Criterion::PositiveMms], &ratio(0, 1)).unwrap();
        assert_eq!(res.witness.unwrap().assignment(), &[0, 0, 0]);
    }

    #[test]
    fn generator_sizes() {
        let inst = generate(&GeneratorSpec::AllSubsets { r: 2, s: 1, k: 2, m: 3 }).unwrap();
        assert_eq!((inst.m(), inst.group_sizes()), (6, vec![15, 15]));
        let inst = generate(&GeneratorSpec::Circle { k: 2 }).unwrap();
        assert_eq!((inst.m(), inst.group_sizes()), (3, vec![3, 3]));
    }

    #[test]
    fn cap_is_enforced() {
        let inst = generate(&GeneratorSpec::Circle { k: 3 }).unwrap();
        let err = max_h_with_cap(&inst, &[Criterion::PositiveMms], 100).unwrap_err();
        assert!(err.is_cap());
    }

    #[test]
    fn spec_strings_round_trip() {
        for text in [
            "three-good-cycle:k=2",
            "all-subsets:r=4,s=2,k=2,m=4",
            "circle:k=3",
            "additive-third",
            "efc-limit:c=1,l=2",
        ] {
            let spec: GeneratorSpec = text.parse().unwrap();
            assert_eq!(spec.to_string(), text);
        }
        assert!("circle".parse::<GeneratorSpec>().is_err());
        assert!("circle:k=2,x=1".parse::<GeneratorSpec>().is_err());
    }

    #[test]
    fn natural_criteria_need_s_goods() {
        use crate::fairness::s_threshold;
        for (r, s, k, m) in [(2, 1, 2, 2), (2, 1, 2, 3), (3, 1, 2, 3), (4, 2, 2, 4), (6, 2, 2, 3)] {
            let spec = GeneratorSpec::AllSubsets { r, s, k, m };
            let c = natural_criterion(&spec).unwrap();
            assert_eq!(s_threshold(&c, r, k).unwrap(), s as i64, "{c}");
        }
    }
}
