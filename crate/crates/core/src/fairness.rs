//! Per-agent fairness predicates and democratic reports.
//!
//! Every predicate looks at one agent, the bundle of the agent's own group and
//! the bundles of the other groups. A [`Judge`] precomputes the
//! allocation-independent part of each agent's criterion (maximin shares,
//! c-th best values) so that evaluating many allocations stays cheap.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::model::{int, Allocation, Bundle, Instance, Rational, Valuation};

/// Largest good count for exhaustive maximin-share enumeration.
pub const MMS_GOODS_CAP: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Criterion {
    /// Envy-free up to `c` goods.
    EnvyFree(usize),
    /// Proportional except `c` goods.
    Proportional(usize),
    /// Maximin share with as many parts as groups.
    Mms,
    /// Maximin share with `c` parts.
    OneOutOf(usize),
    /// At least a fraction `q` of the maximin share.
    FractionMms(Rational),
    /// At least the value of the agent's `c`-th best good.
    OneOfBest(usize),
    /// Positive utility whenever the maximin share is positive.
    PositiveMms,
}

const CRITERION_NAMES: &str = "ef-C, prop-C, mms, 1-out-of-C-mms, 1-of-best-C, positive-mms, fraction-mms:P/Q";

impl Criterion {
    /// Name used in trace headers.
    pub fn long_name(&self) -> String {
        match self {
            Criterion::EnvyFree(c) => format!("envy-free-except-{c}"),
            Criterion::Proportional(c) => format!("proportionality-except-{c}"),
            Criterion::Mms => "maximin-share".to_string(),
            Criterion::OneOutOf(c) => format!("1-out-of-{c}-maximin-share"),
            Criterion::FractionMms(q) => format!("{q}-fraction-maximin-share"),
            Criterion::OneOfBest(c) => format!("one-of-best-{c}"),
            Criterion::PositiveMms => "positive-maximin-share".to_string(),
        }
    }

    /// Checks the parameter ranges.
    pub fn validate(&self) -> Result<()> {
        let bad = |reason: String| {
            Err(Error::UnsupportedCriterion {
                criterion: self.to_string(),
                reason,
            })
        };
        match self {
            Criterion::OneOutOf(0) | Criterion::OneOfBest(0) => bad("c must be positive".to_string()),
            Criterion::FractionMms(q) if !q.is_positive() || *q >= Rational::one() => {
                bad("q must lie strictly between 0 and 1".to_string())
            }
            _ => Ok(()),
        }
    }

    /// Number of maximin-share parts this criterion compares against, if any.
    fn mms_parts(&self, k: usize) -> Option<usize> {
        match self {
            Criterion::Mms | Criterion::FractionMms(_) | Criterion::PositiveMms => Some(k),
            Criterion::OneOutOf(c) => Some(*c),
            _ => None,
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Criterion::EnvyFree(c) => write!(f, "ef-{c}"),
            Criterion::Proportional(c) => write!(f, "prop-{c}"),
            Criterion::Mms => write!(f, "mms"),
            Criterion::OneOutOf(c) => write!(f, "1-out-of-{c}-mms"),
            Criterion::FractionMms(q) => write!(f, "fraction-mms:{q}"),
            Criterion::OneOfBest(c) => write!(f, "1-of-best-{c}"),
            Criterion::PositiveMms => write!(f, "positive-mms"),
        }
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let name = s.trim().to_ascii_lowercase();
        let unknown = || Error::UnknownCriterion {
            name: s.to_string(),
            expected: CRITERION_NAMES.to_string(),
        };
        let count = |t: &str| t.parse::<usize>().map_err(|_| unknown());
        if name == "mms" {
            return Ok(Criterion::Mms);
        }
        if name == "positive-mms" {
            return Ok(Criterion::PositiveMms);
        }
        if let Some(c) = name.strip_prefix("ef-") {
            return Ok(Criterion::EnvyFree(count(c)?));
        }
        if let Some(c) = name.strip_prefix("prop-") {
            return Ok(Criterion::Proportional(count(c)?));
        }
        if let Some(c) = name.strip_prefix("1-of-best-") {
            return Ok(Criterion::OneOfBest(count(c)?));
        }
        if let Some(c) = name.strip_prefix("1-out-of-").and_then(|t| t.strip_suffix("-mms")) {
            return Ok(Criterion::OneOutOf(count(c)?));
        }
        if let Some(q) = name.strip_prefix("fraction-mms:") {
            let q = crate::format::parse_rational(q).map_err(|_| unknown())?;
            return Ok(Criterion::FractionMms(q));
        }
        Err(unknown())
    }
}

/// Parses a comma-separated list of criterion names.
pub fn parse_criteria(list: &str) -> Result<Vec<Criterion>> {
    list.split(',').map(str::parse).collect()
}

/// Sum of `v` over `goods` after dropping the `c` most valuable ones; for
/// tabular valuations the best removal set is searched exhaustively.
fn value_without_best(v: &Valuation, goods: Bundle, c: usize) -> Rational {
    let c = c.min(goods.len());
    match v {
        Valuation::Tabular { .. } => goods
            .subsets_of_size(c)
            .into_iter()
            .map(|removed| v.value(goods.difference(removed)))
            .min()
            .unwrap_or_else(Rational::zero),
        _ => {
            let mut values: Vec<Rational> = goods.iter().map(|g| v.good_value(g)).collect();
            values.sort_by(|a, b| b.cmp(a));
            values.into_iter().skip(c).sum()
        }
    }
}

/// EFc: for every other bundle there is a removal set of at most `c` goods
/// after which the agent does not envy it.
pub fn is_efc(v: &Valuation, bundles: &[Bundle], own: usize, c: usize) -> bool {
    let mine = v.value(bundles[own]);
    bundles
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != own)
        .all(|(_, &other)| mine >= value_without_best(v, other, c))
}

/// PROPc: `k u(own) >= u(G \ C)` for some set `C` of at most `c` goods held by
/// other groups.
pub fn is_propc(v: &Valuation, bundles: &[Bundle], own: usize, c: usize) -> bool {
    let all = bundles.iter().fold(Bundle::EMPTY, |acc, &b| acc.union(b));
    propc_holds(v, bundles[own], all, bundles.len(), c)
}

/// PROPc of bundle `own` against the goods `all` shared among `k` groups.
pub fn propc_holds(v: &Valuation, own: Bundle, all: Bundle, k: usize, c: usize) -> bool {
    let k = k as i64;
    let mine = v.value(own);
    let rest = all.difference(own);
    let best = match v {
        Valuation::Tabular { .. } => rest
            .subsets_of_size(c.min(rest.len()))
            .into_iter()
            .map(|removed| v.value(all.difference(removed)))
            .min()
            .unwrap_or_else(Rational::zero),
        _ => mine.clone() + value_without_best(v, rest, c),
    };
    mine * int(k) >= best
}

/// Values scaled to integers by their common denominator.
fn scale_to_integers(values: &[Rational]) -> Option<(Vec<i128>, BigInt)> {
    let den = values.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let scaled = values
        .iter()
        .map(|v| (v.numer() * (&den / v.denom())).to_i128())
        .collect::<Option<Vec<_>>>()?;
    Some((scaled, den))
}

/// Best worst-part value over partitions of `goods` into at most `parts`
/// parts. Parts are opened in order of their lowest good so every partition is
/// visited once.
fn max_min_partition<T, F>(goods: &[usize], parts: usize, value: &F) -> T
where
    T: Ord + Clone,
    F: Fn(Bundle) -> T,
{
    struct Search<'a, T, F> {
        goods: &'a [usize],
        parts: usize,
        value: &'a F,
        best: Option<T>,
    }

    impl<T: Ord + Clone, F: Fn(Bundle) -> T> Search<'_, T, F> {
        fn run(&mut self, next: usize, open: &mut Vec<Bundle>) {
            let remaining: Bundle = self.goods[next..].iter().copied().collect();
            if let Some(best) = &self.best {
                let empty_slots = open.len() < self.parts;
                let upper = open
                    .iter()
                    .map(|&p| (self.value)(p.union(remaining)))
                    .chain(empty_slots.then(|| (self.value)(remaining)))
                    .min();
                if upper.is_some_and(|u| u <= *best) {
                    return;
                }
            }
            if next == self.goods.len() {
                let worst = if open.len() < self.parts {
                    (self.value)(Bundle::EMPTY)
                } else {
                    open.iter().map(|&p| (self.value)(p)).min().expect("parts >= 1")
                };
                if self.best.as_ref().is_none_or(|b| worst > *b) {
                    self.best = Some(worst);
                }
                return;
            }
            let g = self.goods[next];
            for i in 0..open.len() {
                open[i].insert(g);
                self.run(next + 1, open);
                open[i].remove(g);
            }
            if open.len() < self.parts {
                open.push(Bundle::singleton(g));
                self.run(next + 1, open);
                open.pop();
            }
        }
    }

    let mut search = Search {
        goods,
        parts,
        value,
        best: None,
    };
    search.run(0, &mut Vec::with_capacity(parts));
    search.best.expect("at least one partition")
}

/// The 1-out-of-`parts` maximin share of `goods`.
pub fn mms_share(v: &Valuation, parts: usize, goods: Bundle) -> Result<Rational> {
    if parts == 0 {
        return Err(Error::Precondition("maximin share needs at least one part".into()));
    }
    if let Valuation::Binary { desired } = v {
        return Ok(int((desired.intersection(goods).len() / parts) as i64));
    }
    if parts == 1 {
        return Ok(v.value(goods));
    }
    if goods.len() > MMS_GOODS_CAP {
        return Err(Error::TooManyGoods {
            what: "maximin share enumeration",
            m: goods.len(),
            max: MMS_GOODS_CAP,
        });
    }
    let mut order: Vec<usize> = goods.iter().collect();
    order.sort_by(|&a, &b| v.good_value(b).cmp(&v.good_value(a)).then(a.cmp(&b)));
    match v {
        Valuation::Additive { values } => {
            if let Some((scaled, den)) = scale_to_integers(values) {
                let sum = |b: Bundle| b.iter().map(|g| scaled[g]).sum::<i128>();
                let best = max_min_partition(&order, parts, &sum);
                return Ok(Rational::new(BigInt::from(best), den));
            }
            Ok(max_min_partition(&order, parts, &|b| v.value(b)))
        }
        Valuation::Tabular { table } => {
            if let Some((scaled, den)) = scale_to_integers(table) {
                let lookup = |b: Bundle| scaled[b.bits() as usize];
                let best = max_min_partition(&order, parts, &lookup);
                return Ok(Rational::new(BigInt::from(best), den));
            }
            Ok(max_min_partition(&order, parts, &|b| v.value(b)))
        }
        Valuation::Binary { .. } => unreachable!(),
    }
}

/// The number `s` of desired goods a binary agent with `r` desired goods
/// needs for the criterion to hold, clamped at zero.
pub fn s_threshold(criterion: &Criterion, r: usize, k: usize) -> Result<i64> {
    let r = r as i64;
    let unsupported = |reason: &str| Error::UnsupportedCriterion {
        criterion: criterion.to_string(),
        reason: reason.to_string(),
    };
    let s = match criterion {
        Criterion::EnvyFree(c) | Criterion::Proportional(c) => {
            if k != 2 {
                return Err(unsupported("binary thresholds are only known for two groups"));
            }
            Integer::div_floor(&(r - *c as i64 + 1), &2)
        }
        Criterion::Mms => r / k as i64,
        Criterion::OneOutOf(c) => r / (*c).max(1) as i64,
        Criterion::OneOfBest(c) => i64::from(r >= *c as i64),
        Criterion::PositiveMms => i64::from(r >= k as i64),
        Criterion::FractionMms(_) => {
            return Err(unsupported("no binary threshold is defined"));
        }
    };
    Ok(s.max(0))
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Threshold {
    /// Decided by comparing bundles at evaluation time.
    Relative,
    AtLeast(Rational),
    Positive {
        required: bool,
    },
}

/// Per-agent criteria with their allocation-independent data precomputed.
#[derive(Clone, Debug)]
pub struct Judge {
    criteria: Vec<Criterion>,
    thresholds: Vec<Vec<Threshold>>,
}

impl Judge {
    /// `criteria` has one entry per group, or a single entry shared by all.
    pub fn new(instance: &Instance, criteria: &[Criterion]) -> Result<Self> {
        let k = instance.k();
        let criteria: Vec<Criterion> = match criteria.len() {
            1 => vec![criteria[0].clone(); k],
            n if n == k => criteria.to_vec(),
            n => return Err(Error::Malformed(format!("expected 1 or {k} criteria, got {n}"))),
        };
        for c in &criteria {
            c.validate()?;
        }
        let all = instance.all_goods();
        let thresholds = instance
            .groups()
            .iter()
            .zip(&criteria)
            .map(|(agents, criterion)| {
                agents
                    .iter()
                    .map(|a| threshold(&a.valuation, criterion, k, all))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Judge { criteria, thresholds })
    }

    pub fn criteria(&self) -> &[Criterion] {
        &self.criteria
    }

    pub fn criterion(&self, group: usize) -> &Criterion {
        &self.criteria[group]
    }

    pub fn is_happy(&self, instance: &Instance, group: usize, agent: usize, bundles: &[Bundle]) -> bool {
        verdict(
            &instance.group(group)[agent].valuation,
            &self.criteria[group],
            &self.thresholds[group][agent],
            bundles,
            group,
        )
    }

    pub fn happy_count(&self, instance: &Instance, group: usize, bundles: &[Bundle]) -> usize {
        (0..instance.group(group).len())
            .filter(|&j| self.is_happy(instance, group, j, bundles))
            .count()
    }

    pub fn report(&self, instance: &Instance, alloc: &Allocation) -> FairnessReport {
        let bundles = alloc.bundles();
        let verdicts = (0..instance.k())
            .map(|i| {
                (0..instance.group(i).len())
                    .map(|j| self.is_happy(instance, i, j, &bundles))
                    .collect()
            })
            .collect();
        FairnessReport::from_verdicts(verdicts)
    }
}

fn threshold(v: &Valuation, criterion: &Criterion, k: usize, all: Bundle) -> Result<Threshold> {
    Ok(match criterion {
        Criterion::EnvyFree(_) | Criterion::Proportional(_) => Threshold::Relative,
        Criterion::OneOfBest(c) => Threshold::AtLeast(v.nth_best_value(*c, all)),
        Criterion::PositiveMms => Threshold::Positive {
            required: mms_share(v, k, all)?.is_positive(),
        },
        Criterion::FractionMms(q) => Threshold::AtLeast(q * mms_share(v, k, all)?),
        Criterion::Mms | Criterion::OneOutOf(_) => {
            let parts = criterion.mms_parts(k).expect("mms criterion");
            Threshold::AtLeast(mms_share(v, parts, all)?)
        }
    })
}

fn verdict(v: &Valuation, criterion: &Criterion, t: &Threshold, bundles: &[Bundle], group: usize) -> bool {
    match t {
        Threshold::AtLeast(t) => v.value(bundles[group]) >= *t,
        Threshold::Positive { required } => !required || v.value(bundles[group]).is_positive(),
        Threshold::Relative => match criterion {
            Criterion::EnvyFree(c) => is_efc(v, bundles, group, *c),
            Criterion::Proportional(c) => is_propc(v, bundles, group, *c),
            _ => unreachable!("only relative criteria lack a threshold"),
        },
    }
}

/// Whether one agent finds the allocation fair.
pub fn check(
    instance: &Instance,
    alloc: &Allocation,
    group: usize,
    agent: usize,
    criterion: &Criterion,
) -> Result<bool> {
    criterion.validate()?;
    let v = &instance.group(group)[agent].valuation;
    let t = threshold(v, criterion, instance.k(), instance.all_goods())?;
    Ok(verdict(v, criterion, &t, &alloc.bundles(), group))
}

/// Verdicts for every agent and the resulting democratic fraction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FairnessReport {
    pub verdicts: Vec<Vec<bool>>,
    pub happy: Vec<usize>,
    pub sizes: Vec<usize>,
}

impl FairnessReport {
    pub fn from_verdicts(verdicts: Vec<Vec<bool>>) -> Self {
        let happy = verdicts.iter().map(|g| g.iter().filter(|&&b| b).count()).collect();
        let sizes = verdicts.iter().map(Vec::len).collect();
        FairnessReport { verdicts, happy, sizes }
    }

    pub fn fraction(&self, group: usize) -> Rational {
        Rational::new(BigInt::from(self.happy[group]), BigInt::from(self.sizes[group]))
    }

    /// Smallest happy fraction over the groups.
    pub fn h(&self) -> Rational {
        (0..self.happy.len())
            .map(|i| self.fraction(i))
            .min()
            .unwrap_or_else(Rational::one)
    }
}

pub fn democratic_report(instance: &Instance, alloc: &Allocation, criterion: &Criterion) -> Result<FairnessReport> {
    democratic_report_per_group(instance, alloc, std::slice::from_ref(criterion))
}

pub fn democratic_report_per_group(
    instance: &Instance,
    alloc: &Allocation,
    criteria: &[Criterion],
) -> Result<FairnessReport> {
    alloc.check_against(instance)?;
    Ok(Judge::new(instance, criteria)?.report(instance, alloc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ratio, Agent};

    fn additive(values: &[i64]) -> Valuation {
        Valuation::additive(values.iter().copied())
    }

    /// Example agent: own bundle worth 30, one bundle of four 20-goods, one
    /// bundle with a single 10-good.
    fn example() -> (Valuation, Vec<Bundle>) {
        let v = additive(&[30, 20, 20, 20, 20, 10]);
        let bundles = vec![
            Bundle::singleton(0),
            [1, 2, 3, 4].into_iter().collect(),
            Bundle::singleton(5),
        ];
        (v, bundles)
    }

    #[test]
    fn example_efc_and_propc() {
        let (v, bundles) = example();
        assert!(!is_efc(&v, &bundles, 0, 1));
        assert!(!is_efc(&v, &bundles, 0, 2));
        assert!(is_propc(&v, &bundles, 0, 2));
        assert!(!is_propc(&v, &bundles, 0, 1));
        let moved = vec![
            [0, 1].into_iter().collect(),
            [2, 3, 4].into_iter().collect(),
            Bundle::singleton(5),
        ];
        assert!(is_efc(&v, &moved, 0, 1));
        assert!(is_propc(&v, &moved, 0, 0));
    }

    #[test]
    fn owning_everything_is_fair() {
        let v = additive(&[1, 2, 3]);
        let bundles = vec![Bundle::full(3), Bundle::EMPTY];
        assert!(is_efc(&v, &bundles, 0, 0));
        assert!(is_propc(&v, &bundles, 0, 0));
    }

    #[test]
    fn mms_values() {
        let v = additive(&[2, 1, 1]);
        assert_eq!(mms_share(&v, 2, Bundle::full(3)).unwrap(), int(2));
        assert_eq!(mms_share(&v, 1, Bundle::full(3)).unwrap(), int(4));
        assert_eq!(mms_share(&v, 4, Bundle::full(3)).unwrap(), int(0));
        let b = Valuation::binary(0..7);
        assert_eq!(mms_share(&b, 3, Bundle::full(9)).unwrap(), int(2));
        let halves = Valuation::Additive {
            values: vec![ratio(1, 2), ratio(1, 3), ratio(1, 6), ratio(1, 1)],
        };
        assert_eq!(mms_share(&halves, 2, Bundle::full(4)).unwrap(), int(1));
        assert!(mms_share(&additive(&[1; 13]), 2, Bundle::full(13)).is_err());
    }

    #[test]
    fn tabular_predicates_match_additive() {
        let values = [3, 1, 4, 1];
        let v = additive(&values);
        let table: Vec<Rational> = (0..16u64).map(|b| v.value(Bundle::from_bits(b))).collect();
        let t = Valuation::Tabular { table };
        for mask in 0..16u64 {
            let own = Bundle::from_bits(mask);
            let bundles = vec![own, Bundle::full(4).difference(own)];
            for c in 0..3 {
                assert_eq!(is_efc(&v, &bundles, 0, c), is_efc(&t, &bundles, 0, c));
                assert_eq!(is_propc(&v, &bundles, 0, c), is_propc(&t, &bundles, 0, c));
            }
        }
        for parts in 1..5 {
            assert_eq!(
                mms_share(&v, parts, Bundle::full(4)).unwrap(),
                mms_share(&t, parts, Bundle::full(4)).unwrap()
            );
        }
    }

    #[test]
    fn thresholds() {
        assert_eq!(s_threshold(&Criterion::EnvyFree(1), 7, 2).unwrap(), 3);
        assert_eq!(s_threshold(&Criterion::Proportional(1), 7, 2).unwrap(), 3);
        assert_eq!(s_threshold(&Criterion::EnvyFree(3), 1, 2).unwrap(), 0);
        assert_eq!(s_threshold(&Criterion::OneOfBest(5), 4, 2).unwrap(), 0);
        assert_eq!(s_threshold(&Criterion::OneOutOf(3), 9, 2).unwrap(), 3);
        assert_eq!(s_threshold(&Criterion::Mms, 7, 2).unwrap(), 3);
        assert_eq!(s_threshold(&Criterion::PositiveMms, 1, 2).unwrap(), 0);
        assert_eq!(s_threshold(&Criterion::PositiveMms, 2, 2).unwrap(), 1);
        assert!(s_threshold(&Criterion::EnvyFree(1), 4, 3).is_err());
        assert!(s_threshold(&Criterion::FractionMms(ratio(1, 2)), 4, 2).is_err());
    }

    #[test]
    fn criterion_names_round_trip() {
        for name in [
            "ef-1",
            "prop-2",
            "mms",
            "1-out-of-3-mms",
            "1-of-best-2",
            "positive-mms",
            "fraction-mms:1/2",
        ] {
            let c: Criterion = name.parse().unwrap();
            assert_eq!(c.to_string(), name);
        }
        assert_eq!(
            "fraction-mms:0.5".parse::<Criterion>().unwrap(),
            Criterion::FractionMms(ratio(1, 2))
        );
        assert!(matches!(
            "envy".parse::<Criterion>(),
            Err(Error::UnknownCriterion { .. })
        ));
        assert_eq!(Criterion::OneOutOf(2).long_name(), "1-out-of-2-maximin-share");
        assert_eq!(Criterion::OneOfBest(2).long_name(), "one-of-best-2");
    }

    #[test]
    fn fraction_mms_is_inclusive() {
        let groups = vec![
            vec![Agent::new("a", additive(&[2, 1, 1]))],
            vec![Agent::new("b", additive(&[1, 1, 1]))],
        ];
        let inst = Instance::from_labels("xyz", groups).unwrap();
        let alloc = Allocation::new(vec![0, 1, 1], 2).unwrap();
        let c = Criterion::FractionMms(ratio(1, 2));
        assert!(check(&inst, &alloc, 0, 0, &c).unwrap());
        let strict = Criterion::FractionMms(ratio(51, 100));
        assert!(check(&inst, &alloc, 0, 0, &strict).unwrap());
        assert!(check(&inst, &alloc, 0, 0, &Criterion::Mms).unwrap());
    }

    #[test]
    fn report_counts() {
        let groups = vec![
            vec![
                Agent::new("a", Valuation::binary([0])),
                Agent::new("b", Valuation::binary([1])),
            ],
            vec![Agent::new("c", Valuation::binary([1]))],
        ];
        let inst = Instance::from_labels("xy", groups).unwrap();
        let alloc = Allocation::new(vec![0, 0], 2).unwrap();
        let r = democratic_report(&inst, &alloc, &Criterion::OneOfBest(0)).unwrap_err();
        assert!(matches!(r, Error::UnsupportedCriterion { .. }));
        let r = democratic_report(&inst, &alloc, &Criterion::PositiveMms).unwrap();
        assert_eq!(r.happy, vec![2, 1]);
        let r = democratic_report(&inst, &alloc, &Criterion::EnvyFree(0)).unwrap();
        assert_eq!(r.happy, vec![2, 0]);
        assert_eq!(r.h(), int(0));
        assert!(check(&inst, &alloc, 1, 0, &Criterion::EnvyFree(1)).unwrap());
    }
}
