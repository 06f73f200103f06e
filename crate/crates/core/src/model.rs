//! Instances, bundles, valuations and allocations.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Exact utility values.
pub type Rational = BigRational;

/// Bundles are bit sets over good indices.
pub const MAX_GOODS: usize = 64;

/// Tabular valuations store one value per bundle.
pub const MAX_TABULAR_GOODS: usize = 16;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// A set of goods, stored as a bit vector over good indices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Bundle(u64);

impl Bundle {
    pub const EMPTY: Bundle = Bundle(0);

    pub fn from_bits(bits: u64) -> Self {
        Bundle(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    /// All goods `0..m`.
    pub fn full(m: usize) -> Self {
        debug_assert!(m <= MAX_GOODS);
        if m == MAX_GOODS {
            Bundle(u64::MAX)
        } else {
            Bundle((1u64 << m) - 1)
        }
    }

    pub fn singleton(good: usize) -> Self {
        Bundle(1u64 << good)
    }

    pub fn contains(self, good: usize) -> bool {
        good < MAX_GOODS && self.0 >> good & 1 == 1
    }

    pub fn insert(&mut self, good: usize) {
        self.0 |= 1u64 << good;
    }

    pub fn remove(&mut self, good: usize) {
        self.0 &= !(1u64 << good);
    }

    pub fn with(self, good: usize) -> Self {
        Bundle(self.0 | 1u64 << good)
    }

    pub fn without(self, good: usize) -> Self {
        Bundle(self.0 & !(1u64 << good))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Bundle) -> Self {
        Bundle(self.0 | other.0)
    }

    pub fn intersection(self, other: Bundle) -> Self {
        Bundle(self.0 & other.0)
    }

    pub fn difference(self, other: Bundle) -> Self {
        Bundle(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Bundle) -> bool {
        self.0 & !other.0 == 0
    }

    /// Good indices in increasing order.
    pub fn iter(self) -> BundleIter {
        BundleIter(self.0)
    }

    /// Every subset of `self` with exactly `size` goods.
    pub fn subsets_of_size(self, size: usize) -> Vec<Bundle> {
        fn rec(goods: &[usize], size: usize, acc: Bundle, out: &mut Vec<Bundle>) {
            if size == 0 {
                out.push(acc);
                return;
            }
            if goods.len() < size {
                return;
            }
            rec(&goods[1..], size - 1, acc.with(goods[0]), out);
            rec(&goods[1..], size, acc, out);
        }
        let goods: Vec<usize> = self.iter().collect();
        let mut out = Vec::new();
        rec(&goods, size, Bundle::EMPTY, &mut out);
        out
    }
}

impl FromIterator<usize> for Bundle {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        iter.into_iter().fold(Bundle::EMPTY, |b, g| b.with(g))
    }
}

impl fmt::Debug for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub struct BundleIter(u64);

impl Iterator for BundleIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let g = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(g)
    }
}

/// How one agent values bundles of goods.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Valuation {
    /// Utility 1 for each desired good, 0 otherwise.
    Binary { desired: Bundle },
    /// Sum of per-good values.
    Additive { values: Vec<Rational> },
    /// Arbitrary monotone set function, indexed by bundle bits.
    Tabular { table: Vec<Rational> },
}

impl Valuation {
    pub fn binary(desired: impl IntoIterator<Item = usize>) -> Self {
        Valuation::Binary {
            desired: desired.into_iter().collect(),
        }
    }

    pub fn additive(values: impl IntoIterator<Item = i64>) -> Self {
        Valuation::Additive {
            values: values.into_iter().map(int).collect(),
        }
    }

    pub fn value(&self, bundle: Bundle) -> Rational {
        match self {
            Valuation::Binary { desired } => int(desired.intersection(bundle).len() as i64),
            Valuation::Additive { values } => bundle.iter().fold(Rational::zero(), |acc, g| acc + &values[g]),
            Valuation::Tabular { table } => table[bundle.bits() as usize].clone(),
        }
    }

    pub fn good_value(&self, good: usize) -> Rational {
        match self {
            Valuation::Binary { desired } => int(desired.contains(good) as i64),
            Valuation::Additive { values } => values[good].clone(),
            Valuation::Tabular { table } => table[1usize << good].clone(),
        }
    }

    pub fn is_binary(&self) -> bool {
        matches!(self, Valuation::Binary { .. })
    }

    pub fn desired(&self) -> Option<Bundle> {
        match self {
            Valuation::Binary { desired } => Some(*desired),
            _ => None,
        }
    }

    /// The `c` goods with the highest single-good value, ties to the lowest index.
    pub fn best_goods(&self, c: usize, m: usize) -> Bundle {
        let mut goods: Vec<usize> = (0..m).collect();
        let values: Vec<Rational> = goods.iter().map(|&g| self.good_value(g)).collect();
        goods.sort_by(|&a, &b| values[b].cmp(&values[a]).then(a.cmp(&b)));
        goods.into_iter().take(c).collect()
    }

    /// The value of the agent's `c`-th best single good, counted with
    /// multiplicity; zero when there are fewer than `c` goods.
    pub fn nth_best_value(&self, c: usize, goods: Bundle) -> Rational {
        if c == 0 {
            return Rational::zero();
        }
        let mut values: Vec<Rational> = goods.iter().map(|g| self.good_value(g)).collect();
        values.sort_by(|a, b| b.cmp(a));
        values.get(c - 1).cloned().unwrap_or_else(Rational::zero)
    }

    /// Restrict to a subset of goods, renumbered in increasing order.
    pub fn restrict(&self, goods: &[usize]) -> Valuation {
        match self {
            Valuation::Binary { desired } => Valuation::Binary {
                desired: goods
                    .iter()
                    .enumerate()
                    .filter(|&(_, &g)| desired.contains(g))
                    .map(|(i, _)| i)
                    .collect(),
            },
            Valuation::Additive { values } => Valuation::Additive {
                values: goods.iter().map(|&g| values[g].clone()).collect(),
            },
            Valuation::Tabular { table } => {
                let size = 1usize << goods.len();
                let table = (0..size)
                    .map(|mask| {
                        let orig: Bundle = (0..goods.len())
                            .filter(|i| mask >> i & 1 == 1)
                            .map(|i| goods[i])
                            .collect();
                        table[orig.bits() as usize].clone()
                    })
                    .collect();
                Valuation::Tabular { table }
            }
        }
    }

    /// Binary view over the `c` best goods.
    pub fn binarize(&self, c: usize, m: usize) -> Valuation {
        Valuation::Binary {
            desired: self.best_goods(c, m),
        }
    }

    fn validate(&self, agent: &str, m: usize) -> Result<()> {
        match self {
            Valuation::Binary { desired } => {
                if !desired.is_subset(Bundle::full(m)) {
                    return Err(Error::DimensionMismatch {
                        agent: agent.to_string(),
                        expected: m,
                        found: desired.iter().last().map_or(0, |g| g + 1),
                    });
                }
            }
            Valuation::Additive { values } => {
                if values.len() != m {
                    return Err(Error::DimensionMismatch {
                        agent: agent.to_string(),
                        expected: m,
                        found: values.len(),
                    });
                }
                if let Some(v) = values.iter().find(|v| v.is_negative()) {
                    return Err(Error::InvalidValue {
                        agent: agent.to_string(),
                        detail: format!("{v} is negative"),
                    });
                }
            }
            Valuation::Tabular { table } => {
                if m > MAX_TABULAR_GOODS {
                    return Err(Error::TooManyGoods {
                        what: "tabular valuation",
                        m,
                        max: MAX_TABULAR_GOODS,
                    });
                }
                if table.len() != 1 << m {
                    return Err(Error::DimensionMismatch {
                        agent: agent.to_string(),
                        expected: 1 << m,
                        found: table.len(),
                    });
                }
                if let Some(v) = table.iter().find(|v| v.is_negative()) {
                    return Err(Error::InvalidValue {
                        agent: agent.to_string(),
                        detail: format!("{v} is negative"),
                    });
                }
                // Single-good removals suffice by transitivity.
                for mask in 1..table.len() {
                    let mut bits = mask;
                    while bits != 0 {
                        let low = bits & bits.wrapping_neg();
                        bits &= bits - 1;
                        let sub = mask & !low;
                        if table[sub] > table[mask] {
                            return Err(Error::NonMonotone {
                                agent: agent.to_string(),
                                subset: format!("{:?}", Bundle::from_bits(sub as u64)),
                                superset: format!("{:?}", Bundle::from_bits(mask as u64)),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Agent {
    pub id: String,
    pub group: usize,
    pub valuation: Valuation,
}

impl Agent {
    pub fn new(id: impl Into<String>, valuation: Valuation) -> Self {
        Agent {
            id: id.into(),
            group: 0,
            valuation,
        }
    }

    pub fn value(&self, bundle: Bundle) -> Rational {
        self.valuation.value(bundle)
    }
}

/// Goods plus `k >= 2` nonempty groups of agents. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    goods: Vec<String>,
    groups: Vec<Vec<Agent>>,
    order: Vec<usize>,
    group_labels: Vec<String>,
}

impl Instance {
    pub fn new(goods: Vec<String>, groups: Vec<Vec<Agent>>) -> Result<Self> {
        let m = goods.len();
        if m > MAX_GOODS {
            return Err(Error::TooManyGoods {
                what: "instance",
                m,
                max: MAX_GOODS,
            });
        }
        for (i, label) in goods.iter().enumerate() {
            if label.is_empty() || goods[..i].contains(label) {
                return Err(Error::BadGoodLabel(label.clone()));
            }
        }
        if groups.len() < 2 {
            return Err(Error::TooFewGroups(groups.len()));
        }
        let mut groups = groups;
        for (gi, group) in groups.iter_mut().enumerate() {
            if group.is_empty() {
                return Err(Error::EmptyGroup(gi + 1));
            }
            for agent in group.iter_mut() {
                agent.group = gi;
                agent.valuation.validate(&agent.id, m)?;
            }
        }
        let group_labels = (1..=groups.len()).map(|i| i.to_string()).collect();
        Ok(Instance {
            order: (0..m).collect(),
            goods,
            groups,
            group_labels,
        })
    }

    /// Convenience constructor with single-character good labels `a, b, ...`
    /// or the given labels.
    pub fn from_labels(labels: &str, groups: Vec<Vec<Agent>>) -> Result<Self> {
        Self::new(labels.chars().map(String::from).collect(), groups)
    }

    /// The order in which line protocols consume goods.
    pub fn with_order(mut self, order: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; self.m()];
        if order.len() != self.m() {
            return Err(Error::BadOrder);
        }
        for &g in &order {
            if g >= self.m() || seen[g] {
                return Err(Error::BadOrder);
            }
            seen[g] = true;
        }
        self.order = order;
        Ok(self)
    }

    pub fn with_order_labels(self, labels: &[&str]) -> Result<Self> {
        let order = labels
            .iter()
            .map(|l| self.good_index(l).ok_or_else(|| Error::UnknownGood(l.to_string())))
            .collect::<Result<Vec<_>>>()?;
        self.with_order(order)
    }

    pub fn with_group_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.k() {
            return Err(Error::Malformed(format!(
                "{} group labels for {} groups",
                labels.len(),
                self.k()
            )));
        }
        self.group_labels = labels;
        Ok(self)
    }

    pub fn m(&self) -> usize {
        self.goods.len()
    }

    pub fn k(&self) -> usize {
        self.groups.len()
    }

    pub fn goods(&self) -> &[String] {
        &self.goods
    }

    pub fn label(&self, good: usize) -> &str {
        &self.goods[good]
    }

    pub fn good_index(&self, label: &str) -> Option<usize> {
        self.goods.iter().position(|g| g == label)
    }

    pub fn all_goods(&self) -> Bundle {
        Bundle::full(self.m())
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn has_default_order(&self) -> bool {
        self.order.iter().enumerate().all(|(i, &g)| i == g)
    }

    pub fn groups(&self) -> &[Vec<Agent>] {
        &self.groups
    }

    pub fn group(&self, i: usize) -> &[Agent] {
        &self.groups[i]
    }

    pub fn group_sizes(&self) -> Vec<usize> {
        self.groups.iter().map(Vec::len).collect()
    }

    pub fn group_label(&self, i: usize) -> &str {
        &self.group_labels[i]
    }

    pub fn group_labels(&self) -> &[String] {
        &self.group_labels
    }

    pub fn has_default_group_labels(&self) -> bool {
        self.group_labels
            .iter()
            .enumerate()
            .all(|(i, l)| *l == (i + 1).to_string())
    }

    pub fn agents(&self) -> impl Iterator<Item = &Agent> {
        self.groups.iter().flatten()
    }

    pub fn is_binary(&self) -> bool {
        self.agents().all(|a| a.valuation.is_binary())
    }

    pub fn format_bundle(&self, bundle: Bundle) -> String {
        bundle
            .iter()
            .map(|g| self.goods[g].as_str())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Keep only `groups` and `goods`; goods are renumbered in increasing
    /// index order, the line order and group labels are carried over.
    /// Returns the sub-instance and the original index of each kept good.
    pub fn restrict(&self, groups: &[usize], goods: Bundle) -> Result<(Instance, Vec<usize>)> {
        let kept: Vec<usize> = goods.iter().collect();
        let sub_groups = groups
            .iter()
            .map(|&gi| {
                self.groups[gi]
                    .iter()
                    .map(|a| Agent::new(a.id.clone(), a.valuation.restrict(&kept)))
                    .collect()
            })
            .collect();
        let labels = kept.iter().map(|&g| self.goods[g].clone()).collect();
        let order = self
            .order
            .iter()
            .filter_map(|g| kept.iter().position(|k| k == g))
            .collect();
        let inst = Instance::new(labels, sub_groups)?
            .with_order(order)?
            .with_group_labels(groups.iter().map(|&g| self.group_labels[g].clone()).collect())?;
        Ok((inst, kept))
    }

    /// Replace every agent's valuation by the binary view over its `c` best goods.
    pub fn binarize(&self, c: usize) -> Instance {
        let mut out = self.clone();
        let m = self.m();
        for agent in out.groups.iter_mut().flatten() {
            agent.valuation = agent.valuation.binarize(c, m);
        }
        out
    }
}

/// A total assignment of goods to groups.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Allocation {
    assignment: Vec<usize>,
    k: usize,
}

impl Allocation {
    pub fn new(assignment: Vec<usize>, k: usize) -> Result<Self> {
        if let Some(&bad) = assignment.iter().find(|&&g| g >= k) {
            return Err(Error::BadAllocation(format!(
                "group index {bad} out of range for {k} groups"
            )));
        }
        Ok(Allocation { assignment, k })
    }

    pub fn from_bundles(bundles: &[Bundle], m: usize) -> Result<Self> {
        let mut assignment = vec![usize::MAX; m];
        for (i, b) in bundles.iter().enumerate() {
            for g in b.iter() {
                if g >= m {
                    return Err(Error::BadAllocation(format!("good {g} out of range")));
                }
                if assignment[g] != usize::MAX {
                    return Err(Error::BadAllocation(format!("good {g} assigned twice")));
                }
                assignment[g] = i;
            }
        }
        if let Some(g) = assignment.iter().position(|&a| a == usize::MAX) {
            return Err(Error::BadAllocation(format!("good {g} is unassigned")));
        }
        Ok(Allocation {
            assignment,
            k: bundles.len(),
        })
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.assignment.len()
    }

    pub fn group_of(&self, good: usize) -> usize {
        self.assignment[good]
    }

    pub fn bundle(&self, group: usize) -> Bundle {
        self.assignment
            .iter()
            .enumerate()
            .filter(|&(_, &a)| a == group)
            .map(|(g, _)| g)
            .collect()
    }

    pub fn bundles(&self) -> Vec<Bundle> {
        let mut out = vec![Bundle::EMPTY; self.k];
        for (g, &i) in self.assignment.iter().enumerate() {
            out[i].insert(g);
        }
        out
    }

    /// Checks the allocation covers exactly the instance's goods and groups.
    pub fn check_against(&self, instance: &Instance) -> Result<()> {
        if self.m() != instance.m() || self.k != instance.k() {
            return Err(Error::BadAllocation(format!(
                "allocation has {} goods/{} groups, instance has {}/{}",
                self.m(),
                self.k,
                instance.m(),
                instance.k()
            )));
        }
        Ok(())
    }
}

/// The bundle of every group; always a partition of the goods.
pub fn bundles_of(alloc: &Allocation) -> Vec<Bundle> {
    alloc.bundles()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary(id: &str, goods: &[usize]) -> Agent {
        Agent::new(id, Valuation::binary(goods.iter().copied()))
    }

    #[test]
    fn value_of_variants() {
        let v = Valuation::binary([1, 2]);
        assert_eq!(v.value(Bundle::from_iter([0, 1])), int(1));

        let a = Valuation::additive([2, 1, 1]);
        assert_eq!(a.value(Bundle::from_iter([1, 2])), int(2));

        let t = Valuation::Tabular {
            table: vec![int(0), int(1), int(1), int(1)],
        };
        assert_eq!(t.value(Bundle::EMPTY), int(0));
    }

    #[test]
    fn bundles_partition() {
        let alloc = Allocation::new(vec![0, 0, 1], 2).unwrap();
        assert_eq!(
            bundles_of(&alloc),
            vec![Bundle::from_iter([0, 1]), Bundle::from_iter([2])]
        );
        let alloc = Allocation::new(vec![0, 0, 0], 2).unwrap();
        assert_eq!(bundles_of(&alloc), vec![Bundle::full(3), Bundle::EMPTY]);
    }

    #[test]
    fn rejects_single_group() {
        let err = Instance::from_labels("a", vec![vec![binary("x", &[0])]]).unwrap_err();
        assert_eq!(err, Error::TooFewGroups(1));
    }

    #[test]
    fn rejects_empty_group() {
        let err = Instance::from_labels("a", vec![vec![binary("x", &[0])], vec![]]).unwrap_err();
        assert_eq!(err, Error::EmptyGroup(2));
    }

    #[test]
    fn rejects_non_monotone_table() {
        let t = Valuation::Tabular {
            table: vec![int(0), int(2), int(0), int(1)],
        };
        let err = Instance::from_labels("ab", vec![vec![Agent::new("t", t)], vec![binary("y", &[0])]]).unwrap_err();
        assert!(matches!(err, Error::NonMonotone { ref agent, .. } if agent == "t"));
    }

    #[test]
    fn subsets_of_size_counts() {
        let b = Bundle::full(6);
        assert_eq!(b.subsets_of_size(0), vec![Bundle::EMPTY]);
        assert_eq!(b.subsets_of_size(2).len(), 15);
        assert_eq!(b.subsets_of_size(6), vec![b]);
        assert!(b.subsets_of_size(7).is_empty());
        let odd = Bundle::from_iter([1, 4, 5]);
        let subs = odd.subsets_of_size(2);
        assert_eq!(subs.len(), 3);
        assert!(subs.iter().all(|s| s.is_subset(odd) && s.len() == 2));
    }

    #[test]
    fn restrict_renumbers_goods() {
        let inst = Instance::from_labels("abcd", vec![vec![binary("x", &[1, 3])], vec![binary("y", &[0, 2])]])
            .unwrap()
            .with_order(vec![3, 2, 1, 0])
            .unwrap();
        let (sub, kept) = inst.restrict(&[1, 0], Bundle::from_iter([1, 2, 3])).unwrap();
        assert_eq!(kept, vec![1, 2, 3]);
        assert_eq!(sub.goods(), &["b", "c", "d"]);
        assert_eq!(sub.order(), &[2, 1, 0]);
        assert_eq!(sub.group_label(0), "2");
        assert_eq!(sub.group(1)[0].valuation.desired(), Some(Bundle::from_iter([0, 2])));
    }

    #[test]
    fn best_goods_tie_lowest_index() {
        let v = Valuation::additive([1, 3, 3, 2]);
        assert_eq!(v.best_goods(2, 4), Bundle::from_iter([1, 2]));
        assert_eq!(v.best_goods(3, 4), Bundle::from_iter([1, 2, 3]));
        assert_eq!(v.nth_best_value(4, Bundle::full(4)), int(1));
        assert_eq!(v.nth_best_value(5, Bundle::full(4)), int(0));
    }
}
