//! Instances and allocations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{sum_over, Scalar};

/// Whether every item is a good (all valuations `>= 0`) or a chore (all `<= 0`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Goods,
    Chores,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Goods => "goods",
            Kind::Chores => "chores",
        }
    }

    fn default_item_prefix(self) -> &'static str {
        match self {
            Kind::Goods => "g",
            Kind::Chores => "c",
        }
    }
}

impl std::str::FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "goods" => Ok(Kind::Goods),
            "chores" => Ok(Kind::Chores),
            other => Err(Error::InvalidArgument(format!("unknown kind {other:?}"))),
        }
    }
}

/// A fair division instance: `n` agents, `m` items and an exact valuation matrix.
///
/// Immutable once built; every constructor validates the goods/chores sign
/// dichotomy and the matrix shape.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Instance<S> {
    kind: Kind,
    m: usize,
    valuations: Vec<Vec<S>>,
    agent_names: Vec<String>,
    item_names: Vec<String>,
}

impl<S: Scalar> Instance<S> {
    /// Builds an instance of the declared kind.
    pub fn new(kind: Kind, valuations: Vec<Vec<S>>) -> Result<Self> {
        let m = check_shape(&valuations)?;
        if let Some(inferred) = infer_kind(&valuations)? {
            if inferred != kind {
                let (row, col) = first_sign_violation(&valuations, kind)
                    .expect("inferred kind differs, so a violating entry exists");
                return Err(Error::KindMismatch {
                    declared: kind,
                    row,
                    col,
                });
            }
        }
        let n = valuations.len();
        Ok(Instance {
            kind,
            m,
            agent_names: (1..=n).map(|i| format!("a{i}")).collect(),
            item_names: (1..=m)
                .map(|r| format!("{}{r}", kind.default_item_prefix()))
                .collect(),
            valuations,
        })
    }

    /// Builds an instance, inferring the kind from the sign pattern.
    ///
    /// An all-zero matrix is treated as goods.
    pub fn from_rows(valuations: Vec<Vec<S>>) -> Result<Self> {
        check_shape(&valuations)?;
        let kind = infer_kind(&valuations)?.unwrap_or(Kind::Goods);
        Self::new(kind, valuations)
    }

    pub fn with_names(mut self, agents: Vec<String>, items: Vec<String>) -> Result<Self> {
        if agents.len() != self.n() {
            return Err(Error::NameCount {
                what: "agent",
                expected: self.n(),
                found: agents.len(),
            });
        }
        if items.len() != self.m {
            return Err(Error::NameCount {
                what: "item",
                expected: self.m,
                found: items.len(),
            });
        }
        self.agent_names = agents;
        self.item_names = items;
        Ok(self)
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.valuations.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn value(&self, agent: usize, item: usize) -> &S {
        &self.valuations[agent][item]
    }

    pub fn row(&self, agent: usize) -> &[S] {
        &self.valuations[agent]
    }

    pub fn rows(&self) -> &[Vec<S>] {
        &self.valuations
    }

    pub fn agent_names(&self) -> &[String] {
        &self.agent_names
    }

    pub fn item_names(&self) -> &[String] {
        &self.item_names
    }

    pub fn agent_index(&self, name: &str) -> Option<usize> {
        self.agent_names.iter().position(|a| a == name)
    }

    pub fn item_index(&self, name: &str) -> Option<usize> {
        self.item_names.iter().position(|r| r == name)
    }

    /// `v_agent(items)` under additivity.
    pub fn bundle_value(&self, agent: usize, items: &[usize]) -> S {
        sum_over(&self.valuations[agent], items)
    }

    /// Each agent's value for its own bundle.
    pub fn utilities(&self, alloc: &Allocation) -> Vec<S> {
        (0..self.n())
            .map(|i| self.bundle_value(i, alloc.bundle(i)))
            .collect()
    }

    /// The sub-instance on the given agents and items, in the given order.
    pub fn restrict(&self, agents: &[usize], items: &[usize]) -> Instance<S> {
        Instance {
            kind: self.kind,
            m: items.len(),
            valuations: agents
                .iter()
                .map(|&i| items.iter().map(|&r| self.valuations[i][r].clone()).collect())
                .collect(),
            agent_names: agents.iter().map(|&i| self.agent_names[i].clone()).collect(),
            item_names: items.iter().map(|&r| self.item_names[r].clone()).collect(),
        }
    }

    /// Same agents, items and kind with a replaced valuation matrix.
    pub(crate) fn with_valuations(&self, valuations: Vec<Vec<S>>) -> Result<Instance<S>> {
        let fresh = Instance::new(self.kind, valuations)?;
        fresh.with_names(self.agent_names.clone(), self.item_names.clone())
    }
}

fn check_shape<S>(valuations: &[Vec<S>]) -> Result<usize> {
    let first = valuations.first().ok_or(Error::EmptyAgents)?;
    let m = first.len();
    for (row, values) in valuations.iter().enumerate() {
        if values.len() != m {
            return Err(Error::RaggedRows {
                row,
                expected: m,
                found: values.len(),
            });
        }
    }
    Ok(m)
}

fn infer_kind<S: Scalar>(valuations: &[Vec<S>]) -> Result<Option<Kind>> {
    let mut positive = None;
    let mut negative = None;
    for (i, row) in valuations.iter().enumerate() {
        for (r, v) in row.iter().enumerate() {
            if v.is_positive() && positive.is_none() {
                positive = Some((i, r));
            }
            if v.is_negative() && negative.is_none() {
                negative = Some((i, r));
            }
        }
    }
    match (positive, negative) {
        (Some((pos_row, pos_col)), Some((neg_row, neg_col))) => Err(Error::MixedSigns {
            pos_row,
            pos_col,
            neg_row,
            neg_col,
        }),
        (Some(_), None) => Ok(Some(Kind::Goods)),
        (None, Some(_)) => Ok(Some(Kind::Chores)),
        (None, None) => Ok(None),
    }
}

fn first_sign_violation<S: Scalar>(valuations: &[Vec<S>], kind: Kind) -> Option<(usize, usize)> {
    valuations.iter().enumerate().find_map(|(i, row)| {
        row.iter()
            .position(|v| match kind {
                Kind::Goods => v.is_negative(),
                Kind::Chores => v.is_positive(),
            })
            .map(|r| (i, r))
    })
}

/// A complete allocation: `n` pairwise disjoint bundles covering items `0..m`.
///
/// Bundles are kept sorted so equal allocations compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Allocation {
    m: usize,
    bundles: Vec<Vec<usize>>,
}

impl Allocation {
    pub fn from_bundles(mut bundles: Vec<Vec<usize>>, m: usize) -> Result<Self> {
        if bundles.is_empty() {
            return Err(Error::MalformedAllocation("no bundles".into()));
        }
        let mut seen = vec![false; m];
        for (i, bundle) in bundles.iter_mut().enumerate() {
            bundle.sort_unstable();
            for &r in bundle.iter() {
                if r >= m {
                    return Err(Error::MalformedAllocation(format!(
                        "bundle {i} holds item {r} but there are only {m} items"
                    )));
                }
                if std::mem::replace(&mut seen[r], true) {
                    return Err(Error::MalformedAllocation(format!(
                        "item {r} appears in more than one bundle"
                    )));
                }
            }
        }
        if let Some(r) = seen.iter().position(|s| !s) {
            return Err(Error::MalformedAllocation(format!("item {r} is unallocated")));
        }
        Ok(Allocation { m, bundles })
    }

    /// Builds the allocation that gives item `r` to agent `owners[r]`.
    pub fn from_owners(n: usize, owners: &[usize]) -> Result<Self> {
        if n == 0 {
            return Err(Error::MalformedAllocation("no agents".into()));
        }
        let mut bundles = vec![Vec::new(); n];
        for (r, &i) in owners.iter().enumerate() {
            if i >= n {
                return Err(Error::MalformedAllocation(format!(
                    "item {r} assigned to agent {i} but there are only {n} agents"
                )));
            }
            bundles[i].push(r);
        }
        Ok(Allocation {
            m: owners.len(),
            bundles,
        })
    }

    pub fn n(&self) -> usize {
        self.bundles.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn bundle(&self, agent: usize) -> &[usize] {
        &self.bundles[agent]
    }

    pub fn bundles(&self) -> &[Vec<usize>] {
        &self.bundles
    }

    pub fn owners(&self) -> Vec<usize> {
        let mut owners = vec![0; self.m];
        for (i, bundle) in self.bundles.iter().enumerate() {
            for &r in bundle {
                owners[r] = i;
            }
        }
        owners
    }

    pub fn check_against<S: Scalar>(&self, inst: &Instance<S>) -> Result<()> {
        if self.n() != inst.n() || self.m != inst.m() {
            return Err(Error::MalformedAllocation(format!(
                "allocation covers {} agents and {} items, instance has {} and {}",
                self.n(),
                self.m,
                inst.n(),
                inst.m()
            )));
        }
        Ok(())
    }
}

/// An allocation in progress: some items may still be unassigned.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialAllocation {
    n: usize,
    owners: Vec<Option<usize>>,
}

impl PartialAllocation {
    pub fn empty(n: usize, m: usize) -> Self {
        PartialAllocation {
            n,
            owners: vec![None; m],
        }
    }

    pub fn assign(&mut self, item: usize, agent: usize) -> Result<()> {
        if agent >= self.n || item >= self.owners.len() {
            return Err(Error::MalformedAllocation(format!(
                "cannot assign item {item} to agent {agent}"
            )));
        }
        match self.owners[item] {
            Some(prev) => Err(Error::MalformedAllocation(format!(
                "item {item} already assigned to agent {prev}"
            ))),
            None => {
                self.owners[item] = Some(agent);
                Ok(())
            }
        }
    }

    pub fn owner(&self, item: usize) -> Option<usize> {
        self.owners[item]
    }

    pub fn unassigned(&self) -> impl Iterator<Item = usize> + '_ {
        self.owners
            .iter()
            .enumerate()
            .filter(|(_, o)| o.is_none())
            .map(|(r, _)| r)
    }

    pub fn into_allocation(self) -> Result<Allocation> {
        let owners = self
            .owners
            .iter()
            .enumerate()
            .map(|(r, o)| o.ok_or_else(|| Error::MalformedAllocation(format!("item {r} is unallocated"))))
            .collect::<Result<Vec<_>>>()?;
        Allocation::from_owners(self.n, &owners)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infers_kind_from_signs() {
        let inst = Instance::from_rows(vec![vec![-1i64, -2], vec![-2, -1]]).unwrap();
        assert_eq!(inst.kind(), Kind::Chores);
        assert_eq!((inst.n(), inst.m()), (2, 2));
        assert_eq!(inst.item_names(), ["c1", "c2"]);
    }

    #[test]
    fn rejects_mixed_signs_and_ragged_rows() {
        assert!(matches!(
            Instance::from_rows(vec![vec![1i64, -1]]),
            Err(Error::MixedSigns { .. })
        ));
        assert!(matches!(
            Instance::from_rows(vec![vec![1i64, 2], vec![1]]),
            Err(Error::RaggedRows { row: 1, .. })
        ));
        assert_eq!(Instance::<i64>::from_rows(vec![]), Err(Error::EmptyAgents));
        assert!(matches!(
            Instance::new(Kind::Goods, vec![vec![-1i64]]),
            Err(Error::KindMismatch { .. })
        ));
    }

    #[test]
    fn allocation_validation() {
        assert!(Allocation::from_bundles(vec![vec![0], vec![0, 1]], 2).is_err());
        assert!(Allocation::from_bundles(vec![vec![0], vec![]], 2).is_err());
        let a = Allocation::from_bundles(vec![vec![1, 0], vec![]], 2).unwrap();
        assert_eq!(a.bundle(0), [0, 1]);
        assert_eq!(a, Allocation::from_owners(2, &[0, 0]).unwrap());
    }

    #[test]
    fn partial_allocation_completes() {
        let mut p = PartialAllocation::empty(2, 3);
        p.assign(0, 1).unwrap();
        p.assign(2, 0).unwrap();
        assert!(p.assign(0, 0).is_err());
        assert_eq!(p.unassigned().collect::<Vec<_>>(), [1]);
        assert!(p.clone().into_allocation().is_err());
        p.assign(1, 1).unwrap();
        assert_eq!(
            p.into_allocation().unwrap().bundles(),
            [vec![2], vec![0, 1]]
        );
    }
}
