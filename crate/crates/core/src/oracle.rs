//! Brute-force ground truth for small instances.
//!
//! Nothing here samples: when `n^m` exceeds the budget the call fails with
//! [`Error::BudgetExceeded`].

use crate::error::{Error, Result};
use crate::fairness::{is_ef1, FairnessReport, Property, Witness};
use crate::instance::{Allocation, Instance};
use crate::mms::MaximinPartition;
use crate::scalar::Scalar;

/// Upper bound on the number of assignment functions an oracle call may visit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationBudget {
    max_assignments: u64,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget {
            max_assignments: 1 << 22,
        }
    }
}

impl EnumerationBudget {
    pub fn new(max_assignments: u64) -> Result<Self> {
        if max_assignments == 0 {
            return Err(Error::InvalidArgument("enumeration budget must be positive".into()));
        }
        Ok(EnumerationBudget { max_assignments })
    }

    pub fn max_assignments(self) -> u64 {
        self.max_assignments
    }

    /// Fails unless `n^m` assignments fit in the budget.
    pub fn check(self, n: usize, m: usize) -> Result<()> {
        let exceeded = Error::BudgetExceeded {
            n,
            m,
            budget: self.max_assignments,
        };
        let mut total: u64 = 1;
        for _ in 0..m {
            total = total.checked_mul(n as u64).ok_or(exceeded.clone())?;
            if total > self.max_assignments {
                return Err(exceeded);
            }
        }
        Ok(())
    }

    pub fn fits(self, n: usize, m: usize) -> bool {
        self.check(n, m).is_ok()
    }
}

/// Every map from `m` items to `n` agents, in lexicographic order of the
/// owner vector (last item varies fastest).
pub struct Assignments {
    n: usize,
    owners: Vec<usize>,
    started: bool,
    done: bool,
}

impl Assignments {
    fn new(n: usize, m: usize) -> Self {
        Assignments {
            n,
            owners: vec![0; m],
            started: false,
            done: n == 0,
        }
    }

    /// Advances to the next owner vector; returns the items whose owner changed.
    fn advance(&mut self) -> Option<std::ops::Range<usize>> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(0..self.owners.len());
        }
        for r in (0..self.owners.len()).rev() {
            if self.owners[r] + 1 < self.n {
                self.owners[r] += 1;
                for later in &mut self.owners[r + 1..] {
                    *later = 0;
                }
                return Some(r..self.owners.len());
            }
        }
        self.done = true;
        None
    }

    pub fn owners(&self) -> &[usize] {
        &self.owners
    }
}

impl Iterator for Assignments {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        self.advance().map(|_| self.owners.clone())
    }
}

/// Owner vectors of all `n^m` assignments.
pub fn enumerate_assignments(n: usize, m: usize, budget: EnumerationBudget) -> Result<Assignments> {
    budget.check(n, m)?;
    Ok(Assignments::new(n, m))
}

/// All `n^m` allocations, each exactly once, in lexicographic owner order.
pub fn enumerate_allocations(
    n: usize,
    m: usize,
    budget: EnumerationBudget,
) -> Result<impl Iterator<Item = Allocation>> {
    if n == 0 {
        return Err(Error::EmptyAgents);
    }
    let assignments = enumerate_assignments(n, m, budget)?;
    Ok(assignments.map(move |owners| {
        Allocation::from_owners(n, &owners).expect("owners lie in 0..n")
    }))
}

struct MmsSearch<'a, S> {
    values: &'a [S],
    n: usize,
    labels: Vec<usize>,
    sums: Vec<S>,
    best: Option<(S, Vec<usize>)>,
}

impl<S: Scalar> MmsSearch<'_, S> {
    // Bundles are unlabeled: item r may join any opened bundle or open the next one.
    fn go(&mut self, r: usize, opened: usize) {
        if r == self.values.len() {
            let min = self.sums.iter().min().expect("n >= 1").clone();
            if self.best.as_ref().is_none_or(|(b, _)| min > *b) {
                self.best = Some((min, self.labels.clone()));
            }
            return;
        }
        let limit = (opened + 1).min(self.n);
        for b in 0..limit {
            self.labels[r] = b;
            self.sums[b] = self.sums[b].clone() + self.values[r].clone();
            self.go(r + 1, opened.max(b + 1));
            self.sums[b] = self.sums[b].clone() - self.values[r].clone();
        }
    }
}

/// Exact maximin share of one utility row over `n` bundles, with a witness partition.
pub fn exact_mms<S: Scalar>(
    values: &[S],
    n: usize,
    budget: EnumerationBudget,
) -> Result<(S, MaximinPartition<S>)> {
    if n == 0 {
        return Err(Error::InvalidArgument("maximin share needs at least one bundle".into()));
    }
    budget.check(n, values.len())?;
    let mut search = MmsSearch {
        values,
        n,
        labels: vec![0; values.len()],
        sums: vec![S::zero(); n],
        best: None,
    };
    search.go(0, 0);
    let (value, labels) = search.best.expect("at least one partition");
    let mut bundles = vec![Vec::new(); n];
    for (r, &b) in labels.iter().enumerate() {
        bundles[b].push(r);
    }
    let partition = MaximinPartition::new(values, bundles);
    debug_assert_eq!(partition.min_value(), &value);
    Ok((value, partition))
}

/// Pareto optimality by exhaustive search; the witness is the first
/// dominating allocation in enumeration order.
pub fn is_po_bruteforce<S: Scalar>(
    inst: &Instance<S>,
    alloc: &Allocation,
    budget: EnumerationBudget,
) -> Result<FairnessReport<S>> {
    alloc.check_against(inst)?;
    let (n, m) = (inst.n(), inst.m());
    let base = inst.utilities(alloc);
    let mut assignments = enumerate_assignments(n, m, budget)?;
    let mut utils = vec![S::zero(); n];
    let mut prev: Vec<usize> = vec![0; m];
    let mut first = true;
    while let Some(changed) = assignments.advance() {
        let owners = assignments.owners();
        if first {
            for (r, &i) in owners.iter().enumerate() {
                utils[i] = utils[i].clone() + inst.value(i, r).clone();
            }
            first = false;
        } else {
            for r in changed {
                let (old, new) = (prev[r], owners[r]);
                if old != new {
                    utils[old] = utils[old].clone() - inst.value(old, r).clone();
                    utils[new] = utils[new].clone() + inst.value(new, r).clone();
                }
            }
        }
        prev.copy_from_slice(owners);
        let weakly = utils.iter().zip(&base).all(|(u, b)| u >= b);
        if weakly && utils.iter().zip(&base).any(|(u, b)| u > b) {
            let by = Allocation::from_owners(n, owners)?;
            return Ok(FairnessReport::fail(Property::Po, Witness::Dominated { by }));
        }
    }
    Ok(FairnessReport::pass(Property::Po))
}

/// The first allocation in enumeration order that is both EF1 and PO.
pub fn exists_ef1_po<S: Scalar>(inst: &Instance<S>, budget: EnumerationBudget) -> Result<Option<Allocation>> {
    for alloc in enumerate_allocations(inst.n(), inst.m(), budget)? {
        if is_ef1(inst, &alloc)?.holds && is_po_bruteforce(inst, &alloc, budget)?.holds {
            return Ok(Some(alloc));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Kind;

    fn budget() -> EnumerationBudget {
        EnumerationBudget::default()
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_allocations(2, 2, budget()).unwrap().count(), 4);
        let empty: Vec<Allocation> = enumerate_allocations(3, 0, budget()).unwrap().collect();
        assert_eq!(empty.len(), 1);
        assert!(empty[0].bundles().iter().all(Vec::is_empty));
        assert_eq!(enumerate_allocations(2, 10, budget()).unwrap().count(), 1024);
    }

    #[test]
    fn enumeration_order_and_uniqueness() {
        let owners: Vec<Vec<usize>> = enumerate_assignments(3, 3, budget()).unwrap().collect();
        assert_eq!(owners.len(), 27);
        assert!(owners.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(owners[1], [0, 0, 1]);
    }

    #[test]
    fn budget_is_enforced() {
        let tight = EnumerationBudget::new(1000).unwrap();
        assert_eq!(
            enumerate_allocations(2, 10, tight).err(),
            Some(Error::BudgetExceeded {
                n: 2,
                m: 10,
                budget: 1000
            })
        );
        assert!(EnumerationBudget::new(0).is_err());
        assert!(exact_mms(&[1i64; 30], 4, budget()).is_err());
    }

    #[test]
    fn exact_mms_examples() {
        let (v, part) = exact_mms(&[3i64, 3, 2, 2, 2], 2, budget()).unwrap();
        assert_eq!(v, 6);
        let mut bundles = part.bundles().to_vec();
        bundles.sort();
        assert_eq!(bundles, [vec![0, 1], vec![2, 3, 4]]);

        assert_eq!(exact_mms(&[12i64, 6, 6, 3, 3, 3, 3, 1, 1], 4, budget()).unwrap().0, 8);
        assert_eq!(exact_mms(&[-1i64, -1, -1], 2, budget()).unwrap().0, -2);
        assert_eq!(exact_mms(&[4i64, 5], 1, budget()).unwrap().0, 9);
        assert_eq!(exact_mms(&[4i64, 5], 3, budget()).unwrap().0, 0);
        assert_eq!(exact_mms(&[-4i64, -5], 3, budget()).unwrap().0, -5);
        assert_eq!(exact_mms::<i64>(&[], 2, budget()).unwrap().0, 0);
    }

    #[test]
    fn po_examples() {
        let single = Instance::new(Kind::Goods, vec![vec![1i64, 2]]).unwrap();
        let all = Allocation::from_bundles(vec![vec![0, 1]], 2).unwrap();
        assert!(is_po_bruteforce(&single, &all, budget()).unwrap().holds);

        let inst = Instance::new(Kind::Goods, vec![vec![2i64, 1], vec![1, 2]]).unwrap();
        let swapped = Allocation::from_bundles(vec![vec![1], vec![0]], 2).unwrap();
        let report = is_po_bruteforce(&inst, &swapped, budget()).unwrap();
        assert!(!report.holds);
        let best = Allocation::from_bundles(vec![vec![0], vec![1]], 2).unwrap();
        assert_eq!(report.witness, Some(Witness::Dominated { by: best.clone() }));
        assert!(is_po_bruteforce(&inst, &best, budget()).unwrap().holds);
    }

    #[test]
    fn ef1_po_search() {
        let goods = Instance::new(Kind::Goods, vec![vec![1i64, 1], vec![1, 1]]).unwrap();
        assert_eq!(
            exists_ef1_po(&goods, budget()).unwrap(),
            Some(Allocation::from_bundles(vec![vec![0], vec![1]], 2).unwrap())
        );
        let single = Instance::new(Kind::Chores, vec![vec![-1i64, -3, -2]]).unwrap();
        assert_eq!(
            exists_ef1_po(&single, budget()).unwrap().unwrap().bundle(0),
            [0, 1, 2]
        );
    }
}
