//! Pareto improvements through item cycles, improvement chains and MMS + PO.

use std::collections::VecDeque;

use crate::classify::{classify, tier_ranks, ClassSet, ClassTag};
use crate::error::{Error, Result};
use crate::instance::{Allocation, Instance, Kind};
use crate::mms::{solve_mms, MmsOutcome};
use crate::oracle::{is_po_bruteforce, EnumerationBudget};
use crate::scalar::Scalar;

/// Agent `agents[t]` gives up `items[t]` and receives `items[(t+1) % k]`.
///
/// Agents are distinct, nobody loses value and the agent at `strict_edge` gains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImprovementCycle {
    pub agents: Vec<usize>,
    pub items: Vec<usize>,
    pub strict_edge: usize,
}

impl ImprovementCycle {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// The allocation after rotating items along the cycle.
    pub fn apply(&self, alloc: &Allocation) -> Allocation {
        let mut owners = alloc.owners();
        let k = self.items.len();
        for t in 0..k {
            owners[self.items[(t + 1) % k]] = self.agents[t];
        }
        Allocation::from_owners(alloc.n(), &owners).expect("rotation keeps owners valid")
    }
}

fn supported<S: Scalar>(classes: &ClassSet<S>, operation: &'static str) -> Result<()> {
    if classes.contains(ClassTag::Bivalued) || classes.contains(ClassTag::WeaklyLexicographic) {
        Ok(())
    } else {
        Err(Error::UnsupportedClass {
            operation,
            reason: "utilities are neither bivalued nor weakly lexicographic".into(),
        })
    }
}

/// Holder `h` of `r` would swap `r` for `r2`: `v_h(r2) - v_h(r)`.
fn gain<S: Scalar>(inst: &Instance<S>, owners: &[usize], r: usize, r2: usize) -> S {
    let h = owners[r];
    inst.value(h, r2).clone() - inst.value(h, r).clone()
}

/// Splits a cycle (items, each holder receives the next item) at repeated
/// holders until holders are distinct, keeping a sub-cycle whose edges are
/// all weak improvements and whose total gain is positive.
fn untangle<S: Scalar>(inst: &Instance<S>, owners: &[usize], mut cycle: Vec<usize>) -> Vec<usize> {
    loop {
        let k = cycle.len();
        let repeat = (0..k).find_map(|a| {
            (a + 1..k)
                .find(|&b| owners[cycle[a]] == owners[cycle[b]])
                .map(|b| (a, b))
        });
        let Some((a, b)) = repeat else { return cycle };
        // same holder gives up cycle[a] and cycle[b]; exchange their successors
        let first: Vec<usize> = std::iter::once(cycle[a])
            .chain(cycle[b + 1..].iter().copied())
            .chain(cycle[..a].iter().copied())
            .collect();
        let second: Vec<usize> = cycle[a + 1..=b].to_vec();
        let valid = |c: &Vec<usize>| {
            c.len() >= 2
                && (0..c.len()).all(|t| !gain(inst, owners, c[t], c[(t + 1) % c.len()]).is_negative())
        };
        let total = |c: &Vec<usize>| -> S {
            (0..c.len())
                .map(|t| gain(inst, owners, c[t], c[(t + 1) % c.len()]))
                .sum()
        };
        cycle = [first, second]
            .into_iter()
            .find(|c| valid(c) && total(c).is_positive())
            .expect("one half of a split improving cycle still improves");
    }
}

/// A Pareto improvement of `alloc`, or `None` when `alloc` is Pareto optimal.
///
/// Items are nodes; `r -> r2` when the holder of `r` weakly prefers `r2` and
/// `r2` belongs to someone else. Strict edges are tried in `(r, r2)` order and
/// closed by a breadth-first path `r2 -> r`.
pub fn find_pareto_improvement<S: Scalar>(
    inst: &Instance<S>,
    alloc: &Allocation,
) -> Result<Option<(ImprovementCycle, Allocation)>> {
    alloc.check_against(inst)?;
    supported(&classify(inst), "Pareto improvement search")?;
    let m = inst.m();
    let owners = alloc.owners();
    let adj: Vec<Vec<usize>> = (0..m)
        .map(|r| {
            (0..m)
                .filter(|&r2| owners[r2] != owners[r] && !gain(inst, &owners, r, r2).is_negative())
                .collect()
        })
        .collect();
    for r in 0..m {
        for &r2 in &adj[r] {
            if !gain(inst, &owners, r, r2).is_positive() {
                continue;
            }
            let Some(path) = bfs_path(&adj, r2, r) else { continue };
            let mut cycle = vec![r];
            cycle.extend(path.into_iter().take_while(|&x| x != r));
            let cycle = untangle(inst, &owners, cycle);
            let k = cycle.len();
            let strict_edge = (0..k)
                .find(|&t| gain(inst, &owners, cycle[t], cycle[(t + 1) % k]).is_positive())
                .expect("improving cycle has a strict edge");
            let improvement = ImprovementCycle {
                agents: cycle.iter().map(|&x| owners[x]).collect(),
                items: cycle,
                strict_edge,
            };
            let improved = improvement.apply(alloc);
            return Ok(Some((improvement, improved)));
        }
    }
    Ok(None)
}

/// Shortest path `from -> ... -> to`, neighbours in index order.
fn bfs_path(adj: &[Vec<usize>], from: usize, to: usize) -> Option<Vec<usize>> {
    let mut parent = vec![usize::MAX; adj.len()];
    let mut queue = VecDeque::from([from]);
    parent[from] = from;
    while let Some(u) = queue.pop_front() {
        if u == to {
            let mut path = vec![to];
            let mut at = to;
            while at != from {
                at = parent[at];
                path.push(at);
            }
            path.reverse();
            return Some(path);
        }
        for &w in &adj[u] {
            if parent[w] == usize::MAX {
                parent[w] = u;
                queue.push_back(w);
            }
        }
    }
    None
}

/// The quantity every improvement moves strictly in one direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Potential {
    /// Number of items held by an agent valuing them at the larger magnitude.
    HighValueCount,
    /// Sum over held items of the holder's tier rank (1 = top tier).
    TierRankSum,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainStep {
    pub cycle: ImprovementCycle,
    pub potential: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParetoChain {
    pub allocation: Allocation,
    pub potential: Potential,
    pub initial_potential: u64,
    pub steps: Vec<ChainStep>,
}

fn potential_of<S: Scalar>(inst: &Instance<S>, owners: &[usize], potential: Potential, ranks: &[Vec<usize>], high: &S) -> u64 {
    owners
        .iter()
        .enumerate()
        .map(|(r, &i)| match potential {
            Potential::HighValueCount => u64::from(inst.value(i, r) == high),
            Potential::TierRankSum => ranks[i][r] as u64,
        })
        .sum()
}

/// Applies Pareto improvements until none is left.
///
/// The chain is bounded by `m` steps on bivalued utilities and `m^2` on
/// weakly lexicographic ones, and the potential must move strictly every
/// step; either failure is reported as an invariant violation.
pub fn pareto_chain<S: Scalar>(inst: &Instance<S>, alloc: &Allocation) -> Result<ParetoChain> {
    alloc.check_against(inst)?;
    let classes = classify(inst);
    supported(&classes, "Pareto chain")?;
    let m = inst.m();
    let (potential, high, bound) = match classes.bivalued_pair() {
        Some((_, b)) => (Potential::HighValueCount, b, m),
        None => (Potential::TierRankSum, S::zero(), m * m),
    };
    let ranks: Vec<Vec<usize>> = match potential {
        Potential::TierRankSum => inst
            .rows()
            .iter()
            .map(|row| tier_ranks(row).expect("weakly lexicographic rows have tiers"))
            .collect(),
        Potential::HighValueCount => Vec::new(),
    };
    // goods: high count rises, rank sum falls; chores: the reverse
    let rising = matches!(
        (potential, inst.kind()),
        (Potential::HighValueCount, Kind::Goods) | (Potential::TierRankSum, Kind::Chores)
    );
    let initial_potential = potential_of(inst, &alloc.owners(), potential, &ranks, &high);
    let mut current = alloc.clone();
    let mut last = initial_potential;
    let mut steps = Vec::new();
    while let Some((cycle, next)) = find_pareto_improvement(inst, &current)? {
        let value = potential_of(inst, &next.owners(), potential, &ranks, &high);
        let moved = if rising { value > last } else { value < last };
        if !moved {
            return Err(Error::Invariant(format!(
                "improvement left the {potential:?} potential at {value} (was {last})"
            )));
        }
        for i in 0..inst.n() {
            if inst.bundle_value(i, next.bundle(i)) < inst.bundle_value(i, current.bundle(i)) {
                return Err(Error::Invariant(format!("improvement hurt agent {i}")));
            }
        }
        steps.push(ChainStep {
            cycle,
            potential: value,
        });
        if steps.len() > bound {
            return Err(Error::Invariant(format!(
                "improvement chain exceeded {bound} steps"
            )));
        }
        last = value;
        current = next;
    }
    Ok(ParetoChain {
        allocation: current,
        potential,
        initial_potential,
        steps,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MmsPoOutcome<S> {
    pub allocation: Allocation,
    pub mms: MmsOutcome<S>,
    pub chain: ParetoChain,
}

/// An MMS and PO allocation for weakly lexicographic or factored bivalued utilities.
pub fn solve_mms_po<S: Scalar>(inst: &Instance<S>) -> Result<MmsPoOutcome<S>> {
    let classes = classify(inst);
    let ok = inst.n() == 1
        || classes.contains(ClassTag::WeaklyLexicographic)
        || classes.contains(ClassTag::FactoredBivalued);
    if !ok {
        let reason = if classes.contains(ClassTag::PersonalizedBivalued) {
            "personalized bivalued utilities are not covered by the MMS + PO guarantee"
        } else {
            "utilities are neither weakly lexicographic nor factored bivalued"
        };
        return Err(Error::UnsupportedClass {
            operation: "MMS + PO allocation",
            reason: reason.into(),
        });
    }
    let mms = solve_mms(inst)?;
    let chain = if inst.n() == 1 {
        ParetoChain {
            allocation: mms.allocation.clone(),
            potential: Potential::HighValueCount,
            initial_potential: 0,
            steps: Vec::new(),
        }
    } else {
        pareto_chain(inst, &mms.allocation)?
    };
    let allocation = chain.allocation.clone();
    for (i, share) in mms.shares.iter().enumerate() {
        if inst.bundle_value(i, allocation.bundle(i)) < *share {
            return Err(Error::Invariant(format!(
                "Pareto improvements pushed agent {i} below its maximin share"
            )));
        }
    }
    Ok(MmsPoOutcome {
        allocation,
        mms,
        chain,
    })
}

/// Agreement between the cycle search and brute force on sampled allocations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub checked: usize,
    /// Indices of sampled allocations where the two verdicts differ.
    pub disagreements: Vec<usize>,
}

impl EquivalenceReport {
    pub fn agrees(&self) -> bool {
        self.disagreements.is_empty()
    }
}

/// On bivalued instances an allocation is PO iff no fractional allocation
/// dominates it, and a fractional dominator exists iff one of the cycles
/// searched here exists. This harness compares the cycle verdict with
/// integral brute force.
pub fn check_po_fpo_equivalence<S: Scalar>(
    inst: &Instance<S>,
    allocs: &[Allocation],
    budget: EnumerationBudget,
) -> Result<EquivalenceReport> {
    if !classify(inst).contains(ClassTag::Bivalued) {
        return Err(Error::NotBivalued);
    }
    budget.check(inst.n(), inst.m())?;
    let mut disagreements = Vec::new();
    for (idx, alloc) in allocs.iter().enumerate() {
        let by_cycle = find_pareto_improvement(inst, alloc)?.is_none();
        let by_search = is_po_bruteforce(inst, alloc, budget)?.holds;
        if by_cycle != by_search {
            disagreements.push(idx);
        }
    }
    Ok(EquivalenceReport {
        checked: allocs.len(),
        disagreements,
    })
}
