//! Ordered instances: every agent's items re-indexed by non-increasing `|value|`.

use crate::error::{Error, Result};
use crate::instance::{Allocation, Instance, Kind};
use crate::scalar::Scalar;

/// An instance together with its ordered counterpart.
///
/// `perms[i][t]` is the original item agent `i` sees at ordered position `t`,
/// so `ordered.value(i, t) == base.value(i, perms[i][t])`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedView<S> {
    base: Instance<S>,
    perms: Vec<Vec<usize>>,
    ordered: Instance<S>,
}

impl<S: Scalar> OrderedView<S> {
    pub fn base(&self) -> &Instance<S> {
        &self.base
    }

    pub fn ordered(&self) -> &Instance<S> {
        &self.ordered
    }

    pub fn perms(&self) -> &[Vec<usize>] {
        &self.perms
    }

    pub fn perm(&self, agent: usize) -> &[usize] {
        &self.perms[agent]
    }
}

/// Stable sort of item indices by non-increasing `|values[r]|`.
pub fn order_row<S: Scalar>(values: &[S]) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..values.len()).collect();
    perm.sort_by(|&x, &y| values[y].abs().cmp(&values[x].abs()));
    perm
}

/// Whether `values` is non-increasing in absolute value.
pub fn is_ordered_row<S: Scalar>(values: &[S]) -> bool {
    values.windows(2).all(|w| w[0].abs() >= w[1].abs())
}

pub fn order_instance<S: Scalar>(inst: &Instance<S>) -> OrderedView<S> {
    let perms: Vec<Vec<usize>> = inst.rows().iter().map(|row| order_row(row)).collect();
    let rows = perms
        .iter()
        .zip(inst.rows())
        .map(|(perm, row)| perm.iter().map(|&r| row[r].clone()).collect())
        .collect();
    let ordered = Instance::new(inst.kind(), rows)
        .and_then(|o| {
            let items = (1..=inst.m()).map(|t| format!("#{t}")).collect();
            o.with_names(inst.agent_names().to_vec(), items)
        })
        .expect("permuted rows keep shape and signs");
    OrderedView {
        base: inst.clone(),
        perms,
        ordered,
    }
}

/// Turns an allocation of the ordered instance into one of the original
/// instance that is at least as good for every agent.
///
/// Positions are visited from most to least significant for goods and from
/// least to most significant for chores. The agent holding the visited
/// position takes its favourite remaining original item (lowest index on
/// ties). When position `t` is visited for goods, `t` items are gone and one
/// of the agent's top `t+1` items is left; for chores, visiting position `t` leaves
/// `t+1` items, one of which costs at most `|v'(t)|`.
pub fn lift_allocation<S: Scalar>(view: &OrderedView<S>, ordered_alloc: &Allocation) -> Result<Allocation> {
    let inst = &view.base;
    ordered_alloc.check_against(inst)?;
    let m = inst.m();
    let holder = ordered_alloc.owners();
    let positions: Box<dyn Iterator<Item = usize>> = match inst.kind() {
        Kind::Goods => Box::new(0..m),
        Kind::Chores => Box::new((0..m).rev()),
    };
    let mut taken = vec![false; m];
    let mut owners = vec![0; m];
    for t in positions {
        let agent = holder[t];
        let row = inst.row(agent);
        let pick = (0..m)
            .filter(|&r| !taken[r])
            .reduce(|best, r| if row[r] > row[best] { r } else { best })
            .ok_or_else(|| Error::Invariant("no item left to lift".into()))?;
        taken[pick] = true;
        owners[pick] = agent;
    }
    Allocation::from_owners(inst.n(), &owners)
}
