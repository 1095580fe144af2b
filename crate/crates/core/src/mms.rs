//! Maximin shares and MMS allocations for factored utilities.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::classify::{classify, is_factored_row, row_value_pair, wolex_tiers, ClassTag};
use crate::error::{Error, Result};
use crate::instance::{Allocation, Instance, Kind};
use crate::ordered::{is_ordered_row, lift_allocation, order_instance, OrderedView};
use crate::scalar::{sum_over, Scalar};

/// An `n`-partition of one agent's items and its least bundle value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaximinPartition<S> {
    bundles: Vec<Vec<usize>>,
    min_value: S,
}

impl<S: Scalar> MaximinPartition<S> {
    /// Evaluates `bundles` (indices into `values`) and records the minimum.
    pub fn new(values: &[S], mut bundles: Vec<Vec<usize>>) -> Self {
        for b in &mut bundles {
            b.sort_unstable();
        }
        let min_value = bundles
            .iter()
            .map(|b| sum_over(values, b))
            .min()
            .unwrap_or_else(S::zero);
        MaximinPartition { bundles, min_value }
    }

    pub fn bundles(&self) -> &[Vec<usize>] {
        &self.bundles
    }

    pub fn min_value(&self) -> &S {
        &self.min_value
    }

    pub fn bundle_values(&self, values: &[S]) -> Vec<S> {
        self.bundles.iter().map(|b| sum_over(values, b)).collect()
    }
}

/// One step of the greedy: `item` went to `bundle`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Placement {
    pub item: usize,
    pub bundle: usize,
}

/// The greedy partition with its placement log.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreedyRun<S> {
    pub partition: MaximinPartition<S>,
    pub placements: Vec<Placement>,
}

fn greedy_placements<T: Scalar>(magnitudes: &[T], n: usize) -> Vec<Placement> {
    let mut order: Vec<usize> = (0..magnitudes.len()).collect();
    order.sort_by(|&x, &y| magnitudes[y].cmp(&magnitudes[x]));
    let mut totals = vec![T::zero(); n];
    order
        .into_iter()
        .map(|item| {
            let bundle = (0..n)
                .reduce(|best, b| if totals[b] < totals[best] { b } else { best })
                .expect("n >= 1");
            totals[bundle] = totals[bundle].clone() + magnitudes[item].clone();
            Placement { item, bundle }
        })
        .collect()
}

fn bundles_from(placements: &[Placement], n: usize) -> Vec<Vec<usize>> {
    let mut bundles = vec![Vec::new(); n];
    for p in placements {
        bundles[p.bundle].push(p.item);
    }
    bundles
}

fn check_bundles(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("at least one bundle is required".into()));
    }
    Ok(())
}

/// The greedy on any row: items by non-increasing `|value|` (stable), each
/// to the bundle of least `|total|`, lowest index on ties.
///
/// Exact only for factored rows; on others the result can fall short of the
/// maximin share.
pub fn greedy_partition<S: Scalar>(values: &[S], n: usize) -> Result<GreedyRun<S>> {
    check_bundles(n)?;
    let magnitudes: Vec<S> = values.iter().map(|v| v.abs()).collect();
    let placements = greedy_placements(&magnitudes, n);
    let partition = MaximinPartition::new(values, bundles_from(&placements, n));
    Ok(GreedyRun {
        partition,
        placements,
    })
}

/// Maximin `n`-partition of a factored row.
pub fn mms_partition_factored<S: Scalar>(values: &[S], n: usize) -> Result<MaximinPartition<S>> {
    check_bundles(n)?;
    if !is_factored_row(values) {
        return Err(Error::NotFactored);
    }
    greedy_partition(values, n).map(|run| run.partition)
}

pub fn mms_value_factored<S: Scalar>(values: &[S], n: usize) -> Result<S> {
    mms_partition_factored(values, n).map(|p| p.min_value)
}

/// Maximin partition of a factored or weakly lexicographic row.
///
/// Weakly lexicographic rows are partitioned through their power-of-`m`
/// form, built over [`BigInt`] so large rows cannot overflow, and the
/// partition is then evaluated under the original values.
pub fn mms_partition<S: Scalar>(values: &[S], n: usize) -> Result<MaximinPartition<S>> {
    check_bundles(n)?;
    if is_factored_row(values) {
        return mms_partition_factored(values, n);
    }
    let tiers = wolex_tiers(values).ok_or_else(|| Error::UnsupportedClass {
        operation: "maximin share",
        reason: "row is neither factored nor weakly lexicographic".into(),
    })?;
    let base = BigInt::from(values.len());
    let k = tiers.len();
    let mut canonical = vec![BigInt::zero(); values.len()];
    for (t, tier) in tiers.iter().enumerate() {
        let weight = num_traits::pow(base.clone(), k - 1 - t);
        for &r in &tier.items {
            canonical[r] = weight.clone();
        }
    }
    let placements = greedy_placements(&canonical, n);
    Ok(MaximinPartition::new(values, bundles_from(&placements, n)))
}

/// Maximin share of a factored or weakly lexicographic row.
pub fn mms_value<S: Scalar>(values: &[S], n: usize) -> Result<S> {
    mms_partition(values, n).map(|p| p.min_value)
}

/// Smallest bad cut of an ordered row (1-based), or `m` when there is none.
///
/// `k` is a cut when items `k` and `k+1` differ, and bad when `n` does not divide `k`.
pub fn first_bad_cut<S: Scalar>(values: &[S], n: usize) -> usize {
    (1..values.len())
        .find(|&k| values[k - 1] != values[k] && k % n != 0)
        .unwrap_or(values.len())
}

/// Bad-cut statistics of an ordered personalized bivalued row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutProfile<S> {
    /// Smallest bad cut, or `m`.
    pub c: usize,
    /// Active bundles: `0` when `c == m`, else `n - (c mod n)`.
    pub ac: usize,
    /// Idle time `min(p * ac, m - c)`.
    pub t_idle: usize,
    /// Ratio between the large and small magnitude; `None` for a single-valued row.
    pub p: Option<S>,
}

pub fn cut_profile_pbv<S: Scalar>(values: &[S], n: usize) -> Result<CutProfile<S>> {
    check_bundles(n)?;
    let m = values.len();
    if let Some(item) = values.iter().position(Zero::is_zero) {
        return Err(Error::ZeroValuation { agent: 0, item });
    }
    if !is_ordered_row(values) {
        return Err(Error::NotOrdered { agent: 0 });
    }
    let kind = if values.iter().any(|v| v.is_negative()) {
        Kind::Chores
    } else {
        Kind::Goods
    };
    let (a, b) = row_value_pair(values, kind).ok_or(Error::NotBivalued)?;
    let p = if values.contains(&a) && values.contains(&b) {
        if !(b.clone() % a.clone()).is_zero() {
            return Err(Error::NonIntegerRatio { agent: 0 });
        }
        Some(b / a)
    } else {
        None
    };
    let c = first_bad_cut(values, n);
    let ac = if c == m { 0 } else { n - c % n };
    let spare = m - c;
    let t_idle = match &p {
        Some(p) => p
            .to_usize()
            .and_then(|p| p.checked_mul(ac))
            .map_or(spare, |busy| busy.min(spare)),
        None => 0,
    };
    Ok(CutProfile { c, ac, t_idle, p })
}

fn spaced_positions(k: usize, n: usize) -> Vec<usize> {
    (0..=k).map(|t| t * n).collect()
}

/// Ordered positions `{1, n+1, ..., kn+1}` with `k = (c-1) / n`, returned 0-based.
pub fn wolex_reduction_bundle(c: usize, n: usize) -> Vec<usize> {
    assert!(c >= 1 && n >= 1, "cut and bundle count are positive");
    spaced_positions((c - 1) / n, n)
}

fn pbv_k<S>(profile: &CutProfile<S>, n: usize, m: usize) -> usize {
    let excess = profile.t_idle.saturating_sub(profile.ac);
    (m - excess - 1) / n
}

/// Ordered positions `{1, n+1, ..., kn+1}` with
/// `k = (m - max(t_idle - ac, 0) - 1) / n`, returned 0-based.
pub fn pbv_reduction_bundle<S>(profile: &CutProfile<S>, n: usize, m: usize) -> Vec<usize> {
    spaced_positions(pbv_k(profile, n, m), n)
}

/// Which argument certifies a reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Justification {
    /// Extreme smallest bad cut on weakly lexicographic utilities.
    WolexLemma,
    /// Extreme idle-time bundle on factored personalized bivalued utilities.
    PbvLemma,
    /// A single agent takes everything left.
    BaseCase,
}

impl Justification {
    pub fn as_str(self) -> &'static str {
        match self {
            Justification::WolexLemma => "wolex",
            Justification::PbvLemma => "personalized-bivalued",
            Justification::BaseCase => "base-case",
        }
    }
}

/// Agent `agent` may take the ordered positions `bundle` and leave.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub agent: usize,
    pub bundle: Vec<usize>,
    pub justification: Justification,
}

fn pick_extreme(keys: &[usize], kind: Kind) -> usize {
    let mut best = 0;
    for (i, key) in keys.iter().enumerate() {
        let better = match kind {
            Kind::Goods => *key < keys[best],
            Kind::Chores => *key > keys[best],
        };
        if better {
            best = i;
        }
    }
    best
}

fn relabel(err: Error, agent: usize) -> Error {
    match err {
        Error::ZeroValuation { item, .. } => Error::ZeroValuation { agent, item },
        Error::NotOrdered { .. } => Error::NotOrdered { agent },
        Error::NonIntegerRatio { .. } => Error::NonIntegerRatio { agent },
        other => other,
    }
}

/// A valid reduction on an ordered instance with at least two agents.
///
/// Weakly lexicographic: the agent with the least (goods) or greatest
/// (chores) smallest bad cut. Factored personalized bivalued: the agent whose
/// bundle `{1, n+1, ..., kn+1}` is shortest (goods) or longest (chores).
/// Lowest index wins ties.
pub fn select_reduction<S: Scalar>(inst: &Instance<S>, class: ClassTag) -> Result<Reduction> {
    let (n, m) = (inst.n(), inst.m());
    if n < 2 {
        return Err(Error::InvalidArgument("a reduction needs at least two agents".into()));
    }
    if m == 0 {
        return Err(Error::InvalidArgument("a reduction needs at least one item".into()));
    }
    if let Some(agent) = inst.rows().iter().position(|row| !is_ordered_row(row)) {
        return Err(Error::NotOrdered { agent });
    }
    match class {
        ClassTag::WeaklyLexicographic => {
            if let Some(agent) = inst.rows().iter().position(|row| wolex_tiers(row).is_none()) {
                return Err(Error::NotWeaklyLexicographic { agent });
            }
            let cuts: Vec<usize> = inst.rows().iter().map(|row| first_bad_cut(row, n)).collect();
            let agent = pick_extreme(&cuts, inst.kind());
            Ok(Reduction {
                agent,
                bundle: wolex_reduction_bundle(cuts[agent], n),
                justification: Justification::WolexLemma,
            })
        }
        ClassTag::FactoredPersonalizedBivalued | ClassTag::FactoredBivalued => {
            let ks = inst
                .rows()
                .iter()
                .enumerate()
                .map(|(i, row)| {
                    cut_profile_pbv(row, n)
                        .map(|profile| pbv_k(&profile, n, m))
                        .map_err(|e| relabel(e, i))
                })
                .collect::<Result<Vec<_>>>()?;
            let agent = pick_extreme(&ks, inst.kind());
            Ok(Reduction {
                agent,
                bundle: spaced_positions(ks[agent], n),
                justification: Justification::PbvLemma,
            })
        }
        other => Err(Error::UnsupportedClass {
            operation: "reduction",
            reason: format!("no reduction rule for {other} utilities"),
        }),
    }
}

/// One round of [`solve_mms`], in terms of the ordered instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionStep {
    /// Agents still present, ascending.
    pub agents: Vec<usize>,
    /// Ordered positions still present, ascending.
    pub positions: Vec<usize>,
    /// The agent served this round.
    pub agent: usize,
    /// The ordered positions it received.
    pub bundle: Vec<usize>,
    pub justification: Justification,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MmsOutcome<S> {
    pub allocation: Allocation,
    pub ordered_allocation: Allocation,
    pub view: OrderedView<S>,
    /// The class whose reduction rule was applied.
    pub class: ClassTag,
    pub steps: Vec<ReductionStep>,
    /// Every agent's maximin share.
    pub shares: Vec<S>,
}

fn mms_class<S: Scalar>(inst: &Instance<S>) -> Result<ClassTag> {
    let classes = classify(inst);
    if classes.contains(ClassTag::WeaklyLexicographic) {
        return Ok(ClassTag::WeaklyLexicographic);
    }
    if classes.contains(ClassTag::FactoredPersonalizedBivalued) {
        return Ok(ClassTag::FactoredPersonalizedBivalued);
    }
    if classes.contains(ClassTag::PersonalizedBivalued) {
        let agent = inst
            .rows()
            .iter()
            .position(|row| !is_factored_row(row))
            .unwrap_or(0);
        return Err(Error::NonIntegerRatio { agent });
    }
    Err(Error::UnsupportedClass {
        operation: "MMS allocation",
        reason: "utilities are neither weakly lexicographic nor factored personalized bivalued"
            .into(),
    })
}

/// An MMS allocation for weakly lexicographic or factored personalized
/// bivalued utilities, goods or chores. A single agent gets everything
/// whatever its utilities.
pub fn solve_mms<S: Scalar>(inst: &Instance<S>) -> Result<MmsOutcome<S>> {
    let n = inst.n();
    let class = if n == 1 {
        ClassTag::GeneralAdditive
    } else {
        mms_class(inst)?
    };
    let view = order_instance(inst);
    let ordered = view.ordered();
    let mut agents: Vec<usize> = (0..n).collect();
    let mut positions: Vec<usize> = (0..inst.m()).collect();
    let mut bundles = vec![Vec::new(); n];
    let mut steps = Vec::new();
    while !agents.is_empty() {
        if agents.len() == 1 || positions.is_empty() {
            let agent = agents[0];
            bundles[agent] = std::mem::take(&mut positions);
            steps.push(ReductionStep {
                agents: agents.clone(),
                positions: bundles[agent].clone(),
                agent,
                bundle: bundles[agent].clone(),
                justification: Justification::BaseCase,
            });
            agents.remove(0);
            continue;
        }
        let sub = ordered.restrict(&agents, &positions);
        if let Some(i) = sub.rows().iter().position(|row| !is_ordered_row(row)) {
            return Err(Error::Invariant(format!(
                "reduced instance is no longer ordered for agent {}",
                agents[i]
            )));
        }
        let red = select_reduction(&sub, class)?;
        let agent = agents[red.agent];
        let bundle: Vec<usize> = red.bundle.iter().map(|&t| positions[t]).collect();
        steps.push(ReductionStep {
            agents: agents.clone(),
            positions: positions.clone(),
            agent,
            bundle: bundle.clone(),
            justification: red.justification,
        });
        positions.retain(|t| !bundle.contains(t));
        agents.remove(red.agent);
        bundles[agent] = bundle;
    }
    let ordered_allocation = Allocation::from_bundles(bundles, inst.m())?;
    let allocation = lift_allocation(&view, &ordered_allocation)?;

    let shares = if n == 1 {
        vec![inst.row(0).iter().sum()]
    } else {
        inst.rows()
            .iter()
            .map(|row| mms_value(row, n))
            .collect::<Result<Vec<S>>>()?
    };
    for (i, share) in shares.iter().enumerate() {
        let got = inst.bundle_value(i, allocation.bundle(i));
        if got < *share {
            return Err(Error::Invariant(format!(
                "agent {i} receives {got}, below its maximin share {share}"
            )));
        }
    }
    Ok(MmsOutcome {
        allocation,
        ordered_allocation,
        view,
        class,
        steps,
        shares,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{exact_mms, EnumerationBudget};

    const FIG2: [i64; 9] = [12, 6, 6, 3, 3, 3, 3, 1, 1];

    #[test]
    fn greedy_reproduces_worked_example() {
        let run = greedy_partition(&FIG2, 4).unwrap();
        let bundles: Vec<usize> = run.placements.iter().map(|p| p.bundle).collect();
        assert_eq!(bundles, [0, 1, 2, 3, 3, 1, 2, 3, 3]);
        assert_eq!(
            run.partition.bundles(),
            [vec![0], vec![1, 5], vec![2, 6], vec![3, 4, 7, 8]]
        );
        assert_eq!(*run.partition.min_value(), 8);
        assert_eq!(mms_value_factored(&FIG2, 4).unwrap(), 8);
    }

    #[test]
    fn greedy_is_wrong_off_class() {
        let row = [3i64, 3, 2, 2, 2];
        assert_eq!(mms_partition_factored(&row, 2), Err(Error::NotFactored));
        assert_eq!(*greedy_partition(&row, 2).unwrap().partition.min_value(), 5);
    }

    #[test]
    fn small_factored_values() {
        assert_eq!(mms_value_factored(&[-1i64, -4, -4], 2).unwrap(), -5);
        assert_eq!(mms_value_factored(&[7i64; 4], 2).unwrap(), 14);
        assert_eq!(mms_value_factored(&[2i64, 0, 4], 1).unwrap(), 6);
        assert_eq!(mms_value_factored(&[0i64, 0], 2).unwrap(), 0);
    }

    #[test]
    fn wolex_values_through_canonical_form() {
        let row = [10i64, 5, 3, 1];
        assert!(!is_factored_row(&row));
        let oracle = exact_mms(&row, 2, EnumerationBudget::default()).unwrap().0;
        assert_eq!(mms_value(&row, 2).unwrap(), oracle);
        assert!(mms_value(&[3i64, 3, 2, 2, 2], 2).is_err());
    }

    #[test]
    fn bad_cuts_of_wolex_table() {
        assert_eq!(first_bad_cut(&[81i64, 81, 81, 81, 9, 9, 9, 1, 1], 3), 4);
        assert_eq!(first_bad_cut(&[81i64, 81, 81, 9, 9, 9, 1, 1, 1], 3), 9);
        assert_eq!(first_bad_cut(&[729i64, 81, 81, 81, 9, 9, 9, 1, 1], 3), 1);
    }

    #[test]
    fn cut_profiles_of_pbv_table() {
        let p1 = cut_profile_pbv(&[2i64, 2, 2, 2, 1, 1, 1, 1, 1], 3).unwrap();
        assert_eq!((p1.c, p1.ac, p1.t_idle, p1.p), (4, 2, 4, Some(2)));
        let p2 = cut_profile_pbv(&[5i64, 1, 1, 1, 1, 1, 1, 1, 1], 3).unwrap();
        assert_eq!((p2.c, p2.ac, p2.t_idle), (1, 2, 8));
        let p3 = cut_profile_pbv(&[4i64, 4, 4, 4, 4, 4, 4, 4, 1], 3).unwrap();
        assert_eq!((p3.c, p3.ac, p3.t_idle), (8, 1, 1));
        assert_eq!(pbv_reduction_bundle(&p1, 3, 9), [0, 3, 6]);
        assert_eq!(pbv_reduction_bundle(&p2, 3, 9), [0]);
        assert_eq!(pbv_reduction_bundle(&p3, 3, 9), [0, 3, 6]);
    }

    #[test]
    fn cut_profile_errors() {
        assert_eq!(
            cut_profile_pbv(&[3i64, 2], 2),
            Err(Error::NonIntegerRatio { agent: 0 })
        );
        assert_eq!(cut_profile_pbv(&[1i64, 2], 2), Err(Error::NotOrdered { agent: 0 }));
        let flat = cut_profile_pbv(&[-3i64, -3, -3], 2).unwrap();
        assert_eq!((flat.c, flat.ac, flat.t_idle, flat.p), (3, 0, 0, None));
    }

    #[test]
    fn wolex_bundles() {
        assert_eq!(wolex_reduction_bundle(4, 3), [0, 3]);
        assert_eq!(wolex_reduction_bundle(1, 3), [0]);
        assert_eq!(wolex_reduction_bundle(9, 3), [0, 3, 6]);
    }

    #[test]
    fn single_agent_takes_all() {
        let inst = Instance::new(Kind::Goods, vec![vec![3i64, 2, 2]]).unwrap();
        let out = solve_mms(&inst).unwrap();
        assert_eq!(out.allocation.bundle(0), [0, 1, 2]);
        assert_eq!(out.shares, [7]);
    }

    #[test]
    fn rejects_non_integer_personalized_ratio() {
        let inst = Instance::new(Kind::Goods, vec![vec![3i64, 2, 2], vec![1, 1, 1]]).unwrap();
        assert_eq!(solve_mms(&inst).err(), Some(Error::NonIntegerRatio { agent: 0 }));
        let general = Instance::new(Kind::Goods, vec![vec![3i64, 2, 1], vec![5, 4, 3]]).unwrap();
        assert!(solve_mms(&general).unwrap_err().is_class_mismatch());
    }
}
