//! Utility-class detection and the class-specific instance transforms.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::instance::{Instance, Kind};
use crate::scalar::Scalar;

/// A utility class an instance may belong to. Classes overlap; see [`classify`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum UtilityClass<S> {
    /// Every value is `0` or `±1`.
    Binary,
    /// All agents share two nonzero values `a`, `b` with `|a| < |b|`.
    Bivalued { a: S, b: S },
    /// Bivalued with `a | b`.
    FactoredBivalued { a: S, b: S },
    /// Each agent has its own pair `(a_i, b_i)`.
    PersonalizedBivalued { pairs: Vec<(S, S)> },
    /// Personalized bivalued with `a_i | b_i` for every agent.
    FactoredPersonalizedBivalued { pairs: Vec<(S, S)> },
    /// Per agent, the distinct nonzero magnitudes form a divisibility chain.
    Factored,
    /// Per agent, tiered values where each item outweighs all lower tiers combined.
    WeaklyLexicographic,
    GeneralAdditive,
}

/// Discriminant of [`UtilityClass`] without parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassTag {
    Binary,
    Bivalued,
    FactoredBivalued,
    PersonalizedBivalued,
    FactoredPersonalizedBivalued,
    Factored,
    WeaklyLexicographic,
    GeneralAdditive,
}

impl ClassTag {
    pub const ALL: [ClassTag; 8] = [
        ClassTag::Binary,
        ClassTag::Bivalued,
        ClassTag::FactoredBivalued,
        ClassTag::PersonalizedBivalued,
        ClassTag::FactoredPersonalizedBivalued,
        ClassTag::Factored,
        ClassTag::WeaklyLexicographic,
        ClassTag::GeneralAdditive,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ClassTag::Binary => "binary",
            ClassTag::Bivalued => "bivalued",
            ClassTag::FactoredBivalued => "factored-bivalued",
            ClassTag::PersonalizedBivalued => "personalized-bivalued",
            ClassTag::FactoredPersonalizedBivalued => "factored-personalized-bivalued",
            ClassTag::Factored => "factored",
            ClassTag::WeaklyLexicographic => "wolex",
            ClassTag::GeneralAdditive => "general",
        }
    }
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClassTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown utility class {s:?}")))
    }
}

impl<S> UtilityClass<S> {
    pub fn tag(&self) -> ClassTag {
        match self {
            UtilityClass::Binary => ClassTag::Binary,
            UtilityClass::Bivalued { .. } => ClassTag::Bivalued,
            UtilityClass::FactoredBivalued { .. } => ClassTag::FactoredBivalued,
            UtilityClass::PersonalizedBivalued { .. } => ClassTag::PersonalizedBivalued,
            UtilityClass::FactoredPersonalizedBivalued { .. } => {
                ClassTag::FactoredPersonalizedBivalued
            }
            UtilityClass::Factored => ClassTag::Factored,
            UtilityClass::WeaklyLexicographic => ClassTag::WeaklyLexicographic,
            UtilityClass::GeneralAdditive => ClassTag::GeneralAdditive,
        }
    }
}

/// The set of classes an instance belongs to, in [`ClassTag`] order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassSet<S>(Vec<UtilityClass<S>>);

impl<S> ClassSet<S> {
    pub fn contains(&self, tag: ClassTag) -> bool {
        self.0.iter().any(|c| c.tag() == tag)
    }

    pub fn get(&self, tag: ClassTag) -> Option<&UtilityClass<S>> {
        self.0.iter().find(|c| c.tag() == tag)
    }

    pub fn tags(&self) -> Vec<ClassTag> {
        self.0.iter().map(UtilityClass::tag).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &UtilityClass<S>> {
        self.0.iter()
    }
}

impl<S: Clone> ClassSet<S> {
    /// The common `(a, b)` pair when the instance is bivalued.
    pub fn bivalued_pair(&self) -> Option<(S, S)> {
        match self.get(ClassTag::Bivalued) {
            Some(UtilityClass::Bivalued { a, b }) => Some((a.clone(), b.clone())),
            _ => None,
        }
    }
}

fn unit<S: Scalar>(kind: Kind) -> S {
    match kind {
        Kind::Goods => S::one(),
        Kind::Chores => -S::one(),
    }
}

/// The `(a, b)` pair of a single bivalued row, `|a| < |b|`.
///
/// A row using one value `c` is reported as `(c, 2c)`; any `b` would satisfy
/// the definition and this choice keeps the row factored. Returns `None` when
/// the row has a zero or more than two distinct values.
pub fn row_value_pair<S: Scalar>(row: &[S], kind: Kind) -> Option<(S, S)> {
    let mut distinct: Vec<&S> = Vec::with_capacity(2);
    for v in row {
        if v.is_zero() {
            return None;
        }
        if !distinct.contains(&v) {
            if distinct.len() == 2 {
                return None;
            }
            distinct.push(v);
        }
    }
    Some(pair_from_distinct(&distinct, kind))
}

fn pair_from_distinct<S: Scalar>(distinct: &[&S], kind: Kind) -> (S, S) {
    let two = S::one() + S::one();
    match *distinct {
        [] => (unit(kind), unit::<S>(kind) * two),
        [c] => (c.clone(), c.clone() * two),
        [x, y] => {
            if x.abs() < y.abs() {
                (x.clone(), y.clone())
            } else {
                (y.clone(), x.clone())
            }
        }
        _ => unreachable!("at most two distinct values"),
    }
}

fn instance_pair<S: Scalar>(inst: &Instance<S>) -> Option<(S, S)> {
    let mut distinct: Vec<&S> = Vec::with_capacity(2);
    for v in inst.rows().iter().flatten() {
        if v.is_zero() {
            return None;
        }
        if !distinct.contains(&v) {
            if distinct.len() == 2 {
                return None;
            }
            distinct.push(v);
        }
    }
    Some(pair_from_distinct(&distinct, inst.kind()))
}

fn divides<S: Scalar>(a: &S, b: &S) -> bool {
    !a.is_zero() && (b.clone() % a.clone()).is_zero()
}

/// Whether the distinct nonzero magnitudes of `row` form a divisibility chain.
pub fn is_factored_row<S: Scalar>(row: &[S]) -> bool {
    let mut mags: Vec<S> = row.iter().filter(|v| !v.is_zero()).map(|v| v.abs()).collect();
    mags.sort();
    mags.dedup();
    mags.windows(2).all(|w| divides(&w[0], &w[1]))
}

/// One tier of a weakly lexicographic row: equal-magnitude items.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tier<S> {
    pub magnitude: S,
    pub items: Vec<usize>,
}

/// Tiers of a weakly lexicographic row, highest magnitude first, or `None`
/// when the row is not weakly lexicographic.
pub fn wolex_tiers<S: Scalar>(row: &[S]) -> Option<Vec<Tier<S>>> {
    if row.iter().any(Zero::is_zero) {
        return None;
    }
    let mut order: Vec<usize> = (0..row.len()).collect();
    order.sort_by(|&x, &y| row[y].abs().cmp(&row[x].abs()).then(x.cmp(&y)));
    let mut tiers: Vec<Tier<S>> = Vec::new();
    for r in order {
        let mag = row[r].abs();
        match tiers.last_mut() {
            Some(t) if t.magnitude == mag => t.items.push(r),
            _ => tiers.push(Tier {
                magnitude: mag,
                items: vec![r],
            }),
        }
    }
    // each tier's magnitude must exceed everything below it combined
    let mut lower = S::zero();
    for tier in tiers.iter().rev() {
        if tier.magnitude <= lower {
            return None;
        }
        lower = lower + tier.magnitude.clone() * S::from_usize_exact(tier.items.len());
    }
    Some(tiers)
}

/// `h(i, r)`: the 1-based tier of every item (1 is the most valuable tier).
pub fn tier_ranks<S: Scalar>(row: &[S]) -> Option<Vec<usize>> {
    let tiers = wolex_tiers(row)?;
    let mut ranks = vec![0; row.len()];
    for (t, tier) in tiers.iter().enumerate() {
        for &r in &tier.items {
            ranks[r] = t + 1;
        }
    }
    Some(ranks)
}

/// Every class the instance belongs to. `GeneralAdditive` is always present.
pub fn classify<S: Scalar>(inst: &Instance<S>) -> ClassSet<S> {
    let kind = inst.kind();
    let mut classes = Vec::new();
    let u = unit::<S>(kind);
    if inst.rows().iter().flatten().all(|v| v.is_zero() || *v == u) {
        classes.push(UtilityClass::Binary);
    }
    if let Some((a, b)) = instance_pair(inst) {
        classes.push(UtilityClass::Bivalued {
            a: a.clone(),
            b: b.clone(),
        });
        if divides(&a, &b) {
            classes.push(UtilityClass::FactoredBivalued { a, b });
        }
    }
    let pairs: Option<Vec<(S, S)>> = inst
        .rows()
        .iter()
        .map(|row| row_value_pair(row, kind))
        .collect();
    if let Some(pairs) = pairs {
        let factored = pairs.iter().all(|(a, b)| divides(a, b));
        classes.push(UtilityClass::PersonalizedBivalued {
            pairs: pairs.clone(),
        });
        if factored {
            classes.push(UtilityClass::FactoredPersonalizedBivalued { pairs });
        }
    }
    if inst.rows().iter().all(|row| is_factored_row(row)) {
        classes.push(UtilityClass::Factored);
    }
    if inst.rows().iter().all(|row| wolex_tiers(row).is_some()) {
        classes.push(UtilityClass::WeaklyLexicographic);
    }
    classes.push(UtilityClass::GeneralAdditive);
    ClassSet(classes)
}

fn checked_pow<S: Scalar>(base: &S, exp: usize) -> Result<S> {
    let mut acc = S::one();
    for _ in 0..exp {
        acc = acc
            .checked_mul(base)
            .ok_or(Error::Overflow("raising the item count to a tier power"))?;
    }
    Ok(acc)
}

/// Replaces each agent's tier values by powers of `m`, the top tier of `k`
/// tiers getting `m^(k-1)` and the bottom tier `m^0`, keeping the sign.
///
/// Bundle comparisons are unchanged: `v(S) <= v(S')` iff `v'(S) <= v'(S')`.
pub fn canonicalize_wolex<S: Scalar>(inst: &Instance<S>) -> Result<Instance<S>> {
    let base = S::from_usize_exact(inst.m());
    let sign = unit::<S>(inst.kind());
    let rows = inst
        .rows()
        .iter()
        .enumerate()
        .map(|(agent, row)| {
            let tiers = wolex_tiers(row).ok_or(Error::NotWeaklyLexicographic { agent })?;
            let k = tiers.len();
            let mut out = vec![S::zero(); row.len()];
            for (t, tier) in tiers.iter().enumerate() {
                let value = checked_pow(&base, k - 1 - t)? * sign.clone();
                for &r in &tier.items {
                    out[r] = value.clone();
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    inst.with_valuations(rows)
}

/// A bivalued chore instance rescaled so every value is `-1` or `-p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedChores<S: Scalar> {
    ratio: Ratio<S>,
    values: Vec<Vec<Ratio<S>>>,
    scales: Vec<Ratio<S>>,
}

impl<S: Scalar> NormalizedChores<S> {
    /// The common ratio `p = b / a > 1`.
    pub fn ratio(&self) -> &Ratio<S> {
        &self.ratio
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn m(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    /// Normalized value, `-1` or `-p`.
    pub fn value(&self, agent: usize, chore: usize) -> &Ratio<S> {
        &self.values[agent][chore]
    }

    /// Normalized disutility `|v|`, `1` or `p`.
    pub fn cost(&self, agent: usize, chore: usize) -> Ratio<S> {
        -self.values[agent][chore].clone()
    }

    pub fn values(&self) -> &[Vec<Ratio<S>>] {
        &self.values
    }

    /// Original value = normalized value × scale, per agent.
    pub fn scales(&self) -> &[Ratio<S>] {
        &self.scales
    }

    /// Whether agent `agent` finds `chore` easy (normalized value `-1`).
    pub fn is_easy(&self, agent: usize, chore: usize) -> bool {
        self.values[agent][chore] == -Ratio::one()
    }
}

/// Rescales a bivalued chore instance so every agent values chores at `-1`
/// or `-p` and every agent values at least one chore at `-1`.
pub fn normalize_bivalued_chores<S: Scalar>(inst: &Instance<S>) -> Result<NormalizedChores<S>> {
    if inst.kind() != Kind::Chores {
        return Err(Error::WrongKind {
            operation: "bivalued chore normalization",
            expected: Kind::Chores,
        });
    }
    for (agent, row) in inst.rows().iter().enumerate() {
        if let Some(item) = row.iter().position(Zero::is_zero) {
            return Err(Error::ZeroValuation { agent, item });
        }
    }
    let (a, b) = instance_pair(inst).ok_or(Error::NotBivalued)?;
    let ratio = Ratio::new(b.clone(), a.clone());
    let mut values = Vec::with_capacity(inst.n());
    let mut scales = Vec::with_capacity(inst.n());
    for row in inst.rows() {
        let scale = if row.is_empty() || row.contains(&a) {
            a.abs()
        } else {
            b.abs()
        };
        values.push(
            row.iter()
                .map(|v| Ratio::new(v.clone(), scale.clone()))
                .collect(),
        );
        scales.push(Ratio::from_integer(scale));
    }
    Ok(NormalizedChores {
        ratio,
        values,
        scales,
    })
}
