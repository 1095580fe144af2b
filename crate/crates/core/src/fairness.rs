//! Fairness and efficiency predicates with checkable witnesses.

use std::fmt;

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::instance::{Allocation, Instance};
use crate::io::{bundles_to_json, scalar_to_json};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Property {
    Ef,
    Ef1,
    Pef1,
    Mms,
    Po,
}

impl Property {
    pub fn as_str(self) -> &'static str {
        match self {
            Property::Ef => "ef",
            Property::Ef1 => "ef1",
            Property::Pef1 => "pef1",
            Property::Mms => "mms",
            Property::Po => "po",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ef" => Ok(Property::Ef),
            "ef1" => Ok(Property::Ef1),
            "pef1" => Ok(Property::Pef1),
            "mms" => Ok(Property::Mms),
            "po" => Ok(Property::Po),
            other => Err(Error::InvalidArgument(format!("unknown property {other:?}"))),
        }
    }
}

/// Why a property fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness<S> {
    /// `envious` prefers `envied`'s bundle (for EF1: even after removing any one item).
    Envy { envious: usize, envied: usize },
    /// `p_upto1(x_agent) > p(x_other)`.
    PriceEnvy { agent: usize, other: usize },
    /// `agent` gets `value`, below its maximin share `share`.
    Shortfall { agent: usize, value: S, share: S },
    /// An allocation every agent weakly prefers and some agent strictly prefers.
    Dominated { by: Allocation },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FairnessReport<S> {
    pub property: Property,
    pub holds: bool,
    pub witness: Option<Witness<S>>,
}

impl<S> FairnessReport<S> {
    pub fn pass(property: Property) -> Self {
        FairnessReport {
            property,
            holds: true,
            witness: None,
        }
    }

    pub fn fail(property: Property, witness: Witness<S>) -> Self {
        FairnessReport {
            property,
            holds: false,
            witness: Some(witness),
        }
    }

    fn from_witness(property: Property, witness: Option<Witness<S>>) -> Self {
        match witness {
            Some(w) => Self::fail(property, w),
            None => Self::pass(property),
        }
    }
}

impl<S: Scalar> FairnessReport<S> {
    /// The report with agents and items named after `inst`.
    pub fn to_json(&self, inst: &Instance<S>) -> Value {
        let name = |i: usize| inst.agent_names()[i].clone();
        let witness = match &self.witness {
            None => Value::Null,
            Some(Witness::Envy { envious, envied }) => {
                json!({"envious": name(*envious), "envied": name(*envied)})
            }
            Some(Witness::PriceEnvy { agent, other }) => {
                json!({"agent": name(*agent), "other": name(*other)})
            }
            Some(Witness::Shortfall {
                agent,
                value,
                share,
            }) => json!({
                "agent": name(*agent),
                "value": scalar_to_json(value),
                "share": scalar_to_json(share),
            }),
            Some(Witness::Dominated { by }) => json!({"dominated_by": bundles_to_json(inst, by)}),
        };
        json!({
            "property": self.property.as_str(),
            "holds": self.holds,
            "witness": witness,
        })
    }
}

fn ef1_pair<S: Scalar>(inst: &Instance<S>, alloc: &Allocation, i: usize, j: usize) -> bool {
    let own = alloc.bundle(i);
    let other = alloc.bundle(j);
    if own.is_empty() && other.is_empty() {
        return true;
    }
    let row = inst.row(i);
    let mine = inst.bundle_value(i, own);
    let theirs = inst.bundle_value(i, other);
    // best single removal: the worst item of one's own bundle or the best of the other
    let drop_own = own.iter().map(|&r| -row[r].clone()).max();
    let drop_other = other.iter().map(|&r| row[r].clone()).max();
    let gain = match (drop_own, drop_other) {
        (Some(a), Some(b)) => a.max(b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => unreachable!(),
    };
    mine + gain >= theirs
}

fn first_pair(n: usize, mut violates: impl FnMut(usize, usize) -> bool) -> Option<(usize, usize)> {
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .find(|&(i, j)| i != j && violates(i, j))
}

fn envy_report<S>(property: Property, pair: Option<(usize, usize)>) -> FairnessReport<S> {
    FairnessReport::from_witness(
        property,
        pair.map(|(envious, envied)| Witness::Envy { envious, envied }),
    )
}

/// EF1 with the item removable from either bundle.
pub fn is_ef1<S: Scalar>(inst: &Instance<S>, alloc: &Allocation) -> Result<FairnessReport<S>> {
    alloc.check_against(inst)?;
    let pair = first_pair(inst.n(), |i, j| !ef1_pair(inst, alloc, i, j));
    Ok(envy_report(Property::Ef1, pair))
}

/// EF1 where only an item of the envied bundle may be removed (the goods reading).
pub fn is_ef1_goods_form<S: Scalar>(inst: &Instance<S>, alloc: &Allocation) -> Result<FairnessReport<S>> {
    alloc.check_against(inst)?;
    let pair = first_pair(inst.n(), |i, j| {
        let mine = inst.bundle_value(i, alloc.bundle(i));
        let theirs = inst.bundle_value(i, alloc.bundle(j));
        let best = alloc.bundle(j).iter().map(|&r| inst.value(i, r).clone()).max();
        mine < theirs && best.is_none_or(|b| mine < theirs - b)
    });
    Ok(envy_report(Property::Ef1, pair))
}

/// EF1 where only an item of the envious agent's own bundle may be removed (the chores reading).
pub fn is_ef1_chores_form<S: Scalar>(inst: &Instance<S>, alloc: &Allocation) -> Result<FairnessReport<S>> {
    alloc.check_against(inst)?;
    let pair = first_pair(inst.n(), |i, j| {
        let mine = inst.bundle_value(i, alloc.bundle(i));
        let theirs = inst.bundle_value(i, alloc.bundle(j));
        let worst = alloc.bundle(i).iter().map(|&r| inst.value(i, r).clone()).min();
        mine < theirs && worst.is_none_or(|w| mine - w < theirs)
    });
    Ok(envy_report(Property::Ef1, pair))
}

pub fn is_ef<S: Scalar>(inst: &Instance<S>, alloc: &Allocation) -> Result<FairnessReport<S>> {
    alloc.check_against(inst)?;
    let pair = first_pair(inst.n(), |i, j| {
        inst.bundle_value(i, alloc.bundle(i)) < inst.bundle_value(i, alloc.bundle(j))
    });
    Ok(envy_report(Property::Ef, pair))
}

/// `p(S) - max_{c in S} p(c)`, zero for the empty set.
pub fn price_upto1<S: Scalar>(prices: &[Ratio<S>], bundle: &[usize]) -> Ratio<S> {
    let total: Ratio<S> = bundle.iter().map(|&c| &prices[c]).fold(Ratio::zero(), |a, b| a + b);
    match bundle.iter().map(|&c| &prices[c]).max() {
        Some(top) => total - top,
        None => Ratio::zero(),
    }
}

pub fn spending<S: Scalar>(prices: &[Ratio<S>], bundle: &[usize]) -> Ratio<S> {
    bundle.iter().map(|&c| &prices[c]).fold(Ratio::zero(), |a, b| a + b)
}

/// Price envy-freeness up to one chore.
pub fn is_pef1<S: Scalar>(alloc: &Allocation, prices: &[Ratio<S>]) -> Result<FairnessReport<S>> {
    if prices.len() != alloc.m() {
        return Err(Error::InvalidArgument(format!(
            "{} prices for {} items",
            prices.len(),
            alloc.m()
        )));
    }
    if let Some(item) = prices.iter().position(|p| !p.is_positive()) {
        return Err(Error::NonPositivePrice { item });
    }
    let spend: Vec<Ratio<S>> = alloc.bundles().iter().map(|b| spending(prices, b)).collect();
    let upto1: Vec<Ratio<S>> = alloc.bundles().iter().map(|b| price_upto1(prices, b)).collect();
    let pair = first_pair(alloc.n(), |i, j| upto1[i] > spend[j]);
    Ok(FairnessReport::from_witness(
        Property::Pef1,
        pair.map(|(agent, other)| Witness::PriceEnvy { agent, other }),
    ))
}

/// Whether every agent's bundle is worth at least its given maximin share.
pub fn is_mms_alloc<S: Scalar>(
    inst: &Instance<S>,
    alloc: &Allocation,
    mms_values: &[S],
) -> Result<FairnessReport<S>> {
    alloc.check_against(inst)?;
    if mms_values.len() != inst.n() {
        return Err(Error::InvalidArgument(format!(
            "{} maximin shares for {} agents",
            mms_values.len(),
            inst.n()
        )));
    }
    let witness = (0..inst.n()).find_map(|i| {
        let value = inst.bundle_value(i, alloc.bundle(i));
        (value < mms_values[i]).then(|| Witness::Shortfall {
            agent: i,
            value,
            share: mms_values[i].clone(),
        })
    });
    Ok(FairnessReport::from_witness(Property::Mms, witness))
}
