use std::collections::BTreeSet;

use num_rational::Ratio;
use num_traits::{One, Zero};

use super::trace::{Check, Phase, TraceEvent};
use crate::classify::NormalizedChores;
use crate::error::{Error, Result};
use crate::instance::Allocation;
use crate::scalar::Scalar;

/// Allocation, prices and the bookkeeping of one market run.
///
/// Costs are the normalized disutilities `1` or `p`. Every mutation goes
/// through [`MarketState::transfer`] or the price-drop step, both of which
/// re-check that each owned chore is a minimum pain-per-buck chore of its owner.
#[derive(Clone, Debug)]
pub struct MarketState<S: Scalar> {
    pub(crate) norm: NormalizedChores<S>,
    pub(crate) owner: Vec<usize>,
    pub(crate) bundles: Vec<BTreeSet<usize>>,
    pub(crate) prices: Vec<Ratio<S>>,
    pub(crate) iteration: usize,
    pub(crate) h_sets: Vec<Vec<usize>>,
    pub(crate) h_index: Vec<Option<usize>>,
    pub(crate) entitled: Vec<BTreeSet<usize>>,
    pub(crate) trace: Vec<TraceEvent>,
    pub(crate) phase3_runs: usize,
    pub(crate) transfers: usize,
}

impl<S: Scalar> MarketState<S> {
    pub(crate) fn new(norm: NormalizedChores<S>, owner: Vec<usize>, prices: Vec<Ratio<S>>) -> Self {
        let n = norm.n();
        let mut bundles = vec![BTreeSet::new(); n];
        for (c, &i) in owner.iter().enumerate() {
            bundles[i].insert(c);
        }
        MarketState {
            norm,
            owner,
            bundles,
            prices,
            iteration: 1,
            h_sets: Vec::new(),
            h_index: vec![None; n],
            entitled: vec![BTreeSet::new(); n],
            trace: Vec::new(),
            phase3_runs: 0,
            transfers: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.norm.n()
    }

    pub fn m(&self) -> usize {
        self.owner.len()
    }

    /// The common ratio `p > 1`.
    pub fn p(&self) -> &Ratio<S> {
        self.norm.ratio()
    }

    pub fn normalized(&self) -> &NormalizedChores<S> {
        &self.norm
    }

    pub fn prices(&self) -> &[Ratio<S>] {
        &self.prices
    }

    pub fn owner(&self, chore: usize) -> usize {
        self.owner[chore]
    }

    pub fn bundle(&self, agent: usize) -> &BTreeSet<usize> {
        &self.bundles[agent]
    }

    /// Current iteration, starting at 1.
    pub fn iteration(&self) -> usize {
        self.iteration
    }

    /// `H_1, ..., H_{k-1}`, each ascending.
    pub fn h_sets(&self) -> &[Vec<usize>] {
        &self.h_sets
    }

    pub fn entitled(&self, agent: usize) -> &BTreeSet<usize> {
        &self.entitled[agent]
    }

    pub fn in_h_sets(&self, agent: usize) -> bool {
        self.h_index[agent].is_some()
    }

    pub fn trace(&self) -> &[TraceEvent] {
        &self.trace
    }

    pub fn phase3_runs(&self) -> usize {
        self.phase3_runs
    }

    pub fn allocation(&self) -> Allocation {
        Allocation::from_owners(self.n(), &self.owner).expect("owners lie in 0..n")
    }

    pub fn cost(&self, agent: usize, chore: usize) -> Ratio<S> {
        self.norm.cost(agent, chore)
    }

    /// Pain per buck `|v_i(c)| / p(c)`.
    pub fn pain_per_buck(&self, agent: usize, chore: usize) -> Ratio<S> {
        self.cost(agent, chore) / self.prices[chore].clone()
    }

    /// Minimum pain per buck over all chores, `None` when there are none.
    pub fn mpb(&self, agent: usize) -> Option<Ratio<S>> {
        (0..self.m()).map(|c| self.pain_per_buck(agent, c)).min()
    }

    pub fn spending(&self, agent: usize) -> Ratio<S> {
        self.bundles[agent]
            .iter()
            .fold(Ratio::zero(), |acc, &c| acc + self.prices[c].clone())
    }

    /// Spending minus the dearest owned chore; zero for an empty bundle.
    pub fn spending_upto1(&self, agent: usize) -> Ratio<S> {
        match self.bundles[agent].iter().map(|&c| &self.prices[c]).max() {
            Some(top) => self.spending(agent) - top.clone(),
            None => Ratio::zero(),
        }
    }

    /// Lowest-index agent of minimum spending, with that spending.
    pub fn least_spender(&self) -> (usize, Ratio<S>) {
        let mut best = (0, self.spending(0));
        for i in 1..self.n() {
            let s = self.spending(i);
            if s < best.1 {
                best = (i, s);
            }
        }
        best
    }

    pub fn least_spending(&self) -> Ratio<S> {
        self.least_spender().1
    }

    pub fn is_pef1(&self) -> bool {
        let least = self.least_spending();
        (0..self.n()).all(|i| self.spending_upto1(i) <= least)
    }

    /// Every owned chore has the owner's minimum pain per buck.
    pub fn check_equilibrium(&self) -> Result<()> {
        for i in 0..self.n() {
            let Some(mpb) = self.mpb(i) else { continue };
            if let Some(&c) = self.bundles[i].iter().find(|&&c| self.pain_per_buck(i, c) != mpb) {
                return Err(Error::Invariant(format!(
                    "not an equilibrium: chore {c} is not a minimum pain-per-buck chore of its owner {i}"
                )));
            }
        }
        Ok(())
    }

    pub(crate) fn log(&mut self, event: TraceEvent) {
        self.trace.push(event);
    }

    pub(crate) fn passed(&mut self, check: Check) {
        let iteration = self.iteration;
        self.log(TraceEvent::Assert { check, iteration });
    }

    pub(crate) fn transfer(&mut self, chore: usize, from: usize, to: usize, phase: Phase) -> Result<()> {
        if self.owner[chore] != from {
            return Err(Error::Invariant(format!(
                "chore {chore} moved from agent {from}, which does not own it"
            )));
        }
        let least_spending = self.least_spending().to_string();
        self.bundles[from].remove(&chore);
        self.bundles[to].insert(chore);
        self.owner[chore] = to;
        self.transfers += 1;
        self.log(TraceEvent::Transfer {
            phase,
            chore,
            from,
            to,
            least_spending,
        });
        self.check_equilibrium()
    }

    /// Sets several prices at once, then re-checks the equilibrium.
    pub(crate) fn reprice(&mut self, updates: Vec<(usize, Ratio<S>)>) -> Result<()> {
        for (chore, price) in updates {
            if price <= Ratio::zero() {
                return Err(Error::NonPositivePrice { item: chore });
            }
            let old = std::mem::replace(&mut self.prices[chore], price);
            let event = TraceEvent::Price {
                chore,
                from: old.to_string(),
                to: self.prices[chore].to_string(),
            };
            self.log(event);
        }
        self.check_equilibrium()
    }

    /// `1` for H-set agents and `1/p` for the rest, as required after a price drop.
    pub(crate) fn expected_mpb(&self, agent: usize) -> Ratio<S> {
        if self.in_h_sets(agent) {
            Ratio::one()
        } else {
            self.p().recip()
        }
    }
}
