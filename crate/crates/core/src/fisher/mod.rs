//! EF1 + PO allocations of bivalued chores through Fisher-market equilibria.
//!
//! The solver keeps an equilibrium (every agent holds only chores of minimum
//! pain per buck) and moves chores or lowers prices until the prices are
//! envy-free up to one chore. Every invariant the correctness argument relies
//! on is checked at runtime and logged; a failed check aborts with
//! [`Error::Invariant`](crate::Error::Invariant).

mod phases;
mod state;
pub mod trace;

pub use phases::{
    find_violator_path, mpb_ratio, phase1_initialize, phase2a, phase2b, phase2b_step_bound,
    phase3, reachable, MpbPath,
};
pub use state::MarketState;
pub use trace::{Check, Phase, TraceEvent};

use num_rational::Ratio;

use crate::classify::normalize_bivalued_chores;
use crate::error::{Error, Result};
use crate::fairness::{is_ef1, is_pef1};
use crate::instance::{Allocation, Instance};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FisherOutcome<S: Scalar> {
    pub allocation: Allocation,
    /// Final prices, in normalized units.
    pub prices: Vec<Ratio<S>>,
    pub p: Ratio<S>,
    /// `H_1, ..., H_{k-1}` at termination.
    pub h_sets: Vec<Vec<usize>>,
    pub phase3_runs: usize,
    pub trace: Vec<TraceEvent>,
}

impl<S: Scalar> FisherOutcome<S> {
    pub fn trace_lines(&self) -> String {
        trace::to_json_lines(&self.trace)
    }
}

/// Runs the market to a price-EF1 equilibrium from a fresh initial state.
pub fn run_market<S: Scalar>(mut state: MarketState<S>) -> Result<MarketState<S>> {
    loop {
        phase2a(&mut state)?;
        if phase2b(&mut state)? {
            break;
        }
        phase3(&mut state)?;
    }
    let event = TraceEvent::Done {
        iterations: state.iteration(),
        phase3_runs: state.phase3_runs(),
        transfers: state.transfers,
    };
    state.log(event);
    Ok(state)
}

/// An EF1 and PO allocation of a bivalued chore instance.
pub fn solve_ef1_po<S: Scalar>(inst: &Instance<S>) -> Result<FisherOutcome<S>> {
    let norm = normalize_bivalued_chores(inst)?;
    let state = run_market(phase1_initialize(&norm)?)?;
    let allocation = state.allocation();
    if !is_pef1(&allocation, state.prices())?.holds {
        return Err(Error::Invariant("market stopped without price-EF1".into()));
    }
    if let Some(w) = is_ef1(inst, &allocation)?.witness {
        return Err(Error::Invariant(format!(
            "price-EF1 equilibrium is not EF1: {w:?}"
        )));
    }
    Ok(FisherOutcome {
        allocation,
        prices: state.prices().to_vec(),
        p: state.p().clone(),
        h_sets: state.h_sets().to_vec(),
        phase3_runs: state.phase3_runs(),
        trace: state.trace().to_vec(),
    })
}
