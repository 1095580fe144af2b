use std::collections::VecDeque;

use num_rational::Ratio;

use super::state::MarketState;
use super::trace::{Check, Phase, TraceEvent};
use crate::classify::NormalizedChores;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Pain per buck `PB_i(c) = |v_i(c)| / p(c)`.
pub fn mpb_ratio<S: Scalar>(state: &MarketState<S>, agent: usize, chore: usize) -> Ratio<S> {
    state.pain_per_buck(agent, chore)
}

/// `agents[0] <-chores[0]- agents[1] <-chores[1]- ... agents[l]`: each
/// `chores[t]` is owned by `agents[t+1]` and is an MPB chore of `agents[t]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MpbPath {
    pub agents: Vec<usize>,
    pub chores: Vec<usize>,
}

impl MpbPath {
    pub fn len(&self) -> usize {
        self.chores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chores.is_empty()
    }

    pub fn end(&self) -> usize {
        *self.agents.last().expect("paths start at an agent")
    }

    /// Whether the path is valid in `state`.
    pub fn is_valid<S: Scalar>(&self, state: &MarketState<S>) -> bool {
        self.agents.len() == self.chores.len() + 1
            && self.chores.iter().enumerate().all(|(t, &c)| {
                let (from, to) = (self.agents[t], self.agents[t + 1]);
                state.owner(c) == to
                    && state.mpb(from).is_some_and(|mpb| state.pain_per_buck(from, c) == mpb)
            })
    }
}

/// Breadth-first search over MPB alternating edges from `sources`.
///
/// Returns agents in discovery order with the `(parent, chore)` edge that
/// reached each; sources have no edge. Neighbours are taken in agent order,
/// each through its lowest-index chore that is MPB for the parent.
fn bfs<S: Scalar>(state: &MarketState<S>, sources: &[usize]) -> Vec<(usize, Option<(usize, usize)>)> {
    let n = state.n();
    let mut seen = vec![false; n];
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    for &s in sources {
        if !seen[s] {
            seen[s] = true;
            order.push((s, None));
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        let Some(mpb) = state.mpb(u) else { continue };
        let unseen: Vec<usize> = (0..n).filter(|&w| !seen[w]).collect();
        for w in unseen {
            let edge = state
                .bundle(w)
                .iter()
                .copied()
                .find(|&c| state.pain_per_buck(u, c) == mpb);
            if let Some(c) = edge {
                seen[w] = true;
                order.push((w, Some((u, c))));
                queue.push_back(w);
            }
        }
    }
    order
}

/// Agents reachable from any of `sources` (sources included), ascending.
pub fn reachable<S: Scalar>(state: &MarketState<S>, sources: &[usize]) -> Vec<usize> {
    let mut agents: Vec<usize> = bfs(state, sources).into_iter().map(|(a, _)| a).collect();
    agents.sort_unstable();
    agents
}

/// A shortest MPB alternating path from `ls` to a violator, i.e. an agent
/// whose spending up to one chore exceeds `ls`'s spending.
pub fn find_violator_path<S: Scalar>(state: &MarketState<S>, ls: usize) -> Option<MpbPath> {
    let least = state.spending(ls);
    let order = bfs(state, &[ls]);
    let (target, _) = *order
        .iter()
        .find(|(a, _)| *a != ls && state.spending_upto1(*a) > least)?;
    let parent: std::collections::HashMap<usize, Option<(usize, usize)>> = order.into_iter().collect();
    let mut agents = vec![target];
    let mut chores = Vec::new();
    let mut at = target;
    while let Some((p, c)) = parent[&at] {
        chores.push(c);
        agents.push(p);
        at = p;
    }
    agents.reverse();
    chores.reverse();
    Some(MpbPath { agents, chores })
}

/// Each chore goes to the lowest-index agent finding it easiest, priced at
/// `p` times that agent's cost.
pub fn phase1_initialize<S: Scalar>(norm: &NormalizedChores<S>) -> Result<MarketState<S>> {
    let (n, m) = (norm.n(), norm.m());
    if n == 0 {
        return Err(Error::EmptyAgents);
    }
    let p = norm.ratio().clone();
    if p <= Ratio::from_integer(S::one()) {
        return Err(Error::Invariant(format!("bivalue ratio {p} is not above 1")));
    }
    let mut owner = Vec::with_capacity(m);
    let mut prices = Vec::with_capacity(m);
    for c in 0..m {
        let best = (1..n).fold(0, |b, i| if norm.cost(i, c) < norm.cost(b, c) { i } else { b });
        prices.push(p.clone() * norm.cost(best, c));
        owner.push(best);
    }
    let mut state = MarketState::new(norm.clone(), owner, prices);
    state.log(TraceEvent::Init {
        n,
        m,
        p: p.to_string(),
        owners: state.owner.clone(),
        prices: state.prices.iter().map(ToString::to_string).collect(),
    });
    state.log(TraceEvent::Phase {
        phase: Phase::Init,
        iteration: 1,
    });
    state.check_equilibrium()?;
    let expected = p.recip();
    if let Some(i) = (0..n).find(|&i| state.mpb(i).is_some_and(|mpb| mpb != expected)) {
        return Err(Error::Invariant(format!("agent {i} does not start at MPB 1/p")));
    }
    Ok(state)
}

fn argmax_upto1<S: Scalar>(state: &MarketState<S>, agents: &[usize]) -> usize {
    let mut best = agents[0];
    let mut best_val = state.spending_upto1(best);
    for &i in &agents[1..] {
        let v = state.spending_upto1(i);
        if v > best_val || (v == best_val && i < best) {
            best = i;
            best_val = v;
        }
    }
    best
}

fn argmin_spending<S: Scalar>(state: &MarketState<S>, agents: &[usize]) -> usize {
    let mut best = agents[0];
    let mut best_val = state.spending(best);
    for &i in &agents[1..] {
        let v = state.spending(i);
        if v < best_val || (v == best_val && i < best) {
            best = i;
            best_val = v;
        }
    }
    best
}

/// Moves non-entitled chores from earlier H-sets to later ones until no
/// agent of `H_l` out-spends, up to one chore, the least spender of
/// `H_{l+1} ∪ ... ∪ H_{k-1}`, for `l = k-2` down to `1`.
pub fn phase2a<S: Scalar>(state: &mut MarketState<S>) -> Result<()> {
    let k = state.iteration;
    state.log(TraceEvent::Phase {
        phase: Phase::Rebalance,
        iteration: k,
    });
    for l in (1..k.saturating_sub(1)).rev() {
        let group = state.h_sets[l - 1].clone();
        let later: Vec<usize> = state.h_sets[l..k - 1].iter().flatten().copied().collect();
        let mut moved = 0;
        loop {
            let i = argmax_upto1(state, &group);
            let j = argmin_spending(state, &later);
            if state.spending_upto1(i) <= state.spending(j) {
                break;
            }
            let free: Vec<usize> = state
                .bundle(i)
                .iter()
                .copied()
                .filter(|c| !state.entitled(i).contains(c))
                .collect();
            let Some(&c) = free.first() else {
                return Err(Error::Invariant(format!(
                    "H2: agent {i} has no non-entitled chore to give in iteration {k}"
                )));
            };
            let mpb_j = state.mpb(j).expect("a chore exists");
            if let Some(&bad) = free.iter().find(|&&c| state.pain_per_buck(j, c) != mpb_j) {
                return Err(Error::Invariant(format!(
                    "H2: non-entitled chore {bad} of agent {i} is not MPB for agent {j}"
                )));
            }
            state.passed(Check::H2);
            state.transfer(c, i, j, Phase::Rebalance)?;
            moved += 1;
            if moved > state.m() {
                return Err(Error::Invariant(format!(
                    "more than m transfers out of H_{l} in one rebalancing pass"
                )));
            }
        }
    }
    Ok(())
}

/// Safety cap on transfers in one run of the path phase.
///
/// While the least spender stays the same, a potential bounded by
/// `m n^2 + m` drops on every transfer. An agent can become least spender
/// again only after its cost strictly dropped, and a bivalued cost is fixed
/// by two counts in `0..=m`, so there are at most `n (m+1)^2` changes.
pub fn phase2b_step_bound(n: usize, m: usize) -> usize {
    (m * n * n + m + 1) * (n * (m + 1) * (m + 1) + 1)
}

/// Pushes chores along shortest MPB alternating paths toward a least spender
/// while some least spender reaches a violator; tied least spenders are tried
/// in index order. Returns whether the result is pEF1.
pub fn phase2b<S: Scalar>(state: &mut MarketState<S>) -> Result<bool> {
    state.log(TraceEvent::Phase {
        phase: Phase::Paths,
        iteration: state.iteration,
    });
    let bound = phase2b_step_bound(state.n(), state.m());
    let mut floor = state.least_spending();
    let mut steps = 0;
    loop {
        let least = state.least_spending();
        if least < floor {
            return Err(Error::Invariant(format!(
                "least spending fell from {floor} to {least} during the path phase"
            )));
        }
        floor = least.clone();
        // any least spender may serve; stopping needs all of them violator-free
        let path = (0..state.n())
            .filter(|&i| state.spending(i) == least)
            .find_map(|ls| find_violator_path(state, ls));
        let Some(path) = path else { break };
        let l = path.len();
        let (from, to) = (path.agents[l], path.agents[l - 1]);
        state.transfer(path.chores[l - 1], from, to, Phase::Paths)?;
        steps += 1;
        if steps > bound {
            return Err(Error::Invariant(format!(
                "path phase exceeded its bound of {bound} transfers"
            )));
        }
    }
    let done = state.is_pef1();
    if done {
        state.passed(Check::Pef1);
    }
    Ok(done)
}

/// Lowers prices of the chores held by every agent reachable from a least
/// spender, making those agents the next H-set.
pub fn phase3<S: Scalar>(state: &mut MarketState<S>) -> Result<()> {
    let k = state.iteration;
    state.log(TraceEvent::Phase {
        phase: Phase::PriceDrop,
        iteration: k,
    });
    let n = state.n();
    let least = state.least_spending();
    let spenders: Vec<usize> = (0..n).filter(|&i| state.spending(i) == least).collect();
    let h_k = reachable(state, &spenders);

    if let Some(&i) = h_k.iter().find(|&&i| state.in_h_sets(i)) {
        return Err(Error::Invariant(format!(
            "H1: agent {i} of H_{k} already belongs to an earlier H-set"
        )));
    }
    state.passed(Check::H1);

    let in_new = {
        let mut v = vec![false; n];
        for &i in &h_k {
            v[i] = true;
        }
        v
    };
    if let Some(i) = (0..n)
        .filter(|&i| state.in_h_sets(i) || in_new[i])
        .find(|&i| state.spending_upto1(i) > least)
    {
        return Err(Error::Invariant(format!(
            "H3: agent {i} is a violator before the price drop of iteration {k}"
        )));
    }
    state.passed(Check::H3);

    let mut alpha: Option<Ratio<S>> = None;
    for &i in &h_k {
        let mpb = state.mpb(i).expect("chores exist when prices drop");
        for c in (0..state.m()).filter(|&c| !in_new[state.owner(c)]) {
            let ratio = state.pain_per_buck(i, c) / mpb.clone();
            if alpha.as_ref().is_none_or(|a| ratio < *a) {
                alpha = Some(ratio);
            }
        }
    }
    let alpha = alpha.ok_or_else(|| {
        Error::Invariant(format!("H_{k} owns every chore, so no price drop is defined"))
    })?;
    if alpha != *state.p() {
        return Err(Error::Invariant(format!(
            "H5: price-drop factor {alpha} differs from p = {}",
            state.p()
        )));
    }
    state.passed(Check::H5);
    state.log(TraceEvent::HSet {
        iteration: k,
        agents: h_k.clone(),
        alpha: alpha.to_string(),
    });

    let mut updates = Vec::new();
    for &i in &h_k {
        state.entitled[i] = state.bundles[i].clone();
        state.h_index[i] = Some(k);
        for &c in &state.bundles[i] {
            updates.push((c, state.prices[c].clone() / alpha.clone()));
        }
    }
    state.h_sets.push(h_k);
    state.reprice(updates)?;
    state.phase3_runs += 1;
    if state.phase3_runs > n {
        return Err(Error::Invariant(format!(
            "{} price drops for {n} agents",
            state.phase3_runs
        )));
    }
    check_after_drop(state)?;
    state.iteration += 1;
    Ok(())
}

fn check_after_drop<S: Scalar>(state: &mut MarketState<S>) -> Result<()> {
    let k = state.iteration;
    let n = state.n();
    for i in (0..n).filter(|&i| state.in_h_sets(i)) {
        if !state.entitled(i).is_subset(state.bundle(i)) {
            return Err(Error::Invariant(format!(
                "H4: agent {i} lost an entitled chore by iteration {k}"
            )));
        }
    }
    state.passed(Check::H4);

    let one = Ratio::from_integer(S::one());
    for c in 0..state.m() {
        let price = &state.prices[c];
        if *price != one && price != state.p() {
            return Err(Error::Invariant(format!(
                "H6: chore {c} is priced {price} after iteration {k}"
            )));
        }
        let owner = state.owner(c);
        if *price == one && !(state.in_h_sets(owner) && state.entitled(owner).contains(&c)) {
            return Err(Error::Invariant(format!(
                "H6: chore {c} is priced 1 but is not entitled to its owner"
            )));
        }
    }
    state.passed(Check::H6);

    for i in 0..n {
        let mpb = state.mpb(i).expect("chores exist when prices drop");
        if mpb != state.expected_mpb(i) {
            return Err(Error::Invariant(format!(
                "H7: agent {i} has MPB {mpb} after iteration {k}"
            )));
        }
    }
    state.passed(Check::H7);
    Ok(())
}
