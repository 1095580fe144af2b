//! Event log of a market run, one JSON object per line.

use serde::{Deserialize, Serialize};

/// Phase label as written in the log: `"1"`, `"2a"`, `"2b"` or `"3"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    #[serde(rename = "1")]
    Init,
    #[serde(rename = "2a")]
    Rebalance,
    #[serde(rename = "2b")]
    Paths,
    #[serde(rename = "3")]
    PriceDrop,
}

/// Named runtime checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Check {
    /// New H-set is disjoint from the earlier ones.
    H1,
    /// A non-entitled chore is available and every such chore is MPB for the receiver.
    H2,
    /// No agent of any H-set is a violator right before a price drop.
    H3,
    /// Every H-set agent still owns its entitled chores.
    H4,
    /// The price-drop factor equals `p`.
    H5,
    /// Prices lie in `{1, p}` and price-1 chores are entitled.
    H6,
    /// MPB ratios are `1` on H-set agents and `1/p` elsewhere.
    H7,
    /// The final state is price-EF1.
    #[serde(rename = "pEF1")]
    Pef1,
}

/// Rationals are written with `Display` (`"3/2"`, `"4"`); agents and chores are 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "lowercase")]
pub enum TraceEvent {
    Init {
        n: usize,
        m: usize,
        p: String,
        owners: Vec<usize>,
        prices: Vec<String>,
    },
    Phase {
        phase: Phase,
        iteration: usize,
    },
    Transfer {
        phase: Phase,
        chore: usize,
        from: usize,
        to: usize,
        /// Least spending just before the move.
        least_spending: String,
    },
    Price {
        chore: usize,
        from: String,
        to: String,
    },
    #[serde(rename = "hset")]
    HSet {
        iteration: usize,
        agents: Vec<usize>,
        alpha: String,
    },
    Assert {
        check: Check,
        iteration: usize,
    },
    Done {
        iterations: usize,
        phase3_runs: usize,
        transfers: usize,
    },
}

/// One JSON document per line, newline terminated.
pub fn to_json_lines(events: &[TraceEvent]) -> String {
    let mut out = String::new();
    for e in events {
        out.push_str(&serde_json::to_string(e).expect("trace events serialize"));
        out.push('\n');
    }
    out
}

pub fn from_json_lines(text: &str) -> Result<Vec<TraceEvent>, serde_json::Error> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect()
}
