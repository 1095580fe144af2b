//! Small worked instances with known answers, and a runner that checks them.

use crate::classify::ClassTag;
use crate::error::Result;
use crate::fairness::{is_ef1, Witness};
use crate::fisher::solve_ef1_po;
use crate::instance::{Allocation, Instance, Kind};
use crate::mms::{
    cut_profile_pbv, first_bad_cut, greedy_partition, mms_partition_factored, mms_value_factored,
    select_reduction, Placement,
};
use crate::oracle::{exact_mms, is_po_bruteforce, EnumerationBudget};

/// Factored goods row whose 4-way maximin share is 8.
pub const GREEDY_ROW: [i64; 9] = [12, 6, 6, 3, 3, 3, 3, 1, 1];
pub const GREEDY_BUNDLES: usize = 4;
pub const GREEDY_MMS: i64 = 8;
/// Bundle receiving each item of [`GREEDY_ROW`], in placement order.
pub const GREEDY_PLACEMENTS: [usize; 9] = [0, 1, 2, 3, 3, 1, 2, 3, 3];

/// Non-factored row on which the greedy reaches only 5 of the true share 6.
pub const NON_FACTORED_ROW: [i64; 5] = [3, 3, 2, 2, 2];
pub const NON_FACTORED_MMS: i64 = 6;
pub const NON_FACTORED_GREEDY: i64 = 5;

/// Ordered weakly lexicographic rows, three agents.
pub const WOLEX_ROWS: [[i64; 9]; 3] = [
    [81, 81, 81, 81, 9, 9, 9, 1, 1],
    [81, 81, 81, 9, 9, 9, 1, 1, 1],
    [729, 81, 81, 81, 9, 9, 9, 1, 1],
];
pub const WOLEX_BAD_CUTS: [usize; 3] = [4, 9, 1];

/// Ordered factored personalized bivalued rows, three agents.
pub const PBV_ROWS: [[i64; 9]; 3] = [
    [2, 2, 2, 2, 1, 1, 1, 1, 1],
    [5, 1, 1, 1, 1, 1, 1, 1, 1],
    [4, 4, 4, 4, 4, 4, 4, 4, 1],
];
/// `(C, AC, T_idle)` per agent of [`PBV_ROWS`].
pub const PBV_PROFILES: [(usize, usize, usize); 3] = [(4, 2, 4), (1, 2, 8), (8, 1, 1)];

/// Expected `(agent, positions)` of the first reduction, 0-based.
pub const WOLEX_GOODS_REDUCTION: (usize, &[usize]) = (2, &[0]);
pub const WOLEX_CHORES_REDUCTION: (usize, &[usize]) = (1, &[0, 3, 6]);
pub const PBV_GOODS_REDUCTION: (usize, &[usize]) = (1, &[0]);
pub const PBV_CHORES_REDUCTION: (usize, &[usize]) = (0, &[0, 3, 6]);

/// Bivalued chores, `p = 4`, on which the product-of-costs rule subject to PO is not EF1.
pub const PRODUCT_RULE_ROWS: [[i64; 8]; 4] = [
    [-4, -4, -1, -1, -1, -1, -1, -1],
    [-4, -4, -1, -1, -4, -4, -4, -4],
    [-4, -4, -4, -4, -1, -1, -4, -4],
    [-4, -4, -4, -4, -4, -4, -1, -1],
];
pub const PRODUCT_RULE_BUNDLES: [&[usize]; 4] = [&[4, 5, 6, 7], &[2, 3], &[1], &[0]];
/// Agent 0 envies agent 1 even up to one chore.
pub const PRODUCT_RULE_WITNESS: (usize, usize) = (0, 1);

fn rows<const M: usize>(rows: &[[i64; M]], kind: Kind) -> Vec<Vec<i64>> {
    let sign = if kind == Kind::Goods { 1 } else { -1 };
    rows.iter().map(|r| r.iter().map(|v| sign * v).collect()).collect()
}

pub fn wolex_instance(kind: Kind) -> Instance<i64> {
    Instance::new(kind, rows(&WOLEX_ROWS, kind)).expect("fixture is well formed")
}

pub fn pbv_instance(kind: Kind) -> Instance<i64> {
    Instance::new(kind, rows(&PBV_ROWS, kind)).expect("fixture is well formed")
}

pub fn product_rule_instance() -> Instance<i64> {
    let rows = PRODUCT_RULE_ROWS.iter().map(|r| r.to_vec()).collect();
    Instance::new(Kind::Chores, rows).expect("fixture is well formed")
}

pub fn product_rule_allocation() -> Allocation {
    let bundles = PRODUCT_RULE_BUNDLES.iter().map(|b| b.to_vec()).collect();
    Allocation::from_bundles(bundles, 8).expect("fixture is well formed")
}

/// Outcome of one fixture check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixtureResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &'static str, check: Result<std::result::Result<String, String>>) -> FixtureResult {
    let (passed, detail) = match check {
        Ok(Ok(d)) => (true, d),
        Ok(Err(d)) => (false, d),
        Err(e) => (false, format!("error: {e}")),
    };
    FixtureResult { name, passed, detail }
}

fn expect<T: PartialEq + std::fmt::Debug>(what: &str, got: T, want: T) -> std::result::Result<String, String> {
    if got == want {
        Ok(format!("{what} = {got:?}"))
    } else {
        Err(format!("{what} = {got:?}, expected {want:?}"))
    }
}

fn greedy_fixture() -> Result<std::result::Result<String, String>> {
    let value = mms_value_factored(&GREEDY_ROW, GREEDY_BUNDLES)?;
    if value != GREEDY_MMS {
        return Ok(Err(format!("share = {value}, expected {GREEDY_MMS}")));
    }
    let run = greedy_partition(&GREEDY_ROW, GREEDY_BUNDLES)?;
    let placements: Vec<Placement> = GREEDY_PLACEMENTS
        .iter()
        .enumerate()
        .map(|(item, &bundle)| Placement { item, bundle })
        .collect();
    Ok(expect("share and placements", (value, run.placements), (GREEDY_MMS, placements)))
}

fn non_factored_fixture() -> Result<std::result::Result<String, String>> {
    let (exact, _) = exact_mms(&NON_FACTORED_ROW, 2, EnumerationBudget::default())?;
    let rejected = mms_partition_factored(&NON_FACTORED_ROW, 2).is_err();
    let greedy = greedy_partition(&NON_FACTORED_ROW, 2)?.partition.min_value().to_owned();
    Ok(expect(
        "(exact share, rejected, greedy share)",
        (exact, rejected, greedy),
        (NON_FACTORED_MMS, true, NON_FACTORED_GREEDY),
    ))
}

fn cuts_fixture() -> Result<std::result::Result<String, String>> {
    let cuts: Vec<usize> = WOLEX_ROWS.iter().map(|r| first_bad_cut(r, 3)).collect();
    Ok(expect("bad cuts", cuts, WOLEX_BAD_CUTS.to_vec()))
}

fn profiles_fixture() -> Result<std::result::Result<String, String>> {
    let profiles = PBV_ROWS
        .iter()
        .map(|r| cut_profile_pbv(r, 3).map(|p| (p.c, p.ac, p.t_idle)))
        .collect::<Result<Vec<_>>>()?;
    Ok(expect("(C, AC, idle)", profiles, PBV_PROFILES.to_vec()))
}

fn reduction_fixture(
    inst: Instance<i64>,
    class: ClassTag,
    want: (usize, &[usize]),
) -> Result<std::result::Result<String, String>> {
    let r = select_reduction(&inst, class)?;
    Ok(expect("reduction", (r.agent, r.bundle), (want.0, want.1.to_vec())))
}

fn product_rule_envy() -> Result<std::result::Result<String, String>> {
    let report = is_ef1(&product_rule_instance(), &product_rule_allocation())?;
    let (envious, envied) = PRODUCT_RULE_WITNESS;
    Ok(expect(
        "EF1 verdict",
        (report.holds, report.witness),
        (false, Some(Witness::Envy { envious, envied })),
    ))
}

fn product_rule_solved() -> Result<std::result::Result<String, String>> {
    let inst = product_rule_instance();
    let out = solve_ef1_po(&inst)?;
    let ef1 = is_ef1(&inst, &out.allocation)?.holds;
    let po = is_po_bruteforce(&inst, &out.allocation, EnumerationBudget::default())?.holds;
    Ok(expect("(EF1, PO) of the market allocation", (ef1, po), (true, true)))
}

/// Runs every fixture check, in a fixed order.
pub fn run_fixtures() -> Vec<FixtureResult> {
    vec![
        outcome("greedy-share", greedy_fixture()),
        outcome("non-factored-greedy", non_factored_fixture()),
        outcome("wolex-bad-cuts", cuts_fixture()),
        outcome("pbv-idle-times", profiles_fixture()),
        outcome(
            "wolex-reduction-goods",
            reduction_fixture(wolex_instance(Kind::Goods), ClassTag::WeaklyLexicographic, WOLEX_GOODS_REDUCTION),
        ),
        outcome(
            "wolex-reduction-chores",
            reduction_fixture(wolex_instance(Kind::Chores), ClassTag::WeaklyLexicographic, WOLEX_CHORES_REDUCTION),
        ),
        outcome(
            "pbv-reduction-goods",
            reduction_fixture(pbv_instance(Kind::Goods), ClassTag::FactoredPersonalizedBivalued, PBV_GOODS_REDUCTION),
        ),
        outcome(
            "pbv-reduction-chores",
            reduction_fixture(pbv_instance(Kind::Chores), ClassTag::FactoredPersonalizedBivalued, PBV_CHORES_REDUCTION),
        ),
        outcome("product-rule-not-ef1", product_rule_envy()),
        outcome("product-rule-market-solution", product_rule_solved()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_fixtures_pass() {
        for r in run_fixtures() {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
    }
}
