use std::fs;
use std::io::Read;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use fairdiv::classify::classify;
use fairdiv::fairness::{is_ef, is_ef1, is_mms_alloc, is_pef1, FairnessReport, Property, Witness};
use fairdiv::fisher::solve_ef1_po;
use fairdiv::fixtures::run_fixtures;
use fairdiv::gen::{generate, GenSpec};
use fairdiv::io::{bundles_to_json, instance_to_json, parse_allocation, parse_instance, ratio_to_json, scalar_to_json};
use fairdiv::mms::{self, mms_partition, solve_mms};
use fairdiv::oracle::{exact_mms, is_po_bruteforce, EnumerationBudget};
use fairdiv::pareto::{find_pareto_improvement, solve_mms_po};
use fairdiv::{Allocation, Error, Instance, Scalar};
use serde_json::{json, Map, Value};

use crate::{CheckArgs, CheckProperty, GenArgs, Method, MmsValueArgs, SolveArgs};

pub enum Status {
    Pass,
    Fail,
}

impl From<Status> for ExitCode {
    fn from(status: Status) -> Self {
        match status {
            Status::Pass => ExitCode::SUCCESS,
            Status::Fail => ExitCode::from(1),
        }
    }
}

impl From<bool> for Status {
    fn from(holds: bool) -> Self {
        if holds {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// 3 for class or method mismatches, 4 for broken invariants, 2 otherwise.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(e) if e.is_class_mismatch() => 3,
        Some(e) if e.is_invariant() => 4,
        _ => 2,
    }
}

fn read_text(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text).context("reading standard input")?;
        Ok(text)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn read_instance<S: Scalar>(path: &Path) -> Result<Instance<S>> {
    let text = read_text(path)?;
    parse_instance(&text).with_context(|| format!("parsing instance {}", path.display()))
}

fn print(doc: &Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(doc)?);
    Ok(())
}

fn with_method(mut report: Value, method: &str) -> Value {
    if let Value::Object(obj) = &mut report {
        obj.insert("method".into(), Value::from(method));
    }
    report
}

/// PO by exhaustive search when it fits the budget, by cycle search otherwise.
fn po_report<S: Scalar>(inst: &Instance<S>, alloc: &Allocation, oracle_only: bool) -> Result<(FairnessReport<S>, &'static str)> {
    let budget = EnumerationBudget::default();
    if oracle_only || budget.fits(inst.n(), inst.m()) {
        return Ok((is_po_bruteforce(inst, alloc, budget)?, "oracle"));
    }
    let report = match find_pareto_improvement(inst, alloc)? {
        None => FairnessReport::pass(Property::Po),
        Some((_, by)) => FairnessReport::fail(Property::Po, Witness::Dominated { by }),
    };
    Ok((report, "cycle-search"))
}

fn mms_certificate<S: Scalar>(inst: &Instance<S>, alloc: &Allocation, shares: &[S]) -> Result<(Value, bool)> {
    let report = is_mms_alloc(inst, alloc, shares)?;
    let mut agents = Map::new();
    for (i, share) in shares.iter().enumerate() {
        agents.insert(
            inst.agent_names()[i].clone(),
            json!({
                "value": scalar_to_json(&inst.bundle_value(i, alloc.bundle(i))),
                "share": scalar_to_json(share),
            }),
        );
    }
    let mut doc = report.to_json(inst);
    doc["agents"] = Value::Object(agents);
    Ok((doc, report.holds))
}

pub fn solve<S: Scalar>(args: &SolveArgs) -> Result<Status> {
    let inst: Instance<S> = read_instance(&args.input.instance)?;
    if args.trace.is_some() && args.method != Method::Ef1po {
        bail!("--trace is only produced by --method ef1po");
    }
    let mut doc = Map::new();
    let mut certificates = Map::new();
    let mut valid = true;
    let method = match args.method {
        Method::Ef1po => "ef1po",
        Method::Mms => "mms",
        Method::Mmspo => "mmspo",
    };
    doc.insert("method".into(), Value::from(method));
    let classes: Vec<&str> = classify(&inst).tags().iter().map(|t| t.as_str()).collect();
    doc.insert("classes".into(), Value::from(classes));

    let alloc = match args.method {
        Method::Ef1po => {
            let out = solve_ef1_po(&inst)?;
            if let Some(path) = &args.trace {
                fs::write(path, out.trace_lines()).with_context(|| format!("writing {}", path.display()))?;
            }
            let ef1 = is_ef1(&inst, &out.allocation)?;
            let pef1 = is_pef1(&out.allocation, &out.prices)?;
            let (po, how) = po_report(&inst, &out.allocation, false)?;
            valid &= ef1.holds && pef1.holds && po.holds;
            certificates.insert("ef1".into(), ef1.to_json(&inst));
            certificates.insert("pef1".into(), pef1.to_json(&inst));
            certificates.insert("po".into(), with_method(po.to_json(&inst), how));
            let prices: Map<String, Value> = out
                .prices
                .iter()
                .enumerate()
                .map(|(r, price)| (inst.item_names()[r].clone(), ratio_to_json(price)))
                .collect();
            doc.insert("p".into(), ratio_to_json(&out.p));
            doc.insert("prices".into(), Value::Object(prices));
            out.allocation
        }
        Method::Mms => {
            let out = solve_mms(&inst)?;
            let (mms, holds) = mms_certificate(&inst, &out.allocation, &out.shares)?;
            valid &= holds;
            certificates.insert("mms".into(), mms);
            doc.insert("rule".into(), Value::from(out.class.as_str()));
            out.allocation
        }
        Method::Mmspo => {
            let out = solve_mms_po(&inst)?;
            let (mms, holds) = mms_certificate(&inst, &out.allocation, &out.mms.shares)?;
            let (po, how) = po_report(&inst, &out.allocation, false)?;
            valid &= holds && po.holds;
            certificates.insert("mms".into(), mms);
            certificates.insert("po".into(), with_method(po.to_json(&inst), how));
            doc.insert("improvements".into(), Value::from(out.chain.steps.len()));
            out.allocation
        }
    };
    doc.insert("bundles".into(), bundles_to_json(&inst, &alloc));
    doc.insert("certificates".into(), Value::Object(certificates));
    if !valid {
        eprintln!("{}", serde_json::to_string_pretty(&Value::Object(doc))?);
        return Err(Error::Invariant(format!("{method} output failed its certificate checks")).into());
    }
    print(&Value::Object(doc))?;
    Ok(Status::Pass)
}

fn shares<S: Scalar>(inst: &Instance<S>, oracle: bool) -> Result<Vec<S>> {
    let n = inst.n();
    inst.rows()
        .iter()
        .map(|row| {
            if oracle {
                Ok(exact_mms(row, n, EnumerationBudget::default())?.0)
            } else {
                Ok(mms::mms_value(row, n)?)
            }
        })
        .collect()
}

pub fn check<S: Scalar>(args: &CheckArgs) -> Result<Status> {
    let inst: Instance<S> = read_instance(&args.input.instance)?;
    let text = read_text(&args.allocation)?;
    let alloc = parse_allocation(&text, &inst)
        .with_context(|| format!("parsing allocation {}", args.allocation.display()))?;
    let (doc, holds) = match args.property {
        CheckProperty::Ef1 => {
            let r = is_ef1(&inst, &alloc)?;
            (r.to_json(&inst), r.holds)
        }
        CheckProperty::Ef => {
            let r = is_ef(&inst, &alloc)?;
            (r.to_json(&inst), r.holds)
        }
        CheckProperty::Mms => {
            let shares = shares(&inst, args.oracle)?;
            mms_certificate(&inst, &alloc, &shares)?
        }
        CheckProperty::Po => {
            let (r, how) = po_report(&inst, &alloc, args.oracle)?;
            (with_method(r.to_json(&inst), how), r.holds)
        }
    };
    print(&doc)?;
    Ok(holds.into())
}

pub fn mms_value<S: Scalar>(args: &MmsValueArgs) -> Result<Status> {
    let inst: Instance<S> = read_instance(&args.input.instance)?;
    let agent = match inst.agent_index(&args.agent) {
        Some(i) => i,
        None => match args.agent.parse::<usize>() {
            Ok(i) if i < inst.n() => i,
            _ => bail!(Error::UnknownName {
                what: "agent",
                name: args.agent.clone(),
            }),
        },
    };
    let k = args.bundles.unwrap_or(inst.n());
    let row = inst.row(agent);
    let partition = if args.oracle {
        exact_mms(row, k, EnumerationBudget::default())?.1
    } else {
        mms_partition(row, k)?
    };
    let names = |bundle: &Vec<usize>| -> Vec<String> { bundle.iter().map(|&r| inst.item_names()[r].clone()).collect() };
    let doc = json!({
        "agent": inst.agent_names()[agent],
        "bundles": k,
        "value": scalar_to_json(partition.min_value()),
        "partition": partition.bundles().iter().map(names).collect::<Vec<_>>(),
        "method": if args.oracle { "oracle" } else { "greedy" },
    });
    print(&doc)?;
    Ok(Status::Pass)
}

pub fn gen(args: &GenArgs) -> Result<Status> {
    let mut spec = GenSpec::new(args.class, args.kind, args.n, args.m, args.seed);
    spec.params.p = args.p;
    spec.params.tiers = args.tiers;
    if let Some(v) = args.max_value {
        spec.params.max_value = v;
    }
    let inst: Instance<i64> = generate(&spec)?;
    print(&instance_to_json(&inst))?;
    Ok(Status::Pass)
}

pub fn fixtures() -> Result<Status> {
    let results = run_fixtures();
    let passed = results.iter().filter(|r| r.passed).count();
    for r in &results {
        let tag = if r.passed { "PASS" } else { "FAIL" };
        println!("{tag} {}: {}", r.name, r.detail);
    }
    println!("{passed}/{} fixtures passed", results.len());
    Ok((passed == results.len()).into())
}
