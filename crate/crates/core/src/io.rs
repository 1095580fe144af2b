//! JSON documents for instances and allocations.
//!
//! Instance: `{"kind": "goods"|"chores", "agents": [...], "items": [...], "valuations": [[...]]}`
//! with `kind`, `agents` and `items` optional. Allocation: `{"bundles": {agent: [item, ...]}, ...}`.
//! Valuations outside the `i64` range are written as decimal strings, and
//! decimal strings are accepted wherever an integer is expected.

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::instance::{Allocation, Instance, Kind};
use crate::scalar::Scalar;
use num_rational::Ratio;

fn doc_err(msg: impl Into<String>) -> Error {
    Error::Document(msg.into())
}

fn parse_scalar<S: Scalar>(value: &Value, row: usize, col: usize) -> Result<S> {
    let parsed = match value {
        Value::Number(num) => {
            if let Some(v) = num.as_i64() {
                S::from_i64(v)
            } else if let Some(v) = num.as_u64() {
                S::from_u64(v)
            } else {
                None
            }
        }
        Value::String(s) => S::from_str_radix(s.trim(), 10).ok(),
        _ => None,
    };
    parsed.ok_or(Error::NonInteger { row, col })
}

fn parse_names(obj: &Map<String, Value>, key: &str) -> Result<Option<Vec<String>>> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::Array(names)) => names
            .iter()
            .map(|n| {
                n.as_str()
                    .map(str::to_owned)
                    .ok_or_else(|| doc_err(format!("{key} must be strings")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Some),
        Some(_) => Err(doc_err(format!("{key} must be an array"))),
    }
}

pub fn parse_instance<S: Scalar>(text: &str) -> Result<Instance<S>> {
    let doc: Value = serde_json::from_str(text).map_err(|e| doc_err(e.to_string()))?;
    instance_from_value(&doc)
}

pub fn instance_from_value<S: Scalar>(doc: &Value) -> Result<Instance<S>> {
    let obj = doc
        .as_object()
        .ok_or_else(|| doc_err("instance document must be an object"))?;
    let kind = match obj.get("kind") {
        None | Some(Value::Null) => None,
        Some(Value::String(k)) => Some(k.parse::<Kind>()?),
        Some(_) => return Err(doc_err("kind must be a string")),
    };
    let rows = obj
        .get("valuations")
        .ok_or_else(|| doc_err("missing valuations"))?
        .as_array()
        .ok_or_else(|| doc_err("valuations must be an array of arrays"))?;
    let valuations = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.as_array()
                .ok_or_else(|| doc_err(format!("valuation row {i} is not an array")))?
                .iter()
                .enumerate()
                .map(|(r, v)| parse_scalar(v, i, r))
                .collect::<Result<Vec<S>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let inst = match kind {
        Some(kind) => Instance::new(kind, valuations)?,
        None => Instance::from_rows(valuations)?,
    };
    let agents = parse_names(obj, "agents")?;
    let items = parse_names(obj, "items")?;
    if agents.is_none() && items.is_none() {
        return Ok(inst);
    }
    let agents = agents.unwrap_or_else(|| inst.agent_names().to_vec());
    let items = items.unwrap_or_else(|| inst.item_names().to_vec());
    inst.with_names(agents, items)
}

pub fn scalar_to_json<S: Scalar>(value: &S) -> Value {
    match value.to_i64() {
        Some(v) => Value::from(v),
        None => Value::String(value.to_string()),
    }
}

/// Integers as JSON numbers when they fit, everything else as `"num/den"`.
pub fn ratio_to_json<S: Scalar>(value: &Ratio<S>) -> Value {
    if value.is_integer() {
        scalar_to_json(value.numer())
    } else {
        Value::String(value.to_string())
    }
}

pub fn instance_to_json<S: Scalar>(inst: &Instance<S>) -> Value {
    let mut obj = Map::new();
    obj.insert("kind".into(), Value::from(inst.kind().as_str()));
    obj.insert("agents".into(), Value::from(inst.agent_names().to_vec()));
    obj.insert("items".into(), Value::from(inst.item_names().to_vec()));
    obj.insert(
        "valuations".into(),
        Value::Array(
            inst.rows()
                .iter()
                .map(|row| Value::Array(row.iter().map(scalar_to_json).collect()))
                .collect(),
        ),
    );
    Value::Object(obj)
}

/// `{"a1": ["c1", ...], ...}` in agent order.
pub fn bundles_to_json<S: Scalar>(inst: &Instance<S>, alloc: &Allocation) -> Value {
    let mut bundles = Map::new();
    for (i, bundle) in alloc.bundles().iter().enumerate() {
        let items = bundle
            .iter()
            .map(|&r| Value::from(inst.item_names()[r].clone()))
            .collect();
        bundles.insert(inst.agent_names()[i].clone(), Value::Array(items));
    }
    Value::Object(bundles)
}

pub fn allocation_to_json<S: Scalar>(inst: &Instance<S>, alloc: &Allocation) -> Value {
    let mut obj = Map::new();
    obj.insert("bundles".into(), bundles_to_json(inst, alloc));
    Value::Object(obj)
}

pub fn parse_allocation<S: Scalar>(text: &str, inst: &Instance<S>) -> Result<Allocation> {
    let doc: Value = serde_json::from_str(text).map_err(|e| doc_err(e.to_string()))?;
    allocation_from_value(&doc, inst)
}

/// Reads the `bundles` object; agents left out receive nothing.
pub fn allocation_from_value<S: Scalar>(doc: &Value, inst: &Instance<S>) -> Result<Allocation> {
    let bundles = doc
        .get("bundles")
        .and_then(Value::as_object)
        .ok_or_else(|| doc_err("allocation document needs a bundles object"))?;
    let mut out = vec![Vec::new(); inst.n()];
    for (agent, items) in bundles {
        let i = inst.agent_index(agent).ok_or_else(|| Error::UnknownName {
            what: "agent",
            name: agent.clone(),
        })?;
        let items = items
            .as_array()
            .ok_or_else(|| doc_err(format!("bundle of {agent} must be an array")))?;
        for item in items {
            let name = item
                .as_str()
                .ok_or_else(|| doc_err(format!("bundle of {agent} must list item names")))?;
            let r = inst.item_index(name).ok_or_else(|| Error::UnknownName {
                what: "item",
                name: name.to_owned(),
            })?;
            out[i].push(r);
        }
    }
    Allocation::from_bundles(out, inst.m())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn parses_chores_document() {
        let inst: Instance<i64> =
            parse_instance(r#"{"kind": "chores", "valuations": [[-1, -2], [-2, -1]]}"#).unwrap();
        assert_eq!((inst.n(), inst.m(), inst.kind()), (2, 2, Kind::Chores));
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(matches!(
            parse_instance::<i64>(r#"{"valuations": [[1, -1]]}"#),
            Err(Error::MixedSigns { .. })
        ));
        assert_eq!(
            parse_instance::<i64>(r#"{"valuations": [[1, 2], [1]]}"#),
            Err(Error::RaggedRows {
                row: 1,
                expected: 2,
                found: 1
            })
        );
        assert_eq!(
            parse_instance::<i64>(r#"{"valuations": [[1, 2.5]]}"#),
            Err(Error::NonInteger { row: 0, col: 1 })
        );
        assert_eq!(parse_instance::<i64>(r#"{"valuations": []}"#), Err(Error::EmptyAgents));
        assert!(matches!(
            parse_instance::<i64>(r#"{"kind": "goods", "valuations": [[-1]]}"#),
            Err(Error::KindMismatch { .. })
        ));
        assert!(matches!(parse_instance::<i64>("[1"), Err(Error::Document(_))));
    }

    #[test]
    fn big_values_round_trip_as_strings() {
        let text = r#"{"valuations": [["123456789012345678901234567890", 1]]}"#;
        let inst: Instance<BigInt> = parse_instance(text).unwrap();
        let json = instance_to_json(&inst);
        assert_eq!(json["valuations"][0][0], "123456789012345678901234567890");
        assert_eq!(json["valuations"][0][1], 1);
        assert_eq!(instance_from_value::<BigInt>(&json).unwrap(), inst);
        assert!(parse_instance::<i64>(text).is_err());
    }

    #[test]
    fn allocation_round_trip() {
        let inst: Instance<i64> = parse_instance(
            r#"{"agents": ["ann", "bob"], "items": ["x", "y", "z"], "valuations": [[1, 2, 3], [3, 2, 1]]}"#,
        )
        .unwrap();
        let alloc = Allocation::from_bundles(vec![vec![2], vec![0, 1]], 3).unwrap();
        let json = allocation_to_json(&inst, &alloc);
        assert_eq!(json["bundles"]["bob"], serde_json::json!(["x", "y"]));
        assert_eq!(parse_allocation(&json.to_string(), &inst).unwrap(), alloc);
        assert!(matches!(
            parse_allocation(r#"{"bundles": {"ann": ["x", "y"]}}"#, &inst),
            Err(Error::MalformedAllocation(_))
        ));
        assert!(matches!(
            parse_allocation(r#"{"bundles": {"eve": []}}"#, &inst),
            Err(Error::UnknownName { .. })
        ));
    }
}
