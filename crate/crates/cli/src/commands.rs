use std::path::Path;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde_json::{json, Value};

use fibcat::free_product::NormalClosureSpec;
use fibcat::graph::canonical_form;
use fibcat::rep::{basis_semidirect, burnside_dim, orbits_bounded, GroupSpec};
use fibcat::tensor::Entry;
use fibcat::{build_t, build_that, BilabelledGraph, Error, Graph, GraphFibration, PermutationGroup, Word};

use crate::config::Config;
use crate::{from_value, read_json, read_text, CliError, Mode, Outcome};

/// A graph file holds either a JSON graph or a graph6 string.
pub fn read_graph(path: &Path) -> Result<Graph, CliError> {
    let text = read_text(path)?;
    let text = text.trim();
    if text.starts_with('{') {
        serde_json::from_str(text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
    } else {
        Graph::from_graph6(text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
    }
}

fn read_group(path: &Path) -> Result<PermutationGroup, CliError> {
    let spec: GroupSpec = from_value(read_json(path)?, "group spec")?;
    Ok(spec.build()?)
}

/// Fills in defaults from the config for keys the file leaves out.
fn with_defaults(mut v: Value, defaults: &[(&str, Value)]) -> Value {
    if let Value::Object(map) = &mut v {
        for (key, value) in defaults {
            map.entry(key.to_string()).or_insert_with(|| value.clone());
        }
    }
    v
}

fn word_text(w: &Word) -> String {
    match serde_json::to_value(w).expect("serializable") {
        Value::Array(symbols) => symbols.iter().filter_map(Value::as_str).collect(),
        _ => unreachable!("words serialize as sequences"),
    }
}

fn count_json(c: u128) -> Value {
    u64::try_from(c).map_or_else(|_| Value::from(c.to_string()), Value::from)
}

pub fn tensor(config: &Config, graph: &Path, diagram: &Path, mode: Mode) -> Result<Outcome, CliError> {
    let g = read_graph(graph)?;
    let d: BilabelledGraph = from_value(read_json(diagram)?, "diagram")?;
    fn build<E: Entry>(g: &Graph, d: &BilabelledGraph, mode: Mode) -> Result<Value, Error> {
        let t = match mode {
            Mode::Hom => build_t::<E>(g, d)?,
            Mode::Inj => build_that::<E>(g, d)?,
        };
        Ok(t.to_json())
    }
    let json = if config.bigint {
        build::<BigInt>(&g, &d, mode)?
    } else {
        build::<i64>(&g, &d, mode)?
    };
    Ok(Outcome { json, ok: true })
}

fn check_tuple_bound(config: &Config, n: usize, legs: usize) -> Result<(), CliError> {
    let count = u32::try_from(legs).ok().and_then(|e| n.checked_pow(e));
    match count {
        Some(c) if c <= config.tuple_bound => Ok(()),
        _ => Err(Error::Capacity {
            what: "tuple count",
            got: count.unwrap_or(usize::MAX),
            limit: config.tuple_bound,
        }
        .into()),
    }
}

pub fn dim(config: &Config, group: &Path, closure: &Path, k: usize, l: usize) -> Result<Outcome, CliError> {
    let h = read_group(group)?;
    let defaults = [
        ("strategy", serde_json::to_value(config.strategy).expect("serializable")),
        ("coset_limit", Value::from(config.coset_limit)),
    ];
    let spec: NormalClosureSpec = from_value(with_defaults(read_json(closure)?, &defaults), "closure spec")?;
    spec.validate()?;
    check_tuple_bound(config, h.degree(), k + l)?;
    let (mut json, dim, rank, orbit_count) = if config.bigint {
        let b = basis_semidirect::<BigInt>(&h, &spec, k, l)?;
        (b.report_json(), b.dim(), b.rank, b.verdicts.len())
    } else {
        let b = basis_semidirect::<i64>(&h, &spec, k, l)?;
        (b.report_json(), b.dim(), b.rank, b.verdicts.len())
    };
    let burnside = burnside_dim(&h, k, l)?;
    let consistent = rank == dim && burnside == orbit_count as u128;
    json["cross_check"] = json!({
        "rank": rank,
        "orbit_count": orbit_count,
        "burnside": count_json(burnside),
        "consistent": consistent,
    });
    Ok(Outcome { json, ok: consistent })
}

pub fn closure(config: &Config, fibration: &Path) -> Result<Outcome, CliError> {
    let v = read_json(fibration)?;
    let requested = v.get("max_vertices").and_then(Value::as_u64).map(|m| m as usize);
    if let Some(m) = requested.filter(|&m| m > config.max_vertices) {
        return Err(Error::Capacity {
            what: "closure vertex bound",
            got: m,
            limit: config.max_vertices,
        }
        .into());
    }
    let defaults = [
        ("max_vertices", Value::from(config.max_vertices)),
        ("strategy", serde_json::to_value(config.strategy).expect("serializable")),
    ];
    let v = with_defaults(v, &defaults);
    let f: GraphFibration = from_value(v, "fibration")?;
    let graphs = f.closure_graphs();
    let rows = graphs
        .par_iter()
        .map(|g| -> Result<Value, Error> {
            let key = canonical_form(g)?.key;
            let generators: Vec<String> = f.fiber_generators(g)?.iter().map(word_text).collect();
            Ok(json!({
                "vertices": g.vertex_count(),
                "key": key.hex(),
                "graph6": g.to_graph6(),
                "edges": g.edges(),
                "generators": generators,
            }))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let json = json!({
        "easy": f.is_easy(),
        "max_vertices": f.max_vertices(),
        "count": rows.len(),
        "fibres": rows,
    });
    Ok(Outcome { json, ok: true })
}

pub fn orbits(config: &Config, group: &Path, k: usize, l: usize) -> Result<Outcome, CliError> {
    let h = read_group(group)?;
    let classes = orbits_bounded(&h, k, l, config.tuple_bound)?;
    let burnside = burnside_dim(&h, k, l)?;
    let consistent = burnside == classes.len() as u128;
    let json = json!({
        "k": k,
        "l": l,
        "group_order": h.order(),
        "count": classes.len(),
        "burnside": count_json(burnside),
        "orbits": classes,
    });
    Ok(Outcome { json, ok: consistent })
}
