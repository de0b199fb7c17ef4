//! Fixture files and the `verify` command.
//!
//! A fixture file is a JSON object with optional lists `functor`, `that`,
//! `moebius` and `thpart`, or a bare list of cases for the requested law.
//! Cases may carry expected tensors; these are compared before the identity
//! itself, so a corrupted diagram shows up even though the identity would
//! still hold for it.

use std::path::Path;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Value};

use fibcat::partition::SetPartition;
use fibcat::rep::{verify_thpart, GroupSpec};
use fibcat::tensor::{
    build_partition_that, moebius_expand_bounded, verify_functor, verify_that_sums, Entry,
};
use fibcat::{build_t, build_that, BilabelledGraph, Error, Graph, IntTensor, LawCheck};

use crate::config::Config;
use crate::{from_value, read_json, CliError, Law, Outcome};

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairCase {
    pub graph: Graph,
    pub left: BilabelledGraph,
    pub right: BilabelledGraph,
    #[serde(default)]
    pub expected: Option<PairExpected>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairExpected {
    pub left: IntTensor,
    pub right: IntTensor,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramCase {
    pub graph: Graph,
    pub diagram: BilabelledGraph,
    /// `T^G_D`.
    #[serde(default)]
    pub expected: Option<IntTensor>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionCase {
    pub group: GroupSpec,
    pub partition: SetPartition,
    /// `T̂^{(n)}_P`.
    #[serde(default)]
    pub expected: Option<IntTensor>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fixtures {
    pub functor: Vec<PairCase>,
    pub that: Vec<PairCase>,
    pub moebius: Vec<DiagramCase>,
    pub thpart: Vec<PartitionCase>,
}

fn law_name(law: Law) -> &'static str {
    match law {
        Law::Functor => "functor",
        Law::That => "that",
        Law::Moebius => "moebius",
        Law::Thpart => "thpart",
    }
}

fn load(law: Law, path: &Path) -> Result<Fixtures, CliError> {
    let v = read_json(path)?;
    if v.is_array() {
        let mut wrapped = serde_json::Map::new();
        wrapped.insert(law_name(law).to_string(), v);
        return from_value(Value::Object(wrapped), "fixtures");
    }
    from_value(v, "fixtures")
}

fn widen<E: Entry>(t: &IntTensor) -> Result<IntTensor<E>, Error> {
    IntTensor::from_entries(t.n(), t.k(), t.l(), t.entries().iter().map(|&x| E::from(x)).collect())
}

fn random_diagram(rng: &mut ChaCha8Rng, max_n: usize, k: usize, l: usize) -> BilabelledGraph {
    let n = rng.gen_range(1..=max_n);
    let mut g = Graph::edgeless(n);
    for u in 0..n {
        for v in u..n {
            if rng.gen_bool(if u == v { 0.15 } else { 0.45 }) {
                g.add_edge(u, v).expect("in range");
            }
        }
    }
    let a = (0..k).map(|_| rng.gen_range(0..n)).collect();
    let b = (0..l).map(|_| rng.gen_range(0..n)).collect();
    BilabelledGraph::new(g, a, b).expect("labels in range")
}

/// Distinct host graphs of the fixture cases, in order of appearance.
fn hosts<'a>(graphs: impl Iterator<Item = &'a Graph>) -> Vec<Graph> {
    let mut out: Vec<Graph> = Vec::new();
    for g in graphs {
        if !out.contains(g) {
            out.push(g.clone());
        }
    }
    out
}

fn add_random_cases(f: &mut Fixtures, law: Law, count: usize, seed: u64) {
    if count == 0 {
        return;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match law {
        Law::Functor | Law::That => {
            let cases = if matches!(law, Law::Functor) { &mut f.functor } else { &mut f.that };
            for g in hosts(cases.iter().map(|c| &c.graph)) {
                for _ in 0..count {
                    let (k, l) = (rng.gen_range(0..=2), rng.gen_range(0..=2));
                    let left = random_diagram(&mut rng, 3, k, l);
                    let k = if rng.gen_bool(0.5) { left.outputs().len() } else { rng.gen_range(0..=2) };
                    let l = rng.gen_range(0..=2);
                    let right = random_diagram(&mut rng, 3, k, l);
                    cases.push(PairCase { graph: g.clone(), left, right, expected: None });
                }
            }
        }
        Law::Moebius => {
            for g in hosts(f.moebius.iter().map(|c| &c.graph)) {
                for _ in 0..count {
                    let (k, l) = (rng.gen_range(0..=2), rng.gen_range(0..=2));
                    let diagram = random_diagram(&mut rng, 5, k, l);
                    f.moebius.push(DiagramCase { graph: g.clone(), diagram, expected: None });
                }
            }
        }
        // the identity ranges over all partitions already
        Law::Thpart => {}
    }
}

fn case_checks<E: Entry>(config: &Config, law: Law, f: &Fixtures, index: usize) -> Result<Vec<LawCheck<E>>, Error> {
    let mut checks = Vec::new();
    match law {
        Law::Functor | Law::That => {
            let case = if matches!(law, Law::Functor) { &f.functor[index] } else { &f.that[index] };
            let build = |d: &BilabelledGraph| match law {
                Law::Functor => build_t::<E>(&case.graph, d),
                _ => build_that::<E>(&case.graph, d),
            };
            if let Some(exp) = &case.expected {
                checks.push(LawCheck::new("fixture tensor (left)", build(&case.left)?, widen(&exp.left)?));
                checks.push(LawCheck::new("fixture tensor (right)", build(&case.right)?, widen(&exp.right)?));
            }
            let report = match law {
                Law::Functor => verify_functor::<E>(&case.graph, &case.left, &case.right)?,
                _ => verify_that_sums::<E>(&case.graph, &case.left, &case.right)?,
            };
            checks.extend(report.checks);
        }
        Law::Moebius => {
            let case = &f.moebius[index];
            if let Some(exp) = &case.expected {
                checks.push(LawCheck::new("fixture tensor", build_t::<E>(&case.graph, &case.diagram)?, widen(exp)?));
            }
            checks.push(moebius_expand_bounded::<E>(&case.graph, &case.diagram, config.partition_bound)?);
        }
        Law::Thpart => {
            let case = &f.thpart[index];
            let h = case.group.build()?;
            if let Some(exp) = &case.expected {
                let t = build_partition_that::<E>(h.degree(), &case.partition)?;
                checks.push(LawCheck::new("fixture tensor", t, widen(exp)?));
            }
            checks.push(verify_thpart::<E>(&h, &case.partition)?);
        }
    }
    Ok(checks)
}

fn run_cases<E: Entry>(config: &Config, law: Law, f: &Fixtures) -> Result<Value, Error> {
    let count = match law {
        Law::Functor => f.functor.len(),
        Law::That => f.that.len(),
        Law::Moebius => f.moebius.len(),
        Law::Thpart => f.thpart.len(),
    };
    let per_case: Vec<Vec<LawCheck<E>>> = (0..count)
        .into_par_iter()
        .map(|i| case_checks::<E>(config, law, f, i))
        .collect::<Result<_, _>>()?;
    let mut failures = Vec::new();
    let mut total = 0;
    for (case, checks) in per_case.iter().enumerate() {
        total += checks.len();
        for c in checks.iter().filter(|c| !c.holds()) {
            let mismatch = c.mismatch().map(|m| m.to_string()).unwrap_or_default();
            failures.push(json!({"case": case, "check": c.law, "first_mismatch": mismatch}));
        }
    }
    Ok(json!({
        "law": law_name(law),
        "cases": count,
        "checks": total,
        "failed": failures.len(),
        "passed": failures.is_empty(),
        "failures": failures,
    }))
}

pub fn verify(config: &Config, law: Law, path: &Path, random: usize, seed: u64) -> Result<Outcome, CliError> {
    let mut fixtures = load(law, path)?;
    add_random_cases(&mut fixtures, law, random, seed);
    let json = if config.bigint {
        run_cases::<BigInt>(config, law, &fixtures)?
    } else {
        run_cases::<i64>(config, law, &fixtures)?
    };
    let ok = json["passed"].as_bool().unwrap_or(false);
    Ok(Outcome { json, ok })
}
