//! Brute-force oracles and fixtures shared by the integration tests. Nothing
//! here calls the search or counting code under test.

#![allow(dead_code)]

use std::collections::BTreeSet;

use fibcat::{BilabelledGraph, Graph, IntTensor};
use rand::Rng;

pub fn graph(n: usize, edges: &[(usize, usize)]) -> Graph {
    Graph::from_edges(n, edges).unwrap()
}

pub fn diagram(n: usize, edges: &[(usize, usize)], a: &[usize], b: &[usize]) -> BilabelledGraph {
    BilabelledGraph::new(graph(n, edges), a.to_vec(), b.to_vec()).unwrap()
}

/// K₂, K₃, the path on 3 vertices and K₂ ⊔ N₁.
pub fn fixture_graphs() -> Vec<(&'static str, Graph)> {
    vec![
        ("K2", Graph::complete(2)),
        ("K3", Graph::complete(3)),
        ("P3", Graph::path(3)),
        ("K2+N1", graph(3, &[(0, 1)])),
    ]
}

/// All maps `0..m → 0..n`, as digit vectors.
pub fn all_maps(m: usize, n: usize) -> Vec<Vec<usize>> {
    let total = n.pow(m as u32);
    (0..total)
        .map(|mut c| {
            (0..m)
                .map(|_| {
                    let d = c % n;
                    c /= n;
                    d
                })
                .collect()
        })
        .collect()
}

fn flat(digits: &[usize], n: usize) -> usize {
    digits.iter().fold(0, |acc, &d| acc * n + d)
}

/// Counts maps `V(D) → V(G)` preserving edges, binned by label images.
fn brute_count(g: &Graph, d: &BilabelledGraph, injective: bool) -> IntTensor {
    let n = g.vertex_count();
    let (k, l) = (d.inputs().len(), d.outputs().len());
    let mut entries = vec![0i64; n.pow((k + l) as u32)];
    let edges = d.graph().edges();
    for phi in all_maps(d.graph().vertex_count(), n) {
        if injective && phi.iter().collect::<BTreeSet<_>>().len() != phi.len() {
            continue;
        }
        if edges.iter().all(|&(u, v)| g.has_edge(phi[u], phi[v])) {
            let i: Vec<usize> = d.inputs().iter().map(|&v| phi[v]).collect();
            let j: Vec<usize> = d.outputs().iter().map(|&v| phi[v]).collect();
            entries[flat(&j, n) * n.pow(k as u32) + flat(&i, n)] += 1;
        }
    }
    IntTensor::from_entries(n, k, l, entries).unwrap()
}

pub fn brute_t(g: &Graph, d: &BilabelledGraph) -> IntTensor {
    brute_count(g, d, false)
}

pub fn brute_that(g: &Graph, d: &BilabelledGraph) -> IntTensor {
    brute_count(g, d, true)
}

/// A random bilabelled graph with `1..=max_n` vertices and at most
/// `max_labels` labels on each side.
pub fn random_diagram(
    rng: &mut impl Rng,
    max_n: usize,
    max_labels: usize,
    loop_prob: f64,
) -> BilabelledGraph {
    let n = rng.gen_range(1..=max_n);
    let k = rng.gen_range(0..=max_labels);
    let l = rng.gen_range(0..=max_labels);
    random_diagram_with(rng, n, k, l, loop_prob)
}

pub fn random_diagram_with(
    rng: &mut impl Rng,
    n: usize,
    k: usize,
    l: usize,
    loop_prob: f64,
) -> BilabelledGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        if rng.gen_bool(loop_prob) {
            edges.push((u, u));
        }
        for v in u + 1..n {
            if rng.gen_bool(0.45) {
                edges.push((u, v));
            }
        }
    }
    let a = (0..k).map(|_| rng.gen_range(0..n)).collect::<Vec<_>>();
    let b = (0..l).map(|_| rng.gen_range(0..n)).collect::<Vec<_>>();
    diagram(n, &edges, &a, &b)
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for v in 0..n {
            if !cur.contains(&v) {
                cur.push(v);
                rec(n, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(n, &mut Vec::new(), &mut out);
    out
}

/// Permutations preserving the edge set, by trying every permutation.
pub fn brute_automorphisms(g: &Graph) -> Vec<Vec<usize>> {
    let edges = g.edges();
    permutations(g.vertex_count())
        .into_iter()
        .filter(|p| edges.iter().all(|&(u, v)| g.has_edge(p[u], p[v])))
        .collect()
}

/// Isomorphism invariant: the smallest sorted edge list over all relabelings.
pub fn brute_iso_key(g: &Graph) -> (usize, Vec<(usize, usize)>) {
    let n = g.vertex_count();
    let best = permutations(n)
        .into_iter()
        .map(|p| {
            let mut e: Vec<(usize, usize)> = g
                .edges()
                .into_iter()
                .map(|(u, v)| (p[u].min(p[v]), p[u].max(p[v])))
                .collect();
            e.sort_unstable();
            e
        })
        .min()
        .unwrap_or_default();
    (n, best)
}

/// Every graph on `n` vertices (loopless unless `loops`), one per edge set.
pub fn all_graphs(n: usize, loops: bool) -> Vec<Graph> {
    let mut slots: Vec<(usize, usize)> = Vec::new();
    for u in 0..n {
        if loops {
            slots.push((u, u));
        }
        for v in u + 1..n {
            slots.push((u, v));
        }
    }
    (0u64..1 << slots.len())
        .map(|mask| {
            let e: Vec<_> =
                (0..slots.len()).filter(|i| mask >> i & 1 == 1).map(|i| slots[i]).collect();
            graph(n, &e)
        })
        .collect()
}

/// Isomorphism classes of graphs with at most `bound` vertices.
pub fn iso_classes(bound: usize, loops: bool, keep: impl Fn(&Graph) -> bool) -> BTreeSet<(usize, Vec<(usize, usize)>)> {
    (0..=bound)
        .flat_map(|n| all_graphs(n, loops))
        .filter(|g| keep(g))
        .map(|g| brute_iso_key(&g))
        .collect()
}

pub fn every_edge_in_a_triangle(g: &Graph) -> bool {
    let n = g.vertex_count();
    g.edges()
        .into_iter()
        .all(|(u, v)| u != v && (0..n).any(|w| w != u && w != v && g.has_edge(u, w) && g.has_edge(v, w)))
}

/// Orbits of the group generated by `elements` on `(k+l)`-tuples, by
/// flood fill.
pub fn brute_orbit_count(degree: usize, elements: &[Vec<usize>], legs: usize) -> usize {
    let tuples = all_maps(legs, degree);
    let mut seen = BTreeSet::new();
    let mut count = 0;
    for t in tuples {
        if seen.contains(&t) {
            continue;
        }
        count += 1;
        let mut stack = vec![t];
        while let Some(x) = stack.pop() {
            if !seen.insert(x.clone()) {
                continue;
            }
            for p in elements {
                stack.push(x.iter().map(|&v| p[v]).collect());
            }
        }
    }
    count
}

/// Signed permutation matrices of size `n` as (permutation, signs).
pub fn hyperoctahedral(n: usize) -> Vec<(Vec<usize>, Vec<i64>)> {
    let mut out = Vec::new();
    for p in permutations(n) {
        for mask in 0u32..1 << n {
            let signs = (0..n).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
            out.push((p.clone(), signs));
        }
    }
    out
}

/// `(1/|G|) Σ_g trace(g)^m` over explicit signed permutation matrices.
pub fn hyperoctahedral_moment(n: usize, m: u32) -> i64 {
    let group = hyperoctahedral(n);
    let total: i64 = group
        .iter()
        .map(|(p, s)| {
            // matrix entry (p[i], i) = s[i]; diagonal entries sit at fixed points
            let trace: i64 = (0..n).filter(|&i| p[i] == i).map(|i| s[i]).sum();
            trace.pow(m)
        })
        .sum();
    assert_eq!(total % group.len() as i64, 0);
    total / group.len() as i64
}

/// Triviality in `(Z₂ × Z₂) * Z₂ = ⟨a,b,c | a², b², c², abab⟩` by free
/// product normal form: maximal `{a,b}`-syllables collapse to their parity
/// vector; identity syllables vanish and their neighbours merge.
pub fn trivial_in_ab_commuting(word: &[usize]) -> bool {
    #[derive(Clone, Copy, PartialEq)]
    enum Syl {
        Ab(bool, bool),
        C,
    }
    let mut stack: Vec<Syl> = Vec::new();
    for &x in word {
        let s = match x {
            0 => Syl::Ab(true, false),
            1 => Syl::Ab(false, true),
            2 => Syl::C,
            _ => panic!("letter outside {{a,b,c}}"),
        };
        match (stack.last().copied(), s) {
            (Some(Syl::C), Syl::C) => {
                stack.pop();
            }
            (Some(Syl::Ab(p, q)), Syl::Ab(r, t)) => {
                stack.pop();
                if (p ^ r) || (q ^ t) {
                    stack.push(Syl::Ab(p ^ r, q ^ t));
                }
            }
            _ => stack.push(s),
        }
    }
    stack.is_empty()
}
