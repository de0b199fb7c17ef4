//! Orbit classes of permutation groups on index tuples, the tensors
//! `T̂_H^{ab}`, and bases of morphism spaces for `Γ̂ ⋊ H`.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::diagram::BilabelledGraph;
use crate::error::{Error, Result};
use crate::free_product::{Membership, NormalClosureSpec, Word};
use crate::graph::{automorphisms, Graph};
use crate::linalg::rank;
use crate::partition::SetPartition;
use crate::tensor::{build_partition_that, build_that, multi_index, Entry, IntTensor, LawCheck};

pub const DEFAULT_TUPLE_BOUND: usize = 1 << 20;
pub const DEFAULT_GROUP_ORDER_BOUND: usize = 50_000;

/// A permutation group given by its full element list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationGroup {
    degree: usize,
    elements: Vec<Vec<usize>>,
}

fn is_permutation(p: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    p.len() == n && p.iter().all(|&x| x < n && !std::mem::replace(&mut seen[x], true))
}

fn product(p: &[usize], q: &[usize]) -> Vec<usize> {
    q.iter().map(|&x| p[x]).collect()
}

impl PermutationGroup {
    /// Checks the group axioms on the given element list.
    pub fn new(degree: usize, elements: Vec<Vec<usize>>) -> Result<Self> {
        if let Some(p) = elements.iter().find(|p| !is_permutation(p, degree)) {
            return Err(Error::validation(format!("{p:?} is not a permutation of degree {degree}")));
        }
        let mut elements = elements;
        elements.sort();
        elements.dedup();
        let set: HashSet<&Vec<usize>> = elements.iter().collect();
        let identity: Vec<usize> = (0..degree).collect();
        if !set.contains(&identity) {
            return Err(Error::validation("group lacks the identity"));
        }
        for p in &elements {
            for q in &elements {
                if !set.contains(&product(p, q)) {
                    return Err(Error::validation(format!(
                        "element list not closed: {p:?}∘{q:?} missing"
                    )));
                }
            }
        }
        Ok(PermutationGroup { degree, elements })
    }

    /// Closure of the generators under composition.
    pub fn from_generators(degree: usize, generators: &[Vec<usize>]) -> Result<Self> {
        Self::from_generators_bounded(degree, generators, DEFAULT_GROUP_ORDER_BOUND)
    }

    pub fn from_generators_bounded(
        degree: usize,
        generators: &[Vec<usize>],
        bound: usize,
    ) -> Result<Self> {
        if let Some(p) = generators.iter().find(|p| !is_permutation(p, degree)) {
            return Err(Error::validation(format!("{p:?} is not a permutation of degree {degree}")));
        }
        let identity: Vec<usize> = (0..degree).collect();
        let mut seen: HashSet<Vec<usize>> = HashSet::from([identity.clone()]);
        let mut frontier = vec![identity];
        while let Some(p) = frontier.pop() {
            for g in generators {
                let q = product(g, &p);
                if seen.insert(q.clone()) {
                    if seen.len() > bound {
                        return Err(Error::capacity("group order", seen.len(), bound));
                    }
                    frontier.push(q);
                }
            }
        }
        let mut elements: Vec<Vec<usize>> = seen.into_iter().collect();
        elements.sort();
        Ok(PermutationGroup { degree, elements })
    }

    pub fn trivial(degree: usize) -> Self {
        PermutationGroup {
            degree,
            elements: vec![(0..degree).collect()],
        }
    }

    /// All permutations of `degree` points.
    pub fn symmetric(degree: usize) -> Result<Self> {
        let mut gens = Vec::new();
        if degree >= 2 {
            let mut swap: Vec<usize> = (0..degree).collect();
            swap.swap(0, 1);
            gens.push(swap);
            gens.push((1..degree).chain([0]).collect());
        }
        Self::from_generators(degree, &gens)
    }

    /// `Aut G` acting on `V(G)`.
    pub fn automorphisms(g: &Graph) -> Self {
        let mut elements: Vec<Vec<usize>> = automorphisms(g)
            .into_iter()
            .map(|m| m.images().to_vec())
            .collect();
        elements.sort();
        PermutationGroup {
            degree: g.vertex_count(),
            elements,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Vec<usize>] {
        &self.elements
    }

    pub fn is_transitive(&self) -> bool {
        self.degree == 0 || (0..self.degree).all(|v| self.elements.iter().any(|p| p[0] == v))
    }
}

/// Group spec as read from JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupSpec {
    Symmetric { symmetric: usize },
    Trivial { trivial: usize },
    Automorphisms { automorphisms: Graph },
    Generated { degree: usize, generators: Vec<Vec<usize>> },
    Elements { degree: usize, elements: Vec<Vec<usize>> },
}

impl GroupSpec {
    pub fn build(&self) -> Result<PermutationGroup> {
        match self {
            GroupSpec::Symmetric { symmetric } => PermutationGroup::symmetric(*symmetric),
            GroupSpec::Trivial { trivial } => Ok(PermutationGroup::trivial(*trivial)),
            GroupSpec::Automorphisms { automorphisms } => {
                Ok(PermutationGroup::automorphisms(automorphisms))
            }
            GroupSpec::Generated { degree, generators } => {
                PermutationGroup::from_generators(*degree, generators)
            }
            GroupSpec::Elements { degree, elements } => {
                PermutationGroup::new(*degree, elements.clone())
            }
        }
    }
}

/// The class `[a, b]` of a pair of tuples under the diagonal action.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrbitClass {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub size: usize,
}

impl fmt::Display for OrbitClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?},{:?}] (size {})", self.a, self.b, self.size)
    }
}

/// Orbits of `H` on `V^k × V^l`, each represented by its lexicographically
/// least member, in increasing order of representatives.
pub fn orbits(h: &PermutationGroup, k: usize, l: usize) -> Result<Vec<OrbitClass>> {
    orbits_bounded(h, k, l, DEFAULT_TUPLE_BOUND)
}

pub fn orbits_bounded(
    h: &PermutationGroup,
    k: usize,
    l: usize,
    bound: usize,
) -> Result<Vec<OrbitClass>> {
    let n = h.degree;
    let legs = k + l;
    let total = u32::try_from(legs)
        .ok()
        .and_then(|e| n.checked_pow(e))
        .filter(|&t| t <= bound)
        .ok_or_else(|| Error::capacity("tuple count", n.saturating_pow(legs as u32), bound))?;
    let mut visited = vec![false; total];
    let mut out = Vec::new();
    for idx in 0..total {
        if visited[idx] {
            continue;
        }
        let tuple = multi_index(idx, legs, n);
        let mut size = 0;
        for p in &h.elements {
            let image = tuple.iter().fold(0, |acc, &x| acc * n + p[x]);
            if !visited[image] {
                visited[image] = true;
                size += 1;
            }
        }
        out.push(OrbitClass {
            a: tuple[..k].to_vec(),
            b: tuple[k..].to_vec(),
            size,
        });
    }
    Ok(out)
}

/// `(1/|H|) Σ_σ fix(σ)^{k+l}`: the number of orbits by Burnside's lemma.
pub fn burnside_dim(h: &PermutationGroup, k: usize, l: usize) -> Result<u128> {
    let mut total: u128 = 0;
    for p in &h.elements {
        let fixed = p.iter().enumerate().filter(|&(i, &x)| i == x).count() as u128;
        let term = u32::try_from(k + l)
            .ok()
            .and_then(|e| fixed.checked_pow(e))
            .ok_or(Error::Overflow("fixed point power"))?;
        total = total.checked_add(term).ok_or(Error::Overflow("Burnside sum"))?;
    }
    let order = h.order() as u128;
    if !total.is_multiple_of(order) {
        return Err(Error::Invariant(format!("Burnside sum {total} not divisible by {order}")));
    }
    Ok(total / order)
}

/// `[T̂_H^{ab}]_{ji} = #{φ ∈ H | φ(a) = i, φ(b) = j}`.
pub fn build_that_h<E: Entry>(h: &PermutationGroup, a: &[usize], b: &[usize]) -> Result<IntTensor<E>> {
    let n = h.degree;
    if let Some(&x) = a.iter().chain(b).find(|&&x| x >= n) {
        return Err(Error::validation(format!("index {x} out of range for degree {n}")));
    }
    let mut entries = IntTensor::<E>::zeros(n, a.len(), b.len())?.flatten();
    let cols = n.pow(a.len() as u32);
    let one = E::one();
    for p in &h.elements {
        let i = a.iter().fold(0, |acc, &x| acc * n + p[x]);
        let j = b.iter().fold(0, |acc, &x| acc * n + p[x]);
        let slot = &mut entries[j * cols + i];
        *slot = slot.checked_add(&one).ok_or(Error::Overflow("orbit count"))?;
    }
    IntTensor::from_entries(n, a.len(), b.len(), entries)
}

#[derive(Clone, Debug)]
pub struct BasisElement<E = i64> {
    pub orbit: OrbitClass,
    pub tensor: IntTensor<E>,
}

/// `{T̂^{ab}_G | [a,b] ∈ W_G(k,l)}`, verified linearly independent.
pub fn basis_full<E: Entry>(g: &Graph, k: usize, l: usize) -> Result<Vec<BasisElement<E>>> {
    let h = PermutationGroup::automorphisms(g);
    let mut basis = Vec::new();
    for orbit in orbits(&h, k, l)? {
        let d = BilabelledGraph::new(g.clone(), orbit.a.clone(), orbit.b.clone())?;
        let tensor = build_that(g, &d)?;
        basis.push(BasisElement { orbit, tensor });
    }
    check_independent(&basis)?;
    Ok(basis)
}

fn check_independent<E: Entry>(basis: &[BasisElement<E>]) -> Result<usize> {
    let rows: Vec<Vec<E>> = basis.iter().map(|e| e.tensor.flatten()).collect();
    let r = rank(&rows);
    if r != basis.len() {
        return Err(Error::Invariant(format!(
            "{} basis tensors have rank {r}",
            basis.len()
        )));
    }
    Ok(r)
}

/// Verdict for one orbit class in a semidirect product basis query.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitVerdict {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub size: usize,
    pub accepted: bool,
}

#[derive(Clone, Debug)]
pub struct SemidirectBasis<E = i64> {
    pub k: usize,
    pub l: usize,
    pub verdicts: Vec<OrbitVerdict>,
    pub basis: Vec<BasisElement<E>>,
    /// Exact rank of the flattened basis; always equal to `dim`.
    pub rank: usize,
}

impl<E: Entry> SemidirectBasis<E> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `{"k","l","dim","orbits":[{"a","b","size","accepted"}]}`.
    pub fn report_json(&self) -> serde_json::Value {
        serde_json::json!({
            "k": self.k,
            "l": self.l,
            "dim": self.dim(),
            "orbits": self.verdicts,
        })
    }
}

/// Checks `h(A) ⊆ A` generator by generator.
pub fn check_invariance(h: &PermutationGroup, spec: &NormalClosureSpec) -> Result<()> {
    if spec.alphabet != h.degree {
        return Err(Error::validation(format!(
            "alphabet of size {} against a group of degree {}",
            spec.alphabet, h.degree
        )));
    }
    let oracle = spec.oracle()?;
    for p in &h.elements {
        for g in &spec.generators {
            let image = g.apply_map(p);
            match oracle.member(&image)? {
                Membership::Yes => {}
                Membership::No => {
                    return Err(Error::Invariance(format!(
                        "{p:?} maps generator {g} to {image}, outside the closure"
                    )))
                }
                Membership::Unknown => {
                    return Err(Error::Indeterminate(format!(
                        "cannot decide whether {image} (image of {g} under {p:?}) lies in the closure"
                    )))
                }
            }
        }
    }
    Ok(())
}

/// Basis `{T̂_H^{ab} | [a,b] ∈ W_H(k,l), g_{ab*} ∈ A}` of the morphism space
/// `Mor(k,l)` of `Γ̂ ⋊ H` with `Γ = Z₂^{*n}/A`.
pub fn basis_semidirect<E: Entry>(
    h: &PermutationGroup,
    spec: &NormalClosureSpec,
    k: usize,
    l: usize,
) -> Result<SemidirectBasis<E>> {
    check_invariance(h, spec)?;
    let oracle = spec.oracle()?;
    let mut verdicts = Vec::new();
    let mut basis = Vec::new();
    for orbit in orbits(h, k, l)? {
        let word = Word::new([orbit.a.clone(), orbit.b.iter().rev().copied().collect()].concat()).reduce();
        let accepted = match oracle.member(&word)? {
            Membership::Yes => true,
            Membership::No => false,
            Membership::Unknown => {
                return Err(Error::Indeterminate(format!(
                    "membership of g_ab* = {word} for orbit {orbit}"
                )))
            }
        };
        verdicts.push(OrbitVerdict {
            a: orbit.a.clone(),
            b: orbit.b.clone(),
            size: orbit.size,
            accepted,
        });
        if accepted {
            let tensor = build_that_h(h, &orbit.a, &orbit.b)?;
            basis.push(BasisElement { orbit, tensor });
        }
    }
    let rank = check_independent(&basis)?;
    Ok(SemidirectBasis {
        k,
        l,
        verdicts,
        basis,
        rank,
    })
}

/// `|H| · T̂^{(n)}_P = Σ_{ker(a,b) = P} T̂_H^{ab}`.
pub fn verify_thpart<E: Entry>(h: &PermutationGroup, p: &SetPartition) -> Result<LawCheck<E>> {
    if p.empty_blocks() > 0 {
        return Err(Error::Precondition("partition with empty blocks".into()));
    }
    let n = h.degree;
    let (k, l) = (p.upper(), p.lower());
    let lhs = build_partition_that::<E>(n, p)?.scale(&E::from(h.order() as i64))?;
    let mut rhs = IntTensor::zeros(n, k, l)?;
    let blocks = p.num_blocks();
    // injective assignments of values to blocks give exactly the (a,b) with
    // ker(a,b) = P
    let mut values = vec![0usize; blocks];
    let mut used = vec![false; n];
    fn assign<E: Entry>(
        depth: usize,
        values: &mut Vec<usize>,
        used: &mut Vec<bool>,
        visit: &mut impl FnMut(&[usize]) -> Result<()>,
    ) -> Result<()> {
        if depth == values.len() {
            return visit(values);
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                values[depth] = v;
                assign::<E>(depth + 1, values, used, visit)?;
                used[v] = false;
            }
        }
        Ok(())
    }
    assign::<E>(0, &mut values, &mut used, &mut |vals| {
        let tuple: Vec<usize> = p.block_of().iter().map(|&b| vals[b]).collect();
        rhs = rhs.add(&build_that_h(h, &tuple[..k], &tuple[k..])?)?;
        Ok(())
    })?;
    Ok(LawCheck::new("|H|·T̂(P) = Σ_{ker(a,b)=P} T̂_H^{ab}", lhs, rhs))
}
