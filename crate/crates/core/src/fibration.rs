//! Graph fibrations presented by generating bilabelled graphs.
//!
//! A generator `(H, a, b)` contributes the word `g_{a*b}` to the fibre over
//! `H`. The fibres are the graphs whose every edge lies in a copy of some
//! generator graph: an embedded copy in the skew case, a homomorphic image in
//! the easy case. The fibre group over `K` is the normal closure of the
//! generator words pushed forward along those maps.

use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::diagram::BilabelledGraph;
use crate::error::{Error, Result};
use crate::free_product::{Membership, MembershipOracle, NormalClosureSpec, Strategy, Word};
use crate::graph::{
    canonical_form, f_union, quotient, CanonicalKey, Graph, HomSearch,
    VertexMap, VertexOverlap, VertexPartition, DEFAULT_CANONICAL_BOUND,
};
use crate::partition::{restricted_growth_strings, DEFAULT_PARTITION_BOUND};

/// Coset limit used when pruning redundant fibre generators. Pruning is an
/// optimisation, so it gives up early rather than stall.
const PRUNE_COSET_LIMIT: usize = 10_000;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "FibrationRepr", into = "FibrationRepr")]
pub struct GraphFibration {
    generators: Vec<BilabelledGraph>,
    easy: bool,
    max_vertices: usize,
    strategy: Strategy,
    closure: Vec<CanonicalKey>,
}

#[derive(Serialize, Deserialize)]
struct FibrationRepr {
    #[serde(default)]
    generators: Vec<BilabelledGraph>,
    #[serde(default)]
    easy: bool,
    max_vertices: usize,
    #[serde(default)]
    strategy: Strategy,
}

impl TryFrom<FibrationRepr> for GraphFibration {
    type Error = Error;
    fn try_from(r: FibrationRepr) -> Result<Self> {
        GraphFibration::new(r.generators, r.easy, r.max_vertices, r.strategy)
    }
}

impl From<GraphFibration> for FibrationRepr {
    fn from(f: GraphFibration) -> Self {
        FibrationRepr {
            generators: f.generators,
            easy: f.easy,
            max_vertices: f.max_vertices,
            strategy: f.strategy,
        }
    }
}

impl GraphFibration {
    /// Builds the fibration and enumerates its fibres up to `max_vertices`.
    pub fn new(
        generators: Vec<BilabelledGraph>,
        easy: bool,
        max_vertices: usize,
        strategy: Strategy,
    ) -> Result<Self> {
        if max_vertices > DEFAULT_CANONICAL_BOUND {
            return Err(Error::capacity(
                "closure vertex bound",
                max_vertices,
                DEFAULT_CANONICAL_BOUND,
            ));
        }
        let seeds: Vec<Graph> = seed_graphs(&generators, easy)?
            .into_iter()
            .filter(|s| s.vertex_count() <= max_vertices)
            .collect();
        let closure = close_under_copies(&seeds, max_vertices)?;
        Ok(GraphFibration {
            generators,
            easy,
            max_vertices,
            strategy,
            closure,
        })
    }

    pub fn generators(&self) -> &[BilabelledGraph] {
        &self.generators
    }

    pub fn is_easy(&self) -> bool {
        self.easy
    }

    pub fn max_vertices(&self) -> usize {
        self.max_vertices
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    /// Canonical keys of all fibres with at most `max_vertices` vertices,
    /// sorted by vertex count, then key.
    pub fn closure_keys(&self) -> &[CanonicalKey] {
        &self.closure
    }

    /// Canonical representatives of the fibres, in the order of
    /// [`closure_keys`](Self::closure_keys).
    pub fn closure_graphs(&self) -> Vec<Graph> {
        self.closure.iter().map(CanonicalKey::to_graph).collect()
    }

    /// Maps along which generator graphs are carried into `k`.
    fn carriers(&self, h: &Graph, k: &Graph) -> Vec<VertexMap> {
        HomSearch::new(h, k).injective(!self.easy).collect()
    }

    /// Edges of `k` lying in a copy of some generator graph.
    fn covered_edges(&self, k: &Graph) -> BTreeSet<(usize, usize)> {
        let mut covered = BTreeSet::new();
        for d in &self.generators {
            HomSearch::new(d.graph(), k)
                .injective(!self.easy)
                .for_each(|images| {
                    for (u, v) in d.graph().edges() {
                        let (x, y) = (images[u], images[v]);
                        covered.insert((x.min(y), x.max(y)));
                    }
                });
        }
        covered
    }

    /// Whether `k` carries a fibre. Exact for every size, not only up to the
    /// closure bound.
    pub fn is_fibre(&self, k: &Graph) -> bool {
        self.covered_edges(k).len() == k.edge_count()
    }

    /// Generators of `F(K)`: every generator word pushed along every carrier
    /// map, reduced, with empty and provably redundant words dropped.
    pub fn fiber_generators(&self, k: &Graph) -> Result<Vec<Word>> {
        if !self.is_fibre(k) {
            return Err(Error::AbsentFibre(format!("{k:?}")));
        }
        let n = k.vertex_count();
        let mut kept: Vec<Word> = Vec::new();
        let mut seen = HashSet::new();
        for d in &self.generators {
            let word = Word::between(d.inputs(), d.outputs());
            for psi in self.carriers(d.graph(), k) {
                let w = word.apply_map(psi.images()).reduce();
                if w.is_empty() || !seen.insert(w.clone()) {
                    continue;
                }
                if !self.is_redundant(n, &kept, &w)? {
                    kept.push(w);
                }
            }
        }
        Ok(kept)
    }

    fn is_redundant(&self, n: usize, kept: &[Word], w: &Word) -> Result<bool> {
        if kept.is_empty() {
            return Ok(false);
        }
        let spec = NormalClosureSpec::new(n, kept.to_vec(), self.strategy)?
            .with_coset_limit(PRUNE_COSET_LIMIT);
        let exact = match self.strategy {
            Strategy::Racg | Strategy::Auto => spec.racg_commutations().is_some(),
            Strategy::FiniteModel => true,
            Strategy::BoundedBfs(_) => false,
        };
        if !exact {
            return Ok(false);
        }
        let spec = if spec.racg_commutations().is_some() {
            spec.with_strategy(Strategy::Racg)
        } else {
            spec
        };
        let oracle = spec.oracle()?;
        Ok(oracle.is_exact() && oracle.member(w)? == Membership::Yes)
    }

    /// The fibre over `k` as a prepared membership oracle.
    pub fn fibre(&self, k: &Graph) -> Result<Fibre> {
        let generators = self.fiber_generators(k)?;
        let spec = NormalClosureSpec::new(k.vertex_count(), generators, self.strategy)?;
        let oracle = spec.oracle()?;
        Ok(Fibre { spec, oracle })
    }

    pub fn fiber_member(&self, k: &Graph, w: &Word) -> Result<Membership> {
        self.fibre(k)?.member(w)
    }

    /// Whether `d` belongs to the category of the fibration: its graph is a
    /// fibre and `g_{a*b}` lies in it.
    pub fn diagram_member(&self, d: &BilabelledGraph) -> Result<Membership> {
        if !self.is_fibre(d.graph()) {
            return Ok(Membership::No);
        }
        self.fiber_member(d.graph(), &Word::between(d.inputs(), d.outputs()))
    }

    /// The greatest subgraph of `g` that is a fibre. It spans `V(G)`, so the
    /// embedding is the identity; it is unique up to `Aut K`, which is
    /// verified.
    pub fn greatest_subgraph(&self, g: &Graph) -> Result<(Graph, VertexMap)> {
        let edges: Vec<(usize, usize)> = self.covered_edges(g).into_iter().collect();
        let k = Graph::from_edges(g.vertex_count(), &edges)?;
        if !self.is_fibre(&k) {
            return Err(Error::Invariant("union of fibre copies is not a fibre".into()));
        }
        for iota in HomSearch::new(&k, g).injective(true).collect() {
            if k.image(&iota, g.vertex_count()) != k {
                return Err(Error::Invariant(format!(
                    "embedding {:?} of the greatest fibre has a different image",
                    iota.images()
                )));
            }
        }
        Ok((k, VertexMap::identity(g.vertex_count())))
    }

    /// `(F2)`: `F(K)` is invariant under `Aut K`.
    pub fn check_aut_invariance(&self, k: &Graph) -> Result<Membership> {
        let fibre = self.fibre(k)?;
        let mut verdict = Membership::Yes;
        for phi in HomSearch::new(k, k).injective(true).collect() {
            for w in fibre.generators() {
                verdict = verdict.and(fibre.member(&w.apply_map(phi.images()))?);
            }
        }
        Ok(verdict)
    }

    /// `(F3)`: for every overlap `f`, both inclusions carry the fibres of `K`
    /// and `H` into the fibre of `K ∪_f H`.
    pub fn check_union_compatibility(&self, k: &Graph, h: &Graph) -> Result<Membership> {
        let fk = self.fibre(k)?;
        let fh = self.fibre(h)?;
        let mut verdict = Membership::Yes;
        for f in VertexOverlap::enumerate(k.vertex_count(), h.vertex_count()) {
            let (u, ik, ih) = f_union(k, h, &f)?;
            let fu = self.fibre(&u)?;
            for (fibre, inc) in [(&fk, &ik), (&fh, &ih)] {
                for w in fibre.generators() {
                    verdict = verdict.and(fu.member(&w.apply_map(inc.images()))?);
                }
            }
        }
        Ok(verdict)
    }

    /// `(F4)`: every quotient map carries `F(K)` into `F(K/π)`. Only
    /// meaningful for easy fibrations.
    pub fn check_quotient_compatibility(&self, k: &Graph) -> Result<Membership> {
        let n = k.vertex_count();
        if n > DEFAULT_PARTITION_BOUND {
            return Err(Error::capacity("partition point count", n, DEFAULT_PARTITION_BOUND));
        }
        let fk = self.fibre(k)?;
        let mut verdict = Membership::Yes;
        for rgs in restricted_growth_strings(n) {
            let (kq, q) = quotient(k, &VertexPartition::from_labels(&rgs))?;
            let fq = self.fibre(&kq)?;
            for w in fk.generators() {
                verdict = verdict.and(fq.member(&w.apply_map(q.images()))?);
            }
        }
        Ok(verdict)
    }

    /// Whether every graph with a loop at each vertex and at most
    /// `max_vertices` vertices is a fibre.
    pub fn contains_all_looped(&self) -> bool {
        (0..=self.max_vertices).all(|n| {
            let pairs: Vec<(usize, usize)> =
                (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
            (0u64..1 << pairs.len()).all(|mask| {
                let mut g = Graph::edgeless(n).add_loops_everywhere();
                for (i, &(u, v)) in pairs.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        g.add_edge(u, v).expect("in range");
                    }
                }
                self.is_fibre(&g)
            })
        })
    }

    /// Whether some generator graph has an edge between distinct vertices.
    /// Loops alone never produce one, not even through quotients.
    pub fn has_edged_generator(&self) -> bool {
        self.generators
            .iter()
            .any(|d| d.graph().edges().iter().any(|&(u, v)| u != v))
    }
}

/// A fibre group `F(K)` ready for membership queries.
#[derive(Clone, Debug)]
pub struct Fibre {
    spec: NormalClosureSpec,
    oracle: MembershipOracle,
}

impl Fibre {
    pub fn generators(&self) -> &[Word] {
        &self.spec.generators
    }

    pub fn spec(&self) -> &NormalClosureSpec {
        &self.spec
    }

    pub fn member(&self, w: &Word) -> Result<Membership> {
        self.oracle.member(w)
    }

    pub fn is_exact(&self) -> bool {
        self.oracle.is_exact()
    }
}

/// Graphs whose copies may be added to a fibre: the generator graphs, and in
/// the easy case all their quotients. Edgeless ones add nothing.
fn seed_graphs(generators: &[BilabelledGraph], easy: bool) -> Result<Vec<Graph>> {
    let mut keys = BTreeSet::new();
    for d in generators {
        let g = d.graph();
        if easy {
            let n = g.vertex_count();
            if n > DEFAULT_PARTITION_BOUND {
                return Err(Error::capacity("partition point count", n, DEFAULT_PARTITION_BOUND));
            }
            for rgs in restricted_growth_strings(n) {
                let (q, _) = quotient(g, &VertexPartition::from_labels(&rgs))?;
                keys.insert(canonical_form(&q)?.key);
            }
        } else {
            keys.insert(canonical_form(g)?.key);
        }
    }
    Ok(keys
        .into_iter()
        .map(|k| k.to_graph())
        .filter(|g| g.edge_count() > 0)
        .collect())
}

/// Starting from every edgeless graph, repeatedly f-union a seed along an
/// overlap that matches all of its vertices. Any f-union of two fibres
/// arises this way, since both are covered by seed copies.
fn close_under_copies(seeds: &[Graph], bound: usize) -> Result<Vec<CanonicalKey>> {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    for n in 0..=bound {
        let key = canonical_form(&Graph::edgeless(n))?.key;
        seen.insert(key.clone());
        queue.push_back(key);
    }
    while let Some(key) = queue.pop_front() {
        let k = key.to_graph();
        let n = k.vertex_count();
        for seed in seeds.iter().filter(|s| s.vertex_count() <= n) {
            for images in injections(seed.vertex_count(), n) {
                let pairs: Vec<(usize, usize)> =
                    images.iter().enumerate().map(|(x, &v)| (v, x)).collect();
                let (u, _, _) = f_union(&k, seed, &VertexOverlap::new(pairs)?)?;
                if u.edge_count() == k.edge_count() {
                    continue;
                }
                let key = canonical_form(&u)?.key;
                if seen.insert(key.clone()) {
                    queue.push_back(key);
                }
            }
        }
    }
    Ok(seen.into_iter().collect())
}

/// All injective maps `0..m → 0..n` in lexicographic order.
fn injections(m: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(m: usize, n: usize, used: &mut [bool], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                rec(m, n, used, cur, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(m, n, &mut vec![false; n], &mut Vec::with_capacity(m), &mut out);
    out
}

/// The fibration generated by `(G, ∅, a)` for `a` the identity and the
/// generators of `A`.
///
/// `A` must be invariant under `End G` when `easy`, and under `Aut G`
/// otherwise; both are checked on generators. The fibre over `G` is then
/// checked to coincide with `A`.
pub fn fibration_from_group(
    g: &Graph,
    a: &NormalClosureSpec,
    easy: bool,
    max_vertices: usize,
) -> Result<GraphFibration> {
    let n = g.vertex_count();
    if a.alphabet != n {
        return Err(Error::validation(format!(
            "subgroup over {} letters for a graph on {n} vertices",
            a.alphabet
        )));
    }
    let oracle = a.oracle()?;
    let maps = HomSearch::new(g, g).injective(!easy).collect();
    for phi in &maps {
        for w in &a.generators {
            let image = w.apply_map(phi.images());
            match oracle.member(&image)? {
                Membership::Yes => {}
                Membership::No => {
                    return Err(Error::Invariance(format!(
                        "{} maps generator {w} to {image}, which is not in the subgroup",
                        if easy { "endomorphism" } else { "automorphism" },
                    )))
                }
                Membership::Unknown => {
                    return Err(Error::Indeterminate(format!(
                        "invariance of generator {w} under {:?}",
                        phi.images()
                    )))
                }
            }
        }
    }
    // (G, ∅, ∅) stands for the identity of A and makes G a fibre even when
    // A is trivial
    let generators = std::iter::once(&Word::empty())
        .chain(&a.generators)
        .map(|w| BilabelledGraph::new(g.clone(), Vec::new(), w.letters().to_vec()))
        .collect::<Result<Vec<_>>>()?;
    let f = GraphFibration::new(generators, easy, max_vertices, a.strategy)?;
    let fibre = f.fibre(g)?;
    let round_trip = fibre
        .generators()
        .iter()
        .map(|w| oracle.member(w))
        .chain(a.generators.iter().map(|w| fibre.member(w)));
    for verdict in round_trip {
        match verdict? {
            Membership::Yes => {}
            Membership::No => {
                return Err(Error::Invariant("fibre over G differs from the subgroup".into()))
            }
            Membership::Unknown => {
                return Err(Error::Indeterminate("fibre over G versus the subgroup".into()))
            }
        }
    }
    Ok(f)
}
