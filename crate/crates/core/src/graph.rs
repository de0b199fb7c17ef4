//! Finite undirected graphs with loops, vertex maps, quotients, f-unions,
//! homomorphism search and canonical forms.
//!
//! Vertices are the dense integers `0..n`. A loop is an edge `{v, v}`; there
//! are never multiple edges.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default vertex bound for [`canonical_form`].
pub const DEFAULT_CANONICAL_BOUND: usize = 8;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[derive(Serialize, Deserialize)]
#[serde(try_from = "GraphRepr", into = "GraphRepr")]
pub struct Graph {
    n: usize,
    // symmetric n*n adjacency matrix, row-major
    adj: Vec<bool>,
}

impl Graph {
    /// The edgeless graph `N_n`.
    pub fn edgeless(n: usize) -> Self {
        Graph {
            n,
            adj: vec![false; n * n],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::edgeless(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// `K_n` without loops.
    pub fn complete(n: usize) -> Self {
        let mut g = Graph::edgeless(n);
        for u in 0..n {
            for v in u + 1..n {
                g.set(u, v, true);
            }
        }
        g
    }

    /// Path `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize) -> Self {
        let mut g = Graph::edgeless(n);
        for v in 1..n {
            g.set(v - 1, v, true);
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Graph::path(n);
        if n >= 3 {
            g.set(n - 1, 0, true);
        }
        g
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.adj[u * self.n + v]
    }

    pub fn has_loop(&self, v: usize) -> bool {
        self.has_edge(v, v)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u >= self.n || v >= self.n {
            return Err(Error::validation(format!(
                "edge {{{u},{v}}} out of range for {} vertices",
                self.n
            )));
        }
        self.set(u, v, true);
        Ok(())
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        if u < self.n && v < self.n {
            self.set(u, v, false);
        }
    }

    fn set(&mut self, u: usize, v: usize, value: bool) {
        self.adj[u * self.n + v] = value;
        self.adj[v * self.n + u] = value;
    }

    /// Edges as `(u, v)` with `u <= v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in u..self.n {
                if self.adj[u * self.n + v] {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&w| self.adj[v * self.n + w])
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors(v).count()
    }

    pub fn is_loopless(&self) -> bool {
        (0..self.n).all(|v| !self.has_loop(v))
    }

    /// `self ⊔ other`, with the vertices of `other` shifted by `self.vertex_count()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.n;
        let mut g = Graph::edgeless(self.n + other.n);
        for (u, v) in self.edges() {
            g.set(u, v, true);
        }
        for (u, v) in other.edges() {
            g.set(u + shift, v + shift, true);
        }
        g
    }

    /// Adds a loop at every vertex. This is the "loops everywhere" convention
    /// as an explicit preprocessing step; nothing in the crate applies it
    /// implicitly.
    pub fn add_loops_everywhere(&self) -> Graph {
        let mut g = self.clone();
        for v in 0..self.n {
            g.set(v, v, true);
        }
        g
    }

    /// Image of the graph under a vertex map into `target_n` vertices. Edges
    /// between identified vertices become loops.
    pub fn image(&self, map: &VertexMap, target_n: usize) -> Graph {
        let mut g = Graph::edgeless(target_n);
        for (u, v) in self.edges() {
            g.set(map.apply(u), map.apply(v), true);
        }
        g
    }

    /// Parses graph6 (loopless); loops are not representable in that format.
    pub fn from_graph6(text: &str) -> Result<Graph> {
        let bytes: Vec<u8> = text.trim().bytes().collect();
        let bad = || Error::validation(format!("malformed graph6 string {text:?}"));
        if bytes.iter().any(|&b| !(63..=126).contains(&b)) {
            return Err(bad());
        }
        let (n, rest) = match bytes.as_slice() {
            [126, 126, tail @ ..] => {
                if tail.len() < 6 {
                    return Err(bad());
                }
                let n = tail[..6]
                    .iter()
                    .fold(0usize, |acc, &b| (acc << 6) | (b - 63) as usize);
                (n, &tail[6..])
            }
            [126, tail @ ..] => {
                if tail.len() < 3 {
                    return Err(bad());
                }
                let n = tail[..3]
                    .iter()
                    .fold(0usize, |acc, &b| (acc << 6) | (b - 63) as usize);
                (n, &tail[3..])
            }
            [b, tail @ ..] => ((b - 63) as usize, tail),
            [] => return Err(bad()),
        };
        let needed = (n * n.saturating_sub(1) / 2).div_ceil(6);
        if rest.len() != needed {
            return Err(bad());
        }
        let mut bits = rest
            .iter()
            .flat_map(|&b| (0..6).rev().map(move |i| ((b - 63) >> i) & 1 == 1));
        let mut g = Graph::edgeless(n);
        for v in 1..n {
            for u in 0..v {
                if bits.next().unwrap_or(false) {
                    g.set(u, v, true);
                }
            }
        }
        Ok(g)
    }

    /// graph6 encoding of the loopless part of the graph.
    pub fn to_graph6(&self) -> String {
        let n = self.n;
        let mut out = Vec::new();
        if n < 63 {
            out.push(n as u8 + 63);
        } else if n < 258_048 {
            out.push(126);
            for shift in [12, 6, 0] {
                out.push(((n >> shift) & 63) as u8 + 63);
            }
        } else {
            out.extend([126, 126]);
            for shift in [30, 24, 18, 12, 6, 0] {
                out.push(((n >> shift) & 63) as u8 + 63);
            }
        }
        let mut acc = 0u8;
        let mut filled = 0;
        for v in 1..n {
            for u in 0..v {
                acc = (acc << 1) | self.has_edge(u, v) as u8;
                filled += 1;
                if filled == 6 {
                    out.push(acc + 63);
                    acc = 0;
                    filled = 0;
                }
            }
        }
        if filled > 0 {
            out.push((acc << (6 - filled)) + 63);
        }
        String::from_utf8(out).expect("graph6 is ascii")
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edges())
    }
}

/// JSON shape: `{"n": 3, "edges": [[0,1],[1,2]]}`, or
/// `{"graph6": "Bg", "loops": [0]}`.
#[derive(Serialize, Deserialize)]
struct GraphRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    edges: Option<Vec<[usize; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    graph6: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    loops: Vec<usize>,
}

impl TryFrom<GraphRepr> for Graph {
    type Error = Error;

    fn try_from(repr: GraphRepr) -> Result<Graph> {
        let mut g = match (repr.n, repr.graph6) {
            (Some(n), None) => {
                let edges: Vec<(usize, usize)> = repr
                    .edges
                    .unwrap_or_default()
                    .into_iter()
                    .map(|[u, v]| (u, v))
                    .collect();
                Graph::from_edges(n, &edges)?
            }
            (None, Some(text)) => {
                if repr.edges.is_some() {
                    return Err(Error::validation("graph6 graphs take no \"edges\" field"));
                }
                Graph::from_graph6(&text)?
            }
            _ => {
                return Err(Error::validation(
                    "graph needs exactly one of \"n\" or \"graph6\"",
                ))
            }
        };
        for v in repr.loops {
            g.add_edge(v, v)?;
        }
        Ok(g)
    }
}

impl From<Graph> for GraphRepr {
    fn from(g: Graph) -> Self {
        GraphRepr {
            n: Some(g.n),
            edges: Some(g.edges().into_iter().map(|(u, v)| [u, v]).collect()),
            graph6: None,
            loops: Vec::new(),
        }
    }
}

/// A total function on the vertices `0..domain_size`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexMap {
    images: Vec<usize>,
}

impl VertexMap {
    pub fn new(images: Vec<usize>) -> Self {
        VertexMap { images }
    }

    pub fn identity(n: usize) -> Self {
        VertexMap {
            images: (0..n).collect(),
        }
    }

    pub fn domain_size(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, v: usize) -> usize {
        self.images[v]
    }

    pub fn apply_all(&self, vs: &[usize]) -> Vec<usize> {
        vs.iter().map(|&v| self.images[v]).collect()
    }

    /// `self ∘ inner`: first `inner`, then `self`.
    pub fn after(&self, inner: &VertexMap) -> VertexMap {
        VertexMap {
            images: inner.images.iter().map(|&v| self.images[v]).collect(),
        }
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.images.iter().all(|v| seen.insert(*v))
    }

    /// Inverse of a bijection on `0..n`.
    pub fn inverse(&self) -> Option<VertexMap> {
        let n = self.images.len();
        let mut inv = vec![usize::MAX; n];
        for (v, &w) in self.images.iter().enumerate() {
            if w >= n || inv[w] != usize::MAX {
                return None;
            }
            inv[w] = v;
        }
        Some(VertexMap { images: inv })
    }

    pub fn is_homomorphism(&self, source: &Graph, target: &Graph) -> bool {
        self.images.len() == source.vertex_count()
            && self.images.iter().all(|&v| v < target.vertex_count())
            && source
                .edges()
                .into_iter()
                .all(|(u, v)| target.has_edge(self.apply(u), self.apply(v)))
    }
}

/// A set partition of `0..n` into nonempty blocks.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VertexPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl VertexPartition {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::validation("partition has an empty block"));
            }
            for &v in block {
                if v >= n {
                    return Err(Error::validation(format!(
                        "partition mentions vertex {v} of a {n}-vertex graph"
                    )));
                }
                if std::mem::replace(&mut seen[v], true) {
                    return Err(Error::validation(format!(
                        "vertex {v} lies in two blocks"
                    )));
                }
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(Error::validation(format!("vertex {v} lies in no block")));
        }
        Ok(VertexPartition { n, blocks })
    }

    /// Partition with block `labels[v]` for vertex `v`; blocks are ordered by
    /// first occurrence.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut ids = std::collections::HashMap::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (v, label) in labels.iter().enumerate() {
            let next = ids.len();
            let id = *ids.entry(*label).or_insert(next);
            if id == blocks.len() {
                blocks.push(Vec::new());
            }
            blocks[id].push(v);
        }
        VertexPartition {
            n: labels.len(),
            blocks,
        }
    }

    /// Finest partition of `0..n` in which each given pair shares a block.
    /// Blocks are ordered by their least element.
    pub fn generated_by(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut v: usize) -> usize {
            while parent[v] != v {
                parent[v] = parent[parent[v]];
                v = parent[v];
            }
            v
        }
        for &(u, v) in pairs {
            if u >= n || v >= n {
                return Err(Error::validation(format!(
                    "identification ({u},{v}) out of range for {n} vertices"
                )));
            }
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru != rv {
                parent[ru.max(rv)] = ru.min(rv);
            }
        }
        let labels: Vec<usize> = (0..n).map(|v| find(&mut parent, v)).collect();
        Ok(VertexPartition::from_labels(&labels))
    }

    pub fn singletons(n: usize) -> Self {
        VertexPartition {
            n,
            blocks: (0..n).map(|v| vec![v]).collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// The surjection `q_π` sending each vertex to the index of its block.
    pub fn projection(&self) -> VertexMap {
        let mut images = vec![0; self.n];
        for (b, block) in self.blocks.iter().enumerate() {
            for &v in block {
                images[v] = b;
            }
        }
        VertexMap { images }
    }
}

/// An injective partial function between the vertex sets of two graphs,
/// stored as sorted `(vertex of K, vertex of H)` pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<(usize, usize)>", into = "Vec<(usize, usize)>")]
pub struct VertexOverlap {
    pairs: Vec<(usize, usize)>,
}

impl VertexOverlap {
    pub fn empty() -> Self {
        VertexOverlap::default()
    }

    pub fn new(mut pairs: Vec<(usize, usize)>) -> Result<Self> {
        pairs.sort_unstable();
        pairs.dedup();
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::validation(format!(
                    "overlap maps vertex {} twice",
                    w[0].0
                )));
            }
        }
        let mut right: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        right.sort_unstable();
        if let Some(w) = right.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::validation(format!(
                "overlap hits vertex {} twice",
                w[0]
            )));
        }
        Ok(VertexOverlap { pairs })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, pair: (usize, usize)) -> bool {
        self.pairs.binary_search(&pair).is_ok()
    }

    /// The same identification read from `H` to `K`.
    pub fn inverse(&self) -> VertexOverlap {
        let mut pairs: Vec<_> = self.pairs.iter().map(|&(a, b)| (b, a)).collect();
        pairs.sort_unstable();
        VertexOverlap { pairs }
    }

    fn check_range(&self, k: usize, h: usize) -> Result<()> {
        match self.pairs.iter().find(|&&(a, b)| a >= k || b >= h) {
            Some(&(a, b)) => Err(Error::validation(format!(
                "overlap pair ({a},{b}) out of range for graphs with {k} and {h} vertices"
            ))),
            None => Ok(()),
        }
    }

    /// Every vertex overlap between graphs on `k` and `h` vertices, in
    /// lexicographic order of the sorted pair lists.
    pub fn enumerate(k: usize, h: usize) -> Vec<VertexOverlap> {
        let mut out = Vec::new();
        let mut used = vec![false; h];
        let mut current = Vec::new();
        fn rec(
            v: usize,
            k: usize,
            h: usize,
            used: &mut [bool],
            current: &mut Vec<(usize, usize)>,
            out: &mut Vec<VertexOverlap>,
        ) {
            if v == k {
                out.push(VertexOverlap {
                    pairs: current.clone(),
                });
                return;
            }
            rec(v + 1, k, h, used, current, out);
            for w in 0..h {
                if !used[w] {
                    used[w] = true;
                    current.push((v, w));
                    rec(v + 1, k, h, used, current, out);
                    current.pop();
                    used[w] = false;
                }
            }
        }
        rec(0, k, h, &mut used, &mut current, &mut out);
        out.sort();
        out
    }
}

impl TryFrom<Vec<(usize, usize)>> for VertexOverlap {
    type Error = Error;
    fn try_from(pairs: Vec<(usize, usize)>) -> Result<Self> {
        VertexOverlap::new(pairs)
    }
}

impl From<VertexOverlap> for Vec<(usize, usize)> {
    fn from(f: VertexOverlap) -> Self {
        f.pairs
    }
}

/// `K/π` together with the projection `q_π`. Block `i` of `π` becomes vertex `i`.
pub fn quotient(k: &Graph, partition: &VertexPartition) -> Result<(Graph, VertexMap)> {
    if partition.vertex_count() != k.vertex_count() {
        return Err(Error::validation(format!(
            "partition of {} points applied to a {}-vertex graph",
            partition.vertex_count(),
            k.vertex_count()
        )));
    }
    let q = partition.projection();
    Ok((k.image(&q, partition.num_blocks()), q))
}

/// `K ∪_f H` with the inclusions `f_K` and `f_H`.
///
/// Vertices of `K` keep their numbers; unmatched vertices of `H` follow in
/// increasing order.
pub fn f_union(
    k: &Graph,
    h: &Graph,
    f: &VertexOverlap,
) -> Result<(Graph, VertexMap, VertexMap)> {
    let (nk, nh) = (k.vertex_count(), h.vertex_count());
    f.check_range(nk, nh)?;
    let pairs: Vec<(usize, usize)> = f.pairs().iter().map(|&(a, b)| (a, nk + b)).collect();
    let partition = VertexPartition::generated_by(nk + nh, &pairs)?;
    let (g, q) = quotient(&k.disjoint_union(h), &partition)?;
    let fk = VertexMap::new(q.images()[..nk].to_vec());
    let fh = VertexMap::new(q.images()[nk..].to_vec());
    Ok((g, fk, fh))
}

/// Backtracking search for graph homomorphisms `source → target`.
///
/// Pinned vertices are assigned first, the rest in order of decreasing degree.
/// A non-loop edge may collapse onto a single target vertex only if that
/// vertex carries a loop.
#[derive(Clone, Debug)]
pub struct HomSearch<'a> {
    source: &'a Graph,
    target: &'a Graph,
    pins: Vec<Option<usize>>,
    injective: bool,
}

impl<'a> HomSearch<'a> {
    pub fn new(source: &'a Graph, target: &'a Graph) -> Self {
        HomSearch {
            source,
            target,
            pins: vec![None; source.vertex_count()],
            injective: false,
        }
    }

    pub fn injective(mut self, injective: bool) -> Self {
        self.injective = injective;
        self
    }

    pub fn pins(mut self, pins: &[Option<usize>]) -> Result<Self> {
        if pins.len() != self.source.vertex_count() {
            return Err(Error::validation(format!(
                "{} pins given for a {}-vertex graph",
                pins.len(),
                self.source.vertex_count()
            )));
        }
        if let Some(t) = pins
            .iter()
            .flatten()
            .find(|&&t| t >= self.target.vertex_count())
        {
            return Err(Error::validation(format!("pin target {t} out of range")));
        }
        self.pins = pins.to_vec();
        Ok(self)
    }

    /// Pins `v ↦ t`, intersecting with an existing pin. Returns `false` if the
    /// pins become contradictory (no homomorphism can exist).
    pub fn pin(&mut self, v: usize, t: usize) -> bool {
        match self.pins[v] {
            Some(existing) => existing == t,
            None => {
                self.pins[v] = Some(t);
                true
            }
        }
    }

    fn order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.source.vertex_count()).collect();
        order.sort_by_key(|&v| {
            (
                self.pins[v].is_none(),
                std::cmp::Reverse(self.source.degree(v)),
                v,
            )
        });
        order
    }

    /// Calls `visit` with the image tuple of every homomorphism. Visiting
    /// order is deterministic but not lexicographic.
    pub fn for_each(&self, mut visit: impl FnMut(&[usize])) {
        let n = self.source.vertex_count();
        let m = self.target.vertex_count();
        if n > 0 && m == 0 {
            return;
        }
        if self.injective && n > m {
            return;
        }
        let order = self.order();
        let mut position = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            position[v] = i;
        }
        // for each step, the already-placed neighbours of the vertex placed there
        let back: Vec<Vec<usize>> = order
            .iter()
            .map(|&v| {
                self.source
                    .neighbors(v)
                    .filter(|&w| w != v && position[w] < position[v])
                    .collect()
            })
            .collect();
        let mut images = vec![usize::MAX; n];
        let mut used = vec![false; m];
        self.extend(0, &order, &back, &mut images, &mut used, &mut visit);
    }

    fn extend(
        &self,
        step: usize,
        order: &[usize],
        back: &[Vec<usize>],
        images: &mut [usize],
        used: &mut [bool],
        visit: &mut impl FnMut(&[usize]),
    ) {
        if step == order.len() {
            visit(images);
            return;
        }
        let v = order[step];
        let candidates = match self.pins[v] {
            Some(t) => t..t + 1,
            None => 0..self.target.vertex_count(),
        };
        for t in candidates {
            if self.injective && used[t] {
                continue;
            }
            if self.source.has_loop(v) && !self.target.has_loop(t) {
                continue;
            }
            if !back[step].iter().all(|&w| self.target.has_edge(images[w], t)) {
                continue;
            }
            images[v] = t;
            used[t] = true;
            self.extend(step + 1, order, back, images, used, visit);
            used[t] = false;
        }
        images[v] = usize::MAX;
    }

    pub fn count(&self) -> u64 {
        let mut c = 0;
        self.for_each(|_| c += 1);
        c
    }

    /// All homomorphisms, sorted lexicographically by image tuple.
    pub fn collect(&self) -> Vec<VertexMap> {
        let mut out = Vec::new();
        self.for_each(|images| out.push(VertexMap::new(images.to_vec())));
        out.sort();
        out
    }
}

/// Homomorphisms `source → target` extending `pins`, sorted lexicographically.
pub fn enumerate_homomorphisms(
    source: &Graph,
    target: &Graph,
    pins: &[Option<usize>],
    injective: bool,
) -> Result<Vec<VertexMap>> {
    Ok(HomSearch::new(source, target)
        .pins(pins)?
        .injective(injective)
        .collect())
}

/// `Aut G`, sorted, identity first.
///
/// An injective endomorphism of a finite graph permutes both vertices and
/// edges, so its inverse is again a homomorphism.
pub fn automorphisms(g: &Graph) -> Vec<VertexMap> {
    HomSearch::new(g, g).injective(true).collect()
}

/// Canonical isomorphism-class key: vertex count plus the lexicographically
/// minimal lower-triangular adjacency bit string over all relabelings.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalKey {
    n: usize,
    bits: Vec<bool>,
}

impl CanonicalKey {
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Rebuilds the canonical representative graph.
    pub fn to_graph(&self) -> Graph {
        let mut g = Graph::edgeless(self.n);
        let mut idx = 0;
        for col in 0..self.n {
            for row in 0..=col {
                if self.bits[idx] {
                    g.set(row, col, true);
                }
                idx += 1;
            }
        }
        g
    }

    /// Hex digest of the bit string, for printing.
    pub fn hex(&self) -> String {
        let mut out = format!("{}:", self.n);
        for chunk in self.bits.chunks(4) {
            let nibble = chunk
                .iter()
                .enumerate()
                .fold(0u8, |acc, (i, &b)| acc | ((b as u8) << (3 - i)));
            out.push(char::from_digit(nibble as u32, 16).expect("nibble"));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    pub key: CanonicalKey,
    /// Sends each original vertex to its position in the canonical graph.
    pub relabel: VertexMap,
}

pub fn canonical_form(g: &Graph) -> Result<CanonicalForm> {
    canonical_form_bounded(g, DEFAULT_CANONICAL_BOUND)
}

/// Exhaustive branch-and-bound over vertex orders. The bits of column `i`
/// depend only on the first `i + 1` chosen vertices, so a prefix that is
/// already larger than the best string can be cut.
pub fn canonical_form_bounded(g: &Graph, bound: usize) -> Result<CanonicalForm> {
    let n = g.vertex_count();
    if n > bound {
        return Err(Error::capacity("canonical form vertex count", n, bound));
    }
    struct Search<'g> {
        g: &'g Graph,
        n: usize,
        best: Option<(Vec<bool>, Vec<usize>)>,
        order: Vec<usize>,
        used: Vec<bool>,
        bits: Vec<bool>,
    }
    impl Search<'_> {
        // `tight`: the current prefix equals the best prefix so far
        fn go(&mut self, tight: bool) {
            let depth = self.order.len();
            if depth == self.n {
                if self.best.as_ref().is_none_or(|(b, _)| self.bits < *b) {
                    self.best = Some((self.bits.clone(), self.order.clone()));
                }
                return;
            }
            for v in 0..self.n {
                if self.used[v] {
                    continue;
                }
                let start = self.bits.len();
                for &w in &self.order {
                    self.bits.push(self.g.has_edge(w, v));
                }
                self.bits.push(self.g.has_loop(v));
                let mut next_tight = false;
                let mut prune = false;
                if tight {
                    if let Some((best, _)) = &self.best {
                        match self.bits[start..].cmp(&best[start..self.bits.len()]) {
                            std::cmp::Ordering::Greater => prune = true,
                            std::cmp::Ordering::Equal => next_tight = true,
                            std::cmp::Ordering::Less => {}
                        }
                    }
                }
                if !prune {
                    self.used[v] = true;
                    self.order.push(v);
                    self.go(next_tight);
                    self.order.pop();
                    self.used[v] = false;
                }
                self.bits.truncate(start);
            }
        }
    }
    let mut search = Search {
        g,
        n,
        best: None,
        order: Vec::with_capacity(n),
        used: vec![false; n],
        bits: Vec::with_capacity(n * (n + 1) / 2),
    };
    search.go(true);
    let (bits, order) = search.best.unwrap_or_default();
    let mut relabel = vec![0; n];
    for (pos, &v) in order.iter().enumerate() {
        relabel[v] = pos;
    }
    Ok(CanonicalForm {
        key: CanonicalKey { n, bits },
        relabel: VertexMap::new(relabel),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_homs(k: &Graph, g: &Graph, injective: bool) -> Vec<Vec<usize>> {
        let (n, m) = (k.vertex_count(), g.vertex_count());
        let total = m.pow(n as u32);
        let mut out = Vec::new();
        for code in 0..total {
            let mut images = Vec::with_capacity(n);
            let mut c = code;
            for _ in 0..n {
                images.push(c % m);
                c /= m;
            }
            images.reverse();
            let map = VertexMap::new(images.clone());
            if map.is_homomorphism(k, g) && (!injective || map.is_injective()) {
                out.push(images);
            }
        }
        if n == 0 {
            out = vec![vec![]];
        }
        out.sort();
        out
    }

    #[test]
    fn quotient_of_path_by_ends() {
        let p = Graph::path(3);
        let pi = VertexPartition::new(3, vec![vec![0, 2], vec![1]]).unwrap();
        let (q, map) = quotient(&p, &pi).unwrap();
        assert_eq!(q, Graph::from_edges(2, &[(0, 1)]).unwrap());
        assert_eq!(map.images(), &[0, 1, 0]);
    }

    #[test]
    fn quotient_by_singletons_is_identity() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (3, 3)]).unwrap();
        let (q, map) = quotient(&g, &VertexPartition::singletons(4)).unwrap();
        assert_eq!(q, g);
        assert_eq!(map, VertexMap::identity(4));
    }

    #[test]
    fn quotient_of_edge_is_loop() {
        let (q, _) = quotient(
            &Graph::complete(2),
            &VertexPartition::new(2, vec![vec![0, 1]]).unwrap(),
        )
        .unwrap();
        assert_eq!(q, Graph::from_edges(1, &[(0, 0)]).unwrap());
    }

    #[test]
    fn invalid_partitions_are_rejected() {
        assert!(VertexPartition::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(VertexPartition::new(3, vec![vec![0, 1]]).is_err());
        assert!(VertexPartition::new(2, vec![vec![0, 1], vec![]]).is_err());
        assert!(quotient(&Graph::path(3), &VertexPartition::singletons(2)).is_err());
    }

    #[test]
    fn f_union_examples() {
        let e = Graph::complete(2);
        let (g, fk, fh) = f_union(&e, &e, &VertexOverlap::empty()).unwrap();
        assert_eq!(g, e.disjoint_union(&e));
        assert_eq!(fk.images(), &[0, 1]);
        assert_eq!(fh.images(), &[2, 3]);

        let full = VertexOverlap::new(vec![(0, 0), (1, 1)]).unwrap();
        assert_eq!(f_union(&e, &e, &full).unwrap().0, e);

        let (g, _, fh) = f_union(&e, &e, &VertexOverlap::new(vec![(1, 0)]).unwrap()).unwrap();
        assert_eq!(g, Graph::path(3));
        assert_eq!(fh.images(), &[1, 2]);
        assert_eq!(g.vertex_count(), 2 + 2 - 1);
    }

    #[test]
    fn bad_overlaps_are_rejected() {
        assert!(VertexOverlap::new(vec![(0, 0), (0, 1)]).is_err());
        assert!(VertexOverlap::new(vec![(0, 1), (1, 1)]).is_err());
        let f = VertexOverlap::new(vec![(5, 0)]).unwrap();
        assert!(f_union(&Graph::complete(2), &Graph::complete(2), &f).is_err());
    }

    #[test]
    fn overlap_enumeration_counts() {
        // sum_j C(k,j) C(h,j) j!
        assert_eq!(VertexOverlap::enumerate(2, 2).len(), 7);
        assert_eq!(VertexOverlap::enumerate(3, 2).len(), 1 + 6 + 6);
        assert_eq!(VertexOverlap::enumerate(0, 4).len(), 1);
        let all = VertexOverlap::enumerate(3, 3);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn hom_examples() {
        let edge = Graph::complete(2);
        let tri = Graph::complete(3);
        assert_eq!(enumerate_homomorphisms(&edge, &tri, &[None, None], false).unwrap().len(), 6);
        assert_eq!(
            enumerate_homomorphisms(&Graph::edgeless(1), &tri, &[None], false)
                .unwrap()
                .len(),
            3
        );
        assert!(enumerate_homomorphisms(&tri, &edge, &[None; 3], false)
            .unwrap()
            .is_empty());
        let empty = enumerate_homomorphisms(&Graph::edgeless(0), &tri, &[], false).unwrap();
        assert_eq!(empty, vec![VertexMap::new(vec![])]);
    }

    #[test]
    fn homs_match_brute_force_with_loops() {
        let graphs = [
            Graph::complete(2),
            Graph::path(3),
            Graph::from_edges(3, &[(0, 0), (0, 1)]).unwrap(),
            Graph::from_edges(2, &[(1, 1)]).unwrap(),
            Graph::complete(3).add_loops_everywhere(),
            Graph::edgeless(2),
            Graph::cycle(4),
        ];
        for k in &graphs {
            for g in &graphs {
                for inj in [false, true] {
                    let ours: Vec<Vec<usize>> = HomSearch::new(k, g)
                        .injective(inj)
                        .collect()
                        .into_iter()
                        .map(|m| m.images().to_vec())
                        .collect();
                    assert_eq!(ours, brute_force_homs(k, g, inj), "{k:?} -> {g:?}");
                }
            }
        }
    }

    #[test]
    fn pins_restrict_and_contradict() {
        let tri = Graph::complete(3);
        let path = Graph::path(3);
        let pinned = enumerate_homomorphisms(&path, &tri, &[Some(0), None, Some(0)], false).unwrap();
        assert_eq!(pinned.len(), 2);
        let mut search = HomSearch::new(&path, &tri);
        assert!(search.pin(0, 1));
        assert!(!search.pin(0, 2));
        assert!(enumerate_homomorphisms(&path, &tri, &[Some(7), None, None], false).is_err());
    }

    #[test]
    fn automorphism_examples() {
        assert_eq!(automorphisms(&Graph::complete(2)).len(), 2);
        assert_eq!(automorphisms(&Graph::edgeless(1)), vec![VertexMap::identity(1)]);
        let g = Graph::complete(2).disjoint_union(&Graph::edgeless(1));
        let auts = automorphisms(&g);
        assert_eq!(auts.len(), 2);
        assert!(auts.contains(&VertexMap::new(vec![1, 0, 2])));
    }

    #[test]
    fn automorphisms_form_a_group() {
        for g in [Graph::cycle(4), Graph::path(4), Graph::complete(3), Graph::edgeless(3)] {
            let auts = automorphisms(&g);
            assert_eq!(auts[0], VertexMap::identity(g.vertex_count()));
            for a in &auts {
                assert!(auts.contains(&a.inverse().unwrap()));
                for b in &auts {
                    assert!(auts.contains(&a.after(b)));
                }
            }
        }
    }

    #[test]
    fn canonical_form_examples() {
        let p = Graph::path(3);
        let relabeled = Graph::from_edges(3, &[(2, 0), (0, 1)]).unwrap();
        assert_eq!(canonical_form(&p).unwrap().key, canonical_form(&relabeled).unwrap().key);
        assert_ne!(
            canonical_form(&Graph::complete(2)).unwrap().key,
            canonical_form(&Graph::edgeless(2)).unwrap().key
        );
        assert_ne!(
            canonical_form(&Graph::complete(3)).unwrap().key,
            canonical_form(&p).unwrap().key
        );
        assert!(matches!(
            canonical_form(&Graph::edgeless(9)),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn canonical_relabel_reproduces_key_graph() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 4)]).unwrap();
        let cf = canonical_form(&g).unwrap();
        assert_eq!(g.image(&cf.relabel, 5), cf.key.to_graph());
    }

    #[test]
    fn canonical_key_matches_exhaustive_minimum() {
        // exhaustive minimum over all 4! orders, no pruning
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (1, 3), (3, 3)]).unwrap();
        let mut best: Option<Vec<bool>> = None;
        let perms = HomSearch::new(&Graph::edgeless(4), &Graph::edgeless(4))
            .injective(true)
            .collect();
        for p in perms {
            let order = p.images();
            let mut bits = Vec::new();
            for col in 0..4 {
                for row in 0..=col {
                    bits.push(g.has_edge(order[row], order[col]));
                }
            }
            if best.as_ref().is_none_or(|b| bits < *b) {
                best = Some(bits);
            }
        }
        assert_eq!(canonical_form(&g).unwrap().key.bits, best.unwrap());
    }

    #[test]
    fn graph6_round_trip_and_json() {
        let g = Graph::cycle(5);
        assert_eq!(Graph::from_graph6(&g.to_graph6()).unwrap(), g);
        // "Bw" is the triangle
        assert_eq!(Graph::from_graph6("Bw").unwrap(), Graph::complete(3));
        let json: Graph = serde_json::from_str(r#"{"graph6":"A_","loops":[0]}"#).unwrap();
        assert_eq!(json, Graph::from_edges(2, &[(0, 1), (0, 0)]).unwrap());
        let text = serde_json::to_string(&Graph::from_edges(3, &[(2, 1)]).unwrap()).unwrap();
        assert_eq!(text, r#"{"n":3,"edges":[[1,2]]}"#);
        assert!(serde_json::from_str::<Graph>(r#"{"n":2,"edges":[[0,2]]}"#).is_err());
        assert!(Graph::from_graph6("B").is_err());
    }
}
