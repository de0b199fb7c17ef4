//! Bilabelled graphs `(K, a, b)` and their calculus: tensor product,
//! composition, involution, rotations, f-unions and f-compositions.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{
    automorphisms, canonical_form_bounded, f_union, quotient, CanonicalKey, Graph, HomSearch,
    VertexMap, VertexOverlap, VertexPartition, DEFAULT_CANONICAL_BOUND,
};

/// A graph with a tuple of input vertices and a tuple of output vertices.
/// Labels may repeat; unlabelled vertices are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "DiagramRepr", into = "DiagramRepr")]
pub struct BilabelledGraph {
    graph: Graph,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct DiagramRepr {
    graph: Graph,
    #[serde(default)]
    inputs: Vec<usize>,
    #[serde(default)]
    outputs: Vec<usize>,
}

impl TryFrom<DiagramRepr> for BilabelledGraph {
    type Error = Error;
    fn try_from(r: DiagramRepr) -> Result<Self> {
        BilabelledGraph::new(r.graph, r.inputs, r.outputs)
    }
}

impl From<BilabelledGraph> for DiagramRepr {
    fn from(d: BilabelledGraph) -> Self {
        DiagramRepr {
            graph: d.graph,
            inputs: d.inputs,
            outputs: d.outputs,
        }
    }
}

impl BilabelledGraph {
    pub fn new(graph: Graph, inputs: Vec<usize>, outputs: Vec<usize>) -> Result<Self> {
        let n = graph.vertex_count();
        if let Some(v) = inputs.iter().chain(&outputs).find(|&&v| v >= n) {
            return Err(Error::validation(format!(
                "label vertex {v} out of range for {n} vertices"
            )));
        }
        Ok(BilabelledGraph {
            graph,
            inputs,
            outputs,
        })
    }

    /// `0 = (N_0, (), ())`.
    pub fn zero() -> Self {
        BilabelledGraph::single_vertex_free(Graph::edgeless(0))
    }

    fn single_vertex_free(graph: Graph) -> Self {
        BilabelledGraph {
            graph,
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    /// `M^{k,l}`: one vertex carrying all `k` inputs and `l` outputs.
    pub fn one_vertex(k: usize, l: usize) -> Self {
        BilabelledGraph {
            graph: Graph::edgeless(1),
            inputs: vec![0; k],
            outputs: vec![0; l],
        }
    }

    /// `M^{1,1}`.
    pub fn identity() -> Self {
        BilabelledGraph::one_vertex(1, 1)
    }

    /// `M^{0,2}`, the duality morphism.
    pub fn pair() -> Self {
        BilabelledGraph::one_vertex(0, 2)
    }

    /// `M^{2,0}`.
    pub fn cap() -> Self {
        BilabelledGraph::one_vertex(2, 0)
    }

    /// `(G, (), ())`, the graph as a scalar diagram.
    pub fn scalar(graph: Graph) -> Self {
        BilabelledGraph::single_vertex_free(graph)
    }

    /// `id^{⊗k}`.
    pub fn identity_power(k: usize) -> Self {
        (0..k).fold(BilabelledGraph::zero(), |acc, _| {
            acc.tensor(&BilabelledGraph::identity())
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    /// `(k, l)`: number of inputs and outputs.
    pub fn arity(&self) -> (usize, usize) {
        (self.inputs.len(), self.outputs.len())
    }

    /// `K ⊗ H = (K ⊔ H, ac, bd)`.
    pub fn tensor(&self, other: &BilabelledGraph) -> BilabelledGraph {
        let shift = self.graph.vertex_count();
        BilabelledGraph {
            graph: self.graph.disjoint_union(&other.graph),
            inputs: self
                .inputs
                .iter()
                .copied()
                .chain(other.inputs.iter().map(|v| v + shift))
                .collect(),
            outputs: self
                .outputs
                .iter()
                .copied()
                .chain(other.outputs.iter().map(|v| v + shift))
                .collect(),
        }
    }

    /// `H · K` where `self = H`: put `K` first, glue `b_i` of `K` to `c_i` of
    /// `H` and take the quotient by the generated partition. Chains of
    /// identifications from repeated labels are followed transitively; edge
    /// multiplicities collapse.
    pub fn compose(&self, k: &BilabelledGraph) -> Result<BilabelledGraph> {
        let h = self;
        if k.outputs.len() != h.inputs.len() {
            return Err(Error::Arity(format!(
                "composition needs {} outputs to meet {} inputs",
                k.outputs.len(),
                h.inputs.len()
            )));
        }
        let nk = k.graph.vertex_count();
        let pairs: Vec<(usize, usize)> = k
            .outputs
            .iter()
            .zip(&h.inputs)
            .map(|(&b, &c)| (b, c + nk))
            .collect();
        let union = k.graph.disjoint_union(&h.graph);
        let partition = VertexPartition::generated_by(union.vertex_count(), &pairs)?;
        let (graph, q) = quotient(&union, &partition)?;
        Ok(BilabelledGraph {
            graph,
            inputs: q.apply_all(&k.inputs),
            outputs: h.outputs.iter().map(|&d| q.apply(d + nk)).collect(),
        })
    }

    /// `K* = (K, b, a)`.
    pub fn involution(&self) -> BilabelledGraph {
        BilabelledGraph {
            graph: self.graph.clone(),
            inputs: self.outputs.clone(),
            outputs: self.inputs.clone(),
        }
    }

    /// `(K, (a_2..a_k), (a_1, b_1..b_l))`.
    pub fn rotate_left(&self) -> Result<BilabelledGraph> {
        let (&first, rest) = self
            .inputs
            .split_first()
            .ok_or_else(|| Error::Arity("left rotation needs an input".into()))?;
        let mut outputs = Vec::with_capacity(self.outputs.len() + 1);
        outputs.push(first);
        outputs.extend(&self.outputs);
        Ok(BilabelledGraph {
            graph: self.graph.clone(),
            inputs: rest.to_vec(),
            outputs,
        })
    }

    /// `(K, (a_1..a_k, b_l), (b_1..b_{l-1}))`.
    pub fn rotate_right(&self) -> Result<BilabelledGraph> {
        let (&last, rest) = self
            .outputs
            .split_last()
            .ok_or_else(|| Error::Arity("right rotation needs an output".into()))?;
        let mut inputs = self.inputs.clone();
        inputs.push(last);
        Ok(BilabelledGraph {
            graph: self.graph.clone(),
            inputs,
            outputs: rest.to_vec(),
        })
    }

    /// Inverse of [`rotate_left`](Self::rotate_left): moves `b_1` back to the
    /// front of the inputs.
    pub fn unrotate_left(&self) -> Result<BilabelledGraph> {
        let (&first, rest) = self
            .outputs
            .split_first()
            .ok_or_else(|| Error::Arity("inverse left rotation needs an output".into()))?;
        let mut inputs = Vec::with_capacity(self.inputs.len() + 1);
        inputs.push(first);
        inputs.extend(&self.inputs);
        Ok(BilabelledGraph {
            graph: self.graph.clone(),
            inputs,
            outputs: rest.to_vec(),
        })
    }

    /// Inverse of [`rotate_right`](Self::rotate_right): moves `a_k` back to
    /// the end of the outputs.
    pub fn unrotate_right(&self) -> Result<BilabelledGraph> {
        let (&last, rest) = self
            .inputs
            .split_last()
            .ok_or_else(|| Error::Arity("inverse right rotation needs an input".into()))?;
        let mut outputs = self.outputs.clone();
        outputs.push(last);
        Ok(BilabelledGraph {
            graph: self.graph.clone(),
            inputs: rest.to_vec(),
            outputs,
        })
    }

    /// `K ∪_f H = (K ∪_f H, ac, bd)`.
    pub fn f_union(&self, other: &BilabelledGraph, f: &VertexOverlap) -> Result<BilabelledGraph> {
        let (graph, fk, fh) = f_union(&self.graph, &other.graph, f)?;
        Ok(BilabelledGraph {
            graph,
            inputs: fk
                .apply_all(&self.inputs)
                .into_iter()
                .chain(fh.apply_all(&other.inputs))
                .collect(),
            outputs: fk
                .apply_all(&self.outputs)
                .into_iter()
                .chain(fh.apply_all(&other.outputs))
                .collect(),
        })
    }

    /// `H ·_f K = (K ∪_f H, a, d)` where `self = H`. `f` is an overlap from
    /// `K` to `H` and must contain every pair `(b_i, c_i)`.
    pub fn f_compose(&self, k: &BilabelledGraph, f: &VertexOverlap) -> Result<BilabelledGraph> {
        let h = self;
        if k.outputs.len() != h.inputs.len() {
            return Err(Error::Arity(format!(
                "f-composition needs {} outputs to meet {} inputs",
                k.outputs.len(),
                h.inputs.len()
            )));
        }
        if let Some((b, c)) = k
            .outputs
            .iter()
            .zip(&h.inputs)
            .find(|(&b, &c)| !f.contains((b, c)))
        {
            return Err(Error::Precondition(format!(
                "overlap lacks the required pair ({b},{c})"
            )));
        }
        let (graph, fk, fh) = f_union(&k.graph, &h.graph, f)?;
        Ok(BilabelledGraph {
            graph,
            inputs: fk.apply_all(&k.inputs),
            outputs: fh.apply_all(&h.outputs),
        })
    }

    /// `K/π` with labels pushed through `q_π`.
    pub fn quotient(&self, partition: &VertexPartition) -> Result<BilabelledGraph> {
        let (graph, q) = quotient(&self.graph, partition)?;
        Ok(BilabelledGraph {
            graph,
            inputs: q.apply_all(&self.inputs),
            outputs: q.apply_all(&self.outputs),
        })
    }

    /// Relabels vertices through a bijection.
    pub fn relabel(&self, perm: &VertexMap) -> BilabelledGraph {
        let n = self.graph.vertex_count();
        BilabelledGraph {
            graph: self.graph.image(perm, n),
            inputs: perm.apply_all(&self.inputs),
            outputs: perm.apply_all(&self.outputs),
        }
    }

    /// Isomorphism of underlying graphs respecting both label tuples pointwise.
    pub fn is_isomorphic(&self, other: &BilabelledGraph) -> bool {
        let n = self.graph.vertex_count();
        if n != other.graph.vertex_count()
            || self.arity() != other.arity()
            || self.graph.edge_count() != other.graph.edge_count()
        {
            return false;
        }
        let mut search = HomSearch::new(&self.graph, &other.graph).injective(true);
        let labels = self.inputs.iter().zip(&other.inputs);
        for (&v, &w) in labels.chain(self.outputs.iter().zip(&other.outputs)) {
            if !search.pin(v, w) {
                return false;
            }
        }
        let mut found = false;
        search.for_each(|_| found = true);
        found
    }

    /// Isomorphism-invariant key including the label tuples.
    pub fn canonical_key(&self) -> Result<DiagramKey> {
        self.canonical_key_bounded(DEFAULT_CANONICAL_BOUND)
    }

    /// Labels are read through every relabeling that realizes the minimal
    /// graph key (the canonical relabeling composed with automorphisms of the
    /// canonical graph) and the least label pair wins.
    pub fn canonical_key_bounded(&self, bound: usize) -> Result<DiagramKey> {
        let cf = canonical_form_bounded(&self.graph, bound)?;
        let canonical_graph = cf.key.to_graph();
        let labels = automorphisms(&canonical_graph)
            .into_iter()
            .map(|sigma| {
                let map = sigma.after(&cf.relabel);
                (map.apply_all(&self.inputs), map.apply_all(&self.outputs))
            })
            .min()
            .expect("identity is an automorphism");
        Ok(DiagramKey {
            graph: cf.key,
            inputs: labels.0,
            outputs: labels.1,
        })
    }

    /// Graphviz dump; labels are drawn as `in_i` / `out_j` boxes.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph bilabelled {\n");
        for v in 0..self.graph.vertex_count() {
            let _ = writeln!(s, "  v{v} [shape=circle];");
        }
        for (u, v) in self.graph.edges() {
            let _ = writeln!(s, "  v{u} -- v{v} [penwidth=3];");
        }
        for (i, a) in self.inputs.iter().enumerate() {
            let _ = writeln!(s, "  in{i} [shape=box]; in{i} -- v{a} [style=dashed];");
        }
        for (j, b) in self.outputs.iter().enumerate() {
            let _ = writeln!(s, "  out{j} [shape=box]; out{j} -- v{b} [style=dashed];");
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DiagramKey {
    pub graph: CanonicalKey,
    pub inputs: Vec<usize>,
    pub outputs: Vec<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{ker, partition_to_bilabelled};

    fn diagram(n: usize, edges: &[(usize, usize)], a: &[usize], b: &[usize]) -> BilabelledGraph {
        BilabelledGraph::new(Graph::from_edges(n, edges).unwrap(), a.to_vec(), b.to_vec()).unwrap()
    }

    #[test]
    fn tensor_examples() {
        let k = diagram(3, &[(1, 2)], &[0, 2], &[1]);
        assert!(BilabelledGraph::zero().tensor(&k).is_isomorphic(&k));
        let id = BilabelledGraph::identity();
        assert_eq!(id.tensor(&id), diagram(2, &[], &[0, 1], &[0, 1]));
        assert_eq!(
            BilabelledGraph::pair().tensor(&id),
            diagram(2, &[], &[1], &[0, 0, 1])
        );
    }

    #[test]
    fn composition_with_identity() {
        let k = diagram(3, &[(0, 1), (1, 2)], &[0, 0], &[2]);
        assert!(BilabelledGraph::identity().compose(&k).unwrap().is_isomorphic(&k));
        assert!(BilabelledGraph::identity()
            .compose(&BilabelledGraph::pair())
            .is_err());
    }

    #[test]
    fn composition_glues_outputs_to_inputs() {
        let k = diagram(3, &[(1, 2)], &[1, 0], &[0, 1, 2]);
        let h = diagram(4, &[(3, 0), (0, 2), (1, 2), (3, 2)], &[2, 1, 0], &[3, 1, 1, 0, 3]);
        let hk = h.compose(&k).unwrap();
        // K's edge {1,2} lands on H's {1,0}
        assert_eq!(
            hk.graph(),
            &Graph::from_edges(4, &[(2, 3), (0, 2), (0, 1), (0, 3), (1, 2)]).unwrap()
        );
        assert_eq!(hk.inputs(), &[1, 0]);
        assert_eq!(hk.outputs(), &[3, 1, 1, 2, 3]);
    }

    #[test]
    fn composition_follows_chains() {
        // outputs (0,0) against inputs (0,1) identify H's two vertices
        let k = diagram(1, &[], &[], &[0, 0]);
        let h = diagram(2, &[(0, 1)], &[0, 1], &[0, 1]);
        let hk = h.compose(&k).unwrap();
        assert_eq!(hk, diagram(1, &[(0, 0)], &[], &[0, 0]));
    }

    #[test]
    fn partition_composition_matches_graph_composition() {
        let p = ker(&['a', 'a', 'a'], &['b', 'a', 'a', 'c']);
        let q = ker(&['a', 'b', 'c', 'd'], &['e', 'c', 'b', 'b']);
        let via_graphs = partition_to_bilabelled(&q)
            .compose(&partition_to_bilabelled(&p))
            .unwrap();
        let via_partitions = partition_to_bilabelled(&p.compose(&q).unwrap());
        assert!(via_graphs.is_isomorphic(&via_partitions));
        assert_eq!(
            ker(via_graphs.inputs(), via_graphs.outputs()),
            ker(&['a', 'a', 'a'], &['e', 'a', 'a', 'a'])
        );
    }

    #[test]
    fn involution_examples() {
        let id = BilabelledGraph::identity();
        assert_eq!(id.involution(), id);
        let k = diagram(2, &[], &[0], &[1]);
        assert_eq!(k.involution(), diagram(2, &[], &[1], &[0]));
        assert_eq!(k.involution().involution(), k);
    }

    #[test]
    fn rotation_examples() {
        let k = diagram(3, &[(0, 1)], &[0, 2], &[1, 1]);
        assert_eq!(k.rotate_left().unwrap(), diagram(3, &[(0, 1)], &[2], &[0, 1, 1]));
        assert_eq!(k.rotate_right().unwrap(), diagram(3, &[(0, 1)], &[0, 2, 1], &[1]));
        assert_eq!(k.rotate_left().unwrap().unrotate_left().unwrap(), k);
        assert_eq!(k.rotate_right().unwrap().unrotate_right().unwrap(), k);
        assert_eq!(k.unrotate_left().unwrap().rotate_left().unwrap(), k);
        assert_eq!(k.unrotate_right().unwrap().rotate_right().unwrap(), k);
        let single = diagram(1, &[], &[0], &[]);
        assert_eq!(single.rotate_left().unwrap(), diagram(1, &[], &[], &[0]));
        assert_eq!(
            BilabelledGraph::pair().rotate_right().unwrap(),
            BilabelledGraph::identity()
        );
        assert!(BilabelledGraph::zero().rotate_left().is_err());
        assert!(BilabelledGraph::zero().rotate_right().is_err());
    }

    #[test]
    fn f_union_examples() {
        let k = diagram(2, &[(0, 1)], &[0], &[1]);
        let h = diagram(2, &[], &[1], &[0, 0]);
        assert_eq!(k.f_union(&h, &VertexOverlap::empty()).unwrap(), k.tensor(&h));
        let glued = BilabelledGraph::pair()
            .f_union(
                &BilabelledGraph::identity(),
                &VertexOverlap::new(vec![(0, 0)]).unwrap(),
            )
            .unwrap();
        assert_eq!(glued, diagram(1, &[], &[0], &[0, 0, 0]));
        assert_eq!(k.f_union(&BilabelledGraph::zero(), &VertexOverlap::empty()).unwrap(), k);
        assert!(k
            .f_union(&h, &VertexOverlap::new(vec![(0, 7)]).unwrap())
            .is_err());
    }

    #[test]
    fn f_composition() {
        let k = diagram(2, &[(0, 1)], &[0], &[1, 0]);
        let h = diagram(3, &[(1, 2)], &[0, 1], &[2]);
        let required = VertexOverlap::new(vec![(1, 0), (0, 1)]).unwrap();
        let restricted = h.f_compose(&k, &required).unwrap();
        assert!(restricted.is_isomorphic(&h.compose(&k).unwrap()));

        let missing = VertexOverlap::new(vec![(1, 0)]).unwrap();
        assert!(matches!(h.f_compose(&k, &missing), Err(Error::Precondition(_))));

        let id = BilabelledGraph::identity_power(2);
        let through_id = id
            .f_compose(&k, &VertexOverlap::new(vec![(1, 0), (0, 1)]).unwrap())
            .unwrap();
        assert!(through_id.is_isomorphic(&k));
    }

    #[test]
    fn f_composition_with_extra_pairs_glues_more() {
        let k = diagram(2, &[(0, 1)], &[], &[0]);
        let h = diagram(2, &[(0, 1)], &[0], &[]);
        let f = VertexOverlap::new(vec![(0, 0), (1, 1)]).unwrap();
        let glued = h.f_compose(&k, &f).unwrap();
        // oracle: quotient of K ⊔ H identifying both pairs
        let union = k.graph().disjoint_union(h.graph());
        let pi = VertexPartition::generated_by(4, &[(0, 2), (1, 3)]).unwrap();
        let (expected, _) = quotient(&union, &pi).unwrap();
        assert_eq!(glued.graph(), &expected);
        assert_eq!(glued.graph(), &Graph::complete(2));
    }

    #[test]
    fn canonical_key_respects_labels() {
        let a = diagram(2, &[(0, 1)], &[0], &[1]);
        let b = diagram(2, &[(0, 1)], &[1], &[0]);
        let c = diagram(2, &[(0, 1)], &[0], &[0]);
        assert_eq!(a.canonical_key().unwrap(), b.canonical_key().unwrap());
        assert_ne!(a.canonical_key().unwrap(), c.canonical_key().unwrap());
        assert!(a.is_isomorphic(&b));
        assert!(!a.is_isomorphic(&c));
    }

    #[test]
    fn json_shape() {
        let d = diagram(2, &[(0, 1)], &[], &[0, 1]);
        let text = serde_json::to_string(&d).unwrap();
        assert_eq!(text, r#"{"graph":{"n":2,"edges":[[0,1]]},"inputs":[],"outputs":[0,1]}"#);
        assert!(serde_json::from_str::<BilabelledGraph>(
            r#"{"graph":{"n":1,"edges":[]},"inputs":[3],"outputs":[]}"#
        )
        .is_err());
        assert!(d.to_dot().contains("v0 -- v1"));
    }
}
