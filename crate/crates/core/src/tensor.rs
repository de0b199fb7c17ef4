//! Exact integer tensors `T^G_K`, `T̂^G_K` and the identities relating them.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::diagram::BilabelledGraph;
use crate::error::{Error, Result};
use crate::graph::{Graph, HomSearch, VertexOverlap, VertexPartition};
use crate::partition::{enumerate_partitions_bounded, ker, SetPartition, DEFAULT_PARTITION_BOUND};

/// Exact integer entry type. `i64` overflows loudly; `BigInt` never does.
pub trait Entry:
    Clone
    + fmt::Debug
    + fmt::Display
    + Eq
    + Zero
    + One
    + CheckedAdd
    + CheckedSub
    + CheckedMul
    + ToPrimitive
    + From<i64>
    + Into<BigInt>
    + Send
    + Sync
    + 'static
{
}

impl Entry for i64 {}
impl Entry for BigInt {}

fn checked_add<E: Entry>(a: &E, b: &E) -> Result<E> {
    a.checked_add(b).ok_or(Error::Overflow("tensor addition"))
}

fn checked_mul<E: Entry>(a: &E, b: &E) -> Result<E> {
    a.checked_mul(b).ok_or(Error::Overflow("tensor multiplication"))
}

/// Dense tensor of shape `n^l × n^k`. Row `j` is the output multi-index,
/// column `i` the input multi-index, both read as base-`n` numbers with the
/// first leg most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntTensor<E = i64> {
    n: usize,
    k: usize,
    l: usize,
    entries: Vec<E>,
}

pub type BigTensor = IntTensor<BigInt>;

fn power(n: usize, e: usize) -> Result<usize> {
    u32::try_from(e)
        .ok()
        .and_then(|e| n.checked_pow(e))
        .ok_or(Error::Overflow("tensor dimension"))
}

/// Base-`n` digits of `index`, most significant first.
pub fn multi_index(mut index: usize, legs: usize, n: usize) -> Vec<usize> {
    let mut digits = vec![0; legs];
    for d in digits.iter_mut().rev() {
        *d = index % n.max(1);
        index /= n.max(1);
    }
    digits
}

pub fn flat_index(digits: &[usize], n: usize) -> usize {
    digits.iter().fold(0, |acc, &d| acc * n + d)
}

impl<E: Entry> IntTensor<E> {
    pub fn zeros(n: usize, k: usize, l: usize) -> Result<Self> {
        let size = power(n, k)?
            .checked_mul(power(n, l)?)
            .ok_or(Error::Overflow("tensor dimension"))?;
        Ok(IntTensor {
            n,
            k,
            l,
            entries: vec![E::zero(); size],
        })
    }

    pub fn from_entries(n: usize, k: usize, l: usize, entries: Vec<E>) -> Result<Self> {
        let expected = power(n, k)? * power(n, l)?;
        if entries.len() != expected {
            return Err(Error::Shape(format!(
                "{} entries for a tensor with n={n}, k={k}, l={l} ({expected} expected)",
                entries.len()
            )));
        }
        Ok(IntTensor { n, k, l, entries })
    }

    /// The `n × n` identity, `T` of `M^{1,1}`.
    pub fn identity(n: usize) -> Self {
        let mut t = IntTensor::zeros(n, 1, 1).expect("n^2 fits");
        for v in 0..n {
            t.entries[v * n + v] = E::one();
        }
        t
    }

    pub fn scalar(n: usize, value: E) -> Self {
        IntTensor {
            n,
            k: 0,
            l: 0,
            entries: vec![value],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn rows(&self) -> usize {
        self.entries.len() / self.cols().max(1)
    }

    pub fn cols(&self) -> usize {
        power(self.n, self.k).unwrap_or(0)
    }

    pub fn entries(&self) -> &[E] {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> &E {
        &self.entries[row * self.cols() + col]
    }

    /// Entry at output multi-index `j` and input multi-index `i`.
    pub fn get(&self, j: &[usize], i: &[usize]) -> &E {
        self.entry(flat_index(j, self.n), flat_index(i, self.n))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    /// All entries in row-major order.
    pub fn flatten(&self) -> Vec<E> {
        self.entries.clone()
    }

    fn same_shape(&self, other: &Self, op: &str) -> Result<()> {
        if (self.n, self.k, self.l) != (other.n, other.k, other.l) {
            return Err(Error::Shape(format!(
                "{op} of shapes (n={},k={},l={}) and (n={},k={},l={})",
                self.n, self.k, self.l, other.n, other.k, other.l
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other, "sum")?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| checked_add(a, b))
            .collect::<Result<_>>()?;
        Ok(self.with_entries(entries))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other, "difference")?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.checked_sub(b).ok_or(Error::Overflow("tensor subtraction")))
            .collect::<Result<_>>()?;
        Ok(self.with_entries(entries))
    }

    pub fn scale(&self, c: &E) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .map(|a| checked_mul(a, c))
            .collect::<Result<_>>()?;
        Ok(self.with_entries(entries))
    }

    fn with_entries(&self, entries: Vec<E>) -> Self {
        IntTensor {
            n: self.n,
            k: self.k,
            l: self.l,
            entries,
        }
    }

    /// Kronecker product: legs of `self` come first on both sides.
    pub fn tensor_product(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Shape(format!(
                "tensor product over bases {} and {}",
                self.n, other.n
            )));
        }
        let mut out = IntTensor::zeros(self.n, self.k + other.k, self.l + other.l)?;
        let (rc, oc) = (self.cols(), other.cols());
        let (orows, cols) = (other.rows(), out.cols());
        for j1 in 0..self.rows() {
            for i1 in 0..rc {
                let a = self.entry(j1, i1);
                if a.is_zero() {
                    continue;
                }
                for j2 in 0..orows {
                    for i2 in 0..oc {
                        let b = other.entry(j2, i2);
                        if b.is_zero() {
                            continue;
                        }
                        out.entries[(j1 * orows + j2) * cols + i1 * oc + i2] = checked_mul(a, b)?;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if self.n != inner.n || self.k != inner.l {
            return Err(Error::Shape(format!(
                "cannot compose (n={},k={}) after (n={},l={})",
                self.n, self.k, inner.n, inner.l
            )));
        }
        let mut out = IntTensor::zeros(self.n, inner.k, self.l)?;
        let (mid, cols) = (self.cols(), inner.cols());
        for j in 0..self.rows() {
            for m in 0..mid {
                let a = self.entry(j, m);
                if a.is_zero() {
                    continue;
                }
                for i in 0..cols {
                    let b = inner.entry(m, i);
                    if b.is_zero() {
                        continue;
                    }
                    let slot = &mut out.entries[j * cols + i];
                    *slot = checked_add(slot, &checked_mul(a, b)?)?;
                }
            }
        }
        Ok(out)
    }

    /// Transpose; inputs and outputs trade places.
    pub fn adjoint(&self) -> Self {
        let (rows, cols) = (self.rows(), self.cols());
        let mut entries = Vec::with_capacity(self.entries.len());
        for i in 0..cols {
            for j in 0..rows {
                entries.push(self.entry(j, i).clone());
            }
        }
        IntTensor {
            n: self.n,
            k: self.l,
            l: self.k,
            entries,
        }
    }

    pub fn to_big(&self) -> BigTensor {
        IntTensor {
            n: self.n,
            k: self.k,
            l: self.l,
            entries: self.entries.iter().cloned().map(Into::into).collect(),
        }
    }

    /// First entry where the two tensors differ, scanning row-major.
    pub fn first_mismatch(&self, other: &Self) -> Option<Mismatch> {
        if (self.n, self.k, self.l) != (other.n, other.k, other.l) {
            return Some(Mismatch::Shape {
                lhs: (self.n, self.k, self.l),
                rhs: (other.n, other.k, other.l),
            });
        }
        let cols = self.cols();
        let pos = (0..self.entries.len()).find(|&p| self.entries[p] != other.entries[p])?;
        Some(Mismatch::Entry {
            output: multi_index(pos / cols, self.l, self.n),
            input: multi_index(pos % cols, self.k, self.n),
            lhs: self.entries[pos].to_string(),
            rhs: other.entries[pos].to_string(),
        })
    }

    /// `{"n","k","l","entries"}`; entries that do not fit in `i64` are
    /// written as decimal strings.
    pub fn to_json(&self) -> serde_json::Value {
        let entries = self
            .entries
            .iter()
            .map(|e| match e.to_i64() {
                Some(v) => serde_json::Value::from(v),
                None => serde_json::Value::from(e.to_string()),
            })
            .collect::<Vec<_>>();
        serde_json::json!({"n": self.n, "k": self.k, "l": self.l, "entries": entries})
    }

    /// One line per row, comma separated.
    pub fn to_csv(&self) -> String {
        let cols = self.cols();
        let mut s = String::new();
        for row in self.entries.chunks(cols.max(1)) {
            let line: Vec<String> = row.iter().map(ToString::to_string).collect();
            s.push_str(&line.join(","));
            s.push('\n');
        }
        s
    }
}

#[derive(Serialize, Deserialize)]
struct TensorRepr {
    n: usize,
    k: usize,
    l: usize,
    entries: Vec<i64>,
}

impl Serialize for IntTensor<i64> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TensorRepr {
            n: self.n,
            k: self.k,
            l: self.l,
            entries: self.entries.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntTensor<i64> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = TensorRepr::deserialize(d)?;
        IntTensor::from_entries(r.n, r.k, r.l, r.entries).map_err(serde::de::Error::custom)
    }
}

impl<E: Entry> fmt::Display for IntTensor<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n={} k={} l={}", self.n, self.k, self.l)?;
        f.write_str(&self.to_csv())
    }
}

fn count_homs<E: Entry>(g: &Graph, d: &BilabelledGraph, injective: bool) -> Result<IntTensor<E>> {
    let n = g.vertex_count();
    let (k, l) = d.arity();
    let mut t = IntTensor::zeros(n, k, l)?;
    if injective && d.graph().vertex_count() > n {
        return Ok(t);
    }
    let cols = t.cols();
    let one = E::one();
    let mut overflow = false;
    HomSearch::new(d.graph(), g)
        .injective(injective)
        .for_each(|phi| {
            let row = d.outputs().iter().fold(0, |acc, &b| acc * n + phi[b]);
            let col = d.inputs().iter().fold(0, |acc, &a| acc * n + phi[a]);
            let slot = &mut t.entries[row * cols + col];
            match slot.checked_add(&one) {
                Some(v) => *slot = v,
                None => overflow = true,
            }
        });
    if overflow {
        return Err(Error::Overflow("homomorphism count"));
    }
    Ok(t)
}

/// `[T^G_K]_{ji} = #{φ: K → G hom | φ(a) = i, φ(b) = j}`.
pub fn build_t<E: Entry>(g: &Graph, d: &BilabelledGraph) -> Result<IntTensor<E>> {
    count_homs(g, d, false)
}

/// `T̂^G_K`: the same count restricted to injective homomorphisms.
pub fn build_that<E: Entry>(g: &Graph, d: &BilabelledGraph) -> Result<IntTensor<E>> {
    count_homs(g, d, true)
}

fn falling_factorial<E: Entry>(n: usize, m: usize) -> Result<E> {
    (0..m).try_fold(E::one(), |acc, i| match n.checked_sub(i) {
        Some(f) => checked_mul(&acc, &E::from(f as i64)),
        None => Ok(E::zero()),
    })
}

fn partition_tensor<E: Entry>(n: usize, p: &SetPartition, hat: bool) -> Result<IntTensor<E>> {
    let (k, l) = (p.upper(), p.lower());
    let mut t = IntTensor::zeros(n, k, l)?;
    let nonempty = p.num_blocks() - p.empty_blocks();
    // isolated vertices of the embedded diagram
    let weight: E = if hat {
        falling_factorial(n.saturating_sub(nonempty), p.empty_blocks())?
    } else {
        (0..p.empty_blocks()).try_fold(E::one(), |acc, _| checked_mul(&acc, &E::from(n as i64)))?
    };
    if weight.is_zero() {
        return Ok(t);
    }
    let cols = t.cols();
    let blocks = p.block_of();
    let pattern = strip_empty(p);
    let mut value = vec![usize::MAX; p.num_blocks()];
    for row in 0..t.rows() {
        let j = multi_index(row, l, n);
        for col in 0..cols {
            let i = multi_index(col, k, n);
            value.iter_mut().for_each(|v| *v = usize::MAX);
            let consistent = i.iter().chain(&j).zip(blocks).all(|(&x, &b)| {
                if value[b] == usize::MAX {
                    value[b] = x;
                    true
                } else {
                    value[b] == x
                }
            });
            let ok = if hat {
                consistent && ker(&i, &j) == pattern
            } else {
                consistent
            };
            if ok {
                t.entries[row * cols + col] = weight.clone();
            }
        }
    }
    Ok(t)
}

fn strip_empty(p: &SetPartition) -> SetPartition {
    SetPartition::from_labels(p.upper(), p.lower(), p.block_of(), 0).expect("valid labels")
}

/// `T^{(n)}_P`: the blockwise Kronecker delta `δ_P`. Each empty block is an
/// isolated vertex of the embedded diagram and contributes a factor `n`, so
/// that `T^G_P = T^{(n)}_P` for every graph `G` on `n` vertices.
pub fn build_partition_t<E: Entry>(n: usize, p: &SetPartition) -> Result<IntTensor<E>> {
    partition_tensor(n, p, false)
}

/// `T̂^{(n)}_P`: `δ̂_P(i,j) = 1` iff `ker(i,j) = P`. Empty blocks contribute
/// the number of injective placements of the isolated vertices.
pub fn build_partition_that<E: Entry>(n: usize, p: &SetPartition) -> Result<IntTensor<E>> {
    partition_tensor(n, p, true)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mismatch {
    Shape {
        lhs: (usize, usize, usize),
        rhs: (usize, usize, usize),
    },
    Entry {
        output: Vec<usize>,
        input: Vec<usize>,
        lhs: String,
        rhs: String,
    },
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mismatch::Shape { lhs, rhs } => write!(
                f,
                "shape (n={},k={},l={}) vs (n={},k={},l={})",
                lhs.0, lhs.1, lhs.2, rhs.0, rhs.1, rhs.2
            ),
            Mismatch::Entry {
                output,
                input,
                lhs,
                rhs,
            } => write!(f, "entry j={output:?} i={input:?}: lhs {lhs}, rhs {rhs}"),
        }
    }
}

/// One exact identity `lhs = rhs`, with both sides kept for inspection.
#[derive(Clone, Debug)]
pub struct LawCheck<E = i64> {
    pub law: String,
    pub lhs: IntTensor<E>,
    pub rhs: IntTensor<E>,
}

impl<E: Entry> LawCheck<E> {
    pub fn new(law: impl Into<String>, lhs: IntTensor<E>, rhs: IntTensor<E>) -> Self {
        LawCheck {
            law: law.into(),
            lhs,
            rhs,
        }
    }

    pub fn mismatch(&self) -> Option<Mismatch> {
        self.lhs.first_mismatch(&self.rhs)
    }

    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

impl<E: Entry> fmt::Display for LawCheck<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mismatch() {
            None => write!(f, "{}: holds", self.law),
            Some(m) => write!(f, "{}: FAILS at {m}", self.law),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Report<E = i64> {
    pub checks: Vec<LawCheck<E>>,
}

impl<E: Entry> Report<E> {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(LawCheck::holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &LawCheck<E>> {
        self.checks.iter().filter(|c| !c.holds())
    }
}

impl<E: Entry> fmt::Display for Report<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

/// The functor laws for `T^G` on `D₁, D₂`: tensor product, every defined
/// composition (`D₂·D₁` and `D₁·D₂`) and both involutions.
pub fn verify_functor<E: Entry>(
    g: &Graph,
    d1: &BilabelledGraph,
    d2: &BilabelledGraph,
) -> Result<Report<E>> {
    let t1 = build_t::<E>(g, d1)?;
    let t2 = build_t::<E>(g, d2)?;
    let mut checks = vec![LawCheck::new(
        "T(K⊗H) = T(K)⊗T(H)",
        build_t(g, &d1.tensor(d2))?,
        t1.tensor_product(&t2)?,
    )];
    if d1.outputs().len() == d2.inputs().len() {
        checks.push(LawCheck::new(
            "T(H·K) = T(H)T(K)",
            build_t(g, &d2.compose(d1)?)?,
            t2.compose(&t1)?,
        ));
    }
    if d2.outputs().len() == d1.inputs().len() {
        checks.push(LawCheck::new(
            "T(K·H) = T(K)T(H)",
            build_t(g, &d1.compose(d2)?)?,
            t1.compose(&t2)?,
        ));
    }
    checks.push(LawCheck::new("T(K*) = T(K)*", build_t(g, &d1.involution())?, t1.adjoint()));
    checks.push(LawCheck::new("T(H*) = T(H)*", build_t(g, &d2.involution())?, t2.adjoint()));
    Ok(Report { checks })
}

/// The overlap-sum identities for `T̂^G`:
/// `T̂_K ⊗ T̂_H = Σ_f T̂_{K ∪_f H}` over every overlap, and for each defined
/// composition `T̂_H T̂_K = Σ_{f ⊇ (b_i,c_i)} T̂_{H ·_f K}`, which must vanish
/// when `ker b ≠ ker c`; plus `(T̂_K)* = T̂_{K*}`.
pub fn verify_that_sums<E: Entry>(
    g: &Graph,
    d1: &BilabelledGraph,
    d2: &BilabelledGraph,
) -> Result<Report<E>> {
    let t1 = build_that::<E>(g, d1)?;
    let t2 = build_that::<E>(g, d2)?;
    let (nk, nh) = (d1.graph().vertex_count(), d2.graph().vertex_count());
    let mut sum = IntTensor::zeros(g.vertex_count(), d1.inputs().len() + d2.inputs().len(), {
        d1.outputs().len() + d2.outputs().len()
    })?;
    for f in VertexOverlap::enumerate(nk, nh) {
        sum = sum.add(&build_that(g, &d1.f_union(d2, &f)?)?)?;
    }
    let mut checks = vec![LawCheck::new("T̂(K)⊗T̂(H) = Σ_f T̂(K ∪_f H)", t1.tensor_product(&t2)?, sum)];
    if d1.outputs().len() == d2.inputs().len() {
        checks.push(LawCheck::new(
            "T̂(H)T̂(K) = Σ_f T̂(H ·_f K)",
            t2.compose(&t1)?,
            f_composition_sum(g, d2, d1)?,
        ));
    }
    if d2.outputs().len() == d1.inputs().len() {
        checks.push(LawCheck::new(
            "T̂(K)T̂(H) = Σ_f T̂(K ·_f H)",
            t1.compose(&t2)?,
            f_composition_sum(g, d1, d2)?,
        ));
    }
    checks.push(LawCheck::new("T̂(K)* = T̂(K*)", t1.adjoint(), build_that(g, &d1.involution())?));
    checks.push(LawCheck::new("T̂(H)* = T̂(H*)", t2.adjoint(), build_that(g, &d2.involution())?));
    Ok(Report { checks })
}

/// `Σ_{f ⊇ {(b_i, c_i)}} T̂_{H ·_f K}` over overlaps from `K` to `H`; the zero
/// tensor when the required pairs are not an injective partial map.
fn f_composition_sum<E: Entry>(
    g: &Graph,
    h: &BilabelledGraph,
    k: &BilabelledGraph,
) -> Result<IntTensor<E>> {
    let mut sum = IntTensor::zeros(g.vertex_count(), k.inputs().len(), h.outputs().len())?;
    if ker(k.outputs(), &[] as &[usize]) != ker(h.inputs(), &[] as &[usize]) {
        return Ok(sum);
    }
    let required: Vec<(usize, usize)> = k
        .outputs()
        .iter()
        .copied()
        .zip(h.inputs().iter().copied())
        .collect();
    for f in VertexOverlap::enumerate(k.graph().vertex_count(), h.graph().vertex_count()) {
        if required.iter().all(|&p| f.contains(p)) {
            sum = sum.add(&build_that(g, &h.f_compose(k, &f)?)?)?;
        }
    }
    Ok(sum)
}

/// `T^G_K = Σ_{π ∈ 𝒫(V(K))} T̂^G_{K/π}`.
pub fn moebius_expand<E: Entry>(g: &Graph, d: &BilabelledGraph) -> Result<LawCheck<E>> {
    moebius_expand_bounded(g, d, DEFAULT_PARTITION_BOUND)
}

pub fn moebius_expand_bounded<E: Entry>(
    g: &Graph,
    d: &BilabelledGraph,
    bound: usize,
) -> Result<LawCheck<E>> {
    let (k, l) = d.arity();
    let mut sum = IntTensor::zeros(g.vertex_count(), k, l)?;
    for p in enumerate_partitions_bounded(d.graph().vertex_count(), bound)? {
        let pi = VertexPartition::from_labels(p.block_of());
        sum = sum.add(&build_that(g, &d.quotient(&pi)?)?)?;
    }
    Ok(LawCheck::new("T(K) = Σ_π T̂(K/π)", build_t(g, d)?, sum))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::partition_to_bilabelled;

    fn diagram(n: usize, edges: &[(usize, usize)], a: &[usize], b: &[usize]) -> BilabelledGraph {
        BilabelledGraph::new(Graph::from_edges(n, edges).unwrap(), a.to_vec(), b.to_vec()).unwrap()
    }

    fn t(g: &Graph, d: &BilabelledGraph) -> IntTensor {
        build_t(g, d).unwrap()
    }

    fn that(g: &Graph, d: &BilabelledGraph) -> IntTensor {
        build_that(g, d).unwrap()
    }

    /// Counts maps by trying all `n^|V(K)|` functions.
    fn brute_t(g: &Graph, d: &BilabelledGraph, injective: bool) -> IntTensor {
        let n = g.vertex_count();
        let m = d.graph().vertex_count();
        let (k, l) = d.arity();
        let mut out = IntTensor::zeros(n, k, l).unwrap();
        let cols = out.cols();
        for code in 0..n.pow(m as u32) {
            let phi = multi_index(code, m, n);
            let hom = d
                .graph()
                .edges()
                .iter()
                .all(|&(u, v)| g.has_edge(phi[u], phi[v]));
            let inj = (0..m).all(|x| (0..x).all(|y| phi[x] != phi[y]));
            if hom && (!injective || inj) {
                let row = flat_index(&d.outputs().iter().map(|&b| phi[b]).collect::<Vec<_>>(), n);
                let col = flat_index(&d.inputs().iter().map(|&a| phi[a]).collect::<Vec<_>>(), n);
                out.entries[row * cols + col] += 1;
            }
        }
        out
    }

    #[test]
    fn identity_and_pair() {
        for g in [Graph::complete(1), Graph::complete(2), Graph::cycle(4), Graph::path(5)] {
            let n = g.vertex_count();
            assert_eq!(t(&g, &BilabelledGraph::identity()), IntTensor::identity(n));
        }
        let pair = t(&Graph::complete(2), &BilabelledGraph::pair());
        assert_eq!((pair.k(), pair.l()), (0, 2));
        assert_eq!(pair.entries(), &[1, 0, 0, 1]);
    }

    #[test]
    fn edge_vector_over_triangle() {
        let edge = diagram(2, &[(0, 1)], &[], &[0, 1]);
        let v = t(&Graph::complete(3), &edge);
        for row in 0..9 {
            let j = multi_index(row, 2, 3);
            assert_eq!(*v.entry(row, 0), i64::from(j[0] != j[1]));
        }
        assert_eq!(v, brute_t(&Graph::complete(3), &edge, false));
    }

    #[test]
    fn that_examples() {
        let edge = diagram(2, &[(0, 1)], &[], &[0, 1]);
        assert_eq!(that(&Graph::complete(2), &edge).entries(), &[0, 1, 1, 0]);
        let big = diagram(4, &[], &[0], &[3]);
        assert!(that(&Graph::complete(3), &big).is_zero());
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        assert_eq!(that(&g, &BilabelledGraph::scalar(g.clone())).entries(), &[2]);
        let c5 = Graph::cycle(5);
        assert_eq!(that(&c5, &BilabelledGraph::scalar(c5.clone())).entries(), &[10]);
    }

    #[test]
    fn builders_match_brute_force() {
        let gs = [
            Graph::complete(3),
            Graph::path(3),
            Graph::from_edges(3, &[(0, 1), (2, 2)]).unwrap(),
        ];
        let ds = [
            diagram(3, &[(0, 1), (1, 2)], &[0], &[2, 0]),
            diagram(2, &[(0, 0)], &[1], &[1]),
            diagram(3, &[], &[0, 1], &[2]),
            diagram(2, &[(0, 1)], &[], &[]),
        ];
        for g in &gs {
            for d in &ds {
                assert_eq!(t(g, d), brute_t(g, d, false));
                assert_eq!(that(g, d), brute_t(g, d, true));
            }
        }
    }

    #[test]
    fn partition_tensors() {
        let id = SetPartition::identity(1);
        assert_eq!(build_partition_t::<i64>(3, &id).unwrap(), IntTensor::identity(3));
        assert_eq!(build_partition_that::<i64>(3, &id).unwrap(), IntTensor::identity(3));
        let pair = SetPartition::single_block(0, 2);
        assert_eq!(build_partition_t::<i64>(2, &pair).unwrap().entries(), &[1, 0, 0, 1]);
        let singletons = ker(&[] as &[u8], &[0u8, 1]);
        assert_eq!(
            build_partition_that::<i64>(2, &singletons).unwrap().entries(),
            &[0, 1, 1, 0]
        );
        assert_eq!(build_partition_that::<i64>(1, &pair).unwrap().entries(), &[1]);
    }

    #[test]
    fn partition_tensors_agree_with_embedded_diagrams() {
        let g = Graph::path(3);
        for m in 0..=4 {
            for p in crate::partition::enumerate_partitions(m).unwrap() {
                for k in 0..=m {
                    let q = SetPartition::from_labels(k, m - k, p.block_of(), 0).unwrap();
                    let d = partition_to_bilabelled(&q);
                    assert_eq!(build_partition_t::<i64>(3, &q).unwrap(), t(&g, &d));
                    assert_eq!(build_partition_that::<i64>(3, &q).unwrap(), that(&g, &d));
                }
            }
        }
        // empty blocks are isolated vertices
        let q = SetPartition::from_labels(1, 1, &[0, 0], 2).unwrap();
        let d = partition_to_bilabelled(&q);
        assert_eq!(build_partition_t::<i64>(3, &q).unwrap(), t(&g, &d));
        assert_eq!(build_partition_that::<i64>(3, &q).unwrap(), that(&g, &d));
    }

    #[test]
    fn algebra_basics() {
        let a = t(&Graph::path(3), &diagram(2, &[(0, 1)], &[0], &[1]));
        let id = IntTensor::identity(3);
        assert_eq!(id.compose(&a).unwrap(), a);
        assert_eq!(a.compose(&id).unwrap(), a);
        assert_eq!(a.adjoint().adjoint(), a);
        let id2 = IntTensor::<i64>::identity(2);
        assert_eq!(id2.tensor_product(&id2).unwrap(), {
            let mut i4 = IntTensor::zeros(2, 2, 2).unwrap();
            for v in 0..4 {
                i4.entries[v * 4 + v] = 1;
            }
            i4
        });
        assert!(matches!(
            a.compose(&IntTensor::identity(2)),
            Err(Error::Shape(_))
        ));
        assert_eq!(a.sub(&a).unwrap(), IntTensor::zeros(3, 1, 1).unwrap());
        assert_eq!(a.add(&a).unwrap(), a.scale(&2).unwrap());
    }

    #[test]
    fn overflow_is_loud_and_bigint_is_not() {
        let big = IntTensor::<i64>::scalar(1, i64::MAX);
        assert_eq!(big.add(&big), Err(Error::Overflow("tensor addition")));
        let b = big.to_big();
        assert_eq!(
            b.add(&b).unwrap().entries()[0],
            BigInt::from(i64::MAX) * 2
        );
        assert_eq!(b.add(&b).unwrap().to_json()["entries"][0], "18446744073709551614");
    }

    #[test]
    fn rotation_relocates_indices() {
        let g = Graph::path(3);
        let d = diagram(3, &[(0, 1), (1, 2)], &[0, 2], &[1]);
        let td = t(&g, &d);
        let tl = t(&g, &d.rotate_left().unwrap());
        for i1 in 0..3 {
            for i2 in 0..3 {
                for j in 0..3 {
                    assert_eq!(tl.get(&[i1, j], &[i2]), td.get(&[j], &[i1, i2]));
                }
            }
        }
    }

    #[test]
    fn functor_laws_on_small_diagrams() {
        let g = Graph::complete(3);
        let ds = [
            BilabelledGraph::identity(),
            BilabelledGraph::pair(),
            diagram(2, &[(0, 1)], &[0], &[1]),
            diagram(3, &[(0, 1), (1, 2)], &[1, 0], &[2]),
            diagram(2, &[(0, 0)], &[0], &[0, 1]),
        ];
        for d1 in &ds {
            for d2 in &ds {
                let report = verify_functor::<i64>(&g, d1, d2).unwrap();
                assert!(report.all_hold(), "{report}");
            }
        }
    }

    #[test]
    fn that_sum_examples() {
        let g = Graph::complete(3);
        let edge = diagram(2, &[(0, 1)], &[], &[0, 1]);
        assert_eq!(VertexOverlap::enumerate(2, 2).len(), 7);
        let report = verify_that_sums::<i64>(&g, &edge, &edge).unwrap();
        assert!(report.all_hold(), "{report}");
        let zero = BilabelledGraph::zero();
        assert!(verify_that_sums::<i64>(&g, &zero, &edge).unwrap().all_hold());
    }

    #[test]
    fn mismatched_kernels_give_zero_products() {
        let g = Graph::complete(3);
        let k = diagram(1, &[], &[], &[0, 0]);
        let h = diagram(2, &[], &[0, 1], &[]);
        let report = verify_that_sums::<i64>(&g, &k, &h).unwrap();
        assert!(report.all_hold(), "{report}");
        let product = &report.checks[1];
        assert!(product.lhs.is_zero() && product.rhs.is_zero());
    }

    #[test]
    fn moebius_examples() {
        let k2 = Graph::complete(2);
        let check = moebius_expand::<i64>(&k2, &BilabelledGraph::identity()).unwrap();
        assert!(check.holds());
        let n2 = diagram(2, &[], &[0], &[1]);
        let check = moebius_expand::<i64>(&k2, &n2).unwrap();
        assert!(check.holds());
        assert_eq!(check.lhs.entries(), &[1, 1, 1, 1]);
        let edge = diagram(2, &[(0, 1)], &[], &[0, 1]);
        let k3 = Graph::complete(3);
        let check = moebius_expand::<i64>(&k3, &edge).unwrap();
        assert!(check.holds());
        let looped = edge.quotient(&VertexPartition::from_labels(&[0, 0])).unwrap();
        assert!(that(&k3, &looped).is_zero());
    }

    #[test]
    fn mismatch_is_located() {
        let g = Graph::complete(3);
        let a = t(&g, &diagram(2, &[(0, 1)], &[0], &[1]));
        let b = t(&g, &diagram(2, &[], &[0], &[1]));
        let m = a.first_mismatch(&b).unwrap();
        assert_eq!(
            m,
            Mismatch::Entry {
                output: vec![0],
                input: vec![0],
                lhs: "0".into(),
                rhs: "1".into()
            }
        );
        let check = LawCheck::new("demo", a, b);
        assert!(check.to_string().contains("FAILS at entry j=[0] i=[0]"));
    }

    #[test]
    fn json_and_csv() {
        let a = t(&Graph::complete(2), &BilabelledGraph::identity());
        let text = serde_json::to_string(&a).unwrap();
        assert_eq!(text, r#"{"n":2,"k":1,"l":1,"entries":[1,0,0,1]}"#);
        let back: IntTensor = serde_json::from_str(&text).unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<IntTensor>(r#"{"n":2,"k":1,"l":1,"entries":[1]}"#).is_err());
        assert_eq!(a.to_csv(), "1,0\n0,1\n");
    }
}
