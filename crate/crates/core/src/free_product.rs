//! Words in the free product of copies of `Z₂` and membership in finitely
//! generated normal closures.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet, VecDeque};
use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_BFS_DEPTH: usize = 6;
pub const DEFAULT_BFS_MAX_LEN: usize = 24;
pub const DEFAULT_BFS_MAX_STATES: usize = 200_000;
pub const DEFAULT_COSET_LIMIT: usize = 100_000;

/// A word over the generators `v_0, v_1, ...` of `Z₂^{*V}`. Not necessarily
/// reduced; the group operations return reduced words.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(letters: Vec<usize>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Parses `"abab"`-style words: `a` is letter 0, `z` letter 25.
    pub fn from_letters(text: &str) -> Result<Self> {
        text.chars()
            .map(|c| {
                if c.is_ascii_lowercase() {
                    Ok(c as usize - 'a' as usize)
                } else {
                    Err(Error::validation(format!("bad letter {c:?}")))
                }
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    /// `g_a = a_1 a_2 ... a_k`.
    pub fn from_tuple(a: &[usize]) -> Self {
        Word(a.to_vec())
    }

    /// `g_{a*b} = g_a^{-1} g_b`, reduced.
    pub fn between(a: &[usize], b: &[usize]) -> Self {
        Word(a.iter().rev().chain(b).copied().collect()).reduce()
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|w| w[0] != w[1])
    }

    /// Cancels adjacent equal letters until none remain.
    pub fn reduce(&self) -> Word {
        let mut out: Vec<usize> = Vec::with_capacity(self.0.len());
        for &x in &self.0 {
            if out.last() == Some(&x) {
                out.pop();
            } else {
                out.push(x);
            }
        }
        Word(out)
    }

    pub fn multiply(&self, other: &Word) -> Word {
        Word(self.0.iter().chain(&other.0).copied().collect()).reduce()
    }

    /// The word read backwards.
    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().copied().collect()).reduce()
    }

    /// `x w x⁻¹` for a single letter `x`.
    pub fn conjugate(&self, x: usize) -> Word {
        Word::new(vec![x]).multiply(self).multiply(&Word::new(vec![x]))
    }

    /// Relabels every letter through `map` and reduces.
    pub fn apply_map(&self, map: &[usize]) -> Word {
        Word(self.0.iter().map(|&x| map[x]).collect()).reduce()
    }

    /// Reduced and cyclically reduced conjugate.
    pub fn cyclic_reduce(&self) -> Word {
        let mut w = self.reduce().0;
        while w.len() >= 2 && w[0] == w[w.len() - 1] {
            w.pop();
            w.remove(0);
        }
        Word(w)
    }

    pub fn max_letter(&self) -> Option<usize> {
        self.0.iter().copied().max()
    }

    fn parity(&self, alphabet: usize) -> Vec<bool> {
        let mut p = vec![false; alphabet];
        for &x in &self.0 {
            p[x] ^= true;
        }
        p
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        for x in &self.0 {
            write!(f, "v{x}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

fn symbol_name(x: usize) -> String {
    if x < 26 {
        char::from(b'a' + x as u8).to_string()
    } else {
        format!("v{x}")
    }
}

/// Accepts `"a"`..`"z"`, `"v<i>"` or a bare integer.
pub fn parse_symbol(s: &str) -> Result<usize> {
    let mut chars = s.chars();
    match (chars.next(), chars.as_str()) {
        (Some(c), "") if c.is_ascii_lowercase() => Ok(c as usize - 'a' as usize),
        (Some('v'), digits) if !digits.is_empty() => digits
            .parse()
            .map_err(|_| Error::validation(format!("bad symbol {s:?}"))),
        _ => s
            .parse()
            .map_err(|_| Error::validation(format!("bad symbol {s:?}"))),
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SymbolRepr {
    Index(usize),
    Name(String),
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|&x| symbol_name(x)))
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum WordRepr {
            Text(String),
            Symbols(Vec<SymbolRepr>),
        }
        let letters = match WordRepr::deserialize(d)? {
            WordRepr::Text(t) => return Word::from_letters(&t).map_err(de::Error::custom),
            WordRepr::Symbols(symbols) => symbols
                .into_iter()
                .map(|s| match s {
                    SymbolRepr::Index(i) => Ok(i),
                    SymbolRepr::Name(n) => parse_symbol(&n),
                })
                .collect::<Result<Vec<_>>>()
                .map_err(de::Error::custom)?,
        };
        Ok(Word(letters))
    }
}

/// Tri-state membership verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Membership {
    Yes,
    No,
    Unknown,
}

impl Membership {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Membership::Yes
        } else {
            Membership::No
        }
    }

    /// Conjunction in which `Unknown` wins over `Yes` but not over `No`.
    pub fn and(self, other: Membership) -> Membership {
        match (self, other) {
            (Membership::No, _) | (_, Membership::No) => Membership::No,
            (Membership::Yes, Membership::Yes) => Membership::Yes,
            _ => Membership::Unknown,
        }
    }

    pub fn is_yes(self) -> bool {
        self == Membership::Yes
    }
}

impl fmt::Display for Membership {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Membership::Yes => "yes",
            Membership::No => "no",
            Membership::Unknown => "unknown",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BfsLimits {
    pub depth: usize,
    pub max_len: usize,
    #[serde(default = "default_max_states")]
    pub max_states: usize,
}

fn default_max_states() -> usize {
    DEFAULT_BFS_MAX_STATES
}

impl Default for BfsLimits {
    fn default() -> Self {
        BfsLimits {
            depth: DEFAULT_BFS_DEPTH,
            max_len: DEFAULT_BFS_MAX_LEN,
            max_states: DEFAULT_BFS_MAX_STATES,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Coset enumeration of the quotient; exact when it is finite.
    FiniteModel,
    /// Tits' shuffle normal form for right-angled Coxeter quotients.
    Racg,
    /// Relator insertion search with a parity certificate for `No`.
    BoundedBfs(BfsLimits),
    /// `racg` if eligible, else `finite-model` if the quotient is finite under
    /// the coset limit, else `bounded-bfs` with default limits.
    #[default]
    Auto,
}

impl Strategy {
    pub fn bounded_bfs() -> Self {
        Strategy::BoundedBfs(BfsLimits::default())
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Strategy::FiniteModel | Strategy::Racg)
    }
}

/// The normal closure `⟨⟨generators⟩⟩ ⊴ Z₂^{*alphabet}` with a membership
/// strategy.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalClosureSpec {
    pub alphabet: usize,
    #[serde(default)]
    pub generators: Vec<Word>,
    #[serde(default)]
    pub strategy: Strategy,
    #[serde(default = "default_coset_limit")]
    pub coset_limit: usize,
}

fn default_coset_limit() -> usize {
    DEFAULT_COSET_LIMIT
}

impl NormalClosureSpec {
    pub fn new(alphabet: usize, generators: Vec<Word>, strategy: Strategy) -> Result<Self> {
        let spec = NormalClosureSpec {
            alphabet,
            generators,
            strategy,
            coset_limit: DEFAULT_COSET_LIMIT,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn trivial(alphabet: usize) -> Self {
        NormalClosureSpec {
            alphabet,
            generators: Vec::new(),
            strategy: Strategy::Auto,
            coset_limit: DEFAULT_COSET_LIMIT,
        }
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn with_coset_limit(mut self, limit: usize) -> Self {
        self.coset_limit = limit;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for g in &self.generators {
            self.check_word(g)?;
        }
        Ok(())
    }

    fn check_word(&self, w: &Word) -> Result<()> {
        match w.max_letter() {
            Some(x) if x >= self.alphabet => Err(Error::validation(format!(
                "letter {} outside an alphabet of size {}",
                symbol_name(x),
                self.alphabet
            ))),
            _ => Ok(()),
        }
    }

    /// Relators actually used: cyclically reduced, nonempty, deduplicated.
    fn relators(&self) -> Vec<Word> {
        let mut seen = HashSet::new();
        self.generators
            .iter()
            .map(Word::cyclic_reduce)
            .filter(|w| !w.is_empty() && seen.insert(w.clone()))
            .collect()
    }

    /// The commutation graph if every relator has the form `xyxy` with `x ≠ y`.
    pub fn racg_commutations(&self) -> Option<Vec<(usize, usize)>> {
        let mut pairs = Vec::new();
        for r in self.relators() {
            match r.letters() {
                &[x, y, x2, y2] if x != y && x == x2 && y == y2 => {
                    pairs.push((x.min(y), x.max(y)));
                }
                _ => return None,
            }
        }
        pairs.sort_unstable();
        pairs.dedup();
        Some(pairs)
    }

    /// Builds the membership engine once; reuse it for many queries.
    pub fn oracle(&self) -> Result<MembershipOracle> {
        self.validate()?;
        let engine = match self.strategy {
            Strategy::Racg => match self.racg_commutations() {
                Some(pairs) => Engine::Racg(Commutation::new(self.alphabet, &pairs)),
                None => {
                    return Err(Error::Precondition(
                        "racg strategy needs every generator of the form xyxy".into(),
                    ))
                }
            },
            Strategy::FiniteModel => match CosetTable::enumerate(self, self.coset_limit) {
                Some(t) => Engine::Table(t),
                None => Engine::Undecided,
            },
            Strategy::BoundedBfs(limits) => Engine::Bfs(Bfs::new(self, limits)),
            Strategy::Auto => {
                if let Some(pairs) = self.racg_commutations() {
                    Engine::Racg(Commutation::new(self.alphabet, &pairs))
                } else if let Some(t) = CosetTable::enumerate(self, self.coset_limit) {
                    Engine::Table(t)
                } else {
                    Engine::Bfs(Bfs::new(self, BfsLimits::default()))
                }
            }
        };
        Ok(MembershipOracle {
            alphabet: self.alphabet,
            engine,
        })
    }

    pub fn member(&self, w: &Word) -> Result<Membership> {
        self.oracle()?.member(w)
    }

    /// `|Z₂^{*alphabet} / A|` if coset enumeration finishes under the limit.
    pub fn quotient_order_if_finite(&self) -> Option<usize> {
        CosetTable::enumerate(self, self.coset_limit).map(|t| t.order())
    }
}

/// `member(w, A)`.
pub fn member(w: &Word, spec: &NormalClosureSpec) -> Result<Membership> {
    spec.member(w)
}

/// A prepared membership test. Immutable and shareable across threads.
#[derive(Clone, Debug)]
pub struct MembershipOracle {
    alphabet: usize,
    engine: Engine,
}

#[derive(Clone, Debug)]
enum Engine {
    Racg(Commutation),
    Table(CosetTable),
    Bfs(Bfs),
    Undecided,
}

impl MembershipOracle {
    pub fn member(&self, w: &Word) -> Result<Membership> {
        if let Some(x) = w.max_letter().filter(|&x| x >= self.alphabet) {
            return Err(Error::validation(format!(
                "letter {} outside an alphabet of size {}",
                symbol_name(x),
                self.alphabet
            )));
        }
        let w = w.reduce();
        if w.is_empty() {
            return Ok(Membership::Yes);
        }
        Ok(match &self.engine {
            Engine::Racg(c) => Membership::from_bool(c.normal_form(&w).is_empty()),
            Engine::Table(t) => Membership::from_bool(t.trace(&w) == 0),
            Engine::Bfs(b) => b.member(&w),
            Engine::Undecided => Membership::Unknown,
        })
    }

    /// Whether verdicts are always `Yes` or `No`.
    pub fn is_exact(&self) -> bool {
        matches!(self.engine, Engine::Racg(_) | Engine::Table(_))
    }

    /// Name of the engine that was selected.
    pub fn engine_name(&self) -> &'static str {
        match self.engine {
            Engine::Racg(_) => "racg",
            Engine::Table(_) => "finite-model",
            Engine::Bfs(_) => "bounded-bfs",
            Engine::Undecided => "undecided",
        }
    }
}

#[derive(Clone, Debug)]
struct Commutation {
    n: usize,
    commute: Vec<bool>,
}

impl Commutation {
    fn new(n: usize, pairs: &[(usize, usize)]) -> Self {
        let mut commute = vec![false; n * n];
        for &(x, y) in pairs {
            commute[x * n + y] = true;
            commute[y * n + x] = true;
        }
        Commutation { n, commute }
    }

    /// Deletes pairs `w_i = w_j` whose in-between letters all commute with
    /// `w_i` until none is left; the result is a reduced word of the
    /// right-angled Coxeter group.
    fn normal_form(&self, w: &Word) -> Vec<usize> {
        let mut w = w.letters().to_vec();
        'outer: loop {
            for i in 0..w.len() {
                let x = w[i];
                for j in i + 1..w.len() {
                    if w[j] == x {
                        w.remove(j);
                        w.remove(i);
                        continue 'outer;
                    }
                    if !self.commute[x * self.n + w[j]] {
                        break;
                    }
                }
            }
            return w;
        }
    }
}

/// Coset table of the trivial subgroup, i.e. the regular action of the
/// quotient group. Every generator is an involution, so one column per
/// generator serves as its own inverse.
#[derive(Clone, Debug)]
struct CosetTable {
    table: Vec<Vec<usize>>,
}

struct Enumeration {
    gens: usize,
    table: Vec<Vec<Option<usize>>>,
    parent: Vec<usize>,
    queue: VecDeque<usize>,
    limit: usize,
}

impl Enumeration {
    fn rep(&mut self, mut c: usize) -> usize {
        let mut root = c;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[c] != root {
            let next = self.parent[c];
            self.parent[c] = root;
            c = next;
        }
        root
    }

    fn alive(&self, c: usize) -> bool {
        self.parent[c] == c
    }

    fn define(&mut self, c: usize, x: usize) -> bool {
        if self.table.len() >= self.limit {
            return false;
        }
        let d = self.table.len();
        self.table.push(vec![None; self.gens]);
        self.parent.push(d);
        self.table[c][x] = Some(d);
        self.table[d][x] = Some(c);
        true
    }

    fn merge(&mut self, a: usize, b: usize) {
        let (a, b) = (self.rep(a), self.rep(b));
        if a != b {
            let (lo, hi) = (a.min(b), a.max(b));
            self.parent[hi] = lo;
            self.queue.push_back(hi);
        }
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        self.merge(a, b);
        while let Some(e) = self.queue.pop_front() {
            for x in 0..self.gens {
                let Some(f) = self.table[e][x] else { continue };
                if self.table[f][x] == Some(e) {
                    self.table[f][x] = None;
                }
                let (e1, f1) = (self.rep(e), self.rep(f));
                if let Some(t) = self.table[e1][x] {
                    self.merge(f1, t);
                } else if let Some(t) = self.table[f1][x] {
                    self.merge(e1, t);
                } else {
                    self.table[e1][x] = Some(f1);
                    self.table[f1][x] = Some(e1);
                }
            }
        }
    }

    /// Scans `r` at `c`, defining cosets as needed. `false` if the limit is hit.
    fn scan_and_fill(&mut self, c: usize, r: &[usize]) -> bool {
        let (mut f, mut b) = (c, c);
        let (mut i, mut j) = (0usize, r.len());
        loop {
            while i < j {
                match self.table[f][r[i]] {
                    Some(next) => {
                        f = next;
                        i += 1;
                    }
                    None => break,
                }
            }
            if i == j {
                if f != b {
                    self.coincidence(f, b);
                }
                return true;
            }
            while j > i {
                match self.table[b][r[j - 1]] {
                    Some(next) => {
                        b = next;
                        j -= 1;
                    }
                    None => break,
                }
            }
            if j == i {
                self.coincidence(f, b);
                return true;
            }
            if j == i + 1 {
                let x = r[i];
                self.table[f][x] = Some(b);
                self.table[b][x] = Some(f);
                return true;
            }
            if !self.define(f, r[i]) {
                return false;
            }
        }
    }
}

impl CosetTable {
    /// HLT enumeration with coincidence processing; `None` past `limit`
    /// defined cosets.
    fn enumerate(spec: &NormalClosureSpec, limit: usize) -> Option<CosetTable> {
        let gens = spec.alphabet;
        let relators = spec.relators();
        let mut e = Enumeration {
            gens,
            table: vec![vec![None; gens]],
            parent: vec![0],
            queue: VecDeque::new(),
            limit: limit.max(1),
        };
        let mut c = 0;
        while c < e.table.len() {
            for r in &relators {
                if !e.alive(c) {
                    break;
                }
                if !e.scan_and_fill(c, r.letters()) {
                    return None;
                }
            }
            for x in 0..gens {
                if !e.alive(c) {
                    break;
                }
                if e.table[c][x].is_none() && !e.define(c, x) {
                    return None;
                }
            }
            c += 1;
        }
        let live: Vec<usize> = (0..e.table.len()).filter(|&c| e.alive(c)).collect();
        let mut index = vec![usize::MAX; e.table.len()];
        for (i, &c) in live.iter().enumerate() {
            index[c] = i;
        }
        let mut table = Vec::with_capacity(live.len());
        for &c in &live {
            let mut row = Vec::with_capacity(gens);
            for x in 0..gens {
                let d = e.table[c][x]?;
                let d = e.rep(d);
                row.push(index[d]);
            }
            table.push(row);
        }
        Some(CosetTable { table })
    }

    fn order(&self) -> usize {
        self.table.len()
    }

    fn trace(&self, w: &Word) -> usize {
        w.letters().iter().fold(0, |c, &x| self.table[c][x])
    }
}

/// Semi-decision by inserting cyclic rotations of relators. A `No` is only
/// reported when the letter-parity image of `w` lies outside the span of the
/// relators' parities, which certifies non-membership.
#[derive(Clone, Debug)]
struct Bfs {
    alphabet: usize,
    limits: BfsLimits,
    insertions: Vec<Vec<usize>>,
    parity_basis: Vec<Vec<bool>>,
}

impl Bfs {
    fn new(spec: &NormalClosureSpec, limits: BfsLimits) -> Self {
        let relators = spec.relators();
        let mut insertions = HashSet::new();
        for r in &relators {
            for w in [r.letters().to_vec(), r.inverse().letters().to_vec()] {
                for s in 0..w.len() {
                    let mut rot = w[s..].to_vec();
                    rot.extend_from_slice(&w[..s]);
                    insertions.insert(rot);
                }
            }
        }
        let mut insertions: Vec<Vec<usize>> = insertions.into_iter().collect();
        insertions.sort();
        let parity_basis = echelon(
            relators
                .iter()
                .map(|r| r.parity(spec.alphabet))
                .collect(),
        );
        Bfs {
            alphabet: spec.alphabet,
            limits,
            insertions,
            parity_basis,
        }
    }

    fn member(&self, w: &Word) -> Membership {
        if !in_span(&self.parity_basis, w.parity(self.alphabet)) {
            return Membership::No;
        }
        // best-first on word length, bounded by depth, length and state count
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        let mut heap = BinaryHeap::new();
        seen.insert(w.letters().to_vec());
        heap.push(Reverse((w.len(), 0usize, w.letters().to_vec())));
        while let Some(Reverse((_, depth, current))) = heap.pop() {
            if current.is_empty() {
                return Membership::Yes;
            }
            if depth == self.limits.depth {
                continue;
            }
            for pos in 0..=current.len() {
                for ins in &self.insertions {
                    let mut next = current[..pos].to_vec();
                    next.extend_from_slice(ins);
                    next.extend_from_slice(&current[pos..]);
                    let next = Word::new(next).reduce().0;
                    if next.len() > self.limits.max_len || seen.contains(&next) {
                        continue;
                    }
                    if next.is_empty() {
                        return Membership::Yes;
                    }
                    if seen.len() >= self.limits.max_states {
                        return Membership::Unknown;
                    }
                    seen.insert(next.clone());
                    heap.push(Reverse((next.len(), depth + 1, next)));
                }
            }
        }
        Membership::Unknown
    }
}

fn echelon(mut rows: Vec<Vec<bool>>) -> Vec<Vec<bool>> {
    let mut basis: Vec<Vec<bool>> = Vec::new();
    for mut row in rows.drain(..) {
        for b in &basis {
            let pivot = b.iter().position(|&x| x).unwrap();
            if row[pivot] {
                row.iter_mut().zip(b).for_each(|(r, &x)| *r ^= x);
            }
        }
        if row.iter().any(|&x| x) {
            let pivot = row.iter().position(|&x| x).unwrap();
            for b in &mut basis {
                if b[pivot] {
                    b.iter_mut().zip(&row).for_each(|(r, &x)| *r ^= x);
                }
            }
            basis.push(row);
        }
    }
    basis
}

fn in_span(basis: &[Vec<bool>], mut v: Vec<bool>) -> bool {
    for b in basis {
        let pivot = b.iter().position(|&x| x).unwrap();
        if v[pivot] {
            v.iter_mut().zip(b).for_each(|(r, &x)| *r ^= x);
        }
    }
    v.iter().all(|&x| !x)
}
