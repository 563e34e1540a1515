//! Multiple relations and binary multiple relations.
//!
//! A multiple relation over an index `I` is a set of total tuples `I → values`
//! drawn from per-slot contexts. A binary multiple relation carries an
//! (input, output) pair in every slot; it is re-encoded three ways:
//!
//! - [`BinaryMultipleRelation::rd`] splits each slot `i` into `(i, In)` and `(i, Out)`;
//! - [`BinaryMultipleRelation::rm`] keeps the pairs as slot values;
//! - [`BinaryMultipleRelation::rb_image`] / [`BinaryMultipleRelation::rb_preimage`]
//!   read it as one binary relation between the product of inputs and the
//!   product of outputs.
//!
//! Slot and value types are generic and treated opaquely.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Debug;

use thiserror::Error;

pub type Tuple<S, V> = BTreeMap<S, V>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RelationError {
    #[error("context of slot {0} is empty")]
    EmptyContext(String),
    #[error("tuple is not total over the index or leaves a context: {0}")]
    BadTuple(String),
    #[error("slots {0} are not part of the index")]
    NotASubset(String),
    #[error("indexes overlap on {0}")]
    OverlappingIndexes(String),
    #[error("not a bipartition into two nonempty parts")]
    NotABipartition,
    #[error("malformed output tuple: {0}")]
    MalformedTuple(String),
    #[error("partial family uses slot {0}, which is not in the doubled index")]
    AlienSlot(String),
    #[error("partial families disagree on slot {0}")]
    Conflict(String),
}

/// `0_J` (empty graph) or `1_J` (full product).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constant {
    Zero,
    One,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultipleRelation<S: Ord, V: Ord> {
    contexts: BTreeMap<S, BTreeSet<V>>,
    graph: BTreeSet<Tuple<S, V>>,
}

impl<S, V> MultipleRelation<S, V>
where
    S: Ord + Clone + Debug,
    V: Ord + Clone + Debug,
{
    pub fn new(contexts: BTreeMap<S, BTreeSet<V>>, graph: BTreeSet<Tuple<S, V>>) -> Result<Self, RelationError> {
        if let Some((s, _)) = contexts.iter().find(|(_, c)| c.is_empty()) {
            return Err(RelationError::EmptyContext(format!("{s:?}")));
        }
        for t in &graph {
            let ok = t.len() == contexts.len() && t.iter().all(|(s, v)| contexts.get(s).is_some_and(|c| c.contains(v)));
            if !ok {
                return Err(RelationError::BadTuple(format!("{t:?}")));
            }
        }
        Ok(MultipleRelation { contexts, graph })
    }

    pub fn constant(contexts: BTreeMap<S, BTreeSet<V>>, kind: Constant) -> Result<Self, RelationError> {
        let graph = match kind {
            Constant::Zero => BTreeSet::new(),
            Constant::One => product(&contexts),
        };
        Self::new(contexts, graph)
    }

    pub fn index(&self) -> BTreeSet<S> {
        self.contexts.keys().cloned().collect()
    }

    pub fn contexts(&self) -> &BTreeMap<S, BTreeSet<V>> {
        &self.contexts
    }

    pub fn graph(&self) -> &BTreeSet<Tuple<S, V>> {
        &self.graph
    }

    /// `R|J`: same contexts on `J`, tuples projected onto `J`.
    pub fn restrict(&self, j: &BTreeSet<S>) -> Result<Self, RelationError> {
        let outside: Vec<&S> = j.iter().filter(|s| !self.contexts.contains_key(*s)).collect();
        if !outside.is_empty() {
            return Err(RelationError::NotASubset(format!("{outside:?}")));
        }
        Ok(self.project(j))
    }

    fn project(&self, j: &BTreeSet<S>) -> Self {
        let contexts = self
            .contexts
            .iter()
            .filter(|(s, _)| j.contains(*s))
            .map(|(s, c)| (s.clone(), c.clone()))
            .collect();
        let graph = self
            .graph
            .iter()
            .map(|t| {
                t.iter()
                    .filter(|(s, _)| j.contains(*s))
                    .map(|(s, v)| (s.clone(), v.clone()))
                    .collect()
            })
            .collect();
        MultipleRelation { contexts, graph }
    }

    /// Whether some tuple of the graph restricts to `partial`.
    pub fn extends(&self, partial: &Tuple<S, V>) -> bool {
        self.graph
            .iter()
            .any(|t| partial.iter().all(|(s, v)| t.get(s) == Some(v)))
    }
}

/// Product of two relations on disjoint indexes.
pub fn tensor<S, V>(
    left: &MultipleRelation<S, V>,
    right: &MultipleRelation<S, V>,
) -> Result<MultipleRelation<S, V>, RelationError>
where
    S: Ord + Clone + Debug,
    V: Ord + Clone + Debug,
{
    let shared: Vec<&S> = left
        .contexts
        .keys()
        .filter(|s| right.contexts.contains_key(*s))
        .collect();
    if !shared.is_empty() {
        return Err(RelationError::OverlappingIndexes(format!("{shared:?}")));
    }
    let mut contexts = left.contexts.clone();
    contexts.extend(right.contexts.iter().map(|(s, c)| (s.clone(), c.clone())));
    let mut graph = BTreeSet::new();
    for a in &left.graph {
        for b in &right.graph {
            let mut t = a.clone();
            t.extend(b.iter().map(|(s, v)| (s.clone(), v.clone())));
            graph.insert(t);
        }
    }
    Ok(MultipleRelation { contexts, graph })
}

fn product<S: Ord + Clone, V: Ord + Clone>(contexts: &BTreeMap<S, BTreeSet<V>>) -> BTreeSet<Tuple<S, V>> {
    let mut acc: Vec<Tuple<S, V>> = vec![Tuple::new()];
    for (s, c) in contexts {
        acc = acc
            .into_iter()
            .flat_map(|t| {
                c.iter().map(move |v| {
                    let mut t = t.clone();
                    t.insert(s.clone(), v.clone());
                    t
                })
            })
            .collect();
    }
    acc.into_iter().collect()
}

/// `R|J = R|K ⊗ R|L` for the bipartition `J = K ⊔ L`.
pub fn is_splittable<S, V>(
    r: &MultipleRelation<S, V>,
    j: &BTreeSet<S>,
    k: &BTreeSet<S>,
    l: &BTreeSet<S>,
) -> Result<bool, RelationError>
where
    S: Ord + Clone + Debug,
    V: Ord + Clone + Debug,
{
    if k.is_empty() || l.is_empty() || !k.is_disjoint(l) || &(k | l) != j {
        return Err(RelationError::NotABipartition);
    }
    let rj = r.restrict(j)?;
    Ok(rj.graph == tensor(&r.restrict(k)?, &r.restrict(l)?)?.graph)
}

/// Non-splittable parts of the index, ordered by size then lexicographically.
///
/// Singletons are always present since they admit no bipartition. The empty
/// part is only reported when `include_empty` is set.
pub fn connective_structure<S, V>(r: &MultipleRelation<S, V>, include_empty: bool) -> Vec<BTreeSet<S>>
where
    S: Ord + Clone + Debug,
    V: Ord + Clone + Debug,
{
    let index: Vec<S> = r.contexts.keys().cloned().collect();
    let n = index.len();
    assert!(n < usize::BITS as usize, "index too large for subset search");
    let subset = |mask: usize| -> BTreeSet<S> {
        (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| index[i].clone())
            .collect()
    };
    let mut projections: BTreeMap<usize, BTreeSet<Tuple<S, V>>> = BTreeMap::new();
    let mut projected = |mask: usize| -> BTreeSet<Tuple<S, V>> {
        projections
            .entry(mask)
            .or_insert_with(|| r.project(&subset(mask)).graph)
            .clone()
    };

    let mut out: Vec<Vec<S>> = Vec::new();
    if include_empty {
        out.push(Vec::new());
    }
    for mask in 1usize..(1 << n) {
        let lowest = mask & mask.wrapping_neg();
        let rest = mask & !lowest;
        let whole = projected(mask);
        // K ranges over submasks of `mask` containing its lowest bit, K ≠ J
        let mut split = false;
        let mut sub = rest;
        while sub != rest || !split {
            let k = lowest | (rest & !sub);
            if k != mask {
                let l = mask & !k;
                let (gk, gl) = (projected(k), projected(l));
                if gk.len() * gl.len() == whole.len() && tensor_graph(&gk, &gl) == whole {
                    split = true;
                    break;
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        if !split {
            out.push(subset(mask).into_iter().collect());
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out.into_iter().map(|v| v.into_iter().collect()).collect()
}

fn tensor_graph<S: Ord + Clone, V: Ord + Clone>(
    a: &BTreeSet<Tuple<S, V>>,
    b: &BTreeSet<Tuple<S, V>>,
) -> BTreeSet<Tuple<S, V>> {
    let mut out = BTreeSet::new();
    for x in a {
        for y in b {
            let mut t = x.clone();
            t.extend(y.iter().map(|(s, v)| (s.clone(), v.clone())));
            out.insert(t);
        }
    }
    out
}

/// Which half of a doubled slot `(i, 0)` / `(i, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    In,
    Out,
}

/// A value of the doubled relation: an input or an output.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Entry<A, B> {
    In(A),
    Out(B),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryMultipleRelation<S: Ord, A: Ord, B: Ord> {
    in_contexts: BTreeMap<S, BTreeSet<A>>,
    out_contexts: BTreeMap<S, BTreeSet<B>>,
    graph: BTreeSet<Tuple<S, (A, B)>>,
}

impl<S, A, B> BinaryMultipleRelation<S, A, B>
where
    S: Ord + Clone + Debug,
    A: Ord + Clone + Debug,
    B: Ord + Clone + Debug,
{
    pub fn new(
        in_contexts: BTreeMap<S, BTreeSet<A>>,
        out_contexts: BTreeMap<S, BTreeSet<B>>,
        graph: BTreeSet<Tuple<S, (A, B)>>,
    ) -> Result<Self, RelationError> {
        if !in_contexts.keys().eq(out_contexts.keys()) {
            return Err(RelationError::BadTuple(
                "input and output contexts have different indexes".into(),
            ));
        }
        for (s, c) in &in_contexts {
            if c.is_empty() || out_contexts[s].is_empty() {
                return Err(RelationError::EmptyContext(format!("{s:?}")));
            }
        }
        for t in &graph {
            let ok = t.len() == in_contexts.len()
                && t.iter().all(|(s, (a, b))| {
                    in_contexts.get(s).is_some_and(|c| c.contains(a))
                        && out_contexts.get(s).is_some_and(|c| c.contains(b))
                });
            if !ok {
                return Err(RelationError::BadTuple(format!("{t:?}")));
            }
        }
        Ok(BinaryMultipleRelation {
            in_contexts,
            out_contexts,
            graph,
        })
    }

    pub fn index(&self) -> BTreeSet<S> {
        self.in_contexts.keys().cloned().collect()
    }

    pub fn in_contexts(&self) -> &BTreeMap<S, BTreeSet<A>> {
        &self.in_contexts
    }

    pub fn out_contexts(&self) -> &BTreeMap<S, BTreeSet<B>> {
        &self.out_contexts
    }

    pub fn graph(&self) -> &BTreeSet<Tuple<S, (A, B)>> {
        &self.graph
    }

    /// Relation over the doubled index `I × {In, Out}`.
    pub fn rd(&self) -> MultipleRelation<(S, Side), Entry<A, B>> {
        let mut contexts = BTreeMap::new();
        for (s, c) in &self.in_contexts {
            contexts.insert((s.clone(), Side::In), c.iter().cloned().map(Entry::In).collect());
        }
        for (s, c) in &self.out_contexts {
            contexts.insert((s.clone(), Side::Out), c.iter().cloned().map(Entry::Out).collect());
        }
        let graph = self
            .graph
            .iter()
            .map(|t| {
                t.iter()
                    .flat_map(|(s, (a, b))| {
                        [
                            ((s.clone(), Side::In), Entry::In(a.clone())),
                            ((s.clone(), Side::Out), Entry::Out(b.clone())),
                        ]
                    })
                    .collect()
            })
            .collect();
        MultipleRelation { contexts, graph }
    }

    /// Relation over `I` with pair values in `A_i × B_i`.
    pub fn rm(&self) -> MultipleRelation<S, (A, B)> {
        let contexts = self
            .in_contexts
            .iter()
            .map(|(s, ins)| {
                let pairs = ins
                    .iter()
                    .flat_map(|a| self.out_contexts[s].iter().map(move |b| (a.clone(), b.clone())))
                    .collect();
                (s.clone(), pairs)
            })
            .collect();
        MultipleRelation {
            contexts,
            graph: self.graph.clone(),
        }
    }

    /// `Im(rb(C))`: output tuples paired with at least one input tuple.
    pub fn rb_image(&self) -> BTreeSet<Tuple<S, B>> {
        self.graph
            .iter()
            .map(|t| t.iter().map(|(s, (_, b))| (s.clone(), b.clone())).collect())
            .collect()
    }

    /// `rb(C)^{-1}(mu)`.
    pub fn rb_preimage(&self, mu: &Tuple<S, B>) -> Result<BTreeSet<Tuple<S, A>>, RelationError> {
        let well_formed = mu.len() == self.out_contexts.len()
            && mu
                .iter()
                .all(|(s, b)| self.out_contexts.get(s).is_some_and(|c| c.contains(b)));
        if !well_formed {
            return Err(RelationError::MalformedTuple(format!("{mu:?}")));
        }
        Ok(self
            .graph
            .iter()
            .filter(|t| t.iter().all(|(s, (_, b))| mu.get(s) == Some(b)))
            .map(|t| t.iter().map(|(s, (a, _))| (s.clone(), a.clone())).collect())
            .collect())
    }

    /// Whether `p` is the restriction of a tuple of `rd(C)`.
    pub fn is_compatible(&self, p: &PartialFamily<S, A, B>) -> Result<bool, RelationError> {
        for ((s, side), v) in &p.0 {
            let kind_ok = matches!((side, v), (Side::In, Entry::In(_)) | (Side::Out, Entry::Out(_)));
            if !self.in_contexts.contains_key(s) || !kind_ok {
                return Err(RelationError::AlienSlot(format!("{:?}", (s, side))));
            }
        }
        Ok(self.graph.iter().any(|t| {
            p.0.iter().all(|((s, _), v)| {
                let (a, b) = &t[s];
                match v {
                    Entry::In(x) => x == a,
                    Entry::Out(y) => y == b,
                }
            })
        }))
    }

    /// The structure of `rm(C)`.
    pub fn connective_structure(&self, include_empty: bool) -> Vec<BTreeSet<S>> {
        connective_structure(&self.rm(), include_empty)
    }
}

/// An assignment over part of the doubled index.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PartialFamily<S: Ord, A, B>(pub BTreeMap<(S, Side), Entry<A, B>>);

impl<S, A, B> Default for PartialFamily<S, A, B>
where
    S: Ord,
{
    fn default() -> Self {
        PartialFamily(BTreeMap::new())
    }
}

impl<S, A, B> PartialFamily<S, A, B>
where
    S: Ord + Clone + Debug,
    A: Clone + PartialEq,
    B: Clone + PartialEq,
{
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_in(mut self, slot: S, a: A) -> Self {
        self.0.insert((slot, Side::In), Entry::In(a));
        self
    }

    pub fn with_out(mut self, slot: S, b: B) -> Self {
        self.0.insert((slot, Side::Out), Entry::Out(b));
        self
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `q + r`, defined when both agree on shared slots.
    pub fn join(&self, other: &Self) -> Result<Self, RelationError> {
        let mut out = self.0.clone();
        for (k, v) in &other.0 {
            match out.get(k) {
                Some(existing) if existing != v => {
                    return Err(RelationError::Conflict(format!("{k:?}")));
                }
                _ => {
                    out.insert(k.clone(), v.clone());
                }
            }
        }
        Ok(PartialFamily(out))
    }
}
