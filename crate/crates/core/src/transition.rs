//! Set-valued transitions `A ⇝ B` and parameter-indexed families of them.
//!
//! A transition maps every element of its source to a (possibly empty) subset
//! of its target. Partial functions and binary relations are both encoded this
//! way: "undefined" is the empty image.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::{ParamId, StateId};

pub type StateSet = BTreeSet<StateId>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransitionError {
    #[error("state {0} is not in the source set")]
    NotInSource(StateId),
    #[error("image of {from} contains {to}, which is not in the target set")]
    NotInTarget { from: StateId, to: StateId },
    #[error("target of the first transition differs from the source of the second")]
    MismatchedMiddle,
    #[error("transitions do not share source and target")]
    ContextMismatch,
    #[error("transition families have different parameter sets")]
    ParamMismatch,
    #[error("a transition family needs at least one parameter")]
    NoParams,
}

/// How close a transition is to a function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Determinism {
    /// Every image is a singleton.
    Deterministic,
    /// Every image has at most one element.
    QuasiDeterministic,
    General,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    source: StateSet,
    target: StateSet,
    map: BTreeMap<StateId, StateSet>,
}

impl Transition {
    /// Builds `source ⇝ target` from `(from, to)` pairs; elements of the
    /// source without a pair get the empty image.
    pub fn from_pairs<I>(source: StateSet, target: StateSet, pairs: I) -> Result<Self, TransitionError>
    where
        I: IntoIterator<Item = (StateId, StateId)>,
    {
        let mut t = Self::empty(source, target);
        for (from, to) in pairs {
            t.insert(from, to)?;
        }
        Ok(t)
    }

    /// Builds a transition from explicit images.
    pub fn from_images<I>(source: StateSet, target: StateSet, images: I) -> Result<Self, TransitionError>
    where
        I: IntoIterator<Item = (StateId, StateSet)>,
    {
        let mut t = Self::empty(source, target);
        for (from, image) in images {
            if image.is_empty() && !t.source.contains(&from) {
                return Err(TransitionError::NotInSource(from));
            }
            for to in image {
                t.insert(from.clone(), to)?;
            }
        }
        Ok(t)
    }

    /// The transition sending everything to the empty set.
    pub fn empty(source: StateSet, target: StateSet) -> Self {
        let map = source.iter().map(|s| (s.clone(), StateSet::new())).collect();
        Transition { source, target, map }
    }

    /// `id_A: a ↦ {a}`.
    pub fn identity(set: StateSet) -> Self {
        let map = set.iter().map(|s| (s.clone(), StateSet::from([s.clone()]))).collect();
        Transition {
            source: set.clone(),
            target: set,
            map,
        }
    }

    fn insert(&mut self, from: StateId, to: StateId) -> Result<(), TransitionError> {
        if !self.target.contains(&to) {
            return Err(TransitionError::NotInTarget { from, to });
        }
        match self.map.get_mut(&from) {
            Some(img) => {
                img.insert(to);
                Ok(())
            }
            None => Err(TransitionError::NotInSource(from)),
        }
    }

    pub fn source(&self) -> &StateSet {
        &self.source
    }

    pub fn target(&self) -> &StateSet {
        &self.target
    }

    /// Image of one element; empty for elements outside the source.
    pub fn apply(&self, a: &str) -> &StateSet {
        static EMPTY: StateSet = StateSet::new();
        self.map.get(a).unwrap_or(&EMPTY)
    }

    /// `(from, image)` for every element of the source, in canonical order.
    pub fn images(&self) -> impl Iterator<Item = (&StateId, &StateSet)> {
        self.map.iter()
    }

    /// `Im f`, the union of all images.
    pub fn image(&self) -> StateSet {
        self.map.values().flatten().cloned().collect()
    }

    /// The strongest class that holds.
    pub fn classify(&self) -> Determinism {
        if self.map.values().all(|img| img.len() == 1) {
            Determinism::Deterministic
        } else if self.map.values().all(|img| img.len() <= 1) {
            Determinism::QuasiDeterministic
        } else {
            Determinism::General
        }
    }

    pub fn is_deterministic(&self) -> bool {
        self.classify() == Determinism::Deterministic
    }

    /// Pointwise union with another transition on the same context.
    pub fn union(&self, other: &Transition) -> Result<Transition, TransitionError> {
        if self.source != other.source || self.target != other.target {
            return Err(TransitionError::ContextMismatch);
        }
        let mut out = self.clone();
        for (a, img) in &other.map {
            out.map.get_mut(a).expect("same source").extend(img.iter().cloned());
        }
        Ok(out)
    }
}

/// `g ⊙ f`, i.e. `a ↦ ⋃_{b ∈ f(a)} g(b)`. Requires `f.target = g.source`.
pub fn compose(f: &Transition, g: &Transition) -> Result<Transition, TransitionError> {
    if f.target != g.source {
        return Err(TransitionError::MismatchedMiddle);
    }
    let map = f
        .map
        .iter()
        .map(|(a, img)| {
            let out: StateSet = img.iter().flat_map(|b| g.apply(b).iter().cloned()).collect();
            (a.clone(), out)
        })
        .collect();
    Ok(Transition {
        source: f.source.clone(),
        target: g.target.clone(),
        map,
    })
}

/// `f(a) ⊆ g(a)` for every `a`.
pub fn pointwise_subset(f: &Transition, g: &Transition) -> Result<bool, TransitionError> {
    if f.source != g.source || f.target != g.target {
        return Err(TransitionError::ContextMismatch);
    }
    Ok(f.map.iter().all(|(a, img)| img.is_subset(g.apply(a))))
}

/// A nonempty parameter-indexed family of transitions with a shared source
/// and target (`A ⇉_M B`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionFamily {
    source: StateSet,
    target: StateSet,
    per_param: BTreeMap<ParamId, Transition>,
}

impl TransitionFamily {
    pub fn new(
        source: StateSet,
        target: StateSet,
        per_param: BTreeMap<ParamId, Transition>,
    ) -> Result<Self, TransitionError> {
        if per_param.is_empty() {
            return Err(TransitionError::NoParams);
        }
        if per_param.values().any(|t| t.source != source || t.target != target) {
            return Err(TransitionError::ContextMismatch);
        }
        Ok(TransitionFamily {
            source,
            target,
            per_param,
        })
    }

    /// The same identity transition for every parameter.
    pub fn identity(set: StateSet, params: &BTreeSet<ParamId>) -> Result<Self, TransitionError> {
        let per_param = params
            .iter()
            .map(|p| (p.clone(), Transition::identity(set.clone())))
            .collect();
        Self::new(set.clone(), set, per_param)
    }

    pub fn params(&self) -> impl Iterator<Item = &ParamId> {
        self.per_param.keys()
    }

    pub fn get(&self, param: &str) -> Option<&Transition> {
        self.per_param.get(param)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ParamId, &Transition)> {
        self.per_param.iter()
    }

    pub fn source(&self) -> &StateSet {
        &self.source
    }

    pub fn target(&self) -> &StateSet {
        &self.target
    }
}

/// Parameter-wise `g ⊙ f`.
pub fn compose_family(f: &TransitionFamily, g: &TransitionFamily) -> Result<TransitionFamily, TransitionError> {
    if !f.per_param.keys().eq(g.per_param.keys()) {
        return Err(TransitionError::ParamMismatch);
    }
    if f.target != g.source {
        return Err(TransitionError::MismatchedMiddle);
    }
    let per_param = f
        .per_param
        .iter()
        .map(|(p, fp)| Ok((p.clone(), compose(fp, &g.per_param[p])?)))
        .collect::<Result<_, TransitionError>>()?;
    TransitionFamily::new(f.source.clone(), g.target.clone(), per_param)
}
