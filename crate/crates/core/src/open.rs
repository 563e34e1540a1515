//! Multi-dynamics, open dynamics, their realizations and parametric quotients.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::dynamics::{
    check_dynamorphism, scansion_diagnostics_with, search_realizations, Assignment, Clock, Dynamics, DynamicsError,
    DynamorphismDiagnostic, ScannedDynamics, ScansionDiagnostic,
};
use crate::graph::{join_diags, Graph, GraphMorphism};
use crate::transition::{StateSet, Transition, TransitionError, TransitionFamily};
use crate::{EdgeId, InstantId, ParamId, StateId, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OpenError {
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error("edge {edge}: {source}")]
    Transition {
        edge: EdgeId,
        #[source]
        source: TransitionError,
    },
    #[error("a multi-dynamics needs at least one parameter")]
    NoParams,
    #[error("unknown parameter {0}")]
    UnknownParam(ParamId),
    #[error("transition family of edge {0} does not range over the parameter set")]
    ParamMismatch(EdgeId),
    #[error("invalid open dynamics: {}", join_diags(.0))]
    InvalidOpen(Vec<ScansionDiagnostic>),
    #[error("not a partition of the parameter set: {0}")]
    NotAPartition(String),
    #[error("unknown state {0}")]
    UnknownState(StateId),
}

/// Parameter-indexed dynamics on one motor, sharing their state sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiDynamics {
    motor: Graph,
    params: BTreeSet<ParamId>,
    state_sets: BTreeMap<VertexId, StateSet>,
    edge_trans: BTreeMap<EdgeId, TransitionFamily>,
    slices: BTreeMap<ParamId, Dynamics>,
}

impl MultiDynamics {
    /// Edges without a family get the empty transition for every parameter.
    pub fn new(
        motor: Graph,
        params: BTreeSet<ParamId>,
        state_sets: BTreeMap<VertexId, StateSet>,
        mut edge_trans: BTreeMap<EdgeId, TransitionFamily>,
    ) -> Result<Self, OpenError> {
        if params.is_empty() {
            return Err(OpenError::NoParams);
        }
        if let Some(e) = edge_trans.keys().find(|e| motor.edge(e).is_none()) {
            return Err(DynamicsError::UnknownEdge(e.clone()).into());
        }
        for e in motor.edges() {
            let src = state_sets.get(&e.dom).cloned().unwrap_or_default();
            let tgt = state_sets.get(&e.cod).cloned().unwrap_or_default();
            let fam = edge_trans.entry(e.id.clone()).or_insert_with(|| {
                let empty = params
                    .iter()
                    .map(|p| (p.clone(), Transition::empty(src.clone(), tgt.clone())))
                    .collect();
                TransitionFamily::new(src.clone(), tgt.clone(), empty).expect("nonempty params")
            });
            if !fam.params().eq(params.iter()) {
                return Err(OpenError::ParamMismatch(e.id.clone()));
            }
        }
        let mut slices = BTreeMap::new();
        for p in &params {
            let trans = edge_trans
                .iter()
                .map(|(e, fam)| (e.clone(), fam.get(p).expect("checked params").clone()))
                .collect();
            slices.insert(p.clone(), Dynamics::new(motor.clone(), state_sets.clone(), trans)?);
        }
        let state_sets = slices.values().next().expect("nonempty").state_sets().clone();
        Ok(MultiDynamics {
            motor,
            params,
            state_sets,
            edge_trans,
            slices,
        })
    }

    /// Builds the families from `(edge, param, from, to)` arrows.
    pub fn from_arrows<I>(
        motor: Graph,
        params: BTreeSet<ParamId>,
        state_sets: BTreeMap<VertexId, StateSet>,
        arrows: I,
    ) -> Result<Self, OpenError>
    where
        I: IntoIterator<Item = (EdgeId, ParamId, StateId, StateId)>,
    {
        let mut pairs: BTreeMap<EdgeId, BTreeMap<ParamId, Vec<(StateId, StateId)>>> = BTreeMap::new();
        for (e, p, a, b) in arrows {
            if !params.contains(&p) {
                return Err(OpenError::UnknownParam(p));
            }
            pairs.entry(e).or_default().entry(p).or_default().push((a, b));
        }
        let mut edge_trans = BTreeMap::new();
        for (e, by_param) in pairs {
            let edge = motor.edge(&e).ok_or_else(|| DynamicsError::UnknownEdge(e.clone()))?;
            let src = state_sets.get(&edge.dom).cloned().unwrap_or_default();
            let tgt = state_sets.get(&edge.cod).cloned().unwrap_or_default();
            let mut per_param = BTreeMap::new();
            for p in &params {
                let ps = by_param.get(p).cloned().unwrap_or_default();
                let t =
                    Transition::from_pairs(src.clone(), tgt.clone(), ps).map_err(|source| OpenError::Transition {
                        edge: e.clone(),
                        source,
                    })?;
                per_param.insert(p.clone(), t);
            }
            let fam = TransitionFamily::new(src, tgt, per_param).map_err(|source| OpenError::Transition {
                edge: e.clone(),
                source,
            })?;
            edge_trans.insert(e, fam);
        }
        Self::new(motor, params, state_sets, edge_trans)
    }

    pub fn motor(&self) -> &Graph {
        &self.motor
    }

    pub fn params(&self) -> &BTreeSet<ParamId> {
        &self.params
    }

    pub fn states(&self, vertex: &str) -> &StateSet {
        self.slices.values().next().expect("nonempty").states(vertex)
    }

    pub fn state_sets(&self) -> &BTreeMap<VertexId, StateSet> {
        &self.state_sets
    }

    pub fn all_states(&self) -> StateSet {
        self.state_sets.values().flatten().cloned().collect()
    }

    pub fn state_type(&self, s: &str) -> Result<&VertexId, DynamicsError> {
        self.slices.values().next().expect("nonempty").state_type(s)
    }

    pub fn family(&self, edge: &str) -> Option<&TransitionFamily> {
        self.edge_trans.get(edge)
    }

    pub fn families(&self) -> &BTreeMap<EdgeId, TransitionFamily> {
        &self.edge_trans
    }

    /// `e^α_λ`.
    pub fn transition(&self, edge: &str, param: &str) -> Option<&Transition> {
        self.edge_trans.get(edge)?.get(param)
    }

    /// The dynamics `α_λ`.
    pub fn slice(&self, param: &str) -> Result<&Dynamics, OpenError> {
        self.slices
            .get(param)
            .ok_or_else(|| OpenError::UnknownParam(param.to_string()))
    }

    /// Parameters become classes; a class transition is the union of its
    /// members' transitions.
    pub fn quotient(&self, q: &ParamEquivalence) -> Result<MultiDynamics, OpenError> {
        q.check_partition_of(&self.params)?;
        let mut edge_trans = BTreeMap::new();
        for (e, fam) in &self.edge_trans {
            let mut per_class = BTreeMap::new();
            for class in q.classes() {
                let mut members = class.iter().map(|p| fam.get(p).expect("partition of params"));
                let first = members.next().expect("classes are nonempty").clone();
                let merged =
                    members
                        .try_fold(first, |acc, t| acc.union(t))
                        .map_err(|source| OpenError::Transition {
                            edge: e.clone(),
                            source,
                        })?;
                per_class.insert(ParamEquivalence::label(class), merged);
            }
            let fam =
                TransitionFamily::new(fam.source().clone(), fam.target().clone(), per_class).map_err(|source| {
                    OpenError::Transition {
                        edge: e.clone(),
                        source,
                    }
                })?;
            edge_trans.insert(e.clone(), fam);
        }
        let params = q.classes().iter().map(ParamEquivalence::label).collect();
        MultiDynamics::new(self.motor.clone(), params, self.state_sets.clone(), edge_trans)
    }
}

/// A multi-dynamics scanned by one clock and one datation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenDynamics {
    multi: MultiDynamics,
    clock: Clock,
    datation: BTreeMap<StateId, InstantId>,
}

impl OpenDynamics {
    pub fn new(multi: MultiDynamics, clock: Clock, datation: BTreeMap<StateId, InstantId>) -> Result<Self, OpenError> {
        let a = Self::unchecked(multi, clock, datation);
        let diags = validate_open(&a);
        if !diags.is_empty() {
            return Err(OpenError::InvalidOpen(diags));
        }
        Ok(a)
    }

    /// No scansion check; see [`validate_open`].
    pub fn unchecked(multi: MultiDynamics, clock: Clock, datation: BTreeMap<StateId, InstantId>) -> Self {
        OpenDynamics { multi, clock, datation }
    }

    /// A one-parameter open dynamics.
    pub fn from_scanned(a: &ScannedDynamics, param: impl Into<ParamId>) -> Result<Self, OpenError> {
        let param = param.into();
        let d = a.dynamics();
        let edge_trans = d
            .transitions()
            .iter()
            .map(|(e, t)| {
                let fam = TransitionFamily::new(
                    t.source().clone(),
                    t.target().clone(),
                    BTreeMap::from([(param.clone(), t.clone())]),
                )
                .expect("one parameter");
                (e.clone(), fam)
            })
            .collect();
        let multi = MultiDynamics::new(
            d.motor().clone(),
            BTreeSet::from([param]),
            d.state_sets().clone(),
            edge_trans,
        )?;
        Self::new(multi, a.clock().clone(), a.datation().clone())
    }

    pub fn multi(&self) -> &MultiDynamics {
        &self.multi
    }

    pub fn clock(&self) -> &Clock {
        &self.clock
    }

    pub fn datation(&self) -> &BTreeMap<StateId, InstantId> {
        &self.datation
    }

    pub fn motor(&self) -> &Graph {
        self.multi.motor()
    }

    pub fn params(&self) -> &BTreeSet<ParamId> {
        self.multi.params()
    }

    /// `τ(s)`.
    pub fn date(&self, s: &str) -> Option<&InstantId> {
        self.datation.get(s)
    }

    /// The scanned dynamics `(α_λ, h, τ)`.
    pub fn slice(&self, param: &str) -> Result<ScannedDynamics, OpenError> {
        Ok(ScannedDynamics::new(
            self.multi.slice(param)?.clone(),
            self.clock.clone(),
            self.datation.clone(),
        )?)
    }
}

/// Empty iff every parameter slice is a valid scanned dynamics. Datation-law
/// diagnostics carry the offending parameter.
pub fn validate_open(a: &OpenDynamics) -> Vec<ScansionDiagnostic> {
    let multi = &a.multi;
    scansion_diagnostics_with(multi.motor(), multi.state_sets(), &a.clock, &a.datation, |e, s| {
        multi.edge_trans[e].iter().map(|(p, t)| (Some(p), t.apply(s))).collect()
    })
}

/// `𝔞_λ ∈ S_(A,λ)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OpenRealization {
    pub param: ParamId,
    pub assignment: Assignment,
}

impl fmt::Display for OpenRealization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.assignment, self.param)
    }
}

/// A partition of a finite parameter set. Classes are kept sorted by their
/// least member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamEquivalence {
    classes: Vec<BTreeSet<ParamId>>,
}

impl ParamEquivalence {
    pub fn from_classes<I>(classes: I) -> Result<Self, OpenError>
    where
        I: IntoIterator<Item = BTreeSet<ParamId>>,
    {
        let mut classes: Vec<BTreeSet<ParamId>> = classes.into_iter().collect();
        if classes.iter().any(BTreeSet::is_empty) {
            return Err(OpenError::NotAPartition("empty class".into()));
        }
        let mut seen = BTreeSet::new();
        for p in classes.iter().flatten() {
            if !seen.insert(p) {
                return Err(OpenError::NotAPartition(format!("{p} lies in two classes")));
            }
        }
        classes.sort();
        Ok(ParamEquivalence { classes })
    }

    /// All singletons.
    pub fn discrete(params: &BTreeSet<ParamId>) -> Self {
        ParamEquivalence {
            classes: params.iter().map(|p| BTreeSet::from([p.clone()])).collect(),
        }
    }

    /// A single class.
    pub fn total(params: &BTreeSet<ParamId>) -> Self {
        ParamEquivalence {
            classes: if params.is_empty() {
                vec![]
            } else {
                vec![params.clone()]
            },
        }
    }

    pub fn classes(&self) -> &[BTreeSet<ParamId>] {
        &self.classes
    }

    pub fn class_of(&self, p: &str) -> Option<&BTreeSet<ParamId>> {
        self.classes.iter().find(|c| c.contains(p))
    }

    /// `~` followed by the least member.
    pub fn label(class: &BTreeSet<ParamId>) -> ParamId {
        format!("~{}", class.iter().next().map(String::as_str).unwrap_or(""))
    }

    fn check_partition_of(&self, params: &BTreeSet<ParamId>) -> Result<(), OpenError> {
        let covered: BTreeSet<&ParamId> = self.classes.iter().flatten().collect();
        if !covered.iter().copied().eq(params.iter()) {
            return Err(OpenError::NotAPartition(
                "classes do not cover exactly the parameter set".into(),
            ));
        }
        Ok(())
    }
}

/// `A/∼`: same motor, clock, datation and state sets.
pub fn parametric_quotient(a: &OpenDynamics, q: &ParamEquivalence) -> Result<OpenDynamics, OpenError> {
    OpenDynamics::new(a.multi.quotient(q)?, a.clock.clone(), a.datation.clone())
}

/// Scanned realizations of one parameter slice, in canonical order.
pub fn realizations_of(a: &OpenDynamics, param: &str) -> Result<Vec<Assignment>, OpenError> {
    let slice = a.multi.slice(param)?;
    Ok(search_realizations(&a.clock, slice, |t, s| {
        a.datation.get(s).map(String::as_str) == Some(t)
    }))
}

/// `S_A`, ordered by parameter then assignment.
pub fn enumerate_open_realizations(a: &OpenDynamics) -> Vec<OpenRealization> {
    a.params()
        .iter()
        .flat_map(|p| {
            realizations_of(a, p)
                .expect("known param")
                .into_iter()
                .map(move |assignment| OpenRealization {
                    param: p.clone(),
                    assignment,
                })
        })
        .collect()
}

fn date_of<'a>(a: &'a OpenDynamics, s: &str) -> Result<&'a InstantId, OpenError> {
    a.datation
        .get(s)
        .filter(|_| a.multi.state_type(s).is_ok())
        .ok_or_else(|| OpenError::UnknownState(s.to_string()))
}

/// `𝔞 ▷ s`, i.e. `𝔞(τ(s)) = s`.
pub fn passes_through(a: &OpenDynamics, r: &OpenRealization, s: &str) -> Result<bool, OpenError> {
    let t = date_of(a, s)?;
    Ok(r.assignment.get(t).map(String::as_str) == Some(s))
}

/// `𝔞 ▷ s1, s2`: passes through both and `τ(s2)` succeeds `τ(s1)`. False when
/// there is no succession.
pub fn passes_then(a: &OpenDynamics, r: &OpenRealization, s1: &str, s2: &str) -> Result<bool, OpenError> {
    let (t1, t2) = (date_of(a, s1)?, date_of(a, s2)?);
    Ok(a.clock.succeeds(t1, t2)? && passes_through(a, r, s1)? && passes_through(a, r, s2)?)
}

/// As [`passes_then`], with succession required along `edge`.
pub fn passes_then_along(
    a: &OpenDynamics,
    r: &OpenRealization,
    s1: &str,
    s2: &str,
    edge: &str,
) -> Result<bool, OpenError> {
    let (t1, t2) = (date_of(a, s1)?, date_of(a, s2)?);
    Ok(a.clock.next(edge, t1) == Some(t2) && passes_through(a, r, s1)? && passes_through(a, r, s2)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MultiMorphismDiagnostic {
    UnmappedParam(ParamId),
    UnknownTargetParam { param: ParamId, target: ParamId },
    Dynamorphism(DynamorphismDiagnostic),
}

impl fmt::Display for MultiMorphismDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MultiMorphismDiagnostic::UnmappedParam(p) => write!(f, "unmapped-param {p}"),
            MultiMorphismDiagnostic::UnknownTargetParam { param, target } => {
                write!(f, "unknown-target-param {param}->{target}")
            }
            MultiMorphismDiagnostic::Dynamorphism(d) => write!(f, "{d}"),
        }
    }
}

/// `(θ, Δ, δ)`: for every `λ`, `(Δ, δ)` is a dynamorphism `α_λ → β_θ(λ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiDynamorphism {
    pub theta: BTreeMap<ParamId, ParamId>,
    pub graph_part: GraphMorphism,
    pub trans_part: BTreeMap<VertexId, Transition>,
}

impl MultiDynamorphism {
    pub fn identity(a: &MultiDynamics) -> Result<Self, OpenError> {
        let graph_part =
            GraphMorphism::identity(a.motor()).map_err(|_| DynamicsError::InvalidMotor(a.motor().validate()))?;
        Ok(MultiDynamorphism {
            theta: a.params.iter().map(|p| (p.clone(), p.clone())).collect(),
            graph_part,
            trans_part: a
                .state_sets
                .iter()
                .map(|(v, s)| (v.clone(), Transition::identity(s.clone())))
                .collect(),
        })
    }

    pub fn validate(&self, a: &MultiDynamics, b: &MultiDynamics) -> Vec<MultiMorphismDiagnostic> {
        validate_multi_dynamorphism(self, a, b)
    }
}

/// Empty iff `δ_T ⊙ e^α_λ ⊂ (Δe)^β_θ(λ) ⊙ δ_S` for every `λ` and `e`.
pub fn validate_multi_dynamorphism(
    m: &MultiDynamorphism,
    a: &MultiDynamics,
    b: &MultiDynamics,
) -> Vec<MultiMorphismDiagnostic> {
    let mut diags = Vec::new();
    for p in a.params() {
        let target = match m.theta.get(p) {
            None => {
                diags.push(MultiMorphismDiagnostic::UnmappedParam(p.clone()));
                continue;
            }
            Some(t) => t,
        };
        let Ok(bt) = b.slice(target) else {
            diags.push(MultiMorphismDiagnostic::UnknownTargetParam {
                param: p.clone(),
                target: target.clone(),
            });
            continue;
        };
        let ap = a.slice(p).expect("own param");
        for d in check_dynamorphism(&m.graph_part, &m.trans_part, ap, bt, Some(p)) {
            let d = MultiMorphismDiagnostic::Dynamorphism(d);
            if !diags.contains(&d) {
                diags.push(d);
            }
        }
    }
    diags
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    fn s(x: &str) -> String {
        x.to_string()
    }

    fn set(xs: &[&str]) -> StateSet {
        xs.iter().map(|x| s(x)).collect()
    }

    fn motor() -> Graph {
        Graph::new(["S", "T"], [Edge::new("e", "S", "T")]).unwrap()
    }

    fn h0() -> Clock {
        Clock::from_ticks(
            motor(),
            BTreeMap::from([(s("S"), set(&["t0"])), (s("T"), set(&["t1"]))]),
            [(s("e"), s("t0"), s("t1"))],
        )
        .unwrap()
    }

    fn a0_multi() -> MultiDynamics {
        MultiDynamics::from_arrows(
            motor(),
            set(&["u", "v"]),
            BTreeMap::from([(s("S"), set(&["a"])), (s("T"), set(&["b", "c"]))]),
            [(s("e"), s("u"), s("a"), s("b")), (s("e"), s("v"), s("a"), s("c"))],
        )
        .unwrap()
    }

    fn dates(pairs: &[(&str, &str)]) -> BTreeMap<StateId, InstantId> {
        pairs.iter().map(|(a, t)| (s(a), s(t))).collect()
    }

    fn a0() -> OpenDynamics {
        OpenDynamics::new(a0_multi(), h0(), dates(&[("a", "t0"), ("b", "t1"), ("c", "t1")])).unwrap()
    }

    fn x(pairs: &[(&str, &str)]) -> Assignment {
        pairs.iter().map(|(t, st)| (*t, *st)).collect()
    }

    fn real(p: &str, pairs: &[(&str, &str)]) -> OpenRealization {
        OpenRealization {
            param: s(p),
            assignment: x(pairs),
        }
    }

    #[test]
    fn valid_open_dynamics() {
        assert!(validate_open(&a0()).is_empty());
    }

    #[test]
    fn misdated_state_breaks_datation_law() {
        let bad = OpenDynamics::unchecked(a0_multi(), h0(), dates(&[("a", "t0"), ("b", "t0"), ("c", "t1")]));
        let diags = validate_open(&bad);
        let rendered: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
        assert!(rendered.contains(&s("datation-law violation at (e,u,a,b)")));
        assert!(OpenDynamics::new(a0_multi(), h0(), bad.datation().clone()).is_err());
    }

    #[test]
    fn single_param_matches_scanned_validation() {
        let a = a0();
        let scanned = a.slice("u").unwrap();
        let single = OpenDynamics::from_scanned(&scanned, "u").unwrap();
        assert!(validate_open(&single).is_empty());
        assert_eq!(single.multi().slice("u").unwrap(), scanned.dynamics());
    }

    #[test]
    fn discrete_quotient_keeps_maps() {
        let a = a0();
        let q = parametric_quotient(&a, &ParamEquivalence::discrete(a.params())).unwrap();
        assert_eq!(q.params(), &set(&["~u", "~v"]));
        for p in ["u", "v"] {
            assert_eq!(
                q.multi().transition("e", &format!("~{p}")),
                a.multi().transition("e", p)
            );
        }
    }

    #[test]
    fn total_quotient_unions() {
        let a = a0();
        let q = parametric_quotient(&a, &ParamEquivalence::total(a.params())).unwrap();
        assert_eq!(q.params(), &set(&["~u"]));
        assert_eq!(q.multi().transition("e", "~u").unwrap().apply("a"), &set(&["b", "c"]));
        assert!(validate_open(&q).is_empty());
    }

    #[test]
    fn merging_equal_slices_is_idempotent() {
        let m = MultiDynamics::from_arrows(
            motor(),
            set(&["p", "q"]),
            BTreeMap::from([(s("S"), set(&["a"])), (s("T"), set(&["b"]))]),
            [(s("e"), s("p"), s("a"), s("b")), (s("e"), s("q"), s("a"), s("b"))],
        )
        .unwrap();
        let merged = m.quotient(&ParamEquivalence::total(m.params())).unwrap();
        assert_eq!(merged.transition("e", "~p"), m.transition("e", "p"));
    }

    #[test]
    fn partitions_are_checked() {
        let a = a0();
        let half = ParamEquivalence::from_classes([set(&["u"])]).unwrap();
        assert!(parametric_quotient(&a, &half).is_err());
        assert!(ParamEquivalence::from_classes([set(&["u"]), set(&["u", "v"])]).is_err());
        assert!(ParamEquivalence::from_classes([set(&[])]).is_err());
    }

    #[test]
    fn open_realizations() {
        let got = enumerate_open_realizations(&a0());
        assert_eq!(
            got,
            vec![
                real("u", &[]),
                real("u", &[("t0", "a")]),
                real("u", &[("t0", "a"), ("t1", "b")]),
                real("v", &[]),
                real("v", &[("t0", "a")]),
                real("v", &[("t0", "a"), ("t1", "c")]),
            ]
        );
    }

    #[test]
    fn passing_through() {
        let a = a0();
        let r = real("u", &[("t0", "a"), ("t1", "b")]);
        assert!(passes_through(&a, &r, "a").unwrap());
        assert!(!passes_through(&a, &r, "c").unwrap());
        assert!(!passes_through(&a, &real("u", &[]), "a").unwrap());
        assert!(passes_through(&a, &r, "zz").is_err());

        assert!(passes_then(&a, &r, "a", "b").unwrap());
        assert!(!passes_then(&a, &r, "b", "a").unwrap());
        assert!(!passes_then(&a, &r, "a", "c").unwrap());
        assert!(passes_then_along(&a, &r, "a", "b", "e").unwrap());
    }

    #[test]
    fn multi_dynamorphisms() {
        let m = a0_multi();
        assert!(MultiDynamorphism::identity(&m).unwrap().validate(&m, &m).is_empty());

        let same = MultiDynamics::from_arrows(
            motor(),
            set(&["p", "q"]),
            BTreeMap::from([(s("S"), set(&["a"])), (s("T"), set(&["b"]))]),
            [(s("e"), s("p"), s("a"), s("b")), (s("e"), s("q"), s("a"), s("b"))],
        )
        .unwrap();
        let mut collapse = MultiDynamorphism::identity(&same).unwrap();
        collapse.theta.insert(s("q"), s("p"));
        assert!(collapse.validate(&same, &same).is_empty());

        // u-slice sends a to b, v-slice to c: mapping u onto v must fail
        let mut cross = MultiDynamorphism::identity(&m).unwrap();
        cross.theta.insert(s("u"), s("v"));
        let diags = cross.validate(&m, &m);
        assert_eq!(
            diags,
            vec![MultiMorphismDiagnostic::Dynamorphism(
                DynamorphismDiagnostic::Inclusion {
                    edge: s("e"),
                    param: Some(s("u")),
                    state: s("a"),
                    extra: set(&["b"]),
                }
            )]
        );
        cross.theta.remove("v");
        assert!(cross
            .validate(&m, &m)
            .contains(&MultiMorphismDiagnostic::UnmappedParam(s("v"))));
    }
}
