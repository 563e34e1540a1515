//! Mono graphic dynamics, clocks, dynamorphisms, scanned dynamics and the
//! enumeration of their realizations.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::graph::{join_diags, Graph, GraphDiagnostic, GraphMorphism, MorphismDiagnostic};
use crate::transition::{StateSet, Transition, TransitionError};
use crate::{EdgeId, InstantId, ParamId, StateId, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DynamicsError {
    #[error("invalid motor: {}", join_diags(.0))]
    InvalidMotor(Vec<GraphDiagnostic>),
    #[error("state set given for unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("transition given for unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("state {state} belongs to both {first} and {second}")]
    SharedState {
        state: StateId,
        first: VertexId,
        second: VertexId,
    },
    #[error("transition of edge {0} does not match the state sets of its endpoints")]
    EdgeContext(EdgeId),
    #[error("edge {edge}: {source}")]
    Transition {
        edge: EdgeId,
        #[source]
        source: TransitionError,
    },
    #[error("unknown state {0}")]
    UnknownState(StateId),
    #[error("edge {0} of a clock is not deterministic")]
    NotDeterministic(EdgeId),
    #[error("dynamics are not defined on the same motor")]
    MotorMismatch,
    #[error("invalid scansion: {}", join_diags(.0))]
    InvalidScansion(Vec<ScansionDiagnostic>),
}

/// A graphic dynamics: disjoint state sets on vertices, one transition per edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dynamics {
    motor: Graph,
    state_sets: BTreeMap<VertexId, StateSet>,
    edge_trans: BTreeMap<EdgeId, Transition>,
}

impl Dynamics {
    /// Vertices without a state set get the empty set, edges without a
    /// transition get the empty transition.
    pub fn new(
        motor: Graph,
        mut state_sets: BTreeMap<VertexId, StateSet>,
        mut edge_trans: BTreeMap<EdgeId, Transition>,
    ) -> Result<Self, DynamicsError> {
        let diags = motor.validate();
        if !diags.is_empty() {
            return Err(DynamicsError::InvalidMotor(diags));
        }
        if let Some(v) = state_sets.keys().find(|v| !motor.has_vertex(v)) {
            return Err(DynamicsError::UnknownVertex(v.clone()));
        }
        if let Some(e) = edge_trans.keys().find(|e| motor.edge(e).is_none()) {
            return Err(DynamicsError::UnknownEdge(e.clone()));
        }
        for v in motor.vertices() {
            state_sets.entry(v.clone()).or_default();
        }
        let mut owner: BTreeMap<&StateId, &VertexId> = BTreeMap::new();
        for (v, states) in &state_sets {
            for s in states {
                if let Some(first) = owner.insert(s, v) {
                    return Err(DynamicsError::SharedState {
                        state: s.clone(),
                        first: first.clone(),
                        second: v.clone(),
                    });
                }
            }
        }
        for e in motor.edges() {
            let src = &state_sets[&e.dom];
            let tgt = &state_sets[&e.cod];
            let t = edge_trans
                .entry(e.id.clone())
                .or_insert_with(|| Transition::empty(src.clone(), tgt.clone()));
            if t.source() != src || t.target() != tgt {
                return Err(DynamicsError::EdgeContext(e.id.clone()));
            }
        }
        Ok(Dynamics {
            motor,
            state_sets,
            edge_trans,
        })
    }

    /// Builds the transitions from `(edge, from, to)` arrows.
    pub fn from_arrows<I>(
        motor: Graph,
        state_sets: BTreeMap<VertexId, StateSet>,
        arrows: I,
    ) -> Result<Self, DynamicsError>
    where
        I: IntoIterator<Item = (EdgeId, StateId, StateId)>,
    {
        let mut pairs: BTreeMap<EdgeId, Vec<(StateId, StateId)>> = BTreeMap::new();
        for (e, a, b) in arrows {
            pairs.entry(e).or_default().push((a, b));
        }
        let mut edge_trans = BTreeMap::new();
        for (e, ps) in pairs {
            let edge = motor.edge(&e).ok_or_else(|| DynamicsError::UnknownEdge(e.clone()))?;
            let src = state_sets.get(&edge.dom).cloned().unwrap_or_default();
            let tgt = state_sets.get(&edge.cod).cloned().unwrap_or_default();
            let t = Transition::from_pairs(src, tgt, ps).map_err(|source| DynamicsError::Transition {
                edge: e.clone(),
                source,
            })?;
            edge_trans.insert(e, t);
        }
        Self::new(motor, state_sets, edge_trans)
    }

    pub fn motor(&self) -> &Graph {
        &self.motor
    }

    /// `S^α`.
    pub fn states(&self, vertex: &str) -> &StateSet {
        static EMPTY: StateSet = StateSet::new();
        self.state_sets.get(vertex).unwrap_or(&EMPTY)
    }

    pub fn state_sets(&self) -> &BTreeMap<VertexId, StateSet> {
        &self.state_sets
    }

    /// `e^α`.
    pub fn transition(&self, edge: &str) -> Option<&Transition> {
        self.edge_trans.get(edge)
    }

    pub fn transitions(&self) -> &BTreeMap<EdgeId, Transition> {
        &self.edge_trans
    }

    /// `st(α)`, in canonical order.
    pub fn all_states(&self) -> StateSet {
        self.state_sets.values().flatten().cloned().collect()
    }

    pub fn contains_state(&self, s: &str) -> bool {
        self.state_sets.values().any(|set| set.contains(s))
    }

    /// `typ(s)`: the vertex whose state set contains `s`.
    pub fn state_type(&self, s: &str) -> Result<&VertexId, DynamicsError> {
        self.state_sets
            .iter()
            .find(|(_, set)| set.contains(s))
            .map(|(v, _)| v)
            .ok_or_else(|| DynamicsError::UnknownState(s.to_string()))
    }

    pub fn is_deterministic(&self) -> bool {
        self.edge_trans.values().all(Transition::is_deterministic)
    }
}

/// True iff every edge transition is deterministic.
pub fn is_clock(d: &Dynamics) -> bool {
    d.is_deterministic()
}

/// A deterministic dynamics. Its states are instants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clock(Dynamics);

impl Clock {
    pub fn new(d: Dynamics) -> Result<Self, DynamicsError> {
        if let Some((e, _)) = d.edge_trans.iter().find(|(_, t)| !t.is_deterministic()) {
            return Err(DynamicsError::NotDeterministic(e.clone()));
        }
        Ok(Clock(d))
    }

    /// Builds a clock from `(edge, from, to)` ticks.
    pub fn from_ticks<I>(motor: Graph, instants: BTreeMap<VertexId, StateSet>, ticks: I) -> Result<Self, DynamicsError>
    where
        I: IntoIterator<Item = (EdgeId, InstantId, InstantId)>,
    {
        Self::new(Dynamics::from_arrows(motor, instants, ticks)?)
    }

    pub fn dynamics(&self) -> &Dynamics {
        &self.0
    }

    pub fn motor(&self) -> &Graph {
        &self.0.motor
    }

    pub fn instants(&self, vertex: &str) -> &StateSet {
        self.0.states(vertex)
    }

    pub fn all_instants(&self) -> StateSet {
        self.0.all_states()
    }

    pub fn instant_type(&self, t: &str) -> Result<&VertexId, DynamicsError> {
        self.0.state_type(t)
    }

    /// `e^h(t)`, or `None` when `t` is not an instant of the domain of `edge`.
    pub fn next(&self, edge: &str, t: &str) -> Option<&InstantId> {
        self.0.transition(edge)?.apply(t).iter().next()
    }

    /// `t` succeeds `s` when some edge sends `s` to `t`.
    pub fn succeeds(&self, s: &str, t: &str) -> Result<bool, DynamicsError> {
        let ty = self.instant_type(s)?.clone();
        self.instant_type(t)?;
        let found = self
            .0
            .motor
            .out_edges(&ty)
            .any(|e| self.next(&e.id, s).map(String::as_str) == Some(t));
        Ok(found)
    }
}

/// The instant standing for vertex `v` in its essential clock.
pub fn essential_instant(v: &str) -> InstantId {
    format!("{v}•")
}

/// `ζ_G`: one instant per vertex, every edge maps its domain instant to its
/// codomain instant.
pub fn essential_clock(g: &Graph) -> Result<Clock, DynamicsError> {
    let instants = g
        .vertices()
        .iter()
        .map(|v| (v.clone(), StateSet::from([essential_instant(v)])))
        .collect();
    let ticks: Vec<_> = g
        .edges()
        .iter()
        .map(|e| (e.id.clone(), essential_instant(&e.dom), essential_instant(&e.cod)))
        .collect();
    Clock::from_ticks(g.clone(), instants, ticks)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DynamorphismDiagnostic {
    Graph(MorphismDiagnostic),
    MissingComponent(VertexId),
    ComponentContext(VertexId),
    /// `δ_T ⊙ e^α (state)` contains `extra`, absent from `(Δe)^β ⊙ δ_S (state)`.
    Inclusion {
        edge: EdgeId,
        param: Option<ParamId>,
        state: StateId,
        extra: StateSet,
    },
}

impl fmt::Display for DynamorphismDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DynamorphismDiagnostic::Graph(d) => write!(f, "{d}"),
            DynamorphismDiagnostic::MissingComponent(v) => write!(f, "missing-component {v}"),
            DynamorphismDiagnostic::ComponentContext(v) => write!(f, "component-context {v}"),
            DynamorphismDiagnostic::Inclusion {
                edge,
                param,
                state,
                extra,
            } => {
                write!(f, "inclusion-fails edge {edge}")?;
                if let Some(p) = param {
                    write!(f, " param {p}")?;
                }
                write!(f, " at {state}: extra {}", fmt_set(extra))
            }
        }
    }
}

pub(crate) fn fmt_set(s: &StateSet) -> String {
    format!("{{{}}}", s.iter().cloned().collect::<Vec<_>>().join(","))
}

/// `(Δ, δ): α → β`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dynamorphism {
    pub graph_part: GraphMorphism,
    pub trans_part: BTreeMap<VertexId, Transition>,
}

impl Dynamorphism {
    pub fn identity(d: &Dynamics) -> Result<Self, DynamicsError> {
        Ok(Dynamorphism {
            graph_part: GraphMorphism::identity(d.motor())
                .map_err(|_| DynamicsError::InvalidMotor(d.motor().validate()))?,
            trans_part: d
                .state_sets
                .iter()
                .map(|(v, s)| (v.clone(), Transition::identity(s.clone())))
                .collect(),
        })
    }

    /// Checks `δ_T ⊙ e^α ⊂ (Δe)^β ⊙ δ_S` on every edge `e: S → T` of `a`.
    pub fn validate(&self, a: &Dynamics, b: &Dynamics) -> Vec<DynamorphismDiagnostic> {
        check_dynamorphism(&self.graph_part, &self.trans_part, a, b, None)
    }
}

pub(crate) fn check_dynamorphism(
    graph_part: &GraphMorphism,
    trans_part: &BTreeMap<VertexId, Transition>,
    a: &Dynamics,
    b: &Dynamics,
    param: Option<&ParamId>,
) -> Vec<DynamorphismDiagnostic> {
    let mut diags: Vec<DynamorphismDiagnostic> = graph_part
        .validate(a.motor(), b.motor())
        .into_iter()
        .map(DynamorphismDiagnostic::Graph)
        .collect();
    if !diags.is_empty() {
        return diags;
    }
    for v in a.motor().vertices() {
        match trans_part.get(v) {
            None => diags.push(DynamorphismDiagnostic::MissingComponent(v.clone())),
            Some(t) => {
                if t.source() != a.states(v) || t.target() != b.states(&graph_part.vertex_map[v]) {
                    diags.push(DynamorphismDiagnostic::ComponentContext(v.clone()));
                }
            }
        }
    }
    if !diags.is_empty() {
        return diags;
    }
    for e in a.motor().edges() {
        let ea = &a.edge_trans[&e.id];
        let eb = &b.edge_trans[&graph_part.edge_map[&e.id]];
        let (ds, dt) = (&trans_part[&e.dom], &trans_part[&e.cod]);
        for s in a.states(&e.dom) {
            let lhs: StateSet = ea.apply(s).iter().flat_map(|x| dt.apply(x).iter().cloned()).collect();
            let rhs: StateSet = ds.apply(s).iter().flat_map(|y| eb.apply(y).iter().cloned()).collect();
            let extra: StateSet = lhs.difference(&rhs).cloned().collect();
            if !extra.is_empty() {
                diags.push(DynamorphismDiagnostic::Inclusion {
                    edge: e.id.clone(),
                    param: param.cloned(),
                    state: s.clone(),
                    extra,
                });
            }
        }
    }
    diags
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScansionDiagnostic {
    MotorMismatch,
    Undated(StateId),
    UnknownDatedState(StateId),
    UnknownInstant {
        state: StateId,
        instant: InstantId,
    },
    WrongType {
        state: StateId,
        instant: InstantId,
    },
    /// `to ∈ e(from)` but `τ(to) ≠ e^h(τ(from))`.
    DatationLaw {
        edge: EdgeId,
        param: Option<ParamId>,
        from: StateId,
        to: StateId,
    },
}

impl fmt::Display for ScansionDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScansionDiagnostic::MotorMismatch => write!(f, "motor-mismatch"),
            ScansionDiagnostic::Undated(s) => write!(f, "undated {s}"),
            ScansionDiagnostic::UnknownDatedState(s) => write!(f, "unknown-dated-state {s}"),
            ScansionDiagnostic::UnknownInstant { state, instant } => {
                write!(f, "unknown-instant {state}->{instant}")
            }
            ScansionDiagnostic::WrongType { state, instant } => {
                write!(f, "wrong-type {state}->{instant}")
            }
            ScansionDiagnostic::DatationLaw { edge, param, from, to } => match param {
                Some(p) => write!(f, "datation-law violation at ({edge},{p},{from},{to})"),
                None => write!(f, "datation-law violation at ({edge},{from},{to})"),
            },
        }
    }
}

/// Checks that `datation` is a deterministic dynamorphism `d → clock` with
/// identity graph part.
pub fn scansion_diagnostics(
    d: &Dynamics,
    clock: &Clock,
    datation: &BTreeMap<StateId, InstantId>,
) -> Vec<ScansionDiagnostic> {
    scansion_diagnostics_with(d.motor(), d.state_sets(), clock, datation, |e, s| {
        vec![(None, d.edge_trans[e].apply(s))]
    })
}

/// Shared by mono and multi dynamics. `step(e, s)` yields the images of `s`
/// along `e`, tagged with their parameter.
pub(crate) fn scansion_diagnostics_with<'a, F>(
    motor: &Graph,
    state_sets: &BTreeMap<VertexId, StateSet>,
    clock: &Clock,
    datation: &BTreeMap<StateId, InstantId>,
    step: F,
) -> Vec<ScansionDiagnostic>
where
    F: Fn(&str, &str) -> Vec<(Option<&'a ParamId>, &'a StateSet)>,
{
    if motor != clock.motor() {
        return vec![ScansionDiagnostic::MotorMismatch];
    }
    let mut diags = Vec::new();
    for (v, states) in state_sets {
        for s in states {
            match datation.get(s) {
                None => diags.push(ScansionDiagnostic::Undated(s.clone())),
                Some(t) => match clock.instant_type(t) {
                    Err(_) => diags.push(ScansionDiagnostic::UnknownInstant {
                        state: s.clone(),
                        instant: t.clone(),
                    }),
                    Ok(tv) if tv != v => diags.push(ScansionDiagnostic::WrongType {
                        state: s.clone(),
                        instant: t.clone(),
                    }),
                    Ok(_) => {}
                },
            }
        }
    }
    for s in datation.keys() {
        if !state_sets.values().any(|set| set.contains(s)) {
            diags.push(ScansionDiagnostic::UnknownDatedState(s.clone()));
        }
    }
    for e in motor.edges() {
        for a in &state_sets[&e.dom] {
            let expected = datation.get(a).and_then(|t| clock.next(&e.id, t));
            for (param, image) in step(&e.id, a) {
                for b in image {
                    if expected.is_none() || datation.get(b) != expected {
                        diags.push(ScansionDiagnostic::DatationLaw {
                            edge: e.id.clone(),
                            param: param.cloned(),
                            from: a.clone(),
                            to: b.clone(),
                        });
                    }
                }
            }
        }
    }
    diags
}

/// A dynamics together with a clock on the same motor and a datation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScannedDynamics {
    dynamics: Dynamics,
    clock: Clock,
    datation: BTreeMap<StateId, InstantId>,
}

impl ScannedDynamics {
    pub fn new(
        dynamics: Dynamics,
        clock: Clock,
        datation: BTreeMap<StateId, InstantId>,
    ) -> Result<Self, DynamicsError> {
        let diags = scansion_diagnostics(&dynamics, &clock, &datation);
        if !diags.is_empty() {
            return Err(DynamicsError::InvalidScansion(diags));
        }
        Ok(ScannedDynamics {
            dynamics,
            clock,
            datation,
        })
    }

    pub fn dynamics(&self) -> &Dynamics {
        &self.dynamics
    }

    pub fn clock(&self) -> &Clock {
        &self.clock
    }

    pub fn datation(&self) -> &BTreeMap<StateId, InstantId> {
        &self.datation
    }

    /// `τ(s)`.
    pub fn date(&self, s: &str) -> Option<&InstantId> {
        self.datation.get(s)
    }

    /// The datation seen as a deterministic dynamorphism into the clock.
    pub fn datation_dynamorphism(&self) -> Dynamorphism {
        Dynamorphism {
            graph_part: GraphMorphism::identity(self.dynamics.motor()).expect("valid motor"),
            trans_part: datation_transitions(self.dynamics.state_sets(), &self.clock, &self.datation),
        }
    }
}

pub(crate) fn datation_transitions(
    state_sets: &BTreeMap<VertexId, StateSet>,
    clock: &Clock,
    datation: &BTreeMap<StateId, InstantId>,
) -> BTreeMap<VertexId, Transition> {
    state_sets
        .iter()
        .map(|(v, states)| {
            let t = Transition::from_pairs(
                states.clone(),
                clock.instants(v).clone(),
                states.iter().map(|s| (s.clone(), datation[s].clone())),
            )
            .expect("datation already validated");
            (v.clone(), t)
        })
        .collect()
}

/// `τ_α: α → ζ_G`, every state of type `S` dated by the essential instant of `S`.
pub fn canonical_essential_scansion(d: &Dynamics) -> Result<ScannedDynamics, DynamicsError> {
    let clock = essential_clock(d.motor())?;
    let datation = d
        .state_sets
        .iter()
        .flat_map(|(v, states)| states.iter().map(move |s| (s.clone(), essential_instant(v))))
        .collect();
    ScannedDynamics::new(d.clone(), clock, datation)
}

/// A partial map from instants to states; its keys are `df(𝔞)`.
///
/// Ordered by domain size, then lexicographically on `(instant, state)` pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Assignment(BTreeMap<InstantId, StateId>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, t: &str) -> Option<&StateId> {
        self.0.get(t)
    }

    pub fn insert(&mut self, t: impl Into<InstantId>, s: impl Into<StateId>) -> Option<StateId> {
        self.0.insert(t.into(), s.into())
    }

    pub fn remove(&mut self, t: &str) -> Option<StateId> {
        self.0.remove(t)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `df(𝔞)`.
    pub fn domain(&self) -> impl Iterator<Item = &InstantId> {
        self.0.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&InstantId, &StateId)> {
        self.0.iter()
    }

    pub fn is_injective(&self) -> bool {
        let image: BTreeSet<_> = self.0.values().collect();
        image.len() == self.0.len()
    }
}

impl<K: Into<InstantId>, V: Into<StateId>> FromIterator<(K, V)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (K, V)>>(iter: I) -> Self {
        Assignment(iter.into_iter().map(|(k, v)| (k.into(), v.into())).collect())
    }
}

impl Ord for Assignment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.iter().cmp(other.0.iter()))
    }
}

impl PartialOrd for Assignment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(t, s)| format!("{t}={s}")).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Whether `x` is an `h`-realization of `d`: for every edge `e` and every
/// instant `t` of type `dom(e)`, with `t' = e^h(t)`, `t' ∈ df(x)` implies
/// `t ∈ df(x)` and `x(t') ∈ e^α(x(t))`.
///
/// Assignments that send an instant outside the state set of its vertex are
/// not realizations.
pub fn is_realization(h: &Clock, d: &Dynamics, x: &Assignment) -> Result<bool, DynamicsError> {
    if h.motor() != d.motor() {
        return Err(DynamicsError::MotorMismatch);
    }
    Ok(realization_holds(
        h,
        x,
        |t| h.instant_type(t).ok().map(|v| d.states(v)),
        |e, s| d.edge_trans[e].apply(s),
    ))
}

pub(crate) fn realization_holds<'a, S, F>(h: &Clock, x: &Assignment, states_of: S, step: F) -> bool
where
    S: Fn(&str) -> Option<&'a StateSet>,
    F: Fn(&str, &str) -> &'a StateSet,
{
    let typed = x.iter().all(|(t, s)| states_of(t).is_some_and(|set| set.contains(s)));
    if !typed {
        return false;
    }
    h.motor().edges().iter().all(|e| {
        h.instants(&e.dom).iter().all(|t| {
            let t2 = h.next(&e.id, t).expect("clock is deterministic");
            match x.get(t2) {
                None => true,
                Some(s2) => x.get(t).is_some_and(|s1| step(&e.id, s1).contains(s2)),
            }
        })
    })
}

/// `S_(h,α)`, in canonical order.
pub fn enumerate_realizations(h: &Clock, d: &Dynamics) -> Result<Vec<Assignment>, DynamicsError> {
    if h.motor() != d.motor() {
        return Err(DynamicsError::MotorMismatch);
    }
    Ok(search_realizations(h, d, |_, _| true))
}

/// Realizations of a scanned dynamics: `h`-realizations with `τ(𝔞(t)) = t`.
pub fn enumerate_scanned_realizations(a: &ScannedDynamics) -> Vec<Assignment> {
    search_realizations(&a.clock, &a.dynamics, |t, s| {
        a.datation.get(s).map(String::as_str) == Some(t)
    })
}

/// Backtracking over instants in canonical order. A constraint
/// `(t, e, t')` is checked as soon as both `t` and `t'` are decided.
pub(crate) fn search_realizations<F>(h: &Clock, d: &Dynamics, allowed: F) -> Vec<Assignment>
where
    F: Fn(&str, &str) -> bool,
{
    let instants: Vec<InstantId> = h.all_instants().into_iter().collect();
    let pos: BTreeMap<&str, usize> = instants.iter().enumerate().map(|(i, t)| (t.as_str(), i)).collect();

    let candidates: Vec<Vec<&StateId>> = instants
        .iter()
        .map(|t| {
            let v = h.instant_type(t).expect("instant of h");
            d.states(v).iter().filter(|s| allowed(t, s)).collect()
        })
        .collect();

    // constraints[k]: (pred, succ, edge) with max(pred, succ) == k
    let mut constraints: Vec<Vec<(usize, usize, &str)>> = vec![Vec::new(); instants.len()];
    for e in h.motor().edges() {
        for t in h.instants(&e.dom) {
            let t2 = h.next(&e.id, t).expect("clock is deterministic");
            let (i, j) = (pos[t.as_str()], pos[t2.as_str()]);
            constraints[i.max(j)].push((i, j, e.id.as_str()));
        }
    }

    let mut out = Vec::new();
    let mut current: Vec<Option<&StateId>> = vec![None; instants.len()];
    fn go<'a>(
        k: usize,
        current: &mut Vec<Option<&'a StateId>>,
        candidates: &[Vec<&'a StateId>],
        constraints: &[Vec<(usize, usize, &str)>],
        d: &Dynamics,
        instants: &[InstantId],
        out: &mut Vec<Assignment>,
    ) {
        if k == instants.len() {
            out.push(
                current
                    .iter()
                    .enumerate()
                    .filter_map(|(i, s)| s.map(|s| (instants[i].clone(), s.clone())))
                    .collect(),
            );
            return;
        }
        let options = std::iter::once(None).chain(candidates[k].iter().map(|s| Some(*s)));
        for choice in options {
            current[k] = choice;
            let ok = constraints[k].iter().all(|&(i, j, e)| match current[j] {
                None => true,
                Some(s2) => current[i].is_some_and(|s1| d.edge_trans[e].apply(s1).contains(s2)),
            });
            if ok {
                go(k + 1, current, candidates, constraints, d, instants, out);
            }
        }
        current[k] = None;
    }
    go(0, &mut current, &candidates, &constraints, d, &instants, &mut out);
    out.sort();
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScannedMorphismDiagnostic {
    States(DynamorphismDiagnostic),
    Clocks(DynamorphismDiagnostic),
    /// `τ_{ΔS}(δ_S(state))` contains `extra`, absent from `d_S(ρ_S(state))`.
    Synchronization {
        vertex: VertexId,
        state: StateId,
        extra: StateSet,
    },
}

impl fmt::Display for ScannedMorphismDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScannedMorphismDiagnostic::States(d) => write!(f, "states: {d}"),
            ScannedMorphismDiagnostic::Clocks(d) => write!(f, "clocks: {d}"),
            ScannedMorphismDiagnostic::Synchronization { vertex, state, extra } => {
                write!(f, "synchronization-fails at {vertex}/{state}: extra {}", fmt_set(extra))
            }
        }
    }
}

/// `(Δ, δ, d)` between scanned dynamics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScannedDynamorphism {
    pub graph_part: GraphMorphism,
    pub trans_part: BTreeMap<VertexId, Transition>,
    pub clock_part: BTreeMap<VertexId, Transition>,
}

impl ScannedDynamorphism {
    pub fn identity(a: &ScannedDynamics) -> Result<Self, DynamicsError> {
        let states = Dynamorphism::identity(&a.dynamics)?;
        let clocks = Dynamorphism::identity(a.clock.dynamics())?;
        Ok(ScannedDynamorphism {
            graph_part: states.graph_part,
            trans_part: states.trans_part,
            clock_part: clocks.trans_part,
        })
    }

    /// Empty iff `(Δ,δ)` and `(Δ,d)` are dynamorphisms and
    /// `τ_{ΔS} ⊙ δ_S ⊂ d_S ⊙ ρ_S` for every vertex `S`.
    pub fn validate(&self, a: &ScannedDynamics, b: &ScannedDynamics) -> Vec<ScannedMorphismDiagnostic> {
        let mut diags: Vec<ScannedMorphismDiagnostic> =
            check_dynamorphism(&self.graph_part, &self.trans_part, &a.dynamics, &b.dynamics, None)
                .into_iter()
                .map(ScannedMorphismDiagnostic::States)
                .collect();
        diags.extend(
            check_dynamorphism(
                &self.graph_part,
                &self.clock_part,
                a.clock.dynamics(),
                b.clock.dynamics(),
                None,
            )
            .into_iter()
            .map(ScannedMorphismDiagnostic::Clocks),
        );
        if !diags.is_empty() {
            return diags;
        }
        for (v, states) in a.dynamics.state_sets() {
            let delta = &self.trans_part[v];
            let d = &self.clock_part[v];
            for s in states {
                let lhs: StateSet = delta
                    .apply(s)
                    .iter()
                    .filter_map(|x| b.datation.get(x).cloned())
                    .collect();
                let rhs = d.apply(&a.datation[s]);
                let extra: StateSet = lhs.difference(rhs).cloned().collect();
                if !extra.is_empty() {
                    diags.push(ScannedMorphismDiagnostic::Synchronization {
                        vertex: v.clone(),
                        state: s.clone(),
                        extra,
                    });
                }
            }
        }
        diags
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    fn set(xs: &[&str]) -> StateSet {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn motor() -> Graph {
        Graph::new(["S", "T"], [Edge::new("e", "S", "T")]).unwrap()
    }

    fn sets(items: &[(&str, &[&str])]) -> BTreeMap<VertexId, StateSet> {
        items.iter().map(|(v, s)| (v.to_string(), set(s))).collect()
    }

    fn arrows(items: &[(&str, &str, &str)]) -> Vec<(EdgeId, StateId, StateId)> {
        items
            .iter()
            .map(|(e, a, b)| (e.to_string(), a.to_string(), b.to_string()))
            .collect()
    }

    fn h0() -> Clock {
        Clock::from_ticks(
            motor(),
            sets(&[("S", &["t0"]), ("T", &["t1"])]),
            arrows(&[("e", "t0", "t1")]),
        )
        .unwrap()
    }

    fn a0_u() -> Dynamics {
        Dynamics::from_arrows(
            motor(),
            sets(&[("S", &["a"]), ("T", &["b", "c"])]),
            arrows(&[("e", "a", "b")]),
        )
        .unwrap()
    }

    fn x(pairs: &[(&str, &str)]) -> Assignment {
        pairs.iter().map(|(t, s)| (*t, *s)).collect()
    }

    #[test]
    fn state_types() {
        let d = a0_u();
        assert_eq!(d.state_type("a").unwrap(), "S");
        assert_eq!(d.state_type("b").unwrap(), "T");
        assert_eq!(d.state_type("q"), Err(DynamicsError::UnknownState("q".into())));
    }

    #[test]
    fn shared_states_are_rejected() {
        let err = Dynamics::from_arrows(motor(), sets(&[("S", &["a"]), ("T", &["a"])]), vec![]);
        assert!(matches!(err, Err(DynamicsError::SharedState { .. })));
    }

    #[test]
    fn clocks() {
        assert!(is_clock(h0().dynamics()));
        let a1 = Dynamics::from_arrows(
            motor(),
            sets(&[("S", &["x"]), ("T", &["y", "z"])]),
            arrows(&[("e", "x", "y"), ("e", "x", "z")]),
        )
        .unwrap();
        assert!(!is_clock(&a1));
        assert!(Clock::new(a1).is_err());
        let no_edges =
            Dynamics::from_arrows(Graph::new(["S"], []).unwrap(), sets(&[("S", &["p", "q"])]), vec![]).unwrap();
        assert!(is_clock(&no_edges));
    }

    #[test]
    fn essential_clocks() {
        let z = essential_clock(&motor()).unwrap();
        assert_eq!(z.instants("S"), &set(&["S•"]));
        assert_eq!(z.instants("T"), &set(&["T•"]));
        assert_eq!(z.next("e", "S•").unwrap(), "T•");

        let loop_g = Graph::new(["V"], [Edge::new("l", "V", "V")]).unwrap();
        let zl = essential_clock(&loop_g).unwrap();
        assert_eq!(zl.all_instants(), set(&["V•"]));
        assert!(zl.succeeds("V•", "V•").unwrap());

        let ze = essential_clock(&Graph::default()).unwrap();
        assert!(ze.all_instants().is_empty());
    }

    #[test]
    fn succession() {
        let h = h0();
        assert!(h.succeeds("t0", "t1").unwrap());
        assert!(!h.succeeds("t1", "t0").unwrap());
        assert!(h.succeeds("t0", "nope").is_err());
    }

    #[test]
    fn identity_and_datation_dynamorphisms() {
        let d = a0_u();
        assert!(Dynamorphism::identity(&d).unwrap().validate(&d, &d).is_empty());
        let datation = [("a", "t0"), ("b", "t1"), ("c", "t1")]
            .into_iter()
            .map(|(s, t)| (s.to_string(), t.to_string()))
            .collect();
        let scanned = ScannedDynamics::new(d.clone(), h0(), datation).unwrap();
        let tau = scanned.datation_dynamorphism();
        assert!(tau.validate(&d, h0().dynamics()).is_empty());
    }

    #[test]
    fn empty_left_side_always_included() {
        // δ_T(b) = ∅, δ_S(a) = {t0}, e(a) = {b}
        let d = a0_u();
        let m = Dynamorphism {
            graph_part: GraphMorphism::identity(&motor()).unwrap(),
            trans_part: [
                (
                    "S".to_string(),
                    Transition::from_pairs(set(&["a"]), set(&["t0"]), [("a".into(), "t0".into())]).unwrap(),
                ),
                ("T".to_string(), Transition::empty(set(&["b", "c"]), set(&["t1"]))),
            ]
            .into(),
        };
        assert!(m.validate(&d, h0().dynamics()).is_empty());
    }

    #[test]
    fn failing_inclusion_cites_edge_and_witness() {
        let d = a0_u();
        let m = Dynamorphism {
            graph_part: GraphMorphism::identity(&motor()).unwrap(),
            trans_part: [
                ("S".to_string(), Transition::empty(set(&["a"]), set(&["t0"]))),
                (
                    "T".to_string(),
                    Transition::from_pairs(set(&["b", "c"]), set(&["t1"]), [("b".into(), "t1".into())]).unwrap(),
                ),
            ]
            .into(),
        };
        assert_eq!(
            m.validate(&d, h0().dynamics()),
            vec![DynamorphismDiagnostic::Inclusion {
                edge: "e".into(),
                param: None,
                state: "a".into(),
                extra: set(&["t1"]),
            }]
        );
    }

    #[test]
    fn canonical_scansion_dates_by_vertex() {
        let s = canonical_essential_scansion(&a0_u()).unwrap();
        assert_eq!(s.date("a").unwrap(), "S•");
        assert_eq!(s.date("b").unwrap(), "T•");
        assert_eq!(s.date("c").unwrap(), "T•");

        let empty = Dynamics::new(Graph::default(), BTreeMap::new(), BTreeMap::new()).unwrap();
        let se = canonical_essential_scansion(&empty).unwrap();
        assert!(se.datation().is_empty());

        let one = Dynamics::new(
            Graph::new(["V"], []).unwrap(),
            sets(&[("V", &["only"])]),
            BTreeMap::new(),
        )
        .unwrap();
        let so = canonical_essential_scansion(&one).unwrap();
        assert_eq!(so.datation().len(), 1);
        assert_eq!(so.date("only").unwrap(), "V•");
    }

    #[test]
    fn realization_predicate() {
        let (h, d) = (h0(), a0_u());
        assert!(is_realization(&h, &d, &Assignment::new()).unwrap());
        assert!(is_realization(&h, &d, &x(&[("t0", "a"), ("t1", "b")])).unwrap());
        assert!(!is_realization(&h, &d, &x(&[("t1", "b")])).unwrap());
        assert!(!is_realization(&h, &d, &x(&[("t0", "a"), ("t1", "c")])).unwrap());
        // type mismatch
        assert!(!is_realization(&h, &d, &x(&[("t0", "b")])).unwrap());
        let other = essential_clock(&Graph::new(["S"], []).unwrap()).unwrap();
        assert_eq!(
            is_realization(&other, &d, &Assignment::new()),
            Err(DynamicsError::MotorMismatch)
        );
    }

    #[test]
    fn enumeration_order_and_content() {
        let got = enumerate_realizations(&h0(), &a0_u()).unwrap();
        assert_eq!(got, vec![x(&[]), x(&[("t0", "a")]), x(&[("t0", "a"), ("t1", "b")])]);
        let empty = Dynamics::new(Graph::default(), BTreeMap::new(), BTreeMap::new()).unwrap();
        let z = essential_clock(&Graph::default()).unwrap();
        assert_eq!(enumerate_realizations(&z, &empty).unwrap(), vec![Assignment::new()]);
    }

    #[test]
    fn assignment_display_and_order() {
        let a = x(&[("t1", "b"), ("t0", "a")]);
        assert_eq!(a.to_string(), "[t0=a,t1=b]");
        assert!(x(&[("t9", "z")]) < a);
        assert!(Assignment::new() < x(&[("t0", "a")]));
    }

    #[test]
    fn scanned_dynamorphism_identity_and_empty() {
        let datation: BTreeMap<StateId, InstantId> = [("a", "t0"), ("b", "t1"), ("c", "t1")]
            .into_iter()
            .map(|(s, t)| (s.to_string(), t.to_string()))
            .collect();
        let a = ScannedDynamics::new(a0_u(), h0(), datation).unwrap();
        let id = ScannedDynamorphism::identity(&a).unwrap();
        assert!(id.validate(&a, &a).is_empty());

        let mut empty = id.clone();
        empty.trans_part = a
            .dynamics()
            .state_sets()
            .iter()
            .map(|(v, s)| (v.clone(), Transition::empty(s.clone(), s.clone())))
            .collect();
        assert!(empty.validate(&a, &a).is_empty());

        // a clock part that contradicts the datation of δ-images
        let mut bad = id;
        bad.clock_part
            .insert("S".into(), Transition::empty(set(&["t0"]), set(&["t0"])));
        assert!(!bad.validate(&a, &a).is_empty());
    }
}
