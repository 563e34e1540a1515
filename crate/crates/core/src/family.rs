//! Interactions, dynamic families and the dynamics they generate.
//!
//! An interaction is a binary multiple relation over the component index:
//! slot `i` pairs a realization (external part) of component `i` with one of
//! its parameters. The primo-generated dynamics synchronizes all components
//! on the clock of the synchronizer `i0`; its parameters are the output tuples
//! of the interaction. Heaps pool parameter values coordinate-wise and yield
//! coarser parametric quotients.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::dynamics::{check_dynamorphism, Assignment, Clock, DynamorphismDiagnostic};
use crate::graph::{join_diags, GraphMorphism};
use crate::multirel::{BinaryMultipleRelation, RelationError};
use crate::open::{
    enumerate_open_realizations, parametric_quotient, MultiDynamics, OpenDynamics, OpenError, ParamEquivalence,
};
use crate::transition::{StateSet, Transition, TransitionError};
use crate::{ComponentId, InstantId, ParamId, StateId, VertexId};

/// Slot `i`: in-values are realizations of `A_i`, out-values its parameters.
pub type Interaction = BinaryMultipleRelation<ComponentId, Assignment, ParamId>;

/// One parameter per component: a parameter of the primo-generated dynamics.
pub type ParamTuple = BTreeMap<ComponentId, ParamId>;

/// One state per component: a state of the primo-generated dynamics.
pub type StateTuple = BTreeMap<ComponentId, StateId>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error(transparent)]
    Open(#[from] OpenError),
    #[error(transparent)]
    Relation(#[from] RelationError),
    #[error("a family needs at least one component")]
    NoComponents,
    #[error("synchronizer {0} is not a component")]
    UnknownSync(ComponentId),
    #[error("component {0} has no synchronization")]
    MissingSynchronization(ComponentId),
    #[error("synchronization given for {0}, which is the synchronizer or not a component")]
    UnexpectedSynchronization(ComponentId),
    #[error("synchronization of {component} is invalid: {}", join_diags(.diagnostics))]
    InvalidSynchronization {
        component: ComponentId,
        diagnostics: Vec<SyncDiagnostic>,
    },
    #[error("invalid interaction: {}", join_diags(.0))]
    InvalidInteraction(Vec<InteractionDiagnostic>),
    #[error("generated identifier {0} is ambiguous")]
    IdCollision(String),
    #[error("the interaction has no output tuple")]
    EmptyParams,
    #[error("work budget of {0} units exceeded")]
    BudgetExceeded(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SyncDiagnostic {
    Clock(DynamorphismDiagnostic),
    NotDeterministic(VertexId),
}

impl fmt::Display for SyncDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SyncDiagnostic::Clock(d) => write!(f, "{d}"),
            SyncDiagnostic::NotDeterministic(v) => write!(f, "not-deterministic {v}"),
        }
    }
}

/// `(Δ_i, δ_i)`: a deterministic dynamorphism from the synchronizer's clock to
/// the clock of component `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Synchronization {
    pub graph_part: GraphMorphism,
    pub clock_part: BTreeMap<VertexId, Transition>,
}

impl Synchronization {
    pub fn identity(clock: &Clock) -> Self {
        Synchronization {
            graph_part: GraphMorphism::identity(clock.motor()).expect("valid motor"),
            clock_part: clock
                .dynamics()
                .state_sets()
                .iter()
                .map(|(v, s)| (v.clone(), Transition::identity(s.clone())))
                .collect(),
        }
    }

    /// Builds `δ` from an instant-to-instant map. Vertices whose image under
    /// `Δ` is unknown get an empty target.
    pub fn from_instant_map(
        graph_part: GraphMorphism,
        source: &Clock,
        target: &Clock,
        map: &BTreeMap<InstantId, InstantId>,
    ) -> Result<Self, TransitionError> {
        let mut clock_part = BTreeMap::new();
        for (v, instants) in source.dynamics().state_sets() {
            let tgt = graph_part
                .vertex(v)
                .map(|w| target.instants(w).clone())
                .unwrap_or_default();
            let pairs = instants
                .iter()
                .filter_map(|t| map.get(t).map(|u| (t.clone(), u.clone())));
            clock_part.insert(v.clone(), Transition::from_pairs(instants.clone(), tgt, pairs)?);
        }
        Ok(Synchronization { graph_part, clock_part })
    }

    pub fn validate(&self, source: &Clock, target: &Clock) -> Vec<SyncDiagnostic> {
        let mut diags: Vec<SyncDiagnostic> = check_dynamorphism(
            &self.graph_part,
            &self.clock_part,
            source.dynamics(),
            target.dynamics(),
            None,
        )
        .into_iter()
        .map(SyncDiagnostic::Clock)
        .collect();
        for (v, t) in &self.clock_part {
            if !t.is_deterministic() {
                diags.push(SyncDiagnostic::NotDeterministic(v.clone()));
            }
        }
        diags
    }

    /// `δ_{i,v}(t)`.
    pub fn instant(&self, vertex: &str, t: &str) -> Option<&InstantId> {
        self.clock_part.get(vertex)?.apply(t).iter().next()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InteractionDiagnostic {
    EmptyInteraction,
    IndexMismatch,
    ContextMismatch(ComponentId),
    Incoherent {
        slot: ComponentId,
        param: ParamId,
        assignment: Assignment,
    },
}

impl fmt::Display for InteractionDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InteractionDiagnostic::EmptyInteraction => write!(f, "empty-interaction"),
            InteractionDiagnostic::IndexMismatch => write!(f, "index-mismatch"),
            InteractionDiagnostic::ContextMismatch(i) => write!(f, "context-mismatch at slot {i}"),
            InteractionDiagnostic::Incoherent {
                slot,
                param,
                assignment,
            } => write!(
                f,
                "incoherence at slot {slot}: {assignment} is not a {param}-realization"
            ),
        }
    }
}

/// `S_(A,λ)` for every parameter `λ`.
pub fn realization_sets(a: &OpenDynamics) -> BTreeMap<ParamId, BTreeSet<Assignment>> {
    let mut out: BTreeMap<ParamId, BTreeSet<Assignment>> =
        a.params().iter().map(|p| (p.clone(), BTreeSet::new())).collect();
    for r in enumerate_open_realizations(a) {
        out.get_mut(&r.param).expect("own param").insert(r.assignment);
    }
    out
}

type Contexts<V> = BTreeMap<ComponentId, BTreeSet<V>>;

/// In-contexts `S_{A_i}` and out-contexts `L_i`.
pub fn interaction_contexts(
    components: &BTreeMap<ComponentId, OpenDynamics>,
) -> (Contexts<Assignment>, Contexts<ParamId>) {
    let ins = components
        .iter()
        .map(|(i, a)| (i.clone(), realization_sets(a).into_values().flatten().collect()))
        .collect();
    let outs = components
        .iter()
        .map(|(i, a)| (i.clone(), a.params().clone()))
        .collect();
    (ins, outs)
}

/// An interaction on the components' contexts. Coherence is not checked.
pub fn build_interaction<I>(
    components: &BTreeMap<ComponentId, OpenDynamics>,
    tuples: I,
) -> Result<Interaction, FamilyError>
where
    I: IntoIterator<Item = BTreeMap<ComponentId, (Assignment, ParamId)>>,
{
    let (ins, outs) = interaction_contexts(components);
    Ok(Interaction::new(ins, outs, tuples.into_iter().collect())?)
}

/// Every coherent tuple: the largest interaction on these components.
pub fn coherent_tuples(
    components: &BTreeMap<ComponentId, OpenDynamics>,
) -> Vec<BTreeMap<ComponentId, (Assignment, ParamId)>> {
    let mut acc = vec![BTreeMap::new()];
    for (i, a) in components {
        let pairs: Vec<(Assignment, ParamId)> = enumerate_open_realizations(a)
            .into_iter()
            .map(|r| (r.assignment, r.param))
            .collect();
        acc = acc
            .into_iter()
            .flat_map(|t| {
                pairs.iter().map(move |pair| {
                    let mut t = t.clone();
                    t.insert(i.clone(), pair.clone());
                    t
                })
            })
            .collect();
    }
    acc
}

/// Empty iff the graph is nonempty, the contexts are those of the components
/// and every tuple is coherent.
pub fn validate_interaction(
    components: &BTreeMap<ComponentId, OpenDynamics>,
    r: &Interaction,
) -> Vec<InteractionDiagnostic> {
    let mut diags = Vec::new();
    if !r.index().iter().eq(components.keys()) {
        return vec![InteractionDiagnostic::IndexMismatch];
    }
    let sets: BTreeMap<&ComponentId, _> = components.iter().map(|(i, a)| (i, realization_sets(a))).collect();
    for (i, a) in components {
        let ins: BTreeSet<&Assignment> = sets[i].values().flatten().collect();
        if !r.in_contexts()[i].iter().eq(ins) || &r.out_contexts()[i] != a.params() {
            diags.push(InteractionDiagnostic::ContextMismatch(i.clone()));
        }
    }
    if r.graph().is_empty() {
        diags.push(InteractionDiagnostic::EmptyInteraction);
    }
    for t in r.graph() {
        for (i, (assignment, param)) in t {
            let coherent = sets[i].get(param).is_some_and(|s| s.contains(assignment));
            let d = InteractionDiagnostic::Incoherent {
                slot: i.clone(),
                param: param.clone(),
                assignment: assignment.clone(),
            };
            if !coherent && !diags.contains(&d) {
                diags.push(d);
            }
        }
    }
    diags
}

/// `F = (I, i0, (A_i), R, (Δ_i, δ_i))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DynamicFamily {
    sync: ComponentId,
    components: BTreeMap<ComponentId, OpenDynamics>,
    interaction: Interaction,
    synchronizations: BTreeMap<ComponentId, Synchronization>,
}

impl DynamicFamily {
    /// `synchronizations` covers every component except `sync`, whose
    /// synchronization is the identity.
    pub fn new(
        sync: impl Into<ComponentId>,
        components: BTreeMap<ComponentId, OpenDynamics>,
        interaction: Interaction,
        synchronizations: BTreeMap<ComponentId, Synchronization>,
    ) -> Result<Self, FamilyError> {
        let sync = sync.into();
        if components.is_empty() {
            return Err(FamilyError::NoComponents);
        }
        let Some(a0) = components.get(&sync) else {
            return Err(FamilyError::UnknownSync(sync));
        };
        if let Some(i) = synchronizations
            .keys()
            .find(|i| **i == sync || !components.contains_key(*i))
        {
            return Err(FamilyError::UnexpectedSynchronization(i.clone()));
        }
        for (i, a) in &components {
            if *i == sync {
                continue;
            }
            let s = synchronizations
                .get(i)
                .ok_or_else(|| FamilyError::MissingSynchronization(i.clone()))?;
            let diagnostics = s.validate(a0.clock(), a.clock());
            if !diagnostics.is_empty() {
                return Err(FamilyError::InvalidSynchronization {
                    component: i.clone(),
                    diagnostics,
                });
            }
        }
        let diags = validate_interaction(&components, &interaction);
        if !diags.is_empty() {
            return Err(FamilyError::InvalidInteraction(diags));
        }
        Ok(DynamicFamily {
            sync,
            components,
            interaction,
            synchronizations,
        })
    }

    pub fn sync(&self) -> &ComponentId {
        &self.sync
    }

    pub fn index(&self) -> impl Iterator<Item = &ComponentId> {
        self.components.keys()
    }

    pub fn components(&self) -> &BTreeMap<ComponentId, OpenDynamics> {
        &self.components
    }

    pub fn component(&self, i: &str) -> Option<&OpenDynamics> {
        self.components.get(i)
    }

    pub fn interaction(&self) -> &Interaction {
        &self.interaction
    }

    /// `None` for the synchronizer.
    pub fn synchronization(&self, i: &str) -> Option<&Synchronization> {
        self.synchronizations.get(i)
    }

    pub fn synchronizations(&self) -> &BTreeMap<ComponentId, Synchronization> {
        &self.synchronizations
    }

    /// `M = Im(rb(R))`, keyed by generated parameter id.
    pub fn generated_params(&self) -> Result<BTreeMap<ParamId, ParamTuple>, FamilyError> {
        let mut out = BTreeMap::new();
        for mu in self.interaction.rb_image() {
            insert_unique(&mut out, tuple_id(mu.values()), mu)?;
        }
        Ok(out)
    }

    fn vertex_of(&self, i: &str, v: &str) -> VertexId {
        match self.synchronizations.get(i) {
            None => v.to_string(),
            Some(s) => s.graph_part.vertex_map[v].clone(),
        }
    }

    fn edge_of(&self, i: &str, e: &str) -> String {
        match self.synchronizations.get(i) {
            None => e.to_string(),
            Some(s) => s.graph_part.edge_map[e].clone(),
        }
    }

    fn instant_of(&self, i: &str, v: &str, t: &str) -> Option<InstantId> {
        match self.synchronizations.get(i) {
            None => Some(t.to_string()),
            Some(s) => s.instant(v, t).cloned(),
        }
    }
}

/// `(x0,x1,...)` in index order.
pub fn tuple_id<'a>(values: impl Iterator<Item = &'a String>) -> String {
    format!("({})", values.map(String::as_str).collect::<Vec<_>>().join(","))
}

fn insert_unique<T: PartialEq>(map: &mut BTreeMap<String, T>, id: String, value: T) -> Result<(), FamilyError> {
    match map.get(&id) {
        Some(existing) if *existing != value => Err(FamilyError::IdCollision(id)),
        _ => {
            map.insert(id, value);
            Ok(())
        }
    }
}

/// `[F]_p` together with the tuples behind its identifiers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimoGenerated {
    pub dynamics: OpenDynamics,
    pub params: BTreeMap<ParamId, ParamTuple>,
    pub states: BTreeMap<StateId, StateTuple>,
}

/// `[F]_p`. With `strict_edge`, a step along `e` of the synchronizer requires
/// every component to step along `Δ_i(e)` instead of along any edge.
pub fn primo_generated(f: &DynamicFamily, strict_edge: bool) -> Result<OpenDynamics, FamilyError> {
    Ok(primo_generated_with_tuples(f, strict_edge)?.dynamics)
}

pub fn primo_generated_with_tuples(f: &DynamicFamily, strict_edge: bool) -> Result<PrimoGenerated, FamilyError> {
    let a0 = &f.components[&f.sync];
    let motor = a0.motor().clone();
    let h0 = a0.clock();

    // states: tuples whose non-sync dates are the synchronized sync date
    let mut states: BTreeMap<StateId, StateTuple> = BTreeMap::new();
    let mut state_sets: BTreeMap<VertexId, StateSet> = BTreeMap::new();
    let mut by_vertex: BTreeMap<VertexId, Vec<(StateId, StateTuple)>> = BTreeMap::new();
    for v in motor.vertices() {
        let mut acc: Vec<StateTuple> = vec![StateTuple::new()];
        for s0 in a0.multi().states(v) {
            let t0 = &a0.datation()[s0];
            let mut partial: Vec<StateTuple> = vec![StateTuple::from([(f.sync.clone(), s0.clone())])];
            for (i, a) in &f.components {
                if *i == f.sync {
                    continue;
                }
                let Some(ti) = f.instant_of(i, v, t0) else {
                    partial.clear();
                    break;
                };
                let w = f.vertex_of(i, v);
                let candidates: Vec<&StateId> = a
                    .multi()
                    .states(&w)
                    .iter()
                    .filter(|s| a.datation().get(*s) == Some(&ti))
                    .collect();
                partial = partial
                    .into_iter()
                    .flat_map(|t| {
                        candidates.iter().map(move |s| {
                            let mut t = t.clone();
                            t.insert(i.clone(), (*s).clone());
                            t
                        })
                    })
                    .collect();
            }
            acc.extend(partial);
        }
        acc.remove(0);
        let set = state_sets.entry(v.clone()).or_default();
        for t in acc {
            let id = tuple_id(t.values());
            insert_unique(&mut states, id.clone(), t.clone())?;
            set.insert(id.clone());
            by_vertex.entry(v.clone()).or_default().push((id, t));
        }
    }
    let total: usize = state_sets.values().map(BTreeSet::len).sum();
    if total != states.len() {
        return Err(FamilyError::IdCollision("state tuple shared by two vertices".into()));
    }

    let params = f.generated_params()?;
    if params.is_empty() {
        return Err(FamilyError::EmptyParams);
    }

    let date = |i: &str, s: &str| -> &InstantId { &f.components[i].datation()[s] };
    let mut arrows = Vec::new();
    for e in motor.edges() {
        let src = by_vertex.get(&e.dom).map(Vec::as_slice).unwrap_or(&[]);
        let tgt = by_vertex.get(&e.cod).map(Vec::as_slice).unwrap_or(&[]);
        for (pid, mu) in &params {
            let pre = f.interaction.rb_preimage(mu)?;
            for (aid, a) in src {
                let expected = h0.next(&e.id, date(&f.sync, &a[&f.sync]));
                let through: Vec<&BTreeMap<ComponentId, Assignment>> = pre
                    .iter()
                    .filter(|x| a.iter().all(|(i, ai)| x[i].get(date(i, ai)) == Some(ai)))
                    .collect();
                if through.is_empty() {
                    continue;
                }
                for (bid, b) in tgt {
                    if expected != Some(date(&f.sync, &b[&f.sync])) {
                        continue;
                    }
                    let succession = a.iter().all(|(i, ai)| {
                        let (ta, tb) = (date(i, ai), date(i, &b[i]));
                        let hi = f.components[i].clock();
                        if strict_edge {
                            hi.next(&f.edge_of(i, &e.id), ta) == Some(tb)
                        } else {
                            hi.succeeds(ta, tb).unwrap_or(false)
                        }
                    });
                    if !succession {
                        continue;
                    }
                    let hit = through
                        .iter()
                        .any(|x| b.iter().all(|(i, bi)| x[i].get(date(i, bi)) == Some(bi)));
                    if hit {
                        arrows.push((e.id.clone(), pid.clone(), aid.clone(), bid.clone()));
                    }
                }
            }
        }
    }

    let datation = states
        .iter()
        .map(|(id, t)| (id.clone(), date(&f.sync, &t[&f.sync]).clone()))
        .collect();
    let multi = MultiDynamics::from_arrows(motor, params.keys().cloned().collect(), state_sets, arrows)?;
    let dynamics = OpenDynamics::new(multi, h0.clone(), datation)?;
    Ok(PrimoGenerated {
        dynamics,
        params,
        states,
    })
}

/// Per component, the parameter values pooled together.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HeapFamily(pub BTreeMap<ComponentId, BTreeSet<ParamId>>);

impl HeapFamily {
    pub fn get(&self, i: &str) -> Option<&BTreeSet<ParamId>> {
        self.0.get(i)
    }
}

/// Tuples are equivalent when every coordinate is equal or lies in the heap
/// of its component on both sides.
pub fn heap_equivalence(params: &BTreeMap<ParamId, ParamTuple>, heaps: &HeapFamily) -> ParamEquivalence {
    let mut classes: BTreeMap<Vec<(&ComponentId, Option<&ParamId>)>, BTreeSet<ParamId>> = BTreeMap::new();
    for (id, mu) in params {
        let key = mu
            .iter()
            .map(|(i, l)| {
                let pooled = heaps.get(i).is_some_and(|n| n.contains(l));
                (i, if pooled { None } else { Some(l) })
            })
            .collect();
        classes.entry(key).or_default().insert(id.clone());
    }
    ParamEquivalence::from_classes(classes.into_values()).expect("grouping is a partition")
}

struct Meter {
    limit: Option<u64>,
    used: u64,
}

impl Meter {
    fn new(limit: Option<u64>) -> Self {
        Meter { limit, used: 0 }
    }

    fn charge(&mut self, units: u64) -> Result<(), FamilyError> {
        self.used += units;
        match self.limit {
            Some(limit) if self.used > limit => Err(FamilyError::BudgetExceeded(limit)),
            _ => Ok(()),
        }
    }
}

type Row<'a> = (Vec<&'a Assignment>, Vec<&'a ParamId>);

/// For every tuple: in-values and out-values in index order.
fn rows(r: &Interaction) -> Vec<Row<'_>> {
    r.graph()
        .iter()
        .map(|t| {
            (
                t.values().map(|(a, _)| a).collect(),
                t.values().map(|(_, p)| p).collect(),
            )
        })
        .collect()
}

fn without<T: Copy>(v: &[T], k: usize) -> Vec<T> {
    v.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, x)| *x).collect()
}

/// `N^f`: R-compatible `l_k` such that any realizations of the other
/// components compatible with `l_k` are compatible with no other value.
pub fn functional_heaps(f: &DynamicFamily, budget: Option<u64>) -> Result<HeapFamily, FamilyError> {
    functional_heaps_of(&f.interaction, budget)
}

/// [`functional_heaps`] on a bare interaction; coherence is not required.
pub fn functional_heaps_of(r: &Interaction, budget: Option<u64>) -> Result<HeapFamily, FamilyError> {
    let mut meter = Meter::new(budget);
    let rows = rows(r);
    let mut out = BTreeMap::new();
    for (k, i) in r.index().iter().enumerate() {
        let keyed: Vec<(Vec<&Assignment>, &ParamId)> =
            rows.iter().map(|(ins, outs)| (without(ins, k), outs[k])).collect();
        let compatible: BTreeSet<&ParamId> = keyed.iter().map(|(_, l)| *l).collect();
        let mut heap = BTreeSet::new();
        for l in compatible {
            meter.charge(2 * keyed.len() as u64)?;
            let with_l: BTreeSet<&Vec<&Assignment>> = keyed.iter().filter(|(_, x)| *x == l).map(|(a, _)| a).collect();
            if keyed.iter().all(|(a, x)| *x == l || !with_l.contains(a)) {
                heap.insert(l.clone());
            }
        }
        out.insert(i.clone(), heap);
    }
    Ok(HeapFamily(out))
}

/// `N^s`: R-compatible values that are blocked. `λ_k` is free when, for every
/// tuple `(𝔞_k, λ_k, μ)` it occurs in and every `𝔟` compatible with `μ`, the
/// tuple `(𝔞_k, λ_k, μ, 𝔟)` belongs to the interaction.
pub fn flexible_heaps(f: &DynamicFamily, budget: Option<u64>) -> Result<HeapFamily, FamilyError> {
    flexible_heaps_of(&f.interaction, budget)
}

/// [`flexible_heaps`] on a bare interaction; coherence is not required.
pub fn flexible_heaps_of(r: &Interaction, budget: Option<u64>) -> Result<HeapFamily, FamilyError> {
    let mut meter = Meter::new(budget);
    let rows = rows(r);
    let present: BTreeSet<(&Vec<&Assignment>, &Vec<&ParamId>)> = rows.iter().map(|(a, p)| (a, p)).collect();
    let mut out = BTreeMap::new();
    for (k, i) in r.index().iter().enumerate() {
        let mut others: BTreeMap<Vec<&ParamId>, BTreeSet<Vec<&Assignment>>> = BTreeMap::new();
        for (ins, outs) in &rows {
            others.entry(without(outs, k)).or_default().insert(without(ins, k));
        }
        let compatible: BTreeSet<&ParamId> = rows.iter().map(|(_, outs)| outs[k]).collect();
        let mut heap = BTreeSet::new();
        for l in compatible {
            let mut free = true;
            'rows: for (ins, outs) in rows.iter().filter(|(_, outs)| outs[k] == l) {
                let mu = without(outs, k);
                for b in &others[&mu] {
                    meter.charge(1)?;
                    let mut full_in = b.clone();
                    full_in.insert(k, ins[k]);
                    if !present.contains(&(&full_in, outs)) {
                        free = false;
                        break 'rows;
                    }
                }
            }
            if !free {
                heap.insert(l.clone());
            }
        }
        out.insert(i.clone(), heap);
    }
    Ok(HeapFamily(out))
}

/// Which dynamics to generate from a family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GenerationMode {
    /// `[F]_p`.
    Primo,
    /// `[F]_f`, quotient by the functional heaps.
    Functional,
    /// `[F]_s`, quotient by the flexible heaps.
    Flexible,
    /// `[F]_m`, a single parameter.
    Mono,
}

impl GenerationMode {
    pub const ALL: [GenerationMode; 4] = [
        GenerationMode::Primo,
        GenerationMode::Functional,
        GenerationMode::Flexible,
        GenerationMode::Mono,
    ];
}

impl fmt::Display for GenerationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GenerationMode::Primo => "p",
            GenerationMode::Functional => "f",
            GenerationMode::Flexible => "s",
            GenerationMode::Mono => "m",
        };
        f.write_str(s)
    }
}

impl FromStr for GenerationMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "p" => Ok(GenerationMode::Primo),
            "f" => Ok(GenerationMode::Functional),
            "s" => Ok(GenerationMode::Flexible),
            "m" => Ok(GenerationMode::Mono),
            other => Err(format!("unknown mode {other}, expected p, f, s or m")),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GenerationOptions {
    pub strict_edge: bool,
    /// Work units allowed for heap computations; `None` is unbounded.
    pub budget: Option<u64>,
}

pub fn generate(f: &DynamicFamily, mode: GenerationMode, opts: GenerationOptions) -> Result<OpenDynamics, FamilyError> {
    let primo = primo_generated_with_tuples(f, opts.strict_edge)?;
    let q = match mode {
        GenerationMode::Primo => return Ok(primo.dynamics),
        GenerationMode::Functional => heap_equivalence(&primo.params, &functional_heaps(f, opts.budget)?),
        GenerationMode::Flexible => heap_equivalence(&primo.params, &flexible_heaps(f, opts.budget)?),
        GenerationMode::Mono => ParamEquivalence::total(primo.dynamics.params()),
    };
    Ok(parametric_quotient(&primo.dynamics, &q)?)
}

/// Non-splittable sets of components.
pub fn family_connective_structure(f: &DynamicFamily, include_empty: bool) -> Vec<BTreeSet<ComponentId>> {
    f.interaction.connective_structure(include_empty)
}
