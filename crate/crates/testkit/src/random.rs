//! Seeded random instances. All generators are deterministic for a seed.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use odyn_core::dynamics::{Clock, Dynamics, ScannedDynamics};
use odyn_core::family::build_interaction;
use odyn_core::graph::{Edge, Graph};
use odyn_core::multirel::BinaryMultipleRelation;
use odyn_core::open::{enumerate_open_realizations, MultiDynamics};
use odyn_core::transition::{StateSet, Transition};
use odyn_core::{DynamicFamily, OpenDynamics, Synchronization};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn names(prefix: &str, n: usize) -> StateSet {
    (0..n).map(|k| format!("{prefix}{k}")).collect()
}

pub fn transition<R: Rng>(rng: &mut R, source: &StateSet, target: &StateSet, density: f64) -> Transition {
    let pairs: Vec<(String, String)> = source
        .iter()
        .flat_map(|a| target.iter().map(move |b| (a.clone(), b.clone())))
        .filter(|_| rng.gen_bool(density))
        .collect();
    Transition::from_pairs(source.clone(), target.clone(), pairs).expect("pairs within contexts")
}

/// `f: A ⇝ B`, `g: B ⇝ C`, `h: C ⇝ D` with all sets of size at most 4.
pub fn composable_triple<R: Rng>(rng: &mut R) -> (Transition, Transition, Transition) {
    let sets: Vec<StateSet> = ["a", "b", "c", "d"]
        .iter()
        .map(|p| names(p, rng.gen_range(0..=4)))
        .collect();
    let density = rng.gen_range(0.1..0.7);
    (
        transition(rng, &sets[0], &sets[1], density),
        transition(rng, &sets[1], &sets[2], density),
        transition(rng, &sets[2], &sets[3], density),
    )
}

/// A motor on 1 to 3 vertices with up to 3 edges (loops and parallel edges
/// allowed) and a clock with at most 4 instants, one at least per vertex.
pub fn clock<R: Rng>(rng: &mut R) -> Clock {
    let nv = rng.gen_range(1..=3);
    let vertices: Vec<String> = (0..nv).map(|k| format!("V{k}")).collect();
    let edges: Vec<Edge> = (0..rng.gen_range(0..=3))
        .map(|k| {
            Edge::new(
                format!("e{k}"),
                vertices.choose(rng).unwrap().clone(),
                vertices.choose(rng).unwrap().clone(),
            )
        })
        .collect();
    let motor = Graph::new(vertices.clone(), edges.clone()).expect("valid motor");
    let mut counts = vec![1usize; nv];
    for _ in 0..rng.gen_range(0..=(4 - nv)) {
        counts[rng.gen_range(0..nv)] += 1;
    }
    let instants: BTreeMap<String, StateSet> = vertices
        .iter()
        .zip(&counts)
        .map(|(v, n)| (v.clone(), names(&format!("t{}_", &v[1..]), *n)))
        .collect();
    let mut ticks = Vec::new();
    for e in &edges {
        let targets: Vec<&String> = instants[&e.cod].iter().collect();
        for t in &instants[&e.dom] {
            ticks.push((e.id.clone(), t.clone(), (*targets.choose(rng).unwrap()).clone()));
        }
    }
    Clock::from_ticks(motor, instants, ticks).expect("deterministic ticks")
}

/// A clock and an unscanned dynamics on its motor, up to 4 states per vertex.
pub fn clock_and_dynamics<R: Rng>(rng: &mut R) -> (Clock, Dynamics) {
    let h = clock(rng);
    let motor = h.motor().clone();
    let state_sets: BTreeMap<String, StateSet> = motor
        .vertices()
        .iter()
        .map(|v| (v.clone(), names(&format!("s{}_", &v[1..]), rng.gen_range(0..=4))))
        .collect();
    let density = rng.gen_range(0.2..0.7);
    let trans = motor
        .edges()
        .iter()
        .map(|e| {
            (
                e.id.clone(),
                transition(rng, &state_sets[&e.dom], &state_sets[&e.cod], density),
            )
        })
        .collect();
    let d = Dynamics::new(motor, state_sets, trans).expect("valid dynamics");
    (h, d)
}

type ScannedParts = (
    BTreeMap<String, StateSet>,
    BTreeMap<String, String>,
    Vec<(String, String, String, String)>,
);

/// Dated states plus, per parameter, a random subset of the date-respecting
/// arrows.
fn scanned_parts<R: Rng>(
    rng: &mut R,
    h: &Clock,
    params: &BTreeSet<String>,
    prefix: &str,
    max_states: usize,
) -> ScannedParts {
    let motor = h.motor();
    let mut state_sets = BTreeMap::new();
    let mut datation = BTreeMap::new();
    for v in motor.vertices() {
        let n = rng.gen_range(1..=max_states);
        let states = names(&format!("{prefix}{}", v.to_lowercase()), n);
        let instants: Vec<&String> = h.instants(v).iter().collect();
        for st in &states {
            datation.insert(st.clone(), (*instants.choose(rng).unwrap()).clone());
        }
        state_sets.insert(v.clone(), states);
    }
    let density = rng.gen_range(0.3..0.8);
    let mut arrows = Vec::new();
    for e in motor.edges() {
        for a in &state_sets[&e.dom] {
            let next = h.next(&e.id, &datation[a]).cloned();
            for b in &state_sets[&e.cod] {
                if Some(&datation[b]) != next.as_ref() {
                    continue;
                }
                for p in params {
                    if rng.gen_bool(density) {
                        arrows.push((e.id.clone(), p.clone(), a.clone(), b.clone()));
                    }
                }
            }
        }
    }
    (state_sets, datation, arrows)
}

/// A scanned dynamics on a random clock, up to 4 states per vertex.
pub fn scanned<R: Rng>(rng: &mut R) -> ScannedDynamics {
    let h = clock(rng);
    let params = BTreeSet::from(["_".to_string()]);
    let (state_sets, datation, arrows) = scanned_parts(rng, &h, &params, "s", 4);
    let d = Dynamics::from_arrows(
        h.motor().clone(),
        state_sets,
        arrows.into_iter().map(|(e, _, a, b)| (e, a, b)),
    )
    .expect("valid dynamics");
    ScannedDynamics::new(d, h, datation).expect("date-respecting arrows")
}

/// One of the small shared clocks used for families: at most 2 instants.
fn family_clock<R: Rng>(rng: &mut R) -> Clock {
    let s = |x: &str| x.to_string();
    let set = |xs: &[&str]| xs.iter().map(|x| s(x)).collect::<StateSet>();
    match rng.gen_range(0..4) {
        0 => Clock::from_ticks(
            Graph::new(["S", "T"], [Edge::new("e", "S", "T")]).unwrap(),
            BTreeMap::from([(s("S"), set(&["t0"])), (s("T"), set(&["t1"]))]),
            [(s("e"), s("t0"), s("t1"))],
        ),
        1 => Clock::from_ticks(
            Graph::new(["V"], [Edge::new("l", "V", "V")]).unwrap(),
            BTreeMap::from([(s("V"), set(&["t0", "t1"]))]),
            [(s("l"), s("t0"), s("t1")), (s("l"), s("t1"), s("t0"))],
        ),
        2 => Clock::from_ticks(
            Graph::new(["V"], [Edge::new("l", "V", "V")]).unwrap(),
            BTreeMap::from([(s("V"), set(&["t0", "t1"]))]),
            [(s("l"), s("t0"), s("t1")), (s("l"), s("t1"), s("t1"))],
        ),
        _ => Clock::from_ticks(
            Graph::new(["V"], [Edge::new("l", "V", "V")]).unwrap(),
            BTreeMap::from([(s("V"), set(&["t0"]))]),
            [(s("l"), s("t0"), s("t0"))],
        ),
    }
    .expect("valid clock")
}

/// A family with 1 to 3 components on a shared clock (identity
/// synchronizations), at most 3 states per vertex, at most 2 parameters per
/// component, and an interaction of up to 8 random coherent tuples.
pub fn family<R: Rng>(rng: &mut R) -> DynamicFamily {
    let h = family_clock(rng);
    let n = rng.gen_range(1..=3);
    let mut components = BTreeMap::new();
    for i in 0..n {
        let params = names(&format!("p{i}_"), rng.gen_range(1..=2));
        let (state_sets, datation, arrows) = scanned_parts(rng, &h, &params, &format!("c{i}"), 3);
        let multi =
            MultiDynamics::from_arrows(h.motor().clone(), params, state_sets, arrows).expect("valid multi-dynamics");
        let a = OpenDynamics::new(multi, h.clone(), datation).expect("date-respecting arrows");
        components.insert(i.to_string(), a);
    }
    let pairs: BTreeMap<String, Vec<_>> = components
        .iter()
        .map(|(i, a)| {
            let ps: Vec<_> = enumerate_open_realizations(a)
                .into_iter()
                .map(|r| (r.assignment, r.param))
                .collect();
            (i.clone(), ps)
        })
        .collect();
    let m = rng.gen_range(1..=8);
    let tuples: Vec<_> = (0..m)
        .map(|_| {
            pairs
                .iter()
                .map(|(i, ps)| (i.clone(), ps.choose(rng).unwrap().clone()))
                .collect()
        })
        .collect();
    let r = build_interaction(&components, tuples).expect("values from the contexts");
    let sync = rng.gen_range(0..n).to_string();
    let syncs = components
        .keys()
        .filter(|i| **i != sync)
        .map(|i| (i.clone(), Synchronization::identity(&h)))
        .collect();
    DynamicFamily::new(sync, components, r, syncs).expect("coherent family")
}

pub type SmallRelation = BinaryMultipleRelation<u8, u8, u8>;

/// A relation over up to `max_slots` slots, built as a product of random
/// blocks and then perturbed, so that both split and non-split parts occur.
pub fn relation<R: Rng>(rng: &mut R, max_slots: usize) -> SmallRelation {
    let n = rng.gen_range(1..=max_slots) as u8;
    let ins: BTreeMap<u8, BTreeSet<u8>> = (0..n).map(|i| (i, (0..rng.gen_range(1..=2)).collect())).collect();
    let outs: BTreeMap<u8, BTreeSet<u8>> = (0..n).map(|i| (i, (0..rng.gen_range(1..=2)).collect())).collect();
    let full = |slots: &[u8]| -> Vec<BTreeMap<u8, (u8, u8)>> {
        let mut acc = vec![BTreeMap::new()];
        for i in slots {
            acc = acc
                .into_iter()
                .flat_map(|t| {
                    let mut out = Vec::new();
                    for a in &ins[i] {
                        for b in &outs[i] {
                            let mut t: BTreeMap<u8, (u8, u8)> = t.clone();
                            t.insert(*i, (*a, *b));
                            out.push(t);
                        }
                    }
                    out
                })
                .collect();
        }
        acc
    };
    let mut blocks: BTreeMap<u8, Vec<u8>> = BTreeMap::new();
    for i in 0..n {
        blocks.entry(rng.gen_range(0..n)).or_default().push(i);
    }
    let mut graph: Vec<BTreeMap<u8, (u8, u8)>> = vec![BTreeMap::new()];
    for slots in blocks.values() {
        let cands = full(slots);
        let mut chosen: Vec<_> = cands.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
        if chosen.is_empty() {
            chosen.push(cands.choose(rng).unwrap().clone());
        }
        graph = graph
            .into_iter()
            .flat_map(|t| {
                chosen.iter().map(move |c| {
                    let mut t = t.clone();
                    t.extend(c.iter().map(|(k, v)| (*k, *v)));
                    t
                })
            })
            .collect();
    }
    let mut graph: BTreeSet<_> = graph.into_iter().collect();
    if rng.gen_bool(0.3) {
        let all: Vec<u8> = (0..n).collect();
        let t = full(&all).choose(rng).unwrap().clone();
        if !graph.remove(&t) {
            graph.insert(t);
        }
    }
    SmallRelation::new(ins, outs, graph).expect("values from the contexts")
}
