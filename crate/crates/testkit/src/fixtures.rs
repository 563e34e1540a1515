//! Two-component family on the motor `S --e--> T` with clock `t0 -> t1`.
//!
//! Component `0` has parameters `u`, `v` (`a -> b` under `u`, `a -> c` under
//! `v`); component `1` has the single parameter `w` (`x -> y` and `x -> z`).
//! [`fixture1`] pairs each run of `0` with one run of `1`; [`fixture2`] uses
//! every coherent tuple.

use std::collections::{BTreeMap, BTreeSet};

use odyn_core::dynamics::{Clock, Dynamics, ScannedDynamics};
use odyn_core::family::{build_interaction, coherent_tuples, Interaction};
use odyn_core::graph::{Edge, Graph};
use odyn_core::open::MultiDynamics;
use odyn_core::{Assignment, ComponentId, DynamicFamily, OpenDynamics, ParamId, Synchronization};

pub fn s(x: &str) -> String {
    x.to_string()
}

pub fn set(xs: &[&str]) -> BTreeSet<String> {
    xs.iter().map(|x| s(x)).collect()
}

pub fn assignment(pairs: &[(&str, &str)]) -> Assignment {
    pairs.iter().map(|(t, st)| (*t, *st)).collect()
}

pub fn motor() -> Graph {
    Graph::new(["S", "T"], [Edge::new("e", "S", "T")]).expect("valid motor")
}

pub fn h0() -> Clock {
    Clock::from_ticks(
        motor(),
        BTreeMap::from([(s("S"), set(&["t0"])), (s("T"), set(&["t1"]))]),
        [(s("e"), s("t0"), s("t1"))],
    )
    .expect("valid clock")
}

fn component(params: &[&str], at_s: &[&str], at_t: &[&str], arrows: &[(&str, &str, &str)]) -> OpenDynamics {
    let multi = MultiDynamics::from_arrows(
        motor(),
        set(params),
        BTreeMap::from([(s("S"), set(at_s)), (s("T"), set(at_t))]),
        arrows.iter().map(|(p, a, b)| (s("e"), s(p), s(a), s(b))),
    )
    .expect("valid multi-dynamics");
    let datation = at_s
        .iter()
        .map(|x| (s(x), s("t0")))
        .chain(at_t.iter().map(|x| (s(x), s("t1"))))
        .collect();
    OpenDynamics::new(multi, h0(), datation).expect("valid open dynamics")
}

/// `A0`: `e_u(a) = {b}`, `e_v(a) = {c}`.
pub fn a0() -> OpenDynamics {
    component(&["u", "v"], &["a"], &["b", "c"], &[("u", "a", "b"), ("v", "a", "c")])
}

/// `A1`: `e_w(x) = {y, z}`.
pub fn a1() -> OpenDynamics {
    component(&["w"], &["x"], &["y", "z"], &[("w", "x", "y"), ("w", "x", "z")])
}

pub fn components() -> BTreeMap<ComponentId, OpenDynamics> {
    BTreeMap::from([(s("0"), a0()), (s("1"), a1())])
}

pub fn pair(
    a0: &[(&str, &str)],
    l0: &str,
    a1: &[(&str, &str)],
    l1: &str,
) -> BTreeMap<ComponentId, (Assignment, ParamId)> {
    BTreeMap::from([(s("0"), (assignment(a0), s(l0))), (s("1"), (assignment(a1), s(l1)))])
}

pub fn fixture1_interaction() -> Interaction {
    build_interaction(
        &components(),
        [
            pair(&[("t0", "a"), ("t1", "b")], "u", &[("t0", "x"), ("t1", "y")], "w"),
            pair(&[("t0", "a"), ("t1", "c")], "v", &[("t0", "x"), ("t1", "z")], "w"),
        ],
    )
    .expect("interaction on the component contexts")
}

fn family(r: Interaction) -> DynamicFamily {
    let sync = BTreeMap::from([(s("1"), Synchronization::identity(&h0()))]);
    DynamicFamily::new("0", components(), r, sync).expect("valid family")
}

pub fn fixture1() -> DynamicFamily {
    family(fixture1_interaction())
}

pub fn fixture2() -> DynamicFamily {
    let comps = components();
    family(build_interaction(&comps, coherent_tuples(&comps)).expect("interaction"))
}

/// One vertex `V` with a loop `l`, clock `t0 -> t1 -> t0`, states `a` (dated
/// `t1`) and `b` (dated `t0`) swapped by `l`. As an unscanned dynamics the run
/// `[t0=a, t1=b]` is a realization; under the datation it is not.
pub fn misdated_loop() -> ScannedDynamics {
    let g = Graph::new(["V"], [Edge::new("l", "V", "V")]).expect("valid motor");
    let clock = Clock::from_ticks(
        g.clone(),
        BTreeMap::from([(s("V"), set(&["t0", "t1"]))]),
        [(s("l"), s("t0"), s("t1")), (s("l"), s("t1"), s("t0"))],
    )
    .expect("valid clock");
    let d = Dynamics::from_arrows(
        g,
        BTreeMap::from([(s("V"), set(&["a", "b"]))]),
        [(s("l"), s("a"), s("b")), (s("l"), s("b"), s("a"))],
    )
    .expect("valid dynamics");
    let datation = BTreeMap::from([(s("a"), s("t1")), (s("b"), s("t0"))]);
    ScannedDynamics::new(d, clock, datation).expect("valid scansion")
}

/// Chain `S0 -> S1 -> S2`, one instant each: `p -> q1 -> r` and `q2 -> r`,
/// where `q2` has no predecessor, so no realization passes through it.
pub fn orphan_state() -> OpenDynamics {
    let g = Graph::new(
        ["S0", "S1", "S2"],
        [Edge::new("e1", "S0", "S1"), Edge::new("e2", "S1", "S2")],
    )
    .expect("valid motor");
    let clock = Clock::from_ticks(
        g.clone(),
        BTreeMap::from([
            (s("S0"), set(&["t0"])),
            (s("S1"), set(&["t1"])),
            (s("S2"), set(&["t2"])),
        ]),
        [(s("e1"), s("t0"), s("t1")), (s("e2"), s("t1"), s("t2"))],
    )
    .expect("valid clock");
    let multi = MultiDynamics::from_arrows(
        g,
        set(&["k"]),
        BTreeMap::from([
            (s("S0"), set(&["p"])),
            (s("S1"), set(&["q1", "q2"])),
            (s("S2"), set(&["r"])),
        ]),
        [
            (s("e1"), s("k"), s("p"), s("q1")),
            (s("e2"), s("k"), s("q1"), s("r")),
            (s("e2"), s("k"), s("q2"), s("r")),
        ],
    )
    .expect("valid multi-dynamics");
    let datation = BTreeMap::from([
        (s("p"), s("t0")),
        (s("q1"), s("t1")),
        (s("q2"), s("t1")),
        (s("r"), s("t2")),
    ]);
    OpenDynamics::new(multi, clock, datation).expect("valid open dynamics")
}
