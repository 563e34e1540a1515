//! Exhaustive evaluators written straight from the definitions.

use std::collections::{BTreeMap, BTreeSet};

use odyn_core::dynamics::{Clock, Dynamics, ScannedDynamics};
use odyn_core::family::{Interaction, ParamTuple, StateTuple};
use odyn_core::{Assignment, ComponentId, DynamicFamily, OpenDynamics, ParamId, StateId, VertexId};

/// Every partial map from `keys` into `values`.
pub fn partial_maps(keys: &[String], values: &[String]) -> Vec<BTreeMap<String, String>> {
    let mut acc = vec![BTreeMap::new()];
    for k in keys {
        let mut next = Vec::with_capacity(acc.len() * (values.len() + 1));
        for m in &acc {
            next.push(m.clone());
            for v in values {
                let mut m = m.clone();
                m.insert(k.clone(), v.clone());
                next.push(m);
            }
        }
        acc = next;
    }
    acc
}

fn vertex_of<'a>(d: &'a Dynamics, s: &str) -> Option<&'a VertexId> {
    d.state_sets().iter().find(|(_, set)| set.contains(s)).map(|(v, _)| v)
}

/// `x` seen as a per-vertex transition family `S^h ⇝ S^α` is a dynamorphism
/// `h → α` with identity graph part: every component is typed and
/// `x_T ⊙ e^h ⊂ e^α ⊙ x_S` holds on every edge.
pub fn is_realization_by_definition(h: &Clock, d: &Dynamics, x: &BTreeMap<String, String>) -> bool {
    let hd = h.dynamics();
    for (t, st) in x {
        if vertex_of(hd, t).is_none() || vertex_of(hd, t) != vertex_of(d, st) {
            return false;
        }
    }
    for e in hd.motor().edges() {
        let eh = hd.transition(&e.id).expect("clock edge");
        let ea = d.transition(&e.id).expect("dynamics edge");
        for t in hd.states(&e.dom) {
            let lhs: BTreeSet<&String> = eh.apply(t).iter().filter_map(|t2| x.get(t2)).collect();
            let rhs: BTreeSet<&String> = x.get(t).into_iter().flat_map(|st| ea.apply(st)).collect();
            if !lhs.is_subset(&rhs) {
                return false;
            }
        }
    }
    true
}

/// Filters all partial maps `st(h) ⇀ st(α)`.
pub fn realizations(h: &Clock, d: &Dynamics) -> BTreeSet<Assignment> {
    let instants: Vec<String> = h.dynamics().state_sets().values().flatten().cloned().collect();
    let states: Vec<String> = d.state_sets().values().flatten().cloned().collect();
    partial_maps(&instants, &states)
        .into_iter()
        .filter(|x| is_realization_by_definition(h, d, x))
        .map(|x| x.into_iter().collect())
        .collect()
}

/// Realizations with `τ(x(t)) = t`.
pub fn scanned_realizations(a: &ScannedDynamics) -> BTreeSet<Assignment> {
    realizations(a.clock(), a.dynamics())
        .into_iter()
        .filter(|x| x.iter().all(|(t, st)| a.datation().get(st) == Some(t)))
        .collect()
}

/// `S_(A,λ)` for every `λ`.
pub fn open_realizations(a: &OpenDynamics) -> BTreeMap<ParamId, BTreeSet<Assignment>> {
    a.params()
        .iter()
        .map(|p| {
            let slice = a.multi().slice(p).expect("own param");
            let set = realizations(a.clock(), slice)
                .into_iter()
                .filter(|x| x.iter().all(|(t, st)| a.datation().get(st) == Some(t)))
                .collect();
            (p.clone(), set)
        })
        .collect()
}

/// A doubled-index slot value: `(i, 0)` holds a realization, `(i, 1)` a parameter.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Half {
    In(Assignment),
    Out(ParamId),
}

pub type Doubled = BTreeMap<(ComponentId, u8), Half>;

/// The graph of `rd(R)`.
pub fn rd_graph(r: &Interaction) -> Vec<Doubled> {
    r.graph()
        .iter()
        .map(|t| {
            let mut m = Doubled::new();
            for (i, (a, p)) in t {
                m.insert((i.clone(), 0), Half::In(a.clone()));
                m.insert((i.clone(), 1), Half::Out(p.clone()));
            }
            m
        })
        .collect()
}

/// `p` is the restriction of some element of `rd`.
pub fn compatible(rd: &[Doubled], p: &Doubled) -> bool {
    rd.iter().any(|t| p.iter().all(|(k, v)| t.get(k) == Some(v)))
}

/// Every family in `Π_i choices[i]`, as a doubled partial assignment on `side`.
fn products(choices: &[(ComponentId, Vec<Half>)], side: u8) -> Vec<Doubled> {
    let mut acc = vec![Doubled::new()];
    for (i, vals) in choices {
        acc = acc
            .into_iter()
            .flat_map(|m| {
                vals.iter().map(move |v| {
                    let mut m = m.clone();
                    m.insert((i.clone(), side), v.clone());
                    m
                })
            })
            .collect();
    }
    acc
}

fn join(a: &Doubled, b: &Doubled) -> Doubled {
    let mut m = a.clone();
    m.extend(b.iter().map(|(k, v)| (k.clone(), v.clone())));
    m
}

fn contexts(r: &Interaction) -> (BTreeMap<ComponentId, Vec<Half>>, BTreeMap<ComponentId, Vec<Half>>) {
    let ins = r
        .in_contexts()
        .iter()
        .map(|(i, c)| (i.clone(), c.iter().cloned().map(Half::In).collect()))
        .collect();
    let outs = r
        .out_contexts()
        .iter()
        .map(|(i, c)| (i.clone(), c.iter().cloned().map(Half::Out).collect()))
        .collect();
    (ins, outs)
}

/// `N^f_k`: `l` is R-compatible and for every `𝔞 ∈ Π_{i≠k} S_{A_i}` and every
/// `λ ∈ L_k`, `𝔞 + l` and `𝔞 + λ` compatible imply `l = λ`.
pub fn functional_heaps(r: &Interaction) -> BTreeMap<ComponentId, BTreeSet<ParamId>> {
    let rd = rd_graph(r);
    let (ins, outs) = contexts(r);
    let mut out = BTreeMap::new();
    for k in ins.keys() {
        let rest: Vec<_> = ins
            .iter()
            .filter(|(i, _)| *i != k)
            .map(|(i, c)| (i.clone(), c.clone()))
            .collect();
        let others = products(&rest, 0);
        let mut heap = BTreeSet::new();
        for l in &outs[k] {
            let Half::Out(lid) = l else { unreachable!() };
            let single = Doubled::from([((k.clone(), 1), l.clone())]);
            if !compatible(&rd, &single) {
                continue;
            }
            let holds = others.iter().all(|a| {
                outs[k].iter().all(|lam| {
                    let with_l = join(a, &single);
                    let with_lam = join(a, &Doubled::from([((k.clone(), 1), lam.clone())]));
                    !(compatible(&rd, &with_l) && compatible(&rd, &with_lam)) || l == lam
                })
            });
            if holds {
                heap.insert(lid.clone());
            }
        }
        out.insert(k.clone(), heap);
    }
    out
}

/// `N^s_k`: R-compatible `λ` that are not free, where `λ` is free when for
/// every `𝔞_k`, every `μ ∈ Π_{j≠k} L_j` and every `𝔟 ∈ Π_{j≠k} S_{A_j}`,
/// `λ + 𝔞_k + μ` and `μ + 𝔟` compatible imply `λ + μ + 𝔞_k + 𝔟` compatible.
pub fn flexible_heaps(r: &Interaction) -> BTreeMap<ComponentId, BTreeSet<ParamId>> {
    let rd = rd_graph(r);
    let (ins, outs) = contexts(r);
    let mut out = BTreeMap::new();
    for k in ins.keys() {
        let rest_in: Vec<_> = ins
            .iter()
            .filter(|(i, _)| *i != k)
            .map(|(i, c)| (i.clone(), c.clone()))
            .collect();
        let rest_out: Vec<_> = outs
            .iter()
            .filter(|(i, _)| *i != k)
            .map(|(i, c)| (i.clone(), c.clone()))
            .collect();
        let bs = products(&rest_in, 0);
        let mus = products(&rest_out, 1);
        let mut heap = BTreeSet::new();
        for lam in &outs[k] {
            let Half::Out(lid) = lam else { unreachable!() };
            let single = Doubled::from([((k.clone(), 1), lam.clone())]);
            if !compatible(&rd, &single) {
                continue;
            }
            let free = ins[k].iter().all(|ak| {
                let base = join(&single, &Doubled::from([((k.clone(), 0), ak.clone())]));
                mus.iter().all(|mu| {
                    let left = join(&base, mu);
                    if !compatible(&rd, &left) {
                        return true;
                    }
                    bs.iter()
                        .all(|b| !compatible(&rd, &join(mu, b)) || compatible(&rd, &join(&left, b)))
                })
            });
            if !free {
                heap.insert(lid.clone());
            }
        }
        out.insert(k.clone(), heap);
    }
    out
}

/// Non-splittable subsets found by trying every ordered bipartition, with
/// projections and products recomputed from scratch.
pub fn connective_structure<S, V>(index: &[S], graph: &[BTreeMap<S, V>], include_empty: bool) -> Vec<BTreeSet<S>>
where
    S: Ord + Clone,
    V: Ord + Clone,
{
    let project = |j: &BTreeSet<S>| -> BTreeSet<BTreeMap<S, V>> {
        graph
            .iter()
            .map(|t| {
                t.iter()
                    .filter(|(s, _)| j.contains(*s))
                    .map(|(s, v)| (s.clone(), v.clone()))
                    .collect()
            })
            .collect()
    };
    let n = index.len();
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let j: BTreeSet<S> = (0..n)
            .filter(|b| mask & (1 << b) != 0)
            .map(|b| index[b].clone())
            .collect();
        if j.is_empty() {
            if include_empty {
                out.push(j);
            }
            continue;
        }
        let whole = project(&j);
        let mut splits = false;
        for sub in 0u32..(1 << n) {
            if sub & !mask != 0 || sub == 0 || sub == mask {
                continue;
            }
            let k: BTreeSet<S> = (0..n)
                .filter(|b| sub & (1 << b) != 0)
                .map(|b| index[b].clone())
                .collect();
            let l: BTreeSet<S> = j.difference(&k).cloned().collect();
            let mut product = BTreeSet::new();
            for x in project(&k) {
                for y in project(&l) {
                    let mut t = x.clone();
                    t.extend(y);
                    product.insert(t);
                }
            }
            if product == whole {
                splits = true;
                break;
            }
        }
        if !splits {
            out.push(j);
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.iter().cmp(b.iter())));
    out
}

/// `[F]_p` evaluated literally over all tuples of states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectPrimo {
    pub states: BTreeMap<VertexId, BTreeSet<BTreeMap<ComponentId, StateId>>>,
    pub params: BTreeSet<BTreeMap<ComponentId, ParamId>>,
    /// `(edge, μ) ↦ {(a, b)}`.
    pub steps: BTreeMap<(String, ParamTuple), BTreeSet<(StateTuple, StateTuple)>>,
}

fn succeeds_any(h: &Clock, s: &str, t: &str) -> bool {
    h.dynamics()
        .transitions()
        .values()
        .any(|tr| tr.apply(s).iter().any(|x| x == t))
}

pub fn primo(f: &DynamicFamily, strict_edge: bool) -> DirectPrimo {
    let sync = f.sync().clone();
    let a0 = f.component(&sync).expect("synchronizer");
    let g = a0.motor();
    let index: Vec<ComponentId> = f.index().cloned().collect();

    let delta_v = |i: &str, v: &str| -> String {
        f.synchronization(i)
            .map_or(v.to_string(), |s| s.graph_part.vertex_map[v].clone())
    };
    let delta_e = |i: &str, e: &str| -> String {
        f.synchronization(i)
            .map_or(e.to_string(), |s| s.graph_part.edge_map[e].clone())
    };
    let delta_t = |i: &str, v: &str, t: &str| -> Option<String> {
        match f.synchronization(i) {
            None => Some(t.to_string()),
            Some(s) => s.clock_part[v].apply(t).iter().next().cloned(),
        }
    };
    let date = |i: &str, st: &str| -> String { f.component(i).unwrap().datation()[st].clone() };

    // all tuples over Π_i st(A_i), then keep the well-typed synchronized ones
    let mut all: Vec<BTreeMap<ComponentId, StateId>> = vec![BTreeMap::new()];
    for i in &index {
        let st: Vec<String> = f.component(i).unwrap().multi().all_states().into_iter().collect();
        all = all
            .into_iter()
            .flat_map(|t| {
                st.iter().map(move |x| {
                    let mut t = t.clone();
                    t.insert(i.clone(), x.clone());
                    t
                })
            })
            .collect();
    }
    let mut states: BTreeMap<VertexId, BTreeSet<_>> =
        g.vertices().iter().map(|v| (v.clone(), BTreeSet::new())).collect();
    for t in all {
        for v in g.vertices() {
            let ok = index.iter().all(|i| {
                let ai = f.component(i).unwrap();
                ai.multi().states(&delta_v(i, v)).contains(&t[i])
                    && delta_t(i, v, &date(&sync, &t[&sync])).as_deref() == Some(date(i, &t[i]).as_str())
            });
            if ok {
                states.get_mut(v).unwrap().insert(t.clone());
            }
        }
    }

    let r = f.interaction();
    let params: BTreeSet<BTreeMap<ComponentId, ParamId>> = r
        .graph()
        .iter()
        .map(|t| t.iter().map(|(i, (_, p))| (i.clone(), p.clone())).collect())
        .collect();

    let passes = |i: &str, x: &Assignment, st: &str| x.get(&date(i, st)).map(String::as_str) == Some(st);
    let mut steps = BTreeMap::new();
    for e in g.edges() {
        for mu in &params {
            let pre: Vec<BTreeMap<ComponentId, Assignment>> = r
                .graph()
                .iter()
                .filter(|t| t.iter().all(|(i, (_, p))| mu[i] == *p))
                .map(|t| t.iter().map(|(i, (x, _))| (i.clone(), x.clone())).collect())
                .collect();
            let mut set = BTreeSet::new();
            for a in &states[&e.dom] {
                for b in &states[&e.cod] {
                    let expected = a0
                        .clock()
                        .dynamics()
                        .transition(&e.id)
                        .unwrap()
                        .apply(&date(&sync, &a[&sync]))
                        .clone();
                    if !expected.contains(&date(&sync, &b[&sync])) {
                        continue;
                    }
                    let ok = pre.iter().any(|x| {
                        index.iter().all(|i| {
                            let hi = f.component(i).unwrap().clock();
                            let (ta, tb) = (date(i, &a[i]), date(i, &b[i]));
                            let succ = if strict_edge {
                                hi.dynamics()
                                    .transition(&delta_e(i, &e.id))
                                    .is_some_and(|tr| tr.apply(&ta).contains(&tb))
                            } else {
                                succeeds_any(hi, &ta, &tb)
                            };
                            succ && passes(i, &x[i], &a[i]) && passes(i, &x[i], &b[i])
                        })
                    });
                    if ok {
                        set.insert((a.clone(), b.clone()));
                    }
                }
            }
            steps.insert((e.id.clone(), mu.clone()), set);
        }
    }
    DirectPrimo { states, params, steps }
}

/// Reads a generated dynamics back into tuple form for comparison with [`primo`].
pub fn reshape(p: &odyn_core::family::PrimoGenerated) -> DirectPrimo {
    let d = &p.dynamics;
    let states = d
        .multi()
        .state_sets()
        .iter()
        .map(|(v, ids)| (v.clone(), ids.iter().map(|id| p.states[id].clone()).collect()))
        .collect();
    let params = p.params.values().cloned().collect();
    let mut steps = BTreeMap::new();
    for e in d.motor().edges() {
        for (pid, mu) in &p.params {
            let t = d.multi().transition(&e.id, pid).expect("generated transition");
            let set = t
                .images()
                .flat_map(|(a, img)| img.iter().map(move |b| (p.states[a].clone(), p.states[b].clone())))
                .collect();
            steps.insert((e.id.clone(), mu.clone()), set);
        }
    }
    DirectPrimo { states, params, steps }
}
