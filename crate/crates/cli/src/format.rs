//! The `.odf` family description format.
//!
//! Line oriented; `#` starts a comment that runs to the end of the line.
//! Identifiers are whitespace-free tokens. Every reference must point to
//! something defined on an earlier line, except `SYNC` and `SYNCINDEX`, which
//! are resolved once the whole file has been read.
//!
//! ```text
//! FAMILY demo
//! GRAPH g
//! V S T
//! E e S T
//! CLOCK h ON g
//! STATE S t0
//! STATE T t1
//! TRANS e t0 -> t1
//! ODYN A ON g CLOCK h PARAMS u
//! STATE S a
//! STATE T b
//! TRANS e u a -> b
//! DATE a t0
//! DATE b t1
//! COMPONENT 0 USES A
//! SYNCINDEX 0
//! REAL r OF 0 PARAM u
//! t0 a
//! t1 b
//! INTERACT
//! (0:r,u)
//! (0:[t0=a],u)
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use odyn_core::family::{build_interaction, FamilyError};
use odyn_core::graph::{Edge, Graph, GraphMorphism};
use odyn_core::open::{realizations_of, MultiDynamics, OpenDynamics, OpenRealization};
use odyn_core::{Assignment, Clock, ComponentId, DynamicFamily, ParamId, Synchronization};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    Reference,
    Duplicate,
    /// Well-formed and resolved, but rejected by the library.
    Invalid,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParseErrorKind::Syntax => "syntax error",
            ParseErrorKind::Reference => "unresolved reference",
            ParseErrorKind::Duplicate => "duplicate id",
            ParseErrorKind::Invalid => "invalid",
        })
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("line {line}: {kind}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
    pub message: String,
}

fn err<T>(line: usize, kind: ParseErrorKind, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        kind,
        message: message.into(),
    })
}

use ParseErrorKind::{Duplicate, Invalid, Reference, Syntax};

/// One interaction tuple: a realization and a parameter per component.
pub type TupleEntry = BTreeMap<ComponentId, (Assignment, ParamId)>;

/// A parsed family file. Every reference is resolved and every assignment it
/// names is an open realization of its component.
#[derive(Clone, Debug)]
pub struct FamilyDocument {
    pub name: String,
    pub graphs: BTreeMap<String, Graph>,
    pub clocks: BTreeMap<String, Clock>,
    pub dynamics: BTreeMap<String, OpenDynamics>,
    /// Component index to the name of the open dynamics it uses.
    pub components: BTreeMap<ComponentId, String>,
    /// `REAL` handles.
    pub realizations: BTreeMap<String, (ComponentId, OpenRealization)>,
    /// Interaction tuples in file order, duplicates included.
    pub tuples: Vec<TupleEntry>,
    pub family: DynamicFamily,
}

struct Stmt {
    line: usize,
    toks: Vec<String>,
}

fn tokenize(text: &str) -> Vec<Stmt> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let mut toks = Vec::new();
        for tok in raw.split_whitespace() {
            if tok.starts_with('#') {
                break;
            }
            toks.push(tok.to_string());
        }
        if !toks.is_empty() {
            out.push(Stmt { line: n + 1, toks });
        }
    }
    out
}

const TOP_LEVEL: [&str; 9] = [
    "FAMILY",
    "GRAPH",
    "CLOCK",
    "ODYN",
    "COMPONENT",
    "SYNC",
    "SYNCINDEX",
    "REAL",
    "INTERACT",
];

enum Block {
    None,
    Graph {
        line: usize,
        id: String,
        vertices: Vec<String>,
        edges: Vec<Edge>,
    },
    Clock {
        line: usize,
        id: String,
        graph: Graph,
        instants: BTreeMap<String, BTreeSet<String>>,
        ticks: Vec<(String, String, String)>,
    },
    Odyn {
        line: usize,
        id: String,
        graph: Graph,
        clock: Clock,
        params: BTreeSet<String>,
        states: BTreeMap<String, BTreeSet<String>>,
        arrows: Vec<(String, String, String, String)>,
        dates: BTreeMap<String, String>,
    },
    Real {
        line: usize,
        id: String,
        component: ComponentId,
        param: ParamId,
        assignment: Assignment,
    },
    Interact,
}

struct SyncDecl {
    line: usize,
    vmap: Vec<(String, String)>,
    emap: Vec<(String, String)>,
    cmap: Vec<(String, String)>,
}

#[derive(Default)]
struct Defs {
    graphs: BTreeMap<String, Graph>,
    clocks: BTreeMap<String, Clock>,
    dynamics: BTreeMap<String, OpenDynamics>,
    components: BTreeMap<ComponentId, (usize, String)>,
    syncs: BTreeMap<ComponentId, SyncDecl>,
    sync_index: Option<(usize, ComponentId)>,
    realizations: BTreeMap<String, (ComponentId, OpenRealization)>,
    interact_line: Option<usize>,
    tuples: Vec<(usize, TupleEntry)>,
    enumerations: BTreeMap<(ComponentId, ParamId), BTreeSet<Assignment>>,
}

struct Parser {
    family_mode: bool,
    defs: Defs,
    block: Block,
}

fn check_id(line: usize, id: &str) -> Result<(), ParseError> {
    if id == "->" || TOP_LEVEL.contains(&id) {
        return err(line, Syntax, format!("{id} cannot be used as an identifier"));
    }
    Ok(())
}

fn pairs(line: usize, toks: &[String]) -> Result<Vec<(String, String)>, ParseError> {
    toks.iter()
        .map(|t| match t.split_once('=') {
            Some((a, b)) if !a.is_empty() && !b.is_empty() => Ok((a.to_string(), b.to_string())),
            _ => err(line, Syntax, format!("expected <id>=<id>, found {t}")),
        })
        .collect()
}

impl Parser {
    fn new(family_mode: bool) -> Self {
        Parser {
            family_mode,
            defs: Defs::default(),
            block: Block::None,
        }
    }

    fn graph(&self, line: usize, id: &str) -> Result<Graph, ParseError> {
        match self.defs.graphs.get(id) {
            Some(g) => Ok(g.clone()),
            None => err(line, Reference, format!("unknown graph {id}")),
        }
    }

    fn component(&self, line: usize, i: &str) -> Result<&OpenDynamics, ParseError> {
        match self.defs.components.get(i) {
            Some((_, name)) => Ok(&self.defs.dynamics[name]),
            None => err(line, Reference, format!("unknown component {i}")),
        }
    }

    fn realizations(&mut self, line: usize, i: &str, p: &str) -> Result<&BTreeSet<Assignment>, ParseError> {
        let a = self.component(line, i)?;
        if !a.params().contains(p) {
            return err(line, Reference, format!("component {i} has no parameter {p}"));
        }
        let key = (i.to_string(), p.to_string());
        if !self.defs.enumerations.contains_key(&key) {
            let set = realizations_of(a, p).expect("known parameter").into_iter().collect();
            self.defs.enumerations.insert(key.clone(), set);
        }
        Ok(&self.defs.enumerations[&key])
    }

    fn check_realization(&mut self, line: usize, i: &str, p: &str, x: &Assignment) -> Result<(), ParseError> {
        if !self.realizations(line, i, p)?.contains(x) {
            return err(
                line,
                Invalid,
                format!("{x} is not a realization of component {i} under parameter {p}"),
            );
        }
        Ok(())
    }

    fn statement(&mut self, s: &Stmt) -> Result<(), ParseError> {
        let head = s.toks[0].as_str();
        if TOP_LEVEL.contains(&head) {
            self.finish()?;
            return self.top_level(s);
        }
        let line = s.line;
        if let Block::Interact = self.block {
            let tuple = self.tuple(s)?;
            self.defs.tuples.push((line, tuple));
            return Ok(());
        }
        let args = &s.toks[1..];
        match &mut self.block {
            Block::Graph { vertices, edges, .. } => match head {
                "V" => {
                    for v in args {
                        check_id(line, v)?;
                        if vertices.contains(v) {
                            return err(line, Duplicate, format!("vertex {v} declared twice"));
                        }
                        vertices.push(v.clone());
                    }
                }
                "E" => {
                    let [e, src, dst] = args else {
                        return err(line, Syntax, "expected E <edge> <source> <target>");
                    };
                    check_id(line, e)?;
                    if edges.iter().any(|x| &x.id == e) {
                        return err(line, Duplicate, format!("edge {e} declared twice"));
                    }
                    for v in [src, dst] {
                        if !vertices.contains(v) {
                            return err(line, Reference, format!("unknown vertex {v}"));
                        }
                    }
                    edges.push(Edge::new(e.clone(), src.clone(), dst.clone()));
                }
                _ => return err(line, Syntax, format!("unexpected {head} in GRAPH block")),
            },
            Block::Clock {
                graph, instants, ticks, ..
            } => match head {
                "STATE" => {
                    let Some((v, ts)) = args.split_first() else {
                        return err(line, Syntax, "expected STATE <vertex> <instant>...");
                    };
                    if !graph.has_vertex(v) {
                        return err(line, Reference, format!("unknown vertex {v}"));
                    }
                    for t in ts {
                        check_id(line, t)?;
                        if instants.values().any(|set| set.contains(t)) {
                            return err(line, Duplicate, format!("instant {t} declared twice"));
                        }
                        instants.entry(v.clone()).or_default().insert(t.clone());
                    }
                }
                "TRANS" => {
                    let [e, from, arrow, to] = args else {
                        return err(line, Syntax, "expected TRANS <edge> <instant> -> <instant>");
                    };
                    if arrow != "->" {
                        return err(line, Syntax, format!("expected ->, found {arrow}"));
                    }
                    let Some(edge) = graph.edge(e) else {
                        return err(line, Reference, format!("unknown edge {e}"));
                    };
                    for (t, v) in [(from, &edge.dom), (to, &edge.cod)] {
                        if !instants.get(v).is_some_and(|set| set.contains(t)) {
                            return err(line, Reference, format!("unknown instant {t} at vertex {v}"));
                        }
                    }
                    if ticks.iter().any(|(e2, f2, _)| e2 == e && f2 == from) {
                        return err(line, Duplicate, format!("instant {from} already ticks along {e}"));
                    }
                    ticks.push((e.clone(), from.clone(), to.clone()));
                }
                _ => return err(line, Syntax, format!("unexpected {head} in CLOCK block")),
            },
            Block::Odyn {
                graph,
                clock,
                params,
                states,
                arrows,
                dates,
                ..
            } => match head {
                "STATE" => {
                    let Some((v, xs)) = args.split_first() else {
                        return err(line, Syntax, "expected STATE <vertex> <state>...");
                    };
                    if !graph.has_vertex(v) {
                        return err(line, Reference, format!("unknown vertex {v}"));
                    }
                    let set = states.entry(v.clone()).or_default();
                    for x in xs {
                        check_id(line, x)?;
                        if set.contains(x) {
                            return err(line, Duplicate, format!("state {x} declared twice"));
                        }
                        set.insert(x.clone());
                    }
                    let mut seen = BTreeSet::new();
                    for x in states.values().flatten() {
                        if !seen.insert(x) {
                            return err(line, Duplicate, format!("state {x} declared twice"));
                        }
                    }
                }
                "TRANS" => {
                    if args.len() < 5 || args[3] != "->" {
                        return err(line, Syntax, "expected TRANS <edge> <param> <state> -> <state>...");
                    }
                    let (e, p, from) = (&args[0], &args[1], &args[2]);
                    let Some(edge) = graph.edge(e) else {
                        return err(line, Reference, format!("unknown edge {e}"));
                    };
                    if !params.contains(p) {
                        return err(line, Reference, format!("unknown parameter {p}"));
                    }
                    let known = |x: &String, v: &String| states.get(v).is_some_and(|set| set.contains(x));
                    if !known(from, &edge.dom) {
                        return err(line, Reference, format!("unknown state {from} at vertex {}", edge.dom));
                    }
                    for to in &args[4..] {
                        if !known(to, &edge.cod) {
                            return err(line, Reference, format!("unknown state {to} at vertex {}", edge.cod));
                        }
                        arrows.push((e.clone(), p.clone(), from.clone(), to.clone()));
                    }
                }
                "DATE" => {
                    let [x, t] = args else {
                        return err(line, Syntax, "expected DATE <state> <instant>");
                    };
                    if !states.values().any(|set| set.contains(x)) {
                        return err(line, Reference, format!("unknown state {x}"));
                    }
                    if clock.instant_type(t).is_err() {
                        return err(line, Reference, format!("unknown instant {t}"));
                    }
                    if dates.insert(x.clone(), t.clone()).is_some() {
                        return err(line, Duplicate, format!("state {x} dated twice"));
                    }
                }
                _ => return err(line, Syntax, format!("unexpected {head} in ODYN block")),
            },
            Block::Real { assignment, .. } => {
                let [t, x] = s.toks.as_slice() else {
                    return err(line, Syntax, "expected <instant> <state>");
                };
                if assignment.insert(t.clone(), x.clone()).is_some() {
                    return err(line, Duplicate, format!("instant {t} assigned twice"));
                }
            }
            Block::Interact => unreachable!("handled above"),
            Block::None => return err(line, Syntax, format!("unexpected {head} outside of a block")),
        }
        Ok(())
    }

    fn top_level(&mut self, s: &Stmt) -> Result<(), ParseError> {
        let line = s.line;
        let t: Vec<&str> = s.toks.iter().map(String::as_str).collect();
        if !self.family_mode && !matches!(t[0], "GRAPH" | "CLOCK" | "ODYN") {
            return err(line, Syntax, format!("unexpected {} in a dynamics file", t[0]));
        }
        match t.as_slice() {
            ["FAMILY", ..] => return err(line, Duplicate, "second FAMILY header"),
            ["GRAPH", id] => {
                check_id(line, id)?;
                if self.defs.graphs.contains_key(*id) {
                    return err(line, Duplicate, format!("graph {id} defined twice"));
                }
                self.block = Block::Graph {
                    line,
                    id: id.to_string(),
                    vertices: Vec::new(),
                    edges: Vec::new(),
                };
            }
            ["CLOCK", id, "ON", g] => {
                check_id(line, id)?;
                if self.defs.clocks.contains_key(*id) {
                    return err(line, Duplicate, format!("clock {id} defined twice"));
                }
                self.block = Block::Clock {
                    line,
                    id: id.to_string(),
                    graph: self.graph(line, g)?,
                    instants: BTreeMap::new(),
                    ticks: Vec::new(),
                };
            }
            ["ODYN", id, "ON", g, "CLOCK", h, "PARAMS", ps @ ..] => {
                check_id(line, id)?;
                if self.defs.dynamics.contains_key(*id) {
                    return err(line, Duplicate, format!("open dynamics {id} defined twice"));
                }
                let graph = self.graph(line, g)?;
                let Some(clock) = self.defs.clocks.get(*h) else {
                    return err(line, Reference, format!("unknown clock {h}"));
                };
                if clock.motor() != &graph {
                    return err(line, Invalid, format!("clock {h} is not on graph {g}"));
                }
                if ps.is_empty() {
                    return err(line, Syntax, "PARAMS needs at least one parameter");
                }
                let mut params = BTreeSet::new();
                for p in ps {
                    check_id(line, p)?;
                    if !params.insert(p.to_string()) {
                        return err(line, Duplicate, format!("parameter {p} listed twice"));
                    }
                }
                self.block = Block::Odyn {
                    line,
                    id: id.to_string(),
                    graph,
                    clock: clock.clone(),
                    params,
                    states: BTreeMap::new(),
                    arrows: Vec::new(),
                    dates: BTreeMap::new(),
                };
            }
            ["COMPONENT", i, "USES", a] => {
                check_id(line, i)?;
                if !self.defs.dynamics.contains_key(*a) {
                    return err(line, Reference, format!("unknown open dynamics {a}"));
                }
                if self.defs.components.contains_key(*i) {
                    return err(line, Duplicate, format!("component {i} declared twice"));
                }
                self.defs.components.insert(i.to_string(), (line, a.to_string()));
            }
            ["SYNC", i, rest @ ..] => {
                if self.defs.syncs.contains_key(*i) {
                    return err(line, Duplicate, format!("component {i} synchronized twice"));
                }
                let rest: Vec<String> = rest.iter().map(|x| x.to_string()).collect();
                let pos = |k: &str| rest.iter().position(|x| x == k);
                let (Some(v), Some(e), Some(c)) = (pos("VMAP"), pos("EMAP"), pos("CMAP")) else {
                    return err(line, Syntax, "expected SYNC <i> VMAP ... EMAP ... CMAP ...");
                };
                if !(v == 0 && v < e && e < c) {
                    return err(line, Syntax, "expected SYNC <i> VMAP ... EMAP ... CMAP ...");
                }
                let decl = SyncDecl {
                    line,
                    vmap: pairs(line, &rest[v + 1..e])?,
                    emap: pairs(line, &rest[e + 1..c])?,
                    cmap: pairs(line, &rest[c + 1..])?,
                };
                self.defs.syncs.insert(i.to_string(), decl);
            }
            ["SYNCINDEX", i] => {
                if self.defs.sync_index.is_some() {
                    return err(line, Duplicate, "second SYNCINDEX");
                }
                self.defs.sync_index = Some((line, i.to_string()));
            }
            ["REAL", id, "OF", i, "PARAM", p] => {
                check_id(line, id)?;
                if self.defs.realizations.contains_key(*id) {
                    return err(line, Duplicate, format!("realization {id} defined twice"));
                }
                let a = self.component(line, i)?;
                if !a.params().contains(*p) {
                    return err(line, Reference, format!("component {i} has no parameter {p}"));
                }
                self.block = Block::Real {
                    line,
                    id: id.to_string(),
                    component: i.to_string(),
                    param: p.to_string(),
                    assignment: Assignment::new(),
                };
            }
            ["INTERACT"] => {
                if self.defs.interact_line.is_some() {
                    return err(line, Duplicate, "second INTERACT block");
                }
                self.defs.interact_line = Some(line);
                self.block = Block::Interact;
            }
            [head, ..] => return err(line, Syntax, format!("malformed {head} line")),
            [] => unreachable!("statements are nonempty"),
        }
        Ok(())
    }

    fn tuple(&mut self, s: &Stmt) -> Result<TupleEntry, ParseError> {
        let line = s.line;
        let mut out = BTreeMap::new();
        for tok in &s.toks {
            let Some(inner) = tok.strip_prefix('(').and_then(|x| x.strip_suffix(')')) else {
                return err(
                    line,
                    Syntax,
                    format!("expected (<i>:<realization>,<param>), found {tok}"),
                );
            };
            let Some((i, rest)) = inner.split_once(':') else {
                return err(
                    line,
                    Syntax,
                    format!("expected (<i>:<realization>,<param>), found {tok}"),
                );
            };
            let a = self.component(line, i)?;
            // Parameter ids may contain commas, so match them as suffixes.
            let Some(p) = a
                .params()
                .iter()
                .filter(|p| {
                    rest.len() > p.len() && rest.ends_with(p.as_str()) && rest[..rest.len() - p.len()].ends_with(',')
                })
                .max_by_key(|p| p.len())
                .cloned()
            else {
                let shown = rest.rsplit_once(',').map_or(rest, |(_, p)| p);
                return err(line, Reference, format!("component {i} has no parameter {shown}"));
            };
            let body = &rest[..rest.len() - p.len() - 1];
            let x = if let Some(lit) = body.strip_prefix('[') {
                let Some(lit) = lit.strip_suffix(']') else {
                    return err(line, Syntax, format!("unterminated assignment literal {body}"));
                };
                let items: Vec<String> = lit.split(',').filter(|x| !x.is_empty()).map(str::to_string).collect();
                let mut x = Assignment::new();
                for (t, st) in pairs(line, &items)? {
                    if x.insert(t.clone(), st).is_some() {
                        return err(line, Duplicate, format!("instant {t} assigned twice"));
                    }
                }
                x
            } else {
                match self.defs.realizations.get(body) {
                    Some((j, r)) if j == i => r.assignment.clone(),
                    Some((j, _)) => {
                        return err(
                            line,
                            Reference,
                            format!("realization {body} belongs to component {j}, not {i}"),
                        )
                    }
                    None => return err(line, Reference, format!("unknown realization {body}")),
                }
            };
            self.check_realization(line, i, &p, &x)?;
            if out.insert(i.to_string(), (x, p)).is_some() {
                return err(line, Duplicate, format!("component {i} appears twice in a tuple"));
            }
        }
        if let Some(k) = self.defs.components.keys().find(|k| !out.contains_key(*k)) {
            return err(line, Syntax, format!("tuple does not cover component {k}"));
        }
        Ok(out)
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        match std::mem::replace(&mut self.block, Block::None) {
            Block::None | Block::Interact => {}
            Block::Graph {
                line,
                id,
                vertices,
                edges,
            } => {
                let g = Graph::new(vertices, edges).or_else(|e| err(line, Invalid, e.to_string()))?;
                self.defs.graphs.insert(id, g);
            }
            Block::Clock {
                line,
                id,
                graph,
                instants,
                ticks,
            } => {
                let h = Clock::from_ticks(graph, instants, ticks).or_else(|e| err(line, Invalid, e.to_string()))?;
                self.defs.clocks.insert(id, h);
            }
            Block::Odyn {
                line,
                id,
                graph,
                clock,
                params,
                states,
                arrows,
                dates,
            } => {
                let multi = MultiDynamics::from_arrows(graph, params, states, arrows)
                    .or_else(|e| err(line, Invalid, e.to_string()))?;
                let a = OpenDynamics::new(multi, clock, dates).or_else(|e| err(line, Invalid, e.to_string()))?;
                self.defs.dynamics.insert(id, a);
            }
            Block::Real {
                line,
                id,
                component,
                param,
                assignment,
            } => {
                let a = self.component(line, &component)?;
                for (t, x) in assignment.iter() {
                    if a.clock().instant_type(t).is_err() {
                        return err(line, Reference, format!("unknown instant {t}"));
                    }
                    if a.multi().state_type(x).is_err() {
                        return err(line, Reference, format!("unknown state {x}"));
                    }
                }
                self.check_realization(line, &component, &param, &assignment)?;
                let r = OpenRealization { param, assignment };
                self.defs.realizations.insert(id, (component, r));
            }
        }
        Ok(())
    }

    fn synchronizations(&self, sync: &str) -> Result<BTreeMap<ComponentId, Synchronization>, ParseError> {
        let src = &self.defs.dynamics[&self.defs.components[sync].1];
        let mut out = BTreeMap::new();
        for (i, decl) in &self.defs.syncs {
            let line = decl.line;
            let Some((_, name)) = self.defs.components.get(i) else {
                return err(line, Reference, format!("unknown component {i}"));
            };
            if i == sync {
                return err(line, Invalid, format!("component {i} is the synchronizer"));
            }
            let tgt = &self.defs.dynamics[name];
            let mut vmap = BTreeMap::new();
            for (v, w) in &decl.vmap {
                if !src.motor().has_vertex(v) || !tgt.motor().has_vertex(w) {
                    return err(line, Reference, format!("unknown vertex in {v}={w}"));
                }
                if vmap.insert(v.clone(), w.clone()).is_some() {
                    return err(line, Duplicate, format!("vertex {v} mapped twice"));
                }
            }
            let mut emap = BTreeMap::new();
            for (e, f) in &decl.emap {
                if src.motor().edge(e).is_none() || tgt.motor().edge(f).is_none() {
                    return err(line, Reference, format!("unknown edge in {e}={f}"));
                }
                if emap.insert(e.clone(), f.clone()).is_some() {
                    return err(line, Duplicate, format!("edge {e} mapped twice"));
                }
            }
            let mut cmap = BTreeMap::new();
            for (t, u) in &decl.cmap {
                if src.clock().instant_type(t).is_err() || tgt.clock().instant_type(u).is_err() {
                    return err(line, Reference, format!("unknown instant in {t}={u}"));
                }
                if cmap.insert(t.clone(), u.clone()).is_some() {
                    return err(line, Duplicate, format!("instant {t} mapped twice"));
                }
            }
            let s = Synchronization::from_instant_map(GraphMorphism::new(vmap, emap), src.clock(), tgt.clock(), &cmap)
                .or_else(|e| err(line, Invalid, e.to_string()))?;
            let diags = s.validate(src.clock(), tgt.clock());
            if !diags.is_empty() {
                let msg: Vec<String> = diags.iter().map(ToString::to_string).collect();
                return err(line, Invalid, format!("invalid synchronization: {}", msg.join("; ")));
            }
            out.insert(i.clone(), s);
        }
        Ok(out)
    }

    fn family(&self, name: String, last_line: usize) -> Result<FamilyDocument, ParseError> {
        let d = &self.defs;
        if d.components.is_empty() {
            return err(last_line, Syntax, "no COMPONENT declared");
        }
        let sync = match &d.sync_index {
            Some((line, i)) if !d.components.contains_key(i) => {
                return err(*line, Reference, format!("unknown component {i}"))
            }
            Some((_, i)) => i.clone(),
            None if d.components.len() == 1 => d.components.keys().next().expect("nonempty").clone(),
            None => return err(last_line, Syntax, "missing SYNCINDEX"),
        };
        let synchronizations = self.synchronizations(&sync)?;
        if let Some((i, (line, _))) = d
            .components
            .iter()
            .find(|(i, _)| **i != sync && !synchronizations.contains_key(*i))
        {
            return err(*line, Reference, format!("component {i} has no SYNC line"));
        }
        let Some(interact) = d.interact_line else {
            return err(last_line, Syntax, "missing INTERACT block");
        };
        if d.tuples.is_empty() {
            return err(interact, Syntax, "INTERACT block has no tuple");
        }
        let components: BTreeMap<ComponentId, OpenDynamics> = d
            .components
            .iter()
            .map(|(i, (_, a))| (i.clone(), d.dynamics[a].clone()))
            .collect();
        let tuples: Vec<_> = d.tuples.iter().map(|(_, t)| t.clone()).collect();
        let r = build_interaction(&components, tuples.clone()).or_else(|e| err(interact, Invalid, e.to_string()))?;
        let family = DynamicFamily::new(sync, components, r, synchronizations).or_else(|e| {
            let line = match &e {
                FamilyError::InvalidSynchronization { component, .. } => d.syncs[component].line,
                _ => interact,
            };
            err(line, Invalid, e.to_string())
        })?;
        Ok(FamilyDocument {
            name,
            graphs: d.graphs.clone(),
            clocks: d.clocks.clone(),
            dynamics: d.dynamics.clone(),
            components: d.components.iter().map(|(i, (_, a))| (i.clone(), a.clone())).collect(),
            realizations: d.realizations.clone(),
            tuples,
            family,
        })
    }
}

/// Parses a family file, stopping at the first error.
pub fn parse_family(text: &str) -> Result<FamilyDocument, ParseError> {
    let stmts = tokenize(text);
    let name = match stmts.first() {
        Some(Stmt { toks, .. }) if toks[0] == "FAMILY" && toks.len() == 2 => toks[1].clone(),
        Some(Stmt { toks, line }) if toks[0] == "FAMILY" => return err(*line, Syntax, "expected FAMILY <name>"),
        Some(Stmt { line, .. }) => return err(*line, Syntax, "missing FAMILY header"),
        None => return err(1, Syntax, "missing FAMILY header"),
    };
    let mut p = Parser::new(true);
    for s in &stmts[1..] {
        p.statement(s)?;
    }
    p.finish()?;
    let last_line = text.lines().count().max(1);
    p.family(name, last_line)
}

/// Parses a file holding exactly one `ODYN` block and the graph and clock it
/// uses, as written by [`serialize_open_dynamics`].
pub fn parse_open_dynamics(text: &str) -> Result<(String, OpenDynamics), ParseError> {
    let mut p = Parser::new(false);
    for s in &tokenize(text) {
        p.statement(s)?;
    }
    p.finish()?;
    let last_line = text.lines().count().max(1);
    let mut found = p.defs.dynamics.into_iter();
    match (found.next(), found.next()) {
        (Some(a), None) => Ok(a),
        (None, _) => err(last_line, Syntax, "no ODYN block"),
        (Some(_), Some(_)) => err(last_line, Syntax, "more than one ODYN block"),
    }
}

/// Canonical text of an open dynamics under `name`, with its motor as graph
/// `g` and its clock as clock `h`. Vertices, edges, states, parameters and
/// arrows are sorted; lines without content are omitted.
pub fn serialize_open_dynamics(a: &OpenDynamics, name: &str) -> String {
    let mut out = String::new();
    let g = a.motor();
    out.push_str("GRAPH g\n");
    if !g.vertices().is_empty() {
        let vs: Vec<&str> = g.vertices().iter().map(String::as_str).collect();
        writeln!(out, "V {}", vs.join(" ")).expect("write to string");
    }
    for e in g.edges() {
        writeln!(out, "E {} {} {}", e.id, e.dom, e.cod).expect("write to string");
    }
    out.push_str("CLOCK h ON g\n");
    let h = a.clock();
    for (v, ts) in h.dynamics().state_sets() {
        if !ts.is_empty() {
            let ts: Vec<&str> = ts.iter().map(String::as_str).collect();
            writeln!(out, "STATE {v} {}", ts.join(" ")).expect("write to string");
        }
    }
    for e in g.edges() {
        for t in h.instants(&e.dom) {
            if let Some(u) = h.next(&e.id, t) {
                writeln!(out, "TRANS {} {t} -> {u}", e.id).expect("write to string");
            }
        }
    }
    let ps: Vec<&str> = a.params().iter().map(String::as_str).collect();
    writeln!(out, "ODYN {name} ON g CLOCK h PARAMS {}", ps.join(" ")).expect("write to string");
    for (v, xs) in a.multi().state_sets() {
        if !xs.is_empty() {
            let xs: Vec<&str> = xs.iter().map(String::as_str).collect();
            writeln!(out, "STATE {v} {}", xs.join(" ")).expect("write to string");
        }
    }
    for e in g.edges() {
        let fam = a.multi().family(&e.id).expect("every edge has a family");
        for (p, t) in fam.iter() {
            for (x, img) in t.images() {
                if !img.is_empty() {
                    let img: Vec<&str> = img.iter().map(String::as_str).collect();
                    writeln!(out, "TRANS {} {p} {x} -> {}", e.id, img.join(" ")).expect("write to string");
                }
            }
        }
    }
    for (x, t) in a.datation() {
        writeln!(out, "DATE {x} {t}").expect("write to string");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
FAMILY small
GRAPH g   # one edge
V S T
E e S T
CLOCK h ON g
STATE S t0
STATE T t1
TRANS e t0 -> t1
ODYN A ON g CLOCK h PARAMS u
STATE S a
STATE T b
TRANS e u a -> b
DATE a t0
DATE b t1
COMPONENT 0 USES A
REAL r OF 0 PARAM u
t0 a
t1 b
INTERACT
(0:r,u)
(0:[t0=a],u)
";

    #[test]
    fn parses_a_single_component_family() {
        let doc = parse_family(SMALL).unwrap();
        assert_eq!(doc.name, "small");
        assert_eq!(doc.family.sync(), "0");
        assert_eq!(doc.tuples.len(), 2);
        assert_eq!(doc.family.interaction().graph().len(), 2);
        assert_eq!(doc.realizations["r"].1.to_string(), "([t0=a,t1=b],u)");
    }

    #[test]
    fn empty_file_lacks_header() {
        let e = parse_family("").unwrap_err();
        assert_eq!((e.line, e.kind), (1, Syntax));
        assert!(e.message.contains("missing FAMILY header"));
        let e = parse_family("# only a comment\nGRAPH g\n").unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn unknown_state_is_reported_with_its_line() {
        let text = SMALL.replace("TRANS e u a -> b", "TRANS e u a -> q");
        let e = parse_family(&text).unwrap_err();
        assert_eq!((e.line, e.kind), (12, Reference));
        assert!(e.message.contains("unknown state q"));
    }

    #[test]
    fn duplicates_are_rejected() {
        let text = SMALL.replace("V S T", "V S T S");
        assert_eq!(parse_family(&text).unwrap_err().kind, Duplicate);
        let text = SMALL.replace("COMPONENT 0 USES A", "COMPONENT 0 USES A\nCOMPONENT 0 USES A");
        let e = parse_family(&text).unwrap_err();
        assert_eq!((e.line, e.kind), (16, Duplicate));
    }

    #[test]
    fn non_realizations_are_rejected() {
        let text = SMALL.replace("t1 b\n", "");
        assert!(parse_family(&text).is_ok());
        let text = SMALL.replace("t0 a\n", "");
        let e = parse_family(&text).unwrap_err();
        assert_eq!((e.line, e.kind), (16, Invalid));
        let text = SMALL.replace("(0:[t0=a],u)", "(0:[t1=a],u)");
        let e = parse_family(&text).unwrap_err();
        assert_eq!((e.line, e.kind), (21, Invalid));
    }

    #[test]
    fn empty_real_body_is_the_empty_realization() {
        let text = SMALL.replace("t0 a\nt1 b\n", "");
        let doc = parse_family(&text).unwrap();
        assert!(doc.realizations["r"].1.assignment.is_empty());
    }

    #[test]
    fn body_lines_outside_blocks_are_syntax_errors() {
        let text = SMALL.replace("COMPONENT 0 USES A", "COMPONENT 0 USES A\nV X");
        let e = parse_family(&text).unwrap_err();
        assert_eq!((e.line, e.kind), (16, Syntax));
    }

    #[test]
    fn misdated_dynamics_are_invalid() {
        let text = SMALL.replace("DATE b t1", "DATE b t0");
        let e = parse_family(&text).unwrap_err();
        assert_eq!((e.line, e.kind), (9, Invalid));
        let text = SMALL.replace("DATE a t0", "DATE a t9");
        let e = parse_family(&text).unwrap_err();
        assert_eq!((e.line, e.kind), (13, Reference));
    }

    #[test]
    fn serialization_round_trips() {
        let doc = parse_family(SMALL).unwrap();
        let a = &doc.dynamics["A"];
        let text = serialize_open_dynamics(a, "A");
        let (name, back) = parse_open_dynamics(&text).unwrap();
        assert_eq!(name, "A");
        assert_eq!(&back, a);
        assert_eq!(serialize_open_dynamics(&back, "A"), text);
    }

    #[test]
    fn empty_dynamics_serialize_to_headers() {
        let g = Graph::new(Vec::<String>::new(), []).unwrap();
        let h = Clock::from_ticks(g.clone(), BTreeMap::new(), []).unwrap();
        let multi = MultiDynamics::new(g, BTreeSet::from(["p".to_string()]), BTreeMap::new(), BTreeMap::new()).unwrap();
        let a = OpenDynamics::new(multi, h, BTreeMap::new()).unwrap();
        let text = serialize_open_dynamics(&a, "E");
        assert_eq!(text, "GRAPH g\nCLOCK h ON g\nODYN E ON g CLOCK h PARAMS p\n");
        assert_eq!(parse_open_dynamics(&text).unwrap().1, a);
    }
}
