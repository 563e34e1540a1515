//! Finite directed multigraphs (motors) and graph morphisms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::{EdgeId, VertexId};

/// An edge `id: dom -> cod`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub id: EdgeId,
    pub dom: VertexId,
    pub cod: VertexId,
}

impl Edge {
    pub fn new(id: impl Into<EdgeId>, dom: impl Into<VertexId>, cod: impl Into<VertexId>) -> Self {
        Edge {
            id: id.into(),
            dom: dom.into(),
            cod: cod.into(),
        }
    }
}

/// A finite directed multigraph. Loops and parallel edges are allowed, the
/// empty graph too.
///
/// The raw parts are kept as given so that [`Graph::validate`] can report
/// what is wrong with them; edges are stored sorted by id.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Graph {
    vertices: BTreeSet<VertexId>,
    edges: Vec<Edge>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphDiagnostic {
    DuplicateEdge(EdgeId),
    DanglingEndpoint { edge: EdgeId, vertex: VertexId },
}

impl fmt::Display for GraphDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphDiagnostic::DuplicateEdge(e) => write!(f, "duplicate-edge {e}"),
            GraphDiagnostic::DanglingEndpoint { edge, vertex } => {
                write!(f, "dangling-endpoint {edge} (unknown vertex {vertex})")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MorphismDiagnostic {
    UnmappedVertex(VertexId),
    UnmappedEdge(EdgeId),
    UnknownTargetVertex { vertex: VertexId, image: VertexId },
    UnknownTargetEdge { edge: EdgeId, image: EdgeId },
    Incoherent(EdgeId),
}

impl fmt::Display for MorphismDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MorphismDiagnostic::UnmappedVertex(v) => write!(f, "unmapped-vertex {v}"),
            MorphismDiagnostic::UnmappedEdge(e) => write!(f, "unmapped-edge {e}"),
            MorphismDiagnostic::UnknownTargetVertex { vertex, image } => {
                write!(f, "unknown-target-vertex {vertex}={image}")
            }
            MorphismDiagnostic::UnknownTargetEdge { edge, image } => {
                write!(f, "unknown-target-edge {edge}={image}")
            }
            MorphismDiagnostic::Incoherent(e) => write!(f, "incoherent {e}"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("invalid graph: {}", join_diags(.0))]
    InvalidGraph(Vec<GraphDiagnostic>),
    #[error("invalid graph morphism: {}", join_diags(.0))]
    InvalidMorphism(Vec<MorphismDiagnostic>),
    #[error("morphisms are not composable")]
    NotComposable,
}

pub(crate) fn join_diags<D: fmt::Display>(diags: &[D]) -> String {
    diags.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

impl Graph {
    /// Builds a graph from raw parts without checking it.
    pub fn from_parts<V, E>(vertices: V, edges: E) -> Self
    where
        V: IntoIterator,
        V::Item: Into<VertexId>,
        E: IntoIterator<Item = Edge>,
    {
        let mut edges: Vec<Edge> = edges.into_iter().collect();
        edges.sort();
        Graph {
            vertices: vertices.into_iter().map(Into::into).collect(),
            edges,
        }
    }

    /// Builds a graph and rejects it unless [`Graph::validate`] is clean.
    pub fn new<V, E>(vertices: V, edges: E) -> Result<Self, GraphError>
    where
        V: IntoIterator,
        V::Item: Into<VertexId>,
        E: IntoIterator<Item = Edge>,
    {
        let g = Self::from_parts(vertices, edges);
        let diags = g.validate();
        if diags.is_empty() {
            Ok(g)
        } else {
            Err(GraphError::InvalidGraph(diags))
        }
    }

    pub fn vertices(&self) -> &BTreeSet<VertexId> {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: &str) -> Option<&Edge> {
        self.edges
            .binary_search_by(|e| e.id.as_str().cmp(id))
            .ok()
            .map(|i| &self.edges[i])
    }

    pub fn has_vertex(&self, v: &str) -> bool {
        self.vertices.contains(v)
    }

    /// Edges whose domain is `v`.
    pub fn out_edges<'a>(&'a self, v: &'a str) -> impl Iterator<Item = &'a Edge> + 'a {
        self.edges.iter().filter(move |e| e.dom == v)
    }

    /// Empty iff edge ids are pairwise distinct and every endpoint is a vertex.
    pub fn validate(&self) -> Vec<GraphDiagnostic> {
        let mut diags = Vec::new();
        for pair in self.edges.windows(2) {
            if pair[0].id == pair[1].id && diags.last() != Some(&GraphDiagnostic::DuplicateEdge(pair[0].id.clone())) {
                diags.push(GraphDiagnostic::DuplicateEdge(pair[0].id.clone()));
            }
        }
        for e in &self.edges {
            for v in [&e.dom, &e.cod] {
                let d = GraphDiagnostic::DanglingEndpoint {
                    edge: e.id.clone(),
                    vertex: v.clone(),
                };
                if !self.vertices.contains(v) && !diags.contains(&d) {
                    diags.push(d);
                }
            }
        }
        diags
    }
}

/// A graph morphism, given by its vertex and edge maps. Source and target
/// graphs are supplied when validating.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GraphMorphism {
    pub vertex_map: BTreeMap<VertexId, VertexId>,
    pub edge_map: BTreeMap<EdgeId, EdgeId>,
}

impl GraphMorphism {
    pub fn new(vertex_map: BTreeMap<VertexId, VertexId>, edge_map: BTreeMap<EdgeId, EdgeId>) -> Self {
        GraphMorphism { vertex_map, edge_map }
    }

    pub fn identity(g: &Graph) -> Result<Self, GraphError> {
        let diags = g.validate();
        if !diags.is_empty() {
            return Err(GraphError::InvalidGraph(diags));
        }
        Ok(GraphMorphism {
            vertex_map: g.vertices.iter().map(|v| (v.clone(), v.clone())).collect(),
            edge_map: g.edges.iter().map(|e| (e.id.clone(), e.id.clone())).collect(),
        })
    }

    pub fn vertex(&self, v: &str) -> Option<&VertexId> {
        self.vertex_map.get(v)
    }

    pub fn edge(&self, e: &str) -> Option<&EdgeId> {
        self.edge_map.get(e)
    }

    /// Checks totality on `source` and dom/cod coherence into `target`.
    pub fn validate(&self, source: &Graph, target: &Graph) -> Vec<MorphismDiagnostic> {
        let mut diags = Vec::new();
        for v in source.vertices() {
            match self.vertex_map.get(v) {
                None => diags.push(MorphismDiagnostic::UnmappedVertex(v.clone())),
                Some(img) if !target.has_vertex(img) => diags.push(MorphismDiagnostic::UnknownTargetVertex {
                    vertex: v.clone(),
                    image: img.clone(),
                }),
                Some(_) => {}
            }
        }
        for e in source.edges() {
            let Some(img) = self.edge_map.get(&e.id) else {
                diags.push(MorphismDiagnostic::UnmappedEdge(e.id.clone()));
                continue;
            };
            let Some(te) = target.edge(img) else {
                diags.push(MorphismDiagnostic::UnknownTargetEdge {
                    edge: e.id.clone(),
                    image: img.clone(),
                });
                continue;
            };
            let dom_ok = self.vertex_map.get(&e.dom) == Some(&te.dom);
            let cod_ok = self.vertex_map.get(&e.cod) == Some(&te.cod);
            if !(dom_ok && cod_ok) {
                diags.push(MorphismDiagnostic::Incoherent(e.id.clone()));
            }
        }
        diags
    }

    /// `next ∘ self`: apply `self` first.
    pub fn then(&self, next: &GraphMorphism) -> Result<GraphMorphism, GraphError> {
        let vertex_map = self
            .vertex_map
            .iter()
            .map(|(v, w)| {
                next.vertex_map
                    .get(w)
                    .map(|x| (v.clone(), x.clone()))
                    .ok_or(GraphError::NotComposable)
            })
            .collect::<Result<_, _>>()?;
        let edge_map = self
            .edge_map
            .iter()
            .map(|(e, f)| {
                next.edge_map
                    .get(f)
                    .map(|x| (e.clone(), x.clone()))
                    .ok_or(GraphError::NotComposable)
            })
            .collect::<Result<_, _>>()?;
        Ok(GraphMorphism { vertex_map, edge_map })
    }
}
