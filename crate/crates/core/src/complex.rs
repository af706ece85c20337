//! Pointed combinatorial 2-complexes.
//!
//! Vertices are `0..vertex_count`, edges are directed pairs of vertices, and
//! each face is a closed edge path given by signed edge indices. 3-cells are
//! counted but carry no attaching data.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::presentation::{default_generator_names, make_presentation, Presentation};
use crate::words::Word;

/// An edge traversed forwards (`+k`) or backwards (`-k`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignedEdge {
    pub edge: usize,
    pub reversed: bool,
}

impl SignedEdge {
    pub fn fwd(edge: usize) -> Self {
        SignedEdge { edge, reversed: false }
    }

    pub fn rev(edge: usize) -> Self {
        SignedEdge { edge, reversed: true }
    }

    pub fn inv(self) -> Self {
        SignedEdge { edge: self.edge, reversed: !self.reversed }
    }
}

impl fmt::Display for SignedEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.reversed { '-' } else { '+' }, self.edge)
    }
}

/// Unvalidated cell data, as read from a file or assembled by hand.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ComplexData {
    pub name: Option<String>,
    pub vertex_count: usize,
    pub edges: Vec<(usize, usize)>,
    pub faces: Vec<Vec<SignedEdge>>,
    pub cell3_count: usize,
    pub basepoint: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoVertices,
    EdgeEndpointOutOfRange { edge: usize, vertex: usize },
    BasepointOutOfRange { basepoint: usize },
    EmptyFace { face: usize },
    FaceEdgeOutOfRange { face: usize, position: usize, edge: usize },
    FaceNotClosed { face: usize, position: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoVertices => write!(f, "complex has no vertices"),
            Violation::EdgeEndpointOutOfRange { edge, vertex } => {
                write!(f, "edge endpoint out of range: edge {edge} touches vertex {vertex}")
            }
            Violation::BasepointOutOfRange { basepoint } => {
                write!(f, "basepoint out of range: vertex {basepoint}")
            }
            Violation::EmptyFace { face } => write!(f, "face {face} has an empty boundary"),
            Violation::FaceEdgeOutOfRange { face, position, edge } => {
                write!(f, "face {face} position {position} names missing edge {edge}")
            }
            Violation::FaceNotClosed { face, position } => {
                write!(f, "face not closed: face {face} breaks after position {position}")
            }
        }
    }
}

/// Every violation found in a [`ComplexData`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

pub fn validate_complex(x: &ComplexData) -> Result<(), ValidationReport> {
    let mut violations = Vec::new();
    if x.vertex_count == 0 {
        violations.push(Violation::NoVertices);
    }
    if x.basepoint >= x.vertex_count && x.vertex_count > 0 {
        violations.push(Violation::BasepointOutOfRange { basepoint: x.basepoint });
    }
    for (e, &(s, t)) in x.edges.iter().enumerate() {
        for v in [s, t] {
            if v >= x.vertex_count {
                violations.push(Violation::EdgeEndpointOutOfRange { edge: e, vertex: v });
            }
        }
    }
    let endpoints = |s: SignedEdge| x.edges.get(s.edge).map(|&(a, b)| if s.reversed { (b, a) } else { (a, b) });
    for (f, boundary) in x.faces.iter().enumerate() {
        if boundary.is_empty() {
            violations.push(Violation::EmptyFace { face: f });
            continue;
        }
        let mut ends = Vec::with_capacity(boundary.len());
        for (position, &s) in boundary.iter().enumerate() {
            match endpoints(s) {
                Some(p) => ends.push(p),
                None => violations.push(Violation::FaceEdgeOutOfRange { face: f, position, edge: s.edge }),
            }
        }
        if ends.len() != boundary.len() {
            continue;
        }
        for position in 0..ends.len() {
            let next = (position + 1) % ends.len();
            if ends[position].1 != ends[next].0 {
                violations.push(Violation::FaceNotClosed { face: f, position });
                break;
            }
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(ValidationReport { violations })
    }
}

/// A validated pointed 2-complex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TwoComplex {
    data: ComplexData,
}

impl TryFrom<ComplexData> for TwoComplex {
    type Error = ValidationReport;

    fn try_from(data: ComplexData) -> Result<Self, ValidationReport> {
        TwoComplex::new(data)
    }
}

impl TwoComplex {
    pub fn new(data: ComplexData) -> Result<TwoComplex, ValidationReport> {
        validate_complex(&data)?;
        Ok(TwoComplex { data })
    }

    pub fn data(&self) -> &ComplexData {
        &self.data
    }

    pub fn into_data(self) -> ComplexData {
        self.data
    }

    pub fn name(&self) -> Option<&str> {
        self.data.name.as_deref()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> TwoComplex {
        self.data.name = Some(name.into());
        self
    }

    pub fn vertex_count(&self) -> usize {
        self.data.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.data.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.data.faces.len()
    }

    pub fn cell3_count(&self) -> usize {
        self.data.cell3_count
    }

    pub fn basepoint(&self) -> usize {
        self.data.basepoint
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.data.edges
    }

    pub fn faces(&self) -> &[Vec<SignedEdge>] {
        &self.data.faces
    }

    pub fn tail(&self, s: SignedEdge) -> usize {
        let (a, b) = self.data.edges[s.edge];
        if s.reversed {
            b
        } else {
            a
        }
    }

    pub fn head(&self, s: SignedEdge) -> usize {
        let (a, b) = self.data.edges[s.edge];
        if s.reversed {
            a
        } else {
            b
        }
    }

    /// Incident signed edges leaving each vertex, by edge index, forward
    /// orientation before reverse.
    fn incidence(&self) -> Vec<Vec<SignedEdge>> {
        let mut adj = vec![Vec::new(); self.vertex_count()];
        for (e, &(s, t)) in self.data.edges.iter().enumerate() {
            adj[s].push(SignedEdge::fwd(e));
            adj[t].push(SignedEdge::rev(e));
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        spanning_tree(self).vertices().len() == self.vertex_count()
    }
}

pub fn euler_characteristic(x: &TwoComplex) -> i64 {
    x.vertex_count() as i64 - x.edge_count() as i64 + x.face_count() as i64 - x.cell3_count() as i64
}

/// BFS spanning tree of the basepoint component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningTree {
    pub tree_edges: BTreeSet<usize>,
    /// `parent[v] = (u, s)` where `s` runs from `u` to `v`; `None` for the
    /// basepoint and for vertices outside its component.
    pub parent: Vec<Option<(usize, SignedEdge)>>,
    order: Vec<usize>,
}

impl SpanningTree {
    /// Component vertices in discovery order, basepoint first.
    pub fn vertices(&self) -> &[usize] {
        &self.order
    }

    pub fn contains(&self, v: usize) -> bool {
        self.order.first() == Some(&v) || self.parent.get(v).is_some_and(|p| p.is_some())
    }

    /// Tree path from the basepoint to `v`.
    pub fn path_to(&self, v: usize) -> Vec<SignedEdge> {
        let mut path = Vec::new();
        let mut cur = v;
        while let Some((u, s)) = self.parent[cur] {
            path.push(s);
            cur = u;
        }
        path.reverse();
        path
    }
}

/// Deterministic BFS from the basepoint: vertices in queue order, incident
/// edges by index, forward orientation before reverse.
pub fn spanning_tree(x: &TwoComplex) -> SpanningTree {
    let adj = x.incidence();
    let mut parent = vec![None; x.vertex_count()];
    let mut seen = vec![false; x.vertex_count()];
    let mut tree_edges = BTreeSet::new();
    let mut order = vec![x.basepoint()];
    seen[x.basepoint()] = true;
    let mut queue = VecDeque::from([x.basepoint()]);
    while let Some(u) = queue.pop_front() {
        for &s in &adj[u] {
            let v = x.head(s);
            if !seen[v] {
                seen[v] = true;
                parent[v] = Some((u, s));
                tree_edges.insert(s.edge);
                order.push(v);
                queue.push_back(v);
            }
        }
    }
    SpanningTree { tree_edges, parent, order }
}

/// Cells outside the basepoint component, skipped during extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct IgnoredCells {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
}

impl IgnoredCells {
    pub fn is_empty(&self) -> bool {
        self.vertices == 0 && self.edges == 0 && self.faces == 0
    }
}

/// π1 of the basepoint component, with the word attached to every edge.
#[derive(Debug, Clone)]
pub struct FundamentalGroup {
    pub presentation: Presentation,
    /// `Some(word)` for component edges: empty for tree edges, one generator
    /// for each other edge. `None` outside the component.
    pub edge_labels: Vec<Option<Word>>,
    /// The edge behind each generator.
    pub generator_edges: Vec<usize>,
    pub tree: SpanningTree,
    pub ignored: IgnoredCells,
}

impl FundamentalGroup {
    pub fn label(&self, s: SignedEdge) -> Word {
        let w = self.edge_labels[s.edge].as_ref().expect("edge in basepoint component");
        if s.reversed {
            w.inverse()
        } else {
            w.clone()
        }
    }

    /// The word read along an edge path.
    pub fn path_word(&self, path: &[SignedEdge]) -> Word {
        let rank = self.presentation.generator_count();
        let letters = path.iter().flat_map(|&s| self.label(s).letters().to_vec());
        Word::reduce(rank, letters).expect("labels are in range")
    }
}

/// Contracts the BFS spanning tree: one generator per non-tree edge of the
/// basepoint component, one relator per face (empty relators dropped).
pub fn fundamental_group_presentation(x: &TwoComplex) -> FundamentalGroup {
    let tree = spanning_tree(x);
    let in_component: Vec<bool> = (0..x.vertex_count()).map(|v| tree.contains(v)).collect();
    let mut edge_labels = vec![None; x.edge_count()];
    let mut generator_edges = Vec::new();
    let mut ignored = IgnoredCells { vertices: in_component.iter().filter(|&&c| !c).count(), ..Default::default() };
    for (e, &(s, _)) in x.edges().iter().enumerate() {
        if !in_component[s] {
            ignored.edges += 1;
        } else if !tree.tree_edges.contains(&e) {
            generator_edges.push(e);
        }
    }
    let rank = generator_edges.len();
    for (e, &(s, _)) in x.edges().iter().enumerate() {
        if in_component[s] {
            edge_labels[e] = Some(Word::empty(rank));
        }
    }
    for (g, &e) in generator_edges.iter().enumerate() {
        edge_labels[e] = Some(Word::generator(rank, g).expect("in range"));
    }
    let mut relators = Vec::new();
    for boundary in x.faces() {
        if !in_component[x.tail(boundary[0])] {
            ignored.faces += 1;
            continue;
        }
        let letters = boundary.iter().flat_map(|s| {
            let w: &Word = edge_labels[s.edge].as_ref().expect("component edge");
            let w = if s.reversed { w.inverse() } else { w.clone() };
            w.letters().to_vec()
        });
        relators.push(Word::reduce(rank, letters).expect("labels in range"));
    }
    let presentation =
        make_presentation(&default_generator_names(rank), relators).expect("distinct names, valid relators");
    FundamentalGroup { presentation, edge_labels, generator_edges, tree, ignored }
}

/// The subcomplex reachable from the basepoint, vertices renumbered in BFS
/// order, edges and faces kept in their original relative order. The 3-cell
/// count is copied unchanged.
pub fn basepoint_component(x: &TwoComplex) -> TwoComplex {
    let tree = spanning_tree(x);
    let mut new_vertex = vec![usize::MAX; x.vertex_count()];
    for (i, &v) in tree.vertices().iter().enumerate() {
        new_vertex[v] = i;
    }
    let mut new_edge = vec![usize::MAX; x.edge_count()];
    let mut edges = Vec::new();
    for (e, &(s, t)) in x.edges().iter().enumerate() {
        if new_vertex[s] != usize::MAX {
            new_edge[e] = edges.len();
            edges.push((new_vertex[s], new_vertex[t]));
        }
    }
    let faces = x
        .faces()
        .iter()
        .filter(|b| b.iter().all(|s| new_edge[s.edge] != usize::MAX))
        .map(|b| b.iter().map(|s| SignedEdge { edge: new_edge[s.edge], reversed: s.reversed }).collect())
        .collect();
    TwoComplex::new(ComplexData {
        name: x.data.name.clone(),
        vertex_count: tree.vertices().len(),
        edges,
        faces,
        cell3_count: x.cell3_count(),
        basepoint: 0,
    })
    .expect("a component of a valid complex is valid")
}
