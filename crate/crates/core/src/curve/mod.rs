//! Genus-one tropical curves: the circuit, radial distance to it, radial
//! alignment, contraction radii and the contraction of a circle around the
//! circuit to an elliptic singularity.

mod contract;
mod radius;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::forms::{Chamber, FormError, FormOrdering, LinearForm, MonoidForm, ParamNames};

pub use contract::{
    contract_circle, destabilize_at, Contraction, Destabilized, SingularityDescriptor,
    SingularityKind,
};
pub use radius::{
    candidate_radii, circle_valence, contraction_radius_for_m, CircleSide, CircleValence, Radius,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error(transparent)]
    Form(#[from] FormError),
    #[error("not genus one (total genus {0})")]
    NotGenusOne(u32),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("duplicate id {0}")]
    DuplicateId(String),
    #[error("curve is not connected")]
    Disconnected,
    #[error("edge {0} has zero length")]
    ZeroLength(EdgeId),
    #[error("curve has no vertices")]
    Empty,
    #[error("chamber does not order {what}; refine chamber first")]
    Unordered { what: String },
    #[error("no admissible radius for m = {0}")]
    NoAdmissibleRadius(usize),
    #[error("m must be positive")]
    InvalidM,
    #[error("cannot contract a circle of infinite radius")]
    InfiniteRadius,
}

macro_rules! id_type {
    ($name:ident, $prefix:literal) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(pub u32);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "{}"), self.0)
            }
        }
    };
}

id_type!(VertexId, "v");
id_type!(EdgeId, "e");
id_type!(LegId, "l");

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub id: VertexId,
    pub genus: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: EdgeId,
    pub ends: (VertexId, VertexId),
    pub length: MonoidForm,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.ends.0 == self.ends.1
    }

    /// The endpoint opposite `v`.
    pub fn other(&self, v: VertexId) -> VertexId {
        if self.ends.0 == v {
            self.ends.1
        } else {
            self.ends.0
        }
    }

    pub fn touches(&self, v: VertexId) -> bool {
        self.ends.0 == v || self.ends.1 == v
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Leg {
    pub id: LegId,
    pub vertex: VertexId,
    pub label: String,
}

/// A finite graph with genus-weighted vertices, edges of generalized length
/// and unbounded legs carrying marking labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropicalCurve {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    legs: Vec<Leg>,
}

/// The minimal genus-one subcurve: a genus-one vertex or the unique cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    pub vertices: BTreeSet<VertexId>,
    pub edges: BTreeSet<EdgeId>,
}

impl TropicalCurve {
    pub fn new(
        vertices: Vec<Vertex>,
        edges: Vec<Edge>,
        legs: Vec<Leg>,
    ) -> Result<Self, CurveError> {
        let curve = Self {
            vertices,
            edges,
            legs,
        };
        curve.validate()?;
        Ok(curve)
    }

    fn validate(&self) -> Result<(), CurveError> {
        if self.vertices.is_empty() {
            return Err(CurveError::Empty);
        }
        let mut seen = BTreeSet::new();
        for v in &self.vertices {
            if !seen.insert(v.id) {
                return Err(CurveError::DuplicateId(v.id.to_string()));
            }
        }
        let mut seen_e = BTreeSet::new();
        for e in &self.edges {
            if !seen_e.insert(e.id) {
                return Err(CurveError::DuplicateId(e.id.to_string()));
            }
            for v in [e.ends.0, e.ends.1] {
                if !seen.contains(&v) {
                    return Err(CurveError::UnknownVertex(v));
                }
            }
            if e.length.is_zero() {
                return Err(CurveError::ZeroLength(e.id));
            }
        }
        let mut seen_l = BTreeSet::new();
        for l in &self.legs {
            if !seen_l.insert(l.id) {
                return Err(CurveError::DuplicateId(l.id.to_string()));
            }
            if !seen.contains(&l.vertex) {
                return Err(CurveError::UnknownVertex(l.vertex));
            }
        }
        if self.component_count() != 1 {
            return Err(CurveError::Disconnected);
        }
        Ok(())
    }

    fn component_count(&self) -> usize {
        let mut seen = BTreeSet::new();
        let mut count = 0;
        for v in &self.vertices {
            if seen.contains(&v.id) {
                continue;
            }
            count += 1;
            let mut queue = VecDeque::from([v.id]);
            seen.insert(v.id);
            while let Some(u) = queue.pop_front() {
                for e in self.edges.iter().filter(|e| e.touches(u)) {
                    let w = e.other(u);
                    if seen.insert(w) {
                        queue.push_back(w);
                    }
                }
            }
        }
        count
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn legs(&self) -> &[Leg] {
        &self.legs
    }

    pub fn vertex(&self, id: VertexId) -> Result<&Vertex, CurveError> {
        self.vertices
            .iter()
            .find(|v| v.id == id)
            .ok_or(CurveError::UnknownVertex(id))
    }

    pub fn edge(&self, id: EdgeId) -> Result<&Edge, CurveError> {
        self.edges
            .iter()
            .find(|e| e.id == id)
            .ok_or(CurveError::UnknownEdge(id))
    }

    pub fn legs_at(&self, v: VertexId) -> impl Iterator<Item = &Leg> {
        self.legs.iter().filter(move |l| l.vertex == v)
    }

    pub fn edges_at(&self, v: VertexId) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.touches(v))
    }

    /// Number of edge germs and legs at `v`; loops count twice.
    pub fn valence(&self, v: VertexId) -> usize {
        let germs: usize = self
            .edges_at(v)
            .map(|e| if e.is_loop() { 2 } else { 1 })
            .sum();
        germs + self.legs_at(v).count()
    }

    pub fn betti_number(&self) -> u32 {
        (self.edges.len() + 1 - self.vertices.len()) as u32
    }

    pub fn total_genus(&self) -> u32 {
        self.betti_number() + self.vertices.iter().map(|v| v.genus).sum::<u32>()
    }

    /// One past the largest length parameter used by any edge.
    pub fn num_params(&self) -> usize {
        self.edges
            .iter()
            .map(|e| e.length.param_bound())
            .max()
            .unwrap_or(0)
    }

    pub fn next_vertex_id(&self) -> VertexId {
        VertexId(self.vertices.iter().map(|v| v.id.0 + 1).max().unwrap_or(0))
    }

    pub fn next_edge_id(&self) -> EdgeId {
        EdgeId(self.edges.iter().map(|e| e.id.0 + 1).max().unwrap_or(0))
    }

    pub fn next_leg_id(&self) -> LegId {
        LegId(self.legs.iter().map(|l| l.id.0 + 1).max().unwrap_or(0))
    }

    pub(crate) fn push_leg(&mut self, leg: Leg) {
        self.legs.push(leg);
    }

    pub(crate) fn push_vertex(&mut self, genus: u32) -> VertexId {
        let id = self.next_vertex_id();
        self.vertices.push(Vertex { id, genus });
        id
    }

    pub(crate) fn push_edge(&mut self, a: VertexId, b: VertexId, length: MonoidForm) -> EdgeId {
        let id = self.next_edge_id();
        self.edges.push(Edge {
            id,
            ends: (a, b),
            length,
        });
        id
    }

    pub(crate) fn move_leg(&mut self, leg: LegId, to: VertexId) {
        if let Some(l) = self.legs.iter_mut().find(|l| l.id == leg) {
            l.vertex = to;
        }
    }

    pub(crate) fn retain_legs(&mut self, keep: impl Fn(&Leg) -> bool) {
        self.legs.retain(|l| keep(l));
    }

    /// Replaces edge `id` by `ends.0 -[first]- new -[second]- ends.1`.
    /// The first piece keeps the id; returns the new vertex and the id of
    /// the second piece.
    pub(crate) fn split_edge(
        &mut self,
        id: EdgeId,
        first: MonoidForm,
        second: MonoidForm,
    ) -> Result<(VertexId, EdgeId), CurveError> {
        let new_v = self.next_vertex_id();
        let new_e = self.next_edge_id();
        let pos = self
            .edges
            .iter()
            .position(|e| e.id == id)
            .ok_or(CurveError::UnknownEdge(id))?;
        let (a, b) = self.edges[pos].ends;
        self.edges[pos] = Edge {
            id,
            ends: (a, new_v),
            length: first,
        };
        self.vertices.push(Vertex {
            id: new_v,
            genus: 0,
        });
        self.edges.push(Edge {
            id: new_e,
            ends: (new_v, b),
            length: second,
        });
        Ok((new_v, new_e))
    }

    pub fn circuit(&self) -> Result<Circuit, CurveError> {
        let genus = self.total_genus();
        if genus != 1 {
            return Err(CurveError::NotGenusOne(genus));
        }
        if self.betti_number() == 0 {
            let v = self
                .vertices
                .iter()
                .find(|v| v.genus == 1)
                .expect("genus one with a tree needs a genus-one vertex");
            return Ok(Circuit {
                vertices: BTreeSet::from([v.id]),
                edges: BTreeSet::new(),
            });
        }
        // Strip leaves until only the cycle remains.
        let mut alive_v: BTreeSet<VertexId> = self.vertices.iter().map(|v| v.id).collect();
        let mut alive_e: BTreeSet<EdgeId> = self.edges.iter().map(|e| e.id).collect();
        loop {
            let leaf = alive_v.iter().copied().find(|&v| {
                let deg: usize = self
                    .edges
                    .iter()
                    .filter(|e| alive_e.contains(&e.id) && e.touches(v))
                    .map(|e| if e.is_loop() { 2 } else { 1 })
                    .sum();
                deg <= 1
            });
            let Some(v) = leaf else { break };
            alive_v.remove(&v);
            alive_e.retain(|id| !self.edges.iter().any(|e| e.id == *id && e.touches(v)));
        }
        Ok(Circuit {
            vertices: alive_v,
            edges: alive_e,
        })
    }

    /// Radial distance of every vertex from the circuit.
    pub fn distances(&self) -> Result<BTreeMap<VertexId, MonoidForm>, CurveError> {
        let circuit = self.circuit()?;
        let mut dist: BTreeMap<VertexId, MonoidForm> = circuit
            .vertices
            .iter()
            .map(|v| (*v, MonoidForm::zero()))
            .collect();
        let mut queue: VecDeque<VertexId> = circuit.vertices.iter().copied().collect();
        while let Some(u) = queue.pop_front() {
            let du = dist[&u].clone();
            for e in self.edges_at(u) {
                if circuit.edges.contains(&e.id) {
                    continue;
                }
                let w = e.other(u);
                if let std::collections::btree_map::Entry::Vacant(slot) = dist.entry(w) {
                    slot.insert(&du + &e.length);
                    queue.push_back(w);
                }
            }
        }
        Ok(dist)
    }

    pub fn lambda(&self, v: VertexId) -> Result<MonoidForm, CurveError> {
        self.vertex(v)?;
        Ok(self
            .distances()?
            .remove(&v)
            .expect("connected curve reaches every vertex"))
    }

    /// Distinct radial distances (syntactically distinct forms).
    pub fn distance_forms(&self) -> Result<Vec<LinearForm>, CurveError> {
        let set: BTreeSet<MonoidForm> = self.distances()?.into_values().collect();
        Ok(set.into_iter().map(MonoidForm::into_linear).collect())
    }

    /// Graphviz description; `vertex_note` adds text to vertex labels.
    pub fn to_dot(
        &self,
        name: &str,
        names: &ParamNames,
        vertex_note: &dyn Fn(VertexId) -> String,
    ) -> String {
        let mut out = format!("graph \"{name}\" {{\n");
        for v in &self.vertices {
            let note = vertex_note(v.id);
            let sep = if note.is_empty() { "" } else { "\\n" };
            out.push_str(&format!(
                "  {} [label=\"{} g={}{sep}{note}\"];\n",
                v.id, v.id, v.genus
            ));
        }
        for e in &self.edges {
            out.push_str(&format!(
                "  {} -- {} [label=\"{}\"];\n",
                e.ends.0,
                e.ends.1,
                e.length.display(names)
            ));
        }
        for l in &self.legs {
            out.push_str(&format!(
                "  {} [shape=point];\n  {} -- {} [label=\"{}\"];\n",
                l.id, l.vertex, l.id, l.label
            ));
        }
        out.push_str("}\n");
        out
    }

    pub fn is_radially_aligned(&self, ch: &Chamber) -> Result<bool, CurveError> {
        let forms = self.distance_forms()?;
        let ch = ch.with_num_params(self.num_params());
        Ok(ch.totally_orders(&forms)?)
    }
}

/// Radial distance of `v` from the circuit.
pub fn lambda_of(c: &TropicalCurve, v: VertexId) -> Result<MonoidForm, CurveError> {
    c.lambda(v)
}

pub fn circuit_of(c: &TropicalCurve) -> Result<Circuit, CurveError> {
    c.circuit()
}

/// Chambers of the positive orthant on which the curve is radially aligned.
pub fn alignment_chambers(c: &TropicalCurve) -> Result<Vec<Chamber>, CurveError> {
    alignment_chambers_in(c, &Chamber::top(c.num_params()))
}

/// Chambers refining `base` on which all vertex distances are totally ordered.
pub fn alignment_chambers_in(
    c: &TropicalCurve,
    base: &Chamber,
) -> Result<Vec<Chamber>, CurveError> {
    let forms = c.distance_forms()?;
    let base = base.with_num_params(c.num_params());
    Ok(base.refinements(&forms)?)
}

/// Orders two forms in `ch`, failing when the chamber cannot decide.
pub(crate) fn ordered(
    ch: &Chamber,
    a: &LinearForm,
    b: &LinearForm,
) -> Result<FormOrdering, CurveError> {
    match ch.compare(a, b)? {
        FormOrdering::Incomparable => Err(CurveError::Unordered {
            what: format!("{a} and {b}"),
        }),
        o => Ok(o),
    }
}

/// Small builder used by tests, fixtures and enumeration.
#[derive(Clone, Debug, Default)]
pub struct CurveBuilder {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    legs: Vec<Leg>,
}

impl CurveBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(mut self, id: u32, genus: u32) -> Self {
        self.vertices.push(Vertex {
            id: VertexId(id),
            genus,
        });
        self
    }

    pub fn edge(mut self, a: u32, b: u32, length: MonoidForm) -> Self {
        let id = EdgeId(self.edges.len() as u32);
        self.edges.push(Edge {
            id,
            ends: (VertexId(a), VertexId(b)),
            length,
        });
        self
    }

    pub fn leg(mut self, v: u32, label: &str) -> Self {
        let id = LegId(self.legs.len() as u32);
        self.legs.push(Leg {
            id,
            vertex: VertexId(v),
            label: label.to_string(),
        });
        self
    }

    /// `count` legs at `v` labelled `p{k}` continuing the running numbering.
    pub fn legs(mut self, v: u32, count: usize) -> Self {
        for _ in 0..count {
            let label = format!("p{}", self.legs.len() + 1);
            self = self.leg(v, &label);
        }
        self
    }

    pub fn build(self) -> Result<TropicalCurve, CurveError> {
        TropicalCurve::new(self.vertices, self.edges, self.legs)
    }
}
