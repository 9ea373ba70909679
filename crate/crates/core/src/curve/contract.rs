use std::collections::BTreeSet;
use std::fmt;

use super::radius::{sides, sorted_distances, CircleSide, Radius};
use super::{ordered, CurveError, Edge, Leg, TropicalCurve, Vertex, VertexId};
use crate::forms::{Chamber, Constraint, FormOrdering, LinearForm, MonoidForm, Relation};

/// A curve after inserting vertices where a circle crosses edges, with the
/// chamber extended by any fresh length parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Destabilized {
    pub curve: TropicalCurve,
    pub chamber: Chamber,
    pub new_vertices: Vec<VertexId>,
    /// Parameter index of the shared shift for a just-after radius.
    pub epsilon: Option<usize>,
}

/// Splits every edge crossing the circle of radius `r` by a genus-zero
/// vertex on the circle. For a just-after radius all new vertices sit at
/// `base + eps`, with one shared parameter `eps` kept below the next distance.
pub fn destabilize_at(
    c: &TropicalCurve,
    r: &Radius,
    ch: &Chamber,
) -> Result<Destabilized, CurveError> {
    let mut ch = ch.with_num_params(c.num_params());
    let unchanged = |ch: Chamber| Destabilized {
        curve: c.clone(),
        chamber: ch,
        new_vertices: vec![],
        epsilon: None,
    };
    let (base, just_after) = match r {
        Radius::Infinite => return Ok(unchanged(ch)),
        Radius::Exact(b) => (b.clone(), false),
        Radius::JustAfter(b) => (b.clone(), true),
    };
    let dist = c.distances()?;
    let side = sides(c, r, &ch)?;
    let crossing: Vec<Edge> = c
        .edges()
        .iter()
        .filter(|e| {
            let (a, b) = (side[&e.ends.0], side[&e.ends.1]);
            matches!(
                (a, b),
                (CircleSide::Inside, CircleSide::Outside)
                    | (CircleSide::Outside, CircleSide::Inside)
            )
        })
        .cloned()
        .collect();
    if crossing.is_empty() {
        return Ok(unchanged(ch));
    }

    let mut level: LinearForm = base.clone().into_linear();
    let mut epsilon = None;
    if just_after {
        let eps = ch.num_params();
        ch = ch.with_num_params(eps + 1);
        let next = sorted_distances(c, &ch)?
            .into_iter()
            .find(|d| {
                matches!(
                    ch.compare(d.as_linear(), base.as_linear()),
                    Ok(FormOrdering::Greater)
                )
            })
            .expect("a crossing edge has an endpoint beyond the base");
        ch = ch.with_constraint(Constraint::new(
            &base + &MonoidForm::var(eps),
            Relation::Less,
            next,
        ));
        level = &level + &LinearForm::var(eps);
        epsilon = Some(eps);
    }

    let mut curve = c.clone();
    let mut new_vertices = Vec::new();
    for e in crossing {
        let inner_end = if side[&e.ends.0] == CircleSide::Inside {
            e.ends.0
        } else {
            e.ends.1
        };
        let outer_end = e.other(inner_end);
        let inner_len = &level - dist[&inner_end].as_linear();
        let outer_len = dist[&outer_end].as_linear() - &level;
        let (inner, next) = ch.realize(&inner_len)?;
        let (outer, next) = next.realize(&outer_len)?;
        ch = next;
        let (first, second) = if e.ends.0 == inner_end {
            (inner, outer)
        } else {
            (outer, inner)
        };
        let (v, _) = curve.split_edge(e.id, first, second)?;
        new_vertices.push(v);
    }
    Ok(Destabilized {
        curve,
        chamber: ch,
        new_vertices,
        epsilon,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SingularityKind {
    SmoothElliptic,
    Cusp,
    Tacnode,
    Lines,
}

impl fmt::Display for SingularityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SingularityKind::SmoothElliptic => "smooth-elliptic",
            SingularityKind::Cusp => "cusp",
            SingularityKind::Tacnode => "tacnode",
            SingularityKind::Lines => "m-lines",
        })
    }
}

/// The elliptic m-fold point obtained by contracting a genus-one subcurve
/// meeting the rest of the curve in `branches` points.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SingularityDescriptor {
    pub branches: usize,
    pub kind: SingularityKind,
    pub local_ring: String,
}

impl SingularityDescriptor {
    pub fn from_branches(m: usize) -> Self {
        let (kind, local_ring) = match m {
            0 => (
                SingularityKind::SmoothElliptic,
                "smooth genus-one curve, no singular point".to_string(),
            ),
            1 => (SingularityKind::Cusp, "k[[x,y]]/(y^2-x^3)".to_string()),
            2 => (SingularityKind::Tacnode, "k[[x,y]]/(y^2-yx^2)".to_string()),
            m => (
                SingularityKind::Lines,
                format!("{m} general lines through the origin of A^{}", m - 1),
            ),
        };
        Self {
            branches: m,
            kind,
            local_ring,
        }
    }
}

impl fmt::Display for SingularityDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (m={}): {}",
            self.kind, self.branches, self.local_ring
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contraction {
    pub curve: TropicalCurve,
    pub chamber: Chamber,
    pub center: VertexId,
    pub singularity: SingularityDescriptor,
}

/// Destabilizes at `r`, then merges every vertex within distance `r` of the
/// circuit into one genus-one vertex.
pub fn contract_circle(
    c: &TropicalCurve,
    r: &Radius,
    ch: &Chamber,
) -> Result<Contraction, CurveError> {
    if *r == Radius::Infinite {
        return Err(CurveError::InfiniteRadius);
    }
    let d = destabilize_at(c, r, ch)?;
    let base = r.base().expect("finite radius").clone();
    let mut merged: BTreeSet<VertexId> = d.new_vertices.iter().copied().collect();
    for (v, dv) in d.curve.distances()? {
        if ordered(&d.chamber, dv.as_linear(), base.as_linear())? != FormOrdering::Greater {
            merged.insert(v);
        }
    }
    let center = *merged
        .iter()
        .next()
        .expect("the circuit lies within any radius");
    let to_center = |v: VertexId| if merged.contains(&v) { center } else { v };

    let mut vertices: Vec<Vertex> = d
        .curve
        .vertices()
        .iter()
        .filter(|v| !merged.contains(&v.id))
        .cloned()
        .collect();
    vertices.push(Vertex {
        id: center,
        genus: 1,
    });
    vertices.sort_by_key(|v| v.id);
    let edges: Vec<Edge> = d
        .curve
        .edges()
        .iter()
        .filter(|e| !(merged.contains(&e.ends.0) && merged.contains(&e.ends.1)))
        .map(|e| Edge {
            id: e.id,
            ends: (to_center(e.ends.0), to_center(e.ends.1)),
            length: e.length.clone(),
        })
        .collect();
    let legs: Vec<Leg> = d
        .curve
        .legs()
        .iter()
        .map(|l| Leg {
            id: l.id,
            vertex: to_center(l.vertex),
            label: l.label.clone(),
        })
        .collect();
    let curve = TropicalCurve::new(vertices, edges, legs)?;
    let singularity = SingularityDescriptor::from_branches(curve.valence(center));
    Ok(Contraction {
        curve,
        chamber: d.chamber,
        center,
        singularity,
    })
}
