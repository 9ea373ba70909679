use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use super::{ordered, CurveError, TropicalCurve, VertexId};
use crate::forms::{Chamber, FormOrdering, MonoidForm, ParamNames};

/// A circle radius around the circuit: a distance, or a symbolic point just
/// beyond one (before the next distinct vertex distance).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Radius {
    Exact(MonoidForm),
    JustAfter(MonoidForm),
    Infinite,
}

impl Radius {
    pub fn base(&self) -> Option<&MonoidForm> {
        match self {
            Radius::Exact(b) | Radius::JustAfter(b) => Some(b),
            Radius::Infinite => None,
        }
    }

    /// Orders two radii in `ch`; an exact radius precedes the shift just after it.
    pub fn compare(&self, other: &Radius, ch: &Chamber) -> Result<Ordering, CurveError> {
        let rank = |r: &Radius| match r {
            Radius::Exact(_) => 0,
            Radius::JustAfter(_) => 1,
            Radius::Infinite => 2,
        };
        match (self.base(), other.base()) {
            (Some(a), Some(b)) => {
                let o = match ordered(ch, a.as_linear(), b.as_linear())? {
                    FormOrdering::Less => Ordering::Less,
                    FormOrdering::Greater => Ordering::Greater,
                    _ => Ordering::Equal,
                };
                Ok(o.then(rank(self).cmp(&rank(other))))
            }
            _ => Ok(rank(self).cmp(&rank(other))),
        }
    }

    /// Where a point at distance `d` sits relative to this circle.
    pub fn side_of(&self, d: &MonoidForm, ch: &Chamber) -> Result<CircleSide, CurveError> {
        Ok(match self {
            Radius::Infinite => CircleSide::Inside,
            Radius::Exact(b) => match ordered(ch, d.as_linear(), b.as_linear())? {
                FormOrdering::Less => CircleSide::Inside,
                FormOrdering::Equal => CircleSide::On,
                _ => CircleSide::Outside,
            },
            Radius::JustAfter(b) => match ordered(ch, d.as_linear(), b.as_linear())? {
                FormOrdering::Greater => CircleSide::Outside,
                _ => CircleSide::Inside,
            },
        })
    }

    pub fn display<'a>(&'a self, names: &'a ParamNames) -> impl fmt::Display + 'a {
        RadiusDisplay {
            radius: self,
            names,
        }
    }
}

struct RadiusDisplay<'a> {
    radius: &'a Radius,
    names: &'a ParamNames,
}

impl fmt::Display for RadiusDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.radius {
            Radius::Exact(b) => write!(f, "{}", b.display(self.names)),
            Radius::JustAfter(b) => write!(f, "{}+eps", b.display(self.names)),
            Radius::Infinite => write!(f, "inf"),
        }
    }
}

impl fmt::Display for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Radius::Exact(b) => write!(f, "{b}"),
            Radius::JustAfter(b) => write!(f, "{b}+eps"),
            Radius::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CircleSide {
    Inside,
    On,
    Outside,
}

/// Germ counts of a circle. Legs are unbounded, so a leg based strictly
/// inside the circle crosses it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct CircleValence {
    pub inner: usize,
    pub outer: usize,
    pub points: usize,
}

impl CircleValence {
    /// Inner valence at most `m` and outer valence exceeding it.
    pub fn admits(&self, m: usize) -> bool {
        self.inner <= m && self.outer > m
    }
}

pub(crate) fn sides(
    c: &TropicalCurve,
    r: &Radius,
    ch: &Chamber,
) -> Result<BTreeMap<VertexId, CircleSide>, CurveError> {
    c.distances()?
        .into_iter()
        .map(|(v, d)| Ok((v, r.side_of(&d, ch)?)))
        .collect()
}

pub fn circle_valence(
    c: &TropicalCurve,
    r: &Radius,
    ch: &Chamber,
) -> Result<CircleValence, CurveError> {
    if *r == Radius::Infinite {
        return Ok(CircleValence {
            inner: c.legs().len(),
            outer: 0,
            points: 0,
        });
    }
    let ch = ch.with_num_params(c.num_params());
    let side = sides(c, r, &ch)?;
    let mut val = CircleValence::default();
    for (v, s) in &side {
        match s {
            CircleSide::On => {
                val.points += 1;
                val.outer += c.legs_at(*v).count();
            }
            CircleSide::Inside => {
                let n = c.legs_at(*v).count();
                val.inner += n;
                val.outer += n;
                val.points += n;
            }
            CircleSide::Outside => {}
        }
    }
    for e in c.edges().iter().filter(|e| !e.is_loop()) {
        match (side[&e.ends.0], side[&e.ends.1]) {
            (CircleSide::On, CircleSide::Inside) | (CircleSide::Inside, CircleSide::On) => {
                val.inner += 1
            }
            (CircleSide::On, CircleSide::Outside) | (CircleSide::Outside, CircleSide::On) => {
                val.outer += 1
            }
            (CircleSide::Inside, CircleSide::Outside)
            | (CircleSide::Outside, CircleSide::Inside) => {
                val.inner += 1;
                val.outer += 1;
                val.points += 1;
            }
            _ => {}
        }
    }
    Ok(val)
}

/// Distinct vertex distances in increasing order; ties in `ch` keep the
/// smallest representative form.
pub(crate) fn sorted_distances(
    c: &TropicalCurve,
    ch: &Chamber,
) -> Result<Vec<MonoidForm>, CurveError> {
    let ch = ch.with_num_params(c.num_params());
    let mut sorted: Vec<MonoidForm> = Vec::new();
    let mut forms: Vec<MonoidForm> = c.distances()?.into_values().collect();
    forms.sort();
    forms.dedup();
    'outer: for f in forms {
        let mut at = sorted.len();
        for (i, g) in sorted.iter().enumerate() {
            match ordered(&ch, f.as_linear(), g.as_linear())? {
                FormOrdering::Equal => continue 'outer,
                FormOrdering::Less => {
                    at = i;
                    break;
                }
                _ => {}
            }
        }
        sorted.insert(at, f);
    }
    Ok(sorted)
}

/// Every vertex distance followed by the shift just after it, increasing.
pub fn candidate_radii(c: &TropicalCurve, ch: &Chamber) -> Result<Vec<Radius>, CurveError> {
    Ok(sorted_distances(c, ch)?
        .into_iter()
        .flat_map(|d| [Radius::Exact(d.clone()), Radius::JustAfter(d)])
        .collect())
}

/// The smallest candidate radius whose circle admits `m`.
pub fn contraction_radius_for_m(
    c: &TropicalCurve,
    m: usize,
    ch: &Chamber,
) -> Result<Radius, CurveError> {
    if m == 0 {
        return Err(CurveError::InvalidM);
    }
    for r in candidate_radii(c, ch)? {
        if circle_valence(c, &r, ch)?.admits(m) {
            return Ok(r);
        }
    }
    Err(CurveError::NoAdmissibleRadius(m))
}
