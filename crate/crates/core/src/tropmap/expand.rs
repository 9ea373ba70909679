use super::{order, realize_nonneg, TropMapError, TropicalMap};
use crate::curve::{EdgeId, LegId, VertexId};
use crate::forms::{Chamber, FormOrdering, LinearForm, MonoidForm};
use num_rational::BigRational;

/// Breakpoints of a subdivision of each divisor coordinate ray. The origin
/// is always a wall and need not be listed.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Subdivision {
    pub breakpoints: Vec<Vec<MonoidForm>>,
}

impl Subdivision {
    pub fn trivial(num_divisors: usize) -> Self {
        Self {
            breakpoints: vec![Vec::new(); num_divisors],
        }
    }

    pub fn new(breakpoints: Vec<Vec<MonoidForm>>) -> Self {
        Self { breakpoints }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    /// Sorted positive walls of each coordinate after refinement.
    pub target_subdivision: Vec<Vec<MonoidForm>>,
    pub map: TropicalMap,
    pub chamber: Chamber,
}

const MAX_SPLITS: usize = 4096;

/// Sorted distinct walls (in `ch`) including the origin.
fn sorted_walls(
    forms: impl IntoIterator<Item = MonoidForm>,
    ch: &Chamber,
) -> Result<Vec<MonoidForm>, TropMapError> {
    let mut out: Vec<MonoidForm> = vec![MonoidForm::zero()];
    for f in forms {
        insert_wall(&mut out, f, ch)?;
    }
    Ok(out)
}

fn insert_wall(
    walls: &mut Vec<MonoidForm>,
    f: MonoidForm,
    ch: &Chamber,
) -> Result<(), TropMapError> {
    let mut at = walls.len();
    for (i, w) in walls.iter().enumerate() {
        match order(ch, f.as_linear(), w.as_linear())? {
            FormOrdering::Equal => return Ok(()),
            FormOrdering::Less => {
                at = i;
                break;
            }
            _ => {}
        }
    }
    walls.insert(at, f);
    Ok(())
}

fn is_wall(walls: &[MonoidForm], p: &LinearForm, ch: &Chamber) -> Result<bool, TropMapError> {
    for w in walls {
        if order(ch, p, w.as_linear())? == FormOrdering::Equal {
            return Ok(true);
        }
    }
    Ok(false)
}

/// The wall met first when moving from `p` in the direction of `sign`,
/// strictly before `end` (or without bound when `end` is `None`).
fn first_wall_between(
    walls: &[MonoidForm],
    p: &LinearForm,
    end: Option<&LinearForm>,
    sign: i64,
    ch: &Chamber,
) -> Result<Option<MonoidForm>, TropMapError> {
    let beyond = |a: &LinearForm, b: &LinearForm| -> Result<bool, TropMapError> {
        let o = order(ch, a, b)?;
        Ok(if sign > 0 {
            o == FormOrdering::Greater
        } else {
            o == FormOrdering::Less
        })
    };
    let mut hits = Vec::new();
    for w in walls {
        let wl = w.as_linear();
        if !beyond(wl, p)? {
            continue;
        }
        if let Some(e) = end {
            if !beyond(e, wl)? {
                continue;
            }
        }
        hits.push(w.clone());
    }
    // Walls are sorted increasingly.
    Ok(if sign > 0 {
        hits.into_iter().next()
    } else {
        hits.pop()
    })
}

/// Every edge or leg with nonzero slope in a coordinate starts and ends on
/// walls of that coordinate and crosses none in between.
pub fn is_transverse(
    m: &TropicalMap,
    sub: &Subdivision,
    ch: &Chamber,
) -> Result<bool, TropMapError> {
    m.validate_shape()?;
    let ch = ch.with_num_params(m.num_params().max(sub_bound(sub)));
    let nd = m.target.num_divisors();
    for j in 0..nd {
        let walls = sorted_walls(sub.breakpoints.get(j).cloned().unwrap_or_default(), &ch)?;
        for e in m.curve.edges() {
            let s = m.edge_slopes[&e.id][j];
            if s == 0 {
                continue;
            }
            let p = m.position[&e.ends.0][j].as_linear();
            let q = m.position[&e.ends.1][j].as_linear();
            if !is_wall(&walls, p, &ch)? || !is_wall(&walls, q, &ch)? {
                return Ok(false);
            }
            if first_wall_between(&walls, p, Some(q), s.signum(), &ch)?.is_some() {
                return Ok(false);
            }
        }
        for l in m.curve.legs() {
            let s = m.leg_slopes[&l.id][j];
            if s == 0 {
                continue;
            }
            let p = m.position[&l.vertex][j].as_linear();
            if !is_wall(&walls, p, &ch)?
                || first_wall_between(&walls, p, None, s.signum(), &ch)?.is_some()
            {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn sub_bound(sub: &Subdivision) -> usize {
    sub.breakpoints
        .iter()
        .flatten()
        .map(MonoidForm::param_bound)
        .max()
        .unwrap_or(0)
}

enum Crossing {
    Edge {
        edge: EdgeId,
        coord: usize,
        wall: MonoidForm,
    },
    Leg {
        leg: LegId,
        coord: usize,
        wall: MonoidForm,
    },
}

fn find_crossing(
    m: &TropicalMap,
    walls: &[Vec<MonoidForm>],
    ch: &Chamber,
) -> Result<Option<Crossing>, TropMapError> {
    for e in m.curve.edges() {
        for (j, &s) in m.edge_slopes[&e.id].iter().enumerate() {
            if s == 0 {
                continue;
            }
            let p = m.position[&e.ends.0][j].as_linear();
            let q = m.position[&e.ends.1][j].as_linear();
            if let Some(wall) = first_wall_between(&walls[j], p, Some(q), s.signum(), ch)? {
                return Ok(Some(Crossing::Edge {
                    edge: e.id,
                    coord: j,
                    wall,
                }));
            }
        }
    }
    for l in m.curve.legs() {
        for (j, &s) in m.leg_slopes[&l.id].iter().enumerate() {
            if s == 0 {
                continue;
            }
            let p = m.position[&l.vertex][j].as_linear();
            if let Some(wall) = first_wall_between(&walls[j], p, None, s.signum(), ch)? {
                return Ok(Some(Crossing::Leg {
                    leg: l.id,
                    coord: j,
                    wall,
                }));
            }
        }
    }
    Ok(None)
}

/// Position of the point at source distance `t` from `v` along slope `s`.
fn advance(
    m: &TropicalMap,
    v: VertexId,
    s: &[i64],
    t: &LinearForm,
    ch: Chamber,
) -> Result<(Vec<MonoidForm>, Chamber), TropMapError> {
    let mut ch = ch;
    let mut pos = Vec::with_capacity(s.len());
    for (j, &sj) in s.iter().enumerate() {
        let f = m.position[&v][j].as_linear() + &(t * sj);
        let (p, next) = realize_nonneg(&ch, &f)?;
        ch = next;
        pos.push(p);
    }
    Ok((pos, ch))
}

/// Refines the target by the given breakpoints and the vertex images, then
/// inserts two-valent vertices wherever an edge or leg crosses a wall.
pub fn expand(m: &TropicalMap, sub: &Subdivision, ch: &Chamber) -> Result<Expansion, TropMapError> {
    m.validate_shape()?;
    let nd = m.target.num_divisors();
    let mut ch = ch.with_num_params(m.num_params().max(sub_bound(sub)));
    let mut map = m.clone();
    let mut walls = Vec::with_capacity(nd);
    for j in 0..nd {
        let mut forms: Vec<MonoidForm> = sub.breakpoints.get(j).cloned().unwrap_or_default();
        forms.extend(map.position.values().map(|p| p[j].clone()));
        walls.push(sorted_walls(forms, &ch)?);
    }

    let mut splits = 0;
    while let Some(crossing) = find_crossing(&map, &walls, &ch)? {
        splits += 1;
        if splits > MAX_SPLITS {
            return Err(TropMapError::ExpansionDiverged(MAX_SPLITS));
        }
        let (new_v, pos) = match crossing {
            Crossing::Edge { edge, coord, wall } => {
                let e = map.curve.edge(edge)?.clone();
                let s = map.edge_slopes[&edge].clone();
                let p = map.position[&e.ends.0][coord].as_linear();
                let t = (wall.as_linear() - p).scale(&BigRational::new(1.into(), s[coord].into()));
                let (first, next) = ch.realize(&t)?;
                let (second, next) = next.realize(&(e.length.as_linear() - &t))?;
                let (pos, next) = advance(&map, e.ends.0, &s, &t, next)?;
                ch = next;
                let (v, e2) = map.curve.split_edge(edge, first, second)?;
                map.edge_slopes.insert(e2, s);
                (v, pos)
            }
            Crossing::Leg { leg, coord, wall } => {
                let base = map
                    .curve
                    .legs()
                    .iter()
                    .find(|l| l.id == leg)
                    .expect("leg exists")
                    .vertex;
                let s = map.leg_slopes[&leg].clone();
                let p = map.position[&base][coord].as_linear();
                let t = (wall.as_linear() - p).scale(&BigRational::new(1.into(), s[coord].into()));
                let (len, next) = ch.realize(&t)?;
                let (pos, next) = advance(&map, base, &s, &t, next)?;
                ch = next;
                let v = map.curve.push_vertex(0);
                let e = map.curve.push_edge(base, v, len);
                map.curve.move_leg(leg, v);
                map.edge_slopes.insert(e, s);
                (v, pos)
            }
        };
        for (j, p) in pos.iter().enumerate() {
            insert_wall(&mut walls[j], p.clone(), &ch)?;
        }
        map.multidegree
            .insert(new_v, vec![0; map.target.factors().len()]);
        map.position.insert(new_v, pos);
    }
    let target_subdivision = walls
        .into_iter()
        .map(|w| w.into_iter().skip(1).collect())
        .collect();
    Ok(Expansion {
        target_subdivision,
        map,
        chamber: ch,
    })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::super::{check_positions, ContactMatrix, Divisor, TargetModel};
    use super::*;
    use crate::curve::CurveBuilder;
    use crate::forms::{Constraint, Relation};

    fn ray_map() -> TropicalMap {
        let curve = CurveBuilder::new()
            .vertex(0, 1)
            .leg(0, "p1")
            .build()
            .unwrap();
        let target = TargetModel::new(
            vec![1],
            vec![Divisor {
                factor: 0,
                coord: 0,
            }],
        )
        .unwrap();
        let mut m = TropicalMap::at_origin(curve, target, BTreeMap::from([(VertexId(0), vec![1])]))
            .unwrap();
        m.contact = ContactMatrix::new(1, vec![vec![1]]).unwrap();
        m.with_leg_slopes_from_contact()
    }

    #[test]
    fn ray_without_breakpoints_is_transverse() {
        let m = ray_map();
        assert!(is_transverse(&m, &Subdivision::trivial(1), &Chamber::top(0)).unwrap());
        let ex = expand(&m, &Subdivision::trivial(1), &Chamber::top(0)).unwrap();
        assert_eq!(ex.map, m);
    }

    #[test]
    fn leg_split_at_breakpoint() {
        let m = ray_map();
        let c = MonoidForm::var(0);
        let sub = Subdivision::new(vec![vec![c.clone()]]);
        let ch = Chamber::top(1);
        assert!(!is_transverse(&m, &sub, &ch).unwrap());
        let ex = expand(&m, &sub, &ch).unwrap();
        assert_eq!(ex.map.curve.edges().len(), 1);
        assert_eq!(ex.map.curve.edges()[0].length, c);
        assert_eq!(ex.map.position[&VertexId(1)], vec![c.clone()]);
        assert_eq!(ex.map.curve.legs()[0].vertex, VertexId(1));
        assert!(is_transverse(
            &ex.map,
            &Subdivision::new(ex.target_subdivision.clone()),
            &ex.chamber
        )
        .unwrap());
        assert!(check_positions(&ex.map, &ex.chamber).unwrap().is_ok());
    }

    #[test]
    fn slope_two_edge_split_at_half() {
        let curve = CurveBuilder::new()
            .vertex(0, 1)
            .vertex(1, 0)
            .edge(0, 1, MonoidForm::var(0))
            .legs(1, 2)
            .build()
            .unwrap();
        let target = TargetModel::new(
            vec![1],
            vec![Divisor {
                factor: 0,
                coord: 0,
            }],
        )
        .unwrap();
        let deg = BTreeMap::from([(VertexId(0), vec![2]), (VertexId(1), vec![2])]);
        let mut m = TropicalMap::at_origin(curve, target, deg).unwrap();
        m.edge_slopes.insert(EdgeId(0), vec![2]);
        m.position.insert(
            VertexId(1),
            vec![MonoidForm::from_int_terms(&[(0, 2)]).unwrap()],
        );
        m.contact = ContactMatrix::new(1, vec![vec![2], vec![2]]).unwrap();
        m = m.with_leg_slopes_from_contact();
        // Wall c = x1 with 0 < x1 < 2*x0.
        let c = MonoidForm::var(1);
        let two_x0 = MonoidForm::from_int_terms(&[(0, 2)]).unwrap();
        let ch = Chamber::new(2, vec![Constraint::new(c.clone(), Relation::Less, two_x0)]);
        let ex = expand(&m, &Subdivision::new(vec![vec![c.clone()]]), &ch).unwrap();
        let first = ex.map.curve.edge(EdgeId(0)).unwrap().length.clone();
        let half = LinearForm::var(1).scale(&BigRational::new(1.into(), 2.into()));
        assert_eq!(
            ex.chamber.compare(first.as_linear(), &half).unwrap(),
            FormOrdering::Equal
        );
        assert!(is_transverse(
            &ex.map,
            &Subdivision::new(ex.target_subdivision.clone()),
            &ex.chamber
        )
        .unwrap());
        assert!(check_positions(&ex.map, &ex.chamber).unwrap().is_ok());
    }

    #[test]
    fn undecided_wall_needs_refinement() {
        let m = ray_map();
        let sub = Subdivision::new(vec![vec![MonoidForm::var(0), MonoidForm::var(1)]]);
        let err = expand(&m, &sub, &Chamber::top(2)).unwrap_err();
        assert!(matches!(err, TropMapError::RefineChamber { .. }));
    }
}
