//! Tropical stable maps to the orthant of a product of projective spaces
//! relative to a set of toric boundary divisors.

mod complete;
mod expand;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::contact::{ContactMatrix, ContactShapeError};
use crate::curve::{CurveError, EdgeId, LegId, Radius, TropicalCurve, VertexId};
use crate::forms::{Chamber, FormError, FormOrdering, LinearForm, MonoidForm};

pub use complete::{complete_divisor, complete_to_toric, forget_divisor};
pub use expand::{expand, is_transverse, Expansion, Subdivision};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TropMapError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Contact(#[from] ContactShapeError),
    #[error("invalid target: {0}")]
    InvalidTarget(String),
    #[error("inconsistent map data: {0}")]
    Inconsistent(String),
    #[error("balancing requires full toric boundary")]
    NotFullToric,
    #[error("boundary already full for factor {0}")]
    BoundaryFull(usize),
    #[error("unknown factor {0}")]
    UnknownFactor(usize),
    #[error("unknown divisor {0}")]
    UnknownDivisor(usize),
    #[error("cannot order {what}; refine chamber first")]
    RefineChamber { what: String },
    #[error("expansion did not stabilise after {0} splits")]
    ExpansionDiverged(usize),
}

/// A toric boundary divisor: coordinate hyperplane `coord` (0..=n) of a factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Divisor {
    pub factor: usize,
    pub coord: usize,
}

/// A product of projective spaces with a chosen set of boundary divisors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TargetModel {
    factors: Vec<u32>,
    divisors: Vec<Divisor>,
}

impl TargetModel {
    pub fn new(factors: Vec<u32>, divisors: Vec<Divisor>) -> Result<Self, TropMapError> {
        for (i, d) in divisors.iter().enumerate() {
            let Some(&n) = factors.get(d.factor) else {
                return Err(TropMapError::InvalidTarget(format!(
                    "divisor {i} names missing factor {}",
                    d.factor
                )));
            };
            if d.coord > n as usize {
                return Err(TropMapError::InvalidTarget(format!(
                    "divisor {i} uses coordinate {} of a factor of dimension {n}",
                    d.coord
                )));
            }
            if divisors[..i].contains(d) {
                return Err(TropMapError::InvalidTarget(format!(
                    "divisor {i} is repeated"
                )));
            }
        }
        Ok(Self { factors, divisors })
    }

    pub fn factors(&self) -> &[u32] {
        &self.factors
    }

    pub fn divisors(&self) -> &[Divisor] {
        &self.divisors
    }

    pub fn num_divisors(&self) -> usize {
        self.divisors.len()
    }

    pub fn dimension(&self) -> u32 {
        self.factors.iter().sum()
    }

    /// Coordinate hyperplanes of `factor` not yet among the divisors.
    pub fn missing(&self, factor: usize) -> Vec<usize> {
        let n = self.factors[factor] as usize;
        (0..=n)
            .filter(|k| !self.divisors.contains(&Divisor { factor, coord: *k }))
            .collect()
    }

    pub fn is_full_toric(&self) -> bool {
        (0..self.factors.len()).all(|i| self.missing(i).is_empty())
    }

    pub(crate) fn push(&mut self, d: Divisor) -> usize {
        self.divisors.push(d);
        self.divisors.len() - 1
    }

    pub(crate) fn remove(&mut self, j: usize) {
        self.divisors.remove(j);
    }
}

/// Which factor a contraction radius is taken for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorSelector {
    Index(usize),
    All,
}

/// A tropical map: positions in divisor coordinates, integer slopes on
/// edges (oriented from `ends.0` to `ends.1`) and legs, vertex multidegrees
/// and the contact matrix. Row `i` of the contact matrix belongs to the
/// `i`-th leg of the curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropicalMap {
    pub curve: TropicalCurve,
    pub target: TargetModel,
    pub multidegree: BTreeMap<VertexId, Vec<u32>>,
    pub position: BTreeMap<VertexId, Vec<MonoidForm>>,
    pub edge_slopes: BTreeMap<EdgeId, Vec<i64>>,
    pub leg_slopes: BTreeMap<LegId, Vec<i64>>,
    pub contact: ContactMatrix,
}

impl TropicalMap {
    pub fn new(
        curve: TropicalCurve,
        target: TargetModel,
        multidegree: BTreeMap<VertexId, Vec<u32>>,
        position: BTreeMap<VertexId, Vec<MonoidForm>>,
        edge_slopes: BTreeMap<EdgeId, Vec<i64>>,
        leg_slopes: BTreeMap<LegId, Vec<i64>>,
        contact: ContactMatrix,
    ) -> Result<Self, TropMapError> {
        let map = Self {
            curve,
            target,
            multidegree,
            position,
            edge_slopes,
            leg_slopes,
            contact,
        };
        map.validate_shape()?;
        Ok(map)
    }

    /// A map with every vertex at the origin and all slopes zero.
    pub fn at_origin(
        curve: TropicalCurve,
        target: TargetModel,
        multidegree: BTreeMap<VertexId, Vec<u32>>,
    ) -> Result<Self, TropMapError> {
        let nd = target.num_divisors();
        let position = curve
            .vertices()
            .iter()
            .map(|v| (v.id, vec![MonoidForm::zero(); nd]))
            .collect();
        let edge_slopes = curve.edges().iter().map(|e| (e.id, vec![0; nd])).collect();
        let leg_slopes = curve.legs().iter().map(|l| (l.id, vec![0; nd])).collect();
        let contact = ContactMatrix::zeros(curve.legs().len(), nd);
        Self::new(
            curve,
            target,
            multidegree,
            position,
            edge_slopes,
            leg_slopes,
            contact,
        )
    }

    pub fn validate_shape(&self) -> Result<(), TropMapError> {
        let nd = self.target.num_divisors();
        let nf = self.target.factors().len();
        let bad = |what: String| Err(TropMapError::Inconsistent(what));
        for v in self.curve.vertices() {
            match self.multidegree.get(&v.id) {
                Some(d) if d.len() == nf => {}
                _ => return bad(format!("multidegree of {} needs {nf} entries", v.id)),
            }
            match self.position.get(&v.id) {
                Some(p) if p.len() == nd => {}
                _ => return bad(format!("position of {} needs {nd} entries", v.id)),
            }
        }
        for e in self.curve.edges() {
            match self.edge_slopes.get(&e.id) {
                Some(s) if s.len() == nd => {}
                _ => return bad(format!("slope of {} needs {nd} entries", e.id)),
            }
        }
        for l in self.curve.legs() {
            match self.leg_slopes.get(&l.id) {
                Some(s) if s.len() == nd => {}
                _ => return bad(format!("slope of {} needs {nd} entries", l.id)),
            }
        }
        if self.contact.num_markings() != self.curve.legs().len()
            || self.contact.num_divisors() != nd
        {
            return bad(format!(
                "contact matrix is {}x{}, expected {}x{nd}",
                self.contact.num_markings(),
                self.contact.num_divisors(),
                self.curve.legs().len()
            ));
        }
        Ok(())
    }

    /// Sets every leg slope to its contact row.
    pub fn with_leg_slopes_from_contact(mut self) -> Self {
        for (i, l) in self.curve.legs().iter().enumerate() {
            let row = self.contact.row(i).iter().map(|&x| i64::from(x)).collect();
            self.leg_slopes.insert(l.id, row);
        }
        self
    }

    /// One past the largest parameter used by lengths or positions.
    pub fn num_params(&self) -> usize {
        let pos = self
            .position
            .values()
            .flatten()
            .map(MonoidForm::param_bound)
            .max()
            .unwrap_or(0);
        self.curve.num_params().max(pos)
    }

    /// Sum of vertex degrees in each factor.
    pub fn total_degree(&self) -> Vec<u64> {
        let nf = self.target.factors().len();
        let mut total = vec![0u64; nf];
        for d in self.multidegree.values() {
            for (t, x) in total.iter_mut().zip(d) {
                *t += u64::from(*x);
            }
        }
        total
    }

    /// Slopes of every germ leaving `v`: edges (both germs of a loop) and legs.
    pub fn outgoing_slopes(&self, v: VertexId) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        for e in self.curve.edges_at(v) {
            let s = &self.edge_slopes[&e.id];
            if e.ends.0 == v {
                out.push(s.clone());
            }
            if e.ends.1 == v {
                out.push(s.iter().map(|x| -x).collect());
            }
        }
        for l in self.curve.legs_at(v) {
            out.push(self.leg_slopes[&l.id].clone());
        }
        out
    }

    fn net_slope(&self, v: VertexId) -> Vec<i64> {
        let mut net = vec![0i64; self.target.num_divisors()];
        for s in self.outgoing_slopes(v) {
            for (n, x) in net.iter_mut().zip(&s) {
                *n += x;
            }
        }
        net
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PositionViolation {
    /// Endpoint positions of an edge differ by something other than slope times length.
    Edge {
        edge: EdgeId,
        coord: usize,
    },
    LegSlope {
        leg: LegId,
    },
    /// A contact column does not sum to the degree of its factor.
    DivisorDegree {
        divisor: usize,
        column_sum: u64,
        degree: u64,
    },
    /// Net outgoing slope at a vertex differs from its degree in that factor.
    LocalDegree {
        vertex: VertexId,
        divisor: usize,
        net_slope: i64,
        degree: u32,
    },
}

impl fmt::Display for PositionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PositionViolation::Edge { edge, coord } => {
                write!(
                    f,
                    "edge {edge}: positions incompatible with slope in coordinate {coord}"
                )
            }
            PositionViolation::LegSlope { leg } => {
                write!(f, "leg {leg}: slope differs from contact row")
            }
            PositionViolation::DivisorDegree {
                divisor,
                column_sum,
                degree,
            } => {
                write!(f, "divisor {divisor}: contact orders sum to {column_sum}, factor degree is {degree}")
            }
            PositionViolation::LocalDegree {
                vertex,
                divisor,
                net_slope,
                degree,
            } => write!(
                f,
                "vertex {vertex}: net slope {net_slope} towards divisor {divisor}, degree {degree}"
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PositionReport {
    pub violations: Vec<PositionViolation>,
}

impl PositionReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks position compatibility, leg slopes against contact rows, the
/// divisor degree constraint and the local degree condition at vertices.
pub fn check_positions(m: &TropicalMap, ch: &Chamber) -> Result<PositionReport, TropMapError> {
    m.validate_shape()?;
    let ch = ch.with_num_params(m.num_params());
    let mut violations = Vec::new();
    for e in m.curve.edges() {
        let (a, b) = e.ends;
        for (j, &s) in m.edge_slopes[&e.id].iter().enumerate() {
            let lhs = m.position[&b][j].as_linear() - m.position[&a][j].as_linear();
            let rhs = e.length.as_linear() * s;
            if ch.compare(&lhs, &rhs)? != FormOrdering::Equal {
                violations.push(PositionViolation::Edge {
                    edge: e.id,
                    coord: j,
                });
            }
        }
    }
    for (i, l) in m.curve.legs().iter().enumerate() {
        let row = m.contact.row(i).iter().map(|&x| i64::from(x));
        if !row.eq(m.leg_slopes[&l.id].iter().copied()) {
            violations.push(PositionViolation::LegSlope { leg: l.id });
        }
    }
    let total = m.total_degree();
    for (j, d) in m.target.divisors().iter().enumerate() {
        let column_sum = m.contact.column_sum(j);
        if column_sum != total[d.factor] {
            violations.push(PositionViolation::DivisorDegree {
                divisor: j,
                column_sum,
                degree: total[d.factor],
            });
        }
    }
    for v in m.curve.vertices() {
        let net = m.net_slope(v.id);
        for (j, d) in m.target.divisors().iter().enumerate() {
            let degree = m.multidegree[&v.id][d.factor];
            if net[j] != i64::from(degree) {
                violations.push(PositionViolation::LocalDegree {
                    vertex: v.id,
                    divisor: j,
                    net_slope: net[j],
                    degree,
                });
            }
        }
    }
    Ok(PositionReport { violations })
}

/// Sum of `slope_k * ray_k` in the fan of projective `n`-space, where
/// `ray_0 = -(e_1 + ... + e_n)` and `ray_k = e_k`.
pub fn fan_residual(n: usize, slopes: &[(usize, i64)]) -> Vec<i64> {
    let mut r = vec![0i64; n];
    for &(k, s) in slopes {
        if k == 0 {
            for x in &mut r {
                *x -= s;
            }
        } else {
            r[k - 1] += s;
        }
    }
    r
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Imbalance {
    pub vertex: VertexId,
    pub factor: usize,
    pub residual: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BalancingReport {
    pub imbalances: Vec<Imbalance>,
}

impl BalancingReport {
    pub fn is_balanced(&self) -> bool {
        self.imbalances.is_empty()
    }
}

/// Balancing of every vertex in each factor's fan.
pub fn check_balancing(m: &TropicalMap) -> Result<BalancingReport, TropMapError> {
    m.validate_shape()?;
    if !m.target.is_full_toric() {
        return Err(TropMapError::NotFullToric);
    }
    let mut imbalances = Vec::new();
    for v in m.curve.vertices() {
        let net = m.net_slope(v.id);
        for (i, &n) in m.target.factors().iter().enumerate() {
            let slopes: Vec<(usize, i64)> = m
                .target
                .divisors()
                .iter()
                .enumerate()
                .filter(|(_, d)| d.factor == i)
                .map(|(j, d)| (d.coord, net[j]))
                .collect();
            let residual = fan_residual(n as usize, &slopes);
            if residual.iter().any(|x| *x != 0) {
                imbalances.push(Imbalance {
                    vertex: v.id,
                    factor: i,
                    residual,
                });
            }
        }
    }
    Ok(BalancingReport { imbalances })
}

/// Smallest radial distance of a vertex with positive degree in the
/// selected factor; infinite when there is none.
pub fn map_contraction_radius(
    m: &TropicalMap,
    sel: FactorSelector,
    ch: &Chamber,
) -> Result<Radius, TropMapError> {
    m.validate_shape()?;
    if let FactorSelector::Index(i) = sel {
        if i >= m.target.factors().len() {
            return Err(TropMapError::UnknownFactor(i));
        }
    }
    let ch = ch.with_num_params(m.num_params());
    let dist = m.curve.distances()?;
    let mut best: Option<MonoidForm> = None;
    for v in m.curve.vertices() {
        let d = &m.multidegree[&v.id];
        let positive = match sel {
            FactorSelector::Index(i) => d[i] > 0,
            FactorSelector::All => d.iter().any(|x| *x > 0),
        };
        if !positive {
            continue;
        }
        let lam = &dist[&v.id];
        best = Some(match best {
            None => lam.clone(),
            Some(b) => match ch.compare(lam.as_linear(), b.as_linear())? {
                FormOrdering::Less => lam.clone(),
                FormOrdering::Equal => b.min(lam.clone()),
                FormOrdering::Greater => b,
                FormOrdering::Incomparable => {
                    return Err(TropMapError::RefineChamber {
                        what: format!("{lam} and {b}"),
                    })
                }
            },
        });
    }
    Ok(best.map_or(Radius::Infinite, Radius::Exact))
}

/// Orders two forms, reporting an undecided comparison.
pub(crate) fn order(
    ch: &Chamber,
    a: &LinearForm,
    b: &LinearForm,
) -> Result<FormOrdering, TropMapError> {
    match ch.compare(a, b)? {
        FormOrdering::Incomparable => Err(TropMapError::RefineChamber {
            what: format!("{a} and {b}"),
        }),
        o => Ok(o),
    }
}

/// A nonnegative form as a monoid element, with a fresh parameter if needed.
pub(crate) fn realize_nonneg(
    ch: &Chamber,
    f: &LinearForm,
) -> Result<(MonoidForm, Chamber), TropMapError> {
    if f.is_nonnegative() {
        return Ok((MonoidForm::new(f.clone())?, ch.clone()));
    }
    match order(ch, f, &LinearForm::zero())? {
        FormOrdering::Equal => Ok((MonoidForm::zero(), ch.clone())),
        _ => Ok(ch.realize(f)?),
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::curve::CurveBuilder;

    #[test]
    fn plane_cubic_positions_pass() {
        let m = plane_cubic_one_divisor(3);
        assert!(check_positions(&m, &Chamber::top(0)).unwrap().is_ok());
    }

    #[test]
    fn wrong_contact_sum_fails() {
        let mut m = plane_cubic_one_divisor(3);
        m.contact = ContactMatrix::new(1, vec![vec![1], vec![1], vec![2]]).unwrap();
        m = m.with_leg_slopes_from_contact();
        let report = check_positions(&m, &Chamber::top(0)).unwrap();
        assert!(report
            .violations
            .contains(&PositionViolation::DivisorDegree {
                divisor: 0,
                column_sum: 4,
                degree: 3
            }));
    }

    #[test]
    fn fig3_without_divisors_passes() {
        assert!(check_positions(&fig3_map(), &fig3_chamber())
            .unwrap()
            .is_ok());
    }

    #[test]
    fn edge_positions_must_match_slope() {
        let curve = CurveBuilder::new()
            .vertex(0, 1)
            .vertex(1, 0)
            .edge(0, 1, MonoidForm::var(0))
            .leg(1, "p1")
            .build()
            .unwrap();
        let target = TargetModel::new(
            vec![1],
            vec![Divisor {
                factor: 0,
                coord: 1,
            }],
        )
        .unwrap();
        let deg = BTreeMap::from([(VertexId(0), vec![1]), (VertexId(1), vec![0])]);
        let mut m = TropicalMap::at_origin(curve, target, deg).unwrap();
        m.edge_slopes.insert(EdgeId(0), vec![1]);
        m.contact = ContactMatrix::new(1, vec![vec![1]]).unwrap();
        m = m.with_leg_slopes_from_contact();
        // Vertex 1 is still at the origin although the edge has slope 1.
        let report = check_positions(&m, &Chamber::top(1)).unwrap();
        assert!(report.violations.contains(&PositionViolation::Edge {
            edge: EdgeId(0),
            coord: 0
        }));
        m.position.insert(VertexId(1), vec![MonoidForm::var(0)]);
        assert!(check_positions(&m, &Chamber::top(1)).unwrap().is_ok());
    }

    #[test]
    fn fan_residual_examples() {
        assert_eq!(fan_residual(2, &[(1, 3), (2, 3), (0, 3)]), vec![0, 0]);
        assert_eq!(fan_residual(2, &[(1, 1)]), vec![1, 0]);
        assert_eq!(fan_residual(2, &[(1, 2), (1, -2)]), vec![0, 0]);
    }

    #[test]
    fn balancing_needs_full_boundary() {
        assert_eq!(
            check_balancing(&plane_cubic_one_divisor(3)),
            Err(TropMapError::NotFullToric)
        );
    }

    #[test]
    fn single_ray_is_unbalanced() {
        let curve = CurveBuilder::new()
            .vertex(0, 1)
            .leg(0, "p1")
            .build()
            .unwrap();
        let divisors = (0..3).map(|coord| Divisor { factor: 0, coord }).collect();
        let target = TargetModel::new(vec![2], divisors).unwrap();
        let deg = BTreeMap::from([(VertexId(0), vec![0])]);
        let mut m = TropicalMap::at_origin(curve, target, deg).unwrap();
        m.contact = ContactMatrix::new(3, vec![vec![0, 1, 0]]).unwrap();
        m = m.with_leg_slopes_from_contact();
        let report = check_balancing(&m).unwrap();
        assert_eq!(
            report.imbalances,
            vec![Imbalance {
                vertex: VertexId(0),
                factor: 0,
                residual: vec![1, 0]
            }]
        );
    }

    #[test]
    fn fig3_radii() {
        let m = fig3_map();
        let ch = fig3_chamber();
        let r = |sel| map_contraction_radius(&m, sel, &ch).unwrap();
        assert_eq!(
            r(FactorSelector::Index(1)),
            Radius::Exact(MonoidForm::sum_of(&[0, 4]))
        );
        assert_eq!(
            r(FactorSelector::Index(0)),
            Radius::Exact(MonoidForm::var(1))
        );
        assert_eq!(r(FactorSelector::All), Radius::Exact(MonoidForm::var(1)));
        assert_eq!(
            map_contraction_radius(&m, FactorSelector::Index(2), &ch),
            Err(TropMapError::UnknownFactor(2))
        );
    }

    #[test]
    fn circuit_of_positive_degree_has_radius_zero() {
        let m = plane_cubic_one_divisor(3);
        assert_eq!(
            map_contraction_radius(&m, FactorSelector::All, &Chamber::top(0)).unwrap(),
            Radius::Exact(MonoidForm::zero())
        );
    }

    #[test]
    fn degree_zero_map_has_infinite_radius() {
        let curve = CurveBuilder::new().vertex(0, 1).legs(0, 2).build().unwrap();
        let target = TargetModel::new(vec![1], vec![]).unwrap();
        let m = TropicalMap::at_origin(curve, target, BTreeMap::from([(VertexId(0), vec![0])]))
            .unwrap();
        assert_eq!(
            map_contraction_radius(&m, FactorSelector::All, &Chamber::top(0)).unwrap(),
            Radius::Infinite
        );
    }

    #[test]
    fn target_validation() {
        assert!(TargetModel::new(
            vec![2],
            vec![Divisor {
                factor: 0,
                coord: 3
            }]
        )
        .is_err());
        assert!(TargetModel::new(
            vec![2],
            vec![Divisor {
                factor: 1,
                coord: 0
            }]
        )
        .is_err());
        let d = Divisor {
            factor: 0,
            coord: 1,
        };
        assert!(TargetModel::new(vec![2], vec![d, d]).is_err());
    }
}
