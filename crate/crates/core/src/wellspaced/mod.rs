//! Tropical well-spacedness of genus-one maps and enumeration of the strata
//! of the tropical moduli space at small combinatorial size.

mod covectors;
mod enumerate;

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::curve::{CurveError, VertexId};
use crate::forms::{Chamber, FormError, FormOrdering, MonoidForm, ParamNames};
use crate::tropmap::{TropMapError, TropicalMap};

pub use covectors::{integer_kernel, test_covectors};
pub use enumerate::{enumerate_strata, EnumerationRequest, StratumType, DEFAULT_ENUMERATION_GUARD};

pub const DEFAULT_THRESHOLD: usize = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WsError {
    #[error(transparent)]
    Map(#[from] TropMapError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error("circuit is not contracted in the block")]
    CircuitNotContracted,
    #[error("threshold must be positive")]
    InvalidThreshold,
    #[error("block coordinate {0} is not a divisor coordinate")]
    InvalidBlock(usize),
    #[error("cannot order {what}; refine chamber first")]
    RefineChamber { what: String },
    #[error("search space too large: {0}")]
    SearchSpaceTooLarge(String),
    #[error("invalid enumeration request: {0}")]
    InvalidRequest(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WsReason {
    CircuitPositiveDegree,
    ToricConditionPassed,
    /// A covector whose minimal flag distance occurs too rarely, and the
    /// sorted distances of its flags.
    ToricConditionFailed {
        covector: Vec<i64>,
        distances: Vec<MonoidForm>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WsVerdict {
    pub well_spaced: bool,
    pub reason: WsReason,
}

impl WsVerdict {
    fn pass(reason: WsReason) -> Self {
        Self {
            well_spaced: true,
            reason,
        }
    }

    pub fn display<'a>(&'a self, names: &'a ParamNames) -> impl fmt::Display + 'a {
        VerdictDisplay {
            verdict: self,
            names,
        }
    }
}

struct VerdictDisplay<'a> {
    verdict: &'a WsVerdict,
    names: &'a ParamNames,
}

impl fmt::Display for VerdictDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.verdict.reason {
            WsReason::CircuitPositiveDegree => {
                write!(f, "well-spaced (circuit has positive degree)")
            }
            WsReason::ToricConditionPassed => write!(f, "well-spaced (toric condition holds)"),
            WsReason::ToricConditionFailed {
                covector,
                distances,
            } => {
                let ds: Vec<String> = distances
                    .iter()
                    .map(|d| d.display(self.names).to_string())
                    .collect();
                write!(
                    f,
                    "not well-spaced (covector {covector:?}, flag distances [{}])",
                    ds.join(", ")
                )
            }
        }
    }
}

fn order(ch: &Chamber, a: &MonoidForm, b: &MonoidForm) -> Result<FormOrdering, WsError> {
    match ch.compare(a.as_linear(), b.as_linear())? {
        FormOrdering::Incomparable => Err(WsError::RefineChamber {
            what: format!("{a} and {b}"),
        }),
        o => Ok(o),
    }
}

/// Divisor coordinates in which the circuit sits strictly inside the boundary.
pub fn circuit_block(m: &TropicalMap, ch: &Chamber) -> Result<Vec<usize>, WsError> {
    m.validate_shape()?;
    let ch = ch.with_num_params(m.num_params());
    let circuit = m.curve.circuit()?;
    let v = *circuit
        .vertices
        .iter()
        .next()
        .expect("circuit has a vertex");
    let mut block = Vec::new();
    for (j, p) in m.position[&v].iter().enumerate() {
        if order(&ch, p, &MonoidForm::zero())? == FormOrdering::Greater {
            block.push(j);
        }
    }
    Ok(block)
}

fn circuit_degree_is_zero(m: &TropicalMap) -> Result<bool, WsError> {
    let circuit = m.curve.circuit()?;
    Ok(circuit
        .vertices
        .iter()
        .all(|v| m.multidegree[v].iter().all(|d| *d == 0)))
}

/// Slopes of every edge and leg restricted to the block coordinates.
fn block_slopes(m: &TropicalMap, block: &[usize]) -> Vec<Vec<i64>> {
    let restrict = |s: &Vec<i64>| block.iter().map(|&j| s[j]).collect::<Vec<i64>>();
    m.edge_slopes
        .values()
        .chain(m.leg_slopes.values())
        .map(restrict)
        .collect()
}

/// Distances of the flags with nonzero covector slope leaving the maximal
/// covector-constant region around the circuit.
fn flag_distances(
    m: &TropicalMap,
    block: &[usize],
    chi: &[i64],
) -> Result<Vec<MonoidForm>, WsError> {
    let g = |s: &[i64]| -> i64 { block.iter().zip(chi).map(|(&j, c)| s[j] * c).sum() };
    let circuit = m.curve.circuit()?;
    let dist = m.curve.distances()?;
    let mut region: BTreeSet<VertexId> = circuit.vertices.clone();
    let mut queue: VecDeque<VertexId> = region.iter().copied().collect();
    while let Some(u) = queue.pop_front() {
        for e in m.curve.edges_at(u) {
            if g(&m.edge_slopes[&e.id]) == 0 {
                let w = e.other(u);
                if region.insert(w) {
                    queue.push_back(w);
                }
            }
        }
    }
    let mut flags = Vec::new();
    for &v in &region {
        for e in m.curve.edges_at(v) {
            if g(&m.edge_slopes[&e.id]) != 0 {
                let germs = if e.is_loop() { 2 } else { 1 };
                for _ in 0..germs {
                    flags.push(dist[&v].clone());
                }
            }
        }
        for l in m.curve.legs_at(v) {
            if g(&m.leg_slopes[&l.id]) != 0 {
                flags.push(dist[&v].clone());
            }
        }
    }
    Ok(flags)
}

/// Checks one covector; returns the sorted flag distances when it fails.
pub fn covector_failure(
    m: &TropicalMap,
    block: &[usize],
    chi: &[i64],
    ch: &Chamber,
    threshold: usize,
) -> Result<Option<Vec<MonoidForm>>, WsError> {
    let ch = ch.with_num_params(m.num_params());
    let mut flags = flag_distances(m, block, chi)?;
    if flags.is_empty() {
        return Ok(None);
    }
    let mut err = None;
    flags.sort_by(|a, b| match order(&ch, a, b) {
        Ok(FormOrdering::Less) => std::cmp::Ordering::Less,
        Ok(FormOrdering::Greater) => std::cmp::Ordering::Greater,
        Ok(_) => std::cmp::Ordering::Equal,
        Err(e) => {
            err.get_or_insert(e);
            std::cmp::Ordering::Equal
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    let min = &flags[0];
    // A flag based on the circuit means no neighbourhood of it is contracted.
    if order(&ch, min, &MonoidForm::zero())? == FormOrdering::Equal {
        return Ok(None);
    }
    let mut count = 0;
    for f in &flags {
        if order(&ch, f, min)? == FormOrdering::Equal {
            count += 1;
        }
    }
    Ok((count < threshold).then_some(flags))
}

/// The toric condition on the block: every test covector must see its
/// minimal flag distance at least `threshold` times.
pub fn toric_wellspaced(
    m: &TropicalMap,
    block: &[usize],
    ch: &Chamber,
    threshold: usize,
) -> Result<WsVerdict, WsError> {
    m.validate_shape()?;
    if threshold == 0 {
        return Err(WsError::InvalidThreshold);
    }
    if let Some(&j) = block.iter().find(|&&j| j >= m.target.num_divisors()) {
        return Err(WsError::InvalidBlock(j));
    }
    let circuit = m.curve.circuit()?;
    for e in &circuit.edges {
        if block.iter().any(|&j| m.edge_slopes[e][j] != 0) {
            return Err(WsError::CircuitNotContracted);
        }
    }
    for chi in test_covectors(&block_slopes(m, block), block.len()) {
        if let Some(distances) = covector_failure(m, block, &chi, ch, threshold)? {
            return Ok(WsVerdict {
                well_spaced: false,
                reason: WsReason::ToricConditionFailed {
                    covector: chi,
                    distances,
                },
            });
        }
    }
    Ok(WsVerdict::pass(WsReason::ToricConditionPassed))
}

/// Well-spacedness of a map: automatic when the circuit has positive
/// degree, otherwise the toric condition on the circuit's block.
pub fn is_wellspaced(
    m: &TropicalMap,
    ch: &Chamber,
    threshold: usize,
) -> Result<WsVerdict, WsError> {
    if threshold == 0 {
        return Err(WsError::InvalidThreshold);
    }
    m.validate_shape()?;
    if !circuit_degree_is_zero(m)? {
        return Ok(WsVerdict::pass(WsReason::CircuitPositiveDegree));
    }
    let block = circuit_block(m, ch)?;
    toric_wellspaced(m, &block, ch, threshold)
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::forms::{Constraint, Relation};
    use crate::tropmap::check_positions;
    use crate::tropmap::fixtures::plane_cubic_one_divisor;

    fn x(i: usize) -> MonoidForm {
        MonoidForm::var(i)
    }

    #[test]
    fn fixture_is_a_valid_map() {
        let m = contracted_branches(&[x(0), x(0), x(0)], x(1));
        assert!(check_positions(&m, &Chamber::top(2)).unwrap().is_ok());
        assert_eq!(circuit_block(&m, &Chamber::top(2)).unwrap(), vec![0]);
    }

    #[test]
    fn three_equal_branches_pass() {
        let m = contracted_branches(&[x(0), x(0), x(0)], x(1));
        let v = is_wellspaced(&m, &Chamber::top(2), 3).unwrap();
        assert_eq!(
            v,
            WsVerdict {
                well_spaced: true,
                reason: WsReason::ToricConditionPassed
            }
        );
    }

    #[test]
    fn unique_minimum_fails() {
        let m = contracted_branches(&[x(0), x(1)], x(2));
        let ch = Chamber::new(3, vec![Constraint::new(x(0), Relation::Less, x(1))]);
        let v = is_wellspaced(&m, &ch, 3).unwrap();
        assert!(!v.well_spaced);
        match v.reason {
            WsReason::ToricConditionFailed { distances, .. } => {
                assert_eq!(distances[0], x(0));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn threshold_two_accepts_a_tie() {
        let m = contracted_branches(&[x(0), x(0)], x(1));
        assert!(is_wellspaced(&m, &Chamber::top(2), 2).unwrap().well_spaced);
        assert!(!is_wellspaced(&m, &Chamber::top(2), 3).unwrap().well_spaced);
    }

    #[test]
    fn removing_a_minimal_branch_breaks_a_pass() {
        let m = contracted_branches(&[x(0), x(0), x(0)], x(1));
        assert!(is_wellspaced(&m, &Chamber::top(2), 3).unwrap().well_spaced);
        let m = contracted_branches(&[x(0), x(0)], x(1));
        assert!(!is_wellspaced(&m, &Chamber::top(2), 3).unwrap().well_spaced);
    }

    #[test]
    fn positive_degree_circuit_is_well_spaced() {
        let m = plane_cubic_one_divisor(3);
        let v = is_wellspaced(&m, &Chamber::top(0), 3).unwrap();
        assert_eq!(v.reason, WsReason::CircuitPositiveDegree);
    }

    #[test]
    fn circuit_in_interior_passes_vacuously() {
        let m = contracted_branches(&[x(0), x(1)], MonoidForm::zero());
        let ch = Chamber::new(2, vec![Constraint::new(x(0), Relation::Less, x(1))]);
        assert_eq!(circuit_block(&m, &ch).unwrap(), Vec::<usize>::new());
        assert!(is_wellspaced(&m, &ch, 3).unwrap().well_spaced);
    }

    #[test]
    fn zero_threshold_is_rejected() {
        let m = contracted_branches(&[x(0)], x(1));
        assert_eq!(
            is_wellspaced(&m, &Chamber::top(2), 0),
            Err(WsError::InvalidThreshold)
        );
    }
}
