//! Dimension bookkeeping for moduli of maps and their boundary strata.

use thiserror::Error;

pub use crate::contact::ContactMatrix;
use crate::tropmap::TargetModel;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DimError {
    #[error("degree needs {expected} entries, got {got}")]
    DegreeShape { expected: usize, got: usize },
    #[error("contact orders inconsistent with degree")]
    ContactMismatch,
    #[error("negative bidegree ({0}, {1})")]
    NegativeDegree(i64, i64),
    #[error("explicit contribution {value} of vertex {vertex} has no provenance note")]
    MissingProvenance { vertex: usize, value: i64 },
    #[error("edge ({0}, {1}) refers to a missing vertex")]
    UnknownVertex(usize, usize),
    #[error("markings/divisor not fictitious")]
    NotFictitious,
    #[error("marking {0} is out of range or repeated")]
    BadMarking(usize),
    #[error("divisor column {0} is out of range")]
    BadDivisor(usize),
    #[error("multiplicity overflows for {0} markings")]
    Overflow(usize),
}

fn check_degree(target: &TargetModel, degree: &[u32]) -> Result<(), DimError> {
    if degree.len() != target.factors().len() {
        return Err(DimError::DegreeShape {
            expected: target.factors().len(),
            got: degree.len(),
        });
    }
    Ok(())
}

/// Riemann–Roch expected dimension `c_1 . beta + (dim - 3)(1 - g) + n` of maps
/// of genus `g` with `n` markings and the given multidegree.
pub fn expected_dim(
    g: u32,
    n: usize,
    target: &TargetModel,
    degree: &[u32],
) -> Result<i64, DimError> {
    check_degree(target, degree)?;
    let c1: i64 = target
        .factors()
        .iter()
        .zip(degree)
        .map(|(&nf, &d)| (i64::from(nf) + 1) * i64::from(d))
        .sum();
    let dim = target.dimension() as i64;
    Ok(c1 + (dim - 3) * (1 - i64::from(g)) + n as i64)
}

/// Expected dimension with prescribed contact orders: each contact of order
/// `k` imposes `k` conditions.
pub fn expected_dim_relative(
    g: u32,
    n: usize,
    target: &TargetModel,
    degree: &[u32],
    contact: &ContactMatrix,
) -> Result<i64, DimError> {
    let base = expected_dim(g, n, target, degree)?;
    if contact.num_markings() != n || contact.num_divisors() != target.num_divisors() {
        return Err(DimError::ContactMismatch);
    }
    for (j, d) in target.divisors().iter().enumerate() {
        if contact.column_sum(j) != u64::from(degree[d.factor]) {
            return Err(DimError::ContactMismatch);
        }
    }
    Ok(base - contact.total() as i64)
}

/// Arithmetic genus of a curve of bidegree `(a, b)` on the quadric surface.
/// Curves of bidegree `(a, 0)` or `(0, b)` are unions of rulings and count as genus 0.
pub fn degree_genus_p1p1(a: i64, b: i64) -> Result<u64, DimError> {
    if a < 0 || b < 0 {
        return Err(DimError::NegativeDegree(a, b));
    }
    if a == 0 || b == 0 {
        return Ok(0);
    }
    Ok(((a - 1) * (b - 1)) as u64)
}

/// Dimension of the moduli space attached to one vertex of a stratum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Contribution {
    /// The expected dimension of maps with this vertex's data.
    Formula {
        genus: u32,
        markings: usize,
        target: TargetModel,
        degree: Vec<u32>,
    },
    /// A dimension known by other means; `provenance` says where it comes from.
    Explicit { value: i64, provenance: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratumVertex {
    pub genus: u32,
    pub contribution: Contribution,
    /// Extra parameters of the stratum, such as the choice of a fibre.
    pub extra: u32,
}

/// A decorated dual graph whose vertex moduli are glued along evaluation
/// maps to a target of dimension `ambient_dim`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratumGraph {
    pub vertices: Vec<StratumVertex>,
    pub edges: Vec<(usize, usize)>,
    pub ambient_dim: u32,
}

impl StratumGraph {
    /// The open stratum of maps with a smooth source.
    pub fn main(genus: u32, markings: usize, target: &TargetModel, degree: &[u32]) -> Self {
        Self {
            vertices: vec![StratumVertex {
                genus,
                contribution: Contribution::Formula {
                    genus,
                    markings,
                    target: target.clone(),
                    degree: degree.to_vec(),
                },
                extra: 0,
            }],
            edges: Vec::new(),
            ambient_dim: target.dimension(),
        }
    }
}

/// Sum of the vertex contributions and extra parameters, minus the ambient
/// dimension once per gluing edge.
pub fn stratum_dim(s: &StratumGraph) -> Result<i64, DimError> {
    let n = s.vertices.len();
    if let Some(&(a, b)) = s.edges.iter().find(|(a, b)| *a >= n || *b >= n) {
        return Err(DimError::UnknownVertex(a, b));
    }
    let mut total = 0i64;
    for (i, v) in s.vertices.iter().enumerate() {
        total += match &v.contribution {
            Contribution::Formula {
                genus,
                markings,
                target,
                degree,
            } => expected_dim(*genus, *markings, target, degree)?,
            Contribution::Explicit { value, provenance } => {
                if provenance.trim().is_empty() {
                    return Err(DimError::MissingProvenance {
                        vertex: i,
                        value: *value,
                    });
                }
                *value
            }
        };
        total += i64::from(v.extra);
    }
    Ok(total - s.edges.len() as i64 * i64::from(s.ambient_dim))
}

/// Pairs of distinct strata with equal dimension. Two such pieces mean the
/// space is not irreducible of the expected dimension, so it cannot be
/// logarithmically smooth.
pub fn equidimensional_pairs(
    strata: &[StratumGraph],
) -> Result<Vec<(usize, usize, i64)>, DimError> {
    let dims = strata
        .iter()
        .map(stratum_dim)
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = Vec::new();
    for i in 0..strata.len() {
        for j in i + 1..strata.len() {
            if dims[i] == dims[j] && strata[i] != strata[j] {
                out.push((i, j, dims[i]));
            }
        }
    }
    Ok(out)
}

/// Forgets the markings `marks` together with divisor column `j` when they
/// are fictitious: each marking meets `j` transversally and nothing else,
/// and nothing else meets `j`. Returns the degree `|marks|!` of the
/// forgetful map on the locus where it is finite, and the reduced contact matrix.
pub fn fictitious_forgetful(
    contact: &ContactMatrix,
    j: usize,
    marks: &[usize],
) -> Result<(u64, ContactMatrix), DimError> {
    if j >= contact.num_divisors() {
        return Err(DimError::BadDivisor(j));
    }
    let mut sorted = marks.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(DimError::BadMarking(w[0]));
        }
    }
    if let Some(&i) = sorted.iter().find(|&&i| i >= contact.num_markings()) {
        return Err(DimError::BadMarking(i));
    }
    for (i, row) in contact.rows().iter().enumerate() {
        let fictitious = sorted.binary_search(&i).is_ok();
        for (k, &x) in row.iter().enumerate() {
            let want = u32::from(fictitious && k == j);
            if (k == j || fictitious) && x != want {
                return Err(DimError::NotFictitious);
            }
        }
    }
    let multiplicity = (1..=sorted.len() as u64)
        .try_fold(1u64, |acc, k| acc.checked_mul(k))
        .ok_or(DimError::Overflow(sorted.len()))?;
    Ok((
        multiplicity,
        contact.without_rows(&sorted).without_column(j),
    ))
}
