//! Fourier–Motzkin elimination over homogeneous integer rows.
//!
//! Every row reads `a·x > 0` (strict) or `a·x ≥ 0`. Equalities are removed
//! by the caller before elimination (see `chamber::Prepared`), so the only
//! job here is deciding strict/non-strict feasibility and producing a
//! rational witness by back-substitution.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::FormError;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct IntRow {
    pub coeffs: Vec<i128>,
    pub strict: bool,
}

impl IntRow {
    pub fn new(coeffs: Vec<i128>, strict: bool) -> Self {
        Self { coeffs, strict }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0)
    }

    fn normalized(mut self) -> Self {
        let g = self.coeffs.iter().fold(0i128, |acc, c| acc.gcd(&c.abs()));
        if g > 1 {
            for c in &mut self.coeffs {
                *c /= g;
            }
        }
        self
    }
}

/// Converts rational coefficients to a primitive integer row with the same sign pattern.
pub(crate) fn to_int_row(coeffs: &[BigRational], strict: bool) -> Result<IntRow, FormError> {
    let lcm = coeffs
        .iter()
        .filter(|c| !c.is_zero())
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints = coeffs
        .iter()
        .map(|c| {
            let v = c.numer() * (&lcm / c.denom());
            v.to_i128().ok_or(FormError::Overflow)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(IntRow::new(ints, strict).normalized())
}

fn combine(p: &IntRow, n: &IntRow, k: usize) -> Result<IntRow, FormError> {
    let pk = p.coeffs[k];
    let nk = -n.coeffs[k];
    debug_assert!(pk > 0 && nk > 0);
    let coeffs = p
        .coeffs
        .iter()
        .zip(&n.coeffs)
        .map(|(a, b)| {
            let x = a.checked_mul(nk).ok_or(FormError::Overflow)?;
            let y = b.checked_mul(pk).ok_or(FormError::Overflow)?;
            x.checked_add(y).ok_or(FormError::Overflow)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut row = IntRow::new(coeffs, p.strict || n.strict).normalized();
    row.coeffs[k] = 0;
    Ok(row)
}

/// Drops trivially satisfied rows and merges duplicates (strict wins).
/// Returns `None` when a row `0 > 0` shows up.
fn tidy(rows: Vec<IntRow>) -> Option<Vec<IntRow>> {
    let mut seen: HashMap<Vec<i128>, usize> = HashMap::new();
    let mut out: Vec<IntRow> = Vec::with_capacity(rows.len());
    for row in rows {
        if row.is_zero() {
            if row.strict {
                return None;
            }
            continue;
        }
        match seen.get(&row.coeffs) {
            Some(&i) => out[i].strict |= row.strict,
            None => {
                seen.insert(row.coeffs.clone(), out.len());
                out.push(row);
            }
        }
    }
    Some(out)
}

/// One elimination step: the rows that mentioned variable `var` before it was removed.
struct Stage {
    var: usize,
    rows: Vec<IntRow>,
}

struct Elimination {
    feasible: bool,
    stages: Vec<Stage>,
}

fn eliminate(nvars: usize, rows: Vec<IntRow>, keep_stages: bool) -> Result<Elimination, FormError> {
    let Some(mut rows) = tidy(rows) else {
        return Ok(Elimination {
            feasible: false,
            stages: Vec::new(),
        });
    };
    let mut remaining: Vec<usize> = (0..nvars).collect();
    let mut stages = Vec::new();
    while !remaining.is_empty() && !rows.is_empty() {
        // Cheapest variable first: fewest generated rows.
        let (pos, &var) = remaining
            .iter()
            .enumerate()
            .min_by_key(|(_, &v)| {
                let p = rows.iter().filter(|r| r.coeffs[v] > 0).count();
                let n = rows.iter().filter(|r| r.coeffs[v] < 0).count();
                p * n
            })
            .expect("remaining is non-empty");
        remaining.swap_remove(pos);

        let (with, without): (Vec<IntRow>, Vec<IntRow>) =
            rows.into_iter().partition(|r| r.coeffs[var] != 0);
        let mut next = without;
        {
            let pos_rows = with.iter().filter(|r| r.coeffs[var] > 0);
            for p in pos_rows {
                for n in with.iter().filter(|r| r.coeffs[var] < 0) {
                    next.push(combine(p, n, var)?);
                }
            }
        }
        if keep_stages {
            stages.push(Stage { var, rows: with });
        }
        match tidy(next) {
            Some(r) => rows = r,
            None => {
                return Ok(Elimination {
                    feasible: false,
                    stages,
                })
            }
        }
    }
    Ok(Elimination {
        feasible: true,
        stages,
    })
}

/// Decides whether some real (equivalently rational) `x` satisfies every row.
pub(crate) fn feasible(nvars: usize, rows: Vec<IntRow>) -> Result<bool, FormError> {
    Ok(eliminate(nvars, rows, false)?.feasible)
}

/// A rational point satisfying every row, or `None` when the system is infeasible.
pub(crate) fn witness(
    nvars: usize,
    rows: Vec<IntRow>,
) -> Result<Option<Vec<BigRational>>, FormError> {
    let elim = eliminate(nvars, rows, true)?;
    if !elim.feasible {
        return Ok(None);
    }
    let mut values: Vec<Option<BigRational>> = vec![None; nvars];
    for stage in elim.stages.iter().rev() {
        let k = stage.var;
        let mut lower: Option<(BigRational, bool)> = None;
        let mut upper: Option<(BigRational, bool)> = None;
        for row in &stage.rows {
            let mut rest = BigRational::zero();
            for (j, &c) in row.coeffs.iter().enumerate() {
                if j == k || c == 0 {
                    continue;
                }
                let v = values[j].clone().unwrap_or_else(BigRational::one);
                rest += BigRational::from_integer(BigInt::from(c)) * v;
            }
            let ak = BigRational::from_integer(BigInt::from(row.coeffs[k]));
            let bound = -rest / &ak;
            if ak.is_positive() {
                lower = Some(match lower {
                    Some((b, s)) if b > bound => (b, s),
                    Some((b, s)) if b == bound => (b, s || row.strict),
                    _ => (bound, row.strict),
                });
            } else {
                upper = Some(match upper {
                    Some((b, s)) if b < bound => (b, s),
                    Some((b, s)) if b == bound => (b, s || row.strict),
                    _ => (bound, row.strict),
                });
            }
        }
        let two = BigRational::from_integer(BigInt::from(2));
        let value = match (lower, upper) {
            (None, None) => BigRational::one(),
            (Some((l, _)), None) => l + BigRational::one(),
            (None, Some((u, _))) => u - BigRational::one(),
            (Some((l, _)), Some((u, _))) if l < u => (l + u) / two,
            (Some((l, _)), Some(_)) => l,
        };
        values[k] = Some(value);
    }
    Ok(Some(
        values
            .into_iter()
            .map(|v| v.unwrap_or_else(BigRational::one))
            .collect(),
    ))
}
