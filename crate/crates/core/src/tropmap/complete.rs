use std::collections::BTreeSet;

use super::{Divisor, TropMapError, TropicalMap};
use crate::curve::{Leg, LegId};
use crate::forms::MonoidForm;

fn fresh_labels(m: &TropicalMap, count: usize) -> Vec<String> {
    let used: BTreeSet<&str> = m.curve.legs().iter().map(|l| l.label.as_str()).collect();
    (1..)
        .map(|k| format!("p{k}"))
        .filter(|l| !used.contains(l.as_str()))
        .take(count)
        .collect()
}

/// Adds the lowest missing coordinate hyperplane of `factor` as a divisor.
/// Every vertex gains one contact-one leg per unit of degree in that factor.
pub fn complete_divisor(m: &TropicalMap, factor: usize) -> Result<TropicalMap, TropMapError> {
    m.validate_shape()?;
    if factor >= m.target.factors().len() {
        return Err(TropMapError::UnknownFactor(factor));
    }
    let Some(&coord) = m.target.missing(factor).first() else {
        return Err(TropMapError::BoundaryFull(factor));
    };
    let mut out = m.clone();
    let j = out.target.push(Divisor { factor, coord });
    for p in out.position.values_mut() {
        p.push(MonoidForm::zero());
    }
    for s in out
        .edge_slopes
        .values_mut()
        .chain(out.leg_slopes.values_mut())
    {
        s.push(0);
    }
    out.contact.push_zero_column();

    let new_count: usize = m.multidegree.values().map(|d| d[factor] as usize).sum();
    let mut labels = fresh_labels(m, new_count).into_iter();
    let nd = out.target.num_divisors();
    let mut unit = vec![0u32; nd];
    unit[j] = 1;
    for (v, d) in &m.multidegree {
        for _ in 0..d[factor] {
            let id: LegId = out.curve.next_leg_id();
            let label = labels.next().expect("one label per new leg");
            out.curve.push_leg(Leg {
                id,
                vertex: *v,
                label,
            });
            out.leg_slopes
                .insert(id, unit.iter().map(|&x| i64::from(x)).collect());
            out.contact.push_row(unit.clone())?;
        }
    }
    Ok(out)
}

/// Completes every factor to its full toric boundary.
pub fn complete_to_toric(m: &TropicalMap) -> Result<TropicalMap, TropMapError> {
    let mut out = m.clone();
    for i in 0..m.target.factors().len() {
        while !out.target.missing(i).is_empty() {
            out = complete_divisor(&out, i)?;
        }
    }
    Ok(out)
}

/// Drops divisor `j` together with every leg having positive contact with it.
pub fn forget_divisor(m: &TropicalMap, j: usize) -> Result<TropicalMap, TropMapError> {
    m.validate_shape()?;
    if j >= m.target.num_divisors() {
        return Err(TropMapError::UnknownDivisor(j));
    }
    let drop: Vec<usize> = (0..m.contact.num_markings())
        .filter(|&i| m.contact.row(i)[j] > 0)
        .collect();
    let drop_ids: BTreeSet<LegId> = drop.iter().map(|&i| m.curve.legs()[i].id).collect();
    let mut out = m.clone();
    out.target.remove(j);
    out.curve.retain_legs(|l| !drop_ids.contains(&l.id));
    out.leg_slopes.retain(|id, _| !drop_ids.contains(id));
    for p in out.position.values_mut() {
        p.remove(j);
    }
    for s in out
        .edge_slopes
        .values_mut()
        .chain(out.leg_slopes.values_mut())
    {
        s.remove(j);
    }
    out.contact = m.contact.without_rows(&drop).without_column(j);
    Ok(out)
}
