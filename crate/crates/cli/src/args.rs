//! Parsers for compact command-line values.

use troplog_core::{Divisor, ParamNames, Radius, TargetModel};

use crate::error::CliError;

/// `p2`, `p1xp1`, `P1xP2`: one projective factor per `p<n>`.
pub fn parse_factors(s: &str) -> Result<Vec<u32>, CliError> {
    let bad = || CliError::Invalid(format!("target {s:?} should look like p2 or p1xp1"));
    s.to_ascii_lowercase()
        .split('x')
        .map(|f| {
            f.strip_prefix('p')
                .and_then(|n| n.parse::<u32>().ok())
                .filter(|n| *n > 0)
                .ok_or_else(bad)
        })
        .collect()
}

/// `factor:coord`.
pub fn parse_divisor(s: &str) -> Result<Divisor, CliError> {
    let bad = || CliError::Invalid(format!("divisor {s:?} should look like 0:1"));
    let (f, c) = s.split_once(':').ok_or_else(bad)?;
    Ok(Divisor {
        factor: f.trim().parse().map_err(|_| bad())?,
        coord: c.trim().parse().map_err(|_| bad())?,
    })
}

pub fn parse_target(factors: &str, divisors: &[String]) -> Result<TargetModel, CliError> {
    let divisors = divisors
        .iter()
        .map(|d| parse_divisor(d))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TargetModel::new(parse_factors(factors)?, divisors)?)
}

/// Comma-separated nonnegative integers.
pub fn parse_degree(s: &str) -> Result<Vec<u32>, CliError> {
    s.split(',')
        .map(|d| {
            d.trim()
                .parse()
                .map_err(|_| CliError::Invalid(format!("degree {s:?} should look like 2,2")))
        })
        .collect()
}

/// Rows separated by `;`, entries by `,`: `1;1` is two markings of contact one.
pub fn parse_contact(s: &str) -> Result<Vec<Vec<u32>>, CliError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(';').map(parse_degree).collect()
}

/// `inf`, `<form>+eps`, or a form.
pub fn parse_radius(s: &str, names: &ParamNames) -> Result<Radius, CliError> {
    let t = s.trim();
    if t == "inf" {
        return Ok(Radius::Infinite);
    }
    if let Some(base) = t.strip_suffix("+eps") {
        return Ok(Radius::JustAfter(names.parse_monoid(base)?));
    }
    Ok(Radius::Exact(names.parse_monoid(t)?))
}
