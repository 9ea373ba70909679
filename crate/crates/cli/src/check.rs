//! Named outputs of a fixture and their comparison with expectations.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use troplog_core::{
    check_balancing, check_positions, complete_divisor, complete_to_toric, contract_circle,
    contraction_radius_for_m, degree_genus_p1p1, equidimensional_pairs, expected_dim,
    expected_dim_relative, fictitious_forgetful, is_transverse, is_wellspaced,
    map_contraction_radius, stratum_dim, Chamber, FactorSelector, ParamNames, Radius, StratumGraph,
    Subdivision, TropMapError, TropicalCurve, TropicalMap,
};

use crate::args::parse_radius;
use crate::error::CliError;
use crate::fixture::{DimsFixture, Expectation, Loaded};

/// Everything a map fixture needs to answer named queries.
pub struct MapContext {
    pub names: ParamNames,
    pub curve: TropicalCurve,
    pub map: Option<TropicalMap>,
    pub chamber: Chamber,
    pub threshold: usize,
}

impl MapContext {
    pub fn new(loaded: &Loaded, chamber: Chamber, threshold: usize) -> Self {
        let mut ctx = Self {
            names: loaded.names.clone(),
            curve: loaded.curve.clone(),
            map: loaded.map.clone(),
            chamber,
            threshold,
        };
        let n = ctx
            .map
            .as_ref()
            .map_or(0, TropicalMap::num_params)
            .max(ctx.chamber.num_params());
        ctx.names = ctx.names.extended_to(n);
        ctx
    }

    fn map(&self) -> Result<&TropicalMap, String> {
        self.map
            .as_ref()
            .ok_or_else(|| "the fixture has no map".to_string())
    }

    fn radius(&self, r: &Radius) -> Value {
        Value::String(r.display(&self.names).to_string())
    }

    fn singularity(&self, r: &Radius) -> Result<Value, String> {
        let c = contract_circle(&self.curve, r, &self.chamber).map_err(|e| e.to_string())?;
        Ok(json!({ "branches": c.singularity.branches, "kind": c.singularity.kind.to_string() }))
    }

    /// The value of a named output.
    pub fn evaluate(&self, key: &str) -> Result<Value, String> {
        let err = |e: &dyn std::fmt::Display| e.to_string();
        if let Some(m) = key.strip_prefix("radius_m") {
            let m: usize = m.parse().map_err(|_| format!("bad key {key}"))?;
            let r = contraction_radius_for_m(&self.curve, m, &self.chamber).map_err(|e| err(&e))?;
            return Ok(self.radius(&r));
        }
        if let Some(m) = key.strip_prefix("singularity_m") {
            let m: usize = m.parse().map_err(|_| format!("bad key {key}"))?;
            let r = contraction_radius_for_m(&self.curve, m, &self.chamber).map_err(|e| err(&e))?;
            return self.singularity(&r);
        }
        if let Some(r) = key.strip_prefix("singularity_at:") {
            let r = parse_radius(r, &self.names).map_err(|e| err(&e))?;
            return self.singularity(&r);
        }
        if let Some(k) = key.strip_prefix("map_radius_factor") {
            let k: usize = k.parse().map_err(|_| format!("bad key {key}"))?;
            let r = map_contraction_radius(self.map()?, FactorSelector::Index(k), &self.chamber)
                .map_err(|e| err(&e))?;
            return Ok(self.radius(&r));
        }
        if let Some(rest) = key.strip_prefix("complete_factor") {
            let (k, what) = rest
                .split_once('_')
                .ok_or_else(|| format!("bad key {key}"))?;
            let k: usize = k.parse().map_err(|_| format!("bad key {key}"))?;
            let m = self.map()?;
            let lifted = complete_divisor(m, k).map_err(|e| err(&e))?;
            return self.completion_value(m, &lifted, what, key);
        }
        if let Some(what) = key.strip_prefix("complete_all_") {
            let m = self.map()?;
            let lifted = complete_to_toric(m).map_err(|e| err(&e))?;
            return self.completion_value(m, &lifted, what, key);
        }
        match key {
            "aligned" => Ok(Value::Bool(
                self.curve
                    .is_radially_aligned(&self.chamber)
                    .map_err(|e| err(&e))?,
            )),
            "genus" => Ok(json!(self.curve.total_genus())),
            "circuit_vertices" => {
                let c = self.curve.circuit().map_err(|e| err(&e))?;
                Ok(json!(c.vertices.iter().map(|v| v.0).collect::<Vec<_>>()))
            }
            "map_radius_all" => {
                let r = map_contraction_radius(self.map()?, FactorSelector::All, &self.chamber)
                    .map_err(|e| err(&e))?;
                Ok(self.radius(&r))
            }
            "positions_ok" => {
                let rep = check_positions(self.map()?, &self.chamber).map_err(|e| err(&e))?;
                Ok(Value::Bool(rep.is_ok()))
            }
            "balanced" => {
                let m = self.map()?;
                if !m.target.is_full_toric() {
                    return Err(TropMapError::NotFullToric.to_string());
                }
                Ok(Value::Bool(
                    check_balancing(m).map_err(|e| err(&e))?.is_balanced(),
                ))
            }
            "transverse" => {
                let m = self.map()?;
                let sub = Subdivision::trivial(m.target.num_divisors());
                Ok(Value::Bool(
                    is_transverse(m, &sub, &self.chamber).map_err(|e| err(&e))?,
                ))
            }
            "well_spaced" => {
                let v = is_wellspaced(self.map()?, &self.chamber, self.threshold)
                    .map_err(|e| err(&e))?;
                Ok(Value::Bool(v.well_spaced))
            }
            "circuit_block" => {
                let b =
                    troplog_core::circuit_block(self.map()?, &self.chamber).map_err(|e| err(&e))?;
                Ok(json!(b))
            }
            _ => Err(format!("unknown output {key}")),
        }
    }

    fn completion_value(
        &self,
        before: &TropicalMap,
        after: &TropicalMap,
        what: &str,
        key: &str,
    ) -> Result<Value, String> {
        let old = before.contact.num_markings();
        let rows = &after.contact.rows()[old..];
        match what {
            "new_legs" => Ok(json!(after.curve.legs().len() - before.curve.legs().len())),
            "unit_rows" => Ok(Value::Bool(rows.iter().all(|r| r.iter().sum::<u32>() == 1))),
            "balanced" => {
                let rep = check_balancing(after).map_err(|e| e.to_string())?;
                Ok(Value::Bool(rep.is_balanced()))
            }
            "positions_ok" => {
                let rep = check_positions(after, &self.chamber).map_err(|e| e.to_string())?;
                Ok(Value::Bool(rep.is_ok()))
            }
            _ => Err(format!("unknown output {key}")),
        }
    }

    /// Radius-valued outputs compare as radii; everything else as JSON.
    pub fn matches(&self, key: &str, got: &Value, want: &Value) -> bool {
        let radius_key = key.starts_with("radius_m") || key.starts_with("map_radius_");
        match (radius_key, got, want) {
            (true, Value::String(g), Value::String(w)) => {
                match (parse_radius(g, &self.names), parse_radius(w, &self.names)) {
                    (Ok(a), Ok(b)) => a == b,
                    _ => false,
                }
            }
            _ => got == want,
        }
    }

    /// The summary rows printed by `check` before the expectations.
    pub fn summary_keys(&self) -> Vec<String> {
        let mut keys = vec![
            "genus".to_string(),
            "circuit_vertices".into(),
            "aligned".into(),
        ];
        // Radii up to the first branch count no circle admits.
        let radii = (1..)
            .map(|m| format!("radius_m{m}"))
            .take_while(|k| self.evaluate(k).is_ok());
        keys.extend(radii);
        if let Some(m) = &self.map {
            keys.push("positions_ok".into());
            keys.push("transverse".into());
            if m.target.is_full_toric() {
                keys.push("balanced".into());
            }
            keys.push("circuit_block".into());
            keys.push("well_spaced".into());
            keys.extend((0..m.target.factors().len()).map(|k| format!("map_radius_factor{k}")));
            keys.push("map_radius_all".into());
        }
        keys
    }
}

pub struct DimsContext {
    pub fixture: DimsFixture,
}

impl DimsContext {
    fn strata(&self) -> Result<Vec<(String, StratumGraph)>, CliError> {
        let target = self.fixture.target()?;
        let mut all = vec![(
            "main".to_string(),
            StratumGraph::main(
                self.fixture.genus,
                self.fixture.markings,
                &target,
                &self.fixture.degree,
            ),
        )];
        all.extend(self.fixture.strata()?);
        Ok(all)
    }

    pub fn evaluate(&self, key: &str) -> Result<Value, String> {
        self.evaluate_inner(key).map_err(|e| e.to_string())
    }

    fn evaluate_inner(&self, key: &str) -> Result<Value, CliError> {
        let f = &self.fixture;
        let target = f.target()?;
        if let Some(name) = key.strip_prefix("stratum_dim:") {
            let strata = self.strata()?;
            let (_, s) = strata
                .iter()
                .find(|(n, _)| n == name)
                .ok_or_else(|| CliError::Invalid(format!("no stratum named {name}")))?;
            return Ok(json!(stratum_dim(s)?));
        }
        match key {
            "expected_dim" => Ok(json!(expected_dim(
                f.genus, f.markings, &target, &f.degree
            )?)),
            "expected_dim_relative" => {
                let g = f
                    .contact()?
                    .ok_or_else(|| CliError::Invalid("the fixture has no contact matrix".into()))?;
                Ok(json!(expected_dim_relative(
                    f.genus, f.markings, &target, &f.degree, &g
                )?))
            }
            "equidimensional_flag" => {
                let graphs: Vec<StratumGraph> =
                    self.strata()?.into_iter().map(|(_, s)| s).collect();
                Ok(Value::Bool(!equidimensional_pairs(&graphs)?.is_empty()))
            }
            "degree_genus" => {
                if f.degree.len() != 2 || target.factors() != [1, 1] {
                    return Err(CliError::Invalid(
                        "degree_genus needs a bidegree on p1xp1".into(),
                    ));
                }
                Ok(json!(degree_genus_p1p1(
                    i64::from(f.degree[0]),
                    i64::from(f.degree[1])
                )?))
            }
            "fictitious_multiplicity" | "fictitious_remaining_markings" => {
                let spec = f.fictitious.as_ref().ok_or_else(|| {
                    CliError::Invalid("the fixture has no fictitious block".into())
                })?;
                let g = f
                    .contact()?
                    .ok_or_else(|| CliError::Invalid("the fixture has no contact matrix".into()))?;
                let (mult, rest) = fictitious_forgetful(&g, spec.divisor, &spec.markings)?;
                Ok(if key == "fictitious_multiplicity" {
                    json!(mult)
                } else {
                    json!(rest.num_markings())
                })
            }
            _ => Err(CliError::Invalid(format!("unknown output {key}"))),
        }
    }

    pub fn summary_keys(&self) -> Vec<String> {
        let f = &self.fixture;
        let mut keys = vec!["expected_dim".to_string()];
        if f.contact.is_some() {
            keys.push("expected_dim_relative".into());
        }
        keys.push("stratum_dim:main".into());
        keys.extend(f.strata.iter().map(|s| format!("stratum_dim:{}", s.name)));
        keys.push("equidimensional_flag".into());
        if f.fictitious.is_some() {
            keys.push("fictitious_multiplicity".into());
        }
        keys
    }
}

/// Outcome of one expectation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// A documented disagreement that still disagrees.
    XFail,
    /// A documented disagreement that unexpectedly agrees; counts as a failure.
    XPass,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::XFail => "XFAIL",
            Verdict::XPass => "XPASS",
        }
    }

    pub fn is_failure(&self) -> bool {
        matches!(self, Verdict::Fail | Verdict::XPass)
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub key: String,
    pub verdict: Verdict,
    pub got: Result<Value, String>,
    pub expectation: Expectation,
}

pub fn judge(
    expected: &BTreeMap<String, Expectation>,
    evaluate: impl Fn(&str) -> Result<Value, String>,
    matches: impl Fn(&str, &Value, &Value) -> bool,
) -> Vec<Outcome> {
    expected
        .iter()
        .map(|(key, exp)| {
            let got = evaluate(key);
            let agrees = got.as_ref().is_ok_and(|g| matches(key, g, &exp.value));
            let verdict = match (exp.xfail, agrees) {
                (false, true) => Verdict::Pass,
                (false, false) => Verdict::Fail,
                (true, false) => Verdict::XFail,
                (true, true) => Verdict::XPass,
            };
            Outcome {
                key: key.clone(),
                verdict,
                got,
                expectation: exp.clone(),
            }
        })
        .collect()
}

pub fn show(v: &Result<Value, String>) -> String {
    match v {
        Ok(Value::String(s)) => s.clone(),
        Ok(Value::Bool(b)) => if *b { "yes" } else { "no" }.to_string(),
        Ok(other) => other.to_string(),
        Err(e) => format!("error: {e}"),
    }
}
