//! Versioned JSON fixture files and their conversion to core objects.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use troplog_core::forms::parse_rational;
use troplog_core::{
    Chamber, Constraint, ContactMatrix, Contribution, Divisor, Edge, EdgeId, Leg, LegId,
    LinearForm, MonoidForm, ParamNames, Relation, StratumGraph, StratumVertex, TargetModel,
    TropicalCurve, TropicalMap, Vertex, VertexId,
};

use crate::error::CliError;

pub const FORMAT_VERSION: u32 = 1;

/// A linear form as `{parameter name: exact rational}`; the empty map is zero.
pub type FormSpec = BTreeMap<String, String>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FixtureKind {
    Map,
    Dims,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Provenance {
    Paper,
    Trivial,
    Derived,
}

impl Provenance {
    pub fn tag(self) -> &'static str {
        match self {
            Provenance::Paper => "PAPER",
            Provenance::Trivial => "TRIVIAL",
            Provenance::Derived => "DERIVED",
        }
    }
}

fn is_false(b: &bool) -> bool {
    !b
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    pub value: serde_json::Value,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// A known disagreement: the value is what the source states, not what is computed.
    #[serde(default, skip_serializing_if = "is_false")]
    pub xfail: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSpec {
    /// Dimension of each projective factor.
    pub factors: Vec<u32>,
    /// Boundary components as `[factor, coordinate]`.
    #[serde(default)]
    pub divisors: Vec<[usize; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexSpec {
    pub id: u32,
    pub genus: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub id: u32,
    pub ends: [u32; 2],
    pub length: FormSpec,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LegSpec {
    pub id: u32,
    pub vertex: u32,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub vertices: Vec<VertexSpec>,
    #[serde(default)]
    pub edges: Vec<EdgeSpec>,
    #[serde(default)]
    pub legs: Vec<LegSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapVertexSpec {
    pub vertex: u32,
    pub degree: Vec<u32>,
    /// One form per divisor; omitted when the target has no divisors.
    #[serde(default)]
    pub position: Vec<FormSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSlopeSpec {
    pub edge: u32,
    pub slope: Vec<i64>,
}

/// The map data. Leg slopes are the contact rows, listed in leg order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub vertices: Vec<MapVertexSpec>,
    #[serde(default)]
    pub edge_slopes: Vec<EdgeSlopeSpec>,
    #[serde(default)]
    pub contact: Vec<Vec<u32>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RelSpec {
    #[serde(rename = "<")]
    Less,
    #[serde(rename = "=")]
    Equal,
    #[serde(rename = "<=")]
    LessEq,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSpec {
    pub lhs: FormSpec,
    pub rel: RelSpec,
    pub rhs: FormSpec,
}

/// Either explicit constraints or `"generic"`, the first feasible chamber
/// that totally orders the distances (and positions) of the fixture.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChamberSpec {
    Generic,
    Constraints(Vec<ConstraintSpec>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFixture {
    pub format_version: u32,
    pub kind: FixtureKind,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    /// Names of the length parameters, in index order.
    pub params: Vec<String>,
    pub target: TargetSpec,
    pub curve: CurveSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<MapSpec>,
    pub chamber: ChamberSpec,
    #[serde(default)]
    pub expected: BTreeMap<String, Expectation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum ContributionSpec {
    Formula {
        genus: u32,
        markings: usize,
        target: TargetSpec,
        degree: Vec<u32>,
    },
    Explicit {
        value: i64,
        provenance: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StratumVertexSpec {
    pub genus: u32,
    pub contribution: ContributionSpec,
    #[serde(default)]
    pub extra: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StratumSpec {
    pub name: String,
    pub vertices: Vec<StratumVertexSpec>,
    #[serde(default)]
    pub edges: Vec<[usize; 2]>,
    pub ambient_dim: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FictitiousSpec {
    pub divisor: usize,
    pub markings: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimsFixture {
    pub format_version: u32,
    pub kind: FixtureKind,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub genus: u32,
    pub markings: usize,
    pub target: TargetSpec,
    pub degree: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contact: Option<Vec<Vec<u32>>>,
    #[serde(default)]
    pub strata: Vec<StratumSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fictitious: Option<FictitiousSpec>,
    #[serde(default)]
    pub expected: BTreeMap<String, Expectation>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Fixture {
    Map(MapFixture),
    Dims(DimsFixture),
}

impl Fixture {
    pub fn name(&self) -> &str {
        match self {
            Fixture::Map(f) => &f.name,
            Fixture::Dims(f) => &f.name,
        }
    }

    pub fn expected(&self) -> &BTreeMap<String, Expectation> {
        match self {
            Fixture::Map(f) => &f.expected,
            Fixture::Dims(f) => &f.expected,
        }
    }

    pub fn to_json(&self) -> String {
        let s = match self {
            Fixture::Map(f) => serde_json::to_string_pretty(f),
            Fixture::Dims(f) => serde_json::to_string_pretty(f),
        };
        s.expect("fixtures serialize") + "\n"
    }
}

#[derive(Deserialize)]
struct Probe {
    format_version: u32,
    kind: FixtureKind,
}

fn parse_error(path: &str, e: serde_json::Error) -> CliError {
    let full = e.to_string();
    let suffix = format!(" at line {} column {}", e.line(), e.column());
    let message = full.strip_suffix(&suffix).unwrap_or(&full).to_string();
    CliError::Parse {
        path: path.to_string(),
        line: e.line(),
        column: e.column(),
        message,
    }
}

/// Parses a fixture, reporting line and column on failure.
pub fn parse_fixture(path: &str, text: &str) -> Result<Fixture, CliError> {
    let probe: Probe = serde_json::from_str(text).map_err(|e| parse_error(path, e))?;
    if probe.format_version != FORMAT_VERSION {
        return Err(CliError::Version {
            path: path.to_string(),
            found: probe.format_version,
            supported: FORMAT_VERSION,
        });
    }
    Ok(match probe.kind {
        FixtureKind::Map => {
            Fixture::Map(serde_json::from_str(text).map_err(|e| parse_error(path, e))?)
        }
        FixtureKind::Dims => {
            Fixture::Dims(serde_json::from_str(text).map_err(|e| parse_error(path, e))?)
        }
    })
}

pub fn load_fixture(path: &str) -> Result<Fixture, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_string(),
        message: e.to_string(),
    })?;
    parse_fixture(path, &text)
}

// ---------------------------------------------------------------------------
// Conversion
// ---------------------------------------------------------------------------

pub fn form_from_spec(spec: &FormSpec, names: &ParamNames) -> Result<LinearForm, CliError> {
    let mut terms = Vec::with_capacity(spec.len());
    for (name, value) in spec {
        let i = names
            .index_of(name)
            .ok_or_else(|| CliError::Invalid(format!("unknown parameter {name}")))?;
        let q = parse_rational(value)
            .ok_or_else(|| CliError::Invalid(format!("bad rational {value:?} for {name}")))?;
        terms.push((i, q));
    }
    Ok(LinearForm::from_terms(terms))
}

pub fn monoid_from_spec(spec: &FormSpec, names: &ParamNames) -> Result<MonoidForm, CliError> {
    Ok(MonoidForm::new(form_from_spec(spec, names)?)?)
}

pub fn form_to_spec(f: &LinearForm, names: &ParamNames) -> FormSpec {
    f.terms()
        .map(|(i, q)| (names.name(i), q.to_string()))
        .collect()
}

pub fn target_from_spec(spec: &TargetSpec) -> Result<TargetModel, CliError> {
    let divisors = spec
        .divisors
        .iter()
        .map(|&[factor, coord]| Divisor { factor, coord })
        .collect();
    Ok(TargetModel::new(spec.factors.clone(), divisors)?)
}

pub fn target_to_spec(t: &TargetModel) -> TargetSpec {
    TargetSpec {
        factors: t.factors().to_vec(),
        divisors: t.divisors().iter().map(|d| [d.factor, d.coord]).collect(),
    }
}

fn relation(r: RelSpec) -> Relation {
    match r {
        RelSpec::Less => Relation::Less,
        RelSpec::Equal => Relation::Equal,
        RelSpec::LessEq => Relation::LessEq,
    }
}

fn rel_spec(r: Relation) -> RelSpec {
    match r {
        Relation::Less => RelSpec::Less,
        Relation::Equal => RelSpec::Equal,
        Relation::LessEq => RelSpec::LessEq,
    }
}

/// Core objects described by a map fixture.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub names: ParamNames,
    pub curve: TropicalCurve,
    pub map: Option<TropicalMap>,
    pub chamber: Chamber,
}

impl Loaded {
    /// Parameter names covering every parameter of the chamber and map.
    pub fn names(&self) -> ParamNames {
        let n = self
            .map
            .as_ref()
            .map_or(0, TropicalMap::num_params)
            .max(self.chamber.num_params());
        self.names.extended_to(n)
    }
}

/// Chambers refining `base` that totally order the distances and, for a
/// map, the positions in every divisor coordinate, sorted by display.
pub fn ordering_chambers(
    curve: &TropicalCurve,
    map: Option<&TropicalMap>,
    base: &Chamber,
    names: &ParamNames,
) -> Result<Vec<Chamber>, CliError> {
    let mut chambers = troplog_core::curve::alignment_chambers_in(curve, base)?;
    if let Some(m) = map {
        for j in 0..m.target.num_divisors() {
            let forms: Vec<LinearForm> = m
                .position
                .values()
                .map(|p| p[j].as_linear().clone())
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            let mut next = Vec::new();
            for ch in &chambers {
                next.extend(ch.refinements(&forms)?);
            }
            chambers = next;
        }
    }
    let mut keyed: Vec<(String, Chamber)> = chambers
        .into_iter()
        .map(|c| (display_key(&c, names), c))
        .collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(keyed.into_iter().map(|(_, c)| c).collect())
}

fn display_key(c: &Chamber, names: &ParamNames) -> String {
    let ext = names.extended_to(c.num_params());
    let key = c.display(&ext).to_string();
    key
}

impl MapFixture {
    pub fn load(&self) -> Result<Loaded, CliError> {
        let names = ParamNames::new(self.params.iter().cloned());
        if names.names().iter().collect::<BTreeSet<_>>().len() != names.len() {
            return Err(CliError::Invalid("parameter names must be distinct".into()));
        }
        let vertices = self
            .curve
            .vertices
            .iter()
            .map(|v| Vertex {
                id: VertexId(v.id),
                genus: v.genus,
            })
            .collect();
        let edges = self
            .curve
            .edges
            .iter()
            .map(|e| {
                Ok(Edge {
                    id: EdgeId(e.id),
                    ends: (VertexId(e.ends[0]), VertexId(e.ends[1])),
                    length: monoid_from_spec(&e.length, &names)?,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let legs = self
            .curve
            .legs
            .iter()
            .map(|l| Leg {
                id: LegId(l.id),
                vertex: VertexId(l.vertex),
                label: l.label.clone(),
            })
            .collect();
        let curve = TropicalCurve::new(vertices, edges, legs)?;
        let target = target_from_spec(&self.target)?;
        let map = match &self.map {
            None => None,
            Some(spec) => Some(self.load_map(spec, &curve, &target, &names)?),
        };
        let base = Chamber::top(names.len());
        let chamber = match &self.chamber {
            ChamberSpec::Constraints(cs) => {
                let constraints = cs
                    .iter()
                    .map(|c| {
                        Ok(Constraint::new(
                            monoid_from_spec(&c.lhs, &names)?,
                            relation(c.rel),
                            monoid_from_spec(&c.rhs, &names)?,
                        ))
                    })
                    .collect::<Result<Vec<_>, CliError>>()?;
                Chamber::new(names.len(), constraints)
            }
            ChamberSpec::Generic => ordering_chambers(&curve, map.as_ref(), &base, &names)?
                .into_iter()
                .next()
                .ok_or_else(|| CliError::Invalid("no feasible chamber".into()))?,
        };
        if !chamber.is_feasible()? {
            return Err(CliError::Invalid("the fixture chamber is empty".into()));
        }
        Ok(Loaded {
            names,
            curve,
            map,
            chamber,
        })
    }

    fn load_map(
        &self,
        spec: &MapSpec,
        curve: &TropicalCurve,
        target: &TargetModel,
        names: &ParamNames,
    ) -> Result<TropicalMap, CliError> {
        let mut multidegree = BTreeMap::new();
        let mut position = BTreeMap::new();
        for v in &spec.vertices {
            multidegree.insert(VertexId(v.vertex), v.degree.clone());
            let p = v
                .position
                .iter()
                .map(|f| monoid_from_spec(f, names))
                .collect::<Result<Vec<_>, _>>()?;
            position.insert(VertexId(v.vertex), p);
        }
        let mut edge_slopes: BTreeMap<EdgeId, Vec<i64>> = curve
            .edges()
            .iter()
            .map(|e| (e.id, vec![0; target.num_divisors()]))
            .collect();
        edge_slopes.extend(
            spec.edge_slopes
                .iter()
                .map(|e| (EdgeId(e.edge), e.slope.clone())),
        );
        let contact = if spec.contact.is_empty() && curve.legs().is_empty() {
            ContactMatrix::zeros(0, target.num_divisors())
        } else if spec.contact.is_empty() && target.num_divisors() == 0 {
            ContactMatrix::zeros(curve.legs().len(), 0)
        } else {
            ContactMatrix::new(target.num_divisors(), spec.contact.clone())?
        };
        let leg_slopes = curve
            .legs()
            .iter()
            .enumerate()
            .map(|(i, l)| {
                let row = if i < contact.num_markings() {
                    contact.row(i).to_vec()
                } else {
                    Vec::new()
                };
                (l.id, row.into_iter().map(i64::from).collect())
            })
            .collect();
        Ok(TropicalMap::new(
            curve.clone(),
            target.clone(),
            multidegree,
            position,
            edge_slopes,
            leg_slopes,
            contact,
        )?)
    }

    /// A fixture describing `map` in `chamber`, without expectations.
    pub fn from_map(name: &str, names: &ParamNames, map: &TropicalMap, chamber: &Chamber) -> Self {
        let names = names.extended_to(map.num_params().max(chamber.num_params()));
        let curve = curve_to_spec(&map.curve, &names);
        let vertices = map
            .curve
            .vertices()
            .iter()
            .map(|v| MapVertexSpec {
                vertex: v.id.0,
                degree: map.multidegree[&v.id].clone(),
                position: map.position[&v.id]
                    .iter()
                    .map(|p| form_to_spec(p.as_linear(), &names))
                    .collect(),
            })
            .collect();
        let edge_slopes = map
            .curve
            .edges()
            .iter()
            .map(|e| EdgeSlopeSpec {
                edge: e.id.0,
                slope: map.edge_slopes[&e.id].clone(),
            })
            .collect();
        let contact = if map.target.num_divisors() == 0 {
            Vec::new()
        } else {
            map.contact.rows().to_vec()
        };
        MapFixture {
            format_version: FORMAT_VERSION,
            kind: FixtureKind::Map,
            name: name.to_string(),
            description: None,
            params: names.names().to_vec(),
            target: target_to_spec(&map.target),
            curve,
            map: Some(MapSpec {
                vertices,
                edge_slopes,
                contact,
            }),
            chamber: chamber_to_spec(chamber, &names),
            expected: BTreeMap::new(),
        }
    }
}

pub fn curve_to_spec(c: &TropicalCurve, names: &ParamNames) -> CurveSpec {
    CurveSpec {
        vertices: c
            .vertices()
            .iter()
            .map(|v| VertexSpec {
                id: v.id.0,
                genus: v.genus,
            })
            .collect(),
        edges: c
            .edges()
            .iter()
            .map(|e| EdgeSpec {
                id: e.id.0,
                ends: [e.ends.0 .0, e.ends.1 .0],
                length: form_to_spec(e.length.as_linear(), names),
            })
            .collect(),
        legs: c
            .legs()
            .iter()
            .map(|l| LegSpec {
                id: l.id.0,
                vertex: l.vertex.0,
                label: l.label.clone(),
            })
            .collect(),
    }
}

pub fn chamber_to_spec(ch: &Chamber, names: &ParamNames) -> ChamberSpec {
    ChamberSpec::Constraints(
        ch.constraints()
            .iter()
            .map(|c| ConstraintSpec {
                lhs: form_to_spec(c.lhs.as_linear(), names),
                rel: rel_spec(c.rel),
                rhs: form_to_spec(c.rhs.as_linear(), names),
            })
            .collect(),
    )
}

impl DimsFixture {
    pub fn target(&self) -> Result<TargetModel, CliError> {
        target_from_spec(&self.target)
    }

    pub fn contact(&self) -> Result<Option<ContactMatrix>, CliError> {
        let nd = self.target.divisors.len();
        Ok(match &self.contact {
            Some(rows) => Some(ContactMatrix::new(nd, rows.clone())?),
            None => None,
        })
    }

    pub fn strata(&self) -> Result<Vec<(String, StratumGraph)>, CliError> {
        self.strata
            .iter()
            .map(|s| Ok((s.name.clone(), stratum_from_spec(s)?)))
            .collect()
    }
}

pub fn stratum_from_spec(s: &StratumSpec) -> Result<StratumGraph, CliError> {
    let vertices = s
        .vertices
        .iter()
        .map(|v| {
            let contribution = match &v.contribution {
                ContributionSpec::Formula {
                    genus,
                    markings,
                    target,
                    degree,
                } => Contribution::Formula {
                    genus: *genus,
                    markings: *markings,
                    target: target_from_spec(target)?,
                    degree: degree.clone(),
                },
                ContributionSpec::Explicit { value, provenance } => Contribution::Explicit {
                    value: *value,
                    provenance: provenance.clone(),
                },
            };
            Ok(StratumVertex {
                genus: v.genus,
                contribution,
                extra: v.extra,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(StratumGraph {
        vertices,
        edges: s.edges.iter().map(|&[a, b]| (a, b)).collect(),
        ambient_dim: s.ambient_dim,
    })
}
