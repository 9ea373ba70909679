//! The `troplog` command line: checks fixtures, lifts maps to the full
//! toric boundary, tabulates dimensions, enumerates strata and contracts
//! elliptic circles.

pub mod args;
pub mod check;
pub mod error;
pub mod fixture;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use troplog_core::{
    check_balancing, complete_divisor, complete_to_toric, contract_circle,
    contraction_radius_for_m, enumerate_strata, equidimensional_pairs, expected_dim,
    expected_dim_relative, stratum_dim, Chamber, ContactMatrix, EnumerationRequest, StratumGraph,
    TropMapError, DEFAULT_ENUMERATION_GUARD,
};

use crate::args::{parse_contact, parse_degree, parse_radius, parse_target};
use crate::check::{judge, show, DimsContext, MapContext, Outcome};
use crate::error::{CliError, EXIT_MISMATCH};
use crate::fixture::{load_fixture, ordering_chambers, Fixture, Loaded, MapFixture};

/// Environment variable overriding the enumeration guard.
pub const MAX_ENUM_ENV: &str = "TROPLOG_MAX_ENUM";

#[derive(Debug, Parser)]
#[command(
    name = "troplog",
    version,
    about = "Genus-one tropical maps: alignment, contraction, well-spacedness"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a fixture and compare against its expectations.
    Check(CheckArgs),
    /// Add missing boundary divisors to a map fixture and print the result.
    Complete(CompleteArgs),
    /// Expected and stratum dimensions.
    Dims(DimsArgs),
    /// List strata of small combinatorial size.
    Enumerate(EnumerateArgs),
    /// Contract the circle of a given radius to an elliptic singularity.
    Contract(ContractArgs),
}

#[derive(Debug, Args)]
pub struct ChamberArg {
    /// `fixture`, `generic`, or the index of an ordering chamber.
    #[arg(long, default_value = "fixture")]
    pub chamber: String,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub path: String,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(2..=3))]
    pub threshold: u8,
    #[command(flatten)]
    pub chamber: ChamberArg,
    /// Write the source curve as a DOT graph.
    #[arg(long)]
    pub dot: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct CompleteWhich {
    #[arg(long)]
    pub factor: Option<usize>,
    #[arg(long)]
    pub all: bool,
}

#[derive(Debug, Args)]
pub struct CompleteArgs {
    pub path: String,
    #[command(flatten)]
    pub which: CompleteWhich,
}

#[derive(Debug, Args)]
pub struct DimsArgs {
    #[arg(long)]
    pub genus: Option<u32>,
    #[arg(long)]
    pub markings: Option<usize>,
    /// Target such as `p2` or `p1xp1`.
    #[arg(long)]
    pub target: Option<String>,
    /// Multidegree such as `2,2`.
    #[arg(long)]
    pub degree: Option<String>,
    /// Boundary divisor `factor:coord`, repeatable.
    #[arg(long)]
    pub divisor: Vec<String>,
    /// Contact rows such as `1;1`.
    #[arg(long)]
    pub contact: Option<String>,
    /// A dims fixture supplying strata (and defaults for the other options).
    #[arg(long)]
    pub stratum: Option<String>,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub target: String,
    #[arg(long)]
    pub degree: String,
    #[arg(long, default_value_t = 0)]
    pub markings: usize,
    #[arg(long, default_value_t = 1)]
    pub max_vertices: usize,
    #[arg(long)]
    pub divisor: Vec<String>,
    #[arg(long)]
    pub contact: Option<String>,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(2..=3))]
    pub threshold: u8,
    /// Directory receiving one DOT file per stratum.
    #[arg(long)]
    pub dot: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct ContractWhich {
    /// Contract at the smallest radius admitting `m` branches.
    #[arg(long)]
    pub m: Option<usize>,
    /// Contract at an explicit radius such as `e1+e3`, `e2+eps` or `0`.
    #[arg(long)]
    pub radius: Option<String>,
}

#[derive(Debug, Args)]
pub struct ContractArgs {
    pub path: String,
    #[command(flatten)]
    pub which: ContractWhich,
    #[command(flatten)]
    pub chamber: ChamberArg,
    #[arg(long)]
    pub dot: Option<PathBuf>,
}

/// Runs a parsed command, writing results to `out` and diagnostics to
/// `err`. Returns the process exit status.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let res = match cli.command {
        Command::Check(a) => cmd_check(&a, out, err),
        Command::Complete(a) => cmd_complete(&a, out, err),
        Command::Dims(a) => cmd_dims(&a, out),
        Command::Enumerate(a) => cmd_enumerate(&a, out, err),
        Command::Contract(a) => cmd_contract(&a, out),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn io(e: std::io::Error) -> CliError {
    CliError::Io {
        path: "<output>".into(),
        message: e.to_string(),
    }
}

fn write_file(path: &std::path::Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn select_chamber(loaded: &Loaded, name: &str) -> Result<Chamber, CliError> {
    match name {
        "fixture" => Ok(loaded.chamber.clone()),
        _ => {
            let all = ordering_chambers(
                &loaded.curve,
                loaded.map.as_ref(),
                &Chamber::top(loaded.names.len()),
                &loaded.names,
            )?;
            let k = if name == "generic" {
                0
            } else {
                name.parse::<usize>()
                    .map_err(|_| CliError::Invalid(format!("unknown chamber {name:?}")))?
            };
            all.get(k).cloned().ok_or_else(|| {
                CliError::Invalid(format!("chamber {k} out of range ({} chambers)", all.len()))
            })
        }
    }
}

fn map_fixture(path: &str) -> Result<MapFixture, CliError> {
    match load_fixture(path)? {
        Fixture::Map(f) => Ok(f),
        Fixture::Dims(_) => Err(CliError::Invalid(format!(
            "{path} is a dims fixture; a map fixture is needed"
        ))),
    }
}

fn print_outcomes(out: &mut dyn Write, outcomes: &[Outcome]) -> Result<i32, CliError> {
    if outcomes.is_empty() {
        writeln!(out, "no expectations").map_err(io)?;
        return Ok(0);
    }
    writeln!(out, "expectations:").map_err(io)?;
    for o in outcomes {
        let want = show(&Ok(o.expectation.value.clone()));
        let tag = o.expectation.provenance.tag();
        let note = o
            .expectation
            .note
            .as_deref()
            .map(|n| format!(" ({n})"))
            .unwrap_or_default();
        match o.verdict {
            check::Verdict::Pass => writeln!(out, "  {:<5} {} = {} [{tag}]", "PASS", o.key, want),
            _ => writeln!(
                out,
                "  {:<5} {}: expected {}, computed {} [{tag}]{note}",
                o.verdict.label(),
                o.key,
                want,
                show(&o.got)
            ),
        }
        .map_err(io)?;
    }
    let count = |f: fn(&check::Verdict) -> bool| outcomes.iter().filter(|o| f(&o.verdict)).count();
    let failed = count(check::Verdict::is_failure);
    writeln!(
        out,
        "summary: {} passed, {} failed, {} expected failures",
        count(|v| *v == check::Verdict::Pass),
        failed,
        count(|v| *v == check::Verdict::XFail)
    )
    .map_err(io)?;
    Ok(if failed > 0 { EXIT_MISMATCH } else { 0 })
}

pub fn cmd_check(a: &CheckArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let fixture = load_fixture(&a.path)?;
    writeln!(out, "fixture {}", fixture.name()).map_err(io)?;
    match fixture {
        Fixture::Map(f) => {
            let loaded = f.load()?;
            let chamber = select_chamber(&loaded, &a.chamber.chamber)?;
            let ctx = MapContext::new(&loaded, chamber, usize::from(a.threshold));
            writeln!(out, "chamber {}", ctx.chamber.display(&ctx.names)).map_err(io)?;
            for key in ctx.summary_keys() {
                writeln!(out, "  {:<22} {}", key, show(&ctx.evaluate(&key))).map_err(io)?;
            }
            if let Some(path) = &a.dot {
                let dot = match &ctx.map {
                    Some(m) => m.curve.to_dot(&f.name, &ctx.names, &|v| {
                        format!("d={:?}", m.multidegree[&v])
                    }),
                    None => ctx.curve.to_dot(&f.name, &ctx.names, &|_| String::new()),
                };
                write_file(path, &dot)?;
                writeln!(err, "wrote {}", path.display()).map_err(io)?;
            }
            let outcomes = judge(
                &f.expected,
                |k| ctx.evaluate(k),
                |k, g, w| ctx.matches(k, g, w),
            );
            print_outcomes(out, &outcomes)
        }
        Fixture::Dims(f) => {
            let ctx = DimsContext { fixture: f };
            for key in ctx.summary_keys() {
                writeln!(out, "  {:<28} {}", key, show(&ctx.evaluate(&key))).map_err(io)?;
            }
            let outcomes = judge(&ctx.fixture.expected, |k| ctx.evaluate(k), |_, g, w| g == w);
            print_outcomes(out, &outcomes)
        }
    }
}

pub fn cmd_complete(
    a: &CompleteArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let f = map_fixture(&a.path)?;
    let loaded = f.load()?;
    let m = loaded
        .map
        .clone()
        .ok_or_else(|| CliError::Invalid("the fixture has no map".into()))?;
    let lifted = match a.which.factor {
        Some(k) => match complete_divisor(&m, k) {
            Ok(l) => l,
            Err(TropMapError::BoundaryFull(_)) => {
                writeln!(
                    err,
                    "note: factor {k} already has its full boundary; nothing to add"
                )
                .map_err(io)?;
                m.clone()
            }
            Err(e) => return Err(e.into()),
        },
        None => complete_to_toric(&m)?,
    };
    if lifted == m {
        if a.which.all {
            writeln!(
                err,
                "note: the target boundary is already complete; nothing to add"
            )
            .map_err(io)?;
        }
        out.write_all(Fixture::Map(f.clone()).to_json().as_bytes())
            .map_err(io)?;
    } else {
        let added = lifted.curve.legs().len() - m.curve.legs().len();
        writeln!(err, "added {added} legs with unit contact").map_err(io)?;
        let names = loaded.names();
        let mut fx = MapFixture::from_map(&f.name, &names, &lifted, &loaded.chamber);
        fx.description = Some(format!("{} with completed boundary", f.name));
        out.write_all(Fixture::Map(fx).to_json().as_bytes())
            .map_err(io)?;
    }
    if a.which.all {
        let report = check_balancing(&lifted)?;
        if report.is_balanced() {
            writeln!(err, "balancing: every vertex balanced in every factor").map_err(io)?;
        } else {
            for i in &report.imbalances {
                writeln!(
                    err,
                    "balancing: vertex {} factor {} residual {:?}",
                    i.vertex, i.factor, i.residual
                )
                .map_err(io)?;
            }
        }
    }
    Ok(0)
}

pub fn cmd_dims(a: &DimsArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let file = match &a.stratum {
        Some(p) => match load_fixture(p)? {
            Fixture::Dims(f) => Some(f),
            Fixture::Map(_) => {
                return Err(CliError::Invalid(format!(
                    "{p} is a map fixture; a dims fixture is needed"
                )))
            }
        },
        None => None,
    };
    let missing =
        |what: &str| CliError::Invalid(format!("--{what} is required without a stratum file"));
    let genus = a
        .genus
        .or(file.as_ref().map(|f| f.genus))
        .ok_or_else(|| missing("genus"))?;
    let markings = a
        .markings
        .or(file.as_ref().map(|f| f.markings))
        .ok_or_else(|| missing("markings"))?;
    let target = match (&a.target, &file) {
        (Some(t), _) => parse_target(t, &a.divisor)?,
        (None, Some(f)) => f.target()?,
        (None, None) => return Err(missing("target")),
    };
    let degree = match (&a.degree, &file) {
        (Some(d), _) => parse_degree(d)?,
        (None, Some(f)) => f.degree.clone(),
        (None, None) => return Err(missing("degree")),
    };
    let contact = match (&a.contact, &file) {
        (Some(c), _) => Some(ContactMatrix::new(
            target.num_divisors(),
            parse_contact(c)?,
        )?),
        (None, Some(f)) => f.contact()?,
        (None, None) => None,
    };
    let main_dim = expected_dim(genus, markings, &target, &degree)?;
    let relative = contact
        .as_ref()
        .map(|g| expected_dim_relative(genus, markings, &target, &degree, g))
        .transpose()?;
    writeln!(out, "{:<32} {}", "expected dimension", main_dim).map_err(io)?;
    if let Some(r) = relative {
        writeln!(out, "{:<32} {}", "relative expected dimension", r).map_err(io)?;
    }
    let mut strata: Vec<(String, StratumGraph)> = vec![(
        "main".into(),
        StratumGraph::main(genus, markings, &target, &degree),
    )];
    if let Some(f) = &file {
        strata.extend(f.strata()?);
    }
    for (name, s) in &strata {
        writeln!(out, "{:<32} {}", format!("stratum {name}"), stratum_dim(s)?).map_err(io)?;
    }
    let graphs: Vec<StratumGraph> = strata.iter().map(|(_, s)| s.clone()).collect();
    for (i, j, d) in equidimensional_pairs(&graphs)? {
        writeln!(
            out,
            "flag: strata {} and {} are distinct and both have dimension {d}; the space is not logarithmically smooth",
            strata[i].0, strata[j].0
        )
        .map_err(io)?;
    }
    Ok(0)
}

fn enumeration_guard() -> Result<u64, CliError> {
    match std::env::var(MAX_ENUM_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Invalid(format!("{MAX_ENUM_ENV}={v:?} is not a number"))),
        Err(_) => Ok(DEFAULT_ENUMERATION_GUARD),
    }
}

pub fn cmd_enumerate(
    a: &EnumerateArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let target = parse_target(&a.target, &a.divisor)?;
    let degree = parse_degree(&a.degree)?;
    let mut req = EnumerationRequest::new(target.clone(), a.markings, degree, a.max_vertices);
    req.threshold = usize::from(a.threshold);
    req.guard = enumeration_guard()?;
    if let Some(c) = &a.contact {
        req.contact = Some(ContactMatrix::new(
            target.num_divisors(),
            parse_contact(c)?,
        )?);
    }
    if a.max_vertices == 0 {
        writeln!(
            err,
            "warning: --max-vertices 0 admits no curve; the listing is empty"
        )
        .map_err(io)?;
    }
    let strata = enumerate_strata(&req)?;
    for (k, s) in strata.iter().enumerate() {
        writeln!(out, "s{k:03} {}", s.listing_line()).map_err(io)?;
    }
    let ws = strata.iter().filter(|s| s.well_spaced).count();
    writeln!(out, "# {} strata, {ws} well-spaced", strata.len()).map_err(io)?;
    if let Some(dir) = &a.dot {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io {
            path: dir.display().to_string(),
            message: e.to_string(),
        })?;
        for (k, s) in strata.iter().enumerate() {
            let name = format!("s{k:03}");
            write_file(&dir.join(format!("{name}.dot")), &s.to_dot(&name))?;
        }
        writeln!(err, "wrote {} DOT files to {}", strata.len(), dir.display()).map_err(io)?;
    }
    Ok(0)
}

pub fn cmd_contract(a: &ContractArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let f = map_fixture(&a.path)?;
    let loaded = f.load()?;
    let chamber = select_chamber(&loaded, &a.chamber.chamber)?;
    let names = loaded.names().extended_to(chamber.num_params());
    let radius = match (&a.which.m, &a.which.radius) {
        (Some(m), _) => contraction_radius_for_m(&loaded.curve, *m, &chamber)?,
        (None, Some(r)) => parse_radius(r, &names)?,
        (None, None) => unreachable!("clap requires one of --m and --radius"),
    };
    let c = contract_circle(&loaded.curve, &radius, &chamber)?;
    let names = names.extended_to(c.chamber.num_params());
    writeln!(out, "radius      {}", radius.display(&names)).map_err(io)?;
    writeln!(out, "centre      {}", c.center).map_err(io)?;
    writeln!(out, "singularity {}", c.singularity).map_err(io)?;
    writeln!(out, "chamber     {}", c.chamber.display(&names)).map_err(io)?;
    writeln!(
        out,
        "curve       {} vertices, {} edges, {} legs",
        c.curve.vertices().len(),
        c.curve.edges().len(),
        c.curve.legs().len()
    )
    .map_err(io)?;
    if let Some(path) = &a.dot {
        let centre = c.center;
        let dot = c.curve.to_dot(&f.name, &names, &|v| {
            if v == centre {
                "singular".into()
            } else {
                String::new()
            }
        });
        write_file(path, &dot)?;
    }
    Ok(0)
}
