//! Random instance generators and independent oracles shared by the
//! property suites. Every generator is driven by a seed so failures replay.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use troplog_core::{
    alignment_chambers, check_balancing, check_positions, complete_divisor, complete_to_toric,
    contraction_radius_for_m, forget_divisor, is_wellspaced, Chamber, ContactMatrix, CurveBuilder,
    Divisor, Edge, EdgeId, FormOrdering, LegId, LinearForm, MonoidForm, TargetModel, TropicalCurve,
    TropicalMap, Vertex, VertexId,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn int(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn linear(m: &MonoidForm) -> LinearForm {
    m.as_linear().clone()
}

fn monoid(f: LinearForm) -> MonoidForm {
    MonoidForm::new(f).expect("nonnegative by construction")
}

// ---------------------------------------------------------------------------
// Curves
// ---------------------------------------------------------------------------

pub struct RandomCurve {
    pub curve: TropicalCurve,
    pub num_params: usize,
}

/// A connected genus-one curve with at most `max_edges` edges: a random tree
/// with either one genus-one vertex or one extra edge closing a cycle. Edge
/// lengths reuse parameters now and then so that distance ties occur.
pub fn random_genus_one_curve(r: &mut ChaCha8Rng, max_edges: usize) -> RandomCurve {
    let with_cycle = r.gen_bool(0.5);
    let tree_edges = if with_cycle {
        r.gen_range(0..max_edges)
    } else {
        r.gen_range(0..=max_edges)
    };
    let n = tree_edges + 1;
    let mut ends: Vec<(u32, u32)> = (1..n)
        .map(|v| (r.gen_range(0..v) as u32, v as u32))
        .collect();
    if with_cycle {
        let a = r.gen_range(0..n) as u32;
        let b = r.gen_range(0..n) as u32;
        ends.push((a.min(b), a.max(b)));
    }
    let elliptic = r.gen_range(0..n) as u32;
    let mut b = CurveBuilder::new();
    for v in 0..n as u32 {
        b = b.vertex(v, u32::from(!with_cycle && v == elliptic));
    }
    let mut params = 0;
    for &(a, c) in &ends {
        let len = if params > 0 && r.gen_bool(0.2) {
            MonoidForm::var(r.gen_range(0..params))
        } else if params > 0 && r.gen_bool(0.15) {
            let old = r.gen_range(0..params);
            params += 1;
            MonoidForm::sum_of(&[old, params - 1])
        } else {
            params += 1;
            MonoidForm::var(params - 1)
        };
        b = b.edge(a, c, len);
    }
    for v in 0..n as u32 {
        let k = r.gen_range(0..3);
        b = b.legs(v, k);
    }
    RandomCurve {
        curve: b.build().expect("valid random curve"),
        num_params: params,
    }
}

pub fn random_point(r: &mut ChaCha8Rng, n: usize, max: i64) -> Vec<BigRational> {
    (0..n).map(|_| int(r.gen_range(1..=max))).collect()
}

/// Circuit vertices found by stripping leaves, or the genus-one vertex.
pub fn oracle_circuit(c: &TropicalCurve) -> BTreeSet<VertexId> {
    if let Some(v) = c.vertices().iter().find(|v| v.genus == 1) {
        return BTreeSet::from([v.id]);
    }
    let mut alive: BTreeSet<VertexId> = c.vertices().iter().map(|v| v.id).collect();
    loop {
        let leaf = alive.iter().copied().find(|&v| {
            let deg: usize = c
                .edges()
                .iter()
                .filter(|e| alive.contains(&e.ends.0) && alive.contains(&e.ends.1))
                .map(|e| usize::from(e.ends.0 == v) + usize::from(e.ends.1 == v))
                .sum();
            deg <= 1
        });
        match leaf {
            Some(v) => {
                alive.remove(&v);
            }
            None => return alive,
        }
    }
}

/// Shortest numeric distance of every vertex to the circuit.
pub fn oracle_lambda(c: &TropicalCurve, point: &[BigRational]) -> BTreeMap<VertexId, BigRational> {
    let mut dist: BTreeMap<VertexId, BigRational> = oracle_circuit(c)
        .into_iter()
        .map(|v| (v, BigRational::zero()))
        .collect();
    // Bellman-Ford: tiny graphs, positive lengths.
    for _ in 0..c.vertices().len() {
        for e in c.edges() {
            let len = e.length.as_linear().evaluate(point);
            for (a, b) in [(e.ends.0, e.ends.1), (e.ends.1, e.ends.0)] {
                if let Some(da) = dist.get(&a).cloned() {
                    let cand = da + &len;
                    if dist.get(&b).is_none_or(|db| cand < *db) {
                        dist.insert(b, cand);
                    }
                }
            }
        }
    }
    dist
}

/// The alignment chambers partition the positive orthant: each is feasible
/// and radially aligned, and every sampled positive point lies in exactly one.
pub fn check_chamber_partition(rc: &RandomCurve, r: &mut ChaCha8Rng) -> Result<usize, String> {
    let chambers = alignment_chambers(&rc.curve).map_err(|e| e.to_string())?;
    if chambers.is_empty() {
        return Err("no chambers".into());
    }
    for ch in &chambers {
        if !ch.is_feasible().map_err(|e| e.to_string())? {
            return Err(format!("infeasible chamber {ch:?}"));
        }
        if !rc
            .curve
            .is_radially_aligned(ch)
            .map_err(|e| e.to_string())?
        {
            return Err("chamber does not align the curve".into());
        }
    }
    if chambers.len() <= 12 {
        for i in 0..chambers.len() {
            for j in i + 1..chambers.len() {
                let both = chambers[i].with_constraints(chambers[j].constraints().iter().cloned());
                if both.is_feasible().map_err(|e| e.to_string())? {
                    return Err(format!("chambers {i} and {j} overlap"));
                }
            }
        }
    }
    for _ in 0..8 {
        let p = random_point(r, rc.num_params, 6);
        let hits = chambers.iter().filter(|ch| ch.contains_point(&p)).count();
        if hits != 1 {
            return Err(format!("point {p:?} lies in {hits} chambers"));
        }
    }
    Ok(chambers.len())
}

/// Distances agree with an independent shortest-path computation.
pub fn check_lambda(rc: &RandomCurve, r: &mut ChaCha8Rng) -> Result<(), String> {
    let dist = rc.curve.distances().map_err(|e| e.to_string())?;
    let circuit = rc.curve.circuit().map_err(|e| e.to_string())?;
    if circuit.vertices != oracle_circuit(&rc.curve) {
        return Err("circuit differs from leaf stripping".into());
    }
    for _ in 0..4 {
        let p = random_point(r, rc.num_params, 20);
        let want = oracle_lambda(&rc.curve, &p);
        for (v, d) in &dist {
            if d.as_linear().evaluate(&p) != want[v] {
                return Err(format!("lambda({v}) mismatch at {p:?}"));
            }
        }
    }
    Ok(())
}

/// Contraction radii never decrease as the required valence grows.
pub fn check_radius_monotone(rc: &RandomCurve, r: &mut ChaCha8Rng) -> Result<(), String> {
    let chambers = alignment_chambers(&rc.curve).map_err(|e| e.to_string())?;
    let ch = chambers.choose(r).expect("at least one chamber");
    let mut prev = None;
    for m in 1..=rc.curve.legs().len() + rc.curve.edges().len() + 2 {
        if let Ok(rad) = contraction_radius_for_m(&rc.curve, m, ch) {
            if let Some((pm, p)) = &prev {
                let o = troplog_core::Radius::compare(p, &rad, ch).map_err(|e| e.to_string())?;
                if o == std::cmp::Ordering::Greater {
                    return Err(format!("radius for m={m} is below the one for m={pm}"));
                }
            }
            prev = Some((m, rad));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Maps
// ---------------------------------------------------------------------------

/// A genus-one map on a tree of at most `max_vertices` vertices (plus a loop
/// when no vertex is elliptic) to a product of at most two projective
/// spaces, with a random partial toric boundary. Edge slopes point away
/// from vertex 0; degrees and contact legs are chosen to satisfy the local
/// degree condition at every vertex.
pub fn random_map(r: &mut ChaCha8Rng, max_vertices: usize) -> (TropicalMap, Chamber) {
    let nf = r.gen_range(1..=2);
    let factors: Vec<u32> = (0..nf).map(|_| r.gen_range(1..=2)).collect();
    let mut divisors = Vec::new();
    for (i, &n) in factors.iter().enumerate() {
        for c in 0..=n {
            if r.gen_bool(0.5) {
                divisors.push(Divisor {
                    factor: i,
                    coord: c as usize,
                });
            }
        }
    }
    divisors.shuffle(r);
    let target = TargetModel::new(factors.clone(), divisors.clone()).expect("valid target");
    let nd = divisors.len();

    let n = r.gen_range(1..=max_vertices);
    let parents: Vec<usize> = (1..n).map(|v| r.gen_range(0..v)).collect();
    let with_loop = r.gen_bool(0.3);
    let elliptic = r.gen_range(0..n);
    let num_edges = n - 1 + usize::from(with_loop);
    let height = num_edges;
    let num_params = num_edges + 1;

    let root: Vec<LinearForm> = (0..nd)
        .map(|_| {
            if r.gen_bool(0.5) {
                LinearForm::var(height)
            } else {
                LinearForm::zero()
            }
        })
        .collect();
    let mut pos = vec![root];
    let mut slopes = Vec::new();
    for (k, &p) in parents.iter().enumerate() {
        let s: Vec<i64> = (0..nd).map(|_| r.gen_range(0..=2)).collect();
        let here = (0..nd)
            .map(|j| &pos[p][j] + &(&LinearForm::var(k) * s[j]))
            .collect();
        pos.push(here);
        slopes.push(s);
    }
    let mut out = vec![vec![0i64; nd]; n];
    for (k, &p) in parents.iter().enumerate() {
        for j in 0..nd {
            out[p][j] += slopes[k][j];
            out[k + 1][j] -= slopes[k][j];
        }
    }

    let mut b = CurveBuilder::new();
    for v in 0..n {
        b = b.vertex(v as u32, u32::from(!with_loop && v == elliptic));
    }
    for (k, &p) in parents.iter().enumerate() {
        b = b.edge(p as u32, k as u32 + 1, MonoidForm::var(k));
    }
    let mut edge_slopes: BTreeMap<EdgeId, Vec<i64>> = slopes
        .iter()
        .enumerate()
        .map(|(k, s)| (EdgeId(k as u32), s.clone()))
        .collect();
    if with_loop {
        let v = r.gen_range(0..n) as u32;
        b = b.edge(v, v, MonoidForm::var(n - 1));
        edge_slopes.insert(EdgeId(n as u32 - 1), vec![0; nd]);
    }

    let mut multidegree = BTreeMap::new();
    let mut rows: Vec<Vec<u32>> = Vec::new();
    let mut leg_vertex = Vec::new();
    for v in 0..n {
        let mut deg = Vec::with_capacity(nf);
        for i in 0..nf {
            let need = divisors
                .iter()
                .enumerate()
                .filter(|(_, d)| d.factor == i)
                .map(|(j, _)| out[v][j])
                .max()
                .unwrap_or(0)
                .max(0);
            deg.push((need + r.gen_range(0..=1)) as u32);
        }
        for (j, d) in divisors.iter().enumerate() {
            let mut c = i64::from(deg[d.factor]) - out[v][j];
            while c > 0 {
                let part = if c >= 2 && r.gen_bool(0.3) { 2 } else { 1 };
                let mut row = vec![0u32; nd];
                row[j] = part as u32;
                rows.push(row);
                leg_vertex.push(v as u32);
                c -= part;
            }
        }
        if r.gen_bool(0.2) {
            rows.push(vec![0; nd]);
            leg_vertex.push(v as u32);
        }
        multidegree.insert(VertexId(v as u32), deg);
    }
    for (i, &v) in leg_vertex.iter().enumerate() {
        b = b.leg(v, &format!("p{}", i + 1));
    }
    let curve = b.build().expect("valid random map curve");
    let position = pos
        .into_iter()
        .enumerate()
        .map(|(v, p)| (VertexId(v as u32), p.into_iter().map(monoid).collect()))
        .collect();
    let leg_slopes = rows
        .iter()
        .enumerate()
        .map(|(i, row)| (LegId(i as u32), row.iter().map(|&x| i64::from(x)).collect()))
        .collect();
    let contact = ContactMatrix::new(nd, rows).expect("rows have the divisor count");
    let map = TropicalMap::new(
        curve,
        target,
        multidegree,
        position,
        edge_slopes,
        leg_slopes,
        contact,
    )
    .expect("valid map");
    (map, Chamber::top(num_params))
}

/// Net outgoing slope of `v` over all divisor coordinates.
fn net_slope(m: &TropicalMap, v: VertexId) -> Vec<i64> {
    let nd = m.target.num_divisors();
    let mut total = vec![0i64; nd];
    for e in m.curve.edges() {
        let s = &m.edge_slopes[&e.id];
        if e.is_loop() {
            continue;
        }
        let sign = if e.ends.0 == v {
            1
        } else if e.ends.1 == v {
            -1
        } else {
            0
        };
        for j in 0..nd {
            total[j] += sign * s[j];
        }
    }
    for l in m.curve.legs().iter().filter(|l| l.vertex == v) {
        for j in 0..nd {
            total[j] += m.leg_slopes[&l.id][j];
        }
    }
    total
}

/// Balanced in the fan of each full factor: the outgoing slope sum has the
/// same component along every coordinate hyperplane of that factor.
pub fn oracle_balanced(m: &TropicalMap) -> bool {
    m.curve.vertices().iter().all(|v| {
        let net = net_slope(m, v.id);
        (0..m.target.factors().len()).all(|i| {
            let comps: BTreeSet<i64> = m
                .target
                .divisors()
                .iter()
                .enumerate()
                .filter(|(_, d)| d.factor == i)
                .map(|(j, _)| net[j])
                .collect();
            comps.len() <= 1
        })
    })
}

/// Completion keeps the map valid and makes it balanced, and the library
/// agrees with the direct slope-sum oracle.
pub fn check_balancing_conservation(m: &TropicalMap, ch: &Chamber) -> Result<(), String> {
    if !check_positions(m, ch).map_err(|e| e.to_string())?.is_ok() {
        return Err("generated map violates its own conditions".into());
    }
    let full = complete_to_toric(m).map_err(|e| e.to_string())?;
    if !full.target.is_full_toric() {
        return Err("completion left a factor incomplete".into());
    }
    if !check_positions(&full, ch)
        .map_err(|e| e.to_string())?
        .is_ok()
    {
        return Err("completed map violates position conditions".into());
    }
    let report = check_balancing(&full).map_err(|e| e.to_string())?;
    if !report.is_balanced() {
        return Err(format!("imbalance {:?}", report.imbalances));
    }
    if !oracle_balanced(&full) {
        return Err("slope-sum oracle finds an imbalance".into());
    }
    let added: usize = full.contact.num_markings() - m.contact.num_markings();
    let expected: usize = full
        .target
        .divisors()
        .iter()
        .filter(|d| !m.target.divisors().contains(d))
        .map(|d| {
            m.multidegree
                .values()
                .map(|deg| deg[d.factor] as usize)
                .sum::<usize>()
        })
        .sum();
    if added != expected {
        return Err(format!("added {added} legs, expected {expected}"));
    }
    Ok(())
}

/// Adding one missing divisor and forgetting it again is the identity.
pub fn check_complete_forget(m: &TropicalMap) -> Result<usize, String> {
    let mut checked = 0;
    for i in 0..m.target.factors().len() {
        if m.target.missing(i).is_empty() {
            continue;
        }
        let lifted = complete_divisor(m, i).map_err(|e| e.to_string())?;
        let j = lifted
            .target
            .divisors()
            .iter()
            .position(|d| !m.target.divisors().contains(d))
            .ok_or("no divisor was added")?;
        let back = forget_divisor(&lifted, j).map_err(|e| e.to_string())?;
        if back != *m {
            return Err(format!(
                "forgetting divisor {j} of factor {i} does not undo completion"
            ));
        }
        checked += 1;
    }
    Ok(checked)
}

// ---------------------------------------------------------------------------
// Contracted circuits
// ---------------------------------------------------------------------------

/// One branch hanging off the contracted elliptic vertex: an edge of slope 0
/// to `w` at distance level `level`, then an edge of slope `s` and shared
/// length `z` to `u`. Both `w` and `u` have degree one; their legs make up
/// the remaining contact.
#[derive(Clone, Debug)]
pub struct Branch {
    pub level: usize,
    pub s: Vec<i64>,
}

/// Levels take parameters `0..LEVELS`, then `z`, then the height `h`, in the
/// chamber `x0 < x1 < x2 < z`.
pub const LEVELS: usize = 3;
const Z: usize = LEVELS;
const H: usize = LEVELS + 1;

#[derive(Clone, Debug)]
pub struct Contracted {
    pub r: usize,
    pub branches: Vec<Branch>,
    pub map: TropicalMap,
    pub chamber: Chamber,
}

fn unit_legs(c: &[i64]) -> Vec<Vec<u32>> {
    let top = c.iter().copied().max().unwrap_or(0);
    (1..=top)
        .map(|k| c.iter().map(|&x| u32::from(x >= k)).collect())
        .collect()
}

pub fn contracted_chamber() -> Chamber {
    let c = |a: usize, b: usize| {
        troplog_core::Constraint::new(
            MonoidForm::var(a),
            troplog_core::Relation::Less,
            MonoidForm::var(b),
        )
    };
    Chamber::new(H + 1, vec![c(0, 1), c(1, 2), c(2, Z)])
}

pub fn build_contracted(r: usize, branches: &[Branch]) -> TropicalMap {
    let divisors = (0..r)
        .map(|c| Divisor {
            factor: 0,
            coord: c,
        })
        .collect();
    let target = TargetModel::new(vec![r as u32], divisors).expect("valid target");
    let base: LinearForm = &LinearForm::var(Z) + &LinearForm::var(H);
    let mut b = CurveBuilder::new().vertex(0, 1);
    let mut multidegree = BTreeMap::from([(VertexId(0), vec![0])]);
    let mut position = BTreeMap::from([(VertexId(0), vec![monoid(base.clone()); r])]);
    let mut edge_slopes = BTreeMap::new();
    let mut rows = Vec::new();
    let mut leg_at = Vec::new();
    for (k, br) in branches.iter().enumerate() {
        let w = 2 * k as u32 + 1;
        let u = w + 1;
        b = b.vertex(w, 0).vertex(u, 0);
        b = b
            .edge(0, w, MonoidForm::var(br.level))
            .edge(w, u, MonoidForm::var(Z));
        edge_slopes.insert(EdgeId(2 * k as u32), vec![0; r]);
        edge_slopes.insert(EdgeId(2 * k as u32 + 1), br.s.clone());
        multidegree.insert(VertexId(w), vec![1]);
        multidegree.insert(VertexId(u), vec![1]);
        position.insert(VertexId(w), vec![monoid(base.clone()); r]);
        let up: Vec<MonoidForm> =
            br.s.iter()
                .map(|&s| monoid(&base + &(&LinearForm::var(Z) * s)))
                .collect();
        position.insert(VertexId(u), up);
        let cw: Vec<i64> = br.s.iter().map(|s| 1 - s).collect();
        let cu: Vec<i64> = br.s.iter().map(|s| 1 + s).collect();
        for row in unit_legs(&cw) {
            rows.push(row);
            leg_at.push(w);
        }
        for row in unit_legs(&cu) {
            rows.push(row);
            leg_at.push(u);
        }
    }
    for (i, &v) in leg_at.iter().enumerate() {
        b = b.leg(v, &format!("p{}", i + 1));
    }
    let curve = b.build().expect("valid contracted curve");
    let leg_slopes = rows
        .iter()
        .enumerate()
        .map(|(i, row)| (LegId(i as u32), row.iter().map(|&x| i64::from(x)).collect()))
        .collect();
    let contact = ContactMatrix::new(r, rows).expect("rows have the divisor count");
    TropicalMap::new(
        curve,
        target,
        multidegree,
        position,
        edge_slopes,
        leg_slopes,
        contact,
    )
    .expect("valid map")
}

pub fn random_contracted(rng: &mut ChaCha8Rng, max_r: usize) -> Contracted {
    let r = rng.gen_range(1..=max_r);
    let k = rng.gen_range(1..=5);
    let branches: Vec<Branch> = (0..k)
        .map(|_| Branch {
            level: rng.gen_range(0..LEVELS),
            s: (0..r).map(|_| rng.gen_range(-1..=1)).collect(),
        })
        .collect();
    let map = build_contracted(r, &branches);
    Contracted {
        r,
        branches,
        map,
        chamber: contracted_chamber(),
    }
}

/// Exhaustive search over covectors with entries in `[-3, 3]`, on numeric
/// distances `level + 1` and `z = 10`.
pub fn oracle_wellspaced(inst: &Contracted, threshold: usize) -> bool {
    let r = inst.r;
    let dot = |a: &[i64], b: &[i64]| -> i64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
    let mut chi = vec![-3i64; r];
    loop {
        if chi.iter().any(|&c| c != 0) {
            let mut flags = Vec::new();
            for br in &inst.branches {
                let d = br.level as i64 + 1;
                let cw: Vec<i64> = br.s.iter().map(|s| 1 - s).collect();
                let cu: Vec<i64> = br.s.iter().map(|s| 1 + s).collect();
                if dot(&chi, &br.s) != 0 {
                    flags.push(d);
                } else {
                    for row in unit_legs(&cu) {
                        let row: Vec<i64> = row.iter().map(|&x| i64::from(x)).collect();
                        if dot(&chi, &row) != 0 {
                            flags.push(d + 10);
                        }
                    }
                }
                for row in unit_legs(&cw) {
                    let row: Vec<i64> = row.iter().map(|&x| i64::from(x)).collect();
                    if dot(&chi, &row) != 0 {
                        flags.push(d);
                    }
                }
            }
            if let Some(&min) = flags.iter().min() {
                if flags.iter().filter(|&&f| f == min).count() < threshold {
                    return false;
                }
            }
        }
        let mut i = 0;
        while i < r && chi[i] == 3 {
            chi[i] = -3;
            i += 1;
        }
        if i == r {
            return true;
        }
        chi[i] += 1;
    }
}

/// Every length and position multiplied by `k`.
pub fn rescaled(m: &TropicalMap, k: i64) -> TropicalMap {
    let scale = |f: &MonoidForm| monoid(&linear(f) * k);
    let edges = m
        .curve
        .edges()
        .iter()
        .map(|e| Edge {
            id: e.id,
            ends: e.ends,
            length: scale(&e.length),
        })
        .collect();
    let curve = TropicalCurve::new(m.curve.vertices().to_vec(), edges, m.curve.legs().to_vec())
        .expect("same shape");
    let position = m
        .position
        .iter()
        .map(|(v, p)| (*v, p.iter().map(scale).collect()))
        .collect();
    TropicalMap {
        curve,
        position,
        ..m.clone()
    }
}

/// Inserts a two-valent vertex at the midpoint of edge `id`, whose length
/// must be even in every coefficient.
pub fn subdivided(m: &TropicalMap, id: EdgeId) -> TropicalMap {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let e = m.curve.edge(id).expect("edge exists").clone();
    let l = e.length.as_linear().scale(&half);
    let mid = VertexId(m.curve.vertices().iter().map(|v| v.id.0).max().unwrap_or(0) + 1);
    let new_edge = EdgeId(m.curve.edges().iter().map(|e| e.id.0).max().unwrap_or(0) + 1);
    let mut vertices = m.curve.vertices().to_vec();
    vertices.push(Vertex { id: mid, genus: 0 });
    let mut edges: Vec<Edge> = m
        .curve
        .edges()
        .iter()
        .map(|x| {
            if x.id == id {
                Edge {
                    id,
                    ends: (e.ends.0, mid),
                    length: monoid(l.clone()),
                }
            } else {
                x.clone()
            }
        })
        .collect();
    edges.push(Edge {
        id: new_edge,
        ends: (mid, e.ends.1),
        length: monoid(l.clone()),
    });
    let curve = TropicalCurve::new(vertices, edges, m.curve.legs().to_vec())
        .expect("subdivision is a curve");
    let s = m.edge_slopes[&id].clone();
    let start = &m.position[&e.ends.0];
    let mid_pos = start
        .iter()
        .zip(&s)
        .map(|(p, &sj)| monoid(&linear(p) + &(&l * sj)))
        .collect();
    let mut out = TropicalMap { curve, ..m.clone() };
    out.position.insert(mid, mid_pos);
    out.multidegree
        .insert(mid, vec![0; m.target.factors().len()]);
    out.edge_slopes.insert(new_edge, s);
    out
}

/// The verdict survives rescaling by 2 and then subdividing a random edge.
pub fn check_wellspaced_invariance(
    inst: &Contracted,
    r: &mut ChaCha8Rng,
    threshold: usize,
) -> Result<bool, String> {
    let verdict = |m: &TropicalMap| -> Result<bool, String> {
        if !check_positions(m, &inst.chamber)
            .map_err(|e| e.to_string())?
            .is_ok()
        {
            return Err("map violates position conditions".into());
        }
        Ok(is_wellspaced(m, &inst.chamber, threshold)
            .map_err(|e| e.to_string())?
            .well_spaced)
    };
    let base = verdict(&inst.map)?;
    let factor = r.gen_range(2..=4);
    if verdict(&rescaled(&inst.map, factor))? != base {
        return Err(format!("rescaling by {factor} changes the verdict"));
    }
    let doubled = rescaled(&inst.map, 2);
    let ids: Vec<EdgeId> = doubled.curve.edges().iter().map(|e| e.id).collect();
    let id = *ids.choose(r).expect("at least one edge");
    if verdict(&subdivided(&doubled, id))? != base {
        return Err(format!("subdividing {id} changes the verdict"));
    }
    Ok(base)
}

/// The library's covector test agrees with the exhaustive oracle.
pub fn check_covector_oracle(inst: &Contracted, threshold: usize) -> Result<bool, String> {
    let got = is_wellspaced(&inst.map, &inst.chamber, threshold)
        .map_err(|e| e.to_string())?
        .well_spaced;
    let want = oracle_wellspaced(inst, threshold);
    if got != want {
        return Err(format!(
            "library says {got}, oracle says {want} for {:?}",
            inst.branches
        ));
    }
    Ok(got)
}

pub fn ordering_is_total(ch: &Chamber, a: &LinearForm, b: &LinearForm) -> bool {
    ch.compare(a, b)
        .map(|o| o != FormOrdering::Incomparable)
        .unwrap_or(false)
}
