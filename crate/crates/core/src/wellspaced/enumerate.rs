use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{is_wellspaced, WsError, DEFAULT_THRESHOLD};
use crate::contact::ContactMatrix;
use crate::curve::{Edge, EdgeId, Leg, LegId, TropicalCurve, Vertex, VertexId};
use crate::forms::{
    Chamber, Constraint, FormOrdering, LinearForm, MonoidForm, ParamNames, Relation,
};
use crate::tropmap::{
    expand, is_transverse, realize_nonneg, Subdivision, TargetModel, TropicalMap,
};

pub const DEFAULT_ENUMERATION_GUARD: u64 = 200_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationRequest {
    pub target: TargetModel,
    pub markings: usize,
    pub degree: Vec<u32>,
    pub max_vertices: usize,
    /// Contact orders of the markings; required when the target has divisors.
    pub contact: Option<ContactMatrix>,
    pub threshold: usize,
    /// Upper bound on the number of labelled skeleton decorations examined.
    pub guard: u64,
}

impl EnumerationRequest {
    pub fn new(
        target: TargetModel,
        markings: usize,
        degree: Vec<u32>,
        max_vertices: usize,
    ) -> Self {
        Self {
            target,
            markings,
            degree,
            max_vertices,
            contact: None,
            threshold: DEFAULT_THRESHOLD,
            guard: DEFAULT_ENUMERATION_GUARD,
        }
    }
}

/// One cone of the tropical moduli space: a decorated skeleton with slopes,
/// a chamber of edge lengths, and its flags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratumType {
    pub map: TropicalMap,
    pub chamber: Chamber,
    pub aligned: bool,
    pub transverse: bool,
    pub well_spaced: bool,
}

impl StratumType {
    pub fn names(&self) -> ParamNames {
        ParamNames::generic(self.map.curve.edges().len()).extended_to(self.chamber.num_params())
    }

    /// A single deterministic line describing the stratum.
    pub fn listing_line(&self) -> String {
        let names = self.names();
        let m = &self.map;
        let with_slopes = m.target.num_divisors() > 0;
        let vertices: Vec<String> = m
            .curve
            .vertices()
            .iter()
            .map(|v| format!("{}[g={} d={}]", v.id, v.genus, tuple(&m.multidegree[&v.id])))
            .collect();
        let edges: Vec<String> = m
            .curve
            .edges()
            .iter()
            .map(|e| {
                let slope = if with_slopes {
                    format!(" s={}", tuple(&m.edge_slopes[&e.id]))
                } else {
                    String::new()
                };
                format!(
                    "{}-{}:{}{slope}",
                    e.ends.0,
                    e.ends.1,
                    e.length.display(&names)
                )
            })
            .collect();
        let legs: Vec<String> = m
            .curve
            .legs()
            .iter()
            .map(|l| format!("{}@{}", l.label, l.vertex))
            .collect();
        let yn = |b: bool| if b { "yes" } else { "no" };
        format!(
            "V={} E={} | {} | {} | {} | chamber {} | aligned={} transverse={} well_spaced={}",
            m.curve.vertices().len(),
            m.curve.edges().len(),
            vertices.join(" "),
            if edges.is_empty() {
                "-".to_string()
            } else {
                edges.join(" ")
            },
            if legs.is_empty() {
                "-".to_string()
            } else {
                legs.join(" ")
            },
            self.chamber.display(&names),
            yn(self.aligned),
            yn(self.transverse),
            yn(self.well_spaced)
        )
    }

    pub fn to_dot(&self, name: &str) -> String {
        let m = &self.map;
        m.curve.to_dot(name, &self.names(), &|v| {
            format!("d={}", tuple(&m.multidegree[&v]))
        })
    }
}

fn tuple<T: ToString>(xs: &[T]) -> String {
    let parts: Vec<String> = xs.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(","))
}

/// A labelled decorated skeleton. Edges are stored with `a <= b` and slopes
/// oriented from `a` to `b`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Config {
    genus: Vec<u32>,
    degree: Vec<Vec<u32>>,
    marking_vertex: Vec<usize>,
    edges: Vec<(usize, usize)>,
    slopes: Vec<Vec<i64>>,
}

type Encoding = (
    Vec<(u32, Vec<u32>, Vec<usize>)>,
    Vec<(usize, usize, Vec<i64>)>,
);

impl Config {
    fn num_vertices(&self) -> usize {
        self.genus.len()
    }

    fn encode(&self, perm: &[usize]) -> Encoding {
        let n = self.num_vertices();
        let mut verts = vec![(0, Vec::new(), Vec::new()); n];
        for v in 0..n {
            let marks: Vec<usize> = (0..self.marking_vertex.len())
                .filter(|&i| self.marking_vertex[i] == v)
                .collect();
            verts[perm[v]] = (self.genus[v], self.degree[v].clone(), marks);
        }
        let mut edges: Vec<(usize, usize, Vec<i64>)> = self
            .edges
            .iter()
            .zip(&self.slopes)
            .map(|(&(a, b), s)| {
                let (pa, pb) = (perm[a], perm[b]);
                if pa <= pb {
                    (pa, pb, s.clone())
                } else {
                    (pb, pa, s.iter().map(|x| -x).collect())
                }
            })
            .collect();
        edges.sort();
        (verts, edges)
    }

    fn from_encoding(enc: &Encoding) -> Self {
        let (verts, edges) = enc;
        let mut marking_vertex = vec![0; verts.iter().map(|v| v.2.len()).sum()];
        for (v, (_, _, marks)) in verts.iter().enumerate() {
            for &i in marks {
                marking_vertex[i] = v;
            }
        }
        Config {
            genus: verts.iter().map(|v| v.0).collect(),
            degree: verts.iter().map(|v| v.1.clone()).collect(),
            marking_vertex,
            edges: edges.iter().map(|e| (e.0, e.1)).collect(),
            slopes: edges.iter().map(|e| e.2.clone()).collect(),
        }
    }

    /// Minimal encoding over all relabellings, and the relabellings that attain it.
    fn canonical(&self) -> (Encoding, Vec<Vec<usize>>) {
        let mut best: Option<Encoding> = None;
        let mut autos = Vec::new();
        for p in permutations(self.num_vertices()) {
            let enc = self.encode(&p);
            match &best {
                Some(b) if enc > *b => {}
                Some(b) if enc == *b => autos.push(p),
                _ => {
                    best = Some(enc);
                    autos = vec![p];
                }
            }
        }
        (best.expect("at least one permutation"), autos)
    }

    fn valence(&self, v: usize) -> usize {
        let germs: usize = self
            .edges
            .iter()
            .map(|&(a, b)| usize::from(a == v) + usize::from(b == v))
            .sum();
        germs + self.marking_vertex.iter().filter(|&&w| w == v).count()
    }

    fn is_stable(&self) -> bool {
        (0..self.num_vertices()).all(|v| {
            if self.degree[v].iter().any(|d| *d > 0) {
                return true;
            }
            match self.genus[v] {
                0 => self.valence(v) >= 3,
                _ => self.valence(v) >= 1,
            }
        })
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Labelled trees on `n` vertices via Prüfer sequences.
fn labelled_trees(n: usize) -> Vec<Vec<(usize, usize)>> {
    if n == 1 {
        return vec![vec![]];
    }
    if n == 2 {
        return vec![vec![(0, 1)]];
    }
    let mut out = Vec::new();
    let total = n.pow((n - 2) as u32);
    for code in 0..total {
        let mut seq = Vec::with_capacity(n - 2);
        let mut c = code;
        for _ in 0..n - 2 {
            seq.push(c % n);
            c /= n;
        }
        let mut degree = vec![1usize; n];
        for &s in &seq {
            degree[s] += 1;
        }
        let mut edges = Vec::with_capacity(n - 1);
        for &s in &seq {
            let leaf = (0..n).find(|&v| degree[v] == 1).expect("a leaf exists");
            edges.push((leaf.min(s), leaf.max(s)));
            degree[leaf] -= 1;
            degree[s] -= 1;
        }
        let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
        edges.push((rest[0], rest[1]));
        out.push(edges);
    }
    out
}

/// Ways to write `total` as an ordered sum of `parts` nonnegative integers.
fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Upper bound on the labelled decorations examined for `n` vertices.
fn search_size(req: &EnumerationRequest, n: usize) -> u64 {
    let n64 = n as u64;
    let trees = n64.saturating_pow(n.saturating_sub(2) as u32);
    let extra = 1 + n64 * (n64 + 1) / 2;
    let degrees = req.degree.iter().fold(1u64, |acc, &d| {
        acc.saturating_mul(binomial(u64::from(d) + n64 - 1, n64 - 1))
    });
    let marks = n64.saturating_pow(req.markings as u32);
    trees
        .saturating_mul(extra)
        .saturating_mul(n64)
        .saturating_mul(degrees)
        .saturating_mul(marks)
}

/// Net outgoing edge slope each vertex needs in divisor coordinate `j`.
fn demands(cfg: &Config, target: &TargetModel, contact: &ContactMatrix, j: usize) -> Vec<i64> {
    let factor = target.divisors()[j].factor;
    let mut b: Vec<i64> = cfg.degree.iter().map(|d| i64::from(d[factor])).collect();
    for (i, &v) in cfg.marking_vertex.iter().enumerate() {
        b[v] -= i64::from(contact.row(i)[j]);
    }
    b
}

/// Spanning tree by breadth-first search from vertex 0: returns the parent
/// edge index of each vertex and the list of non-tree edges.
fn spanning_tree(
    n: usize,
    edges: &[(usize, usize)],
) -> (Vec<Option<usize>>, Vec<usize>, Vec<usize>) {
    let mut parent = vec![None; n];
    let mut seen = vec![false; n];
    let mut order = vec![0];
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    let mut used = vec![false; edges.len()];
    while let Some(u) = queue.pop_front() {
        for (k, &(a, b)) in edges.iter().enumerate() {
            if used[k] || (a != u && b != u) {
                continue;
            }
            let w = if a == u { b } else { a };
            if !seen[w] {
                seen[w] = true;
                used[k] = true;
                parent[w] = Some(k);
                order.push(w);
                queue.push_back(w);
            }
        }
    }
    let non_tree = (0..edges.len()).filter(|&k| !used[k]).collect();
    (parent, non_tree, order)
}

/// Every integral slope assignment meeting the vertex demands of one
/// coordinate. A non-loop cycle edge carries a free circulation bounded by
/// the total absolute demand, which contains every value that can close up.
fn slope_options(cfg: &Config, b: &[i64]) -> Vec<Vec<i64>> {
    let n = cfg.num_vertices();
    let (parent, non_tree, order) = spanning_tree(n, &cfg.edges);
    let bound: i64 = b.iter().map(|x| x.abs()).sum();
    let circulations: Vec<Option<(usize, i64)>> = match non_tree.first() {
        None => vec![None],
        Some(&k) if cfg.edges[k].0 == cfg.edges[k].1 => vec![Some((k, 0))],
        Some(&k) => (-bound..=bound).map(|c| Some((k, c))).collect(),
    };
    let mut out = Vec::new();
    for circ in circulations {
        let mut slopes = vec![0i64; cfg.edges.len()];
        let mut need = b.to_vec();
        if let Some((k, c)) = circ {
            let (a, bb) = cfg.edges[k];
            slopes[k] = c;
            need[a] -= c;
            need[bb] += c;
        }
        // Children before parents: the edge above a subtree carries its total demand.
        let mut subtotal = need.clone();
        for &v in order.iter().rev() {
            if let Some(k) = parent[v] {
                let (a, bb) = cfg.edges[k];
                let p = if a == v { bb } else { a };
                // Slope from parent into v equals minus the subtree demand.
                let s_pv = -subtotal[v];
                slopes[k] = if a == p { s_pv } else { -s_pv };
                subtotal[p] += subtotal[v];
            }
        }
        if subtotal[0] == 0 {
            out.push(slopes);
        }
    }
    out
}

fn labelled_configs(req: &EnumerationRequest, contact: &ContactMatrix, n: usize) -> Vec<Config> {
    let mut out = Vec::new();
    let nd = req.target.num_divisors();
    let degree_choices: Vec<Vec<Vec<u32>>> =
        req.degree.iter().map(|&d| compositions(d, n)).collect();
    let mut degree_assignments: Vec<Vec<Vec<u32>>> = vec![vec![Vec::new(); n]];
    for per_factor in &degree_choices {
        let mut next = Vec::new();
        for partial in &degree_assignments {
            for comp in per_factor {
                let mut p = partial.clone();
                for v in 0..n {
                    p[v].push(comp[v]);
                }
                next.push(p);
            }
        }
        degree_assignments = next;
    }
    let marking_count = n.pow(req.markings as u32);
    for tree in labelled_trees(n) {
        let mut shapes = vec![(tree.clone(), None)];
        for a in 0..n {
            for b in a..n {
                let mut e = tree.clone();
                e.push((a, b));
                shapes.push((e, Some(())));
            }
        }
        for (edges, extra) in shapes {
            let genus_choices: Vec<Vec<u32>> = match extra {
                Some(()) => vec![vec![0; n]],
                None => (0..n)
                    .map(|g| (0..n).map(|v| u32::from(v == g)).collect())
                    .collect(),
            };
            for genus in &genus_choices {
                for degree in &degree_assignments {
                    for code in 0..marking_count {
                        let mut marking_vertex = Vec::with_capacity(req.markings);
                        let mut c = code;
                        for _ in 0..req.markings {
                            marking_vertex.push(c % n);
                            c /= n;
                        }
                        let base = Config {
                            genus: genus.clone(),
                            degree: degree.clone(),
                            marking_vertex,
                            edges: edges.clone(),
                            slopes: vec![Vec::new(); edges.len()],
                        };
                        if !base.is_stable() {
                            continue;
                        }
                        let mut with_slopes = vec![base];
                        for j in 0..nd {
                            let mut next = Vec::new();
                            for cfg in &with_slopes {
                                let b = demands(cfg, &req.target, contact, j);
                                for option in slope_options(cfg, &b) {
                                    let mut c = cfg.clone();
                                    for (s, x) in c.slopes.iter_mut().zip(option) {
                                        s.push(x);
                                    }
                                    next.push(c);
                                }
                            }
                            with_slopes = next;
                        }
                        out.extend(with_slopes);
                    }
                }
            }
        }
    }
    out
}

/// Curve, relative positions per coordinate and closing constraints.
type Realized = (TropicalCurve, Vec<Vec<LinearForm>>, Vec<Constraint>);

/// Edge `k` of the canonical configuration gets length parameter `k`.
fn realize_config(cfg: &Config, nd: usize) -> Result<Realized, WsError> {
    let n = cfg.num_vertices();
    let vertices = (0..n)
        .map(|v| Vertex {
            id: VertexId(v as u32),
            genus: cfg.genus[v],
        })
        .collect();
    let edges = cfg
        .edges
        .iter()
        .enumerate()
        .map(|(k, &(a, b))| Edge {
            id: EdgeId(k as u32),
            ends: (VertexId(a as u32), VertexId(b as u32)),
            length: MonoidForm::var(k),
        })
        .collect();
    let legs = cfg
        .marking_vertex
        .iter()
        .enumerate()
        .map(|(i, &v)| Leg {
            id: LegId(i as u32),
            vertex: VertexId(v as u32),
            label: format!("p{}", i + 1),
        })
        .collect();
    let curve = TropicalCurve::new(vertices, edges, legs)?;
    let (parent, non_tree, order) = spanning_tree(n, &cfg.edges);
    let mut rel = vec![vec![LinearForm::zero(); n]; nd];
    for &v in order.iter().skip(1) {
        let k = parent[v].expect("non-root vertices have a parent edge");
        let (a, b) = cfg.edges[k];
        let len = LinearForm::var(k);
        for (row, &s) in rel.iter_mut().zip(&cfg.slopes[k]) {
            row[v] = if a == v {
                &row[b] - &(&len * s)
            } else {
                &row[a] + &(&len * s)
            };
        }
    }
    let mut closing = Vec::new();
    for k in non_tree {
        let (a, b) = cfg.edges[k];
        for (row, &s) in rel.iter().zip(&cfg.slopes[k]) {
            let diff = &(&row[b] - &row[a]) - &(&LinearForm::var(k) * s);
            if !diff.is_zero() {
                closing.push(Constraint::from_difference(&diff, Relation::Equal));
            }
        }
    }
    Ok((curve, rel, closing))
}

/// Rank of each form among the distinct values of `forms` in `ch`.
fn ranks(forms: &[LinearForm], ch: &Chamber) -> Result<Vec<usize>, WsError> {
    let mut out = Vec::with_capacity(forms.len());
    for f in forms {
        let mut r = 0;
        let mut seen: Vec<&LinearForm> = Vec::new();
        for g in forms {
            if ch.compare(g, f)? == FormOrdering::Less
                && !seen
                    .iter()
                    .any(|h| matches!(ch.compare(h, g), Ok(FormOrdering::Equal)))
            {
                seen.push(g);
                r += 1;
            }
        }
        out.push(r);
    }
    Ok(out)
}

/// Enumerates decorated genus-one skeleta with at most `max_vertices`
/// vertices, their alignment chambers, and the flags of each cone.
/// The result is sorted by listing line.
pub fn enumerate_strata(req: &EnumerationRequest) -> Result<Vec<StratumType>, WsError> {
    let nf = req.target.factors().len();
    let nd = req.target.num_divisors();
    if req.degree.len() != nf {
        return Err(WsError::InvalidRequest(format!(
            "degree needs {nf} entries"
        )));
    }
    if req.threshold == 0 {
        return Err(WsError::InvalidThreshold);
    }
    let contact = match (&req.contact, nd) {
        (Some(g), _) => g.clone(),
        (None, 0) => ContactMatrix::zeros(req.markings, 0),
        (None, _) => {
            return Err(WsError::InvalidRequest(
                "a contact matrix is required when divisors are present".into(),
            ))
        }
    };
    if contact.num_markings() != req.markings || contact.num_divisors() != nd {
        return Err(WsError::InvalidRequest(format!(
            "contact matrix must be {}x{nd}",
            req.markings
        )));
    }
    for (j, d) in req.target.divisors().iter().enumerate() {
        if contact.column_sum(j) != u64::from(req.degree[d.factor]) {
            return Err(WsError::InvalidRequest(
                "contact orders inconsistent with degree".into(),
            ));
        }
    }
    let estimate: u64 = (1..=req.max_vertices)
        .map(|n| search_size(req, n))
        .fold(0, u64::saturating_add);
    if estimate > req.guard {
        return Err(WsError::SearchSpaceTooLarge(format!(
            "about {estimate} labelled skeleta exceed the limit of {}",
            req.guard
        )));
    }

    let mut canonical: BTreeMap<Encoding, Vec<Vec<usize>>> = BTreeMap::new();
    for n in 1..=req.max_vertices {
        for cfg in labelled_configs(req, &contact, n) {
            let (enc, autos) = cfg.canonical();
            canonical.entry(enc).or_insert(autos);
        }
    }

    let mut out = Vec::new();
    for (enc, autos) in &canonical {
        let cfg = Config::from_encoding(enc);
        let (curve, rel, closing) = realize_config(&cfg, nd)?;
        let base = Chamber::new(cfg.edges.len(), closing);
        if !base.is_feasible()? {
            continue;
        }
        let dist = curve.distances()?;
        let dist_forms: Vec<LinearForm> = (0..cfg.num_vertices())
            .map(|v| dist[&VertexId(v as u32)].as_linear().clone())
            .collect();
        let mut chambers = base.refinements(&dedup(&dist_forms))?;
        for forms in &rel {
            let mut next = Vec::new();
            for ch in &chambers {
                next.extend(ch.refinements(&dedup(forms))?);
            }
            chambers = next;
        }

        let mut seen_keys = BTreeSet::new();
        for ch in chambers {
            let mut key_parts = vec![ranks(&dist_forms, &ch)?];
            for forms in &rel {
                key_parts.push(ranks(forms, &ch)?);
            }
            let key = autos
                .iter()
                .map(|p| {
                    key_parts
                        .iter()
                        .map(|r| {
                            let mut permuted = vec![0; r.len()];
                            for (v, &x) in r.iter().enumerate() {
                                permuted[p[v]] = x;
                            }
                            permuted
                        })
                        .collect::<Vec<_>>()
                })
                .min()
                .expect("the identity is an automorphism");
            if !seen_keys.insert(key) {
                continue;
            }
            out.push(build_stratum(req, &cfg, &curve, &rel, &contact, ch)?);
        }
    }
    out.sort_by_cached_key(StratumType::listing_line);
    Ok(out)
}

fn dedup(forms: &[LinearForm]) -> Vec<LinearForm> {
    forms
        .iter()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

fn build_stratum(
    req: &EnumerationRequest,
    cfg: &Config,
    curve: &TropicalCurve,
    rel: &[Vec<LinearForm>],
    contact: &ContactMatrix,
    ch: Chamber,
) -> Result<StratumType, WsError> {
    let n = cfg.num_vertices();
    let nd = rel.len();
    let mut ch = ch;
    let mut positions = vec![Vec::with_capacity(nd); n];
    for forms in rel {
        let mut low = &forms[0];
        for f in forms {
            if ch.compare(f, low)? == FormOrdering::Less {
                low = f;
            }
        }
        for v in 0..n {
            let (p, next) = realize_nonneg(&ch, &(&forms[v] - low))?;
            ch = next;
            positions[v].push(p);
        }
    }
    let multidegree = (0..n)
        .map(|v| (VertexId(v as u32), cfg.degree[v].clone()))
        .collect();
    let position = positions
        .into_iter()
        .enumerate()
        .map(|(v, p)| (VertexId(v as u32), p))
        .collect();
    let edge_slopes = cfg
        .slopes
        .iter()
        .enumerate()
        .map(|(k, s)| (EdgeId(k as u32), s.clone()))
        .collect();
    let leg_slopes = (0..req.markings)
        .map(|i| {
            (
                LegId(i as u32),
                contact.row(i).iter().map(|&x| i64::from(x)).collect(),
            )
        })
        .collect();
    let map = TropicalMap::new(
        curve.clone(),
        req.target.clone(),
        multidegree,
        position,
        edge_slopes,
        leg_slopes,
        contact.clone(),
    )?;
    let aligned = curve.is_radially_aligned(&ch)?;
    let walls: Vec<Vec<MonoidForm>> = (0..nd)
        .map(|j| map.position.values().map(|p| p[j].clone()).collect())
        .collect();
    let transverse = is_transverse(&map, &Subdivision::new(walls), &ch)?;
    let ex = expand(&map, &Subdivision::trivial(nd), &ch)?;
    let well_spaced = is_wellspaced(&ex.map, &ex.chamber, req.threshold)?.well_spaced;
    Ok(StratumType {
        map,
        chamber: ch,
        aligned,
        transverse,
        well_spaced,
    })
}
