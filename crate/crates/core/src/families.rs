//! Intersecting families of `k`-spaces: constructions, classification,
//! covering dimensions, quotients, cross-intersecting pairs and exact
//! searches over small schemes.

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grassmann::{FamilyRecord, Scheme, SchemeParams};
use crate::projective::{
    dual, enumerate_subspaces, intersect_dim, meet, quotient, sum_span, AmbientSpace, Subspace,
    ENUMERATION_LIMIT,
};
use crate::qcombinatorics::gauss;

/// Largest scheme handled by the exact searches.
pub const SEARCH_LIMIT: usize = 200;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum FamilyClass {
    SubsetOfDictator {
        #[serde(serialize_with = "crate::report::ser_subspace")]
        point: Subspace,
    },
    SubsetOfDual {
        #[serde(serialize_with = "crate::report::ser_subspace")]
        hyperplane: Subspace,
    },
    Nontrivial,
}

fn expect_dim(s: &Subspace, dim: usize) -> Result<()> {
    if s.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: s.dim(),
        });
    }
    Ok(())
}

fn expect_ambient(scheme: &Scheme, s: &Subspace) -> Result<()> {
    if s.ambient() != scheme.ambient() {
        return Err(Error::AmbientMismatch);
    }
    Ok(())
}

/// All `k`-spaces through the point `p`.
pub fn build_dictator(scheme: &Scheme, p: &Subspace) -> Result<FamilyRecord> {
    expect_ambient(scheme, p)?;
    expect_dim(p, 1)?;
    let members = scheme
        .universe()
        .members()
        .iter()
        .filter(|s| p.is_contained_in(s).expect("same ambient"))
        .cloned()
        .collect();
    scheme.record(members)
}

/// All `k`-spaces inside the hyperplane `h`.
pub fn build_dual_dictator(scheme: &Scheme, h: &Subspace) -> Result<FamilyRecord> {
    expect_ambient(scheme, h)?;
    expect_dim(h, scheme.params.n - 1)?;
    let members = scheme
        .universe()
        .members()
        .iter()
        .filter(|s| s.is_contained_in(h).expect("same ambient"))
        .cloned()
        .collect();
    scheme.record(members)
}

/// `{S : p in S, S meets T} + {T}` for `n = 2k` and a point `p` outside `T`.
pub fn build_hm_family(scheme: &Scheme, p: &Subspace, t: &Subspace) -> Result<FamilyRecord> {
    let params = &scheme.params;
    if params.n != 2 * params.k {
        return Err(Error::InvalidParameters(format!(
            "Hilton-Milner construction needs n = 2k, got n={}, k={}",
            params.n, params.k
        )));
    }
    expect_ambient(scheme, p)?;
    expect_ambient(scheme, t)?;
    expect_dim(p, 1)?;
    expect_dim(t, params.k)?;
    if p.is_contained_in(t)? {
        return Err(Error::PointInT);
    }
    let mut members: Vec<Subspace> = scheme
        .universe()
        .members()
        .iter()
        .filter(|s| p.is_contained_in(s).expect("same ambient") && intersect_dim(s, t).expect("same ambient") >= 1)
        .cloned()
        .collect();
    members.push(t.clone());
    let record = scheme.record(members)?;
    if !is_intersecting(&record) {
        return Err(Error::SchemeAxiomViolation("Hilton-Milner family is not intersecting".into()));
    }
    Ok(record)
}

/// No two members meet trivially. Always true when `n < 2k`.
pub fn is_intersecting(record: &FamilyRecord) -> bool {
    let k = record.params.k;
    if record.params.classes < k {
        return true;
    }
    record.degrees.iter().all(|row| row[k] == 0)
}

fn common_meet(ambient: &AmbientSpace, members: &[Subspace]) -> Result<Subspace> {
    let mut acc = Subspace::full(ambient);
    for m in members {
        if acc.dim() == 0 {
            break;
        }
        acc = meet(&acc, m)?;
    }
    Ok(acc)
}

fn common_span(ambient: &AmbientSpace, members: &[Subspace]) -> Result<Subspace> {
    let mut acc = Subspace::zero(ambient);
    for m in members {
        if acc.dim() == ambient.n() {
            break;
        }
        acc = sum_span(&acc, m)?;
    }
    Ok(acc)
}

/// Classifies a family as lying in a dictator, in the dual of a dictator, or
/// neither. Witnesses are the least point or hyperplane in canonical order.
pub fn classify_triviality(record: &FamilyRecord) -> Result<FamilyClass> {
    let ambient = &record.ambient;
    let common = common_meet(ambient, &record.members)?;
    if common.dim() >= 1 {
        let point = common.points().into_iter().min().expect("nonzero space has points");
        return Ok(FamilyClass::SubsetOfDictator { point });
    }
    let span = common_span(ambient, &record.members)?;
    if span.dim() < ambient.n() {
        let hyperplane = dual(&span)
            .points()
            .iter()
            .map(dual)
            .min()
            .expect("proper subspace lies in a hyperplane");
        return Ok(FamilyClass::SubsetOfDual { hyperplane });
    }
    Ok(FamilyClass::Nontrivial)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverProfile {
    /// Least dimension of a subspace meeting every member.
    pub s: usize,
    #[serde(serialize_with = "crate::report::ser_subspace")]
    pub witness: Subspace,
    /// `s` of the member-wise dual family.
    pub s_dual_raw: usize,
    /// `n - s_dual_raw`: the largest dimension of a subspace `S` such that
    /// every member lies in some hyperplane through `S`.
    pub s_prime: usize,
}

fn smallest_cover(ambient: &AmbientSpace, members: &[Subspace]) -> Result<(usize, Subspace)> {
    let k = members.iter().map(Subspace::dim).max().unwrap_or(0);
    let n = ambient.n();
    // an (n - k + 1)-space meets every k-space
    for d in 1..=(n + 1).saturating_sub(k).min(n) {
        let count = gauss(n as i64, d as i64, ambient.q());
        if count > BigInt::from(ENUMERATION_LIMIT) {
            return Err(Error::SearchInfeasible(format!(
                "{count} candidate {d}-spaces exceed the enumeration limit"
            )));
        }
        for cand in enumerate_subspaces(ambient, d)? {
            if members.iter().all(|m| intersect_dim(&cand, m).expect("same ambient") >= 1) {
                return Ok((d, cand));
            }
        }
    }
    Err(Error::SearchInfeasible("no covering subspace found".into()))
}

/// Covering dimension `s` of the family and, via the dual family, the
/// hyperplane-side dimension `s'`.
pub fn cover_profile(record: &FamilyRecord) -> Result<CoverProfile> {
    if record.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let (s, witness) = smallest_cover(&record.ambient, &record.members)?;
    let duals: Vec<Subspace> = record.members.iter().map(dual).collect();
    let (s_dual_raw, _) = smallest_cover(&record.ambient, &duals)?;
    Ok(CoverProfile {
        s,
        witness,
        s_dual_raw,
        s_prime: record.ambient.n() - s_dual_raw,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct QuotientReport {
    pub z_size: usize,
    pub z_prime_size: usize,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub lower_bound: BigRational,
    pub holds: bool,
    #[serde(serialize_with = "crate::report::ser_subspace_vec")]
    pub z_prime: Vec<Subspace>,
}

/// Maps each member `z` of `Z` to `<z, l>/l`. Every member must meet the
/// line `l` exactly in the point `p`.
pub fn quotient_family(z: &[Subspace], l: &Subspace, p: &Subspace) -> Result<QuotientReport> {
    expect_dim(l, 2)?;
    expect_dim(p, 1)?;
    if !p.is_contained_in(l)? {
        return Err(Error::InvalidParameters("the point does not lie on the line".into()));
    }
    let k = z.first().map(Subspace::dim).unwrap_or(1);
    for (idx, m) in z.iter().enumerate() {
        expect_dim(m, k)?;
        if !p.is_contained_in(m)? || intersect_dim(m, l)? != 1 {
            return Err(Error::MemberNotMeetingInP(idx));
        }
    }
    let mut z_prime: Vec<Subspace> = z
        .iter()
        .map(|m| quotient(m, l))
        .collect::<Result<Vec<_>>>()?;
    z_prime.sort();
    z_prime.dedup();
    let lower_bound = BigRational::new(BigInt::from(z.len()), gauss(k as i64, 1, l.ambient().q()));
    let holds = BigRational::from_integer(z_prime.len().into()) >= lower_bound;
    Ok(QuotientReport {
        z_size: z.len(),
        z_prime_size: z_prime.len(),
        lower_bound,
        holds,
        z_prime,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossReport {
    pub y_size: usize,
    pub z_size: usize,
    pub cross_intersecting: bool,
    /// Indices of the first member pair meeting trivially.
    pub violation: Option<(usize, usize)>,
    #[serde(serialize_with = "crate::report::ser_bigint")]
    pub product: BigInt,
    #[serde(serialize_with = "crate::report::ser_bigint")]
    pub bound: BigInt,
    #[serde(serialize_with = "crate::report::ser_bigint")]
    pub slack: BigInt,
    /// `|Y| |Z| <= [n-1, k-1]^2`; only meaningful when cross-intersecting.
    pub bound_holds: bool,
}

pub fn cross_intersecting_check(params: &SchemeParams, y: &[Subspace], z: &[Subspace]) -> Result<CrossReport> {
    for s in y.iter().chain(z) {
        expect_dim(s, params.k)?;
        if s.ambient().n() != params.n || s.ambient().q() != params.q {
            return Err(Error::AmbientMismatch);
        }
    }
    let mut violation = None;
    'outer: for (a, ya) in y.iter().enumerate() {
        for (b, zb) in z.iter().enumerate() {
            if intersect_dim(ya, zb)? == 0 {
                violation = Some((a, b));
                break 'outer;
            }
        }
    }
    let product = BigInt::from(y.len()) * BigInt::from(z.len());
    let g = gauss(params.n as i64 - 1, params.k as i64 - 1, params.q);
    let bound = &g * &g;
    Ok(CrossReport {
        y_size: y.len(),
        z_size: z.len(),
        cross_intersecting: violation.is_none(),
        violation,
        slack: &bound - &product,
        bound_holds: product <= bound,
        product,
        bound,
    })
}

/// Bitset view of the "meets nontrivially" graph on a small scheme, with the
/// member sets of every dictator and every dual dictator.
pub struct MeetsGraph {
    pub v: usize,
    pub adjacency: Vec<FixedBitSet>,
    pub pencils: Vec<FixedBitSet>,
    pub hyperplane_families: Vec<FixedBitSet>,
}

impl MeetsGraph {
    pub fn new(scheme: &Scheme) -> Result<Self> {
        let v = scheme.v();
        if v > SEARCH_LIMIT {
            return Err(Error::SearchInfeasible(format!(
                "v = {v} exceeds the exact search limit {SEARCH_LIMIT}"
            )));
        }
        let k = scheme.params.k;
        let rel = scheme.relations();
        let adjacency = (0..v)
            .map(|a| {
                let mut b = FixedBitSet::with_capacity(v);
                for (c, &r) in rel.row(a).iter().enumerate() {
                    if c != a && r as usize != k {
                        b.insert(c);
                    }
                }
                b
            })
            .collect();
        let members = scheme.universe().members();
        let full = Subspace::full(scheme.ambient());
        let pencils = full
            .points()
            .iter()
            .map(|p| mask(members, |s| p.is_contained_in(s).expect("same ambient")))
            .collect();
        let hyperplane_families = full
            .points()
            .iter()
            .map(dual)
            .map(|h| mask(members, |s| s.is_contained_in(&h).expect("same ambient")))
            .collect();
        Ok(MeetsGraph {
            v,
            adjacency,
            pencils,
            hyperplane_families,
        })
    }

    /// True when the set lies inside one dictator or one dual dictator.
    pub fn is_trivial(&self, set: &FixedBitSet) -> bool {
        self.pencils.iter().chain(&self.hyperplane_families).any(|m| set.is_subset(m))
    }
}

fn mask(members: &[Subspace], pred: impl Fn(&Subspace) -> bool) -> FixedBitSet {
    let mut b = FixedBitSet::with_capacity(members.len());
    for (i, s) in members.iter().enumerate() {
        if pred(s) {
            b.insert(i);
        }
    }
    b
}

/// Greedy sequential coloring of `p`; vertices come back sorted by color,
/// each paired with its 1-based color.
fn color_sort(adj: &[FixedBitSet], p: &FixedBitSet) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(p.count_ones(..));
    let mut uncolored = p.clone();
    let mut color = 0;
    while !uncolored.is_clear() {
        color += 1;
        let mut avail = uncolored.clone();
        while let Some(x) = avail.minimum() {
            avail.remove(x);
            avail.difference_with(&adj[x]);
            uncolored.remove(x);
            out.push((x, color));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Optimality {
    Exact,
    LowerBound,
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchOutcome {
    /// Best family found, as vertex indices into the scheme's universe.
    pub vertices: Vec<usize>,
    pub size: usize,
    pub optimality: Optimality,
    pub nodes: u64,
}

struct CliqueSearch<'a> {
    graph: &'a MeetsGraph,
    nontrivial_only: bool,
    collect_all: bool,
    budget: u64,
    nodes: u64,
    best: usize,
    incumbent: Vec<usize>,
    all: Vec<Vec<usize>>,
    exhausted: bool,
}

impl CliqueSearch<'_> {
    fn accept(&mut self, clique: &[usize], set: &FixedBitSet) {
        if self.nontrivial_only && self.graph.is_trivial(set) {
            return;
        }
        if clique.len() > self.best {
            self.best = clique.len();
            self.incumbent = clique.to_vec();
            self.all.clear();
        }
        if self.collect_all && clique.len() == self.best {
            let mut c = clique.to_vec();
            c.sort_unstable();
            self.all.push(c);
        }
    }

    fn expand(&mut self, clique: &mut Vec<usize>, clique_set: &mut FixedBitSet, mut p: FixedBitSet) {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        let order = color_sort(&self.graph.adjacency, &p);
        for &(x, color) in order.iter().rev() {
            let reach = clique.len() + color;
            if reach < self.best || (!self.collect_all && reach == self.best) {
                return;
            }
            let mut next = p.clone();
            next.intersect_with(&self.graph.adjacency[x]);
            clique.push(x);
            clique_set.insert(x);
            let prune = self.nontrivial_only && {
                let mut closure = clique_set.clone();
                closure.union_with(&next);
                self.graph.is_trivial(&closure)
            };
            if !prune {
                self.accept(clique, clique_set);
                if !next.is_clear() {
                    self.expand(clique, clique_set, next);
                }
            }
            clique.pop();
            clique_set.remove(x);
            p.remove(x);
            if self.exhausted {
                return;
            }
        }
    }
}

fn run_search(graph: &MeetsGraph, nontrivial_only: bool, collect_all: bool, budget: u64) -> CliqueSearch<'_> {
    let mut s = CliqueSearch {
        graph,
        nontrivial_only,
        collect_all,
        budget,
        nodes: 0,
        best: 0,
        incumbent: Vec::new(),
        all: Vec::new(),
        exhausted: false,
    };
    let mut p = FixedBitSet::with_capacity(graph.v);
    p.insert_range(..);
    s.expand(&mut Vec::new(), &mut FixedBitSet::with_capacity(graph.v), p);
    s
}

/// Largest intersecting family contained in no dictator and no dual
/// dictator, by branch and bound on the meets graph. `shuffle_seed`
/// relabels the vertices before searching; the size found does not depend
/// on it.
pub fn max_nontrivial_search(scheme: &Scheme, node_budget: u64, shuffle_seed: Option<u64>) -> Result<SearchOutcome> {
    let graph = MeetsGraph::new(scheme)?;
    let (graph, relabel) = match shuffle_seed {
        None => (graph, (0..scheme.v()).collect::<Vec<_>>()),
        Some(seed) => {
            let mut perm: Vec<usize> = (0..graph.v).collect();
            perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            (permute(&graph, &perm), perm)
        }
    };
    let s = run_search(&graph, true, false, node_budget);
    let mut vertices: Vec<usize> = s.incumbent.iter().map(|&x| relabel[x]).collect();
    vertices.sort_unstable();
    Ok(SearchOutcome {
        size: vertices.len(),
        vertices,
        optimality: if s.exhausted { Optimality::LowerBound } else { Optimality::Exact },
        nodes: s.nodes,
    })
}

/// New vertex `i` is old vertex `perm[i]`.
fn permute(g: &MeetsGraph, perm: &[usize]) -> MeetsGraph {
    let mut inv = vec![0; perm.len()];
    for (i, &o) in perm.iter().enumerate() {
        inv[o] = i;
    }
    let remap = |b: &FixedBitSet| {
        let mut out = FixedBitSet::with_capacity(g.v);
        for x in b.ones() {
            out.insert(inv[x]);
        }
        out
    };
    MeetsGraph {
        v: g.v,
        adjacency: perm.iter().map(|&o| remap(&g.adjacency[o])).collect(),
        pencils: g.pencils.iter().map(remap).collect(),
        hyperplane_families: g.hyperplane_families.iter().map(remap).collect(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyEnumeration {
    pub families: Vec<Vec<usize>>,
    pub complete: bool,
    pub nodes: u64,
}

/// Every intersecting family of maximum size.
pub fn maximum_intersecting_families(scheme: &Scheme, node_budget: u64) -> Result<FamilyEnumeration> {
    let graph = MeetsGraph::new(scheme)?;
    let s = run_search(&graph, false, true, node_budget);
    let mut families = s.all;
    families.sort();
    Ok(FamilyEnumeration {
        families,
        complete: !s.exhausted,
        nodes: s.nodes,
    })
}

/// Every maximal intersecting family (maximal cliques of the meets graph),
/// by Bron–Kerbosch with pivoting. Stops after `limit` families.
pub fn maximal_intersecting_families(scheme: &Scheme, limit: usize) -> Result<FamilyEnumeration> {
    let graph = MeetsGraph::new(scheme)?;
    let mut out = Vec::new();
    let mut nodes = 0u64;
    let mut p = FixedBitSet::with_capacity(graph.v);
    p.insert_range(..);
    let x = FixedBitSet::with_capacity(graph.v);
    let complete = bron_kerbosch(&graph.adjacency, &mut Vec::new(), p, x, &mut out, limit, &mut nodes);
    for f in out.iter_mut() {
        f.sort_unstable();
    }
    out.sort();
    Ok(FamilyEnumeration {
        families: out,
        complete,
        nodes,
    })
}

fn bron_kerbosch(
    adj: &[FixedBitSet],
    r: &mut Vec<usize>,
    mut p: FixedBitSet,
    mut x: FixedBitSet,
    out: &mut Vec<Vec<usize>>,
    limit: usize,
    nodes: &mut u64,
) -> bool {
    *nodes += 1;
    if p.is_clear() && x.is_clear() {
        if out.len() >= limit {
            return false;
        }
        out.push(r.clone());
        return true;
    }
    let pivot = p
        .ones()
        .chain(x.ones())
        .max_by_key(|&u| p.intersection_count(&adj[u]))
        .expect("p or x nonempty");
    let mut cand = p.clone();
    cand.difference_with(&adj[pivot]);
    for v in cand.ones() {
        let mut np = p.clone();
        np.intersect_with(&adj[v]);
        let mut nx = x.clone();
        nx.intersect_with(&adj[v]);
        r.push(v);
        let ok = bron_kerbosch(adj, r, np, nx, out, limit, nodes);
        r.pop();
        if !ok {
            return false;
        }
        p.remove(v);
        x.insert(v);
    }
    true
}

/// Grows a cross-intersecting pair by scanning the universe in random order
/// and adding each `k`-space to `Y` or `Z` (coin flip for which is tried
/// first) whenever it meets every member of the other side.
pub fn grow_cross_intersecting<R: Rng + ?Sized>(scheme: &Scheme, rng: &mut R) -> (Vec<usize>, Vec<usize>) {
    let rel = scheme.relations();
    let k = scheme.params.k;
    let mut order: Vec<usize> = (0..scheme.v()).collect();
    order.shuffle(rng);
    let (mut y, mut z): (Vec<usize>, Vec<usize>) = (Vec::new(), Vec::new());
    for c in order {
        let fits = |side: &[usize]| side.iter().all(|&m| rel.get(c, m) != k);
        let y_first = rng.gen_bool(0.5);
        let (first, second) = if y_first { (&mut y, &mut z) } else { (&mut z, &mut y) };
        if fits(second) {
            first.push(c);
        } else if fits(first) {
            second.push(c);
        }
    }
    (y, z)
}
