//! q-Kneser graphs and their chromatic numbers.

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grassmann::{SchemeParams, SchemeTables};
use crate::projective::{intersect_dim, AmbientSpace, Grassmannian, Subspace};
use crate::spectralbounds::{hoffman_independence_bound, SpectralContext};

/// Largest vertex count for which explicit adjacency is built.
pub const KNESER_LIMIT: usize = 50_000;

/// `qK_{n:k}`: `k`-spaces, adjacent when they meet trivially.
pub struct KneserGraph {
    pub params: SchemeParams,
    pub tables: SchemeTables,
    vertices: Grassmannian,
    adjacency: Vec<FixedBitSet>,
}

impl KneserGraph {
    pub fn new(q: u32, n: usize, k: usize) -> Result<Self> {
        let params = SchemeParams::new(q, n, k)?;
        if params.v > BigInt::from(KNESER_LIMIT) {
            return Err(Error::SearchInfeasible(format!(
                "qK_{{{n}:{k}}} over GF({q}) has {} vertices, limit is {KNESER_LIMIT}",
                params.v
            )));
        }
        let tables = SchemeTables::new(&params)?;
        let vertices = Grassmannian::new(&AmbientSpace::over(q, n)?, k)?;
        let members = vertices.members();
        let v = members.len();
        let adjacency: Vec<FixedBitSet> = (0..v)
            .into_par_iter()
            .map(|a| {
                let mut row = FixedBitSet::with_capacity(v);
                if k > 0 && 2 * k <= n {
                    for (b, m) in members.iter().enumerate() {
                        if intersect_dim(&members[a], m).expect("shared ambient") == 0 {
                            row.insert(b);
                        }
                    }
                }
                row
            })
            .collect();
        let expected = if params.classes == k { tables.valencies[k].clone() } else { BigInt::from(0) };
        for (a, row) in adjacency.iter().enumerate() {
            if BigInt::from(row.count_ones(..)) != expected {
                return Err(Error::SchemeAxiomViolation(format!(
                    "vertex {a} has degree {}, valency is {expected}",
                    row.count_ones(..)
                )));
            }
        }
        Ok(KneserGraph {
            params,
            tables,
            vertices,
            adjacency,
        })
    }

    pub fn v(&self) -> usize {
        self.adjacency.len()
    }

    pub fn vertex(&self, i: usize) -> &Subspace {
        self.vertices.get(i)
    }

    pub fn vertices(&self) -> &[Subspace] {
        self.vertices.members()
    }

    pub fn neighbours(&self, i: usize) -> &FixedBitSet {
        &self.adjacency[i]
    }

    pub fn degree(&self) -> usize {
        self.adjacency.first().map_or(0, |r| r.count_ones(..))
    }

    pub fn has_edges(&self) -> bool {
        self.degree() > 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Coloring {
    pub colors: Vec<usize>,
    pub palette_size: usize,
}

impl Coloring {
    pub fn new(colors: Vec<usize>) -> Self {
        let palette_size = colors.iter().max().map_or(0, |m| m + 1);
        Coloring { colors, palette_size }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColoringCheck {
    pub proper: bool,
    /// First monochromatic edge in vertex order.
    pub violation: Option<(usize, usize)>,
}

pub fn verify_coloring(graph: &KneserGraph, colors: &[usize]) -> Result<ColoringCheck> {
    if colors.len() != graph.v() {
        return Err(Error::LengthMismatch {
            expected: graph.v(),
            found: colors.len(),
        });
    }
    for a in 0..graph.v() {
        if let Some(b) = graph.adjacency[a].ones().find(|&b| b > a && colors[b] == colors[a]) {
            return Ok(ColoringCheck {
                proper: false,
                violation: Some((a, b)),
            });
        }
    }
    Ok(ColoringCheck {
        proper: true,
        violation: None,
    })
}

/// DSATUR: repeatedly color the uncolored vertex with the most distinct
/// neighbour colors (ties: most uncolored neighbours, then lowest index)
/// with the least color available.
pub fn dsatur(graph: &KneserGraph) -> Coloring {
    let v = graph.v();
    let mut colors: Vec<Option<usize>> = vec![None; v];
    let mut seen: Vec<Vec<usize>> = vec![Vec::new(); v];
    let mut uncolored_deg: Vec<usize> = (0..v).map(|a| graph.adjacency[a].count_ones(..)).collect();
    for _ in 0..v {
        let x = (0..v)
            .filter(|&a| colors[a].is_none())
            .max_by(|&a, &b| {
                (seen[a].len(), uncolored_deg[a])
                    .cmp(&(seen[b].len(), uncolored_deg[b]))
                    .then(b.cmp(&a))
            })
            .expect("uncolored vertex remains");
        let c = (0..).find(|c| seen[x].binary_search(c).is_err()).expect("unbounded");
        colors[x] = Some(c);
        for y in graph.adjacency[x].ones() {
            if let Err(pos) = seen[y].binary_search(&c) {
                seen[y].insert(pos, c);
            }
            uncolored_deg[y] = uncolored_deg[y].saturating_sub(1);
        }
    }
    Coloring::new(colors.into_iter().map(|c| c.expect("all colored")).collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct ChromaticBounds {
    pub lower: usize,
    pub upper: usize,
    /// Hoffman bound on the independence number, when it applies.
    #[serde(serialize_with = "crate::report::ser_opt_rational")]
    pub alpha_bound: Option<BigRational>,
    pub witness: Coloring,
}

/// `lower = ceil(v / alpha)` with `alpha` the Hoffman bound; `upper` is the
/// DSATUR palette size.
pub fn chromatic_bounds(graph: &KneserGraph) -> Result<ChromaticBounds> {
    let witness = dsatur(graph);
    if !graph.has_edges() {
        return Ok(ChromaticBounds {
            lower: graph.v().min(1),
            upper: witness.palette_size,
            alpha_bound: None,
            witness,
        });
    }
    let ctx = SpectralContext::new(&graph.tables, graph.params.k)?;
    let alpha = hoffman_independence_bound(&ctx)?;
    let ratio = BigRational::from_integer(graph.params.v.clone()) / &alpha;
    let lower = ratio.numer().div_ceil(ratio.denom()).to_usize().expect("small");
    Ok(ChromaticBounds {
        lower,
        upper: witness.palette_size,
        alpha_bound: Some(alpha),
        witness,
    })
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ChromaticResult {
    Exact {
        chi: usize,
        witness: Coloring,
        /// Palette sizes proven insufficient by exhaustive search.
        refuted: Vec<usize>,
        nodes: u64,
    },
    Unknown {
        lower: usize,
        upper: usize,
        witness: Coloring,
        refuted: Vec<usize>,
        nodes: u64,
    },
}

impl ChromaticResult {
    pub fn decided(&self) -> Option<usize> {
        match self {
            ChromaticResult::Exact { chi, .. } => Some(*chi),
            ChromaticResult::Unknown { .. } => None,
        }
    }
}

struct ColorSearch<'a> {
    non_adj: &'a [FixedBitSet],
    alpha: usize,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

enum Outcome {
    Colorable(Vec<FixedBitSet>),
    Impossible,
    OutOfBudget,
}

impl ColorSearch<'_> {
    /// Can the vertices in `u` be covered by `colors` independent sets?
    fn colorable(&mut self, u: &FixedBitSet, colors: usize) -> Outcome {
        let Some(first) = u.minimum() else {
            return Outcome::Colorable(Vec::new());
        };
        if colors == 0 || u.count_ones(..) > self.alpha * colors {
            return Outcome::Impossible;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return Outcome::OutOfBudget;
        }
        // color class of the least vertex, grown to a maximal independent
        // set of the remaining graph
        let mut cand = u.clone();
        cand.intersect_with(&self.non_adj[first]);
        let mut classes = Vec::new();
        let mut r = FixedBitSet::with_capacity(u.len());
        r.insert(first);
        maximal_independent(self.non_adj, &mut r, cand, FixedBitSet::with_capacity(u.len()), &mut classes);
        classes.sort_by_key(|s| std::cmp::Reverse(s.count_ones(..)));
        for class in classes {
            let mut rest = u.clone();
            rest.difference_with(&class);
            match self.colorable(&rest, colors - 1) {
                Outcome::Colorable(mut cs) => {
                    cs.push(class);
                    return Outcome::Colorable(cs);
                }
                Outcome::OutOfBudget => return Outcome::OutOfBudget,
                Outcome::Impossible => {}
            }
        }
        Outcome::Impossible
    }
}

/// Bron–Kerbosch on the complement graph: every maximal independent set
/// extending `r` within `p`.
fn maximal_independent(
    non_adj: &[FixedBitSet],
    r: &mut FixedBitSet,
    mut p: FixedBitSet,
    mut x: FixedBitSet,
    out: &mut Vec<FixedBitSet>,
) {
    if p.is_clear() {
        if x.is_clear() {
            out.push(r.clone());
        }
        return;
    }
    let pivot = p
        .ones()
        .chain(x.ones())
        .max_by_key(|&w| p.intersection_count(&non_adj[w]))
        .expect("p nonempty");
    let mut cand = p.clone();
    cand.difference_with(&non_adj[pivot]);
    for w in cand.ones() {
        let mut np = p.clone();
        np.intersect_with(&non_adj[w]);
        let mut nx = x.clone();
        nx.intersect_with(&non_adj[w]);
        r.insert(w);
        maximal_independent(non_adj, r, np, nx, out);
        r.remove(w);
        p.remove(w);
        x.insert(w);
    }
}

/// Exact chromatic number by deciding `c`-colorability for increasing `c`
/// from the spectral lower bound. Returns `Unknown` with the best bounds when
/// the node budget runs out; a decided value is always proven.
pub fn exact_chromatic(graph: &KneserGraph, node_budget: u64) -> Result<ChromaticResult> {
    let bounds = chromatic_bounds(graph)?;
    let v = graph.v();
    let mut best = bounds.witness.clone();
    let alpha = match &bounds.alpha_bound {
        Some(a) => a.floor().to_integer().to_usize().expect("small"),
        None => v,
    };
    let non_adj: Vec<FixedBitSet> = (0..v)
        .map(|a| {
            let mut b = graph.adjacency[a].clone();
            b.toggle_range(..);
            b.remove(a);
            b
        })
        .collect();
    let mut search = ColorSearch {
        non_adj: &non_adj,
        alpha,
        nodes: 0,
        budget: node_budget,
        exhausted: false,
    };
    let mut all = FixedBitSet::with_capacity(v);
    all.insert_range(..);
    let mut refuted = Vec::new();
    for c in bounds.lower..bounds.upper {
        match search.colorable(&all, c) {
            Outcome::Colorable(classes) => {
                let mut colors = vec![usize::MAX; v];
                for (i, class) in classes.iter().rev().enumerate() {
                    for x in class.ones() {
                        if colors[x] == usize::MAX {
                            colors[x] = i;
                        }
                    }
                }
                best = Coloring::new(colors);
                return Ok(ChromaticResult::Exact {
                    chi: c,
                    witness: best,
                    refuted,
                    nodes: search.nodes,
                });
            }
            Outcome::Impossible => refuted.push(c),
            Outcome::OutOfBudget => {
                return Ok(ChromaticResult::Unknown {
                    lower: c,
                    upper: bounds.upper,
                    witness: best,
                    refuted,
                    nodes: search.nodes,
                });
            }
        }
    }
    Ok(ChromaticResult::Exact {
        chi: bounds.upper,
        witness: best,
        refuted,
        nodes: search.nodes,
    })
}
