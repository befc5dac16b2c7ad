//! The Grassmann scheme J_q(n, k).
//!
//! Relation `R_i` holds between two `k`-spaces meeting in dimension `k - i`.
//! When `n < 2k` every pair meets in dimension at least `2k - n`, so only the
//! relations `0..=min(k, n - k)` are nonempty and the scheme has
//! `min(k, n - k)` classes.
//!
//! Eigenmatrices are indexed `p[eigenspace][relation]` (so `p[j][i]` is the
//! eigenvalue of `A_i` on `V_j`) and `q[relation][eigenspace]`, with
//! `P Q = Q P = v I`.

use std::collections::HashMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::projective::{intersect_dim, AmbientSpace, Grassmannian, Subspace};
use crate::qcombinatorics::{gauss, rational, GaussTable};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SchemeParams {
    pub q: u32,
    pub n: usize,
    pub k: usize,
    #[serde(serialize_with = "crate::report::ser_bigint")]
    pub v: BigInt,
    /// Number of nontrivial relations, `min(k, n - k)`.
    pub classes: usize,
}

impl SchemeParams {
    pub fn new(q: u32, n: usize, k: usize) -> Result<Self> {
        if q < 2 || k < 1 || n < k {
            return Err(Error::InvalidParameters(format!(
                "J_q(n,k) needs q >= 2, k >= 1, n >= k; got q={q}, n={n}, k={k}"
            )));
        }
        Ok(SchemeParams {
            q,
            n,
            k,
            v: gauss(n as i64, k as i64, q),
            classes: k.min(n - k),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EigenFormula {
    /// The alternating sum over `h <= relation`.
    Delsarte,
    /// The alternating sum over `h <= eigenspace`.
    Eisfeld,
    /// Evaluate both and fail on any disagreement.
    Both,
}

fn binom2(m: i64) -> i64 {
    m * (m - 1) / 2
}

/// Eigenvalue of `A_relation` on `V_eigenspace`, summing over `h <= relation`.
pub fn eigenvalue_delsarte(t: &GaussTable, n: usize, k: usize, eigenspace: usize, relation: usize) -> BigInt {
    let (n, k, j, i) = (n as i64, k as i64, eigenspace as i64, relation as i64);
    let mut acc = BigInt::zero();
    for h in 0..=i {
        let g1 = t.get(k - j, h);
        if g1.is_zero() {
            continue;
        }
        let term = t.pow((h * j + binom2(i - h)) as u64) * g1 * t.get(k - h, i - h) * t.get(n - k - j + h, h);
        if (i - h) % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// Eigenvalue of `A_relation` on `V_eigenspace`, summing over `h <= eigenspace`.
pub fn eigenvalue_eisfeld(t: &GaussTable, n: usize, k: usize, eigenspace: usize, relation: usize) -> BigInt {
    let (n, k, j, i) = (n as i64, k as i64, eigenspace as i64, relation as i64);
    let mut acc = BigInt::zero();
    for h in 0..=j {
        let g2 = t.get(k - h, i);
        if g2.is_zero() {
            continue;
        }
        let e = i * (i - j + h) + binom2(j - h);
        // i(i-m) + m(m-1)/2 with m = j-h equals (d(d-1) + i(i-1))/2 for d = m-i
        debug_assert!(e >= 0);
        let term = t.pow(e as u64) * t.get(j, h) * g2 * t.get(n - k - j + h, n - k - i);
        if (j - h) % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// The eigenmatrix `P`, `p[eigenspace][relation]`, for relations and
/// eigenspaces `0..=classes`.
pub fn eigenmatrix_p(params: &SchemeParams, formula: EigenFormula) -> Result<Vec<Vec<BigInt>>> {
    let t = GaussTable::new(params.q, params.n);
    let d = params.classes;
    let (n, k) = (params.n, params.k);
    let mut p = vec![vec![BigInt::zero(); d + 1]; d + 1];
    for (j, row) in p.iter_mut().enumerate() {
        for (i, slot) in row.iter_mut().enumerate() {
            *slot = match formula {
                EigenFormula::Delsarte => eigenvalue_delsarte(&t, n, k, j, i),
                EigenFormula::Eisfeld => eigenvalue_eisfeld(&t, n, k, j, i),
                EigenFormula::Both => {
                    let a = eigenvalue_delsarte(&t, n, k, j, i);
                    let b = eigenvalue_eisfeld(&t, n, k, j, i);
                    if a != b {
                        return Err(Error::FormulaMismatch {
                            eigenspace: j,
                            relation: i,
                            first: a.to_string(),
                            second: b.to_string(),
                        });
                    }
                    a
                }
            };
        }
    }
    Ok(p)
}

/// Exact inverse of a square rational matrix by Gauss–Jordan elimination.
pub fn invert_rational(m: &[Vec<BigRational>]) -> Result<Vec<Vec<BigRational>>> {
    let size = m.len();
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    let mut inv: Vec<Vec<BigRational>> = (0..size)
        .map(|i| {
            (0..size)
                .map(|j| if i == j { BigRational::one() } else { BigRational::zero() })
                .collect()
        })
        .collect();
    for c in 0..size {
        let sel = (c..size).find(|&r| !a[r][c].is_zero()).ok_or(Error::SingularMatrix)?;
        a.swap(c, sel);
        inv.swap(c, sel);
        let piv = a[c][c].clone();
        for x in a[c].iter_mut() {
            *x /= &piv;
        }
        for x in inv[c].iter_mut() {
            *x /= &piv;
        }
        for r in 0..size {
            if r == c || a[r][c].is_zero() {
                continue;
            }
            let f = a[r][c].clone();
            for j in 0..size {
                let t = &f * &a[c][j];
                a[r][j] -= t;
                let t = &f * &inv[c][j];
                inv[r][j] -= t;
            }
        }
    }
    Ok(inv)
}

/// `Q = v P^{-1}`.
pub fn dual_eigenmatrix_q(p: &[Vec<BigInt>], v: &BigInt) -> Result<Vec<Vec<BigRational>>> {
    let pr: Vec<Vec<BigRational>> = p.iter().map(|r| r.iter().map(rational).collect()).collect();
    let inv = invert_rational(&pr)?;
    let v = rational(v);
    Ok(inv
        .into_iter()
        .map(|r| r.into_iter().map(|x| x * &v).collect())
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct SchemeTables {
    pub params: SchemeParams,
    #[serde(serialize_with = "crate::report::ser_bigint_matrix")]
    pub p: Vec<Vec<BigInt>>,
    #[serde(serialize_with = "crate::report::ser_rational_matrix")]
    pub q: Vec<Vec<BigRational>>,
    #[serde(serialize_with = "crate::report::ser_bigint_vec")]
    pub valencies: Vec<BigInt>,
    #[serde(serialize_with = "crate::report::ser_bigint_vec")]
    pub multiplicities: Vec<BigInt>,
}

impl SchemeTables {
    /// Evaluates `P` with both formulas, inverts it and checks the table
    /// invariants.
    pub fn new(params: &SchemeParams) -> Result<Self> {
        Self::with_formula(params, EigenFormula::Both)
    }

    pub fn with_formula(params: &SchemeParams, formula: EigenFormula) -> Result<Self> {
        let p = eigenmatrix_p(params, formula)?;
        let q = dual_eigenmatrix_q(&p, &params.v)?;
        let valencies = p[0].clone();
        let multiplicities = q[0]
            .iter()
            .map(|m| {
                if !m.is_integer() || !m.is_positive() {
                    return Err(Error::SchemeAxiomViolation(format!(
                        "multiplicity {m} is not a positive integer"
                    )));
                }
                Ok(m.to_integer())
            })
            .collect::<Result<Vec<_>>>()?;
        let tables = SchemeTables {
            params: params.clone(),
            p,
            q,
            valencies,
            multiplicities,
        };
        tables.check_invariants()?;
        Ok(tables)
    }

    pub fn classes(&self) -> usize {
        self.params.classes
    }

    fn check_invariants(&self) -> Result<()> {
        let d = self.classes();
        let v = rational(&self.params.v);
        let fail = |m: String| Err(Error::SchemeAxiomViolation(m));
        for a in 0..=d {
            for b in 0..=d {
                let mut pq = BigRational::zero();
                let mut qp = BigRational::zero();
                for t in 0..=d {
                    pq += rational(&self.p[a][t]) * &self.q[t][b];
                    qp += &self.q[a][t] * rational(&self.p[t][b]);
                }
                let expected = if a == b { v.clone() } else { BigRational::zero() };
                if pq != expected || qp != expected {
                    return fail(format!("PQ or QP differs from vI at ({a},{b})"));
                }
            }
        }
        if self.p.iter().any(|row| !row[0].is_one()) {
            return fail("P[j][0] != 1".into());
        }
        let total: BigInt = self.multiplicities.iter().sum();
        if total != self.params.v {
            return fail(format!("multiplicities sum to {total}, not v"));
        }
        for i in 1..=d {
            let s: BigInt = (0..=d).map(|j| &self.multiplicities[j] * &self.p[j][i]).sum();
            if !s.is_zero() {
                return fail(format!("trace of A_{i} is {s}, not 0"));
            }
        }
        Ok(())
    }

    /// Intersection numbers `p_{ij}^l` recovered from the eigenmatrices:
    /// `(1/(v k_l)) sum_t m_t P_ti P_tj P_tl`.
    pub fn intersection_number(&self, i: usize, j: usize, l: usize) -> BigRational {
        let d = self.classes();
        let s: BigInt = (0..=d)
            .map(|t| &self.multiplicities[t] * &self.p[t][i] * &self.p[t][j] * &self.p[t][l])
            .sum();
        BigRational::new(s, &self.params.v * &self.valencies[l])
    }
}

/// A Grassmann scheme together with its enumerated point set.
pub struct Scheme {
    pub params: SchemeParams,
    pub tables: SchemeTables,
    universe: Grassmannian,
    relations: OnceLock<RelationTable>,
}

impl Scheme {
    pub fn new(q: u32, n: usize, k: usize) -> Result<Self> {
        let params = SchemeParams::new(q, n, k)?;
        let tables = SchemeTables::new(&params)?;
        let ambient = AmbientSpace::over(q, n)?;
        let universe = Grassmannian::new(&ambient, k)?;
        Ok(Scheme {
            params,
            tables,
            universe,
            relations: OnceLock::new(),
        })
    }

    pub fn ambient(&self) -> &AmbientSpace {
        self.universe.ambient()
    }

    pub fn universe(&self) -> &Grassmannian {
        &self.universe
    }

    pub fn v(&self) -> usize {
        self.universe.len()
    }

    /// Dense `v x v` relation table, built on first use.
    pub fn relations(&self) -> &RelationTable {
        self.relations.get_or_init(|| RelationTable::build(&self.universe))
    }

    pub fn record(&self, members: Vec<Subspace>) -> Result<FamilyRecord> {
        family_record(&self.tables, self.ambient(), members)
    }

    pub fn record_indices(&self, idx: &[usize]) -> Result<FamilyRecord> {
        self.record(idx.iter().map(|&i| self.universe.get(i).clone()).collect())
    }
}

pub struct RelationTable {
    v: usize,
    data: Vec<u8>,
}

impl RelationTable {
    pub fn build(universe: &Grassmannian) -> Self {
        let v = universe.len();
        let k = universe.k();
        let members = universe.members();
        let data: Vec<u8> = (0..v)
            .into_par_iter()
            .flat_map_iter(|a| {
                members.iter().map(move |b| {
                    (k - intersect_dim(&members[a], b).expect("shared ambient")) as u8
                })
            })
            .collect();
        RelationTable { v, data }
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> usize {
        self.data[a * self.v + b] as usize
    }

    pub fn row(&self, a: usize) -> &[u8] {
        &self.data[a * self.v..(a + 1) * self.v]
    }

    pub fn v(&self) -> usize {
        self.v
    }
}

pub fn relation_index(a: &Subspace, b: &Subspace, params: &SchemeParams) -> Result<usize> {
    for s in [a, b] {
        if s.dim() != params.k {
            return Err(Error::DimensionMismatch {
                expected: params.k,
                found: s.dim(),
            });
        }
        if s.ambient().n() != params.n || s.ambient().q() != params.q {
            return Err(Error::AmbientMismatch);
        }
    }
    Ok(params.k - intersect_dim(a, b)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyRecord {
    pub params: SchemeParams,
    #[serde(skip)]
    pub ambient: AmbientSpace,
    #[serde(serialize_with = "crate::report::ser_subspace_vec")]
    pub members: Vec<Subspace>,
    pub y: usize,
    /// `a_i = (1/y) #{ordered pairs in R_i}`; all zero for the empty family.
    #[serde(serialize_with = "crate::report::ser_rational_vec")]
    pub inner_distribution: Vec<BigRational>,
    /// `chi^T E_j chi` for each eigenspace.
    #[serde(serialize_with = "crate::report::ser_rational_vec")]
    pub energies: Vec<BigRational>,
    /// `degrees[m][i]`: members in relation `R_i` to member `m`.
    #[serde(skip)]
    pub degrees: Vec<Vec<usize>>,
}

impl FamilyRecord {
    pub fn len(&self) -> usize {
        self.y
    }

    pub fn is_empty(&self) -> bool {
        self.y == 0
    }

    /// Ordered pair counts per relation, `y * a_i`.
    pub fn pair_counts(&self) -> Vec<usize> {
        let d = self.params.classes;
        (0..=d)
            .map(|i| self.degrees.iter().map(|row| row[i]).sum())
            .collect()
    }
}

/// Builds a family record: members are sorted, the inner distribution is
/// counted pairwise and energies follow from `Q` without materializing any
/// projector.
pub fn family_record(tables: &SchemeTables, ambient: &AmbientSpace, members: Vec<Subspace>) -> Result<FamilyRecord> {
    let params = &tables.params;
    if ambient.n() != params.n || ambient.q() != params.q {
        return Err(Error::AmbientMismatch);
    }
    let mut seen = HashMap::with_capacity(members.len());
    for (pos, m) in members.iter().enumerate() {
        if m.dim() != params.k {
            return Err(Error::DimensionMismatch {
                expected: params.k,
                found: m.dim(),
            });
        }
        if m.ambient() != ambient {
            return Err(Error::AmbientMismatch);
        }
        if seen.insert(m, pos).is_some() {
            return Err(Error::DuplicateMember(pos));
        }
    }
    drop(seen);
    let mut members = members;
    members.sort();
    let d = params.classes;
    let y = members.len();
    let degrees: Vec<Vec<usize>> = (0..y)
        .into_par_iter()
        .map(|a| {
            let mut row = vec![0usize; d + 1];
            for b in &members {
                let i = params.k - intersect_dim(&members[a], b).expect("checked ambient");
                row[i] += 1;
            }
            row
        })
        .collect();
    let counts: Vec<BigInt> = (0..=d)
        .map(|i| BigInt::from(degrees.iter().map(|r| r[i]).sum::<usize>()))
        .collect();
    let v = rational(&params.v);
    let (inner_distribution, energies) = if y == 0 {
        (vec![BigRational::zero(); d + 1], vec![BigRational::zero(); d + 1])
    } else {
        let yb = BigInt::from(y);
        let a: Vec<BigRational> = counts.iter().map(|c| BigRational::new(c.clone(), yb.clone())).collect();
        let e: Vec<BigRational> = (0..=d)
            .map(|j| {
                let s: BigRational = (0..=d).map(|i| rational(&counts[i]) * &tables.q[i][j]).sum();
                s / &v
            })
            .collect();
        (a, e)
    };
    let record = FamilyRecord {
        params: params.clone(),
        ambient: ambient.clone(),
        members,
        y,
        inner_distribution,
        energies,
        degrees,
    };
    if y > 0 {
        check_record(&record)?;
    }
    Ok(record)
}

fn check_record(r: &FamilyRecord) -> Result<()> {
    let y = BigRational::from_integer(r.y.into());
    let fail = |m: &str| Err(Error::SchemeAxiomViolation(format!("family record: {m}")));
    if !r.inner_distribution[0].is_one() {
        return fail("a_0 != 1");
    }
    if r.inner_distribution.iter().sum::<BigRational>() != y {
        return fail("sum of inner distribution != y");
    }
    if r.energies.iter().sum::<BigRational>() != y {
        return fail("sum of energies != y");
    }
    if r.energies[0] != &y * &y / rational(&r.params.v) {
        return fail("energy on V_0 != y^2/v");
    }
    if r.energies.iter().any(|e| e.is_negative()) {
        return fail("negative energy");
    }
    Ok(())
}

/// Total energy outside `V_0 + V_1`; zero exactly for Boolean degree 1
/// families.
pub fn degree1_defect(record: &FamilyRecord) -> BigRational {
    record.energies.iter().skip(2).sum()
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub v: usize,
    pub exhaustive: bool,
    pub seed: u64,
    pub pairs_checked: usize,
    /// `intersection_numbers[l][i][j] = p_{ij}^l`, as observed.
    pub intersection_numbers: Vec<Vec<Vec<u64>>>,
    pub row_sums: Vec<u64>,
    pub projector_vectors: usize,
    pub passed: bool,
}

/// Brute-force check of the association scheme axioms against the tables.
///
/// For `v <= 200` every ordered pair is checked; otherwise `sample_budget`
/// pairs are drawn from a ChaCha8 stream seeded by `seed` (cycling through
/// the relations) and every third element is counted for each of them.
pub fn validate_scheme(scheme: &Scheme, sample_budget: usize, seed: u64) -> Result<ValidationReport> {
    let rel = scheme.relations();
    let v = scheme.v();
    let d = scheme.params.classes;
    let tables = &scheme.tables;
    let violation = |m: String| Error::SchemeAxiomViolation(m);

    let mut row_sums = vec![0u64; d + 1];
    for a in 0..v {
        let mut counts = vec![0u64; d + 1];
        for &r in rel.row(a) {
            counts[r as usize] += 1;
        }
        for i in 0..=d {
            if BigInt::from(counts[i]) != tables.valencies[i] {
                return Err(violation(format!(
                    "vertex {a} has {} neighbours in R_{i}, valency is {}",
                    counts[i], tables.valencies[i]
                )));
            }
            if a == 0 {
                row_sums[i] = counts[i];
            }
        }
    }

    let exhaustive = v <= 200;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(usize, usize)> = if exhaustive {
        (0..v).flat_map(|a| (0..v).map(move |b| (a, b))).collect()
    } else {
        (0..sample_budget)
            .map(|s| {
                let a = rng.gen_range(0..v);
                let l = s % (d + 1);
                let candidates: Vec<usize> = (0..v).filter(|&b| rel.get(a, b) == l).collect();
                (a, candidates[rng.gen_range(0..candidates.len())])
            })
            .collect()
    };

    let observed: Vec<(usize, Vec<u64>)> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let mut counts = vec![0u64; (d + 1) * (d + 1)];
            let ra = rel.row(a);
            let rb = rel.row(b);
            for z in 0..v {
                counts[ra[z] as usize * (d + 1) + rb[z] as usize] += 1;
            }
            (rel.get(a, b), counts)
        })
        .collect();
    let mut table: Vec<Option<Vec<u64>>> = vec![None; d + 1];
    for (l, counts) in observed {
        match &table[l] {
            None => table[l] = Some(counts),
            Some(prev) if *prev != counts => {
                return Err(violation(format!("p_ij^{l} is not constant")));
            }
            _ => {}
        }
    }
    let mut intersection_numbers = vec![vec![vec![0u64; d + 1]; d + 1]; d + 1];
    for l in 0..=d {
        let counts = table[l]
            .as_ref()
            .ok_or_else(|| violation(format!("relation R_{l} never sampled")))?;
        for i in 0..=d {
            for j in 0..=d {
                let c = counts[i * (d + 1) + j];
                intersection_numbers[l][i][j] = c;
                let expected = tables.intersection_number(i, j, l);
                if BigRational::from_integer(c.into()) != expected {
                    return Err(violation(format!(
                        "p_{i}{j}^{l}: observed {c}, eigenmatrices give {expected}"
                    )));
                }
            }
        }
    }

    // projector reconstruction: A_i u = sum_j P_ji E_j u with E_j = (1/v) sum_l Q_lj A_l
    let projector_vectors = 4;
    let vr = rational(&tables.params.v);
    for _ in 0..projector_vectors {
        let u: Vec<i64> = (0..v).map(|_| rng.gen_range(-3..=3)).collect();
        let mut au = vec![vec![0i64; v]; d + 1];
        for a in 0..v {
            for (b, &r) in rel.row(a).iter().enumerate() {
                au[r as usize][a] += u[b];
            }
        }
        for i in 0..=d {
            let coef: Vec<BigRational> = (0..=d)
                .map(|l| {
                    let s: BigRational = (0..=d).map(|j| rational(&tables.p[j][i]) * &tables.q[l][j]).sum();
                    s / &vr
                })
                .collect();
            for a in 0..v {
                let rebuilt: BigRational = (0..=d)
                    .map(|l| &coef[l] * BigRational::from_integer(au[l][a].into()))
                    .sum();
                if rebuilt != BigRational::from_integer(au[i][a].into()) {
                    return Err(violation(format!("projector expansion of A_{i} fails at {a}")));
                }
            }
        }
    }

    Ok(ValidationReport {
        v,
        exhaustive,
        seed,
        pairs_checked: pairs.len(),
        intersection_numbers,
        row_sums,
        projector_vectors,
        passed: true,
    })
}


#[cfg(test)]
mod proptests {
    use std::sync::OnceLock;

    use super::*;
    use proptest::prelude::*;
    use proptest::sample::subsequence;

    fn scheme_342() -> &'static Scheme {
        static S: OnceLock<Scheme> = OnceLock::new();
        S.get_or_init(|| Scheme::new(3, 4, 2).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn energies_decompose_the_family(idx in subsequence((0..130usize).collect::<Vec<_>>(), 1..40)) {
            let s = scheme_342();
            let record = s.record_indices(&idx).unwrap();
            let y = BigRational::from_integer(BigInt::from(idx.len()));
            let total: BigRational = record.energies.iter().sum();
            prop_assert_eq!(total, y.clone());
            prop_assert!(record.energies.iter().all(|e| !e.is_negative()));
            let v = BigRational::from_integer(s.params.v.clone());
            prop_assert_eq!(record.energies[0].clone(), &y * &y / v);
            let inner: BigRational = record.inner_distribution.iter().sum();
            prop_assert_eq!(inner, y);
        }
    }
}
