//! Subspaces of GF(q)^n in reduced row echelon form.
//!
//! RREF is a canonical form, so two [`Subspace`] values are equal exactly
//! when their matrices are identical. The derived order (dimension, pivot
//! columns, then entries row-major) is the order in which
//! [`enumerate_subspaces`] yields subspaces.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use rand::Rng;

use crate::error::{Error, Result};
use crate::qcombinatorics::gauss;
use crate::qfield::{make_field, FieldSpec, Scalar};

/// Largest number of subspaces any enumeration will produce.
pub const ENUMERATION_LIMIT: u64 = 10_000_000;

#[derive(Clone)]
pub struct AmbientSpace {
    field: Arc<FieldSpec>,
    n: usize,
}

impl AmbientSpace {
    pub fn new(field: Arc<FieldSpec>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension { n, k: 0 });
        }
        Ok(AmbientSpace { field, n })
    }

    /// Convenience constructor building GF(q) on the fly.
    pub fn over(q: u32, n: usize) -> Result<Self> {
        Self::new(Arc::new(make_field(q)?), n)
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn field_arc(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u32 {
        self.field.q()
    }

    /// Same field, different dimension.
    pub fn with_dimension(&self, n: usize) -> Result<Self> {
        Self::new(self.field.clone(), n)
    }
}

impl PartialEq for AmbientSpace {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.field.q() == other.field.q()
    }
}

impl Eq for AmbientSpace {}

impl fmt::Debug for AmbientSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})^{}", self.field.q(), self.n)
    }
}

#[derive(Clone)]
pub struct Subspace {
    ambient: AmbientSpace,
    pivots: Vec<usize>,
    /// `k * n` entries, row-major, in RREF.
    rows: Vec<u8>,
}

impl Subspace {
    pub fn zero(ambient: &AmbientSpace) -> Self {
        Subspace {
            ambient: ambient.clone(),
            pivots: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn full(ambient: &AmbientSpace) -> Self {
        let n = ambient.n;
        let mut rows = vec![0u8; n * n];
        for i in 0..n {
            rows[i * n + i] = 1;
        }
        Subspace {
            ambient: ambient.clone(),
            pivots: (0..n).collect(),
            rows,
        }
    }

    /// The span of the standard basis vectors at `coords`.
    pub fn coordinate(ambient: &AmbientSpace, coords: &[usize]) -> Result<Self> {
        let n = ambient.n;
        let rows = coords
            .iter()
            .map(|&c| {
                if c >= n {
                    return Err(Error::DimensionMismatch { expected: n, found: c + 1 });
                }
                let mut r = vec![Scalar::ZERO; n];
                r[c] = Scalar::ONE;
                Ok(r)
            })
            .collect::<Result<Vec<_>>>()?;
        canonicalize(ambient, &rows)
    }

    pub fn ambient(&self) -> &AmbientSpace {
        &self.ambient
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn entry(&self, row: usize, col: usize) -> Scalar {
        Scalar::from_raw(self.rows[row * self.ambient.n + col])
    }

    pub fn row_vectors(&self) -> Vec<Vec<Scalar>> {
        self.raw_rows()
            .map(|r| r.iter().map(|&x| Scalar::from_raw(x)).collect())
            .collect()
    }

    pub(crate) fn raw_rows(&self) -> impl Iterator<Item = &[u8]> {
        // chunks_exact panics on a zero chunk size
        let n = self.ambient.n.max(1);
        self.rows.chunks_exact(n)
    }

    /// Validates that `rows` is an RREF matrix and wraps it.
    pub fn from_rref(ambient: &AmbientSpace, rows: &[Vec<Scalar>]) -> Result<Self> {
        let n = ambient.n;
        let q = ambient.q();
        let mut raw = Vec::with_capacity(rows.len() * n);
        let mut pivots = Vec::with_capacity(rows.len());
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: r.len() });
            }
            if let Some(bad) = r.iter().find(|x| x.value() >= q) {
                return Err(Error::InvalidScalar { q, value: bad.value() });
            }
            let lead = r
                .iter()
                .position(|&x| x != Scalar::ZERO)
                .ok_or_else(|| Error::InvalidParameters("zero row in RREF matrix".into()))?;
            if r[lead] != Scalar::ONE {
                return Err(Error::InvalidParameters("leading entry is not 1".into()));
            }
            if pivots.last().is_some_and(|&p| p >= lead) {
                return Err(Error::InvalidParameters("pivots do not strictly increase".into()));
            }
            pivots.push(lead);
            raw.extend(r.iter().map(|x| x.raw()));
        }
        for (i, &p) in pivots.iter().enumerate() {
            for j in 0..rows.len() {
                if j != i && raw[j * n + p] != 0 {
                    return Err(Error::InvalidParameters("pivot column is not a unit column".into()));
                }
            }
        }
        Ok(Subspace {
            ambient: ambient.clone(),
            pivots,
            rows: raw,
        })
    }

    /// True when `self` is a subspace of `other`.
    pub fn is_contained_in(&self, other: &Subspace) -> Result<bool> {
        Ok(intersect_dim(self, other)? == self.dim())
    }

    pub fn contains_vector(&self, v: &[Scalar]) -> Result<bool> {
        let n = self.ambient.n;
        if v.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: v.len() });
        }
        let mut w: Vec<u8> = v.iter().map(|x| x.raw()).collect();
        reduce_against(self.ambient.field(), &self.pivots, &self.rows, n, &mut w);
        Ok(w.iter().all(|&x| x == 0))
    }

    /// All `m`-dimensional subspaces of `self`, sorted.
    pub fn subspaces_within(&self, m: usize) -> Result<Vec<Subspace>> {
        let k = self.dim();
        if m > k {
            return Err(Error::InvalidDimension { n: k, k: m });
        }
        if k == 0 {
            return Ok(vec![self.clone()]);
        }
        let field = self.ambient.field();
        let n = self.ambient.n;
        let coords = self.ambient.with_dimension(k)?;
        let mut out = Vec::new();
        for c in enumerate_subspaces(&coords, m)? {
            let mut data = vec![0u8; m * n];
            for (i, crow) in c.raw_rows().enumerate().take(m) {
                for (t, &coef) in crow.iter().enumerate() {
                    if coef == 0 {
                        continue;
                    }
                    let src = &self.rows[t * n..(t + 1) * n];
                    for col in 0..n {
                        let add = field.mul_raw(coef, src[col]);
                        data[i * n + col] = field.add_raw(data[i * n + col], add);
                    }
                }
            }
            out.push(from_raw_rows(&self.ambient, data, m));
        }
        out.sort();
        Ok(out)
    }

    /// All points (1-spaces) of `self`, sorted.
    pub fn points(&self) -> Vec<Subspace> {
        self.subspaces_within(1).expect("dimension 1 is always valid when dim >= 1")
    }

    fn key(&self) -> (u32, usize, &[usize], &[u8]) {
        (self.ambient.q(), self.ambient.n, &self.pivots, &self.rows)
    }
}

impl PartialEq for Subspace {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for Subspace {}

impl Hash for Subspace {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key().hash(state);
    }
}

impl PartialOrd for Subspace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Subspace {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.ambient.q(), self.ambient.n, self.dim(), &self.pivots, &self.rows).cmp(&(
            other.ambient.q(),
            other.ambient.n,
            other.dim(),
            &other.pivots,
            &other.rows,
        ))
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace({})", crate::format::format_subspace(self))
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::format::format_subspace(self))
    }
}

/// Row-reduces `data` (`nrows x ncols`, row-major) in place to RREF and
/// returns the pivot columns. Rows past the rank end up zero.
pub(crate) fn rref_in_place(field: &FieldSpec, data: &mut [u8], nrows: usize, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(sel) = (r..nrows).find(|&i| data[i * ncols + c] != 0) else {
            continue;
        };
        if sel != r {
            for j in 0..ncols {
                data.swap(sel * ncols + j, r * ncols + j);
            }
        }
        let inv = field.inv_raw(data[r * ncols + c]);
        if inv != 1 {
            for j in c..ncols {
                data[r * ncols + j] = field.mul_raw(data[r * ncols + j], inv);
            }
        }
        for i in 0..nrows {
            if i == r {
                continue;
            }
            let factor = data[i * ncols + c];
            if factor == 0 {
                continue;
            }
            let nf = field.neg_raw(factor);
            for j in c..ncols {
                let t = field.mul_raw(nf, data[r * ncols + j]);
                data[i * ncols + j] = field.add_raw(data[i * ncols + j], t);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Subtracts multiples of RREF rows from `w` so that `w` vanishes on the
/// pivot columns.
pub(crate) fn reduce_against(field: &FieldSpec, pivots: &[usize], rows: &[u8], n: usize, w: &mut [u8]) {
    for (i, &p) in pivots.iter().enumerate() {
        let c = w[p];
        if c == 0 {
            continue;
        }
        let nc = field.neg_raw(c);
        let row = &rows[i * n..(i + 1) * n];
        for j in 0..n {
            w[j] = field.add_raw(w[j], field.mul_raw(nc, row[j]));
        }
    }
}

fn from_raw_rows(ambient: &AmbientSpace, mut data: Vec<u8>, nrows: usize) -> Subspace {
    let n = ambient.n;
    let pivots = rref_in_place(ambient.field(), &mut data, nrows, n);
    data.truncate(pivots.len() * n);
    Subspace {
        ambient: ambient.clone(),
        pivots,
        rows: data,
    }
}

/// The RREF span of `rows`; dependent rows are dropped.
pub fn canonicalize(ambient: &AmbientSpace, rows: &[Vec<Scalar>]) -> Result<Subspace> {
    let n = ambient.n;
    let q = ambient.q();
    let mut data = Vec::with_capacity(rows.len() * n);
    for r in rows {
        if r.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: r.len() });
        }
        if let Some(bad) = r.iter().find(|x| x.value() >= q) {
            return Err(Error::InvalidScalar { q, value: bad.value() });
        }
        data.extend(r.iter().map(|x| x.raw()));
    }
    Ok(from_raw_rows(ambient, data, rows.len()))
}

fn check_ambient(a: &Subspace, b: &Subspace) -> Result<()> {
    if a.ambient != b.ambient {
        return Err(Error::AmbientMismatch);
    }
    Ok(())
}

fn stacked_rank(a: &Subspace, b: &Subspace) -> usize {
    let n = a.ambient.n;
    let mut data = Vec::with_capacity(a.rows.len() + b.rows.len());
    data.extend_from_slice(&a.rows);
    data.extend_from_slice(&b.rows);
    rref_in_place(a.ambient.field(), &mut data, a.dim() + b.dim(), n).len()
}

pub fn intersect_dim(a: &Subspace, b: &Subspace) -> Result<usize> {
    check_ambient(a, b)?;
    Ok(a.dim() + b.dim() - stacked_rank(a, b))
}

/// `<A, B>`.
pub fn sum_span(a: &Subspace, b: &Subspace) -> Result<Subspace> {
    check_ambient(a, b)?;
    let mut data = a.rows.clone();
    data.extend_from_slice(&b.rows);
    Ok(from_raw_rows(&a.ambient, data, a.dim() + b.dim()))
}

/// `A ∩ B`, computed as the dual of `<dual(A), dual(B)>`.
pub fn meet(a: &Subspace, b: &Subspace) -> Result<Subspace> {
    check_ambient(a, b)?;
    Ok(dual(&sum_span(&dual(a), &dual(b))?))
}

/// Orthogonal complement under `sum x_i y_i`.
pub fn dual(a: &Subspace) -> Subspace {
    let field = a.ambient.field();
    let n = a.ambient.n;
    let free: Vec<usize> = (0..n).filter(|c| !a.pivots.contains(c)).collect();
    // one kernel vector per free column: x_f = 1, x_{p_i} = -a[i][f]
    let mut data = vec![0u8; free.len() * n];
    for (t, &f) in free.iter().enumerate() {
        data[t * n + f] = 1;
        for (i, &p) in a.pivots.iter().enumerate() {
            data[t * n + p] = field.neg_raw(a.rows[i * n + f]);
        }
    }
    from_raw_rows(&a.ambient, data, free.len())
}

/// The image of `<A, L>/L` in GF(q)^(n - dim L). The quotient is
/// coordinatized by the standard unit vectors at the non-pivot columns of `L`
/// in increasing order, which complete `L`'s RREF basis to a basis of the
/// ambient space.
pub fn quotient(a: &Subspace, l: &Subspace) -> Result<Subspace> {
    check_ambient(a, l)?;
    let field = a.ambient.field();
    let n = a.ambient.n;
    let free: Vec<usize> = (0..n).filter(|c| !l.pivots.contains(c)).collect();
    let target = if free.is_empty() {
        // quotient by the whole space: only the zero space remains
        return Ok(Subspace {
            ambient: AmbientSpace {
                field: a.ambient.field.clone(),
                n: 0,
            },
            pivots: Vec::new(),
            rows: Vec::new(),
        });
    } else {
        a.ambient.with_dimension(free.len())?
    };
    let m = free.len();
    let mut data = Vec::with_capacity(a.dim() * m);
    for row in a.raw_rows().take(a.dim()) {
        let mut w = row.to_vec();
        reduce_against(field, &l.pivots, &l.rows, n, &mut w);
        data.extend(free.iter().map(|&c| w[c]));
    }
    Ok(from_raw_rows(&target, data, a.dim()))
}

/// Deterministic stream of every `k`-subspace: pivot sets in lexicographic
/// order, then the free entries as a base-q counter in row-major order with
/// the last entry varying fastest.
pub struct SubspaceIter {
    ambient: AmbientSpace,
    k: usize,
    pivots: Vec<usize>,
    free: Vec<(usize, usize)>,
    counter: Vec<u8>,
    done: bool,
}

impl SubspaceIter {
    fn new(ambient: &AmbientSpace, k: usize) -> Self {
        let pivots: Vec<usize> = (0..k).collect();
        let mut it = SubspaceIter {
            ambient: ambient.clone(),
            k,
            pivots,
            free: Vec::new(),
            counter: Vec::new(),
            done: false,
        };
        it.reset_free();
        it
    }

    fn reset_free(&mut self) {
        let n = self.ambient.n;
        self.free.clear();
        for (r, &p) in self.pivots.iter().enumerate() {
            for c in p + 1..n {
                if !self.pivots.contains(&c) {
                    self.free.push((r, c));
                }
            }
        }
        self.counter = vec![0; self.free.len()];
    }

    fn advance_pivots(&mut self) -> bool {
        let n = self.ambient.n;
        let k = self.k;
        let mut i = k;
        while i > 0 {
            i -= 1;
            if self.pivots[i] < n - k + i {
                self.pivots[i] += 1;
                for j in i + 1..k {
                    self.pivots[j] = self.pivots[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for SubspaceIter {
    type Item = Subspace;

    fn next(&mut self) -> Option<Subspace> {
        if self.done {
            return None;
        }
        let n = self.ambient.n;
        let mut rows = vec![0u8; self.k * n];
        for (r, &p) in self.pivots.iter().enumerate() {
            rows[r * n + p] = 1;
        }
        for (&(r, c), &x) in self.free.iter().zip(&self.counter) {
            rows[r * n + c] = x;
        }
        let out = Subspace {
            ambient: self.ambient.clone(),
            pivots: self.pivots.clone(),
            rows,
        };
        let q = self.ambient.q() as u8;
        let mut i = self.counter.len();
        let mut carried = true;
        while i > 0 {
            i -= 1;
            self.counter[i] += 1;
            if self.counter[i] < q {
                carried = false;
                break;
            }
            self.counter[i] = 0;
        }
        if carried {
            if self.advance_pivots() {
                self.reset_free();
            } else {
                self.done = true;
            }
        }
        Some(out)
    }
}

pub fn enumerate_subspaces(ambient: &AmbientSpace, k: usize) -> Result<SubspaceIter> {
    if k > ambient.n {
        return Err(Error::InvalidDimension { n: ambient.n, k });
    }
    let count = gauss(ambient.n as i64, k as i64, ambient.q());
    if count > BigInt::from(ENUMERATION_LIMIT) {
        return Err(Error::EnumerationTooLarge {
            count: count.to_string(),
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(SubspaceIter::new(ambient, k))
}

/// Uniformly random `k`-subspace, by rejection on random `k x n` matrices.
pub fn random_subspace<R: Rng + ?Sized>(ambient: &AmbientSpace, k: usize, rng: &mut R) -> Result<Subspace> {
    if k > ambient.n {
        return Err(Error::InvalidDimension { n: ambient.n, k });
    }
    let q = ambient.q();
    loop {
        let data: Vec<u8> = (0..k * ambient.n).map(|_| rng.gen_range(0..q) as u8).collect();
        let s = from_raw_rows(ambient, data, k);
        if s.dim() == k {
            return Ok(s);
        }
    }
}

/// Every `k`-subspace of an ambient space, enumerated once and indexed.
#[derive(Clone)]
pub struct Grassmannian {
    ambient: AmbientSpace,
    k: usize,
    members: Vec<Subspace>,
    index: HashMap<Subspace, usize>,
}

impl Grassmannian {
    pub fn new(ambient: &AmbientSpace, k: usize) -> Result<Self> {
        let members: Vec<Subspace> = enumerate_subspaces(ambient, k)?.collect();
        let index = members
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Ok(Grassmannian {
            ambient: ambient.clone(),
            k,
            members,
            index,
        })
    }

    pub fn ambient(&self) -> &AmbientSpace {
        &self.ambient
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Subspace] {
        &self.members
    }

    pub fn get(&self, i: usize) -> &Subspace {
        &self.members[i]
    }

    pub fn index_of(&self, s: &Subspace) -> Option<usize> {
        self.index.get(s).copied()
    }
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn canonicalize_is_invariant_under_row_operations(seed in any::<u64>(), q_idx in 0usize..4) {
            let q = [2u32, 3, 4, 5][q_idx];
            let amb = AmbientSpace::over(q, 5).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let k = rng.gen_range(1..=4);
            let s = random_subspace(&amb, k, &mut rng).unwrap();
            let f = amb.field();
            let mut rows = s.row_vectors();
            for _ in 0..10 {
                let i = rng.gen_range(0..k);
                let j = rng.gen_range(0..k);
                let c = Scalar::from_raw(rng.gen_range(1..q) as u8);
                if i == j {
                    for x in rows[i].iter_mut() { *x = f.mul(*x, c); }
                } else {
                    let src = rows[j].clone();
                    for (x, y) in rows[i].iter_mut().zip(src) { *x = f.add(*x, f.mul(c, y)); }
                }
            }
            rows.push(vec![Scalar::ZERO; 5]);
            let again = canonicalize(&amb, &rows).unwrap();
            prop_assert_eq!(&again, &s);
            prop_assert_eq!(canonicalize(&amb, &again.row_vectors()).unwrap(), again);
        }

        #[test]
        fn modular_dimension_identity(seed in any::<u64>()) {
            let amb = AmbientSpace::over(3, 5).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_subspace(&amb, rng.gen_range(0..=5), &mut rng).unwrap();
            let b = random_subspace(&amb, rng.gen_range(0..=5), &mut rng).unwrap();
            let i = intersect_dim(&a, &b).unwrap();
            let s = sum_span(&a, &b).unwrap();
            prop_assert_eq!(i + s.dim(), a.dim() + b.dim());
            prop_assert_eq!(meet(&a, &b).unwrap().dim(), i);
        }

        #[test]
        fn duality_reverses_inclusion(seed in any::<u64>(), qi in 0usize..4) {
            let q = [2u32, 3, 4, 5][qi];
            let amb = AmbientSpace::over(q, 5).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_subspace(&amb, 2, &mut rng).unwrap();
            let b = random_subspace(&amb, 3, &mut rng).unwrap();
            prop_assert_eq!(dual(&dual(&a)), a.clone());
            prop_assert_eq!(dual(&a).dim(), 3);
            prop_assert_eq!(a.is_contained_in(&b).unwrap(), dual(&b).is_contained_in(&dual(&a)).unwrap());
            // a⊥ ∩ b⊥ = (a + b)⊥
            let i = intersect_dim(&a, &b).unwrap();
            let j = intersect_dim(&dual(&a), &dual(&b)).unwrap();
            prop_assert_eq!(j, 5 - (a.dim() + b.dim() - i));
        }
    }
}
