//! Table-driven arithmetic in GF(q) for the small prime powers this crate
//! works with.
//!
//! Elements are encoded as integers in `[0, q)`. For `q = p^e` with `e > 1`
//! the base-`p` digits of the encoding are the coefficients of a polynomial
//! of degree `< e`, lowest degree first, reduced modulo a fixed irreducible
//! polynomial.

use std::fmt;

use crate::error::{Error, Result};

/// Field orders accepted by [`make_field`].
pub const SUPPORTED_ORDERS: [u32; 10] = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16];

/// An element of GF(q), stored by its integer encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scalar(u8);

impl Scalar {
    pub const ZERO: Scalar = Scalar(0);
    pub const ONE: Scalar = Scalar(1);

    pub fn new(spec: &FieldSpec, value: u32) -> Result<Self> {
        if value >= spec.q {
            return Err(Error::InvalidScalar { q: spec.q, value });
        }
        Ok(Scalar(value as u8))
    }

    pub fn value(self) -> u32 {
        self.0 as u32
    }

    pub(crate) fn raw(self) -> u8 {
        self.0
    }

    pub(crate) fn from_raw(value: u8) -> Self {
        Scalar(value)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Mul,
    Neg,
    Inv,
}

/// GF(q) with precomputed operation tables. Immutable after construction.
#[derive(Clone)]
pub struct FieldSpec {
    q: u32,
    p: u32,
    e: u32,
    modulus: Vec<u32>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("q", &self.q)
            .field("p", &self.p)
            .field("e", &self.e)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        // tables are a deterministic function of q
        self.q == other.q
    }
}

impl Eq for FieldSpec {}

impl FieldSpec {
    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.e
    }

    /// Coefficients of the defining polynomial, lowest degree first and
    /// including the leading 1. Empty for prime fields.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn elements(&self) -> impl Iterator<Item = Scalar> {
        (0..self.q as u8).map(Scalar)
    }

    #[inline]
    pub fn add(&self, a: Scalar, b: Scalar) -> Scalar {
        Scalar(self.add_raw(a.0, b.0))
    }

    #[inline]
    pub fn sub(&self, a: Scalar, b: Scalar) -> Scalar {
        Scalar(self.add_raw(a.0, self.neg_raw(b.0)))
    }

    #[inline]
    pub fn mul(&self, a: Scalar, b: Scalar) -> Scalar {
        Scalar(self.mul_raw(a.0, b.0))
    }

    #[inline]
    pub fn neg(&self, a: Scalar) -> Scalar {
        Scalar(self.neg_raw(a.0))
    }

    pub fn inv(&self, a: Scalar) -> Result<Scalar> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero(self.q));
        }
        Ok(Scalar(self.inv_raw(a.0)))
    }

    #[inline]
    pub(crate) fn add_raw(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub(crate) fn mul_raw(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub(crate) fn neg_raw(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }

    /// Inverse of a nonzero raw element; callers guarantee `a != 0`.
    #[inline]
    pub(crate) fn inv_raw(&self, a: u8) -> u8 {
        debug_assert!(a != 0);
        self.inv[a as usize]
    }
}

/// Builds GF(q). For `q = p^e`, `e > 1`, the modulus is the monic irreducible
/// polynomial of degree `e` whose lower coefficients, read as a base-`p`
/// number with the highest coefficient most significant, are smallest.
pub fn make_field(q: u32) -> Result<FieldSpec> {
    if q < 2 {
        return Err(Error::NotAPrimePower(q));
    }
    let (p, e) = prime_power(q).ok_or(Error::NotAPrimePower(q))?;
    if !SUPPORTED_ORDERS.contains(&q) {
        return Err(Error::UnsupportedField(q));
    }
    let modulus = if e == 1 {
        Vec::new()
    } else {
        smallest_irreducible(p, e)
    };
    let qs = q as usize;
    let mut add = vec![0u8; qs * qs];
    let mut mul = vec![0u8; qs * qs];
    for a in 0..q {
        let da = digits(a, p, e);
        for b in 0..q {
            let db = digits(b, p, e);
            let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
            add[a as usize * qs + b as usize] = undigits(&sum, p) as u8;
            let prod = if e == 1 {
                vec![(a * b) % p]
            } else {
                poly_mulmod(&da, &db, &modulus, p)
            };
            mul[a as usize * qs + b as usize] = undigits(&prod, p) as u8;
        }
    }
    let mut neg = vec![0u8; qs];
    let mut inv = vec![0u8; qs];
    for a in 0..qs {
        neg[a] = (0..qs).find(|&b| add[a * qs + b] == 0).unwrap() as u8;
        if a != 0 {
            inv[a] = (1..qs)
                .find(|&b| mul[a * qs + b] == 1)
                .expect("nonzero element without inverse: modulus not irreducible") as u8;
        }
    }
    Ok(FieldSpec {
        q,
        p,
        e,
        modulus,
        add,
        mul,
        neg,
        inv,
    })
}

pub fn field_arith(spec: &FieldSpec, op: FieldOp, a: Scalar, b: Option<Scalar>) -> Result<Scalar> {
    for x in std::iter::once(a).chain(b) {
        if x.value() >= spec.q {
            return Err(Error::InvalidScalar {
                q: spec.q,
                value: x.value(),
            });
        }
    }
    match op {
        FieldOp::Add => Ok(spec.add(a, b.ok_or(Error::MissingOperand("add"))?)),
        FieldOp::Mul => Ok(spec.mul(a, b.ok_or(Error::MissingOperand("mul"))?)),
        FieldOp::Neg => Ok(spec.neg(a)),
        FieldOp::Inv => spec.inv(a),
    }
}

/// `(p, e)` with `q = p^e`, or `None` when `q` is not a prime power.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    let mut p = 2;
    while p * p <= q && q % p != 0 {
        p += 1;
    }
    if q % p != 0 {
        // q itself is prime
        return Some((q, 1));
    }
    let mut rest = q;
    let mut e = 0;
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

fn digits(mut value: u32, p: u32, e: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(e as usize);
    for _ in 0..e {
        out.push(value % p);
        value /= p;
    }
    out
}

fn undigits(ds: &[u32], p: u32) -> u32 {
    ds.iter().rev().fold(0, |acc, &d| acc * p + d)
}

fn poly_mulmod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let e = modulus.len() - 1;
    let mut prod = vec![0u32; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    poly_rem(&mut prod, modulus, p);
    prod.truncate(e);
    prod.resize(e, 0);
    prod
}

/// Reduces `a` in place modulo a monic `m`.
fn poly_rem(a: &mut [u32], m: &[u32], p: u32) {
    let dm = m.len() - 1;
    for top in (dm..a.len()).rev() {
        let c = a[top];
        if c == 0 {
            continue;
        }
        for (i, &mi) in m.iter().enumerate() {
            let idx = top - dm + i;
            a[idx] = (a[idx] + (p - c) * mi) % p;
        }
    }
}

fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let deg = poly.len() - 1;
    for d in 1..deg {
        for low in 0..p.pow(d as u32) {
            let mut divisor = digits(low, p, d as u32);
            divisor.push(1);
            let mut rem = poly.to_vec();
            poly_rem(&mut rem, &divisor, p);
            if rem[..d].iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible(p: u32, e: u32) -> Vec<u32> {
    (0..p.pow(e))
        .map(|low| {
            let mut poly = digits(low, p, e);
            poly.push(1);
            poly
        })
        .find(|poly| is_irreducible(poly, p))
        .expect("an irreducible polynomial exists in every degree")
}
