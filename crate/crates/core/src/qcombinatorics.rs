//! Gaussian binomials and the exact rational quantities built from them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Number of `k`-dimensional subspaces of an `n`-dimensional space over GF(q),
/// by the product formula. Zero when `k < 0` or `k > n`.
pub fn gauss(n: i64, k: i64, q: u32) -> BigInt {
    if k < 0 || k > n {
        return BigInt::zero();
    }
    let q = BigInt::from(q);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 1..=k {
        num *= num_traits::pow(q.clone(), (n - i + 1) as usize) - 1u32;
        den *= num_traits::pow(q.clone(), i as usize) - 1u32;
    }
    let (quot, rem) = num.div_rem(&den);
    debug_assert!(rem.is_zero());
    quot
}

/// `q^e` as an exact rational; `e` may be negative.
pub fn q_pow(q: u32, e: i64) -> BigRational {
    let base = BigInt::from(q);
    if e >= 0 {
        BigRational::from_integer(num_traits::pow(base, e as usize))
    } else {
        BigRational::new(BigInt::one(), num_traits::pow(base, (-e) as usize))
    }
}

pub fn rational(n: &BigInt) -> BigRational {
    BigRational::from_integer(n.clone())
}

/// Gaussian binomials `[n, k]_q` for `0 <= k <= n <= max_n` and powers of
/// `q`, filled by the q-Pascal recurrence. Used where many entries are needed
/// for one `q` at large `n`.
#[derive(Debug, Clone)]
pub struct GaussTable {
    q: u32,
    max_n: usize,
    rows: Vec<Vec<BigInt>>,
    powers: Vec<BigInt>,
}

impl GaussTable {
    pub fn new(q: u32, max_n: usize) -> Self {
        let qb = BigInt::from(q);
        let mut powers = Vec::with_capacity(max_n + 1);
        powers.push(BigInt::one());
        for i in 1..=max_n {
            let next = &powers[i - 1] * &qb;
            powers.push(next);
        }
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(max_n + 1);
        rows.push(vec![BigInt::one()]);
        for n in 1..=max_n {
            let prev = &rows[n - 1];
            let mut row = Vec::with_capacity(n + 1);
            row.push(BigInt::one());
            for k in 1..n {
                // [n,k] = [n-1,k-1] + q^k [n-1,k]
                row.push(&prev[k - 1] + &powers[k] * &prev[k]);
            }
            row.push(BigInt::one());
            rows.push(row);
        }
        GaussTable {
            q,
            max_n,
            rows,
            powers,
        }
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    /// `[n, k]_q`, zero outside `0 <= k <= n`. Panics when `n > max_n`.
    pub fn get(&self, n: i64, k: i64) -> &BigInt {
        static ZERO: std::sync::OnceLock<BigInt> = std::sync::OnceLock::new();
        if k < 0 || n < 0 || k > n {
            return ZERO.get_or_init(BigInt::zero);
        }
        assert!(n as usize <= self.max_n, "GaussTable queried beyond max_n");
        &self.rows[n as usize][k as usize]
    }

    pub fn pow(&self, e: u64) -> BigInt {
        match self.powers.get(e as usize) {
            Some(p) => p.clone(),
            None => num_traits::pow(BigInt::from(self.q), e as usize),
        }
    }
}

/// The two Hilton–Milner-type size thresholds for a given `(q, k)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundProfile {
    pub q: u32,
    pub k: u32,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub y_hm: BigRational,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub y_hm2: BigRational,
}

pub fn bound_profile(q: u32, k: u32) -> Result<BoundProfile> {
    if q < 2 || k < 2 {
        return Err(Error::InvalidParameters(format!(
            "bound profile needs q >= 2 and k >= 2, got q={q}, k={k}"
        )));
    }
    let k = k as i64;
    let core = gauss(k, 1, q) * gauss(2 * k - 2, k - 2, q);
    let core = rational(&core);
    let factor = BigRational::one() + BigRational::new(3.into(), q.into());
    Ok(BoundProfile {
        q,
        k: k as u32,
        y_hm: factor * &core,
        y_hm2: core * BigInt::from(3),
    })
}
