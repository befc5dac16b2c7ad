//! Exact spectra of the relation matrices computed from the adjacency data
//! alone, without the eigenvalue formulas.
//!
//! Candidate eigenvalues are the integer roots of the characteristic
//! polynomial of the intersection matrix `L_i` (multiplication by `A_i` on
//! the basis `A_0..A_d`). The product of `A_i - lambda I` over the candidates
//! is then checked to vanish on the explicit `v x v` matrix, which proves
//! that the spectrum of `A_i` is contained in the candidate set.
//! Multiplicities are solved from the trace moments `tr(A_i^t)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grassmann::Scheme;
use crate::grassmann::invert_rational;

/// Largest scheme for which the explicit matrix product is formed.
pub const SPECTRUM_LIMIT: usize = 400;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Eigenvalue {
    pub value: i64,
    pub multiplicity: usize,
}

/// Characteristic polynomial `det(xI - M)` of a small integer matrix,
/// coefficients from the constant term up, by Faddeev–LeVerrier.
pub fn characteristic_polynomial(m: &[Vec<i64>]) -> Vec<BigInt> {
    let size = m.len();
    let mr: Vec<Vec<BigRational>> = m
        .iter()
        .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
        .collect();
    let mut coeffs = vec![BigRational::zero(); size + 1];
    coeffs[size] = BigRational::one();
    // M_1 = I, c_{n-1} = -tr(M)
    let mut mk: Vec<Vec<BigRational>> = (0..size)
        .map(|i| (0..size).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect();
    for k in 1..=size {
        let amk = matmul(&mr, &mk);
        let tr: BigRational = (0..size).map(|i| amk[i][i].clone()).sum();
        let c = -tr / BigRational::from_integer(BigInt::from(k));
        coeffs[size - k] = c.clone();
        mk = amk;
        for (i, row) in mk.iter_mut().enumerate() {
            row[i] += &c;
        }
    }
    coeffs
        .into_iter()
        .map(|c| {
            debug_assert!(c.is_integer());
            c.to_integer()
        })
        .collect()
}

fn matmul(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|t| &a[i][t] * &b[t][j]).sum())
                .collect()
        })
        .collect()
}

fn eval(poly: &[BigInt], x: i64) -> BigInt {
    let x = BigInt::from(x);
    poly.iter().rev().fold(BigInt::zero(), |acc, c| acc * &x + c)
}

/// Spectrum of `A_relation` sorted by decreasing eigenvalue.
pub fn brute_force_spectrum(scheme: &Scheme, relation: usize) -> Result<Vec<Eigenvalue>> {
    let v = scheme.v();
    let d = scheme.params.classes;
    if relation > d {
        return Err(Error::InvalidParameters(format!("relation {relation} > {d}")));
    }
    if v > SPECTRUM_LIMIT {
        return Err(Error::EnumerationTooLarge {
            count: v.to_string(),
            limit: SPECTRUM_LIMIT as u64,
        });
    }
    let rel = scheme.relations();

    // representative pairs (0, y_l) and p_{ij}^l counted from them
    let mut reps = vec![None; d + 1];
    for y in 0..v {
        reps[rel.get(0, y)].get_or_insert(y);
    }
    let mut l_mat = vec![vec![0i64; d + 1]; d + 1];
    for (l, rep) in reps.iter().enumerate() {
        let y = rep.ok_or_else(|| Error::SchemeAxiomViolation(format!("relation {l} is empty")))?;
        for z in 0..v {
            if rel.get(0, z) == relation {
                l_mat[l][rel.get(z, y)] += 1;
            }
        }
    }
    let valency = l_mat[0][relation];
    let poly = characteristic_polynomial(&l_mat);
    let roots: Vec<i64> = (-valency..=valency).rev().filter(|&x| eval(&poly, x).is_zero()).collect();

    let a: Vec<Vec<i128>> = (0..v)
        .map(|x| rel.row(x).iter().map(|&r| (r as usize == relation) as i128).collect())
        .collect();
    let mut prod: Vec<Vec<i128>> = (0..v).map(|i| (0..v).map(|j| (i == j) as i128).collect()).collect();
    for &lam in &roots {
        prod = (0..v)
            .map(|i| {
                (0..v)
                    .map(|j| {
                        let s: i128 = (0..v).filter(|&t| a[i][t] != 0).map(|t| prod[t][j]).sum();
                        s - lam as i128 * prod[i][j]
                    })
                    .collect()
            })
            .collect();
    }
    if prod.iter().flatten().any(|&x| x != 0) {
        return Err(Error::SchemeAxiomViolation(format!(
            "candidate eigenvalues do not annihilate A_{relation}"
        )));
    }

    // tr(A^t) for t < #roots, then the Vandermonde system sum_r m_r lambda_r^t
    let r = roots.len();
    let mut traces = Vec::with_capacity(r);
    let mut power: Vec<Vec<i128>> = (0..v).map(|i| (0..v).map(|j| (i == j) as i128).collect()).collect();
    for t in 0..r {
        if t > 0 {
            power = (0..v)
                .map(|i| {
                    (0..v)
                        .map(|j| (0..v).filter(|&s| a[i][s] != 0).map(|s| power[s][j]).sum())
                        .collect()
                })
                .collect();
        }
        traces.push((0..v).map(|i| power[i][i]).sum::<i128>());
    }
    let vander: Vec<Vec<BigRational>> = (0..r)
        .map(|t| {
            roots
                .iter()
                .map(|&x| BigRational::from_integer(num_traits::pow(BigInt::from(x), t)))
                .collect()
        })
        .collect();
    let inv = invert_rational(&vander)?;
    let mut out = Vec::new();
    for (idx, &value) in roots.iter().enumerate() {
        let m: BigRational = (0..r)
            .map(|t| &inv[idx][t] * BigRational::from_integer(BigInt::from(traces[t])))
            .sum();
        if !m.is_integer() || m.is_negative() {
            return Err(Error::SchemeAxiomViolation(format!("multiplicity {m} for eigenvalue {value}")));
        }
        let m = m.to_integer().to_usize().unwrap_or(0);
        if m > 0 {
            out.push(Eigenvalue { value, multiplicity: m });
        }
    }
    Ok(out)
}

/// The spectrum of `A_relation` predicted by the tables: column `relation` of
/// `P` with multiplicities merged over equal eigenvalues.
pub fn table_spectrum(scheme: &Scheme, relation: usize) -> Vec<Eigenvalue> {
    let t = &scheme.tables;
    let mut out: Vec<Eigenvalue> = Vec::new();
    for j in 0..=scheme.params.classes {
        let value = t.p[j][relation].to_i64().expect("eigenvalue fits in i64");
        let m = t.multiplicities[j].to_usize().expect("multiplicity fits in usize");
        match out.iter_mut().find(|e| e.value == value) {
            Some(e) => e.multiplicity += m,
            None => out.push(Eigenvalue { value, multiplicity: m }),
        }
    }
    out.sort_by_key(|e| std::cmp::Reverse(e.value));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charpoly_of_small_matrices() {
        let m = vec![vec![2, 1], vec![1, 2]];
        let p: Vec<i64> = characteristic_polynomial(&m).iter().map(|c| c.to_i64().unwrap()).collect();
        assert_eq!(p, vec![3, -4, 1]);
        let m = vec![vec![0, 1, 0], vec![0, 0, 1], vec![6, -11, 6]];
        let p: Vec<i64> = characteristic_polynomial(&m).iter().map(|c| c.to_i64().unwrap()).collect();
        assert_eq!(p, vec![-6, 11, -6, 1]);
    }

    #[test]
    fn j242_disjointness_spectrum() {
        let scheme = Scheme::new(2, 4, 2).unwrap();
        let s = brute_force_spectrum(&scheme, 2).unwrap();
        assert_eq!(
            s,
            vec![
                Eigenvalue { value: 16, multiplicity: 1 },
                Eigenvalue { value: 2, multiplicity: 20 },
                Eigenvalue { value: -4, multiplicity: 14 },
            ]
        );
        assert_eq!(s, table_spectrum(&scheme, 2));
    }

    #[test]
    fn identity_relation() {
        let scheme = Scheme::new(2, 4, 2).unwrap();
        let s = brute_force_spectrum(&scheme, 0).unwrap();
        assert_eq!(s, vec![Eigenvalue { value: 1, multiplicity: 35 }]);
        assert_eq!(s, table_spectrum(&scheme, 0));
    }
}
