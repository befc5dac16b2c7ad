//! Spectral bounds for families in a Grassmann scheme: the Hoffman ratio
//! bound, the energy cap for independent sets and the averaging degree
//! threshold, all as exact rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grassmann::{FamilyRecord, SchemeParams, SchemeTables};
use crate::qcombinatorics::rational;

#[derive(Debug, Clone, Serialize)]
pub struct SpectralContext {
    pub params: SchemeParams,
    pub i: usize,
    #[serde(serialize_with = "crate::report::ser_bigint")]
    pub p0i: BigInt,
    #[serde(serialize_with = "crate::report::ser_bigint")]
    pub p1i: BigInt,
    /// Smallest eigenvalue of `A_i` strictly above the minimum; `None` when
    /// `A_i` has a single eigenvalue.
    #[serde(serialize_with = "crate::report::ser_opt_bigint")]
    pub pminus_second: Option<BigInt>,
    #[serde(serialize_with = "crate::report::ser_bigint")]
    pub pminus_min: BigInt,
    /// Whether `P_1i` is the smallest eigenvalue of `A_i`.
    pub p1i_is_min: bool,
    /// Eigenspaces other than `V_0` and those attaining the minimum.
    pub r_indices_cap: Vec<usize>,
    /// Eigenspaces `V_2 .. V_d`.
    pub r_indices_averaging: Vec<usize>,
}

impl SpectralContext {
    pub fn new(tables: &SchemeTables, i: usize) -> Result<Self> {
        let d = tables.classes();
        if i > d {
            return Err(Error::InvalidParameters(format!("relation {i} exceeds class count {d}")));
        }
        if d == 0 {
            return Err(Error::DegenerateRelation(i));
        }
        let col: Vec<&BigInt> = (0..=d).map(|j| &tables.p[j][i]).collect();
        let min = col.iter().copied().min().expect("nonempty").clone();
        let pminus_second = col.iter().copied().filter(|x| **x > min).min().cloned();
        let r_indices_cap = (1..=d).filter(|&j| *col[j] != min).collect();
        Ok(SpectralContext {
            params: tables.params.clone(),
            i,
            p0i: col[0].clone(),
            p1i: col[1].clone(),
            pminus_second,
            p1i_is_min: *col[1] == min,
            pminus_min: min,
            r_indices_cap,
            r_indices_averaging: (2..=d).collect(),
        })
    }

    /// True when the cap's `E_r` differs from the averaging bound's `E_r`,
    /// i.e. the minimum is attained off `V_1` or more than once.
    pub fn readings_differ(&self) -> bool {
        self.r_indices_cap != self.r_indices_averaging
    }

    fn require_min(&self) -> Result<()> {
        if self.i == 0 {
            return Err(Error::DegenerateRelation(0));
        }
        if !self.p1i_is_min {
            return Err(Error::EigenvalueOrderViolation(format!(
                "P_1{} = {} is not the smallest eigenvalue {}",
                self.i, self.p1i, self.pminus_min
            )));
        }
        Ok(())
    }
}

/// `v (-P_1i) / (P_0i - P_1i)`.
pub fn hoffman_independence_bound(ctx: &SpectralContext) -> Result<BigRational> {
    ctx.require_min()?;
    let v = rational(&ctx.params.v);
    Ok(v * rational(&-&ctx.p1i) / rational(&(&ctx.p0i - &ctx.p1i)))
}

/// Upper bound on `chi^T E_r chi` for an independent set of size `y` in
/// `(X, R_i)`.
pub fn stability_energy_cap(ctx: &SpectralContext, y: &BigInt) -> Result<BigRational> {
    ctx.require_min()?;
    let second = ctx.pminus_second.as_ref().ok_or_else(|| {
        Error::EigenvalueOrderViolation(format!("A_{} has a single eigenvalue", ctx.i))
    })?;
    let v = rational(&ctx.params.v);
    let yr = rational(y);
    let spread = rational(&(&ctx.p0i - &ctx.p1i));
    let num = &yr * (rational(&-&ctx.p1i) - spread * &yr / v);
    Ok(num / rational(&(second - &ctx.p1i)))
}

/// Some member of any family of size `y` with energy `energy_r` outside
/// `<j> + V_1` has at least this many `R_i`-neighbours in the family.
pub fn averaging_degree_bound(ctx: &SpectralContext, y: &BigInt, energy_r: &BigRational) -> Result<BigRational> {
    if !y.is_positive() {
        return Err(Error::EmptyFamily);
    }
    if energy_r.is_negative() {
        return Err(Error::InvalidParameters(format!("negative energy {energy_r}")));
    }
    let v = rational(&ctx.params.v);
    let yr = rational(y);
    let p1 = rational(&ctx.p1i);
    Ok(rational(&(&ctx.p0i - &ctx.p1i)) * &yr / v + &p1 + (rational(&ctx.pminus_min) - p1) * energy_r / yr)
}

#[derive(Debug, Clone, Serialize)]
pub struct DegreeCheck {
    pub relation: usize,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub threshold: BigRational,
    pub max_degree: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub relation: usize,
    pub y: usize,
    #[serde(serialize_with = "crate::report::ser_opt_rational")]
    pub hoffman_bound: Option<BigRational>,
    pub r_indices_cap: Vec<usize>,
    pub r_indices_averaging: Vec<usize>,
    pub readings_differ: bool,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub energy_r: BigRational,
    /// `None` when `P_1i` is not the minimum, so the cap does not apply.
    #[serde(serialize_with = "crate::report::ser_opt_rational")]
    pub energy_cap: Option<BigRational>,
    pub cap_holds: bool,
    pub cap_tight: bool,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub degree1_energy: BigRational,
    pub degree_checks: Vec<DegreeCheck>,
    pub passed: bool,
}

/// Checks both spectral inequalities on a family independent in `(X, R_i)`.
pub fn audit_family(tables: &SchemeTables, record: &FamilyRecord, i: usize) -> Result<AuditReport> {
    if record.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let ctx = SpectralContext::new(tables, i)?;
    if i == 0 {
        return Err(Error::DegenerateRelation(0));
    }
    if let Some(first) = record.degrees.iter().position(|row| row[i] > 0) {
        let second = record
            .members
            .iter()
            .position(|m| {
                crate::grassmann::relation_index(&record.members[first], m, &record.params).ok() == Some(i)
            })
            .expect("degree count implies a partner");
        return Err(Error::NotIndependent { relation: i, first, second });
    }
    let y = BigInt::from(record.y);
    let energy_r: BigRational = ctx.r_indices_cap.iter().map(|&j| record.energies[j].clone()).sum();
    let energy_cap = if ctx.p1i_is_min && ctx.pminus_second.is_some() {
        Some(stability_energy_cap(&ctx, &y)?)
    } else {
        None
    };
    let (cap_holds, cap_tight) = match &energy_cap {
        Some(c) => (energy_r <= *c, energy_r == *c),
        None => (true, false),
    };
    let degree1_energy: BigRational = record.energies.iter().skip(2).sum();
    let degree_checks = (1..=record.params.classes)
        .map(|rel| {
            let c = SpectralContext::new(tables, rel)?;
            let threshold = averaging_degree_bound(&c, &y, &degree1_energy)?;
            let max_degree = record.degrees.iter().map(|row| row[rel]).max().unwrap_or(0);
            let holds = BigRational::from_integer(max_degree.into()) >= threshold;
            Ok(DegreeCheck { relation: rel, threshold, max_degree, holds })
        })
        .collect::<Result<Vec<_>>>()?;
    let hoffman_bound = hoffman_independence_bound(&ctx).ok();
    let passed = cap_holds
        && degree_checks.iter().all(|c| c.holds)
        && hoffman_bound.as_ref().map_or(true, |h| BigRational::from_integer(y.clone()) <= *h);
    Ok(AuditReport {
        relation: i,
        y: record.y,
        hoffman_bound,
        readings_differ: ctx.readings_differ(),
        r_indices_cap: ctx.r_indices_cap,
        r_indices_averaging: ctx.r_indices_averaging,
        energy_r,
        energy_cap,
        cap_holds,
        cap_tight,
        degree1_energy,
        degree_checks,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::Scheme;
    use crate::projective::Subspace;
    use crate::qcombinatorics::gauss;

    fn frac(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn tables(q: u32, n: usize, k: usize) -> SchemeTables {
        SchemeTables::new(&SchemeParams::new(q, n, k).unwrap()).unwrap()
    }

    #[test]
    fn hoffman_values() {
        let t = tables(2, 4, 2);
        assert_eq!(hoffman_independence_bound(&SpectralContext::new(&t, 2).unwrap()).unwrap(), frac(7, 1));
        let t = tables(3, 4, 2);
        assert_eq!(hoffman_independence_bound(&SpectralContext::new(&t, 2).unwrap()).unwrap(), frac(13, 1));
        assert_eq!(
            hoffman_independence_bound(&SpectralContext::new(&t, 0).unwrap()).unwrap_err(),
            Error::DegenerateRelation(0)
        );
    }

    #[test]
    fn hoffman_matches_ekr_value() {
        for q in [2u32, 3] {
            for n in 4..=8usize {
                let t = tables(q, n, 2);
                let h = hoffman_independence_bound(&SpectralContext::new(&t, 2).unwrap()).unwrap();
                assert_eq!(h, rational(&gauss(n as i64 - 1, 1, q)), "q={q} n={n}");
            }
        }
    }

    #[test]
    fn cap_values() {
        let t = tables(2, 4, 2);
        let ctx = SpectralContext::new(&t, 2).unwrap();
        assert_eq!(stability_energy_cap(&ctx, &7.into()).unwrap(), frac(0, 1));
        assert_eq!(stability_energy_cap(&ctx, &1.into()).unwrap(), frac(4, 7));
        assert_eq!(stability_energy_cap(&ctx, &0.into()).unwrap(), frac(0, 1));
        // A_1 on J_2(4,2) has its minimum -3 on V_2, not on V_1
        let ctx1 = SpectralContext::new(&t, 1).unwrap();
        assert!(!ctx1.p1i_is_min);
        assert!(matches!(
            stability_energy_cap(&ctx1, &3.into()),
            Err(Error::EigenvalueOrderViolation(_))
        ));
    }

    #[test]
    fn averaging_values() {
        let t = tables(2, 4, 2);
        let ctx = SpectralContext::new(&t, 1).unwrap();
        assert_eq!(averaging_degree_bound(&ctx, &7.into(), &frac(0, 1)).unwrap(), frac(6, 1));
        let single = averaging_degree_bound(&ctx, &1.into(), &frac(4, 7)).unwrap();
        assert!(single <= frac(0, 1));
        let ctx2 = SpectralContext::new(&t, 2).unwrap();
        assert_eq!(averaging_degree_bound(&ctx2, &35.into(), &frac(0, 1)).unwrap(), frac(16, 1));
        assert_eq!(averaging_degree_bound(&ctx, &0.into(), &frac(0, 1)).unwrap_err(), Error::EmptyFamily);
    }

    fn pencil(scheme: &Scheme) -> Vec<Subspace> {
        let p = Subspace::coordinate(scheme.ambient(), &[0]).unwrap();
        scheme.universe().members().iter().filter(|s| p.is_contained_in(s).unwrap()).cloned().collect()
    }

    fn hyperplane_family(scheme: &Scheme) -> Vec<Subspace> {
        let h = Subspace::coordinate(scheme.ambient(), &[0, 1, 2]).unwrap();
        scheme.universe().members().iter().filter(|s| s.is_contained_in(&h).unwrap()).cloned().collect()
    }

    #[test]
    fn dictator_and_dual_audits_agree() {
        let scheme = Scheme::new(2, 4, 2).unwrap();
        let a = audit_family(&scheme.tables, &scheme.record(pencil(&scheme)).unwrap(), 2).unwrap();
        let b = audit_family(&scheme.tables, &scheme.record(hyperplane_family(&scheme)).unwrap(), 2).unwrap();
        for r in [&a, &b] {
            assert!(r.passed && r.cap_tight);
            assert_eq!(r.energy_cap, Some(frac(0, 1)));
            assert_eq!(r.degree_checks[0].threshold, frac(6, 1));
            assert_eq!(r.degree_checks[0].max_degree, 6);
            assert!(!r.readings_differ);
        }
    }

    #[test]
    fn audit_rejects_dependent_families() {
        let scheme = Scheme::new(2, 4, 2).unwrap();
        let a = Subspace::coordinate(scheme.ambient(), &[0, 1]).unwrap();
        let b = Subspace::coordinate(scheme.ambient(), &[2, 3]).unwrap();
        let rec = scheme.record(vec![a, b]).unwrap();
        assert!(matches!(
            audit_family(&scheme.tables, &rec, 2),
            Err(Error::NotIndependent { relation: 2, .. })
        ));
    }
}
