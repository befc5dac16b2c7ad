use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use qgrass_core::certificates::{self, Certificate, Check, CLAIMS};
use qgrass_core::coloring::{chromatic_bounds, exact_chromatic, verify_coloring, ChromaticResult, KneserGraph};
use qgrass_core::families::{
    build_dictator, build_dual_dictator, build_hm_family, classify_triviality, cover_profile, cross_intersecting_check,
    grow_cross_intersecting, is_intersecting, max_nontrivial_search, quotient_family, FamilyClass, Optimality,
};
use qgrass_core::format::{format_family, format_subspace, parse_family, parse_subspace};
use qgrass_core::grassmann::{degree1_defect, validate_scheme, FamilyRecord, Scheme, SchemeParams, SchemeTables};
use qgrass_core::projective::enumerate_subspaces;
use qgrass_core::qcombinatorics::gauss as gauss_binomial;
use qgrass_core::qfield::prime_power;
use qgrass_core::report::rational_string;
use qgrass_core::spectralbounds::{
    audit_family, averaging_degree_bound, hoffman_independence_bound, stability_energy_cap, SpectralContext,
};
use qgrass_core::spectrum::{brute_force_spectrum, table_spectrum, SPECTRUM_LIMIT};
use qgrass_core::{AmbientSpace, Subspace};

use crate::{
    report, BoundCmd, BoundKind, CertifyCmd, ChromaticCmd, CrossCmd, Failure, FamilyCmd, FamilyType, Outcome,
    QuotientCmd, SchemeArgs, SchemeCmd, SearchCmd, EXIT_FAILED, EXIT_INFEASIBLE, EXIT_OK,
};

type CmdResult = Result<Outcome, Failure>;

fn exit_code(ok: bool) -> u8 {
    if ok {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}

fn read_family(ambient: &AmbientSpace, path: &Path) -> Result<Vec<Subspace>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_family(ambient, &text)?)
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

fn required<'a>(value: &'a Option<String>, flag: &str, what: &str) -> Result<&'a str, Failure> {
    value
        .as_deref()
        .ok_or_else(|| Failure::usage(format!("{what} requires --{flag}")))
}

/// Formula-only commands accept any prime power, not just the tabulated fields.
fn formula_params(a: &SchemeArgs) -> Result<SchemeParams, Failure> {
    if prime_power(a.q).is_none() {
        return Err(qgrass_core::Error::NotAPrimePower(a.q).into());
    }
    Ok(SchemeParams::new(a.q, a.n, a.k)?)
}

fn strings(members: &[Subspace]) -> Vec<String> {
    members.iter().map(format_subspace).collect()
}

pub fn gauss(a: SchemeArgs) -> CmdResult {
    formula_params(&a)?;
    let value = gauss_binomial(a.n as i64, a.k as i64, a.q);
    let summary = format!("[{}, {}]_{} = {value}", a.n, a.k, a.q);
    Ok(Outcome {
        json: report("gauss", &a, json!({ "value": value.to_string() }), None),
        summary,
        code: EXIT_OK,
    })
}

pub fn enumerate(a: SchemeArgs, output: Option<PathBuf>) -> CmdResult {
    let ambient = AmbientSpace::over(a.q, a.n)?;
    let members: Vec<Subspace> = enumerate_subspaces(&ambient, a.k)?.collect();
    let summary = format!("{} subspaces of dimension {} in GF({})^{}", members.len(), a.k, a.q, a.n);
    let results = match &output {
        Some(path) => {
            write_file(path, &format_family(&members))?;
            json!({ "count": members.len(), "output": path.display().to_string() })
        }
        None => json!({ "count": members.len(), "subspaces": strings(&members) }),
    };
    let params = json!({ "q": a.q, "n": a.n, "k": a.k, "output": output.map(|p| p.display().to_string()) });
    Ok(Outcome {
        json: report("enumerate", params, results, None),
        summary,
        code: EXIT_OK,
    })
}

#[derive(Serialize)]
struct SpectrumCheck {
    relation: usize,
    brute_force: Vec<qgrass_core::spectrum::Eigenvalue>,
    tables: Vec<qgrass_core::spectrum::Eigenvalue>,
    agree: bool,
}

pub fn scheme(a: SchemeCmd) -> CmdResult {
    let params = formula_params(&a.scheme)?;
    let tables = SchemeTables::new(&params)?;
    let mut ok = true;
    let mut summary = format!(
        "J_{}({},{}): v = {}, {} classes, valencies {:?}",
        params.q,
        params.n,
        params.k,
        params.v,
        params.classes,
        tables.valencies.iter().map(|x| x.to_string()).collect::<Vec<_>>()
    );
    let mut validation = None;
    let mut spectra = None;
    if a.validate || a.spectra {
        let scheme = Scheme::new(params.q, params.n, params.k)?;
        if a.validate {
            let rep = validate_scheme(&scheme, a.samples, a.seed)?;
            ok &= rep.passed;
            summary.push_str(&format!(
                "\nvalidation ({} pairs, {}): {}",
                rep.pairs_checked,
                if rep.exhaustive { "exhaustive" } else { "sampled" },
                if rep.passed { "passed" } else { "FAILED" }
            ));
            validation = Some(rep);
        }
        if a.spectra {
            if scheme.v() > SPECTRUM_LIMIT {
                return Err(Failure {
                    code: EXIT_INFEASIBLE,
                    message: format!("explicit spectra need v <= {SPECTRUM_LIMIT}, got {}", scheme.v()),
                });
            }
            let mut checks = Vec::new();
            for relation in 0..=params.classes {
                let brute = brute_force_spectrum(&scheme, relation)?;
                let table = table_spectrum(&scheme, relation);
                let agree = brute == table;
                ok &= agree;
                checks.push(SpectrumCheck {
                    relation,
                    brute_force: brute,
                    tables: table,
                    agree,
                });
            }
            summary.push_str(&format!(
                "\nexplicit spectra {} the tables",
                if checks.iter().all(|c| c.agree) { "match" } else { "DO NOT match" }
            ));
            spectra = Some(checks);
        }
    }
    let results = json!({
        "tables": tables,
        "validation": validation,
        "spectra": spectra,
    });
    let seed = a.validate.then_some(a.seed);
    Ok(Outcome {
        json: report("scheme", &a, results, seed),
        summary,
        code: exit_code(ok),
    })
}

fn build_family(a: &FamilyCmd, scheme: &Scheme) -> Result<FamilyRecord, Failure> {
    let ambient = scheme.ambient();
    if let Some(path) = &a.input {
        return Ok(scheme.record(read_family(ambient, path)?)?);
    }
    let kind = a
        .family_type
        .ok_or_else(|| Failure::usage("family requires --type or --input"))?;
    Ok(match kind {
        FamilyType::Dictator => {
            let p = parse_subspace(ambient, required(&a.point, "point", "a dictator")?)?;
            build_dictator(scheme, &p)?
        }
        FamilyType::Dual => {
            let h = parse_subspace(ambient, required(&a.hyperplane, "hyperplane", "a dual dictator")?)?;
            build_dual_dictator(scheme, &h)?
        }
        FamilyType::Hm => {
            let p = parse_subspace(ambient, required(&a.point, "point", "an hm family")?)?;
            let t = parse_subspace(ambient, required(&a.t, "t", "an hm family")?)?;
            build_hm_family(scheme, &p, &t)?
        }
    })
}

pub fn family(a: FamilyCmd) -> CmdResult {
    let scheme = Scheme::new(a.scheme.q, a.scheme.n, a.scheme.k)?;
    let record = build_family(&a, &scheme)?;
    if let Some(path) = &a.output {
        write_file(path, &format_family(&record.members))?;
    }
    let intersecting = is_intersecting(&record);
    let class = if record.is_empty() || !intersecting {
        None
    } else {
        Some(classify_triviality(&record)?)
    };
    let relation = a.relation.or_else(|| {
        (scheme.params.classes == scheme.params.k && intersecting && !record.is_empty()).then_some(scheme.params.k)
    });
    let (audit, audit_skipped) = match relation {
        None => (None, Some("no relation in which the family is independent".to_string())),
        Some(i) => match audit_family(&scheme.tables, &record, i) {
            Ok(rep) => (Some(rep), None),
            Err(e @ qgrass_core::Error::NotIndependent { .. }) => (None, Some(e.to_string())),
            Err(e) => return Err(e.into()),
        },
    };
    let cover = if a.cover { Some(cover_profile(&record)?) } else { None };
    let defect = degree1_defect(&record);
    let passed = audit.as_ref().map_or(true, |r| r.passed);

    let mut summary = format!("family of {} members, intersecting: {intersecting}", record.len());
    if let Some(c) = &class {
        summary.push_str(&match c {
            FamilyClass::SubsetOfDictator { point } => format!(", inside the dictator of {}", format_subspace(point)),
            FamilyClass::SubsetOfDual { hyperplane } => {
                format!(", inside the dual dictator of {}", format_subspace(hyperplane))
            }
            FamilyClass::Nontrivial => ", nontrivial".to_string(),
        });
    }
    summary.push_str(&format!("\ndegree-1 defect {}", rational_string(&defect)));
    if let Some(r) = &audit {
        summary.push_str(&format!(
            "\nspectral audit in R_{}: {}",
            r.relation,
            if r.passed { "passed" } else { "FAILED" }
        ));
    }
    if let Some(c) = &cover {
        summary.push_str(&format!("\ns = {}, s' = {}", c.s, c.s_prime));
    }
    let results = json!({
        "record": record,
        "intersecting": intersecting,
        "classification": class,
        "degree1_defect": rational_string(&defect),
        "audit": audit,
        "audit_skipped": audit_skipped,
        "cover": cover,
    });
    Ok(Outcome {
        json: report("family", &a, results, None),
        summary,
        code: exit_code(passed),
    })
}

fn parse_int(text: &str, flag: &str) -> Result<BigInt, Failure> {
    text.trim()
        .parse()
        .map_err(|_| Failure::usage(format!("--{flag} expects an integer, got {text:?}")))
}

fn parse_rational(text: &str, flag: &str) -> Result<BigRational, Failure> {
    text.trim()
        .parse()
        .map_err(|_| Failure::usage(format!("--{flag} expects an integer or fraction a/b, got {text:?}")))
}

pub fn bound(a: BoundCmd) -> CmdResult {
    let params = formula_params(&a.scheme)?;
    let tables = SchemeTables::new(&params)?;
    let ctx = SpectralContext::new(&tables, a.i)?;
    let value = match a.kind {
        BoundKind::Hoffman => hoffman_independence_bound(&ctx)?,
        BoundKind::Stability => {
            let y = parse_int(required(&a.y, "y", "the stability cap")?, "y")?;
            stability_energy_cap(&ctx, &y)?
        }
        BoundKind::Averaging => {
            let y = parse_int(required(&a.y, "y", "the averaging bound")?, "y")?;
            let energy = parse_rational(required(&a.energy, "energy", "the averaging bound")?, "energy")?;
            averaging_degree_bound(&ctx, &y, &energy)?
        }
    };
    let summary = format!("{:?} bound in R_{}: {}", a.kind, a.i, rational_string(&value));
    let results = json!({ "value": rational_string(&value), "context": ctx });
    Ok(Outcome {
        json: report("bound", &a, results, None),
        summary,
        code: EXIT_OK,
    })
}

pub fn quotient(a: QuotientCmd) -> CmdResult {
    let ambient = AmbientSpace::over(a.scheme.q, a.scheme.n)?;
    let z = read_family(&ambient, &a.input)?;
    if let Some(bad) = z.iter().position(|m| m.dim() != a.scheme.k) {
        return Err(Failure::usage(format!("member {bad} is not a {}-space", a.scheme.k)));
    }
    let l = parse_subspace(&ambient, &a.line)?;
    let p = parse_subspace(&ambient, &a.point)?;
    let rep = quotient_family(&z, &l, &p)?;
    let summary = format!(
        "|Z| = {}, |Z'| = {}, lower bound {}: {}",
        rep.z_size,
        rep.z_prime_size,
        rational_string(&rep.lower_bound),
        if rep.holds { "holds" } else { "FAILS" }
    );
    let code = exit_code(rep.holds);
    Ok(Outcome {
        json: report("quotient", &a, rep, None),
        summary,
        code,
    })
}

pub fn cross(a: CrossCmd) -> CmdResult {
    let params = SchemeParams::new(a.scheme.q, a.scheme.n, a.scheme.k)?;
    if let (Some(yp), Some(zp)) = (&a.y, &a.z) {
        let ambient = AmbientSpace::over(params.q, params.n)?;
        let y = read_family(&ambient, yp)?;
        let z = read_family(&ambient, zp)?;
        let rep = cross_intersecting_check(&params, &y, &z)?;
        let ok = !rep.cross_intersecting || rep.bound_holds;
        let summary = format!(
            "|Y| = {}, |Z| = {}, cross-intersecting: {}, product {} vs bound {}",
            rep.y_size, rep.z_size, rep.cross_intersecting, rep.product, rep.bound
        );
        return Ok(Outcome {
            json: report("cross", &a, rep, None),
            summary,
            code: exit_code(ok),
        });
    }
    if a.random == 0 {
        return Err(Failure::usage("cross requires --y and --z, or --random N"));
    }
    let scheme = Scheme::new(params.q, params.n, params.k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut violations = Vec::new();
    let mut max_product = BigInt::from(0);
    let mut min_slack: Option<BigInt> = None;
    let mut bound = BigInt::from(0);
    for trial in 0..a.random {
        let (yi, zi) = grow_cross_intersecting(&scheme, &mut rng);
        let y: Vec<Subspace> = yi.iter().map(|&i| scheme.universe().get(i).clone()).collect();
        let z: Vec<Subspace> = zi.iter().map(|&i| scheme.universe().get(i).clone()).collect();
        let rep = cross_intersecting_check(&params, &y, &z)?;
        if !rep.cross_intersecting || !rep.bound_holds {
            violations.push(json!({ "trial": trial, "y": strings(&y), "z": strings(&z), "report": rep }));
        }
        if rep.product > max_product {
            max_product = rep.product.clone();
        }
        if min_slack.as_ref().map_or(true, |s| rep.slack < *s) {
            min_slack = Some(rep.slack.clone());
        }
        bound = rep.bound;
    }
    let ok = violations.is_empty();
    let summary = format!(
        "{} random cross-intersecting pairs, largest product {max_product} vs bound {bound}: {}",
        a.random,
        if ok { "all within the bound" } else { "VIOLATIONS found" }
    );
    let results = json!({
        "trials": a.random,
        "bound": bound.to_string(),
        "max_product": max_product.to_string(),
        "min_slack": min_slack.map(|s| s.to_string()),
        "violations": violations,
    });
    Ok(Outcome {
        json: report("cross", &a, results, Some(a.seed)),
        summary,
        code: exit_code(ok),
    })
}

pub fn search(a: SearchCmd) -> CmdResult {
    let scheme = Scheme::new(a.scheme.q, a.scheme.n, a.scheme.k)?;
    let out = max_nontrivial_search(&scheme, a.budget, a.seed)?;
    let members: Vec<Subspace> = out.vertices.iter().map(|&i| scheme.universe().get(i).clone()).collect();
    let class = if members.is_empty() {
        None
    } else {
        Some(classify_triviality(&scheme.record(members.clone())?)?)
    };
    let summary = format!(
        "largest nontrivial intersecting family: {} members ({}, {} nodes)",
        out.size,
        match out.optimality {
            Optimality::Exact => "exact",
            Optimality::LowerBound => "budget exhausted, lower bound only",
        },
        out.nodes
    );
    let code = match out.optimality {
        Optimality::Exact => EXIT_OK,
        Optimality::LowerBound => EXIT_INFEASIBLE,
    };
    let results = json!({
        "size": out.size,
        "optimality": out.optimality,
        "nodes": out.nodes,
        "members": strings(&members),
        "classification": class,
    });
    Ok(Outcome {
        json: report("search", &a, results, a.seed),
        summary,
        code,
    })
}

pub fn chromatic(a: ChromaticCmd) -> CmdResult {
    let graph = KneserGraph::new(a.scheme.q, a.scheme.n, a.scheme.k)?;
    if a.bounds {
        let b = chromatic_bounds(&graph)?;
        let check = verify_coloring(&graph, &b.witness.colors)?;
        let summary = format!("{} <= chi <= {}", b.lower, b.upper);
        let results = json!({ "bounds": b, "witness_proper": check.proper });
        return Ok(Outcome {
            json: report("chromatic", &a, results, None),
            summary,
            code: exit_code(check.proper),
        });
    }
    let res = exact_chromatic(&graph, a.budget)?;
    let (summary, code) = match &res {
        ChromaticResult::Exact { chi, witness, .. } => {
            let proper = verify_coloring(&graph, &witness.colors)?.proper;
            (format!("chi = {chi}"), exit_code(proper))
        }
        ChromaticResult::Unknown { lower, upper, .. } => (
            format!("budget exhausted: {lower} <= chi <= {upper}"),
            EXIT_INFEASIBLE,
        ),
    };
    Ok(Outcome {
        json: report("chromatic", &a, res, None),
        summary,
        code,
    })
}

#[derive(Serialize)]
struct ClaimSummary<'a> {
    claim_id: &'a str,
    pass: bool,
    grid_points: usize,
    checks: usize,
    required: usize,
    mismatches: usize,
    notes: &'a [String],
    /// First few required checks that did not come out as expected.
    failures: Vec<&'a Check>,
}

const FAILURES_SHOWN: usize = 20;

fn claim_summary(c: &Certificate) -> ClaimSummary<'_> {
    ClaimSummary {
        claim_id: &c.claim_id,
        pass: c.pass,
        grid_points: c.grid.len(),
        checks: c.checks.len(),
        required: c.required,
        mismatches: c.mismatches,
        notes: &c.notes,
        failures: c.failures().take(FAILURES_SHOWN).collect(),
    }
}

pub fn certify(a: CertifyCmd) -> CmdResult {
    let ids: Vec<&str> = if a.claim == "all" {
        CLAIMS.to_vec()
    } else if CLAIMS.contains(&a.claim.as_str()) {
        vec![a.claim.as_str()]
    } else {
        return Err(Failure::usage(format!(
            "unknown claim {:?}; valid claims: all, {}",
            a.claim,
            CLAIMS.join(", ")
        )));
    };
    let certs: Vec<Certificate> = ids
        .iter()
        .map(|id| certificates::certify(id, a.qmax, a.kmax).expect("known claim"))
        .collect();
    let pass = certs.iter().all(|c| c.pass);
    let summary = certs
        .iter()
        .map(|c| {
            format!(
                "{}: {} ({} required checks, {} mismatches)",
                c.claim_id,
                if c.pass { "PASS" } else { "FAIL" },
                c.required,
                c.mismatches
            )
        })
        .collect::<Vec<_>>()
        .join("\n");
    let results = if a.full {
        json!({ "pass": pass, "certificates": certs })
    } else {
        json!({ "pass": pass, "claims": certs.iter().map(claim_summary).collect::<Vec<_>>() })
    };
    Ok(Outcome {
        json: report("certify", &a, results, None),
        summary,
        code: exit_code(pass),
    })
}
