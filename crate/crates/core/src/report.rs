//! Command dispatch, human-readable reports and machine reports with certificates.
//!
//! A machine report carries enough numbers to re-check each claim against the
//! raw configuration without re-running any solver; see [`verify_report`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::adjunction::{connectedness_check, diff_divisor, inversion_of_adjunction, nklt_locus, Verdict};
use crate::cone::{curve_classes, negative_extremal_rays, Fibration};
use crate::discrepancy::{
    classify_pair, crepant_coefficients, crepant_residuals, multiplier_divisor, Pair,
};
use crate::document::{ConfigurationBlock, InputDocument};
use crate::error::{Error, Result};
use crate::lattice::{blowup_at_node, degree_on_curve, validate_configuration, Configuration, Divisor};
use crate::linalg;
use crate::mmp::{dlt_blowup, run_mmp, Endpoint, MmpMode, MmpTrace, RayPolicy};
use crate::rational::{format_q, int, parse_q, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Validate,
    Classify,
    Discrepancies,
    Multiplier,
    Rays,
    Mmp {
        mode: MmpMode,
        /// Overrides the document's ray policy when given.
        ray_policy: Option<Vec<String>>,
    },
    DltBlowup,
    Diff { curve: String },
    Ioa { curve: String },
    Nklt,
    Connectedness,
    Blowup { point: String },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Classify => "classify",
            Command::Discrepancies => "discrepancies",
            Command::Multiplier => "multiplier",
            Command::Rays => "rays",
            Command::Mmp { .. } => "mmp",
            Command::DltBlowup => "dlt-blowup",
            Command::Diff { .. } => "diff",
            Command::Ioa { .. } => "ioa",
            Command::Nklt => "nklt",
            Command::Connectedness => "connectedness",
            Command::Blowup { .. } => "blowup",
        }
    }

    fn args(&self) -> Value {
        match self {
            Command::Mmp { mode, ray_policy } => json!({"mode": mode.name(), "ray_policy": ray_policy}),
            Command::Diff { curve } | Command::Ioa { curve } => json!({ "curve": curve }),
            Command::Blowup { point } => json!({ "point": point }),
            _ => json!({}),
        }
    }

    /// Command from its CLI name. `arg` is the curve for `diff`/`ioa`, the point
    /// for `blowup`, and `qf` or `lc` for `mmp` (default `lc`).
    pub fn parse(name: &str, arg: Option<&str>) -> Result<Command> {
        let need = |what: &str| {
            arg.map(str::to_string)
                .ok_or_else(|| Error::Argument(format!("{name} needs a {what}")))
        };
        Ok(match name {
            "validate" => Command::Validate,
            "classify" => Command::Classify,
            "discrepancies" => Command::Discrepancies,
            "multiplier" => Command::Multiplier,
            "rays" => Command::Rays,
            "mmp" => Command::Mmp {
                mode: match arg.unwrap_or("lc") {
                    "lc" => MmpMode::Lc,
                    "qf" => MmpMode::Qf,
                    other => return Err(Error::Argument(format!("unknown MMP mode {other:?}"))),
                },
                ray_policy: None,
            },
            "dlt-blowup" => Command::DltBlowup,
            "diff" => Command::Diff { curve: need("curve")? },
            "ioa" => Command::Ioa { curve: need("curve")? },
            "nklt" => Command::Nklt,
            "connectedness" => Command::Connectedness,
            "blowup" => Command::Blowup { point: need("point")? },
            other => return Err(Error::Argument(format!("unknown command {other:?}"))),
        })
    }

    /// Rebuilds a command from the `command` and `args` fields of a machine report.
    pub fn from_report(report: &Value) -> Result<Command> {
        let name = report["command"].as_str().unwrap_or_default();
        let args = &report["args"];
        let text = |key: &str| {
            args[key]
                .as_str()
                .map(str::to_string)
                .ok_or_else(|| Error::Argument(format!("report args lack {key}")))
        };
        Ok(match name {
            "validate" => Command::Validate,
            "classify" => Command::Classify,
            "discrepancies" => Command::Discrepancies,
            "multiplier" => Command::Multiplier,
            "rays" => Command::Rays,
            "mmp" => Command::Mmp {
                mode: if args["mode"] == "qf" { MmpMode::Qf } else { MmpMode::Lc },
                ray_policy: serde_json::from_value(args["ray_policy"].clone()).unwrap_or(None),
            },
            "dlt-blowup" => Command::DltBlowup,
            "diff" => Command::Diff { curve: text("curve")? },
            "ioa" => Command::Ioa { curve: text("curve")? },
            "nklt" => Command::Nklt,
            "connectedness" => Command::Connectedness,
            "blowup" => Command::Blowup { point: text("point")? },
            other => return Err(Error::Argument(format!("unknown command {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub human: String,
    pub machine: Value,
    pub exit_code: i32,
}

fn q(v: &Q) -> Value {
    Value::String(format_q(v))
}

fn qs(vs: &[Q]) -> Value {
    Value::Array(vs.iter().map(q).collect())
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn div_json(config: &Configuration, d: &Divisor) -> Value {
    Value::Object(
        d.iter()
            .map(|(i, c)| (config.curve(i).id.clone(), q(c)))
            .collect(),
    )
}

fn div_text(config: &Configuration, d: &Divisor) -> String {
    if d.is_zero() {
        return "0".into();
    }
    d.iter()
        .map(|(i, c)| format!("{}·{}", format_q(c), config.curve(i).id))
        .collect::<Vec<_>>()
        .join(" + ")
}

fn ids(config: &Configuration, curves: impl IntoIterator<Item = usize>) -> Vec<String> {
    curves.into_iter().map(|c| config.curve(c).id.clone()).collect()
}

fn curve_arg(config: &Configuration, id: &str) -> Result<usize> {
    config
        .curve_index(id)
        .ok_or_else(|| Error::Argument(format!("unknown curve id {id:?}")))
}

fn components_json(pair: &Pair) -> Value {
    let config = pair.config();
    Value::Array(
        pair.model()
            .components()
            .iter()
            .map(|c| json!({"curves": ids(config, c.curves.iter().copied()), "certificate": c.certificate}))
            .collect(),
    )
}

/// Runs a command on a parsed document.
pub fn dispatch(command: &Command, doc: &InputDocument) -> Result<Report> {
    let mut machine = json!({"command": command.name(), "args": command.args()});
    let mut human = String::new();
    let mut exit_code = 0;

    if let Command::Validate = command {
        let config = doc.configuration()?;
        let report = validate_configuration(&config);
        machine["violations"] = json!(report.violations);
        if report.is_pass() {
            doc.resolve()?;
            machine["valid"] = json!(true);
            human.push_str("valid\n");
        } else {
            machine["valid"] = json!(false);
            for v in &report.violations {
                let _ = writeln!(human, "violation: {v}");
            }
            exit_code = 2;
        }
        return Ok(Report { human, machine, exit_code });
    }

    let resolved = doc.resolve()?;
    let config = &resolved.config;
    let pair = &resolved.pair;
    let fib = &resolved.fibration;
    machine["boundary"] = div_json(config, pair.boundary());
    machine["contracted"] = json!(ids(config, pair.model().contracted().iter().copied()));

    match command {
        Command::Validate => unreachable!("handled above"),
        Command::Classify | Command::Discrepancies => {
            let data = crepant_coefficients(pair);
            let residuals = crepant_residuals(pair, &data);
            if residuals.iter().any(|r| !r.is_zero()) {
                return Err(Error::InvariantViolation("crepant coefficients fail their equations".into()));
            }
            let entries = data.entries(config);
            machine["crepant"] = json!(entries);
            machine["components"] = components_json(pair);
            if let Command::Classify = command {
                let c = classify_pair(pair)?;
                machine["classification"] = json!(c);
                let _ = writeln!(
                    human,
                    "{}; numerically-lc: {}; klt: {}",
                    c.class.name(),
                    yes(c.numerically_lc),
                    yes(c.klt)
                );
            } else {
                if entries.is_empty() {
                    human.push_str("no contracted curves\n");
                }
                for e in &entries {
                    let _ = writeln!(
                        human,
                        "{}: crepant {}, discrepancy {}, log discrepancy {}",
                        e.curve,
                        format_q(&e.crepant),
                        format_q(&e.discrepancy),
                        format_q(&e.log_discrepancy)
                    );
                }
            }
        }
        Command::Multiplier => {
            let total = pair.total_boundary();
            let m = multiplier_divisor(pair);
            machine["total_boundary"] = div_json(config, &total);
            machine["multiplier"] = div_json(config, &m);
            let trivial = m.iter().all(|(_, c)| !c.is_negative());
            machine["trivial"] = json!(trivial);
            let _ = writeln!(human, "ceil(-Δ_W) = {}", div_text(config, &m));
            let _ = writeln!(human, "multiplier ideal trivial: {}", yes(trivial));
        }
        Command::Rays => {
            let classes = curve_classes(pair.model(), fib)?;
            let rays = negative_extremal_rays(pair, fib)?;
            machine["basis"] = json!(ids(config, classes.basis.iter().copied()));
            machine["classes"] = Value::Object(
                classes
                    .curves
                    .iter()
                    .zip(&classes.classes)
                    .map(|(&c, v)| (config.curve(c).id.clone(), qs(v)))
                    .collect(),
            );
            machine["rho"] = json!(classes.rho);
            machine["rays"] = Value::Array(
                rays.iter()
                    .map(|r| {
                        json!({
                            "curve": config.curve(r.curve).id,
                            "class": qs(&r.class),
                            "log_canonical_degree": q(&r.log_canonical_degree),
                            "self_intersection": q(&r.self_intersection),
                            "separator": qs(&r.separator),
                        })
                    })
                    .collect(),
            );
            let _ = writeln!(human, "ρ = {}", classes.rho);
            if rays.is_empty() {
                human.push_str("no (K+Δ)-negative extremal rays\n");
            }
            for r in &rays {
                let _ = writeln!(
                    human,
                    "ray {}: (K+Δ)·C = {}, C² = {}",
                    config.curve(r.curve).id,
                    format_q(&r.log_canonical_degree),
                    format_q(&r.self_intersection)
                );
            }
        }
        Command::Mmp { mode, ray_policy } => {
            let policy = match ray_policy {
                Some(list) => RayPolicy::Prefer(
                    list.iter().map(|id| curve_arg(config, id)).collect::<Result<_>>()?,
                ),
                None => resolved.ray_policy.clone(),
            };
            let trace = run_mmp(pair, fib, *mode, &policy)?;
            machine["mode"] = json!(mode.name());
            write_trace(&mut machine, &mut human, config, fib, &trace)?;
        }
        Command::DltBlowup => {
            let out = dlt_blowup(pair)?;
            let y = &out.pair;
            write_trace(&mut machine, &mut human, config, &Fibration::birational(config, pair.model().contracted())?, &out.trace)?;
            machine["truncated_boundary"] = div_json(config, &out.truncated);
            machine["y_contracted"] = json!(ids(config, y.model().contracted().iter().copied()));
            machine["y_boundary"] = div_json(config, y.boundary());
            machine["exceptional"] = json!(ids(config, out.exceptional.iter().copied()));
            machine["classification"] = json!(out.classification);
            machine["q_factorial_declared"] = json!(y.model().q_factorial());
            machine["nef"] = json!(out.nef);
            machine["e_prime"] = div_json(config, &out.e_prime);
            machine["negativity"] = json!(out.negativity);
            machine["numerically_lc"] = json!(out.numerically_lc);
            machine["lc_flag"] = json!(out.lc_flag);
            let on_y = ids(config, y.model().contracted().iter().copied());
            let _ = writeln!(human, "Y contracts: {}", if on_y.is_empty() { "nothing".into() } else { on_y.join(", ") });
            let _ = writeln!(human, "boundary on Y: {}", div_text(config, y.boundary()));
            let _ = writeln!(
                human,
                "(1) dlt: {} ({}), Q-factorial: declared {}",
                yes(out.classification.dlt),
                out.classification.dlt_status,
                yes(y.model().q_factorial())
            );
            let _ = writeln!(human, "(2) K_Y + f⁻¹Δ₁ + E f-nef: {}", yes(out.nef));
            let _ = writeln!(human, "(3) E' = {}", div_text(config, &out.e_prime));
            let _ = writeln!(
                human,
                "E' = 0 and Δ = Δ₁: {}; numerically lc: {}",
                yes(out.lc_flag),
                yes(out.numerically_lc)
            );
        }
        Command::Diff { curve } => {
            let c = curve_arg(config, curve)?;
            let d = diff_divisor(pair, c)?;
            let degree = degree_on_curve(&d);
            machine["diff"] = json!(d);
            machine["degree"] = q(&degree);
            let _ = writeln!(human, "Diff on {}: {}", d.host, curve_divisor_text(&d));
            let _ = writeln!(human, "degree {}", format_q(&degree));
        }
        Command::Ioa { curve } => {
            let c = curve_arg(config, curve)?;
            let r = inversion_of_adjunction(pair, c)?;
            machine["ioa"] = json!(r);
            let _ = writeln!(human, "Diff on {}: {}", r.curve, curve_divisor_text(&r.diff));
            let _ = writeln!(human, "lc near {}: {} ⇔ (C^N, Diff) lc: {}", r.curve, yes(r.lc_near_curve), yes(r.diff_lc));
            let _ = writeln!(human, "plt near {}: {} ⇔ (C^N, Diff) klt: {}", r.curve, yes(r.plt_near_curve), yes(r.diff_klt));
        }
        Command::Nklt => {
            let locus = nklt_locus(pair);
            machine["total_boundary"] = div_json(config, &pair.total_boundary());
            machine["locus"] = json!(locus);
            if locus.curves.is_empty() {
                human.push_str("Nklt locus: empty\n");
            } else {
                let _ = writeln!(human, "Nklt locus: {}", locus.curve_ids.join(", "));
            }
        }
        Command::Connectedness => {
            let r = connectedness_check(pair, fib)?;
            machine["connectedness"] = json!(r);
            if let Some(reason) = &r.reason {
                let _ = writeln!(human, "hypotheses not met: {reason}");
            }
            for f in &r.fibres {
                let _ = writeln!(human, "{}: {}", f.base_point, f.verdict.label());
            }
            if r.has_violation() {
                machine["status"] = json!("violation");
                return Err(Error::InvariantViolation(format!(
                    "Nklt locus is disconnected over {}",
                    r.fibres
                        .iter()
                        .filter(|f| f.verdict == Verdict::Violation)
                        .map(|f| f.base_point.as_str())
                        .collect::<Vec<_>>()
                        .join(", ")
                )));
            }
        }
        Command::Blowup { point } => {
            let p = config
                .point_index(point)
                .ok_or_else(|| Error::Argument(format!("unknown point id {point:?}")))?;
            let b = blowup_at_node(config, p)?;
            let block = ConfigurationBlock::from_configuration(&b.config);
            let e = &b.config.curve(b.exceptional).id;
            machine["exceptional"] = json!(e);
            machine["residue_degree"] = json!(b.residue_degree);
            machine["branches"] = json!(ids(config, b.branches));
            machine["configuration"] = json!(block);
            machine["k_squared_before"] = json!(config.canonical_self_int());
            machine["k_squared_after"] = json!(b.config.canonical_self_int());
            let _ = writeln!(
                human,
                "blew up {point} (degree {}): new curve {e} with {e}² = {}, K·{e} = {}",
                b.residue_degree,
                b.config.curve(b.exceptional).self_int,
                b.config.curve(b.exceptional).canon_int
            );
            for &c in &b.branches {
                let cv = b.config.curve(c);
                let _ = writeln!(human, "{}: self-intersection {}, K-degree {}", cv.id, cv.self_int, cv.canon_int);
            }
        }
    }
    if machine.get("status").is_none() {
        machine["status"] = json!("ok");
    }
    Ok(Report { human, machine, exit_code })
}

fn curve_divisor_text(d: &crate::lattice::CurveDivisor) -> String {
    if d.terms.is_empty() {
        return "0".into();
    }
    d.terms
        .iter()
        .map(|(p, t)| format!("{}·{p}[deg {}]", format_q(&t.coefficient), t.residue_degree))
        .collect::<Vec<_>>()
        .join(" + ")
}

fn write_trace(
    machine: &mut Value,
    human: &mut String,
    config: &Configuration,
    fib: &Fibration,
    trace: &MmpTrace,
) -> Result<()> {
    machine["steps"] = json!(trace.steps);
    machine["rho_sequence"] = json!(trace.rho_sequence);
    machine["endpoint"] = json!(trace.endpoint);
    let last = &trace.result;
    let lc_class = last.log_canonical_class();
    let degrees: BTreeMap<String, Value> = fib
        .vertical_curves(last.model())
        .into_iter()
        .map(|c| Ok((config.curve(c).id.clone(), q(&last.model().dot_curve(&lc_class, c)?))))
        .collect::<Result<_>>()?;
    machine["final_degrees"] = json!(degrees);
    machine["final_contracted"] = json!(ids(config, last.model().contracted().iter().copied()));
    for (k, s) in trace.steps.iter().enumerate() {
        let _ = writeln!(
            human,
            "step {}: contract {} (ρ {} → {}, (K+Δ)·C = {}, C² = {})",
            k + 1,
            s.curve,
            s.rho_before,
            s.rho_after,
            format_q(&s.log_canonical_degree),
            format_q(&s.self_intersection)
        );
    }
    match &trace.endpoint {
        Endpoint::MinimalModel => human.push_str("endpoint: minimal model (K+Δ nef over the base)\n"),
        Endpoint::MoriFiberSpace {
            witness,
            self_intersection,
            log_canonical_degree,
            rho,
            rho_base,
            ..
        } => {
            let _ = writeln!(
                human,
                "endpoint: Mori fiber space, witness {witness} ({witness}² = {}, (K+Δ)·{witness} = {}), ρ {rho} → {rho_base}",
                format_q(self_intersection),
                format_q(log_canonical_degree)
            );
        }
    }
    Ok(())
}

/// Raw numbers of a document, read without any solver.
struct Raw {
    config: Configuration,
}

impl Raw {
    fn idx(&self, id: &str) -> Option<usize> {
        self.config.curve_index(id)
    }

    fn divisor(&self, v: &Value) -> Option<Divisor> {
        let mut d = Divisor::zero();
        for (id, c) in v.as_object()? {
            d.set(self.idx(id)?, parse_q(c.as_str()?).ok()?);
        }
        Some(d)
    }
}

fn rat(v: &Value) -> Option<Q> {
    parse_q(v.as_str()?).ok()
}

fn rats(v: &Value) -> Option<Vec<Q>> {
    v.as_array()?.iter().map(rat).collect()
}

/// Re-checks the certificates of a machine report against the document's raw
/// intersection data. Returns the list of failed checks (empty when sound).
pub fn verify_report(doc: &InputDocument, report: &Value) -> Result<Vec<String>> {
    let raw = Raw { config: doc.configuration()? };
    let config = &raw.config;
    let mut failures = Vec::new();
    let mut check = |ok: bool, what: &str| {
        if !ok {
            failures.push(what.to_string());
        }
    };
    let command = report["command"].as_str().unwrap_or_default();
    let boundary = raw.divisor(&report["boundary"]);
    let contracted: Option<BTreeSet<usize>> = report["contracted"]
        .as_array()
        .map(|a| a.iter().filter_map(|v| v.as_str().and_then(|s| raw.idx(s))).collect());

    match command {
        "validate" => {
            let valid = report["valid"].as_bool().unwrap_or(false);
            let violations = report["violations"].as_array().map_or(0, Vec::len);
            check(valid == (violations == 0), "validity flag matches the violation list");
            check(
                valid == validate_configuration(config).is_pass(),
                "validity agrees with the raw configuration",
            );
        }
        "classify" | "discrepancies" => {
            let (Some(boundary), Some(contracted)) = (boundary, contracted) else {
                check(false, "report carries boundary and contracted set");
                return Ok(failures);
            };
            let mut total = boundary.clone();
            let entries = report["crepant"].as_array().cloned().unwrap_or_default();
            for e in &entries {
                let (Some(i), Some(c), Some(a), Some(ld)) = (
                    e["curve"].as_str().and_then(|s| raw.idx(s)),
                    rat(&e["crepant"]),
                    rat(&e["discrepancy"]),
                    rat(&e["log_discrepancy"]),
                ) else {
                    check(false, "crepant entry is well formed");
                    continue;
                };
                check(a == -c.clone() && ld == Q::one() - &c, "discrepancy and log discrepancy follow from e");
                total.set(i, c);
            }
            check(entries.len() == contracted.len(), "one crepant entry per contracted curve");
            // (K_W + Δ_W)·E_k = 0
            for &k in &contracted {
                let r = int(config.canon(k)) + crate::lattice::intersect_curve(config, &total, k);
                check(r.is_zero(), "crepant vector satisfies K_W + Δ_W ≡ 0 on each exceptional curve");
            }
            let big = config.big_matrix();
            for comp in report["components"].as_array().cloned().unwrap_or_default() {
                let curves: Vec<usize> = comp["curves"]
                    .as_array()
                    .map(|a| a.iter().filter_map(|v| v.as_str().and_then(|s| raw.idx(s))).collect())
                    .unwrap_or_default();
                let minors: Vec<num_bigint::BigInt> = comp["certificate"]["leading_minors"]
                    .as_array()
                    .map(|a| a.iter().filter_map(|v| v.as_str()?.parse().ok()).collect())
                    .unwrap_or_default();
                check(minors.len() == curves.len(), "a leading minor per component curve");
                for (k, m) in minors.iter().enumerate() {
                    let sub = linalg::principal_submatrix(&big, &curves[..=k]);
                    check(linalg::determinant(&sub) == *m, "leading minor matches the matrix");
                    check(linalg::minor_sign_ok(k + 1, m), "leading minors alternate in sign");
                }
            }
            if command == "classify" {
                let c = &report["classification"];
                let one = Q::one();
                let b = |i: usize| total.coeff(i);
                let all = 0..config.len();
                let lc = all.clone().all(|i| b(i) <= one);
                let klt = all.clone().all(|i| b(i) < one);
                check(c["lc"].as_bool() == Some(lc), "lc flag follows from the coefficient bound");
                check(c["klt"].as_bool() == Some(klt), "klt flag follows from the coefficient bound");
                check(c["numerically_lc"] == c["lc"], "numerically lc equals lc");
                let nodes_ok = config
                    .points()
                    .iter()
                    .all(|p| b(p.curves[0]) + b(p.curves[1]) <= one);
                let canonical = lc && contracted.iter().all(|&e| !b(e).is_positive()) && nodes_ok;
                check(c["canonical"].as_bool() == Some(canonical), "canonical flag follows from coefficients");
            }
        }
        "multiplier" => {
            let (Some(total), Some(m)) = (raw.divisor(&report["total_boundary"]), raw.divisor(&report["multiplier"])) else {
                check(false, "report carries the total boundary and multiplier divisor");
                return Ok(failures);
            };
            check(total.scaled(&int(-1)).round_up() == m, "multiplier divisor is the round-up of -Δ_W");
        }
        "rays" => {
            let classes: Vec<Vec<Q>> = report["classes"]
                .as_object()
                .map(|o| o.values().filter_map(rats).collect())
                .unwrap_or_default();
            check(
                report["rho"].as_u64() == Some(linalg::rank(&classes) as u64),
                "ρ is the rank of the class vectors",
            );
            for r in report["rays"].as_array().cloned().unwrap_or_default() {
                let (Some(v), Some(y), Some(kd)) = (rats(&r["class"]), rats(&r["separator"]), rat(&r["log_canonical_degree"])) else {
                    check(false, "ray entry is well formed");
                    continue;
                };
                check(kd.is_negative(), "ray is (K+Δ)-negative");
                check(linalg::dot(&y, &v).is_positive(), "separator is positive on the ray");
                for w in &classes {
                    let on_ray = proportional_positive(w, &v);
                    check(on_ray || !linalg::dot(&y, w).is_positive(), "separator is non-positive on other generators");
                }
            }
        }
        "mmp" | "dlt-blowup" => {
            verify_trace(report, config, &mut check);
            if command == "dlt-blowup" {
                let e_prime = raw.divisor(&report["e_prime"]);
                check(e_prime.as_ref().is_some_and(Divisor::is_effective), "E' is effective");
                check(report["nef"] == json!(true), "K_Y + f⁻¹Δ₁ + E is f-nef");
                check(report["classification"]["dlt"] == json!(true), "(Y, f⁻¹Δ₁ + E) is dlt");
                check(report["lc_flag"] == report["numerically_lc"], "E' = 0 exactly when numerically lc");
                check(report["negativity"]["verdict"] == json!("effective-forced"), "negativity lemma forces E' ≥ 0");
                if let (Some(t), Some(b)) = (raw.divisor(&report["truncated_boundary"]), boundary) {
                    let expect: Divisor = b.iter().map(|(i, c)| (i, c.clone().min(Q::one()))).collect();
                    check(t == expect, "Δ₁ is the truncation of Δ");
                }
            }
        }
        "diff" => {
            let terms = report["diff"]["terms"].as_object().cloned().unwrap_or_default();
            let degree: Option<Q> = terms
                .values()
                .map(|t| Some(rat(&t["coefficient"])? * int(t["residue_degree"].as_i64()?)))
                .sum();
            check(degree.is_some() && degree == rat(&report["degree"]), "degree is Σ a_i deg P_i");
        }
        "ioa" => {
            let r = &report["ioa"];
            let coeffs: Vec<Q> = r["diff"]["terms"]
                .as_object()
                .map(|o| o.values().filter_map(|t| rat(&t["coefficient"])).collect())
                .unwrap_or_default();
            let one = Q::one();
            check(r["diff_lc"].as_bool() == Some(coeffs.iter().all(|c| *c <= one)), "Diff lc flag from coefficients");
            check(r["diff_klt"].as_bool() == Some(coeffs.iter().all(|c| *c < one)), "Diff klt flag from coefficients");
            check(r["lc_near_curve"] == r["diff_lc"], "lc near C ⇔ (C^N, Diff) lc");
            check(r["plt_near_curve"] == r["diff_klt"], "plt near C ⇔ (C^N, Diff) klt");
        }
        "nklt" => {
            let total = raw.divisor(&report["total_boundary"]).unwrap_or_default();
            let locus: BTreeSet<String> = report["locus"]["curve_ids"]
                .as_array()
                .map(|a| a.iter().filter_map(|v| v.as_str().map(str::to_string)).collect())
                .unwrap_or_default();
            let expect: BTreeSet<String> = total
                .iter()
                .filter(|(_, c)| **c >= Q::one())
                .map(|(i, _)| config.curve(i).id.clone())
                .collect();
            check(locus == expect, "locus is the set of coefficients ≥ 1");
        }
        "connectedness" => {
            let r = &report["connectedness"];
            let met = r["hypotheses_met"].as_bool().unwrap_or(false);
            for f in r["fibres"].as_array().cloned().unwrap_or_default() {
                let v = f["verdict"].as_str().unwrap_or_default();
                check(v != "violation", "no fibre violates connectedness");
                check(met || v == "hypotheses-not-met", "verdicts respect the hypotheses");
                let pieces = f["pieces"].as_u64().unwrap_or(u64::MAX);
                let consistent = match v {
                    "empty" => pieces == 0,
                    "connected" => pieces == 1,
                    _ => true,
                };
                check(consistent, "verdict matches the piece count");
            }
        }
        "blowup" => {
            let block: Option<ConfigurationBlock> = serde_json::from_value(report["configuration"].clone()).ok();
            let ok = block.is_some_and(|b| {
                let doc = InputDocument {
                    schema: crate::document::SCHEMA_VERSION,
                    configuration: b,
                    model: None,
                    pair: None,
                    fibration: None,
                    options: None,
                };
                doc.configuration().is_ok_and(|c| validate_configuration(&c).is_pass())
            });
            check(ok, "blown-up configuration validates");
            if let (Some(before), Some(after), Some(d)) = (
                report["k_squared_before"].as_i64(),
                report["k_squared_after"].as_i64(),
                report["residue_degree"].as_i64(),
            ) {
                check(after == before - d, "K² drops by the residue degree");
            }
        }
        other => check(false, &format!("unknown command {other:?}")),
    }
    Ok(failures)
}

fn proportional_positive(w: &[Q], v: &[Q]) -> bool {
    let Some(k) = v.iter().position(|x| !x.is_zero()) else {
        return false;
    };
    let t = &w[k] / &v[k];
    t.is_positive() && w.iter().zip(v).all(|(a, b)| *a == &t * b)
}

fn verify_trace(report: &Value, config: &Configuration, check: &mut impl FnMut(bool, &str)) {
    let steps = report["steps"].as_array().cloned().unwrap_or_default();
    let rho: Vec<u64> = report["rho_sequence"]
        .as_array()
        .map(|a| a.iter().filter_map(Value::as_u64).collect())
        .unwrap_or_default();
    check(rho.len() == steps.len() + 1, "one ρ value per model in the trace");
    check(steps.len() <= config.len(), "at most one step per curve");
    check(rho.windows(2).all(|w| w[1] + 1 == w[0]), "ρ drops by exactly one per step");
    for (k, s) in steps.iter().enumerate() {
        let (Some(kd), Some(c2), Some(v), Some(y)) = (
            rat(&s["log_canonical_degree"]),
            rat(&s["self_intersection"]),
            rats(&s["class"]),
            rats(&s["separator"]),
        ) else {
            check(false, "step is well formed");
            continue;
        };
        check(kd.is_negative(), "each contracted curve is (K+Δ)-negative");
        check(c2.is_negative(), "each contracted curve has negative square");
        check(linalg::dot(&y, &v).is_positive(), "separator is positive on the contracted ray");
        check(
            s["rho_before"].as_u64() == rho.get(k).copied() && s["rho_after"].as_u64() == rho.get(k + 1).copied(),
            "step ρ values match the sequence",
        );
    }
    let degrees: Vec<Q> = report["final_degrees"]
        .as_object()
        .map(|o| o.values().filter_map(rat).collect())
        .unwrap_or_default();
    let e = &report["endpoint"];
    match e["kind"].as_str() {
        Some("minimal-model") => {
            check(degrees.iter().all(|d| !d.is_negative()), "minimal model: K+Δ is nef on vertical curves");
        }
        Some("mori-fiber-space") => {
            let kd = rat(&e["log_canonical_degree"]);
            let c2 = rat(&e["self_intersection"]);
            check(kd.is_some_and(|k| k.is_negative()), "Mori fibre witness is (K+Δ)-negative");
            check(c2.is_some_and(|c| !c.is_negative()), "Mori fibre witness has square ≥ 0");
            let r = e["rho"].as_u64();
            check(r == rho.last().copied(), "endpoint ρ matches the sequence");
            check(r.is_some_and(|r| e["rho_base"].as_u64() == Some(r - 1)), "ρ(Z/S) = ρ(X/S) − 1");
        }
        _ => check(false, "endpoint kind is known"),
    }
}
