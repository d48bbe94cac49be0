//! Runs the structural condition checks and assembles a certificate whose
//! every passing clause carries evidence that [`recheck`] re-verifies
//! without trusting the code that produced it.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dsr::{build_dsr, DsrSummary, ReachabilityWitness};
use crate::factorization::{factorize, verify_factorization, A3Failure, Factorization};
use crate::network::Network;
use crate::order::check_a5;
use crate::persistence::{
    check_a6, enumerate_minimal_siphons, face_status, verify_separation, A6Route, FaceStatus, SiphonReport,
};

pub const SCHEMA: &str = "crn-certify/1";

/// Appended to an A6 failure reached through the certificate search, which
/// is sufficient but not necessary.
pub const SUFFICIENT_TEST_NOTE: &str = "fails under this tool's sufficient test";

pub const ASSUMPTIONS: [&str; 2] = [
    "A1: v is C^1 on a neighbourhood of the nonnegative orthant (kinetic, assumed)",
    "A2: v satisfies K1-K3 (kinetic, assumed; `validate` checks the simulated kinetics)",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    None,
    Local,
    Global,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::None => "none",
            Verdict::Local => "local",
            Verdict::Global => "global",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    /// Not evaluated because a prerequisite failed.
    Skipped,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::Skipped => "skipped",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionResult {
    pub outcome: Outcome,
    /// Where the evidence lives in the certificate, or why it failed.
    pub evidence: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DsrEvidence {
    pub summary: DsrSummary,
    pub witness: Option<ReachabilityWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: String,
    pub network: Network,
    pub assumptions: Vec<String>,
    pub verdict: Verdict,
    pub conditions: BTreeMap<String, ConditionResult>,
    pub factorization: Option<Factorization>,
    pub a3_failure: Option<A3Failure>,
    /// For each column of Λ, a row holding a positive entry.
    pub a5_positive_rows: Option<Vec<Option<usize>>>,
    pub dsr: DsrEvidence,
    pub siphon_report: Option<SiphonReport>,
    pub failure_narrative: Vec<String>,
}

impl Certificate {
    pub fn condition(&self, name: &str) -> Outcome {
        self.conditions.get(name).map_or(Outcome::Skipped, |c| c.outcome)
    }
}

fn result(outcome: Outcome, evidence: impl Into<String>) -> ConditionResult {
    ConditionResult {
        outcome,
        evidence: evidence.into(),
    }
}

fn positive_rows(f: &Factorization) -> Vec<Option<usize>> {
    (0..f.lambda.cols())
        .map(|k| (0..f.lambda.rows()).find(|&i| f.lambda[(i, k)] > num::zero()))
        .collect()
}

/// Evaluates A3 and A4 unconditionally, A5 when A3 holds, and A6 when both
/// A3 and A4 hold. The verdict depends on the network structure only.
pub fn certify(net: &Network) -> Certificate {
    let gamma = net.stoichiometric_matrix();
    let mut conditions = BTreeMap::new();
    let mut narrative = Vec::new();

    let (factorization, a3_failure) = match factorize(&gamma) {
        Ok(f) => {
            conditions.insert(
                "A3".into(),
                result(Outcome::Pass, format!("factorization (r = {})", f.r())),
            );
            (Some(f), None)
        }
        Err(e) => {
            narrative.push(format!("A3 fails: {e}"));
            conditions.insert("A3".into(), result(Outcome::Fail, e.to_string()));
            (None, Some(e))
        }
    };

    let graph = build_dsr(net);
    let summary = graph.summary();
    let witness = graph.reachability_witness();
    let a4 = witness.is_some();
    if a4 {
        conditions.insert(
            "A4".into(),
            result(Outcome::Pass, "dsr.witness (spanning in- and out-trees at vertex 0)"),
        );
    } else {
        let msg = format!("DSR graph has {} strongly connected components", summary.scc_count);
        narrative.push(format!("A4 fails: {msg}"));
        conditions.insert("A4".into(), result(Outcome::Fail, msg));
    }

    let mut a5_positive_rows = None;
    let a5 = match &factorization {
        Some(f) => {
            let rows = positive_rows(f);
            let ok = check_a5(&f.lambda);
            if ok {
                conditions.insert("A5".into(), result(Outcome::Pass, "a5_positive_rows"));
            } else {
                let cols: Vec<String> = rows
                    .iter()
                    .enumerate()
                    .filter(|(_, r)| r.is_none())
                    .map(|(k, _)| k.to_string())
                    .collect();
                let msg = format!("Λ column(s) {} have no positive entry", cols.join(", "));
                narrative.push(format!("A5 fails: {msg}"));
                conditions.insert("A5".into(), result(Outcome::Fail, msg));
            }
            a5_positive_rows = Some(rows);
            ok
        }
        None => {
            conditions.insert("A5".into(), result(Outcome::Skipped, "requires A3"));
            false
        }
    };

    let mut siphon_report = None;
    let a6 = if factorization.is_some() && a4 {
        match check_a6(net) {
            Ok(report) => {
                let ok = report.a6_holds;
                let route = match report.via {
                    A6Route::AllReversible => "A6(i)",
                    A6Route::SiphonFaces => "A6(ii)",
                };
                if ok {
                    let evidence = match report.via {
                        A6Route::AllReversible => "A6(i): all reactions reversible".to_string(),
                        A6Route::SiphonFaces => format!(
                            "A6(ii): siphon_report ({} minimal siphon faces)",
                            report.verdicts.len()
                        ),
                    };
                    conditions.insert("A6".into(), result(Outcome::Pass, evidence));
                } else {
                    let bad: Vec<String> = report
                        .minimal_siphons
                        .iter()
                        .zip(&report.verdicts)
                        .filter(|(_, v)| v.status == FaceStatus::Tangent && v.separation_certificate.is_none())
                        .map(|(s, _)| format!("{{{}}}", s.names.join(", ")))
                        .collect();
                    let msg = format!(
                        "{route} {SUFFICIENT_TEST_NOTE}: tangent siphon face(s) {} meet nontrivial stoichiometry classes",
                        bad.join(", ")
                    );
                    narrative.push(format!("A6 fails: {msg}"));
                    conditions.insert("A6".into(), result(Outcome::Fail, msg));
                }
                siphon_report = Some(report);
                ok
            }
            Err(e) => {
                narrative.push(format!("A6 not decided: {e}"));
                conditions.insert("A6".into(), result(Outcome::Fail, e.to_string()));
                false
            }
        }
    } else {
        conditions.insert("A6".into(), result(Outcome::Skipped, "requires A3 and A4"));
        false
    };

    let verdict = match (factorization.is_some() && a4, a5 && a6) {
        (false, _) => Verdict::None,
        (true, false) => Verdict::Local,
        (true, true) => Verdict::Global,
    };

    Certificate {
        schema: SCHEMA.into(),
        network: net.clone(),
        assumptions: ASSUMPTIONS.iter().map(|s| s.to_string()).collect(),
        verdict,
        conditions,
        factorization,
        a3_failure,
        a5_positive_rows,
        dsr: DsrEvidence { summary, witness },
        siphon_report,
        failure_narrative: narrative,
    }
}

/// One independent check performed by [`recheck`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecheckItem {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

fn item(name: &str, ok: bool, detail: impl Into<String>) -> RecheckItem {
    RecheckItem {
        name: name.into(),
        ok,
        detail: detail.into(),
    }
}

/// Re-verifies a certificate against its own embedded network. Passing
/// clauses are checked by substitution into their evidence; failing
/// clauses are checked by recomputation.
pub fn recheck(cert: &Certificate) -> Vec<RecheckItem> {
    let net = &cert.network;
    let gamma = net.stoichiometric_matrix();
    let mut out = Vec::new();

    out.push(item("schema", cert.schema == SCHEMA, cert.schema.clone()));

    let a3 = cert.condition("A3");
    let a4 = cert.condition("A4");
    let a5 = cert.condition("A5");
    let a6 = cert.condition("A6");

    match (a3, &cert.factorization) {
        (Outcome::Pass, Some(f)) => {
            let v = verify_factorization(&gamma, f);
            let ok = matches!(&v, Ok(v) if v.is_empty());
            out.push(item("A3", ok, format!("{v:?}")));
        }
        (Outcome::Pass, None) => out.push(item("A3", false, "pass without factorization")),
        (Outcome::Fail, _) => {
            let recomputed = factorize(&gamma);
            out.push(item("A3", recomputed.is_err(), "recomputed factorization"));
        }
        (Outcome::Skipped, _) => out.push(item("A3", false, "A3 is never skipped")),
    }

    let graph = build_dsr(net);
    match a4 {
        Outcome::Pass => {
            let ok = cert.dsr.witness.as_ref().is_some_and(|w| graph.verify_witness(w));
            out.push(item("A4", ok, "reachability witness"));
        }
        Outcome::Fail => out.push(item("A4", !graph.is_strongly_connected(), "recomputed components")),
        Outcome::Skipped => out.push(item("A4", false, "A4 is never skipped")),
    }
    out.push(item(
        "dsr summary",
        graph.summary() == cert.dsr.summary,
        "recomputed summary",
    ));

    match (a5, &cert.factorization) {
        (Outcome::Skipped, f) => out.push(item("A5", a3 != Outcome::Pass && f.is_none(), "skipped")),
        (outcome, Some(f)) => {
            let rows_ok = cert.a5_positive_rows.as_ref().is_some_and(|rows| {
                rows.len() == f.lambda.cols()
                    && rows.iter().enumerate().all(|(k, r)| match r {
                        Some(i) => *i < f.lambda.rows() && f.lambda[(*i, k)] > num::zero(),
                        None => (0..f.lambda.rows()).all(|i| f.lambda[(i, k)] <= num::zero()),
                    })
            });
            let ok = rows_ok && (outcome == Outcome::Pass) == check_a5(&f.lambda);
            out.push(item("A5", ok, "positive entry per Λ column"));
        }
        (_, None) => out.push(item("A5", false, "evaluated without factorization")),
    }

    match a6 {
        Outcome::Skipped => out.push(item("A6", a3 != Outcome::Pass || a4 != Outcome::Pass, "skipped")),
        outcome => {
            let ok = match &cert.siphon_report {
                Some(report) => recheck_siphons(net, &gamma, report, outcome == Outcome::Pass),
                None => false,
            };
            out.push(item("A6", ok, "siphon report"));
        }
    }

    let expected = match (a3 == Outcome::Pass && a4 == Outcome::Pass, a5 == Outcome::Pass && a6 == Outcome::Pass) {
        (false, _) => Verdict::None,
        (true, false) => Verdict::Local,
        (true, true) => Verdict::Global,
    };
    out.push(item("verdict", cert.verdict == expected, format!("expected {expected}")));
    out
}

fn recheck_siphons(net: &Network, gamma: &crate::linalg::RationalMatrix, report: &SiphonReport, pass: bool) -> bool {
    if report.via == A6Route::AllReversible {
        return net.all_reversible() && report.a6_holds == pass;
    }
    if net.all_reversible() {
        return false;
    }
    let Ok(minimal) = enumerate_minimal_siphons(net) else {
        return false;
    };
    if minimal != report.minimal_siphons || report.verdicts.len() != minimal.len() {
        return false;
    }
    let n = net.n_species();
    let mut all_separated = true;
    for (sigma, v) in minimal.iter().zip(&report.verdicts) {
        let face: Vec<usize> = (0..n).filter(|i| !sigma.species.contains(i)).collect();
        if v.face_set != face || v.status != face_status(net, gamma, &face) {
            return false;
        }
        match &v.separation_certificate {
            Some(w) => {
                if !verify_separation(gamma, &face, w) {
                    return false;
                }
            }
            None => {
                // Absence is re-decided by the exact LP.
                if crate::simplex::nonneg_kernel_certificate(gamma, &sigma.species).is_some() {
                    return false;
                }
                all_separated &= v.status == FaceStatus::Repelling;
            }
        }
    }
    all_separated == pass && report.a6_holds == pass
}
