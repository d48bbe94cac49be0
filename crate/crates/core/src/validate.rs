//! Empirical checks of a certificate's claims under concrete kinetics.
//! Simulation never changes a verdict; it can only expose a contradiction.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::certify::{Certificate, Outcome, Verdict};
use crate::integrate::{
    check_order_preservation, class_neighbour, find_equilibrium, integrate, random_interior_point,
    shift_along_cone, uniform_samples, IntegratorOptions, OdeSystem, SETTLE_TIME,
};
use crate::kinetics::{extremal_mapping_check, pullback_metzler_check, sample_points, validate_kinetics, Kinetics};
use crate::network::Network;
use crate::order::{integral, ConeOrder};

pub const METZLER_POINTS: usize = 100;
pub const KINETICS_POINTS: usize = 50;
pub const CONSERVATION_STARTS: usize = 3;
pub const CONSERVATION_HORIZON: f64 = 100.0;
/// Relative bound on |H(x(t)) − H(x(0))|, scaled by 1 + |H(x(0))|.
pub const CONSERVATION_TOL: f64 = 1e-7;
pub const MULTISTART: usize = 8;
pub const CONVERGENCE_TOL: f64 = 1e-5;
pub const ORDER_HORIZON: f64 = 50.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCheck {
    pub name: String,
    /// False when the certificate makes no claim this check could test.
    pub applicable: bool,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<EmpiricalCheck>,
}

impl ValidationReport {
    pub fn contradicted(&self) -> bool {
        self.checks.iter().any(|c| c.applicable && !c.ok)
    }
}

fn check(name: &str, ok: bool, detail: impl Into<String>) -> EmpiricalCheck {
    EmpiricalCheck {
        name: name.into(),
        applicable: true,
        ok,
        detail: detail.into(),
    }
}

fn skipped(name: &str, why: &str) -> EmpiricalCheck {
    EmpiricalCheck {
        name: name.into(),
        applicable: false,
        ok: true,
        detail: why.into(),
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Runs the suite for `cert`, which must have been produced from `net`.
pub fn validate(net: &Network, cert: &Certificate, k: &dyn Kinetics, seed: u64) -> ValidationReport {
    let n = net.n_species();
    let mut checks = Vec::new();

    let points = sample_points(n, KINETICS_POINTS, seed);
    let violations = validate_kinetics(net, k, &points);
    checks.push(check(
        "kinetics K1-K3",
        violations.is_empty(),
        match violations.first() {
            None => format!("{} points", points.len()),
            Some(v) => format!("{} violations, first {} at reaction {}", violations.len(), v.clause, v.reaction),
        },
    ));

    let Some(f) = cert.factorization.as_ref().filter(|_| cert.condition("A3") == Outcome::Pass) else {
        for name in ["metzler", "conservation", "order preservation", "convergence"] {
            checks.push(skipped(name, "no factorization certified"));
        }
        return ValidationReport { checks };
    };
    let order = ConeOrder::new(f.lambda.clone()).expect("certified Λ has full column rank");
    let h = integral(f);
    let strict = cert.condition("A4") == Outcome::Pass;
    let gamma = net.stoichiometric_matrix();

    let mut quasi = true;
    let mut irreducible = true;
    let mut agree = true;
    let metzler_points = sample_points(n, METZLER_POINTS, seed ^ 0x5a5a);
    for x in &metzler_points {
        let dv: DMatrix<f64> = k.jacobian(x);
        let m = pullback_metzler_check(f, &dv);
        quasi &= m.quasipositive;
        agree &= m.quasipositive == extremal_mapping_check(&order, &gamma, &dv);
        if x.iter().all(|v| *v > 0.0) {
            irreducible &= m.irreducible;
        }
    }
    let detail = format!(
        "quasipositive {quasi}, interior irreducible {irreducible}, oracle agreement {agree} ({} points)",
        metzler_points.len()
    );
    checks.push(check("metzler", quasi && agree && (!strict || irreducible), detail));

    let sys = OdeSystem::new(net, k);
    let opts = IntegratorOptions::default();
    let mut worst = 0.0f64;
    let mut failure = None;
    for s in 0..CONSERVATION_STARTS as u64 {
        let x0 = random_interior_point(n, seed.wrapping_add(s));
        match integrate(&sys, &x0, &uniform_samples(CONSERVATION_HORIZON, 100), &opts) {
            Ok(traj) => {
                let scale = 1.0 + h.h_f64(&x0).abs();
                worst = worst.max(traj.integral_drift(&h) / scale);
            }
            Err(e) => failure = Some(e.to_string()),
        }
    }
    checks.push(match failure {
        Some(e) => check("conservation", false, e),
        None => check(
            "conservation",
            worst <= CONSERVATION_TOL,
            format!("max relative H drift {worst:.3e} (tolerance {CONSERVATION_TOL:e})"),
        ),
    });

    if strict {
        let x0 = random_interior_point(n, seed.wrapping_add(100));
        let z = vec![0.1; order.dim()];
        let y0 = shift_along_cone(&order, &x0, &z);
        let samples = uniform_samples(ORDER_HORIZON, 100);
        let pair = integrate(&sys, &x0, &samples, &opts).and_then(|a| Ok((a, integrate(&sys, &y0, &samples, &opts)?)));
        checks.push(match pair {
            Ok((a, b)) => match check_order_preservation(&order, &a, &b) {
                Ok(oc) => check(
                    "order preservation",
                    oc.holds,
                    format!(
                        "min pullback {:.3e}",
                        oc.min_pullback.iter().cloned().fold(f64::INFINITY, f64::min)
                    ),
                ),
                Err(e) => check("order preservation", false, e.to_string()),
            },
            Err(e) => check("order preservation", false, e.to_string()),
        });
    } else {
        checks.push(skipped("order preservation", "A4 not certified"));
    }

    if cert.verdict == Verdict::Global {
        let gf = gamma.to_f64();
        let base = random_interior_point(n, seed.wrapping_add(200));
        let starts: Vec<Vec<f64>> = (0..MULTISTART as u64)
            .map(|s| if s == 0 { base.clone() } else { class_neighbour(&gf, &base, seed.wrapping_add(300 + s)) })
            .collect();
        let eqs: Result<Vec<_>, _> = starts.iter().map(|x0| find_equilibrium(&sys, x0, SETTLE_TIME, &opts)).collect();
        checks.push(match eqs {
            Ok(eqs) => {
                let mut spread = 0.0f64;
                for a in &eqs {
                    for b in &eqs {
                        spread = spread.max(distance(&a.x, &b.x));
                    }
                }
                check(
                    "convergence",
                    spread < CONVERGENCE_TOL,
                    format!("{MULTISTART} starts, max pairwise distance {spread:.3e}"),
                )
            }
            Err(e) => check("convergence", false, e.to_string()),
        });
    } else {
        checks.push(skipped("convergence", "global stability not certified"));
    }

    ValidationReport { checks }
}
