//! Acceptance suite: one line per criterion, with every tolerance and time
//! budget pinned below. Runs under a custom harness so the report prints in
//! order; the process fails if any criterion fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crn_core::certify::{certify, Outcome, Verdict};
use crn_core::factorization::canonical_form;
use crn_core::integrate::{
    check_order_preservation, class_neighbour, find_equilibrium, integrate, random_interior_point,
    shift_along_cone, uniform_samples, IntegratorOptions, OdeSystem, ORDER_SLACK,
};
use crn_core::kinetics::{
    extremal_mapping_check, make_power_law, pullback_metzler_check, sample_points, unit_mass_action, Kinetics,
    SignFlipped,
};
use crn_core::linalg::{self, frac, int, Rational, RationalMatrix};
use crn_core::network::{parse_network, Network};
use crn_core::order::{integral, ConeOrder};
use crn_core::persistence::{
    face_status, is_mixed_column, off_face_rows, separation_certificate, verify_separation, A6Route, FaceStatus,
};

const EX1: &str = include_str!("../../../networks/ex1.rxn");
const EX2: &str = include_str!("../../../networks/ex2.rxn");
const EX3: &str = include_str!("../../../networks/ex3.rxn");
const FIVE_SPECIES: &str = include_str!("../../../networks/five_species.rxn");
const OUTFLOW: &str = include_str!("../../../networks/outflow.rxn");
const BIMOLECULAR: &str = include_str!("../../../networks/bimolecular.rxn");
const DISCONNECTED: &str = include_str!("../../../networks/disconnected.rxn");
const TRAP: &str = include_str!("../../../networks/trap.rxn");

// Budgets per criterion.
const BUDGET_GOLDEN_EACH: Duration = Duration::from_secs(1);
const BUDGET_VERDICTS: Duration = Duration::from_secs(1);
const BUDGET_FIVE_SPECIES: Duration = Duration::from_secs(1);
const BUDGET_CONSERVATION: Duration = Duration::from_secs(5);
const BUDGET_CONVERGENCE: Duration = Duration::from_secs(30);
const BUDGET_ORDER: Duration = Duration::from_secs(20);
const BUDGET_METZLER: Duration = Duration::from_secs(5);
const BUDGET_LATTICE: Duration = Duration::from_secs(5);
const BUDGET_ANTICHAIN: Duration = Duration::from_secs(5);
const BUDGET_NEGATIVE: Duration = Duration::from_secs(1);

// Tolerances.
const H_DRIFT_TOL: f64 = 1e-7;
const CONVERGENCE_TOL: f64 = 1e-5;
const PULLBACK_SLACK: f64 = 1e-8;

const CONSERVATION_STARTS: u64 = 10;
const CONSERVATION_HORIZON: f64 = 100.0;
const MULTISTARTS: u64 = 8;
const SETTLE: f64 = 200.0;
const ORDER_PAIRS: u64 = 20;
const ORDER_HORIZON: f64 = 50.0;
const METZLER_POINTS: usize = 100;
const RANDOM_TRIALS: usize = 1000;

type Check = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Check);

fn net(text: &str) -> Network {
    parse_network(text).expect("fixture parses")
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// Reference factors (Λ, Θ) for the three example networks.
fn reference_factors() -> Vec<(&'static str, &'static str, RationalMatrix, RationalMatrix)> {
    vec![
        (
            "Example 1",
            EX1,
            RationalMatrix::from_ints(&[[1, 0, 0], [0, 1, 0], [-1, 0, 0], [0, 0, 1]]),
            RationalMatrix::from_ints(&[[-1, 0, 1], [1, -1, 0], [0, 1, -1]]),
        ),
        (
            "Example 2",
            EX2,
            RationalMatrix::from_ints(&[[1, 0, 0, 0], [0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]),
            RationalMatrix::from_ints(&[[-1, 0, 1, 1], [1, -1, 0, 0], [0, 1, -1, 0], [0, 0, 0, -1]]),
        ),
        (
            "Example 3",
            EX3,
            RationalMatrix::from_ints(&[
                [1, 0, 0, 0],
                [0, -1, 0, 0],
                [0, 1, 0, 0],
                [0, 0, 1, 0],
                [0, 0, 0, -1],
                [0, 0, 0, 1],
            ]),
            RationalMatrix::from_ints(&[[-1, 0, 0, 1], [1, -1, 0, 0], [0, 1, -1, 0], [0, 0, 1, -1]]),
        ),
    ]
}

fn golden_factorizations() -> Check {
    let mut notes = Vec::new();
    for (name, text, lambda, theta) in reference_factors() {
        let start = Instant::now();
        let n = net(text);
        let cert = certify(&n);
        let f = cert.factorization.as_ref().ok_or(format!("{name}: no factorization"))?;
        let ours = canonical_form(&f.lambda, &f.theta);
        let theirs = canonical_form(&lambda, &theta);
        ensure(ours == theirs, format!("{name}: canonical factors differ"))?;
        ensure(
            lambda.mul(&theta).unwrap() == n.stoichiometric_matrix(),
            format!("{name}: reference factors do not multiply to Γ"),
        )?;
        let t = start.elapsed();
        ensure(t < BUDGET_GOLDEN_EACH, format!("{name}: {t:?} over budget"))?;
        notes.push(format!("{name} r={}", f.r()));
    }
    Ok(notes.join(", "))
}

fn siphon_names(cert: &crn_core::certify::Certificate) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = cert
        .siphon_report
        .as_ref()
        .map(|r| {
            r.minimal_siphons
                .iter()
                .map(|s| {
                    let mut v = s.names.clone();
                    v.sort();
                    v
                })
                .collect()
        })
        .unwrap_or_default();
    out.sort();
    out
}

fn golden_verdicts() -> Check {
    for (name, text, route) in [
        ("Example 1", EX1, A6Route::AllReversible),
        ("Example 2", EX2, A6Route::AllReversible),
        ("Example 3", EX3, A6Route::SiphonFaces),
    ] {
        let cert = certify(&net(text));
        ensure(cert.verdict == Verdict::Global, format!("{name}: verdict {}", cert.verdict))?;
        let report = cert.siphon_report.as_ref().ok_or(format!("{name}: no siphon report"))?;
        ensure(report.via == route, format!("{name}: wrong A6 route"))?;
    }
    let n3 = net(EX3);
    let cert = certify(&n3);
    let mut expected: Vec<Vec<String>> = [vec!["E", "ES1"], vec!["F", "FS2"], vec!["S1", "ES1", "S2", "FS2"]]
        .iter()
        .map(|s| {
            let mut v: Vec<String> = s.iter().map(|x| x.to_string()).collect();
            v.sort();
            v
        })
        .collect();
    expected.sort();
    ensure(siphon_names(&cert) == expected, format!("siphons {:?}", siphon_names(&cert)))?;
    let gamma = n3.stoichiometric_matrix();
    let report = cert.siphon_report.as_ref().unwrap();
    for v in &report.verdicts {
        let w = v.separation_certificate.as_ref().ok_or("Example 3: missing certificate")?;
        ensure(verify_separation(&gamma, &v.face_set, w), "Example 3: certificate fails")?;
    }
    Ok("Examples 1-2 via A6(i), Example 3 via A6(ii) with 3 certificates".into())
}

fn five_species() -> Check {
    let n = net(FIVE_SPECIES);
    // Reference rows are X1..X5; the fixture numbers species by first appearance.
    let perm: Vec<usize> = (1..=5)
        .map(|i| n.species_index(&format!("X{i}")).expect("species present"))
        .collect();
    let gamma = n.stoichiometric_matrix().select_rows(&perm);
    let reference_gamma = RationalMatrix::from_ints(&[[1, 0, 1], [-1, 1, 0], [1, 0, 1], [-1, 0, -1], [0, -2, -2]]);
    ensure(gamma == reference_gamma, "fixture Γ differs from the reference")?;
    let pairs: Vec<(Vec<usize>, [i64; 5])> = vec![
        (vec![2, 3, 5], [1, 0, 0, 1, 0]),
        (vec![1, 2, 5], [0, 0, 1, 1, 0]),
        (vec![2, 5], [1, 0, 1, 2, 0]),
        (vec![3, 4], [2, 2, 0, 0, 1]),
        (vec![1, 4], [0, 2, 2, 0, 1]),
        (vec![4], [1, 2, 1, 0, 1]),
        (vec![3], [3, 2, 0, 1, 1]),
        (vec![1], [0, 2, 3, 1, 1]),
    ];
    let mut listed: Vec<Vec<usize>> = pairs
        .iter()
        .map(|(s, _)| s.iter().map(|i| i - 1).collect())
        .collect();
    listed.sort();
    let mut found = Vec::new();
    for mask in 1u32..31 {
        let s: Vec<usize> = (0..5).filter(|i| mask & (1 << i) != 0).collect();
        if is_mixed_column(&off_face_rows(&gamma, &s)) {
            found.push(s);
        }
    }
    found.sort();
    ensure(found == listed, format!("mixed-column sets {found:?}"))?;
    for (s, w) in &pairs {
        let s: Vec<usize> = s.iter().map(|i| i - 1).collect();
        let w: Vec<Rational> = w.iter().map(|&v| int(v)).collect();
        ensure(verify_separation(&gamma, &s, &w), format!("reference certificate for {s:?} fails"))?;
        let own = separation_certificate(&gamma, &s).ok_or(format!("no certificate found for {s:?}"))?;
        ensure(verify_separation(&gamma, &s, &own), format!("own certificate for {s:?} fails"))?;
    }
    Ok("8 mixed-column sets, 8 reference and 8 own certificates verified".into())
}

fn conservation() -> Check {
    let n = net(EX1);
    let f = certify(&n).factorization.ok_or("no factorization")?;
    let h = integral(&f);
    let k = unit_mass_action(&n);
    let sys = OdeSystem::new(&n, &k);
    let samples = uniform_samples(CONSERVATION_HORIZON, 1000);
    let mut worst = 0.0f64;
    for s in 0..CONSERVATION_STARTS {
        let x0 = random_interior_point(4, 1000 + s);
        let traj = integrate(&sys, &x0, &samples, &IntegratorOptions::default()).map_err(|e| e.to_string())?;
        let rel = traj.integral_drift(&h) / (1.0 + h.h_f64(&x0).abs());
        worst = worst.max(rel);
    }
    ensure(worst <= H_DRIFT_TOL, format!("relative drift {worst:.3e}"))?;
    Ok(format!("max relative drift {worst:.2e} <= {H_DRIFT_TOL:e}"))
}

fn convergence() -> Check {
    let mut notes = Vec::new();
    for (name, text, seed) in [("Example 1", EX1, 11u64), ("Example 3", EX3, 13u64)] {
        let n = net(text);
        let k = make_power_law(&n, seed);
        let sys = OdeSystem::new(&n, &k);
        let g = n.stoichiometric_matrix().to_f64();
        let base = random_interior_point(n.n_species(), seed);
        let mut eqs = Vec::new();
        for s in 0..MULTISTARTS {
            let x0 = if s == 0 { base.clone() } else { class_neighbour(&g, &base, seed * 100 + s) };
            let e = find_equilibrium(&sys, &x0, SETTLE, &IntegratorOptions::default()).map_err(|e| e.to_string())?;
            eqs.push(e.x);
        }
        let mut spread = 0.0f64;
        for a in &eqs {
            for b in &eqs {
                let d: f64 = a.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
                spread = spread.max(d);
            }
        }
        ensure(spread < CONVERGENCE_TOL, format!("{name}: spread {spread:.3e}"))?;
        notes.push(format!("{name} spread {spread:.1e}"));
    }
    Ok(notes.join(", "))
}

fn order_preservation() -> Check {
    assert_eq!(PULLBACK_SLACK, ORDER_SLACK);
    let n = net(EX1);
    let f = certify(&n).factorization.ok_or("no factorization")?;
    let order = ConeOrder::new(f.lambda.clone()).map_err(|e| e.to_string())?;
    let mass = unit_mass_action(&n);
    let power = make_power_law(&n, 5);
    let samples = uniform_samples(ORDER_HORIZON, 100);
    let opts = IntegratorOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0dde);
    let mut worst = f64::INFINITY;
    for p in 0..ORDER_PAIRS {
        let k: &dyn Kinetics = if p % 2 == 0 { &mass } else { &power };
        let sys = OdeSystem::new(&n, k);
        let x0 = random_interior_point(4, 2000 + p);
        let z: Vec<f64> = (0..order.dim()).map(|_| rng.gen_range(0.0..0.3)).collect();
        let y0 = shift_along_cone(&order, &x0, &z);
        let a = integrate(&sys, &x0, &samples, &opts).map_err(|e| e.to_string())?;
        let b = integrate(&sys, &y0, &samples, &opts).map_err(|e| e.to_string())?;
        let c = check_order_preservation(&order, &a, &b).map_err(|e| e.to_string())?;
        ensure(c.holds, format!("pair {p} unordered at sample {:?}", c.first_violation))?;
        worst = worst.min(c.min_pullback.iter().cloned().fold(f64::INFINITY, f64::min));
    }
    // Negative control: reversed dynamics on a horizon short enough to stay
    // in the orthant.
    let flipped = SignFlipped(unit_mass_action(&n));
    let sys = OdeSystem::new(&n, &flipped);
    let short = uniform_samples(0.1, 20);
    let mut violated = 0;
    for p in 0..ORDER_PAIRS {
        let x0 = random_interior_point(4, 3000 + p);
        let y0 = shift_along_cone(&order, &x0, &[0.2, 0.0, 0.0]);
        let (Ok(a), Ok(b)) = (integrate(&sys, &x0, &short, &opts), integrate(&sys, &y0, &short, &opts)) else {
            continue;
        };
        if !check_order_preservation(&order, &a, &b).map_err(|e| e.to_string())?.holds {
            violated += 1;
        }
    }
    ensure(violated > 0, "sign-flipped control never violated the order")?;
    Ok(format!(
        "{ORDER_PAIRS} pairs ordered (min pullback {worst:.2e}); flipped control violated in {violated}/{ORDER_PAIRS}"
    ))
}

fn metzler() -> Check {
    let mut total = 0;
    for (name, text) in [("Example 1", EX1), ("Example 2", EX2), ("Example 3", EX3)] {
        let n = net(text);
        let f = certify(&n).factorization.ok_or("no factorization")?;
        let order = ConeOrder::new(f.lambda.clone()).map_err(|e| e.to_string())?;
        let gamma = n.stoichiometric_matrix();
        let kinetics: [Box<dyn Kinetics>; 2] = [Box::new(unit_mass_action(&n)), Box::new(make_power_law(&n, 21))];
        let mut rng = ChaCha8Rng::seed_from_u64(0x3e7);
        let mut points = sample_points(n.n_species(), METZLER_POINTS / 2, 77);
        points.truncate(METZLER_POINTS - 10);
        while points.len() < METZLER_POINTS {
            points.push((0..n.n_species()).map(|_| rng.gen_range(0.01..5.0)).collect());
        }
        for k in &kinetics {
            for x in &points {
                let dv = k.jacobian(x);
                let m = pullback_metzler_check(&f, &dv);
                ensure(m.quasipositive, format!("{name}: M not Metzler at {x:?}"))?;
                ensure(
                    m.quasipositive == extremal_mapping_check(&order, &gamma, &dv),
                    format!("{name}: oracle disagrees at {x:?}"),
                )?;
                if x.iter().all(|v| *v > 0.0) {
                    ensure(m.irreducible, format!("{name}: M reducible at interior {x:?}"))?;
                }
                total += 1;
            }
        }
    }
    Ok(format!("{total} (network, kinetics, point) samples Metzler, oracle agreement exact"))
}

fn random_rational(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Rational {
    frac(rng.gen_range(lo..=hi), rng.gen_range(1..=6))
}

fn random_vec(rng: &mut ChaCha8Rng, len: usize, lo: i64, hi: i64) -> Vec<Rational> {
    (0..len).map(|_| random_rational(rng, lo, hi)).collect()
}

fn lattice_networks() -> Vec<(Network, ConeOrder, crn_core::factorization::Factorization)> {
    [EX1, EX2, EX3, FIVE_SPECIES]
        .iter()
        .map(|t| {
            let n = net(t);
            let f = certify(&n).factorization.expect("factorizable");
            let order = ConeOrder::new(f.lambda.clone()).unwrap();
            (n, order, f)
        })
        .collect()
}

fn lattice_laws() -> Check {
    let nets = lattice_networks();
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a77);
    for trial in 0..RANDOM_TRIALS {
        let (n, order, f) = &nets[trial % nets.len()];
        let (dim, r) = (n.n_species(), f.r());
        let floor = random_vec(&mut rng, dim, 0, 12);
        let c = floor.clone();
        let pt = |t: &[Rational]| linalg::add(&c, &f.lambda.mul_vec(t).unwrap());
        let x = pt(&random_vec(&mut rng, r, -12, 12));
        let y = pt(&random_vec(&mut rng, r, -12, 12));
        let z = pt(&random_vec(&mut rng, r, -12, 12));
        let m = |p: &[Rational], q: &[Rational]| order.meet(&c, p, q).unwrap();
        let j = |p: &[Rational], q: &[Rational]| order.join(&c, p, q).unwrap();
        ensure(m(&x, &y) == m(&y, &x) && j(&x, &y) == j(&y, &x), format!("trial {trial}: commutativity"))?;
        ensure(
            m(&m(&x, &y), &z) == m(&x, &m(&y, &z)) && j(&j(&x, &y), &z) == j(&x, &j(&y, &z)),
            format!("trial {trial}: associativity"),
        )?;
        ensure(m(&x, &j(&x, &y)) == x && j(&x, &m(&x, &y)) == x, format!("trial {trial}: absorption"))?;
        let (lo, hi) = (m(&x, &y), j(&x, &y));
        ensure(
            order.precedes(&lo, &x).unwrap()
                && order.precedes(&lo, &y).unwrap()
                && order.precedes(&x, &hi).unwrap()
                && order.precedes(&y, &hi).unwrap(),
            format!("trial {trial}: bounds"),
        )?;
        // Order-interval bound: lift x, y componentwise above a floor t
        // along one class, then their meet and join stay above t.
        let t = floor;
        let raise: Vec<Rational> = (0..dim)
            .map(|i| {
                let lowest = x[i].clone().min(y[i].clone());
                (&t[i] - lowest).max(int(0))
            })
            .collect();
        let (xs, ys) = (linalg::add(&x, &raise), linalg::add(&y, &raise));
        let lo = order.meet(&xs, &xs, &ys).unwrap();
        let hi = order.join(&xs, &xs, &ys).unwrap();
        ensure(
            lo.iter().zip(&t).all(|(a, b)| a >= b) && hi.iter().zip(&t).all(|(a, b)| a >= b),
            format!("trial {trial}: order-interval bound"),
        )?;
    }
    Ok(format!("{RANDOM_TRIALS} triples, exact rational arithmetic"))
}

fn in_image(gamma: &RationalMatrix, d: &[Rational]) -> bool {
    let mut rows = gamma.transpose().row_vecs();
    rows.push(d.to_vec());
    RationalMatrix::from_rows(rows).unwrap().rank() == gamma.rank()
}

fn antichain_level_sets() -> Check {
    let nets = lattice_networks();
    let mut rng = ChaCha8Rng::seed_from_u64(0xa17c);
    for trial in 0..RANDOM_TRIALS {
        let (n, order, f) = &nets[trial % nets.len()];
        let gamma = n.stoichiometric_matrix();
        let h = integral(f);
        let x = random_vec(&mut rng, n.n_species(), 0, 12);
        let w = random_vec(&mut rng, n.n_reactions(), -6, 6);
        let y = linalg::add(&x, &gamma.mul_vec(&w).unwrap());
        ensure(h.h(&x) == h.h(&y), format!("trial {trial}: H differs on a stoichiometry class"))?;
        let distinct = x != y;
        let comparable = order.precedes(&x, &y).unwrap() || order.precedes(&y, &x).unwrap();
        ensure(!(distinct && comparable), format!("trial {trial}: comparable pair in a class"))?;
    }
    let mut balanced = 0;
    for trial in 0..RANDOM_TRIALS {
        let (n, order, f) = &nets[trial % nets.len()];
        let gamma = n.stoichiometric_matrix();
        let h = integral(f);
        let r = f.r();
        let mut t = random_vec(&mut rng, r, -6, 6);
        if trial % 2 == 0 {
            let partial = linalg::dot(&h.y_theta[..r - 1], &t[..r - 1]);
            t[r - 1] = -partial / &h.y_theta[r - 1];
            balanced += 1;
        }
        let x = random_vec(&mut rng, n.n_species(), 0, 12);
        let y = linalg::add(&x, &f.lambda.mul_vec(&t).unwrap());
        ensure(order.same_class(&x, &y).unwrap(), format!("trial {trial}: not in one Λ-class"))?;
        let level = h.h(&x) == h.h(&y);
        let stoich = in_image(&gamma, &linalg::sub(&y, &x));
        ensure(level == stoich, format!("trial {trial}: level-set characterization fails"))?;
    }
    Ok(format!(
        "{RANDOM_TRIALS} antichain pairs, {RANDOM_TRIALS} Λ-class pairs ({balanced} on one level set)"
    ))
}

fn negative_controls() -> Check {
    let c = certify(&net(OUTFLOW));
    ensure(c.verdict == Verdict::None, "A -> B: verdict not none")?;
    ensure(
        c.failure_narrative.iter().any(|s| s.contains("ker(Θᵀ)")),
        "A -> B: reason does not name ker(Θᵀ)",
    )?;
    let c = certify(&net(BIMOLECULAR));
    ensure(c.condition("A3") == Outcome::Fail, "A + B -> C: A3 did not fail")?;
    let c = certify(&net(DISCONNECTED));
    ensure(c.condition("A4") == Outcome::Fail, "disconnected: A4 did not fail")?;
    let trap = net(TRAP);
    let c = certify(&trap);
    ensure(c.condition("A6") == Outcome::Fail, "trap: A6 did not fail")?;
    let report = c.siphon_report.as_ref().ok_or("trap: no siphon report")?;
    let gamma = trap.stoichiometric_matrix();
    let uncertified = report
        .verdicts
        .iter()
        .filter(|v| v.separation_certificate.is_none() && v.status == FaceStatus::Tangent)
        .count();
    ensure(uncertified > 0, "trap: every face certified")?;
    for v in &report.verdicts {
        ensure(face_status(&trap, &gamma, &v.face_set) == v.status, "trap: face status mismatch")?;
    }
    Ok(format!("4 controls rejected; trap has {uncertified} uncertifiable tangent face(s)"))
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("golden factorizations", BUDGET_GOLDEN_EACH * 3, golden_factorizations),
        ("golden verdicts", BUDGET_VERDICTS, golden_verdicts),
        ("five-species regression", BUDGET_FIVE_SPECIES, five_species),
        ("conservation", BUDGET_CONSERVATION, conservation),
        ("convergence/uniqueness", BUDGET_CONVERGENCE, convergence),
        ("order preservation", BUDGET_ORDER, order_preservation),
        ("quasipositivity", BUDGET_METZLER, metzler),
        ("lattice laws", BUDGET_LATTICE, lattice_laws),
        ("antichain/level sets", BUDGET_ANTICHAIN, antichain_level_sets),
        ("negative controls", BUDGET_NEGATIVE, negative_controls),
    ];
    let mut failures = 0;
    for (i, (name, budget, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let result = match result {
            Ok(detail) if elapsed > budget => Err(format!("{detail}; took {elapsed:.2?}, budget {budget:?}")),
            other => other,
        };
        match result {
            Ok(detail) => println!("PASS {:>2} {name:<24} {elapsed:>9.2?}  {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL {:>2} {name:<24} {elapsed:>9.2?}  {why}", i + 1);
            }
        }
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
