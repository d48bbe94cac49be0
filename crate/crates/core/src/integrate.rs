//! Numerical integration of ẋ = Γv(x) on the closed orthant, equilibrium
//! location, and empirical order checks.
//!
//! The integrator is Dormand–Prince 5(4) with steps that land exactly on the
//! requested sample times, so two runs with the same samples share a grid.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kinetics::Kinetics;
use crate::linalg::{self, Rational};
use crate::network::Network;
use crate::order::{ConeOrder, Integral};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegrateError {
    #[error("initial state has length {got}, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("initial state must be finite and nonnegative")]
    BadInitialState,
    #[error("sample times must be finite, increasing and start after 0")]
    BadSampleTimes,
    #[error("step size underflow at t = {t}: state {state:?}")]
    Underflow { t: f64, state: Vec<f64> },
    #[error("exceeded {0} steps")]
    MaxSteps(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OrderCheckError {
    #[error("trajectories are not sampled on the same time grid")]
    GridMismatch,
    #[error("initial states are not ordered (minimum pullback coordinate {0})")]
    InitialNotOrdered(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    pub initial_step: Option<f64>,
    pub max_steps: usize,
    /// Coordinates below this are snapped to 0 when the flow allows it.
    pub clamp_threshold: f64,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            rtol: 1e-9,
            atol: 1e-12,
            initial_step: None,
            max_steps: 5_000_000,
            clamp_threshold: 1e-14,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleDiagnostics {
    /// Last accepted step before this sample (0 at the initial sample).
    pub step_size: f64,
    pub min_coordinate: f64,
    pub h_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub diagnostics: Vec<SampleDiagnostics>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub clamped_coordinates: usize,
}

impl Trajectory {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("a trajectory holds at least its initial state")
    }

    /// Fills `h_value` in every diagnostic record.
    pub fn record_integral(&mut self, integral: &Integral) {
        for (d, x) in self.diagnostics.iter_mut().zip(&self.states) {
            d.h_value = Some(integral.h_f64(x));
        }
    }

    /// Largest |H(x(t)) − H(x(0))| over the samples.
    pub fn integral_drift(&self, integral: &Integral) -> f64 {
        let h0 = integral.h_f64(&self.states[0]);
        self.states
            .iter()
            .map(|x| (integral.h_f64(x) - h0).abs())
            .fold(0.0, f64::max)
    }

    /// CSV with a `time` column, one column per species, and `H` when an
    /// integral is supplied.
    pub fn write_csv<W: Write>(&self, out: W, names: &[String], integral: Option<&Integral>) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["time".to_string()];
        header.extend(names.iter().cloned());
        if integral.is_some() {
            header.push("H".to_string());
        }
        w.write_record(&header)?;
        for (t, x) in self.times.iter().zip(&self.states) {
            let mut row = vec![format!("{t:.12e}")];
            row.extend(x.iter().map(|v| format!("{v:.12e}")));
            if let Some(h) = integral {
                row.push(format!("{:.12e}", h.h_f64(x)));
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// The vector field of a network under given kinetics.
pub struct OdeSystem<'a> {
    gamma: DMatrix<f64>,
    /// Columns of Γ spanning Im Γ.
    image_basis: DMatrix<f64>,
    kinetics: &'a dyn Kinetics,
}

impl<'a> OdeSystem<'a> {
    pub fn new(net: &Network, kinetics: &'a dyn Kinetics) -> OdeSystem<'a> {
        let exact = net.stoichiometric_matrix();
        let mut pivots: Vec<usize> = Vec::new();
        for j in 0..exact.cols() {
            let mut trial = pivots.clone();
            trial.push(j);
            if exact.select_columns(&trial).rank() == trial.len() {
                pivots = trial;
            }
        }
        OdeSystem {
            gamma: exact.to_f64(),
            image_basis: exact.select_columns(&pivots).to_f64(),
            kinetics,
        }
    }

    pub fn dim(&self) -> usize {
        self.gamma.nrows()
    }

    pub fn gamma(&self) -> &DMatrix<f64> {
        &self.gamma
    }

    /// Γv(x). Off the orthant the field is extended by v(max(x, 0)), which
    /// keeps stage evaluations finite for non-integer exponents.
    pub fn field(&self, x: &[f64]) -> Vec<f64> {
        let clipped: Vec<f64> = x.iter().map(|v| v.max(0.0)).collect();
        (&self.gamma * self.kinetics.rates(&clipped)).as_slice().to_vec()
    }

    pub fn residual(&self, x: &[f64]) -> f64 {
        self.field(x).iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Stage coefficients; the field is autonomous so the nodes are not needed.
const A: [&[f64]; 6] = [
    &[1.0 / 5.0],
    &[3.0 / 40.0, 9.0 / 40.0],
    &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
    &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
    &[9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0],
    &[35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct Step {
    x: Vec<f64>,
    f_end: Vec<f64>,
    err: f64,
}

fn dp_step(sys: &OdeSystem, x: &[f64], f0: &[f64], h: f64, opts: &IntegratorOptions) -> Step {
    let n = x.len();
    let mut k: Vec<Vec<f64>> = vec![f0.to_vec()];
    for row in A.iter() {
        let xs: Vec<f64> = (0..n)
            .map(|i| x[i] + h * row.iter().zip(&k).map(|(a, ks)| a * ks[i]).sum::<f64>())
            .collect();
        k.push(sys.field(&xs));
    }
    // Row 6 of A holds the fifth-order weights, so stage 7 sits at x_new.
    let row = A[5];
    let x_new: Vec<f64> = (0..n)
        .map(|i| x[i] + h * row.iter().zip(&k).map(|(a, ks)| a * ks[i]).sum::<f64>())
        .collect();
    let mut acc = 0.0;
    for i in 0..n {
        let e: f64 = h * E.iter().zip(&k).map(|(c, ks)| c * ks[i]).sum::<f64>();
        let sc = opts.atol + opts.rtol * x[i].abs().max(x_new[i].abs());
        acc += (e / sc).powi(2);
    }
    let err = (acc / n.max(1) as f64).sqrt();
    let f_end = k.pop().expect("seven stages");
    Step { x: x_new, f_end, err }
}

fn initial_step(x: &[f64], f: &[f64], opts: &IntegratorOptions) -> f64 {
    let norm = |v: &[f64]| {
        let s: f64 = v
            .iter()
            .zip(x)
            .map(|(a, b)| (a / (opts.atol + opts.rtol * b.abs())).powi(2))
            .sum();
        (s / v.len().max(1) as f64).sqrt()
    };
    let (d0, d1) = (norm(x), norm(f));
    if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    }
}

/// Integrates from `x0` at t = 0, recording the state at each sample time.
pub fn integrate(
    sys: &OdeSystem,
    x0: &[f64],
    sample_times: &[f64],
    opts: &IntegratorOptions,
) -> Result<Trajectory, IntegrateError> {
    let n = sys.dim();
    if x0.len() != n {
        return Err(IntegrateError::Dimension { expected: n, got: x0.len() });
    }
    if x0.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(IntegrateError::BadInitialState);
    }
    let increasing = sample_times.windows(2).all(|w| w[0] < w[1]);
    if !increasing || sample_times.iter().any(|t| !t.is_finite() || *t <= 0.0) {
        return Err(IntegrateError::BadSampleTimes);
    }

    let min_coord = |x: &[f64]| x.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![x0.to_vec()],
        diagnostics: vec![SampleDiagnostics {
            step_size: 0.0,
            min_coordinate: min_coord(x0),
            h_value: None,
        }],
        accepted_steps: 0,
        rejected_steps: 0,
        clamped_coordinates: 0,
    };
    let mut t = 0.0;
    let mut x = x0.to_vec();
    let mut f = sys.field(&x);
    let mut h = opts.initial_step.unwrap_or_else(|| initial_step(&x, &f, opts));
    let mut last_h = 0.0;
    let mut steps = 0usize;

    for &target in sample_times {
        loop {
            let remaining = target - t;
            if remaining <= 1e-13 * target.abs().max(1.0) {
                t = target;
                break;
            }
            steps += 1;
            if steps > opts.max_steps {
                return Err(IntegrateError::MaxSteps(opts.max_steps));
            }
            let h_min = 1e-14 * t.abs().max(1.0);
            if h < h_min {
                return Err(IntegrateError::Underflow { t, state: x });
            }
            let landing = h >= remaining;
            let h_try = if landing { remaining } else { h };
            let step = dp_step(sys, &x, &f, h_try, opts);

            if !step.err.is_finite() || step.x.iter().any(|v| !v.is_finite()) {
                traj.rejected_steps += 1;
                h = h_try / 2.0;
                continue;
            }
            if step.err > 1.0 {
                traj.rejected_steps += 1;
                h = h_try * (0.9 * step.err.powf(-0.2)).max(0.2);
                continue;
            }

            // Nonnegativity guard.
            let mut x_new = step.x;
            let small: Vec<usize> = (0..n).filter(|&i| x_new[i] < opts.clamp_threshold).collect();
            let mut reject = small.iter().any(|&i| x_new[i] <= -opts.clamp_threshold);
            let mut f_new = step.f_end;
            if !reject && !small.is_empty() {
                let mut snapped = x_new.clone();
                for &i in &small {
                    snapped[i] = 0.0;
                }
                let f_snapped = sys.field(&snapped);
                let mut any_snapped = false;
                for &i in &small {
                    if f_snapped[i] >= 0.0 {
                        any_snapped |= x_new[i] != 0.0;
                        x_new[i] = 0.0;
                    } else if x_new[i] < 0.0 {
                        reject = true;
                    }
                }
                if !reject && any_snapped {
                    traj.clamped_coordinates += small.len();
                    f_new = sys.field(&x_new);
                }
            }
            if reject {
                traj.rejected_steps += 1;
                h = h_try / 2.0;
                continue;
            }

            traj.accepted_steps += 1;
            t = if landing { target } else { t + h_try };
            x = x_new;
            f = f_new;
            last_h = h_try;
            let grow = if step.err == 0.0 { 5.0 } else { (0.9 * step.err.powf(-0.2)).clamp(0.2, 5.0) };
            // A step shortened only to hit a sample says nothing about the
            // natural step size, so keep the old one.
            if !(landing && h_try < h) {
                h = h_try * grow;
            }
            if landing {
                break;
            }
        }
        traj.times.push(target);
        traj.diagnostics.push(SampleDiagnostics {
            step_size: last_h,
            min_coordinate: min_coord(&x),
            h_value: None,
        });
        traj.states.push(x.clone());
    }
    Ok(traj)
}

/// `count` equally spaced samples on (0, t_end].
pub fn uniform_samples(t_end: f64, count: usize) -> Vec<f64> {
    (1..=count).map(|k| t_end * k as f64 / count as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub x: Vec<f64>,
    /// max |Γv(x)|.
    pub residual: f64,
    pub newton_steps: usize,
}

pub const SETTLE_TIME: f64 = 200.0;

/// Long-time integration followed by damped Newton on Γv = 0 within the
/// stoichiometry class of `x0`.
pub fn find_equilibrium(
    sys: &OdeSystem,
    x0: &[f64],
    settle_time: f64,
    opts: &IntegratorOptions,
) -> Result<Equilibrium, IntegrateError> {
    let traj = integrate(sys, x0, &[settle_time], opts)?;
    let mut x = traj.final_state().to_vec();
    let b = &sys.image_basis;
    let bt_gamma = b.transpose() * &sys.gamma;
    let reduced = |x: &[f64]| -> DVector<f64> {
        let clipped: Vec<f64> = x.iter().map(|v| v.max(0.0)).collect();
        &bt_gamma * sys.kinetics.rates(&clipped)
    };
    let mut r = reduced(&x);
    let mut steps = 0;
    for _ in 0..50 {
        if sys.residual(&x) <= 1e-15 * (1.0 + x.iter().fold(0.0f64, |m, v| m.max(v.abs()))) {
            break;
        }
        let jac = &bt_gamma * sys.kinetics.jacobian(&x) * b;
        let Some(delta) = jac.lu().solve(&(-&r)) else { break };
        let dx = b * delta;
        let mut lambda = 1.0;
        let mut improved = false;
        while lambda > 1e-6 {
            let cand: Vec<f64> = x.iter().zip(dx.iter()).map(|(a, d)| a + lambda * d).collect();
            if cand.iter().all(|v| *v >= 0.0) {
                let rc = reduced(&cand);
                if rc.norm() < r.norm() {
                    x = cand;
                    r = rc;
                    improved = true;
                    break;
                }
            }
            lambda /= 2.0;
        }
        if !improved {
            break;
        }
        steps += 1;
    }
    Ok(Equilibrium {
        residual: sys.residual(&x),
        x,
        newton_steps: steps,
    })
}

/// Numerical slack on pullback coordinates in order checks.
pub const ORDER_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderCheck {
    pub holds: bool,
    /// Smallest pullback coordinate of y(t) − x(t) at each sample.
    pub min_pullback: Vec<f64>,
    pub first_violation: Option<usize>,
    /// Largest distance of y(t) − x(t) from Im Λ.
    pub max_image_residual: f64,
}

/// Pullback coordinates of `y − x`, computed exactly from the floats.
pub fn pullback(order: &ConeOrder, x: &[f64], y: &[f64]) -> (Vec<f64>, f64) {
    let d: Vec<Rational> = x
        .iter()
        .zip(y)
        .map(|(a, b)| linalg::from_f64(*b) - linalg::from_f64(*a))
        .collect();
    let t = order.left_inverse().mul_vec(&d).expect("dimensions checked by caller");
    let back = order.lambda().mul_vec(&t).expect("dimensions checked by caller");
    let residual = linalg::sub(&back, &d)
        .iter()
        .map(|v| linalg::to_f64(v).abs())
        .fold(0.0, f64::max);
    (t.iter().map(linalg::to_f64).collect(), residual)
}

/// Whether `x(t) ⪯ y(t)` at every shared sample, up to [`ORDER_SLACK`].
pub fn check_order_preservation(order: &ConeOrder, x: &Trajectory, y: &Trajectory) -> Result<OrderCheck, OrderCheckError> {
    if x.times != y.times {
        return Err(OrderCheckError::GridMismatch);
    }
    let mut min_pullback = Vec::with_capacity(x.times.len());
    let mut first_violation = None;
    let mut max_image_residual = 0.0f64;
    for (k, (a, b)) in x.states.iter().zip(&y.states).enumerate() {
        let (coords, residual) = pullback(order, a, b);
        let m = coords.iter().cloned().fold(f64::INFINITY, f64::min);
        let m = if m.is_infinite() { 0.0 } else { m };
        if k == 0 && m < -ORDER_SLACK {
            return Err(OrderCheckError::InitialNotOrdered(m));
        }
        if m < -ORDER_SLACK && first_violation.is_none() {
            first_violation = Some(k);
        }
        max_image_residual = max_image_residual.max(residual);
        min_pullback.push(m);
    }
    Ok(OrderCheck {
        holds: first_violation.is_none(),
        min_pullback,
        first_violation,
        max_image_residual,
    })
}

/// A point with coordinates uniform in [0.5, 2], deterministic in `seed`.
pub fn random_interior_point(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(0.5..2.0)).collect()
}

/// Another interior point of the stoichiometry class of `x`, obtained by a
/// random move along Im Γ scaled to stay inside the orthant.
pub fn class_neighbour(gamma: &DMatrix<f64>, x: &[f64], seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = DVector::from_iterator(gamma.ncols(), (0..gamma.ncols()).map(|_| rng.gen_range(-1.0..1.0)));
    let d = gamma * w;
    let mut s = 1.0f64;
    for (xi, di) in x.iter().zip(d.iter()) {
        if *di < 0.0 {
            s = s.min(0.5 * xi / -di);
        }
    }
    x.iter().zip(d.iter()).map(|(xi, di)| xi + s * di).collect()
}

/// `x + s·Λz` as floats, for building ordered initial pairs.
pub fn shift_along_cone(order: &ConeOrder, x: &[f64], z: &[f64]) -> Vec<f64> {
    let l = order.lambda();
    x.iter()
        .enumerate()
        .map(|(i, xi)| {
            xi + (0..l.cols())
                .map(|k| linalg::to_f64(&l[(i, k)]) * z[k])
                .sum::<f64>()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factorization::factorize;
    use crate::kinetics::{make_power_law, unit_mass_action, SignFlipped};
    use crate::network::parse_network;
    use crate::order;

    const EX1: &str = "A <-> B + C\nB <-> D\nC + D <-> A";

    fn setup(text: &str) -> (Network, ConeOrder, Integral) {
        let net = parse_network(text).unwrap();
        let f = factorize(&net.stoichiometric_matrix()).unwrap();
        let ord = ConeOrder::new(f.lambda.clone()).unwrap();
        (net, ord, order::integral(&f))
    }

    #[test]
    fn exponential_decay_is_accurate() {
        let net = parse_network("A -> 0").unwrap();
        let k = unit_mass_action(&net);
        let sys = OdeSystem::new(&net, &k);
        let traj = integrate(&sys, &[1.0], &uniform_samples(5.0, 5), &IntegratorOptions::default()).unwrap();
        for (t, x) in traj.times.iter().zip(&traj.states) {
            assert!((x[0] - (-t).exp()).abs() < 1e-8, "t={t}");
        }
        assert_eq!(traj.times, vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn equilibrium_start_stays_put() {
        let (net, _, _) = setup(EX1);
        let k = unit_mass_action(&net);
        let sys = OdeSystem::new(&net, &k);
        let x0 = [1.0, 1.0, 1.0, 1.0];
        assert_eq!(sys.residual(&x0), 0.0);
        let traj = integrate(&sys, &x0, &uniform_samples(10.0, 10), &IntegratorOptions::default()).unwrap();
        for x in &traj.states {
            for v in x {
                assert!((v - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn stays_nonnegative_near_boundary() {
        let net = parse_network("A -> B\nB -> C").unwrap();
        let k = unit_mass_action(&net);
        let sys = OdeSystem::new(&net, &k);
        let traj = integrate(&sys, &[1.0, 0.0, 0.0], &uniform_samples(60.0, 30), &IntegratorOptions::default()).unwrap();
        assert!(traj.states.iter().flatten().all(|v| *v >= 0.0));
        let last = traj.final_state();
        assert!((last.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_inputs() {
        let (net, _, _) = setup(EX1);
        let k = unit_mass_action(&net);
        let sys = OdeSystem::new(&net, &k);
        let o = IntegratorOptions::default();
        assert!(matches!(integrate(&sys, &[1.0], &[1.0], &o), Err(IntegrateError::Dimension { .. })));
        assert_eq!(integrate(&sys, &[-1.0, 1.0, 1.0, 1.0], &[1.0], &o), Err(IntegrateError::BadInitialState));
        assert_eq!(integrate(&sys, &[1.0; 4], &[2.0, 1.0], &o), Err(IntegrateError::BadSampleTimes));
        assert_eq!(integrate(&sys, &[1.0; 4], &[0.0], &o), Err(IntegrateError::BadSampleTimes));
    }

    #[test]
    fn underflow_is_reported() {
        // Reversed A -> B drains B through the face x_B = 0 at t = ln 2.
        let net = parse_network("A -> B").unwrap();
        let k = SignFlipped(unit_mass_action(&net));
        let sys = OdeSystem::new(&net, &k);
        let err = integrate(&sys, &[1.0, 1.0], &[2.0], &IntegratorOptions::default()).unwrap_err();
        match err {
            IntegrateError::Underflow { t, state } => {
                assert!((t - std::f64::consts::LN_2).abs() < 1e-6, "t = {t}");
                assert!(state[1].abs() < 1e-9);
            }
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn integral_is_conserved() {
        let (net, _, h) = setup(EX1);
        let k = unit_mass_action(&net);
        let sys = OdeSystem::new(&net, &k);
        let x0 = [0.3, 1.7, 0.9, 0.2];
        let mut traj = integrate(&sys, &x0, &uniform_samples(100.0, 50), &IntegratorOptions::default()).unwrap();
        let h0 = h.h_f64(&x0);
        assert!(traj.integral_drift(&h) <= 1e-7 * (1.0 + h0.abs()));
        traj.record_integral(&h);
        assert!(traj.diagnostics.iter().all(|d| d.h_value.is_some()));
    }

    #[test]
    fn equilibria_agree_within_a_class() {
        let (net, _, _) = setup(EX1);
        let k = make_power_law(&net, 4);
        let sys = OdeSystem::new(&net, &k);
        let x0 = random_interior_point(4, 1);
        let y0 = class_neighbour(sys.gamma(), &x0, 2);
        let o = IntegratorOptions::default();
        let a = find_equilibrium(&sys, &x0, SETTLE_TIME, &o).unwrap();
        let b = find_equilibrium(&sys, &y0, SETTLE_TIME, &o).unwrap();
        assert!(a.residual < 1e-12 && b.residual < 1e-12);
        for (p, q) in a.x.iter().zip(&b.x) {
            assert!((p - q).abs() < 1e-9);
        }
    }

    #[test]
    fn order_preserved_and_flipped_control_fails() {
        let (net, ord, _) = setup(EX1);
        let k = unit_mass_action(&net);
        let sys = OdeSystem::new(&net, &k);
        let x0 = random_interior_point(4, 7);
        let y0 = shift_along_cone(&ord, &x0, &[0.1, 0.1, 0.1]);
        let samples = uniform_samples(50.0, 100);
        let o = IntegratorOptions::default();
        let tx = integrate(&sys, &x0, &samples, &o).unwrap();
        let ty = integrate(&sys, &y0, &samples, &o).unwrap();
        let check = check_order_preservation(&ord, &tx, &ty).unwrap();
        assert!(check.holds, "{check:?}");
        assert!(check.max_image_residual < 1e-9);
        let same = check_order_preservation(&ord, &tx, &tx).unwrap();
        assert!(same.holds);

        let flipped = SignFlipped(unit_mass_action(&net));
        let fsys = OdeSystem::new(&net, &flipped);
        let y0 = shift_along_cone(&ord, &x0, &[0.2, 0.0, 0.0]);
        // The reversed flow leaves the orthant soon after t = 0.15.
        let samples = uniform_samples(0.1, 20);
        let fx = integrate(&fsys, &x0, &samples, &o).unwrap();
        let fy = integrate(&fsys, &y0, &samples, &o).unwrap();
        assert!(!check_order_preservation(&ord, &fx, &fy).unwrap().holds);
    }

    #[test]
    fn ordered_starts_become_strictly_ordered() {
        let (net, ord, _) = setup(EX1);
        for (seed, k) in [(1u64, unit_mass_action(&net)), (2, make_power_law(&net, 9))] {
            let sys = OdeSystem::new(&net, &k);
            for ray in 0..3 {
                let x0 = random_interior_point(4, seed * 10 + ray as u64);
                let mut z = [0.0; 3];
                z[ray] = 0.1;
                // y0 − x0 lies on an extremal ray, so starts on the cone boundary.
                let y0 = shift_along_cone(&ord, &x0, &z);
                let o = IntegratorOptions::default();
                let tx = integrate(&sys, &x0, &[1.0], &o).unwrap();
                let ty = integrate(&sys, &y0, &[1.0], &o).unwrap();
                let (coords, _) = pullback(&ord, tx.final_state(), ty.final_state());
                assert!(coords.iter().all(|c| *c > 1e-10), "{coords:?}");
            }
        }
    }

    #[test]
    fn order_check_preconditions() {
        let (net, ord, _) = setup(EX1);
        let k = unit_mass_action(&net);
        let sys = OdeSystem::new(&net, &k);
        let o = IntegratorOptions::default();
        let x0 = random_interior_point(4, 3);
        let y0 = shift_along_cone(&ord, &x0, &[0.1, 0.1, 0.1]);
        let a = integrate(&sys, &x0, &[1.0, 2.0], &o).unwrap();
        let b = integrate(&sys, &y0, &[1.0, 3.0], &o).unwrap();
        assert_eq!(check_order_preservation(&ord, &a, &b), Err(OrderCheckError::GridMismatch));
        let b = integrate(&sys, &y0, &[1.0, 2.0], &o).unwrap();
        assert!(matches!(check_order_preservation(&ord, &b, &a), Err(OrderCheckError::InitialNotOrdered(_))));
    }

    #[test]
    fn csv_export() {
        let (net, _, h) = setup(EX1);
        let k = unit_mass_action(&net);
        let sys = OdeSystem::new(&net, &k);
        let traj = integrate(&sys, &[1.0, 2.0, 0.5, 0.1], &[0.5, 1.0], &IntegratorOptions::default()).unwrap();
        let names: Vec<String> = net.species().iter().map(|s| s.name.clone()).collect();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf, &names, Some(&h)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "time,A,B,C,D,H");
        assert_eq!(lines.len(), 4);
    }

    #[test]
    fn class_neighbour_stays_in_class() {
        let (net, _, h) = setup(EX1);
        let g = net.stoichiometric_matrix().to_f64();
        let x = random_interior_point(4, 9);
        let y = class_neighbour(&g, &x, 10);
        assert!(y.iter().all(|v| *v > 0.0));
        assert!((h.h_f64(&x) - h.h_f64(&y)).abs() < 1e-12);
        assert!(y.iter().zip(&x).any(|(a, b)| (a - b).abs() > 1e-6));
    }
}
