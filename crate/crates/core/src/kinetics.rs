//! Rate functions v(x) and their analytic Jacobians Dv(x).
//!
//! Every generated family has the form
//! `v_j = k_f ∏_{left} x_i^{a_i} − [reversible] k_r ∏_{right} x_i^{b_i}`
//! with all exponents ≥ 1, so v is C¹ on the closed orthant.

use nalgebra::{DMatrix, DVector};
use num::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::factorization::Factorization;
use crate::linalg::{self, Rational, RationalMatrix};
use crate::network::Network;
use crate::order::ConeOrder;
use crate::scc::tarjan_scc;

pub trait Kinetics: Send + Sync {
    fn n_species(&self) -> usize;
    fn n_reactions(&self) -> usize;
    /// `v(x)`, length m.
    fn rates(&self, x: &[f64]) -> DVector<f64>;
    /// `Dv(x)`, m × n.
    fn jacobian(&self, x: &[f64]) -> DMatrix<f64>;
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KineticsError {
    #[error("reaction {reaction}: rate constant must be positive and finite")]
    NonPositiveRate { reaction: usize },
    #[error("reaction {reaction}: reverse rate must be given exactly for reversible reactions")]
    ReverseMismatch { reaction: usize },
    #[error("expected {expected} rate constants, got {got}")]
    WrongCount { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KineticsKind {
    MassAction,
    PowerLaw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReactionRate {
    pub forward: f64,
    pub reverse: Option<f64>,
    /// (species, exponent) pairs.
    pub left: Vec<(usize, f64)>,
    pub right: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFunction {
    pub kind: KineticsKind,
    pub n_species: usize,
    pub reactions: Vec<ReactionRate>,
}

fn monomial(x: &[f64], terms: &[(usize, f64)]) -> f64 {
    terms.iter().map(|&(i, a)| x[i].powf(a)).product()
}

/// Adds `scale · ∂(∏ x^a)/∂x_i` into `row` for every i in `terms`.
fn add_monomial_gradient(x: &[f64], terms: &[(usize, f64)], scale: f64, row: &mut [f64]) {
    for (p, &(i, a)) in terms.iter().enumerate() {
        let mut d = a * x[i].powf(a - 1.0);
        for (q, &(k, b)) in terms.iter().enumerate() {
            if q != p {
                d *= x[k].powf(b);
            }
        }
        row[i] += scale * d;
    }
}

impl Kinetics for RateFunction {
    fn n_species(&self) -> usize {
        self.n_species
    }

    fn n_reactions(&self) -> usize {
        self.reactions.len()
    }

    fn rates(&self, x: &[f64]) -> DVector<f64> {
        DVector::from_iterator(
            self.reactions.len(),
            self.reactions.iter().map(|r| {
                let f = r.forward * monomial(x, &r.left);
                match r.reverse {
                    Some(kr) => f - kr * monomial(x, &r.right),
                    None => f,
                }
            }),
        )
    }

    fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let mut dv = DMatrix::zeros(self.reactions.len(), self.n_species);
        let mut row = vec![0.0; self.n_species];
        for (j, r) in self.reactions.iter().enumerate() {
            row.iter_mut().for_each(|v| *v = 0.0);
            add_monomial_gradient(x, &r.left, r.forward, &mut row);
            if let Some(kr) = r.reverse {
                add_monomial_gradient(x, &r.right, -kr, &mut row);
            }
            for (i, v) in row.iter().enumerate() {
                dv[(j, i)] = *v;
            }
        }
        dv
    }
}

fn check_rate(k: f64, reaction: usize) -> Result<f64, KineticsError> {
    if k.is_finite() && k > 0.0 {
        Ok(k)
    } else {
        Err(KineticsError::NonPositiveRate { reaction })
    }
}

/// Mass action with the given constants. `reverse[j]` must be `Some`
/// exactly when reaction j is reversible.
pub fn make_mass_action(net: &Network, forward: &[f64], reverse: &[Option<f64>]) -> Result<RateFunction, KineticsError> {
    let m = net.n_reactions();
    for len in [forward.len(), reverse.len()] {
        if len != m {
            return Err(KineticsError::WrongCount { expected: m, got: len });
        }
    }
    let mut reactions = Vec::with_capacity(m);
    for (j, r) in net.reactions().iter().enumerate() {
        let kf = check_rate(forward[j], j)?;
        let kr = match (r.reversible, reverse[j]) {
            (true, Some(k)) => Some(check_rate(k, j)?),
            (false, None) => None,
            _ => return Err(KineticsError::ReverseMismatch { reaction: j }),
        };
        let side = |s: &std::collections::BTreeMap<usize, u32>| s.iter().map(|(&i, &c)| (i, f64::from(c))).collect();
        reactions.push(ReactionRate {
            forward: kf,
            reverse: kr,
            left: side(&r.left),
            right: side(&r.right),
        });
    }
    Ok(RateFunction {
        kind: KineticsKind::MassAction,
        n_species: net.n_species(),
        reactions,
    })
}

/// Mass action with every rate constant equal to 1.
pub fn unit_mass_action(net: &Network) -> RateFunction {
    let forward = vec![1.0; net.n_reactions()];
    let reverse: Vec<Option<f64>> = net.reactions().iter().map(|r| r.reversible.then_some(1.0)).collect();
    make_mass_action(net, &forward, &reverse).expect("unit constants are valid")
}

pub const POWER_LAW_EXPONENTS: (f64, f64) = (1.0, 3.0);
pub const POWER_LAW_RATES: (f64, f64) = (0.5, 2.0);

/// Random power-law kinetics, deterministic in `seed`.
pub fn make_power_law(net: &Network, seed: u64) -> RateFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (elo, ehi) = POWER_LAW_EXPONENTS;
    let (klo, khi) = POWER_LAW_RATES;
    let reactions = net
        .reactions()
        .iter()
        .map(|r| {
            let mut side = |s: &std::collections::BTreeMap<usize, u32>| -> Vec<(usize, f64)> {
                s.keys().map(|&i| (i, rng.gen_range(elo..=ehi))).collect()
            };
            let left = side(&r.left);
            let right = side(&r.right);
            let forward = rng.gen_range(klo..=khi);
            let reverse = r.reversible.then(|| rng.gen_range(klo..=khi));
            ReactionRate {
                forward,
                reverse,
                left,
                right,
            }
        })
        .collect();
    RateFunction {
        kind: KineticsKind::PowerLaw,
        n_species: net.n_species(),
        reactions,
    }
}

/// `−v`: violates K1 wherever v depends on x. Used as a negative control.
#[derive(Debug, Clone)]
pub struct SignFlipped<K>(pub K);

impl<K: Kinetics> Kinetics for SignFlipped<K> {
    fn n_species(&self) -> usize {
        self.0.n_species()
    }

    fn n_reactions(&self) -> usize {
        self.0.n_reactions()
    }

    fn rates(&self, x: &[f64]) -> DVector<f64> {
        -self.0.rates(x)
    }

    fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        -self.0.jacobian(x)
    }
}

/// `Γ·v(x)`.
pub fn vector_field(gamma: &DMatrix<f64>, k: &dyn Kinetics, x: &[f64]) -> DVector<f64> {
    gamma * k.rates(x)
}

/// `Γ·Dv(x)`, n × n.
pub fn full_jacobian(gamma: &DMatrix<f64>, k: &dyn Kinetics, x: &[f64]) -> DMatrix<f64> {
    gamma * k.jacobian(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KineticsViolation {
    pub clause: String,
    pub reaction: usize,
    pub species: Option<usize>,
    pub point: Vec<f64>,
}

/// Test points: interior points plus, for each species, a point on its
/// coordinate hyperplane, plus points with random zero patterns.
pub fn sample_points(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = Vec::new();
    for _ in 0..count {
        pts.push((0..n).map(|_| rng.gen_range(0.1..3.0)).collect());
    }
    for i in 0..n {
        let mut p: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..3.0)).collect();
        p[i] = 0.0;
        pts.push(p);
    }
    for _ in 0..count {
        pts.push(
            (0..n)
                .map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.1..3.0) })
                .collect(),
        );
    }
    pts
}

/// Checks every clause of K1–K3 at the given points and lists violations.
pub fn validate_kinetics(net: &Network, k: &dyn Kinetics, points: &[Vec<f64>]) -> Vec<KineticsViolation> {
    let gamma = net.stoichiometric_matrix();
    let mut out = Vec::new();
    for x in points {
        let v = k.rates(x);
        let dv = k.jacobian(x);
        let mut flag = |clause: &str, reaction: usize, species: Option<usize>| {
            out.push(KineticsViolation {
                clause: clause.to_string(),
                reaction,
                species,
                point: x.clone(),
            })
        };
        for (j, r) in net.reactions().iter().enumerate() {
            for i in 0..net.n_species() {
                let g = &gamma[(i, j)];
                let d = dv[(j, i)];
                let ok = if g.is_zero() {
                    d == 0.0
                } else if g.is_positive() {
                    d <= 0.0
                } else {
                    d >= 0.0
                };
                if !ok {
                    flag("K1", j, Some(i));
                }
            }
            let left_zero = r.left.keys().any(|&i| x[i] == 0.0);
            let right_zero = r.right.keys().any(|&i| x[i] == 0.0);
            if !r.reversible {
                if v[j] < 0.0 || ((v[j] == 0.0) != left_zero) {
                    flag("K2(i)", j, None);
                }
                if !left_zero {
                    for &i in r.left.keys() {
                        if dv[(j, i)] <= 0.0 {
                            flag("K2(ii)", j, Some(i));
                        }
                    }
                }
            } else {
                if (left_zero && v[j] > 0.0) || (right_zero && v[j] < 0.0) {
                    flag("K3(i)", j, None);
                }
                if left_zero && ((v[j] < 0.0) != !right_zero) {
                    flag("K3(ii)", j, None);
                }
                if right_zero && ((v[j] > 0.0) != !left_zero) {
                    flag("K3(ii)", j, None);
                }
                if !left_zero {
                    for &i in r.left.keys() {
                        if dv[(j, i)] <= 0.0 {
                            flag("K3(iii)", j, Some(i));
                        }
                    }
                }
                if !right_zero {
                    for &i in r.right.keys() {
                        if dv[(j, i)] >= 0.0 {
                            flag("K3(iii)", j, Some(i));
                        }
                    }
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetzlerCheck {
    pub quasipositive: bool,
    pub irreducible: bool,
}

/// `M = Θ·Dv·Λ` in exact arithmetic. Since `J·Λ = Λ·M` for `J = Γ·Dv`, J is
/// K(Λ)-quasipositive iff M is Metzler, and strictly so when M is also
/// irreducible.
pub fn pulled_back_jacobian(f: &Factorization, dv: &DMatrix<f64>) -> RationalMatrix {
    let dv = RationalMatrix::from_f64(dv);
    f.theta
        .mul(&dv)
        .and_then(|td| td.mul(&f.lambda))
        .expect("Dv must be m × n for the factorized Γ")
}

pub fn pullback_metzler_check(f: &Factorization, dv: &DMatrix<f64>) -> MetzlerCheck {
    let m = pulled_back_jacobian(f, dv);
    let r = m.rows();
    let mut adj = vec![Vec::new(); r];
    let mut quasipositive = true;
    for a in 0..r {
        for b in 0..r {
            if a == b {
                continue;
            }
            let v = &m[(a, b)];
            if v.is_negative() {
                quasipositive = false;
            }
            if !v.is_zero() {
                adj[b].push(a);
            }
        }
    }
    MetzlerCheck {
        quasipositive,
        irreducible: r == 1 || tarjan_scc(&adj).len() == 1,
    }
}

/// Oracle for quasipositivity that never forms M: checks that
/// `(J + αI)Λ_k ∈ K(Λ)` for each extremal ray `Λ_k`, with α exceeding every
/// diagonal magnitude of the pulled-back Jacobian.
pub fn extremal_mapping_check(order: &ConeOrder, gamma: &RationalMatrix, dv: &DMatrix<f64>) -> bool {
    let j = gamma
        .mul(&RationalMatrix::from_f64(dv))
        .expect("Dv must be m × n for Γ");
    let n = j.rows();
    let abs_sum = |m: &RationalMatrix| -> Rational {
        let mut s = linalg::int(1);
        for a in 0..m.rows() {
            for b in 0..m.cols() {
                s += m[(a, b)].abs();
            }
        }
        s
    };
    // |(LJΛ)_kk| is bounded by the product of entrywise absolute sums.
    let alpha = abs_sum(&j) * abs_sum(order.left_inverse()) * abs_sum(order.lambda());
    let mut shifted = j.clone();
    for a in 0..n {
        shifted[(a, a)] += &alpha;
    }
    let lambda = order.lambda();
    (0..lambda.cols()).all(|k| {
        let image = shifted.mul_vec(&lambda.column(k)).expect("square");
        order.cone_contains(&image).unwrap_or(false)
    })
}
