//! The partial order generated by the cone K(Λ) = {Λy : y ≥ 0}.
//!
//! Λ has full column rank, so every v ∈ Im Λ has unique coordinates `L·v`
//! for any left inverse `L`. All order questions reduce to sign checks on
//! those coordinates.

use num::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::factorization::Factorization;
use crate::linalg::{self, LinalgError, Rational, RationalMatrix};
use crate::simplex::{self, LpOutcome};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("points do not lie in a common Λ-class")]
    NotSameClass,
    #[error("point has a negative coordinate")]
    NegativePoint,
    #[error("class infimum LP is {0}; the cone meets the nonpositive orthant")]
    LpFailure(&'static str),
    #[error("LP optimum is not below sampled class member {0}")]
    NotMinimal(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeOrder {
    lambda: RationalMatrix,
    left_inverse: RationalMatrix,
}

impl ConeOrder {
    /// Fails if Λ lacks full column rank.
    pub fn new(lambda: RationalMatrix) -> Result<ConeOrder, OrderError> {
        // L = (ΛᵀΛ)⁻¹Λᵀ, one column at a time.
        let lt = lambda.transpose();
        let gram = lt.mul(&lambda)?;
        let mut cols = Vec::with_capacity(lambda.rows());
        for i in 0..lambda.rows() {
            let col = gram
                .solve(&lt.column(i))?
                .expect("a full-rank Gram matrix is invertible");
            cols.push(col);
        }
        let left_inverse = if cols.is_empty() {
            RationalMatrix::zeros(lambda.cols(), 0)
        } else {
            RationalMatrix::from_columns(&cols)?
        };
        debug_assert_eq!(
            left_inverse.mul(&lambda).ok(),
            Some(RationalMatrix::identity(lambda.cols()))
        );
        Ok(ConeOrder { lambda, left_inverse })
    }

    pub fn lambda(&self) -> &RationalMatrix {
        &self.lambda
    }

    pub fn left_inverse(&self) -> &RationalMatrix {
        &self.left_inverse
    }

    pub fn dim(&self) -> usize {
        self.lambda.rows()
    }

    /// Coordinates of `v` in the columns of Λ, if `v ∈ Im Λ`.
    pub fn coordinates(&self, v: &[Rational]) -> Result<Option<Vec<Rational>>, OrderError> {
        let t = self.left_inverse.mul_vec(v)?;
        Ok((self.lambda.mul_vec(&t)? == v).then_some(t))
    }

    pub fn cone_contains(&self, v: &[Rational]) -> Result<bool, OrderError> {
        Ok(self
            .coordinates(v)?
            .is_some_and(|t| t.iter().all(|x| !x.is_negative())))
    }

    /// `x ⪯ y`, i.e. `y − x ∈ K(Λ)`.
    pub fn precedes(&self, x: &[Rational], y: &[Rational]) -> Result<bool, OrderError> {
        self.cone_contains(&linalg::sub(y, x))
    }

    /// `x ∼Λ y`, i.e. `y − x ∈ Im Λ`.
    pub fn same_class(&self, x: &[Rational], y: &[Rational]) -> Result<bool, OrderError> {
        Ok(self.coordinates(&linalg::sub(y, x))?.is_some())
    }

    fn combine(
        &self,
        c: &[Rational],
        x: &[Rational],
        y: &[Rational],
        pick: fn(&Rational, &Rational) -> Rational,
    ) -> Result<Vec<Rational>, OrderError> {
        let tx = self.coordinates(&linalg::sub(x, c))?.ok_or(OrderError::NotSameClass)?;
        let ty = self.coordinates(&linalg::sub(y, c))?.ok_or(OrderError::NotSameClass)?;
        let t: Vec<Rational> = tx.iter().zip(&ty).map(|(a, b)| pick(a, b)).collect();
        Ok(linalg::add(c, &self.lambda.mul_vec(&t)?))
    }

    /// Greatest lower bound of `x` and `y` within the Λ-class of `c`.
    pub fn meet(&self, c: &[Rational], x: &[Rational], y: &[Rational]) -> Result<Vec<Rational>, OrderError> {
        self.combine(c, x, y, |a, b| a.min(b).clone())
    }

    /// Least upper bound of `x` and `y` within the Λ-class of `c`.
    pub fn join(&self, c: &[Rational], x: &[Rational], y: &[Rational]) -> Result<Vec<Rational>, OrderError> {
        self.combine(c, x, y, |a, b| a.max(b).clone())
    }
}

/// The increasing first integral H(x) = p_θᵀx.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Integral {
    pub y_theta: Vec<Rational>,
    pub p_theta: Vec<Rational>,
}

impl Integral {
    pub fn h(&self, x: &[Rational]) -> Rational {
        linalg::dot(&self.p_theta, x)
    }

    pub fn h_f64(&self, x: &[f64]) -> f64 {
        self.p_theta
            .iter()
            .zip(x)
            .map(|(p, v)| linalg::to_f64(p) * v)
            .sum()
    }
}

/// Canonical sparse solution of Λᵀp = y_θ: the lowest-index row of each
/// class carries the whole weight.
pub fn integral(f: &Factorization) -> Integral {
    let n = f.lambda.rows();
    let mut p = vec![Rational::zero(); n];
    for (k, class) in f.row_partition.iter().enumerate() {
        let i = class[0];
        p[i] = &f.y_theta[k] / &f.lambda[(i, k)];
    }
    Integral {
        y_theta: f.y_theta.clone(),
        p_theta: p,
    }
}

/// K(Λ) meets the nonpositive orthant only at 0. For Λ with one nonzero per
/// row this holds iff every column has a positive entry.
pub fn check_a5(lambda: &RationalMatrix) -> bool {
    (0..lambda.cols()).all(|k| lambda.column(k).iter().any(Signed::is_positive))
}

/// Number of class members drawn to confirm an infimum.
pub const INFIMUM_SAMPLES: usize = 32;

/// Bounds on t in {t : c + Λt ≥ 0}, which is a box since each row of Λ
/// touches one coordinate. Upper bounds are `None` when unbounded.
fn class_box(lambda: &RationalMatrix, c: &[Rational]) -> Vec<(Option<Rational>, Option<Rational>)> {
    let mut bounds = vec![(None::<Rational>, None::<Rational>); lambda.cols()];
    for i in 0..lambda.rows() {
        for k in 0..lambda.cols() {
            let l = &lambda[(i, k)];
            if l.is_zero() {
                continue;
            }
            let b = -&c[i] / l;
            let slot = if l.is_positive() { &mut bounds[k].0 } else { &mut bounds[k].1 };
            let tighter = match slot {
                None => true,
                Some(cur) => {
                    if l.is_positive() {
                        b > *cur
                    } else {
                        b < *cur
                    }
                }
            };
            if tighter {
                *slot = Some(b);
            }
        }
    }
    bounds
}

/// Least element of {x ≥ 0 : x ∼Λ c} in the K(Λ) order.
///
/// Minimizes H over the class by exact LP, then confirms the optimum lies
/// below `c` and below [`INFIMUM_SAMPLES`] random class members.
pub fn class_infimum(order: &ConeOrder, integral: &Integral, c: &[Rational]) -> Result<Vec<Rational>, OrderError> {
    let (n, r) = order.lambda.shape();
    if c.len() != n {
        return Err(LinalgError::DimensionMismatch {
            op: "class_infimum",
            left: (n, r),
            right: (c.len(), 1),
        }
        .into());
    }
    if c.iter().any(Signed::is_negative) {
        return Err(OrderError::NegativePoint);
    }
    // Variables t⁺ (r), t⁻ (r), s (n): Λt⁺ − Λt⁻ − s = −c.
    let mut a = RationalMatrix::zeros(n, 2 * r + n);
    for i in 0..n {
        for k in 0..r {
            a[(i, k)] = order.lambda[(i, k)].clone();
            a[(i, r + k)] = -&order.lambda[(i, k)];
        }
        a[(i, 2 * r + i)] = -Rational::one();
    }
    let b: Vec<Rational> = c.iter().map(|v| -v).collect();
    let mut cost = vec![Rational::zero(); 2 * r + n];
    for k in 0..r {
        cost[k] = integral.y_theta[k].clone();
        cost[r + k] = -&integral.y_theta[k];
    }
    let t: Vec<Rational> = match simplex::minimize(&cost, &a, &b) {
        LpOutcome::Optimal { x, .. } => (0..r).map(|k| &x[k] - &x[r + k]).collect(),
        LpOutcome::Infeasible => return Err(OrderError::LpFailure("infeasible")),
        LpOutcome::Unbounded => return Err(OrderError::LpFailure("unbounded")),
    };
    let z = linalg::add(c, &order.lambda.mul_vec(&t)?);

    if !order.precedes(&z, c)? {
        return Err(OrderError::NotMinimal(0));
    }
    let bounds = class_box(&order.lambda, c);
    let mut rng = ChaCha8Rng::seed_from_u64(0x1f_0a_5e_ed);
    for s in 0..INFIMUM_SAMPLES {
        let t: Vec<Rational> = bounds
            .iter()
            .map(|(lo, hi)| {
                let lo = lo.clone().unwrap_or_else(Rational::zero);
                let u = linalg::frac(rng.gen_range(0..=64), 64);
                match hi {
                    Some(hi) => &lo + u * (hi - &lo),
                    None => &lo + u * linalg::int(4),
                }
            })
            .collect();
        let member = linalg::add(c, &order.lambda.mul_vec(&t)?);
        debug_assert!(member.iter().all(|v| !v.is_negative()));
        if !order.precedes(&z, &member)? {
            return Err(OrderError::NotMinimal(s + 1));
        }
    }
    Ok(z)
}
