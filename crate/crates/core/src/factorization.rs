//! Factorizing Γ = ΛΘ with Λ one-nonzero-per-row and Θ a signed incidence
//! matrix whose left kernel is spanned by a positive vector.
//!
//! The candidate Λ comes from the partition of Γ's rows into maximal
//! collinear classes; Θ is then forced. The only freedom left is a ±1
//! rescaling of the classes, fixed by the sign pattern of the kernel vector.

use std::fmt;

use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, LinalgError, Rational, RationalMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub lambda: RationalMatrix,
    pub theta: RationalMatrix,
    /// Diagonal of the ±1 matrix applied to the raw candidate.
    pub sign_flip: Vec<i8>,
    #[serde(with = "linalg::serde_vec")]
    pub y_theta: Vec<Rational>,
    pub row_partition: Vec<Vec<usize>>,
}

impl Factorization {
    pub fn r(&self) -> usize {
        self.theta.rows()
    }
}

/// Why no factorization of the required form was found.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum A3Failure {
    #[error("row {0} of Γ is zero")]
    ZeroRow(usize),
    #[error("ker(Θᵀ) not one-dimensional (dimension {0})")]
    KernelDimension(usize),
    #[error("ker(Θᵀ) is spanned by a vector with a zero entry (class {0}), so it contains no positive vector")]
    KernelZeroEntry(usize),
    #[error("column {0} of SΘ has more than one positive or more than one negative entry")]
    ColumnSigns(usize),
}

/// A violated clause found by [`verify_factorization`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    ProductMismatch,
    LambdaRow(usize),
    LambdaZeroColumn(usize),
    ThetaColumnSigns(usize),
    KernelDimension(usize),
    YThetaNotInKernel,
    YThetaNotPositive,
    PartitionMismatch,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ProductMismatch => write!(f, "product mismatch"),
            Violation::LambdaRow(i) => write!(f, "Λ row {i} does not have exactly one nonzero entry"),
            Violation::LambdaZeroColumn(k) => write!(f, "Λ column {k} is zero"),
            Violation::ThetaColumnSigns(j) => {
                write!(f, "Θ column {j} has two nonzero entries of equal sign")
            }
            Violation::KernelDimension(d) => write!(f, "ker(Θᵀ) has dimension {d}, expected 1"),
            Violation::YThetaNotInKernel => write!(f, "y_Θ is not in ker(Θᵀ)"),
            Violation::YThetaNotPositive => write!(f, "y_Θ is not strictly positive"),
            Violation::PartitionMismatch => write!(f, "row partition disagrees with Λ"),
        }
    }
}

fn first_nonzero(v: &[Rational]) -> Option<usize> {
    v.iter().position(|x| !x.is_zero())
}

/// Partition of row indices into maximal classes of pairwise collinear rows,
/// ordered by smallest member.
pub fn collinear_row_partition(gamma: &RationalMatrix) -> Result<Vec<Vec<usize>>, A3Failure> {
    // Normalizing each row by its first nonzero entry makes collinearity an
    // equality test.
    let mut normalized: Vec<Vec<Rational>> = Vec::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..gamma.rows() {
        let row = gamma.row(i);
        let lead = first_nonzero(row).ok_or(A3Failure::ZeroRow(i))?;
        let norm: Vec<Rational> = row.iter().map(|x| x / &row[lead]).collect();
        match normalized.iter().position(|n| *n == norm) {
            Some(k) => classes[k].push(i),
            None => {
                normalized.push(norm);
                classes.push(vec![i]);
            }
        }
    }
    Ok(classes)
}

fn satisfies_a5(lambda: &RationalMatrix) -> bool {
    (0..lambda.cols()).all(|k| lambda.column(k).iter().any(Signed::is_positive))
}

/// Runs the collinear-partition construction. On success every invariant
/// checked by [`verify_factorization`] holds.
pub fn factorize(gamma: &RationalMatrix) -> Result<Factorization, A3Failure> {
    let partition = collinear_row_partition(gamma)?;
    let (n, m) = gamma.shape();
    let r = partition.len();

    // Representative: lowest-index row scaled so its first nonzero is +1.
    // Each row's Λ entry is its factor against the representative.
    let mut lambda = RationalMatrix::zeros(n, r);
    let mut theta = RationalMatrix::zeros(r, m);
    for (k, class) in partition.iter().enumerate() {
        let rep_row = gamma.row(class[0]);
        let lead = first_nonzero(rep_row).expect("zero rows rejected above");
        let scale = rep_row[lead].clone();
        for j in 0..m {
            theta[(k, j)] = &rep_row[j] / &scale;
        }
        for &i in class {
            lambda[(i, k)] = gamma[(i, lead)].clone();
        }
    }
    debug_assert_eq!(lambda.mul(&theta).as_ref(), Ok(gamma));

    let kernel = theta.transpose().kernel_basis();
    if kernel.len() != 1 {
        return Err(A3Failure::KernelDimension(kernel.len()));
    }
    let y = &kernel[0];
    if let Some(k) = y.iter().position(Zero::is_zero) {
        return Err(A3Failure::KernelZeroEntry(k));
    }
    let mut signs: Vec<i8> = y.iter().map(|v| if v.is_positive() { 1 } else { -1 }).collect();
    let apply = |signs: &[i8]| {
        let mut l = lambda.clone();
        let mut t = theta.clone();
        for (k, &s) in signs.iter().enumerate() {
            if s < 0 {
                let minus = -Rational::one();
                l.scale_column(k, &minus);
                t.scale_row(k, &minus);
            }
        }
        (l, t)
    };
    let (mut l, mut t) = apply(&signs);
    // Either open orthant met by the kernel line gives a valid factorization;
    // take the one whose cone avoids the nonpositive orthant if only it does.
    if !satisfies_a5(&l) && satisfies_a5(&l.neg()) {
        signs.iter_mut().for_each(|s| *s = -*s);
        (l, t) = apply(&signs);
    }
    for j in 0..m {
        let col = t.column(j);
        let pos = col.iter().filter(|v| v.is_positive()).count();
        let neg = col.iter().filter(|v| v.is_negative()).count();
        if pos > 1 || neg > 1 {
            return Err(A3Failure::ColumnSigns(j));
        }
    }
    let y_theta = t
        .transpose()
        .kernel_basis()
        .pop()
        .map(|v| {
            if v.iter().all(Signed::is_negative) {
                v.iter().map(|x| -x).collect()
            } else {
                v
            }
        })
        .expect("kernel dimension is preserved by S");
    Ok(Factorization {
        lambda: l,
        theta: t,
        sign_flip: signs,
        y_theta,
        row_partition: partition,
    })
}

/// Lists every violated clause of the factorization conditions.
pub fn verify_factorization(
    gamma: &RationalMatrix,
    f: &Factorization,
) -> Result<Vec<Violation>, LinalgError> {
    let mut out = Vec::new();
    let product = f.lambda.mul(&f.theta)?;
    if product.shape() != gamma.shape() {
        return Err(LinalgError::DimensionMismatch {
            op: "verify_factorization",
            left: product.shape(),
            right: gamma.shape(),
        });
    }
    if f.y_theta.len() != f.theta.rows() {
        return Err(LinalgError::DimensionMismatch {
            op: "verify_factorization",
            left: f.theta.shape(),
            right: (f.y_theta.len(), 1),
        });
    }
    if product != *gamma {
        out.push(Violation::ProductMismatch);
    }
    let (n, r) = f.lambda.shape();
    for i in 0..n {
        if f.lambda.row(i).iter().filter(|v| !v.is_zero()).count() != 1 {
            out.push(Violation::LambdaRow(i));
        }
    }
    for k in 0..r {
        if linalg::is_zero_vec(&f.lambda.column(k)) {
            out.push(Violation::LambdaZeroColumn(k));
        }
    }
    for j in 0..f.theta.cols() {
        let col = f.theta.column(j);
        if col.iter().filter(|v| v.is_positive()).count() > 1
            || col.iter().filter(|v| v.is_negative()).count() > 1
        {
            out.push(Violation::ThetaColumnSigns(j));
        }
    }
    let dim = f.theta.rows() - f.theta.rank();
    if dim != 1 {
        out.push(Violation::KernelDimension(dim));
    }
    if !linalg::is_zero_vec(&f.theta.transpose().mul_vec(&f.y_theta)?) {
        out.push(Violation::YThetaNotInKernel);
    }
    if !f.y_theta.iter().all(Signed::is_positive) {
        out.push(Violation::YThetaNotPositive);
    }
    let partition_ok = f.row_partition.len() == r
        && f.row_partition.iter().enumerate().all(|(k, class)| {
            class
                .iter()
                .all(|&i| i < n && !f.lambda[(i, k)].is_zero())
        })
        && f.row_partition.iter().map(Vec::len).sum::<usize>() == n;
    if !partition_ok {
        out.push(Violation::PartitionMismatch);
    }
    Ok(out)
}

/// Canonical representative of (Λ, Θ) under column permutation and positive
/// column scaling of Λ (with the inverse row operations on Θ): columns
/// ordered by first nonzero row, first nonzero entry scaled to ±1.
pub fn canonical_form(
    lambda: &RationalMatrix,
    theta: &RationalMatrix,
) -> (RationalMatrix, RationalMatrix) {
    let r = lambda.cols();
    let mut order: Vec<(usize, usize)> = (0..r)
        .map(|k| (first_nonzero(&lambda.column(k)).unwrap_or(usize::MAX), k))
        .collect();
    order.sort();
    let perm: Vec<usize> = order.into_iter().map(|(_, k)| k).collect();
    let mut l = lambda.select_columns(&perm);
    let mut t = theta.select_rows(&perm);
    for k in 0..r {
        if let Some(i) = first_nonzero(&l.column(k)) {
            let s = l[(i, k)].abs();
            l.scale_column(k, &(Rational::one() / &s));
            t.scale_row(k, &s);
        }
    }
    (l, t)
}
