//! Siphons, boundary faces, and separation certificates.
//!
//! The face `F_S` is the set of nonnegative points with support exactly `S`.
//! It is invariant (tangent) precisely when `S^c` is a siphon. A certificate
//! `w > 0` supported in `S^c` with `Γᵀw = 0` shows that no stoichiometry
//! class through a positive point reaches the closure of `F_S`.

use num::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, Rational, RationalMatrix};
use crate::network::Network;
use crate::simplex;

/// Largest species count for exhaustive siphon enumeration.
pub const MAX_SIPHON_SPECIES: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PersistenceError {
    #[error("siphon enumeration supports at most {max} species, network has {n}")]
    TooManySpecies { n: usize, max: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Siphon {
    pub species: Vec<usize>,
    pub names: Vec<String>,
    pub minimal: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FaceStatus {
    Repelling,
    Tangent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TriState {
    Yes,
    No,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceVerdict {
    pub face_set: Vec<usize>,
    pub status: FaceStatus,
    #[serde(with = "linalg::serde_opt_vec")]
    pub separation_certificate: Option<Vec<Rational>>,
    pub intersects_nontrivial_classes: TriState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum A6Route {
    #[serde(rename = "A6(i)")]
    AllReversible,
    #[serde(rename = "A6(ii)")]
    SiphonFaces,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiphonReport {
    pub minimal_siphons: Vec<Siphon>,
    pub verdicts: Vec<FaceVerdict>,
    pub a6_holds: bool,
    pub via: A6Route,
}

/// Implications `Σ ∩ a ≠ ∅ ⇒ Σ ∩ b ≠ ∅`, one per producing side.
fn siphon_rules(net: &Network) -> Vec<(u32, u32)> {
    let mask = |side: &std::collections::BTreeMap<usize, u32>| {
        side.keys().fold(0u32, |m, &i| m | (1 << i))
    };
    let mut rules = Vec::new();
    for r in net.reactions() {
        let (l, rt) = (mask(&r.left), mask(&r.right));
        rules.push((rt, l));
        if r.reversible {
            rules.push((l, rt));
        }
    }
    rules
}

fn satisfies(rules: &[(u32, u32)], set: u32) -> bool {
    rules.iter().all(|&(a, b)| set & a == 0 || set & b != 0)
}

fn from_mask(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|i| mask & (1 << i) != 0).collect()
}

/// Every reaction able to produce a member of `set` has a member of `set`
/// on its opposite side.
pub fn is_siphon(net: &Network, set: &[usize]) -> bool {
    let in_set = |i: &usize| set.contains(i);
    net.reactions().iter().all(|r| {
        let forward = !r.right.keys().any(in_set) || r.left.keys().any(in_set);
        let backward = !r.reversible || !r.left.keys().any(in_set) || r.right.keys().any(in_set);
        forward && backward
    })
}

/// All inclusion-minimal nonempty proper siphons, ordered lexicographically
/// by member list.
pub fn enumerate_minimal_siphons(net: &Network) -> Result<Vec<Siphon>, PersistenceError> {
    let n = net.n_species();
    if n > MAX_SIPHON_SPECIES {
        return Err(PersistenceError::TooManySpecies {
            n,
            max: MAX_SIPHON_SPECIES,
        });
    }
    let rules = siphon_rules(net);
    let full: u32 = if n == 32 { u32::MAX } else { (1 << n) - 1 };
    let mut minimal: Vec<u32> = Vec::new();
    // Increasing cardinality, so any siphon containing none of the earlier
    // finds is minimal.
    let mut by_size: Vec<u32> = (1..full).collect();
    by_size.sort_by_key(|m| (m.count_ones(), *m));
    for set in by_size {
        if minimal.iter().any(|&m| m & !set == 0) {
            continue;
        }
        if satisfies(&rules, set) {
            minimal.push(set);
        }
    }
    let mut out: Vec<Siphon> = minimal
        .into_iter()
        .map(|m| {
            let species = from_mask(m, n);
            let names = species.iter().map(|&i| net.species_name(i).to_string()).collect();
            Siphon {
                species,
                names,
                minimal: true,
            }
        })
        .collect();
    out.sort_by(|a, b| a.species.cmp(&b.species));
    Ok(out)
}

/// Every nonzero column has entries of both signs.
pub fn is_mixed_column(m: &RationalMatrix) -> bool {
    (0..m.cols()).all(|j| {
        let col = m.column(j);
        let pos = col.iter().any(Signed::is_positive);
        let neg = col.iter().any(Signed::is_negative);
        pos == neg
    })
}

/// `(I − P^S)Γ`: Γ with the rows indexed by `s` zeroed.
pub fn off_face_rows(gamma: &RationalMatrix, s: &[usize]) -> RationalMatrix {
    let mut out = gamma.clone();
    for &i in s {
        for j in 0..out.cols() {
            out[(i, j)] = Rational::zero();
        }
    }
    out
}

fn complement(n: usize, s: &[usize]) -> Vec<usize> {
    (0..n).filter(|i| !s.contains(i)).collect()
}

/// Tangent or repelling status of `F_S` for a proper nonempty `S`.
pub fn face_status(net: &Network, gamma: &RationalMatrix, s: &[usize]) -> FaceStatus {
    let tangent = if net.all_reversible() {
        is_mixed_column(&off_face_rows(gamma, s))
    } else {
        is_siphon(net, &complement(net.n_species(), s))
    };
    if tangent {
        FaceStatus::Tangent
    } else {
        FaceStatus::Repelling
    }
}

/// A vector `w > 0` supported in `S^c` with `Γᵀw = 0`, if one exists.
pub fn separation_certificate(gamma: &RationalMatrix, s: &[usize]) -> Option<Vec<Rational>> {
    simplex::nonneg_kernel_certificate(gamma, &complement(gamma.rows(), s))
}

/// `(I − P^S)w > 0` and `Γᵀ(I − P^S)w = 0`, by substitution.
pub fn verify_separation(gamma: &RationalMatrix, s: &[usize], w: &[Rational]) -> bool {
    if w.len() != gamma.rows() {
        return false;
    }
    let mut projected = w.to_vec();
    for &i in s {
        if i < projected.len() {
            projected[i] = Rational::zero();
        }
    }
    let support = complement(gamma.rows(), s);
    simplex::verify_nonneg_kernel(gamma, &support, &projected)
}

/// Decides the boundary condition. All-reversible networks pass outright;
/// otherwise every minimal-siphon face must carry a separation certificate.
pub fn check_a6(net: &Network) -> Result<SiphonReport, PersistenceError> {
    let gamma = net.stoichiometric_matrix();
    let n = net.n_species();
    let reversible = net.all_reversible();
    if reversible && n > MAX_SIPHON_SPECIES {
        return Ok(SiphonReport {
            minimal_siphons: Vec::new(),
            verdicts: Vec::new(),
            a6_holds: true,
            via: A6Route::AllReversible,
        });
    }
    let minimal_siphons = enumerate_minimal_siphons(net)?;
    let verdicts: Vec<FaceVerdict> = minimal_siphons
        .par_iter()
        .map(|sigma| {
            let face_set = complement(n, &sigma.species);
            let status = face_status(net, &gamma, &face_set);
            let cert = simplex::nonneg_kernel_certificate(&gamma, &sigma.species);
            // Without a certificate, Gordan's alternative gives y with
            // (Γy)_Σ ≫ 0, which carries a positive point onto the face.
            let intersects = if cert.is_some() { TriState::No } else { TriState::Yes };
            FaceVerdict {
                face_set,
                status,
                separation_certificate: cert,
                intersects_nontrivial_classes: intersects,
            }
        })
        .collect();
    let certified = verdicts
        .iter()
        .all(|v| v.status == FaceStatus::Repelling || v.separation_certificate.is_some());
    Ok(SiphonReport {
        minimal_siphons,
        verdicts,
        a6_holds: reversible || certified,
        via: if reversible {
            A6Route::AllReversible
        } else {
            A6Route::SiphonFaces
        },
    })
}
