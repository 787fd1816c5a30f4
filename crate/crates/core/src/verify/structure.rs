use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{status_of, tol, Certificate, Confidence};
use crate::linalg::{hermitian_eig, numeric_rank, range_basis, ComplexMatrix, Subspace, C64};
use crate::states::{self, DensityMatrix, SigmaFactor};
use crate::tiles::{self, Party, ProductState, Upb, Variant};
use crate::{Error, Result};

fn labels(states: &[ProductState]) -> Vec<&str> {
    states.iter().map(|s| s.label.as_str()).collect()
}

/// Pass iff every pair of normalized states overlaps by less than `tol`.
pub fn check_orthogonality(states: &[ProductState], tol: f64) -> Result<Certificate> {
    if states.is_empty() {
        return Err(Error::Argument("orthogonality check needs at least one state".into()));
    }
    let mut worst = (0.0_f64, None);
    for (i, s) in states.iter().enumerate() {
        for t in &states[i + 1..] {
            let ov = s.normalized_inner(t).norm();
            if ov > worst.0 {
                worst = (ov, Some((s.label.clone(), t.label.clone())));
            }
        }
    }
    let ok = worst.0 < tol;
    Ok(Certificate::new(
        format!("{} product states are pairwise orthogonal", states.len()),
        status_of(ok),
        Confidence::Proof,
        json!({
            "count": states.len(),
            "max_overlap": worst.0,
            "worst_pair": worst.1.map(|(a, b)| vec![a, b]),
        }),
        json!({ "tol": tol }),
    ))
}

/// Gram matrix of the normalized states.
fn gram(states: &[ProductState]) -> ComplexMatrix {
    let n = states.len();
    // exact Hermiticity for the eigensolver
    ComplexMatrix::from_fn(n, n, |i, j| states[i].normalized_inner(&states[j])).hermitian_part()
}

/// Pass iff there are exactly `d²` states and their Gram matrix has full rank.
pub fn check_completeness(states: &[ProductState], d: usize) -> Result<Certificate> {
    let n = d * d;
    let rank = if states.is_empty() { 0 } else { numeric_rank(&gram(states), tol::SPECTRAL) };
    Ok(Certificate::new(
        format!("product states form a complete basis of C^{d} ⊗ C^{d}"),
        status_of(states.len() == n && rank == n),
        Confidence::Proof,
        json!({ "count": states.len(), "gram_rank": rank, "required": n, "labels": labels(states) }),
        json!({ "d": d, "rank_tol": tol::SPECTRAL }),
    ))
}

/// Pass iff the smallest eigenvalue of `ρ^{T_B}` is at least `-tol`.
pub fn check_ppt(rho: &DensityMatrix, tol: f64) -> Result<Certificate> {
    let spectrum = hermitian_eig(&rho.partial_transpose(Party::B))?.values;
    let min = spectrum.first().copied().unwrap_or(0.0);
    Ok(Certificate::new(
        format!("{} has positive partial transpose", rho.label),
        status_of(min >= -tol),
        Confidence::Proof,
        json!({ "min_eigenvalue": min, "pt_spectrum": spectrum }),
        json!({ "tol": tol }),
    ))
}

pub fn check_rank(rho: &DensityMatrix, expected: usize) -> Result<Certificate> {
    let rank = numeric_rank(&rho.matrix, tol::SPECTRAL);
    Ok(Certificate::new(
        format!("{} has rank {expected}", rho.label),
        status_of(rank == expected),
        Confidence::Proof,
        json!({ "rank": rank, "expected": expected }),
        json!({ "rank_tol": tol::SPECTRAL }),
    ))
}

/// `(d-1)² + 1` states: the tile members plus the stopper.
pub fn check_member_count(upb: &Upb) -> Result<Certificate> {
    let expected = (upb.d - 1) * (upb.d - 1) + 1;
    Ok(Certificate::new(
        format!("the d = {} tiles UPB has {expected} states", upb.d),
        status_of(upb.len() == expected),
        Confidence::Proof,
        json!({ "count": upb.len(), "expected": expected, "members": upb.members.len() }),
        json!({ "d": upb.d, "variant": upb.variant }),
    ))
}

/// Compares the spectrum of `ρ^{T_B}` with an expected multiset given as
/// `(value, multiplicity)` pairs covering the whole dimension.
pub fn check_pt_spectrum(rho: &DensityMatrix, expected: &[(f64, usize)], tol: f64) -> Result<Certificate> {
    let spectrum = hermitian_eig(&rho.partial_transpose(Party::B))?.values;
    let mut want: Vec<f64> = expected.iter().flat_map(|&(v, m)| std::iter::repeat_n(v, m)).collect();
    want.sort_by(f64::total_cmp);
    let max_dev = if want.len() == spectrum.len() {
        spectrum.iter().zip(&want).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    let counts: Vec<Value> = expected
        .iter()
        .map(|&(v, m)| json!({ "value": v, "expected": m, "found": spectrum.iter().filter(|x| (*x - v).abs() < tol).count() }))
        .collect();
    Ok(Certificate::new(
        format!("partial transpose of {} has the forced spectrum", rho.label),
        status_of(max_dev < tol),
        Confidence::Proof,
        json!({ "max_deviation": if max_dev.is_finite() { json!(max_dev) } else { Value::Null }, "multiplicities": counts }),
        json!({ "tol": tol }),
    ))
}

/// The entangled basis is orthonormal, orthogonal to the UPB, completes it
/// to the identity, and its blocks of four reproduce `4 σ_m`.
pub fn check_entangled_basis(d: usize, variant: Variant) -> Result<Certificate> {
    let basis = states::entangled_basis(d)?;
    let upb = tiles::upb(d, variant)?;
    let n = d * d;
    let mut gram_dev = 0.0_f64;
    for (i, u) in basis.iter().enumerate() {
        for (j, v) in basis.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            gram_dev = gram_dev.max((u.inner(v) - C64::new(want, 0.0)).norm());
        }
    }
    let upb_overlap = upb
        .all_states()
        .iter()
        .map(|s| s.normalized_ket())
        .flat_map(|k| basis.iter().map(move |v| k.inner(v).norm()))
        .fold(0.0, f64::max);
    let q = ComplexMatrix::projector_onto(&basis, n);
    let completion = (&(&q + &states::upb_projector(&upb)?) - &ComplexMatrix::identity(n)).frobenius_norm();
    let mut block_residual = 0.0_f64;
    for m in 1..=(d - 1) / 2 {
        let block = ComplexMatrix::projector_onto(&basis[4 * (m - 1)..4 * m], n).scale(0.25);
        block_residual = block_residual.max((&block - &states::sigma(d, m)?.state.matrix).frobenius_norm());
    }
    let ok = basis.len() == 2 * (d - 1)
        && gram_dev < tol::SPECTRAL
        && upb_overlap < tol::SUPPORT
        && completion < tol::SPECTRAL
        && block_residual < tol::SPECTRAL;
    Ok(Certificate::new(
        format!("the {} entangled basis vectors span the complement of the UPB layer by layer", basis.len()),
        status_of(ok),
        Confidence::Proof,
        json!({
            "count": basis.len(),
            "gram_deviation": gram_dev,
            "max_upb_overlap": upb_overlap,
            "completion_residual": completion,
            "max_block_residual": block_residual,
        }),
        json!({ "d": d, "variant": variant }),
    ))
}

/// Largest `|⟨u|v⟩|` between the ranges of two Hermitian matrices.
fn range_cross_overlap(x: &ComplexMatrix, y: &ComplexMatrix) -> Result<f64> {
    let rx = range_basis(x)?;
    let ry = range_basis(y)?;
    Ok(rx.iter().flat_map(|u| ry.iter().map(move |v| u.inner(v).norm())).fold(0.0, f64::max))
}

/// Pass iff `‖ρ - Σ w_i σ_i‖_F < 1e-9` and the ranges of the `σ_i` are
/// pairwise orthogonal.
pub fn check_decomposition_of(rho: &DensityMatrix, factors: &[DensityMatrix], weights: &[f64]) -> Result<Certificate> {
    if factors.len() != weights.len() || factors.is_empty() {
        return Err(Error::Argument("need one weight per factor".into()));
    }
    let n = rho.dim();
    let mut sum = ComplexMatrix::zeros(n, n);
    for (f, &w) in factors.iter().zip(weights) {
        if f.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: f.dim() });
        }
        sum = &sum + &f.matrix.scale(w);
    }
    let residual = (&rho.matrix - &sum).frobenius_norm();
    let mut cross = 0.0_f64;
    for (i, f) in factors.iter().enumerate() {
        for g in &factors[i + 1..] {
            cross = cross.max(range_cross_overlap(&f.matrix, &g.matrix)?);
        }
    }
    let ok = residual < tol::SPECTRAL && cross < tol::SPECTRAL;
    Ok(Certificate::new(
        format!("{} equals the weighted sum of {} factors with orthogonal ranges", rho.label, factors.len()),
        status_of(ok),
        Confidence::Proof,
        json!({
            "residual": residual,
            "max_cross_overlap": cross,
            "factors": factors.iter().map(|f| f.label.as_str()).collect::<Vec<_>>(),
            "weights": weights,
        }),
        json!({ "tol": tol::SPECTRAL }),
    ))
}

/// `ρ_d = (2/(d-1)) Σ_m σ_m`.
pub fn check_decomposition(d: usize, variant: Variant) -> Result<Certificate> {
    let rho = states::rho_d(d, variant)?;
    let layers = (d - 1) / 2;
    let factors: Vec<DensityMatrix> =
        (1..=layers).map(|m| states::sigma(d, m).map(|s| s.state)).collect::<Result<_>>()?;
    let mut cert = check_decomposition_of(&rho, &factors, &vec![1.0 / layers as f64; layers])?;
    cert.config["d"] = json!(d);
    cert.config["variant"] = json!(variant);
    Ok(cert)
}

/// Hypothesis of the rank-4 extremality lemma for `σ_m`, with the local
/// frames taken from the factor itself.
pub fn check_extreme_rank4(sf: &SigmaFactor) -> Result<Certificate> {
    let (a, b) = sf.local_subspaces();
    check_extreme_rank4_state(&sf.state, Some((&a, &b)))
}

/// Rank 4, PPT, local ranks 3 and support inside `H'_A ⊗ H'_B`. Without
/// explicit local subspaces the ranges of the reduced states are used.
pub fn check_extreme_rank4_state(rho: &DensityMatrix, local: Option<(&Subspace, &Subspace)>) -> Result<Certificate> {
    let rank = numeric_rank(&rho.matrix, tol::SPECTRAL);
    let min_pt = hermitian_eig(&rho.partial_transpose(Party::B))?.min();
    let rho_a = rho.reduced(Party::A);
    let rho_b = rho.reduced(Party::B);
    let local_ranks = [numeric_rank(&rho_a, tol::SPECTRAL), numeric_rank(&rho_b, tol::SPECTRAL)];
    let (sa, sb) = match local {
        Some((a, b)) => (a.clone(), b.clone()),
        None => (
            Subspace::new(rho.d_a, range_basis(&rho_a)?)?,
            Subspace::new(rho.d_b, range_basis(&rho_b)?)?,
        ),
    };
    let p = sa.projector().kron(&sb.projector());
    let support_residual = (&p.matmul(&rho.matrix).matmul(&p) - &rho.matrix).frobenius_norm();
    let ok = rank == 4
        && min_pt >= -tol::SUPPORT
        && local_ranks == [3, 3]
        && sa.dim() == 3
        && sb.dim() == 3
        && support_residual < tol::SUPPORT;
    Ok(Certificate::new(
        format!("{} is a rank-4 PPT state supported on a 3 ⊗ 3 local subspace", rho.label),
        status_of(ok),
        Confidence::Proof,
        json!({
            "rank": rank,
            "min_pt_eigenvalue": min_pt,
            "local_ranks": local_ranks,
            "local_dims": [sa.dim(), sb.dim()],
            "support_residual": support_residual,
        }),
        json!({ "rank_tol": tol::SPECTRAL, "ppt_tol": tol::SUPPORT, "support_tol": tol::SUPPORT }),
    ))
}

/// Cardinality bookkeeping for UPBs in `C^5 ⊗ C^5` that contain the inner
/// 3 ⊗ 3 tiles block. A UPB of `n` states leaves a PPT entangled state of
/// rank `25 - n`; splitting off the rank-4 inner factor leaves rank
/// `21 - n`, and PPT entangled states of rank 1, 2 or 3 do not exist.
/// Records the arithmetic for `n = 17..=21`; it does not search over UPBs.
pub fn check_cardinality_constraint(d: usize) -> Result<Certificate> {
    if d != 5 {
        return Err(Error::Argument(format!("cardinality bookkeeping is only defined for d = 5, got {d}")));
    }
    let rows: Vec<Value> = (17..=21)
        .map(|n: usize| {
            let complement = d * d - n;
            let residual = complement - 4;
            json!({
                "n": n,
                "complement_rank": complement,
                "residual_factor_rank": residual,
                "consistent": !(1..=3).contains(&residual),
            })
        })
        .collect();
    let excluded: Vec<u64> = rows.iter().filter(|r| r["consistent"] == false).map(|r| r["n"].as_u64().unwrap()).collect();
    Ok(Certificate::new(
        "a 5 ⊗ 5 UPB containing the inner block has 17 or 21 states, never 18 to 20",
        status_of(excluded == [18, 19, 20]),
        Confidence::Evidence,
        json!({ "rows": rows, "excluded": excluded, "assumption": "no PPT entangled states of rank at most 3" }),
        json!({ "d": d }),
    ))
}

/// Outcome of sampling mixtures of the entangled basis projectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureScan {
    pub d: usize,
    pub samples: usize,
    pub seed: u64,
    pub npt_count: usize,
    pub npt_fraction: f64,
    pub min_pt_eigenvalues: Vec<f64>,
}

/// Smallest eigenvalue of the partial transpose of `Σ w_i |φ_i⟩⟨φ_i|`.
pub fn mixture_min_pt_eigenvalue(d: usize, weights: &[f64]) -> Result<f64> {
    let rho = states::basis_mixture(d, weights)?;
    Ok(hermitian_eig(&rho.partial_transpose(Party::B))?.min())
}

/// Random mixtures with exponential weights; sample `i` uses seed `seed + i`.
/// Records the outcome without asserting anything about it.
pub fn mixture_scan(d: usize, samples: usize, seed: u64) -> Result<MixtureScan> {
    let n = 2 * (d - 1);
    let basis = states::entangled_basis(d)?;
    let projectors: Vec<ComplexMatrix> = basis.iter().map(ComplexMatrix::projector).collect();
    let mins: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let weights = sample_probabilities(n, 1, seed.wrapping_add(i as u64)).remove(0);
            let mut m = ComplexMatrix::zeros(d * d, d * d);
            for (p, w) in projectors.iter().zip(&weights) {
                m = &m + &p.scale(*w);
            }
            let pt = crate::linalg::partial_transpose(&m, d, d, Party::B)?;
            Ok(hermitian_eig(&pt.hermitian_part())?.min())
        })
        .collect::<Result<_>>()?;
    let npt_count = mins.iter().filter(|&&x| x < -tol::SPECTRAL).count();
    Ok(MixtureScan {
        d,
        samples,
        seed,
        npt_count,
        npt_fraction: if samples == 0 { 0.0 } else { npt_count as f64 / samples as f64 },
        min_pt_eigenvalues: mins,
    })
}

/// `count` probability vectors of length `len` with exponential weights;
/// vector `i` uses seed `seed + i`.
pub fn sample_probabilities(len: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    (0..count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            let raw: Vec<f64> = (0..len).map(|_| rng.sample::<f64, _>(Exp1)).collect();
            let total: f64 = raw.iter().sum();
            raw.iter().map(|x| x / total).collect()
        })
        .collect()
}

/// `Σ_m p_m σ_m` written as block-uniform weights on the entangled basis.
pub fn family_weights(p: &[f64]) -> Vec<f64> {
    p.iter().flat_map(|&x| std::iter::repeat_n(x / 4.0, 4)).collect()
}
