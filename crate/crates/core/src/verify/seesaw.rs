//! Alternating optimization over product vectors `|a⟩|b⟩`.
//!
//! Both searches optimize a quadratic form in `a` for fixed `b` and vice
//! versa, so every half-step is an extremal eigenvector problem on a
//! `d_A × d_A` or `d_B × d_B` matrix. Restart `r` draws its starting point
//! from `ChaCha8Rng::seed_from_u64(seed + r)`; restarts run in parallel and
//! are merged by index, so the result does not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::{Certificate, Confidence, SeesawConfig, Status};
use crate::linalg::{hermitian_eig, tensor, ComplexMatrix, Ket, Subspace, C64};
use crate::{Error, Result};

pub(super) fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Ket {
    let amps = (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            C64::new(re, im)
        })
        .collect();
    Ket::new(amps).normalized()
}

/// `(I ⊗ ⟨b|) Q (I ⊗ |b⟩)`.
pub(super) fn contract_b(q: &ComplexMatrix, d_a: usize, d_b: usize, b: &Ket) -> ComplexMatrix {
    ComplexMatrix::from_fn(d_a, d_a, |i, k| {
        let mut s = C64::new(0.0, 0.0);
        for j in 0..d_b {
            let bj = b[j].conj();
            for l in 0..d_b {
                s += bj * q[(i * d_b + j, k * d_b + l)] * b[l];
            }
        }
        s
    })
    .hermitian_part()
}

/// `(⟨a| ⊗ I) Q (|a⟩ ⊗ I)`.
pub(super) fn contract_a(q: &ComplexMatrix, d_a: usize, d_b: usize, a: &Ket) -> ComplexMatrix {
    ComplexMatrix::from_fn(d_b, d_b, |j, l| {
        let mut s = C64::new(0.0, 0.0);
        for i in 0..d_a {
            let ai = a[i].conj();
            for k in 0..d_a {
                s += ai * q[(i * d_b + j, k * d_b + l)] * a[k];
            }
        }
        s
    })
    .hermitian_part()
}

/// Top (`maximize`) or bottom eigenpair.
pub(super) fn extremal(m: &ComplexMatrix, maximize: bool) -> Result<(f64, Ket)> {
    let e = hermitian_eig(m)?;
    let idx = if maximize { e.values.len() - 1 } else { 0 };
    Ok((e.values[idx], e.vectors[idx].clone()))
}

/// Best point reached by one restart.
#[derive(Clone, Debug, Serialize)]
pub struct ProductSearch {
    pub value: f64,
    pub restart: usize,
    pub iterations: usize,
    pub a: Ket,
    pub b: Ket,
}

/// Runs every restart and keeps the best value, breaking
/// ties by the lower restart index.
pub(super) fn run_restarts<F>(cfg: &SeesawConfig, maximize: bool, run: F) -> Result<ProductSearch>
where
    F: Fn(usize, &mut ChaCha8Rng) -> Result<ProductSearch> + Sync,
{
    cfg.validate()?;
    let results: Vec<ProductSearch> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(r as u64));
            run(r, &mut rng)
        })
        .collect::<Result<_>>()?;
    let mut best = results[0].clone();
    for res in &results[1..] {
        let improves = if maximize { res.value > best.value } else { res.value < best.value };
        if improves {
            best = res.clone();
        }
    }
    Ok(best)
}

/// Maximizes `⟨a⊗b|P_S|a⊗b⟩` over unit product vectors.
pub fn max_product_overlap(s: &Subspace, d_a: usize, d_b: usize, cfg: &SeesawConfig) -> Result<ProductSearch> {
    if s.ambient_dim() != d_a * d_b {
        return Err(Error::DimensionMismatch { expected: d_a * d_b, found: s.ambient_dim() });
    }
    let p = s.projector();
    run_restarts(cfg, true, |restart, rng| {
        let mut a = random_unit(rng, d_a);
        let mut b = random_unit(rng, d_b);
        let mut value = p.expectation(&tensor(&a, &b)).re;
        let mut iterations = 0;
        for it in 0..cfg.max_iters {
            iterations = it + 1;
            a = extremal(&contract_b(&p, d_a, d_b, &b), true)?.1;
            let (f, nb) = extremal(&contract_a(&p, d_a, d_b, &a), true)?;
            b = nb;
            let converged = (f - value).abs() < cfg.tol_converge || f > 1.0 - cfg.tol_found;
            value = f;
            if converged {
                break;
            }
        }
        Ok(ProductSearch { value, restart, iterations, a, b })
    })
}

/// Heuristic search for a product vector inside `S`. Fails with the vector
/// when the overlap exceeds `1 - tol_found`, passes as evidence when every
/// restart stays below `1 - tol_absent`, and is inconclusive in between.
pub fn search_product_in_subspace(s: &Subspace, d_a: usize, d_b: usize, cfg: &SeesawConfig) -> Result<Certificate> {
    let best = max_product_overlap(s, d_a, d_b, cfg)?;
    let (status, confidence) = if best.value > 1.0 - cfg.tol_found {
        (Status::Fail, Confidence::Proof)
    } else if best.value < 1.0 - cfg.tol_absent {
        (Status::Pass, Confidence::Evidence)
    } else {
        (Status::Inconclusive, Confidence::Evidence)
    };
    let mut witnesses = json!({
        "max_overlap": best.value,
        "gap": 1.0 - best.value,
        "best_restart": best.restart,
        "iterations": best.iterations,
    });
    if status == Status::Fail {
        witnesses["product_a"] = json!(best.a);
        witnesses["product_b"] = json!(best.b);
    }
    Ok(Certificate::new(
        format!("the {}-dimensional subspace of C^{d_a} ⊗ C^{d_b} contains no product vector", s.dim()),
        status,
        confidence,
        witnesses,
        cfg.to_json(),
    ))
}
