//! Edge-state check by range criterion.
//!
//! A PPT state `δ` is an edge state iff no `|a⟩|b⟩ ∈ R(δ)` has
//! `|a⟩|b*⟩ ∈ R(δ^{T_B})`. With `Q_R`, `Q_T` the projectors onto the
//! complements of the two ranges this is `min g(a, b) > 0` for
//! `g = ⟨a b|Q_R|a b⟩ + ⟨a b*|Q_T|a b*⟩`. Using `⟨b*|M|b*⟩ = ⟨b|M*|b⟩`
//! each half-step is a bottom-eigenvector problem.

use serde_json::json;

use super::seesaw::{contract_a, contract_b, extremal, random_unit, run_restarts, ProductSearch};
use super::{tol, Certificate, Confidence, SeesawConfig, Status};
use crate::linalg::{hermitian_eig, range_basis, ComplexMatrix, Ket};
use crate::states::DensityMatrix;
use crate::tiles::Party;
use crate::{Error, Result};

fn complement_projector(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = m.rows();
    let range = range_basis(m)?;
    Ok(&ComplexMatrix::identity(n) - &ComplexMatrix::projector_onto(&range, n))
}

fn objective(q_r: &ComplexMatrix, q_t: &ComplexMatrix, a: &Ket, b: &Ket) -> f64 {
    let x = crate::linalg::tensor(a, b);
    let y = crate::linalg::tensor(a, &b.conj());
    q_r.expectation(&x).re + q_t.expectation(&y).re
}

/// Fails with a witness when some `g(a, b) < tol_found`, passes as evidence
/// when every restart ends above `tol_absent`. Non-PPT input is rejected.
pub fn check_edge(rho: &DensityMatrix, cfg: &SeesawConfig) -> Result<Certificate> {
    let (d_a, d_b) = (rho.d_a, rho.d_b);
    let pt = rho.partial_transpose(Party::B).hermitian_part();
    let min_pt = hermitian_eig(&pt)?.min();
    if min_pt < -tol::SPECTRAL {
        return Err(Error::Precondition(format!(
            "edge check needs a PPT state; {} has partial-transpose eigenvalue {min_pt:.3e}",
            rho.label
        )));
    }
    let q_r = complement_projector(&rho.matrix)?;
    let q_t = complement_projector(&pt)?;

    let best: ProductSearch = run_restarts(cfg, false, |restart, rng| {
        let mut a = random_unit(rng, d_a);
        let mut b = random_unit(rng, d_b);
        let mut value = f64::INFINITY;
        let mut iterations = 0;
        for it in 0..cfg.max_iters {
            iterations = it + 1;
            let ma = &contract_b(&q_r, d_a, d_b, &b) + &contract_b(&q_t, d_a, d_b, &b.conj());
            a = extremal(&ma, false)?.1;
            let mb = &contract_a(&q_r, d_a, d_b, &a) + &contract_a(&q_t, d_a, d_b, &a).conj();
            let (g, nb) = extremal(&mb, false)?;
            b = nb;
            let converged = (value - g).abs() < cfg.tol_converge || g < cfg.tol_found;
            value = g;
            if converged {
                break;
            }
        }
        let value = objective(&q_r, &q_t, &a, &b).max(0.0);
        Ok(ProductSearch { value, restart, iterations, a, b })
    })?;

    let (status, confidence) = if best.value < cfg.tol_found {
        (Status::Fail, Confidence::Proof)
    } else if best.value > cfg.tol_absent {
        (Status::Pass, Confidence::Evidence)
    } else {
        (Status::Inconclusive, Confidence::Evidence)
    };
    let mut witnesses = json!({
        "min_objective": best.value,
        "best_restart": best.restart,
        "iterations": best.iterations,
        "range_rank": rho.dim() - (q_r.trace().re.round() as usize),
        "pt_range_rank": rho.dim() - (q_t.trace().re.round() as usize),
    });
    if status == Status::Fail {
        witnesses["product_a"] = json!(best.a);
        witnesses["product_b"] = json!(best.b);
    }
    Ok(Certificate::new(
        format!("{} is an edge state", rho.label),
        status,
        confidence,
        witnesses,
        cfg.to_json(),
    ))
}
