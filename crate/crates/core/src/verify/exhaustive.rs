//! Exhaustive unextendibility check.
//!
//! A product vector `|a⟩|b⟩` is orthogonal to every `|a_i⟩|b_i⟩` iff the
//! members split into `S_A ∪ S_B` with `a ⊥ a_i` on `S_A` and `b ⊥ b_i` on
//! `S_B`, which is possible iff both `{a_i : i ∈ S_A}` and `{b_i : i ∈ S_B}`
//! have rank below `d`. The search walks member assignments depth first,
//! keeping orthonormal bases of both spans, and never lets either rank
//! reach `d`. A member whose factor already lies in one span is placed on
//! that side without branching: moving it there can only help.

use serde_json::json;

use super::{Certificate, Confidence, Status};
use crate::linalg::{orthonormal_complement, tensor, Ket, C64};
use crate::tiles::{self, Party, ProductState, Upb, Variant};
use crate::{Error, Result};

/// Relative residual below which a local factor counts as inside a span.
const SPAN_TOL: f64 = 1e-9;

fn residual(basis: &[Ket], v: &Ket) -> Ket {
    let mut r = v.clone();
    for _ in 0..2 {
        for u in basis {
            let c = u.inner(&r);
            r.axpy(-c, u);
        }
    }
    r
}

/// Members ordered by greedy rank growth of their A-factors.
fn novelty_order(a: &[Ket]) -> Vec<usize> {
    let mut basis: Vec<Ket> = Vec::new();
    let mut left: Vec<usize> = (0..a.len()).collect();
    let mut order = Vec::with_capacity(a.len());
    while !left.is_empty() {
        let (pos, norm) = left
            .iter()
            .enumerate()
            .map(|(p, &i)| (p, residual(&basis, &a[i]).norm()))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 + 1e-12 { x } else { acc });
        let i = left.remove(pos);
        if norm > SPAN_TOL {
            basis.push(residual(&basis, &a[i]).scale(C64::new(1.0 / norm, 0.0)));
        }
        order.push(i);
    }
    order
}

struct Search<'a> {
    d: usize,
    a: &'a [Ket],
    b: &'a [Ket],
    order: Vec<usize>,
    side: Vec<Party>,
    span_a: Vec<Ket>,
    span_b: Vec<Ket>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl Search<'_> {
    fn place(&mut self, pos: usize, i: usize, party: Party, grow: Option<Ket>) -> bool {
        self.side[i] = party;
        let span = if party == Party::A { &mut self.span_a } else { &mut self.span_b };
        let grew = grow.is_some();
        if let Some(v) = grow {
            span.push(v);
        }
        if self.descend(pos + 1) {
            return true;
        }
        if grew {
            let span = if party == Party::A { &mut self.span_a } else { &mut self.span_b };
            span.pop();
        }
        false
    }

    /// True once a violating assignment is complete; the spans then hold it.
    fn descend(&mut self, pos: usize) -> bool {
        if self.nodes >= self.budget {
            self.exhausted = true;
            return false;
        }
        self.nodes += 1;
        if pos == self.order.len() {
            return true;
        }
        let i = self.order[pos];
        let ra = residual(&self.span_a, &self.a[i]);
        let na = ra.norm();
        if na < SPAN_TOL {
            return self.place(pos, i, Party::A, None);
        }
        let rb = residual(&self.span_b, &self.b[i]);
        let nb = rb.norm();
        if nb < SPAN_TOL {
            return self.place(pos, i, Party::B, None);
        }
        if self.span_a.len() + 1 < self.d {
            let grow = ra.scale(C64::new(1.0 / na, 0.0));
            if self.place(pos, i, Party::A, Some(grow)) {
                return true;
            }
            if self.exhausted {
                return false;
            }
        }
        if self.span_b.len() + 1 < self.d {
            let grow = rb.scale(C64::new(1.0 / nb, 0.0));
            return self.place(pos, i, Party::B, Some(grow));
        }
        false
    }
}

/// Decides whether any product vector is orthogonal to all `states`.
/// Passes (proof) when none exists, fails with an explicit product vector
/// otherwise, and is inconclusive once `budget` search nodes are spent.
pub fn check_unextendible_exhaustive(states: &[ProductState], budget: u64) -> Result<Certificate> {
    let (d_a, d_b) = states.first().map(|s| s.dims()).ok_or_else(|| Error::Argument("empty state set".into()))?;
    if d_a != d_b || states.iter().any(|s| s.dims() != (d_a, d_b)) {
        return Err(Error::Argument("exhaustive search expects states in C^d ⊗ C^d".into()));
    }
    let d = d_a;
    let a: Vec<Ket> = states.iter().map(|s| s.a.normalized()).collect();
    let b: Vec<Ket> = states.iter().map(|s| s.b.normalized()).collect();
    let mut search = Search {
        d,
        a: &a,
        b: &b,
        order: novelty_order(&a),
        side: vec![Party::A; states.len()],
        span_a: Vec::new(),
        span_b: Vec::new(),
        nodes: 0,
        budget,
        exhausted: false,
    };
    let found = search.descend(0);
    let config = json!({ "budget": budget, "span_tol": SPAN_TOL, "members": states.len(), "d": d });
    let claim = format!("no product vector is orthogonal to the {} given states", states.len());

    if found {
        let wa = orthonormal_complement(&search.span_a, d).basis()[0].clone();
        let wb = orthonormal_complement(&search.span_b, d).basis()[0].clone();
        let w = tensor(&wa, &wb);
        let kets: Vec<Ket> = states.iter().map(|s| s.normalized_ket()).collect();
        let subspace_overlap = orthonormal_complement(&kets, d * d).overlap(&w);
        let max_member_overlap = kets.iter().map(|k| k.inner(&w).norm()).fold(0.0, f64::max);
        let pick = |p: Party| -> Vec<&str> {
            states.iter().zip(&search.side).filter(|(_, &s)| s == p).map(|(s, _)| s.label.as_str()).collect()
        };
        return Ok(Certificate::new(
            claim,
            Status::Fail,
            Confidence::Proof,
            json!({
                "nodes": search.nodes,
                "partition": { "a": pick(Party::A), "b": pick(Party::B) },
                "ranks": [search.span_a.len(), search.span_b.len()],
                "product_a": wa,
                "product_b": wb,
                "max_member_overlap": max_member_overlap,
                "subspace_overlap": subspace_overlap,
            }),
            config,
        ));
    }
    let (status, confidence) =
        if search.exhausted { (Status::Inconclusive, Confidence::Evidence) } else { (Status::Pass, Confidence::Proof) };
    Ok(Certificate::new(
        claim,
        status,
        confidence,
        json!({ "nodes": search.nodes, "budget_exhausted": search.exhausted }),
        config,
    ))
}

pub fn check_upb_unextendible(upb: &Upb, budget: u64) -> Result<Certificate> {
    let mut cert = check_unextendible_exhaustive(&upb.all_states(), budget)?;
    cert.claim = format!("the d = {} {} tiles UPB is unextendible", upb.d, upb.variant);
    cert.config["variant"] = json!(upb.variant);
    Ok(cert)
}

/// The UPB members of `C^d ⊗ C^d` together with the central state in place
/// of the stopper: `(d-1)² + 1` orthogonal product states whose complement
/// still holds the other missing states.
pub fn extendible_control_set(d: usize, variant: Variant) -> Result<Vec<ProductState>> {
    let u = tiles::upb(d, variant)?;
    let central = tiles::missing_states(&tiles::layout(d)?)
        .pop()
        .expect("missing states end with the central state");
    let mut states = u.members;
    states.push(central);
    Ok(states)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d3_passes_within_two_to_the_n() {
        for v in [Variant::Dft, Variant::Real] {
            let c = check_upb_unextendible(&tiles::upb(3, v).unwrap(), 1_000_000).unwrap();
            assert_eq!(c.status, Status::Pass);
            assert_eq!(c.confidence, Confidence::Proof);
            assert!(c.witnesses["nodes"].as_u64().unwrap() <= 32);
        }
    }

    #[test]
    fn d5_passes() {
        for v in [Variant::Dft, Variant::Real] {
            let c = check_upb_unextendible(&tiles::upb(5, v).unwrap(), 1_000_000_000).unwrap();
            assert_eq!(c.status, Status::Pass, "{c:?}");
            assert!(c.witnesses["nodes"].as_u64().unwrap() <= 1 << 17);
        }
    }

    #[test]
    fn control_set_fails_with_witness() {
        let states = extendible_control_set(5, Variant::Real).unwrap();
        assert_eq!(states.len(), 17);
        let c = check_unextendible_exhaustive(&states, 1_000_000).unwrap();
        assert_eq!(c.status, Status::Fail);
        assert!(c.witness_f64("subspace_overlap").unwrap() > 1.0 - 1e-10);
        assert!(c.witness_f64("max_member_overlap").unwrap() < 1e-10);
    }

    #[test]
    fn copb_fails_trivially_only_when_incomplete() {
        let mut copb = tiles::copb(3, Variant::Dft).unwrap();
        let c = check_unextendible_exhaustive(&copb, 1000).unwrap();
        assert_eq!(c.status, Status::Pass);
        copb.pop();
        let c = check_unextendible_exhaustive(&copb, 1000).unwrap();
        assert_eq!(c.status, Status::Fail);
    }

    #[test]
    fn tiny_budget_is_inconclusive() {
        let c = check_upb_unextendible(&tiles::upb(5, Variant::Dft).unwrap(), 3).unwrap();
        assert_eq!(c.status, Status::Inconclusive);
        assert_eq!(c.confidence, Confidence::Evidence);
    }
}
