//! Orthogonality-preserving local measurements on subsets of the tiles
//! product basis.
//!
//! A local measurement element `E` on party A keeps the set orthogonal iff
//! `⟨a_i|E|a_j⟩⟨b_i|b_j⟩ = 0` for all `i ≠ j`. Writing `E` in a real basis of
//! Hermitian matrices turns this into a real linear system; the set admits
//! only trivial orthogonality-preserving measurements when the solution
//! space is spanned by the identity.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::linalg::{orthonormal_complement, ComplexMatrix, Ket, C64};
use crate::tiles::{self, Party, ProductState, Provenance, TileId, Variant};
use crate::verify::{self, status_of, tol, Certificate, Confidence, SeesawConfig};
use crate::{Error, Result};

/// Other-side overlap above which a pair constrains the measurement.
const PAIR_TOL: f64 = 1e-9;
/// Orthogonality tolerance for states added by the completion search.
const COMPLETION_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetKind {
    Ucpb,
    CompletableSet,
    Upb,
    Copb,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateSet {
    pub d: usize,
    pub kind: SetKind,
    pub states: Vec<ProductState>,
}

impl StateSet {
    pub fn new(d: usize, kind: SetKind, states: Vec<ProductState>) -> Result<Self> {
        if states.iter().any(|s| s.dims() != (d, d)) {
            return Err(Error::Argument(format!("every state must live in C^{d} ⊗ C^{d}")));
        }
        for (i, s) in states.iter().enumerate() {
            for t in &states[i + 1..] {
                let ov = s.normalized_inner(t).norm();
                if ov > tol::CONSTRUCTION {
                    return Err(Error::Integrity(format!("{} and {} overlap by {ov:.3e}", s.label, t.label)));
                }
            }
        }
        Ok(StateSet { d, kind, states })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.states.iter().map(|s| s.label.as_str()).collect()
    }
}

fn tile_index(s: &ProductState) -> Option<(usize, TileId, usize)> {
    match s.provenance {
        Provenance::Tile { layer, tile, index } => Some((layer, tile, index)),
        _ => None,
    }
}

/// One state per tile (index 2 where the tile has one, else 1) plus the
/// stopper.
pub fn ucpb_set(d: usize, variant: Variant) -> Result<StateSet> {
    let u = tiles::upb(d, variant)?;
    let mut states: Vec<ProductState> = u
        .members
        .into_iter()
        .filter(|s| {
            let (k, _, idx) = tile_index(s).expect("members come from tiles");
            idx == if k >= 2 { 2 } else { 1 }
        })
        .collect();
    states.push(u.stopper);
    StateSet::new(d, SetKind::Ucpb, states)
}

/// The UPB members without the stopper and without the last state of the
/// outer Bottom and Left tiles.
pub fn completable_set(d: usize, variant: Variant) -> Result<StateSet> {
    let u = tiles::upb(d, variant)?;
    let outer = (d - 1) / 2;
    let states = u
        .members
        .into_iter()
        .filter(|s| {
            let (k, tile, idx) = tile_index(s).expect("members come from tiles");
            !(k == outer && idx == 2 * k - 1 && matches!(tile, TileId::Bottom | TileId::Left))
        })
        .collect();
    StateSet::new(d, SetKind::CompletableSet, states)
}

/// `{ψ2, ψ5, ψ8, ψ11, ψ13, ψ14, ψ15, ψ16, S}` of the real 5 ⊗ 5 UPB.
pub fn nine_state_set() -> Result<StateSet> {
    ucpb_set(5, Variant::Real)
}

/// The real 5 ⊗ 5 UPB without `S`, `ψ6` and `ψ12`.
pub fn fourteen_state_set() -> Result<StateSet> {
    completable_set(5, Variant::Real)
}

/// Solution space of the orthogonality-preserving constraints on one party.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpmAnalysis {
    pub party: Party,
    pub nullspace_dim: usize,
    pub constraint_pairs: usize,
    pub basis: Vec<ComplexMatrix>,
    pub trivial: bool,
}

/// Orthonormal basis of `d × d` Hermitian matrices under the trace inner
/// product: `E_ii`, `(E_ij + E_ji)/√2`, `i(E_ij - E_ji)/√2`.
fn hermitian_basis(d: usize) -> Vec<ComplexMatrix> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        out.push(ComplexMatrix::from_fn(d, d, |r, c| C64::new(if r == i && c == i { 1.0 } else { 0.0 }, 0.0)));
    }
    for i in 0..d {
        for j in i + 1..d {
            out.push(ComplexMatrix::from_fn(d, d, |r, c| {
                if (r, c) == (i, j) || (r, c) == (j, i) {
                    C64::new(h, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }));
            out.push(ComplexMatrix::from_fn(d, d, |r, c| {
                if (r, c) == (i, j) {
                    C64::new(0.0, h)
                } else if (r, c) == (j, i) {
                    C64::new(0.0, -h)
                } else {
                    C64::new(0.0, 0.0)
                }
            }));
        }
    }
    out
}

fn sides(s: &ProductState, party: Party) -> (Ket, Ket) {
    match party {
        Party::A => (s.a.normalized(), s.b.normalized()),
        Party::B => (s.b.normalized(), s.a.normalized()),
    }
}

pub fn opm_nullspace(set: &StateSet, party: Party) -> Result<OpmAnalysis> {
    let d = set.d;
    let herm = hermitian_basis(d);
    let pairs: Vec<(Ket, Ket)> = set.states.iter().map(|s| sides(s, party)).collect();
    let mut rows: Vec<Ket> = Vec::new();
    let mut constraint_pairs = 0;
    for (i, (xi, yi)) in pairs.iter().enumerate() {
        for (xj, yj) in &pairs[i + 1..] {
            if yi.inner(yj).norm() <= PAIR_TOL {
                continue;
            }
            constraint_pairs += 1;
            let vals: Vec<C64> = herm.iter().map(|g| xi.inner(&g.mul_ket(xj))).collect();
            rows.push(Ket::from_real(&vals.iter().map(|v| v.re).collect::<Vec<_>>()));
            rows.push(Ket::from_real(&vals.iter().map(|v| v.im).collect::<Vec<_>>()));
        }
    }
    let null = orthonormal_complement(&rows, d * d);
    let basis: Vec<ComplexMatrix> = null
        .basis()
        .iter()
        .map(|x| {
            herm.iter()
                .zip(x.amplitudes())
                .fold(ComplexMatrix::zeros(d, d), |acc, (g, c)| &acc + &g.scale(c.re))
        })
        .collect();
    let trivial = basis.len() == 1 && {
        let e = &basis[0];
        let mean = e.trace().re / d as f64;
        (e - &ComplexMatrix::identity(d).scale(mean)).frobenius_norm() < tol::SPECTRAL * e.frobenius_norm()
    };
    Ok(OpmAnalysis { party, nullspace_dim: basis.len(), constraint_pairs, basis, trivial })
}

/// Passes iff neither party has a nontrivial orthogonality-preserving
/// measurement.
pub fn check_strong_indistinguishability(set: &StateSet) -> Result<Certificate> {
    let a = opm_nullspace(set, Party::A)?;
    let b = opm_nullspace(set, Party::B)?;
    Ok(Certificate::new(
        format!("no party can start an orthogonality-preserving measurement on the {}-state set", set.len()),
        status_of(a.trivial && b.trivial),
        Confidence::Proof,
        json!({
            "nullspace_dim": { "a": a.nullspace_dim, "b": b.nullspace_dim },
            "trivial": { "a": a.trivial, "b": b.trivial },
            "constraint_pairs": { "a": a.constraint_pairs, "b": b.constraint_pairs },
            "labels": set.labels(),
        }),
        json!({ "d": set.d, "kind": set.kind, "pair_tol": PAIR_TOL, "null_tol": tol::SPECTRAL }),
    ))
}

/// A completion of an orthogonal product set to `d²` states.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Completion {
    pub added: Vec<ProductState>,
    pub from_pool: usize,
    pub from_search: usize,
}

fn orthogonal_to_all(s: &ProductState, states: &[ProductState], tol: f64) -> bool {
    states.iter().all(|t| s.normalized_inner(t).norm() < tol)
}

/// Greedily adds states from `copb(d, variant)`, then asks the product
/// search for further states in the remaining complement.
pub fn complete(set: &StateSet, variant: Variant, cfg: &SeesawConfig) -> Result<Completion> {
    let d = set.d;
    let mut current = set.states.clone();
    let mut added = Vec::new();
    for cand in tiles::copb(d, variant)? {
        if current.iter().any(|s| s.label == cand.label) {
            continue;
        }
        if orthogonal_to_all(&cand, &current, tol::CONSTRUCTION) {
            current.push(cand.clone());
            added.push(cand);
        }
    }
    let from_pool = added.len();
    while current.len() < d * d {
        let kets: Vec<Ket> = current.iter().map(|s| s.normalized_ket()).collect();
        let rest = orthonormal_complement(&kets, d * d);
        let best = verify::max_product_overlap(&rest, d, d, cfg)?;
        if best.value <= 1.0 - cfg.tol_found {
            break;
        }
        let found = ProductState::new(
            format!("x{}", added.len() - from_pool + 1),
            Provenance::Found { index: added.len() - from_pool + 1 },
            best.a,
            best.b,
        );
        if !orthogonal_to_all(&found, &current, COMPLETION_TOL) {
            break;
        }
        current.push(found.clone());
        added.push(found);
    }
    let from_search = added.len() - from_pool;
    Ok(Completion { added, from_pool, from_search })
}

/// Passes iff the set extends to `d²` pairwise-orthogonal product states
/// spanning the whole space; the added states are the witness.
pub fn check_completability(set: &StateSet, variant: Variant, cfg: &SeesawConfig) -> Result<Certificate> {
    let completion = complete(set, variant, cfg)?;
    let mut all = set.states.clone();
    all.extend(completion.added.iter().cloned());
    let tol_used = if completion.from_search > 0 { COMPLETION_TOL } else { tol::CONSTRUCTION };
    let ortho = verify::check_orthogonality(&all, tol_used)?;
    let complete = verify::check_completeness(&all, set.d)?;
    Ok(Certificate::new(
        format!("the {}-state set extends to a complete orthogonal product basis", set.len()),
        status_of(ortho.passed() && complete.passed()),
        if completion.from_search > 0 { Confidence::Evidence } else { Confidence::Proof },
        json!({
            "total": all.len(),
            "added": completion.added.iter().map(|s| s.label.as_str()).collect::<Vec<_>>(),
            "from_pool": completion.from_pool,
            "from_search": completion.from_search,
            "max_overlap": ortho.witnesses["max_overlap"],
            "gram_rank": complete.witnesses["gram_rank"],
            "completion": completion.added,
        }),
        json!({ "d": set.d, "variant": variant, "orthogonality_tol": tol_used }),
    ))
}
