//! Density matrices supported on the entangled subspace of the tiles UPB.
//!
//! * `ρ_d = (I - P_U) / (2(d-1))`, the normalized projector onto `H_E`.
//! * `σ_m`, the rank-4 factors: `H_E ∩ (E_m ⊗ E_m)` with
//!   `E_m = span{|c-m⟩, |c-m+1 + … + c+m-1⟩, |c+m⟩}`. Inside `E_m ⊗ E_m` the
//!   UPB projects onto a 3⊗3 tiles UPB whose middle level carries weight
//!   `√(2m-1)`, so `σ_m` is the embedded bound entangled state of that
//!   small UPB.
//! * `ρ_d = (2/(d-1)) Σ_m σ_m`.

use serde::{Deserialize, Serialize};

use crate::linalg::{
    hermitian_eig, orthonormal_complement, partial_transpose, ComplexMatrix, Ket, Subspace, C64,
};
use crate::tiles::{self, Party, Provenance, ProductState, TileId, Upb, Variant};
use crate::{Error, Result};

/// Trace tolerance for a valid density matrix.
const TRACE_TOL: f64 = 1e-12;
/// Smallest eigenvalue tolerated in a valid density matrix.
const PSD_TOL: f64 = 1e-10;
/// Normalized overlap above which two product states are not orthogonal.
const ORTHO_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    pub matrix: ComplexMatrix,
    pub d_a: usize,
    pub d_b: usize,
    pub label: String,
}

impl DensityMatrix {
    /// Validates shape, Hermiticity, unit trace and positivity.
    pub fn new(matrix: ComplexMatrix, d_a: usize, d_b: usize, label: impl Into<String>) -> Result<Self> {
        let n = d_a * d_b;
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: matrix.rows() });
        }
        if !matrix.is_hermitian() {
            return Err(Error::Integrity("density matrix is not Hermitian".into()));
        }
        let tr = matrix.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::Integrity(format!("trace {} ≠ 1", tr.re)));
        }
        let min = hermitian_eig(&matrix)?.min();
        if min < -PSD_TOL {
            return Err(Error::Integrity(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(DensityMatrix { matrix, d_a, d_b, label: label.into() })
    }

    pub fn maximally_mixed(d_a: usize, d_b: usize) -> Self {
        let n = d_a * d_b;
        DensityMatrix {
            matrix: ComplexMatrix::identity(n).scale(1.0 / n as f64),
            d_a,
            d_b,
            label: "maximally_mixed".into(),
        }
    }

    pub fn dim(&self) -> usize {
        self.d_a * self.d_b
    }

    pub fn partial_transpose(&self, side: Party) -> ComplexMatrix {
        partial_transpose(&self.matrix, self.d_a, self.d_b, side).expect("shape checked on construction")
    }

    /// Reduced state on one party.
    pub fn reduced(&self, party: Party) -> ComplexMatrix {
        let (da, db) = (self.d_a, self.d_b);
        match party {
            Party::A => ComplexMatrix::from_fn(da, da, |i, k| (0..db).map(|j| self.matrix[(i * db + j, k * db + j)]).sum()),
            Party::B => ComplexMatrix::from_fn(db, db, |j, l| (0..da).map(|i| self.matrix[(i * db + j, i * db + l)]).sum()),
        }
    }
}

/// JSON record for a density matrix: the matrix encoding plus metadata.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DensityRecord {
    pub d: usize,
    pub label: String,
    pub family: String,
    pub params: serde_json::Value,
    #[serde(flatten)]
    pub matrix: ComplexMatrix,
}

impl DensityRecord {
    pub fn new(d: usize, family: &str, params: serde_json::Value, rho: &DensityMatrix) -> Self {
        DensityRecord { d, label: rho.label.clone(), family: family.into(), params, matrix: rho.matrix.clone() }
    }
}

/// A rank-4 factor `σ_m` together with the local qutrit frames supporting it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaFactor {
    pub d: usize,
    /// Layer index counted from the center outward.
    pub m: usize,
    pub local_basis_a: [Ket; 3],
    pub local_basis_b: [Ket; 3],
    pub state: DensityMatrix,
}

impl SigmaFactor {
    pub fn local_subspaces(&self) -> (Subspace, Subspace) {
        (
            Subspace::new(self.d, self.local_basis_a.to_vec()).expect("orthonormal by construction"),
            Subspace::new(self.d, self.local_basis_b.to_vec()).expect("orthonormal by construction"),
        )
    }
}

fn check_orthogonal(states: &[ProductState]) -> Result<()> {
    for (i, s) in states.iter().enumerate() {
        for t in &states[i + 1..] {
            let ov = s.normalized_inner(t).norm();
            if ov > ORTHO_TOL {
                return Err(Error::Integrity(format!("{} and {} overlap by {ov:.3e}", s.label, t.label)));
            }
        }
    }
    Ok(())
}

/// `Σ |ψ̃⟩⟨ψ̃|` over pairwise-orthogonal product states.
pub fn projector_onto_states(states: &[ProductState]) -> Result<ComplexMatrix> {
    check_orthogonal(states)?;
    let (da, db) = states.first().map(|s| s.dims()).ok_or_else(|| Error::Argument("no states".into()))?;
    let mut p = ComplexMatrix::zeros(da * db, da * db);
    for s in states {
        let k = s.normalized_ket();
        p.add_outer(C64::new(1.0, 0.0), &k, &k);
    }
    Ok(p)
}

/// Projector `P_U` onto the span of the UPB (members and stopper).
pub fn upb_projector(upb: &Upb) -> Result<ComplexMatrix> {
    projector_onto_states(&upb.all_states())
}

/// Orthonormal basis of `H_E`, the complement of the UPB span.
pub fn entangled_subspace(upb: &Upb) -> Subspace {
    let kets: Vec<Ket> = upb.all_states().iter().map(|s| s.normalized_ket()).collect();
    orthonormal_complement(&kets, upb.d * upb.d)
}

pub fn rho_d(d: usize, variant: Variant) -> Result<DensityMatrix> {
    let u = tiles::upb(d, variant)?;
    let p = upb_projector(&u)?;
    let n = d * d;
    let m = (&ComplexMatrix::identity(n) - &p).scale(1.0 / (2 * (d - 1)) as f64);
    DensityMatrix::new(m, d, d, format!("rho_{d}"))
}

fn check_layer(d: usize, m: usize) -> Result<()> {
    tiles::check_dimension(d)?;
    if m == 0 || m > (d - 1) / 2 {
        return Err(Error::Argument(format!("layer {m} out of range 1..={}", (d - 1) / 2)));
    }
    Ok(())
}

/// `(|c-m⟩, normalized |c-m+1 + … + c+m-1⟩, |c+m⟩)`.
pub fn local_basis(d: usize, m: usize) -> Result<[Ket; 3]> {
    check_layer(d, m)?;
    let c = (d - 1) / 2;
    Ok([Ket::basis(d, c - m), Ket::uniform(d, c - m + 1, c + m - 1).normalized(), Ket::basis(d, c + m)])
}

/// The 3⊗3 tiles UPB seen inside `E_m ⊗ E_m`: tile vectors `(w, -1, 0)`,
/// `(0, -1, w)` and stopper `(1, w, 1)^{⊗2}` with `w = √(2m-1)`.
pub(crate) fn projected_upb3(m: usize) -> Vec<ProductState> {
    let w = ((2 * m - 1) as f64).sqrt();
    let e0 = Ket::basis(3, 0);
    let e2 = Ket::basis(3, 2);
    let head = Ket::from_real(&[w, -1.0, 0.0]);
    let tail = Ket::from_real(&[0.0, -1.0, w]);
    let stop = Ket::from_real(&[1.0, w, 1.0]);
    let tile = |id, a, b| ProductState::new(format!("{id:?}"), Provenance::Tile { layer: m, tile: id, index: 1 }, a, b);
    vec![
        tile(TileId::Top, e0.clone(), head.clone()),
        tile(TileId::Bottom, e2.clone(), tail.clone()),
        tile(TileId::Right, head, e2),
        tile(TileId::Left, tail, e0),
        ProductState::new("S", Provenance::Stopper, stop.clone(), stop),
    ]
}

pub fn sigma(d: usize, m: usize) -> Result<SigmaFactor> {
    let basis = local_basis(d, m)?;
    let small = projected_upb3(m);
    let p3 = projector_onto_states(&small)?;
    let sigma3 = (&ComplexMatrix::identity(9) - &p3).scale(0.25);
    // isometry C^3 -> C^d with columns e0, e1, e2
    let v = ComplexMatrix::from_fn(d, 3, |i, j| basis[j][i]);
    let state = sigma3.conjugate_by(&v.kron(&v)).hermitian_part();
    Ok(SigmaFactor {
        d,
        m,
        local_basis_a: basis.clone(),
        local_basis_b: basis,
        state: DensityMatrix::new(state, d, d, format!("sigma_{d}_m{m}"))?,
    })
}

fn check_probabilities(p: &[f64], len: usize) -> Result<()> {
    if p.len() != len {
        return Err(Error::Argument(format!("expected {len} probabilities, got {}", p.len())));
    }
    if p.iter().any(|&x| x.is_nan() || x < 0.0) {
        return Err(Error::Argument("probabilities must be non-negative".into()));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::Argument(format!("probabilities sum to {total}")));
    }
    Ok(())
}

/// `Σ_m p[m-1] σ_m`, with `p` indexed from the innermost layer.
pub fn sigma_family(d: usize, p: &[f64]) -> Result<DensityMatrix> {
    tiles::check_dimension(d)?;
    let layers = (d - 1) / 2;
    check_probabilities(p, layers)?;
    let n = d * d;
    let mut acc = ComplexMatrix::zeros(n, n);
    for (m, &w) in (1..=layers).zip(p) {
        if w == 0.0 {
            continue;
        }
        acc = &acc + &sigma(d, m)?.state.matrix.scale(w);
    }
    DensityMatrix::new(acc.hermitian_part(), d, d, format!("sigma_family_{d}"))
}

/// Orthonormal basis of `H_E` in blocks of four, innermost layer first.
///
/// Block `m` holds the three sign combinations `(+,+,-,-)`, `(+,-,+,-)`,
/// `(+,-,-,+)` of the layer-`m` missing states and one vector
/// `α Σ_m + β U_m` orthogonal to the stopper, where `Σ_m` sums the
/// layer-`m` missing states and `U_m` is the uniform product vector on the
/// inner `(2m-1)²` block (the central state for `m = 1`).
pub fn entangled_basis(d: usize) -> Result<Vec<Ket>> {
    let lay = tiles::layout(d)?;
    let missing = tiles::missing_states(&lay);
    let stop = tiles::stopper(d)?.ket();
    let c = lay.center;
    let mut out = Vec::with_capacity(2 * (d - 1));
    for m in 1..=c {
        let block: Vec<Ket> = TileId::ALL
            .iter()
            .map(|&id| {
                missing
                    .iter()
                    .find(|s| s.provenance == Provenance::Missing { layer: m, tile: id })
                    .expect("every tile has a missing state")
                    .ket()
            })
            .collect();
        for signs in [[1.0, 1.0, -1.0, -1.0], [1.0, -1.0, 1.0, -1.0], [1.0, -1.0, -1.0, 1.0]] {
            let mut v = Ket::zeros(d * d);
            for (s, k) in signs.iter().zip(&block) {
                v.axpy(C64::new(*s, 0.0), k);
            }
            out.push(v.normalized().with_fixed_phase());
        }
        let sum = block.iter().fold(Ket::zeros(d * d), |acc, k| acc.add(k));
        let u = Ket::uniform(d, c + 1 - m, c + m - 1);
        let inner = tiles::ProductState::new("U", Provenance::Central, u.clone(), u).ket();
        // one-dimensional null space of ⟨S| restricted to span{Σ_m, U_m}
        let alpha = stop.inner(&inner);
        let beta = -stop.inner(&sum);
        let mut v = sum.scale(alpha);
        v.axpy(beta, &inner);
        out.push(v.normalized().with_fixed_phase());
    }
    Ok(out)
}

fn mixture(kets: &[Ket], weights: &[f64], d: usize, label: String) -> Result<DensityMatrix> {
    let mut m = ComplexMatrix::zeros(d * d, d * d);
    for (k, &w) in kets.iter().zip(weights) {
        let u = k.normalized();
        m.add_outer(C64::new(w, 0.0), &u, &u);
    }
    DensityMatrix::new(m, d, d, label)
}

/// `Σ p_i |φ̃_i⟩⟨φ̃_i|` over the four-vector entangled basis of the 3⊗3 UPB.
pub fn rho3_unequal(p: &[f64; 4]) -> Result<DensityMatrix> {
    check_probabilities(p, 4)?;
    mixture(&entangled_basis(3)?, p, 3, "rho3_unequal".into())
}

/// Mixture of the `2(d-1)` entangled basis projectors with arbitrary weights.
pub fn basis_mixture(d: usize, weights: &[f64]) -> Result<DensityMatrix> {
    check_probabilities(weights, 2 * (d - 1))?;
    mixture(&entangled_basis(d)?, weights, d, format!("basis_mixture_{d}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{numeric_rank, range_basis, RANK_TOL};

    fn spectrum(m: &ComplexMatrix) -> Vec<f64> {
        hermitian_eig(m).unwrap().values
    }

    fn count_near(values: &[f64], target: f64, tol: f64) -> usize {
        values.iter().filter(|v| (*v - target).abs() < tol).count()
    }

    #[test]
    fn upb_projector_ranks() {
        for d in (3..=11).step_by(2) {
            let p = upb_projector(&tiles::upb(d, Variant::Dft).unwrap()).unwrap();
            assert!((&p.matmul(&p) - &p).frobenius_norm() < 1e-10);
            assert_eq!(numeric_rank(&p, RANK_TOL), (d - 1) * (d - 1) + 1);
        }
    }

    #[test]
    fn upb_projector_rejects_overlapping_states() {
        let mut u = tiles::upb(5, Variant::Real).unwrap();
        u.members.push(tiles::missing_states(&tiles::layout(5).unwrap())[0].clone());
        assert!(matches!(upb_projector(&u), Err(Error::Integrity(_))));
    }

    #[test]
    fn rho_d_spectra() {
        for (d, rank) in [(3, 4), (5, 8), (7, 12)] {
            let rho = rho_d(d, Variant::Dft).unwrap();
            let s = spectrum(&rho.matrix);
            let level = 1.0 / rank as f64;
            assert_eq!(count_near(&s, level, 1e-9), rank);
            assert_eq!(count_near(&s, 0.0, 1e-9), d * d - rank);
        }
    }

    #[test]
    fn rho_d_variant_independent() {
        for d in [5, 7] {
            let a = rho_d(d, Variant::Dft).unwrap();
            let b = rho_d(d, Variant::Real).unwrap();
            assert!((&a.matrix - &b.matrix).frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn projected_small_upb_is_orthogonal() {
        for m in 1..5 {
            check_orthogonal(&projected_upb3(m)).unwrap();
        }
    }

    #[test]
    fn sigma_inner_layer_d5_support() {
        let sf = sigma(5, 1).unwrap();
        for (i, row) in (0..25).map(|i| (i, i)) {
            let (a, b) = (i / 5, i % 5);
            if !(1..=3).contains(&a) || !(1..=3).contains(&b) {
                assert!(sf.state.matrix[(row, row)].norm() < 1e-15);
            }
        }
        assert_eq!(numeric_rank(&sf.state.matrix, RANK_TOL), 4);
    }

    #[test]
    fn sigma_d3_is_rho3() {
        let s = sigma(3, 1).unwrap();
        let r = rho_d(3, Variant::Real).unwrap();
        assert!((&s.state.matrix - &r.matrix).frobenius_norm() < 1e-12);
    }

    #[test]
    fn sigma_ranges_lie_in_entangled_subspace() {
        for d in [5, 7, 9] {
            let he = entangled_subspace(&tiles::upb(d, Variant::Dft).unwrap());
            assert_eq!(he.dim(), 2 * (d - 1));
            for m in 1..=(d - 1) / 2 {
                for v in range_basis(&sigma(d, m).unwrap().state.matrix).unwrap() {
                    assert!(he.residual(&v) < 1e-10);
                }
            }
        }
    }

    #[test]
    fn sigma_ranges_mutually_orthogonal_d7() {
        let ranges: Vec<Vec<Ket>> =
            (1..=3).map(|m| range_basis(&sigma(7, m).unwrap().state.matrix).unwrap()).collect();
        for r in &ranges {
            assert_eq!(r.len(), 4);
        }
        for i in 0..3 {
            for j in i + 1..3 {
                for u in &ranges[i] {
                    for v in &ranges[j] {
                        assert!(u.inner(v).norm() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn sigma_rejects_layer() {
        assert!(sigma(5, 0).is_err());
        assert!(sigma(5, 3).is_err());
        assert!(sigma(4, 1).is_err());
    }

    #[test]
    fn family_reproduces_rho() {
        let r5 = sigma_family(5, &[0.5, 0.5]).unwrap();
        assert!((&r5.matrix - &rho_d(5, Variant::Real).unwrap().matrix).frobenius_norm() < 1e-10);
        let r9 = sigma_family(9, &[0.25; 4]).unwrap();
        assert!((&r9.matrix - &rho_d(9, Variant::Dft).unwrap().matrix).frobenius_norm() < 1e-10);
        let pure = sigma_family(5, &[1.0, 0.0]).unwrap();
        assert!((&pure.matrix - &sigma(5, 1).unwrap().state.matrix).frobenius_norm() < 1e-14);
    }

    #[test]
    fn family_rejects_bad_probabilities() {
        assert!(sigma_family(5, &[0.5, 0.6]).is_err());
        assert!(sigma_family(5, &[1.5, -0.5]).is_err());
        assert!(sigma_family(5, &[1.0]).is_err());
        assert!(sigma_family(5, &[f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn entangled_basis_d3_coefficients() {
        let basis = entangled_basis(3).unwrap();
        assert_eq!(basis.len(), 4);
        // last vector ∝ (ψ5+ψ6+ψ7+ψ8) - 8 ψ9 from ⟨S|ψ_{5..8}⟩ = 2, ⟨S|ψ9⟩ = 1
        let m = tiles::missing_states(&tiles::layout(3).unwrap());
        let mut want = Ket::zeros(9);
        for s in &m[..4] {
            want = want.add(&s.ket());
        }
        want.axpy(C64::new(-8.0, 0.0), &m[4].ket());
        assert!(basis[3].max_abs_diff(&want.normalized().with_fixed_phase()) < 1e-14);
    }

    #[test]
    fn entangled_basis_spans_complement() {
        for d in (3..=9).step_by(2) {
            let basis = entangled_basis(d).unwrap();
            assert_eq!(basis.len(), 2 * (d - 1));
            let u = tiles::upb(d, Variant::Dft).unwrap();
            let p = upb_projector(&u).unwrap();
            let q = ComplexMatrix::projector_onto(&basis, d * d);
            assert!((&(&q + &p) - &ComplexMatrix::identity(d * d)).frobenius_norm() < 1e-9);
            for (i, v) in basis.iter().enumerate() {
                for s in u.all_states() {
                    assert!(s.ket().inner(v).norm() < 1e-10);
                }
                for w in &basis[i + 1..] {
                    assert!(v.inner(w).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn entangled_blocks_span_sigma_ranges() {
        for d in [5, 7, 9] {
            let basis = entangled_basis(d).unwrap();
            for m in 1..=(d - 1) / 2 {
                let block = &basis[4 * (m - 1)..4 * m];
                let sig = sigma(d, m).unwrap().state.matrix;
                let q = ComplexMatrix::projector_onto(block, d * d).scale(0.25);
                assert!((&q - &sig).frobenius_norm() < 1e-10, "d={d} m={m}");
            }
        }
    }

    #[test]
    fn inner_block_vector_is_perpendicular_to_previous_block() {
        // U_m is the partner of the previous block's stopper-orthogonal vector
        let d = 9;
        let basis = entangled_basis(d).unwrap();
        let c = (d - 1) / 2;
        for m in 2..=c {
            let u = Ket::uniform(d, c + 1 - m, c + m - 1);
            let big = crate::linalg::tensor(&u, &u);
            assert!(big.inner(&basis[4 * (m - 1) - 1]).norm() < 1e-12);
        }
    }

    #[test]
    fn rho3_uniform_mixture() {
        let r = rho3_unequal(&[0.25; 4]).unwrap();
        assert!((&r.matrix - &rho_d(3, Variant::Real).unwrap().matrix).frobenius_norm() < 1e-12);
        assert!(rho3_unequal(&[0.5, 0.5, 0.5, -0.5]).is_err());
    }

    #[test]
    fn pt_of_rho_d_has_forced_spectrum() {
        for d in [3, 5, 7] {
            for variant in [Variant::Dft, Variant::Real] {
                let rho = rho_d(d, variant).unwrap();
                let s = spectrum(&rho.partial_transpose(Party::B));
                let level = 1.0 / (2 * (d - 1)) as f64;
                assert_eq!(count_near(&s, 0.0, 1e-9), (d - 1) * (d - 1) + 1);
                assert_eq!(count_near(&s, level, 1e-9), 2 * (d - 1));
            }
        }
    }

    #[test]
    fn reduced_states_trace_one() {
        let rho = rho_d(5, Variant::Dft).unwrap();
        for p in [Party::A, Party::B] {
            assert!((rho.reduced(p).trace().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::new(ComplexMatrix::identity(4), 2, 2, "x").is_err());
        assert!(DensityMatrix::new(ComplexMatrix::diag_real(&[1.5, -0.5, 0.0, 0.0]), 2, 2, "x").is_err());
        assert!(DensityMatrix::new(ComplexMatrix::identity(3).scale(1.0 / 3.0), 2, 2, "x").is_err());
    }

    #[test]
    fn density_record_json() {
        let rho = rho_d(3, Variant::Real).unwrap();
        let rec = DensityRecord::new(3, "rho", serde_json::json!({"variant": "real"}), &rho);
        let v = serde_json::to_value(&rec).unwrap();
        assert_eq!(v["rows"], 9);
        assert_eq!(v["family"], "rho");
        assert_eq!(v["data"].as_array().unwrap().len(), 81);
    }
}
