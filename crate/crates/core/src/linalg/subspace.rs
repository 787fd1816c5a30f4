use serde::{Deserialize, Serialize};

use super::{fix_phase, hermitian_eig, ComplexMatrix, Ket, C64, RANK_TOL};
use crate::{Error, Result};

/// Relative residual below which a vector counts as dependent on its
/// predecessors.
const DEPENDENCE_TOL: f64 = 1e-10;

/// A subspace of `C^ambient_dim` given by an orthonormal basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<Ket>,
}

impl Subspace {
    /// Wraps an orthonormal basis, checking its Gram matrix to `1e-10`.
    pub fn new(ambient_dim: usize, basis: Vec<Ket>) -> Result<Self> {
        if basis.len() > ambient_dim {
            return Err(Error::Argument(format!("{} basis vectors in C^{ambient_dim}", basis.len())));
        }
        for (i, u) in basis.iter().enumerate() {
            if u.dim() != ambient_dim {
                return Err(Error::DimensionMismatch { expected: ambient_dim, found: u.dim() });
            }
            for (j, v) in basis.iter().enumerate().skip(i) {
                let want = if i == j { 1.0 } else { 0.0 };
                if (u.inner(v) - C64::new(want, 0.0)).norm() > 1e-10 {
                    return Err(Error::Integrity(format!("basis not orthonormal at ({i}, {j})")));
                }
            }
        }
        Ok(Subspace { ambient_dim, basis })
    }

    /// Span of arbitrary vectors.
    pub fn span(ambient_dim: usize, vectors: &[Ket]) -> Self {
        Subspace { ambient_dim, basis: gram_schmidt(vectors) }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Ket] {
        &self.basis
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::projector_onto(&self.basis, self.ambient_dim)
    }

    /// Orthogonal projection of `v` onto the subspace.
    pub fn project(&self, v: &Ket) -> Ket {
        let mut out = Ket::zeros(self.ambient_dim);
        for b in &self.basis {
            out.axpy(b.inner(v), b);
        }
        out
    }

    /// `‖v_⊥‖ / ‖v‖`, the relative distance of `v` from the subspace.
    pub fn residual(&self, v: &Ket) -> f64 {
        let n = v.norm();
        if n == 0.0 {
            return 0.0;
        }
        v.sub(&self.project(v)).norm() / n
    }

    /// `⟨ṽ|P|ṽ⟩` for the normalized `v`.
    pub fn overlap(&self, v: &Ket) -> f64 {
        let n2 = v.norm_sqr();
        if n2 == 0.0 {
            return 0.0;
        }
        self.basis.iter().map(|b| b.inner(v).norm_sqr()).sum::<f64>() / n2
    }
}

/// Modified Gram–Schmidt with one reorthogonalization pass. Inputs whose
/// residual is below `1e-10` of their own norm are dropped.
pub fn gram_schmidt(vectors: &[Ket]) -> Vec<Ket> {
    let mut out: Vec<Ket> = Vec::new();
    for v in vectors {
        let n0 = v.norm();
        if n0 == 0.0 {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for u in &out {
                let c = u.inner(&w);
                w.axpy(-c, u);
            }
        }
        let n = w.norm();
        if n < DEPENDENCE_TOL * n0 {
            continue;
        }
        out.push(w.scale(C64::new(1.0 / n, 0.0)));
    }
    for u in &mut out {
        let mut amps = std::mem::replace(u, Ket::zeros(0)).into_amplitudes();
        fix_phase(&mut amps);
        *u = Ket::new(amps);
    }
    out
}

/// Orthonormal basis of the complement of `span(vectors)` in `C^ambient_dim`.
///
/// Basis vectors are extracted greedily from the residuals of the
/// computational basis vectors, always taking the largest residual next.
pub fn orthonormal_complement(vectors: &[Ket], ambient_dim: usize) -> Subspace {
    let span = gram_schmidt(vectors);
    let target = ambient_dim.saturating_sub(span.len());
    let mut residuals: Vec<Ket> = (0..ambient_dim)
        .map(|i| {
            let mut r = Ket::basis(ambient_dim, i);
            for u in &span {
                let c = u.inner(&r);
                r.axpy(-c, u);
            }
            r
        })
        .collect();
    let mut basis: Vec<Ket> = Vec::with_capacity(target);
    while basis.len() < target {
        let (best, best_norm) = residuals
            .iter()
            .enumerate()
            .map(|(i, r)| (i, r.norm()))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_norm < DEPENDENCE_TOL {
            break;
        }
        let mut u = residuals[best].clone();
        // reorthogonalize against everything accepted so far
        for w in span.iter().chain(&basis) {
            let c = w.inner(&u);
            u.axpy(-c, w);
        }
        let u = u.normalized();
        for r in residuals.iter_mut() {
            let c = u.inner(r);
            r.axpy(-c, &u);
        }
        basis.push(u.with_fixed_phase());
    }
    Subspace { ambient_dim, basis }
}

/// Number of singular values above `tol·σ_max` (eigenvalue magnitudes for
/// Hermitian input). The zero matrix has rank 0.
pub fn numeric_rank(m: &ComplexMatrix, tol: f64) -> usize {
    let spectrum: Vec<f64> = if m.is_hermitian() {
        match hermitian_eig(m) {
            Ok(e) => e.values.iter().map(|x| x.abs()).collect(),
            Err(_) => return 0,
        }
    } else {
        let g = m.adjoint().matmul(m);
        match hermitian_eig(&g) {
            Ok(e) => e.values.iter().map(|x| x.max(0.0).sqrt()).collect(),
            Err(_) => return 0,
        }
    };
    let top = spectrum.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    spectrum.iter().filter(|&&s| s > tol * top).count()
}

/// Orthonormal eigenvectors of a Hermitian `m` whose eigenvalues exceed
/// `RANK_TOL` relative to the largest magnitude.
pub fn range_basis(m: &ComplexMatrix) -> Result<Vec<Ket>> {
    let e = hermitian_eig(m)?;
    let top = e.values.iter().map(|x| x.abs()).fold(0.0, f64::max);
    Ok(e
        .values
        .iter()
        .zip(e.vectors)
        .filter(|(l, _)| l.abs() > RANK_TOL * top && top > 0.0)
        .map(|(_, v)| v)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_ket(n: usize, rng: &mut ChaCha8Rng) -> Ket {
        Ket::new((0..n).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect())
    }

    #[test]
    fn gram_schmidt_basic() {
        let out = gram_schmidt(&[Ket::basis(2, 0), Ket::from_real(&[1.0, 1.0])]);
        assert_eq!(out.len(), 2);
        assert!(out[0].max_abs_diff(&Ket::basis(2, 0)) < 1e-15);
        assert!(out[1].max_abs_diff(&Ket::basis(2, 1)) < 1e-15);
    }

    #[test]
    fn gram_schmidt_drops_duplicates() {
        let v = Ket::from_real(&[3.0, 4.0]);
        let out = gram_schmidt(&[v.clone(), v]);
        assert_eq!(out.len(), 1);
        assert!(out[0].max_abs_diff(&Ket::from_real(&[0.6, 0.8])) < 1e-15);
    }

    #[test]
    fn gram_schmidt_random_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [3, 9, 25] {
            let vs: Vec<Ket> = (0..n + 2).map(|_| random_ket(n, &mut rng)).collect();
            let out = gram_schmidt(&vs);
            assert_eq!(out.len(), n);
            for (i, u) in out.iter().enumerate() {
                for (j, w) in out.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((u.inner(w) - C64::new(want, 0.0)).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn complement_of_two_basis_vectors() {
        let c = orthonormal_complement(&[Ket::basis(3, 0), Ket::basis(3, 1)], 3);
        assert_eq!(c.dim(), 1);
        assert!(c.basis()[0].max_abs_diff(&Ket::basis(3, 2)) < 1e-15);
    }

    #[test]
    fn complement_dimensions_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (n, k) in [(9, 5), (25, 17), (16, 1)] {
            let vs: Vec<Ket> = (0..k).map(|_| random_ket(n, &mut rng)).collect();
            let c = orthonormal_complement(&vs, n);
            assert_eq!(c.dim() + k, n);
            for b in c.basis() {
                for v in &vs {
                    assert!(b.inner(v).norm() < 1e-10);
                }
            }
            Subspace::new(n, c.basis().to_vec()).unwrap();
        }
    }

    #[test]
    fn ranks() {
        assert_eq!(numeric_rank(&ComplexMatrix::identity(3), RANK_TOL), 3);
        assert_eq!(numeric_rank(&ComplexMatrix::zeros(4, 4), RANK_TOL), 0);
        let v = Ket::new(vec![C64::new(1.0, 2.0), C64::new(0.0, -1.0), C64::new(3.0, 0.0)]);
        assert_eq!(numeric_rank(&ComplexMatrix::outer(&v, &v), RANK_TOL), 1);
        // non-Hermitian path
        let m = ComplexMatrix::outer(&v, &Ket::basis(3, 0));
        assert_eq!(numeric_rank(&m, RANK_TOL), 1);
    }

    #[test]
    fn projector_rank_complement() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let vs: Vec<Ket> = (0..4).map(|_| random_ket(10, &mut rng)).collect();
        let p = Subspace::span(10, &vs).projector();
        let q = &ComplexMatrix::identity(10) - &p;
        assert_eq!(numeric_rank(&p, RANK_TOL) + numeric_rank(&q, RANK_TOL), 10);
    }
}
