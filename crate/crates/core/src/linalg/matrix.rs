use std::ops::{Add, Index, IndexMut, Mul, Sub};

use serde::{Deserialize, Serialize};

use super::{Ket, C64, HERMITIAN_TOL};
use crate::tiles::Party;
use crate::{Error, Result};

/// Dense row-major complex matrix.
///
/// JSON form: `{"rows": n, "cols": m, "data": [[re, im], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    #[serde(with = "super::pair")]
    data: Vec<C64>,
}

impl TryFrom<MatrixRepr> for ComplexMatrix {
    type Error = Error;

    fn try_from(r: MatrixRepr) -> Result<Self> {
        ComplexMatrix::from_vec(r.rows, r.cols, r.data)
    }
}

impl From<ComplexMatrix> for MatrixRepr {
    fn from(m: ComplexMatrix) -> Self {
        MatrixRepr { rows: m.rows, cols: m.cols, data: m.data }
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    /// `|a⟩⟨b|`.
    pub fn outer(a: &Ket, b: &Ket) -> Self {
        Self::from_fn(a.dim(), b.dim(), |i, j| a[i] * b[j].conj())
    }

    /// Rank-one projector onto the line through `v` (which need not be
    /// normalized).
    pub fn projector(v: &Ket) -> Self {
        let u = v.normalized();
        Self::outer(&u, &u)
    }

    /// `Σ |v⟩⟨v|` over vectors assumed orthonormal.
    pub fn projector_onto(basis: &[Ket], dim: usize) -> Self {
        let mut p = Self::zeros(dim, dim);
        for v in basis {
            p.add_outer(C64::new(1.0, 0.0), v, v);
        }
        p
    }

    /// `self += c |a⟩⟨b|`.
    pub fn add_outer(&mut self, c: C64, a: &Ket, b: &Ket) {
        for i in 0..self.rows {
            let ai = c * a[i];
            if ai == C64::new(0.0, 0.0) {
                continue;
            }
            let row = &mut self.data[i * self.cols..(i + 1) * self.cols];
            for (x, bj) in row.iter_mut().zip(b.amplitudes()) {
                *x += ai * bj.conj();
            }
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn column(&self, j: usize) -> Ket {
        Ket::new((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        ComplexMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn scale(&self, c: f64) -> Self {
        ComplexMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * c).collect() }
    }

    pub fn mul_ket(&self, v: &Ket) -> Ket {
        assert_eq!(self.cols, v.dim());
        Ket::new(
            (0..self.rows)
                .map(|i| {
                    self.data[i * self.cols..(i + 1) * self.cols]
                        .iter()
                        .zip(v.amplitudes())
                        .map(|(a, b)| a * b)
                        .sum()
                })
                .collect(),
        )
    }

    /// `⟨v|self|v⟩` for square `self`.
    pub fn expectation(&self, v: &Ket) -> C64 {
        v.inner(&self.mul_ket(v))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max_{i,j} |M[i][j] - conj(M[j][i])|`; infinite for non-square input.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() <= HERMITIAN_TOL * self.max_abs().max(1.0)
    }

    /// `(M + M^H) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub fn kron(&self, other: &ComplexMatrix) -> Self {
        let (r2, c2) = (other.rows, other.cols);
        Self::from_fn(self.rows * r2, self.cols * c2, |i, j| self[(i / r2, j / c2)] * other[(i % r2, j % c2)])
    }

    /// `self · other`.
    pub fn matmul(&self, other: &ComplexMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let src = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        out
    }

    /// `A M A^H`.
    pub fn conjugate_by(&self, a: &ComplexMatrix) -> Self {
        a.matmul(self).matmul(&a.adjoint())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

/// Partial transposition of a `dA·dB × dA·dB` matrix on the chosen party.
pub fn partial_transpose(m: &ComplexMatrix, d_a: usize, d_b: usize, side: Party) -> Result<ComplexMatrix> {
    let n = d_a * d_b;
    if m.rows() != n || m.cols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: m.rows().max(m.cols()) });
    }
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..d_a {
        for j in 0..d_b {
            for k in 0..d_a {
                for l in 0..d_b {
                    let (r, c) = match side {
                        Party::A => (k * d_b + j, i * d_b + l),
                        Party::B => (i * d_b + l, k * d_b + j),
                    };
                    out[(i * d_b + j, k * d_b + l)] = m[(r, c)];
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eig, tensor};
    use proptest::prelude::*;

    fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let a = ComplexMatrix::from_fn(n, n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        a.hermitian_part()
    }

    #[test]
    fn product_projector_is_pt_invariant() {
        let v = tensor(&Ket::basis(2, 0), &Ket::basis(2, 1));
        let p = ComplexMatrix::projector(&v);
        assert_eq!(partial_transpose(&p, 2, 2, Party::B).unwrap(), p);
    }

    #[test]
    fn bell_projector_pt_spectrum() {
        let s = 1.0 / 2f64.sqrt();
        let bell = Ket::from_real(&[s, 0.0, 0.0, s]);
        let pt = partial_transpose(&ComplexMatrix::projector(&bell), 2, 2, Party::B).unwrap();
        let eig = hermitian_eig(&pt).unwrap();
        let expected = [-0.5, 0.5, 0.5, 0.5];
        for (got, want) in eig.values.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn dimension_mismatch() {
        let m = ComplexMatrix::identity(5);
        assert!(matches!(partial_transpose(&m, 2, 2, Party::A), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn both_sides_give_full_transpose() {
        for seed in 0..5 {
            let m = random_hermitian(12, seed);
            let ab = partial_transpose(&partial_transpose(&m, 3, 4, Party::B).unwrap(), 3, 4, Party::A).unwrap();
            let ba = partial_transpose(&partial_transpose(&m, 3, 4, Party::A).unwrap(), 3, 4, Party::B).unwrap();
            assert!((&ab - &m.transpose()).max_abs() < 1e-12);
            assert_eq!(ab, ba);
        }
    }

    #[test]
    fn matrix_json_shape() {
        let m = ComplexMatrix::from_vec(1, 2, vec![C64::new(1.0, 2.0), C64::new(0.5, 0.0)]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"rows":1,"cols":2,"data":[[1.0,2.0],[0.5,0.0]]}"#);
        assert_eq!(serde_json::from_str::<ComplexMatrix>(&s).unwrap(), m);
        assert!(serde_json::from_str::<ComplexMatrix>(r#"{"rows":2,"cols":2,"data":[]}"#).is_err());
    }

    proptest! {
        #[test]
        fn pt_is_an_involution_preserving_hermiticity(seed in 0u64..1000, da in 1usize..4, db in 1usize..4) {
            let m = random_hermitian(da * db, seed);
            for side in [Party::A, Party::B] {
                let once = partial_transpose(&m, da, db, side).unwrap();
                prop_assert!(once.is_hermitian());
                let twice = partial_transpose(&once, da, db, side).unwrap();
                prop_assert_eq!(&twice, &m);
            }
        }
    }
}
