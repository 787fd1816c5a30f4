use serde::{Deserialize, Serialize};

use super::{fix_phase, C64};

/// A vector of `C^n`, possibly unnormalized.
///
/// JSON form: `{"dim": n, "amp": [[re, im], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KetRepr", into = "KetRepr")]
pub struct Ket(Vec<C64>);

#[derive(Serialize, Deserialize)]
struct KetRepr {
    dim: usize,
    #[serde(with = "super::pair")]
    amp: Vec<C64>,
}

impl TryFrom<KetRepr> for Ket {
    type Error = String;

    fn try_from(r: KetRepr) -> Result<Self, Self::Error> {
        if r.amp.len() != r.dim {
            return Err(format!("ket dim {} but {} amplitudes", r.dim, r.amp.len()));
        }
        Ok(Ket(r.amp))
    }
}

impl From<Ket> for KetRepr {
    fn from(k: Ket) -> Self {
        KetRepr { dim: k.0.len(), amp: k.0 }
    }
}

impl Ket {
    pub fn new(amplitudes: Vec<C64>) -> Self {
        Ket(amplitudes)
    }

    pub fn zeros(dim: usize) -> Self {
        Ket(vec![C64::new(0.0, 0.0); dim])
    }

    /// Computational basis vector `|index⟩` of `C^dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut k = Self::zeros(dim);
        k.0[index] = C64::new(1.0, 0.0);
        k
    }

    pub fn from_real(values: &[f64]) -> Self {
        Ket(values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Unnormalized sum of the basis vectors `|lo⟩ + ... + |hi⟩`.
    pub fn uniform(dim: usize, lo: usize, hi: usize) -> Self {
        let mut k = Self::zeros(dim);
        for z in &mut k.0[lo..=hi] {
            *z = C64::new(1.0, 0.0);
        }
        k
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.0
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.0
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &Ket) -> C64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// The unit vector parallel to `self`. The zero vector is returned as is.
    pub fn normalized(&self) -> Ket {
        let n = self.norm();
        if n == 0.0 {
            return self.clone();
        }
        self.scale(C64::new(1.0 / n, 0.0))
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() < 1e-12
    }

    pub fn conj(&self) -> Ket {
        Ket(self.0.iter().map(|z| z.conj()).collect())
    }

    pub fn scale(&self, c: C64) -> Ket {
        Ket(self.0.iter().map(|z| z * c).collect())
    }

    pub fn add(&self, other: &Ket) -> Ket {
        Ket(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Ket) -> Ket {
        Ket(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: C64, other: &Ket) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += c * b;
        }
    }

    /// Rotates the global phase so the leading nonzero amplitude is real
    /// and positive.
    pub fn with_fixed_phase(mut self) -> Ket {
        fix_phase(&mut self.0);
        self
    }

    /// Largest `|self_i - other_i|`.
    pub fn max_abs_diff(&self, other: &Ket) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<usize> for Ket {
    type Output = C64;

    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

impl std::ops::IndexMut<usize> for Ket {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.0[i]
    }
}

/// Kronecker product `a ⊗ b`; amplitude `i·dim(b) + j` is `a_i b_j`.
pub fn tensor(a: &Ket, b: &Ket) -> Ket {
    let mut out = Vec::with_capacity(a.dim() * b.dim());
    for x in &a.0 {
        for y in &b.0 {
            out.push(x * y);
        }
    }
    Ket(out)
}
