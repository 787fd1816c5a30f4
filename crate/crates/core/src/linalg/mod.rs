//! Dense complex linear algebra on small matrices (at most a few hundred
//! rows). Everything here is a pure function on value types.

mod eig;
mod ket;
mod matrix;
mod subspace;

pub use eig::{hermitian_eig, Eigen};
pub use ket::{tensor, Ket};
pub use matrix::{partial_transpose, ComplexMatrix};
pub use subspace::{gram_schmidt, numeric_rank, orthonormal_complement, range_basis, Subspace};

pub use num_complex::Complex64 as C64;

/// Default relative tolerance for rank decisions.
pub const RANK_TOL: f64 = 1e-9;

/// Tolerance on `max |M - M^H|` (relative to the largest entry) for a
/// matrix to count as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Returns `z` rotated so that the first amplitude with magnitude above
/// `1e-10` is real and positive.
pub(crate) fn fix_phase(amps: &mut [C64]) {
    let scale = amps.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return;
    }
    if let Some(lead) = amps.iter().find(|z| z.norm() > 1e-10 * scale) {
        let rot = lead.conj() / lead.norm();
        for z in amps.iter_mut() {
            *z *= rot;
        }
    }
}

/// Exact `e^{2πi·num/den}` for the quarter turns, `from_polar` otherwise.
pub fn root_of_unity(num: usize, den: usize) -> C64 {
    assert!(den > 0);
    let num = num % den;
    if (4 * num).is_multiple_of(den) {
        return match 4 * num / den {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        };
    }
    C64::from_polar(1.0, 2.0 * std::f64::consts::PI * num as f64 / den as f64)
}

/// JSON encoding of a complex number as `[re, im]`.
pub(crate) mod pair {
    use super::C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(data: &[C64], s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = data.iter().map(|z| [z.re, z.im]).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(pairs.into_iter().map(|[re, im]| C64::new(re, im)).collect())
    }
}
