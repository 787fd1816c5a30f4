//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each pivot `(p, q)` is annihilated by a unitary `U = D·R` where
//! `D = diag(1, e^{-iφ})` makes the pivot real and `R` is the classical real
//! Jacobi rotation. Sweeps stop once the off-diagonal Frobenius mass drops
//! below `1e-12·‖M‖_F`.

use super::{fix_phase, ComplexMatrix, Ket, C64};
use crate::{Error, Result};

const OFF_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Eigenpairs sorted by ascending eigenvalue.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Ket>,
}

impl Eigen {
    /// `Σ λ_i |v_i⟩⟨v_i|`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        let mut m = ComplexMatrix::zeros(n, n);
        for (&l, v) in self.values.iter().zip(&self.vectors) {
            m.add_outer(C64::new(l, 0.0), v, v);
        }
        m
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

pub fn hermitian_eig(m: &ComplexMatrix) -> Result<Eigen> {
    if !m.is_square() {
        return Err(Error::Argument(format!("eigensolver needs a square matrix, got {}x{}", m.rows(), m.cols())));
    }
    if !m.is_hermitian() {
        return Err(Error::Argument(format!(
            "matrix is not Hermitian (defect {:.3e})",
            m.hermiticity_defect()
        )));
    }
    let n = m.rows();
    let mut a: Vec<C64> = m.hermitian_part().data().to_vec();
    let mut v: Vec<C64> = ComplexMatrix::identity(n).data().to_vec();
    let norm = m.frobenius_norm();

    if norm > 0.0 {
        for _ in 0..MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[i * n + j].norm_sqr())
                .sum::<f64>()
                .sqrt();
            if off <= OFF_TOL * norm {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    rotate(&mut a, &mut v, n, p, q, norm);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].re.total_cmp(&a[j * n + j].re));
    let values = order.iter().map(|&i| a[i * n + i].re).collect();
    let vectors = order
        .iter()
        .map(|&j| {
            let mut col: Vec<C64> = (0..n).map(|i| v[i * n + j]).collect();
            fix_phase(&mut col);
            Ket::new(col)
        })
        .collect();
    Ok(Eigen { values, vectors })
}

fn rotate(a: &mut [C64], v: &mut [C64], n: usize, p: usize, q: usize, norm: f64) {
    let apq = a[p * n + q];
    let mag = apq.norm();
    if mag <= 1e-18 * norm {
        return;
    }
    let phase = apq / mag;
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let sgn = if theta >= 0.0 { 1.0 } else { -1.0 };
        sgn / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let ph = phase.conj();
    let u_pp = C64::new(c, 0.0);
    let u_pq = C64::new(s, 0.0);
    let u_qp = ph * (-s);
    let u_qq = ph * c;

    // A <- A U
    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = akp * u_pp + akq * u_qp;
        a[k * n + q] = akp * u_pq + akq * u_qq;
    }
    // A <- U^H A
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[q * n + k] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    // V <- V U
    for k in 0..n {
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = vkp * u_pp + vkq * u_qp;
        v[k * n + q] = vkp * u_pq + vkq * u_qq;
    }
    a[p * n + q] = C64::new(0.0, 0.0);
    a[q * n + p] = C64::new(0.0, 0.0);
    a[p * n + p].im = 0.0;
    a[q * n + q].im = 0.0;
}
