//! Action of `exp(tA)` on vectors and matrices by a truncated Taylor series
//! with substeps, for sparse `A`.

use nalgebra_sparse::ops::serial::spmm_csr_dense;
use nalgebra_sparse::ops::Op;
use nalgebra_sparse::{CooMatrix, CsrMatrix};

use crate::quantum::{CMatrix, CVector, C64};

/// Each substep satisfies `‖A‖·h ≤ STEP_NORM`.
const STEP_NORM: f64 = 0.5;
/// Series stops once a term is this small relative to the running sum.
const SERIES_TOL: f64 = 1e-17;
const MAX_TERMS: usize = 40;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Sparse matrix `Σ c_j M_j` over the union pattern of fixed dense terms;
/// changing the coefficients only rewrites the value array.
#[derive(Debug, Clone)]
pub(crate) struct LinearCombination {
    terms: Vec<Vec<C64>>,
    matrix: CsrMatrix<C64>,
}

impl LinearCombination {
    pub(crate) fn new(terms: &[CMatrix]) -> Self {
        let (r, c) = terms[0].shape();
        let mut coo = CooMatrix::new(r, c);
        for i in 0..r {
            for j in 0..c {
                if terms.iter().any(|t| t[(i, j)] != ZERO) {
                    coo.push(i, j, ONE);
                }
            }
        }
        let mut matrix = CsrMatrix::from(&coo);
        let (offsets, cols) = (matrix.row_offsets().to_vec(), matrix.col_indices().to_vec());
        let values = terms
            .iter()
            .map(|t| {
                let mut v = Vec::with_capacity(cols.len());
                for i in 0..r {
                    for &j in &cols[offsets[i]..offsets[i + 1]] {
                        v.push(t[(i, j)]);
                    }
                }
                v
            })
            .collect::<Vec<_>>();
        matrix.values_mut().fill(ZERO);
        Self {
            terms: values,
            matrix,
        }
    }

    pub(crate) fn assemble(&mut self, coeffs: &[C64]) -> &CsrMatrix<C64> {
        debug_assert_eq!(coeffs.len(), self.terms.len());
        let vals = self.matrix.values_mut();
        vals.copy_from_slice(&self.terms[0]);
        vals.iter_mut().for_each(|v| *v *= coeffs[0]);
        for (t, &c) in self.terms.iter().zip(coeffs).skip(1) {
            if c != ZERO {
                vals.iter_mut().zip(t).for_each(|(v, x)| *v += c * x);
            }
        }
        &self.matrix
    }
}

pub(crate) fn csr_from_dense(m: &CMatrix) -> CsrMatrix<C64> {
    let mut lc = LinearCombination::new(std::slice::from_ref(m));
    lc.assemble(&[ONE]).clone()
}

/// Upper bound `max(‖A‖₁, ‖A‖∞)` on the spectral norm.
pub(crate) fn norm_bound(a: &CsrMatrix<C64>) -> f64 {
    let mut cols = vec![0.0; a.ncols()];
    let mut row_max: f64 = 0.0;
    for row in a.row_iter() {
        let mut s = 0.0;
        for (&j, v) in row.col_indices().iter().zip(row.values()) {
            let x = v.norm();
            s += x;
            cols[j] += x;
        }
        row_max = row_max.max(s);
    }
    cols.into_iter().fold(row_max, f64::max)
}

/// `y = A x`.
pub(crate) fn spmv(a: &CsrMatrix<C64>, x: &CVector, y: &mut CVector) {
    let (offsets, cols, vals) = (a.row_offsets(), a.col_indices(), a.values());
    for i in 0..a.nrows() {
        let mut acc = ZERO;
        for p in offsets[i]..offsets[i + 1] {
            acc += vals[p] * x[cols[p]];
        }
        y[i] = acc;
    }
}

/// `Y = A X` for dense `X`.
pub(crate) fn spmm(a: &CsrMatrix<C64>, x: &CMatrix, y: &mut CMatrix) {
    spmm_csr_dense(ZERO, y, ONE, Op::NoOp(a), Op::NoOp(x));
}

/// Minimal vector-space interface shared by state vectors and matrices.
pub(crate) trait Amplitudes: Clone {
    fn norm(&self) -> f64;
    fn scale_mut(&mut self, c: f64);
    fn add_assign(&mut self, other: &Self);
    fn copy_from(&mut self, other: &Self);
}

impl Amplitudes for CVector {
    fn norm(&self) -> f64 {
        nalgebra::Matrix::norm(self)
    }
    fn scale_mut(&mut self, c: f64) {
        *self *= C64::new(c, 0.0);
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn copy_from(&mut self, other: &Self) {
        nalgebra::Matrix::copy_from(self, other);
    }
}

impl Amplitudes for CMatrix {
    fn norm(&self) -> f64 {
        nalgebra::Matrix::norm(self)
    }
    fn scale_mut(&mut self, c: f64) {
        *self *= C64::new(c, 0.0);
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn copy_from(&mut self, other: &Self) {
        nalgebra::Matrix::copy_from(self, other);
    }
}

/// Replaces `x` by `exp(tA) x`, where `apply(u, v)` writes `A u` into `v` and
/// `bound` bounds `‖A‖`.
///
/// With the same `bound` and `t`, running this with `A†` gives the exact
/// adjoint polynomial up to the tail cutoff.
pub(crate) fn expmv<X: Amplitudes>(x: &mut X, t: f64, bound: f64, mut apply: impl FnMut(&X, &mut X)) {
    let substeps = ((bound * t.abs()) / STEP_NORM).ceil().max(1.0) as usize;
    let h = t / substeps as f64;
    let mut term = x.clone();
    let mut next = x.clone();
    for _ in 0..substeps {
        term.copy_from(x);
        let scale = x.norm();
        if scale == 0.0 {
            return;
        }
        for k in 1..=MAX_TERMS {
            apply(&term, &mut next);
            next.scale_mut(h / k as f64);
            std::mem::swap(&mut term, &mut next);
            x.add_assign(&term);
            if term.norm() <= SERIES_TOL * scale {
                break;
            }
        }
    }
}
