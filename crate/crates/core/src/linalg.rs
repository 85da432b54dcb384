//! Dense complex matrix kernel.
//!
//! Everything here works on [`CMatrix`], a column-major `nalgebra` matrix of
//! `Complex64`. Eigenvalues are always returned in ascending order.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Absolute tolerance on `|M - M^dagger|` accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Eigenvalues in `[-PSD_TOL, 0)` are clamped to zero before fractional powers.
pub const PSD_TOL: f64 = 1e-10;

/// Which half of a bipartite system to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

/// Build a matrix from row-major real entries.
pub fn real_matrix(rows: usize, cols: usize, entries: &[f64]) -> CMatrix {
    CMatrix::from_row_iterator(rows, cols, entries.iter().map(|&x| c(x, 0.0)))
}

pub fn diag(entries: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&DVector::from_iterator(
        entries.len(),
        entries.iter().map(|&x| c(x, 0.0)),
    ))
}

/// Pauli matrices, `pauli(0)` is the identity.
pub fn pauli(i: usize) -> CMatrix {
    let o = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i_ = c(0.0, 1.0);
    match i {
        0 => CMatrix::from_row_slice(2, 2, &[one, o, o, one]),
        1 => CMatrix::from_row_slice(2, 2, &[o, one, one, o]),
        2 => CMatrix::from_row_slice(2, 2, &[o, -i_, i_, o]),
        3 => CMatrix::from_row_slice(2, 2, &[one, o, o, -one]),
        _ => panic!("pauli index {i} out of range"),
    }
}

/// Projector `|v><v|`.
pub fn projector(v: &DVector<Complex64>) -> CMatrix {
    v * v.adjoint()
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.trace()
}

/// `Tr(A^dagger B)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Squared Hilbert-Schmidt (Frobenius) norm.
pub fn hs_norm_sq(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

pub fn hs_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    hs_norm_sq(&(a - b)).sqrt()
}

/// Largest entrywise deviation from Hermiticity.
pub fn max_asymmetry(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    max_asymmetry(m) <= tol
}

/// Spectrum and orthonormal eigenvectors of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `i` belongs to `values[i]`.
    pub vectors: CMatrix,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, i: usize) -> DVector<Complex64> {
        self.vectors.column(i).into_owned()
    }

    /// `sum_i f(lambda_i) |v_i><v_i|`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let d = self.dim();
        let mut scaled = self.vectors.clone();
        for (i, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            scaled.column_mut(i).scale_mut(w);
        }
        let out = scaled * self.vectors.adjoint();
        debug_assert_eq!(out.nrows(), d);
        hermitize(out)
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map_spectrum(|x| x)
    }
}

/// `(M + M^dagger) / 2`.
pub fn hermitize(m: CMatrix) -> CMatrix {
    let adj = m.adjoint();
    (m + adj).scale(0.5)
}

pub fn hermitian_eig(m: &CMatrix) -> Result<EigenSystem> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let asym = max_asymmetry(m);
    let scale = m.iter().map(|z| z.norm()).fold(1.0f64, f64::max);
    if asym > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian {
            max_asymmetry: asym,
        });
    }
    let eig = SymmetricEigen::new(hermitize(m.clone()));
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(EigenSystem { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn eigvalsh(m: &CMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eig(m)?.values)
}

/// Clamp a PSD spectrum: tiny negatives (down to `-PSD_TOL`) and values
/// indistinguishable from zero at working precision become exactly zero.
pub(crate) fn clean_spectrum(values: &[f64]) -> Result<Vec<f64>> {
    let scale = values.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let floor = 64.0 * f64::EPSILON * scale;
    values
        .iter()
        .map(|&lam| {
            if lam < -PSD_TOL {
                Err(Error::NotPsd { eigenvalue: lam })
            } else if lam <= floor {
                Ok(0.0)
            } else {
                Ok(lam)
            }
        })
        .collect()
}

/// `M^alpha` for a PSD Hermitian `M` and `alpha` in `(0, 1]`.
pub fn psd_power(m: &CMatrix, alpha: f64) -> Result<CMatrix> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Range(format!("power alpha = {alpha} not in (0, 1]")));
    }
    let eig = hermitian_eig(m)?;
    let values = clean_spectrum(&eig.values)?;
    if alpha == 1.0 {
        return Ok(m.clone());
    }
    let eig = EigenSystem { values, ..eig };
    Ok(eig.map_spectrum(|x| if x > 0.0 { x.powf(alpha) } else { 0.0 }))
}

pub fn psd_sqrt(m: &CMatrix) -> Result<CMatrix> {
    psd_power(m, 0.5)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Partial trace of a `(dim_a*dim_b)`-square matrix, keeping one factor.
pub fn partial_trace(m: &CMatrix, dim_a: usize, dim_b: usize, keep: Subsystem) -> Result<CMatrix> {
    let d = dim_a * dim_b;
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::Dimension(format!(
            "partial trace: matrix is {}x{}, split {dim_a}x{dim_b} needs {d}x{d}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(match keep {
        Subsystem::A => CMatrix::from_fn(dim_a, dim_a, |i, j| {
            (0..dim_b).map(|k| m[(i * dim_b + k, j * dim_b + k)]).sum()
        }),
        Subsystem::B => CMatrix::from_fn(dim_b, dim_b, |i, j| {
            (0..dim_a).map(|k| m[(k * dim_b + i, k * dim_b + j)]).sum()
        }),
    })
}

/// Hilbert-Schmidt orthonormal Hermitian basis of `d x d` operators:
/// `1/sqrt(d)` followed by the generalized Gell-Mann matrices scaled by `1/sqrt(2)`
/// (symmetric and antisymmetric pairs, then the diagonal ones).
pub fn operator_basis(d: usize) -> Vec<CMatrix> {
    assert!(d >= 1, "operator basis needs d >= 1");
    let mut ops = Vec::with_capacity(d * d);
    ops.push(identity(d).scale(1.0 / (d as f64).sqrt()));
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..d {
        for k in (j + 1)..d {
            let mut sym = CMatrix::zeros(d, d);
            sym[(j, k)] = c(h, 0.0);
            sym[(k, j)] = c(h, 0.0);
            ops.push(sym);
            let mut asym = CMatrix::zeros(d, d);
            asym[(j, k)] = c(0.0, -h);
            asym[(k, j)] = c(0.0, h);
            ops.push(asym);
        }
    }
    for l in 1..d {
        let norm = ((l * (l + 1)) as f64).sqrt();
        let mut dg = CMatrix::zeros(d, d);
        for i in 0..l {
            dg[(i, i)] = c(1.0 / norm, 0.0);
        }
        dg[(l, l)] = c(-(l as f64) / norm, 0.0);
        ops.push(dg);
    }
    ops
}

/// Real symmetric matrix eigenvalues (ascending) with eigenvectors.
pub(crate) fn real_symmetric_eig(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}
