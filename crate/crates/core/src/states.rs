//! Bipartite density matrices and the state families used throughout the crate.

use std::fmt;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    self, c, hermitian_eig, identity, kron, partial_trace, pauli, CMatrix, Subsystem,
};

/// Tolerance for Hermiticity, unit trace and positivity of a state.
pub const STATE_TOL: f64 = 1e-10;

/// Rank-1 test tolerance used by the pure-state paths.
pub const PURE_TOL: f64 = 1e-8;

/// A density matrix on `C^dim_a (x) C^dim_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    dim_a: usize,
    dim_b: usize,
    matrix: CMatrix,
}

impl BipartiteState {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(dim_a: usize, dim_b: usize, matrix: CMatrix) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::Dimension(
                "subsystem dimensions must be positive".into(),
            ));
        }
        let d = dim_a * dim_b;
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::Dimension(format!(
                "{dim_a}x{dim_b} state needs a {d}x{d} matrix, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let asym = linalg::max_asymmetry(&matrix);
        if asym > STATE_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (max asymmetry {asym:.3e})"
            )));
        }
        let tr = matrix.trace();
        if (tr - c(1.0, 0.0)).norm() > STATE_TOL {
            return Err(Error::InvalidState(format!(
                "trace is {:.12} + {:.3e}i, expected 1",
                tr.re, tr.im
            )));
        }
        let matrix = linalg::hermitize(matrix);
        let min_eig = hermitian_eig(&matrix)?.values[0];
        if min_eig < -STATE_TOL {
            return Err(Error::InvalidState(format!(
                "not positive semidefinite (eigenvalue {min_eig:.3e})"
            )));
        }
        Ok(Self {
            dim_a,
            dim_b,
            matrix,
        })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn marginal(&self, keep: Subsystem) -> CMatrix {
        partial_trace(&self.matrix, self.dim_a, self.dim_b, keep)
            .expect("state dimensions are consistent by construction")
    }

    pub fn marginal_a(&self) -> CMatrix {
        self.marginal(Subsystem::A)
    }

    pub fn marginal_b(&self) -> CMatrix {
        self.marginal(Subsystem::B)
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        linalg::hs_norm_sq(&self.matrix)
    }

    /// Ascending eigenvalues.
    pub fn spectrum(&self) -> Vec<f64> {
        hermitian_eig(&self.matrix)
            .expect("state is Hermitian by construction")
            .values
    }

    pub fn sqrt(&self) -> CMatrix {
        linalg::psd_sqrt(&self.matrix).expect("state is PSD by construction")
    }

    pub fn is_pure(&self) -> bool {
        self.spectrum().last().copied().unwrap_or(0.0) >= 1.0 - PURE_TOL
    }

    /// `(U (x) V) rho (U (x) V)^dagger`.
    pub fn local_unitary(&self, u: &CMatrix, v: &CMatrix) -> Result<Self> {
        if u.nrows() != self.dim_a || v.nrows() != self.dim_b {
            return Err(Error::Dimension(
                "local unitary dimensions do not match".into(),
            ));
        }
        let w = kron(u, v);
        Self::new(self.dim_a, self.dim_b, &w * &self.matrix * w.adjoint())
    }

    pub fn product(rho_a: &CMatrix, rho_b: &CMatrix) -> Result<Self> {
        Self::new(rho_a.nrows(), rho_b.nrows(), kron(rho_a, rho_b))
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: StateFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.into_state()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&StateFile::from_state(self))
            .expect("state file serialization cannot fail")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string() + "\n")?;
        Ok(())
    }
}

/// On-disk state document: `{"dimA": m, "dimB": n, "matrix": [[[re, im], ...], ...]}`.
///
/// Floats are written in shortest round-trip form, so no precision is lost.
#[derive(Debug, Serialize, Deserialize)]
pub struct StateFile {
    #[serde(rename = "dimA")]
    pub dim_a: usize,
    #[serde(rename = "dimB")]
    pub dim_b: usize,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl StateFile {
    pub fn from_state(state: &BipartiteState) -> Self {
        let m = state.matrix();
        let matrix = (0..m.nrows())
            .map(|i| {
                (0..m.ncols())
                    .map(|j| [m[(i, j)].re, m[(i, j)].im])
                    .collect()
            })
            .collect();
        Self {
            dim_a: state.dim_a,
            dim_b: state.dim_b,
            matrix,
        }
    }

    pub fn into_state(self) -> Result<BipartiteState> {
        let d = self.dim_a * self.dim_b;
        if self.matrix.len() != d || self.matrix.iter().any(|row| row.len() != d) {
            return Err(Error::Parse(format!(
                "matrix must be {d}x{d} for dimA={} dimB={}",
                self.dim_a, self.dim_b
            )));
        }
        let m = CMatrix::from_fn(d, d, |i, j| {
            let [re, im] = self.matrix[i][j];
            c(re, im)
        });
        BipartiteState::new(self.dim_a, self.dim_b, m)
    }
}

/// Squared Schmidt coefficients, stored in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtSpectrum(Vec<f64>);

impl SchmidtSpectrum {
    pub fn new(mut coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidState("empty Schmidt spectrum".into()));
        }
        if let Some(&neg) = coefficients.iter().find(|&&s| s < 0.0 || !s.is_finite()) {
            return Err(Error::InvalidState(format!(
                "Schmidt coefficient {neg} is negative"
            )));
        }
        let total: f64 = coefficients.iter().sum();
        if (total - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!(
                "Schmidt coefficients sum to {total}, expected 1"
            )));
        }
        coefficients.sort_by(|a, b| b.total_cmp(a));
        Ok(Self(coefficients))
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `sum_k s_k^2`.
    pub fn purity(&self) -> f64 {
        self.0.iter().map(|s| s * s).sum()
    }
}

/// Correlation vector `(c1, c2, c3)` of a Bell-diagonal two-qubit state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationVector {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl CorrelationVector {
    /// Slack allowed on the tetrahedron constraint `lambda_ab >= 0`.
    pub const TETRAHEDRON_TOL: f64 = 1e-12;

    pub fn new(c1: f64, c2: f64, c3: f64) -> Result<Self> {
        let cv = Self { c1, c2, c3 };
        cv.validate()?;
        Ok(cv)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.c1, self.c2, self.c3]
    }

    pub fn from_array(c: [f64; 3]) -> Result<Self> {
        Self::new(c[0], c[1], c[2])
    }

    /// Bell-basis eigenvalues `lambda_{a,b}`, indexed `[a][b]`.
    pub fn eigenvalues(&self) -> [[f64; 2]; 2] {
        let sign = |k: u8| if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        let mut out = [[0.0; 2]; 2];
        for a in 0..2u8 {
            for b in 0..2u8 {
                out[a as usize][b as usize] =
                    0.25 * (1.0 + sign(a) * self.c1 - sign(a + b) * self.c2 + sign(b) * self.c3);
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.as_array().iter().any(|x| !x.is_finite()) {
            return Err(Error::Range(
                "correlation vector has non-finite entries".into(),
            ));
        }
        let lam = self.eigenvalues();
        let mut negative = Vec::new();
        for a in 0..2 {
            for b in 0..2 {
                if lam[a][b] < -Self::TETRAHEDRON_TOL {
                    negative.push(((a as u8, b as u8), lam[a][b]));
                }
            }
        }
        if negative.is_empty() {
            Ok(())
        } else {
            Err(Error::OutsideTetrahedron { negative })
        }
    }

    /// `c_i = Tr(rho sigma_i (x) sigma_i)` for any two-qubit state.
    pub fn from_state(rho: &BipartiteState) -> Result<Self> {
        if rho.dim_a() != 2 || rho.dim_b() != 2 {
            return Err(Error::Dimension(
                "correlation vector needs a 2x2 state".into(),
            ));
        }
        let comp = |i| linalg::hs_inner(&kron(&pauli(i), &pauli(i)), rho.matrix()).re;
        Ok(Self {
            c1: comp(1),
            c2: comp(2),
            c3: comp(3),
        })
    }
}

impl fmt::Display for CorrelationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.c1, self.c2, self.c3)
    }
}

/// `|Psi> = sum_i sqrt(s_i) |i>|i>` in the computational bases.
pub fn pure_from_schmidt(
    s: &SchmidtSpectrum,
    dim_a: usize,
    dim_b: usize,
) -> Result<BipartiteState> {
    if s.len() > dim_a.min(dim_b) {
        return Err(Error::Dimension(format!(
            "{} Schmidt coefficients do not fit a {dim_a}x{dim_b} system",
            s.len()
        )));
    }
    let mut psi = DVector::<Complex64>::zeros(dim_a * dim_b);
    for (i, &si) in s.coefficients().iter().enumerate() {
        psi[i * dim_b + i] = c(si.sqrt(), 0.0);
    }
    BipartiteState::new(dim_a, dim_b, linalg::projector(&psi))
}

/// `1/4 [1 (x) 1 + sum_i c_i sigma_i (x) sigma_i]`.
pub fn bell_diagonal(cv: CorrelationVector) -> Result<BipartiteState> {
    cv.validate()?;
    let mut m = identity(4);
    for (i, ci) in cv.as_array().into_iter().enumerate() {
        m += kron(&pauli(i + 1), &pauli(i + 1)).scale(ci);
    }
    BipartiteState::new(2, 2, m.scale(0.25))
}

/// Swap operator `F = sum_{kl} |kl><lk|` on `C^m (x) C^m`.
pub fn swap_operator(m: usize) -> CMatrix {
    let mut f = CMatrix::zeros(m * m, m * m);
    for k in 0..m {
        for l in 0..m {
            f[(k * m + l, l * m + k)] = c(1.0, 0.0);
        }
    }
    f
}

/// `|Psi+> = sum_i |ii> / sqrt(m)`.
pub fn max_entangled_vector(m: usize) -> DVector<Complex64> {
    let mut psi = DVector::<Complex64>::zeros(m * m);
    let amp = 1.0 / (m as f64).sqrt();
    for i in 0..m {
        psi[i * m + i] = c(amp, 0.0);
    }
    psi
}

/// Werner state with flip expectation `Tr(omega F) = x`.
pub fn werner(m: usize, x: f64) -> Result<BipartiteState> {
    if m < 2 {
        return Err(Error::Range(format!(
            "Werner dimension m = {m} must be >= 2"
        )));
    }
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::Range(format!(
            "Werner parameter x = {x} not in [-1, 1]"
        )));
    }
    let mf = m as f64;
    let denom = mf * mf * mf - mf;
    let mat =
        identity(m * m).scale((mf - x) / denom) + swap_operator(m).scale((mf * x - 1.0) / denom);
    BipartiteState::new(m, m, mat)
}

/// Isotropic state with fidelity `<Psi+|rho|Psi+> = x`.
pub fn isotropic(m: usize, x: f64) -> Result<BipartiteState> {
    if m < 2 {
        return Err(Error::Range(format!(
            "isotropic dimension m = {m} must be >= 2"
        )));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Range(format!(
            "isotropic parameter x = {x} not in [0, 1]"
        )));
    }
    let m2 = (m * m) as f64;
    let p = linalg::projector(&max_entangled_vector(m));
    let mat = identity(m * m).scale((1.0 - x) / (m2 - 1.0)) + p.scale((m2 * x - 1.0) / (m2 - 1.0));
    BipartiteState::new(m, m, mat)
}

/// Complex Ginibre matrix with i.i.d. standard normal real and imaginary parts.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-random unitary (QR of a Ginibre matrix with the phase fix on `R`'s diagonal).
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(d, d, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            c(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random density matrix `G G^dagger / Tr` with `G` a `dim x rank` Ginibre matrix.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(dim, rank, rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    linalg::hermitize(m.unscale(tr))
}

/// Seeded induced-Ginibre state of the requested rank.
pub fn random_state(dim_a: usize, dim_b: usize, rank: usize, seed: u64) -> Result<BipartiteState> {
    let d = dim_a * dim_b;
    if rank == 0 || rank > d {
        return Err(Error::Range(format!("rank {rank} not in [1, {d}]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    BipartiteState::new(dim_a, dim_b, random_density(d, rank, &mut rng))
}

/// Random pure state with Haar-distributed vector.
pub fn random_pure_state(dim_a: usize, dim_b: usize, seed: u64) -> Result<BipartiteState> {
    random_state(dim_a, dim_b, 1, seed)
}

/// `rho (x) sigma` regrouped as `A : (BC)`, together with the ancilla purity `Tr(sigma^2)`.
pub fn add_ancilla(rho: &BipartiteState, sigma: &CMatrix) -> Result<(BipartiteState, f64)> {
    let dc = sigma.nrows();
    let tr = sigma.trace();
    if !sigma.is_square() || (tr - c(1.0, 0.0)).norm() > STATE_TOL {
        return Err(Error::InvalidState(
            "ancilla is not a unit-trace square matrix".into(),
        ));
    }
    if linalg::eigvalsh(sigma)?[0] < -STATE_TOL {
        return Err(Error::InvalidState(
            "ancilla is not positive semidefinite".into(),
        ));
    }
    let state = BipartiteState::new(rho.dim_a(), rho.dim_b() * dc, kron(rho.matrix(), sigma))?;
    Ok((state, linalg::hs_norm_sq(sigma)))
}

/// Squared Schmidt coefficients of a pure state, descending, zeros trimmed.
pub fn schmidt_spectrum(rho: &BipartiteState) -> Result<SchmidtSpectrum> {
    let eig = hermitian_eig(rho.matrix())?;
    let top = *eig.values.last().expect("non-empty spectrum");
    if top < 1.0 - PURE_TOL {
        let rank = eig.values.iter().filter(|&&l| l > PURE_TOL).count();
        return Err(Error::NotPure { rank });
    }
    let psi = eig.vector(eig.dim() - 1);
    let (da, db) = (rho.dim_a(), rho.dim_b());
    let coeff = DMatrix::from_fn(da, db, |i, j| psi[i * db + j]);
    let sv = coeff.singular_values();
    let mut s: Vec<f64> = sv.iter().map(|x| x * x).filter(|&x| x > 1e-12).collect();
    let total: f64 = s.iter().sum();
    for x in &mut s {
        *x /= total;
    }
    SchmidtSpectrum::new(s)
}
