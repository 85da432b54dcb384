//! Local von Neumann measurements on subsystem A and the set of those that
//! leave the marginal `rho^A` unchanged.

use nalgebra::{DVector, Vector3};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, c, hermitian_eig, kron, pauli, CMatrix};
use crate::states::{random_unitary, BipartiteState};

/// Tolerance on idempotence, orthogonality and completeness of projectors.
pub const PROJECTOR_TOL: f64 = 1e-10;

/// Default relative tolerance for clustering degenerate marginal eigenvalues.
pub const DEFAULT_DEG_TOL: f64 = 1e-7;

/// A complete set of rank-1 orthogonal projectors `|v_k><v_k|` on subsystem A,
/// stored as the unitary whose columns are the `v_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveMeasurement {
    basis: CMatrix,
}

impl ProjectiveMeasurement {
    pub fn from_basis(basis: CMatrix) -> Result<Self> {
        if !basis.is_square() {
            return Err(Error::IncompleteMeasurement(
                "basis matrix is not square".into(),
            ));
        }
        let d = basis.nrows();
        let gram = basis.adjoint() * &basis;
        let dev = linalg::hs_distance(&gram, &linalg::identity(d));
        if dev > PROJECTOR_TOL * d as f64 {
            return Err(Error::IncompleteMeasurement(format!(
                "basis vectors are not orthonormal (deviation {dev:.3e})"
            )));
        }
        Ok(Self { basis })
    }

    /// Validates a list of projectors and extracts their ranges.
    pub fn from_projectors(projectors: &[CMatrix]) -> Result<Self> {
        let d = projectors.first().map(|p| p.nrows()).unwrap_or(0);
        if d == 0 || projectors.len() != d {
            return Err(Error::IncompleteMeasurement(format!(
                "need {d} rank-1 projectors, got {}",
                projectors.len()
            )));
        }
        let mut sum = CMatrix::zeros(d, d);
        let mut basis = CMatrix::zeros(d, d);
        for (k, p) in projectors.iter().enumerate() {
            if p.shape() != (d, d) || linalg::hs_distance(&(p * p), p) > PROJECTOR_TOL {
                return Err(Error::IncompleteMeasurement(format!(
                    "element {k} is not a projector"
                )));
            }
            let eig = hermitian_eig(p)?;
            if (eig.values[d - 1] - 1.0).abs() > PROJECTOR_TOL
                || (d > 1 && eig.values[d - 2].abs() > PROJECTOR_TOL)
            {
                return Err(Error::IncompleteMeasurement(format!(
                    "element {k} is not rank 1"
                )));
            }
            for (l, q) in projectors.iter().enumerate().skip(k + 1) {
                if linalg::hs_norm_sq(&(p * q)).sqrt() > PROJECTOR_TOL {
                    return Err(Error::IncompleteMeasurement(format!(
                        "elements {k} and {l} are not orthogonal"
                    )));
                }
            }
            sum += p;
            basis.set_column(k, &eig.vectors.column(d - 1));
        }
        if linalg::hs_distance(&sum, &linalg::identity(d)) > PROJECTOR_TOL {
            return Err(Error::IncompleteMeasurement(
                "projectors do not sum to identity".into(),
            ));
        }
        Self::from_basis(basis)
    }

    /// Qubit measurement `{(1 + r.sigma)/2, (1 - r.sigma)/2}` along the unit vector `r`.
    pub fn from_bloch(r: Vector3<f64>) -> Result<Self> {
        let norm = r.norm();
        if norm.is_nan() || norm <= 0.0 {
            return Err(Error::Range("Bloch direction must be non-zero".into()));
        }
        let r = r / norm;
        let half = |s: f64| {
            let mut m = linalg::identity(2);
            for i in 0..3 {
                m += pauli(i + 1).scale(s * r[i]);
            }
            m.scale(0.5)
        };
        Self::from_projectors(&[half(1.0), half(-1.0)])
    }

    /// Measurement in the computational basis of `C^d`.
    pub fn computational(d: usize) -> Self {
        Self {
            basis: linalg::identity(d),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn vector(&self, k: usize) -> DVector<Complex64> {
        self.basis.column(k).into_owned()
    }

    pub fn projectors(&self) -> Vec<CMatrix> {
        (0..self.dim())
            .map(|k| linalg::projector(&self.vector(k)))
            .collect()
    }

    /// Bloch vector of the first projector (qubits only).
    pub fn bloch_vector(&self) -> Option<[f64; 3]> {
        if self.dim() != 2 {
            return None;
        }
        let p = linalg::projector(&self.vector(0));
        Some([1, 2, 3].map(|i| linalg::hs_inner(&pauli(i), &p).re))
    }

    /// `sum_k P_k rho^A P_k == rho^A` within `tol`.
    pub fn preserves(&self, marginal: &CMatrix, tol: f64) -> bool {
        let mut out = CMatrix::zeros(self.dim(), self.dim());
        for p in self.projectors() {
            out += &p * marginal * &p;
        }
        linalg::hs_distance(&out, marginal) <= tol
    }
}

/// `sum_k (P_k (x) 1) X (P_k (x) 1)` for any `(dim_a*dim_b)`-square `X`.
pub fn dephase(
    x: &CMatrix,
    dim_a: usize,
    dim_b: usize,
    pm: &ProjectiveMeasurement,
) -> Result<CMatrix> {
    if pm.dim() != dim_a {
        return Err(Error::IncompleteMeasurement(format!(
            "measurement acts on dimension {}, subsystem A has {dim_a}",
            pm.dim()
        )));
    }
    let id_b = linalg::identity(dim_b);
    let mut out = CMatrix::zeros(x.nrows(), x.ncols());
    for p in pm.projectors() {
        let big = kron(&p, &id_b);
        out += &big * x * &big;
    }
    Ok(out)
}

/// Post-measurement state `Pi^A(rho)`.
pub fn apply_measurement(
    rho: &BipartiteState,
    pm: &ProjectiveMeasurement,
) -> Result<BipartiteState> {
    let out = dephase(rho.matrix(), rho.dim_a(), rho.dim_b(), pm)?;
    BipartiteState::new(rho.dim_a(), rho.dim_b(), out)
}

/// `sum_k || (<v_k| (x) 1) X (|v_k> (x) 1) ||_F^2 = Tr[X Pi^A(X)]` for Hermitian `X`,
/// evaluated blockwise without forming `Pi^A(X)`.
pub(crate) struct BlockOperator {
    dim_a: usize,
    dim_b: usize,
    /// `blocks[a * dim_a + a2]` is the `dim_b x dim_b` block `<a| X |a2>`.
    blocks: Vec<CMatrix>,
}

impl BlockOperator {
    pub(crate) fn new(x: &CMatrix, dim_a: usize, dim_b: usize) -> Self {
        let mut blocks = Vec::with_capacity(dim_a * dim_a);
        for a in 0..dim_a {
            for a2 in 0..dim_a {
                blocks.push(x.view((a * dim_b, a2 * dim_b), (dim_b, dim_b)).into_owned());
            }
        }
        Self {
            dim_a,
            dim_b,
            blocks,
        }
    }

    pub(crate) fn retained_weight(&self, basis: &CMatrix) -> f64 {
        let (m, n) = (self.dim_a, self.dim_b);
        let mut total = 0.0;
        let mut acc = CMatrix::zeros(n, n);
        for k in 0..m {
            acc.fill(c(0.0, 0.0));
            for a in 0..m {
                let va = basis[(a, k)].conj();
                if va == c(0.0, 0.0) {
                    continue;
                }
                for a2 in 0..m {
                    let w = va * basis[(a2, k)];
                    if w != c(0.0, 0.0) {
                        for (t, b) in acc.iter_mut().zip(self.blocks[a * m + a2].iter()) {
                            *t += w * b;
                        }
                    }
                }
            }
            total += linalg::hs_norm_sq(&acc);
        }
        total
    }
}

/// A cluster of (numerically) equal eigenvalues of `rho^A` with its eigenbasis.
#[derive(Debug, Clone, Serialize)]
pub struct DegenerateBlock {
    pub eigenvalues: Vec<f64>,
    #[serde(skip)]
    pub basis: CMatrix,
}

impl DegenerateBlock {
    pub fn size(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Real parameters of the block chart: 0, 2 (Bloch angles) or `k(k-1)`.
    pub fn parameter_count(&self) -> usize {
        match self.size() {
            0 | 1 => 0,
            2 => 2,
            k => k * (k - 1),
        }
    }
}

/// Marginal-preserving measurements: any orthonormal basis that refines the
/// spectral decomposition of `rho^A`. Free parameters live in blocks of size >= 2.
#[derive(Debug, Clone, Serialize)]
pub struct MeasurementSpace {
    pub blocks: Vec<DegenerateBlock>,
    #[serde(skip)]
    dim: usize,
}

pub fn measurement_space(marginal: &CMatrix, deg_tol: f64) -> Result<MeasurementSpace> {
    let eig = hermitian_eig(marginal)?;
    let d = eig.dim();
    let scale = eig
        .values
        .iter()
        .fold(0.0f64, |acc, x| acc.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..d {
        match groups.last_mut() {
            Some(g) if eig.values[i] - eig.values[*g.last().unwrap()] <= deg_tol * scale => {
                g.push(i)
            }
            _ => groups.push(vec![i]),
        }
    }
    let blocks = groups
        .into_iter()
        .map(|g| {
            let mut basis = CMatrix::zeros(d, g.len());
            for (col, &i) in g.iter().enumerate() {
                basis.set_column(col, &eig.vectors.column(i));
            }
            DegenerateBlock {
                eigenvalues: g.iter().map(|&i| eig.values[i]).collect(),
                basis,
            }
        })
        .collect();
    Ok(MeasurementSpace { blocks, dim: d })
}

impl MeasurementSpace {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn parameter_count(&self) -> usize {
        self.blocks
            .iter()
            .map(DegenerateBlock::parameter_count)
            .sum()
    }

    pub fn is_fixed(&self) -> bool {
        self.parameter_count() == 0
    }

    /// The marginal's own eigenbasis (the only admissible measurement when fixed).
    pub fn eigenbasis_measurement(&self) -> ProjectiveMeasurement {
        let mut basis = CMatrix::zeros(self.dim, self.dim);
        let mut col = 0;
        for b in &self.blocks {
            for j in 0..b.size() {
                basis.set_column(col, &b.basis.column(j));
                col += 1;
            }
        }
        ProjectiveMeasurement { basis }
    }

    /// Random base rotations for blocks charted by `W0 exp(iH)` (size >= 3).
    pub(crate) fn random_anchors(&self, rng: &mut ChaCha8Rng) -> Vec<CMatrix> {
        self.blocks
            .iter()
            .map(|b| {
                if b.size() >= 3 {
                    random_unitary(b.size(), rng)
                } else {
                    linalg::identity(b.size())
                }
            })
            .collect()
    }

    /// Random starting parameters: uniform on the sphere for qubit blocks,
    /// the anchor itself for larger blocks.
    pub(crate) fn random_parameters(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.parameter_count());
        for b in &self.blocks {
            match b.size() {
                0 | 1 => {}
                2 => {
                    let cos_t: f64 = rng.random_range(-1.0..1.0);
                    x.push(cos_t.acos());
                    x.push(rng.random_range(0.0..std::f64::consts::TAU));
                }
                k => x.extend(std::iter::repeat_n(0.0, k * (k - 1))),
            }
        }
        x
    }

    /// Basis unitary for the given chart coordinates.
    pub(crate) fn basis_for(&self, anchors: &[CMatrix], params: &[f64]) -> CMatrix {
        let mut basis = CMatrix::zeros(self.dim, self.dim);
        let mut col = 0;
        let mut offset = 0;
        for (b, anchor) in self.blocks.iter().zip(anchors) {
            let np = b.parameter_count();
            let w = block_rotation(b.size(), anchor, &params[offset..offset + np]);
            offset += np;
            let cols = &b.basis * w;
            for j in 0..b.size() {
                basis.set_column(col, &cols.column(j));
                col += 1;
            }
        }
        basis
    }

    pub(crate) fn measurement_for(
        &self,
        anchors: &[CMatrix],
        params: &[f64],
    ) -> ProjectiveMeasurement {
        ProjectiveMeasurement {
            basis: self.basis_for(anchors, params),
        }
    }
}

fn block_rotation(k: usize, anchor: &CMatrix, params: &[f64]) -> CMatrix {
    match k {
        0 | 1 => linalg::identity(k),
        2 => {
            let (theta, phi) = (params[0], params[1]);
            let (ct, st) = ((theta / 2.0).cos(), (theta / 2.0).sin());
            let e = Complex64::from_polar(1.0, phi);
            CMatrix::from_row_slice(2, 2, &[c(ct, 0.0), -e.conj() * st, e * st, c(ct, 0.0)])
        }
        _ => {
            let mut h = CMatrix::zeros(k, k);
            let mut idx = 0;
            for i in 0..k {
                for j in (i + 1)..k {
                    h[(i, j)] = c(params[idx], params[idx + 1]);
                    h[(j, i)] = c(params[idx], -params[idx + 1]);
                    idx += 2;
                }
            }
            let eig = hermitian_eig(&h).expect("generator is Hermitian");
            let mut phased = eig.vectors.clone();
            for (col, &lam) in eig.values.iter().enumerate() {
                let ph = Complex64::from_polar(1.0, lam);
                for row in 0..k {
                    phased[(row, col)] *= ph;
                }
            }
            anchor * phased * eig.vectors.adjoint()
        }
    }
}

/// Bloch vector `b_i = Tr(rho^A sigma_i)` of a qubit marginal.
pub(crate) fn bloch_axis(marginal: &CMatrix) -> Vector3<f64> {
    Vector3::from_fn(|i, _| linalg::hs_inner(&pauli(i + 1), marginal).re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag, identity};
    use crate::states::{bell_diagonal, CorrelationVector};
    use rand::SeedableRng;

    #[test]
    fn maximally_mixed_qubit_is_one_free_block() {
        let sp = measurement_space(&identity(2).scale(0.5), DEFAULT_DEG_TOL).unwrap();
        assert_eq!(sp.blocks.len(), 1);
        assert_eq!(sp.parameter_count(), 2);
    }

    #[test]
    fn nondegenerate_is_fixed() {
        let sp = measurement_space(&diag(&[0.3, 0.7]), DEFAULT_DEG_TOL).unwrap();
        assert!(sp.is_fixed());
        let pm = sp.eigenbasis_measurement();
        for (p, want) in pm
            .projectors()
            .iter()
            .zip([diag(&[1.0, 0.0]), diag(&[0.0, 1.0])])
        {
            assert!(linalg::hs_distance(p, &want) < 1e-14);
        }
    }

    #[test]
    fn partially_degenerate_qutrit() {
        let sp = measurement_space(&diag(&[0.5, 0.25, 0.25]), DEFAULT_DEG_TOL).unwrap();
        let sizes: Vec<usize> = sp.blocks.iter().map(DegenerateBlock::size).collect();
        assert_eq!(sizes, vec![2, 1]);
        assert_eq!(sp.parameter_count(), 2);
    }

    #[test]
    fn charted_bases_preserve_marginal() {
        let marginal = diag(&[0.2, 0.2, 0.2, 0.4]);
        let sp = measurement_space(&marginal, DEFAULT_DEG_TOL).unwrap();
        assert_eq!(sp.parameter_count(), 6);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let anchors = sp.random_anchors(&mut rng);
        let params: Vec<f64> = (0..6).map(|i| 0.3 * i as f64 - 0.7).collect();
        let pm = sp.measurement_for(&anchors, &params);
        assert!(ProjectiveMeasurement::from_basis(pm.basis().clone()).is_ok());
        assert!(pm.preserves(&marginal, 1e-12));
    }

    #[test]
    fn dephasing_bell_state() {
        let bell = bell_diagonal(CorrelationVector::new(1.0, -1.0, 1.0).unwrap()).unwrap();
        let out = apply_measurement(&bell, &ProjectiveMeasurement::computational(2)).unwrap();
        assert!(linalg::hs_distance(out.matrix(), &diag(&[0.5, 0.0, 0.0, 0.5])) < 1e-15);
        let twice = apply_measurement(&out, &ProjectiveMeasurement::computational(2)).unwrap();
        assert!(linalg::hs_distance(twice.matrix(), out.matrix()) < 1e-15);
    }

    #[test]
    fn product_state_unchanged_by_eigenbasis() {
        let ra = crate::linalg::real_matrix(2, 2, &[0.6, 0.2, 0.2, 0.4]);
        let rb = diag(&[0.1, 0.9]);
        let rho = BipartiteState::product(&ra, &rb).unwrap();
        let pm = measurement_space(&ra, DEFAULT_DEG_TOL)
            .unwrap()
            .eigenbasis_measurement();
        let out = apply_measurement(&rho, &pm).unwrap();
        assert!(linalg::hs_distance(out.matrix(), rho.matrix()) < 1e-14);
    }

    #[test]
    fn rejects_bad_projector_sets() {
        let p0 = diag(&[1.0, 0.0]);
        assert!(ProjectiveMeasurement::from_projectors(std::slice::from_ref(&p0)).is_err());
        assert!(ProjectiveMeasurement::from_projectors(&[p0.clone(), p0.clone()]).is_err());
        assert!(ProjectiveMeasurement::from_projectors(&[p0, diag(&[0.0, 0.5])]).is_err());
        let rho = crate::states::random_state(3, 2, 6, 1).unwrap();
        assert!(matches!(
            apply_measurement(&rho, &ProjectiveMeasurement::computational(2)),
            Err(Error::IncompleteMeasurement(_))
        ));
    }

    #[test]
    fn retained_weight_matches_dense_route() {
        let rho = crate::states::random_state(3, 2, 6, 9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = random_unitary(3, &mut rng);
        let pm = ProjectiveMeasurement::from_basis(u.clone()).unwrap();
        let dense = linalg::hs_inner(rho.matrix(), &dephase(rho.matrix(), 3, 2, &pm).unwrap()).re;
        let fast = BlockOperator::new(rho.matrix(), 3, 2).retained_weight(&u);
        assert!((dense - fast).abs() < 1e-14);
    }

    #[test]
    fn bloch_measurement_round_trip() {
        let r = Vector3::new(0.3, -0.4, 0.5);
        let pm = ProjectiveMeasurement::from_bloch(r).unwrap();
        let got = pm.bloch_vector().unwrap();
        let rn = r / r.norm();
        for i in 0..3 {
            assert!((got[i] - rn[i]).abs() < 1e-12);
        }
    }
}
