//! Measurement-induced nonlocality: the affinity-based measure and its
//! Hilbert-Schmidt and square-root (Luo-Fu) companions.
//!
//! All three maximize a disturbance over the marginal-preserving measurements
//! described by [`MeasurementSpace`]. The affinity measure reduces to
//! `1 - min Tr[sqrt(rho) Pi(sqrt(rho))]`.

use nalgebra::{DMatrix, Matrix3, Vector3};
use serde::Serialize;

use super::measurement::{
    bloch_axis, dephase, measurement_space, BlockOperator, MeasurementSpace, ProjectiveMeasurement,
    DEFAULT_DEG_TOL,
};
use super::optimize::{multi_start, LocalSearch};
use crate::error::{Error, Result};
use crate::linalg::{self, kron, operator_basis, pauli, real_symmetric_eig, CMatrix};
use crate::states::{schmidt_spectrum, BipartiteState};

/// How a [`MinResult`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// `1 - sum_k s_k^2` from the Schmidt spectrum.
    PureFormula,
    /// Qubit-qudit reduction to the 3x3 matrix `T`.
    #[serde(rename = "closed-2xn")]
    Closed2xn,
    /// Multi-start search over marginal-preserving measurements.
    BruteForce,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::PureFormula => "pure-formula",
            Method::Closed2xn => "closed-2xn",
            Method::BruteForce => "brute-force",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Optimizer settings shared by all MIN computations.
#[derive(Debug, Clone, Copy)]
pub struct MinConfig {
    pub seed: u64,
    pub starts: usize,
    /// Relative tolerance for treating marginal eigenvalues as degenerate.
    pub deg_tol: f64,
    /// Force a method instead of dispatching on the state.
    pub method: Option<Method>,
    pub search: LocalSearch,
}

impl Default for MinConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            starts: 32,
            deg_tol: DEFAULT_DEG_TOL,
            method: None,
            search: LocalSearch::default(),
        }
    }
}

impl MinConfig {
    pub fn with_method(self, method: Method) -> Self {
        Self {
            method: Some(method),
            ..self
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }
}

#[derive(Debug, Clone)]
pub struct MinResult {
    pub value: f64,
    pub method: Method,
    pub measurement: ProjectiveMeasurement,
    /// Objective evaluations spent (1 for the analytic paths).
    pub iterations: usize,
    /// False when some local search ran out of budget; the best value is still reported.
    pub converged: bool,
}

struct Optimum {
    value: f64,
    measurement: ProjectiveMeasurement,
    evals: usize,
    converged: bool,
}

/// Minimize `objective(basis)` over the chart of `space`.
fn minimize_over<F>(space: &MeasurementSpace, cfg: &MinConfig, objective: F) -> Optimum
where
    F: Fn(&CMatrix) -> f64 + Sync,
{
    if space.is_fixed() {
        let measurement = space.eigenbasis_measurement();
        let value = objective(measurement.basis());
        return Optimum {
            value,
            measurement,
            evals: 1,
            converged: true,
        };
    }
    let res = multi_start(
        cfg.starts,
        cfg.seed,
        &cfg.search,
        |rng| {
            let anchors = space.random_anchors(rng);
            let x0 = space.random_parameters(rng);
            (anchors, x0)
        },
        |anchors, x| objective(&space.basis_for(anchors, x)),
    );
    Optimum {
        value: res.best.value,
        measurement: space.measurement_for(&res.start, &res.best.x),
        evals: res.total_evals,
        converged: res.all_converged,
    }
}

/// Affinity-based MIN, dispatching to the cheapest exact route.
pub fn min_affinity(rho: &BipartiteState, cfg: &MinConfig) -> Result<MinResult> {
    let method = cfg.method.unwrap_or_else(|| {
        if rho.is_pure() {
            Method::PureFormula
        } else if rho.dim_a() == 2 {
            Method::Closed2xn
        } else {
            Method::BruteForce
        }
    });
    match method {
        Method::PureFormula => min_affinity_pure(rho, cfg.deg_tol),
        Method::Closed2xn => min_affinity_2xn(rho, cfg.deg_tol),
        Method::BruteForce => min_affinity_brute_force(rho, cfg),
    }
}

/// `1 - sum_k s_k^2` for a pure state.
pub fn min_affinity_pure(rho: &BipartiteState, deg_tol: f64) -> Result<MinResult> {
    let s = schmidt_spectrum(rho)?;
    let measurement = measurement_space(&rho.marginal_a(), deg_tol)?.eigenbasis_measurement();
    Ok(MinResult {
        value: (1.0 - s.purity()).max(0.0),
        method: Method::PureFormula,
        measurement,
        iterations: 1,
        converged: true,
    })
}

pub fn min_affinity_brute_force(rho: &BipartiteState, cfg: &MinConfig) -> Result<MinResult> {
    let space = measurement_space(&rho.marginal_a(), cfg.deg_tol)?;
    let ops = BlockOperator::new(&rho.sqrt(), rho.dim_a(), rho.dim_b());
    let opt = minimize_over(&space, cfg, |basis| ops.retained_weight(basis));
    Ok(MinResult {
        value: (1.0 - opt.value).max(0.0),
        method: Method::BruteForce,
        measurement: opt.measurement,
        iterations: opt.evals,
        converged: opt.converged,
    })
}

/// `T_ij = Tr[sqrt(rho) (sigma_i (x) 1) sqrt(rho) (sigma_j (x) 1)]` for a qubit-qudit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TMatrix(pub Matrix3<f64>);

impl TMatrix {
    /// Ascending eigenvalues with matching unit eigenvectors.
    pub fn eigen(&self) -> ([f64; 3], [Vector3<f64>; 3]) {
        let dm = DMatrix::from_fn(3, 3, |i, j| self.0[(i, j)]);
        let (vals, vecs) = real_symmetric_eig(&dm);
        let v = |k: usize| Vector3::new(vecs[(0, k)], vecs[(1, k)], vecs[(2, k)]);
        ([vals[0], vals[1], vals[2]], [v(0), v(1), v(2)])
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigen().0[0]
    }

    /// `Tr[sqrt(rho) Pi_r(sqrt(rho))] = (1 + r^T T r) / 2` for the measurement along unit `r`.
    pub fn retained_weight(&self, r: &Vector3<f64>) -> f64 {
        0.5 * (1.0 + r.dot(&(self.0 * r)))
    }
}

pub fn t_matrix(rho: &BipartiteState) -> Result<TMatrix> {
    if rho.dim_a() != 2 {
        return Err(Error::Dimension(format!(
            "T matrix needs a qubit on A, got dimA = {}",
            rho.dim_a()
        )));
    }
    let s = rho.sqrt();
    let id_b = linalg::identity(rho.dim_b());
    let legs: Vec<CMatrix> = (1..=3).map(|i| &s * kron(&pauli(i), &id_b)).collect();
    let mut t = Matrix3::zeros();
    for i in 0..3 {
        for j in i..3 {
            // Tr(A B) with A = S s_i, B = S s_j
            let v = (&legs[i] * &legs[j]).trace().re;
            t[(i, j)] = v;
            t[(j, i)] = v;
        }
    }
    Ok(TMatrix(t))
}

/// Qubit-qudit affinity MIN through `T`. A degenerate marginal leaves the
/// Bloch direction free (value `(1 - lambda_min(T))/2`); otherwise it is pinned
/// to the marginal's Bloch axis.
pub fn min_affinity_2xn(rho: &BipartiteState, deg_tol: f64) -> Result<MinResult> {
    let t = t_matrix(rho)?;
    let marginal = rho.marginal_a();
    let space = measurement_space(&marginal, deg_tol)?;
    let r = if space.is_fixed() {
        let b = bloch_axis(&marginal);
        b / b.norm()
    } else {
        let (_, vecs) = t.eigen();
        vecs[0]
    };
    Ok(MinResult {
        value: (1.0 - t.retained_weight(&r)).max(0.0),
        method: Method::Closed2xn,
        measurement: ProjectiveMeasurement::from_bloch(r)?,
        iterations: 1,
        converged: true,
    })
}

/// Hilbert-Schmidt MIN `max ||rho - Pi(rho)||^2`, by search.
pub fn hs_min(rho: &BipartiteState, cfg: &MinConfig) -> Result<MinResult> {
    let space = measurement_space(&rho.marginal_a(), cfg.deg_tol)?;
    let ops = BlockOperator::new(rho.matrix(), rho.dim_a(), rho.dim_b());
    let opt = minimize_over(&space, cfg, |basis| ops.retained_weight(basis));
    // ||rho - Pi rho||^2 = Tr rho^2 - Tr[rho Pi(rho)] since Pi is an orthogonal projection
    Ok(MinResult {
        value: (rho.purity() - opt.value).max(0.0),
        method: Method::BruteForce,
        measurement: opt.measurement,
        iterations: opt.evals,
        converged: opt.converged,
    })
}

/// `max ||sqrt(rho) - Pi(sqrt(rho))||^2`, evaluated with dense matrices.
pub fn luo_fu_min(rho: &BipartiteState, cfg: &MinConfig) -> Result<f64> {
    let space = measurement_space(&rho.marginal_a(), cfg.deg_tol)?;
    let s = rho.sqrt();
    let (da, db) = (rho.dim_a(), rho.dim_b());
    let opt = minimize_over(&space, cfg, |basis| {
        let pm = ProjectiveMeasurement::from_basis(basis.clone())
            .expect("chart produces orthonormal bases");
        let post = dephase(&s, da, db, &pm).expect("dimensions match");
        -linalg::hs_norm_sq(&(&s - post))
    });
    Ok((-opt.value).max(0.0))
}

/// `gamma_ij = Tr(sqrt(rho) X_i (x) Y_j)` in the Gell-Mann bases of A and B.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaMatrix(pub DMatrix<f64>);

impl GammaMatrix {
    /// `Tr(Gamma Gamma^T)`, equal to `Tr rho = 1`.
    pub fn frobenius_sq(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }
}

pub fn gamma_matrix(rho: &BipartiteState) -> GammaMatrix {
    let (m, n) = (rho.dim_a(), rho.dim_b());
    let s = rho.sqrt();
    let xs = operator_basis(m);
    let ys = operator_basis(n);
    let mut g = DMatrix::zeros(m * m, n * n);
    for (i, x) in xs.iter().enumerate() {
        for (j, y) in ys.iter().enumerate() {
            g[(i, j)] = linalg::hs_inner(&kron(x, y), &s).re;
        }
    }
    GammaMatrix(g)
}

/// Upper bound on the affinity MIN: the sum of the `m^2 - m` largest
/// eigenvalues of `G G^T`, where `G` is `Gamma` without its identity row.
pub fn min_affinity_upper_bound(rho: &BipartiteState) -> f64 {
    let m = rho.dim_a();
    if m < 2 {
        return 0.0;
    }
    let g = gamma_matrix(rho).0;
    let rest = g.rows(1, m * m - 1).into_owned();
    let gram = &rest * rest.transpose();
    let (mu, _) = real_symmetric_eig(&gram);
    // mu ascending, length m^2 - 1; drop the m - 1 smallest
    mu[(m - 1)..].iter().sum::<f64>().max(0.0)
}
