//! Kraus channels, generalized amplitude damping and Bell-diagonal dynamics.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, c, kron, CMatrix};
use crate::measures::{
    concurrence_bell_diagonal, hs_min_bell_diagonal, min_affinity_bell_diagonal,
};
use crate::states::{random_unitary, BipartiteState, CorrelationVector};

/// Completeness tolerance `|| sum_k E_k^dagger E_k - 1 ||`.
pub const KRAUS_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct KrausChannel {
    operators: Vec<CMatrix>,
    label: String,
}

impl KrausChannel {
    pub fn new(operators: Vec<CMatrix>, label: impl Into<String>) -> Result<Self> {
        let d = operators
            .first()
            .map(|e| e.nrows())
            .ok_or_else(|| Error::InvalidChannel("no Kraus operators".into()))?;
        if operators.iter().any(|e| e.shape() != (d, d)) {
            return Err(Error::InvalidChannel(
                "Kraus operators must share a square shape".into(),
            ));
        }
        let ch = Self {
            operators,
            label: label.into(),
        };
        let residual = ch.completeness_residual();
        if residual > KRAUS_TOL {
            return Err(Error::InvalidChannel(format!(
                "sum E^dagger E deviates from identity by {residual:.3e}"
            )));
        }
        Ok(ch)
    }

    pub fn identity(d: usize) -> Self {
        Self {
            operators: vec![linalg::identity(d)],
            label: "identity".into(),
        }
    }

    /// Random channel with `k` Kraus operators cut from a Haar isometry.
    pub fn random<R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> Self {
        let u = random_unitary(d * k, rng);
        let operators = (0..k)
            .map(|i| u.view((i * d, 0), (d, d)).into_owned())
            .collect();
        Self {
            operators,
            label: format!("random-{d}x{k}"),
        }
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.operators[0].nrows()
    }

    pub fn completeness_residual(&self) -> f64 {
        let d = self.dim();
        let sum = self
            .operators
            .iter()
            .fold(CMatrix::zeros(d, d), |acc, e| acc + e.adjoint() * e);
        linalg::hs_distance(&sum, &linalg::identity(d))
    }

    /// `sum_k E_k rho E_k^dagger`.
    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        if rho.nrows() != self.dim() {
            return Err(Error::Dimension(format!(
                "channel acts on dimension {}, input has {}",
                self.dim(),
                rho.nrows()
            )));
        }
        let out = self
            .operators
            .iter()
            .fold(CMatrix::zeros(rho.nrows(), rho.ncols()), |acc, e| {
                acc + e * rho * e.adjoint()
            });
        Ok(linalg::hermitize(out))
    }
}

/// Generalized amplitude damping parameters: `gamma = 1 - exp(-gamma' t)` and the
/// equilibrium population `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GadParams {
    pub gamma: f64,
    pub p: f64,
}

impl GadParams {
    pub fn new(gamma: f64, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::Range(format!("gamma = {gamma} not in [0, 1]")));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Range(format!("p = {p} not in [0, 1]")));
        }
        Ok(Self { gamma, p })
    }
}

pub fn gad_kraus(params: GadParams) -> KrausChannel {
    let GadParams { gamma, p } = params;
    let (sp, sq) = (p.sqrt(), (1.0 - p).sqrt());
    let (g, keep) = (gamma.sqrt(), (1.0 - gamma).sqrt());
    let m = |a: f64, b: f64, cc: f64, d: f64| {
        CMatrix::from_row_slice(2, 2, &[c(a, 0.0), c(b, 0.0), c(cc, 0.0), c(d, 0.0)])
    };
    let operators = vec![
        m(sp, 0.0, 0.0, sp * keep),
        m(0.0, sp * g, 0.0, 0.0),
        m(sq * keep, 0.0, 0.0, sq),
        m(0.0, 0.0, sq * g, 0.0),
    ];
    KrausChannel {
        operators,
        label: format!("gad(gamma={gamma}, p={p})"),
    }
}

/// `sum_{ij} (E_i (x) E_j) rho (E_i (x) E_j)^dagger`: the same channel on both parties.
pub fn apply_product_channel(rho: &BipartiteState, ch: &KrausChannel) -> Result<BipartiteState> {
    let d = ch.dim();
    if rho.dim_a() != d || rho.dim_b() != d {
        return Err(Error::Dimension(format!(
            "product channel on {d}-dim parties applied to a {}x{} state",
            rho.dim_a(),
            rho.dim_b()
        )));
    }
    let mut out = CMatrix::zeros(d * d, d * d);
    for ei in ch.operators() {
        for ej in ch.operators() {
            let e = kron(ei, ej);
            out += &e * rho.matrix() * e.adjoint();
        }
    }
    BipartiteState::new(d, d, linalg::hermitize(out))
}

/// Correlation vector after GAD with `p = 1/2` on both qubits.
pub fn evolve_bd(cv: CorrelationVector, gamma: f64) -> Result<CorrelationVector> {
    evolve_bd_with(cv, GadParams::new(gamma, 0.5)?)
}

/// As [`evolve_bd`]; the correlation-vector map only exists for `p = 1/2`.
pub fn evolve_bd_with(cv: CorrelationVector, params: GadParams) -> Result<CorrelationVector> {
    if params.p != 0.5 {
        return Err(Error::Range(format!(
            "Bell-diagonal map requires p = 1/2 (got {}); use apply_product_channel",
            params.p
        )));
    }
    cv.validate()?;
    let k = 1.0 - params.gamma;
    Ok(CorrelationVector {
        c1: k * cv.c1,
        c2: k * cv.c2,
        c3: k * k * cv.c3,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DynamicsRecord {
    pub gamma: f64,
    pub n_affinity: f64,
    pub n_hs: f64,
    pub concurrence: f64,
}

/// Uniform grid of `points` values on `[0, 1]`.
pub fn unit_grid(points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..points)
            .map(|i| i as f64 / (points - 1) as f64)
            .collect(),
    }
}

/// Measures of the GAD-evolved Bell-diagonal state along `gammas`.
pub fn dynamics_sweep(c0: CorrelationVector, gammas: &[f64]) -> Result<Vec<DynamicsRecord>> {
    c0.validate()?;
    gammas
        .iter()
        .map(|&gamma| {
            let cv = evolve_bd(c0, gamma)?;
            Ok(DynamicsRecord {
                gamma,
                n_affinity: min_affinity_bell_diagonal(&cv)?,
                n_hs: hs_min_bell_diagonal(&cv)?,
                concurrence: concurrence_bell_diagonal(&cv)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag, hs_distance};
    use crate::states::{bell_diagonal, random_state};

    fn cv(a: f64, b: f64, c: f64) -> CorrelationVector {
        CorrelationVector::new(a, b, c).unwrap()
    }

    #[test]
    fn gad_completeness() {
        for (g, p) in [(0.5, 0.5), (0.0, 0.3), (1.0, 1.0), (0.37, 0.91)] {
            let ch = gad_kraus(GadParams::new(g, p).unwrap());
            assert_eq!(ch.operators().len(), 4);
            assert!(ch.completeness_residual() <= 1e-12, "gamma={g} p={p}");
            assert!(KrausChannel::new(ch.operators().to_vec(), "copy").is_ok());
        }
        assert!(GadParams::new(1.2, 0.5).is_err());
        assert!(GadParams::new(0.2, -0.1).is_err());
    }

    #[test]
    fn gad_endpoints() {
        let rho = random_state(1, 2, 2, 8).unwrap();
        let id = gad_kraus(GadParams::new(0.0, 0.5).unwrap());
        assert!(hs_distance(&id.apply(rho.matrix()).unwrap(), rho.matrix()) < 1e-15);
        let full = gad_kraus(GadParams::new(1.0, 1.0).unwrap());
        assert!(hs_distance(&full.apply(rho.matrix()).unwrap(), &diag(&[1.0, 0.0])) < 1e-15);
    }

    #[test]
    fn product_channel_identity_and_equilibrium() {
        let rho = random_state(2, 2, 4, 2).unwrap();
        let out = apply_product_channel(&rho, &KrausChannel::identity(2)).unwrap();
        assert!(hs_distance(out.matrix(), rho.matrix()) < 1e-15);
        let eq =
            apply_product_channel(&rho, &gad_kraus(GadParams::new(1.0, 0.5).unwrap())).unwrap();
        assert!(hs_distance(eq.matrix(), &linalg::identity(4).scale(0.25)) < 1e-14);
    }

    #[test]
    fn map_matches_kraus() {
        let c0 = cv(0.5, 0.5, -0.5);
        for g in [0.0, 0.2, 0.5, 0.9] {
            let ch = gad_kraus(GadParams::new(g, 0.5).unwrap());
            let dense = apply_product_channel(&bell_diagonal(c0).unwrap(), &ch).unwrap();
            let mapped = bell_diagonal(evolve_bd(c0, g).unwrap()).unwrap();
            assert!(
                hs_distance(dense.matrix(), mapped.matrix()) < 1e-10,
                "gamma={g}"
            );
        }
    }

    #[test]
    fn evolve_examples() {
        assert_eq!(
            evolve_bd(cv(0.0, 0.0, 0.0), 0.7).unwrap(),
            cv(0.0, 0.0, 0.0)
        );
        let half = evolve_bd(cv(1.0, 1.0, -1.0), 0.5).unwrap();
        assert_eq!(half.as_array(), [0.5, 0.5, -0.25]);
        let end = evolve_bd(cv(1.0, 1.0, -1.0), 1.0).unwrap();
        assert_eq!(end.as_array().map(f64::abs), [0.0, 0.0, 0.0]);
        let p = GadParams::new(0.3, 0.2).unwrap();
        assert!(matches!(
            evolve_bd_with(cv(0.1, 0.1, 0.1), p),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn sweep_concurrence_values() {
        let rec = dynamics_sweep(cv(1.0, 1.0, -1.0), &[0.0, 0.25, 0.5]).unwrap();
        let want = [
            1.0,
            (1.75f64.powi(2) - 2.0) / 2.0,
            (1.5f64.powi(2) - 2.0) / 2.0,
        ];
        for (r, w) in rec.iter().zip(want) {
            assert!((r.concurrence - w).abs() < 1e-14, "{r:?}");
        }
        assert!((want[1] - 0.53125).abs() < 1e-15 && (want[2] - 0.125).abs() < 1e-15);
        let zero = dynamics_sweep(cv(0.0, 0.0, 0.0), &unit_grid(11)).unwrap();
        assert!(zero
            .iter()
            .all(|r| r.n_affinity == 0.0 && r.n_hs == 0.0 && r.concurrence == 0.0));
    }

    #[test]
    fn rejects_mismatched_state() {
        let rho = random_state(2, 3, 2, 1).unwrap();
        assert!(apply_product_channel(&rho, &KrausChannel::identity(2)).is_err());
        assert!(KrausChannel::new(vec![linalg::identity(2).scale(0.5)], "bad").is_err());
    }
}
