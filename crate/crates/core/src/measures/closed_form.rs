//! Analytic values for Bell-diagonal, Werner and isotropic families.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::states::CorrelationVector;

/// Affinity-based and Hilbert-Schmidt MIN of one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedForm {
    pub affinity_min: f64,
    pub hs_min: f64,
}

/// Eigenvalues that are zero up to rounding are snapped to zero so their
/// square roots do not pick up ~1e-8 noise.
fn snapped_sqrt(x: f64) -> f64 {
    if x <= 1e-14 {
        0.0
    } else {
        x.sqrt()
    }
}

/// `h = Tr sqrt(rho)` and the signed sums `d_j` with
/// `sqrt(rho) = 1/4 [h 1 + sum_j d_j sigma_j (x) sigma_j]`.
pub fn bell_diagonal_sqrt_coefficients(cv: &CorrelationVector) -> (f64, [f64; 3]) {
    let lam = cv.eigenvalues();
    let s00 = snapped_sqrt(lam[0][0]);
    let s01 = snapped_sqrt(lam[0][1]);
    let s10 = snapped_sqrt(lam[1][0]);
    let s11 = snapped_sqrt(lam[1][1]);
    let h = s00 + s01 + s10 + s11;
    let d = [
        s00 - s01 + s10 - s11,
        -s00 + s01 + s10 - s11,
        s00 + s01 - s10 - s11,
    ];
    (h, d)
}

/// `1 - (h^2 + min_j d_j^2) / 4`.
pub fn min_affinity_bell_diagonal(cv: &CorrelationVector) -> Result<f64> {
    cv.validate()?;
    let (h, d) = bell_diagonal_sqrt_coefficients(cv);
    let dmin = d.iter().map(|x| x * x).fold(f64::INFINITY, f64::min);
    Ok((1.0 - 0.25 * (h * h + dmin)).max(0.0))
}

/// `(c1^2 + c2^2 + c3^2 - min_j c_j^2) / 4`.
pub fn hs_min_bell_diagonal(cv: &CorrelationVector) -> Result<f64> {
    cv.validate()?;
    let sq = cv.as_array().map(|x| x * x);
    let min = sq.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(0.25 * (sq.iter().sum::<f64>() - min))
}

/// `2 max(0, lambda_max - 1/2)`.
pub fn concurrence_bell_diagonal(cv: &CorrelationVector) -> Result<f64> {
    cv.validate()?;
    let lam = cv.eigenvalues();
    let max = lam
        .iter()
        .flatten()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok((2.0 * (max - 0.5)).max(0.0))
}

/// Both measures for the Bell-diagonal state with correlation vector `cv`.
pub fn closed_form_bell_diagonal(cv: &CorrelationVector) -> Result<ClosedForm> {
    Ok(ClosedForm {
        affinity_min: min_affinity_bell_diagonal(cv)?,
        hs_min: hs_min_bell_diagonal(cv)?,
    })
}

/// Two-qubit Werner state `(1-p)/4 1 + p |Phi><Phi|`, i.e. `c = (-p, -p, -p)`.
pub fn closed_form_two_qubit_werner(p: f64) -> Result<ClosedForm> {
    if !(-1.0 / 3.0 - 1e-12..=1.0).contains(&p) {
        return Err(Error::Range(format!(
            "two-qubit Werner p = {p} not in [-1/3, 1]"
        )));
    }
    let root = ((1.0 - p) * (1.0 + 3.0 * p)).max(0.0).sqrt();
    Ok(ClosedForm {
        affinity_min: (0.25 * (1.0 + p - root)).max(0.0),
        hs_min: 0.5 * p * p,
    })
}

pub fn closed_form_werner(m: usize, x: f64) -> Result<ClosedForm> {
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
    let root = ((mf - 1.0) / (mf + 1.0) * (1.0 - x * x)).max(0.0).sqrt();
    let affinity_min = (0.5 * ((mf - x) / (mf + 1.0) - root)).max(0.0);
    let hs_min = (mf * x - 1.0).powi(2) / (mf * (mf - 1.0) * (mf + 1.0).powi(2));
    Ok(ClosedForm {
        affinity_min,
        hs_min,
    })
}

pub fn closed_form_isotropic(m: usize, x: f64) -> Result<ClosedForm> {
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
    let mf = m as f64;
    let diff = ((mf - 1.0) * x).sqrt() - ((1.0 - x) / (mf + 1.0)).sqrt();
    let affinity_min = diff * diff / mf;
    let hs_min = (mf * mf * x - 1.0).powi(2) / (mf * (mf - 1.0) * (mf + 1.0).powi(2));
    Ok(ClosedForm {
        affinity_min,
        hs_min,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cv(a: f64, b: f64, c: f64) -> CorrelationVector {
        CorrelationVector::new(a, b, c).unwrap()
    }

    #[test]
    fn bell_diagonal_values() {
        assert_eq!(min_affinity_bell_diagonal(&cv(0.0, 0.0, 0.0)).unwrap(), 0.0);
        assert!((min_affinity_bell_diagonal(&cv(-1.0, -1.0, -1.0)).unwrap() - 0.5).abs() < 1e-15);
        assert!((min_affinity_bell_diagonal(&cv(1.0, 1.0, -1.0)).unwrap() - 0.5).abs() < 1e-15);

        // h = 3 sqrt(1/8) + sqrt(5/8), d_j^2 = (sqrt(5/8) - sqrt(1/8))^2 for every j
        let (h, d) = bell_diagonal_sqrt_coefficients(&cv(0.5, 0.5, -0.5));
        let h_ref = 3.0 * 0.125f64.sqrt() + 0.625f64.sqrt();
        let d2_ref = (0.625f64.sqrt() - 0.125f64.sqrt()).powi(2);
        assert!((h - h_ref).abs() < 1e-15 && (h - 1.85123).abs() < 1e-5);
        for dj in d {
            assert!((dj * dj - d2_ref).abs() < 1e-15);
        }
        assert!((d2_ref - 0.19099).abs() < 1e-5);
        let v = min_affinity_bell_diagonal(&cv(0.5, 0.5, -0.5)).unwrap();
        assert!((v - (1.0 - 0.25 * (h_ref * h_ref + d2_ref))).abs() < 1e-15);
        assert!((v - 0.09549).abs() < 1e-5);
    }

    #[test]
    fn trace_identity_of_sqrt_coefficients() {
        // Tr rho = (h^2 + sum d^2)/4 = 1
        for c in [[0.2, -0.3, 0.1], [0.9, 0.8, -0.7], [-1.0, -1.0, -1.0]] {
            let (h, d) = bell_diagonal_sqrt_coefficients(&cv(c[0], c[1], c[2]));
            let tr = 0.25 * (h * h + d.iter().map(|x| x * x).sum::<f64>());
            assert!((tr - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn hs_and_concurrence() {
        assert!((hs_min_bell_diagonal(&cv(-0.6, -0.6, -0.6)).unwrap() - 0.18).abs() < 1e-15);
        assert!((concurrence_bell_diagonal(&cv(0.5, 0.5, -0.5)).unwrap() - 0.25).abs() < 1e-15);
        assert!((concurrence_bell_diagonal(&cv(1.0, 1.0, -1.0)).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(concurrence_bell_diagonal(&cv(0.0, 0.0, 0.0)).unwrap(), 0.0);
    }

    #[test]
    fn werner_pair_matches_bell_diagonal_route() {
        for p in [-1.0 / 3.0, 0.0, 0.2, 0.6, 1.0] {
            let w = closed_form_two_qubit_werner(p).unwrap();
            let bd = closed_form_bell_diagonal(&cv(-p, -p, -p)).unwrap();
            assert!((w.affinity_min - bd.affinity_min).abs() < 1e-12, "p={p}");
            assert!((w.hs_min - bd.hs_min).abs() < 1e-15, "p={p}");
        }
    }

    #[test]
    fn werner_examples() {
        let z = closed_form_werner(2, 0.5).unwrap();
        assert!(z.affinity_min.abs() < 1e-15 && z.hs_min.abs() < 1e-15);
        let top = closed_form_werner(2, 1.0).unwrap();
        assert!((top.affinity_min - 1.0 / 6.0).abs() < 1e-15);
        assert!((top.hs_min - 1.0 / 18.0).abs() < 1e-15);
        let big = closed_form_werner(1024, 0.6).unwrap();
        assert!((big.affinity_min - 0.1).abs() < 1e-3);
        assert!(big.hs_min < 3.4e-4);
        assert!(closed_form_werner(3, 1.1).is_err());
        assert!(closed_form_werner(1, 0.0).is_err());
    }

    #[test]
    fn isotropic_examples() {
        let z = closed_form_isotropic(2, 0.25).unwrap();
        assert!(z.affinity_min.abs() < 1e-15 && z.hs_min.abs() < 1e-15);
        let top = closed_form_isotropic(2, 1.0).unwrap();
        assert!((top.affinity_min - 0.5).abs() < 1e-15);
        assert!((top.hs_min - 0.5).abs() < 1e-15);
        let big = closed_form_isotropic(1000, 0.3).unwrap();
        assert!((big.affinity_min - 0.3).abs() < 2e-3);
        assert!((big.hs_min - 0.09).abs() < 1e-3);
        assert!(closed_form_isotropic(2, -0.1).is_err());
    }

    #[test]
    fn vanishing_points() {
        for m in 2..=6 {
            let mf = m as f64;
            let w = closed_form_werner(m, 1.0 / mf).unwrap();
            assert!(w.affinity_min < 1e-12 && w.hs_min < 1e-12);
            let i = closed_form_isotropic(m, 1.0 / (mf * mf)).unwrap();
            assert!(i.affinity_min < 1e-12 && i.hs_min < 1e-12);
        }
    }
}
