use crate::error::{Error, Result};
use crate::linalg::{self, psd_power, CMatrix};
use crate::states::STATE_TOL;

fn check_density(m: &CMatrix, which: &str) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("{which} is not square")));
    }
    let asym = linalg::max_asymmetry(m);
    if asym > STATE_TOL {
        return Err(Error::InvalidState(format!(
            "{which} is not Hermitian ({asym:.3e})"
        )));
    }
    let tr = m.trace().re;
    if (tr - 1.0).abs() > STATE_TOL {
        return Err(Error::InvalidState(format!("{which} has trace {tr}")));
    }
    Ok(())
}

/// Alpha-affinity `Tr(rho^alpha sigma^(1-alpha))` for `alpha` in `(0, 1)`.
pub fn affinity_alpha(rho: &CMatrix, sigma: &CMatrix, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Range(format!("alpha = {alpha} not in (0, 1)")));
    }
    check_density(rho, "rho")?;
    check_density(sigma, "sigma")?;
    if rho.shape() != sigma.shape() {
        return Err(Error::Dimension(format!(
            "affinity of {}-dim and {}-dim states",
            rho.nrows(),
            sigma.nrows()
        )));
    }
    let a = psd_power(rho, alpha)?;
    let b = psd_power(sigma, 1.0 - alpha)?;
    // Tr(A B) for Hermitian A
    let val = linalg::hs_inner(&a, &b).re;
    Ok(val.clamp(0.0, 1.0))
}

/// `Tr(sqrt(rho) sqrt(sigma))`.
pub fn affinity(rho: &CMatrix, sigma: &CMatrix) -> Result<f64> {
    affinity_alpha(rho, sigma, 0.5)
}

/// `sqrt(1 - A_alpha(rho, sigma))`.
pub fn affinity_metric_alpha(rho: &CMatrix, sigma: &CMatrix, alpha: f64) -> Result<f64> {
    Ok((1.0 - affinity_alpha(rho, sigma, alpha)?).max(0.0).sqrt())
}

pub fn affinity_metric(rho: &CMatrix, sigma: &CMatrix) -> Result<f64> {
    affinity_metric_alpha(rho, sigma, 0.5)
}
