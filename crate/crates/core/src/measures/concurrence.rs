use crate::error::{Error, Result};
use crate::linalg::{self, kron, pauli};
use crate::states::BipartiteState;

/// Wootters concurrence of a two-qubit state.
///
/// The `lambda_i` are the square roots of the spectrum of `rho rho~`, with
/// `rho~ = (sigma_y (x) sigma_y) rho* (sigma_y (x) sigma_y)`. They are read off
/// the Hermitian matrix `sqrt(rho) rho~ sqrt(rho)`, which has the same spectrum.
pub fn concurrence(rho: &BipartiteState) -> Result<f64> {
    if rho.dim_a() != 2 || rho.dim_b() != 2 {
        return Err(Error::Dimension(format!(
            "concurrence needs a 2x2 state, got {}x{}",
            rho.dim_a(),
            rho.dim_b()
        )));
    }
    let yy = kron(&pauli(2), &pauli(2));
    let flipped = &yy * rho.matrix().conjugate() * &yy;
    let s = rho.sqrt();
    let r = linalg::hermitize(&s * flipped * &s);
    let spec = linalg::clean_spectrum(&linalg::eigvalsh(&r)?)?;
    let mut lam: Vec<f64> = spec.iter().map(|x| x.sqrt()).collect();
    lam.sort_by(|a, b| b.total_cmp(a));
    Ok((lam[0] - lam[1] - lam[2] - lam[3]).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::closed_form::concurrence_bell_diagonal;
    use crate::states::{bell_diagonal, random_state, CorrelationVector};

    #[test]
    fn examples() {
        let bell = bell_diagonal(CorrelationVector::new(1.0, 1.0, -1.0).unwrap()).unwrap();
        assert!((concurrence(&bell).unwrap() - 1.0).abs() < 1e-7);
        let mm = bell_diagonal(CorrelationVector::new(0.0, 0.0, 0.0).unwrap()).unwrap();
        assert!(concurrence(&mm).unwrap() < 1e-12);
        let cv = CorrelationVector::new(0.5, 0.5, -0.5).unwrap();
        assert!((concurrence(&bell_diagonal(cv).unwrap()).unwrap() - 0.25).abs() < 1e-10);
    }

    #[test]
    fn bell_diagonal_rule_agrees() {
        for c in [
            [0.3, -0.2, 0.6],
            [0.9, 0.8, -0.75],
            [-0.5, -0.5, -0.5],
            [0.1, 0.1, 0.1],
        ] {
            let cv = CorrelationVector::from_array(c).unwrap();
            let dense = concurrence(&bell_diagonal(cv).unwrap()).unwrap();
            let rule = concurrence_bell_diagonal(&cv).unwrap();
            assert!((dense - rule).abs() < 1e-9, "{c:?}: {dense} vs {rule}");
        }
    }

    #[test]
    fn product_state_is_separable() {
        let p = random_state(1, 2, 2, 3).unwrap();
        let q = random_state(1, 2, 2, 4).unwrap();
        let prod = BipartiteState::product(p.matrix(), q.matrix()).unwrap();
        assert!(concurrence(&prod).unwrap() < 1e-10);
    }

    #[test]
    fn wrong_dimension() {
        let r = random_state(2, 3, 2, 1).unwrap();
        assert!(matches!(concurrence(&r), Err(Error::Dimension(_))));
    }
}
