//! Seeded property suites run by `affmin verify`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channels::{
    apply_product_channel, dynamics_sweep, evolve_bd, gad_kraus, unit_grid, GadParams, KrausChannel,
};
use crate::error::{Error, Result};
use crate::linalg::{self, hs_distance, kron};
use crate::measures::{
    affinity, affinity_metric, closed_form_isotropic, closed_form_werner, hs_min, luo_fu_min,
    min_affinity, min_affinity_bell_diagonal, min_affinity_upper_bound, Method, MinConfig,
};
use crate::states::{
    add_ancilla, bell_diagonal, isotropic, random_density, random_state, random_unitary,
    schmidt_spectrum, werner, BipartiteState, CorrelationVector,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    MetricAxioms,
    MinEquivalences,
    Ancilla,
    Bounds,
    Channel,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::MetricAxioms,
        Suite::MinEquivalences,
        Suite::Ancilla,
        Suite::Bounds,
        Suite::Channel,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Suite::MetricAxioms => "metric-axioms",
            Suite::MinEquivalences => "min-equivalences",
            Suite::Ancilla => "ancilla",
            Suite::Bounds => "bounds",
            Suite::Channel => "channel",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(|x| x.as_str()).collect();
                Error::Parse(format!(
                    "unknown suite '{s}' (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

/// Outcome of one property: how many cases passed, and the largest `error - tolerance`
/// seen (negative when every case passed).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyCheck {
    pub name: String,
    pub passed: usize,
    pub total: usize,
    pub worst: f64,
}

impl PropertyCheck {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            passed: 0,
            total: 0,
            worst: f64::NEG_INFINITY,
        }
    }

    /// Records a case whose violation is `excess` (<= 0 means satisfied).
    fn record(&mut self, excess: f64) {
        self.total += 1;
        if excess <= 0.0 {
            self.passed += 1;
        }
        if excess > self.worst || excess.is_nan() {
            self.worst = excess;
        }
    }

    /// `|got - want| <= tol`.
    fn close(&mut self, got: f64, want: f64, tol: f64) {
        self.record((got - want).abs() - tol);
    }

    fn at_most(&mut self, lhs: f64, rhs: f64, tol: f64) {
        self.record(lhs - rhs - tol);
    }

    pub fn ok(&self) -> bool {
        self.passed == self.total
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub checks: Vec<PropertyCheck>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(PropertyCheck::ok)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = if c.ok() { "PASS" } else { "FAIL" };
            writeln!(
                f,
                "{tag} {}/{} {} {}/{} max_excess={:.3e}",
                self.suite, self.seed, c.name, c.passed, c.total, c.worst
            )?;
        }
        Ok(())
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let checks = match suite {
        Suite::MetricAxioms => metric_axioms(&mut rng)?,
        Suite::MinEquivalences => min_equivalences(&mut rng)?,
        Suite::Ancilla => ancilla(&mut rng)?,
        Suite::Bounds => bounds(&mut rng)?,
        Suite::Channel => channel(&mut rng)?,
    };
    Ok(SuiteReport {
        suite,
        seed,
        checks,
    })
}

fn config(rng: &mut ChaCha8Rng) -> MinConfig {
    MinConfig::default().with_seed(rng.random())
}

/// Bell-diagonal state behind random local unitaries; both marginals stay maximally mixed.
pub fn rotated_bell_diagonal<R: Rng + ?Sized>(
    cv: CorrelationVector,
    rng: &mut R,
) -> Result<BipartiteState> {
    let u = random_unitary(2, rng);
    let v = random_unitary(2, rng);
    bell_diagonal(cv)?.local_unitary(&u, &v)
}

/// Uniform point of the tetrahedron by rejection from the cube.
pub fn random_correlation_vector<R: Rng + ?Sized>(rng: &mut R) -> CorrelationVector {
    loop {
        let c = [0; 3].map(|_| rng.random_range(-1.0..=1.0));
        if let Ok(cv) = CorrelationVector::from_array(c) {
            return cv;
        }
    }
}

fn metric_axioms(rng: &mut ChaCha8Rng) -> Result<Vec<PropertyCheck>> {
    let mut identity = PropertyCheck::new("identity");
    let mut symmetry = PropertyCheck::new("symmetry");
    let mut triangle = PropertyCheck::new("triangle");
    let mut range = PropertyCheck::new("affinity-range");
    for d in [2, 3, 4, 6] {
        for _ in 0..25 {
            let rank = rng.random_range(1..=d);
            let [r, s, t] = [0; 3].map(|_| random_density(d, rank, rng));
            identity.at_most(affinity_metric(&r, &r)?, 0.0, 1e-6);
            symmetry.close(affinity_metric(&r, &s)?, affinity_metric(&s, &r)?, 1e-12);
            let direct = affinity_metric(&r, &t)?;
            let via = affinity_metric(&r, &s)? + affinity_metric(&s, &t)?;
            triangle.at_most(direct, via, 1e-12);
            let a = affinity(&r, &s)?;
            range.record((-a).max(a - 1.0));
        }
    }

    let mut min_range = PropertyCheck::new("min-range");
    let mut lu = PropertyCheck::new("local-unitary-invariance");
    let mut product = PropertyCheck::new("product-vanishes");
    for (da, db) in [(2, 2), (2, 3), (3, 3)] {
        for _ in 0..4 {
            let rank = rng.random_range(1..=da * db);
            let rho = random_state(da, db, rank, rng.random())?;
            let cfg = config(rng);
            let n = min_affinity(&rho, &cfg)?.value;
            let cap = (da as f64 - 1.0) / da as f64;
            min_range.record((-n).max(n - cap - 1e-9));
            let u = random_unitary(da, rng);
            let v = random_unitary(db, rng);
            let moved = min_affinity(&rho.local_unitary(&u, &v)?, &cfg)?.value;
            lu.close(moved, n, 1e-6);
            let prod = BipartiteState::product(&rho.marginal_a(), &rho.marginal_b())?;
            product.at_most(min_affinity(&prod, &cfg)?.value, 0.0, 1e-8);
        }
    }
    Ok(vec![
        identity, symmetry, triangle, range, min_range, lu, product,
    ])
}

fn min_equivalences(rng: &mut ChaCha8Rng) -> Result<Vec<PropertyCheck>> {
    let mut pure = PropertyCheck::new("pure-formula-vs-brute-force");
    for (da, db) in [(2, 2), (2, 3), (3, 3)] {
        for _ in 0..5 {
            let rho = random_state(da, db, 1, rng.random())?;
            let s = schmidt_spectrum(&rho)?;
            let cfg = config(rng).with_method(Method::BruteForce);
            pure.close(min_affinity(&rho, &cfg)?.value, 1.0 - s.purity(), 1e-4);
        }
    }

    let mut closed = PropertyCheck::new("closed-2xn-vs-brute-force");
    for db in [2, 3] {
        for _ in 0..6 {
            let rho = random_state(2, db, rng.random_range(2..=2 * db), rng.random())?;
            let cfg = config(rng);
            let fast = min_affinity(&rho, &cfg.with_method(Method::Closed2xn))?.value;
            let slow = min_affinity(&rho, &cfg.with_method(Method::BruteForce))?.value;
            closed.close(fast, slow, 1e-5);
        }
    }

    let mut bd = PropertyCheck::new("bell-diagonal-vs-closed-2xn");
    let mut luo_fu = PropertyCheck::new("luo-fu-vs-affinity");
    for i in 0..20 {
        let cv = random_correlation_vector(rng);
        let rho = rotated_bell_diagonal(cv, rng)?;
        let cfg = config(rng);
        let n = min_affinity(&rho, &cfg)?.value;
        bd.close(n, min_affinity_bell_diagonal(&cv)?, 1e-8);
        if i % 2 == 0 {
            luo_fu.close(luo_fu_min(&rho, &cfg)?, n, 1e-8);
        }
    }
    for _ in 0..5 {
        let rho = random_state(2, 2, 4, rng.random())?;
        let cfg = config(rng);
        luo_fu.close(
            luo_fu_min(&rho, &cfg)?,
            min_affinity(&rho, &cfg)?.value,
            1e-8,
        );
    }

    let mut families = PropertyCheck::new("werner-isotropic-closed-forms");
    for x in [-0.6, 0.0, 0.7] {
        let rho = werner(3, x)?;
        let cfg = config(rng);
        let want = closed_form_werner(3, x)?;
        families.close(min_affinity(&rho, &cfg)?.value, want.affinity_min, 1e-5);
        families.close(hs_min(&rho, &cfg)?.value, want.hs_min, 1e-5);
    }
    for x in [0.05, 0.5, 0.9] {
        let rho = isotropic(3, x)?;
        let cfg = config(rng);
        let want = closed_form_isotropic(3, x)?;
        families.close(min_affinity(&rho, &cfg)?.value, want.affinity_min, 1e-5);
        families.close(hs_min(&rho, &cfg)?.value, want.hs_min, 1e-5);
    }
    Ok(vec![pure, closed, bd, luo_fu, families])
}

fn ancilla(rng: &mut ChaCha8Rng) -> Result<Vec<PropertyCheck>> {
    let mut aff = PropertyCheck::new("affinity-invariant");
    let mut hs = PropertyCheck::new("hs-scales-with-ancilla-purity");
    for i in 0..12 {
        let rho = if i % 3 == 0 {
            rotated_bell_diagonal(random_correlation_vector(rng), rng)?
        } else {
            let db = rng.random_range(2..=3);
            random_state(2, db, rng.random_range(1..=2 * db), rng.random())?
        };
        let dc = rng.random_range(2..=3);
        let sigma = random_density(dc, rng.random_range(1..=dc), rng);
        let (big, purity) = add_ancilla(&rho, &sigma)?;
        let cfg = config(rng);
        aff.close(
            min_affinity(&big, &cfg)?.value,
            min_affinity(&rho, &cfg)?.value,
            1e-6,
        );
        hs.close(
            hs_min(&big, &cfg)?.value,
            hs_min(&rho, &cfg)?.value * purity,
            1e-6,
        );
    }
    Ok(vec![aff, hs])
}

fn bounds(rng: &mut ChaCha8Rng) -> Result<Vec<PropertyCheck>> {
    let mut upper = PropertyCheck::new("upper-bound");
    for (da, db) in [(2, 2), (2, 3), (3, 3)] {
        for _ in 0..8 {
            let rho = random_state(da, db, rng.random_range(1..=da * db), rng.random())?;
            let n = min_affinity(&rho, &config(rng))?.value;
            upper.at_most(n, min_affinity_upper_bound(&rho), 1e-7);
        }
    }
    let mut tight = PropertyCheck::new("upper-bound-tight-on-bell-state");
    let bell = bell_diagonal(CorrelationVector::new(1.0, 1.0, -1.0)?)?;
    tight.close(
        min_affinity_upper_bound(&bell),
        min_affinity(&bell, &config(rng))?.value,
        1e-6,
    );
    for m in 2..=3 {
        let w = werner(m, -1.0)?;
        tight.close(
            min_affinity_upper_bound(&w),
            closed_form_werner(m, -1.0)?.affinity_min,
            1e-6,
        );
    }

    let mut zeros = PropertyCheck::new("families-vanish");
    for m in 2..=8 {
        let mf = m as f64;
        let w = closed_form_werner(m, 1.0 / mf)?;
        let iso = closed_form_isotropic(m, 1.0 / (mf * mf))?;
        for v in [w.affinity_min, w.hs_min, iso.affinity_min, iso.hs_min] {
            zeros.at_most(v, 0.0, 1e-9);
        }
    }
    Ok(vec![upper, tight, zeros])
}

fn channel(rng: &mut ChaCha8Rng) -> Result<Vec<PropertyCheck>> {
    let mut complete = PropertyCheck::new("gad-completeness");
    let mut cptp = PropertyCheck::new("trace-and-positivity");
    let mut map = PropertyCheck::new("bell-diagonal-map-vs-kraus");
    for _ in 0..10 {
        let params = GadParams::new(rng.random(), rng.random())?;
        let ch = gad_kraus(params);
        complete.at_most(ch.completeness_residual(), 0.0, 1e-12);
        let rho = random_state(2, 2, rng.random_range(1..=4), rng.random())?;
        let out = apply_product_channel(&rho, &ch)?;
        cptp.close(out.matrix().trace().re, 1.0, 1e-12);
        cptp.record(-out.spectrum()[0] - 1e-12);

        let cv = random_correlation_vector(rng);
        let gamma = params.gamma;
        let dense =
            apply_product_channel(&bell_diagonal(cv)?, &gad_kraus(GadParams::new(gamma, 0.5)?))?;
        let mapped = bell_diagonal(evolve_bd(cv, gamma)?)?;
        map.at_most(hs_distance(dense.matrix(), mapped.matrix()), 0.0, 1e-10);
    }

    let mut monotone = PropertyCheck::new("affinity-data-processing");
    for _ in 0..20 {
        let d = rng.random_range(2..=4);
        let ch = KrausChannel::random(d, rng.random_range(1..=3), rng);
        let r = random_density(d, d, rng);
        let s = random_density(d, d, rng);
        let before = affinity(&r, &s)?;
        let after = affinity(&ch.apply(&r)?, &ch.apply(&s)?)?;
        monotone.at_most(before, after, 1e-10);
    }
    let mut local = PropertyCheck::new("local-gad-keeps-affinity-min-bounded");
    for _ in 0..5 {
        let rho = random_state(2, 2, 4, rng.random())?;
        let ch = gad_kraus(GadParams::new(rng.random(), 0.5)?);
        let cfg = config(rng);
        let n = min_affinity(&apply_product_channel(&rho, &ch)?, &cfg)?.value;
        local.record((-n).max(n - 0.5 - 1e-9));
    }

    let mut death = PropertyCheck::new("sudden-death-point");
    let mut decay = PropertyCheck::new("bell-state-decay-monotone");
    let grid = unit_grid(1001);
    let rec = dynamics_sweep(CorrelationVector::new(1.0, 1.0, -1.0)?, &grid)?;
    let first_zero = rec
        .iter()
        .find(|r| r.concurrence == 0.0)
        .map_or(f64::NAN, |r| r.gamma);
    death.close(first_zero, 2.0 - 2f64.sqrt(), 5e-3);
    for w in rec.windows(2) {
        decay.at_most(w[1].n_affinity, w[0].n_affinity, 1e-12);
        decay.at_most(w[1].n_hs, w[0].n_hs, 1e-12);
        decay.at_most(w[1].concurrence, w[0].concurrence, 1e-12);
    }
    let mut equilibrium = PropertyCheck::new("full-damping-equilibrium");
    let mixed = kron(&linalg::identity(2), &linalg::identity(2)).scale(0.25);
    let bell = bell_diagonal(CorrelationVector::new(1.0, 1.0, -1.0)?)?;
    let eq = apply_product_channel(&bell, &gad_kraus(GadParams::new(1.0, 0.5)?))?;
    equilibrium.at_most(hs_distance(eq.matrix(), &mixed), 0.0, 1e-12);
    Ok(vec![
        complete,
        cptp,
        map,
        monotone,
        local,
        death,
        decay,
        equilibrium,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.as_str().parse::<Suite>().unwrap(), s);
        }
        assert!(matches!("nope".parse::<Suite>(), Err(Error::Parse(_))));
    }

    #[test]
    fn check_bookkeeping() {
        let mut c = PropertyCheck::new("x");
        c.close(1.0, 1.0 + 1e-9, 1e-8);
        c.at_most(2.0, 1.0, 0.5);
        assert_eq!((c.passed, c.total), (1, 2));
        assert!((c.worst - 0.5).abs() < 1e-15);
        assert!(!c.ok());
    }

    #[test]
    fn random_tetrahedron_points_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            assert!(random_correlation_vector(&mut rng).validate().is_ok());
        }
    }
}
