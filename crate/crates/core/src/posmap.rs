//! The bistochastic map family Λ_d on d×d complex matrices.
//!
//! In 1-based indices, with `s = Σ_{i<d} a_ii`:
//!
//! ```text
//! Λ(A)[k,k]   = s/(d−1)            k ≤ d−1
//! Λ(A)[d,d]   = a_dd
//! Λ(A)[k,d]   = a_kd/√(d−1)        k ≤ d−2   (and the mirrored [d,k])
//! Λ(A)[d−1,d] = a_{d,d−1}/√(d−1)   (and [d,d−1] = a_{d−1,d}/√(d−1))
//! ```
//!
//! The transposed pair in row/column d−1 is what makes the map positive but
//! not decomposable.

use num_complex::Complex64;

use crate::certificate::{Bound, Certificate};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, schur_block_psd, ComplexMatrix};
use crate::sampling::{GaussianSampler, GENERATOR};
use crate::MAX_DIM;

/// Absolute floor for eigenvalues of Λ(yy†).
pub const POSITIVITY_TOL: f64 = 1e-10;

/// Relative tolerance of the trace-preservation check.
pub const TRACE_TOL: f64 = 1e-12;

/// Identifies one member Λ_d of the family, `3 ≤ d ≤ 32`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MapSpec {
    d: usize,
}

impl MapSpec {
    pub fn new(d: usize) -> Result<Self> {
        if d < 3 {
            return Err(Error::DimensionTooSmall(d));
        }
        if d > MAX_DIM {
            return Err(Error::DimensionTooLarge(d));
        }
        Ok(Self { d })
    }

    pub fn d(&self) -> usize {
        self.d
    }
}

/// Λ_d applied entrywise to `a`.
pub fn apply_lambda(spec: MapSpec, a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = spec.d;
    if a.rows() != d || a.cols() != d {
        return Err(Error::DimensionMismatch(format!(
            "Λ_{d} expects a {d}×{d} matrix, got {}×{}",
            a.rows(),
            a.cols()
        )));
    }
    let last = d - 1;
    let twist = d - 2;
    let inv_sqrt = ((d - 1) as f64).recip().sqrt();

    let diag: Complex64 = (0..last).map(|i| a[(i, i)]).sum::<Complex64>() / (d - 1) as f64;
    let mut b = ComplexMatrix::zeros(d, d);
    for k in 0..last {
        b[(k, k)] = diag;
    }
    b[(last, last)] = a[(last, last)];
    for k in 0..twist {
        b[(k, last)] = a[(k, last)] * inv_sqrt;
        b[(last, k)] = a[(last, k)] * inv_sqrt;
    }
    b[(twist, last)] = a[(last, twist)] * inv_sqrt;
    b[(last, twist)] = a[(twist, last)] * inv_sqrt;
    Ok(b)
}

/// Unitality (exact) and trace preservation on seeded random matrices.
pub fn check_bistochastic(spec: MapSpec, trials: usize, seed: u64) -> Certificate {
    check_bistochastic_tol(spec, trials, seed, TRACE_TOL)
}

pub fn check_bistochastic_tol(spec: MapSpec, trials: usize, seed: u64, tol: f64) -> Certificate {
    check_bistochastic_with(
        spec.d,
        |a| apply_lambda(spec, a).expect("d×d input"),
        trials,
        seed,
        tol,
    )
}

pub(crate) fn check_bistochastic_with(
    d: usize,
    map: impl Fn(&ComplexMatrix) -> ComplexMatrix,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Certificate {
    let id = ComplexMatrix::identity(d);
    let unital = map(&id) == id;

    let mut sampler = GaussianSampler::new(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let a = sampler.complex_matrix(d, d);
        let before = a.trace();
        let after = map(&a).trace();
        worst = worst.max((after - before).norm() / (1.0 + before.norm()));
    }

    Certificate::judged("bistochastic", worst, tol, Bound::AbsAtMost, "map")
        .require(unital)
        .with_seed(seed)
        .detail("d", d)
        .detail("trials", trials)
        .detail("unital_exact", unital)
        .detail("max_relative_trace_error", worst)
        .detail("generator", GENERATOR)
}

/// Outcome of certifying Λ(yy†) ⪰ 0 for one vector `y`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rank1Outcome {
    pub min_eigenvalue: f64,
    /// Schur-complement verdict on the (d−1, 1) split, `None` when the
    /// corner |y_d|² is too small for the criterion to apply.
    pub schur: Option<bool>,
}

impl Rank1Outcome {
    pub fn spectrum_psd(&self) -> bool {
        self.spectrum_psd_within(POSITIVITY_TOL)
    }

    pub fn spectrum_psd_within(&self, tol: f64) -> bool {
        self.min_eigenvalue >= -tol
    }

    pub fn routes_agree(&self) -> bool {
        self.schur.is_none_or(|s| s == self.spectrum_psd())
    }
}

/// Certifies `Λ(yy†) ⪰ 0` by full spectrum and, when the corner is
/// nonsingular, by the Schur complement on the (d−1, 1) split.
pub fn certify_rank1_input(spec: MapSpec, y: &[Complex64]) -> Result<Rank1Outcome> {
    let out = apply_lambda(spec, &ComplexMatrix::outer(y, y))?;
    let min_eigenvalue = hermitian_eig(&out)?.min();
    let n = spec.d - 1;
    let schur = match schur_block_psd(
        &out.block(0, 0, n, n),
        &out.block(0, n, n, 1),
        &out.block(n, n, 1, 1),
    ) {
        Ok(v) => Some(v),
        Err(Error::NotPositiveDefinite { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(Rank1Outcome {
        min_eigenvalue,
        schur,
    })
}

/// Positivity on rank-one inputs, checked through both the full spectrum
/// and the Schur complement of the corner block.
pub fn check_positivity_rank1(spec: MapSpec, samples: usize, seed: u64) -> Certificate {
    check_positivity_rank1_tol(spec, samples, seed, POSITIVITY_TOL)
}

pub fn check_positivity_rank1_tol(
    spec: MapSpec,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Certificate {
    let mut sampler = GaussianSampler::new(seed);
    let mut min_seen = f64::INFINITY;
    let mut spectrum_failures = 0usize;
    let mut schur_applicable = 0usize;
    let mut schur_disagreements = 0usize;
    for _ in 0..samples {
        let y = sampler.complex_vector(spec.d);
        let outcome = certify_rank1_input(spec, &y).expect("d-dimensional sample");
        min_seen = min_seen.min(outcome.min_eigenvalue);
        let full = outcome.spectrum_psd_within(tol);
        if !full {
            spectrum_failures += 1;
        }
        if let Some(schur) = outcome.schur {
            schur_applicable += 1;
            if !(schur && full) {
                schur_disagreements += 1;
            }
        }
    }
    Certificate::judged("positivity", min_seen, tol, Bound::AtLeastNegTol, "map")
        .require(spectrum_failures == 0 && schur_disagreements == 0)
        .with_seed(seed)
        .detail("d", spec.d)
        .detail("samples", samples)
        .detail("min_eigenvalue", min_seen)
        .detail("spectrum_failures", spectrum_failures)
        .detail("schur_applicable", schur_applicable)
        .detail("schur_failures", schur_disagreements)
        .detail("generator", GENERATOR)
}

/// Smallest eigenvalue of Λ(P) relative to `1 + maxabs(Λ(P))`.
pub fn relative_min_eigenvalue(spec: MapSpec, p: &ComplexMatrix) -> Result<f64> {
    let out = apply_lambda(spec, p)?;
    Ok(hermitian_eig(&out)?.min() / (1.0 + out.max_abs()))
}

/// Positivity on seeded random full-rank PSD inputs `G·G†`.
pub fn check_positivity_psd(spec: MapSpec, samples: usize, seed: u64) -> Certificate {
    let mut sampler = GaussianSampler::new(seed);
    let mut worst = f64::INFINITY;
    for _ in 0..samples {
        let g = sampler.complex_matrix(spec.d, spec.d);
        let p = g.matmul(&g.adjoint());
        worst = worst.min(relative_min_eigenvalue(spec, &p).expect("d×d input"));
    }
    Certificate::judged(
        "positivity-psd",
        worst,
        POSITIVITY_TOL,
        Bound::AtLeastNegTol,
        "map",
    )
    .with_seed(seed)
    .detail("d", spec.d)
    .detail("samples", samples)
    .detail("relative_min_eigenvalue", worst)
    .detail("generator", GENERATOR)
}

/// Entrywise statement of the d = 3 member, written out independently of
/// [`apply_lambda`].
#[cfg(test)]
pub(crate) fn lambda3_literal(a: &ComplexMatrix) -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = crate::linalg::c64(0.0, 0.0);
    let top = (a[(0, 0)] + a[(1, 1)]) * 0.5;
    let rows = [
        [top, z, a[(0, 2)] * h],
        [z, top, a[(2, 1)] * h],
        [a[(2, 0)] * h, a[(1, 2)] * h, a[(2, 2)]],
    ];
    ComplexMatrix::from_fn(3, 3, |i, j| rows[i][j])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{basis_vector, c64};
    use proptest::prelude::*;

    fn spec(d: usize) -> MapSpec {
        MapSpec::new(d).unwrap()
    }

    #[test]
    fn spec_bounds() {
        assert_eq!(MapSpec::new(2), Err(Error::DimensionTooSmall(2)));
        assert_eq!(MapSpec::new(33), Err(Error::DimensionTooLarge(33)));
        assert!(MapSpec::new(32).is_ok());
    }

    #[test]
    fn unital_at_d3() {
        let id = ComplexMatrix::identity(3);
        assert_eq!(apply_lambda(spec(3), &id).unwrap(), id);
    }

    #[test]
    fn d3_off_diagonal_entries() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let out = apply_lambda(spec(3), &ComplexMatrix::unit(3, 0, 2)).unwrap();
        assert_eq!(out, ComplexMatrix::unit(3, 0, 2).scale_real(h));
        // a_23 lands at position (3,2).
        let out = apply_lambda(spec(3), &ComplexMatrix::unit(3, 1, 2)).unwrap();
        assert_eq!(out, ComplexMatrix::unit(3, 2, 1).scale_real(h));
    }

    #[test]
    fn d4_first_diagonal_unit() {
        let out = apply_lambda(spec(4), &ComplexMatrix::unit(4, 0, 0)).unwrap();
        let third = c64(1.0 / 3.0, 0.0);
        let expect = ComplexMatrix::from_fn(4, 4, |i, j| {
            if i == j && i < 3 {
                third
            } else {
                c64(0.0, 0.0)
            }
        });
        assert_eq!(out, expect);
    }

    #[test]
    fn d3_matches_literal_on_all_units() {
        for i in 0..3 {
            for j in 0..3 {
                let e = ComplexMatrix::unit(3, i, j);
                assert_eq!(
                    apply_lambda(spec(3), &e).unwrap(),
                    lambda3_literal(&e),
                    "e_{i}{j}"
                );
            }
        }
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            apply_lambda(spec(4), &ComplexMatrix::identity(3)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn bistochastic_passes() {
        for d in [3, 8] {
            let c = check_bistochastic(spec(d), 10, 1);
            assert!(c.passed, "{c:?}");
            assert!(c.is_consistent());
        }
    }

    #[test]
    fn perturbed_map_fails_bistochastic() {
        let s = spec(4);
        let perturbed = |a: &ComplexMatrix| {
            let mut b = apply_lambda(s, a).unwrap();
            b[(3, 3)] *= 1.01;
            b
        };
        let c = check_bistochastic_with(4, perturbed, 10, 1, TRACE_TOL);
        assert!(!c.passed);
        assert_eq!(c.details["unital_exact"], false);
    }

    #[test]
    fn rank1_positivity() {
        for d in [3, 6] {
            let c = check_positivity_rank1(spec(d), 1000, 7);
            assert!(c.passed, "{c:?}");
            assert!(c.value.unwrap() >= -1e-10);
            assert_eq!(c.details["schur_applicable"], 1000);
        }
    }

    #[test]
    fn rank1_corner_only_falls_back_to_spectrum() {
        let d = 5;
        let y = basis_vector(d, d - 1);
        let out = apply_lambda(spec(d), &ComplexMatrix::outer(&y, &y)).unwrap();
        assert_eq!(out, ComplexMatrix::unit(d, d - 1, d - 1));
        let o = certify_rank1_input(spec(d), &y).unwrap();
        assert_eq!(o.schur, Some(true));

        // Zero corner: the Schur route does not apply.
        let y = basis_vector(d, 0);
        let o = certify_rank1_input(spec(d), &y).unwrap();
        assert_eq!(o.schur, None);
        assert!(o.spectrum_psd());
    }

    #[test]
    fn psd_positivity() {
        let c = check_positivity_psd(spec(3), 200, 11);
        assert!(c.passed, "{c:?}");
    }

    #[test]
    fn psd_special_inputs() {
        let d = 4;
        let id = ComplexMatrix::identity(d);
        assert_eq!(apply_lambda(spec(d), &id).unwrap(), id);
        assert_eq!(hermitian_eig(&id).unwrap().min(), 1.0);
        let edd = ComplexMatrix::unit(d, d - 1, d - 1);
        assert_eq!(apply_lambda(spec(d), &edd).unwrap(), edd);
        assert_eq!(relative_min_eigenvalue(spec(d), &edd).unwrap(), 0.0);
    }

    #[test]
    fn transpose_map_is_detected_by_rank1_check() {
        // Sanity check of the machinery: a map that is not positive fails.
        let d = 3;
        let bad = |a: &ComplexMatrix| {
            let mut b = apply_lambda(spec(d), a).unwrap();
            b[(0, 0)] = c64(0.0, 0.0);
            b
        };
        let mut s = GaussianSampler::new(1);
        let y = s.complex_vector(d);
        let out = bad(&ComplexMatrix::outer(&y, &y));
        assert!(hermitian_eig(&out).unwrap().min() < -1e-6);
    }

    proptest! {
        #[test]
        fn linear(seed in any::<u64>(), d in 3usize..9) {
            let mut s = GaussianSampler::new(seed);
            let (a, b) = (s.complex_matrix(d, d), s.complex_matrix(d, d));
            let (alpha, beta) = (s.complex_normal(), s.complex_normal());
            let lhs = apply_lambda(spec(d), &(&a.scale(alpha) + &b.scale(beta))).unwrap();
            let rhs = &apply_lambda(spec(d), &a).unwrap().scale(alpha)
                + &apply_lambda(spec(d), &b).unwrap().scale(beta);
            prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        }

        #[test]
        fn preserves_adjoints(seed in any::<u64>(), d in 3usize..9) {
            let a = GaussianSampler::new(seed).complex_matrix(d, d);
            let lhs = apply_lambda(spec(d), &a.adjoint()).unwrap();
            let rhs = apply_lambda(spec(d), &a).unwrap().adjoint();
            prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-15);
        }
    }
}
