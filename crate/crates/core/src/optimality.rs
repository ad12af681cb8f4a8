//! Optimality of `W_d` through its zero-expectation product vectors.
//!
//! For `x ∈ C^d` the reduced witness `W_d(x)` has the block form
//! `[[z·I, a], [a†, u]]` with a one-dimensional kernel spanned by
//! `y(x) = (a, −z)`. The product vectors `q(x) = x ⊗ y(x)` (first slot per
//! the witness convention) satisfy `⟨q|W|q⟩ = 0`, and a generic collection of
//! them spans `C^d ⊗ C^d`.

use num_complex::Complex64;

use crate::certificate::{Bound, Certificate};
use crate::error::{Error, Result};
use crate::linalg::{kron_vec, norm, normalized, rank_from_profile, singular_values};
use crate::posmap::MapSpec;
use crate::sampling::{GaussianSampler, GENERATOR};
use crate::witness::{build_witness, closed_form_parts, FirstSlot, Normalization, Witness};

/// Relative bound on `|⟨q|W|q⟩| / (‖W‖_F·‖q‖²)`.
pub const ZERO_FAMILY_TOL: f64 = 1e-10;

/// `x` counts as proportional to `e_d` when `z ≤ DEGENERATE_TOL·‖x‖²`.
pub const DEGENERATE_TOL: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct KernelVector {
    pub x: Vec<Complex64>,
    pub y: Vec<Complex64>,
    pub first_slot: FirstSlot,
}

impl KernelVector {
    /// `q(x)`: the first-slot vector of `x` tensored with `y`.
    pub fn product(&self) -> Vec<Complex64> {
        kron_vec(&self.first_slot.apply(&self.x), &self.y)
    }

    /// `⟨q|W|q⟩ / (‖W‖_F·‖q‖²)`.
    pub fn relative_expectation(&self, w: &Witness) -> f64 {
        let q = self.product();
        let e = w.matrix.expectation(&q);
        e.norm() / (w.matrix.frobenius_norm() * norm(&q).powi(2))
    }

    /// `‖W_d(x)·y‖ / (‖W_d(x)‖_F·‖y‖)` with the reduction taken in this
    /// vector's first-slot convention.
    pub fn kernel_residual(&self, w: &Witness) -> Result<f64> {
        let r = crate::witness::reduce_witness(w, &self.x, self.first_slot.is_conjugated())?;
        let wy = r.matrix.mul_vec(&self.y);
        Ok(norm(&wy) / (r.matrix.frobenius_norm() * norm(&self.y)))
    }
}

/// `y(x) = (a_1, …, a_{d−1}, −z)`.
pub fn kernel_vector(
    spec: MapSpec,
    x: &[Complex64],
    first_slot: FirstSlot,
) -> Result<KernelVector> {
    let d = spec.d();
    if x.len() != d {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} for d = {d}",
            x.len()
        )));
    }
    let (z, _, mut y) = closed_form_parts(x);
    let total: f64 = x.iter().map(|v| v.norm_sqr()).sum();
    if total == 0.0 {
        return Err(Error::ZeroVector);
    }
    if z <= DEGENERATE_TOL * total {
        return Err(Error::Degenerate("x is proportional to e_d".into()));
    }
    y.push(Complex64::new(-z, 0.0));
    Ok(KernelVector {
        x: x.to_vec(),
        y,
        first_slot,
    })
}

/// Draws until `x` is not proportional to `e_d`; returns the vector and the
/// number of rejected draws.
fn sample_nondegenerate(sampler: &mut GaussianSampler, d: usize) -> (Vec<Complex64>, usize) {
    let mut rejected = 0;
    loop {
        let x = sampler.complex_vector(d);
        let total: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        let z: f64 = x[..d - 1].iter().map(|v| v.norm_sqr()).sum();
        if z > DEGENERATE_TOL * total {
            return (x, rejected);
        }
        rejected += 1;
    }
}

/// Zero expectation of `W_d` on sampled `q(x)`.
pub fn check_zero_family(spec: MapSpec, samples: usize, seed: u64) -> Result<Certificate> {
    check_zero_family_tol(spec, samples, seed, ZERO_FAMILY_TOL)
}

pub fn check_zero_family_tol(
    spec: MapSpec,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<Certificate> {
    let w = build_witness(spec, Normalization::default())?;
    zero_family_with(&w, samples, seed, tol, |x| {
        kernel_vector(spec, x, w.first_slot).map(|k| k.product())
    })
}

pub(crate) fn zero_family_with(
    w: &Witness,
    samples: usize,
    seed: u64,
    tol: f64,
    product: impl Fn(&[Complex64]) -> Result<Vec<Complex64>>,
) -> Result<Certificate> {
    let d = w.d;
    let w_norm = w.matrix.frobenius_norm();
    let mut sampler = GaussianSampler::new(seed);
    let mut worst: f64 = 0.0;
    let mut resampled = 0;
    for _ in 0..samples {
        let (x, rejected) = sample_nondegenerate(&mut sampler, d);
        resampled += rejected;
        let q = product(&x)?;
        let e = w.matrix.expectation(&q);
        worst = worst.max(e.norm() / (w_norm * norm(&q).powi(2)));
    }
    Ok(
        Certificate::judged("zero-family", worst, tol, Bound::AbsAtMost, w.convention())
            .with_seed(seed)
            .detail("d", d)
            .detail("samples", samples)
            .detail("resampled", resampled)
            .detail("max_relative_expectation", worst)
            .detail("generator", GENERATOR),
    )
}

/// Randomized certificate that the sampled `q(x)` span `C^d ⊗ C^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpanCertificate {
    pub d: usize,
    pub sample_count: usize,
    pub seed: u64,
    /// Singular values of the normalized `q(x)`, descending.
    pub singular_profile: Vec<f64>,
    pub rank: usize,
    pub passed: bool,
}

impl SpanCertificate {
    pub fn to_certificate(&self, rel_threshold: f64, convention: &str) -> Certificate {
        let smallest_kept = self
            .singular_profile
            .get(self.d * self.d - 1)
            .copied()
            .unwrap_or(0.0);
        let top = self.singular_profile.first().copied().unwrap_or(0.0);
        let gap = if top > 0.0 { smallest_kept / top } else { 0.0 };
        Certificate {
            name: "span".into(),
            passed: self.passed,
            value: Some(gap),
            tolerance: rel_threshold,
            bound: Bound::AboveTol,
            convention: convention.into(),
            seed: Some(self.seed),
            details: Default::default(),
        }
        .detail("d", self.d)
        .detail("samples", self.sample_count)
        .detail("rank", self.rank)
        .detail("target_rank", self.d * self.d)
        .detail("singular_profile", self.singular_profile.clone())
        .detail("generator", GENERATOR)
    }
}

pub fn certify_span(
    spec: MapSpec,
    samples: usize,
    seed: u64,
    rel_threshold: f64,
) -> Result<SpanCertificate> {
    let d = spec.d();
    if samples < d * d {
        return Err(Error::InvalidArgument(format!(
            "span certificate needs at least d² = {} samples, got {samples}",
            d * d
        )));
    }
    let w = build_witness(spec, Normalization::default())?;
    let mut sampler = GaussianSampler::new(seed);
    let xs: Vec<_> = (0..samples)
        .map(|_| sample_nondegenerate(&mut sampler, d).0)
        .collect();
    span_of(spec, w.first_slot, &xs, seed, rel_threshold)
}

/// Span certificate for caller-chosen points `xs`.
pub fn span_of(
    spec: MapSpec,
    first_slot: FirstSlot,
    xs: &[Vec<Complex64>],
    seed: u64,
    rel_threshold: f64,
) -> Result<SpanCertificate> {
    if !(rel_threshold > 0.0 && rel_threshold < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "rank threshold {rel_threshold} outside (0, 1)"
        )));
    }
    let d = spec.d();
    let qs = xs
        .iter()
        .map(|x| normalized(&kernel_vector(spec, x, first_slot)?.product()))
        .collect::<Result<Vec<_>>>()?;
    let singular_profile = singular_values(&qs)?;
    let rank = rank_from_profile(&singular_profile, rel_threshold);
    Ok(SpanCertificate {
        d,
        sample_count: xs.len(),
        seed,
        singular_profile,
        rank,
        passed: rank == d * d,
    })
}

/// Zero family plus spanning, i.e. the optimality criterion.
pub fn check_optimality(
    spec: MapSpec,
    zero_samples: usize,
    span_samples: usize,
    seed: u64,
    tol: f64,
    rel_threshold: f64,
) -> Result<Certificate> {
    let zero = check_zero_family_tol(spec, zero_samples, seed, tol)?;
    let span = certify_span(spec, span_samples, seed, rel_threshold)?;
    let span_cert = span.to_certificate(rel_threshold, &zero.convention);
    let mut out = Certificate::judged(
        "optimality",
        zero.value.expect("zero-family value"),
        tol,
        Bound::AbsAtMost,
        zero.convention.clone(),
    )
    .require(span.passed)
    .with_seed(seed)
    .detail("d", spec.d())
    .detail("zero_samples", zero_samples)
    .detail("span_samples", span_samples)
    .detail("rank", span.rank)
    .detail("target_rank", spec.d() * spec.d())
    .detail("rank_threshold", rel_threshold)
    .detail("generator", GENERATOR);
    out.details.insert(
        "zero_family".into(),
        serde_json::to_value(&zero).expect("serializable"),
    );
    out.details.insert(
        "span".into(),
        serde_json::to_value(&span_cert).expect("serializable"),
    );
    Ok(out)
}
