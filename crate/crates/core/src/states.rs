//! The PPT entangled family ρ_d and its detection by `W_d`.
//!
//! ρ_d is a d×d array of d×d blocks (1-based block indices):
//!
//! ```text
//! block(k,k)   = √(d−2)·e_kk + e_dd           k ≤ d−1
//! block(k,d)   = −e_kd,  block(d,k) = −e_dk    k ≤ d−2
//! block(d−1,d) = −e_{d,d−1},  block(d,d−1) = −e_{d−1,d}
//! block(d,d)   = I − (1 − √(d−2))·e_dd
//! ```

use num_complex::Complex64;

use crate::certificate::{Bound, Certificate};
use crate::error::{Error, Result};
use crate::linalg::{c64, hermitian_eig, partial_transpose_second, ComplexMatrix};
use crate::witness::{Normalization, Witness};
use crate::MAX_DIM;

/// Relative floor (times maxabs) on the spectra of ρ and ρ^Γ.
pub const PPT_TOL: f64 = 1e-10;

/// Detection requires `Tr(Wρ) < −DETECTION_TOL`.
pub const DETECTION_TOL: f64 = 1e-10;

/// Largest admissible imaginary part of `Tr(Wρ)`.
pub const IMAGINARY_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct PptState {
    pub d: usize,
    pub matrix: ComplexMatrix,
    /// Divided by its trace.
    pub normalized: bool,
}

impl PptState {
    pub fn convention(&self) -> &'static str {
        if self.normalized {
            "rho=normalized"
        } else {
            "rho=unnormalized"
        }
    }

    pub fn partial_transpose(&self) -> ComplexMatrix {
        partial_transpose_second(&self.matrix, self.d, self.d).expect("d²×d² by construction")
    }
}

fn check_d(d: usize) -> Result<()> {
    if d < 3 {
        return Err(Error::DimensionTooSmall(d));
    }
    if d > MAX_DIM {
        return Err(Error::DimensionTooLarge(d));
    }
    Ok(())
}

pub fn build_rho(d: usize, normalized: bool) -> Result<PptState> {
    check_d(d)?;
    let s = ((d - 2) as f64).sqrt();
    let last = d - 1;
    let twist = d - 2;
    let n = d * d;
    let at = |block: usize, inner: usize| block * d + inner;

    let mut m = ComplexMatrix::zeros(n, n);
    let minus_one = c64(-1.0, 0.0);
    for k in 0..last {
        m[(at(k, k), at(k, k))] = c64(s, 0.0);
        m[(at(k, last), at(k, last))] = c64(1.0, 0.0);
    }
    for k in 0..twist {
        m[(at(k, k), at(last, last))] = minus_one;
        m[(at(last, last), at(k, k))] = minus_one;
    }
    m[(at(twist, last), at(last, twist))] = minus_one;
    m[(at(last, twist), at(twist, last))] = minus_one;
    for k in 0..last {
        m[(at(last, k), at(last, k))] = c64(1.0, 0.0);
    }
    m[(at(last, last), at(last, last))] = c64(s, 0.0);

    if normalized {
        let t = m.trace().re;
        m = m.scale_real(1.0 / t);
    }
    Ok(PptState {
        d,
        matrix: m,
        normalized,
    })
}

/// Both ρ and ρ^Γ positive semidefinite to within `PPT_TOL·maxabs`.
pub fn check_ppt(state: &PptState) -> Result<Certificate> {
    check_ppt_tol(state, PPT_TOL)
}

/// As [`check_ppt`] with relative tolerance `rel_tol`.
pub fn check_ppt_tol(state: &PptState, rel_tol: f64) -> Result<Certificate> {
    let scale = state.matrix.max_abs();
    let tol = rel_tol * scale;
    let rho = hermitian_eig(&state.matrix)?;
    let gamma = hermitian_eig(&state.partial_transpose())?;
    let worst = rho.min().min(gamma.min());
    Ok(
        Certificate::judged("ppt", worst, tol, Bound::AtLeastNegTol, state.convention())
            .require(rho.min() >= -tol && gamma.min() >= -tol)
            .detail("d", state.d)
            .detail("min_eigenvalue_rho", rho.min())
            .detail("min_eigenvalue_rho_gamma", gamma.min())
            .detail("spectrum_rho", rho.values.clone())
            .detail("spectrum_rho_gamma", gamma.values.clone()),
    )
}

/// `(d−1)×(d−1)` matrix with diagonal √(d−2) and a border of −1 in the last
/// row and column.
pub fn arrowhead_matrix(d: usize) -> Result<ComplexMatrix> {
    check_d(d)?;
    let n = d - 1;
    let s = ((d - 2) as f64).sqrt();
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            c64(s, 0.0)
        } else if i == n - 1 || j == n - 1 {
            c64(-1.0, 0.0)
        } else {
            c64(0.0, 0.0)
        }
    }))
}

/// Ascending eigenvalues grouped into `(value, multiplicity)` clusters;
/// neighbours closer than `1e-9·(1+maxabs)` merge. Each cluster reports
/// its mean.
pub fn clustered_spectrum(m: &ComplexMatrix) -> Result<Vec<(f64, usize)>> {
    let values = hermitian_eig(m)?.values;
    let gap = 1e-9 * (1.0 + m.max_abs());
    let mut clusters: Vec<(f64, usize)> = Vec::new();
    let mut prev = f64::NEG_INFINITY;
    for v in values {
        match clusters.last_mut() {
            Some((sum, count)) if v - prev <= gap => {
                *sum += v;
                *count += 1;
            }
            _ => clusters.push((v, 1)),
        }
        prev = v;
    }
    Ok(clusters
        .into_iter()
        .map(|(sum, count)| (sum / count as f64, count))
        .collect())
}

pub fn arrowhead_spectrum(d: usize) -> Result<Vec<(f64, usize)>> {
    clustered_spectrum(&arrowhead_matrix(d)?)
}

/// `Tr(W·ρ)` for raw matrices; rejects a non-negligible imaginary part.
pub fn trace_pairing(w: &ComplexMatrix, rho: &ComplexMatrix) -> Result<f64> {
    if w.rows() != rho.rows() || w.cols() != rho.cols() || !w.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "witness {}×{} against state {}×{}",
            w.rows(),
            w.cols(),
            rho.rows(),
            rho.cols()
        )));
    }
    let t: Complex64 = w.trace_product(rho)?;
    if t.im.abs() > IMAGINARY_TOL {
        return Err(Error::ImaginaryTrace(t.im));
    }
    Ok(t.re)
}

/// Detection verdict for arbitrary matrices.
pub fn detect_matrices(
    w: &ComplexMatrix,
    rho: &ComplexMatrix,
    convention: impl Into<String>,
) -> Result<Certificate> {
    let value = trace_pairing(w, rho)?;
    Ok(Certificate::judged(
        "detection",
        value,
        DETECTION_TOL,
        Bound::BelowNegTol,
        convention,
    ))
}

/// The closed-form detection value `2(d−1)(√(d−2) − √(d−1))`,
/// It differs from `Tr(W_d ρ_d)` by the factor [`kappa`].
pub fn closed_form_detection_value(d: usize) -> f64 {
    let d = d as f64;
    2.0 * (d - 1.0) * ((d - 2.0).sqrt() - (d - 1.0).sqrt())
}

/// Positive factor `κ(d)` with `closed form = κ(d) · Tr(W_d ρ_d)` for the
/// unnormalized ρ_d.
///
/// With `Σ_ij |ii⟩⟨jj|` one gets `Tr(W ρ) = 2(√(d−2) − √(d−1))`, so
/// `κ = d−1`; the trace-one projector adds a further factor `d`.
pub fn kappa(d: usize, normalization: Normalization) -> f64 {
    let base = (d - 1) as f64;
    match normalization {
        Normalization::Unnormalized => base,
        Normalization::Projector => base * d as f64,
    }
}

/// `Tr(W_d·ρ)`; passes when the value is below `−DETECTION_TOL`.
pub fn detect(w: &Witness, state: &PptState) -> Result<Certificate> {
    if w.d != state.d {
        return Err(Error::DimensionMismatch(format!(
            "witness for d = {} against state for d = {}",
            w.d, state.d
        )));
    }
    let convention = format!("{}; {}", w.convention(), state.convention());
    let cert = detect_matrices(&w.matrix, &state.matrix, convention)?;
    let value = cert.value.expect("detection value");
    let d = state.d as f64;
    let sign_factor = (d - 2.0).sqrt() - (d - 1.0).sqrt();
    let closed_form = closed_form_detection_value(state.d);
    Ok(cert
        .detail("d", state.d)
        .detail("ratio_to_sqrt_difference", value / sign_factor)
        .detail("closed_form_value", closed_form)
        .detail("closed_form_over_computed", closed_form / value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::posmap::MapSpec;
    use crate::witness::build_witness;

    fn idx(d: usize, i: usize, k: usize) -> usize {
        i * d + k
    }

    #[test]
    fn rho3_entries() {
        let r = build_rho(3, false).unwrap();
        assert_eq!(r.matrix[(idx(3, 0, 0), idx(3, 2, 2))], c64(-1.0, 0.0));
        assert_eq!(r.matrix[(idx(3, 0, 0), idx(3, 0, 0))], c64(1.0, 0.0));
        assert_eq!(r.matrix.hermitian_defect(), 0.0);
    }

    #[test]
    fn rho3_is_singular() {
        let r = build_rho(3, false).unwrap();
        assert!(hermitian_eig(&r.matrix).unwrap().min().abs() < 1e-10);
    }

    #[test]
    fn rho4_trace() {
        let r = build_rho(4, false).unwrap();
        let expect = 4.0 * 2f64.sqrt() + 6.0;
        assert!((r.matrix.trace().re - expect).abs() < 1e-12);
        let n = build_rho(4, true).unwrap();
        assert!((n.matrix.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rho_rejects_small_d() {
        assert_eq!(
            build_rho(2, false).unwrap_err(),
            Error::DimensionTooSmall(2)
        );
        assert!(arrowhead_spectrum(2).is_err());
    }

    #[test]
    fn partial_transpose_block_d3() {
        // Block (1,3) of ρ^Γ is −e_31.
        let g = build_rho(3, false).unwrap().partial_transpose();
        let block = g.block(0, 6, 3, 3);
        assert_eq!(block, ComplexMatrix::unit(3, 2, 0).scale_real(-1.0));
    }

    #[test]
    fn ppt_holds() {
        for d in [3, 8] {
            for normalized in [false, true] {
                let c = check_ppt(&build_rho(d, normalized).unwrap()).unwrap();
                assert!(c.passed, "{c:?}");
            }
        }
    }

    #[test]
    fn flipped_diagonal_term_breaks_positivity() {
        let mut r = build_rho(3, false).unwrap();
        // e_dd term of block (1,1).
        let i = idx(3, 0, 2);
        r.matrix[(i, i)] = c64(-1.0, 0.0);
        let c = check_ppt(&r).unwrap();
        assert!(!c.passed);
        assert!(c.details["min_eigenvalue_rho"].as_f64().unwrap() < -0.5);
    }

    #[test]
    fn arrowhead_examples() {
        let check = |d: usize, expect: &[(f64, usize)]| {
            let got = arrowhead_spectrum(d).unwrap();
            assert_eq!(got.len(), expect.len(), "d = {d}: {got:?}");
            for ((v, m), (ev, em)) in got.iter().zip(expect) {
                assert!((v - ev).abs() < 1e-9, "d = {d}: {v} vs {ev}");
                assert_eq!(m, em);
            }
        };
        let r2 = 2f64.sqrt();
        let r3 = 3f64.sqrt();
        check(3, &[(0.0, 1), (2.0, 1)]);
        check(4, &[(0.0, 1), (r2, 1), (2.0 * r2, 1)]);
        check(5, &[(0.0, 1), (r3, 2), (2.0 * r3, 1)]);
    }

    #[test]
    fn detection_is_negative_under_both_conventions() {
        for d in 3..=8 {
            let spec = MapSpec::new(d).unwrap();
            for norm in [Normalization::Projector, Normalization::Unnormalized] {
                let w = build_witness(spec, norm).unwrap();
                for normalized in [false, true] {
                    let c = detect(&w, &build_rho(d, normalized).unwrap()).unwrap();
                    assert!(c.passed, "{c:?}");
                }
            }
        }
    }

    #[test]
    fn closed_form_value_up_to_kappa() {
        for d in 3..=8 {
            let spec = MapSpec::new(d).unwrap();
            let rho = build_rho(d, false).unwrap();
            for norm in [Normalization::Projector, Normalization::Unnormalized] {
                let w = build_witness(spec, norm).unwrap();
                let v = detect(&w, &rho).unwrap().value.unwrap();
                let k = kappa(d, norm);
                assert!((k * v - closed_form_detection_value(d)).abs() < 1e-10 * k * v.abs());
            }
        }
    }

    #[test]
    fn maximally_mixed_state_is_not_detected() {
        for d in 3..=5 {
            let w = build_witness(MapSpec::new(d).unwrap(), Normalization::Projector).unwrap();
            let n = d * d;
            let mixed = ComplexMatrix::identity(n).scale_real(1.0 / n as f64);
            let c = detect_matrices(&w.matrix, &mixed, "mixed").unwrap();
            assert!(!c.passed);
            assert!((c.value.unwrap() - 1.0 / n as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn detection_rejects_mismatch_and_non_hermitian() {
        let w = build_witness(MapSpec::new(3).unwrap(), Normalization::Projector).unwrap();
        let rho4 = build_rho(4, false).unwrap();
        assert!(matches!(
            detect(&w, &rho4),
            Err(Error::DimensionMismatch(_))
        ));
        let skew = ComplexMatrix::identity(9).scale(c64(0.0, 1.0));
        assert!(matches!(
            detect_matrices(&w.matrix, &skew, "x"),
            Err(Error::ImaginaryTrace(_))
        ));
    }
}
