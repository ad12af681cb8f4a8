//! The entanglement witness `W_d = (id ⊗ Λ_d)(P⁺)` and its reductions.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::certificate::{Bound, Certificate};
use crate::error::{Error, Result};
use crate::linalg::{
    c64, conj_vec, determinant, hermitian_eig, kron_vec, normalized, row_normalized, ComplexMatrix,
};
use crate::posmap::{apply_lambda, MapSpec};
use crate::sampling::{GaussianSampler, GENERATOR};

/// Floor on the product-vector minimum for block positivity.
pub const BLOCK_POSITIVITY_TOL: f64 = 1e-8;

/// A witness must have an eigenvalue below `−NOT_CP_TOL`.
pub const NOT_CP_TOL: f64 = 1e-8;

/// Agreement between the numerical and closed-form reductions.
pub const REDUCTION_TOL: f64 = 1e-10;

/// Bound on `|det W_d(x)|` after row normalization.
pub const DET_TOL: f64 = 1e-9;

pub const DEFAULT_RESTARTS: usize = 50;
pub const DEFAULT_MAX_ITERS: usize = 200;

/// Seed of the draws that fix the first-slot convention.
const CONVENTION_SEED: u64 = 0x5eed_c0de;
const CONVENTION_SAMPLES: usize = 20;

/// Normalization of the maximally entangled operator fed to `id ⊗ Λ_d`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Normalization {
    /// `P⁺ = (1/d) Σ_ij |ii⟩⟨jj|`, trace one.
    #[default]
    Projector,
    /// `Σ_ij |ii⟩⟨jj|`.
    Unnormalized,
}

impl Normalization {
    pub fn as_str(self) -> &'static str {
        match self {
            Normalization::Projector => "projector",
            Normalization::Unnormalized => "unnormalized",
        }
    }

    fn prefactor(self, d: usize) -> f64 {
        match self {
            Normalization::Projector => 1.0 / d as f64,
            Normalization::Unnormalized => 1.0,
        }
    }
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "projector" => Ok(Normalization::Projector),
            "unnormalized" => Ok(Normalization::Unnormalized),
            other => Err(Error::InvalidArgument(format!(
                "unknown normalization {other:?} (expected projector or unnormalized)"
            ))),
        }
    }
}

/// How the first factor of a product vector built from `x` enters.
///
/// `Conjugated` means the product vector is `conj(x) ⊗ y`; then
/// `Tr_1(W · |conj x⟩⟨conj x| ⊗ I) ∝ Λ_d(x x†)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FirstSlot {
    Direct,
    Conjugated,
}

impl FirstSlot {
    pub fn is_conjugated(self) -> bool {
        self == FirstSlot::Conjugated
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FirstSlot::Direct => "direct",
            FirstSlot::Conjugated => "conjugated",
        }
    }

    /// The first-slot vector built from `x`.
    pub fn apply(self, x: &[Complex64]) -> Vec<Complex64> {
        match self {
            FirstSlot::Direct => x.to_vec(),
            FirstSlot::Conjugated => conj_vec(x),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub d: usize,
    pub matrix: ComplexMatrix,
    pub normalization: Normalization,
    /// Resolved once at construction, see [`resolve_first_slot`].
    pub first_slot: FirstSlot,
}

impl Witness {
    /// Convention string recorded in certificates.
    pub fn convention(&self) -> String {
        format!(
            "P+={}; first-slot={}",
            self.normalization,
            self.first_slot.as_str()
        )
    }

    pub fn spec(&self) -> MapSpec {
        MapSpec::new(self.d).expect("witness dimension validated at construction")
    }
}

/// `Σ_ij c·e_ij ⊗ Λ_d(e_ij)` with `c` fixed by the normalization.
pub fn choi_matrix(spec: MapSpec, normalization: Normalization) -> ComplexMatrix {
    let d = spec.d();
    let c = normalization.prefactor(d);
    let mut w = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            let image = apply_lambda(spec, &ComplexMatrix::unit(d, i, j)).expect("d×d unit");
            for k in 0..d {
                for l in 0..d {
                    w[(i * d + k, j * d + l)] = image[(k, l)] * c;
                }
            }
        }
    }
    w
}

pub fn build_witness(spec: MapSpec, normalization: Normalization) -> Result<Witness> {
    let matrix = choi_matrix(spec, normalization);
    debug_assert!(matrix.is_hermitian());
    let first_slot = resolve_first_slot(spec, &matrix)?;
    Ok(Witness {
        d: spec.d(),
        matrix,
        normalization,
        first_slot,
    })
}

/// Picks the first-slot convention under which the numerical reduction
/// matches the closed-form block up to a positive scale on seeded complex
/// draws. Exactly one convention must match.
pub fn resolve_first_slot(spec: MapSpec, matrix: &ComplexMatrix) -> Result<FirstSlot> {
    let d = spec.d();
    let matches = |slot: FirstSlot| -> bool {
        let mut sampler = GaussianSampler::new(CONVENTION_SEED);
        (0..CONVENTION_SAMPLES).all(|_| {
            let x = sampler.complex_vector(d);
            reduce_matrix(matrix, d, &x, slot)
                .map(|r| r.closed_form_discrepancy() <= REDUCTION_TOL)
                .unwrap_or(false)
        })
    };
    match (matches(FirstSlot::Direct), matches(FirstSlot::Conjugated)) {
        (true, false) => Ok(FirstSlot::Direct),
        (false, true) => Ok(FirstSlot::Conjugated),
        _ => Err(Error::ConventionUnresolved),
    }
}

/// `W_d(x) = Tr_1(W · P ⊗ I)` together with the closed-form block
/// `[[z·I, a], [a†, u]]` built from `x`.
#[derive(Clone, Debug)]
pub struct ReducedWitness {
    pub x: Vec<Complex64>,
    pub matrix: ComplexMatrix,
    pub z: f64,
    pub u: f64,
    pub a: Vec<Complex64>,
}

/// `z = Σ_{i<d}|x_i|²`, `u = (d−1)|x_d|²`, and
/// `a_i = √(d−1)·conj(x_d)·x_i` for `i ≤ d−2`, `a_{d−1} = √(d−1)·x_d·conj(x_{d−1})`.
pub fn closed_form_parts(x: &[Complex64]) -> (f64, f64, Vec<Complex64>) {
    let d = x.len();
    let last = d - 1;
    let root = ((d - 1) as f64).sqrt();
    let z = x[..last].iter().map(|v| v.norm_sqr()).sum();
    let u = (d - 1) as f64 * x[last].norm_sqr();
    let xd = x[last];
    let mut a: Vec<Complex64> = x[..d - 2].iter().map(|xi| xd.conj() * xi * root).collect();
    a.push(xd * x[d - 2].conj() * root);
    (z, u, a)
}

impl ReducedWitness {
    pub fn d(&self) -> usize {
        self.x.len()
    }

    pub fn closed_form_matrix(&self) -> ComplexMatrix {
        let d = self.d();
        let last = d - 1;
        ComplexMatrix::from_fn(d, d, |i, j| match (i == last, j == last) {
            (false, false) if i == j => c64(self.z, 0.0),
            (false, false) => c64(0.0, 0.0),
            (false, true) => self.a[i],
            (true, false) => self.a[j].conj(),
            (true, true) => c64(self.u, 0.0),
        })
    }

    /// Largest entrywise difference between the numerical and closed-form
    /// matrices after scaling both to unit Frobenius norm.
    pub fn closed_form_discrepancy(&self) -> f64 {
        let num = &self.matrix;
        let closed = self.closed_form_matrix();
        let (nn, nc) = (num.frobenius_norm(), closed.frobenius_norm());
        if nn == 0.0 || nc == 0.0 {
            return f64::INFINITY;
        }
        num.scale_real(1.0 / nn)
            .max_abs_diff(&closed.scale_real(1.0 / nc))
    }

    /// `|det|` of the row-normalized reduced matrix; at most 1 by Hadamard.
    pub fn det_row_normalized(&self) -> f64 {
        determinant(&row_normalized(&self.matrix))
            .expect("square")
            .norm()
    }
}

/// `Σ_{i,j} φ_j·conj(φ_i)·W[(i,k),(j,l)]`, i.e. `Tr_1(W · |φ⟩⟨φ| ⊗ I)`.
pub(crate) fn contract_first(w: &ComplexMatrix, d: usize, phi: &[Complex64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |k, l| {
        let mut acc = c64(0.0, 0.0);
        for i in 0..d {
            let ci = phi[i].conj();
            for j in 0..d {
                acc += ci * phi[j] * w[(i * d + k, j * d + l)];
            }
        }
        acc
    })
}

/// `Σ_{k,l} conj(y_k)·y_l·W[(i,k),(j,l)]`, i.e. `Tr_2(W · I ⊗ |y⟩⟨y|)`.
pub(crate) fn contract_second(w: &ComplexMatrix, d: usize, y: &[Complex64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |i, j| {
        let mut acc = c64(0.0, 0.0);
        for k in 0..d {
            let ck = y[k].conj();
            for l in 0..d {
                acc += ck * y[l] * w[(i * d + k, j * d + l)];
            }
        }
        acc
    })
}

fn reduce_matrix(
    w: &ComplexMatrix,
    d: usize,
    x: &[Complex64],
    slot: FirstSlot,
) -> Result<ReducedWitness> {
    if x.len() != d {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} for d = {d}",
            x.len()
        )));
    }
    if x.iter().all(|v| *v == c64(0.0, 0.0)) {
        return Err(Error::ZeroVector);
    }
    let phi = slot.apply(x);
    let matrix = contract_first(w, d, &phi);
    let (z, u, a) = closed_form_parts(x);
    Ok(ReducedWitness {
        x: x.to_vec(),
        matrix,
        z,
        u,
        a,
    })
}

/// `Tr_1(W · P_x ⊗ I)` with `P_x` projecting onto `x`, or onto `conj(x)`
/// when `conjugate_first_slot` is set.
pub fn reduce_witness(
    w: &Witness,
    x: &[Complex64],
    conjugate_first_slot: bool,
) -> Result<ReducedWitness> {
    let slot = if conjugate_first_slot {
        FirstSlot::Conjugated
    } else {
        FirstSlot::Direct
    };
    reduce_matrix(&w.matrix, w.d, x, slot)
}

pub fn min_eigenvalue(w: &Witness) -> Result<f64> {
    Ok(hermitian_eig(&w.matrix)?.min())
}

/// Best product vector found by [`seesaw_product_min`].
#[derive(Clone, Debug)]
pub struct SeesawOutcome {
    /// Lowest `⟨x⊗y|W|x⊗y⟩` over all restarts, unit `x`, `y`.
    pub value: f64,
    pub x: Vec<Complex64>,
    pub y: Vec<Complex64>,
    /// Every restart produced a nonincreasing objective sequence.
    pub monotone: bool,
    pub restarts: usize,
    pub iterations: usize,
}

pub fn seesaw_product_min(
    w: &Witness,
    restarts: usize,
    max_iters: usize,
    seed: u64,
) -> Result<SeesawOutcome> {
    seesaw_matrix(&w.matrix, w.d, restarts, max_iters, seed)
}

/// Alternating minimization of `⟨x⊗y|M|x⊗y⟩` over unit product vectors
/// for a Hermitian `M` on `C^d ⊗ C^d`. Restart `r` draws its start from
/// partition `r` of `seed`.
pub fn seesaw_matrix(
    m: &ComplexMatrix,
    d: usize,
    restarts: usize,
    max_iters: usize,
    seed: u64,
) -> Result<SeesawOutcome> {
    if restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be ≥ 1".into()));
    }
    if m.rows() != d * d || m.cols() != d * d {
        return Err(Error::DimensionMismatch(format!(
            "{}×{} matrix for d = {d}",
            m.rows(),
            m.cols()
        )));
    }
    let slack = 1e-12 * (1.0 + m.max_abs());
    let mut best: Option<SeesawOutcome> = None;
    let mut monotone = true;
    let mut iterations = 0;

    for r in 0..restarts {
        let mut sampler = GaussianSampler::partition(seed, r as u64);
        let mut x = normalized(&sampler.complex_vector(d))?;
        let eig = hermitian_eig(&contract_first(m, d, &x))?;
        let mut y = eig.bottom_vector();
        let mut value = eig.min();

        for _ in 0..max_iters {
            iterations += 1;
            let ex = hermitian_eig(&contract_second(m, d, &y))?;
            let half = ex.min();
            x = ex.bottom_vector();
            let ey = hermitian_eig(&contract_first(m, d, &x))?;
            y = ey.bottom_vector();
            let next = ey.min();
            if half > value + slack || next > half + slack {
                monotone = false;
            }
            let improvement = value - next;
            value = next.min(value);
            if improvement < 1e-12 {
                break;
            }
        }

        if best.as_ref().is_none_or(|b| value < b.value) {
            best = Some(SeesawOutcome {
                value,
                x: x.clone(),
                y: y.clone(),
                monotone: true,
                restarts,
                iterations: 0,
            });
        }
    }

    let mut out = best.expect("restarts ≥ 1");
    out.monotone = monotone;
    out.iterations = iterations;
    Ok(out)
}

/// `⟨x⊗y|M|x⊗y⟩` for a bipartite `M`.
pub fn product_expectation(m: &ComplexMatrix, x: &[Complex64], y: &[Complex64]) -> Complex64 {
    m.expectation(&kron_vec(x, y))
}

/// Witness-hood of `W_d`: some negative eigenvalue (Λ_d is not completely
/// positive) and a nonnegative see-saw minimum over product vectors.
pub fn check_block_positivity(
    spec: MapSpec,
    restarts: usize,
    max_iters: usize,
    seed: u64,
    tol: f64,
) -> Result<Certificate> {
    let w = build_witness(spec, Normalization::default())?;
    let min_eig = min_eigenvalue(&w)?;
    let seesaw = seesaw_product_min(&w, restarts, max_iters, seed)?;
    Ok(Certificate::judged(
        "block-positivity",
        seesaw.value,
        tol,
        Bound::AtLeastNegTol,
        w.convention(),
    )
    .require(min_eig < -NOT_CP_TOL && seesaw.monotone)
    .with_seed(seed)
    .detail("d", spec.d())
    .detail("seesaw_min", seesaw.value)
    .detail("seesaw_monotone", seesaw.monotone)
    .detail("restarts", restarts)
    .detail("max_iters", max_iters)
    .detail("min_eigenvalue", min_eig)
    .detail("not_completely_positive", min_eig < -NOT_CP_TOL)
    .detail("generator", GENERATOR))
}
