//! Monte Carlo evaluation of the Eisenstein integral for the principal
//! series of `GL_n(R)` at its lowest `K`-type.
//!
//! For `delta` in the Weyl orbit of `delta_r`, real `nu`, and `x` in `G`, the
//! operator-valued matrix coefficient on the lowest `K`-type `alpha` is
//!
//! ```text
//! phi(x) = dim(alpha) * ∫_K nu(H(k^-1 x)) H(k^-1 x)^rho
//!                         pi(k) E_delta pi(kappa(k^-1 x)) dk
//! ```
//!
//! and its trace `psi(x)` has integrand
//! `nu(H(k^-1 x)) H(k^-1 x)^rho * pi(kappa(k^-1 x k))_{S,S}` where `e_S`
//! spans the `delta`-isotypic line. For `x` positive definite that diagonal
//! entry is a principal minor of an element of `kappa(exp p0)` and hence
//! positive, so every sample is positive.
//!
//! Samples are addressed by `(seed, index)` and reduced in fixed chunks in
//! index order, so results do not depend on the rayon thread count.

use rayon::prelude::*;

use crate::decomp::{exp_p0_from, h_and_kappa, rho_power};
use crate::linalg::{
    gram_schmidt_rows_bottom_up, jacobi_sym_eig, require_orthogonal, SquareMatrix, Tolerances,
};
use crate::reps::{
    isotypic_entry, lowest_ktype, normal_form, subsets, weyl_act, ACharacter, KTypeDescriptor,
    MCharacter, WeylElement,
};
use crate::rng::{self, Domain, Gaussian};
use crate::{Error, Result};

const HAAR_RETRIES: u32 = 16;
const CHUNK: u64 = 1024;

/// Haar-distributed element of `O(n)` addressed by `(seed, index)`.
///
/// A Gaussian matrix is split as `g = b k` by bottom-up Gram–Schmidt on its
/// rows; `diag(sign b_ii) k` is Haar because the Gaussian law is invariant
/// under right multiplication by `O(n)`.
pub fn haar_sample(n: usize, seed: u64, index: u64) -> Result<SquareMatrix> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "matrix order must be at least 1".into(),
        ));
    }
    let tol = Tolerances::default();
    let mut gauss = Gaussian::new(rng::stream(Domain::Haar, seed, index));
    let mut data = vec![0.0; n * n];
    for _ in 0..HAAR_RETRIES {
        gauss.fill(&mut data);
        let g = SquareMatrix::new(n, data.clone())?;
        if let Ok((b, k)) = gram_schmidt_rows_bottom_up(&g, &tol) {
            let signs: Vec<f64> = b.diagonal().iter().map(|v| v.signum()).collect();
            return Ok(&SquareMatrix::diag(&signs) * &k);
        }
    }
    Err(Error::SamplerFailure { seed, index })
}

/// Evaluation data for one principal matrix coefficient.
#[derive(Debug, Clone)]
pub struct CoefficientSpec {
    delta: MCharacter,
    nu: ACharacter,
    x: SquareMatrix,
    desc: KTypeDescriptor,
    iso: Vec<usize>,
}

impl CoefficientSpec {
    /// The coefficient for `delta_r` (normal form).
    pub fn new(r: usize, nu: ACharacter, x: SquareMatrix) -> Result<Self> {
        Self::with_character(MCharacter::normal(r, x.n())?, nu, x)
    }

    /// The coefficient for an arbitrary `delta`; the `K`-type is that of the
    /// normal form of `delta`, projected on the `delta`-isotypic line.
    pub fn with_character(delta: MCharacter, nu: ACharacter, x: SquareMatrix) -> Result<Self> {
        let n = x.n();
        for found in [delta.n(), nu.n()] {
            if found != n {
                return Err(Error::DimensionMismatch { expected: n, found });
            }
        }
        crate::linalg::check_invertible(&x, &Tolerances::default())?;
        let desc = lowest_ktype(delta.weight(), n)?;
        let iso = desc.isotypic_subset(&delta)?;
        Ok(Self {
            delta,
            nu,
            x,
            desc,
            iso,
        })
    }

    pub fn n(&self) -> usize {
        self.x.n()
    }

    pub fn r(&self) -> usize {
        self.desc.r
    }

    pub fn delta(&self) -> &MCharacter {
        &self.delta
    }

    pub fn nu(&self) -> &ACharacter {
        &self.nu
    }

    pub fn x(&self) -> &SquareMatrix {
        &self.x
    }

    pub fn ktype(&self) -> &KTypeDescriptor {
        &self.desc
    }

    /// `deg(alpha) / deg(delta)`; characters of `M` have degree one.
    pub fn normalization(&self) -> f64 {
        self.desc.dim as f64
    }
}

/// The pieces of one integrand sample that do not depend on `r`.
struct SampleTerms {
    /// `nu(H(k^-1 x)) H(k^-1 x)^rho`
    weight: f64,
    /// `kappa(k^-1 x k)`
    kappa_conj: SquareMatrix,
}

fn sample_terms(
    x: &SquareMatrix,
    nu: &ACharacter,
    k: &SquareMatrix,
    tol: &Tolerances,
) -> Result<SampleTerms> {
    let kt = k.transpose();
    let y = &kt * x;
    let (h, _) = h_and_kappa(&y, tol)?;
    let weight = nu.eval(&h) * rho_power(&h)?;
    let (_, kappa_conj) = h_and_kappa(&(&y * k), tol)?;
    Ok(SampleTerms { weight, kappa_conj })
}

fn trace_sample(spec: &CoefficientSpec, k: &SquareMatrix, tol: &Tolerances) -> Result<f64> {
    let t = sample_terms(&spec.x, &spec.nu, k, tol)?;
    Ok(t.weight * isotypic_entry(&t.kappa_conj, &spec.desc, &spec.iso))
}

/// One integrand sample of the trace:
/// `nu(H(k^-1 x)) H(k^-1 x)^rho Tr(E_delta pi_alpha(kappa(k^-1 x k)))`.
pub fn integrand_trace(spec: &CoefficientSpec, k: &SquareMatrix, tol: &Tolerances) -> Result<f64> {
    require_orthogonal(k, tol.ortho_tol)?;
    if k.n() != spec.n() {
        return Err(Error::DimensionMismatch {
            expected: spec.n(),
            found: k.n(),
        });
    }
    trace_sample(spec, k, tol)
}

/// Running moments for a vector of observables (Welford, merged with Chan's
/// pairwise update).
#[derive(Debug, Clone)]
struct Moments {
    count: u64,
    mean: Vec<f64>,
    m2: Vec<f64>,
    all_positive: Vec<bool>,
}

impl Moments {
    fn new(width: usize) -> Self {
        Self {
            count: 0,
            mean: vec![0.0; width],
            m2: vec![0.0; width],
            all_positive: vec![true; width],
        }
    }

    fn push(&mut self, values: &[f64]) {
        self.count += 1;
        let c = self.count as f64;
        for (i, &v) in values.iter().enumerate() {
            let d = v - self.mean[i];
            self.mean[i] += d / c;
            self.m2[i] += d * (v - self.mean[i]);
            self.all_positive[i] &= v > 0.0;
        }
    }

    fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = other.clone();
            return;
        }
        let na = self.count as f64;
        let nb = other.count as f64;
        let total = na + nb;
        for i in 0..self.mean.len() {
            let d = other.mean[i] - self.mean[i];
            self.mean[i] += d * nb / total;
            self.m2[i] += other.m2[i] + d * d * na * nb / total;
            self.all_positive[i] &= other.all_positive[i];
        }
        self.count += other.count;
    }

    /// Standard error of the mean for component `i`.
    fn stderr(&self, i: usize) -> f64 {
        let n = self.count as f64;
        (self.m2[i].max(0.0) / (n - 1.0)).sqrt() / n.sqrt()
    }
}

/// Runs `sample(index, out)` for `index in 0..n_samples` in parallel chunks
/// and reduces in index order.
fn collect_moments<F>(n_samples: u64, width: usize, sample: F) -> Result<Moments>
where
    F: Fn(u64, &mut [f64]) -> Result<()> + Sync,
{
    let chunks = n_samples.div_ceil(CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut m = Moments::new(width);
            let mut buf = vec![0.0; width];
            for index in c * CHUNK..((c + 1) * CHUNK).min(n_samples) {
                sample(index, &mut buf)?;
                m.push(&buf);
            }
            Ok(m)
        })
        .collect::<Result<_>>()?;
    let mut total = Moments::new(width);
    for p in &parts {
        total.merge(p);
    }
    Ok(total)
}

fn check_sample_count(n_samples: u64) -> Result<()> {
    if n_samples < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 samples, got {n_samples}"
        )));
    }
    Ok(())
}

/// Monte Carlo estimate of a scalar integral.
#[derive(Debug, Clone, PartialEq)]
pub struct MCEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: u64,
    pub seed: u64,
    /// Every raw integrand sample was strictly positive.
    pub all_samples_positive: bool,
}

impl MCEstimate {
    fn from_moments(m: &Moments, i: usize, scale: f64, seed: u64) -> Self {
        Self {
            mean: scale * m.mean[i],
            stderr: scale * m.stderr(i),
            n_samples: m.count,
            seed,
            all_samples_positive: m.all_positive[i],
        }
    }
}

/// Estimate of the principal matrix coefficient `psi(x) = Tr phi(x)` from
/// Haar samples `0..n_samples` of `seed`.
pub fn psi_estimate(
    spec: &CoefficientSpec,
    n_samples: u64,
    seed: u64,
    tol: &Tolerances,
) -> Result<MCEstimate> {
    check_sample_count(n_samples)?;
    let n = spec.n();
    let m = collect_moments(n_samples, 1, |index, out| {
        let k = haar_sample(n, seed, index)?;
        out[0] = trace_sample(spec, &k, tol)?;
        Ok(())
    })?;
    Ok(MCEstimate::from_moments(&m, 0, spec.normalization(), seed))
}

/// Trace estimates for every `r = 0..=n` at once, sharing the Haar samples
/// and the Iwasawa factorizations. Entry `r` is bit-identical to
/// `psi_estimate` for `delta_r` with the same arguments.
pub fn psi_estimates_all_r(
    x: &SquareMatrix,
    nu: &ACharacter,
    n_samples: u64,
    seed: u64,
    tol: &Tolerances,
) -> Result<Vec<MCEstimate>> {
    check_sample_count(n_samples)?;
    let n = x.n();
    let specs: Vec<CoefficientSpec> = (0..=n)
        .map(|r| CoefficientSpec::new(r, nu.clone(), x.clone()))
        .collect::<Result<_>>()?;
    let m = collect_moments(n_samples, n + 1, |index, out| {
        let k = haar_sample(n, seed, index)?;
        let t = sample_terms(x, nu, &k, tol)?;
        for (slot, spec) in out.iter_mut().zip(&specs) {
            *slot = t.weight * isotypic_entry(&t.kappa_conj, &spec.desc, &spec.iso);
        }
        Ok(())
    })?;
    Ok(specs
        .iter()
        .enumerate()
        .map(|(r, s)| MCEstimate::from_moments(&m, r, s.normalization(), seed))
        .collect())
}

/// Monte Carlo estimate of the operator-valued coefficient `phi(x)`.
#[derive(Debug, Clone)]
pub struct OperatorEstimate {
    pub mean_matrix: SquareMatrix,
    pub stderr_matrix: SquareMatrix,
    pub n_samples: u64,
    pub seed: u64,
}

impl OperatorEstimate {
    pub fn trace(&self) -> f64 {
        self.mean_matrix.trace()
    }

    /// `max |phi - phi^T|`.
    pub fn asymmetry(&self) -> f64 {
        self.mean_matrix.asymmetry()
    }

    pub fn max_stderr(&self) -> f64 {
        self.stderr_matrix.max_abs()
    }

    /// Smallest eigenvalue of the symmetric part of the estimate. Positive
    /// definiteness is not claimed for `GL_n`; this is diagnostic only.
    pub fn min_symmetric_eigenvalue(&self, tol: &Tolerances) -> Result<f64> {
        let sym = (&self.mean_matrix + &self.mean_matrix.transpose()).scale(0.5);
        let eig = jacobi_sym_eig(&sym, tol)?;
        Ok(eig.values.into_iter().fold(f64::INFINITY, f64::min))
    }
}

/// Column `S` of `pi_alpha(k)` over the wedge basis `basis`.
fn wedge_column(
    k: &SquareMatrix,
    desc: &KTypeDescriptor,
    basis: &[Vec<usize>],
    s: &[usize],
) -> Vec<f64> {
    let twist = if desc.twisted { k.det() } else { 1.0 };
    basis.iter().map(|t| twist * k.minor(t, s)).collect()
}

/// Row `S` of `pi_alpha(k)` over the wedge basis `basis`.
fn wedge_row(
    k: &SquareMatrix,
    desc: &KTypeDescriptor,
    basis: &[Vec<usize>],
    s: &[usize],
) -> Vec<f64> {
    let twist = if desc.twisted { k.det() } else { 1.0 };
    basis.iter().map(|t| twist * k.minor(s, t)).collect()
}

/// Estimate of `phi(x)` from the same sample stream as [`psi_estimate`].
pub fn phi_estimate(
    spec: &CoefficientSpec,
    n_samples: u64,
    seed: u64,
    tol: &Tolerances,
) -> Result<OperatorEstimate> {
    check_sample_count(n_samples)?;
    let n = spec.n();
    let dim = spec.desc.dim;
    let basis = subsets(n, spec.desc.wedge_degree);
    let m = collect_moments(n_samples, dim * dim, |index, out| {
        let k = haar_sample(n, seed, index)?;
        let kt = k.transpose();
        let y = &kt * &spec.x;
        let (h, kap) = h_and_kappa(&y, tol)?;
        let weight = spec.nu.eval(&h) * rho_power(&h)?;
        // pi(k) E pi(kappa(k^-1 x)) = (column S of pi(k)) (row S of pi(kappa)).
        let col = wedge_column(&k, &spec.desc, &basis, &spec.iso);
        let row = wedge_row(&kap, &spec.desc, &basis, &spec.iso);
        for i in 0..dim {
            for j in 0..dim {
                out[i * dim + j] = weight * col[i] * row[j];
            }
        }
        Ok(())
    })?;
    let scale = spec.normalization();
    let mean = m.mean.iter().map(|v| scale * v).collect();
    let stderr = (0..dim * dim).map(|i| scale * m.stderr(i)).collect();
    Ok(OperatorEstimate {
        mean_matrix: SquareMatrix::new(dim, mean)?,
        stderr_matrix: SquareMatrix::new(dim, stderr)?,
        n_samples: m.count,
        seed,
    })
}

/// Deterministic quadrature of `psi` on `O(2)`: the composite trapezoid rule
/// with `n_nodes` equally spaced angles on each of the two components
/// `{R_theta}` and `{R_theta diag(1, -1)}`, which carry Haar mass 1/2 each.
pub fn o2_quadrature(spec: &CoefficientSpec, n_nodes: usize, tol: &Tolerances) -> Result<f64> {
    if spec.n() != 2 {
        return Err(Error::InvalidOrder {
            expected: 2,
            found: spec.n(),
        });
    }
    if n_nodes < 8 {
        return Err(Error::InvalidArgument(format!(
            "need at least 8 quadrature nodes, got {n_nodes}"
        )));
    }
    let reflection = SquareMatrix::diag(&[1.0, -1.0]);
    let mut sum = 0.0;
    for j in 0..n_nodes {
        let theta = std::f64::consts::TAU * j as f64 / n_nodes as f64;
        let (s, c) = theta.sin_cos();
        let rot = SquareMatrix::new(2, vec![c, -s, s, c])?;
        sum += trace_sample(spec, &rot, tol)?;
        sum += trace_sample(spec, &(&rot * &reflection), tol)?;
    }
    Ok(spec.normalization() * sum / (2 * n_nodes) as f64)
}

/// One `(sigma . delta, sigma . nu)` estimate in a Weyl invariance check.
#[derive(Debug, Clone)]
pub struct WeylEntry {
    pub sigma: WeylElement,
    pub delta: MCharacter,
    pub nu: ACharacter,
    pub estimate: MCEstimate,
}

#[derive(Debug, Clone)]
pub struct WeylReport {
    /// `(delta, nu)` moved to normal form `(delta_r, tau^-1 . nu)`.
    pub base: WeylEntry,
    pub entries: Vec<WeylEntry>,
    /// Largest pairwise `|psi_i - psi_j|` over base and entries.
    pub max_difference: f64,
    /// Largest `|psi_i - psi_j| / (3 sqrt(se_i^2 + se_j^2))`.
    pub worst_ratio: f64,
    pub passed: bool,
}

const WEYL_SAMPLED_ELEMENTS: usize = 24;

fn sampled_weyl_elements(n: usize, seed: u64) -> Vec<WeylElement> {
    if n <= 4 {
        return WeylElement::all(n);
    }
    (0..WEYL_SAMPLED_ELEMENTS as u64)
        .map(|j| {
            let mut g = Gaussian::new(rng::stream(Domain::Weyl, seed, j));
            let mut perm: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                let pick = ((g.uniform(0.0, 1.0) * (i + 1) as f64) as usize).min(i);
                perm.swap(i, pick);
            }
            WeylElement::new(perm).expect("shuffle yields a permutation")
        })
        .collect()
}

/// Checks `psi_{delta, nu}(x) = psi_{sigma.delta, sigma.nu}(x)` across the
/// Weyl group (all of `S_n` for `n <= 4`, otherwise a seeded sample).
///
/// All estimates share one Haar stream; each pair must agree within three
/// combined standard errors.
pub fn weyl_invariance_check(
    delta: &MCharacter,
    nu: &ACharacter,
    x: &SquareMatrix,
    n_samples: u64,
    seed: u64,
    tol: &Tolerances,
) -> Result<WeylReport> {
    let (r, tau) = normal_form(delta);
    let (base_delta, base_nu) = weyl_act(&tau.inverse(), delta, nu)?;
    debug_assert_eq!(base_delta, MCharacter::normal(r, delta.n())?);
    let entry = |sigma: WeylElement, d: MCharacter, v: ACharacter| -> Result<WeylEntry> {
        let spec = CoefficientSpec::with_character(d.clone(), v.clone(), x.clone())?;
        Ok(WeylEntry {
            estimate: psi_estimate(&spec, n_samples, seed, tol)?,
            sigma,
            delta: d,
            nu: v,
        })
    };
    let base = entry(tau.inverse(), base_delta, base_nu)?;
    let entries = sampled_weyl_elements(delta.n(), seed)
        .into_iter()
        .map(|sigma| {
            let (d, v) = weyl_act(&sigma, delta, nu)?;
            entry(sigma, d, v)
        })
        .collect::<Result<Vec<_>>>()?;

    let all: Vec<&MCEstimate> = std::iter::once(&base.estimate)
        .chain(entries.iter().map(|e| &e.estimate))
        .collect();
    let mut max_difference = 0.0_f64;
    let mut worst_ratio = 0.0_f64;
    let mut passed = true;
    for (i, a) in all.iter().enumerate() {
        for b in &all[i + 1..] {
            let diff = (a.mean - b.mean).abs();
            let bound = 3.0 * (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
            max_difference = max_difference.max(diff);
            if diff > bound {
                passed = false;
            }
            if diff > 0.0 {
                worst_ratio = worst_ratio.max(if bound > 0.0 {
                    diff / bound
                } else {
                    f64::INFINITY
                });
            }
        }
    }
    Ok(WeylReport {
        base,
        entries,
        max_difference,
        worst_ratio,
        passed,
    })
}

/// One `(trial, r)` row of a positivity scan.
#[derive(Debug, Clone)]
pub struct ScanRow {
    pub trial: usize,
    pub r: usize,
    pub nu: ACharacter,
    pub estimate: MCEstimate,
}

impl ScanRow {
    pub fn passed(&self) -> bool {
        self.estimate.all_samples_positive && self.estimate.mean > 0.0
    }
}

#[derive(Debug, Clone)]
pub struct ScanReport {
    pub rows: Vec<ScanRow>,
    pub all_pass: bool,
}

/// Positivity scan over random points of `exp(p0)` and random real `nu`.
///
/// Each trial draws `x` (Gaussian Gram matrix) and `nu` (exponents uniform
/// in `[-1, 1]`) from the scan stream of `(seed, trial)`, then estimates
/// `psi` for every `r = 0..=n`.
pub fn positivity_scan(
    n: usize,
    trials: usize,
    n_samples: u64,
    seed: u64,
    tol: &Tolerances,
) -> Result<ScanReport> {
    if n == 0 || trials == 0 {
        return Err(Error::InvalidArgument(
            "positivity scan needs n >= 1 and trials >= 1".into(),
        ));
    }
    let mut rows = Vec::with_capacity(trials * (n + 1));
    for trial in 0..trials {
        let (x, nu, mc_seed) = scan_trial_inputs(n, seed, trial);
        let estimates = psi_estimates_all_r(&x, &nu, n_samples, mc_seed, tol)?;
        rows.extend(
            estimates
                .into_iter()
                .enumerate()
                .map(|(r, estimate)| ScanRow {
                    trial,
                    r,
                    nu: nu.clone(),
                    estimate,
                }),
        );
    }
    let all_pass = rows.iter().all(ScanRow::passed);
    Ok(ScanReport { rows, all_pass })
}

/// `(x, nu, Monte Carlo seed)` for one scan trial.
pub fn scan_trial_inputs(n: usize, seed: u64, trial: usize) -> (SquareMatrix, ACharacter, u64) {
    let mut g = Gaussian::new(rng::stream(Domain::Scan, seed, trial as u64));
    let exponents: Vec<f64> = (0..n).map(|_| g.uniform(-1.0, 1.0)).collect();
    let x = exp_p0_from(n, &mut g);
    let mc_seed = g.next_u64();
    (
        x,
        ACharacter::new(exponents).expect("finite exponents"),
        mc_seed,
    )
}
