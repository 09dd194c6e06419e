//! Acceptance criteria. Each test prints one `[PASS]`/`[FAIL]` line and then
//! asserts it. Run with `cargo test -p glpos-core --test acceptance -- --nocapture`
//! to see the lines.

use std::io::Write;
use std::time::{Duration, Instant};

use glpos::decomp::{cartan, exp_p0_sample, iwasawa, kappa};
use glpos::eisenstein::{
    haar_sample, o2_quadrature, phi_estimate, positivity_scan, psi_estimate, weyl_invariance_check,
    CoefficientSpec,
};
use glpos::kappa_image::{membership, preimage_in_p0, symmetrize_right};
use glpos::linalg::{minor_sequence, MinorDirection};
use glpos::reps::{
    ktype_norm, lowest_ktype, m_restriction, weyl_act, ACharacter, HighestWeight, MCharacter,
    WeylElement,
};
use glpos::rng::{self, Domain, Gaussian};
use glpos::{SquareMatrix, Tolerances};

/// Writes to the raw stderr handle so the verdict shows without `--nocapture`.
fn verdict(id: u32, name: &str, pass: bool, detail: String) {
    let line = format!(
        "[{}] criterion {id:>2}: {name} -- {detail}\n",
        if pass { "PASS" } else { "FAIL" }
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

fn tol() -> Tolerances {
    Tolerances::default()
}

/// Uniform [-1, 1] entries, redrawn until |det| > 1e-6.
fn random_invertible(n: usize, seed: u64, index: u64) -> SquareMatrix {
    let mut g = Gaussian::new(rng::stream(Domain::Test, seed, index));
    loop {
        let data: Vec<f64> = (0..n * n).map(|_| g.uniform(-1.0, 1.0)).collect();
        let m = SquareMatrix::new(n, data).unwrap();
        if m.det().abs() > 1e-6 {
            return m;
        }
    }
}

/// Haar samples (in index order) whose leading minors all exceed 1e-6.
fn haar_in_image(n: usize, seed: u64, count: usize) -> Vec<SquareMatrix> {
    (0u64..)
        .map(|i| haar_sample(n, seed, i).unwrap())
        .filter(|b| {
            minor_sequence(b, MinorDirection::Leading)
                .iter()
                .all(|&v| v > 1e-6)
        })
        .take(count)
        .collect()
}

#[test]
fn c01_decomposition_roundtrips() {
    let start = Instant::now();
    let mut worst_nak = 0.0_f64;
    let mut worst_kp = 0.0_f64;
    let mut failures = 0;
    for n in 1..=8 {
        for i in 0..1000 {
            let g = random_invertible(n, n as u64, i);
            let scale = g.max_abs().max(1.0);
            let f = iwasawa(&g, &tol()).unwrap();
            let c = cartan(&g, &tol()).unwrap();
            let e1 = f.reconstruct().max_abs_diff(&g) / scale;
            let e2 = c.reconstruct().max_abs_diff(&g) / scale;
            worst_nak = worst_nak.max(e1);
            worst_kp = worst_kp.max(e2);
            if e1 > 1e-10 || e2 > 1e-8 {
                failures += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        1,
        "Iwasawa/Cartan roundtrips, n = 1..8",
        failures == 0 && elapsed < Duration::from_secs(10),
        format!(
            "worst |g-nak|/s = {worst_nak:.2e}, worst |g-kp|/s = {worst_kp:.2e}, failures {failures}, {elapsed:.2?}"
        ),
    );
}

#[test]
fn c02_kappa_image_equivalence() {
    let mut forward_fail = 0;
    let mut reverse_fail = 0;
    let mut worst_roundtrip = 0.0_f64;
    for n in 2..=6 {
        for seed in 0..1000 {
            let p = exp_p0_sample(n, seed);
            let k = kappa(&p, &tol()).unwrap();
            let rep = membership(&k, &tol()).unwrap();
            if !(rep.in_image && rep.trailing_minors.iter().all(|&v| v > 0.0)) {
                forward_fail += 1;
            }
        }
        for b in haar_in_image(n, 100 + n as u64, 1000) {
            let trailing_ok = minor_sequence(&b, MinorDirection::Trailing)
                .iter()
                .all(|&v| v > 0.0);
            match preimage_in_p0(&b, &tol()) {
                Ok(p) => {
                    // det p = 1; skip the relative singularity cutoff.
                    let relaxed = Tolerances {
                        minor_tol: f64::MIN_POSITIVE,
                        ..tol()
                    };
                    let err = kappa(&p, &relaxed).unwrap().max_abs_diff(&b);
                    worst_roundtrip = worst_roundtrip.max(err);
                    if err > 1e-8 || !trailing_ok {
                        reverse_fail += 1;
                    }
                }
                Err(_) => reverse_fail += 1,
            }
        }
    }
    verdict(
        2,
        "kappa(exp p0) = leading-minor set = trailing-minor set",
        forward_fail == 0 && reverse_fail == 0,
        format!(
            "forward failures {forward_fail}, reverse failures {reverse_fail}, worst kappa roundtrip {worst_roundtrip:.2e}"
        ),
    );
}

#[test]
fn c03_right_symmetrizer() {
    let mut failures = 0;
    let mut worst = 0.0_f64;
    for n in 2..=6 {
        for b in haar_in_image(n, 100 + n as u64, 1000) {
            let c = symmetrize_right(&b, &tol()).unwrap();
            let exact_shape = c.is_upper_triangular() && (0..n).all(|i| c.get(i, i) == 1.0);
            let bc = &b * &c;
            let asym = (&bc - &bc.transpose()).max_abs() / b.max_abs();
            worst = worst.max(asym);
            if !exact_shape || asym > 1e-9 {
                failures += 1;
            }
        }
    }
    verdict(
        3,
        "symmetrize_right: exact unit upper triangular, BC symmetric",
        failures == 0,
        format!("failures {failures}, worst |BC-(BC)^T|/|B| = {worst:.2e}"),
    );
}

#[test]
fn c04_schur_normalization() {
    let start = Instant::now();
    let spec = CoefficientSpec::new(1, ACharacter::trivial(3), SquareMatrix::identity(3)).unwrap();
    let psi = psi_estimate(&spec, 100_000, 2024, &tol()).unwrap();
    let psi_ok = (psi.mean - 3.0).abs() <= 4.0 * psi.stderr && psi.stderr < 0.03;
    let phi = phi_estimate(&spec, 100_000, 2024, &tol()).unwrap();
    let id = SquareMatrix::identity(3);
    let dev = phi.mean_matrix.max_abs_diff(&id);
    let within_stderr = (0..3).all(|i| {
        (0..3).all(|j| {
            (phi.mean_matrix.get(i, j) - id.get(i, j)).abs() <= 4.0 * phi.stderr_matrix.get(i, j)
        })
    });
    let elapsed = start.elapsed();
    verdict(
        4,
        "Schur normalization at x = I (n = 3, r = 1)",
        psi_ok && dev <= 0.05 && within_stderr && elapsed < Duration::from_secs(30),
        format!(
            "psi = {:.6} +- {:.2e}, |phi - I| = {dev:.4}, entrywise 4-sigma {within_stderr}, {elapsed:.2?}",
            psi.mean, psi.stderr
        ),
    );
}

#[test]
fn c05_positivity_theorem() {
    let start = Instant::now();
    let mut rows = 0;
    let mut failing = 0;
    let mut min_mean = f64::INFINITY;
    for n in 2..=4 {
        let rep = positivity_scan(n, 50, 20_000, 1000 + n as u64, &tol()).unwrap();
        rows += rep.rows.len();
        failing += rep.rows.iter().filter(|r| !r.passed()).count();
        for r in &rep.rows {
            min_mean = min_mean.min(r.estimate.mean);
        }
    }
    let elapsed = start.elapsed();
    verdict(
        5,
        "psi > 0 on exp(p0): every raw sample positive, n = 2..4",
        failing == 0 && elapsed < Duration::from_secs(300),
        format!("{rows} rows, {failing} failing, smallest mean {min_mean:.3e}, {elapsed:.2?}"),
    );
}

#[test]
fn c06_negative_control() {
    let x = WeylElement::transposition(2, 0, 1).matrix();
    let spec = CoefficientSpec::new(1, ACharacter::trivial(2), x).unwrap();
    let est = psi_estimate(&spec, 10_000, 6, &tol()).unwrap();
    verdict(
        6,
        "transposition (outside exp p0) yields non-positive samples",
        !est.all_samples_positive,
        format!(
            "all_samples_positive = {}, mean {:.4}",
            est.all_samples_positive, est.mean
        ),
    );
}

#[test]
fn c07_weyl_invariance() {
    let delta = MCharacter::normal(1, 3).unwrap();
    let nu = ACharacter::new(vec![0.4, 0.0, -0.4]).unwrap();
    let x = exp_p0_sample(3, 7);
    let rep = weyl_invariance_check(&delta, &nu, &x, 100_000, 77, &tol()).unwrap();
    let values: Vec<String> = rep
        .entries
        .iter()
        .map(|e| format!("{:.4}", e.estimate.mean))
        .collect();
    verdict(
        7,
        "Weyl invariance of psi over S_3",
        rep.passed && rep.entries.len() == 6,
        format!(
            "psi = [{}], max diff {:.2e}, worst diff/(3 sigma) {:.3}",
            values.join(", "),
            rep.max_difference,
            rep.worst_ratio
        ),
    );
}

#[test]
fn c08_o2_oracle() {
    let spd = SquareMatrix::from_rows(&[[2.0, 0.5], [0.5, 1.0]]).unwrap();
    let cases: Vec<(SquareMatrix, Vec<f64>, usize)> = vec![
        (SquareMatrix::identity(2), vec![0.3, -0.3], 1),
        (SquareMatrix::diag(&[2.0, 0.5]), vec![0.0, 0.0], 0),
        (spd.clone(), vec![0.3, -0.3], 1),
        (exp_p0_sample(2, 5), vec![-0.7, 0.4], 2),
        (spd, vec![1.0, 0.0], 0),
    ];
    let mut lines = Vec::new();
    let mut ok = true;
    for (i, (x, nu, r)) in cases.into_iter().enumerate() {
        let spec = CoefficientSpec::new(r, ACharacter::new(nu).unwrap(), x).unwrap();
        let quad = o2_quadrature(&spec, 512, &tol()).unwrap();
        let mc = psi_estimate(&spec, 100_000, 800 + i as u64, &tol()).unwrap();
        let bound = (0.01 * quad.abs()).max(3.0 * mc.stderr);
        let diff = (quad - mc.mean).abs();
        ok &= diff <= bound;
        lines.push(format!(
            "#{i}: quad {quad:.5} mc {:.5} diff {diff:.1e}/{bound:.1e}",
            mc.mean
        ));
    }
    verdict(8, "O(2) quadrature vs Monte Carlo", ok, lines.join("; "));
}

#[test]
fn c09_symmetric_on_exp_p0() {
    let mut worst_ratio = 0.0_f64;
    let mut ok = true;
    for s in 0..10 {
        let x = exp_p0_sample(3, 900 + s);
        let nu = ACharacter::new(vec![0.25, -0.1, 0.5]).unwrap();
        let spec = CoefficientSpec::new(1, nu, x).unwrap();
        let phi = phi_estimate(&spec, 100_000, 90 + s, &tol()).unwrap();
        let asym = phi.asymmetry();
        let bound = 4.0 * phi.max_stderr();
        ok &= asym <= bound;
        worst_ratio = worst_ratio.max(asym / bound);
    }
    verdict(
        9,
        "phi(x) symmetric on exp(p0), n = 3, r = 1",
        ok,
        format!("worst |phi - phi^T| / (4 max stderr) = {worst_ratio:.3}"),
    );
}

fn weyl_orbit(delta: &MCharacter) -> Vec<MCharacter> {
    let nu = ACharacter::trivial(delta.n());
    let mut orbit: Vec<MCharacter> = WeylElement::all(delta.n())
        .iter()
        .map(|s| weyl_act(s, delta, &nu).unwrap().0)
        .collect();
    orbit.sort();
    orbit.dedup();
    orbit
}

#[test]
fn c10_ktype_norms_and_table() {
    let hw = |n, b: Vec<i64>| HighestWeight::new(n, b).unwrap();
    let norms_ok = ktype_norm(&hw(3, vec![0])) == 1.0
        && ktype_norm(&hw(3, vec![1])) == 2.0
        && ktype_norm(&hw(4, vec![1, 1])) == 10f64.sqrt();

    let mut table_ok = true;
    for n in 1..=8 {
        for r in 0..=n {
            let d = lowest_ktype(r, n).unwrap();
            let (twisted, degree) = if r <= n / 2 {
                (false, r)
            } else {
                (true, n - r)
            };
            let iso: Vec<usize> = if twisted {
                (r..n).collect()
            } else {
                (0..r).collect()
            };
            let dim = glpos::reps::binomial(n, degree);
            table_ok &= d.twisted == twisted
                && d.wedge_degree == degree
                && d.dim == dim
                && d.iso_subset == iso;
        }
    }

    let mut orbit_ok = true;
    for n in 1..=6 {
        for r in 0..=n {
            let mut got = m_restriction(&lowest_ktype(r, n).unwrap());
            got.sort();
            orbit_ok &= got == weyl_orbit(&MCharacter::normal(r, n).unwrap());
        }
    }
    verdict(
        10,
        "K-type norms, lowest K-type table, M-restriction = Weyl orbit",
        norms_ok && table_ok && orbit_ok,
        format!("norms {norms_ok}, table (n <= 8) {table_ok}, orbits (n <= 6) {orbit_ok}"),
    );
}
