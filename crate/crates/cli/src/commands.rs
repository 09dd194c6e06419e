use std::io::Write;
use std::path::Path;

use glpos::decomp::{cartan, iwasawa, kappa};
use glpos::eisenstein::{
    haar_sample, o2_quadrature, phi_estimate, positivity_scan, psi_estimate, CoefficientSpec,
};
use glpos::kappa_image::{membership, preimage_in_p0};
use glpos::reps::ACharacter;
use glpos::Tolerances;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::io::{csv_writer, fmt_float, parse_nu, read_matrix, MatrixFile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Iwasawa,
    Cartan,
}

fn tolerances_json(tol: &Tolerances) -> Value {
    json!({
        "ortho_tol": tol.ortho_tol,
        "minor_tol": tol.minor_tol,
        "eig_tol": tol.eig_tol,
        "max_sweeps": tol.max_sweeps,
    })
}

fn emit(out: &mut dyn Write, report: &Value) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, report)?;
    writeln!(out)?;
    Ok(())
}

pub fn decompose(
    out: &mut dyn Write,
    mode: Mode,
    matrix: &Path,
    tol: &Tolerances,
) -> Result<(), CliError> {
    tol.validate().map_err(CliError::from_input)?;
    let g = read_matrix(matrix)?;
    let scale = g.max_abs().max(1.0);
    let (mode_name, factors, error) = match mode {
        Mode::Iwasawa => {
            let f = iwasawa(&g, tol).map_err(CliError::from_input)?;
            let err = f.reconstruct().max_abs_diff(&g);
            let factors = json!({
                "n": MatrixFile::from_matrix(&f.n_part),
                "a": f.a_part,
                "k": MatrixFile::from_matrix(&f.k_part),
            });
            ("iwasawa", factors, err)
        }
        Mode::Cartan => {
            let f = cartan(&g, tol).map_err(CliError::from_input)?;
            let err = f.reconstruct().max_abs_diff(&g);
            let factors = json!({
                "k": MatrixFile::from_matrix(&f.k_part),
                "p": MatrixFile::from_matrix(&f.p_part),
            });
            ("cartan", factors, err)
        }
    };
    emit(
        out,
        &json!({
            "command": "decompose",
            "mode": mode_name,
            "input": MatrixFile::from_matrix(&g),
            "tolerances": tolerances_json(tol),
            "factors": factors,
            "reconstruction_error": error,
            "relative_reconstruction_error": error / scale,
        }),
    )
}

fn check_positive(name: &str, v: u64) -> Result<(), CliError> {
    if v == 0 {
        return Err(CliError::Parse(format!("--{name} must be at least 1")));
    }
    Ok(())
}

pub fn kappa_image(
    summary_out: &mut dyn Write,
    n: usize,
    samples: u64,
    seed: u64,
    csv_out: Option<&Path>,
) -> Result<(), CliError> {
    check_positive("n", n as u64)?;
    check_positive("samples", samples)?;
    let tol = Tolerances::default();
    // Preimages have det 1 but can have large entries; only exact breakdown
    // should stop the round-trip measurement.
    let roundtrip_tol = Tolerances {
        minor_tol: f64::MIN_POSITIVE,
        ..tol
    };
    let mut writer = csv_writer(csv_out)?;
    writer.write_record([
        "sample_id",
        "leading_min",
        "trailing_min",
        "in_image",
        "preimage_err",
    ])?;
    let mut in_image = 0u64;
    let mut preimage_ok = 0u64;
    let mut failures = Vec::new();
    let mut max_err = 0.0_f64;
    for i in 0..samples {
        let b = haar_sample(n, seed, i).map_err(CliError::from_estimation)?;
        let rep = membership(&b, &tol).map_err(CliError::from_estimation)?;
        let mut err_field = String::new();
        if rep.in_image {
            in_image += 1;
            match preimage_in_p0(&b, &tol) {
                Ok(p) => {
                    let err = kappa(&p, &roundtrip_tol)
                        .map_err(|e| CliError::Verification(e.to_string()))?
                        .max_abs_diff(&b);
                    max_err = max_err.max(err);
                    preimage_ok += 1;
                    err_field = fmt_float(err);
                }
                Err(e) => failures.push(format!("sample {i}: {e}")),
            }
        }
        writer.write_record([
            i.to_string(),
            fmt_float(rep.min_leading()),
            fmt_float(rep.min_trailing()),
            rep.in_image.to_string(),
            err_field,
        ])?;
    }
    writer.flush()?;
    drop(writer);
    let summary = json!({
        "command": "kappa-image",
        "n": n,
        "samples": samples,
        "seed": seed,
        "in_image": in_image,
        "preimage_ok": preimage_ok,
        "verification_failures": failures.len(),
        "max_preimage_err": max_err,
    });
    emit(summary_out, &summary)?;
    if !failures.is_empty() {
        return Err(CliError::Verification(failures.join("; ")));
    }
    Ok(())
}

pub struct CoefficientArgs<'a> {
    pub n: usize,
    pub r: usize,
    pub nu: &'a str,
    pub matrix: &'a Path,
    pub samples: u64,
    pub seed: u64,
    pub operator: bool,
    pub oracle: bool,
    pub nodes: usize,
}

fn estimate_json(mean: f64, stderr: f64, n_samples: u64) -> Value {
    json!({ "mean": mean, "stderr": stderr, "n_samples": n_samples })
}

pub fn coefficient(out: &mut dyn Write, args: &CoefficientArgs<'_>) -> Result<(), CliError> {
    check_positive("samples", args.samples)?;
    let x = read_matrix(args.matrix)?;
    if x.n() != args.n {
        return Err(CliError::Parse(format!(
            "--n {} does not match the {}x{} matrix",
            args.n,
            x.n(),
            x.n()
        )));
    }
    let exponents = parse_nu(args.nu)?;
    if exponents.len() != args.n {
        return Err(CliError::Parse(format!(
            "--nu has {} exponents, expected {}",
            exponents.len(),
            args.n
        )));
    }
    if args.oracle && args.n != 2 {
        return Err(CliError::Parse(
            "--oracle is only available for n = 2".into(),
        ));
    }
    let nu = ACharacter::new(exponents.clone()).map_err(CliError::from_input)?;
    let tol = Tolerances::default();
    let spec = CoefficientSpec::new(args.r, nu, x.clone()).map_err(CliError::from_input)?;

    let psi =
        psi_estimate(&spec, args.samples, args.seed, &tol).map_err(CliError::from_estimation)?;
    let mut report = json!({
        "command": "coefficient",
        "inputs": {
            "n": args.n,
            "r": args.r,
            "nu": exponents,
            "matrix": MatrixFile::from_matrix(&x),
            "samples": args.samples,
            "seed": args.seed,
        },
        "ktype": {
            "wedge_degree": spec.ktype().wedge_degree,
            "twisted": spec.ktype().twisted,
            "dim": spec.ktype().dim,
        },
        "trace": estimate_json(psi.mean, psi.stderr, psi.n_samples),
        "all_samples_positive": psi.all_samples_positive,
    });
    if args.operator {
        let phi = phi_estimate(&spec, args.samples, args.seed, &tol)
            .map_err(CliError::from_estimation)?;
        let min_eig = phi
            .min_symmetric_eigenvalue(&tol)
            .map_err(CliError::from_estimation)?;
        report["operator"] = json!({
            "mean": MatrixFile::from_matrix(&phi.mean_matrix),
            "stderr": MatrixFile::from_matrix(&phi.stderr_matrix),
            "n_samples": phi.n_samples,
            "asymmetry": phi.asymmetry(),
            "min_symmetric_eigenvalue": min_eig,
        });
    }
    if args.oracle {
        let value = o2_quadrature(&spec, args.nodes, &tol).map_err(CliError::from_estimation)?;
        let deviation = (psi.mean - value).abs();
        let bound = (0.01 * value.abs()).max(3.0 * psi.stderr);
        report["oracle"] = json!({
            "nodes": args.nodes,
            "value": value,
            "deviation": deviation,
            "bound": bound,
            "agrees": deviation <= bound,
        });
    }
    emit(out, &report)
}

pub fn scan(
    summary_out: &mut dyn Write,
    n: usize,
    trials: usize,
    samples: u64,
    seed: u64,
    csv_out: Option<&Path>,
) -> Result<(), CliError> {
    check_positive("n", n as u64)?;
    check_positive("trials", trials as u64)?;
    check_positive("samples", samples)?;
    let report = positivity_scan(n, trials, samples, seed, &Tolerances::default())
        .map_err(CliError::from_estimation)?;
    let mut writer = csv_writer(csv_out)?;
    writer.write_record([
        "trial",
        "r",
        "nu_exponents",
        "trace_mean",
        "trace_stderr",
        "all_samples_positive",
    ])?;
    for row in &report.rows {
        let nu: Vec<String> = row.nu.exponents().iter().map(|&v| fmt_float(v)).collect();
        writer.write_record([
            row.trial.to_string(),
            row.r.to_string(),
            nu.join(";"),
            fmt_float(row.estimate.mean),
            fmt_float(row.estimate.stderr),
            row.estimate.all_samples_positive.to_string(),
        ])?;
    }
    writer.flush()?;
    drop(writer);
    let failing: Vec<Value> = report
        .rows
        .iter()
        .filter(|r| !r.passed())
        .map(|r| json!({ "trial": r.trial, "r": r.r, "mean": r.estimate.mean }))
        .collect();
    let smallest = report
        .rows
        .iter()
        .map(|r| r.estimate.mean)
        .fold(f64::INFINITY, f64::min);
    emit(
        summary_out,
        &json!({
            "command": "positivity-scan",
            "n": n,
            "trials": trials,
            "samples": samples,
            "seed": seed,
            "rows": report.rows.len(),
            "smallest_trace_mean": smallest,
            "failing_rows": failing,
            "verdict": if report.all_pass { "pass" } else { "fail" },
        }),
    )?;
    if !report.all_pass {
        return Err(CliError::Positivity(format!(
            "{} of {} rows had a non-positive sample or mean",
            failing.len(),
            report.rows.len()
        )));
    }
    Ok(())
}
