//! Subcommand pipelines. Every command computes everything before writing any file.

use std::collections::BTreeMap;
use std::path::Path;

use dirac_spectra::basis::{boundary_residual, equation_residual, grid_weights, gram_diagnostics, root_system};
use dirac_spectra::determinant::{Characteristic, DeterminantHandle};
use dirac_spectra::kernels::{edge_residual, goursat_residual, jump_residual, kernel_norms, phi_via_kernels, Kernels};
use dirac_spectra::problem::{check_regularity, gauge_reduce, reduce_bc, DiracProblem, PotentialGrid, Strip};
use dirac_spectra::propagator::propagate_to_end;
use dirac_spectra::regularity::{classify_strict, Branch, RegularityVerdict, Strictness};
use dirac_spectra::spectra::{
    find_zeros_strip, near_strip_edge, pair_with_unperturbed, total_multiplicity, EigenvalueRecord,
};
use dirac_spectra::timoshenko::{beam_spectrum, build_reduction, decouple, spectral_drift, BeamReduction};
use dirac_spectra::{Error, C64};
use serde_json::{json, Map, Value};

use crate::config::{ModeSpec, RunConfig};
use crate::output::{complex, fmt_e, json as to_json, num, spectrum_csv, spectrum_row, SPECTRUM_HEADER};
use crate::CliError;

fn write(dir: &Path, name: &str, text: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn require_regular(problem: &DiracProblem) -> Result<(), CliError> {
    let m = check_regularity(&problem.bc);
    if m.regular {
        Ok(())
    } else {
        Err(CliError::NonRegular(format!("J14 = {}, J32 = {}", m.j14, m.j32)))
    }
}

fn handle(cfg: &RunConfig, problem: &DiracProblem) -> Result<DeterminantHandle, CliError> {
    Ok(match cfg.mode {
        ModeSpec::Auto if problem.potential.is_zero() => DeterminantHandle::closed_form(problem),
        ModeSpec::Auto | ModeSpec::Propagator => DeterminantHandle::propagator(problem),
        ModeSpec::ClosedForm => DeterminantHandle::closed_form(problem),
        ModeSpec::KernelTrace => DeterminantHandle::kernel_trace(problem, cfg.n())?,
    })
}

/// Zeros of the unperturbed determinant on a window padded by one unit.
fn unperturbed(problem: &DiracProblem, lo: f64, hi: f64) -> Result<Vec<EigenvalueRecord>, CliError> {
    let zero = problem.with_potential(PotentialGrid::zero(problem.potential.m())?);
    let f = DeterminantHandle::closed_form(&zero);
    Ok(find_zeros_strip(&f, &Strip::new(f.default_strip_height(), lo - 1.0, hi + 1.0)?)?)
}

/// Attaches unperturbed partners; a failed pairing leaves the records unpaired and is reported.
fn paired(records: Vec<EigenvalueRecord>, base: &[EigenvalueRecord], window: (f64, f64)) -> (Vec<EigenvalueRecord>, Value) {
    match pair_with_unperturbed(&records, base, window) {
        Ok(rep) => {
            let summary = json!({"outer_max_gap": num(rep.outer_max_gap), "inner_max_gap": num(rep.inner_max_gap)});
            (rep.records, summary)
        }
        Err(e) => (records, json!({"error": e.to_string()})),
    }
}

pub fn spectrum(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let problem = cfg.problem()?;
    require_regular(&problem)?;
    let (lo, hi) = cfg.window()?;
    let f = handle(cfg, &problem)?;
    let h = cfg.strip.unwrap_or_else(|| f.default_strip_height());
    let records = find_zeros_strip(&f, &Strip::new(h, lo, hi)?)?;
    let base = unperturbed(&problem, lo, hi)?;
    let (records, pairing) = paired(records, &base, (lo, hi));
    let expected = (hi - lo) * f.span() / (2.0 * std::f64::consts::PI);
    let observed = total_multiplicity(&records);
    let summary = json!({
        "count": records.len(),
        "total_multiplicity": observed,
        "strip_h": num(h),
        "window": [num(lo), num(hi)],
        "mode": format!("{:?}", f.mode()),
        "density": {
            "expected": num(expected),
            "observed": observed,
            "within_3": (observed as f64 - expected).abs() <= 3.0,
        },
        "near_strip_edge": near_strip_edge(&records, h),
        "pairing": pairing,
    });
    let csv = spectrum_csv(&records);
    write(out, "eigenvalues.csv", &csv)?;
    write(out, "summary.json", &to_json(&summary))
}

fn verdict_json(v: &RegularityVerdict) -> Value {
    let witnesses: Map<String, Value> = v.witnesses.iter().map(|(k, x)| (k.clone(), num(*x))).collect();
    json!({
        "regular": v.regular,
        "strict": v.strict,
        "branch": v.branch,
        "witnesses": witnesses,
        "numerical_hint": v.hint,
    })
}

pub fn classify(cfg: &RunConfig, out: &Path) -> Result<String, CliError> {
    let w = cfg.weights()?;
    let bc = cfg.bc()?;
    let verdict = match reduce_bc(&bc) {
        Ok(r) => classify_strict(&r, &w),
        Err(Error::NotReducible) => RegularityVerdict {
            regular: false,
            strict: Strictness::No,
            branch: Branch::NotRegular,
            witnesses: BTreeMap::new(),
            hint: None,
        },
        Err(e) => return Err(e.into()),
    };
    let text = to_json(&verdict_json(&verdict));
    write(out, "verdict.json", &text)?;
    Ok(text)
}

fn max_entry<'a>(entries: impl Iterator<Item = &'a C64>) -> f64 {
    entries.map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn kernel(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let original = cfg.problem()?;
    let gauged = !original.potential.is_off_diagonal();
    let problem = if gauged { gauge_reduce(&original).problem } else { original };
    let ns = if cfg.kernel.n_list.is_empty() { vec![cfg.n()] } else { cfg.kernel.n_list.clone() };
    let lambdas: Vec<C64> = if cfg.kernel.lambdas.is_empty() {
        vec![C64::new(0.0, 0.0), C64::new(3.0, 0.0), C64::new(5.0, 0.5)]
    } else {
        cfg.kernel.lambdas.iter().map(|z| z.value()).collect()
    };
    let exact: Vec<_> = lambdas.iter().map(|&l| propagate_to_end(&problem, l)).collect::<Result<_, _>>()?;
    let (q, w) = (&problem.potential, &problem.weights);
    let mut rows = Vec::new();
    let mut last = None;
    for &n in &ns {
        let k = Kernels::compute(q, w, n)?;
        let (rp, rm) = k.r_pm();
        let errors: Vec<Value> = lambdas
            .iter()
            .zip(&exact)
            .map(|(&l, phi)| {
                let diff = phi_via_kernels(&rp, &rm, l) - phi;
                json!({"lambda": complex(l), "error": num(max_entry(diff.iter()) / max_entry(phi.iter()).max(1.0))})
            })
            .collect();
        let norms = |f| serde_json::to_value(kernel_norms(f)).expect("plain data");
        rows.push(json!({
            "n": n,
            "sweeps": k.sweeps,
            "last_update": num(k.last_update),
            "goursat_residual": num(goursat_residual(&k.r, q, w)),
            "jump_residual_plus": num(jump_residual(&k.k_plus, q, w)),
            "jump_residual_minus": num(jump_residual(&k.k_minus, q, w)),
            "edge_residual_plus": num(edge_residual(&k.k_plus, w, 1.0)),
            "edge_residual_minus": num(edge_residual(&k.k_minus, w, -1.0)),
            "norms": {"r": norms(&k.r), "k_plus": norms(&k.k_plus), "k_minus": norms(&k.k_minus)},
            "propagator_error": errors,
        }));
        last = Some(k);
    }
    let report = json!({"gauge_reduced": gauged, "grids": rows});
    write(out, "kernel_report.json", &to_json(&report))?;
    if let (true, Some(k)) = (cfg.kernel.dump, last) {
        for (name, field) in [("kernel_k_plus.bin", &k.k_plus), ("kernel_k_minus.bin", &k.k_minus)] {
            let mut buf = Vec::new();
            field.write_binary(&mut buf).map_err(|e| CliError::Io(e.to_string()))?;
            std::fs::write(out.join(name), buf).map_err(|e| CliError::Io(e.to_string()))?;
        }
    }
    Ok(())
}

pub fn basis(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let problem = cfg.problem()?;
    require_regular(&problem)?;
    if !problem.potential.is_off_diagonal() {
        return Err(CliError::Config("basis diagnostics need an off-diagonal potential".into()));
    }
    let (lo, hi) = cfg.window()?;
    let f = handle(cfg, &problem)?;
    let h = cfg.strip.unwrap_or_else(|| f.default_strip_height());
    let records = find_zeros_strip(&f, &Strip::new(h, lo, hi)?)?;
    let pairs = root_system(&problem, &records)?;
    let w = grid_weights(&problem);
    let report = gram_diagnostics(&pairs, &w, cfg.basis.eps)?;
    let mut csv = String::from("n,re,im,pairing_re,pairing_im,equation_residual,boundary_residual,degenerate\n");
    for p in &pairs {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            p.index,
            fmt_e(p.lambda.re),
            fmt_e(p.lambda.im),
            fmt_e(p.pairing.re),
            fmt_e(p.pairing.im),
            fmt_e(equation_residual(&problem, p)),
            fmt_e(boundary_residual(&problem, &p.f)),
            p.degenerate
        ));
    }
    let mut gram = serde_json::to_value(&report).expect("plain data");
    for (key, x) in [("cond", report.cond), ("cond_half", report.cond_half), ("bessel", report.bessel), ("cross_residual", report.cross_residual)] {
        gram[key] = num(x);
    }
    if let Some(x) = report.block_cond {
        gram["block_cond"] = num(x);
    }
    gram["strip_h"] = num(h);
    write(out, "pairs.csv", &csv)?;
    write(out, "gram.json", &to_json(&gram))
}

fn matrix_json(n: usize, at: impl Fn(usize, usize) -> C64) -> Value {
    Value::Array((0..n).map(|r| Value::Array((0..n).map(|c| complex(at(r, c))).collect())).collect())
}

fn reduction_json(red: &BeamReduction) -> Value {
    json!({
        "b": red.b().map(num).to_vec(),
        "b1": num(red.b1),
        "b2": num(red.b2),
        "nu": num(red.nu),
        "h_end": red.h_end.map(num).to_vec(),
        "c": matrix_json(4, |r, c| red.c[(r, c)]),
        "d": matrix_json(4, |r, c| red.d[(r, c)]),
        "q_hat": red.q_hat.iter().map(|q| matrix_json(4, |r, c| q[(r, c)])).collect::<Vec<_>>(),
        "coupling_norm": num(red.coupling_norm()),
    })
}

pub fn timoshenko(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let coeffs = cfg.beam()?;
    let red = build_reduction(&coeffs)?;
    let (lo, hi) = cfg.window()?;
    let coupled = beam_spectrum(&red, 1.0, lo, hi, cfg.strip)?;
    let h = coupled.strip_h;
    let base = beam_spectrum(&red, 0.0, lo - 1.0, hi + 1.0, Some(h))?;
    let drift = spectral_drift(&coupled.records, &base.records, lo + 1.0, hi - 1.0);
    let (coupled_rows, pairing) = paired(coupled.records, &base.records, (lo, hi));

    let mut sub_rows: Vec<(String, Vec<EigenvalueRecord>)> = Vec::new();
    let decoupled = match decouple(&red) {
        Ok(dec) => {
            for (j, p) in dec.problems.iter().enumerate() {
                let f = if p.potential.is_zero() { DeterminantHandle::closed_form(p) } else { DeterminantHandle::propagator(p) };
                let recs = find_zeros_strip(&f, &Strip::new(h, lo, hi)?)?;
                let (recs, _) = paired(recs, &unperturbed(p, lo, hi)?, (lo, hi));
                sub_rows.push(((j + 1).to_string(), recs));
            }
            true
        }
        Err(Error::NotDecoupled) => false,
        Err(e) => return Err(e.into()),
    };
    sub_rows.push(("coupled".into(), coupled_rows));

    let mut csv = format!("{SPECTRUM_HEADER},subsystem\n");
    for (tag, recs) in &sub_rows {
        for r in recs {
            csv.push_str(&format!("{},{tag}\n", spectrum_row(r)));
        }
    }
    let mut report = reduction_json(&red);
    report["strip_h"] = num(h);
    report["decoupled"] = Value::Bool(decoupled);
    report["drift"] = num(drift);
    report["pairing"] = pairing;
    write(out, "reduction.json", &to_json(&report))?;
    write(out, "modal.csv", &csv)
}
