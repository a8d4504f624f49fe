//! The full property suite behind `verify-all`: every identity the library
//! promises, run on one pair or fanned out over generated seeds.

use kodaira::models::{self, BoundaryMode, GeneratorSpec, GridSpec};
use kodaira::sandwich::{self, DualityData, SandwichPair};
use kodaira::{CheckRecord, ValidationReport};
use rayon::prelude::*;

use crate::CliError;

pub fn run_suite(pair: &SandwichPair, duality: Option<&DualityData>) -> Result<ValidationReport, CliError> {
    let mut report = ValidationReport::new(pair.tol());
    report.merge(sandwich::check_extension(pair));

    match sandwich::build_intermediate(pair) {
        Ok(inter) => {
            report.merge(inter.certificates.clone());
            let (_, dual_report) = sandwich::dual_intermediate(pair, duality)?;
            report.merge(dual_report);
            let (_, hodge) = sandwich::intermediate_hodge(pair, &inter)?;
            report.merge(hodge);
            let (_, _, euler) = sandwich::intermediate_euler(pair, &inter, duality)?;
            report.merge(euler);
            if pair.top_degree() % 4 == 0 && pair.top_degree() > 0 {
                if let Some(d) = duality {
                    match sandwich::signature(pair, d, &inter) {
                        Ok(sig) => report.merge(sig.checks),
                        Err(e) => report.push(CheckRecord::new(
                            "signature",
                            false,
                            f64::NAN,
                            e.to_string(),
                        )),
                    }
                }
            }
        }
        Err(e) => {
            report.push(CheckRecord::new("intermediate.construction", false, f64::NAN, e.to_string()));
        }
    }

    let idx = sandwich::psi(pair, duality)?;
    report.merge(idx.checks);
    let (_, _, _, diff_checks) = sandwich::index_difference(pair)?;
    report.merge(diff_checks);
    for (j, r) in sandwich::cohomological_formula_check(pair)?.iter().enumerate() {
        report.push(CheckRecord::new(
            format!("indices.cohomological_formula[{j}]"),
            *r == 0,
            r.abs() as f64,
            String::new(),
        ));
    }
    let (_, equivalences) = sandwich::equivalence_check(pair, duality)?;
    report.merge(equivalences);
    report.merge(sandwich::injectivity_chain(pair, None)?);
    if let Ok(t) = models::random_intermediate_domains(pair, 17) {
        report.merge(sandwich::injectivity_chain(pair, Some(&t))?);
    }

    if let Some(d) = duality {
        report.merge(sandwich::check_complementary(pair, d)?);
        let complementary = sandwich::check_complementary(pair, d)?.pass;
        for (j, (a, b)) in sandwich::mirror_quotient_dims(pair).iter().enumerate() {
            report.push(CheckRecord::new(
                format!("duality.mirror_quotient[{j}]"),
                !complementary || a == b,
                (a - b).abs() as f64,
                format!("{a} vs {b}"),
            ));
        }
        report.merge(sandwich::harmonic_transport_check(pair, d)?);
    }

    Ok(report)
}

/// Deterministic shapes for the seed sweep.
fn sweep_shapes(seed: u64) -> (Vec<usize>, Vec<usize>) {
    let random_shapes: [&[usize]; 4] = [&[3, 4, 3], &[2, 3, 3, 2], &[4, 5, 4, 3], &[2, 4, 4, 4, 2]];
    let complementary_shapes: [&[usize]; 3] = [&[3, 3], &[2, 3, 3, 2], &[2, 2, 3, 2, 2]];
    (
        random_shapes[(seed % 4) as usize].to_vec(),
        complementary_shapes[(seed % 3) as usize].to_vec(),
    )
}

fn suite_for_seed(seed: u64) -> Result<ValidationReport, String> {
    let (random_dims, comp_dims) = sweep_shapes(seed);
    let mut report = ValidationReport::new(kodaira::Tolerance::default());

    let spec = GeneratorSpec::new(seed, random_dims, (0, 2));
    let file = models::gen_random_pair(&spec).map_err(|e| e.to_string())?;
    let (pair, _) = file.build().map_err(|e| e.to_string())?;
    let mut r = run_suite(&pair, None).map_err(|CliError::Usage(m)| m)?;
    for c in r.checks.iter_mut() {
        c.name = format!("random[{seed}].{}", c.name);
    }
    report.merge(r);

    let spec = GeneratorSpec::new(seed, comp_dims, (0, 0));
    let file = models::gen_complementary(&spec, None, None).map_err(|e| e.to_string())?;
    let (pair, duality) = file.build().map_err(|e| e.to_string())?;
    let mut r = run_suite(&pair, duality.as_ref()).map_err(|CliError::Usage(m)| m)?;
    for c in r.checks.iter_mut() {
        c.name = format!("complementary[{seed}].{}", c.name);
    }
    report.merge(r);

    Ok(report)
}

pub fn run_seed_sweep(base_seed: u64, count: usize) -> Result<ValidationReport, CliError> {
    let mut report = ValidationReport::new(kodaira::Tolerance::default());

    // Fixed fixtures once, then the per-seed fan-out.
    for (name, file) in [
        (
            "grid_two_ends",
            models::gen_grid_interval(&GridSpec {
                cells: 4,
                weight_exponent: 0.0,
                boundary_mode: BoundaryMode::TwoEnds,
            })
            .map_err(|e| CliError::Usage(e.to_string()))?,
        ),
        (
            "grid_one_end",
            models::gen_grid_interval(&GridSpec {
                cells: 4,
                weight_exponent: 1.5,
                boundary_mode: BoundaryMode::OneEnd,
            })
            .map_err(|e| CliError::Usage(e.to_string()))?,
        ),
        ("cone", models::gen_cone_2d(4, 1.0).map_err(|e| CliError::Usage(e.to_string()))?),
    ] {
        let (pair, duality) = file.build().map_err(|e| CliError::Usage(e.to_string()))?;
        let mut r = run_suite(&pair, duality.as_ref())?;
        for c in r.checks.iter_mut() {
            c.name = format!("{name}.{}", c.name);
        }
        report.merge(r);
    }

    let results: Vec<(u64, Result<ValidationReport, String>)> = (0..count as u64)
        .into_par_iter()
        .map(|offset| {
            let seed = base_seed.wrapping_add(offset);
            (seed, suite_for_seed(seed))
        })
        .collect();
    // rayon returns in input order; merge deterministically anyway by seed.
    for (seed, result) in results {
        match result {
            Ok(r) => report.merge(r),
            Err(msg) => report.push(CheckRecord::new(
                format!("seed[{seed}]"),
                false,
                f64::NAN,
                msg,
            )),
        }
    }
    Ok(report)
}
