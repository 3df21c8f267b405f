use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde_json::json;

use qmask_core::hr::{build_hr, kappa, kappa_real, kappa_tilde, verify_hr_relations, HrSet};
use qmask_core::ic::{
    bloch_affine_dimension, conjecture_experiment, fixture, is_informationally_complete, is_weighted_2_design,
    phase_triple_family, qubit_disk_test, real_to_phase_obstruction, separating_observable, triple_product,
    PhaseStates, ConstrainedStates, StateSet, RANK_CUTOFF,
};
use qmask_core::masking::{
    canonical_real_masker, extract_hr, find_balanced_signs, magic_basis_masker, masker_from_spectrum, phase_masker,
    qubit_complex_masker, verify_masker_against, Masker, NonRealStates, RandomStates, Reference, StateSampler,
};
use qmask_core::measures::{masking_entanglement_table, robustness_of_imaginarity, MeasureName, MeasureValue};
use qmask_core::repro::{self, ReproReport, Table};
use qmask_core::state::{DensityMatrix, StateKind};
use qmask_core::tol;

use crate::config::RunConfig;
use crate::output::{object_csv, table_csv, Output};
use crate::{Command, HrCommand, IcCommand, MaskCommand, MaskerKind, MeasureCommand, ReportName, ReproArgs, SetKind, Side};

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().with_context(|| format!("bad number `{s}`")))
        .collect()
}

fn parse_spectrum(text: &str) -> Result<Vec<(f64, usize)>> {
    text.split(',')
        .map(|pair| {
            let (l, m) = pair.split_once(':').with_context(|| format!("expected `lambda:multiplicity`, got `{pair}`"))?;
            Ok((l.trim().parse()?, m.trim().parse()?))
        })
        .collect()
}

fn flat_csv(output: Output) -> Result<Output> {
    let csv = object_csv(&output.json)?;
    Ok(output.with_csv(csv))
}

pub fn run(command: &Command, config: &RunConfig) -> Result<Output> {
    match command {
        Command::Hr(c) => hr(c, config),
        Command::Mask(c) => mask(c, config),
        Command::Measure(c) => measure(c, config),
        Command::Ic(c) => ic(c, config),
        Command::Repro(args) => repro_command(args, config),
    }
}

fn hr(command: &HrCommand, config: &RunConfig) -> Result<Output> {
    match command {
        HrCommand::Gen { count, dim, real } => Output::json(build_hr(*count, *dim, *real)?),
        HrCommand::Verify { file } => {
            let set: HrSet = read_json(file)?;
            let report = verify_hr_relations(&set, config.tol_or(config.tolerances.hr));
            Ok(flat_csv(Output::json(&report)?)?.failed_if(!report.pass))
        }
        HrCommand::Kappa { max_d } => {
            if *max_d < 2 {
                bail!("--max-d must be at least 2");
            }
            let mut table = Table {
                columns: ["d", "kappa", "kappa_R", "kappa_tilde"].map(String::from).to_vec(),
                rows: Vec::new(),
            };
            for d in 2..=*max_d {
                table.rows.push(vec![d as f64, kappa(d)? as f64, kappa_real(d)? as f64, kappa_tilde(d)? as f64]);
            }
            Ok(Output::json(&table)?.with_csv(table_csv(&table)?).csv_by_default())
        }
    }
}

fn build_masker(
    kind: MaskerKind,
    d: Option<usize>,
    m: Option<usize>,
    real: bool,
    spectrum: Option<&str>,
    mu: Option<&str>,
    signs: Option<&str>,
) -> Result<Masker> {
    let need_d = || d.context("--d is required for this kind");
    Ok(match kind {
        MaskerKind::Magic => magic_basis_masker(),
        MaskerKind::Phase => phase_masker(need_d()?)?,
        MaskerKind::Canonical => {
            let d = need_d()?;
            let minimal = if real { kappa_real(d)? } else { kappa_tilde(d)? };
            canonical_real_masker(d, m.unwrap_or(minimal), real)?
        }
        MaskerKind::Spectrum => {
            let spectrum = parse_spectrum(spectrum.context("--spectrum is required")?)?;
            masker_from_spectrum(need_d()?, &spectrum, real)?
        }
        MaskerKind::Qubit => {
            let mu = parse_list(mu.context("--mu is required")?)?;
            let signs: Vec<i8> = match signs {
                Some(s) => parse_list(s)?.iter().map(|&x| x as i8).collect(),
                None => find_balanced_signs(&mu, tol::NORM).context("no balanced sign pattern exists for --mu")?,
            };
            qubit_complex_masker(&mu, &signs)?
        }
    })
}

fn mask(command: &MaskCommand, config: &RunConfig) -> Result<Output> {
    match command {
        MaskCommand::Build { kind, d, m, real, spectrum, mu, signs } => {
            let masker = build_masker(*kind, *d, *m, *real, spectrum.as_deref(), mu.as_deref(), signs.as_deref())?;
            Output::json(masker)
        }
        MaskCommand::Verify { masker, set, n, profile, side } => {
            let masker: Masker = read_json(masker)?;
            let d = masker.input_dim();
            let phase;
            let (sampler, reference): (&dyn StateSampler, Reference) = match set {
                SetKind::Real => (&RandomStates { dim: d, kind: StateKind::PureReal }, Reference::Anchor),
                SetKind::Complex => (&NonRealStates { dim: d }, Reference::Anchor),
                SetKind::Constrained => {
                    if d != 4 {
                        bail!("--set constrained needs a d = 4 masker, got d = {d}");
                    }
                    (&ConstrainedStates, Reference::Anchor)
                }
                SetKind::Phase => {
                    phase = match profile {
                        Some(p) => PhaseStates::new(parse_list(p)?)?,
                        None => PhaseStates::uniform(d),
                    };
                    if phase.profile().len() != d {
                        bail!("profile length {} does not match d = {d}", phase.profile().len());
                    }
                    (&phase, Reference::FirstSample)
                }
            };
            let n = n.unwrap_or(config.n_samples);
            let tol = config.tol_or(tol::NORM);
            let report = verify_masker_against(&masker, sampler, n, config.seed, tol, reference)?;
            let pass = match side {
                Side::Both => report.is_masker,
                Side::A => report.is_partial_masker_a,
            };
            let mut value = serde_json::to_value(&report)?;
            value["set"] = json!(format!("{set:?}").to_lowercase());
            value["seed"] = json!(config.seed);
            value["tol"] = json!(tol);
            value["pass"] = json!(pass);
            let mut flat = value.clone();
            flat.as_object_mut().expect("object").remove("witness_state");
            Ok(Output::json(value)?.with_csv(object_csv(&flat)?).failed_if(!pass))
        }
        MaskCommand::ExtractHr { masker } => {
            let masker: Masker = read_json(masker)?;
            Output::json(extract_hr(&masker, config.tol_or(tol::NORM))?)
        }
    }
}

fn measure(command: &MeasureCommand, config: &RunConfig) -> Result<Output> {
    match command {
        MeasureCommand::Roi { state } => {
            let matrix = read_json(state)?;
            let rho = DensityMatrix::with_tol(matrix, &config.tolerances)?;
            let value = MeasureValue { name: MeasureName::RobustnessOfImaginarity, value: robustness_of_imaginarity(&rho) };
            flat_csv(Output::json(value)?)
        }
        MeasureCommand::Table { max_d } => {
            let rows = masking_entanglement_table(*max_d)?;
            let table = Table {
                columns: ["d", "E_C", "E_C_R", "C", "C_R"].map(String::from).to_vec(),
                rows: rows.iter().map(|r| vec![r.d as f64, r.e_c as f64, r.e_c_real as f64, r.c, r.c_real]).collect(),
            };
            Ok(Output::json(&rows)?.with_csv(table_csv(&table)?))
        }
        MeasureCommand::Maskcon { masker, d, n } => {
            let n = n.unwrap_or(config.n_samples);
            let report = match masker {
                Some(path) => repro::repro_maskcon_with(&read_json(path)?, n, config.seed)?,
                None => repro::repro_maskcon(*d, n, config.seed)?,
            };
            let table = report.table.clone().unwrap_or_default();
            Ok(Output::json(&report)?.with_csv(table_csv(&table)?).failed_if(!report.pass))
        }
    }
}

fn ic(command: &IcCommand, config: &RunConfig) -> Result<Output> {
    let cutoff = config.tol_or(RANK_CUTOFF);
    match command {
        IcCommand::Check { set } => {
            let set: StateSet = read_json(set)?;
            let report = is_informationally_complete(&set, cutoff)?;
            let affine = bloch_affine_dimension(&set, cutoff)?;
            let q = separating_observable(&set, cutoff)?;
            let residual = q.as_ref().map(|q| {
                set.states().iter().map(|s| s.matrix().trace_product(q).norm()).fold(0.0, f64::max)
            });
            let value = json!({
                "dim": set.dim(),
                "states": set.len(),
                "informationally_complete": report.informationally_complete,
                "span_dim": report.span_dim,
                "full_dim": report.full_dim,
                "bloch_affine_dim": affine,
                "separating_observable": q,
                "separating_residual": residual,
            });
            let mut flat = value.clone();
            flat.as_object_mut().expect("object").remove("separating_observable");
            Ok(Output::json(value)?.with_csv(object_csv(&flat)?))
        }
        IcCommand::Design { set, t } => {
            if *t != 2 {
                bail!("only t = 2 is supported");
            }
            let set: StateSet = read_json(set)?;
            flat_csv(Output::json(is_weighted_2_design(&set, config.tol_or(1e-12))?)?)
        }
        IcCommand::Disk { set } => {
            let set: StateSet = read_json(set)?;
            let contained = qubit_disk_test(&set)?;
            let value = json!({
                "contained_in_disk": contained,
                "bloch_affine_dim": bloch_affine_dimension(&set, cutoff)?,
            });
            flat_csv(Output::json(value)?)
        }
        IcCommand::Fixtures { name } => Output::json(fixture(name)?),
        IcCommand::Triple { d, c0_sq } => {
            let [a, b, c] = phase_triple_family(*d, *c0_sq)?;
            let t = triple_product(&a.density(), &b.density(), &c.density())?;
            flat_csv(Output::json(json!({ "d": d, "c0_sq": c0_sq, "re": t.re, "im": t.im }))?)
        }
        IcCommand::Obstruction { dim_prime, step } => {
            flat_csv(Output::json(real_to_phase_obstruction(*dim_prime, *step)?)?)
        }
        IcCommand::Conjecture { profile, n } => {
            let c = parse_list(profile)?;
            let masker = phase_masker(c.len())?;
            let report =
                conjecture_experiment(&masker, &c, n.unwrap_or(config.n_samples), config.seed, config.tol_or(1e-10))?;
            let mut flat = serde_json::to_value(&report)?;
            flat["profile"] = json!(profile);
            Ok(Output::json(&report)?.with_csv(object_csv(&flat)?))
        }
    }
}

fn one_report(name: ReportName, args: &ReproArgs, config: &RunConfig) -> Result<ReproReport> {
    let n = args.n.unwrap_or(config.n_samples);
    let start = Instant::now();
    let mut report = match name {
        ReportName::Entmask => repro::repro_entmask(args.d_max)?,
        ReportName::Maskcon => repro::repro_maskcon(args.d, n, config.seed)?,
        ReportName::CounterexampleD2 => repro::repro_counterexample_d2()?,
        ReportName::HideNotMask => repro::repro_hide_not_mask(n, config.seed)?,
        ReportName::Bott => repro::repro_bott(args.d_max)?,
        ReportName::All => unreachable!("expanded by the caller"),
    };
    if config.timing {
        report.wall_time = Some(start.elapsed().as_secs_f64());
    }
    Ok(report)
}

fn repro_command(args: &ReproArgs, config: &RunConfig) -> Result<Output> {
    if args.name != ReportName::All {
        return Output::report(&one_report(args.name, args, config)?);
    }
    let names = [
        ReportName::Entmask,
        ReportName::Maskcon,
        ReportName::CounterexampleD2,
        ReportName::HideNotMask,
        ReportName::Bott,
    ];
    let reports = names.iter().map(|&n| one_report(n, args, config)).collect::<Result<Vec<_>>>()?;
    let mut csv = String::new();
    for r in &reports {
        if !csv.is_empty() {
            csv.push('\n');
        }
        csv.push_str(&crate::output::report_csv(r)?);
    }
    let failed = reports.iter().any(|r| !r.pass);
    Ok(Output::json(&reports)?.with_csv(csv).failed_if(failed))
}
