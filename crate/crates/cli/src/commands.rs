use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use multicond::condnum::{first_order_eigs, worst_case_hermitian, worst_case_nonhermitian};
use multicond::lab::{
    self, format_sig, matching_kappas, render_report, render_table2, render_table3, resolve_cluster, run_trial,
    samples_to_csv, Digits, ExperimentConfig, PairSource, Structure,
};
use multicond::linalg::io::{read_matrix, write_matrix};
use multicond::pencil::{extract_cluster, swap_for_infinite, CLUSTER_TOL};
use multicond::{Complex64, ConditionNumbers, EigenStructure, Error, MatrixPair, Result, SigmaSpectrum};
use serde::Serialize;

use crate::{BuildPairArgs, ClusterArgs, CondArgs, ExperimentArgs, PairArgs, Table3Args, TableArgs, WorstCaseArgs};

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn digits(paper: bool) -> Digits {
    if paper {
        Digits::Compact
    } else {
        Digits::Full
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| invalid(format!("cannot write {}: {e}", path.display())))
}

fn source(pair: &PairArgs) -> Result<PairSource> {
    match (&pair.builder, &pair.a, &pair.b) {
        (Some(name), None, None) => {
            if pair.definite {
                return Err(invalid("--definite applies to --a/--b input only"));
            }
            Ok((*name).into())
        }
        (None, Some(a), Some(b)) => Ok(PairSource::Files {
            a: a.clone(),
            b: b.clone(),
            definite: pair.definite,
        }),
        _ => Err(invalid("give either --builder or both --a and --b")),
    }
}

/// Cluster flags with builder defaults filled in.
struct Target {
    lambda0: Complex64,
    r: usize,
    n1: usize,
}

fn target(src: &PairSource, cluster: &ClusterArgs, lambda0_override: Option<Complex64>) -> Result<Target> {
    if !(cluster.tau.is_finite() && cluster.tau >= 0.0) {
        return Err(invalid(format!("--tau must be finite and nonnegative, got {}", cluster.tau)));
    }
    let planted = match src {
        PairSource::Builder { name } => Some(name.target()),
        PairSource::Files { .. } => None,
    };
    let lambda0 = lambda0_override
        .or(cluster.lambda0)
        .or(planted.map(|t| t.0))
        .ok_or_else(|| invalid("--lambda0 is required with --a/--b"))?;
    let at_planted = planted.filter(|t| t.0 == lambda0);
    let r = cluster
        .mult
        .or(at_planted.map(|t| t.1))
        .ok_or_else(|| invalid("--mult is required"))?;
    let n1 = cluster.n1.or(at_planted.filter(|t| t.1 == r).map(|t| t.2)).unwrap_or(1);
    if r == 0 || n1 == 0 {
        return Err(invalid("--mult and --n1 must be at least 1"));
    }
    Ok(Target { lambda0, r, n1 })
}

fn check_structure(pair: &MatrixPair, structure: Structure, n1: usize) -> Result<()> {
    if structure == Structure::Hermitian && n1 == 1 && !pair.is_hermitian_definite() {
        return Err(invalid(
            "--structure hermitian needs a Hermitian-definite pair (pass --definite with --a/--b)",
        ));
    }
    Ok(())
}

struct Analysis {
    source: PairSource,
    pair: MatrixPair,
    es: EigenStructure,
    sigmas: SigmaSpectrum,
    kappas: ConditionNumbers,
}

fn analyze(
    pair_args: &PairArgs,
    cluster: &ClusterArgs,
    infinite: bool,
    blocks: Option<(&Path, &Path)>,
) -> Result<Analysis> {
    let src = source(pair_args)?;
    let zero = infinite.then_some(Complex64::new(0.0, 0.0));
    let t = target(&src, cluster, zero)?;
    let (pair, es) = if infinite {
        if t.n1 != 1 {
            return Err(invalid("--infinite supports nondefective clusters only"));
        }
        // with --infinite, --definite refers to the swapped pair (B, A)
        let loaded = match &src {
            PairSource::Files { a, b, .. } => MatrixPair::general(read_matrix(a)?, read_matrix(b)?)?,
            PairSource::Builder { .. } => src.load(pair_args.seed)?,
        };
        let mut swapped = swap_for_infinite(&loaded)?;
        if pair_args.definite {
            swapped = MatrixPair::new(swapped.a().clone(), swapped.b().clone(), true)?;
        }
        let es = extract_cluster(&swapped, t.lambda0, t.r, CLUSTER_TOL)?;
        (swapped, es)
    } else if let Some((x1, y1)) = blocks {
        let pair = src.load(pair_args.seed)?;
        let (x1, y1) = (read_matrix(x1)?, read_matrix(y1)?);
        if x1.rows() != pair.n() || y1.rows() != pair.n() || x1.cols() != t.r || y1.cols() != t.r {
            return Err(invalid(format!(
                "--x1 and --y1 must be {}x{} for this pair and multiplicity",
                pair.n(),
                t.r
            )));
        }
        let es = EigenStructure {
            lambda0: t.lambda0,
            r: t.r,
            n1: t.n1,
            x1,
            y1,
        };
        (pair, es)
    } else {
        resolve_cluster(&src, pair_args.seed, t.lambda0, t.r, t.n1)?
    };
    check_structure(&pair, cluster.structure, es.n1)?;
    let (sigmas, kappas) = matching_kappas(&pair, &es, cluster.structure, cluster.tau)?;
    Ok(Analysis {
        source: src,
        pair,
        es,
        sigmas,
        kappas,
    })
}

#[derive(Serialize)]
struct CondOutput<'a> {
    pair: &'a PairSource,
    seed: u64,
    infinite: bool,
    lambda0: Complex64,
    r: usize,
    n1: usize,
    structure: Structure,
    sigmas: &'a SigmaSpectrum,
    condition_numbers: &'a ConditionNumbers,
}

fn regime_name(k: &ConditionNumbers) -> String {
    match k.regime {
        multicond::Regime::HermitianStructured => "hermitian-structured".into(),
        multicond::Regime::General => "general".into(),
        multicond::Regime::Defective { n1 } => format!("defective (n1 = {n1})"),
    }
}

pub fn cond(args: CondArgs) -> Result<String> {
    let blocks = args.x1.as_deref().zip(args.y1.as_deref());
    let an = analyze(&args.pair, &args.cluster, args.infinite, blocks)?;
    if args.json {
        return Ok(to_json(&CondOutput {
            pair: &an.source,
            seed: args.pair.seed,
            infinite: args.infinite,
            lambda0: an.es.lambda0,
            r: an.es.r,
            n1: an.es.n1,
            structure: args.cluster.structure,
            sigmas: &an.sigmas,
            condition_numbers: &an.kappas,
        }));
    }
    let (sig, trim) = if args.paper_digits { (3, true) } else { (6, false) };
    let mut out = String::new();
    let at = if args.infinite {
        "infinity".to_string()
    } else {
        an.es.lambda0.to_string()
    };
    writeln!(
        out,
        "{}: lambda0 = {at}, r = {}, n1 = {}, tau = {}",
        an.source, an.es.r, an.es.n1, an.kappas.tau
    )
    .unwrap();
    writeln!(out, "regime: {}", regime_name(&an.kappas)).unwrap();
    writeln!(out, "{:>3}{:>14}{:>14}", "i", "sigma_i", "kappa_i").unwrap();
    for (i, (s, k)) in an.sigmas.as_slice().iter().zip(&an.kappas.kappas).enumerate() {
        writeln!(
            out,
            "{:>3}{:>14}{:>14}",
            i + 1,
            format_sig(*s, sig, trim),
            format_sig(*k, sig, trim)
        )
        .unwrap();
    }
    Ok(out)
}

#[derive(Serialize)]
struct WorstCaseOutput<'a> {
    pair: &'a PairSource,
    seed: u64,
    lambda0: Complex64,
    index: usize,
    structure: Structure,
    kappa: f64,
    condition_numbers: &'a ConditionNumbers,
    /// `|mu_j|^(1/n1)` for the eigenvalues `mu_j` of `Y1^H (E - lambda0 F) X1`.
    first_order: Vec<f64>,
    eps: Option<f64>,
    deltas: Option<Vec<f64>>,
}

pub fn worst_case(args: WorstCaseArgs) -> Result<String> {
    let an = analyze(&args.pair, &args.cluster, false, None)?;
    let (e, f) = match args.cluster.structure {
        Structure::Hermitian => worst_case_hermitian(&an.es, args.index, args.cluster.tau)?,
        Structure::General => worst_case_nonhermitian(&an.es, args.index, args.cluster.tau)?,
    };
    let root = 1.0 / an.es.n1 as f64;
    let first_order: Vec<f64> = first_order_eigs(&an.es, &e, &f)?
        .iter()
        .map(|z| z.norm().powf(root))
        .collect();
    let deltas = match args.eps {
        Some(eps) => Some(run_trial(&an.pair, &an.es, &e, &f, eps)?.deltas),
        None => None,
    };
    if let Some(path) = &args.out_e {
        write_matrix(path, &e)?;
    }
    if let Some(path) = &args.out_f {
        write_matrix(path, &f)?;
    }
    let kappa = an.kappas.kappas[args.index - 1];
    if args.json {
        return Ok(to_json(&WorstCaseOutput {
            pair: &an.source,
            seed: args.pair.seed,
            lambda0: an.es.lambda0,
            index: args.index,
            structure: args.cluster.structure,
            kappa,
            condition_numbers: &an.kappas,
            first_order,
            eps: args.eps,
            deltas,
        }));
    }
    let (sig, trim) = if args.paper_digits { (3, true) } else { (6, false) };
    let fmt = |v: &[f64]| v.iter().map(|x| format_sig(*x, sig, trim)).collect::<Vec<_>>().join(", ");
    let mut out = String::new();
    writeln!(
        out,
        "{}: worst case for kappa_{} = {} ({})",
        an.source,
        args.index,
        format_sig(kappa, sig, trim),
        regime_name(&an.kappas)
    )
    .unwrap();
    writeln!(out, "first-order displacements: {}", fmt(&first_order)).unwrap();
    if let (Some(eps), Some(d)) = (args.eps, &deltas) {
        writeln!(out, "measured deltas at eps = {eps:e}: {}", fmt(d)).unwrap();
    }
    Ok(out)
}

fn finish_run(json: String, text: String, out: Option<&Path>, print_json: bool) -> Result<String> {
    if let Some(path) = out {
        write_file(path, &json)?;
    }
    Ok(if print_json { json } else { text })
}

pub fn experiment(args: ExperimentArgs) -> Result<String> {
    let src = source(&args.pair)?;
    let t = target(&src, &args.cluster, None)?;
    let epsilon = args.eps.unwrap_or(if t.n1 > 1 {
        lab::DEFAULT_EPS_DEFECTIVE
    } else {
        lab::DEFAULT_EPS
    });
    if args.cluster.structure == Structure::Hermitian && t.n1 == 1 {
        let (pair, _) = resolve_cluster(&src, args.pair.seed, t.lambda0, t.r, t.n1)?;
        check_structure(&pair, args.cluster.structure, t.n1)?;
    }
    let config = ExperimentConfig {
        pair: src,
        lambda0: t.lambda0,
        r: t.r,
        n1: t.n1,
        epsilon,
        trials: args.run.trials,
        structure: args.cluster.structure,
        tau: args.cluster.tau,
        field: args.field,
        seed: args.pair.seed,
        workers: args.run.workers,
        zero_perturbation: args.zero_perturbation,
    };
    let (report, samples) = lab::run_experiment_with_samples(&config)?;
    if let Some(path) = &args.csv {
        write_file(path, &samples_to_csv(&samples))?;
    }
    let json = format!("{}\n", report.to_json());
    let text = render_report(&report, digits(args.run.paper_digits));
    finish_run(json, text, args.run.out.as_deref(), args.run.json)
}

pub fn table2(args: TableArgs) -> Result<String> {
    let table = lab::reproduce_table2(args.run.trials, args.seed, args.run.workers)?;
    let json = format!("{}\n", table.to_json());
    let text = render_table2(&table, digits(args.run.paper_digits));
    finish_run(json, text, args.run.out.as_deref(), args.run.json)
}

pub fn table3(args: Table3Args) -> Result<String> {
    let t = &args.table;
    let report = if args.structure == Structure::General {
        lab::reproduce_table3(t.run.trials, t.seed, t.run.workers)?
    } else {
        if t.run.trials < lab::MIN_TABLE_TRIALS {
            return Err(invalid(format!(
                "table reproductions need at least {} trials, got {}",
                lab::MIN_TABLE_TRIALS,
                t.run.trials
            )));
        }
        lab::run_experiment(&lab::table3_config(t.run.trials, t.seed, t.run.workers, args.structure))?
    };
    let json = format!("{}\n", report.to_json());
    let text = render_table3(&report, digits(t.run.paper_digits));
    finish_run(json, text, t.run.out.as_deref(), t.run.json)
}

pub fn build_pair(args: BuildPairArgs) -> Result<String> {
    let built = args.builder.build(args.seed)?;
    fs::create_dir_all(&args.out).map_err(|e| invalid(format!("cannot create {}: {e}", args.out.display())))?;
    let files = [
        ("a.txt", built.pair.a()),
        ("b.txt", built.pair.b()),
        ("x1.txt", &built.structure.x1),
        ("y1.txt", &built.structure.y1),
    ];
    for (name, m) in files {
        write_matrix(args.out.join(name), m)?;
    }
    let es = &built.structure;
    let mut out = String::new();
    writeln!(
        out,
        "wrote {} (seed {}) to {}: n = {}, lambda0 = {}, r = {}, n1 = {}, hermitian-definite = {}",
        args.builder,
        args.seed,
        args.out.display(),
        built.pair.n(),
        es.lambda0,
        es.r,
        es.n1,
        built.pair.is_hermitian_definite()
    )
    .unwrap();
    Ok(out)
}
