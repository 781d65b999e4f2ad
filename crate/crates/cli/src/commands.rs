//! Subcommand implementations. Each returns `Ok(())` for exit 0 or a
//! `CliError` carrying the exit code.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use capgen_core::gen::pipeline::{generate_one, GenRequest};
use capgen_core::linext::{count_extensions, enumerate_extensions};
use capgen_core::verify::{check_capacity_axioms, check_class, check_tag, dual_tag};
use capgen_core::{
    ClassTag, GenerationConfig, InnerClass, MeasureClass, MeasureClassSpec, Partition, Subset,
};

use crate::args::{DualArgs, EnumerateArgs, ExperimentArgs, GenArgs, VerifyArgs};
use crate::exit::CliError;
use crate::experiment;
use crate::record::{
    read_records, write_csv, write_header, write_record, CapacityRecord, RecordParams,
};

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => Ok(Box::new(BufWriter::new(File::create(p).map_err(CliError::io)?))),
        None => Ok(Box::new(BufWriter::new(std::io::stdout()))),
    }
}

fn open_input(path: &PathBuf) -> Result<BufReader<File>, CliError> {
    Ok(BufReader::new(File::open(path).map_err(CliError::io)?))
}

/// Parses "1,2|3"-style 1-based partitions.
pub fn parse_partition(n: usize, text: &str) -> Result<Partition, CliError> {
    let mut blocks = Vec::new();
    for part in text.split('|') {
        let mut block = Subset::EMPTY;
        for item in part.split(',') {
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            let e: usize = item
                .parse()
                .map_err(|_| CliError::Infeasible(format!("bad partition element '{item}'")))?;
            if e == 0 || e > n {
                return Err(CliError::Infeasible(format!(
                    "partition element {e} outside 1..={n}"
                )));
            }
            block = block.with(e - 1);
        }
        blocks.push(block);
    }
    Partition::new(n, blocks).map_err(CliError::from)
}

fn class_spec(
    n: usize,
    class: &str,
    k: Option<usize>,
    interaction: Option<f64>,
    partition: Option<&str>,
) -> Result<MeasureClassSpec, CliError> {
    let class: MeasureClass = class.parse().map_err(CliError::from)?;
    let partition = partition.map(|p| parse_partition(n, p)).transpose()?;
    let spec = MeasureClassSpec { class, k, interaction, partition };
    spec.validate(n).map_err(CliError::from)?;
    Ok(spec)
}

pub fn cmd_gen(args: &GenArgs) -> Result<(), CliError> {
    let spec = class_spec(
        args.n,
        &args.class,
        args.k,
        args.interaction,
        args.partition.as_deref(),
    )?;
    let inner: InnerClass = args.inner_class.parse().map_err(CliError::from)?;
    let config = GenerationConfig {
        seed: args.seed,
        walk_steps: args.walk_steps,
        eta_fraction: args.eta_fraction,
        batch: args.count,
        adjust_rounds: args.adjust_rounds,
        ..GenerationConfig::default()
    };
    let request = GenRequest { n: args.n, spec, strict: args.strict, inner, config };
    request.validate().map_err(CliError::from)?;

    // Fail fast on infeasible requests before fanning out.
    generate_one(&request, 0).map_err(CliError::from)?;

    let results: Vec<CapacityRecord> = (0..args.count as u64)
        .into_par_iter()
        .map(|index| {
            let generated = generate_one(&request, index)?;
            Ok(CapacityRecord {
                index,
                n: args.n,
                values: generated.measure.values().to_vec(),
                tags: generated.tags.iter().map(ClassTag::to_string).collect(),
                params: RecordParams {
                    class: args.class.clone(),
                    k: args.k,
                    interaction: args.interaction,
                    partition: args.partition.clone(),
                    inner_class: (request.spec.class == MeasureClass::PSymmetric)
                        .then(|| args.inner_class.clone()),
                    strict: args.strict,
                    walk_steps: args.walk_steps,
                    eta_fraction: args.eta_fraction,
                },
                seed: args.seed,
                generator_version: env!("CARGO_PKG_VERSION").to_string(),
            })
        })
        .collect::<Result<Vec<_>, capgen_core::Error>>()
        .map_err(CliError::from)?;

    let mut out = open_output(args.out.as_deref())?;
    match args.format.as_str() {
        "csv" => write_csv(&mut out, &results)?,
        _ => {
            write_header(&mut out)?;
            for record in &results {
                write_record(&mut out, record)?;
            }
        }
    }
    out.flush().map_err(CliError::io)
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<(), CliError> {
    let records = read_records(&mut open_input(&args.input)?)?;
    let override_spec = args
        .class
        .as_deref()
        .map(|c| {
            // The spec needs an n; records may differ, so build per record below.
            c.to_string()
        });
    let mut failures = 0usize;
    for record in &records {
        let mu = record.measure()?;
        let axioms = check_capacity_axioms(&mu, args.tol);
        if !axioms.pass {
            failures += 1;
            eprintln!(
                "record {}: capacity axioms violated by {:.3e}{}",
                record.index,
                axioms.worst_violation,
                axioms.witness.map(|w| format!(" ({w})")).unwrap_or_default()
            );
            continue;
        }
        if let Some(class) = &override_spec {
            let spec = class_spec(
                record.n,
                class,
                args.k,
                args.interaction,
                args.partition.as_deref(),
            )?;
            let report = check_class(&mu, &spec, args.tol);
            if !report.pass {
                failures += 1;
                eprintln!(
                    "record {}: {} violated by {:.3e}{}",
                    record.index,
                    report.label,
                    report.worst_violation,
                    report.witness.map(|w| format!(" ({w})")).unwrap_or_default()
                );
            }
        } else {
            for tag in record.parsed_tags()? {
                let report = check_tag(&mu, &tag, args.tol);
                if !report.pass {
                    failures += 1;
                    eprintln!(
                        "record {}: tag {tag} violated by {:.3e}{}",
                        record.index,
                        report.worst_violation,
                        report.witness.map(|w| format!(" ({w})")).unwrap_or_default()
                    );
                }
            }
        }
    }
    println!("{} records, {} failures", records.len(), failures);
    if failures > 0 {
        Err(CliError::Verification(format!("{failures} violations")))
    } else {
        Ok(())
    }
}

pub fn cmd_dual(args: &DualArgs) -> Result<(), CliError> {
    let records = read_records(&mut open_input(&args.input)?)?;
    let mut out = open_output(args.out.as_deref())?;
    write_header(&mut out)?;
    for record in &records {
        let mu = record.measure()?;
        let dual = mu.dual();
        let mut tags = Vec::new();
        for tag in record.parsed_tags()? {
            let Some(mapped) = dual_tag(&tag) else {
                continue;
            };
            let report = check_tag(&dual, &mapped, args.tol);
            if !report.pass {
                return Err(CliError::Verification(format!(
                    "record {}: dual tag {mapped} violated by {:.3e}",
                    record.index, report.worst_violation
                )));
            }
            tags.push(mapped.to_string());
        }
        let dual_record = CapacityRecord {
            index: record.index,
            n: record.n,
            values: dual.values().to_vec(),
            tags,
            params: RecordParams {
                class: format!("dual:{}", record.params.class),
                ..record.params.clone()
            },
            seed: record.seed,
            generator_version: env!("CARGO_PKG_VERSION").to_string(),
        };
        write_record(&mut out, &dual_record)?;
    }
    out.flush().map_err(CliError::io)
}

pub fn cmd_enumerate(args: &EnumerateArgs) -> Result<(), CliError> {
    let mut out = open_output(args.out.as_deref())?;
    if args.count_only {
        let count = count_extensions(args.n).map_err(CliError::from)?;
        writeln!(out, "{count}").map_err(CliError::io)?;
    } else {
        for ext in enumerate_extensions(args.n).map_err(CliError::from)? {
            let line = serde_json::to_string(ext.order()).map_err(CliError::json)?;
            writeln!(out, "{line}").map_err(CliError::io)?;
        }
    }
    out.flush().map_err(CliError::io)
}

pub fn cmd_experiment(args: &ExperimentArgs) -> Result<(), CliError> {
    if args.n_min < 2 || args.n_max < args.n_min {
        return Err(CliError::Infeasible(format!(
            "bad n range {}..={}",
            args.n_min, args.n_max
        )));
    }
    let rows = experiment::run_rows(args.n_min, args.n_max, args.num, args.iterations, args.seed)?;
    let mut out = open_output(args.out.as_deref())?;
    match args.format.as_str() {
        "json" => {
            for r in &rows {
                let obj = serde_json::json!({
                    "n": r.n,
                    "num": r.num,
                    "iterations": r.iterations,
                    "rep": r.baseline,
                    "alg1": r.adjusted,
                    "rw": r.walks,
                });
                writeln!(out, "{obj}").map_err(CliError::io)?;
            }
        }
        _ => {
            write!(out, "{}", experiment::to_csv(&rows)).map_err(CliError::io)?;
        }
    }
    out.flush().map_err(CliError::io)
}
