use std::fs;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use attrib_core::axioms::{check_axiom_with_tol, Axiom, InstanceGenerator, DEFAULT_AXIOM_TOL};
use attrib_core::model::presets::{preset, procurement_snapshot};
use attrib_core::model::{method_from_id, mix_effects_demo, parse_snapshots, run_report, DagModel, ModelSpec};
use attrib_core::{AttribError, QuadratureConfig};

const EXIT_INPUT: u8 = 2;
const EXIT_NONCONVERGED: u8 = 3;
const EXIT_AXIOM_FAILED: u8 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportKind {
    Text,
    Machine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Demo {
    MixEffects,
}

/// Attribute the change in a model's output between two snapshots to its input variables.
#[derive(Debug, Parser)]
#[command(name = "attrib", version)]
struct Cli {
    /// Model spec file.
    #[arg(long, value_name = "PATH", conflicts_with_all = ["dag", "preset"])]
    model: Option<String>,
    /// DAG model file.
    #[arg(long, value_name = "PATH", conflicts_with = "preset")]
    dag: Option<String>,
    /// Built-in model: procurement, spend, portfolio, basketball, mix-effects, website.
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    /// Positions, assets or players for the spend, portfolio and basketball presets.
    #[arg(long, value_name = "N")]
    size: Option<usize>,
    /// Snapshot CSV with rows `entity,variable,initial,final`.
    #[arg(long, value_name = "PATH")]
    values: Option<String>,
    /// ass, ss-brute, as-numeric, naive, value-variant or random-order:<weights-file>.
    #[arg(long, value_name = "ID", default_value = "ass")]
    method: String,
    /// Quadrature tolerance for as-numeric; violation tolerance for --axiom-suite.
    #[arg(long, value_name = "X")]
    tol: Option<f64>,
    /// Seed for --axiom-suite instances.
    #[arg(long, value_name = "N", default_value_t = 0x5eed_a771)]
    seed: u64,
    /// Trials per axiom for --axiom-suite.
    #[arg(long, value_name = "N", default_value_t = 200)]
    trials: usize,
    #[arg(long, value_enum, default_value = "text")]
    report: ReportKind,
    /// Check the attribution axioms against --method and print verdicts.
    #[arg(long)]
    axiom_suite: bool,
    #[arg(long, value_enum)]
    demo: Option<Demo>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("attrib: {e}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn load_model(cli: &Cli) -> Result<Option<ModelSpec>, AttribError> {
    if let Some(path) = &cli.model {
        let text = fs::read_to_string(path).map_err(|e| AttribError::Io(format!("{path}: {e}")))?;
        return ModelSpec::parse(&text).map(Some);
    }
    if let Some(path) = &cli.dag {
        let text = fs::read_to_string(path).map_err(|e| AttribError::Io(format!("{path}: {e}")))?;
        return DagModel::parse(&text)?.compile().map(Some);
    }
    cli.preset.as_deref().map(|p| preset(p, cli.size)).transpose()
}

fn run(cli: &Cli) -> Result<ExitCode, AttribError> {
    if let Some(Demo::MixEffects) = cli.demo {
        print!("{}", mix_effects_demo());
        return Ok(ExitCode::SUCCESS);
    }
    let quadrature = match cli.tol {
        Some(t) if !cli.axiom_suite => QuadratureConfig::with_tol(t),
        _ => QuadratureConfig::default(),
    };
    quadrature.validate()?;
    let model = load_model(cli)?;

    if cli.axiom_suite {
        let names = model.unwrap_or_else(|| preset("procurement", None).expect("static model"));
        let method = method_from_id(&cli.method, &names, quadrature)?;
        let tol = cli.tol.unwrap_or(DEFAULT_AXIOM_TOL);
        let gen = InstanceGenerator::with_seed(cli.seed);
        let mut all_pass = true;
        for axiom in Axiom::ALL {
            let v = check_axiom_with_tol(method.as_ref(), axiom, &gen, cli.trials, tol);
            all_pass &= v.pass;
            match cli.report {
                ReportKind::Text => println!("{v}"),
                ReportKind::Machine => println!("{}", serde_json::to_string(&v).expect("plain data")),
            }
        }
        return Ok(if all_pass {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(EXIT_AXIOM_FAILED)
        });
    }

    let model = model.ok_or_else(|| AttribError::Input("one of --model, --dag or --preset is required".into()))?;
    let snaps = match &cli.values {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| AttribError::Io(format!("{path}: {e}")))?;
            parse_snapshots(&text)?
        }
        None if cli.preset.as_deref() == Some("procurement") => vec![procurement_snapshot()],
        None => return Err(AttribError::Input("--values is required".into())),
    };
    let method = method_from_id(&cli.method, &model, quadrature)?;
    let reports = snaps
        .iter()
        .map(|s| run_report(&model, s, method.as_ref()))
        .collect::<Result<Vec<_>, _>>()?;
    let mut converged = true;
    for (k, rep) in reports.iter().enumerate() {
        converged &= rep.converged;
        match cli.report {
            ReportKind::Text => {
                if k > 0 {
                    println!();
                }
                print!("{}", rep.to_text());
            }
            ReportKind::Machine => print!("{}", rep.to_machine()),
        }
    }
    Ok(if converged {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_NONCONVERGED)
    })
}
