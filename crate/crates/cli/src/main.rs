mod args;
mod render;

use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use topofilt::criteria::CriterionConfig;
use topofilt::field::FieldSpec;
use topofilt::metric::{distances_from_points, parse_distance_csv, parse_point_csv, DistanceMatrix, MetricName};
use topofilt::pipeline::{persistence, snapshot, stability_experiment, ComplexMode, PipelineConfig};
use topofilt::Error;

use args::{Cli, Command, FormatArg, InputArgs, MetricArg, ModeArg, PipelineArgs, WhatArg};

const CAP_ENV: &str = "TOPOFILT_CAP_SIMPLICES";

#[derive(Debug, Clone, Copy)]
enum Failure {
    Internal = 1,
    Usage = 2,
    Input = 3,
    Cap = 4,
    Unstable = 5,
}

impl Failure {
    fn tag(self) -> &'static str {
        match self {
            Failure::Internal => "internal",
            Failure::Usage => "invalid-argument",
            Failure::Input => "invalid-input",
            Failure::Cap => "complexity-cap",
            Failure::Unstable => "stability-violation",
        }
    }
}

struct CliError {
    kind: Failure,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self { kind: Failure::Usage, message: message.into() }
    }

    fn input(message: impl Into<String>) -> Self {
        Self { kind: Failure::Input, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let kind = match e {
            Error::NonSquare { .. }
            | Error::AsymmetryBeyondTolerance { .. }
            | Error::NegativeEntry { .. }
            | Error::NonzeroDiagonal { .. }
            | Error::DimensionMismatch { .. }
            | Error::EmptyInput
            | Error::Parse(_) => Failure::Input,
            Error::KOutOfRange { .. } | Error::InvalidParameter(_) | Error::NotPrime(_) => Failure::Usage,
            Error::ComplexityCapExceeded { .. } => Failure::Cap,
            _ => Failure::Internal,
        };
        Self { kind, message: e.to_string() }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let first = e.to_string();
            let line = first.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error[{}]: {line}", Failure::Usage.tag());
            return ExitCode::from(Failure::Usage as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {}", e.kind.tag(), e.message.replace('\n', " "));
            ExitCode::from(e.kind as u8)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Compute(a) => {
            let (d, cfg) = prepare(&a.input, &a.pipeline)?;
            let result = persistence(&d, &cfg)?;
            for w in &result.warnings {
                eprintln!("warning: {w}");
            }
            let artifact = match a.format {
                FormatArg::Json => result.diagrams.to_json(),
                FormatArg::Csv => result.diagrams.to_csv(),
            };
            let s = &result.summary;
            let counts: Vec<String> = s.points_per_degree.iter().enumerate().map(|(n, c)| format!("H{n}={c}")).collect();
            let summary = format!(
                "stages={} distinct={} simplices={} points: {}",
                s.stages,
                s.distinct_stages,
                s.total_simplices,
                counts.join(" ")
            );
            match &a.output {
                Some(path) => {
                    write_file(path, &artifact)?;
                    println!("{summary}");
                }
                None => {
                    print!("{artifact}");
                    eprintln!("{summary}");
                }
            }
            Ok(())
        }
        Command::Snapshot(a) => {
            check_scale(a.t)?;
            let (d, cfg) = prepare(&a.input, &a.pipeline)?;
            let report = snapshot(&d, &cfg, a.t)?;
            if report.disagreement {
                eprintln!("warning: crosscut and order complex Betti numbers disagree at t = {}", report.t_stage);
            }
            emit(a.output.as_deref(), &pretty(&render::snapshot_json(&report, d.labels())))
        }
        Command::Stability(a) => {
            if !(a.epsilon >= 0.0) || !a.epsilon.is_finite() {
                return Err(CliError::usage(format!("--epsilon must be finite and >= 0, got {}", a.epsilon)));
            }
            if a.trials == 0 {
                return Err(CliError::usage("--trials must be >= 1"));
            }
            let (d, cfg) = prepare(&a.input, &a.pipeline)?;
            let report = stability_experiment(&d, &cfg, a.epsilon, a.trials, a.seed)?;
            let report = if a.debug_bound_scale != 1.0 {
                let bound = report.bound * a.debug_bound_scale;
                report.judged_against(bound)
            } else {
                report
            };
            emit(a.output.as_deref(), &pretty(&render::stability_json(&report)))?;
            if report.pass {
                Ok(())
            } else {
                Err(CliError {
                    kind: Failure::Unstable,
                    message: format!("bottleneck distance exceeds the bound {}", report.bound),
                })
            }
        }
        Command::Export(a) => {
            let t = match (a.what, a.t) {
                (WhatArg::DiagramSvg, _) => None,
                (_, Some(t)) => Some(t),
                (_, None) => return Err(CliError::usage("--t is required for poset, core and complex exports")),
            };
            if let Some(t) = a.t {
                check_scale(t)?;
            }
            let (d, cfg) = prepare(&a.input, &a.pipeline)?;
            let text = match t {
                None => render::diagram_svg(&persistence(&d, &cfg)?.diagrams),
                Some(t) => {
                    let report = snapshot(&d, &cfg, t)?;
                    let names = render::element_names(&report.quotient.poset, d.labels());
                    match a.what {
                        WhatArg::Poset => render::hasse_dot("poset", &report.quotient.poset, &names),
                        WhatArg::Core => {
                            let core_names: Vec<String> =
                                report.core.inclusion.assignment().iter().map(|&x| names[x].clone()).collect();
                            render::hasse_dot("core", &report.core.core, &core_names)
                        }
                        WhatArg::Complex => report.complex.to_facet_list(),
                        WhatArg::DiagramSvg => unreachable!("handled above"),
                    }
                }
            };
            write_file(&a.output, &text)
        }
    }
}

fn check_scale(t: f64) -> CliResult<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(CliError::usage(format!("--t must be finite and >= 0, got {t}")))
    }
}

fn prepare(input: &InputArgs, p: &PipelineArgs) -> CliResult<(DistanceMatrix, PipelineConfig)> {
    // flags are checked before touching the input
    if !(p.lambda >= 0.0) || !p.lambda.is_finite() {
        return Err(CliError::usage(format!("--lambda must be finite and >= 0, got {}", p.lambda)));
    }
    if p.k == 0 {
        return Err(CliError::usage("--k must be >= 1"));
    }
    let field = FieldSpec::new(p.field)?;
    let mut cfg = PipelineConfig {
        criterion: CriterionConfig::new(p.k, p.lambda)?,
        field,
        max_degree: p.max_degree,
        mode: match p.mode {
            ModeArg::Order => ComplexMode::Order,
            ModeArg::CrosscutAuto => ComplexMode::CrosscutAuto,
        },
        ..PipelineConfig::default()
    };
    if let Ok(raw) = std::env::var(CAP_ENV) {
        cfg.caps.simplices = raw
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("{CAP_ENV} must be a positive integer, got '{raw}'")))?;
    }
    if let Some(n) = p.parallel {
        if n == 0 {
            return Err(CliError::usage("--parallel must be >= 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError { kind: Failure::Internal, message: e.to_string() })?;
    }

    let text = fs::read_to_string(&input.input)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", input.input.display())))?;
    let d = if input.points {
        let metric = match input.metric {
            MetricArg::Euclidean => MetricName::Euclidean,
            MetricArg::Manhattan => MetricName::Manhattan,
            MetricArg::Chebyshev => MetricName::Chebyshev,
        };
        distances_from_points(&parse_point_csv(&text, metric)?)?
    } else {
        let loaded = parse_distance_csv(&text)?;
        if loaded.triangle_violation_count > 0 {
            eprintln!(
                "warning: input violates the triangle inequality for {} triples",
                loaded.triangle_violation_count
            );
        }
        loaded.matrix
    };
    if p.k >= d.len() {
        return Err(Error::KOutOfRange { k: p.k, n: d.len() }.into());
    }
    Ok((d, cfg))
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialise");
    s.push('\n');
    s
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
}

fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => write_file(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| CliError { kind: Failure::Internal, message: e.to_string() })
        }
    }
}
