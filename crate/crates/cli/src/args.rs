use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "topofilt", version, about = "Persistent homology of finite metric spaces via finite topologies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute persistence diagrams for every degree up to --max-degree.
    Compute(ComputeArgs),
    /// Report the stage at one scale: poset, core, Betti numbers, crosscut check.
    Snapshot(SnapshotArgs),
    /// Perturb the input repeatedly and compare bottleneck distances with the stability bound.
    Stability(StabilityArgs),
    /// Write a DOT, facet-list or SVG view of one stage or of the diagrams.
    Export(ExportArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MetricArg {
    Euclidean,
    Manhattan,
    Chebyshev,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Order,
    CrosscutAuto,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WhatArg {
    Poset,
    Core,
    Complex,
    DiagramSvg,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// CSV distance matrix, or point coordinates with --points.
    #[arg(long)]
    pub input: PathBuf,
    /// Treat the input as one point per row.
    #[arg(long)]
    pub points: bool,
    /// Metric used with --points.
    #[arg(long, value_enum, default_value_t = MetricArg::Euclidean)]
    pub metric: MetricArg,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// Neighbour rank for the sparsity estimate.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Weight of the density term; 0 gives single linkage.
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    pub lambda: f64,
    /// Prime coefficient field.
    #[arg(long, default_value_t = 2)]
    pub field: u32,
    #[arg(long, default_value_t = 2)]
    pub max_degree: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Order)]
    pub mode: ModeArg,
    /// Worker threads (default: available cores).
    #[arg(long)]
    pub parallel: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    pub format: FormatArg,
    /// Artifact path; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SnapshotArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub t: f64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: f64,
    #[arg(long)]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Scale the bound before judging the report; for exercising the failure path.
    #[arg(long, hide = true, default_value_t = 1.0)]
    pub debug_bound_scale: f64,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    /// Scale of the stage to export (not needed for diagram-svg).
    #[arg(long, allow_negative_numbers = true)]
    pub t: Option<f64>,
    #[arg(long, value_enum)]
    pub what: WhatArg,
    #[arg(long)]
    pub output: PathBuf,
}
