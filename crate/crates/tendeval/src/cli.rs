//! The `tendeval` command line.
//!
//! Exit status is 0 on success, 1 for usage and input errors and 2 when a
//! computation degenerates (zero denominator, no valid pair, ...). Paths of
//! written files go to stdout, diagnostics to stderr.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;
use tendeval_core::alignment::{bae_with, SimilarityKind, SimilarityMatrix};
use tendeval_core::sim::{
    baseline_consensus_labels, baseline_random_features, baseline_random_labels, baseline_uniform_features, gen_corpus,
    SynthConfig,
};
use tendeval_core::traditional::traditional;
use tendeval_core::{
    agreement_clusters, classical_mds, comprehensiveness, consistency_matrix, dic, ground_truth_similarity,
    importance_correlation, model_similarity, procrustes_align, to_dissimilarity, AgreementClusters, AnnotationSet,
    ConsistencyMatrix, Embedding2D, LabelDomain, LabelRecord, DEFAULT_CLUSTER_THRESHOLD, DEFAULT_MIN_OVERLAP,
};

use crate::io::{self, IoError};
use crate::report::{CoordPoint, CoordsFile, EvalReport, ProcrustesInfo, ReportMatrix, SCHEMA_VERSION, TOOL_VERSION};
use crate::svg::{self, RenderError};

const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (report schema 1)");

#[derive(Debug, Parser)]
#[command(name = "tendeval", version = VERSION, about = "Annotator tendency evaluation: DIC, BAE and friends")]
pub struct Cli {
    /// JSON object of flag values inserted after the subcommand; flags given
    /// on the command line win.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Print scores to stderr (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Distance between annotation and prediction consistency matrices.
    #[command(args_override_self = true)]
    Dic(DicArgs),
    /// Behavior alignment of feature and attention similarity with kappa.
    #[command(args_override_self = true)]
    Bae(BaeArgs),
    /// Accuracy, Fleiss' kappa and Pearson correlation.
    #[command(args_override_self = true)]
    Traditional(TraditionalArgs),
    /// Comprehensiveness of attention masking.
    #[command(args_override_self = true)]
    Comp(CompArgs),
    /// 2D projection of a report matrix.
    #[command(args_override_self = true)]
    Mds(MdsArgs),
    /// Ablation baselines from an annotation file.
    #[command(args_override_self = true)]
    Baseline(BaselineArgs),
    /// Seeded synthetic corpus with planted annotator clusters.
    #[command(args_override_self = true)]
    Synth(SynthArgs),
    /// Validate a report and render figures or a summary from it.
    #[command(args_override_self = true)]
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct LabelArgs {
    /// Label domain as a comma-separated list, e.g. `0,1,2,3,4`.
    #[arg(long, value_name = "LIST")]
    pub labels: Option<String>,
    /// Use the labels present in the inputs as the domain.
    #[arg(long, conflicts_with = "labels")]
    pub infer_labels: bool,
}

#[derive(Debug, Args)]
pub struct DicArgs {
    #[arg(long)]
    pub annotations: PathBuf,
    #[arg(long)]
    pub predictions: PathBuf,
    /// Minimum shared samples for a pairwise kappa.
    #[arg(long, default_value_t = DEFAULT_MIN_OVERLAP)]
    pub min_overlap: usize,
    #[arg(long)]
    pub out: PathBuf,
    /// Heatmap of the annotation consistency matrix.
    #[arg(long)]
    pub heatmap: Option<PathBuf>,
    /// Heatmap of the prediction consistency matrix.
    #[arg(long)]
    pub heatmap_pred: Option<PathBuf>,
    #[command(flatten)]
    pub labels: LabelArgs,
}

#[derive(Debug, Args)]
pub struct BaeArgs {
    #[arg(long)]
    pub annotations: PathBuf,
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long)]
    pub attentions: Option<PathBuf>,
    /// Model importance vectors (feature-line format) for the gradient
    /// correlation score.
    #[arg(long, requires = "importance_ref")]
    pub importance: Option<PathBuf>,
    /// Reference importance vectors keyed like `--importance`.
    #[arg(long, requires = "importance")]
    pub importance_ref: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MIN_OVERLAP)]
    pub min_overlap: usize,
    /// Min-max rescale both matrices over the joint mask before comparing.
    #[arg(long)]
    pub normalize: bool,
    #[arg(long)]
    pub out: PathBuf,
    /// Scatter plot of the feature-level projection.
    #[arg(long)]
    pub mds: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_CLUSTER_THRESHOLD)]
    pub cluster_threshold: f64,
    #[command(flatten)]
    pub labels: LabelArgs,
}

#[derive(Debug, Args)]
pub struct TraditionalArgs {
    #[arg(long)]
    pub annotations: PathBuf,
    #[arg(long)]
    pub predictions: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub labels: LabelArgs,
}

#[derive(Debug, Args)]
pub struct CompArgs {
    #[arg(long)]
    pub annotations: PathBuf,
    #[arg(long)]
    pub pred_orig: PathBuf,
    /// Predictions with the highest-attention regions masked.
    #[arg(long)]
    pub pred_masked: PathBuf,
    /// Predictions with random regions masked.
    #[arg(long)]
    pub pred_random: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub labels: LabelArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    True,
    Pred,
    Feature,
    Region,
}

impl Which {
    fn key(self) -> &'static str {
        match self {
            Which::True => "true",
            Which::Pred => "pred",
            Which::Feature => "feature",
            Which::Region => "region",
        }
    }
}

#[derive(Debug, Args)]
pub struct MdsArgs {
    /// Report produced by `dic` or `bae`.
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long, value_enum)]
    pub which: Which,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_CLUSTER_THRESHOLD)]
    pub cluster_threshold: f64,
    /// Coordinates file to rotate, scale and translate onto.
    #[arg(long)]
    pub align_to: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BaselineKind {
    Random,
    Consensus,
    UniformFeat,
    RandomFeat,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    #[arg(long, value_enum)]
    pub kind: BaselineKind,
    /// Annotations supplying the keys (label kinds) or annotators (feature
    /// kinds).
    #[arg(long)]
    pub annotations: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Feature dimension for the feature kinds.
    #[arg(long, default_value_t = 512)]
    pub dim: usize,
    #[command(flatten)]
    pub labels: LabelArgs,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = SynthConfig::default().annotators)]
    pub annotators: usize,
    #[arg(long, default_value_t = SynthConfig::default().clusters)]
    pub clusters: usize,
    #[arg(long, default_value_t = SynthConfig::default().samples)]
    pub samples: usize,
    /// Number of labels; the domain is `0..labels`.
    #[arg(long, default_value_t = SynthConfig::default().labels)]
    pub labels: u32,
    /// Annotator switch probability.
    #[arg(long, default_value_t = SynthConfig::default().annotator_noise)]
    pub noise: f64,
    /// Prediction switch probability.
    #[arg(long, default_value_t = SynthConfig::default().model_noise)]
    pub model_noise: f64,
    /// Probability that a cluster's latent label equals the shared
    /// reference label.
    #[arg(long, default_value_t = SynthConfig::default().shared_truth)]
    pub shared_truth: f64,
    #[arg(long, default_value_t = SynthConfig::default().feature_dim)]
    pub feature_dim: usize,
    #[arg(long, default_value_t = SynthConfig::default().feature_noise)]
    pub feature_noise: f64,
    #[arg(long, default_value_t = SynthConfig::default().regions)]
    pub regions: usize,
    #[arg(long, default_value_t = SynthConfig::default().coverage)]
    pub coverage: f64,
    #[arg(long, default_value_t = SynthConfig::default().seed)]
    pub seed: u64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub report: PathBuf,
    /// Matrix to draw with `--heatmap`.
    #[arg(long, value_enum, default_value = "true")]
    pub which: Which,
    #[arg(long)]
    pub heatmap: Option<PathBuf>,
    /// Coordinates file to draw with `--scatter`.
    #[arg(long, requires = "scatter")]
    pub coords: Option<PathBuf>,
    #[arg(long, requires = "coords")]
    pub scatter: Option<PathBuf>,
    /// Markdown table of every score in the report.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("invalid input: {0}")]
    Input(tendeval_core::Error),
    #[error("computation failed: {0}")]
    Compute(tendeval_core::Error),
    #[error(transparent)]
    Render(#[from] RenderError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Compute(_) => 2,
            _ => 1,
        }
    }
}

impl From<tendeval_core::Error> for CliError {
    fn from(e: tendeval_core::Error) -> Self {
        if e.is_computational() {
            CliError::Compute(e)
        } else {
            CliError::Input(e)
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Parses `args` (program name first), runs the subcommand and returns the
/// exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match execute(&cli) {
        Ok(written) => {
            for p in written {
                println!("{}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

const SUBCOMMANDS: [&str; 8] = ["dic", "bae", "traditional", "comp", "mds", "baseline", "synth", "report"];

/// Splices the flags of a `--config` file in right after the subcommand so
/// that later command-line occurrences override them.
fn expand_config(args: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let mut config = None;
    let mut sub_at = None;
    let mut k = 1;
    while k < args.len() {
        let a = args[k].to_string_lossy();
        if a == "--" {
            break;
        }
        if a == "--config" {
            config = args.get(k + 1).map(PathBuf::from);
            k += 2;
            continue;
        }
        if let Some(p) = a.strip_prefix("--config=") {
            config = Some(PathBuf::from(p));
        } else if sub_at.is_none() && SUBCOMMANDS.contains(&a.as_ref()) {
            sub_at = Some(k);
        }
        k += 1;
    }
    let (Some(path), Some(at)) = (config, sub_at) else {
        return Ok(args);
    };
    let value: Value = io::read_json(&path)?;
    let Value::Object(map) = value else {
        return Err(CliError::Usage(format!("{}: config must be a JSON object", path.display())));
    };
    let mut extra: Vec<OsString> = Vec::new();
    for (key, v) in map {
        let flag = format!("--{}", key.replace('_', "-"));
        if flag == "--config" {
            return Err(CliError::Usage(format!("{}: config files cannot nest", path.display())));
        }
        let text = match v {
            Value::Null | Value::Bool(false) => continue,
            Value::Bool(true) => {
                extra.push(flag.into());
                continue;
            }
            Value::String(s) => s,
            Value::Number(n) => n.to_string(),
            Value::Array(items) => items
                .iter()
                .map(|i| match i {
                    Value::String(s) => Ok(s.clone()),
                    Value::Number(n) => Ok(n.to_string()),
                    _ => Err(CliError::Usage(format!("{}: `{key}` must list strings or numbers", path.display()))),
                })
                .collect::<CliResult<Vec<_>>>()?
                .join(","),
            Value::Object(_) => {
                return Err(CliError::Usage(format!("{}: `{key}` cannot be an object", path.display())));
            }
        };
        extra.push(flag.into());
        extra.push(text.into());
    }
    let mut out = args;
    out.splice(at + 1..at + 1, extra);
    Ok(out)
}

fn execute(cli: &Cli) -> CliResult<Vec<PathBuf>> {
    let mut ctx = Ctx { verbose: cli.verbose, written: Vec::new() };
    match &cli.command {
        Command::Dic(a) => cmd_dic(&mut ctx, a)?,
        Command::Bae(a) => cmd_bae(&mut ctx, a)?,
        Command::Traditional(a) => cmd_traditional(&mut ctx, a)?,
        Command::Comp(a) => cmd_comp(&mut ctx, a)?,
        Command::Mds(a) => cmd_mds(&mut ctx, a)?,
        Command::Baseline(a) => cmd_baseline(&mut ctx, a)?,
        Command::Synth(a) => cmd_synth(&mut ctx, a)?,
        Command::Report(a) => cmd_report(&mut ctx, a)?,
    }
    Ok(ctx.written)
}

struct Ctx {
    verbose: u8,
    written: Vec<PathBuf>,
}

impl Ctx {
    fn write_text(&mut self, path: &Path, text: &str) -> CliResult<()> {
        std::fs::write(path, text).map_err(|source| IoError::Write { path: path.to_owned(), source })?;
        self.written.push(path.to_owned());
        Ok(())
    }

    fn write_report(&mut self, path: &Path, report: &EvalReport) -> CliResult<()> {
        if self.verbose > 0 {
            eprint!("{}", summary_markdown(report));
        }
        io::write_json(path, report)?;
        self.written.push(path.to_owned());
        Ok(())
    }
}

fn path_value(p: &Path) -> Value {
    Value::String(p.display().to_string())
}

fn parse_domain(list: &str) -> CliResult<LabelDomain> {
    let labels = list
        .split(',')
        .map(|s| s.trim().parse::<u32>().map_err(|_| CliError::Usage(format!("--labels: `{s}` is not a label"))))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(LabelDomain::new(labels)?)
}

/// Loads label files against one shared domain.
fn load_labels(args: &LabelArgs, paths: &[&Path], report: &mut EvalReport) -> CliResult<Vec<AnnotationSet>> {
    let records: Vec<Vec<LabelRecord>> = paths.iter().map(|p| io::read_label_records(p)).collect::<Result<_, _>>()?;
    let domain = match &args.labels {
        Some(list) => {
            report.echo("label_domain_source", "explicit");
            parse_domain(list)?
        }
        None => {
            if !args.infer_labels {
                report.warnings.push("label domain inferred from the input labels; pass --labels to fix it".into());
            }
            report.echo("label_domain_source", "inferred");
            AnnotationSet::infer_domain(records.iter().flatten())
                .map_err(|source| IoError::Invalid { path: paths[0].to_owned(), source })?
        }
    };
    report.echo("labels", domain.labels().to_vec());
    paths.iter().zip(records).map(|(p, r)| io::annotations_from(p, r, Some(&domain)).map_err(CliError::from)).collect()
}

fn degenerate_warnings(name: &str, m: &ConsistencyMatrix, report: &mut EvalReport) {
    for (a, b) in &m.degenerate_pairs {
        report.warnings.push(format!("{name}: kappa for {a}/{b} used the constant-label rule"));
    }
}

fn cmd_dic(ctx: &mut Ctx, a: &DicArgs) -> CliResult<()> {
    let mut report = EvalReport::new("dic");
    report.echo("annotations", path_value(&a.annotations));
    report.echo("predictions", path_value(&a.predictions));
    report.echo("tau", a.min_overlap);
    let sets = load_labels(&a.labels, &[&a.annotations, &a.predictions], &mut report)?;
    let mt = consistency_matrix(&sets[0], a.min_overlap)?;
    let mp = consistency_matrix(&sets[1], a.min_overlap)?;
    let result = dic(&mt, &mp)?;
    degenerate_warnings("true", &mt, &mut report);
    degenerate_warnings("pred", &mp, &mut report);
    if !result.excluded_pairs.is_empty() {
        report.warnings.push(format!("{} pairs excluded by the joint mask", result.excluded_pairs.len()));
    }
    if let Some(p) = &a.heatmap {
        ctx.write_text(p, &svg::heatmap_svg(&mt.matrix, &mt.annotators, "Annotation consistency (kappa)")?)?;
    }
    if let Some(p) = &a.heatmap_pred {
        ctx.write_text(p, &svg::heatmap_svg(&mp.matrix, &mp.annotators, "Prediction consistency (kappa)")?)?;
    }
    report.matrices.insert("true".into(), (&mt).into());
    report.matrices.insert("pred".into(), (&mp).into());
    report.scores.dic = Some(result);
    ctx.write_report(&a.out, &report)
}

fn cmd_bae(ctx: &mut Ctx, a: &BaeArgs) -> CliResult<()> {
    let mut report = EvalReport::new("bae");
    report.echo("annotations", path_value(&a.annotations));
    report.echo("features", path_value(&a.features));
    if let Some(p) = &a.attentions {
        report.echo("attentions", path_value(p));
    }
    report.echo("tau", a.min_overlap);
    report.echo("normalize", a.normalize);
    report.echo("cos_aggregation", "off_diagonal_mean");
    let ann = load_labels(&a.labels, &[&a.annotations], &mut report)?.remove(0);
    let truth = ground_truth_similarity(&ann, a.min_overlap)?;
    let feat = model_similarity(&io::load_features(&a.features)?)?;
    report.scores.bae_feature = Some(bae_with(&feat, &truth, a.normalize)?);
    report.scores.cos = Some(off_diagonal_mean(&feat));
    if let Some(p) = &a.attentions {
        let region = model_similarity(&io::load_attentions(p)?)?;
        report.scores.bae_region = Some(bae_with(&region, &truth, a.normalize)?);
        report.matrices.insert("region".into(), (&region).into());
    }
    if let (Some(imp), Some(reference)) = (&a.importance, &a.importance_ref) {
        report.echo("importance", path_value(imp));
        report.echo("importance_ref", path_value(reference));
        report.scores.grad = Some(importance_correlation(&io::load_features(imp)?, &io::load_features(reference)?)?);
    }
    if let Some(p) = &a.mds {
        report.echo("cluster_threshold", a.cluster_threshold);
        let (emb, clusters) = project(&feat, &truth, a.cluster_threshold)?;
        note_embedding("feature", &emb, &mut report.warnings);
        ctx.write_text(p, &svg::scatter_svg(&emb, &clusters, "Feature-level projection")?)?;
    }
    let cm = consistency_matrix(&ann, a.min_overlap)?;
    degenerate_warnings("true", &cm, &mut report);
    report.matrices.insert("true".into(), (&cm).into());
    report.matrices.insert("feature".into(), (&feat).into());
    ctx.write_report(&a.out, &report)
}

fn off_diagonal_mean(s: &SimilarityMatrix) -> f64 {
    let values: Vec<f64> = s.matrix.valid_pairs().map(|(_, _, v)| v).collect();
    tendeval_core::sum::sum(values.iter().copied()) / values.len() as f64
}

fn project(
    s: &SimilarityMatrix,
    cluster_source: &SimilarityMatrix,
    threshold: f64,
) -> CliResult<(Embedding2D, AgreementClusters)> {
    if !(-1.0..=1.0).contains(&threshold) {
        return Err(CliError::Usage(format!("--cluster-threshold {threshold} is outside [-1, 1]")));
    }
    let emb = classical_mds(&to_dissimilarity(s)?)?;
    let clusters = agreement_clusters(cluster_source, threshold);
    if clusters.annotators != emb.annotators {
        return Err(tendeval_core::Error::AnnotatorMismatch.into());
    }
    Ok((emb, clusters))
}

fn note_embedding(name: &str, e: &Embedding2D, warnings: &mut Vec<String>) {
    for (a, b) in &e.imputed {
        warnings.push(format!("{name}: dissimilarity for {a}/{b} imputed with the mean"));
    }
    if e.floored_negative_eigenvalue {
        warnings.push(format!("{name}: negative eigenvalue floored at zero; the input is not Euclidean"));
    }
}

fn cmd_traditional(ctx: &mut Ctx, a: &TraditionalArgs) -> CliResult<()> {
    let mut report = EvalReport::new("traditional");
    report.echo("annotations", path_value(&a.annotations));
    report.echo("predictions", path_value(&a.predictions));
    let sets = load_labels(&a.labels, &[&a.annotations, &a.predictions], &mut report)?;
    let t = traditional(&sets[0], &sets[1])?;
    report.warnings.push("PCC treats labels as ordinal reals; it is meaningless for nominal label sets".into());
    for id in &t.pearson_skipped {
        report.warnings.push(format!("PCC skipped for {id}: constant label sequence"));
    }
    report.scores.traditional = Some(t);
    ctx.write_report(&a.out, &report)
}

fn cmd_comp(ctx: &mut Ctx, a: &CompArgs) -> CliResult<()> {
    let mut report = EvalReport::new("comp");
    report.echo("annotations", path_value(&a.annotations));
    report.echo("pred_orig", path_value(&a.pred_orig));
    report.echo("pred_masked", path_value(&a.pred_masked));
    report.echo("pred_random", path_value(&a.pred_random));
    let sets = load_labels(&a.labels, &[&a.annotations, &a.pred_orig, &a.pred_masked, &a.pred_random], &mut report)?;
    report.scores.comp = Some(comprehensiveness(&sets[0], &sets[1], &sets[2], &sets[3])?);
    ctx.write_report(&a.out, &report)
}

fn load_report(path: &Path) -> CliResult<EvalReport> {
    let report: EvalReport = io::read_json(path)?;
    if report.schema_version != SCHEMA_VERSION {
        return Err(CliError::Usage(format!(
            "{}: report schema {} is not supported (expected {SCHEMA_VERSION})",
            path.display(),
            report.schema_version
        )));
    }
    Ok(report)
}

fn report_matrix<'a>(report: &'a EvalReport, which: Which, path: &Path) -> CliResult<&'a ReportMatrix> {
    report
        .matrices
        .get(which.key())
        .ok_or_else(|| CliError::Usage(format!("{}: report has no `{}` matrix", path.display(), which.key())))
}

fn cmd_mds(ctx: &mut Ctx, a: &MdsArgs) -> CliResult<()> {
    let report = load_report(&a.matrix)?;
    let chosen = SimilarityMatrix::from(report_matrix(&report, a.which, &a.matrix)?);
    let mut warnings = Vec::new();
    let (source_name, source) = match report.matrices.get("true") {
        Some(m) => ("true", SimilarityMatrix::from(m)),
        None => {
            warnings.push(format!("no `true` matrix; clusters use `{}`", a.which.key()));
            (a.which.key(), chosen.clone())
        }
    };
    if source.kind != SimilarityKind::GroundTruthKappa {
        warnings.push("clusters thresholded on cosine values, not kappa".into());
    }
    let (mut emb, clusters) = project(&chosen, &source, a.cluster_threshold)?;
    note_embedding(a.which.key(), &emb, &mut warnings);

    let mut procrustes = None;
    if let Some(p) = &a.align_to {
        let reference: CoordsFile = io::read_json(p)?;
        let target = emb
            .annotators
            .iter()
            .map(|id| {
                reference
                    .points
                    .iter()
                    .find(|q| &q.annotator == id)
                    .map(|q| [q.x, q.y])
                    .ok_or_else(|| CliError::Usage(format!("{}: no coordinates for annotator {id}", p.display())))
            })
            .collect::<CliResult<Vec<_>>>()?;
        if reference.points.len() != emb.annotators.len() {
            return Err(CliError::Usage(format!("{}: annotator sets differ", p.display())));
        }
        let fit = procrustes_align(&target, &emb.coords)?;
        emb.coords = fit.aligned.clone();
        procrustes = Some(ProcrustesInfo {
            reference: p.display().to_string(),
            disparity: fit.disparity,
            scale: fit.scale,
            reflected: fit.reflected,
        });
    }

    let coords = CoordsFile {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_owned(),
        which: a.which.key().to_owned(),
        stress: emb.stress,
        eigenvalues: emb.eigenvalues,
        cluster_threshold: a.cluster_threshold,
        cluster_source: source_name.to_owned(),
        points: emb
            .annotators
            .iter()
            .zip(&emb.coords)
            .zip(&clusters.assignment)
            .map(|((id, p), &c)| CoordPoint { annotator: id.clone(), x: p[0], y: p[1], cluster: c })
            .collect(),
        procrustes,
        warnings,
    };
    if let Some(p) = &a.svg {
        let title = format!("Projection of `{}`", a.which.key());
        ctx.write_text(p, &svg::scatter_svg(&emb, &clusters, &title)?)?;
    }
    io::write_json(&a.out, &coords)?;
    ctx.written.push(a.out.clone());
    Ok(())
}

fn cmd_baseline(ctx: &mut Ctx, a: &BaselineArgs) -> CliResult<()> {
    let mut scratch = EvalReport::new("baseline");
    let ann = load_labels(&a.labels, &[&a.annotations], &mut scratch)?.remove(0);
    match a.kind {
        BaselineKind::Random => io::save_annotations(&a.out, &baseline_random_labels(&ann, a.seed))?,
        BaselineKind::Consensus => io::save_annotations(&a.out, &baseline_consensus_labels(&ann))?,
        BaselineKind::UniformFeat => io::save_vectors(&a.out, &baseline_uniform_features(ann.annotators(), a.dim)?)?,
        BaselineKind::RandomFeat => {
            io::save_vectors(&a.out, &baseline_random_features(ann.annotators(), a.dim, a.seed)?)?
        }
    }
    if ctx.verbose > 0 {
        for w in &scratch.warnings {
            eprintln!("warning: {w}");
        }
    }
    ctx.written.push(a.out.clone());
    Ok(())
}

fn cmd_synth(ctx: &mut Ctx, a: &SynthArgs) -> CliResult<()> {
    let cfg = SynthConfig {
        annotators: a.annotators,
        samples: a.samples,
        clusters: a.clusters,
        labels: a.labels,
        annotator_noise: a.noise,
        model_noise: a.model_noise,
        shared_truth: a.shared_truth,
        feature_dim: a.feature_dim,
        feature_noise: a.feature_noise,
        regions: a.regions,
        coverage: a.coverage,
        seed: a.seed,
    };
    let corpus = gen_corpus(&cfg)?;
    let dir = &a.out_dir;
    std::fs::create_dir_all(dir).map_err(|source| IoError::Write { path: dir.clone(), source })?;
    let path = |name: &str| dir.join(name);
    io::save_annotations(&path("annotations.jsonl"), &corpus.annotations)?;
    io::save_annotations(&path("predictions.jsonl"), &corpus.predictions)?;
    io::save_vectors(&path("features.jsonl"), &corpus.features)?;
    io::save_vectors(&path("attentions.jsonl"), &corpus.attentions)?;
    io::write_json(&path("truth.json"), &corpus.truth)?;
    io::write_json(&path("config.json"), &cfg)?;
    for name in
        ["annotations.jsonl", "predictions.jsonl", "features.jsonl", "attentions.jsonl", "truth.json", "config.json"]
    {
        ctx.written.push(path(name));
    }
    Ok(())
}

fn cmd_report(ctx: &mut Ctx, a: &ReportArgs) -> CliResult<()> {
    let report = load_report(&a.report)?;
    if let Some(p) = &a.heatmap {
        let m = report_matrix(&report, a.which, &a.report)?;
        let title = format!("{} matrix", a.which.key());
        ctx.write_text(p, &svg::heatmap_svg(&m.matrix, &m.annotators, &title)?)?;
    }
    if let (Some(c), Some(p)) = (&a.coords, &a.scatter) {
        let coords: CoordsFile = io::read_json(c)?;
        let annotators: Vec<String> = coords.points.iter().map(|q| q.annotator.clone()).collect();
        let emb = Embedding2D {
            annotators: annotators.clone(),
            coords: coords.points.iter().map(|q| [q.x, q.y]).collect(),
            eigenvalues: coords.eigenvalues,
            stress: coords.stress,
            floored_negative_eigenvalue: false,
            imputed: Vec::new(),
        };
        let clusters = AgreementClusters {
            threshold: coords.cluster_threshold,
            annotators,
            assignment: coords.points.iter().map(|q| q.cluster).collect(),
        };
        let title = format!("Projection of `{}`", coords.which);
        ctx.write_text(p, &svg::scatter_svg(&emb, &clusters, &title)?)?;
    }
    if let Some(p) = &a.summary {
        ctx.write_text(p, &summary_markdown(&report))?;
    }
    Ok(())
}

/// Markdown table of the scalar scores, followed by the warnings.
pub fn summary_markdown(report: &EvalReport) -> String {
    let s = &report.scores;
    let mut rows: Vec<(&str, f64)> = Vec::new();
    if let Some(d) = &s.dic {
        rows.push(("DIC", d.score));
    }
    if let Some(b) = &s.bae_feature {
        rows.push(("BAE (feature)", b.score));
    }
    if let Some(b) = &s.bae_region {
        rows.push(("BAE (region)", b.score));
    }
    if let Some(t) = &s.traditional {
        rows.push(("ACC", t.accuracy));
        rows.push(("FK", t.fleiss_kappa));
        if let Some(p) = t.pearson {
            rows.push(("PCC", p));
        }
    }
    if let Some(c) = s.cos {
        rows.push(("Cos", c));
    }
    if let Some(g) = s.grad {
        rows.push(("Grad", g));
    }
    if let Some(c) = &s.comp {
        rows.push(("Comp", c.comp));
        rows.push(("Comp vs random", c.delta_vs_random));
    }
    let mut out = format!("# tendeval {} report\n\n| score | value |\n|---|---|\n", report.command);
    for (name, v) in rows {
        let _ = writeln!(out, "| {name} | {v:.4} |");
    }
    if !report.warnings.is_empty() {
        out.push_str("\nWarnings:\n\n");
        for w in &report.warnings {
            let _ = writeln!(out, "- {w}");
        }
    }
    out
}
