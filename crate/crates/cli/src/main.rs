use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use rfscene::annotate::{annotate_nist_records, format_labels, read_labels, read_nist_metadata};
use rfscene::dataset::{generate, ground_truth, read_manifest, ConfigOverrides, ManifestRow};
use rfscene::eval::{map_suite, read_predictions, write_report, Summary};
use rfscene::spectrogram::{burn_boxes, encode_png, read_grid};
use rfscene::{Environment, Error, PresetSize, Split};

#[derive(Parser)]
#[command(name = "rfscene", version, about = "Synthetic wideband radar detection datasets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a dataset
    Gen(GenArgs),
    /// Re-render a frame's PNG from its raw grid
    Render(RenderArgs),
    /// Score a prediction file against a generated split
    Eval(EvalArgs),
    /// Print a frame's manifest row and labels
    Inspect(InspectArgs),
    /// Write label files from NIST-style emitter metadata
    NistAnnotate(NistArgs),
}

#[derive(Args)]
struct GenArgs {
    /// key=value config file; flags override its entries
    #[arg(long)]
    config: Option<PathBuf>,
    /// Scene density: 1t or 9t
    #[arg(long)]
    env: Option<Environment>,
    /// Comma-separated presets, e.g. S,M,L
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    frames: Option<usize>,
    #[arg(long)]
    train: Option<usize>,
    #[arg(long)]
    val: Option<usize>,
    #[arg(long)]
    test: Option<usize>,
    /// Comma-separated SNR levels in dB
    #[arg(long, allow_hyphen_values = true)]
    snr: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, env = "RFSCENE_OUT")]
    out: Option<PathBuf>,
    /// Also write raw I/Q frames
    #[arg(long)]
    iq: bool,
    /// Also write raw spectrogram grids (needed by `render`)
    #[arg(long)]
    grids: bool,
    /// Worker threads (0 = all cores)
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct FrameRef {
    /// Dataset root containing manifest.csv
    #[arg(long)]
    root: PathBuf,
    #[arg(long)]
    frame: String,
    #[arg(long, default_value = "S")]
    preset: PresetSize,
}

#[derive(Args)]
struct RenderArgs {
    #[command(flatten)]
    frame: FrameRef,
    /// Outline the labelled boxes
    #[arg(long)]
    boxes: bool,
    /// Output PNG (defaults to <root>/renders/<frame>_<preset>.png)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Lines of `frame_id class_id confidence x_c y_c w h`
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    root: PathBuf,
    #[arg(long, default_value = "test")]
    split: Split,
    #[arg(long, default_value = "S")]
    preset: PresetSize,
    /// Results CSV (defaults to <root>/eval_<split>_<preset>.csv)
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct InspectArgs {
    #[command(flatten)]
    frame: FrameRef,
}

#[derive(Args)]
struct NistArgs {
    /// CSV with header frame_id,class,t_s,f_c,t_pw,b_chirp,f_prf,n
    #[arg(long)]
    metadata: PathBuf,
    /// Directory for the label files
    #[arg(long)]
    out: PathBuf,
}

fn cmd_gen(args: GenArgs) -> anyhow::Result<()> {
    let file = match &args.config {
        Some(path) => ConfigOverrides::read(path)?,
        None => ConfigOverrides::default(),
    };
    let flags = ConfigOverrides::parse(&flag_text(&args), "command line")?;
    let mut merged = file.merge(flags);
    if let Some(out) = args.out {
        merged.out = Some(out);
    }
    let config = merged.resolve()?;

    let summary = generate(&config)?;
    println!("frames: {}", summary.rows.len());
    for (snr, n) in &summary.per_snr {
        println!("  snr {snr:>4} dB: {n}");
    }
    println!("elapsed: {:.2} s", summary.elapsed.as_secs_f64());
    println!("throughput: {:.2} frames/s", summary.frames_per_second());
    println!("output: {}", config.output_root.display());
    Ok(())
}

/// Re-expresses the flags in config-file syntax so both go through one parser.
fn flag_text(args: &GenArgs) -> String {
    let mut lines = Vec::new();
    if let Some(v) = args.env {
        lines.push(format!("env={}", v.tag()));
    }
    let pairs = [
        ("presets", args.preset.clone()),
        ("frames", args.frames.map(|v| v.to_string())),
        ("train", args.train.map(|v| v.to_string())),
        ("val", args.val.map(|v| v.to_string())),
        ("test", args.test.map(|v| v.to_string())),
        ("snr_levels", args.snr.clone()),
        ("seed", args.seed.map(|v| v.to_string())),
        ("workers", args.workers.map(|v| v.to_string())),
        ("iq", args.iq.then(|| "true".into())),
        ("grids", args.grids.then(|| "true".into())),
    ];
    for (k, v) in pairs {
        if let Some(v) = v {
            lines.push(format!("{k}={v}"));
        }
    }
    lines.join("\n")
}

fn find_row(root: &Path, frame: &str) -> anyhow::Result<ManifestRow> {
    let rows = read_manifest(&root.join("manifest.csv"))?;
    rows.into_iter()
        .find(|r| r.frame_id == frame)
        .with_context(|| format!("frame `{frame}` is not in {}", root.join("manifest.csv").display()))
}

fn label_path(root: &Path, row: &ManifestRow, preset: PresetSize) -> anyhow::Result<PathBuf> {
    match row.output(preset) {
        Some((_, label)) => Ok(root.join(label)),
        None => bail!("frame `{}` has no {preset} output", row.frame_id),
    }
}

fn cmd_render(args: RenderArgs) -> anyhow::Result<()> {
    let FrameRef { root, frame, preset } = &args.frame;
    let row = find_row(root, frame)?;
    let grid_path = root.join(format!(
        "{}/{preset}/{}/grids/{}.grid",
        row.env.tag(),
        row.split,
        row.frame_id
    ));
    let bytes = std::fs::read(&grid_path)
        .with_context(|| format!("{} (generate with --grids)", grid_path.display()))?;
    let grid = read_grid(&bytes)?;
    let mut px = grid.pixels();
    if args.boxes {
        let labels = read_labels(&label_path(root, &row, *preset)?)?;
        let boxes: Vec<_> = labels.iter().map(|a| a.bbox).collect();
        burn_boxes(&mut px, grid.dim_t, grid.dim_f, &boxes);
    }
    let out = args
        .out
        .unwrap_or_else(|| root.join("renders").join(format!("{frame}_{preset}.png")));
    if let Some(dir) = out.parent() {
        std::fs::create_dir_all(dir).with_context(|| dir.display().to_string())?;
    }
    std::fs::write(&out, encode_png(&px, grid.dim_t, grid.dim_f)?)
        .with_context(|| out.display().to_string())?;
    println!("{} ({}x{})", out.display(), grid.dim_t, grid.dim_f);
    Ok(())
}

fn pct(v: Option<f64>) -> String {
    v.map(|x| format!("{:.2}", 100.0 * x)).unwrap_or_else(|| "n/a".into())
}

fn print_summary(scope: &str, s: &Summary) {
    println!(
        "{scope:<12} frames {:>6}  mAP50 {:>6}  mAP50:95 {:>6}",
        s.frames,
        pct(s.map50),
        pct(s.map50_95)
    );
}

fn cmd_eval(args: EvalArgs) -> anyhow::Result<()> {
    let rows = read_manifest(&args.root.join("manifest.csv"))?;
    let (gts, snr) = ground_truth(&args.root, &rows, args.split, args.preset)?;
    if gts.is_empty() {
        bail!("split {} has no frames in {}", args.split, args.root.display());
    }
    let dets = read_predictions(&args.pred)?;
    let result = map_suite(&dets, &gts, &snr)?;

    print_summary("all", &result.overall);
    for (level, s) in &result.per_snr {
        print_summary(&format!("snr {level} dB"), s);
    }
    println!(
        "{:<12} mAP50 {:>6}  mAP50:95 {:>6}",
        "snr mean",
        pct(result.cross_snr_map50),
        pct(result.cross_snr_map50_95)
    );
    let report = args
        .report
        .unwrap_or_else(|| args.root.join(format!("eval_{}_{}.csv", args.split, args.preset)));
    write_report(&result, &report)?;
    println!("report: {}", report.display());
    Ok(())
}

fn cmd_inspect(args: InspectArgs) -> anyhow::Result<()> {
    let FrameRef { root, frame, preset } = &args.frame;
    let row = find_row(root, frame)?;
    let classes: Vec<String> = row.classes.iter().map(u32::to_string).collect();
    println!("frame_id: {}", row.frame_id);
    println!("index: {}", row.frame_index);
    println!("split: {}", row.split);
    println!("env: {}", row.env);
    println!("snr_db: {}", row.snr_db);
    println!("emitters: {}", row.emitter_count);
    println!("classes: {}", classes.join(" "));
    println!("seed: {}", row.seed);
    println!("status: {}", row.status);
    if let Some((image, _)) = row.output(*preset) {
        println!("image: {image}");
    }
    let labels = read_labels(&label_path(root, &row, *preset)?)?;
    println!("{} annotations", labels.len());
    print!("{}", format_labels(&labels));
    Ok(())
}

fn cmd_nist(args: NistArgs) -> anyhow::Result<()> {
    let records = read_nist_metadata(&args.metadata)?;
    let labels = annotate_nist_records(&records)?;
    std::fs::create_dir_all(&args.out).with_context(|| args.out.display().to_string())?;
    for (frame, anns) in &labels {
        let path = args.out.join(format!("{frame}.txt"));
        std::fs::write(&path, format_labels(anns)).with_context(|| path.display().to_string())?;
    }
    let boxes: usize = labels.values().map(Vec::len).sum();
    println!("{} label files, {boxes} boxes, in {}", labels.len(), args.out.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let is_gen = matches!(cli.command, Command::Gen(_));
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Render(a) => cmd_render(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Inspect(a) => cmd_inspect(a),
        Command::NistAnnotate(a) => cmd_nist(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let config_error = e
                .downcast_ref::<Error>()
                .is_some_and(|e| matches!(e, Error::Config(_)) || (is_gen && matches!(e, Error::Parse { .. })));
            ExitCode::from(if config_error { 2 } else { 1 })
        }
    }
}
