//! `acpv` command-line tool: vectorize label masks into valid planar
//! partitions, evaluate predictions, validate compliance, synthesize
//! ground truth, sweep parameters, and render SVG figures.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::json;

use acpv_core::metrics::{evaluate_patch, reports_to_csv, EvalOptions, MetricsReport};
use acpv_core::partition::{load_partition, write_partition, Partition};
use acpv_core::pipeline::{vectorize, SimplifyMode};
use acpv_core::pslg::build_overdense_pslg;
use acpv_core::raster::{load_heatmap, load_mask, save_heatmap, save_mask};
use acpv_core::simplify::extract_peaks;
use acpv_core::svg::{render_svg, SvgStyle};
use acpv_core::synth::{
    config_hash, generate_partition, perturb, rasterize, render_heatmap, NoiseConfig, SynthConfig,
};
use acpv_core::validate::{snap_and_clean, validate_acpv};
use acpv_core::Heatmap;

const EXIT_PARTIAL: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "acpv", version, about = "Topology-consistent raster-to-vector conversion")]
struct Cli {
    /// TOML config file; defaults to $ACPV_CONFIG when set.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Convert a label mask (+ optional heatmap) to a GeoJSON partition.
    Vectorize(VectorizeArgs),
    /// Evaluate predicted partitions against ground truth.
    Evaluate(EvaluateArgs),
    /// Check the six partition-validity constraints.
    Validate(ValidateArgs),
    /// Generate synthetic partitions, masks, and heatmaps.
    Synth(SynthArgs),
    /// Sweep a parameter axis and tabulate metric curves.
    Sweep(SweepArgs),
    /// Render a partition to SVG.
    Render(RenderArgs),
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Mode {
    None,
    Dp,
    Vss,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum SweepAxis {
    Nms,
    DpEps,
    Tau,
}

#[derive(Args)]
struct VectorizeArgs {
    #[arg(long)]
    mask: PathBuf,
    #[arg(long)]
    heatmap: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "vss")]
    mode: Mode,
    /// Override the class count inferred from the mask.
    #[arg(long)]
    classes: Option<u16>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    nms_threshold: Option<f32>,
    #[arg(long)]
    dp_eps: Option<f64>,
    /// Output GeoJSON path.
    #[arg(long)]
    out: PathBuf,
    /// Also write an SVG rendering here.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Directory of predicted partitions (*.json).
    #[arg(long)]
    pred: PathBuf,
    /// Directory of ground-truth partitions (*.json, matching names).
    #[arg(long)]
    gt: PathBuf,
    /// Directory of ground-truth masks (*.pgm/*.png, matching stems).
    #[arg(long)]
    masks: PathBuf,
    /// Optional directory of heatmaps for V2B / peak-shape metrics.
    #[arg(long)]
    heatmaps: Option<PathBuf>,
    #[arg(long)]
    band: Option<f64>,
    /// V2B thresholds, comma separated.
    #[arg(long, value_delimiter = ',')]
    deltas: Option<Vec<f64>>,
    /// Classes evaluated with APLS, comma separated.
    #[arg(long, value_delimiter = ',')]
    elongated: Option<Vec<u16>>,
    #[arg(long)]
    nms_threshold: Option<f32>,
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory for reports.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    partition: PathBuf,
    /// Merge near-coincident vertices before validating.
    #[arg(long)]
    snap_tolerance: Option<f64>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 128)]
    width: u32,
    #[arg(long, default_value_t = 128)]
    height: u32,
    #[arg(long, default_value_t = 5)]
    classes: u16,
    #[arg(long, default_value_t = 10)]
    cells: usize,
    #[arg(long, default_value_t = 0.3)]
    hole_prob: f64,
    #[arg(long, default_value_t = 2.0)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    jitter: u32,
    #[arg(long, default_value_t = 0.0)]
    flip_rate: f64,
    #[arg(long, default_value_t = 0.0)]
    dropout: f64,
    #[arg(long, default_value_t = 0.0)]
    spurious: f64,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    axis: SweepAxis,
    /// Sweep values, comma separated (at least two).
    #[arg(long, value_delimiter = ',')]
    values: Vec<f64>,
    #[arg(long)]
    mask: PathBuf,
    #[arg(long)]
    heatmap: Option<PathBuf>,
    /// Ground-truth partition to compare against.
    #[arg(long)]
    gt: PathBuf,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    nms_threshold: Option<f32>,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RenderArgs {
    partition: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Draw vertex markers.
    #[arg(long)]
    vertices: bool,
    /// Skip the gap/overlap overlay.
    #[arg(long)]
    no_overlay: bool,
}

/// Optional defaults loaded from TOML; command-line flags win.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    band: Option<f64>,
    deltas: Option<Vec<f64>>,
    elongated: Option<Vec<u16>>,
    tau: Option<f64>,
    nms_threshold: Option<f32>,
    dp_eps: Option<f64>,
    workers: Option<usize>,
    palette: Option<Vec<String>>,
}

fn load_config(path: Option<&Path>) -> Result<FileConfig> {
    let path = match path {
        Some(p) => p.to_path_buf(),
        None => match std::env::var_os("ACPV_CONFIG") {
            Some(p) => PathBuf::from(p),
            None => return Ok(FileConfig::default()),
        },
    };
    let text = std::fs::read_to_string(&path)
        .with_context(|| format!("reading config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load_config(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let result = match cli.cmd {
        Cmd::Vectorize(a) => cmd_vectorize(a, &cfg),
        Cmd::Evaluate(a) => cmd_evaluate(a, &cfg),
        Cmd::Validate(a) => cmd_validate(a),
        Cmd::Synth(a) => cmd_synth(a),
        Cmd::Sweep(a) => cmd_sweep(a, &cfg),
        Cmd::Render(a) => cmd_render(a, &cfg),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_PARTIAL)
        }
    }
}

fn usage_error(msg: &str) -> Result<u8> {
    eprintln!("usage error: {msg}");
    Ok(EXIT_USAGE)
}

fn resolve_mode(
    mode: Mode,
    heatmap: Option<&Heatmap>,
    tau: f64,
    nms: f32,
    dp_eps: f64,
) -> Result<Option<SimplifyMode>> {
    Ok(Some(match mode {
        Mode::None => SimplifyMode::None,
        Mode::Dp => SimplifyMode::Dp { epsilon: dp_eps },
        Mode::Vss => {
            if heatmap.is_none() {
                return Ok(None);
            }
            SimplifyMode::Vss { tau, nms_threshold: nms }
        }
    }))
}

fn cmd_vectorize(a: VectorizeArgs, cfg: &FileConfig) -> Result<u8> {
    let mask = load_mask(&a.mask, a.classes)?;
    let heatmap = match &a.heatmap {
        Some(p) => Some(load_heatmap(p)?.0),
        None => None,
    };
    let tau = a.tau.or(cfg.tau).unwrap_or(3.0);
    let nms = a.nms_threshold.or(cfg.nms_threshold).unwrap_or(0.5);
    let dp_eps = a.dp_eps.or(cfg.dp_eps).unwrap_or(2.0);
    let Some(mode) = resolve_mode(a.mode, heatmap.as_ref(), tau, nms, dp_eps)? else {
        return usage_error("--mode vss requires --heatmap");
    };

    let before = build_overdense_pslg(&mask).num_vertices();
    let out = vectorize(&mask, heatmap.as_ref(), mode)?;
    let after: usize = out.partition.polygons.iter().map(|p| p.vertex_count()).sum();
    println!("vertices: {before} overdense -> {after} simplified");

    write_partition(&out.partition, &a.out)?;
    if let Some(svg_path) = &a.svg {
        let style = svg_style(cfg, true, false);
        std::fs::write(svg_path, render_svg(&out.partition, &style))?;
    }

    let report = validate_acpv(&out.partition);
    println!(
        "gap {:.2} inter {:.2} intra {:.2} sec {:.2}",
        report.gap_rate * 100.0,
        report.inter_overlap * 100.0,
        report.intra_overlap * 100.0,
        report.sec * 100.0
    );
    for v in &report.violations {
        println!("violation: {v}");
    }
    Ok(if report.all_ok() { 0 } else { EXIT_PARTIAL })
}

fn find_mask(dir: &Path, stem: &str) -> Option<PathBuf> {
    ["pgm", "png"]
        .iter()
        .map(|ext| dir.join(format!("{stem}.{ext}")))
        .find(|p| p.exists())
}

fn cmd_evaluate(a: EvaluateArgs, cfg: &FileConfig) -> Result<u8> {
    let opts = EvalOptions {
        band: a.band.or(cfg.band).unwrap_or(2.0),
        deltas: a.deltas.or_else(|| cfg.deltas.clone()).unwrap_or(vec![2.0, 4.0, 6.0]),
        elongated: a.elongated.or_else(|| cfg.elongated.clone()).unwrap_or_default(),
        ..Default::default()
    };
    let nms = a.nms_threshold.or(cfg.nms_threshold).unwrap_or(0.5);
    let workers = a.workers.or(cfg.workers).unwrap_or(0);

    let mut stems: Vec<String> = std::fs::read_dir(&a.gt)
        .with_context(|| format!("reading {}", a.gt.display()))?
        .filter_map(|e| e.ok())
        .filter_map(|e| {
            let p = e.path();
            (p.extension().and_then(|x| x.to_str()) == Some("json"))
                .then(|| p.file_stem().unwrap().to_string_lossy().into_owned())
        })
        .collect();
    stems.sort();

    let mut jobs = Vec::new();
    let mut skipped = Vec::new();
    for stem in stems {
        let pred_path = a.pred.join(format!("{stem}.json"));
        let mask_path = find_mask(&a.masks, &stem);
        match (pred_path.exists(), mask_path) {
            (true, Some(mask_path)) => jobs.push((stem, pred_path, mask_path)),
            _ => skipped.push(stem),
        }
    }

    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build()?;
    let results: Vec<Result<(String, MetricsReport)>> = pool.install(|| {
        use rayon::prelude::*;
        jobs.par_iter()
            .map(|(stem, pred_path, mask_path)| {
                let (pred, _) = load_partition(pred_path)?;
                let (gt, _) = load_partition(&a.gt.join(format!("{stem}.json")))?;
                let gt_mask = load_mask(mask_path, None)?;
                let hm = match &a.heatmaps {
                    Some(dir) => {
                        let p = dir.join(format!("{stem}.pfm"));
                        p.exists().then(|| load_heatmap(&p)).transpose()?.map(|x| x.0)
                    }
                    None => None,
                };
                let peaks: Option<Vec<acpv_core::Point64>> = hm
                    .as_ref()
                    .map(|hm| extract_peaks(hm, nms).peaks.iter().map(|p| p.position).collect());
                let report = match (&hm, &peaks) {
                    (Some(hm), Some(pk)) => {
                        evaluate_patch(&pred, &gt, &gt_mask, Some((hm, pk)), &opts)
                    }
                    _ => evaluate_patch(&pred, &gt, &gt_mask, None, &opts),
                };
                Ok((stem.clone(), report))
            })
            .collect()
    });

    std::fs::create_dir_all(&a.out)?;
    let mut names = Vec::new();
    let mut reports = Vec::new();
    for r in results {
        let (stem, report) = r?;
        std::fs::write(
            a.out.join(format!("{stem}.metrics.json")),
            serde_json::to_string_pretty(&report)?,
        )?;
        names.push(stem);
        reports.push(report);
    }
    std::fs::write(a.out.join("summary.csv"), reports_to_csv(&names, &reports))?;
    let summary = json!({
        "evaluated": names,
        "skipped": skipped,
        "mean_iou": reports.iter().map(|r| r.mean_iou()).sum::<f64>()
            / reports.len().max(1) as f64,
    });
    std::fs::write(a.out.join("summary.json"), serde_json::to_string_pretty(&summary)?)?;
    for s in &summary["skipped"].as_array().unwrap().iter().collect::<Vec<_>>() {
        eprintln!("skipped: {s}");
    }
    Ok(if summary["skipped"].as_array().unwrap().is_empty() && !reports.is_empty() {
        0
    } else {
        EXIT_PARTIAL
    })
}

fn cmd_validate(a: ValidateArgs) -> Result<u8> {
    let (mut partition, flags) = load_partition(&a.partition)?;
    if flags.reoriented > 0 {
        println!("normalized orientation of {} rings", flags.reoriented);
    }
    if let Some(tol) = a.snap_tolerance {
        partition = snap_and_clean(&partition, tol)?;
    }
    let r = validate_acpv(&partition);
    let checks = [
        ("planar partition", r.planar_partition_ok),
        ("shared boundaries", r.shared_boundaries_ok),
        ("zero gap/overlap", r.zero_gap_overlap_ok),
        ("linear geometry", r.linear_geometry_ok),
        ("semantic consistency", r.semantic_consistency_ok),
        ("minimal redundancy", r.minimal_redundancy_ok),
    ];
    for (name, ok) in checks {
        println!("{name}: {}", if ok { "ok" } else { "VIOLATED" });
    }
    for v in &r.violations {
        println!("violation: {v}");
    }
    println!(
        "gap {:.2} inter {:.2} intra {:.2} sec {:.2}",
        r.gap_rate * 100.0,
        r.inter_overlap * 100.0,
        r.intra_overlap * 100.0,
        r.sec * 100.0
    );
    Ok(if r.all_ok() { 0 } else { EXIT_PARTIAL })
}

fn cmd_synth(a: SynthArgs) -> Result<u8> {
    std::fs::create_dir_all(&a.out)?;
    let noise = NoiseConfig {
        boundary_jitter_px: a.jitter,
        label_flip_rate: a.flip_rate,
        heatmap_dropout_rate: a.dropout,
        spurious_peak_rate: a.spurious,
    };
    let noisy = noise != NoiseConfig::default();
    let mut entries = Vec::new();
    for i in 0..a.count {
        let cfg = SynthConfig {
            seed: a.seed + i as u64,
            width: a.width,
            height: a.height,
            num_classes: a.classes,
            cell_count: a.cells,
            hole_probability: a.hole_prob,
            heatmap_sigma: a.sigma,
            noise: noise.clone(),
        };
        let partition = generate_partition(&cfg)?;
        let gt_mask = rasterize(&partition);
        let heatmap = render_heatmap(&partition, cfg.heatmap_sigma);
        let (mask, heatmap) = if noisy {
            perturb(&gt_mask, &heatmap, &cfg.noise, cfg.heatmap_sigma, cfg.seed ^ 0x5eed)
        } else {
            (gt_mask.clone(), heatmap)
        };
        let stem = format!("patch_{i:04}");
        write_partition(&partition, &a.out.join(format!("{stem}.json")))?;
        save_mask(&mask, &a.out.join(format!("{stem}.pgm")))?;
        save_mask(&gt_mask, &a.out.join(format!("{stem}.gt.pgm")))?;
        save_heatmap(&heatmap, &a.out.join(format!("{stem}.pfm")))?;
        entries.push(json!({
            "seed": cfg.seed,
            "partition": format!("{stem}.json"),
            "mask": format!("{stem}.pgm"),
            "gt_mask": format!("{stem}.gt.pgm"),
            "heatmap": format!("{stem}.pfm"),
            "config_hash": format!("{:016x}", config_hash(&cfg)),
        }));
    }
    std::fs::write(
        a.out.join("manifest.json"),
        serde_json::to_string_pretty(&json!({ "patches": entries }))?,
    )?;
    println!("wrote {} patches to {}", a.count, a.out.display());
    Ok(0)
}

fn per_class_vertices(p: &Partition, class: u16) -> usize {
    p.polygons
        .iter()
        .filter(|q| q.class == class)
        .map(|q| q.vertex_count())
        .sum()
}

fn cmd_sweep(a: SweepArgs, cfg: &FileConfig) -> Result<u8> {
    if a.values.len() < 2 {
        return usage_error("--values needs at least two entries");
    }
    let mask = load_mask(&a.mask, None)?;
    let heatmap = match &a.heatmap {
        Some(p) => Some(load_heatmap(p)?.0),
        None => None,
    };
    if a.axis != SweepAxis::DpEps && heatmap.is_none() {
        return usage_error("nms/tau sweeps require --heatmap");
    }
    let (gt, _) = load_partition(&a.gt)?;
    let gt_mask = rasterize(&gt);
    let tau = a.tau.or(cfg.tau).unwrap_or(3.0);
    let nms = a.nms_threshold.or(cfg.nms_threshold).unwrap_or(0.5);

    let mut rows = vec![vec![
        "value".to_string(),
        "class".into(),
        "vertices".into(),
        "iou".into(),
        "polis".into(),
        "n_ratio".into(),
        "r".into(),
    ]];
    for &v in &a.values {
        let mode = match a.axis {
            SweepAxis::Nms => SimplifyMode::Vss { tau, nms_threshold: v as f32 },
            SweepAxis::Tau => SimplifyMode::Vss { tau: v, nms_threshold: nms },
            SweepAxis::DpEps => SimplifyMode::Dp { epsilon: v },
        };
        let out = vectorize(&mask, heatmap.as_ref(), mode)?;
        let report = evaluate_patch(&out.partition, &gt, &gt_mask, None, &EvalOptions::default());
        for c in &report.per_class {
            if c.iou_vacuous {
                continue;
            }
            let (polis, n_ratio) = (c.polis, c.n_ratio);
            let r = n_ratio.map(|n| n.max(1.0 / n));
            let fmt = |o: Option<f64>| o.map_or("-".into(), |x| format!("{x:.4}"));
            rows.push(vec![
                format!("{v}"),
                c.class.to_string(),
                per_class_vertices(&out.partition, c.class).to_string(),
                format!("{:.4}", c.iou),
                fmt(polis),
                fmt(n_ratio),
                fmt(r),
            ]);
        }
    }
    let widths: Vec<usize> =
        (0..rows[0].len()).map(|i| rows.iter().map(|r| r[i].len()).max().unwrap()).collect();
    let mut out = String::new();
    for row in &rows {
        let cells: Vec<String> =
            row.iter().zip(&widths).map(|(c, &w)| format!("{c:>w$}")).collect();
        out.push_str(&cells.join(", "));
        out.push('\n');
    }
    std::fs::write(&a.out, out)?;
    Ok(0)
}

fn svg_style(cfg: &FileConfig, overlay: bool, vertices: bool) -> SvgStyle {
    let mut style = SvgStyle { overlay, vertex_markers: vertices, ..Default::default() };
    if let Some(palette) = &cfg.palette {
        if !palette.is_empty() {
            style.palette = palette.clone();
        }
    }
    style
}

fn cmd_render(a: RenderArgs, cfg: &FileConfig) -> Result<u8> {
    let (partition, _) = load_partition(&a.partition)?;
    let style = svg_style(cfg, !a.no_overlay, a.vertices);
    std::fs::write(&a.out, render_svg(&partition, &style))?;
    Ok(0)
}
