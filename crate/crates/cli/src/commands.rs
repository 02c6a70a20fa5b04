use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use hdk_core::io::{
    annotation_json, parse_depth_csv, parse_depth_json, to_json, AnnotationFile, BoundaryFile,
};
use hdk_core::{
    annotation_to_boundaries, approximation_error, bucket_by_corners, fit_layout, layout_iou,
    lift_to_plane, make_ray_fan, manhattan_snap, reference_depth, render_pair, ApproximationError,
    BoundaryPair, CornerBucket, FitConfig, HorizonDepthMap, IoUTable, LayoutAnnotation, PairRender,
    SnapConfig,
};

use crate::args::{Cli, Command};
use crate::manifest::{ManifestBuilder, RunManifest};
use crate::output::{read, write_atomic};
use crate::{svg, InvalidInput, Unmatched};

pub fn run(cli: &Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::GenGt { annotation, m, out } => gen_gt(cli, annotation, *m, out),
        Command::Render {
            boundary,
            m,
            out,
            svg,
        } => render(cli, boundary, *m, out, svg.as_deref()),
        Command::Fit { depth, config, out } => fit(cli, depth, config.as_deref(), out),
        Command::Eval {
            pred_dir,
            gt_dir,
            out,
        } => eval(cli, pred_dir, gt_dir, out),
        Command::AblateM {
            annotation_dir,
            m_list,
            reference_m,
            out,
        } => ablate(cli, annotation_dir, m_list, *reference_m, out),
        Command::Fixtures { out_dir } => fixtures(cli, out_dir),
    }
}

fn say(cli: &Cli, text: impl AsRef<str>) {
    if !cli.quiet {
        println!("{}", text.as_ref());
    }
}

fn invalid(path: &Path, err: impl std::fmt::Display) -> anyhow::Error {
    anyhow!(InvalidInput(format!("{}: {err}", path.display())))
}

/// Annotation plus its corner boundaries; any failure is an input error.
fn load_annotation(path: &Path) -> anyhow::Result<(LayoutAnnotation, BoundaryPair)> {
    let value: Value = serde_json::from_str(&read(path)?).map_err(|e| invalid(path, e))?;
    // fit reports carry their snapped annotation under "annotation"
    let value = match value {
        Value::Object(mut map) if map.contains_key("annotation") => {
            map.remove("annotation").unwrap_or_default()
        }
        v => v,
    };
    let file: AnnotationFile = serde_json::from_value(value).map_err(|e| invalid(path, e))?;
    let a = file.to_annotation().map_err(|e| invalid(path, e))?;
    let pair = annotation_to_boundaries(&a).map_err(|e| invalid(path, e))?;
    Ok((a, pair))
}

#[derive(Serialize)]
struct DepthReport<'a> {
    manifest: RunManifest,
    m: usize,
    camera_height: f64,
    ceiling_ratio: f64,
    /// Largest floor/ceiling disagreement; zero up to rounding for a
    /// consistent layout.
    max_discrepancy: f64,
    /// Floor render, the depth target.
    values: &'a [f64],
    ceiling_values: &'a [f64],
}

impl<'a> DepthReport<'a> {
    fn new(
        manifest: RunManifest,
        r: &'a PairRender,
        camera_height: f64,
        ceiling_ratio: f64,
    ) -> Self {
        Self {
            manifest,
            m: r.floor.len(),
            camera_height,
            ceiling_ratio,
            max_discrepancy: r.max_discrepancy(),
            values: r.floor.values(),
            ceiling_values: r.ceiling.values(),
        }
    }
}

fn gen_gt(cli: &Cli, annotation: &Path, m: usize, out: &Path) -> anyhow::Result<()> {
    let builder = ManifestBuilder::new(
        "gen-gt",
        &[annotation],
        &json!({ "m": m }),
        cli.seed.unwrap_or(0),
    );
    let (a, pair) = load_annotation(annotation)?;
    let fan = make_ray_fan(m)?;
    let r = render_pair(&pair, a.camera_height(), a.ceiling_ratio(), &fan)?;
    let report = DepthReport::new(builder.finish(), &r, a.camera_height(), a.ceiling_ratio());
    write_atomic(out, &to_json(&report))?;
    say(
        cli,
        format!(
            "{}: {m} rays, max floor/ceiling discrepancy {:.3e}",
            out.display(),
            report.max_discrepancy
        ),
    );
    Ok(())
}

fn render(
    cli: &Cli,
    boundary: &Path,
    m: usize,
    out: &Path,
    svg_path: Option<&Path>,
) -> anyhow::Result<()> {
    let builder = ManifestBuilder::new(
        "render",
        &[boundary],
        &json!({ "m": m }),
        cli.seed.unwrap_or(0),
    );
    let (pair, h, ratio) =
        hdk_core::io::parse_boundary(&read(boundary)?).map_err(|e| invalid(boundary, e))?;
    let fan = make_ray_fan(m)?;
    let r = render_pair(&pair, h, ratio, &fan)?;
    let manifest = builder.finish();
    if let Some(path) = svg_path {
        let plan: Vec<[f64; 2]> = lift_to_plane(pair.floor(), h, ratio)?
            .iter()
            .map(|p| [p.x, p.z])
            .collect();
        let meta = serde_json::to_string(&manifest)?;
        write_atomic(path, &svg::layout_plot(&plan, &r.floor, &r.ceiling, &meta))?;
    }
    write_atomic(out, &to_json(&DepthReport::new(manifest, &r, h, ratio)))?;
    say(cli, format!("{}: {m} rays", out.display()));
    Ok(())
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FitFileConfig {
    fit: FitConfig,
    snap: SnapConfig,
}

fn load_depth(path: &Path) -> anyhow::Result<HorizonDepthMap> {
    let text = read(path)?;
    let parsed = if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
    {
        parse_depth_csv(&text)
    } else {
        parse_depth_json(&text)
    };
    parsed.map_err(|e| invalid(path, e))
}

/// Fit configuration with unset ray count and snap height taken from the
/// depth map and the fit section.
fn fit_config(
    cli: &Cli,
    path: Option<&Path>,
    depth: &HorizonDepthMap,
) -> anyhow::Result<FitFileConfig> {
    let raw: Value = match path {
        Some(p) => serde_json::from_str(&read(p)?).map_err(|e| invalid(p, e))?,
        None => json!({}),
    };
    let mut cfg: FitFileConfig = serde_json::from_value(raw.clone())
        .map_err(|e| invalid(path.unwrap_or(Path::new("<config>")), e))?;
    if raw.pointer("/fit/m_rays").is_none() {
        cfg.fit.m_rays = depth.len();
    }
    if raw.pointer("/snap/camera_height").is_none() {
        cfg.snap.camera_height = cfg.fit.camera_height;
    }
    if let Some(seed) = cli.seed {
        cfg.fit.seed = seed;
    }
    Ok(cfg)
}

#[derive(Serialize)]
struct FitReport {
    manifest: RunManifest,
    config: FitFileConfig,
    converged: bool,
    iterations: usize,
    final_loss: f64,
    ceiling_ratio: f64,
    loss_trajectory: Vec<f64>,
    boundary: BoundaryFile,
    annotation: AnnotationFile,
}

#[derive(Serialize)]
struct FitFailureReport<'a> {
    manifest: RunManifest,
    error: String,
    iterations: usize,
    loss_trajectory: &'a [f64],
}

fn trajectory_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".trajectory.json");
    out.with_file_name(name)
}

fn fit(cli: &Cli, depth_path: &Path, config: Option<&Path>, out: &Path) -> anyhow::Result<()> {
    let depth = load_depth(depth_path)?;
    let cfg = fit_config(cli, config, &depth)?;
    let mut inputs = vec![depth_path];
    inputs.extend(config);
    let builder = ManifestBuilder::new("fit", &inputs, &cfg, cfg.fit.seed);

    let result = match fit_layout(&depth, &cfg.fit, None) {
        Ok(r) => r,
        Err(e @ hdk_core::Error::FitFailure { .. }) => {
            let hdk_core::Error::FitFailure {
                iterations,
                trajectory,
                ..
            } = &e
            else {
                unreachable!()
            };
            let dump = trajectory_path(out);
            let report = FitFailureReport {
                manifest: builder.finish(),
                error: e.to_string(),
                iterations: *iterations,
                loss_trajectory: trajectory,
            };
            write_atomic(&dump, &to_json(&report))?;
            return Err(
                anyhow::Error::new(e).context(format!("trajectory written to {}", dump.display()))
            );
        }
        Err(e) => return Err(e.into()),
    };
    let snapped = manhattan_snap(&result.pair, result.ceiling_ratio, &cfg.snap)?;
    let report = FitReport {
        manifest: builder.finish(),
        converged: result.converged,
        iterations: result.iterations,
        final_loss: result.final_loss(),
        ceiling_ratio: result.ceiling_ratio,
        boundary: BoundaryFile::new(&result.pair, cfg.fit.camera_height, result.ceiling_ratio),
        annotation: AnnotationFile::from(&snapped),
        loss_trajectory: result.loss_trajectory,
        config: cfg,
    };
    write_atomic(out, &to_json(&report))?;
    say(
        cli,
        format!(
            "{}: {} iterations, loss {:.4e}, R {:.4}, {} corners",
            out.display(),
            report.iterations,
            report.final_loss,
            report.ceiling_ratio,
            snapped.corner_count()
        ),
    );
    Ok(())
}

/// `*.json` files of `dir` keyed by stem, sorted. A `manifest.json` written
/// by `fixtures` is skipped.
fn json_files(dir: &Path) -> anyhow::Result<Vec<(String, PathBuf)>> {
    if dir.is_file() {
        let stem = dir
            .file_stem()
            .unwrap_or_default()
            .to_string_lossy()
            .into_owned();
        return Ok(vec![(stem, dir.to_path_buf())]);
    }
    let entries = std::fs::read_dir(dir)
        .with_context(|| format!("listing {}", dir.display()))
        .map_err(|e| anyhow!(InvalidInput(format!("{e:#}"))))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry?.path();
        let is_manifest = path.file_name().is_some_and(|n| n == "manifest.json");
        if path.is_file() && path.extension().is_some_and(|e| e == "json") && !is_manifest {
            let stem = path
                .file_stem()
                .unwrap_or_default()
                .to_string_lossy()
                .into_owned();
            files.push((stem, path));
        }
    }
    files.sort();
    Ok(files)
}

#[derive(Serialize)]
struct RoomIoU {
    name: String,
    iou_2d: f64,
    iou_3d: f64,
    corners: usize,
    bucket: CornerBucket,
}

#[derive(Serialize)]
struct EvalReport {
    manifest: RunManifest,
    rooms: Vec<RoomIoU>,
    table: IoUTable,
    /// Files present in only one of the two directories.
    unmatched: Vec<String>,
}

fn eval(cli: &Cli, pred_dir: &Path, gt_dir: &Path, out: &Path) -> anyhow::Result<()> {
    let builder = ManifestBuilder::new(
        "eval",
        &[pred_dir, gt_dir],
        &json!({}),
        cli.seed.unwrap_or(0),
    );
    let preds = json_files(pred_dir)?;
    let gts = json_files(gt_dir)?;
    let mut unmatched = Vec::new();
    let mut pairs = Vec::new();
    for (name, p) in &preds {
        match gts.iter().find(|(g, _)| g == name) {
            Some((_, g)) => pairs.push((name.clone(), p.clone(), g.clone())),
            None => unmatched.push(p.display().to_string()),
        }
    }
    for (name, g) in &gts {
        if !preds.iter().any(|(p, _)| p == name) {
            unmatched.push(g.display().to_string());
        }
    }

    let rooms = pairs
        .par_iter()
        .map(|(name, p, g)| {
            let (pred, _) = load_annotation(p)?;
            let (gt, _) = load_annotation(g)?;
            let r = layout_iou(&pred, &gt).with_context(|| format!("scoring {name}"))?;
            Ok(RoomIoU {
                name: name.clone(),
                iou_2d: r.iou_2d,
                iou_3d: r.iou_3d,
                corners: r.corners,
                bucket: r.bucket,
            })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let reports: Vec<hdk_core::IoUReport> = rooms
        .iter()
        .map(|r| hdk_core::IoUReport {
            iou_2d: r.iou_2d,
            iou_3d: r.iou_3d,
            corners: r.corners,
            bucket: r.bucket,
        })
        .collect();
    let table = bucket_by_corners(&reports);
    say(cli, table.to_string());
    let report = EvalReport {
        manifest: builder.finish(),
        rooms,
        table,
        unmatched: unmatched.clone(),
    };
    write_atomic(out, &to_json(&report))?;
    if !unmatched.is_empty() {
        return Err(anyhow!(Unmatched(unmatched)));
    }
    Ok(())
}

#[derive(Serialize)]
struct AblationRow {
    m: usize,
    /// Mean over rooms of each room's mean error.
    mean: f64,
    /// Worst error over all rooms and rays.
    max: f64,
}

#[derive(Serialize)]
struct RoomAblation {
    name: String,
    corners: usize,
    errors: Vec<ApproximationError>,
}

#[derive(Serialize)]
struct AblationReport {
    manifest: RunManifest,
    reference_m: usize,
    rows: Vec<AblationRow>,
    rooms: Vec<RoomAblation>,
}

fn ablate(
    cli: &Cli,
    dir: &Path,
    m_list: &[usize],
    reference_m: usize,
    out: &Path,
) -> anyhow::Result<()> {
    let config = json!({ "m_list": m_list, "reference_m": reference_m });
    let builder = ManifestBuilder::new("ablate-m", &[dir], &config, cli.seed.unwrap_or(0));
    if m_list.is_empty() {
        return Err(anyhow!(InvalidInput("--m-list is empty".into())));
    }
    let files = json_files(dir)?;
    if files.is_empty() {
        return Err(anyhow!(InvalidInput(format!(
            "no annotation files in {}",
            dir.display()
        ))));
    }
    let rooms = files
        .par_iter()
        .map(|(name, path)| {
            let (a, _) = load_annotation(path)?;
            let reference = reference_depth(&a, reference_m)?;
            let errors = m_list
                .iter()
                .map(|&m| approximation_error(&a, m, &reference))
                .collect::<hdk_core::Result<Vec<_>>>()
                .with_context(|| format!("ablating {name}"))?;
            Ok(RoomAblation {
                name: name.clone(),
                corners: a.corner_count(),
                errors,
            })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let rows: Vec<AblationRow> = m_list
        .iter()
        .enumerate()
        .map(|(k, &m)| AblationRow {
            m,
            mean: rooms.iter().map(|r| r.errors[k].mean).sum::<f64>() / rooms.len() as f64,
            max: rooms.iter().map(|r| r.errors[k].max).fold(0.0, f64::max),
        })
        .collect();
    let mut text = format!("{:>6} {:>14} {:>14}\n", "M", "mean error m", "max error m");
    for r in &rows {
        text += &format!("{:>6} {:>14.6e} {:>14.6e}\n", r.m, r.mean, r.max);
    }
    say(cli, text.trim_end());
    let report = AblationReport {
        manifest: builder.finish(),
        reference_m,
        rows,
        rooms,
    };
    write_atomic(out, &to_json(&report))
}

fn fixtures(cli: &Cli, out_dir: &Path) -> anyhow::Result<()> {
    let builder = ManifestBuilder::new("fixtures", &[], &json!({}), cli.seed.unwrap_or(0));
    let suite = hdk_core::synth::fixture_suite();
    for (name, a) in &suite {
        write_atomic(&out_dir.join(format!("{name}.json")), &annotation_json(a))?;
    }
    // annotation files have a fixed schema, so the manifest sits beside them
    write_atomic(&out_dir.join("manifest.json"), &to_json(&builder.finish()))?;
    say(
        cli,
        format!("{} fixtures written to {}", suite.len(), out_dir.display()),
    );
    Ok(())
}
