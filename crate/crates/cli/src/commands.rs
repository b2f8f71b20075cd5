use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use jigi::config::RunConfig;
use jigi::io::{self, BitDepth};
use jigi::jigi::{reconstruct_jigi, reconstruct_plir_only};
use jigi::metrics::{self, GroundTruthEdge, RegionMask};
use jigi::sensing::{self, NoiseModel};
use jigi::{cgi, phantom, Error, Image, JigiConfig, ReconstructionResult, Result};

use crate::plot::{self, Series};
use crate::report::{exact, fixed4, Report};
use crate::{
    GenPatternsArgs, MeasureArgs, Method, MetricsArgs, PhantomArgs, PhantomKind, ReconstructArgs,
    SweepArgs, Target,
};

pub fn gen_patterns(a: &GenPatternsArgs) -> Result<()> {
    let stack = sensing::generate_patterns(a.rows, a.cols, a.m, a.density, a.seed)?;
    io::save_patterns(&a.out, &stack)?;
    println!(
        "M = {}\nrows = {}\ncols = {}\ndensity = {}\nseed = {}",
        a.m, a.rows, a.cols, a.density, a.seed
    );
    Ok(())
}

pub fn measure(a: &MeasureArgs) -> Result<()> {
    let noise = NoiseModel::gaussian(a.noise_sigma)?;
    let patterns = io::load_patterns(&a.patterns)?;
    let object = io::load_pgm(&a.object)?;
    let y = sensing::measure(&patterns, &object, noise, a.seed).map_err(|e| match e {
        Error::Shape { .. } => Error::Shape {
            expected: format!(
                "object of {}x{} (pattern shape)",
                patterns.rows(),
                patterns.cols()
            ),
            found: format!("object of {}x{}", object.rows(), object.cols()),
        },
        other => other,
    })?;
    io::save_measurements(&a.out, &y)?;
    println!("M = {}\nnoise_sigma = {}", y.len(), a.noise_sigma);
    Ok(())
}

fn effective_config(a: &ReconstructArgs) -> JigiConfig {
    let mut cfg = JigiConfig::default();
    if let Some(v) = a.omega {
        cfg.plir.omega = v;
    }
    if let Some(v) = a.rank_cutoff {
        cfg.plir.rank_cutoff = v;
    }
    if let Some(v) = a.clamp {
        cfg.plir.clamp = v;
    }
    if let Some(v) = a.epsilon {
        cfg.filter.epsilon = v;
    }
    if let Some(v) = a.radius {
        cfg.filter.radius = v;
    }
    if let Some(v) = a.max_iters {
        cfg.max_iterations = v;
    }
    if let Some(v) = a.tol {
        cfg.tolerance = v;
    }
    cfg
}

fn write_config(log: &mut Report, cfg: &JigiConfig) {
    log.put("omega", exact(cfg.plir.omega))
        .put("rank_cutoff", exact(cfg.plir.rank_cutoff))
        .put("clamp", cfg.plir.clamp)
        .put("radius", cfg.filter.radius)
        .put("epsilon", exact(cfg.filter.epsilon))
        .put("max_iterations", cfg.max_iterations)
        .put("tolerance", exact(cfg.tolerance));
}

pub fn reconstruct(a: &ReconstructArgs) -> Result<()> {
    let started = Instant::now();
    let patterns = io::load_patterns(&a.patterns)?;
    let y = io::load_measurements(&a.measurements)?;
    y.ensure_matches(&patterns)?;

    let mut log = Report::new();
    log.put("method", format!("{:?}", a.method).to_lowercase())
        .put("patterns", a.patterns.display())
        .put("measurements", a.measurements.display())
        .put("M", patterns.count())
        .put("rows", patterns.rows())
        .put("cols", patterns.cols());

    if a.method == Method::Cgi {
        let ignored = [
            ("--omega", a.omega.is_some()),
            ("--epsilon", a.epsilon.is_some()),
            ("--radius", a.radius.is_some()),
            ("--max-iters", a.max_iters.is_some()),
            ("--tol", a.tol.is_some()),
            ("--clamp", a.clamp.is_some()),
            ("--rank-cutoff", a.rank_cutoff.is_some()),
            ("--out-edge", a.out_edge.is_some()),
        ];
        for (flag, given) in ignored {
            if given {
                eprintln!("warning: {flag} has no effect with --method cgi; ignored");
            }
        }
        let g = cgi::cgi_correlation(&patterns, &y)?;
        let (lo, hi) = g.min_max();
        io::save_pgm(&a.out_image, &g.normalized(), BitDepth::Sixteen)?;
        log.put("image_min", exact(lo)).put("image_max", exact(hi));
    } else {
        let cfg = effective_config(a);
        let result = match a.method {
            Method::Jigi => reconstruct_jigi(&patterns, &y, &cfg)?,
            _ => reconstruct_plir_only(&patterns, &y, &cfg)?,
        };
        write_config(&mut log, &cfg);
        write_result(&mut log, &result, a.out_edge.as_deref())?;
        io::save_pgm(&a.out_image, &result.image.clamped(), BitDepth::Sixteen)?;
    }

    if a.timing {
        log.put(
            "wall_seconds",
            format!("{:.6}", started.elapsed().as_secs_f64()),
        );
    }
    match &a.out_log {
        Some(path) => log.save(path)?,
        None => print!("{}", log.render()),
    }
    Ok(())
}

fn write_result(log: &mut Report, r: &ReconstructionResult, out_edge: Option<&Path>) -> Result<()> {
    let (lo, hi) = r.image.min_max();
    let (elo, ehi) = r.edge.as_image().min_max();
    log.put("iterations", r.iterations_run)
        .put("stop_reason", r.stop_reason.as_str())
        .put("image_min", exact(lo))
        .put("image_max", exact(hi))
        .put("edge_min", exact(elo))
        .put("edge_max", exact(ehi))
        .put(
            "final_residual",
            r.residual_history.last().map_or("NA".into(), |&v| exact(v)),
        )
        .put(
            "residual_history",
            r.residual_history
                .iter()
                .map(|&v| exact(v))
                .collect::<Vec<_>>()
                .join(","),
        );
    if let Some(path) = out_edge {
        io::save_pgm(path, &r.edge.normalized(), BitDepth::Sixteen)?;
    }
    Ok(())
}

fn load_mask(a: &MetricsArgs, reference: &Image) -> Result<GroundTruthEdge> {
    if a.mask_source == "sobel" {
        metrics::ground_truth_edge(reference, a.threshold)
    } else {
        let marked = io::load_pgm(&a.mask_source)?;
        reference.ensure_same_shape(&marked)?;
        let edge = marked.map(|p| if p > 0.0 { 1.0 } else { 0.0 });
        let mask = RegionMask::from_edge_image(&edge)?;
        Ok(GroundTruthEdge { mask, edge })
    }
}

pub fn metrics(a: &MetricsArgs) -> Result<()> {
    if !(a.max_val.is_finite() && a.max_val > 0.0) {
        return Err(Error::Parameter(format!(
            "max-val must be positive, got {}",
            a.max_val
        )));
    }
    let reference = io::load_pgm(&a.reference)?;
    let candidate = io::load_pgm(&a.candidate)?;
    reference.ensure_same_shape(&candidate)?;
    let truth = match (load_mask(a, &reference), a.target) {
        (Ok(t), _) => Ok(t),
        (Err(e), Target::Edge) => return Err(e),
        (Err(e), Target::Image) => Err(e),
    };
    let graded_against = match (&truth, a.target) {
        (Ok(t), Target::Edge) => &t.edge,
        _ => &reference,
    };
    let mse = metrics::mse(graded_against, &candidate)?;
    let psnr = metrics::psnr(graded_against, &candidate, a.max_val)?;

    let mut r = Report::new();
    r.put("psnr", fixed4(psnr));
    match &truth {
        Ok(t) => match metrics::snr(&candidate, &t.mask) {
            Ok(snr) => {
                r.put("snr", fixed4(snr));
                r.put("snr_exact", exact(snr));
            }
            Err(Error::UndefinedSnr(note)) => {
                r.put("snr", "null").put("snr_note", note);
            }
            Err(e) => return Err(e),
        },
        Err(e) => {
            r.put("snr", "null").put("snr_note", e);
        }
    }
    r.put("psnr_exact", exact(psnr))
        .put("mse", exact(mse))
        .put("max_val", exact(a.max_val))
        .put("target", format!("{:?}", a.target).to_lowercase())
        .put("mask_source", &a.mask_source)
        .put("threshold", exact(a.threshold));
    if let Ok(t) = &truth {
        r.put("edge_pixels", t.mask.count(metrics::Region::Edge))
            .put(
                "background_pixels",
                t.mask.count(metrics::Region::Background),
            );
    }
    print!("{}", r.render());
    if let Some(path) = &a.out {
        r.save(path)?;
    }
    Ok(())
}

fn sweep_object(name: &str, rows: usize, cols: usize) -> Result<Image> {
    match name {
        "aircraft" => Ok(phantom::aircraft(rows, cols)),
        "grayscale" => Ok(phantom::grayscale_shapes(rows, cols)),
        path => io::load_pgm(path),
    }
}

struct PointScores {
    image_psnr: f64,
    edge_psnr: f64,
    edge_snr: Option<f64>,
    iterations: usize,
    seconds: f64,
}

fn sweep_point(
    cfg: &RunConfig,
    object: &Image,
    truth: &GroundTruthEdge,
    m: usize,
    out_dir: &Path,
) -> Result<PointScores> {
    let started = Instant::now();
    let (rows, cols) = object.shape();
    let patterns = sensing::generate_patterns(rows, cols, m, cfg.sensing.density, cfg.seed)?;
    let y = sensing::measure(&patterns, object, cfg.noise()?, cfg.seed)?;
    let result = reconstruct_jigi(&patterns, &y, &cfg.jigi_config())?;
    let max_val = cfg.metrics.max_val;
    let edge_img = result.edge.normalized();
    let scores = PointScores {
        image_psnr: metrics::psnr(object, &result.image, max_val)?,
        edge_psnr: metrics::psnr(&truth.edge, &edge_img, max_val)?,
        edge_snr: metrics::snr(result.edge.as_image(), &truth.mask).ok(),
        iterations: result.iterations_run,
        seconds: started.elapsed().as_secs_f64(),
    };
    io::save_pgm(
        out_dir.join(format!("M{m}_image.pgm")),
        &result.image.clamped(),
        BitDepth::Sixteen,
    )?;
    io::save_pgm(
        out_dir.join(format!("M{m}_edge.pgm")),
        &edge_img,
        BitDepth::Sixteen,
    )?;
    Ok(scores)
}

pub fn sweep(a: &SweepArgs) -> Result<()> {
    let mut cfg = RunConfig::load(&a.config)?;
    if let Some(p) = &a.phantom {
        cfg.sweep.phantom = p.clone();
    }
    let out_dir: PathBuf = a
        .out_dir
        .clone()
        .or_else(|| cfg.paths.out_dir.clone())
        .ok_or_else(|| {
            Error::Config("no output directory: pass --out-dir or set paths.out_dir".into())
        })?;
    std::fs::create_dir_all(&out_dir)?;
    let object = sweep_object(&cfg.sweep.phantom, cfg.sensing.rows, cfg.sensing.cols)?;
    let truth = metrics::ground_truth_edge(&object, cfg.metrics.edge_threshold)?;
    io::save_pgm(out_dir.join("object.pgm"), &object, BitDepth::Sixteen)?;

    let outcomes: Vec<Result<PointScores>> = cfg
        .sweep
        .m_values
        .par_iter()
        .map(|&m| sweep_point(&cfg, &object, &truth, m, &out_dir))
        .collect();

    let mut table =
        String::from("M\timage_psnr\tedge_psnr\tedge_snr\titerations\tseconds\tstatus\n");
    let mut image_series = Vec::new();
    let mut edge_series = Vec::new();
    for (&m, outcome) in cfg.sweep.m_values.iter().zip(&outcomes) {
        match outcome {
            Ok(s) => {
                let seconds = if a.timing {
                    format!("{:.3}", s.seconds)
                } else {
                    "NA".into()
                };
                let snr = s.edge_snr.map_or("null".into(), fixed4);
                table.push_str(&format!(
                    "{m}\t{}\t{}\t{snr}\t{}\t{seconds}\tok\n",
                    fixed4(s.image_psnr),
                    fixed4(s.edge_psnr),
                    s.iterations
                ));
                image_series.push((m as f64, s.image_psnr));
                edge_series.push((m as f64, s.edge_psnr));
            }
            Err(e) => {
                eprintln!("warning: sweep point M={m} failed: {e}");
                let reason = e.to_string().replace(['\t', '\n'], " ");
                table.push_str(&format!("{m}\tNA\tNA\tNA\tNA\tNA\terror: {reason}\n"));
            }
        }
    }
    std::fs::write(out_dir.join("summary.tsv"), &table)?;
    let chart = plot::render(
        &[
            Series {
                points: &image_series,
                gray: 0.0,
                filled_markers: true,
            },
            Series {
                points: &edge_series,
                gray: 0.5,
                filled_markers: false,
            },
        ],
        320,
        240,
    );
    io::save_pgm(out_dir.join("psnr_vs_m.pgm"), &chart, BitDepth::Eight)?;
    print!("{table}");
    Ok(())
}

pub fn phantom(a: &PhantomArgs) -> Result<()> {
    if a.size == 0 {
        return Err(Error::Parameter("size must be positive".into()));
    }
    let img = match a.kind {
        PhantomKind::Aircraft => phantom::aircraft(a.size, a.size),
        PhantomKind::Grayscale => phantom::grayscale_shapes(a.size, a.size),
    };
    io::save_pgm(&a.out, &img, BitDepth::Sixteen)
}
