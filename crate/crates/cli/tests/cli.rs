use std::path::Path;
use std::process::{Command, Output};

use jigi::io::{self, BitDepth};
use jigi::metrics::{ground_truth_edge, psnr, snr};
use jigi::sensing::{generate_patterns, measure, NoiseModel};
use jigi::{phantom, Image, PatternStack};
use tempfile::TempDir;

fn jigi(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jigi"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = jigi(dir, args);
    assert!(
        out.status.success(),
        "jigi {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn field<'a>(report: &'a str, key: &str) -> &'a str {
    report
        .lines()
        .find_map(|l| l.strip_prefix(key)?.strip_prefix(" = "))
        .unwrap_or_else(|| panic!("no {key} in\n{report}"))
}

fn one_hot(rows: usize, cols: usize) -> PatternStack {
    let k = rows * cols;
    let mut data = vec![0.0f32; k * k];
    for m in 0..k {
        data[m * k + m] = 1.0;
    }
    PatternStack::new(k, rows, cols, data).unwrap()
}

#[test]
fn gen_patterns_is_deterministic_with_documented_header() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    let stdout = ok(
        d,
        &[
            "gen-patterns",
            "--rows",
            "8",
            "--cols",
            "8",
            "--M",
            "4",
            "--seed",
            "7",
            "--out",
            "a.gipt",
        ],
    );
    ok(
        d,
        &[
            "gen-patterns",
            "--rows",
            "8",
            "--cols",
            "8",
            "--M",
            "4",
            "--seed",
            "7",
            "--out",
            "b.gipt",
        ],
    );
    let a = std::fs::read(d.join("a.gipt")).unwrap();
    assert_eq!(a, std::fs::read(d.join("b.gipt")).unwrap());
    assert_eq!(&a[..4], b"GIPT");
    assert_eq!(a[4], 1);
    assert_eq!(u32::from_le_bytes(a[6..10].try_into().unwrap()), 4);
    assert_eq!(u32::from_le_bytes(a[10..14].try_into().unwrap()), 8);
    assert_eq!(u32::from_le_bytes(a[14..18].try_into().unwrap()), 8);
    assert_eq!(field(&stdout, "M"), "4");
    assert_eq!(field(&stdout, "density"), "0.5");
    assert_eq!(
        io::load_patterns(d.join("a.gipt")).unwrap(),
        generate_patterns(8, 8, 4, 0.5, 7).unwrap()
    );
}

#[test]
fn invalid_density_is_a_validation_error() {
    let tmp = TempDir::new().unwrap();
    let out = jigi(
        tmp.path(),
        &[
            "gen-patterns",
            "--rows",
            "8",
            "--cols",
            "8",
            "--M",
            "4",
            "--density",
            "1.5",
            "--out",
            "x.gipt",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(!tmp.path().join("x.gipt").exists());
}

#[test]
fn measure_zero_object_and_single_all_ones_pattern() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    io::save_pgm(d.join("zero.pgm"), &Image::zeros(5, 4), BitDepth::Eight).unwrap();
    ok(
        d,
        &[
            "gen-patterns",
            "--rows",
            "5",
            "--cols",
            "4",
            "--M",
            "6",
            "--out",
            "p.gipt",
        ],
    );
    ok(
        d,
        &[
            "measure",
            "--patterns",
            "p.gipt",
            "--object",
            "zero.pgm",
            "--out",
            "y.gims",
        ],
    );
    let y = io::load_measurements(d.join("y.gims")).unwrap();
    assert_eq!(y.values(), &[0.0; 6]);

    let object = phantom::grayscale_shapes(5, 4);
    io::save_pgm(d.join("gray.pgm"), &object, BitDepth::Sixteen).unwrap();
    io::save_patterns(
        d.join("ones.gipt"),
        &PatternStack::new(1, 5, 4, vec![1.0; 20]).unwrap(),
    )
    .unwrap();
    ok(
        d,
        &[
            "measure",
            "--patterns",
            "ones.gipt",
            "--object",
            "gray.pgm",
            "--out",
            "s.gims",
        ],
    );
    let loaded = io::load_pgm(d.join("gray.pgm")).unwrap();
    let total: f64 = loaded.pixels().iter().sum();
    assert_eq!(
        io::load_measurements(d.join("s.gims")).unwrap().values(),
        &[total]
    );
}

#[test]
fn measure_matches_library_bit_for_bit() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    ok(
        d,
        &[
            "phantom",
            "--kind",
            "grayscale",
            "--size",
            "12",
            "--out",
            "o.pgm",
        ],
    );
    ok(
        d,
        &[
            "gen-patterns",
            "--rows",
            "12",
            "--cols",
            "12",
            "--M",
            "30",
            "--seed",
            "5",
            "--out",
            "p.gipt",
        ],
    );
    ok(
        d,
        &[
            "measure",
            "--patterns",
            "p.gipt",
            "--object",
            "o.pgm",
            "--noise-sigma",
            "0.2",
            "--seed",
            "3",
            "--out",
            "y.gims",
        ],
    );
    let object = io::load_pgm(d.join("o.pgm")).unwrap();
    let expected = measure(
        &generate_patterns(12, 12, 30, 0.5, 5).unwrap(),
        &object,
        NoiseModel::gaussian(0.2).unwrap(),
        3,
    )
    .unwrap();
    let got = io::load_measurements(d.join("y.gims")).unwrap();
    assert!(got
        .values()
        .iter()
        .zip(expected.values())
        .all(|(a, b)| a.to_bits() == b.to_bits()));
}

#[test]
fn measure_shape_mismatch_reports_both_shapes() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    ok(
        d,
        &[
            "gen-patterns",
            "--rows",
            "8",
            "--cols",
            "8",
            "--M",
            "3",
            "--out",
            "p.gipt",
        ],
    );
    ok(d, &["phantom", "--size", "6", "--out", "o.pgm"]);
    let out = jigi(
        d,
        &[
            "measure",
            "--patterns",
            "p.gipt",
            "--object",
            "o.pgm",
            "--out",
            "y.gims",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("8x8") && err.contains("6x6"), "{err}");
}

#[test]
fn io_failures_exit_with_code_3() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    let out = jigi(
        d,
        &[
            "measure",
            "--patterns",
            "missing.gipt",
            "--object",
            "o.pgm",
            "--out",
            "y.gims",
        ],
    );
    assert_eq!(out.status.code(), Some(3));
    std::fs::write(d.join("bad.gipt"), b"GIPX\x01\x00").unwrap();
    ok(d, &["phantom", "--size", "4", "--out", "o.pgm"]);
    let out = jigi(
        d,
        &[
            "measure",
            "--patterns",
            "bad.gipt",
            "--object",
            "o.pgm",
            "--out",
            "y.gims",
        ],
    );
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn jigi_recovers_identity_fixture_within_one_gray_level() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    ok(
        d,
        &[
            "phantom", "--kind", "aircraft", "--size", "16", "--out", "o.pgm",
        ],
    );
    io::save_patterns(d.join("eye.gipt"), &one_hot(16, 16)).unwrap();
    ok(
        d,
        &[
            "measure",
            "--patterns",
            "eye.gipt",
            "--object",
            "o.pgm",
            "--out",
            "y.gims",
        ],
    );
    ok(
        d,
        &[
            "reconstruct",
            "--method",
            "jigi",
            "--patterns",
            "eye.gipt",
            "--measurements",
            "y.gims",
            "--omega",
            "1",
            "--epsilon",
            "1e-6",
            "--out-image",
            "r.pgm",
            "--out-log",
            "r.log",
        ],
    );
    let object = io::load_pgm(d.join("o.pgm")).unwrap().to_levels(65535);
    let recovered = io::load_pgm(d.join("r.pgm")).unwrap().to_levels(65535);
    let worst = object
        .iter()
        .zip(&recovered)
        .map(|(a, b)| a.abs_diff(*b))
        .max()
        .unwrap();
    assert!(worst <= 1, "max gray-level error {worst}");
}

#[test]
fn cgi_needs_two_patterns() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    ok(d, &["phantom", "--size", "8", "--out", "o.pgm"]);
    ok(
        d,
        &[
            "gen-patterns",
            "--rows",
            "8",
            "--cols",
            "8",
            "--M",
            "1",
            "--out",
            "p.gipt",
        ],
    );
    ok(
        d,
        &[
            "measure",
            "--patterns",
            "p.gipt",
            "--object",
            "o.pgm",
            "--out",
            "y.gims",
        ],
    );
    let out = jigi(
        d,
        &[
            "reconstruct",
            "--method",
            "cgi",
            "--patterns",
            "p.gipt",
            "--measurements",
            "y.gims",
            "--out-image",
            "c.pgm",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cgi_warns_about_filter_flags() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    ok(d, &["phantom", "--size", "8", "--out", "o.pgm"]);
    ok(
        d,
        &[
            "gen-patterns",
            "--rows",
            "8",
            "--cols",
            "8",
            "--M",
            "40",
            "--out",
            "p.gipt",
        ],
    );
    ok(
        d,
        &[
            "measure",
            "--patterns",
            "p.gipt",
            "--object",
            "o.pgm",
            "--out",
            "y.gims",
        ],
    );
    let out = jigi(
        d,
        &[
            "reconstruct",
            "--method",
            "cgi",
            "--radius",
            "3",
            "--patterns",
            "p.gipt",
            "--measurements",
            "y.gims",
            "--out-image",
            "c.pgm",
            "--out-log",
            "c.log",
        ],
    );
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--radius"));
    let log = std::fs::read_to_string(d.join("c.log")).unwrap();
    assert_eq!(field(&log, "method"), "cgi");
    let img = io::load_pgm(d.join("c.pgm")).unwrap();
    assert_eq!(img.min_max(), (0.0, 1.0));
}

#[test]
fn reconstruct_log_and_timing_flag() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    ok(d, &["phantom", "--size", "12", "--out", "o.pgm"]);
    ok(
        d,
        &[
            "gen-patterns",
            "--rows",
            "12",
            "--cols",
            "12",
            "--M",
            "50",
            "--out",
            "p.gipt",
        ],
    );
    ok(
        d,
        &[
            "measure",
            "--patterns",
            "p.gipt",
            "--object",
            "o.pgm",
            "--out",
            "y.gims",
        ],
    );
    let base = [
        "reconstruct",
        "--patterns",
        "p.gipt",
        "--measurements",
        "y.gims",
        "--out-image",
        "r.pgm",
        "--out-edge",
        "e.pgm",
    ];
    ok(
        d,
        &[&base[..], &["--out-log", "a.log", "--max-iters", "30"]].concat(),
    );
    ok(
        d,
        &[
            &base[..],
            &["--out-log", "b.log", "--max-iters", "30", "--timing"],
        ]
        .concat(),
    );
    let a = std::fs::read_to_string(d.join("a.log")).unwrap();
    let b = std::fs::read_to_string(d.join("b.log")).unwrap();
    assert!(!a.contains("wall_seconds"));
    assert!(field(&b, "wall_seconds").parse::<f64>().unwrap() >= 0.0);
    let iterations: usize = field(&a, "iterations").parse().unwrap();
    assert!(iterations <= 30);
    assert_eq!(field(&a, "residual_history").split(',').count(), iterations);
    assert_eq!(field(&a, "max_iterations"), "30");
    assert_eq!(field(&a, "omega").parse::<f64>().unwrap(), 1.5);
    let edge = io::load_pgm(d.join("e.pgm")).unwrap();
    assert_eq!(edge.min_max(), (0.0, 1.0));
}

#[test]
fn metrics_inf_and_closed_form() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    ok(d, &["phantom", "--size", "16", "--out", "o.pgm"]);
    let report = ok(
        d,
        &["metrics", "--reference", "o.pgm", "--candidate", "o.pgm"],
    );
    assert_eq!(field(&report, "psnr"), "inf");

    // maxval-10 graymaps: levels 3 and 4 differ by exactly 0.1
    let mut reference = b"P5\n4 4\n10\n".to_vec();
    reference.extend([3u8, 3, 3, 3, 3, 7, 7, 3, 3, 7, 7, 3, 3, 3, 3, 3]);
    let mut candidate = b"P5\n4 4\n10\n".to_vec();
    candidate.extend([4u8, 4, 4, 4, 4, 8, 8, 4, 4, 8, 8, 4, 4, 4, 4, 4]);
    std::fs::write(d.join("r.pgm"), &reference).unwrap();
    std::fs::write(d.join("c.pgm"), &candidate).unwrap();
    let report = ok(
        d,
        &[
            "metrics",
            "--reference",
            "r.pgm",
            "--candidate",
            "c.pgm",
            "--out",
            "m.txt",
        ],
    );
    assert_eq!(field(&report, "psnr"), "20.0000");
    assert_eq!(std::fs::read_to_string(d.join("m.txt")).unwrap(), report);
}

#[test]
fn metrics_match_library_values() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    let object = phantom::aircraft(24, 24);
    let candidate = Image::from_fn(24, 24, |i, j| {
        (object.get(i, j) * 0.8 + ((i * 7 + j * 3) % 11) as f64 / 50.0).min(1.0)
    });
    io::save_pgm(d.join("o.pgm"), &object, BitDepth::Sixteen).unwrap();
    io::save_pgm(d.join("c.pgm"), &candidate, BitDepth::Sixteen).unwrap();
    let report = ok(
        d,
        &[
            "metrics",
            "--reference",
            "o.pgm",
            "--candidate",
            "c.pgm",
            "--threshold",
            "0.3",
        ],
    );
    let (o, c) = (
        io::load_pgm(d.join("o.pgm")).unwrap(),
        io::load_pgm(d.join("c.pgm")).unwrap(),
    );
    let truth = ground_truth_edge(&o, 0.3).unwrap();
    assert_eq!(
        field(&report, "psnr"),
        format!("{:.4}", psnr(&o, &c, 1.0).unwrap())
    );
    assert_eq!(
        field(&report, "snr"),
        format!("{:.4}", snr(&c, &truth.mask).unwrap())
    );
    assert_eq!(
        field(&report, "psnr_exact").parse::<f64>().unwrap(),
        psnr(&o, &c, 1.0).unwrap()
    );

    let edge_report = ok(
        d,
        &[
            "metrics",
            "--reference",
            "o.pgm",
            "--candidate",
            "c.pgm",
            "--target",
            "edge",
        ],
    );
    let expected = psnr(&ground_truth_edge(&o, 0.25).unwrap().edge, &c, 1.0).unwrap();
    assert_eq!(field(&edge_report, "psnr"), format!("{expected:.4}"));
}

#[test]
fn metrics_undefined_snr_is_null_with_note() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    ok(d, &["phantom", "--size", "16", "--out", "o.pgm"]);
    io::save_pgm(
        d.join("flat.pgm"),
        &Image::filled(16, 16, 0.5),
        BitDepth::Eight,
    )
    .unwrap();
    let out = jigi(
        d,
        &["metrics", "--reference", "o.pgm", "--candidate", "flat.pgm"],
    );
    assert!(out.status.success());
    let report = String::from_utf8(out.stdout).unwrap();
    assert_eq!(field(&report, "snr"), "null");
    assert!(!field(&report, "snr_note").is_empty());
}

#[test]
fn metrics_accepts_explicit_edge_mask() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    let mask = Image::from_fn(8, 8, |_, j| if j == 4 { 1.0 } else { 0.0 });
    let candidate = Image::from_fn(8, 8, |i, j| if j == 4 { 0.9 } else { 0.1 * (i % 3) as f64 });
    io::save_pgm(d.join("mask.pgm"), &mask, BitDepth::Eight).unwrap();
    io::save_pgm(d.join("c.pgm"), &candidate, BitDepth::Sixteen).unwrap();
    let report = ok(
        d,
        &[
            "metrics",
            "--reference",
            "mask.pgm",
            "--candidate",
            "c.pgm",
            "--mask-source",
            "mask.pgm",
        ],
    );
    assert_eq!(field(&report, "edge_pixels"), "8");
    let c = io::load_pgm(d.join("c.pgm")).unwrap();
    let m = jigi::metrics::RegionMask::from_edge_image(&mask).unwrap();
    assert_eq!(
        field(&report, "snr"),
        format!("{:.4}", snr(&c, &m).unwrap())
    );
}

#[test]
fn sweep_table_plot_and_determinism() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    std::fs::write(
        d.join("s.toml"),
        "seed = 1\n[sweep]\nm_values = [100, 150, 200]\nphantom = \"aircraft\"\n",
    )
    .unwrap();
    ok(d, &["sweep", "--config", "s.toml", "--out-dir", "a"]);
    ok(d, &["sweep", "--config", "s.toml", "--out-dir", "b"]);
    let table = std::fs::read_to_string(d.join("a/summary.tsv")).unwrap();
    assert_eq!(
        table,
        std::fs::read_to_string(d.join("b/summary.tsv")).unwrap()
    );
    let mut lines = table.lines();
    assert_eq!(
        lines.next().unwrap(),
        "M\timage_psnr\tedge_psnr\tedge_snr\titerations\tseconds\tstatus"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split('\t').collect()).collect();
    assert_eq!(rows.len(), 3);
    let psnrs: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(psnrs.windows(2).all(|w| w[1] >= w[0] - 0.5), "{psnrs:?}");
    assert!(rows.iter().all(|r| r[5] == "NA" && r[6] == "ok"));
    for m in [100, 150, 200] {
        assert!(d.join(format!("a/M{m}_image.pgm")).exists());
        assert!(d.join(format!("a/M{m}_edge.pgm")).exists());
    }
    let plot = io::load_pgm(d.join("a/psnr_vs_m.pgm")).unwrap();
    assert_eq!(plot.shape(), (240, 320));
    assert!(plot.pixels().iter().any(|&p| p < 1.0));
}

#[test]
fn sweep_needs_an_output_directory() {
    let tmp = TempDir::new().unwrap();
    std::fs::write(tmp.path().join("s.toml"), "[sweep]\nm_values = [10]\n").unwrap();
    let out = jigi(tmp.path(), &["sweep", "--config", "s.toml"]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::write(tmp.path().join("bad.toml"), "[sweep]\nm_value = [10]\n").unwrap();
    let out = jigi(
        tmp.path(),
        &["sweep", "--config", "bad.toml", "--out-dir", "x"],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reconstruct_matches_library() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    ok(d, &["phantom", "--size", "16", "--out", "o.pgm"]);
    ok(
        d,
        &[
            "gen-patterns",
            "--rows",
            "16",
            "--cols",
            "16",
            "--M",
            "60",
            "--seed",
            "2",
            "--out",
            "p.gipt",
        ],
    );
    ok(
        d,
        &[
            "measure",
            "--patterns",
            "p.gipt",
            "--object",
            "o.pgm",
            "--out",
            "y.gims",
        ],
    );
    ok(
        d,
        &[
            "reconstruct",
            "--patterns",
            "p.gipt",
            "--measurements",
            "y.gims",
            "--radius",
            "2",
            "--out-image",
            "r.pgm",
            "--out-edge",
            "e.pgm",
            "--out-log",
            "r.log",
        ],
    );
    let patterns = io::load_patterns(d.join("p.gipt")).unwrap();
    let y = io::load_measurements(d.join("y.gims")).unwrap();
    let cfg = jigi::JigiConfig {
        filter: jigi::GuidedFilterParams::new(2, jigi::guided_filter::DEFAULT_EPSILON).unwrap(),
        ..jigi::JigiConfig::default()
    };
    let lib = jigi::jigi::reconstruct_jigi(&patterns, &y, &cfg).unwrap();
    let mut expected = Vec::new();
    io::write_pgm(&mut expected, &lib.image.clamped(), BitDepth::Sixteen).unwrap();
    assert_eq!(std::fs::read(d.join("r.pgm")).unwrap(), expected);
    let mut expected_edge = Vec::new();
    io::write_pgm(
        &mut expected_edge,
        &lib.edge.normalized(),
        BitDepth::Sixteen,
    )
    .unwrap();
    assert_eq!(std::fs::read(d.join("e.pgm")).unwrap(), expected_edge);
    let log = std::fs::read_to_string(d.join("r.log")).unwrap();
    assert_eq!(field(&log, "iterations"), lib.iterations_run.to_string());
}
