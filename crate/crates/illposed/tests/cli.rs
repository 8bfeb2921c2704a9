use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use illposed::csvio::{read_csv, Table};
use illposed::experiments::{deblur_instance, missing_data, quintic_data, DeblurSetup};
use illposed::pgm::read_pgm;
use illposed_core::freq::high_frequency_energy;
use illposed_core::linalg::svd;
use illposed_core::operators::conv_matrix;
use illposed_core::phantom::blocks;
use illposed_core::regression::{ols, ridge_bias_variance};
use illposed_core::spectral::picard_table;
use illposed_core::BoundaryCondition;
use tempfile::TempDir;

fn illposed(dir: &Path, args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_illposed"))
        .args(args)
        .arg("--output-dir")
        .arg(dir)
        .output()
        .expect("binary runs");
    out
}

fn ok(dir: &Path, args: &[&str]) {
    let out = illposed(dir, args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn csv(dir: &Path, name: &str) -> Table {
    read_csv(dir.join(name)).unwrap()
}

fn col(t: &Table, name: &str) -> Vec<f64> {
    t.column(name).unwrap_or_else(|| panic!("column {name}"))
}

fn files(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    v.sort();
    v
}

fn key(text: &str, k: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{k}=")))
        .unwrap()
        .to_string()
}

#[test]
fn wider_psf_has_smaller_singular_values() {
    let mut spectra = Vec::new();
    let mut conds = Vec::new();
    for s in ["0.6", "0.9", "1.2"] {
        let d = TempDir::new().unwrap();
        let psf = format!("gaussian:9:{s}");
        ok(
            d.path(),
            &[
                "analyze",
                "--size",
                "16",
                "--psf",
                &psf,
                "--bc",
                "reflexive",
                "--top",
                "256",
            ],
        );
        spectra.push(col(&csv(d.path(), "singular_values.csv"), "sigma"));
        let text = fs::read_to_string(d.path().join("condition.txt")).unwrap();
        conds.push(key(&text, "condition").parse::<f64>().unwrap());
    }
    assert_eq!(spectra[0].len(), 256);
    for i in 1..256 {
        assert!(
            spectra[0][i] > spectra[1][i] && spectra[1][i] > spectra[2][i],
            "index {i}"
        );
    }
    assert!(conds[0] < conds[1] && conds[1] < conds[2], "{conds:?}");
}

#[test]
fn identity_operator_has_flat_spectrum() {
    let d = TempDir::new().unwrap();
    ok(
        d.path(),
        &["analyze", "--size", "8", "--operator", "identity"],
    );
    assert!(col(&csv(d.path(), "singular_values.csv"), "sigma")
        .iter()
        .all(|s| *s == 1.0));
    let text = fs::read_to_string(d.path().join("condition.txt")).unwrap();
    assert_eq!(key(&text, "condition"), "1");
    assert_eq!(key(&text, "rank"), "64");
}

#[test]
fn picard_file_matches_library() {
    let d = TempDir::new().unwrap();
    ok(
        d.path(),
        &[
            "analyze",
            "--size",
            "12",
            "--psf",
            "gaussian:5:1",
            "--bc",
            "zero",
        ],
    );
    let kernel = "gaussian:5:1"
        .parse::<illposed::specs::PsfSpec>()
        .unwrap()
        .build()
        .unwrap();
    let a = conv_matrix(kernel.kernel(), 12, 12, BoundaryCondition::Zero).unwrap();
    let y = &a * blocks(12, 12).vectorize();
    let table = illposed::commands::picard_csv(&picard_table(&svd(&a).unwrap(), &y).unwrap());
    assert_eq!(
        fs::read(d.path().join("picard.csv")).unwrap(),
        table.to_bytes().unwrap()
    );
}

#[test]
fn inverse_crime_is_exact() {
    let d = TempDir::new().unwrap();
    ok(
        d.path(),
        &[
            "deblur", "--size", "16", "--noise", "none", "--method", "naive",
        ],
    );
    let psnr = col(&csv(d.path(), "report.csv"), "psnr")[0];
    assert!(psnr >= 100.0, "{psnr}");
}

#[test]
fn tikhonov_lambda_list() {
    let d = TempDir::new().unwrap();
    ok(
        d.path(),
        &[
            "deblur",
            "--method",
            "tikhonov",
            "--lambda",
            "0.1,8e-5,0.0025",
        ],
    );
    let r = csv(d.path(), "report.csv");
    assert_eq!(col(&r, "param"), vec![8e-5, 0.0025, 0.1]);
    let m = col(&r, "mse");
    assert!(m[1] < m[0] && m[1] < m[2], "{m:?}");
    let imgs: Vec<Vec<u8>> = (0..3)
        .map(|i| fs::read(d.path().join(format!("tikhonov_{i}.pgm"))).unwrap())
        .collect();
    assert!(imgs[0] != imgs[1] && imgs[1] != imgs[2]);
    assert!(d.path().join("observed.pgm").exists());
}

#[test]
fn wiener_damping_order() {
    let d = TempDir::new().unwrap();
    ok(
        d.path(),
        &[
            "deblur",
            "--method",
            "wiener",
            "--bc",
            "periodic",
            "--nsr",
            "0.1,0.01",
            "--noise",
            "gaussian:0.01",
        ],
    );
    let lo = read_pgm(d.path().join("wiener_0.pgm")).unwrap();
    let hi = read_pgm(d.path().join("wiener_1.pgm")).unwrap();
    assert!(high_frequency_energy(&hi) < high_frequency_energy(&lo));
    let e = illposed(d.path(), &["deblur", "--method", "wiener"]);
    assert!(!e.status.success());
}

#[test]
fn iterative_methods_write_histories() {
    let d = TempDir::new().unwrap();
    ok(
        d.path(),
        &[
            "deblur", "--size", "16", "--method", "cgls", "--iters", "25",
        ],
    );
    let h = csv(d.path(), "history_cgls.csv");
    assert_eq!(h.rows.len(), 25);
    assert_eq!(
        h.header,
        [
            "iter",
            "objective",
            "residual_norm",
            "solution_norm",
            "aux0",
            "aux1"
        ]
    );
}

#[test]
fn missing_data_cases() {
    let d = TempDir::new().unwrap();
    ok(d.path(), &["missing", "--l", "identity", "--lambda", "0.5"]);
    let t = csv(d.path(), "missing.csv");
    let (mask, rec) = (col(&t, "mask"), col(&t, "reconstructed"));
    assert!(mask.iter().zip(&rec).all(|(m, r)| *m == 1.0 || *r == 0.0));

    let d = TempDir::new().unwrap();
    ok(d.path(), &["missing", "--l", "d1", "--lambda", "1e-4"]);
    let t = csv(d.path(), "missing.csv");
    let rec = col(&t, "reconstructed");
    let scale = rec.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    for (a, b) in [(50usize, 70usize), (120, 150)] {
        for i in a..b - 1 {
            let d2 = rec[i + 1] - 2.0 * rec[i] + rec[i - 1];
            assert!(d2.abs() <= 1e-3 * scale, "index {i}: {d2}");
        }
    }

    let d = TempDir::new().unwrap();
    ok(
        d.path(),
        &[
            "missing",
            "--l",
            "d2",
            "--noise",
            "gaussian:0.2",
            "--lambda",
            "0.01,10",
        ],
    );
    let s = csv(d.path(), "missing_summary.csv");
    let m = col(&s, "mse");
    assert!(m[1] < m[0], "{m:?}");
    // the library builds the same data
    let data = missing_data(200, &[(50, 70), (120, 150)], 0.2, 7).unwrap();
    let t0 = csv(d.path(), "missing_0.csv");
    assert_eq!(
        col(&t0, "corrupted"),
        data.observed.iter().copied().collect::<Vec<_>>()
    );
}

#[test]
fn interpolation_prefers_trigonometric_basis() {
    let d = TempDir::new().unwrap();
    ok(d.path(), &["interp"]);
    let m = csv(d.path(), "interp_metrics.csv");
    assert!(col(&m, "mse_trig")[0] < col(&m, "mse_poly")[0]);
    assert!(col(&m, "residual_rms_trig")[0] <= 0.1 * 1.5);
    assert!(col(&m, "poly_condition")[0] > 1e3);
}

#[test]
fn compressed_sensing_metrics() {
    let d = TempDir::new().unwrap();
    ok(d.path(), &["cs"]);
    let m = csv(d.path(), "cs_metrics.csv");
    assert_eq!(col(&m, "m")[0], 20.0);
    assert!(col(&m, "l1_mse")[0] < col(&m, "pinv_mse")[0]);
    assert_eq!(csv(d.path(), "cs_signal.csv").rows.len(), 64);
}

#[test]
fn regression_bias_variance_matches_library() {
    let d = TempDir::new().unwrap();
    ok(d.path(), &["regress", "--lambda-grid", "0.01:10:5"]);
    let data = quintic_data(50, 1.0, 7).unwrap();
    let beta = ols(&data.design, &data.truth).unwrap();
    let grid = illposed_core::linalg::logspace(0.01, 10.0, 5);
    let lib = ridge_bias_variance(&data.design, &beta, 1.0, &grid).unwrap();
    let t = csv(d.path(), "bias_variance.csv");
    assert_eq!(
        col(&t, "variance"),
        lib.iter().map(|r| r.variance).collect::<Vec<_>>()
    );
    assert_eq!(
        col(&t, "bias2"),
        lib.iter().map(|r| r.bias2).collect::<Vec<_>>()
    );
    let n = csv(d.path(), "norms.csv");
    assert!(col(&n, "ridge_norm")[0] < col(&n, "ols_norm")[0]);
}

#[test]
fn config_file_and_flag_precedence() {
    let d = TempDir::new().unwrap();
    let cfg = d.path().join("run.conf");
    fs::write(&cfg, "method = tikhonov\nlambda = 0.1\nsize = 16\n").unwrap();
    let out = d.path().join("a");
    ok(&out, &["deblur", "--config", cfg.to_str().unwrap()]);
    assert_eq!(col(&csv(&out, "report.csv"), "param"), vec![0.1]);
    let out = d.path().join("b");
    ok(
        &out,
        &[
            "deblur",
            "--config",
            cfg.to_str().unwrap(),
            "--lambda",
            "0.0025",
        ],
    );
    assert_eq!(col(&csv(&out, "report.csv"), "param"), vec![0.0025]);

    fs::write(&cfg, "lamda = 0.1\n").unwrap();
    let r = illposed(
        &d.path().join("c"),
        &["deblur", "--config", cfg.to_str().unwrap()],
    );
    assert!(!r.status.success());
    assert!(String::from_utf8_lossy(&r.stderr).contains("lamda"));
}

#[test]
fn failures_leave_nothing_behind() {
    let d = TempDir::new().unwrap();
    let r = illposed(d.path(), &["deblur", "--method", "bogus"]);
    assert!(!r.status.success());
    assert!(String::from_utf8_lossy(&r.stderr).contains("unknown method"));
    assert!(!d.path().exists() || files(d.path()).is_empty());

    let big = illposed(d.path(), &["deblur", "--size", "80", "--method", "naive"]);
    assert!(!big.status.success());

    // mismatched truth
    let src = TempDir::new().unwrap();
    ok(src.path(), &["phantom", "--size", "16"]);
    let small = TempDir::new().unwrap();
    ok(small.path(), &["phantom", "--size", "8"]);
    let r = illposed(
        d.path(),
        &[
            "deblur",
            "--input",
            src.path().join("phantom.pgm").to_str().unwrap(),
            "--truth",
            small.path().join("phantom.pgm").to_str().unwrap(),
        ],
    );
    assert!(!r.status.success());
    assert!(String::from_utf8_lossy(&r.stderr).contains("dimension mismatch"));
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let args = [
        "deblur",
        "--size",
        "16",
        "--method",
        "fista-l1",
        "--lambda",
        "0.01,0.05",
        "--iters",
        "40",
    ];
    ok(a.path(), &args);
    ok(b.path(), &args);
    let (fa, fb) = (files(a.path()), files(b.path()));
    assert_eq!(fa.len(), fb.len());
    for (x, y) in fa.iter().zip(&fb) {
        assert_eq!(x.file_name(), y.file_name());
        assert!(!x.file_name().unwrap().to_string_lossy().ends_with(".tmp"));
        assert_eq!(
            fs::read(x).unwrap(),
            fs::read(y).unwrap(),
            "{}",
            x.display()
        );
    }
}

#[test]
fn simulated_input_round_trip() {
    let src = TempDir::new().unwrap();
    ok(src.path(), &["phantom", "--size", "16"]);
    let truth = read_pgm(src.path().join("phantom.pgm")).unwrap();
    let d = TempDir::new().unwrap();
    ok(
        d.path(),
        &[
            "deblur",
            "--simulate",
            "--input",
            src.path().join("phantom.pgm").to_str().unwrap(),
            "--lambda",
            "0.001",
        ],
    );
    let inst = deblur_instance(
        &DeblurSetup {
            size: 16,
            ..DeblurSetup::default()
        },
        Some(truth),
    )
    .unwrap();
    let observed = read_pgm(d.path().join("observed.pgm")).unwrap();
    let expect = inst.observed();
    let diff = observed
        .data()
        .iter()
        .zip(expect.data())
        .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    // PGM quantization only
    assert!(diff <= 1.0 / 255.0, "{diff}");
}
