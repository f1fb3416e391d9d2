use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fracfield::field::SamplingGrid;
use fracfield::fft::CenteredFft;
use fracfield::io::load_array;
use fracfield::propagation::{map_order, OpticalConfig};
use fracfield_cli::bundle::load_bundle;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fracfield"))
}

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = run(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn propagate_writes_artifacts_with_order_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("frft");
    ok(&["propagate", "--model", "frft", "--distance", "0.01", "--out", out.to_str().unwrap()]);
    for f in ["field.npy", "intensity.npy", "intensity.pgm", "metadata.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let meta = json(&out.join("metadata.json"));
    let cfg = OpticalConfig::new(500e-9, 0.01, SamplingGrid::square(512, 1000e-6 / 512.0).unwrap()).unwrap();
    let os = map_order(&cfg);
    assert!((meta["p"].as_f64().unwrap() - os.p).abs() < 1e-12);
    assert!((meta["s2"].as_f64().unwrap() - os.s2).abs() < 1e-12);
    assert_eq!(meta["model"], "frft");
    assert_eq!(load_array(out.join("intensity.npy")).unwrap().shape(), &[512, 512]);
}

#[test]
fn invalid_model_is_a_usage_error() {
    let o = run(&["propagate", "--model", "angular"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn compare_csv_is_complete_ordered_and_repeatable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "cmp.toml", "n = 256\ndistances = [1e-3, 10e-3, 50e-3]\nkeep_images = true\n");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    ok(&["--config", cfg.to_str().unwrap(), "--out", a.to_str().unwrap(), "compare"]);
    ok(&["--config", cfg.to_str().unwrap(), "--out", b.to_str().unwrap(), "compare"]);
    let csv = fs::read_to_string(a.join("compare.csv")).unwrap();
    assert_eq!(csv, fs::read_to_string(b.join("compare.csv")).unwrap());
    let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 9);
    for chunk in rows.chunks(3) {
        let psnr = |m: &str| chunk.iter().find(|r| r[1] == m).unwrap()[2].parse::<f64>().unwrap();
        assert!(psnr("frft") >= psnr("sft") && psnr("frft") >= psnr("tf"), "{chunk:?}");
    }
    assert!(a.join("images/reference_10000um.pgm").exists());
}

#[test]
fn retrieve_with_and_without_truth() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("p05");
    let out = ok(&["retrieve", "--order", "0.5", "--truth", "--out", good.to_str().unwrap()]);
    let report = json(&good.join("report.json"));
    assert!(report["final_psnr_db"].as_f64().unwrap() > 20.0, "{out}");
    assert_eq!(report["stagnated"], false);
    assert!(fs::read_to_string(good.join("trace.csv")).unwrap().starts_with("iter,loss,psnr_db\n"));

    let fourier = dir.path().join("p1");
    let out = ok(&["retrieve", "--order", "1", "--truth", "--out", fourier.to_str().unwrap()]);
    assert!(out.contains("stagnation"), "{out}");
    assert_eq!(json(&fourier.join("report.json"))["stagnated"], true);

    let blind = dir.path().join("blind");
    let cfg = write_config(dir.path(), "short.toml", "max_iters = 20\nsolver = \"gap-tv\"\n");
    ok(&["--config", cfg.to_str().unwrap(), "retrieve", "--out", blind.to_str().unwrap()]);
    let trace = fs::read_to_string(blind.join("trace.csv")).unwrap();
    assert!(trace.starts_with("iter,loss\n"));
    assert_eq!(trace.lines().count(), 21);
    assert!(json(&blind.join("report.json"))["final_psnr_db"].is_null());
}

#[test]
fn divergence_exits_with_numeric_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.toml", "n = 16\nmax_iters = 300\nstep = 1e200\nconstraint = \"none\"\n");
    let o = run(&["--config", cfg.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap(), "retrieve"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn config_and_io_failures_have_distinct_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["--config", "/no/such/config.toml", "compare"]).status.code(), Some(2));
    let cfg = write_config(dir.path(), "missing.toml", "object = \"nowhere.pgm\"\n");
    assert_eq!(run(&["--config", cfg.to_str().unwrap(), "retrieve", "--out", dir.path().to_str().unwrap()]).status.code(), Some(2));
    let cfg = write_config(dir.path(), "typo.toml", "wavelenght = 5e-7\n");
    assert_eq!(run(&["--config", cfg.to_str().unwrap(), "compare"]).status.code(), Some(2));
    let file = dir.path().join("plain-file");
    fs::write(&file, b"x").unwrap();
    assert_eq!(run(&["scene", "--n", "8", "--out", file.to_str().unwrap()]).status.code(), Some(4));
}

#[test]
fn ambiguity_distances() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "amb.toml", "n = 64\nshift = 16\nruns = true\nmax_iters = 10\n");
    ok(&["--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "ambiguity"]);
    let csv = fs::read_to_string(dir.path().join("distances.csv")).unwrap();
    let rows: Vec<Vec<f64>> = csv.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows[0][0], 1.0);
    assert!(rows[0][1] <= 1e-10 && rows[0][2] <= 1e-10);
    assert!(rows[1][1] > 1e-2 && rows[1][2] > 1e-2);
    assert_eq!(fs::read_to_string(dir.path().join("traces.csv")).unwrap().lines().count(), 1 + 4 * 10);
}

#[test]
fn wvd_exports_three_maps() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["wvd", "--alpha", "0.6", "--out", dir.path().to_str().unwrap()]);
    for stem in ["wvd", "frwvd", "sfr"] {
        for ext in [".npy", ".pgm", "_axes.csv"] {
            assert!(dir.path().join(format!("{stem}{ext}")).exists(), "{stem}{ext}");
        }
    }
    let o = run(&["wvd", "--alpha", "0", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn export_round_trips_and_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = root().join("golden/p05_amplitude.toml");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        ok(&["--config", cfg.to_str().unwrap(), "--out", d.to_str().unwrap(), "export-forward"]);
    }
    for f in ["bundle.json", "object.npy", "measurement.npy"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let (meta, object, m) = load_bundle(&a).unwrap();
    assert_eq!(meta.order, 0.5);
    let op = fracfield::retrieval::FrftOperator::for_measurement(&m).unwrap();
    let again = op.measure(&object).unwrap();
    assert!(again.iter().zip(m.amplitude()).all(|(x, y)| (x - y).abs() <= 1e-12));
}

fn max_rel(a: &[f64], b: &[f64]) -> f64 {
    let peak = b.iter().copied().fold(0.0, f64::max);
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / peak
}

#[test]
fn golden_bundles_match_current_forward_model() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["p05_amplitude", "p05_phase", "p1_amplitude", "p0_amplitude"] {
        let golden = root().join("golden").join(name);
        let cfg = root().join(format!("golden/{name}.toml"));
        let fresh = dir.path().join(name);
        ok(&["--config", cfg.to_str().unwrap(), "--out", fresh.to_str().unwrap(), "export-forward"]);
        assert_eq!(fs::read(golden.join("bundle.json")).unwrap(), fs::read(fresh.join("bundle.json")).unwrap(), "{name}");
        let (_, _, g) = load_bundle(&golden).unwrap();
        let (_, _, f) = load_bundle(&fresh).unwrap();
        assert!(max_rel(f.amplitude(), g.amplitude()) <= 1e-12, "{name}");
    }
}

#[test]
fn golden_integer_orders_have_closed_forms() {
    let (_, object, m) = load_bundle(&root().join("golden/p0_amplitude")).unwrap();
    let direct: Vec<f64> = object.data().iter().map(|z| z.norm()).collect();
    assert_eq!(m.amplitude(), &direct[..]);

    let (_, object, m) = load_bundle(&root().join("golden/p1_amplitude")).unwrap();
    let n = object.grid().n();
    let fft = CenteredFft::new(n);
    let mut data = object.data().to_vec();
    for row in data.chunks_mut(n) {
        fft.forward(row);
    }
    for c in 0..n {
        let mut col: Vec<_> = (0..n).map(|r| data[r * n + c]).collect();
        fft.forward(&mut col);
        for r in 0..n {
            data[r * n + c] = col[r];
        }
    }
    let dft: Vec<f64> = data.iter().map(|z| z.norm()).collect();
    assert!(max_rel(m.amplitude(), &dft) <= 1e-10);
}
