use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fraclest::io::FieldFile;
use serde_json::Value;
use tempfile::TempDir;

fn fraclest(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fraclest"))
        .args(args)
        .env_remove("FRACLEST_THREADS")
        .env("FRACLEST_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) {
    let out = fraclest(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn code(args: &[&str]) -> i32 {
    fraclest(args).status.code().expect("exit code")
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

fn small_ic(dir: &Path) -> String {
    let path = p(dir, "ic.vfld");
    ok(&["gen-ic", "--n", "16", "--energy", "0.052", "--peak-k", "3", "--seed", "7", "-o", &path]);
    path
}

fn json(path: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn keys(v: &Value) -> Vec<String> {
    v.as_object().unwrap().keys().cloned().collect()
}

#[test]
fn gen_ic_is_deterministic_and_self_describing() {
    let dir = TempDir::new().unwrap();
    let a = p(dir.path(), "a.vfld");
    let b = p(dir.path(), "b.vfld");
    for path in [&a, &b] {
        ok(&["gen-ic", "--n", "16", "--energy", "0.052", "--peak-k", "4", "--seed", "7", "-o", path]);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let file = FieldFile::load(&a).unwrap();
    let meta = file.meta();
    assert_eq!(meta.seed, Some(7));
    assert_eq!(meta.nu, 0.001);
    assert_eq!(meta.time, 0.0);
    assert_eq!(file.grid().unwrap().n(), 16);
    let v = file.into_vector().unwrap();
    let k = fraclest::dns::compute_stats(&v, 1e-3, 0.0).unwrap().k;
    assert!(((k - 0.052) / 0.052).abs() <= 1e-12);
}

#[test]
fn usage_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let out = p(dir.path(), "x.vfld");
    assert_eq!(code(&["gen-ic", "--n", "7", "-o", &out]), 2);
    assert_eq!(code(&["gen-ic", "--bogus"]), 2);
    assert_eq!(code(&[]), 2);
    let ic = small_ic(dir.path());
    assert_eq!(code(&["apriori", "--in", &ic, "--alpha", "0:1:0.1"]), 2);
    assert_eq!(code(&["dns", "--ic", &ic, "--cfl", "0.9", "--out-dir", &p(dir.path(), "o")]), 2);
}

#[test]
fn degenerate_filter_exits_4() {
    let dir = TempDir::new().unwrap();
    let ic = small_ic(dir.path());
    assert_eq!(code(&["apriori", "--in", &ic, "--ldelta", "0"]), 4);
    assert_eq!(code(&["smag", "--in", &ic, "--ldelta", "0"]), 4);
}

#[test]
fn surrogate_failure_exits_5() {
    let dir = TempDir::new().unwrap();
    let samples = p(dir.path(), "s.csv");
    fs::write(&samples, "l_delta,re_lambda,alpha_opt\n1,20,0.5\n").unwrap();
    assert_eq!(code(&["kriging", "--samples", &samples, "-o", &p(dir.path(), "o.csv")]), 5);
    fs::write(&samples, "wrong,header\n1,2\n").unwrap();
    assert_eq!(code(&["kriging", "--samples", &samples, "-o", &p(dir.path(), "o.csv")]), 5);
}

#[test]
fn blowup_exits_3() {
    let dir = TempDir::new().unwrap();
    let ic = p(dir.path(), "hot.vfld");
    ok(&["gen-ic", "--n", "16", "--energy", "50", "--peak-k", "5", "-o", &ic]);
    let status = code(&[
        "dns", "--ic", &ic, "--nu", "1e-6", "--dt", "1", "--t-end", "50", "--out-dir", &p(dir.path(), "o"),
    ]);
    assert_eq!(status, 3);
}

#[test]
fn dump_config_round_trip_reproduces_outputs() {
    let dir = TempDir::new().unwrap();
    let ic = small_ic(dir.path());
    let cfg = p(dir.path(), "run.json");
    let direct = p(dir.path(), "direct.json");
    let replay = p(dir.path(), "replay.json");
    let args = |report: &str| -> Vec<String> {
        ["apriori", "--in", &ic, "--ldelta", "2", "--alpha", "0.2:1.0:0.2", "--report", report, "--seed", "3"]
            .iter()
            .map(|s| s.to_string())
            .collect()
    };
    let mut dump: Vec<String> = vec!["--dump-config".into(), cfg.clone()];
    dump.extend(args(&replay));
    ok(&dump.iter().map(String::as_str).collect::<Vec<_>>());
    assert!(!Path::new(&replay).exists(), "--dump-config must not run the command");

    let stored = json(&cfg);
    assert_eq!(stored["command"]["subcommand"], "apriori");
    assert_eq!(stored["command"]["seed"], 3);

    ok(&["--config", &cfg]);
    ok(&args(&direct).iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(fs::read(&direct).unwrap(), fs::read(&replay).unwrap());
    assert_eq!(code(&["--config", &cfg, "gen-ic", "-o", "x"]), 2);
}

#[test]
fn apriori_report_schema_and_rerun() {
    let dir = TempDir::new().unwrap();
    let ic = small_ic(dir.path());
    let run = |tag: &str| -> [String; 4] {
        let files = [
            p(dir.path(), &format!("r{tag}.json")),
            p(dir.path(), &format!("sweep{tag}.csv")),
            p(dir.path(), &format!("pdf{tag}.csv")),
            p(dir.path(), &format!("sc{tag}.csv")),
        ];
        ok(&[
            "apriori", "--in", &ic, "--ldelta", "2", "--alpha", "0.1:1.0:0.1", "--report", &files[0], "--sweep",
            &files[1], "--pdf", &files[2], "--scatter", &files[3], "--scatter-n", "500", "--seed", "1",
        ]);
        files
    };
    let first = run("1");
    let second = run("2");
    for (a, b) in first.iter().zip(&second) {
        assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap(), "{a} differs on rerun");
    }

    let r = json(&first[0]);
    let mut expect = vec![
        "alpha_opt", "alphas", "case", "entropy", "l_delta", "model", "re_lambda", "reg", "rho", "rho_ij", "seed",
        "selection_note",
    ];
    expect.sort();
    assert_eq!(keys(&r), expect);
    assert_eq!(r["model"], "fsgs");
    assert_eq!(r["case"], "ic");
    assert_eq!(r["alphas"].as_array().unwrap().len(), 10);
    assert_eq!(r["rho"].as_array().unwrap().len(), 10);
    assert_eq!(keys(&r["rho_ij"]), ["11", "12", "13", "22", "23", "33"]);
    assert!(r["entropy"]["mu_max"].is_number());
    // R is undefined where the model coefficient vanishes
    assert!(r["reg"][9].is_null());

    let sweep = fs::read_to_string(&first[1]).unwrap();
    assert!(sweep.starts_with("alpha,rho1,rho2,rho3,reg1,reg2,reg3\n"));
    assert_eq!(sweep.lines().count(), 11);
    assert!(fs::read_to_string(&first[3]).unwrap().starts_with("truth,model\n"));
    assert_eq!(fs::read_to_string(&first[3]).unwrap().lines().count(), 501);
    assert!(fs::read_to_string(&first[2])
        .unwrap()
        .starts_with("bin_center,density_truth,density_model\n"));
}

#[test]
fn smagorinsky_reports_share_the_schema() {
    let dir = TempDir::new().unwrap();
    let ic = small_ic(dir.path());
    let fsgs = p(dir.path(), "f.json");
    let via_apriori = p(dir.path(), "a.json");
    let via_smag = p(dir.path(), "s.json");
    let force = p(dir.path(), "force.vfld");
    let stress = p(dir.path(), "stress.vfld");
    ok(&["apriori", "--in", &ic, "--ldelta", "2", "--report", &fsgs]);
    ok(&["apriori", "--in", &ic, "--ldelta", "2", "--model", "smag", "--report", &via_apriori]);
    ok(&[
        "smag", "--in", &ic, "--ldelta", "2", "--report", &via_smag, "--force", &force, "--stress", &stress,
    ]);
    let a = json(&via_apriori);
    assert_eq!(keys(&a), keys(&json(&fsgs)));
    assert_eq!(a["model"], "smag");
    assert_eq!(a["rho"].as_array().unwrap().len(), 1);
    assert_eq!(fs::read(&via_apriori).unwrap(), fs::read(&via_smag).unwrap());

    let f = FieldFile::load(&force).unwrap();
    assert_eq!(f.meta().seed, Some(7));
    assert_eq!(f.into_vector().unwrap().grid().n(), 16);
    FieldFile::load(&stress).unwrap().into_tensor().unwrap();
}

#[test]
fn dns_writes_snapshots_and_stats() {
    let dir = TempDir::new().unwrap();
    let ic = small_ic(dir.path());
    let out = dir.path().join("run");
    let stats = p(dir.path(), "stats.csv");
    ok(&[
        "dns", "--ic", &ic, "--nu", "0.01", "--t-end", "0.5", "--snap", "0.25,0.5", "--stats", &stats, "--out-dir",
        &out.to_string_lossy(),
    ]);
    let text = fs::read_to_string(&stats).unwrap();
    assert!(text.starts_with("time,K,eps,re_lambda,eta,kmax_eta,skew,flat,L_int,tau_L\n"));
    let snaps: Vec<PathBuf> = fs::read_dir(&out).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(snaps.len(), 2);
    let snap = FieldFile::load(out.join("snap_t0.5.vfld")).unwrap();
    assert_eq!(snap.meta().time, 0.5);
    assert_eq!(snap.meta().seed, Some(7));
}

#[test]
fn kriging_surface_reproduces_samples() {
    let dir = TempDir::new().unwrap();
    let samples = p(dir.path(), "s.csv");
    fs::write(
        &samples,
        "l_delta,re_lambda,alpha_opt\n1,20,0.9\n4,20,0.7\n8,30,0.5\n2,45,0.85\n12,40,0.35\n6,50,0.6\n",
    )
    .unwrap();
    let surf = p(dir.path(), "surf.csv");
    ok(&[
        "kriging", "--samples", &samples, "--grid-ld", "1:12:1", "--grid-re", "20:50:5", "--theta", "0.8,0.8", "-o",
        &surf,
    ]);
    let text = fs::read_to_string(&surf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("l_delta,re_lambda,alpha_hat,variance"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 12 * 7);
    for (l, r, a) in [(1.0, 20.0, 0.9), (4.0, 20.0, 0.7), (8.0, 30.0, 0.5), (6.0, 50.0, 0.6)] {
        let row = rows.iter().find(|x| x[0] == l && x[1] == r).unwrap();
        assert!((row[2] - a).abs() <= 1e-8, "({l}, {r}): {}", row[2]);
        assert!(row[3].abs() <= 1e-8);
    }

    assert_eq!(code(&["kriging", "--samples", &samples, "--theta", "0.8", "-o", &surf]), 2);

    fs::write(&samples, "l_delta,re_lambda,alpha_opt\n1,20,0.4\n5,30,0.4\n9,45,0.4\n3,50,0.4\n").unwrap();
    ok(&["kriging", "--samples", &samples, "-o", &surf]);
    let text = fs::read_to_string(&surf).unwrap();
    for line in text.lines().skip(1) {
        let a: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!((a - 0.4).abs() <= 1e-12);
    }
}
