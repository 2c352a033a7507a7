use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_minpath"))
}

fn scene(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/scenes").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn minpath")
}

fn urban_args(out: &Path, workers: &str) -> Vec<String> {
    [
        "--scene",
        scene("urban.json").to_str().unwrap(),
        "--bs",
        "0,0,22",
        "--ue",
        "8,0,2",
        "--max-interactions",
        "3",
        "--workers",
        workers,
        "--out-dir",
        out.to_str().unwrap(),
    ]
    .map(String::from)
    .to_vec()
}

fn read_all(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn urban_run_writes_all_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&urban_args(dir.path(), "2").iter().map(String::as_str).collect::<Vec<_>>());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let names: Vec<String> = read_all(dir.path()).into_iter().map(|(n, _)| n).collect();
    assert_eq!(names, ["classes.csv", "fields.csv", "paths.json", "polylines.csv"]);

    let classes = fs::read_to_string(dir.path().join("classes.csv")).unwrap();
    let mut lines = classes.lines();
    assert_eq!(lines.next(), Some("interaction_list,n_paths,E_over_ELOS_dB"));
    let labels: Vec<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(labels.len(), 15);
    assert_eq!(&labels[..4], ["LOS", "R", "D", "RR"]);

    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("paths.json")).unwrap()).unwrap();
    let paths = json["paths"].as_array().unwrap();
    assert!(!paths.is_empty());
    for p in paths {
        let n = p["candidate"].as_array().unwrap().len();
        assert_eq!(p["points"].as_array().unwrap().len(), n + 2);
    }
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("visibility") && stderr.contains("fields"));
}

#[test]
fn reruns_are_byte_identical_and_worker_independent() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    for (d, w) in [(&a, "1"), (&b, "1"), (&c, "8")] {
        let args = urban_args(d.path(), w);
        let out = run(&args.iter().map(String::as_str).collect::<Vec<_>>());
        assert!(out.status.success());
    }
    assert_eq!(read_all(a.path()), read_all(b.path()));
    assert_eq!(read_all(a.path()), read_all(c.path()));
}

#[test]
fn los_only_run_has_one_empty_candidate() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.json");
    fs::write(&empty, r#"{"facets": []}"#).unwrap();
    let out_dir = dir.path().join("out");
    let out = run(&[
        "--scene",
        empty.to_str().unwrap(),
        "--bs",
        "0,0,0",
        "--ue",
        "3,4,0",
        "--max-interactions",
        "0",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("paths.json")).unwrap()).unwrap();
    let paths = json["paths"].as_array().unwrap();
    assert_eq!(paths.len(), 1);
    assert_eq!(paths[0]["candidate"].as_array().unwrap().len(), 0);
    assert_eq!(paths[0]["status"], "valid");
    let classes = fs::read_to_string(out_dir.join("classes.csv")).unwrap();
    let los: f64 = classes.lines().nth(1).unwrap().rsplit(',').next().unwrap().parse().unwrap();
    assert!(los.abs() < 1e-12);
}

#[test]
fn blocked_run_writes_headers_only() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    // BS west of building 1, UE east of building 3: LOS is blocked.
    let out = run(&[
        "--scene",
        scene("urban.json").to_str().unwrap(),
        "--bs",
        "-10,0,2",
        "--ue",
        "40,0,2",
        "--max-interactions",
        "0",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(
        fs::read_to_string(out_dir.join("fields.csv")).unwrap(),
        "ue,path_index,class,candidate,ex_re,ex_im,ey_re,ey_im,ez_re,ez_im,db_rel_los\n"
    );
    assert_eq!(
        fs::read_to_string(out_dir.join("polylines.csv")).unwrap(),
        "ue,path_index,class,vertex,x,y,z\n"
    );
    assert!(fs::read_to_string(out_dir.join("classes.csv")).unwrap().contains("LOS,0,-inf"));
}

#[test]
fn multiple_ues_and_adjacency_dump() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "--scene",
        scene("two_mirrors.json").to_str().unwrap(),
        "--bs",
        "2,-1,0",
        "--ue",
        "2,4,0",
        "--ue",
        "1,3,0",
        "--out-dir",
        dir.path().to_str().unwrap(),
        "--dump-adjacency",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["classes_ue0.csv", "classes_ue1.csv", "adjacency_ue0.csv", "adjacency_ue1.csv"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let polylines = fs::read_to_string(dir.path().join("polylines.csv")).unwrap();
    // The two-bounce path through (20/7, 20/7) and (5, 10/3).
    assert!(polylines.lines().any(|l| l.starts_with("0,") && l.contains(",RR,1,2.857142857142857")));
}

#[test]
fn config_errors_exit_with_2() {
    let s = scene("urban.json");
    let s = s.to_str().unwrap();
    let cases: [&[&str]; 4] = [
        &["--scene", s, "--bs", "0,0,22", "--ue", "8,0,2", "--restarts", "0"],
        &["--scene", s, "--bs", "0,0,22", "--ue", "8,0,2", "--freq-hz", "-1"],
        &["--scene", s, "--bs", "0,0,22", "--ue", "8,0,2", "--max-interactions", "1", "--max-diffractions", "2"],
        &["--scene", s, "--bs", "0,0", "--ue", "8,0,2"],
    ];
    for args in cases {
        let dir = tempfile::tempdir().unwrap();
        let mut a = args.to_vec();
        a.extend(["--out-dir", dir.path().to_str().unwrap()]);
        assert_eq!(run(&a).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn toml_config_is_applied_and_checked() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "[solver]\nrestarts = 0\n").unwrap();
    let s = scene("two_mirrors.json");
    let base = ["--scene", s.to_str().unwrap(), "--bs", "2,-1,0", "--ue", "2,4,0"];
    let out_dir = dir.path().join("out");
    let mut a = base.to_vec();
    a.extend(["--config", cfg.to_str().unwrap(), "--out-dir", out_dir.to_str().unwrap()]);
    assert_eq!(run(&a).status.code(), Some(2));
    // A flag overrides the file.
    a.extend(["--restarts", "3"]);
    assert_eq!(run(&a).status.code(), Some(0));

    fs::write(&cfg, "[solver]\nbogus = 1\n").unwrap();
    assert_eq!(run(&a).status.code(), Some(2));
}

#[test]
fn scene_errors_exit_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"facets": [{"id": 0, "vertices": [[0,0,0],[1,0,0]]}]}"#).unwrap();
    let missing = dir.path().join("missing.json");
    for s in [&bad, &missing] {
        let out = run(&[
            "--scene",
            s.to_str().unwrap(),
            "--bs",
            "0,0,1",
            "--ue",
            "1,1,1",
            "--out-dir",
            dir.path().join("out").to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    }
}
