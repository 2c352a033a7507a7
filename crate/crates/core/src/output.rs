//! Report files: `paths.json`, `fields.csv`, `classes.csv`, `polylines.csv`.
//!
//! Floats are written with 17 significant digits so files round-trip and
//! identical runs produce identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::pipeline::RunReport;
use crate::scene::Point3;

/// 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

fn json_point(p: &Point3) -> String {
    format!("[{},{},{}]", fmt_f64(p.x), fmt_f64(p.y), fmt_f64(p.z))
}

fn json_num(v: f64) -> String {
    if v.is_finite() {
        fmt_f64(v)
    } else {
        "null".to_string()
    }
}

pub fn paths_json(report: &RunReport) -> String {
    let mut s = String::from("{\n  \"paths\": [");
    let mut first = true;
    for (u, ue) in report.per_ue.iter().enumerate() {
        for (i, p) in ue.paths.iter().enumerate() {
            s.push_str(if first { "\n" } else { ",\n" });
            first = false;
            let cand: Vec<String> = p.candidate.elements().iter().map(|e| format!("\"{e}\"")).collect();
            let pts: Vec<String> = p.points.iter().map(json_point).collect();
            let _ = write!(
                s,
                "    {{\"ue\": {u}, \"index\": {i}, \"status\": \"{}\", \"class\": \"{}\", \"candidate\": [{}], \"cost\": {}, \"points\": [{}]}}",
                p.status.as_str(),
                p.candidate.class(),
                cand.join(", "),
                json_num(p.cost),
                pts.join(", ")
            );
        }
    }
    s.push_str(if first { "]\n}\n" } else { "\n  ]\n}\n" });
    s
}

pub fn fields_csv(report: &RunReport) -> String {
    let mut s = String::from("ue,path_index,class,candidate,ex_re,ex_im,ey_re,ey_im,ez_re,ez_im,db_rel_los\n");
    for (u, ue) in report.per_ue.iter().enumerate() {
        for c in &ue.contributions {
            let index = ue.paths.iter().position(|p| p == &c.path).unwrap_or(usize::MAX);
            let _ = write!(s, "{u},{index},{},{}", c.path.candidate.class(), c.path.candidate);
            for e in c.e_field.iter() {
                let _ = write!(s, ",{},{}", fmt_f64(e.re), fmt_f64(e.im));
            }
            let _ = writeln!(s, ",{}", fmt_f64(c.magnitude_db_rel_los));
        }
    }
    s
}

pub fn classes_csv(report: &RunReport, ue: usize) -> String {
    let mut s = String::from("interaction_list,n_paths,E_over_ELOS_dB\n");
    for row in &report.per_ue[ue].classes {
        let _ = writeln!(s, "{},{},{}", row.class, row.n_paths, fmt_f64(row.e_over_elos_db));
    }
    s
}

pub fn polylines_csv(report: &RunReport) -> String {
    let mut s = String::from("ue,path_index,class,vertex,x,y,z\n");
    for (u, ue) in report.per_ue.iter().enumerate() {
        for (i, p) in ue.paths.iter().enumerate().filter(|(_, p)| p.is_valid()) {
            for (k, v) in p.points.iter().enumerate() {
                let _ = writeln!(
                    s,
                    "{u},{i},{},{k},{},{},{}",
                    p.candidate.class(),
                    fmt_f64(v.x),
                    fmt_f64(v.y),
                    fmt_f64(v.z)
                );
            }
        }
    }
    s
}

/// File name for a per-UE artifact: `stem.csv` for a single UE,
/// `stem_ue{i}.csv` otherwise.
fn per_ue_name(stem: &str, ue: usize, n_ues: usize) -> String {
    if n_ues == 1 {
        format!("{stem}.csv")
    } else {
        format!("{stem}_ue{ue}.csv")
    }
}

/// Writes all report files into `dir` and returns their paths.
pub fn emit_outputs(report: &RunReport, dir: &Path, dump_adjacency: bool) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: String, body: String| -> io::Result<()> {
        let p = dir.join(name);
        fs::write(&p, body)?;
        written.push(p);
        Ok(())
    };
    put("paths.json".into(), paths_json(report))?;
    put("fields.csv".into(), fields_csv(report))?;
    let n = report.per_ue.len();
    for u in 0..n {
        put(per_ue_name("classes", u, n), classes_csv(report, u))?;
    }
    put("polylines.csv".into(), polylines_csv(report))?;
    if dump_adjacency {
        for (u, ue) in report.per_ue.iter().enumerate() {
            put(per_ue_name("adjacency", u, n), ue.graph.to_csv())?;
        }
    }
    Ok(written)
}
