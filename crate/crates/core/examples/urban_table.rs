//! Prints the per-class field table for the street-canyon scene.

use minpath::pipeline::{run_pipeline, RunConfig};
use minpath::scenarios;
use minpath::scene::Point3;

fn main() {
    let scene = scenarios::urban();
    let mut cfg = RunConfig::new(Point3::from(scenarios::URBAN_BS), vec![Point3::from(scenarios::URBAN_UE)], 3);
    cfg.radio.frequency = scenarios::URBAN_FREQUENCY;
    cfg.workers = 1;
    let t = std::time::Instant::now();
    let report = run_pipeline(&scene, &cfg).expect("pipeline runs");
    let ue = &report.per_ue[0];
    println!("{:?}", ue.counters);
    for row in &ue.classes {
        println!("{:>4} {:>3} {:>10.2}", row.class, row.n_paths, row.e_over_elos_db);
    }
    for c in &ue.contributions {
        let worst = c.transitions.iter().map(|f| (f - 1.0).norm()).fold(0.0, f64::max);
        println!("{:<12} {:>9.2} dB  max|F-1| {:.2e}", c.path.candidate.to_string(), c.magnitude_db_rel_los, worst);
    }
    for (c, e) in &ue.field_failures {
        println!("field failure {c}: {e}");
    }
    eprintln!("elapsed {:?}", t.elapsed());
}
