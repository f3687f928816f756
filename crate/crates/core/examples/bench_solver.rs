use std::time::Instant;

use fem_dwis::fem::{bundled, FrequencySolver};

fn main() {
    let solver = FrequencySolver::new(bundled::aircraft_frame());
    let theta = bundled::FRAME_NOMINAL;
    let n = 500;
    let t = Instant::now();
    let mut f = Vec::new();
    for _ in 0..n {
        f = solver.elastic_frequencies(&theta, 10).unwrap();
    }
    println!("{:.3} ms/solve", t.elapsed().as_secs_f64() * 1e3 / n as f64);
    println!("{f:?}");
}
