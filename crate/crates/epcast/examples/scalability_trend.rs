//! Sweeps the full-coverage random-waypoint presets across the population
//! ladder. Denser networks need no more copies per host: the per-host
//! replica cost stays flat-to-falling as N grows, which is what makes the
//! scheme scale.
//!
//! ```text
//! cargo run -p epcast --example scalability_trend
//! ```

use epcast::harness::{self, ExperimentConfig};

fn main() {
    println!(
        "{:>6} {:>12} {:>22} {:>14}",
        "N", "delivered", "replicas/host/message", "replications"
    );
    for n in [64usize, 128, 256, 512] {
        let mut config = ExperimentConfig::preset(&format!("rwp-{n}-psi100")).expect("preset");
        config.replications = 10;
        config.max_replications = 10;
        let out = harness::run_experiment(&config, true).expect("experiment failed");
        let t = &out.aggregate.targets[0];
        println!(
            "{n:>6} {:>12.3} {:>15.2} +/- {:<4.2} {:>11}",
            t.delivered.mean,
            t.replicas_per_host.mean,
            t.replicas_per_host.stderr,
            out.aggregate.replications
        );
    }
}
