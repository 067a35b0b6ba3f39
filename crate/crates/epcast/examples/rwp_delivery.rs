//! Runs the built-in half-coverage random-waypoint scenario and prints the
//! delivery summary: tuned messages should land near half the hosts, not
//! all of them.
//!
//! ```text
//! cargo run -p epcast --example rwp_delivery
//! ```

use epcast::harness::{self, ExperimentConfig};

fn main() {
    let mut config = ExperimentConfig::preset("rwp-512-psi50").expect("known preset");
    // Ten replications keep the example snappy; the preset default is 30
    // with an adaptive top-up.
    config.replications = 10;
    config.max_replications = 10;

    println!(
        "scenario {}: {} hosts, {} messages per replication, target {:.2}, deadline {} s",
        config.scenario,
        config.node_count.unwrap(),
        config.initial_messages,
        config.targets[0],
        config.deadline_s
    );
    println!("running {} replications in parallel...", config.replications);

    let out = harness::run_experiment(&config, true).expect("experiment failed");
    for summary in &out.aggregate.targets {
        println!(
            "target {:.2}: delivered {:.3} +/- {:.3} ({} messages), \
             {:.1} replicas per host per message, {:.0}% of messages hit the target",
            summary.target,
            summary.delivered.mean,
            summary.delivered.stderr,
            summary.messages,
            summary.replicas_per_host.mean,
            100.0 * summary.reached_share,
        );
        if let Some(rounds) = summary.mean_time_to_target {
            println!("         mean time to target: {rounds:.1} rounds");
        }
    }
}
