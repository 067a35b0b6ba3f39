//! Watches the contact graph that random-waypoint motion induces: nodes
//! roam a square arena and any pair within radio range is a contact. The
//! per-round degree statistics are what the protocol's online estimators
//! feed on.
//!
//! ```text
//! cargo run -p epcast --example mobility_contacts
//! ```

use epcast::mobility::{ArenaConfig, MobilityState};

fn main() {
    let arena = ArenaConfig {
        side_m: 1000.0,
        range_m: 200.0,
        speed_min_mps: 1.0,
        speed_max_mps: 6.0,
        pause_s: 0.0,
    };
    let node_count = 128;
    let tau_s = 10.0;
    let mut mobility = MobilityState::new(node_count, arena, 42).expect("valid arena");

    // Disk coverage predicts the mean degree before simulating anything.
    let coverage = std::f64::consts::PI * arena.range_m * arena.range_m
        / (arena.side_m * arena.side_m);
    println!(
        "{node_count} nodes in a {:.0} m square, {:.0} m range: \
         expected mean degree ~= {:.1}",
        arena.side_m,
        arena.range_m,
        coverage * (node_count - 1) as f64
    );

    println!("{:>8} {:>12} {:>10}", "time", "mean degree", "min degree");
    for round in 0..=60u32 {
        mobility.advance(tau_s);
        if round % 10 != 0 {
            continue;
        }
        let snapshot = mobility.snapshot(arena.range_m);
        let degrees: Vec<usize> = (0..node_count as u32).map(|n| snapshot.degree(n)).collect();
        let mean = degrees.iter().sum::<usize>() as f64 / node_count as f64;
        let min = degrees.iter().min().copied().unwrap_or(0);
        println!("{:>7}s {mean:>12.2} {min:>10}", (round + 1) as f64 * tau_s);
    }
}
