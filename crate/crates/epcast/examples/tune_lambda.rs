//! Inverts the infection model for a handful of coverage targets, then
//! sanity-checks one answer against the forward solver.
//!
//! ```text
//! cargo run -p epcast --example tune_lambda
//! ```

use epcast::models::{self, EpidemicParams, ModelKind};
use epcast::tuner::{self, TuneRequest};

fn main() {
    let population = 512u32;
    let mean_degree = 60.0;
    let removal_rate = 0.02;
    let deadline_rounds = 60.0;

    println!(
        "population {population}, mean degree {mean_degree}, removal rate {removal_rate}, \
         deadline {deadline_rounds} rounds"
    );
    println!(
        "{:>8} {:>12} {:>10} {:>6}",
        "target", "lambda*", "achieved", "iters"
    );
    for target in [0.25, 0.5, 0.75, 0.9, 1.0] {
        let req = TuneRequest::new(
            population,
            mean_degree,
            removal_rate,
            deadline_rounds,
            target,
        );
        let res = tuner::tune_lambda(&req).expect("tuning failed");
        let note = if res.feasible {
            ""
        } else {
            "  (infeasible: flooding fallback)"
        };
        println!(
            "{target:>8.2} {:>12.6} {:>10.4} {:>6}{note}",
            res.lambda_star, res.achieved_fraction, res.iterations
        );
    }

    let req = TuneRequest::new(population, mean_degree, removal_rate, deadline_rounds, 0.5);
    let res = tuner::tune_lambda(&req).unwrap();
    let params = EpidemicParams::degree_adjusted(
        population,
        res.lambda_star,
        removal_rate,
        mean_degree,
        ModelKind::Sir,
    );
    let step = models::DEFAULT_STEP.min(0.5 / (res.lambda_star * mean_degree + removal_rate));
    let traj = models::solve(&params, deadline_rounds, step).unwrap();
    println!(
        "\nforward check at lambda* = {:.6}: reached {:.4} of the population by the deadline",
        res.lambda_star,
        traj.reached_fraction(deadline_rounds).unwrap()
    );
}
