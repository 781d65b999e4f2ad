//! Repetition-ratio experiment: how often the linear extensions induced
//! by sampled additive measures repeat, before and after one value
//! adjustment and after one to five random-walk steps. Results are
//! averaged over iterations and rendered as CSV.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

use capgen_core::gen::base::{
    adjust_value, random_direction, random_proper_subset, random_walk_step, sample_additive,
};
use capgen_core::linext::{repetition_ratio_orders, LinearExtension};

use crate::exit::CliError;

pub const WALK_COLUMNS: usize = 5;

/// One row of the experiment: all ratios averaged over `iterations`, with
/// per-column standard errors of the mean.
#[derive(Clone, Debug)]
pub struct ExperimentRow {
    pub n: usize,
    pub num: usize,
    pub iterations: usize,
    pub baseline: f64,
    pub adjusted: f64,
    pub walks: [f64; WALK_COLUMNS],
    pub baseline_se: f64,
    pub adjusted_se: f64,
    pub walks_se: [f64; WALK_COLUMNS],
}

/// Batch size the published table uses per n.
pub fn default_num(n: usize) -> usize {
    match n {
        3 => 20,
        4 => 1_000,
        5 => 10_000,
        _ => 100_000,
    }
}

fn mean_and_se(samples: &[f64]) -> (f64, f64) {
    let k = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / k;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

/// Runs one row: `num` additive measures per iteration, their extension
/// repetition ratio, the ratio after one value adjustment of a random
/// subset, and after 1..=5 cumulative random-walk steps.
pub fn run_row(n: usize, num: usize, iterations: usize, seed: u64) -> Result<ExperimentRow, CliError> {
    if !(2..=26).contains(&n) {
        return Err(CliError::Infeasible(format!("n = {n} outside 2..=26")));
    }
    if num == 0 || iterations == 0 {
        return Err(CliError::Infeasible("num and iterations must be positive".into()));
    }
    let mut base_samples = Vec::with_capacity(iterations);
    let mut adj_samples = Vec::with_capacity(iterations);
    let mut walk_samples: Vec<Vec<f64>> = vec![Vec::with_capacity(iterations); WALK_COLUMNS];

    for iter in 0..iterations {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(((n as u64) << 32) | iter as u64);

        let mut base_orders: Vec<Vec<u32>> = Vec::with_capacity(num);
        let mut adj_orders: Vec<Vec<u32>> = Vec::with_capacity(num);
        let mut walk_orders: Vec<Vec<Vec<u32>>> = vec![Vec::with_capacity(num); WALK_COLUMNS];

        for _ in 0..num {
            let nu = sample_additive(n, &mut rng)?;
            let mu = nu.to_set_function();
            let ext = LinearExtension::of_measure(&mu);
            base_orders.push(ext.order().to_vec());

            // One value adjustment of one random subset.
            let a = random_proper_subset(n, &mut rng);
            let (adjusted, _) = adjust_value(&mu, a, &mut rng)?;
            adj_orders.push(LinearExtension::of_measure(&adjusted).order().to_vec());

            // Cumulative random-walk steps from the unadjusted seed.
            let mut walked = mu.clone();
            for step in 0..WALK_COLUMNS {
                let a = random_proper_subset(n, &mut rng);
                let dir = random_direction(&mut rng);
                walked = random_walk_step(&walked, a, dir, &mut rng)?.0;
                walk_orders[step].push(LinearExtension::of_measure(&walked).order().to_vec());
            }
        }

        base_samples.push(repetition_ratio_orders(&base_orders)?);
        adj_samples.push(repetition_ratio_orders(&adj_orders)?);
        for (step, orders) in walk_orders.iter().enumerate() {
            walk_samples[step].push(repetition_ratio_orders(orders)?);
        }
    }

    let (baseline, baseline_se) = mean_and_se(&base_samples);
    let (adjusted, adjusted_se) = mean_and_se(&adj_samples);
    let mut walks = [0.0; WALK_COLUMNS];
    let mut walks_se = [0.0; WALK_COLUMNS];
    for step in 0..WALK_COLUMNS {
        let (m, se) = mean_and_se(&walk_samples[step]);
        walks[step] = m;
        walks_se[step] = se;
    }
    Ok(ExperimentRow {
        n,
        num,
        iterations,
        baseline,
        adjusted,
        walks,
        baseline_se,
        adjusted_se,
        walks_se,
    })
}

pub fn run_rows(
    n_min: usize,
    n_max: usize,
    num_override: Option<usize>,
    iterations: usize,
    seed: u64,
) -> Result<Vec<ExperimentRow>, CliError> {
    (n_min..=n_max)
        .map(|n| run_row(n, num_override.unwrap_or_else(|| default_num(n)), iterations, seed))
        .collect()
}

pub const CSV_HEADER: &str = "n,Num,Rep,Alg1,RW-1,RW-2,RW-3,RW-4,RW-5";

pub fn to_csv(rows: &[ExperimentRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!("{},{},{:.4},{:.4}", r.n, r.num, r.baseline, r.adjusted));
        for w in r.walks {
            out.push_str(&format!(",{w:.4}"));
        }
        out.push('\n');
    }
    out
}
