//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line with its measured numbers. Tolerances are pinned in the
//! assertions, not configurable.

use std::process::Command;
use std::sync::OnceLock;
use std::time::Instant;

use rayon::prelude::*;

use capgen_cli::experiment::{run_row, ExperimentRow};
use capgen_core::gen::base::{sample_additive, AdditiveMeasure, GenerationConfig};
use capgen_core::gen::korder::{
    extend_upper_unnormalized, korder_range, validated_range, KOrderClass, KOrderSpec,
};
use capgen_core::gen::pipeline::{generate_one, GenRequest};
use capgen_core::gen::structured::{antibuoyant_range, superadditive_range, supermodular_range};
use capgen_core::linext::{count_extensions, LinearExtension};
use capgen_core::verify::check_class;
use capgen_core::{
    MeasureClass, MeasureClassSpec, MobiusRep, Partition, SetFunction, Subset,
};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_chacha::rand_core::RngCore;

const SEED: u64 = 42;

fn report(criterion: &str, pass: bool, detail: &str) {
    println!("ACCEPTANCE {criterion}: {} — {detail}", if pass { "PASS" } else { "FAIL" });
}

// --- criterion 1: exact linear-extension counts ---

#[test]
fn acceptance_1_linear_extension_counts() {
    let start = Instant::now();
    let c2 = count_extensions(2).unwrap();
    let c3 = count_extensions(3).unwrap();
    let c4 = count_extensions(4).unwrap();
    let elapsed = start.elapsed();
    let pass = c2 == 2 && c3 == 48 && c4 == 1_680_384 && elapsed.as_secs() < 300;
    report(
        "1 extension-counts",
        pass,
        &format!("n=2: {c2}, n=3: {c3}, n=4: {c4} in {:.1}s (limit 300s)", elapsed.as_secs_f64()),
    );
    assert_eq!(c2, 2);
    assert_eq!(c3, 48);
    assert_eq!(c4, 1_680_384);
    assert!(elapsed.as_secs() < 300, "n=4 enumeration took {elapsed:?}");
}

// --- criterion 2 and 3 share the published-table rows ---

fn table_row(n: usize) -> &'static ExperimentRow {
    static ROWS: OnceLock<Vec<ExperimentRow>> = OnceLock::new();
    let rows = ROWS.get_or_init(|| {
        [3usize, 4, 5, 6]
            .into_iter()
            .map(|n| {
                let num = capgen_cli::experiment::default_num(n);
                let start = Instant::now();
                let row = run_row(n, num, 10, SEED).expect("row runs");
                assert!(
                    start.elapsed().as_secs() < 600,
                    "row n={n} exceeded 10 minutes"
                );
                row
            })
            .collect()
    });
    &rows[n - 3]
}

/// The per-row bands around the published repetition table.
///
/// Measured fact, recorded here because three sub-bands cannot hold at
/// once: with weights uniform on the open simplex the n=3 row has exactly
/// 12 reachable extension chambers hit with probabilities 1/8 (six of
/// them) and 1/24 (six), giving E[Rep] = 1 - E[distinct]/20 = 0.549 —
/// below the 0.5989 floor. Raising the n=3 ratio into its band requires a
/// sampler concentration (corner or center) that provably pushes the
/// n=4 ratio above its own ceiling or leaves the n=5/n=6 ratios an order
/// of magnitude above theirs: the published rows are not jointly
/// realizable by any fixed simplex sampler. The uniform sampler is kept,
/// the n=4 row and every adjustment/walk column obligation pass, and the
/// three unreachable sub-bands are reported as honest failures below.
#[test]
fn acceptance_2_repetition_table() {
    let mut failures: Vec<String> = Vec::new();
    let mut checks: Vec<String> = Vec::new();

    let r3 = table_row(3);
    let band3 = (0.6989 - 0.10, 0.6989 + 0.10);
    let ok3 = r3.baseline >= band3.0 && r3.baseline <= band3.1;
    checks.push(format!("n=3 Rep {:.4} in [{:.4}, {:.4}]: {}", r3.baseline, band3.0, band3.1, ok3));
    if !ok3 {
        failures.push(format!("n=3 Rep {:.4} outside [{:.4}, {:.4}]", r3.baseline, band3.0, band3.1));
    }

    let r4 = table_row(4);
    let rep4 = r4.baseline >= 0.7579 - 0.05 && r4.baseline <= 0.7579 + 0.05;
    let alg4 = r4.adjusted >= 0.1882 - 0.08 && r4.adjusted <= 0.1882 + 0.08;
    let rw54 = r4.walks[4] <= 0.10;
    checks.push(format!(
        "n=4 Rep {:.4} in [0.7079, 0.8079]: {rep4}; Alg1 {:.4} in [0.1082, 0.2682]: {alg4}; RW-5 {:.4} <= 0.10: {rw54}",
        r4.baseline, r4.adjusted, r4.walks[4]
    ));
    if !rep4 || !alg4 || !rw54 {
        failures.push(format!(
            "n=4 Rep {:.4} / Alg1 {:.4} / RW-5 {:.4}",
            r4.baseline, r4.adjusted, r4.walks[4]
        ));
    }

    let r5 = table_row(5);
    let ok5 = r5.baseline <= 0.05;
    checks.push(format!("n=5 Rep {:.4} <= 0.05: {ok5}", r5.baseline));
    if !ok5 {
        failures.push(format!("n=5 Rep {:.4} above 0.05", r5.baseline));
    }

    let r6 = table_row(6);
    let cols6: Vec<f64> =
        [r6.baseline, r6.adjusted].into_iter().chain(r6.walks).collect();
    let ok6 = cols6.iter().all(|&c| c <= 0.0005);
    checks.push(format!(
        "n=6 all columns <= 0.0005: {ok6} (Rep {:.4}, Alg1 {:.4}, RW {:?})",
        r6.baseline,
        r6.adjusted,
        r6.walks.map(|w| (w * 1e4).round() / 1e4)
    ));
    if !ok6 {
        failures.push(format!(
            "n=6 columns above 0.0005: Rep {:.4}, Alg1 {:.4}, RW-1 {:.4}",
            r6.baseline, r6.adjusted, r6.walks[0]
        ));
    }

    let pass = failures.is_empty();
    report("2 repetition-table", pass, &checks.join(" | "));
    assert!(
        pass,
        "published-table sub-bands not reproducible from a uniform simplex sampler \
         (see this test's doc comment for the measured analysis): {failures:?}"
    );
}

#[test]
fn acceptance_3_walk_columns_weakly_decrease() {
    let r4 = table_row(4);
    let mut ok = true;
    for step in 0..4 {
        let allowed = r4.walks[step]
            + (r4.walks_se[step] * r4.walks_se[step]
                + r4.walks_se[step + 1] * r4.walks_se[step + 1])
                .sqrt();
        if r4.walks[step + 1] > allowed {
            ok = false;
        }
    }
    report(
        "3 walk-trend",
        ok,
        &format!("n=4 RW means {:?} weakly decreasing within one standard error", r4.walks),
    );
    assert!(ok, "walk columns increased beyond one standard error: {:?}", r4.walks);
}

// --- criterion 4: class-oracle suites and mutation catching ---

fn partition_for(n: usize) -> Partition {
    match n {
        3 => Partition::new(3, vec![Subset(0b011), Subset(0b100)]).unwrap(),
        4 => Partition::new(4, vec![Subset(0b0011), Subset(0b1100)]).unwrap(),
        _ => Partition::new(5, vec![Subset(0b00111), Subset(0b11000)]).unwrap(),
    }
}

fn request_for(class: MeasureClass, n: usize, seed: u64) -> GenRequest {
    let mut spec = MeasureClassSpec::plain(class);
    if class.needs_k() {
        spec.k = Some(2);
        if class == MeasureClass::KInteractive {
            spec.interaction = Some(0.7);
        }
    }
    if class == MeasureClass::PSymmetric {
        spec.partition = Some(partition_for(n));
    }
    let config = GenerationConfig { seed, ..GenerationConfig::default() };
    GenRequest::new(n, spec, config)
}

#[test]
fn acceptance_4_class_oracle_suites() {
    let start = Instant::now();
    let per_class_total = 10_000usize;
    let mut all_ok = true;
    let mut summary = Vec::new();
    for class in MeasureClass::ALL {
        // Superadditive shifts require n > 3, so that class splits its
        // budget over n = 4 and 5.
        let sizes: Vec<usize> = if class == MeasureClass::Superadditive {
            vec![4, 5]
        } else {
            vec![3, 4, 5]
        };
        let per_n = per_class_total / sizes.len() + 1;
        let failures: usize = sizes
            .iter()
            .map(|&n| {
                let request = request_for(class, n, SEED + n as u64);
                (0..per_n as u64)
                    .into_par_iter()
                    .map(|index| {
                        let generated = match generate_one(&request, index) {
                            Ok(g) => g,
                            Err(_) => return 1usize,
                        };
                        let rep = check_class(&generated.measure, &request.spec, 1e-9);
                        usize::from(!rep.pass)
                    })
                    .sum::<usize>()
            })
            .sum();
        let count = per_n * sizes.len();
        if failures > 0 {
            all_ok = false;
        }
        summary.push(format!("{class}: {failures}/{count} oracle failures"));
    }

    let caught = mutation_sweep(1000);
    if caught != 1000 {
        all_ok = false;
    }
    summary.push(format!("mutants caught {caught}/1000"));
    report(
        "4 class-oracles",
        all_ok,
        &format!("{} in {:.0}s", summary.join("; "), start.elapsed().as_secs_f64()),
    );
    assert!(all_ok, "{}", summary.join("; "));
}

/// Pushes one value of a freshly generated measure past its derived bound
/// and counts how many mutants the oracle rejects.
fn mutation_sweep(mutants: usize) -> usize {
    let classes = [
        MeasureClass::Normal,
        MeasureClass::Supermodular,
        MeasureClass::Antibuoyant,
        MeasureClass::Superadditive,
        MeasureClass::PSymmetric,
        MeasureClass::KTolerant,
        MeasureClass::KInteractive,
        MeasureClass::KMaxitive,
        MeasureClass::KAdditive,
        MeasureClass::KNonadditive,
        MeasureClass::KNonmodular,
    ];
    (0..mutants as u64)
        .into_par_iter()
        .map(|i| {
            let class = classes[(i as usize) % classes.len()];
            let n = if class == MeasureClass::Superadditive { 4 } else { 3 + (i as usize / 11) % 3 };
            let n = if class == MeasureClass::Superadditive { n.max(4) } else { n };
            let request = request_for(class, n, SEED ^ 0x5eed);
            let Ok(generated) = generate_one(&request, i) else {
                return 0;
            };
            let mut rng = ChaCha12Rng::seed_from_u64(SEED + i);
            let mutated = mutate_past_bound(&generated.measure, &request.spec, &mut rng);
            let rep = check_class(&mutated, &request.spec, 1e-9);
            usize::from(!rep.pass)
        })
        .sum()
}

const PUSH: f64 = 3e-6;

fn mutate_past_bound(
    mu: &SetFunction,
    spec: &MeasureClassSpec,
    rng: &mut ChaCha12Rng,
) -> SetFunction {
    let n = mu.n();
    let random_subset = |rng: &mut ChaCha12Rng, pred: &dyn Fn(Subset) -> bool| -> Subset {
        loop {
            let bits = 1 + (rng.next_u32() % (Subset::full(n).bits() - 1));
            let s = Subset(bits);
            if pred(s) {
                return s;
            }
        }
    };
    let mut values = mu.values().to_vec();
    match spec.class {
        MeasureClass::Supermodular => {
            let a = random_subset(rng, &|s| s.is_proper_nonempty(n));
            let r = supermodular_range(mu, a).unwrap();
            values[a.index()] = r.upper + PUSH;
        }
        MeasureClass::Antibuoyant => {
            let a = random_subset(rng, &|s| s.is_proper_nonempty(n));
            let r = antibuoyant_range(mu, a).unwrap();
            values[a.index()] = r.upper + PUSH;
        }
        MeasureClass::Superadditive => {
            let a = random_subset(rng, &|s| s.is_proper_nonempty(n));
            let r = superadditive_range(mu, a).unwrap();
            values[a.index()] = r.upper + PUSH;
        }
        MeasureClass::Normal => {
            // Past the monotone ceiling of a random proper subset.
            let a = random_subset(rng, &|s| s.is_proper_nonempty(n));
            let ceiling = (0..n)
                .filter(|&e| !a.contains(e))
                .map(|e| mu.value(a.with(e)))
                .fold(f64::INFINITY, f64::min);
            values[a.index()] = ceiling + PUSH;
        }
        MeasureClass::PSymmetric => {
            // Break constancy inside a block of size >= 2.
            let p = spec.partition.as_ref().unwrap();
            let block = p.blocks().iter().find(|b| b.card() >= 2).unwrap();
            let e = block.elements().next().unwrap();
            values[Subset::singleton(e).index()] += PUSH;
        }
        _ => {
            // k-order families: any value above order k is pinned by the
            // class; nudge one of them (the ground set included, which is
            // the only candidate at n = 3, k = 2).
            let k = spec.k.unwrap();
            let a = loop {
                let bits = 1 + (rng.next_u32() % Subset::full(n).bits());
                let s = Subset(bits);
                if s.card() > k {
                    break s;
                }
            };
            values[a.index()] -= PUSH;
        }
    }
    SetFunction::from_values(n, values).unwrap()
}

// --- criterion 5: boundary identities of the allowable ranges ---

#[test]
fn acceptance_5_boundary_identities() {
    let mut rng = ChaCha12Rng::seed_from_u64(SEED);
    let mut worst_gap: f64 = 0.0;
    for _ in 0..1000 {
        let nu = sample_additive(4, &mut rng).unwrap();
        let mu = nu.to_set_function();
        for a in Subset::proper_nonempty(4) {
            let sm = supermodular_range(&mu, a).unwrap();
            worst_gap = worst_gap
                .max((sm.upper - sm.lower).abs())
                .max((sm.lower - nu.value(a)).abs());
            if a.card() >= 2 {
                let sa = superadditive_range(&mu, a).unwrap();
                worst_gap = worst_gap
                    .max((sa.upper - sa.lower).abs())
                    .max((sa.lower - nu.value(a)).abs());
            }
        }
    }
    let uniform = AdditiveMeasure::uniform(3).unwrap().to_set_function();
    let mut uniform_gap: f64 = 0.0;
    for a in Subset::proper_nonempty(3).filter(|a| a.card() == 2) {
        let r = antibuoyant_range(&uniform, a).unwrap();
        uniform_gap = uniform_gap
            .max((r.lower - 2.0 / 3.0).abs())
            .max((r.upper - 2.0 / 3.0).abs());
    }
    let pass = worst_gap <= 1e-12 && uniform_gap <= 1e-12;
    report(
        "5 boundary-identities",
        pass,
        &format!(
            "additive singleton-interval deviation {worst_gap:.2e}, uniform pair deviation {uniform_gap:.2e} (tol 1e-12)"
        ),
    );
    assert!(pass);
}

// --- criterion 6: k-order exactness and the documented range discrepancy ---

fn mobius_direct(mu: &SetFunction, a: Subset) -> f64 {
    a.subsets()
        .map(|c| {
            let sign = if (a.card() - c.card()) % 2 == 0 { 1.0 } else { -1.0 };
            sign * mu.value(c)
        })
        .sum()
}

fn nonadditivity_direct(mu: &SetFunction, a: Subset) -> f64 {
    let sum: f64 = a.strict_subsets().map(|c| mu.value(c)).sum();
    mu.value(a) - sum / ((1u64 << (a.card() - 1)) as f64 - 1.0)
}

fn nonmodularity_direct(mu: &SetFunction, a: Subset) -> f64 {
    let sum: f64 = a
        .elements()
        .map(|e| mu.value(Subset::singleton(e)) + mu.value(a.without(e)))
        .sum();
    mu.value(a) - sum / a.card() as f64
}

fn index_for(class: KOrderClass, mu: &SetFunction, a: Subset) -> f64 {
    match class {
        KOrderClass::Additive => mobius_direct(mu, a),
        KOrderClass::Nonadditive => nonadditivity_direct(mu, a),
        KOrderClass::Nonmodular => nonmodularity_direct(mu, a),
        _ => unreachable!(),
    }
}

#[test]
fn acceptance_6_korder_exactness() {
    let classes = [KOrderClass::Additive, KOrderClass::Nonadditive, KOrderClass::Nonmodular];
    let grid: Vec<(KOrderClass, usize, usize)> = classes
        .iter()
        .flat_map(|&c| [(c, 4, 1), (c, 4, 2), (c, 5, 1), (c, 5, 2)])
        .collect();
    let failures: usize = grid
        .par_iter()
        .map(|&(class, n, k)| {
            let spec = KOrderSpec::new(class, k);
            let mut bad = 0usize;
            let mut rng = ChaCha12Rng::seed_from_u64(SEED + n as u64 * 10 + k as u64);
            for _ in 0..250 {
                let nu = sample_additive(n, &mut rng).unwrap().to_set_function();
                let a = loop {
                    let bits = 1 + (rng.next_u32() % (Subset::full(n).bits() - 1));
                    let s = Subset(bits);
                    if (1..=k).contains(&s.card()) {
                        break s;
                    }
                };
                let range = validated_range(&nu, a, &spec).unwrap();
                let t = (rng.next_u32() as f64) / (u32::MAX as f64);
                let x = range.lower + t * (range.upper - range.lower);
                let lower = nu.with_value(a, x);
                let Ok(raw) = extend_upper_unnormalized(&lower, &spec) else {
                    bad += 1;
                    continue;
                };
                let raw_worst = Subset::all(n)
                    .filter(|b| b.card() > k && b.card() >= 2)
                    .map(|b| index_for(class, &raw, b).abs())
                    .fold(0.0, f64::max);
                let normalized = raw.normalize().unwrap();
                let norm_worst = Subset::all(n)
                    .filter(|b| b.card() > k && b.card() >= 2)
                    .map(|b| index_for(class, &normalized, b).abs())
                    .fold(0.0, f64::max);
                if raw_worst > 1e-12 || norm_worst > 1e-9 {
                    bad += 1;
                }
            }
            bad
        })
        .sum();

    // Documented discrepancy: raising mu({1}) on the additive seed
    // (0.2, 0.35, 0.45) with k = 2 is capped at +0.2 by the exact
    // extension, while the closed-form bound claims +0.35.
    let nu = AdditiveMeasure::new(vec![0.2, 0.35, 0.45]).unwrap().to_set_function();
    let range = korder_range(&nu, Subset(0b001), &KOrderSpec::new(KOrderClass::Additive, 2)).unwrap();
    let validated_upper = range.validated.upper;
    let formula_upper = range.formula.as_ref().map(|f| f.upper).unwrap_or(f64::NAN);
    let discrepancy_ok = (validated_upper - 0.4).abs() < 1e-6 && (formula_upper - 0.55).abs() < 1e-9;

    let pass = failures == 0 && discrepancy_ok;
    report(
        "6 korder-exactness",
        pass,
        &format!(
            "{failures}/3000 perturbations broke the index bounds; validated upper {validated_upper:.4} vs closed-form {formula_upper:.4} (expected 0.4000 vs 0.5500)"
        ),
    );
    assert!(pass);
}

// --- criterion 7: transform identities ---

#[test]
fn acceptance_7_transform_identities() {
    let plan: [(usize, usize); 7] =
        [(2, 1000), (3, 2000), (4, 2000), (5, 2000), (6, 1500), (7, 1000), (8, 500)];
    let worst: f64 = plan
        .par_iter()
        .map(|&(n, count)| {
            let mut rng = ChaCha12Rng::seed_from_u64(SEED + n as u64);
            let mut worst: f64 = 0.0;
            for _ in 0..count {
                let nu = sample_additive(n, &mut rng).unwrap();
                let ext = LinearExtension::of_measure(&nu.to_set_function());
                let mu = capgen_core::gen::base::measure_from_extension(&ext, &mut rng);
                let back = mu.mobius().zeta();
                for (a, b) in mu.values().iter().zip(back.values()) {
                    worst = worst.max((a - b).abs());
                }
                let twice = mu.dual().dual();
                for (a, b) in mu.values().iter().zip(twice.values()) {
                    worst = worst.max((a - b).abs());
                }
            }
            worst
        })
        .reduce(|| 0.0, f64::max);

    // Additive measures: all interaction indices vanish above singletons.
    let mut rng = ChaCha12Rng::seed_from_u64(SEED ^ 0xadd);
    let mut additive_worst: f64 = 0.0;
    for _ in 0..500 {
        let nu = sample_additive(4, &mut rng).unwrap().to_set_function();
        let mob = nu.mobius();
        for a in Subset::all(4).filter(|a| a.card() >= 2) {
            additive_worst = additive_worst
                .max(mob.coefficient(a).abs())
                .max(nu.nonadditivity_index(a).unwrap().abs())
                .max(nu.nonmodularity_index(a).unwrap().abs());
        }
    }
    // Zeta is the two-sided inverse: rebuild from coefficients too.
    let coeffs = vec![0.0, 0.25, 0.3, 0.1, 0.45, -0.05, -0.05, 0.0];
    let mu = MobiusRep::from_coefficients(3, coeffs.clone()).unwrap().zeta();
    let round: Vec<f64> = mu.mobius().coefficients().to_vec();
    let coeff_worst = coeffs
        .iter()
        .zip(&round)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let pass = worst <= 1e-12 && additive_worst <= 1e-12 && coeff_worst <= 1e-12;
    report(
        "7 transform-identities",
        pass,
        &format!(
            "round-trip/dual worst {worst:.2e}, additive index worst {additive_worst:.2e} (tol 1e-12)"
        ),
    );
    assert!(pass);
}

// --- criterion 8: byte-identical replay of the generator ---

#[test]
fn acceptance_8_deterministic_generation() {
    let invoke = |threads: &str, args: &[&str]| -> Vec<u8> {
        let out = Command::new(env!("CARGO_BIN_EXE_capgen"))
            .args(args)
            .env("CAPGEN_THREADS", threads)
            .output()
            .expect("binary runs");
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        out.stdout
    };
    let cases: Vec<Vec<&str>> = vec![
        vec!["gen", "--class", "supermodular", "--n", "4", "--count", "100", "--seed", "42"],
        vec!["gen", "--class", "k-additive", "--n", "4", "--k", "2", "--count", "50", "--seed", "7"],
        vec![
            "gen", "--class", "p-symmetric", "--n", "4", "--partition", "1,2|3,4", "--count",
            "30", "--seed", "3",
        ],
    ];
    let mut pass = true;
    for args in &cases {
        let a = invoke("1", args);
        let b = invoke("4", args);
        let c = invoke("4", args);
        if a != b || b != c {
            pass = false;
        }
    }
    report(
        "8 determinism",
        pass,
        "three generator invocations replayed byte-identically across thread counts",
    );
    assert!(pass);
}
