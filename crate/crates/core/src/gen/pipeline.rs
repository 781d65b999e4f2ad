//! Per-class generation pipelines: seed an additive measure, apply the
//! class shift, diversify with allowable-range adjustments and random
//! walks, then certify with the class oracle before handing the measure
//! out. Each batch item owns an RNG stream derived from (seed, index),
//! so batches replay deterministically in any execution order.

use rand::Rng;

use crate::error::{Error, Result};
use crate::gen::base::{
    adjust_value, measure_from_extension, random_direction, random_proper_subset,
    random_walk_step, sample_additive, AdditiveMeasure, GenerationConfig,
};
use crate::gen::korder::{
    korder_walk, make_k_interactive, make_k_maxitive, make_k_tolerant, perturb_korder,
    validated_range, KOrderClass, KOrderSpec,
};
use crate::gen::psym::{generate_p_symmetric, InnerClass};
use crate::gen::structured::{
    antibuoyant_adjust, antibuoyant_walk, shift_superadditive, shift_supermodular,
    superadditive_adjust, superadditive_walk, supermodular_adjust, supermodular_walk,
};
use crate::linext::LinearExtension;
use crate::setfn::SetFunction;
use crate::subset::Subset;
use crate::verify::{check_class, ClassTag, MeasureClass, MeasureClassSpec};

/// A full generation request: what to generate and with which knobs.
#[derive(Clone, Debug)]
pub struct GenRequest {
    pub n: usize,
    pub spec: MeasureClassSpec,
    pub strict: bool,
    pub inner: InnerClass,
    pub config: GenerationConfig,
}

impl GenRequest {
    pub fn new(n: usize, spec: MeasureClassSpec, config: GenerationConfig) -> Self {
        GenRequest { n, spec, strict: false, inner: InnerClass::Normal, config }
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=26).contains(&self.n) {
            return Err(Error::ElementCount(self.n));
        }
        self.config.validate()?;
        self.spec.validate(self.n)
    }
}

/// A generated measure with the tags it was certified for.
#[derive(Clone, Debug)]
pub struct GeneratedMeasure {
    pub measure: SetFunction,
    pub tags: Vec<ClassTag>,
}

/// How many times a k-order pipeline redraws before giving up on finding
/// a measure whose order-k interaction is genuinely present.
const EFFECTIVE_ORDER_RETRIES: usize = 16;

/// Generates the batch item at `index`. Deterministic in
/// (request, index).
pub fn generate_one(request: &GenRequest, index: u64) -> Result<GeneratedMeasure> {
    request.validate()?;
    let mut rng = request.config.rng_for(index);
    let measure = build(request, &mut rng)?;
    certify(request, measure)
}

/// Generates a whole batch sequentially; parallel callers fan out over
/// `generate_one` instead.
pub fn generate_batch(request: &GenRequest) -> Result<Vec<GeneratedMeasure>> {
    (0..request.config.batch as u64).map(|i| generate_one(request, i)).collect()
}

fn build(request: &GenRequest, rng: &mut impl Rng) -> Result<SetFunction> {
    let n = request.n;
    let config = &request.config;
    match request.spec.class {
        MeasureClass::Normal => {
            let nu = sample_additive(n, rng)?;
            let mut mu = nu.to_set_function();
            for _ in 0..config.adjust_rounds_for(n) {
                let a = random_proper_subset(n, rng);
                mu = adjust_value(&mu, a, rng)?.0;
            }
            for _ in 0..config.walk_steps {
                let a = random_proper_subset(n, rng);
                mu = random_walk_step(&mu, a, random_direction(rng), rng)?.0;
            }
            // Fresh comonotone values on the diversified extension.
            Ok(measure_from_extension(&LinearExtension::of_measure(&mu), rng))
        }
        MeasureClass::Supermodular => {
            let nu = sample_additive(n, rng)?;
            let mut mu = shift_supermodular(&nu, request.strict, config.eta_fraction, rng)?;
            for _ in 0..config.walk_steps {
                let a = random_proper_subset(n, rng);
                mu = supermodular_walk(&mu, a, random_direction(rng), rng)?.0;
            }
            for _ in 0..config.adjust_rounds_for(n).min(2 * n) {
                let a = random_proper_subset(n, rng);
                mu = supermodular_adjust(&mu, a, rng)?.0;
            }
            Ok(mu)
        }
        MeasureClass::Antibuoyant => {
            let nu = AdditiveMeasure::uniform(n)?;
            let mut mu = shift_supermodular(&nu, request.strict, config.eta_fraction, rng)?;
            for _ in 0..config.walk_steps {
                let a = random_proper_subset(n, rng);
                mu = antibuoyant_walk(&mu, a, random_direction(rng), rng)?.0;
            }
            for _ in 0..config.adjust_rounds_for(n).min(2 * n) {
                let a = random_proper_subset(n, rng);
                mu = antibuoyant_adjust(&mu, a, rng)?.0;
            }
            Ok(mu)
        }
        MeasureClass::Superadditive => {
            let nu = sample_additive(n, rng)?;
            let mut mu = shift_superadditive(&nu, request.strict, config.eta_fraction, rng)?;
            for _ in 0..config.walk_steps {
                let a = random_proper_subset(n, rng);
                mu = superadditive_walk(&mu, a, random_direction(rng), rng)?.0;
            }
            for _ in 0..config.adjust_rounds_for(n).min(2 * n) {
                let a = random_proper_subset(n, rng);
                mu = superadditive_adjust(&mu, a, rng)?.0;
            }
            Ok(mu)
        }
        MeasureClass::PSymmetric => {
            let partition = request.spec.partition.as_ref().expect("validated spec");
            generate_p_symmetric(partition, request.inner, config, rng)
        }
        MeasureClass::KTolerant => {
            let seed = diversified_capacity(n, config, rng)?;
            make_k_tolerant(&seed, request.spec.k.expect("validated spec"))
        }
        MeasureClass::KInteractive => {
            let seed = diversified_capacity(n, config, rng)?;
            make_k_interactive(
                &seed,
                request.spec.k.expect("validated spec"),
                request.spec.interaction.expect("validated spec"),
            )
        }
        MeasureClass::KMaxitive => {
            let seed = diversified_capacity(n, config, rng)?;
            make_k_maxitive(&seed, request.spec.k.expect("validated spec"))
        }
        MeasureClass::KAdditive => korder_pipeline(request, KOrderClass::Additive, rng),
        MeasureClass::KNonadditive => korder_pipeline(request, KOrderClass::Nonadditive, rng),
        MeasureClass::KNonmodular => korder_pipeline(request, KOrderClass::Nonmodular, rng),
    }
}

/// Additive seed worked over by plain adjustments and walks; the common
/// input for the transforms that only constrain the upper orders.
fn diversified_capacity(
    n: usize,
    config: &GenerationConfig,
    rng: &mut impl Rng,
) -> Result<SetFunction> {
    let nu = sample_additive(n, rng)?;
    let mut mu = nu.to_set_function();
    for _ in 0..config.adjust_rounds_for(n) {
        let a = random_proper_subset(n, rng);
        mu = adjust_value(&mu, a, rng)?.0;
    }
    for _ in 0..config.walk_steps {
        let a = random_proper_subset(n, rng);
        mu = random_walk_step(&mu, a, random_direction(rng), rng)?.0;
    }
    Ok(measure_from_extension(&LinearExtension::of_measure(&mu), rng))
}

/// Index-family pipeline: one strategy perturbation of a random low-order
/// subset inside its validated range, then lower-level walks. Redraws
/// when the order-k interaction degenerates below tolerance.
fn korder_pipeline(
    request: &GenRequest,
    class: KOrderClass,
    rng: &mut impl Rng,
) -> Result<SetFunction> {
    let n = request.n;
    let k = request.spec.k.expect("validated spec");
    let spec = KOrderSpec::new(class, k);
    let config = &request.config;
    for _ in 0..EFFECTIVE_ORDER_RETRIES {
        let nu = sample_additive(n, rng)?.to_set_function();
        let a = random_low_order_subset(n, k, rng);
        let range = validated_range(&nu, a, &spec)?;
        let current = nu.value(a);
        let candidate = pick_off_center(&range, current, rng);
        let mut mu = match candidate {
            Some(x) => perturb_korder(&nu, a, x, &spec)?,
            None => continue,
        };
        for _ in 0..config.walk_steps {
            let a = random_low_order_subset(n, k, rng);
            mu = korder_walk(&mu, a, random_direction(rng), &spec, rng)?.0;
        }
        if order_k_interaction_present(&mu, &spec, config.tolerance) {
            return Ok(mu);
        }
    }
    Err(Error::Infeasible(format!(
        "could not realize an order-{k} interaction after {EFFECTIVE_ORDER_RETRIES} attempts"
    )))
}

fn random_low_order_subset(n: usize, k: usize, rng: &mut impl Rng) -> Subset {
    loop {
        let a = random_proper_subset(n, rng);
        if (1..=k).contains(&a.card()) {
            return a;
        }
    }
}

/// A value away from the current one, biased toward the wider side of the
/// range so the perturbation is visible.
fn pick_off_center(
    range: &crate::gen::structured::RangeBounds,
    current: f64,
    rng: &mut impl Rng,
) -> Option<f64> {
    let lo_len = (current - range.lower).max(0.0);
    let hi_len = (range.upper - current).max(0.0);
    if lo_len <= 0.0 && hi_len <= 0.0 {
        return None;
    }
    for _ in 0..64 {
        let t: f64 = rng.random::<f64>() * (lo_len + hi_len);
        let x = if t < lo_len { range.lower + t } else { range.upper - (t - lo_len) };
        if x != current {
            return Some(x);
        }
    }
    None
}

/// True when some subset of exactly k elements carries an index above
/// tolerance; k = 1 is exempt (weights are the order-1 interaction).
fn order_k_interaction_present(mu: &SetFunction, spec: &KOrderSpec, tol: f64) -> bool {
    if spec.k < 2 {
        return true;
    }
    let index = |a: Subset| -> f64 {
        match spec.class {
            KOrderClass::Additive => mu.mobius().coefficient(a),
            KOrderClass::Nonadditive => mu.nonadditivity_index(a).unwrap_or(0.0),
            KOrderClass::Nonmodular => mu.nonmodularity_index(a).unwrap_or(0.0),
            _ => 1.0,
        }
    };
    Subset::all(mu.n()).filter(|a| a.card() == spec.k).any(|a| index(a).abs() > tol)
}

fn certify(request: &GenRequest, measure: SetFunction) -> Result<GeneratedMeasure> {
    let report = check_class(&measure, &request.spec, request.config.tolerance);
    if !report.pass {
        return Err(Error::VerificationFailed(format!(
            "{}: worst violation {}{}",
            report.label,
            report.worst_violation,
            report
                .witness
                .as_ref()
                .map(|w| format!(" ({w})"))
                .unwrap_or_default()
        )));
    }
    let tags = spec_tags(&request.spec, request.n);
    Ok(GeneratedMeasure { measure, tags })
}

/// The tags a request certifies; only tags with oracles are attached.
pub fn spec_tags(spec: &MeasureClassSpec, _n: usize) -> Vec<ClassTag> {
    match spec.class {
        MeasureClass::Normal | MeasureClass::PSymmetric => vec![],
        MeasureClass::Supermodular => vec![ClassTag::Supermodular],
        MeasureClass::Antibuoyant => vec![ClassTag::Antibuoyant],
        MeasureClass::Superadditive => vec![ClassTag::Superadditive],
        MeasureClass::KTolerant => vec![ClassTag::KTolerant(spec.k.unwrap())],
        MeasureClass::KInteractive => vec![ClassTag::KInteractive(spec.k.unwrap())],
        MeasureClass::KMaxitive => vec![ClassTag::KMaxitive(spec.k.unwrap())],
        MeasureClass::KAdditive => vec![ClassTag::KAdditive(spec.k.unwrap())],
        MeasureClass::KNonadditive => vec![ClassTag::KNonadditive(spec.k.unwrap())],
        MeasureClass::KNonmodular => vec![ClassTag::KNonmodular(spec.k.unwrap())],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::psym::Partition;
    use crate::setfn::CLASS_TOL;
    use crate::verify;

    fn request(n: usize, class: MeasureClass) -> GenRequest {
        GenRequest::new(n, MeasureClassSpec::plain(class), GenerationConfig::default())
    }

    #[test]
    fn all_classes_generate_and_certify() {
        for class in MeasureClass::ALL {
            let mut req = request(4, class);
            match class {
                MeasureClass::PSymmetric => {
                    req.spec.partition =
                        Some(Partition::new(4, vec![Subset(0b0011), Subset(0b1100)]).unwrap());
                }
                c if c.needs_k() => {
                    req.spec.k = Some(2);
                    if c == MeasureClass::KInteractive {
                        req.spec.interaction = Some(0.7);
                    }
                }
                _ => {}
            }
            for index in 0..5 {
                let out = generate_one(&req, index).unwrap_or_else(|e| {
                    panic!("class {class} failed at index {index}: {e}")
                });
                assert!(
                    out.measure.check_capacity(CLASS_TOL).is_ok(),
                    "class {class} output not a capacity"
                );
            }
        }
    }

    #[test]
    fn generation_is_deterministic_per_index() {
        let req = request(4, MeasureClass::Supermodular);
        let a = generate_one(&req, 3).unwrap();
        let b = generate_one(&req, 3).unwrap();
        assert_eq!(a.measure.values(), b.measure.values());
        let c = generate_one(&req, 4).unwrap();
        assert_ne!(a.measure.values(), c.measure.values());
    }

    #[test]
    fn strict_variants_request_positive_slack() {
        let mut req = request(4, MeasureClass::Supermodular);
        req.strict = true;
        let out = generate_one(&req, 0).unwrap();
        let rep = verify::check_supermodular(&out.measure, CLASS_TOL);
        assert!(rep.pass);

        let mut req = request(4, MeasureClass::Superadditive);
        req.strict = true;
        let out = generate_one(&req, 0).unwrap();
        let rep = verify::check_superadditive(&out.measure, CLASS_TOL);
        assert!(rep.pass);
        assert!(rep.min_slack > 0.0);
    }

    #[test]
    fn superadditive_needs_more_than_three_elements() {
        let req = request(3, MeasureClass::Superadditive);
        assert!(matches!(generate_one(&req, 0), Err(Error::Infeasible(_))));
    }

    #[test]
    fn k_order_outputs_have_real_order_k_interaction() {
        for class in [MeasureClass::KAdditive, MeasureClass::KNonadditive, MeasureClass::KNonmodular]
        {
            let mut req = request(4, class);
            req.spec.k = Some(2);
            for index in 0..10 {
                let out = generate_one(&req, index).unwrap();
                let report = check_class(&out.measure, &req.spec, CLASS_TOL);
                assert!(report.pass, "{class} index {index}: {:?}", report.witness);
            }
        }
    }

    #[test]
    fn batch_matches_itemwise_generation() {
        let mut req = request(3, MeasureClass::Normal);
        req.config.batch = 4;
        let batch = generate_batch(&req).unwrap();
        assert_eq!(batch.len(), 4);
        for (i, item) in batch.iter().enumerate() {
            let single = generate_one(&req, i as u64).unwrap();
            assert_eq!(single.measure.values(), item.measure.values());
        }
    }
}
