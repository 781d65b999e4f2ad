//! p-symmetric measures via the vector quotient: subsets collapse to
//! per-block counts, generation runs on the resulting product of chains,
//! and the expansion back to the full lattice is constant on count
//! classes by construction.

use rand::Rng;

use crate::error::{Error, Result};
use crate::gen::base::{draw_outside_band, draw_strictly_between, open_unit, GenerationConfig};
use crate::setfn::{SetFunction, CLASS_TOL};
use crate::subset::Subset;
use crate::verify;

/// Disjoint nonempty blocks covering the ground set; elements inside one
/// block are interchangeable for the measure.
#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    n: usize,
    blocks: Vec<Subset>,
}

impl Partition {
    pub fn new(n: usize, blocks: Vec<Subset>) -> Result<Self> {
        if !(2..=26).contains(&n) {
            return Err(Error::ElementCount(n));
        }
        let mut seen = Subset::EMPTY;
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            if !seen.intersection(*b).is_empty() {
                return Err(Error::InvalidPartition(format!("block {b} overlaps another")));
            }
            seen = seen.union(*b);
        }
        if seen != Subset::full(n) {
            return Err(Error::InvalidPartition(format!(
                "blocks cover {seen}, not the whole ground set"
            )));
        }
        Ok(Partition { n, blocks })
    }

    pub fn singletons(n: usize) -> Result<Self> {
        Partition::new(n, (0..n).map(Subset::singleton).collect())
    }

    pub fn whole(n: usize) -> Result<Self> {
        Partition::new(n, vec![Subset::full(n)])
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.blocks.len()
    }

    #[inline]
    pub fn blocks(&self) -> &[Subset] {
        &self.blocks
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.card()).collect()
    }
}

/// Per-block intersection counts of a subset.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymVector(pub Vec<u8>);

impl SymVector {
    pub fn le(&self, other: &SymVector) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn total(&self) -> usize {
        self.0.iter().map(|&c| c as usize).sum()
    }
}

/// Maps a subset to its count vector: component i is the size of the
/// intersection with block i.
pub fn subset_vector(a: Subset, partition: &Partition) -> SymVector {
    SymVector(partition.blocks.iter().map(|b| a.intersection(*b).card() as u8).collect())
}

/// The quotient lattice: a product of chains with `size_i + 1` levels.
struct Quotient {
    sizes: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
}

impl Quotient {
    fn new(partition: &Partition) -> Quotient {
        let sizes = partition.block_sizes();
        let mut strides = vec![0usize; sizes.len()];
        let mut len = 1usize;
        for (i, &s) in sizes.iter().enumerate() {
            strides[i] = len;
            len *= s + 1;
        }
        Quotient { sizes, strides, len }
    }

    fn rank(&self, v: &[u8]) -> usize {
        v.iter().zip(&self.strides).map(|(&c, &s)| c as usize * s).sum()
    }

    fn unrank(&self, mut r: usize) -> Vec<u8> {
        let mut v = vec![0u8; self.sizes.len()];
        for (i, &s) in self.sizes.iter().enumerate() {
            v[i] = (r % (s + 1)) as u8;
            r /= s + 1;
        }
        v
    }

    fn top(&self) -> usize {
        self.len - 1
    }

    fn le(&self, x: usize, y: usize) -> bool {
        let vx = self.unrank(x);
        let vy = self.unrank(y);
        vx.iter().zip(&vy).all(|(a, b)| a <= b)
    }

    fn total(&self, x: usize) -> usize {
        self.unrank(x).iter().map(|&c| c as usize).sum()
    }

    fn covers_down(&self, x: usize) -> Vec<usize> {
        let v = self.unrank(x);
        (0..v.len()).filter(|&i| v[i] > 0).map(|i| x - self.strides[i]).collect()
    }

    fn covers_up(&self, x: usize) -> Vec<usize> {
        let v = self.unrank(x);
        (0..v.len())
            .filter(|&i| (v[i] as usize) < self.sizes[i])
            .map(|i| x + self.strides[i])
            .collect()
    }
}

/// Structural family enforced on the quotient during generation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InnerClass {
    Normal,
    Supermodular,
    Superadditive,
}

impl std::str::FromStr for InnerClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "normal" => Ok(InnerClass::Normal),
            "supermodular" => Ok(InnerClass::Supermodular),
            "superadditive" => Ok(InnerClass::Superadditive),
            _ => Err(Error::InvalidParameter(format!("unknown inner class '{s}'"))),
        }
    }
}

/// Quotient vertices sorted by value, ties broken by rank.
fn quotient_order(q: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..q.len()).collect();
    order.sort_unstable_by(|&x, &y| q[x].partial_cmp(&q[y]).unwrap().then(x.cmp(&y)));
    order
}

fn expand(quotient: &Quotient, partition: &Partition, q: &[f64]) -> SetFunction {
    let n = partition.n();
    let values: Vec<f64> = Subset::all(n)
        .map(|a| q[quotient.rank(&subset_vector(a, partition).0)])
        .collect();
    SetFunction::from_values(n, values).expect("expansion is well-formed")
}

/// Generates a p-symmetric capacity: a block-constant additive seed,
/// class shifts, then allowable-range adjustments and random walks on the
/// quotient. Structural inner classes accept a quotient move only when
/// the expanded measure passes the class oracle.
pub fn generate_p_symmetric(
    partition: &Partition,
    inner: InnerClass,
    config: &GenerationConfig,
    rng: &mut impl Rng,
) -> Result<SetFunction> {
    config.validate()?;
    let n = partition.n();
    let quotient = Quotient::new(partition);
    let p = partition.p();

    // Block-constant additive seed: one simplex draw over blocks, spread
    // evenly inside each block.
    let block_weight: Vec<f64> = loop {
        let draws: Vec<f64> = (0..p).map(|_| -open_unit(rng).ln()).collect();
        let sum: f64 = draws.iter().sum();
        if sum.is_finite() && sum > 0.0 {
            let w: Vec<f64> = draws.iter().map(|x| x / sum).collect();
            if w.iter().all(|&x| x > 0.0) {
                break w;
            }
        }
    };
    let per_element: Vec<f64> =
        block_weight.iter().zip(&quotient.sizes).map(|(&z, &s)| z / s as f64).collect();

    let mut q: Vec<f64> = (0..quotient.len)
        .map(|r| {
            quotient
                .unrank(r)
                .iter()
                .zip(&per_element)
                .map(|(&c, &w)| c as f64 * w)
                .sum()
        })
        .collect();
    q[quotient.top()] = 1.0;

    let rounds = config.adjust_rounds.unwrap_or(quotient.len);
    match inner {
        InnerClass::Normal => {
            for _ in 0..rounds {
                quotient_adjust(&quotient, &mut q, rng, None, partition);
            }
            for _ in 0..config.walk_steps {
                quotient_walk(&quotient, &mut q, rng, None, partition);
            }
            quotient_resample(&quotient, &mut q, rng);
        }
        InnerClass::Supermodular => {
            // Constant shift keeps block constancy and yields a
            // supermodular expansion.
            let min_single = per_element.iter().copied().fold(f64::INFINITY, f64::min);
            let eta = config.eta_fraction * min_single;
            for r in 1..quotient.top() {
                q[r] -= eta;
            }
            let accept = |mu: &SetFunction| {
                verify::check_supermodular(mu, CLASS_TOL).pass && mu.is_monotone(CLASS_TOL)
            };
            for _ in 0..rounds {
                quotient_adjust(&quotient, &mut q, rng, Some(&accept), partition);
            }
            for _ in 0..config.walk_steps {
                quotient_walk(&quotient, &mut q, rng, Some(&accept), partition);
            }
        }
        InnerClass::Superadditive => {
            if n <= 3 {
                return Err(Error::Infeasible(format!(
                    "superadditive inner class requires n > 3, got n = {n}"
                )));
            }
            // Per-co-atom shift: block-constant because the subtracted sum
            // only depends on how many elements of each block are absent.
            for r in 1..quotient.top() {
                let v = quotient.unrank(r);
                let missing: f64 = v
                    .iter()
                    .zip(&quotient.sizes)
                    .enumerate()
                    .map(|(i, (&c, &s))| {
                        (s - c as usize) as f64
                            * coatom_amount(i, &per_element, &quotient.sizes, config.eta_fraction, n)
                    })
                    .sum();
                q[r] -= missing;
            }
            let accept = |mu: &SetFunction| {
                verify::check_superadditive(mu, CLASS_TOL).pass && mu.is_monotone(CLASS_TOL)
            };
            for _ in 0..rounds {
                quotient_adjust(&quotient, &mut q, rng, Some(&accept), partition);
            }
            for _ in 0..config.walk_steps {
                quotient_walk(&quotient, &mut q, rng, Some(&accept), partition);
            }
        }
    }

    let out = expand(&quotient, partition, &q);
    out.check_capacity(CLASS_TOL)
        .map_err(|e| Error::VerificationFailed(e.to_string()))?;
    Ok(out)
}

/// Shift amount attached to a co-atom that omits one element of `block`:
/// `eta_fraction / n` times the smallest weight among the remaining
/// elements. Block-constant weights make this depend only on the block.
fn coatom_amount(
    block: usize,
    per_element: &[f64],
    sizes: &[usize],
    eta_fraction: f64,
    n: usize,
) -> f64 {
    let min_rest = per_element
        .iter()
        .zip(sizes)
        .enumerate()
        .flat_map(|(i, (&w, &s))| {
            let remaining = if i == block { s - 1 } else { s };
            (remaining > 0).then_some(w)
        })
        .fold(f64::INFINITY, f64::min);
    eta_fraction * min_rest / n as f64
}

/// Value adjustment of one interior quotient vertex inside its cover
/// bounds, avoiding the band between its quotient-extension neighbours.
/// With an oracle, a move the expansion fails is walked back toward the
/// old value and finally dropped.
fn quotient_adjust(
    quotient: &Quotient,
    q: &mut [f64],
    rng: &mut impl Rng,
    accept: Option<&dyn Fn(&SetFunction) -> bool>,
    partition: &Partition,
) {
    if quotient.len <= 2 {
        return;
    }
    let v = rng.random_range(1..quotient.top());
    let lo = quotient.covers_down(v).into_iter().map(|c| q[c]).fold(f64::NEG_INFINITY, f64::max);
    let hi = quotient.covers_up(v).into_iter().map(|c| q[c]).fold(f64::INFINITY, f64::min);
    let order = quotient_order(q);
    let pos = order.iter().position(|&x| x == v).unwrap();
    let prev = q[order[pos - 1]];
    let next = q[order[pos + 1]];
    let Some(mut x) = draw_outside_band(q, (lo, prev), (next, hi), rng) else {
        return;
    };
    let old = q[v];
    match accept {
        None => q[v] = x,
        Some(oracle) => {
            for _ in 0..32 {
                q[v] = x;
                if oracle(&expand(quotient, partition, q)) {
                    return;
                }
                x = 0.5 * (x + old);
            }
            q[v] = old;
        }
    }
}

/// One random-walk step on the quotient extension; with an acceptance
/// oracle the move is kept only if the expanded measure passes it.
fn quotient_walk(
    quotient: &Quotient,
    q: &mut [f64],
    rng: &mut impl Rng,
    accept: Option<&dyn Fn(&SetFunction) -> bool>,
    partition: &Partition,
) {
    if quotient.len <= 2 {
        return;
    }
    let v = rng.random_range(1..quotient.top());
    let order = quotient_order(q);
    let pos = order.iter().position(|&x| x == v).unwrap();
    let up: bool = rng.random();
    let (lo, hi) = if up {
        if pos + 1 >= order.len() {
            return;
        }
        let succ = order[pos + 1];
        if !(quotient.total(v) >= quotient.total(succ) || !quotient.le(v, succ)) {
            return;
        }
        let beyond = if pos + 2 < order.len() { q[order[pos + 2]] } else { 1.0 };
        (q[succ], beyond)
    } else {
        if pos == 0 {
            return;
        }
        let pred = order[pos - 1];
        if !(quotient.total(v) <= quotient.total(pred) || !quotient.le(pred, v)) {
            return;
        }
        let beyond = if pos >= 2 { q[order[pos - 2]] } else { 0.0 };
        (beyond, q[pred])
    };
    if let Some(x) = draw_strictly_between(q, lo, hi, rng) {
        let old = q[v];
        q[v] = x;
        if let Some(oracle) = accept {
            if !oracle(&expand(quotient, partition, q)) {
                q[v] = old;
            }
        }
    }
}

/// Assigns fresh sorted values to the current quotient order, the
/// quotient counterpart of drawing a measure from a linear extension.
fn quotient_resample(quotient: &Quotient, q: &mut [f64], rng: &mut impl Rng) {
    let order = quotient_order(q);
    let interior = quotient.len - 2;
    let mut draws: Vec<f64>;
    loop {
        draws = (0..interior).map(|_| open_unit(rng)).collect();
        draws.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        if draws.windows(2).all(|w| w[0] < w[1]) {
            break;
        }
    }
    for (i, &vertex) in order.iter().enumerate() {
        q[vertex] = if i == 0 {
            0.0
        } else if i == quotient.len - 1 {
            1.0
        } else {
            draws[i - 1]
        };
    }
}
