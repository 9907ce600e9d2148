//! Seeded Monte-Carlo estimation by geometric sampling.
//!
//! Each sample follows the physical pipeline: draw a uniform user position,
//! place the antenna optimally, take the squared distance, evaluate the
//! metric. Nothing here touches the analytical distance law, so the estimates
//! are an independent check on it.
//!
//! Sample `i` is a pure function of `(seed, i)`: it is read from a ChaCha8
//! keystream at word offset `4 i`. Samples are grouped into fixed-size chunks;
//! per-chunk statistics are merged in a fixed binary tree over chunk index.
//! The result is therefore bitwise identical for any worker count.

use std::fmt;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use thiserror::Error;

use crate::energy::logistic_harvest;
use crate::geometry::{squared_distance, Deployment, Scheme, UePosition};
use crate::sysconfig::{HarvestModel, LogisticParams, ModelKind, RegionGeometry, Scenario};
use crate::Scalar;

/// Samples per chunk; the unit of parallel work and of the reduction tree.
pub const CHUNK_SAMPLES: u64 = 1 << 14;

pub const DEFAULT_SAMPLES: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 0x5157_1b7a_2025_0001;

// Four 32-bit keystream words per sample (two u64 draws).
const WORDS_PER_SAMPLE: u128 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum McError {
    #[error("need at least 2 samples for a variance estimate, got {0}")]
    TooFewSamples(u64),
    #[error("could not start worker pool: {0}")]
    WorkerPool(String),
}

/// Per-user quantity whose expectation is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    /// `alpha beta eta P_t / L`.
    EnergyLinear,
    /// `alpha Phi(beta P_t / L)`.
    EnergyLogistic,
    /// `(1 - alpha beta) log2(1 + mu gamma_bar / L)`.
    Rate,
}

impl Metric {
    pub fn energy(kind: ModelKind) -> Self {
        match kind {
            ModelKind::Linear => Metric::EnergyLinear,
            ModelKind::Logistic => Metric::EnergyLogistic,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::EnergyLinear => "energy-lm",
            Metric::EnergyLogistic => "energy-nlm",
            Metric::Rate => "rate",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McOptions {
    pub samples: u64,
    pub seed: u64,
    /// Worker threads; 0 picks one per available core.
    pub workers: usize,
}

impl Default for McOptions {
    fn default() -> Self {
        Self {
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
            workers: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateWithCI<T> {
    pub mean: T,
    /// Sample standard deviation over `sqrt(n)`.
    pub std_error: T,
    pub n_samples: u64,
    pub seed: u64,
}

impl<T: Scalar> EstimateWithCI<T> {
    /// Distance from `reference` in standard errors. Infinite when the
    /// estimate has zero spread and differs from `reference`.
    pub fn z_score(&self, reference: T) -> T {
        let diff = (self.mean - reference).abs();
        if diff == T::zero() {
            T::zero()
        } else {
            diff / self.std_error
        }
    }

    pub fn interval(&self, z: T) -> (T, T) {
        (
            self.mean - z * self.std_error,
            self.mean + z * self.std_error,
        )
    }
}

fn unit_interval(bits: u64) -> f64 {
    // 53 high bits -> [0, 1).
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Deterministic stream of uniform user positions; sample `i` depends only on
/// `(seed, i)`.
#[derive(Debug, Clone)]
pub struct UeStream<T> {
    rng: ChaCha8Rng,
    d_x: T,
    d_y: T,
    remaining: u64,
}

impl<T: Scalar> UeStream<T> {
    pub fn starting_at(region: &RegionGeometry<T>, seed: u64, first: u64, count: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_word_pos(u128::from(first) * WORDS_PER_SAMPLE);
        Self {
            rng,
            d_x: region.d_x(),
            d_y: region.d_y(),
            remaining: count,
        }
    }
}

impl<T: Scalar> Iterator for UeStream<T> {
    type Item = UePosition<T>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let u = T::lit(unit_interval(self.rng.next_u64()));
        let v = T::lit(unit_interval(self.rng.next_u64()));
        Some(UePosition::new(u * self.d_x, v * self.d_y))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = usize::try_from(self.remaining).unwrap_or(usize::MAX);
        (n, Some(n))
    }
}

/// The first `n` user positions of the stream for `seed`.
pub fn sample_ue_stream<T: Scalar>(region: &RegionGeometry<T>, seed: u64, n: u64) -> UeStream<T> {
    UeStream::starting_at(region, seed, 0, n)
}

/// User position `index` of the stream for `seed`.
pub fn ue_sample<T: Scalar>(region: &RegionGeometry<T>, seed: u64, index: u64) -> UePosition<T> {
    UeStream::starting_at(region, seed, index, 1)
        .next()
        .expect("stream of length one")
}

/// Count, mean and sum of squared deviations.
#[derive(Debug, Clone, Copy)]
struct Moments<T> {
    n: u64,
    mean: T,
    m2: T,
}

impl<T: Scalar> Moments<T> {
    fn empty() -> Self {
        Self {
            n: 0,
            mean: T::zero(),
            m2: T::zero(),
        }
    }

    fn push(&mut self, x: T) {
        self.n += 1;
        let n = T::from_u64(self.n).expect("count fits the scalar");
        let delta = x - self.mean;
        self.mean = self.mean + delta / n;
        self.m2 = self.m2 + delta * (x - self.mean);
    }

    fn merge(a: Self, b: Self) -> Self {
        if a.n == 0 {
            return b;
        }
        if b.n == 0 {
            return a;
        }
        let n = a.n + b.n;
        let (na, nb, nt) = (
            T::from_u64(a.n).expect("count fits"),
            T::from_u64(b.n).expect("count fits"),
            T::from_u64(n).expect("count fits"),
        );
        let delta = b.mean - a.mean;
        Self {
            n,
            mean: a.mean + delta * nb / nt,
            m2: a.m2 + b.m2 + delta * delta * na * nb / nt,
        }
    }
}

fn tree_merge<T: Scalar>(parts: &[Moments<T>]) -> Moments<T> {
    match parts.len() {
        0 => Moments::empty(),
        1 => parts[0],
        n => {
            let (left, right) = parts.split_at(n / 2);
            Moments::merge(tree_merge(left), tree_merge(right))
        }
    }
}

/// Per-sample metric evaluator with the scenario constants hoisted.
struct Evaluator<T> {
    deployment: Deployment<T>,
    metric: Metric,
    scale: T,
    source_w: T,
    snr_scale: T,
    logistic: Option<LogisticParams<T>>,
}

impl<T: Scalar> Evaluator<T> {
    fn new(metric: Metric, scheme: Scheme, scenario: &Scenario<T>) -> Self {
        let p = &scenario.protocol;
        let s = &scenario.system;
        let (scale, logistic) = match metric {
            Metric::EnergyLinear => {
                let HarvestModel::Linear { eta } = *scenario.harvest(ModelKind::Linear) else {
                    unreachable!("linear slot holds a linear model")
                };
                (p.alpha() * p.beta() * eta * s.transmit_power_w(), None)
            }
            Metric::EnergyLogistic => (p.alpha(), Some(*scenario.logistic_params())),
            Metric::Rate => (p.decode_share() / T::LN_2(), None),
        };
        Self {
            deployment: scenario.deployment(scheme),
            metric,
            scale,
            source_w: p.beta() * s.transmit_power_w(),
            snr_scale: s.snr_scale_m2(),
            logistic,
        }
    }

    fn eval(&self, ue: &UePosition<T>) -> T {
        assert!(self.deployment.contains(ue), "sampled user left the region");
        let antenna = self.deployment.project(ue);
        let l = squared_distance(&self.deployment.region, &antenna, ue).get();
        match self.metric {
            Metric::EnergyLinear => self.scale / l,
            Metric::EnergyLogistic => {
                let params = self.logistic.as_ref().expect("logistic params present");
                self.scale * logistic_harvest(params, self.source_w / l)
            }
            Metric::Rate => self.scale * (self.snr_scale / l).ln_1p(),
        }
    }

    fn chunk(&self, region: &RegionGeometry<T>, seed: u64, first: u64, count: u64) -> Moments<T> {
        let mut m = Moments::empty();
        for ue in UeStream::starting_at(region, seed, first, count) {
            m.push(self.eval(&ue));
        }
        m
    }
}

/// Monte-Carlo estimate of `E[metric]` for one scheme.
pub fn estimate<T: Scalar>(
    metric: Metric,
    scheme: Scheme,
    scenario: &Scenario<T>,
    opts: &McOptions,
) -> Result<EstimateWithCI<T>, McError> {
    if opts.samples < 2 {
        return Err(McError::TooFewSamples(opts.samples));
    }
    let eval = Evaluator::new(metric, scheme, scenario);
    let region = scenario.region;
    let n = opts.samples;
    let chunks = n.div_ceil(CHUNK_SAMPLES);
    let run = |c: u64| {
        let first = c * CHUNK_SAMPLES;
        eval.chunk(&region, opts.seed, first, CHUNK_SAMPLES.min(n - first))
    };

    let parts: Vec<Moments<T>> = if opts.workers == 1 {
        (0..chunks).map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.workers)
            .build()
            .map_err(|e| McError::WorkerPool(e.to_string()))?;
        pool.install(|| (0..chunks).into_par_iter().map(run).collect())
    };

    let total = tree_merge(&parts);
    let nt = T::from_u64(n).expect("count fits the scalar");
    let variance = total.m2 / (nt - T::one());
    Ok(EstimateWithCI {
        mean: total.mean,
        std_error: (variance / nt).sqrt(),
        n_samples: n,
        seed: opts.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sysconfig::Config;

    fn scenario() -> Scenario<f64> {
        Config::reference(0.3).validate().unwrap()
    }

    #[test]
    fn stream_is_counter_based() {
        let r = scenario().region;
        let all: Vec<_> = sample_ue_stream(&r, 7, 100).collect();
        for (i, ue) in all.iter().enumerate() {
            assert_eq!(*ue, ue_sample(&r, 7, i as u64));
        }
        let tail: Vec<_> = UeStream::starting_at(&r, 7, 37, 63).collect();
        assert_eq!(&all[37..], &tail[..]);
        assert_ne!(ue_sample(&r, 8, 0), all[0]);
    }

    #[test]
    fn rejects_tiny_sample_counts() {
        let opts = McOptions {
            samples: 1,
            ..Default::default()
        };
        assert_eq!(
            estimate(Metric::Rate, Scheme::Eds, &scenario(), &opts),
            Err(McError::TooFewSamples(1))
        );
    }

    #[test]
    fn zero_prefactor_gives_exact_zero() {
        let sc = scenario().with_protocol(1.0, 1.0).unwrap();
        let opts = McOptions {
            samples: 10_000,
            ..Default::default()
        };
        let e = estimate(Metric::Rate, Scheme::Dds, &sc, &opts).unwrap();
        assert_eq!(e.mean, 0.0);
        assert_eq!(e.std_error, 0.0);
        assert_eq!(e.z_score(0.0), 0.0);
    }

    #[test]
    fn worker_count_does_not_change_bits() {
        let sc = scenario();
        let base = McOptions {
            samples: 100_003,
            seed: 42,
            workers: 1,
        };
        let one = estimate(Metric::EnergyLogistic, Scheme::Cds, &sc, &base).unwrap();
        for workers in [2, 3, 8] {
            let many = estimate(
                Metric::EnergyLogistic,
                Scheme::Cds,
                &sc,
                &McOptions { workers, ..base },
            )
            .unwrap();
            assert_eq!(one.mean.to_bits(), many.mean.to_bits());
            assert_eq!(one.std_error.to_bits(), many.std_error.to_bits());
        }
    }

    #[test]
    fn moments_merge_matches_direct() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.1).collect();
        let mean = xs.iter().sum::<f64>() / 1000.0;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 999.0;
        let parts: Vec<_> = xs
            .chunks(77)
            .map(|c| {
                let mut m = Moments::empty();
                c.iter().for_each(|&x| m.push(x));
                m
            })
            .collect();
        let t = tree_merge(&parts);
        assert_eq!(t.n, 1000);
        assert!((t.mean - mean).abs() < 1e-12);
        assert!((t.m2 / 999.0 - var).abs() < 1e-10);
    }

    #[test]
    fn single_precision_estimate() {
        let sc = Config::<f32>::reference(0.3).validate().unwrap();
        let opts = McOptions {
            samples: 50_000,
            ..Default::default()
        };
        let e = estimate(Metric::Rate, Scheme::Eds, &sc, &opts).unwrap();
        assert!((e.mean - 4.59).abs() < 0.05);
    }
}
