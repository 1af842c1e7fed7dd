//! Synthetic Gaussian datasets with controlled inter-class separation and
//! intra-class spread, plus Monte Carlo verification of the analytic
//! inter-class overlap bound.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

use crate::config::{ClassId, ProtocolConfig};
use crate::dataset::{LabeledSample, SessionDataset};
use crate::error::{Error, Result};
use crate::feature::{squared_distance, FeatureVector};

/// How class means are laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeanPlacement {
    /// Uniform directions on a sphere, rejection-sampled to keep pairwise
    /// distances >= delta, then rescaled so the minimum is exactly delta.
    SphereRejection,
    /// Regular simplex vertices scaled to exact pairwise distance delta.
    /// Requires dim >= total_classes - 1.
    ScaledSimplex,
}

/// Specification of a synthetic dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub protocol: ProtocolConfig,
    /// Per-coordinate standard deviation of each class cloud.
    pub sigma_intra: f64,
    /// Minimum pairwise distance between class means.
    pub target_delta_inter: f64,
    pub mean_placement: MeanPlacement,
    pub test_per_class: usize,
    pub base_train_per_class: usize,
    /// Distance of the mean constellation's center from the origin.
    /// 0 centers the constellation at the origin; a large value places the
    /// means in a narrow cone, which is how real (post-ReLU) embedding
    /// spaces behave and what makes cosine thresholds near 1 meaningful.
    pub center_norm: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        self.protocol.validate()?;
        if !(self.sigma_intra > 0.0) {
            return Err(Error::InvalidConfig("sigma_intra must be > 0".into()));
        }
        if !(self.target_delta_inter > 0.0) {
            return Err(Error::InvalidConfig("target_delta_inter must be > 0".into()));
        }
        if self.test_per_class < 1 || self.base_train_per_class < 1 {
            return Err(Error::InvalidConfig(
                "test_per_class and base_train_per_class must be >= 1".into(),
            ));
        }
        if !(self.center_norm >= 0.0) {
            return Err(Error::InvalidConfig("center_norm must be >= 0".into()));
        }
        Ok(())
    }
}

/// A generated dataset together with the true class means, for experiments
/// that need ground truth (prototype-error diagnostics).
#[derive(Debug, Clone, PartialEq)]
pub struct SynthOutput {
    pub dataset: SessionDataset,
    pub class_means: Vec<FeatureVector>,
}

/// Seeded standard-normal source (Box-Muller over ChaCha12).
struct GaussianSource {
    rng: ChaCha12Rng,
    spare: Option<f64>,
}

impl GaussianSource {
    fn new(seed: u64) -> Self {
        GaussianSource { rng: ChaCha12Rng::seed_from_u64(seed), spare: None }
    }

    fn uniform_open01(&mut self) -> f64 {
        loop {
            let u = (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            if u > 0.0 {
                return u;
            }
        }
    }

    fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.uniform_open01();
        let u2 = self.uniform_open01();
        let r = libm::sqrt(-2.0 * libm::log(u1));
        let theta = 2.0 * core::f64::consts::PI * u2;
        self.spare = Some(r * libm::sin(theta));
        r * libm::cos(theta)
    }

    fn normal_vec(&mut self, dim: usize) -> Vec<f64> {
        (0..dim).map(|_| self.next_normal()).collect()
    }

    fn unit_vec(&mut self, dim: usize) -> Vec<f64> {
        loop {
            let mut v = self.normal_vec(dim);
            let n = libm::sqrt(v.iter().map(|x| x * x).sum());
            if n > 1e-12 {
                for x in v.iter_mut() {
                    *x /= n;
                }
                return v;
            }
        }
    }
}

fn min_pairwise_distance(points: &[Vec<f64>]) -> f64 {
    let mut min = f64::INFINITY;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let d = libm::sqrt(squared_distance(&points[i], &points[j]));
            if d < min {
                min = d;
            }
        }
    }
    min
}

fn place_sphere_rejection(
    gauss: &mut GaussianSource,
    classes: usize,
    dim: usize,
    delta: f64,
) -> Result<Vec<Vec<f64>>> {
    let mut radius = delta;
    for _escalation in 0..24 {
        let mut points: Vec<Vec<f64>> = Vec::with_capacity(classes);
        'place: for _ in 0..classes {
            for _attempt in 0..200 {
                let u = gauss.unit_vec(dim);
                let candidate: Vec<f64> = u.iter().map(|x| x * radius).collect();
                let clear = points.iter().all(|p| {
                    squared_distance(p, &candidate) >= (delta * 0.999) * (delta * 0.999)
                });
                if clear {
                    points.push(candidate);
                    continue 'place;
                }
            }
            // this radius is too tight; grow and restart the whole set
            points.clear();
            break;
        }
        if points.len() == classes {
            // rescale so the minimum pairwise distance is exactly delta
            let scale = delta / min_pairwise_distance(&points);
            for p in points.iter_mut() {
                for x in p.iter_mut() {
                    *x *= scale;
                }
            }
            return Ok(points);
        }
        radius *= 1.25;
    }
    Err(Error::PackingInfeasible)
}

/// Regular simplex with `classes` vertices and side `delta`, embedded in
/// the first `classes - 1` coordinates: vertices e_1..e_{n} and t*(1,..,1)
/// with n = classes - 1 and t = (1 - sqrt(n + 1)) / n form a regular
/// simplex of side sqrt(2).
fn place_simplex(classes: usize, dim: usize, delta: f64) -> Result<Vec<Vec<f64>>> {
    if classes == 1 {
        return Ok(vec![vec![0.0; dim]]);
    }
    let n = classes - 1;
    if dim < n {
        return Err(Error::InvalidConfig(
            "ScaledSimplex needs dim >= total_classes - 1".into(),
        ));
    }
    let scale = delta / libm::sqrt(2.0);
    let mut points = Vec::with_capacity(classes);
    for i in 0..n {
        let mut p = vec![0.0; dim];
        p[i] = scale;
        points.push(p);
    }
    let t = (1.0 - libm::sqrt((n + 1) as f64)) / n as f64 * scale;
    let mut last = vec![0.0; dim];
    for x in last.iter_mut().take(n) {
        *x = t;
    }
    points.push(last);
    Ok(points)
}

fn sample_around(gauss: &mut GaussianSource, mean: &[f64], sigma: f64) -> FeatureVector {
    let mut v: Vec<f64> = mean
        .iter()
        .map(|m| m + sigma * gauss.next_normal())
        .collect();
    // keep cosine similarity total: nudge an exactly-zero draw
    if v.iter().all(|x| *x == 0.0) {
        v[0] = f64::EPSILON;
    }
    FeatureVector::new(v).expect("gaussian draw is finite")
}

/// Generate a dataset plus its ground-truth class means, deterministically
/// from the spec's seed.
pub fn generate(spec: &SynthSpec) -> Result<SynthOutput> {
    spec.validate()?;
    let cfg = spec.protocol;
    let mut gauss = GaussianSource::new(spec.seed);

    let mut means = match spec.mean_placement {
        MeanPlacement::SphereRejection => place_sphere_rejection(
            &mut gauss,
            cfg.total_classes,
            cfg.dim,
            spec.target_delta_inter,
        )?,
        MeanPlacement::ScaledSimplex => {
            place_simplex(cfg.total_classes, cfg.dim, spec.target_delta_inter)?
        }
    };
    if spec.center_norm > 0.0 {
        let center = gauss.unit_vec(cfg.dim);
        for m in means.iter_mut() {
            for (x, c) in m.iter_mut().zip(&center) {
                *x += spec.center_norm * c;
            }
        }
    }

    let mut train: Vec<Vec<LabeledSample>> = Vec::with_capacity(cfg.sessions + 1);
    let mut test: Vec<Vec<LabeledSample>> = Vec::with_capacity(cfg.sessions + 1);
    for t in 0..=cfg.sessions {
        let mut train_t = Vec::new();
        for id in cfg.class_range(t) {
            let count = if t == 0 { spec.base_train_per_class } else { cfg.shot };
            for _ in 0..count {
                train_t.push(LabeledSample {
                    feature: sample_around(&mut gauss, &means[id], spec.sigma_intra),
                    label: ClassId(id),
                });
            }
        }
        train.push(train_t);

        let mut test_t = Vec::new();
        for id in 0..cfg.seen_classes(t) {
            for _ in 0..spec.test_per_class {
                test_t.push(LabeledSample {
                    feature: sample_around(&mut gauss, &means[id], spec.sigma_intra),
                    label: ClassId(id),
                });
            }
        }
        test.push(test_t);
    }

    let class_means = means
        .into_iter()
        .map(|m| FeatureVector::new(m).expect("means are finite"))
        .collect();
    Ok(SynthOutput {
        dataset: SessionDataset { config: cfg, train, test },
        class_means,
    })
}

/// [`generate`] without the ground-truth means.
pub fn generate_dataset(spec: &SynthSpec) -> Result<SessionDataset> {
    Ok(generate(spec)?.dataset)
}

/// Empirical separation statistics of a dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Separation {
    /// Minimum pairwise distance between empirical class means.
    pub delta_inter: f64,
    /// Root of the mean empirical covariance trace across classes.
    pub sigma_intra: f64,
}

/// Measure delta_inter and sigma_intra from all samples (train and test
/// pooled per class). Every class needs at least two samples.
pub fn measure_separation(dataset: &SessionDataset) -> Result<Separation> {
    let cfg = &dataset.config;
    let dim = cfg.dim;
    let mut sums: Vec<Vec<f64>> = vec![vec![0.0; dim]; cfg.total_classes];
    let mut counts = vec![0usize; cfg.total_classes];
    let all = dataset.train.iter().chain(dataset.test.iter()).flatten();
    for s in all.clone() {
        for (a, x) in sums[s.label.0].iter_mut().zip(s.feature.as_slice()) {
            *a += x;
        }
        counts[s.label.0] += 1;
    }
    let present: Vec<usize> = (0..cfg.total_classes).filter(|&c| counts[c] > 0).collect();
    if present.len() < 2 {
        return Err(Error::InvalidConfig("need at least 2 classes".into()));
    }
    let mut means: Vec<Vec<f64>> = Vec::with_capacity(present.len());
    for &c in &present {
        if counts[c] < 2 {
            return Err(Error::SingletonClass(ClassId(c)));
        }
        means.push(sums[c].iter().map(|s| s / counts[c] as f64).collect());
    }

    // trace of the empirical covariance = sum of squared deviations / (n - 1)
    let mut sq_dev = vec![0.0f64; cfg.total_classes];
    for s in all {
        let idx = present.iter().position(|&c| c == s.label.0).unwrap();
        sq_dev[s.label.0] += squared_distance(s.feature.as_slice(), &means[idx]);
    }
    let mean_trace = present
        .iter()
        .map(|&c| sq_dev[c] / (counts[c] - 1) as f64)
        .sum::<f64>()
        / present.len() as f64;

    Ok(Separation {
        delta_inter: min_pairwise_distance(&means),
        sigma_intra: libm::sqrt(mean_trace),
    })
}

/// Parameters of one Monte Carlo run against the overlap bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapQuery {
    pub delta: f64,
    pub sigma: f64,
    pub epsilon: f64,
    pub dim: usize,
    pub trials: u64,
    pub seed: u64,
}

impl OverlapQuery {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.sigma > 0.0) {
            return Err(Error::InvalidConfig("delta and sigma must be > 0".into()));
        }
        if !(self.epsilon >= 0.0) {
            return Err(Error::InvalidConfig("epsilon must be >= 0".into()));
        }
        if self.dim < 1 {
            return Err(Error::InvalidConfig("dim must be >= 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::ZeroTrials);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapEstimate {
    pub probability: f64,
    pub stderr: f64,
}

/// Simulate the worst-case construction of the overlap bound directly.
///
/// True means sit at distance delta along the first axis. Both estimated
/// means are displaced by epsilon in the direction (mu_c - mu_c'), the
/// alignment under which the misclassification probability attains
/// 1 - Phi((delta - 2 epsilon) / (2 sigma)). Each trial draws
/// X ~ N(mu_c, sigma^2 I) and tests the raw misclassification event
/// ||X - mu_hat_c'||^2 < ||X - mu_hat_c||^2.
pub fn monte_carlo_overlap(query: &OverlapQuery) -> Result<OverlapEstimate> {
    query.validate()?;
    let dim = query.dim;
    let mu_c = vec![0.0; dim];
    let mut mu_cp = vec![0.0; dim];
    mu_cp[0] = query.delta;
    // u = (mu_c - mu_c') / delta = -e1; both estimates shift by epsilon * u
    let mut mu_hat_c = mu_c.clone();
    mu_hat_c[0] -= query.epsilon;
    let mut mu_hat_cp = mu_cp.clone();
    mu_hat_cp[0] -= query.epsilon;

    let mut gauss = GaussianSource::new(query.seed);
    let mut hits = 0u64;
    let mut x = vec![0.0; dim];
    for _ in 0..query.trials {
        for (xi, mi) in x.iter_mut().zip(&mu_c) {
            *xi = mi + query.sigma * gauss.next_normal();
        }
        if squared_distance(&x, &mu_hat_cp) < squared_distance(&x, &mu_hat_c) {
            hits += 1;
        }
    }
    let p = hits as f64 / query.trials as f64;
    let stderr = libm::sqrt(p * (1.0 - p) / query.trials as f64);
    Ok(OverlapEstimate { probability: p, stderr })
}
