//! Monte Carlo size and power campaigns.
//!
//! Replication `r` draws its design and noise from `stream(base_seed, r)`:
//! all rows of `X` first (row-major), then `ε`. Outcomes are merged by
//! replication index, so results do not depend on the worker count.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dantzig::{Tuning, default_tuning};
use crate::error::{Error, Result};
use crate::inference::{Method, UnknownSigmaTester, critical_value, known_sigma_statistic};
use crate::numerics::rng::{StreamRng, stream};
use crate::numerics::{DenseMatrix, LowerTriangular, cholesky, dot, equicorrelation, ks_test_standard_normal, solve_spd, toeplitz};
use crate::synthesize::projection_direction;

/// Correlation of the Toeplitz and equicorrelated designs.
pub const DESIGN_CORRELATION: f64 = 0.4;
/// Size of the leading equicorrelated block of the mixed design.
pub const MIXED_BLOCK: usize = 15;
/// Variance of the right component `N(1, ·)` in the mixed design's mixture
/// block. Read as a variance, not a standard deviation.
pub const MIXTURE_RIGHT_VARIANCE: f64 = 0.5;
/// Campaigns fail when more than this share of replications error.
pub const MAX_ERROR_SHARE: f64 = 0.2;
/// Environment variable capping the worker pool.
pub const THREADS_ENV: &str = "DENSETEST_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Design {
    Toeplitz,
    EquiCorrelation,
    FanSongMixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sparsity {
    Sparse,
    Dense,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Regime {
    pub beta: Sparsity,
    pub loading: Sparsity,
}

impl Regime {
    pub const ALL: [Regime; 4] = [
        Regime::new(Sparsity::Sparse, Sparsity::Sparse),
        Regime::new(Sparsity::Sparse, Sparsity::Dense),
        Regime::new(Sparsity::Dense, Sparsity::Sparse),
        Regime::new(Sparsity::Dense, Sparsity::Dense),
    ];

    pub const fn new(beta: Sparsity, loading: Sparsity) -> Self {
        Self { beta, loading }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = |s: Sparsity| match s {
            Sparsity::Sparse => "sparse",
            Sparsity::Dense => "dense",
        };
        write!(f, "{} beta / {} a", name(self.beta), name(self.loading))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodChoice {
    KnownSigma,
    UnknownSigma,
    Both,
}

impl MethodChoice {
    fn methods(self) -> &'static [Method] {
        match self {
            MethodChoice::KnownSigma => &[Method::KnownSigma],
            MethodChoice::UnknownSigma => &[Method::UnknownSigma],
            MethodChoice::Both => &[Method::KnownSigma, Method::UnknownSigma],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub design: Design,
    pub regime: Regime,
    pub n: usize,
    pub p: usize,
    pub reps: usize,
    pub alpha: f64,
    /// Offsets `h` in `g₀ = aᵀβ + h`.
    pub h_grid: Vec<f64>,
    pub method: MethodChoice,
    pub base_seed: u64,
    /// Defaults to [`default_tuning`] for `(n, p)`.
    #[serde(default)]
    pub tuning: Option<Tuning>,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::InvalidParameter("reps must be at least 1".into()));
        }
        if self.h_grid.is_empty() || self.h_grid.iter().any(|h| !h.is_finite()) {
            return Err(Error::InvalidParameter("h_grid must be non-empty and finite".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::OutOfRange(self.alpha));
        }
        if self.n < 2 || self.p < 2 {
            return Err(Error::InvalidParameter(format!(
                "need n, p >= 2, got n = {}, p = {}",
                self.n, self.p
            )));
        }
        if self.design == Design::FanSongMixed && self.p <= MIXED_BLOCK {
            return Err(Error::InvalidParameter(format!(
                "the mixed design needs p >= {}, got {}",
                MIXED_BLOCK + 1,
                self.p
            )));
        }
        Ok(())
    }

    pub fn tuning(&self) -> Result<Tuning> {
        match self.tuning {
            Some(t) => Ok(t),
            None => default_tuning(self.n, self.p),
        }
    }
}

/// Aggregate outcome at one offset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HRow {
    pub h: f64,
    /// Rejections over replications that produced a decision.
    pub rejection_rate: f64,
    pub n_reps: usize,
    pub n_errors: usize,
    pub n_infeasible: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodResult {
    pub method: Method,
    pub rows: Vec<HRow>,
    /// Statistic at `h = 0` per replication; `None` where it was not
    /// computed.
    pub null_statistics: Vec<Option<f64>>,
    pub ks_p_value: Option<f64>,
    /// Share of replications whose estimators were feasible at `h = 0`.
    /// Only for the unknown-covariance test.
    pub feasibility_rate: Option<f64>,
}

impl MethodResult {
    pub fn rate_at(&self, h: f64) -> Option<f64> {
        self.rows.iter().find(|r| r.h == h).map(|r| r.rejection_rate)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepError {
    pub rep: usize,
    pub method: Method,
    pub h: f64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub config: SimConfig,
    pub results: Vec<MethodResult>,
    pub errors: Vec<RepError>,
    /// Excluded from serialized output so reruns are byte-identical.
    #[serde(skip)]
    pub wall_time: f64,
}

impl SimResult {
    pub fn method(&self, method: Method) -> Option<&MethodResult> {
        self.results.iter().find(|r| r.method == method)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,h,rejection_rate,n_reps,n_errors,n_infeasible\n");
        for m in &self.results {
            let name = match m.method {
                Method::KnownSigma => "known_sigma",
                Method::UnknownSigma => "unknown_sigma",
            };
            for r in &m.rows {
                let _ = writeln!(
                    out,
                    "{name},{},{},{},{},{}",
                    r.h, r.rejection_rate, r.n_reps, r.n_errors, r.n_infeasible
                );
            }
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn write(&self, csv_path: &Path, json_path: &Path) -> Result<()> {
        std::fs::write(csv_path, self.to_csv())?;
        std::fs::write(json_path, self.to_json()?)?;
        Ok(())
    }
}

/// Population covariance of a design.
pub fn population_covariance(design: Design, p: usize) -> Result<DenseMatrix> {
    match design {
        Design::Toeplitz => Ok(toeplitz(p, DESIGN_CORRELATION)),
        Design::EquiCorrelation => Ok(equicorrelation(p, DESIGN_CORRELATION)),
        Design::FanSongMixed => {
            check_mixed(p)?;
            let (third, two_thirds) = (p / 3, 2 * p / 3);
            Ok(DenseMatrix::from_fn(p, p, |i, j| match (i < MIXED_BLOCK, j < MIXED_BLOCK) {
                (true, true) if i == j => 1.0,
                (true, true) => 1.0 / (1.0 + mixed_c() * mixed_c()),
                _ if i != j => 0.0,
                _ if i < third => 1.0,
                _ if i < two_thirds => 2.0,
                _ => 0.5 * (1.0 + 1.0) + 0.5 * (MIXTURE_RIGHT_VARIANCE + 1.0),
            }))
        }
    }
}

fn mixed_c() -> f64 {
    1.5f64.sqrt()
}

fn check_mixed(p: usize) -> Result<()> {
    if p <= MIXED_BLOCK {
        return Err(Error::InvalidParameter(format!(
            "the mixed design needs p >= {}, got {p}",
            MIXED_BLOCK + 1
        )));
    }
    Ok(())
}

/// Reusable row sampler for a design.
#[derive(Debug, Clone)]
pub enum DesignSampler {
    Gaussian(LowerTriangular),
    Mixed { p: usize },
}

impl DesignSampler {
    pub fn new(design: Design, p: usize) -> Result<Self> {
        if p < 2 {
            return Err(Error::InvalidParameter(format!("need p >= 2, got {p}")));
        }
        match design {
            Design::FanSongMixed => {
                check_mixed(p)?;
                Ok(Self::Mixed { p })
            }
            _ => Ok(Self::Gaussian(cholesky(&population_covariance(design, p)?)?)),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> DenseMatrix {
        match self {
            Self::Gaussian(l) => l.sample_rows(n, rng),
            &Self::Mixed { p } => {
                let c = mixed_c();
                let scale = (1.0 + c * c).sqrt();
                let right = Normal::new(1.0, MIXTURE_RIGHT_VARIANCE.sqrt()).expect("finite sd");
                let (third, two_thirds) = (p / 3, 2 * p / 3);
                let mut x = DenseMatrix::zeros(n, p);
                for i in 0..n {
                    let xi: f64 = rng.sample(StandardNormal);
                    let row = x.row_mut(i);
                    for (j, v) in row.iter_mut().enumerate() {
                        *v = if j < MIXED_BLOCK {
                            let e: f64 = rng.sample(StandardNormal);
                            (xi + c * e) / scale
                        } else if j < third {
                            rng.sample(StandardNormal)
                        } else if j < two_thirds {
                            laplace(rng.random::<f64>())
                        } else if rng.random::<bool>() {
                            right.sample(rng)
                        } else {
                            let e: f64 = rng.sample(StandardNormal);
                            e - 1.0
                        };
                    }
                }
                x
            }
        }
    }
}

/// Inverse CDF of the standard Laplace distribution.
fn laplace(u: f64) -> f64 {
    let t = u - 0.5;
    // ln_1p keeps precision near the median; u = 0 maps to -inf only with
    // probability zero.
    -t.signum() * (-2.0 * t.abs()).ln_1p()
}

pub fn gen_design(design: Design, n: usize, p: usize, rng: &mut StreamRng) -> Result<DenseMatrix> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need n >= 2, got {n}")));
    }
    Ok(DesignSampler::new(design, p)?.sample(n, rng))
}

/// `(β*, a)` for a regime.
pub fn gen_regime(regime: Regime, p: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if p < 2 {
        return Err(Error::InvalidParameter(format!("need p >= 2, got {p}")));
    }
    let beta = match regime.beta {
        Sparsity::Sparse => {
            let mut b = vec![0.0; p];
            b[0] = 0.8;
            b[1] = 0.8;
            b
        }
        Sparsity::Dense => vec![3.0 / (p as f64).sqrt(); p],
    };
    let a = match regime.loading {
        Sparsity::Sparse => {
            let mut a = vec![0.0; p];
            a[1] = 1.0;
            a
        }
        Sparsity::Dense => vec![1.0; p],
    };
    Ok((beta, a))
}

/// `h_n = n^{-1/2} (aᵀ Ω a)^{1/2} σ_ε d`.
pub fn local_alternative_offset(sigma: &DenseMatrix, a: &[f64], sigma_eps: f64, d: f64, n: usize) -> Result<f64> {
    let omega_a = solve_spd(sigma, a)?;
    Ok(dot(a, &omega_a).sqrt() * sigma_eps * d / (n as f64).sqrt())
}

/// Worker count from the environment, if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&t| t > 0)
}

#[derive(Debug, Clone)]
enum Outcome {
    Decided { statistic: f64, reject: bool },
    Infeasible,
    Failed(String),
}

/// Offsets evaluated per replication: the grid plus `h = 0`.
fn evaluation_offsets(h_grid: &[f64]) -> Vec<f64> {
    let mut hs = h_grid.to_vec();
    if !hs.contains(&0.0) {
        hs.push(0.0);
    }
    hs
}

struct Campaign {
    config: SimConfig,
    sampler: DesignSampler,
    beta: Vec<f64>,
    a: Vec<f64>,
    truth: f64,
    known_b: Option<Vec<f64>>,
    tuning: Tuning,
    crit: f64,
    offsets: Vec<f64>,
}

impl Campaign {
    fn new(config: &SimConfig) -> Result<Self> {
        config.validate()?;
        let (beta, a) = gen_regime(config.regime, config.p)?;
        let known_b = if config.method != MethodChoice::UnknownSigma {
            Some(projection_direction(&a, &population_covariance(config.design, config.p)?)?)
        } else {
            None
        };
        Ok(Self {
            sampler: DesignSampler::new(config.design, config.p)?,
            truth: dot(&a, &beta),
            beta,
            a,
            known_b,
            tuning: config.tuning()?,
            crit: critical_value(config.alpha)?,
            offsets: evaluation_offsets(&config.h_grid),
            config: config.clone(),
        })
    }

    /// Outcomes indexed `[method][offset]`.
    fn replicate(&self, rep: usize) -> Vec<Vec<Outcome>> {
        let mut rng = stream(self.config.base_seed, rep as u64);
        let x = self.sampler.sample(self.config.n, &mut rng);
        let y: Vec<f64> = (0..self.config.n)
            .map(|i| {
                let e: f64 = rng.sample(StandardNormal);
                dot(x.row(i), &self.beta) + e
            })
            .collect();
        self.config
            .method
            .methods()
            .iter()
            .map(|&m| match m {
                Method::KnownSigma => self.known(&x, &y),
                Method::UnknownSigma => self.unknown(&x, &y),
            })
            .collect()
    }

    fn decide(&self, r: Result<f64>) -> Outcome {
        match r {
            Ok(s) => Outcome::Decided {
                statistic: s,
                reject: s.abs() > self.crit,
            },
            Err(Error::InfeasibleEstimator(_)) => Outcome::Infeasible,
            Err(e) => Outcome::Failed(e.to_string()),
        }
    }

    fn known(&self, x: &DenseMatrix, y: &[f64]) -> Vec<Outcome> {
        let b = self.known_b.as_ref().expect("projection computed for known-covariance campaigns");
        let z = match x.matvec(b) {
            Ok(z) => z,
            Err(e) => return vec![Outcome::Failed(e.to_string()); self.offsets.len()],
        };
        self.offsets
            .iter()
            .map(|h| self.decide(known_sigma_statistic(&z, y, self.truth + h)))
            .collect()
    }

    fn unknown(&self, x: &DenseMatrix, y: &[f64]) -> Vec<Outcome> {
        let tester = match UnknownSigmaTester::new(x, y, &self.a, self.tuning) {
            Ok(t) => t,
            Err(e) => return vec![self.decide(Err(e)); self.offsets.len()],
        };
        self.offsets
            .iter()
            .map(|h| self.decide(tester.statistic(self.truth + h).map(|(s, _)| s)))
            .collect()
    }
}

pub fn run_campaign(config: &SimConfig) -> Result<SimResult> {
    run_campaign_with_threads(config, threads_from_env())
}

/// Runs a campaign on a dedicated pool of `threads` workers (rayon's default
/// when `None`).
pub fn run_campaign_with_threads(config: &SimConfig, threads: Option<usize>) -> Result<SimResult> {
    let start = Instant::now();
    let campaign = Campaign::new(config)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))?;
    let outcomes: Vec<Vec<Vec<Outcome>>> = pool.install(|| (0..config.reps).into_par_iter().map(|r| campaign.replicate(r)).collect());

    let methods = config.method.methods();
    let zero = campaign.offsets.iter().position(|&h| h == 0.0).expect("h = 0 always evaluated");
    let mut errors = Vec::new();
    let mut failed_reps = 0;
    for (rep, per_method) in outcomes.iter().enumerate() {
        let mut failed = false;
        for (mi, per_h) in per_method.iter().enumerate() {
            for (hi, o) in per_h.iter().enumerate() {
                if let Outcome::Failed(message) = o {
                    failed = true;
                    errors.push(RepError {
                        rep,
                        method: methods[mi],
                        h: campaign.offsets[hi],
                        message: message.clone(),
                    });
                }
            }
        }
        failed_reps += usize::from(failed);
    }
    if failed_reps as f64 > MAX_ERROR_SHARE * config.reps as f64 {
        return Err(Error::CampaignFailed {
            failed: failed_reps,
            reps: config.reps,
        });
    }

    let results = methods
        .iter()
        .enumerate()
        .map(|(mi, &method)| {
            let rows = config
                .h_grid
                .iter()
                .map(|&h| {
                    let hi = campaign.offsets.iter().position(|&o| o == h).expect("grid offset evaluated");
                    let (mut rejects, mut decided, mut n_errors, mut n_infeasible) = (0usize, 0usize, 0usize, 0usize);
                    for per_method in &outcomes {
                        match &per_method[mi][hi] {
                            Outcome::Decided { reject, .. } => {
                                decided += 1;
                                rejects += usize::from(*reject);
                            }
                            Outcome::Infeasible => n_infeasible += 1,
                            Outcome::Failed(_) => n_errors += 1,
                        }
                    }
                    HRow {
                        h,
                        rejection_rate: if decided > 0 { rejects as f64 / decided as f64 } else { f64::NAN },
                        n_reps: config.reps,
                        n_errors,
                        n_infeasible,
                    }
                })
                .collect();
            let null_statistics: Vec<Option<f64>> = outcomes
                .iter()
                .map(|per_method| match per_method[mi][zero] {
                    Outcome::Decided { statistic, .. } => Some(statistic),
                    _ => None,
                })
                .collect();
            let sample: Vec<f64> = null_statistics.iter().flatten().copied().collect();
            let ks_p_value = ks_test_standard_normal(&sample).ok().map(|k| k.p_value);
            let feasibility_rate = (method == Method::UnknownSigma).then(|| {
                let feasible = outcomes.iter().filter(|pm| !matches!(pm[mi][zero], Outcome::Infeasible)).count();
                feasible as f64 / config.reps as f64
            });
            MethodResult {
                method,
                rows,
                null_statistics,
                ks_p_value,
                feasibility_rate,
            }
        })
        .collect();

    Ok(SimResult {
        config: config.clone(),
        results,
        errors,
        wall_time: start.elapsed().as_secs_f64(),
    })
}
