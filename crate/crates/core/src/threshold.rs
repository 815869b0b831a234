//! Monte Carlo logical error rates and pseudothreshold extraction.
//!
//! Each trial starts from a clean codeword, runs one noisy protocol round,
//! applies the lookup-table correction and a noiseless perfect round, and
//! fails when a logical operator (of any type) is left behind.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::code::ResidualClass;
use crate::engine::FrameEngine;
use crate::error::{Error, Result};
use crate::noise::{trial_rng, NoiseModel};
use crate::protocol::{walk_key, MissPolicy, Protocol, SampledFaults};
use crate::synthesis::PerfectRoundDecoder;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Trials handed to a worker at a time. Fixed so that the summation order,
/// and hence every count, is independent of the worker count.
const BLOCK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub p: f64,
    pub trials: u64,
    pub failures: u64,
    pub p_l: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl SweepPoint {
    pub fn new(p: f64, trials: u64, failures: u64) -> Self {
        assert!(failures <= trials && trials > 0);
        let (ci_low, ci_high) = wilson_interval(failures, trials);
        SweepPoint { p, trials, failures, p_l: failures as f64 / trials as f64, ci_low, ci_high }
    }
}

/// 95% Wilson score interval for `failures` out of `trials`.
pub fn wilson_interval(failures: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let phat = failures as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = Z95 * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // Clamp against rounding so that low <= phat <= high always holds.
    ((center - half).max(0.0).min(phat), (center + half).min(1.0).max(phat))
}

/// Reusable per-protocol state for running trials.
#[derive(Debug, Clone)]
pub struct TrialRunner<'a> {
    protocol: &'a Protocol,
    decoder: PerfectRoundDecoder,
}

impl<'a> TrialRunner<'a> {
    pub fn new(protocol: &'a Protocol) -> Self {
        TrialRunner { protocol, decoder: PerfectRoundDecoder::new(protocol.code()) }
    }

    /// One trial with faults drawn from `rng`. True on a logical failure.
    #[inline]
    pub fn run<R: Rng>(&self, model: &NoiseModel, rng: &mut R) -> bool {
        let tree = self.protocol.tree();
        let mut engine = FrameEngine::new(tree.code().n());
        let (key, leaf) = walk_key(tree, &mut engine, &mut SampledFaults { model, rng }).expect("frame engine does not fail");
        let c = self
            .protocol
            .correction(leaf, &key, MissPolicy::Identity)
            .expect("identity policy never misses");
        let residual = engine.data_error().mul_unchecked(&c);
        tree.code().classify_unchecked(&self.decoder.apply(&residual)) == ResidualClass::Logical
    }

    /// Trial `trial` of the stream keyed by `seed`.
    pub fn run_indexed(&self, model: &NoiseModel, seed: u64, trial: u64) -> bool {
        self.run(model, &mut trial_rng(seed, trial))
    }

    /// Failures among trials `start..end`.
    pub fn count_failures(&self, model: &NoiseModel, seed: u64, start: u64, end: u64) -> u64 {
        if model.is_noiseless() {
            return 0;
        }
        (start..end).filter(|&t| self.run_indexed(model, seed, t)).count() as u64
    }
}

/// Logical failure of trial `trial` at rate `p`.
pub fn run_trial(protocol: &Protocol, p: f64, trial: u64, seed: u64) -> Result<bool> {
    let model = NoiseModel::new(p)?;
    Ok(TrialRunner::new(protocol).run_indexed(&model, point_seed(seed, p), trial))
}

/// Stream key for one grid point, derived from the global seed and `p`.
pub fn point_seed(seed: u64, p: f64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ p.to_bits().rotate_left(29));
    rng.random()
}

/// Default trial budget: 10^6 above 10^-3 and 10^5 at or below.
pub fn default_trials(p: f64) -> u64 {
    if p > 1e-3 {
        1_000_000
    } else {
        100_000
    }
}

/// `n` points spaced evenly in log between `lo` and `hi` inclusive.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && n >= 1) || (n == 1 && lo != hi) {
        return Err(Error::InvalidInput(format!("bad log grid {lo},{hi},{n}")));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.log10(), hi.log10());
    Ok((0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64)
            }
        })
        .collect())
}

/// Runs `trials(p)` trials at every grid point on `workers` threads.
pub fn run_sweep(
    protocol: &Protocol,
    ps: &[f64],
    trials: impl Fn(f64) -> u64 + Sync,
    seed: u64,
    workers: usize,
) -> Result<Vec<SweepPoint>> {
    if ps.is_empty() {
        return Err(Error::InvalidInput("empty error-rate grid".into()));
    }
    let models = ps.iter().map(|&p| NoiseModel::new(p)).collect::<Result<Vec<_>>>()?;
    let counts: Vec<u64> = ps.iter().map(|&p| trials(p)).collect();
    if let Some(i) = counts.iter().position(|&t| t == 0) {
        return Err(Error::InvalidInput(format!("zero trials requested at p = {}", ps[i])));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    let runner = TrialRunner::new(protocol);
    let points = pool.install(|| {
        ps.iter()
            .zip(&models)
            .zip(&counts)
            .map(|((&p, model), &n)| {
                let key = point_seed(seed, p);
                let failures: u64 = (0..n.div_ceil(BLOCK))
                    .into_par_iter()
                    .map(|b| runner.count_failures(model, key, b * BLOCK, ((b + 1) * BLOCK).min(n)))
                    .sum();
                SweepPoint::new(p, n, failures)
            })
            .collect()
    });
    Ok(points)
}

/// Crossing of `p_L(p)` with the identity line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PseudothresholdEstimate {
    pub p_star: f64,
    pub bracket_low: SweepPoint,
    pub bracket_high: SweepPoint,
}

/// Interpolates between the first adjacent pair with `p_L < p` below and
/// `p_L > p` above, linearly in `log p_L - log p` against `log p`. A point
/// with `p_L = p` is returned as is. When `p_L` is zero at the lower bracket
/// the log is undefined and the gap `p_L - p` is interpolated linearly in `p`.
pub fn pseudothreshold(points: &[SweepPoint]) -> Result<PseudothresholdEstimate> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.p.total_cmp(&b.p));
    if let Some(exact) = pts.iter().find(|s| s.p > 0.0 && s.p_l == s.p) {
        return Ok(PseudothresholdEstimate { p_star: exact.p, bracket_low: *exact, bracket_high: *exact });
    }
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(a.p > 0.0 && a.p_l < a.p && b.p_l > b.p) {
            continue;
        }
        let p_star = if a.p_l > 0.0 {
            let ra = a.p_l.ln() - a.p.ln();
            let rb = b.p_l.ln() - b.p.ln();
            let t = ra / (ra - rb);
            (a.p.ln() + t * (b.p.ln() - a.p.ln())).exp()
        } else {
            let ga = a.p_l - a.p;
            let gb = b.p_l - b.p;
            a.p + ga / (ga - gb) * (b.p - a.p)
        };
        return Ok(PseudothresholdEstimate { p_star: p_star.clamp(a.p, b.p), bracket_low: a, bracket_high: b });
    }
    Err(Error::NoBracket)
}

/// Parametric bootstrap: resamples every point's failures from a binomial at
/// its observed rate and returns the 2.5% and 97.5% quantiles of the
/// re-estimated crossings. Resamples without a bracket are dropped.
pub fn bootstrap_pseudothreshold(points: &[SweepPoint], reps: usize, seed: u64) -> Result<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stars = Vec::with_capacity(reps);
    for _ in 0..reps {
        let resampled: Vec<SweepPoint> = points
            .iter()
            .map(|s| {
                let f = Binomial::new(s.trials, s.p_l).map(|d| d.sample(&mut rng)).unwrap_or(s.failures);
                SweepPoint::new(s.p, s.trials, f)
            })
            .collect();
        if let Ok(e) = pseudothreshold(&resampled) {
            stars.push(e.p_star);
        }
    }
    if stars.is_empty() {
        return Err(Error::NoBracket);
    }
    stars.sort_by(f64::total_cmp);
    let q = |f: f64| stars[((stars.len() - 1) as f64 * f).round() as usize];
    Ok((q(0.025), q(0.975)))
}

pub const CSV_HEADER: [&str; 7] = ["protocol", "p", "trials", "failures", "p_L", "ci_low", "ci_high"];

/// Writes sweep rows under the fixed header.
pub fn write_csv<W: std::io::Write>(out: W, protocol: &str, points: &[SweepPoint]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for s in points {
        w.write_record([
            protocol.to_string(),
            s.p.to_string(),
            s.trials.to_string(),
            s.failures.to_string(),
            s.p_l.to_string(),
            s.ci_low.to_string(),
            s.ci_high.to_string(),
        ])?;
    }
    w.flush()
}

/// Parses sweep rows, grouped by protocol in order of first appearance.
pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<(String, Vec<SweepPoint>)>> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).from_reader(input);
    let mut out: Vec<(String, Vec<SweepPoint>)> = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let line = i + 1;
        let rec = rec.map_err(|e| Error::MalformedCsv { line, reason: e.to_string() })?;
        if line == 1 {
            if rec.iter().ne(CSV_HEADER) {
                return Err(Error::MalformedCsv { line, reason: format!("expected header {}", CSV_HEADER.join(",")) });
            }
            continue;
        }
        let bad = |reason: &str| Error::MalformedCsv { line, reason: reason.to_string() };
        let p: f64 = rec[1].parse().map_err(|_| bad("p is not a number"))?;
        let trials: u64 = rec[2].parse().map_err(|_| bad("trials is not an integer"))?;
        let failures: u64 = rec[3].parse().map_err(|_| bad("failures is not an integer"))?;
        if trials == 0 || failures > trials {
            return Err(bad("failures must lie in 0..=trials with trials >= 1"));
        }
        let point = SweepPoint::new(p, trials, failures);
        match out.iter_mut().find(|(name, _)| name == &rec[0]) {
            Some((_, v)) => v.push(point),
            None => out.push((rec[0].to_string(), vec![point])),
        }
    }
    if out.is_empty() {
        return Err(Error::MalformedCsv { line: 1, reason: "no data rows".into() });
    }
    Ok(out)
}
