//! Metropolis sampling of the eigenvalue gas
//! `prod_{i<j} (l_i - l_j)^2 exp(-(N/t) sum V(l_i))`, optionally below a
//! hard wall, with the estimators used to validate densities and the
//! statistics of the largest eigenvalue.
//!
//! Streams come from ChaCha8 seeded with `seed ^ chain`; a chain is fully
//! determined by its seed and configuration.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::potentials::{check_confining, saddle_points, Polynomial};
use crate::spectral_curve::solve_one_cut;

/// Identity of the generator, for run manifests.
pub const RNG_NAME: &str = "ChaCha8";

const TARGET_ACCEPTANCE: f64 = 0.35;
const ADAPT_EVERY: usize = 25;
const BOOTSTRAP_RESAMPLES: usize = 200;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub v: Polynomial,
    pub t: f64,
    pub n: usize,
    pub wall: Option<f64>,
    /// Initial proposal scale; adapted during burn-in only.
    pub step: f64,
    /// Sweeps after burn-in (one sweep = N single-coordinate proposals).
    pub sweeps: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    /// Starting positions; equally spaced on the support estimate if
    /// absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<f64>>,
}

impl SamplerConfig {
    pub fn new(v: Polynomial, t: f64, n: usize) -> Self {
        SamplerConfig {
            v,
            t,
            n,
            wall: None,
            step: 0.1,
            sweeps: 10_000,
            burn_in: 1_000,
            thin: 1,
            seed: 0,
            initial: None,
        }
    }

    fn validate(&self) -> Result<()> {
        check_confining(&self.v)?;
        if !(self.t > 0.0) || self.n == 0 || !(self.step > 0.0) || self.thin == 0 || self.sweeps == 0 {
            return Err(Error::Sampler(
                "need t > 0, N >= 1, step > 0, sweeps >= 1 and thin >= 1".into(),
            ));
        }
        if matches!(self.wall, Some(w) if !w.is_finite()) {
            return Err(Error::Sampler("wall must be finite".into()));
        }
        Ok(())
    }
}

/// Eigenvalue positions, sorted ascending.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GasState {
    pub lambda: Vec<f64>,
}

impl GasState {
    pub fn max(&self) -> f64 {
        *self.lambda.last().expect("non-empty state")
    }
}

/// Equally spaced points inside the (unconstrained) support estimate,
/// pushed below the wall if there is one.
fn initial_state(cfg: &SamplerConfig) -> Result<Vec<f64>> {
    let (b, a) = match solve_one_cut(&cfg.v, cfg.t) {
        Ok(sol) => (sol.b, sol.a),
        Err(_) => {
            // rough width from the curvature at the lowest minimum
            let sp = saddle_points(&cfg.v)?;
            let m = sp.global_minimum().ok_or_else(|| Error::Sampler("potential has no minimum".into()))?;
            let k = cfg.v.derivative().derivative().eval_f64(m.x).max(1e-3);
            let w = 2.0 * (cfg.t / k).sqrt();
            (m.x - w, m.x + w)
        }
    };
    let n = cfg.n;
    let top = cfg.wall.map_or(a, |w| w.min(a));
    let width = a - b;
    let pts = if top > b {
        (0..n).map(|k| b + (k as f64 + 0.5) * (top - b) / n as f64).collect()
    } else {
        (0..n).map(|k| top - (n - k) as f64 * width / n as f64).collect()
    };
    Ok(pts)
}

struct Chain<'a> {
    cfg: &'a SamplerConfig,
    dv: Vec<f64>,
    coupling: f64,
    x: Vec<f64>,
    step: f64,
    rng: ChaCha8Rng,
}

impl Chain<'_> {
    fn pot(&self, x: f64) -> f64 {
        self.dv.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    /// One sweep; returns the number of accepted moves.
    fn sweep(&mut self) -> usize {
        let mut accepted = 0;
        for i in 0..self.x.len() {
            let old = self.x[i];
            let z: f64 = self.rng.sample(StandardNormal);
            let new = old + self.step * z;
            let u: f64 = self.rng.gen();
            if matches!(self.cfg.wall, Some(w) if new > w) {
                continue;
            }
            let mut d = -self.coupling * (self.pot(new) - self.pot(old));
            for (j, &xj) in self.x.iter().enumerate() {
                if j != i {
                    d += 2.0 * ((new - xj).abs() / (old - xj).abs()).ln();
                }
            }
            if u.ln() < d {
                self.x[i] = new;
                accepted += 1;
            }
        }
        accepted
    }
}

/// Runs one chain with seed `cfg.seed ^ chain`.
pub fn sample_chain(cfg: &SamplerConfig, chain: u64) -> Result<Vec<GasState>> {
    cfg.validate()?;
    let x = match &cfg.initial {
        Some(x) => {
            if x.len() != cfg.n {
                return Err(Error::Sampler(format!("initial state has {} entries, N = {}", x.len(), cfg.n)));
            }
            x.clone()
        }
        None => initial_state(cfg)?,
    };
    let mut sorted = x.clone();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|p| p[0] == p[1]) {
        return Err(Error::Sampler("coincident eigenvalues in the initial state".into()));
    }
    if let Some(w) = cfg.wall {
        if x.iter().any(|&l| l > w) {
            return Err(Error::Sampler("initial state violates the wall".into()));
        }
    }
    let mut ch = Chain {
        cfg,
        dv: cfg.v.to_f64_coeffs(),
        coupling: cfg.n as f64 / cfg.t,
        x,
        step: cfg.step,
        rng: ChaCha8Rng::seed_from_u64(cfg.seed ^ chain),
    };
    let moves = ADAPT_EVERY * cfg.n;
    let mut acc = 0;
    for s in 0..cfg.burn_in {
        acc += ch.sweep();
        if (s + 1) % ADAPT_EVERY == 0 {
            let rate = acc as f64 / moves as f64;
            ch.step *= (2.0 * (rate - TARGET_ACCEPTANCE)).exp();
            acc = 0;
        }
    }
    let mut out = Vec::with_capacity(cfg.sweeps / cfg.thin);
    for s in 0..cfg.sweeps {
        ch.sweep();
        if (s + 1) % cfg.thin == 0 {
            let mut l = ch.x.clone();
            l.sort_by(f64::total_cmp);
            out.push(GasState { lambda: l });
        }
    }
    Ok(out)
}

/// Single chain with seed `cfg.seed`.
pub fn sample(cfg: &SamplerConfig) -> Result<Vec<GasState>> {
    sample_chain(cfg, 0)
}

/// Independent chains `0..chains`, concatenated in chain order.
pub fn sample_chains(cfg: &SamplerConfig, chains: usize, exec: Exec) -> Result<Vec<GasState>> {
    let runs = exec.map((0..chains as u64).collect(), |c| sample_chain(cfg, c));
    let mut out = Vec::new();
    for r in runs {
        out.extend(r?);
    }
    Ok(out)
}

/// Mean and batch-means standard error (at most `batches` batches) of a
/// correlated series.
pub fn batch_means(series: &[f64], batches: usize) -> (f64, f64) {
    let n = series.len();
    let mean = series.iter().sum::<f64>() / n as f64;
    let b = batches.min(n).max(2);
    let len = n / b;
    if len == 0 {
        return (mean, f64::NAN);
    }
    let means: Vec<f64> = (0..b).map(|k| series[k * len..(k + 1) * len].iter().sum::<f64>() / len as f64).collect();
    let m = means.iter().sum::<f64>() / b as f64;
    let var = means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (b - 1) as f64;
    (mean, (var / b as f64).sqrt())
}

/// Kolmogorov-Smirnov distance between a sample and a continuous CDF.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter().enumerate().fold(0.0, |d: f64, (i, &x)| {
        let f = cdf(x);
        d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs())
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub density: Vec<f64>,
    pub stderr: Vec<f64>,
}

impl Histogram {
    pub fn integral(&self) -> f64 {
        self.density.iter().zip(self.edges.windows(2)).map(|(d, e)| d * (e[1] - e[0])).sum()
    }
}

/// Normalised eigenvalue histogram on `range` (default: the sample
/// range). Errors treat each state as one observation of the per-bin
/// fraction.
pub fn empirical_density(states: &[GasState], bins: usize, range: Option<(f64, f64)>) -> Result<Histogram> {
    if states.is_empty() || bins == 0 {
        return Err(Error::Sampler("empty input".into()));
    }
    if states.len() < 100 {
        return Err(Error::Sampler(format!("need at least 100 states, got {}", states.len())));
    }
    let (lo, hi) = range.unwrap_or_else(|| {
        let lo = states.iter().map(|s| s.lambda[0]).fold(f64::INFINITY, f64::min);
        let hi = states.iter().map(GasState::max).fold(f64::NEG_INFINITY, f64::max);
        (lo, hi + 1e-12 * (1.0 + hi.abs()))
    });
    let width = (hi - lo) / bins as f64;
    let n = states[0].lambda.len() as f64;
    let s = states.len() as f64;
    let mut sum = vec![0.0; bins];
    let mut sum2 = vec![0.0; bins];
    let mut counts = vec![0usize; bins];
    for st in states {
        counts.iter_mut().for_each(|c| *c = 0);
        for &l in &st.lambda {
            if l >= lo && l < hi {
                counts[(((l - lo) / width) as usize).min(bins - 1)] += 1;
            }
        }
        for k in 0..bins {
            let f = counts[k] as f64 / n;
            sum[k] += f;
            sum2[k] += f * f;
        }
    }
    let density = sum.iter().map(|f| f / s / width).collect();
    let stderr = sum
        .iter()
        .zip(&sum2)
        .map(|(f, f2)| {
            let m = f / s;
            ((f2 / s - m * m).max(0.0) / (s - 1.0)).sqrt() / width
        })
        .collect();
    let edges = (0..=bins).map(|k| lo + k as f64 * width).collect();
    Ok(Histogram { edges, density, stderr })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub at: f64,
    pub value: f64,
    pub err: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaMaxSummary {
    pub samples: usize,
    pub mean: f64,
    pub mean_err: f64,
    /// `at` is the probability level.
    pub quantiles: Vec<Estimate>,
    /// `at` is the wall position.
    pub cdf: Vec<Estimate>,
}

fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = p * (sorted.len() - 1) as f64;
    let i = h.floor() as usize;
    let j = (i + 1).min(sorted.len() - 1);
    sorted[i] + (h - i as f64) * (sorted[j] - sorted[i])
}

/// Plug-in estimates for the largest eigenvalue, with bootstrap errors
/// (200 resamples, fixed generator seed so the report is reproducible).
pub fn lambda_max_stats(states: &[GasState], probs: &[f64], zs: &[f64]) -> Result<LambdaMaxSummary> {
    if states.len() < 100 {
        return Err(Error::Sampler(format!("need at least 100 states, got {}", states.len())));
    }
    let mx: Vec<f64> = states.iter().map(GasState::max).collect();
    let stat = |xs: &[f64]| -> Vec<f64> {
        let mut s = xs.to_vec();
        s.sort_by(f64::total_cmp);
        let n = s.len() as f64;
        let mut out = vec![s.iter().sum::<f64>() / n];
        out.extend(probs.iter().map(|&p| quantile(&s, p)));
        out.extend(zs.iter().map(|&z| s.partition_point(|&x| x < z) as f64 / n));
        out
    };
    let point = stat(&mx);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut sum = vec![0.0; point.len()];
    let mut sum2 = vec![0.0; point.len()];
    let mut buf = vec![0.0; mx.len()];
    for _ in 0..BOOTSTRAP_RESAMPLES {
        for b in buf.iter_mut() {
            *b = mx[rng.gen_range(0..mx.len())];
        }
        for (k, v) in stat(&buf).into_iter().enumerate() {
            sum[k] += v;
            sum2[k] += v * v;
        }
    }
    let r = BOOTSTRAP_RESAMPLES as f64;
    let err: Vec<f64> = sum.iter().zip(&sum2).map(|(s, s2)| ((s2 / r - (s / r).powi(2)).max(0.0) * r / (r - 1.0)).sqrt()).collect();
    let np = probs.len();
    Ok(LambdaMaxSummary {
        samples: mx.len(),
        mean: point[0],
        mean_err: err[0],
        quantiles: (0..np).map(|k| Estimate { at: probs[k], value: point[1 + k], err: err[1 + k] }).collect(),
        cdf: (0..zs.len())
            .map(|k| Estimate { at: zs[k], value: point[1 + np + k], err: err[1 + np + k] })
            .collect(),
    })
}

/// One row per state, `lambda_1..lambda_N` ascending, 17 significant
/// digits.
pub fn write_csv(states: &[GasState], mut out: impl Write) -> std::io::Result<()> {
    let n = states.first().map_or(0, |s| s.lambda.len());
    let header: Vec<String> = (1..=n).map(|i| format!("lambda_{i}")).collect();
    writeln!(out, "{}", header.join(","))?;
    for s in states {
        let row: Vec<String> = s.lambda.iter().map(|x| format!("{x:.16e}")).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::gaussian_potential;

    fn cfg(n: usize) -> SamplerConfig {
        SamplerConfig { sweeps: 2000, burn_in: 200, seed: 7, ..SamplerConfig::new(gaussian_potential(), 1.0, n) }
    }

    #[test]
    fn seeds_determine_streams() {
        let a = sample(&cfg(5)).unwrap();
        let b = sample(&cfg(5)).unwrap();
        assert_eq!(a, b);
        let c = sample(&SamplerConfig { seed: 8, ..cfg(5) }).unwrap();
        assert_ne!(a, c);
        let p = sample_chains(&cfg(5), 3, Exec::Parallel).unwrap();
        let s = sample_chains(&cfg(5), 3, Exec::Sequential).unwrap();
        assert_eq!(p, s);
        assert_eq!(&p[..a.len()], &a[..]);
    }

    #[test]
    fn wall_is_enforced() {
        let st = sample(&SamplerConfig { wall: Some(0.0), ..cfg(2) }).unwrap();
        assert!(st.iter().all(|s| s.max() <= 0.0));
    }

    #[test]
    fn bad_initial_states() {
        let c = SamplerConfig { initial: Some(vec![0.1, 0.1]), ..cfg(2) };
        assert!(matches!(sample(&c), Err(Error::Sampler(_))));
        let c = SamplerConfig { initial: Some(vec![0.1, 0.5]), wall: Some(0.2), ..cfg(2) };
        assert!(sample(&c).is_err());
    }

    #[test]
    fn histogram_is_normalised() {
        let st = sample(&cfg(10)).unwrap();
        let h = empirical_density(&st, 30, None).unwrap();
        assert!((h.integral() - 1.0).abs() < 1e-12);
        assert!(empirical_density(&[], 10, None).is_err());
    }

    #[test]
    fn batch_means_of_iid_noise() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let xs: Vec<f64> = (0..100_000).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let (m, s) = batch_means(&xs, 50);
        assert!(m.abs() < 4.0 * s);
        assert!((s - 1.0 / 100_000f64.sqrt()).abs() < 0.3 / 100_000f64.sqrt());
    }

    #[test]
    fn csv_rows_are_sorted() {
        let st = sample(&cfg(4)).unwrap();
        let mut buf = Vec::new();
        write_csv(&st[..3], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("lambda_1,lambda_2,lambda_3,lambda_4"));
        for l in lines {
            let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            assert!(v.windows(2).all(|p| p[0] <= p[1]));
        }
    }
}
