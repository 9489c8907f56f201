use std::f64::consts::PI;

use proptest::prelude::*;
use rmt_tails::exec::Exec;
use rmt_tails::montecarlo::{
    batch_means, empirical_density, ks_distance, lambda_max_stats, sample, sample_chains, write_csv, GasState,
    SamplerConfig,
};
use rmt_tails::orthopoly::{log_gap_probability, TruncatedWeight};
use rmt_tails::potentials::{gaussian_potential, multicritical_potential};
use statrs::distribution::{ContinuousCDF, Normal};

fn gauss(n: usize) -> SamplerConfig {
    SamplerConfig::new(gaussian_potential(), 1.0, n)
}

fn two_sample_ks(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn chains_do_not_depend_on_the_executor(seed in any::<u64>(), n in 1usize..6) {
        let cfg = SamplerConfig { sweeps: 200, burn_in: 50, seed, ..gauss(n) };
        let par = sample_chains(&cfg, 3, Exec::Parallel).unwrap();
        let seq = sample_chains(&cfg, 3, Exec::Sequential).unwrap();
        prop_assert_eq!(par, seq);
    }

    #[test]
    fn states_are_sorted_and_respect_the_wall(seed in any::<u64>(), wall in -0.5..1.0) {
        let cfg = SamplerConfig { sweeps: 300, burn_in: 50, seed, wall: Some(wall), ..gauss(4) };
        for s in sample(&cfg).unwrap() {
            prop_assert!(s.lambda.windows(2).all(|p| p[0] <= p[1]));
            prop_assert!(s.max() < wall);
        }
    }
}

#[test]
fn same_seed_same_stream() {
    let cfg = SamplerConfig { sweeps: 500, seed: 11, ..gauss(5) };
    assert_eq!(sample(&cfg).unwrap(), sample(&cfg).unwrap());
    let other = SamplerConfig { seed: 12, ..cfg.clone() };
    assert_ne!(sample(&cfg).unwrap(), sample(&other).unwrap());
}

#[test]
fn single_eigenvalue_is_normal() {
    // N = 1, t = 1: density exp(-x^2 / 2), detailed balance only
    let phi = Normal::new(0.0, 1.0).unwrap();
    let cfg = SamplerConfig { sweeps: 40_000, thin: 5, seed: 3, step: 1.0, ..gauss(1) };
    let xs: Vec<f64> = sample_chains(&cfg, 4, Exec::Parallel).unwrap().iter().map(|s| s.lambda[0]).collect();
    let d = ks_distance(&xs, |x| phi.cdf(x));
    assert!(d < 0.02, "KS {d}");

    let wall = 0.5;
    let cfg = SamplerConfig { wall: Some(wall), ..cfg };
    let xs: Vec<f64> = sample_chains(&cfg, 4, Exec::Parallel).unwrap().iter().map(|s| s.lambda[0]).collect();
    let d = ks_distance(&xs, |x| (phi.cdf(x.min(wall)) / phi.cdf(wall)).min(1.0));
    assert!(d < 0.02, "truncated KS {d}");
}

#[test]
fn symmetric_potential_gives_mirrored_extremes() {
    let cfg = SamplerConfig { sweeps: 20_000, thin: 5, seed: 8, ..gauss(3) };
    let st = sample_chains(&cfg, 4, Exec::Parallel).unwrap();
    let top: Vec<f64> = st.iter().map(GasState::max).collect();
    let bottom: Vec<f64> = st.iter().map(|s| -s.lambda[0]).collect();
    let d = two_sample_ks(&top, &bottom);
    assert!(d < 0.03, "KS(max, -min) = {d}");
}

#[test]
fn gap_probability_agrees_with_orthogonal_polynomials() {
    let (n, z) = (20, 2.2);
    let cfg = SamplerConfig { sweeps: 20_000, burn_in: 2_000, seed: 44, ..gauss(n) };
    let st = sample_chains(&cfg, 4, Exec::Parallel).unwrap();
    let ind: Vec<f64> = st.iter().map(|s| f64::from(u8::from(s.max() < z))).collect();
    let (p, se) = batch_means(&ind, 40);
    let w = TruncatedWeight::new(gaussian_potential(), 1.0, n, Some(z), 30).unwrap();
    let exact = log_gap_probability(&w).unwrap().log_p.exp();
    assert!((p - exact).abs() < 3.0 * se, "MC {p} +- {se}, exact {exact}");

    let summary = lambda_max_stats(&st, &[0.1, 0.5, 0.9], &[z]).unwrap();
    assert!((summary.cdf[0].value - p).abs() < 1e-12);
    let q: Vec<f64> = summary.quantiles.iter().map(|e| e.value).collect();
    assert!(q[0] < q[1] && q[1] < q[2]);
}

#[test]
fn densities_at_n_50() {
    let cfg = SamplerConfig { sweeps: 4_000, burn_in: 1_000, thin: 10, seed: 9, ..gauss(50) };
    let st = sample_chains(&cfg, 4, Exec::Parallel).unwrap();
    // 51 bins of width 0.1, the middle one centred on 0
    let h = empirical_density(&st, 51, Some((-2.55, 2.55))).unwrap();
    let mid = h.density[25];
    assert!((mid - 1.0 / PI).abs() < 0.05 / PI, "rho(0) = {mid} +- {}", h.stderr[25]);
    assert!((h.integral() - 1.0).abs() < 1e-3);

    let cfg = SamplerConfig { seed: 10, ..SamplerConfig { v: multicritical_potential(1).unwrap(), ..cfg } };
    let st = sample_chains(&cfg, 4, Exec::Parallel).unwrap();
    let total = (st.len() * 50) as f64;
    let outside = st.iter().flat_map(|s| s.lambda.iter()).filter(|&&x| !(-0.1..=1.1).contains(&x)).count() as f64;
    assert!(outside / total < 0.01, "mass outside [-0.1, 1.1]: {}", outside / total);
}

#[test]
fn csv_round_trip() {
    let cfg = SamplerConfig { sweeps: 20, burn_in: 5, seed: 1, ..gauss(3) };
    let st = sample(&cfg).unwrap();
    let mut buf = Vec::new();
    write_csv(&st, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("lambda_1,lambda_2,lambda_3"));
    for (line, s) in lines.zip(&st) {
        let back: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(back, s.lambda);
    }
}

#[test]
fn invalid_configurations() {
    assert!(sample(&SamplerConfig { thin: 0, ..gauss(2) }).is_err());
    assert!(sample(&SamplerConfig { t: 0.0, ..gauss(2) }).is_err());
    assert!(sample(&SamplerConfig { wall: Some(f64::INFINITY), ..gauss(2) }).is_err());
    assert!(lambda_max_stats(&[], &[], &[]).is_err());
}
