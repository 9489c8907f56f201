//! Sequential vs parallel execution of the embarrassingly parallel sweeps.
//! Build with `--no-default-features` to see the fallback alone: both
//! variants then run on one thread.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rmt_tails::exec::Exec;
use rmt_tails::montecarlo::{sample_chains, SamplerConfig};
use rmt_tails::orthopoly::{log_gap_probability, TruncatedWeight};
use rmt_tails::potentials::{gaussian_potential, multicritical_potential};
use rmt_tails::rate_functions::left_tail_general;

const POLICIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn gap_grid(c: &mut Criterion) {
    let mut g = c.benchmark_group("gap_grid_N10");
    g.sample_size(10);
    let w = TruncatedWeight::new(gaussian_potential(), 1.0, 10, None, 16).unwrap();
    for (name, exec) in POLICIES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                exec.map(grid(-0.5, 3.0, 16), |z| log_gap_probability(&w.with_wall(Some(z))).unwrap().log_p)
            })
        });
    }
    g.finish();
}

fn left_tail_grid(c: &mut Criterion) {
    let mut g = c.benchmark_group("left_tail_grid_k1");
    g.sample_size(10);
    let v = multicritical_potential(1).unwrap();
    for (name, exec) in POLICIES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| exec.map(grid(0.3, 0.95, 16), |z| left_tail_general(&v, 1.0, z).unwrap().value))
        });
    }
    g.finish();
}

fn chains(c: &mut Criterion) {
    let mut g = c.benchmark_group("mc_chains_N20");
    g.sample_size(10);
    let cfg = SamplerConfig { sweeps: 2_000, burn_in: 200, seed: 1, ..SamplerConfig::new(gaussian_potential(), 1.0, 20) };
    for (name, exec) in POLICIES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(sample_chains(&cfg, 8, exec).unwrap().len()))
        });
    }
    g.finish();
}

criterion_group!(benches, gap_grid, left_tail_grid, chains);
criterion_main!(benches);
