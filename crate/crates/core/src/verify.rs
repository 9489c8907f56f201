//! Self-check suites run by `rmt-tails verify`.
//!
//! Each suite evaluates one group of closed-form, oracle or asymptotic
//! checks and reports every comparison with the bound it was held to.

use std::f64::consts::{PI, SQRT_2};
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::montecarlo::{batch_means, ks_distance, lambda_max_stats, sample_chains, SamplerConfig};
use crate::orthopoly::{
    hankel_log_gap, log_gap_probability, recurrence_coefficients, string_residuals, TruncatedWeight,
};
use crate::potentials::{count_real_roots, gaussian_potential, multicritical_potential, saddle_points};
use crate::rate_functions::{
    edge_exponent, gaussian_action, gaussian_action_ode_residual, gaussian_left_f, k1_string_residuals,
    left_tail_general_with_digits, multicritical_action, multicritical_action_ode_residual, planar_states,
    psi_minus, psi_plus, Side,
};
use crate::spectral_curve::{density, instanton_action, right_tail_log_prob, solve_one_cut};

/// Suite names in criterion order.
pub const SUITES: [&str; 10] = [
    "gaussian-closed-forms",
    "action-quadrature",
    "endpoints",
    "edge-exponents",
    "oracle-equivalence",
    "string-equations",
    "asymptotic-match",
    "ode-consistency",
    "monte-carlo",
    "critical-points",
];

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub label: String,
    pub value: f64,
    /// Human-readable acceptance condition.
    pub bound: String,
    pub pass: bool,
}

impl Check {
    fn below(label: impl Into<String>, value: f64, tol: f64) -> Self {
        Check { label: label.into(), value, bound: format!("< {tol:e}"), pass: value < tol }
    }

    fn within(label: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Check { label: label.into(), value, bound: format!("in [{lo}, {hi}]"), pass: value >= lo && value <= hi }
    }

    fn near(label: impl Into<String>, value: f64, target: f64, tol: f64) -> Self {
        Check {
            label: label.into(),
            value,
            bound: format!("{target} +- {tol}"),
            pass: (value - target).abs() <= tol,
        }
    }

    fn failed(label: impl Into<String>, err: &Error) -> Self {
        Check { label: format!("{}: {err}", label.into()), value: f64::NAN, bound: "no error".into(), pass: false }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub criterion: usize,
    pub checks: Vec<Check>,
    pub seconds: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

fn max_abs(it: impl Iterator<Item = Result<f64>>) -> Result<f64> {
    let mut m: f64 = 0.0;
    for x in it {
        m = m.max(x?.abs());
    }
    Ok(m)
}

fn gaussian_closed_forms() -> Result<Vec<Check>> {
    let t: f64 = 0.5;
    let left = max_abs(grid(0.0, 1.4, 50).map(|z| Ok(-2.0 * t * t * psi_minus(z).value - gaussian_left_f(z, t)?)))?;
    let right = max_abs((1..=50).map(|i| {
        let z = SQRT_2 + (5.0 - SQRT_2) * i as f64 / 50.0;
        Ok(psi_plus(z)? - gaussian_action(t, z)?)
    }))?;
    Ok(vec![
        Check::below("-2t^2 psi_-(z) vs left closed form, t=1/2", left, 1e-10),
        Check::below("psi_+(z) vs Gaussian action, t=1/2", right, 1e-10),
    ])
}

fn action_quadrature() -> Result<Vec<Check>> {
    let g = solve_one_cut(&gaussian_potential(), 1.0)?;
    let dg = max_abs(grid(2.05, 6.0, 50).map(|z| Ok(gaussian_action(1.0, z)? - instanton_action(&g, z)?.action)))?;
    let v1 = solve_one_cut(&multicritical_potential(1)?, 1.0)?;
    let dm = max_abs(grid(1.01, 2.0, 50).map(|z| Ok(multicritical_action(&v1, z)? - instanton_action(&v1, z)?.action)))?;
    Ok(vec![
        Check::below("Gaussian action closed form vs quadrature, z in [2.05, 6]", dg, 1e-10),
        Check::below("k=1 action closed form vs quadrature, z in [1.01, 2]", dm, 1e-8),
    ])
}

fn endpoints() -> Result<Vec<Check>> {
    let g = solve_one_cut(&gaussian_potential(), 1.0)?;
    let v1 = solve_one_cut(&multicritical_potential(1)?, 1.0)?;
    let ratios: Vec<f64> = grid(0.2, 0.8, 7)
        .map(|x| density(&v1, x).value / (x.sqrt() * (1.0 - x).powf(2.5)))
        .collect();
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let spread = ratios.iter().map(|r| (r / mean - 1.0).abs()).fold(0.0, f64::max);
    Ok(vec![
        Check::below("Gaussian t=1 endpoints vs (-2, 2)", (g.b + 2.0).abs().max((g.a - 2.0).abs()), 1e-12),
        Check::below("k=1 t=1 endpoints vs (0, 1)", v1.b.abs().max((v1.a - 1.0).abs()), 1e-8),
        Check::below("k=1 density / x^1/2 (1-x)^5/2, relative spread", spread, 1e-6),
    ])
}

fn edge_exponents() -> Result<Vec<Check>> {
    let v1 = multicritical_potential(1)?;
    let sol = solve_one_cut(&v1, 1.0)?;
    let gl = edge_exponent(|z| gaussian_left_f(z, 1.0).unwrap_or(f64::NAN), 2.0, Side::Left)?;
    let gr = edge_exponent(|z| gaussian_action(1.0, z).unwrap_or(f64::NAN), 2.0, Side::Right)?;
    let ml = edge_exponent(
        |z| left_tail_general_with_digits(&v1, 1.0, z, 30).map_or(f64::NAN, |r| r.value),
        1.0,
        Side::Left,
    )?;
    let mr = edge_exponent(|z| multicritical_action(&sol, z).unwrap_or(f64::NAN), 1.0, Side::Right)?;
    Ok(vec![
        Check::near("Gaussian left tail exponent", gl, 3.0, 0.05),
        Check::near("Gaussian right tail exponent", gr, 1.5, 0.05),
        Check::near("k=1 left tail exponent", ml, 7.0, 0.2),
        Check::near("k=1 right tail exponent", mr, 3.5, 0.05),
    ])
}

fn oracle_equivalence() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (name, v, lo, hi) in [
        ("Gaussian", gaussian_potential(), -1.0, 3.0),
        ("k=1", multicritical_potential(1)?, 0.1, 1.3),
    ] {
        let mut worst: f64 = 0.0;
        for n in 2..=6 {
            for z in grid(lo, hi, 10) {
                let w = TruncatedWeight::new(v.clone(), 1.0, n, Some(z), 50)?;
                worst = worst.max((log_gap_probability(&w)?.log_p - hankel_log_gap(&w)?.log_p).abs());
            }
        }
        out.push(Check::below(format!("{name}: Stieltjes vs Hankel, N = 2..6"), worst, 1e-8));
    }
    let w = TruncatedWeight::new(gaussian_potential(), 1.0, 2, Some(0.0), 16)?;
    let exact = (0.25 - 1.0 / (2.0 * PI)).ln();
    out.push(Check::below("Gaussian N=2, z=0 vs log(1/4 - 1/(2 pi))", (log_gap_probability(&w)?.log_p - exact).abs(), 1e-10));
    Ok(out)
}

fn string_equations() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let g = gaussian_potential();
    let v1 = multicritical_potential(1)?;
    for (name, v, n, z, tol) in [("Gaussian N=10 z=1", &g, 10, 1.0, 1e-6), ("k=1 N=8 z=1.3", &v1, 8, 1.3, 1e-5)] {
        let w = TruncatedWeight::new(v.clone(), 1.0, n, Some(z), 16)?;
        let rep = string_residuals(&w, &recurrence_coefficients(&w)?);
        out.push(Check::below(format!("hard-wall string equation, {name}"), rep.hard_wall.unwrap_or(f64::NAN), tol));
    }
    for (name, v, n) in [("Gaussian N=10", &g, 10), ("k=1 N=8", &v1, 8)] {
        let w = TruncatedWeight::new(v.clone(), 1.0, n, None, 16)?;
        let rep = string_residuals(&w, &recurrence_coefficients(&w)?);
        let worst = rep.off_diagonal.unwrap_or(f64::NAN).max(rep.diagonal.unwrap_or(f64::NAN));
        out.push(Check::below(format!("string equations without wall, {name}"), worst, 1e-8));
    }
    let states = planar_states(&v1, 1.0, 0.9, 101)?;
    let (r1, r2) = k1_string_residuals(&states, 0.9);
    out.push(Check::below("k=1 planar string equation 1, z=0.9", r1, 1e-8));
    out.push(Check::below("k=1 planar string equation 2, z=0.9", r2, 1e-5));
    Ok(out)
}

/// Ratio of the finite-N gap probability to the leading right-tail
/// prediction for the Gaussian at `t = 1, z = 2.2`.
pub fn asymptotic_ratio(n: usize) -> Result<f64> {
    let sol = solve_one_cut(&gaussian_potential(), 1.0)?;
    let w = TruncatedWeight::new(gaussian_potential(), 1.0, n, Some(2.2), 50)?;
    Ok(log_gap_probability(&w)?.log_p / right_tail_log_prob(&sol, 2.2, n)?)
}

fn asymptotic_match() -> Result<Vec<Check>> {
    let r20 = asymptotic_ratio(20)?;
    let r40 = asymptotic_ratio(40)?;
    Ok(vec![
        Check::within("finite-N / predicted right tail, N=20", r20, 0.75, 1.25),
        Check::below("|ratio - 1| at N=40 relative to N=20", (r40 - 1.0).abs() / (r20 - 1.0).abs(), 1.0),
    ])
}

fn ode_consistency() -> Result<Vec<Check>> {
    let mut pairs = Vec::new();
    for zeta in [0.5, 1.0, 1.5, 2.0] {
        for dz in [0.5, 1.0, 1.5, 2.0, 3.0] {
            pairs.push((zeta, 2.0 * f64::sqrt(zeta) + dz));
        }
    }
    let g = max_abs(pairs.iter().map(|&(zeta, z)| gaussian_action_ode_residual(zeta, z)))?;
    let m = max_abs(
        [(0.6, 1.2), (0.6, 1.5), (0.8, 1.2), (0.8, 1.5)]
            .iter()
            .map(|&(zeta, z)| multicritical_action_ode_residual(zeta, z)),
    )?;
    Ok(vec![
        Check::below("Gaussian action ODE, 20 (zeta, z) pairs", g, 1e-6),
        Check::below("k=1 action / centre relation", m, 1e-4),
    ])
}

fn semicircle_cdf(x: f64) -> f64 {
    let x = x.clamp(-2.0, 2.0);
    0.5 + (0.5 * x * (4.0 - x * x).sqrt() + 2.0 * (0.5 * x).asin()) / (2.0 * PI)
}

fn monte_carlo() -> Result<Vec<Check>> {
    let g = gaussian_potential();
    let cfg = SamplerConfig { sweeps: 125_000, burn_in: 2_000, seed: 2024, ..SamplerConfig::new(g.clone(), 1.0, 2) };
    let st = sample_chains(&cfg, 8, Exec::Parallel)?;
    let below: Vec<f64> = st.iter().map(|s| if s.max() < 0.0 { 1.0 } else { 0.0 }).collect();
    let (p, sigma) = batch_means(&below, 100);
    let exact = 0.25 - 1.0 / (2.0 * PI);

    let cfg = SamplerConfig { sweeps: 4_000, burn_in: 1_000, thin: 10, seed: 2025, ..SamplerConfig::new(g, 1.0, 50) };
    let st = sample_chains(&cfg, 8, Exec::Parallel)?;
    let pooled: Vec<f64> = st.iter().flat_map(|s| s.lambda.iter().copied()).collect();
    let ks = ks_distance(&pooled, semicircle_cdf);

    let cfg = SamplerConfig {
        sweeps: 4_000,
        burn_in: 1_000,
        thin: 10,
        seed: 2026,
        ..SamplerConfig::new(multicritical_potential(1)?, 1.0, 50)
    };
    let st = sample_chains(&cfg, 8, Exec::Parallel)?;
    let mean = lambda_max_stats(&st, &[], &[])?.mean;
    Ok(vec![
        Check::below(format!("N=2 P(lambda_max < 0) = {p:.5}, deviation in sigma ({sigma:.1e})"), (p - exact).abs() / sigma, 3.0),
        Check::below("N=50 semicircle KS distance", ks, 0.05),
        Check::within("k=1 N=50 mean lambda_max", mean, 0.85, 1.05),
    ])
}

fn critical_points() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for k in 0..=6 {
        let v = multicritical_potential(k)?;
        let roots = count_real_roots(&v.derivative(), None)?;
        let sp = saddle_points(&v)?;
        let unique = sp.real_minima.len() == 1 && sp.real_maxima.is_empty() && sp.inflections.is_empty();
        let positive = sp.real_minima.first().is_some_and(|m| m.x > 0.0);
        out.push(Check {
            label: format!("k={k}: real roots of V', single positive minimum"),
            value: roots as f64,
            bound: "= 1".into(),
            pass: roots == 1 && unique && positive,
        });
    }
    Ok(out)
}

/// Runs one suite by name. Unknown names are an input error.
pub fn run_suite(name: &str) -> Result<SuiteReport> {
    let criterion = SUITES
        .iter()
        .position(|s| *s == name)
        .ok_or_else(|| Error::Input(format!("unknown suite '{name}'; available: {}", SUITES.join(", "))))?;
    let start = Instant::now();
    let res = match criterion {
        0 => gaussian_closed_forms(),
        1 => action_quadrature(),
        2 => endpoints(),
        3 => edge_exponents(),
        4 => oracle_equivalence(),
        5 => string_equations(),
        6 => asymptotic_match(),
        7 => ode_consistency(),
        8 => monte_carlo(),
        _ => critical_points(),
    };
    let checks = res.unwrap_or_else(|e| vec![Check::failed(name, &e)]);
    Ok(SuiteReport { suite: SUITES[criterion], criterion: criterion + 1, checks, seconds: start.elapsed().as_secs_f64() })
}

pub fn run_all() -> Vec<SuiteReport> {
    SUITES.iter().map(|s| run_suite(s).expect("known suite")).collect()
}
