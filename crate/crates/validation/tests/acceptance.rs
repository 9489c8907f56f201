//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Reference values are computed here from scratch (closed forms, a
//! tanh-sinh rule, small Hankel determinants, dense matrix products) and
//! compared with the library. Tolerances and runtime budgets are pinned
//! below. Runs without the libtest harness so the report reads top to
//! bottom; exits non-zero if any criterion fails.

use std::f64::consts::{PI, SQRT_2};
use std::process::ExitCode;
use std::time::Instant;

use rmt_tails::exec::Exec;
use rmt_tails::montecarlo::{batch_means, ks_distance, sample_chains, SamplerConfig};
use rmt_tails::orthopoly::{
    hankel_log_gap, log_gap_probability, recurrence_coefficients, string_residuals, TruncatedWeight,
};
use rmt_tails::potentials::{count_real_roots, Polynomial, gaussian_potential, multicritical_potential, saddle_points};
use rmt_tails::rate_functions::{
    gaussian_action, gaussian_left_f, k1_string_residuals, left_tail_general_with_digits, multicritical_action,
    planar_states, psi_minus, psi_plus,
};
use rmt_tails::spectral_curve::{density, instanton_action, solve_one_cut};

// tolerances
const TOL_CLOSED_FORM: f64 = 1e-10;
const TOL_GAUSS_ACTION: f64 = 1e-10;
const TOL_K1_ACTION: f64 = 1e-8;
const TOL_GAUSS_ENDPOINTS: f64 = 1e-12;
const TOL_K1_ENDPOINTS: f64 = 1e-8;
const TOL_DENSITY_RATIO: f64 = 1e-6;
const EXPONENT_TOL: [f64; 4] = [0.05, 0.05, 0.2, 0.05];
const TOL_ORACLE: f64 = 1e-8;
const TOL_N2_EXACT: f64 = 1e-10;
const TOL_WALL_STRING: [f64; 2] = [1e-6, 1e-5];
const TOL_FREE_STRING: f64 = 1e-8;
const TOL_PLANAR: [f64; 2] = [1e-8, 1e-5];
const RATIO_WINDOW: (f64, f64) = (0.75, 1.25);
const TOL_ODE: f64 = 1e-6;
const MC_SIGMAS: f64 = 3.0;
const MC_KS: f64 = 0.05;
const MC_MEAN_WINDOW: (f64, f64) = (0.85, 1.05);

// runtime budgets, seconds
const BUDGET: [f64; 10] = [1.0, 5.0, 1.0, 30.0, 120.0, 120.0, 600.0, 1.0, 300.0, 1.0];

struct Outcome {
    pass: bool,
    details: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { pass: true, details: Vec::new() }
    }

    fn below(&mut self, what: &str, value: f64, tol: f64) {
        let ok = value < tol;
        self.pass &= ok;
        self.details.push(format!("{what}: {value:.3e} < {tol:.0e} {}", mark(ok)));
    }

    fn within(&mut self, what: &str, value: f64, lo: f64, hi: f64) {
        let ok = (lo..=hi).contains(&value);
        self.pass &= ok;
        self.details.push(format!("{what}: {value:.4} in [{lo}, {hi}] {}", mark(ok)));
    }

    fn holds(&mut self, what: &str, ok: bool) {
        self.pass &= ok;
        self.details.push(format!("{what} {}", mark(ok)));
    }
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "VIOLATED"
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Double-exponential rule on `[a, b]`. The integrand receives
/// `(x, x - a, b - x)` with the endpoint distances computed without
/// cancellation, so square-root endpoint behaviour is resolved.
fn tanh_sinh(a: f64, b: f64, f: impl Fn(f64, f64, f64) -> f64) -> f64 {
    let half = 0.5 * (b - a);
    let h = 1.0 / 64.0;
    let mut sum = 0.0;
    for k in -256i32..=256 {
        let tau = k as f64 * h;
        let s = 0.5 * PI * tau.sinh();
        let w = 0.5 * PI * tau.cosh() / s.cosh().powi(2);
        // 1 - tanh(s) and 1 + tanh(s)
        let one_minus = 2.0 / (1.0 + (2.0 * s).exp());
        let one_plus = 2.0 / (1.0 + (-2.0 * s).exp());
        let (da, db) = (half * one_plus, half * one_minus);
        if da <= 0.0 || db <= 0.0 {
            continue;
        }
        sum += w * f(a + da, da, db);
    }
    sum * h * half
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Log-log slope of `|f(edge -+ w)|` for 13 geometric `w` in `[1e-4, 1e-2]`.
fn fitted_exponent(f: impl Fn(f64) -> f64, edge: f64, left: bool) -> f64 {
    let pts: Vec<(f64, f64)> = (0..13)
        .map(|i| {
            let w = 10f64.powf(-4.0 + i as f64 / 6.0);
            let x = if left { edge - w } else { edge + w };
            (w.ln(), f(x).abs().ln())
        })
        .collect();
    slope(&pts)
}

/// Left rate function of the Gaussian ensemble, edge at sqrt 2.
fn psi_minus_ref(w: f64) -> f64 {
    let s = (w * w + 6.0).sqrt();
    (36.0 * w * w - w.powi(4) - (15.0 * w + w.powi(3)) * s + 27.0 * (18f64.ln() - 2.0 * (w + s).ln())) / 108.0
}

/// `int_{2 sqrt t}^z sqrt(x^2 - 4t) dx` by quadrature.
fn gaussian_action_ref(t: f64, z: f64) -> f64 {
    let a = 2.0 * t.sqrt();
    tanh_sinh(a, z, |x, da, _| (da * (x + a)).sqrt())
}

/// For the first multicritical potential at `t = 1`, `V'` has leading
/// coefficient 256/5 and the cut is `[0, 1]` with a double zero of `y` at
/// the upper edge: `y = (256/5) (x-1)^2 sqrt(x (x-1))`.
fn k1_action_ref(z: f64) -> f64 {
    tanh_sinh(1.0, z, |x, d, _| 256.0 / 5.0 * d.powf(2.5) * x.sqrt())
}

fn k1_density_ref(x: f64) -> f64 {
    256.0 / 5.0 * x.sqrt() * (1.0 - x).powf(2.5) / (2.0 * PI)
}

/// `log P_2(z)` from the 2x2 Hankel determinant of the weight
/// `exp(-(N/t) V)` with moments from tanh-sinh.
fn two_by_two_log_gap(v: impl Fn(f64) -> f64 + Copy, lower: f64, upper: f64, z: f64) -> f64 {
    let det = |hi: f64| {
        let m = |k: i32| tanh_sinh(lower, hi, |x, _, _| x.powi(k) * (-2.0 * v(x)).exp());
        let (m0, m1, m2) = (m(0), m(1), m(2));
        m0 * m2 - m1 * m1
    };
    (det(z) / det(upper)).ln()
}

fn jacobi(r: &[f64], s: &[f64]) -> Vec<Vec<f64>> {
    let n = s.len();
    let mut q = vec![vec![0.0; n]; n];
    for i in 0..n {
        q[i][i] = s[i];
        if i + 1 < n {
            q[i][i + 1] = r[i].sqrt();
            q[i + 1][i] = r[i].sqrt();
        }
    }
    q
}

fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut c = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            for j in 0..n {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    c
}

/// `p(Q)` for a polynomial with coefficients from `x^0` upwards.
fn mat_poly(coeffs: &[f64], q: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = q.len();
    let mut acc = vec![vec![0.0; n]; n];
    for c in coeffs.iter().rev() {
        acc = mat_mul(&acc, q);
        for (i, row) in acc.iter_mut().enumerate() {
            row[i] += c;
        }
    }
    acc
}

fn criterion_1() -> Outcome {
    let mut o = Outcome::new();
    let t = 0.5;
    let mut d_left: f64 = 0.0;
    let mut d_ref: f64 = 0.0;
    for z in linspace(0.0, 1.4, 50) {
        let f = gaussian_left_f(z, t).unwrap();
        d_left = d_left.max((-2.0 * t * t * psi_minus(z).value - f).abs());
        d_ref = d_ref.max((psi_minus(z).value - psi_minus_ref(z)).abs());
    }
    o.below("left: -2t^2 psi_- vs closed-form F, 50 z in [0, 1.4]", d_left, TOL_CLOSED_FORM);
    o.below("left: psi_- vs independent formula", d_ref, TOL_CLOSED_FORM);
    let mut d_right: f64 = 0.0;
    let mut d_quad: f64 = 0.0;
    for i in 1..=50 {
        let z = SQRT_2 + (5.0 - SQRT_2) * i as f64 / 50.0;
        let a = gaussian_action(t, z).unwrap();
        d_right = d_right.max((psi_plus(z).unwrap() - a).abs());
        d_quad = d_quad.max((a - gaussian_action_ref(t, z)).abs());
    }
    o.below("right: psi_+ vs Gaussian action, 50 z in (sqrt 2, 5]", d_right, TOL_CLOSED_FORM);
    o.below("right: action vs tanh-sinh quadrature", d_quad, TOL_CLOSED_FORM);
    o
}

fn criterion_2() -> Outcome {
    let mut o = Outcome::new();
    let g = solve_one_cut(&gaussian_potential(), 1.0).unwrap();
    let (mut d, mut dq): (f64, f64) = (0.0, 0.0);
    for z in linspace(2.05, 6.0, 40) {
        let closed = gaussian_action(1.0, z).unwrap();
        d = d.max((closed - instanton_action(&g, z).unwrap().action).abs());
        dq = dq.max((closed - gaussian_action_ref(1.0, z)).abs());
    }
    o.below("Gaussian closed form vs library quadrature, z in [2.05, 6]", d, TOL_GAUSS_ACTION);
    o.below("Gaussian closed form vs tanh-sinh", dq, TOL_GAUSS_ACTION);
    let v1 = solve_one_cut(&multicritical_potential(1).unwrap(), 1.0).unwrap();
    let (mut d, mut dq): (f64, f64) = (0.0, 0.0);
    for z in linspace(1.01, 2.0, 40) {
        let closed = multicritical_action(&v1, z).unwrap();
        d = d.max((closed - instanton_action(&v1, z).unwrap().action).abs());
        dq = dq.max((closed - k1_action_ref(z)).abs());
    }
    o.below("k=1 closed form vs library quadrature, z in [1.01, 2]", d, TOL_K1_ACTION);
    o.below("k=1 closed form vs tanh-sinh of the factorised curve", dq, TOL_K1_ACTION);
    o
}

fn criterion_3() -> Outcome {
    let mut o = Outcome::new();
    let g = solve_one_cut(&gaussian_potential(), 1.0).unwrap();
    o.below("Gaussian t=1 endpoints vs (-2, 2)", (g.b + 2.0).abs().max((g.a - 2.0).abs()), TOL_GAUSS_ENDPOINTS);
    let v1 = solve_one_cut(&multicritical_potential(1).unwrap(), 1.0).unwrap();
    o.below("k=1 t=1 endpoints vs (0, 1)", v1.b.abs().max((v1.a - 1.0).abs()), TOL_K1_ENDPOINTS);
    let ratios: Vec<f64> = linspace(0.05, 0.95, 19).iter().map(|&x| density(&v1, x).value / k1_density_ref(x)).collect();
    let spread = ratios.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max);
    o.below("k=1 density / ((256/5) x^1/2 (1-x)^5/2 / 2pi) - 1", spread, TOL_DENSITY_RATIO);
    o
}

fn criterion_4() -> Outcome {
    let mut o = Outcome::new();
    let v1 = multicritical_potential(1).unwrap();
    let sol = solve_one_cut(&v1, 1.0).unwrap();
    let fits = [
        ("Gaussian left", fitted_exponent(|z| gaussian_left_f(z, 1.0).unwrap(), 2.0, true), 3.0),
        ("Gaussian right", fitted_exponent(|z| gaussian_action(1.0, z).unwrap(), 2.0, false), 1.5),
        (
            "k=1 left",
            fitted_exponent(|z| left_tail_general_with_digits(&v1, 1.0, z, 30).unwrap().value, 1.0, true),
            7.0,
        ),
        ("k=1 right", fitted_exponent(|z| multicritical_action(&sol, z).unwrap(), 1.0, false), 3.5),
    ];
    for ((name, got, want), tol) in fits.into_iter().zip(EXPONENT_TOL) {
        o.below(&format!("{name} exponent {got:.4} vs {want}"), (got - want).abs(), tol);
    }
    o
}

fn criterion_5() -> Outcome {
    let mut o = Outcome::new();
    for (name, v, lo, hi) in
        [("Gaussian", gaussian_potential(), -1.0, 3.0), ("k=1", multicritical_potential(1).unwrap(), 0.1, 1.3)]
    {
        let mut worst: f64 = 0.0;
        for n in 2..=6 {
            for z in linspace(lo, hi, 10) {
                let w = TruncatedWeight::new(v.clone(), 1.0, n, Some(z), 50).unwrap();
                let d = log_gap_probability(&w).unwrap().log_p - hankel_log_gap(&w).unwrap().log_p;
                worst = worst.max(d.abs());
            }
        }
        o.below(&format!("{name}: Stieltjes vs Hankel, N=2..6, 10 z each"), worst, TOL_ORACLE);
    }
    let w = TruncatedWeight::new(gaussian_potential(), 1.0, 2, Some(0.0), 16).unwrap();
    let exact = (0.25 - 1.0 / (2.0 * PI)).ln();
    o.below("Gaussian N=2 z=0 vs log(1/4 - 1/(2 pi))", (log_gap_probability(&w).unwrap().log_p - exact).abs(), TOL_N2_EXACT);
    // N = 2 against a hand-built determinant
    let gauss = |x: f64| 0.5 * x * x;
    let k1 = |x: f64| -16.0 * x + 48.0 * x * x - 128.0 / 3.0 * x.powi(3) + 64.0 / 5.0 * x.powi(4);
    let mut worst: f64 = 0.0;
    for z in linspace(-1.0, 3.0, 10) {
        let w = TruncatedWeight::new(gaussian_potential(), 1.0, 2, Some(z), 50).unwrap();
        worst = worst.max((log_gap_probability(&w).unwrap().log_p - two_by_two_log_gap(gauss, -12.0, 12.0, z)).abs());
    }
    for z in linspace(0.1, 1.3, 10) {
        let w = TruncatedWeight::new(multicritical_potential(1).unwrap(), 1.0, 2, Some(z), 50).unwrap();
        worst = worst.max((log_gap_probability(&w).unwrap().log_p - two_by_two_log_gap(k1, -2.0, 3.0, z)).abs());
    }
    o.below("N=2 Gaussian and k=1 vs independent 2x2 determinant", worst, TOL_ORACLE);
    o
}

fn criterion_6() -> Outcome {
    let mut o = Outcome::new();
    let g = gaussian_potential();
    let v1 = multicritical_potential(1).unwrap();
    for ((name, v, n, z), tol) in [("Gaussian N=10 z=1", &g, 10, 1.0), ("k=1 N=8 z=1.3", &v1, 8, 1.3)]
        .into_iter()
        .zip(TOL_WALL_STRING)
    {
        let w = TruncatedWeight::new(v.clone(), 1.0, n, Some(z), 16).unwrap();
        let tab = recurrence_coefficients(&w).unwrap();
        let lib = string_residuals(&w, &tab).hard_wall.unwrap_or(f64::NAN);
        // ((Q - z) V'(Q))_nn = (2n+1) t/N on rows untouched by truncation
        let q = jacobi(&tab.r, &tab.s);
        let mut shifted = q.clone();
        for (i, row) in shifted.iter_mut().enumerate() {
            row[i] -= z;
        }
        let prod = mat_mul(&shifted, &mat_poly(&v.derivative().to_f64_coeffs(), &q));
        let rows = n - v.degree().unwrap();
        let own = (0..rows).map(|i| (prod[i][i] - (2 * i + 1) as f64 / n as f64).abs()).fold(0.0, f64::max);
        o.below(&format!("hard-wall string equation, {name} (library)"), lib, tol);
        o.below(&format!("hard-wall string equation, {name} (recomputed)"), own, tol);
    }
    // no wall: exact Gaussian recurrence r_n = n t/N, s_n = 0
    let w = TruncatedWeight::new(g.clone(), 1.0, 10, None, 16).unwrap();
    let tab = recurrence_coefficients(&w).unwrap();
    let exact = tab
        .r
        .iter()
        .enumerate()
        .map(|(i, r)| (r - (i + 1) as f64 / 10.0).abs())
        .chain(tab.s.iter().map(|s| s.abs()))
        .fold(0.0, f64::max);
    o.below("no wall: Gaussian N=10 r_n = n/N, s_n = 0", exact, TOL_FREE_STRING);
    let w = TruncatedWeight::new(v1.clone(), 1.0, 8, None, 16).unwrap();
    let rep = string_residuals(&w, &recurrence_coefficients(&w).unwrap());
    o.below(
        "no wall: k=1 N=8 integrated string equations",
        rep.off_diagonal.unwrap_or(f64::NAN).max(rep.diagonal.unwrap_or(f64::NAN)),
        TOL_FREE_STRING,
    );
    let states = planar_states(&v1, 1.0, 0.9, 101).unwrap();
    let (r1, r2) = k1_string_residuals(&states, 0.9);
    o.below("k=1 planar equation 1 on the constrained grid, z=0.9", r1, TOL_PLANAR[0]);
    o.below("k=1 planar equation 2 on the constrained grid, z=0.9", r2, TOL_PLANAR[1]);
    o
}

/// Leading right-tail prediction for the Gaussian at `t = 1`, computed
/// from scratch: `-(g_s (a-b) / (8 pi y (z-a)(z-b))) exp(-A/g_s)`.
fn gaussian_right_prediction(z: f64, n: usize) -> f64 {
    let gs = 1.0 / n as f64;
    let y = (z * z - 4.0).sqrt();
    let a = 0.5 * z * y - 2.0 * ((z + y) / 2.0).ln();
    -gs * 4.0 / (8.0 * PI * y * (z - 2.0) * (z + 2.0)) * (-a / gs).exp()
}

fn criterion_7() -> Outcome {
    let mut o = Outcome::new();
    let ratio = |n: usize| {
        let w = TruncatedWeight::new(gaussian_potential(), 1.0, n, Some(2.2), 50).unwrap();
        log_gap_probability(&w).unwrap().log_p / gaussian_right_prediction(2.2, n)
    };
    let (r20, r40) = (ratio(20), ratio(40));
    o.within("log P / prediction, N=20", r20, RATIO_WINDOW.0, RATIO_WINDOW.1);
    o.within("log P / prediction, N=40", r40, RATIO_WINDOW.0, RATIO_WINDOW.1);
    o.holds(
        &format!("|ratio-1| shrinks: {:.4} (N=20) -> {:.4} (N=40)", (r20 - 1.0).abs(), (r40 - 1.0).abs()),
        (r40 - 1.0).abs() < (r20 - 1.0).abs(),
    );
    o
}

fn criterion_8() -> Outcome {
    let mut o = Outcome::new();
    let mut worst: f64 = 0.0;
    let h = 1e-5;
    for zeta in [0.5f64, 1.0, 1.5, 2.0] {
        for dz in [0.3, 0.8, 1.5, 2.5, 4.0] {
            let z = 2.0 * zeta.sqrt() + dz;
            let da = (gaussian_action(zeta + h, z).unwrap() - gaussian_action(zeta - h, z).unwrap()) / (2.0 * h);
            worst = worst.max((4.0 * zeta * (0.5 * da).cosh().powi(2) - z * z).abs());
        }
    }
    o.below("4 zeta cosh^2(A'/2) - z^2, 20 (zeta, z) pairs", worst, TOL_ODE);
    o
}

fn semicircle_cdf(x: f64) -> f64 {
    if x <= -2.0 {
        return 0.0;
    }
    if x >= 2.0 {
        return 1.0;
    }
    0.5 + x * (4.0 - x * x).sqrt() / (4.0 * PI) + (x / 2.0).asin() / PI
}

fn criterion_9() -> Outcome {
    let mut o = Outcome::new();
    let g = gaussian_potential();
    let cfg = SamplerConfig { sweeps: 125_000, burn_in: 2_000, seed: 2024, ..SamplerConfig::new(g.clone(), 1.0, 2) };
    let st = sample_chains(&cfg, 8, Exec::Parallel).unwrap();
    let ind: Vec<f64> = st.iter().map(|s| f64::from(u8::from(s.max() < 0.0))).collect();
    let (p, se) = batch_means(&ind, 100);
    let exact = 0.25 - 1.0 / (2.0 * PI);
    o.below(&format!("N=2 P(max < 0) = {p:.5} +- {se:.1e} vs {exact:.5}, in sigma ({} kept)", ind.len()), (p - exact).abs() / se, MC_SIGMAS);

    let cfg = SamplerConfig { sweeps: 4_000, burn_in: 1_000, thin: 10, seed: 2025, ..SamplerConfig::new(g, 1.0, 50) };
    let st = sample_chains(&cfg, 8, Exec::Parallel).unwrap();
    let pooled: Vec<f64> = st.iter().flat_map(|s| s.lambda.iter().copied()).collect();
    o.below("N=50 semicircle KS distance", ks_distance(&pooled, semicircle_cdf), MC_KS);

    let cfg = SamplerConfig {
        sweeps: 4_000,
        burn_in: 1_000,
        thin: 10,
        seed: 2026,
        ..SamplerConfig::new(multicritical_potential(1).unwrap(), 1.0, 50)
    };
    let st = sample_chains(&cfg, 8, Exec::Parallel).unwrap();
    let maxima: Vec<f64> = st.iter().map(|s| s.max()).collect();
    let (mean, se) = batch_means(&maxima, 40);
    o.within("k=1 N=50 mean lambda_max", mean, MC_MEAN_WINDOW.0, MC_MEAN_WINDOW.1);
    // the same mean from the gap probability, E = z_hi - int P(z) dz
    let exact = mean_lambda_max(multicritical_potential(1).unwrap(), 50, 0.6, 1.4, 16);
    o.below(&format!("sampled {mean:.4} +- {se:.1e} vs gap-probability mean {exact:.4}, in sigma"), (mean - exact).abs() / se, MC_SIGMAS);
    o
}

/// Simpson on `[lo, hi]` with `panels` (even) intervals; `P(z)` must be
/// negligible below `lo` and within rounding of one above `hi`.
fn mean_lambda_max(v: Polynomial, n: usize, lo: f64, hi: f64, panels: usize) -> f64 {
    let zs = linspace(lo, hi, panels + 1);
    let ps = Exec::Parallel.map(zs, |z| {
        let w = TruncatedWeight::new(v.clone(), 1.0, n, Some(z), 30).unwrap();
        log_gap_probability(&w).unwrap().log_p.exp()
    });
    let h = (hi - lo) / panels as f64;
    let s: f64 = ps
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let wt = if i == 0 || i == panels { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            wt * p
        })
        .sum();
    hi - s * h / 3.0
}

fn criterion_10() -> Outcome {
    let mut o = Outcome::new();
    for k in 0..=6 {
        let v = multicritical_potential(k).unwrap();
        let dv = v.derivative();
        let roots = count_real_roots(&dv, None).unwrap();
        let sp = saddle_points(&v).unwrap();
        let xmin = sp.real_minima.first().map_or(f64::NAN, |m| m.x);
        // sign changes of V' on a fine grid as a cross-check
        let grid = linspace(-3.0, 3.0, 60_001);
        let changes = grid.windows(2).filter(|p| dv.eval_f64(p[0]).signum() != dv.eval_f64(p[1]).signum()).count();
        o.holds(
            &format!("k={k}: Sturm count {roots}, grid sign changes {changes}, minimum at {xmin:.4}"),
            roots == 1 && sp.real_minima.len() == 1 && sp.real_maxima.is_empty() && xmin > 0.0 && changes <= 1,
        );
    }
    o
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("Gaussian closed forms", criterion_1),
        ("action vs quadrature", criterion_2),
        ("endpoints and edge density", criterion_3),
        ("edge exponents", criterion_4),
        ("finite-N oracle equivalence", criterion_5),
        ("string-equation residuals", criterion_6),
        ("asymptotic match, Gaussian t=1 z=2.2", criterion_7),
        ("action ODE consistency", criterion_8),
        ("Monte Carlo", criterion_9),
        ("critical points of V_k", criterion_10),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut o = run();
        let secs = start.elapsed().as_secs_f64();
        o.holds(&format!("runtime {secs:.2} s within {} s", BUDGET[i]), secs < BUDGET[i]);
        println!("criterion {:>2} [{}] {name} ({secs:.2} s)", i + 1, if o.pass { "PASS" } else { "FAIL" });
        for d in &o.details {
            println!("      {d}");
        }
        if !o.pass {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}
