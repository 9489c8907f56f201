//! Finite-N gap probabilities from polynomials orthogonal with respect to
//! the hard-wall truncated weight `e^{-(N/t) V(x)} / 2pi` on `(-inf, z]`.
//!
//! `Z_N(z) = N! h_0^N prod_{i<N} r_i^{N-i}`, so the gap probability only
//! needs `h_0` and the recurrence ratios, which the Stieltjes procedure
//! produces stably on a quadrature discretisation of the weight. A Hankel
//! determinant path on an independent quadrature serves as an oracle for
//! small N.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potentials::{check_confining, saddle_points, Polynomial};
use crate::quadrature::{composite_gauss_legendre, gauss_legendre};
use crate::real::{horner, Mp224, Real, Tier};

/// Precision at which tiny gap probabilities are recomputed.
pub const EXTENDED_DIGITS: u32 = 50;
/// Default decimal precision (double arithmetic).
pub const DEFAULT_DIGITS: u32 = 16;
/// Largest N the Hankel oracle accepts.
pub const HANKEL_MAX_N: usize = 8;

const NODES_PER_PANEL: usize = 20;
const MAX_REFINEMENTS: u32 = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncatedWeight {
    pub v: Polynomial,
    pub t: f64,
    pub n: usize,
    /// Wall position; `None` is the untruncated weight.
    pub z: Option<f64>,
    /// Decimal digits for internal arithmetic.
    pub precision: u32,
}

impl TruncatedWeight {
    pub fn new(v: Polynomial, t: f64, n: usize, z: Option<f64>, precision: u32) -> Result<Self> {
        check_confining(&v)?;
        if !(t > 0.0) {
            return Err(Error::domain(format!("coupling t = {t} must be positive")));
        }
        if n == 0 {
            return Err(Error::domain("N must be at least 1"));
        }
        if matches!(z, Some(z) if !z.is_finite()) {
            return Err(Error::domain("wall must be finite; use None for no wall"));
        }
        if Tier::for_digits(precision).is_none() {
            return Err(Error::Input(format!("precision {precision} exceeds the supported maximum")));
        }
        Ok(TruncatedWeight { v, t, n, z, precision })
    }

    pub fn with_wall(&self, z: Option<f64>) -> Self {
        TruncatedWeight { z, ..self.clone() }
    }

    pub fn with_precision(&self, precision: u32) -> Self {
        TruncatedWeight { precision, ..self.clone() }
    }

    fn tier(&self) -> Result<Tier> {
        Tier::for_digits(self.precision)
            .ok_or_else(|| Error::Input(format!("precision {} exceeds the supported maximum", self.precision)))
    }
}

/// `h_0`, `r_1..r_{N-1}` and `s_0..s_{N-1}` of the monic recurrence
/// `x pi_n = pi_{n+1} + s_n pi_n + r_n pi_{n-1}`. Norms are taken with
/// respect to `exp(-(N/t) V(x)) dx / (2 pi)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceTable {
    pub log_h0: f64,
    pub r: Vec<f64>,
    pub s: Vec<f64>,
    /// Worst orthonormality defect on the refined check rule.
    pub gram_residual: f64,
    pub nodes: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GapMethod {
    Stieltjes,
    Hankel,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapResult {
    pub log_p: f64,
    pub z: f64,
    pub t: f64,
    pub n: usize,
    pub method: GapMethod,
    /// Precision actually used (after any escalation).
    pub digits: u32,
}

// ---------------------------------------------------------------------------
// discretisation

/// Reference point of the weight on `(-inf, z]`: the lowest point of `V`
/// there.
fn reference_point(v: &Polynomial, z: Option<f64>) -> Result<(f64, f64)> {
    let sp = saddle_points(v)?;
    let mut best: Option<(f64, f64)> = None;
    for m in &sp.real_minima {
        if z.is_none_or(|z| m.x <= z) && best.is_none_or(|b| m.value < b.1) {
            best = Some((m.x, m.value));
        }
    }
    if let Some(z) = z {
        let vz = v.eval_f64(z);
        if best.is_none_or(|b| vz < b.1) {
            best = Some((z, vz));
        }
    }
    best.ok_or_else(|| Error::domain("potential has no real minimum"))
}

/// Outermost point, in direction `dir`, beyond which the weight times
/// `|x - xref|^{2N}` drops below `10^{-(digits+5)}`; never inside the
/// outermost critical point.
fn cutoff(v: &Polynomial, c: f64, n: usize, xref: f64, vref: f64, digits: u32, dir: f64) -> Result<f64> {
    let target = (digits as f64 + 5.0) * std::f64::consts::LN_10;
    let g = |d: f64| {
        let x = xref + dir * d;
        c * (v.eval_f64(x) - vref) - 2.0 * n as f64 * (1.0 + d).ln() - target
    };
    let mut hi = 0.25;
    while g(hi) <= 0.0 || g(2.0 * hi) <= 0.0 {
        hi *= 2.0;
        if hi > 1e8 {
            return Err(Error::domain("weight does not decay; potential not confining"));
        }
    }
    let mut lo = 0.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let sp = saddle_points(v)?;
    let crit = sp
        .real_minima
        .iter()
        .chain(&sp.real_maxima)
        .chain(&sp.inflections)
        .map(|p| p.x);
    let outer = if dir > 0.0 { crit.fold(f64::MIN, f64::max) } else { crit.fold(f64::MAX, f64::min) };
    let x = xref + dir * hi;
    Ok(if dir > 0.0 { x.max(outer) } else { x.min(outer) })
}

/// Quadrature nodes with the weight folded in, plus the log of the factor
/// taken out: `w(x) = exp(log_scale) * exp(-c (V(x) - V(xref)))`.
struct Discretization<R> {
    x: Vec<R>,
    w: Vec<R>,
    log_scale: R,
}

struct Layout {
    lo: f64,
    hi: f64,
    xref: f64,
}

fn layout<R: Real>(w: &TruncatedWeight) -> Result<Layout> {
    let c = w.n as f64 / w.t;
    // untruncated weight first: a wall beyond its upper cutoff gives the
    // identical rule and a gap probability of exactly zero
    let (xg, vg) = reference_point(&w.v, None)?;
    let free = Layout {
        lo: cutoff(&w.v, c, w.n, xg, vg, w.precision, -1.0)?,
        hi: cutoff(&w.v, c, w.n, xg, vg, w.precision, 1.0)?,
        xref: xg,
    };
    let free = settle_ends::<R>(&w.with_wall(None), free, true)?;
    let z = match w.z {
        Some(z) if z < free.hi => z,
        _ => return Ok(free),
    };
    let (xref, vref) = reference_point(&w.v, Some(z))?;
    let lo = cutoff(&w.v, c, w.n, xref, vref, w.precision, -1.0)?;
    if !(lo < z) {
        return Err(Error::domain("empty integration range"));
    }
    settle_ends::<R>(w, Layout { lo, hi: z, xref }, false)
}

/// Pushes the soft ends of `lay` outwards until every orthonormal
/// function `q_k^2 w`, `k < N`, is below `10^{-(digits-4)}` there. The
/// a-priori cutoffs only account for polynomial growth like `|x|^{2N}`;
/// for steep potentials at large `N` the polynomials grow like
/// `exp(N (V - Vref) / t)` across the support and the a-priori guess can
/// land inside it.
fn settle_ends<R: Real>(w: &TruncatedWeight, mut lay: Layout, free_hi: bool) -> Result<Layout> {
    // a decade below the Gram bound is ample: what lies beyond an end
    // carries at most its density times a decay length
    let log_tol = -(w.precision as f64 - 4.0) * std::f64::consts::LN_10;
    let c = w.n as f64 / w.t;
    let panels = (2 * w.n).max(10);
    for _ in 0..40 {
        let d = discretize::<R>(w, &lay, panels);
        let co = stieltjes(&d, w.n)?;
        let excess = |x: f64| end_density(w, &co, lay.xref, x).ln() - log_tol;
        let (e_lo, e_hi) = (excess(lay.lo), if free_hi { excess(lay.hi) } else { f64::NEG_INFINITY });
        if e_lo <= 0.0 && e_hi <= 0.0 {
            return Ok(lay);
        }
        if e_lo > 0.0 {
            lay.lo = push_end(&w.v, c, w.n, lay.xref, lay.lo, e_lo, -1.0)?;
        }
        if e_hi > 0.0 {
            lay.hi = push_end(&w.v, c, w.n, lay.xref, lay.hi, e_hi, 1.0)?;
        }
    }
    Err(Error::domain("integration range does not settle; potential not confining?"))
}

/// Smallest move of `end` away from `xref` after which the weight has
/// dropped by `excess` nepers (plus one decade) net of `|x - xref|^{2N}`
/// polynomial growth.
fn push_end(v: &Polynomial, c: f64, n: usize, xref: f64, end: f64, excess: f64, dir: f64) -> Result<f64> {
    let d0 = (end - xref).abs().max(1e-3);
    let v0 = v.eval_f64(end);
    let need = excess + std::f64::consts::LN_10;
    let g = |d: f64| c * (v.eval_f64(xref + dir * d) - v0) - 2.0 * n as f64 * (d / d0).ln() - need;
    let mut step = 0.05 * d0.max(0.1);
    while g(d0 + step) <= 0.0 {
        step *= 2.0;
        if step > 1e8 {
            return Err(Error::domain("weight does not decay; potential not confining"));
        }
    }
    let (mut lo, mut hi) = (0.0, step);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if g(d0 + mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(xref + dir * (d0 + hi))
}

/// `max_k q_k(x)^2 exp(-c (V(x) - V(xref)))` for the orthonormal
/// polynomials of `co`.
fn end_density<R: Real>(w: &TruncatedWeight, co: &Coeffs<R>, xref: f64, x: f64) -> f64 {
    let coeffs: Vec<R> = w.v.to_real();
    let c = R::from_f64(w.n as f64) / R::from_f64(w.t);
    let xr = R::from_f64(x);
    let wx = (-(c * (horner(&coeffs, &xr) - horner(&coeffs, &R::from_f64(xref))))).exp();
    let mut prev = R::zero();
    let mut cur = R::one() / co.mass.sqrt();
    let mut worst = cur.clone() * cur.clone();
    for k in 1..co.s.len() {
        let sq = co.r[k - 1].sqrt();
        let mut next = (xr.clone() - co.s[k - 1].clone()) * cur.clone();
        if k >= 2 {
            next -= co.r[k - 2].sqrt() * prev.clone();
        }
        next /= sq;
        prev = cur;
        cur = next;
        let d = cur.clone() * cur.clone();
        if d > worst {
            worst = d;
        }
    }
    (worst * wx).to_f64()
}

fn discretize<R: Real>(w: &TruncatedWeight, lay: &Layout, panels: usize) -> Discretization<R> {
    let coeffs: Vec<R> = w.v.to_real();
    let c = R::from_f64(w.n as f64) / R::from_f64(w.t);
    let (lo, hi) = (R::from_f64(lay.lo), R::from_f64(lay.hi));
    let breaks: Vec<R> = (0..=panels)
        .map(|k| lo.clone() + (hi.clone() - lo.clone()) * R::from_usize(k) / R::from_usize(panels))
        .collect();
    let (x, gw) = composite_gauss_legendre::<R>(&breaks, NODES_PER_PANEL);
    let vref = horner(&coeffs, &R::from_f64(lay.xref));
    let w = x
        .iter()
        .zip(gw)
        .map(|(x, gw)| gw * (-(c.clone() * (horner(&coeffs, x) - vref.clone()))).exp())
        .collect();
    let two_pi = R::pi() * R::from_f64(2.0);
    Discretization { x, w, log_scale: -(c * vref) - two_pi.ln() }
}

// ---------------------------------------------------------------------------
// Stieltjes procedure

struct Coeffs<R> {
    log_h0: R,
    /// `sum w` on the discretisation (without the scale factor).
    mass: R,
    r: Vec<R>,
    s: Vec<R>,
}

fn stieltjes<R: Real>(d: &Discretization<R>, n: usize) -> Result<Coeffs<R>> {
    let mass = d.w.iter().fold(R::zero(), |a, w| a + w.clone());
    if !(mass > R::zero()) {
        return Err(Error::Precision { residual: f64::INFINITY, bound: 0.0, digits: R::DIGITS });
    }
    let m = d.x.len();
    let mut prev = vec![R::zero(); m];
    let q0 = R::one() / mass.sqrt();
    let mut cur = vec![q0; m];
    let mut r = Vec::with_capacity(n.saturating_sub(1));
    let mut s = Vec::with_capacity(n);
    let mut sqrt_r = R::zero();
    for k in 0..n {
        let sk = (0..m).fold(R::zero(), |a, i| {
            a + d.w[i].clone() * d.x[i].clone() * cur[i].clone() * cur[i].clone()
        });
        s.push(sk.clone());
        if k + 1 == n {
            break;
        }
        let next: Vec<R> = (0..m)
            .map(|i| (d.x[i].clone() - sk.clone()) * cur[i].clone() - sqrt_r.clone() * prev[i].clone())
            .collect();
        let rk = (0..m).fold(R::zero(), |a, i| a + d.w[i].clone() * next[i].clone() * next[i].clone());
        if !(rk > R::zero()) {
            return Err(Error::Precision { residual: f64::INFINITY, bound: 0.0, digits: R::DIGITS });
        }
        sqrt_r = rk.sqrt();
        r.push(rk);
        prev = cur;
        cur = next.into_iter().map(|v| v / sqrt_r.clone()).collect();
    }
    Ok(Coeffs { log_h0: mass.ln() + d.log_scale.clone(), mass, r, s })
}

/// Largest `|<q_i, q_j> - delta_ij|` over `i, j < N` on another rule, with
/// the orthonormal polynomials generated from the recurrence.
fn gram_defect<R: Real>(co: &Coeffs<R>, d: &Discretization<R>) -> f64 {
    let n = co.s.len();
    let mut g = vec![R::zero(); n * n];
    let sq: Vec<R> = co.r.iter().map(|r| r.sqrt()).collect();
    let q0 = R::one() / co.mass.sqrt();
    let mut q = vec![R::zero(); n];
    for (x, w) in d.x.iter().zip(&d.w) {
        q[0] = q0.clone();
        for k in 1..n {
            let mut v = (x.clone() - co.s[k - 1].clone()) * q[k - 1].clone();
            if k >= 2 {
                v -= sq[k - 2].clone() * q[k - 2].clone();
            }
            q[k] = v / sq[k - 1].clone();
        }
        for i in 0..n {
            let wi = w.clone() * q[i].clone();
            for j in i..n {
                g[i * n + j] += wi.clone() * q[j].clone();
            }
        }
    }
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            let e = if i == j { g[i * n + j].clone() - R::one() } else { g[i * n + j].clone() };
            worst = worst.max(e.abs().to_f64());
        }
    }
    worst
}

fn recurrence_in<R: Real>(w: &TruncatedWeight) -> Result<(Coeffs<R>, f64, usize)> {
    let lay = layout::<R>(w)?;
    let bound = 10f64.powi(-(w.precision as i32 - 5));
    let base = (2 * w.n).max(10);
    let mut last = f64::INFINITY;
    for k in 0..=MAX_REFINEMENTS {
        let panels = base << k;
        let d = discretize::<R>(w, &lay, panels);
        let co = stieltjes(&d, w.n)?;
        let check = discretize::<R>(w, &lay, 2 * panels);
        last = gram_defect(&co, &check);
        if last < bound {
            return Ok((co, last, d.x.len()));
        }
    }
    Err(Error::Precision { residual: last, bound, digits: w.precision })
}

/// Recurrence coefficients of the truncated weight by the Stieltjes
/// procedure, with the orthonormality of the first `N` polynomials checked
/// on a rule with twice as many nodes.
pub fn recurrence_coefficients(w: &TruncatedWeight) -> Result<RecurrenceTable> {
    fn run<R: Real>(w: &TruncatedWeight) -> Result<RecurrenceTable> {
        let (co, gram, nodes) = recurrence_in::<R>(w)?;
        Ok(RecurrenceTable {
            log_h0: co.log_h0.to_f64(),
            r: co.r.iter().map(R::to_f64).collect(),
            s: co.s.iter().map(R::to_f64).collect(),
            gram_residual: gram,
            nodes,
        })
    }
    crate::dispatch_tier!(w.tier()?, run(w))
}

fn log_z_in<R: Real>(co: &Coeffs<R>, n: usize) -> R {
    let mut acc = R::from_usize(n) * co.log_h0.clone();
    for (i, r) in co.r.iter().enumerate() {
        acc += R::from_usize(n - 1 - i) * r.ln();
    }
    acc
}

fn log_gap_in<R: Real>(w: &TruncatedWeight) -> Result<f64> {
    let free = w.with_wall(None);
    let (cz, _, _) = recurrence_in::<R>(w)?;
    let (cf, _, _) = recurrence_in::<R>(&free)?;
    Ok((log_z_in(&cz, w.n) - log_z_in(&cf, w.n)).to_f64())
}

fn log_gap_at(w: &TruncatedWeight) -> Result<f64> {
    crate::dispatch_tier!(w.tier()?, log_gap_in(w))
}

/// `log P_N(z) = log Z_N(z) - log Z_N(inf)` from the Stieltjes path.
/// Results with `|log P| < 1e-6` are recomputed with at least
/// [`EXTENDED_DIGITS`] digits, since there the two partition functions
/// agree to many digits.
pub fn log_gap_probability(w: &TruncatedWeight) -> Result<GapResult> {
    let z = w.z.ok_or_else(|| Error::domain("gap probability needs a finite wall"))?;
    let mut digits = w.precision;
    let mut lp = log_gap_at(w)?;
    if lp.abs() < 1e-6 && lp != 0.0 && digits < EXTENDED_DIGITS {
        digits = EXTENDED_DIGITS;
        lp = log_gap_at(&w.with_precision(digits))?;
    }
    Ok(GapResult { log_p: lp.min(0.0), z, t: w.t, n: w.n, method: GapMethod::Stieltjes, digits })
}

/// `r_n(z) - r_n(inf)` for `n = 1..N-1`, differenced in the working
/// precision (the shift is far below double resolution for a distant
/// wall).
pub fn wall_shift(w: &TruncatedWeight) -> Result<Vec<f64>> {
    fn run<R: Real>(w: &TruncatedWeight) -> Result<Vec<f64>> {
        let (cz, _, _) = recurrence_in::<R>(w)?;
        let (cf, _, _) = recurrence_in::<R>(&w.with_wall(None))?;
        Ok(cz.r.iter().zip(&cf.r).map(|(a, b)| (a.clone() - b.clone()).to_f64()).collect())
    }
    crate::dispatch_tier!(w.tier()?, run(w))
}

// ---------------------------------------------------------------------------
// Hankel oracle

fn log_det_lu<R: Real>(mut a: Vec<R>, n: usize) -> Result<R> {
    let mut acc = R::zero();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i * n + k].abs().partial_cmp(&a[j * n + k].abs()).unwrap())
            .unwrap();
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
        }
        let piv = a[k * n + k].clone();
        if !(piv.abs() > R::zero()) {
            return Err(Error::IllConditioned(n));
        }
        acc += piv.abs().ln();
        for i in k + 1..n {
            let f = a[i * n + k].clone() / piv.clone();
            for j in k..n {
                let u = a[k * n + j].clone();
                a[i * n + j] -= f.clone() * u;
            }
        }
    }
    Ok(acc)
}

/// Log of the Hankel moment determinant in shifted, scaled monomials
/// `((x - m)/sigma)^k`; the change of basis is unimodular up to
/// `sigma^{-N(N-1)}`, common to both walls.
fn hankel_log_det(w: &TruncatedWeight, upper: f64, lo: f64, m: f64, sigma: f64, h: f64) -> Result<Mp224> {
    let n = w.n;
    let coeffs: Vec<Mp224> = w.v.to_real();
    let c = Mp224::from_f64(w.n as f64 / w.t);
    let (gx, gw) = gauss_legendre::<Mp224>(24);
    let panels = ((upper - lo) / h).ceil().max(1.0) as usize;
    let (mm, ss) = (Mp224::from_f64(m), Mp224::from_f64(sigma));
    let vm = horner(&coeffs, &mm);
    let mut mu = vec![Mp224::zero(); 2 * n - 1];
    let two = Mp224::from_f64(2.0);
    for p in 0..panels {
        let a = Mp224::from_f64(lo + p as f64 * h);
        let b = if p + 1 == panels { Mp224::from_f64(upper) } else { Mp224::from_f64(lo + (p + 1) as f64 * h) };
        let half = (b.clone() - a.clone()) / two.clone();
        let mid = (b + a) / two.clone();
        for (x, wq) in gx.iter().zip(&gw) {
            let x = mid.clone() + half.clone() * x.clone();
            let wt = half.clone() * wq.clone() * (-(c.clone() * (horner(&coeffs, &x) - vm.clone()))).exp();
            let u = (x - mm.clone()) / ss.clone();
            let mut pk = wt;
            for m in mu.iter_mut() {
                *m += pk.clone();
                pk *= u.clone();
            }
        }
    }
    let mut a = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            a.push(mu[i + j].clone());
        }
    }
    log_det_lu(a, n)
}

/// Gap probability from Hankel determinants of the truncated and free
/// moments. Independent of the Stieltjes path: its own cutoffs, panel
/// layout and rule, always in 224-bit arithmetic. Refuses `N > 8`.
pub fn hankel_log_gap(w: &TruncatedWeight) -> Result<GapResult> {
    if w.n > HANKEL_MAX_N {
        return Err(Error::IllConditioned(w.n));
    }
    let z = w.z.ok_or_else(|| Error::domain("gap probability needs a finite wall"))?;
    let c = w.n as f64 / w.t;
    let (xg, vg) = reference_point(&w.v, None)?;
    // scan outward in fixed steps until the weight is below 1e-75 even
    // against the polynomial growth; for N <= 8 this margin dwarfs the
    // growth of the orthogonal polynomials across the support
    let decayed = |x: f64, xr: f64, vr: f64| {
        c * (w.v.eval_f64(x) - vr) - 2.0 * w.n as f64 * (1.0 + (x - xr).abs()).ln() > 75.0 * std::f64::consts::LN_10
    };
    let mut hi = xg;
    while !decayed(hi, xg, vg) {
        hi += 0.125;
    }
    let (xl, vl) = if z < xg { (z, w.v.eval_f64(z)) } else { (xg, vg) };
    let mut lo = xl.min(xg);
    while !decayed(lo, xl, vl) {
        lo -= 0.125;
    }
    let d2 = w.v.derivative().derivative().eval_f64(xg).abs().max(1.0);
    let h = (0.5 / (c * d2).sqrt()).min(0.25);
    let (m, sigma) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    let det_free = hankel_log_det(w, hi, lo, m, sigma, h)?;
    let lp = if z >= hi {
        0.0
    } else if z <= lo {
        return Err(Error::domain("wall below the quadrature range"));
    } else {
        (hankel_log_det(w, z, lo, m, sigma, h)? - det_free).to_f64()
    };
    Ok(GapResult { log_p: lp.min(0.0), z, t: w.t, n: w.n, method: GapMethod::Hankel, digits: Mp224::DIGITS })
}

// ---------------------------------------------------------------------------
// string equations

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StringReport {
    /// `max_n |((Q - z) V'(Q))_{nn} - (2n+1) t/N|` (finite wall).
    pub hard_wall: Option<f64>,
    /// `max_n |sqrt(r_n) V'(Q)_{n,n-1} - t n/N|` (no wall).
    pub off_diagonal: Option<f64>,
    /// `max_n |V'(Q)_{nn}|` (no wall).
    pub diagonal: Option<f64>,
    /// Rows checked: `n < N - deg V`.
    pub rows: usize,
}

fn matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                c[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    c
}

/// Residuals of the integrated string equations in the orthonormal basis,
/// with the Jacobi matrix `Q` truncated at `N`: only rows whose entries
/// never reach the truncation are reported.
pub fn string_residuals(w: &TruncatedWeight, tab: &RecurrenceTable) -> StringReport {
    let n = w.n;
    let deg = w.v.degree().unwrap_or(0);
    let rows = n.saturating_sub(deg);
    let mut q = vec![0.0; n * n];
    for i in 0..n {
        q[i * n + i] = tab.s[i];
        if i + 1 < n {
            let b = tab.r[i].sqrt();
            q[i * n + i + 1] = b;
            q[(i + 1) * n + i] = b;
        }
    }
    // V'(Q) by Horner
    let dv = w.v.derivative().to_f64_coeffs();
    let mut p = vec![0.0; n * n];
    for &c in dv.iter().rev() {
        p = matmul(&p, &q, n);
        for i in 0..n {
            p[i * n + i] += c;
        }
    }
    let g = w.t / n as f64;
    let mut rep = StringReport { rows, ..Default::default() };
    match w.z {
        Some(z) => {
            let mut qz = q.clone();
            for i in 0..n {
                qz[i * n + i] -= z;
            }
            let m = matmul(&qz, &p, n);
            let worst = (0..rows)
                .map(|i| (m[i * n + i] - (2 * i + 1) as f64 * g).abs())
                .fold(0.0, f64::max);
            rep.hard_wall = Some(worst);
        }
        None => {
            let off = (1..rows)
                .map(|i| (tab.r[i - 1].sqrt() * p[i * n + i - 1] - i as f64 * g).abs())
                .fold(0.0, f64::max);
            let diag = (0..rows).map(|i| p[i * n + i].abs()).fold(0.0, f64::max);
            rep.off_diagonal = Some(off);
            rep.diagonal = Some(diag);
        }
    }
    rep
}
