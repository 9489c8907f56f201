//! Left/right large-deviation rate functions of the largest eigenvalue.
//!
//! Closed forms for the Gaussian and the first multicritical potential,
//! and a general left-tail solver built on the hard-wall planar solution.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::planar::Planar;
use crate::potentials::{multicritical_potential, saddle_points, Polynomial};
use crate::quadrature::gauss_legendre;
use crate::real::{Mp128, Real, Tier};
use crate::spectral_curve::{ActionKind, Flagged, OneCutSolution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    PlanarSolver,
    SpectralCurve,
    Orthopoly,
    Montecarlo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    /// `e^{-N^2 ...}` scale (left tail).
    LeadingN2,
    /// `e^{-N ...}` scale (right tail).
    LeadingN,
    FiniteN,
}

/// One instanton contribution to a right-tail estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailTerm {
    pub kind: ActionKind,
    pub location: f64,
    pub action: f64,
    pub log_p: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailResult {
    pub value: f64,
    pub method: Method,
    pub order: Order,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub terms: Vec<TailTerm>,
}

impl TailResult {
    pub fn new(value: f64, method: Method, order: Order) -> Self {
        TailResult { value, method, order, terms: Vec::new() }
    }
}

/// Left rate function in the `e^{-2 N^2 psi}` normalisation (edge at
/// `sqrt 2`); zero with `in_domain = false` right of the edge.
pub fn psi_minus(z: f64) -> Flagged {
    if z > std::f64::consts::SQRT_2 {
        return Flagged { value: 0.0, in_domain: false };
    }
    let s = (z * z + 6.0).sqrt();
    let v = z * z / 3.0 - z.powi(4) / 108.0 - s * (z.powi(3) + 15.0 * z) / 108.0
        - 0.5 * ((s + z) / std::f64::consts::SQRT_2).ln()
        + 0.5 * 3f64.ln();
    Flagged { value: v, in_domain: true }
}

/// Right rate function in the `e^{-2 N psi}` normalisation.
pub fn psi_plus(z: f64) -> Result<f64> {
    if z < std::f64::consts::SQRT_2 {
        return Err(Error::domain(format!("psi_plus needs z >= sqrt(2), got {z}")));
    }
    let s = (z * z - 2.0).max(0.0).sqrt();
    Ok(0.5 * z * s + ((z - s) / std::f64::consts::SQRT_2).ln())
}

/// Leading left-tail free energy `g_s^2 F0(z; t)` of the Gaussian model;
/// zero for `z >= 2 sqrt t`.
pub fn gaussian_left_f(z: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::domain(format!("coupling t = {t} must be positive")));
    }
    if z >= 2.0 * t.sqrt() {
        return Ok(0.0);
    }
    let s = (z * z + 12.0 * t).sqrt();
    Ok(-t * z * z / 3.0
        + z.powi(4) / 216.0
        + z / 216.0 * (z * z + 30.0 * t) * s
        + t * t * ((z + s) / (6.0 * t.sqrt())).ln())
}

/// Gaussian right-tail action `int_{2 sqrt t}^z sqrt(x^2 - 4t) dx`.
pub fn gaussian_action(t: f64, z: f64) -> Result<f64> {
    if !(t > 0.0) || z < 2.0 * t.sqrt() {
        return Err(Error::domain(format!("gaussian action needs z >= 2 sqrt(t), got z = {z}, t = {t}")));
    }
    let w = (z * z / (2.0 * t) - 1.0).max(1.0);
    Ok(0.5 * z * z * (1.0 - 4.0 * t / (z * z)).max(0.0).sqrt() - t * w.acosh())
}

/// `4 t cosh^2(dA/dt / 2) - z^2` with a central difference in `t`.
pub fn gaussian_action_ode_residual(t: f64, z: f64) -> Result<f64> {
    let h = 1e-5;
    let da = (gaussian_action(t + h, z)? - gaussian_action(t - h, z)?) / (2.0 * h);
    Ok(4.0 * t * (0.5 * da).cosh().powi(2) - z * z)
}

fn multicritical_action_in<R: Real>(a: R, b: R, z: R) -> R {
    let f = R::from_f64;
    let root = ((a.clone() - z.clone()) * (b.clone() - z.clone())).sqrt();
    let poly = f(45.0) * a.powi(3) + f(45.0) * b.powi(3)
        + f(3.0) * a.powi(2) * (f(-40.0) + f(9.0) * b.clone() - f(6.0) * z.clone())
        - f(6.0) * b.powi(2) * (f(20.0) + f(3.0) * z.clone())
        + b.clone() * (f(90.0) + f(80.0) * z.clone() - f(24.0) * z.powi(2))
        - f(4.0) * z.clone() * (f(45.0) - f(40.0) * z.clone() + f(12.0) * z.powi(2))
        + a.clone()
            * (f(90.0) + f(27.0) * b.powi(2) + f(80.0) * z.clone() - f(24.0) * z.powi(2)
                - f(4.0) * b.clone() * (f(20.0) + f(3.0) * z.clone()));
    let d = a.clone() - b.clone();
    let quad = f(15.0) * a.powi(2) + f(2.0) * a.clone() * (f(-20.0) + f(9.0) * b.clone())
        + f(5.0) * (f(6.0) - f(8.0) * b.clone() + f(3.0) * b.powi(2));
    let arg = (f(2.0) * z - a - b) / d.clone();
    let arg = if arg < R::one() { R::one() } else { arg };
    f(2.0) / f(15.0) * (-f(2.0) * root * poly - f(3.0) * d.clone() * d * quad * arg.acosh())
}

/// Closed-form right-tail action of the first multicritical potential in
/// terms of the endpoints of `sol`. Evaluated in 128-bit arithmetic: near
/// the edge the result (`~ omega^{7/2}`) is a small difference of O(1)
/// terms.
pub fn multicritical_action(sol: &OneCutSolution, z: f64) -> Result<f64> {
    if sol.v != multicritical_potential(1)? {
        return Err(Error::domain("closed-form action is specific to the k = 1 potential"));
    }
    if z < sol.a {
        return Err(Error::domain(format!("action needs z >= a = {}, got {z}", sol.a)));
    }
    let r = multicritical_action_in(Mp128::from_f64(sol.a), Mp128::from_f64(sol.b), Mp128::from_f64(z));
    Ok(r.to_f64())
}

/// Residual of the relation between the closed-form `k = 1` action and the
/// planar centre `S(zeta)`:
/// `P(S, z) + Q(S) cosh[(6S-5)^3 dA/dS / (16 (2S-1)^2 T(S))]`, with
/// `dA/dS` from central differences in `zeta`. Requires `z > a(zeta)` and
/// `zeta` away from the critical coupling `1`.
pub fn multicritical_action_ode_residual(zeta: f64, z: f64) -> Result<f64> {
    let v = multicritical_potential(1)?;
    let planar = Planar::<Mp128>::new(&v);
    let s_and_a = |zt: f64| -> Result<(f64, f64)> {
        let zt = Mp128::from_f64(zt);
        let (c, r) = planar.solve(&v, &zt)?;
        let (a, b) = (c.clone() + r.clone(), c.clone() - r);
        if a.to_f64() >= z {
            return Err(Error::domain("wall inside the support"));
        }
        Ok((c.to_f64(), multicritical_action_in(a, b, Mp128::from_f64(z)).to_f64()))
    };
    let h = 1e-5;
    let (sp, ap) = s_and_a(zeta + h)?;
    let (sm, am) = s_and_a(zeta - h)?;
    let (s, _) = s_and_a(zeta)?;
    let da_ds = (ap - am) / (sp - sm);
    let p = -5.0 + 30.0 * s - 80.0 * s * s + 64.0 * s.powi(3) + 80.0 * s * z - 96.0 * s * s * z - 40.0 * z * z
        + 48.0 * s * z * z;
    let q = -5.0 + 30.0 * s - 40.0 * s * s + 16.0 * s.powi(3);
    let tpoly = 305.0 - 1180.0 * s + 1740.0 * s * s - 1152.0 * s.powi(3) + 288.0 * s.powi(4);
    let arg = (6.0 * s - 5.0).powi(3) * da_ds / (16.0 * (2.0 * s - 1.0).powi(2) * tpoly);
    Ok(p + q * arg.cosh())
}

/// Planar recurrence data `(R, S)` at index parameter `zeta` with a hard
/// wall at `z`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeftTailPlanarState {
    pub zeta: f64,
    pub r: f64,
    pub s: f64,
    /// Soft (lower) edge of the constrained density.
    pub b_soft: f64,
    /// Whether the wall pushes on the density at this `zeta`.
    pub wall_active: bool,
}

fn global_minimum(v: &Polynomial) -> Result<f64> {
    Ok(saddle_points(v)?
        .global_minimum()
        .ok_or_else(|| Error::domain("potential has no real minimum"))?
        .x)
}

/// Largest coupling at which the wall at `z` is not yet touched
/// (unconstrained upper edge equal to `z`); zero if `z` lies below the
/// minimum of `V`.
pub fn zeta_critical(v: &Polynomial, t: f64, z: f64) -> Result<f64> {
    let xmin = global_minimum(v)?;
    if z <= xmin {
        return Ok(0.0);
    }
    let planar = Planar::<Mp128>::new(v);
    let (c, _) = planar.solve(v, &Mp128::from_f64(t))?;
    let e = planar.edge_point(&Mp128::from_f64(z), c)?;
    Ok(e.zeta.to_f64())
}

/// States on a uniform `zeta` grid of `n` points covering
/// `[zeta_c + 0.1 (t - zeta_c), t]`, solved with continuation.
pub fn planar_states(v: &Polynomial, t: f64, z: f64, n: usize) -> Result<Vec<LeftTailPlanarState>> {
    if n < 5 {
        return Err(Error::domain("need at least 5 grid points"));
    }
    let planar = Planar::<Mp128>::new(v);
    let (ct, rt) = planar.solve(v, &Mp128::from_f64(t))?;
    let a_t = (ct.clone() + rt).to_f64();
    let mp = Mp128::from_f64;
    if z >= a_t {
        // wall inactive everywhere: unconstrained solutions
        let lo = 0.5 * t;
        let mut out = Vec::with_capacity(n);
        let (mut c, mut r) = planar.solve(v, &mp(lo))?;
        for i in 0..n {
            let zeta = lo + (t - lo) * i as f64 / (n - 1) as f64;
            let (cn, rn) = planar.unconstrained(&mp(zeta), c, r)?;
            c = cn;
            r = rn;
            let rf = r.to_f64();
            out.push(LeftTailPlanarState {
                zeta,
                r: rf * rf / 4.0,
                s: c.to_f64(),
                b_soft: (c.clone() - r.clone()).to_f64(),
                wall_active: false,
            });
        }
        return Ok(out);
    }
    let zc = zeta_critical(v, t, z)?;
    let zeta0 = zc + 0.1 * (t - zc);
    // continuation in zeta from the touching point
    let mut b = if zc > 0.0 {
        let e = planar.edge_point(&mp(z), ct.clone())?;
        e.c.clone() - e.r.clone()
    } else {
        initial_soft_edge(&planar, v, 1e-8, z)?
    };
    let zstart = if zc > 0.0 { zc } else { 1e-8 };
    let zz = mp(z);
    let warm = 20;
    for i in 1..=warm {
        let zeta = zstart + (zeta0 - zstart) * i as f64 / warm as f64;
        b = planar.constrained(&mp(zeta), &zz, b)?;
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let zeta = zeta0 + (t - zeta0) * i as f64 / (n - 1) as f64;
        b = planar.constrained(&mp(zeta), &zz, b)?;
        let bf = b.to_f64();
        out.push(LeftTailPlanarState {
            zeta,
            r: ((z - bf) / 4.0).powi(2),
            s: 0.5 * (z + bf),
            b_soft: bf,
            wall_active: true,
        });
    }
    Ok(out)
}

fn initial_soft_edge<R: Real>(planar: &Planar<R>, v: &Polynomial, zeta: f64, z: f64) -> Result<R> {
    // tiny coupling, V locally quadratic: 3/2 V''(z) r^2 - V'(z) r - 2 zeta = 0
    let dv = v.derivative();
    let (d1, d2) = (dv.eval_f64(z), dv.derivative().eval_f64(z).max(0.0));
    let disc = d1 * d1 + 12.0 * d2 * zeta;
    if d1 > 0.0 || !(disc > 0.0) {
        return Err(Error::domain("wall must lie left of the minimum here"));
    }
    let r = 4.0 * zeta / (-d1 + disc.sqrt());
    planar.constrained(&R::from_f64(zeta), &R::from_f64(z), R::from_f64(z - 2.0 * r))
}

/// Residuals of the two planar string equations of the `k = 1` model on a
/// grid of states; the `zeta` derivative in the second uses a five-point
/// stencil on the (uniform) grid. Returns the maxima of `|res1|, |res2|`.
pub fn k1_string_residuals(states: &[LeftTailPlanarState], z: f64) -> (f64, f64) {
    let res1 = |st: &LeftTailPlanarState| {
        let (r, s) = (st.r, st.s);
        16.0 / 5.0
            * (60.0 * r + 96.0 * r * r - 5.0 * s - 240.0 * r * s + 30.0 * s * s + 192.0 * r * s * s
                - 40.0 * s.powi(3)
                + 16.0 * s.powi(4)
                + 5.0 * z
                + 80.0 * r * z
                - 30.0 * s * z
                - 96.0 * r * s * z
                + 40.0 * s * s * z
                - 16.0 * s.powi(3) * z)
            - 2.0 * st.zeta
    };
    let g = |st: &LeftTailPlanarState| {
        let (r, s) = (st.r, st.s);
        16.0 / 5.0
            * (-5.0 * r - 120.0 * r * r + 60.0 * r * s + 192.0 * r * r * s - 120.0 * r * s * s
                + 64.0 * r * s.powi(3)
                - 30.0 * r * z
                - 48.0 * r * r * z
                + 80.0 * r * s * z
                - 48.0 * r * s * s * z)
    };
    let r1 = states.iter().map(|s| res1(s).abs()).fold(0.0, f64::max);
    let mut r2: f64 = 0.0;
    for i in 2..states.len().saturating_sub(2) {
        let h = states[i + 1].zeta - states[i].zeta;
        let d = (-g(&states[i + 2]) + 8.0 * g(&states[i + 1]) - 8.0 * g(&states[i - 1]) + g(&states[i - 2]))
            / (12.0 * h);
        r2 = r2.max((d - (states[i].s - z)).abs());
    }
    (r1, r2)
}

/// Panel layout for the left-tail integral in the edge variable `a`.
fn edge_panels(lo: f64, hi: f64, log_graded: bool) -> Vec<f64> {
    if log_graded {
        // geometric refinement towards the logarithmic end point
        let mut br: Vec<f64> = (0..=20).map(|k| lo + (hi - lo) * 0.5f64.powi(20 - k)).collect();
        br[0] = lo;
        br.dedup();
        br
    } else {
        (0..=6).map(|k| lo + (hi - lo) * k as f64 / 6.0).collect()
    }
}

fn left_tail_in<R: Real>(v: &Polynomial, t: f64, z: f64) -> Result<f64> {
    let planar = Planar::<R>::new(v);
    let rt = R::from_f64(t);
    let (ct, rr) = planar.solve(v, &rt)?;
    let a_t = ct.clone() + rr.clone();
    let b_t = ct.clone() - rr;
    let zr = R::from_f64(z);
    if zr >= a_t {
        return Ok(0.0);
    }
    if zr <= b_t {
        return Err(Error::domain(format!(
            "left tail restricted to b < z < a; z = {z} <= b = {}",
            b_t.to_f64()
        )));
    }
    let xmin = global_minimum(v)?;
    let below_min = z <= xmin;
    let lo = if below_min { R::from_f64(xmin) } else { zr.clone() };

    // nodes in a, ascending; panels relative to [lo, a_t]
    let span = a_t.clone() - lo.clone();
    let unit = edge_panels(0.0, 1.0, below_min);
    let per_panel = 16;
    let (gx, gw) = gauss_legendre::<R>(per_panel);
    let two = R::from_f64(2.0);
    let mut nodes = Vec::new();
    for p in unit.windows(2) {
        let l = lo.clone() + span.clone() * R::from_f64(p[0]);
        let h = lo.clone() + span.clone() * R::from_f64(p[1]);
        let half = (h.clone() - l.clone()) / two.clone();
        let mid = (h + l) / two.clone();
        for (x, w) in gx.iter().zip(&gw) {
            nodes.push((mid.clone() + half.clone() * x.clone(), half.clone() * w.clone()));
        }
    }

    // pass 1: edge curve, continuation downward from a_t
    let mut edges = Vec::with_capacity(nodes.len());
    let mut c = ct;
    for (a, _) in nodes.iter().rev() {
        let e = planar.edge_point(a, c.clone())?;
        c = e.c.clone();
        edges.push(e);
    }
    edges.reverse();

    // pass 2: constrained soft edge, continuation upward from the touching
    // point
    let mut b = if below_min {
        initial_soft_edge(&planar, v, edges[0].zeta.to_f64().max(1e-300), z)?
    } else {
        let e = planar.edge_point(&zr, edges[0].c.clone())?;
        e.c - e.r
    };
    let mut total = R::zero();
    for ((_, w), e) in nodes.iter().zip(&edges) {
        b = planar.constrained(&e.zeta, &zr, b)?;
        let ratio = (zr.clone() - b.clone()) / (two.clone() * e.r.clone());
        let integrand = (rt.clone() - e.zeta.clone()) * e.dzeta_da.clone() * two.clone() * ratio.ln();
        total += w.clone() * integrand;
    }
    // below the minimum h0(z) itself is exponentially small: N log h0
    // contributes at order N^2
    let mut total = total.to_f64();
    if below_min {
        let sp = saddle_points(v)?;
        let vmin = sp.global_minimum().map(|m| m.value).unwrap_or(0.0);
        let lowest_left = sp
            .real_minima
            .iter()
            .filter(|m| m.x < z)
            .map(|m| m.value)
            .fold(v.eval_f64(z), f64::min);
        total -= t * (lowest_left - vmin);
    }
    Ok(total)
}

/// `g_s^2 F0(z; t) = int_{zeta_c}^t (t - zeta) ln(R(zeta, z) / R(zeta, inf)) d zeta`
/// for a general one-cut potential, in double precision.
pub fn left_tail_general(v: &Polynomial, t: f64, z: f64) -> Result<TailResult> {
    left_tail_general_with_digits(v, t, z, 16)
}

/// As [`left_tail_general`] with `digits` decimal digits of working
/// precision. The integral is taken in the upper-edge variable `a`, with
/// `zeta(a)` and `d zeta / d a` known exactly, so the ill-conditioning of
/// the endpoint map at a multicritical point never enters.
pub fn left_tail_general_with_digits(v: &Polynomial, t: f64, z: f64, digits: u32) -> Result<TailResult> {
    if !(t > 0.0) {
        return Err(Error::domain(format!("coupling t = {t} must be positive")));
    }
    let tier = Tier::for_digits(digits)
        .ok_or_else(|| Error::Input(format!("precision {digits} exceeds the supported maximum")))?;
    let value = crate::dispatch_tier!(tier, left_tail_in(v, t, z))?;
    Ok(TailResult::new(value, Method::PlanarSolver, Order::LeadingN2))
}

/// Constrained `R(zeta, z) = ((z - b~)/4)^2` at a single coupling, solved
/// by continuation from the touching point.
pub fn constrained_r(v: &Polynomial, zeta: f64, z: f64) -> Result<LeftTailPlanarState> {
    let states = planar_states(v, zeta, z, 5)?;
    Ok(*states.last().unwrap())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// Least-squares slope of `ln|f(a -+ omega)|` against `ln omega` on a
/// geometric grid of 13 points in `[1e-4, 1e-2]`.
pub fn edge_exponent(f: impl Fn(f64) -> f64, a: f64, side: Side) -> Result<f64> {
    let n = 13;
    let mut pts = Vec::with_capacity(n);
    for i in 0..n {
        let w = 10f64.powf(-4.0 + 2.0 * i as f64 / (n - 1) as f64);
        let x = match side {
            Side::Left => a - w,
            Side::Right => a + w,
        };
        let y = f(x).abs();
        if y == 0.0 || !y.is_finite() {
            return Err(Error::domain(format!("f vanishes or is not finite at omega = {w:e}")));
        }
        pts.push((w.ln(), y.ln()));
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}
