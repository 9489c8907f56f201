//! One-cut planar solution, spectral curve and instanton actions.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::planar::Planar;
use crate::potentials::{check_confining, saddle_points, Polynomial};
use crate::quadrature::gauss_kronrod;
use crate::rate_functions::{Method, Order, TailResult, TailTerm};
use crate::real::{horner, Mp128, Real};

/// Tolerances for the action quadrature.
pub const ACTION_EPSABS: f64 = 1e-12;
pub const ACTION_EPSREL: f64 = 1e-13;

/// Equilibrium measure on a single interval `[b, a]`:
/// `rho(x) = M(x) sqrt((x-b)(a-x)) / (2 pi t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneCutSolution {
    pub b: f64,
    pub a: f64,
    /// Coefficients of `M`, index = power.
    pub m: Vec<f64>,
    pub t: f64,
    pub v: Polynomial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActionKind {
    /// Eigenvalue pulled to the hard wall.
    Wall,
    /// Eigenvalue tunnelling to another critical point of the effective
    /// potential.
    Saddle,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectiveAction {
    pub action: f64,
    pub upper: f64,
    pub kind: ActionKind,
}

/// Value with a flag telling whether the argument was inside the domain
/// where the quantity is defined by its formula.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Flagged {
    pub value: f64,
    pub in_domain: bool,
}

impl OneCutSolution {
    pub fn center(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    pub fn radius(&self) -> f64 {
        0.5 * (self.a - self.b)
    }

    pub fn m_at(&self, x: f64) -> f64 {
        horner(&self.m, &x)
    }

    /// `M'(x)`.
    pub fn m_prime_at(&self, x: f64) -> f64 {
        let d: Vec<f64> = self.m.iter().enumerate().skip(1).map(|(i, c)| i as f64 * c).collect();
        horner(&d, &x)
    }

    pub fn dv_at(&self, x: f64) -> f64 {
        self.v.derivative().eval_f64(x)
    }
}

/// Solves the one-cut endpoint conditions for `V` at coupling `t`.
///
/// Newton runs in 128-bit arithmetic: at a multicritical point the
/// Jacobian is singular and double precision only resolves the endpoints
/// to about `eps^(1/3)`.
pub fn solve_one_cut(v: &Polynomial, t: f64) -> Result<OneCutSolution> {
    check_confining(v)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("coupling t = {t} must be positive")));
    }
    let planar = Planar::<Mp128>::new(v);
    let (c, r) = planar.solve(v, &Mp128::from_f64(t))?;
    let m: Vec<f64> = planar.m_coeffs(&c, &r).iter().map(Real::to_f64).collect();
    let sol = OneCutSolution {
        b: (c.clone() - r.clone()).to_f64(),
        a: (c + r).to_f64(),
        m,
        t,
        v: v.clone(),
    };
    check_one_cut(&sol)?;
    check_outer_wells(&sol)?;
    Ok(sol)
}

/// Rejects solutions leaving a well of `V` outside the support lower in
/// effective potential than the cut: eigenvalues would spill into it.
fn check_outer_wells(sol: &OneCutSolution) -> Result<()> {
    let margin = edge_margin(sol);
    for m in saddle_points(&sol.v)?.real_minima {
        if m.x > sol.b - margin && m.x < sol.a + margin {
            continue;
        }
        let h = heff(sol, m.x)?;
        if h < -1e-10 * (1.0 + m.value.abs()) {
            return Err(Error::OneCutViolated(format!(
                "effective potential {h:e} < 0 at the outer minimum x = {:.6}; a second cut would open",
                m.x
            )));
        }
    }
    Ok(())
}

/// Rejects solutions whose `M` turns negative inside the support.
fn check_one_cut(sol: &OneCutSolution) -> Result<()> {
    let n = 400;
    let scale = sol.m.iter().map(|c| c.abs()).fold(0.0, f64::max)
        * (1.0 + sol.a.abs().max(sol.b.abs())).powi(sol.m.len() as i32);
    for j in 0..n {
        let u = ((2 * j + 1) as f64 * PI / (2 * n) as f64).cos();
        let x = sol.center() + sol.radius() * u;
        let mx = sol.m_at(x);
        if mx < -1e-9 * scale {
            return Err(Error::OneCutViolated(format!(
                "M({x:.6}) = {mx:e} < 0 inside [{:.6}, {:.6}]",
                sol.b, sol.a
            )));
        }
    }
    Ok(())
}

/// Equilibrium density; zero (flagged) outside the support.
pub fn density(sol: &OneCutSolution, x: f64) -> Flagged {
    if x < sol.b || x > sol.a {
        return Flagged { value: 0.0, in_domain: false };
    }
    let v = sol.m_at(x) * ((x - sol.b) * (sol.a - x)).sqrt() / (2.0 * PI * sol.t);
    Flagged { value: v.max(0.0), in_domain: true }
}

/// `y(x) = M(x) sqrt((x-b)(x-a))` for `x >= a`.
pub fn y_curve(sol: &OneCutSolution, x: f64) -> Result<f64> {
    if x < sol.a {
        return Err(Error::domain(format!("y(x) needs x >= a = {}, got {x}", sol.a)));
    }
    Ok(sol.m_at(x) * ((x - sol.b) * (x - sol.a)).sqrt())
}

/// Real part of `y` on the physical sheet: zero on the cut, negative
/// branch left of it.
pub fn y_real(sol: &OneCutSolution, x: f64) -> f64 {
    if x >= sol.a {
        sol.m_at(x) * ((x - sol.b) * (x - sol.a)).sqrt()
    } else if x <= sol.b {
        -sol.m_at(x) * ((sol.b - x) * (sol.a - x)).sqrt()
    } else {
        0.0
    }
}

fn action_integral(sol: &OneCutSolution, upper: f64) -> Result<f64> {
    let (a, b) = (sol.a, sol.b);
    let umax = (upper - a).max(0.0).sqrt();
    let f = |u: f64| {
        let x = a + u * u;
        2.0 * u * u * sol.m_at(x) * (x - b).sqrt()
    };
    Ok(gauss_kronrod(f, 0.0, umax, ACTION_EPSABS, ACTION_EPSREL)?.value)
}

/// `A = int_a^upper y(x) dx`, using `x = a + u^2` to remove the square
/// root at the edge.
pub fn instanton_action(sol: &OneCutSolution, upper: f64) -> Result<EffectiveAction> {
    if upper < sol.a {
        return Err(Error::domain(format!("action upper limit {upper} below edge a = {}", sol.a)));
    }
    Ok(EffectiveAction { action: action_integral(sol, upper)?, upper, kind: ActionKind::Wall })
}

/// Action for tunnelling to a critical point `xp > a` of the effective
/// potential; equals half the B-cycle period of `y dx`.
pub fn saddle_action(sol: &OneCutSolution, xp: f64) -> Result<EffectiveAction> {
    let mut e = instanton_action(sol, xp)?;
    e.kind = ActionKind::Saddle;
    Ok(e)
}

/// Real part of `V_h,eff(x) - V_h,eff(a)`.
pub fn heff(sol: &OneCutSolution, x: f64) -> Result<f64> {
    if x >= sol.a {
        action_integral(sol, x)
    } else if x >= sol.b {
        Ok(0.0)
    } else {
        let (a, b) = (sol.a, sol.b);
        let f = |u: f64| {
            let s = b - u * u;
            2.0 * u * u * sol.m_at(s) * (a - s).sqrt()
        };
        Ok(gauss_kronrod(f, 0.0, (b - x).sqrt(), ACTION_EPSABS, ACTION_EPSREL)?.value)
    }
}

/// Edge guard used by the right-tail prefactor.
pub fn edge_margin(sol: &OneCutSolution) -> f64 {
    1e-6 * (sol.a - sol.b)
}

/// Hard-wall prefactor `g_s (a-b) / (8 pi y(z) (z-a)(z-b))`.
pub fn wall_prefactor(sol: &OneCutSolution, z: f64, n: usize) -> Result<f64> {
    let delta = edge_margin(sol);
    if z <= sol.a + delta {
        return Err(Error::NearEdge { gap: z - sol.a, threshold: delta });
    }
    let gs = sol.t / n as f64;
    let y = y_curve(sol, z)?;
    Ok(gs * (sol.a - sol.b) / (8.0 * PI * y * (z - sol.a) * (z - sol.b)))
}

/// Leading right-tail log gap probability,
/// `-prefactor * exp(-A(z) / g_s)`, with `g_s = t / N`.
pub fn right_tail_log_prob(sol: &OneCutSolution, z: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("N must be >= 1"));
    }
    let pre = wall_prefactor(sol, z, n)?;
    let gs = sol.t / n as f64;
    let a = instanton_action(sol, z)?.action;
    Ok(-pre * (-a / gs).exp())
}

/// Critical points of `V_h,eff` to the right of the cut that are local
/// minima (`M(x) = 0`, `M'(x) > 0`).
pub fn heff_minima(sol: &OneCutSolution) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    let saddles = saddle_points(&sol.v)?;
    for m in saddles.real_minima.iter().filter(|m| m.x > sol.a) {
        // Newton on M from the matching minimum of V
        let mut x = m.x;
        for _ in 0..100 {
            let d = sol.m_prime_at(x);
            if d == 0.0 {
                break;
            }
            let step = sol.m_at(x) / d;
            x -= step;
            if step.abs() < 1e-15 * (1.0 + x.abs()) {
                break;
            }
        }
        if x > sol.a && sol.m_at(x).abs() < 1e-9 * (1.0 + sol.m_prime_at(x).abs()) && sol.m_prime_at(x) > 0.0 {
            out.push(x);
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|p, q| (*p - *q).abs() < 1e-9);
    Ok(out)
}

/// Right tail including tunnelling into wells right of the wall: the
/// wall term plus one saddle term per minimum `x_p > z` of the effective
/// potential. The dominant (largest magnitude) term is returned as the
/// value; all terms are listed.
pub fn right_tail_with_landscape(v: &Polynomial, t: f64, z: f64, n: usize) -> Result<TailResult> {
    let sol = solve_one_cut(v, t)?;
    let gs = t / n as f64;
    let wall = instanton_action(&sol, z)?;
    let mut terms = vec![TailTerm {
        kind: ActionKind::Wall,
        location: z,
        action: wall.action,
        log_p: right_tail_log_prob(&sol, z, n)?,
    }];
    for xp in heff_minima(&sol)?.into_iter().filter(|&x| x > z) {
        let act = saddle_action(&sol, xp)?.action;
        let y1 = sol.m_prime_at(xp) * ((xp - sol.a) * (xp - sol.b)).sqrt();
        let phi1_g1 = ((sol.a - sol.b) / 4.0).ln() - ((xp - sol.a) * (xp - sol.b)).ln();
        let f1 = (gs / (2.0 * PI * y1)).sqrt() * (phi1_g1 - act / gs).exp();
        terms.push(TailTerm { kind: ActionKind::Saddle, location: xp, action: act, log_p: -f1 });
    }
    let dominant = terms
        .iter()
        .max_by(|p, q| p.log_p.abs().total_cmp(&q.log_p.abs()))
        .expect("wall term present")
        .log_p;
    Ok(TailResult { value: dominant, method: Method::SpectralCurve, order: Order::LeadingN, terms })
}

/// `int rho` over the support.
pub fn normalization(sol: &OneCutSolution) -> Result<f64> {
    let (c, r) = (sol.center(), sol.radius());
    let f = |th: f64| {
        let s = th.sin();
        sol.m_at(c + r * th.cos()) * r * r * s * s
    };
    Ok(gauss_kronrod(f, 0.0, PI, 1e-14, 1e-14)?.value / (2.0 * PI * sol.t))
}

/// Resolvent `omega(x) = int rho(s) / (x - s) ds` for `x > a`.
pub fn resolvent(sol: &OneCutSolution, x: f64) -> Result<f64> {
    if x <= sol.a {
        return Err(Error::domain("resolvent evaluated on or inside the cut"));
    }
    let (c, r) = (sol.center(), sol.radius());
    let f = |th: f64| {
        let s = c + r * th.cos();
        let sn = th.sin();
        sol.m_at(s) * r * r * sn * sn / (x - s)
    };
    Ok(gauss_kronrod(f, 0.0, PI, 1e-14, 1e-14)?.value / (2.0 * PI * sol.t))
}

/// Residual of the saddle-point equation `V'(x)/2 = t p.v. int rho(s)/(x-s)`
/// at an interior point.
pub fn saddle_equation_residual(sol: &OneCutSolution, x: f64) -> Result<f64> {
    if !(x > sol.b && x < sol.a) {
        return Err(Error::domain("principal value needs b < x < a"));
    }
    let (c, r) = (sol.center(), sol.radius());
    let rho = |s: f64| density(sol, s).value;
    let rx = rho(x);
    let f = |th: f64| {
        let s = c + r * th.cos();
        let d = x - s;
        if d == 0.0 {
            0.0
        } else {
            (rho(s) - rx) / d * r * th.sin()
        }
    };
    let smooth = gauss_kronrod(f, 0.0, PI, 1e-13, 1e-13)?.value;
    let pv = smooth + rx * ((x - sol.b) / (sol.a - x)).ln();
    Ok(0.5 * sol.dv_at(x) - sol.t * pv)
}
