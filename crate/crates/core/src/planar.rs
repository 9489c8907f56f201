//! Planar (large-N) equilibrium problems, generic over the scalar type.
//!
//! A one-cut support `[c - r, c + r]` is parametrised by its centre and
//! radius; all moment conditions are averages over the arcsine law
//! `u = cos(theta)`, evaluated exactly with Chebyshev points.
//!
//! Unconstrained solution at coupling `t`:
//!   `<V'(c + r u)> = 0`,  `r <u V'(c + r u)> = 2t`.
//! Hard wall at `z` with soft edge `bt` (`c = (z+bt)/2`, `r = (z-bt)/2`):
//!   `r <V'(c + r u)(1 - u)> + 2 zeta = 0`.

use crate::error::{Error, Result};
use crate::potentials::{saddle_points, Polynomial};
use crate::quadrature::chebyshev_nodes;
use crate::real::{horner, Real};

/// Averages of `V'` and `V''` at `x = c + r u` weighted by powers of `u`.
#[derive(Clone, Debug)]
pub(crate) struct Moments<R> {
    pub dv: R,
    pub u_dv: R,
    pub d2v: R,
    pub u_d2v: R,
    pub u2_d2v: R,
}

#[derive(Clone, Debug)]
pub(crate) struct Planar<R> {
    dv: Vec<R>,
    d2v: Vec<R>,
    nodes: Vec<R>,
}

/// Point on the unconstrained edge curve: at coupling `zeta` the upper
/// edge equals `a`.
#[derive(Clone, Debug)]
pub(crate) struct EdgePoint<R> {
    pub c: R,
    pub r: R,
    pub zeta: R,
    /// `d zeta / d a`.
    pub dzeta_da: R,
}

/// Acceptance bound for solver residuals: `1e-12`, tightened to
/// `eps^(3/4)` in extended precision.
pub(crate) fn residual_bound<R: Real>() -> R {
    let e = R::epsilon();
    R::from_f64(1e-12).min(e.sqrt() * e.sqrt().sqrt())
}

impl<R: Real> Planar<R> {
    pub fn new(v: &Polynomial) -> Self {
        let dv = v.derivative();
        let n = v.degree().unwrap_or(0) + 2;
        Planar { dv: dv.to_real(), d2v: dv.derivative().to_real(), nodes: chebyshev_nodes(n) }
    }

    fn inv_n(&self) -> R {
        R::one() / R::from_usize(self.nodes.len())
    }

    pub fn moments(&self, c: &R, r: &R) -> Moments<R> {
        let mut m = Moments { dv: R::zero(), u_dv: R::zero(), d2v: R::zero(), u_d2v: R::zero(), u2_d2v: R::zero() };
        for u in &self.nodes {
            let x = c.clone() + r.clone() * u.clone();
            let f1 = horner(&self.dv, &x);
            let f2 = horner(&self.d2v, &x);
            m.u_dv += u.clone() * f1.clone();
            m.dv += f1;
            m.u_d2v += u.clone() * f2.clone();
            m.u2_d2v += u.clone() * u.clone() * f2.clone();
            m.d2v += f2;
        }
        let k = self.inv_n();
        Moments {
            dv: m.dv * k.clone(),
            u_dv: m.u_dv * k.clone(),
            d2v: m.d2v * k.clone(),
            u_d2v: m.u_d2v * k.clone(),
            u2_d2v: m.u2_d2v * k,
        }
    }

    /// Residuals of the two unconstrained endpoint conditions.
    pub fn residuals(&self, t: &R, c: &R, r: &R) -> (R, R) {
        let m = self.moments(c, r);
        (m.dv, r.clone() * m.u_dv - R::from_f64(2.0) * t.clone())
    }

    /// Damped Newton for `(c, r)` at coupling `t`.
    pub fn unconstrained(&self, t: &R, c0: R, r0: R) -> Result<(R, R)> {
        let two = R::from_f64(2.0);
        let (mut c, mut r) = (c0, r0);
        let tol = R::epsilon() * R::from_f64(64.0);
        let norm = |e: &(R, R)| e.0.abs().max(e.1.abs());
        let mut res = self.residuals(t, &c, &r);
        for _ in 0..400 {
            let m = self.moments(&c, &r);
            let (j11, j12) = (m.d2v.clone(), m.u_d2v.clone());
            let (j21, j22) = (r.clone() * m.u_d2v.clone(), m.u_dv.clone() + r.clone() * m.u2_d2v.clone());
            let det = j11.clone() * j22.clone() - j12.clone() * j21.clone();
            if det.abs() == R::zero() || !det.is_finite() {
                return Err(Error::NewtonDiverged(format!("singular Jacobian at c = {:?}", c.to_f64())));
            }
            let dc = (j22 * res.0.clone() - j12 * res.1.clone()) / det.clone();
            let dr = (j11 * res.1.clone() - j21 * res.0.clone()) / det;
            let mut lambda = R::one();
            let old = norm(&res);
            let mut accepted = false;
            for _ in 0..40 {
                let cn = c.clone() - lambda.clone() * dc.clone();
                let rn = r.clone() - lambda.clone() * dr.clone();
                if rn > R::zero() {
                    let rs = self.residuals(t, &cn, &rn);
                    if norm(&rs) < old || norm(&rs) <= tol.clone() * (R::one() + t.clone()) {
                        c = cn;
                        r = rn;
                        res = rs;
                        accepted = true;
                        break;
                    }
                }
                lambda /= two.clone();
            }
            let step = (dc.abs() + dr.abs()) * lambda;
            if !accepted || step <= tol.clone() * (R::one() + c.abs() + r.abs()) {
                break;
            }
        }
        if !(norm(&res) <= residual_bound::<R>() * (R::one() + t.clone())) {
            return Err(Error::NewtonDiverged(format!(
                "endpoint residual {:e} at t = {}",
                norm(&res).to_f64(),
                t.to_f64()
            )));
        }
        Ok((c, r))
    }

    /// Solves the unconstrained problem starting from the local quadratic
    /// approximation, falling back to continuation in `t`.
    pub fn solve(&self, v: &Polynomial, t: &R) -> Result<(R, R)> {
        let saddles = saddle_points(v)?;
        let xmin = saddles
            .global_minimum()
            .ok_or_else(|| Error::domain("potential has no real minimum"))?
            .x;
        let curvature = |x: f64| horner(&self.d2v, &R::from_f64(x)).to_f64();
        let mean = saddles.real_minima.iter().map(|m| m.x).sum::<f64>() / saddles.real_minima.len() as f64;
        let spread = saddles
            .real_minima
            .iter()
            .map(|m| (m.x - mean).abs())
            .fold(0.0, f64::max);
        let quad_r = |t: f64, x: f64| 2.0 * (t / curvature(x).max(1e-300)).sqrt();
        let tf = t.to_f64();
        let first = self.unconstrained(t, R::from_f64(mean), R::from_f64(spread + quad_r(tf, xmin)));
        if let Ok((c, r)) = &first {
            if self.m_nonnegative(c, r) {
                return first;
            }
        }
        let steps = 10;
        let t0 = 1e-3 * tf;
        let mut c = R::from_f64(xmin);
        let mut r = R::from_f64(quad_r(t0, xmin));
        for k in 0..=steps {
            let tk = if k == steps {
                t.clone()
            } else {
                R::from_f64(t0 * (tf / t0).powf(k as f64 / steps as f64))
            };
            let (cn, rn) = self.unconstrained(&tk, c, r)?;
            c = cn;
            r = rn;
        }
        Ok((c, r))
    }

    /// Whether `M` stays (numerically) non-negative on `[c - r, c + r]`.
    /// A solve from the wide initial guess can land on a support whose
    /// density would be negative somewhere.
    fn m_nonnegative(&self, c: &R, r: &R) -> bool {
        let m: Vec<f64> = self.m_coeffs(c, r).iter().map(Real::to_f64).collect();
        let (c, r) = (c.to_f64(), r.to_f64());
        let scale = m.iter().map(|x| x.abs()).fold(0.0, f64::max) * (1.0 + c.abs() + r).powi(m.len() as i32);
        (0..=200).all(|j| horner(&m, &(c + r * (std::f64::consts::PI * j as f64 / 200.0).cos())) >= -1e-9 * scale)
    }

    /// Coefficients of `M(x) = <(V'(x) - V'(s)) / (x - s)>` over the
    /// arcsine law on `[c - r, c + r]`.
    pub fn m_coeffs(&self, c: &R, r: &R) -> Vec<R> {
        let deg = self.dv.len();
        // arcsine moments of s = c + r u
        let mut mu = vec![R::zero(); deg.max(1)];
        for u in &self.nodes {
            let s = c.clone() + r.clone() * u.clone();
            let mut p = R::one();
            for m in mu.iter_mut() {
                *m += p.clone();
                p *= s.clone();
            }
        }
        let k = self.inv_n();
        for m in mu.iter_mut() {
            *m = m.clone() * k.clone();
        }
        let mut out = vec![R::zero(); deg.saturating_sub(1)];
        for (j, o) in out.iter_mut().enumerate() {
            for kk in (j + 1)..deg {
                *o += self.dv[kk].clone() * mu[kk - 1 - j].clone();
            }
        }
        out
    }

    /// At fixed upper edge `a`, finds the centre `c` solving the first
    /// endpoint condition with `r = a - c`, and the coupling at which this
    /// is the unconstrained solution.
    pub fn edge_point(&self, a: &R, c0: R) -> Result<EdgePoint<R>> {
        let two = R::from_f64(2.0);
        let tol = R::epsilon() * R::from_f64(64.0);
        let mut c = c0;
        for it in 0..100 {
            let r = a.clone() - c.clone();
            let m = self.moments(&c, &r);
            let d = m.d2v.clone() - m.u_d2v.clone();
            if d.abs() == R::zero() {
                return Err(Error::NewtonDiverged("degenerate edge equation".into()));
            }
            let step = m.dv.clone() / d;
            c -= step.clone();
            if step.abs() <= tol.clone() * (R::one() + c.abs()) {
                break;
            }
            if it == 99 {
                return Err(Error::NewtonDiverged(format!("edge solve at a = {}", a.to_f64())));
            }
        }
        let r = a.clone() - c.clone();
        let m = self.moments(&c, &r);
        let zeta = r.clone() * m.u_dv.clone() / two.clone();
        let dc = -m.u_d2v.clone() / (m.d2v.clone() - m.u_d2v.clone());
        let dr = R::one() - dc.clone();
        // d/da [ r <u V'(c + r u)> / 2 ]
        let dzeta_da = (dr.clone() * m.u_dv + r.clone() * (dc * m.u_d2v + dr * m.u2_d2v)) / two;
        Ok(EdgePoint { c, r, zeta, dzeta_da })
    }

    /// Residual and derivative of the hard-wall condition in the soft edge.
    fn wall_equation(&self, zeta: &R, z: &R, bt: &R) -> (R, R) {
        let two = R::from_f64(2.0);
        let c = (z.clone() + bt.clone()) / two.clone();
        let r = (z.clone() - bt.clone()) / two.clone();
        let (mut f, mut f2) = (R::zero(), R::zero());
        for u in &self.nodes {
            let x = c.clone() + r.clone() * u.clone();
            let w = R::one() - u.clone();
            f += horner(&self.dv, &x) * w.clone();
            f2 += horner(&self.d2v, &x) * w.clone() * w;
        }
        let k = self.inv_n();
        let f = f * k.clone();
        let f2 = f2 * k;
        let g = r.clone() * f.clone() + two.clone() * zeta.clone();
        let dg = -f / two.clone() + r * f2 / two;
        (g, dg)
    }

    /// Soft edge of the hard-wall-constrained solution at coupling `zeta`.
    pub fn constrained(&self, zeta: &R, z: &R, b0: R) -> Result<R> {
        let two = R::from_f64(2.0);
        let tol = R::epsilon() * R::from_f64(64.0);
        let mut b = b0;
        let (mut g, _) = self.wall_equation(zeta, z, &b);
        for _ in 0..200 {
            let (_, dg) = self.wall_equation(zeta, z, &b);
            if dg.abs() == R::zero() {
                break;
            }
            let step = g.clone() / dg;
            let mut lambda = R::one();
            let mut moved = false;
            for _ in 0..40 {
                let bn = b.clone() - lambda.clone() * step.clone();
                if bn < *z {
                    let (gn, _) = self.wall_equation(zeta, z, &bn);
                    if gn.abs() < g.abs() || gn.abs() <= tol.clone() {
                        b = bn;
                        g = gn;
                        moved = true;
                        break;
                    }
                }
                lambda /= two.clone();
            }
            if !moved || (step.abs() * lambda) <= tol.clone() * (R::one() + b.abs()) {
                break;
            }
        }
        if !(g.abs() <= residual_bound::<R>() * (R::one() + zeta.abs())) {
            return Err(Error::ConstrainedSolver {
                zeta: zeta.to_f64(),
                reason: format!("wall residual {:e}", g.to_f64()),
            });
        }
        Ok(b)
    }
}
