use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{count_real_roots, Polynomial};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub x: f64,
    /// `V(x)`.
    pub value: f64,
    /// Multiplicity as a root of `V'`.
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexSaddle {
    /// Root of `V'` with positive imaginary part; its conjugate is implied.
    pub z: (f64, f64),
    pub multiplicity: usize,
}

/// Critical points of a potential.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SaddleSet {
    pub real_minima: Vec<CriticalPoint>,
    pub real_maxima: Vec<CriticalPoint>,
    /// Real critical points of even multiplicity (no sign change of `V'`).
    pub inflections: Vec<CriticalPoint>,
    pub complex_saddles: Vec<ComplexSaddle>,
}

impl SaddleSet {
    /// Number of roots of `V'` with multiplicity, conjugates included.
    pub fn root_count(&self) -> usize {
        let real: usize = self
            .real_minima
            .iter()
            .chain(&self.real_maxima)
            .chain(&self.inflections)
            .map(|c| c.multiplicity)
            .sum();
        real + 2 * self.complex_saddles.iter().map(|c| c.multiplicity).sum::<usize>()
    }

    pub fn real_count(&self) -> usize {
        self.real_minima.len() + self.real_maxima.len() + self.inflections.len()
    }

    /// Location of the lowest real minimum.
    pub fn global_minimum(&self) -> Option<&CriticalPoint> {
        self.real_minima
            .iter()
            .min_by(|a, b| a.value.total_cmp(&b.value))
    }
}

fn eval_c(a: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in a.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Aberth–Ehrlich simultaneous iteration for the roots of a polynomial
/// with double-precision coefficients (`a[i]` multiplies `x^i`).
fn aberth(a: &[f64]) -> Result<Vec<Complex64>> {
    let n = a.len() - 1;
    let lead = a[n];
    if n == 1 {
        return Ok(vec![Complex64::new(-a[0] / lead, 0.0)]);
    }
    let center = -a[n - 1] / (n as f64 * lead);
    let radius = (1..=n)
        .map(|i| (a[n - i] / lead).abs().powf(1.0 / i as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::new(center, 0.0) + Complex64::from_polar(radius, th)
        })
        .collect();
    for _ in 0..2000 {
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = eval_c(a, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            z[i] -= w;
            worst = worst.max(w.norm() / (1.0 + z[i].norm()));
        }
        if worst < 1e-16 {
            break;
        }
    }
    for r in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = eval_c(a, *r);
            if dp.norm() > 0.0 {
                *r -= p / dp;
            }
        }
    }
    if z.iter().any(|r| !r.re.is_finite() || !r.im.is_finite()) {
        return Err(Error::RootFinder { residual: f64::INFINITY });
    }
    Ok(z)
}

/// All complex roots of each square-free factor, tagged with multiplicity.
/// Real roots (as certified by a Sturm count) have their imaginary part
/// set to exactly zero.
fn factored_roots(p: &Polynomial) -> Result<Vec<(Complex64, usize)>> {
    let mut out = Vec::new();
    for (f, mult) in p.squarefree_factors() {
        let a = f.to_f64_coeffs();
        let mut roots = aberth(&a)?;
        let nreal = count_real_roots(&f, None)?;
        roots.sort_by(|x, y| x.im.abs().total_cmp(&y.im.abs()));
        for r in roots.iter_mut().take(nreal) {
            *r = Complex64::new(polish_real(&a, r.re), 0.0);
        }
        out.extend(roots.into_iter().map(|r| (r, mult)));
    }
    Ok(out)
}

fn polish_real(a: &[f64], mut x: f64) -> f64 {
    for _ in 0..8 {
        let (p, dp) = eval_c(a, Complex64::new(x, 0.0));
        if dp.re == 0.0 {
            break;
        }
        let step = p.re / dp.re;
        x -= step;
        if step.abs() <= 1e-17 * (1.0 + x.abs()) {
            break;
        }
    }
    x
}

/// Complex roots of `p` with multiplicity (each root repeated).
pub fn complex_roots(p: &Polynomial) -> Result<Vec<Complex64>> {
    Ok(factored_roots(p)?
        .into_iter()
        .flat_map(|(r, m)| std::iter::repeat_n(r, m))
        .collect())
}

/// Finds and classifies every critical point of `v`.
pub fn saddle_points(v: &Polynomial) -> Result<SaddleSet> {
    let deg = v.degree().unwrap_or(0);
    if deg < 2 {
        return Err(Error::domain("saddle points need deg V >= 2"));
    }
    let dv = v.derivative();
    let scale = dv.max_abs_coeff();
    let roots = factored_roots(&dv)?;

    let dv64 = dv.to_f64_coeffs();
    for (r, _) in &roots {
        let res = eval_c(&dv64, *r).0.norm();
        let tol = 1e-12 * (1.0 + r.norm().powi(deg as i32 - 1)) * scale;
        if res > tol {
            return Err(Error::RootFinder { residual: res });
        }
    }

    let mut set = SaddleSet::default();
    let mut derivs = vec![v.clone(), dv.clone()];
    while derivs.len() <= deg {
        let next = derivs.last().unwrap().derivative();
        derivs.push(next);
    }
    for (r, m) in roots {
        if r.im != 0.0 {
            if r.im > 0.0 {
                set.complex_saddles.push(ComplexSaddle { z: (r.re, r.im), multiplicity: m });
            }
            continue;
        }
        let cp = CriticalPoint { x: r.re, value: v.eval_f64(r.re), multiplicity: m };
        if m % 2 == 0 {
            set.inflections.push(cp);
        } else if derivs[m + 1].eval_f64(r.re) > 0.0 {
            set.real_minima.push(cp);
        } else {
            set.real_maxima.push(cp);
        }
    }
    for list in [&mut set.real_minima, &mut set.real_maxima, &mut set.inflections] {
        list.sort_by(|a, b| a.x.total_cmp(&b.x));
    }
    set.complex_saddles
        .sort_by(|a, b| a.z.0.total_cmp(&b.z.0).then(a.z.1.total_cmp(&b.z.1)));

    let sturm = count_real_roots(&dv, None)?;
    if sturm != set.real_count() {
        return Err(Error::RootFinder { residual: f64::NAN });
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{gaussian_potential, multicritical_potential};

    #[test]
    fn gaussian_single_minimum() {
        let s = saddle_points(&gaussian_potential()).unwrap();
        assert_eq!(s.real_minima.len(), 1);
        assert_eq!(s.real_minima[0].x, 0.0);
        assert!(s.real_maxima.is_empty() && s.complex_saddles.is_empty());
    }

    #[test]
    fn v1_one_minimum_and_a_conjugate_pair() {
        let s = saddle_points(&multicritical_potential(1).unwrap()).unwrap();
        assert_eq!(s.real_minima.len(), 1);
        assert!((s.real_minima[0].x - 0.231_513_115_951_884_9).abs() < 1e-13);
        assert_eq!(s.complex_saddles.len(), 1);
        assert_eq!(s.root_count(), 3);
    }

    #[test]
    fn double_well() {
        // x^4/4 - x^2/2: minima at -1, 1, maximum at 0
        let v = Polynomial::from_ratios(&[(0, 1), (0, 1), (-1, 2), (0, 1), (1, 4)]);
        let s = saddle_points(&v).unwrap();
        let xs: Vec<f64> = s.real_minima.iter().map(|c| c.x).collect();
        assert!((xs[0] + 1.0).abs() < 1e-14 && (xs[1] - 1.0).abs() < 1e-14);
        assert_eq!(s.real_maxima.len(), 1);
    }

    #[test]
    fn degenerate_critical_points() {
        // V = x^4: triple root of V' at 0, a minimum
        let s = saddle_points(&Polynomial::from_ints(&[0, 0, 0, 0, 1])).unwrap();
        assert_eq!(s.real_minima.len(), 1);
        assert_eq!(s.real_minima[0].multiplicity, 3);
        // V = x^6/6 - x^3/3 + ... has V' = x^2 (x^3 - 1): inflection at 0
        let v = Polynomial::from_ratios(&[(0, 1), (0, 1), (0, 1), (-1, 3), (0, 1), (0, 1), (1, 6)]);
        let s = saddle_points(&v).unwrap();
        assert_eq!(s.inflections.len(), 1);
        assert_eq!(s.real_minima.len(), 1);
        assert_eq!(s.root_count(), 5);
    }

    #[test]
    fn roots_of_a_quintic() {
        let p = Polynomial::from_ints(&[-6, 11, -6, 1]); // (x-1)(x-2)(x-3)
        let mut r: Vec<f64> = complex_roots(&p).unwrap().iter().map(|z| z.re).collect();
        r.sort_by(f64::total_cmp);
        for (got, want) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-13);
        }
    }
}
