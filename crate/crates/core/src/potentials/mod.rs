//! Exact polynomial potentials, Sturm root counting and critical points.

mod polynomial;
mod roots;
mod sturm;

pub use polynomial::Polynomial;
pub use roots::{complex_roots, saddle_points, ComplexSaddle, CriticalPoint, SaddleSet};
pub use sturm::{count_real_roots, sign_variations, sturm_chain};

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rising factorial `(q)_n = q (q+1) ... (q+n-1)`.
fn pochhammer(q: &Rational, n: u32) -> Rational {
    let mut acc = Rational::from(1);
    let mut f = q.clone();
    for _ in 0..n {
        acc *= &f;
        f += 1;
    }
    acc
}

fn factorial(n: u32) -> Integer {
    Integer::from(Integer::factorial(n))
}

/// The k-th multicritical potential, normalised so that at unit coupling
/// the equilibrium density lives on `[0, 1]` and vanishes as
/// `(1-x)^{2k+1/2}` at the upper edge.
pub fn multicritical_potential(k: i64) -> Result<Polynomial> {
    if k < 0 {
        return Err(Error::domain(format!("multicritical index k = {k} must be >= 0")));
    }
    let k = k as u32;
    let n = 2 * k + 2;
    let half = Rational::from((1, 2));
    let prefactor = Rational::from(2 * factorial(n)) / pochhammer(&Rational::from((-1, 2)), n);
    let mut coeffs = vec![Rational::new(); n as usize + 1];
    for l in 0..n {
        let num = pochhammer(&(Rational::from(l) + &half), n - 1 - l);
        let den = factorial(n - 1 - l) * Integer::from(l + 1);
        let mut c = num / Rational::from(den) * &prefactor;
        if l % 2 == 1 {
            c = -c;
        }
        coeffs[l as usize + 1] = c;
    }
    Ok(Polynomial::new(coeffs))
}

pub fn derivative(p: &Polynomial) -> Polynomial {
    p.derivative()
}

/// `x^2 / 2`.
pub fn gaussian_potential() -> Polynomial {
    Polynomial::from_ratios(&[(0, 1), (0, 1), (1, 2)])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "family")]
pub enum Family {
    Gaussian,
    Multicritical { k: u32 },
    Custom { coeffs: Polynomial },
}

/// A potential together with its coupling; the weight is `exp(-(N/t) V)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    #[serde(flatten)]
    pub family: Family,
    pub t: f64,
}

impl PotentialSpec {
    pub fn new(family: Family, t: f64) -> Result<Self> {
        let spec = PotentialSpec { family, t };
        spec.polynomial()?;
        Ok(spec)
    }

    pub fn gaussian(t: f64) -> Self {
        PotentialSpec { family: Family::Gaussian, t }
    }

    pub fn multicritical(k: u32, t: f64) -> Self {
        PotentialSpec { family: Family::Multicritical { k }, t }
    }

    /// Validates the spec and returns `V`.
    pub fn polynomial(&self) -> Result<Polynomial> {
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(Error::domain(format!("coupling t = {} must be positive", self.t)));
        }
        let v = match &self.family {
            Family::Gaussian => gaussian_potential(),
            Family::Multicritical { k } => multicritical_potential(*k as i64)?,
            Family::Custom { coeffs } => coeffs.clone(),
        };
        check_confining(&v)?;
        Ok(v)
    }

    pub fn label(&self) -> String {
        match &self.family {
            Family::Gaussian => "gaussian".into(),
            Family::Multicritical { k } => format!("multicritical(k={k})"),
            Family::Custom { coeffs } => format!("custom({coeffs})"),
        }
    }
}

/// Even degree at least two and positive leading coefficient.
pub fn check_confining(v: &Polynomial) -> Result<()> {
    match (v.degree(), v.leading()) {
        (Some(d), Some(l)) if d >= 2 && d % 2 == 0 && *l > 0 => Ok(()),
        _ => Err(Error::domain(format!(
            "potential {v} must have even degree >= 2 and positive leading coefficient"
        ))),
    }
}
