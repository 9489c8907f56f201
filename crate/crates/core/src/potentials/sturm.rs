use std::cmp::Ordering;

use rug::Rational;

use super::Polynomial;
use crate::error::{Error, Result};

/// Sturm sequence `p, p', -rem(p, p'), ...`, ending with the zero
/// polynomial. Everything is exact.
pub fn sturm_chain(p: &Polynomial) -> Result<Vec<Polynomial>> {
    if p.is_zero() {
        return Err(Error::domain("Sturm chain of the zero polynomial"));
    }
    let mut chain = vec![p.clone(), p.derivative()];
    while !chain.last().unwrap().is_zero() {
        let n = chain.len();
        let r = chain[n - 2].rem(&chain[n - 1])?;
        chain.push(-&r);
    }
    Ok(chain)
}

fn count_changes(signs: impl Iterator<Item = Ordering>) -> usize {
    let mut prev = Ordering::Equal;
    let mut changes = 0;
    for s in signs.filter(|s| *s != Ordering::Equal) {
        if prev != Ordering::Equal && s != prev {
            changes += 1;
        }
        prev = s;
    }
    changes
}

/// Sign variations of the chain at `x`; `None` means `+inf` and `-inf` is
/// obtained from `at_neg_inf`.
pub fn sign_variations(chain: &[Polynomial], x: Option<&Rational>, at_neg_inf: bool) -> usize {
    let zero = Rational::new();
    count_changes(chain.iter().filter(|q| !q.is_zero()).map(|q| match x {
        Some(x) => q.eval(x).cmp(&zero),
        None => {
            let lead = q.leading().unwrap().cmp(&zero);
            if at_neg_inf && q.degree().unwrap() % 2 == 1 {
                lead.reverse()
            } else {
                lead
            }
        }
    }))
}

/// Number of distinct real roots of `p`, on the whole line or in the open
/// interval `(lo, hi)`. Multiple roots are counted once.
///
/// Refuses intervals whose endpoints are roots: the caller should perturb.
pub fn count_real_roots(p: &Polynomial, interval: Option<(&Rational, &Rational)>) -> Result<usize> {
    let chain = sturm_chain(p)?;
    match interval {
        None => Ok(sign_variations(&chain, None, true) - sign_variations(&chain, None, false)),
        Some((lo, hi)) => {
            if lo >= hi {
                return Err(Error::domain(format!("empty interval ({lo}, {hi})")));
            }
            for e in [lo, hi] {
                if p.eval(e) == 0 {
                    return Err(Error::EndpointIsRoot(e.to_string()));
                }
            }
            Ok(sign_variations(&chain, Some(lo), false) - sign_variations(&chain, Some(hi), false))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::multicritical_potential;

    #[test]
    fn chain_of_x() {
        let c = sturm_chain(&Polynomial::x()).unwrap();
        assert_eq!(c, vec![Polynomial::x(), Polynomial::from_ints(&[1]), Polynomial::zero()]);
    }

    #[test]
    fn v1_prime_chain() {
        let dv = multicritical_potential(1).unwrap().derivative();
        let c = sturm_chain(&dv).unwrap();
        assert_eq!(c.len(), 5);
        assert!(c[4].is_zero());
        assert_eq!(c[3], Polynomial::constant(Rational::from((-288, 5))));
    }

    #[test]
    fn simple_counts() {
        assert_eq!(count_real_roots(&Polynomial::from_ints(&[1, 0, 1]), None).unwrap(), 0);
        assert_eq!(count_real_roots(&Polynomial::from_ints(&[-1, 0, 1]), None).unwrap(), 2);
        // (x-1)^2 (x+1): distinct roots only
        let p = Polynomial::from_ints(&[1, -1, -1, 1]);
        assert_eq!(count_real_roots(&p, None).unwrap(), 2);
    }

    #[test]
    fn interval_counts_and_endpoint_refusal() {
        let p = Polynomial::from_ints(&[-1, 0, 1]);
        let q = |n: i64, d: i64| Rational::from((n, d));
        assert_eq!(count_real_roots(&p, Some((&q(0, 1), &q(2, 1)))).unwrap(), 1);
        assert_eq!(count_real_roots(&p, Some((&q(-3, 1), &q(3, 1)))).unwrap(), 2);
        assert!(matches!(
            count_real_roots(&p, Some((&q(1, 1), &q(2, 1)))),
            Err(Error::EndpointIsRoot(_))
        ));
    }
}
