//! Grid specifications `lo:hi:count[:log]`.

use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub log: bool,
}

impl Grid {
    /// Points in ascending order.
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        let n = (self.count - 1) as f64;
        let mut v: Vec<f64> = (0..self.count)
            .map(|i| {
                let s = i as f64 / n;
                if self.log {
                    (self.lo.ln() + s * (self.hi.ln() - self.lo.ln())).exp()
                } else {
                    self.lo + s * (self.hi - self.lo)
                }
            })
            .collect();
        v.sort_by(f64::total_cmp);
        v
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(format!("grid '{s}' must look like lo:hi:count or lo:hi:count:log"));
        }
        let num = |p: &str| p.trim().parse::<f64>().map_err(|_| format!("grid '{s}': '{p}' is not a number"));
        let (lo, hi) = (num(parts[0])?, num(parts[1])?);
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| format!("grid '{s}': count '{}' is not a positive integer", parts[2]))?;
        let log = match parts.get(3).map(|p| p.trim()) {
            None => false,
            Some("log") => true,
            Some(other) => return Err(format!("grid '{s}': unknown flag '{other}' (only 'log')")),
        };
        if count == 0 || !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(format!("grid '{s}': need finite lo <= hi and count >= 1"));
        }
        if count > 1 && lo == hi {
            return Err(format!("grid '{s}': lo == hi with count > 1"));
        }
        if log && lo <= 0.0 {
            return Err(format!("grid '{s}': log spacing needs lo > 0"));
        }
        Ok(Grid { lo, hi, count, log })
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.count)?;
        if self.log {
            write!(f, ":log")?;
        }
        Ok(())
    }
}
