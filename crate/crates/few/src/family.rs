//! State specifications accepted on the command line.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use few_core::states::{bell_state, ghz_w_mixture, two_qutrit_alpha, werner};
use few_core::DensityMatrix;

use crate::error::{Error, Result};
use crate::json::load_density;

/// One-parameter state families that can be swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Werner state of fidelity `F` with the Bell state.
    Werner,
    /// `q |GHZ><GHZ| + (1 - q) |W><W|`.
    GhzW,
    /// Two-qutrit family of parameter `alpha`.
    Qutrit,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Werner => "werner",
            Family::GhzW => "ghzw",
            Family::Qutrit => "qutrit",
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        match self {
            Family::Werner | Family::GhzW => (0.0, 1.0),
            Family::Qutrit => (2.0, 5.0),
        }
    }

    pub fn check(&self, p: f64) -> Result<()> {
        let (lo, hi) = self.domain();
        if !(lo..=hi).contains(&p) {
            return Err(Error::Invalid(format!("{} parameter {p} outside [{lo}, {hi}]", self.name())));
        }
        Ok(())
    }

    pub fn state(&self, p: f64) -> Result<DensityMatrix> {
        self.check(p)?;
        Ok(match self {
            Family::Werner => werner(p)?,
            Family::GhzW => ghz_w_mixture(p)?,
            Family::Qutrit => two_qutrit_alpha(p)?,
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "werner" => Ok(Family::Werner),
            "ghzw" => Ok(Family::GhzW),
            "qutrit" => Ok(Family::Qutrit),
            _ => Err(Error::Invalid(format!("unknown family {s:?} (expected werner, ghzw or qutrit)"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `bell:ij`, `werner:F`, `ghzw:q`, `qutrit:alpha`, or a path to a JSON matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Bell(bool, bool),
    Member(Family, f64),
    File(PathBuf),
}

impl FromStr for StateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let Some((name, arg)) = s.split_once(':') else {
            return Ok(StateSpec::File(s.into()));
        };
        if name == "bell" {
            return match arg {
                "00" => Ok(StateSpec::Bell(false, false)),
                "01" => Ok(StateSpec::Bell(false, true)),
                "10" => Ok(StateSpec::Bell(true, false)),
                "11" => Ok(StateSpec::Bell(true, true)),
                _ => Err(Error::Invalid(format!("bell index {arg:?} must be two bits, e.g. bell:01"))),
            };
        }
        match name.parse::<Family>() {
            Ok(family) => {
                let p: f64 = arg
                    .parse()
                    .map_err(|_| Error::Invalid(format!("{name} parameter {arg:?} is not a number")))?;
                family.check(p)?;
                Ok(StateSpec::Member(family, p))
            }
            // not a family name: a path that happens to contain ':'
            Err(_) => Ok(StateSpec::File(s.into())),
        }
    }
}

impl StateSpec {
    pub fn load(&self) -> Result<DensityMatrix> {
        match self {
            StateSpec::Bell(i, j) => Ok(bell_state(*i, *j)),
            StateSpec::Member(f, p) => f.state(*p),
            StateSpec::File(path) => load_density(path),
        }
    }
}

/// Inclusive `start:stop:step` grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl FromStr for RangeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Invalid(format!("range {s:?} must be start:stop:step"));
        let [a, b, c] = parts.as_slice() else { return Err(bad()) };
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
        let r = RangeSpec { start: num(a)?, stop: num(b)?, step: num(c)? };
        if !(r.start.is_finite() && r.stop.is_finite() && r.step.is_finite()) || r.step <= 0.0 || r.stop < r.start {
            return Err(Error::Invalid(format!("range {s:?} needs start <= stop and step > 0")));
        }
        Ok(r)
    }
}

impl RangeSpec {
    /// Grid points; the last one is dropped unless it lands on `stop` to
    /// within rounding.
    pub fn points(&self) -> Vec<f64> {
        let span = (self.stop - self.start) / self.step;
        let n = (span + 1e-9).floor() as usize;
        (0..=n)
            .map(|k| {
                let p = self.start + k as f64 * self.step;
                // snap rounding overshoot back onto the endpoint
                if (p - self.stop).abs() < 1e-9 * self.step.max(1.0) { self.stop } else { p }
            })
            .collect()
    }

    pub fn check(&self, family: Family) -> Result<Vec<f64>> {
        let pts = self.points();
        for &p in &pts {
            family.check(p)?;
        }
        Ok(pts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_named_states() {
        assert_eq!("bell:01".parse::<StateSpec>().unwrap(), StateSpec::Bell(false, true));
        assert_eq!("werner:0.3".parse::<StateSpec>().unwrap(), StateSpec::Member(Family::Werner, 0.3));
        assert_eq!("qutrit:4.5".parse::<StateSpec>().unwrap(), StateSpec::Member(Family::Qutrit, 4.5));
        assert_eq!("rho.json".parse::<StateSpec>().unwrap(), StateSpec::File("rho.json".into()));
        assert!("bell:2".parse::<StateSpec>().is_err());
        assert!("bell:012".parse::<StateSpec>().is_err());
        assert!("werner:1.5".parse::<StateSpec>().is_err());
        assert!("qutrit:1".parse::<StateSpec>().is_err());
        assert!("ghzw:abc".parse::<StateSpec>().is_err());
    }

    #[test]
    fn range_points() {
        let r: RangeSpec = "0:1:0.1".parse().unwrap();
        let pts = r.points();
        assert_eq!(pts.len(), 11);
        assert_eq!(*pts.last().unwrap(), 1.0);
        let r: RangeSpec = "0:1:0.25".parse().unwrap();
        assert_eq!(r.points(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let r: RangeSpec = "2:5:0.5".parse().unwrap();
        assert_eq!(r.points().len(), 7);
        let r: RangeSpec = "0:1:0.3".parse().unwrap();
        assert_eq!(r.points().len(), 4);
        assert!("1:0:0.1".parse::<RangeSpec>().is_err());
        assert!("0:1:0".parse::<RangeSpec>().is_err());
        assert!("0:1".parse::<RangeSpec>().is_err());
    }

    #[test]
    fn range_must_fit_family() {
        let r: RangeSpec = "0:1.2:0.1".parse().unwrap();
        assert!(r.check(Family::Werner).is_err());
        let r: RangeSpec = "2:5:0.5".parse().unwrap();
        assert!(r.check(Family::Qutrit).is_ok());
        assert!(r.check(Family::GhzW).is_err());
    }
}
