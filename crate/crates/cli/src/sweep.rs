//! `name=start:stop:step` parameter sweeps.

use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParam {
    T,
    Alpha,
    R,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::T => "t",
            SweepParam::Alpha => "alpha",
            SweepParam::R => "r",
        }
    }

    fn in_range(self, v: f64) -> bool {
        match self {
            SweepParam::T | SweepParam::Alpha => (0.0..=1.0).contains(&v),
            SweepParam::R => v >= 2.0 && v.is_finite(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub param: SweepParam,
    pub points: Vec<f64>,
}

#[derive(Debug, PartialEq)]
pub struct SweepError(String);

impl fmt::Display for SweepError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for SweepError {}

const MAX_POINTS: usize = 100_000;

impl FromStr for Sweep {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, SweepError> {
        let err = |m: String| SweepError(format!("bad sweep `{s}`: {m}"));
        let (name, range) = s
            .split_once('=')
            .ok_or_else(|| err("expected name=start:stop:step".into()))?;
        let param = match name.trim() {
            "t" => SweepParam::T,
            "alpha" => SweepParam::Alpha,
            "r" => SweepParam::R,
            other => {
                return Err(err(format!(
                    "unknown parameter `{other}` (expected t, alpha or r)"
                )))
            }
        };
        let parts: Vec<&str> = range.split(':').collect();
        if parts.len() != 3 {
            return Err(err("expected three fields start:stop:step".into()));
        }
        let mut nums = [0.0; 3];
        for (slot, (part, label)) in nums
            .iter_mut()
            .zip(parts.iter().zip(["start", "stop", "step"]))
        {
            *slot = part
                .trim()
                .parse::<f64>()
                .map_err(|_| err(format!("{label} `{part}` is not a number")))?;
            if !slot.is_finite() {
                return Err(err(format!("{label} must be finite")));
            }
        }
        let [start, stop, step] = nums;
        if step <= 0.0 {
            return Err(err("step must be positive".into()));
        }
        if stop < start {
            return Err(err("stop must not be below start".into()));
        }
        let span = (stop - start) / step;
        if span > MAX_POINTS as f64 {
            return Err(err(format!("more than {MAX_POINTS} points")));
        }
        let count = (span + 1e-9).floor() as usize + 1;
        // rounding keeps grid points like 0.87 exact in decimal
        let points: Vec<f64> = (0..count)
            .map(|k| round12(start + k as f64 * step))
            .collect();
        if let Some(bad) = points.iter().find(|&&v| !param.in_range(v)) {
            return Err(err(format!("{} = {bad} is out of range", param.name())));
        }
        Ok(Sweep { param, points })
    }
}

fn round12(x: f64) -> f64 {
    let r = (x * 1e12).round() / 1e12;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}
