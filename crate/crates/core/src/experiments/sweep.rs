use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::model::Scheme;

use super::{run_scenario, ExperimentError, RateExpr, RateName, ResultRow, Scenario};

/// Parameter varied along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Queue,
    Threshold,
    LambdaL,
    LambdaW,
    MuLu,
    MuW,
    MuS,
    /// `(μ_on, μ_off)` pairs.
    OnOff,
}

impl SweepAxis {
    pub fn key(self) -> &'static str {
        match self {
            SweepAxis::Queue => "q",
            SweepAxis::Threshold => "q_theta",
            SweepAxis::LambdaL => "lambda_l",
            SweepAxis::LambdaW => "lambda_w",
            SweepAxis::MuLu => "mu_lu",
            SweepAxis::MuW => "mu_w",
            SweepAxis::MuS => "mu_s",
            SweepAxis::OnOff => "mu_on_off",
        }
    }

    fn rate(self) -> Option<RateName> {
        match self {
            SweepAxis::LambdaL => Some(RateName::LambdaL),
            SweepAxis::LambdaW => Some(RateName::LambdaW),
            SweepAxis::MuLu => Some(RateName::MuLu),
            SweepAxis::MuW => Some(RateName::MuW),
            SweepAxis::MuS => Some(RateName::MuS),
            _ => None,
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        const AXES: [SweepAxis; 8] = [
            SweepAxis::Queue,
            SweepAxis::Threshold,
            SweepAxis::LambdaL,
            SweepAxis::LambdaW,
            SweepAxis::MuLu,
            SweepAxis::MuW,
            SweepAxis::MuS,
            SweepAxis::OnOff,
        ];
        AXES.into_iter()
            .find(|a| a.key() == s)
            .ok_or_else(|| format!("unknown sweep axis '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AxisValue {
    Scalar(f64),
    Pair(f64, f64),
}

impl fmt::Display for AxisValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxisValue::Scalar(v) => write!(f, "{v}"),
            AxisValue::Pair(a, b) => write!(f, "{a}/{b}"),
        }
    }
}

impl AxisValue {
    pub fn scalar(&self) -> Option<f64> {
        match self {
            AxisValue::Scalar(v) => Some(*v),
            AxisValue::Pair(..) => None,
        }
    }
}

/// A named set of rate changes applied on top of the base scenario; one
/// curve of a figure.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub rates: Vec<(RateName, RateExpr)>,
}

impl Series {
    pub fn new(label: impl Into<String>, rates: Vec<(RateName, RateExpr)>) -> Self {
        Series {
            label: label.into(),
            rates,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub name: String,
    pub base: Scenario,
    pub axis: SweepAxis,
    pub values: Vec<AxisValue>,
    pub schemes: Vec<Scheme>,
    /// Curves; an empty list means the base rates only.
    pub series: Vec<Series>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepOutcome {
    /// Ordered by scheme, then series, then axis value.
    pub rows: Vec<ResultRow>,
    pub failures: Vec<ExperimentError>,
    pub warnings: Vec<String>,
}

impl SweepSpec {
    /// Number of points the sweep produces.
    pub fn len(&self) -> usize {
        self.schemes.len() * self.series.len().max(1) * self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.schemes.is_empty() {
            return Err("sweep needs at least one scheme".into());
        }
        if self.values.is_empty() {
            return Err("sweep needs at least one axis value".into());
        }
        for v in &self.values {
            match (self.axis, v) {
                (SweepAxis::OnOff, AxisValue::Pair(a, b)) if *a > 0.0 && *b > 0.0 => {}
                (SweepAxis::OnOff, _) => return Err(format!("{}: expected positive (mu_on, mu_off) pairs, got {v}", self.axis)),
                (SweepAxis::Queue | SweepAxis::Threshold, AxisValue::Scalar(x)) if *x >= 1.0 && x.fract() == 0.0 => {}
                (SweepAxis::Queue | SweepAxis::Threshold, _) => {
                    return Err(format!("{}: values must be integers >= 1, got {v}", self.axis))
                }
                (_, AxisValue::Scalar(x)) if *x >= 0.0 && x.is_finite() => {}
                _ => return Err(format!("{}: invalid axis value {v}", self.axis)),
            }
        }
        Ok(())
    }

    /// Expands the sweep into scenarios in output order, with warnings for
    /// points that rely on the relaxed threshold bound.
    pub fn points(&self) -> (Vec<Scenario>, Vec<String>) {
        let default_series = [Series::new("", Vec::new())];
        let series: &[Series] = if self.series.is_empty() {
            &default_series
        } else {
            &self.series
        };
        let mut out = Vec::with_capacity(self.len());
        let mut warnings = Vec::new();
        for &scheme in &self.schemes {
            for ser in series {
                for value in &self.values {
                    let mut s = self.base.clone();
                    s.scheme.scheme = scheme;
                    s.scheme.relaxed_threshold = true;
                    for &(name, expr) in &ser.rates {
                        s.rates.set(name, expr);
                    }
                    match (self.axis, *value) {
                        (SweepAxis::Queue, AxisValue::Scalar(q)) => {
                            s.scheme.queue = q as u32;
                            s.scheme.threshold = s.scheme.threshold.clamp(1, s.scheme.queue);
                        }
                        (SweepAxis::Threshold, AxisValue::Scalar(t)) => s.scheme.threshold = t as u32,
                        (SweepAxis::OnOff, AxisValue::Pair(on, off)) => {
                            s.rates.set(RateName::MuOn, RateExpr::Absolute(on));
                            s.rates.set(RateName::MuOff, RateExpr::Absolute(off));
                        }
                        (axis, AxisValue::Scalar(v)) => {
                            if let Some(r) = axis.rate() {
                                s.rates.set(r, RateExpr::Absolute(v));
                            }
                        }
                        _ => {}
                    }
                    let mut name = self.name.clone();
                    if !ser.label.is_empty() {
                        name.push_str(&format!("[{}]", ser.label));
                    }
                    if scheme.has_threshold() {
                        if self.axis != SweepAxis::Threshold {
                            name.push_str(&format!("[q_theta={}]", s.scheme.threshold));
                        }
                        if s.scheme.threshold >= s.scheme.queue {
                            warnings.push(format!(
                                "{name}: {scheme} q_theta = {} with Q = {} is outside 1..=Q-1; using the relaxed bound 1..=Q",
                                s.scheme.threshold, s.scheme.queue
                            ));
                        }
                    } else {
                        s.scheme.threshold = 0;
                    }
                    s.name = name;
                    s.sim.seed = self.base.sim.seed.wrapping_add(out.len() as u64);
                    out.push(s);
                }
            }
        }
        (out, warnings)
    }
}

/// Runs every point of the sweep in parallel. Failed points are collected
/// and do not stop the others; rows keep the point order.
pub fn sweep(spec: &SweepSpec) -> Result<SweepOutcome, String> {
    spec.validate()?;
    let (points, warnings) = spec.points();
    // Axis values cycle fastest in point order.
    let values: Vec<AxisValue> = (0..points.len()).map(|i| spec.values[i % spec.values.len()]).collect();
    let results: Vec<_> = points
        .par_iter()
        .zip(values.par_iter())
        .map(|(s, v)| {
            run_scenario(s).map(|mut row| {
                row.axis = spec.axis.key().to_string();
                row.axis_value = Some(*v);
                row
            })
        })
        .collect();
    let mut outcome = SweepOutcome {
        warnings,
        ..Default::default()
    };
    for r in results {
        match r {
            Ok(row) => outcome.rows.push(row),
            Err(e) => outcome.failures.push(e),
        }
    }
    Ok(outcome)
}
