use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer};

use crate::model::RateParams;

/// Names of the seven rate parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RateName {
    LambdaL,
    LambdaW,
    MuLu,
    MuW,
    MuS,
    MuOn,
    MuOff,
}

impl RateName {
    pub const ALL: [RateName; 7] = [
        RateName::LambdaL,
        RateName::LambdaW,
        RateName::MuLu,
        RateName::MuW,
        RateName::MuS,
        RateName::MuOn,
        RateName::MuOff,
    ];

    pub fn key(self) -> &'static str {
        match self {
            RateName::LambdaL => "lambda_l",
            RateName::LambdaW => "lambda_w",
            RateName::MuLu => "mu_lu",
            RateName::MuW => "mu_w",
            RateName::MuS => "mu_s",
            RateName::MuOn => "mu_on",
            RateName::MuOff => "mu_off",
        }
    }
}

impl fmt::Display for RateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for RateName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RateName::ALL
            .into_iter()
            .find(|r| r.key() == s.trim())
            .ok_or_else(|| format!("unknown rate '{s}'"))
    }
}

/// A rate given absolutely or as a multiple of another rate, e.g.
/// `0.5*mu_w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateExpr {
    Absolute(f64),
    Scaled { factor: f64, of: RateName },
}

impl RateExpr {
    pub fn times_mu_w(factor: f64) -> Self {
        RateExpr::Scaled {
            factor,
            of: RateName::MuW,
        }
    }

    pub fn times(factor: f64, of: RateName) -> Self {
        RateExpr::Scaled { factor, of }
    }
}

impl From<f64> for RateExpr {
    fn from(v: f64) -> Self {
        RateExpr::Absolute(v)
    }
}

impl fmt::Display for RateExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RateExpr::Absolute(v) => write!(f, "{v}"),
            RateExpr::Scaled { factor, of } => write!(f, "{factor}*{of}"),
        }
    }
}

impl FromStr for RateExpr {
    type Err = String;

    /// Accepts `3.5`, `mu_w`, `5*mu_w`, `5 * mu_w` and `mu_w*5`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let number = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("cannot parse rate expression '{s}'"))
        };
        if let Some((a, b)) = s.split_once('*') {
            if let Ok(of) = b.parse::<RateName>() {
                return Ok(RateExpr::Scaled { factor: number(a)?, of });
            }
            if let Ok(of) = a.parse::<RateName>() {
                return Ok(RateExpr::Scaled { factor: number(b)?, of });
            }
            return Err(format!("cannot parse rate expression '{s}'"));
        }
        if let Ok(of) = s.parse::<RateName>() {
            return Ok(RateExpr::Scaled { factor: 1.0, of });
        }
        number(s).map(RateExpr::Absolute)
    }
}

impl<'de> Deserialize<'de> for RateExpr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Float(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(v) => Ok(RateExpr::Absolute(v as f64)),
            Raw::Float(v) => Ok(RateExpr::Absolute(v)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// The seven rates as expressions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSpec {
    exprs: [RateExpr; 7],
}

impl RateSpec {
    pub fn absolute(r: &RateParams) -> Self {
        RateSpec {
            exprs: [r.lambda_l, r.lambda_w, r.mu_lu, r.mu_w, r.mu_s, r.mu_on, r.mu_off].map(RateExpr::Absolute),
        }
    }

    pub fn get(&self, name: RateName) -> RateExpr {
        self.exprs[name as usize]
    }

    pub fn set(&mut self, name: RateName, expr: RateExpr) {
        self.exprs[name as usize] = expr;
    }

    pub fn with(mut self, name: RateName, expr: impl Into<RateExpr>) -> Self {
        self.set(name, expr.into());
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (RateName, RateExpr)> + '_ {
        RateName::ALL.into_iter().map(|n| (n, self.get(n)))
    }

    /// Resolves every expression to an absolute value and validates the
    /// result. Errors name the offending rate.
    pub fn resolve(&self) -> Result<RateParams, String> {
        let mut values: [Option<f64>; 7] = [None; 7];
        for _ in 0..RateName::ALL.len() {
            for n in RateName::ALL {
                if values[n as usize].is_some() {
                    continue;
                }
                values[n as usize] = match self.get(n) {
                    RateExpr::Absolute(v) => Some(v),
                    RateExpr::Scaled { factor, of } => values[of as usize].map(|v| factor * v),
                };
            }
        }
        let mut out = [0.0; 7];
        for n in RateName::ALL {
            out[n as usize] = values[n as usize]
                .ok_or_else(|| format!("{n}: circular rate expression '{}'", self.get(n)))?;
        }
        let params = RateParams {
            lambda_l: out[0],
            lambda_w: out[1],
            mu_lu: out[2],
            mu_w: out[3],
            mu_s: out[4],
            mu_on: out[5],
            mu_off: out[6],
        };
        params.validate().map_err(|e| e.to_string())?;
        Ok(params)
    }
}

impl fmt::Display for RateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|(n, e)| format!("{n}={e}")).collect();
        f.write_str(&parts.join(" "))
    }
}
