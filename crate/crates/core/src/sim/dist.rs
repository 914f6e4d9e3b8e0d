use std::fmt;

use rand_core::RngCore;
use serde::{Deserialize, Serialize};

/// A random duration of the model that can be given its own law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    LaaInterArrival,
    WifiInterArrival,
    LaaService,
    WifiService,
    Sensing,
    OnDuration,
    OffDuration,
}

impl Quantity {
    pub const ALL: [Quantity; 7] = [
        Quantity::LaaInterArrival,
        Quantity::WifiInterArrival,
        Quantity::LaaService,
        Quantity::WifiService,
        Quantity::Sensing,
        Quantity::OnDuration,
        Quantity::OffDuration,
    ];

    pub fn is_service(self) -> bool {
        matches!(self, Quantity::LaaService | Quantity::WifiService)
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Quantity::LaaInterArrival => "laa_inter_arrival",
            Quantity::WifiInterArrival => "wifi_inter_arrival",
            Quantity::LaaService => "laa_service",
            Quantity::WifiService => "wifi_service",
            Quantity::Sensing => "sensing",
            Quantity::OnDuration => "on_duration",
            Quantity::OffDuration => "off_duration",
        };
        f.write_str(s)
    }
}

/// How file sizes of the FTP preset are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FileSizeLaw {
    Exponential,
    Fixed,
}

/// Simplified FTP traffic: each packet carries one file, transferred at a
/// constant rate. Only meaningful for service times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FtpTraffic {
    pub mean_file_bytes: f64,
    pub bytes_per_sec: f64,
    pub file_size: FileSizeLaw,
}

impl FtpTraffic {
    pub fn mean_duration(&self) -> f64 {
        self.mean_file_bytes / self.bytes_per_sec
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CustomPreset {
    Ftp(FtpTraffic),
}

/// Law of one random duration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistributionSpec {
    Exponential { rate: f64 },
    Deterministic { value: f64 },
    Custom(CustomPreset),
}

impl DistributionSpec {
    pub fn exponential(rate: f64) -> Self {
        DistributionSpec::Exponential { rate }
    }

    pub fn deterministic(value: f64) -> Self {
        DistributionSpec::Deterministic { value }
    }

    pub fn mean(&self) -> f64 {
        match self {
            DistributionSpec::Exponential { rate } => 1.0 / rate,
            DistributionSpec::Deterministic { value } => *value,
            DistributionSpec::Custom(CustomPreset::Ftp(ftp)) => ftp.mean_duration(),
        }
    }

    /// Checks parameters and whether the law may describe `quantity`.
    pub fn check(&self, quantity: Quantity) -> Result<(), String> {
        match self {
            DistributionSpec::Exponential { rate } if !(*rate > 0.0 && rate.is_finite()) => {
                Err(format!("{quantity}: exponential rate must be positive, got {rate}"))
            }
            DistributionSpec::Deterministic { value } if !(*value >= 0.0 && value.is_finite()) => {
                Err(format!("{quantity}: deterministic value must be non-negative, got {value}"))
            }
            DistributionSpec::Custom(CustomPreset::Ftp(ftp)) => {
                if !quantity.is_service() {
                    return Err(format!("{quantity}: the ftp preset only applies to service times"));
                }
                if !(ftp.mean_file_bytes > 0.0 && ftp.mean_file_bytes.is_finite()) {
                    return Err(format!("{quantity}: ftp mean_file_bytes must be positive"));
                }
                if !(ftp.bytes_per_sec > 0.0 && ftp.bytes_per_sec.is_finite()) {
                    return Err(format!("{quantity}: ftp bytes_per_sec must be positive"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Uniform draw on `[0, 1)` from the top 53 bits of one `u64`.
pub fn uniform<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Draws one duration in seconds. Exponential laws use the inverse
/// transform `-ln(1 - u) / rate`.
pub fn sample<R: RngCore + ?Sized>(spec: &DistributionSpec, rng: &mut R) -> f64 {
    match spec {
        DistributionSpec::Exponential { rate } => exp1(rng) / rate,
        DistributionSpec::Deterministic { value } => *value,
        DistributionSpec::Custom(CustomPreset::Ftp(ftp)) => {
            let size = match ftp.file_size {
                FileSizeLaw::Exponential => exp1(rng) * ftp.mean_file_bytes,
                FileSizeLaw::Fixed => ftp.mean_file_bytes,
            };
            size / ftp.bytes_per_sec
        }
    }
}

fn exp1<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    -(1.0 - uniform(rng)).ln()
}
