//! Swaps the exponential LAA service time for deterministic and FTP-style
//! laws with the same mean.

use laacoex::model::{RateParams, SchemeConfig};
use laacoex::sim::{run, CustomPreset, DistributionSpec, FileSizeLaw, FtpTraffic, Quantity, SimConfig};

fn main() {
    let rates = RateParams::table1(37.0);
    let base = SimConfig::new(SchemeConfig::ufa(2), rates, 500_000, 8);
    let mean = 1.0 / rates.mu_lu;
    let ftp = |file_size| {
        DistributionSpec::Custom(CustomPreset::Ftp(FtpTraffic {
            mean_file_bytes: 0.5e6,
            bytes_per_sec: 0.5e6 / mean,
            file_size,
        }))
    };
    let laws = [
        ("exponential", DistributionSpec::exponential(rates.mu_lu)),
        ("deterministic", DistributionSpec::deterministic(mean)),
        ("ftp, exponential files", ftp(FileSizeLaw::Exponential)),
        ("ftp, fixed files", ftp(FileSizeLaw::Fixed)),
    ];
    for (name, law) in laws {
        let stats = run(&base.clone().with_override(Quantity::LaaService, law)).unwrap();
        println!("{name:<24} P_b,l = {:.4} ± {:.4}  P_b,w = {:.4} ± {:.4}", stats.p_bl_hat, stats.ci95_bl, stats.p_bw_hat, stats.ci95_bw);
    }
}
