//! Named sweeps behind the validation table and the evaluation figures.
//!
//! Figure presets fix `μ_w = 10` and express the other rates relative to it;
//! only ratios affect the dropping probabilities.

use crate::model::{RateParams, Scheme, SchemeConfig};

use super::{AxisValue, Engines, RateExpr, RateName, RateSpec, Scenario, Series, SweepAxis, SweepSpec, TABLE1_LAMBDAS};

use RateName::*;

/// Catalog entry.
pub struct PresetInfo {
    pub name: &'static str,
    pub description: &'static str,
    build: fn() -> SweepSpec,
}

impl PresetInfo {
    pub fn spec(&self) -> SweepSpec {
        (self.build)()
    }
}

pub const PRESETS: &[PresetInfo] = &[
    PresetInfo {
        name: "table1",
        description: "validation grid: UFA and UTA, lambda_l in {25, 37, 50, 62.5, 120}, lambda_w=5, mu_lu=25, mu_w=40, mu_s=1, mu_on=mu_off=0.1, Q=2; analytic and simulation",
        build: table1,
    },
    PresetInfo {
        name: "fig4",
        description: "UTA, Q=1..5, curves lambda_l in {1, 5, 10}*mu_w; lambda_w=0.5*mu_w, mu_lu=mu_w, mu_on=mu_off=1, mu_s=10*mu_on",
        build: fig4,
    },
    PresetInfo {
        name: "fig5",
        description: "UTA, Q=1..5, curves mu_lu in {0.5, 1, 2}*mu_w with lambda_l=0.5*mu_lu; otherwise as fig4",
        build: fig5,
    },
    PresetInfo {
        name: "fig6",
        description: "UTA, Q=1..5, curves lambda_w in {1, 5, 10}*mu_w; lambda_l=mu_w, otherwise as fig4",
        build: fig6,
    },
    PresetInfo {
        name: "fig7",
        description: "UTA, Q=1..8, curves mu_w in {5, 10, 20}; lambda_l=lambda_w=5, mu_lu=10, otherwise as fig5",
        build: fig7,
    },
    PresetInfo {
        name: "fig8",
        description: "UTA, Q=1..8, curves mu_s in {0.1, 0.5, 1}; lambda_l=lambda_w=0.5*mu_w, mu_lu=mu_w, mu_on=mu_off=0.1*mu_s",
        build: fig8,
    },
    PresetInfo {
        name: "fig9",
        description: "UTA, Q=1..5, curves (mu_on, mu_off) in {(0.05, 0.2), (0.1, 0.1), (0.2, 0.05)}*mu_w; lambda_l=lambda_w=0.5*mu_w, mu_lu=mu_s=mu_w",
        build: fig9,
    },
    PresetInfo {
        name: "fig10",
        description: "UTAB with q_theta=min(2, Q), otherwise as fig9",
        build: fig10,
    },
    PresetInfo {
        name: "fig11",
        description: "all four schemes, Q=1..9, lambda_l=lambda_w=0.5*mu_w, mu_lu=mu_s=mu_w, mu_on=mu_off=0.1*mu_w; q_theta=min(2, Q)",
        build: fig11,
    },
    PresetInfo {
        name: "fig12",
        description: "UFAB and UTAB, Q=5, q_theta=1..5 (q_theta=Q uses the relaxed bound), rates as fig11",
        build: fig12,
    },
];

pub fn preset(name: &str) -> Option<SweepSpec> {
    PRESETS.iter().find(|p| p.name == name).map(PresetInfo::spec)
}

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|p| p.name).collect()
}

const MU_W: f64 = 10.0;

fn mw(k: f64) -> RateExpr {
    RateExpr::times_mu_w(k)
}

fn queue_axis(hi: u32) -> Vec<AxisValue> {
    (1..=hi).map(|q| AxisValue::Scalar(f64::from(q))).collect()
}

fn curves(name: RateName, factors: &[f64], expr: fn(f64) -> RateExpr) -> Vec<Series> {
    factors
        .iter()
        .map(|&k| {
            let e = expr(k);
            Series::new(format!("{name}={e}"), vec![(name, e)])
        })
        .collect()
}

fn figure(name: &str, scheme: SchemeConfig, rates: RateSpec, axis: SweepAxis, values: Vec<AxisValue>, schemes: Vec<Scheme>, series: Vec<Series>) -> SweepSpec {
    SweepSpec {
        name: name.into(),
        base: Scenario::new(name, scheme.with_relaxed_threshold(), rates),
        axis,
        values,
        schemes,
        series,
    }
}

/// Rates shared by the fig4–fig6 family.
fn arrival_family() -> RateSpec {
    RateSpec::absolute(&RateParams::table1(0.0))
        .with(MuW, MU_W)
        .with(LambdaL, mw(1.0))
        .with(LambdaW, mw(0.5))
        .with(MuLu, mw(1.0))
        .with(MuOn, 1.0)
        .with(MuOff, 1.0)
        .with(MuS, RateExpr::times(10.0, MuOn))
}

/// Rates shared by fig9–fig12.
fn balanced_family() -> RateSpec {
    RateSpec::absolute(&RateParams::table1(0.0))
        .with(MuW, MU_W)
        .with(LambdaL, mw(0.5))
        .with(LambdaW, mw(0.5))
        .with(MuLu, mw(1.0))
        .with(MuS, mw(1.0))
        .with(MuOn, mw(0.1))
        .with(MuOff, mw(0.1))
}

fn table1() -> SweepSpec {
    let mut base = Scenario::new("table1", SchemeConfig::ufa(2), RateSpec::absolute(&RateParams::table1(25.0)))
        .with_engines(Engines::Both);
    base.sim.seed = super::REFERENCE_SEED;
    SweepSpec {
        name: "table1".into(),
        base,
        axis: SweepAxis::LambdaL,
        values: TABLE1_LAMBDAS.iter().map(|&l| AxisValue::Scalar(l)).collect(),
        schemes: vec![Scheme::Ufa, Scheme::Uta],
        series: Vec::new(),
    }
}

fn fig4() -> SweepSpec {
    figure(
        "fig4",
        SchemeConfig::uta(1),
        arrival_family(),
        SweepAxis::Queue,
        queue_axis(5),
        vec![Scheme::Uta],
        curves(LambdaL, &[1.0, 5.0, 10.0], mw),
    )
}

fn fig5() -> SweepSpec {
    figure(
        "fig5",
        SchemeConfig::uta(1),
        arrival_family().with(LambdaL, RateExpr::times(0.5, MuLu)),
        SweepAxis::Queue,
        queue_axis(5),
        vec![Scheme::Uta],
        curves(MuLu, &[0.5, 1.0, 2.0], mw),
    )
}

fn fig6() -> SweepSpec {
    figure(
        "fig6",
        SchemeConfig::uta(1),
        arrival_family(),
        SweepAxis::Queue,
        queue_axis(5),
        vec![Scheme::Uta],
        curves(LambdaW, &[1.0, 5.0, 10.0], mw),
    )
}

fn fig7() -> SweepSpec {
    let rates = arrival_family()
        .with(MuLu, MU_W)
        .with(LambdaL, RateExpr::times(0.5, MuLu))
        .with(LambdaW, 0.5 * MU_W);
    figure(
        "fig7",
        SchemeConfig::uta(1),
        rates,
        SweepAxis::Queue,
        queue_axis(8),
        vec![Scheme::Uta],
        curves(MuW, &[5.0, 10.0, 20.0], RateExpr::Absolute),
    )
}

fn fig8() -> SweepSpec {
    let rates = arrival_family()
        .with(LambdaL, mw(0.5))
        .with(LambdaW, mw(0.5))
        .with(MuLu, mw(1.0))
        .with(MuS, 1.0)
        .with(MuOn, RateExpr::times(0.1, MuS))
        .with(MuOff, RateExpr::times(0.1, MuS));
    figure(
        "fig8",
        SchemeConfig::uta(1),
        rates,
        SweepAxis::Queue,
        queue_axis(8),
        vec![Scheme::Uta],
        curves(MuS, &[0.1, 0.5, 1.0], RateExpr::Absolute),
    )
}

fn on_off_curves() -> Vec<Series> {
    [(0.05, 0.2), (0.1, 0.1), (0.2, 0.05)]
        .into_iter()
        .map(|(on, off)| Series::new(format!("mu_on={on}*mu_w,mu_off={off}*mu_w"), vec![(MuOn, mw(on)), (MuOff, mw(off))]))
        .collect()
}

fn fig9() -> SweepSpec {
    figure("fig9", SchemeConfig::uta(1), balanced_family(), SweepAxis::Queue, queue_axis(5), vec![Scheme::Uta], on_off_curves())
}

fn fig10() -> SweepSpec {
    figure("fig10", SchemeConfig::utab(1, 2), balanced_family(), SweepAxis::Queue, queue_axis(5), vec![Scheme::Utab], on_off_curves())
}

fn fig11() -> SweepSpec {
    figure(
        "fig11",
        SchemeConfig::utab(1, 2),
        balanced_family(),
        SweepAxis::Queue,
        queue_axis(9),
        Scheme::ALL.to_vec(),
        Vec::new(),
    )
}

fn fig12() -> SweepSpec {
    figure(
        "fig12",
        SchemeConfig::utab(5, 1),
        balanced_family(),
        SweepAxis::Threshold,
        queue_axis(5),
        vec![Scheme::Ufab, Scheme::Utab],
        Vec::new(),
    )
}
