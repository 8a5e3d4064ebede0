//! Built-in sweep presets. Path-loss exponents 2b ∈ {2.4, 3.5} cover a
//! favorable and a lossy propagation regime; the remaining geometry and
//! power choices (R/δ = 0.45, unit powers, k = 0.8, cluster defaults) are
//! this tool's documented defaults.

use dtdd_core::cluster::SmallCellQuery;
use dtdd_core::{cluster, ClusterParams, SeriesControl, TrafficMix};

use crate::scenario::{Quantity, Scenario};
use crate::CliError;

const PRESET_B_GRID: [f64; 2] = [1.2, 1.75];

fn base(id: &str) -> Scenario {
    Scenario {
        id: id.to_string(),
        network: dtdd_core::NetworkParams::default(),
        series: SeriesControl {
            h_max: 320,
            rel_stop: 1e-12,
        },
        mixes: Vec::new(),
        quantities: Vec::new(),
        x_grid: Vec::new(),
        b_grid: PRESET_B_GRID.to_vec(),
        k_grid: vec![0.8],
        gamma_grid: Vec::new(),
        theta: 0.0,
        output: None,
        oracle: None,
        oracle_n_theta: 16,
        cluster: None,
    }
}

fn macro_x_grid() -> Vec<f64> {
    // The UL→DL expansion needs x + R/δ < 1, and its blocks decay like
    // (x + R/δ)^{2h}; 0.50 keeps the block count moderate at R/δ = 0.45.
    (1..=25).map(|i| (2 * i) as f64 / 100.0).collect()
}

fn cluster_x_grid() -> Vec<f64> {
    (1..=19).map(|i| (5 * i) as f64 / 100.0).collect()
}

/// Downlink-cycle ISR against the direction mix: static TDD (all cells DL)
/// down to half the cells switched to UL.
pub fn fig2() -> Scenario {
    let mut s = base("fig2");
    s.quantities = vec![Quantity::IsrDlTotal];
    s.mixes = vec![
        TrafficMix {
            alpha_d: 1.0,
            alpha_u: 0.0,
        },
        TrafficMix {
            alpha_d: 0.75,
            alpha_u: 0.25,
        },
        TrafficMix {
            alpha_d: 0.5,
            alpha_u: 0.5,
        },
    ];
    s.x_grid = macro_x_grid();
    s.output = Some("fig2.csv".into());
    s
}

/// Uplink-cycle ISR as cells switch to DL: the cross-link path dominates.
pub fn fig3() -> Scenario {
    let mut s = base("fig3");
    s.quantities = vec![Quantity::IsrUlTotal];
    s.mixes = vec![
        TrafficMix {
            alpha_d: 0.0,
            alpha_u: 1.0,
        },
        TrafficMix {
            alpha_d: 0.25,
            alpha_u: 0.75,
        },
        TrafficMix {
            alpha_d: 0.5,
            alpha_u: 0.5,
        },
    ];
    s.x_grid = macro_x_grid();
    s.output = Some("fig3.csv".into());
    s
}

/// Clustered small-cell DL→UL ISR, with Monte-Carlo oracle columns.
pub fn fig5() -> Scenario {
    let mut s = base("fig5");
    s.quantities = vec![Quantity::IsrDlUlClustered];
    s.x_grid = cluster_x_grid();
    s.cluster = Some(ClusterParams::default_for_macro(1.0));
    let mut oc = dtdd_core::OracleConfig::for_spacing(1.0 / dtdd_core::lattice::SQRT3);
    oc.seed = 0xF165;
    s.oracle = Some(oc);
    s.output = Some("fig5.csv".into());
    s
}

/// Uplink coverage probability over an SINR-threshold grid centered on the
/// cell-edge SINR, with Monte-Carlo oracle columns.
pub fn coverage() -> Scenario {
    let mut s = base("coverage");
    s.quantities = vec![Quantity::Coverage];
    let mut cp = ClusterParams::default_for_macro(1.0);
    cp.p_noise = 1e-6;
    // Center the threshold grid on the SINR at the serving-cell edge.
    let q = SmallCellQuery {
        x_tilde: cp.smallcell_radius / cp.delta_tilde,
        b: 1.75,
        k: 0.8,
    };
    let edge = match cluster::sinr_ul(&q, &cp, &s.series).expect("default cluster params") {
        dtdd_core::Sinr::Finite(v) => v,
        dtdd_core::Sinr::Unbounded => 1.0,
    };
    s.gamma_grid = (0..20)
        .map(|i| edge * 10f64.powf(-1.5 + 3.0 * i as f64 / 19.0))
        .collect();
    s.cluster = Some(cp);
    let mut oc = dtdd_core::OracleConfig::for_spacing(1.0 / dtdd_core::lattice::SQRT3);
    oc.seed = 0xC0FE;
    s.oracle = Some(oc);
    s.output = Some("coverage.csv".into());
    s
}

pub fn by_name(name: &str) -> Result<Scenario, CliError> {
    match name {
        "fig2" => Ok(fig2()),
        "fig3" => Ok(fig3()),
        "fig5" => Ok(fig5()),
        "coverage" => Ok(coverage()),
        other => Err(CliError::config(format!(
            "unknown preset '{other}' (expected fig2, fig3, fig5 or coverage)"
        ))),
    }
}
