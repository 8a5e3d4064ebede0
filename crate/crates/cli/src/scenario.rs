//! Scenario files: flat TOML sections mapping onto the core parameter
//! structs, plus the sweep/result row schema shared by every subcommand.

use std::fmt::Write as _;
use std::path::Path;

use dtdd_core::{ClusterParams, NetworkParams, OracleConfig, SeriesControl, TrafficMix};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub scenario: Option<MetaSection>,
    pub network: Option<NetworkSection>,
    pub series: Option<SeriesSection>,
    #[serde(default)]
    pub mix: Vec<MixSection>,
    pub sweep: Option<SweepSection>,
    pub oracle: Option<OracleSection>,
    pub cluster: Option<ClusterSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetaSection {
    pub id: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    pub delta: Option<f64>,
    pub b: Option<f64>,
    pub k: Option<f64>,
    pub p_dl: Option<f64>,
    pub p_target: Option<f64>,
    pub cell_radius: Option<f64>,
    pub p_noise: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesSection {
    pub h_max: Option<usize>,
    pub rel_stop: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixSection {
    pub alpha_d: f64,
    pub alpha_u: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default)]
    pub quantities: Vec<String>,
    #[serde(default)]
    pub x_grid: Vec<f64>,
    #[serde(default)]
    pub b_grid: Vec<f64>,
    #[serde(default)]
    pub k_grid: Vec<f64>,
    #[serde(default)]
    pub gamma_grid: Vec<f64>,
    pub theta: Option<f64>,
    pub output: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    pub lattice_max_norm: Option<f64>,
    pub quad_radial_order: Option<usize>,
    pub quad_angular_order: Option<usize>,
    pub mc_draws: Option<usize>,
    pub seed: Option<u64>,
    /// Mobile-angle average order for the DL-cycle oracle comparisons.
    pub n_theta: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterSection {
    pub delta_tilde: Option<f64>,
    pub cluster_radius: Option<f64>,
    pub smallcell_radius: Option<f64>,
    pub intensity: Option<f64>,
    pub n_cells: Option<usize>,
    pub p_small_dl: Option<f64>,
    pub p_small_target: Option<f64>,
    pub rho0: Option<f64>,
    pub p_noise: Option<f64>,
}

/// Everything a run needs, resolved against defaults.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub id: String,
    pub network: NetworkParams,
    pub series: SeriesControl,
    pub mixes: Vec<TrafficMix>,
    pub quantities: Vec<Quantity>,
    pub x_grid: Vec<f64>,
    pub b_grid: Vec<f64>,
    pub k_grid: Vec<f64>,
    pub gamma_grid: Vec<f64>,
    pub theta: f64,
    pub output: Option<String>,
    pub oracle: Option<OracleConfig>,
    pub oracle_n_theta: usize,
    pub cluster: Option<ClusterParams>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    IsrDlDl,
    IsrUlDl,
    IsrUlUl,
    IsrDlUl,
    IsrDlTotal,
    IsrUlTotal,
    IsrDlUlClustered,
    SinrUl,
    Coverage,
}

impl Quantity {
    pub fn parse(name: &str) -> Result<Self, CliError> {
        Ok(match name {
            "isr_dl_dl" => Quantity::IsrDlDl,
            "isr_ul_dl" => Quantity::IsrUlDl,
            "isr_ul_ul" => Quantity::IsrUlUl,
            "isr_dl_ul" => Quantity::IsrDlUl,
            "isr_dl_total" => Quantity::IsrDlTotal,
            "isr_ul_total" => Quantity::IsrUlTotal,
            "isr_dl_ul_clustered" => Quantity::IsrDlUlClustered,
            "sinr_ul" => Quantity::SinrUl,
            "coverage" => Quantity::Coverage,
            other => {
                return Err(CliError::config(format!(
                    "unknown quantity '{other}' (expected one of isr_dl_dl, isr_ul_dl, \
                     isr_ul_ul, isr_dl_ul, isr_dl_total, isr_ul_total, \
                     isr_dl_ul_clustered, sinr_ul, coverage)"
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Quantity::IsrDlDl => "isr_dl_dl",
            Quantity::IsrUlDl => "isr_ul_dl",
            Quantity::IsrUlUl => "isr_ul_ul",
            Quantity::IsrDlUl => "isr_dl_ul",
            Quantity::IsrDlTotal => "isr_dl_total",
            Quantity::IsrUlTotal => "isr_ul_total",
            Quantity::IsrDlUlClustered => "isr_dl_ul_clustered",
            Quantity::SinrUl => "sinr_ul",
            Quantity::Coverage => "coverage",
        }
    }

    pub fn uses_mix(&self) -> bool {
        matches!(self, Quantity::IsrDlTotal | Quantity::IsrUlTotal)
    }

    pub fn uses_cluster(&self) -> bool {
        matches!(
            self,
            Quantity::IsrDlUlClustered | Quantity::SinrUl | Quantity::Coverage
        )
    }

    pub fn uses_gamma(&self) -> bool {
        matches!(self, Quantity::Coverage)
    }
}

pub fn load(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let file: ScenarioFile = toml::from_str(&text)
        .map_err(|e| CliError::config(format!("parse error in {}: {e}", path.display())))?;
    resolve(file)
}

pub fn resolve(file: ScenarioFile) -> Result<Scenario, CliError> {
    let mut network = NetworkParams::default();
    if let Some(n) = &file.network {
        if let Some(v) = n.delta {
            network.delta = v;
        }
        if let Some(v) = n.b {
            network.b = v;
        }
        if let Some(v) = n.k {
            network.k = v;
        }
        if let Some(v) = n.p_dl {
            network.p_dl = v;
        }
        if let Some(v) = n.p_target {
            network.p_target = v;
        }
        if let Some(v) = n.cell_radius {
            network.cell_radius = v;
        }
        if let Some(v) = n.p_noise {
            network.p_noise = v;
        }
    }
    network
        .validate()
        .map_err(|e| CliError::config(format!("[network] {e}")))?;

    let mut series = SeriesControl::default();
    if let Some(s) = &file.series {
        if let Some(v) = s.h_max {
            series.h_max = v;
        }
        if let Some(v) = s.rel_stop {
            series.rel_stop = v;
        }
    }
    series
        .validate()
        .map_err(|e| CliError::config(format!("[series] {e}")))?;

    let mut mixes = Vec::new();
    for (i, m) in file.mix.iter().enumerate() {
        let mix = TrafficMix::new(m.alpha_d, m.alpha_u)
            .map_err(|e| CliError::config(format!("[[mix]] entry {i}: {e}")))?;
        mixes.push(mix);
    }

    let sweep = file.sweep.clone().unwrap_or(SweepSection {
        quantities: Vec::new(),
        x_grid: Vec::new(),
        b_grid: Vec::new(),
        k_grid: Vec::new(),
        gamma_grid: Vec::new(),
        theta: None,
        output: None,
    });
    let mut quantities = Vec::new();
    for name in &sweep.quantities {
        quantities.push(Quantity::parse(name)?);
    }
    let b_grid = if sweep.b_grid.is_empty() {
        vec![network.b]
    } else {
        sweep.b_grid.clone()
    };
    for &b in &b_grid {
        if !(b > 1.0) {
            return Err(CliError::config(format!(
                "b_grid value {b} out of domain (need b > 1)"
            )));
        }
    }
    let k_grid = if sweep.k_grid.is_empty() {
        vec![network.k]
    } else {
        sweep.k_grid.clone()
    };
    for &k in &k_grid {
        if !(0.0..=1.0).contains(&k) {
            return Err(CliError::config(format!(
                "k_grid value {k} out of domain (need 0 <= k <= 1)"
            )));
        }
    }

    let cluster = match &file.cluster {
        None => None,
        Some(c) => {
            let mut cp = ClusterParams::default_for_macro(network.delta);
            if let Some(v) = c.delta_tilde {
                cp = ClusterParams::default_for_macro(v * dtdd_core::lattice::SQRT3);
                cp.delta_tilde = v;
            }
            if let Some(v) = c.cluster_radius {
                cp.cluster_radius = v;
                cp.intensity = cp.n_cells as f64 / (std::f64::consts::PI * v * v);
            }
            if let Some(v) = c.n_cells {
                cp.n_cells = v;
                cp.intensity =
                    v as f64 / (std::f64::consts::PI * cp.cluster_radius * cp.cluster_radius);
            }
            if let Some(v) = c.intensity {
                cp.intensity = v;
            }
            if let Some(v) = c.smallcell_radius {
                cp.smallcell_radius = v;
            }
            if let Some(v) = c.p_small_dl {
                cp.p_small_dl = v;
            }
            if let Some(v) = c.p_small_target {
                cp.p_small_target = v;
            }
            if let Some(v) = c.rho0 {
                cp.rho0 = v;
            }
            if let Some(v) = c.p_noise {
                cp.p_noise = v;
            }
            cp.validate()
                .map_err(|e| CliError::config(format!("[cluster] {e}")))?;
            Some(cp)
        }
    };

    let oracle = match &file.oracle {
        None => None,
        Some(o) => {
            let spacing = cluster
                .as_ref()
                .map(|c| c.delta_tilde.min(network.delta))
                .unwrap_or(network.delta);
            let mut oc = OracleConfig::for_spacing(network.delta);
            if let Some(v) = o.lattice_max_norm {
                oc.lattice_max_norm = v;
            }
            if let Some(v) = o.quad_radial_order {
                oc.quad_radial_order = v;
            }
            if let Some(v) = o.quad_angular_order {
                oc.quad_angular_order = v;
            }
            if let Some(v) = o.mc_draws {
                oc.mc_draws = v;
            }
            if let Some(v) = o.seed {
                oc.seed = v;
            }
            oc.validate(spacing)
                .map_err(|e| CliError::config(format!("[oracle] {e}")))?;
            Some(oc)
        }
    };
    let oracle_n_theta = file
        .oracle
        .as_ref()
        .and_then(|o| o.n_theta)
        .unwrap_or(16)
        .max(1);

    Ok(Scenario {
        id: file
            .scenario
            .and_then(|m| m.id)
            .unwrap_or_else(|| "scenario".to_string()),
        network,
        series,
        mixes,
        quantities,
        x_grid: sweep.x_grid.clone(),
        b_grid,
        k_grid,
        gamma_grid: sweep.gamma_grid.clone(),
        theta: sweep.theta.unwrap_or(0.0),
        output: sweep.output,
        oracle,
        oracle_n_theta,
        cluster,
    })
}

/// One output row. Optional fields print as empty cells.
#[derive(Debug, Clone, Default)]
pub struct ResultRow {
    pub scenario_id: String,
    pub quantity: String,
    pub x: Option<f64>,
    pub b: f64,
    pub k: f64,
    pub alpha_d: Option<f64>,
    pub alpha_u: Option<f64>,
    pub gamma: Option<f64>,
    pub value_linear: f64,
    pub oracle_value: Option<f64>,
    pub oracle_tail_or_stderr: Option<f64>,
    pub rel_err: Option<f64>,
}

pub const RESULT_HEADER: &str = "scenario_id,quantity,x,b,k,alpha_d,alpha_u,gamma,\
                                 value_linear,value_db,oracle_value,oracle_tail_or_stderr,rel_err";

fn push_opt(line: &mut String, v: Option<f64>) {
    match v {
        Some(v) => {
            let _ = write!(line, ",{v}");
        }
        None => line.push(','),
    }
}

impl ResultRow {
    pub fn to_csv_line(&self) -> String {
        let mut line = String::new();
        let _ = write!(line, "{},{}", self.scenario_id, self.quantity);
        push_opt(&mut line, self.x);
        let _ = write!(line, ",{},{}", self.b, self.k);
        push_opt(&mut line, self.alpha_d);
        push_opt(&mut line, self.alpha_u);
        push_opt(&mut line, self.gamma);
        let _ = write!(line, ",{}", self.value_linear);
        // dB only exists for positive linear values.
        if self.value_linear > 0.0 {
            let _ = write!(line, ",{}", 10.0 * self.value_linear.log10());
        } else {
            line.push(',');
        }
        push_opt(&mut line, self.oracle_value);
        push_opt(&mut line, self.oracle_tail_or_stderr);
        push_opt(&mut line, self.rel_err);
        line
    }
}

pub fn write_rows(path: &Path, rows: &[ResultRow]) -> Result<(), CliError> {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(RESULT_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv_line());
        out.push('\n');
    }
    std::fs::write(path, out)
        .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))
}
