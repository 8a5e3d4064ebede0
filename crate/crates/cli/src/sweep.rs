//! Parameter sweeps: one row per (quantity, grid point), deterministic order,
//! optional oracle columns when the scenario carries an oracle section.

use dtdd_core::cluster::{self, SmallCellQuery};
use dtdd_core::isr::{self, MobileQuery, NetworkParams};
use dtdd_core::oracle;
use dtdd_core::{CoreError, Sinr};

use crate::scenario::{Quantity, ResultRow, Scenario};
use crate::CliError;

pub fn run_sweep(scenario: &Scenario) -> Result<Vec<ResultRow>, CliError> {
    if scenario.quantities.is_empty() {
        return Err(CliError::config("sweep lists no quantities"));
    }
    let needs_x = scenario.quantities.iter().any(|q| !q.uses_gamma());
    if needs_x && scenario.x_grid.is_empty() {
        return Err(CliError::config("x_grid is empty; a vacuous sweep is rejected"));
    }
    if scenario.quantities.iter().any(|q| q.uses_gamma()) && scenario.gamma_grid.is_empty() {
        return Err(CliError::config("coverage sweeps need a non-empty gamma_grid"));
    }
    if scenario.quantities.iter().any(|q| q.uses_mix()) && scenario.mixes.is_empty() {
        return Err(CliError::config(
            "isr_dl_total / isr_ul_total sweeps need at least one [[mix]]",
        ));
    }
    if scenario.quantities.iter().any(|q| q.uses_cluster()) && scenario.cluster.is_none() {
        return Err(CliError::config(
            "clustered quantities need a [cluster] section",
        ));
    }

    // Domain screening up front: every offending row is listed.
    let mut domain_errors = Vec::new();
    for q in &scenario.quantities {
        for &x in &scenario.x_grid {
            if q.uses_gamma() {
                continue;
            }
            if q.uses_cluster() {
                if !(0.0..1.0).contains(&x) {
                    domain_errors.push(format!(
                        "{}: x_tilde = {x} outside [0, 1)",
                        q.name()
                    ));
                }
            } else if !(0.0..isr::X_MAX).contains(&x) {
                domain_errors.push(format!(
                    "{}: x = {x} outside [0, 1/sqrt(3))",
                    q.name()
                ));
            }
        }
    }
    if !domain_errors.is_empty() {
        return Err(CliError::config(format!(
            "domain violations:\n  {}",
            domain_errors.join("\n  ")
        )));
    }

    let mut rows = Vec::new();
    for q in &scenario.quantities {
        for &b in &scenario.b_grid {
            let np = NetworkParams {
                b,
                ..scenario.network
            };
            if q.uses_gamma() {
                for &gamma in &scenario.gamma_grid {
                    rows.push(coverage_row(scenario, &np, gamma)?);
                }
            } else if q.uses_mix() {
                for mix in &scenario.mixes {
                    for &x in &scenario.x_grid {
                        rows.push(total_row(scenario, *q, &np, mix, x)?);
                    }
                }
            } else {
                for &x in &scenario.x_grid {
                    rows.push(component_row(scenario, *q, &np, x)?);
                }
            }
        }
    }
    Ok(rows)
}

fn base_row(scenario: &Scenario, q: Quantity, b: f64, k: f64) -> ResultRow {
    ResultRow {
        scenario_id: scenario.id.clone(),
        quantity: q.name().to_string(),
        b,
        k,
        ..ResultRow::default()
    }
}

fn attach_oracle(row: &mut ResultRow, value: f64, err: f64) {
    row.oracle_value = Some(value);
    row.oracle_tail_or_stderr = Some(err);
    if value != 0.0 {
        row.rel_err = Some((row.value_linear - value).abs() / value.abs());
    }
}

fn component_row(
    scenario: &Scenario,
    q: Quantity,
    np: &NetworkParams,
    x: f64,
) -> Result<ResultRow, CliError> {
    let sc = &scenario.series;
    let mut row = base_row(scenario, q, np.b, np.k);
    row.x = Some(x);
    match q {
        Quantity::IsrDlDl | Quantity::IsrUlDl | Quantity::IsrUlUl | Quantity::IsrDlUl => {
            let query = MobileQuery {
                x,
                theta: scenario.theta,
            };
            row.value_linear = match q {
                Quantity::IsrDlDl => isr::isr_dl_dl(&query, np, sc)?,
                Quantity::IsrUlDl => isr::isr_ul_dl(&query, np, sc)?,
                Quantity::IsrUlUl => isr::isr_ul_ul(&query, np, sc)?,
                _ => isr::isr_dl_ul(&query, np)?,
            };
            if let Some(oc) = &scenario.oracle {
                let n_theta = scenario.oracle_n_theta;
                let o = match q {
                    Quantity::IsrDlDl => oracle::oracle_dl_dl_theta_avg(x, np, oc, n_theta)?,
                    Quantity::IsrUlDl => oracle::oracle_ul_dl_theta_avg(x, np, oc, n_theta)?,
                    Quantity::IsrUlUl => oracle::oracle_ul_ul(x, np, oc)?,
                    _ => oracle::oracle_dl_ul(x, np, oc)?,
                };
                attach_oracle(&mut row, o.value, o.tail_bound.max(o.mc_stderr));
            }
        }
        Quantity::IsrDlUlClustered | Quantity::SinrUl => {
            let cp = scenario.cluster.as_ref().expect("screened above");
            let query = SmallCellQuery {
                x_tilde: x,
                b: np.b,
                k: np.k,
            };
            if q == Quantity::IsrDlUlClustered {
                row.value_linear = cluster::isr_dl_ul_clustered(&query, cp, sc)?;
                if let Some(oc) = &scenario.oracle {
                    let mut oc = *oc;
                    oc.lattice_max_norm = oc.lattice_max_norm.max(10.0 * cp.delta_tilde);
                    let o = oracle::oracle_cluster_dl_ul(x, cp, &query, &oc)?;
                    attach_oracle(&mut row, o.value, o.mc_stderr);
                }
            } else {
                row.value_linear = match cluster::sinr_ul(&query, cp, sc)? {
                    Sinr::Finite(v) => v,
                    Sinr::Unbounded => f64::INFINITY,
                };
            }
        }
        _ => unreachable!("totals and coverage handled separately"),
    }
    Ok(row)
}

fn total_row(
    scenario: &Scenario,
    q: Quantity,
    np: &NetworkParams,
    mix: &dtdd_core::TrafficMix,
    x: f64,
) -> Result<ResultRow, CliError> {
    let sc = &scenario.series;
    let query = MobileQuery {
        x,
        theta: scenario.theta,
    };
    let mut row = base_row(scenario, q, np.b, np.k);
    row.x = Some(x);
    row.alpha_d = Some(mix.alpha_d);
    row.alpha_u = Some(mix.alpha_u);
    row.value_linear = match q {
        Quantity::IsrDlTotal => isr::isr_dl_total(&query, np, mix, sc)?,
        _ => isr::isr_ul_total(&query, np, mix, sc)?,
    };
    if let Some(oc) = &scenario.oracle {
        let n_theta = scenario.oracle_n_theta;
        let (o_val, o_err) = match q {
            Quantity::IsrDlTotal => {
                let d = oracle::oracle_dl_dl_theta_avg(x, np, oc, n_theta)?;
                let u = oracle::oracle_ul_dl_theta_avg(x, np, oc, n_theta)?;
                (
                    mix.alpha_d * d.value + mix.alpha_u * u.value,
                    mix.alpha_d * d.tail_bound + mix.alpha_u * u.tail_bound,
                )
            }
            _ => {
                let uu = oracle::oracle_ul_ul(x, np, oc)?;
                let du = oracle::oracle_dl_ul(x, np, oc)?;
                (
                    mix.alpha_u * uu.value + mix.alpha_d * du.value,
                    mix.alpha_u * uu.tail_bound + mix.alpha_d * du.tail_bound,
                )
            }
        };
        if o_val != 0.0 || row.value_linear != 0.0 {
            attach_oracle(&mut row, o_val, o_err);
        }
    }
    Ok(row)
}

fn coverage_row(scenario: &Scenario, np: &NetworkParams, gamma: f64) -> Result<ResultRow, CliError> {
    let cp = scenario.cluster.as_ref().expect("screened above");
    let query = SmallCellQuery {
        x_tilde: 0.0,
        b: np.b,
        k: np.k,
    };
    let mut row = base_row(scenario, Quantity::Coverage, np.b, np.k);
    row.gamma = Some(gamma);
    row.value_linear = cluster::coverage_probability(gamma, cp, &query, &scenario.series)?;
    if let Some(oc) = &scenario.oracle {
        let mut oc = *oc;
        oc.lattice_max_norm = oc.lattice_max_norm.max(10.0 * cp.delta_tilde);
        let o = oracle::oracle_coverage(gamma, cp, &query, &oc)?;
        attach_oracle(&mut row, o.value, o.mc_stderr);
    }
    Ok(row)
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Convergence { .. } => CliError::NonConvergence(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}
