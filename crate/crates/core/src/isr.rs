//! Closed-form macro-layer interference-to-signal ratios for dynamic TDD.
//!
//! Four components are evaluated: DL→DL and UL→DL seen during a downlink
//! cycle, UL→UL and DL→UL seen during an uplink cycle. The direction mix
//! (α_d, α_u) weighs them into the totals. Every series term is formed in
//! the log domain from `gamma_ln` differences, so coefficients stay finite
//! far past the point where Γ(b+h)² would overflow.

use crate::error::{CoreError, Result};
use crate::specfun::{self, SpecFunAccuracy};

/// Domain edge for the normalized mobile distance: 1/√3, always satisfied
/// inside a hexagonal cell.
pub const X_MAX: f64 = 0.577_350_269_189_625_7;

/// Macro-layer geometry, propagation and power constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkParams {
    /// Inter-site distance δ (1 = normalized units).
    pub delta: f64,
    /// Half path-loss exponent: L = |s−m|^{2b}.
    pub b: f64,
    /// Fractional power-control compensation factor, k ∈ [0, 1].
    pub k: f64,
    /// Common downlink transmit power P.
    pub p_dl: f64,
    /// Uplink target power P*.
    pub p_target: f64,
    /// Cell radius R, with R < δ.
    pub cell_radius: f64,
    /// Noise power P_N.
    pub p_noise: f64,
}

impl Default for NetworkParams {
    fn default() -> Self {
        Self {
            delta: 1.0,
            b: 1.75,
            k: 0.8,
            p_dl: 1.0,
            p_target: 1.0,
            cell_radius: 0.45,
            p_noise: 0.0,
        }
    }
}

impl NetworkParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(CoreError::domain("delta must be positive"));
        }
        if !(self.b.is_finite() && self.b > 1.0) {
            return Err(CoreError::domain(format!(
                "b must exceed 1 (got {}); every series needs z = b + h > 1",
                self.b
            )));
        }
        if !(0.0..=1.0).contains(&self.k) {
            return Err(CoreError::domain("k must lie in [0, 1]"));
        }
        if !(self.p_dl > 0.0) || !(self.p_target > 0.0) {
            return Err(CoreError::domain("powers must be positive"));
        }
        if !(self.cell_radius > 0.0 && self.cell_radius < self.delta) {
            return Err(CoreError::domain("cell_radius must satisfy 0 < R < delta"));
        }
        if self.p_noise < 0.0 {
            return Err(CoreError::domain("p_noise must be nonnegative"));
        }
        Ok(())
    }
}

/// Fractions of cells transmitting downlink / uplink.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrafficMix {
    pub alpha_d: f64,
    pub alpha_u: f64,
}

impl TrafficMix {
    pub fn new(alpha_d: f64, alpha_u: f64) -> Result<Self> {
        let mix = Self { alpha_d, alpha_u };
        mix.validate()?;
        Ok(mix)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha_d) || !(0.0..=1.0).contains(&self.alpha_u) {
            return Err(CoreError::domain("mix fractions must lie in [0, 1]"));
        }
        if self.alpha_d + self.alpha_u > 1.0 {
            return Err(CoreError::domain("alpha_d + alpha_u must not exceed 1"));
        }
        Ok(())
    }
}

/// A mobile position in the serving cell: x = r/δ and the polar angle θ.
///
/// θ is accepted for interface completeness but unused by the closed forms,
/// which are angle-averaged; the oracle exposes θ to quantify how slowly the
/// true sums vary with it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobileQuery {
    pub x: f64,
    pub theta: f64,
}

impl MobileQuery {
    pub fn new(x: f64, theta: f64) -> Result<Self> {
        let q = Self { x, theta };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x >= 0.0 && self.x < X_MAX) {
            return Err(CoreError::domain(format!(
                "x must lie in [0, 1/sqrt(3)) (got {}); the series expansion is only \
                 guaranteed there",
                self.x
            )));
        }
        if !self.theta.is_finite() {
            return Err(CoreError::domain("theta must be finite"));
        }
        Ok(())
    }
}

/// Truncation and stopping policy for the interference series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    /// Hard cap on the outer index h.
    pub h_max: usize,
    /// Stop once a block contributes less than this, relative to the partial sum.
    pub rel_stop: f64,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            h_max: 60,
            rel_stop: 1e-14,
        }
    }
}

impl SeriesControl {
    pub fn new(h_max: usize, rel_stop: f64) -> Result<Self> {
        let sc = Self { h_max, rel_stop };
        sc.validate()?;
        Ok(sc)
    }

    pub fn validate(&self) -> Result<()> {
        if self.h_max < 5 {
            return Err(CoreError::domain("h_max must be at least 5"));
        }
        if !(self.rel_stop > 0.0 && self.rel_stop < 1.0) {
            return Err(CoreError::domain("rel_stop must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// All four ISR components plus the mix-weighted totals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsrBreakdown {
    pub dl_to_dl: f64,
    pub ul_to_dl: f64,
    pub ul_to_ul: f64,
    pub dl_to_ul: f64,
    pub total_dl: f64,
    pub total_ul: f64,
}

/// Sums nonnegative per-index blocks under the stopping rule: stop at the
/// first h ≥ 5 whose block falls below rel_stop relative to the partial sum;
/// reaching h_max without that is a hard convergence error.
pub(crate) fn sum_blocks(
    sc: &SeriesControl,
    mut block: impl FnMut(usize) -> Result<f64>,
) -> Result<f64> {
    sc.validate()?;
    let mut total = 0.0f64;
    let mut last_rel = f64::INFINITY;
    for h in 0..=sc.h_max {
        let term = block(h)?;
        debug_assert!(term >= 0.0, "series terms must be nonnegative");
        total += term;
        if h >= 5 {
            if term == 0.0 {
                return Ok(total);
            }
            last_rel = term / total;
            if last_rel < sc.rel_stop {
                return Ok(total);
            }
        }
    }
    Err(CoreError::convergence(sc.h_max, last_rel))
}

/// DL→DL ISR: (6x^{2b}/Γ(b)²) Σ_h [Γ(b+h)²/Γ(h+1)²] ω(b+h) x^{2h}.
pub fn isr_dl_dl(q: &MobileQuery, np: &NetworkParams, sc: &SeriesControl) -> Result<f64> {
    np.validate()?;
    q.validate()?;
    if q.x == 0.0 {
        return Ok(0.0);
    }
    let b = np.b;
    let acc = SpecFunAccuracy::default();
    let ln_gb = specfun::gamma_ln(b)?;
    let ln_x2 = 2.0 * q.x.ln();
    let series = sum_blocks(sc, |h| {
        let hf = h as f64;
        let w = specfun::omega(b + hf, &acc)?;
        let ln_t = 2.0 * (specfun::gamma_ln(b + hf)? - ln_gb)
            - 2.0 * specfun::gamma_ln(hf + 1.0)?
            + w.ln()
            + hf * ln_x2;
        Ok(ln_t.exp())
    })?;
    Ok(6.0 * (b * ln_x2).exp() * series)
}

/// UL→DL ISR: the triple series over (h, n, i) with prefactor
/// 6 P* x^{2b} R^{2bk} / (P Γ(b)²). Inner (n, i) ranges are finite per h and
/// accumulated in one pass; the stopping rule applies to the outer h blocks.
pub fn isr_ul_dl(q: &MobileQuery, np: &NetworkParams, sc: &SeriesControl) -> Result<f64> {
    np.validate()?;
    q.validate()?;
    if q.x == 0.0 {
        return Ok(0.0);
    }
    // The interferer disc must stay inside the unit disc of the expansion:
    // the (h, n, i) blocks decay like (x + R/δ)^{2h} and diverge past 1.
    let reach = q.x + np.cell_radius / np.delta;
    if reach >= 1.0 {
        return Err(CoreError::domain(format!(
            "the interferer-cell expansion diverges for x + R/delta >= 1 (got {reach:.4})"
        )));
    }
    let b = np.b;
    let bk = np.b * np.k;
    let acc = SpecFunAccuracy::default();
    let ln_gb = specfun::gamma_ln(b)?;
    let ln_x2 = 2.0 * q.x.ln();
    let ln_rr2 = 2.0 * (np.cell_radius / np.delta).ln();
    let series = sum_blocks(sc, |h| {
        let hf = h as f64;
        let ln_base = 2.0 * (specfun::gamma_ln(b + hf)? - ln_gb)
            + specfun::omega(b + hf, &acc)?.ln()
            - specfun::gamma_ln(hf + 1.0)?;
        let mut s_h = 0.0;
        for n in 0..=h / 2 {
            let nf = n as f64;
            for i in 0..=(h - 2 * n) {
                let fi = i as f64;
                let ln_t = ln_base
                    - 2.0 * specfun::gamma_ln(nf + 1.0)?
                    - specfun::gamma_ln(fi + 1.0)?
                    - specfun::gamma_ln((h - 2 * n - i) as f64 + 1.0)?
                    - (nf + fi + bk + 1.0).ln()
                    + (nf + fi) * ln_rr2
                    + (hf - nf - fi) * ln_x2;
                s_h += ln_t.exp();
            }
        }
        Ok(s_h)
    })?;
    let prefactor = 6.0 * (np.p_target / np.p_dl)
        * (b * ln_x2).exp()
        * np.cell_radius.powf(2.0 * bk);
    Ok(prefactor * series)
}

/// The UL→UL coefficient
/// A₁(b) = (6(R/δ)^{2bk}/Γ(b)²) Σ_h Γ(b+h)² ω(b+h) (R/δ)^{2h} / [Γ(h+1)²(bk+h+1)].
pub fn coef_a1(np: &NetworkParams, sc: &SeriesControl) -> Result<f64> {
    np.validate()?;
    let b = np.b;
    let bk = np.b * np.k;
    let acc = SpecFunAccuracy::default();
    let ln_gb = specfun::gamma_ln(b)?;
    let r_ratio = np.cell_radius / np.delta;
    let ln_rr2 = 2.0 * r_ratio.ln();
    let series = sum_blocks(sc, |h| {
        let hf = h as f64;
        let ln_t = 2.0 * (specfun::gamma_ln(b + hf)? - ln_gb)
            + specfun::omega(b + hf, &acc)?.ln()
            - 2.0 * specfun::gamma_ln(hf + 1.0)?
            - (bk + hf + 1.0).ln()
            + hf * ln_rr2;
        Ok(ln_t.exp())
    })?;
    Ok(6.0 * r_ratio.powf(2.0 * bk) * series)
}

/// UL→UL ISR: A₁(b) · x^{2b(1−k)}.
pub fn isr_ul_ul(q: &MobileQuery, np: &NetworkParams, sc: &SeriesControl) -> Result<f64> {
    q.validate()?;
    let a1 = coef_a1(np, sc)?;
    Ok(a1 * q.x.powf(2.0 * np.b * (1.0 - np.k)))
}

/// The DL→UL coefficient, A₂(b) = 6 P ω(b) / (P* δ^{2bk}).
///
/// The six-fold multiplicity of the lattice shells belongs in the constant:
/// the bare lattice sum Σ_{s∈Λ*} |s/δ|^{-2b} equals 6ω(b), matching the h = 0
/// coefficient of the DL→DL series. `oracle::adjudicate_dl_ul_constant`
/// reproduces that adjudication numerically.
pub fn coef_a2(np: &NetworkParams) -> Result<f64> {
    np.validate()?;
    let w = specfun::omega(np.b, &SpecFunAccuracy::default())?;
    Ok(6.0 * np.p_dl * w / (np.p_target * np.delta.powf(2.0 * np.b * np.k)))
}

/// DL→UL ISR: A₂(b) · x^{2b(1−k)}. Exact — no series in x.
pub fn isr_dl_ul(q: &MobileQuery, np: &NetworkParams) -> Result<f64> {
    q.validate()?;
    let a2 = coef_a2(np)?;
    Ok(a2 * q.x.powf(2.0 * np.b * (1.0 - np.k)))
}

/// Total downlink-cycle ISR: D = α_d·D↓ + α_u·D↑.
pub fn isr_dl_total(
    q: &MobileQuery,
    np: &NetworkParams,
    mix: &TrafficMix,
    sc: &SeriesControl,
) -> Result<f64> {
    mix.validate()?;
    Ok(mix.alpha_d * isr_dl_dl(q, np, sc)? + mix.alpha_u * isr_ul_dl(q, np, sc)?)
}

/// Total uplink-cycle ISR: U = α_u·U↑ + α_d·U↓.
pub fn isr_ul_total(
    q: &MobileQuery,
    np: &NetworkParams,
    mix: &TrafficMix,
    sc: &SeriesControl,
) -> Result<f64> {
    mix.validate()?;
    Ok(mix.alpha_u * isr_ul_ul(q, np, sc)? + mix.alpha_d * isr_dl_ul(q, np)?)
}

/// All four components and both totals in one pass. The totals are the exact
/// affine combinations of the components by construction.
pub fn isr_breakdown(
    q: &MobileQuery,
    np: &NetworkParams,
    mix: &TrafficMix,
    sc: &SeriesControl,
) -> Result<IsrBreakdown> {
    mix.validate()?;
    let dl_to_dl = isr_dl_dl(q, np, sc)?;
    let ul_to_dl = isr_ul_dl(q, np, sc)?;
    let ul_to_ul = isr_ul_ul(q, np, sc)?;
    let dl_to_ul = isr_dl_ul(q, np)?;
    Ok(IsrBreakdown {
        dl_to_dl,
        ul_to_dl,
        ul_to_ul,
        dl_to_ul,
        total_dl: mix.alpha_d * dl_to_dl + mix.alpha_u * ul_to_dl,
        total_ul: mix.alpha_u * ul_to_ul + mix.alpha_d * dl_to_ul,
    })
}
