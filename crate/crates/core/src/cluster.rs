//! Clustered small-cell layer: the Ã₂ coefficient, clustered DL→UL ISR,
//! uplink SINR and coverage probability.
//!
//! Clusters sit on their own hexagonal lattice (spacing δ̃ = δ/√3 when derived
//! from a macro layer) and hold N small cells uniformly distributed in a disc
//! of radius R̃. Cells inside one cluster share a transmission direction, so
//! cross-link interference only crosses cluster boundaries. Macro-layer
//! interference and UL→UL terms are excluded: the layers run in different
//! bands and the uplink-on-uplink contribution is negligible here.

use crate::error::{CoreError, Result};
use crate::isr::{sum_blocks, SeriesControl};
use crate::lattice::SQRT3;
use crate::specfun::{self, SpecFunAccuracy};

/// Cluster lattice and small-cell layer constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterParams {
    /// Inter-cluster distance δ̃.
    pub delta_tilde: f64,
    /// Cluster disc radius R̃.
    pub cluster_radius: f64,
    /// Small-cell radius R̃_s (serving disc of the studied cell).
    pub smallcell_radius: f64,
    /// Small-cell intensity λ (cells per unit area inside a cluster disc).
    pub intensity: f64,
    /// Cells per cluster, N = λ·πR̃².
    pub n_cells: usize,
    /// Small-cell downlink power P̃.
    pub p_small_dl: f64,
    /// Small-cell uplink target power P̃*.
    pub p_small_target: f64,
    /// Distance ρ̃₀ of the studied small cell from its cluster center.
    pub rho0: f64,
    /// Noise power P_N.
    pub p_noise: f64,
}

impl ClusterParams {
    /// Default geometry derived from a macro layer of inter-site distance δ:
    /// δ̃ = δ/√3, R̃ = 0.4 δ̃, R̃_s = δ̃/5, three cells per cluster, unit powers,
    /// studied cell at ρ̃₀ = 0.2 δ̃, no noise.
    pub fn default_for_macro(delta: f64) -> Self {
        let delta_tilde = delta / SQRT3;
        let cluster_radius = 0.4 * delta_tilde;
        Self {
            delta_tilde,
            cluster_radius,
            smallcell_radius: delta_tilde / 5.0,
            intensity: 3.0 / (std::f64::consts::PI * cluster_radius * cluster_radius),
            n_cells: 3,
            p_small_dl: 1.0,
            p_small_target: 1.0,
            rho0: 0.2 * delta_tilde,
            p_noise: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("delta_tilde", self.delta_tilde),
            ("cluster_radius", self.cluster_radius),
            ("smallcell_radius", self.smallcell_radius),
            ("intensity", self.intensity),
            ("p_small_dl", self.p_small_dl),
            ("p_small_target", self.p_small_target),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(CoreError::domain(format!("{name} must be positive")));
            }
        }
        if self.n_cells == 0 {
            return Err(CoreError::domain("n_cells must be positive"));
        }
        if !(self.rho0 >= 0.0 && self.rho0 <= self.cluster_radius) {
            return Err(CoreError::domain(
                "rho0 must lie inside the cluster disc (0 <= rho0 <= cluster_radius)",
            ));
        }
        if self.p_noise < 0.0 {
            return Err(CoreError::domain("p_noise must be nonnegative"));
        }
        let implied = self.intensity * std::f64::consts::PI * self.cluster_radius.powi(2);
        if (implied - self.n_cells as f64).abs() > 1e-6 * self.n_cells as f64 {
            return Err(CoreError::domain(format!(
                "intensity and n_cells disagree: lambda*pi*R^2 = {implied}, n_cells = {}",
                self.n_cells
            )));
        }
        Ok(())
    }
}

/// Mobile position in the studied small cell: x̃ = r̃/δ̃, plus the propagation
/// pair (b, k) the small-cell layer runs with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallCellQuery {
    pub x_tilde: f64,
    pub b: f64,
    pub k: f64,
}

impl SmallCellQuery {
    pub fn new(x_tilde: f64, b: f64, k: f64) -> Result<Self> {
        let q = Self { x_tilde, b, k };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_tilde >= 0.0 && self.x_tilde < 1.0) {
            return Err(CoreError::domain(format!(
                "x_tilde must lie in [0, 1) (got {})",
                self.x_tilde
            )));
        }
        if !(self.b.is_finite() && self.b > 1.0) {
            return Err(CoreError::domain("b must exceed 1"));
        }
        if !(0.0..=1.0).contains(&self.k) {
            return Err(CoreError::domain("k must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// Normalized noise-to-target ratio ỹ₀ = P_N δ̃^{2b(1−k)} / P̃*.
///
/// The small-cell target power P̃* sits in the denominator: the layer under
/// study is the small-cell one, so its own target power normalizes the noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseTerm {
    pub y0: f64,
}

pub fn noise_term(cp: &ClusterParams, q: &SmallCellQuery) -> NoiseTerm {
    NoiseTerm {
        y0: cp.p_noise * cp.delta_tilde.powf(2.0 * q.b * (1.0 - q.k)) / cp.p_small_target,
    }
}

/// The clustered DL→UL coefficient
///
/// Ã₂(b) = (6πR̃²P̃λ / (P̃*Γ(b)²δ̃^{2bk})) Σ_{h,n,i} Γ(b+h)² ω(b+h)
///         · R̃^{2(n+i)} ρ̃₀^{2(h−n−i)} / [δ̃^{2h} Γ(n+1)²Γ(h+1)Γ(i+1)Γ(h−2n−i+1)(n+i+1)].
///
/// The radius factors are arranged as R̃^{2(n+i)}·ρ̃₀^{2(h−n−i)}/δ̃^{2h}; the
/// ρ̃₀ exponent is ≥ 0 across the whole index range, so ρ̃₀ = 0 is an ordinary
/// point: only the n = 0, i = h terms survive.
pub fn coef_a2_tilde(cp: &ClusterParams, q: &SmallCellQuery, sc: &SeriesControl) -> Result<f64> {
    cp.validate()?;
    q.validate()?;
    let b = q.b;
    let bk = q.b * q.k;
    let acc = SpecFunAccuracy::default();
    let ln_gb = specfun::gamma_ln(b)?;
    let ln_r2 = 2.0 * cp.cluster_radius.ln();
    let ln_d2 = 2.0 * cp.delta_tilde.ln();
    let rho0 = cp.rho0;
    let ln_rho2 = if rho0 > 0.0 { 2.0 * rho0.ln() } else { 0.0 };
    let series = sum_blocks(sc, |h| {
        let hf = h as f64;
        let ln_base = 2.0 * (specfun::gamma_ln(b + hf)? - ln_gb)
            + specfun::omega(b + hf, &acc)?.ln()
            - specfun::gamma_ln(hf + 1.0)?
            - hf * ln_d2;
        let mut s_h = 0.0;
        for n in 0..=h / 2 {
            let nf = n as f64;
            for i in 0..=(h - 2 * n) {
                let rho_pow = h - n - i;
                if rho0 == 0.0 && rho_pow > 0 {
                    continue;
                }
                let fi = i as f64;
                let ln_t = ln_base
                    - 2.0 * specfun::gamma_ln(nf + 1.0)?
                    - specfun::gamma_ln(fi + 1.0)?
                    - specfun::gamma_ln((h - 2 * n - i) as f64 + 1.0)?
                    - (nf + fi + 1.0).ln()
                    + (nf + fi) * ln_r2
                    + rho_pow as f64 * ln_rho2;
                s_h += ln_t.exp();
            }
        }
        Ok(s_h)
    })?;
    let prefactor = 6.0
        * std::f64::consts::PI
        * cp.cluster_radius.powi(2)
        * cp.p_small_dl
        * cp.intensity
        / (cp.p_small_target * cp.delta_tilde.powf(2.0 * bk));
    Ok(prefactor * series)
}

/// Clustered DL→UL ISR: Ã₂(b) · x̃^{2b(1−k)}.
pub fn isr_dl_ul_clustered(
    q: &SmallCellQuery,
    cp: &ClusterParams,
    sc: &SeriesControl,
) -> Result<f64> {
    let a2 = coef_a2_tilde(cp, q, sc)?;
    Ok(a2 * q.x_tilde.powf(2.0 * q.b * (1.0 - q.k)))
}

/// Uplink SINR of the studied small cell. At x̃ = 0 with k < 1 the interference
/// and noise both vanish, which is reported as a distinguished unbounded
/// outcome rather than a division error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sinr {
    Finite(f64),
    Unbounded,
}

impl Sinr {
    pub fn as_f64(&self) -> f64 {
        match self {
            Sinr::Finite(v) => *v,
            Sinr::Unbounded => f64::INFINITY,
        }
    }

    pub fn exceeds(&self, gamma: f64) -> bool {
        self.as_f64() > gamma
    }
}

/// Π(x̃) = 1 / (U↓(x̃) + ỹ₀ x̃^{2b(1−k)}), linear scale.
pub fn sinr_ul(q: &SmallCellQuery, cp: &ClusterParams, sc: &SeriesControl) -> Result<Sinr> {
    cp.validate()?;
    q.validate()?;
    if q.x_tilde == 0.0 && q.k < 1.0 {
        return Ok(Sinr::Unbounded);
    }
    let u = isr_dl_ul_clustered(q, cp, sc)?;
    let y0 = noise_term(cp, q).y0;
    let denom = u + y0 * q.x_tilde.powf(2.0 * q.b * (1.0 - q.k));
    if denom == 0.0 {
        return Ok(Sinr::Unbounded);
    }
    Ok(Sinr::Finite(1.0 / denom))
}

/// Inverse of y(x̃) = 1/Π(x̃): g(y) = (y / (Ã₂(b) + ỹ₀))^{1/(2b(1−k))}.
/// Undefined at k = 1, where y(x̃) is constant.
pub fn g_inverse(y: f64, cp: &ClusterParams, q: &SmallCellQuery, sc: &SeriesControl) -> Result<f64> {
    cp.validate()?;
    q.validate()?;
    if !(y > 0.0) {
        return Err(CoreError::domain("g_inverse requires y > 0"));
    }
    if q.k >= 1.0 {
        return Err(CoreError::non_invertible(
            "k = 1 makes the SINR constant in x_tilde",
        ));
    }
    let a2 = coef_a2_tilde(cp, q, sc)?;
    let y0 = noise_term(cp, q).y0;
    Ok((y / (a2 + y0)).powf(1.0 / (2.0 * q.b * (1.0 - q.k))))
}

/// Coverage probability Φ(γ) = min[((δ̃/R̃_s) g(1/γ))², 1] for k < 1.
///
/// At k = 1 the SINR is the same at every position, so Φ degenerates to the
/// exact step function: 1 below 1/(Ã₂+ỹ₀), 0 at or above it.
pub fn coverage_probability(
    gamma: f64,
    cp: &ClusterParams,
    q: &SmallCellQuery,
    sc: &SeriesControl,
) -> Result<f64> {
    cp.validate()?;
    q.validate()?;
    if !(gamma > 0.0) {
        return Err(CoreError::domain("coverage threshold gamma must be positive"));
    }
    if q.k >= 1.0 {
        let a2 = coef_a2_tilde(cp, q, sc)?;
        let y0 = noise_term(cp, q).y0;
        return Ok(if gamma < 1.0 / (a2 + y0) { 1.0 } else { 0.0 });
    }
    let g = g_inverse(1.0 / gamma, cp, q, sc)?;
    Ok(((cp.delta_tilde / cp.smallcell_radius) * g).powi(2).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cp() -> ClusterParams {
        ClusterParams::default_for_macro(1.0)
    }

    fn sq(x: f64, b: f64, k: f64) -> SmallCellQuery {
        SmallCellQuery { x_tilde: x, b, k }
    }

    #[test]
    fn a2_tilde_is_finite_at_cluster_center() {
        let sc = SeriesControl::default();
        let mut p = cp();
        p.rho0 = 0.0;
        let v = coef_a2_tilde(&p, &sq(0.3, 1.75, 0.8), &sc).unwrap();
        assert!(v.is_finite() && v > 0.0);
    }

    #[test]
    fn a2_tilde_continuous_at_rho0_zero() {
        // The rearranged exponents make ρ̃₀ → 0 approach the ρ̃₀ = 0 value.
        let sc = SeriesControl::default();
        let q = sq(0.3, 1.75, 0.8);
        let mut at_zero = cp();
        at_zero.rho0 = 0.0;
        let v0 = coef_a2_tilde(&at_zero, &q, &sc).unwrap();
        let mut near_zero = cp();
        near_zero.rho0 = 1e-7;
        let v1 = coef_a2_tilde(&near_zero, &q, &sc).unwrap();
        assert_relative_eq!(v0, v1, max_relative = 1e-9);
    }

    #[test]
    fn a2_tilde_linear_in_power_ratio_and_intensity() {
        let sc = SeriesControl::default();
        let q = sq(0.3, 1.2, 0.4);
        let base = coef_a2_tilde(&cp(), &q, &sc).unwrap();
        let mut scaled = cp();
        scaled.p_small_dl = 7.0;
        assert_relative_eq!(
            coef_a2_tilde(&scaled, &q, &sc).unwrap(),
            7.0 * base,
            max_relative = 1e-13
        );
        // Doubling the intensity (and the implied cell count) doubles Ã₂.
        let mut dense = cp();
        dense.intensity *= 2.0;
        dense.n_cells = 6;
        assert_relative_eq!(
            coef_a2_tilde(&dense, &q, &sc).unwrap(),
            2.0 * base,
            max_relative = 1e-13
        );
    }

    #[test]
    fn clustered_isr_edge_cases() {
        let sc = SeriesControl::default();
        let p = cp();
        // x̃ = 0 with k < 1 vanishes.
        assert_eq!(
            isr_dl_ul_clustered(&sq(0.0, 1.2, 0.4), &p, &sc).unwrap(),
            0.0
        );
        // k = 1 is flat in x̃.
        let a2 = coef_a2_tilde(&p, &sq(0.0, 1.75, 1.0), &sc).unwrap();
        for &x in &[0.0, 0.2, 0.7] {
            assert_eq!(
                isr_dl_ul_clustered(&sq(x, 1.75, 1.0), &p, &sc)
                    .unwrap()
                    .to_bits(),
                a2.to_bits()
            );
        }
    }

    #[test]
    fn sinr_outcomes() {
        let sc = SeriesControl::default();
        let p = cp();
        assert_eq!(sinr_ul(&sq(0.0, 1.75, 0.8), &p, &sc).unwrap(), Sinr::Unbounded);
        // Zero noise: Π = x̃^{-2b(1-k)} / Ã₂.
        let q = sq(0.3, 1.75, 0.8);
        let a2 = coef_a2_tilde(&p, &q, &sc).unwrap();
        let pi = sinr_ul(&q, &p, &sc).unwrap().as_f64();
        assert_relative_eq!(
            pi,
            0.3f64.powf(-2.0 * 1.75 * 0.2) / a2,
            max_relative = 1e-12
        );
        // k = 1: Π = 1/(Ã₂ + ỹ₀) regardless of x̃.
        let mut noisy = cp();
        noisy.p_noise = 1e-6;
        let qa = sq(0.1, 1.75, 1.0);
        let qb = sq(0.6, 1.75, 1.0);
        assert_eq!(
            sinr_ul(&qa, &noisy, &sc).unwrap().as_f64().to_bits(),
            sinr_ul(&qb, &noisy, &sc).unwrap().as_f64().to_bits()
        );
    }

    #[test]
    fn g_inverse_round_trip() {
        let sc = SeriesControl::default();
        let p = cp();
        let q = sq(0.25, 1.75, 0.8);
        let a2 = coef_a2_tilde(&p, &q, &sc).unwrap();
        let y0 = noise_term(&p, &q).y0;
        // Plug-in: y at the normalized distance 1.
        assert_relative_eq!(
            g_inverse(a2 + y0, &p, &q, &sc).unwrap(),
            1.0,
            max_relative = 1e-12
        );
        // Round trip through the SINR at x̃ = 0.25.
        let pi = sinr_ul(&q, &p, &sc).unwrap().as_f64();
        assert_relative_eq!(
            g_inverse(1.0 / pi, &p, &q, &sc).unwrap(),
            0.25,
            max_relative = 1e-10
        );
        // Exponent arithmetic: y = 10·(Ã₂+ỹ₀) at b = 1.75, k = 0.8 gives 10^(1/0.7).
        assert_relative_eq!(
            g_inverse(10.0 * (a2 + y0), &p, &q, &sc).unwrap(),
            26.826_957_952_797_258,
            max_relative = 1e-12
        );
        assert!(g_inverse(1.0, &p, &sq(0.25, 1.75, 1.0), &sc).is_err());
    }

    #[test]
    fn coverage_limits_and_monotonicity() {
        let sc = SeriesControl::default();
        let p = cp();
        let q = sq(0.1, 1.75, 0.8);
        assert_relative_eq!(
            coverage_probability(1e-12, &p, &q, &sc).unwrap(),
            1.0,
            max_relative = 1e-12
        );
        assert!(coverage_probability(1e12, &p, &q, &sc).unwrap() < 1e-6);
        let mut prev = f64::INFINITY;
        for i in 0..50 {
            let gamma = 10f64.powf(-3.0 + 6.0 * i as f64 / 49.0);
            let phi = coverage_probability(gamma, &p, &q, &sc).unwrap();
            assert!((0.0..=1.0).contains(&phi));
            assert!(phi <= prev + 1e-15, "coverage must not increase with gamma");
            prev = phi;
        }
    }

    #[test]
    fn sinr_strictly_decreases_with_distance_below_full_compensation() {
        let sc = SeriesControl::default();
        let mut p = cp();
        p.p_noise = 1e-6;
        for &(b, k) in &[(1.2, 0.0), (1.2, 0.4), (1.75, 0.8)] {
            let mut prev = f64::INFINITY;
            for i in 1..=18 {
                let x = 0.05 * i as f64;
                let pi = sinr_ul(&sq(x, b, k), &p, &sc).unwrap().as_f64();
                assert!(
                    pi < prev,
                    "SINR must fall with distance at b={b}, k={k}, x={x}"
                );
                prev = pi;
            }
        }
    }

    #[test]
    fn coverage_step_at_full_compensation() {
        let sc = SeriesControl::default();
        let mut p = cp();
        p.p_noise = 1e-6;
        let q = sq(0.1, 1.75, 1.0);
        let a2 = coef_a2_tilde(&p, &q, &sc).unwrap();
        let y0 = noise_term(&p, &q).y0;
        let edge = 1.0 / (a2 + y0);
        assert_eq!(coverage_probability(edge * 0.999, &p, &q, &sc).unwrap(), 1.0);
        assert_eq!(coverage_probability(edge * 1.001, &p, &q, &sc).unwrap(), 0.0);
    }

    #[test]
    fn params_validation() {
        let mut bad = cp();
        bad.rho0 = bad.cluster_radius * 1.5;
        assert!(bad.validate().is_err());
        let mut inconsistent = cp();
        inconsistent.n_cells = 5;
        assert!(inconsistent.validate().is_err());
        assert!(SmallCellQuery::new(1.0, 1.75, 0.5).is_err());
        assert!(SmallCellQuery::new(0.5, 0.9, 0.5).is_err());
    }
}
