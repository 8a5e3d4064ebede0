//! Hexagonal lattice enumeration and truncated Epstein sums.
//!
//! Sites are s = spacing · (u + v·e^{iπ/3}) for integer (u, v), so the exact
//! squared norm is spacing² · (u² + uv + v²). All inclusion decisions compare
//! the integer quadratic form against (max_norm/spacing)², which keeps shell
//! boundaries deterministic across platforms.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{OnceLock, RwLock};

use rayon::prelude::*;

use crate::error::{CoreError, Result};

pub const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Lattice points per unit area at unit spacing (unit cell area √3/2).
pub const HEX_DENSITY: f64 = 2.0 / SQRT3;

/// Empirical bound on the disc counting defect |#{q ≤ x} − (2π/√3)x| ≤ C·x^(1/3);
/// validated against exhaustive counts up to x = 10⁶ in the tests below.
pub(crate) const COUNT_DEFECT_COEFF: f64 = 8.0;

/// Materialized enumeration is capped at this many points; larger radii go
/// through the streaming [`epstein_sum`] path.
const MAX_MATERIALIZED: f64 = 1.6e7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSpec {
    /// Inter-site distance: δ for the macro lattice, δ/√3 for the cluster lattice.
    pub spacing: f64,
}

impl LatticeSpec {
    pub fn new(spacing: f64) -> Result<Self> {
        if !spacing.is_finite() || spacing <= 0.0 {
            return Err(CoreError::domain(format!(
                "lattice spacing must be positive (got {spacing})"
            )));
        }
        Ok(Self { spacing })
    }

    /// Cluster lattice derived from a macro layer of inter-site distance δ.
    pub fn cluster_from_macro(delta: f64) -> Result<Self> {
        Self::new(delta / SQRT3)
    }

    /// Cartesian position of site (u, v).
    pub fn position(&self, u: i64, v: i64) -> (f64, f64) {
        (
            self.spacing * (u as f64 + 0.5 * v as f64),
            self.spacing * (SQRT3 / 2.0) * v as f64,
        )
    }

    /// The integer quadratic form u² + uv + v² = |u + v·e^{iπ/3}|².
    pub fn squared_form(u: i64, v: i64) -> i64 {
        u * u + u * v + v * v
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticePoint {
    pub u: i64,
    pub v: i64,
    pub x: f64,
    pub y: f64,
    pub norm: f64,
}

/// Every non-origin lattice point with norm ≤ max_norm, sorted by norm then
/// by angle in [0, 2π); the order is deterministic.
pub fn enumerate_lattice(spec: &LatticeSpec, max_norm: f64) -> Result<Vec<LatticePoint>> {
    if !max_norm.is_finite() || max_norm <= 0.0 {
        return Err(CoreError::domain("max_norm must be positive"));
    }
    let ratio = max_norm / spec.spacing;
    let expected = HEX_DENSITY * PI * ratio * ratio;
    if expected > MAX_MATERIALIZED {
        return Err(CoreError::domain(format!(
            "enumeration of ~{expected:.2e} points would exhaust memory; use epstein_sum"
        )));
    }
    let q_cut = ratio * ratio;
    let range = (2.0 * ratio / SQRT3).ceil() as i64 + 1;
    let mut pts = Vec::new();
    for u in -range..=range {
        for v in -range..=range {
            if u == 0 && v == 0 {
                continue;
            }
            let q = LatticeSpec::squared_form(u, v);
            if (q as f64) <= q_cut {
                let (x, y) = spec.position(u, v);
                pts.push(LatticePoint {
                    u,
                    v,
                    x,
                    y,
                    norm: spec.spacing * (q as f64).sqrt(),
                });
            }
        }
    }
    pts.sort_by(|a, b| {
        let qa = LatticeSpec::squared_form(a.u, a.v);
        let qb = LatticeSpec::squared_form(b.u, b.v);
        qa.cmp(&qb).then_with(|| {
            let ang_a = angle_of(a.x, a.y);
            let ang_b = angle_of(b.x, b.y);
            ang_a.partial_cmp(&ang_b).expect("finite angles")
        })
    });
    Ok(pts)
}

fn angle_of(x: f64, y: f64) -> f64 {
    let a = y.atan2(x);
    if a < 0.0 {
        a + 2.0 * PI
    } else {
        a
    }
}

/// Upper bound on Σ_{|s| > max_norm} |s|^{-2b} by integral comparison:
/// lattice density × ∫ r^{-2b} 2πr dr from max_norm, times a safety factor 2.
pub fn epstein_tail_bound(b: f64, spec: &LatticeSpec, max_norm: f64) -> Result<f64> {
    if !(b > 1.0) {
        return Err(CoreError::domain(format!(
            "epstein_tail_bound requires b > 1 (got {b}); the sum diverges"
        )));
    }
    if !(max_norm >= 2.0 * spec.spacing) {
        return Err(CoreError::domain(
            "epstein_tail_bound requires max_norm >= 2 spacings",
        ));
    }
    let density = HEX_DENSITY / (spec.spacing * spec.spacing);
    let integral = 2.0 * PI * max_norm.powf(2.0 - 2.0 * b) / (2.0 * b - 2.0);
    Ok(2.0 * density * integral)
}

/// A truncated Epstein sum together with its tail correction.
#[derive(Debug, Clone, Copy)]
pub struct EpsteinSum {
    /// truncated + tail_estimate: the best available value for the full sum.
    pub value: f64,
    /// Exact sum over the enumerated points.
    pub truncated: f64,
    /// Integral estimate of the remainder, corrected by the exact counting
    /// defect of the truncation disc.
    pub tail_estimate: f64,
    /// Bound on |value − full sum|.
    pub tail_bound: f64,
    /// Number of lattice points inside the truncation disc.
    pub points: u64,
}

/// Remainder of Σ q^{-z} beyond the cutoff Q, by partial summation against
/// the counting function R(x) = #{0 < q ≤ x} = c·x + E(x) with c = 2π/√3:
///
///   Σ_{q > Q} q^{-z} = c·Q^{1-z}/(z-1) − E(Q)·Q^{-z} + z ∫_Q^∞ E(x) x^{-z-1} dx.
///
/// E(Q) is known exactly from the enumeration; only the oscillatory integral
/// is estimated, via |E(x)| ≤ C·x^(1/3). Returns (estimate, bound) in units
/// of the normalized form q; callers multiply by spacing^{-2z}.
pub(crate) fn tail_parts_normalized(z: f64, q_cut: f64, points_inside: u64) -> (f64, f64) {
    let c = 2.0 * PI / SQRT3;
    let defect = points_inside as f64 - c * q_cut;
    let estimate = c * q_cut.powf(1.0 - z) / (z - 1.0) - defect * q_cut.powf(-z);
    let bound = 2.0 * z * COUNT_DEFECT_COEFF * q_cut.powf(1.0 / 3.0 - z) / (z - 1.0 / 3.0);
    (estimate, bound)
}

type EpsteinKey = (u64, u64, u64);

static EPSTEIN_MEMO: OnceLock<RwLock<HashMap<EpsteinKey, EpsteinSum>>> = OnceLock::new();

/// Σ_{s∈Λ*, |s| ≤ max_norm} |s|^{-exponent}, summed exactly over one sixth of
/// the lattice (the sector u ≥ 1, v ≥ 0 meets every rotation orbit once) and
/// extended by the corrected integral tail. Memoized: sweeps hit the same
/// (exponent, spacing, radius) triple once per power-control point.
pub fn epstein_sum(exponent: f64, spec: &LatticeSpec, max_norm: f64) -> Result<EpsteinSum> {
    if !(exponent > 2.0) {
        return Err(CoreError::domain(format!(
            "epstein_sum requires exponent > 2 (got {exponent}); the sum diverges"
        )));
    }
    if !(max_norm >= 2.0 * spec.spacing) {
        return Err(CoreError::domain("epstein_sum requires max_norm >= 2 spacings"));
    }
    let key = (
        exponent.to_bits(),
        spec.spacing.to_bits(),
        max_norm.to_bits(),
    );
    let memo = EPSTEIN_MEMO.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(&hit) = memo.read().expect("epstein cache poisoned").get(&key) {
        return Ok(hit);
    }
    let result = epstein_sum_uncached(exponent, spec, max_norm)?;
    memo.write()
        .expect("epstein cache poisoned")
        .insert(key, result);
    Ok(result)
}

fn epstein_sum_uncached(exponent: f64, spec: &LatticeSpec, max_norm: f64) -> Result<EpsteinSum> {
    let z = exponent / 2.0;
    let ratio = max_norm / spec.spacing;
    let q_cut = ratio * ratio;
    let u_max = (2.0 * ratio / SQRT3).ceil() as i64 + 1;

    let cols: Vec<(f64, u64)> = (1..=u_max)
        .into_par_iter()
        .map(|u| {
            let mut sum = 0.0f64;
            let mut comp = 0.0f64;
            let mut count = 0u64;
            let mut v = 0i64;
            let mut q = u * u;
            while (q as f64) <= q_cut {
                let term = (q as f64).powf(-z);
                let y = term - comp;
                let t = sum + y;
                comp = (t - sum) - y;
                sum = t;
                count += 1;
                q += u + 2 * v + 1;
                v += 1;
            }
            (sum, count)
        })
        .collect();

    let mut sector = 0.0f64;
    let mut sector_count = 0u64;
    for (s, c) in cols {
        sector += s;
        sector_count += c;
    }
    let dpow = spec.spacing.powf(-exponent);
    let truncated = 6.0 * sector * dpow;
    let points = 6 * sector_count;
    let (tail_norm, bound_norm) = tail_parts_normalized(z, q_cut, points);
    Ok(EpsteinSum {
        value: truncated + tail_norm * dpow,
        truncated,
        tail_estimate: tail_norm * dpow,
        tail_bound: bound_norm * dpow,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit() -> LatticeSpec {
        LatticeSpec::new(1.0).unwrap()
    }

    #[test]
    fn nearest_shell_counts() {
        let spec = unit();
        assert_eq!(enumerate_lattice(&spec, 1.01).unwrap().len(), 6);
        assert!(enumerate_lattice(&spec, 0.99).unwrap().is_empty());
        // Shells at 1, √3, 2 hold six points each.
        assert_eq!(enumerate_lattice(&spec, 2.01).unwrap().len(), 18);
    }

    #[test]
    fn shell_counts_match_box_scan() {
        // Brute-force (u,v) box scan as the independent count. Coordinates
        // reach 2·ratio/√3 along the oblique axes.
        fn box_count(ratio: f64) -> usize {
            let r = (2.0 * ratio / SQRT3).ceil() as i64 + 2;
            let mut n = 0;
            for u in -r..=r {
                for v in -r..=r {
                    if (u, v) == (0, 0) {
                        continue;
                    }
                    if (LatticeSpec::squared_form(u, v) as f64) <= ratio * ratio {
                        n += 1;
                    }
                }
            }
            n
        }
        let spec = unit();
        // 20 deterministic pseudo-random radii in [1, 30).
        let mut state = 0x2545F4914F6CDD1Du64;
        for _ in 0..20 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let ratio = 1.0 + 29.0 * ((state >> 11) as f64 / (1u64 << 53) as f64);
            let got = enumerate_lattice(&spec, ratio).unwrap().len();
            assert_eq!(got, box_count(ratio), "radius {ratio}");
        }
    }

    #[test]
    fn enumeration_is_sorted_and_excludes_origin() {
        let spec = LatticeSpec::new(2.5).unwrap();
        let pts = enumerate_lattice(&spec, 12.0).unwrap();
        for w in pts.windows(2) {
            assert!(w[0].norm <= w[1].norm + 1e-12);
        }
        assert!(pts.iter().all(|p| (p.u, p.v) != (0, 0)));
        // Norms are exactly spacing·√q.
        for p in &pts {
            let q = LatticeSpec::squared_form(p.u, p.v) as f64;
            assert_eq!(p.norm.to_bits(), (spec.spacing * q.sqrt()).to_bits());
        }
    }

    #[test]
    fn sector_streaming_matches_enumeration() {
        let spec = unit();
        for &radius in &[2.0, 5.5, 17.0, 40.0] {
            let pts = enumerate_lattice(&spec, radius).unwrap();
            let direct: f64 = pts.iter().map(|p| p.norm.powf(-3.5)).sum();
            let ep = epstein_sum(3.5, &spec, radius).unwrap();
            assert_eq!(ep.points as usize, pts.len(), "count at radius {radius}");
            assert_relative_eq!(ep.truncated, direct, max_relative = 1e-12);
        }
    }

    #[test]
    fn tail_bound_scaling_and_limit() {
        let spec = unit();
        let b = 1.75;
        let b1 = epstein_tail_bound(b, &spec, 50.0).unwrap();
        let b2 = epstein_tail_bound(b, &spec, 100.0).unwrap();
        // Doubling the radius divides the bound by 2^{2b-2}.
        assert_relative_eq!(b1 / b2, 2.0f64.powf(2.0 * b - 2.0), max_relative = 1e-12);
        // And the bound vanishes in the large-radius limit.
        assert!(epstein_tail_bound(b, &spec, 1e9).unwrap() < 1e-10);
        assert!(epstein_tail_bound(0.99, &spec, 50.0).is_err());
        assert!(epstein_tail_bound(1.75, &spec, 1.5).is_err());
    }

    #[test]
    fn tail_bound_covers_measured_remainder() {
        let spec = unit();
        let b = 1.75;
        // Remainder between radius 100 and 2000 estimated by a two-radius scan.
        let near = epstein_sum(2.0 * b, &spec, 100.0).unwrap();
        let far = epstein_sum(2.0 * b, &spec, 2000.0).unwrap();
        let measured_remainder = far.truncated - near.truncated;
        let bound = epstein_tail_bound(b, &spec, 100.0).unwrap();
        assert!(
            bound >= measured_remainder,
            "bound {bound} < measured {measured_remainder}"
        );
    }

    #[test]
    fn corrected_tail_brackets_refined_value() {
        let spec = unit();
        for &exponent in &[2.4, 3.5, 6.0] {
            let coarse = epstein_sum(exponent, &spec, 100.0).unwrap();
            let fine = epstein_sum(exponent, &spec, 200.0).unwrap();
            assert!(
                (coarse.value - fine.value).abs() <= coarse.tail_bound,
                "exponent {exponent}: |{} - {}| > {}",
                coarse.value,
                fine.value,
                coarse.tail_bound
            );
        }
    }

    #[test]
    fn counting_defect_stays_within_coefficient() {
        // Exhaustive check of |E(x)| ≤ C·x^(1/3) at every shell boundary up to 10⁶.
        let q_max = 1_000_000usize;
        let mut counts = vec![0u32; q_max + 1];
        let range = (2.0 * (q_max as f64).sqrt() / SQRT3).ceil() as i64 + 1;
        for u in -range..=range {
            for v in -range..=range {
                if (u, v) == (0, 0) {
                    continue;
                }
                let q = LatticeSpec::squared_form(u, v);
                if q >= 0 && (q as usize) <= q_max {
                    counts[q as usize] += 1;
                }
            }
        }
        let c = 2.0 * PI / SQRT3;
        let mut cumulative = 0u64;
        for (q, &count) in counts.iter().enumerate().skip(1) {
            cumulative += count as u64;
            if count == 0 {
                continue;
            }
            let defect = (cumulative as f64 - c * q as f64).abs();
            let allowed = COUNT_DEFECT_COEFF * (q as f64).powf(1.0 / 3.0);
            assert!(
                defect <= allowed,
                "counting defect {defect} exceeds {allowed} at q = {q}"
            );
        }
    }

    #[test]
    fn materialization_cap_is_enforced() {
        let spec = unit();
        assert!(enumerate_lattice(&spec, 1e5).is_err());
    }
}
