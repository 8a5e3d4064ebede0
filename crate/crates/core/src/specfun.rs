//! Special-function kernel: log-gamma, Riemann and Hurwitz zeta, and the
//! hexagonal-lattice weight ω(z) = 3⁻ᶻ ζ(z) (ζ(z,1/3) − ζ(z,2/3)) that every
//! interference series consumes.
//!
//! The zeta pair is evaluated by direct summation with an Euler–Maclaurin
//! tail; the switch-over point is chosen where the first omitted Bernoulli
//! term falls below the requested tolerance, so the accuracy is deterministic
//! rather than iteration-dependent.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{OnceLock, RwLock};

use crate::error::{CoreError, Result};

/// Accuracy policy for the zeta-family evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecFunAccuracy {
    /// Target relative error.
    pub rel_tol: f64,
    /// Cap on direct-summation terms ahead of the tail correction.
    pub max_terms: usize,
}

impl Default for SpecFunAccuracy {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_terms: 100_000,
        }
    }
}

impl SpecFunAccuracy {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        let acc = Self { rel_tol, max_terms };
        acc.validate()?;
        Ok(acc)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(CoreError::domain("rel_tol must lie in (0, 1)"));
        }
        if self.max_terms < 10 {
            return Err(CoreError::domain("max_terms must be at least 10"));
        }
        Ok(())
    }
}

// Lanczos approximation, g = 7, n = 9 (Godfrey coefficients).
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];
const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_7;

/// ln Γ(z) for z > 0.
///
/// Downstream series always form Γ ratios as differences of this function:
/// Γ(b+h)² overflows an f64 near h ≈ 170 while ln Γ stays small.
pub fn gamma_ln(z: f64) -> Result<f64> {
    if !z.is_finite() || z <= 0.0 {
        return Err(CoreError::domain(format!(
            "gamma_ln requires z > 0 (got {z})"
        )));
    }
    if z < 0.5 {
        // Reflection keeps the Lanczos argument comfortably positive.
        return Ok(PI.ln() - (PI * z).sin().ln() - lanczos_ln_gamma(1.0 - z));
    }
    Ok(lanczos_ln_gamma(z))
}

fn lanczos_ln_gamma(z: f64) -> f64 {
    let z = z - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    HALF_LN_TWO_PI + (z + 0.5) * t.ln() - t + acc.ln()
}

// B_{2j}/(2j)! for the Euler-Maclaurin tail, j = 1..=11.
const BERN_OVER_FACT: [f64; 11] = [
    8.333_333_333_333_333e-2,
    -1.388_888_888_888_889e-3,
    3.306_878_306_878_307e-5,
    -8.267_195_767_195_768e-7,
    2.087_675_698_786_81e-8,
    -5.284_190_138_687_493e-10,
    1.338_253_653_068_468e-11,
    -3.389_680_296_322_583e-13,
    8.586_062_056_277_845e-15,
    -2.174_868_698_558_062e-16,
    5.509_002_828_360_23e-18,
];
// |B_24/24!|, magnitude of the first omitted term.
const BERN_NEXT: f64 = 1.395_446_468_581_252e-19;

/// Hurwitz zeta ζ(z, a) = Σ_{n≥0} (n+a)^{-z} for z > 1, 0 < a ≤ 1.
pub fn hurwitz_zeta(z: f64, a: f64, acc: &SpecFunAccuracy) -> Result<f64> {
    acc.validate()?;
    if !z.is_finite() || z <= 1.0 {
        return Err(CoreError::domain(format!(
            "hurwitz_zeta requires z > 1 (got {z}); the series diverges otherwise"
        )));
    }
    if !a.is_finite() || a <= 0.0 || a > 1.0 {
        return Err(CoreError::domain(format!(
            "hurwitz_zeta requires 0 < a <= 1 (got {a})"
        )));
    }

    let mut n = 16usize;
    loop {
        let (value, bound) = hurwitz_em(z, a, n);
        if bound <= acc.rel_tol * value.abs() {
            return Ok(value);
        }
        if n >= acc.max_terms {
            return Err(CoreError::convergence(n, bound / value.abs()));
        }
        n = (n * 2).min(acc.max_terms);
    }
}

/// Direct sum over n terms plus the Euler-Maclaurin tail; returns the value
/// and an error bound given by the first omitted Bernoulli term.
fn hurwitz_em(z: f64, a: f64, n: usize) -> (f64, f64) {
    let mut direct = 0.0f64;
    let mut comp = 0.0f64;
    for k in 0..n {
        let term = (k as f64 + a).powf(-z);
        let y = term - comp;
        let t = direct + y;
        comp = (t - direct) - y;
        direct = t;
    }
    let w = n as f64 + a;
    let mut tail = w.powf(1.0 - z) / (z - 1.0) + 0.5 * w.powf(-z);
    let w2 = w * w;
    // The j-th correction is B_{2j}/(2j)! · (z)_{2j-1} · w^{-z-2j+1}.
    let mut rising = z; // (z)_1
    let mut wpow = w.powf(-z - 1.0);
    for (j, coeff) in BERN_OVER_FACT.iter().enumerate() {
        tail += coeff * rising * wpow;
        let m = 2 * j as u32 + 1;
        rising *= (z + m as f64) * (z + (m + 1) as f64);
        wpow /= w2;
    }
    let bound = (BERN_NEXT * rising * wpow).abs();
    (direct + tail, bound)
}

/// Riemann zeta ζ(z) for z > 1. Identical code path to `hurwitz_zeta` at
/// a = 1, so the two agree bit-for-bit there.
pub fn riemann_zeta(z: f64, acc: &SpecFunAccuracy) -> Result<f64> {
    hurwitz_zeta(z, 1.0, acc)
}

static OMEGA_MEMO: OnceLock<RwLock<HashMap<(u64, u64), f64>>> = OnceLock::new();

/// The hexagonal-lattice weight ω(z) = 3⁻ᶻ ζ(z) (ζ(z,1/3) − ζ(z,2/3)).
///
/// Every series term at index h evaluates ω(b+h), and parameter sweeps reuse
/// identical arguments, so results are memoized per (z, rel_tol). The cache
/// is guarded by an RwLock and safe for concurrent callers.
pub fn omega(z: f64, acc: &SpecFunAccuracy) -> Result<f64> {
    acc.validate()?;
    if !z.is_finite() || z <= 1.0 {
        return Err(CoreError::domain(format!("omega requires z > 1 (got {z})")));
    }
    let key = (z.to_bits(), acc.rel_tol.to_bits());
    let memo = OMEGA_MEMO.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(&v) = memo.read().expect("omega cache poisoned").get(&key) {
        return Ok(v);
    }
    let zeta = riemann_zeta(z, acc)?;
    let h13 = hurwitz_zeta(z, 1.0 / 3.0, acc)?;
    let h23 = hurwitz_zeta(z, 2.0 / 3.0, acc)?;
    let value = 3.0f64.powf(-z) * zeta * (h13 - h23);
    memo.write()
        .expect("omega cache poisoned")
        .insert(key, value);
    Ok(value)
}
