//! The reverse quantum speed limit and the minimum-norm bound it implies.
//!
//! The reference section `|χ(t)⟩` is `|ψ(t)⟩` rephased so that `⟨χ(t)|ψ(0)⟩` is real and
//! non-negative. Its path length over `[0, T]` bounds the evolution time from above:
//! `T ≤ ħ l / ΔH`. Over one small step `Δt` this becomes the lower bound
//! `‖Δψ(Δt)‖ ≥ Δt ΔH / ħ` on the norm of the state change.

use serde::{Deserialize, Serialize};

use crate::dynamics::EvolutionContext;
use crate::error::{Error, Result};
use crate::hilbert::{inner_product, Amplitude, StateVector};
use crate::quadrature::adaptive_simpson;

/// Below this overlap modulus the rephasing factor is numerically meaningless.
pub const OVERLAP_FLOOR: f64 = 1e-10;
/// Variances at or below this are treated as zero (stationary state).
pub const ZERO_VARIANCE_FLOOR: f64 = 1e-14;
/// Number of probe points checked for a vanishing overlap before integrating.
pub const PROBE_POINTS: usize = 65;
const INITIAL_PANELS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub max_depth: u32,
    /// Finite-difference step as a fraction of the characteristic time.
    pub fd_step_fraction: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-8,
            max_depth: 40,
            fd_step_fraction: 1e-6,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "abs_tol must be positive, got {}",
                self.abs_tol
            )));
        }
        if !(self.fd_step_fraction > 0.0 && self.fd_step_fraction < 1e-2) {
            return Err(Error::InvalidConfig(format!(
                "fd_step_fraction must lie in (0, 1e-2), got {}",
                self.fd_step_fraction
            )));
        }
        if self.max_depth == 0 {
            return Err(Error::InvalidConfig("max_depth must be positive".into()));
        }
        Ok(())
    }
}

/// Verdict tolerances shared by the bound reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReportConfig {
    /// Slack allowed before a bound counts as violated.
    pub tol_report: f64,
    /// `Δt ≪ Δt_char` is read as `Δt ≤ regime_fraction · Δt_char`.
    pub regime_fraction: f64,
}

impl Default for ReportConfig {
    fn default() -> Self {
        Self {
            tol_report: 1e-6,
            regime_fraction: 1e-2,
        }
    }
}

/// `|ψ(t)⟩` together with `⟨ψ(t)|ψ(0)⟩`, from a single evaluation of `Δψ(t)`.
fn state_and_overlap(ctx: &EvolutionContext, t: f64) -> (StateVector, Amplitude) {
    let delta = ctx.delta_psi(t);
    let overlap = Amplitude::new(1.0, 0.0) + inner_product(&delta, ctx.psi0()).expect("dims match");
    let psi = ctx.psi0().add(&delta).expect("dims match");
    (psi, overlap)
}

/// `|χ(t)⟩ = (⟨ψ(t)|ψ(0)⟩ / |⟨ψ(t)|ψ(0)⟩|) |ψ(t)⟩`.
pub fn reference_section(ctx: &EvolutionContext, t: f64) -> Result<StateVector> {
    let (psi, overlap) = state_and_overlap(ctx, t);
    let modulus = overlap.norm();
    if modulus <= OVERLAP_FLOOR {
        return Err(Error::OrthogonalOverlap {
            t,
            overlap: modulus,
        });
    }
    let phased = psi.scale(overlap / modulus);
    Ok(StateVector::from_parts(phased.into_amplitudes(), true))
}

/// `‖χ̇(t)‖` by a central difference with step `h`, refined once by Richardson
/// extrapolation against step `h/2`.
pub fn reference_section_speed(ctx: &EvolutionContext, t: f64, h: f64) -> Result<f64> {
    let central = |step: f64| -> Result<Vec<Amplitude>> {
        let ahead = reference_section(ctx, t + step)?;
        let behind = reference_section(ctx, t - step)?;
        Ok(ahead
            .amplitudes()
            .iter()
            .zip(behind.amplitudes())
            .map(|(a, b)| (a - b) / (2.0 * step))
            .collect())
    };
    let coarse = central(h)?;
    let fine = central(0.5 * h)?;
    Ok(fine
        .iter()
        .zip(&coarse)
        .map(|(f, c)| ((4.0 * f - c) / 3.0).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

fn fd_step(ctx: &EvolutionContext, horizon: f64, q: &QuadratureConfig) -> f64 {
    let scale = ctx
        .characteristic_time()
        .finite()
        .unwrap_or_else(|| horizon.abs().max(1.0));
    q.fd_step_fraction * scale
}

/// `l(χ)|₀^T = ∫₀^T ⟨χ̇|χ̇⟩^{1/2} dt` by adaptive Simpson quadrature.
pub fn reference_section_length(
    ctx: &EvolutionContext,
    duration: f64,
    q: &QuadratureConfig,
) -> Result<f64> {
    q.validate()?;
    if !duration.is_finite() || duration < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "duration must be finite and non-negative, got {duration}"
        )));
    }
    if duration == 0.0 {
        return Ok(0.0);
    }
    for i in 0..PROBE_POINTS {
        let t = duration * i as f64 / (PROBE_POINTS - 1) as f64;
        let modulus = ctx.overlap(t).norm();
        if modulus <= OVERLAP_FLOOR {
            return Err(Error::OrthogonalOverlap {
                t,
                overlap: modulus,
            });
        }
    }
    let h = fd_step(ctx, duration, q);
    let result = adaptive_simpson(
        |t| reference_section_speed(ctx, t, h),
        0.0,
        duration,
        q.abs_tol,
        q.max_depth,
        INITIAL_PANELS,
    )?;
    Ok(result.value)
}

/// Small-step length `(2 - 2|⟨ψ(dt)|ψ(0)⟩|)^{1/2}`.
///
/// With `w = ⟨Δψ|ψ(0)⟩` the overlap is `1 + w`, and `1 - |1 + w|` is evaluated as
/// `-(2 Re w + |w|²) / (1 + |1 + w|)` so that small steps keep their precision.
pub fn discrete_length(ctx: &EvolutionContext, dt: f64) -> f64 {
    let delta = ctx.delta_psi(dt);
    let w = inner_product(&delta, ctx.psi0()).expect("dims match");
    let modulus = (Amplitude::new(1.0, 0.0) + w).norm();
    let one_minus = -(2.0 * w.re + w.norm_sqr()) / (1.0 + modulus);
    (2.0 * one_minus).max(0.0).sqrt()
}

/// Outcome of checking `T ≤ ħ l / ΔH`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub duration: f64,
    pub length: f64,
    pub delta_h: f64,
    pub rqsl_upper_bound: f64,
    pub satisfied: bool,
    /// `rqsl_upper_bound - duration`
    pub margin: f64,
}

pub fn rqsl_check(
    ctx: &EvolutionContext,
    duration: f64,
    q: &QuadratureConfig,
) -> Result<BoundReport> {
    rqsl_check_with(ctx, duration, q, &ReportConfig::default())
}

/// Fails with [`Error::ZeroVariance`] for stationary states, where the bound is vacuous.
pub fn rqsl_check_with(
    ctx: &EvolutionContext,
    duration: f64,
    q: &QuadratureConfig,
    report: &ReportConfig,
) -> Result<BoundReport> {
    let delta_h = ctx.energy_variance()?;
    if delta_h <= ZERO_VARIANCE_FLOOR {
        return Err(Error::ZeroVariance);
    }
    let length = reference_section_length(ctx, duration, q)?;
    let rqsl_upper_bound = ctx.hbar() * length / delta_h;
    let margin = rqsl_upper_bound - duration;
    Ok(BoundReport {
        duration,
        length,
        delta_h,
        rqsl_upper_bound,
        satisfied: margin >= -report.tol_report,
        margin,
    })
}

/// `NormLim = Δt_min ΔH / ħ`.
pub fn norm_limit(delta_h: f64, dt_min: f64, hbar: f64) -> f64 {
    dt_min * delta_h / hbar
}

/// Outcome of checking `‖Δψ(Δt_min)‖ ≥ NormLim`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormLimitReport {
    pub dt_min: f64,
    pub delta_h: f64,
    pub norm_lim: f64,
    pub exact_norm: f64,
    /// `Δt_min ⟨Ĥ²⟩^{1/2} / ħ`; never below `norm_lim`.
    pub moment_estimate: f64,
    pub dt_char: f64,
    /// `exact_norm ≥ norm_lim - tol_report`. Only meaningful when `regime_ok`.
    pub satisfied: bool,
    /// `dt_min ≤ regime_fraction · Δt_char`
    pub regime_ok: bool,
}

impl NormLimitReport {
    /// `exact_norm / norm_lim`; `NaN` for a zero limit.
    pub fn ratio(&self) -> f64 {
        if self.norm_lim > 0.0 {
            self.exact_norm / self.norm_lim
        } else {
            f64::NAN
        }
    }
}

pub fn verify_norm_inequality(ctx: &EvolutionContext, dt_min: f64) -> Result<NormLimitReport> {
    verify_norm_inequality_with(ctx, dt_min, &ReportConfig::default())
}

pub fn verify_norm_inequality_with(
    ctx: &EvolutionContext,
    dt_min: f64,
    report: &ReportConfig,
) -> Result<NormLimitReport> {
    if !(dt_min > 0.0 && dt_min.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "dt_min must be positive, got {dt_min}"
        )));
    }
    let delta_h = ctx.energy_variance()?;
    let norm_lim = norm_limit(delta_h, dt_min, ctx.hbar());
    let exact_norm = ctx.delta_psi(dt_min).norm();
    let moment_estimate = dt_min * ctx.second_moment_root() / ctx.hbar();
    let dt_char = ctx.characteristic_time().as_f64();
    Ok(NormLimitReport {
        dt_min,
        delta_h,
        norm_lim,
        exact_norm,
        moment_estimate,
        dt_char,
        satisfied: exact_norm >= norm_lim - report.tol_report,
        regime_ok: dt_min <= report.regime_fraction * dt_char,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{tensor_product_state, HermitianOperator};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> Amplitude {
        Amplitude::new(re, im)
    }

    fn two_state(c1: Amplitude, c2: Amplitude, e1: f64, e2: f64) -> EvolutionContext {
        EvolutionContext::new(
            HermitianOperator::diagonal(&[e1, e2]).unwrap(),
            StateVector::new(vec![c1, c2]).unwrap(),
            1.0,
        )
        .unwrap()
    }

    fn detector(c2: f64, kappa: f64) -> EvolutionContext {
        let c1 = (1.0 - c2 * c2).sqrt();
        let z = c(0.0, 0.0);
        let h = HermitianOperator::from_rows(vec![
            vec![z; 4],
            vec![z; 4],
            vec![z, z, z, c(0.0, -kappa)],
            vec![z, z, c(0.0, kappa), z],
        ])
        .unwrap();
        let s = StateVector::new(vec![c(c1, 0.0), c(c2, 0.0)]).unwrap();
        EvolutionContext::new(h, tensor_product_state(&s, &StateVector::basis(2, 0)), 1.0).unwrap()
    }

    #[test]
    fn reference_section_at_zero_is_initial_state() {
        let ctx = two_state(c(0.6, 0.0), c(0.0, 0.8), 0.3, 1.1);
        assert_eq!(reference_section(&ctx, 0.0).unwrap(), *ctx.psi0());
    }

    #[test]
    fn eigenstate_reference_section_is_constant() {
        let ctx = two_state(c(0.0, 0.0), c(0.0, 1.0), 0.3, 1.7);
        for &t in &[0.1, 1.0, 10.0] {
            let chi = reference_section(&ctx, t).unwrap();
            assert!(chi.max_abs_diff(ctx.psi0()).unwrap() < 1e-14);
        }
        let q = QuadratureConfig::default();
        assert!(reference_section_length(&ctx, 3.0, &q).unwrap().abs() < 1e-9);
    }

    #[test]
    fn detector_reference_overlap() {
        let ctx = detector(0.6, 1.0);
        for &t in &[0.1, 0.7, 1.4] {
            let chi = reference_section(&ctx, t).unwrap();
            let ov = inner_product(&chi, ctx.psi0()).unwrap();
            let expected = 0.64 + 0.36 * f64::cos(t);
            assert!((ov.re - expected).abs() < 1e-14);
            assert!(ov.im.abs() < 1e-14);
        }
    }

    #[test]
    fn orthogonal_overlap_detected() {
        // equal superposition of E = ±1 is orthogonal to itself at t = π/2
        let h = FRAC_1_SQRT_2;
        let ctx = two_state(c(h, 0.0), c(h, 0.0), -1.0, 1.0);
        assert!(matches!(
            reference_section(&ctx, PI / 2.0),
            Err(Error::OrthogonalOverlap { .. })
        ));
        let q = QuadratureConfig::default();
        assert!(matches!(
            reference_section_length(&ctx, PI, &q),
            Err(Error::OrthogonalOverlap { .. })
        ));
    }

    #[test]
    fn detector_length_matches_discrete_form() {
        let ctx = detector(0.6, 1.0);
        let q = QuadratureConfig::default();
        assert_eq!(reference_section_length(&ctx, 0.0, &q).unwrap(), 0.0);
        let len = reference_section_length(&ctx, 0.1, &q).unwrap();
        let discrete = (2.0 - 2.0 * (0.64 + 0.36 * f64::cos(0.1))).sqrt();
        assert!(((len - discrete) / discrete).abs() < 1e-3);
        // χ = ψ here and ‖ψ̇‖ = |c₂| κ / ħ exactly
        assert!((len - 0.06).abs() < 1e-8);
    }

    #[test]
    fn discrete_length_examples() {
        let ctx = detector(0.6, 1.0);
        assert_eq!(discrete_length(&ctx, 0.0), 0.0);
        for &dt in &[1e-4, 1e-2, 0.5] {
            let expected = 0.6 * (2.0 - 2.0 * f64::cos(dt)).sqrt();
            assert!((discrete_length(&ctx, dt) - expected).abs() < 1e-12);
        }
        let h = FRAC_1_SQRT_2;
        let two = two_state(c(h, 0.0), c(h, 0.0), 0.0, 1.0);
        let dt = 1e-3f64;
        // brute-force overlap: ⟨ψ(dt)|ψ(0)⟩ = ½ + ½ e^{i dt}
        let overlap = c(0.5, 0.0) + c(0.5 * dt.cos(), 0.5 * dt.sin());
        let expected = (2.0 - 2.0 * overlap.norm()).sqrt();
        assert!(((discrete_length(&two, dt) - expected) / expected).abs() < 1e-6);
    }

    #[test]
    fn rqsl_examples() {
        let q = QuadratureConfig::default();
        let det = detector(0.6, 1.0);
        let r = rqsl_check(&det, 0.05, &q).unwrap();
        assert!(r.satisfied, "{r:?}");
        assert!(r.margin.abs() < 1e-6);

        let h = FRAC_1_SQRT_2;
        let two = two_state(c(h, 0.0), c(h, 0.0), 0.0, 1.0);
        let t = 0.1 * 2.0 * PI;
        let r = rqsl_check(&two, t, &q).unwrap();
        assert!(r.satisfied, "{r:?}");

        let eig = two_state(c(1.0, 0.0), c(0.0, 0.0), 0.0, 1.0);
        assert_eq!(rqsl_check(&eig, 0.1, &q), Err(Error::ZeroVariance));
    }

    #[test]
    fn norm_limit_examples() {
        assert_eq!(norm_limit(0.0, 1e-3, 1.0), 0.0);
        assert!((norm_limit(0.5, 1e-3, 1.0) - 5e-4).abs() < 1e-18);
        assert!((norm_limit(0.6, 1e-3, 1.0) - 6e-4).abs() < 1e-18);
    }

    #[test]
    fn norm_inequality_examples() {
        let eig = two_state(c(1.0, 0.0), c(0.0, 0.0), 0.0, 1.0);
        let r = verify_norm_inequality(&eig, 1e-3).unwrap();
        assert_eq!(r.norm_lim, 0.0);
        assert!(r.satisfied && r.regime_ok);

        let h = FRAC_1_SQRT_2;
        let two = two_state(c(h, 0.0), c(h, 0.0), 0.0, 1.0);
        let r = verify_norm_inequality(&two, 1e-3).unwrap();
        assert!((r.exact_norm - 7.0711e-4).abs() < 1e-8);
        assert!((r.norm_lim - 5e-4).abs() < 1e-15);
        assert!(r.satisfied && r.regime_ok);
        let small = verify_norm_inequality(&two, 1e-7).unwrap();
        assert!((small.ratio() - 2f64.sqrt()).abs() < 1e-9);

        let det = detector(0.6, 1.0);
        let r = verify_norm_inequality(&det, 1e-3).unwrap();
        assert!(((r.exact_norm - r.norm_lim) / r.norm_lim).abs() <= 1e-6);

        let far = verify_norm_inequality(&two, 10.0).unwrap();
        assert!(!far.regime_ok);
        assert!(matches!(
            verify_norm_inequality(&two, 0.0),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn quadrature_config_validation() {
        assert!(QuadratureConfig::default().validate().is_ok());
        let bad = QuadratureConfig {
            fd_step_fraction: 0.1,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = QuadratureConfig {
            abs_tol: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
