//! Closed-form models and seeded random ensembles.
//!
//! The two-state model is a Hamiltonian diagonal in `{|S₁⟩, |S₂⟩}`. The detector model
//! couples a two-state system to a two-state observer through `P̂^{S₂} ⊗ ĥ^O` with
//! `ĥ^O = iκ(|O₂⟩⟨O₁| - |O₁⟩⟨O₂|)`, in the basis `|S₁O₁⟩, |S₁O₂⟩, |S₂O₁⟩, |S₂O₂⟩`.
//! Both come with exact expressions for the evolved state and for `‖Δψ‖`, which serve
//! as oracles for the numerical pipeline.
//!
//! Random systems draw from ChaCha20 (`rand_chacha`), seeded with the ensemble seed and
//! switched to the stream numbered by the sample index, so any sample can be generated
//! on its own. Gaussian variates come from `rand_distr::StandardNormal`.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dynamics::EvolutionContext;
use crate::error::{Error, Result};
use crate::hilbert::{
    normalize, tensor_product_operator, tensor_product_state, Amplitude, HermitianOperator,
    StateVector, NORM_TOL,
};

fn check_amplitudes(c1: Amplitude, c2: Amplitude) -> Result<()> {
    if ![c1.re, c1.im, c2.re, c2.im].iter().all(|x| x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let total = c1.norm_sqr() + c2.norm_sqr();
    if (total - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized { norm: total.sqrt() });
    }
    Ok(())
}

/// `|ψ(0)⟩ = c₁|S₁⟩ + c₂|S₂⟩` under `Ĥ = E₁|S₁⟩⟨S₁| + E₂|S₂⟩⟨S₂|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoStateModel {
    pub c1: Amplitude,
    pub c2: Amplitude,
    pub e1: f64,
    pub e2: f64,
}

impl TwoStateModel {
    pub fn new(c1: Amplitude, c2: Amplitude, e1: f64, e2: f64) -> Result<Self> {
        check_amplitudes(c1, c2)?;
        if !(e1.is_finite() && e2.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { c1, c2, e1, e2 })
    }

    pub fn context(&self, hbar: f64) -> Result<EvolutionContext> {
        two_state_context(self, hbar)
    }

    fn weights(&self) -> (f64, f64) {
        (self.c1.norm_sqr(), self.c2.norm_sqr())
    }
}

pub fn two_state_context(m: &TwoStateModel, hbar: f64) -> Result<EvolutionContext> {
    let h = HermitianOperator::diagonal(&[m.e1, m.e2])?;
    let psi0 = StateVector::new(vec![m.c1, m.c2])?;
    EvolutionContext::new(h, psi0, hbar)
}

/// `c₁ e^{-iE₁t/ħ}|S₁⟩ + c₂ e^{-iE₂t/ħ}|S₂⟩`.
pub fn two_state_exact_state(m: &TwoStateModel, hbar: f64, t: f64) -> StateVector {
    let phase = |e: f64| Amplitude::from_polar(1.0, -e * t / hbar);
    StateVector::from_parts(vec![m.c1 * phase(m.e1), m.c2 * phase(m.e2)], true)
}

/// `(2 - 2|c₁|² cos(E₁dt/ħ) - 2|c₂|² cos(E₂dt/ħ))^{1/2}`.
///
/// Evaluated as `(4|c₁|² sin²(E₁dt/2ħ) + 4|c₂|² sin²(E₂dt/2ħ))^{1/2}`, equal under
/// `|c₁|² + |c₂|² = 1` and free of cancellation at small `dt`.
pub fn two_state_exact_norm(m: &TwoStateModel, hbar: f64, dt: f64) -> f64 {
    let (p1, p2) = m.weights();
    let s1 = (0.5 * m.e1 * dt / hbar).sin();
    let s2 = (0.5 * m.e2 * dt / hbar).sin();
    (4.0 * p1 * s1 * s1 + 4.0 * p2 * s2 * s2).sqrt()
}

/// `[|c₁|²E₁² + |c₂|²E₂² - (|c₁|²E₁ + |c₂|²E₂)²]^{1/2} Δt_min / ħ`.
///
/// The bracket equals `|c₁|²|c₂|²(E₁ - E₂)²` for normalized amplitudes, which is what
/// gets evaluated (exactly zero for a degenerate spectrum).
pub fn two_state_norm_limit(m: &TwoStateModel, hbar: f64, dt_min: f64) -> f64 {
    let (p1, p2) = m.weights();
    (p1 * p2).sqrt() * (m.e1 - m.e2).abs() * dt_min / hbar
}

/// `2πħ / max(|E₁|, |E₂|)`, `+∞` when both energies vanish.
pub fn two_state_characteristic_time(m: &TwoStateModel, hbar: f64) -> f64 {
    let e = m.e1.abs().max(m.e2.abs());
    if e == 0.0 {
        f64::INFINITY
    } else {
        2.0 * PI * hbar / e
    }
}

/// System `(c₁|S₁⟩ + c₂|S₂⟩)` measured by an observer starting in `|O₁⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorModel {
    pub c1: Amplitude,
    pub c2: Amplitude,
    pub kappa: f64,
}

impl DetectorModel {
    pub fn new(c1: Amplitude, c2: Amplitude, kappa: f64) -> Result<Self> {
        check_amplitudes(c1, c2)?;
        if !kappa.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Self { c1, c2, kappa })
    }

    pub fn context(&self, hbar: f64) -> Result<EvolutionContext> {
        detector_context(self, hbar)
    }
}

/// `|S₂⟩⟨S₂|`
pub fn system_projector_s2() -> HermitianOperator {
    HermitianOperator::diagonal(&[0.0, 1.0]).expect("diagonal")
}

/// `iκ(|O₂⟩⟨O₁| - |O₁⟩⟨O₂|)`
pub fn observer_hamiltonian(kappa: f64) -> Result<HermitianOperator> {
    let zero = Amplitude::new(0.0, 0.0);
    HermitianOperator::from_rows(vec![
        vec![zero, Amplitude::new(0.0, -kappa)],
        vec![Amplitude::new(0.0, kappa), zero],
    ])
}

pub fn detector_hamiltonian(kappa: f64) -> Result<HermitianOperator> {
    Ok(tensor_product_operator(
        &system_projector_s2(),
        &observer_hamiltonian(kappa)?,
    ))
}

pub fn detector_initial_state(m: &DetectorModel) -> Result<StateVector> {
    let system = StateVector::new(vec![m.c1, m.c2])?;
    Ok(tensor_product_state(&system, &StateVector::basis(2, 0)))
}

pub fn detector_context(m: &DetectorModel, hbar: f64) -> Result<EvolutionContext> {
    EvolutionContext::new(
        detector_hamiltonian(m.kappa)?,
        detector_initial_state(m)?,
        hbar,
    )
}

/// `c₁|S₁O₁⟩ + c₂ cos(κt/ħ)|S₂O₁⟩ + c₂ sin(κt/ħ)|S₂O₂⟩`.
pub fn detector_exact_state(m: &DetectorModel, hbar: f64, t: f64) -> StateVector {
    let angle = m.kappa * t / hbar;
    let zero = Amplitude::new(0.0, 0.0);
    StateVector::from_parts(
        vec![m.c1, zero, m.c2 * angle.cos(), m.c2 * angle.sin()],
        true,
    )
}

/// `|c₂| (2 - 2cos(κt/ħ))^{1/2}`, evaluated as `2|c₂| |sin(κt/2ħ)|`.
pub fn detector_exact_norm(m: &DetectorModel, hbar: f64, t: f64) -> f64 {
    2.0 * m.c2.norm() * (0.5 * m.kappa * t / hbar).sin().abs()
}

/// `|c₂| |κ| Δt_min / ħ`.
pub fn detector_norm_limit(m: &DetectorModel, hbar: f64, dt_min: f64) -> f64 {
    m.c2.norm() * m.kappa.abs() * dt_min / hbar
}

/// `2πħ / |κ|`, `+∞` for `κ = 0`.
pub fn detector_characteristic_time(m: &DetectorModel, hbar: f64) -> f64 {
    if m.kappa == 0.0 {
        f64::INFINITY
    } else {
        2.0 * PI * hbar / m.kappa.abs()
    }
}

/// `t_meas = πħ / (2κ)`, when observer and system are perfectly correlated.
pub fn measurement_time(m: &DetectorModel, hbar: f64) -> Result<f64> {
    if m.kappa.is_nan() || m.kappa <= 0.0 {
        return Err(Error::NonPositiveKappa(m.kappa));
    }
    Ok(PI * hbar / (2.0 * m.kappa))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub dim: usize,
    pub seed: u64,
    pub count: usize,
    pub energy_scale: f64,
}

impl EnsembleSpec {
    pub const MIN_DIM: usize = 2;
    pub const MAX_DIM: usize = 16;

    pub fn new(dim: usize, seed: u64, count: usize, energy_scale: f64) -> Result<Self> {
        let spec = Self {
            dim,
            seed,
            count,
            energy_scale,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(Self::MIN_DIM..=Self::MAX_DIM).contains(&self.dim) {
            return Err(Error::InvalidConfig(format!(
                "ensemble dim must lie in [{}, {}], got {}",
                Self::MIN_DIM,
                Self::MAX_DIM,
                self.dim
            )));
        }
        if self.count == 0 {
            return Err(Error::InvalidConfig(
                "ensemble count must be positive".into(),
            ));
        }
        if !(self.energy_scale > 0.0 && self.energy_scale.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "energy_scale must be positive, got {}",
                self.energy_scale
            )));
        }
        Ok(())
    }

    /// The ChaCha20 generator for sample `index`.
    pub fn rng(&self, index: u64) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }
}

fn complex_gaussian(rng: &mut ChaCha20Rng) -> Amplitude {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Amplitude::new(re, im)
}

/// Hermitian part `(A + A†)/2` of a matrix with i.i.d. complex Gaussian entries
/// (real and imaginary parts standard normal), scaled by `energy_scale`.
pub fn random_hamiltonian(
    rng: &mut ChaCha20Rng,
    dim: usize,
    energy_scale: f64,
) -> HermitianOperator {
    let a: Vec<Amplitude> = (0..dim * dim).map(|_| complex_gaussian(rng)).collect();
    HermitianOperator::hermitize(dim, a).scaled(energy_scale)
}

/// Normalized complex Gaussian vector (uniform on the unit sphere).
pub fn random_state(rng: &mut ChaCha20Rng, dim: usize) -> StateVector {
    loop {
        let v: Vec<Amplitude> = (0..dim).map(|_| complex_gaussian(rng)).collect();
        if let Ok(s) = StateVector::raw(v).and_then(|v| normalize(&v)) {
            return s;
        }
    }
}

/// Sample `index` of the ensemble: a random Hamiltonian, then a random initial state,
/// both drawn from the sample's own stream. `ħ = 1`.
pub fn random_system(spec: &EnsembleSpec, index: u64) -> Result<EvolutionContext> {
    spec.validate()?;
    let mut rng = spec.rng(index);
    let h = random_hamiltonian(&mut rng, spec.dim, spec.energy_scale);
    let psi0 = random_state(&mut rng, spec.dim);
    EvolutionContext::new(h, psi0, 1.0)
}
