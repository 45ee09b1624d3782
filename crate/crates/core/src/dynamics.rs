//! Unitary evolution under a time-independent Hamiltonian.
//!
//! The Hamiltonian is diagonalized once when the context is built; every later
//! evaluation is a phase rotation in the eigenbasis. The state change
//! `|Δψ(t)⟩ = |ψ(t)⟩ - |ψ(0)⟩` is computed directly from `e^{-iE t/ħ} - 1`, so it keeps
//! full relative precision at very small `t` instead of cancelling two `O(1)` vectors.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{
    eigendecompose, inner_product, Amplitude, HermitianOperator, SpectralDecomposition,
    StateVector, NORM_TOL,
};

/// Radicands of the variance down to this value are treated as roundoff and clamped.
pub const VARIANCE_CLAMP: f64 = -1e-14;
/// Spectra with `max |E| ≤ STATIONARY_FLOOR · max(1, ‖H‖_F)` count as zero.
pub const STATIONARY_FLOOR: f64 = 1e-14;

/// A closed system: Hamiltonian, initial state and `ħ`.
#[derive(Debug, Clone)]
pub struct EvolutionContext {
    hamiltonian: HermitianOperator,
    psi0: StateVector,
    hbar: f64,
    spectral: SpectralDecomposition,
    /// `V† |ψ(0)⟩`
    coeffs: Vec<Amplitude>,
}

impl EvolutionContext {
    pub fn new(hamiltonian: HermitianOperator, psi0: StateVector, hbar: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidHbar(hbar));
        }
        if psi0.dim() != hamiltonian.dim() {
            return Err(Error::DimensionMismatch {
                expected: hamiltonian.dim(),
                found: psi0.dim(),
            });
        }
        let norm = psi0.norm();
        if !psi0.is_physical() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        let spectral = eigendecompose(&hamiltonian)?;
        let coeffs = spectral.to_eigenbasis(psi0.amplitudes());
        Ok(Self {
            hamiltonian,
            psi0,
            hbar,
            spectral,
            coeffs,
        })
    }

    pub fn hamiltonian(&self) -> &HermitianOperator {
        &self.hamiltonian
    }

    pub fn psi0(&self) -> &StateVector {
        &self.psi0
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn spectral(&self) -> &SpectralDecomposition {
        &self.spectral
    }

    pub fn dim(&self) -> usize {
        self.psi0.dim()
    }

    /// `|Δψ(dt)⟩ = |ψ(dt)⟩ - |ψ(0)⟩`, flagged non-physical.
    pub fn delta_psi(&self, dt: f64) -> StateVector {
        let shifted: Vec<Amplitude> = self
            .spectral
            .eigenvalues()
            .iter()
            .zip(&self.coeffs)
            .map(|(&e, &c)| {
                let theta = e * dt / self.hbar;
                let half = (0.5 * theta).sin();
                // e^{-iθ} - 1 = -2 sin²(θ/2) - i sin θ
                c * Amplitude::new(-2.0 * half * half, -theta.sin())
            })
            .collect();
        StateVector::from_parts(self.spectral.from_eigenbasis(&shifted), false)
    }

    /// `|ψ(t)⟩ = V e^{-iΛt/ħ} V† |ψ(0)⟩`; negative `t` runs the evolution backwards.
    pub fn propagate(&self, t: f64) -> StateVector {
        let delta = self.delta_psi(t);
        let amps = self
            .psi0
            .amplitudes()
            .iter()
            .zip(delta.amplitudes())
            .map(|(a, d)| a + d)
            .collect();
        StateVector::from_parts(amps, true)
    }

    /// `⟨ψ(t)|ψ(0)⟩`.
    pub fn overlap(&self, t: f64) -> Amplitude {
        let delta = self.delta_psi(t);
        Amplitude::new(1.0, 0.0) + inner_product(&delta, &self.psi0).expect("dims match")
    }

    /// `ΔH` in the initial state. Time-independent, so evaluated at `t = 0`.
    pub fn energy_variance(&self) -> Result<f64> {
        energy_variance_of(&self.hamiltonian, &self.psi0)
    }

    /// `⟨ψ(0)|Ĥ²|ψ(0)⟩^{1/2} = ‖Ĥ|ψ(0)⟩‖`.
    pub fn second_moment_root(&self) -> f64 {
        self.hamiltonian
            .apply(&self.psi0)
            .expect("dims match")
            .norm()
    }

    pub fn overlap_diagnostics(&self, dt: f64) -> OverlapDiagnostics {
        let delta = self.delta_psi(dt);
        let w = inner_product(&delta, &self.psi0).expect("dims match");
        OverlapDiagnostics::from_z(Amplitude::new(1.0, 0.0) + w)
    }

    /// `2πħ / max_k |E_k|`, the shortest time scale on which the state changes.
    pub fn characteristic_time(&self) -> CharacteristicTime {
        let e_max = self
            .spectral
            .eigenvalues()
            .iter()
            .fold(0.0f64, |m, e| m.max(e.abs()));
        let scale = self.hamiltonian.frobenius_norm().max(1.0);
        if e_max <= STATIONARY_FLOOR * scale {
            CharacteristicTime::Unbounded
        } else {
            CharacteristicTime::Finite(2.0 * PI * self.hbar / e_max)
        }
    }
}

/// `ΔH = (⟨Ĥ²⟩ - ⟨Ĥ⟩²)^{1/2}` in `state`.
///
/// Returned as `‖(Ĥ - ⟨Ĥ⟩)|ψ⟩‖`, which is the same quantity without the cancellation
/// of the two moments. The moment-difference radicand is still formed and checked, so a
/// genuinely negative variance (a numerical fault upstream) surfaces as an error.
/// Values at or below `STATIONARY_FLOOR · max(1, ‖H‖_F)` are roundoff and returned as
/// exactly zero, so a degenerate spectrum gives a vanishing bound.
pub fn energy_variance_of(h: &HermitianOperator, state: &StateVector) -> Result<f64> {
    let hpsi = h.apply(state)?;
    let mean = inner_product(state, &hpsi)?.re;
    let second = hpsi.norm_sqr();
    let radicand = second - mean * mean;
    if radicand < VARIANCE_CLAMP * second.max(1.0) {
        return Err(Error::NegativeVariance { radicand });
    }
    let centered: Vec<Amplitude> = hpsi
        .amplitudes()
        .iter()
        .zip(state.amplitudes())
        .map(|(hp, p)| hp - p * mean)
        .collect();
    let delta_h = centered.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if delta_h <= STATIONARY_FLOOR * h.frobenius_norm().max(1.0) {
        Ok(0.0)
    } else {
        Ok(delta_h)
    }
}

/// `z = 1 + ⟨Δψ(dt)|ψ(0)⟩` and the gap `|z| - Re z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OverlapDiagnostics {
    pub z: Amplitude,
    pub abs_z: f64,
    pub re_z: f64,
    pub gap: f64,
}

impl OverlapDiagnostics {
    pub fn from_z(z: Amplitude) -> Self {
        let abs_z = z.norm();
        let re_z = z.re;
        // |z| - Re z = Im(z)² / (|z| + Re z) avoids cancellation when Re z > 0
        let gap = if re_z > 0.0 {
            z.im * z.im / (abs_z + re_z)
        } else {
            abs_z - re_z
        };
        Self {
            z,
            abs_z,
            re_z,
            gap,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CharacteristicTime {
    Finite(f64),
    /// The spectrum is (numerically) zero: the state never changes.
    Unbounded,
}

impl CharacteristicTime {
    pub fn finite(self) -> Option<f64> {
        match self {
            Self::Finite(t) => Some(t),
            Self::Unbounded => None,
        }
    }

    /// The time as a float, `+∞` when unbounded.
    pub fn as_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}
