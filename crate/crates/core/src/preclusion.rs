//! Branch decomposition and minimum-norm preclusion.
//!
//! A superposition is split by a complete set of orthogonal projectors into labelled
//! branches. Preclusion drops every branch whose norm falls below a threshold and
//! reassembles the rest. A branch whose norm equals the threshold survives.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{
    frobenius_distance, normalize, tensor_product_operator, HermitianOperator, StateVector,
    ZERO_NORM_FLOOR,
};

/// Tolerance on idempotence, orthogonality and completeness of a partition.
pub const PARTITION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub label: String,
    pub component: StateVector,
    pub norm: f64,
}

/// Ordered, labelled projectors that are idempotent, mutually orthogonal and sum to `I`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionSpec {
    parts: Vec<(String, HermitianOperator)>,
}

impl PartitionSpec {
    pub fn new(parts: Vec<(String, HermitianOperator)>) -> Result<Self> {
        let Some(dim) = parts.first().map(|(_, p)| p.dim()) else {
            return Err(Error::InvalidPartition("no projectors".into()));
        };
        let mut sum = HermitianOperator::zeros(dim);
        for (i, (label, p)) in parts.iter().enumerate() {
            if p.dim() != dim {
                return Err(Error::InvalidPartition(format!(
                    "projector {label:?} has dim {}, expected {dim}",
                    p.dim()
                )));
            }
            let err = frobenius_distance(&p.matmul(p)?, p.entries());
            if err > PARTITION_TOL {
                return Err(Error::InvalidPartition(format!(
                    "projector {label:?} is not idempotent (‖P² - P‖ = {err:e})"
                )));
            }
            for (other_label, q) in &parts[i + 1..] {
                let overlap = p
                    .matmul(q)?
                    .iter()
                    .map(|c| c.norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                if overlap > PARTITION_TOL {
                    return Err(Error::InvalidPartition(format!(
                        "projectors {label:?} and {other_label:?} overlap (‖PQ‖ = {overlap:e})"
                    )));
                }
            }
            sum = sum.add(p)?;
        }
        let gap = frobenius_distance(sum.entries(), HermitianOperator::identity(dim).entries());
        if gap > PARTITION_TOL {
            return Err(Error::InvalidPartition(format!(
                "projectors do not sum to the identity (‖ΣP - I‖ = {gap:e})"
            )));
        }
        Ok(Self { parts })
    }

    /// One projector per group, each group an orthonormal set of vectors.
    pub fn from_orthonormal_groups(groups: Vec<(String, Vec<StateVector>)>) -> Result<Self> {
        let mut parts = Vec::with_capacity(groups.len());
        for (label, vectors) in groups {
            let Some(first) = vectors.first() else {
                return Err(Error::InvalidPartition(format!("group {label:?} is empty")));
            };
            let mut p = HermitianOperator::zeros(first.dim());
            for v in &vectors {
                p = p.add(&HermitianOperator::projector(v)?)?;
            }
            parts.push((label, p));
        }
        Self::new(parts)
    }

    /// Rank-one projectors on the given orthogonal rays, plus the complement under
    /// `rest_label` so the partition is complete.
    pub fn rays_with_rest(rays: Vec<(String, StateVector)>, rest_label: &str) -> Result<Self> {
        let Some(dim) = rays.first().map(|(_, v)| v.dim()) else {
            return Err(Error::InvalidPartition("no rays".into()));
        };
        let mut parts = Vec::with_capacity(rays.len() + 1);
        let mut rest = HermitianOperator::identity(dim);
        for (label, v) in rays {
            let p = HermitianOperator::projector(&v)?;
            rest = rest.add(&p.scaled(-1.0))?;
            parts.push((label, p));
        }
        parts.push((rest_label.to_string(), rest));
        Self::new(parts)
    }

    pub fn dim(&self) -> usize {
        self.parts[0].1.dim()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.parts.iter().map(|(l, _)| l.as_str())
    }

    pub fn parts(&self) -> &[(String, HermitianOperator)] {
        &self.parts
    }
}

/// `{|S₁O₁⟩, |S₂O₂⟩, rest}` in the detector basis.
pub fn detector_outcome_partition() -> PartitionSpec {
    PartitionSpec::rays_with_rest(
        vec![
            ("S1O1".into(), StateVector::basis(4, 0)),
            ("S2O2".into(), StateVector::basis(4, 3)),
        ],
        "rest",
    )
    .expect("basis rays form a partition")
}

/// `{P̂^{S₁} ⊗ I, P̂^{S₂} ⊗ I}`: the two system sectors of the detector model.
///
/// After the measurement has completed the sectors hold exactly `c₁|S₁O₁⟩` and
/// `c₂|S₂O₂⟩`, so they carry those labels.
pub fn detector_sector_partition() -> PartitionSpec {
    let id = HermitianOperator::identity(2);
    let s1 = HermitianOperator::diagonal(&[1.0, 0.0]).expect("diagonal");
    let s2 = HermitianOperator::diagonal(&[0.0, 1.0]).expect("diagonal");
    PartitionSpec::new(vec![
        ("S1O1".into(), tensor_product_operator(&s1, &id)),
        ("S2O2".into(), tensor_product_operator(&s2, &id)),
    ])
    .expect("sector projectors form a partition")
}

/// `P_k|ψ⟩` for each projector, in partition order.
pub fn branch_decompose(state: &StateVector, partition: &PartitionSpec) -> Result<Vec<Branch>> {
    if state.dim() != partition.dim() {
        return Err(Error::InvalidPartition(format!(
            "partition has dim {}, state has dim {}",
            partition.dim(),
            state.dim()
        )));
    }
    partition
        .parts
        .iter()
        .map(|(label, p)| {
            let component = p.apply(state)?;
            let norm = component.norm();
            Ok(Branch {
                label: label.clone(),
                component,
                norm,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreclusionReport {
    pub removed_labels: Vec<String>,
    pub survived_labels: Vec<String>,
    /// Norm of the reassembled survivors before any renormalization.
    pub survived_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preclusion {
    pub state: StateVector,
    pub report: PreclusionReport,
}

/// Keeps branches with `norm ≥ norm_min` and sums them.
///
/// With `renormalize` the sum is rescaled to unit norm (when its norm is above the zero
/// floor). Fails with [`Error::AllPrecluded`] when nothing survives.
pub fn preclude(branches: &[Branch], norm_min: f64, renormalize: bool) -> Result<Preclusion> {
    if !norm_min.is_finite() || norm_min < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "norm_min must be finite and non-negative, got {norm_min}"
        )));
    }
    let Some(first) = branches.first() else {
        return Err(Error::AllPrecluded { norm_min });
    };
    let mut sum = StateVector::zeros(first.component.dim());
    let mut removed_labels = Vec::new();
    let mut survived_labels = Vec::new();
    for b in branches {
        if b.norm >= norm_min {
            sum = sum.add(&b.component)?;
            survived_labels.push(b.label.clone());
        } else {
            removed_labels.push(b.label.clone());
        }
    }
    if survived_labels.is_empty() {
        return Err(Error::AllPrecluded { norm_min });
    }
    let survived_norm = sum.norm();
    let state = if renormalize && survived_norm > ZERO_NORM_FLOOR {
        normalize(&sum)?
    } else {
        sum
    };
    Ok(Preclusion {
        state,
        report: PreclusionReport {
            removed_labels,
            survived_labels,
            survived_norm,
        },
    })
}
