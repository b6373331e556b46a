//! Eigenvalue spectra and degeneracy profiles.
//!
//! Both operators entering the landscape `J(U) = tr(UρU†θ)` can be assumed
//! diagonal, so all that matters downstream is each operator's list of
//! distinct eigenvalues (strictly decreasing) with positive multiplicities.
//! This module parses raw diagonals into that form, projects out the
//! multiplicity margins, and splits degenerate levels for perturbation
//! studies.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distinct real eigenvalues in strictly decreasing order, each with a
/// positive multiplicity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    distinct: Vec<f64>,
    multiplicities: Vec<usize>,
}

/// The multiplicities alone — the margins of the contingency tables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DegeneracyProfile {
    margins: Vec<usize>,
}

impl Spectrum {
    /// Validates the invariants: same lengths, strictly decreasing finite
    /// values, every multiplicity ≥ 1.
    pub fn new(distinct: Vec<f64>, multiplicities: Vec<usize>) -> Result<Self> {
        if distinct.is_empty() {
            return Err(Error::InvalidSpectrum(
                "at least one eigenvalue is required".into(),
            ));
        }
        if distinct.len() != multiplicities.len() {
            return Err(Error::InvalidSpectrum(format!(
                "{} distinct values but {} multiplicities",
                distinct.len(),
                multiplicities.len()
            )));
        }
        if distinct.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpectrum("eigenvalues must be finite".into()));
        }
        if multiplicities.contains(&0) {
            return Err(Error::InvalidSpectrum(
                "every multiplicity must be at least 1".into(),
            ));
        }
        for w in distinct.windows(2) {
            if w[0] <= w[1] {
                return Err(Error::InvalidSpectrum(format!(
                    "distinct eigenvalues must be strictly decreasing: {} <= {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(Spectrum {
            distinct,
            multiplicities,
        })
    }

    /// Clusters raw diagonal entries into a spectrum.
    ///
    /// Values are sorted descending and grouped greedily: a value joins the
    /// current cluster when it lies within `cluster_tol` of the cluster's
    /// first member; the representative is the arithmetic mean.
    pub fn from_values(values: &[f64], cluster_tol: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSpectrum("empty eigenvalue list".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpectrum("eigenvalues must be finite".into()));
        }
        if cluster_tol.is_nan() || cluster_tol < 0.0 {
            return Err(Error::InvalidSpectrum(format!(
                "cluster tolerance must be non-negative, got {cluster_tol}"
            )));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| b.total_cmp(a));

        let mut distinct = Vec::new();
        let mut multiplicities = Vec::new();
        let mut anchor = sorted[0];
        let mut sum = 0.0;
        let mut count = 0usize;
        for &v in &sorted {
            if count > 0 && anchor - v > cluster_tol {
                distinct.push(sum / count as f64);
                multiplicities.push(count);
                anchor = v;
                sum = 0.0;
                count = 0;
            }
            sum += v;
            count += 1;
        }
        distinct.push(sum / count as f64);
        multiplicities.push(count);

        for w in distinct.windows(2) {
            if w[0] <= w[1] {
                return Err(Error::ClusterOverlap {
                    upper: w[0],
                    lower: w[1],
                });
            }
        }
        Spectrum::new(distinct, multiplicities)
    }

    pub fn distinct(&self) -> &[f64] {
        &self.distinct
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    /// Number of distinct eigenvalues.
    pub fn levels(&self) -> usize {
        self.distinct.len()
    }

    /// Total dimension N = sum of multiplicities.
    pub fn dim(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    /// Σ λ_i n_i — the trace of the diagonal operator.
    pub fn trace(&self) -> f64 {
        self.distinct
            .iter()
            .zip(&self.multiplicities)
            .map(|(&v, &m)| v * m as f64)
            .sum()
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.multiplicities.iter().all(|&m| m == 1)
    }

    /// Length-N vector with each eigenvalue repeated by its multiplicity,
    /// descending.
    pub fn expanded(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim());
        for (&v, &m) in self.distinct.iter().zip(&self.multiplicities) {
            out.extend(std::iter::repeat_n(v, m));
        }
        out
    }

    pub fn profile(&self) -> DegeneracyProfile {
        DegeneracyProfile {
            margins: self.multiplicities.clone(),
        }
    }

    /// Splits each eigenvalue of multiplicity k into the k distinct values
    /// `{λ, λ−delta, …, λ−(k−1)·delta}`, producing a fully non-degenerate
    /// spectrum.
    pub fn perturbed(&self, delta: f64) -> Result<Spectrum> {
        if delta.is_nan() || delta <= 0.0 {
            return Err(Error::PerturbationTooLarge(format!(
                "delta must be strictly positive, got {delta}"
            )));
        }
        let max_mult = *self.multiplicities.iter().max().expect("non-empty") as f64;
        let min_gap = self
            .distinct
            .windows(2)
            .map(|w| w[0] - w[1])
            .fold(f64::INFINITY, f64::min);
        if delta * max_mult >= 0.5 * min_gap {
            return Err(Error::PerturbationTooLarge(format!(
                "delta {delta} times max multiplicity {max_mult} must stay below half the \
                 minimum eigenvalue gap {min_gap}"
            )));
        }
        let mut distinct = Vec::with_capacity(self.dim());
        for (&v, &m) in self.distinct.iter().zip(&self.multiplicities) {
            for t in 0..m {
                distinct.push(v - t as f64 * delta);
            }
        }
        let multiplicities = vec![1; distinct.len()];
        Spectrum::new(distinct, multiplicities)
    }
}

impl DegeneracyProfile {
    pub fn new(margins: Vec<usize>) -> Result<Self> {
        if margins.is_empty() || margins.contains(&0) {
            return Err(Error::InvalidSpectrum(
                "degeneracy margins must be non-empty positive integers".into(),
            ));
        }
        Ok(DegeneracyProfile { margins })
    }

    pub fn margins(&self) -> &[usize] {
        &self.margins
    }

    pub fn len(&self) -> usize {
        self.margins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.margins.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.margins.iter().sum()
    }

    /// Block index of each of the N expanded positions.
    pub fn block_of_position(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.dim());
        for (block, &m) in self.margins.iter().enumerate() {
            out.extend(std::iter::repeat_n(block, m));
        }
        out
    }
}
