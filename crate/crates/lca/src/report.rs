//! JSON report documents emitted by the CLI.
//!
//! Field order is the serialization order. Floats are written in shortest
//! round-trip form; counts, dimensions, and indices are exact integers
//! (arbitrary-precision table counts included), never floats. Identical
//! jobs produce byte-identical documents.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::spectra::Spectrum;
use crate::topology::{LandscapeReport, SubmanifoldRecord};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumDoc {
    pub distinct: Vec<f64>,
    pub multiplicities: Vec<usize>,
}

impl From<&Spectrum> for SpectrumDoc {
    fn from(s: &Spectrum) -> Self {
        SpectrumDoc {
            distinct: s.distinct().to_vec(),
            multiplicities: s.multiplicities().to_vec(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfilesDoc {
    pub rho: SpectrumDoc,
    pub theta: SpectrumDoc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecordDoc {
    pub table: Vec<Vec<usize>>,
    #[serde(rename = "J")]
    pub j: f64,
    pub d0: usize,
    pub dplus: usize,
    pub dminus: usize,
    pub kind: String,
}

impl From<&SubmanifoldRecord> for RecordDoc {
    fn from(r: &SubmanifoldRecord) -> Self {
        RecordDoc {
            table: r.table.to_nested(),
            j: r.j_value,
            d0: r.d0,
            dplus: r.d_plus,
            dminus: r.d_minus,
            kind: r.kind.as_str().to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryDoc {
    pub table_count: usize,
    pub j_max: f64,
    pub j_min: f64,
}

/// `analyze` output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeDoc {
    pub n: usize,
    pub profiles: ProfilesDoc,
    pub records: Vec<RecordDoc>,
    pub summary: SummaryDoc,
    pub seed: u64,
    pub warnings: Vec<String>,
}

impl AnalyzeDoc {
    pub fn from_report(
        report: &LandscapeReport,
        rho: &Spectrum,
        theta: &Spectrum,
        seed: u64,
        extra_warnings: Vec<String>,
    ) -> Self {
        let mut warnings = extra_warnings;
        warnings.extend(report.summary.warnings.iter().cloned());
        AnalyzeDoc {
            n: report.summary.n,
            profiles: ProfilesDoc {
                rho: rho.into(),
                theta: theta.into(),
            },
            records: report.records.iter().map(RecordDoc::from).collect(),
            summary: SummaryDoc {
                table_count: report.summary.table_count,
                j_max: report.summary.j_max,
                j_min: report.summary.j_min,
            },
            seed,
            warnings,
        }
    }
}

/// `enumerate` output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumerateDoc {
    pub n: usize,
    pub profiles: ProfilesDoc,
    pub count: usize,
    pub tables: Vec<Vec<Vec<usize>>>,
    pub seed: u64,
    pub warnings: Vec<String>,
}

/// `count` output. The count is an exact integer of arbitrary size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountDoc {
    pub n: usize,
    pub profiles: ProfilesDoc,
    pub count: serde_json::Number,
    pub closed_forms: Vec<ClosedFormDoc>,
    pub seed: u64,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormDoc {
    pub case: String,
    pub count: serde_json::Number,
}

/// Exact big integer rendered as a JSON integer literal.
pub fn big_number(value: &num_bigint::BigUint) -> serde_json::Number {
    serde_json::Number::from_str(&value.to_string()).expect("decimal digits parse as a number")
}

/// `verify` output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyDoc {
    pub max_n: usize,
    pub random_pairs: usize,
    pub pairs: usize,
    pub checks: Vec<CheckDoc>,
    pub passed: bool,
    pub seed: u64,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckDoc {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

impl From<&crate::oracle::SweepCheck> for CheckDoc {
    fn from(c: &crate::oracle::SweepCheck) -> Self {
        CheckDoc {
            name: c.name.to_string(),
            cases: c.cases,
            failures: c.failures,
            passed: c.passed(),
            first_failure: c.first_failure.clone(),
        }
    }
}

/// `flow` output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowDoc {
    pub n: usize,
    pub profiles: ProfilesDoc,
    pub levels: Vec<f64>,
    pub j_max: f64,
    pub starts: usize,
    pub saddle_starts: usize,
    pub fraction_at_max: f64,
    pub unmatched: usize,
    pub histogram: Vec<LevelCountDoc>,
    pub trajectories: Vec<TrajectoryDoc>,
    pub passed: bool,
    pub seed: u64,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelCountDoc {
    #[serde(rename = "J")]
    pub j: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryDoc {
    pub start: String,
    pub converged_to: f64,
    pub iterations: usize,
    pub grad_norm: f64,
    pub termination: String,
    pub matched_level: Option<usize>,
    pub reached_max: bool,
}

/// One side of a `perturb-compare` report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbSideDoc {
    pub profiles: ProfilesDoc,
    pub table_count: serde_json::Number,
    pub max_dimension: usize,
    pub dplus_zero_records: usize,
    pub dminus_zero_records: usize,
    pub j_max: f64,
    pub j_min: f64,
    pub records: Vec<RecordDoc>,
}

/// `perturb-compare` output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbCompareDoc {
    pub n: usize,
    pub delta: f64,
    pub original: PerturbSideDoc,
    pub perturbed: PerturbSideDoc,
    pub table_count_before: serde_json::Number,
    pub table_count_after: serde_json::Number,
    pub max_dimension_delta: i64,
    /// Exactly one D₊ = 0 and one D₋ = 0 record survive the perturbation.
    pub extrema_preserved: bool,
    pub seed: u64,
    pub warnings: Vec<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn big_number_keeps_full_precision() {
        let big = num_bigint::BigUint::parse_bytes(b"479001600479001600479001600", 10).unwrap();
        let n = big_number(&big);
        assert_eq!(n.to_string(), "479001600479001600479001600");
    }

    #[test]
    fn analyze_doc_round_trips() {
        let rho = Spectrum::new(vec![0.4, 0.3], vec![1, 2]).unwrap();
        let theta = Spectrum::new(vec![0.4, 0.2], vec![2, 1]).unwrap();
        let report = crate::topology::analyze(&rho, &theta, &Default::default()).unwrap();
        let doc = AnalyzeDoc::from_report(&report, &rho, &theta, 7, vec![]);
        let rendered = serde_json::to_string_pretty(&doc).unwrap();
        let parsed: AnalyzeDoc = serde_json::from_str(&rendered).unwrap();
        assert_eq!(parsed, doc);
    }
}
