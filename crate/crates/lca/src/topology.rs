//! Closed-form characteristics of critical submanifolds.
//!
//! Every quantity here is a function of a contingency table `K` and, for
//! the landscape value, the two spectra:
//!
//! - dimension `D₀ = Σnᵢ² + Σmⱼ² − Σk²ᵢⱼ`,
//! - Hessian index pair `D₊ = 2·tr(J_r K J_s Kᵀ)`, `D₋ = 2·tr(J_r K J_sᵀ Kᵀ)`
//!   with `J_t` the strictly-upper-triangular 0/1 matrix,
//! - landscape value `J(K) = Σ kᵢⱼ λᵢ εⱼ`,
//! - the type of the critical set: `D₊ = 0` is the unique maximum,
//!   `D₋ = 0` the unique minimum, both zero the flat landscape, anything
//!   else a saddle.
//!
//! The three indices always sum to N². Signature arithmetic is exact
//! integer matrix algebra; the only floating point in this module is the
//! landscape value itself.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::spectra::{DegeneracyProfile, Spectrum};
use crate::tables::{enumerate_tables, ContingencyTable};

/// Local type of a critical submanifold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CriticalKind {
    Maximum,
    Minimum,
    Saddle,
    /// r = 1 or s = 1: the landscape is constant and all of U(N) is critical.
    Flat,
}

impl CriticalKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CriticalKind::Maximum => "maximum",
            CriticalKind::Minimum => "minimum",
            CriticalKind::Saddle => "saddle",
            CriticalKind::Flat => "flat",
        }
    }
}

impl std::fmt::Display for CriticalKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One critical submanifold: its table and all computed characteristics.
#[derive(Clone, Debug)]
pub struct SubmanifoldRecord {
    pub table: ContingencyTable,
    pub j_value: f64,
    pub d0: usize,
    pub d_plus: usize,
    pub d_minus: usize,
    pub kind: CriticalKind,
}

#[derive(Clone, Debug)]
pub struct ReportSummary {
    pub n: usize,
    pub table_count: usize,
    pub j_max: f64,
    pub j_min: f64,
    pub warnings: Vec<String>,
}

/// Full landscape report: records sorted by descending landscape value,
/// ties broken by the canonical table order.
#[derive(Clone, Debug)]
pub struct LandscapeReport {
    pub records: Vec<SubmanifoldRecord>,
    pub summary: ReportSummary,
}

/// Knobs for report assembly.
#[derive(Clone, Copy, Debug)]
pub struct AnalyzeLimits {
    /// Enumeration budget; margins like all-ones at N = 12 produce half a
    /// billion tables, so materialization is refused above this.
    pub max_tables: usize,
}

impl Default for AnalyzeLimits {
    fn default() -> Self {
        AnalyzeLimits {
            max_tables: 1_000_000,
        }
    }
}

/// Submanifold dimension `D₀(K) = Σnᵢ² + Σmⱼ² − Σk²ᵢⱼ`.
///
/// Equals `dim U(n) + dim U(m) − dim U(K)` for the quotient presentation
/// of the submanifold.
pub fn dimension(table: &ContingencyTable) -> usize {
    let rn: usize = table.row_margins().iter().map(|&n| n * n).sum();
    let cm: usize = table.col_margins().iter().map(|&m| m * m).sum();
    let kk: usize = (0..table.rows())
        .flat_map(|i| (0..table.cols()).map(move |j| table.entry(i, j)))
        .map(|k| k * k)
        .sum();
    rn + cm - kk
}

/// Strictly-upper-triangular 0/1 index matrix of size t.
fn index_matrix(t: usize) -> Vec<Vec<usize>> {
    (0..t)
        .map(|i| (0..t).map(|j| usize::from(i < j)).collect())
        .collect()
}

fn imat_mul(a: &[Vec<usize>], b: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let rows = a.len();
    let inner = b.len();
    let cols = b[0].len();
    let mut out = vec![vec![0usize; cols]; rows];
    for i in 0..rows {
        for k in 0..inner {
            let v = a[i][k];
            if v == 0 {
                continue;
            }
            for j in 0..cols {
                out[i][j] += v * b[k][j];
            }
        }
    }
    out
}

fn imat_trace(a: &[Vec<usize>]) -> usize {
    (0..a.len()).map(|i| a[i][i]).sum()
}

fn imat_transpose(a: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let rows = a.len();
    let cols = a[0].len();
    (0..cols)
        .map(|j| (0..rows).map(|i| a[i][j]).collect())
        .collect()
}

/// Hessian index pair `(D₊, D₋) = (2·tr(J_r K J_s Kᵀ), 2·tr(J_r K J_sᵀ Kᵀ))`.
///
/// Both are even non-negative integers and `D₀ + D₊ + D₋ = N²`.
pub fn signature(table: &ContingencyTable) -> (usize, usize) {
    let k = table.to_nested();
    let kt = imat_transpose(&k);
    let jr = index_matrix(table.rows());
    let js = index_matrix(table.cols());
    let jst = imat_transpose(&js);

    let d_plus = 2 * imat_trace(&imat_mul(&imat_mul(&imat_mul(&jr, &k), &js), &kt));
    let d_minus = 2 * imat_trace(&imat_mul(&imat_mul(&imat_mul(&jr, &k), &jst), &kt));
    (d_plus, d_minus)
}

/// Landscape value `J(K) = Σ kᵢⱼ λᵢ εⱼ`.
pub fn landscape_value(table: &ContingencyTable, rho: &Spectrum, theta: &Spectrum) -> Result<f64> {
    if table.row_margins() != rho.multiplicities() || table.col_margins() != theta.multiplicities()
    {
        return Err(Error::MarginMismatch(
            "table margins do not match the spectra multiplicities".into(),
        ));
    }
    let mut j = 0.0;
    for (i, &lam) in rho.distinct().iter().enumerate() {
        for (jj, &eps) in theta.distinct().iter().enumerate() {
            j += table.entry(i, jj) as f64 * lam * eps;
        }
    }
    Ok(j)
}

/// Classifies an index triple. `n` is the total dimension; the triple must
/// sum to n².
pub fn classify(n: usize, d0: usize, d_plus: usize, d_minus: usize) -> Result<CriticalKind> {
    if d0 + d_plus + d_minus != n * n {
        return Err(Error::InternalInvariantViolation(format!(
            "index triple ({d0}, {d_plus}, {d_minus}) does not sum to {}",
            n * n
        )));
    }
    Ok(match (d_plus, d_minus) {
        (0, 0) => CriticalKind::Flat,
        (0, _) => CriticalKind::Maximum,
        (_, 0) => CriticalKind::Minimum,
        _ => CriticalKind::Saddle,
    })
}

fn record_for_table(
    table: ContingencyTable,
    rho: &Spectrum,
    theta: &Spectrum,
) -> Result<SubmanifoldRecord> {
    let n = table.dim();
    let d0 = dimension(&table);
    let (d_plus, d_minus) = signature(&table);
    let kind = classify(n, d0, d_plus, d_minus)?;
    let j_value = landscape_value(&table, rho, theta)?;
    Ok(SubmanifoldRecord {
        table,
        j_value,
        d0,
        d_plus,
        d_minus,
        kind,
    })
}

/// Full critical-topology report for a spectrum pair: one record per
/// contingency table, sorted by descending landscape value (canonical
/// table order on ties), with uniqueness of the extrema verified.
pub fn analyze(
    rho: &Spectrum,
    theta: &Spectrum,
    limits: &AnalyzeLimits,
) -> Result<LandscapeReport> {
    if rho.dim() != theta.dim() {
        return Err(Error::MarginMismatch(format!(
            "spectra dimensions differ: {} vs {}",
            rho.dim(),
            theta.dim()
        )));
    }
    let n = rho.dim();
    let tables = enumerate_tables(&rho.profile(), &theta.profile(), limits.max_tables)?;
    let mut records: Vec<SubmanifoldRecord> = tables
        .into_iter()
        .map(|t| record_for_table(t, rho, theta))
        .collect::<Result<_>>()?;
    // Stable sort: enumeration order is canonical, so ties stay canonical.
    records.sort_by(|a, b| b.j_value.total_cmp(&a.j_value));

    let mut warnings = Vec::new();
    if (rho.trace() - 1.0).abs() > 1e-9 {
        warnings.push(format!(
            "rho trace is {} (unit trace is not required, but this input is not a normalized density matrix)",
            rho.trace()
        ));
    }

    check_extrema_uniqueness(&records, rho.levels(), theta.levels())?;

    let summary = ReportSummary {
        n,
        table_count: records.len(),
        j_max: records.first().map(|r| r.j_value).unwrap_or(0.0),
        j_min: records.last().map(|r| r.j_value).unwrap_or(0.0),
        warnings,
    };
    Ok(LandscapeReport { records, summary })
}

fn check_extrema_uniqueness(records: &[SubmanifoldRecord], r: usize, s: usize) -> Result<()> {
    let maxima = records
        .iter()
        .filter(|rec| rec.kind == CriticalKind::Maximum)
        .count();
    let minima = records
        .iter()
        .filter(|rec| rec.kind == CriticalKind::Minimum)
        .count();
    let flats = records
        .iter()
        .filter(|rec| rec.kind == CriticalKind::Flat)
        .count();
    if r == 1 || s == 1 {
        if flats != 1 || records.len() != 1 {
            return Err(Error::InternalInvariantViolation(format!(
                "flat landscape must have exactly one flat record, found {flats} of {}",
                records.len()
            )));
        }
    } else if maxima != 1 || minima != 1 {
        return Err(Error::InternalInvariantViolation(format!(
            "expected exactly one maximum and one minimum, found {maxima} and {minima}"
        )));
    }
    Ok(())
}

/// Per-level predictions for the pure-state case.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PureStateRecord {
    /// Observable level index j (0-based) whose table puts the single
    /// excited population there.
    pub level: usize,
    pub d0: usize,
    pub d_plus: usize,
    pub d_minus: usize,
}

/// A special-case closed form matched by a profile pair.
#[derive(Clone, Debug)]
pub enum ClosedFormCase {
    /// Row margins (1, N−1): one table per observable level, with per-level
    /// index formulas.
    PureState {
        count: BigUint,
        records: Vec<PureStateRecord>,
    },
    /// Column margins all ones: multinomial count, every table has the same
    /// dimension Σnᵢ².
    NonDegenerateObservable { count: BigUint, d0_each: usize },
    /// Two-row margins (M, N−M) against (n₁,…,n_r, N₀) with M and N−M both
    /// at least Σnᵢ: the first-row entries over the small columns are free.
    MolecularTwoRow { count: BigUint, max_d0: i64 },
    /// Two-row margins (n, N−n) against (n,…,n, N₀): compositions of n into
    /// r+1 parts.
    EqualDegeneracyProjector { count: BigUint, max_d0: usize },
}

impl ClosedFormCase {
    pub fn count(&self) -> &BigUint {
        match self {
            ClosedFormCase::PureState { count, .. } => count,
            ClosedFormCase::NonDegenerateObservable { count, .. } => count,
            ClosedFormCase::MolecularTwoRow { count, .. } => count,
            ClosedFormCase::EqualDegeneracyProjector { count, .. } => count,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ClosedFormCase::PureState { .. } => "pure-state",
            ClosedFormCase::NonDegenerateObservable { .. } => "non-degenerate-observable",
            ClosedFormCase::MolecularTwoRow { .. } => "molecular-two-row",
            ClosedFormCase::EqualDegeneracyProjector { .. } => "equal-degeneracy-projector",
        }
    }
}

fn factorial(n: usize) -> BigUint {
    let mut acc = BigUint::from(1u32);
    for i in 2..=n as u64 {
        acc *= i;
    }
    acc
}

fn binomial(n: usize, k: usize) -> BigUint {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Detects which special-case counting formulas apply to a profile pair.
/// Detection is purely structural (margin shapes, never values). Returns
/// every case that matches; an empty vector means the general case, which
/// has no closed form.
pub fn closed_form_counts(
    rows: &DegeneracyProfile,
    cols: &DegeneracyProfile,
) -> Vec<ClosedFormCase> {
    let mut cases = Vec::new();
    if rows.dim() != cols.dim() {
        return cases;
    }
    let n = rows.dim();

    // Pure state: margins (1, N−1).
    if rows.len() == 2 && rows.margins()[0] == 1 && n >= 2 {
        let m = cols.margins();
        let s = m.len();
        let records = (0..s)
            .map(|j| {
                let before: usize = m[..j].iter().sum();
                let after: usize = m[j + 1..].iter().sum();
                PureStateRecord {
                    level: j,
                    d0: n * (n - 2) + 2 * m[j],
                    d_plus: 2 * before,
                    d_minus: 2 * after,
                }
            })
            .collect();
        cases.push(ClosedFormCase::PureState {
            count: BigUint::from(s),
            records,
        });
    }

    // Fully non-degenerate observable: multinomial count.
    if cols.margins().iter().all(|&m| m == 1) {
        let mut count = factorial(n);
        for &ni in rows.margins() {
            count /= factorial(ni);
        }
        let d0_each: usize = rows.margins().iter().map(|&ni| ni * ni).sum();
        cases.push(ClosedFormCase::NonDegenerateObservable { count, d0_each });
    }

    // Molecular two-row profile: (M, N−M) against (n₁,…,n_r, N₀).
    if rows.len() == 2 && cols.len() >= 2 {
        let m_dim = rows.margins()[0];
        let n_list = &cols.margins()[..cols.len() - 1];
        let small_total: usize = n_list.iter().sum();
        if m_dim >= small_total && n - m_dim >= small_total {
            let count = n_list.iter().map(|&ni| BigUint::from(ni + 1)).product();
            let max_d0 = molecular_max_dimension(n, m_dim, n_list).d0;
            cases.push(ClosedFormCase::MolecularTwoRow { count, max_d0 });
        }
    }

    // Equal-degeneracy projector: (n, N−n) against (n,…,n, N₀), N₀ ≥ n.
    if rows.len() == 2 && cols.len() >= 2 {
        let nn = rows.margins()[0];
        let r = cols.len() - 1;
        let head = &cols.margins()[..r];
        let tail = cols.margins()[r];
        if head.iter().all(|&c| c == nn) && tail >= nn {
            let count = binomial(nn + r, r);
            let max_d0 = (n - nn) * (n - nn) + nn * nn;
            cases.push(ClosedFormCase::EqualDegeneracyProjector { count, max_d0 });
        }
    }

    cases
}

/// Result of the molecular maximum-dimension formula.
#[derive(Clone, Debug, PartialEq)]
pub struct MolecularDimension {
    /// `D₀ = N² − 2(N−M)(n₁+⋯+n_r)`.
    pub d0: i64,
    /// Present when the stated regime `M > Σnᵢ` and `N−M > Σnᵢ` is violated;
    /// the value is still computed.
    pub regime_warning: Option<String>,
}

/// Dimension of the maximal critical submanifold for the molecular
/// two-row profile.
pub fn max_submanifold_dimension_molecular(
    n: usize,
    m_dim: usize,
    n_list: &[usize],
) -> MolecularDimension {
    molecular_max_dimension(n, m_dim, n_list)
}

fn molecular_max_dimension(n: usize, m_dim: usize, n_list: &[usize]) -> MolecularDimension {
    let s: usize = n_list.iter().sum();
    let d0 = (n * n) as i64 - 2 * (n - m_dim) as i64 * s as i64;
    let regime_warning = if m_dim > s && n - m_dim > s {
        None
    } else {
        Some(format!(
            "molecular regime requires M > {s} and N−M > {s}; got M = {m_dim}, N−M = {}",
            n - m_dim
        ))
    };
    MolecularDimension { d0, regime_warning }
}
