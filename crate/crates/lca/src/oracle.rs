//! Independent verification of the closed-form results.
//!
//! Nothing in this module reuses the table formulas it checks. Table sets
//! are rebuilt by exhausting all N! permutations; Hessian index triples
//! are recounted from the sign pattern of the pairwise products
//! `(a_β − a_γ)(b_β − b_γ)` of the expanded diagonals; critical points are
//! constructed explicitly as block-unitary × permutation × block-unitary
//! products and checked against the commutator condition `[θ, UρU†] = 0`
//! and the predicted landscape value.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{commutator, random_block_unitary, CMat, Unitary};
use crate::spectra::{DegeneracyProfile, Spectrum};
use crate::tables::{table_of_permutation, ContingencyTable, Permutation};

/// Hard cap for the permutation sweep (10! ≈ 3.6M permutations).
pub const BRUTE_FORCE_CAP: usize = 10;

/// The two length-N diagonals that appear in the Hessian quadratic form at
/// a permutation point: `a` is ρ's expanded diagonal (descending), `b` is
/// θ's expanded diagonal after the permutation.
#[derive(Clone, Debug)]
pub struct ExpandedDiagonal {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl ExpandedDiagonal {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch(a.len(), b.len()));
        }
        if a.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidSpectrum(
                "expanded rho diagonal must be non-increasing".into(),
            ));
        }
        Ok(ExpandedDiagonal { a, b })
    }

    /// Diagonals at the critical point labelled by `pi`: position `p`
    /// pairs ρ's p-th eigenvalue with θ's eigenvalue at `pi.mapping()[p]`.
    pub fn at_permutation(rho: &Spectrum, theta: &Spectrum, pi: &Permutation) -> Result<Self> {
        let a = rho.expanded();
        let theta_exp = theta.expanded();
        if pi.len() != a.len() || theta_exp.len() != a.len() {
            return Err(Error::DimensionMismatch(a.len(), pi.len()));
        }
        let b = pi.mapping().iter().map(|&q| theta_exp[q]).collect();
        ExpandedDiagonal::new(a, b)
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn rho_diag(&self) -> &[f64] {
        &self.a
    }

    pub fn theta_diag(&self) -> &[f64] {
        &self.b
    }

    /// Sign tolerance scaled to the input: 1e-12 times the product of the
    /// largest gaps. Exact zeros are safe because the inputs are user-given
    /// eigenvalues repeated by multiplicity, never computed quantities.
    pub fn default_sign_tol(&self) -> f64 {
        let spread = |v: &[f64]| {
            let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
            max - min
        };
        1e-12 * spread(&self.a) * spread(&self.b)
    }
}

/// Hessian index triple counted numerically.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SignatureTriple {
    pub d0: usize,
    pub d_plus: usize,
    pub d_minus: usize,
}

impl SignatureTriple {
    pub fn total(&self) -> usize {
        self.d0 + self.d_plus + self.d_minus
    }
}

/// Counts the Hessian signature from the expanded diagonals.
///
/// Each unordered pair β < γ contributes two tangent directions whose
/// Hessian eigenvalue is `−(a_β − a_γ)(b_β − b_γ)`; the N diagonal phase
/// directions are always flat. Products within `tol` of zero count as
/// flat directions.
pub fn numeric_signature(d: &ExpandedDiagonal, tol: f64) -> SignatureTriple {
    let n = d.len();
    let mut triple = SignatureTriple {
        d0: n,
        d_plus: 0,
        d_minus: 0,
    };
    for beta in 0..n {
        for gamma in (beta + 1)..n {
            let s = (d.a[beta] - d.a[gamma]) * (d.b[beta] - d.b[gamma]);
            if s < -tol {
                triple.d_plus += 2;
            } else if s > tol {
                triple.d_minus += 2;
            } else {
                triple.d0 += 2;
            }
        }
    }
    triple
}

/// Exhausts all N! permutations and collects the distinct tables they
/// produce, with per-table permutation multiplicities. The double-coset
/// picture says this set must equal the enumerated table set.
pub fn brute_force_tables(
    rows: &DegeneracyProfile,
    cols: &DegeneracyProfile,
) -> Result<BTreeMap<ContingencyTable, usize>> {
    let n = rows.dim();
    if n != cols.dim() {
        return Err(Error::MarginMismatch(format!(
            "row margins sum to {n} but column margins sum to {}",
            cols.dim()
        )));
    }
    if n > BRUTE_FORCE_CAP {
        return Err(Error::BruteForceCapExceeded {
            n,
            cap: BRUTE_FORCE_CAP,
        });
    }
    let mut out: BTreeMap<ContingencyTable, usize> = BTreeMap::new();
    for pi in Permutation::all(n) {
        let t = table_of_permutation(&pi, rows, cols)?;
        *out.entry(t).or_insert(0) += 1;
    }
    Ok(out)
}

/// Explicit critical point `U = P·Π·Q` with Haar-random block unitaries:
/// `P` block-diagonal over θ's margins (so it commutes with θ) and `Q`
/// block-diagonal over ρ's margins (so it commutes with ρ).
pub fn random_critical_point<R: Rng + ?Sized>(
    pi: &Permutation,
    rows: &DegeneracyProfile,
    cols: &DegeneracyProfile,
    rng: &mut R,
) -> Result<Unitary> {
    let n = rows.dim();
    if n != cols.dim() || pi.len() != n {
        return Err(Error::MarginMismatch(format!(
            "margins and permutation must agree on N: rows {}, cols {}, pi {}",
            rows.dim(),
            cols.dim(),
            pi.len()
        )));
    }
    let p = random_block_unitary(cols.margins(), rng);
    let q = random_block_unitary(rows.margins(), rng);
    let perm = Unitary::from_permutation(pi.mapping());
    p.mul(&perm)?.mul(&q)
}

/// `tr(UρU†θ)` for diagonal ρ and θ given as expanded eigenvalue vectors.
pub fn objective(u: &Unitary, rho_diag: &[f64], theta_diag: &[f64]) -> f64 {
    let n = u.dim();
    debug_assert_eq!(rho_diag.len(), n);
    debug_assert_eq!(theta_diag.len(), n);
    let m = u.as_mat();
    let mut j = 0.0;
    for p in 0..n {
        // (UρU†)_pp = Σ_q |U_pq|² ρ_q
        let mut x = 0.0;
        for q in 0..n {
            x += m.get(p, q).norm_sqr() * rho_diag[q];
        }
        j += x * theta_diag[p];
    }
    j
}

/// Residual of the critical-point condition: `‖[θ, UρU†]‖_F`.
pub fn commutator_residual(u: &Unitary, rho_diag: &[f64], theta_diag: &[f64]) -> Result<f64> {
    let x = u.conjugate_real_diag(rho_diag)?;
    let theta = CMat::from_real_diag(theta_diag);
    Ok(commutator(&theta, &x)?.frobenius_norm())
}

/// Value of the Hessian quadratic form `tr(A·UρU†·A·θ − A²·UρU†·θ)` in the
/// direction of a Hermitian `A`. At a critical permutation point with
/// `A` an elementary Hermitian basis element on positions (β, γ), this is
/// the coefficient `−(a_β − a_γ)(b_β − b_γ)`.
pub fn hessian_form_value(
    a: &CMat,
    u: &Unitary,
    rho_diag: &[f64],
    theta_diag: &[f64],
) -> Result<f64> {
    let defect = a.hermitian_defect();
    if defect > crate::linalg::HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let x = u.conjugate_real_diag(rho_diag)?;
    let theta = CMat::from_real_diag(theta_diag);
    let axa = a.mul(&x)?.mul(a)?;
    let aax = a.mul(a)?.mul(&x)?;
    let h = axa.sub(&aax)?.mul(&theta)?.trace();
    Ok(h.re)
}

/// Elementary Hermitian direction: real (`1` at both off-diagonal slots)
/// or imaginary (`i` and `−i`) unit element on positions (β, γ), or a
/// diagonal phase direction when β = γ.
pub fn elementary_hermitian(n: usize, beta: usize, gamma: usize, imaginary: bool) -> CMat {
    let mut m = CMat::zeros(n);
    if beta == gamma {
        m.set(beta, beta, Complex64::ONE);
    } else if imaginary {
        m.set(beta, gamma, Complex64::new(0.0, 1.0));
        m.set(gamma, beta, Complex64::new(0.0, -1.0));
    } else {
        m.set(beta, gamma, Complex64::ONE);
        m.set(gamma, beta, Complex64::ONE);
    }
    m
}

/// Counts positive, negative, and flat Hessian values over the full
/// elementary basis (N diagonal + 2·C(N,2) off-diagonal directions) at a
/// critical point. Must reproduce [`numeric_signature`].
pub fn signature_from_hessian_basis(
    u: &Unitary,
    rho_diag: &[f64],
    theta_diag: &[f64],
    tol: f64,
) -> Result<SignatureTriple> {
    let n = u.dim();
    let mut triple = SignatureTriple {
        d0: 0,
        d_plus: 0,
        d_minus: 0,
    };
    for beta in 0..n {
        for gamma in beta..n {
            let dirs: &[bool] = if beta == gamma {
                &[false]
            } else {
                &[false, true]
            };
            for &imaginary in dirs {
                let a = elementary_hermitian(n, beta, gamma, imaginary);
                let h = hessian_form_value(&a, u, rho_diag, theta_diag)?;
                if h > tol {
                    triple.d_plus += 1;
                } else if h < -tol {
                    triple.d_minus += 1;
                } else {
                    triple.d0 += 1;
                }
            }
        }
    }
    Ok(triple)
}

/// Result of one named check of the verification sweep.
#[derive(Clone, Debug)]
pub struct SweepCheck {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl SweepCheck {
    fn new(name: &'static str) -> Self {
        SweepCheck {
            name,
            cases: 0,
            failures: 0,
            first_failure: None,
        }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(detail());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Outcome of [`oracle_sweep`] over a margin corpus.
#[derive(Clone, Debug)]
pub struct SweepReport {
    pub pairs: usize,
    pub checks: Vec<SweepCheck>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed())
    }
}

/// Every margin pair from the partitions of 1..=max_n, including the
/// reversed (non-increasing and non-decreasing) orientation of each
/// partition: the index formulas depend on margin order.
pub fn partition_pair_corpus(max_n: usize) -> Vec<(DegeneracyProfile, DegeneracyProfile)> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        let mut pool: Vec<Vec<usize>> = Vec::new();
        for p in partitions(n) {
            let mut rev = p.clone();
            rev.reverse();
            if !pool.contains(&p) {
                pool.push(p);
            }
            if !pool.contains(&rev) {
                pool.push(rev);
            }
        }
        for rows in &pool {
            for cols in &pool {
                out.push((
                    DegeneracyProfile::new(rows.clone()).expect("positive margins"),
                    DegeneracyProfile::new(cols.clone()).expect("positive margins"),
                ));
            }
        }
    }
    out
}

/// Seeded random margin pairs at the given dimensions.
pub fn random_pair_corpus<R: Rng + ?Sized>(
    dims: &[usize],
    pairs_per_dim: usize,
    rng: &mut R,
) -> Vec<(DegeneracyProfile, DegeneracyProfile)> {
    let mut out = Vec::new();
    for &n in dims {
        for _ in 0..pairs_per_dim {
            let rows = random_margins(n, n, rng);
            let cols = random_margins(n, n, rng);
            out.push((
                DegeneracyProfile::new(rows).expect("positive margins"),
                DegeneracyProfile::new(cols).expect("positive margins"),
            ));
        }
    }
    out
}

/// Strictly decreasing random values with gaps in [0.1, 1.1).
fn random_decreasing_values<R: Rng + ?Sized>(count: usize, rng: &mut R) -> Vec<f64> {
    let mut v = Vec::with_capacity(count);
    let mut current = 1.0;
    for _ in 0..count {
        v.push(current);
        current -= 0.1 + rng.random::<f64>();
    }
    v
}

/// Cross-checks every closed-form result against the independent oracles,
/// for every margin pair in the corpus:
///
/// 1. the enumerated table set equals the brute-force permutation sweep;
/// 2. for every permutation, the numeric pair-sign Hessian signature
///    equals the closed-form triple of its table;
/// 3. every triple sums to N²;
/// 4. exactly one table has D₊ = 0 and exactly one has D₋ = 0 (they
///    coincide precisely in the flat case r = 1 or s = 1);
/// 5. the exact count equals the enumeration length;
/// 6. the D₊ = 0 table attains the maximum landscape value for
///    `j_assignments` random strictly-decreasing value assignments;
/// 7. the special-case closed-form counts, when they apply, agree.
pub fn oracle_sweep(
    corpus: &[(DegeneracyProfile, DegeneracyProfile)],
    j_assignments: usize,
    seed: u64,
) -> Result<SweepReport> {
    let mut brute_check = SweepCheck::new("enumeration-matches-brute-force");
    let mut numeric_check = SweepCheck::new("numeric-signature-matches-closed-form");
    let mut sum_check = SweepCheck::new("index-triple-sums-to-n-squared");
    let mut extrema_check = SweepCheck::new("unique-extremal-tables");
    let mut count_check = SweepCheck::new("count-matches-enumeration");
    let mut argmax_check = SweepCheck::new("dplus-zero-table-attains-max-j");
    let mut closed_check = SweepCheck::new("closed-form-counts-match");

    let mut rng = crate::linalg::task_rng(seed, 0);

    for (rows, cols) in corpus {
        let n = rows.dim();
        let tables = crate::tables::enumerate_tables(rows, cols, 10_000_000)?;

        // Closed-form characteristics per table.
        let mut dplus_zero = Vec::new();
        let mut dminus_zero = Vec::new();
        for t in &tables {
            let d0 = crate::topology::dimension(t);
            let (dp, dm) = crate::topology::signature(t);
            sum_check.record(d0 + dp + dm == n * n, || {
                format!("triple ({d0}, {dp}, {dm}) for table {t:?}")
            });
            if dp == 0 {
                dplus_zero.push(t.clone());
            }
            if dm == 0 {
                dminus_zero.push(t.clone());
            }
        }
        let flat = rows.len() == 1 || cols.len() == 1;
        extrema_check.record(
            dplus_zero.len() == 1
                && dminus_zero.len() == 1
                && (flat == (dplus_zero[0] == dminus_zero[0])),
            || format!("extrema multiplicity for margins {rows:?}/{cols:?}"),
        );

        count_check.record(
            crate::tables::count_tables(rows, cols)? == num_bigint::BigUint::from(tables.len()),
            || format!("count mismatch for margins {rows:?}/{cols:?}"),
        );

        for case in crate::topology::closed_form_counts(rows, cols) {
            closed_check.record(
                case.count() == &num_bigint::BigUint::from(tables.len()),
                || format!("{} count for margins {rows:?}/{cols:?}", case.name()),
            );
        }

        // Integer-valued strictly decreasing spectra make the numeric
        // pair products exact.
        let rho = integer_spectrum(rows);
        let theta = integer_spectrum(cols);

        if n <= BRUTE_FORCE_CAP {
            let mut seen: BTreeMap<ContingencyTable, usize> = BTreeMap::new();
            let mut numeric_ok = true;
            let mut numeric_detail = String::new();
            for pi in Permutation::all(n) {
                let t = table_of_permutation(&pi, rows, cols)?;
                let expected = SignatureTriple {
                    d0: crate::topology::dimension(&t),
                    d_plus: crate::topology::signature(&t).0,
                    d_minus: crate::topology::signature(&t).1,
                };
                let d = ExpandedDiagonal::at_permutation(&rho, &theta, &pi)?;
                let got = numeric_signature(&d, d.default_sign_tol());
                if got != expected && numeric_ok {
                    numeric_ok = false;
                    numeric_detail = format!("permutation {:?} on {rows:?}/{cols:?}", pi.mapping());
                }
                *seen.entry(t).or_insert(0) += 1;
            }
            numeric_check.record(numeric_ok, || numeric_detail);

            let brute_keys: Vec<&ContingencyTable> = seen.keys().collect();
            let listed: Vec<&ContingencyTable> = tables.iter().collect();
            brute_check.record(brute_keys == listed, || {
                format!("table sets differ for margins {rows:?}/{cols:?}")
            });
        }

        if dplus_zero.len() != 1 {
            continue; // already recorded as an extrema failure
        }
        // Rearrangement check: the D₊ = 0 table must attain the maximum J.
        for _ in 0..j_assignments {
            let lam = Spectrum::new(
                random_decreasing_values(rows.len(), &mut rng),
                rows.margins().to_vec(),
            )?;
            let eps = Spectrum::new(
                random_decreasing_values(cols.len(), &mut rng),
                cols.margins().to_vec(),
            )?;
            let j_top = crate::topology::landscape_value(&dplus_zero[0], &lam, &eps)?;
            let all_below = tables.iter().all(|t| {
                crate::topology::landscape_value(t, &lam, &eps)
                    .map(|j| j <= j_top + 1e-12)
                    .unwrap_or(false)
            });
            argmax_check.record(all_below, || {
                format!("D+=0 table not maximal for margins {rows:?}/{cols:?}")
            });
        }
    }

    Ok(SweepReport {
        pairs: corpus.len(),
        checks: vec![
            brute_check,
            numeric_check,
            sum_check,
            extrema_check,
            count_check,
            argmax_check,
            closed_check,
        ],
    })
}

fn integer_spectrum(profile: &DegeneracyProfile) -> Spectrum {
    let r = profile.len();
    let distinct: Vec<f64> = (0..r).map(|i| (r - i) as f64).collect();
    Spectrum::new(distinct, profile.margins().to_vec()).expect("valid by construction")
}

/// All integer partitions of `n` in canonical non-increasing order, e.g.
/// 4 → [4], [3,1], [2,2], [2,1,1], [1,1,1,1]. Used to build margin corpora
/// for the verification sweeps.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(rem: usize, max: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rem == 0 {
            out.push(current.clone());
            return;
        }
        for part in (1..=rem.min(max)).rev() {
            current.push(part);
            rec(rem - part, part, current, out);
            current.pop();
        }
    }
    rec(n, n, &mut current, &mut out);
    out
}

/// Random margins: a composition of `n` into at most `max_parts` positive
/// parts, in random order.
pub fn random_margins<R: Rng + ?Sized>(n: usize, max_parts: usize, rng: &mut R) -> Vec<usize> {
    let parts = rng.random_range(1..=max_parts.min(n));
    // Random composition: choose parts−1 distinct cut points in 1..n.
    let mut cuts = Vec::with_capacity(parts - 1);
    while cuts.len() < parts - 1 {
        let c = rng.random_range(1..n);
        if !cuts.contains(&c) {
            cuts.push(c);
        }
    }
    cuts.sort_unstable();
    let mut margins = Vec::with_capacity(parts);
    let mut prev = 0;
    for &c in &cuts {
        margins.push(c - prev);
        prev = c;
    }
    margins.push(n - prev);
    margins
}
