//! Contingency tables with fixed margins.
//!
//! A critical submanifold of the landscape is labelled by an r×s matrix of
//! non-negative integers whose row sums are the degeneracy margins of ρ
//! and whose column sums are those of θ. This module enumerates all such
//! tables in a canonical order, counts them exactly without materializing
//! (the count grows combinatorially — there is no general closed form),
//! and maps a permutation of diagonal positions to its table.

use std::collections::HashMap;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::spectra::DegeneracyProfile;

/// r×s matrix of non-negative overlap numbers `k_ij` with row margins
/// `n_i` and column margins `m_j`. Ordered lexicographically by the
/// row-major flattening of the entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ContingencyTable {
    // Field order matters: `derive(Ord)` compares entries first, which is
    // the canonical lexicographic table order.
    entries: Vec<usize>,
    rows: usize,
    cols: usize,
    row_margins: Vec<usize>,
    col_margins: Vec<usize>,
}

impl ContingencyTable {
    /// Builds a table from its rows, deriving the margins. Rejects ragged
    /// input and zero margins (margins come from multiplicities, which are
    /// always positive).
    pub fn from_rows(rows: &[Vec<usize>]) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::InvalidTable(
                "table must have at least one row and column".into(),
            ));
        }
        let s = rows[0].len();
        if rows.iter().any(|r| r.len() != s) {
            return Err(Error::InvalidTable(
                "rows must all have the same length".into(),
            ));
        }
        let entries: Vec<usize> = rows.iter().flatten().copied().collect();
        let row_margins: Vec<usize> = rows.iter().map(|r| r.iter().sum()).collect();
        let col_margins: Vec<usize> = (0..s).map(|j| rows.iter().map(|r| r[j]).sum()).collect();
        if row_margins.contains(&0) || col_margins.contains(&0) {
            return Err(Error::InvalidTable(
                "every row and column margin must be positive".into(),
            ));
        }
        Ok(ContingencyTable {
            entries,
            rows: rows.len(),
            cols: s,
            row_margins,
            col_margins,
        })
    }

    fn from_parts(entries: Vec<usize>, row_margins: Vec<usize>, col_margins: Vec<usize>) -> Self {
        ContingencyTable {
            entries,
            rows: row_margins.len(),
            cols: col_margins.len(),
            row_margins,
            col_margins,
        }
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> usize {
        self.entries[i * self.cols + j]
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row_margins(&self) -> &[usize] {
        &self.row_margins
    }

    pub fn col_margins(&self) -> &[usize] {
        &self.col_margins
    }

    /// Total dimension N.
    pub fn dim(&self) -> usize {
        self.row_margins.iter().sum()
    }

    /// Row-major entries as nested vectors (serialization layout).
    pub fn to_nested(&self) -> Vec<Vec<usize>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.entry(i, j)).collect())
            .collect()
    }

    pub fn transpose(&self) -> ContingencyTable {
        let entries: Vec<usize> = (0..self.cols)
            .flat_map(|j| (0..self.rows).map(move |i| self.entry(i, j)))
            .collect();
        ContingencyTable::from_parts(entries, self.col_margins.clone(), self.row_margins.clone())
    }

    /// Sorted multiset of the nonzero entries. Tables with equal multisets
    /// present their submanifolds as quotients of the same group product;
    /// the fingerprint is recorded without claiming to decide
    /// diffeomorphism in general.
    pub fn nonzero_entry_multiset(&self) -> Vec<usize> {
        let mut nz: Vec<usize> = self.entries.iter().copied().filter(|&k| k > 0).collect();
        nz.sort_unstable();
        nz
    }

    /// Exact margin check against a pair of profiles.
    pub fn matches_margins(&self, rows: &DegeneracyProfile, cols: &DegeneracyProfile) -> bool {
        self.row_margins == rows.margins() && self.col_margins == cols.margins()
    }
}

/// Bijection on `{0, …, N−1}`; `mapping[q]` is the image of position `q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    mapping: Vec<usize>,
}

impl Permutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &p in &mapping {
            if p >= n || seen[p] {
                return Err(Error::InvalidPermutation(format!(
                    "mapping {mapping:?} is not a bijection on 0..{n}"
                )));
            }
            seen[p] = true;
        }
        Ok(Permutation { mapping })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            mapping: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.mapping.len()];
        for (q, &p) in self.mapping.iter().enumerate() {
            inv[p] = q;
        }
        Permutation { mapping: inv }
    }

    /// All N! permutations in lexicographic order of their mappings.
    pub fn all(n: usize) -> impl Iterator<Item = Permutation> {
        use itertools::Itertools;
        (0..n)
            .permutations(n)
            .map(|mapping| Permutation { mapping })
    }
}

fn check_margin_totals(rows: &DegeneracyProfile, cols: &DegeneracyProfile) -> Result<usize> {
    let rt = rows.dim();
    let ct = cols.dim();
    if rt != ct {
        return Err(Error::MarginMismatch(format!(
            "row margins sum to {rt} but column margins sum to {ct}"
        )));
    }
    Ok(rt)
}

/// All contingency tables with the given margins, sorted ascending by the
/// lexicographic order of their row-major entries.
///
/// Rows are filled in order; each row is a bounded composition of its
/// margin with per-column caps equal to remaining column capacity, pruned
/// when the remaining capacity cannot absorb the remaining row sums. The
/// projected count is computed first; if it exceeds `max_tables` the set
/// is not materialized and [`Error::EnumerationBudgetExceeded`] is
/// returned (the count itself remains available via [`count_tables`]).
pub fn enumerate_tables(
    rows: &DegeneracyProfile,
    cols: &DegeneracyProfile,
    max_tables: usize,
) -> Result<Vec<ContingencyTable>> {
    check_margin_totals(rows, cols)?;
    let count = count_tables(rows, cols)?;
    if count > BigUint::from(max_tables) {
        return Err(Error::EnumerationBudgetExceeded {
            count,
            limit: max_tables,
        });
    }

    let s = cols.len();
    let mut caps: Vec<usize> = cols.margins().to_vec();
    let mut entries: Vec<usize> = Vec::with_capacity(rows.len() * s);
    let mut out = Vec::new();
    fill_rows(rows.margins(), 0, s, &mut caps, &mut entries, &mut out);
    Ok(out
        .into_iter()
        .map(|entries| {
            ContingencyTable::from_parts(entries, rows.margins().to_vec(), cols.margins().to_vec())
        })
        .collect())
}

fn fill_rows(
    row_margins: &[usize],
    row: usize,
    s: usize,
    caps: &mut Vec<usize>,
    entries: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if row == row_margins.len() {
        debug_assert!(caps.iter().all(|&c| c == 0));
        out.push(entries.clone());
        return;
    }
    fill_cells(row_margins, row, 0, row_margins[row], s, caps, entries, out);
}

#[allow(clippy::too_many_arguments)]
fn fill_cells(
    row_margins: &[usize],
    row: usize,
    col: usize,
    rem: usize,
    s: usize,
    caps: &mut Vec<usize>,
    entries: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if col == s {
        debug_assert_eq!(rem, 0);
        fill_rows(row_margins, row + 1, s, caps, entries, out);
        return;
    }
    let suffix_cap: usize = caps[col + 1..].iter().sum();
    let lo = rem.saturating_sub(suffix_cap);
    let hi = rem.min(caps[col]);
    for x in lo..=hi {
        entries.push(x);
        caps[col] -= x;
        fill_cells(row_margins, row, col + 1, rem - x, s, caps, entries, out);
        caps[col] += x;
        entries.pop();
    }
}

/// Exact number of contingency tables with the given margins.
///
/// Dynamic programming over residual column-capacity multisets: the count
/// of fillings for the remaining rows is invariant under permuting
/// columns, so states are memoized on the sorted capacity vector. All
/// arithmetic is arbitrary-precision.
pub fn count_tables(rows: &DegeneracyProfile, cols: &DegeneracyProfile) -> Result<BigUint> {
    check_margin_totals(rows, cols)?;
    let mut memo: HashMap<(usize, Vec<usize>), BigUint> = HashMap::new();
    Ok(count_rec(
        rows.margins(),
        0,
        &canonical_caps(cols.margins()),
        &mut memo,
    ))
}

fn canonical_caps(caps: &[usize]) -> Vec<usize> {
    let mut c: Vec<usize> = caps.iter().copied().filter(|&x| x > 0).collect();
    c.sort_unstable_by(|a, b| b.cmp(a));
    c
}

fn count_rec(
    row_margins: &[usize],
    row: usize,
    caps: &[usize],
    memo: &mut HashMap<(usize, Vec<usize>), BigUint>,
) -> BigUint {
    if row == row_margins.len() {
        debug_assert!(caps.is_empty());
        return BigUint::from(1u32);
    }
    let key = (row, caps.to_vec());
    if let Some(v) = memo.get(&key) {
        return v.clone();
    }
    let mut total = BigUint::ZERO;
    let mut caps_vec = caps.to_vec();
    count_compositions(
        row_margins,
        row,
        0,
        row_margins[row],
        &mut caps_vec,
        &mut total,
        memo,
    );
    memo.insert(key, total.clone());
    total
}

fn count_compositions(
    row_margins: &[usize],
    row: usize,
    col: usize,
    rem: usize,
    caps: &mut Vec<usize>,
    total: &mut BigUint,
    memo: &mut HashMap<(usize, Vec<usize>), BigUint>,
) {
    if col == caps.len() {
        if rem == 0 {
            let next = canonical_caps(caps);
            *total += count_rec(row_margins, row + 1, &next, memo);
        }
        return;
    }
    let suffix_cap: usize = caps[col + 1..].iter().sum();
    let lo = rem.saturating_sub(suffix_cap);
    let hi = rem.min(caps[col]);
    if lo > hi {
        return;
    }
    for x in lo..=hi {
        caps[col] -= x;
        count_compositions(row_margins, row, col + 1, rem - x, caps, total, memo);
        caps[col] += x;
    }
}

/// The contingency table of a permutation of diagonal positions.
///
/// Position `p` (carrying the row-block of the expanded ρ diagonal) is
/// paired with position `mapping[p]` of the expanded θ diagonal; `k_ij`
/// counts positions where row-block `i` meets column-block `j`.
pub fn table_of_permutation(
    pi: &Permutation,
    rows: &DegeneracyProfile,
    cols: &DegeneracyProfile,
) -> Result<ContingencyTable> {
    let n = check_margin_totals(rows, cols)?;
    if pi.len() != n {
        return Err(Error::MarginMismatch(format!(
            "permutation acts on {} positions but margins require {n}",
            pi.len()
        )));
    }
    let row_block = rows.block_of_position();
    let col_block = cols.block_of_position();
    let s = cols.len();
    let mut entries = vec![0usize; rows.len() * s];
    for p in 0..n {
        let i = row_block[p];
        let j = col_block[pi.mapping()[p]];
        entries[i * s + j] += 1;
    }
    Ok(ContingencyTable::from_parts(
        entries,
        rows.margins().to_vec(),
        cols.margins().to_vec(),
    ))
}

/// A permutation whose table is `table`: within each row block, positions
/// are sent to the column blocks in order, consuming `k_ij` slots of
/// block `j`. Useful for constructing explicit critical points.
pub fn representative_permutation(table: &ContingencyTable) -> Permutation {
    // Next free expanded position of each column block.
    let mut next: Vec<usize> = Vec::with_capacity(table.cols());
    let mut off = 0;
    for &m in table.col_margins() {
        next.push(off);
        off += m;
    }
    let mut mapping = Vec::with_capacity(table.dim());
    for i in 0..table.rows() {
        for j in 0..table.cols() {
            for _ in 0..table.entry(i, j) {
                mapping.push(next[j]);
                next[j] += 1;
            }
        }
    }
    Permutation { mapping }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn profile(margins: &[usize]) -> DegeneracyProfile {
        DegeneracyProfile::new(margins.to_vec()).unwrap()
    }

    fn table(rows: &[&[usize]]) -> ContingencyTable {
        let rows: Vec<Vec<usize>> = rows.iter().map(|r| r.to_vec()).collect();
        ContingencyTable::from_rows(&rows).unwrap()
    }

    #[test]
    fn enumerates_the_two_tables_of_the_three_level_profile() {
        let tables = enumerate_tables(&profile(&[1, 2]), &profile(&[2, 1]), 1000).unwrap();
        assert_eq!(tables.len(), 2);
        assert_eq!(tables[0], table(&[&[0, 1], &[2, 0]]));
        assert_eq!(tables[1], table(&[&[1, 0], &[1, 1]]));
    }

    #[test]
    fn enumerates_the_five_eight_level_tables() {
        let tables = enumerate_tables(&profile(&[1, 3, 4]), &profile(&[2, 6]), 1000).unwrap();
        let expected = [
            table(&[&[0, 1], &[0, 3], &[2, 2]]),
            table(&[&[0, 1], &[1, 2], &[1, 3]]),
            table(&[&[0, 1], &[2, 1], &[0, 4]]),
            table(&[&[1, 0], &[0, 3], &[1, 3]]),
            table(&[&[1, 0], &[1, 2], &[0, 4]]),
        ];
        assert_eq!(tables, expected);
    }

    #[test]
    fn fully_degenerate_pair_has_single_table() {
        let tables = enumerate_tables(&profile(&[4]), &profile(&[4]), 10).unwrap();
        assert_eq!(tables.len(), 1);
        assert_eq!(tables[0].entry(0, 0), 4);
    }

    #[test]
    fn enumeration_is_strictly_increasing_and_margins_hold() {
        let rows = profile(&[2, 2, 1]);
        let cols = profile(&[1, 3, 1]);
        let tables = enumerate_tables(&rows, &cols, 100_000).unwrap();
        for w in tables.windows(2) {
            assert!(w[0] < w[1], "canonical order must be strictly increasing");
        }
        for t in &tables {
            assert!(t.matches_margins(&rows, &cols));
            for i in 0..t.rows() {
                let sum: usize = (0..t.cols()).map(|j| t.entry(i, j)).sum();
                assert_eq!(sum, rows.margins()[i]);
            }
            for j in 0..t.cols() {
                let sum: usize = (0..t.rows()).map(|i| t.entry(i, j)).sum();
                assert_eq!(sum, cols.margins()[j]);
            }
        }
    }

    #[test]
    fn count_matches_doubly_stochastic_margin_sequence() {
        // Non-negative n x n integer matrices with every row and column
        // sum equal to 2: 3, 21, 282, 6210 for n = 2..=5.
        for (n, expected) in [(2usize, 3u32), (3, 21), (4, 282), (5, 6210)] {
            let twos = profile(&vec![2; n]);
            assert_eq!(count_tables(&twos, &twos).unwrap(), expected.into());
        }
    }

    #[test]
    fn count_matches_known_values() {
        assert_eq!(
            count_tables(&profile(&[1, 3, 4]), &profile(&[2, 6])).unwrap(),
            5u32.into()
        );
        assert_eq!(
            count_tables(&profile(&[1, 1, 1]), &profile(&[1, 1, 1])).unwrap(),
            6u32.into()
        );
        assert_eq!(
            count_tables(&profile(&[2, 2]), &profile(&[1, 1, 1, 1])).unwrap(),
            6u32.into()
        );
    }

    #[test]
    fn fully_perturbed_pair_has_factorial_many_tables() {
        // Splitting every degeneracy turns the margins into all ones, so
        // the table count rises to N!.
        let rho = crate::spectra::Spectrum::new(vec![0.5, 0.1], vec![2, 2]).unwrap();
        let theta = crate::spectra::Spectrum::new(vec![2.0], vec![4]).unwrap();
        let rho_p = rho.perturbed(1e-3).unwrap();
        let theta_p = theta.perturbed(1e-3).unwrap();
        assert_eq!(
            count_tables(&rho_p.profile(), &theta_p.profile()).unwrap(),
            24u32.into()
        );
        assert_eq!(
            count_tables(&rho.profile(), &theta.profile()).unwrap(),
            1u32.into()
        );
    }

    #[test]
    fn count_all_ones_is_factorial() {
        let ones = profile(&[1; 12]);
        let expected: BigUint = (1u64..=12).product::<u64>().into();
        assert_eq!(count_tables(&ones, &ones).unwrap(), expected);
    }

    #[test]
    fn margin_mismatch_is_rejected() {
        assert!(matches!(
            count_tables(&profile(&[2, 1]), &profile(&[1, 1, 2])),
            Err(Error::MarginMismatch(_))
        ));
        assert!(matches!(
            enumerate_tables(&profile(&[2]), &profile(&[3]), 10),
            Err(Error::MarginMismatch(_))
        ));
    }

    #[test]
    fn budget_exceeded_reports_count() {
        let ones = profile(&[1; 6]);
        match enumerate_tables(&ones, &ones, 100) {
            Err(Error::EnumerationBudgetExceeded { count, limit }) => {
                assert_eq!(count, 720u32.into());
                assert_eq!(limit, 100);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn table_of_swap_matches_worked_example() {
        // Swap of the last two positions for ρ margins (1,2), θ margins (2,1).
        let pi = Permutation::new(vec![0, 2, 1]).unwrap();
        let t = table_of_permutation(&pi, &profile(&[1, 2]), &profile(&[2, 1])).unwrap();
        assert_eq!(t, table(&[&[1, 0], &[1, 1]]));
    }

    #[test]
    fn table_of_identity_overlaps_blocks_in_order() {
        let pi = Permutation::identity(3);
        let t = table_of_permutation(&pi, &profile(&[1, 2]), &profile(&[2, 1])).unwrap();
        assert_eq!(t, table(&[&[1, 0], &[1, 1]]));
    }

    #[test]
    fn six_permutations_give_two_tables_with_multiplicities() {
        let rows = profile(&[1, 2]);
        let cols = profile(&[2, 1]);
        let mut counts: std::collections::BTreeMap<ContingencyTable, usize> = Default::default();
        for pi in Permutation::all(3) {
            let t = table_of_permutation(&pi, &rows, &cols).unwrap();
            *counts.entry(t).or_insert(0) += 1;
        }
        assert_eq!(counts.len(), 2);
        let mut mults: Vec<usize> = counts.values().copied().collect();
        assert_eq!(mults.iter().sum::<usize>(), 6);
        mults.sort_unstable();
        assert_eq!(mults, vec![2, 4]);
    }

    #[test]
    fn representative_permutation_round_trips() {
        let rows = profile(&[1, 3, 4]);
        let cols = profile(&[2, 6]);
        for t in enumerate_tables(&rows, &cols, 100).unwrap() {
            let pi = representative_permutation(&t);
            let back = table_of_permutation(&pi, &rows, &cols).unwrap();
            assert_eq!(back, t);
        }
    }

    #[test]
    fn permutation_validation() {
        assert!(Permutation::new(vec![0, 1, 1]).is_err());
        assert!(Permutation::new(vec![0, 3, 1]).is_err());
        assert!(Permutation::new(vec![2, 0, 1]).is_ok());
    }

    #[test]
    fn nonzero_multiset_fingerprint() {
        // Eight-level maximum and middle saddle share {1, 1, 2, 4}.
        let a = table(&[&[0, 1], &[2, 1], &[0, 4]]);
        let b = table(&[&[1, 0], &[1, 2], &[0, 4]]);
        assert_eq!(a.nonzero_entry_multiset(), b.nonzero_entry_multiset());
    }

    proptest! {
        /// Counting is symmetric under transposing the margin roles.
        #[test]
        fn count_transpose_symmetry(
            rows in proptest::collection::vec(1usize..4, 1..4),
            cols in proptest::collection::vec(1usize..4, 1..4),
        ) {
            // Force matching totals by reusing the row multiset when needed.
            let rt: usize = rows.iter().sum();
            let ct: usize = cols.iter().sum();
            let (rows, cols) = if rt == ct { (rows, cols) } else { (rows.clone(), rows) };
            let rp = profile(&rows);
            let cp = profile(&cols);
            prop_assert_eq!(
                count_tables(&rp, &cp).unwrap(),
                count_tables(&cp, &rp).unwrap()
            );
        }

        /// The count always equals the length of the enumeration when the
        /// budget allows materialization.
        #[test]
        fn count_equals_enumeration(
            rows in proptest::collection::vec(1usize..4, 1..4),
        ) {
            let rp = profile(&rows);
            let tables = enumerate_tables(&rp, &rp, 1_000_000).unwrap();
            prop_assert_eq!(count_tables(&rp, &rp).unwrap(), BigUint::from(tables.len()));
        }
    }
}
