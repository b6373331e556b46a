//! Minimal dense complex-matrix kernel.
//!
//! Everything downstream works on the unitary group in dimensions N ≤ 16,
//! so matrices are plain row-major `Vec<Complex64>` buffers with no
//! blocking, no sparsity, and no BLAS. The Hermitian eigensolver is a
//! cyclic Jacobi sweep with complex rotations; the matrix exponential goes
//! through the eigendecomposition so that `exp(isH)` is unitary up to
//! solver error; Haar-distributed unitaries come from modified
//! Gram–Schmidt applied to a complex Gaussian matrix.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Frobenius defect `‖U†U − I‖_F` above which a matrix is rejected as
/// non-unitary. Enforced at construction and after every retraction.
pub const UNITARY_TOL: f64 = 1e-10;

/// Frobenius defect `‖H − H†‖_F` above which a matrix is rejected as
/// non-Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

const JACOBI_MAX_SWEEPS: usize = 100;

/// Square complex matrix, row-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(dim: usize) -> Self {
        CMat {
            dim,
            data: vec![Complex64::ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = CMat::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex64::ONE);
        }
        m
    }

    /// Diagonal matrix from real entries.
    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = CMat::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, Complex64::new(d, 0.0));
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = CMat::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Builds a matrix from row slices of real numbers (test convenience).
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let dim = rows.len();
        assert!(
            rows.iter().all(|r| r.len() == dim),
            "rows must form a square matrix"
        );
        CMat::from_fn(dim, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn mul(&self, other: &CMat) -> Result<CMat> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let n = self.dim;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..n {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &CMat) -> Result<CMat> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &CMat) -> Result<CMat> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        Ok(out)
    }

    pub fn scale(&self, c: Complex64) -> CMat {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= c;
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMat {
        let n = self.dim;
        CMat::from_fn(n, |i, j| self.get(j, i).conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `‖A − A†‖_F`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.get(i, j) - self.get(j, i).conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// `‖A†A − I‖_F`.
    pub fn unitary_defect(&self) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                // (A†A)_ij = Σ_k conj(A_ki) A_kj
                let mut v = Complex64::ZERO;
                for k in 0..n {
                    v += self.get(k, i).conj() * self.get(k, j);
                }
                if i == j {
                    v -= Complex64::ONE;
                }
                acc += v.norm_sqr();
            }
        }
        acc.sqrt()
    }

    fn off_diagonal_norm(&self) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    acc += self.get(i, j).norm_sqr();
                }
            }
        }
        acc.sqrt()
    }
}

/// `AB − BA`.
pub fn commutator(a: &CMat, b: &CMat) -> Result<CMat> {
    a.mul(b)?.sub(&b.mul(a)?)
}

/// Unitary matrix: `‖U†U − I‖_F ≤ UNITARY_TOL` enforced at construction.
#[derive(Clone, Debug)]
pub struct Unitary(CMat);

impl Unitary {
    pub fn new(m: CMat) -> Result<Self> {
        let defect = m.unitary_defect();
        if defect > UNITARY_TOL {
            return Err(Error::NotUnitary(defect));
        }
        Ok(Unitary(m))
    }

    pub fn identity(dim: usize) -> Self {
        Unitary(CMat::identity(dim))
    }

    /// Wraps a matrix that is unitary up to numerical drift,
    /// re-orthonormalizing first when the drift exceeds the tolerance.
    pub fn from_near_unitary(m: CMat) -> Unitary {
        if m.unitary_defect() > UNITARY_TOL {
            Unitary(mgs_orthonormalize(&m))
        } else {
            Unitary(m)
        }
    }

    /// Permutation matrix Π with `Π e_q = e_{mapping[q]}`, so conjugating a
    /// diagonal matrix moves the entry at position `q` to position
    /// `mapping[q]`.
    pub fn from_permutation(mapping: &[usize]) -> Self {
        let n = mapping.len();
        let mut m = CMat::zeros(n);
        for (q, &p) in mapping.iter().enumerate() {
            m.set(p, q, Complex64::ONE);
        }
        Unitary(m)
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn as_mat(&self) -> &CMat {
        &self.0
    }

    pub fn into_mat(self) -> CMat {
        self.0
    }

    pub fn mul(&self, other: &Unitary) -> Result<Unitary> {
        // Products of unitaries can drift slightly past the tolerance after
        // long chains; re-orthonormalize only when needed.
        Ok(Unitary::from_near_unitary(self.0.mul(&other.0)?))
    }

    pub fn adjoint(&self) -> Unitary {
        Unitary(self.0.adjoint())
    }

    /// `U diag(d) U†` for a real diagonal.
    pub fn conjugate_real_diag(&self, d: &[f64]) -> Result<CMat> {
        let n = self.dim();
        if d.len() != n {
            return Err(Error::DimensionMismatch(n, d.len()));
        }
        let u = &self.0;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut v = Complex64::ZERO;
                for q in 0..n {
                    v += u.get(i, q) * d[q] * u.get(j, q).conj();
                }
                out.set(i, j, v);
            }
        }
        Ok(out)
    }

    /// Projects back onto the unitary group by re-orthonormalizing columns.
    pub fn reorthonormalize(&self) -> Unitary {
        Unitary(mgs_orthonormalize(&self.0))
    }
}

/// One cyclic-Jacobi rotation zeroing the (p, q) off-diagonal entry of a
/// Hermitian matrix `a`, accumulating the rotation into `v`.
fn jacobi_rotate(a: &mut CMat, v: &mut CMat, p: usize, q: usize) {
    let n = a.dim();
    let h = a.get(p, q);
    let habs = h.norm();
    if habs == 0.0 {
        return;
    }
    let phase = h / habs; // e^{iφ}
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;
    let tau = (app - aqq) / (2.0 * habs);
    // Smaller root of t² + 2τt − 1 = 0 for stability.
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        1.0 / (tau - (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let r_qp = s * phase.conj(); // R_qp
    let r_pq = -s * phase; // R_pq

    // A ← A R (columns p, q).
    for k in 0..n {
        let akp = a.get(k, p);
        let akq = a.get(k, q);
        a.set(k, p, akp * c + akq * r_qp);
        a.set(k, q, akp * r_pq + akq * c);
    }
    // A ← R† A (rows p, q).
    for k in 0..n {
        let apk = a.get(p, k);
        let aqk = a.get(q, k);
        a.set(p, k, apk * c + aqk * r_qp.conj());
        a.set(q, k, apk * r_pq.conj() + aqk * c);
    }
    // Clamp what the rotation made exact in infinite precision.
    a.set(p, q, Complex64::ZERO);
    a.set(q, p, Complex64::ZERO);
    let dp = a.get(p, p).re;
    let dq = a.get(q, q).re;
    a.set(p, p, Complex64::new(dp, 0.0));
    a.set(q, q, Complex64::new(dq, 0.0));

    // V ← V R.
    for k in 0..n {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, vkp * c + vkq * r_qp);
        v.set(k, q, vkp * r_pq + vkq * c);
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi.
///
/// Returns eigenvalues in descending order and the unitary `V` whose
/// columns are the matching eigenvectors, so `H = V diag(values) V†`
/// within `1e-9·‖H‖_F`.
pub fn hermitian_eigen(h: &CMat) -> Result<(Vec<f64>, Unitary)> {
    let defect = h.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let n = h.dim();
    // Work on the exactly Hermitian part to keep rotations consistent.
    let mut a = CMat::from_fn(n, |i, j| 0.5 * (h.get(i, j) + h.get(j, i).conj()));
    let mut v = CMat::identity(n);
    let scale = a.frobenius_norm();
    if scale == 0.0 {
        return Ok((vec![0.0; n], Unitary(v)));
    }
    let tol = 1e-12 * scale;
    let mut off = a.off_diagonal_norm();
    let mut sweeps = 0;
    while off > tol {
        if sweeps >= JACOBI_MAX_SWEEPS {
            return Err(Error::EigenNoConvergence(off, sweeps));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
        off = a.off_diagonal_norm();
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(j, j).re.total_cmp(&a.get(i, i).re));
    let values: Vec<f64> = order.iter().map(|&i| a.get(i, i).re).collect();
    let vectors = CMat::from_fn(n, |i, j| v.get(i, order[j]));
    Ok((values, Unitary(vectors)))
}

/// `exp(isH)` for Hermitian `H`, via the eigendecomposition
/// `V diag(e^{is·h_k}) V†`. Exactly unitary up to eigensolver error.
pub fn unitary_exp(h: &CMat, s: f64) -> Result<Unitary> {
    let (values, v) = hermitian_eigen(h)?;
    let n = h.dim();
    let vm = v.as_mat();
    // W = V diag(e^{is h_k})
    let w = CMat::from_fn(n, |i, j| {
        vm.get(i, j) * Complex64::new(0.0, s * values[j]).exp()
    });
    Ok(Unitary::from_near_unitary(w.mul(&vm.adjoint())?))
}

/// Modified Gram–Schmidt with a second orthogonalization pass. For a
/// near-unitary input this is a small correction; for a generic input it
/// is the QR orthonormalization with positive real diagonal R.
fn mgs_orthonormalize(m: &CMat) -> CMat {
    let n = m.dim();
    let mut q = m.clone();
    for j in 0..n {
        for _pass in 0..2 {
            for i in 0..j {
                // r = q_i† q_j
                let mut r = Complex64::ZERO;
                for k in 0..n {
                    r += q.get(k, i).conj() * q.get(k, j);
                }
                for k in 0..n {
                    let v = q.get(k, j) - r * q.get(k, i);
                    q.set(k, j, v);
                }
            }
        }
        let norm: f64 = (0..n).map(|k| q.get(k, j).norm_sqr()).sum::<f64>().sqrt();
        for k in 0..n {
            let v = q.get(k, j) / norm;
            q.set(k, j, v);
        }
    }
    q
}

/// Haar-distributed random unitary: orthonormalize a matrix of independent
/// standard complex Gaussians. Gram–Schmidt normalization fixes the
/// triangular factor's diagonal to be real and positive, which is the
/// phase convention that makes the distribution Haar. Deterministic for a
/// given generator state.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Unitary {
    loop {
        let g = random_ginibre(dim, rng);
        if let Some(q) = try_orthonormalize(&g) {
            return Unitary(q);
        }
        // Rank-deficient sample (probability zero); draw again.
    }
}

/// Hermitian matrix `(Z + Z†)/2` of a standard complex Gaussian `Z`.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMat {
    let z = random_ginibre(dim, rng);
    CMat::from_fn(dim, |i, j| 0.5 * (z.get(i, j) + z.get(j, i).conj()))
}

fn random_ginibre<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMat {
    let mut m = CMat::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            m.set(i, j, Complex64::new(re, im));
        }
    }
    m
}

fn try_orthonormalize(m: &CMat) -> Option<CMat> {
    let n = m.dim();
    let mut q = m.clone();
    for j in 0..n {
        for _pass in 0..2 {
            for i in 0..j {
                let mut r = Complex64::ZERO;
                for k in 0..n {
                    r += q.get(k, i).conj() * q.get(k, j);
                }
                for k in 0..n {
                    let v = q.get(k, j) - r * q.get(k, i);
                    q.set(k, j, v);
                }
            }
        }
        let norm: f64 = (0..n).map(|k| q.get(k, j).norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return None;
        }
        for k in 0..n {
            let v = q.get(k, j) / norm;
            q.set(k, j, v);
        }
    }
    Some(q)
}

/// Block-diagonal unitary with Haar-random blocks of the given sizes.
pub fn random_block_unitary<R: Rng + ?Sized>(blocks: &[usize], rng: &mut R) -> Unitary {
    let n: usize = blocks.iter().sum();
    let mut m = CMat::zeros(n);
    let mut offset = 0;
    for &b in blocks {
        let u = random_unitary(b, rng);
        for i in 0..b {
            for j in 0..b {
                m.set(offset + i, offset + j, u.as_mat().get(i, j));
            }
        }
        offset += b;
    }
    Unitary(m)
}

/// Deterministic per-task generator: one seed, one stream index per task.
pub fn task_rng(seed: u64, stream: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn commutator_of_diagonals_is_zero() {
        let a = CMat::from_real_diag(&[1.0, 2.0, 3.0]);
        let b = CMat::from_real_diag(&[0.3, 0.7, -0.2]);
        let com = commutator(&a, &b).unwrap();
        assert_eq!(com.frobenius_norm(), 0.0);
    }

    #[test]
    fn commutator_pauli_pair() {
        let x = CMat::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let z = CMat::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
        let com = commutator(&x, &z).unwrap();
        assert_eq!(com.get(0, 0), c(0.0, 0.0));
        assert_eq!(com.get(0, 1), c(-2.0, 0.0));
        assert_eq!(com.get(1, 0), c(2.0, 0.0));
        assert_eq!(com.get(1, 1), c(0.0, 0.0));
    }

    #[test]
    fn commutator_with_itself_is_zero() {
        let x = CMat::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert_eq!(commutator(&x, &x).unwrap().frobenius_norm(), 0.0);
    }

    #[test]
    fn frobenius_norm_examples() {
        assert_eq!(CMat::identity(4).frobenius_norm(), 2.0);
        assert_eq!(CMat::zeros(3).frobenius_norm(), 0.0);
        let m = CMat::from_real_rows(&[&[3.0, 4.0], &[0.0, 0.0]]);
        assert_eq!(m.frobenius_norm(), 5.0);
    }

    #[test]
    fn eigen_of_diagonal_sorts_descending() {
        let h = CMat::from_real_diag(&[3.0, 1.0, 2.0]);
        let (vals, v) = hermitian_eigen(&h).unwrap();
        assert_eq!(vals, vec![3.0, 2.0, 1.0]);
        // Eigenvectors are permutation columns: column 0 -> e_0, 1 -> e_2, 2 -> e_1.
        assert!((v.as_mat().get(0, 0).norm() - 1.0).abs() < 1e-12);
        assert!((v.as_mat().get(2, 1).norm() - 1.0).abs() < 1e-12);
        assert!((v.as_mat().get(1, 2).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigen_of_pauli_x() {
        let h = CMat::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let (vals, v) = hermitian_eigen(&h).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!((vals[1] + 1.0).abs() < 1e-12);
        // Reconstruct H = V diag V†.
        let recon = v.conjugate_real_diag(&vals).unwrap();
        assert!(recon.sub(&h).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn eigen_of_identity_is_all_ones() {
        let (vals, _) = hermitian_eigen(&CMat::identity(5)).unwrap();
        assert!(vals.iter().all(|&v| (v - 1.0).abs() < 1e-14));
    }

    #[test]
    fn eigen_rejects_non_hermitian() {
        let m = CMat::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(hermitian_eigen(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn eigen_reconstructs_random_hermitian() {
        let mut rng = task_rng(7, 0);
        for n in [2usize, 3, 5, 8] {
            let h = random_hermitian(n, &mut rng);
            let (vals, v) = hermitian_eigen(&h).unwrap();
            let recon = v.conjugate_real_diag(&vals).unwrap();
            let err = recon.sub(&h).unwrap().frobenius_norm();
            assert!(
                err <= 1e-9 * h.frobenius_norm().max(1.0),
                "n={n}: err={err:.3e}"
            );
            assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let u = unitary_exp(&CMat::zeros(3), 1.7).unwrap();
        let d = u.as_mat().sub(&CMat::identity(3)).unwrap().frobenius_norm();
        assert!(d < 1e-13);
    }

    #[test]
    fn exp_of_diag_pi_flips_sign() {
        let h = CMat::from_real_diag(&[std::f64::consts::PI, 0.0]);
        let u = unitary_exp(&h, 1.0).unwrap();
        assert!((u.as_mat().get(0, 0) - c(-1.0, 0.0)).norm() < 1e-12);
        assert!((u.as_mat().get(1, 1) - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn exp_times_inverse_is_identity() {
        let mut rng = task_rng(11, 0);
        let h = random_hermitian(4, &mut rng);
        let u = unitary_exp(&h, 0.37).unwrap();
        let uinv = unitary_exp(&h, -0.37).unwrap();
        let prod = u.mul(&uinv).unwrap();
        let d = prod
            .as_mat()
            .sub(&CMat::identity(4))
            .unwrap()
            .frobenius_norm();
        assert!(d <= 1e-10);
    }

    #[test]
    fn random_unitary_is_unitary_and_deterministic() {
        for n in [1usize, 2, 5, 8] {
            let u1 = random_unitary(n, &mut task_rng(42, 3));
            let u2 = random_unitary(n, &mut task_rng(42, 3));
            assert!(u1.as_mat().unitary_defect() <= UNITARY_TOL);
            assert_eq!(u1.as_mat(), u2.as_mat());
        }
        let u3 = random_unitary(4, &mut task_rng(42, 4));
        let u1 = random_unitary(4, &mut task_rng(42, 3));
        assert_ne!(u1.as_mat(), u3.as_mat());
    }

    #[test]
    fn random_unitary_dim_one_is_unit_modulus() {
        let u = random_unitary(1, &mut task_rng(5, 0));
        assert!((u.as_mat().get(0, 0).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn conjugation_preserves_spectrum() {
        let mut rng = task_rng(23, 0);
        let rho = [0.5, 0.3, 0.1, 0.1];
        for _ in 0..5 {
            let u = random_unitary(4, &mut rng);
            let x = u.conjugate_real_diag(&rho).unwrap();
            let (vals, _) = hermitian_eigen(&x).unwrap();
            let mut sorted = rho.to_vec();
            sorted.sort_by(|a, b| b.total_cmp(a));
            for (a, b) in vals.iter().zip(&sorted) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn permutation_matrix_moves_diagonal_entries() {
        // mapping sends position q to mapping[q]; conjugation must place
        // the q-th diagonal entry at position mapping[q].
        let mapping = [2usize, 0, 1];
        let u = Unitary::from_permutation(&mapping);
        let d = u.conjugate_real_diag(&[10.0, 20.0, 30.0]).unwrap();
        assert_eq!(d.get(2, 2).re, 10.0);
        assert_eq!(d.get(0, 0).re, 20.0);
        assert_eq!(d.get(1, 1).re, 30.0);
    }

    #[test]
    fn block_unitary_has_block_structure() {
        let u = random_block_unitary(&[2, 3], &mut task_rng(9, 0));
        assert!(u.as_mat().unitary_defect() <= UNITARY_TOL);
        for i in 0..2 {
            for j in 2..5 {
                assert_eq!(u.as_mat().get(i, j), Complex64::ZERO);
                assert_eq!(u.as_mat().get(j, i), Complex64::ZERO);
            }
        }
    }

    #[test]
    fn objective_invariant_under_stabilizer_conjugation() {
        // tr(UρU†θ) must not change when ρ is conjugated by a block-diagonal
        // unitary commuting with it.
        let rho = [0.4, 0.3, 0.3];
        let theta = CMat::from_real_diag(&[0.4, 0.4, 0.2]);
        let mut rng = task_rng(31, 0);
        let u = random_unitary(3, &mut rng);
        let q = random_block_unitary(&[1, 2], &mut rng);

        let j_direct = {
            let x = u.conjugate_real_diag(&rho).unwrap();
            x.mul(&theta).unwrap().trace().re
        };
        let uq = u.mul(&q).unwrap();
        let j_stab = {
            let x = uq.conjugate_real_diag(&rho).unwrap();
            x.mul(&theta).unwrap().trace().re
        };
        assert!((j_direct - j_stab).abs() < 1e-12);
    }
}
