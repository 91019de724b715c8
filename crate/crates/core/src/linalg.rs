//! Dense complex linear algebra at desk scale.
//!
//! Everything here works on `nalgebra` dynamic matrices of `Complex64`. The
//! SVD and the Hermitian eigensolver are delegated to `faer`; the
//! operations on top of them (thresholded kernels, least-squares with residual
//! checks, PSD tests, Cesàro projections) are defined here so that every
//! downstream module shares one notion of numerical zero.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Numerical thresholds threaded through every check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    /// Relative equality threshold.
    pub eps_eq: f64,
    /// Eigenvalue floor for positivity, relative to the matrix norm.
    pub eps_psd: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { eps_eq: 1e-9, eps_psd: 1e-9 }
    }
}

impl Tolerance {
    pub fn new(eps_eq: f64, eps_psd: f64) -> Result<Self> {
        if !(eps_eq > 0.0 && eps_psd > 0.0) || !eps_eq.is_finite() || !eps_psd.is_finite() {
            return Err(Error::InvalidParameters(format!(
                "tolerances must be strictly positive, got eps_eq={eps_eq}, eps_psd={eps_psd}"
            )));
        }
        Ok(Tolerance { eps_eq, eps_psd })
    }

    /// Same thresholds with `eps_eq` replaced.
    pub fn with_eq(self, eps_eq: f64) -> Self {
        Tolerance { eps_eq, ..self }
    }

    /// `true` when `residual` is negligible against `scale` (floored at 1).
    pub fn negligible(&self, residual: f64, scale: f64) -> bool {
        residual <= self.eps_eq * scale.max(1.0)
    }
}

/// Dense rank-3 complex tensor `T[i][j][k]`, with a lazily built sparse view
/// used by all contractions.
#[derive(Clone, Debug)]
pub struct Tensor3 {
    dims: (usize, usize, usize),
    data: Vec<C64>,
    by_first: OnceLock<Vec<Vec<(usize, usize, C64)>>>,
    by_pair: OnceLock<Vec<Vec<(usize, C64)>>>,
}

impl PartialEq for Tensor3 {
    fn eq(&self, other: &Self) -> bool {
        self.dims == other.dims && self.data == other.data
    }
}

/// Entries below this magnitude are dropped from the sparse views.
const SPARSE_FLOOR: f64 = 1e-15;

impl Tensor3 {
    pub fn zeros(n1: usize, n2: usize, n3: usize) -> Self {
        Tensor3 {
            dims: (n1, n2, n3),
            data: vec![ZERO; n1 * n2 * n3],
            by_first: OnceLock::new(),
            by_pair: OnceLock::new(),
        }
    }

    pub fn from_fn(n1: usize, n2: usize, n3: usize, mut f: impl FnMut(usize, usize, usize) -> C64) -> Self {
        let mut t = Tensor3::zeros(n1, n2, n3);
        for i in 0..n1 {
            for j in 0..n2 {
                for k in 0..n3 {
                    t.data[(i * n2 + j) * n3 + k] = f(i, j, k);
                }
            }
        }
        t
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    #[inline]
    fn offset(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims.1 + j) * self.dims.2 + k
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> C64 {
        self.data[self.offset(i, j, k)]
    }

    /// Mutation invalidates the sparse views.
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: C64) {
        let o = self.offset(i, j, k);
        self.data[o] = v;
        self.by_first = OnceLock::new();
        self.by_pair = OnceLock::new();
    }

    pub fn add(&mut self, i: usize, j: usize, k: usize, v: C64) {
        let o = self.offset(i, j, k);
        self.data[o] += v;
        self.by_first = OnceLock::new();
        self.by_pair = OnceLock::new();
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Nonzero `(j, k, value)` entries of the slice `T[i]`.
    pub fn slice(&self, i: usize) -> &[(usize, usize, C64)] {
        &self.by_first.get_or_init(|| {
            let (n1, n2, n3) = self.dims;
            (0..n1)
                .map(|i| {
                    let mut row = Vec::new();
                    for j in 0..n2 {
                        for k in 0..n3 {
                            let v = self.get(i, j, k);
                            if v.norm() >= SPARSE_FLOOR {
                                row.push((j, k, v));
                            }
                        }
                    }
                    row
                })
                .collect()
        })[i]
    }

    /// Nonzero `(k, value)` entries of the fibre `T[i][j]`.
    pub fn fibre(&self, i: usize, j: usize) -> &[(usize, C64)] {
        let n2 = self.dims.1;
        &self.by_pair.get_or_init(|| {
            let (n1, n2, n3) = self.dims;
            let mut out = Vec::with_capacity(n1 * n2);
            for i in 0..n1 {
                for j in 0..n2 {
                    let fib: Vec<(usize, C64)> = (0..n3)
                        .filter_map(|k| {
                            let v = self.get(i, j, k);
                            (v.norm() >= SPARSE_FLOOR).then_some((k, v))
                        })
                        .collect();
                    out.push(fib);
                }
            }
            out
        })[i * n2 + j]
    }

    /// All nonzero entries in `(i, j, k)` order.
    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, usize, usize, C64)> + '_ {
        (0..self.dims.0).flat_map(move |i| self.slice(i).iter().map(move |&(j, k, v)| (i, j, k, v)))
    }
}

/// Max-modulus entry, the sup-norm used for every residual in the crate.
pub fn sup_norm<'a>(it: impl IntoIterator<Item = &'a C64>) -> f64 {
    it.into_iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn sup_dist(a: &CVector, b: &CVector) -> f64 {
    a.iter().zip(b.iter()).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

pub fn matrix_is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

fn to_faer(a: &ComplexMatrix) -> faer::Mat<C64> {
    faer::Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

fn from_faer(a: faer::MatRef<'_, C64>) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

/// Thin SVD `A = U diag(s) V^H`, singular values in decreasing order.
struct Svd {
    u: ComplexMatrix,
    s: Vec<f64>,
    v: ComplexMatrix,
}

impl Svd {
    fn new(a: &ComplexMatrix) -> Result<Self> {
        let f = to_faer(a);
        let svd = f
            .thin_svd()
            .map_err(|_| Error::SingularSystem { residual: f64::NAN })?;
        let s: Vec<f64> = (0..svd.S().dim()).map(|i| svd.S()[i].re).collect();
        Ok(Svd { u: from_faer(svd.U()), s, v: from_faer(svd.V()) })
    }

    fn smax(&self) -> f64 {
        self.s.iter().cloned().fold(0.0, f64::max)
    }
}

/// All singular values, decreasing.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    to_faer(a).singular_values().unwrap_or_else(|_| vec![f64::NAN])
}

/// Eigenvalues of the Hermitian part, increasing.
pub fn hermitian_eigenvalues(g: &ComplexMatrix) -> Vec<f64> {
    let h = (g + g.adjoint()).scale(0.5);
    let mut ev = to_faer(&h)
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .unwrap_or_else(|_| vec![f64::NAN]);
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Orthonormal basis (as columns) of the numerical kernel: right singular
/// vectors whose singular value is at most `eps_eq * σ_max`.
pub fn kernel_basis(a: &ComplexMatrix, tol: &Tolerance) -> Vec<CVector> {
    let (m, n) = a.shape();
    if n == 0 {
        return Vec::new();
    }
    let identity = || (0..n).map(|i| CVector::from_fn(n, |r, _| if r == i { ONE } else { ZERO })).collect();
    if m == 0 {
        return identity();
    }
    // wide inputs are padded so the thin SVD still carries all n right vectors
    let svd = if m < n {
        let mut sq = ComplexMatrix::zeros(n, n);
        sq.view_mut((0, 0), (m, n)).copy_from(a);
        Svd::new(&sq)
    } else {
        Svd::new(a)
    };
    let Ok(svd) = svd else { return Vec::new() };
    let smax = svd.smax();
    if smax == 0.0 {
        return identity();
    }
    let thr = tol.eps_eq * smax;
    svd.s
        .iter()
        .enumerate()
        .filter(|(_, s)| **s <= thr)
        .map(|(idx, _)| svd.v.column(idx).into_owned())
        .collect()
}

/// Orthonormal basis of the numerical range (left singular vectors above threshold).
pub fn range_basis(a: &ComplexMatrix, tol: &Tolerance) -> Vec<CVector> {
    if a.is_empty() {
        return Vec::new();
    }
    let Ok(svd) = Svd::new(a) else { return Vec::new() };
    let smax = svd.smax();
    if smax == 0.0 {
        return Vec::new();
    }
    let thr = tol.eps_eq * smax;
    svd.s
        .iter()
        .enumerate()
        .filter(|(_, s)| **s > thr)
        .map(|(idx, _)| svd.u.column(idx).into_owned())
        .collect()
}

/// Numerical rank with the crate-wide threshold.
pub fn rank(a: &ComplexMatrix, tol: &Tolerance) -> usize {
    a.ncols() - kernel_basis(a, tol).len()
}

/// Least-squares solution of `A x = b`, accepted only when the residual obeys
/// `‖Ax − b‖ ≤ eps_eq (‖A‖ ‖x‖ + ‖b‖)`.
pub fn solve_linear(a: &ComplexMatrix, b: &CVector, tol: &Tolerance) -> Result<CVector> {
    if a.nrows() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), got: b.len() });
    }
    let rhs = ComplexMatrix::from_column_slice(b.len(), 1, b.as_slice());
    let x = solve_linear_multi(a, &rhs, tol)?;
    Ok(x.column(0).into_owned())
}

/// Column-wise least squares for `A X = B`, with the same residual contract.
pub fn solve_linear_multi(a: &ComplexMatrix, b: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    if a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), got: b.nrows() });
    }
    if a.is_empty() {
        return Ok(ComplexMatrix::zeros(a.ncols(), b.ncols()));
    }
    let svd = Svd::new(a)?;
    let smax = svd.smax();
    if smax == 0.0 {
        let x = ComplexMatrix::zeros(a.ncols(), b.ncols());
        let res = b.norm();
        return if res == 0.0 { Ok(x) } else { Err(Error::SingularSystem { residual: res }) };
    }
    let thr = tol.eps_eq * smax;
    let mut coeffs = svd.u.adjoint() * b;
    for (r, sv) in svd.s.iter().enumerate() {
        let inv = if *sv > thr { 1.0 / sv } else { 0.0 };
        coeffs.row_mut(r).scale_mut(inv);
    }
    let x = &svd.v * coeffs;
    for c in 0..b.ncols() {
        let xc = x.column(c);
        let bc = b.column(c);
        let res = (a * xc - bc).norm();
        let bound = tol.eps_eq * (smax * xc.norm() + bc.norm());
        if res > bound {
            return Err(Error::SingularSystem { residual: res });
        }
    }
    Ok(x)
}

/// Hermitian within `eps_eq` and smallest eigenvalue at least `−eps_psd ‖G‖`.
pub fn psd_check(g: &ComplexMatrix, tol: &Tolerance) -> bool {
    if !g.is_square() {
        return false;
    }
    if g.is_empty() {
        return true;
    }
    let scale = sup_norm(g.iter());
    let herm_res = sup_norm((g - g.adjoint()).iter());
    if herm_res > tol.eps_eq * scale.max(1.0) {
        return false;
    }
    let eig = hermitian_eigenvalues(g);
    let norm = eig.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    min >= -tol.eps_psd * norm
}

/// Smallest eigenvalue of the Hermitian part.
pub fn min_eigenvalue(g: &ComplexMatrix) -> f64 {
    hermitian_eigenvalues(g).first().copied().unwrap_or(f64::INFINITY)
}

/// Cesàro limit `lim (1/n) Σ_{k<n} T^k` of a power-bounded operator, computed as the
/// projection onto `ker(T − I)` along `range(T − I)`.
pub fn cesaro_projection(t: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    if !t.is_square() {
        return Err(Error::NotPowerBounded("operator is not square".into()));
    }
    let n = t.nrows();
    let id = ComplexMatrix::identity(n, n);
    let a = t - &id;
    let svd = Svd::new(&a).map_err(|_| Error::NotPowerBounded("SVD of T - I failed".into()))?;
    let smax = svd.smax();
    if smax == 0.0 {
        return Ok(id);
    }
    let thr = tol.eps_eq * smax.max(1.0);
    let mut fixed = Vec::new();
    let mut moving = Vec::new();
    for (idx, s) in svd.s.iter().enumerate() {
        if *s <= thr {
            fixed.push(svd.v.column(idx).into_owned());
        } else {
            moving.push(svd.u.column(idx).into_owned());
        }
    }
    if fixed.len() + moving.len() != n {
        return Err(Error::NotPowerBounded(format!(
            "dim ker + dim range = {} != {n}",
            fixed.len() + moving.len()
        )));
    }
    if fixed.is_empty() {
        return Ok(ComplexMatrix::zeros(n, n));
    }
    let d = fixed.len();
    let cols: Vec<CVector> = fixed.into_iter().chain(moving).collect();
    let basis = ComplexMatrix::from_columns(&cols);
    let sv = singular_values(&basis);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if smin <= tol.eps_eq.sqrt() {
        return Err(Error::NotPowerBounded(format!(
            "kernel and range of T - I are not complementary (smallest singular value {smin:.3e})"
        )));
    }
    let inv = basis
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::NotPowerBounded("kernel/range basis is singular".into()))?;
    let mut sel = ComplexMatrix::zeros(n, n);
    for i in 0..d {
        sel[(i, i)] = ONE;
    }
    let p = &basis * sel * inv;
    let scale = sup_norm(p.iter()).max(1.0) * sup_norm(t.iter()).max(1.0);
    let checks = [
        sup_norm((&p * &p - &p).iter()),
        sup_norm((t * &p - &p).iter()),
        sup_norm((&p * t - &p).iter()),
    ];
    if checks.iter().any(|r| !tol.negligible(*r, scale)) {
        return Err(Error::NotPowerBounded(format!("projection identities fail (residuals {checks:?})")));
    }
    Ok(p)
}

/// Iterative cross-check for [`cesaro_projection`]: repeated doubling
/// `C_{2m} = (C_m + T^m C_m) / 2`, stopping once a doubling step moves the
/// average by less than `eps_eq`. The average approaches the limit like `1/m`
/// while roundoff in `T^m` grows like `m`, so `eps_eq` much below `1e-8` may not be reachable.
pub fn cesaro_iterative(t: &ComplexMatrix, tol: &Tolerance, max_terms: u64) -> Result<ComplexMatrix> {
    let n = t.nrows();
    let mut avg = ComplexMatrix::identity(n, n);
    let mut power = t.clone();
    let mut terms: u64 = 1;
    while terms < max_terms {
        let next = (&avg + &power * &avg).scale(0.5);
        let step = sup_norm((&next - &avg).iter());
        avg = next;
        terms = terms.saturating_mul(2);
        if tol.negligible(step, sup_norm(avg.iter())) {
            return Ok(avg);
        }
        power = &power * &power;
    }
    Err(Error::NotConverged { terms })
}

/// Default term cap for [`cesaro_iterative`].
pub const CESARO_MAX_TERMS: u64 = 1 << 40;

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn real(rows: usize, cols: usize, v: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_row_iterator(rows, cols, v.iter().map(|x| c(*x, 0.0)))
    }

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn solve_identity_and_diagonal() {
        let tol = Tolerance::default();
        let x = solve_linear(&real(2, 2, &[1.0, 0.0, 0.0, 1.0]), &CVector::from_vec(vec![c(1., 0.), c(2., 0.)]), &tol)
            .unwrap();
        assert!(sup_dist(&x, &CVector::from_vec(vec![c(1., 0.), c(2., 0.)])) < 1e-14);
        let x = solve_linear(&real(2, 2, &[2.0, 0.0, 0.0, 2.0]), &CVector::from_vec(vec![c(2., 0.), c(4., 0.)]), &tol)
            .unwrap();
        assert!(sup_dist(&x, &CVector::from_vec(vec![c(1., 0.), c(2., 0.)])) < 1e-14);
    }

    #[test]
    fn solve_recovers_known_solution() {
        let tol = Tolerance::default();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_matrix(&mut rng, 8) + ComplexMatrix::identity(8, 8).scale(4.0);
        let x = CVector::from_fn(8, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let b = &a * &x;
        let got = solve_linear(&a, &b, &tol).unwrap();
        assert!(sup_dist(&got, &x) < 1e-10);
    }

    #[test]
    fn solve_rejects_inconsistent() {
        let tol = Tolerance::default();
        let a = real(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let b = CVector::from_vec(vec![c(1., 0.), c(2., 0.)]);
        assert!(matches!(solve_linear(&a, &b, &tol), Err(Error::SingularSystem { .. })));
    }

    #[test]
    fn psd_examples() {
        let tol = Tolerance::default();
        assert!(psd_check(&ComplexMatrix::zeros(3, 3), &tol));
        assert!(!psd_check(&real(2, 2, &[1.0, 0.0, 0.0, -1.0]), &tol));
        // eigenvalues 0 and 2
        let g = ComplexMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 1.), c(0., -1.), c(1., 0.)]);
        assert!(psd_check(&g, &tol));
        let eig = hermitian_eigenvalues(&g);
        let mut e: Vec<f64> = eig.to_vec();
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(e[0].abs() < 1e-14 && (e[1] - 2.0).abs() < 1e-14);
        // non-Hermitian
        assert!(!psd_check(&real(2, 2, &[1.0, 1.0, 0.0, 1.0]), &tol));
    }

    #[test]
    fn kernel_examples() {
        let tol = Tolerance::default();
        assert!(kernel_basis(&ComplexMatrix::identity(3, 3), &tol).is_empty());
        let k = kernel_basis(&ComplexMatrix::zeros(4, 4), &tol);
        assert_eq!(k.len(), 4);
        let gram = ComplexMatrix::from_fn(4, 4, |i, j| k[i].dotc(&k[j]));
        assert!(sup_norm((gram - ComplexMatrix::identity(4, 4)).iter()) < 1e-14);
        let k = kernel_basis(&real(2, 2, &[1.0, 0.0, 0.0, 0.0]), &tol);
        assert_eq!(k.len(), 1);
        assert!(k[0][0].norm() < 1e-14 && (k[0][1].norm() - 1.0).abs() < 1e-14);
        // wide and tall shapes
        assert_eq!(kernel_basis(&real(1, 3, &[1.0, 1.0, 1.0]), &tol).len(), 2);
        assert_eq!(kernel_basis(&real(3, 1, &[1.0, 1.0, 1.0]), &tol).len(), 0);
    }

    #[test]
    fn cesaro_examples() {
        let tol = Tolerance::default();
        let id = ComplexMatrix::identity(3, 3);
        assert!(sup_norm((cesaro_projection(&id, &tol).unwrap() - &id).iter()) < 1e-14);
        let swap = real(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let expect = (ComplexMatrix::identity(2, 2) + &swap).scale(0.5);
        assert!(sup_norm((cesaro_projection(&swap, &tol).unwrap() - &expect).iter()) < 1e-12);
        let nil = real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(sup_norm(cesaro_projection(&nil, &tol).unwrap().iter()) < 1e-12);
        let jordan = real(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        assert!(matches!(cesaro_projection(&jordan, &tol), Err(Error::NotPowerBounded(_))));
    }

    #[test]
    fn cesaro_iterative_matches_on_rotation() {
        let tol = Tolerance::default();
        let rot = real(3, 3, &[0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let p = cesaro_projection(&rot, &tol).unwrap();
        let q = cesaro_iterative(&rot, &tol, CESARO_MAX_TERMS).unwrap();
        assert!(sup_norm((p - q).iter()) < 1e-8);
    }

    #[test]
    fn tolerance_rejects_nonpositive() {
        assert!(Tolerance::new(0.0, 1e-9).is_err());
        assert!(Tolerance::new(1e-9, -1.0).is_err());
        assert!(Tolerance::new(1e-9, 1e-9).is_ok());
    }

    #[test]
    fn tensor_sparse_views() {
        let mut t = Tensor3::zeros(2, 2, 2);
        t.set(0, 1, 1, ONE);
        t.set(1, 0, 1, c(0.0, 2.0));
        assert_eq!(t.slice(0), &[(1, 1, ONE)]);
        assert_eq!(t.fibre(1, 0), &[(1, c(0.0, 2.0))]);
        t.add(0, 1, 1, ONE);
        assert_eq!(t.slice(0), &[(1, 1, c(2.0, 0.0))]);
        assert_eq!(t.nonzeros().count(), 2);
    }

    mod props {
        use super::*;
        use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest, ProptestConfig};

        fn unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
            nalgebra::linalg::QR::new(random_matrix(rng, n)).q()
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn psd_invariant_under_unitary_conjugation(seed in any::<u64>(), n in 1usize..7, shift in -1.0f64..1.0) {
                let tol = Tolerance::default();
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let a = random_matrix(&mut rng, n);
                let h = (&a + a.adjoint()).scale(0.5) + ComplexMatrix::identity(n, n).scale(shift * 3.0);
                let u = unitary(&mut rng, n);
                let conj = &u * &h * u.adjoint();
                prop_assert_eq!(psd_check(&h, &tol), psd_check(&conj, &tol));
            }

            #[test]
            fn cesaro_projection_is_idempotent_and_absorbing(seed in any::<u64>(), n in 1usize..6) {
                let tol = Tolerance::default();
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                // column-stochastic matrices are power bounded in the 1-norm
                let mut t = ComplexMatrix::from_fn(n, n, |_, _| c(rng.gen_range(0.0..1.0), 0.0));
                for j in 0..n {
                    let s: f64 = t.column(j).iter().map(|z| z.re).sum();
                    for i in 0..n { t[(i, j)] /= s; }
                }
                let p = cesaro_projection(&t, &tol).unwrap();
                prop_assert!(sup_norm((&p * &p - &p).iter()) < 1e-8);
                prop_assert!(sup_norm((&t * &p - &p).iter()) < 1e-8);
                prop_assert!(sup_norm((&p * &t - &p).iter()) < 1e-8);
            }
        }
    }

    #[test]
    fn solve_residual_bound_on_random_systems() {
        let tol = Tolerance::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let n = rng.gen_range(1..9);
            let a = random_matrix(&mut rng, n) + ComplexMatrix::identity(n, n).scale(3.0);
            let b = CVector::from_fn(n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let x = solve_linear(&a, &b, &tol).unwrap();
            let res = (&a * &x - &b).norm();
            assert!(res <= tol.eps_eq * (singular_values(&a)[0] * x.norm() + b.norm()));
        }
    }
}
